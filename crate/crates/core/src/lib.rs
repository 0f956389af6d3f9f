pub mod error;
pub mod lp;
pub mod model;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
pub mod classifier;
pub mod dutch_book;
pub mod violation;
pub mod workbench;
pub mod wps;
