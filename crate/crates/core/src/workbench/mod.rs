//! Catalog, random controls, quantum ingestion, files, exports and reports.

pub mod catalog;
pub mod export;
pub mod io;
pub mod quantum;
pub mod random;
pub mod report;
