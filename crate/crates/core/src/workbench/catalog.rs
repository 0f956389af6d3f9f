//! Named example models.
//!
//! Supports follow the standard bundle diagrams. Where only a support is
//! fixed by the diagram, the probabilities are chosen so that the tables come
//! from a concrete source (Born-rule values for the Bell model, an explicit
//! convex decomposition for the Hardy model) and are checked in tests.

use crate::classifier::Tier;
use crate::error::{Error, Result};
use crate::model::{deterministic_model, mixture, EmpiricalModel, Scenario};
use crate::rational::{ratio, Rational};

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub model: EmpiricalModel,
    pub expected_tier: Tier,
    pub notes: &'static str,
}

pub const NAMES: [&str; 5] = ["bell", "hardy", "pr-box", "specker", "ghz"];

pub fn catalog() -> Vec<CatalogEntry> {
    NAMES
        .iter()
        .map(|n| entry(n).expect("catalog entries are valid"))
        .collect()
}

pub fn entry(name: &str) -> Result<CatalogEntry> {
    let (name, model, expected_tier, notes) = match name {
        "bell" => (
            "bell",
            bell()?,
            Tier::Probabilistic,
            "singlet state, directions 0, pi, pi/3, 2pi/3 in one plane for a, b, a', b'",
        ),
        "hardy" => (
            "hardy",
            hardy()?,
            Tier::Logical,
            "1/2 of a PR-type box plus 1/10 each of five deterministic models; \
             the section a=0,b=0 has no consistent global extension",
        ),
        "pr-box" => (
            "pr-box",
            pr_box()?,
            Tier::Strong,
            "a'b' anticorrelated, every other context correlated, uniform on support",
        ),
        "specker" => (
            "specker",
            specker()?,
            Tier::Strong,
            "three pairwise anticorrelated measurements",
        ),
        "ghz" => (
            "ghz",
            ghz()?,
            Tier::Strong,
            "(|000>+|111>)/sqrt2 with X (unprimed) and Y (primed) settings; outcome 1 is the +1 eigenvalue",
        ),
        other => return Err(Error::Domain(format!("no catalog model named `{other}`"))),
    };
    Ok(CatalogEntry {
        name,
        model,
        expected_tier,
        notes,
    })
}

pub fn bell_scenario() -> Scenario {
    Scenario::new(
        ["a", "b", "a'", "b'"],
        ["0", "1"],
        [["a", "b"], ["b", "a'"], ["a'", "b'"], ["a", "b'"]],
    )
    .expect("valid scenario")
}

fn table(values: [(i64, i64); 4]) -> Vec<Rational> {
    values.iter().map(|(n, d)| ratio(*n, *d)).collect()
}

/// Weights for two-outcome pair contexts, in the order 00, 01, 10, 11.
fn pair_model(scenario: Scenario, tables: Vec<[(i64, i64); 4]>) -> Result<EmpiricalModel> {
    EmpiricalModel::from_weights(scenario, tables.into_iter().map(table).collect())
}

const EQUAL: [(i64, i64); 4] = [(1, 2), (0, 1), (0, 1), (1, 2)];
const DIFFER: [(i64, i64); 4] = [(0, 1), (1, 2), (1, 2), (0, 1)];

pub fn bell() -> Result<EmpiricalModel> {
    let mostly_equal = [(3, 8), (1, 8), (1, 8), (3, 8)];
    let mostly_differ = [(1, 8), (3, 8), (3, 8), (1, 8)];
    // Contexts in order {a,b}, {b,a'}, {a',b'}, {a,b'}.
    pair_model(
        bell_scenario(),
        vec![EQUAL, mostly_equal, mostly_differ, mostly_equal],
    )
}

pub fn pr_box() -> Result<EmpiricalModel> {
    pair_model(bell_scenario(), vec![EQUAL, EQUAL, DIFFER, EQUAL])
}

pub fn hardy() -> Result<EmpiricalModel> {
    let sc = bell_scenario();
    // a=b, b≠a', a'≠b', a≠b'.
    let box_part = pair_model(sc.clone(), vec![EQUAL, DIFFER, DIFFER, DIFFER])?;
    let mut models = vec![box_part];
    let mut weights = vec![ratio(1, 2)];
    // Global sections over (a, b, a', b').
    for values in [
        [0, 1, 0, 1],
        [1, 0, 1, 0],
        [1, 1, 1, 0],
        [1, 1, 0, 1],
        [1, 1, 0, 0],
    ] {
        let g = crate::model::Section::from_pairs(values.iter().copied().enumerate())?;
        models.push(deterministic_model(&sc, &g)?);
        weights.push(ratio(1, 10));
    }
    mixture(&models, &weights)
}

pub fn specker() -> Result<EmpiricalModel> {
    let sc = Scenario::new(
        ["a", "b", "c"],
        ["0", "1"],
        [["a", "b"], ["b", "c"], ["a", "c"]],
    )?;
    pair_model(sc, vec![DIFFER, DIFFER, DIFFER])
}

pub fn ghz_scenario() -> Scenario {
    let mut contexts = Vec::new();
    for a in ["a", "a'"] {
        for b in ["b", "b'"] {
            for c in ["c", "c'"] {
                contexts.push([a, b, c]);
            }
        }
    }
    Scenario::new(["a", "a'", "b", "b'", "c", "c'"], ["0", "1"], contexts).expect("valid scenario")
}

pub fn ghz() -> Result<EmpiricalModel> {
    let sc = ghz_scenario();
    let weights = sc
        .maximal_contexts()
        .iter()
        .map(|c| {
            // Primed measurements have odd indices.
            let ys = c.measurements().iter().filter(|x| *x % 2 == 1).count();
            (0..8)
                .map(|k: usize| {
                    let zeros = 3 - k.count_ones() as usize;
                    match ys {
                        1 | 3 => ratio(1, 8),
                        0 if zeros.is_multiple_of(2) => ratio(1, 4),
                        2 if !zeros.is_multiple_of(2) => ratio(1, 4),
                        _ => ratio(0, 1),
                    }
                })
                .collect()
        })
        .collect();
    EmpiricalModel::from_weights(sc, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::classify;
    use crate::model::check_model;

    #[test]
    fn entries_pass_their_checks() {
        for e in catalog() {
            assert!(check_model(&e.model).passed(), "{}", e.name);
            assert_eq!(
                classify(&e.model).unwrap().tier,
                e.expected_tier,
                "{}",
                e.name
            );
        }
    }
}
