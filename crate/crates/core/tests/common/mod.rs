//! Oracles and model sets shared by the integration tests. The oracles
//! recompute tiers from tables directly, without the classifier.
#![allow(dead_code)]

use ctxhier_core::classifier::Tier;
use ctxhier_core::model::{EmpiricalModel, Scenario, Section};
use ctxhier_core::rational::{self, Rational};
use ctxhier_core::workbench::{catalog, random};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every assignment of outcomes to all measurements, as outcome vectors.
pub fn assignments(sc: &Scenario) -> Vec<Vec<usize>> {
    let (n, k) = (sc.num_measurements(), sc.num_outcomes());
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..k).map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o);
                    v
                })
            })
            .collect();
    }
    out
}

fn weight_on(m: &EmpiricalModel, context: usize, g: &[usize]) -> Rational {
    let sc = m.scenario();
    let c = &sc.maximal_contexts()[context];
    let s = Section::from_pairs(c.measurements().iter().map(|&x| (x, g[x]))).unwrap();
    m.table(context).weight(sc, &s)
}

fn consistent(m: &EmpiricalModel, g: &[usize]) -> bool {
    (0..m.tables().len()).all(|i| !weight_on(m, i, g).is_zero())
}

/// No assignment is consistent with every table's support.
pub fn strongly_contextual(m: &EmpiricalModel) -> bool {
    !assignments(m.scenario()).iter().any(|g| consistent(m, g))
}

/// Some support section extends to no consistent assignment.
pub fn logically_contextual(m: &EmpiricalModel) -> bool {
    let all = assignments(m.scenario());
    let good: Vec<&Vec<usize>> = all.iter().filter(|g| consistent(m, g)).collect();
    let sc = m.scenario();
    sc.maximal_contexts().iter().enumerate().any(|(i, c)| {
        m.table(i).support(sc).iter().any(|s| {
            !good
                .iter()
                .any(|g| c.measurements().iter().all(|&x| s.get(x) == Some(g[x])))
        })
    })
}

/// The measurement order around the cycle when the maximal contexts are
/// two-outcome pairs forming a single cycle.
fn cycle_order(sc: &Scenario) -> Option<Vec<usize>> {
    let n = sc.num_measurements();
    if sc.num_outcomes() != 2 || sc.maximal_contexts().len() != n || n < 3 {
        return None;
    }
    if sc.maximal_contexts().iter().any(|c| c.len() != 2) {
        return None;
    }
    let mut order = vec![0];
    while order.len() < n {
        let last = *order.last().unwrap();
        let next = sc.maximal_contexts().iter().find_map(|c| {
            let m = c.measurements();
            let other = if m[0] == last {
                m[1]
            } else if m[1] == last {
                m[0]
            } else {
                return None;
            };
            (!order.contains(&other)).then_some(other)
        })?;
        order.push(next);
    }
    Some(order)
}

/// `⟨x y⟩` on a two-outcome pair context.
fn correlator(m: &EmpiricalModel, context: usize) -> Rational {
    let sc = m.scenario();
    sc.sections_over(&sc.maximal_contexts()[context])
        .unwrap()
        .iter()
        .map(|s| {
            let w = m.table(context).weight(sc, s);
            if s.values()[0] == s.values()[1] {
                w
            } else {
                -w
            }
        })
        .fold(Rational::zero(), |a, b| a + b)
}

/// For an n-cycle of two-outcome measurements a global distribution exists
/// iff `Σ_i s_i ⟨x_i x_{i+1}⟩ ≤ n − 2` for every sign vector with an odd
/// number of minus signs (CHSH for n = 4). `None` off cycle scenarios.
pub fn cycle_noncontextual(m: &EmpiricalModel) -> Option<bool> {
    let sc = m.scenario();
    let order = cycle_order(sc)?;
    let n = order.len();
    let e: Vec<Rational> = (0..n)
        .map(|i| {
            let pair = [order[i], order[(i + 1) % n]];
            let k = sc
                .maximal_contexts()
                .iter()
                .position(|c| c.contains(pair[0]) && c.contains(pair[1]))
                .unwrap();
            correlator(m, k)
        })
        .collect();
    let bound = rational::int(n as i64 - 2);
    Some(
        (0u32..1 << n)
            .filter(|s| s.count_ones() % 2 == 1)
            .all(|signs| {
                let total = (0..n).fold(Rational::zero(), |acc, i| {
                    if signs & (1 << i) != 0 {
                        acc - &e[i]
                    } else {
                        acc + &e[i]
                    }
                });
                total <= bound
            }),
    )
}

/// Tier from the oracles. `known_classical` marks models built as mixtures
/// of deterministic models, which need no probabilistic oracle.
pub fn oracle_tier(m: &EmpiricalModel, known_classical: bool) -> Tier {
    if strongly_contextual(m) {
        Tier::Strong
    } else if logically_contextual(m) {
        Tier::Logical
    } else if known_classical {
        Tier::Noncontextual
    } else {
        match cycle_noncontextual(m) {
            Some(true) => Tier::Noncontextual,
            Some(false) => Tier::Probabilistic,
            None => panic!("no probabilistic oracle for this scenario"),
        }
    }
}

pub struct Labelled {
    pub name: String,
    pub model: EmpiricalModel,
    pub expected: Tier,
}

pub fn catalog_models() -> Vec<Labelled> {
    catalog::catalog()
        .into_iter()
        .map(|e| Labelled {
            name: e.name.to_string(),
            expected: e.expected_tier,
            model: e.model,
        })
        .collect()
}

/// 30 perturbations of cycle-scenario catalog models and 20 deterministic
/// mixtures over the catalog scenarios, with oracle tiers.
pub fn random_models(seed: u64) -> Vec<Labelled> {
    let mut r = rng(seed);
    let bases = vec![
        catalog::bell().unwrap(),
        catalog::hardy().unwrap(),
        catalog::pr_box().unwrap(),
        catalog::specker().unwrap(),
    ];
    let scenarios = [
        catalog::bell_scenario(),
        catalog::specker().unwrap().scenario().clone(),
        catalog::ghz_scenario(),
    ];
    let mut out = Vec::new();
    for k in 0..30 {
        let m = random::perturbed_model(&mut r, &bases).unwrap();
        out.push(Labelled {
            name: format!("perturbed-{k}"),
            expected: oracle_tier(&m, false),
            model: m,
        });
    }
    for k in 0..20 {
        let sc = &scenarios[k % scenarios.len()];
        let m = random::deterministic_mixture(&mut r, sc, 1 + k % 4).unwrap();
        out.push(Labelled {
            name: format!("mixture-{k}"),
            expected: oracle_tier(&m, true),
            model: m,
        });
    }
    out
}
