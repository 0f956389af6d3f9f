//! Placement of an empirical model in the strong ⇒ logical ⇒ probabilistic
//! hierarchy, with a re-checkable witness for each verdict.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lp::{FarkasCertificate, Feasibility, LinearSystem};
use crate::model::{marginalize, restrict, Distribution, EmpiricalModel, Section};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tier {
    Strong,
    Logical,
    Probabilistic,
    Noncontextual,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::Strong => "strong",
            Tier::Logical => "logical",
            Tier::Probabilistic => "probabilistic",
            Tier::Noncontextual => "noncontextual",
        }
    }

    pub fn parse(text: &str) -> Option<Tier> {
        match text.to_ascii_lowercase().as_str() {
            "strong" => Some(Tier::Strong),
            "logical" => Some(Tier::Logical),
            "probabilistic" => Some(Tier::Probabilistic),
            "noncontextual" => Some(Tier::Noncontextual),
            _ => None,
        }
    }

    /// Whether a model at this tier is contextual at tier `other` or
    /// stronger; e.g. a strong model is also logically contextual.
    pub fn implies(self, other: Tier) -> bool {
        other != Tier::Noncontextual && self <= other
    }

    pub fn is_contextual(self) -> bool {
        self != Tier::Noncontextual
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One equality of the global-distribution system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// Σ_g x_g = 1.
    Total,
    /// Σ_{g|C = s} x_g = e_C(s), for maximal context index `context`.
    Marginal { context: usize, section: Section },
}

/// Dual certificate that no global distribution reproduces the tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalCertificate {
    pub constraints: Vec<Constraint>,
    pub multipliers: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlobalDistribution {
    Found(Distribution),
    Infeasible(GlobalCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TierWitness {
    /// The consistent global sections are exactly the empty set.
    Strong,
    /// A support section over maximal context `context` with no consistent
    /// global extension.
    Logical {
        context: usize,
        section: Section,
    },
    Probabilistic(GlobalCertificate),
    Noncontextual(Distribution),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TierVerdict {
    pub tier: Tier,
    pub witness: TierWitness,
}

/// For every global section, the index of its restriction to each maximal
/// context.
fn global_projections(m: &EmpiricalModel) -> Result<Vec<Vec<usize>>> {
    let sc = m.scenario();
    let global = sc.global_context();
    sc.maximal_contexts()
        .iter()
        .map(|c| sc.projection_map(&global, c))
        .collect()
}

/// Indices (in canonical order of ε(X)) of global sections whose every
/// maximal-context restriction lies in the support.
fn consistent_indices(m: &EmpiricalModel) -> Result<Vec<usize>> {
    let proj = global_projections(m)?;
    let n = proj.first().map_or(0, |p| p.len());
    Ok((0..n)
        .filter(|&g| {
            proj.iter()
                .zip(m.tables())
                .all(|(p, t)| !t.weights()[p[g]].is_zero())
        })
        .collect())
}

pub fn consistent_global_sections(m: &EmpiricalModel) -> Result<Vec<Section>> {
    let sc = m.scenario();
    let global = sc.global_context();
    Ok(consistent_indices(m)?
        .into_iter()
        .map(|g| sc.section_at(&global, g))
        .collect())
}

pub fn is_strongly_contextual(m: &EmpiricalModel) -> Result<bool> {
    Ok(consistent_indices(m)?.is_empty())
}

/// The canonically least support section (by context, then section order)
/// that no consistent global section extends.
pub fn is_logically_contextual(m: &EmpiricalModel) -> Result<Option<(usize, Section)>> {
    let sc = m.scenario();
    let proj = global_projections(m)?;
    let consistent = consistent_indices(m)?;
    for (i, c) in sc.maximal_contexts().iter().enumerate() {
        let mut covered = vec![false; m.table(i).weights().len()];
        for &g in &consistent {
            covered[proj[i][g]] = true;
        }
        for (k, w) in m.table(i).weights().iter().enumerate() {
            if !w.is_zero() && !covered[k] {
                return Ok(Some((i, sc.section_at(c, k))));
            }
        }
    }
    Ok(None)
}

fn global_system(m: &EmpiricalModel) -> Result<(LinearSystem, Vec<Constraint>)> {
    let sc = m.scenario();
    let proj = global_projections(m)?;
    let n = sc.num_sections(&sc.global_context())?;
    let mut sys = LinearSystem::new(n);
    let mut labels = vec![Constraint::Total];
    sys.add_indicator_row(0..n, rational::one());
    for (i, c) in sc.maximal_contexts().iter().enumerate() {
        let table = m.table(i).weights();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); table.len()];
        for g in 0..n {
            members[proj[i][g]].push(g);
        }
        for (k, vars) in members.into_iter().enumerate() {
            sys.add_indicator_row(vars, table[k].clone());
            labels.push(Constraint::Marginal {
                context: i,
                section: sc.section_at(c, k),
            });
        }
    }
    Ok((sys, labels))
}

/// Solves for a distribution on ε(X) marginalizing to every table.
pub fn global_distribution(m: &EmpiricalModel) -> Result<GlobalDistribution> {
    let (sys, labels) = global_system(m)?;
    match sys.solve()? {
        Feasibility::Feasible(x) => {
            let sc = m.scenario();
            Ok(GlobalDistribution::Found(Distribution::new(
                sc,
                sc.global_context(),
                x,
            )?))
        }
        Feasibility::Infeasible(FarkasCertificate { multipliers }) => {
            Ok(GlobalDistribution::Infeasible(GlobalCertificate {
                constraints: labels,
                multipliers,
            }))
        }
    }
}

/// Checks a certificate against the model's own global-distribution system:
/// the combined coefficient of every global section is non-negative and the
/// combined right-hand side is negative.
pub fn verify_global_certificate(m: &EmpiricalModel, cert: &GlobalCertificate) -> Result<bool> {
    let (sys, labels) = global_system(m)?;
    if labels != cert.constraints {
        return Ok(false);
    }
    Ok(sys.is_certificate(&FarkasCertificate {
        multipliers: cert.multipliers.clone(),
    }))
}

/// True when `e_X` marginalizes to every table.
pub fn verify_global_distribution(m: &EmpiricalModel, d: &Distribution) -> Result<bool> {
    let sc = m.scenario();
    if d.domain() != &sc.global_context() || !d.is_valid() {
        return Ok(false);
    }
    for (c, t) in sc.maximal_contexts().iter().zip(m.tables()) {
        if &marginalize(sc, d, c)? != t {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn classify(m: &EmpiricalModel) -> Result<TierVerdict> {
    if is_strongly_contextual(m)? {
        return Ok(TierVerdict {
            tier: Tier::Strong,
            witness: TierWitness::Strong,
        });
    }
    if let Some((context, section)) = is_logically_contextual(m)? {
        return Ok(TierVerdict {
            tier: Tier::Logical,
            witness: TierWitness::Logical { context, section },
        });
    }
    Ok(match global_distribution(m)? {
        GlobalDistribution::Infeasible(cert) => TierVerdict {
            tier: Tier::Probabilistic,
            witness: TierWitness::Probabilistic(cert),
        },
        GlobalDistribution::Found(d) => TierVerdict {
            tier: Tier::Noncontextual,
            witness: TierWitness::Noncontextual(d),
        },
    })
}

/// Re-checks a verdict's witness from scratch by brute force.
pub fn verify_verdict(m: &EmpiricalModel, v: &TierVerdict) -> Result<bool> {
    let sc = m.scenario();
    let ok = match (&v.tier, &v.witness) {
        (Tier::Strong, TierWitness::Strong) => {
            let global = sc.global_context();
            sc.sections_over(&global)?.iter().all(|g| {
                sc.maximal_contexts()
                    .iter()
                    .enumerate()
                    .any(|(i, c)| !m.in_support(i, &restrict(g, c).expect("subset")))
            })
        }
        (Tier::Logical, TierWitness::Logical { context, section }) => {
            let Some(c) = sc.maximal_contexts().get(*context) else {
                return Ok(false);
            };
            if section.domain() != c || !m.in_support(*context, section) {
                return Ok(false);
            }
            let global = sc.global_context();
            !sc.sections_over(&global)?.iter().any(|g| {
                restrict(g, c).expect("subset") == *section
                    && sc
                        .maximal_contexts()
                        .iter()
                        .enumerate()
                        .all(|(i, c2)| m.in_support(i, &restrict(g, c2).expect("subset")))
            })
        }
        (Tier::Probabilistic, TierWitness::Probabilistic(cert)) => {
            verify_global_certificate(m, cert)?
        }
        (Tier::Noncontextual, TierWitness::Noncontextual(d)) => verify_global_distribution(m, d)?,
        _ => false,
    };
    Ok(ok)
}

/// The tier a verdict's witness supports, failing loudly on mismatch.
pub fn require_tier(m: &EmpiricalModel, requested: Tier) -> Result<TierVerdict> {
    let v = classify(m)?;
    if !v.tier.implies(requested) {
        return Err(Error::TierMismatch {
            requested: requested.name().into(),
            actual: v.tier.name().into(),
        });
    }
    Ok(v)
}
