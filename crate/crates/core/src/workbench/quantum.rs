//! Empirical models from quantum states and projective measurements.
//!
//! Each labelled projector `P` is a two-outcome measurement with outcome `1`
//! for `P` and `0` for `I − P`. Maximal sets of pairwise commuting projectors
//! are the maximal contexts, and table entries are Born-rule probabilities
//! snapped to exact rationals.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Context, Distribution, EmpiricalModel, Scenario, Section};
use crate::rational::{self, Rational};
use crate::wps::WpsRepresentation;

pub const DEFAULT_SNAP_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_DENOMINATOR_BOUND: u64 = 4096;

/// Tolerance for the algebraic checks on states and projectors.
const MATRIX_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct LabelledProjector {
    pub label: String,
    pub matrix: DMatrix<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumExperiment {
    pub dimension: usize,
    pub state: Vec<Complex64>,
    pub projectors: Vec<LabelledProjector>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapSettings {
    pub tolerance: f64,
    pub denominator_bound: u64,
}

impl Default for SnapSettings {
    fn default() -> Self {
        SnapSettings {
            tolerance: DEFAULT_SNAP_TOLERANCE,
            denominator_bound: DEFAULT_DENOMINATOR_BOUND,
        }
    }
}

/// The closest rational with denominator at most `bound` among the
/// continued-fraction convergents and semiconvergents of `value`, provided
/// it lies within `tolerance`.
pub fn snap(value: f64, settings: SnapSettings) -> Result<Rational> {
    let fail = || Error::Snap {
        value,
        bound: settings.denominator_bound,
        tolerance: settings.tolerance,
    };
    if !value.is_finite() || settings.denominator_bound == 0 {
        return Err(fail());
    }
    let bound = settings.denominator_bound as i128;
    // Convergents h/k of the continued fraction of value.
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut x = value;
    let mut best: Option<(i128, i128)> = None;
    let consider = |h: i128, k: i128, best: &mut Option<(i128, i128)>| {
        let err = (value - h as f64 / k as f64).abs();
        let better = match best {
            None => true,
            Some((bh, bk)) => err < (value - *bh as f64 / *bk as f64).abs(),
        };
        if better {
            *best = Some((h, k));
        }
    };
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > bound {
            // Largest semiconvergent within the bound.
            if k1 > 0 {
                let t = (bound - k0) / k1;
                if t > 0 {
                    consider(t * h1 + h0, t * k1 + k0, &mut best);
                }
            }
            break;
        }
        consider(h2, k2, &mut best);
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    let (h, k) = best.ok_or_else(fail)?;
    if (value - h as f64 / k as f64).abs() > settings.tolerance {
        return Err(fail());
    }
    Ok(Rational::new(BigInt::from(h), BigInt::from(k)))
}

fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> bool {
    (a - b).iter().all(|z| z.norm() <= MATRIX_TOLERANCE)
}

impl QuantumExperiment {
    pub fn validate(&self) -> Result<()> {
        let d = self.dimension;
        if d == 0 {
            return Err(Error::Quantum("dimension must be positive".into()));
        }
        if self.state.len() != d {
            return Err(Error::Quantum(format!(
                "state has {} components, expected {d}",
                self.state.len()
            )));
        }
        let norm: f64 = self.state.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > MATRIX_TOLERANCE {
            return Err(Error::Quantum(format!("state has squared norm {norm}")));
        }
        if self.projectors.is_empty() {
            return Err(Error::Quantum("no projectors".into()));
        }
        for p in &self.projectors {
            let m = &p.matrix;
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Quantum(format!(
                    "projector `{}` is not {d}x{d}",
                    p.label
                )));
            }
            if !close(m, &m.adjoint()) {
                return Err(Error::Quantum(format!(
                    "projector `{}` is not Hermitian",
                    p.label
                )));
            }
            if !close(&(m * m), m) {
                return Err(Error::Quantum(format!(
                    "projector `{}` is not idempotent",
                    p.label
                )));
            }
        }
        Ok(())
    }

    fn commute(&self, i: usize, j: usize) -> bool {
        let (a, b) = (&self.projectors[i].matrix, &self.projectors[j].matrix);
        close(&(a * b), &(b * a))
    }

    /// Maximal sets of pairwise commuting projectors, as sorted index lists
    /// in lexicographic order.
    pub fn maximal_commuting_sets(&self) -> Vec<Vec<usize>> {
        let n = self.projectors.len();
        let adj: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| i != j && self.commute(i, j)).collect())
            .collect();
        let mut out = Vec::new();
        bron_kerbosch(&adj, Vec::new(), (0..n).collect(), Vec::new(), &mut out);
        for c in out.iter_mut() {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    /// `Π_x P_x^{s(x)}` with `P^1 = P` and `P^0 = I − P`.
    pub fn section_projector(&self, s: &Section) -> DMatrix<Complex64> {
        let d = self.dimension;
        let id = DMatrix::<Complex64>::identity(d, d);
        s.pairs().fold(id.clone(), |acc, (x, o)| {
            let p = &self.projectors[x].matrix;
            let factor = if o == 1 { p.clone() } else { &id - p };
            acc * factor
        })
    }

    /// `⟨ψ, P ψ⟩`.
    pub fn expectation(&self, p: &DMatrix<Complex64>) -> f64 {
        let psi = nalgebra::DVector::from_vec(self.state.clone());
        (psi.adjoint() * p * &psi)[(0, 0)].re
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let labels: Vec<String> = self.projectors.iter().map(|p| p.label.clone()).collect();
        let contexts: Vec<Vec<String>> = self
            .maximal_commuting_sets()
            .into_iter()
            .map(|c| c.into_iter().map(|i| labels[i].clone()).collect())
            .collect();
        Scenario::new(labels, ["0", "1"], contexts)
    }
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r);
        return;
    }
    while let Some(&v) = p.first() {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.remove(0);
        x.push(v);
    }
}

/// Born-rule tables, snapped and checked for exact compatibility.
pub fn quantum_to_empirical(
    q: &QuantumExperiment,
    settings: SnapSettings,
) -> Result<EmpiricalModel> {
    q.validate()?;
    let sc = q.scenario()?;
    let mut tables = Vec::new();
    for c in sc.maximal_contexts() {
        let weights = sc
            .sections_over(c)?
            .iter()
            .map(|s| snap(q.expectation(&q.section_projector(s)), settings))
            .collect::<Result<Vec<_>>>()?;
        tables.push(Distribution::new(&sc, c.clone(), weights)?);
    }
    EmpiricalModel::new(sc, tables)
}

/// Outcome of [`is_weak_hv_representation`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeakHvReport {
    pub failures: Vec<String>,
}

impl WeakHvReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that `r` reproduces the Born rule on every context projector,
/// gives null intersections to orthogonal co-measurable projectors, and is
/// normalized on each maximal context.
pub fn is_weak_hv_representation(
    r: &WpsRepresentation,
    q: &QuantumExperiment,
    tolerance: f64,
) -> Result<WeakHvReport> {
    q.validate()?;
    let mut report = WeakHvReport::default();
    let sc = r.model().scenario();
    let labels: Vec<&str> = q.projectors.iter().map(|p| p.label.as_str()).collect();
    if sc
        .measurements()
        .iter()
        .map(String::as_str)
        .ne(labels.iter().copied())
        || sc.outcomes() != ["0", "1"]
    {
        report
            .failures
            .push("representation and experiment have different measurements".into());
        return Ok(report);
    }
    let qsc = q.scenario()?;
    let mut theirs: Vec<&Context> = qsc.maximal_contexts().iter().collect();
    let mut ours: Vec<&Context> = sc.maximal_contexts().iter().collect();
    theirs.sort();
    ours.sort();
    if theirs != ours {
        report
            .failures
            .push("commuting sets of the experiment differ from the maximal contexts".into());
        return Ok(report);
    }

    for u in sc.contexts() {
        let secs = sc.sections_over(&u)?;
        for s in &secs {
            let born = q.expectation(&q.section_projector(s));
            match r.sigma().get(&r.image(s)) {
                Some(v) if (rational::to_f64(v) - born).abs() <= tolerance => {}
                Some(v) => report.failures.push(format!(
                    "μ of the image of {} is {v}, Born rule gives {born}",
                    sc.format_section(s)
                )),
                None => report
                    .failures
                    .push(format!("image of {} is not an event", sc.format_section(s))),
            }
        }
    }

    // Orthogonal projectors whose sections live in one maximal context.
    for c in sc.maximal_contexts() {
        let subs: Vec<Section> = c
            .subsets()
            .iter()
            .filter(|u| !u.is_empty())
            .flat_map(|u| sc.sections_over(u).expect("context sections"))
            .collect();
        for (i, s) in subs.iter().enumerate() {
            let ps = q.section_projector(s);
            for t in &subs[i + 1..] {
                let pt = q.section_projector(t);
                if (&ps * &pt).iter().any(|z| z.norm() > MATRIX_TOLERANCE) {
                    continue;
                }
                let meet = r.image(s).intersection(&r.image(t));
                let null = meet.is_empty() || r.sigma().get(&meet).is_some_and(|v| v.is_zero());
                if !null {
                    report.failures.push(format!(
                        "orthogonal {} and {} have a non-null intersection",
                        sc.format_section(s),
                        sc.format_section(t)
                    ));
                }
            }
        }
        let total: Rational = sc
            .sections_over(c)?
            .iter()
            .map(|s| {
                r.sigma()
                    .get(&r.image(s))
                    .cloned()
                    .unwrap_or_else(Rational::zero)
            })
            .sum();
        if total != rational::one() {
            report.failures.push(format!(
                "images over {} carry total μ {total}",
                sc.format_context(c)
            ));
        }
    }
    Ok(report)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(I + cos θ Z + sin θ X)/2`.
pub fn qubit_projector(theta: f64) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            c((1.0 + theta.cos()) / 2.0),
            c(theta.sin() / 2.0),
            c(theta.sin() / 2.0),
            c((1.0 - theta.cos()) / 2.0),
        ],
    )
}

fn embed(single: &DMatrix<Complex64>, position: usize, qubits: usize) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(2, 2);
    (0..qubits).fold(DMatrix::<Complex64>::identity(1, 1), |acc, k| {
        acc.kronecker(if k == position { single } else { &id })
    })
}

/// The singlet `(|01⟩ − |10⟩)/√2` with `a, a'` on the first qubit at angles
/// `0, π/3` and `b, b'` on the second at `π, 2π/3`.
pub fn singlet_experiment() -> QuantumExperiment {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let settings = [
        ("a", 0, 0.0),
        ("b", 1, PI),
        ("a'", 0, PI / 3.0),
        ("b'", 1, 2.0 * PI / 3.0),
    ];
    QuantumExperiment {
        dimension: 4,
        state: vec![c(0.0), c(h), c(-h), c(0.0)],
        projectors: settings
            .iter()
            .map(|(label, qubit, theta)| LabelledProjector {
                label: label.to_string(),
                matrix: embed(&qubit_projector(*theta), *qubit, 2),
            })
            .collect(),
    }
}

/// `(|000⟩ + |111⟩)/√2` with Pauli X (unprimed) and Y (primed) on each
/// qubit; outcome 1 is the `+1` eigenspace.
pub fn ghz_experiment() -> QuantumExperiment {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let half = 0.5;
    let x = DMatrix::from_row_slice(2, 2, &[c(half), c(half), c(half), c(half)]);
    let y = DMatrix::from_row_slice(
        2,
        2,
        &[
            c(half),
            Complex64::new(0.0, -half),
            Complex64::new(0.0, half),
            c(half),
        ],
    );
    let mut state = vec![c(0.0); 8];
    state[0] = c(h);
    state[7] = c(h);
    let mut projectors = Vec::new();
    for (qubit, name) in ["a", "b", "c"].iter().enumerate() {
        projectors.push(LabelledProjector {
            label: name.to_string(),
            matrix: embed(&x, qubit, 3),
        });
        projectors.push(LabelledProjector {
            label: format!("{name}'"),
            matrix: embed(&y, qubit, 3),
        });
    }
    QuantumExperiment {
        dimension: 8,
        state,
        projectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn snapping() {
        let s = SnapSettings::default();
        assert_eq!(snap(0.375, s).unwrap(), ratio(3, 8));
        assert_eq!(snap(0.125 + 1e-12, s).unwrap(), ratio(1, 8));
        assert_eq!(snap(1.0 / 3.0, s).unwrap(), ratio(1, 3));
        assert_eq!(snap(0.0, s).unwrap(), ratio(0, 1));
        assert_eq!(snap(1.0, s).unwrap(), ratio(1, 1));
        assert!(snap(std::f64::consts::PI / 10.0, s).is_err());
        assert!(snap(f64::NAN, s).is_err());
    }

    #[test]
    fn eigenstate_gives_deterministic_model() {
        // |0⟩ is an eigenvector of Z-type projectors at angles 0 and π.
        let q = QuantumExperiment {
            dimension: 2,
            state: vec![c(1.0), c(0.0)],
            projectors: vec![
                LabelledProjector {
                    label: "z".into(),
                    matrix: qubit_projector(0.0),
                },
                LabelledProjector {
                    label: "z-".into(),
                    matrix: qubit_projector(PI),
                },
            ],
        };
        let m = quantum_to_empirical(&q, SnapSettings::default()).unwrap();
        assert_eq!(m.scenario().maximal_contexts().len(), 1);
        let w = m.table(0).weights();
        assert_eq!(w.iter().filter(|v| !v.is_zero()).count(), 1);
    }

    #[test]
    fn rejects_non_projector() {
        let mut q = singlet_experiment();
        q.projectors[0].matrix *= c(2.0);
        assert!(matches!(
            quantum_to_empirical(&q, SnapSettings::default()),
            Err(Error::Quantum(_))
        ));
    }

    #[test]
    fn singlet_matches_catalog_bell() {
        use crate::classifier::{classify, Tier};
        use crate::workbench::catalog;
        let m = quantum_to_empirical(&singlet_experiment(), SnapSettings::default()).unwrap();
        assert!(m.same_model(&catalog::bell().unwrap()));
        assert_eq!(classify(&m).unwrap().tier, Tier::Probabilistic);
    }

    #[test]
    fn ghz_matches_catalog() {
        use crate::classifier::{classify, Tier};
        use crate::workbench::catalog;
        let m = quantum_to_empirical(&ghz_experiment(), SnapSettings::default()).unwrap();
        assert!(m.same_model(&catalog::ghz().unwrap()));
        assert_eq!(classify(&m).unwrap().tier, Tier::Strong);
    }

    #[test]
    fn combinatorial_rep_is_weak_hv_for_singlet() {
        let q = singlet_experiment();
        let m = quantum_to_empirical(&q, SnapSettings::default()).unwrap();
        let r = crate::wps::build_combinatorial_rep(&m).unwrap();
        let report = is_weak_hv_representation(&r, &q, 1e-9).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
    }
}
