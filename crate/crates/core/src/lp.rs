//! Exact feasibility of `A x = b, x >= 0` over the rationals.
//!
//! Rows are first reduced to an independent subset by exact Gaussian
//! elimination. A dependent row with an inconsistent right-hand side gives an
//! infeasibility certificate directly; otherwise a phase-one simplex with
//! Bland's rule runs on the independent rows. Every answer is checked against
//! the original system before it is returned.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A linear system `A x = b` over non-negative variables, stored by sparse rows.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    num_vars: usize,
    rows: Vec<Vec<(usize, Rational)>>,
    rhs: Vec<Rational>,
}

/// A vector `y` with `yᵀA >= 0` and `yᵀb = -1`. Its existence proves that no
/// non-negative `x` satisfies `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible(FarkasCertificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            num_vars,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds `Σ coeff·x_j = rhs`. Repeated variable indices are summed.
    pub fn add_row(&mut self, coeffs: impl IntoIterator<Item = (usize, Rational)>, rhs: Rational) {
        let mut row: Vec<(usize, Rational)> = Vec::new();
        let mut entries: Vec<(usize, Rational)> = coeffs.into_iter().collect();
        entries.sort_by_key(|e| e.0);
        for (j, c) in entries {
            assert!(j < self.num_vars, "variable {j} out of range");
            match row.last_mut() {
                Some((k, acc)) if *k == j => *acc += c,
                _ => row.push((j, c)),
            }
        }
        row.retain(|(_, c)| !c.is_zero());
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    /// Adds `Σ_{j ∈ vars} x_j = rhs`.
    pub fn add_indicator_row(&mut self, vars: impl IntoIterator<Item = usize>, rhs: Rational) {
        self.add_row(vars.into_iter().map(|j| (j, Rational::one())), rhs);
    }

    pub fn row(&self, i: usize) -> &[(usize, Rational)] {
        &self.rows[i]
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    /// Residual check for a candidate solution.
    pub fn is_solution(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().zip(&self.rhs).all(|(row, b)| {
                let lhs: Rational = row.iter().map(|(j, c)| c * &x[*j]).sum();
                &lhs == b
            })
    }

    /// `yᵀA` as a dense vector.
    pub fn combine(&self, y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.num_vars];
        for (row, yi) in self.rows.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (j, c) in row {
                out[*j] += c * yi;
            }
        }
        out
    }

    /// Checks `yᵀA >= 0` and `yᵀb < 0`.
    pub fn is_certificate(&self, cert: &FarkasCertificate) -> bool {
        let y = &cert.multipliers;
        if y.len() != self.rows.len() {
            return false;
        }
        let yb: Rational = y.iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
        yb.is_negative() && self.combine(y).iter().all(|v| !v.is_negative())
    }

    pub fn solve(&self) -> Result<Feasibility> {
        let result = match reduce_rows(self) {
            Reduction::Inconsistent(y) => Feasibility::Infeasible(normalize(self, y)),
            Reduction::Independent(keep) => simplex(self, &keep)?,
        };
        match &result {
            Feasibility::Feasible(x) if !self.is_solution(x) => {
                Err(Error::Internal("simplex returned a non-solution".into()))
            }
            Feasibility::Infeasible(c) if !self.is_certificate(c) => Err(Error::Internal(
                "simplex returned an invalid certificate".into(),
            )),
            _ => Ok(result),
        }
    }
}

fn normalize(sys: &LinearSystem, y: Vec<Rational>) -> FarkasCertificate {
    let yb: Rational = y.iter().zip(&sys.rhs).map(|(a, b)| a * b).sum();
    let scale = -yb.recip();
    FarkasCertificate {
        multipliers: y.into_iter().map(|v| v * &scale).collect(),
    }
}

enum Reduction {
    Independent(Vec<usize>),
    Inconsistent(Vec<Rational>),
}

struct BasisRow {
    pivot: usize,
    coeffs: Vec<Rational>,
    rhs: Rational,
    // Expression of this row as a combination of original rows.
    combo: Vec<(usize, Rational)>,
}

fn reduce_rows(sys: &LinearSystem) -> Reduction {
    let n = sys.num_vars;
    let mut basis: Vec<BasisRow> = Vec::new();
    let mut keep = Vec::new();
    let mut seen = std::collections::HashMap::new();
    for (i, row) in sys.rows.iter().enumerate() {
        // Identical rows are common; settle them without elimination.
        if let Some(&k) = seen.get(row) {
            if sys.rhs[k] == sys.rhs[i] {
                continue;
            }
            let mut y = vec![Rational::zero(); sys.rows.len()];
            y[i] = Rational::one();
            y[k] = -Rational::one();
            return Reduction::Inconsistent(orient(sys, y));
        }
        seen.insert(row.clone(), i);

        let mut coeffs = vec![Rational::zero(); n];
        for (j, c) in row {
            coeffs[*j] = c.clone();
        }
        let mut rhs = sys.rhs[i].clone();
        let mut combo: Vec<(usize, Rational)> = vec![(i, Rational::one())];
        for b in &basis {
            if coeffs[b.pivot].is_zero() {
                continue;
            }
            let f = coeffs[b.pivot].clone();
            for (j, c) in b.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    coeffs[j] -= &f * c;
                }
            }
            rhs -= &f * &b.rhs;
            for (k, c) in &b.combo {
                combo.push((*k, -(&f * c)));
            }
        }
        match coeffs.iter().position(|c| !c.is_zero()) {
            Some(p) => {
                let inv = coeffs[p].recip();
                for c in coeffs.iter_mut() {
                    if !c.is_zero() {
                        *c *= &inv;
                    }
                }
                rhs *= &inv;
                let combo = compact(combo.into_iter().map(|(k, c)| (k, c * &inv)).collect());
                basis.push(BasisRow {
                    pivot: p,
                    coeffs,
                    rhs,
                    combo,
                });
                keep.push(i);
            }
            None if rhs.is_zero() => {}
            None => {
                let mut y = vec![Rational::zero(); sys.rows.len()];
                for (k, c) in compact(combo) {
                    y[k] = c;
                }
                return Reduction::Inconsistent(orient(sys, y));
            }
        }
    }
    Reduction::Independent(keep)
}

fn compact(mut combo: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    combo.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, Rational)> = Vec::new();
    for (k, c) in combo {
        match out.last_mut() {
            Some((j, acc)) if *j == k => *acc += c,
            _ => out.push((k, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

// A combination with yᵀA = 0 and yᵀb != 0; flip it so that yᵀb < 0.
fn orient(sys: &LinearSystem, y: Vec<Rational>) -> Vec<Rational> {
    let yb: Rational = y.iter().zip(&sys.rhs).map(|(a, b)| a * b).sum();
    if yb.is_positive() {
        y.into_iter().map(|v| -v).collect()
    } else {
        y
    }
}

/// Phase-one simplex on the rows `keep`, which must be linearly independent.
fn simplex(sys: &LinearSystem, keep: &[usize]) -> Result<Feasibility> {
    let n = sys.num_vars;
    let m = keep.len();
    let width = n + m + 1;
    let rhs_col = n + m;

    // Tableau rows are B⁻¹[A | I | b] after sign normalization; the identity
    // block stays in place so the duals can be read off at the end.
    let mut sign = Vec::with_capacity(m);
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (r, &i) in keep.iter().enumerate() {
        let flip = sys.rhs[i].is_negative();
        sign.push(flip);
        let mut row = vec![Rational::zero(); width];
        for (j, c) in &sys.rows[i] {
            row[*j] = if flip { -c.clone() } else { c.clone() };
        }
        row[n + r] = Rational::one();
        row[rhs_col] = if flip {
            -sys.rhs[i].clone()
        } else {
            sys.rhs[i].clone()
        };
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![Rational::zero(); width];
    for row in &tab {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[rhs_col] -= &row[rhs_col];
    }

    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (r, row) in tab.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[rhs_col] / &row[enter];
            let better = match &leave {
                None => true,
                Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let Some((pr, _)) = leave else {
            return Err(Error::Internal("phase-one objective is unbounded".into()));
        };
        pivot(&mut tab, &mut cost, pr, enter);
        basis[pr] = enter;
    }

    // cost[rhs_col] holds minus the optimal sum of artificials.
    if cost[rhs_col].is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (r, &b) in basis.iter().enumerate() {
            if b < n {
                x[b] = tab[r][rhs_col].clone();
            }
        }
        return Ok(Feasibility::Feasible(x));
    }

    // Phase-one duals: π_r = 1 − (reduced cost of artificial r).
    let mut y = vec![Rational::zero(); sys.rows.len()];
    for (r, &i) in keep.iter().enumerate() {
        let pi = Rational::one() - &cost[n + r];
        let v = -pi;
        y[i] = if sign[r] { -v } else { v };
    }
    Ok(Feasibility::Infeasible(normalize(sys, y)))
}

fn pivot(tab: &mut [Vec<Rational>], cost: &mut [Rational], pr: usize, pc: usize) {
    let inv = tab[pr][pc].recip();
    for c in tab[pr].iter_mut() {
        if !c.is_zero() {
            *c *= &inv;
        }
    }
    let prow = tab[pr].clone();
    let nz: Vec<usize> = (0..prow.len()).filter(|j| !prow[*j].is_zero()).collect();
    for (r, row) in tab.iter_mut().enumerate() {
        if r == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for &j in &nz {
            row[j] -= &f * &prow[j];
        }
    }
    if !cost[pc].is_zero() {
        let f = cost[pc].clone();
        for &j in &nz {
            cost[j] -= &f * &prow[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn feasible_simplex_point() {
        let mut s = LinearSystem::new(3);
        s.add_indicator_row([0, 1, 2], int(1));
        s.add_indicator_row([0], ratio(1, 4));
        let Feasibility::Feasible(x) = s.solve().unwrap() else {
            panic!("expected feasible");
        };
        assert!(s.is_solution(&x));
        assert_eq!(x[0], ratio(1, 4));
    }

    #[test]
    fn negativity_forces_infeasible() {
        let mut s = LinearSystem::new(2);
        s.add_row([(0, int(1)), (1, int(1))], int(-1));
        let Feasibility::Infeasible(c) = s.solve().unwrap() else {
            panic!("expected infeasible");
        };
        assert!(s.is_certificate(&c));
    }

    #[test]
    fn contradictory_duplicate_rows() {
        let mut s = LinearSystem::new(2);
        s.add_indicator_row([0, 1], int(1));
        s.add_indicator_row([0, 1], ratio(1, 2));
        let Feasibility::Infeasible(c) = s.solve().unwrap() else {
            panic!("expected infeasible");
        };
        assert!(s.is_certificate(&c));
    }

    #[test]
    fn dependent_inconsistency() {
        // x0 + x1 = 1, x1 + x2 = 1, x0 + 2 x1 + x2 = 3.
        let mut s = LinearSystem::new(3);
        s.add_indicator_row([0, 1], int(1));
        s.add_indicator_row([1, 2], int(1));
        s.add_row([(0, int(1)), (1, int(2)), (2, int(1))], int(3));
        let Feasibility::Infeasible(c) = s.solve().unwrap() else {
            panic!("expected infeasible");
        };
        assert!(s.is_certificate(&c));
    }

    #[test]
    fn needs_nonnegativity() {
        // x0 - x1 = 1 and x1 + x2 = -1 ... the second alone is infeasible
        // only because of sign constraints.
        let mut s = LinearSystem::new(3);
        s.add_row([(0, int(1)), (1, int(-1))], int(1));
        s.add_row([(0, int(1)), (2, int(1))], ratio(1, 2));
        let Feasibility::Infeasible(c) = s.solve().unwrap() else {
            panic!("expected infeasible");
        };
        assert!(s.is_certificate(&c));
    }

    #[test]
    fn empty_system_is_feasible() {
        let s = LinearSystem::new(2);
        assert_eq!(
            s.solve().unwrap(),
            Feasibility::Feasible(vec![Rational::zero(), Rational::zero()])
        );
    }
}
