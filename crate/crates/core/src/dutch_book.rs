//! Betting coherence of `μ`: convex combinations of atomic functionals,
//! stake certificates with a guaranteed loss, and the convexity hierarchy on
//! the maximal-context events.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{Feasibility, LinearSystem};
use crate::model::{restrict, Distribution, Section};
use crate::rational::{self, Rational};
use crate::wps::{EventSet, WpsRepresentation};

/// The membership functional of one point on a list of events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicFunctional {
    pub point: usize,
    pub values: Vec<bool>,
}

impl AtomicFunctional {
    pub fn at(point: usize, events: &[EventSet]) -> Self {
        AtomicFunctional {
            point,
            values: events.iter().map(|e| e.contains(point)).collect(),
        }
    }
}

/// Stakes `s(A)` and a loss bound `ε > 0` such that every point pays at
/// least `ε`: `Σ_A s(A)(V_y(A) − μ(A)) ≤ −ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DutchBookCertificate {
    pub stakes: Vec<(EventSet, Rational)>,
    pub loss_bound: Rational,
}

fn check_restriction(r: &WpsRepresentation, restriction: &[EventSet]) -> Result<()> {
    for e in restriction {
        r.mu(e)?;
    }
    Ok(())
}

fn membership_system(r: &WpsRepresentation, restriction: &[EventSet]) -> Result<LinearSystem> {
    check_restriction(r, restriction)?;
    let n = r.num_points();
    let mut sys = LinearSystem::new(n);
    sys.add_indicator_row(0..n, Rational::one());
    for e in restriction {
        sys.add_indicator_row(e.iter(), r.mu(e)?.clone());
    }
    Ok(sys)
}

/// Weights `w ≥ 0`, `Σ w = 1` with `μ(A) = Σ_y w_y V_y(A)` for every `A`
/// in `restriction`, if any exist.
pub fn convexity_membership(
    r: &WpsRepresentation,
    restriction: &[EventSet],
) -> Result<Option<Vec<Rational>>> {
    Ok(match membership_system(r, restriction)?.solve()? {
        Feasibility::Feasible(w) => Some(w),
        Feasibility::Infeasible(_) => None,
    })
}

/// All of `Σ`, in canonical order.
pub fn sigma_events(r: &WpsRepresentation) -> Vec<EventSet> {
    r.sigma().keys().cloned().collect()
}

/// The maximal-context events `V_M`, without repeats, in canonical order.
pub fn vm_events(r: &WpsRepresentation) -> Vec<EventSet> {
    let mut v: Vec<EventSet> = r.v_m().into_iter().map(|(_, _, e)| e).collect();
    v.sort();
    v.dedup();
    v
}

/// Payoff `Σ_A s(A)(V_y(A) − μ(A))` at every point.
pub fn payoffs(r: &WpsRepresentation, stakes: &[(EventSet, Rational)]) -> Result<Vec<Rational>> {
    let mut fixed = Rational::zero();
    for (e, s) in stakes {
        fixed += s * r.mu(e)?;
    }
    Ok((0..r.num_points())
        .map(|y| {
            let won: Rational = stakes
                .iter()
                .filter(|(e, _)| e.contains(y))
                .map(|(_, s)| s.clone())
                .sum();
            won - &fixed
        })
        .collect())
}

/// Checks every point's payoff against the loss bound.
pub fn verify_certificate(r: &WpsRepresentation, c: &DutchBookCertificate) -> Result<bool> {
    if !c.loss_bound.is_positive() {
        return Ok(false);
    }
    let bound = -c.loss_bound.clone();
    Ok(payoffs(r, &c.stakes)?.iter().all(|p| *p <= bound))
}

/// Staking `−1` on every null maximal-context event loses at least the
/// smallest number of such events containing a point, whenever they cover
/// `Y`.
fn null_cover_certificate(r: &WpsRepresentation) -> Result<Option<DutchBookCertificate>> {
    let mut null = Vec::new();
    for e in vm_events(r) {
        if r.mu(&e)?.is_zero() {
            null.push(e);
        }
    }
    let least = (0..r.num_points())
        .map(|y| null.iter().filter(|e| e.contains(y)).count())
        .min()
        .unwrap_or(0);
    if least == 0 {
        return Ok(None);
    }
    Ok(Some(DutchBookCertificate {
        stakes: null.into_iter().map(|e| (e, -Rational::one())).collect(),
        loss_bound: rational::int(least as i64),
    }))
}

/// Finds stakes with a sure loss when `μ` is not a convex combination of
/// atomic functionals on `Σ`. A null cover by maximal-context events is
/// preferred when one exists; otherwise the stakes come from the dual of
/// the membership system, scaled so that the loss bound is 1.
pub fn find_dutch_book(r: &WpsRepresentation) -> Result<Option<DutchBookCertificate>> {
    if let Some(c) = null_cover_certificate(r)? {
        return Ok(Some(c));
    }
    let events = sigma_events(r);
    let sys = membership_system(r, &events)?;
    let Feasibility::Infeasible(cert) = sys.solve()? else {
        return Ok(None);
    };
    // The certificate is scaled so that yᵀb = −1; with stakes s(A) = −y_A
    // every payoff is at most y_0 + Σ y_A μ(A) = −1.
    let stakes: Vec<(EventSet, Rational)> = events
        .into_iter()
        .zip(cert.multipliers.into_iter().skip(1))
        .filter(|(_, y)| !y.is_zero())
        .map(|(e, y)| (e, -y))
        .collect();
    let c = DutchBookCertificate {
        stakes,
        loss_bound: Rational::one(),
    };
    if !verify_certificate(r, &c)? {
        return Err(Error::Internal("dual stakes fail the payoff check".into()));
    }
    Ok(Some(c))
}

fn require_combinatorial(r: &WpsRepresentation) -> Result<()> {
    if r.is_combinatorial() {
        Ok(())
    } else {
        Err(Error::NotCombinatorial)
    }
}

/// `v(s_X)`: the atomic functional of the point of `s_X`, read on `V_M`
/// (one value per maximal-context section, in canonical order).
pub fn section_to_functional(r: &WpsRepresentation, s_x: &Section) -> Result<Vec<bool>> {
    require_combinatorial(r)?;
    let y = r
        .image(s_x)
        .iter()
        .next()
        .ok_or_else(|| Error::Internal("global section has an empty image".into()))?;
    Ok(r.v_m().iter().map(|(_, _, e)| e.contains(y)).collect())
}

/// `d(e_X)`: the convex combination `Σ e_X(s_X) v(s_X)` on `V_M`.
pub fn distribution_to_convex_point(
    r: &WpsRepresentation,
    e_x: &Distribution,
) -> Result<Vec<Rational>> {
    require_combinatorial(r)?;
    let sc = r.model().scenario();
    if e_x.domain() != &sc.global_context() {
        return Err(Error::Domain(
            "distribution is not over all measurements".into(),
        ));
    }
    let vm = r.v_m();
    let mut out = vec![Rational::zero(); vm.len()];
    for g in e_x.support(sc) {
        let w = e_x.weight(sc, &g);
        for (k, v) in section_to_functional(r, &g)?.into_iter().enumerate() {
            if v {
                out[k] += &w;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexityVerdict {
    pub probabilistic_violation: bool,
    pub logical_violation: bool,
    pub strong_violation: bool,
    /// Weights on points when `μ` restricted to `V_M` is a convex
    /// combination of atomic functionals.
    pub convex_weights: Option<Vec<Rational>>,
}

/// The three obstructions to convexity on `V_M`.
///
/// `χ_μ` marks the non-null members of `V_M`. The logical sum (Boolean OR)
/// of a set of atomic functionals can only equal `χ_μ` if each of them lies
/// below it, so the logical check compares `χ_μ` with the OR of all such
/// functionals. The strong check asks whether any functional lies below
/// `χ_μ` at all.
pub fn convexity_hierarchy(r: &WpsRepresentation) -> Result<ConvexityVerdict> {
    require_combinatorial(r)?;
    let vm: Vec<EventSet> = r.v_m().into_iter().map(|(_, _, e)| e).collect();
    let chi: Vec<bool> = vm
        .iter()
        .map(|e| r.mu(e).map(|v| !v.is_zero()))
        .collect::<Result<_>>()?;
    let mut or = vec![false; vm.len()];
    let mut any_below = false;
    for y in 0..r.num_points() {
        let f = AtomicFunctional::at(y, &vm);
        if f.values.iter().zip(&chi).all(|(v, c)| !v || *c) {
            any_below = true;
            for (o, v) in or.iter_mut().zip(&f.values) {
                *o |= *v;
            }
        }
    }
    let convex_weights = convexity_membership(r, &vm_events(r))?;
    let verdict = ConvexityVerdict {
        probabilistic_violation: convex_weights.is_none(),
        logical_violation: or != chi,
        strong_violation: !any_below,
        convex_weights,
    };
    if (verdict.strong_violation && !verdict.logical_violation)
        || (verdict.logical_violation && !verdict.probabilistic_violation)
    {
        return Err(Error::Internal(
            "convexity verdicts break the hierarchy".into(),
        ));
    }
    Ok(verdict)
}

/// The classical extension read off a convex combination: the point weights
/// reproduce `μ` on the given events.
pub fn weights_reproduce(
    r: &WpsRepresentation,
    events: &[EventSet],
    w: &[Rational],
) -> Result<bool> {
    if w.len() != r.num_points()
        || w.iter().any(|v| v.is_negative())
        || rational::sum(w) != Rational::one()
    {
        return Ok(false);
    }
    for e in events {
        let s: Rational = e.iter().map(|y| &w[y]).sum();
        if s != *r.mu(e)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `V_M` values of `v(s_X)` for the global section `s_X`, computed from the
/// sections rather than from point membership.
pub fn functional_by_restriction(r: &WpsRepresentation, s_x: &Section) -> Vec<bool> {
    let sc = r.model().scenario();
    r.v_m()
        .iter()
        .map(|(i, s, _)| restrict(s_x, &sc.maximal_contexts()[*i]).expect("global") == *s)
        .collect()
}
