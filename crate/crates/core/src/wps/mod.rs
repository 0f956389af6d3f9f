//! Weak-probability-space representations of empirical models.
//!
//! A representation has a finite sample space `Y`, a transfer map sending
//! each section over a context to a subset of `Y`, the event set `Σ` (the
//! union over maximal contexts `C` of the algebra generated by the images of
//! single-measurement sections in `C`) and a set function `μ` on `Σ`.

mod event;
mod excise;
mod verify;

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

pub use event::EventSet;
pub use excise::{excise, ExcisionReport};
pub use verify::{verify_rep, RepCondition, RepFailure, RepVerdict};

use crate::error::{Error, Result};
use crate::model::{restrict, Context, EmpiricalModel, Section};
use crate::rational::Rational;

/// A point added to a combinatorial sample space. `memberships[x]` lists the
/// outcomes `o` with the point in `Ē(x ↦ o)`; anything other than exactly
/// one outcome makes the point contradictory (two or more) or outcome-free
/// (none) at `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PadPoint {
    pub label: String,
    pub memberships: Vec<Vec<usize>>,
}

impl PadPoint {
    /// A copy of the global section `base` that also lies in `Ē(x ↦ extra)`.
    pub fn contradictory(label: &str, base: &Section, x: usize, extra: usize) -> Self {
        let mut memberships: Vec<Vec<usize>> = base.values().iter().map(|o| vec![*o]).collect();
        if !memberships[x].contains(&extra) {
            memberships[x].push(extra);
            memberships[x].sort_unstable();
        }
        PadPoint {
            label: label.into(),
            memberships,
        }
    }

    /// A copy of the global section `base` lying in no `Ē(x ↦ ·)`.
    pub fn missing(label: &str, base: &Section, x: usize) -> Self {
        let mut memberships: Vec<Vec<usize>> = base.values().iter().map(|o| vec![*o]).collect();
        memberships[x].clear();
        PadPoint {
            label: label.into(),
            memberships,
        }
    }

    fn is_regular(&self) -> bool {
        self.memberships.iter().all(|m| m.len() == 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    /// The point standing for one global section.
    Global(Section),
    Pad(PadPoint),
}

impl Point {
    /// Whether the point lies in `Ē(x ↦ o)`.
    pub fn in_singleton(&self, x: usize, o: usize) -> bool {
        match self {
            Point::Global(g) => g.get(x) == Some(o),
            Point::Pad(p) => p.memberships[x].contains(&o),
        }
    }

    pub fn label(&self, r: &WpsRepresentation) -> String {
        match self {
            Point::Global(g) => r.model.scenario().format_section(g),
            Point::Pad(p) => p.label.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WpsRepresentation {
    model: EmpiricalModel,
    points: Vec<Point>,
    transfer: BTreeMap<Section, EventSet>,
    mu: BTreeMap<EventSet, Rational>,
    combinatorial: bool,
}

/// Membership cells of the algebra generated by `Ē(x ↦ o)` for `x ∈ C`.
/// Each atom carries the section it represents when the cell's points lie in
/// exactly one `Ē(x ↦ ·)` per measurement of `C`.
pub struct ContextAtoms {
    pub atoms: Vec<EventSet>,
    pub sections: Vec<Option<Section>>,
}

impl WpsRepresentation {
    pub fn model(&self) -> &EmpiricalModel {
        &self.model
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn is_combinatorial(&self) -> bool {
        self.combinatorial
    }

    pub fn transfer(&self) -> &BTreeMap<Section, EventSet> {
        &self.transfer
    }

    /// `Σ` with `μ`, in canonical event order.
    pub fn sigma(&self) -> &BTreeMap<EventSet, Rational> {
        &self.mu
    }

    pub fn full(&self) -> EventSet {
        EventSet::full(self.points.len())
    }

    pub fn empty(&self) -> EventSet {
        EventSet::empty(self.points.len())
    }

    pub fn in_sigma(&self, s: &EventSet) -> bool {
        self.mu.contains_key(s)
    }

    pub fn mu(&self, s: &EventSet) -> Result<&Rational> {
        self.mu
            .get(s)
            .ok_or_else(|| Error::NotInSigma(s.to_string()))
    }

    pub fn singleton_image(&self, x: usize, o: usize) -> EventSet {
        EventSet::from_points(
            self.points.len(),
            self.points
                .iter()
                .enumerate()
                .filter(|(_, p)| p.in_singleton(x, o))
                .map(|(i, _)| i),
        )
    }

    /// `Ē(s)` for any section: the stored image when the domain is a
    /// context, otherwise the intersection of the single-measurement images.
    pub fn image(&self, s: &Section) -> EventSet {
        if let Some(e) = self.transfer.get(s) {
            return e.clone();
        }
        s.pairs().fold(self.full(), |acc, (x, o)| {
            acc.intersection(&self.singleton_image(x, o))
        })
    }

    /// The maximal-context events `S_C`, labelled by context index and
    /// section, in canonical order.
    pub fn v_m(&self) -> Vec<(usize, Section, EventSet)> {
        let sc = self.model.scenario();
        let mut out = Vec::new();
        for (i, c) in sc.maximal_contexts().iter().enumerate() {
            for s in sc
                .sections_over(c)
                .expect("context sections are enumerable")
            {
                let e = self.image(&s);
                out.push((i, s, e));
            }
        }
        out
    }

    /// `Ē(s_X)` for every global section, in canonical order.
    pub fn global_images(&self) -> Result<Vec<(Section, EventSet)>> {
        let sc = self.model.scenario();
        Ok(sc
            .sections_over(&sc.global_context())?
            .into_iter()
            .map(|g| {
                let e = self.image(&g);
                (g, e)
            })
            .collect())
    }

    pub fn context_atoms(&self, c: &Context) -> ContextAtoms {
        context_atoms(&self.points, self.model.scenario().num_outcomes(), c)
    }

    /// The maximal contexts whose algebra contains `s`.
    pub fn algebras_containing(&self, s: &EventSet) -> Vec<usize> {
        self.model
            .scenario()
            .maximal_contexts()
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                self.context_atoms(c)
                    .atoms
                    .iter()
                    .all(|a| a.is_subset(s) || a.is_disjoint(s))
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Same representation with `μ(s)` overwritten, for building
    /// counterexamples. The result is not re-verified.
    pub fn with_mu(mut self, s: &EventSet, value: Rational) -> Self {
        self.mu.insert(s.clone(), value);
        self
    }

    /// Same representation with `s` removed from `Σ`. Not re-verified.
    pub fn without_event(mut self, s: &EventSet) -> Self {
        self.mu.remove(s);
        self
    }

    /// Same representation with points reordered: new point `i` is old
    /// point `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.points.len();
        let mut seen = vec![false; n];
        if order.len() != n
            || order
                .iter()
                .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::Domain("point order is not a permutation".into()));
        }
        let mut new_index = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        Ok(WpsRepresentation {
            model: self.model.clone(),
            points: order.iter().map(|&i| self.points[i].clone()).collect(),
            transfer: self
                .transfer
                .iter()
                .map(|(s, e)| (s.clone(), e.mapped(&new_index)))
                .collect(),
            mu: self
                .mu
                .iter()
                .map(|(e, v)| (e.mapped(&new_index), v.clone()))
                .collect(),
            combinatorial: self.combinatorial,
        })
    }
}

fn context_atoms(points: &[Point], num_outcomes: usize, c: &Context) -> ContextAtoms {
    let n = points.len();
    let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut atoms: Vec<EventSet> = Vec::new();
    let mut sections = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let sig: Vec<bool> = c
            .measurements()
            .iter()
            .flat_map(|&x| (0..num_outcomes).map(move |o| (x, o)))
            .map(|(x, o)| p.in_singleton(x, o))
            .collect();
        let k = *index.entry(sig.clone()).or_insert_with(|| {
            atoms.push(EventSet::empty(n));
            let regular = sig
                .chunks(num_outcomes)
                .all(|ch| ch.iter().filter(|b| **b).count() == 1);
            sections.push(regular.then(|| {
                Section::from_pairs(
                    c.measurements()
                        .iter()
                        .zip(sig.chunks(num_outcomes))
                        .map(|(&x, ch)| (x, ch.iter().position(|b| *b).expect("regular"))),
                )
                .expect("distinct measurements")
            }));
            atoms.len() - 1
        });
        atoms[k].insert(i);
    }
    ContextAtoms { atoms, sections }
}

/// All unions of `atoms`, indexed by bitmask.
pub(crate) fn atom_unions(universe: usize, atoms: &[EventSet]) -> Vec<EventSet> {
    let k = atoms.len();
    let mut out = Vec::with_capacity(1 << k);
    out.push(EventSet::empty(universe));
    for mask in 1usize..(1 << k) {
        let low = mask.trailing_zeros() as usize;
        let rest = out[mask & (mask - 1)].clone();
        out.push(rest.union(&atoms[low]));
    }
    out
}

fn check_algebra_size(model: &EmpiricalModel, atoms: usize) -> Result<()> {
    let cap = model.scenario().cap();
    if atoms >= usize::BITS as usize - 1 || (1usize << atoms) > cap {
        return Err(Error::CapExceeded {
            requested: 1u128 << atoms.min(127),
            cap,
        });
    }
    Ok(())
}

/// Builds the transfer map and `Σ, μ` from a point set. Conflicting `μ`
/// values for an event shared by two algebras are reported as `Err(event)`.
fn assemble(
    model: &EmpiricalModel,
    points: Vec<Point>,
    combinatorial: bool,
) -> Result<std::result::Result<WpsRepresentation, (EventSet, Rational, Rational)>> {
    let sc = model.scenario();
    let n = points.len();
    let mut r = WpsRepresentation {
        model: model.clone(),
        points,
        transfer: BTreeMap::new(),
        mu: BTreeMap::new(),
        combinatorial,
    };
    for u in sc.contexts() {
        for s in sc.sections_over(&u)? {
            let e = s.pairs().fold(EventSet::full(n), |acc, (x, o)| {
                acc.intersection(&r.singleton_image(x, o))
            });
            r.transfer.insert(s, e);
        }
    }
    for (i, c) in sc.maximal_contexts().iter().enumerate() {
        let ca = r.context_atoms(c);
        check_algebra_size(model, ca.atoms.len())?;
        let weights: Vec<Rational> = ca
            .sections
            .iter()
            .map(|s| match s {
                Some(s) => model.table(i).weight(sc, s),
                None => Rational::zero(),
            })
            .collect();
        let unions = atom_unions(n, &ca.atoms);
        let mut values = vec![Rational::zero(); unions.len()];
        for mask in 1..unions.len() {
            let low = mask.trailing_zeros() as usize;
            values[mask] = &values[mask & (mask - 1)] + &weights[low];
        }
        for (e, v) in unions.into_iter().zip(values) {
            match r.mu.get(&e) {
                Some(old) if *old != v => return Ok(Err((e, old.clone(), v))),
                Some(_) => {}
                None => {
                    r.mu.insert(e, v);
                }
            }
        }
    }
    Ok(Ok(r))
}

/// One point per global section, in canonical order.
pub fn build_combinatorial_rep(m: &EmpiricalModel) -> Result<WpsRepresentation> {
    let sc = m.scenario();
    let points = sc
        .sections_over(&sc.global_context())?
        .into_iter()
        .map(Point::Global)
        .collect();
    let r = assemble(m, points, true)?.map_err(|(e, a, b)| {
        Error::Internal(format!("μ of {e} differs between algebras: {a} vs {b}"))
    })?;
    let verdict = verify_rep(&r)?;
    if let Some(f) = verdict.failures.first() {
        return Err(Error::Internal(format!(
            "combinatorial representation fails: {f}"
        )));
    }
    Ok(r)
}

/// The combinatorial representation with extra points appended. Every pad
/// must be contradictory or outcome-free at some measurement; the result is
/// rejected, naming the failed condition, if it is not a valid
/// representation.
pub fn build_padded_rep(m: &EmpiricalModel, pads: &[PadPoint]) -> Result<WpsRepresentation> {
    if pads.is_empty() {
        return build_combinatorial_rep(m);
    }
    let sc = m.scenario();
    for p in pads {
        if p.memberships.len() != sc.num_measurements() {
            return Err(Error::PaddingRejected {
                condition: "padding".into(),
                detail: format!(
                    "point `{}` lists {} measurements, expected {}",
                    p.label,
                    p.memberships.len(),
                    sc.num_measurements()
                ),
            });
        }
        if p.memberships
            .iter()
            .flatten()
            .any(|o| *o >= sc.num_outcomes())
        {
            return Err(Error::PaddingRejected {
                condition: "padding".into(),
                detail: format!("point `{}` names an unknown outcome", p.label),
            });
        }
        if p.is_regular() {
            return Err(Error::PaddingRejected {
                condition: "padding".into(),
                detail: format!(
                    "point `{}` has exactly one outcome per measurement, so it duplicates a global section",
                    p.label
                ),
            });
        }
    }
    let mut points: Vec<Point> = sc
        .sections_over(&sc.global_context())?
        .into_iter()
        .map(Point::Global)
        .collect();
    points.extend(pads.iter().cloned().map(Point::Pad));
    let r = assemble(m, points, false)?.map_err(|(e, a, b)| Error::PaddingRejected {
        condition: RepCondition::WeakClassicality.name().into(),
        detail: format!("μ of {e} would be both {a} and {b}"),
    })?;
    let verdict = verify_rep(&r)?;
    if let Some(f) = verdict.failures.first() {
        return Err(Error::PaddingRejected {
            condition: f.condition.name().into(),
            detail: f.detail.clone(),
        });
    }
    Ok(r)
}

/// `Ē(s|_U)` for `S = Ē(s)`.
pub fn extend_event(r: &WpsRepresentation, s: &EventSet, u: &Context) -> Result<EventSet> {
    let section = r
        .transfer
        .iter()
        .find(|(sec, e)| *e == s && u.is_subset(sec.domain()))
        .map(|(sec, _)| sec.clone())
        .ok_or_else(|| Error::NotEventImage(s.to_string()))?;
    Ok(r.image(&restrict(&section, u)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbench::catalog;

    #[test]
    fn specker_cube() {
        let m = catalog::specker().unwrap();
        let r = build_combinatorial_rep(&m).unwrap();
        assert_eq!(r.num_points(), 8);
        let sc = m.scenario();
        let c0 = sc.section(&[("c", "0")]).unwrap();
        assert_eq!(r.image(&c0).count(), 4);
    }

    #[test]
    fn extend_examples() {
        let m = catalog::specker().unwrap();
        let r = build_combinatorial_rep(&m).unwrap();
        let sc = m.scenario();
        let ab = sc.section(&[("a", "0"), ("b", "0")]).unwrap();
        let s = r.image(&ab);
        let a = sc.context(&["a"]).unwrap();
        let up = extend_event(&r, &s, &a).unwrap();
        assert_eq!(up, r.image(&sc.section(&[("a", "0")]).unwrap()));
        assert!(s.is_subset(&up) && s != up);
        assert_eq!(extend_event(&r, &s, ab.domain()).unwrap(), s);
        assert_eq!(extend_event(&r, &s, &Context::empty()).unwrap(), r.full());
        let stray = EventSet::from_points(8, [0, 7]);
        assert!(matches!(
            extend_event(&r, &stray, &a),
            Err(Error::NotEventImage(_))
        ));
    }

    #[test]
    fn deterministic_builds() {
        let m = catalog::bell().unwrap();
        assert_eq!(
            build_combinatorial_rep(&m).unwrap(),
            build_combinatorial_rep(&m).unwrap()
        );
        assert_eq!(
            build_padded_rep(&m, &[]).unwrap(),
            build_combinatorial_rep(&m).unwrap()
        );
    }

    #[test]
    fn regular_pad_rejected() {
        let m = catalog::bell().unwrap();
        let g = m.scenario().section_at(&m.scenario().global_context(), 3);
        let pad = PadPoint {
            label: "copy".into(),
            memberships: g.values().iter().map(|o| vec![*o]).collect(),
        };
        assert!(matches!(
            build_padded_rep(&m, &[pad]),
            Err(Error::PaddingRejected { .. })
        ));
    }
}
