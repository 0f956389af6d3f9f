use num_traits::Zero;

use super::{EventSet, WpsRepresentation};
use crate::error::{Error, Result};
use crate::model::Section;

/// The null sets excised from a representation and what is left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExcisionReport {
    /// Non-empty `Ē(x ↦ o) ∩ Ē(x ↦ o′)` for `o ≠ o′`, labelled by `(x, o, o′)`.
    pub d1: Vec<((usize, usize, usize), EventSet)>,
    /// Non-empty `Y − ∪_o Ē(x ↦ o)`, labelled by `x`.
    pub d2: Vec<(usize, EventSet)>,
    /// `Y` minus everything in `d1` and `d2`.
    pub z: EventSet,
    /// For every point of `z`, the global section whose image contains it.
    pub lemma: Vec<(usize, Section)>,
}

impl ExcisionReport {
    pub fn null_sets(&self) -> Vec<EventSet> {
        let mut out: Vec<EventSet> = self
            .d1
            .iter()
            .map(|(_, e)| e.clone())
            .chain(self.d2.iter().map(|(_, e)| e.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Computes the contradictory and outcome-free null sets and checks, for
/// each remaining point, that it lies in exactly one image per measurement
/// and in the image of the global section those images spell out.
pub fn excise(r: &WpsRepresentation) -> Result<ExcisionReport> {
    let sc = r.model().scenario();
    let n = r.num_points();
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    for x in 0..sc.num_measurements() {
        let images: Vec<EventSet> = (0..sc.num_outcomes())
            .map(|o| r.singleton_image(x, o))
            .collect();
        for o in 0..images.len() {
            for o2 in o + 1..images.len() {
                let meet = images[o].intersection(&images[o2]);
                if !meet.is_empty() {
                    d1.push(((x, o, o2), meet));
                }
            }
        }
        let rest = EventSet::union_all(n, &images).complement();
        if !rest.is_empty() {
            d2.push((x, rest));
        }
    }
    for e in d1.iter().map(|(_, e)| e).chain(d2.iter().map(|(_, e)| e)) {
        match r.sigma().get(e) {
            Some(v) if v.is_zero() => {}
            Some(v) => {
                return Err(Error::Internal(format!("excised set {e} has μ = {v}")));
            }
            None => return Err(Error::Internal(format!("excised set {e} is not in Σ"))),
        }
    }
    let removed = EventSet::union_all(
        n,
        d1.iter().map(|(_, e)| e).chain(d2.iter().map(|(_, e)| e)),
    );
    let z = removed.complement();

    let mut lemma = Vec::new();
    for p in z.iter() {
        let mut pairs = Vec::new();
        for x in 0..sc.num_measurements() {
            let outs: Vec<usize> = (0..sc.num_outcomes())
                .filter(|o| r.points()[p].in_singleton(x, *o))
                .collect();
            if outs.len() != 1 {
                return Err(Error::Internal(format!(
                    "point {p} survives excision with {} outcomes for {}",
                    outs.len(),
                    sc.measurement_label(x)
                )));
            }
            pairs.push((x, outs[0]));
        }
        let g = Section::from_pairs(pairs)?;
        if !r.image(&g).contains(p) {
            return Err(Error::Internal(format!(
                "point {p} is not in the image of {}",
                sc.format_section(&g)
            )));
        }
        lemma.push((p, g));
    }
    Ok(ExcisionReport { d1, d2, z, lemma })
}
