//! Subadditivity defects, the witness collections for each contextuality
//! tier, the `V_M` violation checks on combinatorial representations, and
//! extensions of `μ` to the algebra generated by `Σ`.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::classifier::{
    global_distribution, is_logically_contextual, require_tier, Constraint, GlobalCertificate,
    GlobalDistribution, Tier,
};
use crate::error::{Error, Result};
use crate::lp::{FarkasCertificate, Feasibility, LinearSystem};
use crate::model::{restrict, Section};
use crate::rational::Rational;
use crate::workbench::random::random_weights;
use crate::wps::{excise, EventSet, WpsRepresentation};

/// Atoms of the generated algebra beyond this count make extensions too
/// large to tabulate.
pub const MAX_EXTENSION_ATOMS: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    MaximalSubadditivity,
    Subadditivity,
    MonotonicAdditivity,
}

impl WitnessKind {
    pub fn name(self) -> &'static str {
        match self {
            WitnessKind::MaximalSubadditivity => "maximal-subadditivity",
            WitnessKind::Subadditivity => "subadditivity",
            WitnessKind::MonotonicAdditivity => "monotonic-additivity",
        }
    }
}

/// `{ Z ∩ Ē(s_X) : s_X|_C = s }` for one maximal context and section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalFamily {
    pub context: usize,
    pub section: Section,
    /// `Ē(s)`.
    pub event: EventSet,
    pub members: Vec<(Section, EventSet)>,
}

impl MarginalFamily {
    pub fn union(&self, universe: usize) -> EventSet {
        EventSet::union_all(universe, self.members.iter().map(|(_, e)| e))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditivityData {
    pub z: EventSet,
    /// One family per maximal-context section, in canonical order.
    pub families: Vec<MarginalFamily>,
    /// Index into `families` of the representative collection.
    pub representative: usize,
    pub certificate: GlobalCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessSupport {
    None,
    /// The support section with no consistent extension and its image.
    Logical {
        context: usize,
        section: Section,
        event: EventSet,
    },
    Additivity(AdditivityData),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationWitness {
    pub kind: WitnessKind,
    pub collection: Vec<EventSet>,
    /// `μ(∪V) − Σ μ(A)`. Absent for additivity witnesses, whose defect
    /// depends on the extension.
    pub defect: Option<Rational>,
    pub support: WitnessSupport,
}

/// `μ(∪V) − Σ_{A ∈ V} μ(A)` on `Σ`.
pub fn defect(r: &WpsRepresentation, v: &[EventSet]) -> Result<Rational> {
    let mut total = Rational::zero();
    for a in v {
        total += r.mu(a)?;
    }
    let union = EventSet::union_all(r.num_points(), v);
    let mu_union = r
        .sigma()
        .get(&union)
        .ok_or_else(|| Error::UnionNotEvaluable(union.to_string()))?;
    Ok(mu_union - total)
}

fn dedup(mut v: Vec<EventSet>) -> Vec<EventSet> {
    v.sort();
    v.dedup();
    v
}

/// Null maximal-context events that contain the non-empty image of some
/// global section.
fn d3(r: &WpsRepresentation) -> Result<Vec<EventSet>> {
    let sc = r.model().scenario();
    let globals = r.global_images()?;
    let mut out = Vec::new();
    for (i, s, e) in r.v_m() {
        if !r.mu(&e)?.is_zero() {
            continue;
        }
        let c = &sc.maximal_contexts()[i];
        let contains_global = globals.iter().any(|(g, ge)| {
            !ge.is_empty() && restrict(g, c).expect("subset") == s && ge.is_subset(&e)
        });
        if contains_global {
            out.push(e);
        }
    }
    Ok(out)
}

/// The witness collection for `tier`. Requests for a tier weaker than the
/// model's own are answered (a strong model also has a logical witness);
/// stronger requests fail with a tier mismatch.
pub fn theorem1_witness(r: &WpsRepresentation, tier: Tier) -> Result<ViolationWitness> {
    let m = r.model();
    if tier == Tier::Noncontextual {
        return Err(Error::TierMismatch {
            requested: tier.name().into(),
            actual: "any".into(),
        });
    }
    require_tier(m, tier)?;
    let ex = excise(r)?;
    let w = match tier {
        Tier::Strong => {
            let mut v = ex.null_sets();
            v.extend(d3(r)?);
            let v = dedup(v);
            let defect = defect(r, &v)?;
            ViolationWitness {
                kind: WitnessKind::MaximalSubadditivity,
                collection: v,
                defect: Some(defect),
                support: WitnessSupport::None,
            }
        }
        Tier::Logical => {
            let (ci, s_star) = is_logically_contextual(m)?
                .ok_or_else(|| Error::Internal("logical witness missing".into()))?;
            let sc = m.scenario();
            let star = r.image(&s_star);
            let mut v = ex.null_sets();
            v.extend(d3(r)?);
            for s in sc.sections_over(&sc.maximal_contexts()[ci])? {
                if s != s_star {
                    v.push(r.image(&s));
                }
            }
            let v = dedup(v);
            let defect = defect(r, &v)?;
            ViolationWitness {
                kind: WitnessKind::Subadditivity,
                collection: v,
                defect: Some(defect),
                support: WitnessSupport::Logical {
                    context: ci,
                    section: s_star,
                    event: star,
                },
            }
        }
        _ => {
            let GlobalDistribution::Infeasible(certificate) = global_distribution(m)? else {
                return Err(Error::Internal(
                    "contextual model has a global distribution".into(),
                ));
            };
            let families = marginal_families(r, &ex.z)?;
            let representative = certificate
                .constraints
                .iter()
                .zip(&certificate.multipliers)
                .filter(|(_, y)| !y.is_zero())
                .find_map(|(c, _)| match c {
                    Constraint::Marginal { context, section } => families
                        .iter()
                        .position(|f| f.context == *context && f.section == *section),
                    Constraint::Total => None,
                })
                .ok_or_else(|| Error::Internal("certificate uses no marginal row".into()))?;
            let collection = families[representative]
                .members
                .iter()
                .map(|(_, e)| e.clone())
                .collect();
            ViolationWitness {
                kind: WitnessKind::MonotonicAdditivity,
                collection,
                defect: None,
                support: WitnessSupport::Additivity(AdditivityData {
                    z: ex.z,
                    families,
                    representative,
                    certificate,
                }),
            }
        }
    };
    Ok(w)
}

fn marginal_families(r: &WpsRepresentation, z: &EventSet) -> Result<Vec<MarginalFamily>> {
    let sc = r.model().scenario();
    let globals = r.global_images()?;
    let mut out = Vec::new();
    for (i, c) in sc.maximal_contexts().iter().enumerate() {
        for s in sc.sections_over(c)? {
            let members = globals
                .iter()
                .filter(|(g, _)| restrict(g, c).expect("subset") == s)
                .map(|(g, e)| (g.clone(), e.intersection(z)))
                .collect();
            out.push(MarginalFamily {
                context: i,
                event: r.image(&s),
                section: s,
                members,
            });
        }
    }
    Ok(out)
}

/// Re-checks a witness against the representation.
pub fn verify_witness(r: &WpsRepresentation, w: &ViolationWitness) -> Result<bool> {
    match w.kind {
        WitnessKind::MaximalSubadditivity | WitnessKind::Subadditivity => {
            let d = defect(r, &w.collection)?;
            if w.defect.as_ref() != Some(&d) {
                return Ok(false);
            }
            Ok(if w.kind == WitnessKind::MaximalSubadditivity {
                d.is_one()
            } else {
                d.is_positive()
            })
        }
        WitnessKind::MonotonicAdditivity => {
            let WitnessSupport::Additivity(data) = &w.support else {
                return Ok(false);
            };
            if !crate::classifier::verify_global_certificate(r.model(), &data.certificate)? {
                return Ok(false);
            }
            let n = r.num_points();
            for f in &data.families {
                let sets: Vec<&EventSet> = f.members.iter().map(|(_, e)| e).collect();
                for (i, a) in sets.iter().enumerate() {
                    if sets[i + 1..].iter().any(|b| !a.is_disjoint(b)) {
                        return Ok(false);
                    }
                }
                if f.union(n) != f.event.intersection(&data.z) {
                    return Ok(false);
                }
            }
            let rep = &data.families[data.representative];
            let collection: Vec<EventSet> = rep.members.iter().map(|(_, e)| e.clone()).collect();
            Ok(collection == w.collection)
        }
    }
}

impl AdditivityData {
    /// The first family on which `ext` is not additive, with its defect
    /// `ν(∪V) − Σ ν(A)`.
    pub fn violated_by(&self, ext: &Extension) -> Result<Option<(usize, Rational)>> {
        for (k, f) in self.families.iter().enumerate() {
            let union = f.union(self.z.universe());
            let mut d = ext.value(&union)?;
            for (_, e) in &f.members {
                d -= ext.value(e)?;
            }
            if !d.is_zero() {
                return Ok(Some((k, d)));
            }
        }
        Ok(None)
    }
}

fn require_combinatorial(r: &WpsRepresentation) -> Result<()> {
    if r.is_combinatorial() {
        Ok(())
    } else {
        Err(Error::NotCombinatorial)
    }
}

fn null_vm(r: &WpsRepresentation) -> Result<Vec<EventSet>> {
    let mut out = Vec::new();
    for (_, _, e) in r.v_m() {
        if r.mu(&e)?.is_zero() {
            out.push(e);
        }
    }
    Ok(dedup(out))
}

/// Whether the null members of `V_M` cover `Y`; the null members are
/// returned either way.
pub fn strong_vm_violation(r: &WpsRepresentation) -> Result<(bool, Vec<EventSet>)> {
    require_combinatorial(r)?;
    let null = null_vm(r)?;
    let covered = EventSet::union_all(r.num_points(), &null).is_full();
    Ok((covered, null))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalVmWitness {
    /// Index of the maximal context whose events form the additive cover.
    pub context: usize,
    pub section: Section,
    /// The non-null cover member lying inside the null members' union.
    pub event: EventSet,
    /// Null members of `V_M` meeting `event`.
    pub cover: Vec<EventSet>,
}

/// The first non-null `S_C` (canonical order) inside the union of the null
/// members of `V_M`.
pub fn logical_vm_violation(r: &WpsRepresentation) -> Result<Option<LogicalVmWitness>> {
    require_combinatorial(r)?;
    let null = null_vm(r)?;
    let union = EventSet::union_all(r.num_points(), &null);
    for (i, s, e) in r.v_m() {
        if r.mu(&e)?.is_zero() || !e.is_subset(&union) {
            continue;
        }
        let cover = null
            .iter()
            .filter(|n| !n.is_disjoint(&e))
            .cloned()
            .collect();
        return Ok(Some(LogicalVmWitness {
            context: i,
            section: s,
            event: e,
            cover,
        }));
    }
    Ok(None)
}

/// A dual certificate for the system `Σ_{S_X ⊆ S_C} x_{S_X} = μ(S_C)` over
/// the images of global sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VmAdditivityWitness {
    /// Variables: the distinct non-empty images `S_X`.
    pub variables: Vec<EventSet>,
    /// Rows after the total row: the members of `V_M`.
    pub rows: Vec<EventSet>,
    /// Multipliers for the total row followed by `rows`.
    pub multipliers: Vec<Rational>,
}

fn vm_system(r: &WpsRepresentation) -> Result<(LinearSystem, Vec<EventSet>, Vec<EventSet>)> {
    let vars: Vec<EventSet> = dedup(
        r.global_images()?
            .into_iter()
            .map(|(_, e)| e)
            .filter(|e| !e.is_empty())
            .collect(),
    );
    let rows: Vec<EventSet> = r.v_m().into_iter().map(|(_, _, e)| e).collect();
    let mut sys = LinearSystem::new(vars.len());
    sys.add_indicator_row(0..vars.len(), Rational::one());
    for s in &rows {
        let inside = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_subset(s))
            .map(|(j, _)| j);
        sys.add_indicator_row(inside, r.mu(s)?.clone());
    }
    Ok((sys, vars, rows))
}

/// Decides whether `V_M` generates a disjoint family that is non-additive
/// in every monotonic extension, by solving for weights on the images of
/// global sections that reproduce `μ` on `V_M` through set inclusion.
pub fn vm_additivity_violation(r: &WpsRepresentation) -> Result<Option<VmAdditivityWitness>> {
    require_combinatorial(r)?;
    let (sys, variables, rows) = vm_system(r)?;
    Ok(match sys.solve()? {
        Feasibility::Feasible(_) => None,
        Feasibility::Infeasible(c) => Some(VmAdditivityWitness {
            variables,
            rows,
            multipliers: c.multipliers,
        }),
    })
}

pub fn verify_vm_additivity(r: &WpsRepresentation, w: &VmAdditivityWitness) -> Result<bool> {
    let (sys, variables, rows) = vm_system(r)?;
    Ok(variables == w.variables
        && rows == w.rows
        && sys.is_certificate(&FarkasCertificate {
            multipliers: w.multipliers.clone(),
        }))
}

/// A point distribution `p` on `Y` with `Σ_{y ∈ A} p(y) = μ(A)` for every
/// `A ∈ Σ`, if one exists.
pub fn has_classical_extension(r: &WpsRepresentation) -> Result<Option<Vec<Rational>>> {
    let n = r.num_points();
    let sc = r.model().scenario();
    // Additivity inside each algebra makes the atom rows sufficient; the
    // answer is still checked against all of Σ.
    let mut sys = LinearSystem::new(n);
    sys.add_indicator_row(0..n, Rational::one());
    for c in sc.maximal_contexts() {
        for a in r.context_atoms(c).atoms {
            let v = r.mu(&a)?.clone();
            sys.add_indicator_row(a.iter(), v);
        }
    }
    let p = match sys.solve()? {
        Feasibility::Infeasible(_) => return Ok(None),
        Feasibility::Feasible(p) => p,
    };
    if reproduces_sigma(r, &p) {
        return Ok(Some(p));
    }
    let mut full = LinearSystem::new(n);
    full.add_indicator_row(0..n, Rational::one());
    for (e, v) in r.sigma() {
        full.add_indicator_row(e.iter(), v.clone());
    }
    Ok(match full.solve()? {
        Feasibility::Feasible(p) => Some(p),
        Feasibility::Infeasible(_) => None,
    })
}

fn reproduces_sigma(r: &WpsRepresentation, p: &[Rational]) -> bool {
    r.sigma().iter().all(|(e, v)| {
        let s: Rational = e.iter().map(|y| &p[y]).sum();
        s == *v
    })
}

/// Atoms of the algebra generated by `Σ`: the membership cells of the
/// single-measurement images.
pub fn generated_atoms(r: &WpsRepresentation) -> Vec<EventSet> {
    let sc = r.model().scenario();
    let n = r.num_points();
    let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut atoms: Vec<EventSet> = Vec::new();
    for (i, p) in r.points().iter().enumerate() {
        let sig: Vec<bool> = (0..sc.num_measurements())
            .flat_map(|x| (0..sc.num_outcomes()).map(move |o| (x, o)))
            .map(|(x, o)| p.in_singleton(x, o))
            .collect();
        let k = *index.entry(sig).or_insert_with(|| {
            atoms.push(EventSet::empty(n));
            atoms.len() - 1
        });
        atoms[k].insert(i);
    }
    atoms
}

/// A set function on the algebra generated by a partition of `Y`, tabulated
/// by bitmask over the partition's blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    atoms: Vec<EventSet>,
    values: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionKind {
    Monotonic,
    Classical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionVerdict {
    pub kind: ExtensionKind,
    /// First violated inequality or equation, if any.
    pub violation: Option<String>,
}

impl ExtensionVerdict {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl Extension {
    pub fn new(atoms: Vec<EventSet>, values: Vec<Rational>) -> Result<Self> {
        if atoms.len() > MAX_EXTENSION_ATOMS {
            return Err(Error::CapExceeded {
                requested: 1u128 << atoms.len(),
                cap: 1 << MAX_EXTENSION_ATOMS,
            });
        }
        if values.len() != 1 << atoms.len() {
            return Err(Error::NotAnExtension(format!(
                "{} values for {} atoms",
                values.len(),
                atoms.len()
            )));
        }
        Ok(Extension { atoms, values })
    }

    pub fn atoms(&self) -> &[EventSet] {
        &self.atoms
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Bitmask of the atoms making up `s`, if `s` is a union of atoms.
    pub fn mask(&self, s: &EventSet) -> Option<usize> {
        let mut mask = 0;
        let mut covered = 0;
        for (k, a) in self.atoms.iter().enumerate() {
            if a.is_subset(s) {
                mask |= 1 << k;
                covered += a.count();
            } else if !a.is_disjoint(s) {
                return None;
            }
        }
        (covered == s.count()).then_some(mask)
    }

    pub fn value(&self, s: &EventSet) -> Result<Rational> {
        self.mask(s)
            .map(|m| self.values[m].clone())
            .ok_or_else(|| Error::NotAnExtension(format!("{s} is not in the extended algebra")))
    }

    pub fn event(&self, mask: usize) -> EventSet {
        let n = self.atoms.first().map_or(0, |a| a.universe());
        EventSet::union_all(
            n,
            self.atoms
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, a)| a),
        )
    }

    /// The additive set function with the given weight on each point.
    pub fn from_point_weights(r: &WpsRepresentation, p: &[Rational]) -> Result<Self> {
        let atoms = generated_atoms(r);
        let weights: Vec<Rational> = atoms
            .iter()
            .map(|a| a.iter().map(|y| &p[y]).sum())
            .collect();
        if atoms.len() > MAX_EXTENSION_ATOMS {
            return Err(Error::CapExceeded {
                requested: 1u128 << atoms.len(),
                cap: 1 << MAX_EXTENSION_ATOMS,
            });
        }
        let mut values = vec![Rational::zero(); 1 << atoms.len()];
        for mask in 1..values.len() {
            let low = mask.trailing_zeros() as usize;
            values[mask] = &values[mask & (mask - 1)] + &weights[low];
        }
        Extension::new(atoms, values)
    }
}

/// Checks that `ext` extends `μ` and is monotone, or additive, as asked.
pub fn verify_extension(
    r: &WpsRepresentation,
    ext: &Extension,
    kind: ExtensionKind,
) -> Result<ExtensionVerdict> {
    let n = r.num_points();
    let mut seen = EventSet::empty(n);
    for a in &ext.atoms {
        if a.universe() != n || a.is_empty() || !a.is_disjoint(&seen) {
            return Err(Error::NotAnExtension("blocks do not partition Y".into()));
        }
        seen = seen.union(a);
    }
    if !seen.is_full() {
        return Err(Error::NotAnExtension("blocks do not cover Y".into()));
    }
    for (e, v) in r.sigma() {
        let got = ext.value(e)?;
        if got != *v {
            return Err(Error::NotAnExtension(format!(
                "value {got} on {e}, but μ = {v}"
            )));
        }
    }
    let k = ext.atoms.len();
    let violation = match kind {
        ExtensionKind::Monotonic => (1..ext.values.len()).find_map(|mask| {
            (0..k)
                .filter(|i| mask & (1 << i) != 0)
                .find(|i| ext.values[mask & !(1 << i)] > ext.values[mask])
                .map(|i| {
                    let small = mask & !(1 << i);
                    format!(
                        "value {} on {} exceeds value {} on its superset {}",
                        ext.values[small],
                        ext.event(small),
                        ext.values[mask],
                        ext.event(mask)
                    )
                })
        }),
        ExtensionKind::Classical => {
            let single: Vec<&Rational> = (0..k).map(|i| &ext.values[1 << i]).collect();
            if !ext.values[0].is_zero() {
                Some(format!("value {} on the empty set", ext.values[0]))
            } else if let Some(i) = single.iter().position(|v| v.is_negative()) {
                Some(format!("negative value on {}", ext.atoms[i]))
            } else if !ext.values[ext.values.len() - 1].is_one() {
                Some(format!("value {} on Y", ext.values[ext.values.len() - 1]))
            } else {
                (1..ext.values.len()).find_map(|mask| {
                    let sum: Rational = (0..k)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| single[i])
                        .sum();
                    (sum != ext.values[mask]).then(|| {
                        format!(
                            "value {} on {} differs from the sum {sum} over its blocks",
                            ext.values[mask],
                            ext.event(mask)
                        )
                    })
                })
            }
        }
    };
    Ok(ExtensionVerdict { kind, violation })
}

/// A random monotone extension of `μ` that vanishes off `Z`.
///
/// On subsets `T` of `Z`, the value is `max(inner(T), min(ρ(T), upper(T)))`
/// where `inner` and `upper` are the largest `μ` below and the smallest
/// above among `{A ∩ Z : A ∈ Σ}`, and `ρ` is a random probability on the
/// atoms of `Z`. Elsewhere `ν(T) = ν(T ∩ Z)`.
pub fn sample_monotone_extension<R: Rng>(r: &WpsRepresentation, rng: &mut R) -> Result<Extension> {
    let atoms = generated_atoms(r);
    if atoms.len() > MAX_EXTENSION_ATOMS {
        return Err(Error::CapExceeded {
            requested: 1u128 << atoms.len(),
            cap: 1 << MAX_EXTENSION_ATOMS,
        });
    }
    let z = excise(r)?.z;
    let z_atoms: Vec<usize> = (0..atoms.len())
        .filter(|&k| atoms[k].is_subset(&z))
        .collect();
    let kz = z_atoms.len();
    let to_z_mask = |s: &EventSet| -> usize {
        z_atoms
            .iter()
            .enumerate()
            .filter(|(_, &k)| atoms[k].is_subset(s))
            .fold(0, |m, (j, _)| m | (1 << j))
    };

    let mut own: Vec<Option<Rational>> = vec![None; 1 << kz];
    for (e, v) in r.sigma() {
        let m = to_z_mask(e);
        match &own[m] {
            Some(old) if old != v => {
                return Err(Error::Internal(format!(
                    "μ does not factor through Z: {e} has {v}, another event with the same trace has {old}"
                )));
            }
            _ => own[m] = Some(v.clone()),
        }
    }

    let mut inner: Vec<Rational> = vec![Rational::zero(); 1 << kz];
    for mask in 0..(1usize << kz) {
        let mut best = own[mask].clone().unwrap_or_else(Rational::zero);
        for j in 0..kz {
            if mask & (1 << j) != 0 && inner[mask & !(1 << j)] > best {
                best = inner[mask & !(1 << j)].clone();
            }
        }
        inner[mask] = best;
    }
    let mut upper: Vec<Rational> = vec![Rational::one(); 1 << kz];
    for mask in (0..(1usize << kz)).rev() {
        let mut best = own[mask].clone().unwrap_or_else(Rational::one);
        for j in 0..kz {
            if mask & (1 << j) == 0 && upper[mask | (1 << j)] < best {
                best = upper[mask | (1 << j)].clone();
            }
        }
        upper[mask] = best;
    }
    if let Some(mask) = (0..(1usize << kz)).find(|&m| own[m].is_some() && inner[m] != upper[m]) {
        return Err(Error::Internal(format!(
            "μ is not monotone on Σ around the trace with mask {mask:#b}"
        )));
    }

    let rho_atoms = random_weights(rng, kz.max(1), 97);
    let mut rho = vec![Rational::zero(); 1 << kz];
    for mask in 1..(1usize << kz) {
        let low = mask.trailing_zeros() as usize;
        rho[mask] = &rho[mask & (mask - 1)] + &rho_atoms[low];
    }
    let nu_z: Vec<Rational> = (0..(1usize << kz))
        .map(|m| {
            let mid = if rho[m] < upper[m] {
                rho[m].clone()
            } else {
                upper[m].clone()
            };
            if inner[m] > mid {
                inner[m].clone()
            } else {
                mid
            }
        })
        .collect();

    let values = (0..(1usize << atoms.len()))
        .map(|mask| {
            let zm = z_atoms
                .iter()
                .enumerate()
                .filter(|(_, &k)| mask & (1 << k) != 0)
                .fold(0, |m, (j, _)| m | (1 << j));
            nu_z[zm].clone()
        })
        .collect();
    Extension::new(atoms, values)
}

/// Whether `ext` satisfies `ν(A ∪ B) ≤ ν(A) + ν(B)` on all pairs of
/// disjoint unions of blocks; the first failing pair is returned.
pub fn subadditivity_failure(ext: &Extension) -> Option<(usize, usize)> {
    let k = ext.atoms.len();
    let full = (1usize << k) - 1;
    for a in 1..=full {
        let rest = full & !a;
        let mut b = rest;
        while b > 0 {
            if b > a && ext.values[a | b] > &ext.values[a] + &ext.values[b] {
                return Some((a, b));
            }
            b = (b - 1) & rest;
        }
    }
    None
}

/// Searches for a cover of `Y` made of the excised null sets and one event
/// from each maximal-context algebra whose total `μ` is below `μ(Y) = 1`.
/// The cheapest such cover is returned as a subadditivity witness.
pub fn find_subadditivity_violation(r: &WpsRepresentation) -> Result<Option<ViolationWitness>> {
    let sc = r.model().scenario();
    let n = r.num_points();
    let null = excise(r)?.null_sets();
    let base = EventSet::union_all(n, &null);
    let mut choices: Vec<Vec<(EventSet, Rational)>> = Vec::new();
    let mut combos: u128 = 1;
    for c in sc.maximal_contexts() {
        let atoms = r.context_atoms(c).atoms;
        let unions = crate::wps::atom_unions(n, &atoms);
        let mut opts: Vec<(EventSet, Rational)> = unions
            .into_iter()
            .map(|e| {
                let v = r.mu(&e).cloned();
                v.map(|v| (e, v))
            })
            .collect::<Result<_>>()?;
        opts.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        combos = combos.saturating_mul(opts.len() as u128);
        choices.push(opts);
    }
    if combos > sc.cap() as u128 {
        return Err(Error::CapExceeded {
            requested: combos,
            cap: sc.cap(),
        });
    }
    let mut best: Option<(Rational, Vec<usize>)> = None;
    let mut pick = Vec::with_capacity(choices.len());
    search(&choices, &base, Rational::zero(), &mut pick, &mut best);
    let Some((total, idx)) = best else {
        return Ok(None);
    };
    if total >= Rational::one() {
        return Ok(None);
    }
    let mut v: Vec<EventSet> = null;
    for (c, &i) in idx.iter().enumerate() {
        let e = &choices[c][i].0;
        if !e.is_empty() {
            v.push(e.clone());
        }
    }
    let v = dedup(v);
    let d = defect(r, &v)?;
    Ok(Some(ViolationWitness {
        kind: if d.is_one() {
            WitnessKind::MaximalSubadditivity
        } else {
            WitnessKind::Subadditivity
        },
        collection: v,
        defect: Some(d),
        support: WitnessSupport::None,
    }))
}

fn search(
    choices: &[Vec<(EventSet, Rational)>],
    covered: &EventSet,
    total: Rational,
    pick: &mut Vec<usize>,
    best: &mut Option<(Rational, Vec<usize>)>,
) {
    if best.as_ref().is_some_and(|(b, _)| total >= *b) {
        return;
    }
    let depth = pick.len();
    if depth == choices.len() {
        if covered.is_full() {
            *best = Some((total, pick.clone()));
        }
        return;
    }
    for (i, (e, v)) in choices[depth].iter().enumerate() {
        pick.push(i);
        search(choices, &covered.union(e), &total + v, pick, best);
        pick.pop();
    }
}
