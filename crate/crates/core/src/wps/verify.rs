use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{atom_unions, EventSet, WpsRepresentation};
use crate::error::Result;
use crate::model::{restrict, Context, Section};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RepCondition {
    /// A section over a context has no image.
    Transfer,
    Injectivity,
    /// `Ē(s)` is the non-empty intersection of its single-measurement images.
    Sheaf,
    /// Restricting a section enlarges its image.
    Duality,
    WeakClassicality,
    /// Every member of `Σ` lies in some maximal-context algebra.
    SigmaMembership,
    EmpiricalConsistency,
    MutualExclusivity,
    MarginalizationDual,
    CompatibilityDual,
    StrongMutualExclusivity,
    Exhaustiveness,
}

impl RepCondition {
    pub fn name(self) -> &'static str {
        match self {
            RepCondition::Transfer => "transfer",
            RepCondition::Injectivity => "injectivity",
            RepCondition::Sheaf => "sheaf",
            RepCondition::Duality => "duality",
            RepCondition::WeakClassicality => "WC",
            RepCondition::SigmaMembership => "sigma-membership",
            RepCondition::EmpiricalConsistency => "EC",
            RepCondition::MutualExclusivity => "ME",
            RepCondition::MarginalizationDual => "marginalization-dual",
            RepCondition::CompatibilityDual => "compatibility-dual",
            RepCondition::StrongMutualExclusivity => "strong-ME",
            RepCondition::Exhaustiveness => "exhaustiveness",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepFailure {
    pub condition: RepCondition,
    pub detail: String,
}

impl fmt::Display for RepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.condition.name(), self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepVerdict {
    pub failures: Vec<RepFailure>,
    /// Values of `μ` outside `[0, 1]`; allowed, but reported.
    pub warnings: Vec<String>,
}

impl RepVerdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed(&self, c: RepCondition) -> bool {
        self.failures.iter().any(|f| f.condition == c)
    }
}

struct Checker<'a> {
    r: &'a WpsRepresentation,
    failures: Vec<RepFailure>,
}

impl Checker<'_> {
    fn fail(&mut self, condition: RepCondition, detail: String) {
        self.failures.push(RepFailure { condition, detail });
    }

    fn sec(&self, s: &Section) -> String {
        self.r.model.scenario().format_section(s)
    }
}

/// Checks every defining condition of a representation and reports each
/// failure with a concrete counterexample.
pub fn verify_rep(r: &WpsRepresentation) -> Result<RepVerdict> {
    let sc = r.model.scenario();
    let contexts = sc.contexts();
    let mut ck = Checker {
        r,
        failures: Vec::new(),
    };

    let mut sections: Vec<Section> = Vec::new();
    for u in &contexts {
        for s in sc.sections_over(u)? {
            if !r.transfer.contains_key(&s) {
                let d = format!("no image for {}", ck.sec(&s));
                ck.fail(RepCondition::Transfer, d);
            } else {
                sections.push(s);
            }
        }
    }
    if !ck.failures.is_empty() {
        return Ok(RepVerdict {
            failures: ck.failures,
            warnings: Vec::new(),
        });
    }

    // Injectivity. With a single outcome every image is Y, so only sections
    // over the same domain are compared.
    let cross_domain = sc.num_outcomes() > 1;
    let mut by_image: HashMap<&EventSet, &Section> = HashMap::new();
    let mut by_image_domain: HashMap<(&EventSet, &Context), &Section> = HashMap::new();
    for s in &sections {
        let e = &r.transfer[s];
        let clash = if cross_domain {
            by_image.insert(e, s)
        } else {
            by_image_domain.insert((e, s.domain()), s)
        };
        if let Some(other) = clash {
            let d = format!("{} and {} share the image {e}", ck.sec(other), ck.sec(s));
            ck.fail(RepCondition::Injectivity, d);
        }
    }

    let n = r.num_points();
    let singles: HashMap<(usize, usize), EventSet> = (0..sc.num_measurements())
        .flat_map(|x| (0..sc.num_outcomes()).map(move |o| (x, o)))
        .map(|(x, o)| ((x, o), r.singleton_image(x, o)))
        .collect();
    for s in &sections {
        let e = &r.transfer[s];
        let expected = s
            .pairs()
            .fold(EventSet::full(n), |acc, p| acc.intersection(&singles[&p]));
        if *e != expected {
            let d = format!(
                "image of {} is {e}, but its single-measurement images meet in {expected}",
                ck.sec(s)
            );
            ck.fail(RepCondition::Sheaf, d);
        } else if e.is_empty() {
            let d = format!("image of {} is empty", ck.sec(s));
            ck.fail(RepCondition::Sheaf, d);
        }
        for &x in s.domain().measurements() {
            let smaller = Context::new(
                s.domain()
                    .measurements()
                    .iter()
                    .copied()
                    .filter(|y| *y != x),
            );
            let t = restrict(s, &smaller)?;
            if let Some(te) = r.transfer.get(&t) {
                if !e.is_subset(te) {
                    let d = format!(
                        "image of {} is not inside the image of {}",
                        ck.sec(s),
                        ck.sec(&t)
                    );
                    ck.fail(RepCondition::Duality, d);
                }
            }
        }
    }

    // Weak classicality: each maximal-context algebra is present in Σ and μ
    // is a probability measure on it.
    let mut algebra_members: HashSet<EventSet> = HashSet::new();
    for c in sc.maximal_contexts() {
        let ca = r.context_atoms(c);
        let unions = atom_unions(n, &ca.atoms);
        let atom_mu: Vec<Option<&Rational>> = ca.atoms.iter().map(|a| r.mu.get(a)).collect();
        let mut reported = false;
        for (k, a) in ca.atoms.iter().enumerate() {
            match atom_mu[k] {
                Some(v) if v.is_negative() => {
                    let d = format!(
                        "atom {a} of the {} algebra has μ = {v}",
                        sc.format_context(c)
                    );
                    ck.fail(RepCondition::WeakClassicality, d);
                    reported = true;
                }
                _ => {}
            }
        }
        for (mask, e) in unions.iter().enumerate() {
            algebra_members.insert(e.clone());
            if reported {
                continue;
            }
            let Some(v) = r.mu.get(e) else {
                let d = format!(
                    "{e} belongs to the {} algebra but is missing from Σ",
                    sc.format_context(c)
                );
                ck.fail(RepCondition::WeakClassicality, d);
                reported = true;
                continue;
            };
            let mut total = Rational::zero();
            let mut complete = true;
            for (k, m) in atom_mu.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    match m {
                        Some(m) => total += *m,
                        None => complete = false,
                    }
                }
            }
            if complete && *v != total {
                let d = format!(
                    "μ({e}) = {v}, but its atoms in the {} algebra sum to {total}",
                    sc.format_context(c)
                );
                ck.fail(RepCondition::WeakClassicality, d);
                reported = true;
            }
        }
        if !reported {
            let full = unions.last().expect("non-empty");
            if r.mu.get(full).is_some_and(|v| !v.is_one()) {
                let d = format!(
                    "μ(Y) = {} in the {} algebra",
                    r.mu[full],
                    sc.format_context(c)
                );
                ck.fail(RepCondition::WeakClassicality, d);
            }
        }
    }
    for e in r.mu.keys() {
        if !algebra_members.contains(e) {
            ck.fail(
                RepCondition::SigmaMembership,
                format!("{e} is in Σ but in no maximal-context algebra"),
            );
        }
    }

    // Empirical consistency.
    for s in &sections {
        let e = &r.transfer[s];
        let expected = r.model.probability(s)?;
        match r.mu.get(e) {
            None => {
                let d = format!("image {e} of {} is not in Σ", ck.sec(s));
                ck.fail(RepCondition::EmpiricalConsistency, d);
            }
            Some(v) if *v != expected => {
                let d = format!(
                    "μ of the image of {} is {v}, the model gives {expected}",
                    ck.sec(s)
                );
                ck.fail(RepCondition::EmpiricalConsistency, d);
            }
            _ => {}
        }
    }

    // Mutual exclusivity.
    for u in &contexts {
        let secs = sc.sections_over(u)?;
        for (i, s) in secs.iter().enumerate() {
            for t in &secs[i + 1..] {
                let meet = r.transfer[s].intersection(&r.transfer[t]);
                let ok = if meet.is_empty() {
                    true
                } else {
                    r.mu.get(&meet).is_some_and(|v| v.is_zero())
                };
                if !ok {
                    let d = format!(
                        "images of {} and {} meet in {meet} with non-zero or undefined μ",
                        ck.sec(s),
                        ck.sec(t)
                    );
                    ck.fail(RepCondition::MutualExclusivity, d);
                }
            }
        }
    }

    // Marginalization for extension along every chain U ⊂ U′ of contexts.
    let mu_of = |s: &Section| r.mu.get(&r.transfer[s]).cloned();
    let mut chains: HashSet<(Context, Context)> = HashSet::new();
    for big in &contexts {
        for small in big.subsets() {
            if small != *big {
                chains.insert((small, big.clone()));
            }
        }
    }
    let mut chains: Vec<(Context, Context)> = chains.into_iter().collect();
    chains.sort();
    for (small, big) in &chains {
        let proj = sc.projection_map(big, small)?;
        let mut sums = vec![Some(Rational::zero()); sc.num_sections(small)?];
        for (k, t) in sc.sections_over(big)?.iter().enumerate() {
            sums[proj[k]] = match (sums[proj[k]].take(), mu_of(t)) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
        }
        for (k, total) in sums.into_iter().enumerate() {
            let s = sc.section_at(small, k);
            if let (Some(total), Some(v)) = (total, mu_of(&s)) {
                if total != v {
                    let d = format!(
                        "μ of the image of {} is {v}, but its extensions to {} sum to {total}",
                        ck.sec(&s),
                        sc.format_context(big)
                    );
                    ck.fail(RepCondition::MarginalizationDual, d);
                }
            }
        }
    }

    // Compatibility of the dual marginals across maximal contexts.
    let maximal = sc.maximal_contexts();
    for (i, c) in maximal.iter().enumerate() {
        for c2 in &maximal[i + 1..] {
            let overlap = c.intersection(c2);
            let side = |big: &Context| -> Result<Vec<Option<Rational>>> {
                let proj = sc.projection_map(big, &overlap)?;
                let mut sums = vec![Some(Rational::zero()); sc.num_sections(&overlap)?];
                for (k, t) in sc.sections_over(big)?.iter().enumerate() {
                    sums[proj[k]] = match (sums[proj[k]].take(), mu_of(t)) {
                        (Some(a), Some(b)) => Some(a + b),
                        _ => None,
                    };
                }
                Ok(sums)
            };
            let (a, b) = (side(c)?, side(c2)?);
            for (k, (x, y)) in a.into_iter().zip(b).enumerate() {
                if let (Some(x), Some(y)) = (x, y) {
                    if x != y {
                        let d = format!(
                            "{} and {} induce {x} and {y} on {}",
                            sc.format_context(c),
                            sc.format_context(c2),
                            ck.sec(&sc.section_at(&overlap, k))
                        );
                        ck.fail(RepCondition::CompatibilityDual, d);
                    }
                }
            }
        }
    }

    if r.combinatorial {
        for x in 0..sc.num_measurements() {
            let mut cover = EventSet::empty(n);
            for o in 0..sc.num_outcomes() {
                for o2 in o + 1..sc.num_outcomes() {
                    let meet = singles[&(x, o)].intersection(&singles[&(x, o2)]);
                    if !meet.is_empty() {
                        let d = format!(
                            "images of {}={} and {}={} meet in {meet}",
                            sc.measurement_label(x),
                            sc.outcome_label(o),
                            sc.measurement_label(x),
                            sc.outcome_label(o2)
                        );
                        ck.fail(RepCondition::StrongMutualExclusivity, d);
                    }
                }
                cover = cover.union(&singles[&(x, o)]);
            }
            if !cover.is_full() {
                let d = format!(
                    "points {} lie in no image of measurement {}",
                    cover.complement(),
                    sc.measurement_label(x)
                );
                ck.fail(RepCondition::Exhaustiveness, d);
            }
        }
    }

    let warnings =
        r.mu.iter()
            .filter(|(_, v)| v.is_negative() || **v > Rational::one())
            .map(|(e, v)| format!("μ({e}) = {v} lies outside [0, 1]"))
            .collect();
    Ok(RepVerdict {
        failures: ck.failures,
        warnings,
    })
}
