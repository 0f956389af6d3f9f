//! Measurement scenarios, sections, distributions and empirical models.
//!
//! Measurements and outcomes are referred to by their index in the
//! scenario's ordered label lists. Every enumeration follows that order, so
//! the same input always produces the same output.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Default bound on the size of any enumerated section set.
pub const DEFAULT_CAP: usize = 1 << 20;

/// A set of measurements, stored as sorted measurement indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context(Vec<usize>);

impl Context {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        Context(set.into_iter().collect())
    }

    pub fn empty() -> Self {
        Context(Vec::new())
    }

    pub fn singleton(x: usize) -> Self {
        Context(vec![x])
    }

    pub fn measurements(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &Context) -> bool {
        self.0.iter().all(|x| other.contains(*x))
    }

    pub fn intersection(&self, other: &Context) -> Context {
        Context(
            self.0
                .iter()
                .copied()
                .filter(|x| other.contains(*x))
                .collect(),
        )
    }

    pub fn union(&self, other: &Context) -> Context {
        Context::new(self.0.iter().chain(other.0.iter()).copied())
    }

    /// All subsets, in order of the bitmask over this context's members.
    pub fn subsets(&self) -> Vec<Context> {
        let n = self.0.len();
        (0u64..(1u64 << n))
            .map(|mask| {
                Context(
                    (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| self.0[i])
                        .collect(),
                )
            })
            .collect()
    }
}

/// A total assignment of outcomes to the measurements of a context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Section {
    domain: Context,
    values: Vec<usize>,
}

impl Section {
    /// Builds a section from `(measurement, outcome)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Domain(format!(
                    "measurement {} assigned twice",
                    w[0].0
                )));
            }
        }
        Ok(Section {
            domain: Context(pairs.iter().map(|p| p.0).collect()),
            values: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn empty() -> Self {
        Section {
            domain: Context::empty(),
            values: Vec::new(),
        }
    }

    pub fn domain(&self) -> &Context {
        &self.domain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        self.domain.0.binary_search(&x).ok().map(|i| self.values[i])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.domain
            .0
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    /// Agreement on the overlap of the two domains.
    pub fn agrees_with(&self, other: &Section) -> bool {
        self.pairs()
            .all(|(x, o)| other.get(x).is_none_or(|p| p == o))
    }
}

/// Projection of `s` onto `u`.
pub fn restrict(s: &Section, u: &Context) -> Result<Section> {
    if !u.is_subset(&s.domain) {
        return Err(Error::Domain(format!(
            "{:?} is not a subset of the section domain {:?}",
            u.0, s.domain.0
        )));
    }
    Ok(Section {
        domain: u.clone(),
        values: u.0.iter().map(|x| s.get(*x).expect("subset")).collect(),
    })
}

/// Glues a pairwise-compatible family into the unique section over the union
/// of its domains.
pub fn glue(scenario: &Scenario, family: &[Section]) -> Result<Section> {
    if family.is_empty() {
        return Err(Error::Domain("cannot glue an empty family".into()));
    }
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate().skip(i + 1) {
            if let Some((x, _)) = a.pairs().find(|(x, o)| b.get(*x).is_some_and(|p| p != *o)) {
                return Err(Error::Incompatible {
                    first: i,
                    second: j,
                    measurement: scenario.measurement_label(x).to_string(),
                });
            }
        }
    }
    Section::from_pairs(
        family
            .iter()
            .flat_map(|s| s.pairs())
            .collect::<BTreeSet<_>>(),
    )
}

/// A measurement scenario: measurements, maximal contexts and outcomes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    measurements: Vec<String>,
    outcomes: Vec<String>,
    maximal_contexts: Vec<Context>,
    cap: usize,
}

impl Scenario {
    pub fn new<M, O, C, L>(measurements: M, outcomes: O, maximal_contexts: C) -> Result<Self>
    where
        M: IntoIterator,
        M::Item: Into<String>,
        O: IntoIterator,
        O::Item: Into<String>,
        C: IntoIterator<Item = L>,
        L: IntoIterator,
        L::Item: AsRef<str>,
    {
        let measurements: Vec<String> = measurements.into_iter().map(Into::into).collect();
        let outcomes: Vec<String> = outcomes.into_iter().map(Into::into).collect();
        if measurements.is_empty() {
            return Err(Error::InvalidScenario("no measurements".into()));
        }
        if outcomes.is_empty() {
            return Err(Error::InvalidScenario("no outcomes".into()));
        }
        if measurements.iter().collect::<BTreeSet<_>>().len() != measurements.len() {
            return Err(Error::InvalidScenario("duplicate measurement label".into()));
        }
        if outcomes.iter().collect::<BTreeSet<_>>().len() != outcomes.len() {
            return Err(Error::InvalidScenario("duplicate outcome label".into()));
        }
        let mut contexts = Vec::new();
        for labels in maximal_contexts {
            let mut idx = Vec::new();
            for l in labels {
                let l = l.as_ref();
                let i = measurements
                    .iter()
                    .position(|m| m == l)
                    .ok_or_else(|| Error::UnknownMeasurement(l.to_string()))?;
                idx.push(i);
            }
            let c = Context::new(idx);
            if c.is_empty() {
                return Err(Error::InvalidScenario("empty maximal context".into()));
            }
            if !contexts.contains(&c) {
                contexts.push(c);
            }
        }
        Self::from_indices(measurements, outcomes, contexts)
    }

    fn from_indices(
        measurements: Vec<String>,
        outcomes: Vec<String>,
        maximal_contexts: Vec<Context>,
    ) -> Result<Self> {
        for (i, a) in maximal_contexts.iter().enumerate() {
            for (j, b) in maximal_contexts.iter().enumerate() {
                if i != j && a.is_subset(b) {
                    return Err(Error::InvalidScenario(format!(
                        "maximal context {} is contained in {}",
                        i, j
                    )));
                }
            }
        }
        for (x, label) in measurements.iter().enumerate() {
            if !maximal_contexts.iter().any(|c| c.contains(x)) {
                return Err(Error::InvalidScenario(format!(
                    "measurement `{label}` is in no maximal context"
                )));
            }
        }
        Ok(Scenario {
            measurements,
            outcomes,
            maximal_contexts,
            cap: DEFAULT_CAP,
        })
    }

    /// Same scenario with a different enumeration cap.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn measurements(&self) -> &[String] {
        &self.measurements
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn maximal_contexts(&self) -> &[Context] {
        &self.maximal_contexts
    }

    pub fn num_measurements(&self) -> usize {
        self.measurements.len()
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn measurement_label(&self, x: usize) -> &str {
        &self.measurements[x]
    }

    pub fn outcome_label(&self, o: usize) -> &str {
        &self.outcomes[o]
    }

    pub fn measurement_index(&self, label: &str) -> Result<usize> {
        self.measurements
            .iter()
            .position(|m| m == label)
            .ok_or_else(|| Error::UnknownMeasurement(label.to_string()))
    }

    pub fn outcome_index(&self, label: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|m| m == label)
            .ok_or_else(|| Error::UnknownOutcome(label.to_string()))
    }

    /// Context from measurement labels.
    pub fn context(&self, labels: &[&str]) -> Result<Context> {
        labels
            .iter()
            .map(|l| self.measurement_index(l))
            .collect::<Result<Vec<_>>>()
            .map(Context::new)
    }

    /// Section from `(measurement, outcome)` label pairs.
    pub fn section(&self, pairs: &[(&str, &str)]) -> Result<Section> {
        let idx = pairs
            .iter()
            .map(|(m, o)| Ok((self.measurement_index(m)?, self.outcome_index(o)?)))
            .collect::<Result<Vec<_>>>()?;
        Section::from_pairs(idx)
    }

    pub fn global_context(&self) -> Context {
        Context((0..self.measurements.len()).collect())
    }

    /// Whether `u` lies inside some maximal context.
    pub fn is_context(&self, u: &Context) -> bool {
        self.maximal_contexts.iter().any(|c| u.is_subset(c))
    }

    /// All contexts (subsets of maximal contexts), deduplicated, ordered by
    /// size and then lexicographically.
    pub fn contexts(&self) -> Vec<Context> {
        let mut all: BTreeSet<(usize, Context)> = BTreeSet::new();
        for c in &self.maximal_contexts {
            for u in c.subsets() {
                all.insert((u.len(), u));
            }
        }
        all.into_iter().map(|(_, u)| u).collect()
    }

    /// `|O|^|U|`, or a cap error.
    pub fn num_sections(&self, u: &Context) -> Result<usize> {
        let requested = (self.outcomes.len() as u128)
            .checked_pow(u.len() as u32)
            .unwrap_or(u128::MAX);
        if requested > self.cap as u128 {
            return Err(Error::CapExceeded {
                requested,
                cap: self.cap,
            });
        }
        Ok(requested as usize)
    }

    /// Position of `s` in the canonical enumeration of its domain.
    pub fn section_index(&self, s: &Section) -> usize {
        let base = self.outcomes.len();
        s.values.iter().fold(0, |acc, v| acc * base + v)
    }

    /// Inverse of [`Scenario::section_index`].
    pub fn section_at(&self, u: &Context, mut index: usize) -> Section {
        let base = self.outcomes.len();
        let mut values = vec![0; u.len()];
        for slot in values.iter_mut().rev() {
            *slot = index % base;
            index /= base;
        }
        Section {
            domain: u.clone(),
            values,
        }
    }

    pub fn sections_over(&self, u: &Context) -> Result<Vec<Section>> {
        if let Some(x) = u.0.iter().find(|x| **x >= self.measurements.len()) {
            return Err(Error::Domain(format!("measurement index {x} out of range")));
        }
        let n = self.num_sections(u)?;
        Ok((0..n).map(|i| self.section_at(u, i)).collect())
    }

    /// For each section over `from` (canonical order), the index of its
    /// restriction to `to`.
    pub fn projection_map(&self, from: &Context, to: &Context) -> Result<Vec<usize>> {
        if !to.is_subset(from) {
            return Err(Error::Domain(format!(
                "{} is not contained in {}",
                self.format_context(to),
                self.format_context(from)
            )));
        }
        let n = self.num_sections(from)?;
        let base = self.outcomes.len();
        let positions: Vec<usize> =
            to.0.iter()
                .map(|x| from.0.binary_search(x).expect("subset"))
                .collect();
        let mut digits = vec![0usize; from.len()];
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(positions.iter().fold(0, |acc, p| acc * base + digits[*p]));
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < base {
                    break;
                }
                *d = 0;
            }
        }
        Ok(out)
    }

    pub fn format_context(&self, u: &Context) -> String {
        let labels: Vec<&str> = u.0.iter().map(|x| self.measurement_label(*x)).collect();
        format!("{{{}}}", labels.join(","))
    }

    pub fn format_section(&self, s: &Section) -> String {
        let parts: Vec<String> = s
            .pairs()
            .map(|(x, o)| format!("{}={}", self.measurement_label(x), self.outcome_label(o)))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// A probability distribution on the sections over one context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    domain: Context,
    num_outcomes: usize,
    weights: Vec<Rational>,
}

impl Distribution {
    /// Weights listed in canonical section order.
    pub fn new(scenario: &Scenario, domain: Context, weights: Vec<Rational>) -> Result<Self> {
        let n = scenario.num_sections(&domain)?;
        let name = scenario.format_context(&domain);
        if weights.len() != n {
            return Err(Error::InvalidDistribution {
                context: name,
                reason: format!("expected {n} weights, got {}", weights.len()),
            });
        }
        let d = Distribution {
            domain,
            num_outcomes: scenario.num_outcomes(),
            weights,
        };
        d.validate().map_err(|reason| Error::InvalidDistribution {
            context: name,
            reason,
        })?;
        Ok(d)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if let Some(i) = self.weights.iter().position(|w| w.is_negative()) {
            return Err(format!("weight {} is negative", i));
        }
        let total = rational::sum(&self.weights);
        if !total.is_one() {
            return Err(format!("weights sum to {total}"));
        }
        Ok(())
    }

    pub fn point_mass(scenario: &Scenario, s: &Section) -> Result<Self> {
        let n = scenario.num_sections(s.domain())?;
        let mut weights = vec![Rational::zero(); n];
        weights[scenario.section_index(s)] = Rational::one();
        Distribution::new(scenario, s.domain().clone(), weights)
    }

    pub fn uniform(scenario: &Scenario, domain: Context) -> Result<Self> {
        let n = scenario.num_sections(&domain)?;
        let w = rational::ratio(1, n as i64);
        Distribution::new(scenario, domain, vec![w; n])
    }

    pub fn domain(&self) -> &Context {
        &self.domain
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, scenario: &Scenario, s: &Section) -> Rational {
        if s.domain() != &self.domain {
            return Rational::zero();
        }
        self.weights[scenario.section_index(s)].clone()
    }

    /// Sections with non-zero weight, in canonical order.
    pub fn support(&self, scenario: &Scenario) -> Vec<Section> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, _)| scenario.section_at(&self.domain, i))
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }
}

/// Marginal of `d` on `u`: the weight of each `s` over `u` is the total
/// weight of the sections of `d` that restrict to `s`.
pub fn marginalize(scenario: &Scenario, d: &Distribution, u: &Context) -> Result<Distribution> {
    if !u.is_subset(&d.domain) {
        return Err(Error::Domain(format!(
            "{} is not contained in {}",
            scenario.format_context(u),
            scenario.format_context(&d.domain)
        )));
    }
    let n = scenario.num_sections(u)?;
    let mut weights = vec![Rational::zero(); n];
    for (i, w) in d.weights.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let r = scenario.section_at(&d.domain, i);
        let s = restrict(&r, u)?;
        weights[scenario.section_index(&s)] += w;
    }
    let out = Distribution {
        domain: u.clone(),
        num_outcomes: d.num_outcomes,
        weights,
    };
    debug_assert!(out.is_valid());
    Ok(out)
}

/// A family of distributions, one per maximal context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalModel {
    scenario: Scenario,
    tables: Vec<Distribution>,
}

impl EmpiricalModel {
    /// Builds a model and rejects it unless every pair of tables agrees on
    /// its overlap.
    pub fn new(scenario: Scenario, tables: Vec<Distribution>) -> Result<Self> {
        let m = Self::unchecked(scenario, tables)?;
        let check = check_model(&m);
        if !check.passed() {
            return Err(Error::Signaling(check));
        }
        Ok(m)
    }

    /// Builds a model checking only that there is one well-formed table per
    /// maximal context. Compatibility is left to [`check_model`].
    pub fn unchecked(scenario: Scenario, tables: Vec<Distribution>) -> Result<Self> {
        if tables.len() != scenario.maximal_contexts.len() {
            return Err(Error::InvalidScenario(format!(
                "{} tables for {} maximal contexts",
                tables.len(),
                scenario.maximal_contexts.len()
            )));
        }
        for (c, t) in scenario.maximal_contexts.iter().zip(&tables) {
            if t.domain() != c {
                return Err(Error::InvalidDistribution {
                    context: scenario.format_context(c),
                    reason: format!("table is over {}", scenario.format_context(t.domain())),
                });
            }
        }
        Ok(EmpiricalModel { scenario, tables })
    }

    /// Builds a model from per-context weight lists in canonical order.
    pub fn from_weights(scenario: Scenario, weights: Vec<Vec<Rational>>) -> Result<Self> {
        let tables = scenario
            .maximal_contexts
            .iter()
            .zip(weights)
            .map(|(c, w)| Distribution::new(&scenario, c.clone(), w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(scenario, tables)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn tables(&self) -> &[Distribution] {
        &self.tables
    }

    pub fn table(&self, i: usize) -> &Distribution {
        &self.tables[i]
    }

    /// The table for a maximal context, if `c` is one.
    pub fn table_for(&self, c: &Context) -> Option<&Distribution> {
        self.scenario
            .maximal_contexts
            .iter()
            .position(|m| m == c)
            .map(|i| &self.tables[i])
    }

    /// Probability of a section over any context, read from the first
    /// maximal context containing its domain.
    pub fn probability(&self, s: &Section) -> Result<Rational> {
        let i = self
            .scenario
            .maximal_contexts
            .iter()
            .position(|c| s.domain().is_subset(c))
            .ok_or_else(|| {
                Error::Domain(format!(
                    "{} is not a context",
                    self.scenario.format_context(s.domain())
                ))
            })?;
        let marginal = marginalize(&self.scenario, &self.tables[i], s.domain())?;
        Ok(marginal.weight(&self.scenario, s))
    }

    pub fn in_support(&self, i: usize, s: &Section) -> bool {
        !self.tables[i].weight(&self.scenario, s).is_zero()
    }

    /// Same model with a different enumeration cap.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.scenario.cap = cap;
        self
    }

    /// Equal up to the order in which maximal contexts are listed:
    /// identical measurement and outcome labels, the same set of maximal
    /// contexts, and identical tables on each.
    pub fn same_model(&self, other: &EmpiricalModel) -> bool {
        let (a, b) = (&self.scenario, &other.scenario);
        if a.measurements != b.measurements
            || a.outcomes != b.outcomes
            || a.maximal_contexts.len() != b.maximal_contexts.len()
        {
            return false;
        }
        a.maximal_contexts.iter().zip(&self.tables).all(|(c, t)| {
            other
                .table_for(c)
                .is_some_and(|u| u.weights() == t.weights())
        })
    }
}

/// A single failed condition found by [`check_model`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompatibilityFailure {
    InvalidTable {
        context: String,
        reason: String,
    },
    Signaling {
        first: String,
        second: String,
        overlap: String,
        section: String,
        first_marginal: Rational,
        second_marginal: Rational,
    },
}

impl fmt::Display for CompatibilityFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompatibilityFailure::InvalidTable { context, reason } => {
                write!(f, "table {context} is not a distribution: {reason}")
            }
            CompatibilityFailure::Signaling {
                first,
                second,
                overlap,
                section,
                first_marginal,
                second_marginal,
            } => write!(
                f,
                "contexts {first} and {second} disagree on {overlap} at {section}: {first_marginal} vs {second_marginal}"
            ),
        }
    }
}

/// Outcome of [`check_model`]; empty means the model is compatible.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelCheck {
    pub failures: Vec<CompatibilityFailure>,
}

impl ModelCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ModelCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "compatible");
        }
        for (i, fail) in self.failures.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{fail}")?;
        }
        Ok(())
    }
}

/// Checks that every table is a distribution and that every pair of maximal
/// contexts induces the same marginal on its overlap.
pub fn check_model(m: &EmpiricalModel) -> ModelCheck {
    let sc = &m.scenario;
    let mut failures = Vec::new();
    for (c, t) in sc.maximal_contexts.iter().zip(&m.tables) {
        if let Err(reason) = t.validate() {
            failures.push(CompatibilityFailure::InvalidTable {
                context: sc.format_context(c),
                reason,
            });
        }
    }
    if !failures.is_empty() {
        return ModelCheck { failures };
    }
    for (i, c) in sc.maximal_contexts.iter().enumerate() {
        for (j, c2) in sc.maximal_contexts.iter().enumerate().skip(i + 1) {
            let overlap = c.intersection(c2);
            let (Ok(a), Ok(b)) = (
                marginalize(sc, &m.tables[i], &overlap),
                marginalize(sc, &m.tables[j], &overlap),
            ) else {
                continue;
            };
            if let Some(k) = (0..a.weights.len()).find(|k| a.weights[*k] != b.weights[*k]) {
                failures.push(CompatibilityFailure::Signaling {
                    first: sc.format_context(c),
                    second: sc.format_context(c2),
                    overlap: sc.format_context(&overlap),
                    section: sc.format_section(&sc.section_at(&overlap, k)),
                    first_marginal: a.weights[k].clone(),
                    second_marginal: b.weights[k].clone(),
                });
            }
        }
    }
    ModelCheck { failures }
}

/// The model putting all weight on `global|_C` in every maximal context.
pub fn deterministic_model(scenario: &Scenario, global: &Section) -> Result<EmpiricalModel> {
    if global.domain() != &scenario.global_context() {
        return Err(Error::Domain("section is not global".into()));
    }
    let tables = scenario
        .maximal_contexts
        .iter()
        .map(|c| Distribution::point_mass(scenario, &restrict(global, c)?))
        .collect::<Result<Vec<_>>>()?;
    EmpiricalModel::new(scenario.clone(), tables)
}

/// Pointwise convex combination of models over a common scenario.
pub fn mixture(models: &[EmpiricalModel], weights: &[Rational]) -> Result<EmpiricalModel> {
    if models.is_empty() || models.len() != weights.len() {
        return Err(Error::Domain("one weight per model required".into()));
    }
    let total = rational::sum(weights);
    if !total.is_one() || weights.iter().any(|w| w.is_negative()) {
        return Err(Error::WeightSum(total.to_string()));
    }
    let scenario = &models[0].scenario;
    if models.iter().any(|m| {
        m.scenario.measurements != scenario.measurements
            || m.scenario.outcomes != scenario.outcomes
            || m.scenario.maximal_contexts != scenario.maximal_contexts
    }) {
        return Err(Error::ScenarioMismatch);
    }
    let tables = scenario
        .maximal_contexts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let n = models[0].tables[i].weights.len();
            let mut w = vec![Rational::zero(); n];
            for (m, lambda) in models.iter().zip(weights) {
                for (slot, v) in w.iter_mut().zip(&m.tables[i].weights) {
                    *slot += lambda * v;
                }
            }
            Distribution::new(scenario, c.clone(), w)
        })
        .collect::<Result<Vec<_>>>()?;
    EmpiricalModel::new(scenario.clone(), tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn bell_scenario() -> Scenario {
        Scenario::new(
            ["a", "b", "a'", "b'"],
            ["0", "1"],
            [["a", "b"], ["b", "a'"], ["a'", "b'"], ["b'", "a"]],
        )
        .unwrap()
    }

    #[test]
    fn section_counts() {
        let sc = bell_scenario();
        assert_eq!(
            sc.sections_over(&sc.context(&["a", "b"]).unwrap())
                .unwrap()
                .len(),
            4
        );
        assert_eq!(sc.sections_over(&sc.global_context()).unwrap().len(), 16);
        let empty = sc.sections_over(&Context::empty()).unwrap();
        assert_eq!(empty, vec![Section::empty()]);
    }

    #[test]
    fn sections_are_lexicographic() {
        let sc = bell_scenario();
        let ab = sc.context(&["a", "b"]).unwrap();
        let secs = sc.sections_over(&ab).unwrap();
        let vals: Vec<Vec<usize>> = secs.iter().map(|s| s.values().to_vec()).collect();
        assert_eq!(vals, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        for (i, s) in secs.iter().enumerate() {
            assert_eq!(sc.section_index(s), i);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let sc = bell_scenario().with_cap(8);
        let err = sc.sections_over(&sc.global_context()).unwrap_err();
        assert!(err.is_cap());
    }

    #[test]
    fn restriction_examples() {
        let sc = bell_scenario();
        let s = sc.section(&[("a", "1"), ("b", "0")]).unwrap();
        let a = sc.context(&["a"]).unwrap();
        assert_eq!(
            restrict(&s, &a).unwrap(),
            sc.section(&[("a", "1")]).unwrap()
        );
        assert_eq!(restrict(&s, s.domain()).unwrap(), s);
        let t = sc.section(&[("a", "1"), ("b", "0"), ("a'", "1")]).unwrap();
        let u = sc.context(&["b", "a'"]).unwrap();
        assert_eq!(
            restrict(&t, &u).unwrap(),
            sc.section(&[("b", "0"), ("a'", "1")]).unwrap()
        );
        assert!(restrict(&s, &sc.context(&["a'"]).unwrap()).is_err());
    }

    #[test]
    fn glue_examples() {
        let sc = bell_scenario();
        let s1 = sc.section(&[("a", "1"), ("b", "1")]).unwrap();
        let s2 = sc.section(&[("b", "1"), ("a'", "0")]).unwrap();
        assert_eq!(
            glue(&sc, &[s1.clone(), s2]).unwrap(),
            sc.section(&[("a", "1"), ("b", "1"), ("a'", "0")]).unwrap()
        );
        let bad = sc.section(&[("b", "0"), ("a'", "0")]).unwrap();
        match glue(&sc, &[s1.clone(), bad]) {
            Err(Error::Incompatible { measurement, .. }) => assert_eq!(measurement, "b"),
            other => panic!("expected incompatibility, got {other:?}"),
        }
        assert_eq!(glue(&sc, std::slice::from_ref(&s1)).unwrap(), s1);
        assert!(glue(&sc, &[]).is_err());
    }

    #[test]
    fn marginal_of_uniform_is_uniform() {
        let sc = bell_scenario();
        let ab = sc.context(&["a", "b"]).unwrap();
        let d = Distribution::uniform(&sc, ab.clone()).unwrap();
        let m = marginalize(&sc, &d, &sc.context(&["a"]).unwrap()).unwrap();
        assert_eq!(m.weights(), &[ratio(1, 2), ratio(1, 2)]);
        assert_eq!(marginalize(&sc, &d, &ab).unwrap(), d);
        assert!(marginalize(&sc, &d, &sc.context(&["a'"]).unwrap()).is_err());
    }

    #[test]
    fn marginal_of_point_mass_is_point_mass() {
        let sc = bell_scenario();
        let r = sc.section(&[("a", "1"), ("b", "0")]).unwrap();
        let d = Distribution::point_mass(&sc, &r).unwrap();
        let b = sc.context(&["b"]).unwrap();
        let m = marginalize(&sc, &d, &b).unwrap();
        assert_eq!(
            m,
            Distribution::point_mass(&sc, &restrict(&r, &b).unwrap()).unwrap()
        );
    }

    #[test]
    fn distributions_must_normalize() {
        let sc = bell_scenario();
        let a = sc.context(&["a"]).unwrap();
        assert!(Distribution::new(&sc, a.clone(), vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Distribution::new(&sc, a.clone(), vec![ratio(3, 2), ratio(-1, 2)]).is_err());
        assert!(Distribution::new(&sc, a, vec![ratio(1, 1)]).is_err());
    }

    #[test]
    fn scenario_invariants() {
        assert!(Scenario::new(Vec::<String>::new(), ["0"], Vec::<Vec<&str>>::new()).is_err());
        assert!(Scenario::new(["a"], Vec::<String>::new(), [["a"]]).is_err());
        assert!(Scenario::new(["a", "b"], ["0"], [["a"]]).is_err());
        assert!(Scenario::new(["a", "b"], ["0"], vec![vec!["a"], vec!["a", "b"]]).is_err());
        // A single maximal context equal to X is allowed.
        let sc = Scenario::new(["a", "b"], ["0", "1"], [["a", "b"]]).unwrap();
        assert_eq!(sc.maximal_contexts().len(), 1);
    }

    #[test]
    fn degenerate_scenario() {
        let sc = Scenario::new(["a"], ["only"], [["a"]]).unwrap();
        let g = sc.sections_over(&sc.global_context()).unwrap();
        assert_eq!(g.len(), 1);
        let m = deterministic_model(&sc, &g[0]).unwrap();
        assert!(check_model(&m).passed());
    }

    #[test]
    fn perturbed_model_fails_at_the_pair() {
        let sc = bell_scenario();
        let g = sc.section_at(&sc.global_context(), 5);
        let m = deterministic_model(&sc, &g).unwrap();
        let mut tables = m.tables().to_vec();
        // Move 1/100 of mass inside context {a,b} between sections that
        // differ at a, so the marginal on a changes.
        let w = &mut tables[0].weights;
        let from = w.iter().position(|x| x.is_one()).unwrap();
        let to = from ^ 2;
        w[from] = ratio(99, 100);
        w[to] = ratio(1, 100);
        let bad = EmpiricalModel::unchecked(sc.clone(), tables).unwrap();
        let check = check_model(&bad);
        assert!(!check.passed());
        match &check.failures[0] {
            CompatibilityFailure::Signaling {
                first,
                second,
                first_marginal,
                second_marginal,
                ..
            } => {
                assert_eq!(first, "{a,b}");
                assert_eq!(second, "{a,b'}");
                assert_eq!(first_marginal, &ratio(99, 100));
                assert_eq!(second_marginal, &ratio(1, 1));
            }
            other => panic!("unexpected failure {other:?}"),
        }
    }

    #[test]
    fn single_context_model_passes() {
        let sc = Scenario::new(["a", "b"], ["0", "1"], [["a", "b"]]).unwrap();
        let d = Distribution::uniform(&sc, sc.global_context()).unwrap();
        let m = EmpiricalModel::new(sc, vec![d]).unwrap();
        assert!(check_model(&m).passed());
    }

    #[test]
    fn mixtures() {
        let sc = bell_scenario();
        let g = sc.sections_over(&sc.global_context()).unwrap();
        let m1 = deterministic_model(&sc, &g[0]).unwrap();
        let m2 = deterministic_model(&sc, &g[15]).unwrap();
        let half = mixture(&[m1.clone(), m2.clone()], &[ratio(1, 2), ratio(1, 2)]).unwrap();
        for t in half.tables() {
            for w in t.weights() {
                assert!(w.is_zero() || *w == ratio(1, 2) || w.is_one());
            }
        }
        assert_eq!(
            mixture(&[m1.clone(), m2.clone()], &[ratio(1, 1), ratio(0, 1)]).unwrap(),
            m1
        );
        assert!(matches!(
            mixture(&[m1.clone(), m2], &[ratio(1, 2), ratio(1, 3)]),
            Err(Error::WeightSum(_))
        ));
        let other = Scenario::new(["a", "b"], ["0", "1"], [["a", "b"]]).unwrap();
        let gg = other.sections_over(&other.global_context()).unwrap();
        let m3 = deterministic_model(&other, &gg[0]).unwrap();
        assert!(matches!(
            mixture(&[m1, m3], &[ratio(1, 2), ratio(1, 2)]),
            Err(Error::ScenarioMismatch)
        ));
    }
}
