//! Hierarchy tables, witness listings and payoff tables for the CLI.

use serde::Serialize;

use crate::classifier::{classify, Tier, TierVerdict, TierWitness};
use crate::dutch_book::{convexity_hierarchy, find_dutch_book, payoffs, DutchBookCertificate};
use crate::error::Result;
use crate::model::EmpiricalModel;
use crate::rational::{self, Rational};
use crate::violation::{
    has_classical_extension, logical_vm_violation, strong_vm_violation, vm_additivity_violation,
    ViolationWitness, WitnessSupport,
};
use crate::wps::{build_combinatorial_rep, EventSet, WpsRepresentation};

use super::io::SCHEMA_VERSION;

/// One row of the hierarchy table: strong, logical, probabilistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TierFlags {
    pub strong: bool,
    pub logical: bool,
    pub probabilistic: bool,
}

impl TierFlags {
    pub fn from_tier(t: Tier) -> Self {
        TierFlags {
            strong: t.implies(Tier::Strong),
            logical: t.implies(Tier::Logical),
            probabilistic: t.implies(Tier::Probabilistic),
        }
    }
}

/// The contextuality verdicts beside their representation-side and
/// betting-side counterparts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyReport {
    pub verdict: TierVerdict,
    pub contextuality: TierFlags,
    /// Subadditivity and additivity violations on the maximal-context events.
    pub vm_violation: TierFlags,
    /// Convexity violations on the maximal-context events.
    pub convexity_violation: TierFlags,
    pub dutch_bookable: bool,
    pub classical_extension: bool,
}

pub fn hierarchy_report(m: &EmpiricalModel) -> Result<HierarchyReport> {
    let verdict = classify(m)?;
    let r = build_combinatorial_rep(m)?;
    let conv = convexity_hierarchy(&r)?;
    Ok(HierarchyReport {
        contextuality: TierFlags::from_tier(verdict.tier),
        verdict,
        vm_violation: TierFlags {
            strong: strong_vm_violation(&r)?.0,
            logical: logical_vm_violation(&r)?.is_some(),
            probabilistic: vm_additivity_violation(&r)?.is_some(),
        },
        convexity_violation: TierFlags {
            strong: conv.strong_violation,
            logical: conv.logical_violation,
            probabilistic: conv.probabilistic_violation,
        },
        dutch_bookable: find_dutch_book(&r)?.is_some(),
        classical_extension: has_classical_extension(&r)?.is_some(),
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Serialize)]
struct HierarchyJson<'a> {
    schema_version: u32,
    kind: &'a str,
    model: &'a str,
    tier: &'a str,
    contextuality: TierFlags,
    vm_violation: TierFlags,
    convexity_violation: TierFlags,
    dutch_bookable: bool,
    classical_extension: bool,
}

impl HierarchyReport {
    /// Whether the three rows agree with one another.
    pub fn consistent(&self) -> bool {
        self.vm_violation == self.contextuality
            && self.convexity_violation == self.contextuality
            && self.dutch_bookable == self.contextuality.probabilistic
            && self.classical_extension != self.dutch_bookable
    }

    pub fn to_text(&self, name: &str, m: &EmpiricalModel) -> String {
        let sc = m.scenario();
        let mut out = format!("model: {name}\ntier: {}\n", self.verdict.tier);
        match &self.verdict.witness {
            TierWitness::Strong => {
                out.push_str("witness: no global section is consistent with the support\n")
            }
            TierWitness::Logical { context, section } => out.push_str(&format!(
                "witness: support section {} over {} has no consistent global extension\n",
                sc.format_section(section),
                sc.format_context(&sc.maximal_contexts()[*context])
            )),
            TierWitness::Probabilistic(cert) => out.push_str(&format!(
                "witness: infeasibility certificate with {} nonzero multipliers\n",
                cert.multipliers
                    .iter()
                    .filter(|y| **y != rational::zero())
                    .count()
            )),
            TierWitness::Noncontextual(d) => out.push_str(&format!(
                "witness: global distribution on {} sections\n",
                d.support(sc).len()
            )),
        }
        out.push('\n');
        out.push_str(&format!(
            "{:<28}{:<10}{:<10}{}\n",
            "", "strong", "logical", "probabilistic"
        ));
        for (label, f) in [
            ("contextual", self.contextuality),
            ("V_M subadditivity violated", self.vm_violation),
            ("V_M convexity violated", self.convexity_violation),
        ] {
            out.push_str(&format!(
                "{label:<28}{:<10}{:<10}{}\n",
                yes_no(f.strong),
                yes_no(f.logical),
                yes_no(f.probabilistic)
            ));
        }
        out.push('\n');
        out.push_str(&format!(
            "dutch-bookable: {}\n",
            yes_no(self.dutch_bookable)
        ));
        out.push_str(&format!(
            "classical extension: {}\n",
            yes_no(self.classical_extension)
        ));
        out
    }

    pub fn to_json(&self, name: &str) -> String {
        let doc = HierarchyJson {
            schema_version: SCHEMA_VERSION,
            kind: "hierarchy",
            model: name,
            tier: self.verdict.tier.name(),
            contextuality: self.contextuality,
            vm_violation: self.vm_violation,
            convexity_violation: self.convexity_violation,
            dutch_bookable: self.dutch_bookable,
            classical_extension: self.classical_extension,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

fn event_labels(r: &WpsRepresentation, e: &EventSet) -> String {
    let labels: Vec<String> = e.iter().map(|y| r.points()[y].label(r)).collect();
    format!("{{{}}}", labels.join(", "))
}

/// Every point with its payoff, worst (largest) first.
pub fn payoff_table(
    r: &WpsRepresentation,
    c: &DutchBookCertificate,
) -> Result<Vec<(String, Rational)>> {
    let mut rows: Vec<(String, Rational)> = payoffs(r, &c.stakes)?
        .into_iter()
        .enumerate()
        .map(|(y, p)| (r.points()[y].label(r), p))
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1));
    Ok(rows)
}

pub fn certificate_text(r: &WpsRepresentation, c: &DutchBookCertificate) -> Result<String> {
    let mut out = format!("stakes ({}):\n", c.stakes.len());
    for (e, s) in &c.stakes {
        out.push_str(&format!(
            "  {:>6} on {} (mu = {})\n",
            rational::format(s),
            event_labels(r, e),
            r.mu(e)?
        ));
    }
    out.push_str(&format!(
        "guaranteed loss: at least {}\n\npayoffs:\n",
        c.loss_bound
    ));
    for (label, p) in payoff_table(r, c)? {
        out.push_str(&format!("  {p:>6}  {label}\n"));
    }
    Ok(out)
}

pub fn witness_text(r: &WpsRepresentation, w: &ViolationWitness) -> Result<String> {
    let sc = r.model().scenario();
    let mut out = format!(
        "witness: {}\ncollection ({} events):\n",
        w.kind.name(),
        w.collection.len()
    );
    for e in &w.collection {
        out.push_str(&format!(
            "  mu = {:<6} {}\n",
            r.mu(e)?.to_string(),
            event_labels(r, e)
        ));
    }
    match &w.defect {
        Some(d) => out.push_str(&format!("defect: {d}\n")),
        None => {
            out.push_str("defect: depends on the extension; nonzero in every monotonic extension\n")
        }
    }
    match &w.support {
        WitnessSupport::None => {}
        WitnessSupport::Logical {
            context, section, ..
        } => out.push_str(&format!(
            "support section: {} over {}\n",
            sc.format_section(section),
            sc.format_context(&sc.maximal_contexts()[*context])
        )),
        WitnessSupport::Additivity(data) => {
            let f = &data.families[data.representative];
            out.push_str(&format!(
                "representative family: sections extending {} over {}\n\
                 families checked: {}\n",
                sc.format_section(&f.section),
                sc.format_context(&sc.maximal_contexts()[f.context]),
                data.families.len()
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbench::catalog;

    #[test]
    fn catalog_rows_agree() {
        for e in catalog::catalog() {
            let h = hierarchy_report(&e.model).unwrap();
            assert_eq!(h.verdict.tier, e.expected_tier, "{}", e.name);
            assert!(h.consistent(), "{}", e.name);
        }
    }

    #[test]
    fn bell_text_mentions_dutch_book() {
        let m = catalog::bell().unwrap();
        let text = hierarchy_report(&m).unwrap().to_text("bell", &m);
        assert!(text.contains("tier: probabilistic"));
        assert!(text.contains("dutch-bookable: yes"));
    }
}
