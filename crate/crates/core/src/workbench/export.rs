//! Bundle diagrams of empirical models and nerves of representations, as
//! Graphviz DOT text plus a JSON mirror.

use num_traits::Zero;
use serde::Serialize;

use crate::classifier::consistent_global_sections;
use crate::error::{Error, Result};
use crate::model::{restrict, Context, EmpiricalModel, Scenario, Section};
use crate::wps::WpsRepresentation;

use super::io::SCHEMA_VERSION;

/// Base graph, fibers, and support edges of a model.
/// A measurement with one of its outcomes.
pub type Vertex = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleDiagram {
    /// Pairs of measurements sharing a maximal context.
    pub base_edges: Vec<(usize, usize)>,
    /// For each maximal context, the pairwise restrictions of its support
    /// sections, as `((x, o), (x′, o′))` with `x < x′`.
    pub support_edges: Vec<(usize, Vertex, Vertex)>,
    /// Global sections consistent with the support.
    pub global_sections: Vec<Section>,
}

fn quote(text: &str) -> String {
    format!("\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
}

fn vertex(sc: &Scenario, x: usize, o: usize) -> String {
    format!("{}={}", sc.measurement_label(x), sc.outcome_label(o))
}

pub fn bundle_diagram(m: &EmpiricalModel) -> Result<BundleDiagram> {
    let sc = m.scenario();
    let mut base_edges = Vec::new();
    let mut support_edges = Vec::new();
    for (i, c) in sc.maximal_contexts().iter().enumerate() {
        let xs = c.measurements();
        for (k, &x) in xs.iter().enumerate() {
            for &y in &xs[k + 1..] {
                base_edges.push((x, y));
            }
        }
        for s in m.table(i).support(sc) {
            for (k, &x) in xs.iter().enumerate() {
                for &y in &xs[k + 1..] {
                    let e = (
                        i,
                        (x, s.get(x).expect("in domain")),
                        (y, s.get(y).expect("in domain")),
                    );
                    if !support_edges.contains(&e) {
                        support_edges.push(e);
                    }
                }
            }
        }
    }
    base_edges.sort_unstable();
    base_edges.dedup();
    Ok(BundleDiagram {
        base_edges,
        support_edges,
        global_sections: consistent_global_sections(m)?,
    })
}

#[derive(Serialize)]
struct BundleJson<'a> {
    schema_version: u32,
    kind: &'a str,
    measurements: &'a [String],
    outcomes: &'a [String],
    base_edges: Vec<[&'a str; 2]>,
    support_edges: Vec<SupportEdgeJson>,
    global_sections: Vec<String>,
}

#[derive(Serialize)]
struct SupportEdgeJson {
    context: String,
    from: String,
    to: String,
}

impl BundleDiagram {
    pub fn to_dot(&self, sc: &Scenario) -> String {
        let mut out = String::from("graph bundle {\n  node [shape=point];\n");
        out.push_str("  subgraph cluster_base {\n    label=\"base\";\n");
        for x in 0..sc.num_measurements() {
            out.push_str(&format!(
                "    {} [shape=circle, label={}];\n",
                quote(&format!("base:{}", sc.measurement_label(x))),
                quote(sc.measurement_label(x))
            ));
        }
        for (x, y) in &self.base_edges {
            out.push_str(&format!(
                "    {} -- {};\n",
                quote(&format!("base:{}", sc.measurement_label(*x))),
                quote(&format!("base:{}", sc.measurement_label(*y)))
            ));
        }
        out.push_str("  }\n");
        for x in 0..sc.num_measurements() {
            out.push_str(&format!(
                "  subgraph {} {{\n    label={};\n",
                quote(&format!("cluster_fiber_{}", sc.measurement_label(x))),
                quote(sc.measurement_label(x))
            ));
            for o in 0..sc.num_outcomes() {
                let v = vertex(sc, x, o);
                out.push_str(&format!("    {} [xlabel={}];\n", quote(&v), quote(&v)));
            }
            out.push_str("  }\n");
        }
        for (i, (x, o), (y, p)) in &self.support_edges {
            out.push_str(&format!(
                "  {} -- {} [context={}];\n",
                quote(&vertex(sc, *x, *o)),
                quote(&vertex(sc, *y, *p)),
                quote(&sc.format_context(&sc.maximal_contexts()[*i]))
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self, sc: &Scenario) -> String {
        let doc = BundleJson {
            schema_version: SCHEMA_VERSION,
            kind: "bundle",
            measurements: sc.measurements(),
            outcomes: sc.outcomes(),
            base_edges: self
                .base_edges
                .iter()
                .map(|(x, y)| [sc.measurement_label(*x), sc.measurement_label(*y)])
                .collect(),
            support_edges: self
                .support_edges
                .iter()
                .map(|(i, (x, o), (y, p))| SupportEdgeJson {
                    context: sc.format_context(&sc.maximal_contexts()[*i]),
                    from: vertex(sc, *x, *o),
                    to: vertex(sc, *y, *p),
                })
                .collect(),
            global_sections: self
                .global_sections
                .iter()
                .map(|g| sc.format_section(g))
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("bundle serializes");
        s.push('\n');
        s
    }
}

/// Simplicial complex on the single-measurement support events.
///
/// A partial assignment `s` spans a simplex when its image is non-empty
/// and every restriction of `s` to a maximal context has positive measure.
/// Simplices are listed by dimension, then in canonical section order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nerve {
    pub simplices: Vec<Section>,
}

pub fn nerve(r: &WpsRepresentation) -> Result<Nerve> {
    let sc = r.model().scenario();
    let n = sc.num_measurements();
    let partial = (sc.num_outcomes() as u128 + 1).checked_pow(n as u32);
    if partial.is_none_or(|p| p > sc.cap() as u128) {
        return Err(Error::CapExceeded {
            requested: partial.unwrap_or(u128::MAX),
            cap: sc.cap(),
        });
    }
    let mut domains: Vec<Context> = sc.global_context().subsets();
    domains.retain(|d| !d.is_empty());
    domains.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut simplices = Vec::new();
    for u in &domains {
        for s in sc.sections_over(u)? {
            if r.image(&s).is_empty() {
                continue;
            }
            let mut positive = true;
            for c in sc.maximal_contexts() {
                let face = u.intersection(c);
                if face.is_empty() {
                    continue;
                }
                let t = restrict(&s, &face)?;
                let e = r.image(&t);
                if r.sigma().get(&e).is_none_or(|v| v.is_zero()) {
                    positive = false;
                    break;
                }
            }
            if positive {
                simplices.push(s);
            }
        }
    }
    Ok(Nerve { simplices })
}

#[derive(Serialize)]
struct NerveJson<'a> {
    schema_version: u32,
    kind: &'a str,
    dimension: usize,
    simplices: Vec<Vec<String>>,
    maximal_simplices: Vec<Vec<String>>,
}

impl Nerve {
    pub fn contains(&self, s: &Section) -> bool {
        self.simplices.contains(s)
    }

    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.domain().len() - 1).max()
    }

    /// Simplices of the given dimension.
    pub fn of_dimension(&self, d: usize) -> impl Iterator<Item = &Section> {
        self.simplices
            .iter()
            .filter(move |s| s.domain().len() == d + 1)
    }

    /// Simplices that are faces of no larger simplex.
    pub fn maximal(&self) -> Vec<&Section> {
        self.simplices
            .iter()
            .filter(|s| {
                !self.simplices.iter().any(|t| {
                    t.domain().len() > s.domain().len()
                        && s.domain().is_subset(t.domain())
                        && s.agrees_with(t)
                })
            })
            .collect()
    }

    fn vertices_of(sc: &Scenario, s: &Section) -> Vec<String> {
        s.pairs().map(|(x, o)| vertex(sc, x, o)).collect()
    }

    /// The 1-skeleton as DOT, with higher simplices listed in comments.
    pub fn to_dot(&self, sc: &Scenario) -> String {
        let mut out = String::from("graph nerve {\n");
        for s in self.of_dimension(0) {
            out.push_str(&format!("  {};\n", quote(&Self::vertices_of(sc, s)[0])));
        }
        for s in self.of_dimension(1) {
            let v = Self::vertices_of(sc, s);
            out.push_str(&format!("  {} -- {};\n", quote(&v[0]), quote(&v[1])));
        }
        for s in self.simplices.iter().filter(|s| s.domain().len() > 2) {
            out.push_str(&format!(
                "  // {}-simplex {}\n",
                s.domain().len() - 1,
                sc.format_section(s)
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self, sc: &Scenario) -> String {
        let doc = NerveJson {
            schema_version: SCHEMA_VERSION,
            kind: "nerve",
            dimension: self.dimension().unwrap_or(0),
            simplices: self
                .simplices
                .iter()
                .map(|s| Self::vertices_of(sc, s))
                .collect(),
            maximal_simplices: self
                .maximal()
                .into_iter()
                .map(|s| Self::vertices_of(sc, s))
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("nerve serializes");
        s.push('\n');
        s
    }
}
