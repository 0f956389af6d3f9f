//! Versioned JSON documents for models, certificates, extensions, reports
//! and quantum experiments.
//!
//! Every document carries `schema_version` and `kind`. Probabilities are
//! `"p/q"` strings. Sections are objects from measurement label to outcome
//! label. Events are lists of point indices of the combinatorial
//! representation of the embedded model, whose points are the global
//! sections in canonical order.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classifier::{
    verify_verdict, Constraint, GlobalCertificate, Tier, TierVerdict, TierWitness,
};
use crate::dutch_book::{verify_certificate, DutchBookCertificate};
use crate::error::{Error, Result};
use crate::model::{Context, Distribution, EmpiricalModel, Scenario, Section};
use crate::rational::{self, Rational};
use crate::violation::{
    verify_extension, verify_witness, AdditivityData, Extension, ExtensionKind, MarginalFamily,
    ViolationWitness, WitnessKind, WitnessSupport,
};
use crate::wps::{build_combinatorial_rep, EventSet};

use super::quantum::{quantum_to_empirical, LabelledProjector, QuantumExperiment, SnapSettings};

pub const SCHEMA_VERSION: u32 = 1;

/// A loaded document.
#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Model(EmpiricalModel),
    Certificate {
        model: EmpiricalModel,
        certificate: DutchBookCertificate,
    },
    Extension {
        model: EmpiricalModel,
        kind: ExtensionKind,
        extension: Extension,
    },
    TierReport {
        model: EmpiricalModel,
        verdict: TierVerdict,
    },
    WitnessReport {
        model: EmpiricalModel,
        witness: ViolationWitness,
    },
    Quantum(QuantumExperiment),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Model(_) => "model",
            Document::Certificate { .. } => "certificate",
            Document::Extension { .. } => "extension",
            Document::TierReport { .. } => "tier_report",
            Document::WitnessReport { .. } => "witness_report",
            Document::Quantum(_) => "quantum",
        }
    }
}

type SectionDto = BTreeMap<String, String>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDto {
    measurements: Vec<String>,
    outcomes: Vec<String>,
    maximal_contexts: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightDto {
    section: SectionDto,
    p: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDto {
    context: Vec<String>,
    weights: Vec<WeightDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDto {
    scenario: ScenarioDto,
    tables: Vec<TableDto>,
}

#[derive(Deserialize)]
struct Header {
    schema_version: u32,
    kind: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    schema_version: u32,
    kind: String,
    scenario: ScenarioDto,
    tables: Vec<TableDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StakeDto {
    event: Vec<usize>,
    stake: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateFile {
    schema_version: u32,
    kind: String,
    model: ModelDto,
    stakes: Vec<StakeDto>,
    loss_bound: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtensionFile {
    schema_version: u32,
    kind: String,
    model: ModelDto,
    /// `monotonic` or `classical`.
    property: String,
    atoms: Vec<Vec<usize>>,
    /// One value per union of atoms, indexed by bitmask over `atoms`.
    values: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintDto {
    /// Absent for the normalization row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    context: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    section: Option<SectionDto>,
    multiplier: String,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum TierWitnessDto {
    Strong,
    Logical {
        context: Vec<String>,
        section: SectionDto,
    },
    Probabilistic {
        constraints: Vec<ConstraintDto>,
    },
    Noncontextual {
        weights: Vec<WeightDto>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TierReportFile {
    schema_version: u32,
    kind: String,
    model: ModelDto,
    tier: String,
    witness: TierWitnessDto,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberDto {
    section: SectionDto,
    event: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDto {
    context: Vec<String>,
    section: SectionDto,
    event: Vec<usize>,
    members: Vec<MemberDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum SupportDto {
    None,
    Logical {
        context: Vec<String>,
        section: SectionDto,
        event: Vec<usize>,
    },
    Additivity {
        z: Vec<usize>,
        families: Vec<FamilyDto>,
        representative: usize,
        certificate: Vec<ConstraintDto>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessFile {
    schema_version: u32,
    kind: String,
    model: ModelDto,
    witness_kind: String,
    collection: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    defect: Option<String>,
    support: SupportDto,
}

/// A complex number as `[re, im]`, each a decimal or `p/q` string.
type ComplexDto = [String; 2];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectorDto {
    label: String,
    matrix: Vec<Vec<ComplexDto>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuantumFile {
    schema_version: u32,
    kind: String,
    dimension: usize,
    state: Vec<ComplexDto>,
    projectors: Vec<ProjectorDto>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::schema(
        format!("line {} column {}", e.line(), e.column()),
        e.to_string(),
    )
}

/// Prefixes the location of schema errors raised while converting `what`.
fn at<T>(location: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Schema {
            location: inner,
            message,
        } if inner == "rational" => Error::Schema {
            location: location.to_string(),
            message,
        },
        Error::Schema {
            location: inner,
            message,
        } => Error::Schema {
            location: format!("{location}.{inner}"),
            message,
        },
        Error::Signaling(_) | Error::CapExceeded { .. } => e,
        other => Error::schema(location, other.to_string()),
    })
}

// ---- conversions to DTOs ----

fn section_dto(sc: &Scenario, s: &Section) -> SectionDto {
    s.pairs()
        .map(|(x, o)| {
            (
                sc.measurement_label(x).to_string(),
                sc.outcome_label(o).to_string(),
            )
        })
        .collect()
}

fn context_dto(sc: &Scenario, c: &Context) -> Vec<String> {
    c.measurements()
        .iter()
        .map(|&x| sc.measurement_label(x).to_string())
        .collect()
}

fn event_dto(e: &EventSet) -> Vec<usize> {
    e.points()
}

fn weights_dto(sc: &Scenario, d: &Distribution) -> Vec<WeightDto> {
    d.support(sc)
        .iter()
        .map(|s| WeightDto {
            section: section_dto(sc, s),
            p: rational::format(&d.weight(sc, s)),
        })
        .collect()
}

fn model_dto(m: &EmpiricalModel) -> ModelDto {
    let sc = m.scenario();
    ModelDto {
        scenario: ScenarioDto {
            measurements: sc.measurements().to_vec(),
            outcomes: sc.outcomes().to_vec(),
            maximal_contexts: sc
                .maximal_contexts()
                .iter()
                .map(|c| context_dto(sc, c))
                .collect(),
        },
        tables: m
            .tables()
            .iter()
            .map(|t| TableDto {
                context: context_dto(sc, t.domain()),
                weights: weights_dto(sc, t),
            })
            .collect(),
    }
}

fn constraints_dto(sc: &Scenario, cert: &GlobalCertificate) -> Vec<ConstraintDto> {
    cert.constraints
        .iter()
        .zip(&cert.multipliers)
        .map(|(c, y)| match c {
            Constraint::Total => ConstraintDto {
                context: None,
                section: None,
                multiplier: rational::format(y),
            },
            Constraint::Marginal { context, section } => ConstraintDto {
                context: Some(context_dto(sc, &sc.maximal_contexts()[*context])),
                section: Some(section_dto(sc, section)),
                multiplier: rational::format(y),
            },
        })
        .collect()
}

// ---- conversions from DTOs ----

fn parse_rational(location: &str, text: &str) -> Result<Rational> {
    at(location, rational::parse(text))
}

fn parse_section(sc: &Scenario, location: &str, s: &SectionDto) -> Result<Section> {
    let pairs: Vec<(&str, &str)> = s.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    at(location, sc.section(&pairs))
}

fn parse_context(sc: &Scenario, location: &str, labels: &[String]) -> Result<Context> {
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    at(location, sc.context(&refs))
}

fn parse_maximal(sc: &Scenario, location: &str, labels: &[String]) -> Result<usize> {
    let c = parse_context(sc, location, labels)?;
    sc.maximal_contexts()
        .iter()
        .position(|m| *m == c)
        .ok_or_else(|| {
            Error::schema(
                location,
                format!("{} is not a maximal context", sc.format_context(&c)),
            )
        })
}

fn parse_event(universe: usize, location: &str, points: &[usize]) -> Result<EventSet> {
    if let Some(p) = points.iter().find(|&&p| p >= universe) {
        return Err(Error::schema(
            location,
            format!("point {p} is out of range (the sample space has {universe} points)"),
        ));
    }
    Ok(EventSet::from_points(universe, points.iter().copied()))
}

fn parse_weights(
    sc: &Scenario,
    location: &str,
    domain: &Context,
    weights: &[WeightDto],
) -> Result<Distribution> {
    let n = at(location, sc.num_sections(domain))?;
    let mut values = vec![rational::zero(); n];
    let mut seen = vec![false; n];
    for (k, w) in weights.iter().enumerate() {
        let loc = format!("{location}[{k}]");
        let s = parse_section(sc, &format!("{loc}.section"), &w.section)?;
        if s.domain() != domain {
            return Err(Error::schema(
                format!("{loc}.section"),
                format!("section is not over {}", sc.format_context(domain)),
            ));
        }
        let i = sc.section_index(&s);
        if seen[i] {
            return Err(Error::schema(
                format!("{loc}.section"),
                "section listed twice",
            ));
        }
        seen[i] = true;
        values[i] = parse_rational(&format!("{loc}.p"), &w.p)?;
    }
    at(location, Distribution::new(sc, domain.clone(), values))
}

fn parse_model(prefix: &str, dto: &ModelDto) -> Result<EmpiricalModel> {
    let s = &dto.scenario;
    let sc = at(
        &format!("{prefix}scenario"),
        Scenario::new(
            s.measurements.clone(),
            s.outcomes.clone(),
            s.maximal_contexts.clone(),
        ),
    )?;
    let mut tables: Vec<Option<Distribution>> = vec![None; sc.maximal_contexts().len()];
    for (k, t) in dto.tables.iter().enumerate() {
        let loc = format!("{prefix}tables[{k}]");
        let i = parse_maximal(&sc, &format!("{loc}.context"), &t.context)?;
        if tables[i].is_some() {
            return Err(Error::schema(
                format!("{loc}.context"),
                "context has two tables",
            ));
        }
        let c = sc.maximal_contexts()[i].clone();
        tables[i] = Some(parse_weights(
            &sc,
            &format!("{loc}.weights"),
            &c,
            &t.weights,
        )?);
    }
    let tables = tables
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            t.ok_or_else(|| {
                Error::schema(
                    format!("{prefix}tables"),
                    format!(
                        "no table for {}",
                        sc.format_context(&sc.maximal_contexts()[i])
                    ),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    EmpiricalModel::new(sc, tables)
}

fn num_points(m: &EmpiricalModel) -> Result<usize> {
    let sc = m.scenario();
    sc.num_sections(&sc.global_context())
}

fn parse_constraints(
    sc: &Scenario,
    location: &str,
    rows: &[ConstraintDto],
) -> Result<GlobalCertificate> {
    let mut constraints = Vec::new();
    let mut multipliers = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        let loc = format!("{location}[{k}]");
        constraints.push(match (&row.context, &row.section) {
            (None, None) => Constraint::Total,
            (Some(c), Some(s)) => {
                let context = parse_maximal(sc, &format!("{loc}.context"), c)?;
                let section = parse_section(sc, &format!("{loc}.section"), s)?;
                if section.domain() != &sc.maximal_contexts()[context] {
                    return Err(Error::schema(
                        format!("{loc}.section"),
                        "section is not over the context",
                    ));
                }
                Constraint::Marginal { context, section }
            }
            _ => {
                return Err(Error::schema(
                    loc,
                    "context and section must appear together",
                ));
            }
        });
        multipliers.push(parse_rational(
            &format!("{loc}.multiplier"),
            &row.multiplier,
        )?);
    }
    Ok(GlobalCertificate {
        constraints,
        multipliers,
    })
}

fn parse_complex(location: &str, c: &ComplexDto) -> Result<Complex64> {
    let part = |k: usize| -> Result<f64> {
        let t = c[k].trim();
        if let Ok(v) = t.parse::<f64>() {
            if v.is_finite() {
                return Ok(v);
            }
        }
        rational::parse(t)
            .map(|r| rational::to_f64(&r))
            .map_err(|_| {
                Error::schema(format!("{location}[{k}]"), format!("`{t}` is not a number"))
            })
    };
    Ok(Complex64::new(part(0)?, part(1)?))
}

fn complex_dto(z: &Complex64) -> ComplexDto {
    [format!("{:?}", z.re), format!("{:?}", z.im)]
}

fn parse_quantum(f: &QuantumFile) -> Result<QuantumExperiment> {
    let d = f.dimension;
    let state = f
        .state
        .iter()
        .enumerate()
        .map(|(k, c)| parse_complex(&format!("state[{k}]"), c))
        .collect::<Result<Vec<_>>>()?;
    let mut projectors = Vec::new();
    for (k, p) in f.projectors.iter().enumerate() {
        let loc = format!("projectors[{k}].matrix");
        if p.matrix.len() != d || p.matrix.iter().any(|row| row.len() != d) {
            return Err(Error::schema(&loc, format!("matrix is not {d}x{d}")));
        }
        let mut entries = Vec::with_capacity(d * d);
        for (i, row) in p.matrix.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                entries.push(parse_complex(&format!("{loc}[{i}][{j}]"), c)?);
            }
        }
        projectors.push(LabelledProjector {
            label: p.label.clone(),
            matrix: nalgebra::DMatrix::from_row_slice(d, d, &entries),
        });
    }
    let q = QuantumExperiment {
        dimension: d,
        state,
        projectors,
    };
    at("experiment", q.validate())?;
    Ok(q)
}

fn parse_witness_kind(text: &str) -> Result<WitnessKind> {
    [
        WitnessKind::MaximalSubadditivity,
        WitnessKind::Subadditivity,
        WitnessKind::MonotonicAdditivity,
    ]
    .into_iter()
    .find(|k| k.name() == text)
    .ok_or_else(|| Error::schema("witness_kind", format!("unknown witness kind `{text}`")))
}

fn extension_kind_name(k: ExtensionKind) -> &'static str {
    match k {
        ExtensionKind::Monotonic => "monotonic",
        ExtensionKind::Classical => "classical",
    }
}

fn from_str<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(json_error)
}

/// Parses any document, dispatching on its `kind`.
pub fn load(text: &str) -> Result<Document> {
    let header: Header = from_str(text)?;
    if header.schema_version != SCHEMA_VERSION {
        return Err(Error::schema(
            "schema_version",
            format!(
                "unsupported version {} (expected {SCHEMA_VERSION})",
                header.schema_version
            ),
        ));
    }
    Ok(match header.kind.as_str() {
        "model" => {
            let f: ModelFile = from_str(text)?;
            Document::Model(parse_model(
                "",
                &ModelDto {
                    scenario: f.scenario,
                    tables: f.tables,
                },
            )?)
        }
        "certificate" => {
            let f: CertificateFile = from_str(text)?;
            let model = parse_model("model.", &f.model)?;
            let n = num_points(&model)?;
            let stakes = f
                .stakes
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    Ok((
                        parse_event(n, &format!("stakes[{k}].event"), &s.event)?,
                        parse_rational(&format!("stakes[{k}].stake"), &s.stake)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            Document::Certificate {
                model,
                certificate: DutchBookCertificate {
                    stakes,
                    loss_bound: parse_rational("loss_bound", &f.loss_bound)?,
                },
            }
        }
        "extension" => {
            let f: ExtensionFile = from_str(text)?;
            let model = parse_model("model.", &f.model)?;
            let n = num_points(&model)?;
            let kind = match f.property.as_str() {
                "monotonic" => ExtensionKind::Monotonic,
                "classical" => ExtensionKind::Classical,
                other => {
                    return Err(Error::schema(
                        "property",
                        format!("expected `monotonic` or `classical`, found `{other}`"),
                    ))
                }
            };
            let atoms = f
                .atoms
                .iter()
                .enumerate()
                .map(|(k, a)| parse_event(n, &format!("atoms[{k}]"), a))
                .collect::<Result<Vec<_>>>()?;
            let values = f
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| parse_rational(&format!("values[{k}]"), v))
                .collect::<Result<Vec<_>>>()?;
            Document::Extension {
                model,
                kind,
                extension: at("values", Extension::new(atoms, values))?,
            }
        }
        "tier_report" => {
            let f: TierReportFile = from_str(text)?;
            let model = parse_model("model.", &f.model)?;
            let sc = model.scenario();
            let tier = Tier::parse(&f.tier)
                .ok_or_else(|| Error::schema("tier", format!("unknown tier `{}`", f.tier)))?;
            let witness = match &f.witness {
                TierWitnessDto::Strong => TierWitness::Strong,
                TierWitnessDto::Logical { context, section } => TierWitness::Logical {
                    context: parse_maximal(sc, "witness.context", context)?,
                    section: parse_section(sc, "witness.section", section)?,
                },
                TierWitnessDto::Probabilistic { constraints } => TierWitness::Probabilistic(
                    parse_constraints(sc, "witness.constraints", constraints)?,
                ),
                TierWitnessDto::Noncontextual { weights } => TierWitness::Noncontextual(
                    parse_weights(sc, "witness.weights", &sc.global_context(), weights)?,
                ),
            };
            Document::TierReport {
                model,
                verdict: TierVerdict { tier, witness },
            }
        }
        "witness_report" => {
            let f: WitnessFile = from_str(text)?;
            let model = parse_model("model.", &f.model)?;
            let sc = model.scenario();
            let n = num_points(&model)?;
            let collection = f
                .collection
                .iter()
                .enumerate()
                .map(|(k, e)| parse_event(n, &format!("collection[{k}]"), e))
                .collect::<Result<Vec<_>>>()?;
            let support = match &f.support {
                SupportDto::None => WitnessSupport::None,
                SupportDto::Logical {
                    context,
                    section,
                    event,
                } => WitnessSupport::Logical {
                    context: parse_maximal(sc, "support.context", context)?,
                    section: parse_section(sc, "support.section", section)?,
                    event: parse_event(n, "support.event", event)?,
                },
                SupportDto::Additivity {
                    z,
                    families,
                    representative,
                    certificate,
                } => {
                    if *representative >= families.len() {
                        return Err(Error::schema(
                            "support.representative",
                            "index out of range",
                        ));
                    }
                    let families = families
                        .iter()
                        .enumerate()
                        .map(|(k, fam)| {
                            let loc = format!("support.families[{k}]");
                            Ok(MarginalFamily {
                                context: parse_maximal(
                                    sc,
                                    &format!("{loc}.context"),
                                    &fam.context,
                                )?,
                                section: parse_section(
                                    sc,
                                    &format!("{loc}.section"),
                                    &fam.section,
                                )?,
                                event: parse_event(n, &format!("{loc}.event"), &fam.event)?,
                                members: fam
                                    .members
                                    .iter()
                                    .enumerate()
                                    .map(|(j, m)| {
                                        let mloc = format!("{loc}.members[{j}]");
                                        Ok((
                                            parse_section(
                                                sc,
                                                &format!("{mloc}.section"),
                                                &m.section,
                                            )?,
                                            parse_event(n, &format!("{mloc}.event"), &m.event)?,
                                        ))
                                    })
                                    .collect::<Result<Vec<_>>>()?,
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    WitnessSupport::Additivity(AdditivityData {
                        z: parse_event(n, "support.z", z)?,
                        families,
                        representative: *representative,
                        certificate: parse_constraints(sc, "support.certificate", certificate)?,
                    })
                }
            };
            Document::WitnessReport {
                witness: ViolationWitness {
                    kind: parse_witness_kind(&f.witness_kind)?,
                    collection,
                    defect: f
                        .defect
                        .as_deref()
                        .map(|d| parse_rational("defect", d))
                        .transpose()?,
                    support,
                },
                model,
            }
        }
        "quantum" => Document::Quantum(parse_quantum(&from_str::<QuantumFile>(text)?)?),
        other => {
            return Err(Error::schema(
                "kind",
                format!(
                    "unknown kind `{other}` (expected model, certificate, extension, \
                     tier_report, witness_report or quantum)"
                ),
            ))
        }
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

/// Serializes a document as pretty-printed JSON with a trailing newline.
pub fn save(doc: &Document) -> String {
    let kind = doc.kind().to_string();
    let schema_version = SCHEMA_VERSION;
    match doc {
        Document::Model(m) => {
            let d = model_dto(m);
            to_json(&ModelFile {
                schema_version,
                kind,
                scenario: d.scenario,
                tables: d.tables,
            })
        }
        Document::Certificate { model, certificate } => to_json(&CertificateFile {
            schema_version,
            kind,
            model: model_dto(model),
            stakes: certificate
                .stakes
                .iter()
                .map(|(e, s)| StakeDto {
                    event: event_dto(e),
                    stake: rational::format(s),
                })
                .collect(),
            loss_bound: rational::format(&certificate.loss_bound),
        }),
        Document::Extension {
            model,
            kind: property,
            extension,
        } => to_json(&ExtensionFile {
            schema_version,
            kind,
            model: model_dto(model),
            property: extension_kind_name(*property).into(),
            atoms: extension.atoms().iter().map(event_dto).collect(),
            values: extension.values().iter().map(rational::format).collect(),
        }),
        Document::TierReport { model, verdict } => {
            let sc = model.scenario();
            let witness = match &verdict.witness {
                TierWitness::Strong => TierWitnessDto::Strong,
                TierWitness::Logical { context, section } => TierWitnessDto::Logical {
                    context: context_dto(sc, &sc.maximal_contexts()[*context]),
                    section: section_dto(sc, section),
                },
                TierWitness::Probabilistic(cert) => TierWitnessDto::Probabilistic {
                    constraints: constraints_dto(sc, cert),
                },
                TierWitness::Noncontextual(d) => TierWitnessDto::Noncontextual {
                    weights: weights_dto(sc, d),
                },
            };
            to_json(&TierReportFile {
                schema_version,
                kind,
                model: model_dto(model),
                tier: verdict.tier.name().into(),
                witness,
            })
        }
        Document::WitnessReport { model, witness } => {
            let sc = model.scenario();
            let support = match &witness.support {
                WitnessSupport::None => SupportDto::None,
                WitnessSupport::Logical {
                    context,
                    section,
                    event,
                } => SupportDto::Logical {
                    context: context_dto(sc, &sc.maximal_contexts()[*context]),
                    section: section_dto(sc, section),
                    event: event_dto(event),
                },
                WitnessSupport::Additivity(data) => SupportDto::Additivity {
                    z: event_dto(&data.z),
                    families: data
                        .families
                        .iter()
                        .map(|f| FamilyDto {
                            context: context_dto(sc, &sc.maximal_contexts()[f.context]),
                            section: section_dto(sc, &f.section),
                            event: event_dto(&f.event),
                            members: f
                                .members
                                .iter()
                                .map(|(s, e)| MemberDto {
                                    section: section_dto(sc, s),
                                    event: event_dto(e),
                                })
                                .collect(),
                        })
                        .collect(),
                    representative: data.representative,
                    certificate: constraints_dto(sc, &data.certificate),
                },
            };
            to_json(&WitnessFile {
                schema_version,
                kind,
                model: model_dto(model),
                witness_kind: witness.kind.name().into(),
                collection: witness.collection.iter().map(event_dto).collect(),
                defect: witness.defect.as_ref().map(rational::format),
                support,
            })
        }
        Document::Quantum(q) => to_json(&QuantumFile {
            schema_version,
            kind,
            dimension: q.dimension,
            state: q.state.iter().map(complex_dto).collect(),
            projectors: q
                .projectors
                .iter()
                .map(|p| ProjectorDto {
                    label: p.label.clone(),
                    matrix: p
                        .matrix
                        .row_iter()
                        .map(|row| row.iter().map(complex_dto).collect())
                        .collect(),
                })
                .collect(),
        }),
    }
}

pub fn load_file(path: &Path) -> Result<Document> {
    load(&std::fs::read_to_string(path)?)
}

pub fn save_file(path: &Path, doc: &Document) -> Result<()> {
    std::fs::write(path, save(doc))?;
    Ok(())
}

pub fn model_to_json(m: &EmpiricalModel) -> String {
    save(&Document::Model(m.clone()))
}

/// Loads a model document.
pub fn model_from_json(text: &str) -> Result<EmpiricalModel> {
    match load(text)? {
        Document::Model(m) => Ok(m),
        other => Err(Error::schema(
            "kind",
            format!("expected a model, found {}", other.kind()),
        )),
    }
}

/// Re-checks a loaded document: certificates, extensions and reports
/// against the combinatorial representation of their model, experiments by
/// converting them. Returns whether the check passed and a one-line
/// description.
pub fn verify_document(doc: &Document, snap: SnapSettings) -> Result<(bool, String)> {
    Ok(match doc {
        Document::Model(m) => (true, format!("model with {} contexts", m.tables().len())),
        Document::Quantum(q) => {
            let m = quantum_to_empirical(q, snap)?;
            (
                true,
                format!("experiment yielding {} contexts", m.tables().len()),
            )
        }
        Document::Certificate { model, certificate } => {
            let r = build_combinatorial_rep(model)?;
            (verify_certificate(&r, certificate)?, "certificate".into())
        }
        Document::Extension {
            model,
            kind,
            extension,
        } => {
            let r = build_combinatorial_rep(model)?;
            let v = verify_extension(&r, extension, *kind)?;
            let what = match &v.violation {
                Some(d) => format!("{} extension: {d}", extension_kind_name(*kind)),
                None => format!("{} extension", extension_kind_name(*kind)),
            };
            (v.passed(), what)
        }
        Document::TierReport { model, verdict } => (
            verify_verdict(model, verdict)?,
            format!("{} tier report", verdict.tier),
        ),
        Document::WitnessReport { model, witness } => {
            let r = build_combinatorial_rep(model)?;
            (
                verify_witness(&r, witness)?,
                format!("{} witness", witness.kind.name()),
            )
        }
    })
}
