use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ctxhier_core::classifier::{require_tier, Tier};
use ctxhier_core::dutch_book::find_dutch_book;
use ctxhier_core::model::EmpiricalModel;
use ctxhier_core::violation::theorem1_witness;
use ctxhier_core::workbench::export::{bundle_diagram, nerve};
use ctxhier_core::workbench::io::{self, Document};
use ctxhier_core::workbench::quantum::{
    quantum_to_empirical, SnapSettings, DEFAULT_DENOMINATOR_BOUND, DEFAULT_SNAP_TOLERANCE,
};
use ctxhier_core::workbench::{catalog, report};
use ctxhier_core::wps::build_combinatorial_rep;
use ctxhier_core::{Error, Result};

const EXIT_VALIDATION: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ctxhier",
    version,
    about = "Contextuality tiers, event representations and Dutch Books"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest number of sections any enumeration may visit.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Tolerance for snapping Born-rule values to rationals.
    #[arg(long, global = true, default_value_t = DEFAULT_SNAP_TOLERANCE)]
    snap_tol: f64,
    /// Largest denominator allowed when snapping.
    #[arg(long, global = true, default_value_t = DEFAULT_DENOMINATOR_BOUND)]
    denom_bound: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportKind {
    Bundle,
    Nerve,
}

#[derive(clap::Args)]
struct ModelArg {
    /// Catalog name or path to a model or quantum experiment file.
    #[arg(value_name = "MODEL", required_unless_present = "model")]
    name: Option<String>,
    #[arg(long, value_name = "NAME|PATH", conflicts_with = "name")]
    model: Option<String>,
}

impl ModelArg {
    fn get(&self) -> &str {
        self.model
            .as_deref()
            .or(self.name.as_deref())
            .expect("clap requires one")
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tier verdict with the representation-side and betting-side rows.
    Classify {
        #[command(flatten)]
        model: ModelArg,
    },
    /// Subadditivity or additivity witness on the combinatorial representation.
    Witness {
        #[command(flatten)]
        model: ModelArg,
        /// Tier of the witness; defaults to the model's own tier.
        #[arg(long)]
        tier: Option<String>,
    },
    /// Stakes with a guaranteed loss, and the payoff at every point.
    Dutchbook {
        #[command(flatten)]
        model: ModelArg,
    },
    /// Re-checks a certificate, extension, report, model or experiment file.
    Verify { file: PathBuf },
    /// Bundle diagram of a model or nerve of its combinatorial representation.
    Export {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, value_enum, default_value_t = ExportKind::Bundle)]
        kind: ExportKind,
    },
    /// Names, tiers and notes of the built-in models.
    CatalogList,
}

impl Cli {
    fn snap(&self) -> SnapSettings {
        SnapSettings {
            tolerance: self.snap_tol,
            denominator_bound: self.denom_bound,
        }
    }

    fn load_model(&self, spec: &str) -> Result<(String, EmpiricalModel)> {
        let (name, m) = if catalog::NAMES.contains(&spec) {
            (spec.to_string(), catalog::entry(spec)?.model)
        } else {
            let path = Path::new(spec);
            if !path.exists() {
                return Err(Error::Domain(format!(
                    "`{spec}` is neither a catalog model ({}) nor a file",
                    catalog::NAMES.join(", ")
                )));
            }
            let m = match io::load_file(path)? {
                Document::Model(m) => m,
                Document::Quantum(q) => quantum_to_empirical(&q, self.snap())?,
                other => {
                    return Err(Error::Domain(format!(
                        "{spec} holds a {}, not a model",
                        other.kind()
                    )))
                }
            };
            (spec.to_string(), m)
        };
        Ok((
            name,
            match self.cap {
                Some(c) => m.with_cap(c),
                None => m,
            },
        ))
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

/// Ok(false) means the command ran but a check failed.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Classify { model } => {
            let (name, m) = cli.load_model(model.get())?;
            let h = report::hierarchy_report(&m)?;
            cli.emit(&match cli.format {
                Format::Text => h.to_text(&name, &m),
                Format::Structured => h.to_json(&name),
            })?;
            Ok(true)
        }
        Command::Witness { model, tier } => {
            let (_, m) = cli.load_model(model.get())?;
            let tier = match tier {
                Some(t) => {
                    Tier::parse(t).ok_or_else(|| Error::Domain(format!("unknown tier `{t}`")))?
                }
                None => require_tier(&m, Tier::Probabilistic)
                    .map(|v| v.tier)
                    .map_err(|_| {
                        Error::Domain("model is noncontextual; there is no witness".into())
                    })?,
            };
            let r = build_combinatorial_rep(&m)?;
            let w = theorem1_witness(&r, tier)?;
            cli.emit(&match cli.format {
                Format::Text => report::witness_text(&r, &w)?,
                Format::Structured => io::save(&Document::WitnessReport {
                    model: m,
                    witness: w,
                }),
            })?;
            Ok(true)
        }
        Command::Dutchbook { model } => {
            let (_, m) = cli.load_model(model.get())?;
            let r = build_combinatorial_rep(&m)?;
            match find_dutch_book(&r)? {
                Some(c) => cli.emit(&match cli.format {
                    Format::Text => report::certificate_text(&r, &c)?,
                    Format::Structured => io::save(&Document::Certificate {
                        model: m,
                        certificate: c,
                    }),
                })?,
                None => {
                    cli.emit("no Dutch Book: mu is a convex combination of atomic functionals\n")?
                }
            }
            Ok(true)
        }
        Command::Verify { file } => {
            let (ok, what) = io::verify_document(&io::load_file(file)?, cli.snap())?;
            println!("{}: {what}", if ok { "valid" } else { "INVALID" });
            Ok(ok)
        }
        Command::Export { model, kind } => {
            let (_, m) = cli.load_model(model.get())?;
            let sc = m.scenario();
            let text = match kind {
                ExportKind::Bundle => {
                    let b = bundle_diagram(&m)?;
                    match cli.format {
                        Format::Text => b.to_dot(sc),
                        Format::Structured => b.to_json(sc),
                    }
                }
                ExportKind::Nerve => {
                    let n = nerve(&build_combinatorial_rep(&m)?)?;
                    match cli.format {
                        Format::Text => n.to_dot(sc),
                        Format::Structured => n.to_json(sc),
                    }
                }
            };
            cli.emit(&text)?;
            Ok(true)
        }
        Command::CatalogList => {
            let mut out = String::new();
            for e in catalog::catalog() {
                out.push_str(&format!(
                    "{:<10}{:<16}{}\n",
                    e.name,
                    e.expected_tier.name(),
                    e.notes
                ));
            }
            cli.emit(&out)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VALIDATION),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_cap() {
                EXIT_CAP
            } else {
                EXIT_VALIDATION
            })
        }
    }
}
