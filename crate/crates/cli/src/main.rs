use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use msduality::algebra::{make_kleene_algebra, make_kleene_lattice, make_sugihara_algebra, make_sugihara_monoid};
use msduality::duality::{free_algebra, free_algebra_oracle, structure_power, AlterEgo, DualitySpec};
use msduality::hom::are_isomorphic;
use msduality::kleene::quotient_to_kleene_space;
use msduality::verify::{self, parse_range, Check, VerificationConfig};
use msduality::{dot, json, Error, Result};

#[derive(Parser)]
#[command(name = "msdual", version, about = "Multisorted natural dualities for Sugihara and Kleene algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a generating algebra as JSON.
    Algebra {
        /// `Z`, `W`, `kleene` or `kleene-lattice`.
        kind: String,
        /// Size of the chain for `Z` and `W`.
        k: Option<i64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Compute a free algebra as the dual of a power of the alter ego.
    Free {
        /// One of odd-alg, even-alg, odd-mon, even-mon, kleene, kleene-lattice.
        spec: String,
        /// Number of free generators (same as --s).
        generators: Option<usize>,
        #[arg(long, default_value_t = 2)]
        m: i64,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 4096)]
        guard_size: usize,
        /// Cross-check against the projection-generated subalgebra.
        #[arg(long)]
        oracle: bool,
        /// Print the whole algebra instead of a summary.
        #[arg(long)]
        json: bool,
    },
    /// Run verification checks; exits nonzero if any claim fails.
    Verify {
        /// Checks to run; all of them when omitted.
        checks: Vec<String>,
        /// Comma-separated spec tags; all six when omitted.
        #[arg(long, value_delimiter = ',')]
        spec: Vec<String>,
        #[arg(long, default_value = "2..3")]
        m: String,
        #[arg(long, default_value = "0..1")]
        s: String,
        #[arg(long, default_value_t = 4096)]
        guard_size: usize,
        /// Directory for report.json and summary.txt.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the JSON report instead of the summary.
        #[arg(long)]
        json: bool,
    },
    /// Write a diagram or encoding of an alter ego, a dual or a Kleene space.
    Export {
        what: ExportTarget,
        #[arg(long, default_value = "kleene")]
        spec: String,
        #[arg(long, default_value_t = 2)]
        m: i64,
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        /// Output file; stdout when omitted.
        #[arg(long)]
        path: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportTarget {
    /// The alter ego itself.
    Ego,
    /// The `s`-th power of the alter ego, the dual of the free algebra.
    Power,
    /// The Kleene space obtained from the power (Kleene specs only).
    KleeneSpace,
    /// The structure with no points.
    Empty,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::InvalidParameter(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Algebra { kind, k, format } => {
            let need_k = || k.ok_or_else(|| Error::InvalidParameter(format!("`{kind}` needs a size")));
            let a = match kind.as_str() {
                "Z" | "z" => make_sugihara_algebra(need_k()?)?,
                "W" | "w" => make_sugihara_monoid(need_k()?)?,
                "kleene" => make_kleene_algebra(),
                "kleene-lattice" => make_kleene_lattice(),
                other => return Err(Error::InvalidParameter(format!("unknown algebra kind `{other}`"))),
            };
            let text = match format {
                Format::Json => json::to_pretty(&json::algebra_to_json(&a)),
                Format::Dot => dot::algebra_to_dot(&a),
            };
            emit(&text, None)?;
            Ok(true)
        }
        Command::Free { spec, generators, m, s, guard_size, oracle, json: full } => {
            let s = s.or(generators).unwrap_or(1);
            let ego = AlterEgo::build(DualitySpec::from_tag(&spec, m)?)?;
            let free = free_algebra(&ego, s, guard_size)?;
            let mut out = json!({ "spec": ego.spec.to_string(), "s": s, "size": free.algebra.size() });
            let mut ok = true;
            if oracle {
                let o = free_algebra_oracle(&ego.sorts, s, guard_size.saturating_mul(64))?;
                ok = are_isomorphic(&free.algebra, &o)?;
                out["oracle_size"] = json!(o.size());
                out["agrees"] = json!(ok);
            }
            if full {
                out["algebra"] = json::algebra_to_json(&free.algebra);
            }
            emit(&json::to_pretty(&out), None)?;
            Ok(ok)
        }
        Command::Verify { checks, spec, m, s, guard_size, out, json: as_json } => {
            let mut config = VerificationConfig {
                m_range: parse_range(&m)?,
                s_range: parse_range(&s)?,
                guard_size,
                out: out.clone(),
                ..Default::default()
            };
            if !spec.is_empty() {
                config.specs = spec;
            }
            if !checks.is_empty() {
                config.checks = checks.iter().map(|c| c.parse::<Check>()).collect::<Result<_>>()?;
            }
            let report = verify::run(&config)?;
            let report_json = json::to_pretty(&report.to_json());
            let summary = report.summary();
            if let Some(dir) = &out {
                let io = |e: std::io::Error| Error::InvalidParameter(format!("{}: {e}", dir.display()));
                fs::create_dir_all(dir).map_err(io)?;
                fs::write(dir.join("report.json"), &report_json).map_err(io)?;
                fs::write(dir.join("summary.txt"), &summary).map_err(io)?;
            }
            emit(if as_json { &report_json } else { &summary }, None)?;
            Ok(report.ok())
        }
        Command::Export { what, spec, m, s, format, path } => {
            let ego = AlterEgo::build(DualitySpec::from_tag(&spec, m)?)?;
            let text = match what {
                ExportTarget::KleeneSpace => {
                    if !ego.spec.is_kleene() {
                        return Err(Error::InvalidParameter("Kleene spaces come from the Kleene specs".into()));
                    }
                    let q = quotient_to_kleene_space(&structure_power(&ego, s)?)?;
                    match format {
                        Format::Dot => dot::kleene_space_to_dot(&q.space, &format!("kleene-space-{s}")),
                        Format::Json => json::to_pretty(&json::kleene_space_to_json(&q.space)),
                    }
                }
                other => {
                    let x = match other {
                        ExportTarget::Ego => ego.structure.clone(),
                        ExportTarget::Power => structure_power(&ego, s)?,
                        _ => ego.structure.empty_like("empty"),
                    };
                    match format {
                        Format::Dot => dot::structure_to_dot(&x),
                        Format::Json => json::to_pretty(&json::structure_to_json(&x)),
                    }
                }
            };
            emit(&text, path.as_ref())?;
            Ok(true)
        }
    }
}
