//! Command-line entry point for the measure-expansion laboratory.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use haarlab::catalog_check::catalog_check;
use haarlab::error::Error;
use haarlab::grid::GridSet;
use haarlab::group::catalog;
use haarlab::quotient::QuotientMap;
use haarlab_cli::csvout::{records_csv, summary, sweep_csv};
use haarlab_cli::runner::{run_scenario, run_scenario_at};
use haarlab_cli::scenario::Scenario;
use haarlab_cli::CertificateFile;

#[derive(Parser)]
#[command(name = "haarlab", version, about = "Measure-expansion laboratory on concrete locally compact groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a scenario file and emit records.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory for records.csv and summary.txt.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for independent analyses.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Repeat a scenario across refinement levels and emit a convergence table.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Re-verify a serialized certificate against set files.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        set_a: PathBuf,
        #[arg(long)]
        set_b: Option<PathBuf>,
    },
    /// Print the group catalog with metadata and self-check status.
    Catalog,
    /// Emit one scenario set as a grid-set file.
    Gen {
        #[arg(long)]
        scenario: PathBuf,
        /// Set name inside the scenario.
        #[arg(long)]
        set: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a covering certificate for two scenario sets.
    Cover {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "left")]
        direction: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parse(_) | Error::UnknownGroup(_) | Error::MalformedCertificate(_) => 2,
                Error::GridOverflow { .. }
                | Error::HypothesisNotMet { .. }
                | Error::EpsilonTooLarge { .. }
                | Error::NonUnimodular(..) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<Scenario, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut sc = Scenario::from_toml(&text)?;
    if let Some(s) = seed {
        sc.seed = s;
    }
    Ok(sc)
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    std::fs::write(&p, content).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Run { scenario, out, seed, jobs } => {
            let sc = load_scenario(&scenario, seed)?;
            let report = run_scenario(&sc, jobs.max(1))?;
            let text = summary(&report);
            print!("{text}");
            if let Some(dir) = out {
                write_out(&dir, "records.csv", &records_csv(&report.records))?;
                write_out(&dir, "summary.txt", &text)?;
            }
            Ok(ExitCode::from(report.exit_code() as u8))
        }
        Cmd::Sweep { scenario, levels, out, seed, jobs } => {
            if levels < 2 {
                return Err(Error::Parse("sweep requires at least 2 levels".into()));
            }
            let sc = load_scenario(&scenario, seed)?;
            let mut rows = Vec::new();
            let mut worst = 0u8;
            for level in 0..levels {
                let res = sc.resolution << level;
                let report = run_scenario_at(&sc, res, jobs.max(1))?;
                println!(
                    "level {level} (resolution {res}): {} pass, {} fail, {} unresolved, {} refused",
                    report.pass, report.fail, report.unresolved, report.refused
                );
                worst = worst.max(report.exit_code() as u8);
                for r in report.records {
                    rows.push((level, res, r));
                }
            }
            if let Some(dir) = out {
                write_out(&dir, "sweep.csv", &sweep_csv(&rows))?;
            }
            Ok(ExitCode::from(worst))
        }
        Cmd::Verify { cert, set_a, set_b } => {
            let text = std::fs::read_to_string(&cert)
                .map_err(|e| Error::Parse(format!("{}: {e}", cert.display())))?;
            let cf: CertificateFile = serde_json::from_str(&text)
                .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
            let a = load_set(&set_a)?;
            let ok = match cf {
                CertificateFile::Covering(c) => {
                    let b_path = set_b.ok_or_else(|| {
                        Error::Parse("covering certificates need --set-b".into())
                    })?;
                    let b = load_set(&b_path)?;
                    haarlab::cover::verify_cover(&a, &b, &c)?
                }
                CertificateFile::Progression(p) => {
                    let q = QuotientMap::new(*a.group())?;
                    haarlab::recovery::verify_progression_cover(&a, &p, &q)?
                }
            };
            println!("{ok}");
            Ok(ExitCode::from(if ok { 0 } else { 1 }))
        }
        Cmd::Catalog => {
            println!("name      dim  ndim  hdim  unimodular  BM bracket  self-check");
            for g in catalog() {
                let rep = catalog_check(g);
                println!(
                    "{:<9} {:>3}  {:>4}  {:>4}  {:>10}  [{}, {}]      {}",
                    g.name,
                    g.chart_dim(),
                    g.ndim,
                    g.hdim,
                    g.unimodular,
                    rep.bm_bracket.0,
                    rep.bm_bracket.1,
                    if rep.passed() { "pass" } else { "FAIL" }
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Gen { scenario, set, out, seed } => {
            let sc = load_scenario(&scenario, seed)?;
            let g = sc.group_model()?;
            let sets = sc.build_sets(&g)?;
            let s = haarlab_cli::scenario::lookup(&sets, &set)?;
            std::fs::write(&out, s.to_text())
                .map_err(|e| Error::Parse(format!("{}: {e}", out.display())))?;
            println!("wrote {} ({} cells)", out.display(), s.count());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Cover { scenario, a, b, direction, out } => {
            let sc = load_scenario(&scenario, None)?;
            let g = sc.group_model()?;
            let sets = sc.build_sets(&g)?;
            let sa = haarlab_cli::scenario::lookup(&sets, &a)?;
            let sb = haarlab_cli::scenario::lookup(&sets, &b)?;
            let dir = match direction.as_str() {
                "left" => haarlab::cover::Direction::Left,
                "right" => haarlab::cover::Direction::Right,
                other => return Err(Error::Parse(format!("bad direction {other}"))),
            };
            let cert = haarlab::cover::ruzsa_cover(sa, sb, dir)?;
            let ok = cert.verified;
            let json = serde_json::to_string_pretty(&CertificateFile::Covering(cert))
                .map_err(|e| Error::Serialize(e.to_string()))?;
            std::fs::write(&out, json)
                .map_err(|e| Error::Parse(format!("{}: {e}", out.display())))?;
            println!("wrote {} (verified: {ok})", out.display());
            Ok(ExitCode::from(if ok { 0 } else { 1 }))
        }
    }
}

fn load_set(path: &Path) -> Result<GridSet, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    GridSet::from_text(&text)
}
