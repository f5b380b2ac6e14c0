//! Command line surface: `compute` runs one intersection homology
//! computation from a complex document; `check` runs the named verification
//! suite over a corpus directory; `corpus-dump` writes the bundled corpus as
//! documents. Exit codes: 2 for parse errors, 3 for validation errors, 1
//! for failed checks.

mod document;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use document::{resolve_perversity, ComplexDocument};
use ih_core::allowability::Notion;
use ih_core::homology::{Engine, Ring};
use report::{digest, Record, RunReport};

#[derive(Parser)]
#[command(name = "ih", about = "Exact intersection homology of filtered simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NotionArg {
    Poly,
    Gm,
}

impl From<NotionArg> for Notion {
    fn from(n: NotionArg) -> Notion {
        match n {
            NotionArg::Poly => Notion::Poly,
            NotionArg::Gm => Notion::Gm,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute intersection homology of one complex document.
    Compute {
        #[arg(long)]
        complex: PathBuf,
        /// zero|top|m, const:<v>, c<codim>:<v>,…, s<stratum>:<v>,…, or a
        /// name defined in the document
        #[arg(long)]
        perversity: String,
        #[arg(long, value_enum, default_value = "poly")]
        notion: NotionArg,
        /// Z or Zp:<prime>
        #[arg(long, default_value = "Z")]
        ring: String,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=3))]
        level: u8,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a verification suite over a corpus directory.
    Check {
        /// cone | mv | subdivision | compare | geometry
        suite: String,
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write the bundled corpus as canonical documents.
    CorpusDump {
        #[arg(long, default_value = "corpus")]
        out: PathBuf,
    },
}

fn parse_ring(s: &str) -> Result<Ring> {
    match s {
        "Z" | "z" => Ok(Ring::Z),
        other => {
            let p = other
                .strip_prefix("Zp:")
                .or_else(|| other.strip_prefix("zp:"))
                .ok_or_else(|| anyhow!("ring must be Z or Zp:<prime>, got {other:?}"))?;
            let p: u64 = p.parse().context("prime")?;
            if p < 2 || (2..p).any(|d| d * d <= p && p % d == 0) {
                return Err(anyhow!("{p} is not prime"));
            }
            Ok(Ring::Zp(p))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // parse-shaped failures exit 2, validation failures exit 3
            let text = format!("{e:#}");
            if text.contains("parsing")
                || text.contains("bad rational")
                || text.contains("zero denominator")
                || text.contains("expected")
                || text.contains("unrecognized perversity")
            {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Compute {
            complex,
            perversity,
            notion,
            ring,
            level,
            seed,
            report: report_path,
        } => {
            let start = Instant::now();
            let text = std::fs::read_to_string(&complex)
                .with_context(|| format!("reading {complex:?}"))?;
            let doc = ComplexDocument::parse(&text).context("parsing complex document")?;
            let real = doc.realize()?;
            let p = resolve_perversity(&perversity, &real, Some(&doc))?;
            let ring = parse_ring(&ring)?;
            let mut engine = Engine::new(real, seed);
            let h = engine
                .homology(&p, notion.into(), level as usize, ring)
                .map_err(|e| anyhow!("homology computation failed: {e}"))?;

            let mut rep = RunReport::default();
            rep.push(Record::Meta {
                command: "compute".into(),
                input_digest: digest(&text),
                seed,
                params: serde_json::json!({
                    "perversity": perversity,
                    "notion": Notion::from(notion).tag(),
                    "ring": ring.to_string(),
                    "level": level,
                }),
            });
            println!("{} intersection homology over {}", doc.name, ring);
            println!("{:<8} {:<8} torsion", "degree", "betti");
            for (k, g) in h.groups.iter().enumerate() {
                let torsion: Vec<String> = g.torsion.iter().map(|t| t.to_string()).collect();
                println!(
                    "{:<8} {:<8} {}",
                    k,
                    g.betti,
                    if torsion.is_empty() {
                        "-".to_string()
                    } else {
                        torsion.join(",")
                    }
                );
                rep.push(Record::Homology {
                    degree: k,
                    betti: g.betti,
                    torsion,
                });
            }
            rep.push(Record::Timing {
                seconds: start.elapsed().as_secs_f64(),
            });
            if let Some(path) = report_path {
                let file = std::fs::File::create(path)?;
                rep.write_to(file)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            suite,
            corpus,
            seed,
            report: report_path,
        } => {
            let start = Instant::now();
            let loaded = suites::load_corpus(&corpus)?;
            let mut rep = RunReport::default();
            rep.push(Record::Meta {
                command: format!("check {suite}"),
                input_digest: suites::corpus_digest(&loaded),
                seed,
                params: serde_json::json!({ "suite": suite }),
            });
            match suite.as_str() {
                "cone" => suites::suite_cone(&loaded, seed, &mut rep)?,
                "mv" => suites::suite_mv(&loaded, seed, &mut rep)?,
                "subdivision" => suites::suite_subdivision(&loaded, seed, &mut rep)?,
                "compare" => suites::suite_compare(&loaded, seed, &mut rep)?,
                "geometry" => suites::suite_geometry(seed, &mut rep)?,
                other => return Err(anyhow!("unknown suite {other:?}")),
            }
            rep.finish();
            let failed = rep.failed();
            for r in &rep.records {
                if let Record::Check {
                    suite,
                    item,
                    status,
                    ..
                } = r
                {
                    println!("[{suite}] {item}: {status}");
                }
            }
            println!(
                "{} checks failed ({:.1}s)",
                failed,
                start.elapsed().as_secs_f64()
            );
            rep.push(Record::Timing {
                seconds: start.elapsed().as_secs_f64(),
            });
            if let Some(path) = report_path {
                let file = std::fs::File::create(path)?;
                rep.write_to(file)?;
            }
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::CorpusDump { out } => {
            std::fs::create_dir_all(&out)?;
            for (name, real) in ih_core::corpus::all_instances() {
                let doc = ComplexDocument::from_realization(name, &real).canonical()?;
                let path = out.join(format!("{name}.json"));
                std::fs::write(&path, doc.to_json())?;
                println!("wrote {path:?}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
