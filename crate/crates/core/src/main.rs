use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use msfeat::calls::write_graph_files;
use msfeat::catalog::load_catalog;
use msfeat::dataset::{read_dataset, write_dataset, write_jsonl};
use msfeat::pipeline::{analyze_tree, run_pipeline, sanitized_stem, AnalyzeOptions, PipelineFlags};
use msfeat::repo::fetch_repository;
use msfeat::services::InfraRole;
use msfeat::stats::{flag_nano_services, render_box_data, summarize_records};
use msfeat::{Diagnostic, ExtractionConfig, MicroserviceRecord};

#[derive(Parser)]
#[command(
    name = "msfeat",
    version,
    about = "Extracts per-service feature metrics from Maven-based microservice repositories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clone or refresh every repository in the catalog.
    Fetch {
        catalog: PathBuf,
        #[arg(long)]
        workspace: PathBuf,
    },
    /// Analyze one already checked-out working tree.
    Extract {
        /// Repository root (directory containing the top-level pom.xml).
        root: PathBuf,
        /// System name for the emitted rows; defaults to the root directory name.
        #[arg(long)]
        system: Option<String>,
        /// Release id for the emitted rows.
        #[arg(long, default_value = "HEAD")]
        release: String,
        #[arg(long, default_value = "dataset.csv")]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Keep only business-role services in the dataset.
        #[arg(long)]
        business_only: bool,
        /// Also analyze sources under src/test.
        #[arg(long)]
        include_tests: bool,
        /// Directory receiving call-graph CSV/DOT files.
        #[arg(long)]
        emit_graph: Option<PathBuf>,
        /// Also write a JSON-lines mirror beside the CSV.
        #[arg(long)]
        emit_jsonl: bool,
    },
    /// Fetch and analyze every catalog system at every release.
    Scan {
        catalog: PathBuf,
        #[arg(long)]
        workspace: PathBuf,
        #[arg(long, default_value = "dataset.csv")]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        business_only: bool,
        #[arg(long)]
        include_tests: bool,
        #[arg(long)]
        emit_graph: Option<PathBuf>,
        #[arg(long)]
        emit_jsonl: bool,
        /// Systems analyzed concurrently; 0 picks the default.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Print distribution summaries for every numeric metric in a dataset.
    Stats {
        dataset: PathBuf,
        #[arg(long)]
        business_only: bool,
        /// Write tab-separated box-plot data (min/q1/median/q3/max/outliers).
        #[arg(long)]
        box_data: Option<PathBuf>,
    },
    /// Print services tripping the configured granularity heuristics.
    Flags {
        dataset: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> msfeat::Result<ExtractionConfig> {
    match path {
        Some(p) => ExtractionConfig::load(p),
        None => Ok(ExtractionConfig::default()),
    }
}

fn print_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

fn read_rows(path: &Path, business_only: bool) -> msfeat::Result<Vec<MicroserviceRecord>> {
    let mut records = read_dataset(path)?;
    if business_only {
        records.retain(|r| r.infra_role == InfraRole::Business);
    }
    Ok(records)
}

const EXIT_EMPTY: u8 = 2;

fn run(cli: Cli) -> msfeat::Result<ExitCode> {
    match cli.command {
        Command::Fetch { catalog, workspace } => {
            let entries = load_catalog(&catalog)?;
            let mut fetched = 0usize;
            for entry in &entries {
                match fetch_repository(entry, &workspace) {
                    Ok(path) => {
                        println!("{} -> {}", entry.name, path.display());
                        fetched += 1;
                    }
                    Err(e) => eprintln!("warning: {}: {e}", entry.name),
                }
            }
            println!("fetched {fetched} of {} repositories", entries.len());
            Ok(if fetched == 0 {
                ExitCode::from(EXIT_EMPTY)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Extract {
            root,
            system,
            release,
            out,
            config,
            business_only,
            include_tests,
            emit_graph,
            emit_jsonl,
        } => {
            let cfg = load_config(config.as_deref())?;
            let system = system.unwrap_or_else(|| {
                root.file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "system".to_string())
            });
            let mut diags = Vec::new();
            let analysis = analyze_tree(
                &root,
                &system,
                &release,
                &cfg,
                AnalyzeOptions { include_tests },
                &mut diags,
            )?;
            let mut records = analysis.records;
            if business_only {
                records.retain(|r| r.infra_role == InfraRole::Business);
            }
            write_dataset(&records, &out)?;
            let written = read_dataset(&out)?.len();
            if emit_jsonl {
                write_jsonl(&records, &out.with_extension("jsonl"))?;
            }
            if let Some(dir) = emit_graph {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| msfeat::Error::io(&dir, e))?;
                write_graph_files(&analysis.graph, &dir.join(sanitized_stem(&system, &release)))?;
            }
            print_diagnostics(&diags);
            println!("{written} records -> {}", out.display());
            Ok(if written == 0 {
                ExitCode::from(EXIT_EMPTY)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Scan {
            catalog,
            workspace,
            out,
            config,
            business_only,
            include_tests,
            emit_graph,
            emit_jsonl,
            jobs,
        } => {
            let cfg = load_config(config.as_deref())?;
            let flags = PipelineFlags {
                business_only,
                include_tests,
                emit_jsonl,
                emit_graph,
                jobs,
            };
            let summary = run_pipeline(&catalog, &workspace, &out, &cfg, &flags)?;
            print_diagnostics(&summary.diagnostics);
            println!("{} -> {}", summary.summary_line(), out.display());
            Ok(if summary.records_written == 0 {
                ExitCode::from(EXIT_EMPTY)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Stats {
            dataset,
            business_only,
            box_data,
        } => {
            let records = read_rows(&dataset, business_only)?;
            if records.is_empty() {
                eprintln!("no records in {}", dataset.display());
                return Ok(ExitCode::from(EXIT_EMPTY));
            }
            let summaries = summarize_records(&records)?;
            println!(
                "{:<20} {:>6} {:>12} {:>12} {:>12} {:>12} {:>9}",
                "metric", "count", "mean", "median", "q1", "q3", "outliers"
            );
            for s in &summaries {
                println!(
                    "{:<20} {:>6} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>9}",
                    s.metric_name,
                    s.count,
                    s.mean,
                    s.median,
                    s.q1,
                    s.q3,
                    s.outliers.len()
                );
            }
            if let Some(path) = box_data {
                std::fs::write(&path, render_box_data(&summaries))
                    .map_err(|e| msfeat::Error::io(&path, e))?;
                println!("box-plot data -> {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Flags { dataset, config } => {
            let cfg = load_config(config.as_deref())?;
            let records = read_rows(&dataset, false)?;
            if records.is_empty() {
                eprintln!("no records in {}", dataset.display());
                return Ok(ExitCode::from(EXIT_EMPTY));
            }
            let flags = flag_nano_services(&records, &cfg);
            for f in &flags {
                let values = f
                    .triggering_values
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(", ");
                println!("{}: {} ({values})", f.rule_name, f.key);
            }
            println!("{} of {} records flagged", flags.len(), records.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests arrive here too; only real usage
            // errors exit nonzero.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
