//! The `multitally` binary: tabulate, compare, and simulate multiwinner
//! ranked-choice elections.
//!
//! Exit codes: 0 on success, 1 on a domain error (bad file, infeasible
//! parameters), 2 on a usage error.

mod output;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use multitally::ballots::{parse_blt, serialize_blt};
use multitally::genmodels::{construct_disjoint, sample_iac, sample_ic, CultureKind, CultureModel};
use multitally::metrics::{condorcet_committee, pairwise_matrix};
use multitally::simulation::{
    analyze_single, run_batch, run_experiment, write_report, BatchOptions, ExperimentConfig,
    SimulationReport,
};
use multitally::tally::{
    irv_with, sequential_rcv_with, stv_with, Method, TallyConfig, TallyOutcome, TiePolicy,
};
use multitally::{CandidateId, Election};
use serde_json::json;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "multitally",
    version,
    about = "Multiwinner ranked-choice tabulation: IRV, sequential RCV, and STV with exact arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Irv,
    Seqrcv,
    Stv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Ic,
    Iac,
}

impl From<ModelArg> for CultureKind {
    fn from(value: ModelArg) -> Self {
        match value {
            ModelArg::Ic => CultureKind::ImpartialCulture,
            ModelArg::Iac => CultureKind::ImpartialAnonymousCulture,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate one BLT file and print the votes-by-round table
    Tally {
        file: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Override the seat count declared in the file
        #[arg(long)]
        seats: Option<usize>,
        /// Seed for the tie-break lot (required: tabulation may draw lots)
        #[arg(long)]
        seed: u64,
        /// Truncate STV transfer values to 5 decimal places
        #[arg(long)]
        scots_5dp: bool,
        #[arg(long)]
        json: bool,
    },
    /// Tabulate under both multiwinner methods and report the difference
    Compare {
        file: PathBuf,
        #[arg(long)]
        seats: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        scots_5dp: bool,
        #[arg(long)]
        json: bool,
    },
    /// Find the Condorcet committee of a given size
    Condorcet {
        file: PathBuf,
        /// Committee size (defaults to the file's seat count)
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Pairwise matrix, committee, degrees, and party counts for one file
    Metrics {
        file: PathBuf,
        #[arg(long)]
        seats: Option<usize>,
        #[arg(long)]
        seed: u64,
        /// CSV file of `candidate,party` rows overriding BLT party tags
        #[arg(long)]
        party_map: Option<PathBuf>,
        /// Count all independents as one party instead of one each
        #[arg(long)]
        merge_independents: bool,
        #[arg(long)]
        scots_5dp: bool,
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo comparison of the two methods under a culture model
    Simulate {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        candidates: usize,
        #[arg(long)]
        seats: usize,
        #[arg(long, default_value_t = 1001)]
        voters: u64,
        #[arg(long)]
        runs: u64,
        #[arg(long)]
        seed: u64,
        /// Worker threads (0 = all cores, 1 = serial)
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Write the agreement table as CSV
        #[arg(long)]
        agreement_csv: Option<PathBuf>,
        /// Write the average-degree table as CSV
        #[arg(long)]
        degrees_csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Analyze a corpus of BLT files election by election
    Batch {
        files: Vec<PathBuf>,
        #[arg(long)]
        seed: u64,
        /// Use this seat count for every election
        #[arg(long)]
        s_override: Option<usize>,
        #[arg(long)]
        party_map: Option<PathBuf>,
        #[arg(long)]
        merge_independents: bool,
        #[arg(long)]
        scots_5dp: bool,
        /// Write one CSV row per election
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Sample a random election and write it as BLT
    Generate {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        candidates: usize,
        #[arg(long)]
        voters: u64,
        /// Seat count for the BLT header
        #[arg(long)]
        seats: usize,
        #[arg(long)]
        seed: u64,
        /// Output path (stdout when omitted)
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Build an election whose sequential RCV and STV winner sets are
    /// disjoint, and write it as BLT
    Construct {
        #[arg(long)]
        seats: usize,
        #[arg(long)]
        voters: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = run(cli) {
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}

fn load_election(file: &PathBuf, seats: Option<usize>) -> Result<Election> {
    let text =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let election = parse_blt(&text).with_context(|| format!("parsing {}", file.display()))?;
    match seats {
        Some(seats) => election
            .with_seats(seats)
            .with_context(|| format!("applying --seats {seats}")),
        None => Ok(election),
    }
}

fn tally_config(seed: u64, scots_5dp: bool) -> TallyConfig {
    let mut config = TallyConfig::new(TiePolicy::backward_then_lot(seed));
    config.scots_5dp = scots_5dp;
    config
}

fn load_party_map(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (index, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: record {}", path.display(), index + 1))?;
        if record.len() != 2 {
            bail!(
                "{}: record {} needs exactly `candidate,party`",
                path.display(),
                index + 1
            );
        }
        let candidate = record[0].trim().to_string();
        let party = record[1].trim().to_string();
        if index == 0 && candidate.eq_ignore_ascii_case("candidate") {
            continue;
        }
        map.insert(candidate, party);
    }
    Ok(map)
}

fn emit(value: serde_json::Value) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, &value)?;
    writeln!(stdout)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Tally {
            file,
            method,
            seats,
            seed,
            scots_5dp,
            json,
        } => {
            let election = load_election(&file, seats)?;
            let config = tally_config(seed, scots_5dp);
            let outcome = match method {
                MethodArg::Irv => irv_with(election.profile(), &config),
                MethodArg::Seqrcv => sequential_rcv_with(&election, &config)?,
                MethodArg::Stv => stv_with(&election, &config),
            };
            if json {
                emit(outcome.to_json(election.profile()))?;
            } else {
                print!("{}", output::render_outcome(&election, &outcome));
            }
            Ok(())
        }
        Command::Compare {
            file,
            seats,
            seed,
            scots_5dp,
            json,
        } => {
            let election = load_election(&file, seats)?;
            let config = tally_config(seed, scots_5dp);
            let seq = sequential_rcv_with(&election, &config)?;
            let stv = stv_with(&election, &config);
            let diff = multitally::metrics::winner_set_diff(&seq.winner_set(), &stv.winner_set())?;
            if json {
                emit(json!({
                    "schema_version": 1,
                    "title": election.title(),
                    "seats": election.seats(),
                    "seqrcv": { "winners": seq.winner_names(election.profile()), "lot_used": seq.lot_used },
                    "stv": { "winners": stv.winner_names(election.profile()), "quota": stv.quota, "lot_used": stv.lot_used },
                    "diff": diff,
                }))?;
            } else {
                println!(
                    "Sequential RCV: {}",
                    seq.winner_names(election.profile()).join(", ")
                );
                println!(
                    "STV:            {}",
                    stv.winner_names(election.profile()).join(", ")
                );
                println!("{}", output::describe_diff(diff, election.seats()));
                if seq.lot_used || stv.lot_used {
                    println!("note: a tie was resolved by lot");
                }
            }
            Ok(())
        }
        Command::Condorcet { file, size, json } => {
            let election = load_election(&file, None)?;
            let size = size.unwrap_or_else(|| election.seats());
            let result = condorcet_committee(election.profile(), size)?;
            let names: Option<Vec<String>> = result.committee.map(|set| {
                set.iter()
                    .map(|c| election.profile().candidate_name(*c).to_string())
                    .collect()
            });
            if json {
                emit(json!({
                    "schema_version": 1,
                    "size": size,
                    "condorcet_committee": names,
                }))?;
            } else {
                match names {
                    Some(names) => println!("{}", names.join(", ")),
                    None => println!("none"),
                }
            }
            Ok(())
        }
        Command::Metrics {
            file,
            seats,
            seed,
            party_map,
            merge_independents,
            scots_5dp,
            json,
        } => {
            let election = load_election(&file, seats)?;
            let overrides = party_map.as_ref().map(load_party_map).transpose()?;
            let options = BatchOptions {
                seats_override: None,
                tie_seed: seed,
                scots_5dp,
                merge_independents,
            };
            let record = analyze_single(
                &file.display().to_string(),
                &election,
                &options,
                overrides.as_ref(),
            )?;
            let matrix = pairwise_matrix(election.profile());
            if json {
                emit(json!({
                    "schema_version": 1,
                    "title": election.title(),
                    "seats": election.seats(),
                    "candidates": election.profile().candidate_names(),
                    "pairwise": matrix.rows(),
                    "condorcet_committee": record.committee,
                    "degrees": {
                        "seqrcv": { "misrep": record.mis_rcv.value(), "maxrep": record.max_rcv.value() },
                        "stv": { "misrep": record.mis_stv.value(), "maxrep": record.max_stv.value() },
                    },
                    "party_counts": {
                        "seqrcv": record.parties_rcv,
                        "stv": record.parties_stv,
                    },
                    "winners": { "seqrcv": record.rcv_winners, "stv": record.stv_winners },
                }))?;
            } else {
                print!("{}", output::render_metrics(&election, &matrix, &record));
            }
            Ok(())
        }
        Command::Simulate {
            model,
            candidates,
            seats,
            voters,
            runs,
            seed,
            workers,
            agreement_csv,
            degrees_csv,
            json,
        } => {
            let mut config =
                ExperimentConfig::new(model.into(), candidates, seats, voters, runs, seed);
            config.workers = workers;
            if let Some(warning) = config.grid_warning() {
                eprintln!("warning: {warning}");
            }
            let report = run_experiment(&config)?;
            if let Some(path) = agreement_csv {
                write_report(
                    &path,
                    &[
                        SimulationReport::agreement_csv_header().to_string(),
                        report.agreement_csv_row(),
                    ],
                )?;
            }
            if let Some(path) = degrees_csv {
                write_report(
                    &path,
                    &[
                        SimulationReport::degrees_csv_header().to_string(),
                        report.degrees_csv_row(),
                    ],
                )?;
            }
            if json {
                emit(report.to_json())?;
            } else {
                print!("{}", output::render_report(&report));
            }
            Ok(())
        }
        Command::Batch {
            files,
            seed,
            s_override,
            party_map,
            merge_independents,
            scots_5dp,
            csv,
            json,
        } => {
            let overrides = party_map.as_ref().map(load_party_map).transpose()?;
            let options = BatchOptions {
                seats_override: s_override,
                tie_seed: seed,
                scots_5dp,
                merge_independents,
            };
            let outcome = run_batch(&files, &options, overrides.as_ref());
            for failure in &outcome.failures {
                eprintln!("warning: {}: {}", failure.file, failure.error);
            }
            if let Some(path) = csv {
                let mut lines = vec![multitally::simulation::BatchRecord::csv_header().to_string()];
                lines.extend(outcome.records.iter().map(|r| r.csv_row()));
                write_report(&path, &lines)?;
            }
            if json {
                emit(outcome.to_json())?;
            } else {
                print!("{}", output::render_batch(&outcome));
            }
            Ok(())
        }
        Command::Generate {
            model,
            candidates,
            voters,
            seats,
            seed,
            output,
            title,
            json,
        } => {
            let culture = CultureModel {
                kind: model.into(),
                candidates,
                voters,
                seed,
            };
            let profile = match culture.kind {
                CultureKind::ImpartialCulture => sample_ic(&culture)?,
                CultureKind::ImpartialAnonymousCulture => sample_iac(&culture)?,
            };
            let title = title.unwrap_or_else(|| {
                format!(
                    "{} sample: {candidates} candidates, {voters} voters, seed {seed}",
                    culture.kind.as_str().to_uppercase()
                )
            });
            let election = Election::new(profile, seats)?.with_title(title);
            write_blt(&election, output, json)
        }
        Command::Construct {
            seats,
            voters,
            output,
            title,
            json,
        } => {
            let mut election = construct_disjoint(seats, voters)?;
            if let Some(title) = title {
                election = election.with_title(title);
            }
            write_blt(&election, output, json)
        }
    }
}

fn write_blt(election: &Election, output: Option<PathBuf>, json: bool) -> Result<()> {
    let text = serialize_blt(election);
    if let Some(path) = &output {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    if json {
        emit(json!({
            "schema_version": 1,
            "title": election.title(),
            "candidates": election.profile().num_candidates(),
            "seats": election.seats(),
            "voters": election.profile().total_voters(),
            "path": output.as_ref().map(|p| p.display().to_string()),
            "blt": text,
        }))?;
    } else if output.is_none() {
        print!("{text}");
    }
    Ok(())
}

/// Winner names in election order for display.
fn winner_list(election: &Election, outcome: &TallyOutcome) -> String {
    outcome
        .winners
        .iter()
        .map(|c: &CandidateId| election.profile().candidate_name(*c))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Method display names shared with the renderer.
fn method_name(method: Method) -> &'static str {
    match method {
        Method::Irv => "IRV",
        Method::SequentialRcv => "Sequential RCV",
        Method::Stv => "STV",
    }
}
