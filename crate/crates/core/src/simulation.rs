//! Monte Carlo comparison harness and batch analysis of BLT corpora.
//!
//! Each experiment replica samples a profile under the configured culture
//! model, tabulates it under sequential RCV and STV, and folds the
//! comparison into integer counters. Replica `i` derives its RNG as
//! ChaCha8 stream `i` of the experiment seed, and the per-replica results
//! merge with plain integer addition, so a report is bit-identical for
//! any worker count or scheduling order.
//!
//! Runs in which either tabulation resolved a tie by lot are excluded
//! from the winner-agreement and degree statistics and reported in
//! `excluded_ties`. Committee statistics keep lot-resolved runs by
//! default (configurable), and their percentages are conditioned on a
//! Condorcet committee existing.

use crate::ballots::{parse_blt, CandidateId, Election};
use crate::genmodels::{self, CultureKind, CultureModel};
use crate::metrics::{
    condorcet_committee, degree_of_maximal_representation, degree_of_misrepresentation,
    maximally_represented_count, misrepresented_count, party_count, winner_set_diff,
};
use crate::tally::{sequential_rcv_with, stv_with, TallyConfig, TiePolicy};
use rand::RngCore;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("invalid experiment: {0}")]
    InvalidConfig(String),
}

/// Parameters of one Monte Carlo experiment cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub kind: CultureKind,
    pub candidates: usize,
    pub seats: usize,
    pub voters: u64,
    pub runs: u64,
    pub seed: u64,
    /// Worker threads; 0 uses every core, 1 forces the serial path.
    pub workers: usize,
    /// Keep lot-resolved runs in the committee statistics.
    pub include_ties_in_committee: bool,
}

impl ExperimentConfig {
    pub fn new(
        kind: CultureKind,
        candidates: usize,
        seats: usize,
        voters: u64,
        runs: u64,
        seed: u64,
    ) -> Self {
        ExperimentConfig {
            kind,
            candidates,
            seats,
            voters,
            runs,
            seed,
            workers: 0,
            include_ties_in_committee: true,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let model = CultureModel {
            kind: self.kind,
            candidates: self.candidates,
            voters: self.voters,
            seed: self.seed,
        };
        model
            .validate()
            .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        if self.seats < 1 || self.seats >= self.candidates {
            return Err(SimError::InvalidConfig(format!(
                "seats {} must satisfy 1 <= seats < {}",
                self.seats, self.candidates
            )));
        }
        if self.runs == 0 {
            return Err(SimError::InvalidConfig("runs must be at least 1".into()));
        }
        Ok(())
    }

    /// The studied grid stops at six candidates; beyond that the cost of
    /// committee enumeration and `n!` sampling grows quickly.
    pub fn grid_warning(&self) -> Option<String> {
        (self.candidates > 6).then(|| {
            format!(
                "{} candidates is outside the studied 3..6 grid; expect long runtimes",
                self.candidates
            )
        })
    }
}

/// Integer counters accumulated across replicas. Merging is plain
/// addition, hence order-independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplicaCounts {
    pub runs: u64,
    pub excluded_ties: u64,
    /// Histogram of `|seqrcv \ stv|` over non-tied runs; index = difference.
    pub diff: Vec<u64>,
    /// Runs included in committee accounting.
    pub cc_runs: u64,
    pub cc_exists: u64,
    pub rcv_cc: u64,
    pub stv_cc: u64,
    /// Non-tied runs with differing winner sets (degree denominators).
    pub degree_runs: u64,
    /// Summed misrepresented/maximally-represented voter counts over
    /// degree runs.
    pub mis_rcv: u64,
    pub mis_stv: u64,
    pub max_rcv: u64,
    pub max_stv: u64,
}

impl ReplicaCounts {
    fn zero(seats: usize) -> Self {
        ReplicaCounts {
            runs: 0,
            excluded_ties: 0,
            diff: vec![0; seats + 1],
            cc_runs: 0,
            cc_exists: 0,
            rcv_cc: 0,
            stv_cc: 0,
            degree_runs: 0,
            mis_rcv: 0,
            mis_stv: 0,
            max_rcv: 0,
            max_stv: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.runs += other.runs;
        self.excluded_ties += other.excluded_ties;
        for (a, b) in self.diff.iter_mut().zip(other.diff) {
            *a += b;
        }
        self.cc_runs += other.cc_runs;
        self.cc_exists += other.cc_exists;
        self.rcv_cc += other.rcv_cc;
        self.stv_cc += other.stv_cc;
        self.degree_runs += other.degree_runs;
        self.mis_rcv += other.mis_rcv;
        self.mis_stv += other.mis_stv;
        self.max_rcv += other.max_rcv;
        self.max_stv += other.max_stv;
        self
    }
}

/// A ratio reported with its exact numerator and denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Percentage {
    pub count: u128,
    pub total: u128,
}

impl Percentage {
    pub fn new(count: u128, total: u128) -> Self {
        Percentage { count, total }
    }

    /// `100 * count / total`, or `None` for an empty denominator.
    pub fn value(&self) -> Option<f64> {
        (self.total > 0).then(|| 100.0 * self.count as f64 / self.total as f64)
    }

    pub fn display_1dp(&self) -> String {
        match self.value() {
            Some(v) => format!("{v:.1}"),
            None => String::new(),
        }
    }

    fn to_json(self) -> Value {
        json!({
            "pct": self.value(),
            "count": self.count as u64,
            "total": self.total as u64,
        })
    }
}

/// Aggregated result of one experiment cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport {
    pub config: ExperimentConfig,
    pub counts: ReplicaCounts,
}

impl SimulationReport {
    pub fn non_tied(&self) -> u64 {
        self.counts.runs - self.counts.excluded_ties
    }

    /// Same winner sets, as a share of non-tied runs.
    pub fn pct_same_winners(&self) -> Percentage {
        Percentage::new(self.counts.diff[0] as u128, self.non_tied() as u128)
    }

    /// Winner sets differing by exactly `k`, over non-tied runs.
    pub fn pct_diff(&self, k: usize) -> Percentage {
        let count = self.counts.diff.get(k).copied().unwrap_or(0);
        Percentage::new(count as u128, self.non_tied() as u128)
    }

    pub fn pct_cc_exists(&self) -> Percentage {
        Percentage::new(self.counts.cc_exists as u128, self.counts.cc_runs as u128)
    }

    /// Sequential RCV picked the committee, conditioned on one existing.
    pub fn pct_rcv_cc(&self) -> Percentage {
        Percentage::new(self.counts.rcv_cc as u128, self.counts.cc_exists as u128)
    }

    pub fn pct_stv_cc(&self) -> Percentage {
        Percentage::new(self.counts.stv_cc as u128, self.counts.cc_exists as u128)
    }

    fn degree(&self, voters_sum: u64) -> Percentage {
        Percentage::new(
            voters_sum as u128,
            self.counts.degree_runs as u128 * self.config.voters as u128,
        )
    }

    /// Average degree of misrepresentation under sequential RCV, over
    /// non-tied runs where the winner sets differ.
    pub fn avg_misrep_rcv(&self) -> Percentage {
        self.degree(self.counts.mis_rcv)
    }

    pub fn avg_misrep_stv(&self) -> Percentage {
        self.degree(self.counts.mis_stv)
    }

    pub fn avg_maxrep_rcv(&self) -> Percentage {
        self.degree(self.counts.max_rcv)
    }

    pub fn avg_maxrep_stv(&self) -> Percentage {
        self.degree(self.counts.max_stv)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": 1,
            "model": self.config.kind.as_str(),
            "candidates": self.config.candidates,
            "seats": self.config.seats,
            "voters": self.config.voters,
            "runs": self.counts.runs,
            "seed": self.config.seed,
            "excluded_ties": self.counts.excluded_ties,
            "same_winners": self.pct_same_winners().to_json(),
            "diff": (0..=self.config.seats).map(|k| self.pct_diff(k).to_json()).collect::<Vec<_>>(),
            "cc_exists": self.pct_cc_exists().to_json(),
            "rcv_chooses_cc": self.pct_rcv_cc().to_json(),
            "stv_chooses_cc": self.pct_stv_cc().to_json(),
            "avg_misrep_rcv": self.avg_misrep_rcv().to_json(),
            "avg_misrep_stv": self.avg_misrep_stv().to_json(),
            "avg_maxrep_rcv": self.avg_maxrep_rcv().to_json(),
            "avg_maxrep_stv": self.avg_maxrep_stv().to_json(),
        })
    }

    pub fn agreement_csv_header() -> &'static str {
        "n,s,same,diff1,diff2,stv_cc,rcv_cc,cc_exists,excluded_ties"
    }

    pub fn agreement_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.config.candidates,
            self.config.seats,
            self.pct_same_winners().display_1dp(),
            self.pct_diff(1).display_1dp(),
            self.pct_diff(2).display_1dp(),
            self.pct_stv_cc().display_1dp(),
            self.pct_rcv_cc().display_1dp(),
            self.pct_cc_exists().display_1dp(),
            self.counts.excluded_ties,
        )
    }

    pub fn degrees_csv_header() -> &'static str {
        "n,s,mis_rcv,mis_stv,max_rcv,max_stv"
    }

    pub fn degrees_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.config.candidates,
            self.config.seats,
            self.avg_misrep_rcv().display_1dp(),
            self.avg_misrep_stv().display_1dp(),
            self.avg_maxrep_rcv().display_1dp(),
            self.avg_maxrep_stv().display_1dp(),
        )
    }
}

fn run_replica(config: &ExperimentConfig, index: u64) -> ReplicaCounts {
    let mut rng = genmodels::replica_rng(config.seed, index);
    let profile = match config.kind {
        CultureKind::ImpartialCulture => {
            genmodels::sample_ic_with(config.candidates, config.voters, &mut rng)
        }
        CultureKind::ImpartialAnonymousCulture => {
            genmodels::sample_iac_with(config.candidates, config.voters, &mut rng)
        }
    };
    let seq_seed = rng.next_u64();
    let stv_seed = rng.next_u64();
    let election = Election::new(profile, config.seats).expect("config validated");
    let seq = sequential_rcv_with(
        &election,
        &TallyConfig::for_simulation(TiePolicy::backward_then_lot(seq_seed)),
    )
    .expect("complete rankings cannot exhaust");
    let stv = stv_with(
        &election,
        &TallyConfig::for_simulation(TiePolicy::backward_then_lot(stv_seed)),
    );
    let profile = election.profile();
    let seq_set = seq.winner_set();
    let stv_set = stv.winner_set();
    let tied = seq.lot_used || stv.lot_used;

    let mut out = ReplicaCounts::zero(config.seats);
    out.runs = 1;
    if tied {
        out.excluded_ties = 1;
    } else {
        let diff = winner_set_diff(&seq_set, &stv_set).expect("both sets have `seats` members");
        out.diff[diff] = 1;
        if diff > 0 {
            out.degree_runs = 1;
            out.mis_rcv = misrepresented_count(profile, config.seats, &seq_set).unwrap();
            out.mis_stv = misrepresented_count(profile, config.seats, &stv_set).unwrap();
            out.max_rcv = maximally_represented_count(profile, config.seats, &seq_set).unwrap();
            out.max_stv = maximally_represented_count(profile, config.seats, &stv_set).unwrap();
        }
    }
    if config.include_ties_in_committee || !tied {
        out.cc_runs = 1;
        let committee = condorcet_committee(profile, config.seats)
            .expect("model candidate counts stay within the committee guard")
            .committee;
        if let Some(cc) = committee {
            out.cc_exists = 1;
            out.rcv_cc = u64::from(seq_set == cc);
            out.stv_cc = u64::from(stv_set == cc);
        }
    }
    out
}

fn run_serial(config: &ExperimentConfig) -> ReplicaCounts {
    (0..config.runs).fold(ReplicaCounts::zero(config.seats), |acc, i| {
        acc.merge(run_replica(config, i))
    })
}

#[cfg(feature = "parallel")]
fn run_pooled(config: &ExperimentConfig) -> ReplicaCounts {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .expect("thread pool");
    pool.install(|| {
        (0..config.runs)
            .into_par_iter()
            .map(|i| run_replica(config, i))
            .reduce(|| ReplicaCounts::zero(config.seats), ReplicaCounts::merge)
    })
}

#[cfg(not(feature = "parallel"))]
fn run_pooled(config: &ExperimentConfig) -> ReplicaCounts {
    run_serial(config)
}

/// Runs one experiment cell. The report depends only on the config (seed
/// included), never on the worker count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<SimulationReport, SimError> {
    config.validate()?;
    let counts = if config.workers == 1 {
        run_serial(config)
    } else {
        run_pooled(config)
    };
    Ok(SimulationReport {
        config: config.clone(),
        counts,
    })
}

/// Options for batch analysis of BLT files.
#[derive(Clone, Debug, Default)]
pub struct BatchOptions {
    /// Replace each election's declared seat count (fails per file when
    /// out of range).
    pub seats_override: Option<usize>,
    pub tie_seed: u64,
    pub scots_5dp: bool,
    pub merge_independents: bool,
}

/// Per-election comparison row.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchRecord {
    pub file: String,
    pub title: String,
    pub candidates: usize,
    pub seats: usize,
    pub voters: u64,
    pub rcv_winners: Vec<String>,
    pub stv_winners: Vec<String>,
    pub diff: usize,
    pub lot_used: bool,
    pub committee: Option<Vec<String>>,
    pub rcv_selects_committee: bool,
    pub stv_selects_committee: bool,
    /// Degrees as percentages of this election's voters.
    pub mis_rcv: Percentage,
    pub mis_stv: Percentage,
    pub max_rcv: Percentage,
    pub max_stv: Percentage,
    pub parties_rcv: Option<usize>,
    pub parties_stv: Option<usize>,
}

impl BatchRecord {
    pub fn csv_header() -> &'static str {
        "file,title,n,s,voters,rcv_winners,stv_winners,diff,lot_used,cc_exists,rcv_cc,stv_cc,mis_rcv,mis_stv,max_rcv,max_stv,parties_rcv,parties_stv"
    }

    pub fn csv_row(&self) -> String {
        let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
        let opt = |v: &Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            quote(&self.file),
            quote(&self.title),
            self.candidates,
            self.seats,
            self.voters,
            quote(&self.rcv_winners.join("; ")),
            quote(&self.stv_winners.join("; ")),
            self.diff,
            self.lot_used,
            self.committee.is_some(),
            self.rcv_selects_committee,
            self.stv_selects_committee,
            self.mis_rcv.display_1dp(),
            self.mis_stv.display_1dp(),
            self.max_rcv.display_1dp(),
            self.max_stv.display_1dp(),
            opt(&self.parties_rcv),
            opt(&self.parties_stv),
        )
    }

    fn to_json(&self) -> Value {
        json!({
            "file": self.file,
            "title": self.title,
            "candidates": self.candidates,
            "seats": self.seats,
            "voters": self.voters,
            "rcv_winners": self.rcv_winners,
            "stv_winners": self.stv_winners,
            "diff": self.diff,
            "lot_used": self.lot_used,
            "committee": self.committee,
            "rcv_selects_committee": self.rcv_selects_committee,
            "stv_selects_committee": self.stv_selects_committee,
            "mis_rcv": self.mis_rcv.to_json(),
            "mis_stv": self.mis_stv.to_json(),
            "max_rcv": self.max_rcv.to_json(),
            "max_stv": self.max_stv.to_json(),
            "parties_rcv": self.parties_rcv,
            "parties_stv": self.parties_stv,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchFailure {
    pub file: String,
    pub error: String,
}

/// Counts over the successfully analyzed elections.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BatchAggregate {
    pub elections: u64,
    pub failures: u64,
    pub tied: u64,
    pub differing: u64,
    pub diff_hist: BTreeMap<usize, u64>,
    pub cc_exists: u64,
    pub rcv_cc: u64,
    pub stv_cc: u64,
    /// Elections where STV's misrepresentation degree exceeds RCV's.
    pub mis_stv_higher: u64,
    pub party_comparable: u64,
    pub stv_more_parties: u64,
    pub rcv_more_parties: u64,
}

impl BatchAggregate {
    pub fn to_json(&self) -> Value {
        json!({
            "elections": self.elections,
            "failures": self.failures,
            "tied": self.tied,
            "differing": self.differing,
            "diff_hist": self.diff_hist.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
            "cc_exists": self.cc_exists,
            "rcv_chooses_cc": self.rcv_cc,
            "stv_chooses_cc": self.stv_cc,
            "mis_stv_higher": self.mis_stv_higher,
            "party_comparable": self.party_comparable,
            "stv_more_parties": self.stv_more_parties,
            "rcv_more_parties": self.rcv_more_parties,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchOutcome {
    pub records: Vec<BatchRecord>,
    pub failures: Vec<BatchFailure>,
    pub aggregate: BatchAggregate,
}

impl BatchOutcome {
    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": 1,
            "records": self.records.iter().map(BatchRecord::to_json).collect::<Vec<_>>(),
            "failures": self.failures.iter().map(|f| json!({"file": f.file, "error": f.error})).collect::<Vec<_>>(),
            "aggregate": self.aggregate.to_json(),
        })
    }
}

fn analyze_election(
    file: String,
    election: &Election,
    options: &BatchOptions,
    party_overrides: Option<&BTreeMap<String, String>>,
) -> Result<BatchRecord, String> {
    let election = match options.seats_override {
        Some(seats) => election.with_seats(seats).map_err(|e| e.to_string())?,
        None => election.clone(),
    };
    let profile = election.profile();
    let seats = election.seats();
    let voters = profile.total_voters();
    let mut config = TallyConfig::for_simulation(TiePolicy::backward_then_lot(options.tie_seed));
    config.scots_5dp = options.scots_5dp;
    let seq = sequential_rcv_with(&election, &config).map_err(|e| e.to_string())?;
    let stv = stv_with(&election, &config);
    let seq_set = seq.winner_set();
    let stv_set = stv.winner_set();
    let diff = winner_set_diff(&seq_set, &stv_set).map_err(|e| e.to_string())?;
    let committee = condorcet_committee(profile, seats)
        .map_err(|e| e.to_string())?
        .committee;
    let names = |set: &BTreeSet<CandidateId>| -> Vec<String> {
        set.iter()
            .map(|c| profile.candidate_name(*c).to_string())
            .collect()
    };
    let party_of = |c: CandidateId| -> Option<String> {
        party_overrides
            .and_then(|m| m.get(profile.candidate_name(c)).cloned())
            .or_else(|| profile.party(c).map(str::to_string))
    };
    let party_counts = |set: &BTreeSet<CandidateId>| -> Option<usize> {
        let parties: BTreeMap<CandidateId, String> = set
            .iter()
            .filter_map(|&c| party_of(c).map(|p| (c, p)))
            .collect();
        if parties.len() != set.len() {
            return None;
        }
        party_count(set, &parties, options.merge_independents).ok()
    };
    let degree = |count: u64| Percentage::new(count as u128, voters as u128);
    Ok(BatchRecord {
        file,
        title: election.title().to_string(),
        candidates: profile.num_candidates(),
        seats,
        voters,
        rcv_winners: names(&seq_set),
        stv_winners: names(&stv_set),
        diff,
        lot_used: seq.lot_used || stv.lot_used,
        committee: committee.as_ref().map(&names),
        rcv_selects_committee: committee.as_ref() == Some(&seq_set),
        stv_selects_committee: committee.as_ref() == Some(&stv_set),
        mis_rcv: degree(misrepresented_count(profile, seats, &seq_set).map_err(|e| e.to_string())?),
        mis_stv: degree(misrepresented_count(profile, seats, &stv_set).map_err(|e| e.to_string())?),
        max_rcv: degree(
            maximally_represented_count(profile, seats, &seq_set).map_err(|e| e.to_string())?,
        ),
        max_stv: degree(
            maximally_represented_count(profile, seats, &stv_set).map_err(|e| e.to_string())?,
        ),
        parties_rcv: party_counts(&seq_set),
        parties_stv: party_counts(&stv_set),
    })
}

/// Analyzes a batch of BLT files. Per-file errors are reported and the
/// batch continues; an empty batch yields an empty aggregate.
pub fn run_batch(
    paths: &[PathBuf],
    options: &BatchOptions,
    party_overrides: Option<&BTreeMap<String, String>>,
) -> BatchOutcome {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for path in paths {
        let file = path.display().to_string();
        let result = std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|text| parse_blt(&text).map_err(|e| e.to_string()))
            .and_then(|election| {
                analyze_election(file.clone(), &election, options, party_overrides)
            });
        match result {
            Ok(record) => records.push(record),
            Err(error) => failures.push(BatchFailure { file, error }),
        }
    }
    let mut aggregate = BatchAggregate {
        failures: failures.len() as u64,
        ..BatchAggregate::default()
    };
    for record in &records {
        aggregate.elections += 1;
        aggregate.tied += u64::from(record.lot_used);
        *aggregate.diff_hist.entry(record.diff).or_insert(0) += 1;
        aggregate.differing += u64::from(record.diff > 0);
        aggregate.cc_exists += u64::from(record.committee.is_some());
        aggregate.rcv_cc += u64::from(record.rcv_selects_committee);
        aggregate.stv_cc += u64::from(record.stv_selects_committee);
        aggregate.mis_stv_higher +=
            u64::from(record.mis_stv.count > record.mis_rcv.count && record.diff > 0);
        if let (Some(rcv), Some(stv)) = (record.parties_rcv, record.parties_stv) {
            aggregate.party_comparable += 1;
            aggregate.stv_more_parties += u64::from(stv > rcv);
            aggregate.rcv_more_parties += u64::from(rcv > stv);
        }
    }
    BatchOutcome {
        records,
        failures,
        aggregate,
    }
}

/// Analyzes one already-parsed election (shared by the CLI's single-file
/// metrics view).
pub fn analyze_single(
    label: &str,
    election: &Election,
    options: &BatchOptions,
    party_overrides: Option<&BTreeMap<String, String>>,
) -> Result<BatchRecord, SimError> {
    analyze_election(label.to_string(), election, options, party_overrides)
        .map_err(SimError::InvalidConfig)
}

/// Convenience used by tests and docs: degrees of one winner set as
/// display-ready percentages.
pub fn degrees_for(
    election: &Election,
    winners: &BTreeSet<CandidateId>,
) -> Result<(num::BigRational, num::BigRational), SimError> {
    let profile = election.profile();
    let mis = degree_of_misrepresentation(profile, election.seats(), winners)
        .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
    let max = degree_of_maximal_representation(profile, election.seats(), winners)
        .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
    Ok((mis, max))
}

/// Writes lines to a file, creating parent directories as needed.
pub fn write_report(path: &Path, lines: &[String]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, lines.join("\n") + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        let mut config = ExperimentConfig::new(CultureKind::ImpartialCulture, 3, 2, 101, 400, 2024);
        config.workers = 1;
        config
    }

    #[test]
    fn reports_are_worker_independent() {
        let serial = run_experiment(&small_config()).unwrap();
        let mut parallel_config = small_config();
        parallel_config.workers = 0;
        let pooled = run_experiment(&parallel_config).unwrap();
        assert_eq!(serial.counts, pooled.counts);
        let mut three = small_config();
        three.workers = 3;
        assert_eq!(serial.counts, run_experiment(&three).unwrap().counts);
    }

    #[test]
    fn reports_are_seed_deterministic() {
        let a = run_experiment(&small_config()).unwrap();
        let b = run_experiment(&small_config()).unwrap();
        assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn percentages_carry_exact_denominators() {
        let report = run_experiment(&small_config()).unwrap();
        let same = report.pct_same_winners();
        assert_eq!(same.total, report.non_tied() as u128);
        let sum: u64 = report.counts.diff.iter().sum();
        assert_eq!(sum, report.non_tied());
        assert!(report.pct_rcv_cc().total == report.counts.cc_exists as u128);
    }

    #[test]
    fn single_run_degenerates_cleanly() {
        let mut config = small_config();
        config.runs = 1;
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.counts.runs, 1);
        assert!(report.non_tied() <= 1);
        if let Some(v) = report.pct_same_winners().value() {
            assert!(v == 0.0 || v == 100.0);
        }
        for k in 0..=config.seats {
            assert!(report.pct_diff(k).count <= 1);
        }
    }

    #[test]
    fn config_validation() {
        let mut config = small_config();
        config.seats = 3;
        assert!(run_experiment(&config).is_err());
        let mut config = small_config();
        config.runs = 0;
        assert!(run_experiment(&config).is_err());
        let mut config = small_config();
        config.candidates = 13;
        assert!(run_experiment(&config).is_err());
        assert!(small_config().grid_warning().is_none());
        let mut config = small_config();
        config.candidates = 7;
        config.seats = 2;
        assert!(config.grid_warning().is_some());
    }

    #[test]
    fn csv_rows_match_headers() {
        let report = run_experiment(&small_config()).unwrap();
        let header_fields = SimulationReport::agreement_csv_header().split(',').count();
        assert_eq!(report.agreement_csv_row().split(',').count(), header_fields);
        let header_fields = SimulationReport::degrees_csv_header().split(',').count();
        assert_eq!(report.degrees_csv_row().split(',').count(), header_fields);
    }

    #[test]
    fn batch_handles_missing_and_good_files() {
        let dir = std::env::temp_dir().join("multitally-batch-test");
        std::fs::create_dir_all(&dir).unwrap();
        let good = dir.join("genola.blt");
        std::fs::write(&good, "3 2\n13 1 0\n58 1 2 3 0\n22 1 3 2 0\n4 2 0\n24 2 1 3 0\n60 2 3 1 0\n15 3 0\n86 3 1 2 0\n96 3 2 1 0\n0\n\"Hughes\"\n\"Lundberg\"\n\"Robison\"\n\"Genola\"\n").unwrap();
        let missing = dir.join("missing.blt");
        let outcome = run_batch(&[good, missing], &BatchOptions::default(), None);
        assert_eq!(outcome.records.len(), 1);
        assert_eq!(outcome.failures.len(), 1);
        let record = &outcome.records[0];
        assert_eq!(record.diff, 1);
        assert!(record.rcv_selects_committee);
        assert!(!record.stv_selects_committee);
        assert_eq!(record.rcv_winners, vec!["Lundberg", "Robison"]);
        assert_eq!(record.stv_winners, vec!["Hughes", "Robison"]);
        assert_eq!(outcome.aggregate.elections, 1);
        assert_eq!(outcome.aggregate.differing, 1);
        assert_eq!(outcome.aggregate.failures, 1);
    }

    #[test]
    fn empty_batch_is_a_clean_aggregate() {
        let outcome = run_batch(&[], &BatchOptions::default(), None);
        assert_eq!(outcome.aggregate, BatchAggregate::default());
        assert!(outcome.records.is_empty());
    }
}
