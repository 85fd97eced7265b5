//! Plain-text rendering: votes-by-round tables (candidates down, rounds
//! across), comparison summaries, and report blocks. Totals are shown to
//! two decimal places; elected candidates are starred in the round they
//! cross the threshold.

use multitally::ballots::{CandidateId, Election};
use multitally::metrics::PairwiseMatrix;
use multitally::numeric;
use multitally::simulation::{BatchOutcome, BatchRecord, SimulationReport};
use multitally::tally::{RoundEvent, RoundTable, TallyOutcome};

use crate::{method_name, winner_list};

fn render_table(election: &Election, table: &RoundTable, heading: Option<String>) -> String {
    let profile = election.profile();
    let rounds = &table.rounds;
    let mut grid: Vec<Vec<String>> = Vec::new();
    let mut header = vec![String::from("Candidate")];
    header.extend((1..=rounds.len()).map(|r| format!("R{r}")));
    grid.push(header);
    for id in profile.active_candidates() {
        let mut row = vec![profile.candidate_name(id).to_string()];
        for round in rounds {
            let elected_here = round
                .events
                .iter()
                .any(|e| matches!(e, RoundEvent::Elected { candidate, .. } if *candidate == id));
            let cell = match round.totals.get(&id) {
                Some(total) => {
                    let mut text = numeric::display_votes(total);
                    if elected_here {
                        text.push('*');
                    }
                    text
                }
                None => String::new(),
            };
            row.push(cell);
        }
        grid.push(row);
    }
    let exhausted_anywhere = rounds.iter().any(|r| !r.exhausted.numer().eq(&0.into()));
    if exhausted_anywhere {
        let mut row = vec![String::from("(exhausted)")];
        row.extend(rounds.iter().map(|r| numeric::display_votes(&r.exhausted)));
        grid.push(row);
    }

    let widths: Vec<usize> = (0..grid[0].len())
        .map(|c| grid.iter().map(|row| row[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    if let Some(heading) = heading {
        out.push_str(&heading);
        out.push('\n');
    }
    for (i, row) in grid.iter().enumerate() {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c == 0 {
                line.push_str(&format!("{:<width$}", cell, width = widths[0]));
            } else {
                line.push_str(&format!("  {:>width$}", cell, width = widths[c]));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
        if i == 0 {
            out.push_str(&"-".repeat(line.trim_end().len()));
            out.push('\n');
        }
    }
    out
}

pub fn render_outcome(election: &Election, outcome: &TallyOutcome) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{}: {}\n",
        method_name(outcome.method),
        election.title()
    ));
    match outcome.quota {
        Some(quota) => out.push_str(&format!(
            "Seats: {}   Voters: {}   Quota: {}\n\n",
            election.seats(),
            election.profile().total_voters(),
            quota
        )),
        None => out.push_str(&format!(
            "Voters: {}\n\n",
            election.profile().total_voters()
        )),
    }
    if outcome.tables.len() > 1 {
        for (seat, table) in outcome.tables.iter().enumerate() {
            out.push_str(&render_table(
                election,
                table,
                Some(format!("Seat {}", seat + 1)),
            ));
            out.push('\n');
        }
    } else if let Some(table) = outcome.tables.first() {
        out.push_str(&render_table(election, table, None));
        out.push('\n');
    }
    out.push_str(&format!("Winners: {}\n", winner_list(election, outcome)));
    if !outcome.tie_events.is_empty() {
        let profile = election.profile();
        for tie in &outcome.tie_events {
            let candidates: Vec<&str> = tie
                .candidates
                .iter()
                .map(|c| profile.candidate_name(*c))
                .collect();
            out.push_str(&format!(
                "tie (round {}): {} -> {} [{}]\n",
                tie.round,
                candidates.join(" = "),
                profile.candidate_name(tie.selected),
                match &tie.resolution {
                    multitally::tally::TieResolution::Backward { round } =>
                        format!("separated at round {round}"),
                    multitally::tally::TieResolution::ZeroTotal => String::from("zero votes"),
                    multitally::tally::TieResolution::Lot => String::from("lot"),
                }
            ));
        }
    }
    if outcome.lot_used {
        out.push_str("note: a tie was resolved by lot\n");
    }
    out
}

pub fn describe_diff(diff: usize, seats: usize) -> String {
    match diff {
        0 => String::from("diff=0 (identical)"),
        d if d == seats => format!("diff={d} (disjoint)"),
        d => format!("diff={d}"),
    }
}

pub fn render_metrics(
    election: &Election,
    matrix: &PairwiseMatrix,
    record: &BatchRecord,
) -> String {
    let profile = election.profile();
    let mut out = String::new();
    out.push_str(&format!("Metrics: {}\n\n", election.title()));
    out.push_str("Pairwise wins (row beats column):\n");
    let names = profile.candidate_names();
    let width = names.iter().map(|n| n.len()).max().unwrap_or(1).max(6);
    out.push_str(&format!("{:<width$}", ""));
    for name in names {
        out.push_str(&format!("  {name:>width$}"));
    }
    out.push('\n');
    for (i, name) in names.iter().enumerate() {
        out.push_str(&format!("{name:<width$}"));
        for j in 0..names.len() {
            if i == j {
                out.push_str(&format!("  {:>width$}", "-"));
            } else {
                out.push_str(&format!(
                    "  {:>width$}",
                    matrix.wins(CandidateId(i), CandidateId(j))
                ));
            }
        }
        out.push('\n');
    }
    out.push('\n');
    match &record.committee {
        Some(names) => out.push_str(&format!("Condorcet committee: {}\n", names.join(", "))),
        None => out.push_str("Condorcet committee: none\n"),
    }
    out.push_str(&format!(
        "Sequential RCV winners: {} (selects committee: {})\n",
        record.rcv_winners.join(", "),
        record.rcv_selects_committee
    ));
    out.push_str(&format!(
        "STV winners:            {} (selects committee: {})\n\n",
        record.stv_winners.join(", "),
        record.stv_selects_committee
    ));
    out.push_str(&format!(
        "Degree of misrepresentation:     seqrcv {}%  stv {}%\n",
        record.mis_rcv.display_1dp(),
        record.mis_stv.display_1dp()
    ));
    out.push_str(&format!(
        "Degree of maximal representation: seqrcv {}%  stv {}%\n",
        record.max_rcv.display_1dp(),
        record.max_stv.display_1dp()
    ));
    match (record.parties_rcv, record.parties_stv) {
        (Some(rcv), Some(stv)) => {
            out.push_str(&format!("Parties represented: seqrcv {rcv}  stv {stv}\n"));
        }
        _ => out.push_str("Parties represented: unavailable (missing party data)\n"),
    }
    out
}

pub fn render_report(report: &SimulationReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Model {} | candidates {} | seats {} | voters {} | runs {} | seed {}\n\n",
        report.config.kind.as_str(),
        report.config.candidates,
        report.config.seats,
        report.config.voters,
        report.counts.runs,
        report.config.seed,
    ));
    let line = |label: &str, p: multitally::simulation::Percentage| {
        format!(
            "{label:<34} {:>6}%  ({} of {})\n",
            p.display_1dp(),
            p.count,
            p.total
        )
    };
    out.push_str(&line("Same winner sets", report.pct_same_winners()));
    out.push_str(&line("Differ by one winner", report.pct_diff(1)));
    if report.config.seats >= 2 {
        out.push_str(&line("Differ by two winners", report.pct_diff(2)));
    }
    out.push_str(&line("Condorcet committee exists", report.pct_cc_exists()));
    out.push_str(&line("Seq RCV selects committee", report.pct_rcv_cc()));
    out.push_str(&line("STV selects committee", report.pct_stv_cc()));
    out.push_str(&line(
        "Avg misrepresentation, seq RCV",
        report.avg_misrep_rcv(),
    ));
    out.push_str(&line("Avg misrepresentation, STV", report.avg_misrep_stv()));
    out.push_str(&line("Avg maximal rep., seq RCV", report.avg_maxrep_rcv()));
    out.push_str(&line("Avg maximal rep., STV", report.avg_maxrep_stv()));
    out.push_str(&format!(
        "Excluded (lot-resolved) runs       {:>6}\n",
        report.counts.excluded_ties
    ));
    out
}

pub fn render_batch(outcome: &BatchOutcome) -> String {
    let mut out = String::new();
    for record in &outcome.records {
        out.push_str(&format!(
            "{}: seats {}, diff {}, seqrcv [{}], stv [{}]{}\n",
            record.file,
            record.seats,
            record.diff,
            record.rcv_winners.join(", "),
            record.stv_winners.join(", "),
            if record.lot_used { " (lot used)" } else { "" }
        ));
    }
    let agg = &outcome.aggregate;
    out.push_str(&format!(
        "\n{} elections analyzed ({} failed), {} with differing winner sets\n",
        agg.elections, agg.failures, agg.differing
    ));
    for (diff, count) in &agg.diff_hist {
        out.push_str(&format!("  diff {diff}: {count}\n"));
    }
    out.push_str(&format!(
        "Committee exists in {}; chosen by seqrcv {}, by STV {}\n",
        agg.cc_exists, agg.rcv_cc, agg.stv_cc
    ));
    if agg.party_comparable > 0 {
        out.push_str(&format!(
            "Parties: STV broader in {}, seqrcv broader in {} (of {} comparable)\n",
            agg.stv_more_parties, agg.rcv_more_parties, agg.party_comparable
        ));
    }
    out
}
