//! Acceptance gate: every release-blocking check, one per criterion,
//! each printing a PASS line on success (run with `--nocapture` to see
//! them; any failure fails the test).
//!
//! Statistical thresholds are frozen here:
//! * simulation agreement rates must land within ±2.0 percentage points
//!   of the reference values at 20,000 runs (reference sampling error is
//!   ~0.3pp, so the window is ~7 sigma);
//! * the impartial-culture sampler must pass a chi-square test at
//!   significance 1e-6 over 1e6 draws (critical value 35.8882 at 5
//!   degrees of freedom);
//! * the urn sampler's composition frequencies must sit within 3 sigma
//!   of uniform.

use multitally::ballots::{parse_blt, serialize_blt};
use multitally::genmodels::{
    construct_disjoint, replica_rng, sample_iac_with, sample_ic_with, unrank_permutation,
    CultureKind,
};
use multitally::metrics::{
    committees_from_matrix, condorcet_committee, degree_of_maximal_representation,
    degree_of_misrepresentation, pairwise_matrix, winner_set_diff,
};
use multitally::simulation::{run_experiment, ExperimentConfig};
use multitally::tally::{irv, sequential_rcv, stv, RoundTable, TiePolicy};
use multitally::{CandidateId, Election, PreferenceProfile};
use num::{BigRational, Signed, Zero};
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

fn fixture(name: &str) -> Election {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    parse_blt(&text).unwrap_or_else(|e| panic!("{path:?}: {e}"))
}

fn policy() -> TiePolicy {
    TiePolicy::backward_then_lot(1)
}

fn names(profile: &PreferenceProfile, set: &BTreeSet<CandidateId>) -> BTreeSet<String> {
    set.iter()
        .map(|c| profile.candidate_name(*c).to_string())
        .collect()
}

fn name_set(names_list: &[&str]) -> BTreeSet<String> {
    names_list.iter().map(|s| s.to_string()).collect()
}

fn rational(v: u64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn approx_pct(value: &BigRational, expected: f64, tolerance: f64) -> bool {
    let v = value.numer().to_string().parse::<f64>().unwrap()
        / value.denom().to_string().parse::<f64>().unwrap();
    (v - expected).abs() <= tolerance
}

fn report(criterion: &str, detail: &str) {
    println!("acceptance {criterion}: PASS ({detail})");
}

/// Criterion 1: golden tabulations on the printed fixtures, exact winner
/// sets, exact round values, display-tolerance checks where stated.
#[test]
fn criterion_1_golden_tabulations() {
    let started = Instant::now();

    // Four-candidate fixture, IRV: winner C with the exact by-round table.
    let fourcand = fixture("fourcand.blt");
    let profile = fourcand.profile();
    let outcome = irv(profile, &policy());
    assert_eq!(outcome.winner_names(profile), ["C"]);
    let rounds = &outcome.tables[0].rounds;
    let series = |name: &str| -> Vec<u64> {
        let id = CandidateId(
            profile
                .candidate_names()
                .iter()
                .position(|n| n == name)
                .unwrap(),
        );
        rounds
            .iter()
            .filter_map(|r| r.totals.get(&id))
            .map(|w| w.to_integer().try_into().unwrap())
            .collect()
    };
    assert_eq!(series("A"), [3700, 3700, 3700]);
    assert_eq!(series("B"), [1801]);
    assert_eq!(series("C"), [2498, 3399, 4000]);
    assert_eq!(series("D"), [2001, 2901]);

    // Sequential RCV: {C, D} at two seats, {A, C, D} at three.
    let seq2 = sequential_rcv(&fourcand, &policy()).unwrap();
    assert_eq!(names(profile, &seq2.winner_set()), name_set(&["C", "D"]));
    let three = fourcand.with_seats(3).unwrap();
    let seq3 = sequential_rcv(&three, &policy()).unwrap();
    assert_eq!(
        names(profile, &seq3.winner_set()),
        name_set(&["A", "C", "D"])
    );

    // STV: {A, B}, quota 3334, B's final total within 0.01 of 3557.11.
    let stv2 = stv(&fourcand, &policy());
    assert_eq!(stv2.quota, Some(3334));
    assert_eq!(names(profile, &stv2.winner_set()), name_set(&["A", "B"]));
    let b_final = stv2.tables[0]
        .rounds
        .last()
        .unwrap()
        .totals
        .get(&CandidateId(1))
        .unwrap()
        .clone();
    let reference = BigRational::new(355_711.into(), 100.into());
    let delta = (b_final - reference).abs();
    assert!(delta <= BigRational::new(1.into(), 100.into()));

    // Crossover fixture: IRV winner C4 on a 5002-4998 final round; STV
    // elects everyone else.
    let crossover = fixture("disjoint5.blt");
    let profile5 = crossover.profile();
    let irv5 = irv(profile5, &policy());
    assert_eq!(irv5.winner_names(profile5), ["C4"]);
    let last = irv5.tables[0].rounds.last().unwrap();
    assert_eq!(last.totals[&CandidateId(3)], rational(5002));
    assert_eq!(last.totals[&CandidateId(0)], rational(4998));
    let stv5 = stv(&crossover, &policy());
    assert_eq!(
        names(profile5, &stv5.winner_set()),
        name_set(&["C1", "C2", "C3", "C5"])
    );

    // Genola: the two methods split the second seat; degrees match the
    // reference values to 0.05 percentage points.
    let genola = fixture("genola2021.blt");
    let profile_g = genola.profile();
    let seq_g = sequential_rcv(&genola, &policy()).unwrap();
    assert_eq!(
        names(profile_g, &seq_g.winner_set()),
        name_set(&["Lundberg", "Robison"])
    );
    let stv_g = stv(&genola, &policy());
    assert_eq!(
        names(profile_g, &stv_g.winner_set()),
        name_set(&["Hughes", "Robison"])
    );
    let mis_rcv = degree_of_misrepresentation(profile_g, 2, &seq_g.winner_set()).unwrap();
    let mis_stv = degree_of_misrepresentation(profile_g, 2, &stv_g.winner_set()).unwrap();
    let max_rcv = degree_of_maximal_representation(profile_g, 2, &seq_g.winner_set()).unwrap();
    let max_stv = degree_of_maximal_representation(profile_g, 2, &stv_g.winner_set()).unwrap();
    assert!(approx_pct(&mis_rcv, 3.4, 0.05));
    assert!(approx_pct(&mis_stv, 1.1, 0.05));
    assert!(approx_pct(&max_rcv, 46.3, 0.05));
    assert!(approx_pct(&max_stv, 36.0, 0.05));

    // Two-bloc fixture: proportional vs excellence split, exact degrees.
    let twobloc = fixture("twobloc.blt");
    let profile_t = twobloc.profile();
    let stv_t = stv(&twobloc, &policy());
    assert_eq!(names(profile_t, &stv_t.winner_set()), name_set(&["A", "C"]));
    let seq_t = sequential_rcv(&twobloc, &policy()).unwrap();
    assert_eq!(names(profile_t, &seq_t.winner_set()), name_set(&["A", "B"]));
    let committee = condorcet_committee(profile_t, 2)
        .unwrap()
        .committee
        .unwrap();
    assert_eq!(names(profile_t, &committee), name_set(&["A", "B"]));
    assert_eq!(
        degree_of_misrepresentation(profile_t, 2, &seq_t.winner_set()).unwrap(),
        rational(48)
    );
    assert_eq!(
        degree_of_maximal_representation(profile_t, 2, &seq_t.winner_set()).unwrap(),
        rational(52)
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 1, "took {elapsed:?}, budget 1s");
    report("1 (golden tabulations)", &format!("{elapsed:?}"));
}

/// Criterion 2: the disjoint-winner generator holds for 2..=5 seats with
/// no lot drawn.
#[test]
fn criterion_2_disjoint_construction() {
    let started = Instant::now();
    for seats in 2..=5usize {
        let election = construct_disjoint(seats, 10_000).unwrap();
        let seq = sequential_rcv(&election, &policy()).unwrap();
        let stv_outcome = stv(&election, &policy());
        assert!(
            !seq.lot_used && !stv_outcome.lot_used,
            "lot used at {seats} seats"
        );
        assert_eq!(
            winner_set_diff(&seq.winner_set(), &stv_outcome.winner_set()).unwrap(),
            seats,
            "winner sets overlap at {seats} seats"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 5, "took {elapsed:?}, budget 5s");
    report(
        "2 (disjoint construction, seats 2..=5)",
        &format!("{elapsed:?}"),
    );
}

/// Criterion 3: reduced-scale reproduction of the simulation statistics.
#[test]
fn criterion_3_simulation_reproduction() {
    let started = Instant::now();

    let ic = ExperimentConfig::new(CultureKind::ImpartialCulture, 3, 2, 1001, 20_000, 271_828);
    let ic_report = run_experiment(&ic).unwrap();
    let same = ic_report.pct_same_winners().value().unwrap();
    assert!(
        (same - 78.8).abs() <= 2.0,
        "IC 3,2 same-winner rate {same:.2} outside 78.8 +/- 2.0"
    );
    let rcv_cc = ic_report.pct_rcv_cc().value().unwrap();
    assert!(
        rcv_cc >= 99.0,
        "IC 3,2 RCV committee rate {rcv_cc:.2} < 99.0"
    );

    let iac = ExperimentConfig::new(
        CultureKind::ImpartialAnonymousCulture,
        4,
        2,
        1001,
        20_000,
        314_159,
    );
    let iac_report = run_experiment(&iac).unwrap();
    let same_iac = iac_report.pct_same_winners().value().unwrap();
    assert!(
        (same_iac - 65.1).abs() <= 2.0,
        "IAC 4,2 same-winner rate {same_iac:.2} outside 65.1 +/- 2.0"
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}, budget 10min");
    report(
        "3 (simulation reproduction)",
        &format!(
            "IC 3,2 same {same:.2}% rcv_cc {rcv_cc:.2}%; IAC 4,2 same {same_iac:.2}%; {elapsed:?}"
        ),
    );
}

/// Criterion 4, part 1: IAC composition frequencies for 2 candidates and
/// 3 voters are uniform over the 4 compositions within 3 sigma across
/// 200,000 seeds. The oracle is the exhaustive composition enumeration:
/// (0,3), (1,2), (2,1), (3,0).
#[test]
fn criterion_4_sampler_correctness() {
    let started = Instant::now();

    let seeds = 200_000u64;
    let mut composition_counts = [0u64; 4];
    for seed in 0..seeds {
        let mut rng = replica_rng(40_000, seed);
        let profile = sample_iac_with(2, 3, &mut rng);
        // First-type count identifies the composition (v1, 3 - v1).
        let first = profile
            .entries()
            .iter()
            .find(|(b, _)| b.ranking()[0] == CandidateId(0))
            .map(|(_, count)| *count)
            .unwrap_or(0);
        composition_counts[first as usize] += 1;
    }
    // sigma = sqrt(p(1-p)/N) with p = 1/4.
    let three_sigma = 3.0 * (0.25 * 0.75 / seeds as f64).sqrt();
    for (i, &count) in composition_counts.iter().enumerate() {
        let freq = count as f64 / seeds as f64;
        assert!(
            (freq - 0.25).abs() <= three_sigma,
            "composition {i} frequency {freq:.5} outside 0.25 +/- {three_sigma:.5}"
        );
    }

    // Part 2: IC chi-square over 1e6 draws of 3-candidate rankings.
    // Critical value for 5 degrees of freedom at significance 1e-6.
    let draws = 1_000_000u64;
    let mut rng = replica_rng(50_000, 0);
    let profile = sample_ic_with(3, draws, &mut rng);
    let mut type_counts = [0u64; 6];
    for (ballot, count) in profile.entries() {
        let index = (0..6)
            .find(|&i| {
                unrank_permutation(i as u64, 3)
                    .iter()
                    .zip(ballot.ranking())
                    .all(|(a, b)| a == b)
            })
            .unwrap();
        type_counts[index] += count;
    }
    let expected = draws as f64 / 6.0;
    let statistic: f64 = type_counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    const CHI2_CRIT_DF5_1E6: f64 = 35.8882;
    assert!(
        statistic < CHI2_CRIT_DF5_1E6,
        "IC chi-square statistic {statistic:.3} exceeds {CHI2_CRIT_DF5_1E6}"
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}, budget 2min");
    report(
        "4 (sampler correctness)",
        &format!("chi2 {statistic:.2}; {elapsed:?}"),
    );
}

fn check_table_conservation(table: &RoundTable, total: &BigRational) {
    for round in &table.rounds {
        let credited: BigRational = round
            .totals
            .values()
            .chain(round.retained.values())
            .fold(BigRational::zero(), |acc, w| acc + w);
        assert_eq!(&credited + &round.exhausted, *total, "round leaks weight");
    }
}

/// Criterion 5: the bundled property suites.
#[test]
fn criterion_5_property_suites() {
    let started = Instant::now();

    // Exact per-round vote conservation on fixtures and random elections.
    let mut conservation_checks = 0usize;
    let mut check_election = |election: &Election| {
        let total = election.profile().total_weight();
        let seq = sequential_rcv(election, &policy()).unwrap();
        for table in &seq.tables {
            // Candidate removal shrinks the electorate between seats;
            // each table conserves its own reduced total.
            let table_total = table
                .rounds
                .first()
                .map(|r| {
                    r.totals
                        .values()
                        .fold(r.exhausted.clone(), |acc, w| acc + w)
                })
                .unwrap();
            check_table_conservation(table, &table_total);
        }
        let stv_outcome = stv(election, &policy());
        check_table_conservation(&stv_outcome.tables[0], &total);
        conservation_checks += 1;
    };
    for name in [
        "fourcand.blt",
        "twobloc.blt",
        "disjoint5.blt",
        "genola2021.blt",
    ] {
        check_election(&fixture(name));
    }
    for seed in 0..50 {
        let mut rng = replica_rng(70_001, seed);
        let profile = sample_ic_with(4, 200, &mut rng);
        check_election(&Election::new(profile, 2).unwrap());
    }

    // Three-method agreement at a single seat: all fixtures, then 1,000
    // random elections, skipping lot-resolved runs.
    for name in [
        "fourcand.blt",
        "twobloc.blt",
        "disjoint5.blt",
        "genola2021.blt",
    ] {
        let election = fixture(name).with_seats(1).unwrap();
        let irv_outcome = irv(election.profile(), &policy());
        let seq = sequential_rcv(&election, &policy()).unwrap();
        let stv_outcome = stv(&election, &policy());
        assert!(!irv_outcome.lot_used && !seq.lot_used && !stv_outcome.lot_used);
        assert_eq!(irv_outcome.winners, seq.winners, "{name}");
        assert_eq!(irv_outcome.winners, stv_outcome.winners, "{name}");
    }
    let mut agreements = 0u32;
    for seed in 0..1000u64 {
        let n = 3 + (seed % 4) as usize;
        let mut rng = replica_rng(81_000, seed);
        let profile = sample_ic_with(n, 1001, &mut rng);
        let election = Election::new(profile, 1).unwrap();
        let irv_outcome = irv(election.profile(), &policy());
        let seq = sequential_rcv(&election, &policy()).unwrap();
        let stv_outcome = stv(&election, &policy());
        if irv_outcome.lot_used || seq.lot_used || stv_outcome.lot_used {
            continue;
        }
        assert_eq!(
            irv_outcome.winners, seq.winners,
            "IRV vs seqRCV at seed {seed}"
        );
        assert_eq!(
            irv_outcome.winners, stv_outcome.winners,
            "IRV vs STV at seed {seed}"
        );
        agreements += 1;
    }
    assert!(
        agreements >= 900,
        "too many lot-resolved runs: {agreements}"
    );

    // Committee uniqueness over 10,000 random profiles: exhaustive
    // enumeration never finds two committees of one size.
    for seed in 0..10_000u64 {
        let n = 3 + (seed % 4) as usize;
        let mut rng = replica_rng(92_000, seed);
        let profile = sample_ic_with(n, 51, &mut rng);
        let matrix = pairwise_matrix(&profile);
        let candidates = profile.active_candidates();
        for size in 1..n {
            let found = committees_from_matrix(&matrix, &candidates, size);
            assert!(
                found.len() <= 1,
                "two committees of size {size} at seed {seed}"
            );
        }
    }

    // BLT round-trip across the fixture corpus.
    for name in [
        "fourcand.blt",
        "twobloc.blt",
        "disjoint5.blt",
        "genola2021.blt",
    ] {
        let election = fixture(name);
        let text = serialize_blt(&election);
        assert_eq!(parse_blt(&text).unwrap(), election, "{name} round-trip");
    }

    // Worker-count independence.
    let mut config = ExperimentConfig::new(CultureKind::ImpartialCulture, 4, 2, 101, 600, 5150);
    config.workers = 1;
    let serial = run_experiment(&config).unwrap();
    for workers in [0usize, 2, 5] {
        let mut parallel = config.clone();
        parallel.workers = workers;
        assert_eq!(
            serial.counts,
            run_experiment(&parallel).unwrap().counts,
            "report changed with {workers} workers"
        );
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "took {elapsed:?}, budget 5min");
    report(
        "5 (property suites)",
        &format!("{conservation_checks} conservation checks; {elapsed:?}"),
    );
}
