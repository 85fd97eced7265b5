use super::*;
use crate::numeric::rational;

/// Four-candidate profile with heavy truncation: A/B/C/D, V = 10000.
pub(crate) fn four_candidate_profile() -> PreferenceProfile {
    let names = ["A", "B", "C", "D"].map(String::from).to_vec();
    let rankings: &[(u64, Vec<usize>)] = &[
        (1799, vec![0, 1]),
        (1801, vec![0, 1, 2, 3]),
        (100, vec![0, 2, 3]),
        (901, vec![1, 2, 0, 3]),
        (900, vec![1, 3]),
        (498, vec![2, 1, 3, 0]),
        (2000, vec![2, 3, 0]),
        (1400, vec![3, 1]),
        (601, vec![3, 2]),
    ];
    let entries = rankings
        .iter()
        .map(|(count, r)| {
            let ids = r.iter().map(|&i| CandidateId(i)).collect();
            (Ballot::new(ids).unwrap(), *count)
        })
        .collect();
    PreferenceProfile::new(4, names, entries).unwrap()
}

/// 2021 Genola city council profile: Hughes/Lundberg/Robison, V = 378.
pub(crate) fn genola_profile() -> PreferenceProfile {
    let names = ["Hughes", "Lundberg", "Robison"].map(String::from).to_vec();
    let rankings: &[(u64, Vec<usize>)] = &[
        (13, vec![0]),
        (58, vec![0, 1, 2]),
        (22, vec![0, 2, 1]),
        (4, vec![1]),
        (24, vec![1, 0, 2]),
        (60, vec![1, 2, 0]),
        (15, vec![2]),
        (86, vec![2, 0, 1]),
        (96, vec![2, 1, 0]),
    ];
    let entries = rankings
        .iter()
        .map(|(count, r)| {
            let ids = r.iter().map(|&i| CandidateId(i)).collect();
            (Ballot::new(ids).unwrap(), *count)
        })
        .collect();
    PreferenceProfile::new(3, names, entries).unwrap()
}

fn ids(indices: &[usize]) -> BTreeSet<CandidateId> {
    indices.iter().map(|&i| CandidateId(i)).collect()
}

#[test]
fn four_candidate_profile_counts() {
    let p = four_candidate_profile();
    assert_eq!(p.total_voters(), 10_000);
    assert_eq!(p.num_candidates(), 4);
}

#[test]
fn first_place_totals_all_continuing() {
    let p = four_candidate_profile();
    let fp = first_place_totals(&p, &ids(&[0, 1, 2, 3]));
    assert_eq!(fp.totals[&CandidateId(0)], rational(3700));
    assert_eq!(fp.totals[&CandidateId(1)], rational(1801));
    assert_eq!(fp.totals[&CandidateId(2)], rational(2498));
    assert_eq!(fp.totals[&CandidateId(3)], rational(2001));
    assert_eq!(fp.exhausted, rational(0));
}

#[test]
fn first_place_totals_two_continuing() {
    let p = four_candidate_profile();
    let fp = first_place_totals(&p, &ids(&[0, 2]));
    assert_eq!(fp.totals[&CandidateId(0)], rational(3700));
    assert_eq!(fp.totals[&CandidateId(2)], rational(4000));
    assert_eq!(fp.exhausted, rational(2300));
}

#[test]
fn first_place_totals_single_ballot() {
    let p = PreferenceProfile::from_rankings(2, &[(1, vec![0, 1])]).unwrap();
    let fp = first_place_totals(&p, &ids(&[1]));
    assert_eq!(fp.totals[&CandidateId(1)], rational(1));
    assert_eq!(fp.exhausted, rational(0));
}

#[test]
fn remove_candidate_shifts_rankings() {
    let p = four_candidate_profile();
    let removed = remove_candidates(&p, &ids(&[2])).unwrap();
    assert_eq!(removed.dropped_ballots, 0);
    assert_eq!(removed.profile.total_voters(), 10_000);
    // The 498-voter (C,B,D,A) ballot becomes (B,D,A).
    let shifted = removed
        .profile
        .entries()
        .iter()
        .find(|(_, count)| *count == 498)
        .unwrap();
    assert_eq!(
        shifted.0.ranking(),
        &[CandidateId(1), CandidateId(3), CandidateId(0)]
    );
    let fp = first_place_totals(&removed.profile, &ids(&[0, 1, 3]));
    assert_eq!(fp.totals[&CandidateId(0)], rational(3700));
    assert_eq!(fp.totals[&CandidateId(1)], rational(2299));
    assert_eq!(fp.totals[&CandidateId(3)], rational(4001));
}

#[test]
fn remove_candidate_drops_exhausted_ballots() {
    let p = genola_profile();
    let removed = remove_candidates(&p, &ids(&[2])).unwrap();
    assert_eq!(removed.dropped_ballots, 15);
    assert_eq!(removed.profile.total_voters(), 363);
    assert_eq!(removed.profile.withdrawn(), &ids(&[2]));
}

#[test]
fn remove_nothing_is_identity() {
    let p = four_candidate_profile();
    let removed = remove_candidates(&p, &BTreeSet::new()).unwrap();
    assert_eq!(removed.profile, p);
    assert_eq!(removed.dropped_ballots, 0);
}

#[test]
fn remove_everything_is_an_error() {
    let p = genola_profile();
    assert_eq!(
        remove_candidates(&p, &ids(&[0, 1, 2])),
        Err(ProfileError::AllCandidatesRemoved)
    );
}

#[test]
fn ballot_rejects_duplicates_and_empty() {
    assert_eq!(
        Ballot::new(vec![CandidateId(0), CandidateId(0)]),
        Err(ProfileError::DuplicateCandidate(0))
    );
    assert_eq!(Ballot::new(vec![]), Err(ProfileError::EmptyRanking));
}

#[test]
fn election_rejects_bad_seat_counts() {
    let p = genola_profile();
    assert!(Election::new(p.clone(), 0).is_err());
    assert!(Election::new(p.clone(), 3).is_err());
    assert!(Election::new(p, 2).is_ok());
}

#[test]
fn merging_preserves_totals() {
    let p = PreferenceProfile::from_rankings(3, &[(2, vec![0, 1]), (3, vec![0, 1]), (1, vec![2])])
        .unwrap();
    let merged = p.merged();
    assert_eq!(merged.entries().len(), 2);
    assert_eq!(merged.total_voters(), 6);
    let fp_before = first_place_totals(&p, &ids(&[0, 1, 2]));
    let fp_after = first_place_totals(&merged, &ids(&[0, 1, 2]));
    assert_eq!(fp_before, fp_after);
}

mod blt_files {
    use super::*;
    use crate::ballots::{parse_blt, serialize_blt, BltError};

    const GENOLA: &str = "3 2\n13 1 0\n58 1 2 3 0\n22 1 3 2 0\n4 2 0\n24 2 1 3 0\n60 2 3 1 0\n15 3 0\n86 3 1 2 0\n96 3 2 1 0\n0\n\"Hughes\"\n\"Lundberg\"\n\"Robison\"\n\"2021 Genola City Council\"\n";

    #[test]
    fn parses_genola() {
        let election = parse_blt(GENOLA).unwrap();
        assert_eq!(election.profile().num_candidates(), 3);
        assert_eq!(election.seats(), 2);
        assert_eq!(election.profile().total_voters(), 378);
        assert_eq!(election.profile(), &genola_profile());
        assert_eq!(election.title(), "2021 Genola City Council");
    }

    #[test]
    fn parses_crlf() {
        let crlf = GENOLA.replace('\n', "\r\n");
        assert_eq!(parse_blt(&crlf).unwrap(), parse_blt(GENOLA).unwrap());
    }

    #[test]
    fn round_trips() {
        let election = parse_blt(GENOLA).unwrap();
        let text = serialize_blt(&election);
        assert_eq!(text, GENOLA);
        assert_eq!(parse_blt(&text).unwrap(), election);
    }

    #[test]
    fn rejects_single_candidate_election() {
        let text = "1 1\n1 1 0\n0\n\"A\"\n\"t\"\n";
        assert_eq!(
            parse_blt(text),
            Err(BltError::SeatsOutOfRange {
                seats: 1,
                candidates: 1
            })
        );
    }

    #[test]
    fn rejects_explicit_ties_distinctly() {
        let text = "3 2\n4 1=2 3 0\n0\n\"A\"\n\"B\"\n\"C\"\n\"t\"\n";
        assert_eq!(parse_blt(text), Err(BltError::ExplicitTie { line: 2 }));
    }

    #[test]
    fn rejects_duplicate_candidate_in_ballot() {
        let text = "3 2\n4 1 2 1 0\n0\n\"A\"\n\"B\"\n\"C\"\n\"t\"\n";
        assert_eq!(
            parse_blt(text),
            Err(BltError::DuplicateCandidate { line: 2, index: 1 })
        );
    }

    #[test]
    fn rejects_out_of_range_candidate() {
        let text = "3 2\n4 1 5 0\n0\n\"A\"\n\"B\"\n\"C\"\n\"t\"\n";
        assert!(matches!(
            parse_blt(text),
            Err(BltError::CandidateOutOfRange {
                line: 2,
                index: 5,
                ..
            })
        ));
    }

    #[test]
    fn rejects_missing_sentinel() {
        let text = "3 2\n4 1 2\n0\n\"A\"\n\"B\"\n\"C\"\n\"t\"\n";
        assert_eq!(parse_blt(text), Err(BltError::MissingSentinel { line: 2 }));
    }

    #[test]
    fn rejects_malformed_header() {
        assert!(matches!(
            parse_blt("3\n0\n"),
            Err(BltError::MalformedHeader { line: 1 })
        ));
    }

    #[test]
    fn withdrawn_candidates_are_removed_on_ingestion() {
        let text = "3 1\n-3\n13 1 0\n58 1 2 3 0\n15 3 0\n4 2 0\n0\n\"A\"\n\"B\"\n\"C\"\n\"t\"\n";
        let election = parse_blt(text).unwrap();
        let profile = election.profile();
        assert_eq!(profile.withdrawn(), &ids(&[2]));
        // The C-only ballot is dropped, C disappears from rankings.
        assert_eq!(profile.total_voters(), 75);
        assert!(profile
            .entries()
            .iter()
            .all(|(b, _)| !b.ranking().contains(&CandidateId(2))));
        // Withdrawn line survives a round-trip.
        let text2 = serialize_blt(&election);
        assert!(text2.lines().nth(1) == Some("-3"));
        assert_eq!(parse_blt(&text2).unwrap(), election);
    }

    #[test]
    fn parses_party_suffixes() {
        let text = "2 1\n3 1 2 0\n0\n\"Morrison (Con)\"\n\"Melville (LD)\"\n\"Ward\"\n";
        let election = parse_blt(text).unwrap();
        assert_eq!(
            election.profile().candidate_name(CandidateId(0)),
            "Morrison"
        );
        assert_eq!(election.profile().party(CandidateId(0)), Some("Con"));
        assert_eq!(election.profile().party(CandidateId(1)), Some("LD"));
        assert_eq!(serialize_blt(&election), text);
    }
}
