//! BLT ballot-file parsing and serialization.
//!
//! The accepted grammar, in file order:
//!
//! ```text
//! <n> <seats>                       header
//! -i -j ...                         optional: withdrawn candidates (1-based)
//! <count> <c1> ... <ck> 0           one line per ballot type, 1-based ids
//! 0                                 end of ballots
//! "<candidate name>"                n lines; a trailing " (PARTY)" suffix
//!                                   is parsed as party metadata
//! "<election title>"
//! ```
//!
//! Both `\n` and `\r\n` line endings are accepted; output always uses `\n`.
//! Explicit ballot ties (`=` between ids, found in some BLT dialects) are
//! rejected with a dedicated error. Withdrawn candidates are removed from
//! every ranking on ingestion, exactly as if `remove_candidates` had been
//! applied, and stay marked withdrawn in the resulting profile.

use super::{remove_candidates, Ballot, CandidateId, Election, PreferenceProfile, ProfileError};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum BltError {
    #[error("line {line}: malformed header, expected \"<candidates> <seats>\"")]
    MalformedHeader { line: usize },
    #[error("line {line}: explicit ballot ties (`=`) are not supported")]
    ExplicitTie { line: usize },
    #[error("line {line}: malformed ballot line")]
    MalformedBallot { line: usize },
    #[error("line {line}: ballot line is missing its terminating 0")]
    MissingSentinel { line: usize },
    #[error("line {line}: ballot count must be a positive integer")]
    BadCount { line: usize },
    #[error("line {line}: candidate index {index} out of range 1..={num_candidates}")]
    CandidateOutOfRange {
        line: usize,
        index: i64,
        num_candidates: usize,
    },
    #[error("line {line}: candidate {index} ranked more than once")]
    DuplicateCandidate { line: usize, index: usize },
    #[error("line {line}: ballot ranks no candidates")]
    EmptyRanking { line: usize },
    #[error("seat count {seats} must satisfy 1 <= seats < {candidates}")]
    SeatsOutOfRange { seats: usize, candidates: usize },
    #[error("line {line}: malformed withdrawn-candidate line")]
    MalformedWithdrawn { line: usize },
    #[error("unexpected end of file: {expected}")]
    UnexpectedEof { expected: &'static str },
    #[error("line {line}: expected a double-quoted string")]
    BadQuotedLine { line: usize },
    #[error("line {line}: unexpected content after the election title")]
    TrailingContent { line: usize },
    #[error("invalid profile: {0}")]
    Profile(#[from] ProfileError),
}

struct Lines<'a> {
    inner: std::str::Lines<'a>,
    number: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines(),
            number: 0,
        }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        self.inner.next().map(|raw| {
            self.number += 1;
            (self.number, raw.strip_suffix('\r').unwrap_or(raw))
        })
    }
}

/// Parses BLT text into an [`Election`].
pub fn parse_blt(text: &str) -> Result<Election, BltError> {
    let mut lines = Lines::new(text);

    let (line_no, header) = lines.next().ok_or(BltError::UnexpectedEof {
        expected: "header line",
    })?;
    let mut tokens = header.split_whitespace();
    let num_candidates: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .filter(|&n| n >= 1)
        .ok_or(BltError::MalformedHeader { line: line_no })?;
    let seats: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(BltError::MalformedHeader { line: line_no })?;
    if tokens.next().is_some() {
        return Err(BltError::MalformedHeader { line: line_no });
    }
    if seats < 1 || seats >= num_candidates {
        return Err(BltError::SeatsOutOfRange {
            seats,
            candidates: num_candidates,
        });
    }

    let mut withdrawn: BTreeSet<CandidateId> = BTreeSet::new();
    let mut entries: Vec<(Ballot, u64)> = Vec::new();
    let mut first_ballot_line = true;
    loop {
        let (line_no, line) = lines.next().ok_or(BltError::UnexpectedEof {
            expected: "ballot lines terminated by a lone 0",
        })?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(BltError::MalformedBallot { line: line_no });
        }
        // An optional line of negative indices marks withdrawn candidates.
        if first_ballot_line && tokens.iter().all(|t| t.starts_with('-')) {
            for token in &tokens {
                let index: i64 = token
                    .parse()
                    .map_err(|_| BltError::MalformedWithdrawn { line: line_no })?;
                let one_based = -index;
                if one_based < 1 || one_based > num_candidates as i64 {
                    return Err(BltError::CandidateOutOfRange {
                        line: line_no,
                        index: one_based,
                        num_candidates,
                    });
                }
                withdrawn.insert(CandidateId(one_based as usize - 1));
            }
            first_ballot_line = false;
            continue;
        }
        first_ballot_line = false;
        if tokens == ["0"] {
            break;
        }
        if line.contains('=') {
            return Err(BltError::ExplicitTie { line: line_no });
        }
        let count: u64 = tokens[0]
            .parse()
            .ok()
            .filter(|&c| c >= 1)
            .ok_or(BltError::BadCount { line: line_no })?;
        if tokens.len() < 2 || *tokens.last().unwrap() != "0" {
            return Err(BltError::MissingSentinel { line: line_no });
        }
        let ranking_tokens = &tokens[1..tokens.len() - 1];
        if ranking_tokens.is_empty() {
            return Err(BltError::EmptyRanking { line: line_no });
        }
        let mut ranking = Vec::with_capacity(ranking_tokens.len());
        let mut seen = BTreeSet::new();
        for token in ranking_tokens {
            let index: i64 = token
                .parse()
                .map_err(|_| BltError::MalformedBallot { line: line_no })?;
            if index < 1 || index > num_candidates as i64 {
                return Err(BltError::CandidateOutOfRange {
                    line: line_no,
                    index,
                    num_candidates,
                });
            }
            let id = CandidateId(index as usize - 1);
            if !seen.insert(id) {
                return Err(BltError::DuplicateCandidate {
                    line: line_no,
                    index: index as usize,
                });
            }
            ranking.push(id);
        }
        let ballot = Ballot::new(ranking)?;
        entries.push((ballot, count));
    }

    let mut names = Vec::with_capacity(num_candidates);
    let mut parties = Vec::with_capacity(num_candidates);
    for _ in 0..num_candidates {
        let (line_no, line) = lines.next().ok_or(BltError::UnexpectedEof {
            expected: "candidate name line",
        })?;
        let raw = unquote(line).ok_or(BltError::BadQuotedLine { line: line_no })?;
        let (name, party) = split_party(raw);
        names.push(name);
        parties.push(party);
    }
    let (line_no, line) = lines.next().ok_or(BltError::UnexpectedEof {
        expected: "election title line",
    })?;
    let title = unquote(line).ok_or(BltError::BadQuotedLine { line: line_no })?;
    while let Some((line_no, rest)) = lines.next() {
        if !rest.trim().is_empty() {
            return Err(BltError::TrailingContent { line: line_no });
        }
    }

    let profile = PreferenceProfile::new(num_candidates, names, entries)?.with_parties(parties)?;
    let profile = if withdrawn.is_empty() {
        profile
    } else {
        remove_candidates(&profile, &withdrawn)?.profile
    };
    let election = Election::new(profile, seats)?.with_title(title);
    Ok(election)
}

/// Serializes an election back to BLT text. Round-trips through
/// [`parse_blt`] up to entry merging; ballot weights are not representable
/// in the format and are assumed to be 1.
pub fn serialize_blt(election: &Election) -> String {
    let profile = election.profile();
    debug_assert!(profile.has_unit_weights());
    let mut out = String::new();
    out.push_str(&format!(
        "{} {}\n",
        profile.num_candidates(),
        election.seats()
    ));
    if !profile.withdrawn().is_empty() {
        let line: Vec<String> = profile
            .withdrawn()
            .iter()
            .map(|c| format!("-{}", c.0 + 1))
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    for (ballot, count) in profile.entries() {
        out.push_str(&count.to_string());
        for c in ballot.ranking() {
            out.push_str(&format!(" {}", c.0 + 1));
        }
        out.push_str(" 0\n");
    }
    out.push_str("0\n");
    for (i, name) in profile.candidate_names().iter().enumerate() {
        match profile.party(CandidateId(i)) {
            Some(party) => out.push_str(&format!("\"{name} ({party})\"\n")),
            None => out.push_str(&format!("\"{name}\"\n")),
        }
    }
    out.push_str(&format!("\"{}\"\n", election.title()));
    out
}

fn unquote(line: &str) -> Option<String> {
    let trimmed = line.trim();
    if trimmed.len() >= 2 && trimmed.starts_with('"') && trimmed.ends_with('"') {
        Some(trimmed[1..trimmed.len() - 1].to_string())
    } else {
        None
    }
}

/// Splits a trailing ` (PARTY)` suffix off a candidate name.
fn split_party(raw: String) -> (String, Option<String>) {
    if raw.ends_with(')') {
        if let Some(open) = raw.rfind(" (") {
            let party = raw[open + 2..raw.len() - 1].to_string();
            if !party.is_empty() {
                return (raw[..open].to_string(), Some(party));
            }
        }
    }
    (raw, None)
}
