//! Multiwinner ranked-choice tabulation and comparison.
//!
//! This crate tabulates preference-ballot elections under three methods
//! (instant runoff voting, sequential ranked-choice voting, and the
//! single transferable vote) using exact rational arithmetic end-to-end,
//! so results are deterministic and platform-independent.
//!
//! On top of the tabulators it provides:
//!
//! * [`ballots`]: the ballot data model, BLT file parsing/serialization,
//!   and profile transformations (candidate removal, first-preference
//!   counts).
//! * [`tally`]: the three tabulation methods with round-by-round audit
//!   tables and a seeded, reproducible tie-break policy.
//! * [`metrics`]: head-to-head comparison matrices under the weak-order
//!   model of partial ballots, Condorcet committees, representation
//!   degrees, winner-set differences, and party-diversity counts.
//! * [`genmodels`]: random election generation under the impartial
//!   culture and impartial anonymous culture models, plus a constructive
//!   generator for elections whose sequential-RCV and STV winner sets are
//!   disjoint.
//! * [`simulation`]: a Monte Carlo harness that compares the two
//!   multiwinner methods over many sampled elections, and a batch driver
//!   for corpora of BLT files.
//!
//! Simulation replicas are embarrassingly parallel; with the default
//! `parallel` feature they run on a rayon pool, and reports are
//! bit-identical regardless of worker count because every replica derives
//! its own RNG stream and aggregation uses only integer counters.

pub mod ballots;
pub mod genmodels;
pub mod metrics;
pub mod numeric;
pub mod simulation;
pub mod tally;

pub use ballots::{Ballot, CandidateId, Election, PreferenceProfile};
pub use tally::{droop_quota, irv, sequential_rcv, stv, TallyOutcome, TiePolicy};
