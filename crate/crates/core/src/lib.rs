//! Control problems for range voting and normalized range voting.
//!
//! Exact tallies use rational arithmetic throughout:
//!
//! ```
//! use rangevote::{election::candidates, BallotGroup, Election, Score, System};
//!
//! let ids = candidates(&["a", "b", "c"]).unwrap();
//! let groups = vec![
//!     BallotGroup::new(5, vec![2, 0, 1]),
//!     BallotGroup::new(6, vec![0, 2, 0]),
//!     BallotGroup::new(4, vec![1, 2, 0]),
//! ];
//! let e = Election::new(2, ids, groups).unwrap();
//! let rv = e.tally(System::Rv);
//! assert_eq!(rv.total("a"), Some(Score::from_int(14)));
//! assert_eq!(rv.total("c"), Some(Score::from_int(5)));
//! // a has 14 points but b has 20, so b wins outright.
//! assert_eq!(rv.total("b"), Some(Score::from_int(20)));
//! assert_eq!(rv.unique_winner().map(|c| c.as_str()), Some("b"));
//! ```

pub mod audit;
pub mod control;
pub mod election;
pub mod gadgets;
pub mod oracles;
pub mod problems;
pub mod score;

pub use control::{
    ControlError, ControlInstance, ControlOutcome, Decision, Family, Goal, InstanceParams, SolveOptions,
    TieModel, Witness,
};
pub use election::{BallotGroup, Candidate, Election, ElectionError, System, Tally};
pub use problems::{HittingSetInstance, ProblemError, X3CInstance};
pub use score::Score;
