//! Refutation of edge orders by angle reasoning.
//!
//! An order on the `C(n,2)` pairs of `n` points fixes, for every triangle,
//! which of its angles are smaller than which. The prover bounds every angle
//! in degrees, tracks for every point and three others which of the four
//! possible configurations they can be in, and propagates until an interval or
//! a configuration set becomes empty. When propagation stalls it splits on
//! the configurations of one point and three others, up to a fixed depth.
//!
//! [`prove`] returns a transcript that [`check::check_proof`] can verify
//! without access to the prover's state.

pub mod check;
pub mod log;
pub mod render;
mod search;
mod setup;
mod state;
pub mod types;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::EdgeOrder;

pub use check::{check_proof, CheckOutcome};
pub use log::{Block, CaseSplit, Entry, Line, LineId, ProofLog, Prop, Tag};
pub use render::{order_text, parse_order_text, render_proof};
pub use state::Propagation;
pub use types::{Alt, Angle, Bnd, Dir, Fact};

use setup::Setup;
use state::State;

/// How much of the order the prover may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    /// every comparison of two sides sharing a vertex
    FullOrder,
    /// only which point is each point's nearest and farthest neighbour
    ExtremalOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProveLimits {
    /// maximum nesting of case splits
    pub max_depth: usize,
    /// maximum number of transcript lines
    pub max_lines: usize,
}

impl Default for ProveLimits {
    fn default() -> Self {
        ProveLimits { max_depth: 3, max_lines: 10_000 }
    }
}

#[derive(Debug, Clone)]
pub enum ProveResult {
    /// every branch ends in a contradiction: the order has no planar realisation
    Refuted(ProofLog),
    /// no refutation within the limits; the log holds the unsplit propagation
    Unknown { log: ProofLog, reason: String },
}

impl ProveResult {
    pub fn is_refuted(&self) -> bool {
        matches!(self, ProveResult::Refuted(_))
    }

    pub fn log(&self) -> &ProofLog {
        match self {
            ProveResult::Refuted(log) | ProveResult::Unknown { log, .. } => log,
        }
    }
}

fn validate(order: &EdgeOrder) -> Result<()> {
    let n = order.n();
    if n < 4 {
        return Err(Error::TooFewPoints { min: 4, got: n });
    }
    if n > 26 {
        return Err(Error::InvalidParameter(format!("at most 26 points can be labelled, got {n}")));
    }
    Ok(())
}

/// Searches for a refutation plan using the premises of `mode`.
fn plan(order: &EdgeOrder, mode: ConstraintMode, limits: ProveLimits) -> (Arc<Setup>, Option<search::Plan>) {
    let setup = Arc::new(Setup::new(order, mode));
    let mut root = State::new(setup.clone(), false);
    root.seed();
    let plan = match root.propagate() {
        Propagation::Contradiction(_) => Some(search::Plan::Closed),
        Propagation::Fixpoint => {
            let slots = search::slot_order(&setup);
            search::solve(&root, &slots, limits.max_depth)
        }
    };
    (setup, plan)
}

/// Tries to show that `order` cannot be realised by points in the plane.
///
/// The case splits are chosen greedily, so a search using the full order can
/// miss a refutation that the extremal premises alone would find. In
/// [`ConstraintMode::FullOrder`] the extremal search is therefore run as a
/// fallback; its transcript is valid under the full order as well.
pub fn prove(order: &EdgeOrder, mode: ConstraintMode, limits: ProveLimits) -> Result<ProveResult> {
    validate(order)?;
    let mut attempts = vec![mode];
    if mode == ConstraintMode::FullOrder {
        attempts.push(ConstraintMode::ExtremalOnly);
    }
    let mut reason = format!("no contradiction within {} nested case splits", limits.max_depth);
    for premises in attempts {
        let (setup, plan) = plan(order, premises, limits);
        if let Some(plan) = plan {
            let mut log = search::replay(setup, &plan);
            log.mode = mode;
            let lines = log.line_count();
            if lines <= limits.max_lines {
                return Ok(ProveResult::Refuted(log));
            }
            reason = format!("a refutation was found but needs {lines} lines, more than the limit of {}", limits.max_lines);
        }
    }
    let mut rec = State::new(Arc::new(Setup::new(order, mode)), true);
    rec.seed();
    rec.propagate();
    let lines = rec.log.take().unwrap_or_default();
    let mut log = ProofLog::empty(order.clone(), mode);
    log.root.entries = lines.into_iter().map(Entry::Line).collect();
    log.note = Some(reason.clone());
    Ok(ProveResult::Unknown { log, reason })
}

/// A recording prover state seeded from an order, for step-by-step use.
#[derive(Debug, Clone)]
pub struct ProverState {
    state: State,
}

/// Seeds a state from `order` without propagating.
pub fn init_state(order: &EdgeOrder, mode: ConstraintMode) -> Result<ProverState> {
    validate(order)?;
    let mut state = State::new(Arc::new(Setup::new(order, mode)), true);
    state.seed();
    Ok(ProverState { state })
}

impl ProverState {
    pub fn propagate(&mut self) -> Propagation {
        self.state.propagate()
    }

    /// Lines recorded so far.
    pub fn lines(&self) -> &[Line] {
        self.state.log.as_deref().unwrap_or(&[])
    }

    /// Current (lower, upper) bound of an angle.
    pub fn bounds(&self, angle: Angle) -> (Bnd, Bnd) {
        self.state.bounds_of(angle)
    }

    /// Whether `fact` is established, excluded or open.
    pub fn status(&self, fact: &Fact) -> Option<bool> {
        let setup = &self.state.setup;
        let slot = setup.slot_id(fact.apex, fact.others);
        self.state.status(slot, setup.alt_index(slot, fact))
    }

    /// Adds `fact` as an assumption line.
    pub fn assume(&mut self, fact: &Fact) {
        let setup = self.state.setup.clone();
        let slot = setup.slot_id(fact.apex, fact.others);
        self.state.assume(slot, setup.alt_index(slot, fact), 0);
    }

    /// Adds a bound on `angle` as a premise line. Returns the contradiction
    /// line if the interval becomes empty.
    pub fn give_bound(&mut self, angle: Angle, dir: Dir, bound: Bnd) -> std::result::Result<(), LineId> {
        let id = self.state.setup.angle_id(angle);
        self.state.give_bound(id, dir, bound)
    }
}
