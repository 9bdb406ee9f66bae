//! Case-split search and transcript replay.

use std::sync::Arc;

use super::log::{Block, CaseSplit, Entry, ProofLog};
use super::setup::{Setup, CASE_ORDER};
use super::state::{Propagation, State};

/// A refutation strategy: either the state is already contradictory or a
/// split over one slot's four alternatives, in case order.
#[derive(Debug, Clone)]
pub(crate) enum Plan {
    Closed,
    Split { slot: usize, children: Vec<Plan> },
}

/// Slot ids ordered by apex, then triple.
pub(crate) fn slot_order(setup: &Setup) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..setup.slots.len()).collect();
    ids.sort_by_key(|&s| (setup.slots[s].apex, setup.slots[s].t));
    ids
}

/// Looks for a split tree of depth at most `depth` closing every branch of
/// the propagated, consistent `state`.
pub(crate) fn solve(state: &State, order: &[usize], depth: usize) -> Option<Plan> {
    if depth == 0 {
        return None;
    }
    let mut best: Option<(usize, usize, Vec<Option<State>>)> = None;
    for &s in order {
        if state.has_true(s) {
            continue;
        }
        let mut score = 0;
        let mut kids = Vec::with_capacity(4);
        for (case, &k) in CASE_ORDER.iter().enumerate() {
            if state.status(s, k) == Some(false) {
                score += 1;
                kids.push(None);
                continue;
            }
            let mut child = state.clone();
            child.assume(s, k, case);
            match child.propagate() {
                Propagation::Contradiction(_) => {
                    score += 1;
                    kids.push(None);
                }
                Propagation::Fixpoint => kids.push(Some(child)),
            }
        }
        if best.as_ref().is_none_or(|b| score > b.0) {
            best = Some((score, s, kids));
            if score == 4 {
                break;
            }
        }
    }
    let (_, slot, kids) = best?;
    let mut children = Vec::with_capacity(4);
    for kid in kids {
        match kid {
            None => children.push(Plan::Closed),
            Some(c) => children.push(solve(&c, order, depth - 1)?),
        }
    }
    Some(Plan::Split { slot, children })
}

/// Re-runs a successful plan with recording switched on.
pub(crate) fn replay(setup: Arc<Setup>, plan: &Plan) -> ProofLog {
    let mut root = State::new(setup.clone(), true);
    root.seed();
    let outcome = root.propagate();
    let mut next = root.next_id;
    let mut block = take_block(&mut root);
    if let Plan::Split { .. } = plan {
        debug_assert_eq!(outcome, Propagation::Fixpoint);
        block.entries.push(Entry::Cases(replay_split(&root, plan, &mut next)));
    }
    ProofLog { order: setup.order.clone(), mode: setup.mode, root: block, note: None }
}

fn take_block(state: &mut State) -> Block {
    let lines = state.log.replace(Vec::new()).unwrap_or_default();
    Block { entries: lines.into_iter().map(Entry::Line).collect() }
}

fn replay_split(state: &State, plan: &Plan, next: &mut usize) -> CaseSplit {
    let Plan::Split { slot, children } = plan else {
        unreachable!("closed plans have no split");
    };
    let s = &state.setup.slots[*slot];
    let mut branches = Vec::with_capacity(4);
    for (case, (&k, child_plan)) in CASE_ORDER.iter().zip(children).enumerate() {
        let mut child = state.clone();
        child.log = Some(Vec::new());
        child.next_id = *next;
        child.assume(*slot, k, case);
        let outcome = child.propagate();
        *next = child.next_id;
        let mut block = take_block(&mut child);
        match child_plan {
            Plan::Closed => debug_assert!(matches!(outcome, Propagation::Contradiction(_))),
            Plan::Split { .. } => block.entries.push(Entry::Cases(replay_split(&child, child_plan, next))),
        }
        branches.push(block);
    }
    CaseSplit { apex: s.apex, others: s.t, branches }
}
