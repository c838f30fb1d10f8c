//! Locating the most influential faulty cell behind a symptom.
//!
//! Starting from the queried cell, the tracer repeatedly moves to one of
//! its faulty direct precedents. Among several candidates it prefers the one
//! with the most faulty direct precedents of its own; if that ties, the one
//! with the most faulty direct dependents; if that still ties, the
//! row-major smallest. It stops at a cell with no faulty direct precedents.
//!
//! Only cells marked [`State::Symptom`](crate::compare::State::Symptom)
//! count as faulty.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::address::CellAddress;
use crate::compare::MarkSheet;
use crate::graph::DependencyGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("{0} has no symptom of a fault")]
    QueryNotFaulty(CellAddress),
}

/// Which rule decided a hop (or the stop).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStep {
    /// No faulty direct precedents: the current cell is the answer.
    Stop,
    /// One candidate had strictly the most faulty precedents.
    MostFaultyPrecedents,
    /// Precedent counts tied; one candidate had the most faulty dependents.
    MostFaultyDependents,
    /// Both counts tied; the row-major smallest candidate was taken.
    TieBroken,
}

/// Working sets of one iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceState {
    pub current: CellAddress,
    /// Faulty direct precedents of `current`.
    pub faulty_precedents: BTreeSet<CellAddress>,
    /// For each of those, its own faulty direct precedents.
    pub second_order: BTreeMap<CellAddress, BTreeSet<CellAddress>>,
    /// Candidates with the most second-order faulty precedents.
    pub precedent_leaders: BTreeSet<CellAddress>,
    /// For each precedent leader, its faulty direct dependents. Only
    /// filled when there is more than one leader.
    pub faulty_dependents: BTreeMap<CellAddress, BTreeSet<CellAddress>>,
    /// Precedent leaders with the most faulty dependents.
    pub dependent_leaders: BTreeSet<CellAddress>,
    pub step: TraceStep,
    /// The cell moved to, `None` on [`TraceStep::Stop`].
    pub next: Option<CellAddress>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceResult {
    pub query: CellAddress,
    pub most_influential: CellAddress,
    /// Successive current cells, query first and result last.
    pub path: Vec<CellAddress>,
    pub steps: Vec<TraceState>,
    pub tie_broken: bool,
}

pub fn faulty_direct_precedents(
    g: &DependencyGraph,
    marks: &MarkSheet,
    c: CellAddress,
) -> BTreeSet<CellAddress> {
    g.precedents(c)
        .iter()
        .copied()
        .filter(|&p| marks.is_symptom(p))
        .collect()
}

pub fn faulty_direct_dependents(
    g: &DependencyGraph,
    marks: &MarkSheet,
    c: CellAddress,
) -> BTreeSet<CellAddress> {
    g.dependents(c)
        .iter()
        .copied()
        .filter(|&d| marks.is_symptom(d))
        .collect()
}

/// Members of `sets` whose set is largest.
fn argmax_len(sets: &BTreeMap<CellAddress, BTreeSet<CellAddress>>) -> BTreeSet<CellAddress> {
    let best = sets.values().map(BTreeSet::len).max().unwrap_or(0);
    sets.iter()
        .filter(|(_, s)| s.len() == best)
        .map(|(c, _)| *c)
        .collect()
}

fn one_step(g: &DependencyGraph, marks: &MarkSheet, current: CellAddress) -> TraceState {
    let faulty_precedents = faulty_direct_precedents(g, marks, current);
    let mut state = TraceState {
        current,
        faulty_precedents,
        second_order: BTreeMap::new(),
        precedent_leaders: BTreeSet::new(),
        faulty_dependents: BTreeMap::new(),
        dependent_leaders: BTreeSet::new(),
        step: TraceStep::Stop,
        next: None,
    };
    if state.faulty_precedents.is_empty() {
        return state;
    }

    state.second_order = state
        .faulty_precedents
        .iter()
        .map(|&c| (c, faulty_direct_precedents(g, marks, c)))
        .collect();
    state.precedent_leaders = argmax_len(&state.second_order);
    if state.precedent_leaders.len() == 1 {
        state.step = TraceStep::MostFaultyPrecedents;
        state.next = state.precedent_leaders.first().copied();
        return state;
    }

    state.faulty_dependents = state
        .precedent_leaders
        .iter()
        .map(|&c| (c, faulty_direct_dependents(g, marks, c)))
        .collect();
    state.dependent_leaders = argmax_len(&state.faulty_dependents);
    state.step = if state.dependent_leaders.len() == 1 {
        TraceStep::MostFaultyDependents
    } else {
        TraceStep::TieBroken
    };
    state.next = state.dependent_leaders.first().copied();
    state
}

/// Follow faulty precedents from `query` to the most influential faulty
/// cell, recording every iteration.
pub fn trace_most_influential(
    g: &DependencyGraph,
    marks: &MarkSheet,
    query: CellAddress,
) -> Result<TraceResult, TraceError> {
    let query = query.relative();
    if !marks.is_symptom(query) {
        return Err(TraceError::QueryNotFaulty(query));
    }
    let mut path = vec![query];
    let mut steps = Vec::new();
    let mut tie_broken = false;
    let mut current = query;
    loop {
        let state = one_step(g, marks, current);
        tie_broken |= state.step == TraceStep::TieBroken;
        let next = state.next;
        steps.push(state);
        match next {
            Some(n) => {
                path.push(n);
                current = n;
            }
            None => break,
        }
    }
    Ok(TraceResult {
        query,
        most_influential: current,
        path,
        steps,
        tie_broken,
    })
}
