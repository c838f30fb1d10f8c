//! Cell dependency graph: precedents, dependents, slices and evaluation
//! order.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::address::CellAddress;
use crate::workbook::Workbook;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("circular reference: {}", format_cycle(.cycle))]
pub struct CircularReference {
    /// Cells on the cycle, starting from the row-major smallest member,
    /// each one read by its predecessor.
    pub cycle: Vec<CellAddress>,
}

fn format_cycle(cycle: &[CellAddress]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
    if let Some(first) = cycle.first() {
        parts.push(first.to_string());
    }
    parts.join(" -> ")
}

/// Edges run from a formula cell to the cells it reads.
#[derive(Debug, Clone, Default)]
pub struct DependencyGraph {
    nodes: BTreeSet<CellAddress>,
    precedents: BTreeMap<CellAddress, BTreeSet<CellAddress>>,
    dependents: BTreeMap<CellAddress, BTreeSet<CellAddress>>,
    topo: Vec<CellAddress>,
}

static NONE: BTreeSet<CellAddress> = BTreeSet::new();

impl DependencyGraph {
    /// Nodes are all populated cells plus every empty cell some formula
    /// reads.
    pub fn build(wb: &Workbook) -> Result<Self, CircularReference> {
        let mut graph = DependencyGraph::default();
        for (addr, content) in wb.iter() {
            graph.nodes.insert(addr);
            let Some(formula) = content.formula() else {
                continue;
            };
            let refs = formula.ast().referenced_cells();
            for &r in &refs {
                graph.nodes.insert(r);
                graph.dependents.entry(r).or_default().insert(addr);
            }
            if !refs.is_empty() {
                graph.precedents.insert(addr, refs);
            }
        }
        graph.topo = graph.order(wb)?;
        Ok(graph)
    }

    /// Kahn's algorithm over formula cells, always releasing the row-major
    /// smallest ready cell first.
    fn order(&self, wb: &Workbook) -> Result<Vec<CellAddress>, CircularReference> {
        let formulas: BTreeSet<CellAddress> = wb.formulas().map(|(a, _)| a).collect();
        let mut pending: BTreeMap<CellAddress, usize> = formulas
            .iter()
            .map(|&f| {
                let n = self
                    .precedents(f)
                    .iter()
                    .filter(|p| formulas.contains(p))
                    .count();
                (f, n)
            })
            .collect();
        let mut ready: BTreeSet<CellAddress> = pending
            .iter()
            .filter(|(_, &n)| n == 0)
            .map(|(&a, _)| a)
            .collect();
        let mut order = Vec::with_capacity(formulas.len());
        while let Some(next) = ready.pop_first() {
            order.push(next);
            pending.remove(&next);
            for &d in self.dependents(next) {
                if let Some(n) = pending.get_mut(&d) {
                    *n -= 1;
                    if *n == 0 {
                        ready.insert(d);
                    }
                }
            }
        }
        if pending.is_empty() {
            Ok(order)
        } else {
            let stuck: BTreeSet<CellAddress> = pending.into_keys().collect();
            Err(CircularReference {
                cycle: self.find_cycle(&stuck),
            })
        }
    }

    /// Every cell left over by Kahn's algorithm has a stuck precedent, so
    /// walking stuck precedents from any of them must revisit a cell.
    fn find_cycle(&self, stuck: &BTreeSet<CellAddress>) -> Vec<CellAddress> {
        let mut walk: Vec<CellAddress> = Vec::new();
        let mut seen: BTreeMap<CellAddress, usize> = BTreeMap::new();
        let mut at = *stuck.first().expect("non-empty remainder");
        loop {
            if let Some(&i) = seen.get(&at) {
                let mut cycle = walk.split_off(i);
                let min = cycle
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, c)| **c)
                    .map(|(i, _)| i)
                    .unwrap();
                cycle.rotate_left(min);
                return cycle;
            }
            seen.insert(at, walk.len());
            walk.push(at);
            at = *self
                .precedents(at)
                .iter()
                .find(|p| stuck.contains(p))
                .expect("stuck cell has a stuck precedent");
        }
    }

    pub fn nodes(&self) -> &BTreeSet<CellAddress> {
        &self.nodes
    }

    pub fn contains(&self, addr: CellAddress) -> bool {
        self.nodes.contains(&addr)
    }

    /// Cells `addr` reads directly. Empty for unknown or literal cells.
    pub fn precedents(&self, addr: CellAddress) -> &BTreeSet<CellAddress> {
        self.precedents.get(&addr).unwrap_or(&NONE)
    }

    /// Cells whose formula reads `addr` directly.
    pub fn dependents(&self, addr: CellAddress) -> &BTreeSet<CellAddress> {
        self.dependents.get(&addr).unwrap_or(&NONE)
    }

    /// Formula cells, each after every formula cell it reads.
    pub fn evaluation_order(&self) -> &[CellAddress] {
        &self.topo
    }

    /// All cells `addr` reads, directly or through other formulas.
    pub fn backward_slice(&self, addr: CellAddress) -> BTreeSet<CellAddress> {
        self.closure(addr, |c| self.precedents(c))
    }

    /// All cells that read `addr`, directly or transitively.
    pub fn forward_slice(&self, addr: CellAddress) -> BTreeSet<CellAddress> {
        self.closure(addr, |c| self.dependents(c))
    }

    fn closure<'a>(
        &'a self,
        start: CellAddress,
        step: impl Fn(CellAddress) -> &'a BTreeSet<CellAddress>,
    ) -> BTreeSet<CellAddress> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<CellAddress> = step(start).iter().copied().collect();
        while let Some(c) = stack.pop() {
            if seen.insert(c) {
                stack.extend(step(c).iter().copied());
            }
        }
        seen.remove(&start);
        seen
    }
}

pub fn build_graph(wb: &Workbook) -> Result<DependencyGraph, CircularReference> {
    DependencyGraph::build(wb)
}

pub fn direct_precedents(g: &DependencyGraph, c: CellAddress) -> BTreeSet<CellAddress> {
    g.precedents(c).clone()
}

pub fn direct_dependents(g: &DependencyGraph, c: CellAddress) -> BTreeSet<CellAddress> {
    g.dependents(c).clone()
}

pub fn backward_slice(g: &DependencyGraph, c: CellAddress) -> BTreeSet<CellAddress> {
    g.backward_slice(c)
}

pub fn forward_slice(g: &DependencyGraph, c: CellAddress) -> BTreeSet<CellAddress> {
    g.forward_slice(c)
}
