//! Schulze winners without all-pairs bottleneck widths.
//!
//! Both algorithms delete the edges of the comparison graph in ascending
//! weight order from a decremental SCC structure. [`find_winner`] follows one
//! candidate `x` whose SCC always contains a winner; [`find_all_winners`]
//! tracks the set of SCCs whose winners are exactly the global winners,
//! dropping an SCC as soon as a live edge enters it.
//!
//! Cost is dominated by the sort and the SCC structure, both near `O(m^2)`
//! for the instances of interest, against `O(m^3)` for [`apbp`].

use std::collections::BTreeSet;

use crate::ballots::Candidate;
use crate::bottleneck::{apbp, winners_from_bottlenecks};
use crate::dscc::{SccId, SccState};
use crate::majority_graph::ComparisonGraph;

/// How [`find_all_winners_with`] feeds deletions to the SCC structure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Engine {
    /// One call per weight level.
    #[default]
    Batch,
    /// One call per edge.
    PerEdge,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Options {
    pub engine: Engine,
    /// Record a replayable trace.
    pub trace: bool,
    /// Recompute the loop invariants from scratch after every step and
    /// panic on a violation. Cubic per step; for debugging only.
    pub check_invariants: bool,
}

/// All ordered pairs sorted by `(weight, source, target)`.
pub fn deletion_order(graph: &ComparisonGraph) -> Vec<(Candidate, Candidate)> {
    let m = graph.m();
    let mut keyed: Vec<(i64, Candidate, Candidate)> = Vec::with_capacity(m * m.saturating_sub(1));
    for u in 0..m {
        for (v, &w) in graph.row(u).iter().enumerate() {
            if u != v {
                keyed.push((w, u, v));
            }
        }
    }
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, u, v)| (u, v)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinnerStep {
    pub edge: (Candidate, Candidate),
    pub weight: i64,
    /// `u` and `v` were both in the SCC of `x` before the deletion.
    pub flag: bool,
    /// `u` and `v` were in different SCCs after the deletion.
    pub separated: bool,
    /// `x` after the step.
    pub x: Candidate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinnerTrace {
    pub start: Candidate,
    pub steps: Vec<WinnerStep>,
}

impl WinnerTrace {
    /// Re-runs the update rule over the recorded flags.
    pub fn replay(&self) -> Candidate {
        self.steps
            .iter()
            .fold(self.start, |x, s| if s.flag && s.separated { s.edge.1 } else { x })
    }

    /// Whether every recorded `x` agrees with the update rule.
    pub fn is_consistent(&self) -> bool {
        let mut x = self.start;
        for s in &self.steps {
            if s.flag && s.separated {
                x = s.edge.1;
            }
            if s.x != x {
                return false;
            }
        }
        true
    }
}

/// One Schulze winner.
pub fn find_winner(graph: &ComparisonGraph) -> Candidate {
    find_winner_with(graph, &Options::default()).0
}

pub fn find_winner_with(graph: &ComparisonGraph, opts: &Options) -> (Candidate, Option<WinnerTrace>) {
    let mut state = SccState::new(graph);
    let mut x: Candidate = 0;
    let mut trace = opts.trace.then(|| WinnerTrace {
        start: x,
        steps: Vec::new(),
    });
    let reference = opts.check_invariants.then(|| winners_from_bottlenecks(&apbp(graph)));

    for (u, v) in deletion_order(graph) {
        let flag = state.same_scc(u, x) && state.same_scc(v, x);
        state.delete_edge(u, v).expect("each edge is deleted once");
        let separated = !state.same_scc(u, v);
        if separated && flag {
            x = v;
        }
        if let Some(t) = trace.as_mut() {
            t.steps.push(WinnerStep {
                edge: (u, v),
                weight: graph.weight(u, v),
                flag,
                separated,
                x,
            });
        }
        if let Some(global) = &reference {
            let local = scc_winners(graph, &state, state.scc_id(x));
            assert!(
                local.iter().all(|w| global.contains(w)),
                "winners of the SCC of x ({local:?}) are not global winners ({global:?})"
            );
        }
    }
    (x, trace)
}

/// A change to the candidate SCC set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    Add(SccId),
    Remove(SccId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelRecord {
    pub weight: i64,
    pub edges: usize,
    pub mutations: Vec<Mutation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllWinnersTrace {
    pub initial: SccId,
    pub levels: Vec<LevelRecord>,
    /// SCC id of every vertex once all edges are gone.
    pub final_scc_of: Vec<SccId>,
}

impl AllWinnersTrace {
    /// Re-applies the recorded mutations and maps the surviving SCC ids back
    /// to vertices.
    pub fn replay(&self) -> Vec<Candidate> {
        let mut set = BTreeSet::from([self.initial]);
        for level in &self.levels {
            for m in &level.mutations {
                match *m {
                    Mutation::Add(id) => set.insert(id),
                    Mutation::Remove(id) => set.remove(&id),
                };
            }
        }
        (0..self.final_scc_of.len())
            .filter(|&v| set.contains(&self.final_scc_of[v]))
            .collect()
    }
}

/// The full Schulze winner set in index order.
pub fn find_all_winners(graph: &ComparisonGraph) -> Vec<Candidate> {
    find_all_winners_with(graph, &Options::default()).0
}

pub fn find_all_winners_with(graph: &ComparisonGraph, opts: &Options) -> (Vec<Candidate>, Option<AllWinnersTrace>) {
    let m = graph.m();
    let mut state = SccState::new(graph);
    let mut candidate = vec![false; m.max(1)];
    candidate[0] = true;
    let mut levels = Vec::new();
    let reference = opts.check_invariants.then(|| winners_from_bottlenecks(&apbp(graph)));

    let order = deletion_order(graph);
    let mut start = 0;
    while start < order.len() {
        let (u0, v0) = order[start];
        let weight = graph.weight(u0, v0);
        let mut end = start;
        while end < order.len() && graph.weight(order[end].0, order[end].1) == weight {
            end += 1;
        }
        let level = &order[start..end];
        let mut mutations = Vec::new();
        let mut added: Vec<SccId> = Vec::new();

        let mut replace =
            |candidate: &mut Vec<bool>, old: SccId, fragments: &[SccId], mutations: &mut Vec<Mutation>| {
                candidate[old] = false;
                mutations.push(Mutation::Remove(old));
                for &id in fragments {
                    candidate[id] = true;
                    mutations.push(Mutation::Add(id));
                    added.push(id);
                }
            };

        match opts.engine {
            Engine::Batch => {
                for split in state.delete_batch(level).expect("each edge is deleted once") {
                    if candidate[split.old] {
                        replace(&mut candidate, split.old, &split.fragments, &mut mutations);
                    }
                }
            }
            Engine::PerEdge => {
                for &(u, v) in level {
                    let scc = state.scc_id(u);
                    let flag = state.same_scc(u, v);
                    let mut fragments = state.delete_edge(u, v).expect("each edge is deleted once");
                    if flag && !state.same_scc(u, v) && candidate[scc] {
                        fragments.push(scc);
                        replace(&mut candidate, scc, &fragments, &mut mutations);
                    }
                }
            }
        }

        for id in added {
            if candidate[id] && state.in_degree(id).expect("live id") > 0 {
                candidate[id] = false;
                mutations.push(Mutation::Remove(id));
            }
        }

        if let Some(global) = &reference {
            let mut union: Vec<Candidate> = state
                .scc_ids()
                .filter(|&id| candidate[id])
                .flat_map(|id| scc_winners(graph, &state, id))
                .collect();
            union.sort_unstable();
            assert_eq!(
                &union, global,
                "candidate SCC winners differ from global winners at weight {weight}"
            );
        }

        if opts.trace {
            levels.push(LevelRecord {
                weight,
                edges: level.len(),
                mutations,
            });
        }
        start = end;
    }

    let winners: Vec<Candidate> = (0..m).filter(|&v| candidate[state.scc_id(v)]).collect();
    let trace = opts.trace.then(|| AllWinnersTrace {
        initial: 0,
        levels,
        final_scc_of: (0..m).map(|v| state.scc_id(v)).collect(),
    });
    (winners, trace)
}

/// Winners of the subgraph induced by SCC `id` (of the original weights),
/// as original vertex indices.
fn scc_winners(graph: &ComparisonGraph, state: &SccState, id: SccId) -> Vec<Candidate> {
    let members = state.members(id).expect("live id");
    let sub = graph.induced(&members);
    winners_from_bottlenecks(&apbp(&sub))
        .into_iter()
        .map(|i| members[i])
        .collect()
}

/// Smith set: the candidates that reach every other candidate through
/// "beats or ties" (`w(u, v) >= w(v, u)`), in index order.
pub fn smith_set(graph: &ComparisonGraph) -> Vec<Candidate> {
    let m = graph.m();
    (0..m)
        .filter(|&s| {
            let mut seen = vec![false; m];
            seen[s] = true;
            let mut stack = vec![s];
            let mut count = 1;
            while let Some(x) = stack.pop() {
                for (y, seen_y) in seen.iter_mut().enumerate() {
                    if !*seen_y && graph.weight(x, y) >= graph.weight(y, x) {
                        *seen_y = true;
                        count += 1;
                        stack.push(y);
                    }
                }
            }
            count == m
        })
        .collect()
}
