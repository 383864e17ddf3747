//! Decremental strongly connected components of a complete digraph.
//!
//! The structure starts from the complete digraph on `m` vertices (one SCC)
//! and supports edge deletions only. It keeps
//!
//! * the SCC id of every vertex (`scc_of`),
//! * the set of live SCC ids,
//! * the in-degree of every SCC: live edges entering it from outside.
//!
//! When an SCC splits, the fragment with the largest total degree keeps the
//! old id and every other fragment gets a fresh one. Degrees are counted in
//! the original complete graph, so this is the largest fragment (first in
//! discovery order on ties). Ids are never retired: SCCs only split, so
//! every id ever handed out stays live.
//!
//! Adjacency is held as bitset rows in both directions. A deletion inside an
//! SCC first looks for a live `u -> x -> v` detour with one word-parallel
//! AND, then falls back to a bitset BFS restricted to the SCC. Only when `u`
//! no longer reaches `v` is the SCC decomposed, with forward-backward
//! reachability on the old SCC's live induced subgraph.
//!
//! Deletion schedules known up front can be applied per weight level with
//! [`SccState::delete_batch`], which checks each touched SCC once after the
//! whole batch is gone.

use thiserror::Error;

use crate::ballots::Candidate;
use crate::bits;
use crate::majority_graph::ComparisonGraph;

pub type SccId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DsccError {
    #[error("edge ({0}, {1}) is not live")]
    NotLive(Candidate, Candidate),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Candidate),
    #[error("unknown SCC id {0}")]
    UnknownId(SccId),
}

/// SCCs that split during a batch: `fragments[0]` is `old` (kept by the
/// largest fragment), the rest are newly created ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchSplit {
    pub old: SccId,
    pub fragments: Vec<SccId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone)]
pub struct SccState {
    m: usize,
    stride: usize,
    /// Row `u`, bit `v`: edge `(u, v)` is live.
    out: Vec<u64>,
    /// Row `v`, bit `u`: edge `(u, v)` is live.
    inn: Vec<u64>,
    scc_of: Vec<SccId>,
    members: Vec<Vec<u64>>,
    sizes: Vec<usize>,
    in_degree: Vec<u64>,
    live_edges: usize,
}

impl SccState {
    pub fn new(graph: &ComparisonGraph) -> Self {
        Self::complete(graph.m())
    }

    /// All `m (m - 1)` edges live.
    pub fn complete(m: usize) -> Self {
        let stride = bits::words_for(m);
        let mut all = vec![0u64; stride];
        for v in 0..m {
            bits::set(&mut all, v);
        }
        let mut out = Vec::with_capacity(m * stride);
        for u in 0..m {
            let mut row = all.clone();
            bits::clear(&mut row, u);
            out.extend_from_slice(&row);
        }
        let (members, sizes, in_degree) = if m == 0 {
            (Vec::new(), Vec::new(), Vec::new())
        } else {
            (vec![all], vec![m], vec![0])
        };
        SccState {
            m,
            stride,
            inn: out.clone(),
            out,
            scc_of: vec![0; m],
            members,
            sizes,
            in_degree,
            live_edges: m * m.saturating_sub(1),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.m
    }

    pub fn num_sccs(&self) -> usize {
        self.members.len()
    }

    pub fn live_edges(&self) -> usize {
        self.live_edges
    }

    pub fn is_live(&self, u: Candidate, v: Candidate) -> bool {
        u < self.m && v < self.m && bits::test(self.out_row(u), v)
    }

    #[inline]
    pub fn same_scc(&self, u: Candidate, v: Candidate) -> bool {
        self.scc_of[u] == self.scc_of[v]
    }

    #[inline]
    pub fn scc_id(&self, v: Candidate) -> SccId {
        self.scc_of[v]
    }

    pub fn scc_ids(&self) -> std::ops::Range<SccId> {
        0..self.members.len()
    }

    pub fn in_degree(&self, id: SccId) -> Result<u64, DsccError> {
        self.in_degree.get(id).copied().ok_or(DsccError::UnknownId(id))
    }

    pub fn scc_size(&self, id: SccId) -> Result<usize, DsccError> {
        self.sizes.get(id).copied().ok_or(DsccError::UnknownId(id))
    }

    /// Vertices of SCC `id`, ascending.
    pub fn members(&self, id: SccId) -> Result<Vec<Candidate>, DsccError> {
        let mask = self.members.get(id).ok_or(DsccError::UnknownId(id))?;
        Ok(bits::ones(mask).collect())
    }

    /// Deletes `(u, v)` and returns the ids of SCCs created by the deletion.
    /// The fragment that keeps the old id is not listed.
    pub fn delete_edge(&mut self, u: Candidate, v: Candidate) -> Result<Vec<SccId>, DsccError> {
        self.check_live(u, v)?;
        self.remove_edge(u, v);
        let id = self.scc_of[u];
        if id != self.scc_of[v] || self.reaches(u, v, id) {
            return Ok(Vec::new());
        }
        let fragments = self.decompose(id);
        Ok(self.apply_split(id, fragments))
    }

    /// Deletes every edge of `edges`, then reports each SCC that split.
    ///
    /// The final partition equals the one reached by deleting the edges one
    /// at a time. On error nothing is deleted.
    pub fn delete_batch(&mut self, edges: &[(Candidate, Candidate)]) -> Result<Vec<BatchSplit>, DsccError> {
        for &(u, v) in edges {
            self.check_live(u, v)?;
        }
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(DsccError::NotLive(w[0].0, w[0].1));
        }

        let mut touched: Vec<SccId> = Vec::new();
        let mut internal: Vec<Vec<(Candidate, Candidate)>> = Vec::new();
        for &(u, v) in edges {
            self.remove_edge(u, v);
            let id = self.scc_of[u];
            if id == self.scc_of[v] {
                if internal.len() <= id {
                    internal.resize(id + 1, Vec::new());
                }
                if internal[id].is_empty() {
                    touched.push(id);
                }
                internal[id].push((u, v));
            }
        }

        let mut splits = Vec::new();
        for id in touched {
            let intact = internal[id].iter().all(|&(u, v)| self.reaches(u, v, id));
            if intact {
                continue;
            }
            let fragments = self.decompose(id);
            let created = self.apply_split(id, fragments);
            let mut all = Vec::with_capacity(created.len() + 1);
            all.push(id);
            all.extend(created);
            splits.push(BatchSplit {
                old: id,
                fragments: all,
            });
        }
        Ok(splits)
    }

    fn check_live(&self, u: Candidate, v: Candidate) -> Result<(), DsccError> {
        for x in [u, v] {
            if x >= self.m {
                return Err(DsccError::VertexOutOfRange(x));
            }
        }
        if !self.is_live(u, v) {
            return Err(DsccError::NotLive(u, v));
        }
        Ok(())
    }

    fn remove_edge(&mut self, u: Candidate, v: Candidate) {
        let s = self.stride;
        bits::clear(&mut self.out[u * s..(u + 1) * s], v);
        bits::clear(&mut self.inn[v * s..(v + 1) * s], u);
        self.live_edges -= 1;
        let target = self.scc_of[v];
        if self.scc_of[u] != target {
            self.in_degree[target] -= 1;
        }
    }

    #[inline]
    fn out_row(&self, u: Candidate) -> &[u64] {
        &self.out[u * self.stride..(u + 1) * self.stride]
    }

    #[inline]
    fn in_row(&self, v: Candidate) -> &[u64] {
        &self.inn[v * self.stride..(v + 1) * self.stride]
    }

    /// Whether `from` reaches `to` over live edges inside SCC `id`.
    fn reaches(&self, from: Candidate, to: Candidate, id: SccId) -> bool {
        let region = &self.members[id];
        let into_target = self.in_row(to);
        let detour = self
            .out_row(from)
            .iter()
            .zip(into_target)
            .zip(region)
            .any(|((a, b), r)| a & b & r != 0);
        if detour {
            return true;
        }
        let mut visited = vec![0u64; self.stride];
        bits::set(&mut visited, from);
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            let row = self.out_row(x);
            for w in 0..self.stride {
                let new = row[w] & region[w] & !visited[w];
                if new == 0 {
                    continue;
                }
                if new & into_target[w] != 0 || (to / bits::WORD_BITS == w && new >> (to % bits::WORD_BITS) & 1 == 1) {
                    return true;
                }
                visited[w] |= new;
                let mut rest = new;
                while rest != 0 {
                    stack.push(w * bits::WORD_BITS + rest.trailing_zeros() as usize);
                    rest &= rest - 1;
                }
            }
        }
        false
    }

    /// Vertices of `region` reachable from `start` (forward) or reaching it
    /// (backward) over live edges inside `region`.
    fn closure(&self, start: Candidate, region: &[u64], dir: Direction) -> Vec<u64> {
        let adj = match dir {
            Direction::Forward => &self.out,
            Direction::Backward => &self.inn,
        };
        let s = self.stride;
        let mut visited = vec![0u64; s];
        bits::set(&mut visited, start);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            let row = &adj[x * s..(x + 1) * s];
            for w in 0..s {
                let mut new = row[w] & region[w] & !visited[w];
                visited[w] |= new;
                while new != 0 {
                    stack.push(w * bits::WORD_BITS + new.trailing_zeros() as usize);
                    new &= new - 1;
                }
            }
        }
        visited
    }

    /// SCCs of the live subgraph induced by SCC `id`, by forward-backward
    /// splitting, in discovery order.
    fn decompose(&self, id: SccId) -> Vec<Vec<u64>> {
        let mut work = vec![self.members[id].clone()];
        let mut found = Vec::new();
        while let Some(region) = work.pop() {
            let Some(pivot) = bits::ones(&region).next() else {
                continue;
            };
            let fwd = self.closure(pivot, &region, Direction::Forward);
            let bwd = self.closure(pivot, &region, Direction::Backward);
            let mut scc = vec![0u64; self.stride];
            let mut only_fwd = vec![0u64; self.stride];
            let mut only_bwd = vec![0u64; self.stride];
            let mut neither = vec![0u64; self.stride];
            for w in 0..self.stride {
                scc[w] = fwd[w] & bwd[w];
                only_fwd[w] = fwd[w] & !bwd[w];
                only_bwd[w] = bwd[w] & !fwd[w];
                neither[w] = region[w] & !(fwd[w] | bwd[w]);
            }
            found.push(scc);
            for part in [neither, only_bwd, only_fwd] {
                if part.iter().any(|&w| w != 0) {
                    work.push(part);
                }
            }
        }
        found
    }

    /// Installs `fragments` as the new SCCs replacing `id`; returns the new
    /// ids (the largest fragment keeps `id`).
    fn apply_split(&mut self, id: SccId, fragments: Vec<Vec<u64>>) -> Vec<SccId> {
        let sizes: Vec<usize> = fragments.iter().map(|f| bits::count(f)).collect();
        let keep = (0..fragments.len())
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
            .expect("a split has fragments");
        let mut created = Vec::with_capacity(fragments.len() - 1);
        let mut assigned = Vec::with_capacity(fragments.len());
        for (idx, (mask, size)) in fragments.into_iter().zip(sizes).enumerate() {
            let target = if idx == keep {
                self.members[id] = mask;
                self.sizes[id] = size;
                id
            } else {
                let new_id = self.members.len();
                for v in bits::ones(&mask) {
                    self.scc_of[v] = new_id;
                }
                self.members.push(mask);
                self.sizes.push(size);
                self.in_degree.push(0);
                created.push(new_id);
                new_id
            };
            assigned.push(target);
        }
        for target in assigned {
            self.in_degree[target] = self.count_in_degree(target);
        }
        created
    }

    fn count_in_degree(&self, id: SccId) -> u64 {
        let mask = &self.members[id];
        bits::ones(mask)
            .map(|v| {
                self.in_row(v)
                    .iter()
                    .zip(mask)
                    .map(|(e, inside)| (e & !inside).count_ones() as u64)
                    .sum::<u64>()
            })
            .sum()
    }
}
