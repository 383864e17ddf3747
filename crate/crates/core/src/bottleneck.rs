//! Widest-path baselines.
//!
//! [`apbp`] is the cubic max-min closure (Floyd–Warshall with `(max, min)`
//! in place of `(min, +)`). It serves as the reference answer for the
//! near-quadratic algorithms in [`crate::winners`]; sub-cubic APBP via fast
//! matrix multiplication is not provided.
//!
//! Widths range over all of `i64`: margin graphs have negative edges, so a
//! pair joined only by losing links gets a negative width.

use thiserror::Error;

use crate::ballots::Candidate;
use crate::majority_graph::ComparisonGraph;

/// Diagonal sentinel of [`BottleneckMatrix`] and the width of the empty path.
pub const UNBOUNDED: i64 = i64::MAX;

/// `B_G(u, v)` for all ordered pairs; the diagonal holds [`UNBOUNDED`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BottleneckMatrix {
    m: usize,
    widths: Vec<i64>,
}

impl BottleneckMatrix {
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, u: Candidate, v: Candidate) -> i64 {
        self.widths[u * self.m + v]
    }

    pub fn row(&self, u: Candidate) -> &[i64] {
        &self.widths[u * self.m..(u + 1) * self.m]
    }

    /// From explicit widths; diagonal entries are overwritten with the
    /// sentinel.
    pub fn from_widths(m: usize, mut widths: Vec<i64>) -> Self {
        assert_eq!(widths.len(), m * m);
        for u in 0..m {
            widths[u * m + u] = UNBOUNDED;
        }
        BottleneckMatrix { m, widths }
    }

    /// `B(u, v) > B(v, u)`.
    pub fn beats(&self, u: Candidate, v: Candidate) -> bool {
        u != v && self.get(u, v) > self.get(v, u)
    }
}

/// All-pairs bottleneck widths by max-min closure, `O(m^3)`.
pub fn apbp(graph: &ComparisonGraph) -> BottleneckMatrix {
    let m = graph.m();
    let mut b = graph.weights().to_vec();
    for u in 0..m {
        b[u * m + u] = UNBOUNDED;
    }
    for k in 0..m {
        let row_k: Vec<i64> = b[k * m..(k + 1) * m].to_vec();
        for i in 0..m {
            let via = b[i * m + k];
            let row_i = &mut b[i * m..(i + 1) * m];
            for (slot, &kj) in row_i.iter_mut().zip(&row_k) {
                *slot = (*slot).max(via.min(kj));
            }
        }
    }
    BottleneckMatrix { m, widths: b }
}

/// Widths from one source; the source itself is excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleSourceWidths {
    source: Candidate,
    widths: Vec<i64>,
}

impl SingleSourceWidths {
    pub fn source(&self) -> Candidate {
        self.source
    }

    /// `None` for the source.
    pub fn get(&self, v: Candidate) -> Option<i64> {
        (v != self.source).then(|| self.widths[v])
    }

    /// Number of targets, `m - 1`.
    pub fn len(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(target, width)` for every target in index order.
    pub fn iter(&self) -> impl Iterator<Item = (Candidate, i64)> + '_ {
        let source = self.source;
        self.widths
            .iter()
            .enumerate()
            .filter(move |(v, _)| *v != source)
            .map(|(v, &w)| (v, w))
    }

    pub fn to_vec(&self) -> Vec<i64> {
        self.iter().map(|(_, w)| w).collect()
    }
}

/// Dijkstra-style widest paths over a dense weight accessor with linear-scan
/// extract-max, `O(m^2)`. Slot `source` is left at [`UNBOUNDED`].
fn widest_from(m: usize, source: Candidate, weight: impl Fn(Candidate, Candidate) -> i64) -> Vec<i64> {
    let mut width = vec![i64::MIN; m];
    let mut done = vec![false; m];
    width[source] = UNBOUNDED;
    for _ in 0..m {
        let mut best = None;
        for v in 0..m {
            if !done[v] && best.is_none_or(|b: Candidate| width[v] > width[b]) {
                best = Some(v);
            }
        }
        let Some(x) = best else { break };
        done[x] = true;
        let wx = width[x];
        for y in 0..m {
            if !done[y] {
                let cand = wx.min(weight(x, y));
                if cand > width[y] {
                    width[y] = cand;
                }
            }
        }
    }
    width
}

/// `B_G(source, v)` for every `v != source`.
pub fn ssbp(graph: &ComparisonGraph, source: Candidate) -> SingleSourceWidths {
    let widths = widest_from(graph.m(), source, |x, y| graph.weight(x, y));
    SingleSourceWidths { source, widths }
}

/// `B_G(v, source)` for every `v != source`: widest paths into `source`,
/// computed as single-source widths on the reversed graph.
pub fn ssbp_reversed(graph: &ComparisonGraph, source: Candidate) -> SingleSourceWidths {
    let widths = widest_from(graph.m(), source, |x, y| graph.weight(y, x));
    SingleSourceWidths { source, widths }
}

/// Whether `v` is a Schulze winner, from one forward and one reversed
/// single-source computation, `O(m^2)`.
pub fn verify_winner(graph: &ComparisonGraph, v: Candidate) -> bool {
    let out = ssbp(graph, v);
    let into = ssbp_reversed(graph, v);
    let holds = out
        .iter()
        .zip(into.iter())
        .all(|((_, from_v), (_, to_v))| from_v >= to_v);
    holds
}

/// `{u : B(u, v) >= B(v, u) for all v}` in index order.
///
/// # Panics
///
/// If the set is empty, which cannot happen for widths of a complete
/// digraph.
pub fn winners_from_bottlenecks(b: &BottleneckMatrix) -> Vec<Candidate> {
    let m = b.m;
    let winners: Vec<Candidate> = (0..m)
        .filter(|&u| (0..m).all(|v| u == v || b.get(u, v) >= b.get(v, u)))
        .collect();
    assert!(
        m == 0 || !winners.is_empty(),
        "empty Schulze winner set: widths are inconsistent"
    );
    winners
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankingError {
    #[error("beat relation is not transitive (around candidate {0})")]
    Intransitive(Candidate),
}

/// The Schulze order as tie-classes, best first, where `u` beats `v` iff
/// `B(u, v) > B(v, u)`.
///
/// Classes are peeled off as the unbeaten candidates among those left, so
/// the first class is the winner set and every beaten candidate sits below
/// its beater. Two candidates share a class only if neither beats the
/// other; the converse can fail when "neither beats" is itself not
/// transitive, in which case the order is a layering of the beat relation.
pub fn schulze_ranking(b: &BottleneckMatrix) -> Result<Vec<Vec<Candidate>>, RankingError> {
    let m = b.m;
    for u in 0..m {
        for v in (0..m).filter(|&v| b.beats(u, v)) {
            if let Some(w) = (0..m).find(|&w| b.beats(v, w) && !b.beats(u, w)) {
                return Err(RankingError::Intransitive(w));
            }
        }
    }
    let mut remaining: Vec<Candidate> = (0..m).collect();
    let mut classes = Vec::new();
    while !remaining.is_empty() {
        let (top, rest): (Vec<Candidate>, Vec<Candidate>) = remaining
            .iter()
            .partition(|&&u| remaining.iter().all(|&v| !b.beats(v, u)));
        if top.is_empty() {
            return Err(RankingError::Intransitive(remaining[0]));
        }
        classes.push(top);
        remaining = rest;
    }
    Ok(classes)
}
