//! Weighted majority graphs and comparison graphs.
//!
//! A [`ComparisonGraph`] is a complete digraph on the candidates with an
//! integer weight on every ordered pair. The weighted majority graph is the
//! margin instance `w(u, v) = M(u, v) - M(v, u)`; other link strengths are
//! encoded by the dense rank of each `(M(u, v), M(v, u))` pair under the
//! chosen strength relation.
//!
//! Text format:
//!
//! ```text
//! wmg 3
//! a,b,c
//! 0 1 1
//! 0 2 -1
//! ...
//! ```
//!
//! with one `u v w` line per ordered pair, indices 0-based.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ballots::{self, pairwise_tallies, rank_encode, Candidate, PreferenceProfile, ProfileError, TallyMatrix};
use crate::dominance::{self, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("weight matrix has {got} entries, expected {expected}")]
    Size { expected: usize, got: usize },
    #[error("diagonal entry for candidate {0} must be 0")]
    Diagonal(Candidate),
    #[error(transparent)]
    Candidates(#[from] ProfileError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct GraphParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComparisonGraph {
    candidates: Vec<String>,
    weights: Vec<i64>,
}

impl ComparisonGraph {
    /// `weights` is row-major `m x m` with a zero diagonal.
    pub fn new(candidates: Vec<String>, weights: Vec<i64>) -> Result<Self, GraphError> {
        ballots::validate_candidates(&candidates)?;
        let m = candidates.len();
        if weights.len() != m * m {
            return Err(GraphError::Size {
                expected: m * m,
                got: weights.len(),
            });
        }
        if let Some(u) = (0..m).find(|&u| weights[u * m + u] != 0) {
            return Err(GraphError::Diagonal(u));
        }
        Ok(ComparisonGraph { candidates, weights })
    }

    /// Builds a graph from a weight function on ordered pairs `u != v`.
    pub fn from_fn(
        candidates: Vec<String>,
        mut weight: impl FnMut(Candidate, Candidate) -> i64,
    ) -> Result<Self, GraphError> {
        let m = candidates.len();
        let mut weights = vec![0; m * m];
        for u in 0..m {
            for v in 0..m {
                if u != v {
                    weights[u * m + v] = weight(u, v);
                }
            }
        }
        Self::new(candidates, weights)
    }

    /// Number of candidates.
    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn candidate_index(&self, name: &str) -> Option<Candidate> {
        self.candidates.iter().position(|c| c == name)
    }

    #[inline]
    pub fn weight(&self, u: Candidate, v: Candidate) -> i64 {
        self.weights[u * self.m() + v]
    }

    pub fn row(&self, u: Candidate) -> &[i64] {
        let m = self.m();
        &self.weights[u * m..(u + 1) * m]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Same candidates, every edge reversed.
    pub fn reversed(&self) -> ComparisonGraph {
        let m = self.m();
        let mut weights = vec![0; m * m];
        for u in 0..m {
            for v in 0..m {
                weights[v * m + u] = self.weights[u * m + v];
            }
        }
        ComparisonGraph {
            candidates: self.candidates.clone(),
            weights,
        }
    }

    /// Subgraph induced by `vertices`, in the given order.
    pub fn induced(&self, vertices: &[Candidate]) -> ComparisonGraph {
        let candidates = vertices.iter().map(|&v| self.candidates[v].clone()).collect();
        let k = vertices.len();
        let mut weights = vec![0; k * k];
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate() {
                weights[a * k + b] = self.weight(u, v);
            }
        }
        ComparisonGraph { candidates, weights }
    }

    /// `w(u, v) = -w(v, u)` for all pairs.
    pub fn is_antisymmetric(&self) -> bool {
        let m = self.m();
        (0..m).all(|u| (0..m).all(|v| self.weight(u, v) == -self.weight(v, u)))
    }

    pub fn to_text(&self) -> String {
        let m = self.m();
        let mut out = format!("wmg {m}\n{}\n", self.candidates.join(","));
        for u in 0..m {
            for v in 0..m {
                if u != v {
                    out.push_str(&format!("{u} {v} {}\n", self.weight(u, v)));
                }
            }
        }
        out
    }
}

impl fmt::Display for ComparisonGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for ComparisonGraph {
    type Err = GraphParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_graph(s)
    }
}

/// Parses the `wmg` text format. Every ordered pair must appear exactly
/// once; `#` comments and blank lines are skipped.
pub fn parse_graph(text: &str) -> Result<ComparisonGraph, GraphParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let fail = |line: usize, message: String| GraphParseError { line, message };

    let (hline, header) = lines.next().ok_or_else(|| fail(1, "missing `wmg <m>` header".into()))?;
    let m: usize = header
        .strip_prefix("wmg")
        .and_then(|rest| rest.trim().parse().ok())
        .ok_or_else(|| fail(hline, format!("expected `wmg <m>`, got `{header}`")))?;
    let (cline, names) = lines
        .next()
        .ok_or_else(|| fail(hline + 1, "missing candidate list".into()))?;
    let candidates: Vec<String> = names.split(',').map(|s| s.trim().to_string()).collect();
    if candidates.len() != m {
        return Err(fail(
            cline,
            format!("expected {m} candidates, got {}", candidates.len()),
        ));
    }
    ballots::validate_candidates(&candidates).map_err(|e| fail(cline, e.to_string()))?;

    let mut weights = vec![0i64; m * m];
    let mut seen = vec![false; m * m];
    let mut last = cline;
    for (no, line) in lines {
        last = no;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v, w] = fields[..] else {
            return Err(fail(no, format!("expected `u v w`, got `{line}`")));
        };
        let parse_idx = |s: &str| -> Result<usize, GraphParseError> {
            s.parse::<usize>()
                .ok()
                .filter(|&i| i < m)
                .ok_or_else(|| fail(no, format!("bad candidate index `{s}`")))
        };
        let (u, v) = (parse_idx(u)?, parse_idx(v)?);
        let w: i64 = w.parse().map_err(|_| fail(no, format!("bad weight `{w}`")))?;
        if u == v {
            return Err(fail(no, "self-loops are not allowed".into()));
        }
        if std::mem::replace(&mut seen[u * m + v], true) {
            return Err(fail(no, format!("duplicate edge {u} {v}")));
        }
        weights[u * m + v] = w;
    }
    let missing = (0..m * m).find(|&i| i / m != i % m && !seen[i]);
    if let Some(i) = missing {
        return Err(fail(last, format!("missing edge {} {}", i / m, i % m)));
    }
    Ok(ComparisonGraph { candidates, weights })
}

/// Seeded random antisymmetric graph: for `u < v`, `w(u, v)` is uniform in
/// `-max_weight..=max_weight` and `w(v, u) = -w(u, v)`.
pub fn random_margin_graph(m: usize, max_weight: i64, seed: u64) -> ComparisonGraph {
    assert!(m >= 1, "need at least one candidate");
    assert!(max_weight >= 0, "max_weight must be non-negative");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = vec![0i64; m * m];
    for u in 0..m {
        for v in u + 1..m {
            let w = rng.gen_range(-max_weight..=max_weight);
            weights[u * m + v] = w;
            weights[v * m + u] = -w;
        }
    }
    ComparisonGraph {
        candidates: ballots::default_candidate_names(m),
        weights,
    }
}

/// Margin graph straight from the pairwise tallies, `O(n m^2)`.
pub fn build_wmg_naive(profile: &PreferenceProfile) -> ComparisonGraph {
    let tallies = pairwise_tallies(profile);
    let m = profile.num_candidates();
    let mut weights = vec![0i64; m * m];
    for u in 0..m {
        for v in 0..m {
            weights[u * m + v] = tallies.get(u, v) as i64 - tallies.get(v, u) as i64;
        }
    }
    ComparisonGraph {
        candidates: profile.candidates().to_vec(),
        weights,
    }
}

/// Margin graph through a dominance product of the rank matrices.
///
/// With dense ranks `f`, `A[u][a] = 2 f(a, u)` and `B[a][v] = 2 f(a, v) - 1`
/// give `A[u][a] <= B[a][v]` iff `f(a, u) < f(a, v)`, so the product is the
/// tally matrix `M`. `block_size` is the bucket size of the blocked product;
/// `None` picks [`dominance::default_bucket_size`].
pub fn build_wmg_fast(profile: &PreferenceProfile, block_size: Option<usize>) -> ComparisonGraph {
    let tallies = tallies_via_dominance(profile, block_size);
    let m = profile.num_candidates();
    let mut weights = vec![0i64; m * m];
    for u in 0..m {
        for v in 0..m {
            weights[u * m + v] = tallies.get(u, v) - tallies.get(v, u);
        }
    }
    ComparisonGraph {
        candidates: profile.candidates().to_vec(),
        weights,
    }
}

/// The tally matrix `M` as a dominance product.
pub fn tallies_via_dominance(profile: &PreferenceProfile, block_size: Option<usize>) -> Matrix {
    let ranks = rank_encode(profile);
    let (m, n) = (ranks.num_candidates(), ranks.num_voters());
    let mut a = Matrix::zeros(m, n);
    let mut b = Matrix::zeros(n, m);
    for voter in 0..n {
        for (c, &f) in ranks.row(voter).iter().enumerate() {
            a.set(c, voter, 2 * i64::from(f));
            b.set(voter, c, 2 * i64::from(f) - 1);
        }
    }
    let bucket = block_size.unwrap_or_else(|| dominance::default_bucket_size(m, m));
    dominance::blocked_product(&a, &b, bucket).expect("inner dimensions agree")
}

/// [`tallies_via_dominance`] as a [`TallyMatrix`].
pub fn pairwise_tallies_fast(profile: &PreferenceProfile, block_size: Option<usize>) -> TallyMatrix {
    let c = tallies_via_dominance(profile, block_size);
    let m = c.rows();
    TallyMatrix::from_counts(m, c.as_slice().iter().map(|&x| x as u64).collect())
}

/// Strength-of-link relations on `(M(u, v), M(v, u))` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strength {
    /// `(a, b) >= (c, d)` iff `a - b >= c - d`.
    Margin,
    /// Winning links first, ordered by more supporters, then by fewer
    /// opponents. All non-winning links tie at the bottom.
    WinningVotes,
    /// Winning links first, ordered by fewer opponents, then by more
    /// supporters. All non-winning links tie at the bottom.
    LosingVotes,
    /// Ordered by `a / b` compared exactly by cross-multiplication;
    /// `(a, 0)` with `a > 0` is the top class and `(0, 0)` counts as ratio 0.
    Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unsupported strength `{0}` (expected margin, winning-votes, losing-votes or ratio)")]
pub struct UnsupportedStrength(pub String);

impl FromStr for Strength {
    type Err = UnsupportedStrength;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "margin" => Ok(Strength::Margin),
            "winning-votes" => Ok(Strength::WinningVotes),
            "losing-votes" => Ok(Strength::LosingVotes),
            "ratio" => Ok(Strength::Ratio),
            _ => Err(UnsupportedStrength(s.to_string())),
        }
    }
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strength::Margin => "margin",
            Strength::WinningVotes => "winning-votes",
            Strength::LosingVotes => "losing-votes",
            Strength::Ratio => "ratio",
        })
    }
}

impl Strength {
    /// Compares two links; `Greater` means `x` is the stronger one.
    pub fn compare(self, x: (u64, u64), y: (u64, u64)) -> Ordering {
        let (a, b) = x;
        let (c, d) = y;
        match self {
            Strength::Margin => (a as i128 - b as i128).cmp(&(c as i128 - d as i128)),
            Strength::WinningVotes => match (a > b, c > d) {
                (true, true) => a.cmp(&c).then(d.cmp(&b)),
                (true, false) => Ordering::Greater,
                (false, true) => Ordering::Less,
                (false, false) => Ordering::Equal,
            },
            Strength::LosingVotes => match (a > b, c > d) {
                (true, true) => d.cmp(&b).then(a.cmp(&c)),
                (true, false) => Ordering::Greater,
                (false, true) => Ordering::Less,
                (false, false) => Ordering::Equal,
            },
            Strength::Ratio => {
                let infinite = |p: u64, q: u64| q == 0 && p > 0;
                match (infinite(a, b), infinite(c, d)) {
                    (true, true) => Ordering::Equal,
                    (true, false) => Ordering::Greater,
                    (false, true) => Ordering::Less,
                    (false, false) => {
                        // (0, 0) is read as 0 / 1.
                        let (b, d) = (b.max(1), d.max(1));
                        (u128::from(a) * u128::from(d)).cmp(&(u128::from(c) * u128::from(b)))
                    }
                }
            }
        }
    }
}

/// Comparison graph whose weight on `(u, v)` is the 1-based dense rank of
/// `(M(u, v), M(v, u))` among all present pairs under `strength`.
pub fn build_comparison_graph(profile: &PreferenceProfile, strength: Strength) -> ComparisonGraph {
    comparison_graph_from_tallies(profile.candidates().to_vec(), &pairwise_tallies(profile), strength)
}

/// [`build_comparison_graph`] over precomputed tallies.
///
/// # Panics
///
/// If `candidates` does not match the tally dimension or is invalid.
pub fn comparison_graph_from_tallies(
    candidates: Vec<String>,
    tallies: &TallyMatrix,
    strength: Strength,
) -> ComparisonGraph {
    let m = tallies.num_candidates();
    let mut pairs: Vec<(u64, u64)> = Vec::with_capacity(m * m);
    for u in 0..m {
        for v in 0..m {
            if u != v {
                pairs.push((tallies.get(u, v), tallies.get(v, u)));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs.sort_by(|x, y| strength.compare(*x, *y));
    let mut rank_of: HashMap<(u64, u64), i64> = HashMap::with_capacity(pairs.len());
    let mut rank = 0i64;
    for (i, &p) in pairs.iter().enumerate() {
        if i == 0 || strength.compare(pairs[i - 1], p) != Ordering::Equal {
            rank += 1;
        }
        rank_of.insert(p, rank);
    }
    ComparisonGraph::from_fn(candidates, |u, v| rank_of[&(tallies.get(u, v), tallies.get(v, u))])
        .expect("candidates match the tallies")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballots::parse_profile;

    fn p3() -> PreferenceProfile {
        parse_profile("candidates: a,b,c\na > b > c\nb > c > a\nc > a > b").unwrap()
    }

    #[test]
    fn naive_margins_of_cycle() {
        let g = build_wmg_naive(&p3());
        assert_eq!((g.weight(0, 1), g.weight(1, 2), g.weight(2, 0)), (1, 1, 1));
        assert_eq!((g.weight(1, 0), g.weight(2, 1), g.weight(0, 2)), (-1, -1, -1));
        assert!(g.is_antisymmetric());
    }

    #[test]
    fn naive_unanimous_and_tie() {
        let g = build_wmg_naive(&parse_profile("candidates: a,b,c\na > b > c x3").unwrap());
        assert_eq!((g.weight(0, 1), g.weight(0, 2), g.weight(1, 2)), (3, 3, 3));
        let g = build_wmg_naive(&parse_profile("candidates: a,b\na = b").unwrap());
        assert_eq!((g.weight(0, 1), g.weight(1, 0)), (0, 0));
    }

    #[test]
    fn fast_matches_naive_small() {
        assert_eq!(build_wmg_fast(&p3(), None), build_wmg_naive(&p3()));
        let one = parse_profile("candidates: a\na\na").unwrap();
        let g = build_wmg_fast(&one, Some(1));
        assert_eq!(g.weights(), &[0]);
        let p = crate::ballots::random_profile(20, 40, 0.2, 1);
        let naive = build_wmg_naive(&p);
        for s in [None, Some(1), Some(3), Some(100)] {
            assert_eq!(build_wmg_fast(&p, s), naive);
        }
    }

    #[test]
    fn strength_names() {
        assert_eq!("winning_votes".parse(), Ok(Strength::WinningVotes));
        assert_eq!("Losing-Votes".parse(), Ok(Strength::LosingVotes));
        assert_eq!("ratio".parse(), Ok(Strength::Ratio));
        assert_eq!("borda".parse::<Strength>(), Err(UnsupportedStrength("borda".into())));
    }

    #[test]
    fn winning_votes_ordering() {
        let s = Strength::WinningVotes;
        assert_eq!(s.compare((3, 0), (2, 1)), Ordering::Greater);
        assert_eq!(s.compare((3, 1), (3, 0)), Ordering::Less);
        assert_eq!(s.compare((1, 2), (0, 5)), Ordering::Equal);
        assert_eq!(s.compare((1, 0), (4, 4)), Ordering::Greater);
    }

    #[test]
    fn losing_votes_ordering() {
        let s = Strength::LosingVotes;
        assert_eq!(s.compare((2, 0), (9, 1)), Ordering::Greater);
        assert_eq!(s.compare((5, 1), (4, 1)), Ordering::Greater);
        assert_eq!(s.compare((2, 2), (0, 3)), Ordering::Equal);
    }

    #[test]
    fn ratio_ordering() {
        let s = Strength::Ratio;
        assert_eq!(s.compare((1, 0), (100, 1)), Ordering::Greater);
        assert_eq!(s.compare((1, 0), (7, 0)), Ordering::Equal);
        assert_eq!(s.compare((2, 4), (1, 2)), Ordering::Equal);
        assert_eq!(s.compare((0, 0), (0, 3)), Ordering::Equal);
        assert_eq!(s.compare((0, 0), (1, 3)), Ordering::Less);
        assert_eq!(s.compare((3, 2), (4, 3)), Ordering::Greater);
    }

    #[test]
    fn comparison_graph_dense_ranks() {
        let g = build_comparison_graph(&p3(), Strength::Margin);
        // pairs are (2,1) and (1,2): two classes
        assert_eq!((g.weight(0, 1), g.weight(1, 0)), (2, 1));
        let p = parse_profile("candidates: a,b,c\na > b > c x3\nb > a = c").unwrap();
        let g = build_comparison_graph(&p, Strength::WinningVotes);
        let max = g.weights().iter().copied().max().unwrap();
        assert!(g.weights().iter().all(|&w| w >= 0));
        // (b, c) = (4, 0) beats (a, b) = (3, 1) and (a, c) = (3, 0)
        assert_eq!(g.weight(1, 2), max);
        assert!(g.weight(0, 2) > g.weight(0, 1));
    }

    #[test]
    fn graph_text_round_trip_and_errors() {
        let g = build_wmg_naive(&p3());
        assert_eq!(parse_graph(&g.to_text()).unwrap(), g);
        assert!(parse_graph("wmg 2\na,b\n0 1 3\n").is_err());
        assert_eq!(parse_graph("wmg 2\na,b\n0 1 3\n1 0 -3\n0 1 2").unwrap_err().line, 5);
        assert_eq!(parse_graph("wmg 2\na,b\n0 0 3\n").unwrap_err().line, 3);
        assert_eq!(parse_graph("wmg 2\na,b\n0 2 3\n").unwrap_err().line, 3);
        assert_eq!(parse_graph("wmg 2\na\n").unwrap_err().line, 2);
        assert_eq!(parse_graph("wmg x").unwrap_err().line, 1);
        let single = parse_graph("wmg 1\nsolo\n").unwrap();
        assert_eq!(single.m(), 1);
    }

    #[test]
    fn graph_validation() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert_eq!(
            ComparisonGraph::new(names.clone(), vec![1, 0, 0, 0]),
            Err(GraphError::Diagonal(0))
        );
        assert_eq!(
            ComparisonGraph::new(names, vec![0; 3]),
            Err(GraphError::Size { expected: 4, got: 3 })
        );
    }

    #[test]
    fn reversed_and_induced() {
        let g = build_wmg_naive(&parse_profile("candidates: a,b,c\na > b > c\na > c > b").unwrap());
        let r = g.reversed();
        assert_eq!(r.weight(1, 0), g.weight(0, 1));
        let sub = g.induced(&[2, 0]);
        assert_eq!(sub.candidates(), &["c".to_string(), "a".to_string()]);
        assert_eq!(sub.weight(1, 0), g.weight(0, 2));
    }
}
