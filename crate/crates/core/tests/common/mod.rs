//! Reference implementations shared by the integration tests. Each one is
//! written independently of the library code it checks.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schulze::ballots::{default_candidate_names, PreferenceProfile};
use schulze::{ComparisonGraph, Matrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `M(u, v)` counted from tie-group positions.
pub fn tally_oracle(profile: &PreferenceProfile) -> Vec<Vec<u64>> {
    let m = profile.num_candidates();
    let mut t = vec![vec![0u64; m]; m];
    for vote in profile.votes() {
        let mut level = vec![0usize; m];
        for (pos, group) in vote.groups().iter().enumerate() {
            for &c in group {
                level[c] = pos;
            }
        }
        for u in 0..m {
            for v in 0..m {
                if level[u] < level[v] {
                    t[u][v] += 1;
                }
            }
        }
    }
    t
}

pub fn margins_oracle(profile: &PreferenceProfile) -> Vec<Vec<i64>> {
    let t = tally_oracle(profile);
    let m = t.len();
    (0..m)
        .map(|u| (0..m).map(|v| t[u][v] as i64 - t[v][u] as i64).collect())
        .collect()
}

/// `C[i][j] = #{k : A[i][k] <= B[k][j]}` by direct counting.
pub fn dominance_oracle(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let r = a.len();
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| (0..r).filter(|&k| a[i][k] <= b[k][j]).count() as i64)
                .collect()
        })
        .collect()
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<i64>> {
    m.to_rows()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    (0..r)
        .map(|_| (0..r).map(|_| rng.gen_range(lo..=hi)).collect())
        .collect()
}

/// Widest path widths by enumerating every simple path; `None` on the
/// diagonal.
pub fn widths_by_enumeration(w: &[Vec<i64>]) -> Vec<Vec<Option<i64>>> {
    let m = w.len();
    let mut best = vec![vec![None; m]; m];
    for s in 0..m {
        let mut on_path = vec![false; m];
        on_path[s] = true;
        extend(w, s, i64::MAX, &mut on_path, &mut best[s]);
        best[s][s] = None;
    }
    best
}

fn extend(w: &[Vec<i64>], x: usize, width: i64, on_path: &mut [bool], best: &mut [Option<i64>]) {
    for y in 0..w.len() {
        if on_path[y] {
            continue;
        }
        let nw = width.min(w[x][y]);
        if best[y].is_none_or(|b| nw > b) {
            best[y] = Some(nw);
        }
        on_path[y] = true;
        extend(w, y, nw, on_path, best);
        on_path[y] = false;
    }
}

pub fn graph_weights(g: &ComparisonGraph) -> Vec<Vec<i64>> {
    (0..g.m()).map(|u| g.row(u).to_vec()).collect()
}

/// Winners from widths computed by path enumeration.
pub fn winners_by_enumeration(g: &ComparisonGraph) -> Vec<usize> {
    let b = widths_by_enumeration(&graph_weights(g));
    let m = g.m();
    (0..m)
        .filter(|&u| (0..m).all(|v| u == v || b[u][v] >= b[v][u]))
        .collect()
}

/// Smallest non-empty set whose members all beat every outsider, by
/// enumerating subsets in order of size.
pub fn smith_set_brute(g: &ComparisonGraph) -> Vec<usize> {
    let m = g.m();
    assert!(m <= 16);
    let mut masks: Vec<u32> = (1..(1u32 << m)).collect();
    masks.sort_by_key(|s| s.count_ones());
    for s in masks {
        let inside = |x: usize| s >> x & 1 == 1;
        let dominant = (0..m)
            .filter(|&x| inside(x))
            .all(|x| (0..m).filter(|&y| !inside(y)).all(|y| g.weight(x, y) > g.weight(y, x)));
        if dominant {
            return (0..m).filter(|&x| inside(x)).collect();
        }
    }
    unreachable!("the full candidate set is always dominant")
}

pub fn condorcet_winner(g: &ComparisonGraph) -> Option<usize> {
    let m = g.m();
    (0..m).find(|&u| (0..m).all(|v| u == v || g.weight(u, v) > g.weight(v, u)))
}

/// SCC label of every vertex by Tarjan's algorithm (recursive).
pub fn tarjan(adj: &[Vec<bool>]) -> Vec<usize> {
    struct St<'a> {
        adj: &'a [Vec<bool>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        comp: Vec<usize>,
        comps: usize,
    }
    fn visit(s: &mut St, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for w in 0..s.adj.len() {
            if !s.adj[v][w] {
                continue;
            }
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            loop {
                let w = s.stack.pop().unwrap();
                s.on_stack[w] = false;
                s.comp[w] = s.comps;
                if w == v {
                    break;
                }
            }
            s.comps += 1;
        }
    }
    let n = adj.len();
    let mut s = St {
        adj,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        comp: vec![0; n],
        comps: 0,
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.comp
}

/// Complete digraph with independent uniform weights in `lo..=hi`.
pub fn random_arbitrary_graph(rng: &mut ChaCha8Rng, m: usize, lo: i64, hi: i64) -> ComparisonGraph {
    ComparisonGraph::from_fn(default_candidate_names(m), |_, _| rng.gen_range(lo..=hi)).unwrap()
}

/// The 3x3 matrix with entries in {0, 1, 2} encoded by `code` in base 3.
pub fn ternary_3x3(mut code: u32) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; 3]; 3];
    for cell in 0..9 {
        m[cell / 3][cell % 3] = i64::from(code % 3);
        code /= 3;
    }
    m
}

/// 3x3 instances over {0, 1, 2}: every `A` against a fixed family of `B`s,
/// every `B` against a fixed family of `A`s, and every `(A column, B row)`
/// slice configuration at every slice position. Calls `check(a, b)` on each.
pub fn ternary_3x3_sweep(mut check: impl FnMut(&[Vec<i64>], &[Vec<i64>])) -> usize {
    const ALL: u32 = 19683;
    let mut r = rng(0x3333);
    let mut family: Vec<Vec<Vec<i64>>> = (0..3).map(|c| vec![vec![c; 3]; 3]).collect();
    family.push(vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);
    while family.len() < 27 {
        family.push(ternary_3x3(r.gen_range(0..ALL)));
    }
    let mut count = 0;
    for code in 0..ALL {
        let x = ternary_3x3(code);
        for f in &family {
            check(&x, f);
            check(f, &x);
            count += 2;
        }
    }
    // Slice k of an instance is (column k of A, row k of B): 3^6 options.
    for code in 0..729u32 {
        let mut a = vec![vec![0i64; 3]; 3];
        let mut b = vec![vec![0i64; 3]; 3];
        for k in 0..3 {
            let mut c = (code + 243 * k as u32) % 729;
            for i in 0..3 {
                a[i][k] = i64::from(c % 3);
                c /= 3;
            }
            for j in 0..3 {
                b[k][j] = i64::from(c % 3);
                c /= 3;
            }
        }
        check(&a, &b);
        count += 1;
    }
    count
}
