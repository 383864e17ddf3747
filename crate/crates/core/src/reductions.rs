//! Voting instances built from dominance-product inputs.
//!
//! [`dominance_to_wmg_instance`] turns `r x r` matrices `A, B` into a
//! profile with `r` voters and `2r` candidates whose margins encode the
//! dominance product: `w(u_i, v_j) = 2 C[i][j] - r`.
//!
//! [`dominating_pairs_to_schulze_instance`] builds a profile with `2r + 2`
//! candidates and `10r - 2` voters (after padding `r` by one) in which the
//! special candidate `W` is a Schulze winner iff no dominating pair exists.

use std::fmt;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::ballots::{Candidate, PreferenceProfile, WeakOrder};
use crate::dominance::{make_entries_distinct, DominanceInstance, Matrix};
use crate::majority_graph::ComparisonGraph;

pub const W_NAME: &str = "W";
pub const W_PRIME_NAME: &str = "Wp";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("margin {weight} on (u{i}, v{j}) has the wrong parity for r = {r}")]
    Parity { i: usize, j: usize, weight: i64, r: usize },
    #[error("margin {weight} on (u{i}, v{j}) is outside [-{r}, {r}]")]
    OutOfRange { i: usize, j: usize, weight: i64, r: usize },
    #[error("roles describe {found} row candidates, expected {r}")]
    RolesMismatch { found: usize, r: usize },
    #[error("role candidate {0} is not in the graph")]
    UnknownCandidate(Candidate),
}

/// Candidate index of every role. `w` and `w_prime` are only present in
/// winner-verification instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roles {
    pub u: Vec<Candidate>,
    pub v: Vec<Candidate>,
    pub w: Option<Candidate>,
    pub w_prime: Option<Candidate>,
}

impl Roles {
    /// `(role, candidate)` pairs: `u1.., v1.., W, W'`.
    pub fn entries(&self) -> Vec<(String, Candidate)> {
        let mut out: Vec<(String, Candidate)> = Vec::with_capacity(self.u.len() + self.v.len() + 2);
        out.extend(self.u.iter().enumerate().map(|(i, &c)| (format!("u{}", i + 1), c)));
        out.extend(self.v.iter().enumerate().map(|(j, &c)| (format!("v{}", j + 1), c)));
        out.extend(self.w.map(|c| ("W".to_string(), c)));
        out.extend(self.w_prime.map(|c| ("W'".to_string(), c)));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionInstance {
    pub profile: PreferenceProfile,
    pub roles: Roles,
    /// Dimension of the matrices actually encoded (after padding).
    pub r: usize,
    pub padded: bool,
    /// The encoded matrices, after padding and before the distinctness
    /// rewrite. Their dominance product is what the profile encodes.
    pub source: DominanceInstance,
}

impl ReductionInstance {
    /// Role sidecar: role names mapped to candidate names, plus `r` and
    /// `padded`.
    pub fn roles_json(&self) -> String {
        let names = self.profile.candidates();
        let mut roles = Map::new();
        for (role, c) in self.roles.entries() {
            roles.insert(role, Value::String(names[c].clone()));
        }
        let doc = json!({ "r": self.r, "padded": self.padded, "roles": roles });
        serde_json::to_string_pretty(&doc).expect("plain JSON values serialize")
    }
}

impl fmt::Display for ReductionInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.profile.to_ballot_text())
    }
}

fn pair_names(r: usize) -> Vec<String> {
    (1..=r)
        .map(|i| format!("u{i}"))
        .chain((1..=r).map(|j| format!("v{j}")))
        .collect()
}

/// Candidates `u_1..u_r` (indices `0..r`) and `v_1..v_r` (`r..2r`) ordered
/// by the numbers voter `k` attaches to them: `A[i][k]` for `u_i`,
/// `B[k][j]` for `v_j`, smallest first. Entries must be distinct.
fn column_order(a: &Matrix, b: &Matrix, k: usize) -> Vec<Candidate> {
    let r = a.rows();
    let mut keyed: Vec<(i64, Candidate)> = (0..r)
        .map(|i| (a.get(i, k), i))
        .chain((0..r).map(|j| (b.get(k, j), r + j)))
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, c)| c).collect()
}

fn strict(order: &[Candidate]) -> WeakOrder {
    WeakOrder::strict(order).expect("reduction orders are permutations")
}

/// Profile with `r` voters over `u_1..u_r, v_1..v_r` whose margins satisfy
/// `w(u_i, v_j) = 2 C[i][j] - r`.
pub fn dominance_to_wmg_instance(inst: &DominanceInstance) -> ReductionInstance {
    let r = inst.r();
    let distinct = make_entries_distinct(inst);
    let votes = (0..r)
        .map(|k| strict(&column_order(distinct.a(), distinct.b(), k)))
        .collect();
    let profile = PreferenceProfile::new(pair_names(r), votes).expect("r >= 1 gives a valid profile");
    ReductionInstance {
        profile,
        roles: Roles {
            u: (0..r).collect(),
            v: (r..2 * r).collect(),
            w: None,
            w_prime: None,
        },
        r,
        padded: false,
        source: inst.clone(),
    }
}

/// Reads the dominance product back off a margin graph:
/// `C[i][j] = (w(u_i, v_j) + r) / 2`.
pub fn recover_dominance_from_wmg(graph: &ComparisonGraph, roles: &Roles, r: usize) -> Result<Matrix, ReductionError> {
    for side in [&roles.u, &roles.v] {
        if side.len() != r {
            return Err(ReductionError::RolesMismatch { found: side.len(), r });
        }
        if let Some(&c) = side.iter().find(|&&c| c >= graph.m()) {
            return Err(ReductionError::UnknownCandidate(c));
        }
    }
    let r_signed = r as i64;
    let mut c = Matrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            let weight = graph.weight(roles.u[i], roles.v[j]);
            if weight.abs() > r_signed {
                return Err(ReductionError::OutOfRange {
                    i: i + 1,
                    j: j + 1,
                    weight,
                    r,
                });
            }
            if (weight + r_signed) % 2 != 0 {
                return Err(ReductionError::Parity {
                    i: i + 1,
                    j: j + 1,
                    weight,
                    r,
                });
            }
            c.set(i, j, (weight + r_signed) / 2);
        }
    }
    Ok(c)
}

/// Grows `A, B` to `(r + 1) x (r + 1)` so that every product entry is at
/// least one and the new row and column hold no dominating pair.
///
/// First a column of `0`s is appended to `A` and a row of `1`s to `B`;
/// then `A` gets a row of `max + 1` (corner `0`) and `B` a column of
/// `min - 1` (corner `1`), extremes taken over both matrices.
pub fn pad_for_winner_reduction(inst: &DominanceInstance) -> DominanceInstance {
    let r = inst.r();
    let n = r + 1;
    let (a, b) = (inst.a(), inst.b());
    let mut pa = Matrix::zeros(n, n);
    let mut pb = Matrix::zeros(n, n);
    for i in 0..r {
        for k in 0..r {
            pa.set(i, k, a.get(i, k));
            pb.set(i, k, b.get(i, k));
        }
        pa.set(i, r, 0);
        pb.set(r, i, 1);
    }
    let hi = pa.max_entry().into_iter().chain(pb.max_entry()).max().unwrap_or(0) + 1;
    let lo = pa.min_entry().into_iter().chain(pb.min_entry()).min().unwrap_or(0) - 1;
    for k in 0..r {
        pa.set(r, k, hi);
        pb.set(k, r, lo);
    }
    pa.set(r, r, 0);
    pb.set(r, r, 1);
    DominanceInstance::new(pa, pb).expect("padded matrices are square")
}

/// Two voters adding 2 to `M(x, y)` for `x` in `xs`, `y` in `ys`, nothing to
/// `M(y, x)`, and 1 to every other ordered pair.
fn mcgarvey_pair(xs: &[Candidate], ys: &[Candidate], m: usize) -> [WeakOrder; 2] {
    let rest: Vec<Candidate> = (0..m).filter(|c| !xs.contains(c) && !ys.contains(c)).collect();
    let first: Vec<Candidate> = xs.iter().chain(ys).chain(&rest).copied().collect();
    let second: Vec<Candidate> = rest
        .iter()
        .rev()
        .chain(xs.iter().rev())
        .chain(ys.iter().rev())
        .copied()
        .collect();
    [strict(&first), strict(&second)]
}

/// Profile over `u_1..u_r, v_1..v_r, W, W'` (with `r` the padded
/// dimension) in which `W` is a Schulze winner iff the padded instance has
/// no dominating pair.
pub fn dominating_pairs_to_schulze_instance(inst: &DominanceInstance) -> ReductionInstance {
    let padded = pad_for_winner_reduction(inst);
    let r = padded.r();
    let distinct = make_entries_distinct(&padded);
    let us: Vec<Candidate> = (0..r).collect();
    let vs: Vec<Candidate> = (r..2 * r).collect();
    let (w, wp) = (2 * r, 2 * r + 1);
    let m = 2 * r + 2;

    let mut votes = Vec::with_capacity(10 * r - 2);
    for k in 0..r {
        let mut order = column_order(distinct.a(), distinct.b(), k);
        order.extend([wp, w]);
        votes.push(strict(&order));
    }
    for k in 0..r {
        let mut order = vec![w, wp];
        order.extend(column_order(distinct.a(), distinct.b(), k));
        votes.push(strict(&order));
    }
    let third: Vec<Candidate> = std::iter::once(wp)
        .chain(vs.iter().rev().copied())
        .chain(std::iter::once(w))
        .chain(us.iter().rev().copied())
        .collect();
    let fourth: Vec<Candidate> = std::iter::once(w)
        .chain(us.iter().copied())
        .chain(vs.iter().copied())
        .chain(std::iter::once(wp))
        .collect();
    for _ in 1..r {
        votes.push(strict(&third));
    }
    for _ in 1..r {
        votes.push(strict(&fourth));
    }
    for (xs, ys) in [(vec![w], vec![wp]), (vec![wp], vs.clone()), (vs.clone(), vec![w])] {
        for _ in 0..r {
            votes.extend(mcgarvey_pair(&xs, &ys, m));
        }
    }

    let mut names = pair_names(r);
    names.push(W_NAME.to_string());
    names.push(W_PRIME_NAME.to_string());
    let profile = PreferenceProfile::new(names, votes).expect("reduction profile is valid");
    ReductionInstance {
        profile,
        roles: Roles {
            u: us,
            v: vs,
            w: Some(w),
            w_prime: Some(wp),
        },
        r,
        padded: true,
        source: padded,
    }
}

/// Whether `A, B` have a dominating pair, answered by checking whether `W`
/// is a Schulze winner of the generated instance.
pub fn decide_dominating_pairs_via_schulze(inst: &DominanceInstance) -> bool {
    let red = dominating_pairs_to_schulze_instance(inst);
    let graph = crate::majority_graph::build_wmg_naive(&red.profile);
    !crate::bottleneck::verify_winner(&graph, red.roles.w.expect("winner instance has W"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballots::pairwise_tallies;
    use crate::dominance::{dominance_product_bruteforce, has_dominating_pair};
    use crate::majority_graph::build_wmg_naive;

    fn sample() -> DominanceInstance {
        DominanceInstance::from_rows(&[[1, 3], [2, 4]], &[[2, 1], [3, 4]]).unwrap()
    }

    #[test]
    fn wmg_instance_shape_and_margins() {
        let red = dominance_to_wmg_instance(&sample());
        assert_eq!(red.profile.num_voters(), 2);
        assert_eq!(red.profile.num_candidates(), 4);
        assert!(red.profile.votes().iter().all(WeakOrder::is_strict));
        let g = build_wmg_naive(&red.profile);
        assert_eq!(g.weight(0, 2), 2);
        assert_eq!(g.weight(1, 3), 0);
        let c = recover_dominance_from_wmg(&g, &red.roles, red.r).unwrap();
        assert_eq!(c.to_rows(), vec![vec![2, 2], vec![1, 1]]);
    }

    #[test]
    fn wmg_instance_single_entry() {
        let inst = DominanceInstance::from_rows(&[[0]], &[[1]]).unwrap();
        let red = dominance_to_wmg_instance(&inst);
        assert_eq!(red.profile.votes()[0].groups(), &[vec![0], vec![1]]);
        let g = build_wmg_naive(&red.profile);
        assert_eq!(g.weight(0, 1), 1);
        assert_eq!(
            recover_dominance_from_wmg(&g, &red.roles, 1).unwrap().to_rows(),
            vec![vec![1]]
        );
    }

    #[test]
    fn recover_rejects_bad_parity() {
        let red = dominance_to_wmg_instance(&sample());
        let g = ComparisonGraph::from_fn(red.profile.candidates().to_vec(), |u, v| if u < v { 1 } else { -1 }).unwrap();
        assert!(matches!(
            recover_dominance_from_wmg(&g, &red.roles, 2),
            Err(ReductionError::Parity { .. })
        ));
        assert!(matches!(
            recover_dominance_from_wmg(&g, &red.roles, 3),
            Err(ReductionError::RolesMismatch { .. })
        ));
    }

    #[test]
    fn padding_shape() {
        let p = pad_for_winner_reduction(&sample());
        assert_eq!(p.a().to_rows(), vec![vec![1, 3, 0], vec![2, 4, 0], vec![5, 5, 0]]);
        assert_eq!(p.b().to_rows(), vec![vec![2, 1, -1], vec![3, 4, -1], vec![1, 1, 1]]);
        let c = dominance_product_bruteforce(&p);
        // top-left block gains one from the appended slice
        assert_eq!(c.to_rows(), vec![vec![3, 3, 1], vec![2, 2, 1], vec![1, 1, 1]]);
    }

    #[test]
    fn winner_instance_tables() {
        let red = dominating_pairs_to_schulze_instance(&sample());
        let r = red.r;
        assert_eq!(r, 3);
        assert_eq!(red.profile.num_candidates(), 2 * r + 2);
        assert_eq!(red.profile.num_voters(), 10 * r - 2);
        let t = pairwise_tallies(&red.profile);
        let g = build_wmg_naive(&red.profile);
        let c = dominance_product_bruteforce(&red.source);
        let (w, wp) = (red.roles.w.unwrap(), red.roles.w_prime.unwrap());
        let ri = r as u64;
        assert_eq!(t.get(w, wp), 6 * ri - 1);
        assert_eq!(t.get(wp, w), 4 * ri - 1);
        assert_eq!(g.weight(w, wp), 2 * r as i64);
        for i in 0..r {
            assert_eq!(t.get(w, red.roles.u[i]), 6 * ri - 2);
            assert_eq!(g.weight(w, red.roles.u[i]), 2 * r as i64 - 2);
            for j in 0..r {
                let cij = c.get(i, j);
                assert_eq!(t.get(red.roles.u[i], red.roles.v[j]) as i64, 2 * cij + 4 * r as i64 - 1);
                assert_eq!(g.weight(red.roles.u[i], red.roles.v[j]), 4 * cij - 2 * r as i64);
            }
        }
        for &v in &red.roles.v {
            assert_eq!(g.weight(v, w), 2 * r as i64);
        }
    }

    #[test]
    fn decision_extremes() {
        let z = Matrix::zeros(2, 2);
        assert!(decide_dominating_pairs_via_schulze(
            &DominanceInstance::new(z.clone(), z).unwrap()
        ));
        let inst = DominanceInstance::new(Matrix::filled(2, 2, 9), Matrix::filled(2, 2, 1)).unwrap();
        assert!(!decide_dominating_pairs_via_schulze(&inst));
        assert!(!has_dominating_pair(&pad_for_winner_reduction(&inst)));
    }

    #[test]
    fn roles_sidecar() {
        let red = dominating_pairs_to_schulze_instance(&sample());
        let doc: Value = serde_json::from_str(&red.roles_json()).unwrap();
        assert_eq!(doc["r"], 3);
        assert_eq!(doc["padded"], true);
        assert_eq!(doc["roles"]["W'"], "Wp");
        assert_eq!(doc["roles"]["u3"], "u3");
        assert_eq!(doc["roles"]["v1"], "v1");
    }
}
