//! Preference profiles over weak orders.
//!
//! A vote is a [`WeakOrder`]: an ordered list of tie-groups, most preferred
//! first. Profiles are read from a small line-oriented text format:
//!
//! ```text
//! # comment
//! candidates: a,b,c,d
//! a > b = c > d
//! d > c > b > a x3
//! ```
//!
//! The optional trailing `xK` repeats a vote `K` times.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Index of a candidate in declaration order.
pub type Candidate = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("a profile needs at least one candidate")]
    NoCandidates,
    #[error("a profile needs at least one vote")]
    NoVotes,
    #[error("duplicate candidate `{0}`")]
    DuplicateCandidate(String),
    #[error("invalid candidate name `{0}`")]
    InvalidCandidateName(String),
    #[error("candidate index {index} out of range for {m} candidates")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("candidate {0} appears more than once in a vote")]
    RepeatedCandidate(Candidate),
    #[error("candidate {0} is missing from a vote")]
    MissingCandidate(Candidate),
    #[error("empty tie-group")]
    EmptyGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected a `candidates:` line")]
    MissingHeader,
    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),
    #[error("candidate `{0}` repeated within a vote")]
    RepeatedCandidate(String),
    #[error("candidate `{0}` missing from the vote")]
    MissingCandidate(String),
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// A ballot-file error with the 1-based line it was found on.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

/// One voter's weak order: tie-groups from most to least preferred.
///
/// Members of a group are kept sorted so equal orders compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeakOrder {
    groups: Vec<Vec<Candidate>>,
}

impl WeakOrder {
    /// Checks that `groups` partitions `0..m`.
    pub fn new(mut groups: Vec<Vec<Candidate>>, m: usize) -> Result<Self, ProfileError> {
        let mut seen = vec![false; m];
        for group in &mut groups {
            if group.is_empty() {
                return Err(ProfileError::EmptyGroup);
            }
            for &c in group.iter() {
                if c >= m {
                    return Err(ProfileError::IndexOutOfRange { index: c, m });
                }
                if std::mem::replace(&mut seen[c], true) {
                    return Err(ProfileError::RepeatedCandidate(c));
                }
            }
            group.sort_unstable();
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(ProfileError::MissingCandidate(missing));
        }
        Ok(WeakOrder { groups })
    }

    /// A linear order, most preferred first.
    pub fn strict(order: &[Candidate]) -> Result<Self, ProfileError> {
        Self::new(order.iter().map(|&c| vec![c]).collect(), order.len())
    }

    /// Rebuilds the order from per-candidate ranks (lower is better).
    pub fn from_ranks(ranks: &[u32]) -> Self {
        let mut levels: Vec<u32> = ranks.to_vec();
        levels.sort_unstable();
        levels.dedup();
        let mut groups = vec![Vec::new(); levels.len()];
        for (c, r) in ranks.iter().enumerate() {
            let g = levels.binary_search(r).expect("rank present");
            groups[g].push(c);
        }
        WeakOrder { groups }
    }

    pub fn groups(&self) -> &[Vec<Candidate>] {
        &self.groups
    }

    pub fn num_candidates(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Dense 0-based ranks, indexed by candidate.
    pub fn ranks(&self) -> Vec<u32> {
        let mut ranks = vec![0; self.num_candidates()];
        for (g, group) in self.groups.iter().enumerate() {
            for &c in group {
                ranks[c] = g as u32;
            }
        }
        ranks
    }

    pub fn is_strict(&self) -> bool {
        self.groups.iter().all(|g| g.len() == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    candidates: Vec<String>,
    votes: Vec<WeakOrder>,
}

impl PreferenceProfile {
    pub fn new(candidates: Vec<String>, votes: Vec<WeakOrder>) -> Result<Self, ProfileError> {
        validate_candidates(&candidates)?;
        if votes.is_empty() {
            return Err(ProfileError::NoVotes);
        }
        let m = candidates.len();
        for vote in &votes {
            // Re-validate: orders built for a different m would slip through.
            WeakOrder::new(vote.groups.clone(), m)?;
        }
        Ok(PreferenceProfile { candidates, votes })
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn votes(&self) -> &[WeakOrder] {
        &self.votes
    }

    /// `m`.
    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    /// `n`.
    pub fn num_voters(&self) -> usize {
        self.votes.len()
    }

    pub fn candidate_index(&self, name: &str) -> Option<Candidate> {
        self.candidates.iter().position(|c| c == name)
    }

    /// Serializes in the ballot file format; consecutive equal votes are
    /// folded into one line with an `xK` suffix.
    pub fn to_ballot_text(&self) -> String {
        let mut out = format!("candidates: {}\n", self.candidates.join(","));
        let mut i = 0;
        while i < self.votes.len() {
            let mut j = i + 1;
            while j < self.votes.len() && self.votes[j] == self.votes[i] {
                j += 1;
            }
            out.push_str(&self.format_vote(&self.votes[i]));
            if j - i > 1 {
                out.push_str(&format!(" x{}", j - i));
            }
            out.push('\n');
            i = j;
        }
        out
    }

    pub fn format_vote(&self, vote: &WeakOrder) -> String {
        vote.groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|&c| self.candidates[c].as_str())
                    .collect::<Vec<_>>()
                    .join(" = ")
            })
            .collect::<Vec<_>>()
            .join(" > ")
    }
}

impl fmt::Display for PreferenceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ballot_text())
    }
}

pub(crate) fn validate_candidates(candidates: &[String]) -> Result<(), ProfileError> {
    if candidates.is_empty() {
        return Err(ProfileError::NoCandidates);
    }
    let mut seen = HashMap::with_capacity(candidates.len());
    for name in candidates {
        if !is_valid_name(name) {
            return Err(ProfileError::InvalidCandidateName(name.clone()));
        }
        if seen.insert(name.as_str(), ()).is_some() {
            return Err(ProfileError::DuplicateCandidate(name.clone()));
        }
    }
    Ok(())
}

/// Names are non-empty and free of whitespace and the format's separators.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('#')
        && name
            .chars()
            .all(|ch| !ch.is_whitespace() && !matches!(ch, ',' | '>' | '=' | ':'))
}

/// Default names: `a`..`z` when they suffice, `c0`, `c1`, ... otherwise.
pub fn default_candidate_names(m: usize) -> Vec<String> {
    if m <= 26 {
        (0..m).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (0..m).map(|i| format!("c{i}")).collect()
    }
}

/// Parses a ballot file.
pub fn parse_profile(text: &str) -> Result<PreferenceProfile, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(ParseError {
        line: text.lines().count().max(1),
        kind: ParseErrorKind::MissingHeader,
    })?;
    let err = |line: usize, kind: ParseErrorKind| ParseError { line, kind };
    let list = header
        .strip_prefix("candidates:")
        .ok_or_else(|| err(header_line, ParseErrorKind::MissingHeader))?;
    let candidates: Vec<String> = list.split(',').map(|s| s.trim().to_string()).collect();
    validate_candidates(&candidates).map_err(|e| err(header_line, e.into()))?;
    let index: HashMap<&str, Candidate> = candidates.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();

    let mut votes = Vec::new();
    let mut last_line = header_line;
    for (line_no, line) in lines {
        last_line = line_no;
        let (body, multiplicity) = split_multiplicity(line).map_err(|k| err(line_no, k))?;
        let vote = parse_vote(body, &candidates, &index).map_err(|k| err(line_no, k))?;
        votes.extend(std::iter::repeat_n(vote, multiplicity));
    }
    PreferenceProfile::new(candidates, votes).map_err(|e| err(last_line, e.into()))
}

fn split_multiplicity(line: &str) -> Result<(&str, usize), ParseErrorKind> {
    if let Some(pos) = line.rfind(char::is_whitespace) {
        let (head, tail) = (line[..pos].trim_end(), &line[pos + 1..]);
        let ends_with_separator = head.ends_with('>') || head.ends_with('=');
        if let Some(digits) = tail.strip_prefix('x') {
            if !head.is_empty() && !ends_with_separator {
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(ParseErrorKind::Malformed(format!("bad multiplicity `{tail}`")));
                }
                let k: usize = digits
                    .parse()
                    .map_err(|_| ParseErrorKind::Malformed(format!("bad multiplicity `{tail}`")))?;
                if k == 0 {
                    return Err(ParseErrorKind::Malformed("multiplicity must be positive".into()));
                }
                return Ok((head, k));
            }
        }
    }
    Ok((line, 1))
}

fn parse_vote(
    body: &str,
    candidates: &[String],
    index: &HashMap<&str, Candidate>,
) -> Result<WeakOrder, ParseErrorKind> {
    let m = candidates.len();
    let mut seen = vec![false; m];
    let mut groups = Vec::new();
    for group_text in body.split('>') {
        let mut group = Vec::new();
        for name in group_text.split('=') {
            let name = name.trim();
            if name.is_empty() {
                return Err(ParseErrorKind::Malformed(format!("empty name in `{body}`")));
            }
            if !is_valid_name(name) {
                return Err(ParseErrorKind::Malformed(format!("bad token `{name}`")));
            }
            let &c = index
                .get(name)
                .ok_or_else(|| ParseErrorKind::UnknownCandidate(name.to_string()))?;
            if std::mem::replace(&mut seen[c], true) {
                return Err(ParseErrorKind::RepeatedCandidate(name.to_string()));
            }
            group.push(c);
        }
        groups.push(group);
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(ParseErrorKind::MissingCandidate(candidates[missing].clone()));
    }
    WeakOrder::new(groups, m).map_err(ParseErrorKind::from)
}

/// Per-voter dense ranks: `rank(a, u) < rank(a, v)` iff voter `a` strictly
/// prefers `u` to `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMatrix {
    n: usize,
    m: usize,
    ranks: Vec<u32>,
}

impl RankMatrix {
    pub fn num_voters(&self) -> usize {
        self.n
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    pub fn rank(&self, voter: usize, candidate: Candidate) -> u32 {
        self.ranks[voter * self.m + candidate]
    }

    pub fn row(&self, voter: usize) -> &[u32] {
        &self.ranks[voter * self.m..(voter + 1) * self.m]
    }
}

pub fn rank_encode(profile: &PreferenceProfile) -> RankMatrix {
    let m = profile.num_candidates();
    let mut ranks = Vec::with_capacity(profile.num_voters() * m);
    for vote in profile.votes() {
        ranks.extend(vote.ranks());
    }
    RankMatrix {
        n: profile.num_voters(),
        m,
        ranks,
    }
}

/// `M(u, v)`: how many voters strictly prefer `u` to `v`. Diagonal is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TallyMatrix {
    m: usize,
    counts: Vec<u64>,
}

impl TallyMatrix {
    pub(crate) fn from_counts(m: usize, counts: Vec<u64>) -> Self {
        debug_assert_eq!(counts.len(), m * m);
        TallyMatrix { m, counts }
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    pub fn get(&self, u: Candidate, v: Candidate) -> u64 {
        self.counts[u * self.m + v]
    }

    pub fn row(&self, u: Candidate) -> &[u64] {
        &self.counts[u * self.m..(u + 1) * self.m]
    }
}

/// Direct `O(n m^2)` count over the rank matrix.
pub fn pairwise_tallies(profile: &PreferenceProfile) -> TallyMatrix {
    let ranks = rank_encode(profile);
    let m = ranks.m;
    let mut counts = vec![0u64; m * m];
    for a in 0..ranks.n {
        let row = ranks.row(a);
        for (u, &ru) in row.iter().enumerate() {
            let out = &mut counts[u * m..(u + 1) * m];
            for (slot, &rv) in out.iter_mut().zip(row) {
                *slot += u64::from(ru < rv);
            }
        }
    }
    TallyMatrix { m, counts }
}

/// Seeded random profile: each vote is a uniform permutation whose adjacent
/// entries are merged into one tie-group with probability `tie_probability`.
pub fn random_profile(m: usize, n: usize, tie_probability: f64, seed: u64) -> PreferenceProfile {
    assert!(m >= 1 && n >= 1, "random_profile needs m, n >= 1");
    assert!(
        (0.0..=1.0).contains(&tie_probability),
        "tie probability must lie in [0, 1]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<Candidate> = (0..m).collect();
    let votes = (0..n)
        .map(|_| {
            perm.shuffle(&mut rng);
            let mut groups: Vec<Vec<Candidate>> = vec![vec![perm[0]]];
            for &c in &perm[1..] {
                if rng.gen_bool(tie_probability) {
                    groups.last_mut().expect("non-empty").push(c);
                } else {
                    groups.push(vec![c]);
                }
            }
            WeakOrder::new(groups, m).expect("permutation partitions the candidates")
        })
        .collect();
    PreferenceProfile::new(default_candidate_names(m), votes).expect("valid by construction")
}
