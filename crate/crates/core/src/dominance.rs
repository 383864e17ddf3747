//! Dominance products.
//!
//! For `A` (p×q) and `B` (q×t) the dominance product is the p×t matrix
//! `C[i][j] = |{k : A[i][k] <= B[k][j]}|`. A dominating pair is an `(i, j)`
//! with `C[i][j] = q`.
//!
//! The blocked algorithm works slice by slice. For a fixed `k` the values of
//! column `k` of `A` and row `k` of `B` are merged into one sorted order
//! (A-entries first on equal values, so `<=` becomes strict precedence) and
//! cut into buckets of `bucket_size` consecutive positions. An A-entry in an
//! earlier bucket than a B-entry dominates it; pairs sharing a bucket are
//! compared directly. The cross-bucket part is a sum of 0/1 matrix products
//! which is evaluated as one AND+popcount product over bitset rows indexed by
//! `(k, bucket)`.
//!
//! Bucket size trades the two terms: small buckets mean long bitset rows
//! (`q * ceil((p + t) / bucket_size)` bits), large buckets mean more direct
//! comparisons (about `q * (p + t) * bucket_size / 2`). A bucket covering the
//! whole slice degenerates to brute force.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DominanceError {
    #[error("rows have different lengths")]
    Ragged,
    #[error("matrices must be square and of equal dimension (got {a_rows}x{a_cols} and {b_rows}x{b_cols})")]
    Shape {
        a_rows: usize,
        a_cols: usize,
        b_rows: usize,
        b_cols: usize,
    },
    #[error("inner dimensions differ: {a_cols} vs {b_rows}")]
    InnerDimension { a_cols: usize, b_rows: usize },
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl Matrix {
    pub fn filled(rows: usize, cols: usize, value: i64) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0)
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self, DominanceError> {
        if data.len() != rows * cols {
            return Err(DominanceError::Ragged);
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, DominanceError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.as_ref().len() != cols {
                return Err(DominanceError::Ragged);
            }
            data.extend_from_slice(row.as_ref());
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn identity(r: usize) -> Self {
        let mut m = Self::zeros(r, r);
        for i in 0..r {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_entry(&self) -> Option<i64> {
        self.data.iter().copied().max()
    }

    pub fn min_entry(&self) -> Option<i64> {
        self.data.iter().copied().min()
    }

    /// `mat <r>` followed by `r` lines of `r` integers (square matrices only).
    pub fn to_text(&self) -> String {
        assert!(self.is_square(), "matrix text format is for square matrices");
        let mut out = format!("mat {}\n", self.rows);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(i64::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(i64::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct MatrixParseError {
    pub line: usize,
    pub message: String,
}

impl FromStr for Matrix {
    type Err = MatrixParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse_matrix(text)
    }
}

/// Parses the `mat <r>` text format. `#` comment lines and blank lines are
/// ignored.
pub fn parse_matrix(text: &str) -> Result<Matrix, MatrixParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let fail = |line: usize, message: String| MatrixParseError { line, message };
    let (hline, header) = lines.next().ok_or_else(|| fail(1, "missing `mat <r>` header".into()))?;
    let r: usize = header
        .strip_prefix("mat")
        .and_then(|rest| rest.trim().parse().ok())
        .ok_or_else(|| fail(hline, format!("expected `mat <r>`, got `{header}`")))?;
    let mut data = Vec::with_capacity(r * r);
    let mut last = hline;
    for _ in 0..r {
        let (no, line) = lines
            .next()
            .ok_or_else(|| fail(last + 1, format!("expected {r} rows")))?;
        last = no;
        let row: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|e| fail(no, format!("bad integer: {e}")))?;
        if row.len() != r {
            return Err(fail(no, format!("expected {r} entries, got {}", row.len())));
        }
        data.extend(row);
    }
    if let Some((no, _)) = lines.next() {
        return Err(fail(no, "trailing content after matrix".into()));
    }
    Ok(Matrix { rows: r, cols: r, data })
}

/// A pair of `r x r` matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceInstance {
    a: Matrix,
    b: Matrix,
}

impl DominanceInstance {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self, DominanceError> {
        if !a.is_square() || !b.is_square() || a.rows != b.rows {
            return Err(DominanceError::Shape {
                a_rows: a.rows,
                a_cols: a.cols,
                b_rows: b.rows,
                b_cols: b.cols,
            });
        }
        Ok(DominanceInstance { a, b })
    }

    pub fn from_rows<R: AsRef<[i64]>>(a: &[R], b: &[R]) -> Result<Self, DominanceError> {
        Self::new(Matrix::from_rows(a)?, Matrix::from_rows(b)?)
    }

    pub fn r(&self) -> usize {
        self.a.rows
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn into_parts(self) -> (Matrix, Matrix) {
        (self.a, self.b)
    }
}

fn check_inner(a: &Matrix, b: &Matrix) -> Result<(), DominanceError> {
    if a.cols != b.rows {
        return Err(DominanceError::InnerDimension {
            a_cols: a.cols,
            b_rows: b.rows,
        });
    }
    Ok(())
}

pub fn dominance_product_bruteforce(inst: &DominanceInstance) -> Matrix {
    bruteforce_product(&inst.a, &inst.b).expect("square instance")
}

/// Definitional `O(p q t)` dominance product of rectangular matrices.
pub fn bruteforce_product(a: &Matrix, b: &Matrix) -> Result<Matrix, DominanceError> {
    check_inner(a, b)?;
    let mut c = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let arow = a.row(i);
        let crow = &mut c.data[i * b.cols..(i + 1) * b.cols];
        for (k, &aik) in arow.iter().enumerate() {
            for (slot, &bkj) in crow.iter_mut().zip(b.row(k)) {
                *slot += i64::from(aik <= bkj);
            }
        }
    }
    Ok(c)
}

pub fn dominance_product_blocked(inst: &DominanceInstance, bucket_size: usize) -> Matrix {
    blocked_product(&inst.a, &inst.b, bucket_size).expect("square instance")
}

/// Bucket size balancing the bitset and direct-comparison terms for a
/// `p x q` by `q x t` product: `sqrt(p t / 32)`, at least 1.
pub fn default_bucket_size(p: usize, t: usize) -> usize {
    (((p * t) as f64 / 32.0).sqrt().round() as usize).max(1)
}

/// Upper bound on bitset row length per chunk of slices, in words.
const CHUNK_WORDS: usize = 1024;

/// Blocked dominance product of rectangular matrices; see the module docs.
pub fn blocked_product(a: &Matrix, b: &Matrix, bucket_size: usize) -> Result<Matrix, DominanceError> {
    check_inner(a, b)?;
    assert!(bucket_size >= 1, "bucket size must be at least 1");
    let (p, q, t) = (a.rows, a.cols, b.cols);
    let mut c = Matrix::zeros(p, t);
    if p == 0 || t == 0 || q == 0 {
        return Ok(c);
    }
    let slice_len = p + t;
    let buckets = slice_len.div_ceil(bucket_size);
    // Number of slices whose (k, bucket) bits fit in one chunk.
    let slices_per_chunk = ((CHUNK_WORDS * bits::WORD_BITS) / buckets).max(1);

    let mut merged: Vec<(i64, u8, u32)> = Vec::with_capacity(slice_len);
    let mut bucket_a = vec![0usize; p];
    let mut bucket_b = vec![0usize; t];
    let mut seen_a: Vec<usize> = Vec::new();

    let mut k0 = 0;
    while k0 < q {
        let k1 = (k0 + slices_per_chunk).min(q);
        let width = (k1 - k0) * buckets;
        let mut lower = BitMatrix::new(p, width);
        let mut upper = BitMatrix::new(t, width);
        for k in k0..k1 {
            merged.clear();
            merged.extend((0..p).map(|i| (a.get(i, k), 0u8, i as u32)));
            merged.extend((0..t).map(|j| (b.get(k, j), 1u8, j as u32)));
            merged.sort_unstable();

            // Same-bucket pairs: every A-entry seen earlier in the bucket
            // dominates the current B-entry.
            let mut current = usize::MAX;
            for (pos, &(_, tag, idx)) in merged.iter().enumerate() {
                let bucket = pos / bucket_size;
                if bucket != current {
                    current = bucket;
                    seen_a.clear();
                }
                let idx = idx as usize;
                if tag == 0 {
                    bucket_a[idx] = bucket;
                    seen_a.push(idx);
                } else {
                    bucket_b[idx] = bucket;
                    for &i in &seen_a {
                        c.data[i * t + idx] += 1;
                    }
                }
            }

            let base = (k - k0) * buckets;
            for (i, &bk) in bucket_a.iter().enumerate() {
                lower.set(i, base + bk);
            }
            for (j, &bk) in bucket_b.iter().enumerate() {
                upper.set_range(j, base, base + bk);
            }
        }
        lower.accumulate_product(&upper, &mut c.data);
        k0 = k1;
    }
    Ok(c)
}

/// Row-major 0/1 matrix packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        let stride = bits::words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        debug_assert!(j < self.cols);
        bits::set(&mut self.words[i * self.stride..(i + 1) * self.stride], j);
    }

    /// Sets columns `start..end` of row `i`.
    pub fn set_range(&mut self, i: usize, start: usize, end: usize) {
        debug_assert!(start <= end && end <= self.cols);
        let row = &mut self.words[i * self.stride..(i + 1) * self.stride];
        let mut col = start;
        while col < end {
            let w = col / bits::WORD_BITS;
            let lo = col % bits::WORD_BITS;
            let hi = (end - w * bits::WORD_BITS).min(bits::WORD_BITS);
            let mask = if hi - lo == bits::WORD_BITS {
                u64::MAX
            } else {
                ((1u64 << (hi - lo)) - 1) << lo
            };
            row[w] |= mask;
            col = w * bits::WORD_BITS + hi;
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        bits::test(self.row_words(i), j)
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    /// Integer product `self * other^T`: entry `(i, j)` is the number of
    /// columns where row `i` of `self` and row `j` of `other` are both set.
    /// Results are added into the row-major `out` (`self.rows x other.rows`).
    pub fn accumulate_product(&self, other: &BitMatrix, out: &mut [i64]) {
        assert_eq!(self.cols, other.cols, "bit matrices must share a column count");
        assert_eq!(out.len(), self.rows * other.rows);
        for i in 0..self.rows {
            let ri = self.row_words(i);
            let orow = &mut out[i * other.rows..(i + 1) * other.rows];
            for (j, slot) in orow.iter_mut().enumerate() {
                *slot += i64::from(bits::and_popcount(ri, other.row_words(j)));
            }
        }
    }
}

pub fn has_dominating_pair(inst: &DominanceInstance) -> bool {
    let r = inst.r();
    if r == 0 {
        return false;
    }
    let c = dominance_product_blocked(inst, default_bucket_size(r, r));
    c.max_entry() == Some(r as i64)
}

/// Replaces every entry by its 1-based position in the sorted list of all
/// `2 r^2` entries, A-entries before B-entries on equal values. The
/// dominance product is unchanged and all entries become distinct.
pub fn make_entries_distinct(inst: &DominanceInstance) -> DominanceInstance {
    let (a, b) = distinct_ranks(&inst.a, &inst.b);
    DominanceInstance { a, b }
}

pub(crate) fn distinct_ranks(a: &Matrix, b: &Matrix) -> (Matrix, Matrix) {
    let mut entries: Vec<(i64, u8, usize)> = a
        .data
        .iter()
        .enumerate()
        .map(|(idx, &v)| (v, 0u8, idx))
        .chain(b.data.iter().enumerate().map(|(idx, &v)| (v, 1u8, idx)))
        .collect();
    entries.sort_unstable();
    let mut a2 = a.clone();
    let mut b2 = b.clone();
    for (pos, &(_, tag, idx)) in entries.iter().enumerate() {
        let target = if tag == 0 { &mut a2.data } else { &mut b2.data };
        target[idx] = pos as i64 + 1;
    }
    (a2, b2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DominanceInstance {
        DominanceInstance::from_rows(&[[1, 3], [2, 4]], &[[2, 1], [3, 4]]).unwrap()
    }

    #[test]
    fn bruteforce_on_hand_instance() {
        let c = dominance_product_bruteforce(&sample());
        assert_eq!(c.to_rows(), vec![vec![2, 2], vec![1, 1]]);
    }

    #[test]
    fn bruteforce_extremes() {
        let z = Matrix::zeros(3, 3);
        let inst = DominanceInstance::new(z.clone(), z).unwrap();
        assert_eq!(dominance_product_bruteforce(&inst), Matrix::filled(3, 3, 3));

        let inst = DominanceInstance::new(Matrix::filled(3, 3, 9), Matrix::filled(3, 3, 2)).unwrap();
        assert_eq!(dominance_product_bruteforce(&inst), Matrix::zeros(3, 3));
    }

    #[test]
    fn blocked_on_hand_instance() {
        for s in 1..=5 {
            let c = dominance_product_blocked(&sample(), s);
            assert_eq!(c.to_rows(), vec![vec![2, 2], vec![1, 1]], "bucket size {s}");
        }
    }

    #[test]
    fn blocked_rectangular() {
        let a = Matrix::from_rows(&[[0, 5, 2], [3, 3, 3]]).unwrap();
        let b = Matrix::from_rows(&[[1, 0, 4, 9], [5, 6, 2, 0], [2, 2, 2, 2]]).unwrap();
        let expect = bruteforce_product(&a, &b).unwrap();
        for s in 1..8 {
            assert_eq!(blocked_product(&a, &b, s).unwrap(), expect);
        }
        assert_eq!(
            blocked_product(&b, &b, 1),
            Err(DominanceError::InnerDimension { a_cols: 4, b_rows: 3 })
        );
    }

    #[test]
    fn dominating_pair_detection() {
        let z = Matrix::zeros(2, 2);
        assert!(has_dominating_pair(&DominanceInstance::new(z.clone(), z).unwrap()));
        assert!(has_dominating_pair(&sample()));
        let inst = DominanceInstance::new(Matrix::filled(2, 2, 1), Matrix::zeros(2, 2)).unwrap();
        assert!(!has_dominating_pair(&inst));
    }

    #[test]
    fn distinct_entries_single_tie() {
        let inst = DominanceInstance::from_rows(&[[1]], &[[1]]).unwrap();
        let d = make_entries_distinct(&inst);
        assert_eq!(d.a().to_rows(), vec![vec![1]]);
        assert_eq!(d.b().to_rows(), vec![vec![2]]);
        assert_eq!(dominance_product_bruteforce(&d).to_rows(), vec![vec![1]]);
    }

    #[test]
    fn distinct_entries_all_equal() {
        let inst = DominanceInstance::new(Matrix::filled(2, 2, 5), Matrix::filled(2, 2, 5)).unwrap();
        let d = make_entries_distinct(&inst);
        let mut all: Vec<i64> = d.a().as_slice().iter().chain(d.b().as_slice()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (1..=8).collect::<Vec<_>>());
        assert_eq!(dominance_product_bruteforce(&inst), Matrix::filled(2, 2, 2));
        assert_eq!(dominance_product_bruteforce(&d), Matrix::filled(2, 2, 2));
    }

    #[test]
    fn distinct_entries_is_monotone_on_distinct_input() {
        let inst = DominanceInstance::from_rows(&[[10, 30], [20, 40]], &[[25, 5], [35, 45]]).unwrap();
        let d = make_entries_distinct(&inst);
        assert_eq!(d.a().to_rows(), vec![vec![2, 5], vec![3, 7]]);
        assert_eq!(d.b().to_rows(), vec![vec![4, 1], vec![6, 8]]);
        assert_eq!(dominance_product_bruteforce(&d), dominance_product_bruteforce(&inst));
    }

    #[test]
    fn matrix_text_round_trip() {
        let m = Matrix::from_rows(&[[1, -2], [3, 40]]).unwrap();
        assert_eq!(parse_matrix(&m.to_text()).unwrap(), m);
        assert_eq!(parse_matrix("mat 0\n").unwrap(), Matrix::zeros(0, 0));
        assert_eq!(parse_matrix("mat 2\n1 2\n3").unwrap_err().line, 3);
        assert_eq!(parse_matrix("mat 2\n1 2\n3 x").unwrap_err().line, 3);
        assert_eq!(parse_matrix("mat 1\n1\n2").unwrap_err().line, 3);
        assert_eq!(parse_matrix("matrix").unwrap_err().line, 1);
    }

    #[test]
    fn shape_validation() {
        let err = DominanceInstance::new(Matrix::zeros(2, 3), Matrix::zeros(3, 2)).unwrap_err();
        assert!(matches!(err, DominanceError::Shape { .. }));
        assert_eq!(Matrix::from_rows(&[vec![1, 2], vec![3]]), Err(DominanceError::Ragged));
    }

    #[test]
    fn bit_matrix_product_matches_naive() {
        let mut x = BitMatrix::new(3, 70);
        let mut y = BitMatrix::new(2, 70);
        for (i, j) in [(0, 0), (0, 65), (1, 3), (2, 69), (2, 0)] {
            x.set(i, j);
        }
        for (i, j) in [(0, 0), (0, 65), (1, 69), (1, 3), (1, 0)] {
            y.set(i, j);
        }
        y.set_range(0, 60, 68);
        y.set_range(1, 64, 64);
        assert!((60..68).all(|c| y.get(0, c)) && !y.get(0, 59) && !y.get(0, 68));
        let mut out = vec![0i64; 6];
        x.accumulate_product(&y, &mut out);
        let mut naive = vec![0i64; 6];
        for i in 0..3 {
            for j in 0..2 {
                naive[i * 2 + j] = (0..70).filter(|&c| x.get(i, c) && y.get(j, c)).count() as i64;
            }
        }
        assert_eq!(out, naive);
    }
}
