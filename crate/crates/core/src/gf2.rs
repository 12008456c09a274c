//! Dense bit-packed linear algebra over the two-element field.
//!
//! Matrices are stored row-major, 64 columns per word. A matrix with `rows`
//! rows and `cols` columns maps vectors of length `cols` to vectors of
//! length `rows`; zero-sized matrices are legal and represent zero maps.

use std::collections::BTreeMap;
use std::fmt;

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Vector {
    len: usize,
    words: Vec<u64>,
}

impl GF2Vector {
    pub fn zero(len: usize) -> Self {
        GF2Vector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zero(len);
        v.set(index, true);
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zero(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn add_assign(&mut self, other: &GF2Vector) {
        assert_eq!(self.len, other.len);
        xor_words(&mut self.words, &other.words);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * WORD + b)
            })
        })
    }

    pub fn dot(&self, other: &GF2Vector) -> bool {
        assert_eq!(self.len, other.len);
        parity(&self.words, &other.words)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for GF2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

#[inline]
fn xor_words(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[inline]
fn parity(a: &[u64], b: &[u64]) -> bool {
    a.iter()
        .zip(b)
        .fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones())
        & 1
        == 1
}

#[derive(Clone, PartialEq, Eq)]
pub struct GF2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl GF2Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        GF2Matrix {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from 0/1 rows.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zero(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &b) in row.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[GF2Vector]) -> Self {
        let mut m = Self::zero(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for i in c.iter_ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        self.bits[i * self.stride + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols);
        let w = &mut self.bits[i * self.stride + j / WORD];
        let mask = 1u64 << (j % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        assert!(i < self.rows && j < self.cols);
        self.bits[i * self.stride + j / WORD] ^= 1u64 << (j % WORD);
    }

    pub fn row(&self, i: usize) -> GF2Vector {
        GF2Vector {
            len: self.cols,
            words: self.row_words(i).to_vec(),
        }
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    pub fn column(&self, j: usize) -> GF2Vector {
        let mut v = GF2Vector::zero(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// `M * v`.
    pub fn apply(&self, v: &GF2Vector) -> GF2Vector {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        let mut out = GF2Vector::zero(self.rows);
        for i in 0..self.rows {
            if parity(self.row_words(i), &v.words) {
                out.set(i, true);
            }
        }
        out
    }

    /// One line of `0`/`1` characters per row.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            for j in 0..self.cols {
                s.push(if self.get(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    /// Parses the format written by [`GF2Matrix::to_text`]. Blank lines are skipped.
    pub fn from_text(text: &str) -> Option<Self> {
        let rows: Option<Vec<Vec<u8>>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.chars()
                    .map(|c| match c {
                        '0' => Some(0),
                        '1' => Some(1),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        let rows = rows?;
        if rows.iter().any(|r| r.len() != rows[0].len()) {
            return None;
        }
        Some(Self::from_rows(&rows))
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GF2Matrix {}x{}", self.rows, self.cols)?;
        write!(f, "{}", self.to_text())
    }
}

/// In-place Gauss-Jordan elimination on the first `pivot_cols` columns of a
/// row-major bit array. Returns the pivot column of each of the first
/// `rank` rows.
fn reduce_in_place(bits: &mut [u64], rows: usize, stride: usize, pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..pivot_cols {
        if rank == rows {
            break;
        }
        let word = col / WORD;
        let mask = 1u64 << (col % WORD);
        let Some(found) = (rank..rows).find(|&r| bits[r * stride + word] & mask != 0) else {
            continue;
        };
        if found != rank {
            for w in 0..stride {
                bits.swap(found * stride + w, rank * stride + w);
            }
        }
        let (before, rest) = bits.split_at_mut(rank * stride);
        let (pivot_row, after) = rest.split_at_mut(stride);
        for r in 0..rank {
            let row = &mut before[r * stride..(r + 1) * stride];
            if row[word] & mask != 0 {
                xor_words(&mut row[word..], &pivot_row[word..]);
            }
        }
        for r in 0..rows - rank - 1 {
            let row = &mut after[r * stride..(r + 1) * stride];
            if row[word] & mask != 0 {
                xor_words(&mut row[word..], &pivot_row[word..]);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}

/// Reduced row echelon form of a matrix together with its pivot columns.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    pub reduced: GF2Matrix,
    pub pivots: Vec<usize>,
}

pub fn row_reduce(m: &GF2Matrix) -> RowEchelon {
    let mut reduced = m.clone();
    let pivots = reduce_in_place(&mut reduced.bits, m.rows, m.stride, m.cols);
    RowEchelon { reduced, pivots }
}

pub fn rank(m: &GF2Matrix) -> usize {
    row_reduce(m).pivots.len()
}

/// A basis of `{v : M v = 0}`, one vector per free column, in reduced
/// echelon form: the vector for free column `j` has its last set bit at `j`
/// and no other free-column bits.
pub fn kernel_basis(m: &GF2Matrix) -> Vec<GF2Vector> {
    let RowEchelon { reduced, pivots } = row_reduce(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&j| !is_pivot[j])
        .map(|j| {
            let mut v = GF2Vector::unit(m.cols, j);
            for (r, &p) in pivots.iter().enumerate() {
                if reduced.get(r, j) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

/// Reusable solver for `M f = e` with many right-hand sides.
///
/// Keeps the row operations that bring `M` to reduced echelon form; a
/// solution sets each pivot variable from the transformed right-hand side
/// and every free variable to zero.
#[derive(Clone, Debug)]
pub struct Solver {
    rows: usize,
    cols: usize,
    pivots: Vec<usize>,
    /// Row `r` holds the combination of original rows that became row `r`.
    transform: GF2Matrix,
}

impl Solver {
    pub fn new(m: &GF2Matrix) -> Self {
        // Augment [M | I] and reduce on the M block.
        let width = m.cols + m.rows;
        let mut aug = GF2Matrix::zero(m.rows, width);
        for i in 0..m.rows {
            for j in m.row(i).iter_ones() {
                aug.set(i, j, true);
            }
            aug.set(i, m.cols + i, true);
        }
        let pivots = reduce_in_place(&mut aug.bits, m.rows, aug.stride, m.cols);
        let mut transform = GF2Matrix::zero(m.rows, m.rows);
        for i in 0..m.rows {
            for j in 0..m.rows {
                if aug.get(i, m.cols + j) {
                    transform.set(i, j, true);
                }
            }
        }
        Solver {
            rows: m.rows,
            cols: m.cols,
            pivots,
            transform,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Some `f` with `M f = e`, or `None` when `e` is outside the image.
    pub fn solve(&self, e: &GF2Vector) -> Option<GF2Vector> {
        assert_eq!(e.len(), self.rows, "right-hand side has the wrong length");
        let row_of_e = |r: usize| parity(self.transform.row_words(r), &e.words);
        if (self.pivots.len()..self.rows).any(row_of_e) {
            return None;
        }
        let mut f = GF2Vector::zero(self.cols);
        for (r, &p) in self.pivots.iter().enumerate() {
            if row_of_e(r) {
                f.set(p, true);
            }
        }
        Some(f)
    }
}

pub fn solve(m: &GF2Matrix, e: &GF2Vector) -> Option<GF2Vector> {
    Solver::new(m).solve(e)
}

/// A set of vectors kept in echelon form keyed by their lowest set bit.
#[derive(Clone, Debug, Default)]
pub struct EchelonSet {
    rows: BTreeMap<usize, GF2Vector>,
}

impl EchelonSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Reduces `v` modulo the span of the set.
    pub fn reduce(&self, v: &mut GF2Vector) {
        // Each stored vector only has bits at or above its pivot, so one
        // ascending pass clears every pivot position.
        for (&p, w) in &self.rows {
            if v.get(p) {
                v.add_assign(w);
            }
        }
    }

    /// Adds `v` to the span; returns the reduced vector if it was new.
    pub fn insert(&mut self, mut v: GF2Vector) -> Option<&GF2Vector> {
        self.reduce(&mut v);
        let p = v.first_one()?;
        self.rows.insert(p, v);
        self.rows.get(&p)
    }

    pub fn contains(&self, v: &GF2Vector) -> bool {
        let mut v = v.clone();
        self.reduce(&mut v);
        v.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Gf2Error {
    #[error("column {column} of the boundary matrix is not in the span of the cycles")]
    ImageNotInKernel { column: usize },
}

/// Representatives in `span(K)` of a basis of `span(K) / im(N)`.
///
/// Each cycle is reduced against the echelon form of the boundaries and then
/// against the representatives already kept; survivors are kept as they are
/// after that reduction.
pub fn quotient_basis(
    cycles: &[GF2Vector],
    boundaries: &GF2Matrix,
) -> Result<Vec<GF2Vector>, Gf2Error> {
    let mut span = EchelonSet::new();
    for k in cycles {
        span.insert(k.clone());
    }
    let mut image = EchelonSet::new();
    for j in 0..boundaries.cols() {
        let column = boundaries.column(j);
        if !span.contains(&column) {
            return Err(Gf2Error::ImageNotInKernel { column: j });
        }
        image.insert(column);
    }
    let mut kept = EchelonSet::new();
    let mut out = Vec::new();
    for k in cycles {
        let mut v = k.clone();
        image.reduce(&mut v);
        kept.reduce(&mut v);
        if !v.is_zero() {
            out.push(v.clone());
            kept.insert(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[u8]]) -> GF2Matrix {
        GF2Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn vecb(bits: &[u8]) -> GF2Vector {
        GF2Vector::from_bits(bits)
    }

    #[test]
    fn kernels() {
        assert_eq!(kernel_basis(&mat(&[&[1, 1]])), vec![vecb(&[1, 1])]);
        assert!(kernel_basis(&GF2Matrix::identity(5)).is_empty());
        assert_eq!(
            kernel_basis(&mat(&[&[1, 0, 1], &[0, 1, 1]])),
            vec![vecb(&[1, 1, 1])]
        );
        // No rows: everything is in the kernel.
        assert_eq!(kernel_basis(&GF2Matrix::zero(0, 2)).len(), 2);
        assert!(kernel_basis(&GF2Matrix::zero(3, 0)).is_empty());
    }

    #[test]
    fn solving() {
        let e = vecb(&[1, 0, 1]);
        assert_eq!(solve(&GF2Matrix::identity(3), &e), Some(e));
        assert_eq!(solve(&mat(&[&[1, 1]]), &vecb(&[1])), Some(vecb(&[1, 0])));
        assert_eq!(solve(&mat(&[&[1], &[1]]), &vecb(&[1, 0])), None);
        assert_eq!(solve(&GF2Matrix::zero(0, 3), &GF2Vector::zero(0)), Some(GF2Vector::zero(3)));
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&GF2Matrix::zero(4, 7)), 0);
        assert_eq!(rank(&GF2Matrix::identity(9)), 9);
        assert_eq!(rank(&mat(&[&[1, 1], &[1, 1]])), 1);
    }

    #[test]
    fn quotients() {
        let e1 = vecb(&[1]);
        assert_eq!(quotient_basis(std::slice::from_ref(&e1), &GF2Matrix::zero(1, 1)).unwrap(), vec![e1.clone()]);
        assert!(quotient_basis(std::slice::from_ref(&e1), &mat(&[&[1]])).unwrap().is_empty());

        let k = [vecb(&[1, 1, 0]), vecb(&[0, 0, 1])];
        let n = GF2Matrix::from_columns(3, &[vecb(&[1, 1, 0])]);
        let q = quotient_basis(&k, &n).unwrap();
        assert_eq!(q, vec![vecb(&[0, 0, 1])]);

        let bad = GF2Matrix::from_columns(3, &[vecb(&[1, 0, 0])]);
        assert_eq!(
            quotient_basis(&k, &bad),
            Err(Gf2Error::ImageNotInKernel { column: 0 })
        );
    }

    #[test]
    fn text_roundtrip() {
        let m = mat(&[&[1, 0, 1], &[0, 1, 1]]);
        assert_eq!(m.to_text(), "101\n011\n");
        assert_eq!(GF2Matrix::from_text(&m.to_text()).unwrap(), m);
        assert!(GF2Matrix::from_text("10\n1\n").is_none());
    }

    #[test]
    fn wide_matrices_cross_word_boundaries() {
        let n = 150;
        let mut m = GF2Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
            m.set(i, (i + 1) % n, true);
        }
        // A cycle's incidence matrix over GF(2) has rank n - 1.
        assert_eq!(rank(&m), n - 1);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].count_ones(), n);
    }
}
