//! Dense bit-packed linear algebra over GF(2).
//!
//! Rows are stored as `u64` words, bit `c` of a row living in word `c / 64`
//! at position `c % 64`. Padding bits past `cols` are always zero.

use std::fmt;

use crate::error::{Error, Result};

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// Helpers on raw word slices.
pub mod bits {
    #[inline]
    pub fn get(w: &[u64], i: usize) -> bool {
        (w[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(w: &mut [u64], i: usize) {
        w[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn clear(w: &mut [u64], i: usize) {
        w[i >> 6] &= !(1 << (i & 63));
    }

    #[inline]
    pub fn flip(w: &mut [u64], i: usize) {
        w[i >> 6] ^= 1 << (i & 63);
    }

    #[inline]
    pub fn xor_into(dst: &mut [u64], src: &[u64]) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d ^= *s;
        }
    }

    #[inline]
    pub fn weight(w: &[u64]) -> usize {
        w.iter().map(|x| x.count_ones() as usize).sum()
    }

    #[inline]
    pub fn and_weight(a: &[u64], b: &[u64]) -> usize {
        a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
    }

    #[inline]
    pub fn and3_weight(a: &[u64], b: &[u64], c: &[u64]) -> usize {
        a.iter()
            .zip(b)
            .zip(c)
            .map(|((x, y), z)| (x & y & z).count_ones() as usize)
            .sum()
    }

    #[inline]
    pub fn is_zero(w: &[u64]) -> bool {
        w.iter().all(|&x| x == 0)
    }

    #[inline]
    pub fn intersects(a: &[u64], b: &[u64]) -> bool {
        a.iter().zip(b).any(|(x, y)| x & y != 0)
    }

    /// Indices of set bits, ascending.
    pub fn ones(w: &[u64]) -> impl Iterator<Item = usize> + '_ {
        w.iter().enumerate().flat_map(|(k, &word)| {
            let mut x = word;
            std::iter::from_fn(move || {
                if x == 0 {
                    None
                } else {
                    let t = x.trailing_zeros() as usize;
                    x &= x - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }
}

/// A GF(2) vector of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            assert!(i < len, "support index {i} out of range {len}");
            bits::set(&mut v.words, i);
        }
        v
    }

    /// Parse a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut v = Self::zeros(chars.len());
        for (i, c) in chars.iter().enumerate() {
            match c {
                '0' => {}
                '1' => bits::set(&mut v.words, i),
                _ => return Err(Error::Parse(format!("bad bit character {c:?}"))),
            }
        }
        Ok(v)
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        BitVec { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn get(&self, i: usize) -> bool {
        bits::get(&self.words, i)
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if value {
            bits::set(&mut self.words, i)
        } else {
            bits::clear(&mut self.words, i)
        }
    }

    pub fn flip(&mut self, i: usize) {
        bits::flip(&mut self.words, i)
    }

    pub fn weight(&self) -> usize {
        bits::weight(&self.words)
    }

    pub fn is_zero(&self) -> bool {
        bits::is_zero(&self.words)
    }

    pub fn support(&self) -> Vec<usize> {
        bits::ones(&self.words).collect()
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        bits::xor_into(&mut self.words, &other.words);
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        BitVec { len: self.len, words }
    }

    /// Parity of the overlap with another vector.
    pub fn dot(&self, other: &BitVec) -> bool {
        bits::and_weight(&self.words, &other.words) & 1 == 1
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Dense row-major GF(2) matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn empty(cols: usize) -> Self {
        Self::zeros(0, cols)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from `0`/`1` strings, one per row.
    pub fn parse_rows(cols: usize, rows: &[&str]) -> Result<Self> {
        let mut m = Self::empty(cols);
        for r in rows {
            let v = BitVec::parse(r)?;
            if v.len() != cols {
                return Err(Error::Dimension(format!("row {r:?} has {} bits, expected {cols}", v.len())));
            }
            m.push_row(v.words());
        }
        Ok(m)
    }

    pub fn from_supports<S: AsRef<[usize]>>(cols: usize, supports: &[S]) -> Self {
        let mut m = Self::zeros(supports.len(), cols);
        for (r, s) in supports.iter().enumerate() {
            for &c in s.as_ref() {
                assert!(c < cols, "column {c} out of range {cols}");
                bits::set(m.row_mut(r), c);
            }
        }
        m
    }

    pub fn from_vecs(cols: usize, vecs: &[BitVec]) -> Result<Self> {
        let mut m = Self::empty(cols);
        for v in vecs {
            if v.len() != cols {
                return Err(Error::Dimension(format!("vector of length {} into {cols} columns", v.len())));
            }
            m.push_row(v.words());
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Words per row.
    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        bits::get(self.row(r), c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let row = self.row_mut(r);
        if value {
            bits::set(row, c)
        } else {
            bits::clear(row, c)
        }
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row_vec(&self, r: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row(r).to_vec())
    }

    pub fn row_support(&self, r: usize) -> Vec<usize> {
        bits::ones(self.row(r)).collect()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        bits::weight(self.row(r))
    }

    pub fn max_row_weight(&self) -> usize {
        (0..self.rows).map(|r| self.row_weight(r)).max().unwrap_or(0)
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[u64]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn push_row(&mut self, words: &[u64]) {
        assert_eq!(words.len(), self.stride, "row word count");
        self.data.extend_from_slice(words);
        self.rows += 1;
    }

    pub fn push_vec(&mut self, v: &BitVec) -> Result<()> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} into {} columns", v.len(), self.cols)));
        }
        self.push_row(v.words());
        Ok(())
    }

    pub fn push_support(&mut self, support: &[usize]) {
        let start = self.data.len();
        self.data.resize(start + self.stride, 0);
        for &c in support {
            assert!(c < self.cols);
            bits::set(&mut self.data[start..], c);
        }
        self.rows += 1;
    }

    pub fn is_zero(&self) -> bool {
        bits::is_zero(&self.data)
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("vstack of {} and {} columns", self.cols, other.cols)));
        }
        let mut m = self.clone();
        m.data.extend_from_slice(&other.data);
        m.rows += other.rows;
        Ok(m)
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!("hstack of {} and {} rows", self.rows, other.rows)));
        }
        let mut m = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in bits::ones(self.row(r)) {
                m.set(r, c, true);
            }
            for c in bits::ones(other.row(r)) {
                m.set(r, self.cols + c, true);
            }
        }
        Ok(m)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in bits::ones(self.row(r)) {
                bits::set(t.row_mut(c), r);
            }
        }
        t
    }

    pub fn select_rows(&self, idx: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::empty(self.cols);
        for &r in idx {
            m.push_row(self.row(r));
        }
        m
    }

    /// Keep only the given columns, in the given order.
    pub fn select_cols(&self, idx: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            let src = self.row(r);
            let start = r * m.stride;
            for (j, &c) in idx.iter().enumerate() {
                if bits::get(src, c) {
                    bits::set(&mut m.data[start..start + m.stride], j);
                }
            }
        }
        m
    }

    /// Rows that are not identically zero.
    pub fn drop_zero_rows(&self) -> BitMatrix {
        let mut m = BitMatrix::empty(self.cols);
        for r in self.iter_rows() {
            if !bits::is_zero(r) {
                m.push_row(r);
            }
        }
        m
    }

    fn xor_rows(&mut self, src: usize, dst: usize, from_word: usize) {
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s + from_word..src * s + s], &mut hi[from_word..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[from_word..s], &mut lo[dst * s + from_word..dst * s + s])
        };
        // a is read-only, b the destination
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= *x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize, from_word: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = (a.min(b), a.max(b));
        let (x, y) = self.data.split_at_mut(hi * s);
        x[lo * s + from_word..lo * s + s].swap_with_slice(&mut y[from_word..s]);
    }

    /// In-place Gaussian elimination. Returns pivot columns; the first
    /// `pivots.len()` rows are the pivot rows afterwards. With `reduced`
    /// the result is in reduced row-echelon form.
    pub fn eliminate(&mut self, reduced: bool) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let w = c >> 6;
            let mask = 1u64 << (c & 63);
            let s = self.stride;
            let Some(p) = (r..self.rows).find(|&i| self.data[i * s + w] & mask != 0) else {
                continue;
            };
            // rows >= r are zero left of column c, so only the tail moves
            self.swap_rows(p, r, w);
            let lo = if reduced { 0 } else { r + 1 };
            for i in lo..self.rows {
                if i != r && self.data[i * s + w] & mask != 0 {
                    self.xor_rows(r, i, w);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate(false).len()
    }

    /// Reduced row-echelon form with zero rows removed, plus pivot columns.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate(true);
        m.rows = pivots.len();
        m.data.truncate(m.rows * m.stride);
        (m, pivots)
    }

    /// Basis of the right null space `{v : m v = 0}` in reduced echelon form.
    pub fn kernel(&self) -> BitMatrix {
        let (e, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut k = BitMatrix::empty(self.cols);
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; self.stride];
            bits::set(&mut v, f);
            for (i, &p) in pivots.iter().enumerate() {
                if e.get(i, f) {
                    bits::set(&mut v, p);
                }
            }
            k.push_row(&v);
        }
        k.rref().0
    }

    /// Generators of `span(a) ∩ span(b)` from the kernel of the stacked
    /// transposes `[aᵀ | bᵀ]`.
    pub fn span_intersection(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
        if a.cols != b.cols {
            return Err(Error::Dimension(format!("span intersection of {} and {} columns", a.cols, b.cols)));
        }
        let stacked = a.transpose().hstack(&b.transpose())?;
        let k = stacked.kernel();
        let left: Vec<usize> = (0..a.rows).collect();
        let k1 = k.select_cols(&left);
        Ok(k1.matmul(a)?.rref().0)
    }

    pub fn matmul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let start = r * m.stride;
            for j in bits::ones(self.row(r)) {
                bits::xor_into(&mut m.data[start..start + m.stride], other.row(j));
            }
        }
        Ok(m)
    }

    /// `self · otherᵀ`, i.e. overlap parities of every row pair.
    pub fn mul_transpose(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("row overlap of {} and {} columns", self.cols, other.cols)));
        }
        let mut m = BitMatrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            for j in 0..other.rows {
                if bits::and_weight(self.row(i), other.row(j)) & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Product of a row vector with this matrix.
    pub fn vec_mul(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!("vector of length {} times {} rows", v.len(), self.rows)));
        }
        let mut out = BitVec::zeros(self.cols);
        for j in v.support() {
            bits::xor_into(out.words_mut(), self.row(j));
        }
        Ok(out)
    }

    /// `self · v` as a syndrome.
    pub fn syndrome(&self, v: &[u64]) -> BitVec {
        let mut s = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if bits::and_weight(self.row(r), v) & 1 == 1 {
                bits::set(s.words_mut(), r);
            }
        }
        s
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&BitMatrix::identity(n)).ok()?;
        let (e, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let right: Vec<usize> = (n..2 * n).collect();
        Some(e.select_cols(&right))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        write!(f, "{self}")
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Row-reduced basis with fast membership tests.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    rref: BitMatrix,
    pivots: Vec<usize>,
    pivot_row: Vec<u32>,
}

const NO_PIVOT: u32 = u32::MAX;

impl EchelonBasis {
    pub fn new(m: &BitMatrix) -> Self {
        let (rref, pivots) = m.rref();
        let mut pivot_row = vec![NO_PIVOT; m.cols];
        for (i, &p) in pivots.iter().enumerate() {
            pivot_row[p] = i as u32;
        }
        EchelonBasis { rref, pivots, pivot_row }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn cols(&self) -> usize {
        self.rref.cols()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.rref
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce `v` in place to its canonical coset representative.
    pub fn reduce(&self, v: &mut [u64]) {
        // in RREF the coefficient of row i is just v[pivot_i]
        let hits: Vec<u32> = bits::ones(v)
            .map(|c| self.pivot_row[c])
            .filter(|&r| r != NO_PIVOT)
            .collect();
        for r in hits {
            bits::xor_into(v, self.rref.row(r as usize));
        }
    }

    pub fn contains_words(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        bits::is_zero(&w)
    }

    pub fn contains(&self, v: &BitVec) -> Result<bool> {
        if v.len() != self.cols() {
            return Err(Error::Dimension(format!("vector of length {} against {} columns", v.len(), self.cols())));
        }
        Ok(self.contains_words(v.words()))
    }
}

/// Echelon basis grown one vector at a time. Every stored row has its
/// pivot as lowest set bit.
#[derive(Clone, Debug)]
pub struct IncrementalBasis {
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivot_row: Vec<u32>,
}

impl IncrementalBasis {
    pub fn new(cols: usize) -> Self {
        IncrementalBasis { cols, rows: Vec::new(), pivot_row: vec![NO_PIVOT; cols] }
    }

    pub fn from_matrix(m: &BitMatrix) -> Self {
        let mut b = IncrementalBasis::new(m.cols());
        for r in m.iter_rows() {
            b.insert(r);
        }
        b
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Clears pivot bits from the bottom up; stops at the first bit with no
    /// pivot and returns it, or `None` if `v` reduced to zero.
    pub fn reduce(&self, v: &mut [u64]) -> Option<usize> {
        let mut wi = 0;
        while wi < v.len() {
            let x = v[wi];
            if x == 0 {
                wi += 1;
                continue;
            }
            let p = wi * 64 + x.trailing_zeros() as usize;
            match self.pivot_row[p] {
                NO_PIVOT => return Some(p),
                r => bits::xor_into(&mut v[wi..], &self.rows[r as usize][wi..]),
            }
        }
        None
    }

    /// Adds `v` if it is independent; returns whether it was added.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        match self.reduce(&mut w) {
            Some(p) => {
                self.pivot_row[p] = self.rows.len() as u32;
                self.rows.push(w);
                true
            }
            None => false,
        }
    }

    pub fn contains_words(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w).is_none()
    }
}

/// Is `v` in the row space of `m`?
pub fn in_span(v: &BitVec, m: &BitMatrix) -> Result<bool> {
    if v.len() != m.cols() {
        return Err(Error::Dimension(format!("vector of length {} against {} columns", v.len(), m.cols())));
    }
    EchelonBasis::new(m).contains(v)
}

pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

pub fn kernel(m: &BitMatrix) -> BitMatrix {
    m.kernel()
}

pub fn span_intersection(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    BitMatrix::span_intersection(a, b)
}

pub fn matmul(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    a.matmul(b)
}
