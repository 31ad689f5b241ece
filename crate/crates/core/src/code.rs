//! CSS codes assembled from maximal and rainbow subgraph families.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{bits, BitMatrix, EchelonBasis, IncrementalBasis};
use crate::product::SimplexGraph;
use crate::subgraph::{column_index, maximal_subgraphs, rainbow_multi, rainbow_two, supports_matrix, Kind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    Pin,
    Generic,
    AntiGeneric,
    Mixed,
}

impl FromStr for Class {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "pin" => Ok(Class::Pin),
            "generic" => Ok(Class::Generic),
            "anti_generic" | "antigeneric" => Ok(Class::AntiGeneric),
            "mixed" => Ok(Class::Mixed),
            other => Err(Error::Parse(format!("unknown class {other:?}"))),
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Pin => "pin",
            Class::Generic => "generic",
            Class::AntiGeneric => "anti_generic",
            Class::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub class: Class,
    pub x: usize,
    pub z: usize,
}

impl Assignment {
    pub fn new(class: Class, x: usize, z: usize) -> Self {
        Assignment { class, x, z }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let (x, z) = (self.x, self.z);
        if x < 2 || z < 2 || x > dim || z > dim {
            return Err(Error::Assignment(format!("need 2 <= x, z <= D = {dim}, got x = {x}, z = {z}")));
        }
        if x + z < dim + 2 {
            return Err(Error::Assignment(format!("need x + z >= D + 2, got {x} + {z} with D = {dim}")));
        }
        if self.class == Class::Mixed {
            if dim < 3 {
                return Err(Error::Assignment("mixed codes need D >= 3".into()));
            }
            if x != dim || z != 2 {
                return Err(Error::Assignment(format!("mixed codes are defined for x = D = {dim}, z = 2 only")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    X,
    Z,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::X => Side::Z,
            Side::Z => Side::X,
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Side::X),
            "z" | "Z" => Ok(Side::Z),
            other => Err(Error::Parse(format!("unknown side {other:?}"))),
        }
    }
}

/// Rows `start..start + len` of one check matrix came from this family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub side: Side,
    pub kind: Kind,
    pub colours: Vec<usize>,
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Logicals {
    pub lx: BitMatrix,
    pub lz: BitMatrix,
}

#[derive(Clone, Debug)]
pub struct CssCode {
    n: usize,
    hx: BitMatrix,
    hz: BitMatrix,
    assignment: Option<Assignment>,
    families: Vec<Family>,
    rank_x: OnceLock<usize>,
    rank_z: OnceLock<usize>,
    logicals: OnceLock<Logicals>,
}

/// First odd-overlap pair `(x row, z row)`, if any.
pub fn find_anticommuting(hx: &BitMatrix, hz: &BitMatrix) -> Option<(usize, usize)> {
    let cols = column_index(hz);
    (0..hx.rows())
        .into_par_iter()
        .map_init(
            || vec![0u8; hz.rows()],
            |state, i| {
                // bit 0 parity, bit 1 touched
                let mut touched = Vec::new();
                for c in bits::ones(hx.row(i)) {
                    for &r in &cols[c] {
                        let s = &mut state[r as usize];
                        if *s & 2 == 0 {
                            *s = 2;
                            touched.push(r);
                        }
                        *s ^= 1;
                    }
                }
                let mut bad: Option<u32> = None;
                for &r in &touched {
                    if state[r as usize] & 1 == 1 && bad.map_or(true, |b| r < b) {
                        bad = Some(r);
                    }
                    state[r as usize] = 0;
                }
                bad.map(|r| (i, r as usize))
            },
        )
        .find_first(|p| p.is_some())
        .flatten()
}

impl CssCode {
    /// Wraps a commuting pair of check matrices.
    pub fn new(hx: BitMatrix, hz: BitMatrix) -> Result<Self> {
        Self::with_provenance(hx, hz, None, Vec::new())
    }

    pub(crate) fn with_provenance(
        hx: BitMatrix,
        hz: BitMatrix,
        assignment: Option<Assignment>,
        families: Vec<Family>,
    ) -> Result<Self> {
        if hx.cols() != hz.cols() {
            return Err(Error::Dimension(format!("hx has {} columns, hz has {}", hx.cols(), hz.cols())));
        }
        if let Some((x, z)) = find_anticommuting(&hx, &hz) {
            return Err(Error::Commutation { x, z });
        }
        Ok(CssCode {
            n: hx.cols(),
            hx,
            hz,
            assignment,
            families,
            rank_x: OnceLock::new(),
            rank_z: OnceLock::new(),
            logicals: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hx(&self) -> &BitMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &BitMatrix {
        &self.hz
    }

    pub fn checks(&self, side: Side) -> &BitMatrix {
        match side {
            Side::X => &self.hx,
            Side::Z => &self.hz,
        }
    }

    pub fn assignment(&self) -> Option<Assignment> {
        self.assignment
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    /// Largest row weight of the exported (unreduced) check matrices.
    pub fn generator_weight_max(&self) -> (usize, usize) {
        (self.hx.max_row_weight(), self.hz.max_row_weight())
    }

    pub fn rank_x(&self) -> usize {
        *self.rank_x.get_or_init(|| self.hx.rank())
    }

    pub fn rank_z(&self) -> usize {
        *self.rank_z.get_or_init(|| self.hz.rank())
    }

    pub fn k(&self) -> usize {
        self.n - self.rank_x() - self.rank_z()
    }

    /// Paired logical bases, computed on first use.
    pub fn logicals(&self) -> &Logicals {
        self.logicals.get_or_init(|| logical_basis(self))
    }

    pub fn lx(&self) -> &BitMatrix {
        &self.logicals().lx
    }

    pub fn lz(&self) -> &BitMatrix {
        &self.logicals().lz
    }

    pub fn logical(&self, side: Side) -> &BitMatrix {
        match side {
            Side::X => self.lx(),
            Side::Z => self.lz(),
        }
    }

    /// Replaces the logical bases after checking they are valid and
    /// paired to the identity.
    pub fn with_logicals(&self, lx: BitMatrix, lz: BitMatrix) -> Result<CssCode> {
        let k = self.k();
        if lx.rows() != k || lz.rows() != k || lx.cols() != self.n || lz.cols() != self.n {
            return Err(Error::Dimension(format!(
                "logicals {}x{} and {}x{} for k = {k}, n = {}",
                lx.rows(),
                lx.cols(),
                lz.rows(),
                lz.cols(),
                self.n
            )));
        }
        if !self.hz.mul_transpose(&lx)?.is_zero() || !self.hx.mul_transpose(&lz)?.is_zero() {
            return Err(Error::Precondition("logical operator fails to commute with the checks".into()));
        }
        if lx.mul_transpose(&lz)? != BitMatrix::identity(k) {
            return Err(Error::Precondition("logical bases are not paired to the identity".into()));
        }
        let mut out = self.clone();
        out.logicals = OnceLock::from(Logicals { lx, lz });
        Ok(out)
    }

    /// Sparse text layout: header, degrees, then 1-based index lists.
    pub fn to_alist(m: &BitMatrix) -> String {
        let t = m.transpose();
        let col_deg: Vec<usize> = (0..t.rows()).map(|c| t.row_weight(c)).collect();
        let row_deg: Vec<usize> = (0..m.rows()).map(|r| m.row_weight(r)).collect();
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut s = format!("{} {}\n", m.cols(), m.rows());
        s += &format!(
            "{} {}\n",
            col_deg.iter().max().copied().unwrap_or(0),
            row_deg.iter().max().copied().unwrap_or(0)
        );
        s += &(join(&col_deg) + "\n");
        s += &(join(&row_deg) + "\n");
        for c in 0..t.rows() {
            let idx: Vec<usize> = t.row_support(c).iter().map(|r| r + 1).collect();
            s += &(join(&idx) + "\n");
        }
        for r in 0..m.rows() {
            let idx: Vec<usize> = m.row_support(r).iter().map(|c| c + 1).collect();
            s += &(join(&idx) + "\n");
        }
        s
    }

    pub fn from_alist(text: &str) -> Result<BitMatrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut nums = |what: &str| -> Result<Vec<usize>> {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("alist: missing {what}")))?;
            line.split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("alist {what}: {e}"))))
                .collect()
        };
        let head = nums("header")?;
        let (n, m) = match head.as_slice() {
            &[n, m] => (n, m),
            _ => return Err(Error::Parse("alist header needs two numbers".into())),
        };
        nums("maximum degrees")?;
        let col_deg = nums("column degrees")?;
        let row_deg = nums("row degrees")?;
        if col_deg.len() != n || row_deg.len() != m {
            return Err(Error::Parse("alist degree lists have the wrong length".into()));
        }
        for _ in 0..n {
            nums("column list")?;
        }
        let mut out = BitMatrix::zeros(m, n);
        for (r, &deg) in row_deg.iter().enumerate() {
            let idx = nums("row list")?;
            let idx: Vec<usize> = idx.into_iter().filter(|&i| i != 0).collect();
            if idx.len() != deg {
                return Err(Error::Parse(format!("alist row {} has {} entries, degree {deg}", r + 1, idx.len())));
            }
            for i in idx {
                if i > n {
                    return Err(Error::Parse(format!("alist column index {i} exceeds {n}")));
                }
                out.set(r, i - 1, true);
            }
        }
        Ok(out)
    }
}

/// Colour subsets of `{0..=dim}` of the given size, in lexicographic order.
pub fn colour_subsets(dim: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, end: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for c in start..end {
            cur.push(c);
            rec(c + 1, end, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, dim + 1, size, &mut Vec::new(), &mut out);
    out
}

struct SideBuilder {
    side: Side,
    m: BitMatrix,
    families: Vec<Family>,
}

impl SideBuilder {
    fn new(side: Side, n: usize) -> Self {
        SideBuilder { side, m: BitMatrix::empty(n), families: Vec::new() }
    }

    fn push(&mut self, kind: Kind, colours: &[usize], rows: BitMatrix) {
        let start = self.m.rows();
        for r in rows.iter_rows() {
            self.m.push_row(r);
        }
        self.families.push(Family { side: self.side, kind, colours: colours.to_vec(), start, len: rows.rows() });
    }

    fn maximal(&mut self, g: &SimplexGraph, colours: &[usize]) -> Result<()> {
        let subs = maximal_subgraphs(g, colours)?;
        self.push(Kind::Maximal, colours, supports_matrix(g.n(), &subs));
        Ok(())
    }

    /// Rainbow family; colour sets larger than two are solved against the
    /// opposite checks.
    fn rainbow(&mut self, g: &SimplexGraph, colours: &[usize], opposite: &BitMatrix) -> Result<()> {
        let rows = if colours.len() == 2 {
            supports_matrix(g.n(), &rainbow_two(g, colours[0], colours[1])?)
        } else {
            rainbow_multi(g, colours, opposite)?
        };
        self.push(Kind::Rainbow, colours, rows);
        Ok(())
    }
}

/// Check matrices for one assignment class on a simplex graph.
pub fn assemble(g: &SimplexGraph, a: Assignment) -> Result<CssCode> {
    let d = g.dim();
    a.validate(d)?;
    let n = g.n();
    let mut xs = SideBuilder::new(Side::X, n);
    let mut zs = SideBuilder::new(Side::Z, n);
    match a.class {
        Class::Pin => {
            for s in colour_subsets(d, a.x) {
                xs.maximal(g, &s)?;
            }
            for s in colour_subsets(d, a.z) {
                zs.maximal(g, &s)?;
            }
        }
        Class::Generic => {
            for s in colour_subsets(d, a.x) {
                xs.maximal(g, &s)?;
            }
            for s in colour_subsets(d, a.z) {
                zs.rainbow(g, &s, &xs.m)?;
            }
        }
        Class::AntiGeneric => {
            for s in colour_subsets(d, a.z) {
                zs.maximal(g, &s)?;
            }
            for s in colour_subsets(d, a.x) {
                xs.rainbow(g, &s, &zs.m)?;
            }
        }
        Class::Mixed => {
            for s in colour_subsets(d, 2) {
                if s == [0, d] {
                    zs.maximal(g, &s)?;
                } else {
                    zs.rainbow(g, &s, &xs.m)?;
                }
            }
            let low: Vec<usize> = (0..d).collect();
            let high: Vec<usize> = (1..=d).collect();
            for s in colour_subsets(d, d) {
                if s == low || s == high {
                    xs.rainbow(g, &s, &zs.m)?;
                } else {
                    xs.maximal(g, &s)?;
                }
            }
        }
    }
    let mut families = xs.families;
    families.extend(zs.families);
    CssCode::with_provenance(xs.m, zs.m, Some(a), families)
}

/// Closed-form logical count from the circuit ranks of the factors.
pub fn predicted_k(class: Class, circuit_ranks: &[usize], dim: usize) -> Result<u64> {
    if circuit_ranks.len() != dim {
        return Err(Error::Dimension(format!("{} circuit ranks for D = {dim}", circuit_ranks.len())));
    }
    let nc: Vec<u64> = circuit_ranks.iter().map(|&r| r as u64).collect();
    let d = dim as u64;
    let others = |i: usize| -> u64 { nc.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).product() };
    match class {
        Class::Pin => Err(Error::Unsupported("no closed form for pin codes; use the rank".into())),
        Class::Generic => Ok(nc.iter().map(|&v| d * v).sum()),
        Class::AntiGeneric => Ok((0..dim).map(|i| d * others(i)).sum()),
        Class::Mixed => Ok((0..dim).map(|i| (d - 1) * nc[i] + others(i)).sum()),
    }
}

/// Kernel rows of `checks` that are independent modulo `stabilizers`.
fn independent_mod(checks: &BitMatrix, stabilizers: &BitMatrix) -> BitMatrix {
    let mut basis = IncrementalBasis::from_matrix(stabilizers);
    let mut out = BitMatrix::empty(checks.cols());
    for r in checks.kernel().iter_rows() {
        if basis.insert(r) {
            out.push_row(r);
        }
    }
    out
}

/// Largest generator count for which a coset is minimised exhaustively.
const EXHAUSTIVE_COSET_GENS: usize = 20;

/// Lightest member of `v + span(gens)` by Gray-code walk; ties keep the
/// first found.
fn coset_minimum(v: &[u64], gens: &[Vec<u64>]) -> Vec<u64> {
    let mut cur = v.to_vec();
    let mut best = cur.clone();
    let mut best_w = bits::weight(&cur);
    for step in 1u64..(1u64 << gens.len()) {
        bits::xor_into(&mut cur, &gens[step.trailing_zeros() as usize]);
        let w = bits::weight(&cur);
        if w < best_w {
            best_w = w;
            best.copy_from_slice(&cur);
        }
    }
    best
}

/// Shortens every row of `m` within its coset of `span(gens)`, plus the
/// other rows of `m` when `include_peers`. Exhaustive when the generator
/// rank is small, otherwise greedy first-improvement descent.
fn descend(m: &mut BitMatrix, gens: &BitMatrix, include_peers: bool) {
    let (basis, _) = gens.rref();
    let peers = if include_peers { m.rows().saturating_sub(1) } else { 0 };
    if basis.rows() + peers <= EXHAUSTIVE_COSET_GENS {
        for i in 0..m.rows() {
            let mut g: Vec<Vec<u64>> = basis.iter_rows().map(|r| r.to_vec()).collect();
            if include_peers {
                g.extend((0..m.rows()).filter(|&j| j != i).map(|j| m.row(j).to_vec()));
            }
            let v = coset_minimum(m.row(i), &g);
            m.row_mut(i).copy_from_slice(&v);
        }
        return;
    }
    let stride = m.stride();
    let mut tmp = vec![0u64; stride];
    for i in 0..m.rows() {
        loop {
            let mut improved = false;
            let mut w = m.row_weight(i);
            for g in gens.iter_rows() {
                tmp.copy_from_slice(m.row(i));
                bits::xor_into(&mut tmp, g);
                let nw = bits::weight(&tmp);
                if nw < w {
                    m.row_mut(i).copy_from_slice(&tmp);
                    w = nw;
                    improved = true;
                }
            }
            if include_peers {
                for j in 0..m.rows() {
                    if j == i {
                        continue;
                    }
                    tmp.copy_from_slice(m.row(i));
                    bits::xor_into(&mut tmp, m.row(j));
                    let nw = bits::weight(&tmp);
                    if nw < w {
                        m.row_mut(i).copy_from_slice(&tmp);
                        w = nw;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
}

/// Paired bases with `lx · lzᵀ = I`; Z representatives are shortened by
/// stabilizer and peer moves, X representatives by stabilizer moves only.
pub fn logical_basis(code: &CssCode) -> Logicals {
    let n = code.n();
    if code.k() == 0 {
        return Logicals { lx: BitMatrix::empty(n), lz: BitMatrix::empty(n) };
    }
    let mut lz = independent_mod(code.hx(), code.hz());
    descend(&mut lz, code.hz(), true);
    let lx_raw = independent_mod(code.hz(), code.hx());
    let pairing = lx_raw.mul_transpose(&lz).expect("same length");
    let inv = pairing.inverse().expect("logical pairing is nondegenerate");
    let mut lx = inv.matmul(&lx_raw).expect("square pairing");
    descend(&mut lx, code.hx(), false);
    Logicals { lx, lz }
}

/// Nontrivial logicals supported on unions of maximal subgraphs of the
/// complementary colour set: span of those supports intersected with
/// stabilizers plus logicals, minus pure stabilizers.
pub fn coloured_logicals(code: &CssCode, g: &SimplexGraph, colours: &[usize], side: Side) -> Result<BitMatrix> {
    if g.n() != code.n() {
        return Err(Error::Dimension(format!("graph has {} flags, code has {} qubits", g.n(), code.n())));
    }
    if let Some(c) = colours.iter().find(|&&c| c > g.dim()) {
        return Err(Error::Precondition(format!("colour {c} exceeds D = {}", g.dim())));
    }
    if code.k() == 0 {
        return Ok(BitMatrix::empty(code.n()));
    }
    let inverted: Vec<usize> = (0..=g.dim()).filter(|c| !colours.contains(c)).collect();
    let m = supports_matrix(g.n(), &maximal_subgraphs(g, &inverted)?);
    let s = code.checks(side);
    let stacked = s.vstack(code.logical(side))?;
    let l = BitMatrix::span_intersection(&m, &stacked)?;
    let stab = EchelonBasis::new(s);
    let mut out = BitMatrix::empty(code.n());
    for r in l.iter_rows() {
        if !stab.contains_words(r) {
            out.push_row(r);
        }
    }
    Ok(out)
}

/// Logical bases whose Z rows are each single-colour strings, one colour
/// at a time, lightest first; the X rows are the dual basis.
/// Also returns the colour of every logical.
pub fn coloured_logical_basis(
    code: &CssCode,
    g: &SimplexGraph,
    iterations: usize,
    seed: u64,
) -> Result<(CssCode, Vec<usize>)> {
    let n = code.n();
    let k = code.k();
    if g.n() != n {
        return Err(Error::Dimension(format!("graph has {} flags, code has {} qubits", g.n(), n)));
    }
    let lx_ref = code.lx().clone();
    let mut basis = IncrementalBasis::from_matrix(code.hz());
    let mut lz = BitMatrix::empty(n);
    let mut colour_of = Vec::new();
    for c in 0..=g.dim() {
        if lz.rows() == k {
            break;
        }
        let blocks: Vec<Vec<usize>> =
            g.cliques(c).iter().map(|q| q.iter().map(|&f| f as usize).collect()).collect();
        let lift = BitMatrix::from_supports(n, &blocks);
        let hb = code.hx().mul_transpose(&lift)?;
        let kb = hb.kernel();
        if kb.rows() == 0 {
            continue;
        }
        let mut cands = crate::distance::low_weight_logicals(&kb, &lift, &lx_ref, iterations, seed)?;
        cands.sort();
        for (_, words) in cands {
            if lz.rows() == k {
                break;
            }
            if basis.insert(&words) {
                lz.push_row(&words);
                colour_of.push(c);
            }
        }
    }
    if lz.rows() != k {
        return Err(Error::Precondition(format!("found {} coloured logicals, need {k}", lz.rows())));
    }
    let lx_raw = independent_mod(code.hz(), code.hx());
    let inv = lx_raw
        .mul_transpose(&lz)?
        .inverse()
        .ok_or_else(|| Error::Precondition("coloured logicals are not independent".into()))?;
    let mut lx = inv.matmul(&lx_raw)?;
    descend(&mut lx, code.hx(), false);
    Ok((code.with_logicals(lx, lz)?, colour_of))
}
