//! Minimum distance: bounded exhaustive search and information-set
//! sampling for upper bounds.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{CssCode, Side};
use crate::error::{Error, Result};
use crate::gf2::{bits, BitMatrix, EchelonBasis};

/// Default cap on enumerated supports for exhaustive search.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub weight: usize,
    pub side: Side,
    pub support: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    /// `None` when both sides were searched.
    pub side: Option<Side>,
    /// Largest `w` such that no logical of weight `<= w` exists.
    pub exact_floor: Option<usize>,
    pub best_upper: Option<Witness>,
    pub wmax: Option<usize>,
    pub iterations: Option<usize>,
    pub seed: Option<u64>,
}

impl DistanceReport {
    /// Distance if the floor meets the witness.
    pub fn certified(&self) -> Option<usize> {
        match (&self.exact_floor, &self.best_upper) {
            (Some(f), Some(w)) if f + 1 == w.weight => Some(w.weight),
            _ => None,
        }
    }
}

fn sides(side: Option<Side>) -> Vec<Side> {
    match side {
        Some(s) => vec![s],
        None => vec![Side::X, Side::Z],
    }
}

/// Is `v` a nontrivial logical on `side`: killed by the opposite checks
/// and outside the own stabilizer span.
pub fn is_logical(code: &CssCode, side: Side, v: &[u64]) -> bool {
    let opp = code.checks(side.opposite());
    if opp.iter_rows().any(|r| bits::and_weight(r, v) & 1 == 1) {
        return false;
    }
    !EchelonBasis::new(code.checks(side)).contains_words(v)
}

fn verified(code: &CssCode, side: Side, support: Vec<usize>) -> Witness {
    let mut v = vec![0u64; code.hx().stride()];
    for &q in &support {
        bits::set(&mut v, q);
    }
    assert!(is_logical(code, side, &v), "witness failed verification");
    Witness { weight: support.len(), side, support }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Prefixes enumerated by a search up to `wmax`: the last column of each
/// support is found by table lookup.
pub fn exact_cost(n: usize, wmax: usize) -> u128 {
    (1..=wmax).map(|w| binomial(n as u128, (w - 1) as u128)).sum()
}

struct Columns {
    syn: Vec<Vec<u64>>,
    pair: Vec<Vec<u64>>,
}

fn columns(code: &CssCode, side: Side) -> Columns {
    let opp = code.checks(side.opposite()).transpose();
    let pl = code.logical(side.opposite()).transpose();
    let n = code.n();
    Columns { syn: (0..n).map(|q| opp.row(q).to_vec()).collect(), pair: (0..n).map(|q| pl.row(q).to_vec()).collect() }
}

fn lex_first_of_weight(cols: &Columns, table: &HashMap<&[u64], Vec<usize>>, w: usize) -> Option<Vec<usize>> {
    let n = cols.syn.len();
    if w == 1 {
        return (0..n).find(|&q| bits::is_zero(&cols.syn[q]) && !bits::is_zero(&cols.pair[q])).map(|q| vec![q]);
    }

    struct Dfs<'a> {
        cols: &'a Columns,
        table: &'a HashMap<&'a [u64], Vec<usize>>,
        prefix_len: usize,
        prefix: Vec<usize>,
        syn: Vec<u64>,
        pair: Vec<u64>,
    }

    impl Dfs<'_> {
        fn run(&mut self) -> Option<Vec<usize>> {
            let last = *self.prefix.last().expect("nonempty prefix");
            if self.prefix.len() == self.prefix_len {
                let bucket = self.table.get(self.syn.as_slice())?;
                let start = bucket.partition_point(|&c| c <= last);
                let hit = bucket[start..].iter().find(|&&c| self.cols.pair[c] != self.pair)?;
                let mut out = self.prefix.clone();
                out.push(*hit);
                return Some(out);
            }
            for b in last + 1..self.cols.syn.len() {
                bits::xor_into(&mut self.syn, &self.cols.syn[b]);
                bits::xor_into(&mut self.pair, &self.cols.pair[b]);
                self.prefix.push(b);
                let found = self.run();
                self.prefix.pop();
                bits::xor_into(&mut self.syn, &self.cols.syn[b]);
                bits::xor_into(&mut self.pair, &self.cols.pair[b]);
                if found.is_some() {
                    return found;
                }
            }
            None
        }
    }

    (0..n).into_par_iter().find_map_first(|a| {
        let mut dfs = Dfs {
            cols,
            table,
            prefix_len: w - 1,
            prefix: vec![a],
            syn: cols.syn[a].clone(),
            pair: cols.pair[a].clone(),
        };
        dfs.run()
    })
}

/// Exhaustive search over all supports of weight `<= wmax`. Reports the
/// lexicographically first lightest logical, or certifies there is none.
pub fn exact_distance_upto(code: &CssCode, side: Option<Side>, wmax: usize, budget: u128) -> Result<DistanceReport> {
    let sides = sides(side);
    let needed = exact_cost(code.n(), wmax).saturating_mul(sides.len() as u128);
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let mut floor = wmax;
    let mut best: Option<Witness> = None;
    if code.k() > 0 {
        for s in sides {
            let cols = columns(code, s);
            let mut table: HashMap<&[u64], Vec<usize>> = HashMap::new();
            for (q, syn) in cols.syn.iter().enumerate() {
                table.entry(syn.as_slice()).or_default().push(q);
            }
            // a lighter hit on the other side already caps the search
            let cap = best.as_ref().map_or(wmax, |b| b.weight.min(wmax));
            for w in 1..=cap {
                if let Some(support) = lex_first_of_weight(&cols, &table, w) {
                    let wit = verified(code, s, support);
                    if best.as_ref().map_or(true, |b| wit.weight < b.weight) {
                        best = Some(wit);
                    }
                    floor = floor.min(w - 1);
                    break;
                }
            }
        }
    }
    Ok(DistanceReport { side, exact_floor: Some(floor), best_upper: best, wmax: Some(wmax), iterations: None, seed: None })
}

/// Reduced echelon form choosing pivot columns in the given order; zero
/// rows dropped.
pub fn permuted_rref(m: &BitMatrix, order: &[usize]) -> (BitMatrix, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.rows();
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut pivot_row = vec![0u64; a.stride()];
    for &c in order {
        if r == rows {
            break;
        }
        let w = c >> 6;
        let mask = 1u64 << (c & 63);
        let Some(p) = (r..rows).find(|&i| a.row(i)[w] & mask != 0) else {
            continue;
        };
        pivot_row.copy_from_slice(a.row(p));
        if p != r {
            let old = a.row(r).to_vec();
            a.row_mut(p).copy_from_slice(&old);
            a.row_mut(r).copy_from_slice(&pivot_row);
        }
        for i in 0..rows {
            if i != r && a.row(i)[w] & mask != 0 {
                bits::xor_into(a.row_mut(i), &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut out = BitMatrix::empty(m.cols());
    for i in 0..r {
        out.push_row(a.row(i));
    }
    (out, pivots)
}

fn iteration_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

fn pairs_nontrivially(pairing: &BitMatrix, v: &[u64]) -> bool {
    pairing.iter_rows().any(|r| bits::and_weight(r, v) & 1 == 1)
}

/// Lightest logical seen in one sample, as `(weight, support)`.
fn prange_sample(
    form: &SearchForm,
    pairing: &BitMatrix,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(usize, Vec<usize>)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut best: Option<(usize, Vec<usize>)> = None;
    let consider = |v: &[u64], best: &mut Option<(usize, Vec<usize>)>| {
        let w = bits::weight(v);
        if w == 0 || best.as_ref().is_some_and(|(bw, _)| w > *bw) {
            return;
        }
        if pairs_nontrivially(pairing, v) {
            let s: Vec<usize> = bits::ones(v).collect();
            if best.as_ref().map_or(true, |b| (w, &s) < (b.0, &b.1)) {
                *best = Some((w, s));
            }
        }
    };
    match form {
        SearchForm::Generator(g) => {
            let (e, _) = permuted_rref(g, &order);
            for r in e.iter_rows() {
                consider(r, &mut best);
            }
        }
        SearchForm::ParityCheck(h) => {
            let (e, pivots) = permuted_rref(h, &order);
            let t = e.transpose();
            let mut is_pivot = vec![false; n];
            for &p in &pivots {
                is_pivot[p] = true;
            }
            let mut v = vec![0u64; e.stride()];
            for j in (0..n).filter(|&j| !is_pivot[j]) {
                let w = 1 + t.row_weight(j);
                if best.as_ref().is_some_and(|(bw, _)| w > *bw) {
                    continue;
                }
                v.iter_mut().for_each(|x| *x = 0);
                bits::set(&mut v, j);
                for i in bits::ones(t.row(j)) {
                    bits::set(&mut v, pivots[i]);
                }
                consider(&v, &mut best);
            }
        }
    }
    best
}

enum SearchForm {
    /// Rows span the kernel of the opposite checks.
    Generator(BitMatrix),
    /// The opposite checks themselves, reduced.
    ParityCheck(BitMatrix),
}

fn search_form(code: &CssCode, side: Side) -> SearchForm {
    let opp = code.checks(side.opposite());
    let (h, _) = opp.rref();
    if h.rows() <= code.n() - h.rows() {
        SearchForm::ParityCheck(h)
    } else {
        SearchForm::Generator(opp.kernel())
    }
}

/// Random information-set search. Each iteration draws its own column
/// order from stream `i` of the seeded generator, so the result does not
/// depend on scheduling and never gets worse with more iterations.
pub fn isd_upper_bound(code: &CssCode, side: Option<Side>, iterations: usize, seed: u64) -> Result<DistanceReport> {
    let mut best: Option<Witness> = None;
    if code.k() > 0 {
        for s in sides(side) {
            let form = search_form(code, s);
            let pairing = code.logical(s.opposite());
            let n = code.n();
            let found = (0..iterations)
                .into_par_iter()
                .filter_map(|i| prange_sample(&form, pairing, n, &mut iteration_rng(seed, i)))
                .min();
            if let Some((_, support)) = found {
                let wit = verified(code, s, support);
                if best.as_ref().map_or(true, |b| wit.weight < b.weight) {
                    best = Some(wit);
                }
            }
        }
    }
    Ok(DistanceReport {
        side,
        exact_floor: None,
        best_upper: best,
        wmax: None,
        iterations: Some(iterations),
        seed: Some(seed),
    })
}

/// Distinct low-weight vectors `y · lift` with `y` in the row space of
/// `basis` that pair nontrivially with `pairing`, as `(weight, words)`.
/// Rows of `basis` index rows of `lift`.
pub fn low_weight_logicals(
    basis: &BitMatrix,
    lift: &BitMatrix,
    pairing: &BitMatrix,
    iterations: usize,
    seed: u64,
) -> Result<Vec<(usize, Vec<u64>)>> {
    if basis.cols() != lift.rows() || lift.cols() != pairing.cols() {
        return Err(Error::Dimension("block basis, lift and pairing do not line up".into()));
    }
    let m = basis.cols();
    let per_iter: Vec<Vec<(usize, Vec<u64>)>> = (0..iterations)
        .into_par_iter()
        .map(|i| {
            let mut rng = iteration_rng(seed, i);
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(&mut rng);
            let (e, _) = permuted_rref(basis, &order);
            let mut out = Vec::new();
            for y in e.iter_rows() {
                let mut z = vec![0u64; lift.stride()];
                for b in bits::ones(y) {
                    bits::xor_into(&mut z, lift.row(b));
                }
                if pairs_nontrivially(pairing, &z) {
                    out.push((bits::weight(&z), z));
                }
            }
            out
        })
        .collect();
    let mut all: Vec<(usize, Vec<u64>)> = per_iter.into_iter().flatten().collect();
    all.sort();
    all.dedup();
    if let Some(min) = all.first().map(|p| p.0) {
        all.retain(|p| p.0 <= 2 * min);
    }
    Ok(all)
}
