//! Transversal T/T† patterns: bipartitions of the flags, the five
//! triorthogonality conditions and CCZ couplings between logicals.

use std::collections::HashMap;
use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::CssCode;
use crate::error::{Error, Result};
use crate::gf2::{bits, BitVec, EchelonBasis};
use crate::product::SimplexGraph;

/// Qubits with bit 1 get T, the rest T†.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    pub a: BitVec,
}

impl Bipartition {
    pub fn new(a: BitVec) -> Self {
        Bipartition { a }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn complement(&self) -> Bipartition {
        let mut a = self.a.clone();
        for q in 0..a.len() {
            a.flip(q);
        }
        Bipartition { a }
    }

    /// One `0` or `1` per line.
    pub fn from_lines(text: &str) -> Result<Self> {
        let bits: Vec<usize> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| match l {
                "0" => Ok(0),
                "1" => Ok(1),
                other => Err(Error::Parse(format!("bipartition entry {other:?}"))),
            })
            .collect::<Result<_>>()?;
        let ones: Vec<usize> = bits.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i).collect();
        Ok(Bipartition { a: BitVec::from_support(bits.len(), &ones) })
    }

    pub fn to_lines(&self) -> String {
        (0..self.a.len()).map(|q| if self.a.get(q) { "1\n" } else { "0\n" }).collect()
    }
}

fn two_colouring(g: &SimplexGraph) -> Option<Vec<bool>> {
    let n = g.n();
    let mut side: Vec<Option<bool>> = vec![None; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if side[s].is_some() {
            continue;
        }
        side[s] = Some(true);
        queue.push_back(s);
        while let Some(f) = queue.pop_front() {
            let here = side[f].expect("queued flags are coloured");
            for c in 0..=g.dim() {
                for &h in g.clique(c, f) {
                    let h = h as usize;
                    if h == f {
                        continue;
                    }
                    match side[h] {
                        None => {
                            side[h] = Some(!here);
                            queue.push_back(h);
                        }
                        Some(s) if s == here => return None,
                        Some(_) => {}
                    }
                }
            }
        }
    }
    Some(side.into_iter().map(|s| s.expect("all flags visited")).collect())
}

/// Sign of every flag from orientations of its simplex: the parity of the
/// order in which factors are raised, times a ±1 weight on each factor
/// edge that alternates along closed trails.
fn orientation_signs(g: &SimplexGraph) -> Result<Vec<bool>> {
    let p = g
        .product()
        .ok_or_else(|| Error::NotBipartite("flag graph has no product structure to orient".into()))?;
    let mut edge_sign: Vec<HashMap<(u32, u32), bool>> = Vec::new();
    for f in p.factors() {
        if !f.is_all_even_degree() {
            return Err(Error::NotBipartite("a factor has a vertex of odd degree".into()));
        }
        let mut m = HashMap::new();
        for trail in f.cycle_decomposition()? {
            for (t, &u) in trail.iter().enumerate() {
                let v = trail[(t + 1) % trail.len()];
                m.insert((u.min(v), u.max(v)), t % 2 == 0);
            }
        }
        edge_sign.push(m);
    }
    let mut out = Vec::with_capacity(g.n());
    for f in 0..g.n() {
        let cells = g.flag_cells(f).expect("product flags carry cells");
        let mut order = Vec::with_capacity(cells.len() - 1);
        let mut positive = true;
        for w in cells.windows(2) {
            let (a, b) = (p.label(w[0] as usize), p.label(w[1] as usize));
            let i = (0..a.len()).find(|&i| a[i] != b[i]).expect("consecutive cells differ");
            order.push(i);
            let key = (a[i].min(b[i]), a[i].max(b[i]));
            if !edge_sign[i][&key] {
                positive = !positive;
            }
        }
        let inversions = (0..order.len())
            .flat_map(|x| (x + 1..order.len()).map(move |y| (x, y)))
            .filter(|&(x, y)| order[x] > order[y])
            .count();
        if inversions % 2 == 1 {
            positive = !positive;
        }
        out.push(positive);
    }
    Ok(out)
}

/// Proper 2-colouring of the flag graph when there is one; otherwise,
/// for products of even-degree factors, the orientation split. Flag 0 is
/// always on the T side.
pub fn find_bipartition(g: &SimplexGraph) -> Result<Bipartition> {
    let side = match two_colouring(g) {
        Some(s) => s,
        None => orientation_signs(g)?,
    };
    let anchor = side.first().copied().unwrap_or(true);
    let ones: Vec<usize> = (0..g.n()).filter(|&f| side[f] == anchor).collect();
    Ok(Bipartition { a: BitVec::from_support(g.n(), &ones) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionStatus {
    pub condition: usize,
    pub passed: bool,
    /// Row indices of the first failure: hx rows, then lx rows offset by
    /// the hx row count where both appear.
    pub counterexample: Option<Vec<usize>>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriorthReport {
    pub conditions: Vec<ConditionStatus>,
    pub gate_found: bool,
}

impl TriorthReport {
    pub fn passed(&self, condition: usize) -> bool {
        self.conditions[condition - 1].passed
    }
}

fn and_words(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn status(condition: usize, failure: Option<Vec<usize>>, note: &str) -> ConditionStatus {
    ConditionStatus { condition, passed: failure.is_none(), counterexample: failure, note: note.to_string() }
}

/// Evaluates the five conditions for `a` to act as a logical non-Clifford
/// diagonal gate.
pub fn check_triorthogonality(code: &CssCode, a: &Bipartition) -> Result<TriorthReport> {
    let n = code.n();
    if a.len() != n {
        return Err(Error::Dimension(format!("bipartition of length {} for {n} qubits", a.len())));
    }
    let hx = code.hx();
    let lx = code.lx();
    let lz = code.lz();
    let rx = hx.rows();
    let zspan = EchelonBasis::new(code.hz());
    let zl = EchelonBasis::new(&code.hz().vstack(lz)?);
    let aw = a.a.words();

    let c1 = (0..rx)
        .into_par_iter()
        .find_map_first(|i| {
            (i..rx).find_map(|j| {
                let p = and_words(hx.row(i), hx.row(j));
                (!zspan.contains_words(&p)).then(|| vec![i, j])
            })
        });

    let c2 = (0..rx).into_par_iter().find_map_first(|i| {
        (0..lx.rows()).find_map(|j| {
            let p = and_words(hx.row(i), lx.row(j));
            (!zspan.contains_words(&p)).then(|| vec![i, rx + j])
        })
    });

    let mut c3 = None;
    let mut nontrivial = false;
    'outer: for i in 0..lx.rows() {
        for j in i..lx.rows() {
            let p = and_words(lx.row(i), lx.row(j));
            if !zl.contains_words(&p) {
                c3 = Some(vec![rx + i, rx + j]);
                break 'outer;
            }
            if !zspan.contains_words(&p) {
                nontrivial = true;
            }
        }
    }
    let c3_note = if c3.is_none() && !nontrivial && lx.rows() > 0 {
        c3 = Some(Vec::new());
        "every logical product is a stabilizer"
    } else if lx.rows() == 0 {
        c3 = Some(Vec::new());
        "no logical qubits"
    } else {
        ""
    };

    let c4 = (0..rx).find(|&i| {
        let x = hx.row(i);
        (2 * bits::and_weight(aw, x)) % 8 != bits::weight(x) % 8
    });

    // X operators: hx rows then lx rows
    let ops: Vec<&[u64]> = hx.iter_rows().chain(lx.iter_rows()).collect();
    let c5 = (0..rx).into_par_iter().find_map_first(|i| {
        let xi = hx.row(i);
        let near: Vec<usize> = (0..ops.len()).filter(|&j| bits::intersects(xi, ops[j])).collect();
        let fails = |p: &[u64]| zspan.contains_words(p) && (2 * bits::and_weight(p, aw)) % 4 != bits::weight(p) % 4;
        for (s, &u) in near.iter().enumerate() {
            let pu = and_words(xi, ops[u]);
            if fails(&pu) {
                return Some(vec![i, u]);
            }
            for &v in &near[s + 1..] {
                let mut p = pu.clone();
                for (d, (x, y)) in p.iter_mut().zip(xi.iter().zip(ops[v])) {
                    *d ^= x & y;
                }
                if fails(&p) {
                    return Some(vec![i, u, v]);
                }
            }
        }
        None
    });

    let conditions = vec![
        status(1, c1, "pairwise products of X checks lie in the Z stabilizer span"),
        status(2, c2, "X check times X logical lies in the Z stabilizer span"),
        ConditionStatus {
            condition: 3,
            passed: c3.is_none(),
            counterexample: c3,
            note: if c3_note.is_empty() {
                "pairwise products of X logicals are Z stabilizers or Z logicals, not all trivial".into()
            } else {
                c3_note.into()
            },
        },
        status(4, c4.map(|i| vec![i]), "2|a∧x| ≡ |x| mod 8 for every X check"),
        status(5, c5, "2|a∧xᵢ∧xⱼ| ≡ |xᵢ∧xⱼ| mod 4 for checks against rows and pair sums"),
    ];
    let gate_found = conditions.iter().all(|c| c.passed);
    Ok(TriorthReport { conditions, gate_found })
}

/// Triples `(i, j, k)` of X logicals with odd triple overlap; these are
/// the CCZ couplings of the transversal gate.
pub fn ccz_interactions(code: &CssCode, a: &Bipartition) -> Result<Vec<(usize, usize, usize)>> {
    let report = check_triorthogonality(code, a)?;
    if !report.gate_found {
        return Err(Error::Precondition("triorthogonality conditions fail; no transversal gate".into()));
    }
    Ok(triple_overlaps(code.lx()))
}

/// Odd triple overlaps among rows, in lexicographic order.
pub fn triple_overlaps(lx: &crate::gf2::BitMatrix) -> Vec<(usize, usize, usize)> {
    let k = lx.rows();
    (0..k)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..k).flat_map(move |j| {
                (j + 1..k).filter_map(move |l| {
                    (bits::and3_weight(lx.row(i), lx.row(j), lx.row(l)) % 2 == 1).then_some((i, j, l))
                })
            })
        })
        .collect()
}

/// How many triples each logical takes part in.
pub fn interaction_degrees(k: usize, triples: &[(usize, usize, usize)]) -> Vec<usize> {
    let mut deg = vec![0; k];
    for &(i, j, l) in triples {
        deg[i] += 1;
        deg[j] += 1;
        deg[l] += 1;
    }
    deg
}
