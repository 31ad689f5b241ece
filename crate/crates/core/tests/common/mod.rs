//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use petgraph::algo::is_isomorphic_matching;
use petgraph::graph::UnGraph;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rainbow_codes::code::colour_subsets;
use rainbow_codes::distance::{exact_distance_upto, DEFAULT_BUDGET};
use rainbow_codes::gf2::{bits, BitMatrix, BitVec, EchelonBasis};
use rainbow_codes::graph::Vertex;
use rainbow_codes::product::{build_simplex_graph, cartesian_product};
use rainbow_codes::subgraph::{
    maximal_subgraphs, rainbow_multi, rainbow_rank, rainbow_two, rainbow_witness, supports_matrix,
    two_colour_census, Subgraph,
};
use rainbow_codes::triorth::{check_triorthogonality, triple_overlaps, Bipartition, TriorthReport};
use rainbow_codes::{CssCode, LevelledGraph, Side, SimplexGraph};

pub fn random_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, rng.gen_bool(0.5));
        }
    }
    m
}

pub fn random_combinations(rng: &mut ChaCha8Rng, basis: &BitMatrix, count: usize) -> BitMatrix {
    let mut out = BitMatrix::empty(basis.cols());
    for _ in 0..count {
        let mut v = vec![0u64; basis.stride()];
        for r in basis.iter_rows() {
            if rng.gen_bool(0.5) {
                bits::xor_into(&mut v, r);
            }
        }
        out.push_row(&v);
    }
    out
}

pub fn random_css(n: usize, seed: u64) -> CssCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rx = rng.gen_range(1..=n / 2);
    let hx = random_rows(&mut rng, rx, n);
    let kernel = hx.kernel();
    let rz = rng.gen_range(1..=kernel.rows().max(1));
    let hz = if kernel.rows() == 0 { BitMatrix::empty(n) } else { random_combinations(&mut rng, &kernel, rz) };
    CssCode::new(hx, hz).unwrap()
}

pub fn to_words(v: u32, n: usize) -> Vec<u64> {
    let mut w = vec![0u64; n.div_ceil(64)];
    w[0] = v as u64;
    w
}

/// Minimum weight of a `side` logical by scanning all 2ⁿ vectors.
pub fn brute_distance(code: &CssCode, side: Side) -> Option<usize> {
    let n = code.n();
    let opp = code.checks(side.opposite());
    let own = EchelonBasis::new(code.checks(side));
    (1u32..1 << n)
        .filter(|&v| {
            let w = to_words(v, n);
            opp.iter_rows().all(|r| bits::and_weight(r, &w) % 2 == 0) && !own.contains_words(&w)
        })
        .map(|v| v.count_ones() as usize)
        .min()
}

/// Phases (in units of π/4) of the transversal pattern on each logical
/// basis state, found by applying it to the explicit 2ⁿ state vector.
/// `None` when some image leaves the code space.
pub fn state_vector_action(code: &CssCode, a: &Bipartition) -> Option<Vec<u8>> {
    let n = code.n();
    assert!(n <= 12);
    let sign: Vec<i32> = (0..n).map(|q| if bipartition_bit(a, q) { 1 } else { -1 }).collect();
    let stab: Vec<u32> = span_ints(code.hx());
    let lx: Vec<u32> = row_ints(code.lx());
    let k = lx.len();
    let mut action = Vec::with_capacity(1 << k);
    for x in 0u32..1 << k {
        let shift = (0..k).filter(|i| x >> i & 1 == 1).fold(0u32, |acc, i| acc ^ lx[i]);
        // amplitudes as powers of ω = e^{iπ/4}; absent basis states stay None
        let mut state: Vec<Option<u8>> = vec![None; 1 << n];
        for &s in &stab {
            state[(s ^ shift) as usize] = Some(0);
        }
        for (v, amp) in state.iter_mut().enumerate() {
            if let Some(p) = amp {
                let t: i32 = (0..n).filter(|q| v >> q & 1 == 1).map(|q| sign[q]).sum();
                *p = (*p as i32 + t).rem_euclid(8) as u8;
            }
        }
        let mut phases = state.iter().flatten();
        let first = *phases.next().unwrap();
        if phases.any(|&p| p != first) {
            return None;
        }
        action.push(first);
    }
    Some(action)
}

pub fn bipartition_bit(a: &Bipartition, q: usize) -> bool {
    a.a.get(q)
}

pub fn row_ints(m: &BitMatrix) -> Vec<u32> {
    m.iter_rows().map(|r| r[0] as u32).collect()
}

pub fn span_ints(m: &BitMatrix) -> Vec<u32> {
    let rows = row_ints(m);
    let mut out = vec![0u32];
    for r in rows {
        if !out.contains(&r) {
            let extra: Vec<u32> = out.iter().map(|s| s ^ r).collect();
            out.extend(extra);
        }
    }
    out
}

/// Integer coefficients mod 8 of the multilinear phase polynomial.
pub fn phase_polynomial(action: &[u8]) -> Vec<u8> {
    let mut c: Vec<i32> = action.iter().map(|&p| p as i32).collect();
    let k = action.len().trailing_zeros();
    for i in 0..k {
        for s in 0..c.len() {
            if s >> i & 1 == 1 {
                c[s] -= c[s ^ (1 << i)];
            }
        }
    }
    c.iter().map(|v| v.rem_euclid(8) as u8).collect()
}

pub fn cubic_terms(poly: &[u8]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (s, &c) in poly.iter().enumerate() {
        if (s as u32).count_ones() == 3 && c != 0 {
            assert_eq!(c, 4, "cubic coefficient must be 0 or 4");
            let idx: Vec<usize> = (0..32).filter(|i| s >> i & 1 == 1).collect();
            out.push((idx[0], idx[1], idx[2]));
        }
    }
    out.sort_unstable();
    out
}

/// Conditions 1, 2, 4 and 5 together say the pattern keeps the code
/// space; condition 3 constrains the logical action further.
pub fn preserves(report: &TriorthReport) -> bool {
    [1, 2, 4, 5].iter().all(|&c| report.passed(c))
}

pub fn c3_membership(report: &TriorthReport) -> bool {
    let c = &report.conditions[2];
    c.passed || c.counterexample.as_deref() == Some(&[])
}

/// Condition 3 membership by brute force: every pairwise logical
/// product is orthogonal to all X stabilizers.
pub fn brute_c3(code: &CssCode) -> bool {
    let stab = span_ints(code.hx());
    let lx = row_ints(code.lx());
    lx.iter().all(|&a| lx.iter().all(|&b| stab.iter().all(|&s| (a & b & s).count_ones() % 2 == 0)))
}

pub fn cube_code() -> CssCode {
    let hx = BitMatrix::from_supports(8, &[(0..8).collect::<Vec<_>>()]);
    let faces: Vec<Vec<usize>> = (0..3)
        .flat_map(|axis| (0..2).map(move |bit| (0..8).filter(|v| (v >> axis) & 1 == bit).collect()))
        .collect();
    CssCode::new(hx, BitMatrix::from_supports(8, &faces)).unwrap()
}

pub fn parity_bipartition(n: usize) -> Bipartition {
    let ones: Vec<usize> = (0..n).filter(|v: &usize| v.count_ones() % 2 == 0).collect();
    Bipartition::new(BitVec::from_support(n, &ones))
}

pub fn random_bipartition(n: usize, rng: &mut ChaCha8Rng) -> Bipartition {
    let ones: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    Bipartition::new(BitVec::from_support(n, &ones))
}

pub const MENU: [&str; 6] = ["cycle:4", "cycle:6", "cycle:8", "kbip:2,2", "kbip:2,4", "fig8"];

pub fn lattice(names: &[&str]) -> SimplexGraph {
    let f: Vec<LevelledGraph> = names.iter().map(|s| LevelledGraph::from_shorthand(s).unwrap()).collect();
    build_simplex_graph(&cartesian_product(&f).unwrap())
}

/// Two or three factors; at most one figure-eight keeps things quick.
pub fn factor_names() -> impl Strategy<Value = Vec<&'static str>> {
    prop::collection::vec(0usize..MENU.len(), 2..=3).prop_map(|idx| {
        let mut seen_fig8 = false;
        idx.into_iter()
            .map(|i| {
                if MENU[i] == "fig8" && std::mem::replace(&mut seen_fig8, true) {
                    "cycle:4"
                } else {
                    MENU[i]
                }
            })
            .collect()
    })
}

pub fn random_levelled(rng: &mut ChaCha8Rng, max: usize) -> LevelledGraph {
    let n0 = rng.gen_range(1..=max / 2);
    let n1 = rng.gen_range(1..=max - n0);
    let mut vertices: Vec<Vertex> = (0..n0).map(|i| Vertex { id: i as u32, level: 0 }).collect();
    vertices.extend((0..n1).map(|i| Vertex { id: (n0 + i) as u32, level: 1 }));
    let mut edges = Vec::new();
    for a in 0..n0 {
        for b in 0..n1 {
            if rng.gen_bool(0.5) {
                edges.push((a as u32, (n0 + b) as u32));
            }
        }
    }
    LevelledGraph::new(vertices, edges).unwrap()
}

/// Two same-level, non-adjacent vertices, if any.
pub fn glue_pair(g: &LevelledGraph, rng: &mut ChaCha8Rng) -> Option<(u32, u32)> {
    let mut pairs = Vec::new();
    for a in g.vertices() {
        for b in g.vertices() {
            if a.id < b.id && a.level == b.level && !g.neighbours(a.id).contains(&b.id) {
                pairs.push((a.id, b.id));
            }
        }
    }
    (!pairs.is_empty()).then(|| pairs[rng.gen_range(0..pairs.len())])
}

pub fn coloured_graph(g: &SimplexGraph) -> UnGraph<(), u8> {
    let mut p = UnGraph::with_capacity(g.n(), 0);
    for _ in 0..g.n() {
        p.add_node(());
    }
    for (u, v, c) in g.edges() {
        p.add_edge(u.into(), v.into(), c);
    }
    p
}

pub fn isomorphic(a: &SimplexGraph, b: &SimplexGraph) -> bool {
    is_isomorphic_matching(&coloured_graph(a), &coloured_graph(b), |_, _| true, |x, y| x == y)
}

/// Flags of both graphs keyed by their product-vertex labels; equality of
/// the labelled edge sets is an explicit isomorphism.
pub fn labelled_edges(g: &SimplexGraph) -> BTreeSet<(Vec<Vec<u32>>, Vec<Vec<u32>>, u8)> {
    let p = g.product().unwrap();
    let key = |f: u32| -> Vec<Vec<u32>> {
        g.flag_cells(f as usize).unwrap().iter().map(|&v| p.label(v as usize).to_vec()).collect()
    };
    g.edges().into_iter().map(|(u, v, c)| {
        let (a, b) = (key(u), key(v));
        if a <= b { (a, b, c) } else { (b, a, c) }
    }).collect()
}


pub fn colour_set(dim: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::btree_set(0..=dim, 0..=dim + 1).prop_map(|s| s.into_iter().collect())
}

pub fn as_set(s: &Subgraph) -> BTreeSet<u32> {
    s.support.iter().copied().collect()
}

pub fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|c| b.contains(c)).collect()
}

pub fn check_exact_search(n: usize, seed: u64) -> Result<(), TestCaseError> {
    let code = random_css(n, seed);
    for side in [Side::X, Side::Z] {
        let brute = brute_distance(&code, side);
        let r = exact_distance_upto(&code, Some(side), n, DEFAULT_BUDGET).unwrap();
        match brute {
            Some(d) => {
                prop_assert_eq!(r.best_upper.as_ref().map(|w| w.weight), Some(d));
                prop_assert_eq!(r.exact_floor, Some(d - 1));
            }
            None => {
                prop_assert!(r.best_upper.is_none());
                prop_assert_eq!(r.exact_floor, Some(n));
            }
        }
    }
    let both = exact_distance_upto(&code, None, n, DEFAULT_BUDGET).unwrap();
    let d = [brute_distance(&code, Side::X), brute_distance(&code, Side::Z)].into_iter().flatten().min();
    prop_assert_eq!(both.best_upper.map(|w| w.weight), d);
    Ok(())
}

pub fn check_maximal_intersections(names: &[&str], s1: Vec<usize>, s2: Vec<usize>) -> Result<(), TestCaseError> {
    let g = lattice(names);
    let clip = |s: &[usize]| s.iter().copied().filter(|&c| c <= g.dim()).collect::<Vec<_>>();
    let (s1, s2) = (clip(&s1), clip(&s2));
    let common = intersect(&s1, &s2);
    let a = maximal_subgraphs(&g, &s1).unwrap();
    let b = maximal_subgraphs(&g, &s2).unwrap();
    let parts = maximal_subgraphs(&g, &common).unwrap();
    let mut part_of = vec![0usize; g.n()];
    for (i, p) in parts.iter().enumerate() {
        for &f in &p.support {
            part_of[f as usize] = i;
        }
    }
    for x in &a {
        let xs = as_set(x);
        for y in &b {
            let inter: BTreeSet<u32> = xs.intersection(&as_set(y)).copied().collect();
            // every (S₁ ∩ S₂)-component touched lies wholly inside
            for &f in &inter {
                let whole = &parts[part_of[f as usize]].support;
                prop_assert!(whole.iter().all(|v| inter.contains(v)));
            }
        }
    }
    Ok(())
}

pub fn check_maximal_rainbow_intersections(names: &[&str], pair: (usize, usize), s1: Vec<usize>) -> Result<(), TestCaseError> {
    let g = lattice(names);
    let d = g.dim();
    let (ca, cb) = (pair.0.min(d), pair.1.min(d));
    prop_assume!(ca != cb);
    let s1: Vec<usize> = s1.into_iter().filter(|&c| c <= d).collect();
    let s2 = vec![ca.min(cb), ca.max(cb)];
    let common = intersect(&s1, &s2);
    let rainbows = rainbow_two(&g, s2[0], s2[1]).unwrap();
    for x in maximal_subgraphs(&g, &s1).unwrap() {
        let xs = as_set(&x);
        for r in &rainbows {
            let inter: BTreeSet<u32> = xs.intersection(&as_set(r)).copied().collect();
            if inter.is_empty() {
                continue;
            }
            let edges = rainbow_witness(&g, &r.support, &s2).expect("generator is rainbow");
            if common.len() == 2 {
                prop_assert_eq!(inter.len(), r.len());
            }
            if common.len() == 1 {
                // closed under the common colour's edges of the rainbow
                let c = common[0] as u8;
                for &(u, v, col) in &edges {
                    if col == c {
                        prop_assert_eq!(inter.contains(&u), inter.contains(&v));
                    }
                }
                prop_assert_eq!(inter.len() % 2, 0);
            }
        }
    }
    Ok(())
}

pub fn check_even_intersection(names: &[&str]) -> Result<(), TestCaseError> {
    let g = lattice(names);
    let d = g.dim();
    for z in 2..=d {
        let x = d + 2 - z;
        for sx in colour_subsets(d, x) {
            let mx = supports_matrix(g.n(), &maximal_subgraphs(&g, &sx).unwrap());
            for sz in colour_subsets(d, z) {
                let rz = if z == 2 {
                    supports_matrix(g.n(), &rainbow_two(&g, sz[0], sz[1]).unwrap())
                } else {
                    // span of z-rainbows, computed against the (D+2-z)-maximal checks
                    let all = colour_subsets(d, x)
                        .iter()
                        .map(|s| supports_matrix(g.n(), &maximal_subgraphs(&g, s).unwrap()))
                        .fold(BitMatrix::empty(g.n()), |acc, m| acc.vstack(&m).unwrap());
                    rainbow_multi(&g, &sz, &all).unwrap()
                };
                let prod = mx.mul_transpose(&rz).unwrap();
                prop_assert!(prod.is_zero(), "colours {:?} x {:?}", sx, sz);
            }
        }
    }
    Ok(())
}

pub fn check_appendix_b_counts(names: &[&str], pair: (usize, usize)) -> Result<(), TestCaseError> {
    let g = lattice(names);
    let d = g.dim();
    let (ca, cb) = (pair.0.min(d), pair.1.min(d));
    prop_assume!(ca != cb);
    let (ca, cb) = (ca.min(cb), ca.max(cb));
    let rainbows = rainbow_two(&g, ca, cb).unwrap();
    for sub in maximal_subgraphs(&g, &[ca, cb]).unwrap() {
        let census = two_colour_census(&g, &sub).unwrap();
        let v: usize = census.iter().map(|(&size, &m)| size / 2 * m).sum();
        prop_assert_eq!(v, sub.len());
        let a: usize = census.iter().map(|(&size, &m)| (size / 2).saturating_sub(1) * m).sum();
        let inside = as_set(&sub);
        let local: Vec<Subgraph> =
            rainbows.iter().filter(|r| r.support.iter().all(|f| inside.contains(f))).cloned().collect();
        let rank = supports_matrix(g.n(), &local).rank();
        prop_assert_eq!(rank, 1 + a);
        prop_assert_eq!(rainbow_rank(&g, &sub).unwrap(), 1 + a);
    }
    Ok(())
}

pub fn check_glue_product(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_levelled(&mut rng, 8);
    let h = random_levelled(&mut rng, 6);
    let Some((keep, remove)) = glue_pair(&g, &mut rng) else { return Ok(()); };
    let (glued, _) = g.glue(keep, remove).unwrap();
    let first = build_simplex_graph(&cartesian_product(&[glued, h.clone()]).unwrap());
    let second =
        build_simplex_graph(&cartesian_product(&[g, h]).unwrap().glue_hyperplane(0, keep, remove).unwrap());
    prop_assert_eq!(first.n(), second.n());
    prop_assert_eq!(labelled_edges(&first), labelled_edges(&second));
    if first.n() <= 160 {
        prop_assert!(isomorphic(&first, &second));
    }
    Ok(())
}

pub fn agree_with_state_vector(code: &CssCode, a: &Bipartition) -> Result<(), TestCaseError> {
    let report = check_triorthogonality(code, a).unwrap();
    let action = state_vector_action(code, a);
    prop_assert_eq!(action.is_some(), preserves(&report), "{:?}", report);
    prop_assert_eq!(c3_membership(&report), brute_c3(code));
    if report.gate_found {
        let cubic = cubic_terms(&phase_polynomial(&action.unwrap()));
        prop_assert_eq!(triple_overlaps(code.lx()), cubic);
    }
    let flipped = check_triorthogonality(code, &a.complement()).unwrap();
    prop_assert_eq!(flipped.gate_found, report.gate_found);
    Ok(())
}
