//! Maximal and rainbow subgraphs of a simplex graph, clique census and
//! rainbow rank.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{bits, BitMatrix};
use crate::product::SimplexGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Maximal,
    Rainbow,
}

/// A vertex support together with the colour set that defines it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subgraph {
    pub kind: Kind,
    pub colours: Vec<usize>,
    pub support: Vec<u32>,
}

impl Subgraph {
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// One JSON object per line: `{"kind","colours","support"}`.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("subgraph serializes")
    }
}

pub fn supports_matrix(n: usize, subs: &[Subgraph]) -> BitMatrix {
    let supports: Vec<Vec<usize>> = subs.iter().map(|s| s.support.iter().map(|&f| f as usize).collect()).collect();
    BitMatrix::from_supports(n, &supports)
}

pub fn dump_json_lines(subs: &[Subgraph]) -> String {
    subs.iter().map(|s| s.to_json_line() + "\n").collect()
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi as usize] = lo;
        }
    }
}

fn check_colours(g: &SimplexGraph, colours: &[usize]) -> Result<()> {
    match colours.iter().find(|&&c| c > g.dim()) {
        Some(c) => Err(Error::Precondition(format!("colour {c} exceeds D = {}", g.dim()))),
        None => Ok(()),
    }
}

/// Component label of every flag under the colours in `colours`;
/// components are numbered in order of their smallest flag.
pub fn maximal_components(g: &SimplexGraph, colours: &[usize]) -> (Vec<u32>, usize) {
    let mut uf = UnionFind::new(g.n());
    for &c in colours {
        for q in g.cliques(c) {
            for &m in &q[1..] {
                uf.union(q[0], m);
            }
        }
    }
    let mut label = vec![u32::MAX; g.n()];
    let mut comp = vec![0u32; g.n()];
    let mut count = 0u32;
    for f in 0..g.n() {
        let r = uf.find(f as u32) as usize;
        if label[r] == u32::MAX {
            label[r] = count;
            count += 1;
        }
        comp[f] = label[r];
    }
    (comp, count as usize)
}

/// Connected components of the graph restricted to `colours`.
pub fn maximal_subgraphs(g: &SimplexGraph, colours: &[usize]) -> Result<Vec<Subgraph>> {
    check_colours(g, colours)?;
    let mut colours = colours.to_vec();
    colours.sort_unstable();
    colours.dedup();
    let (comp, count) = maximal_components(g, &colours);
    let mut supports = vec![Vec::new(); count];
    for (f, &c) in comp.iter().enumerate() {
        supports[c as usize].push(f as u32);
    }
    Ok(supports
        .into_iter()
        .map(|support| Subgraph { kind: Kind::Maximal, colours: colours.clone(), support })
        .collect())
}

/// Generating set of `{ca, cb}`-rainbow supports: fundamental cycles of
/// the clique graph (one node per `ca`- or `cb`-clique, one edge per flag)
/// against a breadth-first spanning forest grown from the lowest flag.
pub fn rainbow_two(g: &SimplexGraph, ca: usize, cb: usize) -> Result<Vec<Subgraph>> {
    check_colours(g, &[ca, cb])?;
    if ca == cb {
        return Err(Error::Precondition("rainbow pair needs two distinct colours".into()));
    }
    let na = g.cliques(ca).len();
    let nodes = na + g.cliques(cb).len();
    let node_a = |f: usize| g.clique_id(ca, f);
    let node_b = |f: usize| na + g.clique_id(cb, f);
    let members = |x: usize| if x < na { &g.cliques(ca)[x] } else { &g.cliques(cb)[x - na] };

    const NONE: u32 = u32::MAX;
    let mut parent = vec![(NONE, NONE); nodes];
    let mut depth = vec![u32::MAX; nodes];
    let mut tree_flag = vec![false; g.n()];
    let mut queue = std::collections::VecDeque::new();
    for f in 0..g.n() {
        let root = node_a(f);
        if depth[root] != u32::MAX {
            continue;
        }
        depth[root] = 0;
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            for &m in members(x) {
                let m = m as usize;
                let y = if x < na { node_b(m) } else { node_a(m) };
                if depth[y] == u32::MAX {
                    depth[y] = depth[x] + 1;
                    parent[y] = (x as u32, m as u32);
                    tree_flag[m] = true;
                    queue.push_back(y);
                }
            }
        }
    }

    let mut colours = vec![ca, cb];
    colours.sort_unstable();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for f in (0..g.n()).filter(|&f| !tree_flag[f]) {
        let (mut u, mut v) = (node_a(f), node_b(f));
        let mut support = vec![f as u32];
        while depth[u] > depth[v] {
            support.push(parent[u].1);
            u = parent[u].0 as usize;
        }
        while depth[v] > depth[u] {
            support.push(parent[v].1);
            v = parent[v].0 as usize;
        }
        while u != v {
            support.push(parent[u].1);
            support.push(parent[v].1);
            u = parent[u].0 as usize;
            v = parent[v].0 as usize;
        }
        support.sort_unstable();
        if seen.insert(support.clone()) {
            out.push(Subgraph { kind: Kind::Rainbow, colours: colours.clone(), support });
        }
    }
    Ok(out)
}

/// Witness edges if `support` induces a connected subgraph with exactly
/// one edge of every colour in `colours` at each vertex.
pub fn rainbow_witness(g: &SimplexGraph, support: &[u32], colours: &[usize]) -> Option<Vec<(u32, u32, u8)>> {
    let inside: HashSet<u32> = support.iter().copied().collect();
    let mut edges = Vec::new();
    let mut uf = UnionFind::new(g.n());
    for &f in support {
        for &c in colours {
            let nb: Vec<u32> =
                g.clique(c, f as usize).iter().copied().filter(|&x| x != f && inside.contains(&x)).collect();
            if nb.len() != 1 {
                return None;
            }
            uf.union(f, nb[0]);
            if f < nb[0] {
                edges.push((f, nb[0], c as u8));
            }
        }
    }
    let root = support.first().map(|&f| uf.find(f));
    if support.iter().any(|&f| Some(uf.find(f)) != root) {
        return None;
    }
    edges.sort_unstable();
    Some(edges)
}

/// Per-row column lists of a matrix.
pub(crate) fn column_index(m: &BitMatrix) -> Vec<Vec<u32>> {
    let mut cols = vec![Vec::new(); m.cols()];
    for r in 0..m.rows() {
        for c in bits::ones(m.row(r)) {
            cols[c].push(r as u32);
        }
    }
    cols
}

/// Span of `{v ∈ ker(hz) : supp(v) ⊆ f}` over all `colours`-maximal `f`.
///
/// A vector supported on `f` lies in the kernel iff it is in the kernel of
/// `hz` restricted to the columns of `f`, so each block is solved locally.
/// Blocks are disjoint, hence the union of local reduced bases sorted by
/// leading bit is already in reduced echelon form.
pub fn rainbow_multi(g: &SimplexGraph, colours: &[usize], hz: &BitMatrix) -> Result<BitMatrix> {
    check_colours(g, colours)?;
    if colours.len() <= 2 {
        return Err(Error::Precondition("multi-colour rainbow needs more than two colours".into()));
    }
    if hz.cols() != g.n() {
        return Err(Error::Dimension(format!("check matrix has {} columns, graph has {} flags", hz.cols(), g.n())));
    }
    let blocks = maximal_subgraphs(g, colours)?;
    let cols = column_index(hz);
    let mut pos = vec![u32::MAX; g.n()];
    let mut stamp = vec![u32::MAX; hz.rows()];
    let mut rows: Vec<(usize, Vec<u64>)> = Vec::new();
    for (b, f) in blocks.iter().enumerate() {
        for (i, &x) in f.support.iter().enumerate() {
            pos[x as usize] = i as u32;
        }
        let mut touching = Vec::new();
        for &x in &f.support {
            for &r in &cols[x as usize] {
                if stamp[r as usize] != b as u32 {
                    stamp[r as usize] = b as u32;
                    touching.push(r as usize);
                }
            }
        }
        touching.sort_unstable();
        let mut local = BitMatrix::zeros(touching.len(), f.len());
        for (i, &r) in touching.iter().enumerate() {
            for c in bits::ones(hz.row(r)) {
                if pos[c] != u32::MAX {
                    local.set(i, pos[c] as usize, true);
                }
            }
        }
        let k = local.kernel();
        for i in 0..k.rows() {
            let mut w = vec![0u64; hz.stride()];
            for j in bits::ones(k.row(i)) {
                bits::set(&mut w, f.support[j] as usize);
            }
            let lead = bits::ones(&w).next().expect("kernel rows are nonzero");
            rows.push((lead, w));
        }
        for &x in &f.support {
            pos[x as usize] = u32::MAX;
        }
    }
    rows.sort_by_key(|(lead, _)| *lead);
    let mut m = BitMatrix::empty(g.n());
    for (_, w) in rows {
        m.push_row(&w);
    }
    Ok(m)
}

/// The same span built literally: global kernel, then a span
/// intersection with the coordinate space of every block. Quadratic in
/// memory; for cross-checking small cases.
pub fn rainbow_multi_reference(g: &SimplexGraph, colours: &[usize], hz: &BitMatrix) -> Result<BitMatrix> {
    if hz.cols() != g.n() {
        return Err(Error::Dimension(format!("check matrix has {} columns, graph has {} flags", hz.cols(), g.n())));
    }
    let k = hz.kernel();
    let mut all = BitMatrix::empty(g.n());
    for f in maximal_subgraphs(g, colours)? {
        let coords: Vec<Vec<usize>> = f.support.iter().map(|&x| vec![x as usize]).collect();
        let e = BitMatrix::from_supports(g.n(), &coords);
        all = all.vstack(&BitMatrix::span_intersection(&k, &e)?)?;
    }
    Ok(all.rref().0)
}

/// Sizes of the colour-`c` cliques, keyed by size.
pub fn clique_census(g: &SimplexGraph, c: usize) -> Result<BTreeMap<usize, usize>> {
    check_colours(g, &[c])?;
    let mut m = BTreeMap::new();
    for q in g.cliques(c) {
        *m.entry(q.len()).or_insert(0) += 1;
    }
    Ok(m)
}

/// Clique sizes of both colours inside a two-colour maximal subgraph.
pub fn two_colour_census(g: &SimplexGraph, sub: &Subgraph) -> Result<BTreeMap<usize, usize>> {
    let (ca, cb) = two_colours(sub)?;
    let mut m = BTreeMap::new();
    for c in [ca, cb] {
        let mut ids: Vec<usize> = sub.support.iter().map(|&f| g.clique_id(c, f as usize)).collect();
        ids.sort_unstable();
        ids.dedup();
        for q in ids {
            *m.entry(g.cliques(c)[q].len()).or_insert(0) += 1;
        }
    }
    Ok(m)
}

fn two_colours(sub: &Subgraph) -> Result<(usize, usize)> {
    match sub.colours.as_slice() {
        &[a, b] if a != b => Ok((a, b)),
        _ => Err(Error::Precondition("expected a two-colour subgraph".into())),
    }
}

/// Number of independent rainbow supports of one `{ca, cb}`-maximal
/// subgraph: `ẽ − ṽ + 1` of its clique graph.
pub fn rainbow_rank(g: &SimplexGraph, sub: &Subgraph) -> Result<usize> {
    let (ca, cb) = two_colours(sub)?;
    if sub.support.is_empty() {
        return Err(Error::Precondition("empty subgraph".into()));
    }
    let inside: HashSet<u32> = sub.support.iter().copied().collect();
    let mut uf = UnionFind::new(g.n());
    for &f in &sub.support {
        for c in [ca, cb] {
            let q = g.clique(c, f as usize);
            if q.iter().any(|x| !inside.contains(x)) {
                return Err(Error::Precondition("subgraph is not closed under its colours".into()));
            }
            uf.union(f, q[0]);
        }
    }
    let root = uf.find(sub.support[0]);
    if sub.support.iter().any(|&f| uf.find(f) != root) {
        return Err(Error::Precondition("subgraph is disconnected".into()));
    }
    let nodes: usize = two_colour_census(g, sub)?.values().sum();
    Ok(sub.support.len() + 1 - nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LevelledGraph;
    use crate::product::{build_simplex_graph, cartesian_product};

    fn lattice(factors: &[LevelledGraph]) -> SimplexGraph {
        build_simplex_graph(&cartesian_product(factors).unwrap())
    }

    fn c(l: usize) -> LevelledGraph {
        LevelledGraph::make_cycle(l).unwrap()
    }

    #[test]
    fn maximal_examples() {
        let g = lattice(&[c(4), c(4)]);
        let s02 = maximal_subgraphs(&g, &[0, 2]).unwrap();
        assert_eq!(s02.len(), 8);
        assert!(s02.iter().all(|s| s.len() == 4));
        let s01 = maximal_subgraphs(&g, &[0, 1]).unwrap();
        assert_eq!(s01.len(), 4);
        assert!(s01.iter().all(|s| s.len() == 8));
        let s = maximal_subgraphs(&g, &[]).unwrap();
        assert_eq!(s.len(), 32);
        assert!(s.iter().enumerate().all(|(i, s)| s.support == vec![i as u32]));
        assert!(maximal_subgraphs(&g, &[3]).is_err());
    }

    #[test]
    fn rainbow_two_on_lattice_matches_maximal() {
        let g = lattice(&[c(4), c(4)]);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let r = rainbow_two(&g, a, b).unwrap();
            for s in &r {
                assert!(rainbow_witness(&g, &s.support, &[a, b]).is_some());
            }
            let rm = supports_matrix(g.n(), &r);
            let mm = supports_matrix(g.n(), &maximal_subgraphs(&g, &[a, b]).unwrap());
            assert_eq!(rm.rref().0, mm.rref().0);
        }
    }

    #[test]
    fn rainbow_two_tree_is_empty() {
        // two flags joined by one edge of each colour: a single cycle of length two
        let g = SimplexGraph::from_coloured_edges(2, 1, &[(0, 1, 0), (0, 1, 1)]).unwrap();
        assert_eq!(rainbow_two(&g, 0, 1).unwrap().len(), 1);
        // a path: colour 0 joins 0-1, colour 1 joins 1-2
        let g = SimplexGraph::from_coloured_edges(3, 1, &[(0, 1, 0), (1, 2, 1)]).unwrap();
        assert!(rainbow_two(&g, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn seam_has_extra_rainbows() {
        let g = lattice(&[LevelledGraph::make_figure_eight(), c(4)]);
        let r = supports_matrix(g.n(), &rainbow_two(&g, 0, 1).unwrap()).rank();
        let m = supports_matrix(g.n(), &maximal_subgraphs(&g, &[0, 1]).unwrap()).rank();
        assert!(r > m, "rainbow rank {r} vs maximal rank {m}");
    }

    #[test]
    fn multi_matches_reference() {
        let g = lattice(&[c(4), c(4), c(4)]);
        let mut hz = BitMatrix::empty(g.n());
        for (a, b) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            hz = hz.vstack(&supports_matrix(g.n(), &rainbow_two(&g, a, b).unwrap())).unwrap();
        }
        let fast = rainbow_multi(&g, &[0, 1, 2], &hz).unwrap();
        let slow = rainbow_multi_reference(&g, &[0, 1, 2], &hz).unwrap();
        assert_eq!(fast, slow);
        assert!(fast.mul_transpose(&hz).unwrap().is_zero());
        let blocks = maximal_subgraphs(&g, &[0, 1, 2]).unwrap();
        let basis = crate::gf2::EchelonBasis::new(&fast);
        for b in &blocks {
            let v = crate::gf2::BitVec::from_support(g.n(), &b.support.iter().map(|&x| x as usize).collect::<Vec<_>>());
            assert!(basis.contains(&v).unwrap());
        }
        assert_eq!(rainbow_multi(&g, &[0, 1, 2], &BitMatrix::identity(g.n())).unwrap().rows(), 0);
    }

    #[test]
    fn census_and_rank() {
        let g = lattice(&[c(4), c(4)]);
        assert_eq!(clique_census(&g, 0).unwrap(), BTreeMap::from([(2, 16)]));
        let face = &maximal_subgraphs(&g, &[0, 1]).unwrap()[0];
        assert_eq!(rainbow_rank(&g, face).unwrap(), 1);

        // one 6-clique and one 4-clique of colour 0, pairs of colour 1
        let mut edges = Vec::new();
        for (lo, hi) in [(0u32, 6u32), (6, 10)] {
            for u in lo..hi {
                for v in u + 1..hi {
                    edges.push((u, v, 0u8));
                }
            }
        }
        for (u, v) in [(0, 6), (1, 7), (2, 8), (3, 9), (4, 5)] {
            edges.push((u, v, 1));
        }
        let g = SimplexGraph::from_coloured_edges(10, 1, &edges).unwrap();
        assert_eq!(clique_census(&g, 0).unwrap(), BTreeMap::from([(4, 1), (6, 1)]));
        let whole = &maximal_subgraphs(&g, &[0, 1]).unwrap()[0];
        assert_eq!(rainbow_rank(&g, whole).unwrap(), 4);
        let r = supports_matrix(10, &rainbow_two(&g, 0, 1).unwrap()).rank();
        assert_eq!(r, 4);
    }

    #[test]
    fn json_lines() {
        let g = lattice(&[c(4), c(4)]);
        let s = maximal_subgraphs(&g, &[0, 2]).unwrap();
        let text = dump_json_lines(&s[..2]);
        assert_eq!(text.lines().count(), 2);
        let back: Subgraph = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(back, s[0]);
        assert!(text.starts_with("{\"kind\":\"maximal\",\"colours\":[0,2],\"support\":["));
    }
}
