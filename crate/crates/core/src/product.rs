//! Cartesian products of levelled graphs, flag enumeration and the
//! coloured simplex (flag) graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LevelledGraph;

/// Product of levelled graphs. Vertex `v` has factor coordinates
/// `labels[v]` (factor vertex ids) and level equal to the sum of the
/// coordinate levels. Vertices are sorted lexicographically by label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductGraph {
    factors: Vec<LevelledGraph>,
    labels: Vec<Vec<u32>>,
    levels: Vec<u8>,
    adj: Vec<Vec<u32>>,
}

pub fn cartesian_product(factors: &[LevelledGraph]) -> Result<ProductGraph> {
    ProductGraph::new(factors)
}

impl ProductGraph {
    pub fn new(factors: &[LevelledGraph]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Graph("product of zero factors".into()));
        }
        let sizes: Vec<usize> = factors.iter().map(LevelledGraph::vertex_count).collect();
        let total: usize = sizes.iter().product();
        let fadj: Vec<Vec<Vec<usize>>> = factors.iter().map(LevelledGraph::adjacency).collect();
        // mixed radix, first factor most significant
        let mut place = vec![1usize; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            place[i] = place[i + 1] * sizes[i + 1];
        }
        let mut labels = Vec::with_capacity(total);
        let mut levels = Vec::with_capacity(total);
        let mut adj = Vec::with_capacity(total);
        for v in 0..total {
            let digits: Vec<usize> = (0..factors.len()).map(|i| (v / place[i]) % sizes[i]).collect();
            labels.push(digits.iter().enumerate().map(|(i, &d)| factors[i].vertices()[d].id).collect());
            levels.push(digits.iter().enumerate().map(|(i, &d)| factors[i].vertices()[d].level).sum());
            let mut nb: Vec<u32> = Vec::new();
            for (i, &d) in digits.iter().enumerate() {
                for &e in &fadj[i][d] {
                    nb.push((v - d * place[i] + e * place[i]) as u32);
                }
            }
            nb.sort_unstable();
            adj.push(nb);
        }
        Ok(ProductGraph { factors: factors.to_vec(), labels, levels, adj })
    }

    pub fn factors(&self) -> &[LevelledGraph] {
        &self.factors
    }

    /// Number of factors.
    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn label(&self, v: usize) -> &[u32] {
        &self.labels[v]
    }

    pub fn level(&self, v: usize) -> u8 {
        self.levels[v]
    }

    pub fn neighbours(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn level_census(&self) -> BTreeMap<u8, usize> {
        let mut m = BTreeMap::new();
        for &l in &self.levels {
            *m.entry(l).or_insert(0) += 1;
        }
        m
    }

    pub fn index_of_label(&self, label: &[u32]) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_slice().cmp(label)).ok()
    }

    /// Glue every vertex whose `factor` coordinate is `remove` onto the
    /// vertex with coordinate `keep` and otherwise equal coordinates.
    /// Parallel edges are merged. Acts on the product directly.
    pub fn glue_hyperplane(&self, factor: usize, keep: u32, remove: u32) -> Result<ProductGraph> {
        let f = self.factors.get(factor).ok_or_else(|| Error::Graph(format!("no factor {factor}")))?;
        let (glued, _) = f.glue(keep, remove)?;
        let mut new_labels: BTreeSet<Vec<u32>> = BTreeSet::new();
        let image = |l: &[u32]| {
            let mut l = l.to_vec();
            if l[factor] == remove {
                l[factor] = keep;
            }
            l
        };
        for l in &self.labels {
            new_labels.insert(image(l));
        }
        let labels: Vec<Vec<u32>> = new_labels.into_iter().collect();
        let index: HashMap<&[u32], usize> = labels.iter().enumerate().map(|(i, l)| (l.as_slice(), i)).collect();
        let mut levels = vec![0u8; labels.len()];
        let mut adj_sets = vec![BTreeSet::new(); labels.len()];
        for v in 0..self.labels.len() {
            let nv = index[image(&self.labels[v]).as_slice()];
            levels[nv] = self.levels[v];
            for &w in &self.adj[v] {
                let nw = index[image(&self.labels[w as usize]).as_slice()];
                adj_sets[nv].insert(nw as u32);
            }
        }
        let mut factors = self.factors.clone();
        factors[factor] = glued;
        let adj = adj_sets.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(ProductGraph { factors, labels, levels, adj })
    }
}

/// A chain of product vertices with levels `0, 1, ..., D`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Flag {
    pub cells: Vec<u32>,
}

/// All level-increasing paths `0 → 1 → ... → D`, lexicographically sorted.
pub fn enumerate_flags(p: &ProductGraph) -> Vec<Flag> {
    let d = p.dim();
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(d + 1);
    fn extend(p: &ProductGraph, d: usize, path: &mut Vec<u32>, out: &mut Vec<Flag>) {
        if path.len() == d + 1 {
            out.push(Flag { cells: path.clone() });
            return;
        }
        let last = *path.last().unwrap() as usize;
        let want = path.len() as u8;
        for &w in p.neighbours(last) {
            if p.level(w as usize) == want {
                path.push(w);
                extend(p, d, path, out);
                path.pop();
            }
        }
    }
    for v in 0..p.vertex_count() {
        if p.level(v) == 0 {
            path.push(v as u32);
            extend(p, d, &mut path, &mut out);
            path.pop();
        }
    }
    out
}

/// `n₀ · D! · Π dᵢ` for regular factors of degrees `dᵢ`.
pub fn predicted_flag_count(factors: &[LevelledGraph]) -> Result<u64> {
    let mut n: u64 = 1;
    for (i, f) in factors.iter().enumerate() {
        let d = f
            .regular_degree()
            .ok_or_else(|| Error::Graph(format!("factor {i} is not regular; flag-count formula does not apply")))?;
        n *= f.level_count(0) as u64 * d as u64 * (i as u64 + 1);
    }
    Ok(n)
}

/// Flag graph with `D + 1` edge colours. Colour `c` edges join flags that
/// differ only at position `c`; the flags sharing everything but position
/// `c` form a clique, stored once.
#[derive(Clone, Debug)]
pub struct SimplexGraph {
    n: usize,
    dim: usize,
    cells: Option<Vec<u32>>,
    product: Option<ProductGraph>,
    clique_of: Vec<Vec<u32>>,
    cliques: Vec<Vec<Vec<u32>>>,
}

pub fn build_simplex_graph(p: &ProductGraph) -> SimplexGraph {
    SimplexGraph::from_product(p)
}

#[derive(Serialize, Deserialize)]
struct SimplexFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default)]
    flags: Vec<Vec<u32>>,
    edges: Vec<[u32; 3]>,
}

impl SimplexGraph {
    pub fn from_product(p: &ProductGraph) -> Self {
        let flags = enumerate_flags(p);
        let dim = p.dim();
        let width = dim + 1;
        let n = flags.len();
        let mut cells = Vec::with_capacity(n * width);
        for f in &flags {
            cells.extend_from_slice(&f.cells);
        }
        let mut clique_of = vec![vec![0u32; n]; width];
        let mut cliques = vec![Vec::new(); width];
        for c in 0..width {
            let mut ids: HashMap<Vec<u32>, u32> = HashMap::with_capacity(n);
            for f in 0..n {
                let cell = &cells[f * width..(f + 1) * width];
                let key: Vec<u32> = cell.iter().enumerate().filter(|&(i, _)| i != c).map(|(_, &x)| x).collect();
                let next = cliques[c].len() as u32;
                let id = *ids.entry(key).or_insert(next);
                if id == next {
                    cliques[c].push(Vec::new());
                }
                cliques[c][id as usize].push(f as u32);
                clique_of[c][f] = id;
            }
        }
        SimplexGraph { n, dim, cells: Some(cells), product: Some(p.clone()), clique_of, cliques }
    }

    /// Build from an explicit coloured edge list; every single-colour
    /// component must be a clique.
    pub fn from_coloured_edges(n: usize, dim: usize, edges: &[(u32, u32, u8)]) -> Result<Self> {
        let width = dim + 1;
        let mut adj: Vec<Vec<BTreeSet<u32>>> = vec![vec![BTreeSet::new(); n]; width];
        for &(u, v, c) in edges {
            let (u, v, c) = (u as usize, v as usize, c as usize);
            if u >= n || v >= n || c >= width || u == v {
                return Err(Error::Graph(format!("bad coloured edge ({u},{v},{c})")));
            }
            adj[c][u].insert(v as u32);
            adj[c][v].insert(u as u32);
        }
        let mut clique_of = vec![vec![u32::MAX; n]; width];
        let mut cliques = vec![Vec::new(); width];
        for c in 0..width {
            for s in 0..n {
                if clique_of[c][s] != u32::MAX {
                    continue;
                }
                let mut members: Vec<u32> = adj[c][s].iter().copied().collect();
                members.push(s as u32);
                members.sort_unstable();
                let id = cliques[c].len() as u32;
                for &m in &members {
                    let mut expect: BTreeSet<u32> = members.iter().copied().collect();
                    expect.remove(&m);
                    if adj[c][m as usize] != expect {
                        return Err(Error::Graph(format!("colour-{c} component at flag {s} is not a clique")));
                    }
                    clique_of[c][m as usize] = id;
                }
                cliques[c].push(members);
            }
        }
        Ok(SimplexGraph { n, dim, cells: None, product: None, clique_of, cliques })
    }

    /// Number of flags (qubits).
    pub fn n(&self) -> usize {
        self.n
    }

    /// `D`; there are `D + 1` colours.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn colour_count(&self) -> usize {
        self.dim + 1
    }

    pub fn product(&self) -> Option<&ProductGraph> {
        self.product.as_ref()
    }

    pub fn flag_cells(&self, f: usize) -> Option<&[u32]> {
        let w = self.dim + 1;
        self.cells.as_ref().map(|c| &c[f * w..(f + 1) * w])
    }

    pub fn flags(&self) -> Option<Vec<Flag>> {
        (0..self.n).map(|f| self.flag_cells(f).map(|c| Flag { cells: c.to_vec() })).collect()
    }

    /// Id of the colour-`c` clique containing `f`.
    pub fn clique_id(&self, c: usize, f: usize) -> usize {
        self.clique_of[c][f] as usize
    }

    pub fn cliques(&self, c: usize) -> &[Vec<u32>] {
        &self.cliques[c]
    }

    /// The colour-`c` clique containing `f` (includes `f`).
    pub fn clique(&self, c: usize, f: usize) -> &[u32] {
        &self.cliques[c][self.clique_of[c][f] as usize]
    }

    pub fn neighbours(&self, f: usize, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.clique(c, f).iter().map(|&x| x as usize).filter(move |&x| x != f)
    }

    pub fn degree(&self, f: usize, c: usize) -> usize {
        self.clique(c, f).len() - 1
    }

    /// `(u, v, colour)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(u32, u32, u8)> {
        let mut out = Vec::new();
        for c in 0..=self.dim {
            for q in &self.cliques[c] {
                for (i, &u) in q.iter().enumerate() {
                    for &v in &q[i + 1..] {
                        out.push((u, v, c as u8));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.cliques.iter().flatten().map(|q| q.len() * (q.len() - 1) / 2).sum()
    }

    /// Exactly one edge of every colour at every flag.
    pub fn is_colour_code_lattice(&self) -> bool {
        self.cliques.iter().flatten().all(|q| q.len() == 2)
    }

    pub fn to_json(&self) -> String {
        let w = self.dim + 1;
        let flags = match &self.cells {
            Some(c) => c.chunks(w).map(<[u32]>::to_vec).collect(),
            None => Vec::new(),
        };
        let edges = self.edges().into_iter().map(|(u, v, c)| [u, v, c as u32]).collect();
        serde_json::to_string(&SimplexFile { dim: Some(self.dim), n: Some(self.n), flags, edges })
            .expect("simplex graph serializes")
    }

    /// Import a simplex graph. `dim` and `n` may be omitted when flags are given.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: SimplexFile = serde_json::from_str(text)?;
        let dim = match (f.dim, f.flags.first()) {
            (Some(d), _) => d,
            (None, Some(c)) if !c.is_empty() => c.len() - 1,
            _ => f.edges.iter().map(|e| e[2] as usize).max().unwrap_or(0),
        };
        let n = f.n.unwrap_or(if f.flags.is_empty() {
            f.edges.iter().map(|e| e[0].max(e[1]) as usize + 1).max().unwrap_or(0)
        } else {
            f.flags.len()
        });
        let edges: Vec<(u32, u32, u8)> = f.edges.iter().map(|e| (e[0], e[1], e[2] as u8)).collect();
        let mut g = Self::from_coloured_edges(n, dim, &edges)?;
        if !f.flags.is_empty() {
            if f.flags.len() != n || f.flags.iter().any(|c| c.len() != dim + 1) {
                return Err(Error::Graph("flag list does not match the graph".into()));
            }
            g.cells = Some(f.flags.concat());
        }
        Ok(g)
    }
}
