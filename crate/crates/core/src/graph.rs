//! Levelled bipartite input graphs: generators, statistics, gluing.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub id: u32,
    pub level: u8,
}

/// Simple bipartite graph whose vertices carry level 0 or 1; every edge
/// joins the two levels. Vertices are kept id-sorted, edges as sorted
/// `(min, max)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct LevelledGraph {
    vertices: Vec<Vertex>,
    edges: Vec<(u32, u32)>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<Vertex>,
    edges: Vec<[u32; 2]>,
}

impl TryFrom<GraphFile> for LevelledGraph {
    type Error = Error;
    fn try_from(f: GraphFile) -> Result<Self> {
        LevelledGraph::new(f.vertices, f.edges.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<LevelledGraph> for GraphFile {
    fn from(g: LevelledGraph) -> Self {
        GraphFile { vertices: g.vertices, edges: g.edges.into_iter().map(|(a, b)| [a, b]).collect() }
    }
}

/// What a gluing did, enough to undo it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingRecord {
    pub kept: u32,
    pub removed: u32,
    pub level: u8,
    /// Former neighbours of `removed`.
    pub moved: Vec<u32>,
    /// Neighbours shared by both vertices; their parallel edges were merged.
    pub merged: Vec<u32>,
}

impl GluingRecord {
    /// Set when the gluing created parallel edges that had to be merged.
    pub fn merged_parallel(&self) -> bool {
        !self.merged.is_empty()
    }
}

impl LevelledGraph {
    pub fn new(mut vertices: Vec<Vertex>, edges: Vec<(u32, u32)>) -> Result<Self> {
        vertices.sort();
        for w in vertices.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::Graph(format!("duplicate vertex id {}", w[0].id)));
            }
        }
        let level: BTreeMap<u32, u8> = vertices.iter().map(|v| (v.id, v.level)).collect();
        if let Some(v) = vertices.iter().find(|v| v.level > 1) {
            return Err(Error::Graph(format!("vertex {} has level {}, expected 0 or 1", v.id, v.level)));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in &edges {
            let (la, lb) = match (level.get(&a), level.get(&b)) {
                (Some(&la), Some(&lb)) => (la, lb),
                _ => return Err(Error::Graph(format!("edge ({a},{b}) references an unknown vertex"))),
            };
            if a == b {
                return Err(Error::Graph(format!("self-loop at {a}")));
            }
            if la == lb {
                return Err(Error::Graph(format!("edge ({a},{b}) joins two level-{la} vertices")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::Graph(format!("duplicate edge ({a},{b})")));
            }
        }
        Ok(LevelledGraph { vertices, edges: set.into_iter().collect() })
    }

    /// Even cycle with alternating levels, vertex `i` at level `i % 2`.
    pub fn make_cycle(len: usize) -> Result<Self> {
        if len < 4 || len % 2 == 1 {
            return Err(Error::Graph(format!("cycle length must be even and at least 4, got {len}")));
        }
        let vertices = (0..len as u32).map(|i| Vertex { id: i, level: (i % 2) as u8 }).collect();
        let edges = (0..len as u32).map(|i| (i, (i + 1) % len as u32)).collect();
        Self::new(vertices, edges)
    }

    /// Two 4-cycles sharing one level-1 vertex. Ids 0..3 are level 0,
    /// 4 is the shared vertex, 5 and 6 the other level-1 vertices.
    pub fn make_figure_eight() -> Self {
        let vertices = (0..7).map(|i| Vertex { id: i, level: u8::from(i >= 4) }).collect();
        let edges = vec![(0, 4), (1, 4), (0, 5), (1, 5), (2, 4), (3, 4), (2, 6), (3, 6)];
        Self::new(vertices, edges).expect("figure-eight is well formed")
    }

    /// Complete bipartite graph: ids 0..a level 0, a..a+b level 1.
    pub fn make_complete_bipartite(a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::Graph("complete bipartite sides must be non-empty".into()));
        }
        let vertices = (0..(a + b) as u32).map(|i| Vertex { id: i, level: u8::from(i as usize >= a) }).collect();
        let edges = (0..a as u32).flat_map(|i| (a as u32..(a + b) as u32).map(move |j| (i, j))).collect();
        Self::new(vertices, edges)
    }

    /// One level-0 vertex, no edges: the identity for the product.
    pub fn single_vertex() -> Self {
        Self::new(vec![Vertex { id: 0, level: 0 }], vec![]).unwrap()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.vertices.iter().map(|v| v.id)
    }

    /// Dense position of a vertex id in the id-sorted vertex list.
    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.vertices.binary_search_by_key(&id, |v| v.id).ok()
    }

    pub fn level(&self, id: u32) -> Option<u8> {
        self.index_of(id).map(|i| self.vertices[i].level)
    }

    pub fn level_count(&self, level: u8) -> usize {
        self.vertices.iter().filter(|v| v.level == level).count()
    }

    /// Sorted neighbour ids.
    pub fn neighbours(&self, id: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == id { Some(b) } else if b == id { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, id: u32) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == id || b == id).count()
    }

    /// Dense adjacency: `adj[i]` lists dense indices of neighbours, sorted.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            let (i, j) = (self.index_of(a).unwrap(), self.index_of(b).unwrap());
            adj[i].push(j);
            adj[j].push(i);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    pub fn component_count(&self) -> usize {
        let adj = self.adjacency();
        let mut seen = vec![false; adj.len()];
        let mut count = 0;
        for s in 0..adj.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    /// `n_e − n_v + n_cc`.
    pub fn circuit_rank(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertices.len()
    }

    /// Length of a shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let adj = self.adjacency();
        let n = adj.len();
        let mut best: Option<usize> = None;
        for s in 0..n {
            let mut dist = vec![usize::MAX; n];
            let mut parent = vec![usize::MAX; n];
            dist[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        q.push_back(v);
                    } else if parent[u] != v && parent[v] != u {
                        let len = dist[u] + dist[v] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    pub fn is_all_even_degree(&self) -> bool {
        self.adjacency().iter().all(|a| a.len() % 2 == 0)
    }

    /// Is every vertex of the same degree? Returns that degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let adj = self.adjacency();
        let d = adj.first()?.len();
        adj.iter().all(|a| a.len() == d).then_some(d)
    }

    /// Partition of the edges into closed trails. Walks start at the
    /// lowest vertex with unused edges and always take the unused edge to
    /// the lowest neighbour, stopping when stuck. Each trail is returned
    /// as its vertex sequence, start not repeated at the end.
    pub fn cycle_decomposition(&self) -> Result<Vec<Vec<u32>>> {
        let adj = self.adjacency();
        if let Some(i) = (0..adj.len()).find(|&i| adj[i].len() % 2 == 1) {
            return Err(Error::Graph(format!("vertex {} has odd degree {}", self.vertices[i].id, adj[i].len())));
        }
        let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut left: Vec<usize> = adj.iter().map(Vec::len).collect();
        let mut trails = Vec::new();
        while let Some(start) = (0..adj.len()).find(|&i| left[i] > 0) {
            let mut trail = vec![self.vertices[start].id];
            let mut u = start;
            loop {
                let next = adj[u].iter().copied().find(|&v| !used.contains(&(u.min(v), u.max(v))));
                let Some(v) = next else { break };
                used.insert((u.min(v), u.max(v)));
                left[u] -= 1;
                left[v] -= 1;
                u = v;
                trail.push(self.vertices[v].id);
            }
            debug_assert_eq!(u, start);
            trail.pop();
            trails.push(trail);
        }
        Ok(trails)
    }

    /// Vertices of `other` get ids shifted by `max id + 1`; returns the shift.
    pub fn disjoint_union(&self, other: &LevelledGraph) -> (LevelledGraph, u32) {
        let shift = self.vertices.last().map_or(0, |v| v.id + 1);
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().map(|v| Vertex { id: v.id + shift, level: v.level }));
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(a, b)| (a + shift, b + shift)));
        (LevelledGraph::new(vertices, edges).expect("union of valid graphs"), shift)
    }

    /// Merge `remove` into `keep`. Parallel edges are merged and reported
    /// in the record.
    pub fn glue(&self, keep: u32, remove: u32) -> Result<(LevelledGraph, GluingRecord)> {
        let (lk, lr) = match (self.level(keep), self.level(remove)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Graph(format!("unknown vertex in glue({keep}, {remove})"))),
        };
        if keep == remove {
            return Err(Error::Graph("cannot glue a vertex to itself".into()));
        }
        if lk != lr {
            return Err(Error::Graph(format!("glue of vertices at levels {lk} and {lr}")));
        }
        let nk = self.neighbours(keep);
        let moved = self.neighbours(remove);
        if moved.contains(&keep) {
            return Err(Error::Graph(format!("vertices {keep} and {remove} are adjacent")));
        }
        let merged: Vec<u32> = moved.iter().copied().filter(|v| nk.contains(v)).collect();
        let vertices = self.vertices.iter().copied().filter(|v| v.id != remove).collect();
        let mut edges = BTreeSet::new();
        for &(a, b) in &self.edges {
            let a = if a == remove { keep } else { a };
            let b = if b == remove { keep } else { b };
            edges.insert((a.min(b), a.max(b)));
        }
        let g = LevelledGraph::new(vertices, edges.into_iter().collect())?;
        Ok((g, GluingRecord { kept: keep, removed: remove, level: lk, moved, merged }))
    }

    /// Split `v`: a fresh vertex (next unused id) takes over `moved_edges`.
    pub fn unglue(&self, v: u32, moved_edges: &[(u32, u32)]) -> Result<(LevelledGraph, u32)> {
        let fresh = self.vertices.last().map_or(0, |x| x.id + 1);
        let mut targets = Vec::new();
        for &(a, b) in moved_edges {
            let other = if a == v { b } else if b == v { a } else {
                return Err(Error::Graph(format!("edge ({a},{b}) is not incident to {v}")));
            };
            if !self.edges.contains(&(a.min(b), a.max(b))) {
                return Err(Error::Graph(format!("edge ({a},{b}) not in graph")));
            }
            targets.push(other);
        }
        Ok((self.split_vertex(v, fresh, &targets, &[])?, fresh))
    }

    /// Undo a gluing exactly, restoring the removed id.
    pub fn unglue_record(&self, rec: &GluingRecord) -> Result<LevelledGraph> {
        if self.index_of(rec.removed).is_some() {
            return Err(Error::Graph(format!("vertex {} already present", rec.removed)));
        }
        let only_moved: Vec<u32> = rec.moved.iter().copied().filter(|x| !rec.merged.contains(x)).collect();
        self.split_vertex(rec.kept, rec.removed, &only_moved, &rec.merged)
    }

    fn split_vertex(&self, v: u32, fresh: u32, take: &[u32], share: &[u32]) -> Result<LevelledGraph> {
        let level = self.level(v).ok_or_else(|| Error::Graph(format!("unknown vertex {v}")))?;
        let mut vertices = self.vertices.clone();
        vertices.push(Vertex { id: fresh, level });
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for &(a, b) in &self.edges {
            let other = if a == v { Some(b) } else if b == v { Some(a) } else { None };
            match other {
                Some(o) if take.contains(&o) => edges.push((o.min(fresh), o.max(fresh))),
                _ => edges.push((a, b)),
            }
        }
        for &o in share {
            edges.push((o.min(fresh), o.max(fresh)));
        }
        LevelledGraph::new(vertices, edges)
    }

    /// Renumber vertices 0..n in id order.
    pub fn relabel_dense(&self) -> LevelledGraph {
        let vertices = self.vertices.iter().enumerate().map(|(i, v)| Vertex { id: i as u32, level: v.level }).collect();
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| (self.index_of(a).unwrap() as u32, self.index_of(b).unwrap() as u32))
            .collect();
        LevelledGraph::new(vertices, edges).unwrap()
    }

    /// Parse a generator shorthand: `cycle:L`, `fig8`, `kbip:A,B`.
    pub fn from_shorthand(s: &str) -> Result<LevelledGraph> {
        let bad = || Error::Parse(format!("unknown graph shorthand {s:?}"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        if s == "fig8" {
            return Ok(Self::make_figure_eight());
        }
        if let Some(rest) = s.strip_prefix("cycle:") {
            return Self::make_cycle(num(rest)?);
        }
        if let Some(rest) = s.strip_prefix("kbip:") {
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            return Self::make_complete_bipartite(num(a)?, num(b)?);
        }
        Err(bad())
    }

    pub fn from_json(text: &str) -> Result<LevelledGraph> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }
}
