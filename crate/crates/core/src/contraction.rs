//! Edge contraction of simplex graphs and codes on contracted graphs.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::code::{colour_subsets, CssCode, Family, Side};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::product::SimplexGraph;
use crate::subgraph::{maximal_components, maximal_subgraphs, rainbow_two, Kind, Subgraph};

/// A simplex graph with the edges of some colours contracted. Vertex
/// classes are the components of the removed colours in the base graph.
#[derive(Clone, Debug)]
pub struct ContractedGraph {
    base: SimplexGraph,
    removed: Vec<usize>,
    vertex_map: Vec<u32>,
    count: usize,
    edges: Vec<(u32, u32, u8)>,
}

/// Contracts every `colour` edge of `g`.
pub fn contract(g: &SimplexGraph, colour: usize) -> Result<ContractedGraph> {
    ContractedGraph::from_base(g.clone(), &[colour])
}

impl ContractedGraph {
    pub fn from_base(base: SimplexGraph, colours: &[usize]) -> Result<Self> {
        let mut removed: Vec<usize> = colours.to_vec();
        removed.sort_unstable();
        let before = removed.len();
        removed.dedup();
        if removed.len() != before {
            return Err(Error::Contraction("colour listed twice".into()));
        }
        if let Some(c) = removed.iter().find(|&&c| c > base.dim()) {
            return Err(Error::Contraction(format!("colour {c} not present (D = {})", base.dim())));
        }
        let (vertex_map, count) = maximal_components(&base, &removed);
        let mut set = BTreeSet::new();
        for (u, v, c) in base.edges() {
            if removed.contains(&(c as usize)) {
                continue;
            }
            let (a, b) = (vertex_map[u as usize], vertex_map[v as usize]);
            if a != b {
                set.insert((a.min(b), a.max(b), c));
            }
        }
        Ok(ContractedGraph { base, removed, vertex_map, count, edges: set.into_iter().collect() })
    }

    /// Contracts one more colour.
    pub fn contract(&self, colour: usize) -> Result<ContractedGraph> {
        if self.removed.contains(&colour) {
            return Err(Error::Contraction(format!("colour {colour} already contracted")));
        }
        let mut colours = self.removed.clone();
        colours.push(colour);
        ContractedGraph::from_base(self.base.clone(), &colours)
    }

    pub fn base(&self) -> &SimplexGraph {
        &self.base
    }

    pub fn removed_colours(&self) -> &[usize] {
        &self.removed
    }

    pub fn vertex_map(&self) -> &[u32] {
        &self.vertex_map
    }

    pub fn vertex_count(&self) -> usize {
        self.count
    }

    /// Distinct coloured edges between different classes, sorted.
    pub fn edges(&self) -> &[(u32, u32, u8)] {
        &self.edges
    }

    /// Set image of a base support.
    pub fn image(&self, support: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = support.iter().map(|&f| self.vertex_map[f as usize]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// One stabilizer family on a contracted graph: images of base
/// subgraphs of the given colours (struck colours included).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub side: Side,
    pub colours: Vec<usize>,
    pub kind: Kind,
}

pub fn parse_family_specs(text: &str) -> Result<Vec<FamilySpec>> {
    let specs: Vec<FamilySpec> = serde_json::from_str(text)?;
    Ok(specs)
}

/// Families where a struck `c₀` appears only next to `c₁` and a struck
/// `c_D` only next to `c_{D−1}`: x-colour sets on the X side, z-colour
/// sets on the Z side, all maximal.
pub fn default_families(dim: usize, removed: &[usize], x: usize, z: usize) -> Vec<FamilySpec> {
    let ok = |s: &[usize]| {
        let has = |c: usize| s.contains(&c);
        let struck = |c: usize| removed.contains(&c) && has(c);
        !(struck(0) && !has(1)) && !(struck(dim) && !has(dim - 1))
    };
    let mut out = Vec::new();
    for (side, size) in [(Side::X, x), (Side::Z, z)] {
        for s in colour_subsets(dim, size) {
            if ok(&s) {
                out.push(FamilySpec { side, colours: s, kind: Kind::Maximal });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractibilityReport {
    pub colour: usize,
    pub passed: bool,
    /// `(pair, size)` of the first rainbow support per pair whose size is
    /// not a multiple of four.
    pub violations: Vec<((usize, usize), usize)>,
}

/// Every generating 2-rainbow support that uses `colour` must have size
/// divisible by four.
pub fn contractibility_check(g: &SimplexGraph, colour: usize) -> Result<ContractibilityReport> {
    if colour > g.dim() {
        return Err(Error::Precondition(format!("colour {colour} exceeds D = {}", g.dim())));
    }
    let mut violations = Vec::new();
    for other in (0..=g.dim()).filter(|&c| c != colour) {
        let pair = (colour.min(other), colour.max(other));
        if let Some(s) = rainbow_two(g, pair.0, pair.1)?.iter().find(|s| s.len() % 4 != 0) {
            violations.push((pair, s.len()));
        }
    }
    Ok(ContractibilityReport { colour, passed: violations.is_empty(), violations })
}

/// Code on a contracted graph whose rows are images of the requested base
/// families. Rejects non-commuting choices.
pub fn contracted_code(cg: &ContractedGraph, families: &[FamilySpec]) -> Result<CssCode> {
    let base = cg.base();
    let n = cg.vertex_count();
    let mut sides = [BitMatrix::empty(n), BitMatrix::empty(n)];
    let mut provenance = Vec::new();
    for spec in families {
        let mut colours = spec.colours.clone();
        colours.sort_unstable();
        colours.dedup();
        let subs: Vec<Subgraph> = match spec.kind {
            Kind::Maximal => maximal_subgraphs(base, &colours)?,
            Kind::Rainbow if colours.len() == 2 => rainbow_two(base, colours[0], colours[1])?,
            Kind::Rainbow => {
                return Err(Error::Unsupported("rainbow images with more than two colours".into()));
            }
        };
        let m = &mut sides[if spec.side == Side::X { 0 } else { 1 }];
        let start = m.rows();
        for s in &subs {
            let img: Vec<usize> = cg.image(&s.support).into_iter().map(|v| v as usize).collect();
            m.push_support(&img);
        }
        provenance.push(Family { side: spec.side, kind: spec.kind, colours, start, len: subs.len() });
    }
    let [hx, hz] = sides;
    CssCode::with_provenance(hx, hz, None, provenance)
}
