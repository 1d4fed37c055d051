//! Ribbon graphs (rotation systems) and their perfect matching diagrams.
//!
//! Half-edges are numbered `0..2E`. Each vertex lists its half-edges in
//! counterclockwise order; each edge pairs two half-edges.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pd::{MatchTuple, PmDiagram, VirtualTuple};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RibbonError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bad JSON graph: {0}")]
    Json(String),
    #[error("half-edge {half_edge} appears at {count} vertices")]
    HalfEdgeVertices { half_edge: u32, count: usize },
    #[error("half-edge {half_edge} appears in {count} edges")]
    HalfEdgeEdges { half_edge: u32, count: usize },
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    NotTrivalent { vertex: usize, degree: usize },
    #[error("matched half-edges {a} and {b} do not form an edge")]
    MatchNotEdge { a: u32, b: u32 },
    #[error("vertex {vertex} meets {count} matching edges")]
    MatchingCover { vertex: usize, count: usize },
    #[error("matching edge {edge} is a loop")]
    MatchingLoop { edge: usize },
    #[error("graph has no perfect matching attached")]
    Unmatched,
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("J_m needs an odd m >= 3, got {0}")]
    BadJ(u32),
}

/// Rotation system with an optional perfect matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonGraph {
    rotations: Vec<Vec<usize>>,
    edges: Vec<[usize; 2]>,
    matching: Option<Vec<usize>>,
    free_loops: u32,
    vertex_of: Vec<usize>,
    edge_of: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    vertices: Vec<Vec<u32>>,
    edges: Vec<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matching: Option<Vec<[u32; 2]>>,
    #[serde(default, skip_serializing_if = "is_zero")]
    loops: u32,
}

fn is_zero(x: &u32) -> bool {
    *x == 0
}

/// How [`RibbonGraph::immerse_with`] draws the contracted graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ImmersionMethod {
    /// Inserts arcs one at a time along shortest routes through the faces
    /// of the drawing so far. Planar rotations need no crossings.
    #[default]
    Planarize,
    /// Contracted vertices on a line, every arc drawn above it.
    Spine,
}

impl RibbonGraph {
    /// Builds a ribbon graph from named half-edges.
    pub fn from_named(rotations: &[Vec<u32>], edges: &[[u32; 2]]) -> Result<Self, RibbonError> {
        let index = dense_names(rotations);
        let mut vertex_count: BTreeMap<u32, usize> = BTreeMap::new();
        for rot in rotations {
            for &h in rot {
                *vertex_count.entry(h).or_default() += 1;
            }
        }
        if let Some((&h, &count)) = vertex_count.iter().find(|(_, &c)| c != 1) {
            return Err(RibbonError::HalfEdgeVertices { half_edge: h, count });
        }
        let mut edge_count: BTreeMap<u32, usize> = BTreeMap::new();
        for e in edges {
            for &h in e {
                *edge_count.entry(h).or_default() += 1;
            }
        }
        for &h in index.keys() {
            let count = edge_count.get(&h).copied().unwrap_or(0);
            if count != 1 {
                return Err(RibbonError::HalfEdgeEdges { half_edge: h, count });
            }
        }
        if let Some(&h) = edge_count.keys().find(|h| !index.contains_key(h)) {
            return Err(RibbonError::HalfEdgeVertices { half_edge: h, count: 0 });
        }
        let rotations = rotations.iter().map(|r| r.iter().map(|h| index[h]).collect()).collect();
        let edges = edges.iter().map(|[a, b]| [index[a], index[b]]).collect();
        Ok(Self::from_parts(rotations, edges))
    }

    /// Trusted constructor: every half-edge `0..2E` in one vertex and one edge.
    fn from_parts(rotations: Vec<Vec<usize>>, edges: Vec<[usize; 2]>) -> Self {
        let h = edges.len() * 2;
        let mut vertex_of = vec![usize::MAX; h];
        for (v, rot) in rotations.iter().enumerate() {
            for &x in rot {
                vertex_of[x] = v;
            }
        }
        let mut edge_of = vec![usize::MAX; h];
        for (e, pair) in edges.iter().enumerate() {
            edge_of[pair[0]] = e;
            edge_of[pair[1]] = e;
        }
        debug_assert!(vertex_of.iter().chain(&edge_of).all(|&x| x != usize::MAX));
        Self {
            rotations,
            edges,
            matching: None,
            free_loops: 0,
            vertex_of,
            edge_of,
        }
    }

    /// Straight-line drawing: vertex positions and an edge list; rotations
    /// are read off the edge directions. Edge `i` owns half-edges `2i`, `2i+1`.
    pub fn from_drawing(points: &[(f64, f64)], edges: &[(usize, usize)]) -> Self {
        let mut around: Vec<Vec<(f64, usize)>> = vec![Vec::new(); points.len()];
        for (i, &(a, b)) in edges.iter().enumerate() {
            let (pa, pb) = (points[a], points[b]);
            around[a].push(((pb.1 - pa.1).atan2(pb.0 - pa.0), 2 * i));
            around[b].push(((pa.1 - pb.1).atan2(pa.0 - pb.0), 2 * i + 1));
        }
        let rotations = around
            .into_iter()
            .map(|mut hs| {
                hs.sort_by(|x, y| x.0.total_cmp(&y.0));
                hs.into_iter().map(|(_, h)| h).collect()
            })
            .collect();
        let edges = (0..edges.len()).map(|i| [2 * i, 2 * i + 1]).collect();
        Self::from_parts(rotations, edges)
    }

    pub fn with_free_loops(mut self, loops: u32) -> Self {
        self.free_loops = loops;
        self
    }

    /// Attaches a perfect matching given by edge indices.
    pub fn with_matching(mut self, edges: &[usize]) -> Result<Self, RibbonError> {
        let mut cover = vec![0usize; self.num_vertices()];
        let mut sorted: Vec<usize> = edges.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &e in &sorted {
            let &[a, b] = self.edges.get(e).ok_or(RibbonError::EdgeOutOfRange(e))?;
            let (u, w) = (self.vertex_of[a], self.vertex_of[b]);
            if u == w {
                return Err(RibbonError::MatchingLoop { edge: e });
            }
            cover[u] += 1;
            cover[w] += 1;
        }
        if let Some((vertex, &count)) = cover.iter().enumerate().find(|(_, &c)| c != 1) {
            return Err(RibbonError::MatchingCover { vertex, count });
        }
        self.matching = Some(sorted);
        Ok(self)
    }

    /// Attaches a matching given by half-edge pairs.
    pub fn with_matching_pairs(self, pairs: &[[usize; 2]]) -> Result<Self, RibbonError> {
        let mut edges = Vec::with_capacity(pairs.len());
        for &[a, b] in pairs {
            let e = self.edge_of.get(a).copied().filter(|_| b < self.num_half_edges());
            match e {
                Some(e) if self.edges[e].contains(&b) && a != b => edges.push(e),
                _ => {
                    return Err(RibbonError::MatchNotEdge {
                        a: a as u32,
                        b: b as u32,
                    })
                }
            }
        }
        self.with_matching(&edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.rotations.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.edge_of.len()
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotations[v]
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.vertex_of[h]
    }

    pub fn edge_of(&self, h: usize) -> usize {
        self.edge_of[h]
    }

    pub fn mate(&self, h: usize) -> usize {
        let [a, b] = self.edges[self.edge_of[h]];
        if a == h {
            b
        } else {
            a
        }
    }

    /// Endpoints of edge `e`.
    pub fn ends(&self, e: usize) -> (usize, usize) {
        let [a, b] = self.edges[e];
        (self.vertex_of[a], self.vertex_of[b])
    }

    pub fn matching(&self) -> Option<&[usize]> {
        self.matching.as_deref()
    }

    pub fn is_matching_edge(&self, e: usize) -> bool {
        self.matching.as_ref().is_some_and(|m| m.binary_search(&e).is_ok())
    }

    pub fn free_loops(&self) -> u32 {
        self.free_loops
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotations[v].len()
    }

    pub fn check_trivalent(&self) -> Result<(), RibbonError> {
        match (0..self.num_vertices()).find(|&v| self.degree(v) != 3) {
            Some(vertex) => Err(RibbonError::NotTrivalent {
                vertex,
                degree: self.degree(vertex),
            }),
            None => Ok(()),
        }
    }

    /// Next half-edge counterclockwise at the same vertex.
    pub fn next_ccw(&self, h: usize) -> usize {
        let rot = &self.rotations[self.vertex_of[h]];
        let i = rot.iter().position(|&x| x == h).unwrap();
        rot[(i + 1) % rot.len()]
    }

    /// Vertex-disjoint pieces, as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.num_vertices()];
        let mut out = Vec::new();
        for start in 0..self.num_vertices() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &h in &self.rotations[v] {
                    let w = self.vertex_of[self.mate(h)];
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Face boundaries as cycles of half-edges, each traversed by leaving
    /// along a half-edge and turning to the next counterclockwise one. The
    /// face lies to the right of each half-edge on its boundary.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.num_half_edges()];
        let mut out = Vec::new();
        for start in 0..self.num_half_edges() {
            if seen[start] {
                continue;
            }
            let mut face = Vec::new();
            let mut h = start;
            while !seen[h] {
                seen[h] = true;
                face.push(h);
                h = self.next_ccw(self.mate(h));
            }
            out.push(face);
        }
        out
    }

    /// Whether every component has Euler characteristic 2.
    pub fn is_planar(&self) -> bool {
        let faces = self.faces();
        self.components().iter().all(|comp| {
            let vs: BTreeSet<usize> = comp.iter().copied().collect();
            let e = self
                .edges
                .iter()
                .filter(|&&[a, _]| vs.contains(&self.vertex_of[a]))
                .count();
            let f = faces
                .iter()
                .filter(|f| vs.contains(&self.vertex_of[f[0]]))
                .count()
                .max(1);
            vs.len() as isize - e as isize + f as isize == 2
        })
    }

    /// All perfect matchings as sorted edge lists, in lexicographic order.
    pub fn matchings(&self) -> Vec<Vec<usize>> {
        fn go(g: &RibbonGraph, covered: &mut [bool], chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let Some(v) = covered.iter().position(|&c| !c) else {
                let mut m = chosen.clone();
                m.sort_unstable();
                out.push(m);
                return;
            };
            let mut options: Vec<usize> = g.rotations[v]
                .iter()
                .map(|&h| g.edge_of[h])
                .filter(|&e| {
                    let (a, b) = g.ends(e);
                    a != b && !covered[if a == v { b } else { a }]
                })
                .collect();
            options.sort_unstable();
            options.dedup();
            for e in options {
                let (a, b) = g.ends(e);
                covered[a] = true;
                covered[b] = true;
                chosen.push(e);
                go(g, covered, chosen, out);
                chosen.pop();
                covered[a] = false;
                covered[b] = false;
            }
        }
        let mut out = Vec::new();
        if self.num_vertices() == 0 {
            return vec![Vec::new()];
        }
        go(self, &mut vec![false; self.num_vertices()], &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// Replaces every vertex by a cycle along its rotation; the original
    /// edges become the perfect matching.
    pub fn blowup(&self) -> RibbonGraph {
        // new vertex t has half-edges 3t (outward), 3t+1 (next), 3t+2 (prev)
        let mut first = Vec::with_capacity(self.num_vertices());
        let mut slot_of = vec![0usize; self.num_half_edges()];
        let mut t = 0;
        let mut loops = self.free_loops;
        for rot in &self.rotations {
            first.push(t);
            if rot.is_empty() {
                loops += 1;
            }
            for &h in rot {
                slot_of[h] = t;
                t += 1;
            }
        }
        let rotations: Vec<Vec<usize>> = (0..t).map(|t| vec![3 * t, 3 * t + 1, 3 * t + 2]).collect();
        let mut edges: Vec<[usize; 2]> = self
            .edges
            .iter()
            .map(|&[a, b]| [3 * slot_of[a], 3 * slot_of[b]])
            .collect();
        let matching: Vec<usize> = (0..edges.len()).collect();
        for (v, rot) in self.rotations.iter().enumerate() {
            let k = rot.len();
            for j in 0..k {
                let here = first[v] + j;
                let next = first[v] + (j + 1) % k;
                edges.push([3 * here + 1, 3 * next + 2]);
            }
        }
        let mut g = Self::from_parts(rotations, edges).with_free_loops(loops);
        g.matching = Some(matching);
        g
    }

    /// Builds the matched ribbon graph read off a diagram: tuple `M[a,b,c,d]`
    /// becomes a matching edge whose ends see `a, b` and `c, d` counterclockwise.
    /// Virtual crossings carry no ribbon structure and are dropped.
    pub fn from_diagram(d: &PmDiagram) -> RibbonGraph {
        let l = d.num_matchings();
        let mut rotations = Vec::with_capacity(2 * l);
        let mut edges = Vec::with_capacity(3 * l);
        let mut slots: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, m) in d.matchings.iter().enumerate() {
            let base = 6 * i;
            rotations.push(vec![base, base + 1, base + 2]);
            rotations.push(vec![base + 3, base + 4, base + 5]);
            edges.push([base, base + 3]);
            for (k, &label) in m.iter().enumerate() {
                let h = base + [1, 2, 4, 5][k];
                slots.entry(label).or_default().push(h);
            }
        }
        for hs in slots.values() {
            edges.push([hs[0], hs[1]]);
        }
        let mut g = Self::from_parts(rotations, edges).with_free_loops(d.loops);
        g.matching = Some((0..l).collect());
        g
    }

    pub fn immerse(&self) -> Result<PmDiagram, RibbonError> {
        self.immerse_with(ImmersionMethod::default())
    }

    pub fn immerse_with(&self, method: ImmersionMethod) -> Result<PmDiagram, RibbonError> {
        self.check_trivalent()?;
        let c = Contracted::new(self)?;
        let crossings = match method {
            ImmersionMethod::Planarize => c.planarize(),
            ImmersionMethod::Spine => c.spine(),
        };
        Ok(c.diagram(crossings, self.free_loops))
    }

    /// Parses the text or JSON graph format.
    pub fn parse(text: &str) -> Result<Self, RibbonError> {
        if text.trim_start().starts_with('{') {
            return Self::from_json(text);
        }
        let mut vertices: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        let mut edges = Vec::new();
        let mut matches = Vec::new();
        let mut loops = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| RibbonError::Parse { line: i + 1, msg };
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| err(format!("expected ':' in {line:?}")))?;
            let nums = |s: &str| -> Result<Vec<u32>, RibbonError> {
                s.split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|_| err(format!("bad half-edge {t:?}"))))
                    .collect()
            };
            let pair = |s: &str| -> Result<[u32; 2], RibbonError> {
                let v = nums(s)?;
                <[u32; 2]>::try_from(v).map_err(|v| err(format!("expected two half-edges, got {}", v.len())))
            };
            let mut words = head.split_whitespace();
            match (words.next(), words.next(), words.next()) {
                (Some("vertex"), Some(id), None) => {
                    let id: usize = id.parse().map_err(|_| err(format!("bad vertex id {id:?}")))?;
                    if vertices.insert(id, nums(rest)?).is_some() {
                        return Err(err(format!("vertex {id} listed twice")));
                    }
                }
                (Some("edge"), None, None) => edges.push(pair(rest)?),
                (Some("match"), None, None) => matches.push(pair(rest)?),
                (Some("loops"), None, None) => {
                    loops = rest
                        .trim()
                        .parse()
                        .map_err(|_| err(format!("bad loop count {rest:?}")))?
                }
                _ => return Err(err(format!("unknown line {line:?}"))),
            }
        }
        let rotations: Vec<Vec<u32>> = vertices.into_values().collect();
        Self::assemble(&rotations, &edges, (!matches.is_empty()).then_some(&matches[..]), loops)
    }

    fn assemble(
        rotations: &[Vec<u32>],
        edges: &[[u32; 2]],
        matches: Option<&[[u32; 2]]>,
        loops: u32,
    ) -> Result<Self, RibbonError> {
        let g = Self::from_named(rotations, edges)?.with_free_loops(loops);
        let Some(matches) = matches else { return Ok(g) };
        let index = dense_names(rotations);
        let mut pairs = Vec::with_capacity(matches.len());
        for &[a, b] in matches {
            match (index.get(&a), index.get(&b)) {
                (Some(&x), Some(&y)) => pairs.push([x, y]),
                _ => return Err(RibbonError::MatchNotEdge { a, b }),
            }
        }
        g.with_matching_pairs(&pairs)
    }

    pub fn from_json(text: &str) -> Result<Self, RibbonError> {
        let j: JsonGraph = serde_json::from_str(text).map_err(|e| RibbonError::Json(e.to_string()))?;
        Self::assemble(&j.vertices, &j.edges, j.matching.as_deref(), j.loops)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = JsonGraph {
            vertices: self
                .rotations
                .iter()
                .map(|r| r.iter().map(|&h| h as u32).collect())
                .collect(),
            edges: self.edges.iter().map(|&[a, b]| [a as u32, b as u32]).collect(),
            matching: self.matching.as_ref().map(|m| {
                m.iter()
                    .map(|&e| {
                        let [a, b] = self.edges[e];
                        [a as u32, b as u32]
                    })
                    .collect()
            }),
            loops: self.free_loops,
        };
        serde_json::to_value(j).expect("graph serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, rot) in self.rotations.iter().enumerate() {
            let hs: Vec<String> = rot.iter().map(|h| h.to_string()).collect();
            let _ = writeln!(out, "vertex {v}: {}", hs.join(" "));
        }
        for &[a, b] in &self.edges {
            let _ = writeln!(out, "edge: {a} {b}");
        }
        for &e in self.matching.iter().flatten() {
            let [a, b] = self.edges[e];
            let _ = writeln!(out, "match: {a} {b}");
        }
        if self.free_loops > 0 {
            let _ = writeln!(out, "loops: {}", self.free_loops);
        }
        out
    }
}

/// Half-edge names to dense ids: kept when they are already `0..H`,
/// otherwise numbered by first appearance.
fn dense_names(rotations: &[Vec<u32>]) -> BTreeMap<u32, usize> {
    let names: BTreeSet<u32> = rotations.iter().flatten().copied().collect();
    if names.iter().enumerate().all(|(i, &h)| i as u32 == h) {
        return names.into_iter().map(|h| (h, h as usize)).collect();
    }
    let mut index = BTreeMap::new();
    for &h in rotations.iter().flatten() {
        let next = index.len();
        index.entry(h).or_insert(next);
    }
    index
}

/// Matching edges contracted to 4-valent points, arcs labelled along the
/// cycles of the complement of the matching.
struct Contracted {
    /// Per site, half-edges `[p, q, r, s]` counterclockwise.
    slots: Vec<[usize; 4]>,
    /// Per half-edge, the arc index of its edge (non-matching only).
    arc_of: Vec<usize>,
    /// Per arc, its two half-edges.
    arcs: Vec<[usize; 2]>,
}

impl Contracted {
    fn new(g: &RibbonGraph) -> Result<Self, RibbonError> {
        let matching = g.matching.as_ref().ok_or(RibbonError::Unmatched)?;
        let mut sites: Vec<(usize, usize)> = matching
            .iter()
            .map(|&e| {
                let (u, w) = g.ends(e);
                (u.min(w), e)
            })
            .collect();
        sites.sort_unstable();
        let h_total = g.num_half_edges();
        let slots: Vec<[usize; 4]> = sites
            .iter()
            .map(|&(u, e)| {
                let [a, b] = g.edges[e];
                let (hu, hw) = if g.vertex_of[a] == u { (a, b) } else { (b, a) };
                let p = g.next_ccw(hu);
                let q = g.next_ccw(p);
                let r = g.next_ccw(hw);
                let s = g.next_ccw(r);
                [p, q, r, s]
            })
            .collect();

        // label arcs consecutively along each cycle of G minus M
        let mut arc_of = vec![usize::MAX; h_total];
        let mut arcs = Vec::new();
        let other_free = |x: usize| -> usize {
            // the non-matching half-edge at x's vertex other than x
            *g.rotations[g.vertex_of[x]]
                .iter()
                .find(|&&y| y != x && !g.is_matching_edge(g.edge_of[y]))
                .unwrap()
        };
        for start in slots.iter().flatten().copied() {
            if arc_of[start] != usize::MAX {
                continue;
            }
            let mut h = start;
            while arc_of[h] == usize::MAX {
                let m = g.mate(h);
                let id = arcs.len();
                arc_of[h] = id;
                arc_of[m] = id;
                arcs.push([h, m]);
                h = other_free(m);
            }
        }
        Ok(Self { slots, arc_of, arcs })
    }

    fn diagram(&self, crossings: Vec<(usize, usize)>, loops: u32) -> PmDiagram {
        let label = |h: usize| self.arc_of[h] as u32 + 1;
        let matchings: Vec<MatchTuple> = self
            .slots
            .iter()
            .map(|&[p, q, r, s]| [label(p), label(q), label(r), label(s)])
            .collect();
        // crossings between the same two arcs cancel in pairs
        let mut parity: BTreeMap<(u32, u32), bool> = BTreeMap::new();
        for (x, y) in crossings {
            let (a, b) = (x as u32 + 1, y as u32 + 1);
            let key = (a.min(b), a.max(b));
            let odd = parity.entry(key).or_insert(false);
            *odd = !*odd;
        }
        let virtuals: Vec<VirtualTuple> = parity
            .into_iter()
            .filter(|&(_, odd)| odd)
            .map(|((a, b), _)| [a, b])
            .collect();
        PmDiagram::new(matchings, virtuals).with_loops(loops)
    }

    /// One-page drawing: site `i` occupies positions `4i..4i+3` holding
    /// `s, r, q, p` from left to right; arcs are semicircles above the line.
    fn spine(&self) -> Vec<(usize, usize)> {
        let mut pos = vec![0usize; self.arc_of.len()];
        for (i, &[p, q, r, s]) in self.slots.iter().enumerate() {
            for (k, h) in [s, r, q, p].into_iter().enumerate() {
                pos[h] = 4 * i + k;
            }
        }
        let spans: Vec<(usize, usize)> = self
            .arcs
            .iter()
            .map(|&[a, b]| (pos[a].min(pos[b]), pos[a].max(pos[b])))
            .collect();
        let mut out = Vec::new();
        for i in 0..spans.len() {
            for j in i + 1..spans.len() {
                let ((a1, a2), (b1, b2)) = (spans[i], spans[j]);
                if (a1 < b1 && b1 < a2 && a2 < b2) || (b1 < a1 && a1 < b2 && b2 < a2) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn planarize(&self) -> Vec<(usize, usize)> {
        Planarizer::new(self).run()
    }
}

/// Incremental planar drawing of the contracted graph. Crossing points
/// become extra 4-valent vertices.
struct Planarizer<'a> {
    c: &'a Contracted,
    /// Per vertex, its full counterclockwise dart order.
    rot: Vec<Vec<usize>>,
    vert: Vec<usize>,
    mate: Vec<usize>,
    arc: Vec<usize>,
    present: Vec<bool>,
    crossings: Vec<(usize, usize)>,
}

impl<'a> Planarizer<'a> {
    fn new(c: &'a Contracted) -> Self {
        let n = c.arc_of.len();
        let mut vert = vec![usize::MAX; n];
        let mut mate = vec![usize::MAX; n];
        let mut arc = vec![usize::MAX; n];
        for (i, slot) in c.slots.iter().enumerate() {
            for &h in slot {
                vert[h] = i;
            }
        }
        for (id, &[a, b]) in c.arcs.iter().enumerate() {
            mate[a] = b;
            mate[b] = a;
            arc[a] = id;
            arc[b] = id;
        }
        Self {
            c,
            rot: c.slots.iter().map(|s| s.to_vec()).collect(),
            vert,
            mate,
            arc,
            present: vec![false; n],
            crossings: Vec::new(),
        }
    }

    fn next_present(&self, h: usize) -> Option<usize> {
        let rot = &self.rot[self.vert[h]];
        let i = rot.iter().position(|&x| x == h).unwrap();
        (1..=rot.len())
            .map(|k| rot[(i + k) % rot.len()])
            .find(|&x| x != h && self.present[x])
            .or_else(|| self.present[h].then_some(h))
    }

    /// Face index of every present dart.
    fn faces(&self) -> Vec<usize> {
        let mut face = vec![usize::MAX; self.vert.len()];
        let mut count = 0;
        for start in 0..self.vert.len() {
            if !self.present[start] || face[start] != usize::MAX {
                continue;
            }
            let mut h = start;
            while face[h] == usize::MAX {
                face[h] = count;
                h = self.next_present(self.mate[h]).unwrap();
            }
            count += 1;
        }
        face
    }

    /// Face of the corner a new dart `h` would be inserted into.
    fn corner(&self, h: usize, face: &[usize]) -> Option<usize> {
        let rot = &self.rot[self.vert[h]];
        let i = rot.iter().position(|&x| x == h).unwrap();
        (1..rot.len())
            .map(|k| rot[(i + k) % rot.len()])
            .find(|&x| self.present[x])
            .map(|b| face[b])
    }

    /// Shortest sequence of darts to cross, each from its own face to its mate's.
    fn route(&self, from: usize, to: usize, face: &[usize]) -> Option<Vec<usize>> {
        if from == to {
            return Some(Vec::new());
        }
        let faces = face.iter().filter(|&&f| f != usize::MAX).max().map_or(0, |m| m + 1);
        let mut via: Vec<Option<(usize, usize)>> = vec![None; faces];
        let mut seen = vec![false; faces];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        let mut by_face: Vec<Vec<usize>> = vec![Vec::new(); faces];
        for x in 0..face.len() {
            if self.present[x] {
                by_face[face[x]].push(x);
            }
        }
        while let Some(f) = queue.pop_front() {
            if f == to {
                break;
            }
            for &x in &by_face[f] {
                let g = face[self.mate[x]];
                if !seen[g] {
                    seen[g] = true;
                    via[g] = Some((f, x));
                    queue.push_back(g);
                }
            }
        }
        if !seen[to] {
            return None;
        }
        let mut path = Vec::new();
        let mut f = to;
        while let Some((prev, x)) = via[f] {
            path.push(x);
            f = prev;
        }
        path.reverse();
        Some(path)
    }

    fn cost(&self, id: usize, face: &[usize]) -> Option<usize> {
        let [a, b] = self.c.arcs[id];
        match (self.corner(a, face), self.corner(b, face)) {
            (Some(fa), Some(fb)) => self.route(fa, fb, face).map(|p| p.len()),
            _ => Some(0),
        }
    }

    fn insert(&mut self, id: usize, face: &[usize]) {
        let [a, b] = self.c.arcs[id];
        let path = match (self.corner(a, face), self.corner(b, face)) {
            (Some(fa), Some(fb)) => self.route(fa, fb, face).expect("faces are connected"),
            _ => Vec::new(),
        };
        let mut prev = a;
        for x in path {
            let y = self.mate[x];
            let base = self.vert.len();
            let (to_a, to_b, inc, out) = (base, base + 1, base + 2, base + 3);
            let dummy = self.rot.len();
            // faces lie to the right of their darts, so we enter from the
            // right of x and leave to its left
            self.rot.push(vec![to_b, out, to_a, inc]);
            for (d, m, l) in [
                (to_a, x, self.arc[x]),
                (to_b, y, self.arc[x]),
                (inc, prev, id),
                (out, usize::MAX, id),
            ] {
                self.vert.push(dummy);
                self.mate.push(m);
                self.arc.push(l);
                self.present.push(true);
                if m != usize::MAX {
                    self.mate[m] = d;
                }
            }
            self.crossings.push((self.arc[x], id));
            prev = out;
        }
        self.mate[prev] = b;
        self.mate[b] = prev;
        self.present[a] = true;
        self.present[b] = true;
    }

    fn run(mut self) -> Vec<(usize, usize)> {
        let mut remaining: BTreeSet<usize> = (0..self.c.arcs.len()).collect();
        while !remaining.is_empty() {
            let face = self.faces();
            let touches = |s: &Self, id: usize| {
                let [a, b] = s.c.arcs[id];
                s.rot[s.vert[a]].iter().chain(&s.rot[s.vert[b]]).any(|&x| s.present[x])
            };
            let anchored: Vec<usize> = remaining.iter().copied().filter(|&id| touches(&self, id)).collect();
            let pick = if anchored.is_empty() {
                // start a new component
                *remaining.iter().next().unwrap()
            } else {
                *anchored
                    .iter()
                    .min_by_key(|&&id| (self.cost(id, &face).unwrap_or(usize::MAX), id))
                    .unwrap()
            };
            self.insert(pick, &face);
            remaining.remove(&pick);
        }
        self.crossings
    }
}

/// Isaacs' flower snark `J_m` with the matching of the J3 code, for odd `m >= 3`.
///
/// Labels `1..3m` run around the outer cycle and `3m+1..4m` around the inner
/// one. Block `k` contributes `M[3k+5, 3k+6, 3k, 3k+1]` and
/// `M[3k+4, 3k+5, I(k-1), I(k)]` with outer labels read modulo `3m`.
pub fn j_family(m: u32) -> Result<PmDiagram, RibbonError> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(RibbonError::BadJ(m));
    }
    let outer = |x: i64| -> u32 { ((x - 1).rem_euclid(3 * m as i64) + 1) as u32 };
    let inner = |k: i64| -> u32 { 3 * m + 1 + k.rem_euclid(m as i64) as u32 };
    let mut matchings = Vec::with_capacity(2 * m as usize);
    for k in 0..m as i64 {
        matchings.push([outer(3 * k + 5), outer(3 * k + 6), outer(3 * k), outer(3 * k + 1)]);
        matchings.push([outer(3 * k + 4), outer(3 * k + 5), inner(k - 1), inner(k)]);
    }
    // arc 3k crosses arc 3k+3, cyclically
    let mut virtuals: Vec<VirtualTuple> = (1..=m)
        .map(|i| {
            let j = i % m + 1;
            [3 * i.min(j), 3 * i.max(j)]
        })
        .collect();
    virtuals.sort_unstable();
    Ok(PmDiagram::new(matchings, virtuals))
}

/// Standard drawings used across the tests and the bundled corpus.
pub mod examples {
    use super::RibbonGraph;

    /// Two vertices joined by three edges.
    pub fn theta() -> RibbonGraph {
        // planar rotation
        RibbonGraph::from_named(&[vec![0, 1, 2], vec![3, 5, 4]], &[[0, 3], [1, 4], [2, 5]])
            .expect("theta is well formed")
    }

    pub fn k4() -> RibbonGraph {
        let pts = [(0.0, 2.0), (-2.0, -1.0), (2.0, -1.0), (0.0, 0.0)];
        RibbonGraph::from_drawing(&pts, &[(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)])
    }

    /// Hexagon with alternating sides, plus its three long diagonals.
    pub fn k33() -> RibbonGraph {
        let pts: Vec<(f64, f64)> = (0..6)
            .map(|i| {
                let a = std::f64::consts::PI / 3.0 * i as f64 + 0.1;
                (a.cos(), a.sin())
            })
            .collect();
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3), (1, 4), (2, 5)];
        RibbonGraph::from_drawing(&pts, &edges)
    }

    /// Outer pentagon `0..5`, inner pentagram `5..10`, spokes `i -- i+5`.
    pub fn petersen() -> RibbonGraph {
        let mut pts = Vec::new();
        for r in [2.0, 1.0] {
            for i in 0..5 {
                let a = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * i as f64 / 5.0;
                pts.push((r * a.cos(), r * a.sin()));
            }
        }
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
        }
        for i in 0..5 {
            edges.push((i, i + 5));
        }
        for i in 0..5 {
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        RibbonGraph::from_drawing(&pts, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::corpus;
    use crate::invariants::{penrose, pk_bracket};

    fn poly(s: &str) -> crate::poly::IntPoly {
        s.parse().unwrap()
    }

    #[test]
    fn matching_counts() {
        assert_eq!(theta().matchings().len(), 3);
        assert_eq!(k4().matchings().len(), 3);
        assert_eq!(petersen().matchings().len(), 6);
        assert_eq!(k33().matchings().len(), 6);
    }

    #[test]
    fn matchings_are_perfect_and_sorted() {
        let g = petersen();
        let ms = g.matchings();
        let mut sorted = ms.clone();
        sorted.sort();
        assert_eq!(ms, sorted);
        for m in ms {
            assert!(g.clone().with_matching(&m).is_ok());
        }
    }

    #[test]
    fn theta_immerses_to_the_hand_code() {
        let g = theta().with_matching(&[1]).unwrap();
        let d = g.immerse().unwrap();
        assert_eq!(d.num_virtuals(), 0);
        assert_eq!(d.canonical(), PmDiagram::parse(corpus::THETA).unwrap().canonical());
        assert_eq!(pk_bracket(&d).unwrap(), poly("n^2 - n"));
    }

    #[test]
    fn planar_rotations_need_no_virtuals() {
        for g in [theta(), k4()] {
            assert!(g.is_planar());
            for m in g.matchings() {
                let d = g.clone().with_matching(&m).unwrap().immerse().unwrap();
                assert_eq!(d.num_virtuals(), 0);
                assert_eq!(penrose(&d).unwrap(), pk_bracket(&d).unwrap());
            }
        }
        assert!(!petersen().is_planar());
        assert!(!k33().is_planar());
    }

    #[test]
    fn blowup_counts() {
        let b = theta().blowup();
        assert_eq!(
            (b.num_vertices(), b.num_edges(), b.matching().unwrap().len()),
            (6, 9, 3)
        );
        b.check_trivalent().unwrap();
        let pb = petersen().blowup();
        assert_eq!((pb.num_vertices(), pb.matching().unwrap().len()), (30, 15));
    }

    #[test]
    fn blowup_of_isolated_vertex_is_a_free_loop() {
        let g = RibbonGraph::from_named(&[vec![]], &[]).unwrap();
        let b = g.blowup();
        assert_eq!((b.num_vertices(), b.free_loops()), (0, 1));
    }

    #[test]
    fn blowup_of_a_loop_vertex() {
        // one vertex with a loop: a 2-cycle whose chords are the loop edge
        let g = RibbonGraph::from_named(&[vec![0, 1]], &[[0, 1]]).unwrap();
        let b = g.blowup();
        assert_eq!((b.num_vertices(), b.num_edges()), (2, 3));
        let d = b.immerse().unwrap();
        assert_eq!(d.num_matchings(), 1);
        // hand drawing: a circle with one chord is the theta graph
        assert_eq!(pk_bracket(&d).unwrap(), poly("n^2 - n"));
    }

    #[test]
    fn diagram_roundtrip_through_ribbon_graph() {
        for text in corpus::SMALL_DIAGRAMS {
            let d = PmDiagram::parse(text).unwrap();
            let g = RibbonGraph::from_diagram(&d);
            g.check_trivalent().unwrap();
            let e = g.immerse().unwrap();
            assert_eq!(penrose(&e).unwrap(), penrose(&d).unwrap(), "{text}");
            assert_eq!(pk_bracket(&e).unwrap(), pk_bracket(&d).unwrap(), "{text}");
        }
    }

    #[test]
    fn spine_and_planarized_drawings_agree() {
        for g in [petersen(), k33(), k4()] {
            for m in g.matchings() {
                let gm = g.clone().with_matching(&m).unwrap();
                let a = gm.immerse_with(ImmersionMethod::Planarize).unwrap();
                let b = gm.immerse_with(ImmersionMethod::Spine).unwrap();
                assert_eq!(pk_bracket(&a).unwrap(), pk_bracket(&b).unwrap());
                assert_eq!(penrose(&a).unwrap(), penrose(&b).unwrap());
            }
        }
    }

    #[test]
    fn text_roundtrip() {
        let g = petersen().with_matching(&petersen().matchings()[0]).unwrap();
        let back = RibbonGraph::parse(&g.to_text()).unwrap();
        assert_eq!(back, g);
        let json = RibbonGraph::parse(&g.to_json().to_string()).unwrap();
        assert_eq!(json, g);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            RibbonGraph::parse("vertex 0: 0 1 2\nedge: 0 1\n"),
            Err(RibbonError::HalfEdgeEdges { half_edge: 2, count: 0 })
        ));
        assert!(matches!(
            RibbonGraph::parse("vertex 0 0 1\n"),
            Err(RibbonError::Parse { line: 1, .. })
        ));
        let unmatched = theta();
        assert_eq!(unmatched.immerse(), Err(RibbonError::Unmatched));
        let bad = theta().with_matching(&[0, 1]);
        assert!(matches!(bad, Err(RibbonError::MatchingCover { .. })));
    }

    #[test]
    fn non_trivalent_input_is_rejected_by_immerse() {
        let g =
            RibbonGraph::from_named(&[vec![0, 1, 2, 3], vec![4, 5, 6, 7]], &[[0, 4], [1, 5], [2, 6], [3, 7]]).unwrap();
        assert!(matches!(g.immerse(), Err(RibbonError::NotTrivalent { .. })));
    }

    #[test]
    fn larger_j_family_members_are_valid_immersions() {
        for m in [5, 7] {
            let d = j_family(m).unwrap();
            assert_eq!((d.num_matchings(), d.num_virtuals()), (2 * m as usize, m as usize));
            let pk = pk_bracket(&d).unwrap();
            assert_eq!(pk, crate::invariants::color_bracket(&d).unwrap());
            assert_eq!(pk.eval(3, 0), 0.into());
            let g = RibbonGraph::from_diagram(&d);
            assert_eq!(g.num_vertices(), 4 * m as usize);
        }
    }

    #[test]
    fn j3_matches_the_reference_code() {
        let j3 = j_family(3).unwrap();
        assert_eq!(j3.canonical(), PmDiagram::parse(corpus::J3).unwrap().canonical());
        assert!(j_family(4).is_err());
        assert!(j_family(1).is_err());
    }
}
