//! Resolution states of a perfect matching diagram.
//!
//! A state fixes, per matching site, the planar (`0`) or crossed (`1`)
//! smoothing, and optionally, per virtual crossing, whether the two arcs are
//! fused into a node. Circles are found with a union-find over arc labels;
//! a circle is identified by its minimal arc label.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::pd::PmDiagram;

/// Largest matching count a state index can address.
pub const MAX_SITES: usize = 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("state has {got} bits but the diagram has {expected} matching sites")]
    AlphaLength { expected: usize, got: usize },
    #[error("virtual choice has {got} entries but the diagram has {expected} virtual crossings")]
    VirtualLength { expected: usize, got: usize },
    #[error("site {site} is already crossed in this state")]
    AlreadyCrossed { site: usize },
    #[error("site index {site} out of range")]
    SiteOutOfRange { site: usize },
    #[error("diagram has {0} matching sites; state enumeration supports at most {MAX_SITES}")]
    TooManySites(usize),
    #[error("bad state string {0:?}: expected a string of 0s and 1s")]
    BadBits(String),
}

/// Smoothing choice per matching site; bit `i` is site `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateIndex {
    bits: u64,
    len: usize,
}

impl StateIndex {
    pub fn new(bits: u64, len: usize) -> Self {
        assert!(len <= MAX_SITES, "at most {MAX_SITES} sites");
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        Self { bits: bits & mask, len }
    }

    pub fn zero(len: usize) -> Self {
        Self::new(0, len)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    /// Number of crossed smoothings, the homological degree.
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn with_bit(&self, i: usize) -> Self {
        Self::new(self.bits | (1 << i), self.len)
    }

    /// Parses `"0110"` with the first character as site 0.
    pub fn parse(s: &str, len: usize) -> Result<Self, StateError> {
        if s.len() != len {
            return Err(StateError::AlphaLength {
                expected: len,
                got: s.len(),
            });
        }
        let mut bits = 0u64;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(StateError::BadBits(s.to_string())),
            }
        }
        Ok(Self::new(bits, len))
    }

    /// Every state in integer order, site 0 least significant.
    pub fn all(len: usize) -> impl Iterator<Item = StateIndex> {
        assert!(len <= MAX_SITES);
        (0..(1u64 << len)).map(move |b| StateIndex::new(b, len))
    }
}

impl fmt::Display for StateIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Per virtual crossing: fused into a node, or an ordinary pass-through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VirtualChoice {
    nodes: u64,
    len: usize,
}

impl VirtualChoice {
    pub fn new(nodes: u64, len: usize) -> Self {
        assert!(len <= MAX_SITES);
        Self {
            nodes: nodes & ((1u64 << len) - 1),
            len,
        }
    }

    pub fn all_plain(len: usize) -> Self {
        Self::new(0, len)
    }

    pub fn is_node(&self, i: usize) -> bool {
        (self.nodes >> i) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn node_count(&self) -> u32 {
        self.nodes.count_ones()
    }
}

/// Disjoint sets over `0..n` with path halving.
#[derive(Clone, Debug)]
pub(crate) struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    pub(crate) fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let gp = self.parent[self.parent[x] as usize];
            self.parent[x] = gp;
            x = gp as usize;
        }
        x
    }

    /// Joins two classes; returns true when they were distinct.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // smaller index becomes the root
        if ra < rb {
            self.parent[rb] = ra as u32;
        } else {
            self.parent[ra] = rb as u32;
        }
        true
    }
}

/// Diagram with arcs renumbered densely, ready for repeated state evaluation.
#[derive(Clone, Debug)]
pub struct StateSpace {
    labels: Vec<u32>,
    sites: Vec<[usize; 4]>,
    virtuals: Vec<[usize; 2]>,
    loops: u32,
}

impl StateSpace {
    pub fn new(d: &PmDiagram) -> Self {
        let labels = d.arc_labels();
        let index: BTreeMap<u32, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let sites = d
            .matchings
            .iter()
            .map(|m| [index[&m[0]], index[&m[1]], index[&m[2]], index[&m[3]]])
            .collect();
        let virtuals = d.virtuals.iter().map(|v| [index[&v[0]], index[&v[1]]]).collect();
        Self {
            labels,
            sites,
            virtuals,
            loops: d.loops,
        }
    }

    pub fn num_arcs(&self) -> usize {
        self.labels.len()
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn num_virtuals(&self) -> usize {
        self.virtuals.len()
    }

    pub fn loops(&self) -> u32 {
        self.loops
    }

    pub fn label(&self, arc: usize) -> u32 {
        self.labels[arc]
    }

    pub(crate) fn sites(&self) -> &[[usize; 4]] {
        &self.sites
    }

    pub(crate) fn virtual_arcs(&self) -> &[[usize; 2]] {
        &self.virtuals
    }

    pub fn check_sites(&self) -> Result<(), StateError> {
        if self.sites.len() > MAX_SITES {
            Err(StateError::TooManySites(self.sites.len()))
        } else {
            Ok(())
        }
    }

    /// Applies the smoothings of `alpha` to `ds` (which must be fresh).
    pub(crate) fn smooth(&self, alpha: u64, ds: &mut DisjointSet) {
        for (i, &[a, b, c, d]) in self.sites.iter().enumerate() {
            if (alpha >> i) & 1 == 0 {
                ds.union(a, d);
                ds.union(b, c);
            } else {
                ds.union(a, c);
                ds.union(b, d);
            }
        }
    }

    /// Writes each arc's circle index (circles numbered by minimal arc) into
    /// `circle_of` and returns the circle count.
    pub(crate) fn circle_indices(&self, alpha: u64, ds: &mut DisjointSet, circle_of: &mut [usize]) -> usize {
        ds.reset();
        self.smooth(alpha, ds);
        let mut k = 0;
        for arc in 0..self.labels.len() {
            let root = ds.find(arc);
            if root == arc {
                circle_of[arc] = k;
                k += 1;
            } else {
                circle_of[arc] = circle_of[root];
            }
        }
        k
    }

    /// Circle count of a matching state, virtuals ignored.
    pub fn circle_count(&self, alpha: StateIndex) -> usize {
        let mut ds = DisjointSet::new(self.labels.len());
        self.smooth(alpha.bits(), &mut ds);
        (0..self.labels.len()).filter(|&a| ds.find(a) == a).count()
    }
}

/// Canonical circle identifier: the minimal arc label on the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CircleId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Circle {
    pub id: CircleId,
    pub arcs: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircleDecomposition {
    /// Sorted by id; each arc list sorted.
    pub circles: Vec<Circle>,
    /// Fused complexes, each a sorted list of circle ids; sorted by first id.
    pub fused: Vec<Vec<CircleId>>,
    /// Per matching site, the circles of its two strands (`a` side first).
    pub sites: Vec<(CircleId, CircleId)>,
}

impl CircleDecomposition {
    pub fn num_circles(&self) -> usize {
        self.circles.len()
    }

    pub fn num_complexes(&self) -> usize {
        self.fused.len()
    }

    pub fn circle_of(&self, label: u32) -> Option<CircleId> {
        self.circles
            .iter()
            .find(|c| c.arcs.binary_search(&label).is_ok())
            .map(|c| c.id)
    }
}

fn check_lengths(space: &StateSpace, s: StateIndex, v: VirtualChoice) -> Result<(), StateError> {
    if s.len() != space.num_sites() {
        return Err(StateError::AlphaLength {
            expected: space.num_sites(),
            got: s.len(),
        });
    }
    if v.len() != space.num_virtuals() {
        return Err(StateError::VirtualLength {
            expected: space.num_virtuals(),
            got: v.len(),
        });
    }
    Ok(())
}

/// Circles of the state `(s, v)`.
pub fn circles(d: &PmDiagram, s: StateIndex, v: VirtualChoice) -> Result<CircleDecomposition, StateError> {
    let space = StateSpace::new(d);
    check_lengths(&space, s, v)?;
    let n_arcs = space.num_arcs();
    let mut ds = DisjointSet::new(n_arcs);
    space.smooth(s.bits(), &mut ds);

    // roots are minimal dense indices, and dense order is label order
    let mut members: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    let mut root_of = vec![0; n_arcs];
    for (arc, root) in root_of.iter_mut().enumerate() {
        *root = ds.find(arc);
        members.entry(*root).or_default().push(space.label(arc));
    }
    let id_of = |arc: usize| CircleId(space.label(root_of[arc]));
    let circles: Vec<Circle> = members
        .into_iter()
        .map(|(root, arcs)| Circle {
            id: CircleId(space.label(root)),
            arcs,
        })
        .collect();

    let sites = space.sites().iter().map(|&[a, b, _, _]| (id_of(a), id_of(b))).collect();

    // second-level union over circles for node choices
    let pos: BTreeMap<CircleId, usize> = circles.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
    let mut fuse = DisjointSet::new(circles.len());
    for (i, &[x, y]) in space.virtual_arcs().iter().enumerate() {
        if v.is_node(i) {
            fuse.union(pos[&id_of(x)], pos[&id_of(y)]);
        }
    }
    let mut complexes: BTreeMap<usize, Vec<CircleId>> = BTreeMap::new();
    for (i, c) in circles.iter().enumerate() {
        complexes.entry(fuse.find(i)).or_default().push(c.id);
    }
    Ok(CircleDecomposition {
        circles,
        fused: complexes.into_values().collect(),
        sites,
    })
}

/// Circles joined by one edge per matching site; loops mark self-touching circles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TouchGraph {
    pub vertices: Vec<CircleId>,
    /// Index pairs into `vertices`, one per site in site order.
    pub edges: Vec<(usize, usize)>,
}

impl TouchGraph {
    pub fn has_loop(&self) -> bool {
        self.edges.iter().any(|(a, b)| a == b)
    }
}

pub fn touch_graph(d: &PmDiagram, s: StateIndex) -> Result<TouchGraph, StateError> {
    let dec = circles(d, s, VirtualChoice::all_plain(d.num_virtuals()))?;
    Ok(touch_graph_of(&dec))
}

pub fn touch_graph_of(dec: &CircleDecomposition) -> TouchGraph {
    let vertices: Vec<CircleId> = dec.circles.iter().map(|c| c.id).collect();
    let pos = |id: CircleId| vertices.binary_search(&id).expect("site circle present");
    let edges = dec.sites.iter().map(|&(x, y)| (pos(x), pos(y))).collect();
    TouchGraph { vertices, edges }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeType {
    Merge,
    Split,
    Neutral,
}

/// Classifies the hypercube edge from `s` to `s` with bit `i` set.
pub fn edge_type(d: &PmDiagram, s: StateIndex, i: usize) -> Result<EdgeType, StateError> {
    let space = StateSpace::new(d);
    if s.len() != space.num_sites() {
        return Err(StateError::AlphaLength {
            expected: space.num_sites(),
            got: s.len(),
        });
    }
    if i >= s.len() {
        return Err(StateError::SiteOutOfRange { site: i });
    }
    if s.bit(i) {
        return Err(StateError::AlreadyCrossed { site: i });
    }
    Ok(classify(space.circle_count(s), space.circle_count(s.with_bit(i))))
}

pub(crate) fn classify(before: usize, after: usize) -> EdgeType {
    match after as isize - before as isize {
        -1 => EdgeType::Merge,
        1 => EdgeType::Split,
        0 => EdgeType::Neutral,
        delta => unreachable!("one site changes the circle count by at most one, got {delta}"),
    }
}
