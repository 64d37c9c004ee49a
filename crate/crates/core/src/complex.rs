//! Combinatorial closed oriented triangulated surfaces given by a side-pairing
//! gluing table.
//!
//! Face `f` has corners `0, 1, 2` in counter-clockwise order. Side `i` is the
//! side opposite corner `i`; it runs from corner `i + 1` to corner `i + 2`
//! (indices mod 3). Gluing two sides always identifies them with opposite
//! boundary orientation, so corner `s + 1` of one side meets corner `t + 2` of
//! the other.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A side of a face, addressed by the face and the index of the opposite corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Side {
    pub face: usize,
    pub index: usize,
}

impl Side {
    pub const fn new(face: usize, index: usize) -> Self {
        Self { face, index }
    }

    /// Flat slot id `3 * face + index`, shared with corner indexing.
    #[inline]
    pub fn slot(self) -> usize {
        3 * self.face + self.index
    }

    fn from_slot(slot: usize) -> Self {
        Self::new(slot / 3, slot % 3)
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.face, self.index)
    }
}

#[inline]
pub(crate) fn next(i: usize) -> usize {
    (i + 1) % 3
}

#[inline]
pub(crate) fn prev(i: usize) -> usize {
    (i + 2) % 3
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("a complex needs at least one face")]
    Empty,
    #[error("side {0} does not exist")]
    SideOutOfRange(Side),
    #[error("side {0} is glued to itself")]
    SelfPairedSide(Side),
    #[error("side {0} appears in more than one gluing pair")]
    SideReusedInTwoPairs(Side),
    #[error("side {0} is not paired with any side")]
    UnpairedSide(Side),
    #[error("gluing pair {0} <-> {1} preserves boundary orientation")]
    NonOrientable(Side, Side),
    #[error("the link of vertex {0} is not a single cycle")]
    BoundaryDetected(usize),
}

/// Closed oriented triangulated surface (a Δ-complex: self-gluings and
/// multi-edges are allowed).
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceComplex {
    face_count: usize,
    /// `mate[slot]` is the side glued to side `slot`.
    mate: Vec<Side>,
    /// Edge id of each side.
    side_edge: Vec<usize>,
    /// The two sides of each edge, lexicographically first side first.
    edges: Vec<[Side; 2]>,
    /// Vertex id of each corner.
    corner_vertex: Vec<usize>,
    vertex_count: usize,
}

impl SurfaceComplex {
    /// Builds a complex from gluing pairs. Edge `k` is the `k`-th pair.
    pub fn new(face_count: usize, gluing: &[[Side; 2]]) -> Result<Self, ComplexError> {
        let pairs: Vec<_> = gluing.iter().map(|&p| (p, true)).collect();
        Self::with_orientations(face_count, &pairs)
    }

    /// Like [`SurfaceComplex::new`], but each pair states whether it reverses
    /// boundary orientation. Orientation-preserving pairs are rejected.
    pub fn with_orientations(
        face_count: usize,
        gluing: &[([Side; 2], bool)],
    ) -> Result<Self, ComplexError> {
        if face_count == 0 {
            return Err(ComplexError::Empty);
        }
        let n_sides = 3 * face_count;
        let mut mate: Vec<Option<Side>> = vec![None; n_sides];
        let mut side_edge = vec![usize::MAX; n_sides];
        let mut edges = Vec::with_capacity(gluing.len());

        for (k, &([a, b], reversing)) in gluing.iter().enumerate() {
            for s in [a, b] {
                if s.face >= face_count || s.index > 2 {
                    return Err(ComplexError::SideOutOfRange(s));
                }
            }
            if a == b {
                return Err(ComplexError::SelfPairedSide(a));
            }
            for s in [a, b] {
                if mate[s.slot()].is_some() {
                    return Err(ComplexError::SideReusedInTwoPairs(s));
                }
            }
            if !reversing {
                return Err(ComplexError::NonOrientable(a, b));
            }
            mate[a.slot()] = Some(b);
            mate[b.slot()] = Some(a);
            side_edge[a.slot()] = k;
            side_edge[b.slot()] = k;
            edges.push(if a < b { [a, b] } else { [b, a] });
        }

        let mate: Vec<Side> = mate
            .into_iter()
            .enumerate()
            .map(|(slot, m)| m.ok_or(ComplexError::UnpairedSide(Side::from_slot(slot))))
            .collect::<Result<_, _>>()?;

        // Corners meeting across a side: corner s+1 of one side with corner t+2
        // of the other, and s+2 with t+1.
        let mut uf = UnionFind::new(n_sides);
        for [a, b] in &edges {
            uf.union(3 * a.face + next(a.index), 3 * b.face + prev(b.index));
            uf.union(3 * a.face + prev(a.index), 3 * b.face + next(b.index));
        }
        let mut root_to_vertex = vec![usize::MAX; n_sides];
        let mut corner_vertex = vec![0; n_sides];
        let mut vertex_count = 0;
        for corner in 0..n_sides {
            let r = uf.find(corner);
            if root_to_vertex[r] == usize::MAX {
                root_to_vertex[r] = vertex_count;
                vertex_count += 1;
            }
            corner_vertex[corner] = root_to_vertex[r];
        }

        let complex = Self {
            face_count,
            mate,
            side_edge,
            edges,
            corner_vertex,
            vertex_count,
        };
        complex.check_vertex_links()?;
        Ok(complex)
    }

    /// Builds a complex from oriented vertex triples, gluing each directed side
    /// `u -> v` to the side `v -> u`. Edges are numbered in the order their
    /// first side is met in `(face, side)` order.
    pub fn from_triangles(triangles: &[[usize; 3]]) -> Result<Self, ComplexError> {
        use std::collections::HashMap;
        // Directed side (u, v) -> (side, position of its edge slot).
        let mut open: HashMap<(usize, usize), (Side, usize)> = HashMap::new();
        let mut slots: Vec<Option<[Side; 2]>> = Vec::new();
        for (f, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let side = Side::new(f, i);
                let (u, v) = (tri[next(i)], tri[prev(i)]);
                if let Some((other, k)) = open.remove(&(v, u)) {
                    slots[k] = Some([other, side]);
                } else if open.contains_key(&(u, v)) {
                    return Err(ComplexError::SideReusedInTwoPairs(side));
                } else {
                    open.insert((u, v), (side, slots.len()));
                    slots.push(None);
                }
            }
        }
        if let Some(&(side, _)) = open.values().min() {
            return Err(ComplexError::UnpairedSide(side));
        }
        let pairs: Vec<[Side; 2]> = slots.into_iter().flatten().collect();
        Self::new(triangles.len(), &pairs)
    }

    fn check_vertex_links(&self) -> Result<(), ComplexError> {
        let mut corners_at = vec![0usize; self.vertex_count];
        for &v in &self.corner_vertex {
            corners_at[v] += 1;
        }
        let mut seen = vec![false; self.corner_vertex.len()];
        let mut cycles = vec![0usize; self.vertex_count];
        for start in 0..self.corner_vertex.len() {
            if seen[start] {
                continue;
            }
            let v = self.corner_vertex[start];
            cycles[v] += 1;
            if cycles[v] > 1 {
                return Err(ComplexError::BoundaryDetected(v));
            }
            let mut len = 0;
            let mut corner = start;
            loop {
                if seen[corner] {
                    break;
                }
                seen[corner] = true;
                len += 1;
                corner = self.rotate_corner(corner);
            }
            if corner != start || len != corners_at[v] {
                return Err(ComplexError::BoundaryDetected(v));
            }
        }
        Ok(())
    }

    /// Next corner around the same vertex, crossing side `i + 1` of the face.
    fn rotate_corner(&self, corner: usize) -> usize {
        let (f, i) = (corner / 3, corner % 3);
        let across = self.mate[3 * f + next(i)];
        3 * across.face + next(across.index)
    }

    pub fn face_count(&self) -> usize {
        self.face_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn corner_count(&self) -> usize {
        3 * self.face_count
    }

    /// The side glued to `side`.
    pub fn mate(&self, side: Side) -> Side {
        self.mate[side.slot()]
    }

    pub fn edge_of(&self, side: Side) -> usize {
        self.side_edge[side.slot()]
    }

    /// The two sides of edge `e`; the lexicographically smaller one first.
    pub fn edge_sides(&self, e: usize) -> [Side; 2] {
        self.edges[e]
    }

    /// Vertex at corner `i` of face `f` (the corner opposite side `i`).
    pub fn corner_vertex(&self, f: usize, i: usize) -> usize {
        self.corner_vertex[3 * f + i]
    }

    /// Endpoints of edge `e` as seen from its first side: `(start, end)`.
    pub fn edge_endpoints(&self, e: usize) -> [usize; 2] {
        let s = self.edges[e][0];
        [
            self.corner_vertex(s.face, next(s.index)),
            self.corner_vertex(s.face, prev(s.index)),
        ]
    }

    /// Edge ids of the three sides of face `f`, by side index.
    pub fn face_edges(&self, f: usize) -> [usize; 3] {
        [0, 1, 2].map(|i| self.side_edge[3 * f + i])
    }

    /// Gluing pairs in edge order, as originally supplied up to side order.
    pub fn gluing(&self) -> Vec<[Side; 2]> {
        self.edges.clone()
    }

    /// Euler characteristic `|V| - |E| + |F|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.face_count as i64
    }

    /// `(χ, genus)` with genus `(2 - χ) / 2`.
    pub fn euler_and_genus(&self) -> (i64, i64) {
        let chi = self.euler_characteristic();
        (chi, (2 - chi) / 2)
    }

    /// Breadth-first spanning tree of the dual graph. At each face the
    /// incident edges are tried in increasing edge index.
    pub fn dual_spanning_tree(&self, root: usize) -> DualTree {
        assert!(root < self.face_count, "root face {root} out of range");
        let mut parent: Vec<Option<TreeLink>> = vec![None; self.face_count];
        let mut visited = vec![false; self.face_count];
        let mut is_tree_edge = vec![false; self.edges.len()];
        let mut order = Vec::with_capacity(self.face_count);
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(f) = queue.pop_front() {
            order.push(f);
            let mut sides: Vec<Side> = (0..3).map(|i| Side::new(f, i)).collect();
            sides.sort_by_key(|&s| (self.edge_of(s), s.index));
            for s in sides {
                let across = self.mate(s);
                if visited[across.face] {
                    continue;
                }
                visited[across.face] = true;
                is_tree_edge[self.edge_of(s)] = true;
                parent[across.face] = Some(TreeLink {
                    parent_side: s,
                    child_side: across,
                });
                queue.push_back(across.face);
            }
        }
        let (tree_edges, non_tree_edges) = (0..self.edges.len()).partition(|&e| is_tree_edge[e]);
        DualTree {
            root_face: root,
            tree_edges,
            non_tree_edges,
            parent,
            order,
        }
    }
}

/// How a non-root face hangs off its parent in a [`DualTree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeLink {
    pub parent_side: Side,
    pub child_side: Side,
}

/// Spanning tree of the dual graph (faces as nodes, edges as arcs).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualTree {
    pub root_face: usize,
    pub tree_edges: Vec<usize>,
    pub non_tree_edges: Vec<usize>,
    /// Parent link per face; `None` for the root.
    pub parent: Vec<Option<TreeLink>>,
    /// Faces in breadth-first order, root first.
    pub order: Vec<usize>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Smaller root wins so vertex numbering only depends on corner order.
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }
}
