//! Finite metric spaces, scale filtrations, entourage graphs, ball-chain
//! components, and partition-of-unity entourages.
//!
//! The space is a finite point set with a symmetric nonnegative distance
//! matrix; an entourage at scale ε is the relation `dist(x, y) <= ε` (closed
//! threshold, so critical scales are exactly the event points of the
//! filtration). Triangle inequality is not required — only symmetry — but the
//! loader records whether it holds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for deduplicating critical scales.
const SCALE_DEDUP_TOL: f64 = 1e-12;
/// Tolerance for partition-of-unity row sums.
const PU_SUM_TOL: f64 = 1e-9;
/// Largest partition-of-unity family the derivative will process.
const PU_MAX_FUNCTIONS: usize = 16;

/// A nonnegative scale value (entourage radius, same units as distances).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Scale(pub f64);

impl Scale {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::Validation(format!(
                "scale must be finite and nonnegative, got {epsilon}"
            )));
        }
        Ok(Scale(epsilon))
    }

    pub fn epsilon(&self) -> f64 {
        self.0
    }
}

/// Finite metric space: points, symmetric distance matrix, and a base point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricSpace {
    name: String,
    /// Coordinate payload when the space came from a point cloud; empty otherwise.
    coords: Vec<Vec<f64>>,
    dist: Vec<Vec<f64>>,
    basepoint: usize,
    /// Whether the triangle inequality held at load time (warning only).
    triangle_ok: bool,
}

impl MetricSpace {
    /// Builds a space from an explicit symmetric matrix.
    pub fn from_matrix(name: &str, dist: Vec<Vec<f64>>, basepoint: usize) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::Validation("space must have at least one point".into()));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Validation(format!(
                    "matrix row {i} has length {} but space has {n} points",
                    row.len()
                )));
            }
        }
        for i in 0..n {
            if dist[i][i] != 0.0 {
                return Err(Error::Validation(format!(
                    "matrix entry ({i}, {i}) must be 0, got {}",
                    dist[i][i]
                )));
            }
            for j in 0..n {
                let d = dist[i][j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::Validation(format!(
                        "negative or non-finite distance at entry ({i}, {j}): {d}"
                    )));
                }
                if dist[i][j] != dist[j][i] {
                    return Err(Error::Validation(format!(
                        "asymmetric matrix at entry ({i}, {j}): {} vs {}",
                        dist[i][j], dist[j][i]
                    )));
                }
            }
        }
        if basepoint >= n {
            return Err(Error::Validation(format!(
                "basepoint {basepoint} out of range for {n} points"
            )));
        }
        let triangle_ok = triangle_inequality_holds(&dist);
        Ok(MetricSpace {
            name: name.to_string(),
            coords: Vec::new(),
            dist,
            basepoint,
            triangle_ok,
        })
    }

    /// Builds a space from Euclidean coordinates.
    pub fn from_points(name: &str, points: Vec<Vec<f64>>, basepoint: usize) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::Validation("space must have at least one point".into()));
        }
        let dim = points[0].len();
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Validation(format!(
                    "point {i} has dimension {} but point 0 has dimension {dim}",
                    p.len()
                )));
            }
        }
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclidean(&points[i], &points[j]);
                dist[i][j] = d;
                dist[j][i] = d;
            }
        }
        let mut space = Self::from_matrix(name, dist, basepoint)?;
        space.coords = points;
        Ok(space)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    /// Moves the basepoint; useful when analyzing a loaded space from another root.
    pub fn with_basepoint(mut self, basepoint: usize) -> Result<Self> {
        if basepoint >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: basepoint,
                len: self.len(),
            });
        }
        self.basepoint = basepoint;
        Ok(self)
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn triangle_ok(&self) -> bool {
        self.triangle_ok
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for row in &self.dist {
            for &x in row {
                d = d.max(x);
            }
        }
        d
    }

    /// Vertices of the closed ball `B(center, radius)`.
    pub fn ball(&self, center: usize, radius: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&p| self.dist[center][p] <= radius)
            .collect()
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn triangle_inequality_holds(dist: &[Vec<f64>]) -> bool {
    let n = dist.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if dist[i][j] > dist[i][k] + dist[k][j] + 1e-12 {
                    return false;
                }
            }
        }
    }
    true
}

/// JSON input document: coordinates or an explicit matrix.
#[derive(Deserialize)]
struct SpaceDocument {
    name: String,
    basepoint: Option<usize>,
    points: Option<Vec<Vec<f64>>>,
    matrix: Option<Vec<Vec<f64>>>,
}

/// Loads a space from its JSON document form
/// (`{"name", "basepoint", "points"}` or `{"name", "basepoint", "matrix"}`).
pub fn load_space(source: &str) -> Result<MetricSpace> {
    let doc: SpaceDocument =
        serde_json::from_str(source).map_err(|e| Error::Parse(format!("bad space JSON: {e}")))?;
    let basepoint = doc
        .basepoint
        .ok_or_else(|| Error::Parse("missing basepoint".into()))?;
    match (doc.points, doc.matrix) {
        (Some(points), None) => MetricSpace::from_points(&doc.name, points, basepoint),
        (None, Some(matrix)) => MetricSpace::from_matrix(&doc.name, matrix, basepoint),
        (Some(_), Some(_)) => Err(Error::Parse(
            "document has both points and matrix; provide exactly one".into(),
        )),
        (None, None) => Err(Error::Parse(
            "document has neither points nor matrix".into(),
        )),
    }
}

/// Loads a space from CSV rows of coordinates; the basepoint is row 0.
pub fn load_space_csv(source: &str) -> Result<MetricSpace> {
    let mut points = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>> = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {tok:?} on line {}", lineno + 1)))
            })
            .collect();
        points.push(row?);
    }
    MetricSpace::from_points("csv", points, 0)
}

/// Ascending distinct nonzero pairwise distances; every structural change of
/// the ε-graph happens at one of these. Values within the dedup tolerance
/// collapse to the largest member of their cluster, so distances that are
/// mathematically tied (but differ in the last float bits) all satisfy
/// `d <= scale` at the reported scale.
pub fn critical_scales(space: &MetricSpace) -> Vec<Scale> {
    let mut values: Vec<f64> = Vec::new();
    for i in 0..space.len() {
        for j in (i + 1)..space.len() {
            let d = space.dist(i, j);
            if d > 0.0 {
                values.push(d);
            }
        }
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<Scale> = Vec::new();
    for v in values {
        match out.last_mut() {
            Some(last) if (v - last.0).abs() <= SCALE_DEDUP_TOL => last.0 = v,
            _ => out.push(Scale(v)),
        }
    }
    out
}

/// Undirected graph of points joined below a scale.
#[derive(Clone, Debug)]
pub struct EpsilonGraph {
    pub scale: Scale,
    adj: Vec<Vec<usize>>,
}

impl EpsilonGraph {
    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.adj[i].binary_search(&j).is_ok()
    }

    /// Edges as `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, nbrs) in self.adj.iter().enumerate() {
            for &j in nbrs {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|n| n.len()).sum::<usize>() / 2
    }

    /// Subgraph induced on a vertex subset; global indexing is preserved and
    /// outside vertices become isolated.
    pub fn induced(&self, vertices: &[usize]) -> EpsilonGraph {
        let mut inside = vec![false; self.len()];
        for &v in vertices {
            inside[v] = true;
        }
        let mut adj = vec![Vec::new(); self.len()];
        for (i, j) in self.edges() {
            if inside[i] && inside[j] {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        EpsilonGraph {
            scale: self.scale,
            adj,
        }
    }
}

/// The ε-graph: edge `(i, j)` iff `i != j` and `dist(i, j) <= ε`.
/// Isolated vertices are kept.
pub fn entourage_graph(space: &MetricSpace, s: Scale) -> EpsilonGraph {
    let n = space.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if space.dist(i, j) <= s.0 {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    // neighbor lists ascending by construction
    EpsilonGraph { scale: s, adj }
}

/// Disjoint-set union over point indices.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != x {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
        true
    }
}

/// A partition of point indices into connected components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    /// Smallest member of each point's component.
    rep: Vec<usize>,
}

impl Partition {
    pub fn representative(&self, v: usize) -> usize {
        self.rep[v]
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.rep[a] == self.rep[b]
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    pub fn component_count(&self) -> usize {
        self.classes().len()
    }

    /// Components as sorted index lists, ordered by smallest member.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut where_of = vec![usize::MAX; self.rep.len()];
        for (v, &r) in self.rep.iter().enumerate() {
            if where_of[r] == usize::MAX {
                where_of[r] = out.len();
                out.push(Vec::new());
            }
            out[where_of[r]].push(v);
        }
        out
    }

    /// Whether `self` refines `coarser` (every class is inside one coarse class).
    pub fn refines(&self, coarser: &Partition) -> bool {
        (0..self.rep.len()).all(|v| coarser.same(v, self.rep[v]))
    }

    /// True when every point is its own class.
    pub fn is_identity(&self) -> bool {
        self.rep.iter().enumerate().all(|(v, &r)| v == r)
    }
}

/// ε-chain components: connectivity by chains of ε-close points, computed by
/// union-find over the entourage graph.
pub fn pc_components(space: &MetricSpace, s: Scale) -> Partition {
    let graph = entourage_graph(space, s);
    components_of(&graph)
}

/// Connected components of an ε-graph.
pub fn components_of(graph: &EpsilonGraph) -> Partition {
    let n = graph.len();
    let mut uf = UnionFind::new(n);
    for (i, j) in graph.edges() {
        uf.union(i, j);
    }
    let mut rep = vec![usize::MAX; n];
    let mut min_of_root = vec![usize::MAX; n];
    for v in 0..n {
        let r = uf.find(v);
        if min_of_root[r] == usize::MAX {
            min_of_root[r] = v; // first visit in ascending order is the minimum
        }
    }
    for v in 0..n {
        let r = uf.find(v);
        rep[v] = min_of_root[r];
    }
    Partition { rep }
}

/// Symmetric reflexive relation on point indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntourageRelation {
    adj: Vec<Vec<bool>>,
}

impl EntourageRelation {
    /// The diagonal relation on `n` points.
    pub fn diagonal(n: usize) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for (i, row) in adj.iter_mut().enumerate() {
            row[i] = true;
        }
        EntourageRelation { adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.adj[i][j] = true;
        self.adj[j][i] = true;
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    /// Relation composition: `(x, z)` iff some `y` has `(x, y)` here and `(y, z)` in `other`.
    pub fn compose(&self, other: &EntourageRelation) -> EntourageRelation {
        let n = self.len();
        let mut out = EntourageRelation::diagonal(n);
        for x in 0..n {
            for y in 0..n {
                if self.adj[x][y] {
                    for z in 0..n {
                        if other.adj[y][z] {
                            out.insert(x, z);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_subset_of(&self, other: &EntourageRelation) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| !self.adj[i][j] || other.adj[i][j]))
    }

    /// All related pairs `(i, j)` with `i <= j`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i..self.len() {
                if self.adj[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// A finite partition of unity on a space: `functions[s][p]` is the weight of
/// function `s` at point `p`; weights at each point sum to 1.
#[derive(Clone, Debug)]
pub struct PartitionOfUnity {
    functions: Vec<Vec<f64>>,
}

impl PartitionOfUnity {
    pub fn new(functions: Vec<Vec<f64>>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::Validation("partition of unity needs at least one function".into()));
        }
        let n = functions[0].len();
        for (s, f) in functions.iter().enumerate() {
            if f.len() != n {
                return Err(Error::Validation(format!(
                    "function {s} has {} entries, expected {n}",
                    f.len()
                )));
            }
            for (p, &w) in f.iter().enumerate() {
                if !w.is_finite() || !(0.0..=1.0 + PU_SUM_TOL).contains(&w) {
                    return Err(Error::Validation(format!(
                        "weight of function {s} at point {p} is {w}, outside [0, 1]"
                    )));
                }
            }
        }
        for p in 0..n {
            let sum: f64 = functions.iter().map(|f| f[p]).sum();
            if (sum - 1.0).abs() > PU_SUM_TOL {
                return Err(Error::Validation(format!(
                    "weights at point {p} sum to {sum}, expected 1"
                )));
            }
        }
        Ok(PartitionOfUnity { functions })
    }

    pub fn function_count(&self) -> usize {
        self.functions.len()
    }

    pub fn point_count(&self) -> usize {
        self.functions[0].len()
    }

    pub fn weight(&self, func: usize, point: usize) -> f64 {
        self.functions[func][point]
    }
}

/// The entourage `E_f` of a partition of unity: pairs sharing a function with
/// positive weight at both points.
pub fn pu_entourage(space: &MetricSpace, f: &PartitionOfUnity) -> Result<EntourageRelation> {
    if f.point_count() != space.len() {
        return Err(Error::Validation(format!(
            "partition of unity is on {} points but space has {}",
            f.point_count(),
            space.len()
        )));
    }
    let n = space.len();
    let mut rel = EntourageRelation::diagonal(n);
    for s in 0..f.function_count() {
        for x in 0..n {
            if f.weight(s, x) > 0.0 {
                for y in (x + 1)..n {
                    if f.weight(s, y) > 0.0 {
                        rel.insert(x, y);
                    }
                }
            }
        }
    }
    Ok(rel)
}

/// The derivative of a partition of unity: the family `f'_T = |T| · max(0, g_T)`
/// over finite index subsets `T`, where `g_T` is the minimum weight inside `T`
/// minus the supremum outside. Only subsets with `f'_T` not identically zero
/// are returned; at each point those are exactly the top-weight prefixes with a
/// strict gap below, so the enumeration never touches the other subsets.
pub fn pu_derivative(f: &PartitionOfUnity) -> Result<PartitionOfUnity> {
    let s_count = f.function_count();
    let n = f.point_count();
    if s_count > PU_MAX_FUNCTIONS {
        return Err(Error::Validation(format!(
            "partition of unity has {s_count} functions, derivative supports at most {PU_MAX_FUNCTIONS}"
        )));
    }

    let mut candidates: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
    for p in 0..n {
        let mut order: Vec<usize> = (0..s_count).collect();
        order.sort_by(|&a, &b| {
            f.weight(b, p)
                .partial_cmp(&f.weight(a, p))
                .unwrap()
                .then(a.cmp(&b))
        });
        for k in 1..=s_count {
            let w_k = f.weight(order[k - 1], p);
            let below = if k == s_count {
                0.0
            } else {
                f.weight(order[k], p)
            };
            if w_k > below {
                let mut t: Vec<usize> = order[..k].to_vec();
                t.sort_unstable();
                candidates.insert(t);
            }
        }
    }

    let mut functions = Vec::new();
    for t in &candidates {
        let in_t = {
            let mut mask = vec![false; s_count];
            for &s in t {
                mask[s] = true;
            }
            mask
        };
        let mut row = vec![0.0; n];
        let mut nonzero = false;
        for (p, slot) in row.iter_mut().enumerate() {
            let mut min_in = f64::INFINITY;
            let mut max_out: f64 = 0.0; // sup over the empty set is 0 for weights in [0, 1]
            for s in 0..s_count {
                let w = f.weight(s, p);
                if in_t[s] {
                    min_in = min_in.min(w);
                } else {
                    max_out = max_out.max(w);
                }
            }
            let g = min_in - max_out;
            if g > 0.0 {
                *slot = (t.len() as f64) * g;
                nonzero = true;
            }
        }
        if nonzero {
            functions.push(row);
        }
    }

    PartitionOfUnity::new(functions)
}
