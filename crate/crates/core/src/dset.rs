//! Finitely enumerable dendroidal sets: presheaves on Ω exposed through
//! dendrex enumeration and the contravariant action of Ω-maps.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rand::Rng;
use thiserror::Error;

use crate::omega::{self, factor_through, factor_with_table, hom_edge_maps, inverse_table, FaceLabel, OmegaMap};
use crate::smc::{MorId, ObjId, PermutativeGroupoid};
use crate::tree::{enumerate_trees_by_edges, EdgeId, Tree, VertexId};

/// A nondegenerate cell of a finite simplicial set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Vertex(usize),
    Edge(usize),
    Triangle(usize),
}

impl Cell {
    pub fn dim(&self) -> usize {
        match self {
            Cell::Vertex(_) => 0,
            Cell::Edge(_) => 1,
            Cell::Triangle(_) => 2,
        }
    }
}

/// An element of some `D_T`. The variant records which constructor produced
/// it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dendrex {
    /// A map into the tree of a representable or one of its subobjects.
    Arrow(Vec<EdgeId>),
    /// The element of the terminal set, or the basepoint of a quotient.
    Point,
    Summand(usize, Box<Dendrex>),
    /// The degeneracy of `cell` along the monotone surjection `surj`.
    Simplex { cell: Cell, surj: Vec<usize> },
    /// Objects per edge and morphisms per vertex of the shape.
    Nerve { colours: Vec<ObjId>, ops: Vec<MorId> },
    Old(Box<Dendrex>),
    New(Vec<EdgeId>),
    Kept(Box<Dendrex>),
}

impl fmt::Display for Dendrex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(xs: &[usize]) -> String {
            xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        }
        match self {
            Dendrex::Arrow(e) => write!(f, "arrow({})", list(e)),
            Dendrex::Point => f.write_str("*"),
            Dendrex::Summand(i, x) => write!(f, "in{i}({x})"),
            Dendrex::Simplex { cell, surj } => {
                let c = match cell {
                    Cell::Vertex(i) => format!("v{i}"),
                    Cell::Edge(i) => format!("e{i}"),
                    Cell::Triangle(i) => format!("t{i}"),
                };
                if surj.len() == cell.dim() + 1 {
                    f.write_str(&c)
                } else {
                    write!(f, "s[{}]{c}", list(surj))
                }
            }
            Dendrex::Nerve { colours, ops } => write!(f, "nerve({}|{})", list(colours), list(ops)),
            Dendrex::Old(x) => write!(f, "old({x})"),
            Dendrex::New(e) => write!(f, "new({})", list(e)),
            Dendrex::Kept(x) => write!(f, "[{x}]"),
        }
    }
}

/// Largest corolla arity with possibly nonempty dendrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArityBound {
    Finite(usize),
    Unbounded,
}

impl ArityBound {
    fn max(self, other: ArityBound) -> ArityBound {
        match (self, other) {
            (ArityBound::Finite(a), ArityBound::Finite(b)) => ArityBound::Finite(a.max(b)),
            _ => ArityBound::Unbounded,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DsetError {
    #[error("`{0}` is not a horn label of the tree")]
    NotALabel(String),
    #[error("map is not natural: {0}")]
    NotNatural(String),
    #[error("map is not an inclusion: {0}")]
    NotAnInclusion(String),
    #[error("invalid simplicial set: {0}")]
    Simplicial(String),
}

pub trait DendroidalSet: Send + Sync {
    /// All dendrices of the given shape, in a deterministic order.
    fn dendrices(&self, shape: &Arc<Tree>) -> Vec<Dendrex>;

    /// `map^*(x)` for `x` a dendrex at `map.target()`.
    fn act(&self, map: &OmegaMap, x: &Dendrex) -> Dendrex;

    fn act_all(&self, map: &OmegaMap, xs: &[Dendrex]) -> Vec<Dendrex> {
        xs.iter().map(|x| self.act(map, x)).collect()
    }

    fn contains(&self, shape: &Arc<Tree>, x: &Dendrex) -> bool {
        self.dendrices(shape).contains(x)
    }

    fn corolla_arity_bound(&self) -> ArityBound;

    /// A corolla arity past which every corolla relation in K₀ follows from
    /// lower ones.
    fn effective_arity_bound(&self) -> usize;

    /// Human-readable name of a dendrex, used for generator listings.
    fn label(&self, _shape: &Tree, x: &Dendrex) -> String {
        x.to_string()
    }

    fn describe(&self) -> String;
}

pub type DSet = Arc<dyn DendroidalSet>;

impl fmt::Debug for dyn DendroidalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Trees with at most `max_edges` edges, one per isomorphism class.
pub fn shape_window(max_edges: usize) -> Vec<Arc<Tree>> {
    enumerate_trees_by_edges(max_edges).into_iter().map(Arc::new).collect()
}

type MapFn = dyn Fn(&Arc<Tree>, &Dendrex) -> Dendrex + Send + Sync;

/// A map of dendroidal sets, given shape by shape.
#[derive(Clone)]
pub struct DendMap {
    source: DSet,
    target: DSet,
    func: Arc<MapFn>,
}

impl fmt::Debug for DendMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DendMap({} -> {})", self.source.describe(), self.target.describe())
    }
}

impl DendMap {
    pub fn new(
        source: DSet,
        target: DSet,
        func: impl Fn(&Arc<Tree>, &Dendrex) -> Dendrex + Send + Sync + 'static,
    ) -> DendMap {
        DendMap {
            source,
            target,
            func: Arc::new(func),
        }
    }

    pub fn identity(d: &DSet) -> DendMap {
        DendMap::new(d.clone(), d.clone(), |_, x| x.clone())
    }

    /// The map sending every dendrex to itself; only meaningful when the
    /// source's tokens are tokens of the target.
    pub fn token_inclusion(source: &DSet, target: &DSet) -> DendMap {
        DendMap::new(source.clone(), target.clone(), |_, x| x.clone())
    }

    pub fn source(&self) -> &DSet {
        &self.source
    }

    pub fn target(&self) -> &DSet {
        &self.target
    }

    pub fn apply(&self, shape: &Arc<Tree>, x: &Dendrex) -> Dendrex {
        (self.func)(shape, x)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &DendMap) -> DendMap {
        let (f, g) = (self.func.clone(), next.func.clone());
        DendMap::new(self.source.clone(), next.target.clone(), move |s, x| g(s, &f(s, x)))
    }

    /// Checks that images are dendrices of the target and that the map
    /// commutes with every Ω-map between shapes of the window.
    pub fn check_naturality(&self, window: &[Arc<Tree>]) -> Result<(), DsetError> {
        for s in window {
            let xs = self.source.dendrices(s);
            let ys: Vec<Dendrex> = xs.iter().map(|x| self.apply(s, x)).collect();
            let target_set: HashSet<Dendrex> = self.target.dendrices(s).into_iter().collect();
            if let Some(y) = ys.iter().find(|y| !target_set.contains(y)) {
                return Err(DsetError::NotNatural(format!("{y} is not a dendrex of the target at {s}")));
            }
            for r in window {
                for g in omega::hom(r, s) {
                    let left = self.source.act_all(&g, &xs);
                    let right = self.target.act_all(&g, &ys);
                    for ((x, l), rt) in xs.iter().zip(&left).zip(&right) {
                        if self.apply(r, l) != *rt {
                            return Err(DsetError::NotNatural(format!("at {x} along {g}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks the map is injective on each shape of the window.
    pub fn check_injective(&self, window: &[Arc<Tree>]) -> Result<(), DsetError> {
        for s in window {
            let mut seen = HashSet::new();
            for x in self.source.dendrices(s) {
                if !seen.insert(self.apply(s, &x)) {
                    return Err(DsetError::NotAnInclusion(format!("two dendrices at {s} have the image of {x}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct ShapeCache {
    map: Mutex<HashMap<Tree, Arc<Vec<Dendrex>>>>,
}

impl ShapeCache {
    fn get(&self, shape: &Tree, compute: impl FnOnce() -> Vec<Dendrex>) -> Arc<Vec<Dendrex>> {
        if let Some(v) = self.map.lock().expect("cache lock").get(shape) {
            return v.clone();
        }
        let v = Arc::new(compute());
        self.map.lock().expect("cache lock").insert(shape.clone(), v.clone());
        v
    }
}

fn sorted_hom(s: &Tree, t: &Tree) -> Vec<Vec<EdgeId>> {
    let mut maps = Vec::new();
    hom_edge_maps(s, t, |m| maps.push(m.to_vec()));
    maps.sort();
    maps
}

fn precompose(map: &OmegaMap, e: &[EdgeId]) -> Vec<EdgeId> {
    map.edges().iter().map(|&i| e[i]).collect()
}

/// Which subobject of a representable a [`SubRepresentable`] is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubKind {
    Full,
    Boundary,
    Horn(FaceLabel),
    SegalCore,
}

/// `Ω[T]` or a union of representable subobjects of it, each given by an
/// injective generator map into `T`.
pub struct SubRepresentable {
    tree: Arc<Tree>,
    kind: SubKind,
    generators: Vec<OmegaMap>,
    inverses: Vec<Vec<Option<EdgeId>>>,
    cache: ShapeCache,
}

impl SubRepresentable {
    fn build(tree: Arc<Tree>, kind: SubKind, generators: Vec<OmegaMap>) -> Arc<SubRepresentable> {
        let inverses = generators.iter().map(inverse_table).collect();
        Arc::new(SubRepresentable {
            tree,
            kind,
            generators,
            inverses,
            cache: ShapeCache::default(),
        })
    }

    pub fn tree(&self) -> &Arc<Tree> {
        &self.tree
    }

    pub fn kind(&self) -> &SubKind {
        &self.kind
    }

    pub fn generators(&self) -> &[OmegaMap] {
        &self.generators
    }

    /// Index of the first generator `edges` factors through, with the lift.
    pub fn factor(&self, source: &Arc<Tree>, edges: &[EdgeId]) -> Option<(usize, OmegaMap)> {
        if self.kind == SubKind::Full {
            return Some((0, OmegaMap::new(source.clone(), self.tree.clone(), edges.to_vec()).ok()?));
        }
        self.generators.iter().enumerate().find_map(|(i, g)| {
            factor_with_table(source, edges, g.source(), &self.inverses[i]).map(|h| (i, h))
        })
    }

    pub fn contains_map(&self, source: &Arc<Tree>, edges: &[EdgeId]) -> bool {
        self.kind == SubKind::Full || self.factor(source, edges).is_some()
    }

    pub fn as_dset(self: &Arc<Self>) -> DSet {
        self.clone()
    }

    pub fn inclusion(self: &Arc<Self>) -> DendMap {
        DendMap::token_inclusion(&self.as_dset(), &representable(&self.tree))
    }

    /// The natural map into `target` determined by one dendrex per generator.
    /// Compatibility of the values is not checked here.
    pub fn extend(self: &Arc<Self>, target: &DSet, values: Vec<Dendrex>) -> DendMap {
        assert_eq!(values.len(), self.generators.len(), "one value per generator");
        let me = self.clone();
        let tgt = target.clone();
        DendMap::new(self.as_dset(), target.clone(), move |shape, x| {
            let Dendrex::Arrow(e) = x else {
                panic!("not a dendrex of a representable subobject: {x}")
            };
            let (i, lift) = me.factor(shape, e).expect("dendrex lies in the subobject");
            tgt.act(&lift, &values[i])
        })
    }
}

impl DendroidalSet for SubRepresentable {
    fn dendrices(&self, shape: &Arc<Tree>) -> Vec<Dendrex> {
        self.cache
            .get(shape, || {
                sorted_hom(shape, &self.tree)
                    .into_iter()
                    .filter(|e| self.contains_map(shape, e))
                    .map(Dendrex::Arrow)
                    .collect()
            })
            .as_ref()
            .clone()
    }

    fn act(&self, map: &OmegaMap, x: &Dendrex) -> Dendrex {
        match x {
            Dendrex::Arrow(e) => Dendrex::Arrow(precompose(map, e)),
            _ => panic!("not a dendrex of a representable: {x}"),
        }
    }

    fn contains(&self, shape: &Arc<Tree>, x: &Dendrex) -> bool {
        match x {
            Dendrex::Arrow(e) => omega::validate_map(shape, &self.tree, e).is_ok() && self.contains_map(shape, e),
            _ => false,
        }
    }

    fn corolla_arity_bound(&self) -> ArityBound {
        if self.generators.is_empty() {
            ArityBound::Finite(0)
        } else {
            ArityBound::Finite(self.tree.num_edges())
        }
    }

    fn effective_arity_bound(&self) -> usize {
        self.generators.iter().map(|g| g.source().max_arity()).max().unwrap_or(0)
    }

    fn label(&self, shape: &Tree, x: &Dendrex) -> String {
        match x {
            Dendrex::Arrow(e) if shape.is_eta() => self.tree.name(e[0]).to_string(),
            Dendrex::Arrow(e) => {
                let parts: Vec<String> = e
                    .iter()
                    .enumerate()
                    .map(|(i, &img)| format!("{}->{}", shape.name(i), self.tree.name(img)))
                    .collect();
                format!("{{{}}}", parts.join(", "))
            }
            _ => x.to_string(),
        }
    }

    fn describe(&self) -> String {
        match &self.kind {
            SubKind::Full => format!("repr({})", self.tree),
            SubKind::Boundary => format!("boundary({})", self.tree),
            SubKind::Horn(a) => format!("horn({}, {})", self.tree, a.render(&self.tree)),
            SubKind::SegalCore => format!("core({})", self.tree),
        }
    }
}

pub fn representable_sub(t: &Arc<Tree>) -> Arc<SubRepresentable> {
    SubRepresentable::build(t.clone(), SubKind::Full, vec![OmegaMap::identity(t)])
}

pub fn representable(t: &Arc<Tree>) -> DSet {
    representable_sub(t)
}

pub fn boundary(t: &Arc<Tree>) -> Arc<SubRepresentable> {
    let gens = omega::faces(t).into_iter().map(|f| f.map).collect();
    SubRepresentable::build(t.clone(), SubKind::Boundary, gens)
}

pub fn horn(t: &Arc<Tree>, a: FaceLabel) -> Result<Arc<SubRepresentable>, DsetError> {
    let faces = omega::faces(t);
    if !faces.iter().any(|f| f.label == a) {
        return Err(DsetError::NotALabel(format!("{a:?}")));
    }
    let gens = faces.into_iter().filter(|f| f.label != a).map(|f| f.map).collect();
    Ok(SubRepresentable::build(t.clone(), SubKind::Horn(a), gens))
}

/// The union of the vertex corollas; for η, η itself.
pub fn segal_core(t: &Arc<Tree>) -> Arc<SubRepresentable> {
    if t.is_eta() {
        return SubRepresentable::build(t.clone(), SubKind::SegalCore, vec![OmegaMap::identity(t)]);
    }
    let gens = t
        .vertices()
        .iter()
        .map(|v| {
            let sub = t.spanned_subtree(v.output, &v.inputs).expect("a vertex spans a corolla");
            let (c, edges) = t.subtree_as_tree(&sub);
            OmegaMap::new(Arc::new(c), t.clone(), edges).expect("corolla inclusion")
        })
        .collect();
    SubRepresentable::build(t.clone(), SubKind::SegalCore, gens)
}

struct Empty;

impl DendroidalSet for Empty {
    fn dendrices(&self, _: &Arc<Tree>) -> Vec<Dendrex> {
        vec![]
    }
    fn act(&self, _: &OmegaMap, x: &Dendrex) -> Dendrex {
        panic!("the empty set has no dendrex {x}")
    }
    fn contains(&self, _: &Arc<Tree>, _: &Dendrex) -> bool {
        false
    }
    fn corolla_arity_bound(&self) -> ArityBound {
        ArityBound::Finite(0)
    }
    fn effective_arity_bound(&self) -> usize {
        0
    }
    fn describe(&self) -> String {
        "empty".into()
    }
}

struct Terminal;

impl DendroidalSet for Terminal {
    fn dendrices(&self, _: &Arc<Tree>) -> Vec<Dendrex> {
        vec![Dendrex::Point]
    }
    fn act(&self, _: &OmegaMap, _: &Dendrex) -> Dendrex {
        Dendrex::Point
    }
    fn contains(&self, _: &Arc<Tree>, x: &Dendrex) -> bool {
        *x == Dendrex::Point
    }
    fn corolla_arity_bound(&self) -> ArityBound {
        ArityBound::Unbounded
    }
    fn effective_arity_bound(&self) -> usize {
        0
    }
    fn describe(&self) -> String {
        "terminal".into()
    }
}

pub fn empty() -> DSet {
    Arc::new(Empty)
}

pub fn terminal() -> DSet {
    Arc::new(Terminal)
}

/// The unique map into the terminal set.
pub fn to_terminal(d: &DSet) -> DendMap {
    DendMap::new(d.clone(), terminal(), |_, _| Dendrex::Point)
}

struct Union {
    parts: Vec<DSet>,
}

impl DendroidalSet for Union {
    fn dendrices(&self, shape: &Arc<Tree>) -> Vec<Dendrex> {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.dendrices(shape).into_iter().map(move |x| Dendrex::Summand(i, Box::new(x))))
            .collect()
    }

    fn act(&self, map: &OmegaMap, x: &Dendrex) -> Dendrex {
        match x {
            Dendrex::Summand(i, y) => Dendrex::Summand(*i, Box::new(self.parts[*i].act(map, y))),
            _ => panic!("not a dendrex of a disjoint union: {x}"),
        }
    }

    fn contains(&self, shape: &Arc<Tree>, x: &Dendrex) -> bool {
        match x {
            Dendrex::Summand(i, y) => self.parts.get(*i).is_some_and(|p| p.contains(shape, y)),
            _ => false,
        }
    }

    fn corolla_arity_bound(&self) -> ArityBound {
        self.parts.iter().fold(ArityBound::Finite(0), |acc, p| acc.max(p.corolla_arity_bound()))
    }

    fn effective_arity_bound(&self) -> usize {
        self.parts.iter().map(|p| p.effective_arity_bound()).max().unwrap_or(0)
    }

    fn label(&self, shape: &Tree, x: &Dendrex) -> String {
        match x {
            Dendrex::Summand(i, y) => format!("{i}:{}", self.parts[*i].label(shape, y)),
            _ => x.to_string(),
        }
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self.parts.iter().map(|p| p.describe()).collect();
        format!("union({})", parts.join(", "))
    }
}

/// The disjoint union with its summand inclusions.
pub fn disjoint_union(parts: Vec<DSet>) -> (DSet, Vec<DendMap>) {
    let u: DSet = Arc::new(Union { parts: parts.clone() });
    let injections = parts
        .iter()
        .enumerate()
        .map(|(i, p)| DendMap::new(p.clone(), u.clone(), move |_, x| Dendrex::Summand(i, Box::new(x.clone()))))
        .collect();
    (u, injections)
}

/// Boundary data of a stored triangle: an edge or the degenerate edge at a
/// vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TriangleFace {
    Edge(usize),
    Degenerate(usize),
}

/// A finite simplicial set given by its nondegenerate simplices in
/// dimensions 0, 1 and 2. Edge `(s, d)` has `d1 = s` and `d0 = d`; a
/// triangle lists `[d0, d1, d2]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialSetFin {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    triangles: Vec<[TriangleFace; 3]>,
}

impl SimplicialSetFin {
    pub fn new(
        vertices: usize,
        edges: Vec<(usize, usize)>,
        triangles: Vec<[TriangleFace; 3]>,
    ) -> Result<SimplicialSetFin, DsetError> {
        let x = SimplicialSetFin {
            vertices,
            edges,
            triangles,
        };
        for (i, &(s, d)) in x.edges.iter().enumerate() {
            if s >= vertices || d >= vertices {
                return Err(DsetError::Simplicial(format!("edge {i} has an endpoint out of range")));
            }
        }
        for (i, t) in x.triangles.iter().enumerate() {
            for f in t {
                let ok = match *f {
                    TriangleFace::Edge(e) => e < x.edges.len(),
                    TriangleFace::Degenerate(v) => v < vertices,
                };
                if !ok {
                    return Err(DsetError::Simplicial(format!("triangle {i} has a face out of range")));
                }
            }
            let (d0, d1, d2) = (x.endpoints(t[0]), x.endpoints(t[1]), x.endpoints(t[2]));
            if d2.0 != d1.0 || d2.1 != d0.0 || d1.1 != d0.1 {
                return Err(DsetError::Simplicial(format!("triangle {i} violates the face identities")));
            }
        }
        Ok(x)
    }

    pub fn point() -> SimplicialSetFin {
        SimplicialSetFin::discrete(1)
    }

    pub fn discrete(n: usize) -> SimplicialSetFin {
        SimplicialSetFin {
            vertices: n,
            edges: vec![],
            triangles: vec![],
        }
    }

    /// `Δ[1]`.
    pub fn interval() -> SimplicialSetFin {
        SimplicialSetFin {
            vertices: 2,
            edges: vec![(0, 1)],
            triangles: vec![],
        }
    }

    /// The nerve of the poset `0 < 1 < 2`, which is `Δ[2]`.
    pub fn triangle() -> SimplicialSetFin {
        SimplicialSetFin {
            vertices: 3,
            edges: vec![(0, 1), (0, 2), (1, 2)],
            triangles: vec![[TriangleFace::Edge(2), TriangleFace::Edge(1), TriangleFace::Edge(0)]],
        }
    }

    /// A random simplicial set with between one and `max_vertices` vertices,
    /// a few edges, and triangles on composable pairs that have a closing
    /// edge.
    pub fn random<R: Rng>(rng: &mut R, max_vertices: usize) -> SimplicialSetFin {
        let n = rng.gen_range(1..=max_vertices.max(1));
        let edge_count = rng.gen_range(0..=n + 1);
        let edges: Vec<(usize, usize)> = (0..edge_count).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        let mut triangles = Vec::new();
        for (i, &(a, b)) in edges.iter().enumerate() {
            for (j, &(b2, c)) in edges.iter().enumerate() {
                if b2 != b || !rng.gen_bool(0.3) {
                    continue;
                }
                if let Some(k) = edges.iter().position(|&(s, d)| s == a && d == c) {
                    triangles.push([TriangleFace::Edge(j), TriangleFace::Edge(k), TriangleFace::Edge(i)]);
                }
            }
        }
        SimplicialSetFin::new(n, edges, triangles).expect("random data is consistent")
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[TriangleFace; 3]] {
        &self.triangles
    }

    fn endpoints(&self, f: TriangleFace) -> (usize, usize) {
        match f {
            TriangleFace::Edge(e) => self.edges[e],
            TriangleFace::Degenerate(v) => (v, v),
        }
    }

    /// The face of `cell` spanned by the sorted vertex positions `image`,
    /// in normal form.
    fn face_of_cell(&self, cell: Cell, image: &[usize]) -> (Cell, Vec<usize>) {
        match (cell, image) {
            (Cell::Vertex(_), _) | (Cell::Edge(_), [0, 1]) | (Cell::Triangle(_), [0, 1, 2]) => {
                (cell, (0..=cell.dim()).collect())
            }
            (Cell::Edge(e), [i]) => {
                let (s, d) = self.edges[e];
                (Cell::Vertex(if *i == 0 { s } else { d }), vec![0])
            }
            (Cell::Triangle(t), [i]) => {
                let (v0, v1) = self.endpoints(self.triangles[t][2]);
                let v2 = self.endpoints(self.triangles[t][1]).1;
                (Cell::Vertex([v0, v1, v2][*i]), vec![0])
            }
            (Cell::Triangle(t), [i, j]) => {
                // the omitted position names the face
                let omitted = 3 - i - j;
                match self.triangles[t][omitted] {
                    TriangleFace::Edge(e) => (Cell::Edge(e), vec![0, 1]),
                    TriangleFace::Degenerate(v) => (Cell::Vertex(v), vec![0, 0]),
                }
            }
            _ => unreachable!("image {image:?} is not a face of {cell:?}"),
        }
    }

    /// `θ^*(x)` for `x = surj^*(cell)` and a monotone `θ: [m] → [n]`.
    pub fn act_monotone(&self, theta: &[usize], cell: Cell, surj: &[usize]) -> (Cell, Vec<usize>) {
        let u: Vec<usize> = theta.iter().map(|&i| surj[i]).collect();
        let mut image = u.clone();
        image.dedup();
        let lower: Vec<usize> = u.iter().map(|x| image.binary_search(x).expect("in image")).collect();
        let (c, t) = self.face_of_cell(cell, &image);
        (c, lower.iter().map(|&i| t[i]).collect())
    }

    /// Every `n`-simplex, degenerate ones included.
    pub fn simplices(&self, n: usize) -> Vec<(Cell, Vec<usize>)> {
        let mut out = Vec::new();
        for k in 0..=n.min(2) {
            let cells: Vec<Cell> = match k {
                0 => (0..self.vertices).map(Cell::Vertex).collect(),
                1 => (0..self.edges.len()).map(Cell::Edge).collect(),
                _ => (0..self.triangles.len()).map(Cell::Triangle).collect(),
            };
            if cells.is_empty() {
                continue;
            }
            for surj in monotone_surjections(n, k) {
                for &c in &cells {
                    out.push((c, surj.clone()));
                }
            }
        }
        out
    }

    /// Number of connected components of the underlying graph.
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for &(s, d) in &self.edges {
            let (a, b) = (find(&mut parent, s), find(&mut parent, d));
            parent[a] = b;
        }
        (0..self.vertices).filter(|&v| find(&mut parent, v) == v).count()
    }
}

/// Monotone surjections `[n] → [k]` as value lists.
fn monotone_surjections(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(pos: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *cur.last().expect("starts at 0");
        if pos > n {
            if last == k {
                out.push(cur.clone());
            }
            return;
        }
        for next in [last, last + 1] {
            if next <= k && k - next <= n - pos {
                cur.push(next);
                go(pos + 1, n, k, cur, out);
                cur.pop();
            }
        }
    }
    go(1, n, k, &mut vec![0], &mut out);
    out
}

impl fmt::Display for SimplicialSetFin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices {}", self.vertices)?;
        for (s, d) in &self.edges {
            writeln!(f, "edge {s} {d}")?;
        }
        for t in &self.triangles {
            let parts: Vec<String> = t
                .iter()
                .map(|x| match x {
                    TriangleFace::Edge(e) => e.to_string(),
                    TriangleFace::Degenerate(v) => format!("s{v}"),
                })
                .collect();
            writeln!(f, "triangle {}", parts.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for SimplicialSetFin {
    type Err = DsetError;

    /// Line format: `vertices N`, then `edge S D` lines, then
    /// `triangle D0 D1 D2` lines whose entries are edge indices or `sV`.
    /// `#` starts a comment.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, msg: &str| DsetError::Simplicial(format!("line {}: {msg}", line + 1));
        let mut vertices = None;
        let mut edges = Vec::new();
        let mut triangles = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            let num = |w: &str| w.parse::<usize>().map_err(|_| err(ln, &format!("`{w}` is not a number")));
            match words.as_slice() {
                ["vertices", n] => vertices = Some(num(n)?),
                ["edge", s, d] => edges.push((num(s)?, num(d)?)),
                ["triangle", a, b, c] => {
                    let face = |w: &str| -> Result<TriangleFace, DsetError> {
                        match w.strip_prefix('s') {
                            Some(v) => Ok(TriangleFace::Degenerate(num(v)?)),
                            None => Ok(TriangleFace::Edge(num(w)?)),
                        }
                    };
                    triangles.push([face(a)?, face(b)?, face(c)?]);
                }
                _ => return Err(err(ln, "expected `vertices N`, `edge S D` or `triangle D0 D1 D2`")),
            }
        }
        let vertices = vertices.ok_or_else(|| DsetError::Simplicial("missing `vertices` line".into()))?;
        SimplicialSetFin::new(vertices, edges, triangles)
    }
}

/// `i_!X`: `X` on linear trees, empty elsewhere.
struct IShriek {
    x: SimplicialSetFin,
}

fn linear_positions(t: &Tree) -> Option<Vec<usize>> {
    let order = t.linear_order()?;
    let mut pos = vec![0; t.num_edges()];
    for (i, &e) in order.iter().enumerate() {
        pos[e] = i;
    }
    Some(pos)
}

impl DendroidalSet for IShriek {
    fn dendrices(&self, shape: &Arc<Tree>) -> Vec<Dendrex> {
        match shape.linear_order() {
            Some(order) => self
                .x
                .simplices(order.len() - 1)
                .into_iter()
                .map(|(cell, surj)| Dendrex::Simplex { cell, surj })
                .collect(),
            None => vec![],
        }
    }

    fn act(&self, map: &OmegaMap, x: &Dendrex) -> Dendrex {
        let Dendrex::Simplex { cell, surj } = x else {
            panic!("not a simplex: {x}")
        };
        let s_order = map.source().linear_order().expect("linear source");
        let t_pos = linear_positions(map.target()).expect("linear target");
        let theta: Vec<usize> = s_order.iter().map(|&e| t_pos[map.apply(e)]).collect();
        let (cell, surj) = self.x.act_monotone(&theta, *cell, surj);
        Dendrex::Simplex { cell, surj }
    }

    fn contains(&self, shape: &Arc<Tree>, x: &Dendrex) -> bool {
        let (Some(order), Dendrex::Simplex { cell, surj }) = (shape.linear_order(), x) else {
            return false;
        };
        let in_range = match *cell {
            Cell::Vertex(i) => i < self.x.vertices,
            Cell::Edge(i) => i < self.x.edges.len(),
            Cell::Triangle(i) => i < self.x.triangles.len(),
        };
        in_range
            && surj.len() == order.len()
            && surj.first() == Some(&0)
            && surj.last() == Some(&cell.dim())
            && surj.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1)
    }

    fn corolla_arity_bound(&self) -> ArityBound {
        ArityBound::Finite(1)
    }

    fn effective_arity_bound(&self) -> usize {
        1
    }

    fn describe(&self) -> String {
        format!(
            "simplicial({} vertices, {} edges, {} triangles)",
            self.x.vertices,
            self.x.edges.len(),
            self.x.triangles.len()
        )
    }
}

pub fn i_shriek(x: &SimplicialSetFin) -> DSet {
    Arc::new(IShriek { x: x.clone() })
}

/// The dendroidal nerve of a permutative groupoid.
struct Nerve {
    p: Arc<PermutativeGroupoid>,
    out_of: Vec<Vec<MorId>>,
}

/// How to compute the operation a source vertex is sent to.
struct VertexPlan {
    /// Postorder program over the spanned subtree: `Ok(e)` pushes the
    /// identity of the colour of `e`, `Err((w, n))` pops `n` results,
    /// tensors them and composes with the morphism at `w`.
    program: Vec<Result<EdgeId, (VertexId, usize)>>,
    /// Target edges of the source inputs, in source order.
    inputs: Vec<EdgeId>,
    /// `perm[k]` is the source input whose image is the `k`-th leaf met.
    perm: Vec<usize>,
    output: EdgeId,
}

impl Nerve {
    fn plan(&self, map: &OmegaMap) -> Vec<VertexPlan> {
        let s = map.source();
        let t = map.target();
        s.vertices()
            .iter()
            .map(|v| {
                let inputs: Vec<EdgeId> = v.inputs.iter().map(|&i| map.apply(i)).collect();
                let output = map.apply(v.output);
                let leaves: HashSet<EdgeId> = inputs.iter().copied().collect();
                let mut program = Vec::new();
                let mut seq = Vec::new();
                fn emit(
                    t: &Tree,
                    e: EdgeId,
                    leaves: &HashSet<EdgeId>,
                    program: &mut Vec<Result<EdgeId, (VertexId, usize)>>,
                    seq: &mut Vec<EdgeId>,
                ) {
                    if leaves.contains(&e) {
                        program.push(Ok(e));
                        seq.push(e);
                        return;
                    }
                    let w = t.vertex_above(e).expect("valid maps span subtrees");
                    for &i in &t.vertex(w).inputs {
                        emit(t, i, leaves, program, seq);
                    }
                    program.push(Err((w, t.vertex(w).arity())));
                }
                emit(t, output, &leaves, &mut program, &mut seq);
                let perm = seq
                    .iter()
                    .map(|e| inputs.iter().position(|x| x == e).expect("leaf is an input image"))
                    .collect();
                VertexPlan {
                    program,
                    inputs,
                    perm,
                    output,
                }
            })
            .collect()
    }

    fn run(&self, map: &OmegaMap, plans: &[VertexPlan], x: &Dendrex) -> Dendrex {
        let Dendrex::Nerve { colours, ops } = x else {
            panic!("not a nerve dendrex: {x}")
        };
        let p = &self.p;
        let new_colours: Vec<ObjId> = map.edges().iter().map(|&e| colours[e]).collect();
        let new_ops = if p.is_discrete() {
            plans.iter().map(|pl| p.identity(colours[pl.output])).collect()
        } else {
            let mut stack: Vec<MorId> = Vec::new();
            plans
                .iter()
                .map(|pl| {
                    stack.clear();
                    for step in &pl.program {
                        match *step {
                            Ok(e) => stack.push(p.identity(colours[e])),
                            Err((w, n)) => {
                                let args = stack.split_off(stack.len() - n);
                                let m = p.tensor_all_morphisms(&args);
                                stack.push(p.compose(ops[w], m));
                            }
                        }
                    }
                    let composite = stack.pop().expect("program leaves one result");
                    let objs: Vec<ObjId> = pl.inputs.iter().map(|&e| colours[e]).collect();
                    p.compose(composite, p.permutation_iso(&objs, &pl.perm))
                })
                .collect()
        };
        Dendrex::Nerve {
            colours: new_colours,
            ops: new_ops,
        }
    }
}

impl DendroidalSet for Nerve {
    fn dendrices(&self, shape: &Arc<Tree>) -> Vec<Dendrex> {
        // vertices ordered so that inputs are coloured before outputs
        let mut order = Vec::new();
        let mut stack = vec![(shape.root(), false)];
        while let Some((e, done)) = stack.pop() {
            if let Some(v) = shape.vertex_above(e) {
                if done {
                    order.push(v);
                } else {
                    stack.push((e, true));
                    for &i in &shape.vertex(v).inputs {
                        stack.push((i, false));
                    }
                }
            }
        }
        let leaves = shape.leaves();
        let mut colours = vec![0; shape.num_edges()];
        let mut ops = vec![0; shape.num_vertices()];
        let mut out = Vec::new();
        #[allow(clippy::too_many_arguments)]
        fn go(
            nerve: &Nerve,
            shape: &Tree,
            leaves: &[EdgeId],
            order: &[VertexId],
            k: usize,
            colours: &mut Vec<ObjId>,
            ops: &mut Vec<MorId>,
            out: &mut Vec<Dendrex>,
        ) {
            let p = &nerve.p;
            if k < leaves.len() {
                for o in 0..p.num_objects() {
                    colours[leaves[k]] = o;
                    go(nerve, shape, leaves, order, k + 1, colours, ops, out);
                }
                return;
            }
            let j = k - leaves.len();
            if j == order.len() {
                out.push(Dendrex::Nerve {
                    colours: colours.clone(),
                    ops: ops.clone(),
                });
                return;
            }
            let v = shape.vertex(order[j]);
            let ins: Vec<ObjId> = v.inputs.iter().map(|&i| colours[i]).collect();
            for &m in &nerve.out_of[p.tensor_all(&ins)] {
                colours[v.output] = p.morphism(m).dst;
                ops[order[j]] = m;
                go(nerve, shape, leaves, order, k + 1, colours, ops, out);
            }
        }
        go(self, shape, &leaves, &order, 0, &mut colours, &mut ops, &mut out);
        out
    }

    fn act(&self, map: &OmegaMap, x: &Dendrex) -> Dendrex {
        let plans = self.plan(map);
        self.run(map, &plans, x)
    }

    fn act_all(&self, map: &OmegaMap, xs: &[Dendrex]) -> Vec<Dendrex> {
        let plans = self.plan(map);
        xs.iter().map(|x| self.run(map, &plans, x)).collect()
    }

    fn contains(&self, shape: &Arc<Tree>, x: &Dendrex) -> bool {
        let Dendrex::Nerve { colours, ops } = x else {
            return false;
        };
        let p = &self.p;
        if colours.len() != shape.num_edges()
            || ops.len() != shape.num_vertices()
            || colours.iter().any(|&c| c >= p.num_objects())
            || ops.iter().any(|&m| m >= p.num_morphisms())
        {
            return false;
        }
        shape.vertices().iter().zip(ops).all(|(v, &m)| {
            let ins: Vec<ObjId> = v.inputs.iter().map(|&i| colours[i]).collect();
            let mm = p.morphism(m);
            mm.src == p.tensor_all(&ins) && mm.dst == colours[v.output]
        })
    }

    fn corolla_arity_bound(&self) -> ArityBound {
        ArityBound::Unbounded
    }

    fn effective_arity_bound(&self) -> usize {
        2
    }

    fn label(&self, shape: &Tree, x: &Dendrex) -> String {
        match x {
            Dendrex::Nerve { colours, ops } if shape.is_eta() && ops.is_empty() => {
                self.p.object_name(colours[0]).to_string()
            }
            Dendrex::Nerve { colours, ops } => {
                let cs: Vec<&str> = colours.iter().map(|&c| self.p.object_name(c)).collect();
                let ms: Vec<&str> = ops.iter().map(|&m| self.p.morphism(m).name.as_str()).collect();
                format!("({} | {})", cs.join(","), ms.join(","))
            }
            _ => x.to_string(),
        }
    }

    fn describe(&self) -> String {
        format!("nerve({} objects, {} morphisms)", self.p.num_objects(), self.p.num_morphisms())
    }
}

pub fn nerve(p: &PermutativeGroupoid) -> DSet {
    let mut out_of = vec![Vec::new(); p.num_objects()];
    for m in 0..p.num_morphisms() {
        out_of[p.morphism(m).src].push(m);
    }
    Arc::new(Nerve {
        p: Arc::new(p.clone()),
        out_of,
    })
}

/// The pushout of `d ← Λ^a[T] → Ω[T]`.
struct Attach {
    d: DSet,
    horn: Arc<SubRepresentable>,
    attaching: DendMap,
}

impl DendroidalSet for Attach {
    fn dendrices(&self, shape: &Arc<Tree>) -> Vec<Dendrex> {
        let mut out: Vec<Dendrex> = self.d.dendrices(shape).into_iter().map(|x| Dendrex::Old(Box::new(x))).collect();
        out.extend(
            sorted_hom(shape, self.horn.tree())
                .into_iter()
                .filter(|e| !self.horn.contains_map(shape, e))
                .map(Dendrex::New),
        );
        out
    }

    fn act(&self, map: &OmegaMap, x: &Dendrex) -> Dendrex {
        match x {
            Dendrex::Old(y) => Dendrex::Old(Box::new(self.d.act(map, y))),
            Dendrex::New(e) => {
                let e2 = precompose(map, e);
                if self.horn.contains_map(map.source(), &e2) {
                    Dendrex::Old(Box::new(self.attaching.apply(map.source(), &Dendrex::Arrow(e2))))
                } else {
                    Dendrex::New(e2)
                }
            }
            _ => panic!("not a dendrex of an attachment: {x}"),
        }
    }

    fn contains(&self, shape: &Arc<Tree>, x: &Dendrex) -> bool {
        match x {
            Dendrex::Old(y) => self.d.contains(shape, y),
            Dendrex::New(e) => {
                omega::validate_map(shape, self.horn.tree(), e).is_ok() && !self.horn.contains_map(shape, e)
            }
            _ => false,
        }
    }

    fn corolla_arity_bound(&self) -> ArityBound {
        self.d.corolla_arity_bound().max(ArityBound::Finite(self.horn.tree().num_edges()))
    }

    fn effective_arity_bound(&self) -> usize {
        self.d.effective_arity_bound().max(self.horn.tree().max_arity())
    }

    fn label(&self, shape: &Tree, x: &Dendrex) -> String {
        match x {
            Dendrex::Old(y) => self.d.label(shape, y),
            Dendrex::New(e) => format!("new:{}", self.horn.label(shape, &Dendrex::Arrow(e.clone()))),
            _ => x.to_string(),
        }
    }

    fn describe(&self) -> String {
        format!("attach({}, {})", self.d.describe(), self.horn.describe())
    }
}

/// Reads a map out of a horn off its faces, checking that the face values
/// are dendrices of the target agreeing on every maximal common subface.
fn face_values(h: &SubRepresentable, f: &DendMap) -> Result<Vec<Dendrex>, DsetError> {
    let t = h.tree();
    let gens = h.generators();
    let target = f.target();
    let mut values = Vec::with_capacity(gens.len());
    for g in gens {
        let v = f.apply(g.source(), &Dendrex::Arrow(g.edges().to_vec()));
        if !target.contains(g.source(), &v) {
            return Err(DsetError::NotNatural(format!("{v} is not a dendrex of shape {}", g.source())));
        }
        values.push(v);
    }
    for j in 0..gens.len() {
        for i in 0..j {
            for s in omega::maximal_common_subfaces(t, &gens[i], &gens[j]) {
                let hi = factor_through(&s, &gens[i]).expect("common subface");
                let hj = factor_through(&s, &gens[j]).expect("common subface");
                let x = f.apply(s.source(), &Dendrex::Arrow(s.edges().to_vec()));
                if target.act(&hi, &values[i]) != x || target.act(&hj, &values[j]) != x {
                    return Err(DsetError::NotNatural(format!("face values disagree on {s}")));
                }
            }
        }
    }
    Ok(values)
}

/// Attaches `Ω[T]` to `d` along `attaching: Λ^a[T] → d`. Returns the
/// pushout and the inclusion of `d`.
pub fn attach_cell(d: &DSet, t: &Arc<Tree>, a: FaceLabel, attaching: &DendMap) -> Result<(DSet, DendMap), DsetError> {
    let h = horn(t, a)?;
    // evaluate the attaching map on our own copy of the horn
    let probe = DendMap {
        source: h.as_dset(),
        target: d.clone(),
        func: attaching.func.clone(),
    };
    let attaching = h.extend(d, face_values(&h, &probe)?);
    let p: DSet = Arc::new(Attach {
        d: d.clone(),
        horn: h,
        attaching,
    });
    let inclusion = DendMap::new(d.clone(), p.clone(), |_, x| Dendrex::Old(Box::new(x.clone())));
    Ok((p, inclusion))
}

/// The pushout of `terminal ← D₀ → D`.
struct Quotient {
    d: DSet,
    inclusion: DendMap,
    images: ShapeCache,
}

impl Quotient {
    fn in_image(&self, shape: &Arc<Tree>, x: &Dendrex) -> bool {
        let v = self.images.get(shape, || {
            let sub = self.inclusion.source();
            let mut v: Vec<Dendrex> = sub.dendrices(shape).iter().map(|x| self.inclusion.apply(shape, x)).collect();
            v.sort();
            v
        });
        v.binary_search(x).is_ok()
    }
}

impl DendroidalSet for Quotient {
    fn dendrices(&self, shape: &Arc<Tree>) -> Vec<Dendrex> {
        let mut out = vec![Dendrex::Point];
        out.extend(
            self.d
                .dendrices(shape)
                .into_iter()
                .filter(|x| !self.in_image(shape, x))
                .map(|x| Dendrex::Kept(Box::new(x))),
        );
        out
    }

    fn act(&self, map: &OmegaMap, x: &Dendrex) -> Dendrex {
        match x {
            Dendrex::Point => Dendrex::Point,
            Dendrex::Kept(y) => {
                let z = self.d.act(map, y);
                if self.in_image(map.source(), &z) {
                    Dendrex::Point
                } else {
                    Dendrex::Kept(Box::new(z))
                }
            }
            _ => panic!("not a dendrex of a quotient: {x}"),
        }
    }

    fn contains(&self, shape: &Arc<Tree>, x: &Dendrex) -> bool {
        match x {
            Dendrex::Point => true,
            Dendrex::Kept(y) => self.d.contains(shape, y) && !self.in_image(shape, y),
            _ => false,
        }
    }

    fn corolla_arity_bound(&self) -> ArityBound {
        ArityBound::Unbounded
    }

    fn effective_arity_bound(&self) -> usize {
        self.d.effective_arity_bound()
    }

    fn label(&self, shape: &Tree, x: &Dendrex) -> String {
        match x {
            Dendrex::Kept(y) => self.d.label(shape, y),
            _ => x.to_string(),
        }
    }

    fn describe(&self) -> String {
        format!("quotient({}, {})", self.d.describe(), self.inclusion.source().describe())
    }
}

/// Default shapes for checking that a map is an inclusion of a subobject.
pub fn inclusion_window() -> Vec<Arc<Tree>> {
    shape_window(3)
}

/// `D / D₀` for an inclusion `D₀ → D`, with the projection. The inclusion
/// is checked to be natural and injective on [`inclusion_window`].
pub fn quotient(inclusion: &DendMap) -> Result<(DSet, DendMap), DsetError> {
    let window = inclusion_window();
    inclusion.check_injective(&window)?;
    inclusion.check_naturality(&window)?;
    let q = Arc::new(Quotient {
        d: inclusion.target().clone(),
        inclusion: inclusion.clone(),
        images: ShapeCache::default(),
    });
    let q2 = q.clone();
    let projection = DendMap::new(inclusion.target().clone(), q.clone(), move |s, x| {
        if q2.in_image(s, x) {
            Dendrex::Point
        } else {
            Dendrex::Kept(Box::new(x.clone()))
        }
    });
    Ok((q, projection))
}
