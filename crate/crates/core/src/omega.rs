//! Morphisms of Ω as edge maps, faces, and hom-set enumeration.
//!
//! A morphism `S → T` is a map of the free coloured operads generated by the
//! two trees. Since `Ω(S)` is free on the vertices of `S`, such a map is fixed
//! by what it does to edges: each vertex of `S` has to land on the unique
//! operation of `Ω(T)` whose inputs and output are the images of its edges,
//! and that operation exists exactly when the images span a subtree.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::tree::{EdgeId, Subtree, Tree, VertexId};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OmegaMap {
    source: Arc<Tree>,
    target: Arc<Tree>,
    edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MapViolation {
    #[error("edge map has {got} entries, source has {expected} edges")]
    WrongLength { expected: usize, got: usize },
    #[error("edge `{0}` is sent outside the target")]
    OutOfRange(String),
    #[error("inputs of the vertex below `{0}` are not sent to distinct edges")]
    CollidingInputs(String),
    #[error("the vertex below `{0}` is not sent to an operation of the target")]
    NoOperation(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OmegaError {
    #[error("cannot compose: target of the first map is not the source of the second")]
    ShapeMismatch,
    #[error("`{0}` is not an inner edge")]
    NotInner(String),
    #[error("`{0}` does not label a face of the tree")]
    UnknownLabel(String),
    #[error(transparent)]
    Invalid(#[from] MapViolation),
}

/// Checks that an edge map is a morphism of Ω.
pub fn validate_map(source: &Tree, target: &Tree, edges: &[EdgeId]) -> Result<(), MapViolation> {
    if edges.len() != source.num_edges() {
        return Err(MapViolation::WrongLength {
            expected: source.num_edges(),
            got: edges.len(),
        });
    }
    for (e, &img) in edges.iter().enumerate() {
        if img >= target.num_edges() {
            return Err(MapViolation::OutOfRange(source.name(e).to_string()));
        }
    }
    for v in source.vertices() {
        let images: Vec<EdgeId> = v.inputs.iter().map(|&i| edges[i]).collect();
        let distinct: HashSet<EdgeId> = images.iter().copied().collect();
        if distinct.len() != images.len() {
            return Err(MapViolation::CollidingInputs(source.name(v.output).to_string()));
        }
        if target.spanned_subtree(edges[v.output], &images).is_none() {
            return Err(MapViolation::NoOperation(source.name(v.output).to_string()));
        }
    }
    Ok(())
}

impl OmegaMap {
    pub fn new(source: Arc<Tree>, target: Arc<Tree>, edges: Vec<EdgeId>) -> Result<OmegaMap, MapViolation> {
        validate_map(&source, &target, &edges)?;
        Ok(OmegaMap { source, target, edges })
    }

    pub(crate) fn new_unchecked(source: Arc<Tree>, target: Arc<Tree>, edges: Vec<EdgeId>) -> OmegaMap {
        debug_assert!(validate_map(&source, &target, &edges).is_ok());
        OmegaMap { source, target, edges }
    }

    pub fn identity(t: &Arc<Tree>) -> OmegaMap {
        OmegaMap {
            source: t.clone(),
            target: t.clone(),
            edges: t.edges().collect(),
        }
    }

    pub fn source(&self) -> &Arc<Tree> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Tree> {
        &self.target
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn apply(&self, e: EdgeId) -> EdgeId {
        self.edges[e]
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.edges.iter().enumerate().all(|(i, &e)| i == e)
    }

    pub fn is_injective(&self) -> bool {
        let set: HashSet<EdgeId> = self.edges.iter().copied().collect();
        set.len() == self.edges.len()
    }

    /// Sorted, deduplicated image edges.
    pub fn image(&self) -> Vec<EdgeId> {
        let set: BTreeSet<EdgeId> = self.edges.iter().copied().collect();
        set.into_iter().collect()
    }

    /// The operation of the target that the vertex `v` of the source is sent to.
    pub fn vertex_image(&self, v: VertexId) -> Subtree {
        let vert = self.source.vertex(v);
        let images: Vec<EdgeId> = vert.inputs.iter().map(|&i| self.edges[i]).collect();
        self.target
            .spanned_subtree(self.edges[vert.output], &images)
            .expect("valid maps send vertices to operations")
    }

    /// Image edges together with the target vertices hit by vertex images.
    /// Two injective maps with the same key have the same image subobject;
    /// the edge image alone cannot see a chopped nullary vertex.
    pub fn subobject_key(&self) -> (Vec<EdgeId>, Vec<VertexId>) {
        let mut vertices: Vec<VertexId> = (0..self.source.num_vertices())
            .flat_map(|v| self.vertex_image(v).vertices)
            .collect();
        vertices.sort_unstable();
        vertices.dedup();
        (self.image(), vertices)
    }
}

/// `g ∘ f`.
pub fn compose(g: &OmegaMap, f: &OmegaMap) -> Result<OmegaMap, OmegaError> {
    if f.target != g.source {
        return Err(OmegaError::ShapeMismatch);
    }
    Ok(OmegaMap {
        source: f.source.clone(),
        target: g.target.clone(),
        edges: f.edges.iter().map(|&e| g.edges[e]).collect(),
    })
}

/// Given an injective `delta: R → T` and `f: S → T`, the unique `h: S → R`
/// with `delta ∘ h = f`, when it exists.
pub fn factor_through(f: &OmegaMap, delta: &OmegaMap) -> Option<OmegaMap> {
    let inverse = inverse_table(delta);
    factor_with_table(f.source(), f.edges(), delta.source(), &inverse)
}

pub(crate) fn inverse_table(delta: &OmegaMap) -> Vec<Option<EdgeId>> {
    let mut inverse = vec![None; delta.target.num_edges()];
    for (e, &img) in delta.edges.iter().enumerate() {
        debug_assert!(inverse[img].is_none(), "factoring needs an injective map");
        inverse[img] = Some(e);
    }
    inverse
}

pub(crate) fn factor_with_table(
    source: &Arc<Tree>,
    edges: &[EdgeId],
    through: &Arc<Tree>,
    inverse: &[Option<EdgeId>],
) -> Option<OmegaMap> {
    let lifted: Option<Vec<EdgeId>> = edges.iter().map(|&e| inverse[e]).collect();
    let lifted = lifted?;
    validate_map(source, through, &lifted).ok()?;
    Some(OmegaMap {
        source: source.clone(),
        target: through.clone(),
        edges: lifted,
    })
}

impl fmt::Display for OmegaMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (e, &img) in self.edges.iter().enumerate() {
            if e > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}->{}", self.source.name(e), self.target.name(img))?;
        }
        write!(f, "}} : {} => {}", self.source, self.target)
    }
}

impl fmt::Debug for OmegaMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OmegaMap({self})")
    }
}

/// Faces are labelled by inner edges, outer vertices, or (for corollas) by
/// the colour they include.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceLabel {
    Inner(EdgeId),
    Outer(VertexId),
    Colour(EdgeId),
}

impl FaceLabel {
    pub fn is_inner(&self) -> bool {
        matches!(self, FaceLabel::Inner(_))
    }

    /// Text form: inner edges and colours by edge name, outer vertices as
    /// `@` followed by the name of their output edge.
    pub fn render(&self, t: &Tree) -> String {
        match *self {
            FaceLabel::Inner(e) | FaceLabel::Colour(e) => t.name(e).to_string(),
            FaceLabel::Outer(v) => format!("@{}", t.name(t.vertex(v).output)),
        }
    }

    pub fn parse(t: &Tree, text: &str) -> Result<FaceLabel, OmegaError> {
        let unknown = || OmegaError::UnknownLabel(text.to_string());
        let label = if let Some(rest) = text.strip_prefix('@') {
            let e = t.edge_by_name(rest).ok_or_else(unknown)?;
            FaceLabel::Outer(t.vertex_above(e).ok_or_else(unknown)?)
        } else {
            let e = t.edge_by_name(text).ok_or_else(unknown)?;
            if t.is_corolla() {
                FaceLabel::Colour(e)
            } else {
                FaceLabel::Inner(e)
            }
        };
        if horn_labels(t).contains(&label) {
            Ok(label)
        } else {
            Err(unknown())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub label: FaceLabel,
    pub map: OmegaMap,
}

/// The inner face contracting `e`.
pub fn inner_face(t: &Arc<Tree>, e: EdgeId) -> Result<OmegaMap, OmegaError> {
    if e >= t.num_edges() || !t.is_inner(e) {
        let name = if e < t.num_edges() { t.name(e).to_string() } else { e.to_string() };
        return Err(OmegaError::NotInner(name));
    }
    let (source, edges) = t.contract_edge(e).expect("inner edges can be contracted");
    Ok(OmegaMap::new_unchecked(Arc::new(source), t.clone(), edges))
}

/// Outer faces: colour inclusions for a corolla, otherwise one face per
/// outer vertex (a vertex all of whose inputs are leaves, or the root vertex
/// when all but one of its inputs are leaves).
pub fn outer_faces(t: &Arc<Tree>) -> Vec<Face> {
    if t.is_eta() {
        return vec![];
    }
    if t.is_corolla() {
        return t
            .edges()
            .map(|e| Face {
                label: FaceLabel::Colour(e),
                map: OmegaMap::new_unchecked(Arc::new(Tree::eta_named(t.name(e))), t.clone(), vec![e]),
            })
            .collect();
    }
    (0..t.num_vertices())
        .filter_map(|v| {
            t.chop_vertex(v).map(|(source, edges)| Face {
                label: FaceLabel::Outer(v),
                map: OmegaMap::new_unchecked(Arc::new(source), t.clone(), edges),
            })
        })
        .collect()
}

pub fn inner_faces(t: &Arc<Tree>) -> Vec<Face> {
    t.inner_edges()
        .into_iter()
        .map(|e| Face {
            label: FaceLabel::Inner(e),
            map: inner_face(t, e).expect("listed as inner"),
        })
        .collect()
}

/// All faces, inner first.
pub fn faces(t: &Arc<Tree>) -> Vec<Face> {
    let mut all = inner_faces(t);
    all.extend(outer_faces(t));
    all
}

pub fn horn_labels(t: &Tree) -> Vec<FaceLabel> {
    if t.is_eta() {
        return vec![];
    }
    if t.is_corolla() {
        return t.edges().map(FaceLabel::Colour).collect();
    }
    let mut labels: Vec<FaceLabel> = t.inner_edges().into_iter().map(FaceLabel::Inner).collect();
    labels.extend((0..t.num_vertices()).filter(|&v| t.chop_vertex(v).is_some()).map(FaceLabel::Outer));
    labels
}

pub fn face(t: &Arc<Tree>, label: FaceLabel) -> Result<OmegaMap, OmegaError> {
    faces(t)
        .into_iter()
        .find(|f| f.label == label)
        .map(|f| f.map)
        .ok_or_else(|| OmegaError::UnknownLabel(format!("{label:?}")))
}

/// Maximal subobjects contained in both injective maps into `t`.
pub fn maximal_common_subfaces(t: &Arc<Tree>, a: &OmegaMap, b: &OmegaMap) -> Vec<OmegaMap> {
    let mut common: Vec<OmegaMap> = subfaces(t)
        .into_iter()
        .filter(|s| factor_through(s, a).is_some() && factor_through(s, b).is_some())
        .collect();
    common.sort_by_key(|s| std::cmp::Reverse(s.source().num_edges() + s.source().num_vertices()));
    let mut maximal: Vec<OmegaMap> = Vec::new();
    for s in common {
        if !maximal.iter().any(|m| factor_through(&s, m).is_some()) {
            maximal.push(s);
        }
    }
    maximal
}

/// Every injective map into `t` obtained by composing faces, one per image,
/// excluding the identity.
pub fn subfaces(t: &Arc<Tree>) -> Vec<OmegaMap> {
    let mut seen: HashSet<(Vec<EdgeId>, Vec<VertexId>)> = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    let id = OmegaMap::identity(t);
    seen.insert(id.subobject_key());
    queue.push_back(id);
    while let Some(rho) = queue.pop_front() {
        for f in faces(rho.source()) {
            let composite = compose(&rho, &f.map).expect("faces compose");
            if seen.insert(composite.subobject_key()) {
                out.push(composite.clone());
                queue.push_back(composite);
            }
        }
    }
    out
}

fn permutations(items: &[EdgeId]) -> Vec<Vec<EdgeId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

/// All morphisms `s → t`, ordered lexicographically by edge map.
pub fn hom(s: &Arc<Tree>, t: &Arc<Tree>) -> Vec<OmegaMap> {
    let mut maps: Vec<Vec<EdgeId>> = Vec::new();
    hom_edge_maps(s, t, |m| maps.push(m.to_vec()));
    maps.sort();
    maps.into_iter()
        .map(|edges| OmegaMap {
            source: s.clone(),
            target: t.clone(),
            edges,
        })
        .collect()
}

/// Streams the edge maps of `hom(s, t)` in unspecified order.
pub(crate) fn hom_edge_maps(s: &Tree, t: &Tree, mut emit: impl FnMut(&[EdgeId])) {
    // vertices of s ordered so that each output is assigned before its inputs
    let mut order = Vec::with_capacity(s.num_vertices());
    let mut stack = vec![s.root()];
    while let Some(e) = stack.pop() {
        if let Some(v) = s.vertex_above(e) {
            order.push(v);
            stack.extend(s.vertex(v).inputs.iter().copied());
        }
    }
    let mut options: HashMap<(EdgeId, usize), Vec<Vec<EdgeId>>> = HashMap::new();
    for x in t.edges() {
        for ls in t.leaf_sets_at(x) {
            let n = ls.len();
            options.entry((x, n)).or_default().extend(permutations(&ls));
        }
    }
    let mut assignment = vec![usize::MAX; s.num_edges()];
    fn extend(
        s: &Tree,
        order: &[VertexId],
        k: usize,
        assignment: &mut Vec<EdgeId>,
        options: &HashMap<(EdgeId, usize), Vec<Vec<EdgeId>>>,
        emit: &mut dyn FnMut(&[EdgeId]),
    ) {
        if k == order.len() {
            emit(assignment);
            return;
        }
        let v = s.vertex(order[k]);
        let x = assignment[v.output];
        if let Some(choices) = options.get(&(x, v.arity())) {
            for choice in choices {
                for (&i, &img) in v.inputs.iter().zip(choice) {
                    assignment[i] = img;
                }
                extend(s, order, k + 1, assignment, options, emit);
            }
        }
    }
    for r in t.edges() {
        assignment[s.root()] = r;
        extend(s, &order, 0, &mut assignment, &options, &mut emit);
    }
}
