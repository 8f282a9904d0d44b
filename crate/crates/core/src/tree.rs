//! Finite rooted non-planar trees, the objects of the tree category Ω.
//!
//! Edges and vertices are addressed by dense indices. Edge names are kept for
//! printing and for the text grammar; they are unique within a tree. Input
//! sequences are stored in a fixed order so that printing and enumeration are
//! deterministic, but no operation here depends on that order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub type EdgeId = usize;
pub type VertexId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub output: EdgeId,
    pub inputs: Vec<EdgeId>,
}

impl Vertex {
    pub fn arity(&self) -> usize {
        self.inputs.len()
    }
}

/// Unvalidated tree data, as read from a file or assembled by hand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeParts {
    pub names: Vec<String>,
    pub root: EdgeId,
    pub vertices: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TreeViolation {
    #[error("tree has no edges")]
    NoEdges,
    #[error("edge index {0} out of range")]
    UnknownEdge(usize),
    #[error("edge name `{0}` is not unique")]
    DuplicateName(String),
    #[error("edge name `{0}` is not of the form [A-Za-z0-9_]+")]
    BadName(String),
    #[error("edge `{0}` is the output of more than one vertex")]
    MultipleOutputs(String),
    #[error("edge `{0}` is an input of more than one vertex")]
    MultipleInputs(String),
    #[error("edge `{0}` occurs twice among the inputs of one vertex")]
    RepeatedInput(String),
    #[error("no edge is free of a vertex below it")]
    NoRoot,
    #[error("more than one edge has no vertex below it: {0:?}")]
    MultipleRoots(Vec<String>),
    #[error("declared root `{declared}` differs from the unique bottom edge `{actual}`")]
    WrongRoot { declared: String, actual: String },
    #[error("a vertex is its own descendant (through edge `{0}`)")]
    Cycle(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("`{0}` is not a leaf of the tree")]
    NotALeaf(String),
    #[error("no edge named `{0}`")]
    UnknownName(String),
    #[error(transparent)]
    Invalid(#[from] TreeViolation),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseTreeError {
    pub position: usize,
    pub message: String,
}

/// A valid finite rooted tree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    names: Vec<String>,
    root: EdgeId,
    vertices: Vec<Vertex>,
    above: Vec<Option<VertexId>>,
    below: Vec<Option<VertexId>>,
}

/// A subtree of an ambient tree: a root edge together with every vertex lying
/// between it and its leaf set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subtree {
    pub root: EdgeId,
    pub edges: Vec<EdgeId>,
    pub vertices: Vec<VertexId>,
    pub leaves: Vec<EdgeId>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Checks every tree invariant and reports the first one that fails.
pub fn validate(parts: &TreeParts) -> Result<(), TreeViolation> {
    let n = parts.names.len();
    if n == 0 {
        return Err(TreeViolation::NoEdges);
    }
    let mut seen = BTreeSet::new();
    for name in &parts.names {
        if !valid_name(name) {
            return Err(TreeViolation::BadName(name.clone()));
        }
        if !seen.insert(name.as_str()) {
            return Err(TreeViolation::DuplicateName(name.clone()));
        }
    }
    if parts.root >= n {
        return Err(TreeViolation::UnknownEdge(parts.root));
    }
    let mut above = vec![None; n];
    let mut below = vec![None; n];
    for (vi, v) in parts.vertices.iter().enumerate() {
        if v.output >= n {
            return Err(TreeViolation::UnknownEdge(v.output));
        }
        if above[v.output].replace(vi).is_some() {
            return Err(TreeViolation::MultipleOutputs(parts.names[v.output].clone()));
        }
        let mut local = BTreeSet::new();
        for &i in &v.inputs {
            if i >= n {
                return Err(TreeViolation::UnknownEdge(i));
            }
            if !local.insert(i) {
                return Err(TreeViolation::RepeatedInput(parts.names[i].clone()));
            }
            if below[i].replace(vi).is_some() {
                return Err(TreeViolation::MultipleInputs(parts.names[i].clone()));
            }
        }
    }
    let bottoms: Vec<EdgeId> = (0..n).filter(|&e| below[e].is_none()).collect();
    match bottoms.len() {
        0 => return Err(TreeViolation::NoRoot),
        1 => {}
        _ => {
            return Err(TreeViolation::MultipleRoots(
                bottoms.iter().map(|&e| parts.names[e].clone()).collect(),
            ))
        }
    }
    if bottoms[0] != parts.root {
        return Err(TreeViolation::WrongRoot {
            declared: parts.names[parts.root].clone(),
            actual: parts.names[bottoms[0]].clone(),
        });
    }
    // Walking down from any edge must reach the root within |vertices| steps.
    for start in 0..n {
        let mut e = start;
        let mut steps = 0;
        while let Some(v) = below[e] {
            e = parts.vertices[v].output;
            steps += 1;
            if steps > parts.vertices.len() {
                return Err(TreeViolation::Cycle(parts.names[start].clone()));
            }
        }
    }
    Ok(())
}

impl Tree {
    pub fn from_parts(parts: TreeParts) -> Result<Tree, TreeViolation> {
        validate(&parts)?;
        let n = parts.names.len();
        let mut above = vec![None; n];
        let mut below = vec![None; n];
        for (vi, v) in parts.vertices.iter().enumerate() {
            above[v.output] = Some(vi);
            for &i in &v.inputs {
                below[i] = Some(vi);
            }
        }
        Ok(Tree {
            names: parts.names,
            root: parts.root,
            vertices: parts.vertices,
            above,
            below,
        })
    }

    pub fn parts(&self) -> TreeParts {
        TreeParts {
            names: self.names.clone(),
            root: self.root,
            vertices: self.vertices.clone(),
        }
    }

    /// The tree with one edge and no vertices.
    pub fn eta() -> Tree {
        Tree::eta_named("x")
    }

    pub fn eta_named(name: &str) -> Tree {
        Tree::from_parts(TreeParts {
            names: vec![name.to_string()],
            root: 0,
            vertices: vec![],
        })
        .expect("single edge is a tree")
    }

    /// The linear tree with `n + 1` edges `a0` (top) … `an` (root).
    pub fn linear(n: usize) -> Tree {
        let names = (0..=n).map(|i| format!("a{i}")).collect();
        let vertices = (0..n)
            .map(|i| Vertex {
                output: i + 1,
                inputs: vec![i],
            })
            .collect();
        Tree::from_parts(TreeParts {
            names,
            root: n,
            vertices,
        })
        .expect("linear tree is valid")
    }

    /// The `n`-corolla with leaves `a1 … an` and root `b`.
    pub fn corolla(n: usize) -> Tree {
        let inputs: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
        Tree::corolla_named(&inputs, "b").expect("corolla names are distinct")
    }

    pub fn corolla_named<S: AsRef<str>>(inputs: &[S], output: &str) -> Result<Tree, TreeViolation> {
        let mut names = vec![output.to_string()];
        names.extend(inputs.iter().map(|s| s.as_ref().to_string()));
        Tree::from_parts(TreeParts {
            names,
            root: 0,
            vertices: vec![Vertex {
                output: 0,
                inputs: (1..=inputs.len()).collect(),
            }],
        })
    }

    /// The two-vertex tree obtained by grafting an `n`-corolla with leaves
    /// `a1 … an` onto the leaf `bk` of a `k`-corolla with leaves `b1 … bk` and
    /// root `c`.
    pub fn grafted_corollas(n: usize, k: usize) -> Tree {
        assert!(k >= 1, "the lower corolla needs a leaf to graft on");
        let bs: Vec<String> = (1..=k).map(|i| format!("b{i}")).collect();
        let lower = Tree::corolla_named(&bs, "c").expect("distinct names");
        let as_: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
        let upper = Tree::corolla_named(&as_, &format!("b{k}")).expect("distinct names");
        let leaf = lower.edge_by_name(&format!("b{k}")).expect("b_k exists");
        graft(&lower, leaf, &upper).expect("b_k is a leaf")
    }

    pub fn num_edges(&self) -> usize {
        self.names.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> std::ops::Range<EdgeId> {
        0..self.names.len()
    }

    pub fn root(&self) -> EdgeId {
        self.root
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v]
    }

    pub fn name(&self, e: EdgeId) -> &str {
        &self.names[e]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.names.iter().position(|n| n == name)
    }

    /// The vertex whose output is `e`, if any.
    pub fn vertex_above(&self, e: EdgeId) -> Option<VertexId> {
        self.above[e]
    }

    /// The vertex that has `e` among its inputs, if any.
    pub fn vertex_below(&self, e: EdgeId) -> Option<VertexId> {
        self.below[e]
    }

    pub fn is_leaf(&self, e: EdgeId) -> bool {
        self.above[e].is_none()
    }

    pub fn is_inner(&self, e: EdgeId) -> bool {
        self.above[e].is_some() && self.below[e].is_some()
    }

    pub fn leaves(&self) -> Vec<EdgeId> {
        self.edges().filter(|&e| self.is_leaf(e)).collect()
    }

    pub fn inner_edges(&self) -> Vec<EdgeId> {
        self.edges().filter(|&e| self.is_inner(e)).collect()
    }

    pub fn is_eta(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_corolla(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn max_arity(&self) -> usize {
        self.vertices.iter().map(Vertex::arity).max().unwrap_or(0)
    }

    /// For a linear tree (η or a chain of unary vertices), the edges listed
    /// from the top leaf down to the root.
    pub fn linear_order(&self) -> Option<Vec<EdgeId>> {
        if self.vertices.iter().any(|v| v.arity() != 1) {
            return None;
        }
        let mut order = vec![self.root];
        let mut e = self.root;
        while let Some(v) = self.above[e] {
            e = self.vertices[v].inputs[0];
            order.push(e);
        }
        order.reverse();
        Some(order)
    }

    /// Edges on the path from `e` down to the root, including both ends.
    pub fn path_to_root(&self, e: EdgeId) -> Vec<EdgeId> {
        let mut path = vec![e];
        let mut cur = e;
        while let Some(v) = self.below[cur] {
            cur = self.vertices[v].output;
            path.push(cur);
        }
        path
    }

    /// True when `lower` lies on the path from `upper` to the root.
    pub fn is_below_or_equal(&self, lower: EdgeId, upper: EdgeId) -> bool {
        let mut cur = upper;
        loop {
            if cur == lower {
                return true;
            }
            match self.below[cur] {
                Some(v) => cur = self.vertices[v].output,
                None => return false,
            }
        }
    }

    /// The unique subtree with root `root` and leaf set exactly `leaves`.
    pub fn spanned_subtree(&self, root: EdgeId, leaves: &[EdgeId]) -> Option<Subtree> {
        let wanted: BTreeSet<EdgeId> = leaves.iter().copied().collect();
        if wanted.len() != leaves.len() {
            return None;
        }
        let mut edges = Vec::new();
        let mut vertices = Vec::new();
        let mut reached = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(e) = stack.pop() {
            edges.push(e);
            if wanted.contains(&e) {
                reached.insert(e);
                continue;
            }
            let v = self.above[e]?;
            vertices.push(v);
            stack.extend(self.vertices[v].inputs.iter().copied());
        }
        if reached.len() != wanted.len() {
            return None;
        }
        edges.sort_unstable();
        vertices.sort_unstable();
        Some(Subtree {
            root,
            edges,
            vertices,
            leaves: wanted.into_iter().collect(),
        })
    }

    /// Every subtree rooted at `root`, including the empty one with leaf set
    /// `{root}`.
    pub fn subtrees_at(&self, root: EdgeId) -> Vec<Subtree> {
        self.leaf_sets_at(root)
            .into_iter()
            .map(|ls| self.spanned_subtree(root, &ls).expect("leaf set comes from a cut"))
            .collect()
    }

    /// Leaf sets (sorted) of all subtrees rooted at `root`.
    pub fn leaf_sets_at(&self, root: EdgeId) -> Vec<Vec<EdgeId>> {
        let mut out = vec![vec![root]];
        if let Some(v) = self.above[root] {
            let mut partial: Vec<Vec<EdgeId>> = vec![vec![]];
            for &i in &self.vertices[v].inputs {
                let options = self.leaf_sets_at(i);
                let mut next = Vec::with_capacity(partial.len() * options.len());
                for p in &partial {
                    for o in &options {
                        let mut q = p.clone();
                        q.extend_from_slice(o);
                        next.push(q);
                    }
                }
                partial = next;
            }
            for mut p in partial {
                p.sort_unstable();
                out.push(p);
            }
        }
        out
    }

    /// Isomorphism-invariant encoding: a leaf is `|`, a vertex is `(` followed
    /// by the sorted codes of its inputs and `)`.
    pub fn canonical_code(&self) -> Vec<u8> {
        self.code_at(self.root)
    }

    pub fn code_at(&self, e: EdgeId) -> Vec<u8> {
        match self.above[e] {
            None => vec![b'|'],
            Some(v) => {
                let mut children: Vec<Vec<u8>> =
                    self.vertices[v].inputs.iter().map(|&i| self.code_at(i)).collect();
                children.sort();
                let mut code = vec![b'('];
                for c in children {
                    code.extend(c);
                }
                code.push(b')');
                code
            }
        }
    }

    /// Builds a tree from a canonical code, naming edges `e0, e1, …` in
    /// preorder.
    pub fn from_code(code: &[u8]) -> Option<Tree> {
        fn go(code: &[u8], pos: &mut usize, parts: &mut TreeParts) -> Option<EdgeId> {
            let e = parts.names.len();
            parts.names.push(format!("e{e}"));
            match *code.get(*pos)? {
                b'|' => {
                    *pos += 1;
                    Some(e)
                }
                b'(' => {
                    *pos += 1;
                    let vi = parts.vertices.len();
                    parts.vertices.push(Vertex {
                        output: e,
                        inputs: vec![],
                    });
                    while *code.get(*pos)? != b')' {
                        let child = go(code, pos, parts)?;
                        parts.vertices[vi].inputs.push(child);
                    }
                    *pos += 1;
                    Some(e)
                }
                _ => None,
            }
        }
        let mut parts = TreeParts {
            names: vec![],
            root: 0,
            vertices: vec![],
        };
        let mut pos = 0;
        go(code, &mut pos, &mut parts)?;
        if pos != code.len() {
            return None;
        }
        Tree::from_parts(parts).ok()
    }

    /// Removes the vertex `v`. Exactly one edge of `v` must remain attached to
    /// the rest of the tree: its output when all inputs are leaves, or its
    /// single non-leaf input when `v` is the root vertex. Returns the smaller
    /// tree and its edge inclusion.
    pub(crate) fn chop_vertex(&self, v: VertexId) -> Option<(Tree, Vec<EdgeId>)> {
        let vert = &self.vertices[v];
        let non_leaf: Vec<EdgeId> = vert.inputs.iter().copied().filter(|&i| !self.is_leaf(i)).collect();
        let (dropped, new_root): (BTreeSet<EdgeId>, EdgeId) = if non_leaf.is_empty() && self.below[vert.output].is_some() {
            (vert.inputs.iter().copied().collect(), self.root)
        } else if vert.output == self.root && non_leaf.len() == 1 {
            let mut d: BTreeSet<EdgeId> = vert.inputs.iter().copied().filter(|&i| i != non_leaf[0]).collect();
            d.insert(vert.output);
            (d, non_leaf[0])
        } else {
            return None;
        };
        let kept: Vec<EdgeId> = self.edges().filter(|e| !dropped.contains(e)).collect();
        let index: HashMap<EdgeId, EdgeId> = kept.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let vertices = self
            .vertices
            .iter()
            .enumerate()
            .filter(|&(w, _)| w != v)
            .map(|(_, w)| Vertex {
                output: index[&w.output],
                inputs: w.inputs.iter().map(|i| index[i]).collect(),
            })
            .collect();
        let tree = Tree::from_parts(TreeParts {
            names: kept.iter().map(|&e| self.names[e].clone()).collect(),
            root: index[&new_root],
            vertices,
        })
        .ok()?;
        Some((tree, kept))
    }

    /// Contracts the inner edge `e`, merging the vertices on either side.
    pub(crate) fn contract_edge(&self, e: EdgeId) -> Option<(Tree, Vec<EdgeId>)> {
        let upper = self.above[e]?;
        let lower = self.below[e]?;
        let kept: Vec<EdgeId> = self.edges().filter(|&x| x != e).collect();
        let index: HashMap<EdgeId, EdgeId> = kept.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut vertices = Vec::with_capacity(self.vertices.len() - 1);
        for (w, vert) in self.vertices.iter().enumerate() {
            if w == upper {
                continue;
            }
            let mut inputs = Vec::new();
            for &i in &vert.inputs {
                if w == lower && i == e {
                    inputs.extend(self.vertices[upper].inputs.iter().map(|j| index[j]));
                } else {
                    inputs.push(index[&i]);
                }
            }
            vertices.push(Vertex {
                output: index[&vert.output],
                inputs,
            });
        }
        let tree = Tree::from_parts(TreeParts {
            names: kept.iter().map(|&x| self.names[x].clone()).collect(),
            root: index[&self.root],
            vertices,
        })
        .ok()?;
        Some((tree, kept))
    }

    /// The subtree spanned at `sub` as a tree of its own, with its edge
    /// inclusion.
    pub fn subtree_as_tree(&self, sub: &Subtree) -> (Tree, Vec<EdgeId>) {
        let kept = sub.edges.clone();
        let index: HashMap<EdgeId, EdgeId> = kept.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let vertices = sub
            .vertices
            .iter()
            .map(|&w| {
                let vert = &self.vertices[w];
                Vertex {
                    output: index[&vert.output],
                    inputs: vert.inputs.iter().map(|i| index[i]).collect(),
                }
            })
            .collect();
        let tree = Tree::from_parts(TreeParts {
            names: kept.iter().map(|&x| self.names[x].clone()).collect(),
            root: index[&sub.root],
            vertices,
        })
        .expect("a subtree is a tree");
        (tree, kept)
    }
}

pub fn are_isomorphic(s: &Tree, t: &Tree) -> bool {
    s.canonical_code() == t.canonical_code()
}

/// Identifies the root of `upper` with the leaf `leaf` of `lower`. Names of
/// `upper` that clash with names of `lower` get a numeric suffix.
pub fn graft(lower: &Tree, leaf: EdgeId, upper: &Tree) -> Result<Tree, TreeError> {
    if leaf >= lower.num_edges() || !lower.is_leaf(leaf) || (lower.is_eta() && leaf != lower.root) {
        let name = lower.names.get(leaf).cloned().unwrap_or_else(|| leaf.to_string());
        return Err(TreeError::NotALeaf(name));
    }
    let mut names = lower.names.clone();
    let mut taken: BTreeSet<String> = names.iter().cloned().collect();
    let mut index = vec![0; upper.num_edges()];
    for e in upper.edges() {
        if e == upper.root {
            index[e] = leaf;
            continue;
        }
        let mut name = upper.names[e].clone();
        let mut k = 1;
        while taken.contains(&name) {
            name = format!("{}_{k}", upper.names[e]);
            k += 1;
        }
        taken.insert(name.clone());
        index[e] = names.len();
        names.push(name);
    }
    let mut vertices = lower.vertices.clone();
    vertices.extend(upper.vertices.iter().map(|v| Vertex {
        output: index[v.output],
        inputs: v.inputs.iter().map(|&i| index[i]).collect(),
    }));
    Ok(Tree::from_parts(TreeParts {
        names,
        root: lower.root,
        vertices,
    })?)
}

fn edge_count_of_code(code: &[u8]) -> usize {
    code.iter().filter(|&&b| b == b'|' || b == b'(').count()
}

/// Canonical codes of all edges carrying exactly `v` vertices above them,
/// for every `v <= max_vertices`.
fn codes_by_vertices(max_vertices: usize, max_arity: usize, max_edges: Option<usize>) -> Vec<Vec<Vec<u8>>> {
    let mut by_v: Vec<Vec<Vec<u8>>> = vec![vec![b"|".to_vec()]];
    for v in 1..=max_vertices {
        let mut pool: Vec<(Vec<u8>, usize)> = by_v
            .iter()
            .enumerate()
            .flat_map(|(count, codes)| codes.iter().map(move |c| (c.clone(), count)))
            .collect();
        pool.sort();
        let mut out = BTreeSet::new();
        for k in 0..=max_arity {
            // nondecreasing index sequences of length k with vertex total v-1
            let mut stack: Vec<(usize, usize, Vec<usize>)> = vec![(0, 0, vec![])];
            while let Some((start, total, chosen)) = stack.pop() {
                if chosen.len() == k {
                    if total == v - 1 {
                        let mut code = vec![b'('];
                        for &i in &chosen {
                            code.extend_from_slice(&pool[i].0);
                        }
                        code.push(b')');
                        if max_edges.map_or(true, |m| edge_count_of_code(&code) <= m) {
                            out.insert(code);
                        }
                    }
                    continue;
                }
                for i in start..pool.len() {
                    let t = total + pool[i].1;
                    if t > v - 1 {
                        continue;
                    }
                    let mut c = chosen.clone();
                    c.push(i);
                    stack.push((i, t, c));
                }
            }
        }
        by_v.push(out.into_iter().collect());
    }
    by_v
}

/// One tree per isomorphism class with between one and `max_vertices`
/// vertices and every vertex of arity at most `max_arity`, ordered by
/// canonical code. `max_vertices = 0` yields `[η]`.
pub fn enumerate_trees(max_vertices: usize, max_arity: usize) -> Vec<Tree> {
    if max_vertices == 0 {
        return vec![Tree::eta()];
    }
    let by_v = codes_by_vertices(max_vertices, max_arity, None);
    let mut codes: Vec<&Vec<u8>> = by_v[1..].iter().flatten().collect();
    codes.sort();
    codes.into_iter().map(|c| Tree::from_code(c).expect("generated code")).collect()
}

/// One tree per isomorphism class with at most `max_edges` edges (η
/// included), ordered by canonical code.
pub fn enumerate_trees_by_edges(max_edges: usize) -> Vec<Tree> {
    if max_edges == 0 {
        return vec![];
    }
    let by_v = codes_by_vertices(max_edges, max_edges.saturating_sub(1), Some(max_edges));
    let mut codes: Vec<&Vec<u8>> = by_v.iter().flatten().collect();
    codes.sort();
    codes.into_iter().map(|c| Tree::from_code(c).expect("generated code")).collect()
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Tree, e: EdgeId, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str(&t.names[e])?;
            if let Some(v) = t.above[e] {
                f.write_str("[")?;
                for (k, &i) in t.vertices[v].inputs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    go(t, i, f)?;
                }
                f.write_str("]")?;
            }
            Ok(())
        }
        go(self, self.root, f)
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({self})")
    }
}

/// Recursive-descent reader for `edge := NAME | NAME '[' edgelist ']'`.
pub(crate) struct TreeReader<'a> {
    pub(crate) src: &'a [u8],
    pub(crate) pos: usize,
}

impl<'a> TreeReader<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        TreeReader {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseTreeError {
        ParseTreeError {
            position: self.pos,
            message: message.into(),
        }
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub(crate) fn name(&mut self) -> Result<String, ParseTreeError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an edge name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    pub(crate) fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub(crate) fn tree(&mut self) -> Result<Tree, ParseTreeError> {
        let start = self.pos;
        let mut parts = TreeParts {
            names: vec![],
            root: 0,
            vertices: vec![],
        };
        let mut seen = BTreeMap::new();
        self.edge(&mut parts, &mut seen)?;
        Tree::from_parts(parts).map_err(|v| ParseTreeError {
            position: start,
            message: v.to_string(),
        })
    }

    fn edge(&mut self, parts: &mut TreeParts, seen: &mut BTreeMap<String, usize>) -> Result<EdgeId, ParseTreeError> {
        let at = self.pos;
        let name = self.name()?;
        if seen.insert(name.clone(), at).is_some() {
            return Err(ParseTreeError {
                position: at,
                message: format!("edge name `{name}` used twice"),
            });
        }
        let e = parts.names.len();
        parts.names.push(name);
        if self.peek() == Some(b'[') {
            self.pos += 1;
            let vi = parts.vertices.len();
            parts.vertices.push(Vertex {
                output: e,
                inputs: vec![],
            });
            if self.peek() == Some(b']') {
                self.pos += 1;
                return Ok(e);
            }
            loop {
                let child = self.edge(parts, seen)?;
                parts.vertices[vi].inputs.push(child);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b']') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `]`")),
                }
            }
        }
        Ok(e)
    }
}

impl FromStr for Tree {
    type Err = ParseTreeError;

    fn from_str(s: &str) -> Result<Tree, ParseTreeError> {
        let mut reader = TreeReader::new(s);
        let tree = reader.tree()?;
        reader.skip_ws();
        if reader.pos != reader.src.len() {
            return Err(reader.error("trailing input"));
        }
        Ok(tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    fn names(tree: &Tree, es: &[EdgeId]) -> Vec<String> {
        let mut v: Vec<String> = es.iter().map(|&e| tree.name(e).to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&Tree::eta().parts()).is_ok());
        let two = TreeParts {
            names: vec!["a".into(), "b".into()],
            root: 0,
            vertices: vec![],
        };
        assert!(matches!(validate(&two), Err(TreeViolation::MultipleRoots(_))));
        assert!(validate(&t("e[c[a,b],d]").parts()).is_ok());
    }

    #[test]
    fn validate_reports_cycles_and_duplicates() {
        let cyc = TreeParts {
            names: vec!["r".into(), "a".into(), "b".into()],
            root: 0,
            vertices: vec![
                Vertex { output: 1, inputs: vec![2] },
                Vertex { output: 2, inputs: vec![1] },
            ],
        };
        assert!(validate(&cyc).is_err());
        let dup = TreeParts {
            names: vec!["r".into(), "r".into()],
            root: 0,
            vertices: vec![Vertex { output: 0, inputs: vec![1] }],
        };
        assert_eq!(validate(&dup), Err(TreeViolation::DuplicateName("r".into())));
        assert!("e[a,a]".parse::<Tree>().is_err());
    }

    #[test]
    fn leaves_and_inner_edges() {
        let tr = t("e[c[a,b],d]");
        assert_eq!(names(&tr, &tr.leaves()), ["a", "b", "d"]);
        assert_eq!(names(&tr, &tr.inner_edges()), ["c"]);
        let c3 = Tree::corolla(3);
        assert_eq!(names(&c3, &c3.leaves()), ["a1", "a2", "a3"]);
        assert!(c3.inner_edges().is_empty());
        let c0 = t("r[]");
        assert!(c0.leaves().is_empty());
        assert!(c0.inner_edges().is_empty());
    }

    #[test]
    fn linear_and_corolla() {
        assert!(are_isomorphic(&Tree::linear(0), &Tree::eta()));
        let c0 = Tree::corolla(0);
        assert_eq!((c0.num_edges(), c0.num_vertices()), (1, 1));
        let c2 = Tree::corolla(2);
        assert_eq!((c2.num_edges(), c2.num_vertices(), c2.leaves().len()), (3, 1, 2));
        let l3 = Tree::linear(3);
        assert_eq!((l3.num_edges(), l3.num_vertices()), (4, 3));
        assert_eq!(names(&l3, &l3.linear_order().unwrap()), ["a0", "a1", "a2", "a3"]);
    }

    #[test]
    fn graft_examples() {
        let g = Tree::grafted_corollas(2, 2);
        assert_eq!(g.to_string(), "c[b1,b2[a1,a2]]");
        let c2 = Tree::corolla(2);
        let leaf = c2.edge_by_name("a1").unwrap();
        assert_eq!(graft(&c2, leaf, &Tree::eta()).unwrap(), c2);
        let tr = t("e[c[a,b],d]");
        let e = Tree::eta_named("e");
        assert_eq!(graft(&e, 0, &tr).unwrap().to_string(), tr.to_string());
        assert!(graft(&c2, c2.root(), &c2).is_err());
        // clashing names are renamed, counts add up
        let gg = graft(&c2, leaf, &c2).unwrap();
        assert_eq!(gg.num_edges(), 5);
        assert_eq!(gg.num_vertices(), 2);
        assert!(are_isomorphic(&gg, &Tree::grafted_corollas(2, 2)));
    }

    #[test]
    fn spanned_subtree_examples() {
        let tr = t("e[c[a,b],d]");
        let id = |s: &str| tr.edge_by_name(s).unwrap();
        let full = tr.spanned_subtree(id("e"), &[id("a"), id("b"), id("d")]).unwrap();
        assert_eq!(full.vertices.len(), 2);
        let w = tr.spanned_subtree(id("e"), &[id("c"), id("d")]).unwrap();
        assert_eq!(w.vertices, vec![tr.vertex_below(id("d")).unwrap()]);
        assert!(tr.spanned_subtree(id("e"), &[id("a"), id("d")]).is_none());
        let ida = tr.spanned_subtree(id("a"), &[id("a")]).unwrap();
        assert!(ida.vertices.is_empty());
        assert_eq!(ida.leaves, vec![id("a")]);
    }

    #[test]
    fn nullary_branches_are_spanned_by_empty_leaf_sets() {
        let tr = t("r[x[],y[z[]]]");
        assert!(tr.spanned_subtree(tr.root(), &[]).is_some());
        let tr = t("r[x[],y]");
        assert!(tr.spanned_subtree(tr.root(), &[]).is_none());
        assert!(tr.spanned_subtree(tr.root(), &[tr.edge_by_name("y").unwrap()]).is_some());
    }

    #[test]
    fn canonical_codes() {
        assert!(are_isomorphic(&t("e[c[a,b],d]"), &t("e[d,c[b,a]]")));
        assert!(!are_isomorphic(&Tree::linear(2), &Tree::corolla(2)));
        assert_eq!(Tree::eta().canonical_code(), b"|");
        assert_eq!(t("r[]").canonical_code(), b"()");
        let code = t("e[c[a,b],d]").canonical_code();
        assert_eq!(Tree::from_code(&code).unwrap().canonical_code(), code);
    }

    #[test]
    fn enumeration_small_cases() {
        let e0 = enumerate_trees(0, 3);
        assert_eq!(e0.len(), 1);
        assert!(e0[0].is_eta());
        let e1 = enumerate_trees(1, 2);
        let codes: Vec<Vec<u8>> = e1.iter().map(Tree::canonical_code).collect();
        assert_eq!(codes, vec![b"()".to_vec(), b"(|)".to_vec(), b"(||)".to_vec()]);
    }

    #[test]
    fn edge_bounded_enumeration_respects_bound() {
        for t in enumerate_trees_by_edges(5) {
            assert!(t.num_edges() <= 5);
            let total: usize = t.vertices().iter().map(Vertex::arity).sum();
            assert_eq!(t.num_edges(), 1 + total);
        }
        assert_eq!(enumerate_trees_by_edges(1).len(), 2); // η and C0
    }

    #[test]
    fn parse_errors_have_positions() {
        let err = "e[c[a,b]".parse::<Tree>().unwrap_err();
        assert_eq!(err.position, 8);
        assert!("".parse::<Tree>().is_err());
        assert!("a b".parse::<Tree>().is_err());
    }

    #[test]
    fn chop_and_contract() {
        let tr = t("e[c[a,b],d]");
        let (inner, map) = tr.contract_edge(tr.edge_by_name("c").unwrap()).unwrap();
        assert_eq!(inner.to_string(), "e[a,b,d]");
        assert_eq!(map.len(), 4);
        let v = tr.vertex_above(tr.edge_by_name("c").unwrap()).unwrap();
        let w = tr.vertex_above(tr.root()).unwrap();
        assert_eq!(tr.chop_vertex(v).unwrap().0.to_string(), "e[c,d]");
        assert_eq!(tr.chop_vertex(w).unwrap().0.to_string(), "c[a,b]");
        // root vertex with two non-leaf inputs is not outer
        let fork = t("r[x[a],y[b]]");
        assert!(fork.chop_vertex(fork.vertex_above(fork.root()).unwrap()).is_none());
    }
}
