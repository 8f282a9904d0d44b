//! K₀ of a dendroidal set: the free abelian group on η-dendrices modulo one
//! relation "inputs sum to output" per corolla dendrex.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dset::{DSet, DendMap, Dendrex};
use crate::intlin::{cokernel, group_completion, FgAbelianGroup, GroupHom, IntLinError, IntMatrix};
use crate::omega::{self, FaceLabel, OmegaMap};
use crate::smc::PermutativeGroupoid;
use crate::tree::Tree;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KzeroError {
    #[error("arity bound {bound} is below the required {required}")]
    BoundTooSmall { bound: usize, required: usize },
    #[error("map is not natural: {0}")]
    NotNatural(String),
    #[error(transparent)]
    IntLin(#[from] IntLinError),
}

/// One relation row with the corolla dendrex it comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationRow {
    pub arity: usize,
    pub source: String,
    /// Sparse row over the generators.
    pub entries: Vec<(usize, i64)>,
}

#[derive(Clone, Debug)]
pub struct K0Presentation {
    pub generators: Vec<Dendrex>,
    pub generator_labels: Vec<String>,
    pub rows: Vec<RelationRow>,
    pub arity_bound: usize,
    index: HashMap<Dendrex, usize>,
}

impl K0Presentation {
    pub fn generator_index(&self, x: &Dendrex) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn matrix(&self) -> IntMatrix {
        let n = self.generators.len();
        let rows: Vec<Vec<BigInt>> = self
            .rows
            .iter()
            .map(|r| {
                let mut v = vec![BigInt::zero(); n];
                for &(i, c) in &r.entries {
                    v[i] += c;
                }
                v
            })
            .collect();
        IntMatrix::from_big_rows(n, rows)
    }

    pub fn group(&self) -> FgAbelianGroup {
        cokernel(&self.matrix())
    }

    /// Renders a row as `x1 + x2 = y`, with `0` for an empty side. Numeric
    /// labels are bracketed to keep them apart from that `0`.
    pub fn render_row(&self, row: &RelationRow) -> String {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for &(i, c) in &row.entries {
            let side = if c > 0 { &mut lhs } else { &mut rhs };
            let label = &self.generator_labels[i];
            let shown = if label.parse::<i64>().is_ok() { format!("[{label}]") } else { label.clone() };
            for _ in 0..c.unsigned_abs() {
                side.push(shown.clone());
            }
        }
        let show = |v: Vec<String>| if v.is_empty() { "0".to_string() } else { v.join(" + ") };
        format!("{} = {}", show(lhs), show(rhs))
    }
}

/// The colour faces of `C_n`, inputs first and the root last.
fn corolla_faces(cn: &Arc<Tree>) -> (Vec<OmegaMap>, OmegaMap) {
    let mut inputs = Vec::new();
    let mut root = None;
    for f in omega::outer_faces(cn) {
        match f.label {
            FaceLabel::Colour(e) if e == cn.root() => root = Some(f.map),
            _ => inputs.push(f.map),
        }
    }
    (inputs, root.expect("a corolla has a root face"))
}

/// The presentation with corolla relations up to `arity_bound`, which
/// defaults to the set's effective bound.
pub fn presentation(d: &DSet, arity_bound: Option<usize>) -> Result<K0Presentation, KzeroError> {
    let required = d.effective_arity_bound();
    let bound = arity_bound.unwrap_or(required);
    if bound < required {
        return Err(KzeroError::BoundTooSmall { bound, required });
    }
    let eta = Arc::new(Tree::eta());
    let generators = d.dendrices(&eta);
    let generator_labels = generators.iter().map(|x| d.label(&eta, x)).collect();
    let index: HashMap<Dendrex, usize> = generators.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    let mut rows = Vec::new();
    for n in 0..=bound {
        let cn = Arc::new(Tree::corolla(n));
        let xs = d.dendrices(&cn);
        if xs.is_empty() {
            continue;
        }
        let (input_faces, root_face) = corolla_faces(&cn);
        let ins: Vec<Vec<Dendrex>> = input_faces.iter().map(|f| d.act_all(f, &xs)).collect();
        let outs = d.act_all(&root_face, &xs);
        for (k, x) in xs.iter().enumerate() {
            let mut entries: Vec<(usize, i64)> = Vec::with_capacity(n + 1);
            let mut add = |y: &Dendrex, c: i64| {
                let i = *index.get(y).unwrap_or_else(|| panic!("face {y} is not an η-dendrex"));
                match entries.iter_mut().find(|(j, _)| *j == i) {
                    Some(e) => e.1 += c,
                    None => entries.push((i, c)),
                }
            };
            for col in &ins {
                add(&col[k], 1);
            }
            add(&outs[k], -1);
            entries.retain(|&(_, c)| c != 0);
            entries.sort_unstable();
            rows.push(RelationRow {
                arity: n,
                source: d.label(&cn, x),
                entries,
            });
        }
    }
    Ok(K0Presentation {
        generators,
        generator_labels,
        rows,
        arity_bound: bound,
        index,
    })
}

pub fn k0(d: &DSet) -> FgAbelianGroup {
    presentation(d, None).expect("effective bound").group()
}

/// Matrix sending each generator of `source` to the generator of `target`
/// named by `f` at shape η.
fn eta_matrix(
    f: impl Fn(&Arc<Tree>, &Dendrex) -> Dendrex,
    source: &K0Presentation,
    target: &K0Presentation,
) -> Result<IntMatrix, KzeroError> {
    let eta = Arc::new(Tree::eta());
    let mut m = IntMatrix::zeros(source.generators.len(), target.generators.len());
    for (i, x) in source.generators.iter().enumerate() {
        let y = f(&eta, x);
        let j = target
            .generator_index(&y)
            .ok_or_else(|| KzeroError::NotNatural(format!("{y} is not an η-dendrex of the target")))?;
        m.set(i, j, BigInt::one());
    }
    Ok(m)
}

/// `f_*: K₀(D) → K₀(D′)`.
pub fn induced(f: &DendMap) -> Result<GroupHom, KzeroError> {
    let sp = presentation(f.source(), None)?;
    let tp = presentation(f.target(), None)?;
    induced_between(f, &sp, &tp)
}

pub fn induced_between(f: &DendMap, sp: &K0Presentation, tp: &K0Presentation) -> Result<GroupHom, KzeroError> {
    let m = eta_matrix(|s, x| f.apply(s, x), sp, tp)?;
    GroupHom::new(sp.group(), tp.group(), m).map_err(|e| match e {
        IntLinError::RelationNotRespected { row } => {
            KzeroError::NotNatural(format!("relation `{}` is not sent to a relation", sp.render_row(&sp.rows[row])))
        }
        other => KzeroError::IntLin(other),
    })
}

/// Connected components of the underlying simplicial set in degrees 0 and 1.
#[derive(Clone, Debug)]
pub struct Components {
    pub vertices: Vec<Dendrex>,
    pub labels: Vec<String>,
    /// Component index of each vertex, numbered by first occurrence.
    pub class_of: Vec<usize>,
    pub count: usize,
}

pub fn pi0_underlying(d: &DSet) -> Components {
    let eta = Arc::new(Tree::eta());
    let vertices = d.dendrices(&eta);
    let labels = vertices.iter().map(|x| d.label(&eta, x)).collect();
    let index: HashMap<&Dendrex, usize> = vertices.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let l1 = Arc::new(Tree::linear(1));
    let xs = d.dendrices(&l1);
    let ends: Vec<Vec<Dendrex>> = omega::hom(&eta, &l1).iter().map(|m| d.act_all(m, &xs)).collect();
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for k in 0..xs.len() {
        let a = find(&mut parent, index[&ends[0][k]]);
        let b = find(&mut parent, index[&ends[1][k]]);
        parent[a.max(b)] = a.min(b);
    }
    let mut numbering = HashMap::new();
    let class_of: Vec<usize> = (0..vertices.len())
        .map(|v| {
            let r = find(&mut parent, v);
            let next = numbering.len();
            *numbering.entry(r).or_insert(next)
        })
        .collect();
    Components {
        vertices,
        labels,
        count: numbering.len(),
        class_of,
    }
}

/// `λ_D: π₀(i*D) → K₀(D)` and its properties.
#[derive(Clone, Debug)]
pub struct Lambda {
    pub components: Components,
    pub group: FgAbelianGroup,
    /// A representative generator for each component.
    pub representatives: Vec<usize>,
    pub injective: bool,
    pub surjective: bool,
}

impl Lambda {
    pub fn is_bijective(&self) -> bool {
        self.injective && self.surjective
    }
}

pub fn lambda(d: &DSet) -> Result<Lambda, KzeroError> {
    let components = pi0_underlying(d);
    let pres = presentation(d, None)?;
    let group = pres.group();
    let n = pres.generators.len();
    let mut representatives = vec![usize::MAX; components.count];
    for (v, &c) in components.class_of.iter().enumerate().rev() {
        representatives[c] = v;
    }
    let unit = |i: usize| {
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::one();
        v
    };
    let mut injective = true;
    for (a, &i) in representatives.iter().enumerate() {
        for &j in &representatives[a + 1..] {
            let diff: Vec<BigInt> = unit(i).into_iter().zip(unit(j)).map(|(x, y)| x - y).collect();
            if group.is_zero_element(&diff) {
                injective = false;
            }
        }
    }
    let surjective = match group.order() {
        Some(order) => {
            let mut images: Vec<_> = representatives.iter().map(|&i| group.coordinates(&unit(i))).collect();
            images.sort();
            images.dedup();
            BigInt::from(images.len()) == order
        }
        None => false,
    };
    Ok(Lambda {
        components,
        group,
        representatives,
        injective,
        surjective,
    })
}

fn sum_presentation(parts: &[&K0Presentation]) -> (IntMatrix, Vec<usize>) {
    let mut offsets = Vec::new();
    let mut total = 0;
    for p in parts {
        offsets.push(total);
        total += p.generators.len();
    }
    let mut rows = Vec::new();
    for (p, &off) in parts.iter().zip(&offsets) {
        for r in &p.rows {
            let mut v = vec![BigInt::zero(); total];
            for &(i, c) in &r.entries {
                v[off + i] += c;
            }
            rows.push(v);
        }
    }
    (IntMatrix::from_big_rows(total, rows), offsets)
}

/// Data of a pushout square `B ← A → C` with legs into the pushout `P`.
pub struct Pushout {
    pub left: DendMap,
    pub right: DendMap,
    pub left_leg: DendMap,
    pub right_leg: DendMap,
}

/// Whether `K₀(P)` is the pushout of the K₀ groups, through the explicit map
/// from `(K₀(B) ⊕ K₀(C)) / (i(a) − j(a))` given by the legs.
pub fn colimit_check(square: &Pushout) -> Result<bool, KzeroError> {
    let a = presentation(square.left.source(), None)?;
    let b = presentation(square.left.target(), None)?;
    let c = presentation(square.right.target(), None)?;
    let p = presentation(square.left_leg.target(), None)?;
    let (base, offsets) = sum_presentation(&[&b, &c]);
    let total = base.cols();
    let mi = eta_matrix(|s, x| square.left.apply(s, x), &a, &b)?;
    let mj = eta_matrix(|s, x| square.right.apply(s, x), &a, &c)?;
    let mut rows = base.row_vecs();
    for g in 0..a.generators.len() {
        let mut v = vec![BigInt::zero(); total];
        for (k, x) in mi.row(g).iter().enumerate() {
            v[offsets[0] + k] += x;
        }
        for (k, x) in mj.row(g).iter().enumerate() {
            v[offsets[1] + k] -= x;
        }
        rows.push(v);
    }
    let glued = cokernel(&IntMatrix::from_big_rows(total, rows));
    let lb = eta_matrix(|s, x| square.left_leg.apply(s, x), &b, &p)?;
    let lc = eta_matrix(|s, x| square.right_leg.apply(s, x), &c, &p)?;
    let m = lb.vstack(&lc)?;
    let h = GroupHom::new(glued, p.group(), m)?;
    Ok(h.is_isomorphism())
}

/// Whether the summand inclusions induce `⊕ K₀(Dᵢ) ≅ K₀(⊔ Dᵢ)`.
pub fn coproduct_check(injections: &[DendMap]) -> Result<bool, KzeroError> {
    let Some(first) = injections.first() else {
        return Ok(true);
    };
    let parts: Vec<K0Presentation> = injections
        .iter()
        .map(|f| presentation(f.source(), None))
        .collect::<Result<_, _>>()?;
    let target = presentation(first.target(), None)?;
    let refs: Vec<&K0Presentation> = parts.iter().collect();
    let (rel, _) = sum_presentation(&refs);
    let mut m: Option<IntMatrix> = None;
    for (f, p) in injections.iter().zip(&parts) {
        let block = eta_matrix(|s, x| f.apply(s, x), p, &target)?;
        m = Some(match m {
            None => block,
            Some(acc) => acc.vstack(&block)?,
        });
    }
    let m = m.expect("at least one summand");
    let h = GroupHom::new(cokernel(&rel), target.group(), m)?;
    Ok(h.is_isomorphism())
}

/// `K₀(N_d P) → K₀(π₀ P)`, sending an object to its component.
pub fn classical_comparison(p: &PermutativeGroupoid, nerve: &DSet) -> Result<GroupHom, KzeroError> {
    let pres = presentation(nerve, None)?;
    let pi0 = p.pi0_monoid();
    let completion = group_completion(&pi0.monoid.presentation());
    let mut m = IntMatrix::zeros(pres.generators.len(), pi0.monoid.order());
    for (i, x) in pres.generators.iter().enumerate() {
        let Dendrex::Nerve { colours, .. } = x else {
            return Err(KzeroError::NotNatural(format!("{x} is not a nerve dendrex")));
        };
        m.set(i, pi0.class_of[colours[0]], BigInt::one());
    }
    GroupHom::new(pres.group(), completion, m).map_err(KzeroError::from)
}
