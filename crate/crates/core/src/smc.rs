//! Finite permutative (strict symmetric monoidal) groupoids given by tables.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlin::MonoidPresentation;

pub type ObjId = usize;
pub type MorId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SmcError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("table `{0}` is not total")]
    Partial(String),
    #[error("table entry {0} is inconsistent with sources and targets")]
    BadEntry(String),
    #[error("monoid table is {0}")]
    NotAMonoid(&'static str),
    #[error("element {0} has no inverse")]
    NotAGroup(usize),
    #[error("malformed groupoid file: {0}")]
    Format(String),
}

/// The first axiom a groupoid table fails.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SmcViolation {
    #[error("identity law fails at morphism `{0}`")]
    Identity(String),
    #[error("composition is not associative at ({0}, {1}, {2})")]
    Associativity(String, String, String),
    #[error("morphism `{0}` has no inverse")]
    NotInvertible(String),
    #[error("tensor of objects is not associative at ({0}, {1}, {2})")]
    ObjectAssociativity(String, String, String),
    #[error("the unit object is not a two-sided unit at `{0}`")]
    ObjectUnit(String),
    #[error("tensor of morphisms `{0}` and `{1}` has wrong source or target")]
    TensorTyping(String, String),
    #[error("tensor of morphisms is not functorial at ({0}, {1})")]
    TensorFunctoriality(String, String),
    #[error("tensor of morphisms is not strictly associative or unital at `{0}`")]
    TensorStrictness(String),
    #[error("symmetry at ({0}, {1}) has the wrong source or target")]
    SymmetryTyping(String, String),
    #[error("symmetry is not natural at morphisms ({0}, {1})")]
    SymmetryNaturality(String, String),
    #[error("symmetry does not square to the identity at ({0}, {1})")]
    SymmetryInvolution(String, String),
    #[error("hexagon identity fails at ({0}, {1}, {2})")]
    Hexagon(String, String, String),
    #[error("symmetry with the unit is not the identity at `{0}`")]
    SymmetryUnit(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub src: ObjId,
    pub dst: ObjId,
}

/// Serialized form of a groupoid. With `discrete: true` only objects, unit
/// and the tensor table are read and every morphism is an identity.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupoidTable {
    #[serde(default)]
    pub discrete: bool,
    pub objects: Vec<String>,
    pub unit: String,
    /// `tensor[i][j]` is the name of `objects[i] ⊗ objects[j]`.
    pub tensor: Vec<Vec<String>>,
    #[serde(default)]
    pub morphisms: Vec<MorphismEntry>,
    /// `[object, identity morphism]`.
    #[serde(default)]
    pub identities: Vec<[String; 2]>,
    /// `[g, f, g∘f]`.
    #[serde(default)]
    pub compose: Vec<[String; 3]>,
    /// `[f, g, f⊗g]`.
    #[serde(default)]
    pub tensor_morphisms: Vec<[String; 3]>,
    /// `[a, b, τ_{a,b}]`.
    #[serde(default)]
    pub symmetry: Vec<[String; 3]>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MorphismEntry {
    pub id: String,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutativeGroupoid {
    object_names: Vec<String>,
    unit: ObjId,
    tensor: Vec<Vec<ObjId>>,
    morphisms: Vec<Morphism>,
    identity: Vec<MorId>,
    compose: Vec<Vec<Option<MorId>>>,
    tensor_mor: Vec<Vec<MorId>>,
    symmetry: Vec<Vec<MorId>>,
    hom: HashMap<(ObjId, ObjId), Vec<MorId>>,
}

/// A finite commutative monoid on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommutativeMonoid {
    unit: usize,
    op: Vec<Vec<usize>>,
}

impl CommutativeMonoid {
    pub fn new(op: Vec<Vec<usize>>, unit: usize) -> Result<CommutativeMonoid, SmcError> {
        let n = op.len();
        if n == 0 || unit >= n || op.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(SmcError::NotAMonoid("not a total table"));
        }
        for a in 0..n {
            if op[unit][a] != a || op[a][unit] != a {
                return Err(SmcError::NotAMonoid("not unital"));
            }
            for b in 0..n {
                if op[a][b] != op[b][a] {
                    return Err(SmcError::NotAMonoid("not commutative"));
                }
                for c in 0..n {
                    if op[op[a][b]][c] != op[a][op[b][c]] {
                        return Err(SmcError::NotAMonoid("not associative"));
                    }
                }
            }
        }
        Ok(CommutativeMonoid { unit, op })
    }

    pub fn cyclic(n: usize) -> CommutativeMonoid {
        let op = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        CommutativeMonoid::new(op, 0).expect("Z/n is a monoid")
    }

    pub fn order(&self) -> usize {
        self.op.len()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.op[a][b]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.op
    }

    pub fn inverse(&self, a: usize) -> Option<usize> {
        (0..self.order()).find(|&b| self.op[a][b] == self.unit)
    }

    pub fn is_group(&self) -> bool {
        (0..self.order()).all(|a| self.inverse(a).is_some())
    }

    /// Every element a generator; relations `a + b = ab` and `e = 0`.
    pub fn presentation(&self) -> MonoidPresentation {
        let n = self.order();
        let mut relations = vec![(vec![self.unit], vec![])];
        for a in 0..n {
            for b in a..n {
                relations.push((vec![a, b], vec![self.op[a][b]]));
            }
        }
        MonoidPresentation {
            generators: n,
            relations,
        }
    }
}

/// The connected components of a groupoid with the induced monoid.
#[derive(Clone, Debug)]
pub struct Pi0 {
    pub monoid: CommutativeMonoid,
    /// Component index of each object.
    pub class_of: Vec<usize>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

impl PermutativeGroupoid {
    pub fn from_table(table: &GroupoidTable) -> Result<PermutativeGroupoid, SmcError> {
        let n = table.objects.len();
        let mut obj_index = HashMap::new();
        for (i, name) in table.objects.iter().enumerate() {
            if obj_index.insert(name.clone(), i).is_some() {
                return Err(SmcError::DuplicateName(name.clone()));
            }
        }
        let obj = |s: &str| obj_index.get(s).copied().ok_or_else(|| SmcError::UnknownObject(s.to_string()));
        let unit = obj(&table.unit)?;
        if table.tensor.len() != n || table.tensor.iter().any(|r| r.len() != n) {
            return Err(SmcError::Partial("tensor".into()));
        }
        let tensor: Vec<Vec<ObjId>> = table
            .tensor
            .iter()
            .map(|r| r.iter().map(|s| obj(s)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;

        if table.discrete {
            let morphisms: Vec<Morphism> = (0..n)
                .map(|a| Morphism {
                    name: format!("id_{}", table.objects[a]),
                    src: a,
                    dst: a,
                })
                .collect();
            let compose = (0..n).map(|g| (0..n).map(|f| (f == g).then_some(g)).collect()).collect();
            let tensor_mor = tensor.clone();
            let symmetry = (0..n).map(|a| (0..n).map(|b| tensor[a][b]).collect()).collect();
            return Ok(PermutativeGroupoid::assemble(
                table.objects.clone(),
                unit,
                tensor,
                morphisms,
                (0..n).collect(),
                compose,
                tensor_mor,
                symmetry,
            ));
        }

        let mut mor_index = HashMap::new();
        let mut morphisms = Vec::new();
        for (i, m) in table.morphisms.iter().enumerate() {
            if mor_index.insert(m.id.clone(), i).is_some() {
                return Err(SmcError::DuplicateName(m.id.clone()));
            }
            morphisms.push(Morphism {
                name: m.id.clone(),
                src: obj(&m.src)?,
                dst: obj(&m.dst)?,
            });
        }
        let mor = |s: &str| mor_index.get(s).copied().ok_or_else(|| SmcError::UnknownMorphism(s.to_string()));
        let k = morphisms.len();

        let mut identity = vec![None; n];
        for [o, m] in &table.identities {
            let (o, m) = (obj(o)?, mor(m)?);
            if morphisms[m].src != o || morphisms[m].dst != o {
                return Err(SmcError::BadEntry(format!("identity {}", morphisms[m].name)));
            }
            identity[o] = Some(m);
        }
        let identity: Vec<MorId> = identity
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| SmcError::Partial("identities".into()))?;

        let mut compose = vec![vec![None; k]; k];
        for [g, f, h] in &table.compose {
            let (g, f, h) = (mor(g)?, mor(f)?, mor(h)?);
            if morphisms[f].dst != morphisms[g].src
                || morphisms[h].src != morphisms[f].src
                || morphisms[h].dst != morphisms[g].dst
            {
                return Err(SmcError::BadEntry(format!("compose {} {}", morphisms[g].name, morphisms[f].name)));
            }
            compose[g][f] = Some(h);
        }
        for g in 0..k {
            for f in 0..k {
                if morphisms[f].dst == morphisms[g].src && compose[g][f].is_none() {
                    return Err(SmcError::Partial(format!("compose {} {}", morphisms[g].name, morphisms[f].name)));
                }
            }
        }

        let mut tensor_mor = vec![vec![None; k]; k];
        for [f, g, h] in &table.tensor_morphisms {
            tensor_mor[mor(f)?][mor(g)?] = Some(mor(h)?);
        }
        let tensor_mor: Vec<Vec<MorId>> = tensor_mor
            .into_iter()
            .map(|r| r.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<_>>()
            .ok_or_else(|| SmcError::Partial("tensor_morphisms".into()))?;

        let mut symmetry = vec![vec![None; n]; n];
        for [a, b, t] in &table.symmetry {
            symmetry[obj(a)?][obj(b)?] = Some(mor(t)?);
        }
        let symmetry: Vec<Vec<MorId>> = symmetry
            .into_iter()
            .map(|r| r.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<_>>()
            .ok_or_else(|| SmcError::Partial("symmetry".into()))?;

        Ok(PermutativeGroupoid::assemble(
            table.objects.clone(),
            unit,
            tensor,
            morphisms,
            identity,
            compose,
            tensor_mor,
            symmetry,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        object_names: Vec<String>,
        unit: ObjId,
        tensor: Vec<Vec<ObjId>>,
        morphisms: Vec<Morphism>,
        identity: Vec<MorId>,
        compose: Vec<Vec<Option<MorId>>>,
        tensor_mor: Vec<Vec<MorId>>,
        symmetry: Vec<Vec<MorId>>,
    ) -> PermutativeGroupoid {
        let mut hom: HashMap<(ObjId, ObjId), Vec<MorId>> = HashMap::new();
        for (i, m) in morphisms.iter().enumerate() {
            hom.entry((m.src, m.dst)).or_default().push(i);
        }
        PermutativeGroupoid {
            object_names,
            unit,
            tensor,
            morphisms,
            identity,
            compose,
            tensor_mor,
            symmetry,
            hom,
        }
    }

    pub fn to_table(&self) -> GroupoidTable {
        let on = |o: ObjId| self.object_names[o].clone();
        let mn = |m: MorId| self.morphisms[m].name.clone();
        let k = self.morphisms.len();
        let n = self.num_objects();
        GroupoidTable {
            discrete: false,
            objects: self.object_names.clone(),
            unit: on(self.unit),
            tensor: self.tensor.iter().map(|r| r.iter().map(|&o| on(o)).collect()).collect(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| MorphismEntry {
                    id: m.name.clone(),
                    src: on(m.src),
                    dst: on(m.dst),
                })
                .collect(),
            identities: (0..n).map(|o| [on(o), mn(self.identity[o])]).collect(),
            compose: (0..k)
                .flat_map(|g| (0..k).filter_map(move |f| self.compose[g][f].map(|h| (g, f, h))))
                .map(|(g, f, h)| [mn(g), mn(f), mn(h)])
                .collect(),
            tensor_morphisms: (0..k)
                .flat_map(|f| (0..k).map(move |g| (f, g)))
                .map(|(f, g)| [mn(f), mn(g), mn(self.tensor_mor[f][g])])
                .collect(),
            symmetry: (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .map(|(a, b)| [on(a), on(b), mn(self.symmetry[a][b])])
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<PermutativeGroupoid, SmcError> {
        let table: GroupoidTable = serde_json::from_str(text).map_err(|e| SmcError::Format(e.to_string()))?;
        PermutativeGroupoid::from_table(&table)
    }

    /// Discrete groupoid on a commutative monoid; tensor is the monoid
    /// operation and the symmetry is trivial.
    pub fn from_commutative_monoid(m: &CommutativeMonoid) -> PermutativeGroupoid {
        let names: Vec<String> = (0..m.order()).map(|i| i.to_string()).collect();
        let table = GroupoidTable {
            discrete: true,
            objects: names.clone(),
            unit: names[m.unit()].clone(),
            tensor: (0..m.order())
                .map(|a| (0..m.order()).map(|b| names[m.op(a, b)].clone()).collect())
                .collect(),
            ..GroupoidTable::default()
        };
        PermutativeGroupoid::from_table(&table).expect("monoid tables are total")
    }

    pub fn from_abelian_group(m: &CommutativeMonoid) -> Result<PermutativeGroupoid, SmcError> {
        if let Some(a) = (0..m.order()).find(|&a| m.inverse(a).is_none()) {
            return Err(SmcError::NotAGroup(a));
        }
        Ok(PermutativeGroupoid::from_commutative_monoid(m))
    }

    /// Objects `Z/2`, each with automorphism group `Z/2`, and the symmetry
    /// `τ_{1,1}` the nontrivial automorphism of `0`.
    pub fn signed_z2() -> PermutativeGroupoid {
        // morphism (x, s) has index 2x + s
        let objects = vec!["0".to_string(), "1".to_string()];
        let mname = |x: usize, s: usize| format!("m{x}{s}");
        let mut table = GroupoidTable {
            discrete: false,
            objects: objects.clone(),
            unit: "0".into(),
            tensor: vec![vec!["0".into(), "1".into()], vec!["1".into(), "0".into()]],
            ..GroupoidTable::default()
        };
        for x in 0..2 {
            for s in 0..2 {
                table.morphisms.push(MorphismEntry {
                    id: mname(x, s),
                    src: objects[x].clone(),
                    dst: objects[x].clone(),
                });
            }
            table.identities.push([objects[x].clone(), mname(x, 0)]);
        }
        for x in 0..2 {
            for s in 0..2 {
                for t in 0..2 {
                    table.compose.push([mname(x, s), mname(x, t), mname(x, (s + t) % 2)]);
                }
            }
        }
        for x in 0..2 {
            for s in 0..2 {
                for y in 0..2 {
                    for t in 0..2 {
                        table.tensor_morphisms.push([mname(x, s), mname(y, t), mname((x + y) % 2, (s + t) % 2)]);
                    }
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                table.symmetry.push([objects[a].clone(), objects[b].clone(), mname((a + b) % 2, a * b)]);
            }
        }
        PermutativeGroupoid::from_table(&table).expect("complete table")
    }

    pub fn num_objects(&self) -> usize {
        self.object_names.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn object_name(&self, o: ObjId) -> &str {
        &self.object_names[o]
    }

    pub fn morphism(&self, m: MorId) -> &Morphism {
        &self.morphisms[m]
    }

    pub fn unit(&self) -> ObjId {
        self.unit
    }

    pub fn tensor(&self, a: ObjId, b: ObjId) -> ObjId {
        self.tensor[a][b]
    }

    pub fn tensor_all(&self, objs: &[ObjId]) -> ObjId {
        objs.iter().fold(self.unit, |acc, &o| self.tensor[acc][o])
    }

    pub fn identity(&self, a: ObjId) -> MorId {
        self.identity[a]
    }

    /// `g ∘ f`; panics when they do not compose.
    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        self.compose[g][f].expect("composable morphisms")
    }

    pub fn tensor_morphisms(&self, f: MorId, g: MorId) -> MorId {
        self.tensor_mor[f][g]
    }

    pub fn tensor_all_morphisms(&self, fs: &[MorId]) -> MorId {
        fs.iter().fold(self.identity[self.unit], |acc, &f| self.tensor_mor[acc][f])
    }

    pub fn symmetry(&self, a: ObjId, b: ObjId) -> MorId {
        self.symmetry[a][b]
    }

    pub fn hom(&self, a: ObjId, b: ObjId) -> &[MorId] {
        self.hom.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_discrete(&self) -> bool {
        self.morphisms.len() == self.object_names.len()
    }

    /// Replaces one symmetry entry; used to build broken tables.
    pub fn with_symmetry(&self, a: ObjId, b: ObjId, m: MorId) -> PermutativeGroupoid {
        let mut p = self.clone();
        p.symmetry[a][b] = m;
        p
    }

    /// `hom(c1 ⊗ … ⊗ cn, c)`; the empty tensor is the unit.
    pub fn operations(&self, inputs: &[ObjId], output: ObjId) -> &[MorId] {
        self.hom(self.tensor_all(inputs), output)
    }

    pub fn inverse(&self, f: MorId) -> Option<MorId> {
        let m = &self.morphisms[f];
        self.hom(m.dst, m.src)
            .iter()
            .copied()
            .find(|&g| self.compose[g][f] == Some(self.identity[m.src]) && self.compose[f][g] == Some(self.identity[m.dst]))
    }

    /// The canonical symmetry isomorphism `x_0 ⊗ … ⊗ x_{n-1} → x_{p(0)} ⊗ … ⊗ x_{p(n-1)}`.
    pub fn permutation_iso(&self, objs: &[ObjId], perm: &[usize]) -> MorId {
        debug_assert_eq!(objs.len(), perm.len());
        // bubble the current arrangement into the target one by adjacent swaps
        let mut current: Vec<usize> = (0..objs.len()).collect();
        let mut iso = self.identity[self.tensor_all(objs)];
        for k in 0..perm.len() {
            let pos = current.iter().position(|&x| x == perm[k]).expect("perm is a permutation");
            for i in (k..pos).rev() {
                let before: Vec<ObjId> = current[..i].iter().map(|&x| objs[x]).collect();
                let after: Vec<ObjId> = current[i + 2..].iter().map(|&x| objs[x]).collect();
                let left = self.identity[self.tensor_all(&before)];
                let right = self.identity[self.tensor_all(&after)];
                let tau = self.symmetry[objs[current[i]]][objs[current[i + 1]]];
                let step = self.tensor_mor[self.tensor_mor[left][tau]][right];
                iso = self.compose(step, iso);
                current.swap(i, i + 1);
            }
        }
        iso
    }

    pub fn validate(&self) -> Result<(), SmcViolation> {
        let mn = |m: MorId| self.morphisms[m].name.clone();
        let on = |o: ObjId| self.object_names[o].clone();
        let k = self.morphisms.len();
        let n = self.num_objects();
        for f in 0..k {
            let m = &self.morphisms[f];
            if self.compose[f][self.identity[m.src]] != Some(f) || self.compose[self.identity[m.dst]][f] != Some(f) {
                return Err(SmcViolation::Identity(mn(f)));
            }
        }
        for h in 0..k {
            for g in 0..k {
                let Some(hg) = self.compose[h][g] else { continue };
                for f in 0..k {
                    let Some(gf) = self.compose[g][f] else { continue };
                    if self.compose[hg][f] != self.compose[h][gf] {
                        return Err(SmcViolation::Associativity(mn(h), mn(g), mn(f)));
                    }
                }
            }
        }
        for f in 0..k {
            if self.inverse(f).is_none() {
                return Err(SmcViolation::NotInvertible(mn(f)));
            }
        }
        for a in 0..n {
            if self.tensor[self.unit][a] != a || self.tensor[a][self.unit] != a {
                return Err(SmcViolation::ObjectUnit(on(a)));
            }
            for b in 0..n {
                for c in 0..n {
                    if self.tensor[self.tensor[a][b]][c] != self.tensor[a][self.tensor[b][c]] {
                        return Err(SmcViolation::ObjectAssociativity(on(a), on(b), on(c)));
                    }
                }
            }
        }
        let unit_id = self.identity[self.unit];
        for f in 0..k {
            if self.tensor_mor[unit_id][f] != f || self.tensor_mor[f][unit_id] != f {
                return Err(SmcViolation::TensorStrictness(mn(f)));
            }
            for g in 0..k {
                let (mf, mg) = (&self.morphisms[f], &self.morphisms[g]);
                let fg = &self.morphisms[self.tensor_mor[f][g]];
                if fg.src != self.tensor[mf.src][mg.src] || fg.dst != self.tensor[mf.dst][mg.dst] {
                    return Err(SmcViolation::TensorTyping(mn(f), mn(g)));
                }
                for h in 0..k {
                    if self.tensor_mor[self.tensor_mor[f][g]][h] != self.tensor_mor[f][self.tensor_mor[g][h]] {
                        return Err(SmcViolation::TensorStrictness(mn(f)));
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if self.tensor_mor[self.identity[a]][self.identity[b]] != self.identity[self.tensor[a][b]] {
                    return Err(SmcViolation::TensorFunctoriality(mn(self.identity[a]), mn(self.identity[b])));
                }
            }
        }
        for g in 0..k {
            for f in 0..k {
                let Some(gf) = self.compose[g][f] else { continue };
                for g2 in 0..k {
                    for f2 in 0..k {
                        let Some(gf2) = self.compose[g2][f2] else { continue };
                        let lhs = self.tensor_mor[gf][gf2];
                        let rhs = self.compose[self.tensor_mor[g][g2]][self.tensor_mor[f][f2]];
                        if rhs != Some(lhs) {
                            return Err(SmcViolation::TensorFunctoriality(mn(gf), mn(gf2)));
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let t = &self.morphisms[self.symmetry[a][b]];
                if t.src != self.tensor[a][b] || t.dst != self.tensor[b][a] {
                    return Err(SmcViolation::SymmetryTyping(on(a), on(b)));
                }
            }
        }
        for f in 0..k {
            for g in 0..k {
                let (mf, mg) = (&self.morphisms[f], &self.morphisms[g]);
                // (g ⊗ f) ∘ τ_{a,b} = τ_{a',b'} ∘ (f ⊗ g)
                let lhs = self.compose[self.tensor_mor[g][f]][self.symmetry[mf.src][mg.src]];
                let rhs = self.compose[self.symmetry[mf.dst][mg.dst]][self.tensor_mor[f][g]];
                if lhs != rhs {
                    return Err(SmcViolation::SymmetryNaturality(mn(f), mn(g)));
                }
            }
        }
        for a in 0..n {
            if self.symmetry[a][self.unit] != self.identity[a] || self.symmetry[self.unit][a] != self.identity[a] {
                return Err(SmcViolation::SymmetryUnit(on(a)));
            }
            for b in 0..n {
                if self.compose[self.symmetry[b][a]][self.symmetry[a][b]] != Some(self.identity[self.tensor[a][b]]) {
                    return Err(SmcViolation::SymmetryInvolution(on(a), on(b)));
                }
                for c in 0..n {
                    let lhs = self.symmetry[a][self.tensor[b][c]];
                    let first = self.tensor_mor[self.symmetry[a][b]][self.identity[c]];
                    let second = self.tensor_mor[self.identity[b]][self.symmetry[a][c]];
                    if self.compose[second][first] != Some(lhs) {
                        return Err(SmcViolation::Hexagon(on(a), on(b), on(c)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Isomorphism classes of objects with the monoid structure induced by
    /// the tensor product.
    pub fn pi0_monoid(&self) -> Pi0 {
        let n = self.num_objects();
        let mut parent: Vec<usize> = (0..n).collect();
        for m in &self.morphisms {
            let (a, b) = (find(&mut parent, m.src), find(&mut parent, m.dst));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut class_index = BTreeMap::new();
        let mut class_of = vec![0; n];
        for (o, slot) in class_of.iter_mut().enumerate() {
            let r = find(&mut parent, o);
            let next = class_index.len();
            *slot = *class_index.entry(r).or_insert(next);
        }
        let classes = class_index.len();
        let mut rep = vec![usize::MAX; classes];
        for o in (0..n).rev() {
            rep[class_of[o]] = o;
        }
        let op: Vec<Vec<usize>> = (0..classes)
            .map(|x| (0..classes).map(|y| class_of[self.tensor[rep[x]][rep[y]]]).collect())
            .collect();
        debug_assert!((0..n).all(|a| (0..n).all(|b| class_of[self.tensor[a][b]] == op[class_of[a]][class_of[b]])));
        let monoid = CommutativeMonoid::new(op, class_of[self.unit]).expect("π0 of a permutative groupoid is a commutative monoid");
        Pi0 { monoid, class_of }
    }

    pub fn is_picard(&self) -> bool {
        self.pi0_monoid().monoid.is_group()
    }

    /// The full sub-groupoid on `objects`, which must be closed under the
    /// tensor product and contain the unit. Returns it together with the
    /// object and morphism index maps into `self`.
    pub fn full_subgroupoid(&self, objects: &[ObjId]) -> Option<(PermutativeGroupoid, Vec<ObjId>, Vec<MorId>)> {
        let keep: Vec<ObjId> = {
            let mut v = objects.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        };
        let index: HashMap<ObjId, ObjId> = keep.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        if !index.contains_key(&self.unit) {
            return None;
        }
        for &a in &keep {
            for &b in &keep {
                if !index.contains_key(&self.tensor[a][b]) {
                    return None;
                }
            }
        }
        let mors: Vec<MorId> = (0..self.morphisms.len())
            .filter(|&m| index.contains_key(&self.morphisms[m].src) && index.contains_key(&self.morphisms[m].dst))
            .collect();
        let mindex: HashMap<MorId, MorId> = mors.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let sub = PermutativeGroupoid::assemble(
            keep.iter().map(|&o| self.object_names[o].clone()).collect(),
            index[&self.unit],
            keep.iter().map(|&a| keep.iter().map(|&b| index[&self.tensor[a][b]]).collect()).collect(),
            mors.iter()
                .map(|&m| Morphism {
                    name: self.morphisms[m].name.clone(),
                    src: index[&self.morphisms[m].src],
                    dst: index[&self.morphisms[m].dst],
                })
                .collect(),
            keep.iter().map(|&o| mindex[&self.identity[o]]).collect(),
            mors.iter()
                .map(|&g| mors.iter().map(|&f| self.compose[g][f].map(|h| mindex[&h])).collect())
                .collect(),
            mors.iter().map(|&f| mors.iter().map(|&g| mindex[&self.tensor_mor[f][g]]).collect()).collect(),
            keep.iter().map(|&a| keep.iter().map(|&b| mindex[&self.symmetry[a][b]]).collect()).collect(),
        );
        Some((sub, keep, mors))
    }
}

/// All commutative monoids of the given order up to isomorphism, each with
/// unit `0`, in a deterministic order.
pub fn commutative_monoids(order: usize) -> Vec<CommutativeMonoid> {
    if order == 0 {
        return vec![];
    }
    let n = order;
    let mut op = vec![vec![usize::MAX; n]; n];
    for a in 0..n {
        op[0][a] = a;
        op[a][0] = a;
    }
    let cells: Vec<(usize, usize)> = (1..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let mut found = std::collections::BTreeSet::new();
    let perms = permutations_fixing_zero(n);

    fn associative_so_far(op: &[Vec<usize>]) -> bool {
        let n = op.len();
        for a in 0..n {
            for b in 0..n {
                let ab = op[a][b];
                if ab == usize::MAX {
                    continue;
                }
                for c in 0..n {
                    let bc = op[b][c];
                    if bc == usize::MAX {
                        continue;
                    }
                    let (l, r) = (op[ab][c], op[a][bc]);
                    if l != usize::MAX && r != usize::MAX && l != r {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn go(
        k: usize,
        cells: &[(usize, usize)],
        op: &mut Vec<Vec<usize>>,
        perms: &[Vec<usize>],
        found: &mut std::collections::BTreeSet<Vec<Vec<usize>>>,
    ) {
        if k == cells.len() {
            let canonical = perms
                .iter()
                .map(|p| {
                    let n = op.len();
                    let mut t = vec![vec![0; n]; n];
                    for a in 0..n {
                        for b in 0..n {
                            t[p[a]][p[b]] = p[op[a][b]];
                        }
                    }
                    t
                })
                .min()
                .expect("identity permutation");
            found.insert(canonical);
            return;
        }
        let (a, b) = cells[k];
        for x in 0..op.len() {
            op[a][b] = x;
            op[b][a] = x;
            if associative_so_far(op) {
                go(k + 1, cells, op, perms, found);
            }
        }
        op[a][b] = usize::MAX;
        op[b][a] = usize::MAX;
    }

    go(0, &cells, &mut op, &perms, &mut found);
    found
        .into_iter()
        .map(|t| CommutativeMonoid::new(t, 0).expect("enumerated tables are monoids"))
        .collect()
}

fn permutations_fixing_zero(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let rest: Vec<usize> = (1..n).collect();
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut prefix = vec![0];
    go(&mut prefix, &mut rest.clone(), &mut out);
    out
}

/// The groupoid corpus: every commutative monoid of order at most
/// `max_order` as a discrete groupoid, then the signed `Z/2` example.
pub fn groupoid_corpus(max_order: usize) -> Vec<(String, PermutativeGroupoid)> {
    let mut out = Vec::new();
    for order in 1..=max_order {
        for (i, m) in commutative_monoids(order).iter().enumerate() {
            out.push((format!("monoid{order}_{i}"), PermutativeGroupoid::from_commutative_monoid(m)));
        }
    }
    out.push(("signed_z2".to_string(), PermutativeGroupoid::signed_z2()));
    out
}
