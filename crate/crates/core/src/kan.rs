//! Horn maps into a dendroidal set and exhaustive filler search.
//!
//! A map out of a horn is a compatible family of dendrices on its faces:
//! one dendrex per face, agreeing on every maximal subface two faces share.
//! Horn maps are enumerated face by face, looking candidates up by their
//! restrictions to subfaces shared with the faces already chosen.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::dset::{self, DSet, Dendrex, DendMap, DsetError, SubRepresentable};
use crate::omega::{self, factor_through, FaceLabel, OmegaMap};
use crate::tree::{enumerate_trees, Tree};

/// A map `Λ^a[T] → D`, given by its value on each face of the horn (in the
/// order of the horn's generators).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornMap {
    pub tree: Arc<Tree>,
    pub label: FaceLabel,
    pub values: Vec<Dendrex>,
}

impl HornMap {
    /// The natural map on the whole horn determined by the face values.
    pub fn extend(&self, d: &DSet) -> DendMap {
        let h = dset::horn(&self.tree, self.label).expect("label of the tree");
        h.extend(d, self.values.clone())
    }

    /// Checks naturality of the extended map on all shapes with at most as
    /// many edges as the tree.
    pub fn check_naturality(&self, d: &DSet) -> Result<(), DsetError> {
        self.extend(d).check_naturality(&dset::shape_window(self.tree.num_edges()))
    }
}

/// Interned dendrices of one shape.
struct Interned {
    items: Vec<Dendrex>,
    index: HashMap<Dendrex, u32>,
}

impl Interned {
    fn new(items: Vec<Dendrex>) -> Interned {
        let index = items.iter().cloned().enumerate().map(|(i, x)| (x, i as u32)).collect();
        Interned { items, index }
    }

    fn ids(&self, xs: &[Dendrex]) -> Vec<u32> {
        xs.iter().map(|x| self.index[x]).collect()
    }
}

/// A shared subface of two horn faces, with restriction tables from both.
struct Overlap {
    earlier: usize,
    /// Restriction of the earlier face's dendrices to the overlap.
    from_earlier: Vec<u32>,
    /// Restriction of the later face's dendrices to the overlap.
    from_later: Vec<u32>,
}

/// Precomputed data for enumerating maps from one horn and filling them.
pub struct HornProblem {
    pub tree: Arc<Tree>,
    pub label: FaceLabel,
    horn: Arc<SubRepresentable>,
    faces: Vec<Interned>,
    /// Overlaps of face `j` with faces `i < j`.
    overlaps: Vec<Vec<Overlap>>,
    /// Candidates for face `j` keyed by their overlap restrictions.
    candidates: Vec<HashMap<Vec<u32>, Vec<u32>>>,
    /// Face restrictions of each `T`-dendrex, mapped to a witness.
    fillers: HashMap<Vec<u32>, u32>,
    top: Vec<Dendrex>,
}

impl HornProblem {
    pub fn new(d: &DSet, tree: &Arc<Tree>, label: FaceLabel) -> Result<HornProblem, DsetError> {
        let horn = dset::horn(tree, label)?;
        let gens: Vec<OmegaMap> = horn.generators().to_vec();
        let faces: Vec<Interned> = gens.iter().map(|g| Interned::new(d.dendrices(g.source()))).collect();
        let mut overlaps: Vec<Vec<Overlap>> = Vec::new();
        let mut candidates = Vec::new();
        for j in 0..gens.len() {
            let mut list = Vec::new();
            for i in 0..j {
                for s in omega::maximal_common_subfaces(tree, &gens[i], &gens[j]) {
                    let shape = s.source().clone();
                    let sub = Interned::new(d.dendrices(&shape));
                    let hi = factor_through(&s, &gens[i]).expect("common subface");
                    let hj = factor_through(&s, &gens[j]).expect("common subface");
                    list.push(Overlap {
                        earlier: i,
                        from_earlier: sub.ids(&d.act_all(&hi, &faces[i].items)),
                        from_later: sub.ids(&d.act_all(&hj, &faces[j].items)),
                    });
                }
            }
            let mut index: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
            for x in 0..faces[j].items.len() {
                let key: Vec<u32> = list.iter().map(|o| o.from_later[x]).collect();
                index.entry(key).or_default().push(x as u32);
            }
            overlaps.push(list);
            candidates.push(index);
        }
        let top = d.dendrices(tree);
        let restrictions: Vec<Vec<u32>> = gens
            .iter()
            .zip(&faces)
            .map(|(g, f)| f.ids(&d.act_all(g, &top)))
            .collect();
        let mut fillers = HashMap::new();
        for k in 0..top.len() {
            let key: Vec<u32> = restrictions.iter().map(|r| r[k]).collect();
            fillers.entry(key).or_insert(k as u32);
        }
        Ok(HornProblem {
            tree: tree.clone(),
            label,
            horn,
            faces,
            overlaps,
            candidates,
            fillers,
            top,
        })
    }

    pub fn horn(&self) -> &Arc<SubRepresentable> {
        &self.horn
    }

    /// Calls `visit` with each horn map (as face-dendrex ids) and its filler,
    /// stopping early when `visit` returns false.
    fn each(&self, mut visit: impl FnMut(&[u32], Option<u32>) -> bool) {
        let n = self.faces.len();
        let mut chosen: Vec<u32> = Vec::with_capacity(n);
        fn go(
            p: &HornProblem,
            chosen: &mut Vec<u32>,
            visit: &mut dyn FnMut(&[u32], Option<u32>) -> bool,
        ) -> bool {
            let j = chosen.len();
            if j == p.faces.len() {
                return visit(chosen, p.fillers.get(chosen.as_slice()).copied());
            }
            let key: Vec<u32> = p.overlaps[j]
                .iter()
                .map(|o| o.from_earlier[chosen[o.earlier] as usize])
                .collect();
            if let Some(xs) = p.candidates[j].get(&key) {
                for &x in xs {
                    chosen.push(x);
                    let keep_going = go(p, chosen, visit);
                    chosen.pop();
                    if !keep_going {
                        return false;
                    }
                }
            }
            true
        }
        let _ = n;
        go(self, &mut chosen, &mut visit);
    }

    fn to_map(&self, ids: &[u32]) -> HornMap {
        HornMap {
            tree: self.tree.clone(),
            label: self.label,
            values: ids.iter().zip(&self.faces).map(|(&i, f)| f.items[i as usize].clone()).collect(),
        }
    }

    pub fn horn_maps(&self) -> Vec<HornMap> {
        let mut out = Vec::new();
        self.each(|ids, _| {
            out.push(self.to_map(ids));
            true
        });
        out
    }

    /// Counts horn maps and filled ones; with `stop_at_gap` the count ends at
    /// the first map without a filler, which is returned.
    pub fn tally(&self, stop_at_gap: bool) -> (HornTally, Option<HornMap>) {
        let mut tally = HornTally {
            tree: self.tree.to_string(),
            label: self.label.render(&self.tree),
            maps: 0,
            filled: 0,
        };
        let mut gap = None;
        self.each(|ids, filler| {
            tally.maps += 1;
            match filler {
                Some(_) => {
                    tally.filled += 1;
                    true
                }
                None => {
                    if gap.is_none() {
                        gap = Some(self.to_map(ids));
                    }
                    !stop_at_gap
                }
            }
        });
        (tally, gap)
    }

    /// A filler of `h` from the precomputed table.
    pub fn filler(&self, h: &HornMap) -> Option<Dendrex> {
        let ids: Option<Vec<u32>> = h.values.iter().zip(&self.faces).map(|(x, f)| f.index.get(x).copied()).collect();
        let k = *self.fillers.get(&ids?)?;
        Some(self.top[k as usize].clone())
    }
}

pub fn horn_maps(d: &DSet, t: &Arc<Tree>, a: FaceLabel) -> Result<Vec<HornMap>, DsetError> {
    Ok(HornProblem::new(d, t, a)?.horn_maps())
}

/// A dendrex of shape `T` restricting to `h` on every face, found by
/// scanning `D_T`.
pub fn has_filler(d: &DSet, h: &HornMap) -> Option<Dendrex> {
    let horn = dset::horn(&h.tree, h.label).ok()?;
    let gens = horn.generators();
    d.dendrices(&h.tree)
        .into_iter()
        .find(|x| gens.iter().zip(&h.values).all(|(g, v)| d.act(g, x) == *v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KanMode {
    Inner,
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HornTally {
    pub tree: String,
    pub label: String,
    pub maps: usize,
    pub filled: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub tree: String,
    pub label: String,
    /// Face values as `face source: dendrex`.
    pub values: Vec<String>,
    /// Whether the extended horn map passed the naturality check.
    pub natural: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KanReport {
    pub mode: KanMode,
    pub max_vertices: usize,
    pub max_arity: usize,
    pub passed: bool,
    pub horns: Vec<HornTally>,
    pub counterexample: Option<Counterexample>,
}

impl KanReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mode = match self.mode {
            KanMode::Inner => "inner",
            KanMode::Full => "full",
        };
        out.push_str(&format!(
            "{mode} Kan check, trees with at most {} vertices of arity at most {}\n",
            self.max_vertices, self.max_arity
        ));
        for h in &self.horns {
            out.push_str(&format!("  {} at {}: {} maps, {} filled\n", h.tree, h.label, h.maps, h.filled));
        }
        match &self.counterexample {
            Some(c) => {
                out.push_str(&format!("FAIL: horn {} of {} has no filler for\n", c.label, c.tree));
                for v in &c.values {
                    out.push_str(&format!("  {v}\n"));
                }
                if c.values.is_empty() {
                    out.push_str("  the empty horn map\n");
                }
            }
            None => out.push_str("PASS\n"),
        }
        out
    }
}

/// Trees within the bounds, ordered by vertex count, edge count and code.
pub fn kan_trees(max_vertices: usize, max_arity: usize) -> Vec<Arc<Tree>> {
    let mut trees = enumerate_trees(max_vertices, max_arity);
    trees.sort_by_cached_key(|t| (t.num_vertices(), t.num_edges(), t.canonical_code()));
    trees.into_iter().map(Arc::new).collect()
}

fn check(d: &DSet, mode: KanMode, max_vertices: usize, max_arity: usize) -> KanReport {
    let mut horns = Vec::new();
    let mut counterexample = None;
    'trees: for t in kan_trees(max_vertices, max_arity) {
        for a in omega::horn_labels(&t) {
            if mode == KanMode::Inner && !a.is_inner() {
                continue;
            }
            let problem = HornProblem::new(d, &t, a).expect("listed horn label");
            let (tally, gap) = problem.tally(true);
            horns.push(tally);
            if let Some(h) = gap {
                let natural = h.check_naturality(d).is_ok();
                let horn = problem.horn();
                let values = horn
                    .generators()
                    .iter()
                    .zip(&h.values)
                    .map(|(g, x)| format!("{}: {}", g.source(), d.label(g.source(), x)))
                    .collect();
                counterexample = Some(Counterexample {
                    tree: t.to_string(),
                    label: a.render(&t),
                    values,
                    natural,
                });
                break 'trees;
            }
        }
    }
    KanReport {
        mode,
        max_vertices,
        max_arity,
        passed: counterexample.is_none(),
        horns,
        counterexample,
    }
}

pub fn check_inner_kan(d: &DSet, max_vertices: usize, max_arity: usize) -> KanReport {
    check(d, KanMode::Inner, max_vertices, max_arity)
}

pub fn check_fully_kan(d: &DSet, max_vertices: usize, max_arity: usize) -> KanReport {
    check(d, KanMode::Full, max_vertices, max_arity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dset::SimplicialSetFin;
    use crate::smc::{CommutativeMonoid, PermutativeGroupoid};

    fn c(n: usize) -> Arc<Tree> {
        Arc::new(Tree::corolla(n))
    }

    fn label(t: &Arc<Tree>, s: &str) -> FaceLabel {
        FaceLabel::parse(t, s).unwrap()
    }

    fn z2() -> DSet {
        dset::nerve(&PermutativeGroupoid::from_commutative_monoid(&CommutativeMonoid::cyclic(2)))
    }

    fn max_monoid() -> DSet {
        let m = CommutativeMonoid::new(vec![vec![0, 1], vec![1, 1]], 0).unwrap();
        dset::nerve(&PermutativeGroupoid::from_commutative_monoid(&m))
    }

    fn obj(o: usize) -> Dendrex {
        Dendrex::Nerve {
            colours: vec![o],
            ops: vec![],
        }
    }

    #[test]
    fn horn_map_counts() {
        let c2 = c(2);
        assert_eq!(horn_maps(&z2(), &c2, label(&c2, "b")).unwrap().len(), 4);
        let c0 = c(0);
        assert_eq!(horn_maps(&z2(), &c0, label(&c0, "b")).unwrap().len(), 1);
        assert!(horn_maps(&dset::empty(), &c2, label(&c2, "b")).unwrap().is_empty());
    }

    #[test]
    fn z2_root_horn_filler() {
        let c2 = c(2);
        let a = label(&c2, "b");
        let h = HornMap {
            tree: c2.clone(),
            label: a,
            values: vec![obj(1), obj(1)],
        };
        let d = z2();
        let w = has_filler(&d, &h).unwrap();
        let Dendrex::Nerve { colours, .. } = &w else { panic!() };
        assert_eq!(colours[c2.root()], 0);
        assert_eq!(HornProblem::new(&d, &c2, a).unwrap().filler(&h), Some(w));
    }

    #[test]
    fn max_monoid_leaf_horn_has_gap() {
        let c2 = c(2);
        let a = label(&c2, "a2");
        let d = max_monoid();
        // a1 = 1 and output 0: no x with 1 + x = 0
        let problem = HornProblem::new(&d, &c2, a).unwrap();
        let maps = problem.horn_maps();
        let gaps: Vec<&HornMap> = maps.iter().filter(|h| has_filler(&d, h).is_none()).collect();
        assert_eq!(gaps.len(), 1);
        assert!(gaps[0].values.contains(&obj(1)) && gaps[0].values.contains(&obj(0)));
    }

    #[test]
    fn composite_fills_inner_horn_of_l2() {
        let l2 = Arc::new(Tree::linear(2));
        let inner = omega::horn_labels(&l2).into_iter().find(|a| a.is_inner()).unwrap();
        let d = dset::i_shriek(&SimplicialSetFin::triangle());
        let maps = horn_maps(&d, &l2, inner).unwrap();
        assert!(!maps.is_empty());
        for h in &maps {
            assert!(has_filler(&d, h).is_some(), "{h:?}");
        }
    }

    #[test]
    fn fillers_restrict_to_their_horn_maps() {
        let t: Arc<Tree> = Arc::new("e[c[a,b],d]".parse().unwrap());
        let sig = dset::nerve(&PermutativeGroupoid::signed_z2());
        for a in omega::horn_labels(&t) {
            let p = HornProblem::new(&sig, &t, a).unwrap();
            let gens = p.horn().generators().to_vec();
            for h in p.horn_maps() {
                let w = p.filler(&h).expect("nerves of Picard groupoids fill");
                for (g, v) in gens.iter().zip(&h.values) {
                    assert_eq!(sig.act(g, &w), *v);
                }
            }
        }
    }

    #[test]
    fn horn_maps_are_natural() {
        let t: Arc<Tree> = Arc::new("e[c[a,b],d]".parse().unwrap());
        let d = max_monoid();
        for a in omega::horn_labels(&t) {
            for h in horn_maps(&d, &t, a).unwrap() {
                h.check_naturality(&d).unwrap();
            }
        }
    }

    #[test]
    fn remark_examples() {
        assert!(check_inner_kan(&max_monoid(), 2, 2).passed);
        assert!(check_fully_kan(&z2(), 2, 2).passed);
        let r = check_fully_kan(&max_monoid(), 2, 2);
        assert!(!r.passed);
        assert!(r.counterexample.as_ref().unwrap().natural);
        let r = check_fully_kan(&dset::i_shriek(&SimplicialSetFin::point()), 3, 3);
        assert!(!r.passed);
        assert_eq!(r.counterexample.unwrap().tree, "e0[]");
        assert!(!check_fully_kan(&dset::empty(), 1, 1).passed);
    }
}
