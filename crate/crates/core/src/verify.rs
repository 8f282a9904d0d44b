//! Named verification suites reproducing the K₀ and Kan facts end to end,
//! plus seeded generators of random test inputs.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dset::{self, DSet, DendMap, SimplicialSetFin};
use crate::intlin::{FgAbelianGroup, GroupHom, IntMatrix, RowLattice};
use crate::kan::{self, HornProblem};
use crate::kzero::{self, presentation, K0Presentation, Pushout};
use crate::omega::{self, FaceLabel};
use crate::smc::{self, PermutativeGroupoid};
use crate::tree::{enumerate_trees, enumerate_trees_by_edges, Tree};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{mark} {} :: {} ({})\n", self.suite, c.name, c.detail));
        }
        out.push_str(&format!(
            "{}: {}\n",
            self.suite,
            if self.passed { "pass" } else { "FAIL" }
        ));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub max_vertices: usize,
    pub max_arity: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_vertices: 3,
            max_arity: 3,
            seed: 0,
        }
    }
}

pub const SUITES: &[&str] = &[
    "example-3-3",
    "lemma-3-4",
    "prop-3-2",
    "segal-core",
    "attach",
    "quotient",
    "kan",
];

/// Runs a suite by name; `all` runs every suite in turn.
pub fn run_suite(name: &str, opts: &VerifyOptions) -> Option<Vec<SuiteReport>> {
    if name == "all" {
        return Some(SUITES.iter().map(|s| run_one(s, opts).expect("listed suite")).collect());
    }
    run_one(name, opts).map(|r| vec![r])
}

fn run_one(name: &str, opts: &VerifyOptions) -> Option<SuiteReport> {
    let checks = match name {
        "example-3-3" => vec![representables_free_on_leaves(6), face_maps_send_leaves_over(4)],
        "lemma-3-4" => vec![
            horn_inclusions_iso(opts.max_vertices, opts.max_arity),
            grafted_horn_tables(),
            quotients_are_cokernels(opts.seed, 25),
        ],
        "prop-3-2" => vec![
            i_shriek_free_on_components(opts.seed, 50),
            nerves_complete_pi0(5),
            lambda_and_kan(4, opts.max_vertices, opts.max_arity),
        ],
        "segal-core" => vec![segal_cores(6)],
        "attach" => vec![horn_attachments(opts.seed, 100)],
        "quotient" => vec![quotients_are_cokernels(opts.seed, 25)],
        "kan" => kan_suite(opts.seed, opts.max_vertices, opts.max_arity),
        _ => return None,
    };
    Some(SuiteReport {
        suite: name.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn check(name: impl Into<String>, failures: Vec<String>, total: usize, what: &str) -> Check {
    let detail = match failures.first() {
        None => format!("{total} {what}"),
        Some(f) => format!("{} of {total} {what} failed, first: {f}", failures.len()),
    };
    Check {
        name: name.into(),
        passed: failures.is_empty(),
        detail,
    }
}

/// The map `Z^leaves → K₀(Ω[T])` sending each leaf to its generator.
fn leaf_map(t: &Arc<Tree>, pres: &K0Presentation) -> Option<GroupHom> {
    let leaves = t.leaves();
    let mut m = IntMatrix::zeros(leaves.len(), pres.generators.len());
    for (i, &l) in leaves.iter().enumerate() {
        let j = pres.generator_index(&dset::Dendrex::Arrow(vec![l]))?;
        m.set(i, j, BigInt::one());
    }
    GroupHom::new(FgAbelianGroup::free(leaves.len()), pres.group(), m).ok()
}

pub fn representables_free_on_leaves(max_edges: usize) -> Check {
    let trees = enumerate_trees_by_edges(max_edges);
    let failures = trees
        .iter()
        .map(|t| Arc::new(t.clone()))
        .filter(|t| {
            let pres = presentation(&dset::representable(t), None).expect("effective bound");
            !leaf_map(t, &pres).is_some_and(|h| h.is_isomorphism())
        })
        .map(|t| t.to_string())
        .collect();
    check(
        format!("K0 of a representable is free on its leaves (trees with at most {max_edges} edges)"),
        failures,
        trees.len(),
        "trees",
    )
}

/// Induced maps of faces send a leaf `e` to the sum of the leaves over `f(e)`.
pub fn face_maps_send_leaves_over(max_edges: usize) -> Check {
    let mut failures = Vec::new();
    let mut total = 0;
    for t in enumerate_trees_by_edges(max_edges) {
        let t = Arc::new(t);
        let tp = presentation(&dset::representable(&t), None).expect("effective bound");
        let tg = tp.group();
        for f in omega::faces(&t) {
            total += 1;
            let s = f.map.source().clone();
            let fmap = DendMap::new(dset::representable(&s), dset::representable(&t), {
                let g = f.map.clone();
                move |_, x| match x {
                    dset::Dendrex::Arrow(e) => dset::Dendrex::Arrow(e.iter().map(|&i| g.apply(i)).collect()),
                    other => other.clone(),
                }
            });
            let sp = presentation(fmap.source(), None).expect("effective bound");
            let Ok(h) = kzero::induced_between(&fmap, &sp, &tp) else {
                failures.push(format!("{} not natural", f.map));
                continue;
            };
            for e in s.leaves() {
                let i = sp.generator_index(&dset::Dendrex::Arrow(vec![e])).expect("edge generator");
                let image = h.matrix().row(i).to_vec();
                let mut expected = vec![BigInt::from(0); tp.generators.len()];
                for l in t.leaves() {
                    if t.is_below_or_equal(f.map.apply(e), l) {
                        let j = tp.generator_index(&dset::Dendrex::Arrow(vec![l])).expect("edge generator");
                        expected[j] += 1;
                    }
                }
                if tg.coordinates(&image) != tg.coordinates(&expected) {
                    failures.push(format!("{} at leaf {}", f.map, s.name(e)));
                }
            }
        }
    }
    check(
        format!("face maps send a leaf to the leaves over its image (trees with at most {max_edges} edges)"),
        failures,
        total,
        "faces",
    )
}

/// Whether `Λ^a[T] → Ω[T]` induces an isomorphism on K₀.
pub fn horn_inclusion_is_iso(t: &Arc<Tree>, a: FaceLabel) -> bool {
    let h = dset::horn(t, a).expect("horn label");
    kzero::induced(&h.inclusion()).is_ok_and(|g| g.is_isomorphism())
}

pub fn horn_inclusions_iso(max_vertices: usize, max_arity: usize) -> Check {
    let mut failures = Vec::new();
    let mut total = 0;
    for t in kan::kan_trees(max_vertices, max_arity) {
        for a in omega::horn_labels(&t) {
            total += 1;
            if !horn_inclusion_is_iso(&t, a) {
                failures.push(format!("horn({t}, {})", a.render(&t)));
            }
        }
    }
    check(
        format!("horn inclusions induce K0 isomorphisms ({max_vertices} vertices, arity {max_arity})"),
        failures,
        total,
        "horns",
    )
}

/// The displayed presentations of the three horns of `C(n,k)`, as
/// `(label, rows)` with rows written as `(left names, right names)`.
pub fn grafted_horn_relations(n: usize, k: usize) -> Vec<(&'static str, Vec<(Vec<String>, Vec<String>)>)> {
    let a: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    let b: Vec<String> = (1..=k).map(|i| format!("b{i}")).collect();
    let bk = vec![format!("b{k}")];
    let c = vec!["c".to_string()];
    let mixed: Vec<String> = b[..k - 1].iter().chain(&a).cloned().collect();
    vec![
        ("bk", vec![(a.clone(), bk.clone()), (b.clone(), c.clone())]),
        ("v", vec![(a.clone(), bk), (mixed.clone(), c.clone())]),
        ("w", vec![(b, c.clone()), (mixed, c)]),
    ]
}

/// Rows over the generators named in `labels`.
pub fn named_rows(labels: &[String], rows: &[(Vec<String>, Vec<String>)]) -> IntMatrix {
    let idx = |name: &String| labels.iter().position(|l| l == name).expect("named generator");
    let rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|(lhs, rhs)| {
            let mut v = vec![BigInt::from(0); labels.len()];
            lhs.iter().for_each(|x| v[idx(x)] += 1);
            rhs.iter().for_each(|x| v[idx(x)] -= 1);
            v
        })
        .collect();
    IntMatrix::from_big_rows(labels.len(), rows)
}

/// Whether two matrices have the same row lattice.
pub fn same_row_lattice(m: &IntMatrix, n: &IntMatrix) -> bool {
    let (lm, ln) = (RowLattice::new(m), RowLattice::new(n));
    (0..m.rows()).all(|i| ln.contains(m.row(i))) && (0..n.rows()).all(|i| lm.contains(n.row(i)))
}

pub fn grafted_horn_tables() -> Check {
    let mut failures = Vec::new();
    let mut total = 0;
    for n in 0..=3 {
        for k in 1..=3 {
            let arg = crate::expr::parse_tree(&format!("C({n},{k})")).expect("shorthand");
            for (label, rows) in grafted_horn_relations(n, k) {
                total += 1;
                let a = arg.label(label, 0).expect("alias");
                let d = dset::horn(&arg.tree, a).expect("label").as_dset();
                let pres = presentation(&d, None).expect("effective bound");
                let g = pres.group();
                let displayed = named_rows(&pres.generator_labels, &rows);
                if !(g.is_free() && g.rank() == n + k - 1 && same_row_lattice(&pres.matrix(), &displayed)) {
                    failures.push(format!("C({n},{k}) at {label}: {}", g.render()));
                }
            }
        }
    }
    check("grafted corolla horn presentations", failures, total, "horns")
}

/// `K₀(D/D₀)` against the glued presentation of `0 ← K₀(D₀) → K₀(D)`.
pub fn quotient_is_cokernel(d: &DSet, d0: &DSet) -> Result<bool, String> {
    let inclusion = DendMap::token_inclusion(d0, d);
    let (q, projection) = dset::quotient(&inclusion).map_err(|e| e.to_string())?;
    let square = Pushout {
        left: inclusion,
        right: dset::to_terminal(d0),
        left_leg: projection,
        right_leg: DendMap::token_inclusion(&dset::terminal(), &q),
    };
    kzero::colimit_check(&square).map_err(|e| e.to_string())
}

pub fn quotients_are_cokernels(seed: u64, count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..count {
        let pair = random_pair(&mut rng);
        match quotient_is_cokernel(&pair.d, &pair.d0) {
            Ok(true) => {}
            Ok(false) => failures.push(pair.description),
            Err(e) => failures.push(format!("{}: {e}", pair.description)),
        }
    }
    check(format!("quotients are cokernels (seed {seed})"), failures, count, "pairs")
}

/// Whether the component classes form a basis of K₀.
fn free_on_components(d: &DSet, lam: &kzero::Lambda) -> bool {
    let pres = presentation(d, None).expect("effective bound");
    let mut m = IntMatrix::zeros(lam.representatives.len(), pres.generators.len());
    for (c, &v) in lam.representatives.iter().enumerate() {
        let j = pres.generator_index(&lam.components.vertices[v]).expect("η-dendrex");
        m.set(c, j, BigInt::one());
    }
    GroupHom::new(FgAbelianGroup::free(m.rows()), lam.group.clone(), m).is_ok_and(|h| h.is_isomorphism())
}

pub fn i_shriek_free_on_components(seed: u64, count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..count {
        let x = SimplicialSetFin::random(&mut rng, 8);
        let d = dset::i_shriek(&x);
        let lam = kzero::lambda(&d).expect("effective bound");
        if !(lam.group.is_free() && lam.group.rank() == x.components() && free_on_components(&d, &lam)) {
            failures.push(format!("{} vertices, {}", x.num_vertices(), lam.group.render()));
        }
    }
    check(
        format!("K0 of a simplicial set is free on its components (seed {seed})"),
        failures,
        count,
        "simplicial sets",
    )
}

pub fn nerves_complete_pi0(max_order: usize) -> Check {
    let corpus = smc::groupoid_corpus(max_order);
    let failures = corpus
        .iter()
        .filter(|(_, p)| {
            let n = dset::nerve(p);
            !kzero::classical_comparison(p, &n).is_ok_and(|h| h.is_isomorphism())
        })
        .map(|(name, _)| name.clone())
        .collect();
    check(
        format!("K0 of a nerve is the group completion of pi0 (monoids of order at most {max_order})"),
        failures,
        corpus.len(),
        "groupoids",
    )
}

pub fn lambda_and_kan(max_order: usize, max_vertices: usize, max_arity: usize) -> Check {
    let corpus = smc::groupoid_corpus(max_order);
    let mut failures = Vec::new();
    let mut non_injective = 0;
    let mut kan_count = 0;
    for (name, p) in &corpus {
        let n = dset::nerve(p);
        let lam = kzero::lambda(&n).expect("effective bound");
        if kan::check_fully_kan(&n, max_vertices, max_arity).passed {
            kan_count += 1;
            if !lam.is_bijective() {
                failures.push(format!("{name}: fully Kan but lambda is not bijective"));
            }
        } else if !lam.injective {
            non_injective += 1;
        }
    }
    if non_injective == 0 {
        failures.push("no nerve that fails to be fully Kan has a non-injective lambda".into());
    }
    let mut c = check(
        format!("lambda is bijective for fully Kan nerves (order at most {max_order})"),
        failures,
        corpus.len(),
        "groupoids",
    );
    if c.passed {
        c.detail = format!("{} groupoids, {kan_count} fully Kan, {non_injective} with non-injective lambda", corpus.len());
    }
    c
}

pub fn segal_cores(max_edges: usize) -> Check {
    let trees = enumerate_trees_by_edges(max_edges);
    let failures = trees
        .iter()
        .map(|t| Arc::new(t.clone()))
        .filter(|t| {
            let core = dset::segal_core(t);
            let g = kzero::k0(&core.as_dset());
            let iso = kzero::induced(&core.inclusion()).is_ok_and(|h| h.is_isomorphism());
            !(iso && g.is_free() && g.rank() == t.leaves().len())
        })
        .map(|t| t.to_string())
        .collect();
    check(
        format!("Segal cores have the K0 of their tree (at most {max_edges} edges)"),
        failures,
        trees.len(),
        "trees",
    )
}

pub fn horn_attachments(seed: u64, count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..count {
        let a = random_attachment(&mut rng);
        if !kzero::induced(&a.inclusion).is_ok_and(|h| h.is_isomorphism()) {
            failures.push(a.description);
        }
    }
    check(
        format!("attaching along horns leaves K0 unchanged (seed {seed})"),
        failures,
        count,
        "attachments",
    )
}

pub fn kan_suite(seed: u64, max_vertices: usize, max_arity: usize) -> Vec<Check> {
    let corpus = smc::groupoid_corpus(5);
    let mut not_inner = Vec::new();
    let mut mismatched = Vec::new();
    for (name, p) in &corpus {
        let n = dset::nerve(p);
        if !kan::check_inner_kan(&n, max_vertices, max_arity).passed {
            not_inner.push(name.clone());
        }
        if kan::check_fully_kan(&n, max_vertices, max_arity).passed != p.is_picard() {
            mismatched.push(name.clone());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kan_shriek = Vec::new();
    let samples = 20;
    for _ in 0..samples {
        let x = SimplicialSetFin::random(&mut rng, 8);
        if kan::check_fully_kan(&dset::i_shriek(&x), max_vertices, max_arity).passed {
            kan_shriek.push(format!("{} vertices", x.num_vertices()));
        }
    }
    let bounds = format!("{max_vertices} vertices, arity {max_arity}");
    vec![
        check(format!("nerves are inner Kan ({bounds})"), not_inner, corpus.len(), "groupoids"),
        check(
            format!("nonempty simplicial sets are never fully Kan as dendroidal sets (seed {seed})"),
            kan_shriek,
            samples,
            "simplicial sets",
        ),
        check(format!("a nerve is fully Kan exactly when Picard ({bounds})"), mismatched, corpus.len(), "groupoids"),
    ]
}

/// A small random dendroidal set with a description.
pub struct Sample {
    pub dset: DSet,
    pub description: String,
}

fn small_groupoids() -> Vec<(String, PermutativeGroupoid)> {
    smc::groupoid_corpus(3)
}

fn random_tree<R: Rng>(rng: &mut R, max_vertices: usize, max_arity: usize) -> Arc<Tree> {
    let trees = enumerate_trees(max_vertices, max_arity);
    Arc::new(trees.choose(rng).expect("nonempty enumeration").clone())
}

/// One of: a nerve of a small corpus groupoid, a random simplicial set, a
/// representable, or a disjoint union of two of these.
pub fn random_dset<R: Rng>(rng: &mut R) -> Sample {
    match rng.gen_range(0..4) {
        0 => {
            let gs = small_groupoids();
            let (name, p) = gs.choose(rng).expect("nonempty corpus");
            Sample {
                dset: dset::nerve(p),
                description: format!("nerve({name})"),
            }
        }
        1 => {
            let x = SimplicialSetFin::random(rng, 4);
            Sample {
                description: format!("simplicial({} vertices, {} edges)", x.num_vertices(), x.edges().len()),
                dset: dset::i_shriek(&x),
            }
        }
        2 => {
            let t = random_tree(rng, 2, 2);
            Sample {
                description: format!("repr({t})"),
                dset: dset::representable(&t),
            }
        }
        _ => {
            let a = random_dset_leaf(rng);
            let b = random_dset_leaf(rng);
            Sample {
                description: format!("union({}, {})", a.description, b.description),
                dset: dset::disjoint_union(vec![a.dset, b.dset]).0,
            }
        }
    }
}

fn random_dset_leaf<R: Rng>(rng: &mut R) -> Sample {
    loop {
        let s = random_dset(rng);
        if !s.description.starts_with("union") {
            return s;
        }
    }
}

pub struct Attachment {
    pub base: DSet,
    pub tree: Arc<Tree>,
    pub label: FaceLabel,
    pub attaching: DendMap,
    pub pushout: DSet,
    pub inclusion: DendMap,
    pub description: String,
}

/// A random horn of a tree with at most three vertices, attached to a random
/// dendroidal set along a uniformly chosen horn map.
pub fn random_attachment<R: Rng>(rng: &mut R) -> Attachment {
    loop {
        let base = random_dset(rng);
        let t = random_tree(rng, 3, 3);
        let labels = omega::horn_labels(&t);
        let Some(&a) = labels.choose(rng) else { continue };
        let problem = HornProblem::new(&base.dset, &t, a).expect("listed label");
        let maps = problem.horn_maps();
        let Some(h) = maps.choose(rng) else { continue };
        let attaching = h.extend(&base.dset);
        let (pushout, inclusion) =
            dset::attach_cell(&base.dset, &t, a, &attaching).expect("enumerated horn maps are natural");
        return Attachment {
            description: format!("{} along horn({t}, {})", base.description, a.render(&t)),
            base: base.dset,
            tree: t,
            label: a,
            attaching,
            pushout,
            inclusion,
        };
    }
}

/// A dendroidal set with a subobject, both given as disjoint unions so the
/// inclusion is the identity on tokens.
pub struct Pair {
    pub d: DSet,
    pub d0: DSet,
    pub description: String,
}

pub fn random_pair<R: Rng>(rng: &mut R) -> Pair {
    let parts = rng.gen_range(1..=2);
    let mut big = Vec::new();
    let mut small = Vec::new();
    let mut desc = Vec::new();
    for _ in 0..parts {
        match rng.gen_range(0..3) {
            0 => {
                let t = random_tree(rng, 3, 2);
                let (sub, name): (DSet, String) = match rng.gen_range(0..5) {
                    0 => (dset::representable(&t), format!("repr({t})")),
                    1 => (dset::boundary(&t).as_dset(), format!("boundary({t})")),
                    2 => (dset::segal_core(&t).as_dset(), format!("core({t})")),
                    3 => {
                        let labels = omega::horn_labels(&t);
                        let a = *labels.choose(rng).expect("trees with vertices have horns");
                        (dset::horn(&t, a).expect("label").as_dset(), format!("horn({t}, {})", a.render(&t)))
                    }
                    _ => (dset::empty(), "empty".into()),
                };
                big.push(dset::representable(&t));
                small.push(sub);
                desc.push(format!("repr({t}) / {name}"));
            }
            1 => {
                let gs = small_groupoids();
                let (name, p) = gs.choose(rng).expect("nonempty corpus");
                let n = dset::nerve(p);
                let whole = rng.gen_bool(0.5);
                small.push(if whole { n.clone() } else { dset::empty() });
                big.push(n);
                desc.push(format!("nerve({name}) / {}", if whole { "itself" } else { "empty" }));
            }
            _ => {
                let x = SimplicialSetFin::random(rng, 5);
                let d = dset::i_shriek(&x);
                let whole = rng.gen_bool(0.5);
                small.push(if whole { d.clone() } else { dset::empty() });
                big.push(d);
                desc.push(format!(
                    "simplicial({} vertices) / {}",
                    x.num_vertices(),
                    if whole { "itself" } else { "empty" }
                ));
            }
        }
    }
    Pair {
        d: dset::disjoint_union(big).0,
        d0: dset::disjoint_union(small).0,
        description: desc.join(" + "),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        assert!(representables_free_on_leaves(4).passed);
        assert!(face_maps_send_leaves_over(3).passed);
        assert!(grafted_horn_tables().passed);
        assert!(horn_inclusions_iso(2, 2).passed);
        assert!(segal_cores(4).passed);
        assert!(quotients_are_cokernels(1, 5).passed);
        assert!(horn_attachments(1, 5).passed);
        assert!(i_shriek_free_on_components(1, 5).passed);
        assert!(nerves_complete_pi0(3).passed);
        assert!(lambda_and_kan(2, 2, 2).passed);
    }

    #[test]
    fn table_for_c22() {
        let rows = grafted_horn_relations(2, 2);
        assert_eq!(rows[0].1[0], (vec!["a1".to_string(), "a2".to_string()], vec!["b2".to_string()]));
        assert_eq!(rows[2].1[1].0, vec!["b1", "a1", "a2"]);
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", &VerifyOptions::default()).is_none());
    }
}
