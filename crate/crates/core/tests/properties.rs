mod common;

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dendroid::dset::{self, DSet, DendMap};
use dendroid::intlin::{smith_normal_form, GroupHom, IntMatrix};
use dendroid::kan::{self, HornProblem};
use dendroid::kzero::{self, presentation};
use dendroid::omega::{self, compose, validate_map, OmegaMap};
use dendroid::smc::{self, PermutativeGroupoid};
use dendroid::tree::{are_isomorphic, enumerate_trees_by_edges, Tree, TreeParts, Vertex};
use dendroid::verify::random_dset;

fn trees() -> &'static [Arc<Tree>] {
    static TREES: OnceLock<Vec<Arc<Tree>>> = OnceLock::new();
    TREES.get_or_init(|| enumerate_trees_by_edges(5).into_iter().map(Arc::new).collect())
}

fn small_trees() -> &'static [Arc<Tree>] {
    static TREES: OnceLock<Vec<Arc<Tree>>> = OnceLock::new();
    TREES.get_or_init(|| enumerate_trees_by_edges(3).into_iter().map(Arc::new).collect())
}

fn corpus() -> &'static [(String, PermutativeGroupoid)] {
    static CORPUS: OnceLock<Vec<(String, PermutativeGroupoid)>> = OnceLock::new();
    CORPUS.get_or_init(|| smc::groupoid_corpus(3))
}

fn tree() -> impl Strategy<Value = Arc<Tree>> {
    (0..trees().len()).prop_map(|i| trees()[i].clone())
}

fn small_tree() -> impl Strategy<Value = Arc<Tree>> {
    (0..small_trees().len()).prop_map(|i| small_trees()[i].clone())
}

/// The same tree with edge ids shuffled by `perm`.
fn relabel(t: &Tree, perm: &[usize]) -> Tree {
    let parts = t.parts();
    let mut names = vec![String::new(); parts.names.len()];
    for (e, name) in parts.names.into_iter().enumerate() {
        names[perm[e]] = name;
    }
    let vertices = parts
        .vertices
        .iter()
        .rev()
        .map(|v| Vertex {
            output: perm[v.output],
            inputs: v.inputs.iter().map(|&i| perm[i]).collect(),
        })
        .collect();
    Tree::from_parts(TreeParts {
        names,
        root: perm[parts.root],
        vertices,
    })
    .expect("relabelling keeps a tree valid")
}

fn nerve_at(i: usize) -> DSet {
    dset::nerve(&corpus()[i % corpus().len()].1)
}

/// Whether two homomorphisms with the same source and target agree.
fn same_hom(f: &GroupHom, g: &GroupHom) -> bool {
    (0..f.matrix().rows()).all(|i| {
        let diff: Vec<BigInt> = f.matrix().row(i).iter().zip(g.matrix().row(i)).map(|(a, b)| a - b).collect();
        f.target().is_zero_element(&diff)
    })
}

#[test]
fn oracle_sanity() {
    assert_eq!(common::union_find_components(4, &[(0, 1), (2, 3), (1, 0)]), 2);
    assert_eq!(common::minors_gcd_invariants(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
    assert_eq!(common::minors_gcd_invariants(&[vec![0, 0]]), Vec::<i128>::new());
    // Z/2 under addition completes to Z/2
    assert_eq!(common::grothendieck_pairs_torsion_profile(&[vec![0, 1], vec![1, 0]], 0, 2), vec![1, 2]);
    // ({0,1}, max) completes to 0
    assert_eq!(common::grothendieck_pairs_torsion_profile(&[vec![0, 1], vec![1, 1]], 0, 2), vec![1, 1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_code_ignores_edge_ids(t in tree(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..t.num_edges()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let s = relabel(&t, &perm);
        prop_assert_eq!(s.canonical_code(), t.canonical_code());
        prop_assert!(are_isomorphic(&s, &t));
        let back = Tree::from_code(&t.canonical_code()).expect("valid code");
        prop_assert!(are_isomorphic(&back, &t));
    }

    #[test]
    fn print_parse_round_trip(t in tree()) {
        let parsed: Tree = t.to_string().parse().expect("printed trees parse");
        prop_assert_eq!(parsed.to_string(), t.to_string());
        prop_assert!(are_isomorphic(&parsed, &t));
        prop_assert_eq!(parsed.names().len(), t.num_edges());
    }

    #[test]
    fn hom_matches_validation(s in small_tree(), t in small_tree()) {
        let maps = omega::hom(&s, &t);
        for m in &maps {
            prop_assert!(validate_map(&s, &t, m.edges()).is_ok());
        }
        let brute = common::brute_force_hom(&s, &t, |e| common::naive_valid(&s, &t, e));
        prop_assert_eq!(maps.len(), brute.len());
    }

    #[test]
    fn composition_is_closed_and_associative(
        r in small_tree(), s in small_tree(), t in small_tree(), u in tree(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 3),
    ) {
        let pick = |v: Vec<OmegaMap>, i: &prop::sample::Index| (!v.is_empty()).then(|| v[i.index(v.len())].clone());
        let (Some(f), Some(g), Some(h)) = (
            pick(omega::hom(&r, &s), &picks[0]),
            pick(omega::hom(&s, &t), &picks[1]),
            pick(omega::hom(&t, &u), &picks[2]),
        ) else {
            return Ok(());
        };
        let gf = compose(&g, &f).expect("composable");
        prop_assert!(validate_map(&r, &t, gf.edges()).is_ok());
        let left = compose(&h, &gf).expect("composable");
        let right = compose(&compose(&h, &g).expect("composable"), &f).expect("composable");
        prop_assert_eq!(left.edges(), right.edges());
        let idf = compose(&OmegaMap::identity(&s), &f).expect("composable");
        prop_assert_eq!(idf.edges(), f.edges());
    }

    #[test]
    fn faces_are_injective_and_distinct(t in tree()) {
        let faces = omega::faces(&t);
        let mut images: Vec<_> = faces.iter().map(|f| f.map.subobject_key()).collect();
        for f in &faces {
            prop_assert!(f.map.is_injective());
            prop_assert_eq!(f.map.source().num_vertices() + 1, t.num_vertices());
        }
        images.sort();
        images.dedup();
        prop_assert_eq!(images.len(), faces.len());
    }

    #[test]
    fn smith_form_factors_the_matrix(
        m in (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
    ) {
        let cols = m[0].len();
        let a = IntMatrix::from_rows(cols, &m);
        let snf = smith_normal_form(&a);
        let prod = snf.u.mul(&a).and_then(|x| x.mul(&snf.v)).expect("shapes agree");
        prop_assert_eq!(prod.row_vecs(), snf.d.row_vecs());
        for w in snf.diagonal.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        prop_assert!(snf.diagonal.iter().all(|x| x.is_positive()));
        prop_assert_eq!(snf.u.determinant().map(|d| d.abs()), Some(BigInt::one()));
        prop_assert_eq!(snf.v.determinant().map(|d| d.abs()), Some(BigInt::one()));
        let expected: Vec<BigInt> = common::minors_gcd_invariants(&m).into_iter().map(BigInt::from).collect();
        prop_assert_eq!(&snf.diagonal, &expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn presheaf_laws_hold(seed in any::<u64>()) {
        let sample = random_dset(&mut ChaCha8Rng::seed_from_u64(seed));
        let d = &sample.dset;
        let shapes = dset::shape_window(3);
        for t in &shapes {
            let xs = d.dendrices(t);
            prop_assert_eq!(&d.act_all(&OmegaMap::identity(t), &xs), &xs, "{}", sample.description);
            for s in &shapes {
                for g in omega::hom(s, t) {
                    let gx = d.act_all(&g, &xs);
                    for x in &gx {
                        prop_assert!(d.contains(s, x));
                    }
                    for r in &shapes {
                        for f in omega::hom(r, s) {
                            let gf = compose(&g, &f).expect("composable");
                            prop_assert_eq!(d.act_all(&f, &gx), d.act_all(&gf, &xs));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fillers_restrict_to_their_horns(i in 0usize..64, t in 0usize..64, pick in any::<prop::sample::Index>()) {
        let d = nerve_at(i);
        let trees = kan::kan_trees(2, 2);
        let t = &trees[t % trees.len()];
        let labels = omega::horn_labels(t);
        let a = labels[pick.index(labels.len())];
        let problem = HornProblem::new(&d, t, a).expect("listed label");
        let generators = problem.horn().generators().to_vec();
        for h in problem.horn_maps() {
            if let Some(x) = problem.filler(&h) {
                for (g, v) in generators.iter().zip(&h.values) {
                    prop_assert_eq!(&d.act(g, &x), v);
                }
                prop_assert!(h.check_naturality(&d).is_ok());
            }
            prop_assert_eq!(problem.filler(&h).is_some(), kan::has_filler(&d, &h).is_some());
        }
    }

    #[test]
    fn fully_kan_implies_inner_kan(seed in any::<u64>()) {
        let sample = random_dset(&mut ChaCha8Rng::seed_from_u64(seed));
        let full = kan::check_fully_kan(&sample.dset, 2, 2);
        let inner = kan::check_inner_kan(&sample.dset, 2, 2);
        prop_assert!(!full.passed || inner.passed, "{}", sample.description);
    }

    #[test]
    fn induced_maps_compose(t in small_tree(), pick in any::<prop::sample::Index>()) {
        let labels = omega::horn_labels(&t);
        prop_assume!(!labels.is_empty());
        let a = labels[pick.index(labels.len())];
        let horn = dset::horn(&t, a).expect("listed label");
        let boundary = dset::boundary(&t);
        let (h, b) = (horn.as_dset(), boundary.as_dset());
        let first = DendMap::token_inclusion(&h, &b);
        let second = boundary.inclusion();
        let whole = first.then(&second);
        let k_first = kzero::induced(&first).expect("bounded");
        let k_second = kzero::induced(&second).expect("bounded");
        let composite = k_first.then(&k_second).expect("matching groups");
        prop_assert!(same_hom(&composite, &kzero::induced(&whole).expect("bounded")));
        let id = kzero::induced(&DendMap::identity(&b)).expect("bounded");
        prop_assert!(same_hom(&id, &GroupHom::new(id.source().clone(), id.source().clone(), IntMatrix::identity(id.source().generators())).expect("identity")));
    }

    #[test]
    fn nerve_presentation_is_stable_in_the_bound(i in 0usize..64) {
        let d = nerve_at(i);
        let required = d.effective_arity_bound();
        let at = presentation(&d, Some(required)).expect("enough").group();
        let past = presentation(&d, Some(required.max(2) + 1)).expect("enough").group();
        prop_assert!(at.same_type(&past));
        if required > 0 {
            prop_assert!(presentation(&d, Some(required - 1)).is_err());
        }
    }
}
