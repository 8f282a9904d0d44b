//! Attaching a cell along a horn and collapsing a subobject.
//!
//!     cargo run --example attach_and_quotient

use std::sync::Arc;

use dendroid::dset::{self, DendMap};
use dendroid::kan;
use dendroid::kzero;
use dendroid::omega::FaceLabel;
use dendroid::smc::{CommutativeMonoid, PermutativeGroupoid};
use dendroid::tree::Tree;

fn main() {
    // attach 2-corollas to the nerve of Z/3 along horns at the root
    let z3 = PermutativeGroupoid::from_abelian_group(&CommutativeMonoid::cyclic(3)).expect("group");
    let base = dset::nerve(&z3);
    let t = Arc::new(Tree::corolla(2));
    let root = FaceLabel::parse(&t, "b").expect("root label");
    let maps = kan::horn_maps(&base, &t, root).expect("label");
    println!("{} horn maps into the nerve", maps.len());
    for h in maps.iter().take(3) {
        let (pushout, inclusion) = dset::attach_cell(&base, &t, root, &h.extend(&base)).expect("natural");
        let iso = kzero::induced(&inclusion).expect("bounded").is_isomorphism();
        let values: Vec<String> = h.values.iter().map(|x| x.to_string()).collect();
        println!("  along ({}): K0 {} -> {}, iso {iso}", values.join(", "), kzero::k0(&base), kzero::k0(&pushout));
    }

    // Omega[T] / boundary, and Omega[T] / horn
    let t = Arc::new("e[c[a,b],d]".parse::<Tree>().expect("valid tree"));
    let repr = dset::representable(&t);
    for (name, sub) in [
        ("boundary", dset::boundary(&t).as_dset()),
        ("horn at c", dset::horn(&t, FaceLabel::Inner(t.edge_by_name("c").expect("edge"))).expect("label").as_dset()),
    ] {
        let (q, _) = dset::quotient(&DendMap::token_inclusion(&sub, &repr)).expect("subobject");
        println!("K0(repr / {name}) = {}", kzero::k0(&q));
    }
}
