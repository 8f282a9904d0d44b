//! K0 of representables, horns and grafted corolla horns, with relations.
//!
//!     cargo run --example k0_of_horns

use dendroid::dset;
use dendroid::expr::parse_tree;
use dendroid::kzero::{self, presentation};
use dendroid::omega;

fn main() {
    let t = parse_tree("e[c[a,b],d]").expect("valid tree").tree;
    println!("K0(repr {t}) = {}", kzero::k0(&dset::representable(&t)));
    for a in omega::horn_labels(&t) {
        let h = dset::horn(&t, a).expect("listed label");
        let iso = kzero::induced(&h.inclusion()).expect("bounded").is_isomorphism();
        println!("  horn at {:3}: K0 = {}, inclusion iso: {iso}", a.render(&t), kzero::k0(&h.as_dset()));
    }

    let arg = parse_tree("C(2,2)").expect("shorthand");
    for alias in ["bk", "v", "w"] {
        let a = arg.label(alias, 0).expect("alias");
        let p = presentation(&dset::horn(&arg.tree, a).expect("label").as_dset(), None).expect("bound");
        println!("horn(C(2,2), {alias}): K0 = {}", p.group());
        let mut rows: Vec<String> = p.rows.iter().filter(|r| r.arity > 1).map(|r| p.render_row(r)).collect();
        rows.dedup();
        for row in rows {
            println!("    {row}");
        }
    }
}
