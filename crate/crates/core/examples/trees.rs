//! Trees, their faces and the maps between them.
//!
//!     cargo run --example trees

use std::sync::Arc;

use dendroid::omega;
use dendroid::tree::{enumerate_trees, graft, Tree};

fn main() {
    let t: Arc<Tree> = Arc::new("e[c[a,b],d]".parse().expect("valid tree"));
    println!("tree {t}: {} edges, leaves {:?}", t.num_edges(), t.leaves().iter().map(|&l| t.name(l)).collect::<Vec<_>>());

    for f in omega::faces(&t) {
        let kind = if f.label.is_inner() { "inner" } else { "outer" };
        println!("  {kind:5} face {:3} {}", f.label.render(&t), f.map);
    }

    let eta = Arc::new(Tree::eta());
    let c3 = Arc::new(Tree::corolla(3));
    println!("|hom(eta, T)| = {}", omega::hom(&eta, &t).len());
    println!("|hom(C3, T)| = {}", omega::hom(&c3, &t).len());

    // graft a binary corolla onto leaf d
    let upper: Tree = "d[x,y]".parse().expect("valid tree");
    let d = t.edge_by_name("d").expect("leaf d");
    let grafted = graft(&t, d, &upper).expect("names are disjoint");
    println!("grafted: {grafted}");

    for v in 1..=3 {
        println!("trees with at most {v} vertices of arity at most 3: {}", enumerate_trees(v, 3).len());
    }
}
