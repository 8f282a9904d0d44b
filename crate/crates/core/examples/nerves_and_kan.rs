//! Nerves of permutative groupoids: K0 against the group completion of
//! pi0, the map lambda, and the Kan conditions.
//!
//!     cargo run --release --example nerves_and_kan

use dendroid::dset;
use dendroid::kan;
use dendroid::kzero;
use dendroid::smc::{CommutativeMonoid, PermutativeGroupoid};

fn main() {
    let max = CommutativeMonoid::new(vec![vec![0, 1], vec![1, 1]], 0).expect("max monoid");
    let samples = [
        ("Z/3", PermutativeGroupoid::from_abelian_group(&CommutativeMonoid::cyclic(3)).expect("group")),
        ("({0,1}, max)", PermutativeGroupoid::from_commutative_monoid(&max)),
        ("signed Z/2", PermutativeGroupoid::signed_z2()),
    ];
    for (name, p) in &samples {
        let n = dset::nerve(p);
        let comparison = kzero::classical_comparison(p, &n).expect("bounded");
        let lambda = kzero::lambda(&n).expect("bounded");
        println!("{name}: K0 = {}, comparison iso: {}", comparison.target(), comparison.is_isomorphism());
        println!("  lambda injective {}, surjective {}", lambda.injective, lambda.surjective);
        let inner = kan::check_inner_kan(&n, 2, 3);
        let full = kan::check_fully_kan(&n, 2, 3);
        println!("  inner Kan {}, fully Kan {}, Picard {}", inner.passed, full.passed, p.is_picard());
    }

    let x = dset::SimplicialSetFin::point();
    let report = kan::check_fully_kan(&dset::i_shriek(&x), 2, 3);
    print!("{}", report.render());
}
