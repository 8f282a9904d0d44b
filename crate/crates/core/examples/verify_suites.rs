//! Runs the quick verification suites, as `dendroid verify` does.
//!
//!     cargo run --example verify_suites -- [seed]

use dendroid::verify::{run_suite, VerifyOptions};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let opts = VerifyOptions { seed, ..VerifyOptions::default() };
    for name in ["attach", "quotient", "segal-core"] {
        for report in run_suite(name, &opts).expect("known suite") {
            print!("{}", report.render());
        }
    }
}
