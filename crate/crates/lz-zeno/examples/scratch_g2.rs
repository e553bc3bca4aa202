use std::time::Instant;

use lz_zeno::adiabatic::{analytic_seed, refine_de};
use lz_zeno::lz_core::Coupling;
use lz_zeno::methods::evolution_table_for;

fn main() {
    for (g, n, dp) in [
        (1.0, 10usize, 0.731103),
        (2.0, 10, 0.800886),
        (5.0, 10, 0.815437),
        (5.0, 9, 0.799226),
        (2.0, 5, 0.705847),
    ] {
        let c = Coupling::new(g).unwrap();
        let table = evolution_table_for(&c, n).unwrap();
        let seed = analytic_seed(&c, n).unwrap();
        for rng in [1u64, 7, 16, 42, 20240613] {
            let t0 = Instant::now();
            let res = refine_de(&table, &seed, rng).unwrap();
            println!(
                "g={g} n={n} rng={rng}: P={:.6} diff={:+.5} dt={:?}",
                res.probability,
                res.probability - dp,
                t0.elapsed()
            );
        }
    }
}
