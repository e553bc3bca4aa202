use std::time::Instant;

use lz_zeno::dp_exact::{build_tables, optimize_from_table, GridSpec};
use lz_zeno::lz_core::Coupling;
use lz_zeno::methods::{optimize_with_table, evolution_table_for, MethodChoice};

fn main() {
    let grid = GridSpec::default_range();
    for &g in &[0.1, 0.3, 0.5, 1.0, 2.0, 5.0] {
        let c = Coupling::new(g).unwrap();
        let t0 = Instant::now();
        let dp_table = build_tables(&c, 10, &grid).unwrap();
        let asym_table = evolution_table_for(&c, 10).unwrap();
        let build_dt = t0.elapsed();
        for &n in &[2usize, 5, 10] {
            let dp = optimize_from_table(&dp_table, n).unwrap();
            let method =
                if g <= 0.5 { MethodChoice::Antiadiabatic } else { MethodChoice::Adiabatic };
            let fast = optimize_with_table(&asym_table, n, method, 20240613, &grid).unwrap();
            println!(
                "g={g} n={n}: dp={:.6} {}={:.6} diff={:+.5}",
                dp.probability,
                fast.method,
                fast.probability,
                fast.probability - dp.probability
            );
        }
        println!("  (build {build_dt:?})");
    }
}
