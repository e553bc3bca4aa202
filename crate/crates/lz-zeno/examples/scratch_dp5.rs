use std::time::Instant;

use lz_zeno::adiabatic::envelope_max;
use lz_zeno::dp_exact::{build_tables, optimize_from_table, GridSpec};
use lz_zeno::lz_core::Coupling;

fn main() {
    let c = Coupling::new(5.0).unwrap();
    let t0 = Instant::now();
    let table = build_tables(&c, 10, &GridSpec::default_range()).unwrap();
    println!("dp build n=10 gamma=5: {:?}", t0.elapsed());
    for n in 1..=10 {
        let res = optimize_from_table(&table, n).unwrap();
        println!(
            "n={n}: P={:.6} env={:.6} gap={:+.5} sched={:?}",
            res.probability,
            envelope_max(n),
            envelope_max(n) - res.probability,
            res.schedule
                .instants()
                .iter()
                .map(|t| (t * 100.0).round() / 100.0)
                .collect::<Vec<_>>()
        );
    }
}
