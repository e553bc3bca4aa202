use std::time::Instant;

use lz_zeno::adiabatic::{envelope_max, optimize_large_gamma};
use lz_zeno::antiadiabatic::{compare_row, optimize_small_gamma, table1};
use lz_zeno::lz_core::Coupling;
use lz_zeno::methods::{evolution_table_for, optimize, MethodChoice};
use lz_zeno::dp_exact::GridSpec;

fn main() {
    // Table I
    let t0 = Instant::now();
    let rows = table1(15).unwrap();
    println!("table1(15): {:?}", t0.elapsed());
    for row in &rows {
        let cmp = compare_row(&row).unwrap();
        println!(
            "  N={:2} f={:.3} df={:.4} dinst={:.4} mirrored={} sym={}",
            row.n,
            row.f_value,
            cmp.f_deviation,
            cmp.max_instant_deviation,
            cmp.mirrored,
            row.is_symmetric(0.02)
        );
    }

    // criterion 2: single measurement by pipeline methods
    for g in [0.1, 1.0, 5.0] {
        let c = Coupling::new(g).unwrap();
        let t0 = Instant::now();
        let table = evolution_table_for(&c, 1).unwrap();
        let res = if g <= 0.5 {
            optimize_small_gamma(&table, 1).unwrap()
        } else {
            optimize_large_gamma(&table, 1, 20240613).unwrap()
        };
        let expect = 0.5 * (1.0 + (-2.0 * std::f64::consts::PI * g).exp());
        println!(
            "n=1 g={g}: t*={:+.4} P={:.6} expect={:.6} dt={:?}",
            res.schedule.instants()[0],
            res.probability,
            expect,
            t0.elapsed()
        );
    }

    // criterion 5: gamma=5, N=1..10 vs envelope
    let c5 = Coupling::new(5.0).unwrap();
    for n in 1..=10 {
        let t0 = Instant::now();
        let table = evolution_table_for(&c5, n).unwrap();
        let res = optimize_large_gamma(&table, n, 7 + n as u64).unwrap();
        let env = envelope_max(n);
        println!(
            "g=5 n={n}: P={:.6} env={:.6} gap={:+.5} dt={:?}",
            res.probability,
            env,
            env - res.probability,
            t0.elapsed()
        );
    }

    // criterion 6: N=15 sweep over gamma (auto method)
    let grid = GridSpec::default_range();
    for g in [0.2, 0.5, 0.75, 0.9, 1.2, 2.0] {
        let c = Coupling::new(g).unwrap();
        let t0 = Instant::now();
        let res = optimize(&c, 15, MethodChoice::Auto, 99, &grid).unwrap();
        println!(
            "N=15 g={g}: P={:.6} method={} dt={:?}",
            res.probability, res.method, t0.elapsed()
        );
    }
}
