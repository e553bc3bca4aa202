use std::time::Instant;

use lz_zeno::adiabatic::{analytic_seed, envelope_max, refine_de};
use lz_zeno::dp_exact::{build_tables, optimize_from_table, GridSpec};
use lz_zeno::lz_core::{Coupling, EvolutionTable};
use lz_zeno::methods::evolution_table_for;
use lz_zeno::objective::transition_probability;

fn main() {
    // 1. LZ oracle timing
    for g in [0.1, 1.0, 5.0] {
        let c = Coupling::new(g).unwrap();
        let t0 = Instant::now();
        let s = lz_zeno::objective::MeasurementSchedule::new(c, vec![]).unwrap();
        let p = transition_probability(&s).unwrap();
        println!(
            "lz g={g}: P={p:.6e} exact={:.6e} dt={:?}",
            (-2.0 * std::f64::consts::PI * g).exp(),
            t0.elapsed()
        );
    }

    // 2. Evolution table build timing at the paper grid extent
    let c = Coupling::new(1.0).unwrap();
    let t0 = Instant::now();
    let table = EvolutionTable::build(&c, 50.0, 0.01).unwrap();
    println!("table g=1 extent=50: {:?}, lz_stay={:.6e}", t0.elapsed(), table.lz_stay());

    // 3. DP build at paper grid, n=3
    let t0 = Instant::now();
    let vt = build_tables(&c, 3, &GridSpec::default_range()).unwrap();
    println!("dp build n=3 grid [-50,50]: {:?}", t0.elapsed());
    for n in 1..=3 {
        let t1 = Instant::now();
        let res = optimize_from_table(&vt, n).unwrap();
        println!(
            "  dp n={n}: P={:.6} model={:.6} sched={:?} dt={:?}",
            res.probability,
            res.diagnostics.model_value.unwrap(),
            res.schedule.instants(),
            t1.elapsed()
        );
    }

    // 4. DE at gamma=5, n=3
    let c5 = Coupling::new(5.0).unwrap();
    let t0 = Instant::now();
    let tbl5 = evolution_table_for(&c5, 3).unwrap();
    println!("table g=5: {:?} (extent {})", t0.elapsed(), tbl5.extent());
    let t0 = Instant::now();
    let seed = analytic_seed(&c5, 3).unwrap();
    let res = refine_de(&tbl5, &seed, 42).unwrap();
    println!(
        "de g=5 n=3: P={:.6} envelope={:.6} sched={:?} dt={:?}",
        res.probability,
        envelope_max(3),
        res.schedule.instants(),
        t0.elapsed()
    );

    // 5. DE at gamma=1, n=5 vs dp
    let t0 = Instant::now();
    let tbl1 = evolution_table_for(&c, 5).unwrap();
    let seed = analytic_seed(&c, 5).unwrap();
    let res = refine_de(&tbl1, &seed, 42).unwrap();
    println!("de g=1 n=5: P={:.6} dt={:?}", res.probability, t0.elapsed());
    let t0 = Instant::now();
    let vt = build_tables(&c, 5, &GridSpec::default_range()).unwrap();
    let dp = optimize_from_table(&vt, 5).unwrap();
    println!(
        "dp g=1 n=5: P={:.6} sched={:?} dt={:?}",
        dp.probability,
        dp.schedule.instants(),
        t0.elapsed()
    );
}
