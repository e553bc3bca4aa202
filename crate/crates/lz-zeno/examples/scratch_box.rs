use lz_zeno::adiabatic::analytic_seed;
use lz_zeno::dp_exact::{build_tables, optimize_from_table, GridSpec};
use lz_zeno::lz_core::Coupling;

fn main() {
    let grid = GridSpec::default_range();
    for &g in &[1.0f64, 2.0] {
        let c = Coupling::new(g).unwrap();
        let table = build_tables(&c, 10, &grid).unwrap();
        let dp = optimize_from_table(&table, 10).unwrap();
        let seed = analytic_seed(&c, 10).unwrap();
        println!("g={g}");
        println!("  dp   : {:?}", dp.schedule.instants().iter().map(|t| (t*100.0).round()/100.0).collect::<Vec<_>>());
        println!("  seed : {:?}", seed.schedule.instants().iter().map(|t| (t*100.0).round()/100.0).collect::<Vec<_>>());
        println!("  radii: {:?}", seed.radii.iter().map(|t| (t*100.0).round()/100.0).collect::<Vec<_>>());
    }
}
