use std::time::Instant;

use lz_zeno::adiabatic::{analytic_seed, refine_de_with, DeSettings};
use lz_zeno::lz_core::Coupling;
use lz_zeno::methods::evolution_table_for;

fn main() {
    for (g, dp_value) in [(1.0, 0.731103), (2.0, 0.800886), (5.0, 0.815437)] {
        let c = Coupling::new(g).unwrap();
        let table = evolution_table_for(&c, 10).unwrap();
        let seed = analytic_seed(&c, 10).unwrap();
        for (pf, gens) in [(15, 200), (15, 600), (20, 1000), (30, 1500)] {
            let t0 = Instant::now();
            let settings = DeSettings {
                population_factor: pf,
                generations: gens,
                ..DeSettings::default()
            };
            let res = refine_de_with(&table, &seed, 20240613, settings).unwrap();
            println!(
                "g={g} pf={pf} gens={gens}: P={:.6} vs dp {:.6} diff={:+.5} dt={:?}",
                res.probability,
                dp_value,
                res.probability - dp_value,
                t0.elapsed()
            );
        }
    }
}
