use lz_zeno::adiabatic::{analytic_seed, envelope_max, refine_de};
use lz_zeno::lz_core::Coupling;
use lz_zeno::methods::evolution_table_for;

fn main() {
    let c = Coupling::new(5.0).unwrap();
    for n in [6usize, 9] {
        let table = evolution_table_for(&c, n).unwrap();
        let seed = analytic_seed(&c, n).unwrap();
        for rng in [1u64, 7, 16, 42, 20240613] {
            let res = refine_de(&table, &seed, rng).unwrap();
            println!(
                "n={n} rng={rng}: P={:.6} gap={:+.5}",
                res.probability,
                envelope_max(n) - res.probability
            );
        }
    }
}
