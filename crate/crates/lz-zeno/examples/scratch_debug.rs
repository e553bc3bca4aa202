use lz_zeno::dp_exact::{build_tables, GridSpec};
use lz_zeno::lz_core::{population_matrix, Coupling, TimeInstant};

fn main() {
    let c = Coupling::new(1.0).unwrap();
    let vt = build_tables(&c, 5, &GridSpec::default_range()).unwrap();
    // replicate the backtrack manually via the public API
    let res = lz_zeno::dp_exact::optimize_from_table(&vt, 4);
    println!("n=4: {:?}", res.as_ref().map(|r| r.schedule.instants().to_vec()));

    // find what n=5 recovers without the final re-evaluation
    match lz_zeno::dp_exact::optimize_from_table(&vt, 5) {
        Ok(r) => println!("n=5 ok: {:?}", r.schedule.instants()),
        Err(e) => println!("n=5 err: {e}"),
    }

    // probe the suspicious segment types directly
    for (a, b) in [
        (TimeInstant::Finite(50.0), TimeInstant::PosInfinity),
        (TimeInstant::NegInfinity, TimeInstant::Finite(-50.0)),
        (TimeInstant::Finite(41.0), TimeInstant::PosInfinity),
    ] {
        match population_matrix(&c, a, b) {
            Ok(m) => println!("({a}, {b}): stay={:.6}", m.stay()),
            Err(e) => println!("({a}, {b}): ERR {e}"),
        }
    }
}
