use lz_zeno::adiabatic::analytic_seed;
use lz_zeno::lz_core::Coupling;
use lz_zeno::methods::evolution_table_for;
use lz_zeno::objective::ScheduleEvaluator;
use lz_zeno::adiabatic::envelope_max;

fn omega(x: f64) -> f64 {
    x.asinh() + x * (1.0 + x * x).sqrt()
}
fn omega_inv(w: f64) -> f64 {
    // Newton on omega(x) = w; omega' = 2 sqrt(1+x^2)
    let mut x = w / 2.0;
    for _ in 0..60 {
        let f = omega(x) - w;
        let d = 2.0 * (1.0 + x * x).sqrt();
        let dx = f / d;
        x -= dx;
        if dx.abs() < 1e-14 {
            break;
        }
    }
    x
}

fn phase_aligned(gamma: f64, seed: &[f64]) -> Vec<f64> {
    let scale = 2.0 * gamma.sqrt();
    let mut out = vec![seed[0]];
    for l in 1..seed.len() {
        let w_prev = omega(out[l - 1] / scale);
        let w_seed = omega(seed[l] / scale);
        let dw = w_seed - w_prev;
        let k = (gamma * dw / (2.0 * std::f64::consts::PI)).round();
        let dw_snap = 2.0 * std::f64::consts::PI * k / gamma;
        let x = omega_inv(w_prev + dw_snap);
        out.push((scale * x).max(out[l - 1]));
    }
    out
}

fn chain_from(gamma: f64, t1: f64, seed: &[f64]) -> Vec<f64> {
    let scale = 2.0 * gamma.sqrt();
    let mut out = vec![t1];
    for l in 1..seed.len() {
        let w_prev = omega(out[l - 1] / scale);
        let dw = omega(seed[l] / scale) - w_prev;
        let k = (gamma * dw / (2.0 * std::f64::consts::PI)).round().max(0.0);
        let dw_snap = 2.0 * std::f64::consts::PI * k / gamma;
        let x = omega_inv(w_prev + dw_snap);
        out.push((scale * x).max(out[l - 1]));
    }
    out
}

fn main() {
    let g = 5.0;
    let c = Coupling::new(g).unwrap();
    for n in [5usize, 7, 8, 9, 10, 12, 15] {
        let seed = analytic_seed(&c, n).unwrap();
        let table = evolution_table_for(&c, n).unwrap();
        let eval = ScheduleEvaluator::new(&table);
        let s0 = seed.schedule.instants();
        let r1 = seed.radii[0];
        let mut best = (f64::NEG_INFINITY, vec![]);
        let m = 240;
        for i in 0..=m {
            let t1 = s0[0] - r1 + 2.0 * r1 * i as f64 / m as f64;
            let cand = chain_from(g, t1, s0);
            let p = eval.probability(&cand);
            if p > best.0 {
                best = (p, cand);
            }
        }
        let refined = lz_zeno::antiadiabatic::refine(
            &best.1,
            lz_zeno::antiadiabatic::RefineKind::Exact(&table),
        );
        println!(
            "n={n}: P(scan)={:.6} P(scan+polish)={:.6} env={:.6} gap={:+.5}",
            best.0,
            refined.value,
            envelope_max(n),
            envelope_max(n) - refined.value
        );
    }
}
