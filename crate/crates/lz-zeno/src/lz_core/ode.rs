//! Embedded Dormand-Prince 5(4) integrator for small complex systems.
//!
//! The propagation problems in this crate are nonstiff and mildly oscillatory
//! (phase ~ t^2/4), so an explicit adaptive pair with a PI step controller is
//! the right tool. States are fixed-size arrays of complex amplitudes.

use num_complex::Complex64;

use crate::error::{LzError, Result};

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;
/// PI controller exponents for a 5th-order pair.
const K_I: f64 = 0.7 / 5.0;
const K_P: f64 = 0.4 / 5.0;
const MAX_STEPS: usize = 20_000_000;

/// Integration tolerances; the defaults match the propagation contract.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12 }
    }
}

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// 5th-order weights (same as the last A row).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Difference between the 5th- and 4th-order weights, for the error estimate.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrate `dy/dt = rhs(t, y)` from `t0` to `t1` (either direction).
///
/// `observe`, when provided, is called after every accepted step with the new
/// `(t, y)`; callers use it together with `stops` to sample the solution on a
/// grid without interpolation. `stops` must be sorted in integration
/// direction; steps are shortened to land exactly on each stop.
pub fn integrate<const N: usize, F>(
    rhs: F,
    t0: f64,
    t1: f64,
    y0: [Complex64; N],
    tol: Tolerances,
    stops: &[f64],
    mut observe: impl FnMut(f64, &[Complex64; N]),
) -> Result<[Complex64; N]>
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    if t0 == t1 {
        return Ok(y0);
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();

    let mut t = t0;
    let mut y = y0;
    let mut k0 = rhs(t, &y);
    let mut stop_iter = stops.iter().copied().filter(|s| (s - t0) * dir > 0.0 && (t1 - s) * dir >= 0.0);
    let mut next_stop = stop_iter.next();

    let mut h = (span * 1e-4).min(0.1).max(1e-10);
    let mut prev_err = 1.0_f64;
    let mut steps = 0usize;

    // The final landing t + (t1 - t) can round one ulp short of t1; a
    // remainder at rounding scale counts as arrival.
    let done_tol = 4.0 * f64::EPSILON * (1.0 + t1.abs());

    loop {
        if (t1 - t) * dir <= done_tol {
            return Ok(y);
        }
        steps += 1;
        if steps > MAX_STEPS {
            return Err(LzError::IntegratorStall { last_step: h });
        }

        let mut h_eff = h.min((t1 - t).abs());
        let mut hit_stop = false;
        if let Some(s) = next_stop {
            let to_stop = (s - t).abs();
            if to_stop <= h_eff * (1.0 + 1e-12) {
                h_eff = to_stop;
                hit_stop = true;
            }
        }
        if h_eff < 1e-14 * (1.0 + t.abs()) {
            // Degenerate interval against a stop; treat the stop as reached.
            if hit_stop {
                if let Some(s) = next_stop {
                    t = s;
                    observe(t, &y);
                    next_stop = stop_iter.next();
                }
                continue;
            }
            return Err(LzError::IntegratorStall { last_step: h_eff });
        }
        let hs = dir * h_eff;

        // Stage evaluations.
        let mut k = [[Complex64::ZERO; N]; 7];
        k[0] = k0;
        for (i, a_row) in A.iter().enumerate().skip(1) {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                let a = a_row[j];
                if a != 0.0 {
                    for (yv, kv) in yi.iter_mut().zip(kj.iter()) {
                        *yv += hs * a * kv;
                    }
                }
            }
            k[i] = rhs(t + C[i] * hs, &yi);
        }

        let mut y_new = y;
        let mut err_num = 0.0_f64;
        for c in 0..N {
            let mut dy = Complex64::ZERO;
            let mut de = Complex64::ZERO;
            for (i, ki) in k.iter().enumerate() {
                dy += B5[i] * ki[c];
                de += E[i] * ki[c];
            }
            y_new[c] += hs * dy;
            let scale = tol.atol + tol.rtol * y[c].norm().max(y_new[c].norm());
            let e = (hs * de).norm() / scale;
            err_num = err_num.max(e);
        }
        let err = err_num.max(1e-30);

        if err <= 1.0 {
            t += hs;
            y = y_new;
            k0 = k[6]; // FSAL
            observe(t, &y);
            if hit_stop {
                next_stop = stop_iter.next();
            }
            let scale = SAFETY * err.powf(-K_I) * prev_err.powf(K_P);
            h = h_eff * scale.clamp(MIN_SCALE, MAX_SCALE);
            prev_err = err;
        } else {
            let scale = SAFETY * err.powf(-0.2);
            h = h_eff * scale.clamp(MIN_SCALE, 1.0);
            if h < 1e-14 * (1.0 + t.abs()) {
                return Err(LzError::IntegratorStall { last_step: h });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_rotation() {
        // y' = i y  =>  y(t) = e^{it}
        let y = integrate(
            |_t, y: &[Complex64; 1]| [Complex64::I * y[0]],
            0.0,
            2.0,
            [Complex64::ONE],
            Tolerances::default(),
            &[],
            |_, _| {},
        )
        .unwrap();
        let exact = Complex64::new(2.0_f64.cos(), 2.0_f64.sin());
        assert!((y[0] - exact).norm() < 1e-10);
    }

    #[test]
    fn backward_integration_inverts_forward() {
        let rhs = |t: f64, y: &[Complex64; 2]| {
            [
                Complex64::new(0.0, t / 2.0) * y[0] - Complex64::new(0.0, 1.0) * y[1],
                -Complex64::new(0.0, 1.0) * y[0] - Complex64::new(0.0, t / 2.0) * y[1],
            ]
        };
        let y0 = [Complex64::ONE, Complex64::ZERO];
        let fwd = integrate(rhs, -2.0, 3.0, y0, Tolerances::default(), &[], |_, _| {}).unwrap();
        let back = integrate(rhs, 3.0, -2.0, fwd, Tolerances::default(), &[], |_, _| {}).unwrap();
        assert!((back[0] - y0[0]).norm() < 1e-9);
        assert!((back[1] - y0[1]).norm() < 1e-9);
    }

    #[test]
    fn stops_are_visited_in_order() {
        let mut seen = Vec::new();
        let stops = [0.25, 0.5, 0.75];
        integrate(
            |_t, y: &[Complex64; 1]| [-y[0]],
            0.0,
            1.0,
            [Complex64::ONE],
            Tolerances::default(),
            &stops,
            |t, _| seen.push(t),
        )
        .unwrap();
        for s in stops {
            assert!(seen.iter().any(|&t| (t - s).abs() < 1e-14), "missing stop {s}");
        }
    }
}
