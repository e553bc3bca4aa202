//! Instantaneous-eigenstate (adiabatic) frame of the rescaled two-level system.
//!
//! Writing the state as psi = R(t) diag(e^{i L}, e^{-i L}) chi with R(t) the
//! eigenbasis rotation and L(t) = Int_0^t E(s) ds the dynamic phase of
//! E(t) = sqrt(gamma + t^2/4), the equations of motion become
//!
//!   chi_g' = -beta'(t) e^{-2iL} chi_e,    chi_e' = beta'(t) e^{2iL} chi_g,
//!
//! with beta = arctan2(sqrt(gamma), t/2)/2. The coupling beta' decays like
//! 1/t^2, so the frame supports infinite-time boundaries by truncation at a
//! finite horizon: the state chi converges with an O(sqrt(gamma)/T^3) tail,
//! much faster than the O(1/T) oscillatory error of the diabatic frame.

use num_complex::Complex64;

use super::mat::Mat2;

/// Half the mixing angle of the instantaneous eigenbasis, in (0, pi/2).
pub(crate) fn beta(gamma: f64, t: f64) -> f64 {
    0.5 * gamma.sqrt().atan2(0.5 * t)
}

/// d(beta)/dt = -sqrt(gamma) / (t^2 + 4 gamma).
pub(crate) fn beta_dot(gamma: f64, t: f64) -> f64 {
    -gamma.sqrt() / (t * t + 4.0 * gamma)
}

/// Dynamic phase L(t) = Int_0^t sqrt(gamma + s^2/4) ds, odd in t.
///
/// Closed form; the logarithm is arranged to avoid cancellation at large
/// negative t. Equals gamma * omega(t / (2 sqrt(gamma))) in the tau/omega
/// coordinates of the adiabatic analysis.
pub(crate) fn dynamic_phase(gamma: f64, t: f64) -> f64 {
    let r = (t * t + 4.0 * gamma).sqrt();
    0.25 * t * r + gamma * t.signum() * ((t.abs() + r) / (2.0 * gamma.sqrt())).ln()
}

/// Conversion chi -> psi at finite time t: C(t) = R(t) diag(e^{iL}, e^{-iL}).
pub(crate) fn chi_to_diabatic(gamma: f64, t: f64) -> Mat2 {
    let b = beta(gamma, t);
    let (sb, cb) = b.sin_cos();
    let ph = Complex64::from_polar(1.0, dynamic_phase(gamma, t));
    Mat2([[cb * ph, sb * ph.conj()], [-sb * ph, cb * ph.conj()]])
}

/// Right-hand side of the chi-frame matrix equation X' = A(t) X, flattened
/// row-major to 4 components.
pub(crate) fn chi_matrix_rhs(gamma: f64) -> impl Fn(f64, &[Complex64; 4]) -> [Complex64; 4] {
    move |t, y| {
        let bd = beta_dot(gamma, t);
        let ph = Complex64::from_polar(1.0, 2.0 * dynamic_phase(gamma, t));
        let cpl_g = -bd * ph.conj();
        let cpl_e = bd * ph;
        // rows: (g, e); X = [[y0, y1], [y2, y3]]
        [cpl_g * y[2], cpl_g * y[3], cpl_e * y[0], cpl_e * y[1]]
    }
}

/// Truncation horizon for infinite-time boundaries.
pub(crate) fn horizon(gamma: f64) -> f64 {
    (12.0 * (1.0 + gamma).sqrt()).max(40.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dynamic_phase_is_odd_and_stable() {
        for &g in &[0.1, 1.0, 5.0] {
            for &t in &[0.5, 3.0, 47.0] {
                let l = dynamic_phase(g, t);
                assert!((dynamic_phase(g, -t) + l).abs() < 1e-10 * l.abs().max(1.0));
            }
            assert_eq!(dynamic_phase(g, 0.0), 0.0);
        }
    }

    #[test]
    fn conversion_is_unitary() {
        let c = chi_to_diabatic(2.0, -1.3);
        let prod = c.mul(&c.adjoint());
        for j in 0..2 {
            for k in 0..2 {
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((prod.0[j][k] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn phase_derivative_matches_energy() {
        // dL/dt = sqrt(gamma + t^2/4), checked by central differences.
        let g = 0.7;
        for &t in &[-5.0, -0.3, 0.2, 4.0] {
            let h = 1e-6;
            let num = (dynamic_phase(g, t + h) - dynamic_phase(g, t - h)) / (2.0 * h);
            let exact = (g + 0.25 * t * t).sqrt();
            assert!((num - exact).abs() < 1e-7);
        }
    }
}
