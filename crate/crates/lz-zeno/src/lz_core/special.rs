//! Fresnel integral and the generalized hypergeometric function 2F2(1,1;3/2,2;z).

use std::sync::OnceLock;

use num_complex::Complex64;

/// Limit of [`fresnel`] as t -> +inf: e^{i pi/4}/sqrt(2) = (1+i)/2.
pub const FRESNEL_LIMIT: Complex64 = Complex64::new(0.5, 0.5);

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Fresnel integral F(t) = sqrt(2/pi) * Int_0^t e^{i s^2} ds.
///
/// Odd in t; |error| <= 1e-10 on the whole real line. Below |t| = 3 a Taylor
/// series is used. Above, the tail Int_t^inf is exact on the rotated contour
/// s = t + e^{i pi/4} u, where it becomes a smooth Gaussian-damped integral
/// evaluated by fixed-order Gauss-Legendre quadrature; the plain asymptotic
/// series bottoms out near 3e-5 at t = 3 and cannot meet the tolerance.
pub fn fresnel(t: f64) -> Complex64 {
    debug_assert!(t.is_finite());
    if t < 0.0 {
        return -fresnel(-t);
    }
    if t <= 3.0 {
        return fresnel_taylor(t);
    }
    FRESNEL_LIMIT - (2.0 / std::f64::consts::PI).sqrt() * fresnel_tail(t)
}

fn fresnel_taylor(t: f64) -> Complex64 {
    // sqrt(2/pi) * sum_n (i t^2)^n t / (n! (2n+1))
    let it2 = Complex64::new(0.0, t * t);
    let mut term = Complex64::new(t, 0.0);
    let mut sum = Complex64::ZERO;
    for n in 0..200 {
        sum += term / (2 * n + 1) as f64;
        term *= it2 / (n + 1) as f64;
        if term.norm() < 1e-18 * sum.norm().max(1.0) {
            break;
        }
    }
    (2.0 / std::f64::consts::PI).sqrt() * sum
}

/// Int_t^inf e^{i s^2} ds for t > 0, via the contour rotation
/// s = t + e^{i pi/4} u: equals e^{i pi/4} e^{i t^2} Int_0^inf e^{-a u - u^2} du
/// with a = sqrt(2) t (1 - i).
fn fresnel_tail(t: f64) -> Complex64 {
    let a = Complex64::new(1.0, -1.0) * (std::f64::consts::SQRT_2 * t);
    let upper = (45.0 / (std::f64::consts::SQRT_2 * t)).min(7.0);
    let (nodes, weights) = gauss_legendre_64();
    let mut j = Complex64::ZERO;
    for (&x, &w) in nodes.iter().zip(weights.iter()) {
        let u = 0.5 * upper * (x + 1.0);
        j += (0.5 * upper * w) * (-a * u - u * u).exp();
    }
    Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 + t * t) * j
}

fn gauss_legendre_64() -> &'static ([f64; 64], [f64; 64]) {
    static TABLE: OnceLock<([f64; 64], [f64; 64])> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = 64usize;
        let mut nodes = [0.0; 64];
        let mut weights = [0.0; 64];
        for k in 0..n {
            // Newton iteration from the Chebyshev-like initial guess.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            nodes[n - 1 - k] = x;
            weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// 2F2(1,1;3/2,2;z).
///
/// The defining series reduces to sum_n (2z)^n / ((2n+1)!! (n+1)) and is used
/// for |z| <= 8 (and for arguments off the imaginary axis, where only small
/// |z| occurs in this crate). On the tested ray z = -i t^2/2 with |z| > 8 the
/// series loses all precision, so the function is evaluated through the exact
/// contour representation
///
///   2F2(-i t^2/2) = (2 sqrt(pi)/t^2) [ sqrt(pi) F_inf conj(F(t/sqrt2)) + R(t) ],
///   R(t) = Int_0^t e^{-i r^2/2} (F(r/sqrt2) - F_inf) dr,
///
/// whose integrand is smooth and non-oscillatory; its large-t limit is the
/// logarithmic form (ln(2 i t^2) + C)/(i t^2) with C the Euler constant.
pub fn hyp2f2(z: Complex64) -> Complex64 {
    if z.norm() <= 8.0 {
        return hyp2f2_series(z);
    }
    // Detect the ray z = -i t^2 / 2 (or its conjugate) within roundoff.
    if z.re.abs() <= 1e-9 * z.norm() {
        let t = (2.0 * z.norm()).sqrt();
        let on_lower_ray = z.im < 0.0;
        let v = hyp2f2_ray(t);
        return if on_lower_ray { v } else { v.conj() };
    }
    hyp2f2_series(z)
}

/// Leading large-argument form of 2F2(1,1;3/2,2;-i t^2/2); error O(t^-3).
pub fn hyp2f2_asymptotic_leading(t: f64) -> Complex64 {
    let it2 = Complex64::new(0.0, t * t);
    ((2.0 * t * t).ln() + EULER_GAMMA + Complex64::new(0.0, std::f64::consts::FRAC_PI_2)) / it2
}

fn hyp2f2_series(z: Complex64) -> Complex64 {
    let mut term = Complex64::ONE;
    let mut sum = term;
    for n in 0..500 {
        let n = n as f64;
        term *= z * (n + 1.0) / ((n + 1.5) * (n + 2.0));
        sum += term;
        if term.norm() < 1e-17 * sum.norm().max(1.0) {
            break;
        }
    }
    sum
}

fn hyp2f2_ray(t: f64) -> Complex64 {
    let finf = FRESNEL_LIMIT;
    let remainder = integrate_smooth(
        |r| Complex64::from_polar(1.0, -0.5 * r * r) * (fresnel(r / std::f64::consts::SQRT_2) - finf),
        0.0,
        t,
        1e-13,
    );
    let sqrt_pi = std::f64::consts::PI.sqrt();
    (2.0 * sqrt_pi / (t * t))
        * (sqrt_pi * finf * fresnel(t / std::f64::consts::SQRT_2).conj() + remainder)
}

/// Adaptive Simpson quadrature for smooth complex integrands.
fn integrate_smooth<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    fn simpson<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        fa: Complex64,
        b: f64,
        fb: Complex64,
        fm: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        simpson(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
            + simpson(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, fa, b, fb, fm, whole, tol, 40)
}
