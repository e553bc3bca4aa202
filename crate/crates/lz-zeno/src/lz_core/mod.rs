//! Exact two-level Landau-Zener propagation in rescaled time.
//!
//! The rescaled system is
//!
//!   i a' = -(t/2) a + sqrt(gamma) b,
//!   i b' =  sqrt(gamma) a + (t/2) b,
//!
//! whose full-line stay probability is the closed form e^{-2 pi gamma}.
//! Finite segments are integrated directly in the diabatic frame; segments
//! reaching t = +-inf are integrated in the adiabatic frame (see [`frame`])
//! and truncated at a horizon where the remaining tail is far below the
//! 1e-4 boundary tolerance.

mod frame;
mod mat;
mod ode;
pub mod special;

mod evolution;

pub use evolution::EvolutionTable;
pub use ode::Tolerances;
pub use special::{fresnel, hyp2f2, FRESNEL_LIMIT};

use num_complex::Complex64;

use crate::error::{LzError, Result};
use mat::Mat2;

/// Dimensionless adiabaticity parameter gamma = Delta^2 / (2 epsilon),
/// optionally carrying the physical constants it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    gamma: f64,
    delta: Option<f64>,
    epsilon: Option<f64>,
}

impl Coupling {
    /// gamma >= 0; zero is admitted only as a degenerate test input.
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(LzError::InvalidInput(format!(
                "gamma must be finite and nonnegative, got {gamma}"
            )));
        }
        Ok(Self { gamma, delta: None, epsilon: None })
    }

    /// Derive gamma from the physical coupling Delta and sweep rate epsilon.
    pub fn from_physical(delta: f64, epsilon: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(LzError::InvalidInput(format!("delta must be positive, got {delta}")));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(LzError::InvalidInput(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(Self { gamma: delta * delta / (2.0 * epsilon), delta: Some(delta), epsilon: Some(epsilon) })
    }

    /// All three constants given; gamma must equal Delta^2/(2 epsilon) to
    /// 1e-12 relative precision.
    pub fn with_physical(gamma: f64, delta: f64, epsilon: f64) -> Result<Self> {
        let derived = Self::from_physical(delta, epsilon)?;
        if (derived.gamma - gamma).abs() > 1e-12 * gamma.abs().max(derived.gamma.abs()) {
            return Err(LzError::InvalidInput(format!(
                "gamma {gamma} inconsistent with delta^2/(2 epsilon) = {}",
                derived.gamma
            )));
        }
        Ok(Self { gamma, delta: Some(delta), epsilon: Some(epsilon) })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> Option<f64> {
        self.delta
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }
}

/// A point on the extended real time axis. The infinities are sentinel
/// states, never produced by arithmetic on finite values.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum TimeInstant {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl TimeInstant {
    pub fn finite(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(LzError::InvalidInput(format!(
                "finite time instant required, got {value}"
            )));
        }
        Ok(TimeInstant::Finite(value))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, TimeInstant::Finite(_))
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            TimeInstant::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

impl std::fmt::Display for TimeInstant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeInstant::NegInfinity => write!(f, "-inf"),
            TimeInstant::Finite(v) => write!(f, "{v}"),
            TimeInstant::PosInfinity => write!(f, "+inf"),
        }
    }
}

/// Diabatic amplitudes (a, b) of a pure state a|0> + b|1>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub a: Complex64,
    pub b: Complex64,
}

impl AmplitudePair {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    /// The diabatic ground-basis state |0>.
    pub fn ket0() -> Self {
        Self { a: Complex64::ONE, b: Complex64::ZERO }
    }

    pub fn ket1() -> Self {
        Self { a: Complex64::ZERO, b: Complex64::ONE }
    }

    pub fn norm_sq(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn populations(&self) -> (f64, f64) {
        (self.a.norm_sqr(), self.b.norm_sqr())
    }
}

/// Squared moduli |u_jk|^2 of a two-level unitary segment: a symmetric doubly
/// stochastic 2x2 matrix, fully determined by the stay probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationMatrix {
    stay: f64,
}

impl PopulationMatrix {
    pub fn identity() -> Self {
        Self { stay: 1.0 }
    }

    /// Build from the stay probability |u00|^2; clamped to [0, 1].
    pub fn from_stay_probability(p: f64) -> Self {
        Self { stay: p.clamp(0.0, 1.0) }
    }

    pub fn entry(&self, j: usize, k: usize) -> f64 {
        assert!(j < 2 && k < 2);
        if j == k {
            self.stay
        } else {
            1.0 - self.stay
        }
    }

    /// |u00|^2 = |u11|^2.
    pub fn stay(&self) -> f64 {
        self.stay
    }

    /// Apply to a diagonal population: returns the new |0> population after
    /// evolving a diagonal state with |0> weight `p` through this segment.
    pub fn evolve_population(&self, p: f64) -> f64 {
        p * self.stay + (1.0 - p) * (1.0 - self.stay)
    }
}

/// Closed-form Landau-Zener stay probability e^{-2 pi gamma}.
pub fn lz_probability(c: &Coupling) -> f64 {
    (-2.0 * std::f64::consts::PI * c.gamma()).exp()
}

fn diabatic_rhs(gamma: f64) -> impl Fn(f64, &[Complex64; 2]) -> [Complex64; 2] {
    let sg = gamma.sqrt();
    move |t, y| {
        let half_t = Complex64::new(0.0, 0.5 * t);
        let coupling = Complex64::new(0.0, sg);
        [half_t * y[0] - coupling * y[1], -coupling * y[0] - half_t * y[1]]
    }
}

fn diabatic_matrix_rhs(gamma: f64) -> impl Fn(f64, &[Complex64; 4]) -> [Complex64; 4] {
    let sg = gamma.sqrt();
    move |t, y| {
        let half_t = Complex64::new(0.0, 0.5 * t);
        let coupling = Complex64::new(0.0, sg);
        [
            half_t * y[0] - coupling * y[2],
            half_t * y[1] - coupling * y[3],
            -coupling * y[0] - half_t * y[2],
            -coupling * y[1] - half_t * y[3],
        ]
    }
}

/// Propagate diabatic amplitudes from t0 to t1 (either order, both finite).
pub fn propagate(c: &Coupling, t0: f64, t1: f64, psi: &AmplitudePair) -> Result<AmplitudePair> {
    if !t0.is_finite() || !t1.is_finite() {
        return Err(LzError::InvalidInput(format!(
            "propagate requires finite endpoints, got ({t0}, {t1})"
        )));
    }
    if !(psi.a.is_finite() && psi.b.is_finite()) {
        return Err(LzError::InvalidInput("non-finite input amplitudes".into()));
    }
    let y = ode::integrate(
        diabatic_rhs(c.gamma()),
        t0,
        t1,
        [psi.a, psi.b],
        Tolerances::default(),
        &[],
        |_, _| {},
    )?;
    Ok(AmplitudePair::new(y[0], y[1]))
}

/// Population matrix |u_jk(t1, t0)|^2 for t0 <= t1 on the extended real line.
///
/// Infinite endpoints are limits, accurate to the 1e-4 boundary tolerance;
/// finite segments are accurate to integrator precision.
pub fn population_matrix(
    c: &Coupling,
    t0: TimeInstant,
    t1: TimeInstant,
) -> Result<PopulationMatrix> {
    if t0.partial_cmp(&t1) == Some(std::cmp::Ordering::Greater) {
        return Err(LzError::InvalidInterval { start: t0.to_string(), end: t1.to_string() });
    }
    if t0 == t1 {
        return Ok(PopulationMatrix::identity());
    }
    if c.gamma() == 0.0 {
        // Diagonal Hamiltonian: populations are constant.
        return Ok(PopulationMatrix::identity());
    }
    match (t0, t1) {
        (TimeInstant::Finite(a), TimeInstant::Finite(b)) => {
            let u = ode::integrate(
                diabatic_matrix_rhs(c.gamma()),
                a,
                b,
                Mat2::IDENTITY.to_flat(),
                Tolerances::default(),
                &[],
                |_, _| {},
            )?;
            Ok(PopulationMatrix::from_stay_probability(Mat2::from_flat(u).stay_probability()))
        }
        _ => boundary_populations(c, t0, t1),
    }
}

/// Infinite-endpoint segments through the adiabatic frame.
fn boundary_populations(
    c: &Coupling,
    t0: TimeInstant,
    t1: TimeInstant,
) -> Result<PopulationMatrix> {
    let g = c.gamma();
    let mut h = frame::horizon(g);
    // A finite endpoint beyond the horizon pushes the truncation point out.
    if let TimeInstant::Finite(a) = t0 {
        h = h.max(a.abs());
    }
    if let TimeInstant::Finite(b) = t1 {
        h = h.max(b.abs());
    }
    // Incoming map: at -inf the diabatic basis meets the adiabatic one in
    // swapped order (|0> is the excited state); at a finite start it is the
    // exact frame conversion.
    let (start, m_in) = match t0 {
        TimeInstant::NegInfinity => (-h, Mat2::SWAP),
        TimeInstant::Finite(a) => (a, frame::chi_to_diabatic(g, a).adjoint()),
        TimeInstant::PosInfinity => unreachable!("ordering checked by caller"),
    };
    let (end, finite_end) = match t1 {
        TimeInstant::PosInfinity => (h, None),
        TimeInstant::Finite(b) => (b, Some(b)),
        TimeInstant::NegInfinity => unreachable!("ordering checked by caller"),
    };
    let x = ode::integrate(
        frame::chi_matrix_rhs(g),
        start,
        end,
        Mat2::IDENTITY.to_flat(),
        Tolerances::default(),
        &[],
        |_, _| {},
    )?;
    let mut u = Mat2::from_flat(x).mul(&m_in);
    if let Some(b) = finite_end {
        u = frame::chi_to_diabatic(g, b).mul(&u);
    }
    // At +inf the chi populations are read out directly (rows g, e match
    // the diabatic |0>, |1> in the limit).
    Ok(PopulationMatrix::from_stay_probability(u.stay_probability()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coupling_validation() {
        assert!(Coupling::new(-1.0).is_err());
        assert!(Coupling::new(f64::NAN).is_err());
        let c = Coupling::from_physical(2.0, 4.0).unwrap();
        assert_abs_diff_eq!(c.gamma(), 0.5);
        assert!(Coupling::with_physical(0.5, 2.0, 4.0).is_ok());
        assert!(Coupling::with_physical(0.5001, 2.0, 4.0).is_err());
    }

    #[test]
    fn time_instant_ordering() {
        let a = TimeInstant::NegInfinity;
        let b = TimeInstant::Finite(-100.0);
        let c = TimeInstant::Finite(3.0);
        let d = TimeInstant::PosInfinity;
        assert!(a < b && b < c && c < d);
        assert!(TimeInstant::finite(f64::INFINITY).is_err());
    }

    #[test]
    fn zero_coupling_keeps_populations() {
        let c = Coupling::new(0.0).unwrap();
        let out = propagate(&c, -7.0, 11.0, &AmplitudePair::ket0()).unwrap();
        let (p0, p1) = out.populations();
        assert_abs_diff_eq!(p0, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p1, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn identity_on_empty_interval() {
        let c = Coupling::new(1.0).unwrap();
        let psi = AmplitudePair::new(
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        );
        let out = propagate(&c, 2.5, 2.5, &psi).unwrap();
        assert_eq!(out, psi);
        let m = population_matrix(&c, TimeInstant::Finite(2.5), TimeInstant::Finite(2.5)).unwrap();
        assert_eq!(m.stay(), 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = Coupling::new(1.0).unwrap();
        assert!(propagate(&c, f64::NAN, 1.0, &AmplitudePair::ket0()).is_err());
        let bad = AmplitudePair::new(Complex64::new(f64::NAN, 0.0), Complex64::ZERO);
        assert!(propagate(&c, 0.0, 1.0, &bad).is_err());
        assert!(population_matrix(&c, TimeInstant::Finite(1.0), TimeInstant::Finite(0.0)).is_err());
        assert!(population_matrix(&c, TimeInstant::PosInfinity, TimeInstant::NegInfinity).is_err());
    }

    #[test]
    fn norm_is_preserved() {
        let c = Coupling::new(1.7).unwrap();
        let out = propagate(&c, -9.0, 6.0, &AmplitudePair::ket0()).unwrap();
        assert_abs_diff_eq!(out.norm_sq(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn composition_of_segments() {
        let c = Coupling::new(0.8).unwrap();
        let psi = AmplitudePair::ket0();
        let direct = propagate(&c, -4.0, 5.0, &psi).unwrap();
        let mid = propagate(&c, -4.0, 0.7, &psi).unwrap();
        let composed = propagate(&c, 0.7, 5.0, &mid).unwrap();
        assert!((direct.a - composed.a).norm() < 1e-8);
        assert!((direct.b - composed.b).norm() < 1e-8);
    }

    #[test]
    fn lz_formula_closed_form() {
        assert_abs_diff_eq!(lz_probability(&Coupling::new(0.0).unwrap()), 1.0);
        assert_abs_diff_eq!(
            lz_probability(&Coupling::new(1.0).unwrap()),
            (-2.0 * std::f64::consts::PI).exp()
        );
        assert_abs_diff_eq!(
            lz_probability(&Coupling::new(0.5).unwrap()),
            (-std::f64::consts::PI).exp()
        );
    }

    #[test]
    fn full_line_matches_lz_formula() {
        for &g in &[0.1, 1.0] {
            let c = Coupling::new(g).unwrap();
            let m =
                population_matrix(&c, TimeInstant::NegInfinity, TimeInstant::PosInfinity).unwrap();
            assert_abs_diff_eq!(m.entry(0, 0), lz_probability(&c), epsilon = 1e-4);
        }
    }

    #[test]
    fn propagate_cross_checks_boundary_limit() {
        // The diabatic population at t = 40 still oscillates with an O(1/t)
        // envelope, so the agreement with the t -> inf limit is only a few
        // parts in a thousand.
        let c = Coupling::new(1.0).unwrap();
        let out = propagate(&c, -40.0, 40.0, &AmplitudePair::ket0()).unwrap();
        let limit =
            population_matrix(&c, TimeInstant::NegInfinity, TimeInstant::PosInfinity).unwrap();
        assert!((out.populations().0 - limit.entry(0, 0)).abs() < 5e-3);
    }

    #[test]
    fn half_segment_value() {
        // |u00(0, -inf)|^2 = (1 + e^{-pi gamma}) / 2.
        for &g in &[0.1, 1.0] {
            let c = Coupling::new(g).unwrap();
            let m = population_matrix(&c, TimeInstant::NegInfinity, TimeInstant::Finite(0.0))
                .unwrap();
            let expect = 0.5 * (1.0 + (-std::f64::consts::PI * g).exp());
            assert_abs_diff_eq!(m.entry(0, 0), expect, epsilon = 1e-4);
        }
    }

    #[test]
    fn time_reversal_symmetry() {
        let c = Coupling::new(0.6).unwrap();
        let fwd =
            population_matrix(&c, TimeInstant::Finite(-2.0), TimeInstant::Finite(1.0)).unwrap();
        let rev =
            population_matrix(&c, TimeInstant::Finite(-1.0), TimeInstant::Finite(2.0)).unwrap();
        assert_abs_diff_eq!(fwd.entry(0, 0), rev.entry(0, 0), epsilon = 1e-9);
    }

    #[test]
    fn population_matrix_row_and_column_sums() {
        let c = Coupling::new(1.3).unwrap();
        let m = population_matrix(&c, TimeInstant::Finite(-3.0), TimeInstant::Finite(4.0)).unwrap();
        for j in 0..2 {
            let row: f64 = (0..2).map(|k| m.entry(j, k)).sum();
            let col: f64 = (0..2).map(|k| m.entry(k, j)).sum();
            assert_abs_diff_eq!(row, 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(col, 1.0, epsilon = 1e-9);
        }
        assert_eq!(m.entry(0, 1), m.entry(1, 0));
    }
}
