//! Measurement schedules, the exact transition-probability objective, the
//! nonselective measurement channel, and the variable-observable upper bound.

use crate::error::{LzError, Result};
use crate::lz_core::{population_matrix, Coupling, EvolutionTable, TimeInstant};

/// Default cap on the number of measurements in a schedule.
pub const DEFAULT_MAX_MEASUREMENTS: usize = 64;

/// A coupling plus a sorted list of measurement instants in rescaled time.
/// Ties are allowed; repeated measurements are idempotent.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSchedule {
    coupling: Coupling,
    instants: Vec<f64>,
}

impl MeasurementSchedule {
    pub fn new(coupling: Coupling, instants: Vec<f64>) -> Result<Self> {
        Self::with_max(coupling, instants, DEFAULT_MAX_MEASUREMENTS)
    }

    pub fn with_max(coupling: Coupling, instants: Vec<f64>, max: usize) -> Result<Self> {
        if instants.len() > max {
            return Err(LzError::TooManyMeasurements { n: instants.len(), max });
        }
        if instants.iter().any(|t| !t.is_finite()) {
            return Err(LzError::InvalidInput("measurement instants must be finite".into()));
        }
        if instants.windows(2).any(|w| w[0] > w[1]) {
            return Err(LzError::InvalidInput("measurement instants must be sorted".into()));
        }
        Ok(Self { coupling, instants })
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn instants(&self) -> &[f64] {
        &self.instants
    }

    pub fn len(&self) -> usize {
        self.instants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instants.is_empty()
    }

    /// The time-reflected schedule (-t_N, ..., -t_1); an equally good solution
    /// by the t -> -t symmetry of the dynamics.
    pub fn mirror(&self) -> Self {
        let mut instants: Vec<f64> = self.instants.iter().map(|t| -t).collect();
        instants.reverse();
        Self { coupling: self.coupling, instants }
    }
}

/// Population of |0> in a diagonal density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalState {
    p: f64,
}

impl DiagonalState {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(LzError::InvalidInput(format!("population must lie in [0,1], got {p}")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn bloch_z(&self) -> f64 {
        2.0 * self.p - 1.0
    }
}

/// Bloch-vector representation of a qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub w: [f64; 3],
}

impl BlochVector {
    pub fn new(w: [f64; 3]) -> Result<Self> {
        let norm = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        if !norm.is_finite() || norm > 1.0 + 1e-9 {
            return Err(LzError::InvalidInput(format!("Bloch vector norm {norm} exceeds 1")));
        }
        Ok(Self { w })
    }

    pub fn norm(&self) -> f64 {
        (self.w[0] * self.w[0] + self.w[1] * self.w[1] + self.w[2] * self.w[2]).sqrt()
    }
}

/// Nonselective standard-basis measurement: projects the Bloch vector onto
/// the vertical axis, erasing coherences.
pub fn apply_measurement(w: &BlochVector) -> BlochVector {
    BlochVector { w: [0.0, 0.0, w.w[2]] }
}

/// Exact transition probability <0|rho(+inf)|0> for a measurement schedule,
/// starting from rho(-inf) = |0><0|.
///
/// Computed as an O(N) chain of stay probabilities: each measurement leaves a
/// diagonal state, so the full 2^N path sum collapses to evolving the single
/// population p through p' = p m00 + (1-p)(1-m00) per segment.
pub fn transition_probability(schedule: &MeasurementSchedule) -> Result<f64> {
    let c = schedule.coupling();
    let mut p = 1.0;
    let mut prev = TimeInstant::NegInfinity;
    for &t in schedule.instants() {
        let seg = population_matrix(c, prev, TimeInstant::Finite(t))?;
        p = seg.evolve_population(p);
        prev = TimeInstant::Finite(t);
    }
    let last = population_matrix(c, prev, TimeInstant::PosInfinity)?;
    Ok(last.evolve_population(p).clamp(0.0, 1.0))
}

/// Reference evaluator: the explicit 2^N sum over measurement outcomes.
///
/// Exponential in N (capped at 20); kept as an independent cross-check of the
/// chain evaluator, never used in optimization.
pub fn path_sum_probability(schedule: &MeasurementSchedule) -> Result<f64> {
    let n = schedule.len();
    if n > 20 {
        return Err(LzError::EnumerationTooLarge { n, max: 20 });
    }
    let c = schedule.coupling();
    let mut segments = Vec::with_capacity(n + 1);
    let mut prev = TimeInstant::NegInfinity;
    for &t in schedule.instants() {
        segments.push(population_matrix(c, prev, TimeInstant::Finite(t))?);
        prev = TimeInstant::Finite(t);
    }
    segments.push(population_matrix(c, prev, TimeInstant::PosInfinity)?);

    let mut total = 0.0;
    for path in 0u64..(1u64 << n) {
        let mut prod = 1.0;
        let mut j_prev = 0usize;
        for (k, seg) in segments.iter().enumerate() {
            let j_next = if k < n { ((path >> k) & 1) as usize } else { 0 };
            prod *= seg.entry(j_next, j_prev);
            j_prev = j_next;
        }
        total += prod;
    }
    Ok(total)
}

/// Theorem-1 upper bound { 1 + cos^{N+1}(delta_phi/(N+1)) } / 2 for the
/// variable-observable relaxation; delta_phi is the Bloch angle between |0>
/// and U^dag(+inf,-inf)|0>, equal to pi in the adiabatic limit.
pub fn upper_bound(n: usize, delta_phi: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI + 1e-12).contains(&delta_phi) {
        return Err(LzError::InvalidInput(format!(
            "delta_phi must lie in [0, pi], got {delta_phi}"
        )));
    }
    let m = (n + 1) as f64;
    Ok(0.5 * (1.0 + (delta_phi / m).cos().powi(n as i32 + 1)))
}

/// Bloch angle between |0> and U^dag(+inf,-inf)|0>, computed from the
/// propagated full-line stay probability: cos(delta_phi) = 2|u00|^2 - 1.
pub fn delta_phi_from_propagator(c: &Coupling) -> Result<f64> {
    let m = population_matrix(c, TimeInstant::NegInfinity, TimeInstant::PosInfinity)?;
    Ok(delta_phi_from_stay(m.stay()))
}

/// Same angle from an already-known stay probability.
pub fn delta_phi_from_stay(stay: f64) -> f64 {
    (2.0 * stay - 1.0).clamp(-1.0, 1.0).acos()
}

/// Fast objective evaluation backed by a precomputed [`EvolutionTable`];
/// agrees with [`transition_probability`] to interpolation accuracy (~1e-7)
/// and is cheap enough for optimizer inner loops.
#[derive(Debug, Clone, Copy)]
pub struct ScheduleEvaluator<'a> {
    table: &'a EvolutionTable,
}

impl<'a> ScheduleEvaluator<'a> {
    pub fn new(table: &'a EvolutionTable) -> Self {
        Self { table }
    }

    pub fn table(&self) -> &'a EvolutionTable {
        self.table
    }

    /// Transition probability for sorted instants (same chain as
    /// [`transition_probability`]).
    pub fn probability(&self, instants: &[f64]) -> f64 {
        let t = self.table;
        match instants {
            [] => t.lz_stay(),
            [first, rest @ ..] => {
                let mut p = t.stay_from_minus_inf(*first);
                let mut prev = *first;
                for &ti in rest {
                    let m = t.stay_between(prev, ti);
                    p = p * m + (1.0 - p) * (1.0 - m);
                    prev = ti;
                }
                let m = t.stay_to_plus_inf(prev);
                (p * m + (1.0 - p) * (1.0 - m)).clamp(0.0, 1.0)
            }
        }
    }
}

/// How an optimized schedule was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Dynamic programming on the full time grid.
    Dp,
    /// Small-gamma pipeline: first-order objective plus local refinement.
    Antiadiabatic,
    /// Large-gamma pipeline: analytic seed plus differential evolution.
    Adiabatic,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Dp => write!(f, "dp"),
            Method::Antiadiabatic => write!(f, "antiadiabatic"),
            Method::Adiabatic => write!(f, "adiabatic"),
        }
    }
}

/// Extra information carried alongside an optimized schedule.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    /// Value predicted by the optimizer's internal model (DP table or
    /// first-order objective), before exact re-evaluation.
    pub model_value: Option<f64>,
    /// RNG seed used, for stochastic methods.
    pub rng_seed: Option<u64>,
    /// Improvement of the final local refinement stage.
    pub refinement_delta: Option<f64>,
    /// False when a local search hit its iteration cap.
    pub converged: bool,
    pub warnings: Vec<String>,
}

/// An optimized schedule, its achieved probability, and diagnostics.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub schedule: MeasurementSchedule,
    pub probability: f64,
    pub method: Method,
    /// Theorem-1 bound at the propagator-derived delta_phi(gamma).
    pub bound: f64,
    pub diagnostics: Diagnostics,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lz_core::lz_probability;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bloch_projection() {
        let cases = [
            ([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]),
            ([1.0, 0.0, 0.0], [0.0, 0.0, 0.0]),
            ([0.6, 0.0, 0.8], [0.0, 0.0, 0.8]),
        ];
        for (input, expect) in cases {
            let out = apply_measurement(&BlochVector::new(input).unwrap());
            assert_eq!(out.w, expect);
            // idempotent
            assert_eq!(apply_measurement(&out).w, expect);
            assert!(out.norm() <= BlochVector::new(input).unwrap().norm() + 1e-15);
        }
        assert!(BlochVector::new([1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn schedule_validation() {
        let c = Coupling::new(1.0).unwrap();
        assert!(MeasurementSchedule::new(c, vec![1.0, 0.0]).is_err());
        assert!(MeasurementSchedule::new(c, vec![f64::NAN]).is_err());
        assert!(MeasurementSchedule::new(c, vec![0.0; 65]).is_err());
        assert!(MeasurementSchedule::new(c, vec![0.0, 0.0]).is_ok());
    }

    #[test]
    fn mirror_reverses_and_negates() {
        let c = Coupling::new(1.0).unwrap();
        let s = MeasurementSchedule::new(c, vec![-3.31, 0.12]).unwrap();
        assert_eq!(s.mirror().instants(), &[-0.12, 3.31]);
        let sym = MeasurementSchedule::new(c, vec![-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(sym.mirror(), sym);
        let empty = MeasurementSchedule::new(c, vec![]).unwrap();
        assert_eq!(empty.mirror(), empty);
    }

    #[test]
    fn no_measurements_recovers_lz() {
        let c = Coupling::new(1.0).unwrap();
        let s = MeasurementSchedule::new(c, vec![]).unwrap();
        assert_abs_diff_eq!(
            transition_probability(&s).unwrap(),
            lz_probability(&c),
            epsilon = 1e-4
        );
    }

    #[test]
    fn single_measurement_at_zero() {
        let c = Coupling::new(1.0).unwrap();
        let s = MeasurementSchedule::new(c, vec![0.0]).unwrap();
        let expect = 0.5 * (1.0 + (-2.0 * std::f64::consts::PI).exp());
        assert_abs_diff_eq!(transition_probability(&s).unwrap(), expect, epsilon = 1e-4);
    }

    #[test]
    fn duplicated_instant_is_idempotent() {
        let c = Coupling::new(0.1).unwrap();
        let one = MeasurementSchedule::new(c, vec![0.0]).unwrap();
        let two = MeasurementSchedule::new(c, vec![0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(
            transition_probability(&one).unwrap(),
            transition_probability(&two).unwrap(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn chain_equals_path_sum() {
        let c = Coupling::new(0.7).unwrap();
        for instants in [vec![], vec![0.3], vec![-1.0, 0.5], vec![-2.0, 0.0, 1.7]] {
            let s = MeasurementSchedule::new(c, instants).unwrap();
            let chain = transition_probability(&s).unwrap();
            let paths = path_sum_probability(&s).unwrap();
            assert_abs_diff_eq!(chain, paths, epsilon = 1e-12);
        }
    }

    #[test]
    fn bound_values() {
        assert_abs_diff_eq!(upper_bound(1, std::f64::consts::PI).unwrap(), 0.5);
        assert_abs_diff_eq!(upper_bound(3, std::f64::consts::PI).unwrap(), 0.625);
        let large = upper_bound(1000, std::f64::consts::PI).unwrap();
        assert_abs_diff_eq!(large, 0.99754, epsilon = 5e-5);
        assert!(large < 1.0);
        assert!(upper_bound(2, -0.1).is_err());
        assert!(upper_bound(2, 4.0).is_err());
    }

    #[test]
    fn delta_phi_tracks_gamma() {
        // Small gamma: U(+inf,-inf)|0> stays near |0>, so the angle is small;
        // large gamma: it lands near |1>, so the angle tends to pi.
        let small = delta_phi_from_propagator(&Coupling::new(0.01).unwrap()).unwrap();
        let large = delta_phi_from_propagator(&Coupling::new(5.0).unwrap()).unwrap();
        assert!(small < 1.0);
        assert!((large - std::f64::consts::PI).abs() < 1e-3);
    }

    #[test]
    fn evaluator_matches_direct_objective() {
        let c = Coupling::new(1.2).unwrap();
        let table = EvolutionTable::build(&c, 10.0, 0.01).unwrap();
        let eval = ScheduleEvaluator::new(&table);
        for instants in [vec![], vec![0.0], vec![-2.217, 0.413, 3.091]] {
            let s = MeasurementSchedule::new(c, instants.clone()).unwrap();
            let direct = transition_probability(&s).unwrap();
            assert_abs_diff_eq!(eval.probability(&instants), direct, epsilon = 1e-6);
        }
    }
}
