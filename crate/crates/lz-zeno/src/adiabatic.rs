//! Large-gamma pipeline: population matrix in the tau/omega coordinates, the
//! oscillatory approximate objective, the analytic seed with its search
//! radii, box-constrained differential evolution on the exact objective, and
//! the maximin analysis for devices that cannot resolve the oscillations.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::antiadiabatic::{refine, RefineKind, RefineResult};
use crate::error::{LzError, Result};
use crate::lz_core::{Coupling, EvolutionTable, PopulationMatrix};
use crate::objective::{
    delta_phi_from_stay, upper_bound, Diagnostics, MeasurementSchedule, Method,
    OptimizationResult, ScheduleEvaluator,
};
use crate::par;

use std::f64::consts::{FRAC_PI_2, PI};

/// Compressed time tau = t/sqrt(1+t^2) in [-1, 1] and the phase coordinate
/// omega(t) = asinh(t) + t sqrt(1+t^2); both odd.
pub fn tau_omega(t: f64) -> (f64, f64) {
    let root = (1.0 + t * t).sqrt();
    (t / root, t.asinh() + t * root)
}

/// d(omega)/dx = 2 sqrt(1 + x^2).
fn omega_prime(x: f64) -> f64 {
    2.0 * (1.0 + x * x).sqrt()
}

/// Leading large-gamma population matrix for the segment (t0, t1), with the
/// times in the ordinary rescaled units (internally divided by 2 sqrt gamma):
/// stay = (1 + tau0 tau1)/2 + sqrt((1-tau0^2)(1-tau1^2)) cos(gamma d_omega)/2.
/// Doubly stochastic by construction; error O(1/gamma).
pub fn adiabatic_population_matrix(c: &Coupling, t0: f64, t1: f64) -> PopulationMatrix {
    let scale = 2.0 * c.gamma().sqrt();
    let (tau0, w0) = tau_omega(t0 / scale);
    let (tau1, w1) = tau_omega(t1 / scale);
    let cross = ((1.0 - tau0 * tau0) * (1.0 - tau1 * tau1)).max(0.0).sqrt();
    let stay = 0.5 * (1.0 + tau0 * tau1) + 0.5 * cross * (c.gamma() * (w1 - w0)).cos();
    PopulationMatrix::from_stay_probability(stay)
}

/// Approximate transition probability for a schedule in the adiabatic limit:
/// 1/2 { 1 - tau_1 prod_l [tau_l tau_{l-1} + sqrt((1-tau_l^2)(1-tau_{l-1}^2))
/// cos(gamma d_omega_l)] tau_N }. Requires N >= 1.
pub fn adiabatic_probability(c: &Coupling, schedule: &MeasurementSchedule) -> Result<f64> {
    let instants = schedule.instants();
    if instants.is_empty() {
        return Err(LzError::InvalidInput(
            "adiabatic probability needs at least one measurement".into(),
        ));
    }
    let g = c.gamma();
    let scale = 2.0 * g.sqrt();
    let coords: Vec<(f64, f64)> = instants.iter().map(|&t| tau_omega(t / scale)).collect();
    let mut product = 1.0;
    for pair in coords.windows(2) {
        let (tau_a, w_a) = pair[0];
        let (tau_b, w_b) = pair[1];
        let cross = ((1.0 - tau_a * tau_a) * (1.0 - tau_b * tau_b)).max(0.0).sqrt();
        product *= tau_a * tau_b + cross * (g * (w_b - w_a)).cos();
    }
    let first = coords[0].0;
    let last = coords[coords.len() - 1].0;
    Ok(0.5 * (1.0 - first * product * last))
}

/// Analytic seed schedule with per-instant search radii.
#[derive(Debug, Clone)]
pub struct AnalyticSeed {
    pub schedule: MeasurementSchedule,
    /// Radii 4 pi / (sqrt(gamma) omega'(t_k / 2 sqrt gamma)); they diverge as
    /// t_k approaches zero, so boxes are clamped before searching.
    pub radii: Vec<f64>,
}

/// Seed instants t_k = -2 sqrt(gamma) cot(pi k/(n+1)), k = 1..n, the centers
/// of the neighborhoods containing the true optima for large gamma.
pub fn analytic_seed(c: &Coupling, n: usize) -> Result<AnalyticSeed> {
    if n == 0 {
        return Err(LzError::InvalidInput("seed needs n >= 1".into()));
    }
    let g = c.gamma();
    if g <= 0.0 {
        return Err(LzError::InvalidInput("analytic seed requires gamma > 0".into()));
    }
    let scale = 2.0 * g.sqrt();
    let mut instants = Vec::with_capacity(n);
    let mut radii = Vec::with_capacity(n);
    for k in 1..=n {
        let angle = PI * k as f64 / (n + 1) as f64;
        let x = -angle.cos() / angle.sin(); // -cot
        instants.push(scale * x);
        radii.push(4.0 * PI / (g.sqrt() * omega_prime(x)));
    }
    let schedule = MeasurementSchedule::new(*c, instants)?;
    Ok(AnalyticSeed { schedule, radii })
}

/// Large-gamma optimum 1/2 {1 + cos^{n+1}(pi/(n+1))}; equals the Theorem-1
/// bound at delta_phi = pi.
pub fn envelope_max(n: usize) -> f64 {
    let m = (n + 1) as f64;
    0.5 * (1.0 + (PI / m).cos().powi(n as i32 + 1))
}

/// Per-instant search boxes around a seed.
///
/// Radii are clamped to half the gap to each neighbor so boxes stay disjoint;
/// when the raw boxes of three or more consecutive seeds overlap (the
/// near-zero cluster at large N), those seeds share the merged interval and
/// are searched jointly.
pub fn search_boxes(seed: &[f64], radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = seed.len();
    if n == 0 || radii.len() != n {
        return Err(LzError::InvalidInput("seed and radii lengths must match".into()));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(LzError::InvalidInput("radii must be positive".into()));
    }

    let clamped: Vec<f64> = (0..n)
        .map(|k| {
            let mut r = radii[k];
            if k > 0 {
                r = r.min(0.5 * (seed[k] - seed[k - 1]));
            }
            if k + 1 < n {
                r = r.min(0.5 * (seed[k + 1] - seed[k]));
            }
            r.max(1e-9)
        })
        .collect();

    let mut boxes: Vec<(f64, f64)> =
        (0..n).map(|k| (seed[k] - clamped[k], seed[k] + clamped[k])).collect();

    // Raw-overlap runs of length >= 3 share one joint interval.
    let overlaps: Vec<bool> =
        (0..n.saturating_sub(1)).map(|k| seed[k] + radii[k] >= seed[k + 1] - radii[k + 1]).collect();
    let mut k = 0;
    while k < n {
        let mut end = k;
        while end + 1 < n && overlaps[end] {
            end += 1;
        }
        if end - k + 1 >= 3 {
            let lo = boxes[k].0;
            let hi = boxes[end].1;
            for member in &mut boxes[k..=end] {
                *member = (lo, hi);
            }
        }
        k = end + 1;
    }

    for &(lo, hi) in &boxes {
        if lo >= hi {
            return Err(LzError::InvalidInput(format!("empty search box [{lo}, {hi}]")));
        }
    }
    Ok(boxes)
}

/// Inverse of omega by Newton iteration (omega is odd and increasing,
/// omega' = 2 sqrt(1+x^2)).
fn omega_inverse(w: f64) -> f64 {
    let mut x = 0.5 * w;
    for _ in 0..80 {
        let (_, wx) = tau_omega(x);
        let dx = (wx - w) / omega_prime(x);
        x -= dx;
        if dx.abs() < 1e-14 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Deterministic phase-aligned candidate: keep t_1, then place each later
/// instant as close to its seed as possible subject to
/// gamma * d_omega = 2 pi k (all oscillation factors at +1).
fn phase_aligned_chain(gamma: f64, t1: f64, seed: &[f64]) -> Vec<f64> {
    let scale = 2.0 * gamma.sqrt();
    let mut out = Vec::with_capacity(seed.len());
    out.push(t1);
    for l in 1..seed.len() {
        let w_prev = tau_omega(out[l - 1] / scale).1;
        let dw = tau_omega(seed[l] / scale).1 - w_prev;
        let k = (gamma * dw / (2.0 * PI)).round().max(0.0);
        let x = omega_inverse(w_prev + 2.0 * PI * k / gamma);
        out.push((scale * x).max(out[l - 1]));
    }
    out
}

/// Per-instant DE bounds: seed_k +- radius_k, adjusted to be monotone so
/// that clamping a sorted candidate keeps it sorted. Unlike
/// [`search_boxes`], neighbouring intervals may overlap; the DE repairs
/// candidates by sorting, so overlap is harmless, and keeping the full
/// radii matters: the clamped disjoint boxes exclude the optimum once the
/// seed spacing drops below the oscillation period (large N).
fn de_bounds(seed: &[f64], radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = seed.len();
    if n == 0 || radii.len() != n {
        return Err(LzError::InvalidInput("seed and radii lengths must match".into()));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(LzError::InvalidInput("radii must be positive".into()));
    }
    let mut bounds: Vec<(f64, f64)> =
        seed.iter().zip(radii.iter()).map(|(&s, &r)| (s - r, s + r)).collect();
    for k in 1..n {
        bounds[k].0 = bounds[k].0.max(bounds[k - 1].0);
    }
    for k in (0..n - 1).rev() {
        bounds[k].1 = bounds[k].1.min(bounds[k + 1].1);
    }
    for &(lo, hi) in &bounds {
        if lo >= hi {
            return Err(LzError::InvalidInput(format!("empty search box [{lo}, {hi}]")));
        }
    }
    Ok(bounds)
}

/// Differential evolution defaults: population 15 N, 300 generations,
/// crossover 0.9, differential weight 0.7, box-clamped, three independent
/// restarts (the landscape has enough local maxima that a single run can
/// converge early; restarts keep the outcome reliable while staying
/// deterministic for a fixed seed).
#[derive(Debug, Clone, Copy)]
pub struct DeSettings {
    pub population_factor: usize,
    pub generations: usize,
    pub crossover: f64,
    pub weight: f64,
    pub restarts: usize,
}

impl Default for DeSettings {
    fn default() -> Self {
        Self { population_factor: 15, generations: 300, crossover: 0.9, weight: 0.7, restarts: 4 }
    }
}

/// Box-constrained differential evolution on the exact objective around the
/// seed, followed by pattern-search polish; deterministic for a fixed seed.
pub fn refine_de(
    table: &EvolutionTable,
    seed: &AnalyticSeed,
    rng_seed: u64,
) -> Result<OptimizationResult> {
    let mut settings = DeSettings::default();
    // Higher-dimensional searches need proportionally longer runs and one
    // extra restart; this keeps the N = 10 cases at intermediate gamma on
    // par with the grid optimizer.
    let n = seed.schedule.len();
    settings.generations = settings.generations.max(90 * n);
    if n >= 8 {
        settings.restarts += 1;
    }
    refine_de_with(table, seed, rng_seed, settings)
}

pub fn refine_de_with(
    table: &EvolutionTable,
    seed: &AnalyticSeed,
    rng_seed: u64,
    settings: DeSettings,
) -> Result<OptimizationResult> {
    let instants = seed.schedule.instants();
    let n = instants.len();
    let boxes = de_bounds(instants, &seed.radii)?;

    let mut candidates: Vec<Vec<f64>> = Vec::new();
    let mut de_value = f64::NEG_INFINITY;
    for restart in 0..settings.restarts.max(1) {
        // splitmix-style derived stream per restart
        let stream = rng_seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let (best, runner_up, value) =
            run_de(table, seed, &boxes, stream, settings);
        de_value = de_value.max(value);
        candidates.push(best);
        candidates.push(runner_up);
    }

    // Pattern-search polish of every restart's leading members; basins this
    // close in score can reorder under polish.
    let polished: Vec<RefineResult> =
        par::map_slice(&candidates, |c| refine(c, RefineKind::Exact(table)));
    let best = polished
        .into_iter()
        .max_by(|a, b| a.value.partial_cmp(&b.value).unwrap())
        .expect("at least one restart");

    let c = *table.coupling();
    let schedule = MeasurementSchedule::new(c, best.instants.clone())?;
    Ok(OptimizationResult {
        schedule,
        probability: best.value,
        method: Method::Adiabatic,
        bound: upper_bound(n, delta_phi_from_stay(table.lz_stay()))?,
        diagnostics: Diagnostics {
            model_value: Some(de_value),
            rng_seed: Some(rng_seed),
            refinement_delta: Some(best.value - de_value),
            converged: best.converged,
            warnings: Vec::new(),
        },
    })
}

/// One DE run; returns the two best members and the best score.
fn run_de(
    table: &EvolutionTable,
    seed: &AnalyticSeed,
    boxes: &[(f64, f64)],
    rng_seed: u64,
    settings: DeSettings,
) -> (Vec<f64>, Vec<f64>, f64) {
    let instants = seed.schedule.instants();
    let n = instants.len();
    let gamma = table.coupling().gamma();
    let eval = ScheduleEvaluator::new(table);
    let fitness = |x: &Vec<f64>| eval.probability(x);

    let repair = |x: &mut Vec<f64>| {
        x.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (v, &(lo, hi)) in x.iter_mut().zip(boxes.iter()) {
            *v = v.clamp(lo, hi);
        }
    };

    let pop_size = (settings.population_factor * n).max(15);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);

    let mut population: Vec<Vec<f64>> = Vec::with_capacity(pop_size);
    population.push(instants.to_vec());
    // Phase-aligned members sweep the first instant across its box and set
    // every oscillation factor to +1; they start the search in the right
    // basin, which plain random initialization rarely finds for large N.
    let aligned = (pop_size / 3).min(48).max(8);
    let r1 = seed.radii[0];
    for i in 0..aligned {
        let jitter = rng.gen_range(-0.5..0.5);
        let t1 = instants[0] + r1 * (2.0 * (i as f64 + 0.5) / aligned as f64 - 1.0 + jitter / aligned as f64);
        let mut member = phase_aligned_chain(gamma, t1, instants);
        repair(&mut member);
        population.push(member);
    }
    while population.len() < pop_size {
        let mut member: Vec<f64> =
            boxes.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
        repair(&mut member);
        population.push(member);
    }
    population.truncate(pop_size);
    let mut scores = par::map_slice(&population, fitness);

    for _gen in 0..settings.generations {
        // Weight dither around the nominal value keeps the population from
        // collapsing early on this heavily multimodal landscape.
        let weight = rng.gen_range((settings.weight - 0.2).max(0.1)..settings.weight + 0.3);
        let mut trials: Vec<Vec<f64>> = Vec::with_capacity(pop_size);
        for i in 0..pop_size {
            let pick = |rng: &mut ChaCha8Rng, avoid: &[usize]| loop {
                let r = rng.gen_range(0..pop_size);
                if !avoid.contains(&r) {
                    return r;
                }
            };
            let r1 = pick(&mut rng, &[i]);
            let r2 = pick(&mut rng, &[i, r1]);
            let r3 = pick(&mut rng, &[i, r1, r2]);
            let j_rand = rng.gen_range(0..n);
            let mut trial = population[i].clone();
            for j in 0..n {
                if j == j_rand || rng.gen::<f64>() < settings.crossover {
                    trial[j] = population[r1][j]
                        + weight * (population[r2][j] - population[r3][j]);
                }
            }
            repair(&mut trial);
            trials.push(trial);
        }
        let trial_scores = par::map_slice(&trials, fitness);
        for i in 0..pop_size {
            if trial_scores[i] >= scores[i] {
                population[i] = trials[i].clone();
                scores[i] = trial_scores[i];
            }
        }
    }

    let mut order: Vec<usize> = (0..pop_size).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    (
        population[order[0]].clone(),
        population[order[1.min(pop_size - 1)]].clone(),
        scores[order[0]],
    )
}

/// Full large-gamma optimization: analytic seed, DE in the clamped boxes,
/// local polish.
pub fn optimize_large_gamma(
    table: &EvolutionTable,
    n: usize,
    rng_seed: u64,
) -> Result<OptimizationResult> {
    let seed = analytic_seed(table.coupling(), n)?;
    refine_de(table, &seed, rng_seed)
}

/// Nonincreasing measurement angles alpha_1 >= ... >= alpha_N in [0, pi].
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSchedule {
    alphas: Vec<f64>,
}

impl AngleSchedule {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(LzError::InvalidInput("angle schedule must be nonempty".into()));
        }
        if alphas.iter().any(|a| !(0.0..=PI + 1e-12).contains(a)) {
            return Err(LzError::InvalidInput("angles must lie in [0, pi]".into()));
        }
        if alphas.windows(2).any(|w| w[0] < w[1] - 1e-12) {
            return Err(LzError::InvalidInput("angles must be nonincreasing".into()));
        }
        Ok(Self { alphas })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

const MAX_ENUMERATED_SIGNS: usize = 20;

/// Worst-case transition probability over the fast-oscillation phases:
/// min over the 2^{N-1} sign choices of
/// 1/2 { 1 - cos a_1 prod_l cos(a_{l-1} +- a_l) cos a_N }.
pub fn maximin_evaluate(angles: &AngleSchedule) -> Result<f64> {
    let a = angles.alphas();
    let n = a.len();
    if n > MAX_ENUMERATED_SIGNS {
        return Err(LzError::EnumerationTooLarge { n, max: MAX_ENUMERATED_SIGNS });
    }
    if n == 1 {
        let c = a[0].cos();
        return Ok(0.5 * (1.0 - c * c));
    }
    let minus: Vec<f64> = a.windows(2).map(|w| (w[0] - w[1]).cos()).collect();
    let plus: Vec<f64> = a.windows(2).map(|w| (w[0] + w[1]).cos()).collect();
    let ends = a[0].cos() * a[n - 1].cos();
    let mut worst = f64::INFINITY;
    for mask in 0u64..(1u64 << (n - 1)) {
        let mut product = ends;
        for l in 0..(n - 1) {
            product *= if (mask >> l) & 1 == 1 { plus[l] } else { minus[l] };
        }
        let value = 0.5 * (1.0 - product);
        if value < worst {
            worst = value;
        }
    }
    Ok(worst)
}

/// Solve the maximin problem: the optimum is 1/2, achieved by a single
/// effective measurement at the crossing (alpha_1 = pi/2, the rest 0).
pub fn maximin_solve(n: usize) -> Result<(f64, AngleSchedule)> {
    if n == 0 {
        return Err(LzError::InvalidInput("maximin needs n >= 1".into()));
    }
    let mut alphas = vec![0.0; n];
    alphas[0] = FRAC_PI_2;
    Ok((0.5, AngleSchedule::new(alphas)?))
}

/// The three families of maximin-optimal angle schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem2Family {
    /// alpha_1 = pi/2, the rest arbitrary (not exceeding it).
    Family1,
    /// alpha_N = pi/2, the rest arbitrary (not below it).
    Family2,
    /// Every angle in {0, pi/2, pi}, at least one equal to pi/2.
    Family3,
    NotOptimal,
}

/// Classify a schedule against the three optimal families within `tol`.
pub fn classify_theorem2(angles: &AngleSchedule, tol: f64) -> Theorem2Family {
    let a = angles.alphas();
    let n = a.len();
    if (a[0] - FRAC_PI_2).abs() <= tol {
        return Theorem2Family::Family1;
    }
    if (a[n - 1] - FRAC_PI_2).abs() <= tol {
        return Theorem2Family::Family2;
    }
    let axis = a.iter().all(|&x| {
        x.abs() <= tol || (x - FRAC_PI_2).abs() <= tol || (x - PI).abs() <= tol
    });
    if axis && a.iter().any(|&x| (x - FRAC_PI_2).abs() <= tol) {
        return Theorem2Family::Family3;
    }
    Theorem2Family::NotOptimal
}

/// Result of the exhaustive angle-grid check.
#[derive(Debug, Clone)]
pub struct GridCheck {
    pub max_value: f64,
    /// Every schedule the classifier places in a family attains 1/2.
    pub families_attain_optimum: bool,
    /// Schedules attaining 1/2 that fall in none of the three families.
    ///
    /// These exist: an adjacent pair of axis angles pi/2 apart (for example
    /// alpha_l = pi/2 followed by alpha_{l+1} = 0) makes its product factor
    /// cos(alpha_l +- alpha_{l+1}) vanish for both sign choices, pinning the
    /// value at 1/2 no matter what the remaining angles are. The published
    /// enumeration misses those because its sign construction needs
    /// cos(alpha_k + alpha_{k+1}) < 0 strictly.
    pub unclassified_optima: Vec<Vec<f64>>,
    pub schedules_checked: usize,
}

/// Brute-force oracle: sweep all nonincreasing angle schedules on a uniform
/// grid (step pi/steps_per_pi), confirm that no schedule beats 1/2 and that
/// the three families all attain it, and collect any optimal schedules the
/// classifier misses. Exponential; n <= 4.
pub fn maximin_grid_search(n: usize, steps_per_pi: usize) -> Result<GridCheck> {
    if n == 0 || n > 4 {
        return Err(LzError::InvalidInput("grid check supports 1 <= n <= 4".into()));
    }
    let levels = steps_per_pi + 1;
    let mut stack = vec![0usize; n];
    let mut max_value = f64::NEG_INFINITY;
    let mut families_attain = true;
    let mut unclassified = Vec::new();
    let mut checked = 0usize;

    // Iterate nonincreasing index tuples.
    loop {
        let mut alphas: Vec<f64> =
            stack.iter().map(|&i| PI * i as f64 / steps_per_pi as f64).collect();
        alphas.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let schedule = AngleSchedule::new(alphas)?;
        let value = maximin_evaluate(&schedule)?;
        checked += 1;
        if value > max_value {
            max_value = value;
        }
        let optimal = (value - 0.5).abs() <= 1e-9;
        let classified = classify_theorem2(&schedule, 1e-9) != Theorem2Family::NotOptimal;
        if classified && !optimal {
            families_attain = false;
        }
        if optimal && !classified {
            unclassified.push(schedule.alphas().to_vec());
        }

        // Advance to the next nonincreasing tuple.
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(GridCheck {
                    max_value,
                    families_attain_optimum: families_attain,
                    unclassified_optima: unclassified,
                    schedules_checked: checked,
                });
            }
            k -= 1;
            if stack[k] + 1 < levels && (k == 0 || stack[k] + 1 <= stack[k - 1]) {
                stack[k] += 1;
                for j in k + 1..n {
                    stack[j] = 0;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lz_core::{population_matrix, TimeInstant};
    use approx::assert_abs_diff_eq;

    #[test]
    fn tau_omega_values() {
        assert_eq!(tau_omega(0.0), (0.0, 0.0));
        let (tau, w) = tau_omega(1.0);
        assert_abs_diff_eq!(tau, 1.0 / 2.0_f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(w, (1.0 + 2.0_f64.sqrt()).ln() + 2.0_f64.sqrt(), epsilon = 1e-12);
        let (tau_m, w_m) = tau_omega(-1.0);
        assert_abs_diff_eq!(tau_m, -tau, epsilon = 1e-15);
        assert_abs_diff_eq!(w_m, -w, epsilon = 1e-12);
    }

    #[test]
    fn adiabatic_matrix_identity_and_stochasticity() {
        let c = Coupling::new(5.0).unwrap();
        let m = adiabatic_population_matrix(&c, 1.7, 1.7);
        assert_eq!(m.stay(), 1.0);
        let m = adiabatic_population_matrix(&c, -4.0, 9.0);
        for j in 0..2 {
            let row: f64 = (0..2).map(|k| m.entry(j, k)).sum();
            assert_abs_diff_eq!(row, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn adiabatic_matrix_error_shrinks_with_gamma() {
        let segment = (-1.0, 2.0); // in tau-time units
        let mut errs = Vec::new();
        for &g in &[5.0, 25.0] {
            let c = Coupling::new(g).unwrap();
            let scale = 2.0 * g.sqrt();
            let (a, b) = (segment.0 * scale, segment.1 * scale);
            let approx_m = adiabatic_population_matrix(&c, a, b);
            let exact =
                population_matrix(&c, TimeInstant::Finite(a), TimeInstant::Finite(b)).unwrap();
            errs.push((approx_m.stay() - exact.stay()).abs());
        }
        assert!(errs[1] < 0.05, "gamma=25 error {}", errs[1]);
        assert!(errs[1] < errs[0], "error did not shrink: {errs:?}");
    }

    #[test]
    fn eq18_special_cases() {
        let c = Coupling::new(5.0).unwrap();
        let one = MeasurementSchedule::new(c, vec![0.0]).unwrap();
        assert_abs_diff_eq!(adiabatic_probability(&c, &one).unwrap(), 0.5, epsilon = 1e-15);
        let far = MeasurementSchedule::new(c, vec![500.0]).unwrap();
        assert!(adiabatic_probability(&c, &far).unwrap() < 1e-3);
        // Collapsed pair equals the single-measurement value.
        let single = MeasurementSchedule::new(c, vec![0.7]).unwrap();
        let pair = MeasurementSchedule::new(c, vec![0.7, 0.7]).unwrap();
        assert_abs_diff_eq!(
            adiabatic_probability(&c, &single).unwrap(),
            adiabatic_probability(&c, &pair).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn eq18_mirror_invariance() {
        let c = Coupling::new(3.0).unwrap();
        let s = MeasurementSchedule::new(c, vec![-2.4, 0.3, 5.1]).unwrap();
        assert_abs_diff_eq!(
            adiabatic_probability(&c, &s).unwrap(),
            adiabatic_probability(&c, &s.mirror()).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn seed_layout() {
        let c = Coupling::new(5.0).unwrap();
        let seed = analytic_seed(&c, 1).unwrap();
        assert!(seed.schedule.instants()[0].abs() < 1e-12);

        let seed = analytic_seed(&c, 3).unwrap();
        let expect = 2.0 * 5.0_f64.sqrt();
        let inst = seed.schedule.instants();
        assert_abs_diff_eq!(inst[0], -expect, epsilon = 1e-9);
        assert_abs_diff_eq!(inst[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(inst[2], expect, epsilon = 1e-9);

        for n in [2usize, 5, 8] {
            let s = analytic_seed(&c, n).unwrap();
            let v = s.schedule.instants();
            for k in 0..n {
                assert_abs_diff_eq!(v[k] + v[n - 1 - k], 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn envelope_values() {
        assert_abs_diff_eq!(envelope_max(1), 0.5);
        assert_abs_diff_eq!(envelope_max(3), 0.625);
        for n in 0..=64 {
            assert_abs_diff_eq!(
                envelope_max(n),
                upper_bound(n, PI).unwrap(),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn envelope_from_equal_angle_product() {
        // Setting every oscillation factor to +1 at the equal-angle seed
        // reproduces the envelope algebraically.
        for n in [1usize, 3, 7] {
            let alphas: Vec<f64> = (1..=n).map(|l| PI - PI * l as f64 / (n + 1) as f64).collect();
            let taus: Vec<f64> = alphas.iter().map(|a| a.cos()).collect();
            let mut product = 1.0;
            for w in taus.windows(2) {
                product *= w[0] * w[1]
                    + ((1.0 - w[0] * w[0]) * (1.0 - w[1] * w[1])).max(0.0).sqrt();
            }
            let value = 0.5 * (1.0 - taus[0] * product * taus[n - 1]);
            assert_abs_diff_eq!(value, envelope_max(n), epsilon = 1e-12);
        }
    }

    #[test]
    fn boxes_disjoint_and_merged() {
        // Wide radii on close seeds: all three raw boxes overlap, so the run
        // is merged into one joint interval.
        let seeds = [-0.4, 0.0, 0.4];
        let radii = [2.0, 2.0, 2.0];
        let boxes = search_boxes(&seeds, &radii).unwrap();
        assert_eq!(boxes[0], boxes[1]);
        assert_eq!(boxes[1], boxes[2]);

        // Distant seeds keep their own boxes.
        let seeds = [-5.0, 0.0, 5.0];
        let radii = [1.0, 1.0, 1.0];
        let boxes = search_boxes(&seeds, &radii).unwrap();
        assert!(boxes[0].1 < boxes[1].0);
        assert!(boxes[1].1 < boxes[2].0);

        assert!(search_boxes(&seeds, &[1.0, -1.0, 1.0]).is_err());
        assert!(search_boxes(&seeds, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn maximin_examples() {
        let half = AngleSchedule::new(vec![FRAC_PI_2]).unwrap();
        assert_abs_diff_eq!(maximin_evaluate(&half).unwrap(), 0.5);

        let flat = AngleSchedule::new(vec![0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(maximin_evaluate(&flat).unwrap(), 0.0);

        // Adversary takes the "+" sign: product (-1/2)(-1)(1/2) = 1/4.
        let pair = AngleSchedule::new(vec![2.0 * PI / 3.0, PI / 3.0]).unwrap();
        assert_abs_diff_eq!(maximin_evaluate(&pair).unwrap(), 0.375, epsilon = 1e-12);

        assert!(maximin_evaluate(&AngleSchedule::new(vec![1.0; 21]).unwrap()).is_err());
    }

    #[test]
    fn maximin_solution_families() {
        for n in 1..=6 {
            let (value, canonical) = maximin_solve(n).unwrap();
            assert_eq!(value, 0.5);
            assert_abs_diff_eq!(maximin_evaluate(&canonical).unwrap(), 0.5);
            assert_ne!(classify_theorem2(&canonical, 1e-9), Theorem2Family::NotOptimal);
        }
        let f1 = AngleSchedule::new(vec![FRAC_PI_2, 0.3]).unwrap();
        assert_eq!(classify_theorem2(&f1, 1e-9), Theorem2Family::Family1);
        let f3 = AngleSchedule::new(vec![PI, FRAC_PI_2, 0.0]).unwrap();
        assert_eq!(classify_theorem2(&f3, 1e-9), Theorem2Family::Family3);
        let not = AngleSchedule::new(vec![2.0 * PI / 3.0, PI / 3.0]).unwrap();
        assert_eq!(classify_theorem2(&not, 1e-9), Theorem2Family::NotOptimal);
    }

    #[test]
    fn grid_check_small() {
        let check = maximin_grid_search(2, 12).unwrap();
        assert!(check.max_value <= 0.5 + 1e-9);
        assert!((check.max_value - 0.5).abs() <= 1e-12);
        assert!(check.families_attain_optimum);
        assert!(check.schedules_checked > 0);
        // For two angles the published families are complete.
        assert!(check.unclassified_optima.is_empty());
    }

    #[test]
    fn grid_check_finds_unlisted_optima_beyond_two_angles() {
        // An adjacent (pi/2, 0) pair pins the value at 1/2 with the leading
        // angle arbitrary; such schedules are in none of the three families.
        let witness = AngleSchedule::new(vec![7.0 * PI / 12.0, FRAC_PI_2, 0.0]).unwrap();
        assert_abs_diff_eq!(maximin_evaluate(&witness).unwrap(), 0.5);
        assert_eq!(classify_theorem2(&witness, 1e-9), Theorem2Family::NotOptimal);

        let check = maximin_grid_search(3, 12).unwrap();
        assert!(check.max_value <= 0.5 + 1e-9);
        assert!(check.families_attain_optimum);
        assert!(!check.unclassified_optima.is_empty());
    }
}
