//! Precomputed chi-frame propagators on a uniform time grid.
//!
//! One adaptive sweep of the matrix equation X' = A(t) X across
//! [-span, span] (span covering both the requested extent and the truncation
//! horizon) yields X(t) = X(t, -span) at every grid node. Any segment
//! propagator then follows by composition, U(t1, t0) = D(t1) D(t0)^dag with
//! D(t) = C(t) X(t), and the infinite-time boundaries come from the sweep
//! endpoints. Between nodes X is recovered by cubic Hermite interpolation;
//! X itself varies on the slow scale 1/beta', and its exact derivative
//! A(t) X(t) is available in closed form, so the interpolation error stays
//! near 1e-9 even where the driving phase is fast.

use super::frame;
use super::mat::Mat2;
use super::ode;
use crate::error::{LzError, Result};
use crate::lz_core::Coupling;

#[derive(Debug, Clone)]
pub struct EvolutionTable {
    coupling: Coupling,
    step: f64,
    /// Nodes cover [-extent, extent] at `t_i = (i - n_half) * step`.
    n_half: i64,
    nodes: Vec<Mat2>,
    /// D(t_i) = C(t_i) X(t_i), the diabatic-frame propagator from the sweep start.
    d_nodes: Vec<Mat2>,
    /// Stay probabilities of the boundary segments (-inf, t_i) and (t_i, +inf).
    stay_minus: Vec<f64>,
    stay_plus: Vec<f64>,
    /// X at the positive sweep endpoint (the +inf readout).
    x_end: Mat2,
    lz_stay: f64,
}

impl EvolutionTable {
    /// Sweep the chi-frame propagator for `coupling`, storing dense nodes on
    /// [-extent, extent] with the given step. Requires gamma > 0.
    pub fn build(coupling: &Coupling, extent: f64, step: f64) -> Result<Self> {
        let gamma = coupling.gamma();
        if gamma <= 0.0 {
            return Err(LzError::InvalidInput(
                "evolution table requires gamma > 0".into(),
            ));
        }
        if !(extent.is_finite() && extent > 0.0 && step.is_finite() && step > 0.0) {
            return Err(LzError::InvalidInput(format!(
                "invalid table range: extent {extent}, step {step}"
            )));
        }
        let n_half = (extent / step - 1e-9).ceil().max(1.0) as i64;
        if n_half > 5_000_000 {
            return Err(LzError::InvalidInput(format!(
                "table would need {} nodes; refine extent/step",
                2 * n_half + 1
            )));
        }
        let span_k = n_half.max((frame::horizon(gamma) / step).ceil() as i64);
        let span = span_k as f64 * step;

        let count = (2 * n_half + 1) as usize;
        let mut nodes = vec![Mat2::IDENTITY; count];
        let stops: Vec<f64> = (0..count).map(|i| (i as i64 - n_half) as f64 * step).collect();

        let mut next = 0usize;
        if span_k == n_half {
            // The first node coincides with the sweep start, where X = I.
            next = 1;
        }
        let rhs = frame::chi_matrix_rhs(gamma);
        let y_end = ode::integrate(
            &rhs,
            -span,
            span,
            Mat2::IDENTITY.to_flat(),
            ode::Tolerances::default(),
            &stops[next..],
            |t, y| {
                if next < count && (t - stops[next]).abs() < 1e-9 {
                    nodes[next] = Mat2::from_flat(*y);
                    next += 1;
                }
            },
        )?;
        debug_assert_eq!(next, count, "sweep missed grid nodes");
        let x_end = Mat2::from_flat(y_end);

        let d_nodes: Vec<Mat2> = crate::par::map_indexed(count, |i| {
            frame::chi_to_diabatic(gamma, stops[i]).mul(&nodes[i])
        });
        let stay_minus: Vec<f64> =
            d_nodes.iter().map(|d| d.mul(&Mat2::SWAP).stay_probability()).collect();
        let stay_plus: Vec<f64> =
            d_nodes.iter().map(|d| x_end.mul(&d.adjoint()).stay_probability()).collect();
        let lz_stay = x_end.mul(&Mat2::SWAP).stay_probability();

        Ok(Self {
            coupling: *coupling,
            step,
            n_half,
            nodes,
            d_nodes,
            stay_minus,
            stay_plus,
            x_end,
            lz_stay,
        })
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn extent(&self) -> f64 {
        self.n_half as f64 * self.step
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_time(&self, i: usize) -> f64 {
        (i as i64 - self.n_half) as f64 * self.step
    }

    /// Index of the node at or just below `t` (clamped to the table range).
    pub fn node_at_or_below(&self, t: f64) -> usize {
        let idx = ((t / self.step).floor() as i64 + self.n_half).clamp(0, 2 * self.n_half);
        idx as usize
    }

    /// Full-line stay probability |u00(+inf, -inf)|^2.
    pub fn lz_stay(&self) -> f64 {
        self.lz_stay
    }

    /// Stay probability of the segment between two grid nodes, i <= j.
    pub fn node_stay_between(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 1.0;
        }
        let r0 = &self.d_nodes[i].0[0];
        let r1 = &self.d_nodes[j].0[0];
        let u00 = r1[0] * r0[0].conj() + r1[1] * r0[1].conj();
        u00.norm_sqr().clamp(0.0, 1.0)
    }

    pub fn node_stay_from_minus_inf(&self, i: usize) -> f64 {
        self.stay_minus[i]
    }

    pub fn node_stay_to_plus_inf(&self, i: usize) -> f64 {
        self.stay_plus[i]
    }

    /// X(t) by cubic Hermite interpolation between nodes, with exact endpoint
    /// derivatives A(t) X(t). Times outside the dense range are clamped.
    fn x_at(&self, t: f64) -> Mat2 {
        let extent = self.extent();
        let t = t.clamp(-extent, extent);
        let pos = t / self.step + self.n_half as f64;
        let mut cell = pos.floor() as i64;
        cell = cell.clamp(0, 2 * self.n_half - 1);
        let i = cell as usize;
        let t0 = self.node_time(i);
        let t1 = self.node_time(i + 1);
        if t == t0 {
            return self.nodes[i];
        }
        if t == t1 {
            return self.nodes[i + 1];
        }
        let h = t1 - t0;
        let s = (t - t0) / h;
        let gamma = self.coupling.gamma();
        let rhs = frame::chi_matrix_rhs(gamma);
        let dx0 = Mat2::from_flat(rhs(t0, &self.nodes[i].to_flat()));
        let dx1 = Mat2::from_flat(rhs(t1, &self.nodes[i + 1].to_flat()));
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = Mat2::IDENTITY;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = h00 * self.nodes[i].0[r][c]
                    + (h10 * h) * dx0.0[r][c]
                    + h01 * self.nodes[i + 1].0[r][c]
                    + (h11 * h) * dx1.0[r][c];
            }
        }
        out
    }

    fn d_at(&self, t: f64) -> Mat2 {
        let extent = self.extent();
        let tc = t.clamp(-extent, extent);
        frame::chi_to_diabatic(self.coupling.gamma(), tc).mul(&self.x_at(tc))
    }

    /// Stay probability of the finite segment (t0, t1), arbitrary times.
    pub fn stay_between(&self, t0: f64, t1: f64) -> f64 {
        if t0 == t1 {
            return 1.0;
        }
        let d0 = self.d_at(t0);
        let d1 = self.d_at(t1);
        d1.mul(&d0.adjoint()).stay_probability()
    }

    /// Stay probability of the boundary segment (-inf, t).
    pub fn stay_from_minus_inf(&self, t: f64) -> f64 {
        self.d_at(t).mul(&Mat2::SWAP).stay_probability()
    }

    /// Stay probability of the boundary segment (t, +inf).
    pub fn stay_to_plus_inf(&self, t: f64) -> f64 {
        self.x_end.mul(&self.d_at(t).adjoint()).stay_probability()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lz_core::{lz_probability, population_matrix, TimeInstant};
    use approx::assert_abs_diff_eq;

    fn table(gamma: f64) -> EvolutionTable {
        EvolutionTable::build(&Coupling::new(gamma).unwrap(), 8.0, 0.01).unwrap()
    }

    #[test]
    fn rejects_zero_gamma() {
        assert!(EvolutionTable::build(&Coupling::new(0.0).unwrap(), 10.0, 0.01).is_err());
    }

    #[test]
    fn full_line_matches_closed_form() {
        for &g in &[0.1, 1.0, 5.0] {
            let t = table(g);
            assert_abs_diff_eq!(t.lz_stay(), lz_probability(t.coupling()), epsilon = 1e-4);
        }
    }

    #[test]
    fn segment_matches_direct_solve() {
        let t = table(0.8);
        let c = Coupling::new(0.8).unwrap();
        for (a, b) in [(-3.0, 2.0), (-6.5, -1.25), (0.013, 5.987)] {
            let direct =
                population_matrix(&c, TimeInstant::Finite(a), TimeInstant::Finite(b)).unwrap();
            assert_abs_diff_eq!(t.stay_between(a, b), direct.stay(), epsilon = 1e-7);
        }
    }

    #[test]
    fn off_grid_interpolation_is_tight() {
        let t = table(2.0);
        let c = Coupling::new(2.0).unwrap();
        for (a, b) in [(-2.4637, 1.9113), (-0.005, 0.0049), (3.3339, 7.7771)] {
            let direct =
                population_matrix(&c, TimeInstant::Finite(a), TimeInstant::Finite(b)).unwrap();
            assert_abs_diff_eq!(t.stay_between(a, b), direct.stay(), epsilon = 1e-7);
        }
    }

    #[test]
    fn boundary_segments_match_population_matrix() {
        let g = 1.0;
        let t = table(g);
        let c = Coupling::new(g).unwrap();
        for &v in &[-4.0, 0.0, 2.5] {
            let minus =
                population_matrix(&c, TimeInstant::NegInfinity, TimeInstant::Finite(v)).unwrap();
            let plus =
                population_matrix(&c, TimeInstant::Finite(v), TimeInstant::PosInfinity).unwrap();
            assert_abs_diff_eq!(t.stay_from_minus_inf(v), minus.stay(), epsilon = 1e-6);
            assert_abs_diff_eq!(t.stay_to_plus_inf(v), plus.stay(), epsilon = 1e-6);
        }
    }

    #[test]
    fn node_queries_match_continuous_queries() {
        let t = table(0.5);
        let i = t.node_at_or_below(-2.0);
        let j = t.node_at_or_below(3.0);
        let (ti, tj) = (t.node_time(i), t.node_time(j));
        assert_abs_diff_eq!(t.node_stay_between(i, j), t.stay_between(ti, tj), epsilon = 1e-9);
        assert_abs_diff_eq!(
            t.node_stay_from_minus_inf(i),
            t.stay_from_minus_inf(ti),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(t.node_stay_to_plus_inf(j), t.stay_to_plus_inf(tj), epsilon = 1e-12);
    }
}
