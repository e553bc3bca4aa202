//! Minimal 2x2 complex matrix arithmetic used by the propagators.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ]);

    /// Off-diagonal permutation; maps diabatic basis order to the adiabatic
    /// (ground, excited) order at t = -inf, where |0> is the excited state.
    pub const SWAP: Mat2 = Mat2([
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    ]);

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn adjoint(&self) -> Mat2 {
        let a = &self.0;
        Mat2([
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ])
    }

    pub fn from_flat(y: [Complex64; 4]) -> Mat2 {
        Mat2([[y[0], y[1]], [y[2], y[3]]])
    }

    pub fn to_flat(self) -> [Complex64; 4] {
        [self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1]]
    }

    /// Average of |m00|^2 and |m11|^2; for an exact 2x2 unitary both moduli
    /// coincide, so this is the diagonal of the population matrix.
    pub fn stay_probability(&self) -> f64 {
        let p = 0.5 * (self.0[0][0].norm_sqr() + self.0[1][1].norm_sqr());
        p.clamp(0.0, 1.0)
    }
}
