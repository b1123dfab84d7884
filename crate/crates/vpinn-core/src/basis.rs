//! Test-function families and Legendre polynomial kernels.
//!
//! Two families span the discrete test space `V_K`:
//! * sine: `v_k(x) = sin(k pi x)`,
//! * Legendre composite: `v_k(x) = P_{k+1}(x) - P_{k-1}(x)`, which vanishes at
//!   `x = -1, 1` because `P_k(1) = 1` and `P_k(-1) = (-1)^k`.
//!
//! Legendre polynomials and their first two derivatives come from the
//! differentiated three-term recursion
//! `k P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2}`.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Largest admissible test index. The recursion stays well-behaved on
/// `[-1, 1]` but there is no use case beyond this.
pub const MAX_TEST_INDEX: usize = 200;

/// Evaluate `P_k(x)` with first and second derivatives by the differentiated
/// three-term recursion.
///
/// Endpoints use the exact values `P_k(1) = 1`, `P_k'(1) = k(k+1)/2`,
/// `P_k''(1) = (k-1)k(k+1)(k+2)/8` (mirrored with parity at `x = -1`) so the
/// composite test functions vanish at the boundary exactly, not just to
/// rounding.
pub fn legendre_eval(k: usize, x: f64) -> (f64, f64, f64) {
    if k == 0 {
        return (1.0, 0.0, 0.0);
    }
    if k == 1 {
        return (x, 1.0, 0.0);
    }
    if x == 1.0 || x == -1.0 {
        let kf = k as f64;
        let p = if x == 1.0 || k % 2 == 0 { 1.0 } else { -1.0 };
        let dsign = if x == 1.0 { p } else { -p };
        let d = dsign * kf * (kf + 1.0) / 2.0;
        let s = p * (kf - 1.0) * kf * (kf + 1.0) * (kf + 2.0) / 8.0;
        return (p, d, s);
    }
    // (p, p', p'') for degrees n-2 and n-1 while scanning up to k.
    let (mut pm2, mut dm2, mut sm2) = (1.0, 0.0, 0.0);
    let (mut pm1, mut dm1, mut sm1) = (x, 1.0, 0.0);
    for n in 2..=k {
        let a = (2 * n - 1) as f64 / n as f64;
        let b = (n - 1) as f64 / n as f64;
        let p = a * x * pm1 - b * pm2;
        let d = a * (pm1 + x * dm1) - b * dm2;
        let s = a * (2.0 * dm1 + x * sm1) - b * sm2;
        (pm2, dm2, sm2) = (pm1, dm1, sm1);
        (pm1, dm1, sm1) = (p, d, s);
    }
    (pm1, dm1, sm1)
}

/// Which family the test functions are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Sine,
    LegendreComposite,
}

/// A finite test-function family `{v_k, k = 1..=count}` on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestBasis {
    pub kind: BasisKind,
    pub count: usize,
}

/// Value with first and second derivative of a 1D test function.
pub type TestFnJet = (f64, f64, f64);

impl TestBasis {
    pub fn new(kind: BasisKind, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Config("test basis needs count >= 1".into()));
        }
        if count > MAX_TEST_INDEX {
            return Err(Error::Config(format!(
                "test count {count} exceeds cap {MAX_TEST_INDEX}"
            )));
        }
        Ok(Self { kind, count })
    }

    /// `(v_k, v_k', v_k'')` at `x` for `1 <= k <= count`.
    pub fn test_fn(&self, k: usize, x: f64) -> Result<TestFnJet> {
        if k == 0 || k > self.count {
            return Err(Error::Config(format!(
                "test index {k} out of range 1..={}",
                self.count
            )));
        }
        Ok(match self.kind {
            BasisKind::Sine => {
                let f = k as f64 * std::f64::consts::PI;
                let (s, c) = (f * x).sin_cos();
                (s, f * c, -f * f * s)
            }
            BasisKind::LegendreComposite => {
                let (pp, dp, sp) = legendre_eval(k + 1, x);
                let (pm, dm, sm) = legendre_eval(k - 1, x);
                (pp - pm, dp - dm, sp - sm)
            }
        })
    }

    /// Sample all `count` test functions at the given points.
    ///
    /// Returns `(V, V', V'')`, each of shape `count x points.len()`; row `k-1`
    /// holds `v_k` at every point. Assembly and training reuse these matrices
    /// across iterations.
    pub fn sample(&self, points: &[f64]) -> Result<(Array2<f64>, Array2<f64>, Array2<f64>)> {
        let n = points.len();
        let mut v = Array2::zeros((self.count, n));
        let mut dv = Array2::zeros((self.count, n));
        let mut d2v = Array2::zeros((self.count, n));
        for k in 1..=self.count {
            for (q, &x) in points.iter().enumerate() {
                let (a, b, c) = self.test_fn(k, x)?;
                v[[k - 1, q]] = a;
                dv[[k - 1, q]] = b;
                d2v[[k - 1, q]] = c;
            }
        }
        Ok((v, dv, d2v))
    }
}

/// Partial derivatives (up to second order per coordinate) of a tensor-product
/// test function `v(x, y) = phi_{kx}(x) phi_{ky}(y)`.
#[derive(Debug, Clone, Copy)]
pub struct TestFnJet2 {
    pub v: f64,
    pub vx: f64,
    pub vy: f64,
    pub vxx: f64,
    pub vyy: f64,
}

/// Tensor-product test function for the 2D problems.
pub fn test_fn_2d(
    basis_x: &TestBasis,
    basis_y: &TestBasis,
    (kx, ky): (usize, usize),
    (x, y): (f64, f64),
) -> Result<TestFnJet2> {
    let (fx, dfx, d2fx) = basis_x.test_fn(kx, x)?;
    let (fy, dfy, d2fy) = basis_y.test_fn(ky, y)?;
    Ok(TestFnJet2 {
        v: fx * fy,
        vx: dfx * fy,
        vy: fx * dfy,
        vxx: d2fx * fy,
        vyy: fx * d2fy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_low_orders() {
        assert_eq!(legendre_eval(0, 0.37), (1.0, 0.0, 0.0));
        let (p, d, s) = legendre_eval(1, -0.6);
        assert_eq!((p, d, s), (-0.6, 1.0, 0.0));
        // P_2(1) = 1
        let (p2, _, _) = legendre_eval(2, 1.0);
        assert_abs_diff_eq!(p2, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn legendre_degree_five_matches_explicit_polynomial() {
        // P_5(x) = (63 x^5 - 70 x^3 + 15 x) / 8
        let x = 0.3_f64;
        let p5 = (63.0 * x.powi(5) - 70.0 * x.powi(3) + 15.0 * x) / 8.0;
        let d5 = (315.0 * x.powi(4) - 210.0 * x.powi(2) + 15.0) / 8.0;
        let s5 = (1260.0 * x.powi(3) - 420.0 * x) / 8.0;
        let (p, d, s) = legendre_eval(5, x);
        assert_abs_diff_eq!(p, p5, epsilon = 1e-14);
        assert_abs_diff_eq!(d, d5, epsilon = 1e-13);
        assert_abs_diff_eq!(s, s5, epsilon = 1e-13);
    }

    #[test]
    fn legendre_endpoint_values() {
        for k in 0..=50 {
            let (p1, _, _) = legendre_eval(k, 1.0);
            let (pm1, _, _) = legendre_eval(k, -1.0);
            assert_abs_diff_eq!(p1, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(pm1, if k % 2 == 0 { 1.0 } else { -1.0 }, epsilon = 1e-12);
        }
    }

    #[test]
    fn composite_vanishes_at_boundary() {
        let basis = TestBasis::new(BasisKind::LegendreComposite, 30).unwrap();
        for k in 1..=30 {
            let (v_left, _, _) = basis.test_fn(k, -1.0).unwrap();
            let (v_right, _, _) = basis.test_fn(k, 1.0).unwrap();
            assert_eq!(v_left, 0.0, "v_{k}(-1) must vanish exactly");
            assert_eq!(v_right, 0.0, "v_{k}(1) must vanish exactly");
        }
    }

    #[test]
    fn composite_derivative_identity() {
        // v_k' = (2k+1) P_k
        let basis = TestBasis::new(BasisKind::LegendreComposite, 30).unwrap();
        for k in 1..=30 {
            for &x in &[-0.97, -0.5, 0.0, 0.123, 0.5, 0.88] {
                let (_, dv, _) = basis.test_fn(k, x).unwrap();
                let (p, _, _) = legendre_eval(k, x);
                assert_abs_diff_eq!(dv, (2 * k + 1) as f64 * p, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sine_test_values() {
        let basis = TestBasis::new(BasisKind::Sine, 5).unwrap();
        let (v, dv, d2v) = basis.test_fn(2, 0.25).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dv, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d2v, -4.0 * std::f64::consts::PI.powi(2), epsilon = 1e-12);
        // sin(k pi x) vanishes at the endpoints automatically
        let (v1, _, _) = basis.test_fn(3, 1.0).unwrap();
        assert_abs_diff_eq!(v1, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn index_and_cap_errors() {
        let basis = TestBasis::new(BasisKind::Sine, 4).unwrap();
        assert!(basis.test_fn(0, 0.0).is_err());
        assert!(basis.test_fn(5, 0.0).is_err());
        assert!(TestBasis::new(BasisKind::Sine, 0).is_err());
        assert!(TestBasis::new(BasisKind::LegendreComposite, 201).is_err());
    }

    #[test]
    fn tensor_product_values() {
        let bx = TestBasis::new(BasisKind::LegendreComposite, 4).unwrap();
        let by = TestBasis::new(BasisKind::LegendreComposite, 4).unwrap();
        // boundary in x kills the product
        let j = test_fn_2d(&bx, &by, (2, 3), (1.0, 0.3)).unwrap();
        assert_eq!(j.v, 0.0);
        // (kx, ky) = (1, 1) at the origin: (P_2(0) - P_0(0))^2 = (-1/2 - 1)^2
        let j = test_fn_2d(&bx, &by, (1, 1), (0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(j.v, 2.25, epsilon = 1e-14);
        // product rule for the x-partial at an interior point
        let (x, y) = (0.37, -0.21);
        let j = test_fn_2d(&bx, &by, (2, 4), (x, y)).unwrap();
        let (_, dfx, _) = bx.test_fn(2, x).unwrap();
        let (fy, _, _) = by.test_fn(4, y).unwrap();
        assert_abs_diff_eq!(j.vx, dfx * fy, epsilon = 1e-14);
    }
}
