//! Closed-form (quadrature-free) variational residuals for shallow sine
//! networks `u(x) = sum_j a_j sin(w_j x + theta_j)` on `(-1, 1)`.
//!
//! Against sine test functions `v_k = sin(k pi x)` the residuals collapse to
//! rational-trigonometric expressions in `(a_j, w_j, theta_j)`:
//!
//! ```text
//! R(1)_k = R(2)_k = 2(-1)^k k pi sum_j a_j w_j^2 cos(theta_j) sin(w_j) / (w_j^2 - k^2 pi^2)
//! R(3)_k = 2(-1)^k k pi [ (h-g)/2 + k^2 pi^2 sum_j a_j cos(theta_j) sin(w_j) / (w_j^2 - k^2 pi^2) ]
//! ```
//!
//! plus a double sum for the Burgers nonlinearity and a projection variant.
//! Against Legendre composites `v_k = P_{k+1} - P_{k-1}` everything reduces to
//! the oscillatory moments `I_k(w) = int_-1^1 e^{iwx} P_k(x) dx` and their
//! phase-rotated parts `B_k = Re{e^{i theta} I_k}`, `C_k = Im{e^{i theta} I_k}`.
//!
//! `I_k` satisfies `I_k = i (2k-1)/w I_{k-1} + I_{k-2}`, which is the
//! spherical Bessel recurrence in disguise (`I_k = 2 i^k j_k(w)`). Running it
//! forward is unstable once `k` exceeds `|w|` (absolute errors grow by
//! `(2k-1)/|w|` per step), so `j_k` is evaluated forward only up to `k ~ |w|`
//! and by the normalized backward (Miller) recurrence beyond, with a power
//! series below `|w| = 1e-3` where the seeds themselves cancel
//! catastrophically. Every exported value is pinned to the defining integral
//! by quadrature in the tests.
//!
//! Denominators `w_j^2 - k^2 pi^2` (and the Burgers pair variants) are
//! guarded: within [`EPS_SINGULAR`] of zero the functions return
//! [`Error::SingularFrequency`] instead of evaluating the removable limit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::net::{Activation, DeepNetParams, EvalJet, JetField, Layer};

pub const EPS_SINGULAR: f64 = 1e-6;
pub const SMALL_W: f64 = 1e-3;
const PI: f64 = std::f64::consts::PI;

/// One-hidden-layer sine network: output weights, frequencies, phases.
#[derive(Debug, Clone, PartialEq)]
pub struct ShallowNetParams {
    pub a: Vec<f64>,
    pub w: Vec<f64>,
    pub theta: Vec<f64>,
}

/// Dirichlet data: `u(-1) = g`, `u(1) = h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub g: f64,
    pub h: f64,
}

/// Gradient of a scalar with respect to every shallow parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ShallowGrad {
    pub a: Vec<f64>,
    pub w: Vec<f64>,
    pub theta: Vec<f64>,
}

impl ShallowGrad {
    pub fn zeros(n: usize) -> Self {
        Self {
            a: vec![0.0; n],
            w: vec![0.0; n],
            theta: vec![0.0; n],
        }
    }

    /// `self += s * other`, used when accumulating loss gradients.
    pub fn add_scaled(&mut self, s: f64, other: &ShallowGrad) {
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            *x += s * y;
        }
        for (x, y) in self.w.iter_mut().zip(&other.w) {
            *x += s * y;
        }
        for (x, y) in self.theta.iter_mut().zip(&other.theta) {
            *x += s * y;
        }
    }
}

impl ShallowNetParams {
    pub fn new(a: Vec<f64>, w: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        let net = Self { a, w, theta };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.len();
        if n == 0 || self.w.len() != n || self.theta.len() != n {
            return Err(Error::Config(format!(
                "shallow net lengths (a, w, theta) = ({}, {}, {}) must match and be nonzero",
                self.a.len(),
                self.w.len(),
                self.theta.len()
            )));
        }
        if self
            .a
            .iter()
            .chain(&self.w)
            .chain(&self.theta)
            .any(|v| !v.is_finite())
        {
            return Err(Error::Config("non-finite shallow parameter".into()));
        }
        Ok(())
    }

    pub fn neurons(&self) -> usize {
        self.a.len()
    }

    /// The same network as a depth-1 [`DeepNetParams`], for cross-checks.
    pub fn to_deep(&self) -> DeepNetParams {
        let n = self.neurons();
        DeepNetParams {
            input_dim: 1,
            layers: vec![Layer {
                weights: ndarray::Array2::from_shape_vec((n, 1), self.w.clone()).unwrap(),
                biases: ndarray::Array1::from_vec(self.theta.clone()),
            }],
            output: ndarray::Array1::from_vec(self.a.clone()),
            activation: Activation::Sine,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.a
            .iter()
            .zip(&self.w)
            .zip(&self.theta)
            .map(|((&a, &w), &t)| a * (w * x + t).sin())
            .sum()
    }
}

impl JetField for ShallowNetParams {
    fn dim(&self) -> usize {
        1
    }

    fn eval_jet_at(&self, x: &[f64]) -> EvalJet {
        let x = x[0];
        let (mut u, mut ux, mut uxx) = (0.0, 0.0, 0.0);
        for ((&a, &w), &t) in self.a.iter().zip(&self.w).zip(&self.theta) {
            let (s, c) = (w * x + t).sin_cos();
            u += a * s;
            ux += a * w * c;
            uxx -= a * w * w * s;
        }
        EvalJet {
            dim: 1,
            point: [x, 0.0],
            value: u,
            grad: [ux, 0.0],
            diag2: [uxx, 0.0],
        }
    }
}

fn check_test_index(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Config("test index k must be >= 1".into()));
    }
    Ok(k as f64 * PI)
}

fn denom(w: f64, kpi: f64, neuron: usize, k: usize) -> Result<f64> {
    let d = w * w - kpi * kpi;
    if d.abs() <= EPS_SINGULAR {
        return Err(Error::SingularFrequency {
            neuron,
            test_index: k,
        });
    }
    Ok(d)
}

fn sign_k(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `R(1)_k = R(2)_k` for the sine test basis (the two integration-by-parts
/// routes share one expression).
pub fn residual_sine_r12(net: &ShallowNetParams, k: usize) -> Result<f64> {
    net.validate()?;
    let kpi = check_test_index(k)?;
    let c = 2.0 * sign_k(k) * kpi;
    let mut sum = 0.0;
    for j in 0..net.neurons() {
        let (a, w, t) = (net.a[j], net.w[j], net.theta[j]);
        sum += a * w * w * t.cos() * w.sin() / denom(w, kpi, j, k)?;
    }
    Ok(c * sum)
}

pub fn grad_residual_sine_r12(net: &ShallowNetParams, k: usize) -> Result<ShallowGrad> {
    net.validate()?;
    let kpi = check_test_index(k)?;
    let c = 2.0 * sign_k(k) * kpi;
    let mut g = ShallowGrad::zeros(net.neurons());
    for j in 0..net.neurons() {
        let (a, w, t) = (net.a[j], net.w[j], net.theta[j]);
        let d = denom(w, kpi, j, k)?;
        let (sw, cw) = w.sin_cos();
        g.a[j] = c * w * w * t.cos() * sw / d;
        g.theta[j] = -c * a * w * w * t.sin() * sw / d;
        // d/dw [w^2 sin w / (w^2 - kpi^2)]
        let dw = (w * w * d * cw - 2.0 * w * kpi * kpi * sw) / (d * d);
        g.w[j] = c * a * t.cos() * dw;
    }
    Ok(g)
}

/// `R(3)_k` for the sine test basis; the boundary derivative term carries the
/// exact Dirichlet data, hence the `(h - g)` contribution.
pub fn residual_sine_r3(net: &ShallowNetParams, k: usize, bc: BoundaryData) -> Result<f64> {
    net.validate()?;
    let kpi = check_test_index(k)?;
    let c = 2.0 * sign_k(k) * kpi;
    let mut sum = 0.0;
    for j in 0..net.neurons() {
        let (a, w, t) = (net.a[j], net.w[j], net.theta[j]);
        sum += a * t.cos() * w.sin() / denom(w, kpi, j, k)?;
    }
    Ok(c * ((bc.h - bc.g) / 2.0 + kpi * kpi * sum))
}

pub fn grad_residual_sine_r3(net: &ShallowNetParams, k: usize) -> Result<ShallowGrad> {
    net.validate()?;
    let kpi = check_test_index(k)?;
    let c = 2.0 * sign_k(k) * kpi * kpi * kpi;
    let mut g = ShallowGrad::zeros(net.neurons());
    for j in 0..net.neurons() {
        let (a, w, t) = (net.a[j], net.w[j], net.theta[j]);
        let d = denom(w, kpi, j, k)?;
        let (sw, cw) = w.sin_cos();
        g.a[j] = c * t.cos() * sw / d;
        g.theta[j] = -c * a * t.sin() * sw / d;
        g.w[j] = c * a * t.cos() * (cw * d - 2.0 * w * sw) / (d * d);
    }
    Ok(g)
}

/// Projection residual `(u_NN, v_k)` for the sine test basis.
pub fn residual_projection(net: &ShallowNetParams, k: usize) -> Result<f64> {
    net.validate()?;
    let kpi = check_test_index(k)?;
    let c = 2.0 * sign_k(k) * kpi;
    let mut sum = 0.0;
    for j in 0..net.neurons() {
        let (a, w, t) = (net.a[j], net.w[j], net.theta[j]);
        sum += a * t.cos() * w.sin() / denom(w, kpi, j, k)?;
    }
    Ok(c * sum)
}

pub fn grad_residual_projection(net: &ShallowNetParams, k: usize) -> Result<ShallowGrad> {
    net.validate()?;
    let kpi = check_test_index(k)?;
    let c = 2.0 * sign_k(k) * kpi;
    let mut g = ShallowGrad::zeros(net.neurons());
    for j in 0..net.neurons() {
        let (a, w, t) = (net.a[j], net.w[j], net.theta[j]);
        let d = denom(w, kpi, j, k)?;
        let (sw, cw) = w.sin_cos();
        g.a[j] = c * t.cos() * sw / d;
        g.theta[j] = -c * a * t.sin() * sw / d;
        g.w[j] = c * a * t.cos() * (cw * d - 2.0 * w * sw) / (d * d);
    }
    Ok(g)
}

fn burgers_denom(s: f64, kpi: f64, neuron: usize, k: usize) -> Result<f64> {
    let d = s * s - kpi * kpi;
    if d.abs() <= EPS_SINGULAR {
        return Err(Error::SingularFrequency {
            neuron,
            test_index: k,
        });
    }
    Ok(d)
}

/// Nonlinear Burgers term `(u_NN u_NN', v_k)` for the sine test basis.
///
/// On the pair diagonal `i = j` the difference term has `sin(w_j - w_i) = 0`
/// over the finite denominator `-k^2 pi^2`, so it contributes exactly zero;
/// only off-diagonal pairs can come near a resonance.
pub fn residual_burgers_nl(net: &ShallowNetParams, k: usize) -> Result<f64> {
    net.validate()?;
    let kpi = check_test_index(k)?;
    let n = net.neurons();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let splus = net.w[j] + net.w[i];
            let sminus = net.w[j] - net.w[i];
            let dplus = burgers_denom(splus, kpi, i.max(j), k)?;
            let dminus = burgers_denom(sminus, kpi, i.max(j), k)?;
            let tplus = splus.sin() * (net.theta[j] + net.theta[i]).cos() / dplus;
            let tminus = sminus.sin() * (net.theta[j] - net.theta[i]).cos() / dminus;
            sum += net.a[i] * net.a[j] * net.w[i] * (tplus + tminus);
        }
    }
    Ok(sign_k(k) * kpi * sum)
}

pub fn grad_residual_burgers_nl(net: &ShallowNetParams, k: usize) -> Result<ShallowGrad> {
    net.validate()?;
    let kpi = check_test_index(k)?;
    let n = net.neurons();
    let pref = sign_k(k) * kpi;
    let mut g = ShallowGrad::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let (ai, aj, wi) = (net.a[i], net.a[j], net.w[i]);
            let splus = net.w[j] + wi;
            let sminus = net.w[j] - wi;
            let phiplus = net.theta[j] + net.theta[i];
            let phiminus = net.theta[j] - net.theta[i];
            let dplus = burgers_denom(splus, kpi, i.max(j), k)?;
            let dminus = burgers_denom(sminus, kpi, i.max(j), k)?;
            let tplus = splus.sin() * phiplus.cos() / dplus;
            let tminus = sminus.sin() * phiminus.cos() / dminus;
            // d/ds [sin(s) cos(phi) / (s^2 - kpi^2)]
            let ds_plus = phiplus.cos() * (splus.cos() * dplus - 2.0 * splus * splus.sin())
                / (dplus * dplus);
            let ds_minus = phiminus.cos() * (sminus.cos() * dminus - 2.0 * sminus * sminus.sin())
                / (dminus * dminus);
            let dphi_plus = -splus.sin() * phiplus.sin() / dplus;
            let dphi_minus = -sminus.sin() * phiminus.sin() / dminus;

            let t = tplus + tminus;
            g.a[i] += pref * aj * wi * t;
            g.a[j] += pref * ai * wi * t;
            g.w[i] += pref * ai * aj * (t + wi * (ds_plus - ds_minus));
            g.w[j] += pref * ai * aj * wi * (ds_plus + ds_minus);
            g.theta[i] += pref * ai * aj * wi * (dphi_plus - dphi_minus);
            g.theta[j] += pref * ai * aj * wi * (dphi_plus + dphi_minus);
        }
    }
    Ok(g)
}

/// `int_-1^1 sin(b x) sin(k pi x) dx = 2 (-1)^k k pi sin(b) / (b^2 - k^2 pi^2)`;
/// the analytic force-vector path for sinusoidal forcings.
pub fn sine_sine_integral(b: f64, k: usize) -> Result<f64> {
    let kpi = check_test_index(k)?;
    let d = b * b - kpi * kpi;
    if d.abs() <= EPS_SINGULAR {
        return Err(Error::SingularFrequency {
            neuron: 0,
            test_index: k,
        });
    }
    Ok(2.0 * sign_k(k) * kpi * b.sin() / d)
}

// ---------------------------------------------------------------------------
// Oscillatory Legendre moments I_k, B_k, C_k
// ---------------------------------------------------------------------------

/// Spherical Bessel functions `j_0(w) .. j_{n_max}(w)`.
///
/// Regimes: power series for `|w| < SMALL_W`; forward recurrence while
/// `k <= |w|` (both solutions are O(1) there); normalized backward recurrence
/// for everything above, started 50 orders past `max(n_max, |w|)` so the
/// contaminating solution decays below 1e-30 before reaching the requested
/// range.
pub fn spherical_bessel_j_seq(n_max: usize, w: f64) -> Vec<f64> {
    let aw = w.abs();
    let mut j = if aw < SMALL_W {
        series_j_seq(n_max, aw)
    } else if (n_max as f64) <= aw {
        forward_j_seq(n_max, aw)
    } else {
        miller_j_seq(n_max, aw)
    };
    if w < 0.0 {
        for (k, v) in j.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    j
}

fn series_j_seq(n_max: usize, w: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    for k in 0..=n_max {
        // leading coefficient w^k / (2k+1)!! as an underflow-safe product
        let mut term = 1.0;
        for i in 1..=k {
            term *= w / (2 * i + 1) as f64;
        }
        let mut sum = term;
        for t in 0..5 {
            term *= -w * w / (2.0 * (t as f64 + 1.0) * (2 * k + 2 * t + 3) as f64);
            sum += term;
        }
        out.push(sum);
    }
    out
}

fn forward_j_seq(n_max: usize, w: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let (sw, cw) = w.sin_cos();
    out.push(sw / w);
    if n_max >= 1 {
        out.push(sw / (w * w) - cw / w);
    }
    for k in 1..n_max {
        let next = (2 * k + 1) as f64 / w * out[k] - out[k - 1];
        out.push(next);
    }
    out
}

fn miller_j_seq(n_max: usize, w: f64) -> Vec<f64> {
    let start = n_max.max(w.ceil() as usize) + 50;
    let mut out = vec![0.0; n_max + 1];
    let mut upper = 0.0_f64; // j_{k+1} (unnormalized)
    let mut here = 1e-280_f64; // j_k
    for k in (0..=start).rev() {
        if k <= n_max {
            out[k] = here;
        }
        let lower = (2 * k + 1) as f64 / w * here - upper;
        upper = here;
        here = lower;
        if here.abs() > 1e250 {
            let scale = 1e-250;
            here *= scale;
            upper *= scale;
            for v in out.iter_mut() {
                *v *= scale;
            }
        }
    }
    // `here` now holds the unnormalized j_{-1} = cos(w)/w companion; normalize
    // against whichever closed-form seed is better conditioned.
    let (sw, cw) = w.sin_cos();
    let j0 = sw / w;
    let j1 = sw / (w * w) - cw / w;
    let scale = if n_max >= 1 && out[1].abs() > out[0].abs() {
        j1 / out[1]
    } else {
        j0 / out[0]
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

/// The moments `I_k(w) = int e^{iwx} P_k(x) dx`, `k = 0..=k_max`, with their
/// phase rotations `B_k = Re{e^{i theta} I_k}` and `C_k = Im{e^{i theta} I_k}`.
#[derive(Debug, Clone)]
pub struct RecursionState {
    pub w: f64,
    pub theta: f64,
    pub i_k: Vec<Complex64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

/// Build the moment table via `I_k = 2 i^k j_k(w)`.
pub fn recursion_ibc(w: f64, theta: f64, k_max: usize) -> Result<RecursionState> {
    if k_max > crate::basis::MAX_TEST_INDEX + 2 {
        return Err(Error::Config(format!(
            "recursion order {k_max} exceeds cap {}",
            crate::basis::MAX_TEST_INDEX + 2
        )));
    }
    let j = spherical_bessel_j_seq(k_max, w);
    let phase = Complex64::new(theta.cos(), theta.sin());
    let mut i_k = Vec::with_capacity(k_max + 1);
    let mut b = Vec::with_capacity(k_max + 1);
    let mut c = Vec::with_capacity(k_max + 1);
    for (k, &jk) in j.iter().enumerate() {
        let ipow = match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let ik = ipow * 2.0 * jk;
        let rot = phase * ik;
        i_k.push(ik);
        b.push(rot.re);
        c.push(rot.im);
    }
    Ok(RecursionState {
        w,
        theta,
        i_k,
        b,
        c,
    })
}

/// `dI_k/dw = i [(k+1) I_{k+1} + k I_{k-1}] / (2k+1)`, from
/// `x P_k = ((k+1) P_{k+1} + k P_{k-1}) / (2k+1)` under the integral sign.
fn didw(state: &RecursionState, k: usize) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let lower = if k == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        k as f64 * state.i_k[k - 1]
    };
    i * ((k + 1) as f64 * state.i_k[k + 1] + lower) / (2 * k + 1) as f64
}

fn rotated(state: &RecursionState, z: Complex64) -> (f64, f64) {
    let phase = Complex64::new(state.theta.cos(), state.theta.sin());
    let r = phase * z;
    (r.re, r.im)
}

/// `R(1)_k` for Legendre composite tests:
/// `sum_j a_j w_j^2 (C_{k+1} - C_{k-1})`.
pub fn residual_legendre_r1(net: &ShallowNetParams, k: usize) -> Result<f64> {
    net.validate()?;
    check_test_index(k)?;
    let mut sum = 0.0;
    for j in 0..net.neurons() {
        let state = recursion_ibc(net.w[j], net.theta[j], k + 1)?;
        sum += net.a[j] * net.w[j] * net.w[j] * (state.c[k + 1] - state.c[k - 1]);
    }
    Ok(sum)
}

pub fn grad_residual_legendre_r1(net: &ShallowNetParams, k: usize) -> Result<ShallowGrad> {
    net.validate()?;
    check_test_index(k)?;
    let mut g = ShallowGrad::zeros(net.neurons());
    for j in 0..net.neurons() {
        let (a, w) = (net.a[j], net.w[j]);
        let state = recursion_ibc(w, net.theta[j], k + 2)?;
        let dc = state.c[k + 1] - state.c[k - 1];
        let db = state.b[k + 1] - state.b[k - 1];
        let (_, dcp_dw) = rotated(&state, didw(&state, k + 1));
        let (_, dcm_dw) = rotated(&state, didw(&state, k - 1));
        g.a[j] = w * w * dc;
        g.theta[j] = a * w * w * db;
        g.w[j] = a * (2.0 * w * dc + w * w * (dcp_dw - dcm_dw));
    }
    Ok(g)
}

/// `R(2)_k` for Legendre composite tests: `(2k+1) sum_j a_j w_j B_k`.
///
/// (`B_k`, not `B_{k+1}`: `v_k' = (2k+1) P_k` pairs the derivative of the
/// composite with the k-th moment, which the quadrature oracle confirms.)
pub fn residual_legendre_r2(net: &ShallowNetParams, k: usize) -> Result<f64> {
    net.validate()?;
    check_test_index(k)?;
    let mut sum = 0.0;
    for j in 0..net.neurons() {
        let state = recursion_ibc(net.w[j], net.theta[j], k)?;
        sum += net.a[j] * net.w[j] * state.b[k];
    }
    Ok((2 * k + 1) as f64 * sum)
}

pub fn grad_residual_legendre_r2(net: &ShallowNetParams, k: usize) -> Result<ShallowGrad> {
    net.validate()?;
    check_test_index(k)?;
    let factor = (2 * k + 1) as f64;
    let mut g = ShallowGrad::zeros(net.neurons());
    for j in 0..net.neurons() {
        let (a, w) = (net.a[j], net.w[j]);
        let state = recursion_ibc(w, net.theta[j], k + 1)?;
        let (db_dw, _) = rotated(&state, didw(&state, k));
        g.a[j] = factor * w * state.b[k];
        g.theta[j] = factor * a * w * (-state.c[k]);
        g.w[j] = factor * a * (state.b[k] + w * db_dw);
    }
    Ok(g)
}
