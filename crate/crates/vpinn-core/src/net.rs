//! Feed-forward networks evaluated together with exact spatial derivatives.
//!
//! The forward pass propagates, per layer, the value channel and one
//! first/second-derivative channel per input coordinate (pure second
//! derivatives only; the PDEs here need at most the Laplacian). For
//! `z = sigma(a)` the chain rule gives
//!
//! ```text
//! z_p  = sigma'(a) a_p
//! z_pp = sigma''(a) a_p^2 + sigma'(a) a_pp
//! ```
//!
//! while affine layers map every channel linearly. The reverse pass runs the
//! adjoint of exactly this computation, so gradients of any scalar built from
//! network values *and derivatives* (losses containing `u_x`, `u_xx`) are
//! exact to machine precision. Points are processed in batch: a layer step is
//! one matrix product per channel, which is where nearly all training time
//! goes.

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Sine,
    Tanh,
}

impl Activation {
    /// `(sigma, sigma')` at `a`.
    #[inline]
    fn eval(&self, a: f64) -> (f64, f64) {
        match self {
            Activation::Sine => {
                let (s, c) = a.sin_cos();
                (s, c)
            }
            Activation::Tanh => {
                let t = a.tanh();
                (t, 1.0 - t * t)
            }
        }
    }

    /// `(sigma'', sigma''')` reconstructed from `(sigma, sigma')`.
    #[inline]
    fn second_third(&self, z: f64, s1: f64) -> (f64, f64) {
        match self {
            Activation::Sine => (-z, -s1),
            Activation::Tanh => (-2.0 * z * s1, s1 * (6.0 * z * z - 2.0)),
        }
    }
}

/// One hidden layer: `a = W z + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
}

/// A fully-connected network `u(x) = l . sigma(W_L ... sigma(W_1 x + b_1) ...)`
/// with spatial input dimension 1 or 2 and scalar output.
#[derive(Debug, Clone, PartialEq)]
pub struct DeepNetParams {
    pub input_dim: usize,
    pub layers: Vec<Layer>,
    pub output: Array1<f64>,
    pub activation: Activation,
}

/// Value, gradient, and pure second derivatives of the network at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalJet {
    pub dim: usize,
    pub point: [f64; 2],
    pub value: f64,
    pub grad: [f64; 2],
    pub diag2: [f64; 2],
}

/// Anything that can be evaluated with first and pure second derivatives.
///
/// Implemented by deep networks (chain rule), shallow sine networks (closed
/// forms), and exact-solution hooks used in tests and error metrics.
pub trait JetField {
    fn dim(&self) -> usize;
    fn eval_jet_at(&self, x: &[f64]) -> EvalJet;
}

/// Network outputs over a batch of points, one vector per channel.
#[derive(Debug, Clone)]
pub struct JetsOut {
    pub dim: usize,
    pub value: Array1<f64>,
    pub grad: Vec<Array1<f64>>,
    pub diag2: Vec<Array1<f64>>,
}

impl JetsOut {
    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }
}

/// Cotangents of a scalar with respect to every jet component of a batch.
#[derive(Debug, Clone)]
pub struct JetSeeds {
    pub value: Array1<f64>,
    pub grad: Vec<Array1<f64>>,
    pub diag2: Vec<Array1<f64>>,
}

impl JetSeeds {
    pub fn zeros(dim: usize, n: usize) -> Self {
        Self {
            value: Array1::zeros(n),
            grad: (0..dim).map(|_| Array1::zeros(n)).collect(),
            diag2: (0..dim).map(|_| Array1::zeros(n)).collect(),
        }
    }
}

/// Per-layer state cached by the forward pass for the reverse sweep.
struct LayerCache {
    /// Post-activation channels: `[val, d_1.., dd_1..]`, each `width x n`.
    z: Vec<Array2<f64>>,
    /// Pre-activation derivative channels `a_p`, `a_pp`.
    a_deriv: Vec<Array2<f64>>,
    /// `sigma'` at the pre-activations.
    s1: Array2<f64>,
}

/// Cached forward evaluation of a batch of points.
pub struct BatchJets {
    dim: usize,
    /// Input channels (the points matrix plus constant derivative seeds).
    input: Vec<Array2<f64>>,
    layers: Vec<LayerCache>,
    pub out: JetsOut,
}

impl DeepNetParams {
    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.input_dim > 2 {
            return Err(Error::Config(format!(
                "input dimension {} not in {{1, 2}}",
                self.input_dim
            )));
        }
        if self.layers.is_empty() {
            return Err(Error::Config("network needs at least one hidden layer".into()));
        }
        let mut prev = self.input_dim;
        for (i, layer) in self.layers.iter().enumerate() {
            let (rows, cols) = layer.weights.dim();
            if cols != prev {
                return Err(Error::Config(format!(
                    "layer {i}: weight columns {cols} != previous width {prev}"
                )));
            }
            if layer.biases.len() != rows {
                return Err(Error::Config(format!(
                    "layer {i}: bias length {} != rows {rows}",
                    layer.biases.len()
                )));
            }
            if layer.weights.iter().any(|v| !v.is_finite())
                || layer.biases.iter().any(|v| !v.is_finite())
            {
                return Err(Error::Config(format!("layer {i}: non-finite parameter")));
            }
            prev = rows;
        }
        if self.output.len() != prev {
            return Err(Error::Config(format!(
                "output weight length {} != last width {prev}",
                self.output.len()
            )));
        }
        if self.output.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("non-finite output weight".into()));
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum::<usize>()
            + self.output.len()
    }

    /// Flat parameter order: per layer `W` (row-major) then `b`, then the
    /// output weights. Adam and the finite-difference oracles share it.
    pub fn flatten(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            p.extend(layer.weights.iter());
            p.extend(layer.biases.iter());
        }
        p.extend(self.output.iter());
        p
    }

    pub fn set_from_flat(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.param_count() {
            return Err(Error::Config(format!(
                "parameter vector length {} != {}",
                p.len(),
                self.param_count()
            )));
        }
        let mut at = 0;
        for layer in &mut self.layers {
            for w in layer.weights.iter_mut() {
                *w = p[at];
                at += 1;
            }
            for b in layer.biases.iter_mut() {
                *b = p[at];
                at += 1;
            }
        }
        for o in self.output.iter_mut() {
            *o = p[at];
            at += 1;
        }
        Ok(())
    }

    /// Forward pass over a `dim x n` matrix of points, caching what the
    /// reverse sweep needs.
    pub fn forward_batch(&self, points: &Array2<f64>) -> Result<BatchJets> {
        self.validate()?;
        let d = self.input_dim;
        if points.nrows() != d {
            return Err(Error::Config(format!(
                "points have {} rows, network expects {d}",
                points.nrows()
            )));
        }
        let n = points.ncols();
        let channels = 1 + 2 * d;

        // Input seeds: value channel is the coordinates; the first-derivative
        // channel for direction p is the constant unit row p; second
        // derivatives start at zero.
        let mut input = Vec::with_capacity(channels);
        input.push(points.clone());
        for p in 0..d {
            let mut e = Array2::zeros((d, n));
            e.row_mut(p).fill(1.0);
            input.push(e);
        }
        for _ in 0..d {
            input.push(Array2::zeros((d, n)));
        }

        let mut layers = Vec::with_capacity(self.layers.len());
        let mut z_prev = &input;
        for layer in &self.layers {
            let width = layer.weights.nrows();
            // Affine step on every channel; bias only on the value channel.
            let mut a_val = layer.weights.dot(&z_prev[0]);
            a_val += &layer.biases.view().insert_axis(Axis(1));
            let a_deriv: Vec<Array2<f64>> = (1..channels)
                .map(|c| layer.weights.dot(&z_prev[c]))
                .collect();

            let mut z_val = Array2::zeros((width, n));
            let mut s1 = Array2::zeros((width, n));
            ndarray::Zip::from(&mut z_val)
                .and(&mut s1)
                .and(&a_val)
                .for_each(|z, s, &a| (*z, *s) = self.activation.eval(a));

            let mut z = Vec::with_capacity(channels);
            z.push(z_val);
            for p in 0..d {
                let mut zp = Array2::zeros((width, n));
                ndarray::Zip::from(&mut zp)
                    .and(&s1)
                    .and(&a_deriv[p])
                    .for_each(|zp, &s, &ap| *zp = s * ap);
                z.push(zp);
            }
            for p in 0..d {
                let mut zpp = Array2::zeros((width, n));
                ndarray::Zip::from(&mut zpp)
                    .and(&z[0])
                    .and(&s1)
                    .and(&a_deriv[p])
                    .and(&a_deriv[d + p])
                    .for_each(|zpp, &zv, &s, &ap, &app| {
                        let (s2, _) = self.activation.second_third(zv, s);
                        *zpp = s2 * ap * ap + s * app;
                    });
                z.push(zpp);
            }

            layers.push(LayerCache { z, a_deriv, s1 });
            z_prev = &layers.last().unwrap().z;
        }

        let last = &layers.last().unwrap().z;
        let out = JetsOut {
            dim: d,
            value: self.output.dot(&last[0]),
            grad: (0..d).map(|p| self.output.dot(&last[1 + p])).collect(),
            diag2: (0..d).map(|p| self.output.dot(&last[1 + d + p])).collect(),
        };

        Ok(BatchJets {
            dim: d,
            input,
            layers,
            out,
        })
    }

    /// Reverse sweep: accumulate `d(scalar)/d(params)` into `grad` given the
    /// scalar's cotangents with respect to the batch jets. Accumulation order
    /// is fixed, so results are bit-reproducible.
    pub fn backward_batch(
        &self,
        cache: &BatchJets,
        seeds: &JetSeeds,
        grad: &mut [f64],
    ) -> Result<()> {
        let d = self.dim_checked(cache, seeds, grad)?;
        let channels = 1 + 2 * d;
        let last = cache.layers.len() - 1;

        // Output layer: u_ch(q) = sum_i l_i z_ch[i, q].
        let zl = &cache.layers[last].z;
        let seed_ch = |c: usize| -> &Array1<f64> {
            if c == 0 {
                &seeds.value
            } else if c <= d {
                &seeds.grad[c - 1]
            } else {
                &seeds.diag2[c - 1 - d]
            }
        };
        let out_offset = grad.len() - self.output.len();
        for c in 0..channels {
            let contrib = zl[c].dot(seed_ch(c));
            for (g, v) in grad[out_offset..].iter_mut().zip(contrib.iter()) {
                *g += v;
            }
        }
        // Cotangents entering the last hidden layer.
        let mut zbar: Vec<Array2<f64>> = (0..channels)
            .map(|c| {
                let s = seed_ch(c);
                let mut m = Array2::zeros(zl[c].dim());
                for (i, &li) in self.output.iter().enumerate() {
                    let mut row = m.row_mut(i);
                    ndarray::Zip::from(&mut row).and(s).for_each(|r, &sv| *r = li * sv);
                }
                m
            })
            .collect();

        let mut offset = out_offset;
        for li in (0..self.layers.len()).rev() {
            let layer = &self.layers[li];
            let lc = &cache.layers[li];
            let width = layer.weights.nrows();
            let prev_cols = layer.weights.ncols();
            offset -= width * prev_cols + width;

            // Adjoint of the activation step.
            let mut abar: Vec<Array2<f64>> = Vec::with_capacity(channels);
            {
                let mut a_val = Array2::zeros(lc.s1.dim());
                ndarray::Zip::from(&mut a_val)
                    .and(&lc.s1)
                    .and(&zbar[0])
                    .for_each(|out, &s1, &zb| *out = s1 * zb);
                for p in 0..d {
                    ndarray::Zip::from(&mut a_val)
                        .and(&lc.z[0])
                        .and(&lc.s1)
                        .and(&lc.a_deriv[p])
                        .and(&zbar[1 + p])
                        .for_each(|out, &z, &s1, &ap, &zb| {
                            let (s2, _) = self.activation.second_third(z, s1);
                            *out += s2 * ap * zb;
                        });
                    ndarray::Zip::from(&mut a_val)
                        .and(&lc.z[0])
                        .and(&lc.s1)
                        .and(&lc.a_deriv[p])
                        .and(&lc.a_deriv[d + p])
                        .and(&zbar[1 + d + p])
                        .for_each(|out, &z, &s1, &ap, &app, &zb| {
                            let (s2, s3) = self.activation.second_third(z, s1);
                            *out += (s3 * ap * ap + s2 * app) * zb;
                        });
                }
                abar.push(a_val);
                for p in 0..d {
                    let mut ap_bar = Array2::zeros(lc.s1.dim());
                    ndarray::Zip::from(&mut ap_bar)
                        .and(&lc.z[0])
                        .and(&lc.s1)
                        .and(&lc.a_deriv[p])
                        .and(&zbar[1 + p])
                        .and(&zbar[1 + d + p])
                        .for_each(|out, &z, &s1, &ap, &zb1, &zb2| {
                            let (s2, _) = self.activation.second_third(z, s1);
                            *out = s1 * zb1 + 2.0 * s2 * ap * zb2;
                        });
                    abar.push(ap_bar);
                }
                for p in 0..d {
                    let mut app_bar = Array2::zeros(lc.s1.dim());
                    ndarray::Zip::from(&mut app_bar)
                        .and(&lc.s1)
                        .and(&zbar[1 + d + p])
                        .for_each(|out, &s1, &zb| *out = s1 * zb);
                    abar.push(app_bar);
                }
            }

            // Adjoint of the affine step: parameter gradients first.
            let z_prev: &Vec<Array2<f64>> = if li == 0 {
                &cache.input
            } else {
                &cache.layers[li - 1].z
            };
            let mut wbar = Array2::<f64>::zeros((width, prev_cols));
            for c in 0..channels {
                wbar += &abar[c].dot(&z_prev[c].t());
            }
            let bbar = abar[0].sum_axis(Axis(1));
            let mut at = offset;
            for w in wbar.iter() {
                grad[at] += w;
                at += 1;
            }
            for b in bbar.iter() {
                grad[at] += b;
                at += 1;
            }

            if li > 0 {
                let wt = layer.weights.t();
                zbar = (0..channels).map(|c| wt.dot(&abar[c])).collect();
            }
        }

        if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFinite {
                context: "parameter gradient",
                index: Some(i),
            });
        }
        Ok(())
    }

    fn dim_checked(&self, cache: &BatchJets, seeds: &JetSeeds, grad: &[f64]) -> Result<usize> {
        let d = self.input_dim;
        if cache.dim != d || seeds.grad.len() != d || seeds.diag2.len() != d {
            return Err(Error::Config("jet cache/seed dimension mismatch".into()));
        }
        if grad.len() != self.param_count() {
            return Err(Error::Config("gradient buffer length mismatch".into()));
        }
        Ok(d)
    }
}

impl JetField for DeepNetParams {
    fn dim(&self) -> usize {
        self.input_dim
    }

    fn eval_jet_at(&self, x: &[f64]) -> EvalJet {
        let d = self.input_dim;
        let points = Array2::from_shape_fn((d, 1), |(p, _)| x[p]);
        let batch = self.forward_batch(&points).expect("valid network");
        let mut jet = EvalJet {
            dim: d,
            point: [0.0; 2],
            value: batch.out.value[0],
            grad: [0.0; 2],
            diag2: [0.0; 2],
        };
        for p in 0..d {
            jet.point[p] = x[p];
            jet.grad[p] = batch.out.grad[p][0];
            jet.diag2[p] = batch.out.diag2[p][0];
        }
        jet
    }
}

/// A scalar quantity assembled from batch jets plus fixed data, together with
/// its exact differential with respect to every jet component.
pub trait JetScalar {
    fn value(&self, jets: &JetsOut) -> f64;
    fn seeds(&self, jets: &JetsOut) -> JetSeeds;
}

/// Value and exact parameter gradient of a scalar built on network jets at
/// the given points.
pub fn param_gradient(
    net: &DeepNetParams,
    points: &Array2<f64>,
    scalar: &dyn JetScalar,
) -> Result<(f64, Vec<f64>)> {
    let cache = net.forward_batch(points)?;
    let value = scalar.value(&cache.out);
    let seeds = scalar.seeds(&cache.out);
    let mut grad = vec![0.0; net.param_count()];
    net.backward_batch(&cache, &seeds, &mut grad)?;
    Ok((value, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_net(
        dim: usize,
        widths: &[usize],
        activation: Activation,
        seed: u64,
    ) -> DeepNetParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sample = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() };
        let mut layers = Vec::new();
        let mut prev = dim;
        for &w in widths {
            layers.push(Layer {
                weights: Array2::from_shape_vec((w, prev), sample(w * prev)).unwrap(),
                biases: Array1::from_vec(sample(w)),
            });
            prev = w;
        }
        DeepNetParams {
            input_dim: dim,
            layers,
            output: Array1::from_vec(sample(prev)),
            activation,
        }
    }

    fn one_neuron_sine() -> DeepNetParams {
        DeepNetParams {
            input_dim: 1,
            layers: vec![Layer {
                weights: Array2::from_elem((1, 1), 1.0),
                biases: Array1::zeros(1),
            }],
            output: Array1::from_elem(1, 1.0),
            activation: Activation::Sine,
        }
    }

    fn rel_close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()) + abs
    }

    /// Finite-difference jet oracle from network values only. First
    /// derivatives via central differences (step `h`); second derivatives via
    /// Richardson-extrapolated second differences at a larger step, which
    /// keeps roundoff (~eps/h^2) below the comparison tolerances.
    fn fd_jet(net: &DeepNetParams, x: &[f64], h: f64) -> EvalJet {
        let u = |x: &[f64]| net.eval_jet_at(x).value;
        let mut jet = net.eval_jet_at(x);
        for p in 0..net.input_dim {
            let at = |dx: f64| {
                let mut xs = x.to_vec();
                xs[p] += dx;
                u(&xs)
            };
            jet.grad[p] = (at(h) - at(-h)) / (2.0 * h);
            let h2 = 1e-3;
            let second = |h: f64| (at(h) - 2.0 * u(x) + at(-h)) / (h * h);
            jet.diag2[p] = (4.0 * second(h2 / 2.0) - second(h2)) / 3.0;
        }
        jet
    }

    #[test]
    fn single_sine_neuron_jets() {
        let net = one_neuron_sine();
        let j = net.eval_jet_at(&[0.0]);
        assert_eq!((j.value, j.grad[0], j.diag2[0]), (0.0, 1.0, 0.0));
        let j = net.eval_jet_at(&[std::f64::consts::FRAC_PI_2]);
        assert_abs_diff_eq!(j.value, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.grad[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.diag2[0], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn tanh_net_jets_match_finite_differences() {
        let net = random_net(1, &[6, 5, 4], Activation::Tanh, 7);
        let jet = net.eval_jet_at(&[0.37]);
        let fd = fd_jet(&net, &[0.37], 1e-5);
        assert!(
            rel_close(jet.grad[0], fd.grad[0], 1e-6, 1e-10),
            "u_x {} vs fd {}",
            jet.grad[0],
            fd.grad[0]
        );
        assert!(
            rel_close(jet.diag2[0], fd.diag2[0], 1e-6, 1e-6),
            "u_xx {} vs fd {}",
            jet.diag2[0],
            fd.diag2[0]
        );
    }

    #[test]
    fn jets_match_finite_differences_many_nets() {
        for seed in 0..5u64 {
            for (dim, act) in [(1, Activation::Sine), (1, Activation::Tanh), (2, Activation::Sine), (2, Activation::Tanh)] {
                let net = random_net(dim, &[5, 5], act, seed);
                let x = [0.3 - 0.1 * seed as f64, -0.4 + 0.05 * seed as f64];
                let jet = net.eval_jet_at(&x[..dim]);
                let fd = fd_jet(&net, &x[..dim], 1e-5);
                for p in 0..dim {
                    assert!(rel_close(jet.grad[p], fd.grad[p], 1e-5, 1e-8));
                    assert!(rel_close(jet.diag2[p], fd.diag2[p], 1e-5, 1e-4));
                }
            }
        }
    }

    struct ValueSquaredAtFirst;
    impl JetScalar for ValueSquaredAtFirst {
        fn value(&self, jets: &JetsOut) -> f64 {
            jets.value[0] * jets.value[0]
        }
        fn seeds(&self, jets: &JetsOut) -> JetSeeds {
            let mut s = JetSeeds::zeros(jets.dim, jets.len());
            s.value[0] = 2.0 * jets.value[0];
            s
        }
    }

    struct SlopeAtFirst;
    impl JetScalar for SlopeAtFirst {
        fn value(&self, jets: &JetsOut) -> f64 {
            jets.grad[0][0]
        }
        fn seeds(&self, jets: &JetsOut) -> JetSeeds {
            let mut s = JetSeeds::zeros(jets.dim, jets.len());
            s.grad[0][0] = 1.0;
            s
        }
    }

    struct WeightedCurvatureSq(Vec<f64>);
    impl JetScalar for WeightedCurvatureSq {
        fn value(&self, jets: &JetsOut) -> f64 {
            jets.diag2[0]
                .iter()
                .zip(&self.0)
                .map(|(&u2, &w)| w * u2 * u2)
                .sum()
        }
        fn seeds(&self, jets: &JetsOut) -> JetSeeds {
            let mut s = JetSeeds::zeros(jets.dim, jets.len());
            for (q, (&u2, &w)) in jets.diag2[0].iter().zip(&self.0).enumerate() {
                s.diag2[0][q] = 2.0 * w * u2;
            }
            s
        }
    }

    fn fd_param_gradient(
        net: &DeepNetParams,
        points: &Array2<f64>,
        scalar: &dyn JetScalar,
        h: f64,
    ) -> Vec<f64> {
        let base = net.flatten();
        let mut grad = vec![0.0; base.len()];
        let mut probe = net.clone();
        for i in 0..base.len() {
            let mut p = base.clone();
            p[i] += h;
            probe.set_from_flat(&p).unwrap();
            let plus = scalar.value(&probe.forward_batch(points).unwrap().out);
            p[i] = base[i] - h;
            probe.set_from_flat(&p).unwrap();
            let minus = scalar.value(&probe.forward_batch(points).unwrap().out);
            grad[i] = (plus - minus) / (2.0 * h);
        }
        grad
    }

    #[test]
    fn param_gradient_trivial_cases() {
        let net = one_neuron_sine();
        let points = Array2::from_elem((1, 1), 0.0);
        // u(0) = 0, so d(u(0)^2)/d(output weight) = 2 u(0) sin(0) = 0
        let (val, grad) = param_gradient(&net, &points, &ValueSquaredAtFirst).unwrap();
        assert_eq!(val, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));
        // u_x = a w cos(w x + theta); at a = w = 1, theta = 0, x = 0:
        // d/da = 1, d/dw = a cos(0) = 1, d/dtheta = 0
        let (val, grad) = param_gradient(&net, &points, &SlopeAtFirst).unwrap();
        assert_eq!(val, 1.0);
        let fd = fd_param_gradient(&net, &points, &SlopeAtFirst, 1e-6);
        for (g, f) in grad.iter().zip(&fd) {
            assert!(rel_close(*g, *f, 1e-6, 1e-9), "grad {g} vs fd {f}");
        }
        assert_abs_diff_eq!(grad[2], 1.0, epsilon = 1e-12); // output weight
        assert_abs_diff_eq!(grad[0], 1.0, epsilon = 1e-12); // w
        assert_abs_diff_eq!(grad[1], 0.0, epsilon = 1e-12); // theta
    }

    #[test]
    fn param_gradient_matches_finite_differences() {
        let net = random_net(1, &[6, 6], Activation::Tanh, 3);
        assert!(net.param_count() <= 100);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let points =
            Array2::from_shape_fn((1, 12), |_| rng.gen_range(-0.9..0.9));
        let weights: Vec<f64> = (0..12).map(|q| 0.1 + 0.05 * q as f64).collect();
        let scalar = WeightedCurvatureSq(weights);
        let (_, grad) = param_gradient(&net, &points, &scalar).unwrap();
        let fd = fd_param_gradient(&net, &points, &scalar, 1e-5);
        for (i, (g, f)) in grad.iter().zip(&fd).enumerate() {
            assert!(rel_close(*g, *f, 1e-5, 1e-7), "param {i}: {g} vs fd {f}");
        }
    }

    #[test]
    fn evaluation_is_deterministic() {
        let net = random_net(2, &[8, 8, 8], Activation::Sine, 42);
        let points = Array2::from_shape_fn((2, 33), |(p, q)| {
            0.01 * (p as f64 + 1.0) * (q as f64) - 0.5
        });
        let a = net.forward_batch(&points).unwrap();
        let b = net.forward_batch(&points).unwrap();
        assert_eq!(a.out.value, b.out.value);
        assert_eq!(a.out.grad, b.out.grad);
        assert_eq!(a.out.diag2, b.out.diag2);
        let scalar = ValueSquaredAtFirst;
        let (_, g1) = param_gradient(&net, &points, &scalar).unwrap();
        let (_, g2) = param_gradient(&net, &points, &scalar).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn shape_mismatch_is_config_error() {
        let mut net = one_neuron_sine();
        net.layers[0].weights = Array2::zeros((1, 2));
        assert!(matches!(net.validate(), Err(Error::Config(_))));
        let net = one_neuron_sine();
        let points = Array2::zeros((2, 3));
        assert!(net.forward_batch(&points).is_err());
    }
}
