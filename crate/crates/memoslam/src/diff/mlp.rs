//! Small dense MLPs with exact reverse-mode gradients.
//!
//! Parameters live in one flat `Vec<f64>` laid out per layer as the weight
//! matrix (row-major, `out x in`) followed by the bias. The hot path is
//! allocation-free: callers hold an [`MlpScratch`] and reuse it across
//! evaluations.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Per-neuron nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Sigmoid,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, a: f64) -> f64 {
        match self {
            Activation::Relu => a.max(0.0),
            Activation::Sigmoid => sigmoid(a),
            Activation::Identity => a,
        }
    }

    /// Derivative expressed through the post-activation value.
    #[inline]
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Identity => 1.0,
        }
    }
}

/// Numerically safe logistic function.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Shape and activation of one dense layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self {
            in_dim,
            out_dim,
            activation,
        }
    }

    fn param_count(&self) -> usize {
        (self.in_dim + 1) * self.out_dim
    }
}

/// A fixed-architecture dense network: layer specs plus a flat parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<LayerSpec>,
    params: Vec<f64>,
}

/// Activation record from a forward pass, sufficient for an exact backward pass.
#[derive(Debug, Clone)]
pub struct MlpScratch {
    /// `act[0]` is the input, `act[k]` the output of layer k-1.
    act: Vec<Vec<f64>>,
    /// Work buffer for the running downstream gradient.
    delta: Vec<f64>,
    delta_next: Vec<f64>,
}

impl MlpScratch {
    pub fn output(&self) -> &[f64] {
        self.act.last().expect("scratch never empty")
    }
}

impl Mlp {
    /// Builds a zero-parameter network after validating layer-shape consistency.
    pub fn zeros(layers: Vec<LayerSpec>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::contract("mlp needs at least one layer"));
        }
        for w in layers.windows(2) {
            if w[0].out_dim != w[1].in_dim {
                return Err(Error::contract(format!(
                    "layer output width {} does not match next input width {}",
                    w[0].out_dim, w[1].in_dim
                )));
            }
        }
        if layers.iter().any(|l| l.in_dim == 0 || l.out_dim == 0) {
            return Err(Error::contract("zero-width layer"));
        }
        let n: usize = layers.iter().map(|l| l.param_count()).sum();
        Ok(Self {
            layers,
            params: vec![0.0; n],
        })
    }

    /// He-uniform init for hidden layers; the last layer is left at zero so the
    /// initial output is exactly the bias.
    pub fn he_init<R: Rng>(layers: Vec<LayerSpec>, rng: &mut R) -> Result<Self> {
        let mut mlp = Self::zeros(layers)?;
        let last = mlp.layers.len() - 1;
        for k in 0..last {
            let spec = mlp.layers[k];
            let bound = (6.0 / spec.in_dim as f64).sqrt();
            let (w_off, _b_off) = mlp.layer_offsets(k);
            for i in 0..spec.out_dim * spec.in_dim {
                mlp.params[w_off + i] = rng.random_range(-bound..bound);
            }
        }
        Ok(mlp)
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().out_dim
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// (weight offset, bias offset) of layer `k` in the flat parameter vector.
    fn layer_offsets(&self, k: usize) -> (usize, usize) {
        let mut off = 0;
        for l in &self.layers[..k] {
            off += l.param_count();
        }
        (off, off + self.layers[k].out_dim * self.layers[k].in_dim)
    }

    /// Sets the bias of the final layer (used by the zero-output init scheme).
    pub fn set_output_bias(&mut self, bias: &[f64]) -> Result<()> {
        let k = self.layers.len() - 1;
        if bias.len() != self.layers[k].out_dim {
            return Err(Error::contract("output bias length mismatch"));
        }
        let (_, b_off) = self.layer_offsets(k);
        self.params[b_off..b_off + bias.len()].copy_from_slice(bias);
        Ok(())
    }

    pub fn scratch(&self) -> MlpScratch {
        let mut act = Vec::with_capacity(self.layers.len() + 1);
        act.push(vec![0.0; self.input_dim()]);
        for l in &self.layers {
            act.push(vec![0.0; l.out_dim]);
        }
        let widest = self
            .layers
            .iter()
            .map(|l| l.in_dim.max(l.out_dim))
            .max()
            .unwrap();
        MlpScratch {
            act,
            delta: vec![0.0; widest],
            delta_next: vec![0.0; widest],
        }
    }

    /// Forward pass into a reusable scratch. Returns the output slice.
    pub fn forward_into<'s>(&self, input: &[f64], scratch: &'s mut MlpScratch) -> &'s [f64] {
        debug_assert_eq!(input.len(), self.input_dim());
        scratch.act[0].copy_from_slice(input);
        let mut off = 0;
        for (k, spec) in self.layers.iter().enumerate() {
            let (src, dst) = {
                let (a, b) = scratch.act.split_at_mut(k + 1);
                (&a[k][..], &mut b[0][..])
            };
            let w_off = off;
            let b_off = off + spec.out_dim * spec.in_dim;
            for o in 0..spec.out_dim {
                let row = &self.params[w_off + o * spec.in_dim..w_off + (o + 1) * spec.in_dim];
                let mut acc = self.params[b_off + o];
                for (wi, xi) in row.iter().zip(src.iter()) {
                    acc = wi.mul_add(*xi, acc);
                }
                dst[o] = spec.activation.apply(acc);
            }
            off += spec.param_count();
        }
        scratch.output()
    }

    /// Backward pass over a scratch produced by [`Mlp::forward_into`].
    ///
    /// Accumulates `d<loss>/d<params>` into `d_params` (length `param_count`)
    /// and, when given, writes `d<loss>/d<input>` into `d_input`. Pass
    /// `d_params = None` to get input gradients only (used when parameters are
    /// frozen, e.g. during tracking).
    pub fn backward_scratch(
        &self,
        scratch: &mut MlpScratch,
        d_output: &[f64],
        mut d_params: Option<&mut [f64]>,
        d_input: Option<&mut [f64]>,
    ) {
        debug_assert_eq!(d_output.len(), self.output_dim());
        if let Some(dp) = d_params.as_ref() {
            debug_assert_eq!(dp.len(), self.param_count());
        }
        let n_layers = self.layers.len();
        scratch.delta[..d_output.len()].copy_from_slice(d_output);
        let mut off = self.param_count();
        for k in (0..n_layers).rev() {
            let spec = self.layers[k];
            off -= spec.param_count();
            let w_off = off;
            let b_off = off + spec.out_dim * spec.in_dim;
            let x_in = &scratch.act[k];
            let y_out = &scratch.act[k + 1];
            // delta <- dL/d(pre-activation) of this layer
            for o in 0..spec.out_dim {
                scratch.delta[o] *= spec.activation.derivative_from_output(y_out[o]);
            }
            if let Some(dp) = d_params.as_deref_mut() {
                for o in 0..spec.out_dim {
                    let g = scratch.delta[o];
                    if g != 0.0 {
                        let row = &mut dp[w_off + o * spec.in_dim..w_off + (o + 1) * spec.in_dim];
                        for (wi, xi) in row.iter_mut().zip(x_in.iter()) {
                            *wi = g.mul_add(*xi, *wi);
                        }
                    }
                    dp[b_off + o] += g;
                }
            }
            let need_dx = k > 0 || d_input.is_some();
            if need_dx {
                let dx = &mut scratch.delta_next;
                dx[..spec.in_dim].fill(0.0);
                for o in 0..spec.out_dim {
                    let g = scratch.delta[o];
                    if g != 0.0 {
                        let row =
                            &self.params[w_off + o * spec.in_dim..w_off + (o + 1) * spec.in_dim];
                        for (xi, wi) in dx[..spec.in_dim].iter_mut().zip(row.iter()) {
                            *xi = g.mul_add(*wi, *xi);
                        }
                    }
                }
                std::mem::swap(&mut scratch.delta, &mut scratch.delta_next);
            }
        }
        if let Some(di) = d_input {
            di.copy_from_slice(&scratch.delta[..self.input_dim()]);
        }
    }

    /// Contract-checked forward pass. Returns the output and the activation
    /// record needed by [`Mlp::backward`].
    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, MlpScratch)> {
        if input.len() != self.input_dim() {
            return Err(Error::contract(format!(
                "input width {} does not match first layer width {}",
                input.len(),
                self.input_dim()
            )));
        }
        let mut scratch = self.scratch();
        self.forward_into(input, &mut scratch);
        Ok((scratch.output().to_vec(), scratch))
    }

    /// Contract-checked backward pass: gradients of `<d_output, output>` with
    /// respect to parameters and input.
    pub fn backward(
        &self,
        cache: &MlpScratch,
        d_output: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        if cache.act.len() != self.layers.len() + 1
            || cache.act[0].len() != self.input_dim()
            || cache.act.last().unwrap().len() != self.output_dim()
        {
            return Err(Error::contract("cache does not match this network"));
        }
        if d_output.len() != self.output_dim() {
            return Err(Error::contract(format!(
                "d_output width {} does not match output width {}",
                d_output.len(),
                self.output_dim()
            )));
        }
        let mut scratch = cache.clone();
        let mut d_params = vec![0.0; self.param_count()];
        let mut d_input = vec![0.0; self.input_dim()];
        self.backward_scratch(
            &mut scratch,
            d_output,
            Some(&mut d_params),
            Some(&mut d_input),
        );
        Ok((d_params, d_input))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::check::finite_difference_check;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_net(rng: &mut ChaCha8Rng) -> Mlp {
        let layers = vec![
            LayerSpec::new(3, 5, Activation::Relu),
            LayerSpec::new(5, 2, Activation::Sigmoid),
        ];
        let mut mlp = Mlp::zeros(layers).unwrap();
        for p in mlp.params_mut() {
            *p = rng.random_range(-1.0..1.0);
        }
        mlp
    }

    #[test]
    fn zero_params_give_zero_output() {
        let mlp = Mlp::zeros(vec![
            LayerSpec::new(4, 3, Activation::Relu),
            LayerSpec::new(3, 2, Activation::Identity),
        ])
        .unwrap();
        let (out, _) = mlp.forward(&[1.0, -2.0, 3.0, 0.5]).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn identity_layer_passes_input_through() {
        let mut mlp = Mlp::zeros(vec![LayerSpec::new(3, 3, Activation::Identity)]).unwrap();
        for i in 0..3 {
            mlp.params_mut()[i * 3 + i] = 1.0;
        }
        let v = [0.3, -1.7, 2.4];
        let (out, _) = mlp.forward(&v).unwrap();
        assert_eq!(out, v.to_vec());
    }

    /// Independent straight-line evaluation of a 2-layer net, written without
    /// any of the implementation's machinery.
    fn straight_line_eval(mlp: &Mlp, x: &[f64]) -> Vec<f64> {
        let p = mlp.params();
        let l0 = mlp.layers()[0];
        let l1 = mlp.layers()[1];
        let w0 = &p[..l0.out_dim * l0.in_dim];
        let b0 = &p[l0.out_dim * l0.in_dim..(l0.in_dim + 1) * l0.out_dim];
        let off = (l0.in_dim + 1) * l0.out_dim;
        let w1 = &p[off..off + l1.out_dim * l1.in_dim];
        let b1 = &p[off + l1.out_dim * l1.in_dim..];
        let mut h = vec![0.0; l0.out_dim];
        for o in 0..l0.out_dim {
            let mut a = b0[o];
            for i in 0..l0.in_dim {
                a += w0[o * l0.in_dim + i] * x[i];
            }
            h[o] = a.max(0.0);
        }
        let mut y = vec![0.0; l1.out_dim];
        for o in 0..l1.out_dim {
            let mut a = b1[o];
            for i in 0..l1.in_dim {
                a += w1[o * l1.in_dim + i] * h[i];
            }
            y[o] = 1.0 / (1.0 + (-a).exp());
        }
        y
    }

    #[test]
    fn matches_straight_line_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mlp = random_net(&mut rng);
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let (out, _) = mlp.forward(&x).unwrap();
            let expect = straight_line_eval(&mlp, &x);
            for (a, b) in out.iter().zip(expect.iter()) {
                assert!((a - b).abs() < 1e-14, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn forward_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mlp = random_net(&mut rng);
        let x = [0.1, 0.2, -0.3];
        let (a, _) = mlp.forward(&x).unwrap();
        let (b, _) = mlp.forward(&x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn linear_layer_weight_gradient_is_input_row() {
        // y = Wx, pick d_output = e_1: d_W row 1 is x^T, all other rows zero.
        let mut mlp = Mlp::zeros(vec![LayerSpec::new(3, 2, Activation::Identity)]).unwrap();
        for (i, p) in mlp.params_mut().iter_mut().enumerate() {
            *p = (i as f64) * 0.1 - 0.2;
        }
        let x = [1.5, -0.5, 2.0];
        let (_, cache) = mlp.forward(&x).unwrap();
        let (d_params, _) = mlp.backward(&cache, &[0.0, 1.0]).unwrap();
        assert_eq!(&d_params[..3], &[0.0, 0.0, 0.0]);
        assert_eq!(&d_params[3..6], &x);
        assert_eq!(&d_params[6..8], &[0.0, 1.0]); // biases
    }

    #[test]
    fn sigmoid_local_derivative_at_zero_is_quarter() {
        let mlp = Mlp::zeros(vec![LayerSpec::new(1, 1, Activation::Sigmoid)]).unwrap();
        // zero weights and bias: pre-activation 0, output 0.5
        let (out, cache) = mlp.forward(&[0.7]).unwrap();
        assert_eq!(out[0], 0.5);
        let (d_params, _) = mlp.backward(&cache, &[1.0]).unwrap();
        // d/d_bias = sigma'(0) = 0.25 exactly
        assert_eq!(d_params[1], 0.25);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mlp = random_net(&mut rng);
        let x: Vec<f64> = vec![0.4, -1.1, 0.9];
        let d_out = vec![0.7, -0.3];
        let (_, cache) = mlp.forward(&x).unwrap();
        let (d_params, d_input) = mlp.backward(&cache, &d_out).unwrap();

        let loss = |m: &Mlp, x: &[f64]| {
            let (y, _) = m.forward(x).unwrap();
            y.iter().zip(d_out.iter()).map(|(a, b)| a * b).sum::<f64>()
        };

        let report = finite_difference_check(
            mlp.params().to_vec(),
            &d_params,
            1e-5,
            |p| {
                let mut m = mlp.clone();
                m.params_mut().copy_from_slice(p);
                loss(&m, &x)
            },
        );
        assert!(
            report.max_rel_error <= 1e-6,
            "param grad rel error {}",
            report.max_rel_error
        );

        let report = finite_difference_check(x.clone(), &d_input, 1e-5, |xs| loss(&mlp, xs));
        assert!(
            report.max_rel_error <= 1e-6,
            "input grad rel error {}",
            report.max_rel_error
        );
    }

    #[test]
    fn shape_mismatch_is_contract_error() {
        let mlp = Mlp::zeros(vec![LayerSpec::new(3, 2, Activation::Relu)]).unwrap();
        assert!(mlp.forward(&[1.0, 2.0]).is_err());
        let (_, cache) = mlp.forward(&[1.0, 2.0, 3.0]).unwrap();
        assert!(mlp.backward(&cache, &[1.0]).is_err());
        // cache from a different architecture
        let other = Mlp::zeros(vec![LayerSpec::new(2, 2, Activation::Relu)]).unwrap();
        let (_, stale) = other.forward(&[1.0, 2.0]).unwrap();
        assert!(mlp.backward(&stale, &[1.0, 1.0]).is_err());
    }
}
