//! Fully connected network with ReLU hidden layers, trained with Adam.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    /// Softmax with cross-entropy loss.
    Softmax,
    /// Identity with half mean squared error.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub n_in: usize,
    pub n_out: usize,
    /// Row-major `n_out x n_in`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn forward(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_out)
            .map(|o| {
                let row = &self.weights[o * self.n_in..(o + 1) * self.n_in];
                self.biases[o] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub layers: Vec<Layer>,
    pub output: Output,
    /// L2 penalty on weights (not biases).
    pub alpha: f64,
}

impl Network {
    /// Glorot-uniform initialization of weights and biases.
    pub fn new(sizes: &[usize], output: Output, alpha: f64, rng: &mut ChaCha8Rng) -> Network {
        assert!(sizes.len() >= 2, "network needs input and output sizes");
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (n_in, n_out) = (w[0], w[1]);
                let bound = (6.0 / (n_in + n_out) as f64).sqrt();
                let weights = (0..n_in * n_out).map(|_| rng.random_range(-bound..bound)).collect();
                let biases = (0..n_out).map(|_| rng.random_range(-bound..bound)).collect();
                Layer { n_in, n_out, weights, biases }
            })
            .collect();
        Network { layers, output, alpha }
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].n_in];
        s.extend(self.layers.iter().map(|l| l.n_out));
        s
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    /// Weights then biases, layer by layer.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            p.extend_from_slice(&l.weights);
            p.extend_from_slice(&l.biases);
        }
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.n_params());
        let mut at = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&p[at..at + nw]);
            at += nw;
            let nb = l.biases.len();
            l.biases.copy_from_slice(&p[at..at + nb]);
            at += nb;
        }
    }

    /// Activations of every layer; the last entry is the network output.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![x.to_vec()];
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = layer.forward(acts.last().unwrap());
            if i < last {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            } else if self.output == Output::Softmax {
                softmax_in_place(&mut z);
            }
            acts.push(z);
        }
        acts
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.activations(x).pop().unwrap()
    }

    /// Mean loss over the batch plus `alpha / (2 n) * ||W||^2`.
    pub fn loss(&self, x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
        let n = x.len() as f64;
        let data: f64 = x.iter().zip(y).map(|(xi, yi)| self.sample_loss(&self.forward(xi), yi)).sum();
        data / n + self.penalty() / n
    }

    fn penalty(&self) -> f64 {
        let sq: f64 = self.layers.iter().flat_map(|l| &l.weights).map(|w| w * w).sum();
        0.5 * self.alpha * sq
    }

    fn sample_loss(&self, out: &[f64], y: &[f64]) -> f64 {
        match self.output {
            Output::Softmax => -out
                .iter()
                .zip(y)
                .filter(|(_, &t)| t > 0.0)
                .map(|(p, t)| t * p.max(1e-300).ln())
                .sum::<f64>(),
            Output::Linear => 0.5 * out.iter().zip(y).map(|(p, t)| (p - t).powi(2)).sum::<f64>(),
        }
    }

    /// Loss and its gradient, flattened in [`Network::params`] order.
    pub fn loss_and_gradient(&self, x: &[Vec<f64>], y: &[Vec<f64>]) -> (f64, Vec<f64>) {
        let n = x.len() as f64;
        let mut grads: Vec<(Vec<f64>, Vec<f64>)> = self
            .layers
            .iter()
            .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.biases.len()]))
            .collect();
        let mut total = 0.0;
        for (xi, yi) in x.iter().zip(y) {
            let acts = self.activations(xi);
            let out = acts.last().unwrap();
            total += self.sample_loss(out, yi);
            // softmax+CE and identity+MSE share the same output delta
            let mut delta: Vec<f64> = out.iter().zip(yi).map(|(p, t)| p - t).collect();
            for li in (0..self.layers.len()).rev() {
                let layer = &self.layers[li];
                let input = &acts[li];
                let (gw, gb) = &mut grads[li];
                for o in 0..layer.n_out {
                    gb[o] += delta[o];
                    let row = &mut gw[o * layer.n_in..(o + 1) * layer.n_in];
                    for (g, v) in row.iter_mut().zip(input) {
                        *g += delta[o] * v;
                    }
                }
                if li > 0 {
                    let mut prev = vec![0.0; layer.n_in];
                    for o in 0..layer.n_out {
                        let row = &layer.weights[o * layer.n_in..(o + 1) * layer.n_in];
                        for (p, w) in prev.iter_mut().zip(row) {
                            *p += delta[o] * w;
                        }
                    }
                    for (p, a) in prev.iter_mut().zip(input) {
                        if *a <= 0.0 {
                            *p = 0.0;
                        }
                    }
                    delta = prev;
                }
            }
        }
        let mut flat = Vec::with_capacity(self.n_params());
        for (layer, (gw, gb)) in self.layers.iter().zip(grads) {
            flat.extend(gw.iter().zip(&layer.weights).map(|(g, w)| (g + self.alpha * w) / n));
            flat.extend(gb.iter().map(|g| g / n));
        }
        (total / n + self.penalty() / n, flat)
    }
}

pub(crate) fn softmax_in_place(z: &mut [f64]) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for v in z.iter_mut() {
        *v = (*v - m).exp();
        s += *v;
    }
    z.iter_mut().for_each(|v| *v /= s);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n_params: usize, learning_rate: f64) -> Adam {
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            params[i] -= self.learning_rate * mh / (vh.sqrt() + self.epsilon);
        }
    }
}

/// Largest relative error between the analytic gradient and central differences.
pub fn gradient_check(net: &Network, x: &[Vec<f64>], y: &[Vec<f64>], h: f64) -> f64 {
    let (_, analytic) = net.loss_and_gradient(x, y);
    let base = net.params();
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] = base[i] + h;
        probe.set_params(&p);
        let up = probe.loss(x, y);
        p[i] = base[i] - h;
        probe.set_params(&p);
        let down = probe.loss(x, y);
        let numeric = (up - down) / (2.0 * h);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    worst
}
