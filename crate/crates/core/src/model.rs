//! Two-hidden-layer classifier over fixed input features, with exact manual
//! gradients of a weighted per-example cross-entropy and an Adam optimizer.
//!
//! The hidden nonlinearity defaults to tanh; it is smooth, which keeps the
//! finite-difference gradient checks clean. All math is generic over the
//! scalar type, but the checks are only meaningful at 64-bit precision.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use ndarray::{Array1, Array2, Axis, Dimension, Zip};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

/// Hidden-layer nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Tanh,
    Relu,
}

impl Activation {
    fn apply<S: Scalar>(self, z: S) -> S {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(S::zero()),
        }
    }

    /// Derivative expressed through the activated value.
    fn derivative_from_output<S: Scalar>(self, a: S) -> S {
        match self {
            Activation::Tanh => S::one() - a * a,
            Activation::Relu => {
                if a > S::zero() {
                    S::one()
                } else {
                    S::zero()
                }
            }
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            other => Err(Error::Config(format!("unknown activation `{other}`"))),
        }
    }
}

/// Weights and biases of the d -> h -> h -> C classifier. Also reused as the
/// container for gradients and Adam moment accumulators, which share the
/// shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<S: Scalar = f64> {
    pub w1: Array2<S>,
    pub b1: Array1<S>,
    pub w2: Array2<S>,
    pub b2: Array1<S>,
    pub w3: Array2<S>,
    pub b3: Array1<S>,
}

/// Gradients have exactly the parameter shapes.
pub type Gradients<S> = ModelParams<S>;

impl<S: Scalar> ModelParams<S> {
    pub fn input_dim(&self) -> usize {
        self.w1.nrows()
    }

    pub fn hidden(&self) -> usize {
        self.w1.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.w3.ncols()
    }

    pub fn zeros_like(&self) -> Self {
        ModelParams {
            w1: Array2::zeros(self.w1.raw_dim()),
            b1: Array1::zeros(self.b1.raw_dim()),
            w2: Array2::zeros(self.w2.raw_dim()),
            b2: Array1::zeros(self.b2.raw_dim()),
            w3: Array2::zeros(self.w3.raw_dim()),
            b3: Array1::zeros(self.b3.raw_dim()),
        }
    }

    /// Total number of scalar parameters.
    pub fn coord_count(&self) -> usize {
        self.w1.len()
            + self.b1.len()
            + self.w2.len()
            + self.b2.len()
            + self.w3.len()
            + self.b3.len()
    }

    /// Flat view of all parameters: w1, b1, w2, b2, w3, b3 in row-major order.
    pub fn coord(&self, mut i: usize) -> S {
        for block in self.blocks() {
            if i < block.len() {
                return block[i];
            }
            i -= block.len();
        }
        panic!("coordinate index out of range");
    }

    pub fn coord_mut(&mut self, mut i: usize) -> &mut S {
        // Two passes keep the borrow checker happy without unsafe.
        let sizes = [
            self.w1.len(),
            self.b1.len(),
            self.w2.len(),
            self.b2.len(),
            self.w3.len(),
            self.b3.len(),
        ];
        let mut block = 0;
        while i >= sizes[block] {
            i -= sizes[block];
            block += 1;
        }
        let slice = match block {
            0 => self.w1.as_slice_mut(),
            1 => self.b1.as_slice_mut(),
            2 => self.w2.as_slice_mut(),
            3 => self.b2.as_slice_mut(),
            4 => self.w3.as_slice_mut(),
            _ => self.b3.as_slice_mut(),
        };
        &mut slice.expect("parameter arrays are contiguous")[i]
    }

    fn blocks(&self) -> [&[S]; 6] {
        [
            self.w1.as_slice().unwrap(),
            self.b1.as_slice().unwrap(),
            self.w2.as_slice().unwrap(),
            self.b2.as_slice().unwrap(),
            self.w3.as_slice().unwrap(),
            self.b3.as_slice().unwrap(),
        ]
    }

    /// Writes the checkpoint format: magic `EQOPTCP1`, then d, h, C as u32
    /// little-endian, then the six blocks as f64 little-endian in the flat
    /// coordinate order. Round-trips bit-exactly for finite values.
    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"EQOPTCP1")?;
        for v in [self.input_dim(), self.hidden(), self.num_classes()] {
            w.write_all(&(v as u32).to_le_bytes())?;
        }
        for block in self.blocks() {
            for &x in block {
                w.write_all(&x.to_f64().unwrap().to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn save_checkpoint(&self, path: &Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_checkpoint(&mut file)?;
        file.flush()?;
        Ok(())
    }

    pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != b"EQOPTCP1" {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let mut dims = [0usize; 3];
        for d in &mut dims {
            let mut buf = [0u8; 4];
            r.read_exact(&mut buf)?;
            *d = u32::from_le_bytes(buf) as usize;
        }
        let [d, h, c] = dims;
        if d == 0 || h == 0 || c == 0 {
            return Err(Error::Checkpoint(format!("bad shape header {d}x{h}x{c}")));
        }
        let mut read_block = |len: usize| -> Result<Vec<S>> {
            let mut out = Vec::with_capacity(len);
            let mut buf = [0u8; 8];
            for _ in 0..len {
                r.read_exact(&mut buf)?;
                out.push(S::from(f64::from_le_bytes(buf)).unwrap());
            }
            Ok(out)
        };
        let params = ModelParams {
            w1: Array2::from_shape_vec((d, h), read_block(d * h)?).unwrap(),
            b1: Array1::from_vec(read_block(h)?),
            w2: Array2::from_shape_vec((h, h), read_block(h * h)?).unwrap(),
            b2: Array1::from_vec(read_block(h)?),
            w3: Array2::from_shape_vec((h, c), read_block(h * c)?).unwrap(),
            b3: Array1::from_vec(read_block(c)?),
        };
        Ok(params)
    }

    pub fn load_checkpoint(path: &Path) -> Result<Self> {
        Self::read_checkpoint(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// Glorot-uniform initialization: each weight matrix is drawn uniformly from
/// +/- sqrt(6 / (fan_in + fan_out)); biases start at zero. Deterministic
/// under `seed`.
pub fn init_params<S: Scalar>(
    input_dim: usize,
    hidden: usize,
    num_classes: usize,
    seed: u64,
) -> ModelParams<S> {
    assert!(input_dim >= 1 && hidden >= 1 && num_classes >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut glorot = |fan_in: usize, fan_out: usize| {
        let bound = S::from(6.0 / (fan_in + fan_out) as f64).unwrap().sqrt();
        Array2::from_shape_fn((fan_in, fan_out), |_| S::uniform_sym(&mut rng, bound))
    };
    let w1 = glorot(input_dim, hidden);
    let w2 = glorot(hidden, hidden);
    let w3 = glorot(hidden, num_classes);
    ModelParams {
        w1,
        b1: Array1::zeros(hidden),
        w2,
        b2: Array1::zeros(hidden),
        w3,
        b3: Array1::zeros(num_classes),
    }
}

/// Logits, row-softmax probabilities and per-example cross-entropy for one
/// batch.
#[derive(Debug, Clone)]
pub struct ForwardResult<S: Scalar = f64> {
    pub logits: Array2<S>,
    pub probabilities: Array2<S>,
    pub per_example_ce: Array1<S>,
}

struct ForwardTrace<S: Scalar> {
    a1: Array2<S>,
    a2: Array2<S>,
    probabilities: Array2<S>,
}

fn check_batch<S: Scalar>(
    params: &ModelParams<S>,
    features: &Array2<S>,
    labels: &[usize],
) -> Result<()> {
    if features.ncols() != params.input_dim() {
        return Err(Error::Validation(format!(
            "feature width {} does not match model input {}",
            features.ncols(),
            params.input_dim()
        )));
    }
    if features.nrows() != labels.len() {
        return Err(Error::Validation(format!(
            "{} feature rows but {} labels",
            features.nrows(),
            labels.len()
        )));
    }
    if let Some(&y) = labels.iter().find(|&&y| y >= params.num_classes()) {
        return Err(Error::Validation(format!(
            "label {y} out of range [0, {})",
            params.num_classes()
        )));
    }
    if let Some((idx, _)) = features.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "feature at row {} is not finite",
            idx / features.ncols()
        )));
    }
    Ok(())
}

fn forward_trace<S: Scalar>(
    params: &ModelParams<S>,
    features: &Array2<S>,
    act: Activation,
) -> (Array2<S>, ForwardTrace<S>) {
    let mut z1 = features.dot(&params.w1);
    z1 += &params.b1;
    let a1 = z1.mapv(|z| act.apply(z));
    let mut z2 = a1.dot(&params.w2);
    z2 += &params.b2;
    let a2 = z2.mapv(|z| act.apply(z));
    let mut logits = a2.dot(&params.w3);
    logits += &params.b3;

    // Row softmax with max subtraction; stable for arbitrarily large logits.
    let mut probabilities = logits.clone();
    for mut row in probabilities.rows_mut() {
        let max = row.iter().cloned().fold(S::neg_infinity(), S::max);
        row.mapv_inplace(|z| (z - max).exp());
        let sum = row.iter().cloned().sum::<S>();
        row.mapv_inplace(|p| p / sum);
    }
    (
        logits,
        ForwardTrace {
            a1,
            a2,
            probabilities,
        },
    )
}

/// Runs the classifier on a batch and returns logits, probabilities, and the
/// per-example cross-entropy -log p(y_i), computed in log-sum-exp form so it
/// stays finite even when the true class gets vanishing probability.
pub fn forward<S: Scalar>(
    params: &ModelParams<S>,
    features: &Array2<S>,
    labels: &[usize],
    act: Activation,
) -> Result<ForwardResult<S>> {
    check_batch(params, features, labels)?;
    let (logits, trace) = forward_trace(params, features, act);
    let per_example_ce = Array1::from_iter(logits.rows().into_iter().zip(labels).map(
        |(row, &y)| {
            let max = row.iter().cloned().fold(S::neg_infinity(), S::max);
            let lse = row.iter().map(|&z| (z - max).exp()).sum::<S>().ln() + max;
            lse - row[y]
        },
    ));
    Ok(ForwardResult {
        logits,
        probabilities: trace.probabilities,
        per_example_ce,
    })
}

/// Exact gradients of sum_i weights_i * ce_i with respect to every parameter.
/// The weights may be negative; the gradient is linear in them.
pub fn backward<S: Scalar>(
    params: &ModelParams<S>,
    features: &Array2<S>,
    labels: &[usize],
    weights: &Array1<S>,
    act: Activation,
) -> Result<Gradients<S>> {
    check_batch(params, features, labels)?;
    if weights.len() != labels.len() {
        return Err(Error::Validation(format!(
            "{} weights for {} examples",
            weights.len(),
            labels.len()
        )));
    }
    if let Some((i, _)) = weights.iter().enumerate().find(|(_, w)| !w.is_finite()) {
        return Err(Error::NonFinite(format!("weight {i} is not finite")));
    }

    let (_, trace) = forward_trace(params, features, act);
    let ForwardTrace {
        a1,
        a2,
        probabilities,
    } = trace;

    // dL/dlogits = w_i * (p_i - onehot(y_i)) per row.
    let mut dz3 = probabilities;
    for (i, mut row) in dz3.rows_mut().into_iter().enumerate() {
        row[labels[i]] = row[labels[i]] - S::one();
        let w = weights[i];
        row.mapv_inplace(|v| v * w);
    }

    let gw3 = a2.t().dot(&dz3);
    let gb3 = dz3.sum_axis(Axis(0));

    let mut dz2 = dz3.dot(&params.w3.t());
    Zip::from(&mut dz2).and(&a2).for_each(|d, &a| {
        *d = *d * act.derivative_from_output(a);
    });
    let gw2 = a1.t().dot(&dz2);
    let gb2 = dz2.sum_axis(Axis(0));

    let mut dz1 = dz2.dot(&params.w2.t());
    Zip::from(&mut dz1).and(&a1).for_each(|d, &a| {
        *d = *d * act.derivative_from_output(a);
    });
    let gw1 = features.t().dot(&dz1);
    let gb1 = dz1.sum_axis(Axis(0));

    Ok(ModelParams {
        w1: gw1,
        b1: gb1,
        w2: gw2,
        b2: gb2,
        w3: gw3,
        b3: gb3,
    })
}

/// Adam moment accumulators plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimState<S: Scalar = f64> {
    pub m: ModelParams<S>,
    pub v: ModelParams<S>,
    pub t: u64,
}

impl<S: Scalar> OptimState<S> {
    pub fn new(params: &ModelParams<S>) -> Self {
        OptimState {
            m: params.zeros_like(),
            v: params.zeros_like(),
            t: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamHyperParams<S: Scalar = f64> {
    pub lr: S,
    pub beta1: S,
    pub beta2: S,
    pub epsilon: S,
}

impl<S: Scalar> AdamHyperParams<S> {
    pub fn with_lr(lr: S) -> Self {
        AdamHyperParams {
            lr,
            beta1: S::from(0.9).unwrap(),
            beta2: S::from(0.999).unwrap(),
            epsilon: S::from(1e-8).unwrap(),
        }
    }
}

fn adam_block<S: Scalar, D: Dimension>(
    p: &mut ndarray::Array<S, D>,
    g: &ndarray::Array<S, D>,
    m: &mut ndarray::Array<S, D>,
    v: &mut ndarray::Array<S, D>,
    hp: &AdamHyperParams<S>,
    bc1: S,
    bc2: S,
) {
    Zip::from(p)
        .and(g)
        .and(m)
        .and(v)
        .for_each(|p, &g, m, v| {
            *m = hp.beta1 * *m + (S::one() - hp.beta1) * g;
            *v = hp.beta2 * *v + (S::one() - hp.beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p = *p - hp.lr * m_hat / (v_hat.sqrt() + hp.epsilon);
        });
}

/// One bias-corrected Adam update; increments the step counter by exactly 1.
pub fn adam_step<S: Scalar>(
    params: &mut ModelParams<S>,
    grads: &Gradients<S>,
    state: &mut OptimState<S>,
    hp: &AdamHyperParams<S>,
) {
    state.t += 1;
    let bc1 = S::one() - hp.beta1.powi(state.t as i32);
    let bc2 = S::one() - hp.beta2.powi(state.t as i32);
    adam_block(&mut params.w1, &grads.w1, &mut state.m.w1, &mut state.v.w1, hp, bc1, bc2);
    adam_block(&mut params.b1, &grads.b1, &mut state.m.b1, &mut state.v.b1, hp, bc1, bc2);
    adam_block(&mut params.w2, &grads.w2, &mut state.m.w2, &mut state.v.w2, hp, bc1, bc2);
    adam_block(&mut params.b2, &grads.b2, &mut state.m.b2, &mut state.v.b2, hp, bc1, bc2);
    adam_block(&mut params.w3, &grads.w3, &mut state.m.w3, &mut state.v.w3, hp, bc1, bc2);
    adam_block(&mut params.b3, &grads.b3, &mut state.m.b3, &mut state.v.b3, hp, bc1, bc2);
}

#[derive(Debug, Clone, Copy)]
pub struct FdOptions {
    /// Central-difference step.
    pub step: f64,
    /// Check every coordinate when the model has at most this many; above it,
    /// a seeded random subset of `subset` coordinates is checked instead.
    pub exhaustive_limit: usize,
    pub subset: usize,
    pub seed: u64,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            step: 1e-5,
            exhaustive_limit: 2048,
            subset: 256,
            seed: 0,
        }
    }
}

/// Compares [`backward`] against central differences of the weighted loss,
/// probing the loss through [`forward`] only. Returns the maximum relative
/// error over the checked coordinates (0 when both sides vanish).
pub fn finite_diff_check<S: Scalar>(
    params: &ModelParams<S>,
    features: &Array2<S>,
    labels: &[usize],
    weights: &Array1<S>,
    act: Activation,
) -> Result<f64> {
    finite_diff_check_with(params, features, labels, weights, act, FdOptions::default())
}

pub fn finite_diff_check_with<S: Scalar>(
    params: &ModelParams<S>,
    features: &Array2<S>,
    labels: &[usize],
    weights: &Array1<S>,
    act: Activation,
    opts: FdOptions,
) -> Result<f64> {
    let grads = backward(params, features, labels, weights, act)?;
    let mut probe = params.clone();
    let total = probe.coord_count();
    let coords: Vec<usize> = if total <= opts.exhaustive_limit {
        (0..total).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rand::seq::index::sample(&mut rng, total, opts.subset.min(total)).into_vec()
    };

    let loss = |p: &ModelParams<S>| -> Result<S> {
        let fwd = forward(p, features, labels, act)?;
        Ok(fwd.per_example_ce.dot(weights))
    };

    let step = S::from(opts.step).unwrap();
    let mut max_rel = 0.0f64;
    for i in coords {
        let orig = probe.coord(i);
        *probe.coord_mut(i) = orig + step;
        let plus = loss(&probe)?;
        *probe.coord_mut(i) = orig - step;
        let minus = loss(&probe)?;
        *probe.coord_mut(i) = orig;

        let numeric = ((plus - minus) / (step + step)).to_f64().unwrap();
        let analytic = grads.coord(i).to_f64().unwrap();
        let denom = numeric.abs().max(analytic.abs()).max(1e-6);
        let rel = (numeric - analytic).abs() / denom;
        if rel > max_rel {
            max_rel = rel;
        }
    }
    Ok(max_rel)
}
