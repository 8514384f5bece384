//! Monte Carlo estimates of bubble expectations at small numeric `N`.
//!
//! Each sample draws a complex Gaussian tensor and evaluates the bubble by
//! contracting the tensor network with one `T` per white vertex and one `T̄`
//! per black vertex.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bubble::Bubble;
use crate::error::{Error, Result};

/// Samples evaluated per parallel work unit. Fixed so that partial sums,
/// and hence results, do not depend on the number of workers.
const CHUNK: u64 = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    /// Dimension of every index.
    pub n: usize,
    pub d: usize,
    /// `E|T_a|²`; real and imaginary parts each get half.
    pub variance: f64,
    pub samples: u64,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(n: usize, d: usize, samples: u64, seed: u64) -> Self {
        SampleSpec {
            n,
            d,
            variance: 1.0,
            samples,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::InvalidSampleSpec("N and d must be positive".into()));
        }
        if self.samples < 2 {
            return Err(Error::InvalidSampleSpec(
                "at least two samples are needed".into(),
            ));
        }
        if !(self.variance.is_finite() && self.variance > 0.0) {
            return Err(Error::InvalidSampleSpec(format!(
                "variance {} is not positive",
                self.variance
            )));
        }
        if (self.n as f64).powi(self.d as i32) > 1e8 {
            return Err(Error::InvalidSampleSpec(format!(
                "a tensor with {}^{} entries is too large",
                self.n, self.d
            )));
        }
        Ok(())
    }
}

/// Dense rank-`d` tensor with every index of size `n`, color 1 slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    n: usize,
    d: usize,
    data: Vec<Complex64>,
}

impl Tensor {
    pub fn from_data(n: usize, d: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n.pow(d as u32) {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {n}^{d} tensor",
                data.len()
            )));
        }
        Ok(Tensor { n, d, data })
    }

    /// `v_1 ⊗ v_2 ⊗ … ⊗ v_d`.
    pub fn outer(vectors: &[Vec<Complex64>]) -> Result<Self> {
        let n = vectors.first().map_or(0, Vec::len);
        if n == 0 || vectors.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(
                "factors must share a positive length".into(),
            ));
        }
        let mut data = vec![Complex64::new(1.0, 0.0)];
        for v in vectors {
            data = data
                .iter()
                .flat_map(|a| v.iter().map(move |b| a * b))
                .collect();
        }
        Tensor::from_data(n, vectors.len(), data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scale(&self, z: Complex64) -> Tensor {
        Tensor {
            n: self.n,
            d: self.d,
            data: self.data.iter().map(|x| x * z).collect(),
        }
    }

    /// Acts with the `n × n` row-major matrix `u` on the index of `color`
    /// (1-based): `T'_{…a…} = Σ_b u_{ab} T_{…b…}`.
    pub fn apply_matrix(&self, color: usize, u: &[Complex64]) -> Result<Tensor> {
        let n = self.n;
        if color == 0 || color > self.d {
            return Err(Error::InvalidColor { color, d: self.d });
        }
        if u.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "matrix with {} entries, expected {}",
                u.len(),
                n * n
            )));
        }
        let inner = n.pow((self.d - color) as u32);
        let outer = n.pow((color - 1) as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); self.data.len()];
        for o in 0..outer {
            for a in 0..n {
                for b in 0..n {
                    let w = u[a * n + b];
                    let src = (o * n + b) * inner;
                    let dst = (o * n + a) * inner;
                    for i in 0..inner {
                        out[dst + i] += w * self.data[src + i];
                    }
                }
            }
        }
        Tensor::from_data(n, self.d, out)
    }
}

/// The `index`-th sample of `spec`: entries drawn in storage order from a
/// ChaCha8 stream keyed by `(seed, index)`.
pub fn sample_tensor(spec: &SampleSpec, index: u64) -> Tensor {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let s = (spec.variance / 2.0).sqrt();
    let len = spec.n.pow(spec.d as u32);
    let data = (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(s * re, s * im)
        })
        .collect();
    Tensor {
        n: spec.n,
        d: spec.d,
        data,
    }
}

/// Intermediate network node: its open legs (edge ids) and dense data.
struct Node {
    legs: Vec<usize>,
    data: Vec<Complex64>,
}

/// Edge `c·n + i` joins white `i` to black `τ_c(i)` along color `c`.
fn network_legs(b: &Bubble) -> Vec<Vec<usize>> {
    let n = b.n();
    let mut legs = vec![Vec::with_capacity(b.d()); 2 * n];
    for (c, tau) in b.color_maps().iter().enumerate() {
        for i in 0..n {
            legs[i].push(c * n + i);
            legs[n + tau.image(i)].push(c * n + i);
        }
    }
    legs
}

/// Order in which network nodes are merged: step `(i, j)` contracts node
/// `j` into node `i`. Nodes `0..n` are the white vertices, `n..2n` the black.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionPlan {
    steps: Vec<(usize, usize)>,
}

impl ContractionPlan {
    /// Repeatedly merges the adjacent pair with the smallest result.
    pub fn greedy(b: &Bubble) -> Self {
        let mut legs: Vec<Option<Vec<usize>>> = network_legs(b).into_iter().map(Some).collect();
        let mut steps = Vec::new();
        while legs.iter().flatten().count() > 1 {
            let mut best: Option<(usize, usize, usize)> = None;
            for (i, a) in legs.iter().enumerate() {
                let Some(a) = a else { continue };
                for (j, bl) in legs.iter().enumerate().skip(i + 1) {
                    let Some(bl) = bl else { continue };
                    let shared = a.iter().filter(|x| bl.contains(x)).count();
                    if shared == 0 {
                        continue;
                    }
                    let rank = a.len() + bl.len() - 2 * shared;
                    if best.is_none_or(|(r, _, _)| rank < r) {
                        best = Some((rank, i, j));
                    }
                }
            }
            let (_, i, j) = best.expect("bubbles are connected");
            let merged = merge_legs(legs[i].as_ref().unwrap(), legs[j].as_ref().unwrap());
            legs[i] = Some(merged.0);
            legs[j] = None;
            steps.push((i, j));
        }
        ContractionPlan { steps }
    }

    /// Absorbs nodes `1, 2, …` into node 0 in index order.
    pub fn sequential(b: &Bubble) -> Self {
        ContractionPlan {
            steps: (1..2 * b.n()).map(|j| (0, j)).collect(),
        }
    }

    pub fn steps(&self) -> &[(usize, usize)] {
        &self.steps
    }
}

/// Free legs of `a`, free legs of `b`, and shared legs, in that order.
fn merge_legs(a: &[usize], b: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>) {
    let shared: Vec<usize> = a.iter().copied().filter(|x| b.contains(x)).collect();
    let fa: Vec<usize> = a.iter().copied().filter(|x| !shared.contains(x)).collect();
    let fb: Vec<usize> = b.iter().copied().filter(|x| !shared.contains(x)).collect();
    let mut out = fa.clone();
    out.extend(&fb);
    (out, fa, fb, shared)
}

/// Reorders axes: the result has legs `to`, a permutation of `from`.
fn permute(data: &[Complex64], from: &[usize], to: &[usize], n: usize) -> Vec<Complex64> {
    if from == to {
        return data.to_vec();
    }
    let r = from.len();
    let mut in_stride = vec![1usize; r];
    for k in (0..r.saturating_sub(1)).rev() {
        in_stride[k] = in_stride[k + 1] * n;
    }
    let strides: Vec<usize> = to
        .iter()
        .map(|leg| in_stride[from.iter().position(|x| x == leg).expect("same legs")])
        .collect();
    let mut out = Vec::with_capacity(data.len());
    let mut idx = vec![0usize; r];
    let mut offset = 0usize;
    for _ in 0..data.len() {
        out.push(data[offset]);
        for k in (0..r).rev() {
            idx[k] += 1;
            offset += strides[k];
            if idx[k] < n {
                break;
            }
            offset -= strides[k] * n;
            idx[k] = 0;
        }
    }
    out
}

fn contract(a: Node, b: Node, n: usize) -> Node {
    let (legs, fa, fb, shared) = merge_legs(&a.legs, &b.legs);
    let mut a_order = fa.clone();
    a_order.extend(&shared);
    let mut b_order = shared.clone();
    b_order.extend(&fb);
    let am = permute(&a.data, &a.legs, &a_order, n);
    let bm = permute(&b.data, &b.legs, &b_order, n);
    let rows = n.pow(fa.len() as u32);
    let inner = n.pow(shared.len() as u32);
    let cols = n.pow(fb.len() as u32);
    let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
    for i in 0..rows {
        let out = &mut data[i * cols..(i + 1) * cols];
        for k in 0..inner {
            let x = am[i * inner + k];
            let brow = &bm[k * cols..(k + 1) * cols];
            for (o, y) in out.iter_mut().zip(brow) {
                *o += x * y;
            }
        }
    }
    Node { legs, data }
}

fn check_dims(b: &Bubble, t: &Tensor) -> Result<()> {
    if b.d() != t.d {
        return Err(Error::DimensionMismatch(format!(
            "bubble has {} colors, tensor has rank {}",
            b.d(),
            t.d
        )));
    }
    Ok(())
}

pub fn evaluate_bubble(b: &Bubble, t: &Tensor) -> Result<Complex64> {
    evaluate_with_plan(b, t, &ContractionPlan::greedy(b))
}

pub fn evaluate_with_plan(b: &Bubble, t: &Tensor, plan: &ContractionPlan) -> Result<Complex64> {
    check_dims(b, t)?;
    let n = b.n();
    let conj: Vec<Complex64> = t.data.iter().map(Complex64::conj).collect();
    let mut nodes: Vec<Option<Node>> = network_legs(b)
        .into_iter()
        .enumerate()
        .map(|(v, legs)| {
            Some(Node {
                legs,
                data: if v < n { t.data.clone() } else { conj.clone() },
            })
        })
        .collect();
    for &(i, j) in &plan.steps {
        let a = nodes[i].take().expect("plan refers to a live node");
        let bn = nodes[j].take().expect("plan refers to a live node");
        nodes[i] = Some(contract(a, bn, t.n));
    }
    let last = nodes
        .into_iter()
        .flatten()
        .next()
        .expect("one node remains");
    debug_assert!(last.legs.is_empty());
    Ok(last.data[0])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    /// Sample mean of the imaginary parts.
    pub imag_mean: f64,
}

/// Count, mean and sum of squared deviations of a block of samples.
#[derive(Clone, Copy)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
    imag_sum: f64,
}

impl Moments {
    fn of(values: &[Complex64]) -> Self {
        let count = values.len() as f64;
        let mean = values.iter().map(|z| z.re).sum::<f64>() / count;
        let m2 = values.iter().map(|z| (z.re - mean).powi(2)).sum();
        let imag_sum = values.iter().map(|z| z.im).sum();
        Moments {
            count,
            mean,
            m2,
            imag_sum,
        }
    }

    fn combine(self, o: Moments) -> Moments {
        let count = self.count + o.count;
        let delta = o.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * o.count / count,
            m2: self.m2 + o.m2 + delta * delta * self.count * o.count / count,
            imag_sum: self.imag_sum + o.imag_sum,
        }
    }
}

/// Mean of `Re B` over `spec.samples` draws with its standard error.
pub fn estimate_expectation(b: &Bubble, spec: &SampleSpec) -> Result<Estimate> {
    spec.validate()?;
    if spec.d != b.d() {
        return Err(Error::DimensionMismatch(format!(
            "bubble has {} colors, sampling spec has d = {}",
            b.d(),
            spec.d
        )));
    }
    let plan = ContractionPlan::greedy(b);
    let chunks = spec.samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let values: Vec<Complex64> = (c * CHUNK..((c + 1) * CHUNK).min(spec.samples))
                .map(|i| {
                    evaluate_with_plan(b, &sample_tensor(spec, i), &plan)
                        .expect("dimensions checked")
                })
                .collect();
            Moments::of(&values)
        })
        .collect();
    let total = parts
        .into_iter()
        .reduce(Moments::combine)
        .expect("at least one chunk");
    let variance = total.m2 / (total.count - 1.0);
    Ok(Estimate {
        mean: total.mean,
        stderr: (variance / total.count).sqrt(),
        samples: spec.samples,
        seed: spec.seed,
        imag_mean: total.imag_sum / total.count,
    })
}

/// Haar-distributed unitary `n × n` matrix (row-major), by Gram–Schmidt on
/// a complex Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut rows: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    for i in 0..n {
        for j in 0..i {
            let proj: Complex64 = rows[j]
                .iter()
                .zip(&rows[i])
                .map(|(a, b)| a.conj() * b)
                .sum();
            let prev = rows[j].clone();
            for (x, p) in rows[i].iter_mut().zip(prev) {
                *x -= proj * p;
            }
        }
        let norm = rows[i].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in rows[i].iter_mut() {
            *x /= norm;
        }
    }
    rows.concat()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubble::{dipole, necklace, partial_trace_pair, ColorSplit};
    use crate::oracle::per_color_dimensions;
    use crate::tree::CornerLabeledTree;
    use num_traits::ToPrimitive;

    fn split24() -> ColorSplit {
        ColorSplit::new(4, [2, 4]).unwrap()
    }

    fn test_bubbles() -> Vec<Bubble> {
        vec![
            dipole(4).unwrap(),
            partial_trace_pair(1, 1).unwrap(),
            partial_trace_pair(2, 1).unwrap(),
            necklace(&split24(), 2).unwrap(),
            necklace(&ColorSplit::new(4, [1]).unwrap(), 3).unwrap(),
            CornerLabeledTree::new(
                1,
                vec![1, 0],
                vec![CornerLabeledTree::new(
                    1,
                    vec![1, 0],
                    vec![CornerLabeledTree::leaf(3, 1)],
                )],
            )
            .to_bubble()
            .unwrap(),
        ]
    }

    fn unit(n: usize, k: usize, phase: f64) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k] = Complex64::from_polar(1.0, phase);
        v
    }

    #[test]
    fn rank_one_pair_evaluates_to_one() {
        let t = Tensor::outer(&[
            unit(3, 0, 0.3),
            unit(3, 2, 1.1),
            unit(3, 1, -0.4),
            unit(3, 0, 2.0),
        ])
        .unwrap();
        for (k, l) in [(1, 1), (2, 1), (2, 3)] {
            let v = evaluate_bubble(&partial_trace_pair(k, l).unwrap(), &t).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn dipole_is_squared_norm() {
        let spec = SampleSpec::new(2, 4, 2, 5);
        let t = sample_tensor(&spec, 0);
        let v = evaluate_bubble(&dipole(4).unwrap(), &t).unwrap();
        let norm: f64 = t.data().iter().map(|z| z.norm_sqr()).sum();
        assert!((v.re - norm).abs() < 1e-12 * norm && v.im.abs() < 1e-12 * norm);
    }

    #[test]
    fn sampling_is_deterministic_per_index() {
        let spec = SampleSpec::new(3, 3, 10, 42);
        assert_eq!(sample_tensor(&spec, 4), sample_tensor(&spec, 4));
        assert_ne!(sample_tensor(&spec, 4), sample_tensor(&spec, 5));
    }

    #[test]
    fn distinct_indices_are_uncorrelated() {
        let spec = SampleSpec::new(4, 4, 10, 1);
        let a = sample_tensor(&spec, 0);
        let b = sample_tensor(&spec, 1);
        let len = a.data().len() as f64;
        // normalized real correlation ~ N(0, 1/len) under independence
        let corr: f64 = a
            .data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| x.re * y.re)
            .sum::<f64>()
            * 2.0
            / len;
        assert!(corr.abs() < 5.0 / len.sqrt(), "{corr}");
    }

    #[test]
    fn phase_invariance() {
        let spec = SampleSpec::new(2, 4, 2, 9);
        let t = sample_tensor(&spec, 0);
        let tt = t.scale(Complex64::from_polar(1.0, 0.7));
        for b in test_bubbles() {
            let (x, y) = (
                evaluate_bubble(&b, &t).unwrap(),
                evaluate_bubble(&b, &tt).unwrap(),
            );
            assert!((x - y).norm() <= 1e-10 * x.norm().max(1.0));
        }
    }

    #[test]
    fn unitary_invariance() {
        let spec = SampleSpec::new(3, 4, 2, 11);
        let t = sample_tensor(&spec, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut rotated = t.clone();
        for c in 1..=4 {
            rotated = rotated
                .apply_matrix(c, &random_unitary(3, &mut rng))
                .unwrap();
        }
        for b in test_bubbles() {
            let (x, y) = (
                evaluate_bubble(&b, &t).unwrap(),
                evaluate_bubble(&b, &rotated).unwrap(),
            );
            assert!((x - y).norm() <= 1e-8 * x.norm(), "{x} vs {y}");
        }
    }

    #[test]
    fn contraction_order_independence() {
        let spec = SampleSpec::new(3, 4, 2, 3);
        let t = sample_tensor(&spec, 1);
        for b in test_bubbles() {
            let x = evaluate_with_plan(&b, &t, &ContractionPlan::greedy(&b)).unwrap();
            let y = evaluate_with_plan(&b, &t, &ContractionPlan::sequential(&b)).unwrap();
            assert!((x - y).norm() <= 1e-9 * x.norm(), "{x} vs {y}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(SampleSpec::new(2, 4, 1, 0).validate().is_err());
        assert!(SampleSpec::new(0, 4, 10, 0).validate().is_err());
        let t = sample_tensor(&SampleSpec::new(2, 3, 2, 0), 0);
        assert!(evaluate_bubble(&dipole(4).unwrap(), &t).is_err());
    }

    #[test]
    fn estimates_agree_with_oracle() {
        for b in test_bubbles().into_iter().take(4) {
            let spec = SampleSpec::new(2, 4, 20_000, 7);
            let est = estimate_expectation(&b, &spec).unwrap();
            let exact = per_color_dimensions(&b, &[2; 4]).unwrap().to_f64().unwrap();
            assert!(
                (est.mean - exact).abs() < 5.0 * est.stderr,
                "{est:?} vs {exact}"
            );
            assert!(est.imag_mean.abs() < 1e-8 * est.mean.abs(), "{est:?}");
        }
    }

    #[test]
    fn variance_scales_expectation() {
        let mut spec = SampleSpec::new(2, 4, 20_000, 3);
        spec.variance = 2.0;
        let est = estimate_expectation(&dipole(4).unwrap(), &spec).unwrap();
        assert!((est.mean - 32.0).abs() < 5.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let b = partial_trace_pair(1, 1).unwrap();
        let spec = SampleSpec::new(2, 4, 5_000, 7);
        let outs: Vec<String> = [1, 2, 8]
            .into_iter()
            .map(|k| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .unwrap()
                    .install(|| {
                        serde_json::to_string(&estimate_expectation(&b, &spec).unwrap()).unwrap()
                    })
            })
            .collect();
        assert!(outs.windows(2).all(|w| w[0] == w[1]));
    }
}
