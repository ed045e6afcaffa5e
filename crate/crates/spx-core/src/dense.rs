//! Dense reference layers and the masked-dense oracle used to verify the
//! sparse path.
//!
//! The convolution follows the textbook accumulation with same padding and
//! unit stride, performing exactly H * W * c_out * c_in * K^2 multiplications
//! (padded taps included, matching a fully unrolled hardware loop nest).

use std::collections::HashSet;

use crate::cost::OpCounter;
use crate::error::{Result, SpxError};
use crate::fixed::{div_round_ties_away, requantize_acc, Arithmetic};
use crate::sparse::{ActivationKind, KernelWeights};
use crate::tensor::DenseTensor;

/// Fully-connected layer parameters: out_dim x in_dim weights plus bias.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseParams {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Row-major, `w[out * in_dim + in]`.
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl DenseParams {
    pub fn new(in_dim: usize, out_dim: usize, w: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if w.len() != in_dim * out_dim || b.len() != out_dim {
            return Err(SpxError::InvalidDimensions(format!(
                "dense params: w {} (want {}), b {} (want {})",
                w.len(),
                in_dim * out_dim,
                b.len(),
                out_dim
            )));
        }
        Ok(Self {
            in_dim,
            out_dim,
            w,
            b,
        })
    }
}

/// Standard 2D convolution with same (zero) padding and unit stride.
pub fn conv2d_same(
    x: &DenseTensor,
    kw: &KernelWeights,
    arith: Arithmetic,
    counter: &mut OpCounter,
) -> Result<DenseTensor> {
    if x.c != kw.c_in {
        return Err(SpxError::ChannelMismatch {
            input: x.c,
            expected: kw.c_in,
        });
    }
    let r = kw.radius();
    let mut out = DenseTensor::zeros(x.h, x.w, kw.c_out);
    for i in 0..x.h {
        for j in 0..x.w {
            for c_out in 0..kw.c_out {
                match arith {
                    Arithmetic::Float => {
                        let mut acc = 0.0f64;
                        for kh in 0..kw.k {
                            for kwd in 0..kw.k {
                                counter.mults += kw.c_in as u64;
                                counter.adds += kw.c_in as u64;
                                let ii = i as i64 + kh as i64 - r;
                                let jj = j as i64 + kwd as i64 - r;
                                if ii < 0 || jj < 0 || ii >= x.h as i64 || jj >= x.w as i64 {
                                    continue; // zero padding
                                }
                                let pos = kh * kw.k + kwd;
                                let w_idx = kw.weight_index(pos, c_out, 0);
                                for c_in in 0..kw.c_in {
                                    acc += kw.w[w_idx + c_in]
                                        * x.at(ii as usize, jj as usize, c_in);
                                }
                            }
                        }
                        acc += kw.b[c_out];
                        let idx = out.flat_index(i, j, c_out);
                        out.data[idx] = acc;
                    }
                    Arithmetic::Fixed(fmt) => {
                        let f = fmt.frac_bits();
                        let mut acc = 0i128;
                        for kh in 0..kw.k {
                            for kwd in 0..kw.k {
                                counter.mults += kw.c_in as u64;
                                counter.adds += kw.c_in as u64;
                                let ii = i as i64 + kh as i64 - r;
                                let jj = j as i64 + kwd as i64 - r;
                                if ii < 0 || jj < 0 || ii >= x.h as i64 || jj >= x.w as i64 {
                                    continue;
                                }
                                let pos = kh * kw.k + kwd;
                                let w_idx = kw.weight_index(pos, c_out, 0);
                                for c_in in 0..kw.c_in {
                                    let wr = fmt.to_raw(kw.w[w_idx + c_in]) as i128;
                                    let fr =
                                        fmt.to_raw(x.at(ii as usize, jj as usize, c_in)) as i128;
                                    acc += wr * fr;
                                }
                            }
                        }
                        acc += (fmt.to_raw(kw.b[c_out]) as i128) << f;
                        let idx = out.flat_index(i, j, c_out);
                        out.data[idx] = requantize_acc(acc, 2 * f, fmt).to_f64();
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Zero the tensor outside the active coordinate set (1-based coords).
pub fn mask_to_active(x: &DenseTensor, active: &HashSet<(u32, u32)>) -> DenseTensor {
    let mut out = DenseTensor::zeros(x.h, x.w, x.c);
    for &(h, w) in active {
        let (i, j) = (h as usize - 1, w as usize - 1);
        for c in 0..x.c {
            let idx = out.flat_index(i, j, c);
            out.data[idx] = x.at(i, j, c);
        }
    }
    out
}

/// Ground truth for the sparse convolution: zero the input outside the
/// active set, convolve densely, then zero the output outside the active
/// set again.
pub fn masked_conv_oracle(
    x: &DenseTensor,
    active: &HashSet<(u32, u32)>,
    kw: &KernelWeights,
    arith: Arithmetic,
    counter: &mut OpCounter,
) -> Result<DenseTensor> {
    let masked = mask_to_active(x, active);
    let conv = conv2d_same(&masked, kw, arith, counter)?;
    Ok(mask_to_active(&conv, active))
}

/// Average pooling with window P, zero-padded borders; output dims are
/// ceil(dim / P) and every window divides by P^2.
pub fn avg_pool2d(x: &DenseTensor, p: usize, arith: Arithmetic) -> Result<DenseTensor> {
    if p < 1 {
        return Err(SpxError::InvalidDimensions("pool size must be >= 1".into()));
    }
    let oh = (x.h + p - 1) / p;
    let ow = (x.w + p - 1) / p;
    let mut out = DenseTensor::zeros(oh, ow, x.c);
    for i in 0..oh {
        for j in 0..ow {
            for c in 0..x.c {
                let idx = out.flat_index(i, j, c);
                match arith {
                    Arithmetic::Float => {
                        let mut acc = 0.0f64;
                        for di in 0..p {
                            for dj in 0..p {
                                let (ii, jj) = (i * p + di, j * p + dj);
                                if ii < x.h && jj < x.w {
                                    acc += x.at(ii, jj, c);
                                }
                            }
                        }
                        out.data[idx] = acc / (p * p) as f64;
                    }
                    Arithmetic::Fixed(fmt) => {
                        let mut acc = 0i128;
                        for di in 0..p {
                            for dj in 0..p {
                                let (ii, jj) = (i * p + di, j * p + dj);
                                if ii < x.h && jj < x.w {
                                    acc += fmt.to_raw(x.at(ii, jj, c)) as i128;
                                }
                            }
                        }
                        let raw = div_round_ties_away(acc, (p * p) as i128);
                        out.data[idx] = fmt.from_raw_saturating(raw).to_f64();
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Channel-last flatten; the storage order already matches.
pub fn flatten(x: &DenseTensor) -> Vec<f64> {
    x.data.clone()
}

/// Fully connected layer: `w * v + b`.
pub fn fully_connected(
    v: &[f64],
    params: &DenseParams,
    arith: Arithmetic,
    counter: &mut OpCounter,
) -> Result<Vec<f64>> {
    if v.len() != params.in_dim {
        return Err(SpxError::InvalidDimensions(format!(
            "fully connected input length {} != in_dim {}",
            v.len(),
            params.in_dim
        )));
    }
    let mut out = vec![0.0; params.out_dim];
    for o in 0..params.out_dim {
        counter.mults += params.in_dim as u64;
        counter.adds += params.in_dim as u64;
        match arith {
            Arithmetic::Float => {
                let mut acc = 0.0f64;
                for i in 0..params.in_dim {
                    acc += params.w[o * params.in_dim + i] * v[i];
                }
                out[o] = acc + params.b[o];
            }
            Arithmetic::Fixed(fmt) => {
                let f = fmt.frac_bits();
                let mut acc = 0i128;
                for i in 0..params.in_dim {
                    acc += (fmt.to_raw(params.w[o * params.in_dim + i]) as i128)
                        * (fmt.to_raw(v[i]) as i128);
                }
                acc += (fmt.to_raw(params.b[o]) as i128) << f;
                out[o] = requantize_acc(acc, 2 * f, fmt).to_f64();
            }
        }
    }
    Ok(out)
}

pub fn relu_dense(x: &DenseTensor) -> DenseTensor {
    DenseTensor {
        h: x.h,
        w: x.w,
        c: x.c,
        data: x.data.iter().map(|&v| ActivationKind::Relu.apply(v)).collect(),
    }
}

pub fn act_vec(v: &[f64], kind: ActivationKind) -> Vec<f64> {
    v.iter().map(|&x| kind.apply(x)).collect()
}

/// Single row-major pass collecting the first n_max pixels whose channel-0
/// value exceeds the threshold. This is the independent oracle for the
/// reduction-tree extraction.
pub fn naive_active_scan(
    x: &DenseTensor,
    threshold: f64,
    n_max: usize,
) -> (Vec<(u32, u32)>, Vec<f64>) {
    let mut coords = Vec::new();
    let mut feats = Vec::new();
    'outer: for i in 0..x.h {
        for j in 0..x.w {
            if x.at(i, j, 0) > threshold {
                coords.push((i as u32 + 1, j as u32 + 1));
                for c in 0..x.c {
                    feats.push(x.at(i, j, c));
                }
                if coords.len() == n_max {
                    break 'outer;
                }
            }
        }
    }
    (coords, feats)
}
