//! The five sparse layers: input reduction, convolution, activation,
//! average pooling, and flattening.
//!
//! Active pixels live in two compact arrays: the feature array (all C
//! channel values per retained pixel) and the hash array (1-based height
//! and width coordinates). The coordinate pair (0, 0) is the padding
//! sentinel; sentinel slots carry all-zero features and are excluded from
//! computation. Convolution and activation never touch the hash array, so
//! the active set cannot dilate.

use crate::cost::OpCounter;
use crate::error::{Result, SpxError};
use crate::fixed::{div_round_ties_away, requantize_acc, Arithmetic};
use crate::tensor::DenseTensor;

/// Compact sparse representation of up to `n_max` active pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseBundle {
    pub n_max: usize,
    pub channels: usize,
    pub grid_h: usize,
    pub grid_w: usize,
    /// Feature array, length `n_max * channels`.
    pub feat: Vec<f64>,
    /// Hash array, length `n_max * 2`; entry 2i is the height coordinate,
    /// 2i+1 the width coordinate, both 1-based. (0, 0) marks a sentinel.
    pub hash: Vec<u32>,
}

impl SparseBundle {
    pub fn empty(n_max: usize, channels: usize, grid_h: usize, grid_w: usize) -> Self {
        Self {
            n_max,
            channels,
            grid_h,
            grid_w,
            feat: vec![0.0; n_max * channels],
            hash: vec![0; n_max * 2],
        }
    }

    #[inline]
    pub fn coord(&self, slot: usize) -> (u32, u32) {
        (self.hash[2 * slot], self.hash[2 * slot + 1])
    }

    #[inline]
    pub fn is_sentinel(&self, slot: usize) -> bool {
        self.hash[2 * slot] == 0 && self.hash[2 * slot + 1] == 0
    }

    pub fn active_count(&self) -> usize {
        (0..self.n_max).filter(|&i| !self.is_sentinel(i)).count()
    }

    /// Debug dump: one line per slot, `i h w f0 f1 ... fC-1`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n_max {
            let (h, w) = self.coord(i);
            out.push_str(&format!("{} {} {}", i, h, w));
            for c in 0..self.channels {
                out.push_str(&format!(" {}", self.feat[self.channels * i + c]));
            }
            out.push('\n');
        }
        out
    }
}

/// Activity threshold and retained-pixel bound for input reduction.
#[derive(Debug, Clone, Copy)]
pub struct ReduceConfig {
    pub threshold: f64,
    pub n_max: usize,
}

/// Kernel weights in the flat ordering pixel_pos -> ch_out -> ch_in,
/// plus per-output-channel bias.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    pub k: usize,
    pub c_in: usize,
    pub c_out: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl KernelWeights {
    pub fn new(k: usize, c_in: usize, c_out: usize, w: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if k % 2 == 0 {
            return Err(SpxError::InvalidDimensions(format!(
                "kernel size {} must be odd",
                k
            )));
        }
        if w.len() != k * k * c_in * c_out {
            return Err(SpxError::InvalidDimensions(format!(
                "weight length {} != {}^2 * {} * {}",
                w.len(),
                k,
                c_in,
                c_out
            )));
        }
        if b.len() != c_out {
            return Err(SpxError::InvalidDimensions(format!(
                "bias length {} != c_out {}",
                b.len(),
                c_out
            )));
        }
        Ok(Self { k, c_in, c_out, w, b })
    }

    /// Flat weight index of (spatial position, output channel, input channel).
    #[inline]
    pub fn weight_index(&self, pos: usize, c_out: usize, c_in: usize) -> usize {
        self.c_out * self.c_in * pos + self.c_in * c_out + c_in
    }

    pub fn radius(&self) -> i64 {
        ((self.k - 1) / 2) as i64
    }
}

/// Map a coordinate offset (output - input) to the flat kernel position,
/// or None when outside the K x K field.
#[inline]
pub fn offset_to_pos(dh: i64, dw: i64, k: usize) -> Option<usize> {
    let r = ((k - 1) / 2) as i64;
    if dh.abs() > r || dw.abs() > r {
        None
    } else {
        Some(((r - dh) * k as i64 + (r - dw)) as usize)
    }
}

/// One element of the reduction scan: channel-0 value plus flat pixel index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanItem {
    pub value: f64,
    pub index: usize,
}

impl ScanItem {
    /// "No active pixel" marker. The value is -inf rather than 0 so the
    /// marker can never out-compare a real pixel, even under a negative
    /// activity threshold.
    pub const INACTIVE: ScanItem = ScanItem {
        value: f64::NEG_INFINITY,
        index: 0,
    };
}

/// Pairwise combiner: left element if above threshold, else right, else (0, 0).
pub fn op_active(a: ScanItem, b: ScanItem, t: f64) -> ScanItem {
    if a.value > t {
        a
    } else if b.value > t {
        b
    } else {
        ScanItem::INACTIVE
    }
}

fn find_active_rec(items: &[ScanItem], t: f64, counter: &mut OpCounter) -> (ScanItem, u32) {
    let n = items.len();
    if n == 1 {
        return (items[0], 0);
    }
    if n == 2 {
        counter.compares += 2;
        return (op_active(items[0], items[1], t), 1);
    }
    // left partition is the largest power of two strictly below n
    let n_left = 1usize << (usize::BITS - 1 - (n - 1).leading_zeros());
    let (u, du) = find_active_rec(&items[..n_left], t, counter);
    let (v, dv) = find_active_rec(&items[n_left..], t, counter);
    counter.compares += 2;
    (op_active(u, v, t), 1 + du.max(dv))
}

/// Leftmost element with value above threshold via fixed-shape recursive
/// reduction, or (0, 0) if none. Also returns the recursion depth, which
/// equals ceil(log2 N) for N >= 2.
pub fn find_active_instrumented(
    items: &[ScanItem],
    t: f64,
    counter: &mut OpCounter,
) -> Result<(ScanItem, u32)> {
    if items.is_empty() {
        return Err(SpxError::EmptyScan);
    }
    let (item, d) = find_active_rec(items, t, counter);
    // leaves pass through unfiltered inside the tree (the parent node filters
    // them), so an inactive result must be normalized here at the root
    if item.value > t {
        Ok((item, d))
    } else {
        Ok((ScanItem::INACTIVE, d))
    }
}

pub fn find_active(items: &[ScanItem], t: f64) -> Result<ScanItem> {
    let mut ctr = OpCounter::default();
    find_active_instrumented(items, t, &mut ctr).map(|(item, _)| item)
}

/// Extract up to `n_max` active pixels from the input, leftmost-first in
/// row-major order, into a sparse bundle. Activity is tested on channel 0
/// with a strict greater-than comparison. Consumed pixels are masked so the
/// next reduction reveals the next active; remaining slots become sentinels
/// with all-zero features.
pub fn sparse_input_reduce(
    x: &DenseTensor,
    cfg: &ReduceConfig,
    counter: &mut OpCounter,
) -> Result<SparseBundle> {
    if x.c < 1 || cfg.n_max < 1 {
        return Err(SpxError::InvalidDimensions(
            "input reduce needs C >= 1 and n_max >= 1".into(),
        ));
    }
    let n = x.h * x.w;
    let mut scan: Vec<ScanItem> = (0..n)
        .map(|j| ScanItem {
            value: x.data[x.c * j],
            index: j,
        })
        .collect();

    let mut out = SparseBundle::empty(cfg.n_max, x.c, x.h, x.w);
    for i in 0..cfg.n_max {
        let (p, _) = find_active_instrumented(&scan, cfg.threshold, counter)?;
        if p.value > cfg.threshold {
            for c in 0..x.c {
                out.feat[x.c * i + c] = x.data[x.c * p.index + c];
            }
            out.hash[2 * i] = (p.index / x.w + 1) as u32;
            out.hash[2 * i + 1] = (p.index % x.w + 1) as u32;
            // mask the consumed pixel; -inf keeps the mask inert even for
            // negative thresholds, where masking to zero would re-trigger
            scan[p.index].value = f64::NEG_INFINITY;
        }
        // else: slot stays a sentinel with zero features
    }
    Ok(out)
}

/// Sparsity-preserving convolution over sparse arrays. The hash array is
/// returned unchanged; only features are updated. The multiply-accumulate
/// count is exactly n_max^2 * c_in * c_out regardless of kernel size.
pub fn sparse_conv(
    input: &SparseBundle,
    kw: &KernelWeights,
    arith: Arithmetic,
    counter: &mut OpCounter,
) -> Result<SparseBundle> {
    if input.channels != kw.c_in {
        return Err(SpxError::ChannelMismatch {
            input: input.channels,
            expected: kw.c_in,
        });
    }
    let n = input.n_max;
    let mut out = SparseBundle {
        n_max: n,
        channels: kw.c_out,
        grid_h: input.grid_h,
        grid_w: input.grid_w,
        feat: vec![0.0; n * kw.c_out],
        hash: input.hash.clone(),
    };

    for p_out in 0..n {
        let (oh, ow) = input.coord(p_out);
        for c_out in 0..kw.c_out {
            match arith {
                Arithmetic::Float => {
                    let mut acc = 0.0f64;
                    for p_in in 0..n {
                        let (ih, iw) = input.coord(p_in);
                        counter.mults += kw.c_in as u64;
                        counter.adds += kw.c_in as u64;
                        let dh = oh as i64 - ih as i64;
                        let dw = ow as i64 - iw as i64;
                        if let Some(pos) = offset_to_pos(dh, dw, kw.k) {
                            let w_idx = kw.weight_index(pos, c_out, 0);
                            for c_in in 0..kw.c_in {
                                acc += kw.w[w_idx + c_in] * input.feat[kw.c_in * p_in + c_in];
                            }
                        }
                    }
                    acc += kw.b[c_out];
                    if out.is_sentinel(p_out) {
                        acc = 0.0;
                    }
                    out.feat[kw.c_out * p_out + c_out] = acc;
                }
                Arithmetic::Fixed(fmt) => {
                    let f = fmt.frac_bits();
                    let mut acc = 0i128;
                    for p_in in 0..n {
                        let (ih, iw) = input.coord(p_in);
                        counter.mults += kw.c_in as u64;
                        counter.adds += kw.c_in as u64;
                        let dh = oh as i64 - ih as i64;
                        let dw = ow as i64 - iw as i64;
                        if let Some(pos) = offset_to_pos(dh, dw, kw.k) {
                            let w_idx = kw.weight_index(pos, c_out, 0);
                            for c_in in 0..kw.c_in {
                                let wr = fmt.to_raw(kw.w[w_idx + c_in]) as i128;
                                let fr = fmt.to_raw(input.feat[kw.c_in * p_in + c_in]) as i128;
                                acc += wr * fr;
                            }
                        }
                    }
                    acc += (fmt.to_raw(kw.b[c_out]) as i128) << f;
                    let v = if out.is_sentinel(p_out) {
                        0.0
                    } else {
                        requantize_acc(acc, 2 * f, fmt).to_f64()
                    };
                    out.feat[kw.c_out * p_out + c_out] = v;
                }
            }
        }
    }
    Ok(out)
}

/// Element-wise activation kinds supported by the sparse layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationKind {
    Relu,
    Linear,
}

impl ActivationKind {
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            ActivationKind::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            ActivationKind::Linear => x,
        }
    }
}

/// Element-wise activation on the feature array; hash unchanged.
pub fn sparse_activation(
    input: &SparseBundle,
    kind: ActivationKind,
    counter: &mut OpCounter,
) -> SparseBundle {
    let mut out = input.clone();
    for v in out.feat.iter_mut() {
        counter.compares += 1;
        *v = kind.apply(*v);
    }
    out
}

/// Average pooling on sparse arrays. Pixels mapping to the same pool are
/// summed into the first (representative) slot and divided by P^2; later
/// duplicates are demoted to sentinels so the downstream scatter stays
/// order-independent. The pooled grid is ceil(grid / P).
pub fn sparse_avg_pool(
    input: &SparseBundle,
    p: usize,
    arith: Arithmetic,
    counter: &mut OpCounter,
) -> Result<SparseBundle> {
    if p < 1 {
        return Err(SpxError::InvalidDimensions("pool size must be >= 1".into()));
    }
    let n = input.n_max;
    let c = input.channels;
    let pooled: Vec<(u32, u32)> = (0..n)
        .map(|i| {
            let (h, w) = input.coord(i);
            if h == 0 && w == 0 {
                (0, 0)
            } else {
                ((h - 1) / p as u32 + 1, (w - 1) / p as u32 + 1)
            }
        })
        .collect();

    let mut out = SparseBundle::empty(
        n,
        c,
        (input.grid_h + p - 1) / p,
        (input.grid_w + p - 1) / p,
    );
    let mut consumed = vec![false; n];
    let p2 = (p * p) as i128;

    for i in 0..n {
        if pooled[i] == (0, 0) || consumed[i] {
            continue; // sentinel input or duplicate already folded in
        }
        out.hash[2 * i] = pooled[i].0;
        out.hash[2 * i + 1] = pooled[i].1;
        match arith {
            Arithmetic::Float => {
                for ch in 0..c {
                    let mut acc = 0.0f64;
                    for j in i..n {
                        counter.compares += 1;
                        if pooled[j] == pooled[i] {
                            counter.adds += 1;
                            acc += input.feat[c * j + ch];
                        }
                    }
                    out.feat[c * i + ch] = acc / (p * p) as f64;
                }
            }
            Arithmetic::Fixed(fmt) => {
                for ch in 0..c {
                    let mut acc = 0i128;
                    for j in i..n {
                        counter.compares += 1;
                        if pooled[j] == pooled[i] {
                            counter.adds += 1;
                            acc += fmt.to_raw(input.feat[c * j + ch]) as i128;
                        }
                    }
                    let raw = div_round_ties_away(acc, p2);
                    out.feat[c * i + ch] = fmt.from_raw_saturating(raw).to_f64();
                }
            }
        }
        for j in (i + 1)..n {
            if pooled[j] == pooled[i] {
                consumed[j] = true;
            }
        }
    }
    Ok(out)
}

/// Scatter the sparse pixels into a flat dense channel-last array of length
/// grid_h * grid_w * C. Contributions are added, sentinels skipped.
pub fn sparse_flatten(input: &SparseBundle) -> Vec<f64> {
    let c = input.channels;
    let mut out = vec![0.0; input.grid_h * input.grid_w * c];
    for i in 0..input.n_max {
        if input.is_sentinel(i) {
            continue;
        }
        let (h, w) = input.coord(i);
        let pix = (h as usize - 1) * input.grid_w + (w as usize - 1);
        for ch in 0..c {
            out[c * pix + ch] += input.feat[c * i + ch];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(value: f64, index: usize) -> ScanItem {
        ScanItem { value, index }
    }

    #[test]
    fn op_active_branches() {
        assert_eq!(op_active(item(0.7, 3), item(0.2, 9), 0.5), item(0.7, 3));
        assert_eq!(op_active(item(0.1, 3), item(0.6, 9), 0.5), item(0.6, 9));
        assert_eq!(op_active(item(0.1, 3), item(0.2, 9), 0.5), ScanItem::INACTIVE);
    }

    #[test]
    fn op_active_threshold_is_strict() {
        assert_eq!(op_active(item(0.5, 3), item(0.5, 9), 0.5), ScanItem::INACTIVE);
    }

    #[test]
    fn find_active_leftmost() {
        let v = vec![item(0.0, 1), item(0.0, 2), item(9.0, 5), item(4.0, 7)];
        assert_eq!(find_active(&v, 0.0).unwrap(), item(9.0, 5));
    }

    #[test]
    fn find_active_none_active() {
        let v = vec![item(0.0, 1), item(0.0, 2), item(0.0, 3)];
        assert_eq!(find_active(&v, 0.0).unwrap(), ScanItem::INACTIVE);
    }

    #[test]
    fn find_active_single_element() {
        let v = vec![item(3.0, 4)];
        assert_eq!(find_active(&v, 0.0).unwrap(), item(3.0, 4));
    }

    #[test]
    fn find_active_empty_is_error() {
        assert!(find_active(&[], 0.0).is_err());
    }

    #[test]
    fn find_active_matches_naive_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..200);
            let t = if rng.gen_bool(0.5) { 0.0 } else { 0.3 };
            let v: Vec<ScanItem> = (0..n)
                .map(|i| item(if rng.gen_bool(0.3) { rng.gen_range(0.0..1.0) } else { 0.0 }, i))
                .collect();
            let naive = v
                .iter()
                .find(|s| s.value > t)
                .copied()
                .unwrap_or(ScanItem::INACTIVE);
            assert_eq!(find_active(&v, t).unwrap(), naive);
        }
    }

    #[test]
    fn find_active_depth_is_ceil_log2() {
        let mut ctr = OpCounter::default();
        for n in 2usize..=4096 {
            let v: Vec<ScanItem> = (0..n).map(|i| item(0.0, i)).collect();
            let (_, depth) = find_active_instrumented(&v, 0.0, &mut ctr).unwrap();
            let expected = (usize::BITS - (n - 1).leading_zeros()) as u32;
            assert_eq!(depth, expected, "n = {}", n);
        }
    }

    fn tensor3x3() -> DenseTensor {
        DenseTensor::from_data(
            3,
            3,
            1,
            vec![0.0, 5.0, 0.0, 0.0, 0.0, 7.0, 2.0, 0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn reduce_truncates_at_n_max() {
        let mut ctr = OpCounter::default();
        let b = sparse_input_reduce(
            &tensor3x3(),
            &ReduceConfig {
                threshold: 0.0,
                n_max: 2,
            },
            &mut ctr,
        )
        .unwrap();
        assert_eq!(b.feat, vec![5.0, 7.0]);
        assert_eq!(b.hash, vec![1, 2, 2, 3]);
    }

    #[test]
    fn reduce_pads_with_sentinels() {
        let mut ctr = OpCounter::default();
        let b = sparse_input_reduce(
            &tensor3x3(),
            &ReduceConfig {
                threshold: 0.0,
                n_max: 4,
            },
            &mut ctr,
        )
        .unwrap();
        assert_eq!(b.feat, vec![5.0, 7.0, 2.0, 0.0]);
        assert_eq!(b.hash, vec![1, 2, 2, 3, 3, 1, 0, 0]);
    }

    #[test]
    fn reduce_all_zero_image() {
        let mut ctr = OpCounter::default();
        let x = DenseTensor::zeros(3, 3, 1);
        let b = sparse_input_reduce(
            &x,
            &ReduceConfig {
                threshold: 0.0,
                n_max: 3,
            },
            &mut ctr,
        )
        .unwrap();
        assert_eq!(b.active_count(), 0);
        assert!(b.feat.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reduce_negative_threshold_keeps_distinct_pixels() {
        let mut ctr = OpCounter::default();
        let x = DenseTensor::zeros(2, 2, 1);
        let b = sparse_input_reduce(
            &x,
            &ReduceConfig {
                threshold: -1.0,
                n_max: 4,
            },
            &mut ctr,
        )
        .unwrap();
        // every zero pixel is above -1; all four must appear exactly once
        assert_eq!(b.hash, vec![1, 1, 1, 2, 2, 1, 2, 2]);
    }

    #[test]
    fn offset_pos_formula() {
        assert_eq!(offset_to_pos(0, 0, 3), Some(4));
        assert_eq!(offset_to_pos(1, 1, 3), Some(0));
        assert_eq!(offset_to_pos(-1, -1, 3), Some(8));
        assert_eq!(offset_to_pos(2, 0, 3), None);
    }

    #[test]
    fn conv_two_neighbors_all_ones() {
        let mut b = SparseBundle::empty(2, 1, 4, 4);
        b.hash = vec![2, 2, 2, 3];
        b.feat = vec![2.0, 3.0];
        let kw = KernelWeights::new(3, 1, 1, vec![1.0; 9], vec![0.0]).unwrap();
        let mut ctr = OpCounter::default();
        let out = sparse_conv(&b, &kw, Arithmetic::Float, &mut ctr).unwrap();
        assert_eq!(out.feat, vec![5.0, 5.0]);
        assert_eq!(out.hash, b.hash);
    }

    #[test]
    fn conv_isolated_pixels_see_only_center_weight() {
        let mut b = SparseBundle::empty(2, 1, 10, 10);
        b.hash = vec![1, 1, 9, 9];
        b.feat = vec![2.0, -3.0];
        let mut w = vec![0.5; 9];
        w[4] = 2.0;
        let kw = KernelWeights::new(3, 1, 1, w, vec![0.25]).unwrap();
        let mut ctr = OpCounter::default();
        let out = sparse_conv(&b, &kw, Arithmetic::Float, &mut ctr).unwrap();
        assert_eq!(out.feat, vec![2.0 * 2.0 + 0.25, -3.0 * 2.0 + 0.25]);
    }

    #[test]
    fn conv_mac_count_independent_of_k() {
        let mut b = SparseBundle::empty(6, 2, 16, 16);
        b.hash[..4].copy_from_slice(&[3, 3, 8, 8]);
        b.feat[0] = 1.0;
        for &k in &[3usize, 5] {
            let kw =
                KernelWeights::new(k, 2, 3, vec![0.1; k * k * 6], vec![0.0; 3]).unwrap();
            let mut ctr = OpCounter::default();
            sparse_conv(&b, &kw, Arithmetic::Float, &mut ctr).unwrap();
            assert_eq!(ctr.mults, (6 * 6 * 2 * 3) as u64);
        }
    }

    #[test]
    fn conv_sentinel_outputs_forced_zero() {
        let mut b = SparseBundle::empty(3, 1, 4, 4);
        b.hash[..2].copy_from_slice(&[2, 2]);
        b.feat[0] = 1.0;
        let kw = KernelWeights::new(3, 1, 1, vec![1.0; 9], vec![5.0]).unwrap();
        let mut ctr = OpCounter::default();
        let out = sparse_conv(&b, &kw, Arithmetic::Float, &mut ctr).unwrap();
        assert_eq!(out.feat[0], 6.0); // 1*w_center + bias
        assert_eq!(out.feat[1], 0.0); // sentinel, bias suppressed
        assert_eq!(out.feat[2], 0.0);
    }

    #[test]
    fn conv_channel_mismatch_error() {
        let b = SparseBundle::empty(2, 2, 4, 4);
        let kw = KernelWeights::new(3, 1, 1, vec![0.0; 9], vec![0.0]).unwrap();
        assert!(sparse_conv(&b, &kw, Arithmetic::Float, &mut OpCounter::default()).is_err());
    }

    #[test]
    fn activation_relu_and_linear() {
        let mut b = SparseBundle::empty(3, 1, 4, 4);
        b.hash[..4].copy_from_slice(&[1, 1, 2, 2]);
        b.feat = vec![-1.0, 2.0, 0.0];
        let mut ctr = OpCounter::default();
        let relu = sparse_activation(&b, ActivationKind::Relu, &mut ctr);
        assert_eq!(relu.feat, vec![0.0, 2.0, 0.0]);
        assert_eq!(relu.hash, b.hash);
        let lin = sparse_activation(&b, ActivationKind::Linear, &mut ctr);
        assert_eq!(lin, b);
    }

    #[test]
    fn pool_coordinate_formula() {
        let mut b = SparseBundle::empty(2, 1, 4, 4);
        b.hash = vec![1, 1, 3, 4];
        b.feat = vec![1.0, 1.0];
        let mut ctr = OpCounter::default();
        let out = sparse_avg_pool(&b, 2, Arithmetic::Float, &mut ctr).unwrap();
        assert_eq!(out.coord(0), (1, 1));
        assert_eq!(out.coord(1), (2, 2));
        assert_eq!(out.grid_h, 2);
        assert_eq!(out.grid_w, 2);
    }

    #[test]
    fn pool_merges_same_pool_and_demotes_duplicate() {
        let mut b = SparseBundle::empty(3, 1, 4, 4);
        b.hash = vec![1, 1, 2, 2, 0, 0];
        b.feat = vec![4.0, 8.0, 0.0];
        let mut ctr = OpCounter::default();
        let out = sparse_avg_pool(&b, 2, Arithmetic::Float, &mut ctr).unwrap();
        assert_eq!(out.coord(0), (1, 1));
        assert_eq!(out.feat[0], 3.0); // (4 + 8) / 4
        assert!(out.is_sentinel(1)); // duplicate demoted
        assert_eq!(out.feat[1], 0.0);
        assert!(out.is_sentinel(2)); // sentinel stays sentinel
    }

    #[test]
    fn flatten_scatter() {
        let mut b = SparseBundle::empty(2, 1, 4, 4);
        b.hash[..2].copy_from_slice(&[2, 3]);
        b.feat[0] = 7.5;
        let flat = sparse_flatten(&b);
        assert_eq!(flat.len(), 16);
        assert_eq!(flat[6], 7.5);
        assert_eq!(flat.iter().filter(|&&v| v != 0.0).count(), 1);
    }

    #[test]
    fn flatten_empty_bundle_is_zero() {
        let b = SparseBundle::empty(3, 2, 4, 4);
        assert!(sparse_flatten(&b).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dump_format() {
        let mut b = SparseBundle::empty(2, 2, 4, 4);
        b.hash[..2].copy_from_slice(&[1, 2]);
        b.feat[..2].copy_from_slice(&[1.5, -2.0]);
        let d = b.dump();
        let lines: Vec<&str> = d.lines().collect();
        assert_eq!(lines[0], "0 1 2 1.5 -2");
        assert_eq!(lines[1], "1 0 0 0 0");
    }
}
