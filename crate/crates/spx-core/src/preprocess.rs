//! Image sparsification transforms and the synthetic sparse-image generator.
//!
//! A `TransformSpec` is an ordered step list, parseable from a compact
//! comma-separated string, e.g.
//! `avg_pool(3),pad_to(48,48),radial_inflate(1.5),threshold(0.4)`.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::avg_pool2d;
use crate::error::{Result, SpxError};
use crate::fixed::Arithmetic;
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformStep {
    AvgPool(usize),
    SumPool(usize),
    PadTo(usize, usize),
    CropBorders(usize, usize),
    RadialInflate(f64),
    /// Keep values >= t, zero values below. Note this is inclusive, unlike
    /// the strict comparison used for activity in input reduction.
    Threshold(f64),
    /// Divide every value by the factor.
    Normalize(f64),
    /// Clip values at the cap.
    Saturate(f64),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransformSpec(pub Vec<TransformStep>);

impl FromStr for TransformSpec {
    type Err = SpxError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(TransformSpec::default());
        }
        let mut steps = Vec::new();
        // split on commas outside parentheses
        let mut depth = 0usize;
        let mut start = 0usize;
        let mut parts = Vec::new();
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => {
                    parts.push(&s[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        parts.push(&s[start..]);
        for part in parts {
            steps.push(parse_step(part.trim())?);
        }
        Ok(TransformSpec(steps))
    }
}

fn parse_step(s: &str) -> Result<TransformStep> {
    let err = || SpxError::Parse(format!("invalid transform step: {:?}", s));
    let open = s.find('(').ok_or_else(err)?;
    if !s.ends_with(')') {
        return Err(err());
    }
    let name = &s[..open];
    let args: Vec<&str> = s[open + 1..s.len() - 1].split(',').map(str::trim).collect();
    let one = |args: &[&str]| -> Result<f64> {
        if args.len() != 1 {
            return Err(err());
        }
        args[0].parse().map_err(|_| err())
    };
    let two = |args: &[&str]| -> Result<(usize, usize)> {
        if args.len() != 2 {
            return Err(err());
        }
        Ok((
            args[0].parse().map_err(|_| err())?,
            args[1].parse().map_err(|_| err())?,
        ))
    };
    Ok(match name {
        "avg_pool" => TransformStep::AvgPool(one(&args)? as usize),
        "sum_pool" => TransformStep::SumPool(one(&args)? as usize),
        "pad_to" => {
            let (h, w) = two(&args)?;
            TransformStep::PadTo(h, w)
        }
        "crop_borders" => {
            let (h, w) = two(&args)?;
            TransformStep::CropBorders(h, w)
        }
        "radial_inflate" => TransformStep::RadialInflate(one(&args)?),
        "threshold" => TransformStep::Threshold(one(&args)?),
        "normalize" => TransformStep::Normalize(one(&args)?),
        "saturate" => TransformStep::Saturate(one(&args)?),
        _ => return Err(err()),
    })
}

/// Apply the step list in order; an incompatible step reports its index.
pub fn apply_transforms(x: &DenseTensor, spec: &TransformSpec) -> Result<DenseTensor> {
    let mut cur = x.clone();
    for (i, step) in spec.0.iter().enumerate() {
        cur = apply_step(&cur, step).map_err(|e| SpxError::TransformStep {
            step: i,
            detail: e.to_string(),
        })?;
    }
    Ok(cur)
}

fn apply_step(x: &DenseTensor, step: &TransformStep) -> Result<DenseTensor> {
    match *step {
        TransformStep::AvgPool(p) => avg_pool2d(x, p, Arithmetic::Float),
        TransformStep::SumPool(p) => {
            let pooled = avg_pool2d(x, p, Arithmetic::Float)?;
            let scale = (p * p) as f64;
            Ok(DenseTensor {
                h: pooled.h,
                w: pooled.w,
                c: pooled.c,
                data: pooled.data.iter().map(|v| v * scale).collect(),
            })
        }
        TransformStep::PadTo(h, w) => pad_to(x, h, w),
        TransformStep::CropBorders(h, w) => crop_borders(x, h, w),
        TransformStep::RadialInflate(s) => radial_inflate(x, s),
        TransformStep::Threshold(t) => Ok(map_values(x, |v| if v >= t { v } else { 0.0 })),
        TransformStep::Normalize(f) => {
            if f == 0.0 {
                return Err(SpxError::Parse("normalize factor must be nonzero".into()));
            }
            Ok(map_values(x, |v| v / f))
        }
        TransformStep::Saturate(cap) => Ok(map_values(x, |v| v.min(cap))),
    }
}

fn map_values(x: &DenseTensor, f: impl Fn(f64) -> f64) -> DenseTensor {
    DenseTensor {
        h: x.h,
        w: x.w,
        c: x.c,
        data: x.data.iter().map(|&v| f(v)).collect(),
    }
}

/// Zero-pad borders symmetrically to reach (h, w).
fn pad_to(x: &DenseTensor, h: usize, w: usize) -> Result<DenseTensor> {
    if h < x.h || w < x.w {
        return Err(SpxError::InvalidDimensions(format!(
            "pad_to target {}x{} smaller than input {}x{}",
            h, w, x.h, x.w
        )));
    }
    let (off_h, off_w) = ((h - x.h) / 2, (w - x.w) / 2);
    let mut out = DenseTensor::zeros(h, w, x.c);
    for i in 0..x.h {
        for j in 0..x.w {
            for c in 0..x.c {
                let idx = out.flat_index(i + off_h, j + off_w, c);
                out.data[idx] = x.at(i, j, c);
            }
        }
    }
    Ok(out)
}

/// Remove borders symmetrically down to (h, w).
fn crop_borders(x: &DenseTensor, h: usize, w: usize) -> Result<DenseTensor> {
    if h > x.h || w > x.w {
        return Err(SpxError::InvalidDimensions(format!(
            "crop_borders target {}x{} larger than input {}x{}",
            h, w, x.h, x.w
        )));
    }
    let (off_h, off_w) = ((x.h - h) / 2, (x.w - w) / 2);
    let mut out = DenseTensor::zeros(h, w, x.c);
    for i in 0..h {
        for j in 0..w {
            for c in 0..x.c {
                let idx = out.flat_index(i, j, c);
                out.data[idx] = x.at(i + off_h, j + off_w, c);
            }
        }
    }
    Ok(out)
}

/// Move each nonzero pixel radially outward from the image center by scale
/// `s >= 1`, rounding half away from zero; targets outside the grid are
/// dropped, collisions keep the maximum value.
pub fn radial_inflate(x: &DenseTensor, s: f64) -> Result<DenseTensor> {
    if x.c != 1 {
        return Err(SpxError::InvalidDimensions(
            "radial_inflate requires a single channel".into(),
        ));
    }
    if s < 1.0 {
        return Err(SpxError::InvalidDimensions(format!(
            "inflate scale {} must be >= 1",
            s
        )));
    }
    // integer center pixel; displacement rounds half away from zero
    let (ch, cw) = (((x.h - 1) / 2) as i64, ((x.w - 1) / 2) as i64);
    let mut out = DenseTensor::zeros(x.h, x.w, 1);
    for i in 0..x.h {
        for j in 0..x.w {
            let v = x.at(i, j, 0);
            if v == 0.0 {
                continue;
            }
            let ti = ch + (s * (i as i64 - ch) as f64).round() as i64;
            let tj = cw + (s * (j as i64 - cw) as f64).round() as i64;
            if ti < 0 || tj < 0 || ti >= x.h as i64 || tj >= x.w as i64 {
                continue;
            }
            let idx = out.flat_index(ti as usize, tj as usize, 0);
            out.data[idx] = out.data[idx].max(v);
        }
    }
    Ok(out)
}

/// Deterministic test-input generator: exactly `n_active` distinct nonzero
/// pixels with channel-0 values in (lo, hi].
pub fn gen_synthetic_sparse(
    seed: u64,
    h: usize,
    w: usize,
    n_active: usize,
    lo: f64,
    hi: f64,
) -> Result<DenseTensor> {
    if n_active > h * w {
        return Err(SpxError::InvalidDimensions(format!(
            "n_active {} exceeds {}x{} pixels",
            n_active, h, w
        )));
    }
    if !(0.0 <= lo && lo < hi) {
        return Err(SpxError::InvalidDimensions(format!(
            "value range ({}, {}] must satisfy 0 <= lo < hi",
            lo, hi
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = DenseTensor::zeros(h, w, 1);
    let mut placed = 0usize;
    while placed < n_active {
        let idx = rng.gen_range(0..h * w);
        if out.data[idx] == 0.0 {
            let mut v = rng.gen_range(lo..hi);
            if v <= 0.0 {
                v = hi; // lo == 0 draws can hit exactly zero
            }
            out.data[idx] = v;
            placed += 1;
        }
    }
    Ok(out)
}
