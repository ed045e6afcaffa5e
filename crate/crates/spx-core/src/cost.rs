//! Analytical operation counts, latency scaling, and cycle calibration.
//!
//! Cycle estimates are a calibration layer fitted to measured points, not a
//! microarchitecture simulator; reports label them "calibrated, not
//! measured".

use serde::Serialize;

use crate::error::{Result, SpxError};

/// Instrumented operation counter threaded through the layer kernels.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OpCounter {
    pub mults: u64,
    pub adds: u64,
    pub compares: u64,
}

/// Reduction tree depth, `ceil(log2(H * W))`.
pub fn tree_depth(h: usize, w: usize) -> u32 {
    let n = h * w;
    assert!(n >= 1, "tree depth needs H * W >= 1");
    usize::BITS - (n - 1).leading_zeros()
}

/// Multiply counts of a sparse vs standard convolution layer.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvCost {
    pub sparse_mults: u64,
    pub dense_mults: u64,
    pub ratio: f64,
}

pub fn conv_cost(n_max: usize, c_in: usize, c_out: usize, h: usize, w: usize, k: usize) -> ConvCost {
    let sparse = (n_max * n_max * c_in * c_out) as u64;
    let dense = (h * w * c_in * c_out * k * k) as u64;
    ConvCost {
        sparse_mults: sparse,
        dense_mults: dense,
        ratio: sparse as f64 / dense as f64,
    }
}

/// Element-count ratio of sparse vs standard activation; channel count cancels.
pub fn act_cost(n_max: usize, c: usize, h: usize, w: usize) -> f64 {
    (n_max * c) as f64 / (h * w * c) as f64
}

/// Least-squares linear fit `cycles ~ slope * n_max + intercept`.
#[derive(Debug, Clone, Serialize)]
pub struct CycleCalibration {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

pub fn calibrate_cycles(samples: &[(u32, u32)]) -> Result<CycleCalibration> {
    if samples.len() < 2 {
        return Err(SpxError::CalibrationRankDeficient);
    }
    let n = samples.len() as f64;
    let mean_x = samples.iter().map(|&(x, _)| x as f64).sum::<f64>() / n;
    let mean_y = samples.iter().map(|&(_, y)| y as f64).sum::<f64>() / n;
    let sxx: f64 = samples
        .iter()
        .map(|&(x, _)| (x as f64 - mean_x).powi(2))
        .sum();
    if sxx == 0.0 {
        return Err(SpxError::CalibrationRankDeficient);
    }
    let sxy: f64 = samples
        .iter()
        .map(|&(x, y)| (x as f64 - mean_x) * (y as f64 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals = samples
        .iter()
        .map(|&(x, y)| y as f64 - (slope * x as f64 + intercept))
        .collect();
    Ok(CycleCalibration {
        slope,
        intercept,
        residuals,
    })
}

/// Estimated cycles for a given n_max, rounded to the nearest integer cycle.
pub fn estimate_cycles(cal: &CycleCalibration, n_max: usize) -> u64 {
    (cal.slope * n_max as f64 + cal.intercept).round().max(0.0) as u64
}

/// Initiation-interval measurements for the input reduction layer
/// (n_max, cycles); used as the default calibration source.
pub const REDUCE_II_SAMPLES: [(u32, u32); 4] = [(8, 35), (12, 52), (16, 67), (20, 84)];

/// Per-layer entry of a cost report.
#[derive(Debug, Clone, Serialize)]
pub struct LayerCost {
    pub layer: String,
    pub mult_count: u64,
    pub add_count: u64,
    pub compare_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree_depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimated_cycles: Option<u64>,
}

/// Full cost report: per-layer counts, totals, and sparse-vs-dense ratios.
#[derive(Debug, Clone, Serialize)]
pub struct CostReport {
    pub layers: Vec<LayerCost>,
    pub total_mults: u64,
    pub total_adds: u64,
    pub total_compares: u64,
    /// Sparse / dense multiply ratio per convolution layer.
    pub conv_ratios: Vec<f64>,
    pub cycle_note: &'static str,
}

impl CostReport {
    pub fn from_layers(layers: Vec<LayerCost>, conv_ratios: Vec<f64>) -> Self {
        let total_mults = layers.iter().map(|l| l.mult_count).sum();
        let total_adds = layers.iter().map(|l| l.add_count).sum();
        let total_compares = layers.iter().map(|l| l.compare_count).sum();
        Self {
            layers,
            total_mults,
            total_adds,
            total_compares,
            conv_ratios,
            cycle_note: "cycle estimates are calibrated, not measured",
        }
    }
}
