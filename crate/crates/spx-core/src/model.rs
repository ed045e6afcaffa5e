//! Sequential model graph: sparse execution path, the constrained dense
//! oracle path, the unconstrained dense path, manifest (de)serialization,
//! and seeded random-weight presets.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{
    calibrate_cycles, estimate_cycles, tree_depth, CostReport, LayerCost, OpCounter,
    REDUCE_II_SAMPLES,
};
use crate::dense::{
    act_vec, avg_pool2d, flatten, fully_connected, mask_to_active, masked_conv_oracle,
    naive_active_scan, relu_dense, DenseParams,
};
use crate::error::{Result, SpxError};
use crate::fixed::{Arithmetic, FixedFormat};
use crate::sparse::{
    sparse_activation, sparse_avg_pool, sparse_conv, sparse_flatten, sparse_input_reduce,
    ActivationKind, KernelWeights, ReduceConfig, SparseBundle,
};
use crate::tensor::DenseTensor;

/// One layer of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerSpec {
    InputReduce { threshold: f64, n_max: usize },
    SparseConv { weights: KernelWeights },
    SparseAct { kind: ActivationKind },
    SparsePool { p: usize },
    SparseFlatten,
    Dense { params: DenseParams },
    DenseAct { kind: ActivationKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Float,
    Fixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelGraph {
    pub input_h: usize,
    pub input_w: usize,
    pub input_c: usize,
    pub mode: ArithmeticMode,
    /// Required when mode is fixed.
    pub format: Option<FixedFormat>,
    pub layers: Vec<LayerSpec>,
}

// ---------------------------------------------------------------------------
// Manifest schema (JSON)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum LayerManifest {
    InputReduce {
        threshold: f64,
        n_max: usize,
    },
    SparseConv {
        k: usize,
        c_in: usize,
        c_out: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    },
    SparseAct {
        activation: ActivationKind,
    },
    SparsePool {
        p: usize,
    },
    SparseFlatten {},
    Dense {
        in_dim: usize,
        out_dim: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    },
    DenseAct {
        activation: ActivationKind,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelManifest {
    version: u32,
    input: [usize; 3],
    mode: ArithmeticMode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    format: Option<FixedFormat>,
    layers: Vec<LayerManifest>,
}

pub const MANIFEST_VERSION: u32 = 1;

impl ModelGraph {
    pub fn arithmetic(&self) -> Result<Arithmetic> {
        match self.mode {
            ArithmeticMode::Float => Ok(Arithmetic::Float),
            ArithmeticMode::Fixed => self
                .format
                .map(Arithmetic::Fixed)
                .ok_or_else(|| SpxError::Manifest("fixed mode requires a format".into())),
        }
    }

    /// Check layer ordering and shape consistency; returns the logit count.
    pub fn validate(&self) -> Result<usize> {
        let mut reduces = 0usize;
        let mut flattened: Option<usize> = None;
        let (mut h, mut w, mut c) = (self.input_h, self.input_w, self.input_c);
        if h * w * c == 0 {
            return Err(SpxError::Manifest("input dims must be positive".into()));
        }
        if self.mode == ArithmeticMode::Fixed && self.format.is_none() {
            return Err(SpxError::Manifest("fixed mode requires a format".into()));
        }
        for (idx, layer) in self.layers.iter().enumerate() {
            let mismatch = |detail: String| SpxError::ShapeMismatch { layer: idx, detail };
            match layer {
                LayerSpec::InputReduce { n_max, .. } => {
                    if idx != 0 {
                        return Err(mismatch("input reduce must be the first layer".into()));
                    }
                    if *n_max < 1 {
                        return Err(mismatch("n_max must be >= 1".into()));
                    }
                    reduces += 1;
                }
                LayerSpec::SparseConv { weights } => {
                    if flattened.is_some() {
                        return Err(mismatch("conv after flatten".into()));
                    }
                    if weights.c_in != c {
                        return Err(mismatch(format!(
                            "conv expects {} channels, pipeline has {}",
                            weights.c_in, c
                        )));
                    }
                    c = weights.c_out;
                }
                LayerSpec::SparseAct { .. } => {
                    if flattened.is_some() {
                        return Err(mismatch("sparse activation after flatten".into()));
                    }
                }
                LayerSpec::SparsePool { p } => {
                    if flattened.is_some() {
                        return Err(mismatch("pool after flatten".into()));
                    }
                    if *p < 1 {
                        return Err(mismatch("pool size must be >= 1".into()));
                    }
                    h = (h + p - 1) / p;
                    w = (w + p - 1) / p;
                }
                LayerSpec::SparseFlatten => {
                    if flattened.is_some() {
                        return Err(mismatch("duplicate flatten".into()));
                    }
                    flattened = Some(h * w * c);
                }
                LayerSpec::Dense { params } => {
                    let len = flattened
                        .ok_or_else(|| mismatch("dense layer before flatten".into()))?;
                    if params.in_dim != len {
                        return Err(mismatch(format!(
                            "dense expects {} inputs, pipeline has {}",
                            params.in_dim, len
                        )));
                    }
                    flattened = Some(params.out_dim);
                }
                LayerSpec::DenseAct { .. } => {
                    flattened.ok_or_else(|| mismatch("dense activation before flatten".into()))?;
                }
            }
        }
        let has_sparse = self
            .layers
            .iter()
            .any(|l| !matches!(l, LayerSpec::Dense { .. } | LayerSpec::DenseAct { .. }));
        if has_sparse && reduces != 1 {
            return Err(SpxError::Manifest(
                "sparse models need exactly one input reduce layer, first".into(),
            ));
        }
        flattened.ok_or_else(|| SpxError::Manifest("model has no flatten layer".into()))
    }

    pub fn n_max(&self) -> Option<usize> {
        self.layers.iter().find_map(|l| match l {
            LayerSpec::InputReduce { n_max, .. } => Some(*n_max),
            _ => None,
        })
    }

    pub fn threshold(&self) -> Option<f64> {
        self.layers.iter().find_map(|l| match l {
            LayerSpec::InputReduce { threshold, .. } => Some(*threshold),
            _ => None,
        })
    }

    fn to_manifest(&self) -> ModelManifest {
        let layers = self
            .layers
            .iter()
            .map(|l| match l {
                LayerSpec::InputReduce { threshold, n_max } => LayerManifest::InputReduce {
                    threshold: *threshold,
                    n_max: *n_max,
                },
                LayerSpec::SparseConv { weights } => LayerManifest::SparseConv {
                    k: weights.k,
                    c_in: weights.c_in,
                    c_out: weights.c_out,
                    weights: weights.w.clone(),
                    bias: weights.b.clone(),
                },
                LayerSpec::SparseAct { kind } => LayerManifest::SparseAct { activation: *kind },
                LayerSpec::SparsePool { p } => LayerManifest::SparsePool { p: *p },
                LayerSpec::SparseFlatten => LayerManifest::SparseFlatten {},
                LayerSpec::Dense { params } => LayerManifest::Dense {
                    in_dim: params.in_dim,
                    out_dim: params.out_dim,
                    weights: params.w.clone(),
                    bias: params.b.clone(),
                },
                LayerSpec::DenseAct { kind } => LayerManifest::DenseAct { activation: *kind },
            })
            .collect();
        ModelManifest {
            version: MANIFEST_VERSION,
            input: [self.input_h, self.input_w, self.input_c],
            mode: self.mode,
            format: self.format,
            layers,
        }
    }

    fn from_manifest(m: ModelManifest) -> Result<Self> {
        if m.version != MANIFEST_VERSION {
            return Err(SpxError::Manifest(format!(
                "unsupported manifest version {}",
                m.version
            )));
        }
        if let Some(f) = m.format {
            FixedFormat::new(f.total_bits, f.integer_bits)?;
        }
        let layers = m
            .layers
            .into_iter()
            .map(|l| {
                Ok(match l {
                    LayerManifest::InputReduce { threshold, n_max } => {
                        LayerSpec::InputReduce { threshold, n_max }
                    }
                    LayerManifest::SparseConv {
                        k,
                        c_in,
                        c_out,
                        weights,
                        bias,
                    } => LayerSpec::SparseConv {
                        weights: KernelWeights::new(k, c_in, c_out, weights, bias)?,
                    },
                    LayerManifest::SparseAct { activation } => {
                        LayerSpec::SparseAct { kind: activation }
                    }
                    LayerManifest::SparsePool { p } => LayerSpec::SparsePool { p },
                    LayerManifest::SparseFlatten {} => LayerSpec::SparseFlatten,
                    LayerManifest::Dense {
                        in_dim,
                        out_dim,
                        weights,
                        bias,
                    } => LayerSpec::Dense {
                        params: DenseParams::new(in_dim, out_dim, weights, bias)?,
                    },
                    LayerManifest::DenseAct { activation } => {
                        LayerSpec::DenseAct { kind: activation }
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let graph = ModelGraph {
            input_h: m.input[0],
            input_w: m.input[1],
            input_c: m.input[2],
            mode: m.mode,
            format: m.format,
            layers,
        };
        graph.validate()?;
        Ok(graph)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_manifest())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let manifest: ModelManifest =
            serde_json::from_str(s).map_err(|e| SpxError::Manifest(e.to_string()))?;
        Self::from_manifest(manifest)
    }
}

pub fn save_model(m: &ModelGraph, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, m.to_json()?)?;
    Ok(())
}

pub fn load_model(path: &std::path::Path) -> Result<ModelGraph> {
    ModelGraph::from_json(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Execution paths
// ---------------------------------------------------------------------------

fn prepare_input(m: &ModelGraph, x: &DenseTensor, arith: Arithmetic) -> Result<DenseTensor> {
    if x.h != m.input_h || x.w != m.input_w || x.c != m.input_c {
        return Err(SpxError::ShapeMismatch {
            layer: 0,
            detail: format!(
                "input tensor {}x{}x{} does not match model {}x{}x{}",
                x.h, x.w, x.c, m.input_h, m.input_w, m.input_c
            ),
        });
    }
    Ok(match arith {
        Arithmetic::Float => x.clone(),
        Arithmetic::Fixed(fmt) => x.quantized(fmt),
    })
}

/// Execute the sparse path: input reduction, sparse layers, flatten, head.
pub fn run_sparse(m: &ModelGraph, x: &DenseTensor, counter: &mut OpCounter) -> Result<Vec<f64>> {
    m.validate()?;
    let arith = m.arithmetic()?;
    let input = prepare_input(m, x, arith)?;

    let mut bundle: Option<SparseBundle> = None;
    let mut flat: Option<Vec<f64>> = None;
    for (idx, layer) in m.layers.iter().enumerate() {
        let missing = |what: &str| SpxError::ShapeMismatch {
            layer: idx,
            detail: format!("{} not available at this layer", what),
        };
        match layer {
            LayerSpec::InputReduce { threshold, n_max } => {
                bundle = Some(sparse_input_reduce(
                    &input,
                    &ReduceConfig {
                        threshold: *threshold,
                        n_max: *n_max,
                    },
                    counter,
                )?);
            }
            LayerSpec::SparseConv { weights } => {
                let b = bundle.take().ok_or_else(|| missing("sparse bundle"))?;
                bundle = Some(sparse_conv(&b, weights, arith, counter)?);
            }
            LayerSpec::SparseAct { kind } => {
                let b = bundle.take().ok_or_else(|| missing("sparse bundle"))?;
                bundle = Some(sparse_activation(&b, *kind, counter));
            }
            LayerSpec::SparsePool { p } => {
                let b = bundle.take().ok_or_else(|| missing("sparse bundle"))?;
                bundle = Some(sparse_avg_pool(&b, *p, arith, counter)?);
            }
            LayerSpec::SparseFlatten => {
                let b = bundle.take().ok_or_else(|| missing("sparse bundle"))?;
                flat = Some(sparse_flatten(&b));
            }
            LayerSpec::Dense { params } => {
                let v = flat.take().ok_or_else(|| missing("flat vector"))?;
                flat = Some(fully_connected(&v, params, arith, counter)?);
            }
            LayerSpec::DenseAct { kind } => {
                let v = flat.take().ok_or_else(|| missing("flat vector"))?;
                flat = Some(act_vec(&v, *kind));
            }
        }
    }
    flat.ok_or_else(|| SpxError::Manifest("model produced no output".into()))
}

/// Dense emulation of the sparse semantics: mask to the retained active set,
/// run masked dense layers, and track the active set through pooling. By
/// construction this equals `run_sparse`.
pub fn run_dense_constrained(
    m: &ModelGraph,
    x: &DenseTensor,
    counter: &mut OpCounter,
) -> Result<Vec<f64>> {
    m.validate()?;
    let arith = m.arithmetic()?;
    let input = prepare_input(m, x, arith)?;

    let mut tensor: Option<DenseTensor> = None;
    let mut active: HashSet<(u32, u32)> = HashSet::new();
    let mut flat: Option<Vec<f64>> = None;
    for (idx, layer) in m.layers.iter().enumerate() {
        let missing = |what: &str| SpxError::ShapeMismatch {
            layer: idx,
            detail: format!("{} not available at this layer", what),
        };
        match layer {
            LayerSpec::InputReduce { threshold, n_max } => {
                let (coords, _) = naive_active_scan(&input, *threshold, *n_max);
                active = coords.into_iter().collect();
                tensor = Some(mask_to_active(&input, &active));
            }
            LayerSpec::SparseConv { weights } => {
                let t = tensor.take().ok_or_else(|| missing("tensor"))?;
                tensor = Some(masked_conv_oracle(&t, &active, weights, arith, counter)?);
            }
            LayerSpec::SparseAct { kind } => {
                let t = tensor.take().ok_or_else(|| missing("tensor"))?;
                let activated = match kind {
                    ActivationKind::Relu => relu_dense(&t),
                    ActivationKind::Linear => t,
                };
                tensor = Some(mask_to_active(&activated, &active));
            }
            LayerSpec::SparsePool { p } => {
                let t = tensor.take().ok_or_else(|| missing("tensor"))?;
                tensor = Some(avg_pool2d(&t, *p, arith)?);
                let p = *p as u32;
                active = active
                    .iter()
                    .map(|&(h, w)| ((h - 1) / p + 1, (w - 1) / p + 1))
                    .collect();
            }
            LayerSpec::SparseFlatten => {
                let t = tensor.take().ok_or_else(|| missing("tensor"))?;
                flat = Some(flatten(&t));
            }
            LayerSpec::Dense { params } => {
                let v = flat.take().ok_or_else(|| missing("flat vector"))?;
                flat = Some(fully_connected(&v, params, arith, counter)?);
            }
            LayerSpec::DenseAct { kind } => {
                let v = flat.take().ok_or_else(|| missing("flat vector"))?;
                flat = Some(act_vec(&v, *kind));
            }
        }
    }
    flat.ok_or_else(|| SpxError::Manifest("model produced no output".into()))
}

/// Unconstrained standard CNN forward pass: the input reduction is skipped
/// and every sparse layer runs as its dense counterpart.
pub fn run_dense(m: &ModelGraph, x: &DenseTensor, counter: &mut OpCounter) -> Result<Vec<f64>> {
    m.validate()?;
    let arith = m.arithmetic()?;
    let input = prepare_input(m, x, arith)?;

    let mut tensor = Some(input);
    let mut flat: Option<Vec<f64>> = None;
    for (idx, layer) in m.layers.iter().enumerate() {
        let missing = |what: &str| SpxError::ShapeMismatch {
            layer: idx,
            detail: format!("{} not available at this layer", what),
        };
        match layer {
            LayerSpec::InputReduce { .. } => {} // identity in the dense path
            LayerSpec::SparseConv { weights } => {
                let t = tensor.take().ok_or_else(|| missing("tensor"))?;
                tensor = Some(crate::dense::conv2d_same(&t, weights, arith, counter)?);
            }
            LayerSpec::SparseAct { kind } => {
                let t = tensor.take().ok_or_else(|| missing("tensor"))?;
                tensor = Some(match kind {
                    ActivationKind::Relu => relu_dense(&t),
                    ActivationKind::Linear => t,
                });
            }
            LayerSpec::SparsePool { p } => {
                let t = tensor.take().ok_or_else(|| missing("tensor"))?;
                tensor = Some(avg_pool2d(&t, *p, arith)?);
            }
            LayerSpec::SparseFlatten => {
                let t = tensor.take().ok_or_else(|| missing("tensor"))?;
                flat = Some(flatten(&t));
            }
            LayerSpec::Dense { params } => {
                let v = flat.take().ok_or_else(|| missing("flat vector"))?;
                flat = Some(fully_connected(&v, params, arith, counter)?);
            }
            LayerSpec::DenseAct { kind } => {
                let v = flat.take().ok_or_else(|| missing("flat vector"))?;
                flat = Some(act_vec(&v, *kind));
            }
        }
    }
    flat.ok_or_else(|| SpxError::Manifest("model produced no output".into()))
}

// ---------------------------------------------------------------------------
// Presets and random weights
// ---------------------------------------------------------------------------

/// Architecture presets: two conv blocks (conv + relu + pool) followed by a
/// two-layer MLP head, at roughly 4k parameters.
#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub input: (usize, usize, usize),
    pub pool: usize,
    pub conv_channels: (usize, usize),
    pub hidden: usize,
    pub classes: usize,
    pub default_threshold: f64,
}

pub const PRESETS: [Preset; 3] = [
    Preset {
        name: "mnist",
        input: (48, 48, 1),
        pool: 2,
        conv_channels: (2, 2),
        hidden: 12,
        classes: 10,
        default_threshold: 0.0,
    },
    Preset {
        name: "neutrino",
        input: (63, 63, 1),
        pool: 3,
        conv_channels: (2, 2),
        hidden: 32,
        classes: 2,
        default_threshold: 0.0,
    },
    Preset {
        name: "jet",
        input: (56, 56, 1),
        pool: 2,
        conv_channels: (2, 2),
        hidden: 9,
        classes: 5,
        default_threshold: 0.0,
    },
];

pub fn preset(name: &str) -> Result<Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .copied()
        .ok_or_else(|| SpxError::UnknownPreset(name.to_string()))
}

/// Named n_max sizes: tiny/small/medium/large = 8/12/16/20.
pub fn n_max_for_size(size: &str) -> Option<usize> {
    match size {
        "tiny" => Some(8),
        "small" => Some(12),
        "medium" => Some(16),
        "large" => Some(20),
        _ => None,
    }
}

/// Deterministic random model: weights uniform in [-0.5, 0.5] from the seed.
pub fn gen_random_model(
    seed: u64,
    preset_name: &str,
    n_max: usize,
    mode: ArithmeticMode,
    format: Option<FixedFormat>,
) -> Result<ModelGraph> {
    let p = preset(preset_name)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = |n: usize| -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-0.5..=0.5)).collect()
    };

    let (h, w, c) = p.input;
    let (c1, c2) = p.conv_channels;
    let k = 3usize;
    let conv1 = KernelWeights::new(k, c, c1, uniform(k * k * c * c1), uniform(c1))?;
    let conv2 = KernelWeights::new(k, c1, c2, uniform(k * k * c1 * c2), uniform(c2))?;
    let (ph, pw) = (
        ((h + p.pool - 1) / p.pool + p.pool - 1) / p.pool,
        ((w + p.pool - 1) / p.pool + p.pool - 1) / p.pool,
    );
    let flat_len = ph * pw * c2;
    let fc1 = DenseParams::new(flat_len, p.hidden, uniform(flat_len * p.hidden), uniform(p.hidden))?;
    let fc2 = DenseParams::new(p.hidden, p.classes, uniform(p.hidden * p.classes), uniform(p.classes))?;

    let graph = ModelGraph {
        input_h: h,
        input_w: w,
        input_c: c,
        mode,
        format,
        layers: vec![
            LayerSpec::InputReduce {
                threshold: p.default_threshold,
                n_max,
            },
            LayerSpec::SparseConv { weights: conv1 },
            LayerSpec::SparseAct {
                kind: ActivationKind::Relu,
            },
            LayerSpec::SparsePool { p: p.pool },
            LayerSpec::SparseConv { weights: conv2 },
            LayerSpec::SparseAct {
                kind: ActivationKind::Relu,
            },
            LayerSpec::SparsePool { p: p.pool },
            LayerSpec::SparseFlatten,
            LayerSpec::Dense { params: fc1 },
            LayerSpec::DenseAct {
                kind: ActivationKind::Relu,
            },
            LayerSpec::Dense { params: fc2 },
        ],
    };
    graph.validate()?;
    Ok(graph)
}

// ---------------------------------------------------------------------------
// Analytical per-layer cost
// ---------------------------------------------------------------------------

/// Analytical cost report for a model, using the built-in reduction-layer
/// cycle calibration.
pub fn model_cost(m: &ModelGraph) -> Result<CostReport> {
    m.validate()?;
    let cal = calibrate_cycles(&REDUCE_II_SAMPLES)?;
    let (mut h, mut w, mut c) = (m.input_h, m.input_w, m.input_c);
    let n_max = m.n_max().unwrap_or(0);
    let mut layers = Vec::new();
    let mut ratios = Vec::new();
    let mut flat_len = 0usize;
    for layer in &m.layers {
        match layer {
            LayerSpec::InputReduce { n_max, .. } => {
                // one reduction pass per retained pixel, H*W-1 combiners each
                layers.push(LayerCost {
                    layer: "input_reduce".into(),
                    mult_count: 0,
                    add_count: 0,
                    compare_count: (*n_max * (h * w - 1) * 2) as u64,
                    tree_depth: Some(tree_depth(h, w)),
                    estimated_cycles: Some(estimate_cycles(&cal, *n_max)),
                });
            }
            LayerSpec::SparseConv { weights } => {
                let cost = crate::cost::conv_cost(n_max, weights.c_in, weights.c_out, h, w, weights.k);
                ratios.push(cost.ratio);
                layers.push(LayerCost {
                    layer: format!("sparse_conv k={} {}->{}", weights.k, weights.c_in, weights.c_out),
                    mult_count: cost.sparse_mults,
                    add_count: cost.sparse_mults + (n_max * weights.c_out) as u64,
                    compare_count: 0,
                    tree_depth: None,
                    estimated_cycles: None,
                });
                c = weights.c_out;
            }
            LayerSpec::SparseAct { .. } => {
                layers.push(LayerCost {
                    layer: "sparse_activation".into(),
                    mult_count: 0,
                    add_count: 0,
                    compare_count: (n_max * c) as u64,
                    tree_depth: None,
                    estimated_cycles: None,
                });
            }
            LayerSpec::SparsePool { p } => {
                layers.push(LayerCost {
                    layer: format!("sparse_avg_pool p={}", p),
                    mult_count: 0,
                    add_count: (n_max * n_max * c) as u64,
                    compare_count: (n_max * n_max) as u64,
                    tree_depth: None,
                    estimated_cycles: None,
                });
                h = (h + p - 1) / p;
                w = (w + p - 1) / p;
            }
            LayerSpec::SparseFlatten => {
                flat_len = h * w * c;
                layers.push(LayerCost {
                    layer: "sparse_flatten".into(),
                    mult_count: 0,
                    add_count: (n_max * c) as u64,
                    compare_count: 0,
                    tree_depth: None,
                    estimated_cycles: None,
                });
            }
            LayerSpec::Dense { params } => {
                layers.push(LayerCost {
                    layer: format!("dense {}->{}", params.in_dim, params.out_dim),
                    mult_count: (params.in_dim * params.out_dim) as u64,
                    add_count: (params.in_dim * params.out_dim) as u64,
                    compare_count: 0,
                    tree_depth: None,
                    estimated_cycles: None,
                });
                flat_len = params.out_dim;
            }
            LayerSpec::DenseAct { .. } => {
                layers.push(LayerCost {
                    layer: "dense_activation".into(),
                    mult_count: 0,
                    add_count: 0,
                    compare_count: flat_len as u64,
                    tree_depth: None,
                    estimated_cycles: None,
                });
            }
        }
    }
    Ok(CostReport::from_layers(layers, ratios))
}
