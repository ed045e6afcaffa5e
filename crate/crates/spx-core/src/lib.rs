//! Sparsity-preserving CNN inference engine.
//!
//! Spatially sparse 2D images are reduced to compact feature/hash arrays
//! holding up to a fixed number of active pixels; convolution, activation,
//! pooling, and flattening then run on those arrays only, with the active
//! set never dilating. A dense reference path acts as the oracle for every
//! sparse layer, in double precision or emulated fixed point, and an
//! analytical cost model tracks operation counts and latency scaling.

pub mod cost;
pub mod dense;
pub mod error;
pub mod fixed;
pub mod io;
pub mod model;
pub mod preprocess;
pub mod sparse;
pub mod tensor;

pub use cost::{act_cost, calibrate_cycles, conv_cost, estimate_cycles, tree_depth, OpCounter};
pub use error::{Result, SpxError};
pub use fixed::{Arithmetic, FixedFormat, FixedValue};
pub use model::{
    gen_random_model, load_model, run_dense, run_dense_constrained, run_sparse, save_model,
    ArithmeticMode, LayerSpec, ModelGraph,
};
pub use sparse::{ActivationKind, KernelWeights, ReduceConfig, SparseBundle};
pub use tensor::DenseTensor;
