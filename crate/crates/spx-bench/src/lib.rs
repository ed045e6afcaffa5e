//! Shared fixtures for the benchmark targets.

use spx_core::preprocess::gen_synthetic_sparse;
use spx_core::{DenseTensor, KernelWeights};

pub fn bench_image(seed: u64, dim: usize, n_active: usize) -> DenseTensor {
    gen_synthetic_sparse(seed, dim, dim, n_active, 0.1, 1.0).expect("valid bench image")
}

pub fn ones_kernel(k: usize, c_in: usize, c_out: usize) -> KernelWeights {
    KernelWeights::new(k, c_in, c_out, vec![0.25; k * k * c_in * c_out], vec![0.0; c_out])
        .expect("valid kernel")
}
