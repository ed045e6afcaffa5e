//! Dense H x W x C tensor, row-major, channel-last.

use crate::error::{Result, SpxError};
use crate::fixed::FixedFormat;

/// Channel-last image/feature tensor. Flat index of (i, j, c) is
/// `C * (i * W + j) + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    pub h: usize,
    pub w: usize,
    pub c: usize,
    pub data: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(h: usize, w: usize, c: usize) -> Self {
        Self {
            h,
            w,
            c,
            data: vec![0.0; h * w * c],
        }
    }

    pub fn from_data(h: usize, w: usize, c: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != h * w * c {
            return Err(SpxError::InvalidDimensions(format!(
                "data length {} does not match {}x{}x{}",
                data.len(),
                h,
                w,
                c
            )));
        }
        Ok(Self { h, w, c, data })
    }

    #[inline]
    pub fn flat_index(&self, i: usize, j: usize, c: usize) -> usize {
        self.c * (i * self.w + j) + c
    }

    fn check(&self, i: usize, j: usize, c: usize) -> Result<()> {
        if i >= self.h || j >= self.w || c >= self.c {
            return Err(SpxError::IndexOutOfBounds {
                i,
                j,
                c,
                h: self.h,
                w: self.w,
                channels: self.c,
            });
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize, c: usize) -> Result<f64> {
        self.check(i, j, c)?;
        Ok(self.data[self.flat_index(i, j, c)])
    }

    pub fn set(&mut self, i: usize, j: usize, c: usize, v: f64) -> Result<()> {
        self.check(i, j, c)?;
        let idx = self.flat_index(i, j, c);
        self.data[idx] = v;
        Ok(())
    }

    /// Unchecked read for hot loops; callers guarantee bounds.
    #[inline]
    pub fn at(&self, i: usize, j: usize, c: usize) -> f64 {
        self.data[self.flat_index(i, j, c)]
    }

    /// Quantize every element to `fmt` (values stay f64 but are exact
    /// multiples of the format step).
    pub fn quantized(&self, fmt: FixedFormat) -> DenseTensor {
        DenseTensor {
            h: self.h,
            w: self.w,
            c: self.c,
            data: self.data.iter().map(|&x| fmt.quantize(x).to_f64()).collect(),
        }
    }
}
