//! Two's-complement fixed-point emulation.
//!
//! Values are stored as scaled integers: `value = raw * 2^-(total_bits - integer_bits)`.
//! The integer part includes the sign bit, matching the HLS convention.
//! Rounding is round-to-nearest with ties away from zero; overflow saturates.
//! Multiply-accumulate chains run at full precision in a wide integer
//! accumulator and are quantized once at the layer output, so accumulation
//! order never changes the result.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpxError};

/// Fixed-point format: total bit-width and integer bits (sign included).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedFormat {
    #[serde(rename = "total")]
    pub total_bits: u32,
    #[serde(rename = "integer")]
    pub integer_bits: u32,
}

impl FixedFormat {
    pub fn new(total_bits: u32, integer_bits: u32) -> Result<Self> {
        if !(2..=32).contains(&total_bits) || integer_bits < 1 || integer_bits > total_bits {
            return Err(SpxError::InvalidFormat {
                total: total_bits,
                integer: integer_bits,
            });
        }
        Ok(Self {
            total_bits,
            integer_bits,
        })
    }

    /// Default formats for the 8-bit and 16-bit configurations.
    pub fn default_for_width(total_bits: u32) -> Result<Self> {
        match total_bits {
            8 => Self::new(8, 3),
            16 => Self::new(16, 6),
            other => Err(SpxError::InvalidFormat {
                total: other,
                integer: 0,
            }),
        }
    }

    pub fn frac_bits(&self) -> u32 {
        self.total_bits - self.integer_bits
    }

    /// Size of one quantization step, `2^-frac_bits`.
    pub fn step(&self) -> f64 {
        (2.0f64).powi(-(self.frac_bits() as i32))
    }

    pub fn max_raw(&self) -> i64 {
        (1i64 << (self.total_bits - 1)) - 1
    }

    pub fn min_raw(&self) -> i64 {
        -(1i64 << (self.total_bits - 1))
    }

    pub fn max_value(&self) -> f64 {
        self.max_raw() as f64 * self.step()
    }

    pub fn min_value(&self) -> f64 {
        self.min_raw() as f64 * self.step()
    }

    /// Round-to-nearest (ties away from zero), then saturate.
    pub fn quantize(&self, x: f64) -> FixedValue {
        let scaled = x / self.step();
        // f64::round is ties-away-from-zero; `as i64` saturates, NaN maps to 0
        let raw = scaled
            .round()
            .clamp(self.min_raw() as f64, self.max_raw() as f64) as i64;
        FixedValue { raw, format: *self }
    }

    /// Raw scaled-integer representation of `x` after quantization.
    pub fn to_raw(&self, x: f64) -> i64 {
        self.quantize(x).raw
    }

    pub fn from_raw_saturating(&self, raw: i128) -> FixedValue {
        let raw = raw.clamp(self.min_raw() as i128, self.max_raw() as i128) as i64;
        FixedValue { raw, format: *self }
    }
}

/// A fixed-point number: raw scaled integer plus its format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedValue {
    pub raw: i64,
    pub format: FixedFormat,
}

impl FixedValue {
    pub fn to_f64(&self) -> f64 {
        self.raw as f64 * self.format.step()
    }
}

/// Accumulate the full-precision product `a * b` into a wide accumulator.
///
/// The accumulator scale is `2^-(frac_a + frac_b)`. No rounding or
/// saturation happens here; quantize once at the layer output.
pub fn fixed_mul_acc(acc: i128, a: FixedValue, b: FixedValue) -> i128 {
    acc + (a.raw as i128) * (b.raw as i128)
}

/// Integer division with round-to-nearest, ties away from zero. `den > 0`.
pub fn div_round_ties_away(num: i128, den: i128) -> i128 {
    debug_assert!(den > 0);
    let half = den / 2;
    if num >= 0 {
        (num + half) / den
    } else {
        -((-num + half) / den)
    }
}

/// Quantize a wide accumulator at scale `2^-acc_frac_bits` into `fmt`.
pub fn requantize_acc(acc: i128, acc_frac_bits: u32, fmt: FixedFormat) -> FixedValue {
    let out_frac = fmt.frac_bits();
    let raw = if acc_frac_bits >= out_frac {
        div_round_ties_away(acc, 1i128 << (acc_frac_bits - out_frac))
    } else {
        acc << (out_frac - acc_frac_bits)
    };
    fmt.from_raw_saturating(raw)
}

/// Arithmetic mode threaded through every layer implementation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arithmetic {
    /// Double-precision floating point.
    Float,
    /// Emulated fixed point; inputs, weights, and layer outputs all live
    /// in this format.
    Fixed(FixedFormat),
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fmt(total: u32, int: u32) -> FixedFormat {
        FixedFormat::new(total, int).unwrap()
    }

    #[test]
    fn format_validation() {
        assert!(FixedFormat::new(8, 3).is_ok());
        assert!(FixedFormat::new(1, 1).is_err());
        assert!(FixedFormat::new(33, 3).is_err());
        assert!(FixedFormat::new(8, 0).is_err());
        assert!(FixedFormat::new(8, 9).is_err());
    }

    #[test]
    fn quantize_exact_half() {
        let q = fmt(8, 1).quantize(0.5);
        assert_eq!(q.raw, 64);
        assert_eq!(q.to_f64(), 0.5);
    }

    #[test]
    fn quantize_saturates_positive() {
        let q = fmt(8, 1).quantize(1.0);
        assert_eq!(q.raw, 127);
        assert_eq!(q.to_f64(), 127.0 / 128.0);
    }

    #[test]
    fn quantize_negative_endpoint() {
        let q = fmt(8, 1).quantize(-1.0);
        assert_eq!(q.raw, -128);
        assert_eq!(q.to_f64(), -1.0);
    }

    #[test]
    fn mul_acc_exact_product() {
        let f = fmt(8, 1);
        let a = f.quantize(0.5);
        let b = f.quantize(0.5);
        let acc = fixed_mul_acc(0, a, b);
        // scale 2^-14; 0.25 = 4096 * 2^-14
        assert_eq!(acc, 4096);
        assert_eq!(requantize_acc(acc, 2 * f.frac_bits(), f).to_f64(), 0.25);
    }

    #[test]
    fn mul_acc_order_independent() {
        let f = fmt(8, 2);
        let pairs = [(0.3, -0.7), (0.9, 0.1), (-0.4, -0.6)];
        let fwd = pairs.iter().fold(0i128, |acc, &(a, b)| {
            fixed_mul_acc(acc, f.quantize(a), f.quantize(b))
        });
        let rev = pairs.iter().rev().fold(0i128, |acc, &(a, b)| {
            fixed_mul_acc(acc, f.quantize(a), f.quantize(b))
        });
        assert_eq!(fwd, rev);
    }

    #[test]
    fn mul_acc_matches_bigint_oracle() {
        use num_bigint::BigInt;
        use rand::{Rng, SeedableRng};
        let f = fmt(8, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..64);
            let mut acc = 0i128;
            let mut big = BigInt::from(0);
            for _ in 0..n {
                let a = FixedValue {
                    raw: rng.gen_range(f.min_raw()..=f.max_raw()),
                    format: f,
                };
                let b = FixedValue {
                    raw: rng.gen_range(f.min_raw()..=f.max_raw()),
                    format: f,
                };
                acc = fixed_mul_acc(acc, a, b);
                big += BigInt::from(a.raw) * BigInt::from(b.raw);
            }
            assert_eq!(BigInt::from(acc), big);
        }
    }

    #[test]
    fn div_round_ties() {
        assert_eq!(div_round_ties_away(3, 2), 2);
        assert_eq!(div_round_ties_away(-3, 2), -2);
        assert_eq!(div_round_ties_away(5, 4), 1);
        assert_eq!(div_round_ties_away(6, 4), 2);
        assert_eq!(div_round_ties_away(-6, 4), -2);
        assert_eq!(div_round_ties_away(0, 9), 0);
    }

    proptest! {
        #[test]
        fn quantize_idempotent(x in -300.0f64..300.0, total in 2u32..=16, int_off in 0u32..16) {
            let int = 1 + int_off % total;
            let f = fmt(total, int);
            let q = f.quantize(x);
            prop_assert_eq!(f.quantize(q.to_f64()).raw, q.raw);
        }

        #[test]
        fn quantize_monotone(a in -300.0f64..300.0, b in -300.0f64..300.0) {
            let f = fmt(12, 4);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(f.quantize(lo).raw <= f.quantize(hi).raw);
        }

        #[test]
        fn quantize_error_bound(x in -3.9f64..3.9) {
            let f = fmt(10, 3);
            let q = f.quantize(x);
            prop_assert!((q.to_f64() - x).abs() <= f.step() / 2.0 + 1e-15);
        }
    }
}
