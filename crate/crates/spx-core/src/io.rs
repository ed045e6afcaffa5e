//! Bit-exact file formats: binary tensors (magic "SPXT", little-endian,
//! float32 payload), text sparse bundles, and JSON model manifests.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Result, SpxError};
use crate::sparse::SparseBundle;
use crate::tensor::DenseTensor;

pub const TENSOR_MAGIC: [u8; 4] = *b"SPXT";
pub const TENSOR_VERSION: u32 = 1;

pub fn write_tensor_to(mut w: impl Write, t: &DenseTensor) -> Result<()> {
    w.write_all(&TENSOR_MAGIC)?;
    w.write_all(&TENSOR_VERSION.to_le_bytes())?;
    for dim in [t.h, t.w, t.c] {
        let v = u32::try_from(dim)
            .map_err(|_| SpxError::InvalidDimensions(format!("dimension {} overflows u32", dim)))?;
        w.write_all(&v.to_le_bytes())?;
    }
    for &x in &t.data {
        w.write_all(&(x as f32).to_le_bytes())?;
    }
    Ok(())
}

pub fn read_tensor_from(mut r: impl Read) -> Result<DenseTensor> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| SpxError::Truncated { expected: 4, got: 0 })?;
    if magic != TENSOR_MAGIC {
        return Err(SpxError::BadMagic(magic));
    }
    let mut u32buf = [0u8; 4];
    let mut read_u32 = |r: &mut dyn Read| -> Result<u32> {
        r.read_exact(&mut u32buf)
            .map_err(|_| SpxError::Truncated { expected: 4, got: 0 })?;
        Ok(u32::from_le_bytes(u32buf))
    };
    let version = read_u32(&mut r)?;
    if version != TENSOR_VERSION {
        return Err(SpxError::BadVersion(version));
    }
    let h = read_u32(&mut r)? as usize;
    let w = read_u32(&mut r)? as usize;
    let c = read_u32(&mut r)? as usize;
    let n = h
        .checked_mul(w)
        .and_then(|hw| hw.checked_mul(c))
        .ok_or_else(|| SpxError::InvalidDimensions("H*W*C overflows".into()))?;
    let mut payload = vec![0u8; n * 4];
    let mut got = 0usize;
    while got < payload.len() {
        let k = r.read(&mut payload[got..])?;
        if k == 0 {
            return Err(SpxError::Truncated {
                expected: n * 4,
                got,
            });
        }
        got += k;
    }
    let mut data = Vec::with_capacity(n);
    for (i, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(SpxError::NonFinite(i));
        }
        data.push(v as f64);
    }
    DenseTensor::from_data(h, w, c, data)
}

pub fn write_tensor(path: &Path, t: &DenseTensor) -> Result<()> {
    let mut buf = Vec::new();
    write_tensor_to(&mut buf, t)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_tensor(path: &Path) -> Result<DenseTensor> {
    read_tensor_from(fs::File::open(path)?)
}

/// CSV import: header line `H,W,C`, then one value per line (or
/// comma-separated rows); values are parsed at float32 precision so CSV and
/// binary imports of the same data agree exactly.
pub fn read_tensor_csv_from(r: impl Read) -> Result<DenseTensor> {
    let mut text = String::new();
    let mut r = r;
    r.read_to_string(&mut text)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| SpxError::Parse("empty CSV".into()))?;
    let dims: Vec<usize> = header
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| SpxError::Parse(format!("bad CSV header: {:?}", header))))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(SpxError::Parse("CSV header must be H,W,C".into()));
    }
    let (h, w, c) = (dims[0], dims[1], dims[2]);
    let mut data = Vec::with_capacity(h * w * c);
    for line in lines {
        for tok in line.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let v: f32 = tok
                .parse()
                .map_err(|_| SpxError::Parse(format!("bad CSV value: {:?}", tok)))?;
            if !v.is_finite() {
                return Err(SpxError::NonFinite(data.len()));
            }
            data.push(v as f64);
        }
    }
    DenseTensor::from_data(h, w, c, data)
}

pub fn read_tensor_csv(path: &Path) -> Result<DenseTensor> {
    read_tensor_csv_from(fs::File::open(path)?)
}

/// Text bundle format: header `n_max C grid_h grid_w`, then one line per
/// slot `h w f0 ... fC-1`; sentinel slots print zeros throughout.
pub fn write_bundle_to(mut w: impl Write, b: &SparseBundle) -> Result<()> {
    writeln!(w, "{} {} {} {}", b.n_max, b.channels, b.grid_h, b.grid_w)?;
    for i in 0..b.n_max {
        let (h, ww) = b.coord(i);
        write!(w, "{} {}", h, ww)?;
        for c in 0..b.channels {
            // {:?} keeps full f64 round-trip precision
            write!(w, " {:?}", b.feat[b.channels * i + c])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_bundle_from(r: impl Read) -> Result<SparseBundle> {
    let mut text = String::new();
    let mut r = r;
    r.read_to_string(&mut text)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| SpxError::Parse("empty bundle file".into()))?;
    let hdr: Vec<usize> = header
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| SpxError::Parse(format!("bad bundle header: {:?}", header))))
        .collect::<Result<_>>()?;
    if hdr.len() != 4 {
        return Err(SpxError::Parse(
            "bundle header must be: n_max C grid_h grid_w".into(),
        ));
    }
    let (n_max, channels, grid_h, grid_w) = (hdr[0], hdr[1], hdr[2], hdr[3]);
    let mut b = SparseBundle::empty(n_max, channels, grid_h, grid_w);
    for i in 0..n_max {
        let line = lines
            .next()
            .ok_or_else(|| SpxError::Parse(format!("bundle missing slot line {}", i)))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 + channels {
            return Err(SpxError::Parse(format!(
                "slot line {} has {} fields, want {}",
                i,
                toks.len(),
                2 + channels
            )));
        }
        b.hash[2 * i] = toks[0]
            .parse()
            .map_err(|_| SpxError::Parse(format!("bad coordinate: {:?}", toks[0])))?;
        b.hash[2 * i + 1] = toks[1]
            .parse()
            .map_err(|_| SpxError::Parse(format!("bad coordinate: {:?}", toks[1])))?;
        for c in 0..channels {
            let v: f64 = toks[2 + c]
                .parse()
                .map_err(|_| SpxError::Parse(format!("bad feature: {:?}", toks[2 + c])))?;
            if !v.is_finite() {
                return Err(SpxError::NonFinite(i * channels + c));
            }
            b.feat[channels * i + c] = v;
        }
    }
    if lines.next().is_some() {
        return Err(SpxError::Parse("trailing lines after last slot".into()));
    }
    Ok(b)
}

pub fn write_bundle(path: &Path, b: &SparseBundle) -> Result<()> {
    let mut buf = Vec::new();
    write_bundle_to(&mut buf, b)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_bundle(path: &Path) -> Result<SparseBundle> {
    read_bundle_from(fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roundtrip_tensor(t: &DenseTensor) -> DenseTensor {
        let mut buf = Vec::new();
        write_tensor_to(&mut buf, t).unwrap();
        read_tensor_from(buf.as_slice()).unwrap()
    }

    #[test]
    fn tensor_payload_size() {
        let t = DenseTensor::zeros(2, 2, 1);
        let mut buf = Vec::new();
        write_tensor_to(&mut buf, &t).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 12 + 16); // magic, version, dims, payload
    }

    #[test]
    fn tensor_bad_magic() {
        let mut buf = Vec::new();
        write_tensor_to(&mut buf, &DenseTensor::zeros(1, 1, 1)).unwrap();
        buf[0..4].copy_from_slice(b"XXXX");
        match read_tensor_from(buf.as_slice()) {
            Err(SpxError::BadMagic(m)) => assert_eq!(&m, b"XXXX"),
            other => panic!("expected bad magic, got {:?}", other),
        }
    }

    #[test]
    fn tensor_truncated() {
        let mut buf = Vec::new();
        write_tensor_to(&mut buf, &DenseTensor::zeros(2, 2, 1)).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(
            read_tensor_from(buf.as_slice()),
            Err(SpxError::Truncated { .. })
        ));
    }

    #[test]
    fn tensor_rejects_non_finite() {
        let mut buf = Vec::new();
        write_tensor_to(&mut buf, &DenseTensor::zeros(1, 1, 1)).unwrap();
        let nan = f32::NAN.to_le_bytes();
        let n = buf.len();
        buf[n - 4..].copy_from_slice(&nan);
        assert!(matches!(
            read_tensor_from(buf.as_slice()),
            Err(SpxError::NonFinite(0))
        ));
    }

    #[test]
    fn bundle_round_trip() {
        let mut b = SparseBundle::empty(3, 2, 5, 5);
        b.hash[..4].copy_from_slice(&[1, 2, 4, 5]);
        b.feat[..4].copy_from_slice(&[1.25, -0.5, 0.125, 3.0]);
        let mut buf = Vec::new();
        write_bundle_to(&mut buf, &b).unwrap();
        let back = read_bundle_from(buf.as_slice()).unwrap();
        assert_eq!(b, back);
        // serialize-again is byte identical
        let mut buf2 = Vec::new();
        write_bundle_to(&mut buf2, &back).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn csv_matches_binary() {
        let t = DenseTensor::from_data(2, 2, 1, vec![0.5, -1.25, 3.0, 0.0]).unwrap();
        let csv = "2,2,1\n0.5,-1.25\n3.0,0.0\n";
        let from_csv = read_tensor_csv_from(csv.as_bytes()).unwrap();
        assert_eq!(from_csv, roundtrip_tensor(&t));
    }

    proptest! {
        #[test]
        fn tensor_round_trip_is_lossless_at_f32(
            h in 1usize..6, w in 1usize..6, c in 1usize..3, seed in 0u64..1000
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<f64> = (0..h * w * c)
                .map(|_| rng.gen_range(-10.0f32..10.0) as f64)
                .collect();
            let t = DenseTensor::from_data(h, w, c, data).unwrap();
            let back = roundtrip_tensor(&t);
            prop_assert_eq!(&t, &back);
            // parse-then-serialize is byte-identical
            let mut b1 = Vec::new();
            let mut b2 = Vec::new();
            write_tensor_to(&mut b1, &t).unwrap();
            write_tensor_to(&mut b2, &back).unwrap();
            prop_assert_eq!(b1, b2);
        }
    }
}
