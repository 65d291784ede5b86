//! Embedding files.
//!
//! Text: a header line `N d`, then `N` lines `node_id v1 .. vd`. Values are
//! written in shortest round-trip decimal, so reloading is bit-exact; the
//! reader also accepts hex floats such as `0x1.8p-3`.
//!
//! Binary: magic `EMB1`, little-endian `u64` N and d, then `N·d` `f64`.

use std::io::{BufRead, Read, Write};

use super::Embedding;
use crate::linalg::DenseMatrix;
use crate::{Error, Result};

pub const EMBEDDING_MAGIC: &[u8; 4] = b"EMB1";

pub fn save_embedding<W: Write>(e: &Embedding, mut sink: W) -> Result<()> {
    let m = &e.matrix;
    writeln!(sink, "{} {}", m.rows(), m.cols())?;
    let mut line = String::new();
    for i in 0..m.rows() {
        use std::fmt::Write as _;
        line.clear();
        write!(line, "{i}").unwrap();
        for v in m.row(i) {
            write!(line, " {v:?}").unwrap();
        }
        writeln!(sink, "{line}")?;
    }
    sink.flush()?;
    Ok(())
}

pub fn save_embedding_binary<W: Write>(e: &Embedding, mut sink: W) -> Result<()> {
    let m = &e.matrix;
    sink.write_all(EMBEDDING_MAGIC)?;
    sink.write_all(&(m.rows() as u64).to_le_bytes())?;
    sink.write_all(&(m.cols() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(m.as_slice().len() * 8);
    for v in m.as_slice() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(())
}

/// Reads either format, detected by the magic bytes. `expected_n`, when
/// given, must match the stored node count. The result is tagged
/// [`Algorithm::External`](super::Algorithm::External) with the given seed.
pub fn load_embedding<R: BufRead>(mut source: R, expected_n: Option<usize>, seed: u64) -> Result<Embedding> {
    let head = source.fill_buf()?;
    let matrix = if head.starts_with(EMBEDDING_MAGIC) {
        read_binary(source)?
    } else {
        read_text(source)?
    };
    if let Some(n) = expected_n {
        if matrix.rows() != n {
            return Err(Error::Shape(format!(
                "embedding has {} rows but the graph has {n} nodes",
                matrix.rows()
            )));
        }
    }
    Embedding::external(matrix, seed)
}

fn read_binary<R: Read>(mut src: R) -> Result<DenseMatrix> {
    let mut header = [0u8; 20];
    src.read_exact(&mut header)
        .map_err(|_| Error::InsufficientData("binary embedding header is truncated".into()))?;
    let n = u64::from_le_bytes(header[4..12].try_into().unwrap()) as usize;
    let d = u64::from_le_bytes(header[12..20].try_into().unwrap()) as usize;
    let len = n
        .checked_mul(d)
        .and_then(|l| l.checked_mul(8))
        .ok_or_else(|| Error::Shape(format!("binary embedding size {n} x {d} overflows")))?;
    let mut bytes = Vec::new();
    src.read_to_end(&mut bytes)?;
    if bytes.len() != len {
        return Err(Error::InsufficientData(format!(
            "binary embedding of {n} x {d} needs {len} value bytes, found {}",
            bytes.len()
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    finite(DenseMatrix::from_vec(n, d, data)?)
}

fn read_text<R: BufRead>(src: R) -> Result<DenseMatrix> {
    let mut lines = src.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::InsufficientData("embedding file is empty".into()))?;
    let header = header?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let [n, d] = dims[..] else {
        return Err(Error::parse(hline, "header must be `N d`"));
    };
    let n: usize = n.parse().map_err(|_| Error::parse(hline, format!("bad node count {n:?}")))?;
    let d: usize = d.parse().map_err(|_| Error::parse(hline, format!("bad dimension {d:?}")))?;
    let mut data = vec![0.0; n * d];
    let mut seen = vec![false; n];
    let mut rows = 0;
    for (lineno, line) in lines {
        let line = line?;
        let mut fields = line.split_whitespace();
        let id = fields.next().unwrap();
        let id: usize = id.parse().map_err(|_| Error::parse(lineno, format!("bad node id {id:?}")))?;
        if id >= n {
            return Err(Error::parse(lineno, format!("node id {id} out of range for N = {n}")));
        }
        if std::mem::replace(&mut seen[id], true) {
            return Err(Error::parse(lineno, format!("node id {id} appears twice")));
        }
        let row = &mut data[id * d..(id + 1) * d];
        let mut count = 0;
        for tok in fields {
            if count == d {
                return Err(Error::parse(lineno, format!("more than {d} values")));
            }
            let v = parse_float(tok).ok_or_else(|| Error::parse(lineno, format!("bad value {tok:?}")))?;
            if !v.is_finite() {
                return Err(Error::Numerical(format!("non-finite value {tok} on line {lineno}")));
            }
            row[count] = v;
            count += 1;
        }
        if count != d {
            return Err(Error::parse(lineno, format!("expected {d} values, found {count}")));
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::InsufficientData(format!(
            "embedding header declares {n} rows but the file is truncated after {rows}"
        )));
    }
    DenseMatrix::from_vec(n, d, data)
}

fn finite(m: DenseMatrix) -> Result<DenseMatrix> {
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::Numerical("embedding contains non-finite values".into()))
    }
}

/// Decimal via `str::parse`, or a C-style hex float `[-]0xH.HHHp[+-]E`.
fn parse_float(tok: &str) -> Option<f64> {
    let (neg, body) = match tok.as_bytes().first()? {
        b'-' => (true, &tok[1..]),
        b'+' => (false, &tok[1..]),
        _ => (false, tok),
    };
    let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) else {
        return tok.parse().ok();
    };
    let (mantissa, exp) = match hex.find(['p', 'P']) {
        Some(i) => (&hex[..i], hex[i + 1..].parse::<i32>().ok()?),
        None => (hex, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let mut bits: u128 = 0;
    let mut shift = 0i32;
    for (i, c) in int.chars().chain(frac.chars()).enumerate() {
        let digit = c.to_digit(16)? as u128;
        if bits >> 120 == 0 {
            bits = (bits << 4) | digit;
            if i >= int.len() {
                shift -= 4;
            }
        } else if i < int.len() {
            shift += 4;
        }
    }
    // scale in two steps so subnormal results do not pass through 0 or inf
    let e = exp + shift;
    let v = bits as f64 * 2f64.powi(e / 2) * 2f64.powi(e - e / 2);
    Some(if neg { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_embedding(n: usize, d: usize) -> Embedding {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let m = DenseMatrix::from_fn(n, d, |_, _| f64::from_bits(rng.random::<u64>() >> 2) * rng.random_range(-1.0..1.0));
        Embedding::external(m, 0).unwrap()
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let e = random_embedding(20, 7);
        let mut buf = Vec::new();
        save_embedding(&e, &mut buf).unwrap();
        let back = load_embedding(&buf[..], Some(20), 0).unwrap();
        let bits = |m: &DenseMatrix| m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back.matrix), bits(&e.matrix));
    }

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let e = random_embedding(5, 3);
        let mut buf = Vec::new();
        save_embedding_binary(&e, &mut buf).unwrap();
        assert_eq!(&buf[..4], EMBEDDING_MAGIC);
        let back = load_embedding(&buf[..], None, 0).unwrap();
        assert_eq!(back.matrix, e.matrix);
        assert!(load_embedding(&buf[..buf.len() - 1], None, 0).is_err());
    }

    #[test]
    fn truncated_text_is_rejected() {
        let err = load_embedding("3 2\n0 1 2\n1 3 4\n".as_bytes(), None, 0).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
    }

    #[test]
    fn nan_is_rejected() {
        assert!(load_embedding("2 1\n0 1.0\n1 NaN\n".as_bytes(), None, 0).is_err());
        assert!(load_embedding("1 1\n0 inf\n".as_bytes(), None, 0).is_err());
    }

    #[test]
    fn node_count_mismatch_is_rejected() {
        assert!(load_embedding("1 1\n0 1.0\n".as_bytes(), Some(2), 0).is_err());
    }

    #[test]
    fn hex_floats() {
        assert_eq!(parse_float("0x1.8p1"), Some(3.0));
        assert_eq!(parse_float("-0x1p-2"), Some(-0.25));
        assert_eq!(parse_float("0x.8"), Some(0.5));
        assert_eq!(parse_float("0x1.fffffffffffffp+1023"), Some(f64::MAX));
        assert_eq!(parse_float("0x1p-1074"), Some(f64::from_bits(1)));
        assert_eq!(parse_float("0xg"), None);
        let e = load_embedding("1 2\n0 0x1p0 -0x1.4p3\n".as_bytes(), None, 0).unwrap();
        assert_eq!(e.matrix.row(0), &[1.0, -10.0]);
    }
}
