//! Systematic Reed-Solomon parity over any `k` equal-length fragments.
//!
//! The generator is a Vandermonde matrix on points `0..n` multiplied by the
//! inverse of its top `k x k` block, which turns it into `[I; P]`. Primary
//! fragments pass through untouched; the `n - k` rows of `P` produce parity.

use crate::error::{Error, Result};
use crate::format::{checked_u16, Reader, VERSION};
use crate::gf256;
use crate::matrix::Matrix;

pub const PARITY_MAGIC: &[u8; 4] = b"KPAR";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityParams {
    k: usize,
    n: usize,
    generator: Matrix,
}

impl ParityParams {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || n < k || n > 255 {
            return Err(Error::param(format!(
                "erasure parameters need 1 <= k <= n <= 255, got k={k} n={n}"
            )));
        }
        let points: Vec<u8> = (0..n as u8).collect();
        let v = Matrix::vandermonde(&points, k);
        let top = v.select_rows(&(0..k).collect::<Vec<_>>());
        let generator = v.mul(&top.invert()?)?;
        Ok(Self { k, n, generator })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficients of parity row `p` (`0 <= p < n - k`).
    pub fn parity_row(&self, p: usize) -> &[u8] {
        self.generator.row(self.k + p)
    }

    /// Row of the full `[I; P]` generator for fragment index `t < n`.
    pub fn generator_row(&self, t: usize) -> &[u8] {
        self.generator.row(t)
    }
}

fn equal_lengths<'a>(parts: impl IntoIterator<Item = &'a [u8]>) -> Result<usize> {
    let mut len = None;
    for p in parts {
        match len {
            None => len = Some(p.len()),
            Some(l) if l != p.len() => {
                return Err(Error::param(
                    "erasure-coded fragments must have equal length",
                ))
            }
            _ => {}
        }
    }
    Ok(len.unwrap_or(0))
}

/// Parity sequences for the `k` primaries.
pub fn rs_encode(primary: &[&[u8]], params: &ParityParams) -> Result<Vec<Vec<u8>>> {
    if primary.len() != params.k {
        return Err(Error::param(format!(
            "expected {} primary fragments, got {}",
            params.k,
            primary.len()
        )));
    }
    let len = equal_lengths(primary.iter().copied())?;
    Ok((0..params.n - params.k)
        .map(|p| {
            let mut out = vec![0u8; len];
            for (&coeff, src) in params.parity_row(p).iter().zip(primary) {
                gf256::mul_add_slice(&mut out, src, coeff);
            }
            out
        })
        .collect())
}

/// Rebuilds the `k` primaries from any `k` of the `n` sequences. Indices
/// `0..k` are primaries, `k..n` parity.
pub fn rs_decode(available: &[(usize, &[u8])], params: &ParityParams) -> Result<Vec<Vec<u8>>> {
    let mut chosen: Vec<(usize, &[u8])> = Vec::with_capacity(params.k);
    for &(idx, data) in available {
        if idx >= params.n {
            return Err(Error::param(format!(
                "fragment index {idx} not below n = {}",
                params.n
            )));
        }
        if !chosen.iter().any(|&(i, _)| i == idx) {
            chosen.push((idx, data));
        }
    }
    if chosen.len() < params.k {
        let missing = (0..params.n)
            .filter(|i| !chosen.iter().any(|&(c, _)| c == *i))
            .collect();
        return Err(Error::threshold(params.k, chosen.len(), missing));
    }
    // prefer primaries, they need no arithmetic
    chosen.sort_by_key(|&(i, _)| i);
    chosen.truncate(params.k);
    let len = equal_lengths(chosen.iter().map(|&(_, d)| d))?;
    if chosen.iter().enumerate().all(|(pos, &(i, _))| pos == i) {
        return Ok(chosen.into_iter().map(|(_, d)| d.to_vec()).collect());
    }
    let rows: Vec<usize> = chosen.iter().map(|&(i, _)| i).collect();
    let decode = params.generator.select_rows(&rows).invert()?;
    Ok((0..params.k)
        .map(|t| match chosen.iter().find(|&&(i, _)| i == t) {
            Some(&(_, d)) => d.to_vec(),
            None => {
                let mut out = vec![0u8; len];
                for (s, &(_, src)) in chosen.iter().enumerate() {
                    gf256::mul_add_slice(&mut out, src, decode.get(t, s));
                }
                out
            }
        })
        .collect())
}

/// A parity file: `"KPAR" | version | k u16 | n u16 | row u16 |
/// coefficients (k bytes) | length u64 | data`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityFragment {
    pub k: usize,
    pub n: usize,
    /// Parity row, `0..n-k`; its fragment index is `k + row`.
    pub row: usize,
    pub coefficients: Vec<u8>,
    pub data: Vec<u8>,
}

impl ParityFragment {
    pub fn index(&self) -> usize {
        self.k + self.row
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(4 + 1 + 6 + self.k + 8 + self.data.len());
        out.extend_from_slice(PARITY_MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&checked_u16(self.k, "k")?.to_be_bytes());
        out.extend_from_slice(&checked_u16(self.n, "n")?.to_be_bytes());
        out.extend_from_slice(&checked_u16(self.row, "parity row")?.to_be_bytes());
        out.extend_from_slice(&self.coefficients);
        out.extend_from_slice(&(self.data.len() as u64).to_be_bytes());
        out.extend_from_slice(&self.data);
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.magic(PARITY_MAGIC)?;
        let k = r.u16()? as usize;
        let n = r.u16()? as usize;
        let row = r.u16()? as usize;
        if k == 0 || n <= k || row >= n - k {
            return Err(Error::Format(format!(
                "bad parity header k={k} n={n} row={row}"
            )));
        }
        let coefficients = r.take(k)?.to_vec();
        let len = usize::try_from(r.u64()?).map_err(|_| Error::Format("length overflow".into()))?;
        let data = r.take(len)?.to_vec();
        r.finish()?;
        Ok(Self {
            k,
            n,
            row,
            coefficients,
            data,
        })
    }
}

/// Parity fragments protecting `primaries` (serialized fragment files or any
/// other equal-length byte strings).
pub fn protect(primaries: &[Vec<u8>], n: usize) -> Result<Vec<ParityFragment>> {
    let params = ParityParams::new(primaries.len(), n)?;
    let refs: Vec<&[u8]> = primaries.iter().map(Vec::as_slice).collect();
    Ok(rs_encode(&refs, &params)?
        .into_iter()
        .enumerate()
        .map(|(row, data)| ParityFragment {
            k: params.k,
            n,
            row,
            coefficients: params.parity_row(row).to_vec(),
            data,
        })
        .collect())
}

/// Fills the gaps in `primaries` from `parity`.
pub fn recover(primaries: &[Option<Vec<u8>>], parity: &[ParityFragment]) -> Result<Vec<Vec<u8>>> {
    let k = primaries.len();
    if primaries.iter().all(Option::is_some) {
        return Ok(primaries.iter().flatten().cloned().collect());
    }
    let n = parity.first().map(|p| p.n).unwrap_or(k);
    if parity.iter().any(|p| p.k != k || p.n != n) {
        return Err(Error::param("parity fragments disagree on (k, n)"));
    }
    let params = ParityParams::new(k, n)?;
    for p in parity {
        if p.coefficients != params.parity_row(p.row) {
            return Err(Error::Integrity(format!(
                "parity row {} carries unexpected coefficients",
                p.row
            )));
        }
    }
    let mut available: Vec<(usize, &[u8])> = primaries
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.as_deref().map(|d| (i, d)))
        .collect();
    available.extend(parity.iter().map(|p| (p.index(), p.data.as_slice())));
    rs_decode(&available, &params).map_err(|e| match e {
        Error::Threshold {
            needed, available, ..
        } => Error::threshold(
            needed,
            available,
            primaries
                .iter()
                .enumerate()
                .filter(|(_, p)| p.is_none())
                .map(|(i, _)| i)
                .collect(),
        ),
        other => other,
    })
}
