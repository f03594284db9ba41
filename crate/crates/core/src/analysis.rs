//! Statistical measurements over fragment contents: byte distribution,
//! Shannon entropy, chi-squared uniformity, recurrence, Pearson correlation
//! and bit difference.
//!
//! Only payload bytes are measured ([`DataBytes`]); headers and permutation
//! or key material are left out.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baselines::{DataBytes, SchemeId};
use crate::error::{Error, Result};

/// Chi-squared critical value for 255 degrees of freedom at alpha = 0.05.
pub const CHI2_CRITICAL: f64 = 293.2478;
/// Shortest input accepted by [`chi_squared`].
pub const CHI2_MIN_LEN: usize = 1000;
/// Side of the coarse grid used by [`cell_occupancy`].
pub const RECURRENCE_GRID: usize = 16;

fn counts(data: &[u8]) -> [u64; 256] {
    let mut c = [0u64; 256];
    for &b in data {
        c[b as usize] += 1;
    }
    c
}

fn non_empty(data: &[u8], what: &str) -> Result<()> {
    if data.is_empty() {
        return Err(Error::param(format!("{what} of an empty sequence")));
    }
    Ok(())
}

/// Shannon entropy in bits per byte.
pub fn entropy(data: &[u8]) -> Result<f64> {
    non_empty(data, "entropy")?;
    let n = data.len() as f64;
    let h = counts(data)
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>();
    Ok(h.clamp(0.0, 8.0))
}

/// Occurrence probability of each byte value.
pub fn pdf(data: &[u8]) -> Result<Vec<f64>> {
    non_empty(data, "pdf")?;
    let n = data.len() as f64;
    Ok(counts(data).iter().map(|&c| c as f64 / n).collect())
}

/// Chi-squared statistic against the uniform distribution over 256 bins,
/// with its pass/fail verdict at alpha = 0.05.
pub fn chi_squared(data: &[u8]) -> Result<(f64, bool)> {
    if data.len() < CHI2_MIN_LEN {
        return Err(Error::param(format!(
            "chi-squared needs at least {CHI2_MIN_LEN} bytes, got {}",
            data.len()
        )));
    }
    let expected = data.len() as f64 / 256.0;
    let stat = counts(data)
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum::<f64>();
    Ok((stat, stat <= CHI2_CRITICAL))
}

/// Fraction of differing bits between two equal-length sequences.
pub fn bit_difference(a: &[u8], b: &[u8]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::param("bit difference needs equal lengths"));
    }
    non_empty(a, "bit difference")?;
    let differing: u64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x ^ y).count_ones() as u64)
        .sum();
    Ok(differing as f64 / (8 * a.len()) as f64)
}

/// Pearson correlation of the byte values of two equal-length sequences.
pub fn correlation(a: &[u8], b: &[u8]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::param(
            "correlation needs two equal-length sequences of at least 2 bytes",
        ));
    }
    let n = a.len() as f64;
    let mean_a = a.iter().map(|&x| x as f64).sum::<f64>() / n;
    let mean_b = b.iter().map(|&x| x as f64).sum::<f64>() / n;
    let (mut cov, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let dx = x as f64 - mean_a;
        let dy = y as f64 - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((cov / (var_a.sqrt() * var_b.sqrt())).clamp(-1.0, 1.0))
}

/// Pairs `(x_i, x_{i+t})` for a recurrence plot.
pub fn recurrence(data: &[u8], t: usize) -> Result<Vec<(u8, u8)>> {
    if t == 0 || data.len() <= t {
        return Err(Error::param(format!(
            "recurrence needs delay >= 1 and more than {t} bytes"
        )));
    }
    Ok(data.iter().zip(&data[t..]).map(|(&a, &b)| (a, b)).collect())
}

/// Fraction of the 16x16 coarse cells of the recurrence plane that contain
/// at least one pair.
pub fn cell_occupancy(pairs: &[(u8, u8)]) -> f64 {
    let shift = 8 - RECURRENCE_GRID.trailing_zeros();
    let mut hit = [false; RECURRENCE_GRID * RECURRENCE_GRID];
    for &(a, b) in pairs {
        hit[(a >> shift) as usize * RECURRENCE_GRID + (b >> shift) as usize] = true;
    }
    hit.iter().filter(|&&h| h).count() as f64 / hit.len() as f64
}

/// Measurements for one fragment.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SchemeReport {
    pub index: usize,
    pub bytes: usize,
    pub entropy: f64,
    pub chi2: f64,
    pub chi2_pass: bool,
    pub pdf: Vec<f64>,
    /// Largest `|p_i - 1/256|`.
    pub pdf_max_deviation: f64,
    /// Against the original payload, over the common prefix.
    pub bit_difference: f64,
    /// Against every fragment of the run, over the common prefix.
    pub fragment_differences: Vec<f64>,
    /// Pearson coefficient with every fragment of the run; `None` when one
    /// side is constant.
    pub correlations: Vec<Option<f64>>,
    /// Delay-1 recurrence cell occupancy, see [`cell_occupancy`].
    pub recurrence_occupancy: f64,
    #[serde(skip)]
    pub recurrence: Vec<(u8, u8)>,
}

fn prefix_pair<'a>(a: &'a [u8], b: &'a [u8]) -> (&'a [u8], &'a [u8]) {
    let n = a.len().min(b.len());
    (&a[..n], &b[..n])
}

/// Runs every measurement on each fragment's payload bytes.
pub fn analyze_fragments<F: DataBytes>(
    fragments: &[F],
    original: &[u8],
) -> Result<Vec<SchemeReport>> {
    non_empty(original, "analysis")?;
    let datas: Vec<&[u8]> = fragments.iter().map(DataBytes::data_bytes).collect();
    datas
        .iter()
        .enumerate()
        .map(|(index, &data)| {
            let (chi2, chi2_pass) = chi_squared(data)?;
            let pdf = pdf(data)?;
            let pdf_max_deviation = pdf
                .iter()
                .map(|p| (p - 1.0 / 256.0).abs())
                .fold(0.0, f64::max);
            let (a, b) = prefix_pair(data, original);
            let bit_difference = bit_difference(a, b)?;
            let fragment_differences = datas
                .iter()
                .map(|&other| {
                    let (a, b) = prefix_pair(data, other);
                    bit_difference_or_zero(a, b)
                })
                .collect();
            let correlations = datas
                .iter()
                .map(|&other| {
                    let (a, b) = prefix_pair(data, other);
                    correlation(a, b).ok()
                })
                .collect();
            let recurrence = recurrence(data, 1)?;
            Ok(SchemeReport {
                index,
                bytes: data.len(),
                entropy: entropy(data)?,
                chi2,
                chi2_pass,
                pdf,
                pdf_max_deviation,
                bit_difference,
                fragment_differences,
                correlations,
                recurrence_occupancy: cell_occupancy(&recurrence),
                recurrence,
            })
        })
        .collect()
}

fn bit_difference_or_zero(a: &[u8], b: &[u8]) -> f64 {
    bit_difference(a, b).unwrap_or(0.0)
}

/// Parameters echoed in an [`AnalysisReport`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReportParams {
    pub k: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
}

/// The JSON document written by `kfrag analyze`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AnalysisReport {
    pub scheme: SchemeId,
    pub params: ReportParams,
    pub input_bytes: usize,
    pub input_entropy: f64,
    pub fragments: Vec<SchemeReport>,
    pub all_chi2_pass: bool,
    pub min_entropy: f64,
    pub max_abs_correlation: f64,
}

impl AnalysisReport {
    pub fn new(
        scheme: SchemeId,
        params: ReportParams,
        original: &[u8],
        fragments: Vec<SchemeReport>,
    ) -> Result<Self> {
        let all_chi2_pass = fragments.iter().all(|f| f.chi2_pass);
        let min_entropy = fragments.iter().map(|f| f.entropy).fold(8.0, f64::min);
        let max_abs_correlation = fragments
            .iter()
            .flat_map(|f| {
                f.correlations
                    .iter()
                    .enumerate()
                    .filter(move |(j, _)| *j != f.index)
                    .filter_map(|(_, r)| r.map(f64::abs))
            })
            .fold(0.0, f64::max);
        Ok(Self {
            scheme,
            params,
            input_bytes: original.len(),
            input_entropy: entropy(original)?,
            fragments,
            all_chi2_pass,
            min_entropy,
            max_abs_correlation,
        })
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}

/// `x,y` rows of a recurrence plot.
pub fn write_recurrence_csv<W: Write>(pairs: &[(u8, u8)], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "x_delayed"])?;
    for (a, b) in pairs {
        out.write_record([a.to_string(), b.to_string()])?;
    }
    out.flush().map_err(|e| Error::io("recurrence csv", e))?;
    Ok(())
}

/// `value,probability` rows.
pub fn write_pdf_csv<W: Write>(pdf: &[f64], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["value", "probability"])?;
    for (v, p) in pdf.iter().enumerate() {
        out.write_record([v.to_string(), p.to_string()])?;
    }
    out.flush().map_err(|e| Error::io("pdf csv", e))?;
    Ok(())
}
