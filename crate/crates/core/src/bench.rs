//! Throughput harness: every scheme is timed the same way, from an in-memory
//! payload to in-memory fragments and back. Disk and network are excluded.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{reconstruct_baseline, Fragments, SchemeConfig, SchemeId};
use crate::codec::{decode_data, decode_data_parallel};
use crate::error::{Error, Result};

/// The paper-style comparison: the codec at `c` in {2, 3} and three block
/// sizes, next to the reference schemes at the same `k`.
pub const DEFAULT_GRID: &str =
    "proposed:k=6,12:c=2,3:b=16,34,250;ssms:k=6,12;aont-rs:k=6,12;ida:k=6,12;sss:k=6,12";

const BYTES_PER_MB: f64 = 1_000_000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Fragment,
    Defragment,
    /// Codec decode on the rayon pool; reported only when requested.
    DefragmentParallel,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Fragment => "fragment",
            Direction::Defragment => "defragment",
            Direction::DefragmentParallel => "defragment-parallel",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Grid points to time, as parsed by [`parse_grid`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid(pub Vec<SchemeConfig>);

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_grid(s).map(Grid)
    }
}

/// Parses `scheme[:key=v,v,..]*` sections separated by `;`. Keys are `k`,
/// `c`, `b` (block size) and `n`; the cartesian product of the listed values
/// is taken. `n` defaults to `k`, `c` to 2 and `b` to 250.
///
/// `proposed:k=4,8:c=2:b=16,250;sss:k=2,4` gives four codec points and two
/// SSS points.
pub fn parse_grid(spec: &str) -> Result<Vec<SchemeConfig>> {
    let mut out = Vec::new();
    for section in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let mut parts = section.split(':');
        let scheme: SchemeId = parts.next().unwrap_or_default().trim().parse()?;
        let (mut ks, mut cs, mut bs, mut ns) = (None, vec![2], vec![250], None);
        for part in parts {
            let (key, values) = part
                .split_once('=')
                .ok_or_else(|| Error::param(format!("grid term {part:?} is not key=values")))?;
            let values = values
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::param(format!("grid value {v:?} is not a number")))
                })
                .collect::<Result<Vec<_>>>()?;
            match key.trim() {
                "k" => ks = Some(values),
                "c" => cs = values,
                "b" | "block_size" | "block-size" => bs = values,
                "n" => ns = Some(values),
                other => return Err(Error::param(format!("unknown grid key {other:?}"))),
            }
        }
        let ks = ks.ok_or_else(|| Error::param(format!("grid section {section:?} lacks k=")))?;
        if scheme != SchemeId::Proposed {
            // c and b do not apply
            cs.truncate(1);
            bs.truncate(1);
        }
        for &k in &ks {
            for &c in &cs {
                for &block_size in &bs {
                    for &n in ns.as_deref().unwrap_or(&[k]) {
                        let cfg = SchemeConfig {
                            scheme,
                            k,
                            n,
                            c,
                            block_size,
                        };
                        cfg.validate().map_err(|e| {
                            Error::param(format!("grid point {}: {e}", describe(&cfg)))
                        })?;
                        out.push(cfg);
                    }
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::param("empty benchmark grid"));
    }
    Ok(out)
}

fn describe(cfg: &SchemeConfig) -> String {
    match cfg.scheme {
        SchemeId::Proposed => format!("proposed k={} c={} b={}", cfg.k, cfg.c, cfg.block_size),
        s => format!("{s} k={} n={}", cfg.k, cfg.n),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub points: Vec<SchemeConfig>,
    pub payload_bytes: usize,
    pub repetitions: usize,
    pub warmups: usize,
    /// Also time the parallel codec decode.
    pub parallel_decode: bool,
    /// Seeds the payload and the schemes' randomness.
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(points: Vec<SchemeConfig>, payload_bytes: usize) -> Self {
        Self {
            points,
            payload_bytes,
            repetitions: 5,
            warmups: 1,
            parallel_decode: false,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 3 {
            return Err(Error::param("at least 3 repetitions are needed"));
        }
        if self.payload_bytes == 0 {
            return Err(Error::param("payload must not be empty"));
        }
        if self.points.is_empty() {
            return Err(Error::param("empty benchmark grid"));
        }
        self.points.iter().try_for_each(SchemeConfig::validate)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub scheme: SchemeId,
    pub k: usize,
    pub n: usize,
    /// Absent for the reference schemes.
    pub c: Option<usize>,
    pub block_size: Option<usize>,
    pub direction: Direction,
    pub payload_bytes: usize,
    pub mb_per_s_median: f64,
    pub mb_per_s_stddev: f64,
    /// Per-repetition throughputs, in run order.
    pub samples: Vec<f64>,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.is_empty() {
        f64::NAN
    } else if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Sample standard deviation; zero for fewer than two values.
pub fn stddev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

fn time<T>(f: impl FnOnce() -> Result<T>) -> Result<(f64, T)> {
    let start = Instant::now();
    let out = f()?;
    Ok((start.elapsed().as_secs_f64().max(1e-9), out))
}

fn reassemble(fragments: Fragments, parallel: bool) -> Result<Vec<u8>> {
    match fragments {
        Fragments::Codec(fs) if parallel => decode_data_parallel(&fs),
        Fragments::Codec(fs) => decode_data(&fs),
        Fragments::Baseline(v) => reconstruct_baseline(v),
    }
}

/// Times `reps` runs after `warmups` discarded ones.
fn measure(
    payload: usize,
    warmups: usize,
    reps: usize,
    mut run: impl FnMut() -> Result<f64>,
) -> Result<Vec<f64>> {
    for _ in 0..warmups {
        run()?;
    }
    (0..reps)
        .map(|_| run().map(|secs| payload as f64 / secs / BYTES_PER_MB))
        .collect()
}

/// Times one grid point in every requested direction.
pub fn bench_point(
    cfg: &SchemeConfig,
    data: &[u8],
    bc: &BenchConfig,
    rng: &mut ChaCha20Rng,
) -> Result<Vec<BenchResult>> {
    let mut last = None;
    let frag = measure(data.len(), bc.warmups, bc.repetitions, || {
        let (secs, f) = time(|| cfg.split(data, rng))?;
        last = Some(f);
        Ok(secs)
    })?;
    let fragments = last.expect("at least one repetition");
    // for the reference schemes only k fragments are handed to reconstruct
    let fragments = match fragments {
        Fragments::Baseline(mut v) => {
            v.truncate(cfg.k);
            Fragments::Baseline(v)
        }
        f => f,
    };

    let mut directions = vec![(Direction::Fragment, frag)];
    let check = |parallel: bool| -> Result<Vec<f64>> {
        measure(data.len(), bc.warmups, bc.repetitions, || {
            let input = fragments.clone();
            let (secs, out) = time(|| reassemble(input, parallel))?;
            if out.len() != data.len() {
                return Err(Error::Integrity("benchmark round trip lost bytes".into()));
            }
            Ok(secs)
        })
    };
    directions.push((Direction::Defragment, check(false)?));
    if bc.parallel_decode && cfg.scheme == SchemeId::Proposed {
        directions.push((Direction::DefragmentParallel, check(true)?));
    }

    let codec = cfg.scheme == SchemeId::Proposed;
    Ok(directions
        .into_iter()
        .map(|(direction, samples)| BenchResult {
            scheme: cfg.scheme,
            k: cfg.k,
            n: cfg.n,
            c: codec.then_some(cfg.c),
            block_size: codec.then_some(cfg.block_size),
            direction,
            payload_bytes: data.len(),
            mb_per_s_median: median(&samples),
            mb_per_s_stddev: stddev(&samples),
            samples,
        })
        .collect())
}

/// A random payload of `len` bytes.
pub fn random_payload(len: usize, seed: u64) -> Vec<u8> {
    let mut d = vec![0u8; len];
    ChaCha20Rng::seed_from_u64(seed).fill_bytes(&mut d);
    d
}

pub fn run_bench(bc: &BenchConfig) -> Result<Vec<BenchResult>> {
    bc.validate()?;
    let data = random_payload(bc.payload_bytes, bc.seed);
    let mut rng = ChaCha20Rng::seed_from_u64(bc.seed.wrapping_add(1));
    let mut out = Vec::new();
    for cfg in &bc.points {
        out.extend(bench_point(cfg, &data, bc, &mut rng)?);
    }
    Ok(out)
}

/// CSV with columns `scheme,k,c,block_size,mb_per_s_median,mb_per_s_stddev,direction`.
/// `c` and `block_size` are empty for the reference schemes.
pub fn write_csv<W: Write>(results: &[BenchResult], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "scheme",
        "k",
        "c",
        "block_size",
        "mb_per_s_median",
        "mb_per_s_stddev",
        "direction",
    ])?;
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in results {
        out.write_record([
            r.scheme.to_string(),
            r.k.to_string(),
            opt(r.c),
            opt(r.block_size),
            format!("{:.3}", r.mb_per_s_median),
            format!("{:.3}", r.mb_per_s_stddev),
            r.direction.to_string(),
        ])?;
    }
    out.flush().map_err(|e| Error::io("benchmark csv", e))?;
    Ok(())
}

pub fn write_json<W: Write>(results: &[BenchResult], w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, results)?;
    Ok(())
}

/// Writes `results` to both `csv` and `json`.
pub fn emit_results<C: Write, J: Write>(results: &[BenchResult], csv: C, json: J) -> Result<()> {
    write_csv(results, csv)?;
    write_json(results, json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("proposed:k=4,8,16:c=2:b=16,34,250;sss:k=2,4,8").unwrap();
        assert_eq!(g.len(), 9 + 3);
        assert_eq!(
            g[0],
            SchemeConfig {
                scheme: SchemeId::Proposed,
                k: 4,
                n: 4,
                c: 2,
                block_size: 16
            }
        );
        assert_eq!(
            g[11],
            SchemeConfig {
                scheme: SchemeId::Sss,
                k: 8,
                n: 8,
                c: 2,
                block_size: 250
            }
        );
        assert_eq!(parse_grid("ida:k=3:n=5").unwrap()[0].n, 5);
        assert_eq!(parse_grid(DEFAULT_GRID).unwrap().len(), 12 + 8);
    }

    #[test]
    fn malformed_grids_rejected() {
        for bad in [
            "",
            "proposed",
            "proposed:k=x",
            "proposed:k=5:c=2",
            "rc4:k=2",
            "sss:k=2:q=1",
            "sss:k",
        ] {
            assert!(matches!(parse_grid(bad), Err(Error::Param(_))), "{bad}");
        }
    }

    #[test]
    fn statistics() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(stddev(&[5.0]), 0.0);
        assert!((stddev(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]) - 2.138).abs() < 1e-3);
    }

    #[test]
    fn csv_shapes() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "scheme,k,c,block_size,mb_per_s_median,mb_per_s_stddev,direction\n"
        );

        let mut bc = BenchConfig::new(
            parse_grid("proposed:k=4:c=2:b=16,250;sss:k=2").unwrap(),
            1 << 16,
        );
        bc.repetitions = 3;
        bc.warmups = 0;
        let results = run_bench(&bc).unwrap();
        assert_eq!(results.len(), 3 * 2);
        assert!(results
            .iter()
            .all(|r| r.mb_per_s_median > 0.0 && r.samples.len() == 3));
        let mut buf = Vec::new();
        let mut json = Vec::new();
        emit_results(&results, &mut buf, &mut json).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 6);
        assert!(text.contains("\nsss,2,,,"));
        let back: Vec<BenchResult> = serde_json::from_slice(&json).unwrap();
        assert_eq!(back.len(), results.len());
        for (a, b) in back.iter().zip(&results) {
            assert_eq!(
                (a.scheme, a.k, a.c, a.direction),
                (b.scheme, b.k, b.c, b.direction)
            );
            assert!((a.mb_per_s_median - b.mb_per_s_median).abs() < 1e-9 * b.mb_per_s_median);
        }
    }

    #[test]
    fn parallel_direction_only_for_the_codec() {
        let mut bc = BenchConfig::new(parse_grid("proposed:k=4;ida:k=2").unwrap(), 1 << 14);
        bc.parallel_decode = true;
        let results = run_bench(&bc).unwrap();
        let dirs: Vec<Direction> = results.iter().map(|r| r.direction).collect();
        assert_eq!(
            dirs,
            vec![
                Direction::Fragment,
                Direction::Defragment,
                Direction::DefragmentParallel,
                Direction::Fragment,
                Direction::Defragment,
            ]
        );
    }

    #[test]
    fn config_validation() {
        let mut bc = BenchConfig::new(parse_grid("sss:k=2").unwrap(), 10);
        bc.repetitions = 2;
        assert!(bc.validate().is_err());
        bc.repetitions = 3;
        bc.payload_bytes = 0;
        assert!(bc.validate().is_err());
    }
}
