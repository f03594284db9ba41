//! Reference fragmentation schemes: Shamir secret sharing, Rabin's IDA,
//! secret sharing made short (SSMS) and AONT-RS. All of them, and the
//! proposed codec, implement [`FragmentationScheme`].

mod aont;
mod crypto;
mod ida;
mod ssms;
mod sss;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::codec::{self, CodecParams, Fragment, FragmentSet};
use crate::error::{Error, Result};
use crate::format::{checked_u16, Reader, VERSION};

pub use aont::{aont_rs_reconstruct, aont_rs_split, AontRs};
pub use crypto::{Aes128Ctr, ChaCha20Cipher, Cipher, Digest, NullCipher, Sha256Digest};
pub use ida::{ida_reconstruct, ida_split, Ida, IdaMatrix, IdaShare};
pub use ssms::{ssms_reconstruct, ssms_split, Ssms};
pub use sss::{sss_reconstruct, sss_split, Sss, SssShare};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeId {
    Sss,
    Ida,
    Ssms,
    AontRs,
    Proposed,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [
        SchemeId::Proposed,
        SchemeId::Sss,
        SchemeId::Ida,
        SchemeId::Ssms,
        SchemeId::AontRs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::Sss => "sss",
            SchemeId::Ida => "ida",
            SchemeId::Ssms => "ssms",
            SchemeId::AontRs => "aont-rs",
            SchemeId::Proposed => "proposed",
        }
    }

    pub fn magic(self) -> &'static [u8; 4] {
        match self {
            SchemeId::Sss => b"KSSS",
            SchemeId::Ida => b"KIDA",
            SchemeId::Ssms => b"KSMS",
            SchemeId::AontRs => b"KANT",
            SchemeId::Proposed => crate::format::FRAGMENT_MAGIC,
        }
    }

    /// File extension used for this scheme's fragments.
    pub fn extension(self) -> &'static str {
        match self {
            SchemeId::Sss => "ksss",
            SchemeId::Ida => "kida",
            SchemeId::Ssms => "ksms",
            SchemeId::AontRs => "kant",
            SchemeId::Proposed => "kfrg",
        }
    }

    fn from_magic(m: &[u8]) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.magic() == m)
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sss" | "shamir" => Ok(SchemeId::Sss),
            "ida" => Ok(SchemeId::Ida),
            "ssms" => Ok(SchemeId::Ssms),
            "aont-rs" | "aont_rs" | "aontrs" | "aont" => Ok(SchemeId::AontRs),
            "proposed" | "kfrg" => Ok(SchemeId::Proposed),
            other => Err(Error::param(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Common interface over every fragmentation scheme in the crate.
pub trait FragmentationScheme {
    type Fragment;

    fn id(&self) -> SchemeId;

    /// Fragments needed for reconstruction.
    fn threshold(&self) -> usize;

    fn split<R: RngCore + CryptoRng>(
        &self,
        data: &[u8],
        rng: &mut R,
    ) -> Result<Vec<Self::Fragment>>;

    fn reconstruct(&self, fragments: Vec<Self::Fragment>) -> Result<Vec<u8>>;
}

/// Bytes that carry encoded payload, as opposed to headers and key or
/// permutation material.
pub trait DataBytes {
    fn data_bytes(&self) -> &[u8];
}

impl DataBytes for Fragment {
    fn data_bytes(&self) -> &[u8] {
        &self.shares
    }
}

impl DataBytes for BaselineFragment {
    fn data_bytes(&self) -> &[u8] {
        &self.data
    }
}

/// The proposed codec behind the common interface.
#[derive(Clone, Copy, Debug)]
pub struct Proposed {
    pub params: CodecParams,
    pub parallel_decode: bool,
}

impl Proposed {
    pub fn new(params: CodecParams) -> Self {
        Self {
            params,
            parallel_decode: false,
        }
    }
}

impl FragmentationScheme for Proposed {
    type Fragment = Fragment;

    fn id(&self) -> SchemeId {
        SchemeId::Proposed
    }

    fn threshold(&self) -> usize {
        self.params.k
    }

    fn split<R: RngCore + CryptoRng>(&self, data: &[u8], rng: &mut R) -> Result<Vec<Fragment>> {
        Ok(codec::encode_data(data, &self.params, rng)?.into_fragments())
    }

    fn reconstruct(&self, fragments: Vec<Fragment>) -> Result<Vec<u8>> {
        let fs = FragmentSet::new(fragments)?;
        if self.parallel_decode {
            codec::decode_data_parallel(&fs)
        } else {
            codec::decode_data(&fs)
        }
    }
}

/// A fragment produced by one of the reference schemes.
///
/// File layout:
///
/// ```text
/// magic (4) | version u8 | k u16 | n u16 | index u16 | payload_length u64
///           | trailer length u16 | trailer | data length u32 | data
/// ```
///
/// The trailer holds the scheme-specific material: the x-coordinate for SSS,
/// the generator row for IDA, row plus key share for SSMS, and the parity
/// coefficients for AONT-RS parity parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaselineFragment {
    pub scheme: SchemeId,
    pub k: usize,
    pub n: usize,
    pub index: usize,
    pub payload_length: u64,
    pub trailer: Vec<u8>,
    pub data: Vec<u8>,
}

impl BaselineFragment {
    pub fn encode(&self) -> Result<Vec<u8>> {
        if self.scheme == SchemeId::Proposed {
            return Err(Error::param(
                "proposed-scheme fragments use the KFRG format",
            ));
        }
        let data_len = u32::try_from(self.data.len())
            .map_err(|_| Error::param("fragment data exceeds 4 GiB"))?;
        let mut out = Vec::with_capacity(25 + self.trailer.len() + self.data.len());
        out.extend_from_slice(self.scheme.magic());
        out.push(VERSION);
        out.extend_from_slice(&checked_u16(self.k, "k")?.to_be_bytes());
        out.extend_from_slice(&checked_u16(self.n, "n")?.to_be_bytes());
        out.extend_from_slice(&checked_u16(self.index, "index")?.to_be_bytes());
        out.extend_from_slice(&self.payload_length.to_be_bytes());
        out.extend_from_slice(&checked_u16(self.trailer.len(), "trailer length")?.to_be_bytes());
        out.extend_from_slice(&self.trailer);
        out.extend_from_slice(&data_len.to_be_bytes());
        out.extend_from_slice(&self.data);
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let scheme = bytes
            .get(..4)
            .and_then(SchemeId::from_magic)
            .filter(|s| *s != SchemeId::Proposed)
            .ok_or_else(|| Error::Format("unknown fragment magic".into()))?;
        let mut r = Reader::new(bytes);
        r.magic(scheme.magic())?;
        let k = r.u16()? as usize;
        let n = r.u16()? as usize;
        let index = r.u16()? as usize;
        if k == 0 || n < k || index >= n {
            return Err(Error::Format(format!(
                "bad header k={k} n={n} index={index}"
            )));
        }
        let payload_length = r.u64()?;
        let trailer_len = r.u16()? as usize;
        let trailer = r.take(trailer_len)?.to_vec();
        let data_len = r.u32()? as usize;
        let data = r.take(data_len)?.to_vec();
        r.finish()?;
        Ok(Self {
            scheme,
            k,
            n,
            index,
            payload_length,
            trailer,
            data,
        })
    }
}

/// Output of [`SchemeConfig::split`].
#[derive(Clone, Debug)]
pub enum Fragments {
    Codec(FragmentSet),
    Baseline(Vec<BaselineFragment>),
}

impl Fragments {
    pub fn len(&self) -> usize {
        match self {
            Fragments::Codec(fs) => fs.fragments().len(),
            Fragments::Baseline(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Payload bytes of every fragment, in index order.
    pub fn data_bytes(&self) -> Vec<&[u8]> {
        match self {
            Fragments::Codec(fs) => fs.fragments().iter().map(DataBytes::data_bytes).collect(),
            Fragments::Baseline(v) => v.iter().map(DataBytes::data_bytes).collect(),
        }
    }
}

/// Scheme choice plus its parameters. `c` and `block_size` only matter for
/// the proposed codec; `n` is the total fragment count (for the codec,
/// anything above `k` is Reed-Solomon parity added at storage time).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: SchemeId,
    pub k: usize,
    pub n: usize,
    pub c: usize,
    pub block_size: usize,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < self.k {
            return Err(Error::param(format!(
                "n ({}) must be at least k ({})",
                self.n, self.k
            )));
        }
        match self.scheme {
            SchemeId::Proposed => {
                self.codec_params()?;
                if self.n > 255 {
                    return Err(Error::param("n must be at most 255"));
                }
                Ok(())
            }
            _ => {
                if self.k == 0 || self.n > 255 {
                    return Err(Error::param(format!(
                        "{} needs 1 <= k <= n <= 255, got k={} n={}",
                        self.scheme, self.k, self.n
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn codec_params(&self) -> Result<CodecParams> {
        CodecParams::new(self.k, self.c, self.block_size)
    }

    pub fn split<R: RngCore + CryptoRng>(&self, data: &[u8], rng: &mut R) -> Result<Fragments> {
        self.validate()?;
        let (k, n) = (self.k, self.n);
        Ok(match self.scheme {
            SchemeId::Proposed => {
                Fragments::Codec(codec::encode_data(data, &self.codec_params()?, rng)?)
            }
            SchemeId::Sss => Fragments::Baseline(Sss { k, n }.split(data, rng)?),
            SchemeId::Ida => Fragments::Baseline(Ida::new(k, n)?.split(data, rng)?),
            SchemeId::Ssms => {
                Fragments::Baseline(Ssms::new(k, n, Arc::new(Aes128Ctr))?.split(data, rng)?)
            }
            SchemeId::AontRs => Fragments::Baseline(default_aont(k, n).split(data, rng)?),
        })
    }
}

fn default_aont(k: usize, n: usize) -> AontRs {
    AontRs {
        k,
        n,
        cipher: Arc::new(Aes128Ctr),
        digest: Arc::new(Sha256Digest),
    }
}

/// Reconstructs a batch of reference-scheme fragments using the default
/// primitives (AES-128-CTR, SHA-256).
pub fn reconstruct_baseline(fragments: Vec<BaselineFragment>) -> Result<Vec<u8>> {
    let first = fragments
        .first()
        .ok_or_else(|| Error::threshold(1, 0, vec![]))?;
    let (scheme, k, n) = (first.scheme, first.k, first.n);
    match scheme {
        SchemeId::Sss => Sss { k, n }.reconstruct(fragments),
        SchemeId::Ida => Ida::new(k, n)?.reconstruct(fragments),
        SchemeId::Ssms => ssms_reconstruct(fragments, &Aes128Ctr),
        SchemeId::AontRs => default_aont(k, n).reconstruct(fragments),
        SchemeId::Proposed => Err(Error::param(
            "proposed-scheme fragments use the KFRG format",
        )),
    }
}

/// Checks that a batch of baseline fragments agrees on scheme and shape and
/// holds at least `k` distinct indices.
fn check_batch(fragments: &[BaselineFragment], scheme: SchemeId) -> Result<(usize, usize, u64)> {
    let first = fragments
        .first()
        .ok_or_else(|| Error::threshold(1, 0, vec![]))?;
    let (k, n, len) = (first.k, first.n, first.payload_length);
    for f in fragments {
        if f.scheme != scheme || f.k != k || f.n != n || f.payload_length != len {
            return Err(Error::param(
                "fragments come from different runs or schemes",
            ));
        }
    }
    let mut idx: Vec<usize> = fragments.iter().map(|f| f.index).collect();
    idx.sort_unstable();
    idx.dedup();
    if idx.len() != fragments.len() {
        return Err(Error::param("duplicate fragment index"));
    }
    if idx.len() < k {
        let missing = (0..n).filter(|i| !idx.contains(i)).collect();
        return Err(Error::threshold(k, idx.len(), missing));
    }
    Ok((k, n, len))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_ids_parse_and_print() {
        for s in SchemeId::ALL {
            assert_eq!(s.as_str().parse::<SchemeId>().unwrap(), s);
            assert_eq!(SchemeId::from_magic(s.magic()), Some(s));
        }
        assert!("rc4".parse::<SchemeId>().is_err());
        assert_eq!(
            serde_json::to_string(&SchemeId::AontRs).unwrap(),
            "\"aont-rs\""
        );
    }

    #[test]
    fn every_scheme_round_trips_through_config() {
        use rand::SeedableRng;
        let data = b"configurable ".repeat(40);
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(9);
        for scheme in SchemeId::ALL {
            let cfg = SchemeConfig {
                scheme,
                k: 4,
                n: 6,
                c: 2,
                block_size: 16,
            };
            let out = match cfg.split(&data, &mut rng).unwrap() {
                Fragments::Codec(fs) => {
                    assert_eq!(fs.fragments().len(), 4);
                    codec::decode_data(&fs).unwrap()
                }
                Fragments::Baseline(frags) => {
                    assert_eq!(frags.len(), 6);
                    reconstruct_baseline(frags[2..].to_vec()).unwrap()
                }
            };
            assert_eq!(out, data, "{scheme}");
        }
        let bad = SchemeConfig {
            scheme: SchemeId::Proposed,
            k: 5,
            n: 5,
            c: 2,
            block_size: 16,
        };
        assert!(bad.split(&data, &mut rng).is_err());
    }

    #[test]
    fn baseline_file_round_trip() {
        let f = BaselineFragment {
            scheme: SchemeId::Ida,
            k: 3,
            n: 5,
            index: 4,
            payload_length: 10,
            trailer: vec![1, 5, 17],
            data: vec![9, 8, 7, 6],
        };
        let bytes = f.encode().unwrap();
        assert_eq!(&bytes[..4], b"KIDA");
        assert_eq!(BaselineFragment::decode(&bytes).unwrap(), f);
        let mut bad = bytes.clone();
        bad[0] = b'Q';
        assert!(BaselineFragment::decode(&bad).is_err());
        assert!(BaselineFragment::decode(&bytes[..bytes.len() - 2]).is_err());
    }
}
