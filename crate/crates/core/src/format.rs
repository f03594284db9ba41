//! Big-endian binary encodings for fragment files.
//!
//! Codec fragment layout:
//!
//! ```text
//! "KFRG" | version u8 = 1 | k u16 | c u8 | j u16 | block_size u16
//!        | payload_length u64 | r u8 | z u8
//!        | permutation share (block_size bytes)
//!        | share count u32 | share count * block_size bytes
//! ```
//!
//! Baseline and parity files use their own magic; see
//! [`crate::baselines::BaselineFragment`] and [`crate::erasure::ParityFragment`].

use crate::baselines::BaselineFragment;
use crate::codec::{CodecParams, Fragment};
use crate::erasure::ParityFragment;
use crate::error::{Error, Result};
use crate::permutation::PermutationShare;

pub const VERSION: u8 = 1;
pub const FRAGMENT_MAGIC: &[u8; 4] = b"KFRG";
/// Bytes before the permutation share in a codec fragment file.
pub const FRAGMENT_HEADER_LEN: usize = 4 + 1 + 2 + 1 + 2 + 2 + 8 + 1 + 1;
/// Fixed bytes of a codec fragment file that are not permutation or data
/// shares (header plus share count).
pub const FRAGMENT_FIXED_LEN: usize = FRAGMENT_HEADER_LEN + 4;

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.array()?))
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.array()?))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.array()?))
    }

    pub(crate) fn magic(&mut self, expected: &[u8; 4]) -> Result<()> {
        let m = self.take(4)?;
        if m != expected {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(m),
                String::from_utf8_lossy(expected)
            )));
        }
        let v = self.u8()?;
        if v != VERSION {
            return Err(Error::Format(format!("unsupported version {v}")));
        }
        Ok(())
    }

    pub(crate) fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

pub(crate) fn checked_u16(v: usize, what: &str) -> Result<u16> {
    u16::try_from(v).map_err(|_| Error::param(format!("{what} {v} does not fit in 16 bits")))
}

pub(crate) fn checked_u8(v: usize, what: &str) -> Result<u8> {
    u8::try_from(v).map_err(|_| Error::param(format!("{what} {v} does not fit in 8 bits")))
}

pub fn encode_fragment(f: &Fragment) -> Result<Vec<u8>> {
    let p = &f.params;
    let b = p.block_size;
    if f.permutation_share.len() != b || f.shares.len() % b != 0 {
        return Err(Error::param("fragment shares do not match block size"));
    }
    let count = u32::try_from(f.shares.len() / b)
        .map_err(|_| Error::param("too many shares for one fragment"))?;
    let mut out = Vec::with_capacity(FRAGMENT_FIXED_LEN + b + f.shares.len());
    out.extend_from_slice(FRAGMENT_MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&checked_u16(p.k, "k")?.to_be_bytes());
    out.push(checked_u8(p.c, "c")?);
    out.extend_from_slice(&checked_u16(f.j, "fragment index")?.to_be_bytes());
    out.extend_from_slice(&checked_u16(b, "block size")?.to_be_bytes());
    out.extend_from_slice(&f.payload_length.to_be_bytes());
    out.push(checked_u8(f.permutation_share.r, "r")?);
    out.push(checked_u8(f.permutation_share.z, "z")?);
    out.extend_from_slice(&f.permutation_share.entries);
    out.extend_from_slice(&count.to_be_bytes());
    out.extend_from_slice(&f.shares);
    Ok(out)
}

pub fn decode_fragment(bytes: &[u8]) -> Result<Fragment> {
    let mut r = Reader::new(bytes);
    r.magic(FRAGMENT_MAGIC)?;
    let k = r.u16()? as usize;
    let c = r.u8()? as usize;
    let j = r.u16()? as usize;
    let block_size = r.u16()? as usize;
    let payload_length = r.u64()?;
    let share_r = r.u8()? as usize;
    let share_z = r.u8()? as usize;
    let params = CodecParams::new(k, c, block_size)
        .map_err(|e| Error::Format(format!("header parameters: {e}")))?;
    if j >= k {
        return Err(Error::Format(format!(
            "fragment index {j} not below k = {k}"
        )));
    }
    let entries = r.take(block_size)?.to_vec();
    let count = r.u32()? as usize;
    let len = count
        .checked_mul(block_size)
        .ok_or_else(|| Error::Format("share count overflow".into()))?;
    let shares = r.take(len)?.to_vec();
    r.finish()?;
    Ok(Fragment {
        j,
        params,
        payload_length,
        permutation_share: PermutationShare {
            r: share_r,
            z: share_z,
            entries,
        },
        shares,
    })
}

/// Any fragment file this crate writes, identified by its magic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragmentFile {
    Codec(Fragment),
    Baseline(BaselineFragment),
    Parity(ParityFragment),
}

impl FragmentFile {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        match bytes.get(..4) {
            Some(m) if m == FRAGMENT_MAGIC => decode_fragment(bytes).map(Self::Codec),
            Some(m) if m == crate::erasure::PARITY_MAGIC => {
                ParityFragment::decode(bytes).map(Self::Parity)
            }
            Some(_) => BaselineFragment::decode(bytes).map(Self::Baseline),
            None => Err(Error::Format("file shorter than its magic".into())),
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        match self {
            Self::Codec(f) => encode_fragment(f),
            Self::Baseline(f) => f.encode(),
            Self::Parity(f) => f.encode(),
        }
    }
}
