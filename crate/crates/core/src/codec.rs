//! The keyless fragmentation codec.
//!
//! Data is cut into blocks of `block_size` bytes and dealt round-robin to `k`
//! fragments. Each fragment starts with one permutation share (slot 0); every
//! later block `i` of fragment `j` is encoded byte by byte as a polynomial
//! evaluated at `x = pick_x(i)`, whose constant term is the data byte and
//! whose other coefficients are the bytes at the same position of the row
//! `i - 1` shares of fragments `j+1, .., j+c-1` (mod `k`). The encoded byte
//! lands at position `pa(v)` of the output share, where `pa` is the
//! permutation array `j mod (k/c)`.
//!
//! Decoding needs every fragment. Once the permutation arrays are rebuilt,
//! each share depends only on stored neighbor shares, so rows decode in
//! parallel.

use rand::{CryptoRng, RngCore};
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::gf256;
use crate::permutation::{
    self, generate_permutations, split_permutation, PermutationArray, PermutationShare,
};

/// Parameters shared by every fragment of one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodecParams {
    pub k: usize,
    pub c: usize,
    pub block_size: usize,
}

impl CodecParams {
    pub fn new(k: usize, c: usize, block_size: usize) -> Result<Self> {
        let p = Self { k, c, block_size };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { k, c, block_size } = *self;
        if c < 2 {
            return Err(Error::param("c must be at least 2"));
        }
        if c > u8::MAX as usize {
            return Err(Error::param("c must be at most 255"));
        }
        if k < c || k % c != 0 {
            return Err(Error::param("k must be a multiple of c"));
        }
        if k > u16::MAX as usize {
            return Err(Error::param("k must fit in 16 bits"));
        }
        if k / c > 256 {
            return Err(Error::param("k / c must be at most 256"));
        }
        if !(2..=permutation::MAX_POSITIONS).contains(&block_size) {
            return Err(Error::param(format!(
                "block size must be in 2..=256, got {block_size}"
            )));
        }
        Ok(())
    }

    /// Number of permutation arrays, `k / c`.
    pub fn arrays(&self) -> usize {
        self.k / self.c
    }

    /// Bytes consumed per row of shares.
    pub fn row_bytes(&self) -> usize {
        self.k * self.block_size
    }

    /// Data shares per fragment for a payload of `len` bytes.
    pub fn rows_for(&self, len: usize) -> usize {
        len.div_ceil(self.row_bytes())
    }

    /// Payload length after zero padding.
    pub fn padded_len(&self, len: usize) -> usize {
        self.rows_for(len) * self.row_bytes()
    }

    /// Fragments whose row `i - 1` shares feed fragment `j`, in coefficient
    /// order `a_0, a_1, ..`.
    pub fn parents_of(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (1..self.c).map(move |t| (j + t) % self.k)
    }

    /// Index of the permutation array applied to fragment `j`.
    pub fn array_for(&self, j: usize) -> usize {
        j % self.arrays()
    }
}

/// One of the `k` outputs of [`encode_data`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    pub j: usize,
    pub params: CodecParams,
    pub payload_length: u64,
    pub permutation_share: PermutationShare,
    /// Data shares `1..=#f`, concatenated.
    pub shares: Vec<u8>,
}

impl Fragment {
    pub fn share_count(&self) -> usize {
        self.shares.len() / self.params.block_size
    }

    /// Share `i` of this fragment; slot 0 is the permutation share.
    pub fn share(&self, i: usize) -> Option<&[u8]> {
        if i == 0 {
            return Some(&self.permutation_share.entries);
        }
        let b = self.params.block_size;
        self.shares.get((i - 1) * b..i * b)
    }

    /// Encoded payload bytes, without the permutation share.
    pub fn data_bytes(&self) -> &[u8] {
        &self.shares
    }
}

/// The complete output of one fragmentation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentSet {
    fragments: Vec<Fragment>,
}

impl FragmentSet {
    /// Orders and checks a collection of fragments. Every index `0..k` must
    /// be present exactly once and all fragments must agree on parameters.
    pub fn new(mut fragments: Vec<Fragment>) -> Result<Self> {
        let first = fragments
            .first()
            .ok_or_else(|| Error::threshold(0, 0, vec![]))?;
        let params = first.params;
        let payload_length = first.payload_length;
        let share_count = first.share_count();
        params.validate()?;
        for f in &fragments {
            if f.params != params {
                return Err(Error::param(format!(
                    "fragment {} has parameters {:?}, expected {:?}",
                    f.j, f.params, params
                )));
            }
            if f.payload_length != payload_length {
                return Err(Error::param(format!(
                    "fragment {} disagrees on payload length",
                    f.j
                )));
            }
            if f.share_count() != share_count || f.shares.len() % params.block_size != 0 {
                return Err(Error::param(format!(
                    "fragment {} has {} bytes of shares, expected {}",
                    f.j,
                    f.shares.len(),
                    share_count * params.block_size
                )));
            }
            if f.j >= params.k {
                return Err(Error::param(format!("fragment index {} out of range", f.j)));
            }
        }
        fragments.sort_by_key(|f| f.j);
        if fragments.windows(2).any(|w| w[0].j == w[1].j) {
            return Err(Error::param("duplicate fragment index"));
        }
        if fragments.len() < params.k {
            let present: Vec<usize> = fragments.iter().map(|f| f.j).collect();
            let missing = (0..params.k).filter(|j| !present.contains(j)).collect();
            return Err(Error::threshold(params.k, fragments.len(), missing));
        }
        let expected_rows = params.rows_for(payload_length as usize);
        if share_count != expected_rows {
            return Err(Error::param(format!(
                "fragments carry {share_count} shares, payload length implies {expected_rows}"
            )));
        }
        Ok(Self { fragments })
    }

    pub fn params(&self) -> CodecParams {
        self.fragments[0].params
    }

    pub fn payload_length(&self) -> u64 {
        self.fragments[0].payload_length
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn into_fragments(self) -> Vec<Fragment> {
        self.fragments
    }

    pub fn rows(&self) -> usize {
        self.fragments[0].share_count()
    }
}

/// Evaluation point for share row `i`, always in `2..=255`.
pub fn pick_x(i: usize) -> u8 {
    (2 + i % 254) as u8
}

/// Deals zero-padded blocks round-robin: block `i` goes to fragment `i mod k`.
pub fn form_fragments(d: &[u8], params: &CodecParams) -> Result<Vec<Vec<u8>>> {
    params.validate()?;
    if d.is_empty() {
        return Err(Error::EmptyInput);
    }
    let b = params.block_size;
    let rows = params.rows_for(d.len());
    let mut out = vec![Vec::with_capacity(rows * b); params.k];
    for (i, chunk) in d.chunks(b).enumerate() {
        out[i % params.k].extend_from_slice(chunk);
    }
    for f in &mut out {
        f.resize(rows * b, 0);
    }
    Ok(out)
}

#[inline]
fn poly(row: &[u8; 256], constant: u8, parents_high_first: impl Iterator<Item = u8>) -> u8 {
    let acc = parents_high_first.fold(0u8, |acc, p| row[acc as usize] ^ p);
    row[acc as usize] ^ constant
}

/// `mb + x a_0 + x^2 a_1 + .. + x^(c-1) a_(c-2)` over GF(2^8).
pub fn encode_mini_block(mb: u8, parent_ms: &[u8], x: u8) -> Result<u8> {
    if parent_ms.is_empty() {
        return Err(Error::param("at least one parent mini-share is required"));
    }
    let mut coeffs = Vec::with_capacity(parent_ms.len() + 1);
    coeffs.push(mb);
    coeffs.extend_from_slice(parent_ms);
    gf256::horner_eval(&coeffs, x)
}

/// Inverse of [`encode_mini_block`]; in characteristic 2 it is the same sum.
pub fn decode_mini_block(ms: u8, parent_ms: &[u8], x: u8) -> Result<u8> {
    encode_mini_block(ms, parent_ms, x)
}

fn check_block_inputs(block: &[u8], parents: &[&[u8]], pa: &PermutationArray) -> Result<()> {
    if parents.is_empty() {
        return Err(Error::param("at least one parent share is required"));
    }
    let n = pa.len();
    if block.len() != n || parents.iter().any(|p| p.len() != n) {
        return Err(Error::param(
            "block, parent shares and permutation differ in length",
        ));
    }
    Ok(())
}

/// Encodes one block into one share.
pub fn encode_block(
    block: &[u8],
    parent_shares: &[&[u8]],
    pa: &PermutationArray,
    x: u8,
) -> Result<Vec<u8>> {
    check_block_inputs(block, parent_shares, pa)?;
    let mut out = vec![0u8; block.len()];
    encode_block_into(&mut out, block, parent_shares, pa.entries(), x);
    Ok(out)
}

/// Decodes one share back into its block.
pub fn decode_block(
    share: &[u8],
    parent_shares: &[&[u8]],
    pa: &PermutationArray,
    x: u8,
) -> Result<Vec<u8>> {
    check_block_inputs(share, parent_shares, pa)?;
    let mut out = vec![0u8; share.len()];
    decode_block_into(&mut out, share, parent_shares, pa.entries(), x);
    Ok(out)
}

#[inline]
fn encode_block_into(out: &mut [u8], block: &[u8], parents: &[&[u8]], pa: &[u8], x: u8) {
    let row = gf256::mul_row(x);
    match parents {
        [a0] => {
            for ((&mb, &p0), &w) in block.iter().zip(a0.iter()).zip(pa) {
                out[w as usize] = mb ^ row[p0 as usize];
            }
        }
        [a0, a1] => {
            for (v, (&mb, &w)) in block.iter().zip(pa).enumerate() {
                let acc = row[a1[v] as usize] ^ a0[v];
                out[w as usize] = mb ^ row[acc as usize];
            }
        }
        _ => {
            for (v, (&mb, &w)) in block.iter().zip(pa).enumerate() {
                out[w as usize] = poly(row, mb, parents.iter().rev().map(|p| p[v]));
            }
        }
    }
}

#[inline]
fn decode_block_into(out: &mut [u8], share: &[u8], parents: &[&[u8]], pa: &[u8], x: u8) {
    let row = gf256::mul_row(x);
    match parents {
        [a0] => {
            for (v, (o, &w)) in out.iter_mut().zip(pa).enumerate() {
                *o = share[w as usize] ^ row[a0[v] as usize];
            }
        }
        [a0, a1] => {
            for (v, (o, &w)) in out.iter_mut().zip(pa).enumerate() {
                let acc = row[a1[v] as usize] ^ a0[v];
                *o = share[w as usize] ^ row[acc as usize];
            }
        }
        _ => {
            for (v, (o, &w)) in out.iter_mut().zip(pa).enumerate() {
                *o = poly(row, share[w as usize], parents.iter().rev().map(|p| p[v]));
            }
        }
    }
}

/// Secret material for one run: the permutation arrays and the shares
/// placed in slot 0 of each fragment (`shares[j]` belongs to fragment `j`).
#[derive(Clone, Debug)]
pub struct EncodingMaterial {
    pub arrays: Vec<PermutationArray>,
    pub shares: Vec<PermutationShare>,
}

impl EncodingMaterial {
    /// Fresh arrays, XOR-split so that share `z` of array `r` sits in
    /// fragment `r * c + z`.
    pub fn generate<R: RngCore + CryptoRng + ?Sized>(
        params: &CodecParams,
        rng: &mut R,
    ) -> Result<Self> {
        params.validate()?;
        let arrays = generate_permutations(params.k, params.c, params.block_size, rng)?;
        let mut shares = Vec::with_capacity(params.k);
        for (r, pa) in arrays.iter().enumerate() {
            shares.extend(split_permutation(pa, r, params.c, rng)?);
        }
        Ok(Self { arrays, shares })
    }

    fn check(&self, params: &CodecParams) -> Result<()> {
        let b = params.block_size;
        if self.arrays.len() != params.arrays() || self.arrays.iter().any(|a| a.len() != b) {
            return Err(Error::param("permutation arrays do not match parameters"));
        }
        if self.shares.len() != params.k || self.shares.iter().any(|s| s.len() != b) {
            return Err(Error::param("permutation shares do not match parameters"));
        }
        Ok(())
    }
}

/// Fragments `d` with fresh permutations drawn from `rng`.
pub fn encode_data<R: RngCore + CryptoRng + ?Sized>(
    d: &[u8],
    params: &CodecParams,
    rng: &mut R,
) -> Result<FragmentSet> {
    let material = EncodingMaterial::generate(params, rng)?;
    encode_with_material(d, params, &material)
}

pub fn encode_with_material(
    d: &[u8],
    params: &CodecParams,
    material: &EncodingMaterial,
) -> Result<FragmentSet> {
    encode_observed(d, params, material, |_, _, _| {})
}

/// Like [`encode_with_material`], calling `observer(j, i, parents)` before
/// share `i` of fragment `j` is encoded.
pub fn encode_observed<F>(
    d: &[u8],
    params: &CodecParams,
    material: &EncodingMaterial,
    mut observer: F,
) -> Result<FragmentSet>
where
    F: FnMut(usize, usize, &[usize]),
{
    params.validate()?;
    material.check(params)?;
    if d.is_empty() {
        return Err(Error::EmptyInput);
    }
    let CodecParams {
        k,
        c,
        block_size: b,
    } = *params;
    let rows = params.rows_for(d.len());
    let row_bytes = params.row_bytes();

    let mut outputs: Vec<Vec<u8>> = (0..k).map(|_| Vec::with_capacity(rows * b)).collect();
    let mut prev = vec![0u8; row_bytes];
    for (j, s) in material.shares.iter().enumerate() {
        prev[j * b..(j + 1) * b].copy_from_slice(&s.entries);
    }
    let mut cur = vec![0u8; row_bytes];
    let mut padded_tail = Vec::new();
    let mut parent_ids = Vec::with_capacity(c - 1);

    for i in 1..=rows {
        let start = (i - 1) * row_bytes;
        let row_data: &[u8] = if start + row_bytes <= d.len() {
            &d[start..start + row_bytes]
        } else {
            padded_tail.clear();
            padded_tail.extend_from_slice(&d[start..]);
            padded_tail.resize(row_bytes, 0);
            &padded_tail
        };
        let x = pick_x(i);
        for (j, out) in cur.chunks_exact_mut(b).enumerate() {
            parent_ids.clear();
            parent_ids.extend(params.parents_of(j));
            observer(j, i, &parent_ids);
            let parent_refs: SmallVec<[&[u8]; 4]> = parent_ids
                .iter()
                .map(|&p| &prev[p * b..(p + 1) * b])
                .collect();
            let pa = material.arrays[params.array_for(j)].entries();
            encode_block_into(out, &row_data[j * b..(j + 1) * b], &parent_refs, pa, x);
        }
        for (j, out) in outputs.iter_mut().enumerate() {
            out.extend_from_slice(&cur[j * b..(j + 1) * b]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }

    let fragments = outputs
        .into_iter()
        .enumerate()
        .map(|(j, shares)| Fragment {
            j,
            params: *params,
            payload_length: d.len() as u64,
            permutation_share: material.shares[j].clone(),
            shares,
        })
        .collect();
    FragmentSet::new(fragments)
}

/// Rebuilds the `k / c` permutation arrays from the fragments' slot-0 shares.
pub fn recover_permutations(fs: &FragmentSet) -> Result<Vec<PermutationArray>> {
    let params = fs.params();
    let frags = fs.fragments();
    (0..params.arrays())
        .map(|r| {
            let group: Vec<&PermutationShare> = frags[r * params.c..(r + 1) * params.c]
                .iter()
                .map(|f| &f.permutation_share)
                .collect();
            for (z, s) in group.iter().enumerate() {
                if s.r != r || s.z != z {
                    return Err(Error::Integrity(format!(
                        "fragment {} carries permutation share ({}, {}), expected ({r}, {z})",
                        r * params.c + z,
                        s.r,
                        s.z
                    )));
                }
            }
            permutation::reconstruct_permutation(&group, params.c)
        })
        .collect()
}

/// Reassembles the original payload. Requires all `k` fragments.
pub fn decode_data(fs: &FragmentSet) -> Result<Vec<u8>> {
    decode_impl(fs, false)
}

/// [`decode_data`] with rows decoded on the rayon thread pool.
pub fn decode_data_parallel(fs: &FragmentSet) -> Result<Vec<u8>> {
    decode_impl(fs, true)
}

fn decode_impl(fs: &FragmentSet, parallel: bool) -> Result<Vec<u8>> {
    let params = fs.params();
    let arrays = recover_permutations(fs)?;
    let b = params.block_size;
    let rows = fs.rows();
    let mut out = vec![0u8; rows * params.row_bytes()];

    let decode_row = |(row_index, dst): (usize, &mut [u8])| {
        let i = row_index + 1;
        let x = pick_x(i);
        for (j, block) in dst.chunks_exact_mut(b).enumerate() {
            let parents: SmallVec<[&[u8]; 4]> = params
                .parents_of(j)
                .map(|p| fs.fragments[p].share(i - 1).expect("validated share count"))
                .collect();
            let share = fs.fragments[j].share(i).expect("validated share count");
            let pa = arrays[params.array_for(j)].entries();
            decode_block_into(block, share, &parents, pa, x);
        }
    };
    if parallel {
        out.par_chunks_mut(params.row_bytes())
            .enumerate()
            .for_each(decode_row);
    } else {
        out.chunks_mut(params.row_bytes())
            .enumerate()
            .for_each(decode_row);
    }
    out.truncate(fs.payload_length() as usize);
    Ok(out)
}
