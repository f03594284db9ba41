//! Secret permutation arrays and their XOR shares.
//!
//! A permutation array is a bijection on the `#b` positions of a share. Arrays
//! are drawn with Fisher-Yates from a cryptographically strong source and
//! split into `c` additive (XOR) shares; any `c - 1` of those shares are
//! uniformly random and say nothing about the array.

use rand::{CryptoRng, RngCore};

use crate::error::{Error, Result};

/// Largest number of positions a one-byte entry can address.
pub const MAX_POSITIONS: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationArray {
    entries: Vec<u8>,
    inverse: Vec<u8>,
}

impl PermutationArray {
    /// Wraps `entries`, rejecting anything that is not a bijection on
    /// `0..entries.len()`.
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        let n = entries.len();
        if !(1..=MAX_POSITIONS).contains(&n) {
            return Err(Error::param(format!(
                "permutation length {n} outside 1..={MAX_POSITIONS}"
            )));
        }
        let inverse = invert(&entries)
            .ok_or_else(|| Error::Integrity("corrupted permutation shares".into()))?;
        Ok(Self { entries, inverse })
    }

    pub fn identity(len: usize) -> Result<Self> {
        Self::new((0..len).map(|v| v as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    /// Inverse mapping: `inverse()[w] == v` iff `entries()[v] == w`.
    pub fn inverse(&self) -> &[u8] {
        &self.inverse
    }

    pub fn permute(&self, v: usize) -> Result<usize> {
        self.entries
            .get(v)
            .map(|&w| w as usize)
            .ok_or_else(|| Error::param(format!("position {v} out of range 0..{}", self.len())))
    }

    pub fn unpermute(&self, w: usize) -> Result<usize> {
        self.inverse
            .get(w)
            .map(|&v| v as usize)
            .ok_or_else(|| Error::param(format!("position {w} out of range 0..{}", self.len())))
    }
}

fn invert(entries: &[u8]) -> Option<Vec<u8>> {
    let n = entries.len();
    let mut inverse = vec![0u8; n];
    let mut seen = [false; MAX_POSITIONS];
    for (v, &w) in entries.iter().enumerate() {
        let w = w as usize;
        if w >= n || seen[w] {
            return None;
        }
        seen[w] = true;
        inverse[w] = v as u8;
    }
    Some(inverse)
}

/// One XOR share of permutation array `r`, held by the fragment `r * c + z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationShare {
    pub r: usize,
    pub z: usize,
    pub entries: Vec<u8>,
}

impl PermutationShare {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Uniform draw from `0..bound` by rejection sampling on 32-bit words.
fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, bound: u32) -> u32 {
    debug_assert!(bound > 0);
    // largest multiple of `bound` that fits in u32 space
    let zone = u32::MAX - (u32::MAX - bound + 1) % bound;
    loop {
        let v = rng.next_u32();
        if v <= zone {
            return v % bound;
        }
    }
}

/// Fisher-Yates shuffle of `0..len`.
pub fn random_permutation<R: RngCore + CryptoRng + ?Sized>(
    len: usize,
    rng: &mut R,
) -> Result<PermutationArray> {
    if !(1..=MAX_POSITIONS).contains(&len) {
        return Err(Error::param(format!(
            "permutation length {len} outside 1..={MAX_POSITIONS}"
        )));
    }
    let mut entries: Vec<u8> = (0..len).map(|v| v as u8).collect();
    for i in (1..len).rev() {
        let j = uniform_below(rng, i as u32 + 1) as usize;
        entries.swap(i, j);
    }
    PermutationArray::new(entries)
}

/// Draws the `k / c` permutation arrays of one fragmentation run.
pub fn generate_permutations<R: RngCore + CryptoRng + ?Sized>(
    k: usize,
    c: usize,
    num_positions: usize,
    rng: &mut R,
) -> Result<Vec<PermutationArray>> {
    if c < 2 {
        return Err(Error::param("c must be at least 2"));
    }
    if k == 0 || k % c != 0 {
        return Err(Error::param("k must be a multiple of c"));
    }
    if !(2..=MAX_POSITIONS).contains(&num_positions) {
        return Err(Error::param(format!(
            "block size {num_positions} outside 2..={MAX_POSITIONS}"
        )));
    }
    (0..k / c)
        .map(|_| random_permutation(num_positions, rng))
        .collect()
}

/// XOR-splits `pa` into `c` shares tagged with array index `r`.
pub fn split_permutation<R: RngCore + CryptoRng + ?Sized>(
    pa: &PermutationArray,
    r: usize,
    c: usize,
    rng: &mut R,
) -> Result<Vec<PermutationShare>> {
    if c < 2 {
        return Err(Error::param("c must be at least 2"));
    }
    let masks = (0..c - 1)
        .map(|_| {
            let mut m = vec![0u8; pa.len()];
            rng.fill_bytes(&mut m);
            m
        })
        .collect();
    split_permutation_with_masks(pa, r, masks)
}

/// Deterministic split: `masks` become shares `0..c-1` and the last share
/// is `pa` XOR all masks.
pub fn split_permutation_with_masks(
    pa: &PermutationArray,
    r: usize,
    masks: Vec<Vec<u8>>,
) -> Result<Vec<PermutationShare>> {
    if masks.is_empty() {
        return Err(Error::param("c must be at least 2"));
    }
    let mut last = pa.entries().to_vec();
    for m in &masks {
        if m.len() != pa.len() {
            return Err(Error::param("mask length differs from permutation length"));
        }
        last.iter_mut().zip(m).for_each(|(l, b)| *l ^= b);
    }
    let mut shares: Vec<PermutationShare> = masks
        .into_iter()
        .enumerate()
        .map(|(z, entries)| PermutationShare { r, z, entries })
        .collect();
    shares.push(PermutationShare {
        r,
        z: shares.len(),
        entries: last,
    });
    Ok(shares)
}

/// XORs the `c` shares of one array back together and checks that the
/// result is a bijection.
pub fn reconstruct_permutation(shares: &[&PermutationShare], c: usize) -> Result<PermutationArray> {
    if shares.len() != c || c < 2 {
        return Err(Error::param(format!(
            "expected {c} permutation shares, got {}",
            shares.len()
        )));
    }
    let first = shares[0];
    if shares
        .iter()
        .any(|s| s.len() != first.len() || s.r != first.r)
    {
        return Err(Error::param(
            "permutation shares disagree on length or array index",
        ));
    }
    let mut zs: Vec<usize> = shares.iter().map(|s| s.z).collect();
    zs.sort_unstable();
    if zs != (0..c).collect::<Vec<_>>() {
        return Err(Error::param("permutation share indices are not 0..c"));
    }
    let mut acc = vec![0u8; first.len()];
    for s in shares {
        acc.iter_mut().zip(&s.entries).for_each(|(a, b)| *a ^= b);
    }
    PermutationArray::new(acc).map_err(|_| Error::Integrity("corrupted permutation shares".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashMap;

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(7)
    }

    fn is_bijection(entries: &[u8]) -> bool {
        let mut sorted = entries.to_vec();
        sorted.sort_unstable();
        sorted.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    #[test]
    fn generates_k_over_c_bijections() {
        let pas = generate_permutations(4, 2, 34, &mut rng()).unwrap();
        assert_eq!(pas.len(), 2);
        assert!(pas
            .iter()
            .all(|p| p.len() == 34 && is_bijection(p.entries())));

        let pas = generate_permutations(2, 2, 2, &mut rng()).unwrap();
        assert_eq!(pas.len(), 1);
        assert!(pas[0].entries() == [0, 1] || pas[0].entries() == [1, 0]);

        let pas = generate_permutations(6, 3, 16, &mut rng()).unwrap();
        assert_eq!(pas.len(), 2);
        for p in &pas {
            let mut s = p.entries().to_vec();
            s.sort_unstable();
            assert_eq!(s, (0..16).collect::<Vec<u8>>());
        }
    }

    #[test]
    fn generate_rejects_bad_parameters() {
        assert!(matches!(
            generate_permutations(5, 2, 16, &mut rng()),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            generate_permutations(4, 2, 1, &mut rng()),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            generate_permutations(4, 2, 257, &mut rng()),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            generate_permutations(4, 1, 16, &mut rng()),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn split_with_known_mask() {
        let pa = PermutationArray::new(vec![1, 0]).unwrap();
        let shares = split_permutation_with_masks(&pa, 0, vec![vec![0xAA, 0xBB]]).unwrap();
        assert_eq!(shares[0].entries, vec![0xAA, 0xBB]);
        assert_eq!(shares[1].entries, vec![0xAB, 0xBB]);
        assert_eq!((shares[1].r, shares[1].z), (0, 1));
    }

    #[test]
    fn split_and_reconstruct() {
        let mut rng = rng();
        let pa = random_permutation(34, &mut rng).unwrap();
        let shares = split_permutation(&pa, 1, 3, &mut rng).unwrap();
        assert_eq!(shares.len(), 3);
        assert!(shares.iter().all(|s| s.len() == 34 && s.r == 1));
        let refs: Vec<_> = shares.iter().collect();
        assert_eq!(reconstruct_permutation(&refs, 3).unwrap(), pa);
    }

    #[test]
    fn reconstruct_detects_flipped_byte() {
        let mut rng = rng();
        let pa = random_permutation(16, &mut rng).unwrap();
        let mut shares = split_permutation(&pa, 0, 2, &mut rng).unwrap();
        shares[1].entries[3] ^= 0x01;
        let refs: Vec<_> = shares.iter().collect();
        let err = reconstruct_permutation(&refs, 2).unwrap_err();
        assert!(err.to_string().contains("corrupted permutation shares"));
    }

    #[test]
    fn reconstruct_rejects_missing_or_mismatched_shares() {
        let mut rng = rng();
        let pa = random_permutation(16, &mut rng).unwrap();
        let shares = split_permutation(&pa, 0, 3, &mut rng).unwrap();
        let two: Vec<_> = shares.iter().take(2).collect();
        assert!(matches!(
            reconstruct_permutation(&two, 3),
            Err(Error::Param(_))
        ));

        let mut other = shares.clone();
        other[2].r = 1;
        let refs: Vec<_> = other.iter().collect();
        assert!(matches!(
            reconstruct_permutation(&refs, 3),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn permute_and_unpermute() {
        let pa = PermutationArray::new(vec![2, 0, 1]).unwrap();
        assert_eq!(pa.permute(0).unwrap(), 2);
        assert!(pa.permute(3).is_err());
        assert!(pa.unpermute(3).is_err());
        let id = PermutationArray::identity(10).unwrap();
        for v in 0..10 {
            assert_eq!(id.permute(v).unwrap(), v);
        }
        let p = random_permutation(250, &mut rng()).unwrap();
        for v in 0..250 {
            assert_eq!(p.unpermute(p.permute(v).unwrap()).unwrap(), v);
        }
    }

    #[test]
    fn new_rejects_non_bijections() {
        assert!(PermutationArray::new(vec![0, 0]).is_err());
        assert!(PermutationArray::new(vec![0, 2]).is_err());
        assert!(PermutationArray::new(vec![]).is_err());
    }

    #[test]
    fn uniform_over_all_24_orders() {
        let mut rng = rng();
        let draws = 100_000;
        let mut counts: HashMap<Vec<u8>, usize> = HashMap::new();
        for _ in 0..draws {
            let p = random_permutation(4, &mut rng).unwrap();
            *counts.entry(p.entries().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 24);
        let p = 1.0 / 24.0;
        let mean = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (perm, n) in counts {
            assert!((n as f64 - mean).abs() <= 3.0 * sigma, "{perm:?}: {n}");
        }
    }

    #[test]
    fn single_share_marginal_is_uniform() {
        // fixed array, many splits: every byte of share 0 and share 1 should
        // be uniform on 0..=255
        let mut rng = rng();
        let pa = PermutationArray::new(vec![3, 1, 0, 2]).unwrap();
        let mut counts = [[0u64; 256]; 2];
        let splits = 25_000;
        for _ in 0..splits {
            let shares = split_permutation(&pa, 0, 2, &mut rng).unwrap();
            for (z, s) in shares.iter().enumerate() {
                for &b in &s.entries {
                    counts[z][b as usize] += 1;
                }
            }
        }
        for c in &counts {
            let expected = (splits * 4) as f64 / 256.0;
            let chi2: f64 = c
                .iter()
                .map(|&o| (o as f64 - expected).powi(2) / expected)
                .sum();
            assert!(chi2 <= 293.2478, "chi2 = {chi2}");
        }
    }
}
