//! AONT-RS: encrypt, mask the key with a digest of the ciphertext, cut the
//! package into `k` parts and add `n - k` systematic Reed-Solomon parts.

use std::sync::Arc;

use rand::{CryptoRng, RngCore};

use super::{check_batch, BaselineFragment, Cipher, Digest, FragmentationScheme, SchemeId};
use crate::erasure::{rs_decode, rs_encode, ParityParams};
use crate::error::{Error, Result};

fn mask_key(key: &mut [u8], ciphertext: &[u8], digest: &dyn Digest) -> Result<()> {
    let h = digest.digest(ciphertext);
    if h.len() < key.len() {
        return Err(Error::param(format!(
            "{} digest ({} bytes) shorter than the {}-byte key",
            digest.name(),
            h.len(),
            key.len()
        )));
    }
    key.iter_mut().zip(&h).for_each(|(k, h)| *k ^= h);
    Ok(())
}

/// Parts `0..k` carry `ciphertext || masked key` (zero padded); parts
/// `k..n` are parity with their coefficient row as trailer.
pub fn aont_rs_split<R: RngCore + CryptoRng + ?Sized>(
    d: &[u8],
    k: usize,
    n: usize,
    cipher: &dyn Cipher,
    digest: &dyn Digest,
    rng: &mut R,
) -> Result<Vec<BaselineFragment>> {
    let params = ParityParams::new(k, n)?;
    let key_len = cipher.key_len();
    let mut key = vec![0u8; key_len];
    rng.fill_bytes(&mut key);

    let part_len = (d.len() + key_len).div_ceil(k);
    let mut package = Vec::with_capacity(part_len * k);
    package.extend_from_slice(d);
    cipher.encrypt(&key, &mut package);
    mask_key(&mut key, &package, digest)?;
    package.extend_from_slice(&key);
    package.resize(part_len * k, 0);

    let parts: Vec<&[u8]> = package.chunks_exact(part_len).collect();
    let parity = rs_encode(&parts, &params)?;
    let make = |index: usize, trailer: Vec<u8>, data: Vec<u8>| BaselineFragment {
        scheme: SchemeId::AontRs,
        k,
        n,
        index,
        payload_length: d.len() as u64,
        trailer,
        data,
    };
    let mut out: Vec<BaselineFragment> = parts
        .iter()
        .enumerate()
        .map(|(i, p)| make(i, Vec::new(), p.to_vec()))
        .collect();
    out.extend(
        parity
            .into_iter()
            .enumerate()
            .map(|(p, data)| make(k + p, params.parity_row(p).to_vec(), data)),
    );
    Ok(out)
}

pub fn aont_rs_reconstruct(
    fragments: Vec<BaselineFragment>,
    cipher: &dyn Cipher,
    digest: &dyn Digest,
) -> Result<Vec<u8>> {
    let (k, n, len) = check_batch(&fragments, SchemeId::AontRs)?;
    let params = ParityParams::new(k, n)?;
    let available: Vec<(usize, &[u8])> = fragments
        .iter()
        .map(|f| (f.index, f.data.as_slice()))
        .collect();
    let parts = rs_decode(&available, &params)?;
    let package = parts.concat();
    let len = len as usize;
    let key_len = cipher.key_len();
    if package.len() < len + key_len {
        return Err(Error::Format(
            "AONT-RS package shorter than payload and key".into(),
        ));
    }
    let mut ciphertext = package[..len].to_vec();
    let mut key = package[len..len + key_len].to_vec();
    mask_key(&mut key, &ciphertext, digest)?;
    cipher.decrypt(&key, &mut ciphertext);
    Ok(ciphertext)
}

#[derive(Clone)]
pub struct AontRs {
    pub k: usize,
    pub n: usize,
    pub cipher: Arc<dyn Cipher>,
    pub digest: Arc<dyn Digest>,
}

impl FragmentationScheme for AontRs {
    type Fragment = BaselineFragment;

    fn id(&self) -> SchemeId {
        SchemeId::AontRs
    }

    fn threshold(&self) -> usize {
        self.k
    }

    fn split<R: RngCore + CryptoRng>(
        &self,
        data: &[u8],
        rng: &mut R,
    ) -> Result<Vec<BaselineFragment>> {
        aont_rs_split(
            data,
            self.k,
            self.n,
            self.cipher.as_ref(),
            self.digest.as_ref(),
            rng,
        )
    }

    fn reconstruct(&self, fragments: Vec<BaselineFragment>) -> Result<Vec<u8>> {
        aont_rs_reconstruct(fragments, self.cipher.as_ref(), self.digest.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{Aes128Ctr, Sha256Digest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn scheme(k: usize, n: usize) -> AontRs {
        AontRs {
            k,
            n,
            cipher: Arc::new(Aes128Ctr),
            digest: Arc::new(Sha256Digest),
        }
    }

    #[test]
    fn round_trip_from_primaries_and_with_losses() {
        let s = scheme(3, 5);
        let data = b"all or nothing ".repeat(77);
        let frags = s.split(&data, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
        assert_eq!(frags.len(), 5);
        assert_eq!(s.reconstruct(frags[..3].to_vec()).unwrap(), data);
        assert_eq!(s.reconstruct(frags[2..].to_vec()).unwrap(), data);
        assert!(matches!(
            s.reconstruct(frags[3..].to_vec()),
            Err(Error::Threshold { .. })
        ));
    }

    #[test]
    fn storage_before_parity() {
        let s = scheme(4, 4);
        let data = vec![1u8; 1000];
        let frags = s.split(&data, &mut ChaCha20Rng::seed_from_u64(2)).unwrap();
        let total: usize = frags.iter().map(|f| f.data.len()).sum();
        assert_eq!(total, (1000 + 16usize).div_ceil(4) * 4);
        assert_eq!(total - 1000 - 16, 0);
    }

    #[test]
    fn flipped_ciphertext_bit_destroys_everything() {
        let s = scheme(2, 2);
        let data = b"sensitive record 0042; ".repeat(50);
        let mut frags = s.split(&data, &mut ChaCha20Rng::seed_from_u64(3)).unwrap();
        frags[0].data[10] ^= 0x01;
        let out = s.reconstruct(frags).unwrap();
        assert_eq!(out.len(), data.len());
        // wrong key: nearly every byte differs, not only the flipped one
        let same = out.iter().zip(&data).filter(|(a, b)| a == b).count();
        assert!(same < data.len() / 50, "{same} bytes survived");
    }

    #[test]
    fn short_digest_rejected() {
        struct Tiny;
        impl Digest for Tiny {
            fn name(&self) -> &'static str {
                "tiny"
            }
            fn digest(&self, _: &[u8]) -> Vec<u8> {
                vec![0; 4]
            }
        }
        let r = aont_rs_split(
            b"abc",
            2,
            2,
            &Aes128Ctr,
            &Tiny,
            &mut ChaCha20Rng::seed_from_u64(4),
        );
        assert!(matches!(r, Err(Error::Param(_))));
    }
}
