//! Secret sharing made short: encrypt, disperse the ciphertext with IDA and
//! Shamir-share the key inside the same fragments.

use std::sync::Arc;

use rand::{CryptoRng, RngCore};

use super::ida::{ida_reconstruct, ida_split, IdaMatrix, IdaShare};
use super::sss::{sss_reconstruct, sss_split, SssShare};
use super::{check_batch, BaselineFragment, Cipher, FragmentationScheme, SchemeId};
use crate::error::{Error, Result};

/// Trailer: `generator row (k) | key x (1) | key share (key_len)`.
pub fn ssms_split<R: RngCore + CryptoRng + ?Sized>(
    d: &[u8],
    matrix: &IdaMatrix,
    cipher: &dyn Cipher,
    rng: &mut R,
) -> Result<Vec<BaselineFragment>> {
    let (k, n) = (matrix.k(), matrix.n());
    let mut key = vec![0u8; cipher.key_len()];
    rng.fill_bytes(&mut key);
    let mut ciphertext = d.to_vec();
    cipher.encrypt(&key, &mut ciphertext);
    let data_shares = ida_split(&ciphertext, matrix);
    let key_shares = sss_split(&key, k, n, rng)?;
    Ok(data_shares
        .into_iter()
        .zip(key_shares)
        .map(|(ds, ks)| {
            let mut trailer = ds.row;
            trailer.push(ks.x);
            trailer.extend_from_slice(&ks.y);
            BaselineFragment {
                scheme: SchemeId::Ssms,
                k,
                n,
                index: ds.index,
                payload_length: d.len() as u64,
                trailer,
                data: ds.data,
            }
        })
        .collect())
}

pub fn ssms_reconstruct(fragments: Vec<BaselineFragment>, cipher: &dyn Cipher) -> Result<Vec<u8>> {
    let (k, _, len) = check_batch(&fragments, SchemeId::Ssms)?;
    let key_len = cipher.key_len();
    let mut data_shares = Vec::with_capacity(fragments.len());
    let mut key_shares = Vec::with_capacity(fragments.len());
    for f in fragments {
        if f.trailer.len() != k + 1 + key_len {
            return Err(Error::Format(format!(
                "SSMS trailer of {} bytes, expected {}",
                f.trailer.len(),
                k + 1 + key_len
            )));
        }
        key_shares.push(SssShare {
            x: f.trailer[k],
            y: f.trailer[k + 1..].to_vec(),
        });
        data_shares.push(IdaShare {
            index: f.index,
            row: f.trailer[..k].to_vec(),
            data: f.data,
        });
    }
    let key = sss_reconstruct(&key_shares, k)?;
    let mut plain = ida_reconstruct(&data_shares, k)?;
    plain.truncate(len as usize);
    cipher.decrypt(&key, &mut plain);
    Ok(plain)
}

#[derive(Clone)]
pub struct Ssms {
    pub matrix: IdaMatrix,
    pub cipher: Arc<dyn Cipher>,
}

impl Ssms {
    pub fn new(k: usize, n: usize, cipher: Arc<dyn Cipher>) -> Result<Self> {
        Ok(Self {
            matrix: IdaMatrix::vandermonde(k, n)?,
            cipher,
        })
    }
}

impl FragmentationScheme for Ssms {
    type Fragment = BaselineFragment;

    fn id(&self) -> SchemeId {
        SchemeId::Ssms
    }

    fn threshold(&self) -> usize {
        self.matrix.k()
    }

    fn split<R: RngCore + CryptoRng>(
        &self,
        data: &[u8],
        rng: &mut R,
    ) -> Result<Vec<BaselineFragment>> {
        ssms_split(data, &self.matrix, self.cipher.as_ref(), rng)
    }

    fn reconstruct(&self, fragments: Vec<BaselineFragment>) -> Result<Vec<u8>> {
        ssms_reconstruct(fragments, self.cipher.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{Aes128Ctr, NullCipher};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn any_k_of_n_round_trip() {
        let s = Ssms::new(3, 5, Arc::new(Aes128Ctr)).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let data: Vec<u8> = b"secret sharing made short ".repeat(100);
        let frags = s.split(&data, &mut rng).unwrap();
        assert_eq!(
            s.reconstruct(vec![frags[4].clone(), frags[0].clone(), frags[2].clone()])
                .unwrap(),
            data
        );
        assert!(matches!(
            s.reconstruct(frags[..2].to_vec()),
            Err(Error::Threshold { .. })
        ));
    }

    #[test]
    fn fragment_size_matches_overhead_formula() {
        let (k, n) = (4, 6);
        let s = Ssms::new(k, n, Arc::new(Aes128Ctr)).unwrap();
        let data = vec![0u8; 4000];
        let frags = s.split(&data, &mut ChaCha20Rng::seed_from_u64(2)).unwrap();
        for f in &frags {
            // |d|/k data + |key| key share + x-coordinate + matrix row
            assert_eq!(f.data.len() + f.trailer.len(), 4000 / k + 16 + 1 + k);
        }
    }

    #[test]
    fn null_cipher_is_plain_ida_plus_key_shares() {
        let matrix = IdaMatrix::vandermonde(2, 3).unwrap();
        let data: Vec<u8> = (0..99).collect();
        let frags = ssms_split(
            &data,
            &matrix,
            &NullCipher,
            &mut ChaCha20Rng::seed_from_u64(3),
        )
        .unwrap();
        let plain = ida_split(&data, &matrix);
        for (f, p) in frags.iter().zip(&plain) {
            assert_eq!(f.data, p.data);
            assert_eq!(&f.trailer[..2], p.row.as_slice());
        }
        let key_shares: Vec<SssShare> = frags
            .iter()
            .map(|f| SssShare {
                x: f.trailer[2],
                y: f.trailer[3..].to_vec(),
            })
            .collect();
        assert_eq!(sss_reconstruct(&key_shares[1..], 2).unwrap().len(), 16);
    }
}
