//! Shamir secret sharing over GF(2^8), one polynomial per secret byte.

use rand::{CryptoRng, RngCore};

use super::{check_batch, BaselineFragment, FragmentationScheme, SchemeId};
use crate::error::{Error, Result};
use crate::gf256;

/// Secret bytes processed per batch of random coefficients.
const CHUNK: usize = 64 * 1024;

/// The point `(x, y)` of every per-byte polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SssShare {
    pub x: u8,
    pub y: Vec<u8>,
}

/// Shares of `secret` at `x = 1..=n`; any `k` of them recover it.
pub fn sss_split<R: RngCore + CryptoRng + ?Sized>(
    secret: &[u8],
    k: usize,
    n: usize,
    rng: &mut R,
) -> Result<Vec<SssShare>> {
    if n > 255 {
        return Err(Error::param(
            "field exhausted: SSS supports at most 255 shares",
        ));
    }
    if k == 0 || k > n {
        return Err(Error::param(format!(
            "SSS needs 1 <= k <= n, got k={k} n={n}"
        )));
    }
    let mut shares: Vec<SssShare> = (1..=n as u8)
        .map(|x| SssShare {
            x,
            y: Vec::with_capacity(secret.len()),
        })
        .collect();
    // coeffs[t] holds the degree t+1 coefficient for every byte of the chunk
    let mut coeffs = vec![vec![0u8; CHUNK]; k - 1];
    let mut acc = vec![0u8; CHUNK];
    for chunk in secret.chunks(CHUNK) {
        let len = chunk.len();
        for c in &mut coeffs {
            rng.fill_bytes(&mut c[..len]);
        }
        for share in &mut shares {
            let row = gf256::mul_row(share.x);
            let acc = &mut acc[..len];
            match coeffs.split_last() {
                None => acc.copy_from_slice(chunk),
                Some((top, rest)) => {
                    acc.copy_from_slice(&top[..len]);
                    for c in rest
                        .iter()
                        .rev()
                        .map(|c| &c[..len])
                        .chain(std::iter::once(chunk))
                    {
                        for (a, &b) in acc.iter_mut().zip(c) {
                            *a = row[*a as usize] ^ b;
                        }
                    }
                }
            }
            share.y.extend_from_slice(acc);
        }
    }
    Ok(shares)
}

/// Lagrange basis values at zero for the given x-coordinates.
fn lagrange_at_zero(xs: &[u8]) -> Result<Vec<u8>> {
    xs.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let mut num = 1u8;
            let mut den = 1u8;
            for (j, &xj) in xs.iter().enumerate() {
                if i != j {
                    num = gf256::mul(num, xj);
                    den = gf256::mul(den, xj ^ xi);
                }
            }
            gf256::div(num, den)
        })
        .collect()
}

/// Interpolates every byte position at zero from the first `k` shares.
pub fn sss_reconstruct(shares: &[SssShare], k: usize) -> Result<Vec<u8>> {
    if shares.len() < k || k == 0 {
        return Err(Error::threshold(k, shares.len(), vec![]));
    }
    let used = &shares[..k];
    let xs: Vec<u8> = used.iter().map(|s| s.x).collect();
    if xs.contains(&0) {
        return Err(Error::param("x = 0 is reserved for the secret"));
    }
    let len = used[0].y.len();
    if used.iter().any(|s| s.y.len() != len) {
        return Err(Error::param("shares differ in length"));
    }
    let basis = {
        let mut sorted = xs.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("duplicate x-coordinate"));
        }
        lagrange_at_zero(&xs)?
    };
    let mut out = vec![0u8; len];
    for (s, &l) in used.iter().zip(&basis) {
        gf256::mul_add_slice(&mut out, &s.y, l);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct Sss {
    pub k: usize,
    pub n: usize,
}

impl FragmentationScheme for Sss {
    type Fragment = BaselineFragment;

    fn id(&self) -> SchemeId {
        SchemeId::Sss
    }

    fn threshold(&self) -> usize {
        self.k
    }

    fn split<R: RngCore + CryptoRng>(
        &self,
        data: &[u8],
        rng: &mut R,
    ) -> Result<Vec<BaselineFragment>> {
        Ok(sss_split(data, self.k, self.n, rng)?
            .into_iter()
            .map(|s| BaselineFragment {
                scheme: SchemeId::Sss,
                k: self.k,
                n: self.n,
                index: s.x as usize - 1,
                payload_length: data.len() as u64,
                trailer: vec![s.x],
                data: s.y,
            })
            .collect())
    }

    fn reconstruct(&self, fragments: Vec<BaselineFragment>) -> Result<Vec<u8>> {
        let (k, _, _) = check_batch(&fragments, SchemeId::Sss)?;
        let shares = fragments
            .into_iter()
            .map(|f| match f.trailer.as_slice() {
                [x] => Ok(SssShare { x: *x, y: f.data }),
                _ => Err(Error::Format("SSS trailer must be one x-coordinate".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        sss_reconstruct(&shares, k)
    }
}
