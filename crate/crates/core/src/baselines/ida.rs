//! Rabin's information dispersal with a Vandermonde generator.

use rand::{CryptoRng, RngCore};

use super::{check_batch, BaselineFragment, FragmentationScheme, SchemeId};
use crate::error::{Error, Result};
use crate::gf256;
use crate::matrix::Matrix;

/// An `n x k` dispersal matrix in which every `k x k` row subset is
/// invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdaMatrix {
    matrix: Matrix,
}

impl IdaMatrix {
    /// Vandermonde rows on the points `1..=n`.
    pub fn vandermonde(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n || n > 255 {
            return Err(Error::param(format!(
                "IDA needs 1 <= k <= n <= 255, got k={k} n={n}"
            )));
        }
        let points: Vec<u8> = (1..=n as u8).collect();
        Ok(Self {
            matrix: Matrix::vandermonde(&points, k),
        })
    }

    pub fn from_matrix(matrix: Matrix) -> Result<Self> {
        if matrix.cols() == 0 || matrix.rows() < matrix.cols() {
            return Err(Error::param("IDA matrix must be n x k with n >= k >= 1"));
        }
        Ok(Self { matrix })
    }

    pub fn k(&self) -> usize {
        self.matrix.cols()
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn row(&self, t: usize) -> &[u8] {
        self.matrix.row(t)
    }
}

/// One dispersed row: the generator row travels with the data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdaShare {
    pub index: usize,
    pub row: Vec<u8>,
    pub data: Vec<u8>,
}

/// Disperses `d` (zero-padded to a multiple of `k`) into `n` shares of
/// `ceil(|d| / k)` bytes.
pub fn ida_split(d: &[u8], matrix: &IdaMatrix) -> Vec<IdaShare> {
    let k = matrix.k();
    let cols = d.len().div_ceil(k);
    let full = d.len() / k;
    let mut tail = vec![0u8; k];
    tail[..d.len() - full * k].copy_from_slice(&d[full * k..]);

    (0..matrix.n())
        .map(|t| {
            let row = matrix.row(t);
            let mut data = vec![0u8; cols];
            for (s, &coeff) in row.iter().enumerate() {
                let table = gf256::mul_row(coeff);
                for (o, column) in data.iter_mut().zip(d.chunks_exact(k)) {
                    *o ^= table[column[s] as usize];
                }
                if cols > full {
                    data[full] ^= table[tail[s] as usize];
                }
            }
            IdaShare {
                index: t,
                row: row.to_vec(),
                data,
            }
        })
        .collect()
}

/// Solves for the original (padded) data from the first `k` shares.
pub fn ida_reconstruct(shares: &[IdaShare], k: usize) -> Result<Vec<u8>> {
    if k == 0 || shares.len() < k {
        return Err(Error::threshold(k, shares.len(), vec![]));
    }
    let used = &shares[..k];
    let cols = used[0].data.len();
    if used
        .iter()
        .any(|s| s.row.len() != k || s.data.len() != cols)
    {
        return Err(Error::param("IDA shares disagree on dimensions"));
    }
    let rows: Vec<Vec<u8>> = used.iter().map(|s| s.row.clone()).collect();
    let inverse = Matrix::from_rows(&rows)?.invert()?;
    let mut out = vec![0u8; cols * k];
    for s in 0..k {
        for (t, share) in used.iter().enumerate() {
            let table = gf256::mul_row(inverse.get(s, t));
            for (column, &b) in out.chunks_exact_mut(k).zip(&share.data) {
                column[s] ^= table[b as usize];
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Ida {
    pub matrix: IdaMatrix,
}

impl Ida {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        Ok(Self {
            matrix: IdaMatrix::vandermonde(k, n)?,
        })
    }
}

impl FragmentationScheme for Ida {
    type Fragment = BaselineFragment;

    fn id(&self) -> SchemeId {
        SchemeId::Ida
    }

    fn threshold(&self) -> usize {
        self.matrix.k()
    }

    fn split<R: RngCore + CryptoRng>(
        &self,
        data: &[u8],
        _rng: &mut R,
    ) -> Result<Vec<BaselineFragment>> {
        let (k, n) = (self.matrix.k(), self.matrix.n());
        Ok(ida_split(data, &self.matrix)
            .into_iter()
            .map(|s| BaselineFragment {
                scheme: SchemeId::Ida,
                k,
                n,
                index: s.index,
                payload_length: data.len() as u64,
                trailer: s.row,
                data: s.data,
            })
            .collect())
    }

    fn reconstruct(&self, fragments: Vec<BaselineFragment>) -> Result<Vec<u8>> {
        let (k, _, len) = check_batch(&fragments, SchemeId::Ida)?;
        let shares: Vec<IdaShare> = fragments
            .into_iter()
            .map(|f| IdaShare {
                index: f.index,
                row: f.trailer,
                data: f.data,
            })
            .collect();
        let mut out = ida_reconstruct(&shares, k)?;
        out.truncate(len as usize);
        Ok(out)
    }
}
