//! Symmetric cipher and digest bindings used by SSMS and AONT-RS.

use aes::cipher::{KeyIvInit, StreamCipher};
use sha2::Digest as _;

/// A symmetric cipher with a fixed-size key. Every split draws a fresh key,
/// so stream ciphers run with an all-zero nonce.
pub trait Cipher: Send + Sync {
    fn name(&self) -> &'static str;

    fn key_len(&self) -> usize;

    fn encrypt(&self, key: &[u8], data: &mut [u8]);

    fn decrypt(&self, key: &[u8], data: &mut [u8]);
}

pub trait Digest: Send + Sync {
    fn name(&self) -> &'static str;

    fn digest(&self, data: &[u8]) -> Vec<u8>;
}

/// AES-128 in CTR mode.
#[derive(Clone, Copy, Debug, Default)]
pub struct Aes128Ctr;

type Aes128CtrCore = ctr::Ctr128BE<aes::Aes128>;

impl Cipher for Aes128Ctr {
    fn name(&self) -> &'static str {
        "aes-128-ctr"
    }

    fn key_len(&self) -> usize {
        16
    }

    fn encrypt(&self, key: &[u8], data: &mut [u8]) {
        let mut c = Aes128CtrCore::new(key.into(), &[0u8; 16].into());
        c.apply_keystream(data);
    }

    fn decrypt(&self, key: &[u8], data: &mut [u8]) {
        self.encrypt(key, data);
    }
}

/// ChaCha20 stream cipher, the fast variant's stand-in for RC4.
#[derive(Clone, Copy, Debug, Default)]
pub struct ChaCha20Cipher;

impl Cipher for ChaCha20Cipher {
    fn name(&self) -> &'static str {
        "chacha20"
    }

    fn key_len(&self) -> usize {
        32
    }

    fn encrypt(&self, key: &[u8], data: &mut [u8]) {
        let mut c = chacha20::ChaCha20::new(key.into(), &[0u8; 12].into());
        c.apply_keystream(data);
    }

    fn decrypt(&self, key: &[u8], data: &mut [u8]) {
        self.encrypt(key, data);
    }
}

/// Identity "cipher" with a 16-byte key, for composition checks.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullCipher;

impl Cipher for NullCipher {
    fn name(&self) -> &'static str {
        "null"
    }

    fn key_len(&self) -> usize {
        16
    }

    fn encrypt(&self, _key: &[u8], _data: &mut [u8]) {}

    fn decrypt(&self, _key: &[u8], _data: &mut [u8]) {}
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sha256Digest;

impl Digest for Sha256Digest {
    fn name(&self) -> &'static str {
        "sha-256"
    }

    fn digest(&self, data: &[u8]) -> Vec<u8> {
        sha2::Sha256::digest(data).to_vec()
    }
}
