//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_bytes(len: usize, seed: u64) -> Vec<u8> {
    let mut d = vec![0u8; len];
    rng(seed).fill_bytes(&mut d);
    d
}

const NAMES: &[&str] = &[
    "MARTIN", "BERNARD", "DUBOIS", "THOMAS", "ROBERT", "RICHARD", "PETIT", "DURAND", "LEROY",
    "MOREAU",
];
const FIRST: &[&str] = &[
    "Jean", "Marie", "Pierre", "Anne", "Luc", "Claire", "Paul", "Sophie",
];
const STREETS: &[&str] = &[
    "rue de la Poste",
    "avenue Victor Hugo",
    "boulevard Voltaire",
    "place de la Mairie",
    "rue des Lilas",
    "chemin du Moulin",
];
const CITIES: &[(&str, &str)] = &[
    ("75001", "PARIS"),
    ("69002", "LYON"),
    ("13001", "MARSEILLE"),
    ("31000", "TOULOUSE"),
    ("33000", "BORDEAUX"),
    ("59000", "LILLE"),
];
const STATUS: &[&str] = &["DISTRIBUE", "EN COURS", "AVISE", "RETOUR EXPEDITEUR"];

/// Delivery records in the style of postal tracking exports: few distinct
/// symbols, strong line structure, roughly 4 to 5 bits of entropy per byte.
pub fn postal_corpus(len: usize, seed: u64) -> Vec<u8> {
    let mut r = rng(seed);
    let mut out = String::with_capacity(len + 128);
    out.push_str("NOM;PRENOM;ADRESSE;CP;VILLE;COLIS;DATE;STATUT\n");
    while out.len() < len {
        let (cp, city) = CITIES[r.gen_range(0..CITIES.len())];
        out.push_str(&format!(
            "{};{};{} {};{};{};{}{:08};{:02}/{:02}/2014;{}\n",
            NAMES[r.gen_range(0..NAMES.len())],
            FIRST[r.gen_range(0..FIRST.len())],
            r.gen_range(1..120),
            STREETS[r.gen_range(0..STREETS.len())],
            cp,
            city,
            ["6A", "8L", "CP"][r.gen_range(0..3)],
            r.gen_range(0..100_000_000u32),
            r.gen_range(1..29),
            r.gen_range(1..13),
            STATUS[r.gen_range(0..STATUS.len())],
        ));
    }
    let mut bytes = out.into_bytes();
    bytes.truncate(len);
    bytes
}

/// Russian-peasant multiplication modulo 0x11B, independent of the crate's
/// tables.
pub fn slow_mul(mut a: u8, mut b: u8) -> u8 {
    let mut p = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            p ^= a;
        }
        let carry = a & 0x80 != 0;
        a <<= 1;
        if carry {
            a ^= 0x1B;
        }
        b >>= 1;
    }
    p
}

/// Inverse by exhaustive search.
pub fn slow_inv(a: u8) -> Option<u8> {
    (1..=255u8).find(|&b| slow_mul(a, b) == 1)
}
