//! Placement of fragments on `c` storage sites, object-store backends and the
//! client-side run manifest.
//!
//! Fragment `j` goes to site `j mod c`. That keeps every encoding window
//! `{j, .., j+c-1} mod k` spread over distinct sites, and with it the `c`
//! shares of each permutation array. Parity fragments, when present, go to
//! one extra site with index `c`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{reconstruct_baseline, BaselineFragment, SchemeId};
use crate::codec::{decode_data, FragmentSet};
use crate::erasure::{protect, recover, ParityFragment};
use crate::error::{Error, Result};
use crate::format::{decode_fragment, encode_fragment, FragmentFile};

/// Extension of parity fragment files.
pub const PARITY_EXTENSION: &str = "kpar";

/// Site index of every fragment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteAssignment {
    c: usize,
    sites: Vec<usize>,
}

impl SiteAssignment {
    /// An arbitrary assignment, not checked against the dispersal rules.
    pub fn from_sites(c: usize, sites: Vec<usize>) -> Self {
        Self { c, sites }
    }

    pub fn k(&self) -> usize {
        self.sites.len()
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn site(&self, j: usize) -> usize {
        self.sites[j]
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    /// Fragments placed on `site`, ascending.
    pub fn fragments_on(&self, site: usize) -> Vec<usize> {
        (0..self.sites.len())
            .filter(|&j| self.sites[j] == site)
            .collect()
    }
}

impl fmt::Display for SiteAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "site  fragments")?;
        for s in 0..self.c {
            let list: Vec<String> = self
                .fragments_on(s)
                .iter()
                .map(|j| format!("f{j}"))
                .collect();
            writeln!(f, "{s:<4}  {}", list.join(" "))?;
        }
        Ok(())
    }
}

/// A broken dispersal rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Violation {
    /// The assignment covers a different number of fragments than `k`.
    WrongLength { expected: usize, actual: usize },
    /// Fragment `j` names a site outside `0..c`.
    SiteOutOfRange { j: usize, site: usize },
    /// Fragments `a < b` share an encoding window and also `site`.
    Neighbors { a: usize, b: usize, site: usize },
    /// Fragments `a < b` hold shares of permutation array `array` on the
    /// same `site`.
    PermutationShares {
        array: usize,
        a: usize,
        b: usize,
        site: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::WrongLength { expected, actual } => {
                write!(
                    f,
                    "assignment covers {actual} fragments, expected {expected}"
                )
            }
            Violation::SiteOutOfRange { j, site } => {
                write!(f, "f{j} assigned to unknown site {site}")
            }
            Violation::Neighbors { a, b, site } => {
                write!(f, "neighbors f{a} and f{b} both on site {site}")
            }
            Violation::PermutationShares { array, a, b, site } => write!(
                f,
                "shares of permutation array {array} in f{a} and f{b} both on site {site}"
            ),
        }
    }
}

/// Unordered pairs `(a, b)`, `a < b`, of fragments that appear together in
/// some window `{j, j+1, .., j+c-1} mod k`.
pub fn neighbor_pairs(k: usize, c: usize) -> Vec<(usize, usize)> {
    let mut pairs = BTreeSet::new();
    if k == 0 {
        return Vec::new();
    }
    for j in 0..k {
        for s in 0..c.min(k) {
            for t in s + 1..c.min(k) {
                let (a, b) = ((j + s) % k, (j + t) % k);
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    pairs.into_iter().collect()
}

/// Checks neighbor separation and permutation-share separation. Violations
/// are returned sorted.
pub fn validate_assignment(
    sites: &[usize],
    k: usize,
    c: usize,
) -> std::result::Result<(), Vec<Violation>> {
    if sites.len() != k {
        return Err(vec![Violation::WrongLength {
            expected: k,
            actual: sites.len(),
        }]);
    }
    let mut out = BTreeSet::new();
    for (j, &site) in sites.iter().enumerate() {
        if site >= c {
            out.insert(Violation::SiteOutOfRange { j, site });
        }
    }
    for (a, b) in neighbor_pairs(k, c) {
        if sites[a] == sites[b] {
            out.insert(Violation::Neighbors {
                a,
                b,
                site: sites[a],
            });
        }
    }
    if c > 0 && k % c == 0 {
        // shares of array r live in fragments r*c .. r*c + c - 1
        for array in 0..k / c {
            let base = array * c;
            for a in base..base + c {
                for b in a + 1..base + c {
                    if sites[a] == sites[b] {
                        out.insert(Violation::PermutationShares {
                            array,
                            a,
                            b,
                            site: sites[a],
                        });
                    }
                }
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out.into_iter().collect())
    }
}

/// The `j -> j mod c` placement.
pub fn assign_sites(k: usize, c: usize) -> Result<SiteAssignment> {
    if c < 2 || k < c || k % c != 0 {
        return Err(Error::param(format!(
            "need c >= 2 and k a multiple of c, got k={k} c={c}"
        )));
    }
    let sites: Vec<usize> = (0..k).map(|j| j % c).collect();
    validate_assignment(&sites, k, c).map_err(|v| {
        Error::Integrity(format!("site assignment violates dispersal rules: {v:?}"))
    })?;
    Ok(SiteAssignment { c, sites })
}

/// Minimal object-store interface a storage site must provide.
pub trait ObjectStore: Send + Sync {
    /// Identifies the backend; distinct sites must have distinct descriptors.
    fn descriptor(&self) -> String;
    /// Fails with [`io::ErrorKind::AlreadyExists`] rather than overwrite.
    fn put(&self, name: &str, bytes: &[u8]) -> io::Result<()>;
    /// Fails with [`io::ErrorKind::NotFound`] for unknown names.
    fn get(&self, name: &str) -> io::Result<Vec<u8>>;
    fn delete(&self, name: &str) -> io::Result<()>;
    fn list(&self, prefix: &str) -> io::Result<Vec<String>>;
}

/// Objects as files under a root directory; `/` in names maps to
/// subdirectories.
#[derive(Clone, Debug)]
pub struct LocalDirStore {
    root: PathBuf,
}

impl LocalDirStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path_of(&self, name: &str) -> io::Result<PathBuf> {
        let rel = Path::new(name);
        let clean = !name.is_empty() && rel.components().all(|c| matches!(c, Component::Normal(_)));
        if !clean {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("object name {name:?} is not a relative path"),
            ));
        }
        Ok(self.root.join(rel))
    }

    fn walk(&self, dir: &Path, out: &mut Vec<String>) -> io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let entry = entry?;
            let path = entry.path();
            if entry.file_type()?.is_dir() {
                self.walk(&path, out)?;
            } else if let Ok(rel) = path.strip_prefix(&self.root) {
                let name: Vec<String> = rel
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy().into_owned())
                    .collect();
                out.push(name.join("/"));
            }
        }
        Ok(())
    }
}

impl ObjectStore for LocalDirStore {
    fn descriptor(&self) -> String {
        let abs = fs::canonicalize(&self.root).unwrap_or_else(|_| self.root.clone());
        format!("file://{}", abs.display())
    }

    fn put(&self, name: &str, bytes: &[u8]) -> io::Result<()> {
        let path = self.path_of(name)?;
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut file = fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)?;
        let written = file.write_all(bytes).and_then(|_| file.sync_all());
        if written.is_err() {
            let _ = fs::remove_file(&path);
        }
        written
    }

    fn get(&self, name: &str) -> io::Result<Vec<u8>> {
        fs::read(self.path_of(name)?)
    }

    fn delete(&self, name: &str) -> io::Result<()> {
        fs::remove_file(self.path_of(name)?)
    }

    fn list(&self, prefix: &str) -> io::Result<Vec<String>> {
        let mut out = Vec::new();
        match self.walk(&self.root, &mut out) {
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            r => r?,
        }
        out.retain(|n| n.starts_with(prefix));
        out.sort();
        Ok(out)
    }
}

/// One storage location.
#[derive(Clone)]
pub struct StorageSite {
    pub index: usize,
    pub backend: Arc<dyn ObjectStore>,
}

impl StorageSite {
    pub fn local(index: usize, root: impl Into<PathBuf>) -> Self {
        Self {
            index,
            backend: Arc::new(LocalDirStore::new(root)),
        }
    }
}

impl fmt::Debug for StorageSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "StorageSite({}, {})",
            self.index,
            self.backend.descriptor()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub site: usize,
    pub name: String,
    pub sha256: String,
}

/// Client-side record of a run. Never stored on a site.
///
/// `n` counts every fragment, parity included. For the reference schemes
/// `c` is the number of sites and `block_size` is absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub scheme: SchemeId,
    pub k: usize,
    pub c: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub block_size: Option<usize>,
    pub payload_length: u64,
    pub run_id: String,
    /// Seconds since the Unix epoch.
    pub created: u64,
    /// Backend descriptors by site index; empty for a local split directory.
    #[serde(default)]
    pub sites: Vec<String>,
    pub fragments: Vec<ManifestEntry>,
}

impl Manifest {
    /// Number of sites the entries refer to.
    pub fn site_count(&self) -> usize {
        site_count(self.scheme, self.k, self.c, self.n)
    }

    /// Checks that indices are complete and unique, names unique, and sites
    /// follow the placement rules.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n < self.k || self.c == 0 {
            return Err(Error::Format(format!(
                "manifest has k={} c={} n={}",
                self.k, self.c, self.n
            )));
        }
        let mut idx: Vec<usize> = self.fragments.iter().map(|e| e.index).collect();
        idx.sort_unstable();
        if idx != (0..self.n).collect::<Vec<_>>() {
            return Err(Error::Format(format!(
                "manifest must list fragments 0..{} exactly once",
                self.n
            )));
        }
        let names: HashSet<&str> = self.fragments.iter().map(|e| e.name.as_str()).collect();
        if names.len() != self.fragments.len() {
            return Err(Error::Format("duplicate object name in manifest".into()));
        }
        for e in &self.fragments {
            if e.site != planned_site(self.scheme, self.k, self.c, e.index) {
                return Err(Error::Format(format!(
                    "fragment {} listed on site {}, expected {}",
                    e.index,
                    e.site,
                    planned_site(self.scheme, self.k, self.c, e.index)
                )));
            }
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let m: Manifest = serde_json::from_slice(&bytes)?;
        m.validate()?;
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn assignment(&self) -> SiteAssignment {
        let mut sites = vec![0; self.n];
        for e in &self.fragments {
            sites[e.index] = e.site;
        }
        SiteAssignment::from_sites(self.site_count(), sites)
    }

    fn entry(&self, index: usize) -> &ManifestEntry {
        self.fragments
            .iter()
            .find(|e| e.index == index)
            .expect("validated manifest lists every index")
    }
}

fn site_count(scheme: SchemeId, k: usize, c: usize, n: usize) -> usize {
    if scheme == SchemeId::Proposed && n > k {
        c + 1
    } else {
        c
    }
}

fn planned_site(scheme: SchemeId, k: usize, c: usize, index: usize) -> usize {
    if scheme == SchemeId::Proposed && index >= k {
        c
    } else {
        index % c
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A random 16-hex-digit run identifier.
pub fn new_run_id<R: RngCore + ?Sized>(rng: &mut R) -> String {
    let mut id = [0u8; 8];
    rng.fill_bytes(&mut id);
    hex::encode(id)
}

/// Serialized fragment files of one run, position = fragment index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bundle {
    pub scheme: SchemeId,
    pub k: usize,
    pub c: usize,
    pub n: usize,
    pub block_size: Option<usize>,
    pub payload_length: u64,
    pub objects: Vec<Vec<u8>>,
}

impl Bundle {
    /// The `k` codec fragments plus `n - k` parity fragments over their
    /// serialized form.
    pub fn from_codec(fs: &FragmentSet, n: usize) -> Result<Self> {
        let params = fs.params();
        let mut objects = fs
            .fragments()
            .iter()
            .map(encode_fragment)
            .collect::<Result<Vec<_>>>()?;
        if n < params.k {
            return Err(Error::param(format!(
                "n ({n}) must be at least k ({})",
                params.k
            )));
        }
        if n > params.k {
            let parity = protect(&objects, n)?;
            for p in parity {
                objects.push(p.encode()?);
            }
        }
        Ok(Self {
            scheme: crate::baselines::SchemeId::Proposed,
            k: params.k,
            c: params.c,
            n,
            block_size: Some(params.block_size),
            payload_length: fs.payload_length(),
            objects,
        })
    }

    /// Reference-scheme fragments spread round-robin over `c` sites.
    pub fn from_baseline(fragments: &[BaselineFragment], c: usize) -> Result<Self> {
        let first = fragments
            .first()
            .ok_or_else(|| Error::param("no fragments to store"))?;
        if c == 0 {
            return Err(Error::param("at least one site is needed"));
        }
        if fragments.len() != first.n || fragments.iter().enumerate().any(|(i, f)| f.index != i) {
            return Err(Error::param(
                "a bundle needs all n fragments in index order",
            ));
        }
        Ok(Self {
            scheme: first.scheme,
            k: first.k,
            c,
            n: first.n,
            block_size: None,
            payload_length: first.payload_length,
            objects: fragments
                .iter()
                .map(BaselineFragment::encode)
                .collect::<Result<_>>()?,
        })
    }

    /// Rebuilds a bundle from a manifest and the objects it lists.
    pub fn from_manifest(manifest: &Manifest, objects: Vec<Vec<u8>>) -> Result<Self> {
        if objects.len() != manifest.n {
            return Err(Error::param("object count differs from the manifest"));
        }
        Ok(Self {
            scheme: manifest.scheme,
            k: manifest.k,
            c: manifest.c,
            n: manifest.n,
            block_size: manifest.block_size,
            payload_length: manifest.payload_length,
            objects,
        })
    }

    pub fn site_count(&self) -> usize {
        site_count(self.scheme, self.k, self.c, self.n)
    }

    pub fn extension(&self, index: usize) -> &'static str {
        if self.scheme == SchemeId::Proposed && index >= self.k {
            PARITY_EXTENSION
        } else {
            self.scheme.extension()
        }
    }

    /// `f<j>.<ext>`, under `<prefix>/` when a prefix is given.
    pub fn object_name(&self, prefix: Option<&str>, index: usize) -> String {
        match prefix {
            Some(p) => format!("{p}/f{index}.{}", self.extension(index)),
            None => format!("f{index}.{}", self.extension(index)),
        }
    }

    fn manifest(&self, run_id: &str, prefix: Option<&str>, sites: Vec<String>) -> Manifest {
        Manifest {
            scheme: self.scheme,
            k: self.k,
            c: self.c,
            n: self.n,
            block_size: self.block_size,
            payload_length: self.payload_length,
            run_id: run_id.to_string(),
            created: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            sites,
            fragments: self
                .objects
                .iter()
                .enumerate()
                .map(|(index, bytes)| ManifestEntry {
                    index,
                    site: planned_site(self.scheme, self.k, self.c, index),
                    name: self.object_name(prefix, index),
                    sha256: sha256_hex(bytes),
                })
                .collect(),
        }
    }
}

/// Writes every object of `bundle` as `f<j>.<ext>` into `dir` and returns
/// the manifest (not written).
pub fn write_local(bundle: &Bundle, dir: &Path, run_id: &str) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest = bundle.manifest(run_id, None, Vec::new());
    for (entry, bytes) in manifest.fragments.iter().zip(&bundle.objects) {
        let path = dir.join(&entry.name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    }
    Ok(manifest)
}

/// Reads the objects of a local split directory; absent files are `None`,
/// digest mismatches are integrity errors.
pub fn read_local(manifest: &Manifest, dir: &Path) -> Result<Vec<Option<Vec<u8>>>> {
    manifest.validate()?;
    (0..manifest.n)
        .map(|index| {
            let entry = manifest.entry(index);
            let path = dir.join(&entry.name);
            match fs::read(&path) {
                Ok(bytes) => verify(entry, bytes).map(Some),
                Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
                Err(e) => Err(Error::io(path, e)),
            }
        })
        .collect()
}

fn verify(entry: &ManifestEntry, bytes: Vec<u8>) -> Result<Vec<u8>> {
    if sha256_hex(&bytes) != entry.sha256 {
        return Err(Error::Integrity(format!(
            "digest mismatch for fragment {} ({})",
            entry.index, entry.name
        )));
    }
    Ok(bytes)
}

fn check_sites(sites: &[StorageSite], expected: usize) -> Result<()> {
    if sites.len() != expected {
        return Err(Error::param(format!(
            "{expected} sites required, {} given",
            sites.len()
        )));
    }
    for (i, s) in sites.iter().enumerate() {
        if s.index != i {
            return Err(Error::param(format!(
                "site at position {i} has index {}",
                s.index
            )));
        }
    }
    let descriptors: HashSet<String> = sites.iter().map(|s| s.backend.descriptor()).collect();
    if descriptors.len() != sites.len() {
        return Err(Error::param("sites must use distinct backends"));
    }
    Ok(())
}

/// Writes each object to its site as `<run-id>/f<j>.<ext>`. On any failure
/// the objects already written are deleted and no manifest is produced.
pub fn store(bundle: &Bundle, sites: &[StorageSite], run_id: &str) -> Result<Manifest> {
    check_sites(sites, bundle.site_count())?;
    if bundle.objects.len() != bundle.n {
        return Err(Error::param("bundle is incomplete"));
    }
    if bundle.scheme == SchemeId::Proposed {
        assign_sites(bundle.k, bundle.c)?;
    }
    let descriptors = sites.iter().map(|s| s.backend.descriptor()).collect();
    let manifest = bundle.manifest(run_id, Some(run_id), descriptors);
    manifest.validate()?;

    let results: Vec<std::result::Result<(), Error>> = manifest
        .fragments
        .par_iter()
        .zip(&bundle.objects)
        .map(|(entry, bytes)| {
            sites[entry.site]
                .backend
                .put(&entry.name, bytes)
                .map_err(|e| Error::Backend {
                    site: entry.site,
                    message: format!("writing {}: {e}", entry.name),
                })
        })
        .collect();
    if let Some(pos) = results.iter().position(Result::is_err) {
        for (entry, r) in manifest.fragments.iter().zip(&results) {
            if r.is_ok() {
                let _ = sites[entry.site].backend.delete(&entry.name);
            }
        }
        return Err(results
            .into_iter()
            .nth(pos)
            .and_then(|r| r.err())
            .expect("error present"));
    }
    Ok(manifest)
}

/// Retrieves and digest-checks every object listed in `manifest`. Missing
/// objects come back as `None`.
pub fn fetch(manifest: &Manifest, sites: &[StorageSite]) -> Result<Vec<Option<Vec<u8>>>> {
    manifest.validate()?;
    check_sites(sites, manifest.site_count())?;
    (0..manifest.n)
        .into_par_iter()
        .map(|index| {
            let entry = manifest.entry(index);
            match sites[entry.site].backend.get(&entry.name) {
                Ok(bytes) => verify(entry, bytes).map(Some),
                Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
                Err(e) => Err(Error::Backend {
                    site: entry.site,
                    message: format!("reading {}: {e}", entry.name),
                }),
            }
        })
        .collect()
}

/// Fills missing codec fragments from parity and returns the primaries.
fn complete_codec(k: usize, objects: Vec<Option<Vec<u8>>>) -> Result<Vec<Vec<u8>>> {
    let mut primaries: Vec<Option<Vec<u8>>> = vec![None; k];
    let mut parity = Vec::new();
    for bytes in objects.into_iter().flatten() {
        match FragmentFile::parse(&bytes)? {
            FragmentFile::Codec(f) if f.j < k => primaries[f.j] = Some(bytes),
            FragmentFile::Parity(p) => parity.push(p),
            _ => return Err(Error::param("mixed fragment kinds in one run")),
        }
    }
    if parity.is_empty() {
        let missing: Vec<usize> = (0..k).filter(|&j| primaries[j].is_none()).collect();
        if !missing.is_empty() {
            return Err(Error::threshold(k, k - missing.len(), missing));
        }
        return Ok(primaries.into_iter().flatten().collect());
    }
    recover(&primaries, &parity)
}

/// Retrieves the codec fragments of a run, substituting parity for lost
/// primaries where possible.
pub fn fetch_fragment_set(manifest: &Manifest, sites: &[StorageSite]) -> Result<FragmentSet> {
    if manifest.scheme != SchemeId::Proposed {
        return Err(Error::param("not a proposed-scheme manifest"));
    }
    let objects = fetch(manifest, sites)?;
    let primaries = complete_codec(manifest.k, objects)?;
    FragmentSet::new(
        primaries
            .iter()
            .map(|b| decode_fragment(b))
            .collect::<Result<_>>()?,
    )
}

/// Reconstructs the payload from whatever fragment files are at hand (any
/// scheme; parity files stand in for lost codec fragments).
pub fn reassemble(files: Vec<Vec<u8>>) -> Result<Vec<u8>> {
    let mut codec_k = None;
    let mut baseline = Vec::new();
    for bytes in &files {
        match FragmentFile::parse(bytes)? {
            FragmentFile::Codec(f) => codec_k = Some(f.params.k),
            FragmentFile::Parity(p) => {
                codec_k.get_or_insert(p.k);
            }
            FragmentFile::Baseline(f) => baseline.push(f),
        }
    }
    match (codec_k, baseline.is_empty()) {
        (None, true) => Err(Error::param("no fragment files given")),
        (Some(_), false) => Err(Error::param("fragments from different schemes")),
        (None, false) => reconstruct_baseline(baseline),
        (Some(k), true) => {
            let primaries = complete_codec(k, files.into_iter().map(Some).collect())?;
            let fs = FragmentSet::new(
                primaries
                    .iter()
                    .map(|b| decode_fragment(b))
                    .collect::<Result<_>>()?,
            )?;
            decode_data(&fs)
        }
    }
}

/// Parity fragments in `objects`, for callers that want to inspect them.
pub fn parity_of(objects: &[Vec<u8>]) -> Result<Vec<ParityFragment>> {
    objects
        .iter()
        .filter(|b| b.starts_with(crate::erasure::PARITY_MAGIC))
        .map(|b| ParityFragment::decode(b))
        .collect()
}
