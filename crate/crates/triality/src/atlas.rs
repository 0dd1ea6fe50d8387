//! Permutation generator files: parsing, manifest checks, fetching and the
//! local cache.
//!
//! Two text formats are read. The canonical one is a `perm <degree> <count>`
//! header followed by `count` blocks of `degree` 1-based images. The MeatAxe
//! permutation format has a four-integer header `12 <field> <degree>
//! <count>` followed by one image per line.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use triality_core::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AtlasError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("generator {generator} is not a bijection: image {image} repeated")]
    NotABijection { generator: usize, image: usize },
    #[error("digest mismatch: expected {expected}, got {actual}")]
    DigestMismatch { expected: String, actual: String },
    #[error("degree mismatch: expected {expected}, got {actual}")]
    DegreeMismatch { expected: usize, actual: usize },
    #[error("generator order mismatch: expected {expected:?}, got {actual:?}")]
    OrderMismatch { expected: Vec<u64>, actual: Vec<u64> },
    #[error("manifest has no entry `{0}`")]
    UnknownEntry(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("network: {0}")]
    Network(String),
    #[error("generator data `{name}` not found locally; run `triality fetch-data --case q3` or place the file in {data_dir}")]
    Missing { name: String, data_dir: String },
}

type Result<T> = std::result::Result<T, AtlasError>;

fn io_err(path: &Path, e: std::io::Error) -> AtlasError {
    AtlasError::Io { path: path.display().to_string(), message: e.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorFormat {
    Canonical,
    MeataxePerm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorFile {
    pub format: GeneratorFormat,
    pub degree: usize,
    pub permutations: Vec<Permutation>,
    pub source: String,
    /// Lowercase hex SHA-256 of the raw bytes.
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(64);
    for b in Sha256::digest(bytes) {
        write!(s, "{b:02x}").expect("writing to a String");
    }
    s
}

struct Tokens<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, pos: 0, line: 1, line_start: 0 }
    }

    fn error(&self, message: impl Into<String>) -> AtlasError {
        AtlasError::Parse { line: self.line, column: self.pos - self.line_start + 1, message: message.into() }
    }

    fn next_token(&mut self) -> Option<(&'a str, usize, usize)> {
        let bytes = self.text.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            if bytes[self.pos] == b'\n' {
                self.line += 1;
                self.line_start = self.pos + 1;
            }
            self.pos += 1;
        }
        if self.pos == bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < bytes.len() && !bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        Some((&self.text[start..self.pos], self.line, start - self.line_start + 1))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        match self.next_token() {
            None => Err(self.error(format!("unexpected end of input, expected {what}"))),
            Some((tok, line, column)) => tok.parse().map_err(|_| AtlasError::Parse {
                line,
                column,
                message: format!("expected {what}, found `{tok}`"),
            }),
        }
    }
}

fn detect(text: &str) -> Option<GeneratorFormat> {
    let first = text.split_whitespace().next()?;
    match first {
        "perm" => Some(GeneratorFormat::Canonical),
        "12" => Some(GeneratorFormat::MeataxePerm),
        _ => None,
    }
}

/// Parses generator text, auto-detecting the format unless `hint` is given.
pub fn parse_generators(bytes: &[u8], hint: Option<GeneratorFormat>, source: &str) -> Result<GeneratorFile> {
    let text = std::str::from_utf8(bytes).map_err(|e| AtlasError::Parse {
        line: 1,
        column: 1,
        message: format!("not UTF-8 text: {e}"),
    })?;
    let format = match hint.or_else(|| detect(text)) {
        Some(f) => f,
        None => {
            return Err(AtlasError::Parse {
                line: 1,
                column: 1,
                message: "unrecognised header (expected `perm <degree> <count>` or a MeatAxe `12 ...` header)".into(),
            })
        }
    };
    let mut t = Tokens::new(text);
    let (degree, count) = match format {
        GeneratorFormat::Canonical => {
            match t.next_token() {
                Some(("perm", _, _)) => {}
                _ => return Err(AtlasError::Parse { line: 1, column: 1, message: "expected `perm` header".into() }),
            }
            (t.number("degree")?, t.number("generator count")?)
        }
        GeneratorFormat::MeataxePerm => {
            let mode = t.number("mode")?;
            if mode != 12 {
                return Err(AtlasError::Parse {
                    line: 1,
                    column: 1,
                    message: format!("MeatAxe mode {mode} is not 12"),
                });
            }
            let _field = t.number("field")?;
            (t.number("degree")?, t.number("generator count")?)
        }
    };
    if degree == 0 || degree > triality_core::perm::MAX_DEGREE {
        return Err(t.error(format!("degree {degree} outside 1..={}", triality_core::perm::MAX_DEGREE)));
    }
    let mut permutations = Vec::with_capacity(count);
    for generator in 0..count {
        let mut images = Vec::with_capacity(degree);
        let mut seen = vec![false; degree];
        for _ in 0..degree {
            let i = t.number("a point image")?;
            if i == 0 || i > degree {
                return Err(t.error(format!("image {i} outside 1..={degree}")));
            }
            if std::mem::replace(&mut seen[i - 1], true) {
                return Err(AtlasError::NotABijection { generator: generator + 1, image: i });
            }
            images.push(i - 1);
        }
        permutations.push(Permutation::from_images(&images).expect("checked bijection"));
    }
    if let Some((tok, line, column)) = t.next_token() {
        return Err(AtlasError::Parse { line, column, message: format!("trailing input `{tok}`") });
    }
    Ok(GeneratorFile { format, degree, permutations, source: source.to_string(), digest: sha256_hex(bytes) })
}

/// Canonical text for a list of permutations of equal degree.
pub fn serialize_canonical(perms: &[Permutation]) -> String {
    let degree = perms.first().map_or(0, Permutation::degree);
    let mut s = format!("perm {degree} {}\n", perms.len());
    for p in perms {
        for (k, i) in p.one_based_images().into_iter().enumerate() {
            s.push_str(&i.to_string());
            s.push(if k % 20 == 19 || k + 1 == degree { '\n' } else { ' ' });
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub degree: usize,
    pub orders: Vec<u64>,
    pub sha256: String,
    #[serde(default)]
    pub urls: Vec<String>,
    /// File name inside the data directory for vendored data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DataManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DataManifest {
    pub fn parse(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text).map_err(|e| AtlasError::Manifest(e.to_string()))?;
        for e in &m.entries {
            if e.sha256.len() != 64 || !e.sha256.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(AtlasError::Manifest(format!("entry `{}` has a malformed sha256", e.name)));
            }
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path).map_err(|e| io_err(path, e))?)
    }

    pub fn entry(&self, name: &str) -> Result<&ManifestEntry> {
        self.entries.iter().find(|e| e.name == name).ok_or_else(|| AtlasError::UnknownEntry(name.to_string()))
    }
}

/// Checks digest, degree and generator orders against the manifest entry.
pub fn validate_against_manifest(file: GeneratorFile, manifest: &DataManifest, name: &str) -> Result<GeneratorFile> {
    let entry = manifest.entry(name)?;
    if !file.digest.eq_ignore_ascii_case(&entry.sha256) {
        return Err(AtlasError::DigestMismatch { expected: entry.sha256.to_lowercase(), actual: file.digest });
    }
    if file.degree != entry.degree {
        return Err(AtlasError::DegreeMismatch { expected: entry.degree, actual: file.degree });
    }
    let actual: Vec<u64> = file.permutations.iter().map(|p| p.order() as u64).collect();
    if actual != entry.orders {
        return Err(AtlasError::OrderMismatch { expected: entry.orders.clone(), actual });
    }
    Ok(file)
}

/// Source of remote bytes, injectable for tests.
pub trait Transport {
    fn get(&self, url: &str) -> std::result::Result<Vec<u8>, String>;
}

/// HTTP(S) downloads.
#[cfg(feature = "network")]
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpTransport;

#[cfg(feature = "network")]
impl Transport for HttpTransport {
    fn get(&self, url: &str) -> std::result::Result<Vec<u8>, String> {
        let resp = ureq::get(url).timeout(std::time::Duration::from_secs(60)).call().map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        std::io::Read::read_to_end(&mut resp.into_reader(), &mut buf).map_err(|e| e.to_string())?;
        Ok(buf)
    }
}

/// Transport that refuses every request.
#[derive(Debug, Default, Clone, Copy)]
pub struct OfflineTransport;

impl Transport for OfflineTransport {
    fn get(&self, url: &str) -> std::result::Result<Vec<u8>, String> {
        Err(format!("offline mode: refusing to fetch {url}"))
    }
}

/// The network transport when built with it, otherwise `None`.
pub fn default_transport() -> Option<Box<dyn Transport>> {
    #[cfg(feature = "network")]
    {
        Some(Box::new(HttpTransport))
    }
    #[cfg(not(feature = "network"))]
    {
        None
    }
}

/// Content-addressed store of verified generator files.
#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, sha256: &str) -> PathBuf {
        self.dir.join(format!("{}.perm", sha256.to_lowercase()))
    }

    /// Cached bytes whose digest matches, if any.
    pub fn get(&self, sha256: &str) -> Option<Vec<u8>> {
        let bytes = fs::read(self.path_for(sha256)).ok()?;
        sha256_hex(&bytes).eq_ignore_ascii_case(sha256).then_some(bytes)
    }

    /// Stores bytes already checked against `sha256`, atomically and under
    /// an exclusive lock on the cache directory.
    pub fn put(&self, sha256: &str, bytes: &[u8]) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir).map_err(|e| io_err(&self.dir, e))?;
        let lock_path = self.dir.join(".lock");
        let lock = fs::OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&lock_path)
            .map_err(|e| io_err(&lock_path, e))?;
        lock.lock().map_err(|e| io_err(&lock_path, e))?;
        let target = self.path_for(sha256);
        let tmp = self.dir.join(format!(".{}.{}.tmp", sha256.to_lowercase(), std::process::id()));
        let result = (|| {
            let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
            f.write_all(bytes).map_err(|e| io_err(&tmp, e))?;
            f.sync_all().map_err(|e| io_err(&tmp, e))?;
            fs::rename(&tmp, &target).map_err(|e| io_err(&target, e))
        })();
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        let _ = lock.unlock();
        result.map(|()| target)
    }
}

/// Returns the cached file for `name`, downloading and caching it on a miss.
/// Downloads that fail the digest check never enter the cache.
pub fn fetch_generators(
    manifest: &DataManifest,
    name: &str,
    cache: &Cache,
    transport: &dyn Transport,
) -> Result<GeneratorFile> {
    let entry = manifest.entry(name)?;
    if let Some(bytes) = cache.get(&entry.sha256) {
        let source = cache.path_for(&entry.sha256).display().to_string();
        return validate_against_manifest(parse_generators(&bytes, None, &source)?, manifest, name);
    }
    if entry.urls.is_empty() {
        return Err(AtlasError::Network(format!("manifest entry `{name}` lists no download URL")));
    }
    let mut last = None;
    for url in &entry.urls {
        match transport.get(url) {
            Ok(bytes) => {
                let digest = sha256_hex(&bytes);
                if !digest.eq_ignore_ascii_case(&entry.sha256) {
                    last = Some(AtlasError::DigestMismatch { expected: entry.sha256.to_lowercase(), actual: digest });
                    continue;
                }
                let file = validate_against_manifest(parse_generators(&bytes, None, url)?, manifest, name)?;
                cache.put(&entry.sha256, &bytes)?;
                return Ok(file);
            }
            Err(e) => last = Some(AtlasError::Network(format!("{url}: {e}"))),
        }
    }
    Err(last.expect("at least one URL"))
}

/// Loads `name` from the data directory, then the cache, and finally (when
/// a transport is given) the network.
pub fn load_generators(
    data_dir: &Path,
    manifest: &DataManifest,
    name: &str,
    cache: &Cache,
    transport: Option<&dyn Transport>,
) -> Result<GeneratorFile> {
    let entry = manifest.entry(name)?;
    if let Some(file) = &entry.file {
        let path = data_dir.join(file);
        if let Ok(bytes) = fs::read(&path) {
            let parsed = parse_generators(&bytes, None, &path.display().to_string())?;
            return validate_against_manifest(parsed, manifest, name);
        }
    }
    match transport {
        Some(t) => fetch_generators(manifest, name, cache, t),
        None => match cache.get(&entry.sha256) {
            Some(bytes) => {
                let source = cache.path_for(&entry.sha256).display().to_string();
                validate_against_manifest(parse_generators(&bytes, None, &source)?, manifest, name)
            }
            None => Err(AtlasError::Missing { name: name.to_string(), data_dir: data_dir.display().to_string() }),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn both_formats_agree() {
        let a = parse_generators(b"perm 3 1\n2 3 1\n", None, "a").unwrap();
        let b = parse_generators(b"12 1 3 1\n2\n3\n1\n", None, "b").unwrap();
        assert_eq!(a.format, GeneratorFormat::Canonical);
        assert_eq!(b.format, GeneratorFormat::MeataxePerm);
        assert_eq!(a.permutations, b.permutations);
        assert_eq!(a.permutations[0], Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            parse_generators(b"perm 3 1\n2 2 1\n", None, "x").unwrap_err(),
            AtlasError::NotABijection { generator: 1, image: 2 }
        );
        assert!(matches!(parse_generators(b"hello", None, "x"), Err(AtlasError::Parse { line: 1, .. })));
        match parse_generators(b"perm 3 1\n2 3\nx\n", None, "x") {
            Err(AtlasError::Parse { line, column, .. }) => assert_eq!((line, column), (3, 1)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_generators(b"perm 3 1\n2 3 4\n", None, "x"), Err(AtlasError::Parse { .. })));
        assert!(matches!(parse_generators(b"perm 3 1\n2 3 1 1\n", None, "x"), Err(AtlasError::Parse { .. })));
        assert!(matches!(
            parse_generators(b"13 1 3 1\n2\n3\n1\n", Some(GeneratorFormat::MeataxePerm), "x"),
            Err(AtlasError::Parse { .. })
        ));
    }

    #[test]
    fn manifest_checks() {
        let text = serialize_canonical(&[Permutation::from_cycles(4, &[&[1, 2, 3, 4]]).unwrap()]);
        let digest = sha256_hex(text.as_bytes());
        let manifest = DataManifest {
            entries: vec![ManifestEntry {
                name: "c4".into(),
                degree: 4,
                orders: vec![4],
                sha256: digest.clone(),
                urls: vec![],
                file: None,
                description: None,
            }],
        };
        let parsed = parse_generators(text.as_bytes(), None, "t").unwrap();
        assert!(validate_against_manifest(parsed.clone(), &manifest, "c4").is_ok());
        let bad = parse_generators(b"perm 4 1\n2 1 4 3\n", None, "t").unwrap();
        assert!(matches!(validate_against_manifest(bad, &manifest, "c4"), Err(AtlasError::DigestMismatch { .. })));
        let mut m2 = manifest.clone();
        m2.entries[0].orders = vec![2];
        assert_eq!(
            validate_against_manifest(parsed.clone(), &m2, "c4").unwrap_err(),
            AtlasError::OrderMismatch { expected: vec![2], actual: vec![4] }
        );
        assert!(matches!(validate_against_manifest(parsed, &manifest, "nope"), Err(AtlasError::UnknownEntry(_))));
        let json = serde_json::to_string(&manifest).unwrap();
        assert_eq!(DataManifest::parse(&json).unwrap(), manifest);
    }

    proptest! {
        #[test]
        fn canonical_round_trip(degree in 1usize..60, seed in any::<u64>(), count in 1usize..4) {
            let perms: Vec<Permutation> = (0..count as u64)
                .map(|k| {
                    let mut images: Vec<usize> = (0..degree).collect();
                    let mut s = seed ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15);
                    for i in (1..degree).rev() {
                        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        images.swap(i, (s >> 33) as usize % (i + 1));
                    }
                    Permutation::from_images(&images).unwrap()
                })
                .collect();
            let text = serialize_canonical(&perms);
            let back = parse_generators(text.as_bytes(), None, "p").unwrap();
            prop_assert_eq!(&back.permutations, &perms);
            let mut meataxe = format!("12 1 {degree} {count}\n");
            for p in &perms {
                for i in p.one_based_images() {
                    meataxe.push_str(&format!("{i}\n"));
                }
            }
            prop_assert_eq!(parse_generators(meataxe.as_bytes(), None, "m").unwrap().permutations, perms);
        }
    }
}
