use std::cell::Cell;

use triality::atlas::{
    fetch_generators, load_generators, serialize_canonical, sha256_hex, AtlasError, Cache, DataManifest, Transport,
};
use triality_core::Permutation;

struct Counting {
    body: Vec<u8>,
    calls: Cell<usize>,
}

impl Transport for Counting {
    fn get(&self, _url: &str) -> Result<Vec<u8>, String> {
        self.calls.set(self.calls.get() + 1);
        Ok(self.body.clone())
    }
}

fn sample() -> (Vec<u8>, Vec<Permutation>) {
    let a = Permutation::from_cycles(6, &[&[1, 2, 3, 4]]).unwrap();
    let b = Permutation::from_cycles(6, &[&[1, 2, 3, 4, 5]]).unwrap();
    let perms = vec![a, b];
    (serialize_canonical(&perms).into_bytes(), perms)
}

fn manifest(sha: &str) -> DataManifest {
    DataManifest::parse(&format!(
        r#"{{"entries": [{{"name": "toy", "degree": 6, "orders": [4, 5], "sha256": "{sha}", "urls": ["https://example.invalid/toy.perm"]}}]}}"#
    ))
    .unwrap()
}

#[test]
fn cold_then_warm_fetch_reads_the_cache() {
    let (bytes, perms) = sample();
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let m = manifest(&sha256_hex(&bytes));
    let t = Counting { body: bytes.clone(), calls: Cell::new(0) };

    let cold = fetch_generators(&m, "toy", &cache, &t).unwrap();
    assert_eq!(t.calls.get(), 1);
    assert_eq!(cold.permutations, perms);
    assert!(cache.path_for(&sha256_hex(&bytes)).exists());

    let warm = fetch_generators(&m, "toy", &cache, &t).unwrap();
    assert_eq!(t.calls.get(), 1, "cache hit must not touch the transport");
    assert_eq!(
        (cold.format, cold.degree, &cold.permutations, &cold.digest),
        (warm.format, warm.degree, &warm.permutations, &warm.digest)
    );
    assert_eq!(serialize_canonical(&cold.permutations), serialize_canonical(&warm.permutations));
    assert_eq!(warm.permutations.iter().map(|p| p.order()).collect::<Vec<_>>(), vec![4, 5]);
}

#[test]
fn digest_mismatch_leaves_the_cache_untouched() {
    let (bytes, _) = sample();
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let m = manifest(&"0".repeat(64));
    let t = Counting { body: bytes, calls: Cell::new(0) };
    let err = fetch_generators(&m, "toy", &cache, &t).unwrap_err();
    assert!(matches!(err, AtlasError::DigestMismatch { .. }), "{err}");
    assert_eq!(std::fs::read_dir(dir.path()).map(|d| d.count()).unwrap_or(0), 0);
}

#[test]
fn offline_load_uses_a_populated_cache() {
    let (bytes, perms) = sample();
    let data = tempfile::tempdir().unwrap();
    let cache_dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(cache_dir.path());
    let sha = sha256_hex(&bytes);
    let m = manifest(&sha);

    let missing = load_generators(data.path(), &m, "toy", &cache, None).unwrap_err();
    assert!(matches!(missing, AtlasError::Missing { .. }));
    assert!(missing.to_string().contains("fetch-data"));

    cache.put(&sha, &bytes).unwrap();
    let file = load_generators(data.path(), &m, "toy", &cache, None).unwrap();
    assert_eq!(file.permutations, perms);
}

#[test]
fn vendored_q3_generators_match_the_manifest() {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let m = DataManifest::load(&data.join("manifest.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = load_generators(&data, &m, triality::q3::DATA_NAME, &Cache::new(dir.path()), None).unwrap();
    assert_eq!(file.degree, 3360);
    assert_eq!(file.permutations.iter().map(|p| p.order()).collect::<Vec<_>>(), vec![24, 20]);
}
