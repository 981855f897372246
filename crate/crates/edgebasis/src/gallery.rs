//! On-disk collection of reference edge sets.
//!
//! Layout: `root/manifest.json` (JSON array of entries) and
//! `root/models/<id>.edgeset`. Every file is written to a temporary name and
//! renamed into place, so readers never see a partial manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use edgebasis_core::{match_edge_sets, EdgeSet, HypothesisConfig, MatchResult, VerifyConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::edgeset::{self, ParseError};
use crate::report::RankedMatch;

const MANIFEST: &str = "manifest.json";
const MODELS: &str = "models";

#[derive(Debug, thiserror::Error)]
pub enum GalleryError {
    #[error("id `{0}` is already enrolled")]
    DuplicateId(String),
    #[error("invalid id `{0}`: use letters, digits, `-`, `_` or `.`, not starting with `.`")]
    InvalidId(String),
    #[error("gallery is empty")]
    Empty,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: malformed manifest: {source}")]
    Manifest { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Match(#[from] edgebasis_core::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> GalleryError + '_ {
    move |source| GalleryError::Io { path: path.to_owned(), source }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    /// Path of the model relative to the gallery root.
    pub file: String,
    pub source: String,
    pub edge_count: usize,
    /// Seconds since the Unix epoch.
    pub enrolled_at: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gallery {
    root: PathBuf,
    entries: Vec<Entry>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), GalleryError> {
    let dir = path.parent().expect("gallery paths have a parent");
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| GalleryError::Io { path: path.to_owned(), source: e.error })?;
    Ok(())
}

impl Gallery {
    /// Opens the gallery under `root`; a missing manifest means an empty gallery.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, GalleryError> {
        let root = root.into();
        let path = root.join(MANIFEST);
        let entries = match fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes).map_err(|source| GalleryError::Manifest { path: path.clone(), source })?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(source) => return Err(GalleryError::Io { path, source }),
        };
        Ok(Self { root, entries })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn enroll(&mut self, id: &str, set: &EdgeSet, source: &str, enrolled_at: u64) -> Result<&Entry, GalleryError> {
        if !valid_id(id) {
            return Err(GalleryError::InvalidId(id.to_owned()));
        }
        if self.entries.iter().any(|e| e.id == id) {
            return Err(GalleryError::DuplicateId(id.to_owned()));
        }
        let models = self.root.join(MODELS);
        fs::create_dir_all(&models).map_err(io_err(&models))?;
        let file = format!("{MODELS}/{id}.edgeset");
        write_atomic(&self.root.join(&file), edgeset::serialize(set).as_bytes())?;

        let entry = Entry { id: id.to_owned(), file, source: source.to_owned(), edge_count: set.len(), enrolled_at };
        let mut next = self.entries.clone();
        next.push(entry);
        let mut json = serde_json::to_string_pretty(&next).expect("manifest serializes");
        json.push('\n');
        write_atomic(&self.root.join(MANIFEST), json.as_bytes())?;
        self.entries = next;
        Ok(self.entries.last().expect("just pushed"))
    }

    pub fn load(&self, entry: &Entry) -> Result<EdgeSet, GalleryError> {
        let path = self.root.join(&entry.file);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        edgeset::parse(&text).map_err(|source| GalleryError::Model { path, source })
    }

    fn models(&self) -> Result<Vec<(&Entry, EdgeSet)>, GalleryError> {
        if self.entries.is_empty() {
            return Err(GalleryError::Empty);
        }
        self.entries.iter().map(|e| Ok((e, self.load(e)?))).collect()
    }

    /// Matches `probe` against every entry in parallel; best score first,
    /// equal scores by id.
    pub fn search(&self, probe: &EdgeSet, hyp: &HypothesisConfig, ver: &VerifyConfig) -> Result<Vec<RankedMatch>, GalleryError> {
        let models = self.models()?;
        let results = models
            .par_iter()
            .map(|(e, set)| Ok(ranked(e, match_edge_sets(set, probe, hyp, ver)?)))
            .collect::<Result<Vec<_>, GalleryError>>()?;
        Ok(sorted(results))
    }

    pub fn search_sequential(
        &self,
        probe: &EdgeSet,
        hyp: &HypothesisConfig,
        ver: &VerifyConfig,
    ) -> Result<Vec<RankedMatch>, GalleryError> {
        let models = self.models()?;
        let results = models
            .iter()
            .map(|(e, set)| Ok(ranked(e, match_edge_sets(set, probe, hyp, ver)?)))
            .collect::<Result<Vec<_>, GalleryError>>()?;
        Ok(sorted(results))
    }
}

fn ranked(e: &Entry, result: MatchResult) -> RankedMatch {
    RankedMatch { id: e.id.clone(), result }
}

fn sorted(mut results: Vec<RankedMatch>) -> Vec<RankedMatch> {
    results.sort_by(|a, b| b.result.score.total_cmp(&a.result.score).then_with(|| a.id.cmp(&b.id)));
    results
}

#[cfg(test)]
mod tests {
    use super::*;
    use edgebasis_core::{corrupt_and_transform, random_edge_set, CorruptionSpec, Transform};

    fn cfgs() -> (HypothesisConfig, VerifyConfig) {
        (HypothesisConfig::default(), VerifyConfig::default())
    }

    #[test]
    fn enroll_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let mut g = Gallery::open(dir.path()).unwrap();
        assert!(g.is_empty());
        let set = edgeset::quantized(&random_edge_set(40, 64, 64, 1));
        g.enroll("alice", &set, "alice.pgm", 1_700_000_000).unwrap();
        assert_eq!(g.len(), 1);
        let again = Gallery::open(dir.path()).unwrap();
        assert_eq!(again, g);
        assert_eq!(again.load(&again.entries()[0]).unwrap(), set);
        assert!(dir.path().join("models/alice.edgeset").is_file());
    }

    #[test]
    fn duplicate_id_leaves_gallery_unchanged() {
        let dir = tempfile::tempdir().unwrap();
        let mut g = Gallery::open(dir.path()).unwrap();
        let set = random_edge_set(10, 32, 32, 1);
        g.enroll("a", &set, "", 0).unwrap();
        let manifest = fs::read(dir.path().join(MANIFEST)).unwrap();
        let model = fs::read(dir.path().join("models/a.edgeset")).unwrap();
        let other = random_edge_set(12, 32, 32, 2);
        assert!(matches!(g.enroll("a", &other, "", 5), Err(GalleryError::DuplicateId(_))));
        assert_eq!(g.len(), 1);
        assert_eq!(fs::read(dir.path().join(MANIFEST)).unwrap(), manifest);
        assert_eq!(fs::read(dir.path().join("models/a.edgeset")).unwrap(), model);
    }

    #[test]
    fn ids_must_be_file_safe() {
        let dir = tempfile::tempdir().unwrap();
        let mut g = Gallery::open(dir.path()).unwrap();
        let set = random_edge_set(3, 16, 16, 1);
        for bad in ["", "../x", "a/b", ".hidden", "sp ace"] {
            assert!(matches!(g.enroll(bad, &set, "", 0), Err(GalleryError::InvalidId(_))), "{bad}");
        }
        assert!(g.is_empty());
    }

    #[test]
    fn unwritable_root_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain-file");
        fs::write(&file, b"x").unwrap();
        let enrolled = Gallery::open(&file).and_then(|mut g| g.enroll("a", &random_edge_set(3, 16, 16, 1), "", 0).map(|_| ()));
        assert!(matches!(enrolled, Err(GalleryError::Io { .. })));
    }

    #[test]
    fn empty_gallery_cannot_be_searched() {
        let dir = tempfile::tempdir().unwrap();
        let g = Gallery::open(dir.path()).unwrap();
        let (h, v) = cfgs();
        assert!(matches!(g.search(&random_edge_set(5, 16, 16, 1), &h, &v), Err(GalleryError::Empty)));
    }

    #[test]
    fn transformed_probe_ranks_its_source_first() {
        let dir = tempfile::tempdir().unwrap();
        let mut g = Gallery::open(dir.path()).unwrap();
        let target = random_edge_set(250, 256, 256, 100);
        for k in 0..5 {
            g.enroll(&format!("other{k}"), &random_edge_set(250, 256, 256, 200 + k), "", 0).unwrap();
        }
        g.enroll("target", &target, "", 0).unwrap();
        let t = Transform { s: 1.12, tx: -15.0, ty: -12.0 };
        let spec = CorruptionSpec { dropout: 0.2, jitter_pos: 0.5, jitter_theta: 0.05, clutter_frac: 0.1, seed: 4 };
        let probe = corrupt_and_transform(&target, &t, &spec, 256, 256).unwrap();
        let (h, v) = cfgs();
        let ranked = g.search(&probe, &h, &v).unwrap();
        assert_eq!(ranked.len(), 6);
        assert_eq!(ranked[0].id, "target");
        assert!(ranked[0].result.decided);
        assert_eq!(ranked, g.search_sequential(&probe, &h, &v).unwrap());

        let mut ids: Vec<&str> = ranked.iter().map(|r| r.id.as_str()).collect();
        ids.sort_unstable();
        let mut expected: Vec<&str> = g.entries().iter().map(|e| e.id.as_str()).collect();
        expected.sort_unstable();
        assert_eq!(ids, expected);
        for w in ranked.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            assert!(a.result.score > b.result.score || (a.result.score == b.result.score && a.id < b.id));
        }
    }

    #[test]
    fn self_probe_is_rank_one() {
        let dir = tempfile::tempdir().unwrap();
        let mut g = Gallery::open(dir.path()).unwrap();
        let probe = edgeset::quantized(&random_edge_set(200, 128, 128, 7));
        g.enroll("z-self", &probe, "", 0).unwrap();
        g.enroll("a-other", &random_edge_set(200, 128, 128, 8), "", 0).unwrap();
        let (h, v) = cfgs();
        let ranked = g.search(&probe, &h, &v).unwrap();
        assert_eq!(ranked[0].id, "z-self");
        assert!(ranked[0].result.score >= 0.95);
    }
}
