//! The six 12-line arcs of `PG(4, 3)` and their `[12, 5/2, 10]` codes over `F_9`,
//! embedded from `data/` and checked against their stated properties.

use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::classify::{canonical_form_in, GroupKind, PointGeometry};
use crate::code::{self, AdditiveCode, MdsKind, MinDistanceAlgorithm};
use crate::formats::{self, FormatError};
use crate::geometry::{self, ProjectiveSystem};

/// `(id, text, sha256)` of every embedded file.
const FILES: [(&str, &str, &str); 12] = [
    ("A1", include_str!("../../../data/A1.arcs"), "d9c3654bfc3c8d63392b894c78bb7e14b0b3760d8e9ef9c0a392d4235ab9f5bf"),
    ("A2", include_str!("../../../data/A2.arcs"), "c4d060b74f3d4b7a40e45a107a0808a231c9be82817bf4d159b2cdc207974fc3"),
    ("A3", include_str!("../../../data/A3.arcs"), "43f2a04edfe47bd5e1dc6d9d12187426d9df02d013eeb68d7bd59240cb5de37c"),
    ("A4", include_str!("../../../data/A4.arcs"), "9c5315fc5c8b2ac97d955bf70156c550a72869071280c0bc65ba874d0f501f23"),
    ("A5", include_str!("../../../data/A5.arcs"), "e9d9af27244289470781de7aed0cc5e24cf8245e30ba78b14924f73e75e26436"),
    ("A6", include_str!("../../../data/A6.arcs"), "4bb886480f9b9fad70f7a7cb25f5cff6adc7bdc3f069975ab96e79121173385e"),
    ("G1", include_str!("../../../data/G1.code"), "f0a841e92d6686cec9e8d2f9841f7059c0cbf0c6b72028b7b56880b45a6741ac"),
    ("G2", include_str!("../../../data/G2.code"), "f7639a38f885a7b9ed0ba44ac3b541eb4bd190a3672d12204003970ede9dfc31"),
    ("G3", include_str!("../../../data/G3.code"), "42bc683fcc99651dc47713bfe411a99476afccc556168f3e057eab12edcb8f63"),
    ("G4", include_str!("../../../data/G4.code"), "9aedc40c0e4db521e200787d2767d073bfe34bffea622081e16c92e75d3de2fc"),
    ("G5", include_str!("../../../data/G5.code"), "8c078f0178ea05f437efb081f75d51891bd1c56864cafe5ad12865d53bc8212b"),
    ("G6", include_str!("../../../data/G6.code"), "765ff1d5c9ec6022978f4c30c6f0ba2e69b5681938e7454fdc0ddce68a3bc214"),
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("embedded file {0} does not match its checksum")]
    Checksum(String),
    #[error("embedded file {id}: {source}")]
    Parse { id: String, source: FormatError },
}

/// Parameters every corpus entry is stated to have.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Claim {
    pub n: usize,
    pub r: usize,
    pub h: usize,
    pub q: u32,
    pub d: usize,
}

pub const CLAIM: Claim = Claim { n: 12, r: 5, h: 2, q: 3, d: 10 };

#[derive(Clone, Debug)]
pub enum Payload {
    Arc(ProjectiveSystem),
    Code(AdditiveCode),
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub payload: Payload,
    pub claimed: Claim,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Raw text of an embedded file by id (`A1`..`A6`, `G1`..`G6`).
pub fn raw(id: &str) -> Option<&'static str> {
    FILES.iter().find(|f| f.0 == id).map(|f| f.1)
}

/// Parses the twelve embedded files, arcs first.
pub fn load_corpus() -> Result<Vec<CorpusEntry>, CorpusError> {
    FILES
        .iter()
        .map(|&(id, text, sum)| {
            if hex(&Sha256::digest(text.as_bytes())) != sum {
                return Err(CorpusError::Checksum(id.to_string()));
            }
            let parse_err = |source| CorpusError::Parse { id: id.to_string(), source };
            let payload = if id.starts_with('A') {
                Payload::Arc(formats::parse_arc(text).map_err(parse_err)?)
            } else {
                Payload::Code(formats::parse_code(text).map_err(parse_err)?)
            };
            Ok(CorpusEntry { id: id.to_string(), payload, claimed: CLAIM })
        })
        .collect()
}

/// Outcome of one claim about one entry (or pair of entries).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub entry: String,
    pub claim: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct CorpusReport {
    pub checks: Vec<Check>,
}

impl CorpusReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for CorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {:<6} {:<22} {}", if c.passed { "ok  " } else { "FAIL" }, c.entry, c.claim, c.detail)?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Checks the embedded corpus.
pub fn verify_corpus() -> Result<CorpusReport, CorpusError> {
    Ok(verify_entries(&load_corpus()?))
}

/// Checks arbitrary entries: arcs `Ai` and codes `Gi` are paired by their index.
pub fn verify_entries(entries: &[CorpusEntry]) -> CorpusReport {
    let mut report = CorpusReport::default();
    let mut push = |entry: &str, claim: &str, passed: bool, detail: String| {
        report.checks.push(Check { entry: entry.to_string(), claim: claim.to_string(), passed, detail });
    };
    let arcs: Vec<(&str, &ProjectiveSystem)> = entries
        .iter()
        .filter_map(|e| match &e.payload {
            Payload::Arc(s) => Some((e.id.as_str(), s)),
            _ => None,
        })
        .collect();
    let geo = arcs.first().and_then(|(_, s)| PointGeometry::new(s.field(), s.r()).ok());
    let canon = |s: &ProjectiveSystem| -> Option<ProjectiveSystem> {
        let g = geo.as_ref().filter(|g| g.r() == s.r() && g.packer().field() == s.field())?;
        Some(canonical_form_in(g, s, GroupKind::Pgl).system)
    };
    let arc_canon: Vec<Option<ProjectiveSystem>> = arcs.iter().map(|(_, s)| canon(s)).collect();

    for entry in entries {
        let id = entry.id.as_str();
        let cl = entry.claimed;
        let k = cl.r.div_ceil(cl.h);
        match &entry.payload {
            Payload::Code(c) => {
                let params_ok = c.n() == cl.n && c.r() == cl.r && c.h() == cl.h && c.q() == cl.q;
                push(
                    id,
                    "size q^r",
                    params_ok,
                    format!("n={} |C|={}^{} over F_{}^{}", c.n(), c.q(), c.r(), c.q(), c.h()),
                );
                let d = code::min_distance(c, MinDistanceAlgorithm::Auto).ok();
                push(id, "minimum distance", d == Some(cl.d), format!("d={}", d.map_or("?".into(), |d| d.to_string())));
                let mds = code::mds_status(c).map(|s| s.mds).ok();
                let want = if cl.r % cl.h == 0 { MdsKind::Integral } else { MdsKind::Fractional };
                push(id, "mds", mds == Some(want), format!("{mds:?}"));
                let faithful = code::is_faithful(c);
                push(id, "faithful", faithful, format!("faithful={faithful}"));
                let twin = format!("A{}", &id[1..]);
                let matched = match (code::system_from_code(c), arcs.iter().position(|(a, _)| *a == twin)) {
                    (Ok(sys), Some(j)) => {
                        let same = canon(&sys).zip(arc_canon[j].clone()).is_some_and(|(x, y)| x == y);
                        (same, format!("projective system equivalent to {twin}: {same}"))
                    }
                    (Err(e), _) => (false, format!("no projective system: {e}")),
                    (_, None) => (false, format!("{twin} missing")),
                };
                push(id, "matches arc", matched.0, matched.1);
            }
            Payload::Arc(s) => {
                let arc = s.len() == cl.n && geometry::arc_check(s, k).unwrap_or(false);
                push(id, "arc", arc, format!("{} lines, every {k} span: {arc}", s.len()));
                let disjoint = geometry::pairwise_disjoint_check(s).unwrap_or(false);
                push(id, "pairwise disjoint", disjoint, format!("{disjoint}"));
                let complete = geometry::completeness_check(s, k).map(|c| c.0).unwrap_or(false);
                push(id, "complete", complete, format!("{complete}"));
            }
        }
    }
    for i in 0..arcs.len() {
        for j in i + 1..arcs.len() {
            let distinct = match (&arc_canon[i], &arc_canon[j]) {
                (Some(a), Some(b)) => a != b,
                _ => false,
            };
            push(&format!("{}/{}", arcs[i].0, arcs[j].0), "inequivalent", distinct, format!("{distinct}"));
        }
    }
    report
}
