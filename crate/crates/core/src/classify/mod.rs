//! Isomorph-free generation of subspace-arcs by canonical augmentation.
//!
//! An arc of size `n` in `PG(r-1, q)` is a set of distinct `h`-dimensional
//! subspaces of `F_q^r` any `k = ⌈r/h⌉` of which span. Arcs of size below `k`
//! are kept only if they satisfy the hereditary condition
//! `dim span(T) ≥ r - (k - |T|)·h` for all subsets `T`, which is exactly what
//! every subset of a larger arc satisfies.
//!
//! Level `n + 1` is generated from the representatives of level `n`: the
//! admissible extensions of a parent are reduced to orbits of its
//! automorphism group, and a child is kept only if the added element lies in
//! the automorphism orbit of the child's canonically chosen element. Every
//! class is then produced exactly once, whatever the order of work.

pub mod canon;
mod checkpoint;

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use thiserror::Error;

use crate::field::Field;
use crate::geometry::{self, GeometryError, ProjectiveSystem, Subspace};
use crate::packed::{self, PVec, Packed};

pub use canon::{
    are_equivalent, canonical_form, canonical_form_exhaustive, canonical_form_in, enumerate_group, CanonicalForm,
    GroupElement, GroupKind, PointGeometry,
};
pub use checkpoint::Census;

use canon::{orbits_of, Canon};
use checkpoint::{Header, Record};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("classification needs r > h ≥ 1 (got r = {r}, h = {h})")]
    BadParameters { r: usize, h: usize },
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("subspace keys overflow 128 bits for q = {q}, r = {r}, h = {h}")]
    TooLarge { q: u32, r: usize, h: usize },
    #[error("time budget exhausted while extending size {size}; progress is in the checkpoint")]
    BudgetExceeded { size: usize },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which censuses to collect.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Filters {
    pub complete: bool,
    pub disjoint: bool,
}

/// Keep levels at or above `min_size` on disk under `dir` instead of in memory.
#[derive(Clone, Debug)]
pub struct SpillPolicy {
    pub dir: PathBuf,
    pub min_size: usize,
}

#[derive(Clone, Debug, Default)]
pub struct ClassifyOptions {
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    /// Defaults to [`GroupKind::default_for`] the base field.
    pub group: Option<GroupKind>,
    pub checkpoint: Option<PathBuf>,
    pub budget: Option<Duration>,
    /// Shuffles the order in which parents are processed.
    pub seed: Option<u64>,
    pub spill: Option<SpillPolicy>,
    /// Retain representatives of sizes up to this bound in the result.
    pub keep_reps: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct ClassificationRun {
    pub q: u32,
    pub h: usize,
    pub r: usize,
    pub k: usize,
    pub max_size: usize,
    pub group: GroupKind,
    pub filters: Filters,
    /// Size → number of equivalence classes, for sizes `1..=max_size`.
    pub counts: BTreeMap<usize, u64>,
    /// Filled when `filters.complete`.
    pub complete_counts: BTreeMap<usize, u64>,
    /// Filled when `filters.disjoint`.
    pub disjoint_counts: BTreeMap<usize, u64>,
    /// Filled when both filters are set.
    pub disjoint_complete_counts: BTreeMap<usize, u64>,
    /// Representatives per size, when requested.
    pub reps: BTreeMap<usize, Vec<ProjectiveSystem>>,
}

impl ClassificationRun {
    /// Largest size with a nonzero count.
    pub fn max_arc_size(&self) -> usize {
        self.counts.iter().filter(|(_, &c)| c > 0).map(|(&s, _)| s).max().unwrap_or(0)
    }
}

/// All `h`-subspaces of `F_q^r` with an index from reduced bases.
struct SubspaceTable {
    h: usize,
    flat: Vec<PVec>,
    index: HashMap<u128, u32>,
    radix: u128,
    r: usize,
}

impl SubspaceTable {
    fn new(pk: &Packed, r: usize, h: usize) -> Result<SubspaceTable, ClassifyError> {
        let radix = (pk.q() as u128).pow(r as u32);
        if radix.checked_pow(h as u32).is_none() {
            return Err(ClassifyError::TooLarge { q: pk.q(), r, h });
        }
        let flat = geometry::enumerate_subspaces(pk, r, h);
        let mut t = SubspaceTable { h, flat, index: HashMap::new(), radix, r };
        let n = t.len();
        t.index.reserve(n);
        for i in 0..n {
            let key = t.key(pk, t.rows(i as u32));
            t.index.insert(key, i as u32);
        }
        Ok(t)
    }

    fn len(&self) -> usize {
        self.flat.len() / self.h
    }

    fn rows(&self, i: u32) -> &[PVec] {
        &self.flat[i as usize * self.h..(i as usize + 1) * self.h]
    }

    fn key(&self, pk: &Packed, rref_rows: &[PVec]) -> u128 {
        rref_rows.iter().rev().fold(0u128, |acc, &v| acc * self.radix + pk.dense_index(v, self.r) as u128)
    }

    fn lookup(&self, pk: &Packed, rows: &[PVec]) -> u32 {
        let red = packed::rref(pk, rows);
        self.index[&self.key(pk, &red)]
    }
}

/// Arc condition of a parent, as `(span basis, required rank)` pairs that an
/// extension must satisfy when added.
struct ArcConstraints {
    spans: Vec<(Vec<PVec>, usize)>,
}

impl ArcConstraints {
    fn new(pk: &Packed, r: usize, h: usize, k: usize, elems: &[&[PVec]]) -> ArcConstraints {
        let mut spans = Vec::new();
        // Subsets T of size t ≤ k - 1: need dim span(T ∪ {x}) ≥ r - (k - 1 - t)·h.
        fn rec(
            pk: &Packed,
            elems: &[&[PVec]],
            start: usize,
            t: usize,
            cur: &mut Vec<PVec>,
            ctx: (usize, usize, usize),
            out: &mut Vec<(Vec<PVec>, usize)>,
        ) {
            let (r, h, k) = ctx;
            let need = r as i64 - ((k - 1 - t) * h) as i64;
            let basis = packed::rref(pk, cur);
            if need > basis.len() as i64 {
                out.push((basis, need as usize));
            }
            if t + 1 > k - 1 {
                return;
            }
            for i in start..elems.len() {
                let l = cur.len();
                cur.extend_from_slice(elems[i]);
                rec(pk, elems, i + 1, t + 1, cur, ctx, out);
                cur.truncate(l);
            }
        }
        rec(pk, elems, 0, 0, &mut Vec::new(), (r, h, k), &mut spans);
        ArcConstraints { spans }
    }

    fn admits(&self, pk: &Packed, x: &[PVec]) -> bool {
        let mut buf = [0 as PVec; 64];
        self.spans.iter().all(|(basis, need)| {
            let n = basis.len() + x.len();
            if n < *need {
                return false;
            }
            buf[..basis.len()].copy_from_slice(basis);
            buf[basis.len()..n].copy_from_slice(x);
            rank_in_place(pk, &mut buf[..n]) >= *need
        })
    }
}

fn rank_in_place(pk: &Packed, v: &mut [PVec]) -> usize {
    let mut rank = 0;
    for i in 0..v.len() {
        // Reduce v[i] against the pivot rows found so far.
        let mut x = v[i];
        for j in 0..rank {
            let p = pk.lead(v[j]).expect("pivot rows are nonzero");
            let c = pk.get(x, p);
            if c != 0 {
                x = pk.axpy(x, pk.neg_scalar(c), v[j]);
            }
        }
        if x != 0 {
            v[rank] = pk.normalize(x);
            rank += 1;
        }
    }
    rank
}

struct Engine {
    geo: PointGeometry,
    table: SubspaceTable,
    group: GroupKind,
    r: usize,
    h: usize,
    k: usize,
    filters: Filters,
}

/// Result of processing one parent.
struct Outcome {
    children: Vec<Vec<u32>>,
    census: Census,
}

impl Engine {
    fn pk(&self) -> &Packed {
        self.geo.packer()
    }

    fn elements(&self, rep: &[u32]) -> Vec<Vec<PVec>> {
        rep.iter().map(|&i| self.table.rows(i).to_vec()).collect()
    }

    fn extensions(&self, rep: &[u32]) -> Vec<u32> {
        let pk = self.pk();
        let elems: Vec<&[PVec]> = rep.iter().map(|&i| self.table.rows(i)).collect();
        let cons = ArcConstraints::new(pk, self.r, self.h, self.k, &elems);
        (0..self.table.len() as u32)
            .into_par_iter()
            .with_min_len(1024)
            .filter(|i| !rep.contains(i) && cons.admits(pk, self.table.rows(*i)))
            .collect()
    }

    fn image(&self, g: &[u32], x: u32) -> u32 {
        let pk = self.pk();
        let rows: Vec<PVec> = self.table.rows(x).iter().map(|&v| self.geo.point(g[self.geo.point_of(v) as usize])).collect();
        self.table.lookup(pk, &rows)
    }

    fn census(&self, rep: &[u32], complete: bool) -> Census {
        let disjoint = self.filters.disjoint && {
            let rows = self.elements(rep);
            geometry::pairwise_disjoint_packed(self.pk(), &rows)
        };
        Census {
            complete: complete as u64,
            disjoint: disjoint as u64,
            disjoint_complete: (disjoint && complete) as u64,
        }
    }

    fn process(&self, rep: &[u32], extend: bool) -> Outcome {
        let cands = self.extensions(rep);
        let census = self.census(rep, cands.is_empty());
        if !extend || cands.is_empty() {
            return Outcome { children: Vec::new(), census };
        }
        let canon = Canon::new(&self.geo, self.group, self.elements(rep));
        let gens = canon.search().gens;
        let np = self.geo.num_points();
        // Orbits of the extensions under the parent's automorphisms.
        let slot: HashMap<u32, u32> = cands.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
        let mut uf: Vec<u32> = (0..cands.len() as u32).collect();
        fn find(uf: &mut [u32], mut x: u32) -> u32 {
            while uf[x as usize] != x {
                let p = uf[x as usize];
                uf[x as usize] = uf[p as usize];
                x = p;
            }
            x
        }
        for g in &gens {
            let g = &g[..np];
            if g.iter().enumerate().all(|(i, &v)| i as u32 == v) {
                continue;
            }
            let images: Vec<u32> = cands.par_iter().with_min_len(256).map(|&x| slot[&self.image(g, x)]).collect();
            for (i, &j) in images.iter().enumerate() {
                let (a, b) = (find(&mut uf, i as u32), find(&mut uf, j));
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    uf[hi as usize] = lo;
                }
            }
        }
        let reps: Vec<u32> = (0..cands.len() as u32).filter(|&i| find(&mut uf, i) == i).map(|i| cands[i as usize]).collect();
        let children = reps
            .par_iter()
            .filter_map(|&x| {
                let mut child = rep.to_vec();
                child.push(x);
                child.sort_unstable();
                self.accepts(&child, x).then_some(child)
            })
            .collect();
        Outcome { children, census }
    }

    /// Canonical augmentation test for `child = parent + x`.
    fn accepts(&self, child: &[u32], x: u32) -> bool {
        let canon = Canon::new(&self.geo, self.group, self.elements(child));
        let root = canon.root();
        let base = canon.np + canon.nh;
        let xv = canon.elem_vertex(child.iter().position(|&e| e == x).expect("x is in the child"));
        let mut designated = (0, usize::MAX);
        for (s, l) in root.cells_in(base..canon.nv) {
            if l < designated.1 {
                designated = (s, l);
            }
        }
        if root.cell_of(xv).0 != designated.0 {
            return false;
        }
        if designated.1 == 1 {
            return true;
        }
        let res = canon.search();
        let m = *res.best_lab[base..]
            .iter()
            .find(|&&v| root.cell_of(v).0 == designated.0)
            .expect("designated cell is nonempty");
        let gens: Vec<&Vec<u32>> = res.gens.iter().collect();
        let orb = orbits_of(canon.nv, &gens);
        orb[xv as usize] == orb[m as usize]
    }

    fn system(&self, field: &Field, rep: &[u32]) -> ProjectiveSystem {
        let pk = self.pk();
        let subs = rep.iter().map(|&i| Subspace::from_packed(pk, self.r, self.table.rows(i))).collect();
        ProjectiveSystem::new(field, self.r, self.h, subs).expect("consistent parameters")
    }
}

/// Representatives of one level, resident or in a fixed-width file.
enum Level {
    Memory(Vec<Vec<u32>>),
    Disk { path: PathBuf, width: usize, count: usize, writer: Option<BufWriter<File>> },
}

impl Level {
    fn new(size: usize, spill: Option<&SpillPolicy>) -> Result<Level, ClassifyError> {
        match spill {
            Some(p) if size >= p.min_size && size > 0 => {
                std::fs::create_dir_all(&p.dir)?;
                let path = p.dir.join(format!("level-{size}.bin"));
                let writer = Some(BufWriter::new(File::create(&path)?));
                Ok(Level::Disk { path, width: size, count: 0, writer })
            }
            _ => Ok(Level::Memory(Vec::new())),
        }
    }

    fn len(&self) -> usize {
        match self {
            Level::Memory(v) => v.len(),
            Level::Disk { count, .. } => *count,
        }
    }

    fn push(&mut self, rep: Vec<u32>) -> Result<(), ClassifyError> {
        match self {
            Level::Memory(v) => v.push(rep),
            Level::Disk { count, writer, .. } => {
                let w = writer.as_mut().expect("level is still being written");
                for x in rep {
                    w.write_all(&x.to_le_bytes())?;
                }
                *count += 1;
            }
        }
        Ok(())
    }

    fn seal(&mut self) -> Result<(), ClassifyError> {
        if let Level::Disk { writer, .. } = self {
            if let Some(mut w) = writer.take() {
                w.flush()?;
            }
        }
        Ok(())
    }

    fn get_range(&self, from: usize, to: usize) -> Result<Vec<Vec<u32>>, ClassifyError> {
        match self {
            Level::Memory(v) => Ok(v[from..to].to_vec()),
            Level::Disk { path, width, .. } => {
                let mut f = BufReader::new(File::open(path)?);
                f.seek(SeekFrom::Start((from * width * 4) as u64))?;
                let mut buf = vec![0u8; (to - from) * width * 4];
                f.read_exact(&mut buf)?;
                let words: Vec<u32> = buf.chunks(4).map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
                Ok(words.chunks(*width).map(|c| c.to_vec()).collect())
            }
        }
    }
}

impl Drop for Level {
    fn drop(&mut self) {
        if let Level::Disk { path, .. } = self {
            let _ = std::fs::remove_file(path);
        }
    }
}

/// Parents per unit of work between budget checks and checkpoint records.
const CHUNK: usize = 512;

/// Classifies arcs of `h`-subspaces in `F_q^r` of every size up to `max_size`.
pub fn classify_arcs(
    q: u32,
    h: usize,
    r: usize,
    max_size: usize,
    filters: Filters,
    options: &ClassifyOptions,
) -> Result<ClassificationRun, ClassifyError> {
    if h == 0 || r <= h {
        return Err(ClassifyError::BadParameters { r, h });
    }
    let field = Field::of_order(q)?;
    let group = options.group.unwrap_or_else(|| GroupKind::default_for(&field));
    let run = || -> Result<ClassificationRun, ClassifyError> {
        let geo = PointGeometry::new(&field, r)?;
        let table = SubspaceTable::new(geo.packer(), r, h)?;
        let k = r.div_ceil(h);
        let engine = Engine { geo, table, group, r, h, k, filters };
        drive(&engine, &field, q, max_size, options)
    };
    if options.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.workers)
            .build()
            .map_err(|e| ClassifyError::Checkpoint(format!("thread pool: {e}")))?;
        pool.install(run)
    } else {
        run()
    }
}

fn drive(
    engine: &Engine,
    field: &Field,
    q: u32,
    max_size: usize,
    options: &ClassifyOptions,
) -> Result<ClassificationRun, ClassifyError> {
    let started = Instant::now();
    let header = Header {
        version: 1,
        q,
        h: engine.h,
        r: engine.r,
        max_size,
        group: engine.group,
        seed: options.seed,
    };
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut census: BTreeMap<usize, Census> = BTreeMap::new();
    let mut reps: BTreeMap<usize, Vec<ProjectiveSystem>> = BTreeMap::new();
    let keep = options.keep_reps.unwrap_or(0);

    // Restore from a checkpoint: completed levels, then completed chunks of the current one.
    let mut level = Level::new(0, None)?;
    level.push(Vec::new())?;
    level.seal()?;
    let mut size = 0usize;
    let mut next = Level::new(1, options.spill.as_ref())?;
    let mut resume_from = 0usize;
    let mut partial = Census::default();
    let mut writer = None;
    if let Some(path) = &options.checkpoint {
        if path.exists() {
            let (records, valid) = checkpoint::read(path)?;
            match records.first() {
                Some(Record::Header(h)) if *h == header => {}
                Some(Record::Header(_)) => {
                    return Err(ClassifyError::Checkpoint("header does not match the requested run".into()))
                }
                _ => return Err(ClassifyError::Checkpoint("missing header".into())),
            }
            for rec in &records[1..] {
                match rec {
                    Record::Header(_) => return Err(ClassifyError::Checkpoint("repeated header".into())),
                    Record::Chunk { size: s, from, to, census: c, children } => {
                        if *s != size || *from != resume_from || *to > level.len() {
                            return Err(ClassifyError::Checkpoint(format!("chunk {s}:{from}..{to} out of sequence")));
                        }
                        for ch in children {
                            next.push(ch.clone())?;
                        }
                        partial.add(c);
                        resume_from = *to;
                    }
                    Record::LevelDone { size: s } => {
                        if *s != size || resume_from != level.len() {
                            return Err(ClassifyError::Checkpoint(format!("level {s} marked done early")));
                        }
                        next.seal()?;
                        if size > 0 {
                            census.insert(size, partial);
                        }
                        size += 1;
                        counts.insert(size, next.len() as u64);
                        if size <= keep {
                            let v = next.get_range(0, next.len())?;
                            reps.insert(size, v.iter().map(|x| engine.system(field, x)).collect());
                        }
                        level = std::mem::replace(&mut next, Level::new(size + 1, options.spill.as_ref())?);
                        resume_from = 0;
                        partial = Census::default();
                    }
                }
            }
            log::info!("resuming at size {size}, parent {resume_from}");
            writer = Some(checkpoint::Writer::resume(path, valid)?);
        } else {
            writer = Some(checkpoint::Writer::create(path, &header)?);
        }
    }

    let collect_census = engine.filters.complete || engine.filters.disjoint;
    // The budget is checked only after a chunk, so every call makes progress.
    let mut progressed = false;
    loop {
        let extend = size < max_size;
        if !extend && !collect_census {
            break;
        }
        if level.len() == 0 && size > 0 {
            break;
        }
        let n = level.len();
        let mut order: Vec<usize> = (0..n).collect();
        if let Some(seed) = options.seed {
            order.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed ^ size as u64));
        }
        let mut from = resume_from;
        while from < n {
            if let Some(b) = options.budget.filter(|_| progressed) {
                if started.elapsed() > b {
                    return Err(ClassifyError::BudgetExceeded { size });
                }
            }
            let to = (from + CHUNK).min(n);
            let parents: Vec<Vec<u32>> = if options.seed.is_some() {
                order[from..to].iter().map(|&i| level.get_range(i, i + 1).map(|mut v| v.remove(0))).collect::<Result<_, _>>()?
            } else {
                level.get_range(from, to)?
            };
            let outcomes: Vec<Outcome> = parents.par_iter().map(|p| engine.process(p, extend)).collect();
            let mut c = Census::default();
            let mut children = Vec::new();
            for o in outcomes {
                c.add(&o.census);
                children.extend(o.children);
            }
            partial.add(&c);
            if let Some(w) = writer.as_mut() {
                w.append(&Record::Chunk { size, from, to, census: c, children: children.clone() })?;
            }
            for ch in children {
                next.push(ch)?;
            }
            log::info!("size {size}: {to}/{n} parents, {} children", next.len());
            from = to;
            progressed = true;
        }
        if size > 0 {
            census.insert(size, partial);
        }
        if !extend {
            break;
        }
        next.seal()?;
        if let Some(w) = writer.as_mut() {
            w.append(&Record::LevelDone { size })?;
        }
        size += 1;
        counts.insert(size, next.len() as u64);
        if size <= keep {
            let v = next.get_range(0, next.len())?;
            reps.insert(size, v.iter().map(|x| engine.system(field, x)).collect());
        }
        level = std::mem::replace(&mut next, Level::new(size + 1, options.spill.as_ref())?);
        resume_from = 0;
        partial = Census::default();
    }

    for s in 1..=max_size {
        counts.entry(s).or_insert(0);
        census.entry(s).or_default();
    }
    let pick = |on: bool, f: fn(&Census) -> u64| -> BTreeMap<usize, u64> {
        if on {
            census.iter().filter(|(&s, _)| s <= max_size).map(|(&s, c)| (s, f(c))).collect()
        } else {
            BTreeMap::new()
        }
    };
    let filters = engine.filters;
    Ok(ClassificationRun {
        q,
        h: engine.h,
        r: engine.r,
        k: engine.k,
        max_size,
        group: engine.group,
        filters,
        complete_counts: pick(filters.complete, |c| c.complete),
        disjoint_counts: pick(filters.disjoint, |c| c.disjoint),
        disjoint_complete_counts: pick(filters.complete && filters.disjoint, |c| c.disjoint_complete),
        counts,
        reps,
    })
}

/// Complete-class counts per size, recomputed from retained representatives.
pub fn completeness_census(run: &ClassificationRun) -> Result<BTreeMap<usize, u64>, GeometryError> {
    run.reps
        .iter()
        .map(|(&s, reps)| {
            let mut n = 0;
            for sys in reps {
                n += completeness_check(sys, run.k)? as u64;
            }
            Ok((s, n))
        })
        .collect()
}

fn completeness_check(sys: &ProjectiveSystem, k: usize) -> Result<bool, GeometryError> {
    Ok(geometry::completeness_check(sys, k)?.0)
}

/// Pairwise-disjoint class counts per size, recomputed from retained representatives.
pub fn disjointness_census(run: &ClassificationRun) -> Result<BTreeMap<usize, u64>, GeometryError> {
    run.reps
        .iter()
        .map(|(&s, reps)| {
            let mut n = 0;
            for sys in reps {
                n += geometry::pairwise_disjoint_check(sys)? as u64;
            }
            Ok((s, n))
        })
        .collect()
}
