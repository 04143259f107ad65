//! Additive codes: `F_q`-linear subspaces of `F_{q^h}^n` given by generator matrices.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldError, FieldTower};
use crate::geometry::{self, GeometryError, ProjectiveSystem, Subspace};
use crate::linalg::MatrixFq;
use crate::packed::{self, PVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("generator row {row} has length {got}, expected {expected}")]
    RowLength { row: usize, expected: usize, got: usize },
    #[error("entry {0} is not an element of the extension field")]
    BadEntry(u32),
    #[error("generator rows are F_q-dependent (rank {rank} < {rows})")]
    DependentRows { rank: usize, rows: usize },
    #[error("the zero code has no minimum distance")]
    ZeroCode,
    #[error("code is not MDS")]
    NotMds,
    #[error("projective system does not span F_q^{0}")]
    NotSpanning(usize),
    #[error("position {0} is out of range")]
    BadPosition(usize),
    #[error("system block width {system} differs from tower degree {tower}")]
    WidthMismatch { system: usize, tower: usize },
}

pub type Result<T> = std::result::Result<T, CodeError>;

/// An additive code over `F_{q^h}` with `r` `F_q`-independent generator rows.
///
/// `r = 0` is the zero code; every other code has `1 ≤ r0 ≤ h`.
#[derive(Clone)]
pub struct AdditiveCode {
    tower: Arc<FieldTower>,
    n: usize,
    r: usize,
    gen: Vec<u32>,
}

impl fmt::Debug for AdditiveCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "AdditiveCode q={} h={} r={} n={}", self.q(), self.h(), self.r, self.n)?;
        for i in 0..self.r {
            let row: Vec<String> = self.row(i).iter().map(|&x| self.tower.ext().format_element(x)).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MdsKind {
    Integral,
    Fractional,
    None,
}

impl fmt::Display for MdsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MdsKind::Integral => "integral",
            MdsKind::Fractional => "fractional",
            MdsKind::None => "none",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodeSummary {
    pub n: usize,
    pub r: usize,
    pub q: u32,
    pub h: usize,
    pub k: usize,
    pub d: usize,
    pub mds: MdsKind,
    pub faithful: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinDistanceAlgorithm {
    /// Gray-code walk over all `q^r - 1` nonzero codewords.
    Enumerate,
    /// `n` minus the hyperplane census maximum of the projective system.
    Hyperplane,
    /// Whichever of the two is cheaper.
    Auto,
}

pub fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

impl AdditiveCode {
    /// Builds a code; rows must be `F_q`-independent.
    pub fn new(tower: Arc<FieldTower>, n: usize, rows: Vec<Vec<u32>>) -> Result<AdditiveCode> {
        let code = AdditiveCode::unchecked(tower, n, rows)?;
        let rank = code.expand_generator().rank();
        if rank < code.r {
            return Err(CodeError::DependentRows { rank, rows: code.r });
        }
        Ok(code)
    }

    /// Builds a code from possibly dependent rows, keeping a maximal independent
    /// prefix-greedy subset; returns how many rows were dropped.
    pub fn reduced(tower: Arc<FieldTower>, n: usize, rows: Vec<Vec<u32>>) -> Result<(AdditiveCode, usize)> {
        let all = AdditiveCode::unchecked(tower.clone(), n, rows)?;
        let exp = all.expand_generator();
        let mut kept: Vec<Vec<u32>> = Vec::new();
        let mut acc = MatrixFq::zeros(tower.base(), 0, exp.cols());
        for i in 0..all.r {
            let row = MatrixFq::from_rows(tower.base(), exp.cols(), &[exp.row(i).to_vec()]).expect("shape");
            let next = acc.stack(&row).expect("shape");
            if next.rank() > acc.rank() {
                acc = next;
                kept.push(all.row(i).to_vec());
            }
        }
        let dropped = all.r - kept.len();
        if dropped > 0 {
            log::warn!("dropped {dropped} F_q-dependent generator row(s)");
        }
        Ok((AdditiveCode::unchecked(tower, n, kept)?, dropped))
    }

    fn unchecked(tower: Arc<FieldTower>, n: usize, rows: Vec<Vec<u32>>) -> Result<AdditiveCode> {
        let r = rows.len();
        let mut gen = Vec::with_capacity(r * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(CodeError::RowLength { row: i, expected: n, got: row.len() });
            }
            if let Some(&v) = row.iter().find(|&&v| v >= tower.ext().order()) {
                return Err(CodeError::BadEntry(v));
            }
            gen.extend(row);
        }
        Ok(AdditiveCode { tower, n, r, gen })
    }

    pub fn zero(tower: Arc<FieldTower>, n: usize) -> AdditiveCode {
        AdditiveCode { tower, n, r: 0, gen: Vec::new() }
    }

    /// All of `F_{q^h}^n`, generated by `b_c e_j` over the tower basis.
    pub fn full_space(tower: Arc<FieldTower>, n: usize) -> AdditiveCode {
        let h = tower.h();
        let mut rows = Vec::with_capacity(n * h);
        for j in 0..n {
            for c in 0..h {
                let mut row = vec![0; n];
                row[j] = tower.basis()[c];
                rows.push(row);
            }
        }
        AdditiveCode::unchecked(tower, n, rows).expect("consistent shape")
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn q(&self) -> u32 {
        self.tower.q()
    }
    pub fn h(&self) -> usize {
        self.tower.h()
    }
    /// `⌈r/h⌉`.
    pub fn k(&self) -> usize {
        ceil_div(self.r, self.h())
    }
    /// `r - (k-1)h`, in `1..=h` for nonzero codes.
    pub fn r0(&self) -> usize {
        if self.r == 0 {
            0
        } else {
            self.r - (self.k() - 1) * self.h()
        }
    }
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.gen[i * self.n + j]
    }
    pub fn row(&self, i: usize) -> &[u32] {
        &self.gen[i * self.n..(i + 1) * self.n]
    }
    pub fn rows(&self) -> Vec<Vec<u32>> {
        (0..self.r).map(|i| self.row(i).to_vec()).collect()
    }

    /// The `r × nh` matrix over `F_q` whose block `j` holds the basis expansions of column `j`.
    pub fn expand_generator(&self) -> MatrixFq {
        let h = self.h();
        let mut data = Vec::with_capacity(self.r * self.n * h);
        for i in 0..self.r {
            for j in 0..self.n {
                data.extend_from_slice(self.tower.expand(self.entry(i, j)));
            }
        }
        MatrixFq::from_flat(self.tower.base(), self.r, self.n * h, data).expect("consistent shape")
    }

    /// Block `j` of the expanded matrix as `h` packed column vectors of length `r`.
    fn block_columns(&self, pk: &packed::Packed, j: usize) -> Vec<PVec> {
        let h = self.h();
        let mut cols = vec![0; h];
        for i in 0..self.r {
            let e = self.tower.expand(self.entry(i, j));
            for (c, col) in cols.iter_mut().enumerate() {
                if e[c] != 0 {
                    *col = pk.set(*col, i, e[c]);
                }
            }
        }
        cols
    }

    fn block_rank(&self, j: usize) -> usize {
        let h = self.h();
        let mut data = Vec::with_capacity(self.r * h);
        for i in 0..self.r {
            data.extend_from_slice(self.tower.expand(self.entry(i, j)));
        }
        MatrixFq::from_flat(self.tower.base(), self.r, h, data).expect("shape").rank()
    }

    /// Row space of the expanded generator in RREF: equal iff the codes are equal.
    pub fn canonical_expanded(&self) -> MatrixFq {
        self.expand_generator().row_space_basis()
    }

    pub fn same_code(&self, other: &AdditiveCode) -> bool {
        self.n == other.n
            && self.r == other.r
            && self.tower.base() == other.tower.base()
            && self.tower.ext() == other.tower.ext()
            && self.canonical_expanded() == other.canonical_expanded()
    }

    /// The codeword `Σ a_i g_i` for `a ∈ F_q^r`.
    pub fn codeword(&self, a: &[u32]) -> Vec<u32> {
        let ext = self.tower.ext();
        let mut w = vec![0; self.n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let s = self.tower.embed(ai);
            for (j, x) in w.iter_mut().enumerate() {
                *x = ext.add(*x, ext.mul(s, self.entry(i, j)));
            }
        }
        w
    }
}

/// The projective system: element `j` is the column space of block `j`.
pub fn system_from_code(c: &AdditiveCode) -> Result<ProjectiveSystem> {
    let pk = geometry::packer_for(c.tower.base(), c.r)?;
    let els = (0..c.n).map(|j| Subspace::from_packed(&pk, c.r, &c.block_columns(&pk, j))).collect();
    Ok(ProjectiveSystem::new(c.tower.base(), c.r, c.h(), els)?)
}

/// A code whose block column spaces are the elements of `sys` (bases padded with zero columns).
pub fn code_from_system(sys: &ProjectiveSystem, tower: Arc<FieldTower>) -> Result<AdditiveCode> {
    if sys.field() != tower.base() {
        return Err(CodeError::Geometry(GeometryError::FieldMismatch));
    }
    let h = tower.h();
    let r = sys.r();
    if sys.h() > h {
        return Err(CodeError::WidthMismatch { system: sys.h(), tower: h });
    }
    let n = sys.len();
    let mut rows = vec![vec![0u32; n]; r];
    let mut coords = vec![0u32; h];
    for (j, e) in sys.elements().iter().enumerate() {
        if e.dim() > h {
            return Err(GeometryError::DimensionOverflow { dim: e.dim(), h }.into());
        }
        for (i, row) in rows.iter_mut().enumerate() {
            coords.iter_mut().for_each(|c| *c = 0);
            for c in 0..e.dim() {
                coords[c] = e.basis().get(c, i);
            }
            row[j] = tower.contract_unchecked(&coords);
        }
    }
    let span = geometry::span_in(sys.field(), r, sys.elements())?;
    if span.dim() < r {
        return Err(CodeError::NotSpanning(r));
    }
    AdditiveCode::new(tower, n, rows)
}

/// Minimum Hamming weight of a nonzero codeword.
pub fn min_distance(c: &AdditiveCode, algorithm: MinDistanceAlgorithm) -> Result<usize> {
    if c.r == 0 {
        return Err(CodeError::ZeroCode);
    }
    let algorithm = match algorithm {
        MinDistanceAlgorithm::Auto => choose_algorithm(c),
        a => a,
    };
    match algorithm {
        MinDistanceAlgorithm::Hyperplane => {
            let sys = system_from_code(c)?;
            Ok(c.n - geometry::max_hyperplane_count(&sys)?)
        }
        _ => Ok(min_distance_enumerate(c)),
    }
}

fn choose_algorithm(c: &AdditiveCode) -> MinDistanceAlgorithm {
    let q = c.q() as f64;
    let packable = c.q() <= 256 && geometry::packer_for(c.tower.base(), c.r).is_ok();
    let enum_cost = q.powi(c.r as i32) * c.n as f64;
    let hyp_cost = q.powi(c.r as i32) + c.n as f64 * (q.powi((c.r as i32 - c.h() as i32).max(0)) + (c.r * c.h()) as f64);
    let memory_ok = q.powi(c.r as i32) <= (1u64 << 30) as f64;
    if packable && memory_ok && hyp_cost < enum_cost {
        MinDistanceAlgorithm::Hyperplane
    } else {
        MinDistanceAlgorithm::Enumerate
    }
}

fn min_distance_enumerate(c: &AdditiveCode) -> usize {
    let ext = c.tower.ext();
    let base = c.tower.base();
    let p = base.p() as u64;
    // Additive generators over F_p: ω^t·g_i for t < e.
    let gens: Vec<Vec<u32>> = (0..c.r)
        .flat_map(|i| (0..base.e() as u64).map(move |t| (i, t)))
        .map(|(i, t)| {
            let s = c.tower.embed(base.exp(t));
            c.row(i).iter().map(|&g| ext.mul(s, g)).collect()
        })
        .collect();
    let total = p.pow(gens.len() as u32);
    let mut word = vec![0u32; c.n];
    let mut weight = 0usize;
    let mut best = usize::MAX;
    // Modular p-ary Gray code: step t -> t+1 adds generator j, where j counts
    // the trailing (p-1) base-p digits of t.
    for t in 0..total - 1 {
        let mut x = t;
        let mut j = 0;
        while x % p == p - 1 {
            x /= p;
            j += 1;
        }
        for (w, &g) in word.iter_mut().zip(&gens[j]) {
            if g == 0 {
                continue;
            }
            let was = *w != 0;
            *w = ext.add(*w, g);
            match (was, *w != 0) {
                (false, true) => weight += 1,
                (true, false) => weight -= 1,
                _ => {}
            }
        }
        best = best.min(weight);
    }
    best
}

/// Every block of the expanded generator has rank `h`.
pub fn is_faithful(c: &AdditiveCode) -> bool {
    (0..c.n).all(|j| c.block_rank(j) == c.h())
}

pub fn mds_status(c: &AdditiveCode) -> Result<CodeSummary> {
    let d = min_distance(c, MinDistanceAlgorithm::Auto)?;
    let k = c.k();
    let mds = if k + d == c.n + 1 {
        if c.r % c.h() == 0 {
            MdsKind::Integral
        } else {
            MdsKind::Fractional
        }
    } else {
        MdsKind::None
    };
    Ok(CodeSummary { n: c.n, r: c.r, q: c.q(), h: c.h(), k, d, mds, faithful: is_faithful(c) })
}

/// Extends every element to dimension `h` by appending the first standard
/// basis vectors not yet in its span.
pub fn make_faithful(sys: &ProjectiveSystem) -> Result<ProjectiveSystem> {
    let (r, h) = (sys.r(), sys.h());
    if h > r {
        return Err(GeometryError::DimensionOverflow { dim: h, h: r }.into());
    }
    let pk = sys.packer()?;
    let els = sys
        .elements()
        .iter()
        .map(|e| {
            let mut ech = packed::Echelon::new();
            let mut rows = e.packed_rows(&pk);
            rows.iter().for_each(|&v| {
                ech.insert(&pk, v);
            });
            for i in 0..r {
                if ech.rank() == h {
                    break;
                }
                let u = pk.set(0, i, 1);
                if ech.insert(&pk, u) {
                    rows.push(u);
                }
            }
            Subspace::from_packed(&pk, r, &rows)
        })
        .collect();
    Ok(ProjectiveSystem::new(sys.field(), r, h, els)?)
}

/// Gram matrix `T[a][b] = tr(b_a b_b)` of the trace form on the tower basis.
fn trace_gram(t: &FieldTower) -> Vec<u32> {
    let h = t.h();
    let b = t.basis();
    let mut g = vec![0; h * h];
    for i in 0..h {
        for j in 0..h {
            g[i * h + j] = t.trace_down(t.ext().mul(b[i], b[j]));
        }
    }
    g
}

/// The trace dual `{v : tr(u·v) = 0 for all u ∈ C}`, generator in RREF of its expansion.
pub fn dual(c: &AdditiveCode) -> AdditiveCode {
    let t = &c.tower;
    let base = t.base();
    let h = t.h();
    let gram = trace_gram(t);
    let cols = c.n * h;
    let mut data = vec![0u32; c.r * cols];
    for i in 0..c.r {
        for j in 0..c.n {
            let e = t.expand(c.entry(i, j));
            for b in 0..h {
                let mut acc = 0;
                for (a, &ea) in e.iter().enumerate() {
                    acc = base.add(acc, base.mul(ea, gram[a * h + b]));
                }
                data[i * cols + j * h + b] = acc;
            }
        }
    }
    let m = MatrixFq::from_flat(base, c.r, cols, data).expect("shape");
    let ker = m.nullspace();
    contract_rows(t.clone(), c.n, &ker)
}

fn contract_rows(t: Arc<FieldTower>, n: usize, m: &MatrixFq) -> AdditiveCode {
    let h = t.h();
    let rows = (0..m.rows())
        .map(|i| (0..n).map(|j| t.contract_unchecked(&m.row(i)[j * h..(j + 1) * h])).collect())
        .collect();
    AdditiveCode::unchecked(t, n, rows).expect("consistent shape")
}

/// Result of a geometric quotient.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub code: AdditiveCode,
    /// `|C/J| ≥ q^h`.
    pub non_obliterating: bool,
}

fn check_positions(c: &AdditiveCode, j: &[usize]) -> Result<Vec<usize>> {
    let mut s: Vec<usize> = j.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&bad) = s.iter().find(|&&x| x >= c.n) {
        return Err(CodeError::BadPosition(bad));
    }
    Ok(s)
}

/// Codewords vanishing on the (0-based) positions `j`, with those positions deleted.
pub fn geometric_quotient(c: &AdditiveCode, j: &[usize]) -> Result<Quotient> {
    let j = check_positions(c, j)?;
    let t = &c.tower;
    let h = t.h();
    let base = t.base();
    // Left kernel of the J-blocks: a with a·G̃|_J = 0, as the kernel of the transpose.
    let mut data = Vec::with_capacity(j.len() * h * c.r);
    for &pos in &j {
        for col in 0..h {
            for i in 0..c.r {
                data.push(t.expand(c.entry(i, pos))[col]);
            }
        }
    }
    let at = MatrixFq::from_flat(base, j.len() * h, c.r, data).expect("shape");
    let ker = if j.is_empty() { MatrixFq::identity(base, c.r) } else { at.nullspace() };
    let keep: Vec<usize> = (0..c.n).filter(|x| j.binary_search(x).is_err()).collect();
    let rows: Vec<Vec<u32>> = (0..ker.rows())
        .map(|i| {
            let w = c.codeword(ker.row(i));
            keep.iter().map(|&p| w[p]).collect()
        })
        .collect();
    let rj = rows.len();
    let code = AdditiveCode::unchecked(t.clone(), keep.len(), rows)?;
    Ok(Quotient { code, non_obliterating: rj >= h })
}

/// Outcome of the dual MDS criterion; `witness` is an unfaithful non-obliterating
/// quotient, absent when `d = 1` already rules out a faithful dual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualMdsCriterion {
    pub holds: bool,
    pub witness: Option<Vec<usize>>,
}

/// Whether every non-obliterating geometric quotient of the MDS code `c` is faithful,
/// which is equivalent to the dual being a faithful MDS code.
pub fn dual_mds_criterion(c: &AdditiveCode) -> Result<DualMdsCriterion> {
    let s = mds_status(c)?;
    if s.mds == MdsKind::None {
        return Err(CodeError::NotMds);
    }
    // d = 1 makes the dual unfaithful; the quotient argument needs d ≥ 2.
    if s.d == 1 {
        return Ok(DualMdsCriterion { holds: false, witness: None });
    }
    // Quotient dimension only shrinks as J grows, so obliterating J prune the search.
    fn rec(c: &AdditiveCode, start: usize, j: &mut Vec<usize>) -> Result<Option<Vec<usize>>> {
        let qt = geometric_quotient(c, j)?;
        if !qt.non_obliterating {
            return Ok(None);
        }
        if !is_faithful(&qt.code) {
            return Ok(Some(j.clone()));
        }
        for x in start..c.n {
            j.push(x);
            let w = rec(c, x + 1, j)?;
            j.pop();
            if w.is_some() {
                return Ok(w);
            }
        }
        Ok(None)
    }
    let witness = rec(c, 0, &mut Vec::new())?;
    Ok(DualMdsCriterion { holds: witness.is_none(), witness })
}

/// Deletes the (0-based) positions `j`; dependent rows are dropped and the count returned.
pub fn puncture(c: &AdditiveCode, j: &[usize]) -> Result<(AdditiveCode, usize)> {
    let j = check_positions(c, j)?;
    let keep: Vec<usize> = (0..c.n).filter(|x| j.binary_search(x).is_err()).collect();
    let rows = (0..c.r).map(|i| keep.iter().map(|&p| c.entry(i, p)).collect()).collect();
    AdditiveCode::reduced(c.tower.clone(), keep.len(), rows)
}
