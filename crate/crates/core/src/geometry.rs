//! Subspaces of `F_q^r`, projective systems and the geometric checks on them.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::field::Field;
use crate::linalg::{LinalgError, MatrixFq};
use crate::packed::{self, Echelon, PVec, Packed};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("ambient dimensions differ ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("element of dimension {dim} exceeds block width {h}")]
    DimensionOverflow { dim: usize, h: usize },
    #[error("k must be at least 1")]
    BadK,
    #[error("dimension {r} is too large for packed vectors over F_{q}")]
    TooLarge { q: u32, r: usize },
    #[error("fields differ")]
    FieldMismatch,
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// A subspace of `F_q^r` stored by its reduced row echelon basis (no zero rows).
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: MatrixFq,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.basis.row_vecs().iter().map(|r| r.iter().map(|d| d.to_string()).collect()).collect();
        write!(f, "<{}>", rows.join(","))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subspace {
    /// Row-major lexicographic comparison of the canonical bases.
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient.cmp(&other.ambient).then_with(|| self.basis.data().cmp(other.basis.data()))
    }
}

impl std::hash::Hash for Subspace {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.basis.data().hash(state);
    }
}

impl Subspace {
    /// Row space of `rows` (any spanning set).
    pub fn from_rows(field: &Field, ambient: usize, rows: &[Vec<u32>]) -> Result<Subspace> {
        let m = MatrixFq::from_rows(field, ambient, rows)?;
        Ok(Subspace { ambient, basis: m.row_space_basis() })
    }

    pub fn from_matrix(m: &MatrixFq) -> Subspace {
        Subspace { ambient: m.cols(), basis: m.row_space_basis() }
    }

    pub fn zero(field: &Field, ambient: usize) -> Subspace {
        Subspace { ambient, basis: MatrixFq::zeros(field, 0, ambient) }
    }

    pub fn full(field: &Field, ambient: usize) -> Subspace {
        Subspace { ambient, basis: MatrixFq::identity(field, ambient) }
    }

    pub fn from_packed(pk: &Packed, ambient: usize, rows: &[PVec]) -> Subspace {
        let red = packed::rref(pk, rows);
        let data: Vec<u32> = red.iter().flat_map(|&v| pk.to_vec(v, ambient)).collect();
        let basis = MatrixFq::from_flat(pk.field(), red.len(), ambient, data).expect("consistent shape");
        Subspace { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn basis(&self) -> &MatrixFq {
        &self.basis
    }
    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn packed_rows(&self, pk: &Packed) -> Vec<PVec> {
        (0..self.dim()).map(|i| pk.from_slice(self.basis.row(i))).collect()
    }

    pub fn contains_vector(&self, v: &[u32]) -> bool {
        self.basis.row_space_contains(v)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        subspace_span(&[self.clone(), other.clone()]).map(|s| s.dim() == self.dim()).unwrap_or(false)
    }

    pub fn intersects_trivially(&self, other: &Subspace) -> bool {
        subspace_span(&[self.clone(), other.clone()]).map(|s| s.dim() == self.dim() + other.dim()).unwrap_or(false)
    }

    /// Image under `v ↦ v·M` for an `r × r'` matrix.
    pub fn transform(&self, m: &MatrixFq) -> Result<Subspace> {
        let img = self.basis.mul(m)?;
        Ok(Subspace::from_matrix(&img))
    }
}

/// A hyperplane `{x : a·x = 0}`, normal vector normalized to leading coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hyperplane {
    pub normal: Vec<u32>,
}

/// An ordered multiset of subspaces of `F_q^r`, each of dimension at most `h`.
#[derive(Clone, PartialEq, Eq)]
pub struct ProjectiveSystem {
    field: Field,
    r: usize,
    h: usize,
    elements: Vec<Subspace>,
}

impl fmt::Debug for ProjectiveSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjectiveSystem(q={}, r={}, h={}, {:?})", self.field.order(), self.r, self.h, self.elements)
    }
}

impl ProjectiveSystem {
    pub fn new(field: &Field, r: usize, h: usize, mut elements: Vec<Subspace>) -> Result<ProjectiveSystem> {
        for e in &elements {
            if e.ambient() != r {
                return Err(GeometryError::AmbientMismatch(r, e.ambient()));
            }
            if e.dim() > h {
                return Err(GeometryError::DimensionOverflow { dim: e.dim(), h });
            }
            if e.field() != field {
                return Err(GeometryError::FieldMismatch);
            }
        }
        elements.sort();
        Ok(ProjectiveSystem { field: field.clone(), r, h, elements })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn h(&self) -> usize {
        self.h
    }
    pub fn elements(&self) -> &[Subspace] {
        &self.elements
    }
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn packer(&self) -> Result<Packed> {
        packer_for(&self.field, self.r)
    }

    /// Image under `v ↦ v·M` for an invertible `r × r` matrix.
    pub fn transform(&self, m: &MatrixFq) -> Result<ProjectiveSystem> {
        let els = self.elements.iter().map(|e| e.transform(m)).collect::<Result<Vec<_>>>()?;
        ProjectiveSystem::new(&self.field, self.r, self.h, els)
    }

    pub fn with_element(&self, x: Subspace) -> Result<ProjectiveSystem> {
        let mut els = self.elements.clone();
        els.push(x);
        ProjectiveSystem::new(&self.field, self.r, self.h, els)
    }
}

/// Packed arithmetic for vectors of length `r` over `field`, if supported.
pub fn packer_for(field: &Field, r: usize) -> Result<Packed> {
    if field.order() > 256 {
        return Err(GeometryError::TooLarge { q: field.order(), r });
    }
    let pk = Packed::new(field);
    if r > pk.max_dim() {
        return Err(GeometryError::TooLarge { q: field.order(), r });
    }
    Ok(pk)
}

/// Smallest subspace containing every part.
pub fn subspace_span(parts: &[Subspace]) -> Result<Subspace> {
    let Some(first) = parts.first() else {
        return Err(GeometryError::AmbientMismatch(0, 0));
    };
    let r = first.ambient();
    let mut rows = Vec::new();
    for p in parts {
        if p.ambient() != r {
            return Err(GeometryError::AmbientMismatch(r, p.ambient()));
        }
        rows.extend(p.basis().row_vecs());
    }
    Subspace::from_rows(first.field(), r, &rows)
}

/// Span of `parts` in `F_q^r`; the empty span is the zero subspace.
pub fn span_in(field: &Field, r: usize, parts: &[Subspace]) -> Result<Subspace> {
    if parts.is_empty() {
        return Ok(Subspace::zero(field, r));
    }
    subspace_span(parts)
}

/// Containment counts for every hyperplane, in the order of [`hyperplanes`].
#[derive(Clone, Debug)]
pub struct HyperplaneCensus {
    pub hyperplanes: Vec<Hyperplane>,
    pub counts: Vec<usize>,
    pub max: usize,
}

/// All hyperplane normals of `F_q^r` (leading coordinate 1), ordered by
/// position of the leading coordinate and then by combination order.
pub fn hyperplane_normals(pk: &Packed, r: usize) -> Vec<PVec> {
    let unit: Vec<PVec> = (0..r).map(|i| pk.set(0, i, 1)).collect();
    let mut out = Vec::new();
    packed::for_each_projective_point(pk, &unit, |v| out.push(v));
    out
}

pub fn hyperplanes(sys: &ProjectiveSystem) -> Result<Vec<Hyperplane>> {
    let pk = sys.packer()?;
    Ok(hyperplane_normals(&pk, sys.r).into_iter().map(|v| Hyperplane { normal: pk.to_vec(v, sys.r) }).collect())
}

/// Per-hyperplane containment counts (materializes every hyperplane).
pub fn hyperplane_census(sys: &ProjectiveSystem) -> Result<HyperplaneCensus> {
    let pk = sys.packer()?;
    let normals = hyperplane_normals(&pk, sys.r);
    let rows: Vec<Vec<PVec>> = sys.elements.iter().map(|e| e.packed_rows(&pk)).collect();
    let counts: Vec<usize> = normals
        .iter()
        .map(|&a| rows.iter().filter(|b| b.iter().all(|&v| pk.dot(a, v) == 0)).count())
        .collect();
    let max = counts.iter().copied().max().unwrap_or(0);
    let hyperplanes = normals.into_iter().map(|v| Hyperplane { normal: pk.to_vec(v, sys.r) }).collect();
    Ok(HyperplaneCensus { hyperplanes, counts, max })
}

/// Maximum number of elements in a common hyperplane.
///
/// Counts, for every nonzero vector `a`, the elements inside `a^⊥`, by walking
/// each element's annihilator; memory is `q^r` counters.
pub fn max_hyperplane_count(sys: &ProjectiveSystem) -> Result<usize> {
    let pk = sys.packer()?;
    let rows: Vec<Vec<PVec>> = sys.elements.iter().map(|e| e.packed_rows(&pk)).collect();
    Ok(max_hyperplane_count_packed(&pk, sys.r, &rows))
}

pub fn max_hyperplane_count_packed(pk: &Packed, r: usize, elements: &[Vec<PVec>]) -> usize {
    if elements.is_empty() || r == 0 {
        return elements.len();
    }
    let size = (pk.q() as usize).pow(r as u32);
    if elements.len() < u16::MAX as usize {
        census_max::<u16>(pk, r, elements, size)
    } else {
        census_max::<u32>(pk, r, elements, size)
    }
}

trait Counter: Copy + Default + Ord {
    fn bump(&mut self);
    fn to_usize(self) -> usize;
}
impl Counter for u16 {
    #[inline]
    fn bump(&mut self) {
        *self += 1;
    }
    fn to_usize(self) -> usize {
        self as usize
    }
}
impl Counter for u32 {
    #[inline]
    fn bump(&mut self) {
        *self += 1;
    }
    fn to_usize(self) -> usize {
        self as usize
    }
}

fn census_max<C: Counter>(pk: &Packed, r: usize, elements: &[Vec<PVec>], size: usize) -> usize {
    let mut counts = vec![C::default(); size];
    for rows in elements {
        let ann = packed::perp(pk, rows, r);
        packed::for_each_nonzero_combination(pk, &ann, |a| counts[pk.dense_index(a, r)].bump());
    }
    counts[1..].iter().copied().max().map(C::to_usize).unwrap_or(0)
}

/// Every `k`-subset of elements spans `F_q^r`; repeated elements fail when `k ≥ 2`.
pub fn arc_check(sys: &ProjectiveSystem, k: usize) -> Result<bool> {
    if k < 1 {
        return Err(GeometryError::BadK);
    }
    if k >= 2 && sys.elements.windows(2).any(|w| w[0] == w[1]) {
        return Ok(false);
    }
    let pk = sys.packer()?;
    let rows: Vec<Vec<PVec>> = sys.elements.iter().map(|e| e.packed_rows(&pk)).collect();
    Ok(all_k_subsets_span(&pk, sys.r, &rows, k))
}

fn all_k_subsets_span(pk: &Packed, r: usize, rows: &[Vec<PVec>], k: usize) -> bool {
    fn rec(pk: &Packed, r: usize, rows: &[Vec<PVec>], start: usize, left: usize, ech: &Echelon) -> bool {
        if left == 0 {
            return ech.rank() == r;
        }
        for i in start..=rows.len() - left {
            let mut e = ech.clone();
            for &v in &rows[i] {
                e.insert(pk, v);
            }
            if !rec(pk, r, rows, i + 1, left - 1, &e) {
                return false;
            }
        }
        true
    }
    if rows.len() < k {
        return true;
    }
    rec(pk, r, rows, 0, k, &Echelon::new())
}

/// All `h`-dimensional subspaces of `F_q^r` as RREF bases, flattened with stride `h`.
///
/// Order: pivot column sets in lexicographic order, then free entries.
pub fn enumerate_subspaces(pk: &Packed, r: usize, h: usize) -> Vec<PVec> {
    let mut out = Vec::new();
    if h == 0 || h > r {
        return out;
    }
    let q = pk.q() as u64;
    let mut pivots: Vec<usize> = (0..h).collect();
    loop {
        // Free slots: (row, column) with column right of the row's pivot and not a pivot.
        let mut free = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for c in p + 1..r {
                if !pivots.contains(&c) {
                    free.push((i, c));
                }
            }
        }
        let total = q.pow(free.len() as u32);
        for code in 0..total {
            let mut rows: Vec<PVec> = pivots.iter().map(|&p| pk.set(0, p, 1)).collect();
            let mut x = code;
            for &(i, c) in free.iter().rev() {
                let d = (x % q) as u32;
                x /= q;
                if d != 0 {
                    rows[i] = pk.set(rows[i], c, d);
                }
            }
            out.extend_from_slice(&rows);
        }
        // Next combination.
        let mut i = h;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pivots[i] < r - h + i {
                break;
            }
        }
        pivots[i] += 1;
        for j in i + 1..h {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
}

/// Whether `sys` admits no extension by a further `h`-dimensional subspace
/// keeping the arc property; the extending subspaces are returned otherwise.
pub fn completeness_check(sys: &ProjectiveSystem, k: usize) -> Result<(bool, Vec<Subspace>)> {
    if k < 1 {
        return Err(GeometryError::BadK);
    }
    if sys.h == 0 {
        return Ok((true, Vec::new()));
    }
    let pk = sys.packer()?;
    let (r, h) = (sys.r, sys.h);
    let rows: Vec<Vec<PVec>> = sys.elements.iter().map(|e| e.packed_rows(&pk)).collect();
    // Spans of all (k-1)-subsets; a new element must complete each of them to F_q^r.
    let mut spans: Vec<Echelon> = Vec::new();
    fn collect(pk: &Packed, rows: &[Vec<PVec>], start: usize, left: usize, ech: &Echelon, out: &mut Vec<Echelon>) {
        if left == 0 {
            out.push(ech.clone());
            return;
        }
        for i in start..rows.len() {
            if rows.len() - i < left {
                break;
            }
            let mut e = ech.clone();
            for &v in &rows[i] {
                e.insert(pk, v);
            }
            collect(pk, rows, i + 1, left - 1, &e, out);
        }
    }
    if k >= 2 && rows.len() >= k - 1 {
        collect(&pk, &rows, 0, k - 1, &Echelon::new(), &mut spans);
    }
    let existing: std::collections::HashSet<Vec<PVec>> =
        rows.iter().map(|r| packed::rref(&pk, r)).collect();
    let all = enumerate_subspaces(&pk, r, h);
    let mut witnesses = Vec::new();
    for cand in all.chunks(h) {
        if k >= 2 && existing.contains(cand) {
            continue;
        }
        let ok = if k == 1 {
            // Every single element must span on its own.
            h == r
        } else {
            spans.iter().all(|s| {
                let mut e = s.clone();
                for &v in cand {
                    e.insert(&pk, v);
                }
                e.rank() == r
            })
        };
        if ok {
            witnesses.push(Subspace::from_packed(&pk, r, cand));
        }
    }
    Ok((witnesses.is_empty(), witnesses))
}

/// Every two elements meet trivially.
pub fn pairwise_disjoint_check(sys: &ProjectiveSystem) -> Result<bool> {
    let pk = sys.packer()?;
    let rows: Vec<Vec<PVec>> = sys.elements.iter().map(|e| e.packed_rows(&pk)).collect();
    Ok(pairwise_disjoint_packed(&pk, &rows))
}

pub fn pairwise_disjoint_packed(pk: &Packed, rows: &[Vec<PVec>]) -> bool {
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let mut e = Echelon::new();
            for &v in rows[i].iter().chain(&rows[j]) {
                e.insert(pk, v);
            }
            if e.rank() != rows[i].len() + rows[j].len() {
                return false;
            }
        }
    }
    true
}

/// Linear map `F_q^r → F_q^{r - dim u}` with kernel `u`: reduce modulo the RREF
/// basis of `u`, then keep the non-pivot coordinates.
pub struct QuotientMap {
    pk: Packed,
    red: Vec<PVec>,
    pivots: Vec<usize>,
    keep: Vec<usize>,
}

impl QuotientMap {
    pub fn new(pk: &Packed, r: usize, u: &[PVec]) -> QuotientMap {
        let red = packed::rref(pk, u);
        let pivots: Vec<usize> = red.iter().map(|&v| pk.lead(v).expect("nonzero row")).collect();
        let keep = (0..r).filter(|c| !pivots.contains(c)).collect();
        QuotientMap { pk: pk.clone(), red, pivots, keep }
    }

    pub fn target_dim(&self) -> usize {
        self.keep.len()
    }

    pub fn apply(&self, mut v: PVec) -> PVec {
        let pk = &self.pk;
        for (row, &p) in self.red.iter().zip(&self.pivots) {
            let c = pk.get(v, p);
            if c != 0 {
                v = pk.axpy(v, pk.neg_scalar(c), *row);
            }
        }
        self.keep.iter().enumerate().fold(0, |out, (i, &c)| pk.set(out, i, pk.get(v, c)))
    }
}

/// `⟨A, u⟩/u` for every element `A`; elements inside `u` are dropped.
pub fn quotient_geometry(sys: &ProjectiveSystem, u: &Subspace) -> Result<ProjectiveSystem> {
    if u.ambient() != sys.r {
        return Err(GeometryError::AmbientMismatch(sys.r, u.ambient()));
    }
    let pk = sys.packer()?;
    let map = QuotientMap::new(&pk, sys.r, &u.packed_rows(&pk));
    let r2 = map.target_dim();
    let mut els = Vec::new();
    for e in &sys.elements {
        let img: Vec<PVec> = e.packed_rows(&pk).into_iter().map(|v| map.apply(v)).collect();
        let s = Subspace::from_packed(&pk, r2, &img);
        if s.dim() > 0 {
            els.push(s);
        }
    }
    ProjectiveSystem::new(&sys.field, r2, sys.h, els)
}
