//! Explicit families of additive MDS codes and their geometric ingredients.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::code::{AdditiveCode, CodeError};
use crate::field::{Field, FieldError, FieldTower};
use crate::geometry::{self, Subspace};
use crate::linalg::MatrixFq;
use crate::packed::{self, PVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error("need at least one coefficient set")]
    NoSets,
    #[error("k - 1 = {0} exceeds the number of evaluation points")]
    DegreeTooLarge(usize),
    #[error("coefficient set {0} is not F_q-independent")]
    DependentSet(usize),
    #[error("r0 = {r0} does not divide h = {h}")]
    R0NotDividing { r0: u32, h: u32 },
    #[error("k = {k} exceeds q^h - 1 = {cap}")]
    KTooLarge { k: usize, cap: usize },
    #[error("subspaces {0} and {1} intersect nontrivially")]
    Intersecting(String, String),
    #[error("subspace {0} has dimension {1}, expected at most {2}")]
    BadDimension(String, usize, usize),
    #[error("parameters must be positive")]
    NonPositive,
}

pub type Result<T> = std::result::Result<T, ConstructError>;

/// Additive subsets `S_0..S_{k-1}` of `F_{q^h}`, each given by an `F_q`-basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSets {
    pub sets: Vec<Vec<u32>>,
}

impl CoefficientSets {
    /// `k - 1` copies of the whole field followed by the span of the first `r0` basis elements.
    pub fn standard(tower: &FieldTower, k: usize, r0: usize) -> CoefficientSets {
        let full: Vec<u32> = tower.basis().to_vec();
        let mut sets = vec![full; k.saturating_sub(1)];
        sets.push(tower.basis()[..r0].to_vec());
        CoefficientSets { sets }
    }

    fn check(&self, tower: &FieldTower) -> Result<()> {
        for (i, s) in self.sets.iter().enumerate() {
            let rows: Vec<Vec<u32>> = s.iter().map(|&x| tower.expand(x).to_vec()).collect();
            let m = MatrixFq::from_rows(tower.base(), tower.h(), &rows).map_err(|_| ConstructError::DependentSet(i))?;
            if m.rank() < s.len() {
                return Err(ConstructError::DependentSet(i));
            }
        }
        Ok(())
    }
}

/// `{(f(a_1), …, f(a_{q^h}), c_{k-1}) : f = Σ c_i x^i, c_i ∈ S_i}`, evaluation points in encoding order.
pub fn additive_reed_solomon(tower: Arc<FieldTower>, coeffs: &CoefficientSets) -> Result<AdditiveCode> {
    let k = coeffs.sets.len();
    if k == 0 {
        return Err(ConstructError::NoSets);
    }
    let ext = tower.ext().clone();
    let qh = ext.order() as usize;
    if k - 1 >= qh {
        return Err(ConstructError::DegreeTooLarge(k - 1));
    }
    coeffs.check(&tower)?;
    let n = qh + 1;
    let mut rows = Vec::new();
    for (i, set) in coeffs.sets.iter().enumerate() {
        for &s in set {
            let mut row: Vec<u32> = (0..qh as u32)
                .map(|a| ext.mul(s, ext.pow(a, i as i64).expect("nonnegative exponent")))
                .collect();
            row.push(if i == k - 1 { s } else { 0 });
            rows.push(row);
        }
    }
    Ok(AdditiveCode::new(tower, n, rows)?)
}

/// Splits `q` into `(p, e)` and builds `F_{q^m}` with pinned moduli.
fn field_of(q: u32, m: u32) -> Result<Field> {
    let order = (q as u64).checked_pow(m).filter(|&o| o <= crate::field::MAX_ORDER);
    let order = order.ok_or(FieldError::TooLarge((q as u64).saturating_pow(m)))?;
    Ok(Field::of_order(order as u32)?)
}

/// Trace from `F_{Q}` down to its subfield of order `s`, as an element of `F_Q`.
fn trace_to_subfield(f: &Field, s: u32, x: u32) -> u32 {
    let mut acc = 0;
    let mut y = x;
    let mut o = s as u64;
    loop {
        acc = f.add(acc, y);
        y = f.pow(y, s as i64).expect("nonnegative exponent");
        if o >= f.order() as u64 {
            break;
        }
        o *= s as u64;
    }
    acc
}

/// The `k = 2` trace construction `[q^h + (q^h-1)/(q^{r0}-1), 1 + r0/h, n-1]` for `r0 | h`.
///
/// Coordinates are the least-encoding representatives of `F_{q^{h+r0}}^*/F_{q^{r0}}^*`.
/// The entry at `a` for message `x` collects `tr(x a w^j)`, `j < h/r0`, each written
/// over an `F_q`-basis of `F_{q^{r0}}`, and contracts the resulting `h` coordinates
/// through the tower basis of `F_{q^h}`.
pub fn trace_construction_k2(q: u32, h: u32, r0: u32) -> Result<AdditiveCode> {
    if q < 2 || h == 0 || r0 == 0 {
        return Err(ConstructError::NonPositive);
    }
    if h % r0 != 0 {
        return Err(ConstructError::R0NotDividing { r0, h });
    }
    let tower = Arc::new(FieldTower::standard(q, h)?);
    let base = tower.base().clone();
    let aux = field_of(q, h + r0)?;
    let aux_tower = FieldTower::new(base.clone(), aux.clone(), None)?;
    let big = aux.order();
    let sub = q.pow(r0);
    // gamma generates F_{q^{r0}}^* inside the auxiliary field.
    let step = ((big - 1) / (sub - 1)) as u64;
    let gamma = aux.exp(step);
    let mut sub_coords: HashMap<u32, Vec<u32>> = HashMap::new();
    for code in 0..(q as u64).pow(r0) {
        let mut c = code;
        let mut val = 0;
        let mut digits = Vec::with_capacity(r0 as usize);
        for i in 0..r0 {
            let d = (c % q as u64) as u32;
            c /= q as u64;
            digits.push(d);
            let g = aux.pow(gamma, i as i64).expect("nonnegative exponent");
            val = aux.add(val, aux.mul(aux_tower.embed(d), g));
        }
        sub_coords.insert(val, digits);
    }
    // Least representative per coset a·<gamma>.
    let mut seen = vec![false; big as usize];
    let mut reps = Vec::new();
    for a in 1..big {
        if seen[a as usize] {
            continue;
        }
        reps.push(a);
        let mut y = a;
        for _ in 0..sub - 1 {
            seen[y as usize] = true;
            y = aux.mul(y, gamma);
        }
    }
    let n = reps.len();
    let per = (h / r0) as usize;
    let mut rows = Vec::with_capacity((h + r0) as usize);
    let mut coords = vec![0u32; h as usize];
    for i in 0..(h + r0) {
        let x = aux.exp(i as u64);
        let row: Vec<u32> = reps
            .iter()
            .map(|&a| {
                for j in 0..per {
                    let t = trace_to_subfield(&aux, sub, aux.mul(aux.mul(x, a), aux.exp(j as u64)));
                    let c = &sub_coords[&t];
                    coords[j * r0 as usize..(j + 1) * r0 as usize].copy_from_slice(c);
                }
                tower.contract_unchecked(&coords)
            })
            .collect();
        rows.push(row);
    }
    Ok(AdditiveCode::new(tower, n, rows)?)
}

/// The binary `k = 3` trace construction `[2^{h+1}, 2 + 1/h, 2^{h+1} - 2]`.
pub fn trace_construction_k3(h: u32) -> Result<AdditiveCode> {
    if h == 0 {
        return Err(ConstructError::NonPositive);
    }
    let tower = Arc::new(FieldTower::standard(2, h)?);
    let aux = field_of(2, h + 1)?;
    let big = aux.order();
    let ext = tower.ext().clone();
    let mut rows = Vec::with_capacity(2 * h as usize + 1);
    for &b in tower.basis() {
        rows.push(vec![b; big as usize]);
    }
    let mut coords = vec![0u32; h as usize];
    for i in 0..=h {
        let x2 = aux.exp(i as u64);
        let row: Vec<u32> = (0..big)
            .map(|a| {
                for (j, c) in coords.iter_mut().enumerate() {
                    let t = trace_to_subfield(&aux, 2, aux.mul(aux.mul(x2, a), aux.exp(j as u64)));
                    *c = t;
                }
                tower.contract_unchecked(&coords)
            })
            .collect();
        rows.push(row);
    }
    debug_assert!(rows.iter().flatten().all(|&v| v < ext.order()));
    Ok(AdditiveCode::new(tower, big as usize, rows)?)
}

/// The Desarguesian spread of `F_{q^h}^2 ≅ F_q^{2h}`:
/// `{(0,x)}`, `{(x,0)}`, then `{(x, t x)}` for `t ≠ 0` in encoding order.
/// A vector `(u, v)` is written as `(expand(u), expand(v))`.
pub fn spread_partition(q: u32, h: u32) -> Result<Vec<Subspace>> {
    let tower = FieldTower::standard(q, h)?;
    spread_in_tower(&tower)
}

fn spread_in_tower(tower: &FieldTower) -> Result<Vec<Subspace>> {
    let ext = tower.ext();
    let base = tower.base();
    let h = tower.h();
    let vec_of = |u: u32, v: u32| -> Vec<u32> {
        let mut out = tower.expand(u).to_vec();
        out.extend_from_slice(tower.expand(v));
        out
    };
    let make = |f: &dyn Fn(u32) -> (u32, u32)| -> Subspace {
        let rows: Vec<Vec<u32>> = tower
            .basis()
            .iter()
            .map(|&b| {
                let (u, v) = f(b);
                vec_of(u, v)
            })
            .collect();
        Subspace::from_rows(base, 2 * h, &rows).expect("consistent shape")
    };
    let mut out = vec![make(&|x| (0, x)), make(&|x| (x, 0))];
    for t in 1..ext.order() {
        out.push(make(&|x| (x, ext.mul(t, x))));
    }
    Ok(out)
}

/// Input to the partition construction: pairwise trivially intersecting subspaces of `F_q^{2h}`.
#[derive(Clone, Debug)]
pub struct PartitionInput {
    pub pi_0: Subspace,
    pub pi_inf: Subspace,
    pub pi: Vec<Subspace>,
}

/// `(u_1, …, u_k, f(u), g(u))`: each `π_j` is parametrized by its first `F_{q^h}`
/// coordinate after moving `π_∞` to `{(x,0)}` and `π_0` to `{(0,x)}`.
pub fn partition_construction(tower: Arc<FieldTower>, input: &PartitionInput) -> Result<AdditiveCode> {
    let h = tower.h();
    let base = tower.base().clone();
    let mut all: Vec<(String, &Subspace)> = vec![("pi_0".into(), &input.pi_0), ("pi_inf".into(), &input.pi_inf)];
    for (i, p) in input.pi.iter().enumerate() {
        all.push((format!("pi_{}", i + 1), p));
    }
    for (i, (name, s)) in all.iter().enumerate() {
        // π_0 and π_∞ must be complementary h-spaces; the others may be smaller.
        if s.ambient() != 2 * h || s.dim() > h || (i < 2 && s.dim() != h) {
            return Err(ConstructError::BadDimension(name.clone(), s.dim(), h));
        }
    }
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if !all[i].1.intersects_trivially(all[j].1) {
                return Err(ConstructError::Intersecting(all[i].0.clone(), all[j].0.clone()));
            }
        }
    }
    // Rows of B are the bases of π_∞ then π_0; v ↦ v·B^{-1} sends them to the unit vectors.
    let mut brows = input.pi_inf.basis().row_vecs();
    brows.extend(input.pi_0.basis().row_vecs());
    let b = MatrixFq::from_rows(&base, 2 * h, &brows).expect("shape");
    let binv = b.inverse().expect("π_0 ⊕ π_∞ is the whole space");
    let k = input.pi.len();
    let n = k + 2;
    let mut rows = Vec::new();
    for (j, p) in input.pi.iter().enumerate() {
        for v in p.basis().row_vecs() {
            let img = binv.left_mul_vec(&v);
            let a = tower.contract_unchecked(&img[..h]);
            let g = tower.contract_unchecked(&img[h..]);
            let mut row = vec![0; n];
            row[j] = a;
            row[k] = a;
            row[k + 1] = g;
            rows.push(row);
        }
    }
    Ok(AdditiveCode::new(tower, n, rows)?)
}

/// A `[⌈r/h⌉+2, r/h, 3]` MDS code from the spread: `π_0`, `π_∞` are the first two
/// members and `π_1..π_k` the next `k`, the first `h - r0` of them cut down by one
/// dimension (round-robin further when `h - r0 > k`).
pub fn d3_mds(q: u32, h: u32, r: u32) -> Result<AdditiveCode> {
    if q < 2 || h == 0 || r == 0 {
        return Err(ConstructError::NonPositive);
    }
    let k = r.div_ceil(h) as usize;
    let cap = (q as usize).pow(h) - 1;
    if k > cap {
        return Err(ConstructError::KTooLarge { k, cap });
    }
    let tower = Arc::new(FieldTower::standard(q, h)?);
    let spread = spread_in_tower(&tower)?;
    let pk = geometry::packer_for(tower.base(), 2 * h as usize)?;
    let mut dims = vec![h as usize; k];
    let mut excess = k * h as usize - r as usize;
    let mut i = 0;
    while excess > 0 {
        dims[i % k] -= 1;
        excess -= 1;
        i += 1;
    }
    let pi: Vec<Subspace> = (0..k)
        .map(|j| {
            let rows: Vec<PVec> = spread[2 + j].packed_rows(&pk);
            let red = packed::rref(&pk, &rows);
            Subspace::from_packed(&pk, 2 * h as usize, &red[..dims[j]])
        })
        .collect();
    let input = PartitionInput { pi_0: spread[0].clone(), pi_inf: spread[1].clone(), pi };
    partition_construction(tower, &input)
}
