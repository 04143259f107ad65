//! Word-packed vectors over small fields.
//!
//! A vector of length `r` lives in one `u64`:
//! * `F_2`: bit `i` is coordinate `i` (r ≤ 64);
//! * `F_3`: two bit planes, bit `i` of the low half marks coordinate `i == 1`
//!   and bit `i` of the high half marks `== 2` (r ≤ 32);
//! * other `q ≤ 256`: 4 bits per coordinate when `q ≤ 16` (r ≤ 16), else 8 (r ≤ 8).

use crate::field::Field;

pub type PVec = u64;

#[derive(Clone)]
enum Kind {
    F2,
    F3,
    Gen { bits: u32, add: Vec<u8>, mul: Vec<u8>, neg: Vec<u8>, inv: Vec<u8> },
}

#[derive(Clone)]
pub struct Packed {
    q: u32,
    kind: Kind,
    field: Field,
}

const LO: u64 = 0xFFFF_FFFF;

impl Packed {
    pub fn new(field: &Field) -> Packed {
        let q = field.order();
        let kind = match q {
            2 => Kind::F2,
            3 => Kind::F3,
            _ => {
                assert!(q <= 256, "packed vectors need q ≤ 256");
                let bits = if q <= 16 { 4 } else { 8 };
                let n = q as usize;
                let mut add = vec![0u8; n * n];
                let mut mul = vec![0u8; n * n];
                for a in 0..q {
                    for b in 0..q {
                        add[(a * q + b) as usize] = field.add(a, b) as u8;
                        mul[(a * q + b) as usize] = field.mul(a, b) as u8;
                    }
                }
                let neg = (0..q).map(|a| field.neg(a) as u8).collect();
                let inv = (0..q).map(|a| field.inv(a).unwrap_or(0) as u8).collect();
                Kind::Gen { bits, add, mul, neg, inv }
            }
        };
        Packed { q, kind, field: field.clone() }
    }

    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Largest supported vector length.
    pub fn max_dim(&self) -> usize {
        match &self.kind {
            Kind::F2 => 64,
            Kind::F3 => 32,
            Kind::Gen { bits, .. } => (64 / bits) as usize,
        }
    }

    #[inline]
    pub fn get(&self, v: PVec, i: usize) -> u32 {
        match &self.kind {
            Kind::F2 => ((v >> i) & 1) as u32,
            Kind::F3 => (((v >> i) & 1) | (((v >> (32 + i)) & 1) << 1)) as u32,
            Kind::Gen { bits, .. } => ((v >> (bits * i as u32)) & ((1 << bits) - 1)) as u32,
        }
    }

    #[inline]
    pub fn set(&self, v: PVec, i: usize, c: u32) -> PVec {
        match &self.kind {
            Kind::F2 => (v & !(1 << i)) | ((c as u64 & 1) << i),
            Kind::F3 => {
                let cleared = v & !((1 << i) | (1 << (32 + i)));
                match c {
                    0 => cleared,
                    1 => cleared | (1 << i),
                    _ => cleared | (1 << (32 + i)),
                }
            }
            Kind::Gen { bits, .. } => {
                let sh = bits * i as u32;
                let mask = ((1u64 << bits) - 1) << sh;
                (v & !mask) | ((c as u64) << sh)
            }
        }
    }

    #[inline]
    pub fn add(&self, a: PVec, b: PVec) -> PVec {
        match &self.kind {
            Kind::F2 => a ^ b,
            Kind::F3 => {
                let (ap, am, bp, bm) = (a & LO, a >> 32, b & LO, b >> 32);
                let az = !(ap | am);
                let bz = !(bp | bm);
                let rp = (ap & bz) | (bp & az) | (am & bm);
                let rm = (am & bz) | (bm & az) | (ap & bp);
                (rp & LO) | ((rm & LO) << 32)
            }
            Kind::Gen { bits, add, .. } => {
                let mask = (1u64 << bits) - 1;
                let (mut x, mut y, mut out, mut sh) = (a, b, 0u64, 0u32);
                while x | y != 0 {
                    let s = add[((x & mask) * self.q as u64 + (y & mask)) as usize] as u64;
                    out |= s << sh;
                    x >>= bits;
                    y >>= bits;
                    sh += bits;
                }
                out
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: PVec) -> PVec {
        match &self.kind {
            Kind::F2 => a,
            Kind::F3 => (a >> 32) | ((a & LO) << 32),
            Kind::Gen { .. } => self.scale(self.field.neg(1), a),
        }
    }

    #[inline]
    pub fn sub(&self, a: PVec, b: PVec) -> PVec {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn scale(&self, c: u32, a: PVec) -> PVec {
        match &self.kind {
            Kind::F2 => {
                if c & 1 == 1 {
                    a
                } else {
                    0
                }
            }
            Kind::F3 => match c {
                0 => 0,
                1 => a,
                _ => self.neg(a),
            },
            Kind::Gen { bits, mul, .. } => {
                if c == 0 {
                    return 0;
                }
                if c == 1 {
                    return a;
                }
                let mask = (1u64 << bits) - 1;
                let (mut x, mut out, mut sh) = (a, 0u64, 0u32);
                while x != 0 {
                    let m = mul[(c as u64 * self.q as u64 + (x & mask)) as usize] as u64;
                    out |= m << sh;
                    x >>= bits;
                    sh += bits;
                }
                out
            }
        }
    }

    /// `y + c·x`.
    #[inline]
    pub fn axpy(&self, y: PVec, c: u32, x: PVec) -> PVec {
        match c {
            0 => y,
            1 => self.add(y, x),
            _ => self.add(y, self.scale(c, x)),
        }
    }

    /// Index of the first nonzero coordinate.
    #[inline]
    pub fn lead(&self, v: PVec) -> Option<usize> {
        if v == 0 {
            return None;
        }
        Some(match &self.kind {
            Kind::F2 => v.trailing_zeros() as usize,
            Kind::F3 => ((v & LO) | (v >> 32)).trailing_zeros() as usize,
            Kind::Gen { bits, .. } => (v.trailing_zeros() / bits) as usize,
        })
    }

    /// Scales `v` so its first nonzero coordinate is 1.
    #[inline]
    pub fn normalize(&self, v: PVec) -> PVec {
        match self.lead(v) {
            None => 0,
            Some(i) => {
                let c = self.get(v, i);
                if c == 1 {
                    v
                } else {
                    self.scale(self.inv(c), v)
                }
            }
        }
    }

    #[inline]
    pub fn inv(&self, c: u32) -> u32 {
        match &self.kind {
            Kind::F2 | Kind::F3 => c,
            Kind::Gen { inv, .. } => inv[c as usize] as u32,
        }
    }

    #[inline]
    pub fn mul_scalar(&self, a: u32, b: u32) -> u32 {
        match &self.kind {
            Kind::F2 => a & b,
            Kind::F3 => a * b % 3,
            Kind::Gen { mul, .. } => mul[(a * self.q + b) as usize] as u32,
        }
    }

    #[inline]
    pub fn add_scalar(&self, a: u32, b: u32) -> u32 {
        match &self.kind {
            Kind::F2 => a ^ b,
            Kind::F3 => (a + b) % 3,
            Kind::Gen { add, .. } => add[(a * self.q + b) as usize] as u32,
        }
    }

    #[inline]
    pub fn neg_scalar(&self, a: u32) -> u32 {
        match &self.kind {
            Kind::F2 => a,
            Kind::F3 => (3 - a) % 3,
            Kind::Gen { neg, .. } => neg[a as usize] as u32,
        }
    }

    /// Standard bilinear form `Σ a_i b_i`.
    #[inline]
    pub fn dot(&self, a: PVec, b: PVec) -> u32 {
        match &self.kind {
            Kind::F2 => (a & b).count_ones() & 1,
            Kind::F3 => {
                let (ap, am, bp, bm) = (a & LO, a >> 32, b & LO, b >> 32);
                let ones = ((ap & bp) | (am & bm)).count_ones();
                let twos = ((ap & bm) | (am & bp)).count_ones();
                (ones + 2 * twos) % 3
            }
            Kind::Gen { bits, .. } => {
                let mask = (1u64 << bits) - 1;
                let (mut x, mut y, mut acc) = (a, b, 0u32);
                while x != 0 && y != 0 {
                    acc = self.add_scalar(acc, self.mul_scalar((x & mask) as u32, (y & mask) as u32));
                    x >>= bits;
                    y >>= bits;
                }
                acc
            }
        }
    }

    pub fn from_slice(&self, s: &[u32]) -> PVec {
        assert!(s.len() <= self.max_dim(), "vector too long for packed storage");
        s.iter().enumerate().fold(0, |v, (i, &c)| self.set(v, i, c))
    }

    pub fn to_vec(&self, v: PVec, r: usize) -> Vec<u32> {
        (0..r).map(|i| self.get(v, i)).collect()
    }

    /// Base-`q` integer with coordinate 0 most significant; its order is the
    /// lexicographic order of coordinate sequences.
    pub fn index(&self, v: PVec, r: usize) -> u64 {
        match &self.kind {
            Kind::F2 if r <= 64 => {
                let mut x = 0u64;
                for i in 0..r {
                    x = (x << 1) | ((v >> i) & 1);
                }
                x
            }
            _ => (0..r).fold(0u64, |acc, i| acc * self.q as u64 + self.get(v, i) as u64),
        }
    }

    pub fn from_index(&self, mut idx: u64, r: usize) -> PVec {
        let mut v = 0;
        for i in (0..r).rev() {
            v = self.set(v, i, (idx % self.q as u64) as u32);
            idx /= self.q as u64;
        }
        v
    }

    /// Dense counter index; a bijection from vectors of length `r` onto `0..q^r`
    /// that is cheap to compute (not order preserving).
    #[inline]
    pub fn dense_index(&self, v: PVec, r: usize) -> usize {
        match &self.kind {
            Kind::F2 => v as usize,
            _ => {
                let mut acc = 0usize;
                for i in (0..r).rev() {
                    acc = acc * self.q as usize + self.get(v, i) as usize;
                }
                acc
            }
        }
    }
}

/// A semi-echelon basis: each row has a distinct pivot (normalized to 1) and is
/// zero at the pivots of the rows inserted before it.
#[derive(Clone, Default, Debug)]
pub struct Echelon {
    rows: Vec<PVec>,
    pivots: Vec<u8>,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[PVec] {
        &self.rows
    }

    #[inline]
    pub fn reduce(&self, pk: &Packed, mut v: PVec) -> PVec {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = pk.get(v, p as usize);
            if c != 0 {
                v = pk.axpy(v, pk.neg_scalar(c), *row);
            }
        }
        v
    }

    /// Adds `v` to the span; returns whether the rank grew.
    #[inline]
    pub fn insert(&mut self, pk: &Packed, v: PVec) -> bool {
        let v = self.reduce(pk, v);
        match pk.lead(v) {
            None => false,
            Some(p) => {
                self.rows.push(pk.normalize(v));
                self.pivots.push(p as u8);
                true
            }
        }
    }

    #[inline]
    pub fn contains(&self, pk: &Packed, v: PVec) -> bool {
        self.reduce(pk, v) == 0
    }

    /// Canonical RREF rows, pivots ascending.
    pub fn rref(&self, pk: &Packed) -> Vec<PVec> {
        rref(pk, &self.rows)
    }
}

/// Reduced row echelon basis of the span of `vs` (pivots ascending, no zero rows).
pub fn rref(pk: &Packed, vs: &[PVec]) -> Vec<PVec> {
    let mut ech = Echelon::new();
    for &v in vs {
        ech.insert(pk, v);
    }
    let mut order: Vec<usize> = (0..ech.rows.len()).collect();
    order.sort_by_key(|&i| ech.pivots[i]);
    let mut rows: Vec<PVec> = order.iter().map(|&i| ech.rows[i]).collect();
    let pivots: Vec<usize> = order.iter().map(|&i| ech.pivots[i] as usize).collect();
    for i in 0..rows.len() {
        for j in 0..rows.len() {
            if i == j {
                continue;
            }
            let c = pk.get(rows[j], pivots[i]);
            if c != 0 {
                rows[j] = pk.axpy(rows[j], pk.neg_scalar(c), rows[i]);
            }
        }
    }
    rows
}

pub fn rank(pk: &Packed, vs: &[PVec]) -> usize {
    let mut ech = Echelon::new();
    vs.iter().filter(|&&v| ech.insert(pk, v)).count()
}

/// Basis of `{a : a·x = 0 for all x in span(rows)}` in length-`r` space.
pub fn perp(pk: &Packed, rows: &[PVec], r: usize) -> Vec<PVec> {
    let red = rref(pk, rows);
    let pivots: Vec<usize> = red.iter().map(|&v| pk.lead(v).expect("nonzero row")).collect();
    let mut out = Vec::with_capacity(r - red.len());
    for f in (0..r).filter(|c| !pivots.contains(c)) {
        let mut v = pk.set(0, f, 1);
        for (row, &p) in red.iter().zip(&pivots) {
            let c = pk.get(*row, f);
            if c != 0 {
                v = pk.set(v, p, pk.neg_scalar(c));
            }
        }
        out.push(v);
    }
    out
}

/// Calls `f` on every nonzero vector of the span of the independent `basis`,
/// visiting each exactly once with one vector addition per step.
pub fn for_each_nonzero_combination(pk: &Packed, basis: &[PVec], mut f: impl FnMut(PVec)) {
    if basis.is_empty() {
        return;
    }
    // Additive generators over F_p: ω^t·b for t < e.
    let field = pk.field();
    let p = field.p() as u64;
    let gens: Vec<PVec> = basis
        .iter()
        .flat_map(|&b| (0..field.e() as u64).map(move |t| (b, t)))
        .map(|(b, t)| pk.scale(field.exp(t), b))
        .collect();
    let total = p.pow(gens.len() as u32);
    // Modular p-ary Gray code: step t -> t+1 increments digit j by one, where
    // j counts the trailing (p-1) digits of t.
    let mut cur = 0;
    for t in 0..total - 1 {
        let mut x = t;
        let mut j = 0;
        while x % p == p - 1 {
            x /= p;
            j += 1;
        }
        cur = pk.add(cur, gens[j]);
        f(cur);
    }
}

/// Calls `f` on one representative (first nonzero coefficient 1) of each
/// projective point in the span of the independent `basis`.
pub fn for_each_projective_point(pk: &Packed, basis: &[PVec], mut f: impl FnMut(PVec)) {
    for lead in 0..basis.len() {
        let head = basis[lead];
        f(head);
        for_each_nonzero_combination(pk, &basis[lead + 1..], |v| f(pk.add(head, v)));
    }
}
