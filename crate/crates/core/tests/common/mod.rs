//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use addmds::code::AdditiveCode;
use addmds::field::{Field, FieldTower};
use rand::Rng;

/// Schoolbook product of two encoded elements of `F_{p^e}` modulo `modulus`
/// (low coefficient first, monic), without any table.
pub fn poly_mul(p: u32, modulus: &[u32], a: u32, b: u32) -> u32 {
    let e = modulus.len() - 1;
    let digits = |mut v: u32| {
        let mut d = vec![0u32; e];
        for x in d.iter_mut() {
            *x = v % p;
            v /= p;
        }
        d
    };
    let (da, db) = (digits(a), digits(b));
    let mut prod = vec![0u32; 2 * e];
    for i in 0..e {
        for j in 0..e {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    for deg in (e..2 * e).rev() {
        let c = prod[deg];
        if c != 0 {
            for (i, &m) in modulus.iter().enumerate() {
                let k = deg - e + i;
                prod[k] = (prod[k] + (p - c) * m % p) % p;
            }
        }
    }
    prod[..e].iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Digit-wise sum of encoded elements.
pub fn poly_add(p: u32, e: u32, mut a: u32, mut b: u32) -> u32 {
    let mut out = 0;
    let mut scale = 1;
    for _ in 0..e {
        out += ((a % p + b % p) % p) * scale;
        a /= p;
        b /= p;
        scale *= p;
    }
    out
}

/// Codewords of `c` by brute force over all `q^r` coefficient vectors, using
/// only the extension field's multiplication and addition.
pub fn all_codewords(c: &AdditiveCode) -> Vec<Vec<u32>> {
    let t = c.tower();
    let q = t.q() as usize;
    let total = q.pow(c.r() as u32);
    let ext = t.ext();
    (0..total)
        .map(|mut idx| {
            let mut w = vec![0u32; c.n()];
            for i in 0..c.r() {
                let a = t.embed((idx % q) as u32);
                idx /= q;
                for (j, x) in w.iter_mut().enumerate() {
                    *x = ext.add(*x, ext.mul(a, c.entry(i, j)));
                }
            }
            w
        })
        .collect()
}

/// Minimum distance from the brute-force codeword list.
pub fn brute_min_distance(c: &AdditiveCode) -> usize {
    all_codewords(c).iter().map(|w| w.iter().filter(|&&x| x != 0).count()).filter(|&wt| wt > 0).min().unwrap()
}

/// Rank over `F_q` of a list of vectors, by plain Gaussian elimination.
pub fn naive_rank(field: &Field, rows: &[Vec<u32>]) -> usize {
    let mut m: Vec<Vec<u32>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(rank, piv);
        let inv = field.inv(m[rank][col]).unwrap();
        let pivot_row: Vec<u32> = m[rank].iter().map(|&x| field.mul(x, inv)).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let f = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = field.sub(*x, field.mul(f, y));
                }
            }
        }
        m[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// A random code with `r` independent rows over the standard tower, or `None`
/// when the random rows happen to be dependent.
pub fn random_code<R: Rng>(rng: &mut R, q: u32, h: u32, n: usize, r: usize) -> Option<AdditiveCode> {
    let tower = Arc::new(FieldTower::standard(q, h).unwrap());
    let order = tower.ext().order();
    let rows: Vec<Vec<u32>> = (0..r).map(|_| (0..n).map(|_| rng.gen_range(0..order)).collect()).collect();
    AdditiveCode::new(tower, n, rows).ok()
}

/// Like [`random_code`], retrying until the rows are independent.
pub fn random_code_retry<R: Rng>(rng: &mut R, q: u32, h: u32, n: usize, r: usize) -> AdditiveCode {
    loop {
        if let Some(c) = random_code(rng, q, h, n, r) {
            return c;
        }
    }
}
