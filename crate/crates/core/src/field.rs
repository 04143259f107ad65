//! Finite fields `F_{p^e}` with table arithmetic, and field towers `F_q ⊆ F_{q^h}`.
//!
//! Elements are plain `u32` values holding the canonical integer encoding
//! `Σ c_i p^i`, where `c_i` is the coefficient of `x^i` in the polynomial
//! representative modulo the field's modulus. Hot loops call the `Field`
//! methods directly; [`FieldElement`] is the checked, field-tagged wrapper.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest supported field order (log tables are `u32` indexed).
pub const MAX_ORDER: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {0} exceeds the supported maximum 2^16")]
    TooLarge(u64),
    #[error("modulus must be monic of degree {0}")]
    BadModulus(u32),
    #[error("modulus {0} is reducible")]
    Reducible(String),
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("cannot parse field descriptor `{0}`")]
    BadDescriptor(String),
    #[error("cannot parse polynomial `{0}`")]
    BadPolynomial(String),
    #[error("cannot parse field element `{0}`")]
    BadElement(String),
    #[error("F_{ext} is not an extension of F_{base}")]
    NotSubfield { base: u32, ext: u32 },
    #[error("tower basis needs {expected} elements, got {got}")]
    BasisLength { expected: usize, got: usize },
    #[error("tower basis is not linearly independent over the base field")]
    DependentBasis,
    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value {0} is not an element of the base field")]
    NotInBase(u32),
}

pub type Result<T> = std::result::Result<T, FieldError>;

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Polynomial helpers over `F_p`; coefficient vectors are low-degree first.
mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        trim(&mut a);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while a.len() > dm {
            let da = a.len() - 1;
            let c = a[da] * lead_inv % p;
            for (i, &mi) in m.iter().enumerate() {
                let idx = da - dm + i;
                a[idx] = (a[idx] + p * p - c * mi % p) % p;
            }
            trim(&mut a);
        }
        a
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        (1..p).find(|&x| a * x % p == 1).expect("nonzero residue")
    }

    /// Digits of `v` in base `p`, exactly `len` of them.
    pub fn digits(mut v: u32, p: u32, len: usize) -> Vec<u32> {
        let mut d = Vec::with_capacity(len);
        for _ in 0..len {
            d.push(v % p);
            v /= p;
        }
        d
    }

    pub fn encode(d: &[u32], p: u32) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    /// Brute-force factor search over monic polynomials of degree `1..=deg/2`.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let deg = m.len() - 1;
        if deg <= 1 {
            return true;
        }
        for d in 1..=deg / 2 {
            let count = p.pow(d as u32);
            for low in 0..count {
                let mut g = digits(low, p, d);
                g.push(1);
                if rem(m, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    pub fn format(m: &[u32], p: u32) -> String {
        let mut s = String::new();
        for i in (0..m.len()).rev() {
            let c = m[i];
            if c == 0 {
                continue;
            }
            let neg = p > 2 && c == p - 1;
            let mag = if neg { 1 } else { c };
            if neg {
                s.push('-');
            } else if !s.is_empty() {
                s.push('+');
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            if mag != 1 || i == 0 {
                s.push_str(&mag.to_string());
            }
            s.push_str(&mono);
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    /// Parses e.g. `x^2-x-1`, `x^3+x+1`, `2x^2+1` into coefficients mod `p`.
    pub fn parse(s: &str, p: u32) -> Option<Vec<u32>> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return None;
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for ch in s.chars() {
            if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut coeffs: Vec<u32> = Vec::new();
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, t.strip_prefix('+').unwrap_or(&t)),
            };
            let (coef, deg) = match body.find('x') {
                None => (body.parse::<u32>().ok()?, 0usize),
                Some(pos) => {
                    let c = body[..pos].trim_end_matches('*');
                    let c = if c.is_empty() { 1 } else { c.parse::<u32>().ok()? };
                    let rest = &body[pos + 1..];
                    let d = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')?.parse::<usize>().ok()?
                    };
                    (c, d)
                }
            };
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, 0);
            }
            let c = coef % p;
            let c = if neg { (p - c) % p } else { c };
            coeffs[deg] = (coeffs[deg] + c) % p;
        }
        Some(coeffs)
    }
}

struct FieldInner {
    p: u32,
    e: u32,
    order: u32,
    modulus: Vec<u32>,
    omega: u32,
    /// `exp[i] = omega^i` for `i < 2(order-1)`.
    exp: Vec<u32>,
    /// `log[x]` for `x != 0`.
    log: Vec<u32>,
    /// Full addition table for odd-characteristic extension fields of order ≤ 256.
    add: Option<Vec<u16>>,
}

/// A finite field `F_{p^e}`. Cheap to clone; equality compares `(p, e, modulus)`.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.descriptor())
    }
}

/// Pinned moduli, low-degree coefficient first.
fn pinned_modulus(p: u32, e: u32) -> Option<Vec<u32>> {
    match (p, e) {
        (2, 2) => Some(vec![1, 1, 1]),
        (2, 3) => Some(vec![1, 1, 0, 1]),
        (3, 2) => Some(vec![2, 2, 1]),
        (2, 4) => Some(vec![1, 1, 0, 0, 1]),
        _ => None,
    }
}

/// The monic irreducible of degree `e` whose lower coefficients have the least encoding.
fn least_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = p.pow(e);
    for low in 0..count {
        let mut m = poly::digits(low, p, e as usize);
        m.push(1);
        if poly::is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    /// Builds `F_{p^e}`; the modulus defaults to the pinned convention.
    pub fn new(p: u32, e: u32, modulus: Option<&[u32]>) -> Result<Field> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (p as u64).checked_pow(e).filter(|&o| o <= MAX_ORDER);
        let order = order.ok_or(FieldError::TooLarge((p as u64).saturating_pow(e)))? as u32;
        let modulus = match modulus {
            Some(m) => {
                let mut m: Vec<u32> = m.iter().map(|&c| c % p).collect();
                poly::trim(&mut m);
                if m.len() != e as usize + 1 || m[e as usize] != 1 {
                    return Err(FieldError::BadModulus(e));
                }
                if !poly::is_irreducible(&m, p) {
                    return Err(FieldError::Reducible(poly::format(&m, p)));
                }
                m
            }
            None if e == 1 => vec![0, 1],
            None => pinned_modulus(p, e).unwrap_or_else(|| least_irreducible(p, e)),
        };
        let slow_mul = |a: u32, b: u32| -> u32 {
            let pa = poly::digits(a, p, e as usize);
            let pb = poly::digits(b, p, e as usize);
            let mut r = poly::rem(&poly::mul(&pa, &pb, p), &modulus, p);
            r.resize(e as usize, 0);
            poly::encode(&r, p)
        };
        let n1 = order - 1;
        let factors = prime_factors(n1.max(1));
        let slow_pow = |mut b: u32, mut k: u32| -> u32 {
            let mut acc = 1;
            while k > 0 {
                if k & 1 == 1 {
                    acc = slow_mul(acc, b);
                }
                b = slow_mul(b, b);
                k >>= 1;
            }
            acc
        };
        let is_primitive =
            |g: u32| g != 0 && (n1 == 1 || factors.iter().all(|&l| slow_pow(g, n1 / l) != 1));
        // Prefer x itself when it is primitive; otherwise the least primitive encoding.
        let x = if e == 1 { 0 } else { p };
        let omega = if e > 1 && is_primitive(x) {
            x
        } else {
            (1..order).find(|&g| is_primitive(g)).expect("primitive element exists")
        };
        let mut exp = vec![0u32; 2 * n1.max(1) as usize];
        let mut log = vec![0u32; order as usize];
        let mut cur = 1u32;
        for i in 0..n1 as usize {
            exp[i] = cur;
            log[cur as usize] = i as u32;
            cur = slow_mul(cur, omega);
        }
        for i in n1 as usize..exp.len() {
            exp[i] = exp[i - n1 as usize];
        }
        let add = if p != 2 && e > 1 && order <= 256 {
            let mut t = vec![0u16; (order * order) as usize];
            for a in 0..order {
                let da = poly::digits(a, p, e as usize);
                for b in 0..order {
                    let db = poly::digits(b, p, e as usize);
                    let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    t[(a * order + b) as usize] = poly::encode(&s, p) as u16;
                }
            }
            Some(t)
        } else {
            None
        };
        Ok(Field(Arc::new(FieldInner { p, e, order, modulus, omega, exp, log, add })))
    }

    /// Field of order `q` with the pinned default modulus.
    pub fn of_order(q: u32) -> Result<Field> {
        let (p, e) = prime_power(q).ok_or(FieldError::BadDescriptor(q.to_string()))?;
        Field::new(p, e, None)
    }

    /// Parses `"p^e:modulus"`, `"p^e"`, or a plain order such as `"9"`.
    pub fn parse_descriptor(s: &str) -> Result<Field> {
        let bad = || FieldError::BadDescriptor(s.to_string());
        let s = s.trim();
        let (size, modulus) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s, None),
        };
        let (p, e) = match size.split_once('^') {
            Some((a, b)) => (a.parse::<u32>().map_err(|_| bad())?, b.parse::<u32>().map_err(|_| bad())?),
            None => prime_power(size.parse::<u32>().map_err(|_| bad())?).ok_or_else(bad)?,
        };
        match modulus {
            None => Field::new(p, e, None),
            Some(m) => {
                if !is_prime(p) {
                    return Err(FieldError::NotPrime(p));
                }
                let coeffs = poly::parse(m, p).ok_or_else(|| FieldError::BadPolynomial(m.to_string()))?;
                Field::new(p, e, Some(&coeffs))
            }
        }
    }

    pub fn descriptor(&self) -> String {
        format!("{}^{}:{}", self.p(), self.e(), poly::format(&self.0.modulus, self.p()))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }
    #[inline]
    pub fn e(&self) -> u32 {
        self.0.e
    }
    #[inline]
    pub fn order(&self) -> u32 {
        self.0.order
    }
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }
    #[inline]
    pub fn omega(&self) -> u32 {
        self.0.omega
    }
    pub fn is_prime_field(&self) -> bool {
        self.0.e == 1
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let f = &*self.0;
        if f.p == 2 {
            a ^ b
        } else if f.e == 1 {
            let s = a + b;
            if s >= f.p {
                s - f.p
            } else {
                s
            }
        } else if let Some(t) = &f.add {
            t[(a * f.order + b) as usize] as u32
        } else {
            self.digitwise(a, b, |x, y| x + y)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        let f = &*self.0;
        if f.p == 2 {
            a
        } else if f.e == 1 {
            if a == 0 {
                0
            } else {
                f.p - a
            }
        } else {
            self.digitwise(0, a, |x, y| x + f.p - y)
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    fn digitwise(&self, mut a: u32, mut b: u32, op: impl Fn(u32, u32) -> u32) -> u32 {
        let p = self.0.p;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.0.e {
            out += (op(a % p, b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let f = &*self.0;
        f.exp[(f.log[a as usize] + f.log[b as usize]) as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let f = &*self.0;
        let n1 = f.order - 1;
        Some(f.exp[((n1 - f.log[a as usize]) % n1) as usize])
    }

    /// `a^k` for any integer `k` (negative exponents need `a != 0`).
    pub fn pow(&self, a: u32, k: i64) -> Option<u32> {
        if a == 0 {
            return match k {
                0 => Some(1),
                k if k > 0 => Some(0),
                _ => None,
            };
        }
        let n1 = (self.0.order - 1) as i64;
        let l = (self.0.log[a as usize] as i64 * k.rem_euclid(n1)).rem_euclid(n1);
        Some(self.0.exp[l as usize])
    }

    /// `omega^k`.
    #[inline]
    pub fn exp(&self, k: u64) -> u32 {
        let n1 = (self.0.order - 1) as u64;
        self.0.exp[(k % n1) as usize]
    }

    /// Discrete log base omega; `None` for zero.
    #[inline]
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.0.log[a as usize])
    }

    /// Frobenius `a ↦ a^p`.
    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.0.p as i64).expect("nonnegative exponent")
    }

    /// Textual token: integers for prime fields, `0`, `1`, `w`, `w^k` otherwise.
    pub fn format_element(&self, a: u32) -> String {
        if self.is_prime_field() || a <= 1 {
            return a.to_string();
        }
        match self.0.log[a as usize] {
            1 => "w".to_string(),
            k => format!("w^{k}"),
        }
    }

    /// Accepts `0`, `1`, `w`, `w^k` (also `ω`), or a canonical integer encoding.
    pub fn parse_element(&self, s: &str) -> Result<u32> {
        let t = s.trim();
        let bad = || FieldError::BadElement(s.to_string());
        let rest = t.strip_prefix('w').or_else(|| t.strip_prefix('ω'));
        if let Some(rest) = rest {
            let k: i64 = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?
            };
            return Ok(self.pow(self.omega(), k).expect("omega is nonzero"));
        }
        let v: u32 = t.parse().map_err(|_| bad())?;
        if v >= self.order() {
            return Err(bad());
        }
        Ok(v)
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if value >= self.order() {
            return Err(FieldError::BadElement(value.to_string()));
        }
        Ok(FieldElement { field: self.clone(), value })
    }

    /// Evaluates a polynomial with coefficients in this field at `x` (Horner).
    pub fn eval_poly(&self, coeffs: &[u32], x: u32) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

/// Splits `q = p^e`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut e = 0;
    let mut m = q;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

/// A field element tagged with its field; arithmetic is checked for field agreement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: u32,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn value(&self) -> u32 {
        self.value
    }
    fn same(&self, o: &FieldElement) -> Result<()> {
        if self.field == o.field {
            Ok(())
        } else {
            Err(FieldError::MixedFields)
        }
    }
    fn wrap(&self, value: u32) -> FieldElement {
        FieldElement { field: self.field.clone(), value }
    }
    pub fn add(&self, o: &FieldElement) -> Result<FieldElement> {
        self.same(o)?;
        Ok(self.wrap(self.field.add(self.value, o.value)))
    }
    pub fn sub(&self, o: &FieldElement) -> Result<FieldElement> {
        self.same(o)?;
        Ok(self.wrap(self.field.sub(self.value, o.value)))
    }
    pub fn mul(&self, o: &FieldElement) -> Result<FieldElement> {
        self.same(o)?;
        Ok(self.wrap(self.field.mul(self.value, o.value)))
    }
    pub fn neg(&self) -> FieldElement {
        self.wrap(self.field.neg(self.value))
    }
    pub fn inv(&self) -> Result<FieldElement> {
        self.field.inv(self.value).map(|v| self.wrap(v)).ok_or(FieldError::DivisionByZero)
    }
    pub fn pow(&self, k: i64) -> Result<FieldElement> {
        self.field.pow(self.value, k).map(|v| self.wrap(v)).ok_or(FieldError::DivisionByZero)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_element(self.value))
    }
}

/// The tower `F_q ⊆ F_{q^h}` with a fixed `F_q`-basis of the extension.
pub struct FieldTower {
    base: Field,
    ext: Field,
    h: usize,
    /// Base element ↦ its image in the extension.
    embed: Vec<u32>,
    /// Extension element ↦ base element, or `u32::MAX` outside the subfield.
    restrict: Vec<u32>,
    basis: Vec<u32>,
    /// Flattened `order(ext) × h` table of basis coordinates.
    coords: Vec<u32>,
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldTower({} ⊆ {})", self.base.descriptor(), self.ext.descriptor())
    }
}

impl FieldTower {
    /// Builds the tower; `basis` defaults to `1, ω, …, ω^{h-1}` with ω the extension's omega.
    pub fn new(base: Field, ext: Field, basis: Option<Vec<u32>>) -> Result<FieldTower> {
        if base.p() != ext.p() || ext.e() % base.e() != 0 {
            return Err(FieldError::NotSubfield { base: base.order(), ext: ext.order() });
        }
        let h = (ext.e() / base.e()) as usize;
        let q = base.order();
        // The base generator x is sent to the least root of the base modulus.
        let embed: Vec<u32> = if base.e() == 1 {
            (0..q).collect()
        } else {
            let m: Vec<u32> = base.modulus().to_vec();
            let beta = (0..ext.order())
                .find(|&y| ext.eval_poly(&m, y) == 0)
                .expect("a degree-dividing extension contains every root");
            (0..q)
                .map(|a| {
                    let d = poly::digits(a, base.p(), base.e() as usize);
                    ext.eval_poly(&d, beta)
                })
                .collect()
        };
        let mut restrict = vec![u32::MAX; ext.order() as usize];
        for (a, &y) in embed.iter().enumerate() {
            restrict[y as usize] = a as u32;
        }
        let basis = match basis {
            Some(b) => {
                if b.len() != h {
                    return Err(FieldError::BasisLength { expected: h, got: b.len() });
                }
                b
            }
            None => (0..h).map(|i| ext.exp(i as u64)).collect(),
        };
        let mut coords = vec![u32::MAX; ext.order() as usize * h];
        let total = (q as u64).pow(h as u32);
        for code in 0..total {
            let mut c = code;
            let mut val = 0;
            let mut digits = Vec::with_capacity(h);
            for &b in basis.iter() {
                let d = (c % q as u64) as u32;
                c /= q as u64;
                digits.push(d);
                val = ext.add(val, ext.mul(embed[d as usize], b));
            }
            let slot = &mut coords[val as usize * h..(val as usize + 1) * h];
            if slot[0] != u32::MAX {
                return Err(FieldError::DependentBasis);
            }
            slot.copy_from_slice(&digits);
        }
        Ok(FieldTower { base, ext, h, embed, restrict, basis, coords })
    }

    /// Tower `F_q ⊆ F_{q^h}` with pinned moduli and default basis.
    pub fn standard(q: u32, h: u32) -> Result<FieldTower> {
        let base = Field::of_order(q)?;
        let ext_order = (q as u64).checked_pow(h).filter(|&o| o <= MAX_ORDER);
        let ext_order = ext_order.ok_or(FieldError::TooLarge((q as u64).saturating_pow(h)))?;
        let ext = Field::of_order(ext_order as u32)?;
        FieldTower::new(base, ext, None)
    }

    pub fn base(&self) -> &Field {
        &self.base
    }
    pub fn ext(&self) -> &Field {
        &self.ext
    }
    pub fn q(&self) -> u32 {
        self.base.order()
    }
    pub fn h(&self) -> usize {
        self.h
    }
    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    #[inline]
    pub fn embed(&self, a: u32) -> u32 {
        self.embed[a as usize]
    }

    /// Base element equal to `y`, if `y` lies in the subfield.
    #[inline]
    pub fn restrict(&self, y: u32) -> Option<u32> {
        let v = self.restrict[y as usize];
        (v != u32::MAX).then_some(v)
    }

    /// Basis coordinates of `x` over `F_q`.
    #[inline]
    pub fn expand(&self, x: u32) -> &[u32] {
        &self.coords[x as usize * self.h..(x as usize + 1) * self.h]
    }

    pub fn contract(&self, v: &[u32]) -> Result<u32> {
        if v.len() != self.h {
            return Err(FieldError::LengthMismatch { expected: self.h, got: v.len() });
        }
        Ok(self.contract_unchecked(v))
    }

    #[inline]
    pub fn contract_unchecked(&self, v: &[u32]) -> u32 {
        v.iter()
            .zip(&self.basis)
            .fold(0, |acc, (&c, &b)| self.ext.add(acc, self.ext.mul(self.embed[c as usize], b)))
    }

    /// `x + x^q + … + x^{q^{h-1}}` as an element of the base field.
    pub fn trace_down(&self, x: u32) -> u32 {
        let q = self.q() as i64;
        let mut acc = 0;
        let mut y = x;
        for _ in 0..self.h {
            acc = self.ext.add(acc, y);
            y = self.ext.pow(y, q).expect("nonnegative exponent");
        }
        self.restrict(acc).expect("trace lies in the base field")
    }
}
