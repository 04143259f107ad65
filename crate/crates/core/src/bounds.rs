//! Griesmer-type bounds for additive codes, evaluated in exact arithmetic.
//!
//! Parameters follow the code module: `k = ⌈r/h⌉`, `r = (k-1)h + r0`, `1 ≤ r0 ≤ h`.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

pub type Q = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("parameters must be positive")]
    NonPositive,
    #[error("need r ≥ h (got r={r}, h={h})")]
    RBelowH { r: u32, h: u32 },
    #[error("need r > h (got r={r}, h={h})")]
    RNotAboveH { r: u32, h: u32 },
    #[error("the integral variant needs h | r")]
    NotIntegral,
    #[error("the fractional variant needs h ∤ r")]
    NotFractional,
    #[error("m must be at least 2")]
    BadM,
    #[error("q^{0} overflows exact arithmetic")]
    Overflow(u32),
}

pub type Result<T> = std::result::Result<T, BoundsError>;

fn pow(q: u32, e: u32) -> Result<i128> {
    (q as i128).checked_pow(e).ok_or(BoundsError::Overflow(e))
}

fn ceil(x: Q) -> i128 {
    x.ceil().to_integer()
}

fn floor(x: Q) -> i128 {
    x.floor().to_integer()
}

fn check_pos(vals: &[u32]) -> Result<()> {
    if vals.iter().any(|&v| v == 0) {
        Err(BoundsError::NonPositive)
    } else {
        Ok(())
    }
}

/// `(k, r0)` for given `(h, r)`.
pub fn k_r0(h: u32, r: u32) -> (u32, u32) {
    let k = r.div_ceil(h);
    (k, r - (k - 1) * h)
}

/// Classical Griesmer bound `Σ_{j<k} ⌈d/q^j⌉` for linear `[n,k,d]_q` codes.
pub fn griesmer_linear(q: u32, k: u32, d: u64) -> Result<u64> {
    check_pos(&[q, k])?;
    if d == 0 {
        return Err(BoundsError::NonPositive);
    }
    let mut total: u64 = 0;
    let mut pw: u64 = 1;
    for _ in 0..k {
        total += d.div_ceil(pw);
        pw = pw.saturating_mul(q as u64);
    }
    debug_assert_eq!(total, griesmer_linear_reformulated(q, k, d));
    Ok(total)
}

/// The same bound as `k + d - m + Σ_{j=1}^{m-1} ⌈d/q^j⌉` with `q^{m-2} < d ≤ q^{m-1}`, `m ≤ k`.
pub fn griesmer_linear_reformulated(q: u32, k: u32, d: u64) -> u64 {
    let mut m = 1u32;
    let mut pw: u64 = 1;
    while pw < d && m < k {
        pw = pw.saturating_mul(q as u64);
        m += 1;
    }
    let mut s: u64 = 0;
    let mut pj: u64 = 1;
    for _ in 1..m {
        pj = pj.saturating_mul(q as u64);
        s += d.div_ceil(pj);
    }
    k as u64 + d - m as u64 + s
}

/// `f(q,m) = q^e (q^h - 1) / (q^e - 1)` with `e = (m-2)h + r0`.
pub fn f_of(q: u32, h: u32, r0: u32, m: u32) -> Result<Q> {
    check_pos(&[q, h, r0])?;
    if m < 2 {
        return Err(BoundsError::BadM);
    }
    let qe = pow(q, (m - 2) * h + r0)?;
    let qh = pow(q, h)?;
    Ok(Q::new(qe * (qh - 1), qe - 1))
}

/// `B(m) = k + d - m + ⌈d / f(q,m)⌉`.
pub fn b_of(q: u32, h: u32, r: u32, d: u64, m: u32) -> Result<i128> {
    let (k, r0) = k_r0(h, r);
    let f = f_of(q, h, r0, m)?;
    Ok(k as i128 + d as i128 - m as i128 + ceil(Q::from(d as i128) / f))
}

/// The least `m ≥ 2` with `d ≤ q^{(m-1)h + r0}`, capped at `k` (`None` when `k = 1`).
pub fn select_m(q: u32, h: u32, r: u32, d: u64) -> Result<Option<u32>> {
    let (k, r0) = k_r0(h, r);
    if k < 2 {
        return Ok(None);
    }
    for m in 2..=k {
        if (d as i128) <= pow(q, (m - 1) * h + r0)? {
            return Ok(Some(m));
        }
    }
    Ok(Some(k))
}

/// One named bound with its value and, when an actual code is given, whether it holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundEntry {
    pub name: String,
    /// `min_n`, `max_d`, `max_n` or `max_k`.
    pub kind: &'static str,
    pub value: i128,
    /// Whether the bound is claimed for these parameters (baselines are informational).
    pub applicable: bool,
    pub satisfied: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub q: u32,
    pub h: u32,
    pub r: u32,
    pub d: Option<u64>,
    pub n: Option<u64>,
    pub k: u32,
    pub r0: u32,
    pub m_opt: Option<u32>,
    /// `f(q, m_opt)` as `"num/den"`.
    pub f_value: Option<String>,
    /// `(m, B(m))` for every `m` in `2..=k`.
    pub b_values: Vec<(u32, i128)>,
    pub theorem_applicable: bool,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn value(&self, name: &str) -> Option<i128> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.value)
    }

    pub fn all_satisfied(&self) -> bool {
        self.entries.iter().filter(|e| e.applicable).all(|e| e.satisfied != Some(false))
    }
}

fn fmt_q(x: Q) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// The additive Griesmer bound at its maximizing `m`, plus the `B(m)` audit trail.
pub fn additive_griesmer(q: u32, h: u32, r: u32, d: u64) -> Result<BoundReport> {
    check_pos(&[q, h, r])?;
    if d == 0 {
        return Err(BoundsError::NonPositive);
    }
    let (k, r0) = k_r0(h, r);
    let mut rep = BoundReport {
        q,
        h,
        r,
        d: Some(d),
        n: None,
        k,
        r0,
        m_opt: None,
        f_value: None,
        b_values: Vec::new(),
        theorem_applicable: k >= 2,
        entries: Vec::new(),
    };
    let value = match select_m(q, h, r, d)? {
        None => d as i128,
        Some(m) => {
            rep.m_opt = Some(m);
            rep.f_value = Some(fmt_q(f_of(q, h, r0, m)?));
            for mm in 2..=k {
                rep.b_values.push((mm, b_of(q, h, r, d, mm)?));
            }
            b_of(q, h, r, d, m)?
        }
    };
    rep.entries.push(BoundEntry {
        name: "additive_griesmer".into(),
        kind: "min_n",
        value,
        applicable: true,
        satisfied: None,
    });
    Ok(rep)
}

/// Fast evaluator of the additive Griesmer value for fixed `(q, h, r)` and varying `d`.
pub struct GriesmerEvaluator {
    k: u32,
    /// `(threshold q^{(m-1)h+r0}, numerator, denominator)` of `1/f` for `m = 2..=k`.
    windows: Vec<(u128, u128, u128)>,
}

impl GriesmerEvaluator {
    pub fn new(q: u32, h: u32, r: u32) -> Result<GriesmerEvaluator> {
        check_pos(&[q, h, r])?;
        let (k, r0) = k_r0(h, r);
        let mut windows = Vec::new();
        let qh = pow(q, h)? as u128;
        for m in 2..=k {
            let qe = pow(q, (m - 2) * h + r0)? as u128;
            windows.push((qe * qh, qe - 1, qe * (qh - 1)));
        }
        Ok(GriesmerEvaluator { k, windows })
    }

    /// Same value as [`additive_griesmer`].
    #[inline]
    pub fn eval(&self, d: u64) -> u64 {
        if self.k < 2 {
            return d;
        }
        let d128 = d as u128;
        let idx = self.windows.iter().position(|w| d128 <= w.0).unwrap_or(self.windows.len() - 1);
        let (_, num, den) = self.windows[idx];
        let m = idx as u64 + 2;
        self.k as u64 + d - m + (d128 * num).div_ceil(den) as u64
    }

    /// Calls `f(d, eval(d))` for `d = 1..=d_max`, carrying the ceiling across steps.
    pub fn sweep(&self, d_max: u64, mut f: impl FnMut(u64, u64)) {
        if self.k < 2 {
            (1..=d_max).for_each(|d| f(d, d));
            return;
        }
        let mut d = 1u64;
        for (idx, &(thr, num, den)) in self.windows.iter().enumerate() {
            let end = if idx + 1 == self.windows.len() { d_max } else { d_max.min(thr.min(u64::MAX as u128) as u64) };
            if d > end {
                continue;
            }
            let base = self.k as u64 - (idx as u64 + 2);
            let n = d as u128 * num;
            let (mut quot, mut rem) = (n / den, n % den);
            loop {
                f(d, base + d + (quot + (rem > 0) as u128) as u64);
                if d == end {
                    break;
                }
                d += 1;
                // num < den, so one carry suffices.
                rem += num;
                if rem >= den {
                    rem -= den;
                    quot += 1;
                }
            }
            if d == d_max {
                return;
            }
            d += 1;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorollaryVariant {
    Integral,
    Fractional,
}

/// The integral (`h | r`) or fractional corollary of the additive Griesmer bound.
pub fn additive_griesmer_corollary(q: u32, h: u32, r: u32, d: u64, variant: CorollaryVariant) -> Result<i128> {
    check_pos(&[q, h, r])?;
    if d == 0 {
        return Err(BoundsError::NonPositive);
    }
    let integral = r % h == 0;
    match variant {
        CorollaryVariant::Integral if !integral => return Err(BoundsError::NotIntegral),
        CorollaryVariant::Fractional if integral => return Err(BoundsError::NotFractional),
        _ => {}
    }
    let (k, r0) = k_r0(h, r);
    if k < 2 {
        return Ok(d as i128);
    }
    let d = d as i128;
    let (m, terms) = match variant {
        CorollaryVariant::Integral => {
            let mut m = 2;
            while m < k && d > pow(q, (m - 1) * h)? {
                m += 1;
            }
            (m, m - 1)
        }
        CorollaryVariant::Fractional => {
            let mut m = 2;
            while m < k && d > pow(q, (m - 1) * h + r0)? {
                m += 1;
            }
            (m, m.saturating_sub(2))
        }
    };
    let mut s = Q::from(0);
    for j in 1..=terms {
        s += Q::new(d, pow(q, j * h)?);
    }
    Ok(k as i128 + d - m as i128 + ceil(s))
}

/// `d + ⌈(q-1)/(q^h-1) · Σ_{j=1}^{r-h} ⌈d/q^j⌉⌉`.
pub fn additive_bound2(q: u32, h: u32, r: u32, d: u64) -> Result<i128> {
    check_pos(&[q, h, r])?;
    if d == 0 {
        return Err(BoundsError::NonPositive);
    }
    if r < h {
        return Err(BoundsError::RBelowH { r, h });
    }
    let d = d as i128;
    let mut s: i128 = 0;
    for j in 1..=(r - h) {
        let pj = pow(q, j)?;
        s += (d + pj - 1) / pj;
    }
    Ok(d + ceil(Q::new((q as i128 - 1) * s, pow(q, h)? - 1)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub addbound: i128,
    pub addbound2: i128,
    pub m: Option<u32>,
    /// `(k-m)(q^h-1) ≥ (r-h)(q-1) + q^h - q` with `d ≤ q^r`.
    pub hypothesis: bool,
    pub addbound_better: bool,
    pub addbound2_better_or_equal: bool,
}

pub fn bound_comparison(q: u32, h: u32, r: u32, d: u64) -> Result<Comparison> {
    let rep = additive_griesmer(q, h, r, d)?;
    let b1 = rep.value("additive_griesmer").expect("present");
    let b2 = additive_bound2(q, h, r, d)?;
    let hypothesis = match rep.m_opt {
        None => false,
        Some(m) => {
            let lhs = (rep.k as i128 - m as i128) * (pow(q, h)? - 1);
            let rhs = (r as i128 - h as i128) * (q as i128 - 1) + pow(q, h)? - q as i128;
            lhs >= rhs && (d as i128) <= pow(q, r)?
        }
    };
    Ok(Comparison {
        addbound: b1,
        addbound2: b2,
        m: rep.m_opt,
        hypothesis,
        addbound_better: b1 > b2,
        addbound2_better_or_equal: b2 >= b1,
    })
}

/// Upper bounds on `d`, `n` and `k` for additive MDS codes with `r > h`.
pub fn mds_parameter_bounds(q: u32, h: u32, r: u32, faithful: bool) -> Result<BoundReport> {
    check_pos(&[q, h, r])?;
    if r <= h {
        return Err(BoundsError::RNotAboveH { r, h });
    }
    let (k, r0) = k_r0(h, r);
    let qh = pow(q, h)?;
    let qr0 = pow(q, r0)?;
    let frac = Q::new(qh - 1, qr0 - 1);
    let d_max = floor(Q::from(qh - 1) + frac);
    let n_max = floor(Q::from(k as i128 - 2 + qh) + frac);
    let mut entries = vec![
        BoundEntry { name: "dbound_d".into(), kind: "max_d", value: d_max, applicable: faithful, satisfied: None },
        BoundEntry { name: "dbound_n".into(), kind: "max_n", value: n_max, applicable: faithful, satisfied: None },
    ];
    let deg = Q::new(qh - pow(q, r0 + 1)?, qr0 - 1);
    entries.push(BoundEntry {
        name: "degbound_d".into(),
        kind: "max_d",
        value: floor(Q::from(qh) + deg),
        applicable: !faithful,
        satisfied: None,
    });
    entries.push(BoundEntry {
        name: "degbound_n".into(),
        kind: "max_n",
        value: floor(Q::from(qh + k as i128 - 1) + deg),
        applicable: !faithful,
        satisfied: None,
    });
    if !faithful {
        // The faithful bounds hold for every MDS code.
        entries[0].applicable = true;
        entries[1].applicable = true;
    }
    entries.push(BoundEntry { name: "kbound".into(), kind: "max_k", value: qh - 1, applicable: true, satisfied: None });
    entries.push(BoundEntry {
        name: "linear_baseline_d".into(),
        kind: "max_d",
        value: qh,
        applicable: false,
        satisfied: None,
    });
    entries.push(BoundEntry {
        name: "linear_baseline_n".into(),
        kind: "max_n",
        value: qh + k as i128 - 1,
        applicable: false,
        satisfied: None,
    });
    entries.push(BoundEntry {
        name: "linear_baseline_k".into(),
        kind: "max_k",
        value: qh - 1,
        applicable: false,
        satisfied: None,
    });
    Ok(BoundReport {
        q,
        h,
        r,
        d: None,
        n: None,
        k,
        r0,
        m_opt: None,
        f_value: None,
        b_values: Vec::new(),
        theorem_applicable: true,
        entries,
    })
}

/// Every bound relevant to `(q, h, r, d)`, checked against `n` when given.
///
/// The MDS-only upper bounds are marked applicable only when `n - d + 1 = k`.
pub fn full_report(q: u32, h: u32, r: u32, d: u64, n: Option<u64>) -> Result<BoundReport> {
    let mut rep = additive_griesmer(q, h, r, d)?;
    rep.n = n;
    let (k, _) = k_r0(h, r);
    rep.entries.push(BoundEntry {
        name: "singleton".into(),
        kind: "min_n",
        value: k as i128 + d as i128 - 1,
        applicable: true,
        satisfied: None,
    });
    let variant = if r % h == 0 { CorollaryVariant::Integral } else { CorollaryVariant::Fractional };
    let name = match variant {
        CorollaryVariant::Integral => "corollary_integral",
        CorollaryVariant::Fractional => "corollary_fractional",
    };
    rep.entries.push(BoundEntry {
        name: name.into(),
        kind: "min_n",
        value: additive_griesmer_corollary(q, h, r, d, variant)?,
        applicable: true,
        satisfied: None,
    });
    if r >= h {
        rep.entries.push(BoundEntry {
            name: "additive_bound2".into(),
            kind: "min_n",
            value: additive_bound2(q, h, r, d)?,
            applicable: true,
            satisfied: None,
        });
    }
    if r % h == 0 {
        rep.entries.push(BoundEntry {
            name: "griesmer_linear".into(),
            kind: "min_n",
            value: griesmer_linear(pow(q, h)? as u32, k, d)? as i128,
            applicable: false,
            satisfied: None,
        });
    }
    let is_mds = n.map(|n| n as i128 - d as i128 + 1 == k as i128).unwrap_or(false);
    if r > h {
        let mds = mds_parameter_bounds(q, h, r, true)?;
        for mut e in mds.entries {
            if e.name.starts_with("degbound") {
                // Faithfulness is unknown here.
                e.applicable = false;
            } else if e.name.starts_with("dbound") {
                e.applicable = is_mds;
            } else if e.name == "kbound" {
                e.applicable = is_mds && n.is_some_and(|n| n >= k as u64 + 2);
            }
            rep.entries.push(e);
        }
    }
    if let Some(n) = n {
        let n = n as i128;
        for e in rep.entries.iter_mut() {
            e.satisfied = Some(match e.kind {
                "min_n" => n >= e.value,
                "max_d" => (d as i128) <= e.value,
                "max_n" => n <= e.value,
                _ => (k as i128) <= e.value,
            });
        }
    }
    Ok(rep)
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={} h={} r={} k={} r0={}", self.q, self.h, self.r, self.k, self.r0)?;
        if let Some(d) = self.d {
            write!(f, " d={d}")?;
        }
        if let Some(n) = self.n {
            write!(f, " n={n}")?;
        }
        writeln!(f)?;
        match self.m_opt {
            Some(m) => writeln!(f, "m={} f(q,m)={}", m, self.f_value.as_deref().unwrap_or("?"))?,
            None if self.d.is_some() => writeln!(f, "k=1: additive Griesmer theorem not applicable, n >= d")?,
            None => {}
        }
        for (m, b) in &self.b_values {
            writeln!(f, "  B({m}) = {b}")?;
        }
        for e in &self.entries {
            let rel = match e.kind {
                "min_n" => "n >=",
                "max_d" => "d <=",
                "max_n" => "n <=",
                _ => "k <=",
            };
            let status = match (e.applicable, e.satisfied) {
                (false, _) => " (not applied)".to_string(),
                (true, Some(true)) => " ok".to_string(),
                (true, Some(false)) => " VIOLATED".to_string(),
                (true, None) => String::new(),
            };
            writeln!(f, "{:<22} {} {}{}", e.name, rel, e.value, status)?;
        }
        Ok(())
    }
}
