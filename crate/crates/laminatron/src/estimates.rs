//! Recursive bounds on intersection numbers along a sequence: the products
//! `A(i,k)`, the upper and lower recursions `K`, `K'`, the constants derived
//! from them, and their check against exact intersection tables.

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::intersection;
use crate::curves::realize::arcs_per_region;
use crate::curves::{Curve, Interval, Letter, Surface};
use crate::error::{invalid, Error, Result};
use crate::exactnum::{format_rat, rat_from_int, rat_str, show_rat, BigRat, ESequence};
use crate::family::{GeneratedSequence, IntersectionTable};
use crate::verify::normalize_window;

/// Default multiplicative slack allowed between the truncated and certified `K1`.
pub fn default_tail_eps() -> BigRat {
    BigRat::new(BigInt::one(), BigInt::from(1_000_000))
}

fn ri(v: &BigInt) -> BigRat {
    rat_from_int(v)
}

fn rpow(a: &BigRat, e: i64) -> BigRat {
    Pow::pow(a, e as i32)
}

/// `floor(x / m)` for possibly negative `x`.
fn fdiv(x: i64, m: usize) -> i64 {
    x.div_euclid(m as i64)
}

/// Truncated infinite product for `K1` with a certified upper bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K1Bound {
    #[serde(with = "rat_str")]
    pub a: BigRat,
    /// Product over the first `factors` terms; a lower bound for `K1`.
    #[serde(with = "rat_str")]
    pub truncated: BigRat,
    /// `truncated / (1 - tail)`, where `tail` bounds the sum of the remaining terms.
    #[serde(with = "rat_str")]
    pub upper: BigRat,
    #[serde(with = "rat_str")]
    pub tail: BigRat,
    pub factors: usize,
}

/// `K1(a) = b2 prod_{l >= 0} (1 + 4mB a^-floor((l+1)/m))`, truncated after all
/// factors with exponent below `q` and closed with `prod (1 + x) <= 1 / (1 - sum x)`.
pub fn compute_k1(m: usize, big_b: &BigInt, b2: &BigInt, a: &BigRat, tail_eps: &BigRat) -> Result<K1Bound> {
    if *a <= BigRat::one() {
        return invalid("growth base a must exceed 1");
    }
    if !tail_eps.is_positive() {
        return invalid("tail tolerance must be positive");
    }
    if m == 0 {
        return invalid("m must be positive");
    }
    let x = ri(&(BigInt::from(4 * m) * big_b));
    let target = BigRat::one() + tail_eps;
    let mut prod = ri(b2);
    let mut factors = 0usize;
    let mut q: i64 = 0;
    loop {
        // factors with exponent q: l in [qm - 1, qm + m - 2], just [0, m - 2] when q = 0
        let count = if q == 0 { m - 1 } else { m };
        let f = BigRat::one() + &x / rpow(a, q);
        for _ in 0..count {
            prod *= &f;
        }
        factors += count;
        q += 1;
        // remaining sum: m * x * sum_{j >= q} a^-j = m x a^(1-q) / (a - 1)
        let tail = ri(&BigInt::from(m)) * &x * rpow(a, 1 - q) / (a - BigRat::one());
        if tail < BigRat::one() {
            let scale = BigRat::one() / (BigRat::one() - &tail);
            if scale <= target {
                return Ok(K1Bound { a: a.clone(), upper: &prod * scale, truncated: prod, tail, factors });
            }
        }
        if q > 100_000 {
            return Err(Error::InvalidInput("K1 tail did not converge".into()));
        }
    }
}

/// `C = 8mB K1 / (a - 1)` for a given `K1` value.
pub fn c_from_k1(m: usize, big_b: &BigInt, k1: &BigRat, a: &BigRat) -> BigRat {
    ri(&(BigInt::from(8 * m) * big_b)) * k1 / (a - BigRat::one())
}

/// Result of the search for the smallest admissible integer growth base.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleA {
    #[serde(with = "crate::curves::bigint_str")]
    pub a: BigInt,
    /// Certified upper bound for `C(a)`, below `b1`.
    #[serde(with = "rat_str")]
    pub c_upper: BigRat,
    /// Certified lower bound for `C(a - 1)`, at least `b1` (absent when `a = 2`).
    pub c_prev_lower: Option<String>,
}

/// `Some(true)` when `C(a) < b1` is certified, `Some(false)` when `C(a) >= b1` is.
fn decide(m: usize, big_b: &BigInt, b1: &BigInt, b2: &BigInt, a: &BigInt) -> Result<(Option<bool>, BigRat, BigRat)> {
    let ar = ri(a);
    let b1r = ri(b1);
    let mut eps = default_tail_eps();
    for _ in 0..6 {
        let k1 = compute_k1(m, big_b, b2, &ar, &eps)?;
        let hi = c_from_k1(m, big_b, &k1.upper, &ar);
        let lo = c_from_k1(m, big_b, &k1.truncated, &ar);
        if hi < b1r {
            return Ok((Some(true), hi, lo));
        }
        if lo >= b1r {
            return Ok((Some(false), hi, lo));
        }
        eps /= BigRat::from_integer(BigInt::from(1000));
    }
    let k1 = compute_k1(m, big_b, b2, &ar, &eps)?;
    Ok((None, c_from_k1(m, big_b, &k1.upper, &ar), c_from_k1(m, big_b, &k1.truncated, &ar)))
}

/// Smallest integer `a >= 2` with `C(a) < b1`, located by doubling and
/// bisection; `C` is decreasing in `a`. Undecided values count as inadmissible.
pub fn admissible_a(m: usize, big_b: &BigInt, b1: &BigInt, b2: &BigInt) -> Result<AdmissibleA> {
    if m == 0 || !big_b.is_positive() || !b1.is_positive() || !b2.is_positive() {
        return invalid("admissible_a needs positive inputs");
    }
    let ok = |a: &BigInt| -> Result<bool> { Ok(decide(m, big_b, b1, b2, a)?.0 == Some(true)) };
    let two = BigInt::from(2);
    let mut hi = two.clone();
    while !ok(&hi)? {
        hi *= 2;
    }
    let mut lo = if hi == two { BigInt::one() } else { &hi / 2 };
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2;
        if ok(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (_, c_upper, _) = decide(m, big_b, b1, b2, &hi)?;
    let c_prev_lower = if hi > two {
        let (d, _, lo_c) = decide(m, big_b, b1, b2, &(&hi - 1))?;
        Some(if d == Some(false) { format_rat(&lo_c) } else { format!("undecided ({})", format_rat(&lo_c)) })
    } else {
        None
    };
    Ok(AdmissibleA { a: hi, c_upper, c_prev_lower })
}

/// Arc counts of `gamma'_k` in the complement of `gamma_{k-2m} .. gamma_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BMeasure {
    pub value: usize,
    /// `(k, largest arc count in one region)` per window examined.
    pub windows: Vec<(usize, usize)>,
    /// The a priori bound `2m b2`.
    #[serde(with = "crate::curves::bigint_str")]
    pub bound: BigInt,
}

/// Measures the arc constant on the windows `k = 2m .. 3m-1`, one per residue
/// class mod `m`; later windows are images of these under the construction.
pub fn measure_big_b(seq: &GeneratedSequence) -> Result<BMeasure> {
    let m = seq.m();
    if seq.len() < 3 * m {
        return Err(Error::InsufficientPrefix(format!("need {} curves to measure B", 3 * m)));
    }
    let windows: Vec<(usize, usize)> = (2 * m..3 * m)
        .into_par_iter()
        .map(|k| {
            let p = seq.primed[k].as_ref().ok_or_else(|| Error::InsufficientPrefix(format!("missing g'{k}")))?;
            let mut w: Vec<Curve> = seq.curves[k - 2 * m..k].to_vec();
            w.push(p.clone());
            let w = normalize_window(&w)?;
            let (extra, base) = w.split_last().unwrap();
            Ok((k, arcs_per_region(base, extra)?.max))
        })
        .collect::<Result<_>>()?;
    let value = windows.iter().map(|w| w.1).max().unwrap_or(0);
    Ok(BMeasure { value, windows, bound: BigInt::from(2 * m) * &seq.spec.b2 })
}

/// Exact tables of `A`, `K`, `K'` for indices below `n`, with the constants.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateLedger {
    pub m: usize,
    pub b: BigInt,
    pub b1: BigInt,
    pub b2: BigInt,
    pub big_b: BigInt,
    pub eseq: ESequence,
    pub n: usize,
    pub k1: K1Bound,
    /// `C`, computed from the certified upper bound for `K1`.
    pub c: BigRat,
    pub k2: BigRat,
    pub kappa: BigRat,
    /// Whether `C < b1` holds for the sequence's growth base.
    pub admissible: bool,
    /// Row `i` holds values for `k = i .. n-1`.
    a_tab: Vec<Vec<BigInt>>,
    k_tab: Vec<Vec<BigRat>>,
    /// Row `i` holds values for `k = i+m .. n-1`.
    kp_tab: Vec<Vec<BigRat>>,
}

impl EstimateLedger {
    pub fn new(
        m: usize,
        b: BigInt,
        b1: BigInt,
        b2: BigInt,
        big_b: BigInt,
        eseq: ESequence,
        n: usize,
        tail_eps: &BigRat,
    ) -> Result<Self> {
        if m < 2 {
            return invalid("m must be at least 2");
        }
        if n > eseq.len() + m {
            return invalid(format!("{n} indices need at least {} twist powers", n - m));
        }
        let a = eseq.a().clone();
        let k1 = compute_k1(m, &big_b, &b2, &a, tail_eps)?;
        let c = c_from_k1(m, &big_b, &k1.upper, &a);
        let k2 = &c / BigRat::from_integer(BigInt::from(2));
        let kappa = if k1.upper >= k2.recip() { k1.upper.clone() } else { k2.recip() };
        let admissible = c < ri(&b1);
        let a_tab: Vec<Vec<BigInt>> = (0..n).map(|i| a_row(m, &b, &eseq, i, n)).collect();
        let (k_tab, kp_tab): (Vec<_>, Vec<_>) =
            (0..n).into_par_iter().map(|i| k_rows(m, &b2, &big_b, &c, &a_tab[i], i, n)).unzip();
        Ok(EstimateLedger { m, b, b1, b2, big_b, eseq, n, k1, c, k2, kappa, admissible, a_tab, k_tab, kp_tab })
    }

    /// Ledger for a generated sequence with a measured arc constant.
    pub fn for_sequence(seq: &GeneratedSequence, big_b: BigInt, n: usize) -> Result<Self> {
        let s = &seq.spec;
        Self::new(s.m, s.b.clone(), s.b1.clone(), s.b2.clone(), big_b, s.eseq.clone(), n, &default_tail_eps())
    }

    pub fn a(&self) -> &BigRat {
        self.eseq.a()
    }

    /// `A(i,k)` for `i <= k < n`.
    pub fn compute_a(&self, i: usize, k: usize) -> &BigInt {
        assert!(i <= k && k < self.n, "A({i},{k}) outside the ledger");
        &self.a_tab[i][k - i]
    }

    pub fn k(&self, i: usize, k: usize) -> &BigRat {
        assert!(i <= k && k < self.n, "K({i},{k}) outside the ledger");
        &self.k_tab[i][k - i]
    }

    /// `K'(i,k)` for `i + m <= k < n`.
    pub fn k_prime(&self, i: usize, k: usize) -> &BigRat {
        assert!(i + self.m <= k && k < self.n, "K'({i},{k}) outside the ledger");
        &self.kp_tab[i][k - i - self.m]
    }

    /// `b2 prod_{i+m <= j < k} (1 + 4mB a^(1 - floor((j-i+1)/m)))`.
    pub fn k_product_bound(&self, i: usize, k: usize) -> BigRat {
        let x = ri(&(BigInt::from(4 * self.m) * &self.big_b));
        let mut p = ri(&self.b2);
        for j in i + self.m..k {
            p *= BigRat::one() + &x * rpow(self.a(), 1 - fdiv((j - i + 1) as i64, self.m));
        }
        p
    }

    /// Failures of the standing inequalities among the ledger's own entries.
    pub fn invariant_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for k in i..self.n {
                if self.k(i, k) > &self.k_product_bound(i, k) {
                    out.push(format!("K({i},{k}) exceeds its product bound"));
                }
                if self.k(i, k) > &self.k1.upper {
                    out.push(format!("K({i},{k}) exceeds K1"));
                }
                if self.admissible && k >= i + self.m && self.k_prime(i, k) < &self.k2 {
                    out.push(format!("K'({i},{k}) below K2"));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = |t: &Vec<Vec<BigRat>>| -> Vec<Vec<String>> {
            t.iter().map(|r| r.iter().map(show_rat).collect()).collect()
        };
        serde_json::json!({
            "m": self.m,
            "b": self.b.to_string(),
            "b1": self.b1.to_string(),
            "b2": self.b2.to_string(),
            "B": self.big_b.to_string(),
            "eseq": self.eseq,
            "n": self.n,
            "K1": self.k1,
            "C": format_rat(&self.c),
            "K2": format_rat(&self.k2),
            "kappa": format_rat(&self.kappa),
            "admissible": self.admissible,
            "A": self.a_tab.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "K": rows(&self.k_tab),
            "K_prime": rows(&self.kp_tab),
        })
    }
}

fn a_row(m: usize, b: &BigInt, eseq: &ESequence, i: usize, n: usize) -> Vec<BigInt> {
    let mut row: Vec<BigInt> = Vec::with_capacity(n - i);
    for k in i..n {
        let v = if k < i + 2 * m { BigInt::one() } else { b * eseq.e(k - m) * &row[k - m - i] };
        row.push(v);
    }
    row
}

fn k_rows(
    m: usize,
    b2: &BigInt,
    big_b: &BigInt,
    c: &BigRat,
    a_row: &[BigInt],
    i: usize,
    n: usize,
) -> (Vec<BigRat>, Vec<BigRat>) {
    let two_b = ri(&(BigInt::from(2) * big_b));
    let mut k: Vec<BigRat> = Vec::with_capacity(n - i);
    let mut kp: Vec<BigRat> = Vec::new();
    for kk in i..n {
        let v = if kk < i + m {
            BigRat::zero()
        } else if kk < i + 2 * m {
            ri(b2)
        } else {
            let s: BigRat = (kk - 2 * m..kk).map(|l| BigRat::new(a_row[l - i].clone(), a_row[kk - i].clone()) * &k[l - i]).sum();
            let prev = kp[kk - 2 * m - i].clone();
            kp.push(prev - &two_b * &s);
            &k[kk - m - i] + &two_b * s
        };
        if kk >= i + m && kk < i + 2 * m {
            kp.push(c.clone());
        }
        k.push(v);
    }
    (k, kp)
}

/// One pair of the sandwich check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandwichRow {
    pub i: usize,
    pub k: usize,
    pub value: String,
    pub a: String,
    pub k_a: String,
    pub kp_a: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub rows: Vec<SandwichRow>,
    /// Largest `i(gamma_i, gamma_k) / A(i,k)` over pairs with `k >= i + m`.
    pub max_ratio: String,
    /// Smallest such ratio.
    pub min_ratio: String,
    pub k1: String,
    pub k2: String,
    /// Failures of `A(i,l)/A(i,k) <= a^(1 - floor((k-i)/m))`.
    pub ratio_failures: Vec<String>,
    /// Failures of the twist-step inequality along table rows.
    pub twist_step_failures: Vec<String>,
    pub ledger_failures: Vec<String>,
    pub admissible: bool,
    pub pass: bool,
}

impl SandwichReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,k,intersection,A,K*A,K'*A,pass\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{},{},{}\n", r.i, r.k, r.value, r.a, r.k_a, r.kp_a, r.pass));
        }
        out
    }
}

/// Checks `K2 A <= i <= K1 A` and `K' A <= i <= K A` on every pair of the
/// table, plus the ratio bound and the twist-step inequality.
pub fn verify_sandwich(table: &IntersectionTable, ledger: &EstimateLedger) -> Result<SandwichReport> {
    let n = table.len().min(ledger.n);
    let m = ledger.m;
    let mut rows = Vec::new();
    let mut max_ratio: Option<BigRat> = None;
    let mut min_ratio: Option<BigRat> = None;
    for i in 0..n {
        for k in i..n {
            let v = table.get(i, k);
            let vr = ri(v);
            let a = ri(ledger.compute_a(i, k));
            let ka = ledger.k(i, k) * &a;
            let (kpa, pass) = if k < i + m {
                (None, v.is_zero())
            } else {
                let kpa = ledger.k_prime(i, k) * &a;
                let ratio = &vr / &a;
                if max_ratio.as_ref().is_none_or(|x| &ratio > x) {
                    max_ratio = Some(ratio.clone());
                }
                if min_ratio.as_ref().is_none_or(|x| &ratio < x) {
                    min_ratio = Some(ratio);
                }
                let pass = &ledger.k2 * &a <= vr && vr <= &ledger.k1.upper * &a && kpa <= vr && vr <= ka;
                (Some(kpa), pass)
            };
            rows.push(SandwichRow {
                i,
                k,
                value: v.to_string(),
                a: a.to_string(),
                k_a: show_rat(&ka),
                kp_a: kpa.as_ref().map(show_rat).unwrap_or_default(),
                pass,
            });
        }
    }

    let mut ratio_failures = Vec::new();
    for i in 0..n {
        for k in i + 1..n {
            let bound = rpow(ledger.a(), 1 - fdiv((k - i) as i64, m));
            for l in i..k {
                let r = BigRat::new(ledger.compute_a(i, l).clone(), ledger.compute_a(i, k).clone());
                if r > bound {
                    ratio_failures.push(format!("A({i},{l})/A({i},{k}) = {} > {}", show_rat(&r), show_rat(&bound)));
                }
            }
        }
    }

    let mut twist_step_failures = Vec::new();
    for i in 0..n {
        for k in 2 * m..n {
            if let Some(msg) = twist_step_violation(&ledger.b, &ledger.big_b, ledger.eseq.e(k - m), m, k, |l| table.get(i, l).clone()) {
                twist_step_failures.push(format!("delta = g{i}: {msg}"));
            }
        }
    }

    let ledger_failures = ledger.invariant_failures();
    let pass = rows.iter().all(|r| r.pass)
        && ratio_failures.is_empty()
        && twist_step_failures.is_empty()
        && ledger_failures.is_empty()
        && ledger.admissible;
    let fmt = |x: Option<BigRat>| x.map(|r| show_rat(&r)).unwrap_or_else(|| "none".into());
    Ok(SandwichReport {
        rows,
        max_ratio: fmt(max_ratio),
        min_ratio: fmt(min_ratio),
        k1: format_rat(&ledger.k1.upper),
        k2: format_rat(&ledger.k2),
        ratio_failures,
        twist_step_failures,
        ledger_failures,
        admissible: ledger.admissible,
        pass,
    })
}

/// `|i(d, g_k) - b e_{k-m} i(d, g_{k-m})| <= 2B sum_{l=k-2m}^{k-1} i(d, g_l)`,
/// with `row(l) = i(d, g_l)`; returns a description when it fails.
pub fn twist_step_violation(
    b: &BigInt,
    big_b: &BigInt,
    e: &BigInt,
    m: usize,
    k: usize,
    row: impl Fn(usize) -> BigInt,
) -> Option<String> {
    let lhs = (row(k) - b * e * row(k - m)).abs();
    let s: BigInt = (k - 2 * m..k).map(&row).sum();
    let rhs = BigInt::from(2) * big_b * s;
    (lhs > rhs).then(|| format!("k = {k}: {lhs} > {rhs}"))
}

/// Both sides of `|i(T_beta^e d, d') - |e| i(beta,d) i(beta,d')| <= i(d,d')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistInequality {
    pub deviation: BigInt,
    pub allowance: BigInt,
}

impl TwistInequality {
    pub fn holds(&self) -> bool {
        self.deviation <= self.allowance
    }
}

pub fn twist_inequality(beta: &Curve, delta: &Curve, delta_p: &Curve, e: &BigInt) -> Result<TwistInequality> {
    let twisted = beta.twist(e.clone()).apply(delta)?;
    let lhs = intersection(&twisted, delta_p)?;
    let main = e.abs() * intersection(beta, delta)? * intersection(beta, delta_p)?;
    Ok(TwistInequality { deviation: (lhs - main).abs(), allowance: intersection(delta, delta_p)? })
}

/// A twist-formula instance `(beta, delta, delta', e)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistSample {
    pub beta: Curve,
    pub delta: Curve,
    pub delta_p: Curve,
    pub e: i64,
}

/// Random curves `w(c)` with `c` round and `w` a braid word of length at most
/// `max_len`, and powers `|e| <= max_e`; reproducible from `seed`.
pub fn random_twist_samples(s: Surface, count: usize, max_len: usize, max_e: i64, seed: u64) -> Result<Vec<TwistSample>> {
    let n = s.n();
    if n < 3 {
        return invalid("need at least three strands");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let curve = |rng: &mut ChaCha8Rng| -> Result<Curve> {
        let iv = loop {
            let a = rng.gen_range(1..n);
            let b = rng.gen_range(a + 1..=n);
            if let Ok(iv) = Interval::new(a, b, n) {
                break iv;
            }
        };
        let len = rng.gen_range(0..=max_len);
        let letters: Vec<Letter> = (0..len).map(|_| Letter::Half { i: rng.gen_range(1..n), inverse: rng.gen() }).collect();
        Curve::round(s, iv)?.apply_letters(&letters)
    };
    (0..count)
        .map(|_| {
            Ok(TwistSample {
                beta: curve(&mut rng)?,
                delta: curve(&mut rng)?,
                delta_p: curve(&mut rng)?,
                e: rng.gen_range(-max_e..=max_e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, make_esequence, rat, SequenceMode};
    use crate::family::{generate_s05, pentagon, FamilySpec};

    fn ledger(m: usize, b: i64, b2: i64, big_b: i64, values: &[i64], a: BigRat, n: usize) -> EstimateLedger {
        let e = ESequence::new(a, values.iter().map(|&v| int(v)).collect()).unwrap();
        EstimateLedger::new(m, int(b), int(b), int(b2), int(big_b), e, n, &default_tail_eps()).unwrap()
    }

    #[test]
    fn a_products() {
        let l = ledger(2, 2, 2, 2, &[1, 2, 4, 8, 16, 32], rat(2, 1), 7);
        assert_eq!(l.compute_a(0, 6), &int(256));
        // independent: direct product over j = k mod m with i + m <= j < k
        for i in 0..7 {
            for k in i..7 {
                let direct: BigInt = (i + 2..k).filter(|j| (k - j) % 2 == 0).map(|j| int(2) * l.eseq.e(j)).product();
                assert_eq!(l.compute_a(i, k), &direct, "A({i},{k})");
            }
            if i + 2 < 7 {
                assert_eq!(l.compute_a(i, i + 2), &int(1));
            }
            if i + 4 < 7 {
                assert_eq!(l.compute_a(i, i + 4), &(int(2) * l.eseq.e(i + 2)));
            }
        }
    }

    #[test]
    fn k1_bounds_bracket_and_decrease() {
        let (b, b2) = (int(8), int(2));
        let eps = default_tail_eps();
        let mut prev: Option<BigRat> = None;
        for a in [2, 4, 16, 128, 1024, 1 << 20] {
            let k = compute_k1(2, &b, &b2, &rat(a, 1), &eps).unwrap();
            assert!(k.truncated <= k.upper);
            assert!(k.upper <= &k.truncated * (BigRat::one() + &eps));
            if let Some(p) = &prev {
                assert!(&k.truncated < p);
            }
            prev = Some(k.upper.clone());
        }
        // a -> infinity: every factor but the first m-1 tends to 1
        let k = compute_k1(2, &b, &b2, &rat(1 << 40, 1), &eps).unwrap();
        let first = ri(&b2) * (BigRat::one() + rat(64, 1));
        assert!(k.truncated >= first && k.upper < &first * rat(1001, 1000));
    }

    #[test]
    fn k1_at_128_matches_hand_product() {
        // m = 2, B = 8, b2 = 2: factors (1+64), then (1 + 64/128^j) twice for each j >= 1
        let k = compute_k1(2, &int(8), &int(2), &rat(128, 1), &default_tail_eps()).unwrap();
        let mut p = rat(2, 1) * rat(65, 1);
        let mut j = 1;
        while k.factors > 2 * j - 1 {
            let f = rat(1, 1) + rat(64, 1) / Pow::pow(rat(128, 1), j as i32);
            p = p * &f * &f;
            j += 1;
        }
        assert_eq!(p, k.truncated);
        let approx = crate::exactnum::rat_to_f64(&k.upper);
        assert!((approx - 130.0 * 1.5f64.powi(2) * (1.0 + 64.0 / 16384.0f64).powi(2)).abs() < 0.1, "{approx}");
    }

    #[test]
    fn k1_rejects_small_base() {
        assert!(compute_k1(2, &int(2), &int(2), &rat(1, 1), &default_tail_eps()).is_err());
    }

    #[test]
    fn admissible_a_is_minimal() {
        for (m, b, b1, b2) in [(2, 8, 2, 2), (2, 2, 2, 2), (3, 4, 1, 3)] {
            let r = admissible_a(m, &int(b), &int(b1), &int(b2)).unwrap();
            assert!(r.a >= int(16), "{r:?}");
            assert!(r.c_upper < ri(&int(b1)));
            let prev = r.c_prev_lower.as_ref().unwrap();
            assert!(!prev.starts_with("undecided"));
            let (d, _, _) = decide(m, &int(b), &int(b1), &int(b2), &(&r.a - 1)).unwrap();
            assert_eq!(d, Some(false));
        }
    }

    #[test]
    fn recursions_match_hand_values() {
        let l = ledger(2, 2, 2, 1, &[1, 2, 4, 8, 16, 32], rat(2, 1), 6);
        assert_eq!(l.k(0, 1), &BigRat::zero());
        assert_eq!(l.k(0, 2), &rat(2, 1));
        assert_eq!(l.k(0, 3), &rat(2, 1));
        // K(0,4) = K(0,2) + 2B (A(0,0)K(0,0) + A(0,1)K(0,1) + A(0,2)K(0,2) + A(0,3)K(0,3)) / A(0,4)
        // with A(0,4) = b e_2 = 8
        assert_eq!(l.k(0, 4), &(rat(2, 1) + rat(2, 1) * rat(4, 8)));
        assert_eq!(l.k_prime(0, 2), &l.c);
        assert_eq!(l.k_prime(0, 4), &(&l.c - rat(2, 1) * rat(4, 8)));
        assert!(l.invariant_failures().is_empty());
    }

    #[test]
    fn kappa_and_k2() {
        let l = ledger(2, 2, 2, 2, &[1, 600], rat(580, 1), 3);
        assert_eq!(l.k2, &l.c / rat(2, 1));
        let want = if l.k1.upper >= l.k2.recip() { l.k1.upper.clone() } else { l.k2.recip() };
        assert_eq!(l.kappa, want);
    }

    #[test]
    fn pentagon_b_is_two() {
        let e = make_esequence(rat(3, 1), int(4), 8, SequenceMode::Geometric).unwrap();
        let seq = generate_s05(&e, 7).unwrap();
        let bm = measure_big_b(&seq).unwrap();
        assert_eq!(bm.value, 2, "{bm:?}");
        assert!(BigInt::from(bm.value) <= bm.bound);
        let direct = arcs_per_region(&[pentagon(0), pentagon(1), pentagon(2), pentagon(3)], &pentagon(4)).unwrap();
        assert_eq!(direct.max, 2);
    }

    #[test]
    fn pentagon_sandwich_at_admissible_base() {
        let big_b = int(2);
        let adm = admissible_a(2, &big_b, &int(2), &int(2)).unwrap();
        let e = make_esequence(ri(&adm.a), int(1), 9, SequenceMode::Geometric).unwrap();
        let spec = FamilySpec::s05(e);
        let seq = crate::family::generate(&spec, 8, crate::family::DIGIT_BUDGET).unwrap();
        let table = seq.intersection_table(8).unwrap();
        let l = EstimateLedger::for_sequence(&seq, big_b, 8).unwrap();
        assert!(l.admissible);
        let r = verify_sandwich(&table, &l).unwrap();
        assert!(r.pass, "{:?} {:?} {:?}", r.ratio_failures, r.twist_step_failures, r.rows.iter().filter(|x| !x.pass).collect::<Vec<_>>());
        assert!(r.to_csv().lines().count() == 1 + 8 * 9 / 2);
    }

    #[test]
    fn sandwich_flags_small_base() {
        let e = make_esequence(rat(3, 1), int(4), 9, SequenceMode::Geometric).unwrap();
        let seq = generate_s05(&e, 8).unwrap();
        let table = seq.intersection_table(8).unwrap();
        let l = EstimateLedger::for_sequence(&seq, int(2), 8).unwrap();
        assert!(!l.admissible);
        let r = verify_sandwich(&table, &l).unwrap();
        assert!(!r.pass);
        // the upper bounds and the twist step do not need admissibility
        assert!(r.twist_step_failures.is_empty());
        assert!(r.rows.iter().all(|x| BigRat::from_integer(x.value.parse().unwrap()) <= crate::exactnum::parse_rat(&x.k_a).unwrap()));
    }

    #[test]
    fn twist_inequality_on_pentagon() {
        for (x, y, z) in [(0, 2, 4), (2, 0, 3), (1, 3, 0), (3, 0, 1)] {
            for e in [-7, -1, 0, 1, 5, 40] {
                let t = twist_inequality(&pentagon(x), &pentagon(y), &pentagon(z), &int(e)).unwrap();
                assert!(t.holds(), "{x} {y} {z} {e}: {t:?}");
            }
        }
    }

    #[test]
    fn random_samples_reproducible() {
        let s = Surface::s05();
        let x = random_twist_samples(s, 20, 12, 50, 7).unwrap();
        assert_eq!(x, random_twist_samples(s, 20, 12, 50, 7).unwrap());
        assert_ne!(x, random_twist_samples(s, 20, 12, 50, 8).unwrap());
        for t in &x {
            assert!(t.e.abs() <= 50);
            assert!(twist_inequality(&t.beta, &t.delta, &t.delta_p, &BigInt::from(t.e)).unwrap().holds());
        }
    }
}
