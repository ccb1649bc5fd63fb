//! Active intervals along a model Teichmüller ray, their ordering, and
//! width/length/twist/modulus profiles. Everything is in log-domain reals so
//! that super-exponential twist sequences stay representable.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exactnum::{ln_bigint, ln_rat, ESequence};

/// Relative slack used when comparing log-domain quantities.
const LOG_TOL: f64 = 1e-9;

/// `ln e_0..ln e_n` for `e_{k+1} = max(a e_k, (e_0 ... e_k)^2)`.
pub fn g1_minimal_logs(ln_a: f64, ln_e0: f64, n: usize) -> Vec<f64> {
    let mut v = vec![ln_e0];
    let mut sum = ln_e0;
    for _ in 0..n {
        let next = (v.last().unwrap() + ln_a).max(2.0 * sum);
        sum += next;
        v.push(next);
    }
    v
}

/// `ln e_0..ln e_n` for `e_k = e_0 a^k`.
pub fn geometric_logs(ln_a: f64, ln_e0: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| ln_e0 + k as f64 * ln_a).collect()
}

/// Whether `e_{k+1} >= (e_0 ... e_k)^2` holds throughout, up to rounding.
pub fn g1_holds(ln_e: &[f64]) -> bool {
    let mut sum = 0.0;
    for w in ln_e.windows(2) {
        sum += w[0];
        if w[1] < 2.0 * sum - LOG_TOL * sum.abs().max(1.0) {
            return false;
        }
    }
    true
}

/// Active interval `J_k = [lower, upper]` with balance time `mid`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub k: usize,
    pub lower: f64,
    pub mid: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineModel {
    pub m: usize,
    pub ln_a: f64,
    pub ln_b: f64,
    pub weights: Vec<f64>,
    pub ln_e: Vec<f64>,
    pub g1: bool,
    pub intervals: Vec<Interval>,
}

/// Builds the model from an exact twist sequence.
pub fn build_timeline(eseq: &ESequence, m: usize, b: &BigInt, weights: &[f64]) -> Result<TimelineModel> {
    if b < &BigInt::from(1) {
        return invalid("b must be positive");
    }
    let ln_e: Vec<f64> = eseq.values().iter().map(ln_bigint).collect();
    let mut t = build_timeline_from_logs(&ln_e, ln_rat(eseq.a()), m, ln_bigint(b), weights)?;
    t.g1 = eseq.g1();
    Ok(t)
}

/// Builds the model from `ln e_k`, `ln a` and `ln b`.
pub fn build_timeline_from_logs(ln_e: &[f64], ln_a: f64, m: usize, ln_b: f64, weights: &[f64]) -> Result<TimelineModel> {
    if m < 2 {
        return invalid("need m >= 2");
    }
    if weights.len() != m {
        return invalid(format!("expected {m} weights, got {}", weights.len()));
    }
    if weights.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return invalid("weights must be positive");
    }
    if !(ln_a > 0.0) || !(ln_b >= 0.0) {
        return invalid("need a > 1 and b >= 1");
    }
    if ln_e.len() < m || ln_e.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return invalid("need at least m finite twist powers >= 1");
    }
    for (k, w) in ln_e.windows(2).enumerate() {
        if w[1] < w[0] + ln_a - LOG_TOL * w[1].abs().max(1.0) {
            return invalid(format!("e_{} < a e_{}", k + 1, k));
        }
    }
    let mut intervals = Vec::with_capacity(ln_e.len());
    let mut prefix = vec![0.0; m];
    for (k, &le) in ln_e.iter().enumerate() {
        let h = k % m;
        let mid = prefix[h] + 0.5 * le - 0.5 * weights[h].ln();
        intervals.push(Interval { k, lower: mid - 0.5 * le, mid, upper: mid + 0.5 * le });
        prefix[h] += ln_b + le;
    }
    Ok(TimelineModel {
        m,
        ln_a,
        ln_b,
        weights: weights.to_vec(),
        ln_e: ln_e.to_vec(),
        g1: g1_holds(ln_e),
        intervals,
    })
}

impl TimelineModel {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn interval(&self, k: usize) -> Result<&Interval> {
        self.intervals
            .get(k)
            .ok_or_else(|| Error::InsufficientPrefix(format!("timeline has {} intervals, asked for {k}", self.len())))
    }

    pub fn lower(&self, k: usize) -> f64 {
        self.intervals[k].lower
    }

    pub fn mid(&self, k: usize) -> f64 {
        self.intervals[k].mid
    }

    pub fn upper(&self, k: usize) -> f64 {
        self.intervals[k].upper
    }

    /// `ln A(0,k)`: sum of `ln(b e_j)` over `j = k mod m`, `m <= j < k`.
    pub fn ln_c(&self, k: usize) -> f64 {
        (self.m..k).filter(|j| (k - j).is_multiple_of(self.m)).map(|j| self.ln_b + self.ln_e[j]).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,lower,mid,upper\n");
        for iv in &self.intervals {
            s.push_str(&format!("{},{},{},{}\n", iv.k, iv.lower, iv.mid, iv.upper));
        }
        s
    }
}

/// One link `left < right` (or `left << right`) of the ordering chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkCheck {
    pub link: String,
    pub k: usize,
    pub l: usize,
    pub gap: f64,
    pub holds: bool,
    /// Whether the gap must grow along `k -> k+m`.
    pub growing: bool,
    pub requires_g1: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub g1: bool,
    /// Largest `|upper_k - lower_{k+m} + ln b|`.
    pub shift_error: f64,
    pub links: Vec<LinkCheck>,
    /// Links skipped because the sequence lacks (G1).
    pub skipped: Vec<String>,
    /// First `k` from which every checked link holds.
    pub threshold: Option<usize>,
    /// First `(link, k, l)` whose gap fails to grow.
    pub gap_failure: Option<(String, usize, usize)>,
    /// First `(link, k, l)` whose inequality fails at or after the threshold.
    pub first_failure: Option<(String, usize, usize)>,
    pub pass: bool,
}

type LinkFn = fn(&TimelineModel, usize, usize) -> f64;

/// `(name, gap, growing, requires G1)`; `gap > 0` means the link holds.
fn link_table() -> Vec<(&'static str, LinkFn, bool, bool)> {
    vec![
        ("lower_k << lower_l", |t, k, l| t.lower(l) - t.lower(k), true, false),
        ("lower_l << mid_k", |t, k, l| t.mid(k) - t.lower(l), true, true),
        ("mid_k << upper_k", |t, k, _| t.upper(k) - t.mid(k), true, false),
        ("upper_k < lower_k+m", |t, k, _| t.lower(k + t.m) - t.upper(k), false, false),
        ("lower_k+m << mid_l", |t, k, l| t.mid(l) - t.lower(k + t.m), true, true),
        ("mid_l << upper_l", |t, _, l| t.upper(l) - t.mid(l), true, false),
        ("upper_l < lower_l+m", |t, _, l| t.lower(l + t.m) - t.upper(l), false, false),
        ("lower_l+m << mid_k+m", |t, k, l| t.mid(k + t.m) - t.lower(l + t.m), true, true),
        ("lower_l << upper_k", |t, k, l| t.upper(k) - t.lower(l), true, false),
        ("upper_k-m < lower_l", |t, k, l| if k >= t.m { t.lower(l) - t.upper(k - t.m) } else { f64::INFINITY }, false, false),
    ]
}

/// Checks the interval ordering chain for every `k < l < k+m` with
/// `l + m` inside the computed range.
pub fn check_ordering(model: &TimelineModel) -> OrderingReport {
    let m = model.m;
    let n = model.len();
    let shift_error = (0..n.saturating_sub(m))
        .map(|k| (model.upper(k) - model.lower(k + m) + model.ln_b).abs())
        .fold(0.0, f64::max);
    let mut links = Vec::new();
    let mut skipped = Vec::new();
    for (name, f, growing, needs_g1) in link_table() {
        if needs_g1 && !model.g1 {
            skipped.push(format!("{name} (requires (G1))"));
            continue;
        }
        for k in 0..n {
            for l in k + 1..k + m {
                if l + m >= n {
                    continue;
                }
                let gap = f(model, k, l);
                let scale = model.mid(l + m).abs().max(1.0);
                links.push(LinkCheck {
                    link: name.to_string(),
                    k,
                    l,
                    gap,
                    holds: gap > LOG_TOL * scale,
                    growing,
                    requires_g1: needs_g1,
                });
            }
        }
    }
    let last_bad = links.iter().filter(|c| !c.holds).map(|c| c.k).max();
    let max_k = links.iter().map(|c| c.k).max();
    let threshold = match (last_bad, max_k) {
        (None, Some(_)) => Some(0),
        (Some(b), Some(mk)) if b < mk => Some(b + 1),
        _ => None,
    };
    let from = threshold.unwrap_or(usize::MAX);
    let first_failure = links
        .iter()
        .find(|c| c.k >= from && !c.holds)
        .map(|c| (c.link.clone(), c.k, c.l));
    let mut gap_failure = None;
    for c in links.iter().filter(|c| c.growing && c.k >= from) {
        let next = links
            .iter()
            .find(|d| d.link == c.link && d.k == c.k + m && d.l == c.l + m);
        if let Some(d) = next {
            if d.gap <= c.gap {
                gap_failure = Some((c.link.clone(), c.k, c.l));
                break;
            }
        }
    }
    let pass = threshold.is_some() && gap_failure.is_none() && shift_error <= LOG_TOL * model.mid(n - 1).abs().max(1.0);
    OrderingReport { g1: model.g1, shift_error, links, skipped, threshold, gap_failure, first_failure, pass }
}

/// The two diverging products of the super-exponential growth condition, in
/// logs, along `i` for a fixed residue pair `(h, d)`, `h != d`.
pub fn g1_products(model: &TimelineModel, h: usize, d: usize) -> Vec<f64> {
    let m = model.m;
    let e = |j: usize, r: usize| model.ln_e.get(j * m + r).copied();
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let v = if h < d {
            // sqrt(e^d_i) / e^h_i * prod_{j<i} e^d_j / e^h_j
            let (Some(ed), Some(eh)) = (e(i, d), e(i, h)) else { break };
            let s: f64 = (0..i).map(|j| e(j, d).unwrap() - e(j, h).unwrap()).sum();
            0.5 * ed - eh + s
        } else {
            // sqrt(e^d_{i+1}) * prod_{j<=i} e^d_j / e^h_j
            let (Some(ed), Some(_)) = (e(i + 1, d), e(i, h)) else { break };
            let s: f64 = (0..=i).map(|j| e(j, d).unwrap() - e(j, h).unwrap()).sum();
            0.5 * ed + s
        };
        out.push(v);
        i += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductReport {
    pub h: usize,
    pub d: usize,
    pub ln_values: Vec<f64>,
    pub increasing: bool,
}

pub fn g1_product_report(model: &TimelineModel) -> Vec<ProductReport> {
    let mut out = Vec::new();
    for h in 0..model.m {
        for d in 0..model.m {
            if h == d {
                continue;
            }
            let v = g1_products(model, h, d);
            let increasing = v.windows(2).all(|w| w[1] > w[0]);
            out.push(ProductReport { h, d, ln_values: v, increasing });
        }
    }
    out
}

/// Model geometry of `gamma_k` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub t: f64,
    pub k: usize,
    pub width: f64,
    /// `exp(-width / 2)`.
    pub length: f64,
    pub ln_length: f64,
    /// Twist is `0` or `e_k`; stored as a flag plus `ln e_k`.
    pub twisted: bool,
    pub ln_twist: f64,
    pub ln_modulus: f64,
}

impl ProfileSample {
    pub fn twist(&self) -> f64 {
        if self.twisted {
            self.ln_twist.exp()
        } else {
            0.0
        }
    }

    pub fn modulus(&self) -> f64 {
        self.ln_modulus.exp()
    }

    /// `ln(width + twist * length)`.
    pub fn ln_contribution(&self) -> f64 {
        let tw = if self.twisted { self.ln_twist + self.ln_length } else { f64::NEG_INFINITY };
        log_add(self.width.ln(), tw)
    }
}

/// `ln(exp(x) + exp(y))`.
pub fn log_add(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2
}

/// Width grows like `4(t - lower_k)` up to `2 ln e_k` at the balance time and
/// decays symmetrically after it; twist jumps to `e_k` after balance.
pub fn profile(model: &TimelineModel, t: f64, k: usize) -> Result<ProfileSample> {
    let iv = *model.interval(k)?;
    let le = model.ln_e[k];
    let width = if t <= iv.mid { 4.0 * (t - iv.lower) } else { 4.0 * (iv.upper - t) }.clamp(0.0, 2.0 * le);
    Ok(ProfileSample {
        t,
        k,
        width,
        length: (-0.5 * width).exp(),
        ln_length: -0.5 * width,
        twisted: t > iv.mid,
        ln_twist: le,
        ln_modulus: le - 2.0 * ln_cosh(t - iv.mid),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, make_esequence, rat, SequenceMode};

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() <= 1e-9 * y.abs().max(1.0)
    }

    fn model(m: usize, logs: Vec<f64>) -> TimelineModel {
        build_timeline_from_logs(&logs, 3f64.ln(), m, 2f64.ln(), &vec![1.0; m]).unwrap()
    }

    #[test]
    fn first_balance_time() {
        let e = make_esequence(rat(2, 1), int(16), 5, SequenceMode::Geometric).unwrap();
        let t = build_timeline(&e, 2, &int(2), &[1.0, 1.0]).unwrap();
        assert!(close(t.mid(0), 2.0 * 2f64.ln()));
        assert!(close(t.lower(0), 0.0));
        // a_1^0 = ln(2 * 16) + ln(64) / 2
        assert!(close(t.mid(2), 32f64.ln() + 0.5 * 64f64.ln()));
    }

    #[test]
    fn rejects_bad_inputs() {
        let e = make_esequence(rat(2, 1), int(16), 5, SequenceMode::Geometric).unwrap();
        assert!(build_timeline(&e, 1, &int(2), &[1.0]).is_err());
        assert!(build_timeline(&e, 2, &int(2), &[1.0, 0.0]).is_err());
        assert!(build_timeline(&e, 2, &int(2), &[1.0]).is_err());
        assert!(build_timeline_from_logs(&[1.0, 1.5], 1.0, 2, 0.0, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn shift_is_log_b() {
        for m in 2..5 {
            let t = model(m, g1_minimal_logs(3f64.ln(), 3f64.ln(), 10));
            for k in 0..t.len() - m {
                assert!(close(t.upper(k) - t.lower(k + m), -2f64.ln()));
            }
        }
    }

    #[test]
    fn chain_for_g1_minimal() {
        for m in [2, 3] {
            let t = model(m, g1_minimal_logs(3f64.ln(), 3f64.ln(), 4 * m + 4));
            assert!(t.g1);
            let r = check_ordering(&t);
            assert!(r.skipped.is_empty());
            assert!(r.pass, "{:?} {:?} {:?}", r.threshold, r.first_failure, r.gap_failure);
        }
    }

    #[test]
    fn geometric_skips_g1_links() {
        let t = model(3, geometric_logs(3f64.ln(), 3f64.ln(), 20));
        assert!(!t.g1);
        let r = check_ordering(&t);
        assert_eq!(r.skipped.len(), 3);
        assert!(r.skipped.iter().all(|s| s.contains("requires (G1)")));
        assert!(r.pass);
    }

    #[test]
    fn disjoint_intervals_are_ordered() {
        let t = model(3, g1_minimal_logs(3f64.ln(), 3f64.ln(), 12));
        for k in 0..t.len() {
            for l in k + 3..t.len() {
                assert!(t.upper(k) < t.lower(l));
            }
        }
    }

    #[test]
    fn products_increase() {
        for m in [2, 3] {
            let t = model(m, g1_minimal_logs(3f64.ln(), 3f64.ln(), 4 * m));
            for r in g1_product_report(&t) {
                assert!(r.increasing, "{r:?}");
                assert!(r.ln_values.len() >= 3);
            }
        }
    }

    #[test]
    fn profile_landmarks() {
        let t = model(2, geometric_logs(3f64.ln(), 1000f64.ln(), 6));
        let k = 3;
        let le = t.ln_e[k];
        let p = profile(&t, t.lower(k), k).unwrap();
        assert_eq!(p.width, 0.0);
        assert_eq!(p.length, 1.0);
        assert!(!p.twisted);
        let p = profile(&t, t.mid(k), k).unwrap();
        assert!(close(p.width, 2.0 * le));
        assert!(close(p.ln_length, -le));
        assert!(close(p.modulus(), le.exp()));
        let p = profile(&t, t.upper(k), k).unwrap();
        let e = le.exp();
        assert!(close(p.modulus(), 4.0 * e * e / ((e + 1.0) * (e + 1.0))));
        assert!(p.twisted);
        assert!(close(p.twist(), e));
        assert!(profile(&t, 0.0, 99).is_err());
    }

    #[test]
    fn width_and_length_agree() {
        let t = model(3, g1_minimal_logs(3f64.ln(), 2f64.ln(), 6));
        for k in 0..t.len() {
            for s in 0..20 {
                let x = t.lower(k) - 1.0 + (t.upper(k) - t.lower(k) + 2.0) * s as f64 / 19.0;
                let p = profile(&t, x, k).unwrap();
                assert!(close(p.width, -2.0 * p.ln_length));
                assert!(p.width >= 0.0 && p.width <= 2.0 * t.ln_e[k] + 1e-9);
            }
        }
    }

    #[test]
    fn csv_dump() {
        let t = model(2, geometric_logs(3f64.ln(), 1.0, 3));
        let csv = t.to_csv();
        assert!(csv.starts_with("k,lower,mid,upper\n"));
        assert_eq!(csv.lines().count(), 5);
    }
}
