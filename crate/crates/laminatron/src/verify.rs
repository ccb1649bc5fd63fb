//! Certification of the intersection pattern of a generated sequence and the
//! consequences read off from it.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::dynnikov::beta_sum;
use crate::curves::realize::fills_within;
use crate::curves::{fills, intersection, relative_twisting, Curve, Letter};
use crate::error::{Error, Result};
use crate::exactnum::{rat, BigRat};
use crate::family::GeneratedSequence;

/// Outcome of one check at one index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCheck {
    pub index: usize,
    pub ok: bool,
    pub detail: String,
}

impl IndexCheck {
    fn new(index: usize, failures: Vec<String>) -> Self {
        let ok = failures.is_empty();
        IndexCheck { index, ok, detail: if ok { "ok".into() } else { failures.join("; ") } }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PReport {
    /// Number of curves examined.
    pub upto: usize,
    /// Windows of `m` consecutive curves are pairwise disjoint and distinct.
    pub disjoint: Vec<IndexCheck>,
    /// Windows of `2m` consecutive curves fill.
    pub filling: Vec<IndexCheck>,
    /// Twist normal form of `gamma_{k+m}` and the intersection pattern of `gamma'_{k+m}`.
    pub twist_form: Vec<IndexCheck>,
    /// Whether `i(gamma'_{k+m}, gamma_{k-m})` also lies in `[b1, b2]`; informational.
    pub lower_end_in_range: Vec<IndexCheck>,
    /// Distinct normalised windows passed to the filling test.
    pub orbit_types: usize,
    pub verdict: bool,
    pub failures: Vec<String>,
}

impl PReport {
    pub fn table(&self) -> String {
        let mut out = String::from("check        index  ok     detail\n");
        for (name, rows) in [("disjoint", &self.disjoint), ("filling", &self.filling), ("twist-form", &self.twist_form)] {
            for r in rows {
                out.push_str(&format!("{name:<12} {:>5}  {:<5}  {}\n", r.index, r.ok, r.detail));
            }
        }
        out.push_str(&format!("verdict: {}\n", if self.verdict { "pass" } else { "fail" }));
        out
    }
}

fn cost(cs: &[Curve]) -> BigInt {
    cs.iter().map(|c| beta_sum(c.coords(), c.surface().n())).sum()
}

/// Longest frame prefix tried as a single move in [`normalize_window`].
const PEEL_DEPTH: usize = 4;

/// Moves a family by one mapping class to a configuration of small
/// complexity, by peeling short leading frame prefixes while the total
/// complexity drops, and rebuilds short frames.
pub fn normalize_window(curves: &[Curve]) -> Result<Vec<Curve>> {
    let mut cur = curves.to_vec();
    let mut best_cost = cost(&cur);
    loop {
        let mut best: Option<(BigInt, Vec<Curve>)> = None;
        let mut tried: Vec<Vec<Letter>> = Vec::new();
        for c in &cur {
            let letters = &c.frame().letters;
            for len in 1..=letters.len().min(PEEL_DEPTH) {
                let inv: Vec<Letter> = letters[..len].iter().rev().map(Letter::inverse).collect();
                if tried.contains(&inv) {
                    continue;
                }
                let moved = cur.iter().map(|x| x.apply_letters(&inv)).collect::<Result<Vec<_>>>()?;
                tried.push(inv);
                let v = cost(&moved);
                if v < best_cost && best.as_ref().is_none_or(|(b, _)| &v < b) {
                    best = Some((v, moved));
                }
            }
        }
        match best {
            Some((v, moved)) => {
                best_cost = v;
                cur = moved;
            }
            None => break,
        }
    }
    cur.iter()
        .map(|c| match c.as_round() {
            Some(iv) => Curve::round(c.surface(), iv),
            None => Curve::from_coords(c.surface(), c.coords().to_vec()),
        })
        .collect()
}

fn window_key(cs: &[Curve]) -> Vec<Vec<BigInt>> {
    cs.iter().map(|c| c.coords().to_vec()).collect()
}

/// Checks the three defining conditions on `gamma_0 .. gamma_{upto-1}`.
/// Filling is decided once per normalised window; the bound at `j = k - m`
/// is only required to be at most `b2`, with the full range reported aside.
pub fn check_p(seq: &GeneratedSequence, upto: usize) -> Result<PReport> {
    let m = seq.m();
    let upto = upto.min(seq.len());
    if upto < 2 * m {
        return Err(Error::InsufficientPrefix(format!("need at least {} curves, have {upto}", 2 * m)));
    }
    let spec = &seq.spec;
    let table = seq.intersection_table(upto)?;
    let t = |i: usize, k: usize| table.get(i, k);

    let disjoint: Vec<IndexCheck> = (0..=upto - m)
        .map(|k| {
            let mut f = Vec::new();
            for i in k..k + m {
                for j in i + 1..k + m {
                    if !t(i, j).is_zero() {
                        f.push(format!("i(g{i}, g{j}) = {}", t(i, j)));
                    } else if seq.curves[i] == seq.curves[j] {
                        f.push(format!("g{i} = g{j}"));
                    }
                }
            }
            IndexCheck::new(k, f)
        })
        .collect();

    let mut memo: HashMap<Vec<Vec<BigInt>>, bool> = HashMap::new();
    let normalized: Vec<Result<Vec<Curve>>> =
        (0..=upto - 2 * m).into_par_iter().map(|k| normalize_window(&seq.curves[k..k + 2 * m])).collect();
    let mut filling = Vec::new();
    for (k, w) in normalized.into_iter().enumerate() {
        let check = match w {
            Err(e) => IndexCheck::new(k, vec![format!("normalisation failed: {e}")]),
            Ok(w) => {
                let key = window_key(&w);
                let res = match memo.get(&key) {
                    Some(&r) => Ok(r),
                    None => fills(&w).inspect(|&r| {
                        memo.insert(key, r);
                    }),
                };
                match res {
                    Ok(true) => IndexCheck::new(k, vec![]),
                    Ok(false) => IndexCheck::new(k, vec![format!("g{k}..g{} do not fill", k + 2 * m - 1)]),
                    Err(e) => IndexCheck::new(k, vec![format!("realization failed: {e}")]),
                }
            }
        };
        filling.push(check);
    }

    let per_k: Vec<Result<(IndexCheck, Option<IndexCheck>)>> = (0..upto - m)
        .into_par_iter()
        .map(|k| {
            let mut f = Vec::new();
            let Some(p) = seq.primed.get(k + m).and_then(|p| p.as_ref()) else {
                return Ok((IndexCheck::new(k, vec![format!("missing g'{}", k + m)]), None));
            };
            let img = seq.curves[k].twist(spec.eseq.e(k).clone()).apply(p)?;
            if img != seq.curves[k + m] {
                f.push(format!("g{} != T_g{k}^e{k}(g'{})", k + m, k + m));
            }
            let ip = |j: usize| intersection(p, &seq.curves[j]);
            let v = ip(k)?;
            if v != spec.b {
                f.push(format!("i(g'{}, g{k}) = {v} != b", k + m));
            }
            for j in k + 1..k + m {
                let v = ip(j)?;
                if !v.is_zero() {
                    f.push(format!("i(g'{}, g{j}) = {v} != 0", k + m));
                }
            }
            for j in k.saturating_sub(m - 1)..k {
                let v = ip(j)?;
                if v < spec.b1 || v > spec.b2 {
                    f.push(format!("i(g'{}, g{j}) = {v} outside [{}, {}]", k + m, spec.b1, spec.b2));
                }
            }
            let lower = if k >= m {
                let v = ip(k - m)?;
                if v > spec.b2 {
                    f.push(format!("i(g'{}, g{}) = {v} > b2", k + m, k - m));
                }
                let mut g = Vec::new();
                if v < spec.b1 {
                    g.push(format!("i(g'{}, g{}) = {v} < b1", k + m, k - m));
                }
                Some(IndexCheck::new(k, g))
            } else {
                None
            };
            Ok((IndexCheck::new(k, f), lower))
        })
        .collect();
    let mut twist_form = Vec::new();
    let mut lower_end_in_range = Vec::new();
    for r in per_k {
        let (c, l) = r?;
        twist_form.push(c);
        lower_end_in_range.extend(l);
    }

    let failures: Vec<String> = disjoint
        .iter()
        .map(|c| ("disjoint", c))
        .chain(filling.iter().map(|c| ("filling", c)))
        .chain(twist_form.iter().map(|c| ("twist-form", c)))
        .filter(|(_, c)| !c.ok)
        .map(|(n, c)| format!("{n} at k = {}: {}", c.index, c.detail))
        .collect();
    Ok(PReport {
        upto,
        disjoint,
        filling,
        twist_form,
        lower_end_in_range,
        orbit_types: memo.len(),
        verdict: failures.is_empty(),
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum P4Status {
    /// `m` equals the complexity, so consecutive windows are pants decompositions.
    Vacuous,
    Checked { ok: bool, windows: usize, failures: Vec<String> },
    Undecidable,
}

/// True iff `gamma_k, gamma_h` fill the complement of the sequence curves
/// disjoint from both, and each curve between them lies inside that
/// subsurface or off it.
pub fn boundary_in_sequence(seq: &GeneratedSequence, k: usize, h: usize) -> Result<bool> {
    let m = seq.m();
    let window = normalize_window(&seq.curves[k..=h])?;
    let (a, b) = (&window[0], &window[h - k]);
    let boundary: Vec<Curve> =
        (h + 1 - m..k + m).filter(|&j| j > k && j < h).map(|j| window[j - k].clone()).collect();
    let pair = [a.clone(), b.clone()];
    if !fills_within(&pair, &boundary)? {
        return Ok(false);
    }
    for c in &window {
        let inside = !intersection(c, a)?.is_zero() || !intersection(c, b)?.is_zero();
        if inside {
            for g in &boundary {
                if !intersection(c, g)?.is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Subsurface condition on windows starting at `k < budget`.
pub fn check_p4(seq: &GeneratedSequence, budget: usize) -> Result<P4Status> {
    let m = seq.m();
    if m == seq.surface().xi() {
        return Ok(P4Status::Vacuous);
    }
    if budget == 0 {
        return Ok(P4Status::Undecidable);
    }
    let mut windows = 0;
    let mut failures = Vec::new();
    for k in 0..budget {
        for h in k + m..k + 2 * m - 1 {
            if h >= seq.len() {
                continue;
            }
            windows += 1;
            if !boundary_in_sequence(seq, k, h)? {
                failures.push(format!("g{k}, g{h}"));
            }
        }
    }
    if windows == 0 {
        return Ok(P4Status::Undecidable);
    }
    Ok(P4Status::Checked { ok: failures.is_empty(), windows, failures })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QgRow {
    pub j: usize,
    pub k: usize,
    /// Certified lower bound on the curve-complex distance, as `p/q`.
    pub bound: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QgReport {
    pub m: usize,
    pub rows: Vec<QgRow>,
}

/// `|k - j| / (4n) - (m / (2n) + 1)` with `n = m`.
pub fn qg_bound(m: usize, j: usize, k: usize) -> BigRat {
    let n = m as i64;
    let d = j.abs_diff(k) as i64;
    rat(d, 4 * n) - (rat(m as i64, 2 * n) + rat(1, 1))
}

/// Distance lower bounds for all pairs with `|k - j| >= 2m` below `upto`.
pub fn qg_report(m: usize, upto: usize) -> QgReport {
    let mut rows = Vec::new();
    for j in 0..upto {
        for k in j + 2 * m..upto {
            rows.push(QgRow { j, k, bound: crate::exactnum::format_rat(&qg_bound(m, j, k)) });
        }
    }
    QgReport { m, rows }
}

/// Core curve and the pair whose relative twisting about it is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistProbe {
    pub core: usize,
    pub left: usize,
    pub right: usize,
}

/// `(k, k - m, k + m)` for every `k` with both neighbours in the prefix.
pub fn default_twist_probes(seq: &GeneratedSequence) -> Vec<TwistProbe> {
    let m = seq.m();
    (m..seq.len().saturating_sub(m)).map(|k| TwistProbe { core: k, left: k - m, right: k + m }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub probe: TwistProbe,
    /// `|argmin|`, or `None` with a reason when skipped.
    pub measured: Option<String>,
    pub expected: String,
    /// `||argmin| - e_core|`.
    pub deviation: Option<String>,
    /// Additive uncertainty of the estimator itself.
    pub slack: Option<String>,
    pub note: String,
}

/// Measured annular coefficients against the twist powers.
pub fn subsurface_coefficient_report(seq: &GeneratedSequence, probes: &[TwistProbe]) -> Result<Vec<CoefficientRow>> {
    probes
        .par_iter()
        .map(|&p| {
            let (a, l, r) = (&seq.curves[p.core], &seq.curves[p.left], &seq.curves[p.right]);
            let expected = seq.e(p.core).clone();
            if intersection(a, l)?.is_zero() || intersection(a, r)?.is_zero() {
                return Ok(CoefficientRow {
                    probe: p,
                    measured: None,
                    expected: expected.to_string(),
                    deviation: None,
                    slack: None,
                    note: "empty projection: a probe curve misses the core".into(),
                });
            }
            let tw = relative_twisting(a, l, r)?;
            let mag = tw.argmin.abs();
            let dev = (&mag - &expected).abs();
            Ok(CoefficientRow {
                probe: p,
                measured: Some(mag.to_string()),
                expected: expected.to_string(),
                deviation: Some(dev.to_string()),
                slack: Some(tw.slack.to_string()),
                note: "ok".into(),
            })
        })
        .collect()
}
