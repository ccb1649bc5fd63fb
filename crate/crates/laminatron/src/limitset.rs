//! Length vectors reconstructed from width-plus-twist contributions along the
//! model ray, and their barycentric trace in the simplex of limiting measures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exactnum::ln_bigint;
use crate::measures::ProbeTable;
use crate::timeline::{log_add, profile, TimelineModel};

/// Slack when deciding whether `t` lies in a window.
const WINDOW_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// `t - upper_k <= W`.
    One,
    /// `t - upper_k > W`.
    Two,
}

impl Case {
    pub fn classify(model: &TimelineModel, k: usize, t: f64, w: f64) -> Case {
        if t - model.upper(k) <= w {
            Case::One
        } else {
            Case::Two
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Case::One => "1",
            Case::Two => "2",
        }
    }
}

/// Contribution `U` of `gamma_{k+h}` at time `t` in the window starting at
/// `upper_k`; slot `h = m` is the next curve of residue `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UTerm {
    pub window: usize,
    pub h: usize,
    pub t: f64,
    pub case: Case,
    pub ln_value: f64,
    /// Taken from the width/twist profile rather than a closed formula.
    pub extrapolated: bool,
}

impl UTerm {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    /// Absolute sequence index of the curve.
    pub fn curve(&self) -> usize {
        self.window + self.h
    }
}

fn check_window(model: &TimelineModel, k: usize, t: f64) -> Result<()> {
    if k + model.m >= model.len() {
        return Err(Error::InsufficientPrefix(format!("window {k} needs index {}", k + model.m)));
    }
    let (lo, hi) = (model.upper(k), model.upper(k + 1));
    let tol = WINDOW_TOL * hi.abs().max(1.0);
    if t < lo - tol || t > hi + tol {
        return Err(Error::OutOfWindow(t));
    }
    Ok(())
}

/// Evaluates `U` for slot `h` (`0 <= h <= m`) of window `k` at time `t`.
pub fn uterm(model: &TimelineModel, k: usize, h: usize, t: f64, w: f64) -> Result<UTerm> {
    let m = model.m;
    if h > m {
        return invalid(format!("slot {h} exceeds m = {m}"));
    }
    check_window(model, k, t)?;
    let case = Case::classify(model, k, t, w);
    let s = (t - model.upper(k)).max(0.0);
    let from_profile = |idx: usize| -> Result<f64> { Ok(profile(model, t, idx)?.ln_contribution()) };
    let (ln_value, extrapolated) = match (h, case) {
        (0, Case::One) => (model.ln_e[k], false),
        (0, Case::Two) | (1, Case::Two) => (from_profile(k + h)?, true),
        (h, _) if h == m => ((4.0 * s).ln(), false),
        (h, _) => {
            let i = k / m;
            let sum: f64 = (1..=i)
                .map(|j| model.ln_e[k - (i - j) * m] - model.ln_e[k - (i - j + 1) * m + h])
                .sum();
            ((4.0 * (sum + s)).ln(), false)
        }
    };
    Ok(UTerm { window: k, h, t, case, ln_value, extrapolated })
}

/// Slots carrying the dominant contributions in each case.
fn slots(m: usize, case: Case) -> std::ops::Range<usize> {
    match case {
        Case::One => 0..m,
        Case::Two => 1..m + 1,
    }
}

/// Intersection numbers used to turn contributions into lengths.
#[derive(Debug, Clone, Copy)]
pub enum Mode<'a> {
    /// `i(delta, gamma_k)` replaced by `A(0,k)`, one coordinate per residue.
    Synthetic,
    /// Exact intersection numbers with a probe set.
    Exact(&'a ProbeTable),
}

/// Projectivised length vector (entries sum to 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthVector {
    pub t: f64,
    pub window: usize,
    pub case: Case,
    pub entries: Vec<f64>,
    pub terms: Vec<UTerm>,
    /// `ln` of the dropped error term relative to the dominant contribution.
    pub ln_dropped_ratio: f64,
}

fn normalize_logs(logs: &[f64]) -> Vec<f64> {
    let mx = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return vec![0.0; logs.len()];
    }
    let v: Vec<f64> = logs.iter().map(|x| (x - mx).exp()).collect();
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

/// `ln` of the length vector entries before projectivisation.
fn ln_lengths(model: &TimelineModel, mode: Mode, terms: &[UTerm]) -> Result<Vec<f64>> {
    match mode {
        Mode::Synthetic => {
            let mut out = vec![f64::NEG_INFINITY; model.m];
            for u in terms {
                let j = u.curve();
                out[j % model.m] = log_add(out[j % model.m], u.ln_value + model.ln_c(j));
            }
            Ok(out)
        }
        Mode::Exact(pt) => {
            if let Some(u) = terms.iter().find(|u| u.curve() >= pt.len()) {
                return Err(Error::InsufficientPrefix(format!("probe table lacks index {}", u.curve())));
            }
            Ok(pt
                .values
                .iter()
                .map(|row| {
                    terms.iter().fold(f64::NEG_INFINITY, |acc, u| {
                        let x = &row[u.curve()];
                        if x.sign() == num_bigint::Sign::NoSign {
                            acc
                        } else {
                            log_add(acc, u.ln_value + ln_bigint(x))
                        }
                    })
                })
                .collect())
        }
    }
}

pub fn length_vector(model: &TimelineModel, mode: Mode, k: usize, t: f64, w: f64) -> Result<LengthVector> {
    check_window(model, k, t)?;
    let case = Case::classify(model, k, t, w);
    let terms = slots(model.m, case).map(|h| uterm(model, k, h, t, w)).collect::<Result<Vec<_>>>()?;
    let logs = ln_lengths(model, mode, &terms)?;
    let ln_dropped_ratio = match case {
        Case::One => model.ln_c(k + model.m - 1) - (terms[0].ln_value + model.ln_c(k)),
        Case::Two => -(t - model.upper(k)).ln(),
    };
    Ok(LengthVector { t, window: k, case, entries: normalize_logs(&logs), terms, ln_dropped_ratio })
}

/// Barycentric coordinates of `v` in a basis of `m` vectors, by least squares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Barycentric {
    pub beta: Vec<f64>,
    /// `|v - fit| / |v|` in the probe space.
    pub residual: f64,
}

/// Vertex basis in log coordinates: `ln_basis[h][p]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexBasis {
    /// Index of the sequence curve approximating each vertex.
    pub indices: Vec<usize>,
    pub ln_basis: Vec<Vec<f64>>,
}

/// `gamma_K / A(0,K)` for the largest available `K` of each residue.
pub fn vertex_basis(model: &TimelineModel, pt: &ProbeTable) -> Result<VertexBasis> {
    let m = model.m;
    let n = pt.len().min(model.len());
    if n < m {
        return Err(Error::InsufficientPrefix("probe table shorter than m".into()));
    }
    let mut indices = Vec::new();
    let mut ln_basis = Vec::new();
    for h in 0..m {
        let kk = (0..n).rev().find(|k| k % m == h).unwrap();
        let c = model.ln_c(kk);
        ln_basis.push(
            pt.values
                .iter()
                .map(|row| if row[kk].sign() == num_bigint::Sign::NoSign { f64::NEG_INFINITY } else { ln_bigint(&row[kk]) - c })
                .collect(),
        );
        indices.push(kk);
    }
    Ok(VertexBasis { indices, ln_basis })
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for cc in c..n {
                a[r][cc] -= f * a[c][cc];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Least-squares coordinates of the projectivised vector `v` (linear scale)
/// in the basis; negative coefficients are clipped before normalising.
pub fn barycentric(v: &[f64], basis: &VertexBasis) -> Result<Barycentric> {
    let m = basis.ln_basis.len();
    let shifts: Vec<f64> = basis
        .ln_basis
        .iter()
        .map(|u| u.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let cols: Vec<Vec<f64>> = basis
        .ln_basis
        .iter()
        .zip(&shifts)
        .map(|(u, s)| u.iter().map(|x| (x - s).exp()).collect())
        .collect();
    let gram: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum()).collect())
        .collect();
    let rhs: Vec<f64> = cols.iter().map(|c| c.iter().zip(v).map(|(x, y)| x * y).sum()).collect();
    let x = solve(gram, rhs).ok_or(Error::IllConditioned(f64::INFINITY))?;
    let fit: Vec<f64> = (0..v.len()).map(|p| (0..m).map(|h| x[h] * cols[h][p]).sum()).collect();
    let norm = v.iter().map(|y| y * y).sum::<f64>().sqrt();
    let err = v.iter().zip(&fit).map(|(y, f)| (y - f) * (y - f)).sum::<f64>().sqrt();
    let logs: Vec<f64> = x
        .iter()
        .zip(&shifts)
        .map(|(c, s)| if *c > 0.0 { c.ln() - s } else { f64::NEG_INFINITY })
        .collect();
    Ok(Barycentric { beta: normalize_logs(&logs), residual: if norm > 0.0 { err / norm } else { 0.0 } })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub window: usize,
    pub case: Case,
    pub beta: Vec<f64>,
    pub residual: f64,
    pub extrapolated: bool,
    pub ln_dropped_ratio: f64,
}

/// Vertex reached at the start and end of a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeLabel {
    pub window: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexTrace {
    pub m: usize,
    pub samples: Vec<TraceSample>,
    pub edges: Vec<EdgeLabel>,
    pub basis: Option<VertexBasis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub samples_per_window: usize,
    /// Case 1 bound on `t - upper_k`.
    pub w: f64,
    /// Largest tolerated least-squares residual.
    pub max_residual: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { samples_per_window: 21, w: 1.0, max_residual: 0.25 }
    }
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).max_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap_or(0)
}

/// Samples the windows `[upper_k, upper_{k+1}]` for `k` in `windows`,
/// uniformly in time, and converts each length vector to barycentric form.
pub fn trace_limit_cycle(
    model: &TimelineModel,
    mode: Mode,
    windows: std::ops::Range<usize>,
    opts: &TraceOptions,
) -> Result<SimplexTrace> {
    if opts.samples_per_window < 2 {
        return invalid("need at least two samples per window");
    }
    let basis = match mode {
        Mode::Synthetic => None,
        Mode::Exact(pt) => Some(vertex_basis(model, pt)?),
    };
    let n = opts.samples_per_window;
    let jobs: Vec<(usize, f64)> = windows
        .clone()
        .flat_map(|k| {
            let (lo, hi) = (model.upper(k.min(model.len() - 1)), model.upper((k + 1).min(model.len() - 1)));
            (0..n).map(move |j| (k, if j + 1 == n { hi } else { lo + (hi - lo) * j as f64 / (n - 1) as f64 }))
        })
        .collect();
    let samples = jobs
        .par_iter()
        .map(|&(k, t)| {
            let lv = length_vector(model, mode, k, t, opts.w)?;
            let bc = match &basis {
                None => Barycentric { beta: lv.entries.clone(), residual: 0.0 },
                Some(b) => barycentric(&lv.entries, b)?,
            };
            if bc.residual > opts.max_residual {
                return Err(Error::IllConditioned(bc.residual));
            }
            Ok(TraceSample {
                t,
                window: k,
                case: lv.case,
                beta: bc.beta,
                residual: bc.residual,
                extrapolated: lv.terms.iter().any(|u| u.extrapolated),
                ln_dropped_ratio: lv.ln_dropped_ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = windows
        .map(|k| {
            let s: Vec<&TraceSample> = samples.iter().filter(|x| x.window == k).collect();
            EdgeLabel { window: k, from: argmax(&s[0].beta), to: argmax(&s[s.len() - 1].beta) }
        })
        .collect();
    Ok(SimplexTrace { m: model.m, samples, edges, basis })
}

impl SimplexTrace {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,");
        for h in 0..self.m {
            s.push_str(&format!("beta{h},"));
        }
        s.push_str("residual,window,case\n");
        for x in &self.samples {
            s.push_str(&format!("{},", x.t));
            for b in &x.beta {
                s.push_str(&format!("{b},"));
            }
            s.push_str(&format!("{},{},{}\n", x.residual, x.window, x.case.label()));
        }
        s
    }

    /// Each window runs from vertex `k mod m` to `k+1 mod m`, and
    /// consecutive windows join up.
    pub fn edges_cyclic(&self) -> bool {
        let m = self.m;
        self.edges.iter().all(|e| e.from == e.window % m && e.to == (e.window + 1) % m)
            && self.edges.windows(2).all(|w| w[0].to == w[1].from)
            && (self.edges.len() >= m || m == 0)
    }

    /// Earliest window from which every later edge is cyclic, provided at
    /// least `m` edges remain.
    pub fn cyclic_from(&self) -> Option<usize> {
        let m = self.m;
        let e = &self.edges;
        let labelled = |i: usize| e[i].from == e[i].window % m && e[i].to == (e[i].window + 1) % m;
        let mut start = e.len();
        while start > 0 && labelled(start - 1) && (start == e.len() || e[start - 1].to == e[start].from) {
            start -= 1;
        }
        (e.len() - start >= m.max(1)).then(|| e[start].window)
    }

    /// Largest `|beta - unit|_1` over the two endpoint samples of `window`.
    pub fn endpoint_error(&self, window: usize) -> Option<f64> {
        let s: Vec<&TraceSample> = self.samples.iter().filter(|x| x.window == window).collect();
        let (first, last) = (s.first()?, s.last()?);
        let err = |beta: &[f64], v: usize| -> f64 {
            beta.iter().enumerate().map(|(h, b)| if h == v { (1.0 - b).abs() } else { b.abs() }).sum()
        };
        Some(err(&first.beta, window % self.m).max(err(&last.beta, (window + 1) % self.m)))
    }

    /// Smallest barycentric coordinate among the samples of `window`.
    pub fn min_coordinate(&self, window: usize) -> Option<f64> {
        self.samples
            .iter()
            .filter(|x| x.window == window)
            .flat_map(|x| x.beta.iter().copied())
            .reduce(f64::min)
    }
}

/// `ln(U_h c_{k+h} / (U_0 c_k))` at `t = upper_k` for `1 <= h < m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationRow {
    pub window: usize,
    pub h: usize,
    pub ln_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub rows: Vec<DominationRow>,
    /// First window from which every ratio series (per residue and slot)
    /// decreases.
    pub monotone_from: Option<usize>,
}

pub fn domination_report(model: &TimelineModel, windows: std::ops::Range<usize>) -> Result<DominationReport> {
    let m = model.m;
    let mut rows = Vec::new();
    for k in windows.clone() {
        let t = model.upper(k);
        let u0 = uterm(model, k, 0, t, 0.0)?;
        for h in 1..m {
            let u = uterm(model, k, h, t, 0.0)?;
            rows.push(DominationRow {
                window: k,
                h,
                ln_ratio: u.ln_value + model.ln_c(k + h) - u0.ln_value - model.ln_c(k),
            });
        }
    }
    let mut last_bad = None;
    for r in &rows {
        if let Some(nx) = rows.iter().find(|x| x.window == r.window + m && x.h == r.h) {
            if nx.ln_ratio >= r.ln_ratio {
                last_bad = Some(last_bad.map_or(r.window, |b: usize| b.max(r.window)));
            }
        }
    }
    let monotone_from = match last_bad {
        None => Some(windows.start),
        Some(b) if b + m < windows.end => Some(b + 1),
        _ => None,
    };
    Ok(DominationReport { rows, monotone_from })
}

/// `(window, t - upper_k, ln(1 / (t - upper_k)))` at the fraction `f` of each
/// window.
pub fn case_two_error_ratios(model: &TimelineModel, windows: std::ops::Range<usize>, f: f64) -> Vec<(usize, f64, f64)> {
    windows
        .map(|k| {
            let s = f * (model.upper(k + 1) - model.upper(k));
            (k, s, -s.ln())
        })
        .collect()
}
