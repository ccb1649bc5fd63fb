//! Normalised subsequence vectors, their convergence toward the limiting
//! measures, and ratio diagnostics separating those measures.

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{intersection, Curve, Interval, Surface};
use crate::error::{Error, Result};
use crate::estimates::EstimateLedger;
use crate::exactnum::{format_rat, ln_rat, rat_from_int, rat_to_f64, show_rat, BigRat};
use crate::family::{GeneratedSequence, IntersectionTable};

/// `i(delta, gamma_k)` for a set of probe curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeTable {
    pub names: Vec<String>,
    /// `values[p][k] = i(probe_p, gamma_k)`.
    #[serde(with = "rows_str")]
    pub values: Vec<Vec<BigInt>>,
}

mod rows_str {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let t: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        t.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let t: Vec<Vec<String>> = Vec::deserialize(d)?;
        t.iter().map(|r| r.iter().map(|x| x.parse().map_err(D::Error::custom)).collect()).collect()
    }
}

impl ProbeTable {
    pub fn compute(seq: &GeneratedSequence, probes: &[(String, Curve)], n: usize) -> Result<Self> {
        let n = n.min(seq.len());
        let values = probes
            .par_iter()
            .map(|(_, d)| (0..n).map(|k| intersection(d, &seq.curves[k])).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ProbeTable { names: probes.iter().map(|p| p.0.clone()).collect(), values })
    }

    /// Number of sequence indices covered.
    pub fn len(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        ProbeTable {
            names: self.names.clone(),
            values: self.values.iter().map(|r| r.iter().map(|x| x * c).collect()).collect(),
        }
    }
}

/// Every round curve `[a, b]` on the surface, named by its interval.
pub fn default_probes(s: Surface) -> Vec<(String, Curve)> {
    let n = s.n();
    let mut out = Vec::new();
    for len in 2..n {
        for a in 1..=n + 1 - len {
            let iv = Interval { a, b: a + len - 1 };
            if let Ok(c) = Curve::round(s, iv) {
                out.push((format!("[{},{}]", iv.a, iv.b), c));
            }
        }
    }
    out
}

/// `c_i^h = A(0, im + h)`.
pub fn c_value(ledger: &EstimateLedger, h: usize, i: usize) -> &BigInt {
    ledger.compute_a(0, i * ledger.m + h)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedVector {
    pub h: usize,
    pub i: usize,
    pub probes: Vec<String>,
    #[serde(with = "ratvec_str")]
    pub entries: Vec<BigRat>,
}

mod ratvec_str {
    use crate::exactnum::{format_rat, parse_rat, BigRat};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rat(s).map_err(D::Error::custom)).collect()
    }
}

fn index_of(ledger: &EstimateLedger, len: usize, h: usize, i: usize) -> Result<usize> {
    let k = i * ledger.m + h;
    if h >= ledger.m || k >= len.min(ledger.n) {
        return Err(Error::InsufficientPrefix(format!("gamma_{i}^{h} = gamma_{k} is outside the table")));
    }
    Ok(k)
}

/// Exact `i(delta, gamma_i^h) / c_i^h` for every probe.
pub fn normalized_vector(pt: &ProbeTable, ledger: &EstimateLedger, h: usize, i: usize) -> Result<NormalizedVector> {
    let k = index_of(ledger, pt.len(), h, i)?;
    let c = c_value(ledger, h, i);
    Ok(NormalizedVector {
        h,
        i,
        probes: pt.names.clone(),
        entries: pt.values.iter().map(|r| BigRat::new(r[k].clone(), c.clone())).collect(),
    })
}

/// Entries divided by their sum; zero vectors are returned unchanged.
pub fn projectivize(v: &[BigRat]) -> Vec<BigRat> {
    let s: BigRat = v.iter().sum();
    if s.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &s).collect()
}

/// Empirical comparison constant between `i(delta, gamma_k)` and `A(0,k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaMeasure {
    pub probe: String,
    /// First index after which every `i(delta, gamma_k)` is positive.
    pub from_index: usize,
    pub kappa: String,
    pub label: String,
}

/// `max_k max(i(d,g_k)/A(0,k), A(0,k)/i(d,g_k))` over `k >= from_index`;
/// `None` when the last entry vanishes.
pub fn measure_kappa(pt: &ProbeTable, ledger: &EstimateLedger, p: usize) -> Option<(usize, BigRat)> {
    let n = pt.len().min(ledger.n);
    let row = &pt.values[p][..n];
    let from = row.iter().rposition(|x| x.is_zero()).map_or(0, |z| z + 1);
    if from >= n {
        return None;
    }
    let mut best = BigRat::one();
    for (k, v) in row.iter().enumerate().skip(from) {
        let r = BigRat::new(v.clone(), ledger.compute_a(0, k).clone());
        let r = if r >= BigRat::one() { r } else { r.recip() };
        if r > best {
            best = r;
        }
    }
    Some((from, best))
}

fn kappa_record(pt: &ProbeTable, ledger: &EstimateLedger, p: usize) -> KappaMeasure {
    let (from_index, kappa) = match measure_kappa(pt, ledger, p) {
        Some((f, k)) => (f, format_rat(&k)),
        None => (pt.len(), "undefined".into()),
    };
    KappaMeasure { probe: pt.names[p].clone(), from_index, kappa, label: "empirical".into() }
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauchyRow {
    pub h: usize,
    pub i: usize,
    pub probe: String,
    /// `|v_i - v_{i-1}|`.
    pub diff: String,
    /// `4mB kappa(delta) a^(1-i)`.
    pub bound: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    pub h: usize,
    pub probe: String,
    pub points: usize,
    pub slope: Option<f64>,
    pub target: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport {
    pub kappas: Vec<KappaMeasure>,
    pub rows: Vec<CauchyRow>,
    /// Failures of the telescoped bound `|v_i - v_j| <= 4mB kappa sum_{l=j+1}^i a^(1-l)`.
    pub telescoping_failures: Vec<String>,
    pub slopes: Vec<SlopeRow>,
    pub bounds_pass: bool,
    pub slopes_pass: bool,
}

impl CauchyReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,i,probe,diff,bound,pass\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{},{}\n", r.h, r.i, r.probe, r.diff, r.bound, r.pass));
        }
        out
    }
}

/// Successive differences of the normalised vectors against the geometric
/// tail bound, and the decay rate of their logarithms. Differences are taken
/// where the whole twist-step window lies past the probe's `kappa` range.
pub fn cauchy_report(pt: &ProbeTable, ledger: &EstimateLedger, slope_tol: f64) -> CauchyReport {
    let m = ledger.m;
    let n = pt.len().min(ledger.n);
    let a = ledger.a();
    let ln_a = ln_rat(a);
    let four_mb = rat_from_int(&(BigInt::from(4 * m) * &ledger.big_b));
    let kappas: Vec<KappaMeasure> = (0..pt.names.len()).map(|p| kappa_record(pt, ledger, p)).collect();
    let mut rows = Vec::new();
    let mut telescoping_failures = Vec::new();
    let mut slopes = Vec::new();
    for h in 0..m {
        for p in 0..pt.names.len() {
            let Some((from, kappa)) = measure_kappa(pt, ledger, p) else { continue };
            let imax = if n > h { (n - 1 - h) / m } else { continue };
            let v: Vec<BigRat> = (0..=imax)
                .map(|i| BigRat::new(pt.values[p][i * m + h].clone(), c_value(ledger, h, i).clone()))
                .collect();
            let istart = (2..=imax).find(|&i| (i - 2) * m + h >= from);
            let Some(istart) = istart else { continue };
            let mut pts = Vec::new();
            for i in istart..=imax {
                let d = (&v[i] - &v[i - 1]).abs();
                let bound = &four_mb * &kappa * Pow::pow(a, 1 - i as i32);
                let pass = d <= bound;
                if !d.is_zero() {
                    pts.push((i as f64, ln_rat(&d)));
                }
                rows.push(CauchyRow {
                    h,
                    i,
                    probe: pt.names[p].clone(),
                    diff: show_rat(&d),
                    bound: show_rat(&bound),
                    pass,
                });
                for j in istart - 1..i {
                    let tail: BigRat = (j + 1..=i).map(|l| Pow::pow(a, 1 - l as i32)).sum();
                    let d = (&v[i] - &v[j]).abs();
                    if d > &four_mb * &kappa * tail {
                        telescoping_failures.push(format!("h = {h}, {}: |v_{i} - v_{j}| too large", pt.names[p]));
                    }
                }
            }
            let s = slope(&pts);
            let target = -ln_a + slope_tol;
            slopes.push(SlopeRow {
                h,
                probe: pt.names[p].clone(),
                points: pts.len(),
                slope: s,
                target,
                pass: s.is_some_and(|s| s <= target),
            });
        }
    }
    let bounds_pass = rows.iter().all(|r| r.pass) && telescoping_failures.is_empty();
    let slopes_pass = !slopes.is_empty() && slopes.iter().filter(|s| s.points >= 2).all(|s| s.pass);
    CauchyReport { kappas, rows, telescoping_failures, slopes, bounds_pass, slopes_pass }
}

/// `i(gamma_0^h, gamma_{i+1}^h) i(gamma_i^h, gamma_K^{h'}) / c_K^{h'}` for the
/// largest `K` in the table. The approximant must lie at least `m` indices
/// past `gamma_i^h`, since nearer curves are disjoint from it.
pub fn singularity_ratio(table: &IntersectionTable, ledger: &EstimateLedger, h: usize, h2: usize, i: usize) -> Result<BigRat> {
    let m = ledger.m;
    let n = table.len().min(ledger.n);
    if h >= m || h2 >= m || n <= h2 {
        return Err(Error::InvalidInput(format!("residues {h}, {h2} out of range")));
    }
    let kk = (n - 1 - h2) / m;
    let k_next = index_of(ledger, n, h, i + 1)?;
    let k_i = i * m + h;
    let k_far = kk * m + h2;
    if k_far < k_i + m {
        return Err(Error::InsufficientPrefix(format!("no approximant of the limit beyond gamma_{k_i}")));
    }
    let num = table.get(h, k_next) * table.get(k_i, k_far);
    Ok(BigRat::new(num, c_value(ledger, h2, kk).clone()))
}

/// All available `(i, proxy)` pairs for one ordered pair of residues.
pub fn singularity_series(table: &IntersectionTable, ledger: &EstimateLedger, h: usize, h2: usize) -> Vec<(usize, BigRat)> {
    (0..).map_while(|i| singularity_ratio(table, ledger, h, h2, i).ok().map(|r| (i, r))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityDiag {
    pub h: usize,
    pub h2: usize,
    pub values: Vec<String>,
    /// Regression slope of the log proxy against `i`, for `h != h2`.
    pub slope: Option<f64>,
    /// `max / min` of the proxy, for `h == h2`.
    pub band: Option<f64>,
    pub pass: bool,
}

/// Decay of the proxy for distinct residues (slope at most `-log a + tol`) and
/// boundedness (within `band` as a ratio) for equal ones.
pub fn singularity_diagnostics(table: &IntersectionTable, ledger: &EstimateLedger, tol: f64, band: f64) -> Vec<SingularityDiag> {
    let m = ledger.m;
    let ln_a = ln_rat(ledger.a());
    let mut out = Vec::new();
    for h in 0..m {
        for h2 in 0..m {
            let s = singularity_series(table, ledger, h, h2);
            let values = s.iter().map(|(_, r)| format_rat(r)).collect();
            if h == h2 {
                let fs: Vec<f64> = s.iter().map(|(_, r)| rat_to_f64(r)).collect();
                let (lo, hi) = fs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
                let b = (!fs.is_empty() && lo > 0.0).then(|| hi / lo);
                out.push(SingularityDiag { h, h2, values, slope: None, band: b, pass: b.is_some_and(|b| b <= band) });
            } else {
                let pts: Vec<(f64, f64)> =
                    s.iter().filter(|(_, r)| r.is_positive()).map(|(i, r)| (*i as f64, ln_rat(r))).collect();
                let sl = slope(&pts);
                let pass = pts.len() == s.len() && sl.is_some_and(|x| x <= -ln_a + tol);
                out.push(SingularityDiag { h, h2, values, slope: sl, band: None, pass });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureApprox {
    pub h: usize,
    pub vector: NormalizedVector,
    /// Largest per-probe Cauchy tail `4mB kappa(delta) a^(1-i) / (a - 1)`.
    pub tail: String,
    pub kappas: Vec<KappaMeasure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitBasis {
    pub approx: Vec<MeasureApprox>,
    pub diagnostics: Vec<SingularityDiag>,
    /// Residues whose proxies separate from every other residue in both directions.
    pub separated: usize,
    pub xi: usize,
}

/// Latest normalised vector for every residue with its certified tail; fails
/// when any tail is not below `tol`.
pub fn limit_simplex_basis(
    pt: &ProbeTable,
    table: &IntersectionTable,
    ledger: &EstimateLedger,
    xi: usize,
    tol: &BigRat,
) -> Result<LimitBasis> {
    let m = ledger.m;
    let n = pt.len().min(ledger.n);
    let a = ledger.a();
    let four_mb = rat_from_int(&(BigInt::from(4 * m) * &ledger.big_b));
    let kappas: Vec<KappaMeasure> = (0..pt.names.len()).map(|p| kappa_record(pt, ledger, p)).collect();
    let mut approx = Vec::new();
    for h in 0..m {
        if n <= h {
            return Err(Error::InsufficientPrefix(format!("no curve with residue {h}")));
        }
        let i = (n - 1 - h) / m;
        let vector = normalized_vector(pt, ledger, h, i)?;
        let mut tail = BigRat::zero();
        for p in 0..pt.names.len() {
            let kappa = measure_kappa(pt, ledger, p)
                .ok_or_else(|| Error::InsufficientPrefix(format!("probe {} still disjoint", pt.names[p])))?
                .1;
            let t = &four_mb * kappa * Pow::pow(a, 1 - i as i32) / (a - BigRat::one());
            if t > tail {
                tail = t;
            }
        }
        if &tail >= tol {
            return Err(Error::InsufficientPrefix(format!(
                "Cauchy tail {} for residue {h} is not below {}",
                show_rat(&tail),
                show_rat(tol)
            )));
        }
        approx.push(MeasureApprox { h, vector, tail: format_rat(&tail), kappas: kappas.clone() });
    }
    let diagnostics = singularity_diagnostics(table, ledger, 0.1, 10.0);
    let separated = (0..m)
        .filter(|&h| (0..m).filter(|&h2| h2 != h).all(|h2| diagnostics.iter().any(|d| d.h == h && d.h2 == h2 && d.pass)))
        .count();
    Ok(LimitBasis { approx, diagnostics, separated, xi })
}

/// CSV of `(h, i, probe, value)` for every available normalised vector.
pub fn vectors_csv(pt: &ProbeTable, ledger: &EstimateLedger) -> String {
    let mut out = String::from("h,i,probe,value\n");
    let n = pt.len().min(ledger.n);
    for h in 0..ledger.m {
        let mut i = 0;
        while i * ledger.m + h < n {
            if let Ok(v) = normalized_vector(pt, ledger, h, i) {
                for (name, x) in v.probes.iter().zip(&v.entries) {
                    out.push_str(&format!("{h},{i},{name},{}\n", show_rat(x)));
                }
            }
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimates::{default_tail_eps, measure_big_b};
    use crate::exactnum::{int, make_esequence, rat, ESequence, SequenceMode};
    use crate::family::{generate, FamilySpec, DIGIT_BUDGET};

    struct Run {
        seq: GeneratedSequence,
        table: IntersectionTable,
        ledger: EstimateLedger,
        pt: ProbeTable,
    }

    fn run(a: i64, n: usize) -> Run {
        let e = make_esequence(rat(a, 1), int(1), n + 2, SequenceMode::Geometric).unwrap();
        let seq = generate(&FamilySpec::s05(e), n, DIGIT_BUDGET).unwrap();
        let big_b = BigInt::from(measure_big_b(&seq).unwrap().value);
        let table = seq.intersection_table(n).unwrap();
        let ledger = EstimateLedger::for_sequence(&seq, big_b, n).unwrap();
        let pt = ProbeTable::compute(&seq, &default_probes(seq.surface()), n).unwrap();
        Run { seq, table, ledger, pt }
    }

    #[test]
    fn c_recursion() {
        let e = ESequence::new(rat(2, 1), [1, 2, 4, 8, 16, 32, 64, 128].iter().map(|&v| int(v)).collect()).unwrap();
        let l = EstimateLedger::new(2, int(2), int(2), int(2), int(2), e.clone(), 9, &default_tail_eps()).unwrap();
        for h in 0..2 {
            assert_eq!(c_value(&l, h, 0), &int(1));
            assert_eq!(c_value(&l, h, 1), &int(1));
            for i in 2..(9 - h).div_ceil(2) {
                let want = int(2) * e.e((i - 1) * 2 + h) * c_value(&l, h, i - 1);
                assert_eq!(c_value(&l, h, i), &want);
            }
        }
        // c_3^0 = b e_2 b e_4 by direct product
        assert_eq!(c_value(&l, 0, 3), &int(2 * 4 * 2 * 16));
    }

    #[test]
    fn first_vector_entry_is_b() {
        let r = run(3, 8);
        let probes = vec![("g0".to_string(), r.seq.curves[0].clone()), ("g1".to_string(), r.seq.curves[1].clone())];
        let pt = ProbeTable::compute(&r.seq, &probes, 8).unwrap();
        for h in 0..2 {
            let v = normalized_vector(&pt, &r.ledger, h, 1).unwrap();
            assert_eq!(v.entries[h], rat(2, 1));
            // gamma_h is disjoint from gamma_{h+1 -/+ 1} at i = 0
            let v0 = normalized_vector(&pt, &r.ledger, h, 0).unwrap();
            assert_eq!(v0.entries[h], rat(0, 1));
        }
    }

    #[test]
    fn cauchy_bounds_hold_exactly() {
        let r = run(3, 10);
        let rep = cauchy_report(&r.pt, &r.ledger, 0.1);
        assert!(rep.bounds_pass, "{:?}", rep.rows.iter().filter(|x| !x.pass).collect::<Vec<_>>());
        assert!(rep.telescoping_failures.is_empty());
        assert!(rep.rows.len() >= 5);
    }

    #[test]
    fn projective_invariance() {
        let r = run(3, 8);
        let big = r.pt.scaled(&int(7));
        for h in 0..2 {
            let u = projectivize(&normalized_vector(&r.pt, &r.ledger, h, 3).unwrap().entries);
            let w = projectivize(&normalized_vector(&big, &r.ledger, h, 3).unwrap().entries);
            assert_eq!(u, w);
            assert_eq!(u.iter().sum::<BigRat>(), BigRat::one());
        }
    }

    #[test]
    fn singularity_proxy_at_zero() {
        let r = run(3, 8);
        let p = singularity_ratio(&r.table, &r.ledger, 0, 1, 0).unwrap();
        // K = 3 for residue 1 in an 8-curve table: gamma_7, c_3^1 = A(0,7)
        let want = BigRat::new(r.table.get(0, 2) * r.table.get(0, 7), r.ledger.compute_a(0, 7).clone());
        assert_eq!(p, want);
    }

    #[test]
    fn separation_at_admissible_base() {
        let r = run(576, 12);
        let d = singularity_diagnostics(&r.table, &r.ledger, 0.1, 10.0);
        assert_eq!(d.len(), 4);
        assert!(d.iter().all(|x| x.pass), "{d:?}");
        let basis = limit_simplex_basis(&r.pt, &r.table, &r.ledger, 2, &rat(1 << 20, 1)).unwrap();
        assert_eq!(basis.separated, 2);
        assert!(basis.separated <= basis.xi);
    }

    #[test]
    fn zero_tolerance_is_insufficient() {
        let r = run(3, 8);
        let e = limit_simplex_basis(&r.pt, &r.table, &r.ledger, 2, &rat(0, 1)).unwrap_err();
        assert!(matches!(e, Error::InsufficientPrefix(_)));
    }

    #[test]
    fn slope_of_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        assert!((slope(&pts).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(slope(&pts[..1]), None);
    }
}
