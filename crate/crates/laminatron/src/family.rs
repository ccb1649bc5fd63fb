//! Curve sequences: the pentagon family on `S_{0,5}` and the general
//! construction `gamma_k = phi_m .. phi_k (gamma_{k mod m})` with
//! `phi_k = T_{gamma_{k mod m}}^{e_{k-m}} f_{k mod m}`.

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{
    intersection, Curve, Generator, Interval, Letter, MappingClass, MultiCurve, Surface, PENTAGON,
};
use crate::error::{invalid, Error, Result};
use crate::exactnum::ESequence;

/// Default cap on the decimal digits of any coordinate of a generated curve.
pub const DIGIT_BUDGET: usize = 100_000;

/// Data of the general construction, with the maps `f_k` taken on trust.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralData {
    pub surface: Surface,
    /// Base multicurve `gamma_0 .. gamma_{m-1}`.
    pub base: Vec<Curve>,
    /// `f_0 .. f_{m-1}`, each supported on the subsurface around `gamma_k`.
    pub maps: Vec<Generator>,
}

/// Documented placeholders for closed genus-5 families; not constructible here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Genus5Variant {
    /// Pants decomposition with `m = 3g - 3 = 12`.
    Maximal,
    /// Separating chain with `m = g - 1 = 4`.
    NonMaximal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    S05,
    General(GeneralData),
    Genus5Stub { variant: Genus5Variant },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub m: usize,
    #[serde(with = "crate::curves::bigint_str")]
    pub b: BigInt,
    #[serde(with = "crate::curves::bigint_str")]
    pub b1: BigInt,
    #[serde(with = "crate::curves::bigint_str")]
    pub b2: BigInt,
    pub eseq: ESequence,
    pub family: FamilyKind,
}

impl FamilySpec {
    /// The pentagon family: `m = 2`, `b = b1 = b2 = 2`.
    pub fn s05(eseq: ESequence) -> Self {
        let two = BigInt::from(2);
        FamilySpec { m: 2, b: two.clone(), b1: two.clone(), b2: two, eseq, family: FamilyKind::S05 }
    }

    pub fn general(m: usize, b: i64, b1: i64, b2: i64, eseq: ESequence, data: GeneralData) -> Result<Self> {
        let s = FamilySpec {
            m,
            b: BigInt::from(b),
            b1: BigInt::from(b1),
            b2: BigInt::from(b2),
            eseq,
            family: FamilyKind::General(data),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn genus5_stub(variant: Genus5Variant, eseq: ESequence) -> Self {
        let (m, b) = match variant {
            Genus5Variant::Maximal => (12, 2),
            Genus5Variant::NonMaximal => (4, 2),
        };
        let b = BigInt::from(b);
        FamilySpec { m, b: b.clone(), b1: b.clone(), b2: b, eseq, family: FamilyKind::Genus5Stub { variant } }
    }

    pub fn surface(&self) -> Result<Surface> {
        match &self.family {
            FamilyKind::S05 => Ok(Surface::s05()),
            FamilyKind::General(d) => Ok(d.surface),
            FamilyKind::Genus5Stub { .. } => Surface::new(5, 0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b1 <= self.b && self.b <= self.b2) {
            return invalid(format!("need b1 <= b <= b2, got {} {} {}", self.b1, self.b, self.b2));
        }
        if !self.b1.is_positive() {
            return invalid("b1 must be positive");
        }
        if self.m < 2 {
            return invalid("m must be at least 2");
        }
        match &self.family {
            FamilyKind::S05 => {
                let two = BigInt::from(2);
                if self.m != 2 || self.b != two || self.b1 != two || self.b2 != two {
                    return invalid("the pentagon family has m = 2 and b = b1 = b2 = 2");
                }
            }
            FamilyKind::General(d) => {
                if self.m > d.surface.xi() {
                    return invalid(format!("m = {} exceeds the complexity {}", self.m, d.surface.xi()));
                }
                if d.base.len() != self.m || d.maps.len() != self.m {
                    return invalid(format!("need {} base curves and maps", self.m));
                }
                for c in &d.base {
                    d.surface.check(&c.surface())?;
                }
                MultiCurve::new(d.base.clone())?;
                for f in &d.maps {
                    if matches!(f, Generator::Rotation { .. }) {
                        return invalid("general maps must be braids or twists");
                    }
                    f.letters()?;
                }
            }
            FamilyKind::Genus5Stub { .. } => {}
        }
        Ok(())
    }
}

/// A generated prefix `gamma_0 .. gamma_N` with its auxiliary curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedSequence {
    pub spec: FamilySpec,
    pub curves: Vec<Curve>,
    /// `primed[k]` is `gamma'_k`, present for `k >= m`.
    pub primed: Vec<Option<Curve>>,
    /// `gamma_k = words[k](seed)` with seed `gamma_0` for the pentagon family
    /// and `gamma_{k mod m}` otherwise.
    pub words: Vec<MappingClass>,
}

impl GeneratedSequence {
    pub fn m(&self) -> usize {
        self.spec.m
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn e(&self, k: usize) -> &BigInt {
        self.spec.eseq.e(k)
    }

    pub fn surface(&self) -> Surface {
        self.curves[0].surface()
    }

    pub fn intersection(&self, i: usize, k: usize) -> Result<BigInt> {
        intersection(&self.curves[i], &self.curves[k])
    }

    /// Exact `i(gamma_i, gamma_k)` for the first `n` curves.
    pub fn intersection_table(&self, n: usize) -> Result<IntersectionTable> {
        let n = n.min(self.len());
        let rows: Vec<Vec<BigInt>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|k| self.intersection(i, k)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(IntersectionTable { values: rows })
    }
}

/// Symmetric table of exact intersection numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionTable {
    #[serde(with = "table_str")]
    pub values: Vec<Vec<BigInt>>,
}

impl IntersectionTable {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize, k: usize) -> &BigInt {
        &self.values[i][k]
    }

    /// Leading square sub-table.
    pub fn truncated(&self, n: usize) -> Self {
        IntersectionTable { values: self.values.iter().take(n).map(|r| r[..n.min(r.len())].to_vec()).collect() }
    }

    /// CSV rows `i,k,value` for `i <= k`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,k,intersection\n");
        for (i, row) in self.values.iter().enumerate() {
            for (k, v) in row.iter().enumerate().skip(i) {
                out.push_str(&format!("{i},{k},{v}\n"));
            }
        }
        out
    }
}

mod table_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let t: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        t.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        use serde::de::Error;
        let t: Vec<Vec<String>> = Vec::deserialize(d)?;
        t.iter()
            .map(|r| r.iter().map(|x| BigInt::from_str(x).map_err(|_| D::Error::custom(format!("bad integer {x:?}")))).collect())
            .collect()
    }
}

fn check_budget(c: &Curve, budget: usize) -> Result<()> {
    // decimal digits are about bits * log10(2)
    let digits = c.coords().iter().map(|x| (x.bits() as f64 * std::f64::consts::LOG10_2) as usize + 1).max().unwrap_or(0);
    if digits > budget {
        return Err(Error::WordBudget { len: digits, cap: budget });
    }
    Ok(())
}

fn need_terms(spec: &FamilySpec, terms: usize) -> Result<()> {
    if spec.eseq.len() < terms {
        return Err(Error::InsufficientPrefix(format!(
            "{} twist powers given, {} needed",
            spec.eseq.len(),
            terms
        )));
    }
    Ok(())
}

pub fn pentagon(j: usize) -> Curve {
    let (a, b) = PENTAGON[j % 5];
    Curve::round(Surface::s05(), Interval { a, b }).expect("pentagon curves are round")
}

/// `D^{e_2} rho D^{e_3} rho .. D^{e_j} rho`, with `D` the twist about `rho^2(gamma_0)`.
fn pentagon_prefix(spec: &FamilySpec, j: usize) -> MappingClass {
    let gamma = pentagon(2);
    let mut gens = Vec::new();
    for i in 2..=j {
        gens.push(gamma.twist(spec.eseq.e(i).clone()));
        gens.push(Generator::Rotation { power: 1 });
    }
    MappingClass::new(Surface::s05(), gens)
}

/// `gamma_0 .. gamma_n` of the pentagon family, evaluated literally as
/// `gamma_k = D^{e_2} rho .. D^{e_{k+1}} rho (gamma_0)`.
pub fn generate_s05(eseq: &ESequence, n: usize) -> Result<GeneratedSequence> {
    generate_s05_with_budget(eseq, n, DIGIT_BUDGET)
}

pub fn generate_s05_with_budget(eseq: &ESequence, n: usize, budget: usize) -> Result<GeneratedSequence> {
    if n < 4 {
        return invalid("the pentagon family needs at least gamma_0 .. gamma_4");
    }
    let spec = FamilySpec::s05(eseq.clone());
    need_terms(&spec, n + 2)?;
    let g0 = pentagon(0);
    let mut curves = Vec::with_capacity(n + 1);
    let mut words = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let w = pentagon_prefix(&spec, k + 1);
        let c = w.apply(&g0)?;
        check_budget(&c, budget)?;
        curves.push(c);
        words.push(w);
    }
    let mut primed = vec![None; n + 1];
    let rho = Generator::Rotation { power: 1 };
    for k in 0..=n - 2 {
        let p = if k >= 2 {
            // gamma'_{k+2} = Phi_{k-1}(rho(gamma_3))
            pentagon_prefix(&spec, k - 1).apply(&rho.apply(&curves[3])?)?
        } else {
            curves[k].twist(-spec.eseq.e(k)).apply(&curves[k + 2])?
        };
        primed[k + 2] = Some(p);
    }
    Ok(GeneratedSequence { spec, curves, primed, words })
}

fn general_data(spec: &FamilySpec) -> Result<&GeneralData> {
    match &spec.family {
        FamilyKind::General(d) => Ok(d),
        FamilyKind::S05 => invalid("use generate_s05 for the pentagon family"),
        FamilyKind::Genus5Stub { variant } => invalid(format!(
            "the genus-5 {variant:?} family is a stub: closed surfaces of positive genus are not modelled"
        )),
    }
}

/// `Phi_k = phi_m .. phi_k`, the identity for `k < m`.
pub fn phi_word(spec: &FamilySpec, k: usize) -> Result<MappingClass> {
    let d = general_data(spec)?;
    let m = spec.m;
    let mut gens = Vec::new();
    for j in m..=k {
        gens.extend(phi_gens(spec, d, j));
    }
    Ok(MappingClass::new(d.surface, gens))
}

fn phi_gens(spec: &FamilySpec, d: &GeneralData, j: usize) -> [Generator; 2] {
    let r = j % spec.m;
    [d.base[r].twist(spec.eseq.e(j - spec.m).clone()), d.maps[r].clone()]
}

/// The value `i(gamma_r, f_r(gamma_r))` for each base index `r`.
pub fn base_twist_intersections(spec: &FamilySpec) -> Result<Vec<BigInt>> {
    let d = general_data(spec)?;
    d.base.iter().zip(&d.maps).map(|(c, f)| intersection(c, &f.apply(c)?)).collect()
}

/// `gamma_0 .. gamma_n` of the general construction.
pub fn generate_general(spec: &FamilySpec, n: usize) -> Result<GeneratedSequence> {
    generate_general_with_budget(spec, n, DIGIT_BUDGET)
}

pub fn generate_general_with_budget(spec: &FamilySpec, n: usize, budget: usize) -> Result<GeneratedSequence> {
    spec.validate()?;
    let d = general_data(spec)?;
    let m = spec.m;
    if n + 1 < m {
        return invalid("prefix shorter than the base multicurve");
    }
    need_terms(spec, (n + 1).saturating_sub(m))?;
    let vals = base_twist_intersections(spec)?;
    if vals.iter().any(|v| v != &vals[0]) {
        let list: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
        return invalid(format!("i(gamma_k, f_k(gamma_k)) differs across k: {}", list.join(", ")));
    }
    let mut curves = Vec::with_capacity(n + 1);
    let mut words = Vec::with_capacity(n + 1);
    let mut phi = MappingClass::identity(d.surface);
    for k in 0..=n {
        if k >= m {
            phi.gens.extend(phi_gens(spec, d, k));
        }
        let c = phi.apply(&d.base[k % m])?;
        check_budget(&c, budget)?;
        curves.push(c);
        words.push(phi.clone());
    }
    let mut primed = vec![None; n + 1];
    for k in 0..=n - m {
        // gamma'_{k+m} = Phi_{k+m-1} f_{k mod m} (gamma_{k mod m})
        let r = k % m;
        let inner = d.maps[r].apply(&d.base[r])?;
        primed[k + m] = Some(words[k + m - 1].apply(&inner)?);
    }
    Ok(GeneratedSequence { spec: spec.clone(), curves, primed, words })
}

/// Dispatches on the family kind.
pub fn generate(spec: &FamilySpec, n: usize, budget: usize) -> Result<GeneratedSequence> {
    match spec.family {
        FamilyKind::S05 => generate_s05_with_budget(&spec.eseq, n, budget),
        _ => generate_general_with_budget(spec, n, budget),
    }
}

/// `H_k` for the general construction: sends `gamma_{k-m} .. gamma_{k+m-1}` to
/// `gamma_{k mod m} .. gamma_{k+m-1 mod m}, f(gamma), f f(gamma), ..`.
pub fn standard_window(spec: &FamilySpec, k: usize) -> Result<MappingClass> {
    let d = general_data(spec)?;
    let m = spec.m;
    if k < m {
        return invalid("the standard window needs k >= m");
    }
    let mut inv = if k > m { phi_word(spec, k - 1)? } else { MappingClass::identity(d.surface) };
    for j in k..k + m {
        inv.gens.push(d.base[j % m].twist(spec.eseq.e(j - m).clone()));
    }
    Ok(inv.inverse())
}

/// Images of the window under `H_k` predicted by the standard form.
pub fn standard_window_images(spec: &FamilySpec, k: usize) -> Result<Vec<Curve>> {
    let d = general_data(spec)?;
    let m = spec.m;
    let mut out: Vec<Curve> = (k..k + m).map(|j| d.base[j % m].clone()).collect();
    let mut f = MappingClass::identity(d.surface);
    for j in k..k + m {
        f.gens.push(d.maps[j % m].clone());
        out.push(f.apply(&d.base[j % m])?);
    }
    Ok(out)
}

/// Maps `sigma_i -> sigma_{n-i}` and round curves `[a, b] -> [n+1-b, n+1-a]`.
pub fn flip_letters(letters: &[Letter], n: usize) -> Vec<Letter> {
    letters
        .iter()
        .map(|l| match l {
            Letter::Half { i, inverse } => Letter::Half { i: n - i, inverse: *inverse },
            Letter::Twist { iv, power } => Letter::Twist { iv: Interval { a: n + 1 - iv.b, b: n + 1 - iv.a }, power: power.clone() },
        })
        .collect()
}

fn braid(name: &str, letters: Vec<Letter>) -> Generator {
    Generator::Braid { name: name.to_string(), letters }
}

fn round(s: Surface, a: usize, b: usize) -> Curve {
    Curve::round(s, Interval { a, b }).expect("round curve in range")
}

/// `T_{[a,b]} T_{[a+1,b]}^{-1}`: drags the disk around `a+1..b` once around puncture `a`.
fn drag(a: usize, b: usize) -> Vec<Letter> {
    vec![Letter::twist(Interval { a, b }, 1), Letter::twist(Interval { a: a + 1, b }, -1)]
}

fn symmetric_pair(s: Surface, m: usize, g0: Curve, g1: Curve, f0: Vec<Letter>, eseq: ESequence, b: (i64, i64, i64)) -> Result<FamilySpec> {
    let f1 = flip_letters(&f0, s.n());
    let data = GeneralData { surface: s, base: vec![g0, g1], maps: vec![braid("f0", f0), braid("f1", f1)] };
    FamilySpec::general(m, b.0, b.1, b.2, eseq, data)
}

/// General construction on `S_{0,5}` with `gamma_0 = [1,2]`, `gamma_1 = [3,4]`
/// and `f_0 = sigma_1 drag(2,4)^{-1}`; here `b = b1 = 4` and `b2 = 32`.
pub fn example_s05_general(eseq: ESequence) -> Result<FamilySpec> {
    let s = Surface::s05();
    let mut f0 = vec![Letter::half(1)];
    f0.extend(drag(2, 4).iter().rev().map(Letter::inverse));
    symmetric_pair(s, 2, round(s, 1, 2), round(s, 3, 4), f0, eseq, (4, 4, 32))
}

/// General construction on `S_{0,6}` with `m = 2 < 3`: `gamma_0 = [1,2]`,
/// `gamma_1 = [4,5]`, `f_0 = sigma_2 drag(3,5) sigma_1^{-1} sigma_2`; here
/// `b = b1 = 6` and `b2 = 42`.
pub fn example_s06_general(eseq: ESequence) -> Result<FamilySpec> {
    let s = Surface::sphere(6)?;
    let mut f0 = vec![Letter::half(2)];
    f0.extend(drag(3, 5));
    f0.extend([Letter::half(1).inverse(), Letter::half(2)]);
    symmetric_pair(s, 2, round(s, 1, 2), round(s, 4, 5), f0, eseq, (6, 6, 42))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, make_esequence, rat, SequenceMode};
    use num_traits::Zero;

    fn eseq(n: usize) -> ESequence {
        make_esequence(rat(3, 1), int(2), n, SequenceMode::Geometric).unwrap()
    }

    #[test]
    fn pentagon_first_curves() {
        let e = eseq(9);
        let s = generate_s05(&e, 6).unwrap();
        for k in 0..4 {
            assert_eq!(s.curves[k], pentagon(k), "gamma_{k}");
        }
        let g4 = pentagon(2).twist(e.e(2).clone()).apply(&pentagon(4)).unwrap();
        assert_eq!(s.curves[4], g4);
        assert_eq!(s.primed[4].as_ref().unwrap(), &pentagon(4));
        assert_eq!(intersection(s.primed[4].as_ref().unwrap(), &s.curves[2]).unwrap(), int(2));
        assert!(s.intersection(0, 1).unwrap().is_zero());
    }

    #[test]
    fn primed_curves_untwist() {
        let e = eseq(10);
        let s = generate_s05(&e, 8).unwrap();
        for k in 0..=6 {
            let back = s.curves[k].twist(e.e(k).clone()).apply(s.primed[k + 2].as_ref().unwrap()).unwrap();
            assert_eq!(back, s.curves[k + 2], "k = {k}");
        }
    }

    #[test]
    fn needs_enough_powers() {
        assert!(matches!(generate_s05(&eseq(5), 6), Err(Error::InsufficientPrefix(_))));
        assert!(generate_s05(&eseq(9), 3).is_err());
    }

    #[test]
    fn digit_budget_trips() {
        let e = eseq(12);
        assert!(matches!(generate_s05_with_budget(&e, 10, 3), Err(Error::WordBudget { .. })));
    }

    #[test]
    fn general_base_curves_unchanged() {
        for spec in [example_s05_general(eseq(10)).unwrap(), example_s06_general(eseq(10)).unwrap()] {
            let s = generate_general(&spec, 7).unwrap();
            let FamilyKind::General(d) = &spec.family else { unreachable!() };
            assert_eq!(&s.curves[..2], d.base.as_slice());
            for k in 0..=5 {
                let back = s.curves[k].twist(spec.eseq.e(k).clone()).apply(s.primed[k + 2].as_ref().unwrap()).unwrap();
                assert_eq!(back, s.curves[k + 2], "k = {k}");
            }
        }
    }

    #[test]
    fn standard_window_form() {
        let spec = example_s06_general(eseq(12)).unwrap();
        let s = generate_general(&spec, 9).unwrap();
        for k in 2..=6 {
            let h = standard_window(&spec, k).unwrap();
            let want = standard_window_images(&spec, k).unwrap();
            for (t, j) in (k - 2..k + 2).enumerate() {
                assert_eq!(h.apply(&s.curves[j]).unwrap(), want[t], "k = {k}, j = {j}");
            }
        }
    }

    #[test]
    fn rejects_disagreeing_maps() {
        let spec = example_s05_general(eseq(6)).unwrap();
        let mut bad = spec.clone();
        if let FamilyKind::General(d) = &mut bad.family {
            d.maps[1] = Generator::half(3, false);
        }
        assert!(generate_general(&bad, 4).is_err());
        let mut stub = spec;
        if let FamilyKind::General(d) = &mut stub.family {
            d.maps = vec![Generator::half(1, false), Generator::half(3, false)];
        }
        assert!(generate_general(&stub, 4).is_ok());
    }

    #[test]
    fn genus5_is_a_stub() {
        let spec = FamilySpec::genus5_stub(Genus5Variant::NonMaximal, eseq(4));
        assert!(generate(&spec, 4, DIGIT_BUDGET).is_err());
        assert!(spec.surface().is_err());
    }

    #[test]
    fn flip_is_an_involution() {
        let l = vec![Letter::half(1), Letter::twist(Interval { a: 2, b: 4 }, 3)];
        assert_eq!(flip_letters(&flip_letters(&l, 5), 5), l);
        assert_eq!(flip_letters(&l, 4)[1], Letter::twist(Interval { a: 1, b: 3 }, 3));
    }

    #[test]
    fn spec_serde_roundtrip() {
        let spec = example_s05_general(eseq(5)).unwrap();
        let js = serde_json::to_string(&spec).unwrap();
        let back: FamilySpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back, spec);
    }
}
