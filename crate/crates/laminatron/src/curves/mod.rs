//! Essential simple closed curves on the punctured sphere `S_{0,n+1}`.
//!
//! A curve carries exact Dynnikov coordinates and a frame: a word of half-twists
//! and round-curve twists applied to a round curve. Frames give short words for
//! intersection numbers and basis words for export.

pub mod dynnikov;
mod mapping;
pub(crate) mod pl;
pub mod realize;
mod twisting;
pub mod words;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use dynnikov::{Interval, ACCEL_CAP};
pub use mapping::{apply, Generator, MappingClass, PENTAGON};
pub use realize::{fills, fills_within, regions, Regions};
pub use twisting::{relative_twisting, Twisting};

use crate::error::{invalid, Error, Result};
use dynnikov::{apply_ops, power, std_coords};
use pl::Tracer;
use words::Word;

/// Default cap on exported basis-word length.
pub const WORD_CAP: usize = 1 << 20;

/// Step cap when untangling a curve given by coordinates or a word.
pub const UNTANGLE_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Surface {
    pub punctures: usize,
}

impl Surface {
    pub fn new(genus: usize, punctures: usize) -> Result<Self> {
        if genus != 0 {
            return invalid(format!("genus {genus} surfaces are not supported; only punctured spheres"));
        }
        Self::sphere(punctures)
    }

    pub fn sphere(punctures: usize) -> Result<Self> {
        if punctures < 4 {
            return invalid(format!("S_(0,{punctures}) has no essential curves"));
        }
        Ok(Surface { punctures })
    }

    /// The five-punctured sphere.
    pub fn s05() -> Self {
        Surface { punctures: 5 }
    }

    pub fn genus(&self) -> usize {
        0
    }

    /// Number of curves in a pants decomposition.
    pub fn xi(&self) -> usize {
        self.punctures - 3
    }

    /// Punctures inside the disk model; the last puncture sits at infinity.
    pub fn n(&self) -> usize {
        self.punctures - 1
    }

    pub fn interval(&self, a: usize, b: usize) -> Result<Interval> {
        Interval::new(a, b, self.n())
    }

    pub fn check(&self, other: &Surface) -> Result<()> {
        if self != other {
            return Err(Error::SurfaceMismatch(self.punctures, other.punctures));
        }
        Ok(())
    }
}

/// A half-twist `sigma_i^{+-1}` or a power of the twist about a round curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Letter {
    Half { i: usize, inverse: bool },
    Twist { iv: Interval, #[serde(with = "bigint_str")] power: BigInt },
}

impl Letter {
    pub fn half(i: usize) -> Self {
        Letter::Half { i, inverse: false }
    }

    pub fn twist(iv: Interval, power: impl Into<BigInt>) -> Self {
        Letter::Twist { iv, power: power.into() }
    }

    pub fn inverse(&self) -> Letter {
        match self {
            Letter::Half { i, inverse } => Letter::Half { i: *i, inverse: !inverse },
            Letter::Twist { iv, power } => Letter::Twist { iv: *iv, power: -power },
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            Letter::Half { i, .. } if *i < 1 || *i >= n => invalid(format!("half twist {i} outside 1..{}", n - 1)),
            Letter::Twist { iv, .. } => Interval::new(iv.a, iv.b, n).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// True if the letter maps the round curve `iv` to itself.
    pub fn fixes(&self, base: &Interval) -> bool {
        match self {
            Letter::Half { i, .. } => base.fixed_by_half_twist(*i),
            Letter::Twist { iv, .. } => iv.disjoint_from(base),
        }
    }

    pub(crate) fn act_coords(&self, x: &mut Vec<BigInt>, n: usize) -> Result<()> {
        match self {
            Letter::Half { i, inverse } => {
                dynnikov::half_twist(x, n, *i, *inverse, &mut Tracer::plain());
            }
            Letter::Twist { iv, power: p } => {
                if !p.is_zero() {
                    *x = power(x, n, &iv.twist_ops(p.is_negative()), &p.abs())?;
                }
            }
        }
        Ok(())
    }

    pub(crate) fn act_word(&self, w: &[i32], cap: usize) -> Result<Word> {
        match self {
            Letter::Half { i, inverse } => Ok(words::artin(w, *i, *inverse)),
            Letter::Twist { iv, power: p } => {
                let reps: usize = match usize::try_from(p.abs()) {
                    Ok(r) if r <= cap => r,
                    _ => return Err(Error::WordBudget { len: usize::MAX, cap }),
                };
                let ops = iv.twist_ops(p.is_negative());
                let mut cur = w.to_vec();
                for _ in 0..reps {
                    cur = words::act(&cur, &ops, cap)?;
                }
                Ok(cur)
            }
        }
    }

    fn merge(&self, next: &Letter) -> Option<Option<Letter>> {
        match (self, next) {
            (Letter::Half { i, inverse }, Letter::Half { i: j, inverse: k }) if i == j && inverse != k => Some(None),
            (Letter::Twist { iv, power: p }, Letter::Twist { iv: jv, power: q }) if iv == jv => {
                let s = p + q;
                Some(if s.is_zero() { None } else { Some(Letter::Twist { iv: *iv, power: s }) })
            }
            _ => None,
        }
    }
}

/// `letters[0] letters[1] .. letters[r-1] (base)`; the rightmost letter acts first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub letters: Vec<Letter>,
    pub base: Interval,
}

impl Frame {
    pub fn round(base: Interval) -> Self {
        Frame { letters: Vec::new(), base }
    }

    /// Frees cancellations and drops trailing letters that fix the base.
    pub fn simplify(&mut self) {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for l in self.letters.drain(..) {
            match out.last().and_then(|top| top.merge(&l)) {
                Some(None) => {
                    out.pop();
                }
                Some(Some(m)) => {
                    out.pop();
                    out.push(m);
                }
                None => out.push(l),
            }
        }
        while out.last().is_some_and(|l| l.fixes(&self.base)) {
            out.pop();
        }
        self.letters = out;
    }

    /// Applies the frame word to coordinates.
    pub(crate) fn forward(&self, x: &[BigInt], n: usize) -> Result<Vec<BigInt>> {
        let mut y = x.to_vec();
        for l in self.letters.iter().rev() {
            l.act_coords(&mut y, n)?;
        }
        Ok(y)
    }

    /// Applies the inverse of the frame word to coordinates.
    pub(crate) fn backward(&self, x: &[BigInt], n: usize) -> Result<Vec<BigInt>> {
        let mut y = x.to_vec();
        for l in &self.letters {
            l.inverse().act_coords(&mut y, n)?;
        }
        Ok(y)
    }

    pub fn coords(&self, n: usize) -> Result<Vec<BigInt>> {
        self.forward(&std_coords(n, self.base), n)
    }

    pub fn word(&self, cap: usize) -> Result<Word> {
        let mut w = words::std_word(self.base.a, self.base.b);
        for l in self.letters.iter().rev() {
            w = words::cyclic_reduce(&l.act_word(&w, cap)?);
            if w.len() > cap {
                return Err(Error::WordBudget { len: w.len(), cap });
            }
        }
        Ok(w)
    }
}

/// An essential simple closed curve. Equality compares coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Curve {
    surface: Surface,
    #[serde(with = "bigvec_str")]
    coords: Vec<BigInt>,
    frame: Frame,
}

impl PartialEq for Curve {
    fn eq(&self, o: &Self) -> bool {
        self.surface == o.surface && self.coords == o.coords
    }
}

impl Eq for Curve {}

impl std::hash::Hash for Curve {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.surface.hash(h);
        self.coords.hash(h);
    }
}

impl Curve {
    pub fn round(surface: Surface, iv: Interval) -> Result<Self> {
        let iv = Interval::new(iv.a, iv.b, surface.n())?;
        Ok(Curve { surface, coords: std_coords(surface.n(), iv), frame: Frame::round(iv) })
    }

    pub fn from_frame(surface: Surface, mut frame: Frame) -> Result<Self> {
        let n = surface.n();
        Interval::new(frame.base.a, frame.base.b, n)?;
        for l in &frame.letters {
            l.check(n)?;
        }
        frame.simplify();
        let coords = frame.coords(n)?;
        Ok(Curve { surface, coords, frame })
    }

    /// Certifies that the coordinates describe one essential simple closed curve
    /// by untangling them to a round curve.
    pub fn from_coords(surface: Surface, coords: Vec<BigInt>) -> Result<Self> {
        let n = surface.n();
        if coords.len() != 2 * (n - 2) {
            return invalid(format!("expected {} coordinates, got {}", 2 * (n - 2), coords.len()));
        }
        let (ops, base) = untangle_coords(&coords, n)?;
        let letters = ops.iter().map(|&(i, inv)| Letter::Half { i, inverse: !inv }).collect();
        let mut frame = Frame { letters, base };
        frame.simplify();
        let c = Curve { surface, coords, frame };
        debug_assert_eq!(c.frame.coords(n).ok().as_ref(), Some(&c.coords));
        Ok(c)
    }

    /// Parses a cyclic basis word and certifies simplicity by untangling.
    pub fn from_word(surface: Surface, w: &[i32]) -> Result<Self> {
        let n = surface.n();
        let w = words::cyclic_reduce(w);
        if w.iter().any(|l| l.unsigned_abs() as usize > n || *l == 0) {
            return invalid("letter outside the basis");
        }
        if !words::is_primitive(&w) {
            return Err(Error::NotSimple(format!("{} is empty or a proper power", words::format_word(&w))));
        }
        let (ops, base) = untangle_word(&w, n)?;
        let letters = ops.iter().map(|&(i, inv)| Letter::Half { i, inverse: !inv }).collect();
        let c = Curve::from_frame(surface, Frame { letters, base })?;
        let back = c.frame.word(w.len() * 4 + 16)?;
        if !words::same_cyclic_class(&back, &w) {
            return Err(Error::NotSimple(words::format_word(&w)));
        }
        Ok(c)
    }

    pub fn parse_word(surface: Surface, s: &str) -> Result<Self> {
        let w = words::parse_word(s, surface.n())?;
        Self::from_word(surface, &w)
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Round-curve interval if the curve is round.
    pub fn as_round(&self) -> Option<Interval> {
        round_interval(&self.coords, self.surface.n())
    }

    /// Basis word, failing if longer than `cap`.
    pub fn word(&self, cap: usize) -> Result<Word> {
        self.frame.word(cap)
    }

    pub fn word_string(&self, cap: usize) -> Result<String> {
        Ok(words::format_word(&self.word(cap)?))
    }

    /// Intersections with the arcs between consecutive disk punctures.
    pub fn beta(&self) -> Vec<BigInt> {
        dynnikov::beta(&self.coords, self.surface.n())
    }

    /// Applies a frame word to this curve.
    pub fn apply_letters(&self, letters: &[Letter]) -> Result<Curve> {
        let n = self.surface.n();
        let mut coords = self.coords.clone();
        for l in letters.iter().rev() {
            l.check(n)?;
            l.act_coords(&mut coords, n)?;
        }
        let mut all = letters.to_vec();
        all.extend(self.frame.letters.iter().cloned());
        let mut frame = Frame { letters: all, base: self.frame.base };
        frame.simplify();
        Ok(Curve { surface: self.surface, coords, frame })
    }

    pub fn twist(&self, power: impl Into<BigInt>) -> Generator {
        Generator::Twist { curve: self.clone(), power: power.into() }
    }
}

fn round_interval(x: &[BigInt], n: usize) -> Option<Interval> {
    let beta = dynnikov::beta(x, n);
    let two = BigInt::from(2);
    let on: Vec<usize> = (0..n - 1).filter(|&i| beta[i] == two).collect();
    let a = *on.first()? + 1;
    let b = *on.last()? + 2;
    let iv = Interval::new(a, b, n).ok()?;
    (std_coords(n, iv) == x).then_some(iv)
}

/// Best-first search over half-twist moves, ordered by `cost`, until `goal`
/// recognises a round curve. Returns the moves in application order.
fn untangle<S, K>(
    start: S,
    n: usize,
    step: impl Fn(&S, usize, bool) -> S,
    cost: impl Fn(&S) -> K,
    canon: impl Fn(&S) -> S,
    goal: impl Fn(&S) -> Option<Interval>,
) -> Result<(Vec<(usize, bool)>, Interval)>
where
    S: Clone + Eq + std::hash::Hash,
    K: Ord,
{
    use std::cmp::Reverse;
    use std::collections::{BinaryHeap, HashMap};
    let mut parent: HashMap<S, Option<(S, (usize, bool))>> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let mut states: Vec<S> = Vec::new();
    parent.insert(canon(&start), None);
    heap.push((Reverse(cost(&start)), Reverse(0usize)));
    states.push(start);
    while let Some((_, Reverse(idx))) = heap.pop() {
        let cur = states[idx].clone();
        if let Some(iv) = goal(&cur) {
            let mut ops = Vec::new();
            let mut key = canon(&cur);
            while let Some(Some((prev, op))) = parent.get(&key) {
                ops.push(*op);
                key = prev.clone();
            }
            ops.reverse();
            return Ok((ops, iv));
        }
        if states.len() > UNTANGLE_CAP {
            return Err(Error::InvalidInput(format!("untangling exceeded {UNTANGLE_CAP} states")));
        }
        for i in 1..n {
            for inv in [false, true] {
                let y = step(&cur, i, inv);
                let ky = canon(&y);
                if parent.contains_key(&ky) {
                    continue;
                }
                parent.insert(ky, Some((canon(&cur), (i, inv))));
                heap.push((Reverse(cost(&y)), Reverse(states.len())));
                states.push(y);
            }
        }
    }
    Err(Error::NotSimple("no untangling move sequence reaches a round curve".into()))
}

fn untangle_coords(x: &[BigInt], n: usize) -> Result<(Vec<(usize, bool)>, Interval)> {
    if x.iter().all(|v| v.is_zero()) {
        return Err(Error::NotSimple("zero coordinates".into()));
    }
    let start = dynnikov::beta_sum(x, n);
    let bound = BigInt::from(2) * start.clone() + BigInt::from(2 * n);
    untangle(
        x.to_vec(),
        n,
        |c, i, inv| {
            let mut y = c.clone();
            apply_ops(&mut y, n, &[(i, inv)], &mut Tracer::plain());
            y
        },
        |c| {
            let s = dynnikov::beta_sum(c, n);
            if s > bound {
                (true, s)
            } else {
                (false, s)
            }
        },
        |c| c.clone(),
        |c| round_interval(c, n),
    )
    .map_err(|e| match e {
        Error::NotSimple(_) | Error::InvalidInput(_) => {
            Error::NotSimple("coordinates do not untangle to a round curve".into())
        }
        other => other,
    })
}

fn word_round(w: &[i32], n: usize) -> Option<Interval> {
    let l = w.len();
    if l < 2 {
        return None;
    }
    let cands = [w.to_vec(), words::inverse(w)];
    for c in &cands {
        for s in 0..l {
            let a = c[s];
            if a <= 0 {
                continue;
            }
            if (0..l).all(|t| c[(s + t) % l] == a + t as i32) {
                return Interval::new(a as usize, a as usize + l - 1, n).ok();
            }
        }
    }
    None
}

/// Least rotation of the word or its inverse.
fn canonical_word(w: &[i32]) -> Word {
    let l = w.len();
    let inv = words::inverse(w);
    let mut best: Option<Word> = None;
    for c in [w, &inv[..]] {
        for s in 0..l.max(1) {
            let r: Word = (0..l).map(|t| c[(s + t) % l]).collect();
            if best.as_ref().is_none_or(|b| r < *b) {
                best = Some(r);
            }
        }
    }
    best.unwrap_or_default()
}

fn untangle_word(w: &[i32], n: usize) -> Result<(Vec<(usize, bool)>, Interval)> {
    untangle(
        w.to_vec(),
        n,
        |c, i, inv| words::cyclic_reduce(&words::artin(c, i, inv)),
        |c| c.len(),
        |c| canonical_word(c),
        |c| word_round(c, n),
    )
    .map_err(|_| Error::NotSimple(words::format_word(w)))
}

/// Geometric intersection number, computed through the shorter frame.
pub fn intersection(x: &Curve, y: &Curve) -> Result<BigInt> {
    x.surface.check(&y.surface)?;
    if x == y {
        return Ok(BigInt::zero());
    }
    let (s, t) = if x.frame.letters.len() <= y.frame.letters.len() { (x, y) } else { (y, x) };
    let n = s.surface.n();
    let pulled = s.frame.backward(&t.coords, n)?;
    dynnikov::intersection_with_std(s.frame.base, &pulled, n)
}

/// Pairwise-disjoint, pairwise-distinct curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiCurve {
    curves: Vec<Curve>,
}

impl MultiCurve {
    pub fn new(curves: Vec<Curve>) -> Result<Self> {
        for (i, x) in curves.iter().enumerate() {
            for y in &curves[i + 1..] {
                if x == y {
                    return invalid("repeated curve in multicurve");
                }
                if !intersection(x, y)?.is_zero() {
                    return invalid("multicurve components intersect");
                }
            }
        }
        Ok(MultiCurve { curves })
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }
}

pub(crate) mod bigint_str {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

pub(crate) mod bigvec_str {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| s.parse().map_err(D::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: usize) -> Surface {
        Surface::sphere(p).unwrap()
    }

    fn rc(p: usize, a: usize, b: usize) -> Curve {
        Curve::round(s(p), Interval { a, b }).unwrap()
    }

    #[test]
    fn surface_validation() {
        assert!(Surface::sphere(3).is_err());
        assert!(Surface::new(1, 5).is_err());
        assert_eq!(s(5).xi(), 2);
        assert_eq!(s(5).n(), 4);
    }

    #[test]
    fn round_curves_intersections() {
        assert_eq!(intersection(&rc(5, 1, 2), &rc(5, 2, 3)).unwrap(), BigInt::from(2));
        assert_eq!(intersection(&rc(5, 1, 2), &rc(5, 3, 4)).unwrap(), BigInt::zero());
        let c = rc(5, 2, 4);
        assert_eq!(intersection(&c, &c).unwrap(), BigInt::zero());
        assert!(intersection(&rc(5, 1, 2), &rc(6, 1, 2)).is_err());
    }

    #[test]
    fn frame_simplification() {
        let iv = Interval { a: 1, b: 2 };
        let mut f = Frame {
            letters: vec![Letter::half(2), Letter::Half { i: 2, inverse: true }, Letter::twist(Interval { a: 3, b: 4 }, 5)],
            base: iv,
        };
        f.simplify();
        assert!(f.letters.is_empty());
    }

    #[test]
    fn word_roundtrip() {
        let sf = s(6);
        let c = rc(6, 2, 4).apply_letters(&[Letter::half(1), Letter::Half { i: 4, inverse: true }, Letter::half(3)]).unwrap();
        let w = c.word(1000).unwrap();
        let d = Curve::from_word(sf, &w).unwrap();
        assert_eq!(c, d);
        let e = Curve::from_coords(sf, c.coords().to_vec()).unwrap();
        assert_eq!(e, c);
        assert_eq!(e.frame().coords(5).unwrap(), c.coords);
    }

    #[test]
    fn rejects_non_simple() {
        let sf = s(5);
        assert!(Curve::from_word(sf, &[1, 2, -1, -2]).is_err());
        assert!(Curve::from_word(sf, &[1, 1]).is_err());
        assert!(Curve::from_coords(sf, vec![BigInt::zero(); 4]).is_err());
        let mut x = rc(5, 1, 2).coords().to_vec();
        for v in &mut x {
            *v *= 2;
        }
        assert!(Curve::from_coords(sf, x).is_err());
    }

    #[test]
    fn serde_roundtrip() {
        let c = rc(5, 1, 3).apply_letters(&[Letter::twist(Interval { a: 2, b: 4 }, 1000)]).unwrap();
        let j = serde_json::to_string(&c).unwrap();
        let d: Curve = serde_json::from_str(&j).unwrap();
        assert_eq!(c, d);
        assert_eq!(c.frame(), d.frame());
    }
}
