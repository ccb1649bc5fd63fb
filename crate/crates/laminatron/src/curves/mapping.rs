//! Mapping-class words acting on curves.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{bigint_str, Curve, Frame, Interval, Letter, Surface};
use crate::error::{invalid, Error, Result};

/// Curves of the pentagon on `S_{0,5}`, consecutive ones disjoint.
pub const PENTAGON: [(usize, usize); 5] = [(1, 2), (3, 4), (2, 4), (2, 3), (1, 3)];

pub(crate) fn pentagon_index(iv: &Interval) -> Option<usize> {
    PENTAGON.iter().position(|&(a, b)| a == iv.a && b == iv.b)
}

fn pentagon_shift(iv: &Interval, power: i64) -> Result<Interval> {
    let j = pentagon_index(iv).ok_or(Error::NotPentagonPure)?;
    let (a, b) = PENTAGON[(j as i64 + power).rem_euclid(5) as usize];
    Ok(Interval { a, b })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Power of the Dehn twist about a curve.
    Twist {
        curve: Curve,
        #[serde(with = "bigint_str")]
        power: BigInt,
    },
    /// Power of the order-5 symmetry of `S_{0,5}` sending pentagon curve `j` to `j+1`.
    Rotation { power: i64 },
    /// A named braid given by a frame word.
    Braid { name: String, letters: Vec<Letter> },
}

impl Generator {
    pub fn half(i: usize, inverse: bool) -> Self {
        let name = if inverse { format!("s{i}⁻¹") } else { format!("s{i}") };
        Generator::Braid { name, letters: vec![Letter::Half { i, inverse }] }
    }

    pub fn inverse(&self) -> Generator {
        match self {
            Generator::Twist { curve, power } => Generator::Twist { curve: curve.clone(), power: -power },
            Generator::Rotation { power } => Generator::Rotation { power: -power },
            Generator::Braid { name, letters } => Generator::Braid {
                name: match name.strip_suffix("⁻¹") {
                    Some(s) => s.to_string(),
                    None => format!("{name}⁻¹"),
                },
                letters: letters.iter().rev().map(Letter::inverse).collect(),
            },
        }
    }

    /// The generator as a frame word, if it is a braid.
    pub fn letters(&self) -> Result<Vec<Letter>> {
        match self {
            Generator::Twist { curve, power } => {
                let f = curve.frame();
                let mut out = f.letters.clone();
                if !power.is_zero() {
                    out.push(Letter::Twist { iv: f.base, power: power.clone() });
                }
                out.extend(f.letters.iter().rev().map(Letter::inverse));
                Ok(out)
            }
            Generator::Rotation { .. } => Err(Error::NotPentagonPure),
            Generator::Braid { letters, .. } => Ok(letters.clone()),
        }
    }

    pub fn apply(&self, c: &Curve) -> Result<Curve> {
        match self {
            Generator::Twist { curve, power } => {
                curve.surface().check(&c.surface())?;
                if power.is_zero() {
                    return Ok(c.clone());
                }
                c.apply_letters(&self.letters()?)
            }
            Generator::Rotation { power } => rotate(c, *power),
            Generator::Braid { letters, .. } => c.apply_letters(letters),
        }
    }
}

fn rotate(c: &Curve, power: i64) -> Result<Curve> {
    if c.surface() != Surface::s05() {
        return invalid("the pentagon rotation acts only on S_(0,5)");
    }
    if power.rem_euclid(5) == 0 {
        return Ok(c.clone());
    }
    let f = c.frame();
    let mut letters = Vec::with_capacity(f.letters.len());
    for l in &f.letters {
        match l {
            Letter::Twist { iv, power: p } => letters.push(Letter::Twist { iv: pentagon_shift(iv, power)?, power: p.clone() }),
            Letter::Half { .. } => return Err(Error::NotPentagonPure),
        }
    }
    Curve::from_frame(c.surface(), Frame { letters, base: pentagon_shift(&f.base, power)? })
}

/// `gens[0] gens[1] .. gens[r-1]`; the rightmost generator acts first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingClass {
    pub surface: Surface,
    pub gens: Vec<Generator>,
}

impl MappingClass {
    pub fn identity(surface: Surface) -> Self {
        MappingClass { surface, gens: Vec::new() }
    }

    pub fn new(surface: Surface, gens: Vec<Generator>) -> Self {
        MappingClass { surface, gens }
    }

    pub fn inverse(&self) -> Self {
        MappingClass { surface: self.surface, gens: self.gens.iter().rev().map(Generator::inverse).collect() }
    }

    /// The product `self * other`; `other` acts first.
    pub fn compose(&self, other: &MappingClass) -> Result<Self> {
        self.surface.check(&other.surface)?;
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ok(MappingClass { surface: self.surface, gens })
    }

    pub fn apply(&self, c: &Curve) -> Result<Curve> {
        self.surface.check(&c.surface())?;
        let mut cur = c.clone();
        for g in self.gens.iter().rev() {
            cur = g.apply(&cur)?;
        }
        Ok(cur)
    }

    /// The whole word as a frame word when it contains no rotation.
    pub fn letters(&self) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        for g in &self.gens {
            out.extend(g.letters()?);
        }
        Ok(out)
    }
}

pub fn apply(w: &MappingClass, c: &Curve) -> Result<Curve> {
    w.apply(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::intersection;

    fn pent(j: usize) -> Curve {
        let (a, b) = PENTAGON[j];
        Curve::round(Surface::s05(), Interval { a, b }).unwrap()
    }

    #[test]
    fn pentagon_pattern() {
        for j in 0..5 {
            for k in 0..5 {
                let d = (k + 5 - j) % 5;
                let i = intersection(&pent(j), &pent(k)).unwrap();
                let want = if d == 0 || d == 1 || d == 4 { 0 } else { 2 };
                assert_eq!(i, BigInt::from(want), "{j} {k}");
            }
        }
    }

    #[test]
    fn rotation_shifts_pentagon() {
        let r = Generator::Rotation { power: 1 };
        for j in 0..5 {
            assert_eq!(r.apply(&pent(j)).unwrap(), pent((j + 1) % 5));
        }
        let c = pent(2).twist(3).apply(&pent(0)).unwrap();
        let rc = r.apply(&c).unwrap();
        assert_eq!(rc, pent(3).twist(3).apply(&pent(1)).unwrap());
        let back = Generator::Rotation { power: -1 }.apply(&rc).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rotation_needs_pentagon_frames() {
        let c = Generator::half(1, false).apply(&pent(3)).unwrap();
        assert_eq!(Generator::Rotation { power: 1 }.apply(&c), Err(Error::NotPentagonPure));
    }

    #[test]
    fn word_then_inverse() {
        let s = Surface::s05();
        let w = MappingClass::new(
            s,
            vec![pent(2).twist(5), Generator::half(1, true), pent(4).twist(-2), Generator::half(3, false)],
        );
        for j in 0..5 {
            let c = w.apply(&pent(j)).unwrap();
            assert_eq!(w.inverse().apply(&c).unwrap(), pent(j));
        }
    }

    #[test]
    fn twist_fixes_core() {
        let c = Generator::half(2, false).apply(&pent(0)).unwrap();
        assert_eq!(c.twist(17).apply(&c).unwrap(), c);
    }
}
