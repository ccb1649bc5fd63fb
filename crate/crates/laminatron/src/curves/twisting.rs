//! Relative twisting of two curves about a third.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{intersection, Curve};
use crate::error::{invalid, Error, Result};

/// Maximum number of profile samples in the unimodality check.
const SCAN_POINTS: i64 = 201;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Twisting {
    /// Centre of the set of minimisers of `n -> i(T_alpha^n beta, beta')`.
    #[serde(with = "super::bigint_str")]
    pub argmin: BigInt,
    #[serde(with = "super::bigint_str")]
    pub min_value: BigInt,
    /// Ends of the minimising plateau.
    #[serde(with = "super::bigvec_str")]
    pub plateau: Vec<BigInt>,
    /// Radius `i(beta, beta') / (i(alpha, beta) i(alpha, beta'))` rounded up: the
    /// additive uncertainty of `|argmin|` as an annular coefficient.
    #[serde(with = "super::bigint_str")]
    pub slack: BigInt,
}

fn smallest_true(lo: &BigInt, hi: &BigInt, mut p: impl FnMut(&BigInt) -> Result<bool>) -> Result<BigInt> {
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    while lo < hi {
        let mid = (&lo + &hi).div_floor(&BigInt::from(2));
        if p(&mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// Signed minimiser of `n -> i(T_alpha^n beta, beta')`, found by bisection on the
/// sign of the forward difference inside the window allowed by the twist
/// inequality, then checked for unimodality on a window around it.
pub fn relative_twisting(alpha: &Curve, beta: &Curve, beta_p: &Curve) -> Result<Twisting> {
    let ia = intersection(alpha, beta)?;
    let ib = intersection(alpha, beta_p)?;
    if ia.is_zero() || ib.is_zero() {
        return invalid("relative twisting needs both curves to meet the core curve");
    }
    let ii = &ia * &ib;
    let i0 = intersection(beta, beta_p)?;
    let f = |n: &BigInt| -> Result<BigInt> { intersection(&alpha.twist(n.clone()).apply(beta)?, beta_p) };
    let slack = i0.div_ceil(&ii);
    let r = BigInt::from(2) * &slack + 1;
    let lo = -&r;
    let left = smallest_true(&lo, &r, |n| Ok(f(&(n + 1))? >= f(n)?))?;
    let right = smallest_true(&left, &r, |n| Ok(f(&(n + 1))? > f(n)?))?;
    let argmin = (&left + &right).div_floor(&BigInt::from(2));
    let min_value = f(&argmin)?;

    let half = (BigInt::from(2) * slack.clone().max(BigInt::one())).max(&right - &left + 2);
    let span = BigInt::from(2) * &half;
    let stride = (&span / BigInt::from(SCAN_POINTS - 1)).max(BigInt::one());
    let mut prev: Option<BigInt> = None;
    let mut rising = false;
    let mut n = &argmin - &half;
    while n <= &argmin + &half {
        let v = f(&n)?;
        if let Some(p) = &prev {
            if &v > p {
                rising = true;
            } else if &v < p && rising {
                return Err(Error::NonUnimodal(format!(
                    "profile drops again at n = {n} (window {}..{})",
                    &argmin - &half,
                    &argmin + &half
                )));
            }
        }
        if v < min_value {
            return Err(Error::NonUnimodal(format!("value {v} at n = {n} below reported minimum {min_value}")));
        }
        prev = Some(v);
        n += &stride;
    }
    Ok(Twisting { argmin, min_value, plateau: vec![left, right], slack })
}

impl Twisting {
    /// `|argmin|` as a machine integer when it fits.
    pub fn magnitude(&self) -> Option<u64> {
        self.argmin.abs().to_u64()
    }
}
