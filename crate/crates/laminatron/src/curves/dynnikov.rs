//! Dynnikov coordinates on the `n`-punctured disk and the braid action on them.
//!
//! A curve is `(a_1..a_{n-2}, b_1..b_{n-2})`. The sphere has punctures
//! `P_1..P_n` in the disk plus the outer puncture, so `S_{0,n+1}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::pl::Tracer;
use crate::error::{invalid, Error, Result};

/// Iteration cap for certifying that a twist power has become affine.
pub const ACCEL_CAP: usize = 2000;

/// Punctures `a..=b` (1-based) bounded by a round curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub a: usize,
    pub b: usize,
}

impl Interval {
    pub fn new(a: usize, b: usize, n: usize) -> Result<Self> {
        if a < 1 || b > n || a >= b || (a == 1 && b == n) {
            return invalid(format!("no essential round curve around punctures {a}..{b} of {n}"));
        }
        Ok(Interval { a, b })
    }

    pub fn len(&self) -> usize {
        self.b - self.a + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: usize) -> bool {
        self.a <= p && p <= self.b
    }

    /// Round curves around intervals are disjoint iff nested or separated.
    pub fn disjoint_from(&self, o: &Interval) -> bool {
        let nested = (self.a <= o.a && o.b <= self.b) || (o.a <= self.a && self.b <= o.b);
        nested || self.b < o.a || o.b < self.a
    }

    /// Full twist about the round curve, as half-twists in application order.
    pub fn twist_ops(&self, inverse: bool) -> Vec<(usize, bool)> {
        let mut w = Vec::new();
        for _ in 0..self.len() {
            for i in self.a..self.b {
                w.push(i);
            }
        }
        // written word sigma_a..sigma_{b-1} repeated; application order is right to left
        let mut ops: Vec<(usize, bool)> = w.into_iter().rev().map(|i| (i, false)).collect();
        if inverse {
            ops.reverse();
            for op in &mut ops {
                op.1 = true;
            }
        }
        ops
    }

    /// True if the half twist `sigma_i` maps this round curve to itself.
    pub fn fixed_by_half_twist(&self, i: usize) -> bool {
        self.contains(i) == self.contains(i + 1)
    }
}

pub fn std_coords(n: usize, iv: Interval) -> Vec<BigInt> {
    let k = n - 2;
    let beta: Vec<i64> = (1..n).map(|i| if iv.a <= i && i < iv.b { 2 } else { 0 }).collect();
    let mut x = vec![BigInt::zero(); 2 * k];
    for i in 0..k {
        x[k + i] = BigInt::from((beta[i] - beta[i + 1]) / 2);
    }
    x
}

/// `max_k (|a_k| + b_k^+ + sum_{j<k} b_j)`, half of `beta_1`.
fn half_beta1(x: &[BigInt], k: usize, t: &mut Tracer) -> BigInt {
    let mut best: Option<BigInt> = None;
    let mut s = BigInt::zero();
    for j in 0..k {
        let v = t.abs(x[j].clone()) + t.pos(x[k + j].clone()) + &s;
        best = Some(match best {
            None => v,
            Some(b) => t.max(b, v),
        });
        s += &x[k + j];
    }
    best.unwrap_or_default()
}

/// Intersection numbers `beta_1..beta_{n-1}` with the vertical arcs between punctures.
pub fn beta(x: &[BigInt], n: usize) -> Vec<BigInt> {
    let k = n - 2;
    let m = half_beta1(x, k, &mut Tracer::plain());
    let mut out = Vec::with_capacity(n - 1);
    let mut s = BigInt::zero();
    for i in 0..n - 1 {
        out.push(BigInt::from(2) * (&m - &s));
        if i < k {
            s += &x[k + i];
        }
    }
    out
}

/// Sum of `beta`, i.e. intersection with the real axis minus the punctures.
pub fn beta_sum(x: &[BigInt], n: usize) -> BigInt {
    beta(x, n).into_iter().sum()
}

fn fwd(a0: BigInt, a1: BigInt, b0: BigInt, b1: BigInt, t: &mut Tracer) -> [BigInt; 4] {
    let pb1 = t.pos(b1.clone());
    let nb0 = t.neg(b0.clone());
    let c = &a0 - &a1 + &pb1 - &nb0;
    let pc = t.pos(c.clone());
    let pb0 = t.pos(b0.clone());
    let r0 = &a0 + pb0 + t.pos(&pb1 - &c);
    let nb1 = t.neg(b1.clone());
    let r1 = &a1 + nb1 + t.neg(&nb0 + &c);
    [r0, r1, &b1 - &pc, &b0 + &pc]
}

/// Applies `sigma_i` (or its inverse) to `x` in place.
pub(crate) fn half_twist(x: &mut [BigInt], n: usize, i: usize, inverse: bool, t: &mut Tracer) {
    debug_assert!(1 <= i && i < n);
    let k = n - 2;
    let get_a = |x: &[BigInt], p: usize| if p == 0 || p == n - 1 { BigInt::zero() } else { x[p - 1].clone() };
    let a0 = get_a(x, i - 1);
    let a1 = get_a(x, i);
    let b0;
    let b1;
    let mut total_b = BigInt::zero();
    let m = if i == 1 || i == n - 1 {
        for j in 0..k {
            total_b += &x[k + j];
        }
        half_beta1(x, k, t)
    } else {
        BigInt::zero()
    };
    if i == 1 {
        b0 = -&m;
    } else {
        b0 = x[k + i - 2].clone();
    }
    if i == n - 1 {
        b1 = &m - &total_b;
    } else {
        b1 = x[k + i - 1].clone();
    }
    let [r0, r1, s0, s1] = if inverse {
        let [r0, r1, s0, s1] = fwd(-a0, -a1, b0, b1, t);
        [-r0, -r1, s0, s1]
    } else {
        fwd(a0, a1, b0, b1, t)
    };
    if i >= 2 {
        x[i - 2] = r0;
        x[k + i - 2] = s0;
    }
    if i <= n - 2 {
        x[i - 1] = r1;
        x[k + i - 1] = s1;
    }
}

pub(crate) fn apply_ops(x: &mut [BigInt], n: usize, ops: &[(usize, bool)], t: &mut Tracer) {
    for &(i, inv) in ops {
        half_twist(x, n, i, inv, t);
    }
}

/// `ops^count (x)` for `count >= 0`. Runs of the orbit along one linear piece
/// are crossed in a single jump; once the piece is certified to contain the
/// whole forward orbit the remaining count is applied at once.
pub(crate) fn power(x: &[BigInt], n: usize, ops: &[(usize, bool)], count: &BigInt) -> Result<Vec<BigInt>> {
    if count.is_negative() {
        return invalid("negative iteration count");
    }
    let mut cur = x.to_vec();
    let mut j = BigInt::zero();
    for _ in 0..ACCEL_CAP {
        if &j == count {
            return Ok(cur);
        }
        let left = count - &j;
        let (d, steps) = match step_certified(&cur, n, ops) {
            Step::Affine(d) => (d, left),
            Step::Run(d, r) => (d, r.min(left)),
            Step::Moved(next) => {
                cur = next;
                j += BigInt::one();
                continue;
            }
        };
        for (c, di) in cur.iter_mut().zip(&d) {
            *c += di * &steps;
        }
        j += steps;
    }
    Err(Error::AccelerationFailed(ACCEL_CAP))
}

enum Step {
    /// The map is affine with this displacement along the forward orbit.
    Affine(Vec<BigInt>),
    /// The orbit moves by this displacement for this many steps.
    Run(Vec<BigInt>, BigInt),
    Moved(Vec<BigInt>),
}

fn step_certified(cur: &[BigInt], n: usize, ops: &[(usize, bool)]) -> Step {
    let mut rec = Tracer::record();
    let mut next = cur.to_vec();
    apply_ops(&mut next, n, ops, &mut rec);
    let d: Vec<BigInt> = next.iter().zip(cur).map(|(p, q)| p - q).collect();
    if d.iter().all(|v| v.is_zero()) {
        return Step::Affine(d);
    }
    let mut forced = Tracer::force(rec.choices().to_vec());
    let mut img = d.clone();
    apply_ops(&mut img, n, ops, &mut forced);
    if img != d || forced.margins().len() != rec.margins().len() {
        return Step::Moved(next);
    }
    if forced.valid() {
        return Step::Affine(d);
    }
    // every map is homogeneous, so the slacks along `cur + s d` are affine in `s`
    let mut run: Option<BigInt> = None;
    for (mx, md) in rec.margins().iter().zip(forced.margins()) {
        if md.is_negative() {
            let s = mx.div_floor(&-md);
            run = Some(run.map_or(s.clone(), |r| r.min(s)));
        }
    }
    match run {
        Some(r) if r >= BigInt::from(2) => Step::Run(d, r + 1),
        _ => Step::Moved(next),
    }
}

/// Certified eventual displacement of the orbit of `x` under `ops`.
pub(crate) fn displacement(x: &[BigInt], n: usize, ops: &[(usize, bool)]) -> Result<Vec<BigInt>> {
    let mut cur = x.to_vec();
    for _ in 0..ACCEL_CAP {
        match step_certified(&cur, n, ops) {
            Step::Affine(d) => return Ok(d),
            Step::Run(d, r) => {
                for (c, di) in cur.iter_mut().zip(&d) {
                    *c += di * &r;
                }
            }
            Step::Moved(next) => cur = next,
        }
    }
    Err(Error::AccelerationFailed(ACCEL_CAP))
}

/// `i(c_iv, x)`: the twist about `c_iv` eventually moves `x` by `i * c_iv`.
pub fn intersection_with_std(iv: Interval, x: &[BigInt], n: usize) -> Result<BigInt> {
    let ops = iv.twist_ops(false);
    let d = displacement(x, n, &ops)?;
    let c = std_coords(n, iv);
    let (pos, cv) = c.iter().enumerate().find(|(_, v)| !v.is_zero()).expect("round curve has nonzero coordinate");
    let i = &d[pos] / cv;
    if i.is_negative() || d.iter().zip(&c).any(|(di, ci)| *di != &i * ci) {
        return Err(Error::NotSimple(format!("twist displacement {d:?} is not a multiple of the core curve")));
    }
    Ok(i)
}
