//! Piecewise-linear evaluation with recorded or forced branch choices.
//!
//! All coordinate maps are built from `max`/`min` of linear forms. Recording the
//! branch taken at each `max`/`min` pins down the linear piece in use; replaying
//! those choices on another vector evaluates the same linear map and reports
//! whether the vector lies in the same closed cone.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Plain,
    Record,
    Force,
}

#[derive(Debug, Clone)]
pub(crate) struct Tracer {
    mode: Mode,
    choices: Vec<bool>,
    /// Slack of each comparison, signed so the chosen branch has slack `>= 0`.
    margins: Vec<BigInt>,
    pos: usize,
    valid: bool,
}

impl Tracer {
    pub fn plain() -> Self {
        Tracer { mode: Mode::Plain, choices: Vec::new(), margins: Vec::new(), pos: 0, valid: true }
    }

    pub fn record() -> Self {
        Tracer { mode: Mode::Record, choices: Vec::new(), margins: Vec::new(), pos: 0, valid: true }
    }

    pub fn force(choices: Vec<bool>) -> Self {
        Tracer { mode: Mode::Force, choices, margins: Vec::new(), pos: 0, valid: true }
    }

    pub fn choices(&self) -> &[bool] {
        &self.choices
    }

    pub fn margins(&self) -> &[BigInt] {
        &self.margins
    }

    fn margin(&mut self, u: &BigInt, v: &BigInt, want: Ordering, first: bool) {
        let d = if want == Ordering::Greater { u - v } else { v - u };
        self.margins.push(if first { d } else { -d });
    }

    /// True when every forced choice was consistent with the input.
    pub fn valid(&self) -> bool {
        self.valid && (self.mode != Mode::Force || self.pos == self.choices.len())
    }

    fn pick(&mut self, u: BigInt, v: BigInt, want: Ordering) -> BigInt {
        match self.mode {
            Mode::Plain => {
                if u.cmp(&v) != want.reverse() {
                    u
                } else {
                    v
                }
            }
            Mode::Record => {
                let first = u.cmp(&v) != want.reverse();
                self.choices.push(first);
                self.margin(&u, &v, want, first);
                if first {
                    u
                } else {
                    v
                }
            }
            Mode::Force => {
                let first = match self.choices.get(self.pos) {
                    Some(&c) => c,
                    None => {
                        self.valid = false;
                        true
                    }
                };
                self.pos += 1;
                self.margin(&u, &v, want, first);
                let ord = u.cmp(&v);
                if first {
                    if ord == want.reverse() {
                        self.valid = false;
                    }
                    u
                } else {
                    if ord == want {
                        self.valid = false;
                    }
                    v
                }
            }
        }
    }

    pub fn max(&mut self, u: BigInt, v: BigInt) -> BigInt {
        self.pick(u, v, Ordering::Greater)
    }

    pub fn min(&mut self, u: BigInt, v: BigInt) -> BigInt {
        self.pick(u, v, Ordering::Less)
    }

    pub fn pos(&mut self, u: BigInt) -> BigInt {
        self.max(u, BigInt::zero())
    }

    pub fn neg(&mut self, u: BigInt) -> BigInt {
        self.min(u, BigInt::zero())
    }

    pub fn abs(&mut self, u: BigInt) -> BigInt {
        let m = -&u;
        self.max(u, m)
    }
}
