//! Free-group words on the rose with one petal per disk puncture.
//!
//! Letter `+i` is the loop `x_i` around puncture `P_i`, `-i` its inverse.
//! Braid generators act by the Artin substitution.

use crate::error::{invalid, Result};

pub type Word = Vec<i32>;

pub fn inverse(w: &[i32]) -> Word {
    w.iter().rev().map(|l| -l).collect()
}

pub fn reduce(w: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn cyclic_reduce(w: &[i32]) -> Word {
    let w = reduce(w);
    let mut lo = 0;
    let mut hi = w.len();
    while hi - lo >= 2 && w[lo] == -w[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    w[lo..hi].to_vec()
}

/// True if the cyclic word is not a proper power.
pub fn is_primitive(w: &[i32]) -> bool {
    let l = w.len();
    if l == 0 {
        return false;
    }
    (1..l).filter(|d| l.is_multiple_of(*d)).all(|d| (0..l).any(|i| w[i] != w[(i + d) % l]))
}

/// Equality of free homotopy classes of unoriented loops.
pub fn same_cyclic_class(u: &[i32], v: &[i32]) -> bool {
    let u = cyclic_reduce(u);
    let v = cyclic_reduce(v);
    if u.len() != v.len() {
        return false;
    }
    if u.is_empty() {
        return true;
    }
    let vi = inverse(&v);
    let l = u.len();
    let rot = |t: &[i32], s: usize| (0..l).all(|i| u[i] == t[(i + s) % l]);
    (0..l).any(|s| rot(&v, s) || rot(&vi, s))
}

/// Applies `sigma_i^{+-1}` by substitution, then freely reduces.
pub fn artin(w: &[i32], i: usize, inverse_gen: bool) -> Word {
    let i = i as i32;
    let mut out = Vec::with_capacity(w.len() + 4);
    for &l in w {
        let g = l.abs();
        let img: Vec<i32> = if g == i {
            if inverse_gen {
                vec![i + 1]
            } else {
                vec![i, i + 1, -i]
            }
        } else if g == i + 1 {
            if inverse_gen {
                vec![-(i + 1), i, i + 1]
            } else {
                vec![i]
            }
        } else {
            vec![g]
        };
        if l > 0 {
            out.extend(img);
        } else {
            out.extend(img.iter().rev().map(|x| -x));
        }
    }
    reduce(&out)
}

/// Applies half-twists in application order and cyclically reduces.
pub fn act(w: &[i32], ops: &[(usize, bool)], cap: usize) -> Result<Word> {
    let mut cur = w.to_vec();
    for &(i, inv) in ops {
        cur = artin(&cur, i, inv);
        if cur.len() > cap {
            return Err(crate::error::Error::WordBudget { len: cur.len(), cap });
        }
    }
    Ok(cyclic_reduce(&cur))
}

pub fn std_word(a: usize, b: usize) -> Word {
    (a as i32..=b as i32).collect()
}

/// Half-edge where a traversal of letter `l` leaves the vertex.
pub(crate) fn out_pos(l: i32) -> usize {
    if l > 0 {
        2 * (l as usize - 1)
    } else {
        2 * ((-l) as usize - 1) + 1
    }
}

fn between(h: usize, h1: usize, h2: usize, m: usize) -> bool {
    let d = (h + m - h1) % m;
    0 < d && d < (h2 + m - h1) % m
}

/// Geometric intersection of two distinct primitive cyclically reduced words by
/// counting linked pairs on the rose.
pub fn linked_pairs(p: &[i32], q: &[i32], n: usize) -> usize {
    let m = 2 * n;
    let bound = p.len() + q.len() + 2;
    let lp = p.len();
    let mut total = 0;
    for orient in 0..2 {
        let qq: Word = if orient == 0 { q.to_vec() } else { inverse(q) };
        let lq = qq.len();
        for i in 0..lp {
            for j in 0..lq {
                let p_in = out_pos(-p[(i + lp - 1) % lp]);
                let q_in = out_pos(-qq[(j + lq - 1) % lq]);
                if p_in == q_in {
                    continue;
                }
                let mut k = 0;
                while p[(i + k) % lp] == qq[(j + k) % lq] {
                    k += 1;
                    if k > bound {
                        return 0;
                    }
                }
                let p_out = out_pos(p[(i + k) % lp]);
                let q_out = out_pos(qq[(j + k) % lq]);
                let (c_out, c_in) = if k == 0 {
                    if orient == 1 || p_in == q_out || p_out == q_in {
                        continue;
                    }
                    (p_out, p_in)
                } else {
                    (out_pos(p[i]), out_pos(-p[(i + k - 1) % lp]))
                };
                if between(q_in, p_in, c_out, m) != between(q_out, c_in, p_out, m) {
                    total += 1;
                }
            }
        }
    }
    total
}

pub fn format_word(w: &[i32]) -> String {
    w.iter()
        .map(|&l| if l > 0 { format!("x{l}") } else { format!("x{}⁻¹", -l) })
        .collect::<Vec<_>>()
        .join(".")
}

/// Parses `x1.x2⁻¹.x3` (also accepts `x2^-1`).
pub fn parse_word(s: &str, n: usize) -> Result<Word> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for tok in s.split('.') {
        let tok = tok.trim();
        let (body, inv) = if let Some(b) = tok.strip_suffix("⁻¹") {
            (b, true)
        } else if let Some(b) = tok.strip_suffix("^-1") {
            (b, true)
        } else {
            (tok, false)
        };
        let idx: i32 = match body.strip_prefix('x').and_then(|d| d.parse().ok()) {
            Some(v) => v,
            None => return invalid(format!("bad letter {tok:?}")),
        };
        if idx < 1 || idx as usize > n {
            return invalid(format!("letter {tok:?} outside x1..x{n}"));
        }
        out.push(if inv { -idx } else { idx });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction() {
        assert_eq!(reduce(&[1, 2, -2, 3]), vec![1, 3]);
        assert_eq!(cyclic_reduce(&[-1, 2, 3, 1]), vec![2, 3]);
        assert!(is_primitive(&[1, 2]));
        assert!(!is_primitive(&[1, 2, 1, 2]));
    }

    #[test]
    fn artin_inverse() {
        let w = vec![1, 2, -3, 4, 2];
        for i in 1..4 {
            assert_eq!(artin(&artin(&w, i, false), i, true), w);
        }
    }

    #[test]
    fn parse_format_roundtrip() {
        let w = vec![1, -2, 3];
        let s = format_word(&w);
        assert_eq!(s, "x1.x2⁻¹.x3");
        assert_eq!(parse_word(&s, 4).unwrap(), w);
        assert_eq!(parse_word("x1.x2^-1.x3", 4).unwrap(), w);
        assert!(parse_word("x5", 4).is_err());
        assert!(parse_word("y1", 4).is_err());
    }

    #[test]
    fn round_curve_pairs() {
        assert_eq!(linked_pairs(&std_word(1, 2), &std_word(2, 3), 4), 2);
        assert_eq!(linked_pairs(&std_word(1, 2), &std_word(3, 4), 4), 0);
        assert_eq!(linked_pairs(&std_word(1, 3), &std_word(2, 4), 4), 2);
        assert_eq!(linked_pairs(&std_word(1, 3), &std_word(2, 3), 4), 0);
    }

    #[test]
    fn cyclic_class() {
        assert!(same_cyclic_class(&[1, 2, 3], &[3, 1, 2]));
        assert!(same_cyclic_class(&[1, 2, 3], &[-2, -1, -3]));
        assert!(!same_cyclic_class(&[1, 2, 3], &[1, 3, 2]));
    }
}
