//! Explicit minimal-position realizations of curve families on the ribbon rose.
//!
//! The rose has one vertex disk and one band per basis letter. Strands in a band
//! are ordered by their forward itineraries, which puts the family in minimal
//! position; all crossings then happen between chords inside the vertex disk.
//! The realization is certified by matching every pairwise crossing count with
//! the coordinate intersection numbers. Complementary regions come from gluing
//! boundary gaps of the vertex disk through the bands.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::words::{self, out_pos, Word};
use super::{intersection, Curve, Letter, WORD_CAP};
use crate::error::{invalid, Error, Result};

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let nx = self.0[y];
            self.0[y] = r;
            y = nx;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Letter `k` steps along the strand `(c, j)` read from its band's A end;
/// negative `k` reads backwards.
fn itinerary(w: &[i32], j: usize, k: i64) -> i32 {
    let l = w.len() as i64;
    if w[j] > 0 {
        w[(j as i64 + k).rem_euclid(l) as usize]
    } else {
        -w[(j as i64 - k).rem_euclid(l) as usize]
    }
}

/// Turn comparison at step `k` in direction `dir` (+1 forward, -1 backward).
fn turn(a: &[i32], s: usize, b: &[i32], t: usize, k: i64, dir: i64, n: usize) -> Ordering {
    let m = 2 * n;
    let read = |w: &[i32], j: usize, k: i64| dir as i32 * itinerary(w, j, dir * k);
    let entry = out_pos(-read(a, s, k - 1));
    let d1 = (out_pos(read(a, s, k)) + m - entry) % m;
    let d2 = (out_pos(read(b, t, k)) + m - entry) % m;
    // a larger counter-clockwise offset is a left turn
    if dir > 0 {
        d2.cmp(&d1)
    } else {
        d1.cmp(&d2)
    }
}

/// Left-to-right order of two strands in the same band. Each pair is decided at
/// the nearer end of its common segment, so a linked pair switches sides exactly
/// once, at the middle of the segment.
fn compare_strands(ws: &[Word], s: (usize, usize), t: (usize, usize), n: usize) -> Ordering {
    let (a, b) = (&ws[s.0], &ws[t.0]);
    let bound = (a.len() + b.len() + 1) as i64;
    let diverge = |dir: i64| (1..=bound).find(|&k| itinerary(a, s.1, dir * k) != itinerary(b, t.1, dir * k));
    match (diverge(1), diverge(-1)) {
        (Some(f), Some(r)) if r < f => turn(a, s.1, b, t.1, r, -1, n),
        (Some(f), _) => turn(a, s.1, b, t.1, f, 1, n),
        (None, Some(r)) => turn(a, s.1, b, t.1, r, -1, n),
        (None, None) => s.cmp(&t),
    }
}

/// Slot positions and chords for the curves selected by `keep`.
struct Layout {
    n: usize,
    total: usize,
    halfedge: Vec<usize>,
    /// Per band: strands left to right, A-end slots, B-end slots.
    bands: Vec<Vec<(usize, usize)>>,
    off: Vec<usize>,
    /// `(arrival slot, departure slot, curve)` in traversal order per curve.
    chords: Vec<(usize, usize, usize)>,
    curve_chords: Vec<Vec<usize>>,
}

impl Layout {
    fn new(ws: &[Word], n: usize, order: &[Vec<(usize, usize)>], keep: &[bool]) -> Layout {
        let bands: Vec<Vec<(usize, usize)>> =
            order.iter().map(|v| v.iter().copied().filter(|s| keep[s.0]).collect()).collect();
        let mut off = vec![0usize; 2 * n + 1];
        for h in 0..2 * n {
            off[h + 1] = off[h] + bands[h / 2].len();
        }
        let total = off[2 * n];
        let mut halfedge = vec![0; total];
        for h in 0..2 * n {
            for slot in halfedge.iter_mut().take(off[h + 1]).skip(off[h]) {
                *slot = h;
            }
        }
        let mut slot_a: HashMap<(usize, usize), usize> = HashMap::new();
        let mut slot_b: HashMap<(usize, usize), usize> = HashMap::new();
        for (b, strands) in bands.iter().enumerate() {
            let nb = strands.len();
            for (p, s) in strands.iter().enumerate() {
                slot_a.insert(*s, off[2 * b] + nb - 1 - p);
                slot_b.insert(*s, off[2 * b + 1] + p);
            }
        }
        let mut chords = Vec::new();
        let mut curve_chords = vec![Vec::new(); ws.len()];
        for (c, w) in ws.iter().enumerate() {
            if !keep[c] {
                continue;
            }
            let l = w.len();
            for j in 0..l {
                let arr = if w[j] > 0 { slot_b[&(c, j)] } else { slot_a[&(c, j)] };
                let nj = (j + 1) % l;
                let dep = if w[nj] > 0 { slot_a[&(c, nj)] } else { slot_b[&(c, nj)] };
                curve_chords[c].push(chords.len());
                chords.push((arr, dep, c));
            }
        }
        Layout { n, total, halfedge, bands, off, chords, curve_chords }
    }

    fn crosses(&self, x: usize, y: usize) -> bool {
        let (p1, q1) = ordered(self.chords[x].0, self.chords[x].1);
        let (p2, q2) = ordered(self.chords[y].0, self.chords[y].1);
        (p1 < p2 && p2 < q1 && q1 < q2) || (p2 < p1 && p1 < q2 && q2 < q1)
    }

    /// Punctures met by the corners inside gap `g` (between slot `g` and `g+1`).
    fn gap_punctures(&self, g: usize) -> Vec<usize> {
        let m = 2 * self.n;
        let h0 = self.halfedge[g];
        let h1 = self.halfedge[(g + 1) % self.total];
        let mut out = Vec::new();
        let mut h = h0;
        let mut steps = 0;
        while h != h1 || (steps == 0 && g + 1 == self.total && h0 == h1) {
            out.push(if h.is_multiple_of(2) { h / 2 + 1 } else { self.n + 1 });
            h = (h + 1) % m;
            steps += 1;
            if steps > m {
                break;
            }
        }
        out
    }

    /// Gap signature: which chords have the gap on their `p..q` side.
    fn signature(&self, g: usize, chords: &[usize]) -> Vec<bool> {
        chords
            .iter()
            .map(|&c| {
                let (p, q) = ordered(self.chords[c].0, self.chords[c].1);
                p <= g && g < q
            })
            .collect()
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Complementary regions of a realized curve family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regions {
    /// Punctures in each region, `n + 1` standing for the outer puncture.
    pub punctures: Vec<Vec<usize>>,
    /// Regions meeting no band or boundary gap.
    pub interior: usize,
    /// Connected components of the union of the curves.
    pub components: usize,
    /// Pairwise crossing counts of the realization.
    pub crossings: Vec<Vec<usize>>,
}

impl Regions {
    pub fn count(&self) -> usize {
        self.punctures.len() + self.interior
    }

    /// Every region is a disk with at most one puncture.
    pub fn fills(&self) -> bool {
        self.components == 1 && self.punctures.iter().all(|p| p.len() <= 1)
    }
}

struct Analysis {
    regions: Regions,
    gap_class: Vec<usize>,
}

fn analyze(lay: &Layout, ncurves: usize, keep: &[bool]) -> Result<Analysis> {
    let t = lay.total;
    let nch = lay.chords.len();
    let mut crossings = vec![vec![0usize; ncurves]; ncurves];
    let mut total_x = 0;
    for x in 0..nch {
        for y in x + 1..nch {
            if lay.crosses(x, y) {
                let (cx, cy) = (lay.chords[x].2, lay.chords[y].2);
                crossings[cx][cy] += 1;
                if cx != cy {
                    crossings[cy][cx] += 1;
                }
                total_x += 1;
            }
        }
    }
    let mut uf_c = UnionFind::new(ncurves);
    for a in 0..ncurves {
        for b in 0..ncurves {
            if a != b && crossings[a][b] > 0 {
                uf_c.union(a, b);
            }
        }
    }
    let kept: Vec<usize> = (0..ncurves).filter(|&c| keep[c]).collect();
    let mut roots: Vec<usize> = kept.iter().map(|&c| uf_c.find(c)).collect();
    roots.sort();
    roots.dedup();
    let components = roots.len();

    let all: Vec<usize> = (0..nch).collect();
    let mut uf = UnionFind::new(t);
    let mut sig_first: HashMap<Vec<bool>, usize> = HashMap::new();
    for g in 0..t {
        let sig = lay.signature(g, &all);
        match sig_first.get(&sig) {
            Some(&h) => uf.union(g, h),
            None => {
                sig_first.insert(sig, g);
            }
        }
    }
    let boundary_cells = sig_first.len();
    for (b, strands) in lay.bands.iter().enumerate() {
        let nb = strands.len();
        if nb == 0 {
            continue;
        }
        let (oa, ob) = (lay.off[2 * b], lay.off[2 * b + 1]);
        for p in 0..nb - 1 {
            uf.union(oa + nb - 2 - p, ob + p);
        }
        uf.union((oa + t - 1) % t, ob + nb - 1);
    }
    let mut infinity_gap: Option<usize> = None;
    let mut gap_punct: Vec<Vec<usize>> = Vec::with_capacity(t);
    for g in 0..t {
        let ps = lay.gap_punctures(g);
        if ps.contains(&(lay.n + 1)) {
            match infinity_gap {
                Some(h) => uf.union(g, h),
                None => infinity_gap = Some(g),
            }
        }
        gap_punct.push(ps);
    }
    let mut class_id: HashMap<usize, usize> = HashMap::new();
    let mut punctures: Vec<Vec<usize>> = Vec::new();
    let mut gap_class = vec![0; t];
    for g in 0..t {
        let r = uf.find(g);
        let id = *class_id.entry(r).or_insert_with(|| {
            punctures.push(Vec::new());
            punctures.len() - 1
        });
        gap_class[g] = id;
        punctures[id].extend(gap_punct[g].iter().copied());
    }
    for p in &mut punctures {
        p.sort();
        p.dedup();
    }
    let interior = (1 + nch + total_x).checked_sub(boundary_cells).ok_or_else(|| {
        Error::RealizationFailed("vertex disk has fewer cells than boundary gaps".into())
    })?;
    let counted: usize = punctures.iter().map(Vec::len).sum();
    if t > 0 && counted != lay.n + 1 {
        return Err(Error::RealizationFailed(format!("regions hold {counted} punctures, expected {}", lay.n + 1)));
    }
    let expected = total_x + 1 + components;
    if t > 0 && punctures.len() + interior != expected {
        return Err(Error::RealizationFailed(format!(
            "{} regions but the Euler count predicts {expected}",
            punctures.len() + interior
        )));
    }
    Ok(Analysis { regions: Regions { punctures, interior, components, crossings }, gap_class })
}

struct Realization {
    n: usize,
    words: Vec<Word>,
    order: Vec<Vec<(usize, usize)>>,
}

impl Realization {
    fn new(curves: &[Curve], cap: usize) -> Result<Realization> {
        let Some(first) = curves.first() else {
            return invalid("empty curve list");
        };
        let surface = first.surface();
        let n = surface.n();
        let mut ws = Vec::with_capacity(curves.len());
        for c in curves {
            if c.surface() != surface {
                return Err(Error::SurfaceMismatch(surface.punctures, c.surface().punctures));
            }
            let w = c.word(cap)?;
            if !words::is_primitive(&w) {
                return Err(Error::NotSimple(words::format_word(&w)));
            }
            ws.push(w);
        }
        let mut order: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (c, w) in ws.iter().enumerate() {
            for (j, l) in w.iter().enumerate() {
                order[l.unsigned_abs() as usize - 1].push((c, j));
            }
        }
        for band in &mut order {
            band.sort_by(|&s, &t| compare_strands(&ws, s, t, n));
        }
        let r = Realization { n, words: ws, order };
        let lay = r.layout(&vec![true; curves.len()]);
        let a = analyze(&lay, curves.len(), &vec![true; curves.len()])?;
        for (i, x) in curves.iter().enumerate() {
            if a.regions.crossings[i][i] != 0 {
                return Err(Error::RealizationFailed(format!("curve {i} crosses itself")));
            }
            for (j, y) in curves.iter().enumerate().skip(i + 1) {
                let want = intersection(x, y)?;
                if BigInt::from(a.regions.crossings[i][j]) != want {
                    return Err(Error::RealizationFailed(format!(
                        "curves {i},{j}: {} crossings drawn, intersection number {want}",
                        a.regions.crossings[i][j]
                    )));
                }
            }
        }
        Ok(r)
    }

    fn layout(&self, keep: &[bool]) -> Layout {
        Layout::new(&self.words, self.n, &self.order, keep)
    }
}

/// Complementary regions of the union of the curves, realized in minimal position.
pub fn regions(curves: &[Curve]) -> Result<Regions> {
    let r = Realization::new(curves, WORD_CAP)?;
    let keep = vec![true; curves.len()];
    Ok(analyze(&r.layout(&keep), curves.len(), &keep)?.regions)
}

/// True iff every complementary region of the union is a disk with at most one puncture.
pub fn fills(curves: &[Curve]) -> Result<bool> {
    Ok(regions(curves)?.fills())
}

/// Punctures on the side of `c` containing the disk punctures in its base interval.
pub fn enclosed_punctures(c: &Curve) -> Vec<usize> {
    let n = c.surface().n();
    let f = c.frame();
    let mut perm: Vec<usize> = (0..=n + 1).collect();
    for l in f.letters.iter().rev() {
        if let Letter::Half { i, .. } = l {
            // a half-twist swaps the punctures at positions i and i+1
            for p in perm.iter_mut() {
                if *p == *i {
                    *p = i + 1;
                } else if *p == i + 1 {
                    *p = *i;
                }
            }
        }
    }
    let mut out: Vec<usize> = (f.base.a..=f.base.b).map(|p| perm[p]).collect();
    out.sort();
    out
}

fn same_partition(side: &[usize], q: &[usize], total: usize) -> bool {
    if side == q {
        return true;
    }
    let comp: Vec<usize> = (1..=total).filter(|p| !side.contains(p)).collect();
    comp == q
}

/// True iff the curves fill the complementary component of `boundary` that
/// contains them: the union is connected and every region holding two or more
/// punctures is cut off by a boundary curve disjoint from the family.
pub fn fills_within(curves: &[Curve], boundary: &[Curve]) -> Result<bool> {
    let reg = regions(curves)?;
    if reg.components != 1 {
        return Ok(false);
    }
    let total = curves[0].surface().punctures;
    for q in &reg.punctures {
        if q.len() < 2 {
            continue;
        }
        if total - q.len() < 2 {
            return Ok(false);
        }
        let mut found = false;
        for g in boundary {
            if !same_partition(&enclosed_punctures(g), q, total) {
                continue;
            }
            let mut disjoint = true;
            for c in curves {
                if !intersection(g, c)?.is_zero() {
                    disjoint = false;
                    break;
                }
            }
            if disjoint {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Arcs of a curve cut by a base family, counted per complementary region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcCount {
    /// Arc count per region of the base family that the curve meets.
    pub per_region: Vec<usize>,
    pub max: usize,
}

type Pt = (BigRational, BigRational);

fn cross(o: &Pt, a: &Pt, b: &Pt) -> BigRational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Counts the arcs of `extra` in each complementary region of `base`, using an
/// exact straight-line drawing of the vertex disk with slots on a parabola.
pub fn arcs_per_region(base: &[Curve], extra: &Curve) -> Result<ArcCount> {
    let mut all = base.to_vec();
    all.push(extra.clone());
    let r = Realization::new(&all, WORD_CAP)?;
    let nb = base.len();
    let keep_all = vec![true; nb + 1];
    let mut keep_base = vec![true; nb + 1];
    keep_base[nb] = false;
    let full = r.layout(&keep_all);
    let sub = r.layout(&keep_base);
    let an = analyze(&sub, nb + 1, &keep_base)?;

    // identify each slot by its strand so base gaps can be looked up in the full drawing
    let owner_full = slot_owners(&full);
    let owner_sub = slot_owners(&sub);
    let sub_index: HashMap<(usize, usize, bool), usize> =
        owner_sub.iter().enumerate().map(|(i, o)| (*o, i)).collect();

    for attempt in 0..8u64 {
        let pts: Vec<Pt> = (0..full.total)
            .map(|s| {
                let x = BigInt::from(s as u64 * (full.total as u64 + 1 + attempt) + (s as u64 * s as u64) * attempt);
                let xr = BigRational::from_integer(x);
                let y = &xr * &xr;
                (xr, y)
            })
            .collect();
        let base_chords: Vec<usize> = (0..full.chords.len()).filter(|&c| full.chords[c].2 < nb).collect();
        let side = |p: &Pt| -> Vec<bool> {
            base_chords
                .iter()
                .map(|&c| {
                    let (u, v) = ordered(full.chords[c].0, full.chords[c].1);
                    cross(&pts[u], &pts[v], p).is_negative()
                })
                .collect()
        };
        // region of each base-boundary gap, keyed by its geometric signature
        let mut sig_region: HashMap<Vec<bool>, usize> = HashMap::new();
        for s in 0..full.total {
            let o = owner_full[s];
            if o.0 == nb {
                continue;
            }
            let s2 = (s + 1) % full.total;
            let mid = ((&pts[s].0 + &pts[s2].0) / BigInt::from(2), (&pts[s].1 + &pts[s2].1) / BigInt::from(2));
            let g = sub_index[&o];
            sig_region.insert(side(&mid), an.gap_class[g]);
        }
        let mut next_interior = an.regions.punctures.len();
        let mut interior: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut degenerate = false;
        // pieces of the extra curve in traversal order, with a flag marking a crossing before each
        let mut pieces: Vec<(bool, usize)> = Vec::new();
        for &ch in &full.curve_chords[nb] {
            let (pa, pb, _) = full.chords[ch];
            let (pp, qq) = (&pts[pa], &pts[pb]);
            let d = (&qq.0 - &pp.0, &qq.1 - &pp.1);
            let mut ts: Vec<BigRational> = Vec::new();
            for &bc in &base_chords {
                if !full.crosses(ch, bc) {
                    continue;
                }
                let (u, v) = (&pts[full.chords[bc].0], &pts[full.chords[bc].1]);
                let e = (&v.0 - &u.0, &v.1 - &u.1);
                let den = &d.0 * &e.1 - &d.1 * &e.0;
                let num = (&u.0 - &pp.0) * &e.1 - (&u.1 - &pp.1) * &e.0;
                ts.push(num / den);
            }
            ts.sort();
            if ts.windows(2).any(|w| w[0] == w[1]) {
                degenerate = true;
                break;
            }
            let mut bounds = vec![BigRational::zero()];
            bounds.extend(ts.iter().cloned());
            bounds.push(BigRational::from_integer(BigInt::from(1)));
            for (k, w) in bounds.windows(2).enumerate() {
                let tm = (&w[0] + &w[1]) / BigInt::from(2);
                let m = (&pp.0 + &d.0 * &tm, &pp.1 + &d.1 * &tm);
                let sig = side(&m);
                let reg = match sig_region.get(&sig) {
                    Some(&r) => r,
                    None => *interior.entry(sig).or_insert_with(|| {
                        next_interior += 1;
                        next_interior - 1
                    }),
                };
                pieces.push((k > 0, reg));
            }
        }
        if degenerate {
            continue;
        }
        let mut counts: HashMap<usize, usize> = HashMap::new();
        let start = pieces.iter().position(|p| p.0);
        match start {
            None => {
                let r0 = pieces[0].1;
                if pieces.iter().any(|p| p.1 != r0) {
                    return Err(Error::RealizationFailed("arc changes region without crossing".into()));
                }
                counts.insert(r0, 1);
            }
            Some(s0) => {
                let l = pieces.len();
                let mut cur = pieces[s0].1;
                for k in 1..=l {
                    let p = pieces[(s0 + k) % l];
                    if k == l || p.0 {
                        *counts.entry(cur).or_default() += 1;
                        cur = p.1;
                    } else if p.1 != cur {
                        return Err(Error::RealizationFailed("arc changes region without crossing".into()));
                    }
                }
            }
        }
        let mut per_region: Vec<usize> = counts.into_values().collect();
        per_region.sort_unstable_by(|a, b| b.cmp(a));
        let max = per_region.first().copied().unwrap_or(0);
        return Ok(ArcCount { per_region, max });
    }
    Err(Error::RealizationFailed("could not find a generic straight-line drawing".into()))
}

/// `(curve, strand, at A end)` for every slot of a layout.
fn slot_owners(lay: &Layout) -> Vec<(usize, usize, bool)> {
    let mut out = vec![(0, 0, false); lay.total];
    for (b, strands) in lay.bands.iter().enumerate() {
        let nb = strands.len();
        for (p, s) in strands.iter().enumerate() {
            out[lay.off[2 * b] + nb - 1 - p] = (s.0, s.1, true);
            out[lay.off[2 * b + 1] + p] = (s.0, s.1, false);
        }
    }
    out
}

/// Total crossings of a layout as a plain count, for diagnostics.
pub fn crossing_total(curves: &[Curve]) -> Result<u64> {
    let reg = regions(curves)?;
    let mut s = 0u64;
    for i in 0..reg.crossings.len() {
        for j in i..reg.crossings.len() {
            s += reg.crossings[i][j] as u64;
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{Generator, Interval, Surface, PENTAGON};

    fn pent(j: usize) -> Curve {
        let (a, b) = PENTAGON[j];
        Curve::round(Surface::s05(), Interval { a, b }).unwrap()
    }

    #[test]
    fn itinerary_reads_backwards_for_inverse_letters() {
        let w = vec![1, -2, 3];
        assert_eq!(itinerary(&w, 0, 1), -2);
        assert_eq!(itinerary(&w, 1, 0), 2);
        assert_eq!(itinerary(&w, 1, 1), -1);
        assert_eq!(itinerary(&w, 1, 2), -3);
        assert_eq!(itinerary(&w, 1, 3), 2);
        assert_eq!(itinerary(&w, 1, -1), -3);
        assert_eq!(itinerary(&w, 0, -1), 3);
    }

    #[test]
    fn single_curve_regions() {
        let r = regions(&[pent(0)]).unwrap();
        assert_eq!(r.count(), 2);
        assert_eq!(r.components, 1);
        assert!(!r.fills());
        let mut ps = r.punctures.clone();
        ps.sort();
        assert_eq!(ps, vec![vec![1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn pants_decomposition_does_not_fill() {
        assert!(!fills(&[pent(0), pent(1)]).unwrap());
        let r = regions(&[pent(0), pent(1)]).unwrap();
        assert_eq!(r.components, 2);
        assert_eq!(r.count(), 3);
    }

    #[test]
    fn four_pentagon_curves_fill() {
        assert!(fills(&[pent(0), pent(1), pent(2), pent(3)]).unwrap());
        assert!(!fills(&[pent(0), pent(2)]).unwrap());
    }

    #[test]
    fn twisted_family_realizes() {
        let s = Surface::sphere(6).unwrap();
        let a = Curve::round(s, Interval { a: 2, b: 4 }).unwrap();
        let b = Generator::half(4, false).apply(&Curve::round(s, Interval { a: 1, b: 2 }).unwrap()).unwrap();
        let c = a.twist(3).apply(&b).unwrap();
        let r = regions(&[a, b, c]).unwrap();
        assert_eq!(r.components, 1);
    }

    #[test]
    fn enclosed_sets() {
        let c = Generator::half(2, false).apply(&pent(0)).unwrap();
        assert_eq!(enclosed_punctures(&c), vec![1, 3]);
    }

    #[test]
    fn arcs_in_pentagon_regions() {
        let a = arcs_per_region(&[pent(0), pent(1)], &pent(3)).unwrap();
        assert_eq!(a.per_region, vec![2, 1, 1]);
        assert_eq!(a.max, 2);
    }
}
