//! (1+ε)-approximation of the smallest-area k-enclosing rectangle.
//!
//! Three layers: offline counting for laminar families of 3-sided
//! rectangles, an approximate decision procedure over canonical rectangles,
//! and a randomized optimizer that splits the plane into `b` columns and `b`
//! rows and scans column/row quadruples in random order.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::exact::solve_exact;
use crate::geom::{check_k, check_points, Point, Rect, ScoreKind, Solution};
use crate::scalar::Scalar;

/// Cell-size factor: the dyadic cell for an anchor at height `p_y` is the
/// smallest power of two above `CELL_FACTOR * A / p_y`.
pub const CELL_FACTOR: f64 = 6.0;

// ---------------------------------------------------------------------------
// laminar counting

/// Union-find over `0..n` whose sets are contiguous index ranges, kept in
/// left-to-right order. Each set carries a count.
#[derive(Debug, Clone)]
pub struct UnionFindList {
    parent: Vec<u32>,
    size: Vec<u32>,
    count: Vec<u64>,
    lo: Vec<u32>,
    hi: Vec<u32>,
}

impl UnionFindList {
    pub fn new(counts: Vec<u64>) -> Self {
        let n = counts.len();
        UnionFindList {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            count: counts,
            lo: (0..n as u32).collect(),
            hi: (0..n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] as usize != r {
            r = self.parent[r] as usize;
        }
        let mut c = x;
        while self.parent[c] as usize != r {
            let next = self.parent[c] as usize;
            self.parent[c] = r as u32;
            c = next;
        }
        r
    }

    /// Index range `(lo, hi)` of the set containing `x`.
    pub fn span(&mut self, x: usize) -> (usize, usize) {
        let r = self.find(x);
        (self.lo[r] as usize, self.hi[r] as usize)
    }

    pub fn count(&mut self, x: usize) -> u64 {
        let r = self.find(x);
        self.count[r]
    }

    pub fn decrement(&mut self, x: usize, by: u64) {
        let r = self.find(x);
        self.count[r] -= by;
    }

    /// Set immediately left of the set containing `x`.
    pub fn left_of(&mut self, x: usize) -> Option<usize> {
        let (lo, _) = self.span(x);
        (lo > 0).then(|| self.find(lo - 1))
    }

    /// Set immediately right of the set containing `x`.
    pub fn right_of(&mut self, x: usize) -> Option<usize> {
        let (_, hi) = self.span(x);
        (hi + 1 < self.len()).then(|| self.find(hi + 1))
    }

    /// Merges the sets containing `a` and `b`, which must be adjacent.
    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        debug_assert!(self.hi[ra] + 1 == self.lo[rb] || self.hi[rb] + 1 == self.lo[ra]);
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big as u32;
        self.size[big] += self.size[small];
        self.count[big] += self.count[small];
        self.lo[big] = self.lo[big].min(self.lo[small]);
        self.hi[big] = self.hi[big].max(self.hi[small]);
        big
    }
}

/// A 3-sided rectangle over an index universe: columns `lo..=hi`, rows
/// `0..=height`, with a designated column inside `lo..=hi`.
#[derive(Debug, Clone, Copy)]
struct IndexRect<H> {
    lo: usize,
    hi: usize,
    height: H,
    desig: usize,
}

/// Downward sweep. Points are `(column, y, weight)` with `y >= 0`. The
/// rectangles must form a laminar family.
fn laminar_core<H: Copy + PartialOrd>(nx: usize, rects: &[IndexRect<H>], pts: &[(usize, H, u64)]) -> Vec<u64> {
    let mut counts = vec![0u64; nx];
    for &(x, _, w) in pts {
        counts[x] += w;
    }
    let mut uf = UnionFindList::new(counts);
    let desc = |a: H, b: H| b.partial_cmp(&a).unwrap_or(std::cmp::Ordering::Equal);
    let mut ro: Vec<usize> = (0..rects.len()).collect();
    ro.sort_by(|&a, &b| desc(rects[a].height, rects[b].height));
    let mut po: Vec<usize> = (0..pts.len()).collect();
    po.sort_by(|&a, &b| desc(pts[a].1, pts[b].1));
    let mut out = vec![0u64; rects.len()];
    let mut next_pt = 0;
    for &ri in &ro {
        let r = rects[ri];
        while next_pt < po.len() && pts[po[next_pt]].1 > r.height {
            let (x, _, w) = pts[po[next_pt]];
            uf.decrement(x, w);
            next_pt += 1;
        }
        let mut cur = uf.find(r.desig);
        loop {
            let (lo, _) = uf.span(cur);
            if lo <= r.lo {
                break;
            }
            cur = uf.union(cur, lo - 1);
        }
        loop {
            let (_, hi) = uf.span(cur);
            if hi >= r.hi {
                break;
            }
            cur = uf.union(cur, hi + 1);
        }
        out[ri] = uf.count(cur);
    }
    out
}

/// 3-sided rectangles with bottoms on the x-axis, each with a designated
/// point on its top edge, plus the points to count.
#[derive(Debug, Clone)]
pub struct LaminarBatch<T> {
    rects: Vec<Rect<T>>,
    designated: Vec<Point<T>>,
    points: Vec<Point<T>>,
}

impl<T: Scalar> LaminarBatch<T> {
    /// Validates bottoms, designated points and pairwise laminarity.
    /// Identical x-intervals are accepted in either height order.
    pub fn new(rects: Vec<Rect<T>>, designated: Vec<Point<T>>, points: Vec<Point<T>>) -> Result<Self> {
        if rects.len() != designated.len() {
            return invalid("one designated point per rectangle is required");
        }
        check_points(&points)?;
        check_points(&designated)?;
        for (i, (r, d)) in rects.iter().zip(&designated).enumerate() {
            if r.y_lo != T::zero() || r.x_lo > r.x_hi || r.y_hi < T::zero() {
                return invalid(format!("rectangle {i} must have its bottom edge on the x-axis"));
            }
            if d.y != r.y_hi || d.x < r.x_lo || d.x > r.x_hi {
                return invalid(format!("designated point of rectangle {i} is not on its top edge"));
            }
        }
        let mut order: Vec<usize> = (0..rects.len()).collect();
        order.sort_by(|&a, &b| {
            let (ra, rb) = (&rects[a], &rects[b]);
            ra.x_lo.total_cmp(rb.x_lo).then(rb.x_hi.total_cmp(ra.x_hi)).then(ra.y_hi.total_cmp(rb.y_hi))
        });
        let mut stack: Vec<usize> = Vec::new();
        for &i in &order {
            let r = &rects[i];
            while stack.last().map_or(false, |&t| rects[t].x_hi < r.x_lo) {
                stack.pop();
            }
            if let Some(&t) = stack.last() {
                let o = &rects[t];
                let same = o.x_lo == r.x_lo && o.x_hi == r.x_hi;
                if r.x_hi > o.x_hi || (!same && r.y_hi <= o.y_hi) {
                    return Err(Error::NotLaminar { first: t.min(i), second: t.max(i) });
                }
            }
            stack.push(i);
        }
        Ok(LaminarBatch { rects, designated, points })
    }

    pub fn rects(&self) -> &[Rect<T>] {
        &self.rects
    }

    pub fn designated(&self) -> &[Point<T>] {
        &self.designated
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }
}

/// Number of points inside each rectangle of the batch.
pub fn laminar_count<T: Scalar>(batch: &LaminarBatch<T>) -> Vec<usize> {
    let mut xs: Vec<T> = batch.points.iter().chain(&batch.designated).map(|p| p.x).collect();
    xs.sort_by(|a, b| a.total_cmp(*b));
    xs.dedup();
    let col = |x: T| xs.partition_point(|&v| v < x);
    let rects: Vec<IndexRect<T>> = batch
        .rects
        .iter()
        .zip(&batch.designated)
        .map(|(r, d)| IndexRect {
            lo: col(r.x_lo),
            hi: xs.partition_point(|&v| v <= r.x_hi) - 1,
            height: r.y_hi,
            desig: col(d.x),
        })
        .collect();
    let pts: Vec<(usize, T, u64)> =
        batch.points.iter().filter(|p| p.y >= T::zero()).map(|p| (col(p.x), p.y, 1)).collect();
    laminar_core(xs.len(), &rects, &pts).into_iter().map(|c| c as usize).collect()
}

// ---------------------------------------------------------------------------
// canonical rectangles

/// Exponent `E` with `2^-E <= eps`, at least 1.
fn grid_exponent(eps: f64) -> u32 {
    let mut e = 1u32;
    while 0.5f64.powi(e as i32) > eps {
        e += 1;
    }
    e
}

/// Multiplicative slack of the decision procedure at resolution `eps`
/// (rounded down to a power of two): a canonical rectangle covering an
/// optimum of area at most `A` has area at most `(1 + slack) A`.
pub fn decision_slack(eps: f64) -> f64 {
    let e = 0.5f64.powi(grid_exponent(eps) as i32);
    (1.0 + e) * (1.0 + 8.0 * CELL_FACTOR * e) - 1.0
}

/// Dyadic level `i` whose cell length `2^-i` is the smallest power of two
/// greater than `CELL_FACTOR * area / py`.
fn dyadic_level(area: f64, py: f64) -> i32 {
    let l = CELL_FACTOR * area / py;
    let mut i = -(l.log2().floor() as i32) - 1;
    while 2f64.powi(-i) <= l {
        i -= 1;
    }
    while 2f64.powi(-(i + 1)) > l {
        i += 1;
    }
    i
}

#[derive(Debug, Clone, Copy)]
struct Grid {
    u: f64,
    s: f64,
}

impl Grid {
    fn new(i: i32, e: u32, s: f64) -> Self {
        Grid { u: 2f64.powi(-(i + e as i32)), s }
    }

    /// Index of the half-open grid cell containing `x`.
    fn cell(&self, x: f64) -> i64 {
        ((x - self.s) / self.u).floor() as i64
    }
}

/// A canonical rectangle anchored at a point `p` above the x-axis:
/// `[m/2^i + j u + s, m/2^i + j' u + s] × [-j'' ε p_y, p_y]` with
/// `u = 2^-(i+E)` and `ε = 2^-E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalRect {
    pub i: i32,
    pub m: i64,
    pub e: u32,
    pub j: u32,
    pub j_prime: u32,
    pub j_dprime: u32,
    pub shift: f64,
    pub anchor_y: f64,
    pub realized: Rect<f64>,
}

/// Every canonical rectangle for anchor `p` (with `p.y > 0` and x in
/// `[0, 1/3]`) at area threshold `area`, both shifts, no area pruning.
pub fn canonical_rects(p: Point<f64>, area: f64, eps: f64) -> Result<Vec<CanonicalRect>> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid("eps must lie in (0, 1)");
    }
    if !(p.y > 0.0) || !(area > 0.0) || !(0.0..=1.0 / 3.0).contains(&p.x) {
        return invalid("anchor must lie above the axis with x in [0, 1/3], and the area must be positive");
    }
    let e = grid_exponent(eps);
    let full = 1i64 << e;
    let ef = 0.5f64.powi(e as i32);
    let i = dyadic_level(area, p.y);
    let mut out = Vec::new();
    for s in [0.0, 1.0 / 3.0] {
        let g = Grid::new(i, e, s);
        let gp = g.cell(p.x);
        let m = gp.div_euclid(full);
        let jp = gp - m * full;
        for j in 0..=jp {
            for j1 in jp + 1..=full {
                for j2 in 0..=full {
                    let realized = Rect::new(
                        (m * full + j) as f64 * g.u + s,
                        -(j2 as f64) * ef * p.y,
                        (m * full + j1) as f64 * g.u + s,
                        p.y,
                    );
                    out.push(CanonicalRect {
                        i,
                        m,
                        e,
                        j: j as u32,
                        j_prime: j1 as u32,
                        j_dprime: j2 as u32,
                        shift: s,
                        anchor_y: p.y,
                        realized,
                    });
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// decision procedure

/// A point with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
struct WPt {
    x: f64,
    y: f64,
    w: u64,
}

fn merge_dups(mut v: Vec<WPt>) -> Vec<WPt> {
    v.sort_by(|a, b| a.x.total_cmp(b.x).then(a.y.total_cmp(b.y)));
    let mut out: Vec<WPt> = Vec::with_capacity(v.len());
    for p in v {
        match out.last_mut() {
            Some(q) if q.x == p.x && q.y == p.y => q.w += p.w,
            _ => out.push(p),
        }
    }
    out
}

fn area_of(r: &Rect<f64>) -> f64 {
    (r.x_hi - r.x_lo) * (r.y_hi - r.y_lo)
}

/// Zero-area rectangle with weight `>= k` if one exists: the shortest window
/// along any shared column, then any shared row.
fn zero_area(pts: &[WPt], k: u64) -> Option<Rect<f64>> {
    let mut best: Option<(f64, Rect<f64>)> = None;
    for transpose in [false, true] {
        let key = |p: &WPt| if transpose { (p.y, p.x) } else { (p.x, p.y) };
        let mut v: Vec<(f64, f64, u64)> = pts.iter().map(|p| (key(p).0, key(p).1, p.w)).collect();
        v.sort_by(|a, b| a.0.total_cmp(b.0).then(a.1.total_cmp(b.1)));
        let mut start = 0;
        while start < v.len() {
            let mut end = start;
            while end < v.len() && v[end].0 == v[start].0 {
                end += 1;
            }
            let line = &v[start..end];
            let (mut lo, mut acc) = (0, 0u64);
            for hi in 0..line.len() {
                acc += line[hi].2;
                while acc - line[lo].2 >= k {
                    acc -= line[lo].2;
                    lo += 1;
                }
                if acc >= k {
                    let len = line[hi].1 - line[lo].1;
                    let (a, b) = (line[0].0, (line[lo].1, line[hi].1));
                    let r = if transpose { Rect::new(b.0, a, b.1, a) } else { Rect::new(a, b.0, a, b.1) };
                    if best.map_or(true, |(l, br)| len < l || (len == l && r.lex_cmp(&br).is_lt())) {
                        best = Some((len, r));
                    }
                }
            }
            start = end;
        }
    }
    best.map(|b| b.1)
}

/// Outcome of the approximate decision procedure.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision<T> {
    /// A rectangle with at least `k` points and area at most
    /// `(1 + decision_slack(eps)) * A`.
    Found(Rect<T>),
    /// The smallest k-enclosing rectangle has area greater than `A`.
    CertifiedAbove,
}

/// Best canonical candidate found so far, in normalized coordinates.
#[derive(Debug, Clone, Copy)]
struct Cand {
    area: f64,
    grid: Grid,
    cell_lo: i64,
    cell_hi: i64,
    y_lo: f64,
    y_hi: f64,
}

struct DecideCtx {
    k: u64,
    e: u32,
    eps: f64,
    budget: f64,
    area: f64,
}

/// Smallest-area canonical rectangle with weight `>= k` and area within the
/// slack budget, realized as the bounding box of the points it contains.
/// Assumes the optimum is positive and `area > 0`.
fn decide_core(pts: &[WPt], k: u64, e: u32, area: f64) -> Option<(f64, Rect<f64>)> {
    let xmin = pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let xmax = pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let scale = 1.0 / (3.0 * (xmax - xmin));
    let norm: Vec<WPt> = pts.iter().map(|p| WPt { x: ((p.x - xmin) * scale).min(1.0 / 3.0), ..*p }).collect();
    let eps = 0.5f64.powi(e as i32);
    let an = area * scale * (1.0 + 1e-9);
    let ctx = DecideCtx { k, e, eps, budget: (1.0 + decision_slack(eps)) * an, area: an };
    let mut by_y: Vec<usize> = (0..norm.len()).collect();
    by_y.sort_by(|&a, &b| norm[a].y.total_cmp(norm[b].y));
    let mut best: Option<Cand> = None;
    let mut stack = vec![(0usize, by_y.len())];
    while let Some((lo, hi)) = stack.pop() {
        if hi - lo == 0 || total_weight_idx(&norm, &by_y[lo..hi]) < k {
            continue;
        }
        let mid = (lo + hi) / 2;
        let y0 = norm[by_y[mid]].y;
        let level: Vec<WPt> = by_y[lo..hi].iter().map(|&i| norm[i]).collect();
        for orient in [1.0, -1.0] {
            level_candidates(&ctx, &level, y0, orient, &mut best);
        }
        let a = lo + by_y[lo..hi].partition_point(|&i| norm[i].y < y0);
        let b = lo + by_y[lo..hi].partition_point(|&i| norm[i].y <= y0);
        stack.push((lo, a));
        stack.push((b, hi));
    }
    let c = best?;
    let inside: Vec<usize> = (0..norm.len())
        .filter(|&i| {
            let g = c.grid.cell(norm[i].x);
            g >= c.cell_lo && g < c.cell_hi && norm[i].y >= c.y_lo && norm[i].y <= c.y_hi
        })
        .collect();
    let rect = Rect::bounding(inside.iter().map(|&i| Point::new(pts[i].x, pts[i].y)).collect::<Vec<_>>().iter())?;
    debug_assert!(inside.iter().map(|&i| pts[i].w).sum::<u64>() >= k);
    Some((area_of(&rect), rect))
}

fn total_weight_idx(pts: &[WPt], idx: &[usize]) -> u64 {
    idx.iter().map(|&i| pts[i].w).sum()
}

type UpperKey = (u32, u32, u8, u32);
type LowerKey = (u32, u32, u32, u8, u32);

/// One canonical rectangle: its upper part and optional lower part, each an
/// entry in a laminar batch.
struct Pending {
    upper: (UpperKey, usize),
    lower: Option<(LowerKey, usize)>,
    cand: Cand,
}

/// Canonical rectangles crossing the line `y = y0` whose larger part lies on
/// the `orient` side, counted in laminar batches.
fn level_candidates(ctx: &DecideCtx, level: &[WPt], y0: f64, orient: f64, best: &mut Option<Cand>) {
    let pts: Vec<WPt> = level.iter().map(|p| WPt { y: orient * (p.y - y0), ..*p }).collect();
    let mut xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let col = |x: f64| xs.partition_point(|&v| v < x);
    let full = 1i64 << ctx.e;
    let tol = 1.0 + 1e-12;
    let mut upper: HashMap<UpperKey, Vec<IndexRect<f64>>> = HashMap::new();
    let mut lower: HashMap<LowerKey, Vec<IndexRect<f64>>> = HashMap::new();
    let mut pending: Vec<Pending> = Vec::new();
    for p in pts.iter().filter(|p| p.y > 0.0) {
        let py = p.y;
        let i = dyadic_level(ctx.area, py);
        let imod = i.rem_euclid(ctx.e as i32) as u32;
        let desig = col(p.x);
        for (si, s) in [0.0, 1.0 / 3.0].into_iter().enumerate() {
            let g = Grid::new(i, ctx.e, s);
            let gp = g.cell(p.x);
            let m = gp.div_euclid(full);
            let jp = gp - m * full;
            for j in (0..=jp).rev() {
                for j1 in jp + 1..=full {
                    let width = (j1 - j) as f64 * g.u;
                    if width * py > ctx.budget {
                        break;
                    }
                    let (cl, ch) = (m * full + j, m * full + j1);
                    let lo = xs.partition_point(|&v| g.cell(v) < cl);
                    let hi = xs.partition_point(|&v| g.cell(v) < ch) - 1;
                    let ukey = (j as u32, j1 as u32, si as u8, imod);
                    let ub = upper.entry(ukey).or_default();
                    ub.push(IndexRect { lo, hi, height: py, desig });
                    let uid = ub.len() - 1;
                    for j2 in 0..=full {
                        let depth = j2 as f64 * ctx.eps * py;
                        let a = width * (py + depth);
                        if a > ctx.budget {
                            break;
                        }
                        let lower_entry = (j2 > 0).then(|| {
                            let lkey = (j as u32, j1 as u32, j2 as u32, si as u8, imod);
                            let lb = lower.entry(lkey).or_default();
                            lb.push(IndexRect { lo, hi, height: depth * tol, desig });
                            (lkey, lb.len() - 1)
                        });
                        let (y_lo, y_hi) =
                            if orient > 0.0 { (y0 - depth * tol, y0 + py) } else { (y0 - py, y0 + depth * tol) };
                        pending.push(Pending {
                            upper: (ukey, uid),
                            lower: lower_entry,
                            cand: Cand { area: a, grid: g, cell_lo: cl, cell_hi: ch, y_lo, y_hi },
                        });
                    }
                }
            }
        }
    }
    if pending.is_empty() {
        return;
    }
    let above: Vec<(usize, f64, u64)> = pts.iter().filter(|p| p.y >= 0.0).map(|p| (col(p.x), p.y, p.w)).collect();
    let below: Vec<(usize, f64, u64)> = pts.iter().filter(|p| p.y < 0.0).map(|p| (col(p.x), -p.y, p.w)).collect();
    let up_counts: HashMap<UpperKey, Vec<u64>> =
        upper.iter().map(|(key, rs)| (*key, laminar_core(xs.len(), rs, &above))).collect();
    let low_counts: HashMap<LowerKey, Vec<u64>> =
        lower.iter().map(|(key, rs)| (*key, laminar_core(xs.len(), rs, &below))).collect();
    for pd in &pending {
        let mut c = up_counts[&pd.upper.0][pd.upper.1];
        if let Some((key, id)) = pd.lower {
            c += low_counts[&key][id];
        }
        if c >= ctx.k && best.map_or(true, |b| pd.cand.area < b.area) {
            *best = Some(pd.cand);
        }
    }
}

fn to_wpts<T: Scalar>(points: &[Point<T>]) -> Vec<WPt> {
    points
        .iter()
        .map(|p| WPt { x: p.x.to_f64().expect("finite"), y: p.y.to_f64().expect("finite"), w: 1 })
        .collect()
}

/// Tightest rectangle in the original coordinates around the points inside
/// `r` (given in `f64`).
fn tighten<T: Scalar>(points: &[Point<T>], r: &Rect<f64>) -> Rect<T> {
    let inside: Vec<&Point<T>> = points
        .iter()
        .filter(|p| {
            let (x, y) = (p.x.to_f64().unwrap(), p.y.to_f64().unwrap());
            x >= r.x_lo && x <= r.x_hi && y >= r.y_lo && y <= r.y_hi
        })
        .collect();
    Rect::bounding(inside.into_iter()).expect("rectangle encloses points")
}

/// Approximate decision at area threshold `area`: either a k-enclosing
/// rectangle of area at most `(1 + decision_slack(eps)) * area`, or a
/// certificate that every k-enclosing rectangle has area above `area`.
pub fn approx_decide<T: Scalar>(points: &[Point<T>], k: usize, eps: f64, area: f64) -> Result<Decision<T>> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid("eps must lie in (0, 1)");
    }
    if !(area >= 0.0) || !area.is_finite() {
        return invalid("area threshold must be finite and non-negative");
    }
    check_points(points)?;
    check_k(k, points.len())?;
    let pts = merge_dups(to_wpts(points));
    if let Some(r) = zero_area(&pts, k as u64) {
        return Ok(Decision::Found(tighten(points, &r)));
    }
    if area == 0.0 {
        return Ok(Decision::CertifiedAbove);
    }
    Ok(match decide_core(&pts, k as u64, grid_exponent(eps), area) {
        Some((_, r)) => Decision::Found(tighten(points, &r)),
        None => Decision::CertifiedAbove,
    })
}

// ---------------------------------------------------------------------------
// optimizer

#[derive(Debug, Clone)]
pub struct ApproxConfig {
    /// Number of columns and rows per level; inputs of at most `b` distinct
    /// points are solved exactly.
    pub b: usize,
    /// Resolution of the inner decision procedure; `None` means 1/2.
    pub decision_eps: Option<f64>,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig { b: 1000, decision_eps: None }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ApproxStats {
    /// Quadruple scans per recursion depth.
    pub scans: Vec<usize>,
    /// Recursive optimizer calls issued by the scans at each depth.
    pub recursive_calls: Vec<usize>,
    pub decisions: usize,
    pub exact_solves: usize,
}

impl ApproxStats {
    /// Mean number of recursive calls per scan at `depth`.
    pub fn mean_recursion(&self, depth: usize) -> f64 {
        match self.scans.get(depth) {
            Some(&s) if s > 0 => self.recursive_calls[depth] as f64 / s as f64,
            _ => 0.0,
        }
    }

    fn record(&mut self, depth: usize, recursions: usize) {
        if self.scans.len() <= depth {
            self.scans.resize(depth + 1, 0);
            self.recursive_calls.resize(depth + 1, 0);
        }
        self.scans[depth] += 1;
        self.recursive_calls[depth] += recursions;
    }
}

/// Rectangle with at least `k` points and area in `[opt, (1+eps)·opt]`.
/// Deterministic for a fixed `seed`.
pub fn approx_optimize<T: Scalar>(points: &[Point<T>], k: usize, eps: f64, seed: u64) -> Result<Solution<T>> {
    approx_optimize_with(points, k, eps, seed, &ApproxConfig::default()).map(|r| r.0)
}

pub fn approx_optimize_with<T: Scalar>(
    points: &[Point<T>],
    k: usize,
    eps: f64,
    seed: u64,
    cfg: &ApproxConfig,
) -> Result<(Solution<T>, ApproxStats)> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid("eps must lie in (0, 1)");
    }
    if cfg.b < 2 {
        return invalid("b must be at least 2");
    }
    let dec_eps = cfg.decision_eps.unwrap_or(0.5);
    if !(dec_eps > 0.0 && dec_eps < 1.0) {
        return invalid("decision eps must lie in (0, 1)");
    }
    check_points(points)?;
    check_k(k, points.len())?;
    let pts = merge_dups(to_wpts(points));
    let mut stats = ApproxStats::default();
    let rect = match zero_area(&pts, k as u64) {
        Some(r) => r,
        None => {
            let mut opt = Optimizer {
                eps1: (1.0 + eps * (1.0 - 1e-9)).sqrt() - 1.0,
                e: grid_exponent(dec_eps),
                b: cfg.b,
                rng: ChaCha8Rng::seed_from_u64(seed),
                stats: &mut stats,
            };
            opt.run(&pts, k as u64, 0).1
        }
    };
    Ok((Solution::enclosing(tighten(points, &rect), ScoreKind::Area, points), stats))
}

struct Optimizer<'a> {
    eps1: f64,
    e: u32,
    b: usize,
    rng: ChaCha8Rng,
    stats: &'a mut ApproxStats,
}

/// Weighted exact optimum: every pair of row bounds, then a two-pointer
/// sweep over x.
fn exact_weighted(pts: &[WPt], k: u64) -> Option<(f64, Rect<f64>)> {
    if pts.len() > 48 {
        let expanded: Vec<Point<f64>> =
            pts.iter().flat_map(|p| std::iter::repeat(Point::new(p.x, p.y)).take(p.w as usize)).collect();
        if (expanded.len() as u64) < k {
            return None;
        }
        let s = solve_exact(&expanded, k as usize, ScoreKind::Area).ok()?;
        return Some((s.score, *s.axis_rect().unwrap()));
    }
    let mut bx = pts.to_vec();
    bx.sort_by(|a, b| a.x.total_cmp(b.x));
    let mut ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let mut best: Option<(f64, Rect<f64>)> = None;
    for (bi, &yb) in ys.iter().enumerate() {
        for &yt in &ys[bi..] {
            let row: Vec<&WPt> = bx.iter().filter(|p| p.y >= yb && p.y <= yt).collect();
            let (mut lo, mut acc) = (0, 0u64);
            for hi in 0..row.len() {
                acc += row[hi].w;
                while acc - row[lo].w >= k {
                    acc -= row[lo].w;
                    lo += 1;
                }
                if acc >= k {
                    let r = Rect::new(row[lo].x, yb, row[hi].x, yt);
                    let a = area_of(&r);
                    if best.map_or(true, |(ba, br)| a < ba || (a == ba && r.lex_cmp(&br).is_lt())) {
                        best = Some((a, r));
                    }
                }
            }
        }
    }
    best
}

/// Contiguous groups of `per` consecutive ranks.
fn strips(order: &[usize], per: usize) -> Vec<usize> {
    let mut strip = vec![0; order.len()];
    for (r, &i) in order.iter().enumerate() {
        strip[i] = r / per;
    }
    strip
}

impl Optimizer<'_> {
    /// Returns `(A, R)` with `A <= opt < (1+eps) A` and `R` a k-enclosing
    /// rectangle of area below `(1+eps) A`, or of area exactly `A`.
    fn run(&mut self, pts: &[WPt], k: u64, depth: usize) -> (f64, Rect<f64>) {
        if pts.len() <= self.b {
            self.stats.exact_solves += 1;
            return exact_weighted(pts, k).expect("feasible subproblem");
        }
        let n = pts.len();
        let per = n.div_ceil(self.b);
        let mut ox: Vec<usize> = (0..n).collect();
        ox.sort_by(|&a, &b| pts[a].x.total_cmp(pts[b].x).then(pts[a].y.total_cmp(pts[b].y)));
        let mut oy: Vec<usize> = (0..n).collect();
        oy.sort_by(|&a, &b| pts[a].y.total_cmp(pts[b].y).then(pts[a].x.total_cmp(pts[b].x)));
        let (col, row) = (strips(&ox, per), strips(&oy, per));
        let nc = n.div_ceil(per);
        let mut cmin = vec![f64::INFINITY; nc];
        let mut cmax = vec![f64::NEG_INFINITY; nc];
        let mut rmin = vec![f64::INFINITY; nc];
        let mut rmax = vec![f64::NEG_INFINITY; nc];
        for (i, p) in pts.iter().enumerate() {
            cmin[col[i]] = cmin[col[i]].min(p.x);
            cmax[col[i]] = cmax[col[i]].max(p.x);
            rmin[row[i]] = rmin[row[i]].min(p.y);
            rmax[row[i]] = rmax[row[i]].max(p.y);
        }
        // prefix sums of weight over the column/row grid
        let mut pre = vec![vec![0u64; nc + 1]; nc + 1];
        for (i, p) in pts.iter().enumerate() {
            pre[col[i] + 1][row[i] + 1] += p.w;
        }
        for c in 1..=nc {
            for r in 1..=nc {
                pre[c][r] += pre[c - 1][r] + pre[c][r - 1] - pre[c - 1][r - 1];
            }
        }
        let block = |c0: usize, c1: usize, r0: usize, r1: usize| -> u64 {
            if c0 > c1 || r0 > r1 {
                return 0;
            }
            pre[c1 + 1][r1 + 1] + pre[c0][r0] - pre[c0][r1 + 1] - pre[c1 + 1][r0]
        };
        let mut quads = Vec::with_capacity((nc * (nc + 1) / 2).pow(2));
        for c0 in 0..nc {
            for c1 in c0..nc {
                for r0 in 0..nc {
                    for r1 in r0..nc {
                        quads.push((c0, c1, r0, r1));
                    }
                }
            }
        }
        quads.shuffle(&mut self.rng);
        let mut a = f64::INFINITY;
        let mut best_rect: Option<Rect<f64>> = None;
        let mut recursions = 0;
        for (c0, c1, r0, r1) in quads {
            let nondeg = c0 != c1 && r0 != r1;
            let inner = Rect::new(cmax[c0], rmax[r0], cmin[c1].max(cmax[c0]), rmin[r1].max(rmax[r0]));
            if nondeg && area_of(&inner) >= a {
                continue;
            }
            if block(c0, c1, r0, r1) < k {
                continue;
            }
            let iw = if nondeg { block(c0 + 1, c1 - 1, r0 + 1, r1 - 1) } else { 0 };
            if iw >= k {
                a = area_of(&inner);
                best_rect = Some(inner);
                continue;
            }
            let mut s = Vec::new();
            let mut sw = 0u64;
            for (i, p) in pts.iter().enumerate() {
                let (ci, ri) = (col[i], row[i]);
                if ci < c0 || ci > c1 || ri < r0 || ri > r1 {
                    continue;
                }
                if ci == c0 || ci == c1 || ri == r0 || ri == r1 {
                    s.push(*p);
                    sw += p.w;
                }
            }
            let (sub, kq) = if nondeg {
                let k1 = k - iw;
                let mult = sw - k1 + 1;
                s.push(WPt { x: inner.x_lo, y: inner.y_lo, w: mult });
                s.push(WPt { x: inner.x_hi, y: inner.y_hi, w: mult });
                (merge_dups(s), k1 + 2 * mult)
            } else {
                (merge_dups(s), k)
            };
            if sub.len() <= self.b || sub.len() >= n {
                self.stats.exact_solves += 1;
                if let Some((v, r)) = exact_weighted(&sub, kq) {
                    if v < a {
                        a = v;
                        best_rect = Some(r);
                    }
                }
                continue;
            }
            if a.is_finite() {
                self.stats.decisions += 1;
                let Some((f1, r1)) = decide_core(&sub, kq, self.e, a) else {
                    continue;
                };
                let lowered = a / (1.0 + self.eps1);
                if f1 < (1.0 + self.eps1) * a {
                    self.stats.decisions += 1;
                    if decide_core(&sub, kq, self.e, lowered).is_none() {
                        a = lowered;
                        best_rect = Some(r1);
                        continue;
                    }
                }
            }
            recursions += 1;
            let (ai, ri) = self.run(&sub, kq, depth + 1);
            if ai < a {
                a = ai;
                best_rect = Some(ri);
            }
        }
        self.stats.record(depth, recursions);
        (a, best_rect.expect("some quadruple holds an optimum"))
    }
}
