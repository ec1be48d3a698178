//! Exact solvers built on [`DiagStructure`].
//!
//! Points are ranked by `(y, index)` and `(x, index)`. A pair of horizontal
//! slabs `(σ, τ)` of y-ranks, with `σ` above `τ` or equal to it, owns a
//! structure over the points whose y-rank lies between the bottom of `τ` and
//! the top of `σ`, with the points of `σ ∪ τ` marked. Halving both slabs and
//! preparing each child by deleting and unmarking points gives the
//! recurrence `T(q) = 4 T(q/2) + O(q²)`; at single-point slabs one query
//! yields the best rectangle with that top and bottom point.

use std::cmp::Ordering;

use crate::cover::solve_3sided_k_sensitive;
use crate::diag1d::DiagStructure;
use crate::error::{infeasible, invalid, Error, Result};
use crate::geom::{
    check_k, check_points, offer, order_by_x, order_by_y, ranks_of, Best, OrientedRect, Point,
    Rect, ScoreKind, Solution, SolutionRect, WeightedPoint,
};
use crate::scalar::{Real, Scalar};

type Slab = (usize, usize);

pub(crate) struct Ranked<T> {
    /// Point index by y-rank.
    pub by_y: Vec<usize>,
    /// x-rank of each point.
    pub xpos: Vec<usize>,
    /// Point index by x-rank.
    pub by_x: Vec<usize>,
    /// x-coordinates in x-rank order.
    pub xs: Vec<T>,
    pub yrank: Vec<usize>,
}

impl<T: Scalar> Ranked<T> {
    pub fn new(points: &[Point<T>]) -> Self {
        let by_y = order_by_y(points);
        let by_x = order_by_x(points);
        Ranked {
            xpos: ranks_of(&by_x),
            yrank: ranks_of(&by_y),
            xs: by_x.iter().map(|&i| points[i].x).collect(),
            by_x,
            by_y,
        }
    }

    /// Points with x-rank in `lo..=hi` and y-rank in `bot..=top`.
    pub fn box_members(&self, lo: usize, hi: usize, bot: usize, top: usize) -> Vec<usize> {
        let mut w: Vec<usize> = self.by_x[lo..=hi]
            .iter()
            .copied()
            .filter(|&i| (bot..=top).contains(&self.yrank[i]))
            .collect();
        w.sort_unstable();
        w
    }
}

fn halves(s: Slab) -> Vec<Slab> {
    if s.1 - s.0 > 1 {
        let m = s.0 + (s.1 - s.0) / 2;
        vec![(s.0, m), (m, s.1)]
    } else {
        vec![s]
    }
}

fn prepare_child<T: Scalar>(
    ds: &mut [DiagStructure<T>],
    r: &Ranked<T>,
    sigma: Slab,
    tau: Slab,
    si: Slab,
    tj: Slab,
) -> Result<()> {
    let mut ranks: Vec<usize> = (sigma.0..sigma.1).collect();
    if tau != sigma {
        ranks.extend(tau.0..tau.1);
    }
    let inside = |x: usize, s: Slab| s.0 <= x && x < s.1;
    let mut doomed = Vec::new();
    for &y in &ranks {
        let pos = r.xpos[r.by_y[y]];
        if y >= si.1 || y < tj.0 {
            doomed.push(pos);
        } else if !inside(y, si) && !inside(y, tj) {
            for d in ds.iter_mut() {
                d.unmark(pos)?;
            }
        }
    }
    for pos in doomed {
        for d in ds.iter_mut() {
            d.delete_marked(pos)?;
        }
    }
    Ok(())
}

/// Runs the slab recursion from `(σ, τ)`. `leaf(top, bottom, ds)` is called
/// for every pair of single-point slabs with at least `k` points between.
pub(crate) fn slab_recursion<T: Scalar>(
    k: usize,
    r: &Ranked<T>,
    sigma: Slab,
    tau: Slab,
    mut ds: Vec<DiagStructure<T>>,
    leaf: &mut dyn FnMut(usize, usize, &[DiagStructure<T>]) -> Result<()>,
) -> Result<()> {
    if sigma.1 - tau.0 < k {
        return Ok(());
    }
    if sigma.1 - sigma.0 == 1 && tau.1 - tau.0 == 1 {
        return leaf(sigma.0, tau.0, &ds);
    }
    let mut children = Vec::with_capacity(4);
    if sigma == tau {
        let h = halves(sigma);
        // the (upper, lower) child keeps every mark, so it goes last and
        // takes the parent's structures without surgery
        children.push((h[0], h[0]));
        children.push((h[1], h[1]));
        children.push((h[1], h[0]));
    } else {
        for &si in &halves(sigma) {
            for &tj in &halves(tau) {
                children.push((si, tj));
            }
        }
    }
    children.retain(|&(si, tj)| si.1 - tj.0 >= k);
    let last = children.len();
    if last > 1 {
        for d in ds.iter_mut() {
            d.compact();
        }
    }
    for (t, (si, tj)) in children.into_iter().enumerate() {
        let mut child = if t + 1 == last { std::mem::take(&mut ds) } else { ds.clone() };
        prepare_child(&mut child, r, sigma, tau, si, tj)?;
        slab_recursion(k, r, si, tj, child, leaf)?;
    }
    Ok(())
}

/// Root structures over all points in x order, every point marked.
fn root_structures<T: Scalar>(
    r: &Ranked<T>,
    k: usize,
    weights: &[Option<Vec<T>>],
) -> Result<Vec<DiagStructure<T>>> {
    let n = r.xs.len();
    let all: Vec<usize> = (0..n).collect();
    weights
        .iter()
        .map(|w| DiagStructure::build(&r.xs, w.as_deref(), k, n, &all, false))
        .collect()
}

/// Minimum-score rectangle enclosing at least `k` points.
pub fn solve_exact<T: Scalar>(points: &[Point<T>], k: usize, kind: ScoreKind) -> Result<Solution<T>> {
    kind.require_geometric()?;
    check_points(points)?;
    check_k(k, points.len())?;
    let r = Ranked::new(points);
    let ds = root_structures(&r, k, &[None])?;
    let n = points.len();
    let mut best: Option<Best<T>> = None;
    slab_recursion(k, &r, (0, n), (0, n), ds, &mut |top, bot, ds| {
        let (w, (lo, hi)) = ds[0].query()?;
        let (yb, yt) = (points[r.by_y[bot]].y, points[r.by_y[top]].y);
        let rect = Rect::new(r.xs[lo], yb, r.xs[hi], yt);
        offer(&mut best, kind.of_extent(w, yt - yb), rect);
        Ok(())
    })?;
    let b = best.expect("k <= n");
    Ok(Solution::enclosing(b.rect, kind, points))
}

/// Leaf candidate for the exactly-k variants: a window of x-ranks between a
/// bottom and a top y-rank.
#[derive(Clone, Copy)]
struct Window<T> {
    key: T,
    rect: Rect<T>,
    lo: usize,
    hi: usize,
    bot: usize,
    top: usize,
}

fn window_better<T: Scalar>(a: &Window<T>, b: &Option<Window<T>>) -> bool {
    match b {
        None => true,
        Some(b) => match a.key.total_cmp(b.key) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => a.rect.lex_cmp(&b.rect) == Ordering::Less,
        },
    }
}

fn window_rect<T: Scalar>(points: &[Point<T>], r: &Ranked<T>, lo: usize, hi: usize, bot: usize, top: usize) -> Rect<T> {
    Rect::new(r.xs[lo], points[r.by_y[bot]].y, r.xs[hi], points[r.by_y[top]].y)
}

fn plain_points<T: Scalar>(points: &[WeightedPoint<T>]) -> Result<Vec<Point<T>>> {
    if points.iter().any(|p| !p.weight.is_finite_value()) {
        return invalid("weights must be finite");
    }
    let pts: Vec<Point<T>> = points.iter().map(|p| p.point).collect();
    check_points(&pts)?;
    Ok(pts)
}

/// Minimum over exactly-`k` rectangles of `sign * weight`, where the
/// weights are given per point. Returns the winning window.
fn min_window<T: Scalar>(pts: &[Point<T>], r: &Ranked<T>, k: usize, weight: &dyn Fn(usize) -> T) -> Result<Window<T>> {
    let wts: Vec<T> = r.by_x.iter().map(|&i| weight(i)).collect();
    let ds = root_structures(r, k, &[Some(wts)])?;
    let n = pts.len();
    let mut best: Option<Window<T>> = None;
    slab_recursion(k, r, (0, n), (0, n), ds, &mut |top, bot, ds| {
        let (w, (lo, hi)) = ds[0].query()?;
        let cand = Window { key: w, rect: window_rect(pts, r, lo, hi, bot, top), lo, hi, bot, top };
        if window_better(&cand, &best) {
            best = Some(cand);
        }
        Ok(())
    })?;
    Ok(best.expect("k <= n"))
}

/// Rectangle enclosing exactly `k` points with minimum total weight.
///
/// Points sharing a coordinate are ordered by index, so "exactly k" refers
/// to that perturbed order; the witness lists the `k` points counted.
pub fn solve_min_weight<T: Scalar>(points: &[WeightedPoint<T>], k: usize) -> Result<Solution<T>> {
    let pts = plain_points(points)?;
    check_k(k, pts.len())?;
    let r = Ranked::new(&pts);
    let w = min_window(&pts, &r, k, &|i| points[i].weight)?;
    let witness = r.box_members(w.lo, w.hi, w.bot, w.top);
    Ok(Solution {
        rect: SolutionRect::Axis(w.rect),
        kind: ScoreKind::Weight,
        count: witness.len(),
        score: w.key,
        weight: Some(w.key),
        witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RedBlueObjective {
    MinRed,
    MaxRed,
    ExactRed(usize),
}

fn is_red<T: Scalar>(p: &WeightedPoint<T>) -> Result<bool> {
    match p.color {
        Some(0) => Ok(true),
        Some(1) => Ok(false),
        _ => invalid("red/blue points need color 0 (red) or 1 (blue)"),
    }
}

/// Rectangle enclosing exactly `k` points, optimizing its number of red
/// points (color 0; color 1 is blue).
pub fn solve_red_blue<T: Scalar>(
    points: &[WeightedPoint<T>],
    k: usize,
    objective: RedBlueObjective,
) -> Result<Solution<T>> {
    let pts = plain_points(points)?;
    check_k(k, pts.len())?;
    let red: Vec<bool> = points.iter().map(is_red).collect::<Result<_>>()?;
    let r = Ranked::new(&pts);
    let unit = |b: bool| if b { T::one() } else { T::zero() };
    let (reds, w) = match objective {
        RedBlueObjective::MinRed => {
            let w = min_window(&pts, &r, k, &|i| unit(red[i]))?;
            (w.key, w)
        }
        RedBlueObjective::MaxRed => {
            let w = min_window(&pts, &r, k, &|i| -unit(red[i]))?;
            (-w.key, w)
        }
        RedBlueObjective::ExactRed(want) => exact_red(&pts, &r, &red, k, want)?,
    };
    let witness = r.box_members(w.lo, w.hi, w.bot, w.top);
    Ok(Solution {
        rect: SolutionRect::Axis(w.rect),
        kind: ScoreKind::Weight,
        count: witness.len(),
        score: reds,
        weight: Some(reds),
        witness,
    })
}

fn exact_red<T: Scalar>(
    pts: &[Point<T>],
    r: &Ranked<T>,
    red: &[bool],
    k: usize,
    want: usize,
) -> Result<(T, Window<T>)> {
    let n = pts.len();
    let plus: Vec<T> = r.by_x.iter().map(|&i| if red[i] { T::one() } else { T::zero() }).collect();
    let minus: Vec<T> = plus.iter().map(|&v| -v).collect();
    let ds = root_structures(r, k, &[Some(plus), Some(minus)])?;
    let count = |v: T| v.to_i64().unwrap_or(0).unsigned_abs() as usize;
    let (mut lo_all, mut hi_all) = (usize::MAX, 0usize);
    let mut found: Option<(usize, usize)> = None;
    slab_recursion(k, r, (0, n), (0, n), ds, &mut |top, bot, ds| {
        let lo = count(ds[0].query()?.0);
        let hi = count(ds[1].query()?.0);
        lo_all = lo_all.min(lo);
        hi_all = hi_all.max(hi);
        if lo <= want && want <= hi && found.map_or(true, |f| (bot, top) < f) {
            found = Some((bot, top));
        }
        Ok(())
    })?;
    let Some((bot, top)) = found else {
        return Err(Error::RedCountUnreachable { requested: want, min: lo_all, max: hi_all });
    };
    // window reds change by at most one per step, so a scan finds `want`
    let inside: Vec<usize> = (0..n).filter(|&p| (bot..=top).contains(&r.yrank[r.by_x[p]])).collect();
    let mut reds = 0;
    for t in 0..inside.len() {
        reds += red[r.by_x[inside[t]]] as usize;
        if t >= k {
            reds -= red[r.by_x[inside[t - k]]] as usize;
        }
        if t + 1 >= k && reds == want {
            let (lo, hi) = (inside[t + 1 - k], inside[t]);
            let rect = window_rect(pts, r, lo, hi, bot, top);
            let key = T::from_usize(want).expect("count fits the scalar");
            return Ok((key, Window { key, rect, lo, hi, bot, top }));
        }
    }
    unreachable!("a feasible slab pair has a window with the requested count")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlabConfig {
    /// Points per slab; `None` picks `⌈n^{1/3}⌉`.
    pub q: Option<usize>,
    /// Build run minima through chunked (min,+)-convolution.
    pub fast_build: bool,
}

impl Default for SlabConfig {
    fn default() -> Self {
        SlabConfig { q: None, fast_build: false }
    }
}

/// Minimum-score rectangle with its bottom edge on the x-axis enclosing at
/// least `k` points; points below the axis are ignored.
pub fn solve_3sided<T: Scalar>(
    points: &[Point<T>],
    k: usize,
    kind: ScoreKind,
    q_param: Option<usize>,
) -> Result<Solution<T>> {
    solve_3sided_with(points, k, kind, SlabConfig { q: q_param, ..SlabConfig::default() })
}

pub fn solve_3sided_with<T: Scalar>(
    points: &[Point<T>],
    k: usize,
    kind: ScoreKind,
    cfg: SlabConfig,
) -> Result<Solution<T>> {
    kind.require_geometric()?;
    check_points(points)?;
    if k == 0 {
        return invalid("k must be positive");
    }
    let kept: Vec<Point<T>> = points.iter().copied().filter(|p| p.y >= T::zero()).collect();
    let n = kept.len();
    if n < k {
        return infeasible(format!("only {n} points on or above the axis, k = {k}"));
    }
    let r = Ranked::new(&kept);
    let q = cfg.q.unwrap_or_else(|| (n as f64).cbrt().ceil() as usize).max(1);
    let mut best: Option<Best<T>> = None;
    let mut lo = 0;
    while lo < n {
        let hi = (lo + q).min(n);
        if hi >= k {
            // survivors: y-rank below hi, in x order
            let members: Vec<usize> = r.by_x.iter().copied().filter(|&i| r.yrank[i] < hi).collect();
            let xs: Vec<T> = members.iter().map(|&i| kept[i].x).collect();
            let mut local = vec![usize::MAX; n];
            for (p, &i) in members.iter().enumerate() {
                local[i] = p;
            }
            let marked: Vec<usize> = (lo..hi).map(|y| local[r.by_y[y]]).collect();
            let mut ds = DiagStructure::build(&xs, None, k, hi - lo, &marked, cfg.fast_build)?;
            for y in (lo..hi).rev() {
                if y + 1 < k {
                    break;
                }
                let (w, (a, b)) = ds.query()?;
                let top = kept[r.by_y[y]].y;
                offer(&mut best, kind.of_extent(w, top), Rect::new(xs[a], T::zero(), xs[b], top));
                ds.delete_marked(local[r.by_y[y]])?;
            }
        }
        lo = hi;
    }
    let b = best.expect("k <= points above the axis");
    Ok(Solution::enclosing(b.rect, kind, points))
}

/// Minimum-score rectangle of any orientation enclosing at least `k`
/// points. Some optimal rectangle has two input points on one edge, so each
/// ordered pair defines a frame in which a bottom-anchored solver applies.
pub fn solve_arbitrary<T: Real>(points: &[Point<T>], k: usize, kind: ScoreKind) -> Result<Solution<T>> {
    kind.require_geometric()?;
    check_points(points)?;
    let n = points.len();
    if n < 2 {
        return invalid("at least two points are required");
    }
    if k < 2 || k > n {
        return invalid(format!("k = {k} must lie in [2, {n}]"));
    }
    let axis = solve_exact(points, k, kind)?;
    let scale = points.iter().fold(T::one(), |m, p| m.max(p.x.abs()).max(p.y.abs()));
    let tol = scale * T::from_f64(1e-12).expect("f64 constant");
    let mut best = (axis.score, SolutionRect::Axis(*axis.axis_rect().expect("axis solution")));
    for i in 0..n {
        for j in 0..n {
            let (p, q) = (points[i], points[j]);
            if i == j || (p.x == q.x && p.y == q.y) {
                continue;
            }
            let angle = (q.y - p.y).atan2(q.x - p.x);
            let frame = OrientedRect { rect: Rect::point(Point::new(T::zero(), T::zero())), angle, frame_origin: p };
            let local: Vec<Point<T>> = points
                .iter()
                .map(|&u| {
                    let mut v = frame.to_frame(u);
                    if v.y.abs() <= tol {
                        v.y = T::zero();
                    }
                    v
                })
                .collect();
            if local.iter().filter(|v| v.y >= T::zero()).count() < k {
                continue;
            }
            let s = solve_3sided_k_sensitive(&local, k, kind)?;
            if s.score < best.0 {
                let rect = *s.axis_rect().expect("axis solution");
                best = (s.score, SolutionRect::Oriented(normalize_angle(OrientedRect { rect, angle, frame_origin: p })));
            }
        }
    }
    let (score, rect) = best;
    let witness: Vec<usize> = match &rect {
        SolutionRect::Axis(r) => r.enclosed_indices(points),
        SolutionRect::Oriented(o) => (0..n).filter(|&i| o.contains(&points[i], tol * T::from_f64(1e3).unwrap())).collect(),
    };
    Ok(Solution { rect, kind, count: witness.len(), score, weight: None, witness })
}

/// Brings the angle into `[0, π)`; a half turn negates frame coordinates.
fn normalize_angle<T: Real>(mut o: OrientedRect<T>) -> OrientedRect<T> {
    let pi = T::from_f64(std::f64::consts::PI).expect("f64 constant");
    while o.angle < T::zero() || o.angle >= pi {
        let r = o.rect;
        o.rect = Rect::new(-r.x_hi, -r.y_hi, -r.x_lo, -r.y_lo);
        o.angle = if o.angle < T::zero() { o.angle + pi } else { o.angle - pi };
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force_opt, Constraint};

    fn pts(v: &[(i64, i64)]) -> Vec<Point<i64>> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn exact_examples() {
        let p = pts(&[(0, 0), (1, 0), (5, 0), (0, 3)]);
        assert_eq!(solve_exact(&p, 2, ScoreKind::Perimeter).unwrap().score, 2);
        let p = pts(&[(0, 0), (2, 1), (1, 2), (4, 4)]);
        let s = solve_exact(&p, 3, ScoreKind::Area).unwrap();
        assert_eq!(s.score, 4);
        assert_eq!(s.count, 3);
        let s = solve_exact(&p, 4, ScoreKind::Area).unwrap();
        assert_eq!(s.axis_rect().unwrap(), &Rect::new(0, 0, 4, 4));
        assert!(solve_exact(&p, 5, ScoreKind::Area).is_err());
    }

    #[test]
    fn exact_matches_oracle_with_ties() {
        let p = pts(&[(0, 0), (0, 0), (1, 2), (1, 0), (2, 2), (0, 2), (3, 1), (1, 1)]);
        for kind in [ScoreKind::Area, ScoreKind::Perimeter] {
            for k in 1..=p.len() {
                let want = brute_force_opt(&p, k, kind, Constraint::None).unwrap().score;
                assert_eq!(solve_exact(&p, k, kind).unwrap().score, want, "k={k} {kind:?}");
            }
        }
    }

    #[test]
    fn three_sided_examples() {
        let p = pts(&[(1, 1), (2, 3), (3, 1)]);
        let s = solve_3sided(&p, 2, ScoreKind::Area, None).unwrap();
        assert_eq!(s.score, 2);
        assert_eq!(s.axis_rect().unwrap(), &Rect::new(1, 0, 3, 1));
        assert_eq!(solve_3sided(&p, 3, ScoreKind::Area, None).unwrap().score, 6);
        assert_eq!(solve_3sided(&p, 2, ScoreKind::Perimeter, None).unwrap().score, 6);
        let below = pts(&[(0, -1), (1, 1)]);
        assert!(matches!(solve_3sided(&below, 2, ScoreKind::Area, None), Err(Error::Infeasible(_))));
    }

    #[test]
    fn min_weight_examples() {
        let p = vec![
            WeightedPoint::new(0, 0, 5),
            WeightedPoint::new(1, 1, -2),
            WeightedPoint::new(2, 0, 1),
        ];
        let s = solve_min_weight(&p, 2).unwrap();
        assert_eq!(s.weight, Some(-1));
        assert_eq!(s.witness, vec![1, 2]);
        assert_eq!(solve_min_weight(&p, 3).unwrap().weight, Some(4));
    }

    fn line(colors: &[usize]) -> Vec<WeightedPoint<i64>> {
        colors.iter().enumerate().map(|(i, &c)| WeightedPoint::colored(i as i64, 0, c)).collect()
    }

    #[test]
    fn red_blue_examples() {
        let p = line(&[0, 1, 0, 1]);
        assert_eq!(solve_red_blue(&p, 2, RedBlueObjective::MinRed).unwrap().score, 1);
        assert_eq!(solve_red_blue(&p, 2, RedBlueObjective::MaxRed).unwrap().score, 1);
        let s = solve_red_blue(&p, 2, RedBlueObjective::ExactRed(1)).unwrap();
        assert_eq!(s.witness.len(), 2);
        assert_eq!(
            solve_red_blue(&p, 2, RedBlueObjective::ExactRed(2)),
            Err(Error::RedCountUnreachable { requested: 2, min: 1, max: 1 })
        );
    }

    #[test]
    fn arbitrary_examples() {
        let p = vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 5.0)];
        assert_eq!(solve_arbitrary(&p, 2, ScoreKind::Area).unwrap().score, 0.0);
        let sq = vec![Point::new(0.0f64, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 1.0)];
        let s = solve_arbitrary(&sq, 4, ScoreKind::Area).unwrap();
        assert!((s.score - 1.0).abs() < 1e-9);
        // a thin diagonal needle is much cheaper when rotated
        let d = vec![Point::new(0.0, 0.0), Point::new(10.0, 10.1), Point::new(5.0, 5.0)];
        let s = solve_arbitrary(&d, 3, ScoreKind::Area).unwrap();
        assert!(s.score < 1.0);
        assert_eq!(s.count, 3);
        if let SolutionRect::Oriented(o) = s.rect {
            assert!(o.angle >= 0.0 && o.angle < std::f64::consts::PI);
        }
    }
}
