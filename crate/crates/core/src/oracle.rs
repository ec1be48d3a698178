//! Exhaustive reference solvers.
//!
//! An optimal rectangle for a monotone score can be shrunk to the bounding
//! box of the points it encloses, so it suffices to enumerate rectangles
//! whose edges lie on input coordinates.

use crate::error::Result;
use crate::error::invalid;
use crate::geom::{check_k, check_points, order_by_x, order_by_y, offer, ranks_of, Best, Point, Rect, ScoreKind, Solution, WeightedPoint};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    None,
    /// Bottom edge on the x-axis; points below the axis are ignored.
    BottomOnXAxis,
}

struct Grid<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    /// Points bucketed by distinct x, each entry the y-bucket of a point.
    columns: Vec<Vec<usize>>,
}

fn distinct_sorted<T: Scalar>(mut v: Vec<T>) -> Vec<T> {
    v.sort_by(|a, b| a.total_cmp(*b));
    v.dedup_by(|a, b| a == b);
    v
}

fn bucket<T: Scalar>(sorted: &[T], v: T) -> usize {
    sorted.partition_point(|&s| s < v)
}

fn grid<T: Scalar>(points: &[Point<T>]) -> Grid<T> {
    let xs = distinct_sorted(points.iter().map(|p| p.x).collect());
    let ys = distinct_sorted(points.iter().map(|p| p.y).collect());
    let mut columns = vec![Vec::new(); xs.len()];
    for p in points {
        columns[bucket(&xs, p.x)].push(bucket(&ys, p.y));
    }
    Grid { xs, ys, columns }
}

/// Calls `visit(rect, count)` for every candidate rectangle, i.e. every
/// choice of x-range and y-range over input coordinates (y_lo pinned to 0
/// under [`Constraint::BottomOnXAxis`]). Within a fixed x-range and y_lo the
/// visit stops as soon as `visit` returns `false`.
fn enumerate<T: Scalar>(
    points: &[Point<T>],
    constraint: Constraint,
    mut visit: impl FnMut(Rect<T>, usize) -> bool,
) {
    let kept: Vec<Point<T>> = match constraint {
        Constraint::None => points.to_vec(),
        Constraint::BottomOnXAxis => points.iter().copied().filter(|p| p.y >= T::zero()).collect(),
    };
    if kept.is_empty() {
        return;
    }
    let g = grid(&kept);
    let ny = g.ys.len();
    let mut cnt = vec![0usize; ny];
    for a in 0..g.xs.len() {
        cnt.iter_mut().for_each(|c| *c = 0);
        for b in a..g.xs.len() {
            for &yb in &g.columns[b] {
                cnt[yb] += 1;
            }
            match constraint {
                Constraint::None => {
                    for c in 0..ny {
                        let mut s = 0;
                        for d in c..ny {
                            s += cnt[d];
                            let r = Rect::new(g.xs[a], g.ys[c], g.xs[b], g.ys[d]);
                            if !visit(r, s) {
                                break;
                            }
                        }
                    }
                }
                Constraint::BottomOnXAxis => {
                    let mut s = 0;
                    for d in 0..ny {
                        s += cnt[d];
                        let r = Rect::new(g.xs[a], T::zero(), g.xs[b], g.ys[d]);
                        if !visit(r, s) {
                            break;
                        }
                    }
                }
            }
        }
    }
}

/// Minimum-score rectangle enclosing at least `k` points, ties broken by
/// `(score, x_lo, y_lo, x_hi, y_hi)`.
pub fn brute_force_opt<T: Scalar>(
    points: &[Point<T>],
    k: usize,
    kind: ScoreKind,
    constraint: Constraint,
) -> Result<Solution<T>> {
    kind.require_geometric()?;
    check_points(points)?;
    let avail = match constraint {
        Constraint::None => points.len(),
        Constraint::BottomOnXAxis => points.iter().filter(|p| p.y >= T::zero()).count(),
    };
    check_k(k, avail)?;
    let mut best: Option<Best<T>> = None;
    enumerate(points, constraint, |r, s| {
        if s >= k {
            offer(&mut best, kind.of_extent(r.width(), r.height()), r);
            false
        } else {
            true
        }
    });
    let b = best.expect("k <= available points");
    Ok(Solution::enclosing(b.rect, kind, points))
}

/// Optimal score and rectangle for every `k` in `1..=n` at once; entry
/// `k - 1` answers `k`.
pub fn brute_force_profile<T: Scalar>(
    points: &[Point<T>],
    kind: ScoreKind,
    constraint: Constraint,
) -> Result<Vec<(T, Rect<T>)>> {
    kind.require_geometric()?;
    check_points(points)?;
    let mut by_count: Vec<Option<Best<T>>> = (0..=points.len()).map(|_| None).collect();
    enumerate(points, constraint, |r, s| {
        offer(&mut by_count[s], kind.of_extent(r.width(), r.height()), r);
        true
    });
    let mut out = Vec::new();
    let mut run: Option<Best<T>> = None;
    for c in (1..by_count.len()).rev() {
        if let Some(b) = by_count[c].take() {
            offer(&mut run, b.score, b.rect);
        }
        if let Some(b) = &run {
            out.push((b.score, b.rect));
        }
    }
    out.reverse();
    Ok(out)
}

/// Calls `visit` with the members of every exactly-`k` rank box, i.e. every
/// set of `k` points consecutive in `(y, index)` order among the points of
/// an `(x, index)` rank range. Sets may repeat.
pub fn for_each_rank_box<T: Scalar>(points: &[Point<T>], k: usize, mut visit: impl FnMut(&[usize])) {
    let n = points.len();
    if k == 0 || k > n {
        return;
    }
    let ox = order_by_x(points);
    let yr = ranks_of(&order_by_y(points));
    let mut col: Vec<usize> = Vec::with_capacity(n);
    for a in 0..n {
        col.clear();
        for &i in &ox[a..] {
            let at = col.partition_point(|&j| yr[j] < yr[i]);
            col.insert(at, i);
            for w in col.windows(k) {
                visit(w);
            }
        }
    }
}

fn weighted_parts<T: Scalar>(points: &[WeightedPoint<T>], k: usize) -> Result<Vec<Point<T>>> {
    let pts: Vec<Point<T>> = points.iter().map(|p| p.point).collect();
    check_points(&pts)?;
    check_k(k, pts.len())?;
    Ok(pts)
}

/// Minimum total weight over rectangles enclosing exactly `k` points.
pub fn brute_force_min_weight<T: Scalar>(points: &[WeightedPoint<T>], k: usize) -> Result<T> {
    let pts = weighted_parts(points, k)?;
    let mut best: Option<T> = None;
    for_each_rank_box(&pts, k, |set| {
        let w = set.iter().fold(T::zero(), |s, &i| s + points[i].weight);
        if best.map_or(true, |b| w < b) {
            best = Some(w);
        }
    });
    Ok(best.expect("k <= n"))
}

/// Minimum `|weight - target|` over rectangles enclosing exactly `k` points.
pub fn brute_force_subset_sum<T: Scalar>(points: &[WeightedPoint<T>], k: usize, target: T) -> Result<T> {
    let pts = weighted_parts(points, k)?;
    let mut best: Option<T> = None;
    for_each_rank_box(&pts, k, |set| {
        let w = set.iter().fold(T::zero(), |s, &i| s + points[i].weight);
        let d = (w - target).abs_value();
        if best.map_or(true, |b| d < b) {
            best = Some(d);
        }
    });
    Ok(best.expect("k <= n"))
}

/// Whether some rectangle encloses exactly `counts[c]` points of each color `c`.
pub fn brute_force_colored<T: Scalar>(points: &[WeightedPoint<T>], counts: &[usize]) -> Result<bool> {
    let k: usize = counts.iter().sum();
    let pts = weighted_parts(points, k)?;
    let mut color = Vec::with_capacity(points.len());
    for p in points {
        match p.color {
            Some(c) if c < counts.len() => color.push(c),
            _ => return invalid("every point needs a color below the number of counts"),
        }
    }
    let mut found = false;
    let mut census = vec![0usize; counts.len()];
    for_each_rank_box(&pts, k, |set| {
        if found {
            return;
        }
        census.iter_mut().for_each(|c| *c = 0);
        for &i in set {
            census[color[i]] += 1;
        }
        found = census == counts;
    });
    Ok(found)
}

/// Smallest and largest number of red points (color 0) over rectangles
/// enclosing exactly `k` points.
pub fn brute_force_red_range<T: Scalar>(points: &[WeightedPoint<T>], k: usize) -> Result<(usize, usize)> {
    let pts = weighted_parts(points, k)?;
    let (mut lo, mut hi) = (usize::MAX, 0);
    for_each_rank_box(&pts, k, |set| {
        let r = set.iter().filter(|&&i| points[i].color == Some(0)).count();
        lo = lo.min(r);
        hi = hi.max(r);
    });
    Ok((lo, hi))
}
