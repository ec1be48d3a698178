//! Shallow cuttings for bottom-anchored rectangles, folding across a
//! horizontal line, the recursive cover, and the solvers built on them.
//!
//! All constructions work on ranks: x-ranks by `(x, index)` and a sweep
//! order with index tie-breaks, so the guarantees hold with repeated
//! coordinates.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::exact::{solve_3sided, solve_exact};
use crate::geom::{check_k, check_points, order_by_x, order_by_y, ranks_of, Point, Rect, ScoreKind, Solution};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Points of the split interval and its two neighbours when the interval
    /// at local x-rank `x_rank` was split after `swept` points.
    Split { x_rank: usize, swept: usize },
    /// Points of two consecutive final intervals (or the only one).
    FinalPair,
    /// The whole point set of a small recursive call.
    Whole,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverFamily {
    /// Subsets of point indices, each sorted.
    pub subsets: Vec<Vec<usize>>,
    pub k: usize,
    pub provenance: Vec<Provenance>,
}

impl CoverFamily {
    fn new(k: usize) -> Self {
        CoverFamily { subsets: Vec::new(), k, provenance: Vec::new() }
    }

    fn push(&mut self, mut subset: Vec<usize>, tag: Provenance) {
        subset.sort_unstable();
        self.subsets.push(subset);
        self.provenance.push(tag);
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn max_subset(&self) -> usize {
        self.subsets.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True if some subset contains every index of `set`.
    pub fn covers(&self, set: &[usize]) -> bool {
        self.subsets.iter().any(|s| set.iter().all(|i| s.binary_search(i).is_ok()))
    }
}

/// Core sweep. `xrank[e]` are distinct ranks in `0..m` and `sweep` lists the
/// elements in sweep order; `label[e]` is what gets emitted.
fn sweep_cutting(xrank: &[usize], sweep: &[usize], label: &[usize], k: usize, out: &mut CoverFamily) {
    // interval start -> (end exclusive, x-ranks of swept points, sorted)
    let m = xrank.len();
    let mut by_rank = vec![usize::MAX; m];
    for (e, &r) in xrank.iter().enumerate() {
        by_rank[r] = e;
    }
    let mut intervals: BTreeMap<usize, (usize, Vec<usize>)> = BTreeMap::new();
    intervals.insert(0, (m, Vec::new()));
    let emit = |ranks: &[&Vec<usize>], tag: Provenance, out: &mut CoverFamily| {
        let subset: Vec<usize> = ranks.iter().flat_map(|v| v.iter().map(|&r| label[by_rank[r]])).collect();
        out.push(subset, tag);
    };
    for (t, &e) in sweep.iter().enumerate() {
        let r = xrank[e];
        let (&start, _) = intervals.range(..=r).next_back().expect("intervals cover all ranks");
        let pts = &mut intervals.get_mut(&start).expect("present").1;
        let at = pts.partition_point(|&v| v < r);
        pts.insert(at, r);
        if pts.len() == 2 * k {
            let left = intervals.range(..start).next_back().map(|(_, v)| &v.1);
            let right = intervals.range(start + 1..).next().map(|(_, v)| &v.1);
            let mid = &intervals[&start].1;
            let mut parts: Vec<&Vec<usize>> = vec![mid];
            parts.extend(left);
            parts.extend(right);
            let split = mid[k];
            emit(&parts, Provenance::Split { x_rank: split, swept: t + 1 }, out);
            let (end, pts) = intervals.remove(&start).expect("present");
            let (lo, hi) = pts.split_at(k);
            intervals.insert(start, (split, lo.to_vec()));
            intervals.insert(split, (end, hi.to_vec()));
        }
    }
    let finals: Vec<&Vec<usize>> = intervals.values().map(|v| &v.1).collect();
    if finals.len() == 1 {
        emit(&finals, Provenance::FinalPair, out);
    }
    for w in finals.windows(2) {
        emit(w, Provenance::FinalPair, out);
    }
}

/// Shallow cutting for rectangles whose bottom edge lies on the x-axis:
/// every such rectangle enclosing at most `k` points has its points inside
/// one subset. At most `2⌈n/k⌉` subsets, each of at most `6k` points.
pub fn build_3sided_cutting<T: Scalar>(points: &[Point<T>], k: usize) -> Result<CoverFamily> {
    check_points(points)?;
    if k < 1 {
        return invalid("k must be at least 1");
    }
    if points.iter().any(|p| p.y < T::zero()) {
        return invalid("cutting points must lie on or above the baseline");
    }
    let xrank = ranks_of(&order_by_x(points));
    let sweep = order_by_y(points);
    let label: Vec<usize> = (0..points.len()).collect();
    let mut fam = CoverFamily::new(k);
    sweep_cutting(&xrank, &sweep, &label, k, &mut fam);
    Ok(fam)
}

/// Folds `ids` (given in y-rank order) about the line between y-ranks
/// `h - 1` and `h` and emits a cutting with budget `2k`.
fn fold_into<T: Scalar>(points: &[Point<T>], ids: &[usize], h: usize, twice_line: T, k: usize, out: &mut CoverFamily) {
    let m = ids.len();
    let mut by_x: Vec<usize> = (0..m).collect();
    by_x.sort_by(|&a, &b| points[ids[a]].x.total_cmp(points[ids[b]].x).then(ids[a].cmp(&ids[b])));
    let xrank = ranks_of(&by_x);
    // distance to the line, then distance in ranks, then rank
    let key = |r: usize| {
        let d = (T::two() * points[ids[r]].y - twice_line).abs_value();
        (d, (2 * r as isize - 2 * h as isize + 1).unsigned_abs(), r)
    };
    let mut sweep: Vec<usize> = (0..m).collect();
    sweep.sort_by(|&a, &b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(kb.0).then(ka.1.cmp(&kb.1)).then(ka.2.cmp(&kb.2))
    });
    sweep_cutting(&xrank, &sweep, ids, 2 * k, out);
}

/// Cover for rectangles meeting the x-axis: the minimum-score rectangle
/// with `k` points that meets the axis has its points inside one subset.
/// Each subset holds at most `12k` points.
pub fn fold_family<T: Scalar>(points: &[Point<T>], k: usize) -> Result<CoverFamily> {
    check_points(points)?;
    if k < 1 {
        return invalid("k must be at least 1");
    }
    let ids = order_by_y(points);
    let h = ids.iter().filter(|&&i| points[i].y < T::zero()).count();
    let mut fam = CoverFamily::new(k);
    fold_into(points, &ids, h, T::zero(), k, &mut fam);
    Ok(fam)
}

/// Recursive cover: halve by y-rank, fold about the median line, recurse.
/// Calls with at most `12k` points contribute their whole point set.
pub fn cover_family<T: Scalar>(points: &[Point<T>], k: usize) -> Result<CoverFamily> {
    check_points(points)?;
    if k < 1 {
        return invalid("k must be at least 1");
    }
    let ids = order_by_y(points);
    let mut fam = CoverFamily::new(k);
    cover_rec(points, &ids, k, &mut fam);
    Ok(fam)
}

fn cover_rec<T: Scalar>(points: &[Point<T>], ids: &[usize], k: usize, out: &mut CoverFamily) {
    let m = ids.len();
    if m == 0 {
        return;
    }
    if m <= 12 * k {
        out.push(ids.to_vec(), Provenance::Whole);
        return;
    }
    let h = m / 2;
    let twice_line = points[ids[h - 1]].y + points[ids[h]].y;
    fold_into(points, ids, h, twice_line, k, out);
    cover_rec(points, &ids[..h], k, out);
    cover_rec(points, &ids[h..], k, out);
}

pub type BaseSolver<T> = dyn Fn(&[Point<T>], usize, ScoreKind) -> Result<Solution<T>>;

/// Runs `base` on every subset of the recursive cover holding at least `k`
/// points and keeps the best answer.
pub fn solve_k_sensitive<T: Scalar>(
    points: &[Point<T>],
    k: usize,
    kind: ScoreKind,
    base: &BaseSolver<T>,
) -> Result<Solution<T>> {
    kind.require_geometric()?;
    check_points(points)?;
    check_k(k, points.len())?;
    let fam = cover_family(points, k)?;
    best_over_family(points, k, kind, &fam, base)
}

fn best_over_family<T: Scalar>(
    points: &[Point<T>],
    k: usize,
    kind: ScoreKind,
    fam: &CoverFamily,
    base: &BaseSolver<T>,
) -> Result<Solution<T>> {
    let mut best: Option<Solution<T>> = None;
    for subset in fam.subsets.iter().filter(|s| s.len() >= k) {
        let local: Vec<Point<T>> = subset.iter().map(|&i| points[i]).collect();
        let s = base(&local, k, kind)?;
        let rect = *s.axis_rect().expect("axis-aligned base solver");
        if best.as_ref().map_or(true, |b| s.score < b.score || (s.score == b.score && rect.lex_cmp(b.axis_rect().unwrap()).is_lt())) {
            best = Some(Solution::enclosing(rect, kind, points));
        }
    }
    Ok(best.expect("some subset holds k points"))
}

/// Bottom-anchored solver on the subsets of the shallow cutting; points
/// below the axis are ignored.
pub fn solve_3sided_k_sensitive<T: Scalar>(points: &[Point<T>], k: usize, kind: ScoreKind) -> Result<Solution<T>> {
    kind.require_geometric()?;
    check_points(points)?;
    let kept: Vec<usize> = (0..points.len()).filter(|&i| points[i].y >= T::zero()).collect();
    let local: Vec<Point<T>> = kept.iter().map(|&i| points[i]).collect();
    if k == 0 || k > local.len() {
        return solve_3sided(points, k, kind, None);
    }
    let fam = build_3sided_cutting(&local, k)?;
    let s = best_over_family(&local, k, kind, &fam, &|p, k, kind| solve_3sided(p, k, kind, None))?;
    Ok(Solution::enclosing(*s.axis_rect().expect("axis"), kind, points))
}

/// Smallest rectangle enclosing all but at most `t` points.
///
/// Any such rectangle contains every point that is not among the `t + 1`
/// extreme points in some direction, so the remaining points are replaced
/// by `t + 1` copies of two opposite corners of their bounding box.
pub fn solve_with_outliers<T: Scalar>(points: &[Point<T>], t: usize, kind: ScoreKind) -> Result<Solution<T>> {
    kind.require_geometric()?;
    check_points(points)?;
    let n = points.len();
    if t >= n {
        return invalid(format!("t = {t} must be below n = {n}"));
    }
    let bx = order_by_x(points);
    let by = order_by_y(points);
    let c = (t + 1).min(n);
    let mut extreme = vec![false; n];
    for order in [&bx, &by] {
        for &i in order[..c].iter().chain(&order[n - c..]) {
            extreme[i] = true;
        }
    }
    let mut reduced: Vec<Point<T>> = (0..n).filter(|&i| extreme[i]).map(|i| points[i]).collect();
    let e = reduced.len();
    let rest: Vec<Point<T>> = (0..n).filter(|&i| !extreme[i]).map(|i| points[i]).collect();
    let k = match Rect::bounding(&rest) {
        Some(bb) => {
            for _ in 0..=t {
                reduced.push(Point::new(bb.x_lo, bb.y_lo));
                reduced.push(Point::new(bb.x_hi, bb.y_hi));
            }
            e + 2 * (t + 1) - t
        }
        None => e - t,
    };
    let s = solve_exact(&reduced, k, kind)?;
    Ok(Solution::enclosing(*s.axis_rect().expect("axis"), kind, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force_opt, Constraint};

    fn pts(v: &[(i64, i64)]) -> Vec<Point<i64>> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn cutting_bounds_and_small_cover() {
        let p: Vec<Point<i64>> = (0..12).map(|i| Point::new((i * 7) % 12, 1 + (i * 5) % 11)).collect();
        let f = build_3sided_cutting(&p, 3).unwrap();
        assert!(f.len() <= 8);
        assert!(f.max_subset() <= 18);

        let p = pts(&[(1, 1), (2, 2), (3, 1), (4, 2)]);
        let f = build_3sided_cutting(&p, 2).unwrap();
        assert!(f.covers(&[0]));
        let f = build_3sided_cutting(&p, 4).unwrap();
        assert_eq!(f.subsets, vec![vec![0, 1, 2, 3]]);
        assert!(build_3sided_cutting(&p, 0).is_err());
    }

    #[test]
    fn fold_symmetric() {
        let p = pts(&[(1, 1), (1, -1), (2, 2), (2, -2)]);
        let f = fold_family(&p, 2).unwrap();
        assert!(f.covers(&[0, 1]));
        assert!(f.max_subset() <= 24);
    }

    #[test]
    fn cover_base_case() {
        let p = pts(&[(0, 0), (1, 1), (2, 2)]);
        let f = cover_family(&p, 1).unwrap();
        assert_eq!(f.subsets, vec![vec![0, 1, 2]]);
        assert_eq!(f.provenance, vec![Provenance::Whole]);
    }

    #[test]
    fn k_sensitive_matches_exact() {
        let p: Vec<Point<i64>> = (0..60).map(|i| Point::new((i * 37) % 23, (i * 11) % 17)).collect();
        for kind in [ScoreKind::Area, ScoreKind::Perimeter] {
            for k in [1, 2, 3, 5] {
                let want = solve_exact(&p, k, kind).unwrap().score;
                let got = solve_k_sensitive(&p, k, kind, &|p, k, kind| solve_exact(p, k, kind)).unwrap();
                assert_eq!(got.score, want);
                assert!(got.count >= k);
            }
        }
    }

    #[test]
    fn three_sided_k_sensitive_matches() {
        let p: Vec<Point<i64>> = (0..50).map(|i| Point::new((i * 13) % 29, (i * 7) % 19 - 3)).collect();
        for k in [1, 2, 4, 9] {
            let want = brute_force_opt(&p, k, ScoreKind::Area, Constraint::BottomOnXAxis).unwrap().score;
            assert_eq!(solve_3sided_k_sensitive(&p, k, ScoreKind::Area).unwrap().score, want);
        }
    }

    #[test]
    fn outlier_examples() {
        let mut p: Vec<Point<i64>> = (0..10).map(|x| Point::new(x, 0)).collect();
        p.push(Point::new(100, 0));
        assert_eq!(solve_with_outliers(&p, 1, ScoreKind::Perimeter).unwrap().score, 18);
        let q = pts(&[(0, 0), (3, 1), (1, 4), (2, 2)]);
        let s = solve_with_outliers(&q, 0, ScoreKind::Area).unwrap();
        assert_eq!(s.axis_rect().unwrap(), &Rect::new(0, 0, 3, 4));
        assert_eq!(solve_with_outliers(&q, 3, ScoreKind::Area).unwrap().score, 0);
        assert!(solve_with_outliers(&q, 4, ScoreKind::Area).is_err());
    }
}
