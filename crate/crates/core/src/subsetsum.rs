//! Exactly-k rectangles whose total weight is closest to a target.
//!
//! [`SubsetSumIndex`] stores every diagonal `k..=k+q` of the window-weight
//! matrix in a merge-sort tree. With a deletion set `D`, the logical k-th
//! diagonal splits into `O(|D|)` fragments, each a contiguous stretch of one
//! original diagonal shifted by the weight deleted inside it, so one range
//! predecessor and one range successor query per fragment find the closest
//! window.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{infeasible, invalid, Error, Result};
use crate::geom::{check_k, check_points, order_by_x, order_by_y, ranks_of, Point, Rect, ScoreKind, Solution, SolutionRect, WeightedPoint};
use crate::scalar::Scalar;

/// Static merge-sort tree over `(value, position)` pairs.
#[derive(Debug, Clone)]
struct MergeTree<T> {
    size: usize,
    nodes: Vec<Vec<(T, u32)>>,
}

fn entry_cmp<T: Scalar>(a: &(T, u32), b: &(T, u32)) -> Ordering {
    a.0.total_cmp(b.0).then(a.1.cmp(&b.1))
}

impl<T: Scalar> MergeTree<T> {
    fn new(vals: &[T]) -> Self {
        let size = vals.len().next_power_of_two().max(1);
        let mut nodes = vec![Vec::new(); 2 * size];
        for (i, &v) in vals.iter().enumerate() {
            nodes[size + i] = vec![(v, i as u32)];
        }
        for v in (1..size).rev() {
            let (a, b) = (&nodes[2 * v], &nodes[2 * v + 1]);
            let mut m = Vec::with_capacity(a.len() + b.len());
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                if j == b.len() || (i < a.len() && entry_cmp(&a[i], &b[j]).is_le()) {
                    m.push(a[i]);
                    i += 1;
                } else {
                    m.push(b[j]);
                    j += 1;
                }
            }
            nodes[v] = m;
        }
        MergeTree { size, nodes }
    }

    /// Largest value `<= t` and smallest value `>= t` over positions
    /// `l..=r`, each with its leftmost position.
    fn pred_succ(&self, l: usize, r: usize, t: T) -> (Option<(T, u32)>, Option<(T, u32)>) {
        let mut pred: Option<(T, u32)> = None;
        let mut succ: Option<(T, u32)> = None;
        let mut visit = |node: &Vec<(T, u32)>| {
            let at = node.partition_point(|e| e.0 <= t);
            if at > 0 {
                let v = node[at - 1].0;
                let e = node[node.partition_point(|e| e.0 < v)];
                if pred.map_or(true, |p| e.0 > p.0 || (e.0 == p.0 && e.1 < p.1)) {
                    pred = Some(e);
                }
            }
            let at = node.partition_point(|e| e.0 < t);
            if at < node.len() {
                let e = node[at];
                if succ.map_or(true, |s| e.0 < s.0 || (e.0 == s.0 && e.1 < s.1)) {
                    succ = Some(e);
                }
            }
        };
        let (mut lo, mut hi) = (l + self.size, r + self.size + 1);
        while lo < hi {
            if lo & 1 == 1 {
                visit(&self.nodes[lo]);
                lo += 1;
            }
            if hi & 1 == 1 {
                hi -= 1;
                visit(&self.nodes[hi]);
            }
            lo >>= 1;
            hi >>= 1;
        }
        (pred, succ)
    }
}

/// Closest-weight window search over a sorted sequence tolerating up to `q`
/// deletions per query.
#[derive(Debug, Clone)]
pub struct SubsetSumIndex<T> {
    k: usize,
    q: usize,
    prefix: Vec<T>,
    diags: Vec<MergeTree<T>>,
}

pub fn build_subsetsum_index<T: Scalar>(values: &[T], weights: &[T], k: usize, q: usize) -> Result<SubsetSumIndex<T>> {
    let n = values.len();
    check_k(k, n)?;
    if weights.len() != n {
        return invalid("one weight per value is required");
    }
    if values.windows(2).any(|w| w[1] < w[0]) {
        return invalid("values must be nondecreasing");
    }
    if weights.iter().chain(values).any(|v| !v.is_finite_value()) {
        return invalid("values and weights must be finite");
    }
    Ok(SubsetSumIndex::from_weights(weights, k, q))
}

impl<T: Scalar> SubsetSumIndex<T> {
    fn from_weights(weights: &[T], k: usize, q: usize) -> Self {
        let n = weights.len();
        let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(T::zero());
        for &w in weights {
            prefix.push(*prefix.last().unwrap() + w);
        }
        let diags = (k..=(k + q).min(n))
            .map(|d| MergeTree::new(&(0..=n - d).map(|i| prefix[i + d] - prefix[i]).collect::<Vec<_>>()))
            .collect();
        SubsetSumIndex { k, q, prefix, diags }
    }
}

/// `(|w - target|, w, start)` ordering for closest-window candidates.
fn closer<T: Scalar>(a: (T, usize), b: Option<(T, usize)>, target: T) -> bool {
    let Some(b) = b else { return true };
    let (da, db) = ((a.0 - target).abs_value(), (b.0 - target).abs_value());
    da.total_cmp(db).then(a.0.total_cmp(b.0)).then(a.1.cmp(&b.1)).is_lt()
}

impl<T: Scalar> SubsetSumIndex<T> {
    pub fn len(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries of diagonal `d` (window length in positions), or `None` when
    /// the diagonal is not indexed.
    pub fn diagonal(&self, d: usize) -> Option<Vec<T>> {
        self.diags.get(d.checked_sub(self.k)?)?;
        let n = self.len();
        Some((0..=n - d).map(|i| self.prefix[i + d] - self.prefix[i]).collect())
    }

    /// Window of `k` consecutive surviving positions whose weight is closest
    /// to `target`; ties go to the smaller weight, then the leftmost window.
    pub fn query_closest(&self, deleted: &[usize], target: T) -> Result<(T, (usize, usize))> {
        let d = self.check_deleted(deleted)?;
        if self.len() - d.len() < self.k {
            return infeasible(format!("{} survivors, fewer than k = {}", self.len() - d.len(), self.k));
        }
        Ok(self.closest_from(&d, target, 0, self.len() - 1).expect("k survivors"))
    }

    fn check_deleted(&self, deleted: &[usize]) -> Result<Vec<usize>> {
        let mut d = deleted.to_vec();
        d.sort_unstable();
        d.dedup();
        if d.len() > self.q {
            return invalid(format!("{} deletions exceed the budget q = {}", d.len(), self.q));
        }
        if d.last().map_or(false, |&p| p >= self.len()) {
            return invalid("deleted position out of range");
        }
        Ok(d)
    }

    /// Closest window among those starting at positions in `lo..=hi`.
    /// `deleted` must be sorted, distinct and within budget.
    fn closest_from(&self, deleted: &[usize], target: T, lo: usize, hi: usize) -> Option<(T, (usize, usize))> {
        let n = self.len();
        let is_del = |p: usize| deleted.binary_search(&p).is_ok();
        let next_survivor = |mut p: usize| {
            while p < n && is_del(p) {
                p += 1;
            }
            p
        };
        let next_deleted = |p: usize| deleted.get(deleted.partition_point(|&x| x <= p)).copied().unwrap_or(n);
        let mut dw = vec![T::zero()];
        for &p in deleted {
            dw.push(*dw.last().unwrap() + self.prefix[p + 1] - self.prefix[p]);
        }
        let deleted_inside = |i: usize, j: usize| {
            let a = deleted.partition_point(|&x| x <= i);
            let b = deleted.partition_point(|&x| x < j);
            if b > a {
                dw[b] - dw[a]
            } else {
                T::zero()
            }
        };
        let mut i = next_survivor(lo);
        let mut j = i;
        let mut need = self.k - 1;
        while need > 0 && j < n {
            j = next_survivor(j + 1);
            need -= 1;
        }
        let mut best: Option<(T, usize, usize)> = None;
        while i <= hi && j < n {
            let len = (next_deleted(i) - i).min(next_deleted(j) - j).min(n - j).min(hi - i + 1);
            let d = j - i + 1;
            let off = deleted_inside(i, j);
            let tree = &self.diags[d - self.k];
            let (pred, succ) = tree.pred_succ(i, i + len - 1, target + off);
            for (v, pos) in pred.into_iter().chain(succ) {
                let w = v - off;
                let s = pos as usize;
                if closer((w, s), best.map(|b| (b.0, b.1)), target) {
                    best = Some((w, s, s + d - 1));
                }
            }
            i = next_survivor(i + len);
            j = next_survivor(j + len);
        }
        best.map(|(w, a, b)| (w, (a, b)))
    }
}

/// Points in rank space: distinct x-ranks and y-ranks with weights.
struct RankSpace<T> {
    xr: Vec<usize>,
    yr: Vec<usize>,
    w: Vec<T>,
    by_y: Vec<usize>,
}

impl<T: Scalar> RankSpace<T> {
    fn new(points: &[Point<T>], w: Vec<T>) -> Self {
        let by_y = order_by_y(points);
        RankSpace { xr: ranks_of(&order_by_x(points)), yr: ranks_of(&by_y), w, by_y }
    }
}

/// An exactly-k window: x-rank range and y-rank range, all global ranks.
#[derive(Debug, Clone, Copy)]
struct Found<T> {
    weight: T,
    xlo: usize,
    xhi: usize,
    ybot: usize,
    ytop: usize,
}

fn found_better<T: Scalar>(a: &Found<T>, b: &Option<Found<T>>, target: T) -> bool {
    let Some(b) = b else { return true };
    let (da, db) = ((a.weight - target).abs_value(), (b.weight - target).abs_value());
    da.total_cmp(db)
        .then(a.weight.total_cmp(b.weight))
        .then((a.xlo, a.ybot, a.xhi, a.ytop).cmp(&(b.xlo, b.ybot, b.xhi, b.ytop)))
        .is_lt()
}

fn slabs(m: usize, q: usize) -> Vec<(usize, usize)> {
    (0..m).step_by(q).map(|lo| (lo, (lo + q).min(m))).collect()
}

/// Slab-pair search over the points `ids` (global point indices). `yloc`
/// lists `ids` sorted by y-rank.
fn slab_search<T: Scalar>(rs: &RankSpace<T>, ids: &[usize], k: usize, target: T, q: usize) -> Option<Found<T>> {
    let mut yloc = ids.to_vec();
    yloc.sort_by_key(|&i| rs.yr[i]);
    let mut xloc = ids.to_vec();
    xloc.sort_by_key(|&i| rs.xr[i]);
    let m = ids.len();
    let mut local_y = vec![usize::MAX; rs.xr.len()];
    for (t, &i) in yloc.iter().enumerate() {
        local_y[i] = t;
    }
    let sl = slabs(m, q);
    let mut best: Option<Found<T>> = None;
    for (b, &tau) in sl.iter().enumerate() {
        for &sigma in &sl[b..] {
            if sigma.1 - tau.0 < k {
                continue;
            }
            let members: Vec<usize> = xloc.iter().copied().filter(|&i| (tau.0..sigma.1).contains(&local_y[i])).collect();
            let mut pos = vec![usize::MAX; m];
            for (p, &i) in members.iter().enumerate() {
                pos[local_y[i]] = p;
            }
            let xs: Vec<usize> = members.iter().map(|&i| rs.xr[i]).collect();
            let ws: Vec<T> = members.iter().map(|&i| rs.w[i]).collect();
            let index = SubsetSumIndex::from_weights(&ws, k, 2 * q);
            for ps in sigma.0..sigma.1 {
                for pt in tau.0..tau.1.min(ps + 1) {
                    if ps + 1 - pt < k {
                        continue;
                    }
                    let mut del: Vec<usize> = (ps + 1..sigma.1).chain(tau.0..pt).map(|y| pos[y]).collect();
                    del.sort_unstable();
                    let Some((w, (a, c))) = index.closest_from(&del, target, 0, members.len() - 1) else {
                        continue;
                    };
                    let f = Found { weight: w, xlo: xs[a], xhi: xs[c], ybot: rs.yr[yloc[pt]], ytop: rs.yr[yloc[ps]] };
                    if found_better(&f, &best, target) {
                        best = Some(f);
                    }
                }
            }
        }
    }
    best
}

fn weighted_parts<T: Scalar>(points: &[WeightedPoint<T>]) -> Result<(Vec<Point<T>>, Vec<T>)> {
    let pts: Vec<Point<T>> = points.iter().map(|p| p.point).collect();
    check_points(&pts)?;
    let w: Vec<T> = points.iter().map(|p| p.weight).collect();
    if w.iter().any(|v| !v.is_finite_value()) {
        return invalid("weights must be finite");
    }
    Ok((pts, w))
}

fn finish<T: Scalar>(pts: &[Point<T>], rs: &RankSpace<T>, f: Found<T>, target: T) -> Solution<T> {
    let witness: Vec<usize> = (0..pts.len())
        .filter(|&i| (f.xlo..=f.xhi).contains(&rs.xr[i]) && (f.ybot..=f.ytop).contains(&rs.yr[i]))
        .collect();
    let bx = order_by_x(pts);
    let rect = Rect::new(pts[bx[f.xlo]].x, pts[rs.by_y[f.ybot]].y, pts[bx[f.xhi]].x, pts[rs.by_y[f.ytop]].y);
    Solution {
        rect: SolutionRect::Axis(rect),
        kind: ScoreKind::SubsetSumDistance,
        count: witness.len(),
        score: (f.weight - target).abs_value(),
        weight: Some(f.weight),
        witness,
    }
}

fn isqrt_ceil(n: usize) -> usize {
    (n as f64).sqrt().ceil().max(1.0) as usize
}

/// Exactly-k rectangle whose total weight is closest to `target`, by slab
/// pairs of `q = ⌈√n⌉` points. Ties go to the smaller weight, then to the
/// lexicographically smaller rectangle.
pub fn solve_subset_sum<T: Scalar>(points: &[WeightedPoint<T>], k: usize, target: T) -> Result<Solution<T>> {
    solve_subset_sum_with(points, k, target, None)
}

pub fn solve_subset_sum_with<T: Scalar>(points: &[WeightedPoint<T>], k: usize, target: T, q: Option<usize>) -> Result<Solution<T>> {
    let (pts, w) = weighted_parts(points)?;
    check_k(k, pts.len())?;
    let rs = RankSpace::new(&pts, w);
    let ids: Vec<usize> = (0..pts.len()).collect();
    let q = q.unwrap_or_else(|| isqrt_ceil(pts.len())).max(1);
    let f = slab_search(&rs, &ids, k, target, q).expect("k <= n");
    Ok(finish(&pts, &rs, f, target))
}

/// Same contract as [`solve_subset_sum`], by divide and conquer on x with a
/// crossing search that keeps only the `k` points nearest the dividing line
/// on each side, using slabs of `⌈√k⌉` points.
pub fn solve_subset_sum_small_k<T: Scalar>(points: &[WeightedPoint<T>], k: usize, target: T) -> Result<Solution<T>> {
    solve_subset_sum_small_k_with(points, k, target, None)
}

pub fn solve_subset_sum_small_k_with<T: Scalar>(
    points: &[WeightedPoint<T>],
    k: usize,
    target: T,
    q: Option<usize>,
) -> Result<Solution<T>> {
    let (pts, w) = weighted_parts(points)?;
    check_k(k, pts.len())?;
    let rs = RankSpace::new(&pts, w);
    let mut ids: Vec<usize> = (0..pts.len()).collect();
    ids.sort_by_key(|&i| rs.xr[i]);
    let q = q.unwrap_or_else(|| isqrt_ceil(k)).max(1);
    let mut best = None;
    small_k_rec(&rs, &ids, k, target, q, &mut best);
    Ok(finish(&pts, &rs, best.expect("k <= n"), target))
}

fn offer_found<T: Scalar>(best: &mut Option<Found<T>>, f: Option<Found<T>>, target: T) {
    if let Some(f) = f {
        if found_better(&f, best, target) {
            *best = Some(f);
        }
    }
}

fn small_k_rec<T: Scalar>(rs: &RankSpace<T>, ids: &[usize], k: usize, target: T, q: usize, best: &mut Option<Found<T>>) {
    if ids.len() < k {
        return;
    }
    if ids.len() <= 2 * k {
        offer_found(best, slab_search(rs, ids, k, target, isqrt_ceil(ids.len())), target);
        return;
    }
    let half = ids.len() / 2;
    offer_found(best, crossing_search(rs, ids, half, k, target, q), target);
    small_k_rec(rs, &ids[..half], k, target, q, best);
    small_k_rec(rs, &ids[half..], k, target, q, best);
}

/// Keeps the `k` entries with the largest (`near_high`) or smallest x-rank.
fn keep_nearest(v: &mut Vec<usize>, add: &[usize], rs_xr: &[usize], k: usize, near_high: bool) {
    v.extend_from_slice(add);
    v.sort_by_key(|&i| rs_xr[i]);
    if v.len() > k {
        if near_high {
            v.drain(..v.len() - k);
        } else {
            v.truncate(k);
        }
    }
}

/// Best exactly-k window over `ids` (sorted by x-rank) that has points on
/// both sides of the split after the first `half` points.
fn crossing_search<T: Scalar>(rs: &RankSpace<T>, ids: &[usize], half: usize, k: usize, target: T, q: usize) -> Option<Found<T>> {
    let split_rank = rs.xr[ids[half]];
    let mut yloc = ids.to_vec();
    yloc.sort_by_key(|&i| rs.yr[i]);
    let m = ids.len();
    let sl = slabs(m, q);
    let mut best: Option<Found<T>> = None;
    for (b, &tau) in sl.iter().enumerate() {
        let mut near_left: Vec<usize> = Vec::new();
        let mut near_right: Vec<usize> = Vec::new();
        for a in b..sl.len() {
            if a > b + 1 {
                let slab = &yloc[sl[a - 1].0..sl[a - 1].1];
                let (l, r): (Vec<usize>, Vec<usize>) = slab.iter().partition(|&&i| rs.xr[i] < split_rank);
                keep_nearest(&mut near_left, &l, &rs.xr, k, true);
                keep_nearest(&mut near_right, &r, &rs.xr, k, false);
            }
            let sigma = sl[a];
            if sigma.1 - tau.0 < k {
                continue;
            }
            let mut cand: Vec<usize> = near_left.iter().chain(&near_right).copied().collect();
            cand.extend_from_slice(&yloc[sigma.0..sigma.1]);
            if a != b {
                cand.extend_from_slice(&yloc[tau.0..tau.1]);
            }
            cand.sort_by_key(|&i| rs.xr[i]);
            if cand.len() < k {
                continue;
            }
            let boundary = cand.partition_point(|&i| rs.xr[i] < split_rank);
            if boundary == 0 || boundary == cand.len() {
                continue;
            }
            let mut pos_of = std::collections::HashMap::with_capacity(cand.len());
            for (p, &i) in cand.iter().enumerate() {
                pos_of.insert(i, p);
            }
            let xs: Vec<usize> = cand.iter().map(|&i| rs.xr[i]).collect();
            let ws: Vec<T> = cand.iter().map(|&i| rs.w[i]).collect();
            let index = SubsetSumIndex::from_weights(&ws, k, 2 * q);
            for ps in sigma.0..sigma.1 {
                for pt in tau.0..tau.1.min(ps + 1) {
                    if ps + 1 - pt < k {
                        continue;
                    }
                    let mut del: Vec<usize> = (ps + 1..sigma.1).chain(tau.0..pt).map(|y| pos_of[&yloc[y]]).collect();
                    del.sort_unstable();
                    let alive = |p: usize| del.binary_search(&p).is_err();
                    let Some(first_right) = (boundary..cand.len()).find(|&p| alive(p)) else {
                        continue;
                    };
                    // earliest start whose window still reaches the right side
                    let mut lo = first_right;
                    let mut steps = 0;
                    while steps < k - 1 && lo > 0 {
                        lo -= 1;
                        if alive(lo) {
                            steps += 1;
                        }
                    }
                    let Some((w, (s, e))) = index.closest_from(&del, target, lo, boundary - 1) else {
                        continue;
                    };
                    if e < boundary {
                        continue;
                    }
                    let f = Found { weight: w, xlo: xs[s], xhi: xs[e], ybot: rs.yr[yloc[pt]], ytop: rs.yr[yloc[ps]] };
                    if found_better(&f, &best, target) {
                        best = Some(f);
                    }
                }
            }
        }
    }
    best
}

/// Rectangle enclosing exactly `counts[c]` points of each color `c`.
///
/// Color `c` gets weight `M^c` with `M = n + 1`, so a window has the right
/// census iff its weight equals `Σ counts[c]·M^c`. When those weights do not
/// fit in 52 bits they are hashed modulo a prime with a random base and every
/// hit is verified.
pub fn solve_colored<T: Scalar>(points: &[WeightedPoint<T>], counts: &[usize]) -> Result<Solution<T>> {
    solve_colored_seeded(points, counts, 0)
}

pub fn solve_colored_seeded<T: Scalar>(points: &[WeightedPoint<T>], counts: &[usize], seed: u64) -> Result<Solution<T>> {
    let pts: Vec<Point<T>> = points.iter().map(|p| p.point).collect();
    check_points(&pts)?;
    let n = pts.len();
    let d = counts.len();
    let mut color = Vec::with_capacity(n);
    for p in points {
        match p.color {
            Some(c) if c < d => color.push(c),
            _ => return invalid(format!("every point needs a color in [0, {d})")),
        }
    }
    let k: usize = counts.iter().sum();
    check_k(k, n)?;
    let census = |sol: &Solution<i64>| {
        let mut got = vec![0usize; d];
        for &i in &sol.witness {
            got[color[i]] += 1;
        }
        got == counts
    };
    let rank_pts = |w: &[i64]| -> Vec<WeightedPoint<i64>> {
        let xr = ranks_of(&order_by_x(&pts));
        let yr = ranks_of(&order_by_y(&pts));
        (0..n).map(|i| WeightedPoint::new(xr[i] as i64, yr[i] as i64, w[i])).collect()
    };
    let bits = d as f64 * ((n + 1) as f64).log2();
    let found = if bits <= 52.0 {
        let m = (n + 1) as i64;
        let pow: Vec<i64> = (0..d).map(|c| m.pow(c as u32)).collect();
        let target = counts.iter().zip(&pow).map(|(&c, &p)| c as i64 * p).sum();
        let w: Vec<i64> = color.iter().map(|&c| pow[c]).collect();
        let s = solve_subset_sum(&rank_pts(&w), k, target)?;
        (s.score == 0).then_some(s)
    } else {
        const P: i64 = 2_147_483_647;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hit = None;
        // a window with the right census sums to t + jP for some j < k
        'retry: for _ in 0..8 {
            let base = rng.gen_range(2..P);
            let mut pow = vec![1i64; d];
            for c in 1..d {
                pow[c] = pow[c - 1] * base % P;
            }
            let t = counts.iter().zip(&pow).fold(0i64, |acc, (&c, &p)| (acc + c as i64 * p) % P);
            let w: Vec<i64> = color.iter().map(|&c| pow[c]).collect();
            let pts_r = rank_pts(&w);
            let mut collided = false;
            for j in 0..k as i64 {
                let s = solve_subset_sum(&pts_r, k, t + j * P)?;
                if s.score != 0 {
                    continue;
                }
                if census(&s) {
                    hit = Some(s);
                    break 'retry;
                }
                collided = true;
            }
            if !collided {
                break;
            }
        }
        hit
    };
    let Some(s) = found else {
        return Err(Error::Infeasible("no rectangle has the requested color counts".into()));
    };
    let rect = Rect::bounding(s.witness.iter().map(|&i| &pts[i])).expect("k >= 1");
    Ok(Solution {
        rect: SolutionRect::Axis(rect),
        kind: ScoreKind::SubsetSumDistance,
        count: s.count,
        score: T::zero(),
        weight: None,
        witness: s.witness,
    })
}
