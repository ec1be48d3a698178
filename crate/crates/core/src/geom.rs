use std::cmp::Ordering;

use crate::error::{invalid, Result};
use crate::scalar::{Real, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        debug_assert!(x.is_finite_value() && y.is_finite_value());
        Point { x, y }
    }

    pub fn try_new(x: T, y: T) -> Result<Self> {
        if !x.is_finite_value() || !y.is_finite_value() {
            return invalid("point coordinates must be finite");
        }
        Ok(Point { x, y })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint<T> {
    pub point: Point<T>,
    pub weight: T,
    pub color: Option<usize>,
}

impl<T: Scalar> WeightedPoint<T> {
    pub fn new(x: T, y: T, weight: T) -> Self {
        WeightedPoint { point: Point::new(x, y), weight, color: None }
    }

    pub fn colored(x: T, y: T, color: usize) -> Self {
        WeightedPoint { point: Point::new(x, y), weight: T::zero(), color: Some(color) }
    }
}

/// Closed axis-aligned rectangle. Field order matches the canonical
/// tie-break order `(x_lo, y_lo, x_hi, y_hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T> {
    pub x_lo: T,
    pub y_lo: T,
    pub x_hi: T,
    pub y_hi: T,
}

impl<T: Scalar> Rect<T> {
    pub fn new(x_lo: T, y_lo: T, x_hi: T, y_hi: T) -> Self {
        debug_assert!(x_lo <= x_hi && y_lo <= y_hi);
        Rect { x_lo, y_lo, x_hi, y_hi }
    }

    pub fn try_new(x_lo: T, y_lo: T, x_hi: T, y_hi: T) -> Result<Self> {
        let finite = [x_lo, y_lo, x_hi, y_hi].iter().all(|v| v.is_finite_value());
        if !finite || x_lo > x_hi || y_lo > y_hi {
            return invalid("rectangle bounds must be finite and ordered");
        }
        Ok(Rect { x_lo, y_lo, x_hi, y_hi })
    }

    pub fn point(p: Point<T>) -> Self {
        Rect::new(p.x, p.y, p.x, p.y)
    }

    pub fn width(&self) -> T {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> T {
        self.y_hi - self.y_lo
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        self.x_lo <= p.x && p.x <= self.x_hi && self.y_lo <= p.y && p.y <= self.y_hi
    }

    pub fn contains_rect(&self, other: &Rect<T>) -> bool {
        self.x_lo <= other.x_lo
            && other.x_hi <= self.x_hi
            && self.y_lo <= other.y_lo
            && other.y_hi <= self.y_hi
    }

    /// Bounding box of the points, `None` when empty.
    pub fn bounding<'a, I>(points: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a Point<T>>,
    {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut r = Rect::point(*first);
        for p in it {
            r.x_lo = r.x_lo.min_of(p.x);
            r.x_hi = r.x_hi.max_of(p.x);
            r.y_lo = r.y_lo.min_of(p.y);
            r.y_hi = r.y_hi.max_of(p.y);
        }
        Some(r)
    }

    pub fn count_enclosed(&self, points: &[Point<T>]) -> usize {
        points.iter().filter(|p| self.contains(p)).count()
    }

    pub fn enclosed_indices(&self, points: &[Point<T>]) -> Vec<usize> {
        (0..points.len()).filter(|&i| self.contains(&points[i])).collect()
    }

    pub fn translate(&self, dx: T, dy: T) -> Self {
        Rect::new(self.x_lo + dx, self.y_lo + dy, self.x_hi + dx, self.y_hi + dy)
    }

    /// Lexicographic order on `(x_lo, y_lo, x_hi, y_hi)`.
    pub fn lex_cmp(&self, other: &Rect<T>) -> Ordering {
        self.x_lo
            .total_cmp(other.x_lo)
            .then(self.y_lo.total_cmp(other.y_lo))
            .then(self.x_hi.total_cmp(other.x_hi))
            .then(self.y_hi.total_cmp(other.y_hi))
    }
}

/// Rectangle expressed in a rotated frame: rotating `rect` by `angle` about
/// `frame_origin` yields its world position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect<T> {
    pub rect: Rect<T>,
    pub angle: T,
    pub frame_origin: Point<T>,
}

impl<T: Real> OrientedRect<T> {
    pub fn to_world(&self, p: Point<T>) -> Point<T> {
        let (s, c) = self.angle.sin_cos();
        Point::new(
            self.frame_origin.x + p.x * c - p.y * s,
            self.frame_origin.y + p.x * s + p.y * c,
        )
    }

    pub fn to_frame(&self, p: Point<T>) -> Point<T> {
        let (s, c) = self.angle.sin_cos();
        let dx = p.x - self.frame_origin.x;
        let dy = p.y - self.frame_origin.y;
        Point::new(dx * c + dy * s, -dx * s + dy * c)
    }

    /// Corners in world coordinates, counter-clockwise from `(x_lo, y_lo)`.
    pub fn corners(&self) -> [Point<T>; 4] {
        let r = &self.rect;
        [
            self.to_world(Point::new(r.x_lo, r.y_lo)),
            self.to_world(Point::new(r.x_hi, r.y_lo)),
            self.to_world(Point::new(r.x_hi, r.y_hi)),
            self.to_world(Point::new(r.x_lo, r.y_hi)),
        ]
    }

    /// Containment with an absolute slack `tol` in the rotated frame.
    pub fn contains(&self, p: &Point<T>, tol: T) -> bool {
        let q = self.to_frame(*p);
        let r = &self.rect;
        r.x_lo - tol <= q.x && q.x <= r.x_hi + tol && r.y_lo - tol <= q.y && q.y <= r.y_hi + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoreKind {
    Perimeter,
    Area,
    Weight,
    SubsetSumDistance,
}

impl ScoreKind {
    pub fn is_geometric(self) -> bool {
        matches!(self, ScoreKind::Perimeter | ScoreKind::Area)
    }

    pub(crate) fn require_geometric(self) -> Result<()> {
        if self.is_geometric() {
            Ok(())
        } else {
            invalid(format!("{self:?} is not a geometric score"))
        }
    }

    pub(crate) fn of_extent<T: Scalar>(self, w: T, h: T) -> T {
        match self {
            ScoreKind::Perimeter => T::two() * (w + h),
            _ => w * h,
        }
    }
}

/// Perimeter or area of `rect`; other kinds are not functions of the
/// rectangle alone and are rejected.
pub fn score<T: Scalar>(rect: &Rect<T>, kind: ScoreKind) -> Result<T> {
    kind.require_geometric()?;
    Ok(kind.of_extent(rect.width(), rect.height()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Reflect,
    Fold,
}

pub fn transform_x<T: Scalar>(points: &[Point<T>], mode: Transform) -> Vec<Point<T>> {
    points
        .iter()
        .map(|p| match mode {
            Transform::Reflect => Point::new(p.x, -p.y),
            Transform::Fold => Point::new(p.x, p.y.abs_value()),
        })
        .collect()
}

/// Indices sorted by `(x, index)`.
pub fn order_by_x<T: Scalar>(points: &[Point<T>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].x.total_cmp(points[b].x).then(a.cmp(&b)));
    idx
}

/// Indices sorted by `(y, index)`.
pub fn order_by_y<T: Scalar>(points: &[Point<T>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].y.total_cmp(points[b].y).then(a.cmp(&b)));
    idx
}

pub(crate) fn ranks_of(order: &[usize]) -> Vec<usize> {
    let mut rank = vec![0; order.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolutionRect<T> {
    Axis(Rect<T>),
    Oriented(OrientedRect<T>),
}

impl<T: Scalar> SolutionRect<T> {
    /// The rectangle in its own frame (world frame for axis-aligned ones).
    pub fn frame_rect(&self) -> &Rect<T> {
        match self {
            SolutionRect::Axis(r) => r,
            SolutionRect::Oriented(o) => &o.rect,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub rect: SolutionRect<T>,
    pub kind: ScoreKind,
    pub count: usize,
    pub score: T,
    pub weight: Option<T>,
    pub witness: Vec<usize>,
}

impl<T: Scalar> Solution<T> {
    /// Axis-aligned solution whose witness is every point inside `rect`.
    pub(crate) fn enclosing(rect: Rect<T>, kind: ScoreKind, points: &[Point<T>]) -> Self {
        let witness = rect.enclosed_indices(points);
        Solution {
            rect: SolutionRect::Axis(rect),
            kind,
            count: witness.len(),
            score: kind.of_extent(rect.width(), rect.height()),
            weight: None,
            witness,
        }
    }

    pub fn axis_rect(&self) -> Option<&Rect<T>> {
        match &self.rect {
            SolutionRect::Axis(r) => Some(r),
            SolutionRect::Oriented(_) => None,
        }
    }

    /// Canonical order: score, then the rectangle lexicographically.
    pub fn canonical_cmp(&self, other: &Solution<T>) -> Ordering {
        self.score
            .total_cmp(other.score)
            .then_with(|| self.rect.frame_rect().lex_cmp(other.rect.frame_rect()))
    }
}

/// Running minimum under a canonical `(score, rect)` key.
pub(crate) struct Best<T> {
    pub score: T,
    pub rect: Rect<T>,
}

pub(crate) fn better<T: Scalar>(best: &Option<Best<T>>, score: T, rect: &Rect<T>) -> bool {
    match best {
        None => true,
        Some(b) => match score.total_cmp(b.score) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => rect.lex_cmp(&b.rect) == Ordering::Less,
        },
    }
}

pub(crate) fn offer<T: Scalar>(best: &mut Option<Best<T>>, score: T, rect: Rect<T>) {
    if better(best, score, &rect) {
        *best = Some(Best { score, rect });
    }
}

pub(crate) fn check_points<T: Scalar>(points: &[Point<T>]) -> Result<()> {
    if points.iter().any(|p| !p.x.is_finite_value() || !p.y.is_finite_value()) {
        return invalid("point coordinates must be finite");
    }
    Ok(())
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return invalid(format!("k = {k} must lie in [1, {n}]"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_examples() {
        let r = Rect::new(0.0, 0.0, 1.0, 0.0);
        assert_eq!(score(&r, ScoreKind::Perimeter).unwrap(), 2.0);
        let r = Rect::new(0.0, 0.0, 2.0, 3.0);
        assert_eq!(score(&r, ScoreKind::Area).unwrap(), 6.0);
        let r = Rect::new(5.0, 1.0, 7.0, 4.0);
        assert_eq!(score(&r, ScoreKind::Perimeter).unwrap(), 10.0);
        assert_eq!(score(&r.translate(100.0, 100.0), ScoreKind::Perimeter).unwrap(), 10.0);
        assert!(score(&r, ScoreKind::Weight).is_err());
    }

    #[test]
    fn transforms() {
        let p = vec![Point::new(1, 2), Point::new(3, -4)];
        assert_eq!(transform_x(&p, Transform::Reflect), vec![Point::new(1, -2), Point::new(3, 4)]);
        let f = transform_x(&p, Transform::Fold);
        assert_eq!(f, vec![Point::new(1, 2), Point::new(3, 4)]);
        assert_eq!(transform_x(&f, Transform::Fold), f);
    }

    #[test]
    fn closed_containment() {
        let r = Rect::new(0, 0, 2, 2);
        assert!(r.contains(&Point::new(2, 0)));
        assert!(!r.contains(&Point::new(3, 0)));
        assert!(Rect::try_new(1, 0, 0, 0).is_err());
        assert!(Point::try_new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn orientation_round_trip() {
        let o = OrientedRect {
            rect: Rect::new(0.0, 0.0, 1.0, 2.0),
            angle: 0.7,
            frame_origin: Point::new(3.0, -1.0),
        };
        let p = Point::new(0.25f64, 1.5);
        let q = o.to_frame(o.to_world(p));
        assert!((p.x - q.x).abs() < 1e-12 && (p.y - q.y).abs() < 1e-12);
        assert!(o.contains(&o.corners()[2], 1e-12));
    }
}
