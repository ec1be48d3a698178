//! Point sets that encode a (min,+)-convolution decision instance, so that
//! thresholding an exact rectangle solver answers the convolution question.

use crate::error::{invalid, Result};
use crate::geom::{Point, WeightedPoint};
use crate::minplus::decide_convolution;

/// Three sequences of equal length with entries strictly inside `(0, 1)`.
/// The question is whether `c[l] <= min_{i+j=l} a[i] + b[j]` for all `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvDecisionInstance {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl ConvDecisionInstance {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return invalid("sequences must be non-empty");
        }
        if a.len() != b.len() || a.len() != c.len() {
            return invalid("sequences must have equal length");
        }
        if let Some(v) = a.iter().chain(&b).chain(&c).find(|v| !(**v > 0.0 && **v < 1.0)) {
            return invalid(format!("entry {v} is outside (0, 1)"));
        }
        Ok(ConvDecisionInstance { a, b, c })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn decide(&self) -> bool {
        decide_convolution(&self.a, &self.b, &self.c).expect("validated lengths")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReductionVariant {
    Perimeter,
    Area,
    Weight,
}

/// A generated instance. For `Perimeter` and `Area` the weights are zero and
/// the optimum is the minimum score over rectangles enclosing at least `k`
/// points; for `Weight` it is the minimum weight over rectangles enclosing
/// exactly `k` points. Either way the convolution answer is
/// `optimum >= threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionInstance {
    pub variant: ReductionVariant,
    pub points: Vec<WeightedPoint<f64>>,
    pub k: usize,
    pub threshold: f64,
    pub decision: bool,
}

impl ReductionInstance {
    pub fn plain_points(&self) -> Vec<Point<f64>> {
        self.points.iter().map(|p| p.point).collect()
    }

    pub fn answer(&self, optimum: f64) -> bool {
        optimum >= self.threshold
    }
}

pub fn gen_convolution_reduction(
    inst: &ConvDecisionInstance,
    variant: ReductionVariant,
) -> Result<ReductionInstance> {
    let inst = ConvDecisionInstance::new(inst.a.clone(), inst.b.clone(), inst.c.clone())?;
    let n = inst.len();
    let nf = n as f64;
    let (a, b, c) = (&inst.a, &inst.b, &inst.c);
    let plain = |x: f64, y: f64| WeightedPoint::new(x, y, 0.0);
    let mut points = Vec::new();
    let (k, threshold) = match variant {
        ReductionVariant::Perimeter | ReductionVariant::Area => {
            let m = 2 * n;
            for i in 0..n {
                points.push(plain(-(i as f64) - a[i], 0.0));
            }
            for j in 0..n {
                points.push(plain(j as f64 + b[j], 0.0));
            }
            for l in 0..n {
                let y = match variant {
                    ReductionVariant::Perimeter => nf - l as f64 - c[l],
                    _ => 1.0 / (l as f64 + c[l]),
                };
                points.push(plain(0.0, y));
            }
            for _ in 0..m {
                points.push(plain(-a[0], 0.0));
                points.push(plain(b[0], 0.0));
            }
            if variant == ReductionVariant::Perimeter {
                (n + 2 + 2 * m, 2.0 * nf)
            } else {
                // Without a floor the tall side could collapse to the axis
                // and give zero area, so M copies sit just below every
                // vertical point.
                for _ in 0..m {
                    points.push(plain(0.0, 1.0 / nf));
                }
                (n + 2 + 3 * m, 1.0)
            }
        }
        ReductionVariant::Weight => {
            // Each family telescopes along a contiguous run; four heavy
            // anchors force every competitive window to span both axes.
            let heavy = 3.0 * nf + 3.0;
            let prev = |s: &[f64], i: usize| if i == 0 { 0.0 } else { s[i - 1] };
            for i in 0..n {
                points.push(WeightedPoint::new(-(i as f64) - 0.5, 0.0, a[i] - prev(a, i)));
            }
            for j in 0..n {
                points.push(WeightedPoint::new(j as f64 + 0.5, 0.0, b[j] - prev(b, j)));
            }
            for l in 0..n {
                let next = if l + 1 < n { c[l + 1] } else { 0.0 };
                points.push(WeightedPoint::new(0.0, nf - l as f64, next - c[l]));
            }
            for (x, y) in [(-0.75, 0.0), (0.75, 0.0), (0.0, -1.0), (0.0, 0.5)] {
                points.push(WeightedPoint::new(x, y, -heavy));
            }
            (n + 6, -4.0 * heavy)
        }
    };
    Ok(ReductionInstance { variant, points, k, threshold, decision: inst.decide() })
}
