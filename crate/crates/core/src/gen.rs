//! Seeded instance generators. Coordinates are small integers so that
//! area and perimeter comparisons are exact in `f64`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{Point, WeightedPoint};
use crate::minplus::convolve_min_plus;
use crate::reduction::ConvDecisionInstance;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points with coordinates drawn uniformly from `0..range`.
pub fn uniform_points(n: usize, range: i64, seed: u64) -> Vec<Point<f64>> {
    let mut r = rng(seed);
    let range = range.max(1);
    (0..n)
        .map(|_| Point::new(r.gen_range(0..range) as f64, r.gen_range(0..range) as f64))
        .collect()
}

/// The first `n` cells of a square grid of side `ceil(sqrt(n))`, row by row.
pub fn grid_points(n: usize) -> Vec<Point<f64>> {
    let side = (n as f64).sqrt().ceil().max(1.0) as usize;
    (0..n).map(|i| Point::new((i % side) as f64, (i / side) as f64)).collect()
}

/// Points scattered around `clusters` random centers.
pub fn clustered_points(n: usize, clusters: usize, range: i64, seed: u64) -> Vec<Point<f64>> {
    let mut r = rng(seed);
    let range = range.max(1);
    let spread = (range / 20).max(1);
    let centers: Vec<(i64, i64)> =
        (0..clusters.max(1)).map(|_| (r.gen_range(0..range), r.gen_range(0..range))).collect();
    (0..n)
        .map(|_| {
            let &(cx, cy) = centers.choose(&mut r).expect("non-empty");
            let x = cx + r.gen_range(-spread..=spread);
            let y = cy + r.gen_range(-spread..=spread);
            Point::new(x as f64, y as f64)
        })
        .collect()
}

/// Uniform points with integer weights in `-wmax..=wmax`.
pub fn weighted_points(n: usize, range: i64, wmax: i64, seed: u64) -> Vec<WeightedPoint<f64>> {
    let mut r = rng(seed);
    let range = range.max(1);
    (0..n)
        .map(|_| {
            WeightedPoint::new(
                r.gen_range(0..range) as f64,
                r.gen_range(0..range) as f64,
                r.gen_range(-wmax..=wmax) as f64,
            )
        })
        .collect()
}

/// Uniform points with colors in `0..d`.
pub fn colored_points(n: usize, d: usize, range: i64, seed: u64) -> Vec<WeightedPoint<f64>> {
    let mut r = rng(seed);
    let range = range.max(1);
    (0..n)
        .map(|_| {
            WeightedPoint::colored(
                r.gen_range(0..range) as f64,
                r.gen_range(0..range) as f64,
                r.gen_range(0..d.max(1)),
            )
        })
        .collect()
}

/// Random convolution instance whose entries are odd multiples of 1/128,
/// so no sum `a_i + b_j` ever equals some `c_l`. About half the instances
/// answer yes.
pub fn conv_instance(n: usize, seed: u64) -> ConvDecisionInstance {
    let mut r = rng(seed);
    let n = n.max(1);
    let odd = |r: &mut ChaCha8Rng| (2 * r.gen_range(0..64) + 1) as f64 / 128.0;
    let a: Vec<f64> = (0..n).map(|_| odd(&mut r)).collect();
    let b: Vec<f64> = (0..n).map(|_| odd(&mut r)).collect();
    let conv = convolve_min_plus(&a, &b).expect("equal non-empty lengths");
    let step = 1.0 / 128.0;
    let mut c: Vec<f64> = conv[..n]
        .iter()
        .map(|&m| {
            let below = (m - step).min(1.0 - step);
            let slack = r.gen_range(0..4) as f64 * 2.0 * step;
            (below - slack).max(step)
        })
        .collect();
    if r.gen_bool(0.5) {
        let l = r.gen_range(0..n);
        if conv[l] + step < 1.0 {
            c[l] = conv[l] + step;
        }
    }
    ConvDecisionInstance::new(a, b, c).expect("entries in (0, 1)")
}
