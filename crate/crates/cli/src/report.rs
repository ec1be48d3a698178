//! One-line JSON records written to standard output.

use kenclose::{Point64, Rect64, Solution64, SolutionRect};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub variant: String,
    /// `[x_lo, y_lo, x_hi, y_hi]`; with `angle` set, the box in the frame
    /// rotated by `angle` about the origin.
    pub rect: [f64; 4],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub angle: Option<f64>,
    pub count: usize,
    pub score: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diff: Option<f64>,
    pub elapsed_ms: f64,
    pub seed: u64,
}

impl Report {
    pub fn from_solution(variant: &str, s: &Solution64, elapsed_ms: f64, seed: u64) -> Self {
        let (rect, angle) = match &s.rect {
            SolutionRect::Axis(r) => (*r, None),
            SolutionRect::Oriented(o) => {
                let (sin, cos) = (-o.angle).sin_cos();
                let back: Vec<Point64> = o
                    .corners()
                    .iter()
                    .map(|p| Point64::new(p.x * cos - p.y * sin, p.x * sin + p.y * cos))
                    .collect();
                (Rect64::bounding(&back).expect("four corners"), Some(o.angle))
            }
        };
        Report {
            variant: variant.to_string(),
            rect: [rect.x_lo, rect.y_lo, rect.x_hi, rect.y_hi],
            angle,
            count: s.count,
            score: s.score,
            weight: s.weight,
            diff: None,
            elapsed_ms,
            seed,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub outliers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counts: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<usize>,
}

/// Everything needed to replay a run: rerunning `command` with the same
/// parameters and seed on input with the same digest gives the same result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub variant: String,
    pub parameters: Parameters,
    pub seed: u64,
    pub input_digest: String,
    pub elapsed_ms: f64,
    pub result: Report,
}

pub fn digest(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}
