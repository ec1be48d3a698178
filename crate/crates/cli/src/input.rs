//! Whitespace-separated point records, one per line.

use std::fmt;

use kenclose::{Point64, WeightedPoint64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    /// `x y`
    Plain,
    /// `x y weight`
    Weighted,
    /// `x y color`, colors below the given bound
    Colored(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Parsed records in input order. Plain records carry weight 0 and no color.
pub fn parse_points(text: &str, schema: Schema) -> Result<Vec<WeightedPoint64>, ParseError> {
    let arity = match schema {
        Schema::Plain => 2,
        _ => 3,
    };
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let fields = tokens(body);
        if fields.is_empty() {
            continue;
        }
        let err = |column: usize, message: String| ParseError { line, column, message };
        if fields.len() != arity {
            let column = fields.get(arity).map_or(raw.trim_end().len() + 1, |t| t.0);
            return Err(err(column, format!("expected {arity} fields, found {}", fields.len())));
        }
        let num = |(col, tok): (usize, &str)| -> Result<f64, ParseError> {
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(err(col, format!("malformed number `{tok}`"))),
            }
        };
        let x = num(fields[0])?;
        let y = num(fields[1])?;
        let p = match schema {
            Schema::Plain => WeightedPoint64::new(x, y, 0.0),
            Schema::Weighted => WeightedPoint64::new(x, y, num(fields[2])?),
            Schema::Colored(d) => {
                let (col, tok) = fields[2];
                let c: usize = tok.parse().map_err(|_| err(col, format!("malformed color `{tok}`")))?;
                if c >= d {
                    return Err(err(col, format!("color {c} is not below {d}")));
                }
                WeightedPoint64::colored(x, y, c)
            }
        };
        out.push(p);
    }
    Ok(out)
}

/// Tokens with their 1-based starting columns.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(b)) => {
                out.push((b + 1, &s[b..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(b) = start {
        out.push((b + 1, &s[b..]));
    }
    out
}

pub fn plain(points: &[WeightedPoint64]) -> Vec<Point64> {
    points.iter().map(|p| p.point).collect()
}
