//! Error-versus-work curves and the comparisons made on them.

use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub work: usize,
    pub error: f64,
    /// Mean square behind `error`, for plotting either convention.
    pub mean_square: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurve {
    pub label: String,
    pub family: String,
    pub points: Vec<CurvePoint>,
    /// The node family ran out of levels before the sweep finished.
    pub exhausted: bool,
}

impl ErrorCurve {
    pub fn new(label: impl Into<String>, family: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            family: family.into(),
            points: Vec::new(),
            exhausted: false,
        }
    }

    /// Appends a point; a point whose work does not exceed the last one is
    /// dropped so that work stays strictly increasing.
    pub fn push(&mut self, work: usize, error: f64, mean_square: f64) -> bool {
        if self.points.last().is_some_and(|p| p.work >= work) {
            return false;
        }
        self.points.push(CurvePoint {
            work,
            error,
            mean_square,
        });
        true
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.error).collect()
    }

    /// Error at `x` by linear interpolation in log-log coordinates; `None`
    /// outside the curve's range.
    pub fn error_at(&self, x: usize) -> Option<f64> {
        let i = self.points.partition_point(|p| p.work < x);
        let hi = self.points.get(i)?;
        if hi.work == x {
            return Some(hi.error);
        }
        let lo = self.points.get(i.checked_sub(1)?)?;
        let t = ((x as f64).ln() - (lo.work as f64).ln()) / ((hi.work as f64).ln() - (lo.work as f64).ln());
        Some((lo.error.ln() + t * (hi.error.ln() - lo.error.ln())).exp())
    }
}

/// Three-point running median; the end points are kept.
pub fn median_smooth(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            if i == 0 || i + 1 == n {
                values[i]
            } else {
                let mut w = [values[i - 1], values[i], values[i + 1]];
                w.sort_by(f64::total_cmp);
                w[1]
            }
        })
        .collect()
}

pub fn is_non_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0])
}

/// Outcome of comparing two curves at common abscissae.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    /// Abscissae inside both curves' ranges and above the threshold.
    pub abscissae: Vec<usize>,
    /// How many of them have `a <= b`.
    pub at_or_below: usize,
}

impl Comparison {
    pub fn fraction(&self) -> f64 {
        if self.abscissae.is_empty() {
            f64::NAN
        } else {
            self.at_or_below as f64 / self.abscissae.len() as f64
        }
    }
}

/// Compares `a` against `b` at every work value of either curve that lies
/// in the common range and is at least `min_work`, interpolating each curve
/// between its own points.
pub fn compare_curves(a: &ErrorCurve, b: &ErrorCurve, min_work: usize) -> Comparison {
    let (Some(a0), Some(b0)) = (a.points.first(), b.points.first()) else {
        return Comparison {
            abscissae: Vec::new(),
            at_or_below: 0,
        };
    };
    let lo = min_work.max(a0.work).max(b0.work);
    let hi = a
        .points
        .last()
        .map_or(0, |p| p.work)
        .min(b.points.last().map_or(0, |p| p.work));
    let mut xs: Vec<usize> = a
        .points
        .iter()
        .chain(&b.points)
        .map(|p| p.work)
        .filter(|&w| w >= lo && w <= hi)
        .collect();
    xs.sort_unstable();
    xs.dedup();
    let at_or_below = xs
        .iter()
        .filter(|&&x| match (a.error_at(x), b.error_at(x)) {
            (Some(ea), Some(eb)) => ea <= eb,
            _ => false,
        })
        .count();
    Comparison {
        abscissae: xs,
        at_or_below,
    }
}

pub const CURVE_HEADER: &str = "family,label,work,error,mean_square,exhausted";

/// All curves as CSV rows under [`CURVE_HEADER`].
pub fn curves_csv(curves: &[ErrorCurve]) -> String {
    let mut out = String::new();
    for c in curves {
        for p in &c.points {
            let _ = writeln!(
                out,
                "{},{},{},{:e},{:e},false",
                c.family, c.label, p.work, p.error, p.mean_square
            );
        }
        if c.exhausted {
            let _ = writeln!(out, "{},{},,,,true", c.family, c.label);
        }
    }
    out
}
