//! Redundancy exponent curves `δ(ε)` (redundancy `n^δ` for `k = n^ε`) and
//! the reference series they are compared against, in exact arithmetic.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::batch_mult::batch_delta;
use crate::error::{Error, Result};
use crate::pir::{pir_delta_curves, Variant};

pub type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

/// Previously known binary PIR results, as drawn.
pub fn pir_old_results() -> Vec<(Q, Q)> {
    vec![
        (q(0, 1), q(1, 2)),
        (q(29, 100), q(79, 100)),
        (q(1, 2), q(79, 100)),
        (q(1, 2), q(1, 1)),
        (q(1, 1), q(3, 2)),
        (q(3, 2), q(2, 1)),
    ]
}

/// Previously known binary batch results, as drawn.
pub fn batch_old_results() -> Vec<(Q, Q)> {
    vec![
        (q(0, 1), q(4, 5)),
        (q(1, 5), q(4, 5)),
        (q(7, 32), q(28, 32)),
        (q(7, 32), q(7, 8)),
        (q(1, 4), q(7, 8)),
        (q(1, 4), q(1, 1)),
        (q(1, 2), q(5, 4)),
        (q(3, 4), q(3, 2)),
        (q(1, 1), q(3, 2)),
        (q(3, 2), q(2, 1)),
    ]
}

/// `min{k, √n}` as an exponent curve.
pub fn lower_bound() -> Vec<(Q, Q)> {
    vec![(q(0, 1), q(1, 2)), (q(1, 2), q(1, 2)), (q(1, 1), q(1, 1)), (q(3, 2), q(3, 2)), (q(2, 1), q(2, 1))]
}

/// Piecewise-linear value at `x`; at a vertical jump the last listed point
/// wins. `None` outside the drawn range.
pub fn piecewise(points: &[(Q, Q)], x: Q) -> Option<Q> {
    let first = points.first()?;
    let last = points.last()?;
    if x < first.0 || x > last.0 {
        return None;
    }
    let mut value = None;
    for w in points.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x0 == x1 {
            if x == x0 {
                value = Some(y1);
            }
        } else if x0 <= x && x <= x1 {
            value = Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0));
        }
    }
    value.or((points.len() == 1 && x == first.0).then_some(first.1))
}

/// Array-code batch exponent, `2/3 + 5ε/3`, for `ε < 1/2`.
pub fn array_batch_delta(epsilon: Q) -> Option<Q> {
    (epsilon >= q(0, 1) && epsilon < q(1, 2)).then(|| q(2, 3) + q(5, 3) * epsilon)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    PirBinary,
    PirQary,
    Batch,
}

impl FromStr for Which {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pir-binary" => Ok(Which::PirBinary),
            "pir-qary" => Ok(Which::PirQary),
            "batch" => Ok(Which::Batch),
            other => Err(Error::Parameter(format!("unknown curve family {other:?}"))),
        }
    }
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::PirBinary => "pir-binary",
            Which::PirQary => "pir-qary",
            Which::Batch => "batch",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveRow {
    pub epsilon: Q,
    pub delta: Q,
    pub series: String,
    pub s: Option<i64>,
}

/// `s` values drawn individually on the PIR plots.
pub const PLOTTED_S: [i64; 5] = [3, 5, 7, 9, 20];

/// Largest `ε` on the grids.
pub fn epsilon_max() -> Q {
    q(2, 1)
}

/// Parses `0.1`, `1/8` or `2` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Q> {
    let text = text.trim();
    let bad = || Error::Parameter(format!("{text:?} is not a decimal or fraction"));
    if text.contains('/') {
        return Q::from_str(text).map_err(|_| bad());
    }
    let (whole, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let scale = 10i64.pow(frac.len() as u32);
    let w: i64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
    let f: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let sign = if whole.starts_with('-') { -1 } else { 1 };
    Ok(Q::from_integer(w) + Q::new(sign * f, scale))
}

pub fn epsilon_grid(step: Q, max: Q) -> Result<Vec<Q>> {
    if step <= q(0, 1) {
        return Err(Error::Parameter("step must be positive".into()));
    }
    let mut out = Vec::new();
    let mut e = q(0, 1);
    while e <= max {
        out.push(e);
        e += step;
    }
    Ok(out)
}

pub fn curves(which: Which, step: Q) -> Result<Vec<CurveRow>> {
    let grid = epsilon_grid(step, epsilon_max())?;
    let mut rows = Vec::new();
    let row = |epsilon, delta, series: &str, s| CurveRow { epsilon, delta, series: series.to_string(), s };
    match which {
        Which::PirBinary | Which::PirQary => {
            let variant = if which == Which::PirBinary { Variant::Binary } else { Variant::Qary };
            for r in pir_delta_curves(&grid, &PLOTTED_S, variant)? {
                match r.s {
                    Some(s) => rows.push(row(r.epsilon, r.delta, "delta_s", Some(s))),
                    None => rows.push(row(r.epsilon, r.delta, "delta_min", r.s_star)),
                }
            }
        }
        Which::Batch => {
            for &e in &grid {
                let binary = batch_delta(e, Variant::Binary)?;
                let mut best = binary;
                if e < q(1, 2) {
                    rows.push(row(e, binary, "multiplicity_binary", None));
                    rows.push(row(e, batch_delta(e, Variant::Qary)?, "multiplicity_qary", None));
                    if let Some(a) = array_batch_delta(e) {
                        rows.push(row(e, a, "array", None));
                        best = best.min(a);
                    }
                } else {
                    rows.push(row(e, binary, "large_k", None));
                }
                rows.push(row(e, best, "delta_min", None));
            }
        }
    }
    let references: Vec<(&str, Vec<(Q, Q)>)> = match which {
        Which::PirBinary => vec![("old_results", pir_old_results()), ("lower_bound", lower_bound())],
        Which::Batch => vec![("old_results", batch_old_results()), ("lower_bound", lower_bound())],
        Which::PirQary => vec![],
    };
    for (name, points) in references {
        for &e in &grid {
            if let Some(v) = piecewise(&points, e) {
                rows.push(row(e, v, name, None));
            }
        }
    }
    Ok(rows)
}

fn decimal(x: Q) -> String {
    format!("{:.6}", *x.numer() as f64 / *x.denom() as f64)
}

pub fn write_csv<W: std::io::Write>(rows: &[CurveRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["epsilon", "delta", "series", "s", "epsilon_exact", "delta_exact"])?;
    for r in rows {
        w.write_record([
            decimal(r.epsilon),
            decimal(r.delta),
            r.series.clone(),
            r.s.map(|s| s.to_string()).unwrap_or_default(),
            r.epsilon.to_string(),
            r.delta.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Where the array and multiplicity batch exponents cross, next to the
/// value quoted for it elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossover {
    /// Solution of `2/3 + 5ε/3 = 5/6 + ε/3`.
    pub by_formula: Q,
    /// The commonly quoted threshold 0.0755.
    pub quoted: Q,
}

impl Crossover {
    pub fn agrees(&self) -> bool {
        self.by_formula == self.quoted
    }
}

pub fn batch_crossover() -> Crossover {
    // a0 + a1 ε = b0 + b1 ε
    let (a0, a1) = (q(2, 3), q(5, 3));
    let (b0, b1) = (q(5, 6), q(1, 3));
    Crossover { by_formula: (b0 - a0) / (a1 - b1), quoted: q(755, 10000) }
}

/// Smallest grid `ε` where the array exponent stops being the better one.
pub fn switch_point(grid: &[Q]) -> Result<Option<Q>> {
    for &e in grid {
        let Some(a) = array_batch_delta(e) else { return Ok(Some(e)) };
        if a >= batch_delta(e, Variant::Binary)? {
            return Ok(Some(e));
        }
    }
    Ok(None)
}
