use std::str::FromStr;

use num_complex::Complex64;

/// Inclusive grid `a..b:n`, or geometric with `a..b:n:log`. A bare number
/// is a one-point grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
    pub log: bool,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let f = i as f64 / last;
                if i + 1 == self.steps {
                    self.end
                } else if self.log {
                    self.start * (self.end / self.start).powf(f)
                } else {
                    self.start + (self.end - self.start) * f
                }
            })
            .collect()
    }

    /// Values rounded to positive integers, duplicates removed.
    pub fn levels(&self) -> Result<Vec<u32>, String> {
        let mut out: Vec<u32> = Vec::new();
        for v in self.values() {
            let n = v.round();
            if !(1.0..=f64::from(u32::MAX)).contains(&n) {
                return Err(format!("level {v} is not a positive integer"));
            }
            if out.last() != Some(&(n as u32)) {
                out.push(n as u32);
            }
        }
        Ok(out)
    }
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let Some((range, rest)) = s.split_once(':') else {
            let v = number(s)?;
            return Ok(Grid { start: v, end: v, steps: 1, log: false });
        };
        let (a, b) = range.split_once("..").ok_or_else(|| format!("expected a..b:n, got '{s}'"))?;
        let (start, end) = (number(a)?, number(b)?);
        let (n, log) = match rest.split_once(':') {
            Some((n, "log")) => (n, true),
            Some((_, other)) => return Err(format!("unknown grid kind '{other}' (only 'log')")),
            None => (rest, false),
        };
        let steps: usize = n.trim().parse().map_err(|_| format!("'{n}' is not a step count"))?;
        if steps < 1 {
            return Err("grid needs at least one step".into());
        }
        if log && !(start > 0.0 && end > 0.0) {
            return Err("log grid needs positive end points".into());
        }
        Ok(Grid { start, end, steps, log })
    }
}

/// `1.5`, `-2i`, `0.3+0.4i`, `1e-3-2e-2i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(number(s)?, 0.0));
    };
    let unit = |t: &str| -> Result<f64, String> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => number(t),
        }
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => Ok(Complex64::new(number(&body[..i])?, unit(&body[i..])?)),
        None => Ok(Complex64::new(0.0, unit(body)?)),
    }
}

/// Points separated by `;`, coordinates by `,`.
pub fn parse_points(s: &str) -> Result<Vec<Vec<Complex64>>, String> {
    let points = s
        .split(';')
        .map(|p| p.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err("all points need the same number of coordinates".into());
    }
    Ok(points)
}
