//! Closed-form scaling-limit pair correlations κ_km(r), their small-r series
//! and large-r asymptotes, one-point densities, connected correlations and
//! the graph decay bound.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::kernels::KernelModel;
use crate::numeric::set_partitions;

/// Below this t = r²/2 the k = 1 evaluator uses the series.
pub const SERIES_SWITCH_K1_T: f64 = 0.05;
/// Below this r the k = 2, m = 2 evaluator uses the series.
pub const SERIES_SWITCH_K2_R: f64 = 0.2;
/// Largest point count accepted by the connected-correlation routines.
pub const MAX_CONNECTED_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaQuery {
    pub r: f64,
    pub m: usize,
    pub k: usize,
}

impl KappaQuery {
    pub fn new(r: f64, m: usize, k: usize) -> Self {
        Self { r, m, k }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0) || !self.r.is_finite() {
            return Err(Error::InvalidInput(format!("distance must be finite and non-negative, got {}", self.r)));
        }
        if !(1..=2).contains(&self.k) {
            return Err(Error::DomainError(format!("no closed form for k = {}", self.k)));
        }
        if self.m < self.k {
            return Err(Error::DomainError(format!("k = {} exceeds m = {}", self.k, self.m)));
        }
        Ok(())
    }
}

/// κ_km(r), switching to the series where the closed form cancels badly.
pub fn kappa(q: KappaQuery) -> Result<f64> {
    q.validate()?;
    let use_series = match (q.k, q.m) {
        (1, _) => 0.5 * q.r * q.r < SERIES_SWITCH_K1_T,
        (2, 2) => q.r < SERIES_SWITCH_K2_R,
        _ => false,
    };
    if use_series {
        kappa_series(q, usize::MAX)
    } else {
        kappa_closed(q)
    }
}

/// The closed form alone, without the small-r switch.
pub fn kappa_closed(q: KappaQuery) -> Result<f64> {
    q.validate()?;
    let m = q.m as f64;
    let u = q.r * q.r;
    if u == 0.0 {
        return kappa_series(q, usize::MAX);
    }
    // everything in x = e^{-u} and 1 - x, which stay bounded for all u
    let x = (-u).exp();
    let y = -(-u).exp_m1();
    Ok(match q.k {
        1 => {
            (0.5 * (m * m + m) * y * y * (1.0 + x) + u * u * x * (1.0 + x) - 2.0 * (m + 1.0) * u * x * y)
                / (m * m * y * y * y)
                + (m - 1.0) / (2.0 * m)
        }
        _ => {
            let first = ((m * m - m) + 2.0 * (m - 1.0) * x + 2.0 * x * x) / (y * y * m * (m - 1.0));
            let second = 4.0 * u * x * ((m - 1.0) + x) * (m + 1.0) / (y.powi(3) * (m - 1.0) * m * m);
            let third = 2.0 * u * u * x * ((m - 1.0) + 2.0 * m * x + x * x) / (y.powi(4) * (m - 1.0) * m * m);
            first - second + third
        }
    })
}

/// κ_1m written with hyperbolic functions of t = r²/2.
pub fn kappa1_hyperbolic(r: f64, m: usize) -> f64 {
    let m = m as f64;
    let t = 0.5 * r * r;
    let (s, c) = (t.sinh(), t.cosh());
    ((0.5 * (m * m + m) * s * s + t * t) * c - (m + 1.0) * t * s) / (m * m * s.powi(3))
        + (m - 1.0) / (2.0 * m)
}

/// One term `coeff · r^power` of a small-r expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesTerm {
    pub power: i32,
    pub coeff: Ratio<i64>,
}

impl SeriesTerm {
    pub fn eval(&self, r: f64) -> f64 {
        (*self.coeff.numer() as f64 / *self.coeff.denom() as f64) * r.powi(self.power)
    }
}

fn ratio(n: i64, d: i64) -> Ratio<i64> {
    Ratio::new(n, d)
}

/// Known nonzero terms of the small-r expansion of κ_km, by increasing power.
pub fn series_terms(k: usize, m: usize) -> Result<Vec<SeriesTerm>> {
    KappaQuery::new(0.0, m, k).validate()?;
    let mi = m as i64;
    let m2 = mi * mi;
    let mut terms: Vec<SeriesTerm> = match (k, m) {
        (1, _) => {
            // coefficient of t^power, t = r²/2
            let in_t = [
                (-1, ratio(mi - 1, 2 * mi)),
                (0, ratio(mi - 1, 2 * mi)),
                (1, ratio((mi + 2) * (mi + 1), 6 * m2)),
                (3, ratio(-(mi + 4) * (mi + 3), 90 * m2)),
                (5, ratio((mi + 6) * (mi + 5), 945 * m2)),
                (7, ratio(-(mi + 8) * (mi + 7), 9450 * m2)),
                (9, ratio((mi + 10) * (mi + 9), 93555 * m2)),
                (11, ratio(-691 * (mi + 12) * (mi + 11), 638_512_875 * m2)),
                (13, ratio(2 * (mi + 14) * (mi + 13), 18_243_225 * m2)),
            ];
            in_t.iter()
                .map(|&(p, c)| SeriesTerm {
                    power: 2 * p,
                    coeff: if p >= 0 { c / (1i64 << p) } else { c * (1i64 << -p) },
                })
                .collect()
        }
        (2, 2) => vec![
            SeriesTerm { power: 0, coeff: ratio(3, 4) },
            SeriesTerm { power: 4, coeff: ratio(1, 24) },
            SeriesTerm { power: 8, coeff: ratio(-1, 288) },
            SeriesTerm { power: 12, coeff: ratio(1, 4800) },
            SeriesTerm { power: 16, coeff: ratio(-1, 96768) },
        ],
        _ => vec![
            SeriesTerm { power: -4, coeff: ratio(mi - 2, mi) },
            SeriesTerm { power: -2, coeff: ratio(mi - 2, mi) },
            SeriesTerm { power: 0, coeff: ratio(5 * m2 - 7 * mi + 12, 12 * (mi - 1) * mi) },
            SeriesTerm { power: 2, coeff: ratio((mi - 2) * (mi + 2) * (mi + 1), 12 * (mi - 1) * m2) },
            SeriesTerm { power: 4, coeff: ratio((mi + 3) * (mi + 2), 240 * (mi - 1) * mi) },
            SeriesTerm { power: 6, coeff: ratio(-(mi - 2) * (mi + 4) * (mi + 3), 720 * (mi - 1) * m2) },
        ],
    };
    terms.retain(|t| *t.coeff.numer() != 0);
    Ok(terms)
}

/// Sum of the first `order` nonzero series terms (all known terms if
/// `order` exceeds them).
pub fn kappa_series(q: KappaQuery, order: usize) -> Result<f64> {
    q.validate()?;
    let terms = series_terms(q.k, q.m)?;
    if q.r == 0.0 && terms.first().is_some_and(|t| t.power < 0) {
        return Ok(f64::INFINITY);
    }
    // smallest terms first
    Ok(terms.iter().take(order).rev().map(|t| t.eval(q.r)).sum())
}

/// Two-term large-r asymptote 1 + P(r²) e^{-r²}, exact up to O(r⁴e^{-2r²}).
///
/// For k = 1, P(u) = (u² − 2(m+1)u + m(m+1))/m², the first-order term of
/// the closed form in e^{-u}.
pub fn kappa_asymptote(q: KappaQuery) -> Result<f64> {
    q.validate()?;
    let m = q.m as f64;
    let u = q.r * q.r;
    let poly = match q.k {
        1 => (u * u - 2.0 * (m + 1.0) * u + m * (m + 1.0)) / (m * m),
        _ => 2.0 * (u * u - 2.0 * (m + 1.0) * u + m * (m + 1.0)) / (m * m),
    };
    Ok(1.0 + poly * (-u).exp())
}

/// Expected zero density of k sections, constant across the manifold.
pub fn density(model: &KernelModel, k: usize) -> Result<f64> {
    model.validate()?;
    let m = model.dim();
    if k == 0 || k > m {
        return Err(Error::InvalidInput(format!("codimension k = {k} must lie in 1..={m}")));
    }
    let falling: f64 = (m - k + 1..=m).map(|i| i as f64).product();
    let level = model.level().map_or(1.0, f64::from);
    Ok(level.powi(k as i32) * falling / PI.powi(k as i32))
}

/// Subset of point indices encoded as a bit mask (bit i = point i).
pub type Subset = u32;

pub fn subset_members(s: Subset) -> Vec<usize> {
    (0..32).filter(|i| s & (1 << i) != 0).collect()
}

fn check_points(n: usize) -> Result<()> {
    if n == 0 || n > MAX_CONNECTED_POINTS {
        return Err(Error::SizeLimitExceeded {
            what: "points for connected correlations",
            got: n,
            limit: MAX_CONNECTED_POINTS,
        });
    }
    Ok(())
}

fn lookup(values: &BTreeMap<Subset, f64>, s: Subset) -> Result<f64> {
    match values.get(&s) {
        Some(&v) => Ok(v),
        None if s.count_ones() == 1 => Ok(1.0),
        None => Err(Error::MissingSubset(subset_members(s))),
    }
}

/// Blocks of every set partition of the members of `s`, as subsets.
fn partitions_of(s: Subset) -> Result<Vec<Vec<Subset>>> {
    let members = subset_members(s);
    Ok(set_partitions(members.len())?
        .into_iter()
        .map(|p| {
            p.into_iter()
                .map(|block| block.into_iter().fold(0, |acc, i| acc | (1 << members[i])))
                .collect()
        })
        .collect())
}

/// T̃ on the subset `s` from normalized correlations K̃ of all its subsets:
/// Σ over partitions (−1)^{l+1} (l−1)! ∏ K̃(block).
pub fn connected_on(values: &BTreeMap<Subset, f64>, s: Subset) -> Result<f64> {
    check_points(s.count_ones() as usize)?;
    let mut total = 0.0;
    for partition in partitions_of(s)? {
        let l = partition.len();
        let weight = (1..l).map(|i| i as f64).product::<f64>() * if l % 2 == 1 { 1.0 } else { -1.0 };
        let mut prod = weight;
        for block in partition {
            prod *= lookup(values, block)?;
        }
        total += prod;
    }
    Ok(total)
}

/// T̃_n for the points 0..n. Singletons missing from `values` count as 1.
pub fn connected_correlations(values: &BTreeMap<Subset, f64>, n: usize) -> Result<f64> {
    check_points(n)?;
    connected_on(values, (1 << n) - 1)
}

/// T̃ on every nonempty subset of 0..n.
pub fn all_connected(values: &BTreeMap<Subset, f64>, n: usize) -> Result<BTreeMap<Subset, f64>> {
    check_points(n)?;
    (1..(1u32 << n)).map(|s| Ok((s, connected_on(values, s)?))).collect()
}

/// Inverse transform: K̃(S) = Σ over partitions of S of ∏ T̃(block).
pub fn correlations_from_connected(connected: &BTreeMap<Subset, f64>, n: usize) -> Result<BTreeMap<Subset, f64>> {
    check_points(n)?;
    let mut out = BTreeMap::new();
    for s in 1..(1u32 << n) {
        let mut total = 0.0;
        for partition in partitions_of(s)? {
            let mut prod = 1.0;
            for block in partition {
                prod *= lookup(connected, block)?;
            }
            total += prod;
        }
        out.insert(s, total);
    }
    Ok(out)
}

/// Largest product of d²e^{-d²/2} over the edges of a connected multigraph
/// on the points whose vertices all have degree at least two, with at most
/// 2n edges.
pub fn decay_bound(points: &[Vec<Complex64>]) -> Result<f64> {
    let n = points.len();
    if n > 3 {
        return Err(Error::SizeLimitExceeded { what: "points for decay bound", got: n, limit: 3 });
    }
    if n < 2 {
        return Err(Error::InvalidInput("decay bound needs at least two points".into()));
    }
    let weight = |i: usize, j: usize| -> f64 {
        let d2: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).norm_sqr()).sum();
        d2 * (-0.5 * d2).exp()
    };
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let weights: Vec<f64> = pairs.iter().map(|&(i, j)| weight(i, j)).collect();
    let cap = 2 * n;
    let mut best = 0.0f64;
    let mut mult = vec![0usize; pairs.len()];
    loop {
        let edges: usize = mult.iter().sum();
        let used = mult.iter().filter(|&&e| e > 0).count();
        let degree_ok = (0..n).all(|v| {
            pairs.iter().zip(&mult).filter(|((i, j), _)| *i == v || *j == v).map(|(_, e)| e).sum::<usize>() >= 2
        });
        // on at most three vertices, connected means at least n - 1 distinct pairs
        if edges <= cap && degree_ok && used + 1 >= n {
            let prod: f64 = weights.iter().zip(&mult).map(|(w, &e)| w.powi(e as i32)).product();
            best = best.max(prod);
        }
        let mut pos = 0;
        loop {
            if pos == mult.len() {
                return Ok(best);
            }
            mult[pos] += 1;
            if mult[pos] <= cap {
                break;
            }
            mult[pos] = 0;
            pos += 1;
        }
    }
}
