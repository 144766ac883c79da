use serde::Serialize;

use crate::distortion::DistortionMatrix;
use crate::error::{Error, Result};
use crate::kernel::Distribution;

use super::entropy::mi_of;

pub const SWEEP_POINTS: usize = 200;
const BETA_MIN: f64 = 1e-3;
const BETA_MAX: f64 = 1e5;
const INNER_TOL: f64 = 1e-13;
const INNER_MAX: usize = 20_000;
const BISECTION_STEPS: usize = 200;

/// One point `(D, R)` of the rate–distortion curve and its Lagrange slope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub slope: f64,
    pub distortion: f64,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateDistortion {
    pub rate: f64,
    pub distortion: f64,
    /// `None` at the endpoints (zero rate, or minimum distortion).
    pub slope: Option<f64>,
    /// Optimal test channel, row-major over sender × reconstruction.
    pub test_channel: Vec<f64>,
}

struct Problem<'a> {
    p: &'a [f64],
    d: &'a DistortionMatrix,
    n: usize,
    m: usize,
    row_min: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn new(p: &'a Distribution<f64>, d: &'a DistortionMatrix) -> Result<Self> {
        let labels: Vec<String> = d.rows().iter().map(ToString::to_string).collect();
        if p.space() != labels.as_slice() {
            return Err(Error::SpaceMismatch(
                "source distribution does not match the distortion rows".into(),
            ));
        }
        if d.cols().is_empty() {
            return Err(Error::InvalidParameter("empty reconstruction space".into()));
        }
        let (n, m) = (d.rows().len(), d.cols().len());
        let row_min = (0..n)
            .map(|i| d.row(i).iter().copied().fold(f64::INFINITY, f64::min))
            .collect();
        Ok(Self {
            p: p.mass(),
            d,
            n,
            m,
            row_min,
        })
    }

    fn d_min(&self) -> f64 {
        self.p.iter().zip(&self.row_min).map(|(a, b)| a * b).sum()
    }

    /// Best constant reconstruction and its distortion.
    fn d_max(&self) -> (usize, f64) {
        (0..self.m)
            .map(|j| (j, (0..self.n).map(|i| self.p[i] * self.d.get(i, j)).sum::<f64>()))
            .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
    }

    fn point(&self, q_cond: &[f64]) -> (f64, f64) {
        let mut dist = 0.0;
        for i in 0..self.n {
            for j in 0..self.m {
                dist += self.p[i] * q_cond[i * self.m + j] * self.d.get(i, j);
            }
        }
        (dist, mi_of(self.p, q_cond, self.m))
    }

    /// Alternating minimisation at slope `beta`; `beta = ∞` restricts each
    /// row to its minimum-distortion reconstructions.
    fn solve(&self, beta: f64) -> (f64, f64, Vec<f64>) {
        let (n, m) = (self.n, self.m);
        let weight: Vec<f64> = (0..n * m)
            .map(|k| {
                let (i, j) = (k / m, k % m);
                let excess = self.d.get(i, j) - self.row_min[i];
                if beta.is_infinite() {
                    if excess <= 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (-beta * excess).exp()
                }
            })
            .collect();
        let mut q = vec![1.0 / m as f64; m];
        let mut cond = vec![0.0; n * m];
        for _ in 0..INNER_MAX {
            for i in 0..n {
                let row = &mut cond[i * m..(i + 1) * m];
                let mut z = 0.0;
                for j in 0..m {
                    row[j] = q[j] * weight[i * m + j];
                    z += row[j];
                }
                row.iter_mut().for_each(|v| *v /= z);
            }
            let mut next = vec![0.0; m];
            for i in 0..n {
                for j in 0..m {
                    next[j] += self.p[i] * cond[i * m + j];
                }
            }
            let change = next.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            q = next;
            if change < INNER_TOL {
                break;
            }
        }
        let (dist, rate) = self.point(&cond);
        (dist, rate, cond)
    }
}

fn log_space(lo: f64, hi: f64, k: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..k).map(move |i| (a + (b - a) * i as f64 / (k - 1) as f64).exp())
}

/// The Lagrange sweep over [`SWEEP_POINTS`] log-spaced slopes, ordered by
/// increasing slope (decreasing distortion).
pub fn rd_curve(p: &Distribution<f64>, d: &DistortionMatrix) -> Result<Vec<RatePoint>> {
    let prob = Problem::new(p, d)?;
    Ok(log_space(BETA_MIN, BETA_MAX, SWEEP_POINTS)
        .map(|beta| {
            let (distortion, rate, _) = prob.solve(beta);
            RatePoint {
                slope: beta,
                distortion,
                rate,
            }
        })
        .collect())
}

/// Whether a sweep is non-increasing and convex as a function of `D`,
/// up to `tol`.
pub fn is_monotone_convex(points: &[RatePoint], tol: f64) -> bool {
    let mut pts: Vec<RatePoint> = points.to_vec();
    pts.sort_by(|a, b| a.distortion.total_cmp(&b.distortion));
    pts.dedup_by(|a, b| (a.distortion - b.distortion).abs() < 1e-9);
    let monotone = pts.windows(2).all(|w| w[1].rate <= w[0].rate + tol);
    let convex = pts.windows(3).all(|w| {
        let (a, b, c) = (w[0], w[1], w[2]);
        let t = (b.distortion - a.distortion) / (c.distortion - a.distortion);
        b.rate <= a.rate + t * (c.rate - a.rate) + tol
    });
    monotone && convex
}

/// `R(D) = min I(S; Ŝ)` over test channels with expected distortion ≤ `D`.
/// The returned distortion is within `tol` of `target` on the interior of
/// the curve.
pub fn rate_distortion(p: &Distribution<f64>, d: &DistortionMatrix, target: f64, tol: f64) -> Result<RateDistortion> {
    if target.is_nan() || target < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "distortion level {target} must be non-negative"
        )));
    }
    let prob = Problem::new(p, d)?;
    let d_min = prob.d_min();
    if target < d_min - tol {
        return Err(Error::InfeasibleDistortion {
            requested: target,
            minimum: d_min,
        });
    }
    let (best, d_max) = prob.d_max();
    if target >= d_max {
        let mut test_channel = vec![0.0; prob.n * prob.m];
        for i in 0..prob.n {
            test_channel[i * prob.m + best] = 1.0;
        }
        return Ok(RateDistortion {
            rate: 0.0,
            distortion: d_max,
            slope: None,
            test_channel,
        });
    }
    if target <= d_min + tol {
        let (distortion, rate, test_channel) = prob.solve(f64::INFINITY);
        return Ok(RateDistortion {
            rate,
            distortion,
            slope: None,
            test_channel,
        });
    }
    // Bracket the target on the sweep, then bisect in log-slope.
    let betas: Vec<f64> = log_space(BETA_MIN, BETA_MAX, SWEEP_POINTS).collect();
    let mut lo = 1e-9;
    let mut hi = BETA_MAX;
    for &b in &betas {
        let (dist, rate, cond) = prob.solve(b);
        if (dist - target).abs() <= tol {
            return Ok(RateDistortion {
                rate,
                distortion: dist,
                slope: Some(b),
                test_channel: cond,
            });
        }
        if dist > target {
            lo = b;
        } else {
            hi = b;
            break;
        }
    }
    let mut last = prob.solve(hi);
    let mut slope = hi;
    for _ in 0..BISECTION_STEPS {
        let mid = (lo.ln() * 0.5 + hi.ln() * 0.5).exp();
        let r = prob.solve(mid);
        slope = mid;
        if (r.0 - target).abs() <= tol {
            last = r;
            break;
        }
        if r.0 > target {
            lo = mid;
        } else {
            hi = mid;
        }
        last = r;
    }
    Ok(RateDistortion {
        rate: last.1,
        distortion: last.0,
        slope: Some(slope),
        test_channel: last.2,
    })
}
