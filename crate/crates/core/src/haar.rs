//! The counting functional `I(f) = Δ·Σ_h f(j(h))`, `Δ⁻¹ = |j⁻¹(V)|`, on a
//! finite approximation, with left-shift and invariance diagnostics.
//!
//! Sums are taken over values sorted by `f64::total_cmp` and reduced by a
//! fixed pairwise tree, so a permutation of the summands gives a bit-identical
//! result.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approximation::{
    build_approximation_with, ApproximationError, ApproximationProblem, BuildOptions,
    FiniteLeftQuasigroup,
};
use crate::group_models::{CompactRegion, GroupElement, GroupError, GroupModel, Neighborhood, Side};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HaarError {
    #[error("no grid point of the approximation lies in the reference region")]
    EmptyReference,
    #[error("invalid test function: {0}")]
    BadFunction(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Approximation(#[from] ApproximationError),
}

/// Test functions on a group model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    Constant { value: f64 },
    /// Raised cosine `height·(1 + cos(π·d/radius))/2` for `d = d(center, x) ≤ radius`.
    Bump { center: GroupElement, radius: f64, height: f64 },
    /// `sin²(2π·x₀)` in the first coordinate.
    Trig,
    /// Value of the nearest sample point (lowest index on ties).
    Sampled { points: Vec<GroupElement>, values: Vec<f64> },
}

impl TestFunction {
    pub fn validate(&self, m: GroupModel) -> Result<(), HaarError> {
        match self {
            TestFunction::Constant { value } if !value.is_finite() => {
                Err(HaarError::BadFunction("constant must be finite".into()))
            }
            TestFunction::Bump { center, radius, height } => {
                m.validate(center)?;
                if !(*radius > 0.0 && radius.is_finite() && height.is_finite()) {
                    return Err(HaarError::BadFunction("bump needs a positive radius".into()));
                }
                Ok(())
            }
            TestFunction::Sampled { points, values } => {
                if points.is_empty() || points.len() != values.len() {
                    return Err(HaarError::BadFunction(
                        "sampled function needs one value per point".into(),
                    ));
                }
                points.iter().try_for_each(|p| m.validate(p))?;
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, m: GroupModel, x: &GroupElement) -> f64 {
        match self {
            TestFunction::Constant { value } => *value,
            TestFunction::Bump { center, radius, height } => {
                let d = m.distance(center, x);
                if d >= *radius {
                    0.0
                } else {
                    height * (1.0 + (PI * d / radius).cos()) / 2.0
                }
            }
            TestFunction::Trig => (2.0 * PI * x.coords()[0]).sin().powi(2),
            TestFunction::Sampled { points, values } => {
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (i, p) in points.iter().enumerate() {
                    let d = m.distance(p, x);
                    if d < best_d {
                        best = i;
                        best_d = d;
                    }
                }
                values[best]
            }
        }
    }

    /// Integral against normalized Haar measure, where known in closed form.
    pub fn analytic_integral(&self, m: GroupModel) -> Option<f64> {
        match (self, m) {
            (TestFunction::Constant { value }, GroupModel::Circle | GroupModel::Torus) => Some(*value),
            (TestFunction::Trig, GroupModel::Circle | GroupModel::Torus) => Some(0.5),
            (TestFunction::Bump { radius, height, .. }, GroupModel::Circle) if *radius <= 0.5 => {
                Some(height * radius)
            }
            _ => None,
        }
    }

    /// Closed-form Lipschitz constant with respect to the model metric, if known.
    pub fn lipschitz_bound(&self) -> Option<f64> {
        match self {
            TestFunction::Constant { .. } => Some(0.0),
            TestFunction::Bump { radius, height, .. } => Some(height.abs() * PI / (2.0 * radius)),
            TestFunction::Trig => Some(2.0 * PI),
            TestFunction::Sampled { .. } => None,
        }
    }

    /// Chart box outside which the function vanishes; `None` for no bound.
    pub fn support(&self, m: GroupModel) -> Result<Option<CompactRegion>, HaarError> {
        match self {
            TestFunction::Bump { center, radius, .. } => {
                let c = m.chart(center);
                let pts: Vec<GroupElement> = (0..1usize << c.len())
                    .map(|mask| {
                        let x: Vec<f64> = c
                            .iter()
                            .enumerate()
                            .map(|(d, &v)| if mask >> d & 1 == 1 { v + radius } else { v - radius })
                            .collect();
                        m.from_chart(&x)
                    })
                    .collect();
                if m.dim() > 1 || m.period(0).is_none() {
                    return Ok(Some(CompactRegion::bounding(m, &pts, 0.0)?));
                }
                let x = c[0];
                Ok(Some(CompactRegion::new(m, vec![[x - radius, x + radius]])?))
            }
            _ => Ok(None),
        }
    }
}

/// Sum of `values` independent of their order: sort, then pairwise tree.
pub fn stable_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    pairwise(values)
}

fn pairwise(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise(&v[..n / 2]) + pairwise(&v[n / 2..]),
    }
}

/// Finite-difference Lipschitz estimate: the largest slope between lattice
/// neighbours of `region` at the given spacing.
pub fn lipschitz_estimate(
    f: &TestFunction,
    m: GroupModel,
    region: &CompactRegion,
    spacing: f64,
) -> Result<f64, HaarError> {
    let pts = m.lattice_points(region, spacing)?;
    let mut worst: f64 = 0.0;
    for p in &pts {
        let c = m.chart(p);
        let fp = f.eval(m, p);
        for d in 0..c.len() {
            let mut x = c.clone();
            x[d] += if m.is_exact() { spacing.floor().max(1.0) } else { spacing };
            let q = m.from_chart(&x);
            let dist = m.distance(p, &q);
            if dist > 0.0 {
                worst = worst.max((f.eval(m, &q) - fp).abs() / dist);
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarEstimate {
    pub value: f64,
    pub delta: f64,
    /// `|j⁻¹(V)|`.
    pub reference_count: usize,
    pub grid_size: usize,
    pub reference_v: CompactRegion,
}

fn reference_count(q: &FiniteLeftQuasigroup, v: &CompactRegion) -> Result<usize, HaarError> {
    let count = q.embedding.iter().filter(|x| v.contains(x)).count();
    if count == 0 {
        return Err(HaarError::EmptyReference);
    }
    Ok(count)
}

fn functional<F>(q: &FiniteLeftQuasigroup, delta: f64, g: F) -> f64
where
    F: Fn(&GroupElement) -> f64,
{
    let mut values: Vec<f64> = q.embedding.iter().map(g).collect();
    delta * stable_sum(&mut values)
}

/// `I(f) = Δ·Σ_h f(j(h))` with `Δ = 1/|{h : j(h) ∈ V}|`.
pub fn estimate_functional(
    q: &FiniteLeftQuasigroup,
    f: &TestFunction,
    v: &CompactRegion,
) -> Result<HaarEstimate, HaarError> {
    let m = v.model();
    f.validate(m)?;
    let count = reference_count(q, v)?;
    let delta = 1.0 / count as f64;
    Ok(HaarEstimate {
        value: functional(q, delta, |x| f.eval(m, x)),
        delta,
        reference_count: count,
        grid_size: q.size(),
        reference_v: v.clone(),
    })
}

/// `I(l_h f) = Δ·Σ_x f(h·j(x))`.
pub fn shifted_functional(
    q: &FiniteLeftQuasigroup,
    f: &TestFunction,
    v: &CompactRegion,
    h: &GroupElement,
) -> Result<f64, HaarError> {
    let m = v.model();
    m.validate(h)?;
    let delta = 1.0 / reference_count(q, v)? as f64;
    Ok(functional(q, delta, |x| f.eval(m, &m.mul(h, x))))
}

/// `5 · U · Lip(f)`.
pub fn default_tolerance(u_radius: f64, lipschitz: f64) -> f64 {
    5.0 * u_radius * lipschitz
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftRow {
    pub shift: GroupElement,
    pub shifted: f64,
    /// `I(f) − I(l_h f)`.
    pub margin: f64,
    pub below_tolerance: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub value: f64,
    pub tolerance: f64,
    pub rows: Vec<ShiftRow>,
}

impl ShiftReport {
    pub fn min_margin(&self) -> f64 {
        self.rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)
    }
}

/// Margins `I(f) − I(l_h f)` for each shift, flagged when below `-tolerance`.
pub fn left_shift_check(
    q: &FiniteLeftQuasigroup,
    f: &TestFunction,
    v: &CompactRegion,
    shifts: &[GroupElement],
    tolerance: f64,
) -> Result<ShiftReport, HaarError> {
    let value = estimate_functional(q, f, v)?.value;
    let rows = shifts
        .iter()
        .map(|h| {
            let shifted = shifted_functional(q, f, v, h)?;
            let margin = value - shifted;
            Ok(ShiftRow { shift: h.clone(), shifted, margin, below_tolerance: margin < -tolerance })
        })
        .collect::<Result<Vec<_>, HaarError>>()?;
    Ok(ShiftReport { value, tolerance, rows })
}

/// `|I(l_h f) − I(f)| / I(f)` per shift.
pub fn invariance_profile(
    q: &FiniteLeftQuasigroup,
    f: &TestFunction,
    v: &CompactRegion,
    shifts: &[GroupElement],
) -> Result<Vec<f64>, HaarError> {
    let base = estimate_functional(q, f, v)?.value;
    shifts
        .iter()
        .map(|h| Ok((shifted_functional(q, f, v, h)? - base).abs() / base.abs()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub value: f64,
    pub sup: f64,
    /// Number of translates `a·V` used to cover the grid points in the support.
    pub translates: usize,
    pub holds: bool,
}

/// Checks `I(f) ≤ C·sup f` where `C` counts translates `a·V` (with `a` taken
/// from the grid) chosen greedily to cover the grid points of `support`.
pub fn boundedness_check(
    q: &FiniteLeftQuasigroup,
    f: &TestFunction,
    v: &CompactRegion,
    support: &CompactRegion,
) -> Result<BoundednessReport, HaarError> {
    let m = v.model();
    let est = estimate_functional(q, f, v)?;
    let pts: Vec<&GroupElement> = q.embedding.iter().filter(|x| support.contains(x)).collect();
    let sup = pts.iter().map(|x| f.eval(m, x)).fold(0.0, f64::max);
    let ref_pts: Vec<&GroupElement> = q.embedding.iter().filter(|x| v.contains(x)).collect();
    // a·V holds p whenever a = p·r⁻¹ for a reference grid point r
    let anchor = ref_pts[ref_pts.len() / 2];
    let anchor_inv = m.inv(anchor);
    let candidates: Vec<GroupElement> = pts.iter().map(|p| m.mul(p, &anchor_inv)).collect();
    let cover: Vec<Vec<usize>> = candidates
        .iter()
        .map(|a| {
            let a_inv = m.inv(a);
            (0..pts.len()).filter(|&i| v.contains(&m.mul(&a_inv, pts[i]))).collect()
        })
        .collect();
    let mut covered = vec![false; pts.len()];
    let mut left = pts.len();
    let mut translates = 0;
    while left > 0 {
        let (best, gain) = cover
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.iter().filter(|&&k| !covered[k]).count()))
            .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if gain == 0 {
            break;
        }
        for &k in &cover[best] {
            covered[k] = true;
        }
        left -= gain;
        translates += 1;
    }
    let holds = est.value <= translates as f64 * sup * (1.0 + 1e-12) + 1e-12;
    Ok(BoundednessReport { value: est.value, sup, translates, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub u_radius: f64,
    pub grid_size: usize,
    pub value: f64,
    pub delta: f64,
    pub margins: Vec<f64>,
}

/// Builds approximations of `c` for each radius in `u_radii` and evaluates
/// `I(f)` and the shift margins on each. `V` defaults to `C`. On the circle
/// the grid spacing equals the radius.
pub fn refinement_sweep(
    c: &CompactRegion,
    side: Side,
    u_radii: &[f64],
    f: &TestFunction,
    v: Option<&CompactRegion>,
    shifts: &[GroupElement],
    opts: BuildOptions,
) -> Result<Vec<SweepRow>, HaarError> {
    let v = v.unwrap_or(c);
    u_radii
        .iter()
        .map(|&u| {
            let problem = ApproximationProblem::new(c.clone(), Neighborhood::new(u)?, side);
            let (q, _) = build_approximation_with(&problem, opts)?;
            let est = estimate_functional(&q, f, v)?;
            let report = left_shift_check(&q, f, v, shifts, 0.0)?;
            Ok(SweepRow {
                u_radius: u,
                grid_size: q.size(),
                value: est.value,
                delta: est.delta,
                margins: report.rows.iter().map(|r| r.margin).collect(),
            })
        })
        .collect()
}
