//! Coordinatized desk-scale models of locally compact groups.
//!
//! Every model exposes its elements through a *chart*: a coordinate vector in
//! which the model metric is the max-norm of coordinate differences, with
//! wraparound on periodic coordinates. For most models the chart is the raw
//! coordinate vector; the affine group uses `(ln a, b)`.
//!
//! Neighborhoods of the unit are metric balls. The translate `gU` is tested as
//! `distance(g⁻¹x, e) <= radius + MEMBERSHIP_SLACK`, see [`GroupModel::left_offset`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use arrayvec::ArrayVec;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest coordinate dimension of any built-in model.
pub const MAX_DIM: usize = 3;

/// Tolerance for the unit and inverse laws of continuous models.
pub const UNIT_TOL: f64 = 1e-9;

/// Slack added to closed-ball membership tests.
pub const MEMBERSHIP_SLACK: f64 = 1e-9;

/// Default cap on the number of points a lattice may contain.
pub const DEFAULT_POINT_CAP: usize = 200_000;

pub type Coords = ArrayVec<f64, MAX_DIM>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("{model}: expected {expected} coordinates, got {got}")]
    DimensionMismatch {
        model: GroupModel,
        expected: usize,
        got: usize,
    },
    #[error("{model}: coordinate {index} has invalid value {value}")]
    InvalidCoordinate {
        model: GroupModel,
        index: usize,
        value: f64,
    },
    #[error("affine element with a = {0} is not invertible")]
    NonInvertible(f64),
    #[error("lattice would hold {count} points, cap is {cap}")]
    CapExceeded { count: usize, cap: usize },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("unknown group model `{0}`")]
    UnknownModel(String),
}

/// Topological type of a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Compact,
    Discrete,
    NoncompactContinuous,
}

/// Which factor a construction treats as the row index.
///
/// `Left` produces left quasigroups (rows permute), `Right` the mirror
/// construction (columns permute).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(format!("side must be `left` or `right`, got `{other}`")),
        }
    }
}

/// A point of a group model, stored in model coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Coords,
}

impl GroupElement {
    /// Panics if more than [`MAX_DIM`] coordinates are given.
    pub fn new(coords: &[f64]) -> Self {
        assert!(coords.len() <= MAX_DIM, "at most {MAX_DIM} coordinates");
        GroupElement {
            coords: coords.iter().copied().collect(),
        }
    }

    pub fn scalar(x: f64) -> Self {
        Self::new(&[x])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Lexicographic order on coordinates.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.coords.iter().zip(other.coords.iter()) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.coords.len().cmp(&other.coords.len())
    }
}

impl From<Coords> for GroupElement {
    fn from(coords: Coords) -> Self {
        GroupElement { coords }
    }
}

/// Built-in group models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GroupModel {
    /// Z_n under addition mod n.
    Cyclic(u32),
    /// Z under addition; regions give the finite windows.
    Integers,
    /// R/Z with coordinates in [0, 1).
    Circle,
    /// (R/Z)², max of wraparound distances.
    Torus,
    /// Maps x ↦ ax + b with a > 0; the product is composition.
    Affine,
    /// Integer upper unitriangular 3×3 matrices, coordinates (x, y, z).
    Heisenberg,
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupModel::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupModel::Integers => f.write_str("integers"),
            GroupModel::Circle => f.write_str("circle"),
            GroupModel::Torus => f.write_str("torus"),
            GroupModel::Affine => f.write_str("affine"),
            GroupModel::Heisenberg => f.write_str("heisenberg"),
        }
    }
}

impl FromStr for GroupModel {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let name = s.trim().to_ascii_lowercase();
        let model = match name.as_str() {
            "integers" | "z" => GroupModel::Integers,
            "circle" => GroupModel::Circle,
            "torus" => GroupModel::Torus,
            "affine" => GroupModel::Affine,
            "heisenberg" => GroupModel::Heisenberg,
            _ => {
                let order = name
                    .strip_prefix("cyclic:")
                    .or_else(|| name.strip_prefix('z'))
                    .and_then(|n| n.parse::<u32>().ok())
                    .filter(|&n| n > 0)
                    .ok_or_else(|| GroupError::UnknownModel(s.to_string()))?;
                GroupModel::Cyclic(order)
            }
        };
        Ok(model)
    }
}

impl TryFrom<String> for GroupModel {
    type Error = GroupError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<GroupModel> for String {
    fn from(m: GroupModel) -> String {
        m.to_string()
    }
}

fn wrap_dist(delta: f64, period: Option<f64>) -> f64 {
    let d = delta.abs();
    match period {
        Some(p) => {
            let d = d.rem_euclid(p);
            d.min(p - d)
        }
        None => d,
    }
}

fn canonical_mod(x: f64, p: f64) -> f64 {
    let r = x.rem_euclid(p);
    // rem_euclid can round up to p for tiny negative inputs
    if r >= p {
        0.0
    } else {
        r
    }
}

impl GroupModel {
    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn dim(&self) -> usize {
        match self {
            GroupModel::Cyclic(_) | GroupModel::Integers | GroupModel::Circle => 1,
            GroupModel::Torus | GroupModel::Affine => 2,
            GroupModel::Heisenberg => 3,
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            GroupModel::Cyclic(_) | GroupModel::Integers | GroupModel::Heisenberg => {
                ModelKind::Discrete
            }
            GroupModel::Circle | GroupModel::Torus => ModelKind::Compact,
            GroupModel::Affine => ModelKind::NoncompactContinuous,
        }
    }

    /// Documentation only; nothing in the crate branches on it.
    pub fn unimodular_flag(&self) -> bool {
        !matches!(self, GroupModel::Affine)
    }

    /// Exact models have integer coordinates and exact arithmetic.
    pub fn is_exact(&self) -> bool {
        self.kind() == ModelKind::Discrete
    }

    /// True when the metric is invariant under both left and right translation.
    pub fn is_bi_invariant(&self) -> bool {
        matches!(
            self,
            GroupModel::Cyclic(_) | GroupModel::Integers | GroupModel::Circle | GroupModel::Torus
        )
    }

    /// True when the whole group is compact.
    pub fn is_compact(&self) -> bool {
        matches!(
            self,
            GroupModel::Cyclic(_) | GroupModel::Circle | GroupModel::Torus
        )
    }

    /// Period of chart coordinate `d`, if it wraps.
    pub fn period(&self, _d: usize) -> Option<f64> {
        match self {
            GroupModel::Cyclic(n) => Some(*n as f64),
            GroupModel::Circle | GroupModel::Torus => Some(1.0),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupModel::Affine => GroupElement::new(&[1.0, 0.0]),
            m => GroupElement::new(&[0.0; MAX_DIM][..m.dim()]),
        }
    }

    fn check_dim(&self, a: &GroupElement) -> Result<(), GroupError> {
        if a.dim() != self.dim() {
            return Err(GroupError::DimensionMismatch {
                model: *self,
                expected: self.dim(),
                got: a.dim(),
            });
        }
        Ok(())
    }

    pub fn validate(&self, a: &GroupElement) -> Result<(), GroupError> {
        self.check_dim(a)?;
        for (index, &value) in a.coords().iter().enumerate() {
            let bad = !value.is_finite()
                || (self.is_exact() && value.fract() != 0.0)
                || (*self == GroupModel::Affine && index == 0 && value <= 0.0);
            if bad {
                return Err(GroupError::InvalidCoordinate {
                    model: *self,
                    index,
                    value,
                });
            }
        }
        Ok(())
    }

    /// Reduces periodic coordinates into their fundamental domain.
    pub fn canonicalize(&self, a: &GroupElement) -> GroupElement {
        let mut c = a.coords.clone();
        for (d, x) in c.iter_mut().enumerate() {
            if let Some(p) = self.period(d) {
                *x = canonical_mod(*x, p);
            }
        }
        GroupElement { coords: c }
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.mul(a, b))
    }

    pub fn invert(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check_dim(a)?;
        if *self == GroupModel::Affine && a.coords()[0] == 0.0 {
            return Err(GroupError::NonInvertible(0.0));
        }
        self.validate(a)?;
        Ok(self.inv(a))
    }

    /// Product of elements already known to be valid.
    pub(crate) fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let (x, y) = (a.coords(), b.coords());
        let c: &[f64] = match self {
            GroupModel::Cyclic(n) => &[canonical_mod(x[0] + y[0], *n as f64)],
            GroupModel::Integers => &[x[0] + y[0]],
            GroupModel::Circle => &[canonical_mod(x[0] + y[0], 1.0)],
            GroupModel::Torus => &[
                canonical_mod(x[0] + y[0], 1.0),
                canonical_mod(x[1] + y[1], 1.0),
            ],
            GroupModel::Affine => &[x[0] * y[0], x[0] * y[1] + x[1]],
            GroupModel::Heisenberg => &[x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1]],
        };
        GroupElement::new(c)
    }

    pub(crate) fn inv(&self, a: &GroupElement) -> GroupElement {
        let x = a.coords();
        let c: &[f64] = match self {
            GroupModel::Cyclic(n) => &[canonical_mod(*n as f64 - x[0], *n as f64)],
            GroupModel::Integers => &[0.0 - x[0]],
            GroupModel::Circle => &[canonical_mod(1.0 - x[0], 1.0)],
            GroupModel::Torus => &[
                canonical_mod(1.0 - x[0], 1.0),
                canonical_mod(1.0 - x[1], 1.0),
            ],
            GroupModel::Affine => &[1.0 / x[0], 0.0 - x[1] / x[0]],
            GroupModel::Heisenberg => &[0.0 - x[0], 0.0 - x[1], x[0] * x[1] - x[2]],
        };
        GroupElement::new(c)
    }

    /// Chart coordinates; the metric is the wrapped max-norm on these.
    pub fn chart(&self, a: &GroupElement) -> Coords {
        let mut c = a.coords.clone();
        if *self == GroupModel::Affine {
            c[0] = c[0].ln();
        }
        c
    }

    pub fn from_chart(&self, c: &[f64]) -> GroupElement {
        let mut e = GroupElement::new(c);
        if *self == GroupModel::Affine {
            e.coords[0] = e.coords[0].exp();
        }
        self.canonicalize(&e)
    }

    /// Model metric. Elements must have the model's dimension.
    pub fn distance(&self, a: &GroupElement, b: &GroupElement) -> f64 {
        debug_assert_eq!(a.dim(), self.dim());
        debug_assert_eq!(b.dim(), self.dim());
        match self {
            GroupModel::Affine => {
                let da = (a.coords()[0].ln() - b.coords()[0].ln()).abs();
                let db = (a.coords()[1] - b.coords()[1]).abs();
                da.max(db)
            }
            _ => a
                .coords()
                .iter()
                .zip(b.coords())
                .enumerate()
                .map(|(d, (x, y))| wrap_dist(x - y, self.period(d)))
                .fold(0.0, f64::max),
        }
    }

    /// Distance of `x` from `g` measured inside the left translate: `d(g⁻¹x, e)`.
    pub fn left_offset(&self, g: &GroupElement, x: &GroupElement) -> f64 {
        if self.is_bi_invariant() {
            return self.distance(g, x);
        }
        self.distance(&self.mul(&self.inv(g), x), &self.identity())
    }

    /// Mirror of [`left_offset`](Self::left_offset): `d(x g⁻¹, e)`.
    pub fn right_offset(&self, g: &GroupElement, x: &GroupElement) -> f64 {
        if self.is_bi_invariant() {
            return self.distance(g, x);
        }
        self.distance(&self.mul(x, &self.inv(g)), &self.identity())
    }

    pub fn offset(&self, side: Side, g: &GroupElement, x: &GroupElement) -> f64 {
        match side {
            Side::Left => self.left_offset(g, x),
            Side::Right => self.right_offset(g, x),
        }
    }

    /// Closed membership `x ∈ gU` for the ball `U` of the given radius.
    pub fn in_translate(&self, g: &GroupElement, x: &GroupElement, radius: f64) -> bool {
        self.left_offset(g, x) <= radius + MEMBERSHIP_SLACK
    }

    /// Chart half-widths of a box around `chart(center)` containing every `x`
    /// with `offset(side, center, x) <= r`.
    pub(crate) fn ball_reach(&self, center: &GroupElement, r: f64, side: Side) -> Coords {
        let c = center.coords();
        let mut w: Coords = (0..self.dim()).map(|_| r).collect();
        match (self, side) {
            (GroupModel::Affine, Side::Left) => w[1] = c[0] * r,
            (GroupModel::Affine, Side::Right) => w[1] = (r.exp() - 1.0) * c[1].abs() + r,
            (GroupModel::Heisenberg, Side::Left) => w[2] = r + c[0].abs() * r,
            (GroupModel::Heisenberg, Side::Right) => w[2] = r + c[1].abs() * r,
            _ => {}
        }
        pad(w)
    }

    /// Chart half-widths of a box around `chart(point)` containing every `g`
    /// with `offset(side, g, point) <= r`.
    pub(crate) fn preimage_reach(&self, point: &GroupElement, r: f64, side: Side) -> Coords {
        let x = point.coords();
        let mut w: Coords = (0..self.dim()).map(|_| r).collect();
        match (self, side) {
            (GroupModel::Affine, Side::Left) => w[1] = x[0] * r.exp() * r,
            (GroupModel::Affine, Side::Right) => {
                w[1] = (r.exp() - 1.0) * x[1].abs() + r.exp() * r
            }
            (GroupModel::Heisenberg, Side::Left) => w[2] = r + r * r + x[0].abs() * r,
            (GroupModel::Heisenberg, Side::Right) => w[2] = r + r * r + x[1].abs() * r,
            _ => {}
        }
        pad(w)
    }

    /// Deterministic lattice covering `region` within `spacing` under
    /// [`distance`](Self::distance), ordered lexicographically.
    pub fn lattice_points(
        &self,
        region: &CompactRegion,
        spacing: f64,
    ) -> Result<Vec<GroupElement>, GroupError> {
        self.lattice_points_capped(region, spacing, DEFAULT_POINT_CAP)
    }

    pub fn lattice_points_capped(
        &self,
        region: &CompactRegion,
        spacing: f64,
        cap: usize,
    ) -> Result<Vec<GroupElement>, GroupError> {
        self.check_region(region)?;
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(GroupError::BadSpacing(spacing));
        }
        let chart_bounds = region.chart_bounds();
        let axes: Vec<Vec<f64>> = chart_bounds
            .iter()
            .enumerate()
            .map(|(d, &(lo, hi))| self.uniform_axis(d, lo, hi, spacing, region.is_full(d)))
            .collect();
        self.assemble(&[axes], cap)
    }

    fn uniform_axis(&self, d: usize, lo: f64, hi: f64, spacing: f64, full: bool) -> Vec<f64> {
        if self.is_exact() {
            let step = spacing.floor().max(1.0);
            if full {
                let p = self.period(d).unwrap_or(0.0);
                return (0..)
                    .map(|k| k as f64 * step)
                    .take_while(|&x| x < p)
                    .collect();
            }
            let (lo, hi) = (lo.ceil(), hi.floor());
            let mut v: Vec<f64> = (0..)
                .map(|k| lo + k as f64 * step)
                .take_while(|&x| x <= hi)
                .collect();
            if v.last() != Some(&hi) {
                v.push(hi);
            }
            return v;
        }
        if full {
            let p = self.period(d).unwrap_or(1.0);
            let m = ((p / spacing) - 1e-9).ceil().max(1.0) as usize;
            return (0..m).map(|i| lo + i as f64 * p / m as f64).collect();
        }
        let width = hi - lo;
        if width <= 0.0 {
            return vec![lo];
        }
        let m = ((width / spacing) - 1e-9).ceil().max(1.0) as usize;
        (0..=m).map(|i| lo + width * i as f64 / m as f64).collect()
    }

    /// Lattice anchored at the identity whose `side`-translates of the
    /// radius-`r` ball cover `region`.
    ///
    /// Products of lattice points land on (or next to) lattice points, which
    /// is what makes row/column matchings feasible downstream.
    pub fn covering_lattice(
        &self,
        region: &CompactRegion,
        r: f64,
        side: Side,
        cap: usize,
    ) -> Result<Vec<GroupElement>, GroupError> {
        self.check_region(region)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(GroupError::BadSpacing(r));
        }
        let chart_bounds = region.chart_bounds();
        if *self == GroupModel::Affine {
            return self.affine_covering_lattice(&chart_bounds, r, side, cap);
        }
        let axes: Vec<Vec<f64>> = chart_bounds
            .iter()
            .enumerate()
            .map(|(d, &(lo, hi))| {
                let full = region.is_full(d);
                let step = match self {
                    GroupModel::Cyclic(n) => largest_divisor_at_most(*n, (2.0 * r).floor()) as f64,
                    GroupModel::Integers => (2.0 * r).floor().max(1.0),
                    GroupModel::Heisenberg => 1.0,
                    _ => {
                        let p = self.period(d).unwrap_or(1.0);
                        p / ((p / (2.0 * r)) - 1e-9).ceil().max(1.0)
                    }
                };
                anchored_axis(lo, hi, step, if full { self.period(d) } else { None })
            })
            .collect();
        self.assemble(&[axes], cap)
    }

    fn affine_covering_lattice(
        &self,
        chart_bounds: &[(f64, f64)],
        r: f64,
        side: Side,
        cap: usize,
    ) -> Result<Vec<GroupElement>, GroupError> {
        let step = 2.0 * r;
        let (llo, lhi) = chart_bounds[0];
        let (blo, bhi) = chart_bounds[1];
        let levels = anchored_axis(llo, lhi, step, None);
        let mut blocks = Vec::with_capacity(levels.len());
        let mut total = 0usize;
        for &level in &levels {
            let bvals = match side {
                // b spacing scales with a so that left translates keep density
                Side::Left => anchored_axis(blo, bhi, level.exp() * step, None),
                Side::Right => {
                    let t = step * (-r).exp();
                    let (e_lo, e_hi) = (r.exp(), (-r).exp());
                    let lo = (blo * e_lo).min(blo * e_hi);
                    let hi = (bhi * e_lo).max(bhi * e_hi);
                    anchored_axis(lo, hi, t, None)
                }
            };
            total = total.saturating_add(bvals.len());
            if total > cap {
                return Err(GroupError::CapExceeded { count: total, cap });
            }
            blocks.push(vec![vec![level], bvals]);
        }
        self.assemble(&blocks, cap)
    }

    /// Cartesian products of per-axis chart values, converted, sorted, deduplicated.
    fn assemble(&self, blocks: &[Vec<Vec<f64>>], cap: usize) -> Result<Vec<GroupElement>, GroupError> {
        let count = blocks
            .iter()
            .map(|axes| axes.iter().map(Vec::len).fold(1usize, usize::saturating_mul))
            .fold(0usize, usize::saturating_add);
        if count > cap {
            return Err(GroupError::CapExceeded { count, cap });
        }
        let mut out = Vec::with_capacity(count);
        for axes in blocks {
            if axes.iter().any(Vec::is_empty) {
                continue;
            }
            let mut idx = vec![0usize; axes.len()];
            'odometer: loop {
                let c: Coords = idx.iter().zip(axes).map(|(&i, ax)| ax[i]).collect();
                out.push(self.from_chart(&c));
                let mut d = axes.len();
                loop {
                    if d == 0 {
                        break 'odometer;
                    }
                    d -= 1;
                    idx[d] += 1;
                    if idx[d] < axes[d].len() {
                        break;
                    }
                    idx[d] = 0;
                }
            }
        }
        out.sort_by(GroupElement::lex_cmp);
        out.dedup_by(|a, b| a.lex_cmp(b) == Ordering::Equal);
        Ok(out)
    }

    fn check_region(&self, region: &CompactRegion) -> Result<(), GroupError> {
        if region.model != *self {
            return Err(GroupError::InvalidRegion(format!(
                "region belongs to {}, not {}",
                region.model, self
            )));
        }
        Ok(())
    }

    /// Uniform random point of `region` (uniform in chart coordinates).
    pub fn sample_region<R: Rng + ?Sized>(&self, region: &CompactRegion, rng: &mut R) -> GroupElement {
        let c: Coords = region
            .chart_bounds()
            .iter()
            .enumerate()
            .map(|(d, &(lo, hi))| {
                if self.is_exact() {
                    let (lo, hi) = if region.is_full(d) {
                        (0.0, self.period(d).unwrap() - 1.0)
                    } else {
                        (lo.ceil(), hi.floor())
                    };
                    rng.gen_range(lo as i64..=hi as i64) as f64
                } else if hi > lo {
                    rng.gen_range(lo..=hi)
                } else {
                    lo
                }
            })
            .collect();
        self.from_chart(&c)
    }

    /// Random point of the closed ball of radius `r` about the identity.
    pub fn sample_ball<R: Rng + ?Sized>(&self, r: f64, rng: &mut R) -> GroupElement {
        let e = self.chart(&self.identity());
        let c: Coords = e
            .iter()
            .map(|&x| {
                if self.is_exact() {
                    let k = r.floor() as i64;
                    x + rng.gen_range(-k..=k) as f64
                } else {
                    x + rng.gen_range(-r..=r)
                }
            })
            .collect();
        self.from_chart(&c)
    }

    /// The corners of the chart box of the radius-`r` ball about the identity.
    pub fn ball_corners(&self, r: f64) -> Vec<GroupElement> {
        let e = self.chart(&self.identity());
        let r = if self.is_exact() { r.floor() } else { r };
        let dim = self.dim();
        (0..1usize << dim)
            .map(|mask| {
                let c: Coords = (0..dim)
                    .map(|d| if mask >> d & 1 == 1 { e[d] + r } else { e[d] - r })
                    .collect();
                self.from_chart(&c)
            })
            .collect()
    }
}

fn pad(mut w: Coords) -> Coords {
    for x in w.iter_mut() {
        *x = *x * (1.0 + 1e-6) + 1e-9;
    }
    w
}

fn largest_divisor_at_most(n: u32, bound: f64) -> u32 {
    let bound = bound.max(1.0).min(n as f64) as u32;
    (1..=bound).rev().find(|d| n % d == 0).unwrap_or(1)
}

/// Multiples of `step` covering `[lo, hi]` to within `step / 2`.
fn anchored_axis(lo: f64, hi: f64, step: f64, period: Option<f64>) -> Vec<f64> {
    if let Some(p) = period {
        let m = (p / step).round().max(1.0) as usize;
        return (0..m).map(|k| k as f64 * step).collect();
    }
    let k_lo = (lo / step).floor() as i64;
    let k_hi = (hi / step).ceil() as i64;
    (k_lo..=k_hi).map(|k| k as f64 * step).collect()
}

/// A compact coordinate box of a model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactRegion {
    model: GroupModel,
    bounds: Vec<[f64; 2]>,
}

impl CompactRegion {
    pub fn new(model: GroupModel, bounds: Vec<[f64; 2]>) -> Result<Self, GroupError> {
        if bounds.len() != model.dim() {
            return Err(GroupError::InvalidRegion(format!(
                "{model} needs {} intervals, got {}",
                model.dim(),
                bounds.len()
            )));
        }
        for (d, &[lo, hi]) in bounds.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(GroupError::InvalidRegion(format!(
                    "interval {d} = [{lo}, {hi}] is not a finite nonempty interval"
                )));
            }
            if model == GroupModel::Affine && d == 0 && lo <= 0.0 {
                return Err(GroupError::InvalidRegion(
                    "affine a-interval must be positive".into(),
                ));
            }
            if model.is_exact() && lo.ceil() > hi.floor() {
                return Err(GroupError::InvalidRegion(format!(
                    "interval {d} = [{lo}, {hi}] holds no integer"
                )));
            }
        }
        Ok(CompactRegion { model, bounds })
    }

    /// The whole group, for compact models.
    pub fn whole(model: GroupModel) -> Option<Self> {
        let b = match model {
            GroupModel::Cyclic(n) => vec![[0.0, n as f64 - 1.0]],
            GroupModel::Circle => vec![[0.0, 1.0]],
            GroupModel::Torus => vec![[0.0, 1.0]; 2],
            _ => return None,
        };
        Some(CompactRegion { model, bounds: b })
    }

    pub fn point(model: GroupModel, p: &GroupElement) -> Result<Self, GroupError> {
        model.validate(p)?;
        Self::new(model, p.coords().iter().map(|&x| [x, x]).collect())
    }

    pub fn model(&self) -> GroupModel {
        self.model
    }

    pub fn bounds(&self) -> &[[f64; 2]] {
        &self.bounds
    }

    /// Whether coordinate `d` spans its whole period.
    pub fn is_full(&self, d: usize) -> bool {
        match self.model.period(d) {
            Some(p) => {
                let [lo, hi] = self.bounds[d];
                if self.model.is_exact() {
                    hi - lo >= p - 1.0
                } else {
                    hi - lo >= p - 1e-12
                }
            }
            None => false,
        }
    }

    pub fn chart_bounds(&self) -> Vec<(f64, f64)> {
        self.bounds
            .iter()
            .enumerate()
            .map(|(d, &[lo, hi])| {
                if self.model == GroupModel::Affine && d == 0 {
                    (lo.ln(), hi.ln())
                } else {
                    (lo, hi)
                }
            })
            .collect()
    }

    /// Closed membership with [`MEMBERSHIP_SLACK`].
    pub fn contains(&self, x: &GroupElement) -> bool {
        if x.dim() != self.model.dim() {
            return false;
        }
        x.coords().iter().enumerate().all(|(d, &v)| {
            let [lo, hi] = self.bounds[d];
            match self.model.period(d) {
                Some(p) => {
                    self.is_full(d)
                        || (v - lo).rem_euclid(p) <= hi - lo + MEMBERSHIP_SLACK
                        || (v - lo).rem_euclid(p) >= p - MEMBERSHIP_SLACK
                }
                None => v >= lo - MEMBERSHIP_SLACK && v <= hi + MEMBERSHIP_SLACK,
            }
        })
    }

    /// Smallest region of `model` whose chart box contains all `points`,
    /// widened by `margin` chart units. Periodic coordinates become full.
    pub fn bounding(model: GroupModel, points: &[GroupElement], margin: f64) -> Result<Self, GroupError> {
        if points.is_empty() {
            return Err(GroupError::InvalidRegion("no points to bound".into()));
        }
        let dim = model.dim();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in points {
            for (d, &x) in model.chart(p).iter().enumerate() {
                lo[d] = lo[d].min(x);
                hi[d] = hi[d].max(x);
            }
        }
        let bounds = (0..dim)
            .map(|d| {
                if let Some(p) = model.period(d) {
                    return if model.is_exact() { [0.0, p - 1.0] } else { [0.0, p] };
                }
                let (mut l, mut h) = (lo[d] - margin, hi[d] + margin);
                if model.is_exact() {
                    l = l.ceil().min(lo[d]);
                    h = h.floor().max(hi[d]);
                }
                if model == GroupModel::Affine && d == 0 {
                    [l.exp(), h.exp()]
                } else {
                    [l, h]
                }
            })
            .collect();
        Self::new(model, bounds)
    }
}

/// Radius of a neighborhood of the unit realized as a closed metric ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Neighborhood {
    radius: f64,
}

impl Neighborhood {
    pub fn new(radius: f64) -> Result<Self, GroupError> {
        if radius > 0.0 && radius.is_finite() {
            Ok(Neighborhood { radius })
        } else {
            Err(GroupError::BadSpacing(radius))
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl TryFrom<f64> for Neighborhood {
    type Error = GroupError;

    fn try_from(r: f64) -> Result<Self, Self::Error> {
        Neighborhood::new(r)
    }
}

impl From<Neighborhood> for f64 {
    fn from(n: Neighborhood) -> f64 {
        n.radius
    }
}
