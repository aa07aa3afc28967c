//! Finite left (or right) quasigroup `(C, U)`-approximations of group models.
//!
//! Pipeline: [`choose_parameters`] picks a ball `O` with `OO⁻¹ ⊆ U` and a
//! region `K ⊇ C·C ∪ C·U ∪ U·C`; [`build_candidates`] lays an `O`-grid `F`
//! over `K` and records, for grid points `g, h ∈ C`, the candidate products
//! `A_{g,h}` near `g·h`; [`solve_left_quasigroup`] picks each row (columns for
//! the right side) as a system of distinct representatives.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covering::{build_grid_with, CoveringError};
use crate::group_models::{
    CompactRegion, GroupElement, GroupError, GroupModel, Neighborhood, Side, DEFAULT_POINT_CAP,
    MEMBERSHIP_SLACK,
};
use crate::matching::{sdr, HallViolator, SdrResult, SetSystem};
use crate::spatial::ChartIndex;

/// Pairs sampled when checking `OO⁻¹ ⊆ U`.
pub const PARAMETER_SAMPLES: usize = 10_000;
const PARAMETER_SEED: u64 = 0x5eed_0f_0e;
const MAX_HALVINGS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproximationError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Covering(#[from] CoveringError),
    #[error("could not find O with OO⁻¹ inside U after {halvings} halvings (last radius {radius})")]
    NoConvergence { halvings: usize, radius: f64 },
    #[error("{line} {index}: {} candidate sets share only {} elements", .violator.sets.len(), .violator.union.len())]
    HallViolation {
        line: &'static str,
        index: usize,
        violator: HallViolator,
    },
    #[error("Hall's condition still fails after {retries} refinements of O")]
    RetriesExhausted { retries: usize, last: Box<ApproximationError> },
    #[error("problem mixes models: {0}")]
    ModelMismatch(String),
    #[error("malformed table: {0}")]
    BadTable(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximationProblem {
    pub model: GroupModel,
    #[serde(rename = "C")]
    pub c: CompactRegion,
    #[serde(rename = "U")]
    pub u: Neighborhood,
    #[serde(default)]
    pub side: Side,
}

impl ApproximationProblem {
    pub fn new(c: CompactRegion, u: Neighborhood, side: Side) -> Self {
        ApproximationProblem { model: c.model(), c, u, side }
    }

    fn check(&self) -> Result<(), ApproximationError> {
        if self.c.model() != self.model {
            return Err(ApproximationError::ModelMismatch(format!(
                "C belongs to {}, problem to {}",
                self.c.model(),
                self.model
            )));
        }
        Ok(())
    }
}

/// Caps and retry budget for [`build_approximation_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub point_cap: usize,
    pub max_retries: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { point_cap: DEFAULT_POINT_CAP, max_retries: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(rename = "O")]
    pub o: Neighborhood,
    #[serde(rename = "K")]
    pub k: CompactRegion,
}

/// `x·y⁻¹` for the left side, `x⁻¹·y` for the right.
fn quotient(m: GroupModel, side: Side, x: &GroupElement, y: &GroupElement) -> GroupElement {
    match side {
        Side::Left => m.mul(x, &m.inv(y)),
        Side::Right => m.mul(&m.inv(x), y),
    }
}

fn worst_quotient<'a>(
    m: GroupModel,
    side: Side,
    pairs: impl Iterator<Item = (&'a GroupElement, &'a GroupElement)>,
) -> f64 {
    let e = m.identity();
    pairs
        .map(|(x, y)| m.distance(&quotient(m, side, x, y), &e))
        .fold(0.0, f64::max)
}

fn ball_samples(m: GroupModel, r: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<GroupElement> {
    let mut pts = m.ball_corners(r);
    pts.push(m.identity());
    pts.extend((0..count).map(|_| m.sample_ball(r, rng)));
    pts
}

/// Chooses `O` and `K`. For bi-invariant metrics `O` has radius `U/2`.
/// Otherwise `U/2` is divided by twice the observed distortion of `OO⁻¹`
/// when that exceeds one, and halved until `PARAMETER_SAMPLES` sampled pairs
/// from `O` satisfy `d(xy⁻¹, e) ≤ U`.
pub fn choose_parameters(p: &ApproximationProblem) -> Result<Parameters, ApproximationError> {
    p.check()?;
    let m = p.model;
    let u = p.u.radius();
    let mut rho = u / 2.0;
    if !m.is_bi_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(PARAMETER_SEED);
        let pts = ball_samples(m, rho, 1000, &mut rng);
        let worst = worst_quotient(m, p.side, pts.iter().flat_map(|x| pts.iter().map(move |y| (x, y))));
        let distortion = worst / (2.0 * rho);
        if distortion > 1.0 {
            rho /= 2.0 * distortion;
        }
        let mut halvings = 0;
        loop {
            let xs = ball_samples(m, rho, PARAMETER_SAMPLES, &mut rng);
            let ys = ball_samples(m, rho, PARAMETER_SAMPLES, &mut rng);
            let corners = m.ball_corners(rho);
            let pairs = xs
                .iter()
                .zip(&ys)
                .chain(corners.iter().flat_map(|x| corners.iter().map(move |y| (x, y))));
            if worst_quotient(m, p.side, pairs) <= u + MEMBERSHIP_SLACK {
                break;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(ApproximationError::NoConvergence { halvings, radius: rho });
            }
            rho /= 2.0;
        }
    }
    let k = product_region(p, rho)?;
    Ok(Parameters { o: Neighborhood::new(rho)?, k })
}

/// Chart-box corners of `C` together with its centre.
fn region_corners(c: &CompactRegion) -> Vec<GroupElement> {
    let m = c.model();
    let b = c.chart_bounds();
    let dim = b.len();
    let mut pts: Vec<GroupElement> = (0..1usize << dim)
        .map(|mask| {
            let x: Vec<f64> = (0..dim)
                .map(|d| if mask >> d & 1 == 1 { b[d].1 } else { b[d].0 })
                .collect();
            m.from_chart(&x)
        })
        .collect();
    let mid: Vec<f64> = b.iter().map(|&(lo, hi)| (lo + hi) / 2.0).collect();
    let mut mid = m.from_chart(&mid);
    if m.is_exact() {
        let rounded: Vec<f64> = mid.coords().iter().map(|x| x.round()).collect();
        mid = GroupElement::new(&rounded);
    }
    pts.push(mid);
    pts
}

/// Bounding region of `C·C ∪ C·U ∪ U·C`, widened by `rho`. Products of
/// chart boxes are extremal at corners for every built-in model.
fn product_region(p: &ApproximationProblem, rho: f64) -> Result<CompactRegion, ApproximationError> {
    let m = p.model;
    let mut c = region_corners(&p.c);
    if let Ok(coarse) = m.lattice_points_capped(&p.c, p.u.radius().max(1e-3) * 4.0, 4096) {
        c.extend(coarse);
    }
    let mut u = m.ball_corners(p.u.radius());
    u.push(m.identity());
    let mut pts = Vec::with_capacity(c.len() * (c.len() + 2 * u.len()));
    for x in &c {
        pts.extend(c.iter().map(|y| m.mul(x, y)));
        for y in &u {
            pts.push(m.mul(x, y));
            pts.push(m.mul(y, x));
        }
    }
    Ok(CompactRegion::bounding(m, &pts, rho)?)
}

/// Grid `F` and the candidate sets `A_{g,h}`. Only pairs of grid points in
/// `C` carry a restricted set; every other pair implicitly has `A = F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateFamily {
    pub model: GroupModel,
    pub side: Side,
    pub o_radius: f64,
    pub grid: Vec<GroupElement>,
    /// Indices into `grid` of the points lying in `C`, ascending.
    pub core: Vec<usize>,
    /// Restricted sets for `(core[a], core[b])` at `a * core.len() + b`, as CSR.
    offsets: Vec<usize>,
    items: Vec<u32>,
    /// `offset(side, gh, f)` for each item.
    dist: Vec<f64>,
}

impl CandidateFamily {
    /// A family with explicit restricted sets, indexed like `core × core`.
    pub fn from_sets(
        model: GroupModel,
        side: Side,
        grid: Vec<GroupElement>,
        core: Vec<usize>,
        sets: Vec<Vec<usize>>,
    ) -> Result<Self, ApproximationError> {
        let n = grid.len();
        if core.windows(2).any(|w| w[0] >= w[1]) || core.last().is_some_and(|&c| c >= n) {
            return Err(ApproximationError::BadTable("core must be ascending grid indices".into()));
        }
        if sets.len() != core.len() * core.len() {
            return Err(ApproximationError::BadTable(format!(
                "expected {} candidate sets, got {}",
                core.len() * core.len(),
                sets.len()
            )));
        }
        let mut offsets = vec![0];
        let mut items = Vec::new();
        for mut s in sets {
            s.sort_unstable();
            s.dedup();
            if s.last().is_some_and(|&f| f >= n) {
                return Err(ApproximationError::BadTable("candidate outside grid".into()));
            }
            items.extend(s.into_iter().map(|f| f as u32));
            offsets.push(items.len());
        }
        let dist = vec![0.0; items.len()];
        Ok(CandidateFamily { model, side, o_radius: 0.0, grid, core, offsets, items, dist })
    }

    pub fn grid_size(&self) -> usize {
        self.grid.len()
    }

    /// Restricted set for grid points `g, h`, or `None` when it is all of `F`.
    pub fn set(&self, g: usize, h: usize) -> Option<&[u32]> {
        let a = self.core.binary_search(&g).ok()?;
        let b = self.core.binary_search(&h).ok()?;
        Some(self.pair(a, b))
    }

    fn pair(&self, a: usize, b: usize) -> &[u32] {
        let k = a * self.core.len() + b;
        &self.items[self.offsets[k]..self.offsets[k + 1]]
    }

    /// Members of the restricted set within `O` of `gh`.
    fn tight_pair(&self, a: usize, b: usize) -> Vec<usize> {
        let k = a * self.core.len() + b;
        let range = self.offsets[k]..self.offsets[k + 1];
        self.items[range.clone()]
            .iter()
            .zip(&self.dist[range])
            .filter(|(_, &d)| d <= self.o_radius + MEMBERSHIP_SLACK)
            .map(|(&f, _)| f as usize)
            .collect()
    }
}

/// Grid over `K` and candidate sets
/// `A_{g,h} = {f : offset(gh, f) ≤ 2·O} ∩ {f : f ∈ ghU}` for `g, h ∈ C ∩ F`.
/// For the left side the second condition follows from the first.
pub fn build_candidates(
    p: &ApproximationProblem,
    o: Neighborhood,
    k: &CompactRegion,
    cap: usize,
) -> Result<CandidateFamily, ApproximationError> {
    p.check()?;
    let m = p.model;
    let cover = build_grid_with(m, k, o, p.side, cap)?;
    let grid = cover.centers;
    let core: Vec<usize> = (0..grid.len()).filter(|&i| p.c.contains(&grid[i])).collect();
    let reach = 2.0 * o.radius() + MEMBERSHIP_SLACK;
    let u = p.u.radius();
    let index = ChartIndex::new(m, &grid, reach);
    let rows: Vec<Vec<Vec<(u32, f64)>>> = core
        .par_iter()
        .map(|&g| {
            core.iter()
                .map(|&h| {
                    let gh = m.mul(&grid[g], &grid[h]);
                    let half = m.ball_reach(&gh, reach, p.side);
                    index
                        .candidates(&gh, &half)
                        .into_iter()
                        .filter_map(|f| {
                            let x = &grid[f as usize];
                            let d = m.offset(p.side, &gh, x);
                            (d <= reach && m.in_translate(&gh, x, u)).then_some((f, d))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut offsets = Vec::with_capacity(core.len() * core.len() + 1);
    offsets.push(0);
    let mut items = Vec::new();
    let mut dist = Vec::new();
    for set in rows.into_iter().flatten() {
        for (f, d) in set {
            items.push(f);
            dist.push(d);
        }
        offsets.push(items.len());
    }
    Ok(CandidateFamily {
        model: m,
        side: p.side,
        o_radius: o.radius(),
        grid,
        core,
        offsets,
        items,
        dist,
    })
}

/// Finite carrier `0..n` with an operation table and an embedding `j` into
/// the model. Rows permute for [`Side::Left`], columns for [`Side::Right`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteLeftQuasigroup {
    pub side: Side,
    pub table: Vec<Vec<u32>>,
    pub embedding: Vec<GroupElement>,
}

/// Where a table stops being a left (or right) quasigroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationFailure {
    pub line: String,
    pub index: usize,
    pub symbol: u32,
}

impl FiniteLeftQuasigroup {
    /// Checks shape and entry range only; the quasigroup law is left to
    /// [`verify_approximation`] so that corrupted tables can be diagnosed.
    pub fn new(side: Side, table: Vec<Vec<u32>>, embedding: Vec<GroupElement>) -> Result<Self, ApproximationError> {
        let n = table.len();
        if embedding.len() != n {
            return Err(ApproximationError::BadTable(format!(
                "table has {n} rows but embedding has {} points",
                embedding.len()
            )));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(ApproximationError::BadTable(format!("row {i} has {} entries", row.len())));
            }
            if let Some(&s) = row.iter().find(|&&s| s as usize >= n) {
                return Err(ApproximationError::BadTable(format!("row {i} holds {s} >= {n}")));
            }
        }
        Ok(FiniteLeftQuasigroup { side, table, embedding })
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn get(&self, a: usize, b: usize) -> usize {
        self.table[a][b] as usize
    }

    /// The `x` with `a ⊙ x = b`.
    pub fn left_divide(&self, b: usize, a: usize) -> Option<usize> {
        self.table[a].iter().position(|&s| s as usize == b)
    }

    /// The `x` with `x ⊙ a = b`.
    pub fn right_divide(&self, b: usize, a: usize) -> Option<usize> {
        self.table.iter().position(|row| row[a] as usize == b)
    }

    /// First row (left side) or column (right side) that is not a permutation.
    pub fn permutation_failure(&self) -> Option<PermutationFailure> {
        let n = self.size();
        for i in 0..n {
            let mut seen = vec![false; n];
            for k in 0..n {
                let s = match self.side {
                    Side::Left => self.table[i][k],
                    Side::Right => self.table[k][i],
                };
                if std::mem::replace(&mut seen[s as usize], true) {
                    let line = match self.side {
                        Side::Left => "row",
                        Side::Right => "column",
                    };
                    return Some(PermutationFailure { line: line.into(), index: i, symbol: s });
                }
            }
        }
        None
    }
}

/// Solves every row (left) or column (right) whose index lies in `C` by an
/// SDR over its restricted candidate sets, then hands the unused grid points
/// to the unrestricted cells in increasing order. Each line first tries the
/// candidates within `O` of the true product and widens to the full sets
/// only when those violate Hall's condition.
pub fn solve_left_quasigroup(cf: &CandidateFamily) -> Result<FiniteLeftQuasigroup, ApproximationError> {
    let n = cf.grid_size();
    let m = cf.core.len();
    let line = match cf.side {
        Side::Left => "row",
        Side::Right => "column",
    };
    let lines: Vec<Result<Vec<u32>, ApproximationError>> = (0..n)
        .into_par_iter()
        .map(|g| {
            let mut out = vec![u32::MAX; n];
            let mut used = vec![false; n];
            if let Ok(a) = cf.core.binary_search(&g) {
                let key = |b| match cf.side {
                    Side::Left => (a, b),
                    Side::Right => (b, a),
                };
                let tight = (0..m).map(|b| cf.tight_pair(key(b).0, key(b).1)).collect();
                let tight = SetSystem::new(n, tight).expect("candidates lie in the grid");
                let full = || {
                    let sets = (0..m)
                        .map(|b| cf.pair(key(b).0, key(b).1).iter().map(|&f| f as usize).collect())
                        .collect();
                    sdr(&SetSystem::new(n, sets).expect("candidates lie in the grid"))
                };
                let result = match sdr(&tight) {
                    reps @ SdrResult::Representatives(_) => reps,
                    SdrResult::Violator(_) => full(),
                };
                match result {
                    SdrResult::Representatives(reps) => {
                        for (b, f) in reps.into_iter().enumerate() {
                            out[cf.core[b]] = f as u32;
                            used[f] = true;
                        }
                    }
                    SdrResult::Violator(v) => {
                        let violator = HallViolator {
                            sets: v.sets.iter().map(|&b| cf.core[b]).collect(),
                            union: v.union,
                        };
                        return Err(ApproximationError::HallViolation { line, index: g, violator });
                    }
                }
            }
            let mut free = (0..n).filter(|&f| !used[f]);
            for slot in out.iter_mut().filter(|s| **s == u32::MAX) {
                *slot = free.next().expect("as many free points as open cells") as u32;
            }
            Ok(out)
        })
        .collect();
    let lines = lines.into_iter().collect::<Result<Vec<_>, _>>()?;
    let table = match cf.side {
        Side::Left => lines,
        Side::Right => (0..n).map(|a| (0..n).map(|b| lines[b][a]).collect()).collect(),
    };
    Ok(FiniteLeftQuasigroup { side: cf.side, table, embedding: cf.grid.clone() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectWitness {
    pub x: usize,
    pub y: usize,
    pub product: usize,
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximationReport {
    pub grid_size: usize,
    /// Largest distance from a sample of `C` to the nearest translate `j(h)U` centre.
    pub grid_defect: f64,
    /// Largest `d((j(x)j(y))⁻¹ j(x⊙y), e)` over qualifying pairs.
    pub hom_defect: f64,
    pub qualifying_pairs: u64,
    pub retries: usize,
    pub o_radius: Option<f64>,
    pub worst_pair: Option<DefectWitness>,
    pub permutation_failure: Option<PermutationFailure>,
    pub pass: bool,
}

/// Checks the grid condition on a lattice of `C` with spacing `U/4` and the
/// homomorphism condition on every pair `x, y` with `j(x), j(y), j(x)j(y)`
/// in `C`.
pub fn verify_approximation(
    q: &FiniteLeftQuasigroup,
    p: &ApproximationProblem,
) -> Result<ApproximationReport, ApproximationError> {
    p.check()?;
    let m = p.model;
    let u = p.u.radius();
    let n = q.size();
    for e in &q.embedding {
        m.validate(e)?;
    }

    let samples = m.lattice_points(&p.c, u / 4.0)?;
    let index = ChartIndex::new(m, &q.embedding, u);
    let grid_defect = samples
        .par_iter()
        .map(|c| {
            let half = m.preimage_reach(c, u, Side::Left);
            let near = index
                .candidates(c, &half)
                .into_iter()
                .map(|h| m.left_offset(&q.embedding[h as usize], c))
                .fold(f64::INFINITY, f64::min);
            if near <= u + MEMBERSHIP_SLACK {
                near
            } else {
                q.embedding.iter().map(|h| m.left_offset(h, c)).fold(f64::INFINITY, f64::min)
            }
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max);

    let in_c: Vec<usize> = (0..n).filter(|&i| p.c.contains(&q.embedding[i])).collect();
    let per_row: Vec<(u64, Option<DefectWitness>)> = in_c
        .par_iter()
        .map(|&x| {
            let mut count = 0;
            let mut worst: Option<DefectWitness> = None;
            for &y in &in_c {
                let prod = m.mul(&q.embedding[x], &q.embedding[y]);
                if !p.c.contains(&prod) {
                    continue;
                }
                count += 1;
                let z = q.get(x, y);
                let defect = m.left_offset(&prod, &q.embedding[z]);
                if worst.as_ref().map_or(true, |w| defect > w.defect) {
                    worst = Some(DefectWitness { x, y, product: z, defect });
                }
            }
            (count, worst)
        })
        .collect();
    let qualifying_pairs = per_row.iter().map(|r| r.0).sum();
    let worst_pair = per_row
        .into_iter()
        .filter_map(|r| r.1)
        .fold(None, |acc: Option<DefectWitness>, w| match acc {
            Some(a) if a.defect.total_cmp(&w.defect) != Ordering::Less => Some(a),
            _ => Some(w),
        });
    let hom_defect = worst_pair.as_ref().map_or(0.0, |w| w.defect);
    let permutation_failure = q.permutation_failure();
    let pass = grid_defect <= u + MEMBERSHIP_SLACK
        && hom_defect <= u + MEMBERSHIP_SLACK
        && permutation_failure.is_none();
    Ok(ApproximationReport {
        grid_size: n,
        grid_defect,
        hom_defect,
        qualifying_pairs,
        retries: 0,
        o_radius: None,
        worst_pair,
        permutation_failure,
        pass,
    })
}

pub fn build_approximation(
    p: &ApproximationProblem,
) -> Result<(FiniteLeftQuasigroup, ApproximationReport), ApproximationError> {
    build_approximation_with(p, BuildOptions::default())
}

/// Full pipeline; on a Hall violation `O` is halved (keeping `K`) up to
/// `max_retries` times. The report is computed by [`verify_approximation`].
pub fn build_approximation_with(
    p: &ApproximationProblem,
    opts: BuildOptions,
) -> Result<(FiniteLeftQuasigroup, ApproximationReport), ApproximationError> {
    let params = choose_parameters(p)?;
    let mut rho = params.o.radius();
    let mut retries = 0;
    loop {
        let cf = build_candidates(p, Neighborhood::new(rho)?, &params.k, opts.point_cap)?;
        match solve_left_quasigroup(&cf) {
            Ok(q) => {
                let mut report = verify_approximation(&q, p)?;
                report.retries = retries;
                report.o_radius = Some(rho);
                return Ok((q, report));
            }
            Err(e @ ApproximationError::HallViolation { .. }) => {
                if retries == opts.max_retries {
                    return Err(ApproximationError::RetriesExhausted { retries, last: Box::new(e) });
                }
                retries += 1;
                rho /= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_problem(u: f64) -> ApproximationProblem {
        let m = GroupModel::Circle;
        ApproximationProblem::new(CompactRegion::whole(m).unwrap(), Neighborhood::new(u).unwrap(), Side::Left)
    }

    fn affine_problem(side: Side) -> ApproximationProblem {
        let c = CompactRegion::new(GroupModel::Affine, vec![[0.5, 2.0], [-1.0, 1.0]]).unwrap();
        ApproximationProblem::new(c, Neighborhood::new(0.2).unwrap(), side)
    }

    #[test]
    fn parameter_examples() {
        let p = choose_parameters(&circle_problem(0.2)).unwrap();
        assert_eq!(p.o.radius(), 0.1);
        assert!(p.k.is_full(0));

        let m = GroupModel::Integers;
        let c = CompactRegion::new(m, vec![[-3.0, 3.0]]).unwrap();
        let p = choose_parameters(&ApproximationProblem::new(c, Neighborhood::new(0.5).unwrap(), Side::Left)).unwrap();
        assert_eq!(p.o.radius(), 0.25);
        assert_eq!(p.k.bounds(), &[[-6.0, 6.0]]);
    }

    #[test]
    fn affine_parameters_pass_monte_carlo() {
        use rand::SeedableRng;
        for side in [Side::Left, Side::Right] {
            let prob = affine_problem(side);
            let p = choose_parameters(&prob).unwrap();
            let rho = p.o.radius();
            assert!(rho < 0.1);
            let m = GroupModel::Affine;
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let e = m.identity();
            for _ in 0..10_000 {
                let x = m.sample_ball(rho, &mut rng);
                let y = m.sample_ball(rho, &mut rng);
                // x·y⁻¹ computed by composing affine maps directly
                let (a1, b1) = (x.coords()[0], x.coords()[1]);
                let (a2, b2) = (y.coords()[0], y.coords()[1]);
                let q = match side {
                    Side::Left => GroupElement::new(&[a1 / a2, b1 - a1 * b2 / a2]),
                    Side::Right => GroupElement::new(&[a2 / a1, (b2 - b1) / a1]),
                };
                assert!(m.distance(&q, &e) <= 0.2 + 1e-9);
            }
            for corner in [[0.5, -1.0], [2.0, 1.0], [0.5, 1.0], [2.0, -1.0]] {
                let g = GroupElement::new(&corner);
                assert!(p.k.contains(&m.mul(&g, &g)));
            }
        }
    }

    #[test]
    fn circle_candidates_contain_nearest_point() {
        let prob = circle_problem(0.2);
        let params = choose_parameters(&prob).unwrap();
        let cf = build_candidates(&prob, params.o, &params.k, DEFAULT_POINT_CAP).unwrap();
        let m = GroupModel::Circle;
        for &g in &cf.core {
            for &h in &cf.core {
                let gh = m.mul(&cf.grid[g], &cf.grid[h]);
                let nearest = (0..cf.grid_size())
                    .min_by(|&a, &b| m.distance(&cf.grid[a], &gh).total_cmp(&m.distance(&cf.grid[b], &gh)))
                    .unwrap();
                assert!(cf.set(g, h).unwrap().contains(&(nearest as u32)));
            }
        }
    }

    #[test]
    fn unrestricted_pairs_default_to_grid() {
        let m = GroupModel::Integers;
        let c = CompactRegion::new(m, vec![[0.0, 1.0]]).unwrap();
        let prob = ApproximationProblem::new(c, Neighborhood::new(0.5).unwrap(), Side::Left);
        let params = choose_parameters(&prob).unwrap();
        let cf = build_candidates(&prob, params.o, &params.k, DEFAULT_POINT_CAP).unwrap();
        let outside = (0..cf.grid_size()).find(|i| !cf.core.contains(i)).unwrap();
        assert_eq!(cf.set(outside, cf.core[0]), None);
        assert_eq!(cf.set(cf.core[1], cf.core[1]).unwrap().len(), 1);
    }

    #[test]
    fn cyclic_groups_are_reproduced_exactly() {
        let m = GroupModel::Cyclic(12);
        let prob = ApproximationProblem::new(CompactRegion::whole(m).unwrap(), Neighborhood::new(0.4).unwrap(), Side::Left);
        let (q, report) = build_approximation(&prob).unwrap();
        assert!(report.pass);
        assert_eq!(report.hom_defect, 0.0);
        for a in 0..12 {
            for b in 0..12 {
                let want = m.mul(&q.embedding[a], &q.embedding[b]);
                assert_eq!(q.embedding[q.get(a, b)], want);
            }
        }
    }

    #[test]
    fn circle_pipeline_passes() {
        let prob = circle_problem(0.2);
        let (q, report) = build_approximation(&prob).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.grid_defect <= 0.2);
        assert_eq!(q.permutation_failure(), None);
        for a in 0..q.size() {
            for b in 0..q.size() {
                assert_eq!(q.get(a, q.left_divide(b, a).unwrap()), b);
            }
        }
    }

    #[test]
    fn affine_pipeline_passes_both_sides() {
        for side in [Side::Left, Side::Right] {
            let prob = affine_problem(side);
            let (q, report) = build_approximation(&prob).unwrap();
            assert!(report.pass, "{side}: {report:?}");
            assert!(report.qualifying_pairs > 0);
            assert_eq!(q.permutation_failure(), None);
        }
    }

    #[test]
    fn pigeonhole_family_reports_violator() {
        let m = GroupModel::Integers;
        let grid: Vec<GroupElement> = (0..3).map(|x| GroupElement::scalar(x as f64)).collect();
        let sets = vec![vec![0], vec![0], vec![1, 2], vec![1, 2]];
        let cf = CandidateFamily::from_sets(m, Side::Left, grid, vec![0, 1], sets).unwrap();
        match solve_left_quasigroup(&cf) {
            Err(ApproximationError::HallViolation { index, violator, .. }) => {
                assert_eq!(index, 0);
                assert_eq!(violator.sets.len(), 2);
                assert_eq!(violator.union, vec![0]);
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn corrupted_entry_is_located() {
        let prob = circle_problem(0.2);
        let (mut q, _) = build_approximation(&prob).unwrap();
        let far = (q.get(2, 3) + q.size() / 2) % q.size();
        q.table[2][3] = far as u32;
        let report = verify_approximation(&q, &prob).unwrap();
        assert!(!report.pass);
        let w = report.worst_pair.unwrap();
        assert_eq!((w.x, w.y), (2, 3));
        assert!(report.permutation_failure.is_some());
    }

    #[test]
    fn right_side_columns_permute() {
        let m = GroupModel::Integers;
        let c = CompactRegion::new(m, vec![[-2.0, 2.0]]).unwrap();
        let prob = ApproximationProblem::new(c, Neighborhood::new(0.5).unwrap(), Side::Right);
        let (q, report) = build_approximation(&prob).unwrap();
        assert!(report.pass);
        for a in 0..q.size() {
            for b in 0..q.size() {
                assert_eq!(q.get(q.right_divide(b, a).unwrap(), a), b);
            }
        }
    }
}
