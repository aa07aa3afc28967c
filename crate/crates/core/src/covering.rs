//! Grids and covering numbers `(A:O)`.
//!
//! A ball of radius `r` translated to a center `g` contains `x` when
//! `offset(side, g, x) <= r + MEMBERSHIP_SLACK`; for the default left side this
//! is the closed translate `gO` of [`GroupModel::in_translate`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group_models::{
    CompactRegion, GroupElement, GroupError, GroupModel, Neighborhood, Side, DEFAULT_POINT_CAP,
    MEMBERSHIP_SLACK,
};
use crate::spatial::ChartIndex;

/// Largest candidate list accepted by [`covering_number_exact`].
pub const EXACT_CANDIDATE_LIMIT: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoveringError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("exact covering takes at most {limit} candidates, got {count}; use the greedy variant")]
    TooManyCandidates { count: usize, limit: usize },
    #[error("point {0} lies in no candidate ball")]
    Uncoverable(usize),
    #[error("grid leaves sample point {0:?} uncovered")]
    NotCovered(GroupElement),
}

/// Centers whose radius-`radius` translates cover a region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub centers: Vec<GroupElement>,
    pub radius: f64,
    #[serde(default)]
    pub side: Side,
}

impl Cover {
    pub fn covers(&self, model: GroupModel, x: &GroupElement) -> bool {
        self.centers
            .iter()
            .any(|c| model.offset(self.side, c, x) <= self.radius + MEMBERSHIP_SLACK)
    }

    /// Index of the first point outside every ball.
    pub fn first_uncovered(&self, model: GroupModel, points: &[GroupElement]) -> Option<usize> {
        points.iter().position(|p| !self.covers(model, p))
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringNumber {
    pub value: usize,
    pub exact: bool,
}

/// Left-translate grid of `k` for the ball `o`, capped at [`DEFAULT_POINT_CAP`] points.
pub fn build_grid(model: GroupModel, k: &CompactRegion, o: Neighborhood) -> Result<Cover, CoveringError> {
    build_grid_with(model, k, o, Side::Left, DEFAULT_POINT_CAP)
}

/// Builds an identity-anchored covering lattice of `k`, verifies it on a
/// sample lattice of spacing `o.radius / 4`, then greedily drops centers
/// lying outside `k` whose sample points are all covered by other centers.
pub fn build_grid_with(
    model: GroupModel,
    k: &CompactRegion,
    o: Neighborhood,
    side: Side,
    cap: usize,
) -> Result<Cover, CoveringError> {
    let r = o.radius();
    let centers = model.covering_lattice(k, r, side, cap)?;
    let samples = model.lattice_points_capped(k, r / 4.0, cap.saturating_mul(4))?;

    let index = ChartIndex::new(model, &centers, r);
    let covering: Vec<Vec<u32>> = samples
        .par_iter()
        .map(|s| {
            let reach = model.preimage_reach(s, r, side);
            index
                .candidates(s, &reach)
                .into_iter()
                .filter(|&c| model.offset(side, &centers[c as usize], s) <= r + MEMBERSHIP_SLACK)
                .collect()
        })
        .collect();
    if let Some(i) = covering.iter().position(Vec::is_empty) {
        return Err(CoveringError::NotCovered(samples[i].clone()));
    }

    let mut count: Vec<u32> = covering.iter().map(|c| c.len() as u32).collect();
    let mut owned: Vec<Vec<u32>> = vec![Vec::new(); centers.len()];
    for (s, cs) in covering.iter().enumerate() {
        for &c in cs {
            owned[c as usize].push(s as u32);
        }
    }
    let mut keep = vec![true; centers.len()];
    for c in (0..centers.len()).rev() {
        if k.contains(&centers[c]) {
            continue;
        }
        if owned[c].iter().all(|&s| count[s as usize] >= 2) {
            keep[c] = false;
            for &s in &owned[c] {
                count[s as usize] -= 1;
            }
        }
    }
    let centers = centers
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect();
    Ok(Cover {
        centers,
        radius: r,
        side,
    })
}

type Bits = Vec<u64>;

fn coverage_sets(
    model: GroupModel,
    points: &[GroupElement],
    candidates: &[GroupElement],
    radius: f64,
) -> Result<Vec<Bits>, CoveringError> {
    let words = points.len().div_ceil(64);
    let sets: Vec<Bits> = candidates
        .iter()
        .map(|c| {
            let mut b = vec![0u64; words];
            for (i, p) in points.iter().enumerate() {
                if model.in_translate(c, p, radius) {
                    b[i / 64] |= 1 << (i % 64);
                }
            }
            b
        })
        .collect();
    for i in 0..points.len() {
        if !sets.iter().any(|b| b[i / 64] >> (i % 64) & 1 == 1) {
            return Err(CoveringError::Uncoverable(i));
        }
    }
    Ok(sets)
}

fn count_and_not(a: &Bits, b: &Bits) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & !y).count_ones()).sum()
}

fn greedy(sets: &[Bits], words: usize, total: usize) -> Vec<usize> {
    let mut covered = vec![0u64; words];
    let mut chosen = Vec::new();
    let mut done = 0usize;
    while done < total {
        // first maximum wins ties: lowest candidate index
        let (best, gain) = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (i, count_and_not(s, &covered)))
            .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        debug_assert!(gain > 0);
        for (c, s) in covered.iter_mut().zip(&sets[best]) {
            *c |= s;
        }
        done += gain as usize;
        chosen.push(best);
    }
    chosen
}

/// Greedy set cover of `points` by candidate balls. An upper bound on the
/// exact covering number.
pub fn covering_number_greedy(
    points: &[GroupElement],
    candidates: &[GroupElement],
    radius: f64,
    model: GroupModel,
) -> Result<CoveringNumber, CoveringError> {
    let sets = coverage_sets(model, points, candidates, radius)?;
    let value = greedy(&sets, points.len().div_ceil(64), points.len()).len();
    Ok(CoveringNumber {
        value,
        exact: false,
    })
}

/// Minimum number of candidate balls covering `points`, by branch and bound.
pub fn covering_number_exact(
    points: &[GroupElement],
    candidates: &[GroupElement],
    radius: f64,
    model: GroupModel,
) -> Result<CoveringNumber, CoveringError> {
    if candidates.len() > EXACT_CANDIDATE_LIMIT {
        return Err(CoveringError::TooManyCandidates {
            count: candidates.len(),
            limit: EXACT_CANDIDATE_LIMIT,
        });
    }
    let sets = coverage_sets(model, points, candidates, radius)?;
    let words = points.len().div_ceil(64);
    let mut search = BranchAndBound {
        largest: sets.iter().map(|s| count_and_not(s, &vec![0; words])).max().unwrap_or(1).max(1),
        best: greedy(&sets, words, points.len()).len(),
        sets,
        total: points.len(),
    };
    search.descend(&vec![0u64; words], 0, 0);
    Ok(CoveringNumber {
        value: search.best,
        exact: true,
    })
}

struct BranchAndBound {
    sets: Vec<Bits>,
    largest: u32,
    total: usize,
    best: usize,
}

impl BranchAndBound {
    fn descend(&mut self, covered: &Bits, done: usize, depth: usize) {
        if done == self.total {
            self.best = self.best.min(depth);
            return;
        }
        let remaining = (self.total - done) as u32;
        let bound = depth + remaining.div_ceil(self.largest) as usize;
        if bound >= self.best {
            return;
        }
        // branch on the uncovered point with fewest covering candidates
        let mut pivot = None;
        let mut fewest = usize::MAX;
        for i in 0..self.total {
            if covered[i / 64] >> (i % 64) & 1 == 1 {
                continue;
            }
            let options = self
                .sets
                .iter()
                .filter(|s| s[i / 64] >> (i % 64) & 1 == 1)
                .count();
            if options < fewest {
                fewest = options;
                pivot = Some(i);
            }
        }
        let i = pivot.expect("uncovered point exists");
        for c in 0..self.sets.len() {
            if self.sets[c][i / 64] >> (i % 64) & 1 == 0 {
                continue;
            }
            let gain = count_and_not(&self.sets[c], covered) as usize;
            let next: Bits = covered.iter().zip(&self.sets[c]).map(|(a, b)| a | b).collect();
            self.descend(&next, done + gain, depth + 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_points(xs: &[f64]) -> Vec<GroupElement> {
        xs.iter().map(|&x| GroupElement::scalar(x)).collect()
    }

    /// Smallest subset of candidates covering all points, by enumerating subsets.
    fn exhaustive(points: &[GroupElement], cands: &[GroupElement], r: f64, m: GroupModel) -> usize {
        (0u32..1 << cands.len())
            .filter(|mask| {
                points.iter().all(|p| {
                    (0..cands.len()).any(|c| mask >> c & 1 == 1 && m.in_translate(&cands[c], p, r))
                })
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn exact_examples() {
        let m = GroupModel::Circle;
        let pts = circle_points(&[0.0, 0.25, 0.5, 0.75]);
        let n = covering_number_exact(&pts, &pts, 0.25, m).unwrap();
        assert_eq!(n, CoveringNumber { value: 2, exact: true });
        assert_eq!(exhaustive(&pts, &pts, 0.25, m), 2);

        let tight = circle_points(&[0.1, 0.12, 0.15]);
        assert_eq!(covering_number_exact(&tight, &tight, 0.05, m).unwrap().value, 1);
        assert_eq!(covering_number_exact(&pts, &pts, 1e-6, m).unwrap().value, 4);
    }

    #[test]
    fn greedy_examples() {
        let m = GroupModel::Circle;
        let pts = circle_points(&[0.0, 0.25, 0.5, 0.75]);
        let g = covering_number_greedy(&pts, &pts, 0.25, m).unwrap();
        assert!(!g.exact);
        assert_eq!(g.value, 2);
    }

    #[test]
    fn exact_rejects_large_candidate_lists() {
        let m = GroupModel::Circle;
        let pts = circle_points(&(0..25).map(|i| i as f64 / 25.0).collect::<Vec<_>>());
        assert!(matches!(
            covering_number_exact(&pts, &pts, 0.1, m),
            Err(CoveringError::TooManyCandidates { .. })
        ));
    }

    #[test]
    fn uncoverable_points_reported() {
        let m = GroupModel::Circle;
        let pts = circle_points(&[0.0, 0.5]);
        let cands = circle_points(&[0.0]);
        assert_eq!(
            covering_number_greedy(&pts, &cands, 0.1, m),
            Err(CoveringError::Uncoverable(1))
        );
    }

    #[test]
    fn circle_grid_examples() {
        let m = GroupModel::Circle;
        let k = CompactRegion::whole(m).unwrap();
        let cover = build_grid(m, &k, Neighborhood::new(0.2).unwrap()).unwrap();
        assert!(cover.len() <= 5);
        let dense = m.lattice_points(&k, 0.01).unwrap();
        assert_eq!(cover.first_uncovered(m, &dense), None);
        // the minimum over a 20-point candidate lattice is 3 balls
        let cands = m.lattice_points(&k, 0.05).unwrap();
        let samples = m.lattice_points(&k, 0.05).unwrap();
        let exact = covering_number_exact(&samples, &cands, 0.2, m).unwrap();
        assert_eq!(exact.value, 3);
        assert!(cover.len() >= exact.value);
    }

    #[test]
    fn discrete_grid_keeps_isolated_points() {
        let m = GroupModel::Integers;
        let k = CompactRegion::new(m, vec![[-3.0, 3.0]]).unwrap();
        let cover = build_grid(m, &k, Neighborhood::new(0.5).unwrap()).unwrap();
        let xs: Vec<f64> = cover.centers.iter().map(|c| c.coords()[0]).collect();
        assert_eq!(xs, vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn single_point_gets_one_center() {
        for (m, p) in [
            (GroupModel::Circle, GroupElement::scalar(0.33)),
            (GroupModel::Affine, GroupElement::new(&[1.3, 0.7])),
            (GroupModel::Integers, GroupElement::scalar(4.0)),
        ] {
            let k = CompactRegion::point(m, &p).unwrap();
            let cover = build_grid(m, &k, Neighborhood::new(0.1).unwrap()).unwrap();
            assert_eq!(cover.len(), 1, "{m}");
            assert!(cover.covers(m, &p));
        }
    }

    #[test]
    fn affine_grid_covers_random_points() {
        use rand::SeedableRng;
        let m = GroupModel::Affine;
        let k = CompactRegion::new(m, vec![[0.5, 2.0], [-1.0, 1.0]]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for side in [Side::Left, Side::Right] {
            let cover =
                build_grid_with(m, &k, Neighborhood::new(0.1).unwrap(), side, 100_000).unwrap();
            for _ in 0..2000 {
                let x = m.sample_region(&k, &mut rng);
                assert!(cover.covers(m, &x));
            }
        }
    }

    #[test]
    fn monotone_in_points_and_radius() {
        let m = GroupModel::Circle;
        let all = circle_points(&[0.0, 0.1, 0.3, 0.45, 0.6, 0.8, 0.9]);
        let cands = m
            .lattice_points(&CompactRegion::whole(m).unwrap(), 0.1)
            .unwrap();
        let mut prev = 0;
        for k in 1..=all.len() {
            let v = covering_number_exact(&all[..k], &cands, 0.12, m).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = usize::MAX;
        for r in [0.05, 0.1, 0.15, 0.2, 0.3] {
            let v = covering_number_exact(&all, &cands, r, m).unwrap().value;
            assert!(v <= prev);
            prev = v;
        }
    }
}
