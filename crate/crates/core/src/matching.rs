//! Maximum bipartite matching and systems of distinct representatives.
//!
//! Sets are the left side, universe elements the right side. Matchings are
//! computed with Hopcroft–Karp layered augmentation; adjacency lists are
//! sorted, free sets are processed in index order, and edges are tried in
//! ascending element order, so the result depends only on the input.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("set {set} contains element {element}, outside universe of size {universe}")]
    OutOfUniverse {
        set: usize,
        element: usize,
        universe: usize,
    },
    #[error("initial matching is inconsistent at set {0}")]
    BadInitial(usize),
}

/// A family of subsets `F_0..F_{m-1}` of `{0, .., n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystem {
    universe_size: usize,
    sets: Vec<Vec<usize>>,
}

impl SetSystem {
    /// Each set is sorted and deduplicated.
    pub fn new(universe_size: usize, sets: Vec<Vec<usize>>) -> Result<Self, MatchingError> {
        let mut sets = sets;
        for (i, s) in sets.iter_mut().enumerate() {
            s.sort_unstable();
            s.dedup();
            if let Some(&e) = s.last() {
                if e >= universe_size {
                    return Err(MatchingError::OutOfUniverse {
                        set: i,
                        element: e,
                        universe: universe_size,
                    });
                }
            }
        }
        Ok(SetSystem {
            universe_size,
            sets,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Size of `⋃_{k∈S} F_k`.
    pub fn union_size(&self, subset: &[usize]) -> usize {
        let mut seen = vec![false; self.universe_size];
        let mut count = 0;
        for &k in subset {
            for &e in &self.sets[k] {
                if !seen[e] {
                    seen[e] = true;
                    count += 1;
                }
            }
        }
        count
    }
}

/// Partial map set-index → element-index.
pub type Matching = Vec<Option<usize>>;

pub fn matching_size(m: &Matching) -> usize {
    m.iter().filter(|x| x.is_some()).count()
}

/// Subsets witnessing the failure of Hall's condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallViolator {
    /// The offending set indices `S`.
    pub sets: Vec<usize>,
    /// `⋃_{k∈S} F_k`, strictly smaller than `S`.
    pub union: Vec<usize>,
}

impl HallViolator {
    /// Recomputes the union directly and checks `|union| < |S|`.
    pub fn certifies(&self, g: &SetSystem) -> bool {
        g.union_size(&self.sets) < self.sets.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdrResult {
    Representatives(Vec<usize>),
    Violator(HallViolator),
}

impl SdrResult {
    /// Checks whichever branch is populated against `g`.
    pub fn verify(&self, g: &SetSystem) -> bool {
        match self {
            SdrResult::Representatives(reps) => {
                if reps.len() != g.len() {
                    return false;
                }
                let mut used = vec![false; g.universe_size()];
                reps.iter().zip(g.sets()).all(|(&r, s)| {
                    let fresh = r < used.len() && !used[r];
                    if fresh {
                        used[r] = true;
                    }
                    fresh && s.binary_search(&r).is_ok()
                })
            }
            SdrResult::Violator(v) => v.certifies(g),
        }
    }
}

pub fn max_matching(g: &SetSystem) -> Matching {
    Matcher::new(g).run()
}

/// Extends a valid partial matching to a maximum one. Elements matched in
/// `initial` stay matched (possibly to different sets).
pub fn max_matching_from(g: &SetSystem, initial: &[Option<usize>]) -> Result<Matching, MatchingError> {
    let mut m = Matcher::new(g);
    if initial.len() != g.len() {
        return Err(MatchingError::BadInitial(initial.len()));
    }
    for (u, &v) in initial.iter().enumerate() {
        if let Some(v) = v {
            if g.sets[u].binary_search(&v).is_err() || m.match_r[v].is_some() {
                return Err(MatchingError::BadInitial(u));
            }
            m.match_l[u] = Some(v);
            m.match_r[v] = Some(u);
        }
    }
    Ok(m.run())
}

/// A system of distinct representatives, or a Hall violator when none exists.
pub fn sdr(g: &SetSystem) -> SdrResult {
    let matching = max_matching(g);
    match matching.iter().position(Option::is_none) {
        None => SdrResult::Representatives(matching.into_iter().map(Option::unwrap).collect()),
        Some(free) => SdrResult::Violator(alternating_tree(g, &matching, free)),
    }
}

/// Sets and elements reachable from the free set `root` by alternating paths.
/// With a maximum matching every reached element is matched, so the reached
/// sets outnumber their neighbourhood by exactly one.
fn alternating_tree(g: &SetSystem, matching: &Matching, root: usize) -> HallViolator {
    let mut owner = vec![None; g.universe_size];
    for (u, v) in matching.iter().enumerate() {
        if let Some(v) = *v {
            owner[v] = Some(u);
        }
    }
    let mut seen_set = vec![false; g.len()];
    let mut seen_elem = vec![false; g.universe_size];
    let mut queue = vec![root];
    seen_set[root] = true;
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for &v in &g.sets[u] {
            if seen_elem[v] {
                continue;
            }
            seen_elem[v] = true;
            let w = owner[v].expect("maximum matching has no augmenting path");
            if !seen_set[w] {
                seen_set[w] = true;
                queue.push(w);
            }
        }
    }
    queue.sort_unstable();
    let union = (0..g.universe_size).filter(|&v| seen_elem[v]).collect();
    HallViolator { sets: queue, union }
}

const INF: u32 = u32::MAX;

struct Matcher<'a> {
    g: &'a SetSystem,
    match_l: Vec<Option<usize>>,
    match_r: Vec<Option<usize>>,
    dist: Vec<u32>,
    cursor: Vec<usize>,
}

impl<'a> Matcher<'a> {
    fn new(g: &'a SetSystem) -> Self {
        Matcher {
            g,
            match_l: vec![None; g.len()],
            match_r: vec![None; g.universe_size],
            dist: vec![INF; g.len()],
            cursor: vec![0; g.len()],
        }
    }

    fn run(mut self) -> Matching {
        while self.layer() {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            for u in 0..self.g.len() {
                if self.match_l[u].is_none() {
                    self.augment(u);
                }
            }
        }
        self.match_l
    }

    /// BFS layering from free sets; true if some free element is reachable.
    fn layer(&mut self) -> bool {
        let mut queue = Vec::new();
        for u in 0..self.g.len() {
            if self.match_l[u].is_none() {
                self.dist[u] = 0;
                queue.push(u);
            } else {
                self.dist[u] = INF;
            }
        }
        let mut found = false;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in &self.g.sets[u] {
                match self.match_r[v] {
                    None => found = true,
                    Some(w) if self.dist[w] == INF => {
                        self.dist[w] = self.dist[u] + 1;
                        queue.push(w);
                    }
                    Some(_) => {}
                }
            }
        }
        found
    }

    fn augment(&mut self, u: usize) -> bool {
        while self.cursor[u] < self.g.sets[u].len() {
            let v = self.g.sets[u][self.cursor[u]];
            self.cursor[u] += 1;
            let ok = match self.match_r[v] {
                None => true,
                Some(w) => self.dist[w] == self.dist[u].wrapping_add(1) && self.augment(w),
            };
            if ok {
                self.match_l[u] = Some(v);
                self.match_r[v] = Some(u);
                return true;
            }
        }
        self.dist[u] = INF;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn system(n: usize, sets: &[&[usize]]) -> SetSystem {
        SetSystem::new(n, sets.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    /// Plain Kuhn augmenting-path search, one DFS per set.
    fn naive_matching_size(g: &SetSystem) -> usize {
        fn try_set(g: &SetSystem, u: usize, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
            for &v in &g.sets()[u] {
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                if owner[v].is_none() || try_set(g, owner[v].unwrap(), seen, owner) {
                    owner[v] = Some(u);
                    return true;
                }
            }
            false
        }
        let mut owner = vec![None; g.universe_size()];
        (0..g.len())
            .filter(|&u| try_set(g, u, &mut vec![false; g.universe_size()], &mut owner))
            .count()
    }

    #[test]
    fn matching_examples() {
        let g = system(3, &[&[0], &[1], &[2]]);
        assert_eq!(max_matching(&g), vec![Some(0), Some(1), Some(2)]);
        let g = system(2, &[&[0, 1], &[0], &[0]]);
        let m = max_matching(&g);
        assert_eq!(matching_size(&m), 2);
        assert_eq!(m[0], Some(1));
    }

    #[test]
    fn sdr_examples() {
        let g = system(3, &[&[0], &[1], &[2]]);
        assert_eq!(sdr(&g), SdrResult::Representatives(vec![0, 1, 2]));
        let g = system(2, &[&[0, 1], &[0], &[0]]);
        match sdr(&g) {
            SdrResult::Violator(v) => {
                assert_eq!(v.sets, vec![1, 2]);
                assert_eq!(v.union, vec![0]);
                assert!(v.certifies(&g));
            }
            other => panic!("expected violator, got {other:?}"),
        }
    }

    #[test]
    fn random_systems_match_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let sets: Vec<Vec<usize>> = (0..50)
                .map(|_| {
                    let k = rng.gen_range(0..4);
                    (0..k).map(|_| rng.gen_range(0..50)).collect()
                })
                .collect();
            let g = SetSystem::new(50, sets).unwrap();
            let m = max_matching(&g);
            assert_eq!(matching_size(&m), naive_matching_size(&g));
            let r = sdr(&g);
            assert!(r.verify(&g));
        }
    }

    #[test]
    fn augmenting_keeps_matched_elements() {
        let g = system(3, &[&[0, 1], &[1, 2], &[0]]);
        let m = max_matching_from(&g, &[Some(0), None, None]).unwrap();
        assert_eq!(matching_size(&m), 3);
        assert!(m.contains(&Some(0)));
        assert!(max_matching_from(&g, &[Some(2), None, None]).is_err());
    }

    #[test]
    fn out_of_universe_rejected() {
        assert!(SetSystem::new(2, vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn deterministic() {
        let g = system(4, &[&[3, 1, 0], &[1, 2], &[0, 2], &[2, 3]]);
        assert_eq!(sdr(&g), sdr(&g));
    }
}
