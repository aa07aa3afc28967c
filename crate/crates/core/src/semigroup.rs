//! Finite semigroups: ideals, maximal ideal chains, quotients, 0-simple
//! classification, Rees semigroups and extraction of a group from a chain level.
//!
//! Quotients put their zero last. The quotient by the empty ideal adjoins a
//! fresh zero, so every level quotient of a chain carries one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Table = Vec<Vec<usize>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemigroupError {
    #[error("row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("entry ({row}, {col}) = {value} is outside 0..{n}")]
    OutOfRange { row: usize, col: usize, value: usize, n: usize },
    #[error("(a·b)·c ≠ a·(b·c) for a={a}, b={b}, c={c}")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("the empty table is not a semigroup")]
    Empty,
    #[error("element {0} is outside the carrier")]
    NoSuchElement(usize),
    #[error("not an ideal: {inside}·{outside} or its mirror leaves the set")]
    NotIdeal { inside: usize, outside: usize },
    #[error("the group of a Rees semigroup must be a group")]
    NotAGroup,
    #[error("sandwich matrix must be {rows}×{cols} with entries in the group")]
    BadSandwich { rows: usize, cols: usize },
}

fn check_shape(t: &[Vec<usize>]) -> Result<(), SemigroupError> {
    let n = t.len();
    if n == 0 {
        return Err(SemigroupError::Empty);
    }
    for (row, r) in t.iter().enumerate() {
        if r.len() != n {
            return Err(SemigroupError::NotSquare { row, len: r.len(), n });
        }
        if let Some((col, &value)) = r.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(SemigroupError::OutOfRange { row, col, value, n });
        }
    }
    Ok(())
}

/// Full triple scan; the error names the first failing triple.
pub fn verify_associativity(t: &[Vec<usize>]) -> Result<(), SemigroupError> {
    check_shape(t)?;
    let n = t.len();
    for a in 0..n {
        for b in 0..n {
            let ab = t[a][b];
            for c in 0..n {
                if t[ab][c] != t[a][t[b][c]] {
                    return Err(SemigroupError::NotAssociative { a, b, c });
                }
            }
        }
    }
    Ok(())
}

/// The element `z` with `z·x = x·z = z` for all `x`, if any.
pub fn find_zero(t: &[Vec<usize>]) -> Option<usize> {
    (0..t.len()).find(|&z| (0..t.len()).all(|x| t[z][x] == z && t[x][z] == z))
}

/// An associative table with its zero, if it has one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSemigroup", into = "RawSemigroup")]
pub struct FiniteSemigroup {
    table: Table,
    zero: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawSemigroup {
    n: usize,
    table: Table,
    #[serde(default)]
    zero: Option<usize>,
}

impl TryFrom<RawSemigroup> for FiniteSemigroup {
    type Error = SemigroupError;

    fn try_from(r: RawSemigroup) -> Result<Self, Self::Error> {
        if r.table.len() != r.n {
            return Err(SemigroupError::NotSquare { row: 0, len: r.table.len(), n: r.n });
        }
        FiniteSemigroup::new(r.table)
    }
}

impl From<FiniteSemigroup> for RawSemigroup {
    fn from(s: FiniteSemigroup) -> Self {
        RawSemigroup { n: s.size(), zero: s.zero, table: s.table }
    }
}

impl FiniteSemigroup {
    /// Verifies associativity and locates the zero.
    pub fn new(table: Table) -> Result<Self, SemigroupError> {
        verify_associativity(&table)?;
        let zero = find_zero(&table);
        Ok(FiniteSemigroup { table, zero })
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn zero(&self) -> Option<usize> {
        self.zero
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    /// Two-sided identity, if any.
    pub fn identity(&self) -> Option<usize> {
        let n = self.size();
        (0..n).find(|&e| (0..n).all(|x| self.table[e][x] == x && self.table[x][e] == x))
    }

    /// Identity of the table when it is a group.
    pub fn group_identity(&self) -> Option<usize> {
        let e = self.identity()?;
        let n = self.size();
        (0..n)
            .all(|x| (0..n).any(|y| self.table[x][y] == e && self.table[y][x] == e))
            .then_some(e)
    }

    /// The semigroup with a new zero appended as the last element.
    pub fn adjoin_zero(&self) -> FiniteSemigroup {
        let n = self.size();
        let mut table: Table = self.table.iter().map(|r| {
            let mut r = r.clone();
            r.push(n);
            r
        }).collect();
        table.push(vec![n; n + 1]);
        FiniteSemigroup { table, zero: Some(n) }
    }

    fn check(&self, x: usize) -> Result<(), SemigroupError> {
        if x >= self.size() {
            return Err(SemigroupError::NoSuchElement(x));
        }
        Ok(())
    }

    /// Restriction to a subset closed under the product; `elements` must be sorted.
    fn restrict(&self, elements: &[usize]) -> FiniteSemigroup {
        let pos = |x: usize| elements.binary_search(&x).expect("subset is closed");
        let table: Table = elements
            .iter()
            .map(|&a| elements.iter().map(|&b| pos(self.table[a][b])).collect())
            .collect();
        let zero = find_zero(&table);
        FiniteSemigroup { table, zero }
    }
}

/// `S¹xS¹`, sorted.
pub fn principal_ideal(s: &FiniteSemigroup, x: usize) -> Vec<usize> {
    let n = s.size();
    let mut member = vec![false; n];
    member[x] = true;
    for a in 0..n {
        member[s.mul(a, x)] = true;
    }
    let left: Vec<usize> = (0..n).filter(|&y| member[y]).collect();
    for &y in &left {
        for b in 0..n {
            member[s.mul(y, b)] = true;
        }
    }
    (0..n).filter(|&y| member[y]).collect()
}

/// Checks `SI ⊆ I` and `IS ⊆ I`.
pub fn is_ideal(s: &FiniteSemigroup, set: &[usize]) -> Result<(), SemigroupError> {
    let n = s.size();
    let mut member = vec![false; n];
    for &x in set {
        s.check(x)?;
        member[x] = true;
    }
    for &x in set {
        for a in 0..n {
            if !member[s.mul(a, x)] || !member[s.mul(x, a)] {
                return Err(SemigroupError::NotIdeal { inside: x, outside: a });
            }
        }
    }
    Ok(())
}

/// `S = I₀ ⊃ I₁ ⊃ … ⊃ ∅`; the last level is always empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealChain {
    pub levels: Vec<Vec<usize>>,
}

impl IdealChain {
    /// Index of the level `k` with `x ∈ I_k ∖ I_{k+1}`.
    pub fn level_of(&self, x: usize) -> Option<usize> {
        (0..self.levels.len() - 1).find(|&k| {
            self.levels[k].binary_search(&x).is_ok() && self.levels[k + 1].binary_search(&x).is_err()
        })
    }

    /// Every level is an ideal, the chain strictly decreases from `S` to
    /// `∅`, and no principal ideal fits strictly between consecutive levels.
    pub fn certify(&self, s: &FiniteSemigroup) -> bool {
        let all: Vec<usize> = (0..s.size()).collect();
        if self.levels.first() != Some(&all) || self.levels.last().map(Vec::len) != Some(0) {
            return false;
        }
        let ideals: Vec<Vec<usize>> = (0..s.size()).map(|x| principal_ideal(s, x)).collect();
        self.levels.windows(2).all(|w| {
            let (upper, lower) = (&w[0], &w[1]);
            is_ideal(s, lower).is_ok()
                && lower.len() < upper.len()
                && lower.iter().all(|x| upper.binary_search(x).is_ok())
                && upper
                    .iter()
                    .filter(|y| lower.binary_search(y).is_err())
                    .all(|&y| union_size(lower, &ideals[y], s.size()) == upper.len())
        })
    }
}

fn union_size(a: &[usize], b: &[usize], n: usize) -> usize {
    let mut member = vec![false; n];
    a.iter().chain(b).for_each(|&x| member[x] = true);
    member.iter().filter(|&&m| m).count()
}

/// Builds the chain level by level. The next level below `I_k` is the union
/// of the principal ideals `J(y)`, `y ∈ I_k` in index order, accepted while
/// the union stays a proper subset of `I_k`; the result is a maximal ideal
/// properly inside `I_k`.
pub fn maximal_ideal_chain(s: &FiniteSemigroup) -> IdealChain {
    let n = s.size();
    let ideals: Vec<Vec<usize>> = (0..n).map(|x| principal_ideal(s, x)).collect();
    let mut levels = vec![(0..n).collect::<Vec<usize>>()];
    loop {
        let current = levels.last().unwrap();
        if current.is_empty() {
            break;
        }
        let mut member = vec![false; n];
        let mut size = 0;
        for &y in current {
            let fresh = ideals[y].iter().filter(|&&z| !member[z]).count();
            if size + fresh < current.len() {
                ideals[y].iter().for_each(|&z| member[z] = true);
                size += fresh;
            }
        }
        levels.push((0..n).filter(|&z| member[z]).collect());
    }
    IdealChain { levels }
}

/// A quotient semigroup with the original element behind each index
/// (`None` for the zero, which is last).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quotient {
    pub semigroup: FiniteSemigroup,
    pub elements: Vec<Option<usize>>,
}

/// `S/I`: carrier `(S ∖ I) ∪ {0}`, products landing in `I` become `0`.
pub fn quotient(s: &FiniteSemigroup, ideal: &[usize]) -> Result<Quotient, SemigroupError> {
    is_ideal(s, ideal)?;
    let all: Vec<usize> = (0..s.size()).collect();
    Ok(quotient_within(s, &all, ideal))
}

/// `I_k / I_{k+1}` for a chain of `s`.
pub fn level_quotient(s: &FiniteSemigroup, chain: &IdealChain, k: usize) -> Quotient {
    quotient_within(s, &chain.levels[k], &chain.levels[k + 1])
}

/// `outer / inner` where `outer` is closed and `inner ⊆ outer` is an ideal of it.
fn quotient_within(s: &FiniteSemigroup, outer: &[usize], inner: &[usize]) -> Quotient {
    let n = s.size();
    let mut in_inner = vec![false; n];
    inner.iter().for_each(|&x| in_inner[x] = true);
    let kept: Vec<usize> = outer.iter().copied().filter(|&x| !in_inner[x]).collect();
    let zero = kept.len();
    let mut index = vec![zero; n];
    for (i, &x) in kept.iter().enumerate() {
        index[x] = i;
    }
    let mut table: Table = kept
        .iter()
        .map(|&a| {
            let mut row: Vec<usize> = kept.iter().map(|&b| index[s.mul(a, b)]).collect();
            row.push(zero);
            row
        })
        .collect();
    table.push(vec![zero; zero + 1]);
    let mut elements: Vec<Option<usize>> = kept.into_iter().map(Some).collect();
    elements.push(None);
    Quotient { semigroup: FiniteSemigroup { table, zero: Some(zero) }, elements }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ZeroSemigroup,
    ZeroSimple,
    Group,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub zero: Option<usize>,
    pub identity: Option<usize>,
    /// A product different from the zero, when there is one.
    pub nonzero_product: Option<(usize, usize)>,
    /// A principal ideal other than `{0}` and `S`, when there is one.
    pub proper_ideal: Option<Vec<usize>>,
}

/// Zero semigroup if every product is the zero, then group, then 0-simple
/// (a zero and `S¹xS¹ = S` for every `x ≠ 0`), otherwise other.
pub fn classify(s: &FiniteSemigroup) -> Classification {
    let n = s.size();
    let zero = s.zero();
    let nonzero_product = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .find(|&(a, b)| Some(s.mul(a, b)) != zero);
    let identity = s.group_identity();
    let proper_ideal = (0..n)
        .filter(|&x| Some(x) != zero)
        .map(|x| principal_ideal(s, x))
        .find(|j| j.len() < n);
    let verdict = if zero.is_some() && nonzero_product.is_none() {
        Verdict::ZeroSemigroup
    } else if identity.is_some() {
        Verdict::Group
    } else if zero.is_some() && proper_ideal.is_none() {
        Verdict::ZeroSimple
    } else {
        Verdict::Other
    };
    Classification { verdict, zero, identity, nonzero_product, proper_ideal }
}

/// Parameters of `S(n, m, H, ρ)`; `sandwich[i][j] = None` encodes `ρ(i, j) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReesParams {
    pub n_rows: usize,
    pub m_cols: usize,
    pub group: FiniteSemigroup,
    pub sandwich: Vec<Vec<Option<usize>>>,
}

impl ReesParams {
    /// Every row and every column of `ρ` has a nonzero entry.
    pub fn is_regular(&self) -> bool {
        (0..self.n_rows).all(|i| (0..self.m_cols).any(|j| self.sandwich[i][j].is_some()))
            && (0..self.m_cols).all(|j| (0..self.n_rows).any(|i| self.sandwich[i][j].is_some()))
    }

    /// Index of `(i, j, h)`.
    pub fn index(&self, i: usize, j: usize, h: usize) -> usize {
        (i * self.m_cols + j) * self.group.size() + h
    }

    /// Index of the zero, `n·m·|H|`.
    pub fn zero_index(&self) -> usize {
        self.n_rows * self.m_cols * self.group.size()
    }
}

/// `(i₁,j₁,h₁)(i₂,j₂,h₂) = (i₁, j₂, h₁·ρ(i₂,j₁)·h₂)`, or `0` when `ρ(i₂,j₁) = 0`.
pub fn rees_construct(p: &ReesParams) -> Result<FiniteSemigroup, SemigroupError> {
    if p.group.group_identity().is_none() {
        return Err(SemigroupError::NotAGroup);
    }
    let g = p.group.size();
    let bad = || SemigroupError::BadSandwich { rows: p.n_rows, cols: p.m_cols };
    if p.n_rows == 0 || p.m_cols == 0 || p.sandwich.len() != p.n_rows {
        return Err(bad());
    }
    for row in &p.sandwich {
        if row.len() != p.m_cols || row.iter().flatten().any(|&h| h >= g) {
            return Err(bad());
        }
    }
    let zero = p.zero_index();
    let decode = |x: usize| (x / g / p.m_cols, x / g % p.m_cols, x % g);
    let table: Table = (0..=zero)
        .map(|a| {
            (0..=zero)
                .map(|b| {
                    if a == zero || b == zero {
                        return zero;
                    }
                    let (i1, j1, h1) = decode(a);
                    let (i2, j2, h2) = decode(b);
                    match p.sandwich[i2][j1] {
                        Some(r) => p.index(i1, j2, p.group.mul(p.group.mul(h1, r), h2)),
                        None => zero,
                    }
                })
                .collect()
        })
        .collect();
    FiniteSemigroup::new(table)
}

/// `xSx` with the element of `s` behind each index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sandwich {
    pub semigroup: FiniteSemigroup,
    pub elements: Vec<usize>,
}

pub fn sandwich(s: &FiniteSemigroup, x: usize) -> Result<Sandwich, SemigroupError> {
    s.check(x)?;
    let mut elements: Vec<usize> = (0..s.size()).map(|a| s.mul(s.mul(x, a), x)).collect();
    elements.sort_unstable();
    elements.dedup();
    // xax·xbx = x(axxb)x, so the set is closed
    Ok(Sandwich { semigroup: s.restrict(&elements), elements })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionStage {
    Sandwich,
    StripZero,
    GroupAxioms,
}

/// A group found inside a semigroup; `elements` are indices of the input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedGroup {
    pub table: Table,
    pub identity: usize,
    pub elements: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub near_unit: usize,
    pub chain: IdealChain,
    pub level: usize,
    /// Whether the level was divided by the next one (false at the bottom level).
    pub quotiented: bool,
    pub level_size: usize,
    pub level_verdict: Verdict,
    pub sandwich_size: usize,
    pub sandwich_verdict: Verdict,
    pub group: Option<ExtractedGroup>,
    pub failed_at: Option<ExtractionStage>,
}

/// Chain → level holding `near_unit` → `I_k/I_{k+1}` (or `I_k` itself when
/// `I_{k+1} = ∅`) → classify → sandwich at `near_unit` → drop the zero →
/// check the group axioms.
pub fn extract_group(s: &FiniteSemigroup, near_unit: usize) -> Result<ExtractionReport, SemigroupError> {
    s.check(near_unit)?;
    let chain = maximal_ideal_chain(s);
    let level = chain.level_of(near_unit).expect("every element lies in some level");
    let quotiented = !chain.levels[level + 1].is_empty();
    let (f, origin): (FiniteSemigroup, Vec<Option<usize>>) = if quotiented {
        let q = level_quotient(s, &chain, level);
        (q.semigroup, q.elements)
    } else {
        let elems = chain.levels[level].clone();
        (s.restrict(&elems), elems.into_iter().map(Some).collect())
    };
    let level_verdict = classify(&f).verdict;
    let x = origin.iter().position(|&o| o == Some(near_unit)).expect("near_unit survives");
    let sw = sandwich(&f, x)?;
    let sandwich_verdict = classify(&sw.semigroup).verdict;
    let mut report = ExtractionReport {
        near_unit,
        level_size: f.size(),
        sandwich_size: sw.elements.len(),
        chain,
        level,
        quotiented,
        level_verdict,
        sandwich_verdict,
        group: None,
        failed_at: None,
    };

    let kept: Vec<usize> = sw.elements.iter().copied().filter(|&e| Some(e) != f.zero()).collect();
    if kept.is_empty() {
        report.failed_at = Some(ExtractionStage::StripZero);
        return Ok(report);
    }
    let closed = kept
        .iter()
        .all(|&a| kept.iter().all(|&b| kept.binary_search(&f.mul(a, b)).is_ok()));
    if !closed {
        report.failed_at = Some(ExtractionStage::StripZero);
        return Ok(report);
    }
    let h = f.restrict(&kept);
    match h.group_identity() {
        Some(identity) => {
            let elements = kept.iter().map(|&k| origin[k].expect("zero was removed")).collect();
            report.group = Some(ExtractedGroup { table: h.table, identity, elements });
        }
        None => report.failed_at = Some(ExtractionStage::GroupAxioms),
    }
    Ok(report)
}

/// A bijection `φ` with `φ(a·b) = φ(a)·φ(b)`, by backtracking.
pub fn isomorphism(a: &[Vec<usize>], b: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = a.len();
    if b.len() != n {
        return None;
    }
    let profile = |t: &[Vec<usize>], x: usize| {
        // idempotency, the number of square roots, and the order of the power sequence
        let mut seen = vec![false; n];
        let mut p = x;
        let mut steps = 0;
        while !seen[p] {
            seen[p] = true;
            p = t[p][x];
            steps += 1;
        }
        (t[x][x] == x, (0..n).filter(|&y| t[y][y] == x).count(), steps)
    };
    let pa: Vec<_> = (0..n).map(|x| profile(a, x)).collect();
    let pb: Vec<_> = (0..n).map(|x| profile(b, x)).collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        k: usize,
        a: &[Vec<usize>],
        b: &[Vec<usize>],
        pa: &[(bool, usize, usize)],
        pb: &[(bool, usize, usize)],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let n = a.len();
        if k == n {
            return true;
        }
        for y in 0..n {
            if used[y] || pa[k] != pb[y] {
                continue;
            }
            map[k] = y;
            // every product among mapped elements that is itself mapped must agree
            let consistent = (0..=k).all(|i| {
                (0..=k).all(|j| {
                    let r = a[i][j];
                    r > k || b[map[i]][map[j]] == map[r]
                })
            });
            if consistent {
                used[y] = true;
                if extend(k + 1, a, b, pa, pb, map, used) {
                    return true;
                }
                used[y] = false;
            }
            map[k] = usize::MAX;
        }
        false
    }
    extend(0, a, b, &pa, &pb, &mut map, &mut used).then_some(map)
}

/// `Z_n` under addition.
pub fn cyclic_group(n: usize) -> FiniteSemigroup {
    let table: Table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let zero = find_zero(&table);
    FiniteSemigroup { table, zero }
}

pub fn direct_product(g: &FiniteSemigroup, h: &FiniteSemigroup) -> FiniteSemigroup {
    let m = h.size();
    let n = g.size() * m;
    let table: Table = (0..n)
        .map(|a| (0..n).map(|b| g.mul(a / m, b / m) * m + h.mul(a % m, b % m)).collect())
        .collect();
    let zero = find_zero(&table);
    FiniteSemigroup { table, zero }
}

/// Symmetries of the regular `k`-gon: `r^i` is `i`, `r^i s` is `k + i`.
pub fn dihedral_group(k: usize) -> FiniteSemigroup {
    let n = 2 * k;
    let table: Table = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let (i, fa) = (a % k, a >= k);
                    let (j, fb) = (b % k, b >= k);
                    // r^i s^fa · r^j s^fb = r^(i ± j) s^(fa xor fb)
                    let rot = if fa { (i + k - j) % k } else { (i + j) % k };
                    rot + if fa != fb { k } else { 0 }
                })
                .collect()
        })
        .collect();
    let zero = find_zero(&table);
    FiniteSemigroup { table, zero }
}

/// `{±1, ±i, ±j, ±k}` indexed as `1, i, j, k, -1, -i, -j, -k`.
pub fn quaternion_group() -> FiniteSemigroup {
    // unit products: (sign, unit) for the basis 1, i, j, k
    const UNIT: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let table: Table = (0..8)
        .map(|a: usize| {
            (0..8)
                .map(|b: usize| {
                    let (neg, u) = UNIT[a % 4][b % 4];
                    let sign = neg ^ (a >= 4) ^ (b >= 4);
                    u + if sign { 4 } else { 0 }
                })
                .collect()
        })
        .collect();
    FiniteSemigroup { table, zero: None }
}

/// One representative of each isomorphism class of groups of order at most 8.
pub fn small_groups() -> Vec<(&'static str, FiniteSemigroup)> {
    let z = cyclic_group;
    vec![
        ("Z1", z(1)),
        ("Z2", z(2)),
        ("Z3", z(3)),
        ("Z4", z(4)),
        ("Z2xZ2", direct_product(&z(2), &z(2))),
        ("Z5", z(5)),
        ("Z6", z(6)),
        ("S3", dihedral_group(3)),
        ("Z7", z(7)),
        ("Z8", z(8)),
        ("Z4xZ2", direct_product(&z(4), &z(2))),
        ("Z2xZ2xZ2", direct_product(&direct_product(&z(2), &z(2)), &z(2))),
        ("D4", dihedral_group(4)),
        ("Q8", quaternion_group()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_semigroup(n: usize) -> FiniteSemigroup {
        FiniteSemigroup::new(vec![vec![0; n]; n]).unwrap()
    }

    fn rees(h: FiniteSemigroup, sandwich: Vec<Vec<Option<usize>>>) -> (ReesParams, FiniteSemigroup) {
        let p = ReesParams { n_rows: sandwich.len(), m_cols: sandwich[0].len(), group: h, sandwich };
        let s = rees_construct(&p).unwrap();
        (p, s)
    }

    #[test]
    fn associativity_examples() {
        assert!(verify_associativity(cyclic_group(4).table()).is_ok());
        assert!(verify_associativity(zero_semigroup(2).table()).is_ok());
        // a left quasigroup that is not associative: x∘y = y - x mod 3
        let t: Table = (0..3).map(|x| (0..3).map(|y| (y + 3 - x) % 3).collect()).collect();
        assert!(matches!(verify_associativity(&t), Err(SemigroupError::NotAssociative { .. })));
    }

    #[test]
    fn zero_examples() {
        assert_eq!(zero_semigroup(3).zero(), Some(0));
        assert_eq!(cyclic_group(3).zero(), None);
        let (p, s) = rees(cyclic_group(2), vec![vec![Some(0), None], vec![Some(1), Some(0)]]);
        assert_eq!(s.zero(), Some(p.zero_index()));
    }

    #[test]
    fn principal_ideal_examples() {
        let g = cyclic_group(5);
        assert_eq!(principal_ideal(&g, 3), (0..5).collect::<Vec<_>>());
        let s = cyclic_group(3).adjoin_zero();
        assert_eq!(principal_ideal(&s, 3), vec![3]);
        let (_, r) = rees(cyclic_group(2), vec![vec![Some(0), None], vec![Some(1), Some(0)]]);
        assert_eq!(principal_ideal(&r, 5).len(), r.size());
    }

    #[test]
    fn chain_examples() {
        let g = cyclic_group(4);
        let c = maximal_ideal_chain(&g);
        assert_eq!(c.levels, vec![vec![0, 1, 2, 3], vec![]]);
        assert!(c.certify(&g));
        let s = g.adjoin_zero();
        let c = maximal_ideal_chain(&s);
        assert_eq!(c.levels, vec![vec![0, 1, 2, 3, 4], vec![4], vec![]]);
        assert!(c.certify(&s));
    }

    /// Rees semigroup over Z2 with an identity layer on top: elements of the
    /// Rees part plus a fresh identity `1`.
    #[test]
    fn three_level_chain() {
        let (_, r) = rees(cyclic_group(2), vec![vec![Some(0), None], vec![Some(1), Some(0)]]);
        let n = r.size();
        let mut t: Table = r.table().iter().map(|row| {
            let mut row = row.clone();
            row.push(0);
            row
        }).collect();
        let mut top: Vec<usize> = (0..n).collect();
        top.push(n);
        t.push(top);
        for (a, row) in t.iter_mut().enumerate().take(n) {
            row[n] = a;
        }
        let s = FiniteSemigroup::new(t).unwrap();
        let c = maximal_ideal_chain(&s);
        assert_eq!(c.levels.len(), 4);
        assert!(c.certify(&s));
        // exhaustive oracle: all ideals as unions of principal ideals
        let ideals = all_ideals(&s);
        for w in c.levels.windows(2) {
            assert!(!ideals.iter().any(|i| i.len() > w[1].len()
                && i.len() < w[0].len()
                && w[1].iter().all(|x| i.contains(x))
                && i.iter().all(|x| w[0].contains(x))));
        }
        for k in 0..c.levels.len() - 1 {
            let v = classify(&level_quotient(&s, &c, k).semigroup).verdict;
            assert!(matches!(v, Verdict::ZeroSimple | Verdict::ZeroSemigroup), "{k}: {v:?}");
        }
    }

    fn all_ideals(s: &FiniteSemigroup) -> Vec<Vec<usize>> {
        let n = s.size();
        (0u32..1 << n)
            .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|set| is_ideal(s, set).is_ok())
            .collect()
    }

    #[test]
    fn quotient_examples() {
        let g = cyclic_group(3);
        let q = quotient(&g, &[0, 1, 2]).unwrap();
        assert_eq!(q.semigroup.size(), 1);
        assert_eq!(q.elements, vec![None]);

        let s = g.adjoin_zero();
        let q = quotient(&s, &[3]).unwrap();
        assert_eq!(q.semigroup.table(), s.table());

        let (p, r) = rees(cyclic_group(2), vec![vec![Some(0), None], vec![Some(1), Some(0)]]);
        let q = quotient(&r, &[p.zero_index()]).unwrap();
        assert!(verify_associativity(q.semigroup.table()).is_ok());
        assert_eq!(classify(&q.semigroup).verdict, Verdict::ZeroSimple);

        assert!(matches!(quotient(&g, &[1]), Err(SemigroupError::NotIdeal { .. })));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&zero_semigroup(3)).verdict, Verdict::ZeroSemigroup);
        assert_eq!(classify(&cyclic_group(5)).verdict, Verdict::Group);
        assert_eq!(classify(&cyclic_group(5).adjoin_zero()).verdict, Verdict::ZeroSimple);
        let (_, r) = rees(cyclic_group(3), vec![vec![Some(0), Some(2)], vec![None, Some(1)]]);
        assert_eq!(classify(&r).verdict, Verdict::ZeroSimple);
        // {0, 1} under max is Z1 with a zero; {0, 1, 2} has the proper ideal {1, 2}
        let max = |n: usize| (0..n).map(|a| (0..n).map(|b| a.max(b)).collect()).collect();
        assert_eq!(classify(&FiniteSemigroup::new(max(2)).unwrap()).verdict, Verdict::ZeroSimple);
        let c = classify(&FiniteSemigroup::new(max(3)).unwrap());
        assert_eq!(c.verdict, Verdict::Other);
        assert_eq!(c.proper_ideal, Some(vec![1, 2]));
    }

    #[test]
    fn rees_examples() {
        let (_, r) = rees(cyclic_group(2), vec![vec![Some(0)]]);
        assert!(isomorphism(r.table(), cyclic_group(2).adjoin_zero().table()).is_some());
        let (_, z) = rees(cyclic_group(2), vec![vec![None, None], vec![None, None]]);
        assert_eq!(z.size(), 9);
        assert_eq!(classify(&z).verdict, Verdict::ZeroSemigroup);
    }

    #[test]
    fn sandwich_examples() {
        let g = dihedral_group(3);
        let sw = sandwich(&g, 4).unwrap();
        assert_eq!(sw.elements.len(), 6);
        assert!(isomorphism(sw.semigroup.table(), g.table()).is_some());

        let h = cyclic_group(3);
        let (p, r) = rees(h.clone(), vec![vec![None, Some(1)], vec![Some(2), Some(0)]]);
        let zero_probe = sandwich(&r, p.index(0, 0, 1)).unwrap();
        assert_eq!(classify(&zero_probe.semigroup).verdict, Verdict::ZeroSemigroup);
        let probe = sandwich(&r, p.index(1, 1, 2)).unwrap();
        assert_eq!(probe.elements.len(), 4);
    }

    #[test]
    fn extraction_examples() {
        let s = cyclic_group(6).adjoin_zero();
        let rep = extract_group(&s, 1).unwrap();
        let g = rep.group.unwrap();
        assert!(isomorphism(&g.table, cyclic_group(6).table()).is_some());
        assert_eq!(rep.level_verdict, Verdict::ZeroSimple);

        let h = cyclic_group(3);
        let (p, r) = rees(h.clone(), vec![vec![Some(0), Some(1)], vec![Some(2), None]]);
        let rep = extract_group(&r, p.index(0, 1, 0)).unwrap();
        assert!(isomorphism(&rep.group.unwrap().table, h.table()).is_some());

        let rep = extract_group(&zero_semigroup(3), 2).unwrap();
        assert!(rep.group.is_none());
        assert_eq!(rep.level_verdict, Verdict::ZeroSemigroup);
    }

    #[test]
    fn small_groups_are_distinct_groups() {
        let groups = small_groups();
        assert_eq!(groups.len(), 14);
        for (name, g) in &groups {
            assert!(g.group_identity().is_some(), "{name}");
            assert!(verify_associativity(g.table()).is_ok(), "{name}");
        }
        for (i, (a, g)) in groups.iter().enumerate() {
            for (b, h) in &groups[i + 1..] {
                assert!(isomorphism(g.table(), h.table()).is_none(), "{a} ≅ {b}");
            }
        }
        let (_, d4) = &groups[12];
        let relabel: Vec<usize> = vec![3, 0, 6, 1, 7, 2, 5, 4];
        let mut t = vec![vec![0; 8]; 8];
        for a in 0..8 {
            for b in 0..8 {
                t[relabel[a]][relabel[b]] = relabel[d4.mul(a, b)];
            }
        }
        assert!(isomorphism(&t, d4.table()).is_some());
    }

    #[test]
    fn serde_round_trip() {
        let s = cyclic_group(3).adjoin_zero();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"n\":4"), "{json}");
        assert_eq!(serde_json::from_str::<FiniteSemigroup>(&json).unwrap(), s);
        let bad = r#"{"n":2,"table":[[0,1],[0,0]]}"#;
        assert!(serde_json::from_str::<FiniteSemigroup>(bad).is_err());
    }
}
