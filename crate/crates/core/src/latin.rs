//! Latin squares, rectangle extension, and embedding of partial tables into
//! latin squares of order `max(2n, k)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group_models::{CompactRegion, GroupElement, GroupError, GroupModel};
use crate::matching::{max_matching, max_matching_from, sdr, MatchingError, SdrResult, SetSystem};

pub type Table = Vec<Vec<usize>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Line {
    Row,
    Column,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Line::Row => "row",
            Line::Column => "column",
        })
    }
}

/// First reason a table fails to be latin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LatinViolation {
    NotSquare { row: usize, len: usize, order: usize },
    SymbolOutOfRange { row: usize, col: usize, symbol: usize },
    Duplicate { line: Line, index: usize, symbol: usize, first: usize, second: usize },
}

impl fmt::Display for LatinViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatinViolation::NotSquare { row, len, order } => {
                write!(f, "row {row} has {len} entries, expected {order}")
            }
            LatinViolation::SymbolOutOfRange { row, col, symbol } => {
                write!(f, "cell ({row}, {col}) holds out-of-range symbol {symbol}")
            }
            LatinViolation::Duplicate { line, index, symbol, first, second } => {
                write!(f, "{line} {index} repeats symbol {symbol} at positions {first} and {second}")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatinError {
    #[error("not latin: {0}")]
    NotLatin(LatinViolation),
    #[error("rectangle row {row} has {len} entries, expected {width}")]
    RaggedRectangle { row: usize, len: usize, width: usize },
    #[error("rectangle already has {rows} rows of width {width}")]
    RectangleFull { rows: usize, width: usize },
    #[error("cell ({row}, {col}) lies outside a partial square of order {order}")]
    CellOutOfRange { row: usize, col: usize, order: usize },
    #[error("cell ({row}, {col}) is filled twice")]
    DuplicateCell { row: usize, col: usize },
    #[error("symbol {symbol} repeats in {line} {index}")]
    RepeatedSymbol { line: Line, index: usize, symbol: usize },
    #[error("{0} is not a discrete model")]
    NotDiscrete(GroupModel),
    #[error("window contains duplicate element {0:?}")]
    DuplicateElement(GroupElement),
    #[error("{model} has too few elements to host {needed} distinct filler points")]
    NoRoomForFillers { model: GroupModel, needed: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

/// Checks that every row and column of `t` is a permutation of `0..t.len()`.
pub fn verify_latin(t: &[Vec<usize>]) -> Result<(), LatinViolation> {
    let n = t.len();
    for (i, row) in t.iter().enumerate() {
        if row.len() != n {
            return Err(LatinViolation::NotSquare { row: i, len: row.len(), order: n });
        }
        for (j, &s) in row.iter().enumerate() {
            if s >= n {
                return Err(LatinViolation::SymbolOutOfRange { row: i, col: j, symbol: s });
            }
        }
    }
    for line in [Line::Row, Line::Column] {
        for a in 0..n {
            let mut seen = vec![usize::MAX; n];
            for b in 0..n {
                let s = match line {
                    Line::Row => t[a][b],
                    Line::Column => t[b][a],
                };
                if seen[s] != usize::MAX {
                    return Err(LatinViolation::Duplicate {
                        line,
                        index: a,
                        symbol: s,
                        first: seen[s],
                        second: b,
                    });
                }
                seen[s] = b;
            }
        }
    }
    Ok(())
}

/// A verified latin square on symbols `0..order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Table", into = "Table")]
pub struct LatinSquare {
    table: Table,
}

impl LatinSquare {
    pub fn new(table: Table) -> Result<Self, LatinError> {
        verify_latin(&table).map_err(LatinError::NotLatin)?;
        Ok(LatinSquare { table })
    }

    /// `(i + j) mod n`.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        LatinSquare { table }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn get(&self, row: usize, col: usize) -> usize {
        self.table[row][col]
    }

    pub fn into_table(self) -> Table {
        self.table
    }
}

impl TryFrom<Table> for LatinSquare {
    type Error = LatinError;

    fn try_from(t: Table) -> Result<Self, Self::Error> {
        LatinSquare::new(t)
    }
}

impl From<LatinSquare> for Table {
    fn from(s: LatinSquare) -> Table {
        s.table
    }
}

fn check_rectangle(rect: &[Vec<usize>], width: usize) -> Result<(), LatinError> {
    if rect.len() >= width {
        return Err(LatinError::RectangleFull { rows: rect.len(), width });
    }
    let mut col_seen = vec![vec![false; width]; width];
    for (i, row) in rect.iter().enumerate() {
        if row.len() != width {
            return Err(LatinError::RaggedRectangle { row: i, len: row.len(), width });
        }
        let mut row_seen = vec![false; width];
        for (j, &s) in row.iter().enumerate() {
            if s >= width {
                return Err(LatinError::NotLatin(LatinViolation::SymbolOutOfRange {
                    row: i,
                    col: j,
                    symbol: s,
                }));
            }
            if std::mem::replace(&mut row_seen[s], true) {
                return Err(LatinError::RepeatedSymbol { line: Line::Row, index: i, symbol: s });
            }
            if std::mem::replace(&mut col_seen[j][s], true) {
                return Err(LatinError::RepeatedSymbol { line: Line::Column, index: j, symbol: s });
            }
        }
    }
    Ok(())
}

/// Adds one row to an `r × n` latin rectangle on `n` symbols.
///
/// The new entry of column `c` is drawn from the symbols missing from `c`.
/// The column/missing-symbol graph is regular, so an SDR always exists.
pub fn extend_rectangle(rect: &[Vec<usize>], width: usize) -> Result<Table, LatinError> {
    check_rectangle(rect, width)?;
    let row = next_row(rect, width);
    let mut out = rect.to_vec();
    out.push(row);
    Ok(out)
}

fn next_row(rect: &[Vec<usize>], width: usize) -> Vec<usize> {
    let mut present = vec![vec![false; width]; width];
    for row in rect {
        for (c, &s) in row.iter().enumerate() {
            present[c][s] = true;
        }
    }
    let sets = (0..width)
        .map(|c| (0..width).filter(|&s| !present[c][s]).collect())
        .collect();
    let g = SetSystem::new(width, sets).expect("symbols are in range");
    match sdr(&g) {
        SdrResult::Representatives(reps) => reps,
        SdrResult::Violator(v) => unreachable!("regular bipartite graph violates Hall: {v:?}"),
    }
}

/// Partially filled square with no symbol repeated in a row or column.
/// Symbols are arbitrary labels; `symbol_count` counts the distinct ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPartial", into = "RawPartial")]
pub struct PartialLatinSquare {
    order: usize,
    cells: Vec<(usize, usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawPartial {
    order: usize,
    cells: Vec<(usize, usize, usize)>,
}

impl TryFrom<RawPartial> for PartialLatinSquare {
    type Error = LatinError;

    fn try_from(r: RawPartial) -> Result<Self, Self::Error> {
        PartialLatinSquare::new(r.order, r.cells)
    }
}

impl From<PartialLatinSquare> for RawPartial {
    fn from(p: PartialLatinSquare) -> Self {
        RawPartial { order: p.order, cells: p.cells }
    }
}

impl PartialLatinSquare {
    /// Cells are `(row, col, symbol)` triples; they are stored sorted.
    pub fn new(order: usize, cells: Vec<(usize, usize, usize)>) -> Result<Self, LatinError> {
        let mut cells = cells;
        cells.sort_unstable();
        for w in cells.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(LatinError::DuplicateCell { row: w[0].0, col: w[0].1 });
            }
        }
        let mut rows: BTreeMap<(usize, usize), ()> = BTreeMap::new();
        let mut cols: BTreeMap<(usize, usize), ()> = BTreeMap::new();
        for &(r, c, s) in &cells {
            if r >= order || c >= order {
                return Err(LatinError::CellOutOfRange { row: r, col: c, order });
            }
            if rows.insert((r, s), ()).is_some() {
                return Err(LatinError::RepeatedSymbol { line: Line::Row, index: r, symbol: s });
            }
            if cols.insert((c, s), ()).is_some() {
                return Err(LatinError::RepeatedSymbol { line: Line::Column, index: c, symbol: s });
            }
        }
        Ok(PartialLatinSquare { order, cells })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cells(&self) -> &[(usize, usize, usize)] {
        &self.cells
    }

    /// Distinct symbol labels, ascending.
    pub fn symbols(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.cells.iter().map(|c| c.2).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols().len()
    }

    pub fn get(&self, row: usize, col: usize) -> Option<usize> {
        self.cells
            .binary_search_by(|&(r, c, _)| (r, c).cmp(&(row, col)))
            .ok()
            .map(|i| self.cells[i].2)
    }

    /// Order `max(2n, k)` of the square [`embed_partial`] produces.
    pub fn embedding_order(&self) -> usize {
        (2 * self.order).max(self.symbol_count())
    }
}

/// A latin square together with the injection of partial-square labels into
/// its symbols. Rows and columns `0..n` of the square are those of the partial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub square: LatinSquare,
    /// `(label, symbol index)` pairs sorted by label.
    pub symbol_map: Vec<(usize, usize)>,
}

impl Embedding {
    pub fn symbol_of(&self, label: usize) -> Option<usize> {
        self.symbol_map
            .binary_search_by_key(&label, |&(l, _)| l)
            .ok()
            .map(|i| self.symbol_map[i].1)
    }

    /// Whether every filled cell of `p` holds the image of its label.
    pub fn restricts_to(&self, p: &PartialLatinSquare) -> bool {
        p.cells().iter().all(|&(r, c, s)| {
            r < self.square.order()
                && c < self.square.order()
                && self.symbol_of(s) == Some(self.square.get(r, c))
        })
    }
}

/// Labels below `n` keep their value as symbol index so that a label naming
/// row `i` also names symbol `i`. Larger labels take the lowest free indices
/// at or above `n`, then any remaining free index.
fn inject_symbols(labels: &[usize], n: usize, r: usize) -> Vec<(usize, usize)> {
    let mut taken = vec![false; r];
    let mut map = Vec::with_capacity(labels.len());
    for &l in labels.iter().filter(|&&l| l < n) {
        taken[l] = true;
        map.push((l, l));
    }
    let mut free = (n..r).chain(0..n).filter(|&i| !taken[i]).collect::<Vec<_>>().into_iter();
    for &l in labels.iter().filter(|&&l| l >= n) {
        map.push((l, free.next().expect("k <= r leaves room")));
    }
    map.sort_unstable();
    map
}

/// Completes `p` to a latin square of order `r = max(2n, k)`.
///
/// The `n × n` block is filled row by row from symbols unused in the row and
/// column (each open cell has more options than the row has open cells). It
/// is then widened to `n × r` one column at a time, each column forced to
/// carry every symbol that would otherwise run out of room, and finally
/// completed to `r × r` by [`extend_rectangle`].
pub fn embed_partial(p: &PartialLatinSquare) -> Result<Embedding, LatinError> {
    let n = p.order();
    let labels = p.symbols();
    let r = p.embedding_order();
    let symbol_map = inject_symbols(&labels, n, r);
    if p.cells().is_empty() {
        return Ok(Embedding { square: LatinSquare::cyclic(r), symbol_map });
    }
    let index: BTreeMap<usize, usize> = symbol_map.iter().copied().collect();

    let mut block = vec![vec![usize::MAX; n]; n];
    for &(i, j, s) in p.cells() {
        block[i][j] = index[&s];
    }
    fill_block(&mut block, r);
    let mut rect = block;
    for c in n..r {
        widen(&mut rect, c, r);
    }
    while rect.len() < r {
        let row = next_row(&rect, r);
        rect.push(row);
    }
    let square = LatinSquare::new(rect)?;
    Ok(Embedding { square, symbol_map })
}

fn fill_block(block: &mut [Vec<usize>], r: usize) {
    let n = block.len();
    for i in 0..n {
        let open: Vec<usize> = (0..n).filter(|&j| block[i][j] == usize::MAX).collect();
        if open.is_empty() {
            continue;
        }
        let mut banned_row = vec![false; r];
        block[i].iter().filter(|&&s| s != usize::MAX).for_each(|&s| banned_row[s] = true);
        let sets = open
            .iter()
            .map(|&j| {
                let mut banned = banned_row.clone();
                for row in block.iter() {
                    if row[j] != usize::MAX {
                        banned[row[j]] = true;
                    }
                }
                (0..r).filter(|&s| !banned[s]).collect()
            })
            .collect();
        let g = SetSystem::new(r, sets).expect("symbols are in range");
        match sdr(&g) {
            SdrResult::Representatives(reps) => {
                for (&j, s) in open.iter().zip(reps) {
                    block[i][j] = s;
                }
            }
            SdrResult::Violator(v) => unreachable!("open cells outnumber their options: {v:?}"),
        }
    }
}

/// Appends column `c` to the `n × c` rectangle on `r` symbols, keeping it
/// extendable to `n × r`: a symbol seen `n + c - r` times must appear now.
fn widen(rect: &mut [Vec<usize>], c: usize, r: usize) {
    let n = rect.len();
    let mut count = vec![0usize; r];
    let mut in_row = vec![vec![false; r]; n];
    for (i, row) in rect.iter().enumerate() {
        for &s in row {
            count[s] += 1;
            in_row[i][s] = true;
        }
    }
    let critical: Vec<usize> = (0..r).filter(|&s| count[s] + r <= n + c).collect();
    let by_symbol = critical
        .iter()
        .map(|&s| (0..n).filter(|&i| !in_row[i][s]).collect())
        .collect();
    let forced = max_matching(&SetSystem::new(n, by_symbol).expect("rows are in range"));
    let mut initial = vec![None; n];
    for (k, row) in forced.iter().enumerate() {
        let row = row.expect("critical symbols always fit");
        initial[row] = Some(critical[k]);
    }
    let by_row = (0..n)
        .map(|i| (0..r).filter(|&s| !in_row[i][s]).collect())
        .collect();
    let g = SetSystem::new(r, by_row).expect("symbols are in range");
    let m = max_matching_from(&g, &initial).expect("initial matching is valid");
    for (row, s) in rect.iter_mut().zip(m) {
        row.push(s.expect("rows always saturate"));
    }
}

/// A finite piece `S` of a discrete group with the partial multiplication
/// `S × S → universe`. `universe = None` means the whole group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupWindow {
    model: GroupModel,
    elements: Vec<GroupElement>,
    universe: Option<CompactRegion>,
}

/// [`window_to_partial`] output: the partial table plus the element named by
/// each symbol label. Labels `0..n` are the window elements in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowPartial {
    pub partial: PartialLatinSquare,
    pub symbols: Vec<GroupElement>,
}

impl GroupWindow {
    pub fn new(
        model: GroupModel,
        elements: Vec<GroupElement>,
        universe: Option<CompactRegion>,
    ) -> Result<Self, LatinError> {
        if !model.is_exact() {
            return Err(LatinError::NotDiscrete(model));
        }
        let mut sorted = Vec::with_capacity(elements.len());
        for e in &elements {
            model.validate(e)?;
            sorted.push(model.canonicalize(e));
        }
        let elements = sorted.clone();
        sorted.sort_by(GroupElement::lex_cmp);
        if let Some(w) = sorted.windows(2).find(|w| w[0].lex_cmp(&w[1]) == Ordering::Equal) {
            return Err(LatinError::DuplicateElement(w[0].clone()));
        }
        if let Some(u) = &universe {
            if u.model() != model {
                return Err(GroupError::InvalidRegion(format!(
                    "universe belongs to {}, not {model}",
                    u.model()
                ))
                .into());
            }
        }
        Ok(GroupWindow { model, elements, universe })
    }

    /// The lattice points of a region, with that region as universe.
    pub fn from_region(region: &CompactRegion) -> Result<Self, LatinError> {
        let model = region.model();
        let elements = model.lattice_points(region, 1.0)?;
        Self::new(model, elements, Some(region.clone()))
    }

    pub fn model(&self) -> GroupModel {
        self.model
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn universe(&self) -> Option<&CompactRegion> {
        self.universe.as_ref()
    }

    /// `a · b` when it lies in the universe.
    pub fn product(&self, a: usize, b: usize) -> Option<GroupElement> {
        let p = self.model.mul(&self.elements[a], &self.elements[b]);
        match &self.universe {
            Some(u) if !u.contains(&p) => None,
            _ => Some(p),
        }
    }

    /// Carrier-index embedding for a square built from this window: symbol
    /// indices of labels map to their elements, the rest to distinct group
    /// elements away from every labelled one.
    pub fn embedding(&self, wp: &WindowPartial, e: &Embedding) -> Result<Vec<GroupElement>, LatinError> {
        let order = e.square.order();
        let mut out: Vec<Option<GroupElement>> = vec![None; order];
        for &(label, idx) in &e.symbol_map {
            out[idx] = Some(wp.symbols[label].clone());
        }
        // rows 0..n are the window elements even when a label never occurs
        for (i, el) in self.elements.iter().enumerate() {
            if out[i].is_none() {
                out[i] = Some(el.clone());
            }
        }
        let needed = out.iter().filter(|x| x.is_none()).count();
        let used: Vec<GroupElement> = out.iter().flatten().cloned().collect();
        let mut fillers = self.fillers(&used, needed)?.into_iter();
        Ok(out
            .into_iter()
            .map(|x| x.unwrap_or_else(|| fillers.next().expect("enough fillers")))
            .collect())
    }

    fn fillers(&self, used: &[GroupElement], needed: usize) -> Result<Vec<GroupElement>, LatinError> {
        if needed == 0 {
            return Ok(Vec::new());
        }
        match self.model {
            GroupModel::Cyclic(n) => {
                let free: Vec<GroupElement> = (0..n)
                    .map(|i| GroupElement::scalar(i as f64))
                    .filter(|x| !used.iter().any(|u| u.lex_cmp(x) == Ordering::Equal))
                    .take(needed)
                    .collect();
                if free.len() < needed {
                    return Err(LatinError::NoRoomForFillers { model: self.model, needed });
                }
                Ok(free)
            }
            _ => {
                let far = used
                    .iter()
                    .flat_map(|u| u.coords().iter().map(|x| x.abs()))
                    .fold(0.0, f64::max);
                let base = far.ceil() + 1000.0;
                let dim = self.model.dim();
                Ok((0..needed)
                    .map(|t| {
                        let mut c = vec![0.0; dim];
                        c[0] = base + 1000.0 * t as f64;
                        GroupElement::new(&c)
                    })
                    .collect())
            }
        }
    }
}

/// Rows and columns indexed by the window; cell `(a, b)` holds the label of
/// `a · b` whenever that product lies in the universe. Products outside the
/// window get labels `n, n+1, ..` in lexicographic order of the element.
pub fn window_to_partial(w: &GroupWindow) -> WindowPartial {
    let n = w.elements.len();
    let mut extra: Vec<GroupElement> = Vec::new();
    let mut raw = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if let Some(p) = w.product(a, b) {
                raw.push((a, b, p));
            }
        }
    }
    let label_in_window = |p: &GroupElement| {
        w.elements.iter().position(|e| e.lex_cmp(p) == Ordering::Equal)
    };
    for (_, _, p) in &raw {
        if label_in_window(p).is_none() {
            extra.push(p.clone());
        }
    }
    extra.sort_by(GroupElement::lex_cmp);
    extra.dedup_by(|a, b| a.lex_cmp(b) == Ordering::Equal);
    let cells = raw
        .iter()
        .map(|(a, b, p)| {
            let label = label_in_window(p).unwrap_or_else(|| {
                n + extra
                    .binary_search_by(|e| e.lex_cmp(p))
                    .expect("collected above")
            });
            (*a, *b, label)
        })
        .collect();
    let partial = PartialLatinSquare::new(n, cells).expect("group cancellation forbids repeats");
    let mut symbols = w.elements.clone();
    symbols.extend(extra);
    WindowPartial { partial, symbols }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn verify_examples() {
        let z3 = LatinSquare::cyclic(3);
        assert_eq!(verify_latin(z3.table()), Ok(()));
        let bad = vec![vec![0, 1, 1], vec![1, 2, 0], vec![2, 0, 1]];
        assert_eq!(
            verify_latin(&bad),
            Err(LatinViolation::Duplicate { line: Line::Row, index: 0, symbol: 1, first: 1, second: 2 })
        );
        let bad_col = vec![vec![0, 1], vec![0, 1]];
        assert!(matches!(
            verify_latin(&bad_col),
            Err(LatinViolation::Duplicate { line: Line::Column, index: 0, .. })
        ));
        assert!(matches!(verify_latin(&[vec![0, 1]]), Err(LatinViolation::NotSquare { .. })));
    }

    #[test]
    fn rectangle_examples() {
        assert_eq!(extend_rectangle(&[vec![0, 1]], 2).unwrap(), vec![vec![0, 1], vec![1, 0]]);
        let r = extend_rectangle(&[vec![0, 1, 2], vec![1, 2, 0]], 3).unwrap();
        assert_eq!(r[2], vec![2, 0, 1]);
        assert!(extend_rectangle(&[vec![0, 0]], 2).is_err());
        assert!(extend_rectangle(&[vec![0, 1], vec![1, 0]], 2).is_err());
    }

    #[test]
    fn random_rectangles_extend() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let sq = random_square(6, &mut rng);
            let mut rect: Table = sq[..3].to_vec();
            while rect.len() < 6 {
                rect = extend_rectangle(&rect, 6).unwrap();
            }
            assert_eq!(verify_latin(&rect), Ok(()));
            assert_eq!(&rect[..3], &sq[..3]);
        }
    }

    fn random_square(n: usize, rng: &mut ChaCha8Rng) -> Table {
        let mut rows: Vec<usize> = (0..n).collect();
        let mut cols = rows.clone();
        let mut syms = rows.clone();
        rows.shuffle(rng);
        cols.shuffle(rng);
        syms.shuffle(rng);
        (0..n).map(|i| (0..n).map(|j| syms[(rows[i] + cols[j]) % n]).collect()).collect()
    }

    #[test]
    fn partial_rejects_repeats() {
        assert!(matches!(
            PartialLatinSquare::new(2, vec![(0, 0, 5), (0, 1, 5)]),
            Err(LatinError::RepeatedSymbol { line: Line::Row, .. })
        ));
        assert!(matches!(
            PartialLatinSquare::new(2, vec![(0, 0, 5), (0, 0, 6)]),
            Err(LatinError::DuplicateCell { .. })
        ));
        assert!(PartialLatinSquare::new(2, vec![(2, 0, 1)]).is_err());
    }

    #[test]
    fn embed_examples() {
        // two rows, three labels
        let p = PartialLatinSquare::new(2, vec![(0, 0, 0), (0, 1, 1), (1, 0, 2)]).unwrap();
        assert_eq!(p.symbol_count(), 3);
        let e = embed_partial(&p).unwrap();
        assert_eq!(e.square.order(), 4);
        assert!(e.restricts_to(&p));

        let empty = PartialLatinSquare::new(3, vec![]).unwrap();
        let e = embed_partial(&empty).unwrap();
        assert_eq!(e.square, LatinSquare::cyclic(6));
    }

    #[test]
    fn integer_window_embeds_addition() {
        let m = GroupModel::Integers;
        let elems: Vec<GroupElement> = (-2..=2).map(|x| GroupElement::scalar(x as f64)).collect();
        let w = GroupWindow::new(m, elems, None).unwrap();
        let wp = window_to_partial(&w);
        assert_eq!(wp.partial.symbol_count(), 9);
        let e = embed_partial(&wp.partial).unwrap();
        assert_eq!(e.square.order(), 10);
        for a in 0..5 {
            for b in 0..5 {
                let sum = wp.symbols[e.symbol_map.iter().find(|m| m.1 == e.square.get(a, b)).unwrap().0]
                    .coords()[0];
                assert_eq!(sum, (a as f64 - 2.0) + (b as f64 - 2.0));
            }
        }
        let j = w.embedding(&wp, &e).unwrap();
        for (i, el) in w.elements().iter().enumerate() {
            assert_eq!(&j[i], el);
        }
        let mut sorted = j.clone();
        sorted.sort_by(GroupElement::lex_cmp);
        sorted.dedup();
        assert_eq!(sorted.len(), 10);
    }

    #[test]
    fn window_examples() {
        let m = GroupModel::Cyclic(4);
        let w = GroupWindow::from_region(&CompactRegion::whole(m).unwrap()).unwrap();
        let wp = window_to_partial(&w);
        assert_eq!(wp.partial.cells().len(), 16);
        assert_eq!(wp.partial.symbol_count(), 4);

        let m = GroupModel::Integers;
        let w = GroupWindow::new(
            m,
            (-1..=1).map(|x| GroupElement::scalar(x as f64)).collect(),
            None,
        )
        .unwrap();
        let wp = window_to_partial(&w);
        assert_eq!(wp.symbols[3], GroupElement::scalar(-2.0));
        assert_eq!(wp.symbols[4], GroupElement::scalar(2.0));
        assert_eq!(wp.partial.get(0, 0), Some(3));
        assert_eq!(wp.partial.get(2, 2), Some(4));

        let bounded = GroupWindow::new(
            m,
            (-1..=1).map(|x| GroupElement::scalar(x as f64)).collect(),
            Some(CompactRegion::new(m, vec![[-1.0, 1.0]]).unwrap()),
        )
        .unwrap();
        let wp = window_to_partial(&bounded);
        assert_eq!(wp.partial.cells().len(), 7);
        assert_eq!(wp.partial.get(0, 0), None);
    }

    /// 3×3 integer upper unitriangular matrices.
    fn matrix(e: &GroupElement) -> [[i64; 3]; 3] {
        let c = e.coords();
        [[1, c[0] as i64, c[2] as i64], [0, 1, c[1] as i64], [0, 0, 1]]
    }

    fn matmul(a: [[i64; 3]; 3], b: [[i64; 3]; 3]) -> [[i64; 3]; 3] {
        let mut out = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        out
    }

    #[test]
    fn heisenberg_window_matches_matrix_product() {
        let m = GroupModel::Heisenberg;
        let region = CompactRegion::new(m, vec![[-1.0, 1.0]; 3]).unwrap();
        let w = GroupWindow::from_region(&region).unwrap();
        let wp = window_to_partial(&w);
        for &(a, b, s) in wp.partial.cells() {
            let want = matmul(matrix(&w.elements()[a]), matrix(&w.elements()[b]));
            assert_eq!(matrix(&wp.symbols[s]), want);
            assert!(region.contains(&wp.symbols[s]));
        }
        let e = embed_partial(&wp.partial).unwrap();
        assert_eq!(e.square.order(), 54);
        assert!(e.restricts_to(&wp.partial));
    }

    #[test]
    fn non_discrete_window_rejected() {
        assert!(matches!(
            GroupWindow::new(GroupModel::Circle, vec![], None),
            Err(LatinError::NotDiscrete(_))
        ));
    }

    fn random_partial(n: usize, extra: usize, density: f64, seed: u64) -> PartialLatinSquare {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let big = random_square(n + extra, &mut rng);
        let cells = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(density))
            .map(|(i, j)| (i, j, big[i][j] * 7 + 3))
            .collect();
        PartialLatinSquare::new(n, cells).unwrap()
    }

    proptest! {
        #[test]
        fn embedding_is_latin_and_restricts(n in 1usize..8, extra in 0usize..12, density in 0.0f64..1.0, seed: u64) {
            let p = random_partial(n, extra, density, seed);
            let e = embed_partial(&p).unwrap();
            prop_assert_eq!(e.square.order(), p.embedding_order());
            prop_assert_eq!(verify_latin(e.square.table()), Ok(()));
            prop_assert!(e.restricts_to(&p));
        }

        #[test]
        fn rectangle_extension_preserves_prefix(n in 2usize..9, rows in 1usize..8, seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = rows.min(n - 1);
            let sq = random_square(n, &mut rng);
            let r = extend_rectangle(&sq[..rows], n).unwrap();
            prop_assert_eq!(&r[..rows], &sq[..rows]);
            if r.len() < n {
                prop_assert!(check_rectangle(&r, n).is_ok());
            } else {
                prop_assert_eq!(verify_latin(&r), Ok(()));
            }
        }
    }
}
