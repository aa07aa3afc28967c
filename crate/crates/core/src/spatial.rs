//! Bucket index over chart coordinates, used to prune ball queries.

use std::collections::HashMap;

use crate::group_models::{GroupElement, GroupModel, MAX_DIM};

type Key = [i64; MAX_DIM];

pub(crate) struct ChartIndex {
    model: GroupModel,
    width: Vec<f64>,
    /// Number of cells along periodic axes.
    wrap: Vec<Option<i64>>,
    buckets: HashMap<Key, Vec<u32>>,
}

impl ChartIndex {
    /// Indexes `points` into cells roughly `cell` chart units wide.
    pub(crate) fn new(model: GroupModel, points: &[GroupElement], cell: f64) -> Self {
        let dim = model.dim();
        let mut width = vec![cell.max(1e-12); dim];
        let mut wrap = vec![None; dim];
        for d in 0..dim {
            if model.is_exact() {
                width[d] = width[d].max(1.0);
            }
            if let Some(p) = model.period(d) {
                let cells = (p / width[d]).floor().max(1.0);
                width[d] = p / cells;
                wrap[d] = Some(cells as i64);
            }
        }
        let mut index = ChartIndex {
            model,
            width,
            wrap,
            buckets: HashMap::new(),
        };
        for (i, p) in points.iter().enumerate() {
            let key = index.key(&model.chart(p));
            index.buckets.entry(key).or_default().push(i as u32);
        }
        index
    }

    fn cell_of(&self, d: usize, x: f64) -> i64 {
        let c = (x / self.width[d]).floor() as i64;
        match self.wrap[d] {
            Some(n) => c.rem_euclid(n),
            None => c,
        }
    }

    fn key(&self, chart: &[f64]) -> Key {
        let mut k = [0i64; MAX_DIM];
        for (d, &x) in chart.iter().enumerate() {
            k[d] = self.cell_of(d, x);
        }
        k
    }

    /// Indices of points whose chart coordinates may lie within `half` of
    /// `center`'s chart coordinates; sorted ascending. Callers filter exactly.
    pub(crate) fn candidates(&self, center: &GroupElement, half: &[f64]) -> Vec<u32> {
        let c = self.model.chart(center);
        let dim = c.len();
        let mut ranges: Vec<Vec<i64>> = Vec::with_capacity(dim);
        for d in 0..dim {
            let lo = ((c[d] - half[d]) / self.width[d]).floor() as i64;
            let hi = ((c[d] + half[d]) / self.width[d]).floor() as i64;
            let axis: Vec<i64> = match self.wrap[d] {
                Some(n) if hi - lo + 1 >= n => (0..n).collect(),
                Some(n) => {
                    let mut v: Vec<i64> = (lo..=hi).map(|k| k.rem_euclid(n)).collect();
                    v.sort_unstable();
                    v.dedup();
                    v
                }
                None => (lo..=hi).collect(),
            };
            ranges.push(axis);
        }
        let mut out = Vec::new();
        let mut idx = vec![0usize; dim];
        'odometer: loop {
            let mut key = [0i64; MAX_DIM];
            for d in 0..dim {
                key[d] = ranges[d][idx[d]];
            }
            if let Some(b) = self.buckets.get(&key) {
                out.extend_from_slice(b);
            }
            let mut d = dim;
            loop {
                if d == 0 {
                    break 'odometer;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < ranges[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
        out.sort_unstable();
        out
    }
}
