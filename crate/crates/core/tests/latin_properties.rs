use proptest::prelude::*;
use qapprox::latin::{embed_partial, verify_latin, window_to_partial, GroupWindow, PartialLatinSquare};
use qapprox::{CompactRegion, GroupElement, GroupModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random cells with labels below `k`, skipping any that would repeat.
fn random_partial(n: usize, k: usize, fill: f64, seed: u64) -> PartialLatinSquare {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = vec![vec![None; n]; n];
    let mut cells = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if !rng.gen_bool(fill) {
                continue;
            }
            let label = rng.gen_range(0..k);
            let clash = (0..n).any(|x| grid[r][x] == Some(label) || grid[x][c] == Some(label));
            if !clash {
                grid[r][c] = Some(label);
                cells.push((r, c, label));
            }
        }
    }
    PartialLatinSquare::new(n, cells).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_partials_embed(n in 1usize..8, extra in 0usize..10, fill in 0.0f64..1.0, seed in any::<u64>()) {
        let p = random_partial(n, n + extra, fill, seed);
        let e = embed_partial(&p).unwrap();
        prop_assert!(verify_latin(e.square.table()).is_ok());
        prop_assert_eq!(e.square.order(), p.embedding_order());
        prop_assert_eq!(p.embedding_order(), (2 * n).max(p.symbol_count()));
        prop_assert!(e.restricts_to(&p));
    }

    #[test]
    fn discrete_windows_give_valid_partials(kind in 0usize..3, size in 1usize..8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (model, mut elements) = match kind {
            0 => {
                let order = rng.gen_range(size as u32..=24);
                (GroupModel::Cyclic(order), (0..order).map(|x| GroupElement::scalar(x as f64)).collect::<Vec<_>>())
            }
            1 => (GroupModel::Integers, (-12..=12).map(|x| GroupElement::scalar(x as f64)).collect()),
            _ => {
                let mut all = Vec::new();
                for x in -1..=1 {
                    for y in -1..=1 {
                        for z in -1..=1 {
                            all.push(GroupElement::new(&[x as f64, y as f64, z as f64]));
                        }
                    }
                }
                (GroupModel::Heisenberg, all)
            }
        };
        for i in 0..size.min(elements.len()) {
            let j = rng.gen_range(i..elements.len());
            elements.swap(i, j);
        }
        elements.truncate(size);
        let w = GroupWindow::new(model, elements, None).unwrap();
        let wp = window_to_partial(&w);
        let n = w.elements().len();
        prop_assert_eq!(wp.partial.cells().len(), n * n);
        let e = embed_partial(&wp.partial).unwrap();
        prop_assert!(verify_latin(e.square.table()).is_ok());
        prop_assert!(e.restricts_to(&wp.partial));
        for &(a, b, label) in wp.partial.cells() {
            let prod = model.multiply(&w.elements()[a], &w.elements()[b]).unwrap();
            prop_assert_eq!(model.distance(&prod, &wp.symbols[label]), 0.0);
        }
    }
}

#[test]
fn bounded_universe_leaves_cells_open() {
    let m = GroupModel::Integers;
    let region = CompactRegion::new(m, vec![[-2.0, 2.0]]).unwrap();
    let w = GroupWindow::from_region(&region).unwrap();
    let wp = window_to_partial(&w);
    // sums of two elements of [-2, 2] landing in [-2, 2]
    assert_eq!(wp.partial.cells().len(), 19);
    assert_eq!(wp.symbols.len(), 5);
    let e = embed_partial(&wp.partial).unwrap();
    assert_eq!(e.square.order(), 10);
}
