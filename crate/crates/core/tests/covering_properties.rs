use proptest::prelude::*;
use qapprox::covering::{build_grid, covering_number_exact};
use qapprox::{CompactRegion, GroupElement, GroupModel, Neighborhood};

fn circle_points(spacing: f64) -> Vec<GroupElement> {
    let n = (1.0 / spacing).round() as usize;
    (0..n).map(|i| GroupElement::scalar(i as f64 / n as f64)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Centres spaced `2r` apart cover the circle optimally; the union of
    /// any `S` of their balls needs exactly `|S|` of them.
    #[test]
    fn union_of_optimal_balls_needs_each_ball(mask in 1u32..(1 << 8)) {
        let m = GroupModel::Circle;
        let r = 1.0 / 16.0;
        let centers = circle_points(2.0 * r);
        let chosen: Vec<usize> = (0..8).filter(|&i| mask >> i & 1 == 1).collect();
        let points: Vec<GroupElement> = circle_points(1.0 / 640.0)
            .into_iter()
            .filter(|x| chosen.iter().any(|&c| m.distance(&centers[c], x) <= r - 1e-9))
            .collect();
        let exact = covering_number_exact(&points, &centers, r, m).unwrap();
        prop_assert_eq!(exact.value, chosen.len());
    }

    /// Grid points whose ball meets a sampled `M` already cover `M`, so there
    /// are at least `(M:O)` of them.
    #[test]
    fn preimage_of_sample_bounds_covering_number(seeds in proptest::collection::vec(0.0f64..1.0, 1..12)) {
        let m = GroupModel::Circle;
        let o = Neighborhood::new(0.1).unwrap();
        let f = build_grid(m, &CompactRegion::whole(m).unwrap(), o).unwrap();
        let sample: Vec<GroupElement> = seeds.iter().map(|&x| GroupElement::scalar(x)).collect();
        let hit: Vec<GroupElement> = f
            .centers
            .iter()
            .filter(|c| sample.iter().any(|x| m.in_translate(c, x, o.radius())))
            .cloned()
            .collect();
        let exact = covering_number_exact(&sample, &hit, o.radius(), m).unwrap();
        prop_assert!(hit.len() >= exact.value);
    }
}
