use qapprox::matching::{max_matching, matching_size, sdr, SdrResult, SetSystem};

/// SDR existence by dynamic programming over the sets of used elements.
fn has_sdr(masks: &[u32]) -> bool {
    let mut states: Vec<u32> = vec![0];
    for &m in masks {
        let mut next = Vec::new();
        for &used in &states {
            let free = m & !used;
            let mut bits = free;
            while bits != 0 {
                let b = bits & bits.wrapping_neg();
                next.push(used | b);
                bits &= bits - 1;
            }
        }
        next.sort_unstable();
        next.dedup();
        states = next;
    }
    !states.is_empty()
}

fn to_system(u: usize, masks: &[u32]) -> SetSystem {
    let sets = masks.iter().map(|&m| (0..u).filter(|&b| m >> b & 1 == 1).collect()).collect();
    SetSystem::new(u, sets).unwrap()
}

/// Calls `visit` on every nondecreasing sequence of `m` masks over `u` bits.
fn multisets(u: usize, m: usize, visit: &mut impl FnMut(&[u32])) {
    fn go(start: u32, limit: u32, m: usize, cur: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
        if cur.len() == m {
            visit(cur);
            return;
        }
        for mask in start..limit {
            cur.push(mask);
            go(mask, limit, m, cur, visit);
            cur.pop();
        }
    }
    go(0, 1 << u, m, &mut Vec::new(), visit);
}

#[test]
fn sdr_agrees_with_oracle_on_all_small_systems() {
    let mut checked = 0u64;
    for u in 0..=4 {
        for m in 0..=6 {
            multisets(u, m, &mut |masks| {
                let g = to_system(u, masks);
                let result = sdr(&g);
                assert!(result.verify(&g), "{masks:?}");
                let expected = has_sdr(masks);
                assert_eq!(matches!(result, SdrResult::Representatives(_)), expected, "{masks:?}");
                assert_eq!(matching_size(&max_matching(&g)) == m, expected);
                checked += 1;
            });
        }
    }
    // sum over u ≤ 4, m ≤ 6 of C(2^u + m - 1, m)
    assert_eq!(checked, 77_861);
}

#[test]
fn set_order_does_not_change_feasibility() {
    multisets(3, 4, &mut |masks| {
        let mut rev = masks.to_vec();
        rev.reverse();
        let a = matches!(sdr(&to_system(3, masks)), SdrResult::Representatives(_));
        let b = matches!(sdr(&to_system(3, &rev)), SdrResult::Representatives(_));
        assert_eq!(a, b);
    });
}
