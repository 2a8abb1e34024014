use proptest::prelude::*;
use ringtax_core::equilibrium::{
    build_price_subgame, max_deviation_gain, mixed_nash, solve_subgame, solve_two_stage, support_indifference_gap,
    AxisGrid, BimatrixGame, StrategyGrid,
};
use ringtax_core::geography::ring_distance;
use ringtax_core::numeric::ordered_sum;
use ringtax_core::taxation::effective_price;
use ringtax_core::{Executor, Geography, MarketConfig, Sequential, TaxKind, TaxScheme};

/// Evaluates jobs back to front, to expose order dependence.
struct Reversed;

impl Executor for Reversed {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let mut out: Vec<T> = (0..len).rev().map(f).collect();
        out.reverse();
        out
    }
}

fn tax_kind() -> impl Strategy<Value = TaxKind> {
    prop_oneof![Just(TaxKind::None), Just(TaxKind::Cardinal), Just(TaxKind::Ordinal)]
}

fn scheme() -> impl Strategy<Value = TaxScheme> {
    (tax_kind(), 0.0..2.0f64, 0.25..3.0f64).prop_map(|(k, l, g)| TaxScheme::new(k, l, g).unwrap())
}

/// Distinct firm positions plus buyer positions on a unit ring.
fn geography(max_firms: usize) -> impl Strategy<Value = Geography> {
    (proptest::collection::btree_set(0u32..1000, 1..=max_firms), proptest::collection::vec(0.0..1.0f64, 1..10))
        .prop_map(|(firms, buyers)| {
            Geography::new(1.0, firms.into_iter().map(|k| k as f64 / 1000.0).collect(), buyers).unwrap()
        })
}

fn market(max_firms: usize) -> impl Strategy<Value = MarketConfig> {
    (geography(max_firms), scheme(), 50.0..150.0f64).prop_flat_map(|(g, tax, u)| {
        let f = g.firm_count();
        proptest::collection::vec(0.0..120.0f64, f)
            .prop_map(move |costs| MarketConfig::new(g.clone(), tax, u, costs).unwrap())
    })
}

fn market_with_profile(max_firms: usize) -> impl Strategy<Value = (MarketConfig, Vec<f64>, Vec<f64>)> {
    market(max_firms).prop_flat_map(|m| {
        let f = m.firm_count();
        (
            Just(m),
            proptest::collection::vec(prop_oneof![Just(0.0), 0.0..400.0f64], f),
            proptest::collection::vec(prop_oneof![Just(100.0), 0.0..150.0f64], f),
        )
    })
}

fn game(max: usize) -> impl Strategy<Value = BimatrixGame> {
    (1..=max, 1..=max).prop_flat_map(|(m, n)| {
        // coarse integer payoffs produce plenty of ties and degenerate games
        let cell = prop_oneof![(-3i32..4).prop_map(f64::from), -5.0..5.0f64];
        (proptest::collection::vec(cell.clone(), m * n), proptest::collection::vec(cell, m * n))
            .prop_map(move |(a, b)| BimatrixGame::new(m, n, a, b).unwrap())
    })
}

proptest! {
    #[test]
    fn ring_distance_is_a_symmetric_bounded_metric(
        x in 0.0..3.0f64, y in 0.0..3.0f64, z in 0.0..3.0f64, l in 0.5..3.0f64,
    ) {
        let (x, y, z) = (x % l, y % l, z % l);
        let dxy = ring_distance(x, y, l).unwrap();
        prop_assert_eq!(dxy, ring_distance(y, x, l).unwrap());
        prop_assert!((0.0..=l / 2.0).contains(&dxy));
        let dxz = ring_distance(x, z, l).unwrap();
        let dyz = ring_distance(y, z, l).unwrap();
        prop_assert!(dxz <= dxy + dyz + 1e-12);
    }

    #[test]
    fn ranks_are_permutations_sorted_by_distance(g in geography(6)) {
        for b in 0..g.buyer_count() {
            let ranks = g.ordinal_ranks(b).unwrap();
            let d = g.cardinal_distances(b).unwrap();
            let mut by_rank = vec![usize::MAX; ranks.len()];
            for (firm, &r) in ranks.iter().enumerate() {
                prop_assert!(r < ranks.len());
                prop_assert_eq!(by_rank[r], usize::MAX);
                by_rank[r] = firm;
            }
            for w in by_rank.windows(2) {
                prop_assert!(d[w[0]] <= d[w[1]]);
            }
        }
    }

    #[test]
    fn translation_keeps_distances_and_ranks(g in geography(4), shift in 0u32..1000) {
        // shifts on a 1/1000 lattice keep firm positions exact
        let s = shift as f64 / 1000.0;
        let moved = |v: &[f64]| v.iter().map(|x| (x + s) % 1.0).collect::<Vec<f64>>();
        let h = Geography::new(1.0, moved(g.firm_positions()), moved(g.buyer_positions())).unwrap();
        for b in 0..g.buyer_count() {
            let (d0, d1) = (g.cardinal_distances(b).unwrap(), h.cardinal_distances(b).unwrap());
            for (a, c) in d0.iter().zip(&d1) {
                prop_assert!((a - c).abs() < 1e-9);
            }
            // rank order may only differ where distances tie up to rounding
            let (r0, r1) = (g.ordinal_ranks(b).unwrap(), h.ordinal_ranks(b).unwrap());
            for i in 0..d0.len() {
                for j in 0..d0.len() {
                    if d0[i] + 1e-9 < d0[j] {
                        prop_assert!(r0[i] < r0[j] && r1[i] < r1[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn effective_price_is_monotone(
        s in scheme(), p in 0.0..200.0f64, dp in 0.0..50.0f64,
        d in 0.0..0.5f64, dd in 0.0..0.5f64, rank in 0usize..4, dl in 0.0..1.0f64,
    ) {
        let e = effective_price(p, d, rank, &s).unwrap();
        prop_assert!(e >= p);
        prop_assert!(effective_price(p + dp, d, rank, &s).unwrap() >= e);
        prop_assert!(effective_price(p, d + dd, rank, &s).unwrap() >= e);
        prop_assert!(effective_price(p, d, rank + 1, &s).unwrap() >= e);
        let stronger = TaxScheme::new(s.kind(), s.lambda() + dl, s.gamma()).unwrap();
        prop_assert!(effective_price(p, d, rank, &stronger).unwrap() >= e);
    }

    #[test]
    fn effective_price_is_homogeneous(s in scheme(), p in 0.0..200.0f64, a in 0.0..5.0f64, d in 0.0..0.5f64, rank in 0usize..3) {
        let lhs = effective_price(a * p, d, rank, &s).unwrap();
        let rhs = a * effective_price(p, d, rank, &s).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn zero_lambda_is_untaxed(k in tax_kind(), g in 0.25..3.0f64, p in 0.0..200.0f64, d in 0.0..0.5f64, rank in 0usize..3) {
        let s = TaxScheme::new(k, 0.0, g).unwrap();
        prop_assert_eq!(effective_price(p, d, rank, &s).unwrap(), p);
    }

    #[test]
    fn two_firm_ordinal_ignores_gamma(l in 0.0..5.0f64, g in 0.1..4.0f64, p in 0.0..200.0f64, d in 0.0..0.5f64, rank in 0usize..2) {
        let base = TaxScheme::ordinal(l).unwrap();
        let other = TaxScheme::new(TaxKind::Ordinal, l, g).unwrap();
        prop_assert_eq!(
            effective_price(p, d, rank, &base).unwrap().to_bits(),
            effective_price(p, d, rank, &other).unwrap().to_bits()
        );
    }

    #[test]
    fn allocation_respects_capacity_and_demand((m, q, p) in market_with_profile(3)) {
        let out = m.allocate(&q, &p).unwrap();
        let (n, f) = (m.buyer_count(), m.firm_count());
        for i in 0..f {
            prop_assert!(out.sold[i] <= q[i]);
            prop_assert!(out.sold[i] >= 0.0);
            let column: Vec<f64> = (0..n).map(|b| out.allocation(b, i)).collect();
            let total = ordered_sum(&column);
            prop_assert!(column.iter().all(|a| *a >= 0.0));
            prop_assert!((total - out.sold[i]).abs() <= 1e-9 * q[i].max(1.0));
            if total <= q[i] {
                prop_assert_eq!(total, out.sold[i]);
            }
        }
        for b in 0..n {
            let cheapest = (0..f).map(|i| m.effective_price(b, i, p[i])).fold(f64::INFINITY, f64::min);
            prop_assert!(out.buyer_total(b) <= (m.u() - cheapest).max(0.0) + 1e-9);
            for i in 0..f {
                if m.effective_price(b, i, p[i]) >= m.u() {
                    prop_assert_eq!(out.allocation(b, i), 0.0);
                }
            }
        }
    }

    #[test]
    fn raising_own_price_never_raises_own_sales((m, q, p) in market_with_profile(3), firm in 0usize..3, dp in 0.0..30.0f64) {
        let firm = firm % m.firm_count();
        let before = m.allocate(&q, &p).unwrap().sold[firm];
        let mut higher = p.clone();
        higher[firm] += dp;
        let after = m.allocate(&q, &higher).unwrap().sold[firm];
        prop_assert!(after <= before + 1e-9 * q[firm].max(1.0));
    }

    #[test]
    fn allocation_is_permutation_invariant_in_firms((m, q, p) in market_with_profile(3)) {
        // listing firms in reverse must produce the mirrored outcome
        let g = m.geography();
        let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<f64>>();
        let swapped = MarketConfig::new(
            Geography::new(g.ring_length(), rev(g.firm_positions()), g.buyer_positions().to_vec()).unwrap(),
            *m.tax(),
            m.u(),
            rev(m.costs()),
        ).unwrap();
        let a = m.allocate(&q, &p).unwrap();
        let b = swapped.allocate(&rev(&q), &rev(&p)).unwrap();
        let ties = (0..m.buyer_count()).any(|k| {
            let d = g.cardinal_distances(k).unwrap();
            (0..d.len()).any(|i| (i + 1..d.len()).any(|j| d[i] == d[j]))
        });
        if !ties {
            prop_assert_eq!(a.sold, rev(&b.sold));
        }
    }

    #[test]
    fn stage_solutions_are_certified(g in game(5)) {
        let sol = solve_subgame(&g).unwrap();
        let profile = sol.profile.to_mixed(g.rows(), g.cols());
        let tol = 1e-9 * g.scale();
        prop_assert!(profile.is_valid());
        prop_assert!(max_deviation_gain(&g, &profile) <= tol);
        prop_assert!(support_indifference_gap(&g, &profile) <= tol);
        let v = g.expected_payoffs(&profile);
        prop_assert!((v[0] - sol.payoffs[0]).abs() <= tol && (v[1] - sol.payoffs[1]).abs() <= tol);
        prop_assert_eq!(solve_subgame(&g).unwrap(), sol);
    }

    #[test]
    fn every_mixed_equilibrium_is_certified(g in game(4)) {
        let tol = 1e-9 * g.scale();
        for p in mixed_nash(&g).unwrap() {
            prop_assert!(p.is_valid());
            prop_assert!(max_deviation_gain(&g, &p) <= tol);
            prop_assert!(support_indifference_gap(&g, &p) <= tol);
        }
    }

    #[test]
    fn transposed_game_mirrors_payoffs(g in game(4)) {
        let a = solve_subgame(&g).unwrap();
        let b = solve_subgame(&g.transpose()).unwrap();
        let tol = 1e-9 * g.scale();
        // selection looks at payoff totals and splits, which transposition preserves
        prop_assert!((a.payoffs[0] + a.payoffs[1] - b.payoffs[0] - b.payoffs[1]).abs() <= 2.0 * tol);
        prop_assert_eq!(a.profile.is_pure(), b.profile.is_pure());
    }
}

fn small_grid(q_max: f64, q_step: f64, p_min: f64, p_step: f64) -> StrategyGrid {
    StrategyGrid::new(
        AxisGrid::new("q", 0.0, q_max, q_step).unwrap(),
        AxisGrid::new("p", p_min, p_min + 4.0 * p_step, p_step).unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn two_stage_solution_is_a_certified_subgame_perfect_equilibrium(
        m in market(2).prop_filter("duopoly", |m| m.firm_count() == 2),
        q_step in 10.0..60.0f64,
        p_min in 60.0..110.0f64,
        p_step in 0.5..6.0f64,
    ) {
        let grid = small_grid(3.0 * q_step, q_step, p_min, p_step);
        let eq = solve_two_stage(&m, &grid, &Sequential).unwrap();
        prop_assert_eq!(&solve_two_stage(&m, &grid, &Reversed).unwrap(), &eq);

        // rebuild the capacity game from independently solved price subgames
        let qs = grid.quantity.points();
        let n = qs.len();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for &q1 in &qs {
            for &q2 in &qs {
                let sub = build_price_subgame(&m, [q1, q2], &grid).unwrap();
                let s = solve_subgame(&sub).unwrap();
                let mixed = s.profile.to_mixed(sub.rows(), sub.cols());
                prop_assert!(max_deviation_gain(&sub, &mixed) <= 1e-9 * sub.scale());
                a.push(s.payoffs[0]);
                b.push(s.payoffs[1]);
            }
        }
        let stage = BimatrixGame::new(n, n, a, b).unwrap();
        let top = eq.quantity_profile.to_mixed(n, n);
        prop_assert!(max_deviation_gain(&stage, &top) <= 1e-9 * stage.scale());
        let v = stage.expected_payoffs(&top);
        for f in 0..2 {
            prop_assert!((v[f] - eq.profits[f]).abs() <= 1e-9 * stage.scale());
        }
        let mass: f64 = eq.cells.iter().map(|c| c.probability).sum();
        prop_assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_markets_give_swapped_firms_equal_standing(
        kind in prop_oneof![Just(TaxKind::None), Just(TaxKind::Ordinal)],
        lambda in 0.0..1.0f64,
        q_step in 10.0..40.0f64,
        p_min in 90.0..110.0f64,
        p_step in 0.5..3.0f64,
    ) {
        let m = MarketConfig::canonical(TaxScheme::new(kind, lambda, 1.0).unwrap());
        let grid = small_grid(4.0 * q_step, q_step, p_min, p_step);
        let eq = solve_two_stage(&m, &grid, &Sequential).unwrap();
        // whenever a symmetric equilibrium is selected it is exactly symmetric
        if eq.quantities[0] == eq.quantities[1] && eq.is_pure() {
            prop_assert_eq!(eq.profits[0], eq.profits[1]);
            prop_assert_eq!(eq.revenues[0], eq.revenues[1]);
        }
    }
}
