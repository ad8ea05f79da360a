use isingcmp::arith::{int, rational};
use isingcmp::majorization::{
    build_theorem_a1, build_theorem_a2, default_test_family, hinge_witness, karamata_test, majorizes,
    partial_sums, tail_dominance, verify_theorem_values, w_route_check, OrderedVector, Variant,
};
use num::rational::BigRational;
use num::traits::{Pow, Zero};
use proptest::prelude::*;

type Q = BigRational;

/// ψ(j/N) for j = 0..N with non-decreasing positive increments: strictly
/// increasing and convex on the grid.
fn convex_grid() -> impl Strategy<Value = Vec<Q>> {
    (0i64..=5, prop::collection::vec(1i64..=6, 2..=9)).prop_map(|(start, mut steps)| {
        steps.sort();
        let mut v = vec![int(start)];
        for d in steps {
            let next = v.last().unwrap() + int(d);
            v.push(next);
        }
        v
    })
}

fn ordered_vector(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..=12, len).prop_map(|mut v| {
        v.sort_by(|a, b| b.cmp(a));
        v
    })
}

fn q_vec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&k| int(k)).collect()
}

/// Piecewise-linear convex ψ = max of affine pieces.
fn convex_pl() -> impl Strategy<Value = Vec<(Q, Q)>> {
    prop::collection::vec((-6i64..=6, -6i64..=6), 1..5)
        .prop_map(|pieces| pieces.into_iter().map(|(a, b)| (int(a), int(b))).collect())
}

fn eval_pl(pieces: &[(Q, Q)], x: &Q) -> Q {
    pieces
        .iter()
        .map(|(slope, icpt)| slope * x + icpt)
        .max()
        .expect("non-empty")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lemma_a5(pieces in convex_pl(), c in 0i64..=24, da in 0i64..=24, db in 1i64..=24) {
        // Grid of 1/48: 0 ≤ 2c − b < 2c − a ≤ c ≤ a < b ≤ 1.
        let den = 48;
        let a = c + da;
        let b = a + db;
        prop_assume!(b <= den && 2 * c - b >= 0);
        let at = |k: i64| eval_pl(&pieces, &rational(k, den));
        let half = rational(1, 2);
        let outer = (at(b) + at(2 * c - b)) * &half;
        let inner = (at(a) + at(2 * c - a)) * &half;
        prop_assert!(outer >= inner);
        prop_assert!(inner >= at(c));
    }

    #[test]
    fn a1_builds_conserve_mass_and_agree(psi in convex_grid()) {
        let b = build_theorem_a1(&psi).unwrap();
        prop_assert_eq!(b.x.total(), b.y.total());
        let r = verify_theorem_values(&psi, Variant::A1, 12).unwrap();
        if r.theorem_applied {
            prop_assert!(r.direct_all_nonneg);
            prop_assert!(r.certificate.majorizes);
        }
    }

    #[test]
    fn a2_builds_conserve_mass_and_chain(psi in convex_grid()) {
        let b = build_theorem_a2(&psi).unwrap();
        prop_assert_eq!(b.x.total(), b.y.total());
        let chord_ok = b.flags.a1b_right == Some(true);
        if !b.refused() && chord_ok {
            if let Some(w) = &b.w {
                let sx = partial_sums(b.x.entries());
                let sw = partial_sums(w);
                let sy = partial_sums(b.y.entries());
                prop_assert_eq!(sx.last(), sw.last());
                prop_assert!(sx.iter().zip(&sw).all(|(p, q)| p >= q));
                prop_assert!(sw.iter().zip(&sy).all(|(p, q)| p >= q));
                prop_assert!(w_route_check(b.x.entries(), w, b.y.entries()).unwrap().valid);
            }
        }
        let r = verify_theorem_values(&psi, Variant::A2, 12).unwrap();
        if r.theorem_applied && chord_ok {
            prop_assert!(r.direct_all_nonneg);
            prop_assert!(r.certificate.majorizes);
        }
        // Gated builds only miss the chord bound on the three-point grid.
        if r.theorem_applied && !chord_ok {
            prop_assert_eq!(b.n_grid, 2);
        }
    }

    #[test]
    fn hinge_converse(x in ordered_vector(6), moves in prop::collection::vec((0usize..6, 0usize..6, 1i64..=4), 0..8)) {
        let mut y = x.clone();
        for (from, to, amount) in moves {
            let t = amount.min(y[from]);
            y[from] -= t;
            y[to] += t;
        }
        y.sort_by(|a, b| b.cmp(a));
        let xv = OrderedVector::new(q_vec(&x)).unwrap();
        let yv = OrderedVector::new(q_vec(&y)).unwrap();
        let major = majorizes(&xv, &yv).unwrap().majorizes;
        let witness = hinge_witness(&xv, &yv).unwrap();
        prop_assert_eq!(major, witness.is_none());
    }

    #[test]
    fn reverse_robin_hood_majorizes(y in ordered_vector(7), moves in prop::collection::vec((0usize..7, 0usize..7, 1i64..=3), 1..6)) {
        // Moving mass from a smaller entry to a larger one spreads the vector.
        let mut x = y.clone();
        for (i, j, amount) in moves {
            let (rich, poor) = if x[i] >= x[j] { (i, j) } else { (j, i) };
            if rich == poor {
                continue;
            }
            let t = amount.min(x[poor]);
            x[rich] += t;
            x[poor] -= t;
        }
        x.sort_by(|a, b| b.cmp(a));
        let xv = OrderedVector::new(q_vec(&x)).unwrap();
        let yv = OrderedVector::new(q_vec(&y)).unwrap();
        prop_assert!(majorizes(&xv, &yv).unwrap().majorizes);
        let report = karamata_test(&xv, &yv, &default_test_family(&xv, &yv)).unwrap();
        prop_assert!(report.all_hold);
    }

    #[test]
    fn tail_dominance_orders_monotone_integrals(
        nu in prop::collection::vec((0i64..=10, 1i64..=4), 1..5),
        mu in prop::collection::vec((0i64..=10, 1i64..=4), 1..5),
    ) {
        let norm = |v: &[(i64, i64)]| {
            let total: i64 = v.iter().map(|(_, w)| w).sum();
            v.iter().map(|&(t, w)| (int(t), rational(w, total))).collect::<Vec<(Q, Q)>>()
        };
        let (nu, mu) = (norm(&nu), norm(&mu));
        if tail_dominance(&nu, &mu).unwrap() {
            let integral = |m: &[(Q, Q)], f: &dyn Fn(&Q) -> Q| m.iter().map(|(t, w)| f(t) * w).sum::<Q>();
            for k in 1..=5u32 {
                prop_assert!(integral(&nu, &|t| Pow::pow(t, k)) >= integral(&mu, &|t| Pow::pow(t, k)));
            }
            for c in 0..=10 {
                let hinge = |t: &Q| (t - int(c)).max(Q::zero());
                prop_assert!(integral(&nu, &hinge) >= integral(&mu, &hinge));
                let step = |t: &Q| if t >= &int(c) { int(1) } else { Q::zero() };
                prop_assert!(integral(&nu, &step) >= integral(&mu, &step));
            }
        }
    }
}

#[test]
fn three_point_grid_below_chord_breaks_the_chain() {
    let psi = q_vec(&[0, 1, 3]);
    let b = build_theorem_a2(&psi).unwrap();
    assert!(!b.refused());
    assert_eq!(b.flags.a1b_right, Some(false));
    let r = verify_theorem_values(&psi, Variant::A2, 6).unwrap();
    assert!(r.theorem_applied);
    assert!(!r.certificate.majorizes);
    assert!(!r.direct_sums[3].nonneg);
    assert!(!r.direct_all_nonneg);
    assert!(!r.routes_agree);
}

#[test]
fn squares_on_every_grid() {
    for big_n in 2..=30i64 {
        let psi: Vec<Q> = (0..=big_n).map(|j| int(j * j)).collect();
        for variant in [Variant::A1, Variant::A2] {
            let r = verify_theorem_values(&psi, variant, 10).unwrap();
            if r.theorem_applied {
                assert!(r.routes_agree, "N={big_n} {variant:?}");
            }
        }
    }
}
