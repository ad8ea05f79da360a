use isingcmp::arith::{int, rational, HalfInteger, Value};
use isingcmp::measures::{make_measure, EvenMeasure, MeasureSpec};
use isingcmp::quadrature::adaptive_simpson;
use num::rational::BigRational;
use proptest::prelude::*;

fn builtins() -> Vec<EvenMeasure> {
    [
        "bernoulli:1",
        "bernoulli:3/7",
        "three_point:1/3",
        "three_point:9/10",
        "spin:1/2",
        "spin:1",
        "spin:5/2",
        "spin:3:raw",
        "dvector:2",
        "dvector:5",
        "atoms:0@1/4,1/2@1/4,2@1/2",
        "scaled:2/3:spin:2",
    ]
    .iter()
    .map(|s| make_measure(&MeasureSpec::parse(s).unwrap()).unwrap())
    .collect()
}

fn atomic() -> impl Strategy<Value = EvenMeasure> {
    prop::collection::vec((0i64..=12, 1i64..=6), 1..6).prop_map(|raw| {
        let total: i64 = raw.iter().map(|(_, w)| w).sum();
        let atoms = raw.iter().map(|&(t, w)| (rational(t, 4), rational(w, total))).collect();
        EvenMeasure::atomic_exact("random", atoms).unwrap()
    })
}

#[test]
fn normalization_and_evenness() {
    for mu in builtins() {
        let m = mu.moments(41);
        assert_eq!(m[0], Value::one(true), "{}", mu.label());
        for k in (1..=41).step_by(2) {
            assert!(m[k].is_zero(), "{} odd moment {k}", mu.label());
        }
    }
}

#[test]
fn scaling_law_exact() {
    for mu in builtins().into_iter().filter(|m| m.dimension().is_none()) {
        for s in [rational(1, 2), int(2), rational(3, 7)] {
            let scaled = mu.scale(&Value::Exact(s.clone())).unwrap();
            for k in 0..=12u32 {
                let want = &Value::Exact(num::traits::Pow::pow(&s, k)) * &mu.moment(k);
                assert_eq!(scaled.moment(k), want, "{} s={s} k={k}", mu.label());
            }
        }
    }
}

#[test]
fn dvector_recurrence_and_density() {
    for d in 2..=10u32 {
        let mu = EvenMeasure::dvector(d).unwrap();
        for k in 1..=10u32 {
            let ratio = mu.moment(2 * k).as_exact().unwrap() / mu.moment(2 * k - 2).as_exact().unwrap();
            assert_eq!(ratio, rational(2 * k as i64 - 1, (d + 2 * k - 2) as i64));
        }
        // x = sin θ on [−π/2, π/2] with density ∝ cos^{D−2} θ.
        let h = std::f64::consts::FRAC_PI_2;
        let norm = adaptive_simpson(|t: f64| t.cos().powi(d as i32 - 2), -h, h, 1e-13);
        for k in 0..=10u32 {
            let q = adaptive_simpson(|t: f64| t.sin().powi(k as i32) * t.cos().powi(d as i32 - 2), -h, h, 1e-13) / norm;
            assert!((q - mu.moment(k).to_f64()).abs() < 1e-8, "D={d} k={k}");
        }
    }
}

#[test]
fn spin_second_moment_by_summation() {
    for t in 1..=20u32 {
        let s = HalfInteger::from_twice(t).unwrap();
        let mu = EvenMeasure::spin(s, true).unwrap();
        let pts: Vec<BigRational> = (0..=t as i64).map(|k| rational(2 * k - t as i64, t as i64)).collect();
        let direct: BigRational = pts.iter().map(|x| x * x).sum::<BigRational>() / int(pts.len() as i64);
        assert_eq!(mu.moment(2), Value::Exact(direct.clone()));
        let q = s.to_rational();
        assert_eq!(direct, (&q + int(1)) / (int(3) * q));
    }
}

#[test]
fn discretization_preserves_mass_and_evenness() {
    for d in [2u32, 3, 6] {
        let disc = EvenMeasure::dvector(d).unwrap().discretize(32).unwrap();
        assert!((disc.moment(0).to_f64() - 1.0).abs() < 1e-12);
        assert!((disc.moment(2).to_f64() - 1.0 / d as f64).abs() < 1e-10);
        assert!(disc.moment(3).is_zero());
    }
}

proptest! {
    #[test]
    fn random_atomic_measures_are_even_and_normalized(mu in atomic()) {
        let m = mu.moments(15);
        prop_assert_eq!(&m[0], &Value::one(true));
        for k in (1..=15).step_by(2) {
            prop_assert!(m[k].is_zero());
        }
    }

    #[test]
    fn random_scaling_law(mu in atomic(), p in 1i64..=9, q in 1i64..=9) {
        let s = rational(p, q);
        let scaled = mu.scale(&Value::Exact(s.clone())).unwrap();
        for k in 0..=12u32 {
            let want = &Value::Exact(num::traits::Pow::pow(&s, k)) * &mu.moment(k);
            prop_assert_eq!(scaled.moment(k), want);
        }
    }

    #[test]
    fn spec_round_trip(t in 1u32..=30) {
        let s = HalfInteger::from_twice(t).unwrap();
        let spec = MeasureSpec::parse(&format!("spin:{s}")).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        prop_assert_eq!(MeasureSpec::parse(&json).unwrap(), spec);
    }
}
