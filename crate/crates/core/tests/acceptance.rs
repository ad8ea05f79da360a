//! Acceptance criteria 1 to 12, one line each. Runs without the libtest
//! harness so the PASS/FAIL lines are always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use isingcmp::arith::{binomial_row, int, rational, rational_to_f64, HalfInteger, Value};
use isingcmp::families::{
    dvector_moment, dvector_odd_expectation, spin_odd_sum, spin_second_moment, square_gate_five_point,
    square_gate_odd_n,
};
use isingcmp::gibbs::{
    ensemble, ensemble_domination, ensemble_gks, scaling_check, EnsembleOptions, GibbsSystem, Interaction,
    Monomial, Template, Term,
};
use isingcmp::majorization::{
    build_theorem_a2, majorizes, single_crossing_check, verify_theorem, w_route_check, PsiSpec, PsiValues,
    Route, Variant,
};
use isingcmp::measures::{make_measure, EvenMeasure, MeasureSpec};
use isingcmp::quadrature::adaptive_simpson;
use isingcmp::temperature::{bound_report, griffiths_factor, spin_lower_factor};
use isingcmp::wells::{
    bernoulli_sandwich, t_minus, t_minus_three_point, wells_dominates, wells_integral, Verdict,
    DEFAULT_CUTOFF, DEFAULT_TOL,
};
use num::rational::BigRational;
use num::traits::{Pow, Signed, Zero};
use num::BigInt;

/// Failures collected by one criterion, plus a short summary.
#[derive(Default)]
struct Check {
    failures: Vec<String>,
    summary: String,
}

impl Check {
    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn measure(spec: &str) -> EvenMeasure {
    make_measure(&MeasureSpec::parse(spec).unwrap()).unwrap()
}

fn hs(twice: u32) -> HalfInteger {
    HalfInteger::from_twice(twice).unwrap()
}

fn three_point_t_minus() -> Check {
    let mut c = Check::default();
    let mut worst: (f64, String) = (0.0, String::new());
    for k in 1..=19i64 {
        let lambda = rational(k, 20);
        let mu = EvenMeasure::three_point(&lambda).unwrap();
        let est = t_minus(&mu, 101, 1e-9).unwrap().t_minus_estimate;
        let exact = rational_to_f64(&t_minus_three_point(&lambda).unwrap()).sqrt();
        let err = (est - exact).abs();
        let tol = if k <= 10 { 1e-9 } else { 2e-3 };
        if err > worst.0 {
            worst = (err, lambda.to_string());
        }
        c.require(err <= tol, || format!("λ={lambda}: estimate {est:.6} vs exact {exact:.6} (|Δ|={err:.2e} > {tol:.0e})"));
    }
    c.summary = format!("max |Δ| = {:.2e} at λ={}", worst.0, worst.1);
    c
}

fn spin_canonicality() -> Check {
    let mut c = Check::default();
    let mut checked = 0;
    for t in 1..=20u32 {
        let s = hs(t);
        for m in 0..=50u32 {
            let v = spin_odd_sum(s, m);
            checked += 1;
            match t {
                2 if m == 0 => c.require(v.is_zero(), || format!("S=1, m=0: {v} ≠ 0")),
                2 => c.require(v.is_negative(), || format!("S=1, m={m}: {v} not < 0")),
                1 | 3 => c.require(v.is_zero(), || format!("S={s}, m={m}: {v} ≠ 0")),
                _ => c.require(!v.is_negative(), || format!("S={s}, m={m}: {v} < 0")),
            }
        }
    }
    c.summary = format!("{checked} exact sums; S=1 is 0 at m=0 and negative for 1 ≤ m ≤ 50");
    c
}

fn dvector_canonicality() -> Check {
    let mut c = Check::default();
    for d in 2..=10u32 {
        for m in 0..=30u32 {
            let v = dvector_odd_expectation(d, m).unwrap();
            if d == 2 || m == 0 {
                c.require(v.is_zero(), || format!("D={d}, m={m}: {v} ≠ 0"));
            } else {
                c.require(v.is_positive(), || format!("D={d}, m={m}: {v} not > 0"));
            }
        }
    }
    let spot = dvector_odd_expectation(3, 1).unwrap();
    c.require(spot == rational(16, 945), || format!("(3,1) = {spot}"));
    c.summary = format!("D=2..10, m ≤ 30; (3,1) = {spot}");
    c
}

fn second_moments() -> Check {
    let mut c = Check::default();
    for t in 1..=40u32 {
        let s = hs(t);
        let q = s.to_rational();
        let points: Vec<BigRational> = (0..=t as i64).map(|k| rational(2 * k - t as i64, 2)).collect();
        let count = int(points.len() as i64);
        let raw: BigRational = points.iter().map(|j| j * j).sum::<BigRational>() / &count;
        let normalized = &raw / (&q * &q);
        let a = (&q + int(1)) / (int(3) * &q);
        let big_a = &q * (&q + int(1)) / int(3);
        c.require(normalized == a, || format!("S={s}: a_S direct {normalized} vs {a}"));
        c.require(raw == big_a, || format!("S={s}: A_S direct {raw} vs {big_a}"));
        c.require(spin_second_moment(s, true) == a, || format!("S={s}: library a_S"));
        c.require(spin_second_moment(s, false) == big_a, || format!("S={s}: library A_S"));
    }
    let a6 = spin_second_moment(hs(12), false);
    c.require(a6 == int(14), || format!("A_6 = {a6}"));
    c.summary = format!("2S ≤ 40 exact; A_6 = {a6}");
    c
}

fn example_vectors() -> Check {
    let mut c = Check::default();
    let ints = |v: &[i64]| v.iter().map(|&k| int(k)).collect::<Vec<_>>();
    let PsiValues::Exact(psi) = PsiSpec::parse("power:2").unwrap().values(6).unwrap() else {
        unreachable!("integer exponent is exact")
    };
    let b = build_theorem_a2(&psi).unwrap();
    c.require(b.x.entries() == ints(&[22, 22, 11, 11, 2, 2, 0]).as_slice(), || format!("x = {:?}", b.x.to_nums()));
    c.require(b.y.entries() == ints(&[14, 13, 13, 10, 10, 5, 5]).as_slice(), || format!("y = {:?}", b.y.to_nums()));
    let w = b.w.clone().unwrap_or_default();
    c.require(w == ints(&[22, 22, 0, 11, 11, 2, 2]), || "w differs".into());
    c.require(majorizes(&b.x, &b.y).unwrap().majorizes, || "x does not majorize y".into());
    c.require(single_crossing_check(&b.x, &b.y).unwrap().is_none(), || "single crossing present".into());
    let route = w_route_check(b.x.entries(), &w, b.y.entries()).unwrap();
    c.require(route.valid && route.third_partial_sum && route.tail_single_crossing, || "w-route invalid".into());
    c.summary = "x, y, w reproduced; x ≻ y via w".into();
    c
}

fn theorem_pipelines() -> Check {
    let mut c = Check::default();
    let mut cases = 0;
    // Half-odd S = N + 1/2 with ψ(x) = (1/2 + Nx)², 2S = 3..19.
    for t in (3..=19u32).step_by(2) {
        let n = (t - 1) / 2;
        let r = verify_theorem(&PsiSpec::parse("shifted:2:1/2").unwrap(), n, 25, Variant::A1).unwrap();
        cases += 1;
        c.require(r.theorem_applied, || format!("2S={t}: A1 refused {:?}", r.refusals));
        c.require(r.direct_all_nonneg && r.certificate.majorizes, || format!("2S={t}: routes disagree"));
    }
    // Integral S with ψ(x) = (Sx)², S = 2..10.
    for s in 2..=10u32 {
        let r = verify_theorem(&PsiSpec::parse("power:2").unwrap(), s, 25, Variant::A2).unwrap();
        cases += 1;
        c.require(r.theorem_applied, || format!("S={s}: A2 refused {:?}", r.refusals));
        c.require(r.direct_all_nonneg && r.certificate.majorizes, || format!("S={s}: routes disagree"));
        c.require(r.certificate.route == Route::ViaW, || format!("S={s}: route {:?}", r.certificate.route));
    }
    for s in 0..=40i64 {
        let five = square_gate_five_point(s);
        c.require(five == ((s - 2) * (s - 3) >= 0), || format!("S={s}: five-point gate form"));
        c.require(five, || format!("S={s}: five-point gate fails"));
        let odd = square_gate_odd_n(s);
        c.require(odd == ((s - 3) * (s + 1) >= 0), || format!("S={s}: odd gate form"));
        if s >= 3 {
            c.require(odd, || format!("S={s}: odd gate fails"));
        }
    }
    c.summary = format!("{cases} gated cases agree; gates checked for S ≤ 40");
    c
}

fn sandwich_measures() -> Vec<EvenMeasure> {
    vec![
        measure("three_point:0.4"),
        measure("three_point:0.7"),
        measure("spin:3/2"),
        EvenMeasure::dvector(3).unwrap().discretize(16).unwrap(),
    ]
}

fn templates() -> [Template; 2] {
    ["path3".parse().unwrap(), "ring4".parse().unwrap()]
}

const SEED: u64 = 42;
const TRIALS: usize = 100;

fn gibbs_sandwich() -> Check {
    let mut c = Check::default();
    let opts = EnsembleOptions::default();
    let mut worst = f64::INFINITY;
    for mu in sandwich_measures() {
        let (below, above) = bernoulli_sandwich(&mu, DEFAULT_CUTOFF, DEFAULT_TOL).unwrap();
        for t in templates() {
            for (lo, hi, side) in [(&below, &mu, "lower"), (&mu, &above, "upper")] {
                let r = ensemble_domination(lo, hi, &t, TRIALS, SEED, opts, 1e-10).unwrap();
                worst = worst.min(r.worst_slack);
                c.require(r.worst_slack >= -1e-10, || {
                    format!("{} {t} {side}: slack {:.3e} at trial {}", mu.label(), r.worst_slack, r.worst_trial)
                });
            }
        }
    }
    c.summary = format!("worst slack {worst:.3e}");
    c
}

fn gks() -> Check {
    let mut c = Check::default();
    let mut worst = f64::INFINITY;
    for mu in sandwich_measures() {
        for t in templates() {
            let r = ensemble_gks(&mu, &t, TRIALS, SEED, EnsembleOptions::default(), 1e-10).unwrap();
            worst = worst.min(r.worst);
            c.require(r.worst >= -1e-10, || format!("{} {t}: worst {:.3e}", mu.label(), r.worst));
        }
    }
    c.summary = format!("worst expectation or covariance {worst:.3e}");
    c
}

fn scaling() -> Check {
    let mut c = Check::default();
    let pairs_only = EnsembleOptions {
        odd_fields: false,
        even_site_terms: false,
    };
    let mut worst = 0.0f64;
    for base in ["spin:3/2", "three_point:2/5", "bernoulli:1"] {
        let mu = measure(base);
        for t in templates() {
            for inter in ensemble(&t, 5, SEED, pairs_only) {
                let monomials = isingcmp::gibbs::monomials_up_to_degree_two(inter.sites);
                for s in [rational(1, 2), rational(2, 3), int(2)] {
                    let r = scaling_check(&inter, &mu, &Value::Exact(s.clone()), &monomials, 1e-10).unwrap();
                    worst = worst.max(r.max_rel_error);
                    c.require(r.pass, || format!("{base} {t} s={s}: rel error {:.3e}", r.max_rel_error));
                }
            }
        }
    }
    let half = measure("bernoulli:1/2");
    let pair = Monomial::new([(0, 1), (1, 1)]).unwrap();
    for j in [0.5, 1.0, 2.0] {
        let inter = Interaction::new(2, 1.0, vec![Term { exps: pair.clone(), j }]).unwrap();
        let got = GibbsSystem::new(inter, &half).unwrap().expectation(&pair).unwrap();
        let want = 0.25 * (j / 4.0).tanh();
        c.require((got - want).abs() <= 1e-10 * want, || format!("J={j}: {got} vs {want}"));
    }
    c.summary = format!("max relative error {worst:.2e}; closed form at J = 0.5, 1, 2");
    c
}

fn bound_reports() -> Check {
    let mut c = Check::default();
    let four_thirds = rational(4, 3);
    let mut literal_misses = Vec::new();
    for t in 1..=40u32 {
        if t == 2 {
            continue;
        }
        let s = hs(t);
        let lf = spin_lower_factor(s);
        let uniform = &lf / rational(1, 4);
        let improvement = &lf / griffiths_factor(s);
        c.require(uniform >= four_thirds, || format!("S={s}: uniform ratio {uniform}"));
        if s.is_integral() {
            c.require(improvement >= four_thirds, || format!("S={s}: ratio {improvement}"));
        } else if improvement < four_thirds {
            literal_misses.push(format!("{s}:{improvement}"));
        }
        let r = bound_report(&MeasureSpec::parse(&format!("spin:{s}")).unwrap(), 101, DEFAULT_TOL, None).unwrap();
        c.require(r.improvement_ratio == Some(Value::Exact(improvement.clone())), || format!("S={s}: report ratio"));
    }
    let at = spin_lower_factor(hs(3)) / griffiths_factor(hs(3));
    c.require(at == rational(5, 4), || format!("S=3/2 ratio {at}"));

    let coupling = Value::Exact(rational(7, 2));
    for spec in ["spin:2", "spin:3/2", "spin:5", "dvector:3", "dvector:7", "three_point:1/3", "bernoulli:3/4"] {
        let r = bound_report(&MeasureSpec::parse(spec).unwrap(), 101, DEFAULT_TOL, Some(&coupling)).unwrap();
        c.require(r.canonical, || format!("{spec}: not canonical"));
        c.require(r.mean_field_tc == r.lower_mean_field, || format!("{spec}: mean-field mismatch"));
    }
    c.summary = format!(
        "uniform ratio ≥ 4/3 for S ≠ 1; Griffiths ratio ≥ 4/3 for integral S, 5/4 at S=3/2; half-odd S below 4/3 against Griffiths: {}",
        literal_misses.join(" ")
    );
    c
}

fn builtin_measures() -> Vec<EvenMeasure> {
    vec![
        measure("bernoulli:1"),
        measure("three_point:1/3"),
        measure("spin:3/2"),
        measure("spin:2"),
        measure("dvector:3"),
    ]
}

fn wells_grid() -> Check {
    let mut c = Check::default();
    let ms = builtin_measures();
    for a in &ms {
        for b in &ms {
            for n in 0..=16u32 {
                for m in 0..=16 - n {
                    let v = wells_integral(a, b, n, m);
                    let tag = || format!("{} vs {} ({n},{m})", a.label(), b.label());
                    if (n + m) % 2 == 1 {
                        c.require(v == Value::zero(true), || format!("{}: {v} ≠ 0", tag()));
                    }
                    c.require(v == wells_integral(a, b, m, n), || format!("{}: not symmetric in n, m", tag()));
                    let swapped = wells_integral(b, a, n, m);
                    let sign = if m % 2 == 0 { v.clone() } else { -v.clone() };
                    c.require(swapped == sign, || format!("{}: swap sign rule", tag()));
                    if n % 2 == 0 && m % 2 == 0 {
                        c.require(v.sign() != std::cmp::Ordering::Less, || format!("{}: even pair < 0", tag()));
                    }
                }
            }
        }
    }
    let b1 = measure("bernoulli:1");
    for k in 1..=19i64 {
        let lower = EvenMeasure::three_point(&rational(k, 20)).unwrap();
        let r = wells_dominates(&b1, &lower, 12, DEFAULT_TOL).unwrap();
        c.require(r.verdict == Verdict::Dominates, || format!("b_1 ▷ three_point({k}/20): {:?}", r.verdict));
    }
    c.summary = "parity, symmetry and swap rules on n+m ≤ 16; b_1 dominates three_point(λ) for λ = 0.05..0.95".into();
    c
}

fn dvector_density_moment(d: u32, k: u32) -> f64 {
    // x = cos θ with θ-density ∝ sin^{D−2} θ on [0, π].
    let num = adaptive_simpson(|th: f64| th.cos().powi(k as i32) * th.sin().powi(d as i32 - 2), 0.0, std::f64::consts::PI, 1e-13);
    let den = adaptive_simpson(|th: f64| th.sin().powi(d as i32 - 2), 0.0, std::f64::consts::PI, 1e-13);
    num / den
}

fn brute_force_integral(a: &EvenMeasure, b: &EvenMeasure, n: u32, m: u32) -> BigRational {
    let (xa, xb) = (a.expanded_atoms_exact().unwrap(), b.expanded_atoms_exact().unwrap());
    let mut total = BigRational::zero();
    for (x, wx) in &xa {
        for (y, wy) in &xb {
            let s: BigRational = x + y;
            let d: BigRational = x - y;
            total += wx * wy * Pow::pow(&s, n) * Pow::pow(&d, m);
        }
    }
    total
}

fn cross_oracles() -> Check {
    let mut c = Check::default();
    let mut worst = 0.0f64;
    for d in 2..=10u32 {
        for k in 0..=10u32 {
            let exact = rational_to_f64(&dvector_moment(d, k).unwrap());
            let quad = dvector_density_moment(d, k);
            worst = worst.max((exact - quad).abs());
            c.require((exact - quad).abs() <= 1e-8, || format!("D={d}, k={k}: {exact} vs {quad}"));
        }
    }
    let atomic = [
        measure("atoms:1/3@1/4,1@3/4"),
        measure("three_point:2/3"),
        measure("spin:5/2"),
        measure("atoms:0@1/2,1/2@1/3,2@1/6"),
    ];
    for a in &atomic {
        for b in &atomic {
            for n in 0..=8u32 {
                for m in 0..=8u32 {
                    let expanded = wells_integral(a, b, n, m);
                    let direct = brute_force_integral(a, b, n, m);
                    c.require(expanded == Value::Exact(direct.clone()), || {
                        format!("{} vs {} ({n},{m}): {expanded} vs {direct}", a.label(), b.label())
                    });
                }
            }
        }
    }
    // Binomial rows are the expansion's only combinatorial input.
    let row = binomial_row(10);
    c.require(row.iter().sum::<BigInt>() == BigInt::from(1024), || "binomial row sum".into());
    c.summary = format!("D-vector quadrature max |Δ| = {worst:.1e}; moment expansion equals double sums exactly");
    c
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, name: "three-point T₋ estimate", budget: secs(5), run: three_point_t_minus },
        Criterion { id: 2, name: "spin odd sums", budget: secs(10), run: spin_canonicality },
        Criterion { id: 3, name: "D-vector odd moments", budget: secs(5), run: dvector_canonicality },
        Criterion { id: 4, name: "spin second moments", budget: None, run: second_moments },
        Criterion { id: 5, name: "spin-6 majorization vectors", budget: None, run: example_vectors },
        Criterion { id: 6, name: "A1/A2 pipelines and gates", budget: None, run: theorem_pipelines },
        Criterion { id: 7, name: "Gibbs Bernoulli sandwich", budget: secs(30), run: gibbs_sandwich },
        Criterion { id: 8, name: "GKS on ensembles", budget: None, run: gks },
        Criterion { id: 9, name: "scaling identity", budget: None, run: scaling },
        Criterion { id: 10, name: "bound report ratios", budget: None, run: bound_reports },
        Criterion { id: 11, name: "Wells grid sanity", budget: None, run: wells_grid },
        Criterion { id: 12, name: "cross-oracles", budget: None, run: cross_oracles },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for cr in &criteria {
        let label = format!("criterion {:>2} {}", cr.id, cr.name);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(cr.run));
        let elapsed = start.elapsed();
        let mut check = outcome.unwrap_or_else(|e| Check {
            failures: vec![format!(
                "panicked: {}",
                e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
            )],
            summary: String::new(),
        });
        if let Some(budget) = cr.budget {
            check.require(elapsed <= budget, || format!("took {elapsed:.2?}, budget {budget:?}"));
        }
        let status = if check.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} {label} ({elapsed:.2?}): {}", check.summary);
        for f in check.failures.iter().take(10) {
            println!("       {f}");
        }
        if check.failures.len() > 10 {
            println!("       … {} more", check.failures.len() - 10);
        }
        if !check.failures.is_empty() {
            failed += 1;
        }
    }
    println!("acceptance: {} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
