//! Wells domination between even measures and the Bernoulli thresholds.
//!
//! The *upper* (candidate dominant) measure is always the first argument and
//! plays the role of `x` in ∬ (x+y)ⁿ (x−y)ᵐ dU(x) dL(y). A report that says
//! "dominates" is a certificate up to the checked degree only.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{binomial_row, rational, Value};
use crate::error::{invalid, Error, Result};
use crate::measures::{Atoms, EvenMeasure};

pub const DEFAULT_CUTOFF: u32 = 101;
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance used when deciding the sign of float-mode gaps.
const FLOAT_SIGN_TOL: f64 = 1e-12;

/// Expands the double integral into products of single-measure moments.
/// `upper` and `lower` must hold moments up to `n + m`.
fn integral_from_moments(upper: &[Value], lower: &[Value], n: u32, m: u32) -> Value {
    let exact = upper.iter().chain(lower).all(Value::is_exact);
    if (n + m) % 2 == 1 {
        return Value::zero(exact);
    }
    let cn = binomial_row(n);
    let cm = binomial_row(m);
    let total = n + m;
    if exact {
        let mut acc = BigRational::zero();
        for (a, ca) in cn.iter().enumerate() {
            for (b, cb) in cm.iter().enumerate() {
                let k = (a + b) as u32;
                if k % 2 == 1 {
                    continue;
                }
                let mut term = BigRational::from_integer(ca * cb);
                if (m as usize - b) % 2 == 1 {
                    term = -term;
                }
                let mu = upper[k as usize].as_exact().unwrap();
                let ml = lower[(total - k) as usize].as_exact().unwrap();
                acc += term * mu * ml;
            }
        }
        Value::Exact(acc)
    } else {
        let to_f = |z: &BigInt| Value::from_int(z, false).to_f64();
        let mut acc = 0.0;
        for (a, ca) in cn.iter().enumerate() {
            for (b, cb) in cm.iter().enumerate() {
                let k = a + b;
                if k % 2 == 1 {
                    continue;
                }
                let sign = if (m as usize - b) % 2 == 1 { -1.0 } else { 1.0 };
                acc += sign
                    * to_f(ca)
                    * to_f(cb)
                    * upper[k].to_f64()
                    * lower[total as usize - k].to_f64();
            }
        }
        Value::Float(acc)
    }
}

/// ∬ (x+y)ⁿ (x−y)ᵐ dU(x) dL(y), by double binomial expansion into moments.
pub fn wells_integral(upper: &EvenMeasure, lower: &EvenMeasure, n: u32, m: u32) -> Value {
    let mu = upper.moments(n + m);
    let ml = lower.moments(n + m);
    integral_from_moments(&mu, &ml, n, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Dominates,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WellsEntry {
    pub n: u32,
    pub m: u32,
    pub value: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct WellsReport {
    pub upper: String,
    pub lower: String,
    pub max_degree: u32,
    pub tol: f64,
    pub entries: Vec<WellsEntry>,
    pub min_slack: Value,
    pub worst_entry: (u32, u32),
    pub verdict: Verdict,
    pub certificate: String,
}

/// Checks every odd pair `n ≤ m` with `n + m ≤ 2·max_degree`. Even pairs
/// are positive and mixed-parity pairs vanish, so they carry no information.
pub fn wells_dominates(
    upper: &EvenMeasure,
    lower: &EvenMeasure,
    max_degree: u32,
    tol: f64,
) -> Result<WellsReport> {
    if max_degree < 1 {
        return Err(invalid("max_degree", "must be at least 1"));
    }
    let top = 2 * max_degree;
    let mu = upper.moments(top);
    let ml = lower.moments(top);
    let pairs: Vec<(u32, u32)> = (1..=top)
        .step_by(2)
        .flat_map(|n| (n..=top - n).step_by(2).map(move |m| (n, m)))
        .collect();
    let entries: Vec<WellsEntry> = pairs
        .par_iter()
        .map(|&(n, m)| WellsEntry {
            n,
            m,
            value: integral_from_moments(&mu, &ml, n, m),
        })
        .collect();
    let worst = entries
        .iter()
        .min_by(|a, b| a.value.cmp_value(&b.value))
        .expect("grid is non-empty");
    let min_slack = worst.value.clone();
    let verdict = match &min_slack {
        Value::Exact(q) if q < &BigRational::zero() => Verdict::Violated,
        Value::Exact(_) => Verdict::Dominates,
        Value::Float(x) if *x < -tol => Verdict::Violated,
        Value::Float(x) if *x < 0.0 => Verdict::Inconclusive,
        Value::Float(_) => Verdict::Dominates,
    };
    Ok(WellsReport {
        upper: upper.label().to_string(),
        lower: lower.label().to_string(),
        max_degree,
        tol,
        worst_entry: (worst.n, worst.m),
        entries,
        min_slack,
        verdict,
        certificate: format!("certificate up to total degree {top}; not a proof for all degrees"),
    })
}

/// ∫ (x² − S²)ⁿ dμ with the level given as `S²`.
pub fn odd_moment_gap(mu: &EvenMeasure, level_sq: &Value, n: u32) -> Value {
    match (mu.atoms(), level_sq) {
        (Some(Atoms::Exact(atoms)), Value::Exact(s2)) => Value::Exact(
            atoms
                .iter()
                .map(|(t, w)| w * num::traits::Pow::pow(&(t * t - s2), n))
                .sum(),
        ),
        (Some(atoms), _) => {
            let s2 = level_sq.to_f64();
            Value::Float(
                atoms
                    .to_f64()
                    .iter()
                    .map(|&(t, w)| w * (t * t - s2).powi(n as i32))
                    .sum(),
            )
        }
        (None, _) => {
            // Horner in z = −S² over c_k = C(n,k)·m_{2k}, the coefficient of z^{n−k}.
            let moments = mu.moments(2 * n);
            let binom = binomial_row(n);
            match level_sq {
                Value::Exact(s2) => {
                    let z = -s2.clone();
                    let mut acc = BigRational::zero();
                    for (k, c) in binom.iter().enumerate() {
                        let coeff = BigRational::from_integer(c.clone())
                            * moments[2 * k].as_exact().unwrap();
                        acc = acc * &z + coeff;
                    }
                    Value::Exact(acc)
                }
                Value::Float(s2) => {
                    let z = -s2;
                    let mut acc = 0.0;
                    for (k, c) in binom.iter().enumerate() {
                        acc = acc * z + Value::from_int(c, false).to_f64() * moments[2 * k].to_f64();
                    }
                    Value::Float(acc)
                }
            }
        }
    }
}

/// T₊ = sup of the support.
pub fn t_plus(mu: &EvenMeasure) -> Result<Value> {
    if mu.is_point_mass_at_zero() {
        return Err(Error::PointMassAtZero);
    }
    Ok(mu.support_sup())
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerRoot {
    pub n: u32,
    /// Bisection bracket on S²: the gap is ≥ 0 at `s_sq_low` and < 0
    /// above `s_sq_high` (or equal to it when the gap vanishes there).
    pub s_sq_low: Value,
    pub s_sq_high: Value,
    /// √(s_sq_low).
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TMinusReport {
    pub measure: String,
    pub cutoff: u32,
    pub tol: f64,
    pub per_power_roots: Vec<PowerRoot>,
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub t_minus_estimate: f64,
    pub t_minus_sq_estimate: Value,
    pub argmin_power: u32,
    /// Running minimum over odd powers 1, 3, …, cutoff.
    #[serde(serialize_with = "crate::arith::ser_floats")]
    pub running_estimates: Vec<f64>,
    pub stabilized: bool,
    pub note: String,
}

fn value_sqrt(v: &Value) -> f64 {
    v.to_f64().max(0.0).sqrt()
}

fn bisect_power(mu: &EvenMeasure, n: u32, t_plus_sq: &Value, tol: f64) -> PowerRoot {
    let exact = mu.is_exact() && t_plus_sq.is_exact();
    let mut lo = Value::zero(exact);
    let mut hi = if exact { t_plus_sq.clone() } else { t_plus_sq.to_float() };
    let gap_ok = |level: &Value| odd_moment_gap(mu, level, n).sign() != std::cmp::Ordering::Less;
    if gap_ok(&hi) {
        lo = hi.clone();
    } else {
        let half = Value::Exact(rational(1, 2));
        while value_sqrt(&hi) - value_sqrt(&lo) > 0.5 * tol {
            let mid = &(&lo + &hi) * &half;
            if mid == lo || mid == hi {
                break;
            }
            if gap_ok(&mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    PowerRoot {
        n,
        s: value_sqrt(&lo),
        s_sq_low: lo,
        s_sq_high: hi,
    }
}

/// Estimates T₋ as the minimum over odd n ≤ `cutoff` of the zero crossing
/// of S ↦ ∫(x²−S²)ⁿ dμ on [0, T₊]. The map is non-increasing in S, so each
/// crossing is found by bisection (on S², with exact rational midpoints for
/// exact measures). The returned value is the lower end of the bracket of
/// the minimizing power; it can only decrease as the cutoff grows.
pub fn t_minus(mu: &EvenMeasure, cutoff: u32, tol: f64) -> Result<TMinusReport> {
    if cutoff % 2 == 0 {
        return Err(invalid("cutoff", format!("{cutoff} is not odd")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("{tol} is not positive")));
    }
    let tp = t_plus(mu)?;
    let tp_sq = &tp * &tp;
    let powers: Vec<u32> = (1..=cutoff).step_by(2).collect();
    let roots: Vec<PowerRoot> = powers
        .par_iter()
        .map(|&n| bisect_power(mu, n, &tp_sq, tol))
        .collect();

    let mut running = Vec::with_capacity(roots.len());
    let mut best = 0usize;
    for (i, r) in roots.iter().enumerate() {
        if r.s_sq_low.cmp_value(&roots[best].s_sq_low) == std::cmp::Ordering::Less {
            best = i;
        }
        running.push(roots[best].s);
    }
    let k = running.len();
    let stabilized = k >= 3
        && (running[k - 2] - running[k - 1]).abs() < tol
        && (running[k - 3] - running[k - 2]).abs() < tol;
    Ok(TMinusReport {
        measure: mu.label().to_string(),
        cutoff,
        tol,
        t_minus_estimate: roots[best].s,
        t_minus_sq_estimate: roots[best].s_sq_low.clone(),
        argmin_power: roots[best].n,
        per_power_roots: roots,
        running_estimates: running,
        stabilized,
        note: format!("minimum over odd powers ≤ {cutoff}; the true threshold can only be lower"),
    })
}

/// The Bernoulli pair (b_{T̂₋}, b_{T₊}) that sandwiches μ. T̂₋ is the
/// lower end of the bisection bracket for the minimizing power.
pub fn bernoulli_sandwich(mu: &EvenMeasure, cutoff: u32, tol: f64) -> Result<(EvenMeasure, EvenMeasure)> {
    let report = t_minus(mu, cutoff, tol)?;
    let lower = EvenMeasure::bernoulli(&Value::Float(report.t_minus_estimate))?;
    let upper = EvenMeasure::bernoulli(&t_plus(mu)?)?;
    Ok((lower, upper))
}

/// Exact T₋² of the three-point measure λ/2(δ₁+δ₋₁) + (1−λ)δ₀:
/// λ when λ ≤ 1/2, else 1/2.
pub fn t_minus_three_point(lambda: &BigRational) -> Result<BigRational> {
    if lambda <= &BigRational::zero() {
        return Err(Error::PointMassAtZero);
    }
    if lambda > &BigRational::one() {
        return Err(invalid("lambda", format!("{lambda} > 1")));
    }
    let half = rational(1, 2);
    Ok(if lambda <= &half { lambda.clone() } else { half })
}

#[derive(Clone, Debug, Serialize)]
pub struct CanonicalReport {
    pub measure: String,
    pub second_moment: Value,
    /// (m, ⟨(x² − ⟨x²⟩)^{2m+1}⟩)
    pub gaps: Vec<(u32, Value)>,
    pub canonical: bool,
    pub first_negative: Option<u32>,
}

fn nonnegative(v: &Value) -> bool {
    match v {
        Value::Exact(q) => q >= &BigRational::zero(),
        Value::Float(x) => *x >= -FLOAT_SIGN_TOL,
    }
}

/// Whether T₋² equals the second moment, checked on powers 2m+1, m ≤ m_max.
pub fn canonical_check(mu: &EvenMeasure, m_max: u32) -> CanonicalReport {
    let second = mu.moment(2);
    let gaps: Vec<(u32, Value)> = (0..=m_max)
        .into_par_iter()
        .map(|m| (m, odd_moment_gap(mu, &second, 2 * m + 1)))
        .collect();
    let first_negative = gaps.iter().find(|(_, g)| !nonnegative(g)).map(|(m, _)| *m);
    CanonicalReport {
        measure: mu.label().to_string(),
        second_moment: second,
        canonical: first_negative.is_none(),
        first_negative,
        gaps,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitivityProbe {
    pub a_over_b: WellsReport,
    pub b_over_c: WellsReport,
    pub a_over_c: WellsReport,
    /// True when both premises hold and the conclusion fails at this degree.
    pub counterexample_candidate: bool,
}

/// Checks a ▷ b, b ▷ c and a ▷ c at one degree. Draws no conclusion about
/// transitivity in general.
pub fn transitivity_probe(
    a: &EvenMeasure,
    b: &EvenMeasure,
    c: &EvenMeasure,
    max_degree: u32,
    tol: f64,
) -> Result<TransitivityProbe> {
    let ab = wells_dominates(a, b, max_degree, tol)?;
    let bc = wells_dominates(b, c, max_degree, tol)?;
    let ac = wells_dominates(a, c, max_degree, tol)?;
    let counterexample_candidate = ab.verdict == Verdict::Dominates
        && bc.verdict == Verdict::Dominates
        && ac.verdict == Verdict::Violated;
    Ok(TransitivityProbe {
        a_over_b: ab,
        b_over_c: bc,
        a_over_c: ac,
        counterexample_candidate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::measures::{make_measure, MeasureSpec};

    fn spec(s: &str) -> EvenMeasure {
        make_measure(&MeasureSpec::parse(s).unwrap()).unwrap()
    }

    fn q(n: i64, d: i64) -> Value {
        Value::Exact(rational(n, d))
    }

    /// Brute-force double sum over signed atoms.
    fn brute(upper: &EvenMeasure, lower: &EvenMeasure, n: u32, m: u32) -> BigRational {
        let u = upper.expanded_atoms_exact().unwrap();
        let l = lower.expanded_atoms_exact().unwrap();
        let mut acc = BigRational::zero();
        for (x, px) in &u {
            for (y, py) in &l {
                acc += px * py * num::traits::Pow::pow(&(x + y), n) * num::traits::Pow::pow(&(x - y), m);
            }
        }
        acc
    }

    #[test]
    fn integral_examples() {
        let b1 = spec("bernoulli:1");
        let bh = spec("bernoulli:1/2");
        assert_eq!(wells_integral(&b1, &b1, 1, 1), q(0, 1));
        assert_eq!(brute(&b1, &bh, 1, 1), rational(3, 4));
        assert_eq!(wells_integral(&b1, &bh, 1, 1), q(3, 4));
        assert_eq!(brute(&b1, &bh, 1, 3), rational(15, 16));
        assert_eq!(wells_integral(&b1, &bh, 1, 3), q(15, 16));
    }

    #[test]
    fn dominance_examples() {
        let b1 = spec("bernoulli:1");
        let r = wells_dominates(&b1, &spec("three_point:0.4"), 12, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Dominates);
        // odd n ≤ m with n + m ≤ 24: 12 + 10 + 8 + 6 + 4 + 2
        assert_eq!(r.entries.len(), 42);

        let r = wells_dominates(&spec("bernoulli:0.5"), &b1, 4, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        let e11 = r.entries.iter().find(|e| e.n == 1 && e.m == 1).unwrap();
        assert_eq!(e11.value, q(-3, 4));

        let mu = spec("spin:3/2");
        let r = wells_dominates(&mu, &mu, 6, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Dominates);
        for e in r.entries.iter().filter(|e| e.n == e.m) {
            assert!(e.value.is_zero());
        }
    }

    #[test]
    fn max_degree_zero_rejected() {
        let b1 = spec("bernoulli:1");
        assert!(wells_dominates(&b1, &b1, 0, 1e-9).is_err());
    }

    #[test]
    fn odd_gap_examples() {
        let m = spec("three_point:2/3");
        for mm in 0..6u32 {
            let n = 2 * mm + 1;
            let expect = rational(1, 3) * num::traits::Pow::pow(&rational(1, 2), n);
            assert_eq!(odd_moment_gap(&m, &q(1, 2), n), Value::Exact(expect));
        }
        let half = spec("three_point:1/2");
        for n in (1..30).step_by(2) {
            assert!(odd_moment_gap(&half, &q(1, 2), n).is_zero());
            assert!(odd_moment_gap(&spec("bernoulli:1"), &q(1, 1), n).is_zero());
        }
        // D-vector Horner path against the closed form ⟨(x²−1/3)³⟩ = 16/945
        assert_eq!(odd_moment_gap(&spec("dvector:3"), &q(1, 3), 3), q(16, 945));
    }

    #[test]
    fn t_plus_values() {
        assert_eq!(t_plus(&spec("three_point:0.1")).unwrap(), q(1, 1));
        assert_eq!(t_plus(&spec("spin:7/2")).unwrap(), q(1, 1));
        assert_eq!(t_plus(&spec("scaled:0.3:bernoulli:1")).unwrap(), q(3, 10));
        assert_eq!(t_plus(&spec("three_point:0")), Err(Error::PointMassAtZero));
    }

    #[test]
    fn t_minus_examples() {
        let r = t_minus(&spec("three_point:0.3"), 11, 1e-9).unwrap();
        assert!((r.t_minus_estimate - 0.3f64.sqrt()).abs() < 1e-9);
        assert_eq!(r.argmin_power, 1);
        let r = t_minus(&spec("bernoulli:1"), 7, 1e-9).unwrap();
        assert_eq!(r.t_minus_estimate, 1.0);
        assert!(r.stabilized);
        let r = t_minus(&spec("three_point:0.7"), 101, 1e-9).unwrap();
        assert!((r.t_minus_estimate - 0.5f64.sqrt()).abs() < 2e-3);
        assert!(!r.stabilized);
        for w in r.running_estimates.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn t_minus_errors() {
        let b = spec("bernoulli:1");
        assert!(t_minus(&b, 4, 1e-9).is_err());
        assert!(t_minus(&b, 5, 0.0).is_err());
        assert!(t_minus(&spec("three_point:0"), 5, 1e-9).is_err());
    }

    #[test]
    fn three_point_closed_form() {
        assert_eq!(t_minus_three_point(&rational(3, 10)).unwrap(), rational(3, 10));
        assert_eq!(t_minus_three_point(&rational(7, 10)).unwrap(), rational(1, 2));
        assert_eq!(t_minus_three_point(&rational(1, 2)).unwrap(), rational(1, 2));
        assert!(t_minus_three_point(&int(0)).is_err());
    }

    #[test]
    fn canonical_examples() {
        assert!(canonical_check(&spec("three_point:0.4"), 30).canonical);
        let r = canonical_check(&spec("spin:1"), 1);
        assert!(!r.canonical);
        // direct summation: (2/3)(1/3)^3 − (1/3)(2/3)^3 = −2/27
        assert_eq!(r.gaps[0].1, q(0, 1));
        assert_eq!(r.gaps[1].1, q(-2, 27));
        let r = canonical_check(&spec("dvector:2"), 20);
        assert!(r.canonical);
        assert!(r.gaps.iter().all(|(_, g)| g.is_zero()));
    }

    #[test]
    fn float_mode_verdicts() {
        let b = spec("bernoulli:1").to_float();
        let l = spec("three_point:0.4").to_float();
        let r = wells_dominates(&b, &l, 8, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Dominates);
        assert!(!r.min_slack.is_exact());
    }
}
