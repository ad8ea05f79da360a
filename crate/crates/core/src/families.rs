//! Exact canonical-bound certificates for the D-vector and spin-S families,
//! and a float explorer for the `|j|^p` analog of the spin sum.
//!
//! For half-odd-integral S the spin sum is evaluated over `k = 2j`, which
//! multiplies every term by 4 and the whole sum by `4^(2m+1)`. Only the sign
//! of [`spin_odd_sum`] is meaningful across the two cases;
//! [`spin_odd_sum_rational`] undoes the scale.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Pow, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{binomial_row, int, rational, HalfInteger, Num};
use crate::error::{invalid, Result};
use crate::measures::dvector_even_moment;

/// Relative threshold below which a float sum is reported as indeterminate.
pub const INDETERMINATE_REL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Dvector,
    Spin,
    PowerAnalog,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FamilyVerdict {
    AllNonneg,
    /// First power with a negative value.
    Violation { m: u32 },
    /// S = 1: zero at m = 0 and strictly negative for every m ≥ 1.
    OppositeSign,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyCertificate {
    pub family: Family,
    pub parameter: String,
    pub checked_powers: Vec<u32>,
    pub values: Vec<Num>,
    pub verdict: FamilyVerdict,
}

fn verdict_from_signs<'a>(values: impl Iterator<Item = (u32, &'a BigRational)>) -> FamilyVerdict {
    for (m, v) in values {
        if v.is_negative() {
            return FamilyVerdict::Violation { m };
        }
    }
    FamilyVerdict::AllNonneg
}

/// The 2S+1 spin values j = −S..S, as `j` for integral S and `2j` otherwise.
fn spin_lattice(s: HalfInteger) -> Vec<i64> {
    let t = s.twice() as i64;
    if s.is_integral() {
        (-t / 2..=t / 2).collect()
    } else {
        (-t..=t).step_by(2).collect()
    }
}

/// ⟨x²⟩ of the spin-S measure: (S+1)/(3S) normalized, S(S+1)/3 otherwise.
pub fn spin_second_moment(s: HalfInteger, normalized: bool) -> BigRational {
    let sq = s.to_rational();
    let closed = if normalized {
        (&sq + int(1)) / (int(3) * &sq)
    } else {
        &sq * (&sq + int(1)) / int(3)
    };
    let j_max = BigRational::from_integer(BigInt::from(s.twice())) / int(2);
    let mut j = -j_max.clone();
    let mut direct = BigRational::zero();
    while j <= j_max {
        direct += &j * &j;
        j += int(1);
    }
    direct /= int(s.twice() as i64 + 1);
    if normalized {
        direct /= &sq * &sq;
    }
    assert_eq!(closed, direct, "spin second moment closed form");
    closed
}

/// Σ_j (3j² − S(S+1))^{2m+1}, in the integer `k = 2j` form when 2S is odd.
pub fn spin_odd_sum(s: HalfInteger, m: u32) -> BigInt {
    let t = s.twice() as i64;
    let center = if s.is_integral() {
        (t / 2) * (t / 2 + 1)
    } else {
        t * (t + 2)
    };
    spin_lattice(s)
        .into_iter()
        .map(|k| Pow::pow(BigInt::from(3 * k * k - center), 2 * m + 1))
        .sum()
}

/// Σ_j (3j² − S(S+1))^{2m+1} as an exact rational for every S.
pub fn spin_odd_sum_rational(s: HalfInteger, m: u32) -> BigRational {
    let raw = BigRational::from_integer(spin_odd_sum(s, m));
    if s.is_integral() {
        raw
    } else {
        raw / Pow::pow(BigRational::from_integer(BigInt::from(4)), 2 * m + 1)
    }
}

fn spin_certificate(s: HalfInteger, m_max: u32) -> FamilyCertificate {
    let values: Vec<BigRational> = (0..=m_max).map(|m| spin_odd_sum_rational(s, m)).collect();
    let verdict = if s.twice() == 2 {
        let reversed = values[0].is_zero() && values[1..].iter().all(|v| v.is_negative());
        if reversed {
            FamilyVerdict::OppositeSign
        } else {
            verdict_from_signs((0..).zip(values.iter()))
        }
    } else {
        verdict_from_signs((0..).zip(values.iter()))
    };
    FamilyCertificate {
        family: Family::Spin,
        parameter: format!("S={s}"),
        checked_powers: (0..=m_max).collect(),
        values: values.iter().map(Num::exact).collect(),
        verdict,
    }
}

/// One certificate per S for m = 0..=m_max. S = 1 is expected to come out
/// as [`FamilyVerdict::OppositeSign`].
pub fn verify_spin_canonical(s_list: &[HalfInteger], m_max: u32) -> Vec<FamilyCertificate> {
    s_list
        .par_iter()
        .map(|&s| spin_certificate(s, m_max))
        .collect()
}

/// k-th moment of the first coordinate of a uniform point on S^{D−1}.
pub fn dvector_moment(d: u32, k: u32) -> Result<BigRational> {
    if d < 2 {
        return Err(invalid("D", format!("{d} < 2")));
    }
    Ok(if k % 2 == 1 {
        BigRational::zero()
    } else {
        dvector_even_moment(d, k / 2)
    })
}

/// ⟨(x² − 1/D)^{2m+1}⟩ for the D-vector model.
pub fn dvector_odd_expectation(d: u32, m: u32) -> Result<BigRational> {
    if d < 2 {
        return Err(invalid("D", format!("{d} < 2")));
    }
    let n = 2 * m + 1;
    let shift = -rational(1, d as i64);
    let binom = binomial_row(n);
    Ok(binom
        .iter()
        .enumerate()
        .map(|(k, c)| {
            BigRational::from_integer(c.clone())
                * dvector_even_moment(d, k as u32)
                * Pow::pow(&shift, n - k as u32)
        })
        .sum())
}

/// Certificates for D = 2..=d_max and m = 0..=m_max.
pub fn verify_dvector_canonical(d_max: u32, m_max: u32) -> Result<Vec<FamilyCertificate>> {
    if d_max < 2 {
        return Err(invalid("d_max", format!("{d_max} < 2")));
    }
    (2..=d_max)
        .into_par_iter()
        .map(|d| {
            let values = (0..=m_max)
                .map(|m| dvector_odd_expectation(d, m))
                .collect::<Result<Vec<_>>>()?;
            Ok(FamilyCertificate {
                family: Family::Dvector,
                parameter: format!("D={d}"),
                checked_powers: (0..=m_max).collect(),
                verdict: verdict_from_signs((0..).zip(values.iter())),
                values: values.iter().map(Num::exact).collect(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    Positive,
    Negative,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerAnalogRow {
    pub p: f64,
    #[serde(rename = "S")]
    pub s: HalfInteger,
    pub m: u32,
    /// Σ_j (3|j|^p − 3Ā_p)^{2m+1}.
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub value: f64,
    /// The same sum divided by max_j |3|j|^p − 3Ā_p|^{2m+1}.
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub normalized: f64,
    pub sign: SignClass,
    /// Whether 2ψ(1) + ψ(0) + 2ψ(1/S) ≥ 5ψ̄ for ψ(x) = |x|^p on the grid
    /// j/S. Absent for half-odd S, where no such hypothesis is needed.
    pub five_point_gate: Option<bool>,
}

fn power_terms(p: f64, s: HalfInteger) -> Vec<f64> {
    let half = s.to_f64();
    let n = s.twice() as usize + 1;
    let powers: Vec<f64> = (0..n).map(|i| (i as f64 - half).abs().powf(p)).collect();
    let mean = powers.iter().sum::<f64>() / n as f64;
    powers.iter().map(|v| 3.0 * (v - mean)).collect()
}

/// 2ψ(1) + ψ(0) + 2ψ(1/N) ≥ 5ψ̄ for ψ(x) = |x|^p sampled at j/N, j = −N..N.
pub fn power_gate_five_point(p: f64, n: u32) -> bool {
    let nf = n as f64;
    let psi = |j: i64| (j as f64 / nf).abs().powf(p);
    let mean = (-(n as i64)..=n as i64).map(psi).sum::<f64>() / (2.0 * nf + 1.0);
    2.0 * psi(n as i64) + psi(0) + 2.0 * psi(1) >= 5.0 * mean - 1e-12
}

fn power_row(p: f64, s: HalfInteger, m: u32) -> PowerAnalogRow {
    let terms = power_terms(p, s);
    let top = terms.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    let e = 2 * m as i32 + 1;
    let normalized = if top == 0.0 {
        0.0
    } else {
        terms.iter().map(|t| (t / top).powi(e)).sum::<f64>()
    };
    let sign = if normalized.abs() < INDETERMINATE_REL {
        SignClass::Indeterminate
    } else if normalized > 0.0 {
        SignClass::Positive
    } else {
        SignClass::Negative
    };
    PowerAnalogRow {
        p,
        s,
        m,
        value: normalized * top.powi(e),
        normalized,
        sign,
        five_point_gate: s.is_integral().then(|| power_gate_five_point(p, s.twice() / 2)),
    }
}

/// Σ_{j=−S..S} (3|j|^p − 3Ā_p)^{2m+1} with Ā_p the average of |j|^p, so that
/// the m = 0 sum vanishes and p = 2 gives the spin sum.
pub fn power_analog_sum(p: f64, s: HalfInteger, m: u32) -> Result<f64> {
    check_p(p)?;
    Ok(power_row(p, s, m).value)
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid("p", format!("{p} must exceed 1")));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerAnalogReport {
    pub p: f64,
    /// Large-N limit of the gate above: ∫₀¹ x^p dx ≤ 2/5, i.e. p ≥ 3/2.
    pub limit_gate_holds: bool,
    pub rows: Vec<PowerAnalogRow>,
    pub note: String,
}

/// Sign table over S ∈ {1/2, 1, …, s_max} and m = 0..=m_max.
pub fn power_analog_table(p: f64, s_max: HalfInteger, m_max: u32) -> Result<PowerAnalogReport> {
    check_p(p)?;
    let grid: Vec<(u32, u32)> = (1..=s_max.twice())
        .flat_map(|t| (0..=m_max).map(move |m| (t, m)))
        .collect();
    let rows = grid
        .par_iter()
        .map(|&(t, m)| power_row(p, HalfInteger::from_twice(t).expect("t ≥ 1"), m))
        .collect();
    Ok(PowerAnalogReport {
        p,
        limit_gate_holds: p >= 1.5,
        rows,
        note: "exploratory data only; no conclusion is drawn for the open question".into(),
    })
}

/// The five-point gate for ψ(x) = (Sx)², N = S: 2S² + 2 ≥ (5/3)S(S+1).
pub fn square_gate_five_point(s: i64) -> bool {
    6 * s * s + 6 >= 5 * s * (s + 1)
}

/// The odd-N gate for ψ(x) = (Sx)², N = S: S²(1/2 + 1/(2S))² ≤ S(S+1)/3.
pub fn square_gate_odd_n(s: i64) -> bool {
    3 * (s + 1) * (s + 1) <= 4 * s * (s + 1)
}
