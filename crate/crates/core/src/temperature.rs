//! Coefficients of the transition-temperature bounds.
//!
//! Critical temperatures are never computed. A report gives the factor
//! `T₋²` in `T_c(μ) ≥ T₋² · T_c(Ising)` together with the mean-field value
//! and, for spins, the comparison with Griffiths' factor.

use num::rational::BigRational;
use serde::Serialize;

use crate::arith::{int, rational, HalfInteger, Value};
use crate::error::Result;
use crate::measures::{make_measure, EvenMeasure, MeasureSpec};
use crate::wells::{canonical_check, t_minus, t_minus_three_point, t_plus};

/// ⟨x²⟩_μ · Σ_j J(j).
pub fn mean_field_tc(mu: &EvenMeasure, coupling_sum: &Value) -> Value {
    &mu.moment(2) * coupling_sum
}

/// Griffiths' factor for spin S: 1/4 for integral S, ((k+1)/(2k+1))² for
/// 2S = 2k+1.
pub fn griffiths_factor(s: HalfInteger) -> BigRational {
    if s.is_integral() {
        rational(1, 4)
    } else {
        let k = (s.twice() as i64 - 1) / 2;
        let r = rational(k + 1, 2 * k + 1);
        &r * &r
    }
}

/// Exact T₋² for the normalized spin-S measure: (S+1)/(3S) for S ≠ 1 and
/// 1/2 for S = 1.
pub fn spin_lower_factor(s: HalfInteger) -> BigRational {
    if s.twice() == 2 {
        rational(1, 2)
    } else {
        let q = s.to_rational();
        (&q + int(1)) / (int(3) * q)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TemperatureBounds {
    pub measure: String,
    pub second_moment: Value,
    pub t_minus_sq: Value,
    /// "exact" for closed-form families, otherwise "estimate".
    pub t_minus_source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff_note: Option<String>,
    pub t_plus_sq: Value,
    /// Coefficient of T_c(Ising) in the lower bound; equals t_minus_sq.
    pub lower_factor: Value,
    pub canonical: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_field_tc: Option<Value>,
    /// lower_factor · coupling_sum, the mean-field value of b_{T₋}.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_mean_field: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub griffiths_factor: Option<Value>,
    /// lower_factor / griffiths_factor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub improvement_ratio: Option<Value>,
    /// lower_factor / (1/4), the ratio against the uniform spin bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform_ratio: Option<Value>,
}

enum Closed {
    Spin(HalfInteger, bool),
    Dvector(u32),
    ThreePoint(BigRational),
    Bernoulli(Value),
}

fn closed_form(spec: &MeasureSpec) -> Option<Closed> {
    match spec {
        MeasureSpec::Spin { s, normalized } => {
            let s = HalfInteger::from_rational(s.0.as_exact()?).ok()?;
            Some(Closed::Spin(s, *normalized))
        }
        MeasureSpec::Dvector { d } => Some(Closed::Dvector(*d)),
        MeasureSpec::ThreePoint { lambda } => lambda.0.as_exact().cloned().map(Closed::ThreePoint),
        MeasureSpec::Bernoulli { t } => Some(Closed::Bernoulli(t.0.clone())),
        _ => None,
    }
}

/// Builds the bound report for `spec`. Closed-form families use exact
/// T₋²; anything else uses the finite-cutoff estimate from [`t_minus`].
pub fn bound_report(
    spec: &MeasureSpec,
    cutoff: u32,
    tol: f64,
    coupling_sum: Option<&Value>,
) -> Result<TemperatureBounds> {
    let mu = make_measure(spec)?;
    let second = mu.moment(2);
    let tp = t_plus(&mu)?;
    let t_plus_sq = &tp * &tp;
    let mut griffiths = None;
    let mut uniform = None;
    let (t_minus_sq, source, note, canonical) = match closed_form(spec) {
        Some(Closed::Spin(s, normalized)) => {
            let scale = if normalized {
                BigRational::from_integer(1.into())
            } else {
                let q = s.to_rational();
                &q * &q
            };
            let lf = spin_lower_factor(s) * &scale;
            griffiths = Some(griffiths_factor(s) * &scale);
            uniform = Some(rational(1, 4) * &scale);
            (Value::Exact(lf), "exact", None, s.twice() != 2)
        }
        Some(Closed::Dvector(d)) => (Value::Exact(rational(1, d as i64)), "exact", None, true),
        Some(Closed::ThreePoint(lambda)) => {
            let sq = t_minus_three_point(&lambda)?;
            let canonical = sq == lambda;
            (Value::Exact(sq), "exact", None, canonical)
        }
        Some(Closed::Bernoulli(t)) => (&t * &t, "exact", None, true),
        None => {
            let report = t_minus(&mu, cutoff, tol)?;
            let canonical = canonical_check(&mu, (cutoff - 1) / 2).canonical;
            (
                report.t_minus_sq_estimate.clone(),
                "estimate",
                Some(report.note),
                canonical,
            )
        }
    };
    let lower_factor = t_minus_sq.clone();
    let ratio = |g: &Option<BigRational>| {
        g.as_ref()
            .map(|g| Value::Exact(lower_factor.as_exact().expect("exact spin factor") / g))
    };
    Ok(TemperatureBounds {
        measure: mu.label().to_string(),
        mean_field_tc: coupling_sum.map(|c| mean_field_tc(&mu, c)),
        lower_mean_field: coupling_sum.map(|c| &lower_factor * c),
        improvement_ratio: ratio(&griffiths),
        uniform_ratio: ratio(&uniform),
        griffiths_factor: griffiths.map(Value::Exact),
        second_moment: second,
        t_minus_sq,
        t_minus_source: source,
        cutoff_note: note,
        t_plus_sq,
        lower_factor,
        canonical,
    })
}
