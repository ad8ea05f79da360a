//! Majorization of non-increasing non-negative vectors, the Karamata test,
//! the two vector constructions behind the odd-power spin inequality, and
//! tail dominance of measures on `[0, ∞)`.
//!
//! Everything is generic over [`Scalar`], so the same code runs in exact
//! rational arithmetic and in floating point with a small tolerance.

use std::path::PathBuf;
use std::str::FromStr;

use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{parse_rational, Num, Scalar, FLOAT_TOL};
use crate::error::{invalid, Error, Result};

/// A vector with `x₁ ≥ x₂ ≥ … ≥ xₙ ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedVector<T> {
    entries: Vec<T>,
}

impl<T: Scalar> OrderedVector<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if !e.approx_ge(&T::zero()) {
                return Err(invalid("entries", format!("entry {} is negative ({e})", i + 1)));
            }
            if i > 0 && !entries[i - 1].approx_ge(e) {
                return Err(Error::Unordered(i + 1));
            }
        }
        Ok(OrderedVector { entries })
    }

    /// Sorts into non-increasing order first.
    pub fn from_unsorted(mut entries: Vec<T>) -> Result<Self> {
        entries.sort_by(|a, b| b.partial_cmp(a).expect("comparable entries"));
        Self::new(entries)
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> T {
        sum(&self.entries)
    }

    pub fn partial_sums(&self) -> Vec<T> {
        partial_sums(&self.entries)
    }

    pub fn to_nums(&self) -> Vec<Num> {
        nums(&self.entries)
    }
}

fn sum<T: Scalar>(v: &[T]) -> T {
    v.iter().cloned().fold(T::zero(), |a, b| a + b)
}

/// S_k = x₁ + … + x_k for k = 1..n.
pub fn partial_sums<T: Scalar>(v: &[T]) -> Vec<T> {
    let mut acc = T::zero();
    v.iter()
        .map(|e| {
            acc = acc.clone() + e.clone();
            acc.clone()
        })
        .collect()
}

fn nums<T: Scalar>(v: &[T]) -> Vec<Num> {
    v.iter().map(Scalar::num).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Direct,
    SingleCrossing,
    ViaW,
}

/// Hypotheses of the two constructions; absent entries do not apply.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HypothesisFlags {
    /// At least (N+1)/2 grid values lie at or below the mean.
    #[serde(rename = "A1A", skip_serializing_if = "Option::is_none")]
    pub a1a: Option<bool>,
    /// Midpoint value ≤ ψ̄.
    #[serde(rename = "A1B_left", skip_serializing_if = "Option::is_none")]
    pub a1b_left: Option<bool>,
    /// ψ̄ ≤ (ψ(0) + ψ(1))/2.
    #[serde(rename = "A1B_right", skip_serializing_if = "Option::is_none")]
    pub a1b_right: Option<bool>,
    /// 2ψ(1) + ψ(0) + 2ψ(1/N) ≥ 5ψ̄.
    #[serde(rename = "A3B", skip_serializing_if = "Option::is_none")]
    pub a3b: Option<bool>,
    /// ψ(1/2 + 1/(2N)) ≤ ψ̄, for odd N only.
    #[serde(rename = "A3C", skip_serializing_if = "Option::is_none")]
    pub a3c: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MajorizationCertificate {
    pub x: Vec<Num>,
    pub y: Vec<Num>,
    /// S_k(x) − S_k(y), k = 1..n.
    pub partial_sum_gaps: Vec<Num>,
    pub total_equal: bool,
    pub majorizes: bool,
    pub route: Route,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Num>>,
    /// 1-based index ℓ of the sign change, for the single-crossing route.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossing_index: Option<usize>,
    pub hypothesis_flags: HypothesisFlags,
}

fn check_lengths<T>(x: &OrderedVector<T>, y: &OrderedVector<T>) -> Result<()> {
    if x.entries.len() != y.entries.len() {
        return Err(Error::LengthMismatch(x.entries.len(), y.entries.len()));
    }
    Ok(())
}

fn base_certificate<T: Scalar>(x: &[T], y: &[T], route: Route) -> MajorizationCertificate {
    let sx = partial_sums(x);
    let sy = partial_sums(y);
    let gaps: Vec<T> = sx.iter().zip(&sy).map(|(a, b)| a.clone() - b.clone()).collect();
    let total_equal = match (sx.last(), sy.last()) {
        (Some(a), Some(b)) => a.approx_eq(b),
        _ => true,
    };
    let all_nonneg = sx.iter().zip(&sy).all(|(a, b)| a.approx_ge(b));
    MajorizationCertificate {
        x: nums(x),
        y: nums(y),
        partial_sum_gaps: nums(&gaps),
        total_equal,
        majorizes: total_equal && all_nonneg,
        route,
        w: None,
        crossing_index: None,
        hypothesis_flags: HypothesisFlags::default(),
    }
}

/// x ≻ y: equal totals and S_k(x) ≥ S_k(y) for every k.
pub fn majorizes<T: Scalar>(
    x: &OrderedVector<T>,
    y: &OrderedVector<T>,
) -> Result<MajorizationCertificate> {
    check_lengths(x, y)?;
    Ok(base_certificate(&x.entries, &y.entries, Route::Direct))
}

/// First 1-based ℓ with x_ℓ ≤ y_ℓ, if x_j > y_j before ℓ and x_j ≤ y_j
/// from ℓ on, and ℓ ≥ 2.
fn crossing_index<T: Scalar>(x: &[T], y: &[T]) -> Option<usize> {
    let ell = x.iter().zip(y).position(|(a, b)| !a.definitely_gt(b))? + 1;
    if ell < 2 {
        return None;
    }
    let tail_ok = x[ell - 1..]
        .iter()
        .zip(&y[ell - 1..])
        .all(|(a, b)| b.approx_ge(a));
    tail_ok.then_some(ell)
}

/// Certifies x ≻ y through a single + to − sign change of x − y. Returns
/// `None` when that pattern is absent, which says nothing about whether
/// x ≻ y holds.
pub fn single_crossing_check<T: Scalar>(
    x: &OrderedVector<T>,
    y: &OrderedVector<T>,
) -> Result<Option<MajorizationCertificate>> {
    check_lengths(x, y)?;
    let (tx, ty) = (x.total(), y.total());
    if !tx.approx_eq(&ty) {
        return Err(Error::TotalsDiffer(tx.to_string(), ty.to_string()));
    }
    Ok(crossing_index(&x.entries, &y.entries).map(|ell| {
        let mut cert = base_certificate(&x.entries, &y.entries, Route::SingleCrossing);
        cert.crossing_index = Some(ell);
        debug_assert!(cert.majorizes);
        cert
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction<T> {
    /// t ↦ t^k on [0, x₁].
    Power(u32),
    /// t ↦ max(0, t − c).
    Hinge(T),
}

impl<T: Scalar> TestFunction<T> {
    pub fn eval(&self, t: &T) -> T {
        match self {
            TestFunction::Power(k) => t.powu(*k),
            TestFunction::Hinge(c) => {
                let d = t.clone() - c.clone();
                if d > T::zero() {
                    d
                } else {
                    T::zero()
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            TestFunction::Power(k) => format!("t^{k}"),
            TestFunction::Hinge(c) => format!("max(0,t-{c})"),
        }
    }

    pub fn total(&self, v: &[T]) -> T {
        v.iter().fold(T::zero(), |acc, t| acc + self.eval(t))
    }
}

/// Distinct entries of x and y in increasing order: the breakpoints where
/// the hinge sums change slope.
fn hinge_grid<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    let mut grid: Vec<T> = x.iter().chain(y).cloned().collect();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("comparable entries"));
    grid.dedup_by(|a, b| a.approx_eq(b));
    grid
}

/// Odd powers 1..=9, the square and hinges at every entry of x and y.
pub fn default_test_family<T: Scalar>(x: &OrderedVector<T>, y: &OrderedVector<T>) -> Vec<TestFunction<T>> {
    let mut family: Vec<TestFunction<T>> = [1, 2, 3, 5, 7, 9].iter().map(|&k| TestFunction::Power(k)).collect();
    family.extend(hinge_grid(&x.entries, &y.entries).into_iter().map(TestFunction::Hinge));
    family
}

#[derive(Clone, Debug, Serialize)]
pub struct KaramataCheck {
    pub function: String,
    pub lhs: Num,
    pub rhs: Num,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KaramataReport {
    pub checks: Vec<KaramataCheck>,
    pub all_hold: bool,
}

/// Σφ(xⱼ) ≥ Σφ(yⱼ) for each φ in `family`. Requires x ≻ y.
pub fn karamata_test<T: Scalar>(
    x: &OrderedVector<T>,
    y: &OrderedVector<T>,
    family: &[TestFunction<T>],
) -> Result<KaramataReport> {
    if !majorizes(x, y)?.majorizes {
        return Err(Error::Precondition("x does not majorize y".into()));
    }
    let checks: Vec<KaramataCheck> = family
        .iter()
        .map(|phi| {
            let lhs = phi.total(&x.entries);
            let rhs = phi.total(&y.entries);
            KaramataCheck {
                function: phi.name(),
                holds: lhs.approx_ge(&rhs),
                lhs: lhs.num(),
                rhs: rhs.num(),
            }
        })
        .collect();
    Ok(KaramataReport {
        all_hold: checks.iter().all(|c| c.holds),
        checks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HingeWitness {
    pub c: Num,
    pub lhs: Num,
    pub rhs: Num,
}

/// A hinge φ(t) = max(0, t − c) with Σφ(x) < Σφ(y), searched over the
/// entries of x and y. For equal totals such a hinge exists exactly when x
/// does not majorize y.
pub fn hinge_witness<T: Scalar>(x: &OrderedVector<T>, y: &OrderedVector<T>) -> Result<Option<HingeWitness>> {
    check_lengths(x, y)?;
    Ok(hinge_grid(&x.entries, &y.entries).into_iter().find_map(|c| {
        let phi = TestFunction::Hinge(c.clone());
        let lhs = phi.total(&x.entries);
        let rhs = phi.total(&y.entries);
        rhs.definitely_gt(&lhs).then(|| HingeWitness {
            c: c.num(),
            lhs: lhs.num(),
            rhs: rhs.num(),
        })
    }))
}

fn check_convex<T: Scalar>(v: &[T], what: &str) -> Result<()> {
    for (i, w) in v.windows(3).enumerate() {
        let second = w[0].clone() + w[2].clone() - w[1].clone() - w[1].clone();
        if !second.approx_ge(&T::zero()) {
            return Err(Error::PsiHypothesis(format!(
                "{what}: second difference at grid index {} is negative ({second})",
                i + 1
            )));
        }
    }
    Ok(())
}

fn mean<T: Scalar>(v: &[T]) -> T {
    sum(v).div(&T::from_ratio(v.len() as i64, 1))
}

fn descending<T: Scalar>(mut v: Vec<T>) -> Vec<T> {
    v.sort_by(|a, b| b.partial_cmp(a).expect("comparable entries"));
    v
}

fn pad<T: Scalar>(mut v: Vec<T>, len: usize) -> Vec<T> {
    v.resize(len, T::zero());
    v
}

#[derive(Clone, Debug)]
pub struct A1Build<T> {
    pub n_grid: usize,
    pub psi_bar: T,
    /// Number of grid values at or below ψ̄.
    pub n: usize,
    /// Number of grid values above ψ̄.
    pub q: usize,
    pub x: OrderedVector<T>,
    pub y: OrderedVector<T>,
    /// ψ(1/2) for even N; the chord value (ψ(k/N) + ψ((k+1)/N))/2 for
    /// N = 2k+1, which is also bounded by ψ̄ for convex ψ.
    pub midpoint_proxy: T,
    pub flags: HypothesisFlags,
}

/// Builds (x, y) from ψ(j/N), j = 0..N, for a non-negative, strictly
/// increasing, convex ψ: y collects ψ̄ − ψ over the n low values and x the
/// q = N+1−n values ψ − ψ̄ from the top, zero-padded to length n.
pub fn build_theorem_a1<T: Scalar>(psi: &[T]) -> Result<A1Build<T>> {
    if psi.len() < 2 {
        return Err(invalid("psi", "need ψ(j/N) for j = 0..N with N ≥ 1"));
    }
    let big_n = psi.len() - 1;
    if let Some(j) = psi.iter().position(|v| !v.approx_ge(&T::zero())) {
        return Err(Error::PsiHypothesis(format!("ψ({j}/{big_n}) is negative")));
    }
    if let Some(j) = psi.windows(2).position(|w| !w[1].definitely_gt(&w[0])) {
        return Err(Error::PsiHypothesis(format!(
            "ψ is not strictly increasing between grid points {j} and {}",
            j + 1
        )));
    }
    check_convex(psi, "ψ")?;

    let psi_bar = mean(psi);
    let n = psi.iter().filter(|v| psi_bar.approx_ge(v)).count();
    let q = big_n + 1 - n;
    let a1a = 2 * n > big_n;
    if !a1a {
        return Err(Error::PsiHypothesis(format!(
            "only {n} of {} grid values lie at or below the mean",
            big_n + 1
        )));
    }
    let y: Vec<T> = psi[..n].iter().map(|v| psi_bar.clone() - v.clone()).collect();
    let x: Vec<T> = (0..q).map(|j| psi[big_n - j].clone() - psi_bar.clone()).collect();
    let x = pad(x, n);

    let k = big_n / 2;
    let midpoint_proxy = if big_n % 2 == 0 {
        psi[k].clone()
    } else {
        (psi[k].clone() + psi[k + 1].clone()).div(&T::from_ratio(2, 1))
    };
    let chord = (psi[0].clone() + psi[big_n].clone()).div(&T::from_ratio(2, 1));
    let flags = HypothesisFlags {
        a1a: Some(a1a),
        a1b_left: Some(psi_bar.approx_ge(&midpoint_proxy)),
        a1b_right: Some(chord.approx_ge(&psi_bar)),
        ..Default::default()
    };
    Ok(A1Build {
        n_grid: big_n,
        psi_bar,
        n,
        q,
        x: OrderedVector::new(x)?,
        y: OrderedVector::new(y)?,
        midpoint_proxy,
        flags,
    })
}

#[derive(Clone, Debug)]
pub struct A2Build<T> {
    pub n_grid: usize,
    pub psi_bar: T,
    /// Number of the 2N+1 grid values at or below ψ̄.
    pub n: usize,
    pub x: OrderedVector<T>,
    pub y: OrderedVector<T>,
    /// (x₁, x₂, 0, x₃, …, x_{n−1}); present when n ≥ 3 and x ends in 0.
    pub w: Option<Vec<T>>,
    pub flags: HypothesisFlags,
    /// n ≥ N + 1.
    pub count_condition: bool,
    /// Failed hypotheses; the construction is refused when non-empty.
    pub refusals: Vec<String>,
}

impl<T> A2Build<T> {
    pub fn refused(&self) -> bool {
        !self.refusals.is_empty()
    }
}

/// Builds (x, y, w) from ψ(j/N), j = 0..N, of an even convex ψ on [−1, 1].
/// Failed hypotheses are reported in `refusals` rather than as errors.
pub fn build_theorem_a2<T: Scalar>(psi: &[T]) -> Result<A2Build<T>> {
    if psi.len() < 2 {
        return Err(invalid("psi", "need ψ(j/N) for j = 0..N with N ≥ 1"));
    }
    let big_n = psi.len() - 1;
    let full: Vec<T> = psi.iter().rev().chain(&psi[1..]).cloned().collect();
    check_convex(&full, "even extension of ψ")?;

    let psi_bar = mean(&full);
    let n = full.iter().filter(|v| psi_bar.approx_ge(v)).count();
    let x: Vec<T> = descending(
        full.iter()
            .filter(|v| v.definitely_gt(&psi_bar))
            .map(|v| v.clone() - psi_bar.clone())
            .collect(),
    );
    let y: Vec<T> = descending(
        full.iter()
            .filter(|v| psi_bar.approx_ge(v))
            .map(|v| psi_bar.clone() - v.clone())
            .collect(),
    );
    let len = x.len().max(y.len());
    let x = pad(x, len);
    let y = pad(y, len);

    let mut refusals = Vec::new();
    if big_n < 2 {
        refusals.push(format!("N = {big_n} < 2"));
    }
    let count_condition = n > big_n;
    if !count_condition {
        refusals.push(format!("only {n} grid values at or below the mean, need N+1 = {}", big_n + 1));
    }
    let five = T::from_ratio(5, 1) * psi_bar.clone();
    let two = T::from_ratio(2, 1);
    let a3b_lhs = two.clone() * psi[big_n].clone() + psi[0].clone() + two * psi[1].clone();
    let a3b = a3b_lhs.approx_ge(&five);
    if !a3b {
        refusals.push(format!("2ψ(1) + ψ(0) + 2ψ(1/N) = {a3b_lhs} < 5ψ̄ = {five}"));
    }
    let a3c = (big_n % 2 == 1).then(|| psi_bar.approx_ge(&psi[big_n.div_ceil(2)]));
    if a3c == Some(false) {
        refusals.push(format!(
            "ψ(1/2 + 1/(2N)) = {} > ψ̄ = {psi_bar}",
            psi[big_n.div_ceil(2)]
        ));
    }
    // Not a gate here; the w chain relies on it at N = 2.
    let chord = (psi[0].clone() + psi[big_n].clone()).div(&T::from_ratio(2, 1));
    let a1b_right = chord.approx_ge(&psi_bar);
    let w = (len >= 3 && count_condition && x[len - 1].is_zero()).then(|| {
        let mut w = Vec::with_capacity(len);
        w.extend_from_slice(&x[..2]);
        w.push(T::zero());
        w.extend_from_slice(&x[2..len - 1]);
        w
    });

    Ok(A2Build {
        n_grid: big_n,
        psi_bar,
        n,
        x: OrderedVector::new(x)?,
        y: OrderedVector::new(y)?,
        w,
        flags: HypothesisFlags {
            a1b_right: Some(a1b_right),
            a3b: Some(a3b),
            a3c,
            ..Default::default()
        },
        count_condition,
        refusals,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WRouteReport {
    /// S_j(x) ≥ S_j(w) for all j, equal at j = n.
    pub x_over_w: bool,
    /// S_j(w) ≥ S_j(y) for all j, equal at j = n.
    pub w_over_y: bool,
    /// S_3(w) ≥ S_3(y), the step that needs the five-point gate.
    pub third_partial_sum: bool,
    /// w − y changes sign at most once from + to − after position 3.
    pub tail_single_crossing: bool,
    pub valid: bool,
}

fn dominates_partial_sums<T: Scalar>(a: &[T], b: &[T]) -> bool {
    let sa = partial_sums(a);
    let sb = partial_sums(b);
    sa.iter().zip(&sb).all(|(p, q)| p.approx_ge(q))
        && match (sa.last(), sb.last()) {
            (Some(p), Some(q)) => p.approx_eq(q),
            _ => true,
        }
}

/// The chain x ⊒ w ⊒ y of partial sums.
pub fn w_route_check<T: Scalar>(x: &[T], w: &[T], y: &[T]) -> Result<WRouteReport> {
    if x.len() != w.len() || x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(invalid("w", "needs length at least 3"));
    }
    let x_over_w = dominates_partial_sums(x, w);
    let w_over_y = dominates_partial_sums(w, y);
    let third_partial_sum = partial_sums(&w[..3])[2].approx_ge(&partial_sums(&y[..3])[2]);
    let tail = &w[3..];
    let tail_y = &y[3..];
    let first_le = tail.iter().zip(tail_y).position(|(a, b)| !a.definitely_gt(b));
    let tail_single_crossing = match first_le {
        None => true,
        Some(i) => tail[i..].iter().zip(&tail_y[i..]).all(|(a, b)| b.approx_ge(a)),
    };
    Ok(WRouteReport {
        x_over_w,
        w_over_y,
        third_partial_sum,
        tail_single_crossing,
        valid: x_over_w && w_over_y,
    })
}

/// ψ sampled on a grid j/N.
#[derive(Clone, Debug, PartialEq)]
pub enum PsiSpec {
    /// ψ(x) = |scale·x|^p; scale defaults to N.
    Power { p: BigRational, scale: Option<BigRational> },
    /// ψ(x) = |offset + scale·x|^p; scale defaults to N.
    Shifted { p: BigRational, offset: BigRational, scale: Option<BigRational> },
    /// Explicit values ψ(j/N), j = 0..N, read from a file.
    Table(PathBuf),
    /// Explicit values given inline.
    Values(Vec<BigRational>),
}

impl PsiSpec {
    /// `power:p[:scale]`, `shifted:p:offset[:scale]` or `table:path`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::MeasureSpec(format!("unrecognized ψ spec '{text}'"));
        let (head, rest) = text.split_once(':').ok_or_else(bad)?;
        let fields: Vec<&str> = rest.split(':').collect();
        let num = |s: &str| parse_rational(s);
        match (head, fields.as_slice()) {
            ("power", [p]) => Ok(PsiSpec::Power { p: num(p)?, scale: None }),
            ("power", [p, s]) => Ok(PsiSpec::Power { p: num(p)?, scale: Some(num(s)?) }),
            ("shifted", [p, o]) => Ok(PsiSpec::Shifted { p: num(p)?, offset: num(o)?, scale: None }),
            ("shifted", [p, o, s]) => Ok(PsiSpec::Shifted {
                p: num(p)?,
                offset: num(o)?,
                scale: Some(num(s)?),
            }),
            ("table", _) => Ok(PsiSpec::Table(PathBuf::from(rest))),
            _ => Err(bad()),
        }
    }

    fn exponent(&self) -> Option<&BigRational> {
        match self {
            PsiSpec::Power { p, .. } | PsiSpec::Shifted { p, .. } => Some(p),
            _ => None,
        }
    }

    /// ψ(j/N) for j = 0..N; exact when the exponent is a non-negative integer.
    pub fn values(&self, big_n: u32) -> Result<PsiValues> {
        if big_n == 0 {
            return Err(invalid("N", "must be at least 1"));
        }
        if let Some(p) = self.exponent() {
            if !p.is_positive() {
                return Err(invalid("p", format!("{p} is not positive")));
            }
        }
        let n_q = BigRational::from_integer(big_n.into());
        let (offset, scale) = match self {
            PsiSpec::Power { scale, .. } => (BigRational::zero(), scale.clone().unwrap_or(n_q.clone())),
            PsiSpec::Shifted { offset, scale, .. } => (offset.clone(), scale.clone().unwrap_or(n_q.clone())),
            PsiSpec::Table(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::MeasureSpec(format!("{}: {e}", path.display())))?;
                let values = text
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?;
                return PsiSpec::Values(values).values(big_n);
            }
            PsiSpec::Values(values) => {
                if values.len() != big_n as usize + 1 {
                    return Err(invalid(
                        "psi",
                        format!("table has {} values, N = {big_n} needs {}", values.len(), big_n + 1),
                    ));
                }
                return Ok(PsiValues::Exact(values.clone()));
            }
        };
        let p = self.exponent().expect("power spec");
        let bases: Vec<BigRational> = (0..=big_n)
            .map(|j| (&offset + &scale * BigRational::new(j.into(), big_n.into())).abs())
            .collect();
        if p.is_integer() {
            let k = p.to_integer().to_u32().ok_or_else(|| invalid("p", "exponent too large"))?;
            Ok(PsiValues::Exact(bases.iter().map(|b| b.powu(k)).collect()))
        } else {
            let pf = p.as_f64();
            Ok(PsiValues::Float(bases.iter().map(|b| b.as_f64().powf(pf)).collect()))
        }
    }
}

impl FromStr for PsiSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PsiValues {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    A1,
    A2,
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A1" => Ok(Variant::A1),
            "A2" => Ok(Variant::A2),
            _ => Err(invalid("variant", format!("'{s}' is not A1 or A2"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectSum {
    pub m: u32,
    pub value: Num,
    pub nonneg: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub variant: Variant,
    #[serde(rename = "N")]
    pub n_grid: u32,
    pub psi_values: Vec<Num>,
    pub psi_bar: Num,
    pub n: usize,
    pub refusals: Vec<String>,
    /// Σ (ψ(j/N) − ψ̄)^{2m+1} over the grid (j = 0..N or −N..N).
    pub direct_sums: Vec<DirectSum>,
    pub direct_all_nonneg: bool,
    pub certificate: MajorizationCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_route: Option<WRouteReport>,
    /// Construction hypotheses hold, so the theorem applies.
    pub theorem_applied: bool,
    /// Both the direct sums and the majorization certificate pass.
    pub routes_agree: bool,
}

fn direct_sums<T: Scalar>(grid: &[T], psi_bar: &T, m_max: u32) -> Vec<DirectSum> {
    let centered: Vec<T> = grid.iter().map(|v| v.clone() - psi_bar.clone()).collect();
    (0..=m_max)
        .into_par_iter()
        .map(|m| {
            let k = 2 * m + 1;
            let terms: Vec<T> = centered.iter().map(|t| t.powu(k)).collect();
            let total = sum(&terms);
            let nonneg = if T::EXACT {
                total >= T::zero()
            } else {
                let scale: f64 = terms.iter().map(|t| t.as_f64().abs()).sum();
                total.as_f64() >= -FLOAT_TOL * scale.max(1.0)
            };
            DirectSum {
                m,
                value: total.num(),
                nonneg,
            }
        })
        .collect()
}

fn verify_generic<T: Scalar>(psi: &[T], variant: Variant, m_max: u32) -> Result<TheoremReport> {
    let big_n = (psi.len() - 1) as u32;
    match variant {
        Variant::A1 => {
            let build = build_theorem_a1(psi)?;
            let sums = direct_sums(psi, &build.psi_bar, m_max);
            let mut certificate = match single_crossing_check(&build.x, &build.y)? {
                Some(cert) => cert,
                None => majorizes(&build.x, &build.y)?,
            };
            certificate.hypothesis_flags = build.flags.clone();
            let direct_all_nonneg = sums.iter().all(|s| s.nonneg);
            Ok(TheoremReport {
                variant,
                n_grid: big_n,
                psi_values: nums(psi),
                psi_bar: build.psi_bar.num(),
                n: build.n,
                refusals: Vec::new(),
                routes_agree: direct_all_nonneg && certificate.majorizes,
                direct_sums: sums,
                direct_all_nonneg,
                certificate,
                w_route: None,
                theorem_applied: true,
            })
        }
        Variant::A2 => {
            let build = build_theorem_a2(psi)?;
            let full: Vec<T> = psi.iter().rev().chain(&psi[1..]).cloned().collect();
            let sums = direct_sums(&full, &build.psi_bar, m_max);
            let mut certificate = majorizes(&build.x, &build.y)?;
            let w_route = match &build.w {
                Some(w) => Some(w_route_check(build.x.entries(), w, build.y.entries())?),
                None => None,
            };
            if let (Some(w), Some(report)) = (&build.w, &w_route) {
                certificate.route = Route::ViaW;
                certificate.w = Some(nums(w));
                certificate.majorizes = certificate.majorizes && report.valid;
            }
            certificate.hypothesis_flags = build.flags.clone();
            let direct_all_nonneg = sums.iter().all(|s| s.nonneg);
            let theorem_applied = !build.refused();
            Ok(TheoremReport {
                variant,
                n_grid: big_n,
                psi_values: nums(psi),
                psi_bar: build.psi_bar.num(),
                n: build.n,
                refusals: build.refusals.clone(),
                routes_agree: direct_all_nonneg && certificate.majorizes,
                direct_sums: sums,
                direct_all_nonneg,
                certificate,
                w_route,
                theorem_applied,
            })
        }
    }
}

/// Evaluates the odd-power sums directly for m ≤ m_max and, independently,
/// the majorization certificate of the matching construction.
pub fn verify_theorem(psi: &PsiSpec, big_n: u32, m_max: u32, variant: Variant) -> Result<TheoremReport> {
    match psi.values(big_n)? {
        PsiValues::Exact(v) => verify_generic(&v, variant, m_max),
        PsiValues::Float(v) => verify_generic(&v, variant, m_max),
    }
}

/// Exact-value entry point for callers that already hold ψ(j/N).
pub fn verify_theorem_values<T: Scalar>(psi: &[T], variant: Variant, m_max: u32) -> Result<TheoremReport> {
    if psi.len() < 2 {
        return Err(invalid("psi", "need at least two grid values"));
    }
    verify_generic(psi, variant, m_max)
}

/// μ([C, ∞)) ≤ ν([C, ∞)) for every C, for atomic measures on [0, ∞) of
/// equal mass given as (position, mass) pairs. Checked at atom locations.
pub fn tail_dominance<T: Scalar>(nu_plus: &[(T, T)], mu_plus: &[(T, T)]) -> Result<bool> {
    for (t, w) in nu_plus.iter().chain(mu_plus) {
        if !t.approx_ge(&T::zero()) {
            return Err(invalid("atoms", format!("negative position {t}")));
        }
        if !w.approx_ge(&T::zero()) {
            return Err(invalid("atoms", format!("negative mass {w}")));
        }
    }
    let mass = |m: &[(T, T)]| m.iter().fold(T::zero(), |a, (_, w)| a + w.clone());
    let (mn, mm) = (mass(nu_plus), mass(mu_plus));
    if !mn.approx_eq(&mm) {
        return Err(Error::TotalsDiffer(mn.to_string(), mm.to_string()));
    }
    let tail = |m: &[(T, T)], c: &T| {
        m.iter()
            .filter(|(t, _)| t.approx_ge(c))
            .fold(T::zero(), |a, (_, w)| a + w.clone())
    };
    Ok(nu_plus
        .iter()
        .chain(mu_plus)
        .all(|(c, _)| tail(nu_plus, c).approx_ge(&tail(mu_plus, c))))
}

/// Parses a comma-separated list of exact numbers.
pub fn parse_vector(text: &str) -> Result<Vec<BigRational>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_rational)
        .collect()
}
