//! Even probability measures on ℝ.
//!
//! A measure is either *atomic* (finitely many magnitudes `t ≥ 0`, each
//! carrying weight `w`, split as `w/2` at `±t` when `t > 0`) or the
//! symbolic one-component law of a uniform unit vector in `D` dimensions,
//! whose moments are known in closed form. Atomic measures are exact
//! (rational magnitudes and weights) whenever their constructor parameters
//! are rational.

use std::fmt;
use std::str::FromStr;

use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{int, parse_rational, rational, HalfInteger, Value};
use crate::error::{invalid, Error, Result};
use crate::quadrature::adaptive_simpson;

/// Cell count used when a D-vector measure has to be made atomic implicitly
/// (for instance by [`EvenMeasure::scale`]).
pub const DEFAULT_CELLS: usize = 256;

const FLOAT_NORMALIZATION_TOL: f64 = 1e-12;

/// Arithmetic mode requested for a constructed measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Exact whenever every parameter is rational.
    #[default]
    Auto,
    /// Force double precision.
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Atoms {
    Exact(Vec<(BigRational, BigRational)>),
    Float(Vec<(f64, f64)>),
}

impl Atoms {
    pub fn len(&self) -> usize {
        match self {
            Atoms::Exact(a) => a.len(),
            Atoms::Float(a) => a.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// (magnitude, weight) pairs as doubles.
    pub fn to_f64(&self) -> Vec<(f64, f64)> {
        match self {
            Atoms::Exact(a) => a
                .iter()
                .map(|(t, w)| (Value::Exact(t.clone()).to_f64(), Value::Exact(w.clone()).to_f64()))
                .collect(),
            Atoms::Float(a) => a.clone(),
        }
    }

    /// (magnitude, weight) pairs as [`Value`]s.
    pub fn values(&self) -> Vec<(Value, Value)> {
        match self {
            Atoms::Exact(a) => a
                .iter()
                .map(|(t, w)| (Value::Exact(t.clone()), Value::Exact(w.clone())))
                .collect(),
            Atoms::Float(a) => a
                .iter()
                .map(|&(t, w)| (Value::Float(t), Value::Float(w)))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Atomic(Atoms),
    DVector(u32),
}

/// The kind of an [`EvenMeasure`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MeasureKind {
    Atomic,
    DVector,
}

/// An even probability measure. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenMeasure {
    label: String,
    repr: Repr,
}

impl EvenMeasure {
    /// Builds an exact atomic measure from (magnitude, weight) pairs.
    /// Magnitudes are sorted and equal magnitudes merged.
    pub fn atomic_exact(label: impl Into<String>, atoms: Vec<(BigRational, BigRational)>) -> Result<Self> {
        let mut atoms: Vec<_> = atoms;
        for (t, w) in &atoms {
            if t.is_negative() {
                return Err(invalid("atoms", format!("negative magnitude {t}")));
            }
            if !w.is_positive() {
                return Err(invalid("atoms", format!("non-positive weight {w}")));
            }
        }
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(BigRational, BigRational)> = Vec::with_capacity(atoms.len());
        for (t, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == t => last.1 += w,
                _ => merged.push((t, w)),
            }
        }
        if merged.is_empty() {
            return Err(invalid("atoms", "empty atom list"));
        }
        let total: BigRational = merged.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(total.to_string()));
        }
        Ok(EvenMeasure {
            label: label.into(),
            repr: Repr::Atomic(Atoms::Exact(merged)),
        })
    }

    /// Builds a double-precision atomic measure; weights must sum to 1
    /// within 1e-12.
    pub fn atomic_float(label: impl Into<String>, atoms: Vec<(f64, f64)>) -> Result<Self> {
        let mut atoms = atoms;
        for &(t, w) in &atoms {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(invalid("atoms", format!("bad magnitude {t}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid("atoms", format!("non-positive weight {w}")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (t, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == t => last.1 += w,
                _ => merged.push((t, w)),
            }
        }
        if merged.is_empty() {
            return Err(invalid("atoms", "empty atom list"));
        }
        let total: f64 = merged.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > FLOAT_NORMALIZATION_TOL {
            return Err(Error::NotNormalized(total.to_string()));
        }
        Ok(EvenMeasure {
            label: label.into(),
            repr: Repr::Atomic(Atoms::Float(merged)),
        })
    }

    /// The law of one coordinate of a uniform point on the unit sphere in
    /// `dim` dimensions, density ∝ (1−x²)^((D−3)/2) on [−1, 1].
    pub fn dvector(dim: u32) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("D", format!("dimension {dim} < 2")));
        }
        Ok(EvenMeasure {
            label: format!("dvector({dim})"),
            repr: Repr::DVector(dim),
        })
    }

    /// Mass 1/2 at ±T.
    pub fn bernoulli(t: &Value) -> Result<Self> {
        if t.sign() != std::cmp::Ordering::Greater {
            return Err(invalid("T", format!("{t} is not positive")));
        }
        let label = format!("bernoulli({t})");
        match t {
            Value::Exact(q) => Self::atomic_exact(label, vec![(q.clone(), BigRational::one())]),
            Value::Float(x) => Self::atomic_float(label, vec![(*x, 1.0)]),
        }
    }

    /// λ/2 at ±1 and 1−λ at 0.
    pub fn three_point(lambda: &BigRational) -> Result<Self> {
        if lambda.is_negative() || lambda > &BigRational::one() {
            return Err(invalid("lambda", format!("{lambda} outside [0, 1]")));
        }
        let mut atoms = Vec::new();
        let rest = BigRational::one() - lambda;
        if rest.is_positive() {
            atoms.push((BigRational::zero(), rest));
        }
        if lambda.is_positive() {
            atoms.push((BigRational::one(), lambda.clone()));
        }
        Self::atomic_exact(format!("three_point({lambda})"), atoms)
    }

    /// Spin S: 2S+1 equally weighted, equally spaced points, on [−1, 1]
    /// when `normalized`, on {−S, …, S} otherwise.
    pub fn spin(s: HalfInteger, normalized: bool) -> Result<Self> {
        let twice = s.twice() as i64;
        let points = twice + 1;
        let mut atoms = Vec::new();
        // Points are k/2 for k ≡ 2S (mod 2), |k| ≤ 2S.
        let mut k = twice % 2;
        while k <= twice {
            let magnitude = if normalized {
                rational(k, twice)
            } else {
                rational(k, 2)
            };
            let weight = if k == 0 {
                rational(1, points)
            } else {
                rational(2, points)
            };
            atoms.push((magnitude, weight));
            k += 2;
        }
        let label = if normalized {
            format!("spin({s})")
        } else {
            format!("spin_raw({s})")
        };
        Self::atomic_exact(label, atoms)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> MeasureKind {
        match self.repr {
            Repr::Atomic(_) => MeasureKind::Atomic,
            Repr::DVector(_) => MeasureKind::DVector,
        }
    }

    /// True for exact-atomic and D-vector measures (whose moments are exact).
    pub fn is_exact(&self) -> bool {
        !matches!(self.repr, Repr::Atomic(Atoms::Float(_)))
    }

    pub fn dimension(&self) -> Option<u32> {
        match self.repr {
            Repr::DVector(d) => Some(d),
            Repr::Atomic(_) => None,
        }
    }

    pub fn atoms(&self) -> Option<&Atoms> {
        match &self.repr {
            Repr::Atomic(a) => Some(a),
            Repr::DVector(_) => None,
        }
    }

    /// Signed support points with their probabilities, for enumeration.
    pub fn expanded_atoms_f64(&self) -> Option<Vec<(f64, f64)>> {
        let atoms = self.atoms()?.to_f64();
        let mut out = Vec::with_capacity(2 * atoms.len());
        for (t, w) in atoms {
            if t == 0.0 {
                out.push((0.0, w));
            } else {
                out.push((-t, 0.5 * w));
                out.push((t, 0.5 * w));
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        Some(out)
    }

    /// Signed support points with exact probabilities (exact atomic only).
    pub fn expanded_atoms_exact(&self) -> Option<Vec<(BigRational, BigRational)>> {
        let Some(Atoms::Exact(atoms)) = self.atoms() else {
            return None;
        };
        let half = rational(1, 2);
        let mut out = Vec::with_capacity(2 * atoms.len());
        for (t, w) in atoms {
            if t.is_zero() {
                out.push((t.clone(), w.clone()));
            } else {
                out.push((-t.clone(), w * &half));
                out.push((t.clone(), w * &half));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Some(out)
    }

    pub fn is_point_mass_at_zero(&self) -> bool {
        match &self.repr {
            Repr::Atomic(Atoms::Exact(a)) => a.len() == 1 && a[0].0.is_zero(),
            Repr::Atomic(Atoms::Float(a)) => a.len() == 1 && a[0].0 == 0.0,
            Repr::DVector(_) => false,
        }
    }

    /// ∫ x^k dμ.
    pub fn moment(&self, k: u32) -> Value {
        if k % 2 == 1 {
            return Value::zero(self.is_exact());
        }
        match &self.repr {
            Repr::Atomic(Atoms::Exact(a)) => Value::Exact(
                a.iter()
                    .map(|(t, w)| w * num::traits::Pow::pow(t, k))
                    .sum(),
            ),
            Repr::Atomic(Atoms::Float(a)) => {
                Value::Float(a.iter().map(|(t, w)| w * t.powi(k as i32)).sum())
            }
            Repr::DVector(d) => Value::Exact(dvector_even_moment(*d, k / 2)),
        }
    }

    /// Moments 0..=k_max in one pass.
    pub fn moments(&self, k_max: u32) -> Vec<Value> {
        match &self.repr {
            Repr::Atomic(Atoms::Exact(a)) => {
                let mut powers: Vec<BigRational> = a.iter().map(|(_, w)| w.clone()).collect();
                let mut out = Vec::with_capacity(k_max as usize + 1);
                for k in 0..=k_max {
                    if k % 2 == 1 {
                        out.push(Value::Exact(BigRational::zero()));
                    } else {
                        out.push(Value::Exact(powers.iter().cloned().sum()));
                    }
                    for (p, (t, _)) in powers.iter_mut().zip(a) {
                        *p *= t;
                    }
                }
                out
            }
            Repr::Atomic(Atoms::Float(a)) => {
                let mut powers: Vec<f64> = a.iter().map(|&(_, w)| w).collect();
                let mut out = Vec::with_capacity(k_max as usize + 1);
                for k in 0..=k_max {
                    if k % 2 == 1 {
                        out.push(Value::Float(0.0));
                    } else {
                        out.push(Value::Float(powers.iter().sum()));
                    }
                    for (p, &(t, _)) in powers.iter_mut().zip(a) {
                        *p *= t;
                    }
                }
                out
            }
            Repr::DVector(d) => {
                let mut out = Vec::with_capacity(k_max as usize + 1);
                let mut even = BigRational::one();
                for k in 0..=k_max {
                    if k % 2 == 1 {
                        out.push(Value::Exact(BigRational::zero()));
                    } else {
                        if k > 0 {
                            let i = (k / 2) as i64;
                            even *= rational(2 * i - 1, *d as i64 + 2 * i - 2);
                        }
                        out.push(Value::Exact(even.clone()));
                    }
                }
                out
            }
        }
    }

    /// The scaled measure μ^(s)[A] = μ[A/s]. D-vector inputs are first
    /// discretized with [`DEFAULT_CELLS`] cells.
    pub fn scale(&self, s: &Value) -> Result<Self> {
        if s.sign() != std::cmp::Ordering::Greater {
            return Err(invalid("s", format!("scale {s} is not positive")));
        }
        let label = format!("scaled({s}, {})", self.label);
        match &self.repr {
            Repr::DVector(_) => self.discretize(DEFAULT_CELLS)?.scale(s).map(|m| m.with_label(label)),
            Repr::Atomic(Atoms::Exact(a)) => match s {
                Value::Exact(q) => Self::atomic_exact(
                    label,
                    a.iter().map(|(t, w)| (t * q, w.clone())).collect(),
                ),
                Value::Float(x) => Self::atomic_float(
                    label,
                    Atoms::Exact(a.clone())
                        .to_f64()
                        .into_iter()
                        .map(|(t, w)| (t * x, w))
                        .collect(),
                ),
            },
            Repr::Atomic(Atoms::Float(a)) => {
                let x = s.to_f64();
                Self::atomic_float(label, a.iter().map(|&(t, w)| (t * x, w)).collect())
            }
        }
    }

    /// Replaces a D-vector measure by a symmetric atomic measure with
    /// `cells` atoms; atomic inputs are returned unchanged.
    ///
    /// The magnitude half-line [0, 1] is cut into equal-width cells. Each
    /// cell carries the two-node Gauss rule of the density restricted to it
    /// (one node at the probability-weighted centroid for the cell next to 0
    /// when `cells/2` is odd). Cell moments come from adaptive quadrature
    /// after the substitution x = sin θ, which removes the endpoint
    /// singularity at D = 2. Weights are positive by construction.
    pub fn discretize(&self, cells: usize) -> Result<Self> {
        if cells < 2 || cells % 2 == 1 {
            return Err(invalid("cells", format!("{cells} is not a positive even integer")));
        }
        let d = match self.repr {
            Repr::Atomic(_) => return Ok(self.clone()),
            Repr::DVector(d) => d,
        };
        let half = cells / 2;
        let single_first = half % 2 == 1;
        let ncells = half.div_ceil(2);
        let power = (d - 2) as i32;
        let density = move |theta: f64| theta.cos().powi(power);
        let total = adaptive_simpson(density, 0.0, std::f64::consts::FRAC_PI_2, 1e-15);

        let mut atoms = Vec::with_capacity(half);
        for i in 0..ncells {
            let a = i as f64 / ncells as f64;
            let b = (i + 1) as f64 / ncells as f64;
            let (ta, tb) = (a.asin(), b.asin());
            let tol = 1e-16;
            let m0 = adaptive_simpson(density, ta, tb, tol) / total;
            let m1 = adaptive_simpson(|th| th.sin() * density(th), ta, tb, tol) / total;
            let centroid = m1 / m0;
            if i == 0 && single_first {
                atoms.push((centroid, m0));
                continue;
            }
            let nu2 = adaptive_simpson(|th| (th.sin() - centroid).powi(2) * density(th), ta, tb, tol) / total;
            let nu3 = adaptive_simpson(|th| (th.sin() - centroid).powi(3) * density(th), ta, tb, tol) / total;
            let var = nu2 / m0;
            let skew = nu3 / nu2;
            let disc = (skew * skew + 4.0 * var).sqrt();
            let t1 = 0.5 * (skew - disc);
            let t2 = 0.5 * (skew + disc);
            let w1 = m0 * t2 / (t2 - t1);
            let w2 = -m0 * t1 / (t2 - t1);
            atoms.push((centroid + t1, w1));
            atoms.push((centroid + t2, w2));
        }
        let sum: f64 = atoms.iter().map(|a| a.1).sum();
        for a in &mut atoms {
            a.1 /= sum;
        }
        Self::atomic_float(format!("discretize({}, {cells})", self.label), atoms)
    }

    /// Largest support magnitude (1 for D-vector measures).
    pub fn support_sup(&self) -> Value {
        match &self.repr {
            Repr::Atomic(Atoms::Exact(a)) => Value::Exact(a.last().map(|x| x.0.clone()).unwrap_or_default()),
            Repr::Atomic(Atoms::Float(a)) => Value::Float(a.last().map(|x| x.0).unwrap_or(0.0)),
            Repr::DVector(_) => Value::Exact(BigRational::one()),
        }
    }

    /// Converts an exact atomic measure to float mode; others unchanged.
    pub fn to_float(&self) -> Self {
        match &self.repr {
            Repr::Atomic(a @ Atoms::Exact(_)) => EvenMeasure {
                label: self.label.clone(),
                repr: Repr::Atomic(Atoms::Float(a.to_f64())),
            },
            _ => self.clone(),
        }
    }
}

impl fmt::Display for EvenMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// m_{2i} = ∏_{j=1..i} (2j−1)/(D+2j−2).
pub fn dvector_even_moment(d: u32, i: u32) -> BigRational {
    (1..=i as i64).fold(BigRational::one(), |acc, j| {
        acc * rational(2 * j - 1, d as i64 + 2 * j - 2)
    })
}

/// A rational-or-float constructor parameter. Text and JSON numbers are
/// read as exact decimals.
#[derive(Clone, Debug, PartialEq)]
pub struct Param(pub Value);

impl Param {
    pub fn exact(q: BigRational) -> Self {
        Param(Value::Exact(q))
    }

    fn require_exact(&self, name: &'static str) -> Result<&BigRational> {
        self.0
            .as_exact()
            .ok_or_else(|| invalid(name, "must be rational"))
    }
}

impl FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Param::exact)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Number(f64),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Text(s) => s,
            Raw::Int(i) => i.to_string(),
            Raw::Number(x) => format!("{x}"),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// One atom of an `atoms` spec: `[t, w]` or `{"t": .., "w": ..}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AtomSpec {
    Pair(Param, Param),
    Named { t: Param, w: Param },
}

impl AtomSpec {
    fn parts(&self) -> (&Param, &Param) {
        match self {
            AtomSpec::Pair(t, w) | AtomSpec::Named { t, w } => (t, w),
        }
    }
}

fn default_true() -> bool {
    true
}

/// Declarative description of a measure, as read from spec files (JSON) or
/// inline CLI arguments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasureSpec {
    Bernoulli {
        #[serde(rename = "T")]
        t: Param,
    },
    ThreePoint {
        lambda: Param,
    },
    Spin {
        #[serde(rename = "S")]
        s: Param,
        #[serde(default = "default_true")]
        normalized: bool,
    },
    Dvector {
        #[serde(rename = "D")]
        d: u32,
    },
    Atoms {
        atoms: Vec<AtomSpec>,
    },
    Scaled {
        s: Param,
        base: Box<MeasureSpec>,
    },
    Discretized {
        cells: usize,
        base: Box<MeasureSpec>,
    },
}

impl MeasureSpec {
    /// Parses an inline spec such as `spin:3/2`, `three_point:2/3`,
    /// `bernoulli:0.5`, `dvector:4`, `atoms:0@1/3,1@2/3`,
    /// `scaled:1/2:bernoulli:1`, `discretized:16:dvector:3`, or a JSON
    /// document starting with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            return serde_json::from_str(text).map_err(|e| Error::MeasureSpec(e.to_string()));
        }
        let bad = |why: &str| Error::MeasureSpec(format!("`{text}`: {why}"));
        let (head, rest) = text.split_once(':').ok_or_else(|| bad("expected kind:params"))?;
        let spec = match head {
            "bernoulli" => MeasureSpec::Bernoulli { t: rest.parse()? },
            "three_point" => MeasureSpec::ThreePoint { lambda: rest.parse()? },
            "spin" | "spin_raw" => {
                let (s, raw) = match rest.split_once(':') {
                    Some((s, "raw")) => (s, true),
                    Some(_) => return Err(bad("spin takes S[:raw]")),
                    None => (rest, head == "spin_raw"),
                };
                MeasureSpec::Spin {
                    s: s.parse()?,
                    normalized: !raw,
                }
            }
            "dvector" => MeasureSpec::Dvector {
                d: rest.trim().parse().map_err(|_| bad("D must be an integer"))?,
            },
            "atoms" => {
                let atoms = rest
                    .split(',')
                    .map(|item| {
                        let (t, w) = item.split_once('@').ok_or_else(|| bad("atoms are t@w"))?;
                        Ok(AtomSpec::Pair(t.parse()?, w.parse()?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                MeasureSpec::Atoms { atoms }
            }
            "scaled" => {
                let (s, base) = rest.split_once(':').ok_or_else(|| bad("scaled:s:<spec>"))?;
                MeasureSpec::Scaled {
                    s: s.parse()?,
                    base: Box::new(Self::parse(base)?),
                }
            }
            "discretized" => {
                let (c, base) = rest.split_once(':').ok_or_else(|| bad("discretized:cells:<spec>"))?;
                MeasureSpec::Discretized {
                    cells: c.trim().parse().map_err(|_| bad("cells must be an integer"))?,
                    base: Box::new(Self::parse(base)?),
                }
            }
            _ => return Err(bad("unknown measure kind")),
        };
        Ok(spec)
    }
}

impl FromStr for MeasureSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Builds the measure described by `spec`.
pub fn make_measure(spec: &MeasureSpec) -> Result<EvenMeasure> {
    make_measure_with(spec, Mode::Auto)
}

/// Builds the measure described by `spec` in the requested arithmetic mode.
pub fn make_measure_with(spec: &MeasureSpec, mode: Mode) -> Result<EvenMeasure> {
    let measure = match spec {
        MeasureSpec::Bernoulli { t } => EvenMeasure::bernoulli(&t.0)?,
        MeasureSpec::ThreePoint { lambda } => EvenMeasure::three_point(lambda.require_exact("lambda")?)?,
        MeasureSpec::Spin { s, normalized } => {
            let s = HalfInteger::from_rational(s.require_exact("S")?)?;
            EvenMeasure::spin(s, *normalized)?
        }
        MeasureSpec::Dvector { d } => EvenMeasure::dvector(*d)?,
        MeasureSpec::Atoms { atoms } => {
            let label = "atoms";
            let all_exact = atoms.iter().all(|a| {
                let (t, w) = a.parts();
                t.0.is_exact() && w.0.is_exact()
            });
            if all_exact {
                let list = atoms
                    .iter()
                    .map(|a| {
                        let (t, w) = a.parts();
                        (t.0.as_exact().unwrap().clone(), w.0.as_exact().unwrap().clone())
                    })
                    .collect();
                EvenMeasure::atomic_exact(label, list)?
            } else {
                let list = atoms
                    .iter()
                    .map(|a| {
                        let (t, w) = a.parts();
                        (t.0.to_f64(), w.0.to_f64())
                    })
                    .collect();
                EvenMeasure::atomic_float(label, list)?
            }
        }
        MeasureSpec::Scaled { s, base } => make_measure_with(base, mode)?.scale(&s.0)?,
        MeasureSpec::Discretized { cells, base } => make_measure_with(base, mode)?.discretize(*cells)?,
    };
    Ok(match mode {
        Mode::Auto => measure,
        Mode::Float => measure.to_float(),
    })
}

/// `(S+1)/(3S)` — convenience for tests and reports.
pub fn normalized_spin_second_moment(s: HalfInteger) -> BigRational {
    let s = s.to_rational();
    (&s + int(1)) / (int(3) * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> EvenMeasure {
        make_measure(&MeasureSpec::parse(s).unwrap()).unwrap()
    }

    fn q(n: i64, d: i64) -> Value {
        Value::Exact(rational(n, d))
    }

    #[test]
    fn bernoulli_one_is_unit_mass_at_plus_minus_one() {
        let m = spec("bernoulli:1");
        assert_eq!(
            m.atoms().unwrap(),
            &Atoms::Exact(vec![(int(1), int(1))])
        );
    }

    #[test]
    fn three_point_two_thirds_has_equal_weights() {
        let m = spec("three_point:2/3");
        assert_eq!(
            m.atoms().unwrap(),
            &Atoms::Exact(vec![(int(0), rational(1, 3)), (int(1), rational(2, 3))])
        );
        let s1 = spec("spin:1");
        assert_eq!(m.atoms(), s1.atoms());
    }

    #[test]
    fn dvector_moments() {
        let m = spec("dvector:3");
        assert_eq!(m.moment(2), q(1, 3));
        assert_eq!(m.moment(4), q(1, 5));
        assert_eq!(m.moment(0), q(1, 1));
        assert_eq!(m.moments(6)[6], q(1, 7));
    }

    #[test]
    fn odd_moments_vanish() {
        assert!(spec("bernoulli:1").moment(7).is_zero());
        assert!(spec("dvector:4").moment(3).is_zero());
    }

    #[test]
    fn scaling() {
        let b = spec("bernoulli:1");
        let bt = b.scale(&q(3, 7)).unwrap();
        assert_eq!(bt.atoms(), spec("bernoulli:3/7").atoms());
        let m = spec("three_point:1/2").scale(&q(2, 1)).unwrap();
        assert_eq!(m.moment(2), q(2, 1));
        assert!(b.scale(&q(0, 1)).is_err());
        assert!(b.scale(&Value::Float(-1.0)).is_err());
    }

    #[test]
    fn discretize_passthrough_and_errors() {
        let b = spec("bernoulli:1");
        assert_eq!(b.discretize(8).unwrap(), b);
        assert!(b.discretize(7).is_err());
        assert!(b.discretize(0).is_err());
    }

    #[test]
    fn discretize_matches_low_moments() {
        let m = spec("dvector:3").discretize(64).unwrap();
        assert!((m.moment(2).to_f64() - 1.0 / 3.0).abs() < 1e-6);
        assert_eq!(m.atoms().unwrap().len(), 32);
        let m = spec("dvector:5").discretize(64).unwrap();
        assert!((m.moment(4).to_f64() - 3.0 / 35.0).abs() < 1e-6);
        // odd half count: one centroid cell plus two-node cells; only the
        // centroid cell loses its within-cell variance
        let m = spec("dvector:2").discretize(6).unwrap();
        assert_eq!(m.atoms().unwrap().len(), 3);
        let err = 0.5 - m.moment(2).to_f64();
        assert!(err > 0.0 && err < 0.02, "{err}");
    }

    #[test]
    fn support_sup() {
        assert_eq!(spec("three_point:0.4").support_sup(), q(1, 1));
        assert_eq!(spec("scaled:0.5:bernoulli:1").support_sup(), q(1, 2));
        assert_eq!(spec("dvector:7").support_sup(), q(1, 1));
    }

    #[test]
    fn constructor_errors() {
        assert!(MeasureSpec::parse("three_point:3/2").and_then(|s| make_measure(&s)).is_err());
        assert!(MeasureSpec::parse("spin:1/3").and_then(|s| make_measure(&s)).is_err());
        assert!(MeasureSpec::parse("dvector:1").and_then(|s| make_measure(&s)).is_err());
        assert!(MeasureSpec::parse("atoms:1@1/2").and_then(|s| make_measure(&s)).is_err());
        assert!(MeasureSpec::parse("nope:1").is_err());
    }

    #[test]
    fn json_specs() {
        let s: MeasureSpec = serde_json::from_str(r#"{"type":"spin","S":"3/2","normalized":true}"#).unwrap();
        let m = make_measure(&s).unwrap();
        assert_eq!(m.moment(2), q(5, 9));
        let s: MeasureSpec = serde_json::from_str(r#"{"type":"three_point","lambda":0.3}"#).unwrap();
        assert_eq!(make_measure(&s).unwrap().moment(2), q(3, 10));
        let s: MeasureSpec =
            serde_json::from_str(r#"{"type":"atoms","atoms":[["0","1/4"],{"t":"2","w":"3/4"}]}"#).unwrap();
        assert_eq!(make_measure(&s).unwrap().moment(2), q(3, 1));
    }

    #[test]
    fn float_mode() {
        let s = MeasureSpec::parse("spin:3/2").unwrap();
        let m = make_measure_with(&s, Mode::Float).unwrap();
        assert!(!m.is_exact());
        assert!((m.moment(2).to_f64() - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn spin_second_moment_direct_sum() {
        for twice in 1..=20 {
            let s = HalfInteger::from_twice(twice).unwrap();
            let m = EvenMeasure::spin(s, true).unwrap();
            assert_eq!(m.moment(2), Value::Exact(normalized_spin_second_moment(s)));
        }
    }
}
