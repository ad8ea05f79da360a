//! Exact enumeration of small generalized Ising systems.
//!
//! A system is a finite set of sites, a single-site even measure and a
//! ferromagnetic interaction −H = Σ J(A)/T · σ^A. Expectations are computed
//! by summing over every configuration of the expanded (signed) atoms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::rational::BigRational;
use num::traits::{Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{Num, Value};
use crate::error::{Error, Result};
use crate::measures::EvenMeasure;

/// Largest configuration count that will be enumerated.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Cells used when a D-vector measure is placed on the sites.
pub const DVECTOR_CELLS: usize = 16;

const CHUNK: usize = 4096;

/// A multiindex: site → positive exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(pub BTreeMap<usize, u32>);

impl Monomial {
    pub fn new(exps: impl IntoIterator<Item = (usize, u32)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (site, e) in exps {
            if e == 0 {
                return Err(Error::Monomial(format!("site {site} has exponent 0")));
            }
            *map.entry(site).or_insert(0) += e;
        }
        Ok(Monomial(map))
    }

    pub fn site(i: usize) -> Self {
        Monomial(BTreeMap::from([(i, 1)]))
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    /// σ^A σ^B.
    pub fn product(&self, other: &Monomial) -> Monomial {
        let mut map = self.0.clone();
        for (&s, &e) in &other.0 {
            *map.entry(s).or_insert(0) += e;
        }
        Monomial(map)
    }

    fn check_sites(&self, sites: usize) -> Result<()> {
        match self.0.keys().find(|&&s| s >= sites) {
            Some(s) => Err(Error::Monomial(format!("site {s} out of range for {sites} sites"))),
            None => Ok(()),
        }
    }

    /// Parses `"0:1,1:1"`; an empty string is the constant monomial.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (s, e) = item
                .split_once(':')
                .ok_or_else(|| Error::Monomial(format!("'{item}' is not site:exponent")))?;
            let site = s.trim().parse().map_err(|_| Error::Monomial(format!("bad site '{s}'")))?;
            let exp = e.trim().parse().map_err(|_| Error::Monomial(format!("bad exponent '{e}'")))?;
            pairs.push((site, exp));
        }
        Self::new(pairs)
    }
}

impl FromStr for Monomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(s, e)| format!("{s}:{e}")).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exps: Monomial,
    #[serde(rename = "J")]
    pub j: f64,
}

fn default_temperature() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub sites: usize,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default)]
    pub terms: Vec<Term>,
}

impl Interaction {
    pub fn new(sites: usize, temperature: f64, terms: Vec<Term>) -> Result<Self> {
        let out = Interaction { sites, temperature, terms };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 {
            return Err(Error::Interaction("no sites".into()));
        }
        if !(self.temperature > 0.0) || !self.temperature.is_finite() {
            return Err(Error::Interaction(format!("temperature {} is not positive", self.temperature)));
        }
        for t in &self.terms {
            if !(t.j >= 0.0) || !t.j.is_finite() {
                return Err(Error::Interaction(format!("coupling {} on {} is not ferromagnetic", t.j, t.exps)));
            }
            if t.exps.0.is_empty() {
                return Err(Error::Interaction("term with empty multiindex".into()));
            }
            if t.exps.0.values().any(|&e| e == 0) {
                return Err(Error::Interaction(format!("zero exponent in {}", t.exps)));
            }
            t.exps.check_sites(self.sites).map_err(|e| Error::Interaction(e.to_string()))?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let out: Interaction =
            serde_json::from_str(text).map_err(|e| Error::Interaction(e.to_string()))?;
        out.validate()?;
        Ok(out)
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(self.sites, temperature, self.terms.clone())
    }

    /// Relabels sites by `perm[old] = new`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(Term {
                    exps: Monomial::new(t.exps.0.iter().map(|(&s, &e)| (perm[s], e)))?,
                    j: t.j,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.sites, self.temperature, terms)
    }

    pub fn pair_only(&self) -> bool {
        self.terms.iter().all(|t| t.exps.degree() == 2)
    }
}

#[derive(Clone, Debug)]
pub struct GibbsSystem {
    pub interaction: Interaction,
    pub measure_label: String,
    /// Set when a D-vector measure was discretized for enumeration.
    pub discretized_cells: Option<usize>,
    atoms: Vec<(f64, f64)>,
}

impl GibbsSystem {
    pub fn new(interaction: Interaction, measure: &EvenMeasure) -> Result<Self> {
        interaction.validate()?;
        let (measure, discretized_cells) = match measure.dimension() {
            Some(_) => (measure.discretize(DVECTOR_CELLS)?, Some(DVECTOR_CELLS)),
            None => (measure.clone(), None),
        };
        let atoms = measure.expanded_atoms_f64().expect("atomic measure");
        let configs = (atoms.len() as u128).checked_pow(interaction.sites as u32);
        match configs {
            Some(c) if c <= ENUMERATION_LIMIT => {}
            _ => {
                return Err(Error::EnumerationGuard {
                    configs: configs.unwrap_or(u128::MAX),
                    limit: ENUMERATION_LIMIT,
                })
            }
        }
        Ok(GibbsSystem {
            interaction,
            measure_label: measure.label().to_string(),
            discretized_cells,
            atoms,
        })
    }

    pub fn configurations(&self) -> usize {
        self.atoms.len().pow(self.interaction.sites as u32)
    }

    /// Upper bound on −H over all configurations, used as the log shift.
    fn shift(&self) -> f64 {
        let top = self.atoms.iter().fold(0.0f64, |a, (t, _)| a.max(t.abs()));
        self.interaction
            .terms
            .iter()
            .map(|t| t.j / self.interaction.temperature * top.powi(t.exps.degree() as i32))
            .sum()
    }

    /// Returns (Σ w·e^{−H−shift}, [Σ w·e^{−H−shift}·σ^A for each A], shift).
    fn pass(&self, observables: &[Monomial]) -> Result<(f64, Vec<f64>, f64)> {
        for m in observables {
            m.check_sites(self.interaction.sites)?;
        }
        let k = self.atoms.len();
        let l = self.interaction.sites;
        let total = self.configurations();
        let shift = self.shift();
        let beta = 1.0 / self.interaction.temperature;
        let terms: Vec<(f64, Vec<(usize, i32)>)> = self
            .interaction
            .terms
            .iter()
            .map(|t| (t.j * beta, t.exps.0.iter().map(|(&s, &e)| (s, e as i32)).collect()))
            .collect();
        let obs: Vec<Vec<(usize, i32)>> = observables
            .iter()
            .map(|m| m.0.iter().map(|(&s, &e)| (s, e as i32)).collect())
            .collect();
        let log_p: Vec<f64> = self.atoms.iter().map(|(_, p)| p.ln()).collect();
        let eval = |sigma: &[f64], mono: &[(usize, i32)]| -> f64 {
            mono.iter().map(|&(s, e)| sigma[s].powi(e)).product()
        };

        let chunks: Vec<(f64, Vec<f64>)> = (0..total.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut z = 0.0;
                let mut acc = vec![0.0; obs.len()];
                let mut sigma = vec![0.0; l];
                let mut idx = vec![0usize; l];
                let start = c * CHUNK;
                let end = (start + CHUNK).min(total);
                let mut rest = start;
                for slot in idx.iter_mut() {
                    *slot = rest % k;
                    rest /= k;
                }
                for _ in start..end {
                    let mut lw = -shift;
                    for (s, &i) in idx.iter().enumerate() {
                        sigma[s] = self.atoms[i].0;
                        lw += log_p[i];
                    }
                    for (j, mono) in &terms {
                        lw += j * eval(&sigma, mono);
                    }
                    let w = lw.exp();
                    z += w;
                    for (a, mono) in acc.iter_mut().zip(&obs) {
                        *a += w * eval(&sigma, mono);
                    }
                    for slot in idx.iter_mut() {
                        *slot += 1;
                        if *slot < k {
                            break;
                        }
                        *slot = 0;
                    }
                }
                (z, acc)
            })
            .collect();

        let mut z = 0.0;
        let mut acc = vec![0.0; obs.len()];
        for (cz, ca) in chunks {
            z += cz;
            for (a, b) in acc.iter_mut().zip(ca) {
                *a += b;
            }
        }
        if !z.is_finite() || z <= 0.0 || acc.iter().any(|a| !a.is_finite()) {
            return Err(Error::Overflow);
        }
        Ok((z, acc, shift))
    }

    pub fn log_partition_function(&self) -> Result<f64> {
        let (z, _, shift) = self.pass(&[])?;
        Ok(z.ln() + shift)
    }

    /// Z = ⟨e^{−H}⟩ under the product measure.
    pub fn partition_function(&self) -> Result<f64> {
        let z = self.log_partition_function()?.exp();
        if !z.is_finite() {
            return Err(Error::Overflow);
        }
        Ok(z)
    }

    pub fn expectation(&self, a: &Monomial) -> Result<f64> {
        Ok(self.expectations(std::slice::from_ref(a))?[0])
    }

    /// ⟨σ^A⟩ for every A, from a single enumeration.
    pub fn expectations(&self, monomials: &[Monomial]) -> Result<Vec<f64>> {
        let (z, acc, _) = self.pass(monomials)?;
        Ok(acc.into_iter().map(|a| a / z).collect())
    }
}

/// Absolute tolerance with a floor of 1 on the magnitude scale.
fn within(value: f64, scale: f64, tol: f64) -> bool {
    value >= -tol * scale.abs().max(1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct MonomialValue {
    pub monomial: String,
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub value: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CovarianceValue {
    pub a: String,
    pub b: String,
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub covariance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GksReport {
    pub expectations: Vec<MonomialValue>,
    pub covariances: Vec<CovarianceValue>,
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub worst: f64,
    pub pass: bool,
}

/// ⟨σ^A⟩ ≥ 0 for each monomial and ⟨σ^Aσ^B⟩ ≥ ⟨σ^A⟩⟨σ^B⟩ for each pair.
pub fn gks_check(
    system: &GibbsSystem,
    monomials: &[Monomial],
    pairs: &[(Monomial, Monomial)],
    tol: f64,
) -> Result<GksReport> {
    let mut all: Vec<Monomial> = monomials.to_vec();
    for (a, b) in pairs {
        all.push(a.clone());
        all.push(b.clone());
        all.push(a.product(b));
    }
    all.sort();
    all.dedup();
    let values = system.expectations(&all)?;
    let lookup: BTreeMap<&Monomial, f64> = all.iter().zip(values).collect();

    let expectations: Vec<MonomialValue> = monomials
        .iter()
        .map(|m| {
            let v = lookup[m];
            MonomialValue {
                monomial: m.to_string(),
                value: v,
                pass: within(v, 1.0, tol),
            }
        })
        .collect();
    let covariances: Vec<CovarianceValue> = pairs
        .iter()
        .map(|(a, b)| {
            let ab = lookup[&a.product(b)];
            let cov = ab - lookup[a] * lookup[b];
            CovarianceValue {
                a: a.to_string(),
                b: b.to_string(),
                covariance: cov,
                pass: within(cov, ab, tol),
            }
        })
        .collect();
    let worst = expectations
        .iter()
        .map(|e| e.value)
        .chain(covariances.iter().map(|c| c.covariance))
        .fold(f64::INFINITY, f64::min);
    Ok(GksReport {
        pass: expectations.iter().all(|e| e.pass) && covariances.iter().all(|c| c.pass),
        expectations,
        covariances,
        worst,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DominationEntry {
    pub monomial: String,
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub lower: f64,
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub upper: f64,
    /// upper − lower.
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub slack: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DominationReport {
    pub lower: String,
    pub upper: String,
    pub entries: Vec<DominationEntry>,
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub worst_slack: f64,
    pub pass: bool,
}

/// ⟨σ^A⟩ under `lower` ≤ ⟨σ^A⟩ under `upper`, same interaction.
pub fn domination_check(
    lower: &EvenMeasure,
    upper: &EvenMeasure,
    interaction: &Interaction,
    monomials: &[Monomial],
    tol: f64,
) -> Result<DominationReport> {
    let lo = GibbsSystem::new(interaction.clone(), lower)?.expectations(monomials)?;
    let hi = GibbsSystem::new(interaction.clone(), upper)?.expectations(monomials)?;
    let entries: Vec<DominationEntry> = monomials
        .iter()
        .zip(lo.iter().zip(&hi))
        .map(|(m, (&l, &u))| DominationEntry {
            monomial: m.to_string(),
            lower: l,
            upper: u,
            slack: u - l,
        })
        .collect();
    let worst_slack = entries.iter().map(|e| e.slack).fold(f64::INFINITY, f64::min);
    Ok(DominationReport {
        lower: lower.label().to_string(),
        upper: upper.label().to_string(),
        pass: entries.iter().all(|e| within(e.slack, e.upper, tol)),
        entries,
        worst_slack,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct G2Entry {
    pub k: u32,
    pub m: u32,
    pub value: Num,
    /// "zero" or "nonneg".
    pub expected: &'static str,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct G2Report {
    pub measure: String,
    pub entries: Vec<G2Entry>,
    pub pass: bool,
}

/// ∬ (x+y)^k (x−y)^m dμ(x)dμ(y) by direct double summation, k, m ≤ k_max.
/// It vanishes when m or k+m is odd and is non-negative when both are even.
pub fn ginibre_g2_check(mu: &EvenMeasure, k_max: u32) -> Result<G2Report> {
    let mu = match mu.dimension() {
        Some(_) => mu.discretize(DVECTOR_CELLS)?,
        None => mu.clone(),
    };
    let pairs: Vec<(u32, u32)> = (0..=k_max).flat_map(|k| (0..=k_max).map(move |m| (k, m))).collect();
    let exact = mu.expanded_atoms_exact();
    let float = mu.expanded_atoms_f64().expect("atomic measure");
    let entries: Vec<G2Entry> = pairs
        .par_iter()
        .map(|&(k, m)| {
            let value = match &exact {
                Some(atoms) => {
                    let mut acc = BigRational::zero();
                    for (x, px) in atoms {
                        for (y, py) in atoms {
                            acc += px * py * Pow::pow(&(x + y), k) * Pow::pow(&(x - y), m);
                        }
                    }
                    Value::Exact(acc)
                }
                None => {
                    let mut acc = 0.0;
                    for &(x, px) in &float {
                        for &(y, py) in &float {
                            acc += px * py * (x + y).powi(k as i32) * (x - y).powi(m as i32);
                        }
                    }
                    Value::Float(acc)
                }
            };
            let zero = m % 2 == 1 || (k + m) % 2 == 1;
            let pass = match (&value, zero) {
                (Value::Exact(q), true) => q.is_zero(),
                (Value::Exact(q), false) => q >= &BigRational::zero(),
                (Value::Float(x), true) => x.abs() <= 1e-12,
                (Value::Float(x), false) => *x >= -1e-12,
            };
            G2Entry {
                k,
                m,
                value: value.num(),
                expected: if zero { "zero" } else { "nonneg" },
                pass,
            }
        })
        .collect();
    Ok(G2Report {
        measure: mu.label().to_string(),
        pass: entries.iter().all(|e| e.pass),
        entries,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingEntry {
    pub monomial: String,
    /// ⟨σ^A⟩ at T with the scaled measure.
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub scaled: f64,
    /// s^{|A|}·⟨σ^A⟩ at T/s² with the base measure.
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub rescaled_base: f64,
    /// Relative difference; absolute for odd monomials.
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub rel_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub s: Num,
    pub entries: Vec<ScalingEntry>,
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub max_rel_error: f64,
    pub pass: bool,
}

/// ⟨σ^A⟩_{T, μ^(s)} = s^{|A|}·⟨σ^A⟩_{T/s², μ} for pair interactions.
pub fn scaling_check(
    interaction: &Interaction,
    base: &EvenMeasure,
    s: &Value,
    monomials: &[Monomial],
    tol: f64,
) -> Result<ScalingReport> {
    if !interaction.pair_only() {
        return Err(Error::Interaction("scaling identity needs pair interactions only".into()));
    }
    let scaled_measure = base.scale(s)?;
    let sf = s.to_f64();
    let lhs = GibbsSystem::new(interaction.clone(), &scaled_measure)?.expectations(monomials)?;
    let cooled = interaction.with_temperature(interaction.temperature / (sf * sf))?;
    let rhs = GibbsSystem::new(cooled, base)?.expectations(monomials)?;
    let entries: Vec<ScalingEntry> = monomials
        .iter()
        .zip(lhs.iter().zip(&rhs))
        .map(|(m, (&l, &r))| {
            let r = r * sf.powi(m.degree() as i32);
            // Odd monomials vanish by spin-flip symmetry; compare them absolutely.
            let denom = if m.degree() % 2 == 1 { 1.0 } else { l.abs().max(r.abs()) };
            let rel_error = if denom < 1e-300 { 0.0 } else { (l - r).abs() / denom };
            ScalingEntry {
                monomial: m.to_string(),
                scaled: l,
                rescaled_base: r,
                rel_error,
            }
        })
        .collect();
    let max_rel_error = entries.iter().map(|e| e.rel_error).fold(0.0, f64::max);
    Ok(ScalingReport {
        s: s.num(),
        pass: max_rel_error <= tol,
        entries,
        max_rel_error,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Graph {
    Path,
    Ring,
    Complete,
}

/// A coupling graph on up to a few sites, named like `path3` or `ring4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Template {
    pub graph: Graph,
    pub sites: usize,
}

impl Template {
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let l = self.sites;
        match self.graph {
            Graph::Path => (1..l).map(|i| (i - 1, i)).collect(),
            Graph::Ring if l <= 2 => (1..l).map(|i| (i - 1, i)).collect(),
            Graph::Ring => (0..l).map(|i| (i, (i + 1) % l)).collect(),
            Graph::Complete => (0..l).flat_map(|i| (i + 1..l).map(move |j| (i, j))).collect(),
        }
    }
}

impl FromStr for Template {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let digits = s.trim_start_matches(|c: char| c.is_ascii_alphabetic());
        let name = &s[..s.len() - digits.len()];
        let graph = match name {
            "path" => Graph::Path,
            "ring" => Graph::Ring,
            "complete" => Graph::Complete,
            _ => return Err(Error::Interaction(format!("unknown template '{s}'"))),
        };
        let sites: usize = digits
            .parse()
            .map_err(|_| Error::Interaction(format!("template '{s}' needs a site count")))?;
        if sites == 0 {
            return Err(Error::Interaction("template needs at least one site".into()));
        }
        Ok(Template { graph, sites })
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.graph {
            Graph::Path => "path",
            Graph::Ring => "ring",
            Graph::Complete => "complete",
        };
        write!(f, "{name}{}", self.sites)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EnsembleOptions {
    /// Add σ_j terms with J ~ U[0,1].
    pub odd_fields: bool,
    /// Add σ_j² terms with J ~ U[0,1].
    pub even_site_terms: bool,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        EnsembleOptions {
            odd_fields: true,
            even_site_terms: true,
        }
    }
}

/// One random ferromagnetic interaction: every edge (and optional site
/// term) gets J ~ U[0,1].
pub fn random_interaction(template: &Template, opts: EnsembleOptions, rng: &mut impl Rng) -> Interaction {
    let mut terms: Vec<Term> = template
        .edges()
        .into_iter()
        .map(|(i, j)| Term {
            exps: Monomial(BTreeMap::from([(i, 1), (j, 1)])),
            j: rng.random::<f64>(),
        })
        .collect();
    for site in 0..template.sites {
        if opts.odd_fields {
            terms.push(Term {
                exps: Monomial::site(site),
                j: rng.random::<f64>(),
            });
        }
        if opts.even_site_terms {
            terms.push(Term {
                exps: Monomial(BTreeMap::from([(site, 2)])),
                j: rng.random::<f64>(),
            });
        }
    }
    Interaction {
        sites: template.sites,
        temperature: 1.0,
        terms,
    }
}

/// `trials` interactions drawn in order from a ChaCha8 stream seeded by `seed`.
pub fn ensemble(template: &Template, trials: usize, seed: u64, opts: EnsembleOptions) -> Vec<Interaction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|_| random_interaction(template, opts, &mut rng)).collect()
}

/// σ_i, σ_i² and σ_iσ_j for i < j.
pub fn monomials_up_to_degree_two(sites: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for i in 0..sites {
        out.push(Monomial::site(i));
        out.push(Monomial(BTreeMap::from([(i, 2)])));
    }
    for i in 0..sites {
        for j in i + 1..sites {
            out.push(Monomial(BTreeMap::from([(i, 1), (j, 1)])));
        }
    }
    out
}

/// All unordered pairs (with repetition) of the given monomials.
pub fn all_pairs(monomials: &[Monomial]) -> Vec<(Monomial, Monomial)> {
    let mut out = Vec::new();
    for (i, a) in monomials.iter().enumerate() {
        for b in &monomials[i..] {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct EnsembleDominationReport {
    pub lower: String,
    pub upper: String,
    pub template: String,
    pub seed: u64,
    pub trials: usize,
    pub options: EnsembleOptions,
    #[serde(serialize_with = "crate::arith::ser_floats")]
    pub per_trial_worst: Vec<f64>,
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub worst_slack: f64,
    pub worst_trial: usize,
    pub pass: bool,
}

/// [`domination_check`] over a seeded ensemble, with degree ≤ 2 monomials.
pub fn ensemble_domination(
    lower: &EvenMeasure,
    upper: &EvenMeasure,
    template: &Template,
    trials: usize,
    seed: u64,
    opts: EnsembleOptions,
    tol: f64,
) -> Result<EnsembleDominationReport> {
    let monomials = monomials_up_to_degree_two(template.sites);
    let reports = ensemble(template, trials, seed, opts)
        .par_iter()
        .map(|inter| domination_check(lower, upper, inter, &monomials, tol))
        .collect::<Result<Vec<_>>>()?;
    let per_trial_worst: Vec<f64> = reports.iter().map(|r| r.worst_slack).collect();
    let (worst_trial, worst_slack) = per_trial_worst
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
    Ok(EnsembleDominationReport {
        lower: lower.label().to_string(),
        upper: upper.label().to_string(),
        template: template.to_string(),
        seed,
        trials,
        options: opts,
        pass: reports.iter().all(|r| r.pass),
        per_trial_worst,
        worst_slack,
        worst_trial,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EnsembleGksReport {
    pub measure: String,
    pub template: String,
    pub seed: u64,
    pub trials: usize,
    pub options: EnsembleOptions,
    #[serde(serialize_with = "crate::arith::ser_floats")]
    pub per_trial_worst: Vec<f64>,
    #[serde(serialize_with = "crate::arith::ser_float")]
    pub worst: f64,
    pub pass: bool,
}

/// [`gks_check`] over a seeded ensemble, with degree ≤ 2 monomials and all
/// their pairs.
pub fn ensemble_gks(
    mu: &EvenMeasure,
    template: &Template,
    trials: usize,
    seed: u64,
    opts: EnsembleOptions,
    tol: f64,
) -> Result<EnsembleGksReport> {
    let monomials = monomials_up_to_degree_two(template.sites);
    let pairs = all_pairs(&monomials);
    let reports = ensemble(template, trials, seed, opts)
        .par_iter()
        .map(|inter| gks_check(&GibbsSystem::new(inter.clone(), mu)?, &monomials, &pairs, tol))
        .collect::<Result<Vec<_>>>()?;
    let per_trial_worst: Vec<f64> = reports.iter().map(|r| r.worst).collect();
    Ok(EnsembleGksReport {
        measure: mu.label().to_string(),
        template: template.to_string(),
        seed,
        trials,
        options: opts,
        pass: reports.iter().all(|r| r.pass),
        worst: per_trial_worst.iter().copied().fold(f64::INFINITY, f64::min),
        per_trial_worst,
    })
}
