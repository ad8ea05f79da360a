//! Subcommand definitions and their handlers.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Subcommand;
use isingcmp::arith::{HalfInteger, Num, Scalar, Value};
use isingcmp::families::{
    power_analog_table, verify_dvector_canonical, verify_spin_canonical, FamilyCertificate, FamilyVerdict,
};
use isingcmp::gibbs::{
    ensemble, ensemble_domination, ensemble_gks, gks_check, ginibre_g2_check,
    monomials_up_to_degree_two, all_pairs, scaling_check, EnsembleOptions, GibbsSystem, Interaction,
    Monomial, Template,
};
use isingcmp::majorization::{
    default_test_family, hinge_witness, karamata_test, majorizes, single_crossing_check,
    verify_theorem, verify_theorem_values, OrderedVector, PsiSpec, PsiValues, Variant,
};
use isingcmp::temperature::bound_report;
use isingcmp::wells::{
    bernoulli_sandwich, canonical_check, t_minus, t_plus, transitivity_probe, wells_dominates, Verdict,
    DEFAULT_CUTOFF, DEFAULT_TOL,
};
use num::rational::BigRational;
use num::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use crate::inputs;
use crate::report::{Outcome, Table};
use crate::Global;

fn cell(n: &Num) -> String {
    n.value.clone()
}

#[derive(Subcommand, Debug, Serialize)]
pub enum WellsCmd {
    /// Check upper ▷ lower on the odd (n, m) grid.
    Check {
        #[arg(long)]
        upper: String,
        #[arg(long)]
        lower: String,
        #[arg(long, default_value_t = 12)]
        max_degree: u32,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Estimate T₋ from odd powers up to the cutoff.
    Tminus {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = DEFAULT_CUTOFF)]
        cutoff: u32,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Check whether T₋² equals the second moment.
    Canonical {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 25)]
        mmax: u32,
    },
    /// Check a ▷ b, b ▷ c and a ▷ c at one degree.
    Transitivity {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 12)]
        max_degree: u32,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

impl WellsCmd {
    pub fn name(&self) -> &'static str {
        match self {
            WellsCmd::Check { .. } => "check",
            WellsCmd::Tminus { .. } => "tminus",
            WellsCmd::Canonical { .. } => "canonical",
            WellsCmd::Transitivity { .. } => "transitivity",
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
pub enum FamiliesCmd {
    /// Odd-power sums of the spin-S family for 2S = 1..=2·smax.
    Spin {
        #[arg(long, default_value = "10")]
        smax: String,
        #[arg(long, default_value_t = 50)]
        mmax: u32,
        /// Include S = 1, whose sums have the opposite sign.
        #[arg(long)]
        include_one: bool,
    },
    /// Odd central moments of the D-vector family for D = 2..=dmax.
    Dvector {
        #[arg(long, default_value_t = 10)]
        dmax: u32,
        #[arg(long, default_value_t = 30)]
        mmax: u32,
    },
    /// Sign table of the |j|^p analog of the spin sums.
    Power {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "20")]
        smax: String,
        #[arg(long, default_value_t = 20)]
        mmax: u32,
    },
}

impl FamiliesCmd {
    pub fn name(&self) -> &'static str {
        match self {
            FamiliesCmd::Spin { .. } => "spin",
            FamiliesCmd::Dvector { .. } => "dvector",
            FamiliesCmd::Power { .. } => "power",
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
pub enum MajorizeCmd {
    /// Check x ≻ y for two non-increasing vectors (paths or inline lists).
    Check {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Run the A1 or A2 construction for ψ on the grid j/N.
    Theorem {
        #[arg(long)]
        variant: Variant,
        /// `power:p[:scale]`, `shifted:p:offset[:scale]` or `table:<path>`.
        #[arg(long)]
        psi: String,
        #[arg(long = "n")]
        n: u32,
        #[arg(long, default_value_t = 25)]
        mmax: u32,
    },
}

impl MajorizeCmd {
    pub fn name(&self) -> &'static str {
        match self {
            MajorizeCmd::Check { .. } => "check",
            MajorizeCmd::Theorem { .. } => "theorem",
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
pub enum GibbsCmd {
    /// Expectations of monomials for one interaction.
    Expect {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        measure: String,
        #[arg(long = "monomial", required = true)]
        monomials: Vec<Monomial>,
    },
    /// lower ≤ upper on degree ≤ 2 monomials over a seeded ensemble.
    Dominate {
        #[arg(long)]
        lower: String,
        #[arg(long)]
        upper: String,
        #[arg(long, default_value = "path3")]
        template: Template,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// GKS inequalities for one interaction or a seeded ensemble.
    Gks {
        #[arg(long)]
        measure: String,
        #[arg(long, conflicts_with = "template")]
        system: Option<PathBuf>,
        #[arg(long)]
        template: Option<Template>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Scaling identity for a pair interaction.
    Scaling {
        #[arg(long)]
        s: String,
        #[arg(long)]
        measure: String,
        /// Interaction file; when absent a seeded random pair interaction
        /// on the template is used.
        #[arg(long, conflicts_with = "template")]
        system: Option<PathBuf>,
        #[arg(long)]
        template: Option<Template>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Duplicate-variable positivity by direct double summation.
    Ginibre {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 8)]
        kmax: u32,
    },
    /// b_{T₋} ≤ μ ≤ b_{T₊} over a seeded ensemble.
    Sandwich {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value = "path3")]
        template: Template,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_CUTOFF)]
        cutoff: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

impl GibbsCmd {
    pub fn name(&self) -> &'static str {
        match self {
            GibbsCmd::Expect { .. } => "expect",
            GibbsCmd::Dominate { .. } => "dominate",
            GibbsCmd::Gks { .. } => "gks",
            GibbsCmd::Scaling { .. } => "scaling",
            GibbsCmd::Ginibre { .. } => "ginibre",
            GibbsCmd::Sandwich { .. } => "sandwich",
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
pub enum BoundsCmd {
    /// Lower and upper coefficients of the critical-temperature bounds.
    Report {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        coupling_sum: Option<String>,
        #[arg(long, default_value_t = DEFAULT_CUTOFF)]
        cutoff: u32,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

impl BoundsCmd {
    pub fn name(&self) -> &'static str {
        "report"
    }
}

#[derive(Subcommand, Debug, Serialize)]
pub enum MeasuresCmd {
    /// Atoms, support and moments of a measure.
    Show {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 8)]
        kmax: u32,
    },
}

impl MeasuresCmd {
    pub fn name(&self) -> &'static str {
        "show"
    }
}

pub fn dispatch(cmd: &crate::Command, g: &Global) -> Result<Outcome> {
    use crate::Command::*;
    match cmd {
        Wells(c) => wells(c, g),
        Families(c) => families(c),
        Majorize(c) => majorize(c, g),
        Gibbs(c) => gibbs(c, g),
        Bounds(c) => bounds(c, g),
        Measures(c) => measures(c, g),
    }
}

fn wells(cmd: &WellsCmd, g: &Global) -> Result<Outcome> {
    match cmd {
        WellsCmd::Check { upper, lower, max_degree, tol } => {
            let upper = inputs::measure(upper, g.float)?;
            let lower = inputs::measure(lower, g.float)?;
            let report = wells_dominates(&upper, &lower, *max_degree, *tol)?;
            let mut table = Table::new(vec!["n", "m", "value", "kind"]);
            for e in &report.entries {
                let v = e.value.num();
                table.push(vec![e.n.to_string(), e.m.to_string(), cell(&v), kind(&v)]);
            }
            Ok(Outcome::new(&report, report.verdict == Verdict::Dominates)?.with_table(table))
        }
        WellsCmd::Tminus { measure, cutoff, tol } => {
            let mu = inputs::measure(measure, g.float)?;
            let report = t_minus(&mu, *cutoff, *tol)?;
            let mut table = Table::new(vec!["n", "s_sq_low", "s_sq_high", "s"]);
            for r in &report.per_power_roots {
                table.push(vec![
                    r.n.to_string(),
                    r.s_sq_low.to_string(),
                    r.s_sq_high.to_string(),
                    format!("{}", r.s),
                ]);
            }
            Ok(Outcome::new(&report, true)?.with_table(table))
        }
        WellsCmd::Canonical { measure, mmax } => {
            let mu = inputs::measure(measure, g.float)?;
            let report = canonical_check(&mu, *mmax);
            let mut table = Table::new(vec!["m", "gap", "kind"]);
            for (m, v) in &report.gaps {
                let v = v.num();
                table.push(vec![m.to_string(), cell(&v), kind(&v)]);
            }
            Ok(Outcome::new(&report, report.canonical)?.with_table(table))
        }
        WellsCmd::Transitivity { a, b, c, max_degree, tol } => {
            let a = inputs::measure(a, g.float)?;
            let b = inputs::measure(b, g.float)?;
            let c = inputs::measure(c, g.float)?;
            let probe = transitivity_probe(&a, &b, &c, *max_degree, *tol)?;
            let mut table = Table::new(vec!["pair", "verdict", "min_slack"]);
            for (name, r) in [("a>b", &probe.a_over_b), ("b>c", &probe.b_over_c), ("a>c", &probe.a_over_c)] {
                table.push(vec![name.into(), format!("{:?}", r.verdict).to_lowercase(), r.min_slack.to_string()]);
            }
            Ok(Outcome::new(&probe, !probe.counterexample_candidate)?.with_table(table))
        }
    }
}

fn kind(n: &Num) -> String {
    serde_json::to_value(n.kind)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

fn half_integer(text: &str) -> Result<HalfInteger> {
    Ok(HalfInteger::from_rational(&inputs::rational(text)?)?)
}

fn verdict_name(v: &FamilyVerdict) -> String {
    match v {
        FamilyVerdict::AllNonneg => "all_nonneg".into(),
        FamilyVerdict::Violation { m } => format!("violation_at_m={m}"),
        FamilyVerdict::OppositeSign => "opposite_sign".into(),
    }
}

fn certificate_table(certs: &[FamilyCertificate]) -> Table {
    let mut table = Table::new(vec!["parameter", "m", "value", "verdict"]);
    for c in certs {
        for (m, v) in c.checked_powers.iter().zip(&c.values) {
            table.push(vec![c.parameter.clone(), m.to_string(), cell(v), verdict_name(&c.verdict)]);
        }
    }
    table
}

fn families(cmd: &FamiliesCmd) -> Result<Outcome> {
    match cmd {
        FamiliesCmd::Spin { smax, mmax, include_one } => {
            let top = half_integer(smax)?.twice();
            let list = (1..=top)
                .filter(|&t| t != 2 || *include_one)
                .map(HalfInteger::from_twice)
                .collect::<isingcmp::Result<Vec<_>>>()?;
            let certs = verify_spin_canonical(&list, *mmax);
            let pass = certs
                .iter()
                .all(|c| matches!(c.verdict, FamilyVerdict::AllNonneg | FamilyVerdict::OppositeSign));
            let table = certificate_table(&certs);
            Ok(Outcome::new(&certs, pass)?.with_table(table))
        }
        FamiliesCmd::Dvector { dmax, mmax } => {
            let certs = verify_dvector_canonical(*dmax, *mmax)?;
            let pass = certs.iter().all(|c| c.verdict == FamilyVerdict::AllNonneg);
            let table = certificate_table(&certs);
            Ok(Outcome::new(&certs, pass)?.with_table(table))
        }
        FamiliesCmd::Power { p, smax, mmax } => {
            let report = power_analog_table(*p, half_integer(smax)?, *mmax)?;
            let mut table = Table::new(vec!["p", "S", "m", "value", "normalized", "sign", "five_point_gate"]);
            for r in &report.rows {
                table.push(vec![
                    format!("{}", r.p),
                    r.s.to_string(),
                    r.m.to_string(),
                    format!("{}", r.value),
                    format!("{}", r.normalized),
                    format!("{:?}", r.sign).to_lowercase(),
                    r.five_point_gate.map(|b| b.to_string()).unwrap_or_default(),
                ]);
            }
            // An exploratory sign table: nothing is asserted.
            Ok(Outcome::new(&report, true)?.with_table(table))
        }
    }
}

#[derive(Serialize)]
struct MajorizeReport {
    certificate: isingcmp::majorization::MajorizationCertificate,
    single_crossing: Option<isingcmp::majorization::MajorizationCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    karamata: Option<isingcmp::majorization::KaramataReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hinge_witness: Option<isingcmp::majorization::HingeWitness>,
}

fn majorize_check<T: Scalar>(x: Vec<T>, y: Vec<T>) -> Result<Outcome> {
    let x = OrderedVector::new(x)?;
    let y = OrderedVector::new(y)?;
    let certificate = majorizes(&x, &y)?;
    let single_crossing = if certificate.total_equal {
        single_crossing_check(&x, &y)?
    } else {
        None
    };
    let (karamata, witness) = if certificate.majorizes {
        (Some(karamata_test(&x, &y, &default_test_family(&x, &y))?), None)
    } else if certificate.total_equal {
        (None, hinge_witness(&x, &y)?)
    } else {
        (None, None)
    };
    let mut table = Table::new(vec!["k", "x", "y", "partial_sum_gap"]);
    for (k, ((a, b), gap)) in certificate
        .x
        .iter()
        .zip(&certificate.y)
        .zip(&certificate.partial_sum_gaps)
        .enumerate()
    {
        table.push(vec![(k + 1).to_string(), cell(a), cell(b), cell(gap)]);
    }
    let pass = certificate.majorizes;
    let report = MajorizeReport {
        certificate,
        single_crossing,
        karamata,
        hinge_witness: witness,
    };
    Ok(Outcome::new(&report, pass)?.with_table(table))
}

fn to_f64s(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
}

fn majorize(cmd: &MajorizeCmd, g: &Global) -> Result<Outcome> {
    match cmd {
        MajorizeCmd::Check { x, y } => {
            let (x, y) = (inputs::vector(x)?, inputs::vector(y)?);
            if g.float {
                majorize_check(to_f64s(&x), to_f64s(&y))
            } else {
                majorize_check(x, y)
            }
        }
        MajorizeCmd::Theorem { variant, psi, n, mmax } => {
            let psi = PsiSpec::parse(psi)?;
            let report = if g.float {
                let values = match psi.values(*n)? {
                    PsiValues::Exact(v) => to_f64s(&v),
                    PsiValues::Float(v) => v,
                };
                verify_theorem_values(&values, *variant, *mmax)?
            } else {
                verify_theorem(&psi, *n, *mmax, *variant)?
            };
            let mut table = Table::new(vec!["m", "value", "nonneg"]);
            for d in &report.direct_sums {
                table.push(vec![d.m.to_string(), cell(&d.value), d.nonneg.to_string()]);
            }
            let pass = report.direct_all_nonneg && (!report.theorem_applied || report.routes_agree);
            Ok(Outcome::new(&report, pass)?.with_table(table))
        }
    }
}

fn ensemble_table(per_trial: &[f64]) -> Table {
    let mut table = Table::new(vec!["trial", "worst"]);
    for (i, v) in per_trial.iter().enumerate() {
        table.push(vec![i.to_string(), format!("{v}")]);
    }
    table
}

fn pair_interaction(system: &Option<PathBuf>, template: &Option<Template>, seed: u64) -> Result<Interaction> {
    if let Some(path) = system {
        return inputs::interaction(path);
    }
    let template = template.unwrap_or_else(|| "path3".parse().expect("valid template"));
    let opts = EnsembleOptions {
        odd_fields: false,
        even_site_terms: false,
    };
    Ok(ensemble(&template, 1, seed, opts).remove(0))
}

fn gibbs(cmd: &GibbsCmd, g: &Global) -> Result<Outcome> {
    let opts = EnsembleOptions::default();
    match cmd {
        GibbsCmd::Expect { system, measure, monomials } => {
            let inter = inputs::interaction(system)?;
            let mu = inputs::measure(measure, g.float)?;
            let sys = GibbsSystem::new(inter, &mu)?;
            let values = sys.expectations(monomials)?;
            let mut table = Table::new(vec!["monomial", "value"]);
            let mut rows = Vec::new();
            for (m, v) in monomials.iter().zip(&values) {
                table.push(vec![m.to_string(), format!("{v}")]);
                rows.push(json!({"monomial": m.to_string(), "value": Num::float(*v)}));
            }
            let report = json!({
                "measure": mu.label(),
                "configurations": sys.configurations(),
                "log_partition_function": Num::float(sys.log_partition_function()?),
                "expectations": rows,
            });
            Ok(Outcome::new(&report, true)?.with_table(table))
        }
        GibbsCmd::Dominate { lower, upper, template, trials, tol } => {
            let lower = inputs::measure(lower, g.float)?;
            let upper = inputs::measure(upper, g.float)?;
            let report = ensemble_domination(&lower, &upper, template, *trials, g.seed, opts, *tol)?;
            let table = ensemble_table(&report.per_trial_worst);
            Ok(Outcome::new(&report, report.pass)?.with_table(table))
        }
        GibbsCmd::Gks { measure, system, template, trials, tol } => {
            let mu = inputs::measure(measure, g.float)?;
            if let Some(path) = system {
                let sys = GibbsSystem::new(inputs::interaction(path)?, &mu)?;
                let monomials = monomials_up_to_degree_two(sys.interaction.sites);
                let report = gks_check(&sys, &monomials, &all_pairs(&monomials), *tol)?;
                let mut table = Table::new(vec!["a", "b", "covariance"]);
                for c in &report.covariances {
                    table.push(vec![c.a.clone(), c.b.clone(), format!("{}", c.covariance)]);
                }
                return Ok(Outcome::new(&report, report.pass)?.with_table(table));
            }
            let template = template.unwrap_or_else(|| "path3".parse().expect("valid template"));
            let report = ensemble_gks(&mu, &template, *trials, g.seed, opts, *tol)?;
            let table = ensemble_table(&report.per_trial_worst);
            Ok(Outcome::new(&report, report.pass)?.with_table(table))
        }
        GibbsCmd::Scaling { s, measure, system, template, tol } => {
            let base = inputs::measure(measure, g.float)?;
            let s = Value::Exact(inputs::rational(s)?);
            let s = if g.float { s.to_float() } else { s };
            let inter = pair_interaction(system, template, g.seed)?;
            let monomials = monomials_up_to_degree_two(inter.sites);
            let report = scaling_check(&inter, &base, &s, &monomials, *tol)?;
            let mut table = Table::new(vec!["monomial", "scaled", "rescaled_base", "rel_error"]);
            for e in &report.entries {
                table.push(vec![
                    e.monomial.clone(),
                    format!("{}", e.scaled),
                    format!("{}", e.rescaled_base),
                    format!("{}", e.rel_error),
                ]);
            }
            let report = json!({ "interaction": inter, "scaling": report });
            let pass = report["scaling"]["pass"].as_bool().unwrap_or(false);
            Ok(Outcome::new(&report, pass)?.with_table(table))
        }
        GibbsCmd::Ginibre { measure, kmax } => {
            let mu = inputs::measure(measure, g.float)?;
            let report = ginibre_g2_check(&mu, *kmax)?;
            let mut table = Table::new(vec!["k", "m", "value", "expected", "pass"]);
            for e in &report.entries {
                table.push(vec![
                    e.k.to_string(),
                    e.m.to_string(),
                    cell(&e.value),
                    e.expected.into(),
                    e.pass.to_string(),
                ]);
            }
            Ok(Outcome::new(&report, report.pass)?.with_table(table))
        }
        GibbsCmd::Sandwich { measure, template, trials, cutoff, tol } => {
            let mu = inputs::measure(measure, g.float)?;
            let (below, above) = bernoulli_sandwich(&mu, *cutoff, DEFAULT_TOL)?;
            let lower = ensemble_domination(&below, &mu, template, *trials, g.seed, opts, *tol)?;
            let upper = ensemble_domination(&mu, &above, template, *trials, g.seed, opts, *tol)?;
            let mut table = Table::new(vec!["trial", "lower_worst", "upper_worst"]);
            for (i, (a, b)) in lower.per_trial_worst.iter().zip(&upper.per_trial_worst).enumerate() {
                table.push(vec![i.to_string(), format!("{a}"), format!("{b}")]);
            }
            let pass = lower.pass && upper.pass;
            let report = json!({ "lower_side": lower, "upper_side": upper });
            Ok(Outcome::new(&report, pass)?.with_table(table))
        }
    }
}

fn bounds(cmd: &BoundsCmd, g: &Global) -> Result<Outcome> {
    let BoundsCmd::Report { measure, coupling_sum, cutoff, tol } = cmd;
    let spec = inputs::measure_spec(measure)?;
    let coupling = coupling_sum
        .as_deref()
        .map(|c| -> Result<Value> {
            let v = Value::Exact(inputs::rational(c)?);
            Ok(if g.float { v.to_float() } else { v })
        })
        .transpose()?;
    let report = bound_report(&spec, *cutoff, *tol, coupling.as_ref())?;
    let mut table = Table::new(vec!["field", "value"]);
    if let serde_json::Value::Object(map) = serde_json::to_value(&report)? {
        for (k, v) in map {
            let text = match &v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Object(o) => o.get("value").and_then(|x| x.as_str()).unwrap_or_default().to_string(),
                other => other.to_string(),
            };
            table.push(vec![k, text]);
        }
    }
    Ok(Outcome::new(&report, true)?.with_table(table))
}

fn measures(cmd: &MeasuresCmd, g: &Global) -> Result<Outcome> {
    let MeasuresCmd::Show { measure, kmax } = cmd;
    let mu = inputs::measure(measure, g.float)?;
    if *kmax > 400 {
        bail!("--kmax {kmax} is too large");
    }
    let moments = mu.moments(*kmax);
    let mut table = Table::new(vec!["k", "moment", "kind"]);
    for (k, m) in moments.iter().enumerate() {
        let m = m.num();
        table.push(vec![k.to_string(), cell(&m), kind(&m)]);
    }
    let atoms = mu
        .atoms()
        .map(|a| a.values().iter().map(|(t, w)| json!({"t": t, "w": w})).collect::<Vec<_>>());
    let report = json!({
        "measure": mu.label(),
        "exact": mu.is_exact(),
        "dimension": mu.dimension(),
        "t_plus": t_plus(&mu)?,
        "atoms": atoms,
        "moments": moments,
    });
    Ok(Outcome::new(&report, true)?.with_table(table))
}
