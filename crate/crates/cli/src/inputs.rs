//! Reading measures, vectors and interactions from paths or inline text.

use std::path::Path;

use anyhow::{Context, Result};
use isingcmp::arith::parse_rational;
use isingcmp::gibbs::Interaction;
use isingcmp::majorization::parse_vector;
use isingcmp::measures::{make_measure_with, EvenMeasure, MeasureSpec, Mode};
use num::rational::BigRational;

/// Contents of `arg` if it names an existing file, otherwise `arg` itself.
fn text_or_file(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        std::fs::read_to_string(path).with_context(|| format!("cannot read {arg}"))
    } else {
        Ok(arg.to_string())
    }
}

pub fn measure(arg: &str, float: bool) -> Result<EvenMeasure> {
    let spec = MeasureSpec::parse(&text_or_file(arg)?).with_context(|| format!("measure `{arg}`"))?;
    let mode = if float { Mode::Float } else { Mode::Auto };
    Ok(make_measure_with(&spec, mode)?)
}

pub fn measure_spec(arg: &str) -> Result<MeasureSpec> {
    Ok(MeasureSpec::parse(&text_or_file(arg)?).with_context(|| format!("measure `{arg}`"))?)
}

pub fn vector(arg: &str) -> Result<Vec<BigRational>> {
    Ok(parse_vector(&text_or_file(arg)?).with_context(|| format!("vector `{arg}`"))?)
}

pub fn interaction(path: &Path) -> Result<Interaction> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(Interaction::from_json(&text).with_context(|| format!("interaction {}", path.display()))?)
}

pub fn rational(text: &str) -> Result<BigRational> {
    Ok(parse_rational(text)?)
}
