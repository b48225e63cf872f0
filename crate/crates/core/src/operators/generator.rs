use super::s2::{
    conv_inner_operator, conv_outer_operator, jsq_operator, laplace_operator, t0_operator, txy2_operator, tz2_operator, SphOperator,
};
use super::wigner_ops::{jsq_wigner_operator, jz_operator, tk_operator, tt_operator, WignerOperator};
use crate::fields::{Parity, SphLayout, SphericalField};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Weighted sum of named left-invariant operators.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub terms: Vec<(String, f64)>,
    /// Convolution coefficients `c_j` for the wrapped variants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conv: Option<Vec<f64>>,
}

impl GeneratorSpec {
    pub fn new(terms: &[(&str, f64)]) -> Self {
        Self { terms: terms.iter().map(|(n, w)| (n.to_string(), *w)).collect(), conv: None }
    }

    pub fn with_conv(mut self, c: Vec<f64>) -> Self {
        self.conv = Some(c);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in &self.terms {
            if !w.is_finite() {
                return Err(Error::Config(format!("weight of {name} is not finite")));
            }
            if !S2_NAMES.contains(&name.as_str()) && !WIGNER_NAMES.contains(&name.as_str()) {
                return Err(Error::UnknownOperator(name.clone()));
            }
        }
        Ok(())
    }
}

pub const S2_NAMES: &[&str] = &["T0", "T0_sq", "Txy_sq", "Laplace", "Jsq", "CT0sqC", "CTxysqC", "T0CCT0", "T0T0"];
pub const WIGNER_NAMES: &[&str] = &["T0", "T0_sq", "Txy_sq", "Laplace", "Jsq", "Jz"];

/// Generator assembled for spherical fields: one merged sparse operator
/// plus optional sequential compositions.
#[derive(Debug, Clone)]
pub struct SphGenerator {
    pub single: SphOperator,
    pub composed: Vec<(f64, Vec<SphOperator>)>,
}

impl SphGenerator {
    pub fn in_layout(&self) -> SphLayout {
        self.single.in_layout
    }

    pub fn out_layout(&self) -> SphLayout {
        self.single.out_layout
    }

    pub fn apply(&self, f: &SphericalField) -> Result<SphericalField> {
        let mut out = self.single.apply(f)?;
        for (w, chain) in &self.composed {
            let mut g = f.clone();
            for op in chain {
                g = op.apply(&g)?;
            }
            let g = g.relayout(out.l(), out.parity());
            out.axpy(*w, &g);
        }
        Ok(out)
    }
}

pub fn build_generator(spec: &GeneratorSpec, l: usize, input: Parity) -> Result<SphGenerator> {
    spec.validate()?;
    let couples = spec.terms.iter().any(|(n, w)| n == "T0" && *w != 0.0) || input == Parity::All;
    let out_parity = if couples { Parity::All } else { Parity::Even };
    let in_layout = SphLayout::new(l, input);
    let out_layout = SphLayout::new(l, out_parity);
    let conv = || spec.conv.as_deref().ok_or(Error::MissingCoefficient(0));
    let mut single = SphOperator::zero(in_layout, out_layout);
    let mut composed = Vec::new();
    for (name, w) in &spec.terms {
        if *w == 0.0 {
            continue;
        }
        let part = match name.as_str() {
            "T0" => t0_operator(l, input),
            "T0_sq" => tz2_operator(l, input),
            "Txy_sq" => txy2_operator(l, input),
            "Laplace" => laplace_operator(l, input),
            "Jsq" => jsq_operator(l, input),
            "CT0sqC" => conv_outer_operator(l, input, conv()?, false)?,
            "CTxysqC" => conv_outer_operator(l, input, conv()?, true)?,
            "T0CCT0" => conv_inner_operator(l, input, conv()?)?,
            "T0T0" => {
                composed.push((*w, vec![t0_operator(l, input), t0_operator(l, Parity::All)]));
                continue;
            }
            other => return Err(Error::UnknownOperator(other.to_string())),
        };
        let part = widen(part, out_layout);
        single.add_scaled(&part, *w);
    }
    single.op.prune();
    Ok(SphGenerator { single, composed })
}

/// Re-indexes an operator's output channels into a larger layout.
fn widen(op: SphOperator, out_layout: SphLayout) -> SphOperator {
    if op.out_layout == out_layout {
        return op;
    }
    let chans = op.out_layout.channels();
    let mut res = SphOperator::zero(op.in_layout, out_layout);
    for (o, i, b, w) in op.op.terms() {
        let (j, n) = chans[o];
        res.op.add(out_layout.index(j, n).expect("wider layout"), i, b, w);
    }
    res
}

pub fn build_wigner_generator(spec: &GeneratorSpec, l: usize) -> Result<WignerOperator> {
    spec.validate()?;
    let mut total = WignerOperator::zero(l);
    for (name, w) in &spec.terms {
        if *w == 0.0 {
            continue;
        }
        let part = match name.as_str() {
            "T0" => tk_operator(l, 0),
            "T0_sq" => tt_operator(l, 0, 0),
            "Txy_sq" => {
                let mut a = tt_operator(l, 1, 1);
                a.add_scaled(&tt_operator(l, -1, -1), Complex64::new(1.0, 0.0));
                a
            }
            "Laplace" => {
                let mut a = tt_operator(l, 0, 0);
                a.add_scaled(&tt_operator(l, 1, 1), Complex64::new(1.0, 0.0));
                a.add_scaled(&tt_operator(l, -1, -1), Complex64::new(1.0, 0.0));
                a
            }
            "Jsq" => jsq_wigner_operator(l),
            "Jz" => jz_operator(l),
            other => return Err(Error::UnknownOperator(other.to_string())),
        };
        total.add_scaled(&part, Complex64::new(*w, 0.0));
    }
    total.op.prune();
    Ok(total)
}
