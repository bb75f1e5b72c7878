//! Pipeline reports and their JSON and text renderings.
//!
//! Every expression appears twice: as canonical text in the model language
//! and as a list of terms in the engine's canonical monomial order, which
//! makes the JSON output byte-for-byte reproducible.

use std::fmt::Write;

use serde::Serialize;
use vtc_core::{EvoField, Poly, Rational, Spectrum};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermOut {
    pub coeff: String,
    pub factors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExprOut {
    pub text: String,
    pub terms: Vec<TermOut>,
}

impl ExprOut {
    pub fn new(p: &Poly<Rational>, sp: &Spectrum) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| TermOut {
                coeff: c.to_string(),
                factors: m
                    .factors()
                    .iter()
                    .map(|(g, k)| {
                        let n = sp.gen_name(g);
                        if *k > 1 {
                            format!("{n}^{k}")
                        } else {
                            n
                        }
                    })
                    .collect(),
            })
            .collect();
        ExprOut { text: p.render(sp), terms }
    }
}

/// One source component of an evolutionary field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldValue {
    pub component: String,
    pub value: ExprOut,
}

pub fn field_values(x: &EvoField<Rational>, sp: &Spectrum) -> Vec<FieldValue> {
    x.sources()
        .iter()
        .map(|(c, v)| FieldValue { component: sp.field(*c).label(), value: ExprOut::new(v, sp) })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MasterReport {
    pub ok: bool,
    /// `[Q,Q] = 0` for the literal Hamiltonian field.
    pub homological: bool,
    pub q: Vec<FieldValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<ExprOut>,
    pub residual: Vec<FieldValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DescendantReport {
    pub level: usize,
    pub omega: ExprOut,
    pub hamiltonian: ExprOut,
    /// `input`, `potential` or `homotopy`.
    pub route: String,
    pub cross_checked: bool,
    /// `L_Q ω_k ≃ 0`.
    pub closed: bool,
    /// `ω_k ≃ 0`, ending the chain.
    pub trivial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurrentReport {
    pub current: ExprOut,
    /// `dΣ = −½{H,H}` exactly and `J ≃ Σ`.
    pub cross_check: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub omega: ExprOut,
    pub charge_density: ExprOut,
    /// `(J₀, J₀) ≃ 0` on leaves.
    pub charge_closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BracketReport {
    pub name: String,
    pub value: ExprOut,
    pub expected: ExprOut,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomogenizerReport {
    pub generator: Vec<FieldValue>,
    pub leading: ExprOut,
    /// `h*(ω₁) ≃ ω₁⁽¹⁾`.
    pub certificate: bool,
    pub pulled_charge: ExprOut,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master: Option<MasterReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub descendants: Option<Vec<DescendantReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub current: Option<CurrentReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brackets: Option<Vec<BracketReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homogenizer: Option<HomogenizerReport>,
}

impl Report {
    /// Whether every recorded check passed.
    pub fn ok(&self) -> bool {
        self.master.as_ref().is_none_or(|m| m.ok && m.homological)
            && self.descendants.as_ref().is_none_or(|ds| ds.iter().all(|d| d.closed))
            && self.current.as_ref().is_none_or(|c| c.cross_check)
            && self.reduction.as_ref().is_none_or(|r| r.charge_closed)
            && self.brackets.as_ref().is_none_or(|bs| bs.iter().all(|b| b.ok))
            && self.homogenizer.as_ref().is_none_or(|h| h.certificate)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let verdict = |b: bool| if b { "pass" } else { "FAIL" };
        if let Some(m) = &self.model {
            let _ = writeln!(s, "model {m}");
        }
        if let Some(m) = &self.master {
            let _ = writeln!(s, "[master] {} (Q^2 = 0: {})", verdict(m.ok), verdict(m.homological));
            for f in &m.q {
                let _ = writeln!(s, "  Q({}) = {}", f.component, f.value.text);
            }
            if let Some(sig) = &m.sigma {
                let _ = writeln!(s, "  Sigma = {}", sig.text);
            }
            for f in &m.residual {
                let _ = writeln!(s, "  residual E[{}] = {}", f.component, f.value.text);
            }
        }
        if let Some(ds) = &self.descendants {
            let _ = writeln!(s, "[descendants]");
            for d in ds {
                let _ = writeln!(
                    s,
                    "  omega_{} ({}, closed: {}{}) = {}",
                    d.level,
                    d.route,
                    verdict(d.closed),
                    if d.trivial { ", trivial" } else { "" },
                    d.omega.text
                );
                let _ = writeln!(s, "  H_{} = {}", d.level, d.hamiltonian.text);
            }
        }
        if let Some(c) = &self.current {
            let _ = writeln!(s, "[current] cross-check {}", verdict(c.cross_check));
            let _ = writeln!(s, "  J = {}", c.current.text);
        }
        if let Some(r) = &self.reduction {
            let _ = writeln!(s, "[reduction] (J0,J0) ~ 0: {}", verdict(r.charge_closed));
            let _ = writeln!(s, "  omega_1 = {}", r.omega.text);
            let _ = writeln!(s, "  J0 = {}", r.charge_density.text);
        }
        if let Some(bs) = &self.brackets {
            let _ = writeln!(s, "[brackets]");
            for b in bs {
                let _ = writeln!(s, "  {} {}", b.name, verdict(b.ok));
                let _ = writeln!(s, "    value    = {}", b.value.text);
                let _ = writeln!(s, "    expected = {}", b.expected.text);
            }
        }
        if let Some(h) = &self.homogenizer {
            let _ = writeln!(s, "[homogenizer] certificate {}", verdict(h.certificate));
            for f in &h.generator {
                let _ = writeln!(s, "  X({}) = {}", f.component, f.value.text);
            }
            let _ = writeln!(s, "  leading = {}", h.leading.text);
            let _ = writeln!(s, "  h*(J0) = {}", h.pulled_charge.text);
        }
        s
    }
}
