use std::fmt;

use super::{Gen, JetVar, MultiIndex};

/// Grassmann parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        matches!(self, Parity::Odd)
    }

    pub fn from_odd(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn flip(self) -> Self {
        Parity::from_odd(!self.is_odd())
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_odd(self.is_odd() ^ rhs.is_odd())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Field,
    Antifield,
    Source,
    /// A field carrying a base-form factor (like a chiral 1-form component).
    FormValued,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Field => "field",
            Role::Antifield => "antifield",
            Role::Source => "source",
            Role::FormValued => "form",
        }
    }
}

/// One component of a declared field; the unit the jet space is built on.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpec {
    /// Base name of the declared field, e.g. `A`.
    pub name: String,
    /// Tensor / algebra component labels, e.g. `[2]` for `A[2]`.
    pub component: Vec<u8>,
    pub parity: Parity,
    pub ghost: i32,
    pub role: Role,
    /// Conjugate component (for antifields and sources).
    pub conj: Option<u32>,
    /// Momentum degree (counts sources and antifields).
    pub momentum: i32,
    /// Polyvector degree (counts antifields).
    pub polyvector: i32,
}

impl FieldSpec {
    pub fn new(name: &str, component: Vec<u8>, parity: Parity, ghost: i32, role: Role) -> Self {
        let momentum = matches!(role, Role::Antifield | Role::Source) as i32;
        let polyvector = matches!(role, Role::Antifield) as i32;
        FieldSpec {
            name: name.to_string(),
            component,
            parity,
            ghost,
            role,
            conj: None,
            momentum,
            polyvector,
        }
    }

    pub fn label(&self) -> String {
        let mut s = self.name.clone();
        for c in &self.component {
            s.push_str(&format!("[{c}]"));
        }
        s
    }
}

/// Gradings measured by [`Spectrum::grade_of`](super::Poly::grade_of).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grading {
    Parity,
    Ghost,
    Momentum,
    Polyvector,
}

/// The field content and base geometry everything is expressed over.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub dim: usize,
    /// Diagonal entries of the constant metric.
    pub metric: Vec<i64>,
    pub fields: Vec<FieldSpec>,
    pub params: Vec<String>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SpectrumError {
    #[error("field {0} has grading inconsistent with its conjugate {1}")]
    Grading(String, String),
    #[error("unknown field component {0}")]
    Unknown(String),
    #[error("component index {0} outside base dimension")]
    Shape(String),
}

impl Spectrum {
    pub fn new(dim: usize) -> Self {
        Spectrum {
            dim,
            metric: vec![1; dim],
            fields: Vec::new(),
            params: Vec::new(),
        }
    }

    pub fn with_metric(mut self, metric: Vec<i64>) -> Self {
        assert_eq!(metric.len(), self.dim);
        self.metric = metric;
        self
    }

    pub fn add_field(&mut self, spec: FieldSpec) -> u32 {
        self.fields.push(spec);
        (self.fields.len() - 1) as u32
    }

    pub fn add_param(&mut self, name: &str) -> u16 {
        if let Some(p) = self.params.iter().position(|p| p == name) {
            return p as u16;
        }
        self.params.push(name.to_string());
        (self.params.len() - 1) as u16
    }

    pub fn field(&self, comp: u32) -> &FieldSpec {
        &self.fields[comp as usize]
    }

    pub fn find(&self, name: &str, component: &[u8]) -> Option<u32> {
        self.fields
            .iter()
            .position(|f| f.name == name && f.component == component)
            .map(|p| p as u32)
    }

    pub fn param(&self, name: &str) -> Option<u16> {
        self.params.iter().position(|p| p == name).map(|p| p as u16)
    }

    pub fn directions(&self) -> Vec<u8> {
        (0..self.dim as u8).collect()
    }

    pub fn jet(&self, comp: u32, idx: MultiIndex) -> JetVar {
        JetVar {
            comp,
            idx,
            odd: self.field(comp).parity.is_odd(),
        }
    }

    pub fn jet_gen(&self, comp: u32, idx: MultiIndex) -> Gen {
        Gen::Jet(self.jet(comp, idx))
    }

    pub fn delta_gen(&self, comp: u32, idx: MultiIndex) -> Gen {
        Gen::Delta(self.jet(comp, idx))
    }

    /// Checks the antifield/source grading rules against declared conjugates.
    ///
    /// Antifields of the odd cotangent bundle satisfy `gh = -gh(conj) - 1`
    /// with flipped parity, or `gh = -gh(conj) + 1` for the shifted phase
    /// variant; sources satisfy `gh = -gh(conj)` with equal parity.
    pub fn validate(&self) -> Result<(), SpectrumError> {
        for f in &self.fields {
            let Some(c) = f.conj else { continue };
            let Some(g) = self.fields.get(c as usize) else {
                return Err(SpectrumError::Unknown(format!("conjugate of {}", f.label())));
            };
            let ok = match f.role {
                Role::Antifield => {
                    f.parity == g.parity.flip()
                        && (f.ghost == -g.ghost - 1 || f.ghost == -g.ghost + 1)
                }
                Role::Source => f.parity == g.parity && f.ghost == -g.ghost,
                _ => true,
            };
            if !ok {
                return Err(SpectrumError::Grading(f.label(), g.label()));
            }
        }
        Ok(())
    }

    pub fn gen_grade(&self, g: &Gen, grading: Grading) -> i64 {
        match g {
            Gen::Jet(v) | Gen::Delta(v) => {
                let f = self.field(v.comp);
                match grading {
                    Grading::Parity => f.parity.is_odd() as i64,
                    Grading::Ghost => f.ghost as i64,
                    Grading::Momentum => f.momentum as i64,
                    Grading::Polyvector => f.polyvector as i64,
                }
            }
            _ => 0,
        }
    }

    /// Human readable name of a generator in the DSL notation.
    pub fn gen_name(&self, g: &Gen) -> String {
        fn jet(sp: &Spectrum, v: &JetVar) -> String {
            let mut s = sp.field(v.comp).label();
            if !v.idx.is_empty() {
                s.push_str(",[");
                let parts: Vec<String> = v.idx.entries().iter().map(|e| e.to_string()).collect();
                s.push_str(&parts.join(" "));
                s.push(']');
            }
            s
        }
        match g {
            Gen::Param(p) => self.params.get(*p as usize).cloned().unwrap_or_else(|| format!("p{p}")),
            Gen::Coord(i) => format!("x[{i}]"),
            Gen::Jet(v) => jet(self, v),
            Gen::Dx(i) => format!("dx[{i}]"),
            Gen::Delta(v) => format!("del({})", jet(self, v)),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_odd() { "odd" } else { "even" })
    }
}
