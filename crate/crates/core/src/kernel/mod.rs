//! Exact graded polynomial algebra over jet coordinates.
//!
//! One supercommutative algebra carries both the jet scalars and the
//! differential-form generators `dx^i`, `δφ^a_I`. Every generator has a form
//! degree and a Grassmann parity, and swapping two homogeneous elements costs
//! `(-1)^{|a||b| + ã b̃}`. A generator with odd `form degree + parity` squares
//! to zero; the others (even jets, contact forms of odd fields) commute with
//! themselves and may carry powers.

mod index;
mod poly;
mod spectrum;

pub use index::MultiIndex;
pub use poly::{Grade, Monomial, Poly};
pub use spectrum::{FieldSpec, Grading, Parity, Role, Spectrum, SpectrumError};

/// Jet coordinate `φ^a_I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    /// Field component id, in declaration order.
    pub comp: u32,
    pub idx: MultiIndex,
    /// Grassmann parity of the field, cached so products need no context.
    pub odd: bool,
}

impl JetVar {
    pub fn new(comp: u32, idx: MultiIndex, odd: bool) -> Self {
        JetVar { comp, idx, odd }
    }

    pub fn prolonged(&self, dir: u8) -> Self {
        JetVar {
            comp: self.comp,
            idx: self.idx.with(dir),
            odd: self.odd,
        }
    }
}

/// Generators of the algebra, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    /// Symbolic parameter (an even constant, like a coupling or level).
    Param(u16),
    /// Base coordinate `x^i`.
    Coord(u8),
    Jet(JetVar),
    /// Horizontal generator `dx^i`.
    Dx(u8),
    /// Contact form `δφ^a_I`.
    Delta(JetVar),
}

impl Gen {
    pub fn form_degree(&self) -> u32 {
        matches!(self, Gen::Dx(_) | Gen::Delta(_)) as u32
    }

    pub fn is_odd(&self) -> bool {
        match self {
            Gen::Jet(v) | Gen::Delta(v) => v.odd,
            _ => false,
        }
    }

    /// `g·g = 0`.
    pub fn is_nilpotent(&self) -> bool {
        (self.form_degree() + self.is_odd() as u32) % 2 == 1
    }

    pub fn jet_var(&self) -> Option<&JetVar> {
        match self {
            Gen::Jet(v) | Gen::Delta(v) => Some(v),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests;
