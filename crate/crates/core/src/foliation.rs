//! Reduction to the leaves of a coordinate foliation `x^A = const`.
//!
//! A foliation context removes every term carrying a time-direction `dx^A`
//! and rewrites jets with time derivatives through declared rules, so that
//! what remains lives in the spatial jet algebra over the spatial frame.
//! Brackets and Hamiltonian fields on leaves reuse the symplectic machinery
//! on that frame.

use std::collections::BTreeMap;

use crate::coeff::Coeff;
use crate::forms::{delta, EvoField, Frame};
use crate::kernel::{Gen, JetVar, MultiIndex, Poly, Spectrum};
use crate::symplectic::{bracket, intrinsic_field, PresympStructure, SymplecticError};
use crate::variational::equiv_mod_d;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FoliationError<T: std::fmt::Debug> {
    #[error(transparent)]
    Symplectic(#[from] SymplecticError<T>),
    #[error("no phase-space image for {}", .0.join(", "))]
    IncompletePhaseMap(Vec<String>),
    #[error("substitution for {0} does not respect gradings")]
    Grading(String),
    #[error("reduced master equation fails: (Σ,Σ) is not d-exact")]
    MasterViolated(Poly<T>),
}

pub type FResult<T, V> = Result<V, FoliationError<T>>;

/// A flat foliation with its phase-space substitution.
#[derive(Clone, Debug, PartialEq)]
pub struct FoliationContext<T> {
    sp: Spectrum,
    time: Vec<u8>,
    spatial: Frame,
    /// Images of `u_T` for purely temporal multi-indices `T`.
    rules: BTreeMap<(u32, MultiIndex), Poly<T>>,
}

impl<T: Coeff> FoliationContext<T> {
    /// Leaves `x^A = const` for the listed time directions.
    pub fn new(sp: &Spectrum, time: &[u8]) -> Self {
        FoliationContext {
            sp: sp.clone(),
            time: time.to_vec(),
            spatial: Frame::spatial(sp.dim, time),
            rules: BTreeMap::new(),
        }
    }

    /// Declares the image of `∂_T u` for a purely temporal index `T`
    /// (the empty index renames `u` itself). Spatial derivatives of the
    /// left side map to spatial total derivatives of the image.
    pub fn with_rule(mut self, comp: u32, time_idx: MultiIndex, image: Poly<T>) -> FResult<T, Self> {
        let label = self.label(&JetVar { comp, idx: time_idx.clone(), odd: false });
        if time_idx.entries().iter().any(|e| !self.time.contains(e)) {
            return Err(FoliationError::Grading(format!("{label} (index is not purely temporal)")));
        }
        let odd = self.sp.field(comp).parity.is_odd();
        if !image.is_zero() && (image.bidegree() != Some((0, 0)) || image.parity() != Some(odd)) {
            return Err(FoliationError::Grading(label));
        }
        if image
            .generators()
            .iter()
            .any(|g| matches!(g, Gen::Jet(v) if v.idx.entries().iter().any(|e| self.time.contains(e))))
        {
            return Err(FoliationError::Grading(format!("{label} (image has time derivatives)")));
        }
        self.rules.insert((comp, time_idx), image);
        Ok(self)
    }

    pub fn spatial_frame(&self) -> &Frame {
        &self.spatial
    }

    pub fn time_directions(&self) -> &[u8] {
        &self.time
    }

    fn label(&self, v: &JetVar) -> String {
        self.sp.gen_name(&Gen::Jet(v.clone()))
    }

    fn image(&self, v: &JetVar) -> Option<Poly<T>> {
        let (t, s) = v.idx.split(&self.time);
        let base = match self.rules.get(&(v.comp, t.clone())) {
            Some(p) => p.clone(),
            None if t.is_empty() => Poly::jet(JetVar { comp: v.comp, idx: MultiIndex::empty(), odd: v.odd }),
            None => return None,
        };
        let mut out = base;
        for &j in s.entries() {
            out = out.total_derivative(j);
        }
        Some(out)
    }

    /// Drops time-direction `dx` terms and substitutes the survivors.
    pub fn reduce(&self, a: &Poly<T>) -> FResult<T, Poly<T>> {
        let mut out = Poly::zero();
        let mut missing = Vec::new();
        for (m, c) in a.terms() {
            if m.factors().iter().any(|(g, _)| matches!(g, Gen::Dx(i) if self.time.contains(i))) {
                continue;
            }
            let mut term = Poly::constant(c.clone());
            for (g, k) in m.factors() {
                let img = match g {
                    Gen::Jet(v) => self.image(v),
                    Gen::Delta(v) => self.image(v).map(|p| delta(&p)),
                    other => Some(Poly::gen(other.clone())),
                };
                let Some(img) = img else {
                    if let Gen::Jet(v) | Gen::Delta(v) = g {
                        missing.push(self.label(v));
                    }
                    continue;
                };
                for _ in 0..*k {
                    term = term.mul(&img);
                }
            }
            out.add_assign(&term);
        }
        if !missing.is_empty() {
            missing.sort();
            missing.dedup();
            return Err(FoliationError::IncompletePhaseMap(missing));
        }
        Ok(out)
    }

    /// The reduced structure on the leaves, with the same labels.
    pub fn reduce_structure(&self, st: &PresympStructure<T>) -> FResult<T, PresympStructure<T>> {
        let omega = self.reduce(&st.omega)?;
        let mut r = PresympStructure::new(omega, self.spatial.clone())?;
        r.odd = st.odd;
        r.ghost = st.ghost;
        r.degree = st.degree;
        r.bar = st.bar.clone();
        Ok(r)
    }

    /// Charge density `reduce(J)`, with `(Σ,Σ) ≃ 0` re-verified on leaves
    /// when a reduced structure is supplied.
    pub fn charge_density(&self, j: &Poly<T>, reduced: Option<&PresympStructure<T>>) -> FResult<T, Poly<T>> {
        let j0 = self.reduce(j)?;
        if let Some(st) = reduced {
            let jj = f_bracket(&j0, &j0, st)?;
            if !equiv_mod_d(&jj, &Poly::zero(), &st.frame).map_err(SymplecticError::from)? {
                return Err(FoliationError::MasterViolated(jj));
            }
        }
        Ok(j0)
    }
}

/// Spatially prolonged field `X` with `i_X ω₁ ≃ δA` on leaves.
pub fn f_hamiltonian_field<T: Coeff>(a: &Poly<T>, reduced: &PresympStructure<T>) -> FResult<T, EvoField<T>> {
    Ok(intrinsic_field(a, reduced)?)
}

/// Bracket of F-Hamiltonian forms on leaves.
pub fn f_bracket<T: Coeff>(a: &Poly<T>, b: &Poly<T>, reduced: &PresympStructure<T>) -> FResult<T, Poly<T>> {
    Ok(bracket(a, b, reduced)?)
}
