//! Momentum and polyvector degrees, formal diffeomorphisms `h = e^X` of the
//! jet space, homogenization of descendent structures and derived brackets.
//!
//! Pullbacks act as `h* = e^{L_X}`. A homogenizer of `ω₁` is an even field
//! `X` of positive degree with `h*(ω₁) ≃ ω₁⁽¹⁾`; the polyvector Euler field
//! is then `E_p = e^{−ad X} E_m`, so that `L_{E_p} = e^{−L_X} L_{E_m} e^{L_X}`.

use std::collections::{BTreeMap, BTreeSet};

use crate::coeff::Coeff;
use crate::forms::{commutator, exp_series, lie, EvoField, Frame};
use crate::kernel::{Gen, Grading, JetVar, Monomial, MultiIndex, Poly, Spectrum};
use crate::linsolve::Span;
use crate::symplectic::{bracket, PresympStructure, SymplecticError};
use crate::variational::{coordinate_degree, equiv_mod_d, ModD, VariationalError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GradingError<T: std::fmt::Debug> {
    #[error(transparent)]
    Symplectic(#[from] SymplecticError<T>),
    #[error(transparent)]
    Variational(#[from] VariationalError<T>),
    #[error("exponential series did not terminate within {order} terms")]
    Truncation { order: usize },
    #[error("generator does not raise the degree: {0}")]
    NotRaising(String),
    #[error("no homogenizer found with jet order <= {jet_order} and polynomial degree <= {degree}")]
    NotFound { jet_order: usize, degree: usize, residual: Poly<T> },
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
}

pub type GResult<T, V> = Result<V, GradingError<T>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EulerKind {
    Momentum,
    Polyvector,
}

/// A formal diffeomorphism `h = e^X` generated by an even evolutionary field.
#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyDiffeo<T: Coeff> {
    x: EvoField<T>,
    order: usize,
}

impl<T: Coeff> HomotopyDiffeo<T> {
    /// `order` bounds the number of terms of every exponential series.
    pub fn new(x: EvoField<T>, order: usize) -> GResult<T, Self> {
        if x.is_odd() {
            return Err(GradingError::Degree("the generator of e^X must be even".into()));
        }
        Ok(HomotopyDiffeo { x, order })
    }

    pub fn identity() -> Self {
        HomotopyDiffeo { x: EvoField::zero(false), order: 0 }
    }

    pub fn generator(&self) -> &EvoField<T> {
        &self.x
    }

    pub fn truncation(&self) -> usize {
        self.order
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero()
    }

    pub fn inverse(&self) -> Self {
        HomotopyDiffeo { x: self.x.scale(&-T::one()), order: self.order }
    }

    /// `h*(a) = Σ L_X^k a / k!`.
    pub fn pullback(&self, a: &Poly<T>) -> GResult<T, Poly<T>> {
        if self.x.is_zero() {
            return Ok(a.clone());
        }
        exp_series(a, self.order, |t| lie(&self.x, t)).ok_or(GradingError::Truncation { order: self.order })
    }

    /// Checks `Deg X > 0` against a momentum-type Euler field.
    pub fn check_raising(&self, euler: &EulerField<T>) -> GResult<T, ()> {
        for (u, v) in self.x.sources() {
            let target = euler.weight(*u);
            for (m, _) in v.terms() {
                if euler.monomial_degree(m) <= target {
                    return Err(GradingError::NotRaising(format!("component {u} has a term {m:?}")));
                }
            }
        }
        Ok(())
    }
}

fn odd_comps(sp: &Spectrum) -> BTreeSet<u32> {
    (0..sp.fields.len() as u32).filter(|c| sp.field(*c).parity.is_odd()).collect()
}

/// Euler field measuring momentum degree, or polyvector degree once
/// conjugated by a homogenizer.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerField<T: Coeff> {
    kind: EulerKind,
    weights: BTreeMap<u32, i64>,
    odd: BTreeSet<u32>,
    conjugator: Option<HomotopyDiffeo<T>>,
}

impl<T: Coeff> EulerField<T> {
    /// `E_m`, counting the components with nonzero momentum degree.
    pub fn momentum(sp: &Spectrum) -> Self {
        let weights = sp
            .fields
            .iter()
            .enumerate()
            .filter(|(_, f)| f.momentum != 0)
            .map(|(i, f)| (i as u32, f.momentum as i64))
            .collect();
        EulerField { kind: EulerKind::Momentum, weights, odd: odd_comps(sp), conjugator: None }
    }

    /// Momentum-type field with weight one on each listed component.
    pub fn counting(sp: &Spectrum, comps: impl IntoIterator<Item = u32>) -> Self {
        EulerField {
            kind: EulerKind::Momentum,
            weights: comps.into_iter().map(|c| (c, 1)).collect(),
            odd: odd_comps(sp),
            conjugator: None,
        }
    }

    /// `E_p = e^{−ad X} E_m` for the homogenizer `h = e^X`.
    pub fn polyvector(momentum: &EulerField<T>, h: HomotopyDiffeo<T>) -> Self {
        EulerField {
            kind: EulerKind::Polyvector,
            weights: momentum.weights.clone(),
            odd: momentum.odd.clone(),
            conjugator: Some(h),
        }
    }

    pub fn kind(&self) -> EulerKind {
        self.kind
    }

    pub fn weight(&self, comp: u32) -> i64 {
        self.weights.get(&comp).copied().unwrap_or(0)
    }

    /// Momentum degree of a monomial (jets and contact forms both count).
    pub fn monomial_degree(&self, m: &Monomial) -> i64 {
        m.factors()
            .iter()
            .map(|(g, k)| match g {
                Gen::Jet(v) | Gen::Delta(v) => self.weight(v.comp) * *k as i64,
                _ => 0,
            })
            .sum()
    }

    fn split_momentum(&self, a: &Poly<T>) -> BTreeMap<i64, Poly<T>> {
        a.split_by(|m| self.monomial_degree(m))
    }

    /// Homogeneous components `(k, a_k)` with `L_E a_k = k a_k`, in
    /// increasing `k`; zero components are omitted.
    pub fn degree_split(&self, a: &Poly<T>) -> GResult<T, Vec<(i64, Poly<T>)>> {
        match &self.conjugator {
            None => Ok(self.split_momentum(a).into_iter().collect()),
            Some(h) => {
                let inv = h.inverse();
                let mut out = Vec::new();
                for (k, part) in self.split_momentum(&h.pullback(a)?) {
                    let back = inv.pullback(&part)?;
                    if !back.is_zero() {
                        out.push((k, back));
                    }
                }
                Ok(out)
            }
        }
    }

    /// The degree of a homogeneous form; `None` for mixed forms. Zero has
    /// every degree and reports `Some(0)`.
    pub fn degree(&self, a: &Poly<T>) -> GResult<T, Option<i64>> {
        let parts = self.degree_split(a)?;
        Ok(match parts.as_slice() {
            [] => Some(0),
            [(k, _)] => Some(*k),
            _ => None,
        })
    }

    /// `L_E a`.
    pub fn lie(&self, a: &Poly<T>) -> GResult<T, Poly<T>> {
        let mut out = Poly::zero();
        for (k, part) in self.degree_split(a)? {
            out.add_scaled(&part, &T::from_i64(k));
        }
        Ok(out)
    }

    /// The Euler field as an evolutionary field.
    ///
    /// For the polyvector kind this sums `e^{−ad X} E_m` and fails when the
    /// series does not stop within the homogenizer's truncation order.
    pub fn field(&self) -> GResult<T, EvoField<T>> {
        let mut e = EvoField::zero(false);
        for (c, w) in &self.weights {
            let v = JetVar { comp: *c, idx: MultiIndex::empty(), odd: self.odd.contains(c) };
            e.set(*c, Poly::jet(v).scale(&T::from_i64(*w)));
        }
        let Some(h) = &self.conjugator else { return Ok(e) };
        let x = h.generator().scale(&-T::one());
        let mut out = e.clone();
        let mut term = e;
        for k in 1..=h.truncation() + 1 {
            term = commutator(&x, &term).scale(&(T::one() / T::from_i64(k as i64)));
            if term.is_zero() {
                return Ok(out);
            }
            out = out.add(&term);
        }
        Err(GradingError::Truncation { order: h.truncation() })
    }
}

/// Search bounds for [`find_homogenizer`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomogenizerBounds {
    /// Highest derivative order of ansatz monomials.
    pub jet_order: usize,
    /// Highest number of factors (jets and parameters) per ansatz monomial.
    pub degree: usize,
    /// Truncation order of the exponential series.
    pub truncation: usize,
}

impl Default for HomogenizerBounds {
    fn default() -> Self {
        HomogenizerBounds { jet_order: 2, degree: 3, truncation: 16 }
    }
}

/// A verified homogenizer: `h*(ω₁) = pulled ≃ leading = ω₁⁽¹⁾`.
#[derive(Clone, Debug, PartialEq)]
pub struct Homogenizer<T: Coeff> {
    pub diffeo: HomotopyDiffeo<T>,
    pub leading: Poly<T>,
    pub pulled: Poly<T>,
    pub polyvector: EulerField<T>,
}

struct Ansatz<T> {
    comp: u32,
    value: Poly<T>,
}

/// Monomials in `vars` with between one and `degree` factors; odd factors
/// occur at most once.
fn monomials<T: Coeff>(vars: &[(Poly<T>, bool)], degree: usize) -> Vec<Poly<T>> {
    fn rec<T: Coeff>(
        vars: &[(Poly<T>, bool)],
        start: usize,
        left: usize,
        cur: &Poly<T>,
        out: &mut Vec<Poly<T>>,
    ) {
        if left == 0 {
            return;
        }
        for i in start..vars.len() {
            let (v, odd) = &vars[i];
            let next = cur.mul(v);
            if next.is_zero() {
                continue;
            }
            out.push(next.clone());
            rec(vars, if *odd { i + 1 } else { i }, left - 1, &next, out);
        }
    }
    let mut out = Vec::new();
    rec(vars, 0, degree, &Poly::one(), &mut out);
    out
}

/// Finds `h = e^X` with `h*(ω₁) ≃ ω₁⁽¹⁾` degree by degree.
///
/// At step `j` the degree `j+1` part of the current pullback is cancelled
/// modulo `d` by `L_{X_j} ω₁⁽¹⁾`, with `X_j` an undetermined combination
/// of monomials of degree `j` above their target component. Unused
/// directions are set to zero, so the result is deterministic. A failure
/// only means that the bounded ansatz has no solution.
pub fn find_homogenizer<T: Coeff>(
    omega1: &Poly<T>,
    momentum: &EulerField<T>,
    sp: &Spectrum,
    frame: &Frame,
    bounds: HomogenizerBounds,
) -> GResult<T, Homogenizer<T>> {
    let parts = momentum.degree_split(omega1)?;
    if let Some((k, _)) = parts.iter().find(|(k, _)| *k < 1) {
        return Err(GradingError::Degree(format!("ω₁ has a component of degree {k}")));
    }
    let leading = parts.iter().find(|(k, _)| *k == 1).map(|(_, p)| p.clone()).unwrap_or_default();
    if leading.is_zero() {
        return Err(GradingError::Degree("the degree-one part of ω₁ vanishes".into()));
    }
    let top_degree = parts.last().map(|(k, _)| *k).unwrap_or(1);
    let xmax = coordinate_degree(omega1, frame);
    let mut nf = ModD::new(frame, xmax);

    let comps: BTreeSet<u32> = omega1
        .generators()
        .into_iter()
        .filter_map(|g| match g {
            Gen::Jet(v) | Gen::Delta(v) => Some(v.comp),
            _ => None,
        })
        .collect();
    let mut vars: Vec<(Poly<T>, bool)> = (0..sp.params.len() as u16).map(|p| (Poly::param(p), false)).collect();
    for &c in &comps {
        for o in 0..=bounds.jet_order {
            for idx in MultiIndex::all_of_order(frame.dirs(), o) {
                let v = sp.jet(c, idx);
                let odd = v.odd;
                vars.push((Poly::jet(v), odd));
            }
        }
    }
    let mut pool = monomials(&vars, bounds.degree);
    pool.sort_by_key(|p| p.terms().next().map(|(m, _)| m.factors().iter().map(|(_, k)| *k).sum::<u32>()).unwrap_or(0));

    let mut x = EvoField::zero(false);
    let mut h = HomotopyDiffeo::new(x.clone(), bounds.truncation)?;
    let mut pulled = omega1.clone();
    for j in 1..=top_degree.max(1) + bounds.degree as i64 {
        let higher: Poly<T> = momentum
            .split_momentum(&pulled)
            .into_iter()
            .filter(|(k, _)| *k > 1)
            .fold(Poly::zero(), |acc, (_, p)| &acc + &p);
        if nf.normal_form(&higher)?.is_zero() {
            let polyvector = EulerField::polyvector(momentum, h.clone());
            if !equiv_mod_d(&pulled, &leading, frame)? {
                return Err(GradingError::Variational(VariationalError::Internal(
                    "homogenizer certificate failed".into(),
                )));
            }
            return Ok(Homogenizer { diffeo: h, leading, pulled, polyvector });
        }
        let target = momentum.split_momentum(&pulled).remove(&(j + 1)).unwrap_or_default();
        let target = nf.normal_form(&target)?;
        if target.is_zero() {
            continue;
        }
        let mut cols = Vec::new();
        let mut ansatz = Vec::new();
        for &u in &comps {
            let f = sp.field(u);
            let want = momentum.weight(u) + j;
            for m in &pool {
                let Some((mono, _)) = m.terms().next() else { continue };
                if momentum.monomial_degree(mono) != want
                    || mono.grade(sp, Grading::Ghost) != f.ghost as i64
                    || (mono.grade(sp, Grading::Parity) % 2 == 1) != f.parity.is_odd()
                {
                    continue;
                }
                let xu = EvoField::from_sources(false, [(u, m.clone())]);
                let col = nf.normal_form(&lie(&xu, &leading))?;
                if col.is_zero() {
                    continue;
                }
                cols.push(col);
                ansatz.push(Ansatz { comp: u, value: m.clone() });
            }
        }
        let span = Span::from_columns(cols.iter());
        let Some(sol) = span.solve(&-target.clone()) else {
            return Err(GradingError::NotFound {
                jet_order: bounds.jet_order,
                degree: bounds.degree,
                residual: span.split_full(&-target).1,
            });
        };
        for (k, c) in sol {
            let a = &ansatz[k];
            let cur = x.source(a.comp);
            x.set(a.comp, &cur + &a.value.scale(&c));
        }
        h = HomotopyDiffeo::new(x.clone(), bounds.truncation)?;
        pulled = h.pullback(omega1)?;
    }
    let residual = momentum
        .split_momentum(&pulled)
        .into_iter()
        .filter(|(k, _)| *k > 1)
        .fold(Poly::zero(), |acc, (_, p)| &acc + &p);
    Err(GradingError::NotFound { jet_order: bounds.jet_order, degree: bounds.degree, residual })
}

/// Nested bracket `{…{{gen, a₁}, a₂}…, aₙ}` with the bracket of `st`.
///
/// Every argument must have degree zero and the generator degree `n` for
/// the given Euler field.
pub fn derived_bracket<T: Coeff>(
    generator: &Poly<T>,
    args: &[Poly<T>],
    euler: &EulerField<T>,
    st: &PresympStructure<T>,
) -> GResult<T, Poly<T>> {
    for (i, a) in args.iter().enumerate() {
        match euler.degree(a)? {
            Some(0) => {}
            other => return Err(GradingError::Arity(format!("argument {i} has degree {other:?}, expected 0"))),
        }
    }
    match euler.degree(generator)? {
        Some(k) if k == args.len() as i64 || generator.is_zero() => {}
        other => {
            return Err(GradingError::Arity(format!(
                "generator of degree {other:?} used with {} arguments",
                args.len()
            )))
        }
    }
    let mut acc = generator.clone();
    for a in args {
        acc = bracket(&acc, a, st)?;
    }
    Ok(acc)
}
