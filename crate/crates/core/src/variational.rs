//! Exactness machinery of the variational bicomplex.
//!
//! Euler–Lagrange derivatives, the source/boundary split of `(1,top)` forms,
//! the horizontal homotopy in positive vertical degree, divergence inversion
//! and equality modulo `d`. Every operation takes a [`Frame`] so the same
//! code serves the covariant complex and the spatial complex of a foliation.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::coeff::Coeff;
use crate::forms::{base_interior, contract, d, Frame};
use crate::kernel::{Gen, JetVar, Monomial, MultiIndex, Poly};
use crate::EvoField;

mod blocks;

pub use blocks::{coordinate_degree, d_primitive, horizontal_homotopy, ModD};

/// Default bound on the jet order any operation may reach.
pub const DEFAULT_JET_ORDER_CAP: usize = 8;

static JET_ORDER_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_JET_ORDER_CAP);

/// Sets the process-wide jet-order bound.
pub fn set_jet_order_cap(cap: usize) {
    JET_ORDER_CAP.store(cap, Ordering::Relaxed);
}

pub fn jet_order_cap() -> usize {
    JET_ORDER_CAP.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VariationalError<T: std::fmt::Debug> {
    #[error("expected bidegree {expected:?}, found {found:?}")]
    Degree {
        expected: (u32, u32),
        found: Option<(u32, u32)>,
    },
    #[error("form is not a total divergence: {} nonzero Euler-Lagrange derivatives", .0.len())]
    NotADivergence(BTreeMap<JetVar, Poly<T>>),
    #[error("field-independent part is not removable by a local primitive")]
    Obstruction(Poly<T>),
    #[error("vertical degree 0 is not supported by the horizontal homotopy")]
    UnsupportedDegree,
    #[error("jet order {order} exceeds the cap {cap}")]
    JetOrderCap { order: usize, cap: usize },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type VResult<T, V> = Result<V, VariationalError<T>>;

pub(crate) fn check_order<T: Coeff>(a: &Poly<T>, extra: usize) -> VResult<T, ()> {
    let order = a.max_jet_order() + extra;
    let cap = jet_order_cap();
    if order > cap {
        return Err(VariationalError::JetOrderCap { order, cap });
    }
    Ok(())
}

fn expect_bidegree<T: Coeff>(a: &Poly<T>, expected: (u32, u32)) -> VResult<T, ()> {
    if a.is_zero() {
        return Ok(());
    }
    let found = a.bidegree();
    if found != Some(expected) {
        return Err(VariationalError::Degree { expected, found });
    }
    Ok(())
}

/// The part of a jet variable's index lying outside the frame.
///
/// Variables that differ only by frame derivatives are one "species" of the
/// frame's variational calculus.
pub fn species(v: &JetVar, frame: &Frame) -> JetVar {
    let (_, rest) = v.idx.split(frame.dirs());
    JetVar::new(v.comp, rest, v.odd)
}

fn frame_part(v: &JetVar, frame: &Frame) -> MultiIndex {
    v.idx.split(frame.dirs()).0
}

/// Coefficient of the frame volume, when every term carries exactly it.
pub fn strip_volume<T: Coeff>(a: &Poly<T>, frame: &Frame) -> Option<Poly<T>> {
    let vol: Poly<T> = frame.volume();
    let (vm, _) = vol.leading()?;
    let vset: Vec<&Gen> = vm.factors().iter().map(|(g, _)| g).collect();
    let mut out = Poly::zero();
    for (m, c) in a.terms() {
        let dx: Vec<&Gen> = m.factors().iter().filter(|(g, _)| matches!(g, Gen::Dx(_))).map(|(g, _)| g).collect();
        if dx != vset {
            return None;
        }
        let rest: Vec<(Gen, u32)> = m.factors().iter().filter(|(g, _)| !matches!(g, Gen::Dx(_))).cloned().collect();
        // dx generators sort after every scalar generator but before the
        // contact forms, so moving them to the right costs a sign per δ.
        let deltas: u32 = rest.iter().filter(|(g, _)| matches!(g, Gen::Delta(_))).map(|(_, k)| k).sum();
        let sign = (deltas * vset.len() as u32) % 2 == 1;
        let c = if sign { -c.clone() } else { c.clone() };
        out.add_term(Monomial::from_sorted(rest), c);
    }
    Some(out)
}

/// Euler–Lagrange derivatives `δλ/δφ = (−∂)_I ∂_l λ/∂φ_I` of a top form,
/// keyed by species. Coefficients are returned without the volume factor.
pub fn el_derivative<T: Coeff>(lambda: &Poly<T>, frame: &Frame) -> VResult<T, BTreeMap<JetVar, Poly<T>>> {
    expect_bidegree(lambda, (0, frame.top()))?;
    check_order(lambda, 0)?;
    let f = strip_volume(lambda, frame).ok_or_else(|| VariationalError::Degree {
        expected: (0, frame.top()),
        found: lambda.bidegree(),
    })?;
    let mut out: BTreeMap<JetVar, Poly<T>> = BTreeMap::new();
    for g in f.generators() {
        let Gen::Jet(v) = &g else { continue };
        let mut term = f.left_derivative(&g);
        let fp = frame_part(v, frame);
        term = term.total_derivative_multi(&fp);
        if fp.order() % 2 == 1 {
            term = -term;
        }
        out.entry(species(v, frame)).or_default().add_assign(&term);
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Split of a `(1,top)` form into `source + d(boundary)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceSplit<T> {
    pub source: Poly<T>,
    pub boundary: Poly<T>,
}

/// Integrates by parts, highest derivative first, until only
/// undifferentiated (in the frame) contact forms remain.
pub fn source_decompose<T: Coeff>(alpha: &Poly<T>, frame: &Frame) -> VResult<T, SourceSplit<T>> {
    expect_bidegree(alpha, (1, frame.top()))?;
    check_order(alpha, 0)?;
    let mut rest = alpha.clone();
    let mut boundary = Poly::zero();
    loop {
        // highest frame order among the contact generators still present
        let pick = rest
            .generators()
            .into_iter()
            .filter_map(|g| match g {
                Gen::Delta(v) => {
                    let fp = frame_part(&v, frame);
                    (!fp.is_empty()).then_some((fp.order(), v))
                }
                _ => None,
            })
            .max_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let Some((_, v)) = pick else { break };
        let gen = Gen::Delta(v.clone());
        let g = rest.left_derivative(&gen);
        let dv = Poly::delta(v.clone());
        let piece = dv.mul(&g);
        rest = &rest - &piece;
        let j = *frame_part(&v, frame).entries().last().expect("frame index");
        let lower = JetVar::new(v.comp, v.idx.without(j).expect("present"), v.odd);
        let dl = Poly::delta(lower);
        // δφ_{Ij}∧g = ∂_j(δφ_I∧g) − δφ_I∧∂_j g, and ∂_j h = d(ι_j h) at top degree
        boundary.add_assign(&base_interior(&dl.mul(&g), j));
        rest.add_assign(&-dl.mul(&g.total_derivative(j)));
    }
    Ok(SourceSplit { source: rest, boundary })
}

/// Euler field `Φ = φ^a ∂/∂φ^a` over the components occurring in `a`.
pub fn euler_field<T: Coeff>(a: &Poly<T>) -> EvoField<T> {
    let mut x = EvoField::zero(false);
    for g in a.generators() {
        if let Gen::Jet(v) | Gen::Delta(v) = g {
            x.set(v.comp, Poly::jet(JetVar::new(v.comp, MultiIndex::empty(), v.odd)));
        }
    }
    x
}

/// Terms without any jet variable.
pub fn field_free_part<T: Coeff>(a: &Poly<T>) -> Poly<T> {
    a.filter(|m| !m.factors().iter().any(|(g, _)| matches!(g, Gen::Jet(_) | Gen::Delta(_))))
}

/// Returns `σ` with `dσ = f` for a top form with vanishing Euler–Lagrange
/// derivatives and no field-free part.
///
/// Each jet-degree component `f_N` gives `δf_N = d b_N` with `b_N` the
/// boundary of its source split, and contracting with the Euler field turns
/// this into `N f_N = −d(i_Φ b_N)`.
pub fn divergence_primitive<T: Coeff>(f: &Poly<T>, frame: &Frame) -> VResult<T, Poly<T>> {
    expect_bidegree(f, (0, frame.top()))?;
    check_order(f, 1)?;
    if f.is_zero() {
        return Ok(Poly::zero());
    }
    let el = el_derivative(f, frame)?;
    if !el.is_empty() {
        return Err(VariationalError::NotADivergence(el));
    }
    let free = field_free_part(f);
    if !free.is_zero() {
        return Err(VariationalError::Obstruction(free));
    }
    let mut sigma = Poly::zero();
    for (n, part) in f.split_by(|m| m.jet_degree()) {
        let split = source_decompose(&crate::forms::delta(&part), frame)?;
        let phi = euler_field(&part);
        let s = -(T::one() / T::from_i64(n as i64));
        sigma.add_scaled(&contract(&phi, &split.boundary), &s);
    }
    if d(&sigma, frame) != *f {
        return Err(VariationalError::Internal("divergence primitive does not reproduce its input".into()));
    }
    Ok(sigma)
}

/// Whether `a − b ∈ dΛ`.
pub fn equiv_mod_d<T: Coeff>(a: &Poly<T>, b: &Poly<T>, frame: &Frame) -> VResult<T, bool> {
    let diff = a - b;
    if diff.is_zero() {
        return Ok(true);
    }
    let (da, db) = (a.bidegree(), b.bidegree());
    if !a.is_zero() && !b.is_zero() && da != db {
        return Err(VariationalError::Degree {
            expected: da.unwrap_or((0, 0)),
            found: db,
        });
    }
    let Some((q, p)) = diff.bidegree() else {
        return Err(VariationalError::Degree {
            expected: da.or(db).unwrap_or((0, 0)),
            found: None,
        });
    };
    if q == 0 && p == frame.top() {
        let el = el_derivative(&diff, frame)?;
        return Ok(el.is_empty() && field_free_part(&diff).is_zero());
    }
    if p == 0 {
        return Ok(false);
    }
    if p < frame.top() && !d(&diff, frame).is_zero() {
        return Ok(false);
    }
    Ok(d_primitive(&diff, frame)?.is_some())
}

#[cfg(test)]
mod tests;
