//! Gauge systems `(Q, ω)`: canonical structures, Hamiltonian fields, the
//! bracket of Hamiltonian forms, the master equation and the descent chain.
//!
//! With `X_A` the intrinsic field of `A` (`i_{X_A} ω ≃ δA`) the bracket is
//! `{A,B} = −i_{X_A} i_{X_B} ω`, so that `{A,B} ≃ −L_{X_A} B` and
//! `{A,B} + (−1)^{X̃_A X̃_B}{B,A} = 0` holds exactly. Descendants are
//! oriented by `dω₁ = −L_Q ω`, which makes `θ₁` the negative of the
//! boundary term of `δH` and gives `dH₁ = −½{H,H}`.

use std::collections::{BTreeMap, BTreeSet};

use crate::coeff::{sign, Coeff};
use crate::forms::{contract, delta, lie, EvoField, Frame};
use crate::kernel::{Gen, JetVar, Monomial, Poly, Role, Spectrum};
use crate::variational::{
    d_primitive, divergence_primitive, equiv_mod_d, horizontal_homotopy, source_decompose, species, strip_volume,
    VariationalError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymplecticError<T: std::fmt::Debug> {
    #[error(transparent)]
    Variational(#[from] VariationalError<T>),
    #[error("structure is degenerate along {0}")]
    Degenerate(String),
    #[error("structure is not a constant pairing of undifferentiated contact forms: {0}")]
    NotCanonical(String),
    #[error("field {0} has no conjugate partner")]
    Unpaired(String),
    #[error("grading mismatch: {0}")]
    Grading(String),
    #[error("master equation violated: {} nonzero Euler-Lagrange derivatives", .0.len())]
    MasterViolated(BTreeMap<JetVar, Poly<T>>),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type SResult<T, V> = Result<V, SymplecticError<T>>;

/// Which canonical structure to build from a field content.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureKind {
    /// `δΦ̄_A∧δΦ^A∧dⁿx` pairing fields with their sources.
    EvenCotangent,
    /// `δΦ*_A∧δΦ^A∧dⁿx` pairing fields with BV antifields.
    OddBv,
    /// The same pairing on an odd phase space of a leaf.
    OddPhase,
}

/// A presymplectic `(2,m)` form with its labels and the frame it lives on.
#[derive(Clone, Debug, PartialEq)]
pub struct PresympStructure<T> {
    pub omega: Poly<T>,
    pub theta: Option<Poly<T>>,
    pub frame: Frame,
    pub odd: bool,
    pub ghost: i64,
    pub degree: i64,
    /// Components written first in each pair `δΦ̄∧δΦ` (sources, antifields
    /// or declared momenta).
    pub bar: BTreeSet<u32>,
}

impl<T: Coeff> PresympStructure<T> {
    /// Wraps a form; parity is read off the form itself.
    pub fn new(omega: Poly<T>, frame: Frame) -> SResult<T, Self> {
        let m = frame.top();
        if !omega.is_zero() && omega.bidegree() != Some((2, m)) {
            return Err(VariationalError::Degree {
                expected: (2, m),
                found: omega.bidegree(),
            }
            .into());
        }
        let odd = omega
            .parity()
            .ok_or_else(|| SymplecticError::Grading("structure has mixed parity".into()))?;
        Ok(PresympStructure {
            omega,
            theta: None,
            frame,
            odd,
            ghost: 0,
            degree: 1,
            bar: BTreeSet::new(),
        })
    }

    /// Structure `ω = δθ` with its potential.
    pub fn from_potential(theta: Poly<T>, frame: Frame) -> SResult<T, Self> {
        let mut s = Self::new(delta(&theta), frame)?;
        s.theta = Some(theta);
        Ok(s)
    }

    pub fn with_bar(mut self, bar: impl IntoIterator<Item = u32>) -> Self {
        self.bar = bar.into_iter().collect();
        self
    }

    pub fn with_labels(mut self, ghost: i64, degree: i64) -> Self {
        self.ghost = ghost;
        self.degree = degree;
        self
    }

    /// `δω = 0`, and `δθ = ω` when a potential is stored.
    pub fn is_consistent(&self) -> bool {
        delta(&self.omega).is_zero() && self.theta.as_ref().is_none_or(|t| delta(t) == self.omega)
    }
}

/// The canonical structure pairing every field with its declared conjugate.
///
/// `weight` gives the constant coefficient of each pair, keyed by the
/// conjugate (source or antifield) component; it carries metric factors for
/// tensor indices or an invariant form for algebra indices.
pub fn canonical_structure<T: Coeff>(
    sp: &Spectrum,
    kind: StructureKind,
    frame: &Frame,
    weight: impl Fn(u32) -> T,
) -> SResult<T, PresympStructure<T>> {
    let conj_role = match kind {
        StructureKind::EvenCotangent => Role::Source,
        StructureKind::OddBv | StructureKind::OddPhase => Role::Antifield,
    };
    let mut theta = Poly::zero();
    let mut paired = vec![false; sp.fields.len()];
    for (i, f) in sp.fields.iter().enumerate() {
        if f.role != conj_role {
            continue;
        }
        let c = f.conj.ok_or_else(|| SymplecticError::Unpaired(f.label()))?;
        paired[c as usize] = true;
        let bar = Poly::jet(sp.jet(i as u32, Default::default()));
        let dphi = Poly::delta(sp.jet(c, Default::default()));
        theta.add_assign(&bar.mul(&dphi).scale(&weight(i as u32)));
    }
    for (i, f) in sp.fields.iter().enumerate() {
        if matches!(f.role, Role::Field | Role::FormValued) && !paired[i] {
            return Err(SymplecticError::Unpaired(f.label()));
        }
    }
    if theta.is_zero() {
        return Err(SymplecticError::Degenerate("every direction (empty spectrum)".into()));
    }
    let theta = theta.mul(&frame.volume());
    let (ghost, odd) = match kind {
        StructureKind::EvenCotangent => (0, false),
        StructureKind::OddBv => (-1, true),
        StructureKind::OddPhase => (1, true),
    };
    let mut s = PresympStructure::from_potential(theta, frame.clone())?;
    if s.odd != odd {
        return Err(SymplecticError::Grading(format!("{kind:?} structure came out with the wrong parity")));
    }
    s.ghost = ghost;
    s.bar = sp
        .fields
        .iter()
        .enumerate()
        .filter(|(_, f)| f.role == conj_role)
        .map(|(i, _)| i as u32)
        .collect();
    Ok(s)
}

/// One entry `c·δu∧δv∧vol` of a constant pairing.
struct Pair<T> {
    u: JetVar,
    v: JetVar,
    c: Poly<T>,
}

fn pairs<T: Coeff>(st: &PresympStructure<T>) -> SResult<T, Vec<Pair<T>>> {
    let body = strip_volume(&st.omega, &st.frame)
        .ok_or_else(|| SymplecticError::NotCanonical("terms without the full volume".into()))?;
    let mut out = Vec::new();
    for (m, c) in body.terms() {
        let mut coeff = Vec::new();
        let mut ds = Vec::new();
        for (g, k) in m.factors() {
            match g {
                Gen::Delta(v) => {
                    if species(v, &st.frame) != *v {
                        return Err(SymplecticError::NotCanonical(format!("differentiated contact form {v:?}")));
                    }
                    for _ in 0..*k {
                        ds.push(v.clone());
                    }
                }
                Gen::Param(_) => coeff.push((g.clone(), *k)),
                _ => return Err(SymplecticError::NotCanonical(format!("field-dependent coefficient {g:?}"))),
            }
        }
        if ds.len() != 2 {
            return Err(SymplecticError::NotCanonical("term is not a pairing".into()));
        }
        out.push(Pair {
            u: ds[0].clone(),
            v: ds[1].clone(),
            c: Poly::term(Monomial::from_sorted(coeff), c.clone()),
        });
    }
    Ok(out)
}

fn is_unit<T: Coeff>(p: &Poly<T>) -> Option<T> {
    match p.leading() {
        Some((m, c)) if p.len() == 1 && m.is_one() => Some(c.clone()),
        _ => None,
    }
}

/// Linear map `X ↦ source part of i_X ω` as a matrix over field-free
/// constants: `rows[v][u]` multiplies `X^u` in the coefficient of `δv`.
fn contraction_matrix<T: Coeff>(ps: &[Pair<T>], x_odd: bool) -> BTreeMap<JetVar, BTreeMap<JetVar, Poly<T>>> {
    let mut rows: BTreeMap<JetVar, BTreeMap<JetVar, Poly<T>>> = BTreeMap::new();
    for p in ps {
        // i_X(δu∧δv) = X^u δv − (−1)^{X̃ũ} δu X^v, then move X^u to the right of δv
        let s1: T = sign((p.u.odd ^ x_odd) && p.v.odd);
        let s2: T = -sign::<T>(x_odd && p.u.odd);
        rows.entry(p.v.clone()).or_default().entry(p.u.clone()).or_default().add_scaled(&p.c, &s1);
        rows.entry(p.u.clone()).or_default().entry(p.v.clone()).or_default().add_scaled(&p.c, &s2);
    }
    for r in rows.values_mut() {
        r.retain(|_, v| !v.is_zero());
    }
    rows
}

/// Solves `M X = E` by elimination with unit pivots. Free unknowns are set
/// to zero; an inconsistent row reports the direction it belongs to.
fn solve_pairing<T: Coeff>(
    mut rows: BTreeMap<JetVar, BTreeMap<JetVar, Poly<T>>>,
    mut rhs: BTreeMap<JetVar, Poly<T>>,
) -> SResult<T, BTreeMap<JetVar, Poly<T>>> {
    for k in rhs.keys() {
        if !rows.contains_key(k) {
            return Err(SymplecticError::Degenerate(format!("{k:?}")));
        }
    }
    let mut order: Vec<JetVar> = rows.keys().cloned().collect();
    let mut pivots: Vec<(JetVar, JetVar)> = Vec::new();
    while let Some(pos) = order.iter().position(|r| rows[r].values().any(|e| is_unit(e).is_some())) {
        let r = order.remove(pos);
        let (col, piv) = rows[&r]
            .iter()
            .find_map(|(c, e)| is_unit(e).map(|u| (c.clone(), u)))
            .expect("unit entry present");
        let inv = T::one() / piv;
        let prow: BTreeMap<JetVar, Poly<T>> = rows[&r].iter().map(|(c, e)| (c.clone(), e.scale(&inv))).collect();
        let prhs = rhs.get(&r).cloned().unwrap_or_default().scale(&inv);
        for o in rows.keys().cloned().collect::<Vec<_>>() {
            if o == r {
                continue;
            }
            let Some(f) = rows[&o].get(&col).cloned() else { continue };
            let row = rows.get_mut(&o).expect("row");
            for (c, e) in &prow {
                let entry = row.entry(c.clone()).or_default();
                *entry = &*entry - &f.mul(e);
            }
            row.retain(|_, v| !v.is_zero());
            let cur = rhs.get(&o).cloned().unwrap_or_default();
            rhs.insert(o, &cur - &f.mul(&prhs));
        }
        rows.insert(r.clone(), prow);
        rhs.insert(r.clone(), prhs);
        pivots.push((r, col));
    }
    for r in &order {
        if !rows[r].is_empty() {
            return Err(SymplecticError::NotCanonical(format!("no unit pivot for {r:?}")));
        }
        if rhs.get(r).is_some_and(|v| !v.is_zero()) {
            return Err(SymplecticError::Degenerate(format!("{r:?}")));
        }
    }
    let mut x: BTreeMap<JetVar, Poly<T>> = BTreeMap::new();
    for (r, col) in pivots.iter().rev() {
        let mut val = rhs.get(r).cloned().unwrap_or_default();
        for (c, e) in &rows[r] {
            if c != col {
                if let Some(xc) = x.get(c) {
                    val = &val - &e.mul(xc);
                }
            }
        }
        x.insert(col.clone(), val);
    }
    x.retain(|_, v| !v.is_zero());
    Ok(x)
}

/// Evolutionary `X` with `i_X ω ≃ δO` in the bigraded calculus.
pub fn intrinsic_field<T: Coeff>(o: &Poly<T>, st: &PresympStructure<T>) -> SResult<T, EvoField<T>> {
    if o.is_zero() {
        return Ok(EvoField::zero(st.odd));
    }
    let o_odd = o
        .parity()
        .ok_or_else(|| SymplecticError::Grading("Hamiltonian form has mixed parity".into()))?;
    let x_odd = o_odd ^ st.odd;
    let split = source_decompose(&delta(o), &st.frame)?;
    let src = strip_volume(&split.source, &st.frame).unwrap_or_default();
    let mut rhs: BTreeMap<JetVar, Poly<T>> = BTreeMap::new();
    for (m, c) in src.terms() {
        let (g, _) = m.factors().last().expect("source term carries a contact form");
        let Gen::Delta(v) = g else {
            return Err(SymplecticError::Internal("source term without a contact form".into()));
        };
        let rest = Poly::term(m.clone(), c.clone());
        // δv·e: peel the single contact factor off the left
        let e = rest.left_derivative(g);
        rhs.entry(v.clone()).or_default().add_assign(&e);
    }
    rhs.retain(|_, v| !v.is_zero());
    let ps = pairs(st)?;
    let sol = solve_pairing(contraction_matrix(&ps, x_odd), rhs)?;
    let mut x = EvoField::zero(x_odd);
    for (v, val) in sol {
        x.set(v.comp, val);
    }
    let check = &contract(&x, &st.omega) - &split.source;
    if !source_decompose(&check, &st.frame)?.source.is_zero() {
        return Err(SymplecticError::Internal("Hamiltonian field does not reproduce δO".into()));
    }
    Ok(x)
}

/// The Hamiltonian field of `O` in the convention where the contraction
/// passes a contact form at the cost of `−1` whatever its parity.
///
/// It differs from [`intrinsic_field`] by `(−1)^{X̃ Φ̄̃ (1+Φ̃)}` on the second
/// member `Φ` of every pair `δΦ̄∧δΦ`. This is the form in which BRST
/// differentials are usually written down, e.g. `A_μ ↦ ∂_μC` for Maxwell.
pub fn hamiltonian_field<T: Coeff>(o: &Poly<T>, st: &PresympStructure<T>) -> SResult<T, EvoField<T>> {
    let x = intrinsic_field(o, st)?;
    Ok(to_literal(&x, st))
}

/// Switches a field between the intrinsic and the literal convention (the
/// map is an involution).
pub fn to_literal<T: Coeff>(x: &EvoField<T>, st: &PresympStructure<T>) -> EvoField<T> {
    if !x.is_odd() {
        return x.clone();
    }
    let Ok(ps) = pairs(st) else { return x.clone() };
    let mut out = x.clone();
    for p in ps {
        let (bar, phi) = match (st.bar.contains(&p.u.comp), st.bar.contains(&p.v.comp)) {
            (true, false) => (&p.u, &p.v),
            (false, true) => (&p.v, &p.u),
            _ => continue,
        };
        if bar.odd && !phi.odd {
            out.set(phi.comp, -x.source(phi.comp));
        }
    }
    out
}

/// `−i_X i_Y ω`, the bracket of two forms whose fields are already known.
pub fn bracket_of_fields<T: Coeff>(x: &EvoField<T>, y: &EvoField<T>, omega: &Poly<T>) -> Poly<T> {
    -contract(x, &contract(y, omega))
}

/// `{A,B} = −i_{X_A} i_{X_B} ω`.
pub fn bracket<T: Coeff>(a: &Poly<T>, b: &Poly<T>, st: &PresympStructure<T>) -> SResult<T, Poly<T>> {
    let xa = intrinsic_field(a, st)?;
    let xb = intrinsic_field(b, st)?;
    Ok(bracket_of_fields(&xa, &xb, &st.omega))
}

/// Result of a master-equation check.
#[derive(Clone, Debug, PartialEq)]
pub struct MasterCheck<T: Coeff> {
    pub ok: bool,
    /// `Σ` with `dΣ = −½{O,O}`, when one exists.
    pub sigma: Option<Poly<T>>,
    /// Euler-Lagrange derivatives of `{O,O}` when it is not a divergence.
    pub residual: BTreeMap<JetVar, Poly<T>>,
    pub q: EvoField<T>,
}

pub fn check_master<T: Coeff>(o: &Poly<T>, st: &PresympStructure<T>) -> SResult<T, MasterCheck<T>> {
    let q = intrinsic_field(o, st)?;
    let oo = bracket_of_fields(&q, &q, &st.omega);
    let half = -(T::one() / T::from_i64(2));
    match divergence_primitive(&oo.scale(&half), &st.frame) {
        Ok(sigma) => Ok(MasterCheck {
            ok: true,
            sigma: Some(sigma),
            residual: BTreeMap::new(),
            q,
        }),
        Err(VariationalError::NotADivergence(res)) => Ok(MasterCheck {
            ok: false,
            sigma: None,
            residual: res,
            q,
        }),
        Err(VariationalError::Obstruction(free)) => Ok(MasterCheck {
            ok: false,
            sigma: None,
            residual: BTreeMap::from([(JetVar::new(u32::MAX, Default::default(), false), free)]),
            q,
        }),
        Err(e) => Err(e.into()),
    }
}

/// A gauge system `(Q, ω)` with a Hamiltonian `H` of `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeSystem<T: Coeff> {
    /// Intrinsic Hamiltonian field, see [`intrinsic_field`].
    pub q: EvoField<T>,
    pub omega: PresympStructure<T>,
    pub h: Poly<T>,
}

impl<T: Coeff> GaugeSystem<T> {
    /// Builds `(Q, ω, O)` with `Q` the Hamiltonian field of `O`.
    pub fn from_hamiltonian(o: Poly<T>, omega: PresympStructure<T>) -> SResult<T, Self> {
        let q = intrinsic_field(&o, &omega)?;
        Ok(GaugeSystem { q, omega, h: o })
    }

    /// `[Q,Q] = 0` exactly.
    pub fn is_homological(&self) -> bool {
        crate::forms::commutator(&self.q, &self.q).is_zero()
    }

    /// `L_Q ω ≃ 0` and `i_Q ω ≃ δH`.
    pub fn check(&self) -> SResult<T, bool> {
        let f = &self.omega.frame;
        let lq = lie(&self.q, &self.omega.omega);
        let a = equiv_mod_d(&lq, &Poly::zero(), f)?;
        let b = equiv_mod_d(&contract(&self.q, &self.omega.omega), &delta(&self.h), f)?;
        Ok(a && b)
    }

    /// `{H,H}` computed with the known field.
    pub fn self_bracket(&self) -> Poly<T> {
        bracket_of_fields(&self.q, &self.q, &self.omega.omega)
    }
}

/// How the descendant structure was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescentRoute {
    /// Potential read off the boundary term of `δH`.
    Potential,
    /// Horizontal homotopy applied to `L_Q ω`.
    Homotopy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Descent<T: Coeff> {
    pub system: GaugeSystem<T>,
    pub route: DescentRoute,
    /// Whether the two routes were both available and agreed mod `d`.
    pub cross_checked: bool,
}

fn lower_frame_structure<T: Coeff>(omega: Poly<T>, st: &PresympStructure<T>, theta: Option<Poly<T>>) -> PresympStructure<T> {
    PresympStructure {
        omega,
        theta,
        frame: st.frame.clone(),
        odd: !st.odd,
        ghost: st.ghost + 1,
        degree: st.degree + 1,
        bar: st.bar.clone(),
    }
}

/// Passes from `(Q, ω, H)` to `(Q, ω₁, H₁)` with `dω₁ = −L_Q ω`,
/// `i_Q ω₁ ≃ δH₁` and `dH₁ = −½{H,H}`.
pub fn descend<T: Coeff>(sys: &GaugeSystem<T>) -> SResult<T, Descent<T>> {
    let f = &sys.omega.frame;
    let lq = lie(&sys.q, &sys.omega.omega);
    let homotopy = if lq.is_zero() { Poly::zero() } else { -horizontal_homotopy(&lq, f)? };
    if crate::forms::d(&homotopy, f) != -lq {
        return Err(SymplecticError::Internal("L_Q ω is not d-exact".into()));
    }
    let canonical = pairs(&sys.omega).is_ok() && !sys.h.is_zero();
    let (omega1, theta1, route, cross) = if canonical {
        let b = source_decompose(&delta(&sys.h), f)?.boundary;
        let theta1 = -b;
        let omega1 = delta(&theta1);
        let agree = equiv_mod_d(&omega1, &homotopy, f)?;
        if !agree {
            return Err(SymplecticError::Internal("descent routes disagree".into()));
        }
        (omega1, Some(theta1), DescentRoute::Potential, true)
    } else {
        (homotopy, None, DescentRoute::Homotopy, false)
    };
    let half = -(T::one() / T::from_i64(2));
    let hh = sys.self_bracket().scale(&half);
    let h1 = if hh.is_zero() || hh.bidegree() == Some((0, f.top())) {
        divergence_primitive(&hh, f)?
    } else {
        d_primitive(&hh, f)?.ok_or_else(|| SymplecticError::Internal("{H,H} is not d-exact".into()))?
    };
    let next = GaugeSystem {
        q: sys.q.clone(),
        omega: lower_frame_structure(omega1, &sys.omega, theta1),
        h: h1,
    };
    let lhs = contract(&next.q, &next.omega.omega);
    if !equiv_mod_d(&lhs, &delta(&next.h), f)? {
        return Err(SymplecticError::Internal("i_Q ω₁ is not δH₁ modulo d".into()));
    }
    Ok(Descent {
        system: next,
        route,
        cross_checked: cross,
    })
}

/// The BRST current `J = H₁` of a system passing the master equation.
pub fn brst_current<T: Coeff>(sys: &GaugeSystem<T>) -> SResult<T, Poly<T>> {
    Ok(descend(sys)?.system.h)
}

/// Whether `(S, Γ) ≃ 0`, i.e. `Γ` generates an evolution preserving `S`.
pub fn verify_evolution_generator<T: Coeff>(s: &Poly<T>, gamma: &Poly<T>, st: &PresympStructure<T>) -> SResult<T, bool> {
    if gamma.is_zero() {
        return Ok(true);
    }
    if gamma.parity() != Some(true) {
        return Err(SymplecticError::Grading("the evolution generator must be odd".into()));
    }
    let b = bracket(s, gamma, st)?;
    Ok(equiv_mod_d(&b, &Poly::zero(), &st.frame)?)
}

#[cfg(test)]
mod tests;
