//! Cartan calculus on bigraded local forms.
//!
//! A form is a [`Poly`] whose monomials may contain `dx^i` (horizontal) and
//! `δφ^a_I` (vertical) generators. Operators are graded derivations built
//! from their action on single generators via [`Poly::derive`].

use std::collections::BTreeMap;
use std::sync::RwLock;

use crate::coeff::{sign, Coeff};
use crate::kernel::{Gen, JetVar, MultiIndex, Poly};

/// Directions the horizontal differential runs over.
///
/// The covariant frame uses every base direction; a foliated (spatial) frame
/// drops the time directions, which realizes the quotient by the foliation
/// ideal for constant-coefficient foliations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    dirs: Vec<u8>,
}

impl Frame {
    pub fn covariant(dim: usize) -> Self {
        Frame { dirs: (0..dim as u8).collect() }
    }

    pub fn spatial(dim: usize, time: &[u8]) -> Self {
        Frame {
            dirs: (0..dim as u8).filter(|d| !time.contains(d)).collect(),
        }
    }

    pub fn from_dirs(mut dirs: Vec<u8>) -> Self {
        dirs.sort_unstable();
        dirs.dedup();
        Frame { dirs }
    }

    pub fn dirs(&self) -> &[u8] {
        &self.dirs
    }

    /// Top horizontal degree inside the frame.
    pub fn top(&self) -> u32 {
        self.dirs.len() as u32
    }

    pub fn contains(&self, dir: u8) -> bool {
        self.dirs.contains(&dir)
    }

    /// `dx^{d0}∧…∧dx^{dk}` over the frame's directions.
    pub fn volume<T: Coeff>(&self) -> Poly<T> {
        Poly::volume(&self.dirs)
    }
}

/// Horizontal differential `d = dx^j ∧ ∂_j` over the frame.
pub fn d<T: Coeff>(a: &Poly<T>, frame: &Frame) -> Poly<T> {
    let mut out = Poly::zero();
    for &j in frame.dirs() {
        let dj = a.total_derivative(j);
        if !dj.is_zero() {
            out.add_assign(&Poly::dx(j).mul(&dj));
        }
    }
    out
}

/// Vertical differential `δ = δφ^a_I ∧ ∂_l/∂φ^a_I`.
pub fn delta<T: Coeff>(a: &Poly<T>) -> Poly<T> {
    a.derive(true, false, |g| match g {
        Gen::Jet(v) => Some(Poly::delta(v.clone())),
        _ => None,
    })
}

pub fn wedge<T: Coeff>(a: &Poly<T>, b: &Poly<T>) -> Poly<T> {
    a.mul(b)
}

/// Interior product with `∂/∂x^j` acting on the `dx` generators only.
pub fn base_interior<T: Coeff>(a: &Poly<T>, j: u8) -> Poly<T> {
    a.derive(true, false, |g| (*g == Gen::Dx(j)).then(Poly::one))
}

/// Evolutionary vector field `X = ∂_I X^a ∂/∂φ^a_I` given by its sources.
///
/// Prolonged components are filled lazily into an internal cache that is
/// safe to share between threads.
#[derive(Debug)]
pub struct EvoField<T> {
    sources: BTreeMap<u32, Poly<T>>,
    odd: bool,
    cache: RwLock<BTreeMap<(u32, MultiIndex), Poly<T>>>,
}

impl<T: Coeff> Clone for EvoField<T> {
    fn clone(&self) -> Self {
        EvoField {
            sources: self.sources.clone(),
            odd: self.odd,
            cache: RwLock::new(self.cache.read().map(|c| c.clone()).unwrap_or_default()),
        }
    }
}

impl<T: Coeff> PartialEq for EvoField<T> {
    fn eq(&self, other: &Self) -> bool {
        self.odd == other.odd && self.sources == other.sources
    }
}

impl<T: Coeff> EvoField<T> {
    pub fn zero(odd: bool) -> Self {
        EvoField {
            sources: BTreeMap::new(),
            odd,
            cache: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn from_sources(odd: bool, sources: impl IntoIterator<Item = (u32, Poly<T>)>) -> Self {
        let mut x = EvoField::zero(odd);
        for (a, s) in sources {
            x.set(a, s);
        }
        x
    }

    pub fn set(&mut self, comp: u32, value: Poly<T>) {
        self.cache.get_mut().map(|c| c.clear()).ok();
        if value.is_zero() {
            self.sources.remove(&comp);
        } else {
            self.sources.insert(comp, value);
        }
    }

    /// Grassmann parity `X̃`.
    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn is_zero(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn sources(&self) -> &BTreeMap<u32, Poly<T>> {
        &self.sources
    }

    pub fn source(&self, comp: u32) -> Poly<T> {
        self.sources.get(&comp).cloned().unwrap_or_default()
    }

    /// `X^a_I = ∂_I X^a`.
    pub fn prolonged(&self, comp: u32, idx: &MultiIndex) -> Poly<T> {
        let Some(src) = self.sources.get(&comp) else {
            return Poly::zero();
        };
        if idx.is_empty() {
            return src.clone();
        }
        let key = (comp, idx.clone());
        if let Some(v) = self.cache.read().ok().and_then(|c| c.get(&key).cloned()) {
            return v;
        }
        let last = *idx.entries().last().expect("nonempty index");
        let parent = idx.without(last).expect("entry present");
        let value = self.prolonged(comp, &parent).total_derivative(last);
        if let Ok(mut c) = self.cache.write() {
            c.entry(key).or_insert_with(|| value.clone());
        }
        value
    }

    pub fn scale(&self, s: &T) -> Self {
        EvoField::from_sources(self.odd, self.sources.iter().map(|(a, v)| (*a, v.scale(s))))
    }

    pub fn add(&self, other: &EvoField<T>) -> Self {
        let mut out = self.clone();
        for (a, v) in &other.sources {
            let cur = out.source(*a);
            out.set(*a, &cur + v);
        }
        out
    }

    pub fn sub(&self, other: &EvoField<T>) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    /// Action on a scalar (a jet polynomial without form generators).
    pub fn apply(&self, f: &Poly<T>) -> Poly<T> {
        lie(self, f)
    }
}

/// Contraction `i_X`: form degree −1, Grassmann parity `X̃`,
/// `i_X δφ^a_I = X^a_I`, `i_X dx^j = 0`.
pub fn contract<T: Coeff>(x: &EvoField<T>, a: &Poly<T>) -> Poly<T> {
    a.derive(true, x.odd, |g| match g {
        Gen::Delta(v) => Some(x.prolonged(v.comp, &v.idx)),
        _ => None,
    })
}

/// Lie derivative `L_X = i_X δ + δ i_X` for evolutionary `X`.
///
/// With form degree and parity kept as separate gradings, `i_X` and `δ`
/// always anticommute past each other in form degree, so no parity sign
/// appears in the Cartan formula.
pub fn lie<T: Coeff>(x: &EvoField<T>, a: &Poly<T>) -> Poly<T> {
    a.derive(false, x.odd, |g| match g {
        Gen::Jet(v) => Some(x.prolonged(v.comp, &v.idx)),
        Gen::Delta(v) => Some(delta(&x.prolonged(v.comp, &v.idx))),
        _ => None,
    })
}

/// Graded commutator `[X,Y]^a = X(Y^a) − (−1)^{X̃Ỹ} Y(X^a)`.
pub fn commutator<T: Coeff>(x: &EvoField<T>, y: &EvoField<T>) -> EvoField<T> {
    let odd = x.odd ^ y.odd;
    let s: T = sign(x.odd && y.odd);
    let mut comps: Vec<u32> = x.sources.keys().chain(y.sources.keys()).copied().collect();
    comps.sort_unstable();
    comps.dedup();
    EvoField::from_sources(
        odd,
        comps.into_iter().map(|a| {
            let mut v = lie(x, &y.source(a));
            v.add_scaled(&lie(y, &x.source(a)), &-s.clone());
            (a, v)
        }),
    )
}

/// General vertical field with independently given jet components.
///
/// Only contraction is supported; no prolongation consistency is assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct VertField<T> {
    comps: BTreeMap<JetVar, Poly<T>>,
    odd: bool,
}

impl<T: Coeff> VertField<T> {
    pub fn new(odd: bool) -> Self {
        VertField { comps: BTreeMap::new(), odd }
    }

    pub fn set(&mut self, v: JetVar, value: Poly<T>) {
        if value.is_zero() {
            self.comps.remove(&v);
        } else {
            self.comps.insert(v, value);
        }
    }

    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn contract(&self, a: &Poly<T>) -> Poly<T> {
        a.derive(true, self.odd, |g| match g {
            Gen::Delta(v) => self.comps.get(v).cloned(),
            _ => None,
        })
    }
}

/// Exponential series `Σ L^k a / k!` of a nilpotent operator.
///
/// Returns `None` when the series has not terminated after `max_order` terms.
pub fn exp_series<T: Coeff>(a: &Poly<T>, max_order: usize, op: impl Fn(&Poly<T>) -> Poly<T>) -> Option<Poly<T>> {
    let mut out = a.clone();
    let mut term = a.clone();
    for k in 1..=max_order + 1 {
        term = op(&term).scale(&(T::one() / T::from_i64(k as i64)));
        if term.is_zero() {
            return Some(out);
        }
        if k > max_order {
            return None;
        }
        out.add_assign(&term);
    }
    None
}
