use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Gen, Grading, JetVar, MultiIndex, Spectrum};
use crate::coeff::{sign, Coeff};

/// Product of generators with powers, sorted by generator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Gen, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn gen(g: Gen) -> Self {
        Monomial(vec![(g, 1)])
    }

    pub fn factors(&self) -> &[(Gen, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Builds a monomial from already sorted, valid factors.
    pub(crate) fn from_sorted(v: Vec<(Gen, u32)>) -> Self {
        Monomial(v)
    }

    fn degrees(&self) -> (u32, u32) {
        let mut f = 0;
        let mut p = 0;
        for (g, k) in &self.0 {
            f += g.form_degree() * k;
            p += g.is_odd() as u32 * k;
        }
        (f, p)
    }

    /// (form degree, parity) of the monomial.
    pub fn bigrade(&self) -> (u32, bool) {
        let (f, p) = self.degrees();
        (f, p % 2 == 1)
    }

    /// (vertical degree q, horizontal degree p).
    pub fn bidegree(&self) -> (u32, u32) {
        let mut q = 0;
        let mut p = 0;
        for (g, k) in &self.0 {
            match g {
                Gen::Dx(_) => p += k,
                Gen::Delta(_) => q += k,
                _ => {}
            }
        }
        (q, p)
    }

    pub fn power_of(&self, g: &Gen) -> u32 {
        self.0.iter().find(|(h, _)| h == g).map_or(0, |(_, k)| *k)
    }

    /// Canonical product; `None` when a nilpotent generator repeats.
    /// The boolean is the Koszul sign picked up by reordering.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        if other.0.is_empty() {
            return Some((self.clone(), false));
        }
        if self.0.is_empty() {
            return Some((other.clone(), false));
        }
        // suffix sums of (form, parity) weights of self
        let n = self.0.len();
        let mut suf_f = vec![0u32; n + 1];
        let mut suf_p = vec![0u32; n + 1];
        for i in (0..n).rev() {
            let (g, k) = &self.0[i];
            suf_f[i] = suf_f[i + 1] + g.form_degree() * k;
            suf_p[i] = suf_p[i + 1] + g.is_odd() as u32 * k;
        }
        let mut out = Vec::with_capacity(n + other.0.len());
        let mut neg = false;
        let mut i = 0;
        for (h, b) in &other.0 {
            while i < n && self.0[i].0 < *h {
                out.push(self.0[i].clone());
                i += 1;
            }
            let hf = h.form_degree() * b;
            let hp = h.is_odd() as u32 * b;
            if i < n && self.0[i].0 == *h {
                if h.is_nilpotent() {
                    return None;
                }
                let w = hf * suf_f[i + 1] + hp * suf_p[i + 1];
                neg ^= w % 2 == 1;
                out.push((h.clone(), self.0[i].1 + b));
                i += 1;
            } else {
                let w = hf * suf_f[i] + hp * suf_p[i];
                neg ^= w % 2 == 1;
                out.push((h.clone(), *b));
            }
        }
        out.extend(self.0[i..].iter().cloned());
        Some((Monomial(out), neg))
    }

    pub fn max_jet_order(&self) -> usize {
        self.0
            .iter()
            .filter_map(|(g, _)| g.jet_var().map(|v| v.idx.order()))
            .max()
            .unwrap_or(0)
    }

    /// Number of undifferentiated-or-not jet factors (not contact forms).
    pub fn jet_degree(&self) -> u32 {
        self.0.iter().filter(|(g, _)| matches!(g, Gen::Jet(_))).map(|(_, k)| k).sum()
    }

    pub fn grade(&self, sp: &Spectrum, grading: Grading) -> i64 {
        self.0.iter().map(|(g, k)| sp.gen_grade(g, grading) * *k as i64).sum()
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (g, p)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{g:?}")?;
            if *p > 1 {
                write!(f, "^{p}")?;
            }
        }
        Ok(())
    }
}

/// Result of measuring a grading on a polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grade {
    Homogeneous(i64),
    Inhomogeneous,
}

/// Exact polynomial over the graded generators. Zero has no terms.
///
/// Jet scalars (`GradedScalar`) and bigraded local forms (`LocalForm`) are
/// both values of this type; the aliases at the crate root name the role.
#[derive(Clone, PartialEq)]
pub struct Poly<T> {
    terms: BTreeMap<Monomial, T>,
}

impl<T: Coeff> Default for Poly<T> {
    fn default() -> Self {
        Poly::zero()
    }
}

impl<T: Coeff> Poly<T> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Poly::term(Monomial::one(), c)
    }

    pub fn int(v: i64) -> Self {
        Poly::constant(T::from_i64(v))
    }

    pub fn term(m: Monomial, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn gen(g: Gen) -> Self {
        Poly::term(Monomial::gen(g), T::one())
    }

    pub fn coord(i: u8) -> Self {
        Poly::gen(Gen::Coord(i))
    }

    pub fn dx(i: u8) -> Self {
        Poly::gen(Gen::Dx(i))
    }

    pub fn param(p: u16) -> Self {
        Poly::gen(Gen::Param(p))
    }

    pub fn jet(v: JetVar) -> Self {
        Poly::gen(Gen::Jet(v))
    }

    pub fn delta(v: JetVar) -> Self {
        Poly::gen(Gen::Delta(v))
    }

    /// `dx^{d0} ∧ dx^{d1} ∧ …` in the given order.
    pub fn volume(dirs: &[u8]) -> Self {
        dirs.iter().fold(Poly::one(), |acc, &d| acc.mul(&Poly::dx(d)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &T)> + ExactSizeIterator {
        self.terms.iter()
    }

    /// Largest monomial in the canonical order, with its coefficient.
    pub fn leading(&self) -> Option<(&Monomial, &T)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, T)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_assign(&mut self, other: &Poly<T>) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Poly<T>, s: &T) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone() * s.clone());
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.clone() * s.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Poly<T>) -> Self {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((m, neg)) = m1.mul(m2) {
                    let c = c1.clone() * c2.clone();
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    pub fn mul_monomial_left(&self, m1: &Monomial) -> Self {
        let mut out = Poly::zero();
        for (m2, c) in &self.terms {
            if let Some((m, neg)) = m1.mul(m2) {
                out.add_term(m, if neg { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    /// Keeps the terms accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Self {
        Poly {
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Re-canonicalizes after mapping each monomial's coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&T) -> T) -> Self {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Common bidegree `(q, p)` of all terms; `None` if mixed or zero.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys().map(|m| m.bidegree());
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// Total Grassmann parity, when homogeneous.
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(|m| m.bigrade().1);
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn max_jet_order(&self) -> usize {
        self.terms.keys().map(|m| m.max_jet_order()).max().unwrap_or(0)
    }

    pub fn grade_of(&self, sp: &Spectrum, grading: Grading) -> Grade {
        let mut it = self.terms.keys().map(|m| {
            let g = m.grade(sp, grading);
            if grading == Grading::Parity {
                g.rem_euclid(2)
            } else {
                g
            }
        });
        let Some(first) = it.next() else {
            return Grade::Homogeneous(0);
        };
        if it.all(|g| g == first) {
            Grade::Homogeneous(first)
        } else {
            Grade::Inhomogeneous
        }
    }

    /// Splits by the value of `key` on each monomial.
    pub fn split_by<K: Ord>(&self, key: impl Fn(&Monomial) -> K) -> BTreeMap<K, Poly<T>> {
        let mut out: BTreeMap<K, Poly<T>> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(key(m)).or_default().add_term(m.clone(), c.clone());
        }
        out
    }

    /// Applies a derivation of form degree `op_form` (mod 2) and parity
    /// `op_odd` whose action on single generators is `image`.
    ///
    /// Passing a generator `g` costs `(-1)^{op_form·|g| + op_odd·g̃}`.
    pub fn derive(&self, op_form: bool, op_odd: bool, mut image: impl FnMut(&Gen) -> Option<Poly<T>>) -> Self {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let fs = m.factors();
            let mut prefix = Monomial::one();
            let mut pf = 0u32;
            let mut pp = 0u32;
            for (k, (g, pow)) in fs.iter().enumerate() {
                let img = image(g);
                if let Some(img) = img.filter(|p| !p.is_zero()) {
                    let rest = Monomial::from_sorted(fs[k + 1..].to_vec());
                    for t in 0..*pow {
                        // prefix · g^t · D(g) · g^{pow-1-t} · rest
                        let mut left = prefix.clone();
                        let mut lf = pf;
                        let mut lp = pp;
                        if t > 0 {
                            let gt = Monomial::from_sorted(vec![(g.clone(), t)]);
                            let Some((l, neg)) = left.mul(&gt) else { continue };
                            debug_assert!(!neg);
                            left = l;
                            lf += g.form_degree() * t;
                            lp += g.is_odd() as u32 * t;
                        }
                        let s = (op_form as u32 * lf + op_odd as u32 * lp) % 2 == 1;
                        let right = if pow - 1 - t > 0 {
                            let gr = Monomial::from_sorted(vec![(g.clone(), pow - 1 - t)]);
                            match gr.mul(&rest) {
                                Some((r, neg)) => {
                                    debug_assert!(!neg);
                                    r
                                }
                                None => continue,
                            }
                        } else {
                            rest.clone()
                        };
                        let mid = img.mul_monomial_left(&left);
                        let right_p = Poly::term(right, T::one());
                        let piece = mid.mul(&right_p);
                        let cc: T = c.clone() * sign::<T>(s);
                        out.add_scaled(&piece, &cc);
                    }
                }
                let (Some((np, neg)), true) = (prefix.mul(&Monomial::from_sorted(vec![(g.clone(), *pow)])), true) else {
                    break;
                };
                debug_assert!(!neg);
                prefix = np;
                pf += g.form_degree() * pow;
                pp += g.is_odd() as u32 * pow;
            }
        }
        out
    }

    /// Total derivative `∂_i`, extended to contact forms by `∂_i δφ_I = δφ_{Ii}`.
    pub fn total_derivative(&self, dir: u8) -> Self {
        self.derive(false, false, |g| match g {
            Gen::Coord(i) if *i == dir => Some(Poly::one()),
            Gen::Jet(v) => Some(Poly::gen(Gen::Jet(v.prolonged(dir)))),
            Gen::Delta(v) => Some(Poly::gen(Gen::Delta(v.prolonged(dir)))),
            _ => None,
        })
    }

    /// `∂_I` applied in order.
    pub fn total_derivative_multi(&self, idx: &MultiIndex) -> Self {
        idx.entries().iter().fold(self.clone(), |acc, &d| acc.total_derivative(d))
    }

    /// Left derivative with respect to a generator.
    pub fn left_derivative(&self, g: &Gen) -> Self {
        self.derive(g.form_degree() % 2 == 1, g.is_odd(), |h| (h == g).then(Poly::one))
    }

    /// Generators that occur anywhere in the polynomial.
    pub fn generators(&self) -> std::collections::BTreeSet<Gen> {
        self.terms.keys().flat_map(|m| m.factors().iter().map(|(g, _)| g.clone())).collect()
    }

    /// Replaces generators by polynomials (an algebra morphism preserving
    /// form degree and parity of each generator).
    pub fn substitute(&self, mut image: impl FnMut(&Gen) -> Option<Poly<T>>) -> Self {
        let mut cache: BTreeMap<Gen, Option<Poly<T>>> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(c.clone());
            for (g, pow) in m.factors() {
                let img = cache.entry(g.clone()).or_insert_with(|| image(g)).clone();
                let base = img.unwrap_or_else(|| Poly::gen(g.clone()));
                for _ in 0..*pow {
                    acc = acc.mul(&base);
                }
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign(&acc);
        }
        out
    }

    pub fn render(&self, sp: &Spectrum) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = coeff_text(c);
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = m
                .factors()
                .iter()
                .map(|(g, p)| {
                    let n = sp.gen_name(g);
                    if *p > 1 {
                        format!("{n}^{p}")
                    } else {
                        n
                    }
                })
                .collect();
            match (mag.as_str(), mono.is_empty()) {
                ("1", true) => s.push('1'),
                ("1", false) => s.push_str(&mono.join("*")),
                (_, true) => s.push_str(&mag),
                (_, false) => {
                    s.push_str(&mag);
                    s.push('*');
                    s.push_str(&mono.join("*"));
                }
            }
        }
        s
    }
}

fn coeff_text<T: Coeff>(c: &T) -> (bool, String) {
    let t = format!("{c}");
    match t.strip_prefix('-') {
        Some(r) => (true, r.to_string()),
        None => (false, t),
    }
}

impl<T: fmt::Debug> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})*{m:?}")?;
        }
        Ok(())
    }
}

impl<T: Coeff> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl<T: Coeff> Add for Poly<T> {
    type Output = Poly<T>;
    fn add(mut self, rhs: Poly<T>) -> Poly<T> {
        self.add_assign(&rhs);
        self
    }
}

impl<T: Coeff> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let mut out = self.clone();
        out.add_scaled(rhs, &-T::one());
        out
    }
}

impl<T: Coeff> Sub for Poly<T> {
    type Output = Poly<T>;
    fn sub(mut self, rhs: Poly<T>) -> Poly<T> {
        self.add_scaled(&rhs, &-T::one());
        self
    }
}

impl<T: Coeff> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        self.scale(&-T::one())
    }
}

impl<T: Coeff> Neg for Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        self.scale(&-T::one())
    }
}

impl<T: Coeff> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        Poly::mul(self, rhs)
    }
}
