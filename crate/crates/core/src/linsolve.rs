//! Exact linear algebra over polynomial-indexed vectors.
//!
//! Vectors are [`Poly`] values read as coordinate maps from monomials to
//! coefficients. [`Span`] keeps an echelon basis of the span of a list of
//! columns together with the combination of original columns behind every
//! basis vector, which is all the undetermined-coefficient solvers need.

use std::collections::BTreeMap;

use crate::coeff::Coeff;
use crate::kernel::{Monomial, Poly};

#[derive(Clone, Debug)]
struct Row<T> {
    vec: Poly<T>,
    combo: BTreeMap<usize, T>,
}

/// Incremental echelon basis of a column span.
#[derive(Clone, Debug)]
pub struct Span<T> {
    rows: BTreeMap<Monomial, Row<T>>,
    columns: usize,
    pivots: Vec<usize>,
}

impl<T: Coeff> Default for Span<T> {
    fn default() -> Self {
        Span::new()
    }
}

fn add_combo<T: Coeff>(acc: &mut BTreeMap<usize, T>, other: &BTreeMap<usize, T>, s: &T) {
    for (k, v) in other {
        let e = acc.entry(*k).or_insert_with(T::zero);
        *e = e.clone() + v.clone() * s.clone();
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

impl<T: Coeff> Span<T> {
    pub fn new() -> Self {
        Span {
            rows: BTreeMap::new(),
            columns: 0,
            pivots: Vec::new(),
        }
    }

    pub fn from_columns<'a>(cols: impl IntoIterator<Item = &'a Poly<T>>) -> Self {
        let mut s = Span::new();
        for c in cols {
            s.push(c);
        }
        s
    }

    /// Number of columns pushed so far.
    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Indices of the columns that enlarged the span when pushed.
    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the basis; returns the remainder and the
    /// combination of columns that was subtracted.
    fn reduce(&self, v: &Poly<T>) -> (Poly<T>, BTreeMap<usize, T>) {
        let mut rem = v.clone();
        let mut used = BTreeMap::new();
        while let Some((m, c)) = rem.leading() {
            let Some(row) = self.rows.get(m) else { break };
            let c = c.clone();
            rem.add_scaled(&row.vec, &-c.clone());
            add_combo(&mut used, &row.combo, &c);
        }
        (rem, used)
    }

    /// Appends a column; returns whether it was independent.
    pub fn push(&mut self, col: &Poly<T>) -> bool {
        let idx = self.columns;
        self.columns += 1;
        let (rem, used) = self.reduce(col);
        let Some((lead, c)) = rem.leading() else {
            return false;
        };
        let inv = T::one() / c.clone();
        let lead = lead.clone();
        let mut combo = BTreeMap::new();
        combo.insert(idx, T::one());
        add_combo(&mut combo, &used, &-T::one());
        let combo = combo.into_iter().map(|(k, v)| (k, v * inv.clone())).collect();
        self.rows.insert(lead, Row { vec: rem.scale(&inv), combo });
        self.pivots.push(idx);
        true
    }

    pub fn contains(&self, v: &Poly<T>) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Coefficients `c` with `Σ c_k col_k = target`, free variables set to 0.
    pub fn solve(&self, target: &Poly<T>) -> Option<BTreeMap<usize, T>> {
        let (rem, used) = self.reduce(target);
        rem.is_zero().then_some(used)
    }

    /// Remainder of `v` after reduction; zero iff `v` lies in the span.
    pub fn residual(&self, v: &Poly<T>) -> Poly<T> {
        self.reduce(v).0
    }

    /// Splits `v = image + rest` where `rest` has no pivot monomial at all,
    /// so `rest` lies in the coordinate complement of the span.
    pub fn split_full(&self, v: &Poly<T>) -> (Poly<T>, Poly<T>) {
        let mut rest = v.clone();
        let mut cursor: Option<Monomial> = None;
        loop {
            // next pivot monomial of `rest` strictly below the cursor
            let next = rest
                .terms()
                .rev()
                .map(|(m, _)| m)
                .filter(|m| cursor.as_ref().is_none_or(|c| *m < c))
                .find(|m| self.rows.contains_key(*m))
                .cloned();
            let Some(m) = next else { break };
            let c = rest.coefficient(&m);
            rest.add_scaled(&self.rows[&m].vec, &-c);
            cursor = Some(m);
        }
        (v - &rest, rest)
    }
}

/// Combines `Σ c_k items_k` for a solution returned by [`Span::solve`].
pub fn combine<T: Coeff>(coeffs: &BTreeMap<usize, T>, items: &[Poly<T>]) -> Poly<T> {
    let mut out = Poly::zero();
    for (k, c) in coeffs {
        out.add_scaled(&items[*k], c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Gen;
    use crate::Rational;

    fn v(parts: &[(u8, i64)]) -> Poly<Rational> {
        Poly::from_terms(parts.iter().map(|(g, c)| (Monomial::gen(Gen::Coord(*g)), Rational::from_integer((*c).into()))))
    }

    #[test]
    fn solves_dependent_system() {
        let cols = [v(&[(0, 1), (1, 1)]), v(&[(1, 1), (2, 1)]), v(&[(0, 1), (2, -1)])];
        let s = Span::from_columns(cols.iter());
        assert_eq!(s.rank(), 2);
        assert_eq!(s.pivot_columns(), &[0, 1]);
        let target = v(&[(0, 2), (1, 3), (2, 1)]);
        let sol = s.solve(&target).unwrap();
        assert_eq!(combine(&sol, &cols), target);
        assert!(s.solve(&v(&[(0, 1)])).is_none());
    }

    #[test]
    fn full_split_leaves_no_pivots() {
        let cols = [v(&[(2, 1), (0, 1)]), v(&[(1, 1), (0, 2)])];
        let s = Span::from_columns(cols.iter());
        let x = v(&[(0, 5), (1, 1), (2, 1)]);
        let (img, rest) = s.split_full(&x);
        assert!(s.contains(&img));
        assert_eq!(&img + &rest, x);
        assert_eq!(rest, v(&[(0, 2)]));
    }

    #[test]
    fn empty_span() {
        let s: Span<Rational> = Span::new();
        assert!(s.contains(&Poly::zero()));
        assert!(!s.contains(&Poly::one()));
    }
}
