//! Finite blocks of the horizontal complex.
//!
//! `d = dx^j ∧ ∂_j` preserves the parameters, everything outside the frame,
//! the multiset of field species, and the number `W − p`, where `W` is the
//! total frame derivative order minus the frame coordinate degree. Fixing
//! those (and bounding the coordinate degree by the input's) leaves a finite
//! subcomplex in which exact linear algebra decides everything.

use std::collections::{BTreeMap, BTreeSet};

use super::{check_order, species, VResult, VariationalError};
use crate::coeff::Coeff;
use crate::forms::{d, Frame};
use crate::kernel::{Gen, JetVar, Monomial, MultiIndex, Poly};
use crate::linsolve::{combine, Span};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    fixed: Monomial,
    /// Species generators (frame index stripped), one entry per factor.
    slots: Vec<Gen>,
    w_minus_p: i64,
}

struct Shape {
    key: Key,
    p: u32,
    xdeg: u32,
}

fn shape(m: &Monomial, frame: &Frame) -> Shape {
    let mut fixed = Vec::new();
    let mut slots = Vec::new();
    let mut w: i64 = 0;
    let mut p = 0u32;
    let mut xdeg = 0u32;
    for (g, k) in m.factors() {
        match g {
            Gen::Coord(i) if frame.contains(*i) => {
                xdeg += k;
                w -= *k as i64;
            }
            Gen::Dx(i) if frame.contains(*i) => p += k,
            Gen::Jet(v) | Gen::Delta(v) => {
                let fp = v.idx.split(frame.dirs()).0.order() as i64;
                w += fp * *k as i64;
                let s = species(v, frame);
                let sg = if matches!(g, Gen::Jet(_)) { Gen::Jet(s) } else { Gen::Delta(s) };
                for _ in 0..*k {
                    slots.push(sg.clone());
                }
            }
            _ => fixed.push((g.clone(), *k)),
        }
    }
    slots.sort();
    Shape {
        key: Key {
            fixed: Monomial::from_sorted(fixed),
            slots,
            w_minus_p: w - p as i64,
        },
        p,
        xdeg,
    }
}

fn combinations(dirs: &[u8], k: usize) -> Vec<Vec<u8>> {
    fn rec(dirs: &[u8], start: usize, k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..dirs.len() {
            cur.push(dirs[i]);
            rec(dirs, i + 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dirs, 0, k, &mut Vec::new(), &mut out);
    out
}

fn with_index(g: &Gen, extra: &MultiIndex) -> Gen {
    match g {
        Gen::Jet(v) => Gen::Jet(JetVar::new(v.comp, v.idx.concat(extra), v.odd)),
        Gen::Delta(v) => Gen::Delta(JetVar::new(v.comp, v.idx.concat(extra), v.odd)),
        other => other.clone(),
    }
}

/// Basis monomials of a block at horizontal degree `p`, ordered by
/// coordinate degree first so truncations are prefixes of each other.
fn basis(key: &Key, p: u32, xmax: u32, frame: &Frame) -> Vec<Monomial> {
    let mut out: BTreeSet<(u32, Monomial)> = BTreeSet::new();
    let dirs = frame.dirs();
    let dx_sets = combinations(dirs, p as usize);
    for e in 0..=xmax {
        let total = key.w_minus_p + p as i64 + e as i64;
        if total < 0 {
            continue;
        }
        let xs = MultiIndex::all_of_order(dirs, e as usize);
        let mut assignments: Vec<Vec<MultiIndex>> = Vec::new();
        distribute(key.slots.len(), total as usize, dirs, &mut Vec::new(), &mut assignments);
        for xm in &xs {
            let mut base = key.fixed.clone();
            for &i in xm.entries() {
                base = base.mul(&Monomial::gen(Gen::Coord(i))).expect("coordinates commute").0;
            }
            for dxs in &dx_sets {
                let mut with_dx = Some(base.clone());
                for &i in dxs {
                    with_dx = with_dx.and_then(|b| b.mul(&Monomial::gen(Gen::Dx(i))).map(|r| r.0));
                }
                let Some(with_dx) = with_dx else { continue };
                for asg in &assignments {
                    let mut m = Some(with_dx.clone());
                    for (slot, idx) in key.slots.iter().zip(asg) {
                        let g = with_index(slot, idx);
                        m = m.and_then(|b| b.mul(&Monomial::gen(g)).map(|r| r.0));
                    }
                    if let Some(m) = m {
                        out.insert((e, m));
                    }
                }
            }
        }
    }
    out.into_iter().map(|(_, m)| m).collect()
}

fn distribute(slots: usize, total: usize, dirs: &[u8], cur: &mut Vec<MultiIndex>, out: &mut Vec<Vec<MultiIndex>>) {
    if cur.len() == slots {
        if total == 0 {
            out.push(cur.clone());
        }
        return;
    }
    if slots == 0 {
        return;
    }
    let last = cur.len() + 1 == slots;
    let range: Vec<usize> = if last { vec![total] } else { (0..=total).collect() };
    for o in range {
        for idx in MultiIndex::all_of_order(dirs, o) {
            cur.push(idx);
            distribute(slots, total - o, dirs, cur, out);
            cur.pop();
        }
    }
}

struct Level<T> {
    basis: Vec<Poly<T>>,
    span: Span<T>,
}

struct Blocks<'a, T> {
    frame: &'a Frame,
    xmax: u32,
    cache: BTreeMap<(Key, u32), Level<T>>,
}

impl<'a, T: Coeff> Blocks<'a, T> {
    fn new(frame: &'a Frame, xmax: u32) -> Self {
        Blocks {
            frame,
            xmax,
            cache: BTreeMap::new(),
        }
    }

    /// Basis of the block at degree `p` and the span of its `d`-images.
    fn level(&mut self, key: &Key, p: u32) -> &Level<T> {
        let k = (key.clone(), p);
        if !self.cache.contains_key(&k) {
            let basis: Vec<Poly<T>> = basis(key, p, self.xmax, self.frame)
                .into_iter()
                .map(|m| Poly::term(m, T::one()))
                .collect();
            let images: Vec<Poly<T>> = basis.iter().map(|b| d(b, self.frame)).collect();
            let span = Span::from_columns(images.iter());
            self.cache.insert(k.clone(), Level { basis, span });
        }
        &self.cache[&k]
    }
}

fn group<T: Coeff>(rho: &Poly<T>, frame: &Frame) -> (BTreeMap<(Key, u32), Poly<T>>, u32) {
    let mut out: BTreeMap<(Key, u32), Poly<T>> = BTreeMap::new();
    let mut xmax = 0;
    for (m, c) in rho.terms() {
        let s = shape(m, frame);
        xmax = xmax.max(s.xdeg);
        out.entry((s.key, s.p)).or_default().add_term(m.clone(), c.clone());
    }
    (out, xmax)
}

/// A `σ` with `dσ = ρ` inside the bounded blocks of `ρ`, if one exists.
pub fn d_primitive<T: Coeff>(rho: &Poly<T>, frame: &Frame) -> VResult<T, Option<Poly<T>>> {
    check_order(rho, 1)?;
    let (groups, xmax) = group(rho, frame);
    let mut blocks = Blocks::new(frame, xmax);
    let mut sigma = Poly::zero();
    for ((key, p), part) in groups {
        if p == 0 {
            return Ok(None);
        }
        let lower = blocks.level(&key, p - 1);
        match lower.span.solve(&part) {
            Some(sol) => sigma.add_assign(&combine(&sol, &lower.basis)),
            None => return Ok(None),
        }
    }
    Ok(Some(sigma))
}

/// Horizontal homotopy `h` with `dh + hd = id` in vertical degree `q ≥ 1`
/// and horizontal degree below the top; at top degree `dh` projects onto
/// the `d`-exact part.
pub fn horizontal_homotopy<T: Coeff>(rho: &Poly<T>, frame: &Frame) -> VResult<T, Poly<T>> {
    check_order(rho, 1)?;
    if rho.terms().any(|(m, _)| m.bidegree().0 == 0) {
        return Err(VariationalError::UnsupportedDegree);
    }
    let (groups, xmax) = group(rho, frame);
    let mut blocks = Blocks::new(frame, xmax);
    let mut out = Poly::zero();
    let top = frame.top();
    for ((key, p), part) in groups {
        if p == 0 {
            continue;
        }
        let image_part = if p < top {
            let here = blocks.level(&key, p);
            let dx = d(&part, frame);
            let sol = here
                .span
                .solve(&dx)
                .ok_or_else(|| VariationalError::Internal("differential leaves its block".into()))?;
            let k = combine(&sol, &here.basis);
            &part - &k
        } else {
            blocks.level(&key, p - 1).span.split_full(&part).0
        };
        let lower = blocks.level(&key, p - 1);
        let sol = lower
            .span
            .solve(&image_part)
            .ok_or_else(|| VariationalError::Internal("row of the bicomplex is not exact".into()))?;
        out.add_assign(&combine(&sol, &lower.basis));
    }
    Ok(out)
}

/// Linear normal form modulo `dΛ` for vertical degree `q ≥ 1`.
///
/// The normal form vanishes exactly when the input is `d`-exact, and it is
/// linear in the input as long as `xmax` bounds the coordinate degree of
/// every form passed to the same instance. Block bases are cached.
pub struct ModD<'a, T> {
    blocks: Blocks<'a, T>,
}

impl<'a, T: Coeff> ModD<'a, T> {
    pub fn new(frame: &'a Frame, xmax: u32) -> Self {
        ModD { blocks: Blocks::new(frame, xmax) }
    }

    pub fn normal_form(&mut self, rho: &Poly<T>) -> VResult<T, Poly<T>> {
        check_order(rho, 1)?;
        if rho.terms().any(|(m, _)| m.bidegree().0 == 0) {
            return Err(VariationalError::UnsupportedDegree);
        }
        let (groups, own) = group(rho, self.blocks.frame);
        if own > self.blocks.xmax {
            return Err(VariationalError::Internal(format!(
                "coordinate degree {own} exceeds the bound {} of this normal form",
                self.blocks.xmax
            )));
        }
        let mut out = Poly::zero();
        for ((key, p), part) in groups {
            if p == 0 {
                out.add_assign(&part);
                continue;
            }
            let lower = self.blocks.level(&key, p - 1);
            out.add_assign(&lower.span.split_full(&part).1);
        }
        Ok(out)
    }
}

/// Largest frame-coordinate degree among the terms of `ρ`.
pub fn coordinate_degree<T: Coeff>(rho: &Poly<T>, frame: &Frame) -> u32 {
    rho.terms().map(|(m, _)| shape(m, frame).xdeg).max().unwrap_or(0)
}
