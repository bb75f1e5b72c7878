//! Seeded random forms for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::Coeff;
use crate::forms::Frame;
use crate::kernel::{Gen, MultiIndex, Poly, Spectrum};

/// Deterministic generator of random polynomial forms over a spectrum.
pub struct Sampler {
    rng: ChaCha8Rng,
    comps: Vec<(u32, bool)>,
    /// Largest derivative order of generated jets.
    pub max_order: usize,
    /// Largest number of jet factors per monomial.
    pub max_jets: usize,
    /// Largest number of monomials per form.
    pub max_terms: usize,
    /// Probability of a coordinate factor in a monomial.
    pub coord_rate: f64,
}

impl Sampler {
    pub fn new(sp: &Spectrum, seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            comps: sp.fields.iter().enumerate().map(|(i, f)| (i as u32, f.parity.is_odd())).collect(),
            max_order: 2,
            max_jets: 2,
            max_terms: 3,
            coord_rate: 0.2,
        }
    }

    /// Restricts generated jets and contact forms to the listed components.
    pub fn only(mut self, comps: &[u32]) -> Self {
        self.comps.retain(|(c, _)| comps.contains(c));
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn index(&mut self, frame: &Frame) -> MultiIndex {
        let order = self.rng.gen_range(0..=self.max_order);
        let dirs = frame.dirs();
        if dirs.is_empty() {
            return MultiIndex::empty();
        }
        MultiIndex::from_entries((0..order).map(|_| dirs[self.rng.gen_range(0..dirs.len())]))
    }

    fn var(&mut self, frame: &Frame) -> (u32, MultiIndex, bool) {
        let (c, odd) = self.comps[self.rng.gen_range(0..self.comps.len())];
        (c, self.index(frame), odd)
    }

    /// A random monomial of bidegree `(q, p)` with coefficient in `[-3, 3]`.
    pub fn monomial<T: Coeff>(&mut self, q: u32, p: u32, frame: &Frame) -> Poly<T> {
        let mut c = 0;
        while c == 0 {
            c = self.rng.gen_range(-3i64..=3);
        }
        let mut out = Poly::int(c);
        let jets = self.rng.gen_range(0..=self.max_jets);
        for _ in 0..jets {
            let (comp, idx, odd) = self.var(frame);
            out = out.mul(&Poly::gen(Gen::Jet(crate::JetVar::new(comp, idx, odd))));
        }
        if self.rng.gen_bool(self.coord_rate) && !frame.dirs().is_empty() {
            let dirs = frame.dirs();
            out = out.mul(&Poly::coord(dirs[self.rng.gen_range(0..dirs.len())]));
        }
        for _ in 0..q {
            let (comp, idx, odd) = self.var(frame);
            out = out.mul(&Poly::gen(Gen::Delta(crate::JetVar::new(comp, idx, odd))));
        }
        let mut dirs: Vec<u8> = frame.dirs().to_vec();
        for _ in 0..p {
            if dirs.is_empty() {
                return Poly::zero();
            }
            let k = self.rng.gen_range(0..dirs.len());
            out = out.mul(&Poly::dx(dirs.remove(k)));
        }
        out
    }

    /// A random form of bidegree `(q, p)`; may be zero.
    pub fn form<T: Coeff>(&mut self, q: u32, p: u32, frame: &Frame) -> Poly<T> {
        let n = self.rng.gen_range(1..=self.max_terms);
        let mut out = Poly::zero();
        for _ in 0..n {
            out.add_assign(&self.monomial(q, p, frame));
        }
        out
    }

    /// Like [`Sampler::form`] but retried until nonzero.
    pub fn nonzero_form<T: Coeff>(&mut self, q: u32, p: u32, frame: &Frame) -> Poly<T> {
        loop {
            let f = self.form(q, p, frame);
            if !f.is_zero() {
                return f;
            }
        }
    }

    /// A nonzero form of bidegree `(q, p)` with the given Grassmann parity.
    pub fn form_with_parity<T: Coeff>(&mut self, q: u32, p: u32, odd: bool, frame: &Frame) -> Poly<T> {
        loop {
            let f: Poly<T> = self.form(q, p, frame);
            let f = f.filter(|m| m.bigrade().1 == odd);
            if !f.is_zero() {
                return f;
            }
        }
    }
}
