//! Hand-built models shared by the integration tests.
#![allow(dead_code)]

use vtc_core::forms::{delta, Frame};
use vtc_core::symplectic::PresympStructure;
use vtc_core::{q, FieldSpec, MultiIndex, Parity, Poly, Rational, Role, Spectrum};

pub type P = Poly<Rational>;

mod maxwell;
#[allow(unused_imports)]
pub use maxwell::*;

/// Chiral bosons on `R^{1,1}` with values in su(2), in coordinates
/// `x0 = τ`, `x1 = σ` and light-cone one-forms `dx± = dτ ± dσ`.
pub struct Chiral {
    pub sp: Spectrum,
    pub frame: Frame,
}

pub const PHI: u32 = 0;
pub const PHIBAR: u32 = 3;
pub const ETA: u32 = 6;
pub const ETABAR: u32 = 9;

impl Chiral {
    pub fn new() -> Self {
        let mut sp = Spectrum::new(2).with_metric(vec![1, -1]);
        for i in 0..3 {
            sp.add_field(FieldSpec::new("phi", vec![i], Parity::Even, 0, Role::Field));
        }
        for i in 0..3u8 {
            let mut f = FieldSpec::new("phibar", vec![i], Parity::Even, 0, Role::Source);
            f.conj = Some(PHI + i as u32);
            sp.add_field(f);
        }
        for i in 0..3 {
            sp.add_field(FieldSpec::new("eta", vec![i], Parity::Odd, -1, Role::Field));
        }
        for i in 0..3u8 {
            let mut f = FieldSpec::new("etabar", vec![i], Parity::Odd, 1, Role::Source);
            f.conj = Some(ETA + i as u32);
            sp.add_field(f);
        }
        sp.add_param("k");
        Chiral { sp, frame: Frame::covariant(2) }
    }

    pub fn k(&self) -> P {
        P::param(0)
    }

    pub fn jet(&self, comp: u32, idx: &[u8]) -> P {
        P::jet(self.sp.jet(comp, MultiIndex::from_entries(idx.iter().copied())))
    }

    pub fn xp(&self) -> P {
        &P::dx(0) + &P::dx(1)
    }

    pub fn xm(&self) -> P {
        &P::dx(0) - &P::dx(1)
    }

    /// Algebra-valued form as its three components.
    pub fn field(&self, base: u32, form: &P) -> [P; 3] {
        [0, 1, 2].map(|i| self.jet(base + i, &[]).mul(form))
    }

    pub fn phi(&self) -> [P; 3] {
        self.field(PHI, &self.xp())
    }

    pub fn phibar(&self) -> [P; 3] {
        self.field(PHIBAR, &self.xm())
    }

    pub fn eta(&self) -> [P; 3] {
        self.field(ETA, &self.xp().mul(&self.xm()))
    }

    pub fn etabar(&self) -> [P; 3] {
        self.field(ETABAR, &P::one())
    }

    /// `⟨a,b⟩` with the Killing form `−2δ`.
    pub fn pair(a: &[P; 3], b: &[P; 3]) -> P {
        let mut out = P::zero();
        for i in 0..3 {
            out.add_scaled(&a[i].mul(&b[i]), &q(-2, 1));
        }
        out
    }

    /// `[a,b]^k = ε_{ijk} a^i∧b^j`.
    pub fn comm(a: &[P; 3], b: &[P; 3]) -> [P; 3] {
        let mut out = [P::zero(), P::zero(), P::zero()];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            out[k].add_assign(&a[i].mul(&b[j]));
            out[k].add_assign(&-a[j].mul(&b[i]));
        }
        out
    }

    pub fn map(a: &[P; 3], f: impl Fn(&P) -> P) -> [P; 3] {
        [f(&a[0]), f(&a[1]), f(&a[2])]
    }

    pub fn add(a: &[P; 3], b: &[P; 3]) -> [P; 3] {
        [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]
    }

    pub fn d(&self, a: &[P; 3]) -> [P; 3] {
        Self::map(a, |x| vtc_core::forms::d(x, &self.frame))
    }

    pub fn o1(&self) -> P {
        Self::pair(&self.etabar(), &self.d(&self.phi()))
    }

    pub fn o2(&self, with_k: bool) -> P {
        self.o2_with(with_k, q(1, 2))
    }

    /// `O₂` with the coefficient of `⟨η,[η̄,η̄]⟩` left free.
    pub fn o2_with(&self, with_k: bool, c: Rational) -> P {
        let k = if with_k { self.k() } else { P::zero() };
        let inner = Self::add(
            &Self::comm(&self.phi(), &self.phibar()),
            &Self::map(&self.d(&self.phibar()), |x| k.mul(x)),
        );
        let eb = self.etabar();
        let mut o = Self::pair(&eb, &inner);
        o.add_scaled(&Self::pair(&self.eta(), &Self::comm(&eb, &eb)), &c);
        o
    }

    pub fn o(&self) -> P {
        &self.o1() + &self.o2(true)
    }

    /// The ghost pair carries the sign `(−1)^{1·3}` picked up when the
    /// odd one-form `δη̄` is moved past the three-form `δη`.
    pub fn omega(&self) -> PresympStructure<Rational> {
        let dl = |a: [P; 3]| Self::map(&a, delta);
        let w = &Self::pair(&dl(self.phibar()), &dl(self.phi())) - &Self::pair(&dl(self.etabar()), &dl(self.eta()));
        PresympStructure::new(w, self.frame.clone())
            .unwrap()
            .with_bar((PHIBAR..PHIBAR + 3).chain(ETABAR..ETABAR + 3))
    }

    /// `⟨φ,[η̄,η̄]⟩ − k⟨η̄,dη̄⟩`; the second term changes sign for the same
    /// reason as the ghost pair of `ω`.
    pub fn sigma2(&self) -> P {
        let eb = self.etabar();
        &Self::pair(&self.phi(), &Self::comm(&eb, &eb))
            - &Self::pair(&eb, &self.d(&eb)).mul(&self.k())
    }

    pub fn sigma3(&self) -> P {
        let eb = self.etabar();
        Self::pair(&self.phibar(), &Self::comm(&eb, &eb)).mul(&self.k())
    }

    pub fn omega1(&self) -> P {
        let dl = |a: [P; 3]| Self::map(&a, delta);
        &Self::pair(&dl(self.etabar()), &dl(self.phi()))
            + &Self::pair(&dl(self.etabar()), &dl(self.phibar())).mul(&self.k())
    }
}
