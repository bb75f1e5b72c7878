//! Maxwell theory in BV form on `R^{1,3}`, plus electric-field components
//! for the phase space on `x⁰ = const` leaves.

use vtc_core::forms::{base_interior, Frame};
use vtc_core::symplectic::{canonical_structure, PresympStructure, StructureKind};
use vtc_core::{q, FieldSpec, MultiIndex, Parity, Rational, Role, Spectrum};

use super::P;

pub struct Maxwell {
    pub sp: Spectrum,
    pub frame: Frame,
}

pub const A: u32 = 0;
pub const C: u32 = 4;
pub const AS: u32 = 5;
pub const CS: u32 = 9;
/// `E_i = F_{i0}` for `i = 1, 2, 3` at `E + i − 1`.
pub const E: u32 = 10;

impl Maxwell {
    pub fn new() -> Self {
        let mut sp = Spectrum::new(4).with_metric(vec![1, -1, -1, -1]);
        for mu in 0..4 {
            sp.add_field(FieldSpec::new("A", vec![mu], Parity::Even, 0, Role::Field));
        }
        sp.add_field(FieldSpec::new("C", vec![], Parity::Odd, 1, Role::Field));
        for mu in 0..4u8 {
            let mut f = FieldSpec::new("Astar", vec![mu], Parity::Odd, -1, Role::Antifield);
            f.conj = Some(A + mu as u32);
            sp.add_field(f);
        }
        let mut f = FieldSpec::new("Cstar", vec![], Parity::Even, -2, Role::Antifield);
        f.conj = Some(C);
        sp.add_field(f);
        for i in 1..4 {
            sp.add_field(FieldSpec::new("E", vec![i], Parity::Even, 0, Role::Source));
        }
        Maxwell { sp, frame: Frame::covariant(4) }
    }

    pub fn eta(&self, mu: u8) -> Rational {
        Rational::from_integer(self.sp.metric[mu as usize].into())
    }

    pub fn j(&self, comp: u32, idx: &[u8]) -> P {
        P::jet(self.sp.jet(comp, MultiIndex::from_entries(idx.iter().copied())))
    }

    pub fn dl(&self, comp: u32, idx: &[u8]) -> P {
        P::delta(self.sp.jet(comp, MultiIndex::from_entries(idx.iter().copied())))
    }

    /// `∂_extra F_{μν}`.
    pub fn f(&self, mu: u8, nu: u8, extra: &[u8]) -> P {
        let mut a = vec![mu];
        a.extend_from_slice(extra);
        let mut b = vec![nu];
        b.extend_from_slice(extra);
        &self.j(A + nu as u32, &a) - &self.j(A + mu as u32, &b)
    }

    pub fn lagrangian(&self) -> P {
        let mut l = P::zero();
        for mu in 0..4u8 {
            for nu in 0..4u8 {
                let fm = self.f(mu, nu, &[]);
                l.add_scaled(&fm.mul(&fm), &(self.eta(mu) * self.eta(nu) * q(1, 4)));
            }
            l.add_scaled(&self.j(C, &[]).mul(&self.j(AS + mu as u32, &[mu])), &self.eta(mu));
        }
        (-l).mul(&self.frame.volume())
    }

    pub fn structure(&self) -> PresympStructure<Rational> {
        canonical_structure(&self.sp, StructureKind::OddBv, &self.frame, |i| {
            if i == CS {
                q(1, 1)
            } else {
                self.eta((i - AS) as u8)
            }
        })
        .unwrap()
    }

    /// `d³x^ν = η^{νμ} i_{∂μ} d⁴x`.
    pub fn d3(&self, nu: u8) -> P {
        base_interior(&self.frame.volume(), nu).scale(&self.eta(nu))
    }

    /// `−C∂^μF_{μν}d³x^ν`.
    pub fn current(&self) -> P {
        let mut j = P::zero();
        for mu in 0..4u8 {
            for nu in 0..4u8 {
                j.add_scaled(&self.j(C, &[]).mul(&self.f(mu, nu, &[mu])).mul(&self.d3(nu)), &-self.eta(mu));
            }
        }
        j
    }

    /// The spatial volume `dx¹dx²dx³`.
    pub fn d3x(&self) -> P {
        P::dx(1).mul(&P::dx(2)).mul(&P::dx(3))
    }
}
