use super::*;
use crate::forms::{base_interior, commutator};
use crate::kernel::{FieldSpec, MultiIndex, Parity};
use crate::{q, Rational};

type P = Poly<Rational>;

struct Maxwell {
    sp: Spectrum,
    frame: Frame,
}

const A: u32 = 0;
const C: u32 = 4;
const AS: u32 = 5;
const CS: u32 = 9;

impl Maxwell {
    fn new() -> Self {
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
        Maxwell { sp, frame: Frame::covariant(4) }
    }

    fn eta(&self, mu: u8) -> Rational {
        Rational::from_integer(self.sp.metric[mu as usize].into())
    }

    fn j(&self, comp: u32, idx: &[u8]) -> P {
        P::jet(self.sp.jet(comp, MultiIndex::from_entries(idx.iter().copied())))
    }

    /// `F_{μν} = ∂_μA_ν − ∂_νA_μ`, differentiated further by `extra`.
    fn f(&self, mu: u8, nu: u8, extra: &[u8]) -> P {
        let mut a: Vec<u8> = vec![mu];
        a.extend_from_slice(extra);
        let mut b: Vec<u8> = vec![nu];
        b.extend_from_slice(extra);
        &self.j(A + nu as u32, &a) - &self.j(A + mu as u32, &b)
    }

    fn lagrangian(&self) -> P {
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

    fn structure(&self) -> PresympStructure<Rational> {
        canonical_structure(&self.sp, StructureKind::OddBv, &self.frame, |i| {
            if i == CS {
                q(1, 1)
            } else {
                self.eta((i - AS) as u8)
            }
        })
        .unwrap()
    }

    fn expected_q(&self) -> EvoField<Rational> {
        let mut x = EvoField::zero(true);
        for mu in 0..4u8 {
            x.set(A + mu as u32, self.j(C, &[mu]));
            let mut s = P::zero();
            for nu in 0..4u8 {
                s.add_scaled(&self.f(nu, mu, &[nu]), &self.eta(nu));
            }
            x.set(AS + mu as u32, s);
        }
        let mut cs = P::zero();
        for mu in 0..4u8 {
            cs.add_scaled(&self.j(AS + mu as u32, &[mu]), &self.eta(mu));
        }
        x.set(CS, cs);
        x
    }
}

#[test]
fn maxwell_brst_differential() {
    let m = Maxwell::new();
    let st = m.structure();
    assert!(st.is_consistent());
    let q = hamiltonian_field(&m.lagrangian(), &st).unwrap();
    assert_eq!(q, m.expected_q());
    assert!(commutator(&q, &q).is_zero());
    let x = intrinsic_field(&m.lagrangian(), &st).unwrap();
    assert_eq!(to_literal(&x, &st), q);
    assert!(commutator(&x, &x).is_zero());
}

#[test]
fn maxwell_descent_chain() {
    let m = Maxwell::new();
    let f = &m.frame;
    let sys = GaugeSystem::from_hamiltonian(m.lagrangian(), m.structure()).unwrap();
    assert!(sys.is_homological());
    assert!(sys.check().unwrap());
    let d1 = descend(&sys).unwrap();
    assert_eq!(d1.route, DescentRoute::Potential);
    assert!(d1.cross_checked);
    assert!(equiv_mod_d(&d1.system.omega.omega, &m.omega1(), f).unwrap());
    assert!(equiv_mod_d(&d1.system.h, &m.current(), f).unwrap());
    assert_eq!(d1.system.omega.degree, sys.omega.degree + 1);
    assert_ne!(d1.system.omega.odd, sys.omega.odd);

    let d2 = descend(&d1.system).unwrap();
    assert_eq!(d2.route, DescentRoute::Homotopy);
    let printed = m.omega2().scale(&q(-1, 2));
    assert!(equiv_mod_d(&d2.system.omega.omega, &printed, f).unwrap());
    let next = lie(&sys.q, &d2.system.omega.omega);
    assert!(equiv_mod_d(&next, &P::zero(), f).unwrap());
}

#[test]
fn maxwell_master_equation() {
    let m = Maxwell::new();
    let st = m.structure();
    let mc = check_master(&m.lagrangian(), &st).unwrap();
    assert!(mc.ok);
    let sigma = mc.sigma.unwrap();
    assert!(equiv_mod_d(&sigma, &m.current(), &m.frame).unwrap());
    let sys = GaugeSystem::from_hamiltonian(m.lagrangian(), st).unwrap();
    assert!(equiv_mod_d(&brst_current(&sys).unwrap(), &sigma, &m.frame).unwrap());
}

#[test]
fn trivial_cases() {
    let m = Maxwell::new();
    let st = m.structure();
    let zero = hamiltonian_field(&P::zero(), &st).unwrap();
    assert!(zero.is_zero());
    let c = P::int(3).mul(&m.frame.volume());
    assert!(hamiltonian_field(&c, &st).unwrap().is_zero());
    assert!(bracket(&m.lagrangian(), &c, &st).unwrap().is_zero());
    let mc = check_master(&P::zero(), &st).unwrap();
    assert!(mc.ok && mc.sigma.unwrap().is_zero());
    assert!(verify_evolution_generator(&m.lagrangian(), &P::zero(), &st).unwrap());
    let empty = Spectrum::new(2);
    assert!(canonical_structure::<Rational>(&empty, StructureKind::OddBv, &Frame::covariant(2), |_| q(1, 1)).is_err());
}

impl Maxwell {
    /// `d³x^ν = η^{νμ} i_{∂μ} d⁴x`.
    fn d3(&self, nu: u8) -> P {
        base_interior(&self.frame.volume(), nu).scale(&self.eta(nu))
    }

    /// `d²x^{μν} = η^{μα} i_{∂α} d³x^ν`.
    fn d2(&self, mu: u8, nu: u8) -> P {
        base_interior(&self.d3(nu), mu).scale(&self.eta(mu))
    }

    fn dl(&self, comp: u32, idx: &[u8]) -> P {
        P::delta(self.sp.jet(comp, MultiIndex::from_entries(idx.iter().copied())))
    }

    /// `δF_{μν}`.
    fn df(&self, mu: u8, nu: u8) -> P {
        &self.dl(A + nu as u32, &[mu]) - &self.dl(A + mu as u32, &[nu])
    }

    /// `−(δF_{νμ}∧δA^μ + δC∧δA*_ν)∧d³x^ν`.
    fn omega1(&self) -> P {
        let mut w = P::zero();
        for nu in 0..4u8 {
            let mut inner = self.dl(C, &[]).mul(&self.dl(AS + nu as u32, &[]));
            for mu in 0..4u8 {
                inner.add_scaled(&self.df(nu, mu).mul(&self.dl(A + mu as u32, &[])), &self.eta(mu));
            }
            w.add_assign(&inner.mul(&self.d3(nu)));
        }
        -w
    }

    /// `δC∧δF_{μν}∧d²x^{μν}` summed over all `μ, ν`.
    fn omega2(&self) -> P {
        let mut w = P::zero();
        for mu in 0..4u8 {
            for nu in 0..4u8 {
                w.add_assign(&self.dl(C, &[]).mul(&self.df(mu, nu)).mul(&self.d2(mu, nu)));
            }
        }
        w
    }

    /// `−C∂^μF_{μν}d³x^ν`.
    fn current(&self) -> P {
        let mut j = P::zero();
        for mu in 0..4u8 {
            for nu in 0..4u8 {
                j.add_scaled(&self.j(C, &[]).mul(&self.f(mu, nu, &[mu])).mul(&self.d3(nu)), &-self.eta(mu));
            }
        }
        j
    }
}

fn small_bv() -> (Spectrum, PresympStructure<Rational>) {
    let mut sp = Spectrum::new(2);
    sp.add_field(FieldSpec::new("u", vec![], Parity::Even, 0, Role::Field));
    sp.add_field(FieldSpec::new("c", vec![], Parity::Odd, 1, Role::Field));
    let mut us = FieldSpec::new("ustar", vec![], Parity::Odd, -1, Role::Antifield);
    us.conj = Some(0);
    sp.add_field(us);
    let mut cs = FieldSpec::new("cstar", vec![], Parity::Even, -2, Role::Antifield);
    cs.conj = Some(1);
    sp.add_field(cs);
    let st = canonical_structure(&sp, StructureKind::OddBv, &Frame::covariant(2), |_| q(1, 1)).unwrap();
    (sp, st)
}

fn small_cotangent() -> (Spectrum, PresympStructure<Rational>) {
    let mut sp = Spectrum::new(2);
    sp.add_field(FieldSpec::new("u", vec![], Parity::Even, 0, Role::Field));
    sp.add_field(FieldSpec::new("e", vec![], Parity::Odd, 1, Role::Field));
    let mut ub = FieldSpec::new("ubar", vec![], Parity::Even, 0, Role::Source);
    ub.conj = Some(0);
    sp.add_field(ub);
    let mut eb = FieldSpec::new("ebar", vec![], Parity::Odd, -1, Role::Source);
    eb.conj = Some(1);
    sp.add_field(eb);
    let st = canonical_structure(&sp, StructureKind::EvenCotangent, &Frame::covariant(2), |_| q(1, 1)).unwrap();
    (sp, st)
}

fn sampler(sp: &Spectrum, seed: u64) -> crate::sample::Sampler {
    let mut s = crate::sample::Sampler::new(sp, seed);
    s.max_order = 1;
    s.max_terms = 2;
    s.coord_rate = 0.0;
    s
}

fn xodd(a: &P, st: &PresympStructure<Rational>) -> bool {
    a.parity().unwrap() ^ st.odd
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn structures() -> [(Spectrum, PresympStructure<Rational>); 2] {
        [small_bv(), small_cotangent()]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bracket_symmetry(seed in any::<u64>(), pa: bool, pb: bool) {
            for (sp, st) in structures() {
                let f = &st.frame;
                let mut s = sampler(&sp, seed);
                let a: P = s.form_with_parity(0, 2, pa, f);
                let b: P = s.form_with_parity(0, 2, pb, f);
                let ab = bracket(&a, &b, &st).unwrap();
                let ba = bracket(&b, &a, &st).unwrap();
                let sgn: Rational = sign(xodd(&a, &st) && xodd(&b, &st));
                prop_assert!((&ab + &ba.scale(&sgn)).is_zero());
                prop_assert!(equiv_mod_d(&ab, &-lie(&intrinsic_field(&a, &st).unwrap(), &b), f).unwrap());
            }
        }

        #[test]
        fn bracket_jacobi(seed in any::<u64>(), pa: bool, pb: bool, pc: bool) {
            for (sp, st) in structures() {
                let f = &st.frame;
                let mut s = sampler(&sp, seed);
                let a: P = s.form_with_parity(0, 2, pa, f);
                let b: P = s.form_with_parity(0, 2, pb, f);
                let c: P = s.form_with_parity(0, 2, pc, f);
                let lhs = bracket(&a, &bracket(&b, &c, &st).unwrap(), &st).unwrap();
                let r1 = bracket(&bracket(&a, &b, &st).unwrap(), &c, &st).unwrap();
                let r2 = bracket(&b, &bracket(&a, &c, &st).unwrap(), &st).unwrap();
                let sgn: Rational = sign(xodd(&a, &st) && xodd(&b, &st));
                let rhs = &r1 + &r2.scale(&sgn);
                prop_assert!(equiv_mod_d(&lhs, &rhs, f).unwrap());
            }
        }

        #[test]
        fn bracket_matches_commutator(seed in any::<u64>(), pa: bool, pb: bool) {
            for (sp, st) in structures() {
                let f = &st.frame;
                let mut s = sampler(&sp, seed);
                let a: P = s.form_with_parity(0, 2, pa, f);
                let b: P = s.form_with_parity(0, 2, pb, f);
                let xab = intrinsic_field(&bracket(&a, &b, &st).unwrap(), &st).unwrap();
                let comm = commutator(&intrinsic_field(&a, &st).unwrap(), &intrinsic_field(&b, &st).unwrap());
                let lhs = contract(&xab, &st.omega);
                let rhs = contract(&comm, &st.omega);
                prop_assert!(equiv_mod_d(&lhs, &-rhs, f).unwrap());
            }
        }
    }
}
