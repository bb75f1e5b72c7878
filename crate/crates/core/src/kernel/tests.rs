use super::*;
use crate::Rational;
use proptest::prelude::*;

type P = Poly<Rational>;

fn spectrum() -> Spectrum {
    let mut sp = Spectrum::new(2);
    sp.add_field(FieldSpec::new("phi", vec![], Parity::Even, 0, Role::Field));
    sp.add_field(FieldSpec::new("c", vec![1], Parity::Odd, 1, Role::Field));
    sp.add_field(FieldSpec::new("c", vec![2], Parity::Odd, 1, Role::Field));
    let mut bar = FieldSpec::new("phibar", vec![], Parity::Even, 0, Role::Source);
    bar.conj = Some(0);
    sp.add_field(bar);
    sp
}

fn jet(sp: &Spectrum, comp: u32, idx: &[u8]) -> P {
    P::jet(sp.jet(comp, MultiIndex::from_entries(idx.iter().copied())))
}

fn delta(sp: &Spectrum, comp: u32, idx: &[u8]) -> P {
    P::delta(sp.jet(comp, MultiIndex::from_entries(idx.iter().copied())))
}

#[test]
fn odd_generator_squares_to_zero() {
    let sp = spectrum();
    let c = jet(&sp, 1, &[]);
    assert!(c.mul(&c).is_zero());
}

#[test]
fn one_is_identity() {
    let sp = spectrum();
    let a = jet(&sp, 0, &[1]) + jet(&sp, 1, &[]).mul(&jet(&sp, 2, &[0]));
    assert_eq!(P::one().mul(&a), a);
    assert_eq!(a.mul(&P::one()), a);
}

#[test]
fn odd_generators_anticommute() {
    let sp = spectrum();
    let c1 = jet(&sp, 1, &[]);
    let c2 = jet(&sp, 2, &[]);
    assert!((c1.mul(&c2) + c2.mul(&c1)).is_zero());
}

#[test]
fn leibniz_on_phi_phi_x() {
    let sp = spectrum();
    let phi = jet(&sp, 0, &[]);
    let phi_x = jet(&sp, 0, &[0]);
    let phi_xx = jet(&sp, 0, &[0, 0]);
    let lhs = phi.mul(&phi_x).total_derivative(0);
    let rhs = phi_x.mul(&phi_x) + phi.mul(&phi_xx);
    assert_eq!(lhs, rhs);
}

#[test]
fn derivative_of_constant() {
    assert!(P::int(7).total_derivative(1).is_zero());
    assert_eq!(P::coord(1).total_derivative(1), P::one());
    assert!(P::coord(1).total_derivative(0).is_zero());
}

#[test]
fn maxwell_ghost_times_antifield() {
    let mut sp = Spectrum::new(4);
    let c = sp.add_field(FieldSpec::new("C", vec![], Parity::Odd, 1, Role::Field));
    let a = sp.add_field(FieldSpec::new("A", vec![0], Parity::Even, 0, Role::Field));
    let mut st = FieldSpec::new("Astar", vec![0], Parity::Odd, -1, Role::Antifield);
    st.conj = Some(a);
    let s = sp.add_field(st);
    let cc = jet(&sp, c, &[]);
    let ss = jet(&sp, s, &[]);
    let lhs = cc.mul(&ss).total_derivative(0);
    // independent oracle: product rule written term by term
    let oracle = P::from_terms(
        jet(&sp, c, &[0])
            .mul(&ss)
            .terms()
            .chain(cc.mul(&jet(&sp, s, &[0])).terms())
            .map(|(m, v)| (m.clone(), v.clone())),
    );
    assert_eq!(lhs, oracle);
    assert_eq!(lhs.len(), 2);
}

#[test]
fn momentum_degree() {
    let sp = spectrum();
    let phi = jet(&sp, 0, &[]);
    let bar = jet(&sp, 3, &[]);
    assert_eq!(bar.mul(&phi).grade_of(&sp, Grading::Momentum), Grade::Homogeneous(1));
    assert_eq!(phi.grade_of(&sp, Grading::Momentum), Grade::Homogeneous(0));
    assert_eq!((bar.clone() + bar.mul(&bar)).grade_of(&sp, Grading::Momentum), Grade::Inhomogeneous);
}

#[test]
fn contact_forms_of_odd_fields_commute() {
    let sp = spectrum();
    let dc = delta(&sp, 1, &[]);
    assert!(!dc.mul(&dc).is_zero());
    let dphi = delta(&sp, 0, &[]);
    assert!(dphi.mul(&dphi).is_zero());
    assert!(P::dx(0).mul(&P::dx(0)).is_zero());
    let dc2 = delta(&sp, 2, &[]);
    assert_eq!(dc.mul(&dc2), dc2.mul(&dc));
}

#[test]
fn left_derivative_sign() {
    let sp = spectrum();
    let c1 = jet(&sp, 1, &[]);
    let c2 = jet(&sp, 2, &[]);
    let g = Gen::Jet(sp.jet(2, MultiIndex::empty()));
    // ∂_l/∂c2 (c1 c2) = -c1
    assert_eq!(c1.mul(&c2).left_derivative(&g), -c1.clone());
    assert_eq!(c2.mul(&c1).left_derivative(&g), c1);
}

fn gen_strategy() -> impl Strategy<Value = (u32, Vec<u8>, bool, bool)> {
    (0u32..4, prop::collection::vec(0u8..2, 0..3), any::<bool>(), any::<bool>())
}

fn poly_strategy() -> impl Strategy<Value = P> {
    prop::collection::vec((prop::collection::vec(gen_strategy(), 0..4), -3i64..4), 0..4).prop_map(|terms| {
        let sp = spectrum();
        let mut out = P::zero();
        for (gens, c) in terms {
            let mut m = P::int(c);
            for (comp, idx, is_delta, is_dx) in gens {
                let g = if is_dx {
                    P::dx(idx.first().copied().unwrap_or(0))
                } else if is_delta {
                    delta(&sp, comp, &idx)
                } else {
                    jet(&sp, comp, &idx)
                };
                m = m.mul(&g);
            }
            out = out + m;
        }
        out
    })
}

fn homogeneous_parts(p: &P) -> Vec<(P, u32, bool)> {
    p.split_by(|m| m.bigrade())
        .into_iter()
        .map(|((f, o), v)| (v, f, o))
        .collect()
}

proptest! {
    #[test]
    fn graded_commutativity(a in poly_strategy(), b in poly_strategy()) {
        for (x, fx, px) in homogeneous_parts(&a) {
            for (y, fy, py) in homogeneous_parts(&b) {
                let odd = ((fx * fy) % 2 == 1) ^ (px && py);
                let s2: Rational = crate::coeff::sign(odd);
                prop_assert_eq!(x.mul(&y), y.mul(&x).scale(&s2));
            }
        }
    }

    #[test]
    fn associativity(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn total_derivatives_commute(a in poly_strategy()) {
        prop_assert_eq!(a.total_derivative(0).total_derivative(1), a.total_derivative(1).total_derivative(0));
    }

    #[test]
    fn total_derivative_is_leibniz(a in poly_strategy(), b in poly_strategy()) {
        let lhs = a.mul(&b).total_derivative(1);
        let rhs = a.total_derivative(1).mul(&b) + a.mul(&b.total_derivative(1));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn grades_add(a in poly_strategy(), b in poly_strategy()) {
        let sp = spectrum();
        for g in [Grading::Ghost, Grading::Momentum, Grading::Polyvector] {
            if let (Grade::Homogeneous(x), Grade::Homogeneous(y)) = (a.grade_of(&sp, g), b.grade_of(&sp, g)) {
                let ab = a.mul(&b);
                if !ab.is_zero() {
                    prop_assert_eq!(ab.grade_of(&sp, g), Grade::Homogeneous(x + y));
                }
            }
        }
    }

    #[test]
    fn canonical_form_is_stable(a in poly_strategy()) {
        let again = P::from_terms(a.terms().map(|(m, c)| (m.clone(), c.clone())));
        prop_assert_eq!(again, a);
    }
}
