use proptest::prelude::*;

use d4lift::artin_schreier::{class_add, reduce_class, FieldPoly};
use d4lift::lift::certificate::reduction_matches;
use d4lift::lift::construct_lift;
use d4lift::symbolic::SymbolicElem;
use d4lift::tower::{classify_supersimple, conjugate, norm_class, psi, SupersimpleDescription};
use d4lift::witt::{WittElem, WittRing};
use d4lift::{ExtensionPolicy, FieldElem, FieldSpec, LaurentPoly, Var};

const DEGREES: [u32; 5] = [1, 2, 4, 8, 16];

fn elem_in(n: u32) -> impl Strategy<Value = FieldElem> {
    let field = FieldSpec::new(n).unwrap();
    (0..field.size() as u64).prop_map(move |b| field.from_bits(b))
}

fn triple() -> impl Strategy<Value = (FieldElem, FieldElem, FieldElem)> {
    prop::sample::select(DEGREES.to_vec()).prop_flat_map(|n| (elem_in(n), elem_in(n), elem_in(n)))
}

fn poly_in(field: FieldSpec, var: Var, lo: i64, hi: i64) -> impl Strategy<Value = FieldPoly> {
    prop::collection::vec((lo..=hi, 0..field.size() as u64), 0..6).prop_map(move |terms| {
        LaurentPoly::from_terms(var, terms.into_iter().map(|(e, b)| (e, field.from_bits(b))))
    })
}

fn gf256() -> FieldSpec {
    FieldSpec::new(8).unwrap()
}

fn eta_strategy() -> impl Strategy<Value = FieldElem> {
    (2u64..256).prop_map(|b| gf256().from_bits(b))
}

fn description(d: i64) -> impl Strategy<Value = SupersimpleDescription> {
    let field = gf256();
    (eta_strategy(), 1u64..256, prop::collection::vec(0u64..256, 5)).prop_map(move |(eta, lead, rest)| {
        let mut q = LaurentPoly::zero(Var::T);
        if d > 0 {
            q.add_term(-d, field.from_bits(lead));
            for (j, b) in (1..d).step_by(2).zip(rest) {
                q.add_term(-j, field.from_bits(b));
            }
        }
        SupersimpleDescription::new(eta, q).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_axioms((a, b, c) in triple()) {
        let f = a.spec();
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a + a, f.zero());
        prop_assert_eq!(a * f.one(), a);
        if let Some(inv) = a.inverse() {
            prop_assert_eq!(a * inv, f.one());
        } else {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn frobenius_is_additive_and_inverted_by_sqrt((a, b, _) in triple()) {
        prop_assert_eq!((a + b).square(), a.square() + b.square());
        prop_assert_eq!(a.square().sqrt(), a);
        prop_assert_eq!(a.pow(a.spec().size()), a);
        prop_assert_eq!(a.square().trace(), a.trace());
    }

    #[test]
    fn witt_reduction_is_a_ring_map(
        eta in eta_strategy(),
        xs in prop::array::uniform4(any::<u64>()),
        ys in prop::array::uniform4(any::<u64>()),
        precision in 1u32..=64,
    ) {
        let ring = WittRing::new(gf256(), precision, eta).unwrap();
        let elem = |c: [u64; 4]| {
            let coords = c.map(|w| (0..8).map(|i| (w >> (8 * i)) & 0xff).collect::<Vec<_>>());
            WittElem::from_coordinates(&ring, coords).unwrap()
        };
        let (x, y) = (elem(xs), elem(ys));
        prop_assert_eq!((&x + &y).reduce(), x.reduce() + y.reduce());
        prop_assert_eq!((&x * &y).reduce(), x.reduce() * y.reduce());
        if x.is_unit() {
            prop_assert_eq!(&x * &x.inverse().unwrap(), WittElem::one(&ring));
        }
    }

    #[test]
    fn symbolic_products_do_not_depend_on_grouping(
        picks in prop::collection::vec(0usize..7, 1..7),
        coeffs in prop::collection::vec(-3i64..=3, 7),
    ) {
        let atoms = [
            SymbolicElem::s(),
            SymbolicElem::beta(),
            SymbolicElem::eta(),
            SymbolicElem::gamma(),
            SymbolicElem::x_pow(1),
            SymbolicElem::t_pow(1),
            SymbolicElem::q(1),
        ];
        let factors: Vec<SymbolicElem> = picks
            .iter()
            .map(|&i| &atoms[i].scale(coeffs[i]) + &SymbolicElem::int(coeffs[(i + 1) % 7]))
            .collect();
        let left = factors.iter().fold(SymbolicElem::one(), |acc, f| &acc * f);
        let right = factors.iter().rev().fold(SymbolicElem::one(), |acc, f| f * &acc);
        let unreduced = factors.iter().fold(SymbolicElem::one(), |acc, f| acc.mul_unreduced(f)).normalize();
        prop_assert!(left.is_normal());
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(&left, &unreduced);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reduction_is_idempotent_and_additive(
        f in poly_in(gf256(), Var::V, -12, 4),
        g in poly_in(gf256(), Var::V, -12, 4),
    ) {
        let field = gf256();
        let cf = reduce_class(field, &f).unwrap();
        prop_assert_eq!(&reduce_class(field, &cf.representative()).unwrap(), &cf);
        let cg = reduce_class(field, &g).unwrap();
        let sum = reduce_class(field, &f.add(&g).unwrap()).unwrap();
        prop_assert_eq!(sum, class_add(&cf, &cg).unwrap());
        for (e, _) in cf.representative().terms() {
            prop_assert!(e < 0 && e % 2 != 0);
        }
    }

    #[test]
    fn reduction_ignores_term_order(terms in prop::collection::vec((-12i64..=4, 1u64..256), 0..8)) {
        let field = gf256();
        let forward = LaurentPoly::from_terms(Var::V, terms.iter().map(|&(e, b)| (e, field.from_bits(b))));
        let backward = LaurentPoly::from_terms(Var::V, terms.iter().rev().map(|&(e, b)| (e, field.from_bits(b))));
        prop_assert_eq!(reduce_class(field, &forward).unwrap(), reduce_class(field, &backward).unwrap());
    }

    #[test]
    fn adding_a_coboundary_keeps_the_class(
        f in poly_in(gf256(), Var::V, -12, 2),
        q in poly_in(gf256(), Var::V, -6, 2),
    ) {
        let field = gf256();
        let shifted = f.add(&q.mul(&q).unwrap()).unwrap().sub(&q).unwrap();
        prop_assert_eq!(reduce_class(field, &f).unwrap(), reduce_class(field, &shifted).unwrap());
    }

    #[test]
    fn conjugation_is_an_involution_and_norm_is_additive(
        f in poly_in(gf256(), Var::V, -9, 0),
        g in poly_in(gf256(), Var::V, -9, 0),
    ) {
        let field = gf256();
        prop_assert_eq!(&conjugate(&conjugate(&f).unwrap()).unwrap(), &f);
        let cf = reduce_class(field, &f).unwrap();
        let cg = reduce_class(field, &g).unwrap();
        let n_sum = norm_class(&class_add(&cf, &cg).unwrap()).unwrap();
        let sum_n = class_add(&norm_class(&cf).unwrap(), &norm_class(&cg).unwrap()).unwrap();
        prop_assert_eq!(n_sum, sum_n);
    }

    #[test]
    fn psi_is_additive(a in eta_strategy(), b in eta_strategy()) {
        prop_assert_eq!(psi(a + b), class_add(&psi(a), &psi(b)).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classify_recovers_descriptions(
        desc in prop::sample::select(vec![0i64, 1, 3, 5, 7]).prop_flat_map(description)
    ) {
        let back = classify_supersimple(&desc.class(), ExtensionPolicy::Fail).unwrap();
        prop_assert_eq!(back.description.eta(), desc.eta());
        prop_assert_eq!(back.description.class(), desc.class());
    }

    #[test]
    fn lifts_reduce_to_their_description(
        desc in prop::sample::select(vec![0i64, 1, 3, 5, 7]).prop_flat_map(description),
        precision in 3u32..=64,
    ) {
        let cert = construct_lift(&desc, precision).unwrap();
        let report = reduction_matches(&cert, &desc);
        prop_assert!(report.matches(), "{:?}", report.diffs);
        prop_assert!(cert.checks.identity_verified && cert.checks.h_division_exact);
        prop_assert!(cert.genus.consistent());
    }
}
