use std::collections::BTreeSet;

use k3moduli::classgroup::{reduced_forms, ClassGroup};
use k3moduli::k3::TranscLattice;
use k3moduli::moduli::{galois_model, mq_is_galois, GaloisElement};
use k3moduli::orders::{compose_general, form_to_ideal, ideal_to_form, multiply, order_of_disc};
use k3moduli::qforms::{compose, principal_class, reduce, FormClass, QuadForm, Transform};
use proptest::prelude::*;

fn discs(max: i64) -> impl Iterator<Item = i64> {
    (3..=max).map(|n| -n).filter(|d| d.rem_euclid(4) <= 1)
}

fn disc_strategy(max: i64) -> impl Strategy<Value = i64> {
    (3..=max).prop_filter_map("not a discriminant", |n| (n % 4 == 0 || n % 4 == 3).then_some(-n))
}

/// A random class of a random discriminant.
fn class_strategy(max: i64) -> impl Strategy<Value = (ClassGroup, usize)> {
    disc_strategy(max).prop_flat_map(|d| {
        let g = ClassGroup::enumerate(d).unwrap();
        let h = g.order();
        (Just(g), 0..h)
    })
}

fn transform_strategy() -> impl Strategy<Value = Transform> {
    [-5i64..=5, -5i64..=5, -5i64..=5, -5i64..=5]
        .prop_map(|[p, q, r, s]| Transform { p, q, r, s })
        .prop_filter("det 1", |t| t.det() == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reduction_is_idempotent_and_tracked(a in 1i64..500, b in -800i64..800, c in 1i64..500) {
        let q = QuadForm::new(a, b, c);
        prop_assume!(q.is_positive_definite());
        let (cls, t) = reduce(q).unwrap();
        prop_assert!(cls.rep().is_reduced());
        prop_assert_eq!(t.det(), 1);
        prop_assert_eq!(t.apply(&q), cls.rep());
        prop_assert_eq!(reduce(cls.rep()).unwrap().0, cls);
    }

    #[test]
    fn class_is_invariant_under_sl2(
        (g, i) in class_strategy(1500),
        m in transform_strategy(),
    ) {
        let r = g.class(i).rep();
        prop_assert_eq!(reduce(m.apply(&r)).unwrap().0, *g.class(i));
    }

    #[test]
    fn ideal_composition_matches_dirichlet((g, i) in class_strategy(2000), j in 0usize..64) {
        let j = j % g.order();
        let (x, y) = (g.class(i), g.class(j));
        prop_assert_eq!(compose_general(x, y).unwrap(), compose(x, y).unwrap());
    }

    #[test]
    fn lattice_product_is_commutative_and_associative(
        d_k in prop::sample::select(vec![-3i64, -4, -7, -8, -11, -15, -20, -23, -24, -31, -39, -47]),
        f in prop::array::uniform3(1i64..=6),
        picks in prop::array::uniform3(0usize..1000),
    ) {
        let cls: Vec<FormClass> = (0..3)
            .map(|k| {
                let g = ClassGroup::enumerate(f[k] * f[k] * d_k).unwrap();
                *g.class(picks[k] % g.order())
            })
            .collect();
        let l: Vec<_> = cls.iter().map(|c| form_to_ideal(c).unwrap()).collect();
        let xy = multiply(&l[0], &l[1]).unwrap();
        let yx = multiply(&l[1], &l[0]).unwrap();
        prop_assert_eq!(ideal_to_form(&xy).unwrap(), ideal_to_form(&yx).unwrap());
        let left = multiply(&xy, &l[2]).unwrap();
        let right = multiply(&l[0], &multiply(&l[1], &l[2]).unwrap()).unwrap();
        prop_assert_eq!(ideal_to_form(&left).unwrap(), ideal_to_form(&right).unwrap());
        // conductor of the multiplier ring of a product of proper ideals
        let gcd = |a: i64, b: i64| num_integer::Integer::gcd(&a, &b);
        prop_assert_eq!(xy.order().conductor(), gcd(f[0], f[1]));
        prop_assert_eq!(left.order().conductor(), gcd(gcd(f[0], f[1]), f[2]));
    }

    #[test]
    fn conjugation_then_complex_conjugation(
        (g, i) in class_strategy(1200),
        s in 0usize..1000,
        m in 1i64..6,
    ) {
        let q0 = *g.class(i);
        let t = TranscLattice::from_parts(m, q0).unwrap();
        let s = g.class(s % g.order());
        let lhs = t.conjugate_lattice(s).unwrap().complex_conjugate();
        let g2 = compose(s, s).unwrap();
        let rhs = TranscLattice::from_parts(m, compose(&g2, &q0.inverse()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cm_field_ignores_scaling((g, i) in class_strategy(1500), n in 1i64..8) {
        let t = TranscLattice::from_parts(1, *g.class(i)).unwrap();
        prop_assert_eq!(t.scale(n).unwrap().cm_field(), t.cm_field());
        prop_assert_eq!(t.scale(n).unwrap().q0(), t.q0());
    }

    #[test]
    fn shioda_mitani_recomposes((g, i) in class_strategy(1500), m in 1i64..5) {
        let t = TranscLattice::from_parts(m, *g.class(i)).unwrap();
        let sm = t.shioda_mitani().unwrap();
        prop_assert_eq!(compose_general(&sm.q1, &sm.q2).unwrap(), t.q0());
        prop_assert!(sm.tau.imag() > 0.0);
    }

    #[test]
    fn lattice_identity_is_the_reduced_triple(a in 1i64..40, b in -40i64..40, c in 1i64..40, m in 1i64..4) {
        let q = QuadForm::new(a, b, c);
        prop_assume!(q.is_positive_definite());
        let t = TranscLattice::from_form(q.scale(m)).unwrap();
        let (cls, _) = reduce(q).unwrap();
        let (k, _) = q.primitive_part();
        prop_assert_eq!(t.m(), m * k);
        prop_assert_eq!(t.form(), cls.rep().scale(m));
        prop_assert_eq!(t.disc(), q.scale(m).discriminant());
    }

    #[test]
    fn galois_model_laws((g, i) in class_strategy(2000)) {
        let t = TranscLattice::from_parts(1, *g.class(i)).unwrap();
        let model = galois_model(&t).unwrap();
        let h = g.order();
        prop_assert_eq!(model.order(), 2 * h);
        let iota = model.iota();
        let id = model.identity();
        prop_assert_eq!(model.mul(iota, iota), id);
        for c in 0..h {
            let c = GaloisElement { class: c, flip: false };
            let conj = model.mul(model.mul(iota, c), iota);
            prop_assert_eq!(conj, model.inv(c));
        }
        let mk = model.subgroup_mk();
        prop_assert!(model.is_subgroup(mk));
        prop_assert!(model.is_normal(mk));
        let genus = g.genus_order();
        prop_assert_eq!(h / mk.len(), genus);
        prop_assert!(model.is_subgroup(model.subgroup_mq()));
        prop_assert_eq!(model.index(model.subgroup_mq()), genus);
        // normality of the stabilizer is the exponent of C dividing 4
        let exp = g.elementary_divisors().last().copied().unwrap_or(1);
        prop_assert_eq!(mq_is_galois(&t).unwrap(), 4 % exp == 0);
    }
}

#[test]
fn composition_group_laws_exhaustive() {
    for d in discs(2000) {
        let g = ClassGroup::enumerate(d).unwrap();
        let e = principal_class(d).unwrap();
        for x in g.classes() {
            assert_eq!(compose(x, &e).unwrap(), *x, "D = {d}");
            assert_eq!(compose(x, &x.inverse()).unwrap(), e, "D = {d}");
        }
        let h = g.order();
        for x in 0..h {
            for y in 0..h {
                let xy = g.mul(x, y);
                for z in 0..h {
                    assert_eq!(g.mul(xy, z), g.mul(x, g.mul(y, z)), "D = {d}");
                }
            }
        }
    }
}

#[test]
fn cayley_table_is_a_latin_square() {
    for d in discs(2000) {
        let g = ClassGroup::enumerate(d).unwrap();
        let h = g.order();
        for k in 0..h {
            let row: BTreeSet<_> = g.cayley()[k].iter().copied().collect();
            let col: BTreeSet<_> = (0..h).map(|r| g.cayley()[r][k]).collect();
            assert_eq!(row.len(), h);
            assert_eq!(col.len(), h);
        }
    }
}

#[test]
fn genus_theory_exhaustive() {
    for d in discs(2000) {
        let g = ClassGroup::enumerate(d).unwrap();
        let h = g.order();
        let pg: BTreeSet<_> = g.principal_genus().into_iter().collect();
        assert_eq!(h, pg.len() * g.two_torsion().len(), "D = {d}");
        for x in 0..h {
            let cx = *g.class(x);
            assert_eq!(g.genus_of(&cx).unwrap(), g.genus_of(&cx.inverse()).unwrap());
            for y in 0..h {
                let same = g.genus_of(&cx).unwrap() == g.genus_of(g.class(y)).unwrap();
                assert_eq!(same, pg.contains(&g.mul(x, g.inv(y))), "D = {d}");
            }
        }
        // 2-torsion is the set of ambiguous classes
        let ambiguous: BTreeSet<_> = (0..h).filter(|&i| g.class(i).rep().is_ambiguous()).collect();
        let torsion: BTreeSet<_> = g.two_torsion().into_iter().collect();
        assert_eq!(ambiguous, torsion, "D = {d}");
    }
}

#[test]
fn ideal_round_trip_exhaustive() {
    for d in discs(2000) {
        let order = order_of_disc(d).unwrap();
        for q in reduced_forms(d).unwrap() {
            let cls = FormClass::of(q).unwrap();
            let lat = form_to_ideal(&cls).unwrap();
            assert_eq!(lat.order(), order);
            assert!(lat.verify_multiplier_ring());
            assert_eq!(ideal_to_form(&lat).unwrap(), cls, "D = {d}");
        }
    }
}

#[test]
fn orbit_is_the_principal_genus_coset() {
    for d in discs(2000) {
        let g = ClassGroup::enumerate(d).unwrap();
        let pg = g.principal_genus();
        for i in 0..g.order() {
            let t = TranscLattice::from_parts(1, *g.class(i)).unwrap();
            let orbit: BTreeSet<_> = t.galois_orbit_in(&g).unwrap().into_iter().collect();
            let conj: BTreeSet<_> = g.classes().iter().map(|s| t.conjugate_lattice(s).unwrap()).collect();
            let coset: BTreeSet<_> =
                pg.iter().map(|&p| TranscLattice::from_parts(1, *g.class(g.mul(i, p))).unwrap()).collect();
            assert_eq!(orbit, conj, "D = {d}");
            assert_eq!(orbit, coset, "D = {d}");
        }
    }
}
