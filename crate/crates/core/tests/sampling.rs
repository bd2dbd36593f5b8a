mod common;

use std::collections::BTreeSet;

use common::*;
use plhvcsp::formula::{Atom, Rel, Term};
use plhvcsp::qnum::{LaurentNum, Rational};
use plhvcsp::sampling::{atoms_preserved, build_sample, eta, predicted_size, sample_domain, SampleOptions};
use proptest::prelude::*;

fn naive(atoms: &BTreeSet<Atom>, laurent: &[LaurentNum], values: &[Rational]) -> bool {
    let n = laurent.len();
    atoms.iter().all(|atom| {
        let vars = atom.vars();
        let local = atom.map_vars(|v| vars.iter().position(|w| *w == v).unwrap());
        (0..n).all(|i| {
            (0..n).all(|j| {
                !local.holds(&[laurent[i].clone(), laurent[j].clone()]) || local.holds(&[values[i].clone(), values[j].clone()])
            })
        })
    })
}

fn coeff() -> impl Strategy<Value = Rational> {
    (-3i64..=3, 1i64..=2).prop_filter("nonzero", |(n, _)| *n != 0).prop_map(|(n, d)| Rational::new(n, d))
}

fn rel() -> impl Strategy<Value = Rel> {
    prop_oneof![Just(Rel::Lt), Just(Rel::Le), Just(Rel::Eq)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    /// Random points with images that are either `eta` at some `eps` or
    /// perturbed, so both outcomes occur.
    #[test]
    fn atom_check_matches_pair_scan(
        coeffs in prop::collection::vec(prop::array::uniform6(-2i64..=2), 1..8),
        atoms in prop::collection::vec((coeff(), rel(), coeff(), prop::option::of(-2i64..=2)), 1..4),
        e in 2i64..12,
        noise in prop::collection::vec(-1i64..=1, 8),
    ) {
        let laurent: Vec<LaurentNum> = coeffs.iter().map(|c| LaurentNum::from_coeffs(c.map(Rational::from_integer))).collect();
        let eps = Rational::new(1, e);
        let values: Vec<Rational> = laurent.iter().zip(&noise).map(|(l, k)| &eta(l, &eps) + &Rational::new(*k, 3)).collect();
        let atoms: BTreeSet<Atom> = atoms
            .into_iter()
            .map(|(a, r, b, c)| match c {
                Some(c) => Atom::new(Term::scaled_var(a, 1), r, Term::constant(Rational::from_integer(c) * b)),
                None => Atom::new(Term::scaled_var(a, 0), r, Term::scaled_var(b, 1)),
            })
            .collect();
        prop_assert_eq!(atoms_preserved(&atoms, &laurent, &values), naive(&atoms, &laurent, &values));
    }
}

#[test]
fn sampled_domains_grow_with_d_and_keep_order() {
    let mut r = rng(11);
    for g in [submodular_structure(&mut r), increasing_structure(&mut r), general_structure(&mut r)] {
        let mut last = 0;
        for d in 1..=3 {
            let dom = sample_domain(&g, d, &SampleOptions::default(), None).unwrap();
            assert_eq!(dom.laurent.len() as u128, predicted_size(dom.c.len(), d));
            assert!(dom.laurent.len() > last);
            last = dom.laurent.len();
            assert!(dom.laurent.windows(2).all(|w| w[0] < w[1]));
            assert!(dom.values.windows(2).all(|w| w[0] < w[1]));
            assert!(dom.eps <= dom.base_eps);
            assert!(atoms_preserved(&dom.atoms, &dom.laurent, &dom.values));
        }
    }
}

#[test]
fn sample_contains_zero_and_is_symmetric() {
    let mut r = rng(12);
    let g = general_structure(&mut r);
    let s = build_sample(&g, 2, &SampleOptions::default()).unwrap();
    let dom = &s.structure.domain;
    assert!(dom.contains(&Rational::zero()));
    for v in dom {
        assert!(dom.contains(&-v.clone()), "{v} without its negation");
    }
}
