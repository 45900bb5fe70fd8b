use std::collections::BTreeSet;

use fqcharpoly::charpoly_dist::{
    class_mass, enumerate_charpoly_counts, enumerate_charpoly_distribution, max_probability, prob, prob_gl, prob_gu,
    prob_mat, prob_o_sum, prob_sp, ratio, unipotent_count_o_even, ExactQ,
};
use fqcharpoly::field::{gf, quadratic_tower};
use fqcharpoly::groups::{group_order, Family, GroupSpec, DEFAULT_ENUM_CAP};
use fqcharpoly::poly::PolyFq;
use num_bigint::BigInt;
use num_traits::{One, Zero};

fn q(n: i64, d: i64) -> ExactQ {
    ratio(BigInt::from(n), BigInt::from(d))
}

fn spec(f: Family, n: usize, q: u64) -> GroupSpec {
    GroupSpec::new(f, n, q).unwrap()
}

/// Formula vs enumeration for every polynomial that either side reports.
fn check_oracle(s: &GroupSpec) {
    let members: Vec<GroupSpec> = if s.family.is_orthogonal() {
        vec![spec(Family::Oplus, s.n, s.q), spec(Family::Ominus, s.n, s.q)]
    } else {
        vec![*s]
    };
    let mut empirical: std::collections::BTreeMap<PolyFq, ExactQ> = Default::default();
    for m in &members {
        let order = group_order(m).unwrap();
        for (phi, c) in enumerate_charpoly_counts(m, DEFAULT_ENUM_CAP).unwrap() {
            *empirical.entry(phi).or_insert_with(ExactQ::zero) += ratio(c, order.clone());
        }
    }
    let formula = enumerate_charpoly_distribution(s).unwrap();
    let keys: BTreeSet<PolyFq> = empirical.keys().cloned().chain(formula.iter().map(|(p, _)| p.clone())).collect();
    for phi in keys {
        let exact = prob(s, &phi).unwrap();
        let seen = empirical.get(&phi).cloned().unwrap_or_else(ExactQ::zero);
        assert_eq!(exact, seen, "{s}: {phi}");
    }
}

#[test]
fn formulas_match_enumeration() {
    let specs = [
        spec(Family::GL, 2, 2),
        spec(Family::GL, 3, 2),
        spec(Family::GL, 2, 3),
        spec(Family::Mat, 2, 2),
        spec(Family::Mat, 2, 3),
        spec(Family::GU, 1, 2),
        spec(Family::GU, 2, 2),
        spec(Family::GU, 2, 3),
        spec(Family::Sp, 1, 2),
        spec(Family::Sp, 1, 3),
        spec(Family::Sp, 2, 2),
        spec(Family::Oplus, 2, 3),
        spec(Family::Oplus, 3, 3),
        spec(Family::Oplus, 2, 5),
        spec(Family::Oplus, 2, 2),
        spec(Family::Oplus, 4, 2),
    ];
    for s in &specs {
        check_oracle(s);
    }
}

#[test]
fn worked_examples() {
    let f2 = gf(2).unwrap();
    let f3 = gf(3).unwrap();
    let p2 = |c: &[i64]| PolyFq::from_ints(&f2, c);
    let p3 = |c: &[i64]| PolyFq::from_ints(&f3, c);
    assert_eq!(prob_gl(2, 2, &p2(&[1, 0, 1])).unwrap(), q(2, 3));
    assert_eq!(prob_gl(2, 2, &p2(&[1, 1, 1])).unwrap(), q(1, 3));
    assert_eq!(prob_gl(2, 2, &p2(&[0, 0, 1])).unwrap(), q(0, 1));
    assert_eq!(prob_mat(2, 2, &p2(&[1, 0, 1])).unwrap(), q(1, 4));
    assert_eq!(prob_mat(1, 3, &p3(&[1, 1])).unwrap(), q(1, 3));
    let f4 = quadratic_tower(&f2).unwrap();
    assert_eq!(prob_gu(2, 2, &PolyFq::from_ints(&f4, &[1, 0, 1])).unwrap(), q(2, 9));
    let w = f4.elem(2).unwrap();
    assert_eq!(prob_gu(1, 2, &PolyFq::new(&f4, vec![w, f4.one()])).unwrap(), q(1, 3));
    assert_eq!(prob_sp(1, 3, &p3(&[1, -2, 1])).unwrap(), q(3, 8));
    assert_eq!(prob_sp(1, 2, &p2(&[1, 1, 1])).unwrap(), q(1, 3));
    assert_eq!(prob_sp(1, 3, &p3(&[-1, 0, 1])).unwrap(), q(0, 1));
    assert_eq!(prob_o_sum(2, 3, &p3(&[1, -2, 1])).unwrap(), q(3, 8));
    assert_eq!(prob_o_sum(2, 3, &p3(&[-1, 0, 1])).unwrap(), q(1, 1));
    assert_eq!(unipotent_count_o_even(1, 2, true).unwrap(), BigInt::from(2));
    assert_eq!(unipotent_count_o_even(1, 2, false).unwrap(), BigInt::from(4));
    assert_eq!(unipotent_count_o_even(2, 2, true).unwrap(), BigInt::from(40));
    assert!(unipotent_count_o_even(2, 3, true).is_err());
    let dist = enumerate_charpoly_distribution(&spec(Family::GL, 2, 2)).unwrap();
    assert_eq!(dist, vec![(p2(&[1, 0, 1]), q(2, 3)), (p2(&[1, 1, 1]), q(1, 3))]);
    assert!(prob_gl(3, 2, &p2(&[1, 1])).is_err());
}

#[test]
fn class_model_sums_to_one_and_matches_maxima() {
    for s in [
        spec(Family::GL, 3, 3),
        spec(Family::Mat, 3, 2),
        spec(Family::GU, 3, 2),
        spec(Family::Sp, 2, 3),
        spec(Family::Sp, 3, 2),
        spec(Family::Oplus, 4, 3),
        spec(Family::Oplus, 3, 5),
    ] {
        let dist = enumerate_charpoly_distribution(&s).unwrap();
        let total: ExactQ = dist.iter().map(|(_, p)| p.clone()).sum();
        let expected = if s.family.is_orthogonal() { q(2, 1) } else { ExactQ::one() };
        assert_eq!(total, expected, "{s}");
        assert_eq!(class_mass(&s, |_, _| true).unwrap(), expected, "{s}");
        let max = dist.iter().map(|(_, p)| p.clone()).max().unwrap();
        assert_eq!(max_probability(&s).unwrap().value, max, "{s}");
    }
}
