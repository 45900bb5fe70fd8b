use fqcharpoly::arith::prime_factors;
use fqcharpoly::bounds::bound_for;
use fqcharpoly::charpoly_dist::{max_probability, ExactQ};
use fqcharpoly::derange::*;
use fqcharpoly::groups::{Family, GroupSpec, DEFAULT_ENUM_CAP};
use fqcharpoly::series::{coef_upper_product, ratio_to_f64, UpperFlavor};
use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

fn spec(f: Family, n: usize, q: u64) -> GroupSpec {
    GroupSpec::new(f, n, q).unwrap()
}

fn cond(kind: ConditionKind, b: Option<usize>) -> SubgroupCondition {
    SubgroupCondition::new(kind, b).unwrap()
}

fn conditions_for(family: Family) -> Vec<SubgroupCondition> {
    use ConditionKind::*;
    let mut out = vec![SubgroupCondition::trivial()];
    match family {
        Family::GL => out.extend([cond(ExtFieldGL, Some(2)), cond(ExtFieldGL, Some(3))]),
        Family::GU => out.push(cond(ExtFieldGU, Some(3))),
        Family::Sp => out.extend([cond(ExtFieldSp, Some(3)), cond(ExtFieldSp2, None), cond(UnitaryInSp, None)]),
        Family::Oplus | Family::Ominus => out.extend([cond(UnitaryInO, None), cond(ExtFieldSp, Some(3))]),
        Family::Mat => {}
    }
    out
}

#[test]
fn exact_matches_enumeration() {
    let specs = [
        spec(Family::GL, 2, 2),
        spec(Family::GL, 3, 2),
        spec(Family::GL, 4, 2),
        spec(Family::GL, 2, 3),
        spec(Family::GL, 3, 3),
        spec(Family::GU, 2, 2),
        spec(Family::GU, 3, 2),
        spec(Family::Sp, 1, 3),
        spec(Family::Sp, 2, 2),
        spec(Family::Sp, 2, 3),
        spec(Family::Oplus, 2, 3),
        spec(Family::Ominus, 2, 3),
        spec(Family::Oplus, 4, 2),
        spec(Family::Ominus, 4, 2),
        spec(Family::Oplus, 4, 3),
        spec(Family::Ominus, 4, 3),
        spec(Family::Oplus, 3, 3),
    ];
    for s in specs {
        for c in conditions_for(s.family) {
            let enumerated = enumerated_condition_prob(&s, &c, DEFAULT_ENUM_CAP).unwrap();
            let exact = exact_condition_prob(&s, &c).unwrap();
            assert_eq!(exact, enumerated, "{s} {c}");
        }
    }
}

#[test]
fn trivial_condition_has_full_mass() {
    for n in 1..=10 {
        for q in [2, 3] {
            let p = exact_condition_prob(&spec(Family::GL, n, q), &SubgroupCondition::trivial()).unwrap();
            assert!(p.is_one(), "GL({n},{q})");
        }
    }
    let o = exact_condition_mass_o_sum(6, 3, &SubgroupCondition::trivial()).unwrap();
    assert_eq!(o, ExactQ::from_integer(BigInt::from(2)));
}

#[test]
fn worked_examples() {
    let gl22 = spec(Family::GL, 2, 2);
    assert!(exact_condition_prob(&gl22, &cond(ConditionKind::ExtFieldGL, Some(2))).unwrap().is_one());
    // two irreducible cubics at 1/7 each plus the unipotent mass
    let gl32 = spec(Family::GL, 3, 2);
    let c3 = cond(ConditionKind::ExtFieldGL, Some(3));
    let exact = exact_condition_prob(&gl32, &c3).unwrap();
    let ctx = gl32.field().unwrap();
    let unip = fqcharpoly::charpoly_dist::prob_gl(3, 2, &fqcharpoly::PolyFq::from_ints(&ctx, &[1, 1, 1, 1])).unwrap();
    assert_eq!(exact, ExactQ::new(BigInt::from(2), BigInt::from(7)) + unip);
}

#[test]
fn counts_below_series_coefficients() {
    for q in [2u64, 3] {
        for b in [2usize, 3] {
            let product = coef_upper_product(q, b, UpperFlavor::Gl, 12).unwrap();
            for n in 1..=12 {
                let c =
                    count_condition_polys(&spec(Family::GL, n, q), &cond(ConditionKind::ExtFieldGL, Some(b))).unwrap();
                assert!(ExactQ::from_integer(c.clone()) <= product.coeffs()[n], "GL q={q} b={b} n={n}: {c}");
            }
        }
        let u = coef_upper_product(q, 3, UpperFlavor::U, 12).unwrap();
        let sp = coef_upper_product(q, 3, UpperFlavor::Sp, 12).unwrap();
        let sp2 = coef_upper_product(q, 2, UpperFlavor::SpEven, 12).unwrap();
        for n in 1..=12 {
            let c = count_condition_polys(&spec(Family::GU, n, q), &cond(ConditionKind::ExtFieldGU, Some(3))).unwrap();
            assert!(ExactQ::from_integer(c) <= u.coeffs()[n], "GU q={q} n={n}");
            let c = count_condition_polys(&spec(Family::Sp, n, q), &cond(ConditionKind::ExtFieldSp, Some(3))).unwrap();
            assert!(ExactQ::from_integer(c) <= sp.coeffs()[n], "Sp q={q} n={n}");
            // the b = 2 product undercounts this condition
            let c = count_condition_polys(&spec(Family::Sp, n, q), &cond(ConditionKind::ExtFieldSp2, None)).unwrap();
            assert!(ExactQ::from_integer(c) > sp2.coeffs()[n], "Sp2 q={q} n={n}");
        }
    }
}

#[test]
fn mass_below_count_times_bound() {
    for q in [2u64, 3] {
        for n in [4usize, 6, 8, 12] {
            for b in [2usize, 3] {
                let s = spec(Family::GL, n, q);
                let c = cond(ConditionKind::ExtFieldGL, Some(b));
                let mass = exact_condition_prob(&s, &c).unwrap();
                let count = ExactQ::from_integer(count_condition_polys(&s, &c).unwrap());
                assert!(mass <= &count * max_probability(&s).unwrap().value);
                assert!(mass <= &count * bound_for(&s).unwrap());
            }
            let s = spec(Family::Sp, n / 2, q);
            let c = cond(ConditionKind::ExtFieldSp2, None);
            let mass = exact_condition_prob(&s, &c).unwrap();
            let count = ExactQ::from_integer(count_condition_polys(&s, &c).unwrap());
            assert!(mass <= &count * bound_for(&s).unwrap());
        }
    }
}

#[test]
fn gl_and_sp_trends() {
    let gl = decay_trend(Family::GL, 2, 2, &[4, 8, 16, 32, 64]).unwrap();
    assert!(gl.raw_strictly_decreasing, "{:?}", gl.rows.iter().map(|r| r.raw_f64).collect::<Vec<_>>());
    assert!(gl.rows[4].raw < gl.rows[0].raw);
    let sp = decay_trend(Family::Sp, 3, 2, &[2, 4, 8, 16]).unwrap();
    assert!(sp.raw_strictly_decreasing, "{:?}", sp.rows.iter().map(|r| r.raw_f64).collect::<Vec<_>>());
    for t in [&gl, &sp] {
        assert!(t.rows.iter().all(|r| r.normalized <= t.normalized_max));
    }
}

#[test]
fn union_mass_decreases_along_doubling() {
    for q in [2u64, 3] {
        let gl: Vec<ExactQ> = [4, 8, 16, 32].iter().map(|&n| union_condition_mass(Family::GL, n, q).unwrap()).collect();
        assert!(gl.windows(2).all(|w| w[1] < w[0]), "GL q={q}: {:?}", gl.iter().map(ratio_to_f64).collect::<Vec<_>>());
        let sp: Vec<ExactQ> = [2, 4, 8, 16].iter().map(|&n| union_condition_mass(Family::Sp, n, q).unwrap()).collect();
        assert!(sp.windows(2).all(|w| w[1] < w[0]), "Sp q={q}: {:?}", sp.iter().map(ratio_to_f64).collect::<Vec<_>>());
    }
}

#[test]
fn prime_divisor_count_at_most_log2() {
    for n in 2u64..=1_000_000 {
        let k = prime_factors(n).len() as u32;
        assert!(1u64 << k <= n, "n={n}");
    }
}

#[test]
fn monte_carlo_covers_exact() {
    let cases = [
        (spec(Family::GL, 8, 2), cond(ConditionKind::ExtFieldGL, Some(2)), 100_000),
        (spec(Family::Sp, 4, 3), cond(ConditionKind::ExtFieldSp2, None), 100_000),
        (spec(Family::GU, 3, 2), cond(ConditionKind::ExtFieldGU, Some(3)), 20_000),
        (spec(Family::GL, 2, 2), cond(ConditionKind::ExtFieldGL, Some(2)), 2_000),
    ];
    for (s, c, trials) in cases {
        let exact = ratio_to_f64(&exact_condition_prob(&s, &c).unwrap());
        let est = mc_condition_prob(&s, &c, trials, 7, 0.99).unwrap();
        assert!(est.covers(exact), "{s} {c}: exact {exact}, ci [{}, {}]", est.ci_low, est.ci_high);
    }
}

#[test]
fn monte_carlo_is_deterministic() {
    let s = spec(Family::GL, 4, 2);
    let c = cond(ConditionKind::ExtFieldGL, Some(2));
    let a = mc_condition_prob(&s, &c, 5000, 11, 0.99).unwrap();
    let b = mc_condition_prob(&s, &c, 5000, 11, 0.99).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn condition_reads_every_factor(entries in prop::collection::vec((1usize..7, 1u32..7), 1..6), b in prop::sample::select(vec![2usize, 3, 5])) {
        let p = DegMultProfile::new(entries.clone()).unwrap();
        let c = cond(ConditionKind::ExtFieldGL, Some(b));
        let expect = entries.iter().all(|&(d, j)| d % b == 0 || (j as usize).is_multiple_of(b));
        prop_assert_eq!(satisfies_condition(&p, &c), expect);
        prop_assert!(satisfies_condition(&p, &SubgroupCondition::trivial()));
        if expect {
            prop_assert_eq!(p.dimension() % b, 0);
        }
    }
}
