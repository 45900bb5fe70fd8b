use fqcharpoly::charpoly_dist::{enumerate_charpoly_distribution, ExactQ};
use fqcharpoly::derange::DegMultProfile;
use fqcharpoly::groups::{Family, GroupSpec};
use fqcharpoly::invariable::*;
use fqcharpoly::series::ratio_to_f64;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

#[test]
fn duality_of_invariant_subsets() {
    for n in 1..=12 {
        for ct in partitions(n) {
            for e in 0..=n {
                assert_eq!(has_invariant_subset(&ct, e), has_invariant_subset(&ct, n - e), "{ct:?} e={e}");
            }
        }
    }
}

#[test]
fn partition_measure_matches_exhaustive_sym() {
    for n in 1..=8 {
        let perms = permutations(n);
        let total = BigInt::from(perms.len());
        let types: Vec<CycleType> = perms.iter().map(|p| CycleType::of_permutation(p)).collect();
        for e in 0..=n {
            let hit = types.iter().filter(|ct| !has_invariant_subset(ct, e)).count();
            assert_eq!(
                prob_sym_no_invariant(n, e).unwrap(),
                ExactQ::new(BigInt::from(hit), total.clone()),
                "n={n} e={e}"
            );
        }
        let mass: ExactQ = partitions(n).iter().map(CycleType::probability).sum();
        assert!(mass.is_one());
    }
}

#[test]
fn gl_matches_enumeration() {
    for (n, q) in [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (2, 4), (2, 5), (2, 7)] {
        let dist = enumerate_charpoly_distribution(&GroupSpec::new(Family::GL, n, q).unwrap()).unwrap();
        for e in 0..=n {
            let mut expect = ExactQ::zero();
            for (phi, p) in &dist {
                if !has_invariant_subspace(&DegMultProfile::of_poly(phi).unwrap(), e) {
                    expect += p;
                }
            }
            assert_eq!(prob_gl_no_invariant(n, q, e).unwrap(), expect, "GL({n},{q}) e={e}");
        }
    }
}

#[test]
fn strict_inequality_grid() {
    for n in 2..=12 {
        for q in [2, 3] {
            for e in 1..n {
                let c = check_strict_inequality(n, q, e).unwrap();
                assert!(c.holds, "n={n} q={q} e={e}: {} vs {}", c.gl, c.sym);
            }
        }
    }
}

#[test]
fn exact_invariable_matches_pairing() {
    for n in 1..=6 {
        let types = partitions(n);
        for r in 1..=2 {
            let mut expect = ExactQ::zero();
            if r == 1 {
                for a in &types {
                    if invariably_transitive(std::slice::from_ref(a)).unwrap() {
                        expect += a.probability();
                    }
                }
            } else {
                for a in &types {
                    for b in &types {
                        if invariably_transitive(&[a.clone(), b.clone()]).unwrap() {
                            expect += a.probability() * b.probability();
                        }
                    }
                }
            }
            assert_eq!(exact_invariable_sym(n, r).unwrap(), expect, "n={n} r={r}");
        }
    }
}

#[test]
fn exact_invariable_gl_matches_pairing() {
    for (n, q) in [(3, 2), (4, 2), (2, 3)] {
        let dist = enumerate_charpoly_distribution(&GroupSpec::new(Family::GL, n, q).unwrap()).unwrap();
        let profiles: Vec<(DegMultProfile, ExactQ)> =
            dist.iter().map(|(phi, p)| (DegMultProfile::of_poly(phi).unwrap(), p.clone())).collect();
        let mut expect = ExactQ::zero();
        for (a, pa) in &profiles {
            for (b, pb) in &profiles {
                if profiles_block_all(&[a.clone(), b.clone()]).unwrap() {
                    expect += pa * pb;
                }
            }
        }
        assert_eq!(exact_invariable_gl(n, q, 2).unwrap(), expect, "GL({n},{q})");
    }
}

#[test]
fn more_elements_help() {
    for n in 2..=9 {
        let probs: Vec<ExactQ> = (1..=4).map(|r| exact_invariable_sym(n, r).unwrap()).collect();
        assert!(probs.windows(2).all(|w| w[0] <= w[1]), "n={n}");
        for e in 1..n {
            assert!(probs[0] <= prob_sym_no_invariant(n, e).unwrap());
        }
    }
}

#[test]
fn monte_carlo_covers_exact_small_n() {
    for (n, r) in [(3, 1), (4, 2), (6, 2), (8, 3)] {
        let exact = ratio_to_f64(&exact_invariable_sym(n, r).unwrap());
        let est = mc_invariable(n, r, 40_000, 5, 0.99).unwrap();
        assert!(est.estimate.covers(exact), "n={n} r={r}: {exact} vs {:?}", est.estimate);
    }
    let exact = ratio_to_f64(&exact_invariable_gl(3, 2, 2).unwrap());
    let est = mc_invariable_gl(3, 2, 2, 20_000, 5, 0.99).unwrap();
    assert!(est.estimate.covers(exact), "GL(3,2): {exact} vs {:?}", est.estimate);
}

#[test]
fn monte_carlo_is_deterministic() {
    assert_eq!(mc_invariable(20, 3, 5000, 9, 0.99).unwrap(), mc_invariable(20, 3, 5000, 9, 0.99).unwrap());
}

proptest! {
    #[test]
    fn cycle_type_of_shuffle_sums_to_n(perm in Just((0..15usize).collect::<Vec<_>>()).prop_shuffle()) {
        let ct = CycleType::of_permutation(&perm);
        prop_assert_eq!(ct.n(), 15);
        prop_assert!(has_invariant_subset(&ct, 0) && has_invariant_subset(&ct, 15));
    }
}
