use fqcharpoly::counting::{count_N, count_N0, count_star, count_unitary, CountFlavor, CountTable};
use num_bigint::BigInt;

#[test]
fn recursion_matches_brute_force() {
    for q in [2u64, 3, 4, 5] {
        for flavor in [CountFlavor::Plain, CountFlavor::Star] {
            let max_d = 6;
            let built = CountTable::build(q, flavor, max_d).unwrap();
            let brute = CountTable::brute_force(q, flavor, max_d).unwrap();
            assert_eq!(built, brute, "q={q} {flavor:?}");
        }
    }
    for q in [2u64, 3] {
        let built = CountTable::build(q, CountFlavor::Unitary, 3).unwrap();
        let brute = CountTable::brute_force(q, CountFlavor::Unitary, 3).unwrap();
        assert_eq!(built, brute, "unitary q={q}");
    }
}

#[test]
fn unitary_counts_partition_irreducibles() {
    for q in [2u64, 3, 4, 5, 7] {
        for d in 1..=24 {
            let (n, m) = count_unitary(q, d);
            assert_eq!(n.clone() + m * 2, count_N(q * q, d));
            if d % 2 == 0 {
                assert_eq!(n, BigInt::from(0));
            }
        }
    }
}

#[test]
fn star_counts_partition_irreducibles() {
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        let e = if q % 2 == 0 { 1 } else { 2 };
        for d in 1..=24 {
            let (n, m) = count_star(q, d);
            let linear = if d == 1 { e } else { 0 };
            assert_eq!(n + m.clone() * 2 + linear, count_N(q, d));
            // M*(q;d) ≤ q^d/(2d)
            assert!(m * 2 * d <= BigInt::from(q).pow(d as u32));
        }
        for d in 1..=12 {
            // N*(q;2d) ≤ q^d/(2d)
            let (n, _) = count_star(q, 2 * d);
            let bound = BigInt::from(q).pow(d as u32);
            assert!(n * 2 * d <= bound, "q={q} d={d}");
        }
    }
}

#[test]
fn degree_scaling_inequality() {
    for q in [2u64, 3] {
        for b in [2usize, 3, 5] {
            for d in 1..=4 {
                assert!(count_N(q, b * d) * b <= count_N(q.pow(b as u32), d), "q={q} b={b} d={d}");
            }
        }
    }
}

#[test]
fn necklace_lower_bounds() {
    for q in [2u64, 3, 4, 5, 7, 8, 9, 11] {
        for d in 1..=20usize {
            let qd = BigInt::from(q).pow(d as u32);
            assert!(qd.clone() <= count_N0(q, d) * 2 * d);
            let q2d = qd.clone() * &qd;
            assert!(q2d * 3 <= count_N0(q * q, d) * 4 * d);
        }
    }
}
