use intmod::arith::CycNumber;
use intmod::fixtures::{find_relabeling, nonpointed};
use intmod::fusion::FusionData;
use intmod::modular::{
    amv_modulus, amv_solve_mod, central_charge, classify_modular, fs_indicator, ord_t,
    verify_modular, ZmodSystem,
};
use num_rational::Rational64;
use proptest::prelude::*;

#[test]
fn published_data_pass_every_check() {
    let mut checked = 0;
    for d in nonpointed() {
        let Some(f) = &d.ring else { continue };
        let rep = verify_modular(f, &d.s, &d.spins);
        assert!(rep.ok(), "{:?}: {:?}", d.spins, rep.failures());
        assert_eq!(rep.central_charge, Some(d.central_charge));
        assert_eq!(central_charge(&d.s, &d.spins).unwrap(), d.central_charge);
        assert_eq!(ord_t(&d.spins), d.ord_t);
        let dims = f.fpdims().unwrap();
        let nu2 = fs_indicator(f, &dims, &d.spins, 2);
        assert_eq!(
            nu2,
            d.fs2
                .iter()
                .map(|&x| CycNumber::from_int(x))
                .collect::<Vec<_>>()
        );
        checked += 1;
    }
    assert_eq!(checked, 18);
}

#[test]
fn mismatched_pairing_is_rejected() {
    let np = nonpointed();
    let (a, b) = (&np[0], &np[4]);
    assert_eq!(a.rank(), 8);
    assert_eq!(b.rank(), 8);
    assert_ne!(a.ring, b.ring);
    let rep = verify_modular(a.ring.as_ref().unwrap(), &a.s, &b.spins);
    assert!(!rep.ok());
    let rep = verify_modular(b.ring.as_ref().unwrap(), &a.s, &a.spins);
    assert!(!rep.verlinde);
}

#[test]
fn published_rings_classify_exactly() {
    let np = nonpointed();
    let mut rings: Vec<&FusionData> = np.iter().filter_map(|d| d.ring.as_ref()).collect();
    rings.dedup();
    assert_eq!(rings.len(), 4);
    for f in rings {
        let published: Vec<_> = np.iter().filter(|d| d.ring.as_ref() == Some(f)).collect();
        let ours = classify_modular(f);
        assert_eq!(ours.len(), published.len());
        for p in published {
            assert!(
                ours.iter()
                    .any(|d| find_relabeling(&d.s, &d.spins, &p.s, &p.spins).is_some()),
                "{:?} not found",
                p.spins
            );
        }
        for d in &ours {
            assert!(d.report.ok());
        }
    }
}

#[test]
fn cyclic_groups() {
    // Z/2: semion and its conjugate.
    let data = classify_modular(&FusionData::abelian_group(&[2]));
    let mut spins: Vec<Rational64> = data.iter().map(|d| d.spins[1]).collect();
    spins.sort();
    assert_eq!(spins, vec![Rational64::new(-1, 4), Rational64::new(1, 4)]);
    let mut c: Vec<Rational64> = data.iter().map(|d| d.central_charge).collect();
    c.sort();
    assert_eq!(
        c,
        vec![Rational64::from_integer(1), Rational64::from_integer(7)]
    );
    // Z/5: two classes up to relabeling.
    assert_eq!(classify_modular(&FusionData::abelian_group(&[5])).len(), 2);
    assert_eq!(amv_modulus(5), 25);
    assert_eq!(amv_modulus(12), 32 * 9);
}

fn brute(rows: &[Vec<i64>], n: usize, m: u64) -> usize {
    let mut t = vec![0u64; n];
    let mut count = 0;
    loop {
        if rows.iter().all(|r| {
            r.iter()
                .zip(&t)
                .map(|(&a, &b)| a * b as i64)
                .sum::<i64>()
                .rem_euclid(m as i64)
                == 0
        }) {
            count += 1;
        }
        let mut i = 0;
        while i < n {
            t[i] += 1;
            if t[i] < m {
                break;
            }
            t[i] = 0;
            i += 1;
        }
        if i == n {
            return count;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zmod_counts_match_brute_force(
        m in 2u64..13,
        rows in prop::collection::vec(prop::collection::vec(-20i64..20, 3), 0..4),
    ) {
        let mut sys = ZmodSystem::new(3, m);
        for r in &rows {
            sys.add_row(r);
        }
        let sols = sys.solutions();
        prop_assert_eq!(sols.len(), brute(&rows, 3, m));
        prop_assert_eq!(sols.len() as u128, sys.count());
    }

    #[test]
    fn pointed_spins_are_normalized(order in 1usize..9) {
        let f = FusionData::abelian_group(&[order]);
        let m = amv_modulus(order as u64);
        let half = Rational64::new(1, 2);
        for v in amv_solve_mod(&f, m) {
            let spins = v.spins();
            prop_assert_eq!(spins[0], Rational64::from_integer(0));
            prop_assert!(spins.iter().all(|q| *q > -half && *q <= half));
            prop_assert_eq!(m % v.ord_t(), 0);
        }
    }
}
