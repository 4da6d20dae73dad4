use intmod::fusion::FusionData;
use intmod::solver::{
    build_system, enumerate_dualities, solve_partition, solve_system, solve_type,
    solve_type_detailed, Budget,
};

const S3_IN: &str = "amb_space 4
inhom_equations 4
1 2 0 0 0 
0 1 2 0 -2 
0 1 2 0 -2 
0 0 1 2 -3 
LatticePoints
convert_equations
nonnegative
polynomial_equations 2
x[2]^2 - x[1]*x[3] + x[3]^2 - x[2]*x[4] - 1;
-x[2]^2 + x[1]*x[3] - x[3]^2 + x[2]*x[4] + 1;
";

fn rep_s3() -> FusionData {
    FusionData::from_tensor(&[
        vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
        vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]],
        vec![vec![0, 0, 1], vec![0, 0, 1], vec![1, 1, 1]],
    ])
    .unwrap()
}

#[test]
fn rep_s3_normaliz_file() {
    let sys = build_system(&[1, 1, 2], &[0, 1, 2]);
    assert_eq!(sys.to_normaliz(), S3_IN);
}

#[test]
fn rep_s3_solution() {
    let sys = build_system(&[1, 1, 2], &[0, 1, 2]);
    let sols = solve_system(&sys, Budget::unlimited()).unwrap();
    assert_eq!(sols, vec![vec![0, 0, 1, 1]]);
    assert_eq!(sys.expand(&sols[0]).unwrap(), rep_s3());
    assert_eq!(
        solve_type(&[1, 1, 2], Budget::unlimited()).unwrap(),
        vec![rep_s3().canonical_form()]
    );
}

#[test]
fn rank_seven_worked_example() {
    let t = [1, 5, 5, 5, 6, 7, 7];
    let out = solve_type_detailed(&t, Budget::unlimited()).unwrap();
    let raw: Vec<usize> = out.dualities.iter().map(|d| d.raw_solutions).collect();
    assert_eq!(out.dualities[0].dual, vec![0, 1, 2, 3, 4, 5, 6]);
    assert_eq!(raw, vec![6, 0, 0, 0]);
    assert_eq!(out.dualities[0].variables, 56);
    assert_eq!(out.rings.len(), 2);
}

#[test]
fn trivial_type() {
    let sys = build_system(&[1], &[0]);
    assert_eq!(sys.num_vars(), 0);
    assert_eq!(sys.to_normaliz(), "amb_space 0\ninhom_equations 0\nLatticePoints\nconvert_equations\nnonnegative\npolynomial_equations 0\n");
    assert_eq!(
        solve_type(&[1], Budget::unlimited()).unwrap(),
        vec![FusionData::trivial()]
    );
}

#[test]
fn cyclic_three() {
    let sys = build_system(&[1, 1, 1], &[0, 2, 1]);
    let sols = solve_system(&sys, Budget::unlimited()).unwrap();
    assert_eq!(sols.len(), 1);
    let f = sys.expand(&sols[0]).unwrap();
    assert_eq!(
        f.canonical_form(),
        FusionData::abelian_group(&[3]).canonical_form()
    );
    assert_eq!(enumerate_dualities(&[1, 1, 1]).len(), 2);
}

#[test]
fn partition_examples() {
    assert!(!solve_partition(&[1, 1], Budget::unlimited(), Some(1))
        .unwrap()
        .is_empty());
    let t = [1, 6, 12, 12, 15, 15, 15, 20, 20, 30, 30, 60];
    assert!(solve_partition(&t, Budget::seconds(60), Some(1))
        .unwrap()
        .is_empty());
}

mod props {
    use intmod::fusion::FusionData;
    use intmod::solver::{solve_type, Budget};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn rings() -> &'static Vec<(Vec<u64>, FusionData)> {
        static R: OnceLock<Vec<(Vec<u64>, FusionData)>> = OnceLock::new();
        R.get_or_init(|| {
            let mut out = Vec::new();
            for t in [
                vec![1, 1, 1, 1, 2, 2],
                vec![1, 1, 1, 1, 1, 1],
                vec![1, 1, 1, 1, 2, 2, 2, 2],
            ] {
                for f in solve_type(&t, Budget::unlimited()).unwrap() {
                    out.push((t.clone(), f));
                }
            }
            out
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn canonical_form_ignores_relabeling(idx in 0usize..1000, seed in any::<u64>()) {
            let all = rings();
            let (t, f) = &all[idx % all.len()];
            // Random permutation of equal-dimension indices, unit fixed.
            let mut perm: Vec<usize> = (0..t.len()).collect();
            let mut s = seed;
            for i in (2..t.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = 1 + (s >> 33) as usize % i;
                if t[i] == t[j] {
                    perm.swap(i, j);
                }
            }
            let g = f.permuted(&perm);
            g.check_axioms().unwrap();
            prop_assert_eq!(g.canonical_form(), f.canonical_form());
            prop_assert_eq!(g.canonical_hash(), f.canonical_hash());
        }
    }
}

#[test]
fn deterministic_across_thread_counts() {
    let t = [1, 1, 1, 1, 2, 2, 2, 2];
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| solve_type_detailed(&t, Budget::unlimited()).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.rings, b.rings);
    assert_eq!(
        serde_json::to_string(&a.dualities).unwrap(),
        serde_json::to_string(&b.dualities).unwrap()
    );
}

#[test]
fn emitted_rings_pass_axioms() {
    for t in [vec![1, 1, 1, 1, 2, 2, 2, 4], vec![1, 1, 2, 2, 2, 2, 3, 3]] {
        for f in solve_type(&t, Budget::unlimited()).unwrap() {
            f.check_axioms().unwrap();
            f.check_dims(&t).unwrap();
            assert_eq!(f.fpdims(), Some(t.clone()));
        }
    }
}

#[test]
fn partition_infeasible_implies_no_rings() {
    for t in [
        vec![1, 1, 1, 1, 1, 1, 1, 1, 2],
        vec![1, 2, 3, 6, 15, 15, 20, 30, 30, 30],
        vec![1, 1, 1, 2, 2, 3, 4, 6, 6, 6],
    ] {
        if solve_partition(&t, Budget::seconds(30), Some(1))
            .unwrap()
            .is_empty()
        {
            assert!(solve_type(&t, Budget::seconds(120)).unwrap().is_empty());
        }
    }
}
