use intmod::types_enum::{all_sq_egyptian, enumerate_sq_egyptian, is_perfect, types_for_rank};
use num_rational::Ratio;

/// Plain enumeration of nonincreasing tuples with an exact i128 check and no
/// number-theoretic pruning.
fn naive_egyptian(q: i128, r: usize) -> Vec<Vec<u64>> {
    fn go(rem: Ratio<i128>, asc: &mut Vec<u64>, r: usize, out: &mut Vec<Vec<u64>>) {
        let zero = Ratio::from_integer(0);
        if asc.len() == r {
            if rem == zero {
                let mut s = asc.clone();
                s.reverse();
                out.push(s);
            }
            return;
        }
        if rem <= zero {
            return;
        }
        let left = (r - asc.len()) as i128;
        let mut d = asc.last().copied().unwrap_or(1);
        loop {
            let term = Ratio::new(1, (d as i128) * (d as i128));
            // The remaining terms are all at most `term`.
            if term * left < rem {
                break;
            }
            if term <= rem {
                asc.push(d);
                go(rem - term, asc, r, out);
                asc.pop();
            }
            d += 1;
        }
    }
    let mut out = Vec::new();
    go(Ratio::from_integer(q), &mut Vec::new(), r, &mut out);
    out.sort();
    out
}

#[test]
fn egyptian_matches_naive_enumeration() {
    for r in 1..=7 {
        for q in 1..=3u64 {
            if q as usize > r {
                continue;
            }
            let naive = naive_egyptian(q as i128, r);
            assert_eq!(all_sq_egyptian(q, r), naive, "q={q} r={r}");
            let divisible: Vec<_> = naive
                .into_iter()
                .filter(|s| s.iter().all(|v| s[0] % v == 0))
                .collect();
            assert_eq!(enumerate_sq_egyptian(q, r), divisible, "q={q} r={r}");
        }
    }
}

#[test]
fn egyptian_unit_counts() {
    let counts: Vec<usize> = (1..=8).map(|r| all_sq_egyptian(1, r).len()).collect();
    assert_eq!(counts, vec![1, 0, 0, 1, 0, 1, 1, 4]);
    // (21, 14, 7, 3, 3, 2, 2, 2) fails the divisibility condition.
    assert_eq!(enumerate_sq_egyptian(1, 8).len(), 3);
}

#[test]
fn type_counts_up_to_rank_11() {
    let mut all = Vec::new();
    let mut perfect = Vec::new();
    for r in 1..=11 {
        let t = types_for_rank(r);
        perfect.push(t.iter().filter(|x| is_perfect(x)).count());
        all.push(t.len());
    }
    assert_eq!(all, vec![1, 1, 1, 1, 2, 3, 3, 7, 11, 42, 144]);
    assert_eq!(perfect, vec![1, 0, 0, 0, 0, 1, 1, 2, 2, 24, 88]);
}
