//! Independent statistical oracles for the correlation machinery: an exact
//! permutation null distribution from full enumeration, and a from-scratch
//! average-rank Pearson implementation.

use algoprob::rng::Xoshiro256;
use algoprob::stats::{permutation_test, spearman, PairedRanking, TiePolicy};

/// Average ranks computed independently of the library (descending, ties
/// averaged), then plain Pearson.
fn oracle_rho(x: &[f64], y: &[f64]) -> Option<f64> {
    fn avg_ranks(v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap());
        let mut ranks = vec![0.0; n];
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && v[order[j + 1]] == v[order[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &idx in &order[i..=j] {
                ranks[idx] = avg;
            }
            i = j + 1;
        }
        ranks
    }
    let (rx, ry) = (avg_ranks(x), avg_ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

#[test]
fn fractional_rho_matches_oracle_on_heavy_ties() {
    let mut rng = Xoshiro256::seeded(2718);
    let mut checked = 0;
    for trial in 0..1000 {
        let n = 5 + (rng.below(28)) as usize;
        // Alternate continuous values and coarse ones that force ties.
        let draw = |rng: &mut Xoshiro256| {
            if trial % 2 == 0 {
                rng.unit_f64()
            } else {
                (rng.below(5)) as f64 / 4.0
            }
        };
        let x: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let y: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let Some(expected) = oracle_rho(&x, &y) else {
            continue;
        };
        let p = PairedRanking::from_values(x, y).unwrap();
        let got = spearman(&p, TiePolicy::Fractional).unwrap();
        assert!(
            (got - expected).abs() <= 1e-12,
            "trial {trial}: {got} vs {expected}"
        );
        checked += 1;
    }
    assert!(checked > 900);
}

/// Heap's algorithm, used to enumerate every permutation of y.
fn for_each_permutation<T: Clone>(items: &[T], mut f: impl FnMut(&[T])) {
    fn heap<T: Clone>(v: &mut Vec<T>, k: usize, f: &mut impl FnMut(&[T])) {
        if k <= 1 {
            f(v);
            return;
        }
        for i in 0..k {
            heap(v, k - 1, f);
            if k.is_multiple_of(2) {
                v.swap(i, k - 1);
            } else {
                v.swap(0, k - 1);
            }
        }
    }
    let mut v = items.to_vec();
    heap(&mut v, items.len(), &mut f);
}

/// The sampled permutation p-value converges to the exact one computed by
/// enumerating all 8! relabelings.
#[test]
fn sampled_p_value_matches_exact_null_on_eight_elements() {
    let x: Vec<f64> = vec![0.9, 0.1, 0.8, 0.2, 0.7, 0.3, 0.6, 0.4];
    let y: Vec<f64> = vec![0.8, 0.3, 0.9, 0.1, 0.5, 0.2, 0.7, 0.35];
    let p = PairedRanking::from_values(x.clone(), y.clone()).unwrap();
    let rho_obs = spearman(&p, TiePolicy::Fractional).unwrap();

    let mut exceed = 0u64;
    let mut total = 0u64;
    for_each_permutation(&y, |perm| {
        let pr = PairedRanking::from_values(x.clone(), perm.to_vec()).unwrap();
        let rho = spearman(&pr, TiePolicy::Fractional).unwrap();
        if rho.abs() >= rho_obs.abs() {
            exceed += 1;
        }
        total += 1;
    });
    assert_eq!(total, 40_320);
    let exact = exceed as f64 / total as f64;

    let sampled = permutation_test(&p, rho_obs, TiePolicy::Fractional, 10_000, 99);
    // Binomial sampling error at N = 10^4 stays well inside 0.02.
    assert!(
        (sampled - exact).abs() < 0.02,
        "sampled {sampled} vs exact {exact}"
    );
    assert!(
        exact > 0.001 && exact < 0.5,
        "fixture should be non-trivial"
    );
}

#[test]
fn two_sidedness_counts_both_tails() {
    // A strongly negative correlation must be at least as significant
    // two-sided as its positive mirror image.
    let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
    let y_neg: Vec<f64> = (0..10).rev().map(|i| i as f64).collect();
    let p = PairedRanking::from_values(x, y_neg).unwrap();
    let rho = spearman(&p, TiePolicy::Fractional).unwrap();
    assert_eq!(rho, -1.0);
    let pv = permutation_test(&p, rho, TiePolicy::Fractional, 4000, 7);
    assert!(pv < 0.01, "p = {pv}");
}
