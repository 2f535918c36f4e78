use nalgebra::{DMatrix, DVector};

/// Positive parts normalized; uniform when no entry is positive.
pub fn regret_matching(regrets: &[f64]) -> Vec<f64> {
    let n = regrets.len();
    let total: f64 = regrets.iter().map(|r| r.max(0.0)).sum();
    if total > 0.0 {
        regrets.iter().map(|r| r.max(0.0) / total).collect()
    } else {
        vec![1.0 / n as f64; n]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPoint {
    pub strategy: Vec<f64>,
    /// Max-norm of `strategy * Q - strategy`.
    pub residual: f64,
    /// True when the direct solve failed and power iteration was used.
    pub iterated: bool,
}

pub const POWER_ITERATIONS: usize = 200;

/// Transition matrix of positive pairwise regrets (`regrets[a * n + b]` for
/// switching a to b), all rows scaled by one common constant so a stationary
/// point balances regret flowing into and out of every action.
pub fn swap_transition(regrets: &[f64], n: usize) -> Option<DMatrix<f64>> {
    assert_eq!(regrets.len(), n * n, "pairwise regrets must be n by n");
    let pos = |a: usize, b: usize| if a == b { 0.0 } else { regrets[a * n + b].max(0.0) };
    let mu = (0..n).map(|a| (0..n).map(|b| pos(a, b)).sum::<f64>()).fold(0.0, f64::max);
    if mu <= 0.0 {
        return None;
    }
    let mut q = DMatrix::zeros(n, n);
    for a in 0..n {
        let mut off = 0.0;
        for b in 0..n {
            if a != b {
                q[(a, b)] = pos(a, b) / mu;
                off += q[(a, b)];
            }
        }
        q[(a, a)] = 1.0 - off;
    }
    Some(q)
}

fn residual(q: &DMatrix<f64>, s: &DVector<f64>) -> f64 {
    (q.transpose() * s - s).amax()
}

fn valid(s: &DVector<f64>) -> bool {
    s.iter().all(|x| x.is_finite() && *x >= -1e-12) && (s.sum() - 1.0).abs() < 1e-9
}

/// Several closed classes make the direct solve singular: solve each closed
/// class on its own and mix them with equal weight, transient actions get 0.
fn closed_class_solution(q: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = q.nrows();
    let mut reach = vec![vec![false; n]; n];
    for a in 0..n {
        for b in 0..n {
            reach[a][b] = a == b || q[(a, b)] > 0.0;
        }
    }
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                if reach[a][k] && reach[k][b] {
                    reach[a][b] = true;
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut classes = Vec::new();
    for a in 0..n {
        if seen[a] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|b| reach[a][*b] && reach[*b][a]).collect();
        for &b in &class {
            seen[b] = true;
        }
        let closed = (0..n).all(|b| !reach[a][b] || class.contains(&b));
        if closed {
            classes.push(class);
        }
    }
    let mut s = DVector::zeros(n);
    for class in &classes {
        let k = class.len();
        let mut m = DMatrix::zeros(k, k);
        for (i, &a) in class.iter().enumerate() {
            for (j, &b) in class.iter().enumerate() {
                m[(j, i)] = q[(a, b)] - if a == b { 1.0 } else { 0.0 };
            }
        }
        let mut rhs = DVector::zeros(k);
        for j in 0..k {
            m[(k - 1, j)] = 1.0;
        }
        rhs[k - 1] = 1.0;
        let part = m.lu().solve(&rhs)?;
        for (i, &a) in class.iter().enumerate() {
            s[a] = part[i].max(0.0) / classes.len() as f64;
        }
    }
    let total = s.sum();
    (total > 0.0 && total.is_finite()).then(|| s / total)
}

/// Stationary distribution of the positive-part swap chain; uniform when no
/// pairwise regret is positive.
pub fn internal_regret_matching(regrets: &[f64], n: usize) -> StationaryPoint {
    let Some(q) = swap_transition(regrets, n) else {
        return StationaryPoint { strategy: vec![1.0 / n as f64; n], residual: 0.0, iterated: false };
    };
    // (Q^T - I) s = 0 with the last equation replaced by sum(s) = 1
    let mut m = q.transpose() - DMatrix::identity(n, n);
    let mut rhs = DVector::zeros(n);
    for j in 0..n {
        m[(n - 1, j)] = 1.0;
    }
    rhs[n - 1] = 1.0;
    if let Some(s) = m.lu().solve(&rhs) {
        if valid(&s) {
            let s = s.map(|x| x.max(0.0));
            let s = &s / s.sum();
            let r = residual(&q, &s);
            if r <= 1e-10 {
                return StationaryPoint { strategy: s.iter().copied().collect(), residual: r, iterated: false };
            }
        }
    }
    if let Some(s) = closed_class_solution(&q) {
        let r = residual(&q, &s);
        if r <= 1e-10 {
            return StationaryPoint { strategy: s.iter().copied().collect(), residual: r, iterated: false };
        }
    }
    // lazy steps avoid periodicity
    let lazy = (&q + DMatrix::identity(n, n)) * 0.5;
    let mut s = DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..POWER_ITERATIONS {
        s = lazy.transpose() * s;
        s /= s.sum();
    }
    let r = residual(&q, &s);
    StationaryPoint { strategy: s.iter().copied().collect(), residual: r, iterated: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn positive_part_normalization() {
        assert_eq!(regret_matching(&[3.0, 1.0, 0.0]), vec![0.75, 0.25, 0.0]);
        assert_eq!(regret_matching(&[-1.0, -2.0]), vec![0.5, 0.5]);
        assert_eq!(regret_matching(&[0.0, 0.0, 0.0]), vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn absorbing_swap() {
        let p = internal_regret_matching(&[0.0, 1.0, 0.0, 0.0], 2);
        assert_eq!(p.strategy, vec![0.0, 1.0]);
    }

    #[test]
    fn zero_matrix_is_uniform() {
        let p = internal_regret_matching(&[0.0; 9], 3);
        assert_eq!(p.strategy, vec![1.0 / 3.0; 3]);
        let p = internal_regret_matching(&[-1.0, -2.0, -3.0, -4.0], 2);
        assert_eq!(p.strategy, vec![0.5, 0.5]);
    }

    fn flow_imbalance(regrets: &[f64], n: usize, s: &[f64]) -> f64 {
        let pos = |a: usize, b: usize| if a == b { 0.0 } else { regrets[a * n + b].max(0.0) };
        (0..n)
            .map(|b| {
                let inflow: f64 = (0..n).map(|a| s[a] * pos(a, b)).sum();
                let outflow: f64 = s[b] * (0..n).map(|c| pos(b, c)).sum::<f64>();
                (inflow - outflow).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn isolated_action_fixed_point() {
        // 1->2 with weight 2, 2->1 with weight 1, action 3 untouched
        let r = [0.0, 2.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let p = internal_regret_matching(&r, 3);
        assert!(p.residual <= 1e-10, "{p:?}");
        assert!(flow_imbalance(&r, 3, &p.strategy) <= 1e-10);
        // within the communicating pair the balance fixes the ratio 1:2
        assert!((p.strategy[1] - 2.0 * p.strategy[0]).abs() <= 1e-10);
        // a coarse simplex grid never beats the returned point by more than its residual
        let q = swap_transition(&r, 3).unwrap();
        let steps = 60;
        let mut grid_best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps - i {
                let s = DVector::from_vec(vec![i as f64 / steps as f64, j as f64 / steps as f64, (steps - i - j) as f64 / steps as f64]);
                grid_best = grid_best.min(residual(&q, &s));
            }
        }
        assert!(p.residual <= grid_best + 1e-12);
    }

    #[test]
    fn unique_chain_uses_direct_solve() {
        let r = [0.0, 1.0, 2.0, 3.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        let p = internal_regret_matching(&r, 3);
        assert!(!p.iterated);
        assert!(p.residual <= 1e-10);
        assert!(flow_imbalance(&r, 3, &p.strategy) <= 1e-10);
    }

    proptest! {
        #[test]
        fn regret_matching_is_a_distribution(r in prop::collection::vec(-10.0f64..10.0, 1..6)) {
            let s = regret_matching(&r);
            prop_assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(s.iter().all(|x| *x >= 0.0));
            for (x, ri) in s.iter().zip(&r) {
                if *ri <= 0.0 && r.iter().any(|v| *v > 0.0) {
                    prop_assert_eq!(*x, 0.0);
                }
            }
        }

        #[test]
        fn internal_fixed_point(n in 1usize..5, seed in prop::collection::vec(-5.0f64..5.0, 16)) {
            let r: Vec<f64> = seed[..n * n].to_vec();
            let p = internal_regret_matching(&r, n);
            prop_assert!((p.strategy.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(p.strategy.iter().all(|x| *x >= 0.0));
            prop_assert!(p.residual <= 1e-10, "residual {}", p.residual);
            prop_assert!(flow_imbalance(&r, n, &p.strategy) <= 1e-9);
        }
    }
}
