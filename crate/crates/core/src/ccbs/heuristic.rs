use super::Aggregate;

/// Combines the two child cost increases; an infinite side means that
/// child cannot be generated.
pub fn aggregate(delta_i: f64, delta_j: f64, how: Aggregate) -> f64 {
    match how {
        Aggregate::Min => delta_i.min(delta_j),
        Aggregate::Max => delta_i.max(delta_j),
        Aggregate::Sum => delta_i + delta_j,
    }
}

/// Greedy agent-disjoint matching over the conflict graph: take conflicts in
/// descending impact, drop every conflict sharing an agent with a taken one,
/// and sum the taken impacts. Ties keep input order. Infinite impacts sort
/// first but add nothing.
pub fn h2_greedy(conflicts: &[(usize, usize, f64)]) -> f64 {
    let mut order: Vec<usize> = (0..conflicts.len()).collect();
    order.sort_by(|&a, &b| {
        let key = |d: f64| if d.is_finite() { d } else { f64::MAX };
        key(conflicts[b].2).total_cmp(&key(conflicts[a].2))
    });
    let mut used: Vec<usize> = Vec::new();
    let mut total = 0.0;
    for k in order {
        let (i, j, delta) = conflicts[k];
        if used.contains(&i) || used.contains(&j) {
            continue;
        }
        used.extend([i, j]);
        if delta.is_finite() {
            total += delta.max(0.0);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_examples() {
        assert_eq!(h2_greedy(&[]), 0.0);
        assert_eq!(h2_greedy(&[(1, 2, 5.0), (2, 3, 4.0), (1, 3, 3.0)]), 5.0);
        assert_eq!(h2_greedy(&[(0, 1, 1.0), (2, 3, 2.0), (1, 2, 2.5)]), 2.5);
        assert_eq!(h2_greedy(&[(0, 1, f64::INFINITY), (2, 3, 1.0)]), 1.0);
    }

    #[test]
    fn aggregate_order() {
        for (a, b) in [(0.0, 1.0), (2.0, 0.5), (3.0, 3.0)] {
            let (lo, hi, s) = (
                aggregate(a, b, Aggregate::Min),
                aggregate(a, b, Aggregate::Max),
                aggregate(a, b, Aggregate::Sum),
            );
            assert!(lo <= hi && hi <= s);
        }
        assert_eq!(aggregate(1.0, f64::INFINITY, Aggregate::Min), 1.0);
    }
}
