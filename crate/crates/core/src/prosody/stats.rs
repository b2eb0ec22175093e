use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::StatsError;

/// Smallest sample the rank tests accept.
pub const MIN_SAMPLE: usize = 5;

const EXACT_SIGNED_RANK_MAX_N: usize = 50;
const EXACT_RANK_SUM_MAX_N: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub group: Vec<String>,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub sd: f64,
    pub se: f64,
    pub median: f64,
    /// Set when `n == 1` and the spread is undefined.
    pub single: bool,
}

fn summarize(group: Vec<String>, mut values: Vec<f64>) -> SummaryStats {
    // Sorting first makes the sums independent of input order.
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        let mut sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
        sq.sort_by(f64::total_cmp);
        (sq.iter().sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let median = if n % 2 == 1 { values[n / 2] } else { (values[n / 2 - 1] + values[n / 2]) / 2.0 };
    SummaryStats { group, n, mean, sd, se: sd / (n as f64).sqrt(), median, single: n == 1 }
}

/// Per-group summary statistics, groups in key order. Empty groups never
/// appear.
pub fn aggregate<T>(items: &[T], key: impl Fn(&T) -> Vec<String>, value: impl Fn(&T) -> f64) -> Vec<SummaryStats> {
    let mut groups: BTreeMap<Vec<String>, Vec<f64>> = BTreeMap::new();
    for it in items {
        groups.entry(key(it)).or_default().push(value(it));
    }
    groups.into_iter().map(|(g, v)| summarize(g, v)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankTest {
    WilcoxonSignedRank,
    MannWhitneyU,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectResult {
    pub test: RankTest,
    pub n_a: usize,
    pub n_b: usize,
    /// W+ (sum of positive-difference ranks) or U of sample `a`.
    pub statistic: f64,
    pub p_value: f64,
    /// Whether the exact null distribution was used.
    pub exact: bool,
    pub significant: bool,
}

/// Two-sided rank test of `a` against `b`: Wilcoxon signed-rank when
/// paired, Mann-Whitney U otherwise.
///
/// Zero differences are dropped before ranking. Ties get average ranks.
/// Without ties and for small samples the exact null distribution is used,
/// otherwise the normal approximation with tie and continuity corrections.
pub fn effect_test(a: &[f64], b: &[f64], paired: bool, alpha: f64) -> Result<EffectResult, StatsError> {
    for (name, s) in [("a", a), ("b", b)] {
        if s.len() < MIN_SAMPLE {
            return Err(StatsError::InsufficientData { sample: name.into(), n: s.len(), min: MIN_SAMPLE });
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
    }
    let (test, statistic, p_value, exact) = if paired {
        if a.len() != b.len() {
            return Err(StatsError::LengthMismatch { a: a.len(), b: b.len() });
        }
        let (w, p, exact) = signed_rank(a, b);
        (RankTest::WilcoxonSignedRank, w, p, exact)
    } else {
        let (u, p, exact) = rank_sum(a, b);
        (RankTest::MannWhitneyU, u, p, exact)
    };
    Ok(EffectResult { test, n_a: a.len(), n_b: b.len(), statistic, p_value, exact, significant: p_value < alpha })
}

/// Average ranks (1-based) and the tie-group sizes.
fn average_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        if j > i {
            ties.push(j - i + 1);
        }
        i = j + 1;
    }
    (ranks, ties)
}

fn two_sided_normal(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

/// Two-sided p from an exact distribution given as probabilities over
/// integer statistic values.
fn exact_two_sided(dist: &[f64], stat: usize) -> f64 {
    let lower: f64 = dist[..=stat].iter().sum();
    let upper: f64 = dist[stat..].iter().sum();
    (2.0 * lower.min(upper)).min(1.0)
}

fn signed_rank(a: &[f64], b: &[f64]) -> (f64, f64, bool) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return (0.0, 1.0, true);
    }
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let (ranks, ties) = average_ranks(&abs);
    let w: f64 = d.iter().zip(&ranks).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
    if ties.is_empty() && n <= EXACT_SIGNED_RANK_MAX_N {
        // dist[s] = P(W+ = s) with each rank signed independently.
        let max = n * (n + 1) / 2;
        let mut dist = vec![0.0; max + 1];
        dist[0] = 1.0;
        for k in 1..=n {
            for s in (0..=max).rev() {
                let with = if s >= k { dist[s - k] } else { 0.0 };
                dist[s] = 0.5 * (dist[s] + with);
            }
        }
        return (w, exact_two_sided(&dist, w as usize), true);
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_adj: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_adj;
    if var <= 0.0 {
        return (w, 1.0, false);
    }
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    (w, two_sided_normal(z), false)
}

fn rank_sum(a: &[f64], b: &[f64]) -> (f64, f64, bool) {
    let (n1, n2) = (a.len(), b.len());
    let all: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = average_ranks(&all);
    let r1: f64 = ranks[..n1].iter().sum();
    let u = r1 - (n1 * (n1 + 1)) as f64 / 2.0;
    if ties.is_empty() && n1 + n2 <= EXACT_RANK_SUM_MAX_N {
        // ways[k][s]: subsets of size k of the ranks seen so far with
        // rank-sum offset s (sum minus k(k+1)/2, which equals U).
        let umax = n1 * n2;
        let mut ways = vec![vec![0.0f64; umax + 1]; n1 + 1];
        ways[0][0] = 1.0;
        for r in 0..n1 + n2 {
            for k in (1..=n1.min(r + 1)).rev() {
                // Picking rank r+1 as the k-th element adds r+1-k to U.
                let add = r + 1 - k;
                for s in (add..=umax).rev() {
                    ways[k][s] += ways[k - 1][s - add];
                }
            }
        }
        let total: f64 = ways[n1].iter().sum();
        let dist: Vec<f64> = ways[n1].iter().map(|w| w / total).collect();
        return (u, exact_two_sided(&dist, u.round() as usize), true);
    }
    let (f1, f2) = (n1 as f64, n2 as f64);
    let n = f1 + f2;
    let mean = f1 * f2 / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
    let var = f1 * f2 / 12.0 * ((n + 1.0) - tie_term);
    if var <= 0.0 {
        return (u, 1.0, false);
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
    (u, two_sided_normal(z), false)
}

/// Lines up two id-keyed samples for a paired test. Both must contain the
/// same ids exactly once.
pub fn paired_by_id(a: &[(String, f64)], b: &[(String, f64)]) -> Result<(Vec<f64>, Vec<f64>), StatsError> {
    let index = |s: &[(String, f64)]| -> Result<BTreeMap<String, f64>, StatsError> {
        let mut m = BTreeMap::new();
        for (id, v) in s {
            if m.insert(id.clone(), *v).is_some() {
                return Err(StatsError::DuplicateId(id.clone()));
            }
        }
        Ok(m)
    };
    let (ma, mb) = (index(a)?, index(b)?);
    if let Some(id) = ma.keys().find(|k| !mb.contains_key(*k)).or_else(|| mb.keys().find(|k| !ma.contains_key(*k))) {
        return Err(StatsError::UnpairedId(id.clone()));
    }
    Ok(ma.into_iter().zip(mb).map(|((_, x), (_, y))| (x, y)).unzip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn two_point_summary() {
        let s = aggregate(&[0.1, 0.3], |_| vec![], |v| *v);
        assert_eq!(s.len(), 1);
        assert!((s[0].mean - 0.2).abs() < 1e-12);
        assert!((s[0].median - 0.2).abs() < 1e-12);
        assert!((s[0].sd - 0.1414213562).abs() < 1e-9);
        assert!((s[0].se - 0.1).abs() < 1e-12);
    }

    #[test]
    fn single_value_flagged() {
        let s = aggregate(&[0.4], |_| vec![], |v| *v);
        assert_eq!((s[0].n, s[0].sd, s[0].single), (1, 0.0, true));
    }

    #[test]
    fn grouping() {
        let items = [("x", 1.0), ("y", 2.0), ("x", 3.0)];
        let s = aggregate(&items, |i| vec![i.0.to_string()], |i| i.1);
        assert_eq!(s.iter().map(|g| g.group[0].as_str()).collect::<Vec<_>>(), vec!["x", "y"]);
        assert_eq!(s[0].n, 2);
    }

    #[test]
    fn permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut v: Vec<f64> = (0..101).map(|_| rng.random::<f64>() * 1e3).collect();
        let a = aggregate(&v, |_| vec![], |x| *x);
        v.reverse();
        v.swap(3, 70);
        assert_eq!(aggregate(&v, |_| vec![], |x| *x), a);
    }

    #[test]
    fn identical_samples_not_significant() {
        let a = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        for paired in [true, false] {
            let r = effect_test(&a, &a, paired, 0.05).unwrap();
            assert!(!r.significant);
            assert!((r.p_value - 1.0).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn small_samples_rejected() {
        assert!(matches!(effect_test(&[1.0; 4], &[1.0; 4], false, 0.05), Err(StatsError::InsufficientData { .. })));
        assert!(matches!(effect_test(&[1.0; 5], &[1.0; 6], true, 0.05), Err(StatsError::LengthMismatch { .. })));
    }

    #[test]
    fn known_values() {
        // Exact signed-rank, n = 5, all positive: P(W+ = 15) = 1/32.
        let r = effect_test(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.0; 5], true, 0.05).unwrap();
        assert_eq!(r.statistic, 15.0);
        assert!((r.p_value - 2.0 / 32.0).abs() < 1e-12);
        // Exact rank-sum, complete separation 5 vs 5: 2 / C(10,5).
        let r = effect_test(&[6.0, 7.0, 8.0, 9.0, 10.0], &[1.0, 2.0, 3.0, 4.0, 5.0], false, 0.05).unwrap();
        assert_eq!(r.statistic, 25.0);
        assert!((r.p_value - 2.0 / 252.0).abs() < 1e-12);
    }

    #[test]
    fn shift_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let b: Vec<f64> = (0..20).map(|_| noise.sample(&mut rng)).collect();
        let a: Vec<f64> = b.iter().map(|x| x + 10.0).collect();
        assert!(effect_test(&a, &b, true, 0.05).unwrap().significant);
        assert!(effect_test(&a, &b, false, 0.05).unwrap().significant);
    }

    #[test]
    fn paired_ids() {
        let a = vec![("x".to_string(), 1.0), ("y".to_string(), 2.0)];
        let b = vec![("y".to_string(), 5.0), ("x".to_string(), 4.0)];
        assert_eq!(paired_by_id(&a, &b).unwrap(), (vec![1.0, 2.0], vec![4.0, 5.0]));
        let c = vec![("x".to_string(), 1.0), ("z".to_string(), 2.0)];
        assert!(matches!(paired_by_id(&a, &c), Err(StatsError::UnpairedId(_))));
    }
}
