//! Group skew, group fairness metrics, accuracy, 1-D Wasserstein distance and
//! histograms.
//!
//! Group-rate metrics are oriented with group 0 as the numerator/minuend:
//! `SPD = P(Y=1|G=0) - P(Y=1|G=1)` and `DI = P(Y=1|G=0) / P(Y=1|G=1)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Ratio of between-group to within-group sum of squares of `V`.
///
/// `SSB = sum_i N_i (mean_i - grand_mean)^2`, `SSW = sum_i sum_j (x_ij - mean_i)^2`,
/// with no degrees-of-freedom normalization. Weights are ignored.
pub fn group_skew(data: &Dataset) -> Result<f64> {
    let mut groups: BTreeMap<u8, Vec<f64>> = BTreeMap::new();
    for r in data.records() {
        groups.entry(r.g).or_default().push(r.v);
    }
    group_skew_of(groups.values().map(Vec::as_slice))
}

/// Group skew over arbitrary groups of values (k >= 2).
pub fn group_skew_of<'a, I>(groups: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let groups: Vec<&[f64]> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    if groups.len() < 2 {
        return Err(Error::UndefinedMetric(format!(
            "group skew needs at least two nonempty groups, found {}",
            groups.len()
        )));
    }
    let total: usize = groups.iter().map(|g| g.len()).sum();
    let means: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect();
    let grand = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.len() as f64 * m)
        .sum::<f64>()
        / total as f64;
    let ssb: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.len() as f64 * (m - grand).powi(2))
        .sum();
    let ssw: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.iter().map(|x| (x - m).powi(2)).sum::<f64>())
        .sum();
    if !(ssw > 0.0) {
        return Err(Error::DegenerateVariance(
            "within-group sum of squares is zero".into(),
        ));
    }
    Ok(ssb / ssw)
}

/// Favorable-outcome rate per group, as `(rate_g0, rate_g1)`.
fn group_rates(labels: impl Iterator<Item = (u8, u8, f64)>) -> Result<(f64, f64)> {
    let mut favorable = [0.0f64; 2];
    let mut total = [0.0f64; 2];
    let mut seen = [false; 2];
    for (g, y, w) in labels {
        let g = g as usize;
        seen[g] = true;
        total[g] += w;
        if y == 1 {
            favorable[g] += w;
        }
    }
    for g in 0..2 {
        if !seen[g] || !(total[g] > 0.0) {
            return Err(Error::UndefinedMetric(format!(
                "group {g} has no records (or zero total weight)"
            )));
        }
    }
    Ok((favorable[0] / total[0], favorable[1] / total[1]))
}

/// `P(Y=1|G=0) - P(Y=1|G=1)` over record counts.
pub fn statistical_parity_difference(data: &Dataset) -> Result<f64> {
    let (r0, r1) = group_rates(data.records().iter().map(|r| (r.g, r.y, 1.0)))?;
    Ok(r0 - r1)
}

/// Like [`statistical_parity_difference`], with rates taken over weight totals.
pub fn weighted_statistical_parity_difference(data: &Dataset) -> Result<f64> {
    let (r0, r1) = group_rates(data.records().iter().map(|r| (r.g, r.y, r.w)))?;
    Ok(r0 - r1)
}

/// Weighted favorable rate of each group, as `(rate_g0, rate_g1)`.
pub fn weighted_favorable_rates(data: &Dataset) -> Result<(f64, f64)> {
    group_rates(data.records().iter().map(|r| (r.g, r.y, r.w)))
}

/// SPD of a prediction vector with respect to `groups`.
pub fn prediction_parity_difference(pred: &[u8], groups: &[u8]) -> Result<f64> {
    check_binary_lists(&[pred, groups])?;
    let (r0, r1) = group_rates(groups.iter().zip(pred).map(|(&g, &p)| (g, p, 1.0)))?;
    Ok(r0 - r1)
}

/// `P(Y=1|G=0) / P(Y=1|G=1)`.
pub fn disparate_impact_ratio(data: &Dataset) -> Result<f64> {
    let (r0, r1) = group_rates(data.records().iter().map(|r| (r.g, r.y, 1.0)))?;
    if r1 == 0.0 {
        return Err(Error::UndefinedRatio(
            "group 1 has no favorable outcomes".into(),
        ));
    }
    Ok(r0 / r1)
}

fn check_binary_lists(lists: &[&[u8]]) -> Result<()> {
    let n = lists[0].len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty input".into()));
    }
    for l in lists {
        if l.len() != n {
            return Err(Error::InvalidArgument(format!(
                "length mismatch: {} vs {}",
                n,
                l.len()
            )));
        }
        if l.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("values must be 0 or 1".into()));
        }
    }
    Ok(())
}

/// Largest cross-group difference in `P(pred=1 | G, Y=y)` over `y in {0, 1}`,
/// i.e. the worse of the TPR gap and the FPR gap.
pub fn equalized_odds_gap(truth: &[u8], pred: &[u8], groups: &[u8]) -> Result<f64> {
    check_binary_lists(&[truth, pred, groups])?;
    let mut positive = [[0usize; 2]; 2];
    let mut total = [[0usize; 2]; 2];
    for ((&t, &p), &g) in truth.iter().zip(pred).zip(groups) {
        total[g as usize][t as usize] += 1;
        positive[g as usize][t as usize] += p as usize;
    }
    let mut gap = 0.0f64;
    for y in 0..2 {
        for (g, cells) in total.iter().enumerate() {
            if cells[y] == 0 {
                return Err(Error::UndefinedMetric(format!(
                    "no records with group {g} and truth {y}"
                )));
            }
        }
        let rate = |g: usize| positive[g][y] as f64 / total[g][y] as f64;
        gap = gap.max((rate(1) - rate(0)).abs());
    }
    Ok(gap)
}

/// Phi coefficient (Pearson correlation) of the `G x Y` contingency table.
pub fn phi_coefficient(data: &Dataset) -> Result<f64> {
    let n = data.cell_counts();
    let (n00, n01, n10, n11) = (
        n[0][0] as f64,
        n[0][1] as f64,
        n[1][0] as f64,
        n[1][1] as f64,
    );
    let marginals = [n10 + n11, n00 + n01, n01 + n11, n00 + n10];
    if marginals.contains(&0.0) {
        return Err(Error::UndefinedMetric(
            "phi needs both groups and both outcomes present".into(),
        ));
    }
    let denom = marginals.iter().product::<f64>().sqrt();
    Ok((n11 * n00 - n10 * n01) / denom)
}

pub fn accuracy(truth: &[u8], pred: &[u8]) -> Result<f64> {
    if truth.is_empty() || truth.len() != pred.len() {
        return Err(Error::InvalidArgument(format!(
            "accuracy needs equal nonzero lengths, got {} and {}",
            truth.len(),
            pred.len()
        )));
    }
    let hits = truth.iter().zip(pred).filter(|(t, p)| t == p).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Earth mover's distance between two empirical distributions on the line:
/// the integral over `t in [0, 1]` of `|Qa(t) - Qb(t)|` for the step quantile
/// functions of the two samples.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument(
            "wasserstein distance needs nonempty samples".into(),
        ));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    if a.len() == b.len() {
        let sum: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
        return Ok(sum / a.len() as f64);
    }
    // Walk the merged breakpoints i/n and j/m on the common grid 1/(n*m).
    let (n, m) = (a.len() as u64, b.len() as u64);
    let scale = (n * m) as f64;
    let (mut i, mut j, mut t) = (0u64, 0u64, 0u64);
    let mut total = 0.0;
    while i < n && j < m {
        let next_a = (i + 1) * m;
        let next_b = (j + 1) * n;
        let next = next_a.min(next_b);
        total += (next - t) as f64 / scale * (a[i as usize] - b[j as usize]).abs();
        t = next;
        if next_a == next {
            i += 1;
        }
        if next_b == next {
            j += 1;
        }
    }
    Ok(total)
}

/// Wasserstein-1 distance between two weighted samples, computed as the
/// integral of `|Fa(x) - Fb(x)|` over the merged support. Weights are
/// normalized per sample; zero-weight points carry no mass.
pub fn weighted_wasserstein_1d(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<f64> {
    let total = |s: &[(f64, f64)]| s.iter().map(|&(_, w)| w).sum::<f64>();
    let (ta, tb) = (total(a), total(b));
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument(
            "wasserstein distance needs nonempty samples".into(),
        ));
    }
    if a.iter().chain(b).any(|&(_, w)| !(w >= 0.0)) || !(ta > 0.0) || !(tb > 0.0) {
        return Err(Error::DegenerateWeights(
            "weights must be nonnegative with a positive total".into(),
        ));
    }
    // Signed mass events: +w/ta for `a`, -w/tb for `b`, swept left to right.
    let mut events: Vec<(f64, f64)> = a
        .iter()
        .map(|&(x, w)| (x, w / ta))
        .chain(b.iter().map(|&(x, w)| (x, -w / tb)))
        .collect();
    events.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut cdf_gap = 0.0;
    let mut distance = 0.0;
    for pair in events.windows(2) {
        cdf_gap += pair[0].1;
        distance += cdf_gap.abs() * (pair[1].0 - pair[0].0);
    }
    Ok(distance)
}

/// Binned counts of one group's feature values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramData {
    pub group_id: u8,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Equal-width histogram over `[lo, hi]`.
///
/// Bins are right-open except the last, which is closed; values outside the
/// range land in the end bins.
pub fn histogram(values: &[f64], bins: usize, range: (f64, f64)) -> Result<HistogramData> {
    let (lo, hi) = range;
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be at least 1".into()));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "histogram range must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);
    let mut counts = vec![0u64; bins];
    for &x in values {
        let mut idx = ((x - lo) / width).floor();
        if !(idx >= 0.0) {
            idx = 0.0;
        }
        let mut idx = (idx as usize).min(bins - 1);
        // Correct for rounding in the division against the stored edges.
        while idx > 0 && x < edges[idx] {
            idx -= 1;
        }
        while idx + 1 < bins && x >= edges[idx + 1] {
            idx += 1;
        }
        counts[idx] += 1;
    }
    Ok(HistogramData {
        group_id: 0,
        bin_edges: edges,
        counts,
    })
}

/// Histogram of one group's `V` values.
pub fn group_histogram(
    data: &Dataset,
    group_id: u8,
    bins: usize,
    range: (f64, f64),
) -> Result<HistogramData> {
    let mut h = histogram(&data.group_values(group_id), bins, range)?;
    h.group_id = group_id;
    Ok(h)
}

/// Sum over groups of the Wasserstein distance between the original and the
/// transformed feature distributions of that group, each weighted by its
/// record weights. For a weight-only repair this measures the reweighted
/// distribution itself rather than a resampled draw from it.
pub fn distortion(original: &Dataset, transformed: &Dataset) -> Result<f64> {
    let weighted = |d: &Dataset, g: u8| -> Vec<(f64, f64)> {
        d.records()
            .iter()
            .filter(|r| r.g == g)
            .map(|r| (r.v, r.w))
            .collect()
    };
    let mut total = 0.0;
    for &g in original.group_counts().keys() {
        let after = weighted(transformed, g);
        if after.is_empty() {
            return Err(Error::UndefinedMetric(format!(
                "group {g} vanished from the transformed dataset"
            )));
        }
        total += weighted_wasserstein_1d(&weighted(original, g), &after)?;
    }
    Ok(total)
}

/// Scalar metrics of a dataset and, optionally, of predictions made on it.
/// Metrics that are undefined for the input are `None` (JSON `null`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub group_skew: Option<f64>,
    pub spd: Option<f64>,
    pub di: Option<f64>,
    pub eo_gap: Option<f64>,
    pub phi: Option<f64>,
    pub accuracy: Option<f64>,
}

impl MetricsReport {
    pub fn for_dataset(data: &Dataset) -> Self {
        Self {
            group_skew: group_skew(data).ok(),
            spd: statistical_parity_difference(data).ok(),
            di: disparate_impact_ratio(data).ok(),
            eo_gap: None,
            phi: phi_coefficient(data).ok(),
            accuracy: None,
        }
    }

    /// Adds accuracy and equalized-odds gap of `pred` against `data`'s outcomes.
    pub fn with_predictions(mut self, data: &Dataset, pred: &[u8]) -> Self {
        let truth = data.outcomes();
        self.accuracy = accuracy(&truth, pred).ok();
        self.eo_gap = equalized_odds_gap(&truth, pred, &data.groups()).ok();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_s() -> Dataset {
        Dataset::from_triples(
            &[
                (1, 1.0, 1),
                (1, 2.0, 1),
                (1, 3.0, 0),
                (0, 5.0, 1),
                (0, 6.0, 0),
                (0, 7.0, 0),
            ],
            "S",
        )
        .unwrap()
    }

    #[test]
    fn sample_s_values() {
        let s = sample_s();
        assert!((group_skew(&s).unwrap() - 6.0).abs() < 1e-12);
        assert!((statistical_parity_difference(&s).unwrap() + 1.0 / 3.0).abs() < 1e-12);
        assert!((disparate_impact_ratio(&s).unwrap() - 0.5).abs() < 1e-12);
        assert!((phi_coefficient(&s).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn skew_zero_for_identical_groups() {
        let d = Dataset::from_triples(
            &[
                (0, 1.0, 0),
                (0, 2.0, 1),
                (0, 3.0, 0),
                (1, 3.0, 1),
                (1, 1.0, 0),
                (1, 2.0, 1),
            ],
            "eq",
        )
        .unwrap();
        assert_eq!(group_skew(&d).unwrap(), 0.0);
    }

    #[test]
    fn skew_errors() {
        let one = Dataset::from_triples(&[(1, 1.0, 1), (1, 2.0, 0)], "one").unwrap();
        assert!(matches!(group_skew(&one), Err(Error::UndefinedMetric(_))));
        let flat = Dataset::from_triples(&[(1, 1.0, 1), (0, 2.0, 0)], "flat").unwrap();
        assert!(matches!(
            group_skew(&flat),
            Err(Error::DegenerateVariance(_))
        ));
    }

    #[test]
    fn skew_of_three_groups() {
        let a = [1.0, 2.0, 3.0];
        let b = [4.0, 5.0, 6.0];
        let c = [7.0, 8.0, 9.0];
        // means 2, 5, 8; grand 5; SSB = 3*9 + 0 + 3*9 = 54; SSW = 3 * 2 = 6
        let gs = group_skew_of([&a[..], &b[..], &c[..]]).unwrap();
        assert!((gs - 9.0).abs() < 1e-12);
    }

    #[test]
    fn parity_needs_both_groups() {
        let one = Dataset::from_triples(&[(1, 1.0, 1), (1, 2.0, 0)], "one").unwrap();
        assert!(matches!(
            statistical_parity_difference(&one),
            Err(Error::UndefinedMetric(_))
        ));
        let no_fav = Dataset::from_triples(&[(1, 1.0, 0), (0, 2.0, 1)], "nf").unwrap();
        assert!(matches!(
            disparate_impact_ratio(&no_fav),
            Err(Error::UndefinedRatio(_))
        ));
    }

    #[test]
    fn equalized_odds_cases() {
        let truth = [1, 0, 1, 0, 1, 0];
        let groups = [1, 1, 0, 0, 1, 0];
        assert_eq!(equalized_odds_gap(&truth, &truth, &groups).unwrap(), 0.0);
        assert_eq!(equalized_odds_gap(&truth, &[1; 6], &groups).unwrap(), 0.0);
        assert_eq!(
            equalized_odds_gap(&[1, 0, 1, 0], &[1, 0, 0, 0], &[1, 1, 0, 0]).unwrap(),
            1.0
        );
        assert!(matches!(
            equalized_odds_gap(&[1, 1, 0, 0], &[1, 0, 1, 0], &[1, 1, 0, 0]),
            Err(Error::UndefinedMetric(_))
        ));
        assert!(matches!(
            equalized_odds_gap(&[1, 0], &[1], &[1, 0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn phi_perfect_and_undefined() {
        let d = Dataset::from_triples(&[(1, 0.0, 1), (0, 0.0, 0), (1, 1.0, 1)], "p").unwrap();
        assert!((phi_coefficient(&d).unwrap() - 1.0).abs() < 1e-12);
        let d = Dataset::from_triples(&[(1, 0.0, 1), (0, 0.0, 1)], "p").unwrap();
        assert!(matches!(
            phi_coefficient(&d),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy(&[1, 0, 1], &[1, 0, 1]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 0, 1, 0], &[1, 1, 1, 1]).unwrap(), 0.5);
        assert!(matches!(accuracy(&[], &[]), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            accuracy(&[1], &[1, 0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn wasserstein_cases() {
        assert_eq!(wasserstein_1d(&[3.0, 1.0], &[1.0, 3.0]).unwrap(), 0.0);
        assert_eq!(wasserstein_1d(&[0.0], &[1.0]).unwrap(), 1.0);
        assert!((wasserstein_1d(&[1.0, 2.0, 3.0], &[3.0, 4.0, 5.0]).unwrap() - 2.0).abs() < 1e-12);
        // Unequal sizes: {0, 1} vs {0, 0.5, 1}; the CDFs differ by 1/6 on
        // [0, 1), so the distance is 1/6.
        let d = wasserstein_1d(&[0.0, 1.0], &[0.0, 0.5, 1.0]).unwrap();
        assert!((d - 1.0 / 6.0).abs() < 1e-12, "{d}");
        assert!(wasserstein_1d(&[], &[1.0]).is_err());
    }

    #[test]
    fn wasserstein_unequal_matches_replicated_equal() {
        // Replicating each point of the smaller sample k times does not change
        // its empirical distribution, so both routes must agree.
        let a = [0.3, -1.2, 2.5];
        let b = [0.0, 1.0, 4.0, -2.0, 0.5, 0.7];
        let a2: Vec<f64> = a.iter().flat_map(|&x| [x, x]).collect();
        let direct = wasserstein_1d(&a, &b).unwrap();
        let replicated = wasserstein_1d(&a2, &b).unwrap();
        assert!((direct - replicated).abs() < 1e-12);
    }

    #[test]
    fn weighted_wasserstein_cases() {
        let unit = |xs: &[f64]| xs.iter().map(|&x| (x, 1.0)).collect::<Vec<_>>();
        let d = weighted_wasserstein_1d(&unit(&[1.0, 2.0, 3.0]), &unit(&[3.0, 4.0, 5.0])).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
        // Doubling the weight of 0 in {0, 1} moves mass 1/6 over distance 1.
        let d = weighted_wasserstein_1d(&[(0.0, 2.0), (1.0, 1.0)], &unit(&[0.0, 1.0])).unwrap();
        assert!((d - 1.0 / 6.0).abs() < 1e-12);
        // Zero-weight points are ignored.
        let d = weighted_wasserstein_1d(&[(0.0, 1.0), (9.0, 0.0)], &unit(&[0.0])).unwrap();
        assert_eq!(d, 0.0);
        assert!(weighted_wasserstein_1d(&[(0.0, 0.0)], &unit(&[0.0])).is_err());
        assert!(weighted_wasserstein_1d(&[], &unit(&[0.0])).is_err());
    }

    #[test]
    fn histogram_cases() {
        let h = histogram(&[1.0, 2.0, 3.0], 2, (1.0, 3.0)).unwrap();
        assert_eq!(h.counts, vec![1, 2]);
        assert_eq!(h.bin_edges, vec![1.0, 2.0, 3.0]);
        let h = histogram(&[], 4, (0.0, 1.0)).unwrap();
        assert_eq!(h.counts, vec![0; 4]);
        assert!(histogram(&[1.0], 2, (3.0, 1.0)).is_err());
        assert!(histogram(&[1.0], 0, (0.0, 1.0)).is_err());
        let h = histogram(&[-5.0, 0.1, 99.0], 3, (0.0, 3.0)).unwrap();
        assert_eq!(h.counts, vec![2, 0, 1]);
    }

    #[test]
    fn report_serializes_nulls() {
        let one = Dataset::from_triples(&[(1, 1.0, 1), (1, 2.0, 0)], "one").unwrap();
        let json = serde_json::to_value(MetricsReport::for_dataset(&one)).unwrap();
        for key in ["group_skew", "spd", "di", "eo_gap", "phi", "accuracy"] {
            assert!(json[key].is_null(), "{key}");
        }
    }
}
