//! Order accuracy and Kendall's rank correlation between edge orders.
//!
//! Both reduce to counting inversions of one ranking read in the order of
//! the other, which a merge sort does in `O(M log M)` for `M = C(n,2)` pairs.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::space::{EdgeOrder, PointConfig};

/// Number of pairs `i < j` with `values[i] > values[j]`.
pub fn count_inversions<T: PartialOrd + Copy>(values: &[T]) -> u64 {
    let mut buf = values.to_vec();
    let mut scratch = values.to_vec();
    sort_count(&mut buf, &mut scratch)
}

fn sort_count<T: PartialOrd + Copy>(v: &mut [T], scratch: &mut [T]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = {
        let (l, r) = v.split_at_mut(mid);
        let (sl, sr) = scratch.split_at_mut(mid);
        sort_count(l, sl) + sort_count(r, sr)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            scratch[k] = v[j];
            inv += (mid - i) as u64;
            j += 1;
        } else {
            scratch[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    scratch[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    scratch[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&scratch[..n]);
    inv
}

/// Number of pairs-of-pairs, `C(C(n,2), 2)`.
pub fn comparison_count(n: usize) -> u64 {
    let m = crate::space::pair_count(n) as u64;
    m * m.saturating_sub(1) / 2
}

/// Inversions between two orders on the same pair set.
pub fn discordant_pairs(reference: &EdgeOrder, image: &EdgeOrder) -> Result<u64> {
    if reference.n() != image.n() {
        return Err(Error::SizeMismatch { expected: reference.n(), got: image.n() });
    }
    let read: Vec<usize> = reference.sequence().iter().map(|&p| image.ranking()[p]).collect();
    Ok(count_inversions(&read))
}

fn ratio(num: u64, den: u64) -> Ratio<i64> {
    if den == 0 {
        return Ratio::from_integer(1);
    }
    Ratio::new(num as i64, den as i64)
}

/// Fraction of pairs-of-pairs compared the same way by both orders.
///
/// `tie_count` comparisons are additionally charged as discordant; pass the
/// number of comparisons tied in the image when `image` was obtained by
/// breaking those ties in the reference's favour, and 0 otherwise.
pub fn order_accuracy(reference: &EdgeOrder, image: &EdgeOrder, tie_count: u64) -> Result<Ratio<i64>> {
    let total = comparison_count(reference.n());
    let bad = discordant_pairs(reference, image)? + tie_count;
    if bad > total {
        return Err(Error::InvalidParameter(format!("tie count {tie_count} exceeds comparisons")));
    }
    Ok(ratio(total - bad, total))
}

/// Kendall's rank correlation `2α − 1`.
pub fn kendall_tau(a: &EdgeOrder, b: &EdgeOrder) -> Result<Ratio<i64>> {
    let alpha = order_accuracy(a, b, 0)?;
    Ok(alpha * 2 - 1)
}

/// Concordance counts of a configuration against a reference order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Concordance {
    pub concordant: u64,
    pub discordant: u64,
    pub ties: u64,
}

impl Concordance {
    pub fn total(&self) -> u64 {
        self.concordant + self.discordant + self.ties
    }

    /// Accuracy with ties counted as discordant.
    pub fn accuracy(&self) -> Ratio<i64> {
        ratio(self.concordant, self.total())
    }

    pub fn accuracy_f64(&self) -> f64 {
        if self.total() == 0 {
            1.0
        } else {
            self.concordant as f64 / self.total() as f64
        }
    }
}

/// Compares the distances of `config` with `reference`, counting tied image
/// distances separately.
pub fn concordance(reference: &EdgeOrder, config: &PointConfig) -> Result<Concordance> {
    if reference.n() != config.n() {
        return Err(Error::SizeMismatch { expected: reference.n(), got: config.n() });
    }
    let keys = config.pair_keys();
    concordance_of_keys(reference, &keys)
}

/// As [`concordance`] for precomputed per-pair keys in pair-index order.
pub fn concordance_of_keys(reference: &EdgeOrder, keys: &[f64]) -> Result<Concordance> {
    if keys.len() != reference.len() {
        return Err(Error::SizeMismatch { expected: reference.len(), got: keys.len() });
    }
    let read: Vec<f64> = reference.sequence().iter().map(|&p| keys[p]).collect();
    let discordant = count_inversions(&read);
    let mut sorted = read;
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            ties += run * (run - 1) / 2;
            run = 1;
        }
    }
    ties += run * (run - 1) / 2;
    let total = comparison_count(reference.n());
    Ok(Concordance { concordant: total - discordant - ties, discordant, ties })
}

/// Order accuracy of a configuration with respect to `reference`; tied
/// image distances count as discordant.
pub fn config_accuracy(reference: &EdgeOrder, config: &PointConfig) -> Result<Ratio<i64>> {
    Ok(concordance(reference, config)?.accuracy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Metric;

    fn brute_inversions(v: &[i32]) -> u64 {
        let mut c = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn inversions_match_brute_force() {
        let cases: [&[i32]; 5] = [&[], &[1], &[3, 2, 1], &[1, 3, 2, 5, 4, 0], &[2, 2, 1, 2, 0]];
        for c in cases {
            assert_eq!(count_inversions(c), brute_inversions(c));
        }
    }

    #[test]
    fn identity_and_reversal() {
        let a = EdgeOrder::from_sequence(4, vec![3, 1, 0, 5, 2, 4]).unwrap();
        assert_eq!(order_accuracy(&a, &a, 0).unwrap(), Ratio::from_integer(1));
        assert_eq!(order_accuracy(&a, &a.reversed(), 0).unwrap(), Ratio::from_integer(0));
        assert_eq!(kendall_tau(&a, &a.reversed()).unwrap(), Ratio::from_integer(-1));
    }

    #[test]
    fn one_adjacent_swap_on_four_points() {
        let a = EdgeOrder::from_sequence(4, vec![0, 1, 2, 3, 4, 5]).unwrap();
        let b = EdgeOrder::from_sequence(4, vec![0, 1, 3, 2, 4, 5]).unwrap();
        assert_eq!(order_accuracy(&a, &b, 0).unwrap(), Ratio::new(14, 15));
    }

    #[test]
    fn mismatched_sizes() {
        let a = EdgeOrder::from_sequence(2, vec![0]).unwrap();
        let b = EdgeOrder::from_sequence(3, vec![0, 1, 2]).unwrap();
        assert!(order_accuracy(&a, &b, 0).is_err());
    }

    #[test]
    fn ties_are_discordant() {
        // three collinear equally spaced points: {0,1} and {1,2} tie
        let c = PointConfig::from_points(&[vec![0.0], vec![1.0], vec![2.0]], Metric::Euclidean).unwrap();
        let r = EdgeOrder::from_sequence(3, vec![0, 2, 1]).unwrap();
        let k = concordance(&r, &c).unwrap();
        assert_eq!(k, Concordance { concordant: 2, discordant: 0, ties: 1 });
        assert_eq!(k.accuracy(), Ratio::new(2, 3));
    }
}
