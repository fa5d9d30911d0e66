//! Error measures: mean absolute distance, squared error, median, relative
//! error and the generalized cross-validation estimate.

use crate::error::{Error, Result};
use crate::scalar::{sort_scalars, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorSummary<T> {
    pub mad: T,
    pub variance: T,
    pub n: usize,
}

fn check_lengths<T>(actual: &[T], predicted: &[T]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch(actual.len(), predicted.len()));
    }
    if actual.is_empty() {
        return Err(Error::Empty);
    }
    Ok(())
}

/// Mean absolute distance between paired values.
pub fn mad<T: Scalar>(actual: &[T], predicted: &[T]) -> Result<T> {
    check_lengths(actual, predicted)?;
    let sum = actual.iter().zip(predicted).fold(T::zero(), |acc, (&a, &p)| acc + (a - p).abs());
    Ok(sum / T::from_usize_s(actual.len()))
}

/// Mean squared distance between paired values.
pub fn variance_err<T: Scalar>(actual: &[T], predicted: &[T]) -> Result<T> {
    check_lengths(actual, predicted)?;
    let sum = actual.iter().zip(predicted).fold(T::zero(), |acc, (&a, &p)| acc + (a - p) * (a - p));
    Ok(sum / T::from_usize_s(actual.len()))
}

pub fn summarize<T: Scalar>(actual: &[T], predicted: &[T]) -> Result<ErrorSummary<T>> {
    Ok(ErrorSummary { mad: mad(actual, predicted)?, variance: variance_err(actual, predicted)?, n: actual.len() })
}

/// Median; the mean of the two middle values for even lengths.
pub fn median<T: Scalar>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let mut v = values.to_vec();
    Ok(median_in_place(&mut v))
}

/// Median of a non-empty buffer, reordering it.
pub(crate) fn median_in_place<T: Scalar>(v: &mut [T]) -> T {
    debug_assert!(!v.is_empty());
    let n = v.len();
    let mid = n / 2;
    let (_, &mut hi, _) = v.select_nth_unstable_by(mid, |a, b| a.total_cmp_s(b));
    if n % 2 == 1 {
        hi
    } else {
        let lo = v[..mid].iter().copied().fold(T::neg_infinity(), T::max);
        (lo + hi) * T::half()
    }
}

pub(crate) fn median_sorted<T: Scalar>(sorted: &[T]) -> T {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) * T::half()
    }
}

/// Sum of absolute deviations from the median.
pub fn sad_from_median<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    let mut v = values.to_vec();
    sort_scalars(&mut v);
    let m = median_sorted(&v);
    v.iter().fold(T::zero(), |acc, &y| acc + (y - m).abs())
}

/// MAD of predicting the median of `values` for every value.
pub fn baseline_mad<T: Scalar>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    Ok(sad_from_median(values) / T::from_usize_s(values.len()))
}

/// Model MAD normalized by the MAD of always predicting the median.
pub fn relative_error<T: Scalar>(model_mad: T, baseline_mad: T) -> Result<T> {
    if baseline_mad <= T::zero() {
        return Err(Error::Degenerate("baseline MAD is zero (constant target)".into()));
    }
    Ok(model_mad / baseline_mad)
}

/// Generalized cross-validation: training MAD inflated by `1 / (1 - C(M)/n)`.
pub fn gcv<T: Scalar>(train_mad: T, complexity: T, n: usize) -> Result<T> {
    let n_t = T::from_usize_s(n);
    if n == 0 || complexity < T::zero() || complexity >= n_t {
        return Err(Error::InvalidArgument(format!("gcv needs 0 <= C(M) < n (C(M) = {complexity}, n = {n})")));
    }
    Ok(train_mad / (T::one() - complexity / n_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mad_examples() {
        assert_eq!(mad(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(mad(&[0.0, 4.0], &[2.0, 2.0]).unwrap(), 2.0);
        assert!((mad(&[1.0f64, 2.0, 9.0], &[2.0; 3]).unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert!(matches!(mad(&[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch(1, 2))));
        assert!(matches!(mad::<f64>(&[], &[]), Err(Error::Empty)));
    }

    #[test]
    fn variance_examples() {
        assert_eq!(variance_err(&[3.0, 1.0], &[3.0, 1.0]).unwrap(), 0.0);
        assert_eq!(variance_err(&[0.0, 4.0], &[2.0, 2.0]).unwrap(), 4.0);
        assert!(variance_err(&[0.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn variance_dominates_squared_mad() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.gen_range(1..30);
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect();
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect();
            let s = summarize(&a, &p).unwrap();
            assert!(s.variance >= s.mad * s.mad - 1e-9 * s.variance.max(1.0));
        }
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&[1.0, 2.0, 9.0]).unwrap(), 2.0);
        assert_eq!(median(&[3.0, 1.0]).unwrap(), 2.0);
        assert_eq!(median(&[9.0, 1.0, 2.0, 100.0]).unwrap(), 5.5);
        assert!(matches!(median::<f64>(&[]), Err(Error::Empty)));
        assert_eq!(median(&[2.5f32]).unwrap(), 2.5);
    }

    #[test]
    fn median_minimizes_absolute_deviation() {
        // Brute force over the sample values: the minimum over the reals is attained at one of them.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.gen_range(1..25);
            let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(0..40) as f64 * 0.5).collect();
            let cost = |c: f64| ys.iter().map(|y| (y - c).abs()).sum::<f64>();
            let at_median = cost(median(&ys).unwrap());
            for &c in &ys {
                assert!(at_median <= cost(c) + 1e-9);
            }
        }
    }

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_error(1.0, 4.0).unwrap(), 0.25);
        assert_eq!(relative_error(3.3, 3.3).unwrap(), 1.0);
        assert!(matches!(relative_error(1.0, 0.0), Err(Error::Degenerate(_))));
        assert_eq!(baseline_mad(&[1.0, 2.0, 9.0]).unwrap(), 8.0 / 3.0);
    }

    #[test]
    fn gcv_examples() {
        assert_eq!(gcv(2.0, 0.0, 100).unwrap(), 2.0);
        assert!((gcv(2.0f64, 10.0, 100).unwrap() - 2.0 / 0.9).abs() < 1e-12);
        assert!(gcv(2.0, 100.0, 100).is_err());
        assert!(gcv(2.0, -1.0, 100).is_err());
    }

    proptest! {
        #[test]
        fn gcv_inflates_and_is_monotone(train in 0.0f64..100.0, n in 1usize..500, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let n_f = n as f64;
            let (c1, c2) = ((lo * n_f).floor().min(n_f - 1.0), (hi * n_f).floor().min(n_f - 1.0));
            let g1 = gcv(train, c1, n).unwrap();
            let g2 = gcv(train, c2, n).unwrap();
            prop_assert!(g1 >= train);
            prop_assert!(g2 >= g1);
        }

        #[test]
        fn mad_permutation_and_translation_invariant(
            pairs in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40),
            shift in -1e3f64..1e3,
            rot in 0usize..40,
        ) {
            let (a, p): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
            let base = mad(&a, &p).unwrap();
            let k = rot % a.len();
            let (mut ar, mut pr) = (a.clone(), p.clone());
            ar.rotate_left(k);
            pr.rotate_left(k);
            prop_assert!((mad(&ar, &pr).unwrap() - base).abs() <= 1e-9 * base.max(1.0));
            let at: Vec<f64> = a.iter().map(|v| v + shift).collect();
            let pt: Vec<f64> = p.iter().map(|v| v + shift).collect();
            prop_assert!((mad(&at, &pt).unwrap() - base).abs() <= 1e-9 * (base + shift.abs()).max(1.0));
            let vb = variance_err(&a, &p).unwrap();
            prop_assert!((variance_err(&at, &pt).unwrap() - vb).abs() <= 1e-7 * (vb + shift * shift).max(1.0));
        }
    }
}
