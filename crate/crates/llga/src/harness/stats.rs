//! Order statistics with the conventions used throughout the outputs:
//! lower median for even counts, quartile halves that exclude the median
//! for odd counts, censored values carried as +∞.

/// Lower median: element at index ⌊(k−1)/2⌋ of the sorted values. Sorts the
/// slice in place. Panics on an empty slice.
pub fn lower_median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty set");
    values.sort_unstable_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

/// Interquartile range Q3 − Q1 where each quartile is the lower median of
/// its half; for an odd count the middle element belongs to neither half.
/// {1,2,3} therefore has IQR 3 − 1 = 2. Sorts the slice in place.
pub fn iqr(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "IQR of an empty set");
    values.sort_unstable_by(f64::total_cmp);
    let k = values.len();
    if k == 1 {
        return 0.0;
    }
    let lower = &values[..k / 2];
    let upper = if k.is_multiple_of(2) {
        &values[k / 2..]
    } else {
        &values[k / 2 + 1..]
    };
    let q1 = lower[(lower.len() - 1) / 2];
    let q3 = upper[(upper.len() - 1) / 2];
    q3 - q1
}
