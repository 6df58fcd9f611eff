//! Exact counting helpers.

/// Binomial coefficient C(n, k), exact. Returns 0 when `k > n`. Panics if the
/// exact value overflows `u128`; use [`binomial_saturating`] where set sizes
/// may be astronomically large.
pub fn binomial_coefficient(n: u64, k: u64) -> u128 {
    match binomial_impl(n, k) {
        Some(v) => v,
        None => panic!("C({n},{k}) overflows u128"),
    }
}

/// Binomial coefficient that clamps to `u128::MAX` on overflow. Intended for
/// cardinalities that are only compared against small enumeration caps.
pub fn binomial_saturating(n: u64, k: u64) -> u128 {
    binomial_impl(n, k).unwrap_or(u128::MAX)
}

fn binomial_impl(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    // r * (n-k+i) is divisible by i because r already holds C(n-k+i-1, i-1)
    // times i-1 consecutive factors; the running value stays integral.
    for i in 1..=k as u128 {
        r = r.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    Some(r)
}

/// Visits every k-subset of `pool` in lexicographic order of positions,
/// passing the chosen pool values as a slice. `k = 0` visits the empty
/// subset once; `k > pool.len()` visits nothing.
pub fn for_each_combination<F: FnMut(&[usize])>(pool: &[usize], k: usize, mut visit: F) {
    if k > pool.len() {
        return;
    }
    if k == 0 {
        visit(&[]);
        return;
    }
    let n = pool.len();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut combo = vec![0usize; k];
    loop {
        for (slot, &i) in combo.iter_mut().zip(&idx) {
            *slot = pool[i];
        }
        visit(&combo);
        // Advance to the next index vector: bump the rightmost position that
        // still has room, reset everything after it.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
