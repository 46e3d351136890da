//! Low-discrepancy sample points.

/// The `i`-th element of the van der Corput sequence in `base`.
pub fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// The midpoint of `(lo, hi)` followed by `extra` quasi-random points, all
/// kept `margin · (hi − lo)` away from the ends.
pub fn interior_samples(lo: f64, hi: f64, extra: usize, margin: f64) -> Vec<f64> {
    let len = hi - lo;
    let (a, b) = (lo + margin * len, hi - margin * len);
    let mut out = vec![0.5 * (lo + hi)];
    out.extend((1..=extra as u64).map(|k| a + (b - a) * halton(k, 2)));
    out
}

/// `n` points of the two-dimensional Halton sequence scaled into a box.
pub fn halton_box(n: usize, skip: u64, re: (f64, f64), im: (f64, f64)) -> Vec<(f64, f64)> {
    (0..n as u64)
        .map(|k| {
            let i = k + 1 + skip;
            (
                re.0 + (re.1 - re.0) * halton(i, 2),
                im.0 + (im.1 - im.0) * halton(i, 3),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn van_der_corput_base_two() {
        let got: Vec<f64> = (1..5).map(|i| halton(i, 2)).collect();
        assert_eq!(got, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn samples_avoid_the_ends() {
        let s = interior_samples(2.0, 3.0, 3, 1e-3);
        assert_eq!(s[0], 2.5);
        assert!(s.iter().all(|&t| t > 2.001 - 1e-15 && t < 2.999 + 1e-15));
    }
}
