use crate::error::{Error, Result};

/// `e^{-z} I_n(z)`.
pub fn scaled_bessel_i(n: usize, z: f64) -> Result<f64> {
    Ok(scaled_bessel_i_all(n, z)?[n])
}

/// `e^{-z} I_k(z)` for `k = 0..=n_max`, by Miller's backward recurrence
/// normalized with `I_0 + 2 sum_k I_k = e^z`.
pub fn scaled_bessel_i_all(n_max: usize, z: f64) -> Result<Vec<f64>> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::invalid(format!("scaled Bessel argument must be finite and >= 0, got {z}")));
    }
    let mut out = vec![0.0; n_max + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let start = n_max + 50 + (2.0 * (60.0 * (n_max as f64 + z)).sqrt()).ceil() as usize;
    let (mut next, mut cur) = (0.0f64, 1e-280f64);
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        // cur = I_k, next = I_{k+1}
        let prev = 2.0 * k as f64 / z * cur + next;
        if k <= n_max {
            out[k] = cur;
        }
        norm += 2.0 * cur;
        next = cur;
        cur = prev;
        if cur > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            out.iter_mut().for_each(|v| *v *= s);
        }
    }
    out[0] = cur;
    norm += cur;
    out.iter_mut().for_each(|v| *v /= norm);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Power series sum_k (z/2)^{2k+n} / (k! (k+n)!) with the e^{-z} factor
    // folded into each term's logarithm.
    fn series(n: usize, z: f64) -> f64 {
        let lz = (z / 2.0).ln();
        let mut ln_fact = vec![0.0f64; 600];
        for k in 1..600 {
            ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
        }
        let mut terms: Vec<f64> = (0..400)
            .map(|k| ((2 * k + n) as f64 * lz - ln_fact[k] - ln_fact[k + n] - z).exp())
            .collect();
        terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        terms.iter().sum()
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(scaled_bessel_i(0, 0.0).unwrap(), 1.0);
        for n in 1..5 {
            assert_eq!(scaled_bessel_i(n, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn matches_power_series() {
        for z in [0.1, 1.0, 7.5, 15.9, 50.0, 100.0] {
            let all = scaled_bessel_i_all(200, z).unwrap();
            for n in [0usize, 1, 2, 5, 17, 50, 120, 200] {
                let oracle = series(n, z);
                if oracle < 1e-290 {
                    continue;
                }
                let rel = (all[n] - oracle).abs() / oracle;
                assert!(rel <= 1e-12, "n={n} z={z}: {} vs {oracle} ({rel:e})", all[n]);
            }
        }
    }

    #[test]
    fn large_argument_asymptote() {
        let v = scaled_bessel_i(0, 50.0).unwrap();
        let asym = (1.0 + 1.0 / 400.0 + 9.0 / (2.0 * 400.0 * 400.0)) / (2.0 * std::f64::consts::PI * 50.0).sqrt();
        assert!((v - asym).abs() / v < 1e-5);
        assert!((v - 0.0563).abs() < 5e-4);
    }

    #[test]
    fn satisfies_three_term_recurrence() {
        let z = 50.0;
        let i = scaled_bessel_i_all(51, z).unwrap();
        for n in 1..=50 {
            let lhs = i[n - 1] - i[n + 1];
            let rhs = 2.0 * n as f64 / z * i[n];
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(i[n - 1]));
        }
    }

    #[test]
    fn rejects_negative_argument() {
        assert!(scaled_bessel_i(0, -1.0).is_err());
        assert!(scaled_bessel_i(0, f64::NAN).is_err());
    }
}
