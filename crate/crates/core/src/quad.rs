//! Quadrature over uniformly spaced samples.

/// Running composite trapezoid `I_k = integral_0^{s_k} f ds`.
pub fn cumulative_trapezoid(s: &[f64], f: &[f64]) -> Vec<f64> {
    assert_eq!(s.len(), f.len());
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..f.len() {
        acc += 0.5 * (f[k] + f[k - 1]) * (s[k] - s[k - 1]);
        out.push(acc);
    }
    out
}

pub fn trapezoid(s: &[f64], f: &[f64]) -> f64 {
    cumulative_trapezoid(s, f).last().copied().unwrap_or(0.0)
}

/// Cumulative trapezoid with the first Euler–Maclaurin end correction
/// `-(h^2/12) (f'(s_k) - f'(s_0))`, raising the order from 2 to 4 on uniform
/// samples. Endpoint derivatives come from second-order one-sided/centered
/// differences of the samples.
pub fn cumulative_corrected_trapezoid(s: &[f64], f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut out = cumulative_trapezoid(s, f);
    if n < 3 {
        return out;
    }
    let h = (s[n - 1] - s[0]) / (n - 1) as f64;
    let deriv = |k: usize| -> f64 {
        if k == 0 {
            (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
        } else if k == n - 1 {
            (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h)
        } else {
            (f[k + 1] - f[k - 1]) / (2.0 * h)
        }
    };
    let d0 = deriv(0);
    for (k, v) in out.iter_mut().enumerate().skip(1) {
        *v -= h * h / 12.0 * (deriv(k) - d0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_exact_on_linear() {
        let s: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let f: Vec<f64> = s.iter().map(|x| 3.0 * x + 1.0).collect();
        assert!((trapezoid(&s, &f) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn corrected_rule_is_fourth_order() {
        let err = |n: usize| {
            let s: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64 * 2.0).collect();
            let f: Vec<f64> = s.iter().map(|x| (3.0 * x).sin()).collect();
            let exact = (1.0 - (6.0f64).cos()) / 3.0;
            (cumulative_corrected_trapezoid(&s, &f)[n] - exact).abs()
        };
        let ratio = err(40) / err(80);
        assert!(ratio > 12.0, "ratio {ratio}");
    }
}
