//! Gauss-Legendre quadrature on [0, 1].

use crate::real::Real;

/// Nodes and weights of the n-point Gauss-Legendre rule mapped to `[0, 1]`
/// (weights sum to one). Nodes are found by Newton iteration on the Legendre
/// recurrence from the Chebyshev initial guess; deterministic.
pub(crate) fn gauss_legendre_01<T: Real>(n: usize) -> Vec<(T, T)> {
    assert!(n >= 1, "quadrature needs at least one point");
    let mut out = Vec::with_capacity(n);
    let nf = T::of_usize(n);
    for i in 0..n {
        // Root of P_n in (-1, 1).
        let guess = (T::PI() * (T::of_usize(i) + T::of(0.75)) / (nf + T::of(0.5))).cos();
        let mut x = -guess; // ascending order
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= T::epsilon() * T::of(4.0) * x.abs().max(T::one()) {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
        out.push(((x + T::one()) * T::of(0.5), w * T::of(0.5)));
    }
    out
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_deriv<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf = T::of_usize(k);
        let p2 = ((T::of(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = T::of_usize(n) * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        // 8-point rule is exact through degree 15.
        let rule = gauss_legendre_01::<f64>(8);
        for degree in 0..=15usize {
            let got: f64 = rule
                .iter()
                .map(|&(x, w)| w * x.powi(degree as i32))
                .sum();
            let want = 1.0 / (degree as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "degree {degree}: {got} vs {want}");
        }
    }

    #[test]
    fn high_order_rule_handles_smooth_integrand() {
        let rule = gauss_legendre_01::<f64>(64);
        let got: f64 = rule.iter().map(|&(x, w)| w * (3.0 * x).exp()).sum();
        let want = ((3.0f64).exp() - 1.0) / 3.0;
        assert!((got - want).abs() < 1e-12 * want);
    }
}
