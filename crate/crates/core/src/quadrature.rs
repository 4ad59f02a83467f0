//! Product-trapezoid rule for the Riemann–Liouville integral on a uniform grid.

use crate::scalar::Real;
use crate::special::ln_gamma;

/// Weights `w_0..w_N` such that
/// `I^γ g(t_N) ≈ Σ_j w_j g(t_j)` for `g` linear between nodes `t_j = j·h`.
///
/// Powers are normalised by `N^γ` so large orders do not overflow.
pub fn product_trapezoid_weights<T: Real>(gamma_order: T, n: usize, h: T) -> Vec<T> {
    if n == 0 {
        return vec![T::zero()];
    }
    let nf = T::from_usize_lossy(n);
    let scale = (gamma_order * (h * nf).ln() - ln_gamma(gamma_order + T::lit(2.0))).exp();
    // k^{γ+1} / N^γ
    let q = |k: T| if k <= T::zero() { T::zero() } else { k * (k / nf).powf(gamma_order) };
    let mut w = Vec::with_capacity(n + 1);
    w.push(q(nf - T::one()) - (nf - gamma_order - T::one()));
    for j in 1..n {
        let k = T::from_usize_lossy(n - j);
        w.push(q(k + T::one()) - T::lit(2.0) * q(k) + q(k - T::one()));
    }
    w.push(nf.powf(-gamma_order));
    w.iter_mut().for_each(|x| *x *= scale);
    w
}

/// `I^γ g` at every node of a uniform grid, `O(N²)`.
pub fn fractional_integral<T: Real>(samples: &[T], gamma_order: T, h: T) -> Vec<T> {
    (0..samples.len())
        .map(|n| {
            let w = product_trapezoid_weights(gamma_order, n, h);
            w.iter().zip(samples).fold(T::zero(), |acc, (&a, &g)| acc + a * g)
        })
        .collect()
}
