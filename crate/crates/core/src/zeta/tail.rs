//! Turning the partial sums at doubling cutoffs into a limit estimate.

use num_complex::Complex64;

use crate::registry::{Named, Registry};

/// Limit estimate from partial sums `S(M_0), S(2 M_0), S(4 M_0), ...`.
pub trait TailStrategy: Named + Send + Sync {
    /// Returns the estimate and an absolute error estimate (infinite when the
    /// sequence is too short to judge).
    fn estimate(&self, partials: &[Complex64]) -> (Complex64, f64);
}

/// The last partial sum, with the last doubling's change as error. For
/// positive terms the value lies between the last two partial sums.
pub struct Truncate;

impl Named for Truncate {
    fn name(&self) -> &'static str {
        "truncate"
    }
}

impl TailStrategy for Truncate {
    fn estimate(&self, partials: &[Complex64]) -> (Complex64, f64) {
        match partials {
            [] => (Complex64::new(0.0, 0.0), f64::INFINITY),
            [only] => (*only, f64::INFINITY),
            [.., prev, last] => (*last, (last - prev).norm()),
        }
    }
}

/// Wynn's epsilon algorithm on the partial-sum sequence. Box truncation
/// errors behave like sums of powers of `1/M` (times logarithms), which the
/// epsilon table removes order by order.
pub struct Wynn;

impl Named for Wynn {
    fn name(&self) -> &'static str {
        "wynn"
    }
}

/// Differences below this fraction of the entries end the table: further
/// columns would divide by rounding noise.
const WYNN_NOISE: f64 = 1e-14;

impl TailStrategy for Wynn {
    fn estimate(&self, partials: &[Complex64]) -> (Complex64, f64) {
        if partials.len() < 3 {
            return Truncate.estimate(partials);
        }
        // Last entries of the even columns, in order of increasing depth,
        // plus the second-to-last entry of the deepest one.
        let mut last_even = vec![*partials.last().unwrap()];
        let mut deepest_pair = (partials[partials.len() - 2], partials[partials.len() - 1]);
        let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); partials.len() + 1];
        let mut cur: Vec<Complex64> = partials.to_vec();
        let mut k = 0;
        while cur.len() >= 2 {
            let scale = cur.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
            let mut next = Vec::with_capacity(cur.len() - 1);
            for n in 0..cur.len() - 1 {
                let d = cur[n + 1] - cur[n];
                if d.norm() <= WYNN_NOISE * scale {
                    break;
                }
                next.push(prev[n + 1] + d.inv());
            }
            if next.len() < cur.len() - 1 {
                break;
            }
            k += 1;
            if k % 2 == 0 {
                last_even.push(*next.last().unwrap());
                if next.len() >= 2 {
                    deepest_pair = (next[next.len() - 2], next[next.len() - 1]);
                }
            }
            prev = cur;
            cur = next;
        }
        let best = *last_even.last().unwrap();
        let mut err = (deepest_pair.1 - deepest_pair.0).norm();
        if last_even.len() >= 2 {
            err = err.max((best - last_even[last_even.len() - 2]).norm());
        }
        (best, err)
    }
}

pub fn tail_strategies() -> Registry<dyn TailStrategy> {
    Registry::<dyn TailStrategy>::new()
        .with(Box::new(Truncate))
        .with(Box::new(Wynn))
        .with_default("wynn")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn truncate_reports_last_change() {
        let (v, e) = Truncate.estimate(&[c(1.0), c(1.5), c(1.75)]);
        assert_eq!(v, c(1.75));
        assert_eq!(e, 0.25);
        assert!(Truncate.estimate(&[c(1.0)]).1.is_infinite());
    }

    #[test]
    fn wynn_accelerates_zeta_two() {
        // S(M) = Σ_{k<=M} k^-2 at M = 1, 2, 4, ..., 1024.
        let mut partials = Vec::new();
        let mut s = 0.0;
        let mut k = 0u64;
        for e in 0..=10 {
            while k < 1 << e {
                k += 1;
                s += 1.0 / (k * k) as f64;
            }
            partials.push(c(s));
        }
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        let (v, err) = Wynn.estimate(&partials);
        assert!((v.re - exact).abs() < 1e-9, "{}", v.re - exact);
        assert!(err < 1e-6);
        assert!((partials.last().unwrap().re - exact).abs() > 1e-4);
    }

    #[test]
    fn wynn_is_exact_on_geometric_sequences() {
        let partials: Vec<Complex64> = (0..6).map(|k| c(2.0 - 0.5f64.powi(k))).collect();
        let (v, _) = Wynn.estimate(&partials);
        assert!((v.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn wynn_handles_constant_sequences() {
        let (v, err) = Wynn.estimate(&[c(3.0), c(3.0), c(3.0), c(3.0)]);
        assert_eq!(v, c(3.0));
        assert_eq!(err, 0.0);
    }
}
