//! One-dimensional check of `ζ(s) Γ(s) = ∫_0^∞ ε^{s-1} / (e^ε - 1) dε`.

use crate::error::{Error, Result};
use crate::matrix::validate_matrix;

use super::{eval_zeta, gamma, EvalRequest, NeumaierSum};

#[derive(Clone, Debug, PartialEq)]
pub struct MellinCheck {
    pub s: f64,
    /// `ζ(s) Γ(s)` from the series.
    pub lhs: f64,
    /// The integral by quadrature.
    pub rhs: f64,
    pub abs_diff: f64,
}

/// `x / (e^x - 1)`, extended by 1 at 0.
fn todd(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x / x.exp_m1()
    }
}

/// Composite Simpson rule with `intervals` (rounded up to even) subintervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let k = intervals.max(2).next_multiple_of(2);
    let h = (b - a) / k as f64;
    let mut acc = NeumaierSum::new();
    acc.add(f(a));
    acc.add(f(b));
    for i in 1..k {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(a + i as f64 * h));
    }
    acc.value() * h / 3.0
}

/// Compares `ζ(s) Γ(s)` with the Mellin integral of the kernel of `A = [1]`,
/// integrated over `[0, 1]` and `[1, cutoff]` with `quad_points` Simpson
/// intervals each. For `s < 2` the substitution `ε = t^{1/(s-1)}` removes the
/// integrable singularity at 0.
pub fn mellin_cross_check_1d(s: f64, quad_points: usize, cutoff: f64) -> Result<MellinCheck> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("s must exceed 1, got {s}")));
    }
    if quad_points == 0 {
        return Err(Error::InvalidParameter(
            "quad_points must be positive".into(),
        ));
    }
    if !(cutoff > 1.0 && cutoff.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "cutoff must exceed 1, got {cutoff}"
        )));
    }
    let one = validate_matrix(vec![vec![1.0]])?;
    let zeta = eval_zeta(&EvalRequest::real(one, &[s]))?.value.re;
    let lhs = zeta * gamma(s);

    let head = if s < 2.0 {
        let p = 1.0 / (s - 1.0);
        simpson(|t| todd(t.powf(p)), 0.0, 1.0, quad_points) / (s - 1.0)
    } else {
        simpson(|e| e.powf(s - 2.0) * todd(e), 0.0, 1.0, quad_points)
    };
    let tail = simpson(|e| e.powf(s - 2.0) * todd(e), 1.0, cutoff, quad_points);
    let rhs = head + tail;
    Ok(MellinCheck {
        s,
        lhs,
        rhs,
        abs_diff: (lhs - rhs).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_holds_at_integer_and_fractional_points() {
        for (s, expected) in [
            (2.0, 1.644_934_066_848),
            (3.0, 2.404_113_806_319),
            (4.5, 12.268_071_302_997),
        ] {
            let c = mellin_cross_check_1d(s, 10_000, 40.0).unwrap();
            assert!((c.lhs - expected).abs() < 1e-9, "s={s}: {}", c.lhs);
            assert!(c.abs_diff < 1e-4, "s={s}: {}", c.abs_diff);
        }
    }

    #[test]
    fn substitution_below_two() {
        let c = mellin_cross_check_1d(1.5, 10_000, 40.0).unwrap();
        assert!((c.lhs - 2.315_157_373_394).abs() < 1e-9);
        assert!(c.abs_diff < 1e-4, "{}", c.abs_diff);
    }

    #[test]
    fn rejects_pole_and_bad_parameters() {
        assert!(matches!(
            mellin_cross_check_1d(1.0, 100, 40.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(mellin_cross_check_1d(2.0, 0, 40.0).is_err());
        assert!(mellin_cross_check_1d(2.0, 100, 0.5).is_err());
    }
}
