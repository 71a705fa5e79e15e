//! Numerical evaluation of
//! `ζ_A(s) = Σ_{m ∈ Z_{>0}^r} Π_i (a_i1 m_1 + ... + a_ir m_r)^{-s_i}`
//! inside its absolute-convergence region.
//!
//! The series is summed over boxes `{1..M}^r` with `M` doubling; each
//! doubling adds only the new shell. The partial sums are handed to a
//! [`TailStrategy`] that turns them into a limit estimate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{SigmaMatrix, SubsetCap};
use crate::poles::enumerate_pole_families;

pub mod gamma;
pub mod mellin;
pub mod sum;
pub mod tail;

pub use gamma::gamma;
pub use mellin::{mellin_cross_check_1d, MellinCheck};
pub use sum::{ComplexSum, NeumaierSum};
pub use tail::{tail_strategies, TailStrategy, Truncate, Wynn};

/// Total number of lattice points the default per-axis cap allows.
pub const DEFAULT_TERM_BUDGET: u64 = 1 << 24;

pub const DEFAULT_REL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct EvalRequest {
    pub matrix: SigmaMatrix,
    pub s: Vec<Complex64>,
    pub rel_tol: f64,
    /// Largest cutoff `M`. `None` picks the largest power of two whose box
    /// stays within [`DEFAULT_TERM_BUDGET`] points.
    pub max_terms_per_axis: Option<u64>,
    /// Name of a registered [`TailStrategy`].
    pub tail: String,
    pub cap: SubsetCap,
}

impl EvalRequest {
    pub fn new(matrix: SigmaMatrix, s: Vec<Complex64>) -> Self {
        Self {
            matrix,
            s,
            rel_tol: DEFAULT_REL_TOL,
            max_terms_per_axis: None,
            tail: "wynn".into(),
            cap: SubsetCap::default(),
        }
    }

    pub fn real(matrix: SigmaMatrix, s: &[f64]) -> Self {
        Self::new(matrix, s.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_terms(mut self, max_terms_per_axis: u64) -> Self {
        self.max_terms_per_axis = Some(max_terms_per_axis);
        self
    }

    pub fn with_tail(mut self, tail: &str) -> Self {
        self.tail = tail.into();
        self
    }

    fn cutoff_cap(&self) -> u64 {
        self.max_terms_per_axis.unwrap_or_else(|| {
            let r = self.matrix.cols() as u32;
            let mut m = 1u64;
            while (2 * m)
                .checked_pow(r)
                .is_some_and(|p| p <= DEFAULT_TERM_BUDGET)
            {
                m *= 2;
            }
            m
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    /// Absolute error estimate from the tail strategy.
    pub error_estimate: f64,
    /// Lattice points summed.
    pub terms_used: u64,
    pub converged: bool,
    /// Raw partial sum over the final box.
    pub partial_sum: Complex64,
    /// Final box side `M`.
    pub cutoff: u64,
    pub tail: String,
}

/// Sums `Π_i L_i(m)^{-s_i}` over lattice shells.
struct Summand<'a> {
    a: &'a SigmaMatrix,
    s_re: Vec<f64>,
    s_im: Vec<f64>,
    real: bool,
    logs: Vec<f64>,
}

impl<'a> Summand<'a> {
    fn new(a: &'a SigmaMatrix, s: &[Complex64]) -> Self {
        Self {
            a,
            s_re: s.iter().map(|z| z.re).collect(),
            s_im: s.iter().map(|z| z.im).collect(),
            real: s.iter().all(|z| z.im == 0.0),
            logs: vec![0.0; a.rows()],
        }
    }

    /// Adds every point of `{1..hi}^r` outside `{1..lo}^r`; returns the count.
    fn shell(&mut self, lo: u64, hi: u64, acc: &mut ComplexSum) -> u64 {
        let r = self.a.cols();
        let mut count = 0;
        let mut ranges = vec![(1, hi); r];
        // Split the shell by the first axis whose coordinate exceeds `lo`.
        for k in 0..r {
            for (axis, range) in ranges.iter_mut().enumerate() {
                *range = match axis.cmp(&k) {
                    std::cmp::Ordering::Less => (1, lo),
                    std::cmp::Ordering::Equal => (lo + 1, hi),
                    std::cmp::Ordering::Greater => (1, hi),
                };
            }
            if ranges.iter().all(|(a, b)| a <= b) {
                let mut base = vec![0.0; self.a.rows()];
                count += self.walk(0, &ranges, &mut base, acc);
            }
        }
        count
    }

    fn walk(
        &mut self,
        axis: usize,
        ranges: &[(u64, u64)],
        base: &mut [f64],
        acc: &mut ComplexSum,
    ) -> u64 {
        let n = self.a.rows();
        let (lo, hi) = ranges[axis];
        let last = axis + 1 == ranges.len();
        let mut count = 0;
        for m in lo..=hi {
            let mf = m as f64;
            if last {
                let mut x = 0.0;
                for (i, &b) in base.iter().enumerate() {
                    let l = b + self.a.get(i, axis) * mf;
                    self.logs[i] = l.ln();
                    x += self.s_re[i] * self.logs[i];
                }
                let mag = (-x).exp();
                if self.real {
                    acc.add_real(mag);
                } else {
                    let y: f64 = (0..n).map(|i| self.s_im[i] * self.logs[i]).sum();
                    acc.add(Complex64::from_polar(mag, -y));
                }
                count += 1;
            } else {
                let saved: Vec<f64> = base.to_vec();
                for (i, b) in base.iter_mut().enumerate() {
                    *b += self.a.get(i, axis) * mf;
                }
                count += self.walk(axis + 1, ranges, base, acc);
                base.copy_from_slice(&saved);
            }
        }
        count
    }
}

/// Evaluates `ζ_A(s)`. Fails with [`Error::OutsideConvergenceRegion`] unless
/// `Re(s)` satisfies every strict convergence constraint.
pub fn eval_zeta(req: &EvalRequest) -> Result<EvalResult> {
    let n = req.matrix.rows();
    if req.s.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: req.s.len(),
        });
    }
    if req.s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParameter("s must be finite".into()));
    }
    if !(req.rel_tol > 0.0 && req.rel_tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "rel_tol must be positive, got {}",
            req.rel_tol
        )));
    }
    let cap = req.cutoff_cap();
    if cap == 0 {
        return Err(Error::InvalidParameter(
            "max_terms_per_axis must be at least 1".into(),
        ));
    }
    let strategies = tail_strategies();
    let strategy = strategies.get(&req.tail)?;

    let sigma: Vec<f64> = req.s.iter().map(|z| z.re).collect();
    let report = enumerate_pole_families(&req.matrix, req.cap)?;
    if let Some(c) = report.violated_constraint(&sigma)? {
        return Err(Error::OutsideConvergenceRegion {
            constraint: c.describe(),
        });
    }

    let mut summand = Summand::new(&req.matrix, &req.s);
    let mut acc = ComplexSum::new();
    let mut partials = Vec::new();
    let mut terms = 0;
    let mut lo = 0;
    let mut hi = 1;
    loop {
        terms += summand.shell(lo, hi, &mut acc);
        partials.push(acc.value());
        let (value, err) = strategy.estimate(&partials);
        let converged = err <= req.rel_tol * value.norm();
        if converged || hi.saturating_mul(2) > cap {
            return Ok(EvalResult {
                value,
                error_estimate: err,
                terms_used: terms,
                converged,
                partial_sum: acc.value(),
                cutoff: hi,
                tail: strategy.name().to_string(),
            });
        }
        lo = hi;
        hi *= 2;
    }
}

/// `Π_j 1 / (exp(C_j(eps)) - 1)`, the closed form of
/// `Σ_{m ∈ Z_{>0}^r} exp(-<A m, eps>)`.
pub fn eval_kernel(a: &SigmaMatrix, eps: &[f64]) -> Result<f64> {
    if eps.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: eps.len(),
        });
    }
    if let Some(i) = eps.iter().position(|&e| e.is_nan() || e <= 0.0) {
        return Err(Error::NonpositiveEpsilon(i + 1));
    }
    Ok((0..a.cols())
        .map(|j| 1.0 / a.column_form(j, eps).exp_m1())
        .product())
}
