//! Exact solutions used as oracles, and the special functions they need.
//!
//! Infinite series are summed in log space so that huge terms and tiny
//! exponential prefactors never overflow separately. Summation stops once a
//! term falls below `1e-16` of the running sum past the peak term; all series
//! here have log-concave terms, so the tail after that point is geometric.

use num::{BigInt, One, ToPrimitive};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::polyexp::{Exponents, PolyExp1D, PolyExp2D, Rational};
use crate::problems::{CoagKernel, FragSpec, ProblemSpec};
use crate::quad;

pub const SERIES_TOL: f64 = 1e-16;
pub const SERIES_CAP: usize = 200;

/// Modified Bessel function `I₁(z)` by its power series.
///
/// Returns NaN when 200 terms do not reach the tolerance (`z` beyond ~200).
pub fn bessel_i1(z: f64) -> f64 {
    let half = 0.5 * z;
    let q = half * half;
    let mut term = half;
    let mut sum = half;
    for k in 0..SERIES_CAP {
        if term.abs() <= SERIES_TOL * sum.abs() {
            return sum;
        }
        term *= q / ((k + 1) as f64 * (k + 2) as f64);
        sum += term;
    }
    f64::NAN
}

/// `k·ln v` with the convention `0·ln 0 = 0`.
fn xlogy(k: f64, v: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * v.ln()
    }
}

/// `ln Σ_k exp(log_term(k))`.
fn log_series(log_term: impl Fn(usize) -> f64) -> Result<f64> {
    let mut peak = f64::NEG_INFINITY;
    let mut scaled = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..SERIES_CAP {
        let l = log_term(k);
        if l > peak {
            scaled = scaled * (peak - l).exp() + 1.0;
            peak = l;
        } else if l > f64::NEG_INFINITY {
            scaled += (l - peak).exp();
        }
        let negligible = l == f64::NEG_INFINITY || l - peak - scaled.ln() < SERIES_TOL.ln();
        if k > 0 && l <= prev && negligible {
            return Ok(peak + scaled.ln());
        }
        prev = l;
    }
    Err(Error::NonConvergence { terms: SERIES_CAP })
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum ExactSolution {
    /// `K = 1`, `u₀ = e^{-x}`: `4/(2+t)² e^{-2x/(2+t)}`.
    ConstKernelExp,
    /// `K = x + y`, `u₀ = e^{-x}`: closed form through `I₁`.
    SumKernelExp,
    /// `K = xy`, `u₀ = e^{-x}`: the pre-gelation power series.
    ProductKernelExp,
    /// Bivariate constant kernel from a gamma-shaped initial density.
    BivariateConst { n0: Rational, m1: Rational, m2: Rational, p1: Rational, p2: Rational },
    /// Binary breakage with `S(x) = x`, `u₀ = e^{-x}`: `(1+t)² e^{-x(1+t)}`.
    FragLinearExp,
}

impl ExactSolution {
    /// The oracle matching `problem`, if one is known.
    pub fn for_problem(problem: &ProblemSpec) -> Option<Self> {
        let e1 = PolyExp1D::exponential(Rational::one());
        match problem {
            ProblemSpec::Coag1D { kernel, u0 } if *u0 == e1 => Some(match kernel {
                CoagKernel::Constant => Self::ConstKernelExp,
                CoagKernel::Sum => Self::SumKernelExp,
                CoagKernel::Product => Self::ProductKernelExp,
            }),
            ProblemSpec::Frag { frag, u0 } if *u0 == e1 && *frag == FragSpec::binary(Rational::one()) => {
                Some(Self::FragLinearExp)
            }
            ProblemSpec::Coag2D { u0 } => Self::bivariate_from_initial(u0),
            _ => None,
        }
    }

    /// Recognize `c·xy·e^{-ax-by}`, the `p₁ = p₂ = 1` member of the family.
    fn bivariate_from_initial(u0: &PolyExp2D) -> Option<Self> {
        let terms: Vec<_> = u0.iter().collect();
        let [(rate, exps, c)] = terms.as_slice() else {
            return None;
        };
        if **exps != Exponents::new([1, 1], 0) {
            return None;
        }
        let two = Rational::from_integer(BigInt::from(2));
        let m1 = &two / &rate[0];
        let m2 = &two / &rate[1];
        let n0 = *c * &m1 * &m1 * &m2 * &m2 / Rational::from_integer(BigInt::from(16));
        Some(Self::BivariateConst { n0, m1, m2, p1: Rational::one(), p2: Rational::one() })
    }

    pub fn dimension(&self) -> usize {
        match self {
            Self::BivariateConst { .. } => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ConstKernelExp => "constant-kernel",
            Self::SumKernelExp => "sum-kernel",
            Self::ProductKernelExp => "product-kernel",
            Self::BivariateConst { .. } => "bivariate-constant",
            Self::FragLinearExp => "binary-breakage",
        }
    }

    /// Density at `(x, t)` for the 1-D variants.
    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        match self {
            Self::ConstKernelExp => Ok(4.0 / (2.0 + t).powi(2) * (-2.0 * x / (2.0 + t)).exp()),
            Self::FragLinearExp => Ok((1.0 + t).powi(2) * (-x * (1.0 + t)).exp()),
            Self::SumKernelExp => {
                // 2I₁(z)/z = Σ (z²/4)^k / (k!(k+1)!), z = 2x√(1 − e^{-t}).
                let q = -(-t).exp_m1() * x * x;
                let ln_series = log_series(|k| {
                    let k = k as f64;
                    xlogy(k, q) - ln_gamma(k + 1.0) - ln_gamma(k + 2.0)
                })?;
                Ok(f64::exp(((-t).exp() - 2.0) * x - t + ln_series))
            }
            Self::ProductKernelExp => {
                let ln_series = log_series(|k| {
                    let k = k as f64;
                    xlogy(k, t) + xlogy(3.0 * k, x) - ln_gamma(k + 2.0) - ln_gamma(2.0 * k + 2.0)
                })?;
                Ok((ln_series - (t + 1.0) * x).exp())
            }
            Self::BivariateConst { .. } => Err(Error::DimensionMismatch { problem: 2, density: 1 }),
        }
    }

    /// Density at `(x, y, t)` for the bivariate variant.
    pub fn eval_2d(&self, x: f64, y: f64, t: f64) -> Result<f64> {
        let Self::BivariateConst { n0, m1, m2, p1, p2 } = self else {
            return Err(Error::DimensionMismatch { problem: 1, density: 2 });
        };
        let (n0, m1, m2) = (to_f64(n0), to_f64(m1), to_f64(m2));
        let (a1, a2) = (to_f64(p1) + 1.0, to_f64(p2) + 1.0);
        let (lx, ly) = (x / m1, y / m2);
        let r = t / (t + 2.0);
        let shape = a1 * a1.ln() + a2 * a2.ln();
        let ln_series = log_series(|k| {
            let k1 = (k + 1) as f64;
            xlogy(k as f64, r) + k as f64 * shape + xlogy(k1 * a1 - 1.0, lx) + xlogy(k1 * a2 - 1.0, ly)
                - ln_gamma(k1 * a1)
                - ln_gamma(k1 * a2)
        })?;
        let prefactor = (4.0 * n0 / (m1 * m2 * (t + 2.0).powi(2))).ln() + shape;
        Ok((prefactor + ln_series - a1 * lx - a2 * ly).exp())
    }

    /// `μ_j(t) = ∫ x^j u dx`, in closed form where one exists and by
    /// quadrature of [`eval`](Self::eval) otherwise.
    pub fn moment(&self, j: u32, t: f64) -> Result<f64> {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        match (self, j) {
            (Self::ConstKernelExp, _) => Ok(fact(j) * (2.0 + t).powi(j as i32 - 1) * 2f64.powi(1 - j as i32)),
            (Self::FragLinearExp, _) => Ok(fact(j) * (1.0 + t).powi(1 - j as i32)),
            (Self::SumKernelExp, 0) => Ok((-t).exp()),
            (Self::SumKernelExp, 1) => Ok(1.0),
            (Self::SumKernelExp, 2) => Ok(2.0 * (2.0 * t).exp()),
            (Self::BivariateConst { .. }, _) => Err(Error::DimensionMismatch { problem: 2, density: 1 }),
            _ => self.moment_numeric(j, t),
        }
    }

    /// `∫₀^∞ x^j u dx` by adaptive quadrature over doubling intervals.
    ///
    /// Fails with `NonConvergence` when the density's tail reaches sizes the
    /// series cannot sum, e.g. the product kernel close to gelation.
    pub fn moment_numeric(&self, j: u32, t: f64) -> Result<f64> {
        let integrand = |x: f64| self.eval(x, t).map(|u| x.powi(j as i32) * u);
        // Surface the first evaluation failure instead of integrating NaNs.
        let failure = std::cell::RefCell::new(None);
        let f = |x: f64| match integrand(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let mut total = quad::integrate(f, 0.0, 1.0, 1e-14);
        let mut a = 1.0;
        while a < 1e4 {
            let piece = quad::integrate(f, a, 2.0 * a, 1e-14 * total.abs().max(1e-300));
            total += piece;
            a *= 2.0;
            if let Some(e) = failure.borrow_mut().take() {
                return Err(e);
            }
            // Stop once the piece, or the tail it leaves behind, is negligible.
            let edge = (a * f(a)).abs();
            if (piece.abs() <= 1e-14 * total.abs() || edge <= 1e-16 * total.abs()) && a >= 8.0 {
                return Ok(total);
            }
        }
        Err(Error::NonConvergence { terms: SERIES_CAP })
    }

    /// `μ_{ij}(t) = ∫∫ x^i y^j u dx dy` for the bivariate variant, summed
    /// term by term with `∫ x^i X^{a−1} e^{−(p+1)X} dx = m^{i+1} Γ(a+i)/(p+1)^{a+i}`
    /// (`X = x/m`); `μ₀₀`, `μ₁₀` and `μ₀₁` have closed forms.
    pub fn moment_2d(&self, i: u32, j: u32, t: f64) -> Result<f64> {
        let Self::BivariateConst { n0, m1, m2, p1, p2 } = self else {
            return Err(Error::DimensionMismatch { problem: 1, density: 2 });
        };
        let (n0, m1, m2) = (to_f64(n0), to_f64(m1), to_f64(m2));
        match (i, j) {
            (0, 0) => return Ok(2.0 * n0 / (2.0 + t)),
            (1, 0) => return Ok(n0 * m1),
            (0, 1) => return Ok(n0 * m2),
            _ => {}
        }
        let (a1, a2) = (to_f64(p1) + 1.0, to_f64(p2) + 1.0);
        let (fi, fj) = (f64::from(i), f64::from(j));
        let r = t / (t + 2.0);
        let shape = a1 * a1.ln() + a2 * a2.ln();
        let ln_series = log_series(|k| {
            let k1 = (k + 1) as f64;
            let (e1, e2) = (k1 * a1, k1 * a2);
            xlogy(k as f64, r) + k as f64 * shape + ln_gamma(e1 + fi) - ln_gamma(e1) - (e1 + fi) * a1.ln()
                + ln_gamma(e2 + fj)
                - ln_gamma(e2)
                - (e2 + fj) * a2.ln()
        })?;
        let prefactor = (4.0 * n0 / (t + 2.0).powi(2)).ln() + shape + fi * m1.ln() + fj * m2.ln();
        Ok((prefactor + ln_series).exp())
    }
}

/// Pointwise density; `y` is required exactly for the bivariate variant.
pub fn eval_exact(sol: &ExactSolution, x: f64, y: Option<f64>, t: f64) -> Result<f64> {
    match (sol.dimension(), y) {
        (1, None) => sol.eval(x, t),
        (2, Some(y)) => sol.eval_2d(x, y, t),
        (2, None) => Err(Error::DimensionMismatch { problem: 2, density: 1 }),
        _ => Err(Error::DimensionMismatch { problem: 1, density: 2 }),
    }
}
