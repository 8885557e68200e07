//! Model specifications and the right-hand sides of the population balance
//! equations, applied to exact [`PolyExp`] densities.
//!
//! * coagulation: `½∫₀^x K(x−y,y) u(x−y) u(y) dy − ∫₀^∞ K(x,y) u(x) u(y) dy`
//! * fragmentation: `∫_x^∞ B(x,y) S(y) u(y) dy − S(x) u(x)`
//! * bivariate coagulation with `K ≡ 1`: `½ u ⋆ u − u · μ₀₀(u)`

use num::{BigInt, One, Signed};

use crate::error::{Error, Result};
use crate::polyexp::{integer, PolyExp, PolyExp1D, PolyExp2D, Rational};

/// Coagulation kernels with a closed-form gain/loss reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoagKernel {
    /// `K(x, y) = 1`
    Constant,
    /// `K(x, y) = x + y`
    Sum,
    /// `K(x, y) = x y`
    Product,
}

impl CoagKernel {
    pub fn name(&self) -> &'static str {
        match self {
            CoagKernel::Constant => "constant",
            CoagKernel::Sum => "sum",
            CoagKernel::Product => "product",
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            CoagKernel::Constant => 1.0,
            CoagKernel::Sum => x + y,
            CoagKernel::Product => x * y,
        }
    }
}

impl std::str::FromStr for CoagKernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(CoagKernel::Constant),
            "sum" => Ok(CoagKernel::Sum),
            "product" => Ok(CoagKernel::Product),
            other => Err(Error::InvalidSpec(format!("unknown kernel {other:?}"))),
        }
    }
}

/// Power-law breakage `B(x, y) = c x^{r−1} / y^r` with selection `S(x) = s x^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FragSpec {
    c: Rational,
    r: u32,
    s: Rational,
    k: u32,
}

impl FragSpec {
    pub fn new(c: Rational, r: u32, s: Rational, k: u32) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidSpec(format!("breakage constant c = {c} must be positive")));
        }
        if r == 0 {
            return Err(Error::InvalidSpec("breakage exponent r must be at least 1".into()));
        }
        if !s.is_positive() {
            return Err(Error::InvalidSpec(format!("selection constant s = {s} must be positive")));
        }
        Ok(Self { c, r, s, k })
    }

    /// Binary breakage `B = 2/y` with `S(x) = s x`.
    pub fn binary(s: Rational) -> Self {
        Self::new(integer(2), 1, s, 1).expect("binary breakage parameters are valid")
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }
    pub fn r(&self) -> u32 {
        self.r
    }
    pub fn s(&self) -> &Rational {
        &self.s
    }
    pub fn k(&self) -> u32 {
        self.k
    }

    /// `∫₀^y x B(x, y) dx = y`, which holds exactly when `c = r + 1`.
    pub fn is_mass_conserving(&self) -> bool {
        self.c == integer(self.r as i64 + 1)
    }

    pub fn breakage(&self, x: f64, y: f64) -> f64 {
        use num::ToPrimitive;
        self.c.to_f64().unwrap_or(f64::NAN) * x.powi(self.r as i32 - 1) / y.powi(self.r as i32)
    }

    pub fn selection(&self, x: f64) -> f64 {
        use num::ToPrimitive;
        self.s.to_f64().unwrap_or(f64::NAN) * x.powi(self.k as i32)
    }
}

/// One of the four supported population balance models with its initial density.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProblemSpec {
    Coag1D { kernel: CoagKernel, u0: PolyExp1D },
    Frag { frag: FragSpec, u0: PolyExp1D },
    Ccfe { kernel: CoagKernel, frag: FragSpec, u0: PolyExp1D },
    Coag2D { u0: PolyExp2D },
}

fn check_initial<const D: usize>(u0: &PolyExp<D>) -> Result<()> {
    if u0.is_zero() {
        return Err(Error::InvalidSpec("initial density is identically zero".into()));
    }
    if !u0.has_positive_rates() {
        return Err(Error::InvalidSpec("initial density needs strictly positive rates".into()));
    }
    if !u0.is_time_independent() {
        return Err(Error::InvalidSpec("initial density must not depend on t".into()));
    }
    Ok(())
}

impl ProblemSpec {
    pub fn coag(kernel: CoagKernel, u0: PolyExp1D) -> Result<Self> {
        check_initial(&u0)?;
        Ok(Self::Coag1D { kernel, u0 })
    }

    pub fn frag(frag: FragSpec, u0: PolyExp1D) -> Result<Self> {
        check_initial(&u0)?;
        Ok(Self::Frag { frag, u0 })
    }

    pub fn ccfe(kernel: CoagKernel, frag: FragSpec, u0: PolyExp1D) -> Result<Self> {
        check_initial(&u0)?;
        Ok(Self::Ccfe { kernel, frag, u0 })
    }

    pub fn coag2d(u0: PolyExp2D) -> Result<Self> {
        check_initial(&u0)?;
        Ok(Self::Coag2D { u0 })
    }

    pub fn dimension(&self) -> usize {
        match self {
            ProblemSpec::Coag2D { .. } => 2,
            _ => 1,
        }
    }

    pub fn kernel(&self) -> Option<CoagKernel> {
        match self {
            ProblemSpec::Coag1D { kernel, .. } | ProblemSpec::Ccfe { kernel, .. } => Some(*kernel),
            _ => None,
        }
    }

    pub fn frag_spec(&self) -> Option<&FragSpec> {
        match self {
            ProblemSpec::Frag { frag, .. } | ProblemSpec::Ccfe { frag, .. } => Some(frag),
            _ => None,
        }
    }

    /// True for models whose right-hand side is linear in `u`.
    pub fn is_linear(&self) -> bool {
        matches!(self, ProblemSpec::Frag { .. })
    }

    pub fn initial_1d(&self) -> Result<&PolyExp1D> {
        match self {
            ProblemSpec::Coag1D { u0, .. } | ProblemSpec::Frag { u0, .. } | ProblemSpec::Ccfe { u0, .. } => Ok(u0),
            ProblemSpec::Coag2D { .. } => Err(Error::DimensionMismatch { problem: 2, density: 1 }),
        }
    }

    pub fn initial_2d(&self) -> Result<&PolyExp2D> {
        match self {
            ProblemSpec::Coag2D { u0 } => Ok(u0),
            _ => Err(Error::DimensionMismatch { problem: 1, density: 2 }),
        }
    }

    /// Right-hand side of the 1-D models at `u`.
    pub fn rhs_1d(&self, u: &PolyExp1D) -> Result<PolyExp1D> {
        match self {
            ProblemSpec::Coag1D { kernel, .. } => coag_bilinear(*kernel, u, u),
            ProblemSpec::Frag { frag, .. } => frag_rhs(frag, u),
            ProblemSpec::Ccfe { kernel, frag, .. } => Ok(coag_bilinear(*kernel, u, u)? + frag_rhs(frag, u)?),
            ProblemSpec::Coag2D { .. } => Err(Error::DimensionMismatch { problem: 2, density: 1 }),
        }
    }

    /// Right-hand side of the bivariate model at `u`.
    pub fn rhs_2d(&self, u: &PolyExp2D) -> Result<PolyExp2D> {
        match self {
            ProblemSpec::Coag2D { .. } => coag2d_bilinear(u, u),
            _ => Err(Error::DimensionMismatch { problem: 1, density: 2 }),
        }
    }
}

/// `Q(u, w) = ½ gain(u, w) − loss(u, w)`, so that the coagulation right-hand
/// side is `Q(u, u)`.
///
/// With `K(x−y, y)` substituted inside the gain integral:
/// * constant: gain `u ⋆ w`, loss `u · μ₀(w)`
/// * sum: gain `x · (u ⋆ w)`, loss `u · (x μ₀(w) + μ₁(w))`
/// * product: gain `(x u) ⋆ (x w)`, loss `x u · μ₁(w)`
pub fn coag_bilinear(kernel: CoagKernel, u: &PolyExp1D, w: &PolyExp1D) -> Result<PolyExp1D> {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let (gain, loss) = match kernel {
        CoagKernel::Constant => (u.convolve(w)?, u.mul_time_poly(&w.moment_full(0)?)),
        CoagKernel::Sum => {
            let gain = u.convolve(w)?.mul_x(1);
            let loss = u.mul_x(1).mul_time_poly(&w.moment_full(0)?) + u.mul_time_poly(&w.moment_full(1)?);
            (gain, loss)
        }
        CoagKernel::Product => {
            let gain = u.mul_x(1).convolve(&w.mul_x(1))?;
            let loss = u.mul_x(1).mul_time_poly(&w.moment_full(1)?);
            (gain, loss)
        }
    };
    Ok(gain.scale(&half) - loss)
}

/// `∫_x^∞ B(x,y) S(y) u(y) dy − S(x) u(x) = c s x^{r−1} ∫_x^∞ y^{k−r} u dy − s x^k u`.
pub fn frag_rhs(frag: &FragSpec, u: &PolyExp1D) -> Result<PolyExp1D> {
    let tail = u.tail_integral(frag.k as i64 - frag.r as i64)?;
    let birth = tail.mul_x(frag.r - 1).scale(&(&frag.c * &frag.s));
    let death = u.mul_x(frag.k).scale(&frag.s);
    Ok(birth - death)
}

/// `Q₂(u, w) = ½ u ⋆ w − u · μ₀₀(w)` for the constant bivariate kernel.
pub fn coag2d_bilinear(u: &PolyExp2D, w: &PolyExp2D) -> Result<PolyExp2D> {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let gain = u.convolve(w)?;
    let loss = u.mul_time_poly(&w.moment2d(0, 0)?);
    Ok(gain.scale(&half) - loss)
}
