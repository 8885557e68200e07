//! Exact algebra over polynomial-exponential functions.
//!
//! A [`PolyExp<D>`] is a finite sum
//!
//! ```text
//!     Σ  c · x₁^i₁ ⋯ x_D^i_D · t^j · exp(−a₁x₁ − ⋯ − a_D x_D)
//! ```
//!
//! with rational coefficients `c` and nonnegative rational rates `a`. The
//! class is closed under every integral operator the coagulation and
//! fragmentation iterations apply: size convolution, tail integrals,
//! full-line moments and time antiderivatives. All symbolic work is exact;
//! floating point only appears in [`PolyExp::evaluate`] and [`CompiledPolyExp`].
//!
//! Terms are stored in a two-level ordered map (rate vector, then monomial
//! exponents). Zero coefficients and empty rate blocks are pruned after every
//! operation, so derived `PartialEq` is mathematical equality.

mod calculus;
mod dump;
mod eval;
mod time_poly;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};

pub use dump::{format_rational, parse_rational};
pub use eval::CompiledPolyExp;
pub use time_poly::TimePoly;

pub type Rational = BigRational;

/// `num / den` as an exact rational.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exponents of one monomial: one per spatial coordinate, plus time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponents<const D: usize> {
    pub space: [u32; D],
    pub t: u32,
}

impl<const D: usize> Exponents<D> {
    pub const fn new(space: [u32; D], t: u32) -> Self {
        Self { space, t }
    }

    fn times(self, other: Self) -> Self {
        let mut space = self.space;
        for (s, o) in space.iter_mut().zip(other.space) {
            *s += o;
        }
        Self { space, t: self.t + other.t }
    }

    /// Largest single exponent, time included.
    pub fn max(&self) -> u32 {
        self.space.iter().copied().fold(self.t, u32::max)
    }
}

pub(crate) type Poly<const D: usize> = BTreeMap<Exponents<D>, Rational>;

pub(crate) fn accumulate<const D: usize>(poly: &mut Poly<D>, exps: Exponents<D>, coeff: Rational) {
    if coeff.is_zero() {
        return;
    }
    match poly.entry(exps) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(coeff);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += coeff;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Exact polynomial-exponential function of `D` size coordinates and time.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyExp<const D: usize> {
    terms: BTreeMap<[Rational; D], Poly<D>>,
}

/// Density of a single size coordinate, `u(x, t)`.
pub type PolyExp1D = PolyExp<1>;
/// Bivariate density `u(x, y, t)`.
pub type PolyExp2D = PolyExp<2>;

impl<const D: usize> Default for PolyExp<D> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<const D: usize> PolyExp<D> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `coeff · x^space · t^t · exp(−rates·x)`.
    pub fn monomial(coeff: Rational, space: [u32; D], t: u32, rates: [Rational; D]) -> Self {
        let mut out = Self::zero();
        out.add_term(rates, Exponents::new(space, t), coeff);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored monomials across all rate blocks.
    pub fn num_terms(&self) -> usize {
        self.terms.values().map(BTreeMap::len).sum()
    }

    pub fn rates(&self) -> impl Iterator<Item = &[Rational; D]> {
        self.terms.keys()
    }

    /// All terms in canonical order: rate vector, then exponents.
    pub fn iter(&self) -> impl Iterator<Item = (&[Rational; D], &Exponents<D>, &Rational)> {
        self.terms
            .iter()
            .flat_map(|(rate, poly)| poly.iter().map(move |(e, c)| (rate, e, c)))
    }

    pub(crate) fn blocks(&self) -> impl Iterator<Item = (&[Rational; D], &Poly<D>)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, rates: [Rational; D], exps: Exponents<D>, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let poly = self.terms.entry(rates.clone()).or_default();
        accumulate(poly, exps, coeff);
        if poly.is_empty() {
            self.terms.remove(&rates);
        }
    }

    pub(crate) fn add_block(&mut self, rates: [Rational; D], block: Poly<D>) {
        if block.is_empty() {
            return;
        }
        match self.terms.entry(rates) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(block);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                for (e, c) in block {
                    accumulate(o.get_mut(), e, c);
                }
                if o.get().is_empty() {
                    o.remove();
                }
            }
        }
    }

    /// Apply `f` to every coefficient; zero results are pruned.
    fn map_coeffs(&self, f: impl Fn(&Exponents<D>, &Rational) -> Rational) -> Self {
        let mut out = Self::zero();
        for (rate, poly) in &self.terms {
            let block: Poly<D> = poly
                .iter()
                .map(|(e, c)| (*e, f(e, c)))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            out.add_block(rate.clone(), block);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        self.map_coeffs(|_, v| v * c)
    }

    /// Multiply by `x_axis^power`.
    pub fn mul_space_power(&self, axis: usize, power: u32) -> Self {
        assert!(axis < D, "axis {axis} out of range for {D}-D density");
        let mut out = Self::zero();
        for (rate, poly) in &self.terms {
            let block = poly
                .iter()
                .map(|(e, c)| {
                    let mut e = *e;
                    e.space[axis] += power;
                    (e, c.clone())
                })
                .collect();
            out.add_block(rate.clone(), block);
        }
        out
    }

    /// Multiply by a polynomial in `t` (e.g. a moment of another density).
    pub fn mul_time_poly(&self, p: &TimePoly) -> Self {
        let mut out = Self::zero();
        for (rate, poly) in &self.terms {
            let mut block = Poly::new();
            for (e, c) in poly {
                for (j, pc) in p.iter() {
                    accumulate(&mut block, Exponents::new(e.space, e.t + j), c * pc);
                }
            }
            out.add_block(rate.clone(), block);
        }
        out
    }

    /// Highest power of `t`; 0 for the zero function.
    pub fn t_degree(&self) -> u32 {
        self.iter().map(|(_, e, _)| e.t).max().unwrap_or(0)
    }

    /// Lowest power of `t` present; `None` for the zero function.
    pub fn t_order(&self) -> Option<u32> {
        self.iter().map(|(_, e, _)| e.t).min()
    }

    pub fn space_degree(&self, axis: usize) -> u32 {
        self.iter().map(|(_, e, _)| e.space[axis]).max().unwrap_or(0)
    }

    /// Largest exponent over all coordinates and time.
    pub fn max_exponent(&self) -> u32 {
        self.iter().map(|(_, e, _)| e.max()).max().unwrap_or(0)
    }

    /// Coefficient of `t^j`, as a time-independent function.
    pub fn t_coefficient(&self, j: u32) -> Self {
        let mut out = Self::zero();
        for (rate, e, c) in self.iter() {
            if e.t == j {
                out.add_term(rate.clone(), Exponents::new(e.space, 0), c.clone());
            }
        }
        out
    }

    /// The function at `t = 0`.
    pub fn at_time_zero(&self) -> Self {
        self.t_coefficient(0)
    }

    /// Sum of the `t^j` blocks with `j <= degree` (Taylor truncation in time).
    pub fn truncate_in_time(&self, degree: u32) -> Self {
        let mut out = Self::zero();
        for (rate, e, c) in self.iter() {
            if e.t <= degree {
                out.add_term(rate.clone(), *e, c.clone());
            }
        }
        out
    }

    /// `∂/∂t`.
    pub fn time_derivative(&self) -> Self {
        let mut out = Self::zero();
        for (rate, e, c) in self.iter() {
            if e.t > 0 {
                out.add_term(
                    rate.clone(),
                    Exponents::new(e.space, e.t - 1),
                    c * Rational::from_integer(BigInt::from(e.t)),
                );
            }
        }
        out
    }

    /// True when every rate component is strictly positive.
    pub fn has_positive_rates(&self) -> bool {
        self.rates().all(|r| r.iter().all(|a| a.is_positive()))
    }
}

impl PolyExp<1> {
    /// `exp(−a x)`.
    pub fn exponential(a: Rational) -> Self {
        Self::monomial(Rational::one(), [0], 0, [a])
    }

    /// `c · x^p · exp(−a x)`.
    pub fn mono(c: Rational, p: u32, a: Rational) -> Self {
        Self::monomial(c, [p], 0, [a])
    }

    /// `c · x^p · t^j · exp(−a x)`.
    pub fn mono_t(c: Rational, p: u32, j: u32, a: Rational) -> Self {
        Self::monomial(c, [p], j, [a])
    }

    /// Multiply by `x^power`.
    pub fn mul_x(&self, power: u32) -> Self {
        self.mul_space_power(0, power)
    }
}

impl PolyExp<2> {
    /// `c · x^px · y^py · exp(−ax x − ay y)`.
    pub fn mono(c: Rational, px: u32, py: u32, ax: Rational, ay: Rational) -> Self {
        Self::monomial(c, [px, py], 0, [ax, ay])
    }
}

impl<const D: usize> Neg for &PolyExp<D> {
    type Output = PolyExp<D>;
    fn neg(self) -> PolyExp<D> {
        self.map_coeffs(|_, c| -c)
    }
}

impl<const D: usize> Neg for PolyExp<D> {
    type Output = PolyExp<D>;
    fn neg(self) -> PolyExp<D> {
        -&self
    }
}

impl<const D: usize> AddAssign<&PolyExp<D>> for PolyExp<D> {
    fn add_assign(&mut self, rhs: &PolyExp<D>) {
        for (rate, poly) in &rhs.terms {
            self.add_block(rate.clone(), poly.clone());
        }
    }
}

impl<const D: usize> Add for &PolyExp<D> {
    type Output = PolyExp<D>;
    fn add(self, rhs: &PolyExp<D>) -> PolyExp<D> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<const D: usize> Add for PolyExp<D> {
    type Output = PolyExp<D>;
    fn add(mut self, rhs: PolyExp<D>) -> PolyExp<D> {
        for (rate, poly) in rhs.terms {
            self.add_block(rate, poly);
        }
        self
    }
}

impl<const D: usize> Sub for &PolyExp<D> {
    type Output = PolyExp<D>;
    fn sub(self, rhs: &PolyExp<D>) -> PolyExp<D> {
        self + &(-rhs)
    }
}

impl<const D: usize> Sub for PolyExp<D> {
    type Output = PolyExp<D>;
    fn sub(self, rhs: PolyExp<D>) -> PolyExp<D> {
        self + (-rhs)
    }
}

/// Pointwise product: rates add, polynomials multiply.
impl<const D: usize> Mul for &PolyExp<D> {
    type Output = PolyExp<D>;
    // Exponential rates add under multiplication.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &PolyExp<D>) -> PolyExp<D> {
        let mut out = PolyExp::zero();
        for (ra, pa) in &self.terms {
            for (rb, pb) in &rhs.terms {
                let rate: [Rational; D] = std::array::from_fn(|d| &ra[d] + &rb[d]);
                let mut block = Poly::new();
                for (ea, ca) in pa {
                    for (eb, cb) in pb {
                        accumulate(&mut block, ea.times(*eb), ca * cb);
                    }
                }
                out.add_block(rate, block);
            }
        }
        out
    }
}

impl<const D: usize> fmt::Display for PolyExp<D> {
    /// Human-readable form, e.g. `1/2*x*t*exp(-1*x) - 1*t*exp(-1*x)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 3] = ["x", "y", "z"];
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (rate, e, c) in self.iter() {
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            write!(f, "{}", c.abs())?;
            for (d, p) in e.space.iter().enumerate() {
                if *p > 0 {
                    write!(f, "*{}^{}", NAMES[d.min(2)], p)?;
                }
            }
            if e.t > 0 {
                write!(f, "*t^{}", e.t)?;
            }
            if rate.iter().any(|a| !a.is_zero()) {
                f.write_str("*exp(")?;
                for (d, a) in rate.iter().enumerate() {
                    write!(f, "-{}*{}", a, NAMES[d.min(2)])?;
                }
                f.write_str(")")?;
            }
        }
        Ok(())
    }
}

pub(crate) fn factorials(n: u32) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(BigInt::one());
    for k in 1..=n {
        let next = out[k as usize - 1].clone() * BigInt::from(k);
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn additive_inverse_is_empty() {
        let f = PolyExp1D::exponential(integer(1));
        let g = PolyExp1D::exponential(integer(1)).scale(&integer(-1));
        assert!((&f + &g).is_zero());
        assert_eq!(f.clone() - f, PolyExp1D::zero());
    }

    #[test]
    fn scale_half() {
        let f = PolyExp1D::mono(integer(1), 1, integer(1));
        assert_eq!(f.scale(&rational(1, 2)), PolyExp1D::mono(rational(1, 2), 1, integer(1)));
        assert!(f.scale(&integer(0)).is_zero());
    }

    #[test]
    fn product_adds_rates() {
        let e = PolyExp1D::exponential(integer(1));
        assert_eq!(&e * &e, PolyExp1D::exponential(integer(2)));
    }

    #[test]
    fn rates_compared_exactly() {
        let a = PolyExp1D::exponential(rational(2, 4));
        let b = PolyExp1D::exponential(rational(1, 2));
        assert_eq!(a.num_terms(), 1);
        assert!((&a - &b).is_zero());
    }

    #[test]
    fn time_blocks() {
        let f = PolyExp1D::mono_t(integer(3), 1, 2, integer(1)) + PolyExp1D::mono(integer(1), 0, integer(1));
        assert_eq!(f.t_degree(), 2);
        assert_eq!(f.t_order(), Some(0));
        assert_eq!(f.t_coefficient(2), PolyExp1D::mono(integer(3), 1, integer(1)));
        assert_eq!(f.time_derivative(), PolyExp1D::mono_t(integer(6), 1, 1, integer(1)));
        assert_eq!(f.truncate_in_time(1), PolyExp1D::mono(integer(1), 0, integer(1)));
    }

    #[test]
    fn display_is_readable() {
        let f = PolyExp1D::mono_t(rational(1, 2), 1, 1, integer(1)) - PolyExp1D::mono_t(integer(1), 0, 1, integer(1));
        assert_eq!(f.to_string(), "-1*t^1*exp(-1*x) + 1/2*x^1*t^1*exp(-1*x)");
    }
}
