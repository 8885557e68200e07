//! Integral operators that keep the polynomial-exponential class closed.

use std::collections::HashMap;

use num::{BigInt, Integer, One, Signed, Zero};

use super::{accumulate, factorials, Exponents, Poly, PolyExp, Rational, TimePoly};
use crate::error::{Error, Result};

/// Block coefficients over their least common denominator, each numerator
/// premultiplied by `Π_d (space_d)!`, so that convolution reduces to integer
/// multiply-accumulate followed by one division per output term.
fn scaled_numerators<const D: usize>(poly: &Poly<D>, fact: &[BigInt]) -> (BigInt, Vec<(Exponents<D>, BigInt)>) {
    let lcd = poly.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scaled = poly
        .iter()
        .map(|(e, c)| {
            let mut n = c.numer() * (&lcd / c.denom());
            for d in 0..D {
                n *= &fact[e.space[d] as usize];
            }
            (*e, n)
        })
        .collect();
    (lcd, scaled)
}

fn convolve_block<const D: usize>(pa: &Poly<D>, pb: &Poly<D>, fact: &[BigInt]) -> Poly<D> {
    let (da, a) = scaled_numerators(pa, fact);
    let symmetric = pa == pb;
    let (db, b) = if symmetric { (da.clone(), a.clone()) } else { scaled_numerators(pb, fact) };
    let mut acc: HashMap<Exponents<D>, BigInt> = HashMap::new();
    let out_exps = |ea: &Exponents<D>, eb: &Exponents<D>| {
        Exponents::new(std::array::from_fn(|d| ea.space[d] + eb.space[d] + 1), ea.t + eb.t)
    };
    for (i, (ea, na)) in a.iter().enumerate() {
        // A self-convolution is symmetric in the pair order: visit each
        // unordered pair once and double the off-diagonal products.
        let partners = if symmetric { &b[i..] } else { &b[..] };
        for (k, (eb, nb)) in partners.iter().enumerate() {
            let mut prod = na * nb;
            if symmetric && k > 0 {
                prod <<= 1;
            }
            *acc.entry(out_exps(ea, eb)).or_insert_with(BigInt::zero) += prod;
        }
    }
    let denom = da * db;
    acc.into_iter()
        .filter(|(_, n)| !n.is_zero())
        .map(|(e, n)| {
            let mut den = denom.clone();
            for d in 0..D {
                den *= &fact[e.space[d] as usize];
            }
            (e, Rational::new(n, den))
        })
        .collect()
}

fn rate_label<const D: usize>(rate: &[Rational; D]) -> String {
    let parts: Vec<String> = rate.iter().map(|a| a.to_string()).collect();
    format!("({})", parts.join(", "))
}

impl<const D: usize> PolyExp<D> {
    /// Causal convolution over every size coordinate,
    /// `∫₀^x f(x − x') g(x') dx'` (a double integral over `[0,x]×[0,y]` in 2-D).
    ///
    /// Only equal-rate pairs have a supported closed form:
    /// `x^i e^{−ax} ⋆ x^j e^{−ax} = i! j!/(i+j+1)! · x^{i+j+1} e^{−ax}`, per coordinate.
    /// Time exponents add.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero();
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        let max_sum = (0..D)
            .map(|d| self.space_degree(d) + other.space_degree(d))
            .max()
            .unwrap_or(0);
        let fact = factorials(max_sum + 1);
        for (ra, pa) in self.blocks() {
            for (rb, pb) in other.blocks() {
                if ra != rb {
                    return Err(Error::MixedRates { left: rate_label(ra), right: rate_label(rb) });
                }
                out.add_block(ra.clone(), convolve_block(pa, pb, &fact));
            }
        }
        Ok(out)
    }

    /// Mixed moment `∫ x₁^{j₁} ⋯ x_D^{j_D} f dx` over the positive orthant, as a polynomial in `t`.
    pub fn moment(&self, powers: [u32; D]) -> Result<TimePoly> {
        let mut out = TimePoly::zero();
        let max_pow = self.iter().map(|(_, e, _)| e.max()).max().unwrap_or(0)
            + powers.iter().copied().max().unwrap_or(0);
        let fact = factorials(max_pow);
        for (rate, poly) in self.blocks() {
            if rate.iter().any(|a| !a.is_positive()) {
                return Err(Error::ZeroRate);
            }
            for (e, c) in poly {
                let mut value = c.clone();
                for d in 0..D {
                    let n = (e.space[d] + powers[d]) as usize;
                    value *= Rational::from_integer(fact[n].clone());
                    value /= num::pow(rate[d].clone(), n + 1);
                }
                out.add_term(e.t, value);
            }
        }
        Ok(out)
    }

    /// `∫₀^t f(·, s) ds`: every `t^j` becomes `t^{j+1}/(j+1)`.
    ///
    /// This is the closed form of the Elzaki-domain operator `E⁻¹{v·E[·]}`,
    /// forced by `E[tⁿ] = n! v^{n+2}`.
    pub fn time_antiderivative(&self) -> Self {
        let mut out = Self::zero();
        for (rate, poly) in self.blocks() {
            let block: Poly<D> = poly
                .iter()
                .map(|(e, c)| {
                    let j = e.t + 1;
                    (Exponents::new(e.space, j), c / Rational::from_integer(BigInt::from(j)))
                })
                .collect();
            out.add_block(rate.clone(), block);
        }
        out
    }
}

impl PolyExp<1> {
    /// `μ_j(t) = ∫₀^∞ x^j f(x, t) dx`.
    pub fn moment_full(&self, j: u32) -> Result<TimePoly> {
        self.moment([j])
    }

    /// `∫_x^∞ y^p f(y, t) dy`, expressed again in the variable `x`.
    ///
    /// Each term uses `∫_x^∞ y^n e^{−ay} dy = e^{−ax} Σ_{k≤n} n!/k! · x^k / a^{n−k+1}`
    /// with `n = m + p`; negative `n` leaves the class.
    pub fn tail_integral(&self, p: i64) -> Result<Self> {
        let mut out = Self::zero();
        for (rate, poly) in self.blocks() {
            let a = &rate[0];
            if !a.is_positive() {
                return Err(Error::ZeroRate);
            }
            let max_n = poly.keys().map(|e| e.space[0] as i64 + p).max().unwrap_or(0);
            if let Some(bad) = poly.keys().map(|e| e.space[0] as i64 + p).find(|n| *n < 0) {
                return Err(Error::OutOfClass { power: bad });
            }
            let fact = factorials(max_n.max(0) as u32);
            let inv_a = Rational::one() / a;
            let inv_pows: Vec<Rational> = std::iter::successors(Some(inv_a.clone()), |q| Some(q * &inv_a))
                .take(max_n as usize + 1)
                .collect();
            let mut block = Poly::new();
            for (e, c) in poly {
                let n = (e.space[0] as i64 + p) as usize;
                for k in 0..=n {
                    let coeff = c
                        * Rational::new(fact[n].clone(), fact[k].clone())
                        * &inv_pows[n - k];
                    accumulate(&mut block, Exponents::new([k as u32], e.t), coeff);
                }
            }
            out.add_block(rate.clone(), block);
        }
        Ok(out)
    }
}

impl PolyExp<2> {
    /// `μ_{i,j}(t) = ∫∫ x^i y^j f dx dy`.
    pub fn moment2d(&self, i: u32, j: u32) -> Result<TimePoly> {
        self.moment([i, j])
    }
}

impl<const D: usize> PolyExp<D> {
    /// True when every coefficient's time exponent is zero.
    pub fn is_time_independent(&self) -> bool {
        self.iter().all(|(_, e, _)| e.t == 0)
    }
}
