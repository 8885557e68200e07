use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num::{Signed, ToPrimitive, Zero};

use super::Rational;

/// Polynomial in `t` with exact rational coefficients. Moments of a
/// [`PolyExp`](super::PolyExp) density land here.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TimePoly {
    coeffs: BTreeMap<u32, Rational>,
}

impl TimePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs([c])
    }

    /// `coeffs[j]` is the coefficient of `t^j`.
    pub fn from_coeffs(coeffs: impl IntoIterator<Item = Rational>) -> Self {
        let mut out = Self::zero();
        for (j, c) in coeffs.into_iter().enumerate() {
            out.add_term(j as u32, c);
        }
        out
    }

    pub fn add_term(&mut self, power: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(power).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&power);
        }
    }

    pub fn coeff(&self, power: u32) -> Rational {
        self.coeffs.get(&power).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(j, c)| (*j, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    /// `Some(c)` when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.degree() {
            0 => Some(self.coeff(0)),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (j, v) in self.iter() {
            out.add_term(j, v * c);
        }
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        let deg = self.degree();
        let mut acc = 0.0;
        for j in (0..=deg).rev() {
            acc = acc * t + self.coeffs.get(&j).and_then(|c| c.to_f64()).unwrap_or(0.0);
        }
        acc
    }

    /// Exact value at a rational time.
    pub fn eval_exact(&self, t: &Rational) -> Rational {
        let deg = self.degree();
        let mut acc = Rational::zero();
        for j in (0..=deg).rev() {
            acc = acc * t + self.coeff(j);
        }
        acc
    }
}

impl Add for &TimePoly {
    type Output = TimePoly;
    fn add(self, rhs: &TimePoly) -> TimePoly {
        let mut out = self.clone();
        for (j, c) in rhs.iter() {
            out.add_term(j, c.clone());
        }
        out
    }
}

impl Sub for &TimePoly {
    type Output = TimePoly;
    fn sub(self, rhs: &TimePoly) -> TimePoly {
        let mut out = self.clone();
        for (j, c) in rhs.iter() {
            out.add_term(j, -c.clone());
        }
        out
    }
}

impl Mul for &TimePoly {
    type Output = TimePoly;
    fn mul(self, rhs: &TimePoly) -> TimePoly {
        let mut out = TimePoly::zero();
        for (i, a) in self.iter() {
            for (j, b) in rhs.iter() {
                out.add_term(i + j, a * b);
            }
        }
        out
    }
}

impl fmt::Display for TimePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (j, c)) in self.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if n == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match j {
                0 => write!(f, "{}", c.abs())?,
                _ => write!(f, "{}*t^{}", c.abs(), j)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyexp::rational;

    #[test]
    fn arithmetic_and_eval() {
        let p = TimePoly::from_coeffs([rational(1, 1), rational(-1, 2)]);
        let q = &p * &p;
        assert_eq!(q, TimePoly::from_coeffs([rational(1, 1), rational(-1, 1), rational(1, 4)]));
        assert!((q.eval(2.0) - 0.0).abs() < 1e-15);
        assert_eq!(q.eval_exact(&rational(1, 1)), rational(1, 4));
        assert!((&p - &p).is_zero());
        assert_eq!(p.as_constant(), None);
        assert_eq!(TimePoly::constant(rational(3, 1)).as_constant(), Some(rational(3, 1)));
        assert_eq!(p.to_string(), "1 - 1/2*t^1");
    }
}
