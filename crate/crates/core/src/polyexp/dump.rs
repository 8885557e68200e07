//! Stable text serialization used by `--dump-symbolic`.
//!
//! ```json
//! {"dim": 1, "terms": [{"rate": "1/1", "monomials": [{"coeff": "1/2", "xpow": 1, "tpow": 1}]}]}
//! ```
//!
//! Rates of a 2-D density are a pair `["50/1", "50/1"]` and monomials carry
//! `ypow`. Rationals are always written `num/den` in lowest terms; the parser
//! also accepts bare integers.

use std::str::FromStr;

use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};

use super::{Exponents, PolyExp, Rational};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct DumpDoc {
    dim: usize,
    terms: Vec<RateBlock>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RateField {
    One(String),
    Many(Vec<String>),
}

#[derive(Serialize, Deserialize)]
struct RateBlock {
    rate: RateField,
    monomials: Vec<MonoDoc>,
}

#[derive(Serialize, Deserialize)]
struct MonoDoc {
    coeff: String,
    xpow: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    ypow: Option<u32>,
    tpow: u32,
}

/// `num/den`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

impl<const D: usize> PolyExp<D> {
    /// Pretty-printed JSON in canonical term order.
    pub fn to_dump(&self) -> String {
        let terms = self
            .blocks()
            .map(|(rate, poly)| RateBlock {
                rate: match D {
                    1 => RateField::One(format_rational(&rate[0])),
                    _ => RateField::Many(rate.iter().map(format_rational).collect()),
                },
                monomials: poly
                    .iter()
                    .map(|(e, c)| MonoDoc {
                        coeff: format_rational(c),
                        xpow: e.space.first().copied().unwrap_or(0),
                        ypow: (D >= 2).then(|| e.space[1]),
                        tpow: e.t,
                    })
                    .collect(),
            })
            .collect();
        serde_json::to_string_pretty(&DumpDoc { dim: D, terms }).expect("dump serializes")
    }

    pub fn from_dump(text: &str) -> Result<Self> {
        let doc: DumpDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.dim != D {
            return Err(Error::Parse(format!("expected dim {D}, found {}", doc.dim)));
        }
        let mut out = Self::zero();
        for block in doc.terms {
            let rate_strs = match block.rate {
                RateField::One(s) => vec![s],
                RateField::Many(v) => v,
            };
            if rate_strs.len() != D {
                return Err(Error::Parse(format!("rate has {} components, expected {D}", rate_strs.len())));
            }
            let parsed: Vec<Rational> = rate_strs.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?;
            let rate: [Rational; D] = std::array::from_fn(|d| parsed[d].clone());
            for m in block.monomials {
                let mut space = [0u32; D];
                if D >= 1 {
                    space[0] = m.xpow;
                }
                if D >= 2 {
                    space[1] = m.ypow.ok_or_else(|| Error::Parse("missing ypow".into()))?;
                }
                out.add_term(rate.clone(), Exponents::new(space, m.tpow), parse_rational(&m.coeff)?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyexp::{integer, rational, PolyExp1D, PolyExp2D};

    #[test]
    fn one_dimensional_layout() {
        let f = PolyExp1D::mono_t(rational(1, 2), 1, 1, integer(1));
        let text = f.to_dump();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["dim"], 1);
        assert_eq!(v["terms"][0]["rate"], "1/1");
        assert_eq!(v["terms"][0]["monomials"][0]["coeff"], "1/2");
        assert_eq!(v["terms"][0]["monomials"][0]["tpow"], 1);
        assert!(v["terms"][0]["monomials"][0].get("ypow").is_none());
        assert_eq!(PolyExp1D::from_dump(&text).unwrap(), f);
    }

    #[test]
    fn two_dimensional_round_trip() {
        let f = PolyExp2D::mono(rational(-7, 3), 2, 1, integer(50), rational(1, 2));
        let back = PolyExp2D::from_dump(&f.to_dump()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_wrong_dimension_and_garbage() {
        let f = PolyExp1D::exponential(integer(1));
        assert!(PolyExp2D::from_dump(&f.to_dump()).is_err());
        assert!(PolyExp1D::from_dump("{").is_err());
        assert!(parse_rational("1/0").is_err());
        assert_eq!(parse_rational(" -6/4 ").unwrap(), rational(-3, 2));
        assert_eq!(parse_rational("5").unwrap(), integer(5));
    }
}
