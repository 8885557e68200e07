//! Problems shared by the integration tests.
#![allow(dead_code)]

pub mod printed;

use num::{BigInt, One};
use pbe_core::polyexp::{integer, rational};
use pbe_core::{CoagKernel, FragSpec, PolyExp1D, PolyExp2D, ProblemSpec, Rational};

pub fn constant_kernel() -> ProblemSpec {
    ProblemSpec::coag(CoagKernel::Constant, PolyExp1D::exponential(integer(1))).unwrap()
}

pub fn sum_kernel() -> ProblemSpec {
    ProblemSpec::coag(CoagKernel::Sum, PolyExp1D::exponential(integer(1))).unwrap()
}

pub fn product_kernel() -> ProblemSpec {
    ProblemSpec::coag(CoagKernel::Product, PolyExp1D::exponential(integer(1))).unwrap()
}

/// Constant kernel with binary breakage `S = x/2`, started from `4x e^{-2x}`.
pub fn ccfe_slow() -> ProblemSpec {
    let frag = FragSpec::binary(rational(1, 2));
    ProblemSpec::ccfe(CoagKernel::Constant, frag, PolyExp1D::mono(integer(4), 1, integer(2))).unwrap()
}

/// Same breakage with `S = 2x`, started from `32x e^{-4x}`.
pub fn ccfe_fast() -> ProblemSpec {
    let frag = FragSpec::binary(integer(2));
    ProblemSpec::ccfe(CoagKernel::Constant, frag, PolyExp1D::mono(integer(32), 1, integer(4))).unwrap()
}

pub fn binary_breakage() -> ProblemSpec {
    ProblemSpec::frag(FragSpec::binary(integer(1)), PolyExp1D::exponential(integer(1))).unwrap()
}

/// `16/(m²m²)·xy·e^{-2x/m-2y/m}` with `m = 1/25`.
pub fn bivariate() -> ProblemSpec {
    ProblemSpec::coag2d(PolyExp2D::mono(integer(6_250_000), 1, 1, integer(50), integer(50))).unwrap()
}

pub fn all_1d() -> Vec<(&'static str, ProblemSpec)> {
    vec![
        ("constant", constant_kernel()),
        ("sum", sum_kernel()),
        ("product", product_kernel()),
        ("ccfe-slow", ccfe_slow()),
        ("ccfe-fast", ccfe_fast()),
        ("breakage", binary_breakage()),
    ]
}

fn ipow(b: i64, e: u32) -> Rational {
    Rational::from_integer(BigInt::from(b).pow(e))
}

/// Polynomial part of a single-rate 1-D density at integer `(x, t)`, exactly.
pub fn poly_part(f: &PolyExp1D, rate: &Rational, x: i64, t: i64) -> Rational {
    let mut acc = Rational::from_integer(BigInt::from(0));
    for (r, e, c) in f.iter() {
        assert_eq!(&r[0], rate, "unexpected rate in {f}");
        acc += c * ipow(x, e.space[0]) * ipow(t, e.t);
    }
    acc
}

/// True when `f = scale · P(x, t) · e^{-rate x}` on an integer grid dense enough
/// to pin down every polynomial of degree ≤ 11 in each variable.
pub fn matches_printed(f: &PolyExp1D, rate: i64, scale: Rational, printed: impl Fn(i128, i128) -> i128) -> bool {
    let rate = integer(rate);
    (0..12).all(|x| {
        (0..12).all(|t| {
            let expected = &scale * Rational::from_integer(BigInt::from(printed(x as i128, t as i128)));
            poly_part(f, &rate, x, t) == expected
        })
    })
}

pub fn one() -> Rational {
    Rational::one()
}
