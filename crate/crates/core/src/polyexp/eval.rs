use num::ToPrimitive;

use super::PolyExp;

/// Floating-point image of a [`PolyExp`], built once and evaluated many times.
///
/// Each rate block is summed with Neumaier compensation over precomputed
/// power tables and then multiplied by the exponential factor. For the
/// degrees and coefficient sizes produced by the series engine (degree ≤ 60,
/// `|x| ≤ 100`), the relative error is bounded by roughly
/// `(deg + 4) · ε · Σ|terms| / |Σ terms|` per block: each power carries at
/// most `deg` roundings, the coefficient one, and the compensated sum adds
/// `O(ε)`. Cancellation inside a block is the only source of amplification.
#[derive(Clone, Debug)]
pub struct CompiledPolyExp<const D: usize> {
    blocks: Vec<Block<D>>,
    max_space: [usize; D],
    max_t: usize,
}

#[derive(Clone, Debug)]
struct Block<const D: usize> {
    rates: [f64; D],
    terms: Vec<([usize; D], usize, f64)>,
}

impl<const D: usize> CompiledPolyExp<D> {
    pub fn new(f: &PolyExp<D>) -> Self {
        let mut max_space = [0usize; D];
        let mut max_t = 0usize;
        let blocks = f
            .blocks()
            .map(|(rate, poly)| Block {
                rates: std::array::from_fn(|d| rate[d].to_f64().unwrap_or(f64::NAN)),
                terms: poly
                    .iter()
                    .map(|(e, c)| {
                        let space: [usize; D] = std::array::from_fn(|d| e.space[d] as usize);
                        for d in 0..D {
                            max_space[d] = max_space[d].max(space[d]);
                        }
                        max_t = max_t.max(e.t as usize);
                        (space, e.t as usize, c.to_f64().unwrap_or(f64::NAN))
                    })
                    .collect(),
            })
            .collect();
        Self { blocks, max_space, max_t }
    }

    pub fn evaluate(&self, point: [f64; D], t: f64) -> f64 {
        let space_pows: [Vec<f64>; D] = std::array::from_fn(|d| powers(point[d], self.max_space[d]));
        let t_pows = powers(t, self.max_t);
        let mut total = 0.0;
        for block in &self.blocks {
            let mut sum = NeumaierSum::default();
            for (space, j, c) in &block.terms {
                let mut v = c * t_pows[*j];
                for d in 0..D {
                    v *= space_pows[d][space[d]];
                }
                sum.add(v);
            }
            let decay: f64 = (0..D).map(|d| block.rates[d] * point[d]).sum();
            total += sum.value() * (-decay).exp();
        }
        total
    }
}

fn powers(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    for k in 1..=n {
        out.push(out[k - 1] * x);
    }
    out
}

#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl<const D: usize> PolyExp<D> {
    /// Floating-point value at `(point, t)`. Compiles on every call; use
    /// [`CompiledPolyExp`] for repeated evaluation.
    pub fn evaluate(&self, point: [f64; D], t: f64) -> f64 {
        CompiledPolyExp::new(self).evaluate(point, t)
    }

    pub fn compile(&self) -> CompiledPolyExp<D> {
        CompiledPolyExp::new(self)
    }
}

impl PolyExp<1> {
    pub fn eval_at(&self, x: f64, t: f64) -> f64 {
        self.evaluate([x], t)
    }
}

#[cfg(test)]
mod tests {
    use crate::polyexp::{integer, rational, PolyExp1D, PolyExp2D};

    #[test]
    fn exponential_at_origin() {
        let f = PolyExp1D::exponential(integer(1));
        assert_eq!(f.eval_at(0.0, 123.0), 1.0);
    }

    #[test]
    fn root_of_first_component() {
        let v1 = PolyExp1D::mono_t(rational(1, 2), 1, 1, integer(1)) - PolyExp1D::mono_t(integer(1), 0, 1, integer(1));
        assert_eq!(v1.eval_at(2.0, 1.0), 0.0);
        assert!((v1.eval_at(0.0, 2.0) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn bivariate() {
        let f = PolyExp2D::mono(integer(3), 1, 2, integer(1), integer(2));
        let v = f.evaluate([0.5, 2.0], 0.0);
        let expected = 3.0 * 0.5 * 4.0 * (-0.5f64 - 4.0).exp();
        assert!((v - expected).abs() < 1e-15 * expected.abs());
    }
}
