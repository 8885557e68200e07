//! Series engines: the accelerated homotopy-perturbation/Elzaki iteration
//! (AHPETM) and the classical ADM/HPM baseline.
//!
//! With `T = ∫₀^t · ds` and `R` the model's right-hand side, AHPETM builds
//!
//! ```text
//!     v₀ = u₀,    v_{k+1} = T[ R(Ψ_k) − R(Ψ_{k−1}) ],    R(Ψ_{−1}) := 0,
//! ```
//!
//! which telescopes to the Picard recursion `Ψ_{k+1} = u₀ + T[R(Ψ_k)]`. The
//! classical scheme expands the bilinear part instead:
//! `v_{k+1} = T[ Σ_{i+j=k} Q(v_i, v_j) + F(v_k) ]`, with `F` the linear
//! fragmentation operator. Both agree for purely linear problems.

use crate::error::{Error, Result};
use crate::polyexp::{PolyExp, PolyExp1D, PolyExp2D};
use crate::problems::{coag2d_bilinear, coag_bilinear, frag_rhs, ProblemSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Ahpetm,
    Classical,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ahpetm" => Ok(Method::Ahpetm),
            "classical" | "adm" | "hpm" => Ok(Method::Classical),
            other => Err(Error::InvalidSpec(format!("unknown method {other:?}"))),
        }
    }
}

/// Guardrails against combinatorial growth of the components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_exponent: u32,
    pub max_terms: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_exponent: 512, max_terms: 200_000 }
    }
}

impl Limits {
    fn check<const D: usize>(&self, f: &PolyExp<D>) -> Result<()> {
        let exponent = f.max_exponent();
        if exponent > self.max_exponent {
            return Err(Error::DegreeOverflow { exponent, cap: self.max_exponent });
        }
        let terms = f.num_terms();
        if terms > self.max_terms {
            return Err(Error::TermBudget { terms, budget: self.max_terms });
        }
        Ok(())
    }
}

/// Densities the engines can iterate on.
pub trait Density: Sized + Clone + PartialEq {
    fn initial(problem: &ProblemSpec) -> Result<Self>;
    /// Full right-hand side `R(u)`.
    fn rhs(problem: &ProblemSpec, u: &Self) -> Result<Self>;
    /// Bilinear coagulation part `Q(u, w)`; zero for models without coagulation.
    fn bilinear(problem: &ProblemSpec, u: &Self, w: &Self) -> Result<Self>;
    /// Linear fragmentation part `F(u)`; zero for models without breakage.
    fn linear(problem: &ProblemSpec, u: &Self) -> Result<Self>;
}

impl Density for PolyExp1D {
    fn initial(problem: &ProblemSpec) -> Result<Self> {
        problem.initial_1d().cloned()
    }

    fn rhs(problem: &ProblemSpec, u: &Self) -> Result<Self> {
        problem.rhs_1d(u)
    }

    fn bilinear(problem: &ProblemSpec, u: &Self, w: &Self) -> Result<Self> {
        match problem.kernel() {
            Some(kernel) => coag_bilinear(kernel, u, w),
            None if problem.dimension() == 1 => Ok(Self::zero()),
            None => Err(Error::DimensionMismatch { problem: 2, density: 1 }),
        }
    }

    fn linear(problem: &ProblemSpec, u: &Self) -> Result<Self> {
        match problem.frag_spec() {
            Some(frag) => frag_rhs(frag, u),
            None if problem.dimension() == 1 => Ok(Self::zero()),
            None => Err(Error::DimensionMismatch { problem: 2, density: 1 }),
        }
    }
}

impl Density for PolyExp2D {
    fn initial(problem: &ProblemSpec) -> Result<Self> {
        problem.initial_2d().cloned()
    }

    fn rhs(problem: &ProblemSpec, u: &Self) -> Result<Self> {
        problem.rhs_2d(u)
    }

    fn bilinear(problem: &ProblemSpec, u: &Self, w: &Self) -> Result<Self> {
        problem.initial_2d()?;
        coag2d_bilinear(u, w)
    }

    fn linear(problem: &ProblemSpec, _u: &Self) -> Result<Self> {
        problem.initial_2d()?;
        Ok(Self::zero())
    }
}

/// Components `v₀ … v_n` of a truncated series solution, with partial sums.
///
/// Extending a solution appends components; earlier ones never change.
#[derive(Clone, Debug)]
pub struct SeriesSolution<const D: usize> {
    problem: ProblemSpec,
    method: Method,
    limits: Limits,
    components: Vec<PolyExp<D>>,
    partial_sums: Vec<PolyExp<D>>,
    /// `R(Ψ_{n−1})`, the subtrahend of the next AHPETM increment.
    prev_rhs: PolyExp<D>,
}

impl<const D: usize> SeriesSolution<D>
where
    PolyExp<D>: Density,
{
    pub fn new(problem: &ProblemSpec, method: Method, limits: Limits) -> Result<Self> {
        let u0 = PolyExp::<D>::initial(problem)?;
        Ok(Self {
            problem: problem.clone(),
            method,
            limits,
            components: vec![u0.clone()],
            partial_sums: vec![u0],
            prev_rhs: PolyExp::zero(),
        })
    }

    /// Append components until the highest index is `n`.
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        while self.order() < n {
            let next = match self.method {
                Method::Ahpetm => self.next_ahpetm()?,
                Method::Classical => self.next_classical()?,
            };
            self.limits.check(&next)?;
            let psi = self.partial_sums.last().expect("nonempty") + &next;
            self.limits.check(&psi)?;
            self.components.push(next);
            self.partial_sums.push(psi);
        }
        Ok(())
    }

    fn next_ahpetm(&mut self) -> Result<PolyExp<D>> {
        let psi = self.partial_sums.last().expect("nonempty");
        let rhs = PolyExp::<D>::rhs(&self.problem, psi)?;
        let increment = &rhs - &self.prev_rhs;
        self.prev_rhs = rhs;
        Ok(increment.time_antiderivative())
    }

    fn next_classical(&self) -> Result<PolyExp<D>> {
        let k = self.order();
        let v = &self.components;
        let mut source = PolyExp::<D>::linear(&self.problem, &v[k])?;
        for i in 0..=k {
            source += &PolyExp::<D>::bilinear(&self.problem, &v[i], &v[k - i])?;
        }
        Ok(source.time_antiderivative())
    }

    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Index of the last component.
    pub fn order(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[PolyExp<D>] {
        &self.components
    }

    pub fn component(&self, k: usize) -> Result<&PolyExp<D>> {
        self.components
            .get(k)
            .ok_or(Error::IndexOutOfRange { index: k, len: self.components.len() })
    }

    /// `Ψ_k = v₀ + ⋯ + v_k`.
    pub fn truncated(&self, k: usize) -> Result<&PolyExp<D>> {
        self.partial_sums
            .get(k)
            .ok_or(Error::IndexOutOfRange { index: k, len: self.partial_sums.len() })
    }
}

pub fn iterate<const D: usize>(problem: &ProblemSpec, method: Method, n: usize, limits: Limits) -> Result<SeriesSolution<D>>
where
    PolyExp<D>: Density,
{
    let mut series = SeriesSolution::new(problem, method, limits)?;
    series.extend_to(n)?;
    Ok(series)
}

/// AHPETM components `v₀ … v_n` under default limits.
pub fn iterate_ahpetm<const D: usize>(problem: &ProblemSpec, n: usize) -> Result<SeriesSolution<D>>
where
    PolyExp<D>: Density,
{
    iterate(problem, Method::Ahpetm, n, Limits::default())
}

/// Classical ADM/HPM components `v₀ … v_n` under default limits.
pub fn iterate_classical<const D: usize>(problem: &ProblemSpec, n: usize) -> Result<SeriesSolution<D>>
where
    PolyExp<D>: Density,
{
    iterate(problem, Method::Classical, n, Limits::default())
}
