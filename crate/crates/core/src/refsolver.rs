//! Fixed-grid reference solver for the 1-D models.
//!
//! Nodes `x_i = i·h`, `h = xmax/n_cells`. Integrals use the trapezoid rule
//! with Gregory end corrections
//!
//! ```text
//!     T − h/12·(∇f_n − Δf_0) − h/24·(∇²f_n + Δ²f_0)
//! ```
//!
//! for the gain convolution on `[0, x_i]` (evaluated for all nodes at once by
//! FFT), the loss integral on `[0, xmax]`, and the breakage birth on
//! `[x_i, xmax]`. On three nodes the rule is Simpson's; on two it is the plain
//! trapezoid. Time stepping is classical RK4. Nothing here shares code with
//! the symbolic operators.

use std::fmt::Write as _;
use std::sync::Arc;

use num::complex::Complex64;
use num::ToPrimitive;
use rustfft::{Fft, FftPlanner};

use crate::analysis::format_float;
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::problems::{CoagKernel, FragSpec, ProblemSpec};

pub const INSTABILITY_LIMIT: f64 = 1e6;

/// Gregory correction to the trapezoid sum over nodes `0..=n`, unscaled by `h`.
fn gregory(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    match n {
        0 | 1 => 0.0,
        _ => {
            let first = (f(n) - f(n - 1)) - (f(1) - f(0));
            let second = (f(n) - 2.0 * f(n - 1) + f(n - 2)) + (f(2) - 2.0 * f(1) + f(0));
            -first / 12.0 - second / 24.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub xmax: f64,
    pub n_cells: usize,
    pub dt: f64,
    pub t_end: f64,
}

impl GridSpec {
    pub fn new(xmax: f64, n_cells: usize, dt: f64, t_end: f64) -> Result<Self> {
        if !(xmax > 0.0 && xmax.is_finite()) {
            return Err(Error::InvalidSpec(format!("xmax must be positive, got {xmax}")));
        }
        if n_cells < 16 {
            return Err(Error::InvalidSpec(format!("need at least 16 cells, got {n_cells}")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidSpec(format!("dt must be positive, got {dt}")));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidSpec(format!("t_end must be nonnegative, got {t_end}")));
        }
        Ok(Self { xmax, n_cells, dt, t_end })
    }

    pub fn h(&self) -> f64 {
        self.xmax / self.n_cells as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_cells).map(|i| i as f64 * self.h()).collect()
    }

    /// Same domain and horizon with `h` and `dt` halved.
    pub fn refined(&self) -> Self {
        Self { n_cells: 2 * self.n_cells, dt: 0.5 * self.dt, ..*self }
    }
}

/// Nodal values of a density at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub time: f64,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn sample(spec: GridSpec, time: f64, f: impl Fn(f64) -> f64) -> Self {
        Self { spec, time, values: spec.nodes().into_iter().map(f).collect() }
    }

    pub fn zeros(spec: GridSpec, time: f64) -> Self {
        Self { spec, time, values: vec![0.0; spec.n_cells + 1] }
    }

    /// `∫₀^xmax x^j u dx` by the end-corrected trapezoid rule.
    pub fn moment(&self, j: u32) -> f64 {
        let h = self.spec.h();
        let n = self.values.len() - 1;
        let f = |i: usize| (i as f64 * h).powi(j as i32) * self.values[i];
        let inner: f64 = (1..n).map(f).sum();
        h * (inner + 0.5 * (f(0) + f(n)) + gregory(n, f))
    }

    /// Piecewise-linear value at `x`; `None` outside `[0, xmax]`.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        let h = self.spec.h();
        let n = self.values.len() - 1;
        if !(0.0..=self.spec.xmax).contains(&x) {
            return None;
        }
        let i = ((x / h).floor() as usize).min(n - 1);
        let w = x / h - i as f64;
        Some((1.0 - w) * self.values[i] + w * self.values[i + 1])
    }

    /// Two columns `x,value` under a `#` header carrying the grid and time.
    pub fn to_csv(&self) -> String {
        let s = &self.spec;
        let mut out = format!(
            "# xmax={} n_cells={} dt={} t_end={}\n# time={}\nx,value\n",
            s.xmax, s.n_cells, s.dt, s.t_end, self.time
        );
        let h = s.h();
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{}", format_float(i as f64 * h), format_float(*v));
        }
        out
    }
}

/// Spatial operator for one problem on one grid, with its FFT plans.
pub struct Discretization {
    spec: GridSpec,
    kernel: Option<CoagKernel>,
    frag: Option<FragParams>,
    nodes: Vec<f64>,
    fft_len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    exec: Exec,
}

#[derive(Clone, Copy, Debug)]
struct FragParams {
    c: f64,
    r: i32,
    s: f64,
    k: i32,
}

impl FragParams {
    fn new(f: &FragSpec) -> Self {
        Self {
            c: f.c().to_f64().unwrap_or(f64::NAN),
            r: f.r() as i32,
            s: f.s().to_f64().unwrap_or(f64::NAN),
            k: f.k() as i32,
        }
    }
}

impl Discretization {
    pub fn new(problem: &ProblemSpec, spec: GridSpec) -> Result<Self> {
        Self::with_exec(problem, spec, Exec::default())
    }

    pub fn with_exec(problem: &ProblemSpec, spec: GridSpec, exec: Exec) -> Result<Self> {
        if problem.dimension() != 1 {
            return Err(Error::Unsupported2D);
        }
        let fft_len = (2 * (spec.n_cells + 1)).next_power_of_two();
        let mut planner = FftPlanner::new();
        Ok(Self {
            spec,
            kernel: problem.kernel(),
            frag: problem.frag_spec().map(FragParams::new),
            nodes: spec.nodes(),
            fft_len,
            forward: planner.plan_fft_forward(fft_len),
            inverse: planner.plan_fft_inverse(fft_len),
            exec,
        })
    }

    /// Corrected trapezoid rule for `∫₀^{x_i} a(x_i − y) b(y) dy` at every
    /// node; the plain part `h[Σ_{j≤i} a_{i−j} b_j − (a_i b_0 + a_0 b_i)/2]`
    /// comes from one FFT product.
    fn trapezoid_convolution(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = a.len();
        let lift = |v: &[f64]| {
            let mut buf = vec![Complex64::new(0.0, 0.0); self.fft_len];
            for (slot, x) in buf.iter_mut().zip(v) {
                slot.re = *x;
            }
            buf
        };
        let mut fa = lift(a);
        let mut fb = lift(b);
        self.forward.process(&mut fa);
        self.forward.process(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x *= y;
        }
        self.inverse.process(&mut fa);
        let scale = 1.0 / self.fft_len as f64;
        let h = self.spec.h();
        (0..n)
            .map(|i| {
                let plain = fa[i].re * scale - 0.5 * (a[i] * b[0] + a[0] * b[i]);
                h * (plain + gregory(i, |j| a[i - j] * b[j]))
            })
            .collect()
    }

    fn trapezoid(&self, f: impl Fn(usize) -> f64) -> f64 {
        let n = self.nodes.len() - 1;
        let inner: f64 = (1..n).map(&f).sum();
        self.spec.h() * (inner + 0.5 * (f(0) + f(n)) + gregory(n, &f))
    }

    pub fn rhs(&self, u: &[f64]) -> Vec<f64> {
        let x = &self.nodes;
        let n = u.len();
        let mut out = vec![0.0; n];
        if let Some(kernel) = self.kernel {
            let m0 = self.trapezoid(|i| u[i]);
            let m1 = self.trapezoid(|i| x[i] * u[i]);
            let gain = match kernel {
                CoagKernel::Constant | CoagKernel::Sum => self.trapezoid_convolution(u, u),
                CoagKernel::Product => {
                    let xu: Vec<f64> = x.iter().zip(u).map(|(x, u)| x * u).collect();
                    self.trapezoid_convolution(&xu, &xu)
                }
            };
            let coag = par::map_range(self.exec, n, |i| {
                let (g, loss) = match kernel {
                    CoagKernel::Constant => (gain[i], u[i] * m0),
                    CoagKernel::Sum => (x[i] * gain[i], u[i] * (x[i] * m0 + m1)),
                    CoagKernel::Product => (gain[i], x[i] * u[i] * m1),
                };
                0.5 * g - loss
            });
            for (o, c) in out.iter_mut().zip(coag) {
                *o += c;
            }
        }
        if let Some(frag) = self.frag {
            // Right-to-left cumulative trapezoid of y^{k−r} u(y) over [x_i, xmax],
            // then the end corrections for each sub-interval.
            let h = self.spec.h();
            let g: Vec<f64> = (0..n)
                .map(|i| if i == 0 && frag.k < frag.r { 0.0 } else { x[i].powi(frag.k - frag.r) * u[i] })
                .collect();
            let mut tail = vec![0.0; n];
            for i in (0..n - 1).rev() {
                tail[i] = tail[i + 1] + 0.5 * h * (g[i] + g[i + 1]);
            }
            for (i, slot) in tail.iter_mut().enumerate() {
                *slot += h * gregory(n - 1 - i, |j| g[i + j]);
            }
            let breakage = par::map_range(self.exec, n, |i| {
                frag.c * frag.s * x[i].powi(frag.r - 1) * tail[i] - frag.s * x[i].powi(frag.k) * u[i]
            });
            for (o, b) in out.iter_mut().zip(breakage) {
                *o += b;
            }
        }
        out
    }
}

/// Semi-discrete right-hand side of `problem` at `u`.
pub fn discrete_rhs(problem: &ProblemSpec, u: &GridFunction) -> Result<GridFunction> {
    let disc = Discretization::new(problem, u.spec)?;
    Ok(GridFunction { spec: u.spec, time: u.time, values: disc.rhs(&u.values) })
}

/// RK4 from the sampled initial density to `spec.t_end`.
pub fn integrate(problem: &ProblemSpec, spec: GridSpec) -> Result<GridFunction> {
    integrate_with(Exec::default(), problem, spec)
}

pub fn integrate_with(exec: Exec, problem: &ProblemSpec, spec: GridSpec) -> Result<GridFunction> {
    let disc = Discretization::with_exec(problem, spec, exec)?;
    let u0 = problem.initial_1d()?.compile();
    let mut u: Vec<f64> = disc.nodes.iter().map(|&x| u0.evaluate([x], 0.0)).collect();
    // Whole steps of at most dt that land exactly on t_end.
    let steps = (spec.t_end / spec.dt - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps == 0 { 0.0 } else { spec.t_end / steps as f64 };
    let axpy = |u: &[f64], k: &[f64], a: f64| -> Vec<f64> { u.iter().zip(k).map(|(u, k)| u + a * k).collect() };
    for step in 0..steps {
        let k1 = disc.rhs(&u);
        let k2 = disc.rhs(&axpy(&u, &k1, 0.5 * dt));
        let k3 = disc.rhs(&axpy(&u, &k2, 0.5 * dt));
        let k4 = disc.rhs(&axpy(&u, &k3, dt));
        for i in 0..u.len() {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if u.iter().any(|v| !(v.abs() <= INSTABILITY_LIMIT)) {
            return Err(Error::Instability { time: (step + 1) as f64 * dt, limit: INSTABILITY_LIMIT });
        }
    }
    Ok(GridFunction { spec, time: spec.t_end, values: u })
}
