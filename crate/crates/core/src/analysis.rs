//! Error norms, moments of truncated series, convergence-bound calculators
//! and the error-table drivers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactSolution;
use crate::par::{self, Exec};
use crate::polyexp::{PolyExp, PolyExp1D, PolyExp2D, TimePoly};
use crate::quad;
use crate::series::{Density, SeriesSolution};

pub const DEFAULT_XMAX: f64 = 50.0;
pub const DEFAULT_STEP: f64 = 1e-2;
pub const DEFAULT_SUP_SAMPLES: usize = 101;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub approx: f64,
    pub exact: f64,
    pub abs_error: f64,
}

pub fn pointwise(f: &PolyExp1D, sol: &ExactSolution, x: f64, t: f64) -> Result<Comparison> {
    let approx = f.eval_at(x, t);
    let exact = sol.eval(x, t)?;
    Ok(Comparison { approx, exact, abs_error: (approx - exact).abs() })
}

/// Composite-Simpson estimate of `∫₀^xmax |f − u| dx`.
///
/// The interval count is `xmax/step` rounded up to the next even integer.
pub fn l1_error(f: &PolyExp1D, sol: &ExactSolution, t: f64, xmax: f64, step: f64) -> Result<f64> {
    l1_error_with(Exec::default(), f, sol, t, xmax, step)
}

pub fn l1_error_with(exec: Exec, f: &PolyExp1D, sol: &ExactSolution, t: f64, xmax: f64, step: f64) -> Result<f64> {
    if !(t >= 0.0 && xmax > 0.0 && step > 0.0) {
        return Err(Error::InvalidSpec(format!("l1_error needs t >= 0 and positive xmax, step (t={t}, xmax={xmax}, step={step})")));
    }
    let mut n = (xmax / step).round().max(2.0) as usize;
    n += n % 2;
    let h = xmax / n as f64;
    let compiled = f.compile();
    let diffs = par::try_map_range(exec, n + 1, |i| {
        let x = i as f64 * h;
        sol.eval(x, t).map(|u| (compiled.evaluate([x], t) - u).abs())
    })?;
    let weights = quad::simpson_weights(n, h);
    Ok(weights.iter().zip(&diffs).map(|(w, d)| w * d).sum())
}

/// Moment `∫ x^powers Ψ_k dx` of a truncated series, exactly, as a polynomial in `t`.
pub fn series_moment<const D: usize>(series: &SeriesSolution<D>, k: usize, powers: [u32; D]) -> Result<TimePoly>
where
    PolyExp<D>: Density,
{
    series.truncated(k)?.moment(powers)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundModel {
    Coag,
    Frag,
    Coag2D,
}

/// Geometric error bound `c^m/(1−c)·‖v₁‖` for a contraction constant `c`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceBound {
    pub model: BoundModel,
    pub t0: f64,
    /// `L` for coagulation, `λ` for fragmentation.
    pub rate: f64,
    /// `Δ` for coagulation, `ϑ` for fragmentation.
    pub constant: f64,
    pub m: u32,
    pub v1_norm: f64,
    /// Infinite when `constant ≥ 1`.
    pub bound: f64,
}

impl ConvergenceBound {
    fn new(model: BoundModel, t0: f64, rate: f64, constant: f64, m: u32, v1_norm: f64) -> Self {
        let bound = if constant < 1.0 {
            constant.powi(m as i32) / (1.0 - constant) * v1_norm
        } else {
            f64::INFINITY
        };
        Self { model, t0, rate, constant, m, v1_norm, bound }
    }

    pub fn is_contractive(&self) -> bool {
        self.constant < 1.0
    }

    /// `NotContractive` unless the constant is below one.
    pub fn check(&self) -> Result<&Self> {
        if self.is_contractive() {
            Ok(self)
        } else {
            Err(Error::NotContractive { constant: self.constant })
        }
    }
}

fn require_positive(pairs: &[(&str, f64)]) -> Result<()> {
    for (name, v) in pairs {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidSpec(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok(())
}

/// `t₀² e^{2t₀L} (‖u₀‖ + 2t₀L² + 2t₀L)` with `L = ‖u₀‖(T + 1)`.
fn coag_constant(u0_norm: f64, horizon: f64, t0: f64) -> (f64, f64) {
    let l = u0_norm * (horizon + 1.0);
    let delta = t0 * t0 * (2.0 * t0 * l).exp() * (u0_norm + 2.0 * t0 * l * l + 2.0 * t0 * l);
    (l, delta)
}

/// Bound for the constant-kernel coagulation series.
pub fn coag_bound(u0_norm: f64, horizon: f64, t0: f64, m: u32, v1_norm: f64) -> Result<ConvergenceBound> {
    require_positive(&[("u0 norm", u0_norm), ("T", horizon), ("t0", t0)])?;
    require_nonnegative(v1_norm)?;
    let (l, delta) = coag_constant(u0_norm, horizon, t0);
    Ok(ConvergenceBound::new(BoundModel::Coag, t0, l, delta, m, v1_norm))
}

/// Bound for the linear fragmentation series, `ϑ = k! t₀²/λ^{k+1}`.
pub fn frag_bound(k: u32, lambda: f64, t0: f64, m: u32, v1_norm: f64) -> Result<ConvergenceBound> {
    if k == 0 {
        return Err(Error::InvalidSpec("selection exponent k must be positive".into()));
    }
    require_positive(&[("lambda", lambda), ("t0", t0)])?;
    require_nonnegative(v1_norm)?;
    let k_fact: f64 = (1..=k).map(f64::from).product();
    let theta = k_fact * t0 * t0 / lambda.powi(k as i32 + 1);
    Ok(ConvergenceBound::new(BoundModel::Frag, t0, lambda, theta, m, v1_norm))
}

/// The two bivariate constants: as stated (`2t₀²e^{2t₀L}(…)`) and as the
/// contraction argument derives it (`t₀²e^{2t₀L}(…)`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coag2dBounds {
    pub statement: ConvergenceBound,
    pub derived: ConvergenceBound,
}

pub fn coag2d_bound(u0_norm: f64, horizon: f64, t0: f64, m: u32, v1_norm: f64) -> Result<Coag2dBounds> {
    require_positive(&[("u0 norm", u0_norm), ("T", horizon), ("t0", t0)])?;
    require_nonnegative(v1_norm)?;
    let (l, delta) = coag_constant(u0_norm, horizon, t0);
    Ok(Coag2dBounds {
        statement: ConvergenceBound::new(BoundModel::Coag2D, t0, l, 2.0 * delta, m, v1_norm),
        derived: ConvergenceBound::new(BoundModel::Coag2D, t0, l, delta, m, v1_norm),
    })
}

fn require_nonnegative(v1_norm: f64) -> Result<()> {
    if v1_norm >= 0.0 && v1_norm.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("v1 norm must be nonnegative and finite, got {v1_norm}")))
    }
}

/// `sup_{s ∈ [0,t₀]} ∫₀^∞ |f(x,s)| dx`, sampled at [`DEFAULT_SUP_SAMPLES`] times.
pub fn sup_l1_norm(f: &PolyExp1D, t0: f64) -> Result<f64> {
    sup_l1_norm_with(f, t0, DEFAULT_SUP_SAMPLES)
}

/// At each sampled `s` the inner integral is the exact zeroth moment when
/// `f(·,s)` keeps one sign on a fine grid over `[0, 50]`, and adaptive
/// quadrature of `|f|` on `[0, 50]` split at the sign changes otherwise.
pub fn sup_l1_norm_with(f: &PolyExp1D, t0: f64, samples: usize) -> Result<f64> {
    if !(t0 >= 0.0) || samples < 2 {
        return Err(Error::InvalidSpec(format!("sup norm needs t0 >= 0 and at least 2 samples (t0={t0}, samples={samples})")));
    }
    let mass = f.moment_full(0)?;
    let compiled = f.compile();
    const GRID: usize = 2000;
    let norms = par::map_range(Exec::default(), samples, |i| {
        let s = t0 * i as f64 / (samples - 1) as f64;
        let h = DEFAULT_XMAX / GRID as f64;
        let values: Vec<f64> = (0..=GRID).map(|j| compiled.evaluate([j as f64 * h], s)).collect();
        let breaks: Vec<f64> = values
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] * w[1] < 0.0)
            .map(|(j, w)| (j as f64 + w[0] / (w[0] - w[1])) * h)
            .collect();
        if breaks.is_empty() && values.iter().all(|v| *v >= 0.0) || values.iter().all(|v| *v <= 0.0) {
            mass.eval(s).abs()
        } else {
            quad::integrate_pieces(|x| compiled.evaluate([x], s).abs(), 0.0, DEFAULT_XMAX, &breaks, 1e-13)
        }
    });
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// Bivariate analogue of [`sup_l1_norm_with`], always by nested quadrature on
/// `[0, 50/a]×[0, 50/b]` with `a`, `b` the slowest decay rates.
pub fn sup_l1_norm_2d(f: &PolyExp2D, t0: f64, samples: usize) -> Result<f64> {
    if !(t0 >= 0.0) || samples < 2 {
        return Err(Error::InvalidSpec(format!("sup norm needs t0 >= 0 and at least 2 samples (t0={t0}, samples={samples})")));
    }
    if !f.has_positive_rates() {
        return Err(Error::ZeroRate);
    }
    let slowest = |axis: usize| {
        f.rates()
            .map(|r| num::ToPrimitive::to_f64(&r[axis]).unwrap_or(f64::NAN))
            .fold(f64::INFINITY, f64::min)
    };
    let (xmax, ymax) = (DEFAULT_XMAX / slowest(0), DEFAULT_XMAX / slowest(1));
    let compiled = f.compile();
    let norms = par::map_range(Exec::default(), samples, |i| {
        let s = t0 * i as f64 / (samples - 1) as f64;
        quad::integrate(
            |x| quad::integrate(|y| compiled.evaluate([x, y], s).abs(), 0.0, ymax, 1e-14),
            0.0,
            xmax,
            1e-12,
        )
    });
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// Layout of an error table.
#[derive(Clone, Debug, PartialEq)]
pub enum TableSpec {
    /// Rows are truncation orders, columns times; cells are L1 errors.
    L1 { orders: Vec<usize>, times: Vec<f64>, xmax: f64, step: f64 },
    /// Rows are times at a fixed size `x`; columns exact, approximate, error.
    Pointwise { order: usize, x: f64, times: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorTable {
    pub row_label: String,
    pub rows: Vec<f64>,
    pub columns: Vec<String>,
    pub cells: Vec<Vec<f64>>,
    pub norm: String,
}

impl ErrorTable {
    /// Header row, then one line per row with the row value first.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.row_label, self.columns.join(","));
        for (row, cells) in self.rows.iter().zip(&self.cells) {
            let fields: Vec<String> = cells.iter().map(|v| format_float(*v)).collect();
            out.push_str(&format!("{},{}\n", format_float(*row), fields.join(",")));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// Round-trippable float text: integers print bare, everything else with 17
/// significant digits.
pub fn format_float(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.16e}")
    }
}

pub fn error_table(series: &SeriesSolution<1>, sol: &ExactSolution, spec: &TableSpec) -> Result<ErrorTable> {
    error_table_with(Exec::default(), series, sol, spec)
}

pub fn error_table_with(exec: Exec, series: &SeriesSolution<1>, sol: &ExactSolution, spec: &TableSpec) -> Result<ErrorTable> {
    match spec {
        TableSpec::L1 { orders, times, xmax, step } => {
            if orders.is_empty() || times.is_empty() {
                return Err(Error::InvalidSpec("error table needs at least one order and one time".into()));
            }
            let psis = orders.iter().map(|&n| series.truncated(n)).collect::<Result<Vec<_>>>()?;
            let cells = par::try_map_range(exec, orders.len() * times.len(), |cell| {
                let (r, c) = (cell / times.len(), cell % times.len());
                l1_error_with(Exec::Sequential, psis[r], sol, times[c], *xmax, *step)
            })?;
            Ok(ErrorTable {
                row_label: "n".into(),
                rows: orders.iter().map(|&n| n as f64).collect(),
                columns: times.iter().map(|t| format!("t={t}")).collect(),
                cells: cells.chunks(times.len()).map(<[f64]>::to_vec).collect(),
                norm: format!("L1 on [0, {xmax}], Simpson step {step}"),
            })
        }
        TableSpec::Pointwise { order, x, times } => {
            if times.is_empty() {
                return Err(Error::InvalidSpec("error table needs at least one time".into()));
            }
            let psi = series.truncated(*order)?;
            let rows = par::try_map_range(exec, times.len(), |i| pointwise(psi, sol, *x, times[i]))?;
            Ok(ErrorTable {
                row_label: "t".into(),
                rows: times.clone(),
                columns: vec!["exact".into(), format!("psi_{order}"), "abs_error".into()],
                cells: rows.iter().map(|c| vec![c.exact, c.approx, c.abs_error]).collect(),
                norm: format!("pointwise at x={x}"),
            })
        }
    }
}
