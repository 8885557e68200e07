mod common;

use common::*;
use pbe_core::refsolver::{discrete_rhs, integrate, GridFunction, GridSpec};
use pbe_core::{ExactSolution, ProblemSpec};

fn grid(xmax: f64, n_cells: usize, t_end: f64) -> GridSpec {
    GridSpec::new(xmax, n_cells, 1e-3, t_end).unwrap()
}

fn sampled(problem: &ProblemSpec, spec: GridSpec) -> GridFunction {
    let u0 = problem.initial_1d().unwrap().compile();
    GridFunction::sample(spec, 0.0, |x| u0.evaluate([x], 0.0))
}

fn max_deviation(g: &GridFunction, f: impl Fn(f64) -> f64) -> f64 {
    let h = g.spec.h();
    g.values.iter().enumerate().map(|(i, v)| (v - f(i as f64 * h)).abs()).fold(0.0, f64::max)
}

/// Cells for `h·rate = 0.05` on `[0, 50]`.
fn resolving_cells(name: &str) -> usize {
    if name == "ccfe-fast" {
        4000
    } else {
        2000
    }
}

#[test]
fn discrete_rhs_tracks_symbolic_rhs() {
    for (name, p) in all_1d() {
        let spec = grid(50.0, resolving_cells(name), 0.0);
        let r = discrete_rhs(&p, &sampled(&p, spec)).unwrap();
        let exact = p.rhs_1d(p.initial_1d().unwrap()).unwrap().compile();
        let dev = max_deviation(&r, |x| exact.evaluate([x], 0.0));
        assert!(dev < 2e-4, "{name}: {dev:e}");
    }
}

#[test]
fn discrete_rhs_conserves_mass() {
    for (name, p) in all_1d() {
        let spec = grid(50.0, resolving_cells(name), 0.0);
        let mass = discrete_rhs(&p, &sampled(&p, spec)).unwrap().moment(1);
        assert!(mass.abs() < 1e-6, "{name}: {mass:e}");
    }
}

#[test]
fn constant_kernel_matches_exact_solution() {
    let p = constant_kernel();
    let g = integrate(&p, grid(50.0, 2000, 0.5)).unwrap();
    let dev = max_deviation(&g, |x| ExactSolution::ConstKernelExp.eval(x, 0.5).unwrap());
    assert!(dev <= 1e-4, "{dev:e}");
}

#[test]
fn ccfe_keeps_particle_count() {
    let g = integrate(&ccfe_slow(), grid(50.0, 2000, 0.5)).unwrap();
    assert!((g.moment(0) - 1.0).abs() <= 1e-3, "{}", g.moment(0));
}

#[test]
fn mass_drift_is_small() {
    for (name, p) in all_1d() {
        // The product kernel is close to gelation at t = 0.5 and its tail
        // reaches well past x = 50 by t = 0.25.
        let spec = match name {
            "product" => grid(100.0, 4000, 0.25),
            _ => grid(50.0, 2000, 0.25),
        };
        let start = sampled(&p, spec).moment(1);
        let end = integrate(&p, spec).unwrap().moment(1);
        let drift = (end - start).abs() / start;
        assert!(drift <= 1e-4, "{name}: {drift:e}");
    }
}

#[test]
fn refinement_reduces_error() {
    let p = constant_kernel();
    let exact = |x: f64| ExactSolution::ConstKernelExp.eval(x, 0.5).unwrap();
    let coarse = grid(50.0, 1000, 0.5);
    let e1 = max_deviation(&integrate(&p, coarse).unwrap(), exact);
    let e2 = max_deviation(&integrate(&p, coarse.refined()).unwrap(), exact);
    assert!(e2 * 2.0 <= e1, "{e1:e} -> {e2:e}");
}
