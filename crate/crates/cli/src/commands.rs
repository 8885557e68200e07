//! One function per subcommand. Each validates every setting it reads before
//! starting any computation.

use num::ToPrimitive;
use pbe_core::analysis::{
    coag2d_bound, coag_bound, error_table, frag_bound, sup_l1_norm, sup_l1_norm_2d, ConvergenceBound, TableSpec,
    DEFAULT_STEP, DEFAULT_SUP_SAMPLES, DEFAULT_XMAX,
};
use pbe_core::par::{self, Exec};
use pbe_core::polyexp::CompiledPolyExp;
use pbe_core::refsolver::{integrate, GridFunction, GridSpec};
use pbe_core::{iterate, CoagKernel, Error, ExactSolution, Limits, ProblemSpec, Rational, SeriesSolution};

use crate::config::{parse_moment_orders, parse_samples, Cli, Command, Settings};
use crate::error::{CliError, CliResult};
use crate::output::{emit, Cell, Table};

pub fn run(cli: &Cli) -> CliResult<()> {
    let settings = Settings::load(&cli.flags)?;
    let format = settings.format()?;
    let text = match cli.command {
        Command::DumpSymbolic => dump_symbolic(&settings)?,
        command => {
            let table = match command {
                Command::Density => density(&settings)?,
                Command::ErrorTable => error_table_cmd(&settings)?,
                Command::Moments => moments(&settings)?,
                Command::Bounds => bounds(&settings)?,
                Command::ReferenceCheck => reference_check(&settings)?,
                Command::DumpSymbolic => unreachable!(),
            };
            let mut table = table;
            table.meta.insert(0, ("pbe".into(), command.name().into()));
            table.render(format)
        }
    };
    emit(&text, settings.get("out"))
}

enum Series {
    One(SeriesSolution<1>),
    Two(SeriesSolution<2>),
}

fn series(s: &Settings, problem: &ProblemSpec, order: usize) -> CliResult<Series> {
    let method = s.method()?;
    Ok(match problem.dimension() {
        1 => Series::One(iterate::<1>(problem, method, order, Limits::default())?),
        _ => Series::Two(iterate::<2>(problem, method, order, Limits::default())?),
    })
}

fn exact_for(problem: &ProblemSpec) -> CliResult<ExactSolution> {
    ExactSolution::for_problem(problem)
        .ok_or_else(|| CliError::config("no exact solution is known for this problem; drop --compare exact"))
}

fn floats(values: &[Rational]) -> Vec<f64> {
    values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
}

struct Grid {
    xmax: f64,
    cells: usize,
    dt: f64,
}

impl Grid {
    fn read(s: &Settings) -> CliResult<Self> {
        let grid = Grid {
            xmax: s.f64_or("xmax", DEFAULT_XMAX)?,
            cells: s.usize_or("cells", 2000)?,
            dt: s.f64_or("dt", 1e-3)?,
        };
        grid.spec(0.0)?;
        Ok(grid)
    }

    fn spec(&self, t_end: f64) -> CliResult<GridSpec> {
        Ok(GridSpec::new(self.xmax, self.cells, self.dt, t_end)?)
    }

    fn solve(&self, problem: &ProblemSpec, t_end: f64) -> CliResult<GridFunction> {
        Ok(integrate(problem, self.spec(t_end)?)?)
    }
}

fn nonnegative(key: &str, values: &[f64]) -> CliResult<()> {
    match values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        Some(v) => Err(CliError::config(format!("--{key} values must be nonnegative, got {v}"))),
        None => Ok(()),
    }
}

pub fn density(s: &Settings) -> CliResult<Table> {
    let problem = s.problem()?;
    let n = s.terms()?;
    let compare = s.compare()?;
    let ts = floats(&s.samples("t")?);
    let xs = floats(&s.samples("x")?);
    nonnegative("t", &ts)?;
    nonnegative("x", &xs)?;
    let two_d = problem.dimension() == 2;
    let ys = if two_d { floats(&s.samples("y")?) } else { vec![f64::NAN] };
    nonnegative("y", if two_d { &ys } else { &[] })?;
    let sol = compare.exact.then(|| exact_for(&problem)).transpose()?;
    let grid = if compare.reference {
        if two_d {
            return Err(Error::Unsupported2D.into());
        }
        let grid = Grid::read(s)?;
        if let Some(x) = xs.iter().find(|x| **x > grid.xmax) {
            return Err(CliError::config(format!("x = {x} lies beyond the reference grid (xmax = {})", grid.xmax)));
        }
        Some(grid)
    } else {
        None
    };

    let mut columns = vec!["x".to_string()];
    if two_d {
        columns.push("y".into());
    }
    columns.extend(["t".to_string(), format!("psi_{n}")]);
    if compare.exact {
        columns.extend(["exact".to_string(), "abs_error".to_string()]);
    }
    if compare.reference {
        columns.extend(["reference".to_string(), "ref_deviation".to_string()]);
    }
    let mut table = Table::new(s.header_pairs(), columns);

    let references = match &grid {
        Some(grid) => ts.iter().map(|&t| grid.solve(&problem, t)).collect::<CliResult<Vec<_>>>()?,
        None => Vec::new(),
    };
    let psi = series(s, &problem, n)?;
    let (c1, c2) = compiled(&psi, n)?;
    // t-major, then x, then y.
    let (nx, ny) = (xs.len(), ys.len());
    let rows = par::try_map_range(Exec::default(), ts.len() * nx * ny, |idx| -> CliResult<Vec<Cell>> {
        let (ti, xi, yi) = (idx / (nx * ny), (idx / ny) % nx, idx % ny);
        let (t, x, y) = (ts[ti], xs[xi], ys[yi]);
        let approx = match (&c1, &c2) {
            (Some(f), _) => f.evaluate([x], t),
            (_, Some(f)) => f.evaluate([x, y], t),
            _ => unreachable!(),
        };
        let mut row: Vec<Cell> = vec![x.into()];
        if two_d {
            row.push(y.into());
        }
        row.extend([t.into(), approx.into()]);
        if let Some(sol) = &sol {
            let exact = if two_d { sol.eval_2d(x, y, t)? } else { sol.eval(x, t)? };
            row.extend([exact.into(), (approx - exact).abs().into()]);
        }
        if let Some(r) = references.get(ti) {
            let reference = r.interpolate(x).expect("x checked against xmax");
            row.extend([reference.into(), (approx - reference).abs().into()]);
        }
        Ok(row)
    })?;
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

fn compiled(psi: &Series, n: usize) -> CliResult<(Option<CompiledPolyExp<1>>, Option<CompiledPolyExp<2>>)> {
    Ok(match psi {
        Series::One(s) => (Some(s.truncated(n)?.compile()), None),
        Series::Two(s) => (None, Some(s.truncated(n)?.compile())),
    })
}

pub fn error_table_cmd(s: &Settings) -> CliResult<Table> {
    let problem = s.problem()?;
    if problem.dimension() != 1 {
        return Err(CliError::config("error tables are available for 1-D problems only"));
    }
    let sol = exact_for(&problem)?;
    let times = floats(&s.samples("t")?);
    nonnegative("t", &times)?;
    let spec = match s.get("x") {
        Some(x) => {
            let xs = floats(&parse_samples("x", x)?);
            if xs.len() != 1 {
                return Err(CliError::config("a pointwise error table takes exactly one --x value"));
            }
            nonnegative("x", &xs)?;
            TableSpec::Pointwise { order: s.terms()?, x: xs[0], times }
        }
        None => {
            let orders = match s.get("orders") {
                Some(list) => parse_samples("orders", list)?
                    .iter()
                    .map(|r| r.is_integer().then(|| r.to_integer().to_usize()).flatten())
                    .collect::<Option<Vec<usize>>>()
                    .ok_or_else(|| CliError::config("--orders must be nonnegative integers"))?,
                None => vec![s.terms()?],
            };
            if orders.is_empty() {
                return Err(CliError::config("--orders is empty"));
            }
            TableSpec::L1 { orders, times, xmax: s.f64_or("xmax", DEFAULT_XMAX)?, step: s.f64_or("step", DEFAULT_STEP)? }
        }
    };
    let max_order = match &spec {
        TableSpec::Pointwise { order, .. } => *order,
        TableSpec::L1 { orders, .. } => orders.iter().copied().max().unwrap_or(0),
    };
    let Series::One(series) = series(s, &problem, max_order)? else { unreachable!("1-D checked above") };
    let et = error_table(&series, &sol, &spec)?;
    let mut meta = s.header_pairs();
    meta.push(("norm".into(), et.norm.clone()));
    let mut columns = vec![et.row_label.clone()];
    columns.extend(et.columns.iter().cloned());
    let mut table = Table::new(meta, columns);
    for (row, cells) in et.rows.iter().zip(&et.cells) {
        let mut line: Vec<Cell> = vec![(*row).into()];
        line.extend(cells.iter().map(|v| Cell::from(*v)));
        table.push(line);
    }
    Ok(table)
}

pub fn moments(s: &Settings) -> CliResult<Table> {
    let problem = s.problem()?;
    let n = s.terms()?;
    let compare = s.compare()?;
    let dim = problem.dimension();
    let orders = parse_moment_orders(s.get("j").unwrap_or(if dim == 1 { "0,1" } else { "0:0,1:0" }), dim)?;
    let ts = s.samples("t")?;
    let tf = floats(&ts);
    nonnegative("t", &tf)?;
    let sol = compare.exact.then(|| exact_for(&problem)).transpose()?;
    let grid = if compare.reference {
        if dim == 2 {
            return Err(Error::Unsupported2D.into());
        }
        Some(Grid::read(s)?)
    } else {
        None
    };

    let label = |o: &[u32; 2]| if dim == 1 { o[0].to_string() } else { format!("{}_{}", o[0], o[1]) };
    let mut columns = vec!["t".to_string()];
    for o in &orders {
        columns.push(format!("mu{}_psi_{n}", label(o)));
        if compare.exact {
            columns.push(format!("mu{}_exact", label(o)));
        }
        if compare.reference {
            columns.push(format!("mu{}_reference", label(o)));
        }
    }
    let mut table = Table::new(s.header_pairs(), columns);

    let polys = match series(s, &problem, n)? {
        Series::One(series) => {
            let psi = series.truncated(n)?;
            orders.iter().map(|o| psi.moment([o[0]])).collect::<Result<Vec<_>, _>>()?
        }
        Series::Two(series) => {
            let psi = series.truncated(n)?;
            orders.iter().map(|o| psi.moment(*o)).collect::<Result<Vec<_>, _>>()?
        }
    };
    let references = match &grid {
        Some(grid) => tf.iter().map(|&t| grid.solve(&problem, t)).collect::<CliResult<Vec<_>>>()?,
        None => Vec::new(),
    };
    for (i, (t, t_exact)) in tf.iter().zip(&ts).enumerate() {
        let mut row: Vec<Cell> = vec![(*t).into()];
        for (o, poly) in orders.iter().zip(&polys) {
            // Exact evaluation, rounded once.
            row.push(poly.eval_exact(t_exact).to_f64().unwrap_or(f64::NAN).into());
            if let Some(sol) = &sol {
                let exact = if dim == 1 { sol.moment(o[0], *t)? } else { sol.moment_2d(o[0], o[1], *t)? };
                row.push(exact.into());
            }
            if let Some(r) = references.get(i) {
                row.push(r.moment(o[0]).into());
            }
        }
        table.push(row);
    }
    Ok(table)
}

pub fn bounds(s: &Settings) -> CliResult<Table> {
    let problem = s.problem()?;
    s.require("t0")?;
    let t0 = s.f64_or("t0", f64::NAN)?;
    let ms = parse_samples("m", s.get("m").unwrap_or("1"))?
        .iter()
        .map(|r| r.is_integer().then(|| r.to_integer().to_u32()).flatten())
        .collect::<Option<Vec<u32>>>()
        .ok_or_else(|| CliError::config("--m must be nonnegative integers"))?;
    if ms.is_empty() {
        return Err(CliError::config("--m is empty"));
    }
    let horizon = s.f64_or("horizon", 1.0)?;
    let lambda = s.f64_or("lambda", 1.0)?;
    let frag_k = match &problem {
        ProblemSpec::Coag1D { kernel: CoagKernel::Constant, .. } | ProblemSpec::Coag2D { .. } => None,
        ProblemSpec::Frag { frag, .. } => Some(frag.k()),
        _ => return Err(CliError::config("bounds are available for constant-kernel coagulation, pure breakage and coag2d")),
    };
    let (rate_name, constant_name) = if frag_k.is_some() { ("lambda", "theta") } else { ("L", "Delta") };
    let columns = ["variant", "m", "t0", "u0_norm", "v1_norm", rate_name, constant_name, "verdict", "bound"];
    let mut table = Table::new(s.header_pairs(), columns.iter().map(|c| c.to_string()).collect());

    let series = series(s, &problem, 1)?;
    let (u0_norm, v1_norm) = match &series {
        Series::One(series) => (sup_l1_norm(series.component(0)?, t0)?, sup_l1_norm(series.component(1)?, t0)?),
        Series::Two(series) => (
            sup_l1_norm_2d(series.component(0)?, t0, DEFAULT_SUP_SAMPLES)?,
            sup_l1_norm_2d(series.component(1)?, t0, DEFAULT_SUP_SAMPLES)?,
        ),
    };
    let mut push = |variant: &str, b: &ConvergenceBound| {
        let verdict = if b.is_contractive() { "Contractive" } else { "NotContractive" };
        table.push(vec![
            variant.into(),
            (b.m as f64).into(),
            b.t0.into(),
            u0_norm.into(),
            b.v1_norm.into(),
            b.rate.into(),
            b.constant.into(),
            verdict.into(),
            b.bound.into(),
        ]);
    };
    for &m in &ms {
        match (&problem, frag_k) {
            (_, Some(k)) => push("frag", &frag_bound(k, lambda, t0, m, v1_norm)?),
            (ProblemSpec::Coag2D { .. }, _) => {
                let b = coag2d_bound(u0_norm, horizon, t0, m, v1_norm)?;
                push("coag2d-statement", &b.statement);
                push("coag2d-derived", &b.derived);
            }
            _ => push("coag", &coag_bound(u0_norm, horizon, t0, m, v1_norm)?),
        }
    }
    Ok(table)
}

pub fn reference_check(s: &Settings) -> CliResult<Table> {
    let problem = s.problem()?;
    if problem.dimension() != 1 {
        return Err(Error::Unsupported2D.into());
    }
    let n = s.terms()?;
    let ts = floats(&s.samples("t")?);
    if ts.len() != 1 {
        return Err(CliError::config("reference-check takes a single --t (the final time)"));
    }
    nonnegative("t", &ts)?;
    let t_end = ts[0];
    let grid = Grid::read(s)?;
    let reference = grid.solve(&problem, t_end)?;
    let Series::One(series) = series(s, &problem, n)? else { unreachable!("1-D checked above") };
    let psi = series.truncated(n)?.compile();
    let h = reference.spec.h();
    let approx = par::map_range(Exec::default(), reference.values.len(), |i| psi.evaluate([i as f64 * h], t_end));

    let columns = ["x", "reference", &format!("psi_{n}"), "deviation"];
    let mut table = Table::new(s.header_pairs(), columns.iter().map(|c| c.to_string()).collect());
    let mut max_dev = 0.0f64;
    for (i, (r, a)) in reference.values.iter().zip(&approx).enumerate() {
        let dev = (a - r).abs();
        max_dev = max_dev.max(dev);
        table.push(vec![(i as f64 * h).into(), (*r).into(), (*a).into(), dev.into()]);
    }
    table.summary.push(("max_deviation".into(), max_dev));
    Ok(table)
}

pub fn dump_symbolic(s: &Settings) -> CliResult<String> {
    let problem = s.problem()?;
    let n = s.terms()?;
    let component = if s.has("component") { Some(s.usize_or("component", 0)?) } else { None };
    let order = n.max(component.unwrap_or(0));
    let mut text = match series(s, &problem, order)? {
        Series::One(series) => match component {
            Some(k) => series.component(k)?.to_dump(),
            None => series.truncated(n)?.to_dump(),
        },
        Series::Two(series) => match component {
            Some(k) => series.component(k)?.to_dump(),
            None => series.truncated(n)?.to_dump(),
        },
    };
    text.push('\n');
    Ok(text)
}
