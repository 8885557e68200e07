//! Flags, the optional key=value config file, and the value grammars.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num::{BigInt, ToPrimitive, Zero};
use pbe_core::polyexp::parse_rational;
use pbe_core::{CoagKernel, FragSpec, Method, PolyExp1D, PolyExp2D, ProblemSpec, Rational};

use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "pbe", version, about = "Series solutions of population balance equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Truncated series (and comparisons) on an (x[, y], t) grid.
    Density,
    /// L1 error table over orders and times, or pointwise errors at one x.
    ErrorTable,
    /// Moment trajectories of the truncated series.
    Moments,
    /// Contraction constants and error bounds.
    Bounds,
    /// Series against the fixed-grid reference solver.
    ReferenceCheck,
    /// Exact symbolic form of a component or partial sum.
    DumpSymbolic,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Density => "density",
            Command::ErrorTable => "error-table",
            Command::Moments => "moments",
            Command::Bounds => "bounds",
            Command::ReferenceCheck => "reference-check",
            Command::DumpSymbolic => "dump-symbolic",
        }
    }
}

/// Every flag is also a config-file key of the same name.
#[derive(Args, Debug, Default)]
pub struct Flags {
    /// Flat key=value file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// coag | frag | ccfe | coag2d
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// constant | sum | product
    #[arg(long, global = true)]
    pub kernel: Option<String>,
    /// Breakage parameters c,r,s,k
    #[arg(long, global = true)]
    pub frag: Option<String>,
    /// exp:a | monoexp:c,p,a | monoexp2:c,px,py,ax,ay, joined with '+'
    #[arg(long, global = true)]
    pub u0: Option<String>,
    /// ahpetm | classical
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// Truncation order n of the partial sum
    #[arg(long, global = true)]
    pub terms: Option<String>,
    /// Times: a,b,c or start:end:step
    #[arg(long, global = true)]
    pub t: Option<String>,
    #[arg(long, global = true)]
    pub x: Option<String>,
    #[arg(long, global = true)]
    pub y: Option<String>,
    /// exact | reference | both
    #[arg(long, global = true)]
    pub compare: Option<String>,
    /// csv | json
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Truncation orders for the L1 table
    #[arg(long, global = true)]
    pub orders: Option<String>,
    #[arg(long, global = true)]
    pub xmax: Option<String>,
    /// Simpson step of the L1 norm
    #[arg(long, global = true)]
    pub step: Option<String>,
    /// Moment orders: 0,1,2 or i:j pairs in 2-D
    #[arg(long, global = true)]
    pub j: Option<String>,
    #[arg(long, global = true)]
    pub t0: Option<String>,
    /// Horizon T of the coagulation bound
    #[arg(long, global = true)]
    pub horizon: Option<String>,
    /// Truncation order m of the bound
    #[arg(long, global = true)]
    pub m: Option<String>,
    /// Decay parameter of the breakage bound
    #[arg(long, global = true)]
    pub lambda: Option<String>,
    /// Reference grid cells
    #[arg(long, global = true)]
    pub cells: Option<String>,
    /// Reference time step
    #[arg(long, global = true)]
    pub dt: Option<String>,
    /// Dump component v_k instead of the partial sum
    #[arg(long, global = true)]
    pub component: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("model", &self.model),
            ("kernel", &self.kernel),
            ("frag", &self.frag),
            ("u0", &self.u0),
            ("method", &self.method),
            ("terms", &self.terms),
            ("t", &self.t),
            ("x", &self.x),
            ("y", &self.y),
            ("compare", &self.compare),
            ("format", &self.format),
            ("out", &self.out),
            ("orders", &self.orders),
            ("xmax", &self.xmax),
            ("step", &self.step),
            ("j", &self.j),
            ("t0", &self.t0),
            ("horizon", &self.horizon),
            ("m", &self.m),
            ("lambda", &self.lambda),
            ("cells", &self.cells),
            ("dt", &self.dt),
            ("component", &self.component),
        ]
    }
}

/// Merged settings: config file first, flags on top.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<&'static str, String>,
}

impl Settings {
    pub fn load(flags: &Flags) -> CliResult<Self> {
        let mut settings = Settings::default();
        let keys: Vec<&'static str> = flags.pairs().iter().map(|(k, _)| *k).collect();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| CliError::config(format!("config line {}: expected key=value", lineno + 1)))?;
                let key = key.trim();
                let key = keys
                    .iter()
                    .find(|k| **k == key)
                    .ok_or_else(|| CliError::config(format!("config line {}: unknown key {key:?}", lineno + 1)))?;
                settings.values.insert(key, value.trim().to_string());
            }
        }
        for (key, value) in flags.pairs() {
            if let Some(v) = value {
                settings.values.insert(key, v.clone());
            }
        }
        Ok(settings)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn require(&self, key: &str) -> CliResult<&str> {
        self.get(key).ok_or_else(|| CliError::config(format!("missing --{key}")))
    }

    /// Settings echoed into output headers; the output path is left out so
    /// that file and stdout runs produce identical bytes.
    pub fn header_pairs(&self) -> Vec<(String, String)> {
        self.values
            .iter()
            .filter(|(k, _)| **k != "out")
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        match self.get(key) {
            Some(s) => parse_f64(key, s),
            None => Ok(default),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> CliResult<usize> {
        match self.get(key) {
            Some(s) => parse_usize(key, s),
            None => Ok(default),
        }
    }

    pub fn method(&self) -> CliResult<Method> {
        Ok(self.get("method").unwrap_or("ahpetm").parse()?)
    }

    pub fn terms(&self) -> CliResult<usize> {
        self.usize_or("terms", 3)
    }

    pub fn format(&self) -> CliResult<Format> {
        match self.get("format").unwrap_or("csv") {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::config(format!("unknown format {other:?}"))),
        }
    }

    pub fn compare(&self) -> CliResult<Compare> {
        match self.get("compare") {
            None => Ok(Compare::default()),
            Some("exact") => Ok(Compare { exact: true, reference: false }),
            Some("reference") => Ok(Compare { exact: false, reference: true }),
            Some("both") => Ok(Compare { exact: true, reference: true }),
            Some(other) => Err(CliError::config(format!("unknown comparison {other:?}"))),
        }
    }

    /// A required sample list; empty lists are rejected.
    pub fn samples(&self, key: &str) -> CliResult<Vec<Rational>> {
        let values = parse_samples(key, self.require(key)?)?;
        if values.is_empty() {
            return Err(CliError::config(format!("--{key} is empty")));
        }
        Ok(values)
    }

    pub fn problem(&self) -> CliResult<ProblemSpec> {
        let model = self.require("model")?;
        let kernel = |s: &Settings| -> CliResult<CoagKernel> { Ok(s.get("kernel").unwrap_or("constant").parse()?) };
        let frag = |s: &Settings| parse_frag(s.require("frag")?);
        let u0 = parse_u0(self.require("u0")?)?;
        let one_d = |u: InitialDensity| match u {
            InitialDensity::OneD(f) => Ok(f),
            InitialDensity::TwoD(_) => Err(CliError::config(format!("model {model} needs a 1-D initial density"))),
        };
        if model != "coag2d" && self.has("y") {
            return Err(CliError::config("--y applies to the coag2d model only"));
        }
        match model {
            "coag" => Ok(ProblemSpec::coag(kernel(self)?, one_d(u0)?)?),
            "frag" => Ok(ProblemSpec::frag(frag(self)?, one_d(u0)?)?),
            "ccfe" => Ok(ProblemSpec::ccfe(kernel(self)?, frag(self)?, one_d(u0)?)?),
            "coag2d" => {
                if kernel(self)? != CoagKernel::Constant {
                    return Err(CliError::config("coag2d supports the constant kernel only"));
                }
                match u0 {
                    InitialDensity::TwoD(f) => Ok(ProblemSpec::coag2d(f)?),
                    InitialDensity::OneD(_) => Err(CliError::config("coag2d needs a monoexp2 initial density")),
                }
            }
            other => Err(CliError::config(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Compare {
    pub exact: bool,
    pub reference: bool,
}

pub enum InitialDensity {
    OneD(PolyExp1D),
    TwoD(PolyExp2D),
}

fn parse_f64(key: &str, s: &str) -> CliResult<f64> {
    Ok(number(key, s)?.to_f64().unwrap_or(f64::NAN))
}

fn parse_usize(key: &str, s: &str) -> CliResult<usize> {
    s.trim()
        .parse()
        .map_err(|_| CliError::config(format!("--{key}: expected a nonnegative integer, got {s:?}")))
}

/// Exact value of `n/d`, a decimal such as `-1.25e-3`, or an integer.
pub fn parse_number(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.contains('/') {
        return parse_rational(s).ok();
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(digits * num::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

fn number(key: &str, s: &str) -> CliResult<Rational> {
    parse_number(s).ok_or_else(|| CliError::config(format!("--{key}: not a number: {s:?}")))
}

/// `a,b,c` or the inclusive range `start:end:step`.
pub fn parse_samples(key: &str, s: &str) -> CliResult<Vec<Rational>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(|p| number(key, p)).collect(),
        3 => {
            let (start, end, step) = (number(key, parts[0])?, number(key, parts[1])?, number(key, parts[2])?);
            if step <= Rational::zero() || end < start {
                return Err(CliError::config(format!("--{key}: range needs start <= end and a positive step")));
            }
            let count = ((&end - &start) / &step).floor().to_integer();
            let count = count
                .to_usize()
                .filter(|c| *c < 10_000_000)
                .ok_or_else(|| CliError::config(format!("--{key}: range is too long")))?;
            Ok((0..=count).map(|i| &start + &step * Rational::from_integer(BigInt::from(i))).collect())
        }
        _ => Err(CliError::config(format!("--{key}: expected a list or start:end:step, got {s:?}"))),
    }
}

fn exact_list<const N: usize>(what: &str, s: &str) -> CliResult<[Rational; N]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(CliError::config(format!("{what}: expected {N} comma-separated values, got {s:?}")));
    }
    let values = parts.iter().map(|p| number(what, p)).collect::<CliResult<Vec<_>>>()?;
    Ok(std::array::from_fn(|i| values[i].clone()))
}

fn exponent(what: &str, r: &Rational) -> CliResult<u32> {
    r.is_integer()
        .then(|| r.to_integer().to_u32())
        .flatten()
        .ok_or_else(|| CliError::config(format!("{what}: powers must be nonnegative integers")))
}

/// `c,r,s,k` for `B = c x^{r−1}/y^r`, `S = s x^k`.
pub fn parse_frag(s: &str) -> CliResult<FragSpec> {
    let [c, r, sel, k] = exact_list::<4>("frag", s)?;
    Ok(FragSpec::new(c, exponent("frag", &r)?, sel, exponent("frag", &k)?)?)
}

pub fn parse_u0(s: &str) -> CliResult<InitialDensity> {
    let mut one: Option<PolyExp1D> = None;
    let mut two: Option<PolyExp2D> = None;
    for term in s.split('+') {
        let (kind, args) = term
            .trim()
            .split_once(':')
            .ok_or_else(|| CliError::config(format!("u0: expected kind:args, got {term:?}")))?;
        match kind {
            "exp" => {
                let [a] = exact_list::<1>("u0", args)?;
                *one.get_or_insert_with(PolyExp1D::zero) += &PolyExp1D::exponential(a);
            }
            "monoexp" => {
                let [c, p, a] = exact_list::<3>("u0", args)?;
                *one.get_or_insert_with(PolyExp1D::zero) += &PolyExp1D::mono(c, exponent("u0", &p)?, a);
            }
            "monoexp2" => {
                let [c, px, py, ax, ay] = exact_list::<5>("u0", args)?;
                let term = PolyExp2D::mono(c, exponent("u0", &px)?, exponent("u0", &py)?, ax, ay);
                *two.get_or_insert_with(PolyExp2D::zero) += &term;
            }
            other => return Err(CliError::config(format!("u0: unknown kind {other:?}"))),
        }
    }
    match (one, two) {
        (Some(f), None) => Ok(InitialDensity::OneD(f)),
        (None, Some(f)) => Ok(InitialDensity::TwoD(f)),
        _ => Err(CliError::config("u0 mixes 1-D and 2-D terms")),
    }
}

/// Moment orders: `0,1,2` in 1-D, `0:0,1:0` in 2-D.
pub fn parse_moment_orders(s: &str, dim: usize) -> CliResult<Vec<[u32; 2]>> {
    let bad = || CliError::config(format!("--j: expected {} orders, got {s:?}", if dim == 1 { "0,1,2-style" } else { "i:j-style" }));
    let orders = s
        .split(',')
        .map(|item| {
            let parts: Vec<&str> = item.trim().split(':').collect();
            if parts.len() != dim {
                return Err(bad());
            }
            let mut out = [0u32; 2];
            for (slot, p) in out.iter_mut().zip(&parts) {
                *slot = p.trim().parse().map_err(|_| bad())?;
            }
            Ok(out)
        })
        .collect::<CliResult<Vec<_>>>()?;
    if orders.is_empty() {
        return Err(bad());
    }
    Ok(orders)
}
