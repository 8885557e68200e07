//! Adaptive Gauss–Kronrod (7, 15) quadrature and composite Simpson.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and its difference from the embedded Gauss rule.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = h * XGK[k];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// `∫_a^b f` to absolute tolerance `tol`.
///
/// Globally adaptive: the interval with the largest error estimate is
/// bisected until the summed estimate meets `tol` or the interval budget
/// is spent, so unattainable tolerances cost bounded work.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    const MAX_INTERVALS: usize = 500;
    let (value, err) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, value, err)];
    let mut total_err = err;
    while total_err > tol && pieces.len() < MAX_INTERVALS {
        let worst = (0..pieces.len())
            .max_by(|&i, &j| pieces[i].3.total_cmp(&pieces[j].3))
            .expect("nonempty");
        let (lo, hi, _, e) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let left = gk15(&f, lo, mid);
        let right = gk15(&f, mid, hi);
        total_err += left.1 + right.1 - e;
        pieces.push((lo, mid, left.0, left.1));
        pieces.push((mid, hi, right.0, right.1));
    }
    pieces.iter().map(|p| p.2).sum()
}

/// `∫_a^b f` split at `breaks` (sorted interior points) to absorb kinks.
pub fn integrate_pieces(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut points = vec![a];
    points.extend(breaks.iter().copied().filter(|&p| p > a && p < b));
    points.push(b);
    let share = tol / (points.len() - 1) as f64;
    points.windows(2).map(|w| integrate(&f, w[0], w[1], share)).sum()
}

/// Composite Simpson weights for `n` intervals (`n` even) of width `h`.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2 && n.is_multiple_of(2), "Simpson needs an even interval count, got {n}");
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}
