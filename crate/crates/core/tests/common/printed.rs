//! Components as printed for the worked examples, each check returning
//! whether the engine reproduces them exactly.

use super::*;
use num::ToPrimitive;
use pbe_core::polyexp::{integer, rational};
use pbe_core::{iterate_ahpetm, Rational};

pub fn constant_kernel_components() -> bool {
    let mut ok = true;
    let s = iterate_ahpetm::<1>(&constant_kernel(), 3).unwrap();
    let v = s.components();
    ok &= matches_printed(&v[1], 1, rational(1, 2), |x, t| t * (x - 2));
    ok &= matches_printed(&v[2], 1, rational(1, 144), |x, t| {
        t.pow(3) * (x.pow(3) - 12 * x.pow(2) + 36 * x - 24) + t.pow(2) * (18 * x.pow(2) - 108 * x + 108)
    });
    ok &= matches_printed(&v[3], 1, rational(1, 40642560), |x, t| {
        t.pow(3)
            * (t.pow(4) * x.pow(7) + 14 * t.pow(3) * (7 - 4 * t) * x.pow(6)
                + 588 * (t - 2) * t.pow(2) * (2 * t - 3) * x.pow(5)
                - 2940 * t * (t * (t * (4 * t - 21) + 36) - 24) * x.pow(4)
                + 11760 * (5 * (t - 4) * t * ((t - 3) * t + 6) + 48) * x.pow(3)
                - 35280 * (t * (t * (t * (4 * t - 35) + 120) - 240) + 192) * x.pow(2)
                + 70560 * (t * (t * (t * (2 * t - 21) + 90) - 240) + 288) * x
                - 10080 * (t * (t * (t * (4 * t - 49) + 252) - 840) + 1344))
    });
    ok
}

pub fn sum_kernel_components() -> bool {
    let mut ok = true;
    let s = iterate_ahpetm::<1>(&sum_kernel(), 2).unwrap();
    let v = s.components();
    ok &= matches_printed(&v[1], 1, rational(1, 2), |x, t| t * (x * x - 2 * x - 2));
    ok &= matches_printed(&v[2], 1, rational(1, 720), |x, t| {
        t * t
            * (t * x * (x.pow(5) - 10 * x.pow(4) - 20 * x.pow(3) + 240 * x * x - 120 * x - 240) + 60 * x.pow(4)
                - 360 * x.pow(3)
                - 180 * x * x
                + 1080 * x
                + 360)
    });
    ok
}

pub fn product_kernel_components() -> bool {
    let mut ok = true;
    let s = iterate_ahpetm::<1>(&product_kernel(), 2).unwrap();
    let v = s.components();
    ok &= matches_printed(&v[1], 1, rational(1, 12), |x, t| t * x * (x * x - 12));
    ok &= matches_printed(&v[2], 1, rational(1, 544320), |x, t| {
        t * t * x * x * (t * x.pow(7) - 144 * t * x.pow(5) + 3024 * t * x.pow(3) + 756 * x.pow(4) - 45360 * x * x + 272160)
    });
    ok
}

pub fn ccfe_components() -> bool {
    let mut ok = true;
    let s = iterate_ahpetm::<1>(&ccfe_slow(), 2).unwrap();
    let v = s.components();
    ok &= matches_printed(&v[1], 2, rational(1, 3), |x, t| t * (4 * x.pow(3) - 6 * x * x - 6 * x + 3));
    ok &= matches_printed(&v[2], 2, rational(1, 3780), |x, t| {
        t * t
            * (8 * t * x.pow(7) - 56 * t * x.pow(6) - 84 * t * x.pow(5) + 840 * t * x.pow(4) - 420 * t * x.pow(3)
                - 1260 * t * x * x
                + 630 * t * x
                + 504 * x.pow(5)
                - 2520 * x.pow(4)
                - 1890 * x.pow(3)
                + 9450 * x * x
                + 945 * x
                - 1890)
    });

    let s = iterate_ahpetm::<1>(&ccfe_fast(), 2).unwrap();
    let v = s.components();
    ok &= matches_printed(&v[1], 4, rational(8, 3), |x, t| t * (32 * x.pow(3) - 24 * x * x - 12 * x + 3));
    ok &= matches_printed(&v[2], 4, rational(8, 945), |x, t| {
        t * t
            * (1024 * t * x.pow(7) - 3584 * t * x.pow(6) - 2688 * t * x.pow(5) + 13440 * t * x.pow(4)
                - 3360 * t * x.pow(3)
                - 5040 * t * x * x
                + 1260 * t * x
                + 8064 * x.pow(5)
                - 20160 * x.pow(4)
                - 7560 * x.pow(3)
                + 18900 * x * x
                + 945 * x
                - 945)
    });
    ok
}

pub fn bivariate_first_component() -> bool {
    let mut ok = true;
    let s = iterate_ahpetm::<2>(&bivariate(), 1).unwrap();
    let v1 = &s.components()[1];
    let terms: Vec<_> = v1.iter().collect();
    ok &= terms.len() == 2;
    for (rate, _, _) in &terms {
        ok &= **rate == [integer(50), integer(50)];
    }
    // Leading coefficient on t·x³y³ and the ratio giving the inner constant.
    let lead = terms.iter().find(|(_, e, _)| e.space == [3, 3] && e.t == 1).unwrap().2.clone();
    let low = terms.iter().find(|(_, e, _)| e.space == [1, 1] && e.t == 1).unwrap().2.clone();
    ok &= lead == Rational::new(390625.into(), 72.into()) * Rational::from_integer(100_000_000.into());
    ok &= format!("{:.5e}", lead.to_f64().unwrap()) == "5.42535e11";
    ok &= -&low / &lead == rational(1152, 100_000_000);
    ok
}

/// Every check above, labelled by the problem it covers.
pub fn all() -> Vec<(&'static str, bool)> {
    vec![
        ("constant kernel v1..v3", constant_kernel_components()),
        ("sum kernel v1, v2", sum_kernel_components()),
        ("product kernel v1, v2", product_kernel_components()),
        ("coupled v1, v2", ccfe_components()),
        ("bivariate v1", bivariate_first_component()),
    ]
}
