//! Standard normal tail probabilities.

use std::f64::consts::PI;

use super::ScreeningError;

/// Below this argument `erfc` goes through the power series of `erf`,
/// above it through the continued fraction.
const SERIES_LIMIT: f64 = 1.5;

/// `erf(x)` for `0 <= x < SERIES_LIMIT` from the positive-term series
/// `2/√π · e^{-x²} · Σ 2ⁿ x^{2n+1} / (2n+1)!!`.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

/// `erfc(x)` for `x >= SERIES_LIMIT` from the continued fraction
/// `e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))`, evaluated
/// with the modified Lentz method.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..5000 {
        let a = n as f64 / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < SERIES_LIMIT {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// One-sided standard normal tail `Φ(-k)` in parts per million.
pub fn tail_ppm(k: f64) -> Result<f64, ScreeningError> {
    if k.is_nan() || k < 0.0 {
        return Err(ScreeningError::NegativeK(k));
    }
    Ok(0.5 * erfc(k / std::f64::consts::SQRT_2) * 1e6)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // frozen from a 40-digit arbitrary precision evaluation
    const ERFC_REF: &[(f64, f64)] = &[
        (0.1, 0.887_537_083_981_715_101_6),
        (0.5, 0.479_500_122_186_953_462_3),
        (0.84, 0.234_857_288_545_005_482_7),
        (1.0, 0.157_299_207_050_285_130_7),
        (2.0, 0.004_677_734_981_047_265_838),
        (3.5, 7.430_983_723_414_127_455e-7),
        (5.0, 1.537_459_794_428_034_850e-12),
        (7.071_067_811_865_475_5, 1.523_970_604_832_099_526e-23),
    ];

    const TAIL_PPM_REF: &[(f64, f64)] = &[
        (0.5, 308_537.538_725_986_896_4),
        (1.0, 158_655.253_931_457_051_4),
        (2.0, 22_750.131_948_179_207_2),
        (3.0, 1_349.898_031_630_094_527),
        (4.5, 3.397_673_124_730_060_402),
        (6.0, 9.865_876_450_376_981_407e-4),
        (8.0, 6.220_960_574_271_784_124e-10),
        (9.3, 7.022_284_240_441_626_030e-15),
        (10.0, 7.619_853_024_160_526_066e-18),
    ];

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn erfc_matches_reference() {
        for &(x, want) in ERFC_REF {
            let got = erfc(x);
            assert!(rel(got, want) < 1e-12, "erfc({x}) = {got:e}, want {want:e}");
        }
        assert_eq!(erfc(0.0), 1.0);
        assert!(rel(erfc(-1.0), 2.0 - 0.157_299_207_050_285_13) < 1e-15);
    }

    #[test]
    fn branches_agree_at_switch() {
        let a = 1.0 - erf_series(SERIES_LIMIT);
        let b = erfc_continued_fraction(SERIES_LIMIT);
        assert!(rel(a, b) < 1e-13, "{a:e} {b:e}");
    }

    #[test]
    fn tail_reference_values() {
        assert_eq!(tail_ppm(0.0).unwrap(), 500_000.0);
        for &(k, want) in TAIL_PPM_REF {
            let got = tail_ppm(k).unwrap();
            assert!(
                rel(got, want) < 1e-12,
                "tail_ppm({k}) = {got:e}, want {want:e}"
            );
        }
        assert!((tail_ppm(4.5).unwrap() - 3.40).abs() < 0.01);
        assert!(tail_ppm(9.3).unwrap() < 1e-13);
        assert!(tail_ppm(-0.1).is_err());
        assert!(tail_ppm(f64::NAN).is_err());
    }

    #[test]
    fn tail_strictly_decreasing() {
        let mut prev = tail_ppm(0.0).unwrap();
        for i in 1..=10_000 {
            let k = i as f64 * 1e-3;
            let t = tail_ppm(k).unwrap();
            assert!(t < prev, "not decreasing at k={k}");
            prev = t;
        }
    }
}
