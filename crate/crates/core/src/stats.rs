//! Normal quantile and binomial confidence intervals.

use crate::error::{domain, Result};

/// Inverse of the standard normal CDF.
///
/// Wichura's AS 241 (PPND16) rational approximation, accurate to about 1e-16
/// relative over `(0, 1)`. Returns ±∞ at the endpoints and NaN outside.
#[allow(clippy::excessive_precision)] // coefficients as published
pub fn normal_quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = (((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_813e4) * r + 6.726_577_092_700_87e4)
            * r
            + 4.592_195_393_154_987e4)
            * r
            + 1.373_169_376_550_946e4)
            * r
            + 1.971_590_950_306_551_3e3)
            * r
            + 1.331_416_678_917_843_8e2)
            * r
            + 3.387_132_872_796_366_5)
            * q;
        let den = ((((((5.226_495_278_852_854_5e3 * r + 2.872_908_573_572_194_3e4) * r + 3.930_789_580_009_271e4)
            * r
            + 2.121_379_430_158_659_7e4)
            * r
            + 5.394_196_021_424_751e3)
            * r
            + 6.871_870_074_920_579e2)
            * r
            + 4.231_333_070_160_091e1)
            * r
            + 1.0;
        return num / den;
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5;
        let den =
            ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r + 1.519_866_656_361_645_7e-2) * r
                + 1.481_039_764_274_800_8e-1)
                * r
                + 6.897_673_349_851e-1)
                * r
                + 1.676_384_830_183_803_8)
                * r
                + 2.053_191_626_637_758_8)
                * r
                + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_048_7e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_445_9e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_132e-4)
            * r
            + 1.487_536_129_085_061_5e-2)
            * r
            + 1.369_298_809_227_358e-1)
            * r
            + 5.998_322_065_558_88e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Two-sided critical value `z` with `Pr(|Z| <= z) = level`.
pub fn two_sided_z(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(domain(format!("confidence level must lie in (0, 1), got {level}")));
    }
    Ok(normal_quantile(1.0 - (1.0 - level) / 2.0))
}

/// Wilson score interval for `successes` out of `trials` at `level`.
///
/// The returned bounds lie in `[0, 1]` and bracket the point estimate; they
/// are pinned to exactly 0 (resp. 1) when no trial (resp. every trial)
/// succeeded.
pub fn wilson_interval(successes: u64, trials: u64, level: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(domain("wilson_interval needs at least one trial"));
    }
    if successes > trials {
        return Err(domain(format!("{successes} successes exceed {trials} trials")));
    }
    let z = two_sided_z(level)?;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let mut low = (center - half).clamp(0.0, 1.0).min(p);
    let mut high = (center + half).clamp(0.0, 1.0).max(p);
    if successes == 0 {
        low = 0.0;
    }
    if successes == trials {
        high = 1.0;
    }
    Ok((low, high))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn normal_quantile_matches_reference_values() {
        // scipy.stats.norm.ppf
        assert_abs_diff_eq!(normal_quantile(0.9995), 3.2905267314919255, epsilon = 1e-14);
        assert_abs_diff_eq!(normal_quantile(0.975), 1.959963984540054, epsilon = 1e-14);
        assert_eq!(normal_quantile(0.5), 0.0);
    }

    #[test]
    fn normal_quantile_matches_statrs() {
        let std = Normal::standard();
        let mut p = 1e-12;
        while p < 1.0 {
            let want = std.inverse_cdf(p);
            assert!(
                (normal_quantile(p) - want).abs() <= 1e-9,
                "p = {p}: {} vs {want}",
                normal_quantile(p)
            );
            let upper = std.inverse_cdf(1.0 - p);
            assert!((normal_quantile(1.0 - p) - upper).abs() <= 1e-9 * upper.abs().max(1.0));
            p = if p < 0.01 { p * 3.0 } else { p + 0.0137 };
        }
    }

    #[test]
    fn normal_quantile_round_trips_through_cdf() {
        // statrs' cdf is itself only good to ~1e-10 relative in the tails
        let std = Normal::standard();
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            assert_relative_eq!(std.cdf(normal_quantile(p)), p, max_relative = 1e-9);
        }
    }

    #[test]
    fn normal_quantile_edges() {
        assert_eq!(normal_quantile(0.0), f64::NEG_INFINITY);
        assert_eq!(normal_quantile(1.0), f64::INFINITY);
        assert!(normal_quantile(1.5).is_nan());
        assert!(normal_quantile(f64::NAN).is_nan());
    }

    #[test]
    fn wilson_reference_values() {
        // statsmodels proportion_confint(method="wilson")
        let (lo, hi) = wilson_interval(500, 1000, 0.95).unwrap();
        assert_abs_diff_eq!(lo, 0.4690696003681042, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 0.5309303996318958, epsilon = 1e-12);
        let (lo, hi) = wilson_interval(333, 1000, 0.999).unwrap();
        assert_abs_diff_eq!(lo, 0.2859793997073872, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 0.3835982699387835, epsilon = 1e-12);
        let (lo, hi) = wilson_interval(1, 7, 0.9).unwrap();
        assert_abs_diff_eq!(lo, 0.03254380205478663, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 0.45228669469702926, epsilon = 1e-12);
        let (_, hi) = wilson_interval(0, 50, 0.999).unwrap();
        assert_abs_diff_eq!(hi, 0.17800426438703854, epsilon = 1e-12);
    }

    #[test]
    fn wilson_extremes() {
        for n in [1, 2, 10, 1_000_000] {
            assert_eq!(wilson_interval(0, n, 0.999).unwrap().0, 0.0);
            assert_eq!(wilson_interval(n, n, 0.999).unwrap().1, 1.0);
        }
    }

    #[test]
    fn wilson_errors() {
        assert!(wilson_interval(0, 0, 0.95).is_err());
        assert!(wilson_interval(5, 4, 0.95).is_err());
        assert!(wilson_interval(1, 4, 1.0).is_err());
        assert!(wilson_interval(1, 4, 0.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn wilson_brackets_estimate(trials in 1u64..10_000_000, frac in 0.0..=1.0f64, level in 0.5..0.99999f64) {
            let successes = ((trials as f64) * frac).floor() as u64;
            let (lo, hi) = wilson_interval(successes, trials, level).unwrap();
            let p = successes as f64 / trials as f64;
            proptest::prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        }
    }
}
