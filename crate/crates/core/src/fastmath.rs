//! Inlinable elementary functions for the bin loops. They avoid library
//! calls so the loops over bins vectorize; accuracy is a few ulp.

/// `exp(x)` for `x <= 0`, inlinable so the bin loops vectorize. Arguments
/// below -708 are clamped there, which can only raise the bound.
#[inline(always)]
pub(crate) fn exp_nonpositive(x: f64) -> f64 {
    const SHIFT: f64 = 6_755_399_441_055_744.0; // 1.5 * 2^52
    const LN2_HI: f64 = 6.931_471_803_691_238e-1;
    const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;
    let x = x.max(-708.0);
    let t = x * std::f64::consts::LOG2_E + SHIFT;
    let n = t - SHIFT;
    let r = (x - n * LN2_HI) - n * LN2_LO;
    // Taylor series to degree 13 on |r| <= ln 2 / 2
    let mut p = 1.0 / 6_227_020_800.0;
    p = p * r + 1.0 / 479_001_600.0;
    p = p * r + 1.0 / 39_916_800.0;
    p = p * r + 1.0 / 3_628_800.0;
    p = p * r + 1.0 / 362_880.0;
    p = p * r + 1.0 / 40_320.0;
    p = p * r + 1.0 / 5_040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;
    let k = t.to_bits().wrapping_sub(SHIFT.to_bits()) as i64;
    p * f64::from_bits((k.wrapping_add(1023) as u64) << 52)
}

/// `exp(x) - 1` for `-1 <= x <= 0`, with full relative precision.
#[inline(always)]
pub(crate) fn expm1_unit(x: f64) -> f64 {
    // Taylor series to degree 19; terms alternate and shrink, no cancellation.
    const INV_FACT: [f64; 19] = [
        1.0,
        1.0 / 2.0,
        1.0 / 6.0,
        1.0 / 24.0,
        1.0 / 120.0,
        1.0 / 720.0,
        1.0 / 5_040.0,
        1.0 / 40_320.0,
        1.0 / 362_880.0,
        1.0 / 3_628_800.0,
        1.0 / 39_916_800.0,
        1.0 / 479_001_600.0,
        1.0 / 6_227_020_800.0,
        1.0 / 87_178_291_200.0,
        1.0 / 1_307_674_368_000.0,
        1.0 / 20_922_789_888_000.0,
        1.0 / 355_687_428_096_000.0,
        1.0 / 6_402_373_705_728_000.0,
        1.0 / 121_645_100_408_832_000.0,
    ];
    let mut p = INV_FACT[18];
    for c in INV_FACT[..18].iter().rev() {
        p = p * x + c;
    }
    p * x
}

/// Natural log of a positive normal `x`.
#[inline(always)]
pub(crate) fn ln_positive(x: f64) -> f64 {
    const SQRT_HALF_BITS: u64 = 0x3fe6_a09e_667f_3bcd;
    const LN2_HI: f64 = 6.931_471_803_691_238e-1;
    const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;
    // x = 2^k m with m in [sqrt(1/2), sqrt(2))
    let ix = x
        .to_bits()
        .wrapping_add(0x3ff0_0000_0000_0000 - SQRT_HALF_BITS);
    // exponent as a float without an integer conversion: 2^52 + e - (2^52 + 1023)
    let k = f64::from_bits((ix >> 52) | 0x4330_0000_0000_0000) - 4_503_599_627_371_519.0;
    let m = f64::from_bits((ix & 0x000f_ffff_ffff_ffff).wrapping_add(SQRT_HALF_BITS));
    // ln m = 2 atanh(s), |s| <= 0.1716
    let s = (m - 1.0) / (m + 1.0);
    let s2 = s * s;
    let mut p = 1.0 / 23.0;
    p = p * s2 + 1.0 / 21.0;
    p = p * s2 + 1.0 / 19.0;
    p = p * s2 + 1.0 / 17.0;
    p = p * s2 + 1.0 / 15.0;
    p = p * s2 + 1.0 / 13.0;
    p = p * s2 + 1.0 / 11.0;
    p = p * s2 + 1.0 / 9.0;
    p = p * s2 + 1.0 / 7.0;
    p = p * s2 + 1.0 / 5.0;
    p = p * s2 + 1.0 / 3.0;
    let tail = 2.0 * s * s2 * p;
    k * LN2_HI + ((2.0 * s + tail) + k * LN2_LO)
}

/// Defines a function twice, once with AVX2 code generation, and picks the
/// variant at runtime. No fused multiply-add is involved, so both variants
/// give bit-identical results.
macro_rules! multiversion {
    ($(#[$m:meta])* $vis:vis fn $name:ident($($arg:ident: $ty:ty),* $(,)?) $body:block) => {
        $(#[$m])*
        $vis fn $name($($arg: $ty),*) {
            #[inline(always)]
            fn body($($arg: $ty),*) $body
            #[cfg(target_arch = "x86_64")]
            {
                #[target_feature(enable = "avx2")]
                fn avx2($($arg: $ty),*) {
                    body($($arg),*)
                }
                if std::arch::is_x86_feature_detected!("avx2") {
                    // SAFETY: the feature was detected at runtime.
                    return unsafe { avx2($($arg),*) };
                }
            }
            body($($arg),*)
        }
    };
}
pub(crate) use multiversion;

#[cfg(test)]
mod tests {
    use super::*;

    fn ulps(a: f64, b: f64) -> f64 {
        (a - b).abs() / (f64::EPSILON * b.abs().max(f64::MIN_POSITIVE))
    }

    #[test]
    fn exp_matches_libm() {
        let mut x = 0.0;
        while x > -700.0 {
            assert!(ulps(exp_nonpositive(x), x.exp()) <= 4.0, "{x}");
            x -= 0.013_7;
        }
        assert_eq!(exp_nonpositive(0.0), 1.0);
        assert!(exp_nonpositive(-1e4) > 0.0);
    }

    #[test]
    fn expm1_matches_libm() {
        for i in 0..=20_000 {
            let x = -(i as f64) / 20_000.0;
            let x = if i % 7 == 0 { x * 1e-9 } else { x };
            assert!(ulps(expm1_unit(x), x.exp_m1()) <= 4.0, "{x}");
        }
    }

    #[test]
    fn ln_matches_libm() {
        let mut x = 1e-300;
        while x < 1e300 {
            assert!(
                (ln_positive(x) - x.ln()).abs() <= 4.0 * f64::EPSILON * x.ln().abs().max(1.0),
                "{x}"
            );
            x *= 1.013_7;
        }
        for i in 1..10_000 {
            let x = 1.0 + i as f64 * 1e-5;
            assert!(ulps(ln_positive(x), x.ln()) <= 4.0, "{x}");
            let y = 1.0 - i as f64 * 1e-5;
            assert!(ulps(ln_positive(y), y.ln()) <= 4.0, "{y}");
        }
        assert_eq!(ln_positive(1.0), 0.0);
    }
}
