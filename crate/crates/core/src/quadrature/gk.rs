//! Gauss–Kronrod 7/15 rule on a finite interval.

use super::Lane;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One panel of the rule.
#[derive(Debug, Clone, Copy)]
pub struct Panel<T> {
    pub kronrod: T,
    pub gauss: T,
    /// `∫|f|` estimate, used by the error rescaling.
    pub abs_mass: f64,
}

impl<T: Lane> Panel<T> {
    /// Error estimate in the usual adaptive-quadrature rescaled form.
    pub fn error(&self) -> f64 {
        let raw = (self.kronrod - self.gauss).norm();
        if raw == 0.0 {
            return 0.0;
        }
        if self.abs_mass > 0.0 {
            let scaled = self.abs_mass * (200.0 * raw / self.abs_mass).powf(1.5).min(1.0);
            // Never claim more than the rule can resolve.
            scaled.max(50.0 * f64::EPSILON * self.abs_mass).min(raw)
        } else {
            raw
        }
    }
}

impl<T: Lane> Panel<T> {
    /// Component-wise `|K15 − G7|`.
    pub fn error_lane(&self) -> T {
        (self.kronrod - self.gauss).abs_parts()
    }
}

/// Applies the 15-point rule to `f` on `[a, b]`.
#[inline]
pub fn gk15<T: Lane, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Panel<T> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = fc.scale(WGK[7]);
    let mut gauss = fc.scale(WG[3]);
    let mut abs = WGK[7] * fc.norm();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        let s = f1 + f2;
        kron = kron + s.scale(WGK[j]);
        abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss = gauss + s.scale(WG[j / 2]);
        }
    }
    let h = half.abs();
    Panel { kronrod: kron.scale(half), gauss: gauss.scale(half), abs_mass: abs * h }
}
