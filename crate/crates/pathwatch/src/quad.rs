//! Adaptive Gauss–Kronrod quadrature (7–15 pair with interval bisection).

#![allow(clippy::excessive_precision)]

/// Kronrod abscissae for the 15-point rule (positive half; symmetric).
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];

/// Gauss weights for the embedded 7-point rule.
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_33,
];

/// Kronrod weights for the 15-point rule.
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];

/// One G7–K15 panel: returns (kronrod estimate, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = f_center * WGK15[7];
    let mut gauss = f_center * WG7[3];

    for j in 0..7 {
        let dx = half * XGK15[j];
        let fsum = f(center - dx) + f(center + dx);
        kronrod += WGK15[j] * fsum;
        if j % 2 == 1 {
            // odd indices are Gauss points: j=1,3,5 → WG7[0..3]
            gauss += WG7[j / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    ((kronrod), (kronrod - gauss).abs())
}

/// Integrates `f` over [a, b] by bisecting the panel with the largest
/// error estimate until the summed estimate falls below `tol_abs`.
///
/// Always starts from a uniform 8-way split (plus any caller-supplied
/// interior break points) so a feature narrower than a panel cannot hide
/// between the nodes of a single panel spanning the domain.
pub(crate) fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol_abs: f64,
    breaks: &[f64],
) -> f64 {
    if a == b {
        return 0.0;
    }
    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }
    let mut edges = vec![a];
    edges.extend((1..8).map(|i| a + (b - a) * i as f64 / 8.0));
    edges.extend(breaks.iter().copied().filter(|t| *t > a && *t < b));
    edges.push(b);
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut panels: Vec<Panel> = edges
        .windows(2)
        .map(|w| {
            let (value, err) = gk15(&f, w[0], w[1]);
            Panel {
                a: w[0],
                b: w[1],
                value,
                err,
            }
        })
        .collect();

    // Worst-panel refinement; the panel count bounds total work.
    for _ in 0..2000 {
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        if total_err <= tol_abs {
            break;
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // interval no longer splittable; accept as-is
            let (value, err) = gk15(&f, a, b);
            panels.push(Panel {
                a,
                b,
                value,
                err: err.min(tol_abs / 2.0),
            });
            continue;
        }
        let (v1, e1) = gk15(&f, a, mid);
        let (v2, e2) = gk15(&f, mid, b);
        panels.push(Panel {
            a,
            b: mid,
            value: v1,
            err: e1,
        });
        panels.push(Panel {
            a: mid,
            b,
            value: v2,
            err: e2,
        });
    }
    panels.iter().map(|p| p.value).sum()
}
