//! Globally adaptive 10/21-point Gauss–Kronrod quadrature on finite
//! intervals, in the style of QUADPACK's QAG.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_453_048_327,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Kronrod abscissae on [−1, 1] (positive half, centre last) and weights.
pub(crate) fn kronrod_rule() -> (&'static [f64; 11], &'static [f64; 11]) {
    (&XGK, &WGK)
}

/// Gauss weights matching the odd-indexed Kronrod abscissae.
pub(crate) fn gauss_weights() -> &'static [f64; 5] {
    &WG
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    /// Estimate of ∫|f|.
    pub l1: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn into_result(self, context: &'static str, target: f64) -> Result<QuadResult> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::QuadratureBudget {
                context,
                achieved: self.error,
                target,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    l1: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

/// One 21-point Gauss–Kronrod panel.
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let abs_half = half.abs();
    let value = resk * half;
    let resabs = resabs * abs_half;
    let resasc = resasc * abs_half;
    let err = rescale_error((resk - resg) * half, resabs, resasc);
    (value, err, resabs)
}

/// Integrates `f` over the partition given by `breakpoints` (at least two,
/// increasing), bisecting the worst panel until the summed error estimate is
/// below `max(abs_tol, rel_tol·|I|)` or `max_panels` is reached.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> QuadResult {
    assert!(breakpoints.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        let (value, error, l1) = gk21(&mut f, w[0], w[1]);
        evaluations += 21;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
            l1,
        });
    }
    loop {
        let (value, error, l1) = heap
            .iter()
            .fold((0.0, 0.0, 0.0), |acc, p| (acc.0 + p.value, acc.1 + p.error, acc.2 + p.l1));
        let tol = abs_tol.max(rel_tol * value.abs());
        let converged = error <= tol;
        if converged || heap.len() >= max_panels {
            return QuadResult {
                value,
                error,
                l1,
                evaluations,
                converged,
            };
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further; accept what we have
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            continue;
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error, l1) = gk21(&mut f, a, b);
            evaluations += 21;
            heap.push(Panel {
                a,
                b,
                value,
                error,
                l1,
            });
        }
    }
}

/// `n + 1` breakpoints splitting `[a, b]` evenly.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Breakpoints `0, b·2^{−n}, …, b/2, b`, geometric towards the origin.
pub fn geometric_from_zero(b: f64, n: usize) -> Vec<f64> {
    let mut pts = vec![0.0];
    pts.extend((0..=n).rev().map(|j| b * 0.5f64.powi(j as i32)));
    pts
}
