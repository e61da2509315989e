//! Adaptive Gauss–Kronrod (7/15) quadrature with bisection.
//!
//! The interval is first cut into `initial_panels` equal panels (useful for
//! oscillatory integrands such as `cos(k phi)` with large `k`), then the
//! panel with the worst Kronrod/Gauss disagreement is bisected until the
//! total falls below the absolute tolerance. No panel is split more than
//! `max_depth` times.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Nodes and weights from QUADPACK's qk15.
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
// Gauss weights for the 7-point rule living on XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    /// Absolute tolerance on the whole interval.
    pub tol: f64,
    pub max_depth: u32,
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { tol: 1e-10, max_depth: 40, initial_panels: 1 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// One Kronrod panel: returns (kronrod, |kronrod - gauss|).
fn kronrod15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Panels are never split beyond this count; reaching it is a failure.
const MAX_PANELS: usize = 200_000;

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
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
        self.err.total_cmp(&other.err).then(other.lo.total_cmp(&self.lo))
    }
}

/// Globally adaptive: the panel with the largest error estimate is bisected
/// until the summed estimate is within `tol`. The final sum runs in panel
/// order so the result does not depend on the refinement history.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("quadrature tolerance {} must be > 0", opts.tol)));
    }
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::InvalidParameter(format!("bad integration interval [{a}, {b}]")));
    }
    let length = b - a;
    if length == 0.0 {
        return Ok(QuadResult { value: 0.0, error_estimate: 0.0, evaluations: 0 });
    }
    let panels = opts.initial_panels.max(1);
    let mut evaluations = 0;
    let mut eval = |lo: f64, hi: f64, depth: u32, evaluations: &mut usize| {
        let (value, err) = kronrod15(&mut f, lo, hi);
        *evaluations += 15;
        Panel { lo, hi, value, err, depth }
    };

    let mut open = BinaryHeap::with_capacity(panels);
    let mut done = Vec::new();
    let mut total_err = 0.0;
    for p in 0..panels {
        let lo = a + length * p as f64 / panels as f64;
        let hi = if p + 1 == panels { b } else { a + length * (p + 1) as f64 / panels as f64 };
        let panel = eval(lo, hi, 0, &mut evaluations);
        total_err += panel.err;
        open.push(panel);
    }
    let mut failed = false;
    while total_err > opts.tol {
        let Some(worst) = open.pop() else { break };
        if worst.err <= 50.0 * f64::EPSILON * worst.value.abs() {
            // Round-off level: splitting cannot help.
            total_err -= worst.err;
            done.push(worst);
            continue;
        }
        if worst.depth >= opts.max_depth || open.len() + done.len() >= MAX_PANELS {
            open.push(worst);
            failed = true;
            break;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = eval(worst.lo, mid, worst.depth + 1, &mut evaluations);
        let right = eval(mid, worst.hi, worst.depth + 1, &mut evaluations);
        total_err += left.err + right.err - worst.err;
        open.push(left);
        open.push(right);
    }
    done.extend(open);
    done.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let value: f64 = done.iter().map(|p| p.value).sum();
    let error_estimate: f64 = done.iter().map(|p| p.err).sum();
    if !value.is_finite() {
        return Err(Error::QuadratureNonConvergence { residual: f64::INFINITY });
    }
    if failed {
        return Err(Error::QuadratureNonConvergence { residual: error_estimate });
    }
    Ok(QuadResult { value, error_estimate, evaluations })
}
