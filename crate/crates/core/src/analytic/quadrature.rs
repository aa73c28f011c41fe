//! Globally adaptive Gauss–Kronrod (7/15) integration.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-13,
            rel: 1e-11,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Piece {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Piece {
        lo,
        hi,
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

/// Integrates `f` over the finite interval `[lo, hi]`.
///
/// Nodes never touch the end points, so integrands with removable or
/// integrable end-point singularities are fine.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<Integral> {
    let first = kronrod(&f, lo, hi);
    let mut total = first.value;
    let mut err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    while err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= tol.max_intervals {
            return Err(Error::Numeric {
                context: "quadrature",
                detail: format!(
                    "no convergence after {} intervals (value {total:e}, error {err:e})",
                    heap.len()
                ),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            return Err(Error::Numeric {
                context: "quadrature",
                detail: format!("interval [{}, {}] cannot be bisected", worst.lo, worst.hi),
            });
        }
        let left = kronrod(&f, worst.lo, mid);
        let right = kronrod(&f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        heap.push(left);
        heap.push(right);
        // recompute to avoid drift from repeated subtraction
        err = heap.iter().map(|p| p.error).sum();
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    if !value.is_finite() {
        return Err(Error::Numeric {
            context: "quadrature",
            detail: "non-finite integral".into(),
        });
    }
    Ok(Integral {
        value,
        error: err,
        intervals: heap.len(),
    })
}

/// Integrates `f` over `[0, ∞)` via `s = u/(1-u)`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, tol: Tolerance) -> Result<Integral> {
    integrate(
        |u| {
            let one_minus = 1.0 - u;
            let s = u / one_minus;
            let v = f(s) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}
