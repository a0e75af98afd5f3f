//! Small deterministic 1-D maximization used by the heuristic ratio searches:
//! a coarse grid pass followed by golden-section refinement around the best
//! grid point. The objective need not be unimodal; this is a local tool for
//! certified-lower-bound heuristics, not a global optimizer.

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Maximize `f` on `[lo, hi]`; returns (argmax, value).
pub(crate) fn grid_golden_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    grid: usize,
    refine_iters: usize,
) -> (f64, f64) {
    debug_assert!(grid >= 2);
    let mut best_x = lo;
    let mut best_v = f(lo);
    let step = (hi - lo) / (grid - 1) as f64;
    for i in 1..grid {
        let x = lo + step * i as f64;
        let v = f(x);
        if v > best_v {
            best_v = v;
            best_x = x;
        }
    }

    let mut a = (best_x - step).max(lo);
    let mut b = (best_x + step).min(hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..refine_iters {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    if fm > best_v {
        best_v = fm;
        best_x = mid;
    }
    if f1 > best_v {
        best_v = f1;
        best_x = x1;
    }
    if f2 > best_v {
        best_v = f2;
        best_x = x2;
    }
    (best_x, best_v)
}
