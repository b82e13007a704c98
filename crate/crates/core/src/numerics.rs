//! One-dimensional search helpers.

use crate::scalar::Real;

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`.
///
/// Returns the abscissa of the minimum, located to within `tol` (absolute).
pub fn golden_section_min<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, tol: T) -> T {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a).abs() > tol && iters < 500 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    (a + b) / T::lit(2.0)
}

/// Golden-section maximization of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_max<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, tol: T) -> T {
    golden_section_min(|x| -f(x), lo, hi, tol)
}

/// Minimizes `f` on `[lo, hi]` by a coarse scan followed by golden-section
/// refinement around the best grid cell. Suitable for functions that are
/// unimodal but not known to be so analytically.
pub fn bracketed_min<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, samples: usize, tol: T) -> T {
    let samples = samples.max(3);
    let step = (hi - lo) / T::lit((samples - 1) as f64);
    let mut best = 0;
    let mut best_val = T::infinity();
    for i in 0..samples {
        let v = f(lo + step * T::lit(i as f64));
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let a = lo + step * T::lit(best.saturating_sub(1) as f64);
    let b = (lo + step * T::lit((best + 1) as f64)).min(hi);
    golden_section_min(f, a, b, tol)
}

/// Number of sign changes in the successive differences of `ys`, ignoring
/// exact ties. A discretely unimodal sequence has at most one.
pub fn difference_sign_changes<T: Real>(ys: &[T]) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for w in ys.windows(2) {
        let d = w[1] - w[0];
        let s = if d > T::zero() {
            1
        } else if d < T::zero() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}
