//! Small numerical kernels shared across modules.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Ordinary least squares `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Coefficient of determination; 1 when `y` has zero variance and is fitted exactly.
    pub r_squared: T,
}

pub fn linear_regression<T: Real>(xs: &[T], ys: &[T]) -> LineFit<T> {
    assert_eq!(xs.len(), ys.len());
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    let slope = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    let intercept = my - slope * mx;
    let ss_res = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .fold(T::zero(), |a, b| a + b);
    let r_squared = if syy > T::zero() {
        (T::one() - ss_res / syy).max(T::zero()).min(T::one())
    } else {
        T::one()
    };
    LineFit { slope, intercept, r_squared }
}

/// Least squares `y ≈ a·p + b·q` by modified Gram–Schmidt. Returns `(a, b, residual_sum_of_squares)`.
pub fn lstsq2<T: Real>(p: &[T], q: &[T], y: &[T]) -> (T, T, T) {
    let dot = |u: &[T], v: &[T]| u.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
    let np = dot(p, p).sqrt();
    let e1: Vec<T> = p.iter().map(|&v| v / np).collect();
    let r12 = dot(&e1, q);
    let q_perp: Vec<T> = q.iter().zip(&e1).map(|(&v, &e)| v - r12 * e).collect();
    let r22 = dot(&q_perp, &q_perp).sqrt();
    let c1 = dot(&e1, y);
    if r22 <= T::epsilon() * np {
        let a = c1 / np;
        let rss = y.iter().zip(p).map(|(&yy, &pp)| (yy - a * pp).powi(2)).fold(T::zero(), |s, v| s + v);
        return (a, T::zero(), rss);
    }
    let e2: Vec<T> = q_perp.iter().map(|&v| v / r22).collect();
    let c2 = dot(&e2, y);
    let b = c2 / r22;
    let a = (c1 - r12 * b) / np;
    let rss = y
        .iter()
        .zip(p.iter().zip(q))
        .map(|(&yy, (&pp, &qq))| (yy - a * pp - b * qq).powi(2))
        .fold(T::zero(), |s, v| s + v);
    (a, b, rss)
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect<T: Real, F: Fn(T) -> T>(f: F, mut lo: T, mut hi: T, tol: T) -> Result<T> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::OutOfRange {
            what: "bracket",
            value: lo.to_f64_lossy(),
            range: "no sign change on the bracket",
        });
    }
    while hi - lo > tol {
        let mid = lo + (hi - lo) / T::lit(2.0);
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / T::lit(2.0))
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
pub fn golden_min<T: Real, F: Fn(T) -> T>(f: F, mut a: T, mut b: T, tol: T) -> T {
    let g = T::lit(0.618_033_988_749_894_8);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    (a + b) / T::lit(2.0)
}

/// `n` points geometrically spaced from `lo` to `hi` inclusive.
pub fn geomspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(n >= 2 && lo > T::zero() && hi > T::zero());
    let (la, lb) = (lo.ln(), hi.ln());
    let mut v: Vec<T> = (0..n)
        .map(|i| (la + (lb - la) * T::from_usize_lossy(i) / T::from_usize_lossy(n - 1)).exp())
        .collect();
    v[0] = lo;
    v[n - 1] = hi;
    v
}

/// Geometric grid on `[lo, hi]` with at least `per_decade` intervals per factor of ten.
pub fn geometric_grid<T: Real>(lo: T, hi: T, per_decade: usize) -> Vec<T> {
    let decades = (hi / lo).log10();
    let intervals = (decades * T::from_usize_lossy(per_decade)).ceil().to_usize().unwrap_or(1).max(2);
    geomspace(lo, hi, intervals + 1)
}

/// Quadrature weights for integrating samples on the nonuniform nodes `x` (ascending).
///
/// `simpson = true` uses the composite Simpson rule for irregular spacing (with the
/// standard correction for an odd number of intervals); otherwise the trapezoid rule.
pub fn quadrature_weights<T: Real>(x: &[T], simpson: bool) -> Vec<T> {
    let n = x.len();
    let mut w = vec![T::zero(); n];
    if n < 2 {
        return w;
    }
    if !simpson || n == 2 {
        for i in 0..n - 1 {
            let h = x[i + 1] - x[i];
            w[i] = w[i] + h / T::lit(2.0);
            w[i + 1] = w[i + 1] + h / T::lit(2.0);
        }
        return w;
    }
    let intervals = n - 1;
    let six = T::lit(6.0);
    let pairs_end = if intervals % 2 == 0 { intervals } else { intervals - 1 };
    let mut i = 0;
    while i < pairs_end {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let hs = h0 + h1;
        w[i] = w[i] + hs / six * (T::lit(2.0) - h1 / h0);
        w[i + 1] = w[i + 1] + hs / six * (hs * hs / (h0 * h1));
        w[i + 2] = w[i + 2] + hs / six * (T::lit(2.0) - h0 / h1);
        i += 2;
    }
    if intervals % 2 == 1 {
        // last interval from the quadratic through the final three nodes
        let h0 = x[n - 2] - x[n - 3];
        let h1 = x[n - 1] - x[n - 2];
        let a = (T::lit(2.0) * h1 * h1 + T::lit(3.0) * h0 * h1) / (six * (h0 + h1));
        let b = (h1 * h1 + T::lit(3.0) * h0 * h1) / (six * h0);
        let c = (h1 * h1 * h1) / (six * h0 * (h0 + h1));
        w[n - 1] = w[n - 1] + a;
        w[n - 2] = w[n - 2] + b;
        w[n - 3] = w[n - 3] - c;
    }
    w
}

/// Weights `(node, weight)` integrating each interval `[x_i, x_{i+1}]` separately.
///
/// With `simpson` the intervals are paired and each pair shares the quadratic through its three
/// nodes, so summing all intervals reproduces [`quadrature_weights`]. A trailing unpaired interval
/// uses the quadratic through the last three nodes.
pub fn interval_weights<T: Real>(x: &[T], simpson: bool) -> Vec<Vec<(usize, T)>> {
    let n = x.len();
    let two = T::lit(2.0);
    if !simpson || n < 3 {
        return (0..n.saturating_sub(1))
            .map(|i| {
                let h = x[i + 1] - x[i];
                vec![(i, h / two), (i + 1, h / two)]
            })
            .collect();
    }
    let six = T::lit(6.0);
    let three = T::lit(3.0);
    let intervals = n - 1;
    (0..intervals)
        .map(|i| {
            let first = i % 2 == 0 && i + 2 < n;
            let k = if first { i } else { i - 1 };
            let h0 = x[k + 1] - x[k];
            let h1 = x[k + 2] - x[k + 1];
            let s = h0 + h1;
            if first {
                vec![
                    (k, (two * h0 * h0 + three * h0 * h1) / (six * s)),
                    (k + 1, (h0 * h0 + three * h0 * h1) / (six * h1)),
                    (k + 2, -(h0 * h0 * h0) / (six * h1 * s)),
                ]
            } else {
                vec![
                    (k, -(h1 * h1 * h1) / (six * h0 * s)),
                    (k + 1, (h1 * h1 + three * h0 * h1) / (six * h0)),
                    (k + 2, (two * h1 * h1 + three * h0 * h1) / (six * s)),
                ]
            }
        })
        .collect()
}

/// 5-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre5<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T) -> T {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let mut acc = T::zero();
    for k in 0..5 {
        acc = acc + T::lit(W[k]) * f(mid + half * T::lit(X[k]));
    }
    acc * half
}
