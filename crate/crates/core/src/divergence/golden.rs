/// Golden-section maximization of a concave function on `[lo, hi]`.
///
/// Endpoints are evaluated too, so maxima on the boundary are returned
/// exactly. Values of `-inf` are allowed.
pub(crate) fn maximize(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    if !(hi > lo) {
        return (lo, f(lo));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iter = 0;
    while (b - a) > tol * (1.0 + c.abs()) && iter < max_iter {
        // ties go left: concave functions flat at -inf on the right edge
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Root of a function that changes sign once on `[lo, hi]`; `pos_left` says
/// whether it is nonnegative at `lo`. Returns the last point on the
/// nonnegative side.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, pos_left: bool, iters: usize) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..iters {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m) >= 0.0) == pos_left {
            a = m;
        } else {
            b = m;
        }
    }
    if pos_left {
        a
    } else {
        b
    }
}
