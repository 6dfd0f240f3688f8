//! Scalar minimization helpers shared by the time-share optimizers.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping once
/// the bracket is narrower than `tol`.
///
/// Only interior points are evaluated, so `f` may be discontinuous at the
/// endpoints. Returns the best point seen and its value. Non-finite values
/// are treated as `+inf`.
pub fn golden_section_min<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };

    while (b - a) > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    best
}

/// Index of the smallest value; later indices win ties within `tie_tol`.
///
/// Used on grids sorted by increasing time share, so ties resolve toward
/// larger `alpha`.
pub fn argmin_prefer_last(values: &[f64], tie_tol: f64) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(b) if v <= values[b] + tie_tol => best = Some(i),
            _ => {}
        }
    }
    best
}
