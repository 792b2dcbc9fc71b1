//! Quadrature rules on uniform and nonuniform nodes.

/// Composite trapezoid on arbitrary monotone nodes.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(a, b)| 0.5 * (a[1] - a[0]) * (b[0] + b[1])).sum()
}

/// Running trapezoid integral, starting at 0.
pub fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..x.len() {
        acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
        out.push(acc);
    }
    out
}

/// Integral over `[x0, x1]` of the cubic through four nodes, fourth order on smooth data.
fn cubic_panel(xs: [f64; 4], ys: [f64; 4], x0: f64, x1: f64) -> f64 {
    // Gauss-Legendre with two points is exact for cubics.
    let c = 0.5 * (x0 + x1);
    let h = 0.5 * (x1 - x0);
    let g = h / 3f64.sqrt();
    let eval = |x: f64| -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            let mut l = 1.0;
            for j in 0..4 {
                if i != j {
                    l *= (x - xs[j]) / (xs[i] - xs[j]);
                }
            }
            s += ys[i] * l;
        }
        s
    };
    h * (eval(c - g) + eval(c + g))
}

/// Running integral with local cubic interpolation on nonuniform nodes.
/// Falls back to the trapezoid rule for fewer than four nodes.
pub fn cumulative_cubic(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 4 {
        return cumulative_trapezoid(x, y);
    }
    let mut out = vec![0.0; n];
    for i in 1..n {
        let s = (i as isize - 2).clamp(0, n as isize - 4) as usize;
        let xs = [x[s], x[s + 1], x[s + 2], x[s + 3]];
        let ys = [y[s], y[s + 1], y[s + 2], y[s + 3]];
        out[i] = out[i - 1] + cubic_panel(xs, ys, x[i - 1], x[i]);
    }
    out
}

/// Running integral using values and derivatives (cubic Hermite, fourth order).
pub fn cumulative_hermite(x: &[f64], y: &[f64], dy: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..x.len() {
        let h = x[i] - x[i - 1];
        acc += 0.5 * h * (y[i - 1] + y[i]) + h * h / 12.0 * (dy[i - 1] - dy[i]);
        out.push(acc);
    }
    out
}

/// Cubic Hermite interpolation on one interval.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Antiderivative of the cubic Hermite interpolant from `x0` to `x`.
pub fn hermite_integral(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let i00 = s - s3 + 0.5 * s4;
    let i10 = 0.5 * s2 - 2.0 / 3.0 * s3 + 0.25 * s4;
    let i01 = s3 - 0.5 * s4;
    let i11 = 0.25 * s4 - s3 / 3.0;
    h * (i00 * y0 + i10 * h * d0 + i01 * y1 + i11 * h * d1)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on the Legendre recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -z;
        xs[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}
