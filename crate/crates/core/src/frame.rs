//! Orthonormal frames in ℝ³ and the RK4 integrator for skew-symmetric frame systems.

use serde::{Deserialize, Serialize};

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

/// `a + s·b`
pub fn axpy(a: Vec3, s: f64, b: Vec3) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

pub fn normalize(a: Vec3) -> Vec3 {
    scale(1.0 / norm(a), a)
}

/// Angle between two vectors in `[0, π]`.
pub fn angle(a: Vec3, b: Vec3) -> f64 {
    let c = dot(a, b) / (norm(a) * norm(b));
    let s = norm(cross(a, b)) / (norm(a) * norm(b));
    s.atan2(c)
}

pub type Mat3 = [[f64; 3]; 3];

pub fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

/// Rotation taking the pair `(p, q)` to `(p', q')`, built from the orthonormal
/// frames the pairs span. Exact when the two pairs enclose the same angle.
pub fn pair_rotation(p: Vec3, q: Vec3, p2: Vec3, q2: Vec3) -> Mat3 {
    let basis = |u: Vec3, v: Vec3| {
        let e1 = normalize(u);
        let e2 = normalize(axpy(v, -dot(v, e1), e1));
        [e1, e2, cross(e1, e2)]
    };
    let a = basis(p, q);
    let b = basis(p2, q2);
    let mut r = [[0.0; 3]; 3];
    for (i, row) in r.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = (0..3).map(|k| b[k][i] * a[k][j]).sum();
        }
    }
    r
}

/// Frenet triple `(T, n, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub t: Vec3,
    pub n: Vec3,
    pub b: Vec3,
}

impl Frame {
    pub const IDENTITY: Frame = Frame { t: [1.0, 0.0, 0.0], n: [0.0, 1.0, 0.0], b: [0.0, 0.0, 1.0] };

    /// Largest deviation from orthonormality and from `b = T ∧ n`.
    pub fn defect(&self) -> f64 {
        let d = [
            (norm(self.t) - 1.0).abs(),
            (norm(self.n) - 1.0).abs(),
            (norm(self.b) - 1.0).abs(),
            dot(self.t, self.n).abs(),
            dot(self.t, self.b).abs(),
            dot(self.n, self.b).abs(),
            norm(sub(self.b, cross(self.t, self.n))),
        ];
        d.into_iter().fold(0.0, f64::max)
    }

    /// Gram-Schmidt on `(T, n)` and `b = T ∧ n`.
    pub fn orthonormalized(&self) -> Frame {
        let t = normalize(self.t);
        let n = normalize(axpy(self.n, -dot(self.n, t), t));
        Frame { t, n, b: cross(t, n) }
    }

    pub fn distance(&self, other: &Frame) -> f64 {
        (0..3)
            .map(|i| {
                let (p, q) = (self.row(i), other.row(i));
                dot(sub(p, q), sub(p, q))
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn row(&self, i: usize) -> Vec3 {
        match i {
            0 => self.t,
            1 => self.n,
            _ => self.b,
        }
    }

    /// `n + i b` as a pair of real vectors rotated by angle `phi`: returns the
    /// frame with `ñ + i b̃ = e^{iφ}(n + i b)`.
    pub fn rotate_normal(&self, phi: f64) -> Frame {
        let (s, c) = phi.sin_cos();
        Frame {
            t: self.t,
            n: sub(scale(c, self.n), scale(s, self.b)),
            b: add(scale(s, self.n), scale(c, self.b)),
        }
    }

    fn combine(&self, k: SkewCoeffs) -> Frame {
        Frame {
            t: add(scale(k.tn, self.n), scale(k.tb, self.b)),
            n: add(scale(-k.tn, self.t), scale(k.nb, self.b)),
            b: add(scale(-k.tb, self.t), scale(-k.nb, self.n)),
        }
    }

    fn axpy(&self, s: f64, d: &Frame) -> Frame {
        Frame { t: axpy(self.t, s, d.t), n: axpy(self.n, s, d.n), b: axpy(self.b, s, d.b) }
    }
}

/// Entries of the skew generator: `T' = tn·n + tb·b`, `n' = −tn·T + nb·b`, `b' = −tb·T − nb·n`.
/// The Frenet system is `(c, 0, τ)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SkewCoeffs {
    pub tn: f64,
    pub tb: f64,
    pub nb: f64,
}

impl SkewCoeffs {
    pub fn frenet(c: f64, tau: f64) -> Self {
        Self { tn: c, tb: 0.0, nb: tau }
    }
}

/// One classical RK4 step of `F' = K(s) F`.
pub fn rk4_step(f: &Frame, s: f64, h: f64, coeffs: &impl Fn(f64) -> SkewCoeffs) -> Frame {
    let k1 = f.combine(coeffs(s));
    let k2 = f.axpy(0.5 * h, &k1).combine(coeffs(s + 0.5 * h));
    let k3 = f.axpy(0.5 * h, &k2).combine(coeffs(s + 0.5 * h));
    let k4 = f.axpy(h, &k3).combine(coeffs(s + h));
    let incr = k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4);
    f.axpy(h / 6.0, &incr)
}

/// Integrate from `s0` over `steps` steps of size `h` (negative `h` integrates backward),
/// calling `visit(i, s, frame)` at every node including the start.
pub fn integrate(
    f0: Frame,
    s0: f64,
    h: f64,
    steps: usize,
    coeffs: impl Fn(f64) -> SkewCoeffs,
    project: bool,
    mut visit: impl FnMut(usize, f64, &Frame),
) -> Frame {
    let mut f = f0;
    visit(0, s0, &f);
    for i in 0..steps {
        let s = s0 + i as f64 * h;
        f = rk4_step(&f, s, h, &coeffs);
        if project {
            f = f.orthonormalized();
        }
        visit(i + 1, s0 + (i + 1) as f64 * h, &f);
    }
    f
}
