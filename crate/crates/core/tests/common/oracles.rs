//! Independent reference implementations shared by the oracle tests and
//! the acceptance run.

use std::ops::{Add, Mul, Sub};

use lgswe::fem::VectorField;
use lgswe::mesh::{Point, TriMesh};
use lgswe::scenarios::Manufactured;

use super::integrate;

/// Basis gradients from vertex coordinates.
pub fn grads(mesh: &TriMesh, t: usize) -> [[f64; 2]; 3] {
    let v = mesh.vertices();
    let tri = mesh.triangles()[t];
    let [a, b, c] = [v[tri[0]], v[tri[1]], v[tri[2]]];
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    [
        [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
        [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
        [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
    ]
}

pub fn p1(values: &[f64], tri: [usize; 3], l: [f64; 3]) -> f64 {
    (0..3).map(|k| l[k] * values[tri[k]]).sum()
}

pub fn strain(g: [f64; 2], c: usize) -> [[f64; 2]; 2] {
    // ∇(b e_c) has row c equal to g
    let mut grad = [[0.0; 2]; 2];
    grad[c] = g;
    let mut d = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            d[i][j] = 0.5 * (grad[i][j] + grad[j][i]);
        }
    }
    d
}

pub fn oracle_mass(mesh: &TriMesh) -> Vec<Vec<f64>> {
    let n = mesh.num_vertices();
    let mut m = vec![vec![0.0; n]; n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                m[tri[i]][tri[j]] += integrate(mesh, t, 6, |l, _| l[i] * l[j]);
            }
        }
    }
    m
}

pub fn oracle_weighted(mesh: &TriMesh, phi: &[f64]) -> Vec<Vec<f64>> {
    let n = 2 * mesh.num_vertices();
    let mut m = vec![vec![0.0; n]; n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let v = integrate(mesh, t, 6, |l, _| p1(phi, *tri, l) * l[i] * l[j]);
                for c in 0..2 {
                    m[2 * tri[i] + c][2 * tri[j] + c] += v;
                }
            }
        }
    }
    m
}

pub fn oracle_a(mesh: &TriMesh, phi: &[f64], mu: f64) -> Vec<Vec<f64>> {
    let n = 2 * mesh.num_vertices();
    let mut m = vec![vec![0.0; n]; n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let g = grads(mesh, t);
        let w = integrate(mesh, t, 6, |l, _| p1(phi, *tri, l));
        for i in 0..3 {
            for c in 0..2 {
                let di = strain(g[i], c);
                for j in 0..3 {
                    for d in 0..2 {
                        let dj = strain(g[j], d);
                        let contraction: f64 = (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).map(|(a, b)| di[a][b] * dj[a][b]).sum();
                        m[2 * tri[i] + c][2 * tri[j] + d] += 2.0 * mu * w * contraction;
                    }
                }
            }
        }
    }
    m
}

/// Barycentric coordinates of `x` with respect to triangle `t`, extended
/// affinely outside it.
pub fn bary(mesh: &TriMesh, t: usize, x: Point) -> [f64; 3] {
    let v = mesh.vertices();
    let [a, b, c] = mesh.triangles()[t].map(|i| v[i]);
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let l1 = ((x[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (x[1] - a[1])) / det;
    let l2 = ((b[0] - a[0]) * (x[1] - a[1]) - (x[0] - a[0]) * (b[1] - a[1])) / det;
    [1.0 - l1 - l2, l1, l2]
}

/// Foot map `x - τ v(x)` using the P1 velocity of element `t`.
pub fn foot_map(mesh: &TriMesh, v: &VectorField, t: usize, tau: f64, x: Point) -> Point {
    let l = bary(mesh, t, x);
    let tri = mesh.triangles()[t];
    let mut vx = [0.0; 2];
    for k in 0..3 {
        let node = v.get(tri[k]);
        vx[0] += l[k] * node[0];
        vx[1] += l[k] * node[1];
    }
    [x[0] - tau * vx[0], x[1] - tau * vx[1]]
}

/// Gaussian elimination with partial pivoting.
pub fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// Value plus gradient with respect to (x, y, t).
#[derive(Clone, Copy, Debug)]
pub struct Dual {
    pub v: f64,
    pub d: [f64; 3],
}

impl Dual {
    fn constant(v: f64) -> Self {
        Self { v, d: [0.0; 3] }
    }

    fn var(v: f64, k: usize) -> Self {
        let mut d = [0.0; 3];
        d[k] = 1.0;
        Self { v, d }
    }

    fn sin(self) -> Self {
        let c = self.v.cos();
        Self { v: self.v.sin(), d: self.d.map(|x| c * x) }
    }

    fn scale(self, s: f64) -> Self {
        Self { v: s * self.v, d: self.d.map(|x| s * x) }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, d: [0, 1, 2].map(|k| self.d[k] + o.d[k]) }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, d: [0, 1, 2].map(|k| self.d[k] - o.d[k]) }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual { v: self.v * o.v, d: [0, 1, 2].map(|k| self.d[k] * o.v + self.v * o.d[k]) }
    }
}

const PI: f64 = std::f64::consts::PI;

/// The stated exact solution: `φ = 1 + S (2 + sin πt)/8`, `u = S (2 + sin πt)/3 (1, 1)`.
pub fn exact(x: f64, y: f64, t: f64) -> (Dual, [Dual; 2]) {
    let (x, y, t) = (Dual::var(x, 0), Dual::var(y, 1), Dual::var(t, 2));
    let s = x.scale(PI).sin() * y.scale(PI).sin();
    let time = Dual::constant(2.0) + t.scale(PI).sin();
    let phi = Dual::constant(1.0) + (s * time).scale(1.0 / 8.0);
    let w = (s * time).scale(1.0 / 3.0);
    (phi, [w, w])
}

/// `φ D(u)` at a point.
pub fn stress(x: f64, y: f64, t: f64) -> [[f64; 2]; 2] {
    let (phi, u) = exact(x, y, t);
    let mut s = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            s[i][j] = phi.v * 0.5 * (u[i].d[j] + u[j].d[i]);
        }
    }
    s
}

pub fn residuals(x: f64, y: f64, t: f64, m: &Manufactured) -> (f64, [f64; 2]) {
    let h = 1e-5;
    let (phi, u) = exact(x, y, t);
    let flux = [phi * u[0], phi * u[1]];
    let f = phi.d[2] + flux[0].d[0] + flux[1].d[1];

    // centred differences at h and 2h, combined to cancel the h² term
    let div_at = |h: f64, i: usize| {
        let (sxp, sxm) = (stress(x + h, y, t), stress(x - h, y, t));
        let (syp, sym) = (stress(x, y + h, t), stress(x, y - h, t));
        (sxp[i][0] - sxm[i][0]) / (2.0 * h) + (syp[i][1] - sym[i][1]) / (2.0 * h)
    };
    let mut big_f = [0.0; 2];
    for i in 0..2 {
        let div = (4.0 * div_at(h, i) - div_at(2.0 * h, i)) / 3.0;
        let material = u[i].d[2] + u[0].v * u[i].d[0] + u[1].v * u[i].d[1];
        // η = φ - ζ, so ∇η = ∇φ
        big_f[i] = m.rho * phi.v * material - 2.0 * m.mu * div + m.rho * m.g * phi.v * phi.d[i];
    }
    (f, big_f)
}
