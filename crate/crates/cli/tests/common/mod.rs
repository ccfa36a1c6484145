//! Independent reference implementations used as test oracles. Nothing here
//! calls into the closed-form group code.
#![allow(dead_code)]

pub type Mat = Vec<Vec<f64>>;

pub fn eye(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat, sb: f64) -> Mat {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + sb * y).collect()).collect()
}

pub fn scale(a: &Mat, s: f64) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn norm1(a: &Mat) -> f64 {
    let n = a.len();
    (0..n).map(|j| (0..n).map(|i| a[i][j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b).flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs())).fold(0.0, f64::max)
}

/// Plain Taylor series, `terms` terms.
pub fn expm_series(a: &Mat, terms: usize) -> Mat {
    let n = a.len();
    let mut out = eye(n);
    let mut term = eye(n);
    for k in 1..terms {
        term = scale(&mul(&term, a), 1.0 / k as f64);
        out = add(&out, &term, 1.0);
    }
    out
}

/// Scaling and squaring around a 30-term Taylor series.
pub fn expm(a: &Mat) -> Mat {
    let mut s = 0;
    let mut norm = norm1(a);
    while norm > 0.5 {
        norm /= 2.0;
        s += 1;
    }
    let mut e = expm_series(&scale(a, 1.0 / (1u64 << s) as f64), 30);
    for _ in 0..s {
        e = mul(&e, &e);
    }
    e
}

/// Mercator series `log(I + X) = sum (-1)^(k+1) X^k / k`.
pub fn logm_mercator(a: &Mat, terms: usize) -> Mat {
    let n = a.len();
    let x = add(a, &eye(n), -1.0);
    let mut out = vec![vec![0.0; n]; n];
    let mut pow = eye(n);
    for k in 1..=terms {
        pow = mul(&pow, &x);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out = add(&out, &pow, sign / k as f64);
    }
    out
}

fn inv(a: &Mat) -> Mat {
    // Gauss-Jordan with partial pivoting
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(eye(n)).map(|(r, e)| r.iter().cloned().chain(e).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        let d = m[c][c];
        for v in m[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                let row_c = m[c].clone();
                for (v, rc) in m[r].iter_mut().zip(row_c) {
                    *v -= f * rc;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Principal square root by the Denman-Beavers iteration.
pub fn sqrtm(a: &Mat) -> Mat {
    let mut y = a.clone();
    let mut z = eye(a.len());
    for _ in 0..60 {
        let yi = inv(&y);
        let zi = inv(&z);
        let ny = scale(&add(&y, &zi, 1.0), 0.5);
        let nz = scale(&add(&z, &yi, 1.0), 0.5);
        let done = max_abs_diff(&ny, &y) < 1e-16;
        y = ny;
        z = nz;
        if done {
            break;
        }
    }
    y
}

/// Inverse scaling and squaring: square roots until close to `I`, then the
/// Mercator series.
pub fn logm(a: &Mat) -> Mat {
    let n = a.len();
    let mut m = a.clone();
    let mut s = 0;
    while norm1(&add(&m, &eye(n), -1.0)) > 0.05 {
        m = sqrtm(&m);
        s += 1;
    }
    scale(&logm_mercator(&m, 40), (1u64 << s) as f64)
}

/// Homogeneous matrix of `c1 A1 + c2 A2 + c3 A3` in se(2).
pub fn se2_algebra(c: [f64; 3]) -> Mat {
    vec![vec![0.0, -c[2], c[0]], vec![c[2], 0.0, c[1]], vec![0.0, 0.0, 0.0]]
}

pub fn se2_matrix(x: f64, y: f64, theta: f64) -> Mat {
    let (s, c) = theta.sin_cos();
    vec![vec![c, -s, x], vec![s, c, y], vec![0.0, 0.0, 1.0]]
}

/// `(x, y, theta)` read off a homogeneous matrix.
pub fn se2_from_matrix(m: &Mat) -> [f64; 3] {
    [m[0][2], m[1][2], m[1][0].atan2(m[0][0])]
}

pub fn skew(c: [f64; 3]) -> Mat {
    vec![vec![0.0, -c[2], c[1]], vec![c[2], 0.0, -c[0]], vec![-c[1], c[0], 0.0]]
}

pub fn vee(m: &Mat) -> [f64; 3] {
    [0.5 * (m[2][1] - m[1][2]), 0.5 * (m[0][2] - m[2][0]), 0.5 * (m[1][0] - m[0][1])]
}

pub fn wrap(a: f64) -> f64 {
    (a + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI
}
