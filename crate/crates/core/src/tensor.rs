//! Dense f64 tensor helpers for chart dimensions <= 7: closures build
//! components, small sums contract them. Mirrors the index notation of the
//! geometry formulas so the code reads like the math.

pub type Vec1 = Vec<f64>;
pub type Mat = Vec<Vec<f64>>;
pub type T3 = Vec<Vec<Vec<f64>>>;
pub type T4 = Vec<Vec<Vec<Vec<f64>>>>;

pub fn vec1(n: usize, mut f: impl FnMut(usize) -> f64) -> Vec1 {
    (0..n).map(&mut f).collect()
}

pub fn mat(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Mat {
    (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect()
}

pub fn t3(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> T3 {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| f(i, j, k)).collect())
                .collect()
        })
        .collect()
}

pub fn t4(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> T4 {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| (0..n).map(|l| f(i, j, k, l)).collect())
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn sum(n: usize, mut f: impl FnMut(usize) -> f64) -> f64 {
    (0..n).map(&mut f).sum()
}

pub fn sum2(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> f64 {
    sum(n, |i| sum(n, |j| f(i, j)))
}

pub fn sum3(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> f64 {
    sum(n, |i| sum(n, |j| sum(n, |k| f(i, j, k))))
}

pub fn sum4(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> f64 {
    sum(n, |i| sum(n, |j| sum(n, |k| sum(n, |l| f(i, j, k, l)))))
}

/// Inner product x^i g_ij y^j.
pub fn inner(g: &Mat, x: &[f64], y: &[f64]) -> f64 {
    let n = g.len();
    sum2(n, |i, j| x[i] * g[i][j] * y[j])
}

pub fn matvec(a: &Mat, x: &[f64]) -> Vec1 {
    let n = a.len();
    vec1(n, |i| sum(n, |j| a[i][j] * x[j]))
}

pub fn add(x: &[f64], y: &[f64]) -> Vec1 {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec1 {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn scale(x: &[f64], c: f64) -> Vec1 {
    x.iter().map(|a| a * c).collect()
}

pub fn axpy(acc: &mut [f64], c: f64, x: &[f64]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += c * b;
    }
}

pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn norm_sq(g: &Mat, x: &[f64]) -> f64 {
    inner(g, x, x)
}
