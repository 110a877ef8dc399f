//! Plain-slice vector math.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(a, b) / (na * nb)
}

/// Column-wise sum.
pub fn sum(vectors: &[&[f64]], dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|d| vectors.iter().map(|v| v[d]).sum())
        .collect()
}

/// Column-wise mean; zeros for no vectors.
pub fn mean(vectors: &[&[f64]], dim: usize) -> Vec<f64> {
    if vectors.is_empty() {
        return vec![0.0; dim];
    }
    sum(vectors, dim)
        .into_iter()
        .map(|x| x / vectors.len() as f64)
        .collect()
}

pub fn approx_eq(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}
