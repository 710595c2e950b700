use super::Curve;
use crate::error::{invalid, Result};
use crate::space::{Point, Space};

/// Breakpoints `a_k = Σ_{n=1}^k baseⁿ` for `k = 0..=dim`.
pub fn l2_breakpoints(dim: usize, base: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(dim + 1);
    let mut a = 0.0;
    let mut p = 1.0;
    out.push(0.0);
    for _ in 0..dim {
        p *= base;
        a += p;
        out.push(a);
    }
    out
}

/// Corner `x^k`: `x^k_n = baseⁿ` for `n ≤ k`, zero beyond.
pub fn l2_corner(dim: usize, base: f64, k: usize) -> Vec<f64> {
    let mut p = 1.0;
    (1..=dim)
        .map(|n| {
            p *= base;
            if n <= k {
                p
            } else {
                0.0
            }
        })
        .collect()
}

/// The unit-speed polygonal curve through the corners `x⁰, x¹, …, x^dim` of
/// the ℓ₂ box, with `γ(a_k) = x^k`. Each piece moves only coordinate `k+1`,
/// from 0 to `base^{k+1}`. `refinement` extra samples are placed evenly
/// inside every piece.
pub fn l2_example_curve(dim: usize, base: f64, refinement: usize) -> Result<Curve> {
    let space = Space::l2box(dim, base)?;
    if dim == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let a = l2_breakpoints(dim, base);
    let mut samples = Vec::with_capacity(dim * (refinement + 1) + 1);
    samples.push((0.0, Point::L2Box(vec![0.0; dim])));
    for k in 0..dim {
        let corner = l2_corner(dim, base, k);
        let len = a[k + 1] - a[k];
        for j in 1..=refinement + 1 {
            let (t, c) = if j == refinement + 1 {
                (a[k + 1], len)
            } else {
                let c = len * j as f64 / (refinement + 1) as f64;
                (a[k] + c, c)
            };
            let mut x = corner.clone();
            x[k] = c.min(len);
            samples.push((t, Point::L2Box(x)));
        }
    }
    Curve::new(space, samples)
}
