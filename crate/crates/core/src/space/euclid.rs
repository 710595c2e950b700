//! Flat vector geometry shared by the Euclidean and truncated ℓ₂ spaces.

pub(crate) fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `x + t (y - x)`, clamped coordinate-wise into the bounding box of `x` and
/// `y` so convex sets stay closed under interpolation despite rounding.
pub(crate) fn lerp(x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| {
            let v = a + t * (b - a);
            v.clamp(a.min(b), a.max(b))
        })
        .collect()
}

/// Angle between `y - apex` and `z - apex`, via atan2 for accuracy near 0 and π.
pub(crate) fn angle(apex: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let u: Vec<f64> = y.iter().zip(apex).map(|(a, b)| a - b).collect();
    let v: Vec<f64> = z.iter().zip(apex).map(|(a, b)| a - b).collect();
    let d = dot(&u, &v);
    // |u|²|v|² - (u·v)² is the squared norm of the wedge product.
    let cross2 = (dot(&u, &u) * dot(&v, &v) - d * d).max(0.0);
    cross2.sqrt().atan2(d)
}

/// Foot of `p` on `[x, y]` as the interpolation parameter in `[0, 1]`.
pub(crate) fn project_param(p: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let dir: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let len2 = dot(&dir, &dir);
    if len2 == 0.0 {
        return 0.0;
    }
    let rel: Vec<f64> = p.iter().zip(x).map(|(a, b)| a - b).collect();
    (dot(&rel, &dir) / len2).clamp(0.0, 1.0)
}

/// Unit vector orthogonal to `dir`: the quarter turn in the plane, otherwise
/// the direction in the plane of `dir` and its least aligned coordinate axis.
/// `None` in dimension 1.
pub(crate) fn orthogonal_unit(dir: &[f64]) -> Option<Vec<f64>> {
    if dir.len() < 2 {
        return None;
    }
    let n = norm(dir);
    if n == 0.0 {
        return None;
    }
    let u: Vec<f64> = dir.iter().map(|a| a / n).collect();
    if u.len() == 2 {
        return Some(vec![-u[1], u[0]]);
    }
    let (axis, _) = u
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, a)| {
            if a.abs() < best.1 {
                (i, a.abs())
            } else {
                best
            }
        });
    let mut w = vec![0.0; u.len()];
    w[axis] = 1.0;
    let proj = dot(&w, &u);
    for (wi, ui) in w.iter_mut().zip(&u) {
        *wi -= proj * ui;
    }
    let wn = norm(&w);
    Some(w.into_iter().map(|a| a / wn).collect())
}
