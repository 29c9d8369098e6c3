//! Smallest Dirichlet eigenvalue of the Laplacian on a ball.
//!
//! Functions are supported on `|g| <= R-1` and vanish on the boundary sphere
//! and beyond. Because nodes are stored in BFS order, that support is a prefix
//! of the node array.

use crate::cayley::{apply_laplacian, Ball};
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct DirichletResult {
    pub radius: usize,
    pub value: f64,
    /// Unit-norm minimizer, indexed like the ball (zero on the boundary).
    pub vector: Vec<f64>,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn support_len(ball: &Ball) -> usize {
    ball.nodes().partition_point(|n| n.norm < ball.radius())
}

/// `⟨Δh, h⟩ / ⟨h, h⟩` for `h` vanishing on the boundary sphere.
pub fn rayleigh_quotient(h: &[f64], ball: &Ball) -> Result<f64> {
    if h.len() != ball.len() {
        return Err(Error::InvalidArgument(format!(
            "function has {} values for a ball of {} nodes",
            h.len(),
            ball.len()
        )));
    }
    let inner = support_len(ball);
    if h[inner..].iter().any(|&x| x != 0.0) {
        return Err(Error::InvalidArgument(
            "function must vanish on the boundary sphere".into(),
        ));
    }
    let norm2 = dot(h, h);
    if norm2 == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let lap = apply_laplacian(h, ball)?;
    Ok(dot(&lap, h) / norm2)
}

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi
/// rotations. Returns the smallest eigenvalue and its unit eigenvector.
fn smallest_eigenpair(mut a: Vec<Vec<f64>>) -> (f64, Vec<f64>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (rp, rq) = (a[p].clone(), a[q].clone());
                for (k, (apk, aqk)) in rp.into_iter().zip(rq).enumerate() {
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let k = (0..n)
        .min_by(|&i, &j| a[i][i].total_cmp(&a[j][j]))
        .expect("non-empty matrix");
    (a[k][k], v.iter().map(|row| row[k]).collect())
}

/// Minimizes the Rayleigh quotient over functions supported on `|g| <= R-1`.
///
/// Each step minimizes exactly over the span of the current iterate, its
/// residual (the gradient direction) and the previous step, via a small
/// Rayleigh–Ritz problem. Stops when the quotient changes by at most
/// `tolerance` and the residual norm is at most `sqrt(tolerance)`.
pub fn dirichlet_upper_bound(ball: &Ball, tolerance: f64) -> Result<DirichletResult> {
    if ball.radius() < 2 {
        return Err(Error::InsufficientRadius {
            radius: ball.radius(),
            required: 2,
        });
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance {tolerance}")));
    }
    let m = support_len(ball);
    let n = ball.len();
    let apply = |x: &[f64]| -> Vec<f64> {
        let mut full = vec![0.0; n];
        full[..m].copy_from_slice(x);
        let mut y = apply_laplacian(&full, ball).expect("sized to ball");
        y.truncate(m);
        y
    };
    let normalize = |x: &mut Vec<f64>| {
        let s = dot(x, x).sqrt();
        x.iter_mut().for_each(|v| *v /= s);
    };

    // The ground state is positive, so the constant start has full overlap.
    let mut x = vec![1.0; m];
    normalize(&mut x);
    let mut ax = apply(&x);
    let mut lambda = dot(&ax, &x);
    let mut prev: Option<Vec<f64>> = None;

    for iteration in 0..MAX_ITERATIONS {
        let residual: Vec<f64> = ax.iter().zip(&x).map(|(a, v)| a - lambda * v).collect();
        let res_norm = dot(&residual, &residual).sqrt();

        // Orthonormal basis of span{x, r, p}; nearly dependent directions
        // are dropped.
        let mut basis: Vec<Vec<f64>> = vec![x.clone()];
        for cand in std::iter::once(residual).chain(prev.take()) {
            let mut c = cand;
            for _ in 0..2 {
                for b in &basis {
                    let proj = dot(&c, b);
                    c.iter_mut().zip(b).for_each(|(ci, bi)| *ci -= proj * bi);
                }
            }
            let len = dot(&c, &c).sqrt();
            if len > 1e-12 {
                c.iter_mut().for_each(|v| *v /= len);
                basis.push(c);
            }
        }
        let images: Vec<Vec<f64>> = basis.iter().map(|b| apply(b)).collect();
        let k = basis.len();
        let proj: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| dot(&basis[i], &images[j])).collect())
            .collect();
        let (_, y) = smallest_eigenpair(proj);

        let mut next = vec![0.0; m];
        let mut next_image = vec![0.0; m];
        let mut step = vec![0.0; m];
        for (idx, coef) in y.iter().enumerate() {
            for t in 0..m {
                next[t] += coef * basis[idx][t];
                next_image[t] += coef * images[idx][t];
                if idx > 0 {
                    step[t] += coef * basis[idx][t];
                }
            }
        }
        let s = dot(&next, &next).sqrt();
        next.iter_mut().for_each(|v| *v /= s);
        next_image.iter_mut().for_each(|v| *v /= s);
        // Keep the iterate positive-leaning so the sign is reproducible.
        if next.iter().sum::<f64>() < 0.0 {
            next.iter_mut().for_each(|v| *v = -*v);
            next_image.iter_mut().for_each(|v| *v = -*v);
        }
        let new_lambda = dot(&next_image, &next);
        let change = (lambda - new_lambda).abs();
        x = next;
        ax = next_image;
        lambda = new_lambda;
        prev = (dot(&step, &step) > 0.0).then_some(step);
        if change <= tolerance && res_norm <= tolerance.sqrt() {
            // Refresh with an exact product to avoid accumulated drift.
            ax = apply(&x);
            lambda = dot(&ax, &x);
            return Ok(finish(ball, lambda, x, iteration + 1));
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
    })
}

fn finish(ball: &Ball, value: f64, x: Vec<f64>, iterations: usize) -> DirichletResult {
    let mut vector = x;
    vector.resize(ball.len(), 0.0);
    DirichletResult {
        radius: ball.radius(),
        value,
        vector,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::build_ball;

    #[test]
    fn jacobi_small() {
        let (val, vec) = smallest_eigenpair(vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 0.0],
            vec![0.0, 0.0, 5.0],
        ]);
        assert!((val - 1.0).abs() < 1e-14);
        assert!((vec[0].abs() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(vec[2].abs() < 1e-12);
    }

    #[test]
    fn quotient_examples() {
        let ball = build_ball(3).unwrap();
        let mut delta = vec![0.0; ball.len()];
        delta[0] = 1.0;
        assert_eq!(rayleigh_quotient(&delta, &ball).unwrap(), 3.0);
        let inner: Vec<f64> = ball
            .nodes()
            .iter()
            .map(|n| if n.norm < 3 { 1.0 } else { 0.0 })
            .collect();
        // 12 edges leave the 10-node support.
        assert!((rayleigh_quotient(&inner, &ball).unwrap() - 1.2).abs() < 1e-15);
        assert!(matches!(
            rayleigh_quotient(&vec![0.0; ball.len()], &ball),
            Err(Error::ZeroFunction)
        ));
        assert!(rayleigh_quotient(&vec![1.0; ball.len()], &ball).is_err());
    }

    #[test]
    fn star_value() {
        let ball = build_ball(2).unwrap();
        let res = dirichlet_upper_bound(&ball, 1e-12).unwrap();
        assert!((res.value - (3.0 - 3f64.sqrt())).abs() < 1e-10);
        let q = rayleigh_quotient(&res.vector, &ball).unwrap();
        assert!((q - res.value).abs() < 1e-10);
    }

    #[test]
    fn rejects_small_radius() {
        assert!(dirichlet_upper_bound(&build_ball(1).unwrap(), 1e-10).is_err());
        assert!(dirichlet_upper_bound(&build_ball(3).unwrap(), 0.0).is_err());
    }
}
