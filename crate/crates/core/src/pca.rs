//! Principal-component enhancement of color images.
//!
//! Each pixel's RGB triple is one observation. The covariance uses the
//! population divisor `1/b`. Projecting the mean-adjusted pixels onto the
//! leading eigenvector gives a scalar channel with the largest color
//! contrast, which feeds the gradient stage.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::image::{GrayImage, RasterImage};
use crate::par;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;
const SYMMETRY_TOL: f64 = 1e-9;
/// Pixels per partial sum in the mean/covariance reductions.
const REDUCE_CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    pub mean: Vec3,
    pub cov: Mat3,
    /// Descending.
    pub eigvals: Vec3,
    /// Column `k` (i.e. `eigvecs[r][k]` over `r`) is the axis for `eigvals[k]`.
    pub eigvecs: Mat3,
    pub observations: usize,
}

impl PcaModel {
    pub fn axis(&self, k: usize) -> Vec3 {
        [self.eigvecs[0][k], self.eigvecs[1][k], self.eigvecs[2][k]]
    }
}

fn max_off_diagonal(a: &Mat3) -> f64 {
    a[0][1].abs().max(a[0][2].abs()).max(a[1][2].abs())
}

/// Cyclic Jacobi eigendecomposition of a symmetric 3×3 matrix.
///
/// Eigenvalues come back in descending order with eigenvectors as columns.
/// Each eigenvector is signed so its largest-magnitude component (first one
/// on ties) is positive.
pub fn jacobi_eig(a: &Mat3) -> Result<(Vec3, Mat3)> {
    for i in 0..3 {
        for j in 0..3 {
            if !a[i][j].is_finite() {
                return Err(Error::invalid("matrix has non-finite entries"));
            }
            if (a[i][j] - a[j][i]).abs() > SYMMETRY_TOL {
                return Err(Error::invalid("matrix is not symmetric"));
            }
        }
    }
    let mut m = *a;
    // symmetrize so rounding in the input cannot drift the two halves apart
    for i in 0..3 {
        for j in (i + 1)..3 {
            let s = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = s;
            m[j][i] = s;
        }
    }
    let scale = m.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs()));
    let tol = JACOBI_TOL * scale.max(1.0);
    let mut v: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    let mut converged = max_off_diagonal(&m) <= tol;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = m[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;

            let r = 3 - p - q;
            let (arp, arq) = (m[r][p], m[r][q]);
            m[r][p] = c * arp - s * arq;
            m[p][r] = m[r][p];
            m[r][q] = s * arp + c * arq;
            m[q][r] = m[r][q];
            m[p][p] -= t * apq;
            m[q][q] += t * apq;
            m[p][q] = 0.0;
            m[q][p] = 0.0;

            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
        sweeps += 1;
        converged = max_off_diagonal(&m) <= tol;
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));
    let eigvals = order.map(|k| m[k][k]);
    let mut vecs = [[0.0; 3]; 3];
    for (dst, &src) in order.iter().enumerate() {
        let mut col = [v[0][src], v[1][src], v[2][src]];
        let mut lead = 0;
        for i in 1..3 {
            if col[i].abs() > col[lead].abs() {
                lead = i;
            }
        }
        if col[lead] < 0.0 {
            col.iter_mut().for_each(|c| *c = -*c);
        }
        for r in 0..3 {
            vecs[r][dst] = col[r];
        }
    }
    Ok((eigvals, vecs))
}

fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Chunked sums combined in chunk order, so the result does not depend on
/// how many threads computed the chunks.
fn chunked_sum<T, F>(n: usize, zero: T, add: fn(T, T) -> T, term: F) -> T
where
    T: Copy + Send + Sync,
    F: Fn(usize) -> T + Sync + Send,
{
    let chunks = n.div_ceil(REDUCE_CHUNK);
    let partials = par::map_indices(chunks, |c| {
        let start = c * REDUCE_CHUNK;
        let end = (start + REDUCE_CHUNK).min(n);
        (start..end).fold(zero, |acc, i| add(acc, term(i)))
    });
    partials.into_iter().fold(zero, add)
}

pub fn fit_pca(img: &RasterImage) -> Result<PcaModel> {
    if img.channels() != 3 {
        return Err(Error::invalid("PCA needs a 3-channel image"));
    }
    let b = img.pixel_count();
    if b < 2 {
        return Err(Error::invalid("PCA needs at least two pixels"));
    }
    let inv_b = 1.0 / b as f64;
    // offsets from the first pixel keep a constant image's mean exact
    let origin = img.rgb(0);
    let shift = chunked_sum(b, [0.0; 3], add3, |i| {
        let p = img.rgb(i);
        [p[0] - origin[0], p[1] - origin[1], p[2] - origin[2]]
    });
    let mean = [
        origin[0] + shift[0] * inv_b,
        origin[1] + shift[1] * inv_b,
        origin[2] + shift[2] * inv_b,
    ];

    // upper triangle: xx, xy, xz, yy, yz, zz
    fn add6(a: [f64; 6], b: [f64; 6]) -> [f64; 6] {
        std::array::from_fn(|k| a[k] + b[k])
    }
    let s = chunked_sum(b, [0.0; 6], add6, |i| {
        let p = img.rgb(i);
        let d = [p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]];
        [d[0] * d[0], d[0] * d[1], d[0] * d[2], d[1] * d[1], d[1] * d[2], d[2] * d[2]]
    });
    let s = s.map(|v| v * inv_b);
    let cov = [[s[0], s[1], s[2]], [s[1], s[3], s[4]], [s[2], s[4], s[5]]];
    let (eigvals, eigvecs) = jacobi_eig(&cov)?;
    Ok(PcaModel {
        mean,
        cov,
        eigvals,
        eigvecs,
        observations: b,
    })
}

/// Coefficients on the first `k` principal axes plus the rank-`k`
/// reconstruction `Y_k Y_kᵀ (p − mean) + mean`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub coefficients: Vec<GrayImage>,
    pub reconstruction: RasterImage,
}

impl Projection {
    /// The leading coefficient channel.
    pub fn principal(&self) -> &GrayImage {
        &self.coefficients[0]
    }
}

pub fn project(img: &RasterImage, model: &PcaModel, k: usize) -> Result<Projection> {
    if !(1..=3).contains(&k) {
        return Err(Error::invalid(format!("projection rank {k} outside 1..=3")));
    }
    if img.channels() != 3 {
        return Err(Error::invalid("projection needs a 3-channel image"));
    }
    let axes: Vec<Vec3> = (0..k).map(|c| model.axis(c)).collect();
    let n = img.pixel_count();
    let per_pixel = par::map_indices(n, |i| {
        let p = img.rgb(i);
        let d = [p[0] - model.mean[0], p[1] - model.mean[1], p[2] - model.mean[2]];
        let mut coeffs = [0.0; 3];
        let mut rec = model.mean;
        for (c, axis) in axes.iter().enumerate() {
            let t = axis[0] * d[0] + axis[1] * d[1] + axis[2] * d[2];
            coeffs[c] = t;
            for r in 0..3 {
                rec[r] += axis[r] * t;
            }
        }
        (coeffs, rec)
    });
    let coefficients = (0..k)
        .map(|c| {
            Grid::from_vec(
                img.width(),
                img.height(),
                per_pixel.iter().map(|(co, _)| co[c]).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let samples = per_pixel.iter().flat_map(|(_, rec)| *rec).collect();
    let reconstruction = RasterImage::new(img.width(), img.height(), 3, samples)?;
    Ok(Projection {
        coefficients,
        reconstruction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_pixels(pixels: &[Vec3]) -> RasterImage {
        RasterImage::new(pixels.len(), 1, 3, pixels.iter().flatten().copied().collect()).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn two_observations() {
        let img = from_pixels(&[[0.0; 3], [2.0; 3]]);
        let m = fit_pca(&img).unwrap();
        assert_eq!(m.mean, [1.0; 3]);
        for row in m.cov {
            for v in row {
                assert_close(v, 1.0, 1e-15);
            }
        }
        assert_close(m.eigvals[0], 3.0, 1e-12);
        assert_close(m.eigvals[1], 0.0, 1e-12);
        assert_close(m.eigvals[2], 0.0, 1e-12);
        let c = 1.0 / 3f64.sqrt();
        for v in m.axis(0) {
            assert_close(v, c, 1e-12);
        }

        let p = project(&img, &m, 1).unwrap();
        assert_close(*p.principal().get(1, 0), 3f64.sqrt(), 1e-12);
        for v in p.reconstruction.pixel(1, 0) {
            assert_close(*v, 2.0, 1e-12);
        }
    }

    #[test]
    fn constant_image() {
        let img = from_pixels(&[[0.3, 0.6, 0.1]; 5]);
        let m = fit_pca(&img).unwrap();
        assert_eq!(m.cov, [[0.0; 3]; 3]);
        assert_eq!(m.eigvals, [0.0; 3]);
        for k in 1..=3 {
            let p = project(&img, &m, k).unwrap();
            assert!(p.coefficients.iter().all(|c| c.iter().all(|&v| v == 0.0)));
        }
    }

    #[test]
    fn primary_colors() {
        let img = from_pixels(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let m = fit_pca(&img).unwrap();
        for i in 0..3 {
            assert_close(m.mean[i], 1.0 / 3.0, 1e-15);
            for j in 0..3 {
                let want = if i == j { 2.0 / 9.0 } else { -1.0 / 9.0 };
                assert_close(m.cov[i][j], want, 1e-15);
            }
        }
    }

    #[test]
    fn single_pixel_rejected() {
        assert!(fit_pca(&from_pixels(&[[0.0; 3]])).is_err());
    }

    #[test]
    fn jacobi_diagonal() {
        let (vals, vecs) = jacobi_eig(&[[5.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 9.0]]).unwrap();
        assert_eq!(vals, [9.0, 5.0, 2.0]);
        assert_eq!(vecs, [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]);
    }

    #[test]
    fn jacobi_block() {
        let (vals, vecs) = jacobi_eig(&[[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert_close(vals[0], 3.0, 1e-12);
        assert_close(vals[1], 1.0, 1e-12);
        assert_close(vals[2], 1.0, 1e-12);
        let h = 1.0 / 2f64.sqrt();
        assert_close(vecs[0][0], h, 1e-12);
        assert_close(vecs[1][0], h, 1e-12);
        assert_close(vecs[2][0], 0.0, 1e-12);
    }

    #[test]
    fn jacobi_all_ones() {
        let (vals, vecs) = jacobi_eig(&[[1.0; 3]; 3]).unwrap();
        assert_close(vals[0], 3.0, 1e-12);
        assert_close(vals[1], 0.0, 1e-12);
        assert_close(vals[2], 0.0, 1e-12);
        for r in 0..3 {
            assert_close(vecs[r][0], 1.0 / 3f64.sqrt(), 1e-12);
        }
    }

    #[test]
    fn jacobi_rejects_asymmetric() {
        let err = jacobi_eig(&[[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn projection_rank_checked() {
        let img = from_pixels(&[[0.0; 3], [1.0; 3]]);
        let m = fit_pca(&img).unwrap();
        assert!(project(&img, &m, 0).is_err());
        assert!(project(&img, &m, 4).is_err());
    }

    fn sym_matrix() -> impl Strategy<Value = Mat3> {
        prop::array::uniform6(-10.0..10.0f64).prop_map(|e| {
            [[e[0], e[1], e[2]], [e[1], e[3], e[4]], [e[2], e[4], e[5]]]
        })
    }

    proptest! {
        #[test]
        fn eigen_properties(a in sym_matrix()) {
            let (vals, vecs) = jacobi_eig(&a).unwrap();
            prop_assert!(vals[0] >= vals[1] && vals[1] >= vals[2]);
            let trace = a[0][0] + a[1][1] + a[2][2];
            prop_assert!((vals.iter().sum::<f64>() - trace).abs() <= 1e-9);
            for i in 0..3 {
                for j in 0..3 {
                    let dot: f64 = (0..3).map(|r| vecs[r][i] * vecs[r][j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((dot - want).abs() <= 1e-9);
                }
            }
            for k in 0..3 {
                for r in 0..3 {
                    let av: f64 = (0..3).map(|c| a[r][c] * vecs[c][k]).sum();
                    prop_assert!((av - vals[k] * vecs[r][k]).abs() <= 1e-8 * (1.0 + vals[k].abs()));
                }
            }
        }

        #[test]
        fn projection_is_idempotent(px in prop::collection::vec(prop::array::uniform3(0.0..1.0f64), 4..20), k in 1usize..=3) {
            let img = from_pixels(&px);
            let m = fit_pca(&img).unwrap();
            let once = project(&img, &m, k).unwrap().reconstruction;
            let twice = project(&once, &m, k).unwrap().reconstruction;
            for (a, b) in once.samples().iter().zip(twice.samples()) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
            if k == 3 {
                for (a, b) in once.samples().iter().zip(img.samples()) {
                    prop_assert!((a - b).abs() <= 1e-9);
                }
            }
        }
    }
}
