//! Closed-form scalar bounds on Bhattacharyya parameters.
//!
//! All inputs and outputs live in `[0, 1]`. Radicands that are nonnegative
//! exactly but may dip below zero in floating point (by cancellation) are
//! clamped at zero before the square root; this is sound because the exact
//! value is nonnegative on the domain.

/// Lower bound on the serial child: `f(x, y) = √(x² + y² − x²y²)`.
///
/// For two BSCs this is exact: `f(Z(BSC(p)), Z(BSC(q))) = Z(BSC(p⋆q))`.
pub fn f_serial(x: f64, y: f64) -> f64 {
    (x * x + y * y - x * x * y * y).max(0.0).sqrt()
}

/// Bhattacharyya parameter of `(BSC(p) ∥ BSC(q))` followed by a serial
/// combination with `BSC(r)`, in raw crossover coordinates.
pub fn g_tri_bsc(p: f64, q: f64, r: f64) -> f64 {
    let (pb, qb, rb) = (1.0 - p, 1.0 - q, 1.0 - r);
    let a1 = p * qb * rb + pb * q * r;
    let a2 = p * qb * r + pb * q * rb;
    let b1 = p * q * rb + pb * qb * r;
    let b2 = p * q * r + pb * qb * rb;
    2.0 * (a1 * a2).max(0.0).sqrt() + 2.0 * (b1 * b2).max(0.0).sqrt()
}

/// The same quantity in Bhattacharyya coordinates:
/// `g(x, y, z) = √(C + D) + √(C − D)` with
/// `C = ¼(x²y² + (1−x²)z² + (1−y²)z²)` and `D = ½√(1−x²)√(1−y²)·z²`.
pub fn g_tri(x: f64, y: f64, z: f64) -> f64 {
    let (c, d) = cd_pair(x, y, z);
    (c + d).max(0.0).sqrt() + (c - d).max(0.0).sqrt()
}

/// The `(C, D)` pair underlying [`g_tri`]; `C ≥ D ≥ 0` on the unit cube.
pub fn cd_pair(x: f64, y: f64, z: f64) -> (f64, f64) {
    let (x2, y2, z2) = (x * x, y * y, z * z);
    let c = 0.25 * (x2 * y2 + (1.0 - x2) * z2 + (1.0 - y2) * z2);
    let d = 0.5 * ((1.0 - x2).max(0.0) * (1.0 - y2).max(0.0)).sqrt() * z2;
    (c, d)
}

/// Closed form of `g` along the diagonal curve `(√x, √x, x)`:
/// `g(√x, √x, x) = x(1 + √(5 − 4x))/2`.
///
/// Substituting into the `(C, D)` pair gives `C = x²(3−2x)/4` and
/// `D = x²(1−x)/2`, so `√(C+D) = ½x√(5−4x)` and `√(C−D) = ½x`.
pub fn g_diag_closed(x: f64) -> f64 {
    x * (1.0 + (5.0 - 4.0 * x).max(0.0).sqrt()) / 2.0
}

/// Classic single-channel bounds at `Z(W) = x`:
/// `x√(2−x²) ≤ Z(Wˢ) ≤ 2x−x²` and `Z(Wᵖ) = x²`.
/// Returned as `(lower, upper, parallel)`.
pub fn classic_bounds(x: f64) -> (f64, f64, f64) {
    (x * (2.0 - x * x).max(0.0).sqrt(), 2.0 * x - x * x, x * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{bhattacharyya, make_bsc, parallel, serial};
    use approx::assert_abs_diff_eq;

    #[test]
    fn f_serial_examples() {
        assert_abs_diff_eq!(f_serial(0.6, 0.0), 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(f_serial(1.0, 1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f_serial(0.6, 0.8), 0.7696f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn f_serial_exact_for_bscs() {
        for (p, q) in [(0.1, 0.2), (0.05, 0.45), (0.3, 0.3), (0.0, 0.25)] {
            let a = make_bsc(p).unwrap();
            let b = make_bsc(q).unwrap();
            let z = bhattacharyya(&serial(&a, &b));
            assert_abs_diff_eq!(
                f_serial(bhattacharyya(&a), bhattacharyya(&b)),
                z,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn g_tri_bsc_matches_channel_oracle() {
        for (p, q, r) in [(0.1, 0.2, 0.3), (0.02, 0.4, 0.25), (0.5, 0.1, 0.05)] {
            let w = serial(
                &parallel(&make_bsc(p).unwrap(), &make_bsc(q).unwrap()),
                &make_bsc(r).unwrap(),
            );
            assert_abs_diff_eq!(g_tri_bsc(p, q, r), bhattacharyya(&w), epsilon = 1e-12);
        }
    }

    #[test]
    fn g_tri_degenerate_slices() {
        assert_abs_diff_eq!(g_tri_bsc(0.0, 0.0, 0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g_tri_bsc(0.1, 0.3, 0.5), 1.0, epsilon = 1e-12);
        for (x, y) in [(0.2, 0.9), (0.0, 0.5), (1.0, 0.7)] {
            assert_abs_diff_eq!(g_tri(x, y, 0.0), x * y, epsilon = 1e-15);
        }
        for z in [0.0, 0.3, 1.0] {
            assert_abs_diff_eq!(g_tri(1.0, 1.0, z), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn g_forms_agree() {
        let z = |p: f64| 2.0 * (p * (1.0 - p)).sqrt();
        for (p, q, r) in [(0.1, 0.2, 0.3), (0.45, 0.05, 0.2), (0.33, 0.33, 0.33)] {
            assert_abs_diff_eq!(
                g_tri(z(p), z(q), z(r)),
                g_tri_bsc(p, q, r),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn diagonal_closed_form_matches_g() {
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            assert_abs_diff_eq!(
                g_diag_closed(x),
                g_tri(x.sqrt(), x.sqrt(), x),
                epsilon = 1e-12
            );
        }
        assert_eq!(g_diag_closed(0.0), 0.0);
        assert_abs_diff_eq!(g_diag_closed(1.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn classic_bounds_examples() {
        assert_eq!(classic_bounds(0.0), (0.0, 0.0, 0.0));
        assert_eq!(classic_bounds(1.0), (1.0, 1.0, 1.0));
        let (lo, hi, par) = classic_bounds(0.5);
        assert_abs_diff_eq!(lo, 0.5 * 1.75f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(par, 0.25, epsilon = 1e-15);
        // The lower bound is f on the diagonal.
        for x in [0.1, 0.4, 0.9] {
            assert_abs_diff_eq!(classic_bounds(x).0, f_serial(x, x), epsilon = 1e-15);
        }
    }

    #[test]
    fn f_is_midpoint_biconvex() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        for &y in &grid {
            for i in 0..grid.len() {
                for j in (i..grid.len()).step_by(7) {
                    let (a, b) = (grid[i], grid[j]);
                    let lhs = f_serial(a, y) + f_serial(b, y);
                    let rhs = 2.0 * f_serial(0.5 * (a + b), y);
                    assert!(lhs >= rhs - 1e-12, "biconvexity fails at ({a},{b},{y})");
                }
            }
        }
    }

    #[test]
    fn diagonal_dominates_classic_lower() {
        for i in 0..=10_000 {
            let x = i as f64 / 10_000.0;
            assert!(g_tri(x.sqrt(), x.sqrt(), x) >= classic_bounds(x).0 - 1e-12);
        }
    }
}
