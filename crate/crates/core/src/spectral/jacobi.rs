//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use crate::error::{Error, Result};
use crate::matrix::Mat;

const MAX_SWEEPS: usize = 100;
const REL_TOL: f64 = 1e-12;

/// Eigenvalues and orthonormal eigenvectors (as columns of `vectors`).
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

fn off_norm(a: &Mat) -> f64 {
    let n = a.order();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Diagonalises a symmetric matrix. Converges when the off-diagonal
/// Frobenius norm drops below `1e-12 * ||M||_F`.
pub fn symmetric_eigen(m: &Mat) -> Result<Eigen> {
    let n = m.order();
    let mut a = m.clone();
    let mut v = Mat::identity(n);
    let target = REL_TOL * m.frobenius();
    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target || n < 2 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, order: n, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        let nrp = arp - s * (arq + tau * arp);
                        let nrq = arq + s * (arp - tau * arq);
                        a[(r, p)] = nrp;
                        a[(p, r)] = nrp;
                        a[(r, q)] = nrq;
                        a[(q, r)] = nrq;
                    }
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp - s * (vrq + tau * vrp);
                    v[(r, q)] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    Ok(Eigen { values: (0..n).map(|i| a[(i, i)]).collect(), vectors: v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalises_small_matrix() {
        let m = Mat::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 1.0], vec![0.0, 1.0, 2.0]]);
        let e = symmetric_eigen(&m).unwrap();
        let mut vals = e.values.clone();
        vals.sort_by(f64::total_cmp);
        let r2 = 2f64.sqrt();
        for (got, want) in vals.iter().zip([2.0 - r2, 2.0, 2.0 + r2]) {
            assert!((got - want).abs() < 1e-12);
        }
        for j in 0..3 {
            let col = e.vectors.column(j);
            let mv = m.apply(&col);
            for i in 0..3 {
                assert!((mv[i] - e.values[j] * col[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_and_one_by_one() {
        let e = symmetric_eigen(&Mat::zeros(3)).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
        let e = symmetric_eigen(&Mat::from_rows(&[vec![5.0]])).unwrap();
        assert_eq!(e.values, vec![5.0]);
    }
}
