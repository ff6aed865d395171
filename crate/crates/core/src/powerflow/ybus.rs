//! Bus admittance matrix from series branch impedances.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::network::Branch;
use super::PowerFlowError;

/// `Y = G + jB`, dense, indexed by `bus id - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct YBus {
    pub n: usize,
    pub g: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl YBus {
    pub fn entry(&self, i: usize, k: usize) -> Complex64 {
        Complex64::new(self.g[(i, k)], self.b[(i, k)])
    }

    pub fn rows(matrix: &DMatrix<f64>) -> Vec<Vec<f64>> {
        matrix.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

/// Parallel branches are summed; there are no shunt terms.
pub fn build_ybus(branches: &[Branch], n: usize) -> Result<YBus, PowerFlowError> {
    let mut g = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    for (idx, br) in branches.iter().enumerate() {
        if br.from == 0 || br.from > n || br.to == 0 || br.to > n {
            return Err(PowerFlowError::BusIndex { branch: idx, from: br.from, to: br.to, n });
        }
        if br.from == br.to || (br.r == 0.0 && br.x == 0.0) || !(br.r.is_finite() && br.x.is_finite()) {
            return Err(PowerFlowError::BadBranch(idx));
        }
        let y = series_admittance(br);
        let (f, t) = (br.from - 1, br.to - 1);
        for (i, k, sign) in [(f, f, 1.0), (t, t, 1.0), (f, t, -1.0), (t, f, -1.0)] {
            g[(i, k)] += sign * y.re;
            b[(i, k)] += sign * y.im;
        }
    }
    Ok(YBus { n, g, b })
}

/// `1 / (r + jx)` by Smith's division, which keeps decimal-friendly inputs
/// such as `0.1 + j0.2` exact where `r^2 + x^2` would not be.
pub fn series_admittance(br: &Branch) -> Complex64 {
    let (r, x) = (br.r, br.x);
    if x.abs() >= r.abs() {
        let e = r / x;
        let d = x + r * e;
        Complex64::new(e / d, -1.0 / d)
    } else {
        let e = x / r;
        let d = r + x * e;
        Complex64::new(1.0 / d, -e / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powerflow::network::examples::three_bus;

    #[test]
    fn three_branch_matrices_are_exact() {
        let y = build_ybus(&three_bus().branches, 3).unwrap();
        assert_eq!(YBus::rows(&y.g), vec![vec![2.0, 0.0, -2.0], vec![0.0, 0.0, 0.0], vec![-2.0, 0.0, 2.0]]);
        assert_eq!(
            YBus::rows(&y.b),
            vec![vec![-9.0, 5.0, 4.0], vec![5.0, -15.0, 10.0], vec![4.0, 10.0, -14.0]]
        );
    }

    #[test]
    fn single_unit_reactance() {
        let y = build_ybus(&[Branch { from: 1, to: 2, r: 0.0, x: 1.0 }], 2).unwrap();
        assert_eq!(y.entry(0, 0), Complex64::new(0.0, -1.0));
        assert_eq!(y.entry(0, 1), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn parallel_branches_add() {
        let br = Branch { from: 1, to: 2, r: 0.0, x: 0.2 };
        let y = build_ybus(&[br, br], 2).unwrap();
        assert_eq!(y.b[(0, 1)], 10.0);
    }

    #[test]
    fn rejects_bad_indices() {
        let br = Branch { from: 1, to: 3, r: 0.0, x: 0.2 };
        assert!(matches!(build_ybus(&[br], 2), Err(PowerFlowError::BusIndex { .. })));
        let br = Branch { from: 1, to: 2, r: 0.0, x: 0.0 };
        assert!(matches!(build_ybus(&[br], 2), Err(PowerFlowError::BadBranch(0))));
    }
}
