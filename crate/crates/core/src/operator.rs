//! Linear maps on an algebra, as dense transfer matrices.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::algebra::{Algebra, Element, C64};
use crate::error::{Error, Result};

/// Anything that acts linearly on the elements of a fixed algebra.
pub trait LinearMap {
    fn algebra(&self) -> &Arc<Algebra>;
    fn apply(&self, x: &Element) -> Element;

    /// Matrix of the map in the basis of matrix units (column `c` holds the
    /// coordinates of `T(e_c)`).
    fn transfer_matrix(&self) -> DMatrix<C64> {
        let alg = self.algebra();
        let dim = alg.coord_dim();
        let mut m = DMatrix::zeros(dim, dim);
        for c in 0..dim {
            let (b, i, j) = alg.decode_coord(c);
            let image = self.apply(&Element::matrix_unit(alg, b, i, j)).to_flat();
            for (r, v) in image.into_iter().enumerate() {
                m[(r, c)] = v;
            }
        }
        m
    }
}

/// A linear map stored as its transfer matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    algebra: Arc<Algebra>,
    matrix: DMatrix<C64>,
}

impl LinearOperator {
    pub fn new(algebra: &Arc<Algebra>, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = algebra.coord_dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Structural(format!(
                "transfer matrix is {}x{}, algebra needs {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Numeric("transfer matrix has non-finite entries".into()));
        }
        Ok(LinearOperator {
            algebra: algebra.clone(),
            matrix,
        })
    }

    pub fn from_map(map: &impl LinearMap) -> Self {
        LinearOperator {
            algebra: map.algebra().clone(),
            matrix: map.transfer_matrix(),
        }
    }

    pub fn identity(algebra: &Arc<Algebra>) -> Self {
        let d = algebra.coord_dim();
        LinearOperator {
            algebra: algebra.clone(),
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn zero(algebra: &Arc<Algebra>) -> Self {
        let d = algebra.coord_dim();
        LinearOperator {
            algebra: algebra.clone(),
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearOperator) -> Result<LinearOperator> {
        if *self.algebra != *other.algebra {
            return Err(Error::Structural("operators act on different algebras".into()));
        }
        Ok(LinearOperator {
            algebra: self.algebra.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `max |(P² − P)_{ij}|`.
    pub fn idempotency_defect(&self) -> f64 {
        let sq = &self.matrix * &self.matrix;
        (sq - &self.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise difference to another operator.
    pub fn max_abs_diff(&self, other: &LinearOperator) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl LinearMap for LinearOperator {
    fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    fn apply(&self, x: &Element) -> Element {
        let v = DVector::from_vec(x.to_flat());
        let y: Vec<C64> = (&self.matrix * v).iter().copied().collect();
        Element::from_flat(&self.algebra, &y).expect("transfer matrix matches algebra")
    }

    fn transfer_matrix(&self) -> DMatrix<C64> {
        self.matrix.clone()
    }
}
