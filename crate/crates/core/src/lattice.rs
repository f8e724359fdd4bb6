//! Free Z-modules with integral symmetric bilinear forms.
//!
//! The Gram matrix is the whole story: pairing evaluation, saturated
//! orthogonal complements, direct sums, discriminants, and isometry checks
//! of explicit linear maps all reduce to exact matrix arithmetic. Degenerate
//! Gram matrices are legal — the curve-pairing tables of a resolution ledger
//! are not forms, and `discriminant` simply reports 0 there.

use crate::exactalg::{saturate, Matrix};
use crate::{int, Error, ExactMatrix, Int, Result};

/// Free Z-module of finite rank with a symmetric integer Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralLattice {
    gram: ExactMatrix,
    basis_labels: Vec<String>,
}

/// Linear map between lattices; columns of `matrix` are the images of the
/// source basis vectors in target coordinates.
#[derive(Debug, Clone)]
pub struct LatticeMap {
    pub source: IntegralLattice,
    pub target: IntegralLattice,
    pub matrix: ExactMatrix,
}

/// Basis of a sublattice together with the Gram matrix restricted to it.
/// Basis vectors are rows, in the coordinates of the ambient lattice.
#[derive(Debug, Clone)]
pub struct Sublattice {
    pub basis: Vec<Vec<Int>>,
    pub gram: ExactMatrix,
}

/// Outcome of an isometry check; on failure carries the first basis pair at
/// which the two forms disagree, with both values.
#[derive(Debug, Clone)]
pub struct IsometryCheck {
    pub is_isometry: bool,
    pub witness: Option<IsometryWitness>,
}

#[derive(Debug, Clone)]
pub struct IsometryWitness {
    pub i: usize,
    pub j: usize,
    pub source_value: Int,
    pub mapped_value: Int,
}

impl IntegralLattice {
    pub fn new(gram: ExactMatrix, basis_labels: Vec<String>) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::NonSquare {
                rows: gram.rows(),
                cols: gram.cols(),
            });
        }
        if !gram.is_symmetric() {
            return Err(Error::Model("Gram matrix is not symmetric".into()));
        }
        if basis_labels.len() != gram.rows() {
            return Err(Error::Dimension(format!(
                "{} labels for rank {}",
                basis_labels.len(),
                gram.rows()
            )));
        }
        Ok(IntegralLattice { gram, basis_labels })
    }

    /// Rank-n lattice with the given Gram matrix and labels e1, e2, ...
    pub fn from_gram(gram: ExactMatrix) -> Result<Self> {
        let labels = (1..=gram.rows()).map(|i| format!("e{i}")).collect();
        Self::new(gram, labels)
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &ExactMatrix {
        &self.gram
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    /// `x^T · gram · y`.
    pub fn pair(&self, x: &[Int], y: &[Int]) -> Result<Int> {
        self.gram.bilinear(x, y)
    }

    /// Saturated basis of `{x : pair(x, v) = 0 for all v}` with the
    /// restricted Gram matrix. The complement of the empty set is the whole
    /// lattice; the complement of a unimodular lattice's full basis is zero.
    pub fn orthogonal_complement(&self, vectors: &[Vec<Int>]) -> Result<Sublattice> {
        for v in vectors {
            if v.len() != self.rank() {
                return Err(Error::Dimension(format!(
                    "vector of length {} in rank-{} lattice",
                    v.len(),
                    self.rank()
                )));
            }
        }
        // Row i of the constraint matrix is (gram · v_i)^T; its kernel is
        // automatically saturated.
        let constraints = Matrix::from_fn(vectors.len(), self.rank(), |i, j| {
            (0..self.rank()).fold(int(0), |acc, k| acc + self.gram.at(j, k) * &vectors[i][k])
        });
        let basis = constraints.kernel_basis();
        let gram = self.restrict_gram(&basis)?;
        Ok(Sublattice { basis, gram })
    }

    /// Gram matrix of the pairing restricted to the given vectors.
    pub fn restrict_gram(&self, vectors: &[Vec<Int>]) -> Result<ExactMatrix> {
        if vectors.is_empty() {
            return Ok(Matrix::zero(0, 0));
        }
        let mut entries = Vec::with_capacity(vectors.len());
        for x in vectors {
            let mut row = Vec::with_capacity(vectors.len());
            for y in vectors {
                row.push(self.pair(x, y)?);
            }
            entries.push(row);
        }
        Matrix::from_rows(entries)
    }

    /// Block-diagonal direct sum; labels are concatenated.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let gram = self.gram.direct_sum(&other.gram);
        let mut labels = self.basis_labels.clone();
        labels.extend(other.basis_labels.iter().cloned());
        IntegralLattice {
            gram,
            basis_labels: labels,
        }
    }

    /// Determinant of the Gram matrix; 0 for degenerate pairings.
    pub fn discriminant(&self) -> Int {
        self.gram.det().expect("gram matrices are square")
    }
}

impl LatticeMap {
    pub fn new(
        source: IntegralLattice,
        target: IntegralLattice,
        matrix: ExactMatrix,
    ) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::Dimension(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        Ok(LatticeMap {
            source,
            target,
            matrix,
        })
    }

    /// Checks `F^T · gram_target · F = gram_source` exactly.
    pub fn is_isometry(&self) -> IsometryCheck {
        let ft = self.matrix.transpose();
        let pulled = ft
            .mul(self.target.gram())
            .and_then(|m| m.mul(&self.matrix))
            .expect("dimensions checked at construction");
        for i in 0..self.source.rank() {
            for j in 0..self.source.rank() {
                if pulled.at(i, j) != self.source.gram().at(i, j) {
                    return IsometryCheck {
                        is_isometry: false,
                        witness: Some(IsometryWitness {
                            i,
                            j,
                            source_value: self.source.gram().at(i, j).clone(),
                            mapped_value: pulled.at(i, j).clone(),
                        }),
                    };
                }
            }
        }
        IsometryCheck {
            is_isometry: true,
            witness: None,
        }
    }
}

/// The hyperbolic plane U: Gram [[0,1],[1,0]], discriminant -1.
pub fn hyperbolic_plane() -> IntegralLattice {
    let gram = Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
    IntegralLattice::new(gram, vec!["e".into(), "f".into()]).unwrap()
}

/// E8 root lattice with the sign flipped (negative definite, discriminant 1).
/// Node 8 of the diagram attaches to node 5, giving arm lengths 1, 2, 4.
pub fn e8_negative() -> IntegralLattice {
    let mut gram: ExactMatrix = Matrix::zero(8, 8);
    for i in 0..8 {
        *gram.at_mut(i, i) = int(-2);
    }
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)];
    for (a, b) in edges {
        *gram.at_mut(a, b) = int(1);
        *gram.at_mut(b, a) = int(1);
    }
    let labels = (1..=8).map(|i| format!("r{i}")).collect();
    IntegralLattice::new(gram, labels).unwrap()
}

/// Second cohomology of a K3 surface: U^3 ⊕ E8(-1)^2, rank 22.
pub fn k3_h2() -> IntegralLattice {
    let u = hyperbolic_plane();
    u.direct_sum(&u)
        .direct_sum(&u)
        .direct_sum(&e8_negative())
        .direct_sum(&e8_negative())
}

/// Second cohomology of an abelian surface: U^3, rank 6.
pub fn abelian_h2() -> IntegralLattice {
    let u = hyperbolic_plane();
    u.direct_sum(&u).direct_sum(&u)
}

/// A sublattice basis is primitive iff saturating it gives it back.
pub fn is_saturated_basis(basis: &[Vec<Int>]) -> bool {
    saturate(basis) == basis
}
