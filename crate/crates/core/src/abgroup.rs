//! Finitely generated abelian groups presented by integer relation matrices.
//!
//! A group is `Z^n / rowspace(relations)`; its isomorphism type is read off
//! the Smith normal form of the relation matrix. This is the shape in which
//! divisor class groups are reported: invariant factors in divisibility
//! order, free rank as a count, and generator labels carried through
//! quotients so a report can say which class generates the torsion.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exactalg::Matrix;
use crate::{Error, ExactMatrix, Int, Result};

/// Finitely generated abelian group `Z^generators / relations`.
#[derive(Debug, Clone)]
pub struct FgAbelianGroup {
    generator_names: Vec<String>,
    relations: ExactMatrix,
    /// One entry per generator of the canonical decomposition; `0` encodes a
    /// free `Z` summand, `d > 0` a `Z/d` summand (`1` a trivial one).
    invariant_factors: Vec<Int>,
    /// Rows are generators of the canonical summands, expressed over the
    /// original generators, aligned with `invariant_factors`.
    summand_generators: Vec<Vec<Int>>,
}

/// Exponent of a group: least `n > 0` with `n·g = 0` for all `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    Finite(Int),
    Infinite,
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(n) => write!(f, "{n}"),
            Exponent::Infinite => write!(f, "infinite"),
        }
    }
}

/// A torsion summand of the canonical decomposition.
#[derive(Debug, Clone)]
pub struct TorsionSummand {
    pub order: Int,
    /// Generator of the summand as a combination of the original generators.
    pub generator: Vec<Int>,
}

impl FgAbelianGroup {
    /// Build a group from labelled generators and a relation matrix whose
    /// rows are relations among them.
    pub fn from_presentation(names: Vec<String>, relations: ExactMatrix) -> Result<Self> {
        if relations.cols() != names.len() {
            return Err(Error::Dimension(format!(
                "{} relation columns for {} generators",
                relations.cols(),
                names.len()
            )));
        }
        let n = names.len();
        let snf = relations.snf();
        let diag = snf.diagonal();
        let mut invariant_factors = Vec::with_capacity(n);
        let mut summand_generators = Vec::with_capacity(n);
        for i in 0..n {
            let d = diag.get(i).cloned().unwrap_or_else(Int::zero);
            invariant_factors.push(d);
            // In coordinates c = x · V the relation lattice is ⊕ d_i Z, so
            // the i-th summand is generated by the class of row i of V^{-1}.
            summand_generators.push(snf.v_inv.row(i));
        }
        Ok(FgAbelianGroup {
            generator_names: names,
            relations,
            invariant_factors,
            summand_generators,
        })
    }

    /// Free group on the given generators.
    pub fn free(names: Vec<String>) -> Self {
        let n = names.len();
        Self::from_presentation(names, Matrix::zero(0, n)).expect("free presentation is valid")
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn relations(&self) -> &ExactMatrix {
        &self.relations
    }

    /// Nontrivial torsion invariant factors in divisibility order. Factors
    /// equal to 1 are dropped from reports.
    pub fn torsion_factors(&self) -> Vec<Int> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect()
    }

    /// Number of free `Z` summands.
    pub fn free_rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| d.is_zero()).count()
    }

    /// Indices of the free summands within the canonical decomposition, as
    /// used by [`Self::element_image`].
    pub fn free_positions(&self) -> Vec<usize> {
        self.invariant_factors
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank() == 0 && self.torsion_factors().is_empty()
    }

    /// Torsion summands with a generator for each, expressed over the
    /// original generators.
    pub fn torsion_summands(&self) -> Vec<TorsionSummand> {
        self.invariant_factors
            .iter()
            .zip(&self.summand_generators)
            .filter(|(d, _)| !d.is_zero() && !d.is_one())
            .map(|(d, g)| TorsionSummand {
                order: d.clone(),
                generator: g.clone(),
            })
            .collect()
    }

    /// lcm of the torsion factors for a finite group; `Infinite` as soon as
    /// there is a free summand.
    pub fn exponent(&self) -> Exponent {
        if self.free_rank() > 0 {
            return Exponent::Infinite;
        }
        let e = self
            .torsion_factors()
            .into_iter()
            .fold(Int::one(), |acc, d| acc.lcm(&d));
        Exponent::Finite(e)
    }

    /// Quotient by the subgroup generated by the given vectors (expressed in
    /// this group's generators). Generator labels are inherited.
    pub fn quotient_by(&self, subgroup_generators: &[Vec<Int>]) -> Result<Self> {
        let n = self.generator_names.len();
        for v in subgroup_generators {
            if v.len() != n {
                return Err(Error::Dimension(format!(
                    "subgroup generator has length {}, expected {}",
                    v.len(),
                    n
                )));
            }
        }
        let mut rows = self.relations.row_vectors();
        rows.extend(subgroup_generators.iter().cloned());
        let relations = if rows.is_empty() {
            Matrix::zero(0, n)
        } else {
            Matrix::from_rows(rows)?
        };
        Self::from_presentation(self.generator_names.clone(), relations)
    }

    /// Same free rank and same nontrivial invariant factors.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.free_rank() == other.free_rank() && self.torsion_factors() == other.torsion_factors()
    }

    /// Image of an element (coordinates over the original generators) in the
    /// canonical decomposition: torsion coordinates reduced mod their order,
    /// free coordinates exact. Entries align with the invariant factors.
    pub fn element_image(&self, element: &[Int]) -> Result<Vec<Int>> {
        let n = self.generator_names.len();
        if element.len() != n {
            return Err(Error::Dimension(format!(
                "element has length {}, expected {}",
                element.len(),
                n
            )));
        }
        let snf = self.relations.snf();
        // Coordinates in the canonical basis are x · V.
        let coords = snf.v.transpose().mul_vec(element)?;
        Ok(coords
            .into_iter()
            .zip(&self.invariant_factors)
            .map(|(c, d)| if d.is_zero() { c } else { c.mod_floor(d) })
            .collect())
    }

    /// True when the element represents the identity class.
    pub fn element_is_zero(&self, element: &[Int]) -> Result<bool> {
        Ok(self.element_image(element)?.iter().all(Zero::is_zero))
    }

    /// `Z^2 ⊕ Z/2`-style rendering of the isomorphism type.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        match self.free_rank() {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in self.torsion_factors() {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" ⊕ ")
        }
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::int;

    fn names(labels: &[&str]) -> Vec<String> {
        labels.iter().map(|s| s.to_string()).collect()
    }

    fn mat(rows: &[&[i64]], cols: usize) -> ExactMatrix {
        if rows.is_empty() {
            return Matrix::zero(0, cols);
        }
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn presentation_with_two_torsion() {
        // Generators {A, B~, λ} with the single relation 2A = 0.
        let g = FgAbelianGroup::from_presentation(
            names(&["A", "B~", "λ"]),
            mat(&[&[2, 0, 0]], 3),
        )
        .unwrap();
        assert_eq!(g.free_rank(), 2);
        assert_eq!(g.torsion_factors(), vec![int(2)]);
        assert_eq!(g.describe(), "Z^2 ⊕ Z/2");
        assert_eq!(g.exponent(), Exponent::Infinite);
        // The torsion summand is generated by A.
        let t = g.torsion_summands();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].order, int(2));
        assert_eq!(t[0].generator, vec![int(1), int(0), int(0)]);
    }

    #[test]
    fn free_and_trivial_presentations() {
        let free = FgAbelianGroup::free(names(&["x", "y"]));
        assert_eq!(free.describe(), "Z^2");
        let trivial =
            FgAbelianGroup::from_presentation(names(&["x"]), mat(&[&[1]], 1)).unwrap();
        assert!(trivial.is_trivial());
        assert_eq!(trivial.exponent(), Exponent::Finite(int(1)));
        assert_eq!(trivial.describe(), "0");
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let r = FgAbelianGroup::from_presentation(names(&["x", "y"]), mat(&[&[1]], 1));
        assert!(r.is_err());
    }

    #[test]
    fn quotients() {
        // Z^3 on {λ, Σ~, B~} divided by Σ~ is free of rank 2.
        let g = FgAbelianGroup::free(names(&["λ", "Σ~", "B~"]));
        let q = g.quotient_by(&[vec![int(0), int(1), int(0)]]).unwrap();
        assert_eq!(q.describe(), "Z^2");
        assert!(q.element_is_zero(&[int(0), int(1), int(0)]).unwrap());
        assert!(!q.element_is_zero(&[int(0), int(0), int(1)]).unwrap());

        // Dividing by all generators kills the group.
        let z2 = FgAbelianGroup::free(names(&["a", "b"]));
        let t = z2
            .quotient_by(&[vec![int(1), int(0)], vec![int(0), int(1)]])
            .unwrap();
        assert!(t.is_trivial());

        // Quotient by the empty set is the group itself.
        assert!(z2.quotient_by(&[]).unwrap().is_isomorphic(&z2));

        // Z^2 on {λ, B} divided by {λ, 2B}: the index-2 quotient.
        let a1 = FgAbelianGroup::free(names(&["λ", "B"]));
        let q = a1
            .quotient_by(&[vec![int(1), int(0)], vec![int(0), int(2)]])
            .unwrap();
        assert_eq!(q.describe(), "Z/2");
        assert_eq!(q.exponent(), Exponent::Finite(int(2)));
    }

    #[test]
    fn malformed_quotient_generator_rejected() {
        let g = FgAbelianGroup::free(names(&["a", "b"]));
        assert!(g.quotient_by(&[vec![int(1)]]).is_err());
    }

    #[test]
    fn isomorphism_ignores_ordering_and_labels() {
        // Z/2 ⊕ Z vs Z ⊕ Z/2.
        let a = FgAbelianGroup::from_presentation(names(&["t", "f"]), mat(&[&[2, 0]], 2)).unwrap();
        let b = FgAbelianGroup::from_presentation(names(&["f", "t"]), mat(&[&[0, 2]], 2)).unwrap();
        assert!(a.is_isomorphic(&b));

        // Z/4 is not Z/2 ⊕ Z/2.
        let z4 = FgAbelianGroup::from_presentation(names(&["x"]), mat(&[&[4]], 1)).unwrap();
        let z22 = FgAbelianGroup::from_presentation(
            names(&["x", "y"]),
            mat(&[&[2, 0], &[0, 2]], 2),
        )
        .unwrap();
        assert!(!z4.is_isomorphic(&z22));
    }

    #[test]
    fn element_images_reduce_mod_orders() {
        let g = FgAbelianGroup::from_presentation(names(&["a", "b"]), mat(&[&[2, 0]], 2)).unwrap();
        // 3a has the same class as a; 2a vanishes.
        assert_eq!(
            g.element_image(&[int(3), int(0)]).unwrap(),
            g.element_image(&[int(1), int(0)]).unwrap()
        );
        assert!(g.element_is_zero(&[int(2), int(0)]).unwrap());
        assert!(!g.element_is_zero(&[int(0), int(5)]).unwrap());
    }
}
