//! The divisor-class ledger of a moduli space `M` with symplectic resolution
//! `π: M~ → M`.
//!
//! The ledger stores what the geometry pins down numerically: a basis of the
//! Picard group of the resolution (a Donaldson-type summand `μ̃(…)` plus
//! exceptional-block classes), the Beauville Gram matrix on that basis, the
//! intersection table of the distinguished curve classes, the exceptional
//! divisor as an integer vector, and the registered proper transforms of
//! Weil divisors on the base. Everything downstream — pullback coefficient
//! systems, the Cartier subgroup, the Weil class group, the factoriality
//! index, the isometry with the Mukai-lattice complement — is exact linear
//! algebra against this data.
//!
//! The Cartier model: the image of `π*Pic(M)` inside `Pic(M~)` is taken to
//! be the saturated subgroup pairing to zero with every π-contracted curve.
//! Necessity is the projection formula; sufficiency is a modeling axiom
//! checked against the registered `known_cartier_facts`. All solves run over
//! exact rationals, and integrality is always a verdict, never an
//! assumption.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::abgroup::{Exponent, FgAbelianGroup};
use crate::exactalg::{format_vector, saturate, Matrix};
use crate::lattice::{IntegralLattice, IsometryCheck, LatticeMap};
use crate::mukai::{
    lambda_u2_gamma_prime_intersection, v_perp, Ambient, MukaiVector, SurfaceModel,
};
use crate::{int, Error, ExactMatrix, Int, Rat, Result};

/// A curve class known only through its intersection numbers with the
/// divisor basis. `contracted` marks the curves contracted by π.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveClass {
    pub name: String,
    pub pairings: Vec<Int>,
    pub contracted: bool,
}

/// The curve γ' on the base exists only through the decomposition
/// `π*(γ') = γ + l·δ`: `resolved_curve` names γ, `against` names δ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaPrime {
    pub resolved_curve: String,
    pub against: String,
}

/// A registered identity "expression = λ(u(L, free_part)) for some line
/// bundle L", with a citation naming its source. The expression is written
/// over base Weil-divisor labels; an undetermined pure-torsion summand may
/// be omitted — the engine derives it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartierFact {
    pub expression: BTreeMap<String, Int>,
    pub free_part: Int,
    pub citation: String,
}

/// Divisor-class ledger of one moduli space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionModel {
    pub name: String,
    /// Rank of the `μ̃`-summand: the first `mu_rank` basis directions.
    pub mu_rank: usize,
    pub divisor_basis: Vec<String>,
    /// Beauville Gram matrix over `divisor_basis`. Kept as a raw matrix so
    /// that malformed models can be loaded and reported by `validate`.
    pub beauville_gram: ExactMatrix,
    /// The reduced exceptional divisor as a vector over `divisor_basis`.
    pub exceptional: Vec<Int>,
    pub curves: Vec<CurveClass>,
    pub gamma_prime: Option<GammaPrime>,
    pub known_cartier_facts: Vec<CartierFact>,
    /// base Weil-divisor label → basis label of its registered transform.
    pub proper_transforms: BTreeMap<String, String>,
}

/// One violated invariant, with the data identity it contradicts.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub description: String,
    pub citation: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "invariant violated: {} [{}]", v.description, v.citation)?;
        }
        Ok(())
    }
}

/// Result of a pullback-coefficient solve `π*(nD) = n·D~ + m·E`.
#[derive(Debug, Clone)]
pub struct PullbackCoefficient {
    pub base_label: String,
    pub n: Int,
    /// The unique rational `m` for which the combination pairs to zero with
    /// every contracted curve.
    pub m: Rat,
    /// Cartier-consistent iff `m` is an integer and the full expansion is
    /// integral over the basis.
    pub cartier_consistent: bool,
    /// `n·D~ + m·E` over the divisor basis (rational when `m` is).
    pub expansion: Vec<Rat>,
}

/// The Weil class group with labels resolved to base-divisor names.
#[derive(Debug, Clone)]
pub struct WeilClassGroup {
    pub group: FgAbelianGroup,
    /// Base labels of generators with nonzero free image, in basis order.
    pub free_labels: Vec<String>,
    pub torsion: Vec<TorsionClass>,
}

#[derive(Debug, Clone)]
pub struct TorsionClass {
    pub label: String,
    pub order: Int,
    /// Generator over the divisor basis.
    pub generator: Vec<Int>,
}

/// Torsion entry with its Cartier verdict.
#[derive(Debug, Clone)]
pub struct TorsionEntry {
    pub label: String,
    pub order: Int,
    pub cartier: bool,
}

/// A divisor class written over the generators of `A¹(M)`: the base labels
/// of the non-exceptional basis directions plus the torsion labels. Torsion
/// coefficients are reduced modulo their order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeilClass {
    pub free: Vec<(String, Int)>,
    pub torsion: Vec<(String, Int)>,
}

impl fmt::Display for WeilClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (label, c) in self.free.iter().chain(&self.torsion) {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                terms.push(label.clone());
            } else {
                terms.push(format!("{c}·{label}"));
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Coefficients of the pullback of the λ(u2(1)) class over {B-transform,
/// exceptional}, solved from the curve equations, plus the same system over
/// the primitive exceptional direction.
#[derive(Debug, Clone)]
pub struct ExceptionalDivisibility {
    pub p: Rat,
    pub q: Rat,
    /// Set when `q` is not an integer while the class is integral: the
    /// exceptional divisor is divisible in the integral cohomology.
    pub divisibility_flag: bool,
    /// Same solve against `exceptional / content(exceptional)`.
    pub primitive_coeffs: (Rat, Rat),
}

/// Isometry verification between the Mukai-vector complement and the
/// Beauville lattice of the resolution.
#[derive(Debug, Clone)]
pub struct IsometryReport {
    pub check: IsometryCheck,
    /// Engine-derived expansion of the pullback of the λ(u2(1)) class.
    pub pullback_expansion: Vec<Int>,
    pub sample_self_pairing: Int,
    pub expected_self_pairing: Int,
}

/// Consistency report for one registered Cartier fact.
#[derive(Debug, Clone)]
pub struct FactConsistency {
    pub citation: String,
    pub gamma_prime_intersection: Rat,
    pub expected_gamma_prime: Int,
    /// Torsion adjustment (base label → coefficient) that makes the pullback
    /// integral; empty when none is needed. Exactly one choice survives.
    pub surviving_shift: BTreeMap<String, Int>,
    /// Full pullback vector over the divisor basis.
    pub pullback: Vec<Int>,
    /// Whether the pullback equals `free_part` times the engine-derived
    /// λ(u2(1)) expansion.
    pub matches_lambda_expansion: bool,
}

impl ResolutionModel {
    fn basis_len(&self) -> usize {
        self.divisor_basis.len()
    }

    pub fn basis_index(&self, label: &str) -> Result<usize> {
        self.divisor_basis
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Model(format!("unknown basis label {label:?}")))
    }

    fn curve(&self, name: &str) -> Result<&CurveClass> {
        self.curves
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::Model(format!("unknown curve {name:?}")))
    }

    fn contracted_curves(&self) -> Vec<&CurveClass> {
        self.curves.iter().filter(|c| c.contracted).collect()
    }

    /// Pairing of a divisor-basis combination with a curve.
    fn pair_with_curve(&self, divisor: &[Int], curve: &CurveClass) -> Result<Int> {
        if divisor.len() != curve.pairings.len() {
            return Err(Error::Model(format!(
                "curve {} has {} pairings for a basis of size {}",
                curve.name,
                curve.pairings.len(),
                divisor.len()
            )));
        }
        Ok(divisor
            .iter()
            .zip(&curve.pairings)
            .fold(int(0), |acc, (a, b)| acc + a * b))
    }

    /// Basis label registered as the transform of a base divisor.
    fn transform_index(&self, base_label: &str) -> Result<usize> {
        let basis_label = self.proper_transforms.get(base_label).ok_or_else(|| {
            Error::Model(format!("no registered proper transform for {base_label:?}"))
        })?;
        self.basis_index(basis_label)
    }

    /// Base label of a basis direction, when one is registered.
    fn base_label_of(&self, basis_label: &str) -> String {
        self.proper_transforms
            .iter()
            .find(|(_, v)| v.as_str() == basis_label)
            .map(|(k, _)| k.clone())
            .unwrap_or_else(|| basis_label.to_string())
    }

    /// Expression over base labels → vector over the divisor basis.
    fn transform_vector(&self, expression: &BTreeMap<String, Int>) -> Result<Vec<Int>> {
        let mut v = vec![int(0); self.basis_len()];
        for (label, coeff) in expression {
            let idx = self.transform_index(label)?;
            v[idx] = v[idx].clone() + coeff;
        }
        Ok(v)
    }

    /// Checks used by the computational operations; they fail fast with a
    /// model error instead of producing nonsense on malformed data.
    fn structural_ok(&self) -> Result<()> {
        let n = self.basis_len();
        if self.beauville_gram.rows() != n || self.beauville_gram.cols() != n {
            return Err(Error::Model(format!(
                "Gram matrix is {}x{} over a basis of size {n}",
                self.beauville_gram.rows(),
                self.beauville_gram.cols()
            )));
        }
        if self.exceptional.len() != n {
            return Err(Error::Model("exceptional vector length mismatch".into()));
        }
        if self.mu_rank > n {
            return Err(Error::Model("mu_rank exceeds the basis size".into()));
        }
        for c in &self.curves {
            if c.pairings.len() != n {
                return Err(Error::Model(format!(
                    "curve {} pairing length mismatch",
                    c.name
                )));
            }
        }
        Ok(())
    }

    /// All model invariants, each violation reported with the identity it
    /// contradicts. The model stays loadable even when invalid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut push = |description: String, citation: &str| {
            violations.push(Violation {
                description,
                citation: citation.to_string(),
            });
        };
        let n = self.basis_len();

        if self.beauville_gram.rows() != n || self.beauville_gram.cols() != n {
            push(
                format!(
                    "Beauville Gram is {}x{}, expected {n}x{n}",
                    self.beauville_gram.rows(),
                    self.beauville_gram.cols()
                ),
                "the Beauville form lives on the divisor basis of Pic of the resolution",
            );
        } else {
            if !self.beauville_gram.is_symmetric() {
                push(
                    "Beauville Gram is not symmetric".into(),
                    "q is a symmetric bilinear form on H² of the resolution",
                );
            }
            for i in 0..self.mu_rank.min(n) {
                for j in self.mu_rank..n {
                    if !self.beauville_gram.at(i, j).is_zero()
                        || !self.beauville_gram.at(j, i).is_zero()
                    {
                        push(
                            format!(
                                "μ̃-part basis vector {} pairs nontrivially with {}",
                                self.divisor_basis[i], self.divisor_basis[j]
                            ),
                            "q(μ̃(α), c1(exceptional-block class)) = 0",
                        );
                    }
                }
            }
        }

        if self.mu_rank > n {
            push(
                format!("mu_rank {} exceeds basis size {n}", self.mu_rank),
                "H²(M~) = μ̃-part ⊕ exceptional-block classes",
            );
        }

        if self.exceptional.len() != n {
            push(
                "exceptional vector length mismatch".into(),
                "the exceptional divisor is a class over the divisor basis",
            );
        } else if self.exceptional.iter().all(Zero::is_zero) {
            push(
                "exceptional vector is zero".into(),
                "the symplectic resolution blows up a nonempty singular locus",
            );
        }

        for c in &self.curves {
            if c.pairings.len() != n {
                push(
                    format!("curve {} has {} pairings, expected {n}", c.name, c.pairings.len()),
                    "curve classes pair against every divisor-basis element",
                );
                continue;
            }
            for i in 0..self.mu_rank.min(n) {
                if !c.pairings[i].is_zero() {
                    push(
                        format!(
                            "curve {} pairs nontrivially with μ̃-part vector {}",
                            c.name, self.divisor_basis[i]
                        ),
                        "the distinguished curves meet pulled-back surface classes in 0",
                    );
                }
            }
        }

        if let Some(gp) = &self.gamma_prime {
            match self.curve(&gp.resolved_curve) {
                Ok(c) if c.contracted => push(
                    format!("resolved curve {} is marked contracted", c.name),
                    "γ is the proper transform of a curve contracted on the Donaldson-Uhlenbeck side, not by π",
                ),
                Ok(_) => {}
                Err(_) => push(
                    format!("gamma_prime names unknown curve {:?}", gp.resolved_curve),
                    "π*(γ') decomposes against registered curves",
                ),
            }
            match self.curve(&gp.against) {
                Ok(c) if !c.contracted => push(
                    format!("decomposition curve {} is not contracted", c.name),
                    "π*(γ') = γ + l·δ with δ contracted by π",
                ),
                Ok(_) => {}
                Err(_) => push(
                    format!("gamma_prime names unknown curve {:?}", gp.against),
                    "π*(γ') decomposes against registered curves",
                ),
            }
        }

        for (base, basis) in &self.proper_transforms {
            if self.basis_index(basis).is_err() {
                push(
                    format!("proper transform of {base:?} names unknown basis label {basis:?}"),
                    "proper transforms land in the divisor basis",
                );
            }
        }

        for fact in &self.known_cartier_facts {
            for label in fact.expression.keys() {
                if !self.proper_transforms.contains_key(label) {
                    push(
                        format!("Cartier fact uses label {label:?} without a registered transform"),
                        "registered facts are expressions in base Weil divisors",
                    );
                }
            }
        }

        ValidationReport { violations }
    }

    /// The Beauville lattice, once the Gram data is known to be valid.
    pub fn beauville_lattice(&self) -> Result<IntegralLattice> {
        self.structural_ok()?;
        IntegralLattice::new(self.beauville_gram.clone(), self.divisor_basis.clone())
    }

    /// Saturated basis of the subgroup of Pic(M~) pairing to zero with every
    /// contracted curve: the model of `π*Pic(M)`.
    pub fn cartier_subgroup(&self) -> Result<Vec<Vec<Int>>> {
        self.structural_ok()?;
        let contracted = self.contracted_curves();
        let rows = Matrix::from_fn(contracted.len(), self.basis_len(), |i, j| {
            contracted[i].pairings[j].clone()
        });
        let basis = rows.kernel_basis();
        debug_assert_eq!(saturate(&basis), basis);
        Ok(basis)
    }

    /// `A¹(M) = Pic(M~) / ⟨exceptional⟩`, with generator labels resolved to
    /// base names through the registered transforms.
    pub fn weil_class_group(&self) -> Result<WeilClassGroup> {
        self.structural_ok()?;
        let names: Vec<String> = self
            .divisor_basis
            .iter()
            .map(|l| self.base_label_of(l))
            .collect();
        let group = FgAbelianGroup::from_presentation(
            names.clone(),
            Matrix::from_rows(vec![self.exceptional.clone()])?,
        )?;
        let mut free_labels = Vec::new();
        for (i, name) in names.iter().enumerate() {
            let mut e = vec![int(0); self.basis_len()];
            e[i] = int(1);
            let image = group.element_image(&e)?;
            let has_free = group
                .free_positions()
                .iter()
                .any(|&p| !image[p].is_zero());
            if has_free {
                free_labels.push(name.clone());
            }
        }
        let torsion = group
            .torsion_summands()
            .into_iter()
            .map(|t| TorsionClass {
                label: self.render_combination(&t.generator),
                order: t.order,
                generator: t.generator,
            })
            .collect();
        Ok(WeilClassGroup {
            group,
            free_labels,
            torsion,
        })
    }

    /// Pretty label for a combination of basis directions, mapped through
    /// the registered transforms: `A` renders as its base name, sums render
    /// term by term.
    fn render_combination(&self, v: &[Int]) -> String {
        let mut terms = Vec::new();
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let label = self.base_label_of(&self.divisor_basis[i]);
            if c.is_one() {
                terms.push(label);
            } else if (-c.clone()).is_one() {
                terms.push(format!("-{label}"));
            } else {
                terms.push(format!("{c}·{label}"));
            }
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }

    /// Exponent of `A¹(M) / image of the Cartier subgroup`: the factoriality
    /// index. 1 means locally factorial at the ledger level.
    pub fn factoriality_index(&self) -> Result<Int> {
        let weil = self.weil_class_group()?;
        let cartier = self.cartier_subgroup()?;
        let quotient = weil.group.quotient_by(&cartier)?;
        match quotient.exponent() {
            Exponent::Finite(e) => Ok(e),
            Exponent::Infinite => Err(Error::Model(
                "the quotient by the Cartier subgroup has a free part: \
                 not n-factorial for any n"
                    .into(),
            )),
        }
    }

    /// Solve `π*(nD) = n·D~ + m·E` against every contracted curve.
    pub fn pullback_coefficient(&self, base_label: &str, n: &Int) -> Result<PullbackCoefficient> {
        self.structural_ok()?;
        let idx = self.transform_index(base_label)?;
        let mut transform = vec![int(0); self.basis_len()];
        transform[idx] = n.clone();

        let contracted = self.contracted_curves();
        let mut coeffs = Vec::with_capacity(contracted.len());
        let mut rhs = Vec::with_capacity(contracted.len());
        for c in contracted {
            coeffs.push(vec![self.pair_with_curve(&self.exceptional, c)?]);
            rhs.push(-self.pair_with_curve(&transform, c)?);
        }
        let system = if coeffs.is_empty() {
            Matrix::zero(0, 1)
        } else {
            Matrix::from_rows(coeffs)?
        };
        let solution = system
            .solve_rational(&rhs)?
            .ok_or_else(|| Error::Model("inconsistent pullback system".into()))?;
        let m = solution.values[0].clone();
        let expansion: Vec<Rat> = (0..self.basis_len())
            .map(|j| {
                Rat::from_integer(transform[j].clone())
                    + m.clone() * Rat::from_integer(self.exceptional[j].clone())
            })
            .collect();
        let integral_expansion = expansion.iter().all(Rat::is_integer);
        Ok(PullbackCoefficient {
            base_label: base_label.to_string(),
            n: n.clone(),
            cartier_consistent: m.is_integer() && integral_expansion,
            m,
            expansion,
        })
    }

    /// The rational `l` in `π*(γ') = γ + l·δ`, solved from the projection
    /// formula: the exceptional divisor pairs to zero with pulled-back
    /// curves.
    pub fn curve_pullback_decomposition(&self) -> Result<Rat> {
        self.structural_ok()?;
        let gp = self
            .gamma_prime
            .as_ref()
            .ok_or_else(|| Error::Model("model has no γ' decomposition data".into()))?;
        let gamma = self.curve(&gp.resolved_curve)?;
        let delta = self.curve(&gp.against)?;
        let e_gamma = self.pair_with_curve(&self.exceptional, gamma)?;
        let e_delta = self.pair_with_curve(&self.exceptional, delta)?;
        if e_delta.is_zero() {
            return Err(Error::Model(
                "degenerate model: the exceptional divisor pairs to zero with δ".into(),
            ));
        }
        Ok(-Rat::new(e_gamma, e_delta))
    }

    /// `c1(n·D) · γ'` for an expression over base labels, via the projection
    /// formula: `n · (D~·γ + l·(D~·δ))`.
    pub fn base_intersection(&self, expression: &BTreeMap<String, Int>, n: &Int) -> Result<Rat> {
        let l = self.curve_pullback_decomposition()?;
        let gp = self.gamma_prime.as_ref().expect("checked above");
        let gamma = self.curve(&gp.resolved_curve)?;
        let delta = self.curve(&gp.against)?;
        let w = self.transform_vector(expression)?;
        let w_gamma = Rat::from_integer(self.pair_with_curve(&w, gamma)?);
        let w_delta = Rat::from_integer(self.pair_with_curve(&w, delta)?);
        Ok(Rat::from_integer(n.clone()) * (w_gamma + l * w_delta))
    }

    /// Exceptional-block expansion of the pullback of the λ(u2(1)) class,
    /// solved from the curve equations: zero pairing with every contracted
    /// curve, and γ-intersection -1. The solution must be unique and
    /// integral.
    pub fn lambda_u2_pullback(&self) -> Result<Vec<Int>> {
        self.structural_ok()?;
        let gp = self
            .gamma_prime
            .as_ref()
            .ok_or_else(|| Error::Model("model has no γ' decomposition data".into()))?;
        let gamma = self.curve(&gp.resolved_curve)?;
        let unknowns: Vec<usize> = (self.mu_rank..self.basis_len()).collect();
        if unknowns.is_empty() {
            return Err(Error::Model("no exceptional-block directions to solve".into()));
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for c in self.contracted_curves() {
            rows.push(unknowns.iter().map(|&j| c.pairings[j].clone()).collect());
            rhs.push(int(0));
        }
        rows.push(unknowns.iter().map(|&j| gamma.pairings[j].clone()).collect());
        rhs.push(lambda_u2_gamma_prime_intersection(&int(1)));
        let system = Matrix::from_rows(rows)?;
        let solution = system
            .solve_rational(&rhs)?
            .ok_or_else(|| Error::Model("λ(u2(1)) pullback system is inconsistent".into()))?;
        if solution.nullity > 0 {
            return Err(Error::Model(
                "λ(u2(1)) pullback system is underdetermined".into(),
            ));
        }
        let mut out = vec![int(0); self.basis_len()];
        for (&j, value) in unknowns.iter().zip(&solution.values) {
            if !value.is_integer() {
                return Err(Error::Model(format!(
                    "λ(u2(1)) pullback coefficient {value} is not integral"
                )));
            }
            out[j] = value.to_integer();
        }
        Ok(out)
    }

    /// The coefficients (p, q) of the pullback of λ(u2(1)) over the
    /// B-transform and the full exceptional vector, plus the same solve over
    /// the primitive exceptional direction. A non-integral q for an integral
    /// class means the exceptional divisor is divisible in H²(M~, Z).
    pub fn exceptional_divisibility(&self) -> Result<ExceptionalDivisibility> {
        self.structural_ok()?;
        let gp = self
            .gamma_prime
            .as_ref()
            .ok_or_else(|| Error::Model("model has no γ' decomposition data".into()))?;
        let gamma = self.curve(&gp.resolved_curve)?;
        let delta = self.curve(&gp.against)?;
        let b_idx = self.transform_index("B")?;
        let mut b_vec = vec![int(0); self.basis_len()];
        b_vec[b_idx] = int(1);

        let solve_against = |e: &[Int]| -> Result<(Rat, Rat)> {
            let system = Matrix::from_rows(vec![
                vec![
                    self.pair_with_curve(&b_vec, delta)?,
                    self.pair_with_curve(e, delta)?,
                ],
                vec![
                    self.pair_with_curve(&b_vec, gamma)?,
                    self.pair_with_curve(e, gamma)?,
                ],
            ])?;
            let rhs = vec![int(0), lambda_u2_gamma_prime_intersection(&int(1))];
            let solution = system
                .solve_rational(&rhs)?
                .ok_or_else(|| Error::Model("divisibility system is inconsistent".into()))?;
            if solution.nullity > 0 {
                return Err(Error::Model("divisibility system is degenerate".into()));
            }
            Ok((solution.values[0].clone(), solution.values[1].clone()))
        };

        let (p, q) = solve_against(&self.exceptional)?;
        let content = self
            .exceptional
            .iter()
            .fold(int(0), |acc, x| acc.gcd(x));
        let primitive: Vec<Int> = self.exceptional.iter().map(|x| x / &content).collect();
        let primitive_coeffs = solve_against(&primitive)?;
        Ok(ExceptionalDivisibility {
            divisibility_flag: !q.is_integer(),
            p,
            q,
            primitive_coeffs,
        })
    }

    /// Builds the morphism `f(r, c, r) = μ̃(c) + r·(pullback of λ(u2(1)))`
    /// on the complement of `v` and checks it against the Beauville form.
    /// The exceptional-block coefficients are derived from the curve
    /// equations, not hard-coded.
    pub fn verify_isometry_f(
        &self,
        surface: &SurfaceModel,
        v: &MukaiVector,
    ) -> Result<IsometryReport> {
        if surface.ns().rank() != self.mu_rank {
            return Err(Error::Model(format!(
                "surface NS rank {} does not match μ̃-rank {}",
                surface.ns().rank(),
                self.mu_rank
            )));
        }
        let w = self.lambda_u2_pullback()?;
        let vp = v_perp(surface, v, Ambient::NsOnly)?;
        let params = vp.rcr_parametrization.as_ref().ok_or_else(|| {
            Error::Model("the complement of v is not parameterized by (r, c, r)".into())
        })?;
        let target = self.beauville_lattice()?;
        let source = IntegralLattice::from_gram(vp.sublattice.gram.clone())?;
        let matrix = Matrix::from_fn(self.basis_len(), params.len(), |i, j| {
            let (c, r) = &params[j];
            let mu_part = if i < self.mu_rank { c[i].clone() } else { int(0) };
            mu_part + r.clone() * &w[i]
        });
        let map = LatticeMap::new(source, target.clone(), matrix.clone())?;
        let check = map.is_isometry();
        let first_image = matrix.col(0);
        let sample_self_pairing = target.pair(&first_image, &first_image)?;
        let expected_self_pairing = vp.sublattice.gram.at(0, 0).clone();
        Ok(IsometryReport {
            check,
            pullback_expansion: w,
            sample_self_pairing,
            expected_self_pairing,
        })
    }

    /// Writes a divisor class of the resolution over the generators of
    /// `A¹(M)`: the non-exceptional basis directions (under their base
    /// names) plus the torsion classes, with torsion coefficients reduced
    /// modulo their order.
    pub fn weil_class_of(&self, divisor: &[Int]) -> Result<WeilClass> {
        self.structural_ok()?;
        if divisor.len() != self.basis_len() {
            return Err(Error::Dimension(format!(
                "divisor has {} coordinates, expected {}",
                divisor.len(),
                self.basis_len()
            )));
        }
        let weil = self.weil_class_group()?;
        // Generators to express the class over: the exceptional-free basis
        // directions, the torsion generators, and the exceptional relation.
        let exc_support: Vec<bool> = self
            .exceptional
            .iter()
            .map(|x| !x.is_zero())
            .collect();
        let mut columns: Vec<Vec<Int>> = Vec::new();
        let mut free_labels = Vec::new();
        for i in 0..self.basis_len() {
            if exc_support[i] {
                continue;
            }
            let mut e = vec![int(0); self.basis_len()];
            e[i] = int(1);
            columns.push(e);
            free_labels.push(self.base_label_of(&self.divisor_basis[i]));
        }
        let free_count = columns.len();
        for t in &weil.torsion {
            columns.push(t.generator.clone());
        }
        columns.push(self.exceptional.clone());
        let system = Matrix::from_fn(self.basis_len(), columns.len(), |i, j| {
            columns[j][i].clone()
        });
        let solution = system
            .solve_rational(divisor)?
            .ok_or_else(|| Error::Model("class is not expressible over the A¹ generators".into()))?;
        let mut free = Vec::new();
        let mut torsion = Vec::new();
        for (j, value) in solution.values.iter().enumerate().take(columns.len() - 1) {
            if !value.is_integer() {
                return Err(Error::Model(format!(
                    "class has non-integral coefficient {value} over the A¹ generators"
                )));
            }
            let c = value.to_integer();
            if j < free_count {
                free.push((free_labels[j].clone(), c));
            } else {
                let t = &weil.torsion[j - free_count];
                torsion.push((t.label.clone(), c.mod_floor(&t.order)));
            }
        }
        Ok(WeilClass { free, torsion })
    }

    /// Torsion classes of the Weil class group, each with its Cartier
    /// verdict. A torsion class inside the Cartier image contradicts the
    /// freeness of Pic(M) and is reported as a model inconsistency.
    pub fn torsion_report(&self) -> Result<Vec<TorsionEntry>> {
        let weil = self.weil_class_group()?;
        let mut span_rows = self.cartier_subgroup()?;
        span_rows.push(self.exceptional.clone());
        let span = Matrix::from_rows(span_rows)?;
        let mut entries = Vec::new();
        for t in &weil.torsion {
            let cartier = span.row_span_contains(&t.generator)?;
            if cartier {
                return Err(Error::Model(format!(
                    "torsion class {} of order {} lies in the Cartier image, \
                     contradicting the freeness of Pic",
                    t.label, t.order
                )));
            }
            entries.push(TorsionEntry {
                label: t.label.clone(),
                order: t.order.clone(),
                cartier,
            });
        }
        Ok(entries)
    }

    /// Consistency of one registered Cartier fact against the δ-orthogonal
    /// model: γ'-intersection equals -free_part, a unique torsion shift
    /// makes the pullback integral, and the pullback matches the engine's
    /// λ(u2(1)) expansion.
    pub fn check_cartier_fact(&self, fact: &CartierFact) -> Result<FactConsistency> {
        let gamma_prime_intersection = self.base_intersection(&fact.expression, &int(1))?;
        let expected_gamma_prime = lambda_u2_gamma_prime_intersection(&fact.free_part);
        let transform = self.transform_vector(&fact.expression)?;
        let weil = self.weil_class_group()?;

        // Enumerate torsion shifts: coefficients 0..order per torsion class.
        let mut shifts: Vec<(BTreeMap<String, Int>, Vec<Int>)> =
            vec![(BTreeMap::new(), vec![int(0); self.basis_len()])];
        for t in &weil.torsion {
            let mut next = Vec::new();
            for (labels, vector) in &shifts {
                let mut k = int(0);
                while k < t.order {
                    let mut labels = labels.clone();
                    let mut vector = vector.clone();
                    if !k.is_zero() {
                        labels.insert(t.label.clone(), k.clone());
                        for (dst, src) in vector.iter_mut().zip(&t.generator) {
                            *dst = dst.clone() + k.clone() * src;
                        }
                    }
                    next.push((labels, vector));
                    k += int(1);
                }
            }
            shifts = next;
        }

        let contracted = self.contracted_curves();
        let mut survivors = Vec::new();
        for (labels, shift_vec) in shifts {
            let shifted: Vec<Int> = transform
                .iter()
                .zip(&shift_vec)
                .map(|(a, b)| a.clone() + b)
                .collect();
            let mut rows = Vec::with_capacity(contracted.len());
            let mut rhs = Vec::with_capacity(contracted.len());
            for c in &contracted {
                rows.push(vec![self.pair_with_curve(&self.exceptional, c)?]);
                rhs.push(-self.pair_with_curve(&shifted, c)?);
            }
            let system = if rows.is_empty() {
                Matrix::zero(0, 1)
            } else {
                Matrix::from_rows(rows)?
            };
            let Some(solution) = system.solve_rational(&rhs)? else {
                continue;
            };
            let m = &solution.values[0];
            if !m.is_integer() {
                continue;
            }
            let pullback: Vec<Int> = shifted
                .iter()
                .zip(&self.exceptional)
                .map(|(a, e)| a.clone() + m.to_integer() * e)
                .collect();
            survivors.push((labels, pullback));
        }
        if survivors.len() != 1 {
            return Err(Error::Model(format!(
                "{} torsion shifts make the registered fact δ-orthogonal; expected exactly one",
                survivors.len()
            )));
        }
        let (surviving_shift, pullback) = survivors.into_iter().next().unwrap();
        let expansion = self.lambda_u2_pullback()?;
        let scaled: Vec<Int> = expansion.iter().map(|x| x * &fact.free_part).collect();
        Ok(FactConsistency {
            citation: fact.citation.clone(),
            gamma_prime_intersection,
            expected_gamma_prime,
            surviving_shift,
            matches_lambda_expansion: pullback == scaled,
            pullback,
        })
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile::from(self);
        let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        Ok(file.into())
    }
}

/// Pretty-print a divisor-basis vector.
pub fn format_divisor(v: &[Int]) -> String {
    format_vector(v)
}

// --- JSON wire format -----------------------------------------------------
//
// Arbitrary-precision integers are serialized as plain JSON numbers via
// serde_json's arbitrary-precision support; anything that is not an integer
// literal is rejected. Unknown fields are rejected everywhere.

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct JsonInt(Int);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = serde_json::Number::from_str(&self.0.to_string())
            .map_err(serde::ser::Error::custom)?;
        n.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let n = serde_json::Number::deserialize(deserializer)?;
        let i = Int::from_str(&n.to_string())
            .map_err(|_| serde::de::Error::custom(format!("expected an integer, got {n}")))?;
        Ok(JsonInt(i))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveFile {
    name: String,
    pairings: Vec<JsonInt>,
    contracted: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CartierFactFile {
    expression: BTreeMap<String, JsonInt>,
    free_part: JsonInt,
    citation: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    name: String,
    mu_rank: usize,
    divisor_basis: Vec<String>,
    beauville_gram: Vec<Vec<JsonInt>>,
    exceptional: Vec<JsonInt>,
    curves: Vec<CurveFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma_prime: Option<GammaPrime>,
    known_cartier_facts: Vec<CartierFactFile>,
    proper_transforms: BTreeMap<String, String>,
}

impl From<&ResolutionModel> for ModelFile {
    fn from(m: &ResolutionModel) -> Self {
        ModelFile {
            name: m.name.clone(),
            mu_rank: m.mu_rank,
            divisor_basis: m.divisor_basis.clone(),
            beauville_gram: m
                .beauville_gram
                .row_vectors()
                .into_iter()
                .map(|r| r.into_iter().map(JsonInt).collect())
                .collect(),
            exceptional: m.exceptional.iter().cloned().map(JsonInt).collect(),
            curves: m
                .curves
                .iter()
                .map(|c| CurveFile {
                    name: c.name.clone(),
                    pairings: c.pairings.iter().cloned().map(JsonInt).collect(),
                    contracted: c.contracted,
                })
                .collect(),
            gamma_prime: m.gamma_prime.clone(),
            known_cartier_facts: m
                .known_cartier_facts
                .iter()
                .map(|f| CartierFactFile {
                    expression: f
                        .expression
                        .iter()
                        .map(|(k, v)| (k.clone(), JsonInt(v.clone())))
                        .collect(),
                    free_part: JsonInt(f.free_part.clone()),
                    citation: f.citation.clone(),
                })
                .collect(),
            proper_transforms: m.proper_transforms.clone(),
        }
    }
}

impl From<ModelFile> for ResolutionModel {
    fn from(f: ModelFile) -> Self {
        let rows: Vec<Vec<Int>> = f
            .beauville_gram
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.0).collect())
            .collect();
        let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
        // A ragged or empty Gram still loads; validate() reports it.
        let gram = Matrix::from_fn(rows.len(), cols, |i, j| {
            rows[i].get(j).cloned().unwrap_or_else(Int::zero)
        });
        ResolutionModel {
            name: f.name,
            mu_rank: f.mu_rank,
            divisor_basis: f.divisor_basis,
            beauville_gram: gram,
            exceptional: f.exceptional.into_iter().map(|x| x.0).collect(),
            curves: f
                .curves
                .into_iter()
                .map(|c| CurveClass {
                    name: c.name,
                    pairings: c.pairings.into_iter().map(|x| x.0).collect(),
                    contracted: c.contracted,
                })
                .collect(),
            gamma_prime: f.gamma_prime,
            known_cartier_facts: f
                .known_cartier_facts
                .into_iter()
                .map(|fact| CartierFact {
                    expression: fact
                        .expression
                        .into_iter()
                        .map(|(k, v)| (k, v.0))
                        .collect(),
                    free_part: fact.free_part.0,
                    citation: fact.citation,
                })
                .collect(),
            proper_transforms: f.proper_transforms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac;

    // A toy ledger with one μ̃ direction and two exceptional-block classes,
    // matching the shape of the 10-dimensional model but with its own small
    // numbers where convenient.
    fn toy() -> ResolutionModel {
        ResolutionModel {
            name: "toy".into(),
            mu_rank: 1,
            divisor_basis: vec!["μ".into(), "S".into(), "T".into()],
            beauville_gram: Matrix::from_rows(vec![
                vec![int(2), int(0), int(0)],
                vec![int(0), int(-6), int(3)],
                vec![int(0), int(3), int(-2)],
            ])
            .unwrap(),
            exceptional: vec![int(0), int(1), int(0)],
            curves: vec![
                CurveClass {
                    name: "d".into(),
                    pairings: vec![int(0), int(-2), int(1)],
                    contracted: true,
                },
                CurveClass {
                    name: "g".into(),
                    pairings: vec![int(0), int(3), int(-2)],
                    contracted: false,
                },
            ],
            gamma_prime: Some(GammaPrime {
                resolved_curve: "g".into(),
                against: "d".into(),
            }),
            known_cartier_facts: vec![CartierFact {
                expression: [("B".to_string(), int(2))].into_iter().collect(),
                free_part: int(1),
                citation: "toy fact".into(),
            }],
            proper_transforms: [
                ("L".to_string(), "μ".to_string()),
                ("B".to_string(), "T".to_string()),
            ]
            .into_iter()
            .collect(),
        }
    }

    #[test]
    fn toy_model_is_valid() {
        assert!(toy().validate().is_valid());
    }

    #[test]
    fn validation_catches_breakage() {
        let mut m = toy();
        *m.beauville_gram.at_mut(0, 1) = int(5);
        let report = m.validate();
        assert!(!report.is_valid());
        // Both symmetry and block structure are broken.
        assert!(report.violations.len() >= 2);

        let mut m = toy();
        m.exceptional = vec![int(0), int(0), int(0)];
        assert!(!m.validate().is_valid());

        let mut m = toy();
        m.curves[0].pairings[0] = int(1);
        assert!(!m.validate().is_valid());

        let mut m = toy();
        m.curves[1].contracted = true;
        assert!(!m.validate().is_valid());
    }

    #[test]
    fn cartier_subgroup_is_delta_orthogonal_kernel() {
        let m = toy();
        let basis = m.cartier_subgroup().unwrap();
        assert_eq!(
            basis,
            vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(2)]]
        );

        // No contracted curves: everything is Cartier.
        let mut free = toy();
        free.curves[0].contracted = false;
        assert_eq!(free.cartier_subgroup().unwrap().len(), 3);
    }

    #[test]
    fn weil_group_and_index() {
        let m = toy();
        let weil = m.weil_class_group().unwrap();
        assert_eq!(weil.group.describe(), "Z^2");
        assert_eq!(weil.free_labels, vec!["L".to_string(), "B".to_string()]);
        assert!(weil.torsion.is_empty());
        assert_eq!(m.factoriality_index().unwrap(), int(2));
    }

    #[test]
    fn pullback_coefficients() {
        let m = toy();
        let p1 = m.pullback_coefficient("B", &int(1)).unwrap();
        assert_eq!(p1.m, frac(1, 2));
        assert!(!p1.cartier_consistent);
        let p2 = m.pullback_coefficient("B", &int(2)).unwrap();
        assert_eq!(p2.m, frac(1, 1));
        assert!(p2.cartier_consistent);
        // Linearity of the solve.
        let p3 = m.pullback_coefficient("B", &int(3)).unwrap();
        assert_eq!(p3.m, p1.m.clone() + p2.m.clone());
        // μ̃-classes pull back with no exceptional correction.
        let pl = m.pullback_coefficient("L", &int(1)).unwrap();
        assert!(pl.m.is_zero() && pl.cartier_consistent);

        assert!(m.pullback_coefficient("missing", &int(1)).is_err());
    }

    #[test]
    fn gamma_prime_decomposition() {
        let m = toy();
        assert_eq!(m.curve_pullback_decomposition().unwrap(), frac(3, 2));

        // Exceptional pairing zero with γ gives l = 0.
        let mut z = toy();
        z.curves[1].pairings = vec![int(0), int(0), int(-2)];
        assert_eq!(z.curve_pullback_decomposition().unwrap(), frac(0, 1));

        // Degenerate when E·δ = 0.
        let mut d = toy();
        d.curves[0].pairings = vec![int(0), int(0), int(1)];
        assert!(d.curve_pullback_decomposition().is_err());
    }

    #[test]
    fn base_intersections() {
        let m = toy();
        let b2 = m
            .base_intersection(&[("B".to_string(), int(1))].into_iter().collect(), &int(2))
            .unwrap();
        assert_eq!(b2, frac(-1, 1));
        let l_any = m
            .base_intersection(&[("L".to_string(), int(1))].into_iter().collect(), &int(7))
            .unwrap();
        assert!(l_any.is_zero());
    }

    #[test]
    fn lambda_expansion_and_divisibility() {
        let m = toy();
        assert_eq!(m.lambda_u2_pullback().unwrap(), vec![int(0), int(1), int(2)]);
        let div = m.exceptional_divisibility().unwrap();
        assert_eq!(div.p, frac(2, 1));
        assert_eq!(div.q, frac(1, 1));
        assert!(!div.divisibility_flag);
        assert_eq!(div.primitive_coeffs, (frac(2, 1), frac(1, 1)));
    }

    #[test]
    fn fact_consistency() {
        let m = toy();
        let fact = m.known_cartier_facts[0].clone();
        let c = m.check_cartier_fact(&fact).unwrap();
        assert_eq!(c.gamma_prime_intersection, frac(-1, 1));
        assert_eq!(c.expected_gamma_prime, int(-1));
        assert!(c.surviving_shift.is_empty());
        assert!(c.matches_lambda_expansion);
        assert_eq!(c.pullback, vec![int(0), int(1), int(2)]);
    }

    #[test]
    fn torsion_free_toy() {
        assert!(toy().torsion_report().unwrap().is_empty());
    }

    #[test]
    fn weil_classes_reduce_over_the_class_group() {
        let m = toy();
        // S̃ + 2T̃ restricts to 2B on the base: the exceptional part drops.
        let class = m.weil_class_of(&[int(0), int(1), int(2)]).unwrap();
        assert_eq!(class.to_string(), "2·B");
        let zero = m.weil_class_of(&[int(0), int(3), int(0)]).unwrap();
        assert_eq!(zero.to_string(), "0");
        assert!(m.weil_class_of(&[int(1)]).is_err());
    }

    #[test]
    fn smooth_model_is_locally_factorial() {
        // No exceptional divisor, nothing contracted: every Weil divisor is
        // Cartier and the index is 1.
        let mut m = toy();
        m.exceptional = vec![int(0), int(0), int(0)];
        m.curves.retain(|c| !c.contracted);
        assert_eq!(m.factoriality_index().unwrap(), int(1));
        assert!(m.torsion_report().unwrap().is_empty());
        assert_eq!(m.cartier_subgroup().unwrap().len(), 3);
    }

    #[test]
    fn json_round_trip_and_schema() {
        let m = toy();
        let text = m.to_json();
        let back = ResolutionModel::from_json(&text).unwrap();
        assert_eq!(m, back);
        assert_eq!(text, back.to_json());

        // Unknown fields are rejected.
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v.as_object_mut()
            .unwrap()
            .insert("surprise".into(), serde_json::Value::Null);
        assert!(ResolutionModel::from_json(&v.to_string()).is_err());

        // Non-integer numbers are rejected.
        let bad = text.replace("\"mu_rank\": 1", "\"mu_rank\": 1, \"beauville_gram2\": 1");
        assert!(ResolutionModel::from_json(&bad).is_err());
        let bad = text.replacen("-6", "-6.5", 1);
        assert!(ResolutionModel::from_json(&bad).is_err());
    }

    #[test]
    fn huge_integers_survive_the_wire() {
        let mut m = toy();
        let huge = Int::from_str("123456789012345678901234567890123456789").unwrap();
        *m.beauville_gram.at_mut(0, 0) = huge.clone();
        let back = ResolutionModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back.beauville_gram.at(0, 0), &huge);
    }
}
