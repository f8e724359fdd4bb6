//! Surface-level arithmetic: Chern characters, Mukai vectors, Euler pairings
//! via Hirzebruch-Riemann-Roch, Hilbert polynomials, and the K-theory
//! sublattice that carries line bundles on the moduli space.
//!
//! Both surfaces in play have a rank-1 Néron-Severi lattice generated by an
//! ample class `H` with `H·H = 2`, but everything here works for any NS
//! lattice. Degree-4 classes are measured against the point class with
//! `∫[pt] = 1`, so `ch2` of a sheaf class is `(c1·c1)/2 - c2`, an integer on
//! these surfaces. The square root of the Todd class is `(1, 0, ε)` with
//! `ε = 1` on K3 surfaces and `ε = 0` on abelian ones; no formal square-root
//! machinery is needed.
//!
//! The Mukai lattice is modelled over NS by default: the moduli-space
//! computations only ever touch algebraic classes. A full-rank model of the
//! second cohomology can be attached for Betti-number bookkeeping, in which
//! case double-orthogonality against `{1, h, h²}` genuinely constrains `c1`
//! to the algebraic part; in the NS-only model that clause is vacuous. Both
//! ambients are exposed through [`Ambient`].

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::exactalg::Matrix;
use crate::lattice::{IntegralLattice, Sublattice};
use crate::{int, rat, Error, ExactMatrix, Int, Rat, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    K3,
    Abelian,
}

impl SurfaceKind {
    /// Degree-4 coefficient of the square root of the Todd class.
    pub fn sqrt_td_point(&self) -> Int {
        match self {
            SurfaceKind::K3 => int(1),
            SurfaceKind::Abelian => int(0),
        }
    }

    /// Degree-4 coefficient of the Todd class itself.
    pub fn td_point(&self) -> Int {
        match self {
            SurfaceKind::K3 => int(2),
            SurfaceKind::Abelian => int(0),
        }
    }

    /// Second Betti number of the surface.
    pub fn second_betti(&self) -> usize {
        match self {
            SurfaceKind::K3 => 22,
            SurfaceKind::Abelian => 6,
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceKind::K3 => write!(f, "K3"),
            SurfaceKind::Abelian => write!(f, "abelian"),
        }
    }
}

/// Full second-cohomology lattice with an embedding of NS into it.
#[derive(Debug, Clone)]
pub struct FullH2 {
    pub lattice: IntegralLattice,
    /// Columns are the images of the NS basis vectors.
    pub ns_embedding: ExactMatrix,
}

/// A surface with its Néron-Severi Gram data and ample generator.
#[derive(Debug, Clone)]
pub struct SurfaceModel {
    kind: SurfaceKind,
    ns: IntegralLattice,
    ample: Vec<Int>,
    full_h2: Option<FullH2>,
}

/// Which lattice the Mukai-lattice computations run over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    NsOnly,
    FullH2,
}

impl SurfaceModel {
    pub fn new(
        kind: SurfaceKind,
        ns: IntegralLattice,
        ample: Vec<Int>,
        full_h2: Option<FullH2>,
    ) -> Result<Self> {
        let square = ns.pair(&ample, &ample)?;
        if !square.is_positive() {
            return Err(Error::Model(format!(
                "ample class has non-positive self-intersection {square}"
            )));
        }
        if let Some(full) = &full_h2 {
            if full.ns_embedding.rows() != full.lattice.rank()
                || full.ns_embedding.cols() != ns.rank()
            {
                return Err(Error::Dimension(
                    "NS embedding does not match the full H2 lattice".into(),
                ));
            }
        }
        Ok(SurfaceModel {
            kind,
            ns,
            ample,
            full_h2,
        })
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn ns(&self) -> &IntegralLattice {
        &self.ns
    }

    pub fn ample(&self) -> &[Int] {
        &self.ample
    }

    pub fn full_h2(&self) -> Option<&FullH2> {
        self.full_h2.as_ref()
    }

    fn check_class(&self, c: &[Int]) -> Result<()> {
        if c.len() != self.ns.rank() {
            return Err(Error::MixedSurfaces);
        }
        Ok(())
    }

    fn ns_pair(&self, a: &[Int], b: &[Int]) -> Result<Int> {
        self.check_class(a)?;
        self.check_class(b)?;
        self.ns.pair(a, b)
    }
}

/// Chern character of a K-theory class: `(ch0, ch1, ch2·[pt])` with `ch1`
/// in NS coordinates and `ch2` an exact rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChernCharacter {
    pub ch0: Int,
    pub ch1: Vec<Int>,
    pub ch2: Rat,
}

impl ChernCharacter {
    pub fn new(ch0: Int, ch1: Vec<Int>, ch2: Rat) -> Self {
        ChernCharacter { ch0, ch1, ch2 }
    }

    /// Character of the structure sheaf.
    pub fn unit(ns_rank: usize) -> Self {
        ChernCharacter::new(int(1), vec![int(0); ns_rank], rat(0))
    }

    /// Character of the point class.
    pub fn point(ns_rank: usize) -> Self {
        ChernCharacter::new(int(0), vec![int(0); ns_rank], rat(1))
    }

    /// Character of a sheaf class with the given rank, first Chern class and
    /// second Chern class: `ch2 = (c1·c1)/2 - c2`.
    pub fn of_sheaf(surface: &SurfaceModel, rank: Int, c1: Vec<Int>, c2: Int) -> Result<Self> {
        let sq = surface.ns_pair(&c1, &c1)?;
        let ch2 = Rat::new(sq, int(2)) - Rat::from_integer(c2);
        Ok(ChernCharacter::new(rank, c1, ch2))
    }

    /// Character of the line bundle with first Chern class `c1`.
    pub fn of_line_bundle(surface: &SurfaceModel, c1: Vec<Int>) -> Result<Self> {
        Self::of_sheaf(surface, int(1), c1, int(0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.ch1.len() != other.ch1.len() {
            return Err(Error::MixedSurfaces);
        }
        Ok(ChernCharacter::new(
            self.ch0.clone() + &other.ch0,
            self.ch1.iter().zip(&other.ch1).map(|(a, b)| a + b).collect(),
            self.ch2.clone() + &other.ch2,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.ch1.len() != other.ch1.len() {
            return Err(Error::MixedSurfaces);
        }
        Ok(ChernCharacter::new(
            self.ch0.clone() - &other.ch0,
            self.ch1.iter().zip(&other.ch1).map(|(a, b)| a - b).collect(),
            self.ch2.clone() - &other.ch2,
        ))
    }

    pub fn scale(&self, k: &Int) -> Self {
        ChernCharacter::new(
            self.ch0.clone() * k,
            self.ch1.iter().map(|a| a * k).collect(),
            self.ch2.clone() * Rat::from_integer(k.clone()),
        )
    }
}

/// Ring product of two Chern characters on the same surface.
pub fn ch_product(
    surface: &SurfaceModel,
    a: &ChernCharacter,
    b: &ChernCharacter,
) -> Result<ChernCharacter> {
    let cross = surface.ns_pair(&a.ch1, &b.ch1)?;
    let ch1 = a
        .ch1
        .iter()
        .zip(&b.ch1)
        .map(|(x, y)| x * &b.ch0 + y * &a.ch0)
        .collect();
    let ch2 = a.ch2.clone() * Rat::from_integer(b.ch0.clone())
        + Rat::from_integer(cross)
        + b.ch2.clone() * Rat::from_integer(a.ch0.clone());
    Ok(ChernCharacter::new(a.ch0.clone() * &b.ch0, ch1, ch2))
}

/// Mukai vector `(r, c, s) = ch·√td`, integral by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MukaiVector {
    pub r: Int,
    pub c: Vec<Int>,
    pub s: Int,
}

impl MukaiVector {
    pub fn new(r: Int, c: Vec<Int>, s: Int) -> Self {
        MukaiVector { r, c, s }
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero() && self.c.iter().all(Zero::is_zero)
    }

    /// Coordinates in the Mukai lattice basis `(1, NS…, pt)`.
    pub fn coords(&self) -> Vec<Int> {
        let mut v = Vec::with_capacity(self.c.len() + 2);
        v.push(self.r.clone());
        v.extend(self.c.iter().cloned());
        v.push(self.s.clone());
        v
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![self.r.to_string()];
        parts.extend(self.c.iter().map(Int::to_string));
        parts.push(self.s.to_string());
        write!(f, "({})", parts.join(", "))
    }
}

/// `v(E) = ch(E)·√td`: `s = ch2 + r·ε`. Errors if that fails to be integral.
pub fn ch_to_mukai(surface: &SurfaceModel, ch: &ChernCharacter) -> Result<MukaiVector> {
    surface.check_class(&ch.ch1)?;
    let s = ch.ch2.clone() + Rat::from_integer(ch.ch0.clone() * surface.kind.sqrt_td_point());
    if !s.is_integer() {
        return Err(Error::Inconsistent(format!(
            "Mukai vector has non-integral degree-4 part {s}"
        )));
    }
    Ok(MukaiVector::new(ch.ch0.clone(), ch.ch1.clone(), s.to_integer()))
}

pub fn mukai_to_ch(surface: &SurfaceModel, v: &MukaiVector) -> Result<ChernCharacter> {
    surface.check_class(&v.c)?;
    let ch2 = Rat::from_integer(v.s.clone())
        - Rat::from_integer(v.r.clone() * surface.kind.sqrt_td_point());
    Ok(ChernCharacter::new(v.r.clone(), v.c.clone(), ch2))
}

/// Mukai vector of a sheaf class `(rank, c1, c2)`.
pub fn mukai_vector_of(
    surface: &SurfaceModel,
    rank: Int,
    c1: Vec<Int>,
    c2: Int,
) -> Result<MukaiVector> {
    let ch = ChernCharacter::of_sheaf(surface, rank, c1, c2)?;
    ch_to_mukai(surface, &ch)
}

/// `⟨a, b⟩ = c·c' - r·s' - s·r'`.
pub fn mukai_pairing(surface: &SurfaceModel, a: &MukaiVector, b: &MukaiVector) -> Result<Int> {
    let cross = surface.ns_pair(&a.c, &b.c)?;
    Ok(cross - a.r.clone() * &b.s - a.s.clone() * &b.r)
}

/// `ξ(α, β) = χ(α·β)`, computed two independent ways which must agree: the
/// expansion `∫ ch(α)·ch(β)·td` and the degree-4 part of the product of the
/// Mukai vectors. A mismatch is an internal fault, not an input error.
pub fn euler_pairing(
    surface: &SurfaceModel,
    a: &ChernCharacter,
    b: &ChernCharacter,
) -> Result<Rat> {
    let direct = euler_via_chern(surface, a, b)?;
    let via_mukai = euler_via_mukai(surface, a, b)?;
    if direct != via_mukai {
        return Err(Error::Inconsistent(format!(
            "Euler pairing routes disagree: {direct} vs {via_mukai}"
        )));
    }
    Ok(direct)
}

/// Degree-4 part of `ch(α)·ch(β)·td`.
pub fn euler_via_chern(
    surface: &SurfaceModel,
    a: &ChernCharacter,
    b: &ChernCharacter,
) -> Result<Rat> {
    let product = ch_product(surface, a, b)?;
    Ok(product.ch2 + Rat::from_integer(product.ch0 * surface.kind.td_point()))
}

/// Degree-4 part of `v(α)·v(β)`, with the √td twist applied to each factor.
pub fn euler_via_mukai(
    surface: &SurfaceModel,
    a: &ChernCharacter,
    b: &ChernCharacter,
) -> Result<Rat> {
    let eps = Rat::from_integer(surface.kind.sqrt_td_point());
    let ra = Rat::from_integer(a.ch0.clone());
    let sa = a.ch2.clone() + eps.clone() * ra.clone();
    let rb = Rat::from_integer(b.ch0.clone());
    let sb = b.ch2.clone() + eps * rb.clone();
    let cross = Rat::from_integer(surface.ns_pair(&a.ch1, &b.ch1)?);
    Ok(ra * sb + cross + sa * rb)
}

/// The class of the sheaves the moduli space parameterizes: Mukai vector
/// `(2, 0, -2)` on either surface.
pub fn moduli_class(surface: &SurfaceModel) -> ChernCharacter {
    let v = MukaiVector::new(int(2), vec![int(0); surface.ns.rank()], int(-2));
    mukai_to_ch(surface, &v).expect("canonical class is well-formed")
}

/// Polynomial in `n` with exact rational coefficients, `coeffs[k]·n^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertPolynomial {
    pub coeffs: Vec<Rat>,
}

impl HilbertPolynomial {
    pub fn eval(&self, n: &Int) -> Rat {
        let x = Rat::from_integer(n.clone());
        let mut acc = rat(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Coefficients divided by the rank, top degree first: the key of the
    /// reduced-polynomial ordering.
    fn reduced_desc(&self, rank: &Int) -> Vec<Rat> {
        let r = Rat::from_integer(rank.clone());
        self.coeffs.iter().rev().map(|c| c.clone() / r.clone()).collect()
    }
}

fn format_coeff(c: &Rat) -> String {
    if c.is_integer() {
        c.to_string()
    } else {
        format!("({c})")
    }
}

impl fmt::Display for HilbertPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(String, bool)> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let var = match k {
                0 => String::new(),
                1 => "n".to_string(),
                _ => format!("n^{k}"),
            };
            let body = if k > 0 && mag.is_one() {
                var
            } else if var.is_empty() {
                format_coeff(&mag)
            } else {
                format!("{}{}", format_coeff(&mag), var)
            };
            terms.push((body, c.is_negative()));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (body, negative)) in terms.iter().enumerate() {
            if i == 0 {
                if *negative {
                    write!(f, "-")?;
                }
            } else if *negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{body}")?;
        }
        Ok(())
    }
}

/// Hilbert polynomial `n ↦ χ(E ⊗ H^n)`: twist the Chern character by
/// `ch(H^n) = (1, nH, n²·(H·H)/2)` and integrate against the Todd class.
pub fn hilbert_polynomial(surface: &SurfaceModel, v: &MukaiVector) -> Result<HilbertPolynomial> {
    let ch = mukai_to_ch(surface, v)?;
    let h_sq = surface.ns_pair(surface.ample(), surface.ample())?;
    let c1_h = surface.ns_pair(&ch.ch1, surface.ample())?;
    let quadratic = Rat::from_integer(ch.ch0.clone()) * Rat::new(h_sq, int(2));
    let linear = Rat::from_integer(c1_h);
    let constant = ch.ch2.clone() + Rat::from_integer(ch.ch0.clone() * surface.kind.td_point());
    Ok(HilbertPolynomial {
        coeffs: vec![constant, linear, quadratic],
    })
}

/// Lexicographic comparison of reduced Hilbert polynomials from the top
/// degree down. Requires strictly positive ranks.
pub fn compare_reduced_hp(
    surface: &SurfaceModel,
    v1: &MukaiVector,
    v2: &MukaiVector,
) -> Result<Ordering> {
    for v in [v1, v2] {
        if !v.r.is_positive() {
            return Err(Error::NonPositiveRank(v.r.clone()));
        }
    }
    let p1 = hilbert_polynomial(surface, v1)?.reduced_desc(&v1.r);
    let p2 = hilbert_polynomial(surface, v2)?.reduced_desc(&v2.r);
    Ok(p1.cmp(&p2))
}

/// Membership in the K-theory sublattice that descends to line bundles on
/// the moduli space: ξ-orthogonal to the moduli class, with the degree-4
/// constraint (`ch2 = 0` on K3, `ch2 = rk` on abelian surfaces). In the
/// NS-only model the algebraicity of `c1` is automatic.
pub fn perp_double_perp_member(surface: &SurfaceModel, a: &ChernCharacter) -> Result<bool> {
    let e = moduli_class(surface);
    let xi = euler_pairing(surface, &e, a)?;
    let degree4 = match surface.kind {
        SurfaceKind::K3 => a.ch2.is_zero(),
        SurfaceKind::Abelian => a.ch2 == Rat::from_integer(a.ch0.clone()),
    };
    Ok(xi.is_zero() && degree4)
}

/// The additive map `(L, n) ↦ u1(L) + u2(n)` into that sublattice, built
/// from the defining K-theory expressions and reduced to a Mukai vector:
/// `u1(L) = [O - L] + (c1²(L)/2)[pt]`, and `u2(n)` is `n[O]` on K3 but
/// `n[O] + n[pt]` on abelian surfaces.
pub fn u_map(surface: &SurfaceModel, l_coeffs: &[Int], n: &Int) -> Result<MukaiVector> {
    surface.check_class(l_coeffs)?;
    let ns_rank = surface.ns.rank();
    let o = ChernCharacter::unit(ns_rank);
    let pt = ChernCharacter::point(ns_rank);
    let line = ChernCharacter::of_line_bundle(surface, l_coeffs.to_vec())?;
    let c1_sq = Rat::new(surface.ns_pair(l_coeffs, l_coeffs)?, int(2));

    let mut u1 = o.sub(&line)?;
    u1.ch2 += c1_sq;

    let u2 = match surface.kind {
        SurfaceKind::K3 => o.scale(n),
        SurfaceKind::Abelian => o.scale(n).add(&pt.scale(n))?,
    };

    ch_to_mukai(surface, &u1.add(&u2)?)
}

/// ξ-Gram matrix of the ambient K-theory model in coordinates
/// `(rank, c1…, ch2)`: the finite-rank lattice on which double-perp
/// computations can be done by brute force.
pub fn xi_gram(surface: &SurfaceModel) -> IntegralLattice {
    let g = surface.ns.gram();
    let k = g.rows();
    let td4 = surface.kind.td_point();
    let gram = Matrix::from_fn(k + 2, k + 2, |i, j| {
        if i == 0 && j == 0 {
            td4.clone()
        } else if (i, j) == (0, k + 1) || (i, j) == (k + 1, 0) {
            int(1)
        } else if (1..=k).contains(&i) && (1..=k).contains(&j) {
            g.at(i - 1, j - 1).clone()
        } else {
            int(0)
        }
    });
    let mut labels = vec!["rk".to_string()];
    labels.extend(surface.ns.basis_labels().iter().cloned());
    labels.push("ch2".to_string());
    IntegralLattice::new(gram, labels).expect("xi gram is symmetric")
}

/// The even-cohomology lattice `(1, H²-part, pt)` with the Mukai pairing.
pub fn mukai_lattice(surface: &SurfaceModel, ambient: Ambient) -> Result<IntegralLattice> {
    let middle = match ambient {
        Ambient::NsOnly => &surface.ns,
        Ambient::FullH2 => {
            &surface
                .full_h2
                .as_ref()
                .ok_or_else(|| Error::Model("no full H2 lattice attached".into()))?
                .lattice
        }
    };
    let g = middle.gram();
    let k = g.rows();
    let gram = Matrix::from_fn(k + 2, k + 2, |i, j| {
        if (i, j) == (0, k + 1) || (i, j) == (k + 1, 0) {
            int(-1)
        } else if (1..=k).contains(&i) && (1..=k).contains(&j) {
            g.at(i - 1, j - 1).clone()
        } else {
            int(0)
        }
    });
    let mut labels = vec!["1".to_string()];
    labels.extend(middle.basis_labels().iter().cloned());
    labels.push("pt".to_string());
    IntegralLattice::new(gram, labels)
}

/// Orthogonal complement of a Mukai vector in the Mukai lattice.
#[derive(Debug, Clone)]
pub struct VPerp {
    pub sublattice: Sublattice,
    /// For each basis vector `w = (r, c, r)`, the pair `(c, r)` realizing
    /// the identification of the complement with `H² ⊕ Z`. `None` when some
    /// basis vector has distinct first and last coordinates.
    pub rcr_parametrization: Option<Vec<(Vec<Int>, Int)>>,
}

/// Saturated orthogonal complement of `v` with its restricted Mukai Gram.
pub fn v_perp(surface: &SurfaceModel, v: &MukaiVector, ambient: Ambient) -> Result<VPerp> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let lattice = mukai_lattice(surface, ambient)?;
    let coords = match ambient {
        Ambient::NsOnly => v.coords(),
        Ambient::FullH2 => {
            let emb = &surface.full_h2.as_ref().expect("checked above").ns_embedding;
            let c_full = emb.mul_vec(&v.c)?;
            let mut out = Vec::with_capacity(lattice.rank());
            out.push(v.r.clone());
            out.extend(c_full);
            out.push(v.s.clone());
            out
        }
    };
    let sublattice = lattice.orthogonal_complement(&[coords])?;
    let mut params = Vec::with_capacity(sublattice.basis.len());
    let mut rcr = true;
    for w in &sublattice.basis {
        let (r, rest) = w.split_first().expect("mukai lattice has rank >= 2");
        let (s, c) = rest.split_last().expect("mukai lattice has rank >= 2");
        if r != s {
            rcr = false;
            break;
        }
        params.push((c.to_vec(), r.clone()));
    }
    Ok(VPerp {
        sublattice,
        rcr_parametrization: rcr.then_some(params),
    })
}

/// γ'-intersection of the line bundle attached to `u1(L)`: those classes
/// are pulled back along the morphism to the Donaldson-Uhlenbeck
/// compactification, which contracts γ', so the intersection vanishes.
pub fn lambda_u1_gamma_prime_intersection() -> Int {
    int(0)
}

/// γ'-intersection of the line bundle attached to `u2(n)`: computed on the
/// P¹-family of kernels of `K → C_x` via Grothendieck-Riemann-Roch; the
/// restriction of the descended bundle has degree `-n`.
pub fn lambda_u2_gamma_prime_intersection(n: &Int) -> Int {
    -n.clone()
}
