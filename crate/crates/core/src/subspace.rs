//! Canonical subspaces of `Q^n`, complements, and quotient spaces realized as
//! coordinate spaces.
//!
//! A [`Subspace`] stores the nonzero rows of a reduced row-echelon form, so
//! two subspaces are equal exactly when their stored bases are identical.
//! Complements are always the orthogonal complement under the standard dot
//! product, which makes every construction here deterministic.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Subspace {
    #[serde(rename = "ambient")]
    ambient_dim: usize,
    basis: RatMatrix,
}

/// `within = part ⊕ complement`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplementWitness {
    pub within: Subspace,
    pub part: Subspace,
    pub complement: Subspace,
}

/// `Q^n / killed`, identified with `Q^q` through a surjection `projection`
/// (kernel exactly `killed`) and a right inverse `section` whose image is the
/// orthogonal complement of `killed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientStructure {
    pub ambient_dim: usize,
    pub killed: Subspace,
    pub quotient_dim: usize,
    pub projection: RatMatrix,
    pub section: RatMatrix,
}

fn check_ambient(op: &'static str, u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient_dim != v.ambient_dim {
        return Err(Error::dim(
            op,
            format!("ambient dimensions {} and {}", u.ambient_dim, v.ambient_dim),
        ));
    }
    Ok(())
}

impl Subspace {
    /// Row space of `rows`.
    pub fn from_rows(rows: RatMatrix) -> Self {
        let ambient_dim = rows.cols();
        let r = rows.rref();
        let basis = r.reduced.submatrix(0..r.rank, 0..ambient_dim);
        Subspace { ambient_dim, basis }
    }

    pub fn span(ambient_dim: usize, vectors: &[Vec<Rational>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::dim(
                "span",
                format!("vector of length {} in Q^{ambient_dim}", v.len()),
            ));
        }
        let rows = RatMatrix::from_rows(vectors.to_vec(), ambient_dim)?;
        Ok(Self::from_rows(rows))
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: RatMatrix::zeros(0, ambient_dim),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: RatMatrix::identity(ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Canonical basis, one vector per row.
    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<Rational>> {
        self.basis.row_vectors().map(<[Rational]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    /// Membership test by reduction against the echelon basis.
    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        let mut residual = v.to_vec();
        for row in self.basis.row_vectors() {
            let pivot = row
                .iter()
                .position(|x| !x.is_zero())
                .expect("echelon rows are nonzero");
            let coeff = residual[pivot].clone();
            if coeff.is_zero() {
                continue;
            }
            for (r, b) in residual.iter_mut().zip(row) {
                *r -= &coeff * b;
            }
        }
        residual.iter().all(Zero::is_zero)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        check_ambient("sum", self, other)?;
        Ok(Self::from_rows(self.basis.vstack(&other.basis)?))
    }

    /// `U ∩ V` from the kernel of `[Uᵀ | -Vᵀ]`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        check_ambient("intersect", self, other)?;
        let k = self.dim();
        let ut = self.basis.transpose();
        let stacked = ut.hstack(&(-&other.basis.transpose()))?;
        let coeffs = stacked.kernel_basis();
        // Only the U-coordinates are needed: x ↦ Uᵀx.
        let u_coeffs = coeffs.basis().column_range(0, k);
        Ok(Self::from_rows(&u_coeffs * &self.basis))
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        check_ambient("contains", self, other)?;
        Ok(other.basis.row_vectors().all(|v| self.contains_vector(v)))
    }

    /// `dim(self / sub)`; requires `sub ⊆ self`.
    pub fn quotient_dim(&self, sub: &Subspace) -> Result<usize> {
        if !self.contains(sub)? {
            return Err(Error::Precondition(
                "quotient_dim requires the second subspace inside the first".into(),
            ));
        }
        Ok(self.dim() - sub.dim())
    }

    /// Orthogonal complement of `self` inside the whole ambient space.
    pub fn orthogonal_complement(&self) -> Subspace {
        self.basis.kernel_basis()
    }

    /// Orthogonal complement of `part` inside `within`.
    pub fn complement(part: &Subspace, within: &Subspace) -> Result<ComplementWitness> {
        if !within.contains(part)? {
            return Err(Error::Precondition(
                "complement requires part ⊆ within".into(),
            ));
        }
        // w = cᵀW is orthogonal to part iff (P Wᵀ) c = 0.
        let gram = &part.basis * &within.basis.transpose();
        let coeffs = gram.kernel_basis();
        let complement = Self::from_rows(coeffs.basis() * &within.basis);
        Ok(ComplementWitness {
            within: within.clone(),
            part: part.clone(),
            complement,
        })
    }

    /// Image of `self` under `map`.
    pub fn push_forward(&self, map: &RatMatrix) -> Result<Subspace> {
        if map.cols() != self.ambient_dim {
            return Err(Error::dim(
                "push_image",
                format!(
                    "{:?} applied to a subspace of Q^{}",
                    map.shape(),
                    self.ambient_dim
                ),
            ));
        }
        Ok(Self::from_rows(self.basis.try_mul(&map.transpose())?))
    }
}

/// `A(U)`.
pub fn push_image(map: &RatMatrix, u: &Subspace) -> Result<Subspace> {
    u.push_forward(map)
}

impl ComplementWitness {
    /// Direct-sum laws: `part ⊆ within`, `part ∩ complement = 0`,
    /// `part + complement = within`.
    pub fn holds(&self) -> bool {
        is_direct_sum(&self.part, &self.complement, &self.within)
    }
}

/// Whether `whole = a ⊕ b`.
pub fn is_direct_sum(a: &Subspace, b: &Subspace, whole: &Subspace) -> bool {
    let (Ok(sum), Ok(meet)) = (a.sum(b), a.intersect(b)) else {
        return false;
    };
    sum == *whole && meet.is_zero()
}

impl QuotientStructure {
    pub fn new(ambient_dim: usize, killed: &Subspace) -> Result<Self> {
        if killed.ambient_dim != ambient_dim {
            return Err(Error::dim(
                "quotient",
                format!(
                    "subspace of Q^{} quotiented from Q^{ambient_dim}",
                    killed.ambient_dim
                ),
            ));
        }
        let complement = killed.orthogonal_complement();
        let section = complement.basis.transpose();
        let quotient_dim = section.cols();
        // Coordinates along the complement: π = (σᵀσ)⁻¹σᵀ, which vanishes on
        // `killed` because σ's columns are orthogonal to it.
        let projection = if quotient_dim == 0 {
            RatMatrix::zeros(0, ambient_dim)
        } else {
            let gram = (&complement.basis * &section)
                .inverse()
                .expect("basis vectors are independent");
            &gram * &complement.basis
        };
        Ok(QuotientStructure {
            ambient_dim,
            killed: killed.clone(),
            quotient_dim,
            projection,
            section,
        })
    }

    /// `Q^n / 0`.
    pub fn trivial(ambient_dim: usize) -> Self {
        QuotientStructure {
            ambient_dim,
            killed: Subspace::zero(ambient_dim),
            quotient_dim: ambient_dim,
            projection: RatMatrix::identity(ambient_dim),
            section: RatMatrix::identity(ambient_dim),
        }
    }

    /// `σ·π`, the projection onto the complement along `killed`.
    pub fn lift_projector(&self) -> RatMatrix {
        &self.section * &self.projection
    }

    /// Checks every structural invariant exactly.
    pub fn invariants_hold(&self) -> bool {
        self.projection.shape() == (self.quotient_dim, self.ambient_dim)
            && self.section.shape() == (self.ambient_dim, self.quotient_dim)
            && self.quotient_dim + self.killed.dim() == self.ambient_dim
            && &self.projection * &self.section == RatMatrix::identity(self.quotient_dim)
            && self.projection.kernel_basis() == self.killed
            && self.section.image_basis() == self.killed.orthogonal_complement()
    }
}

pub fn quotient(ambient_dim: usize, killed: &Subspace) -> Result<QuotientStructure> {
    QuotientStructure::new(ambient_dim, killed)
}

/// The map `Ã` with `Ã·π_dom = π_cod·A`; requires `A(killed_dom) ⊆ killed_cod`.
pub fn induced_map(
    map: &RatMatrix,
    dom: &QuotientStructure,
    cod: &QuotientStructure,
) -> Result<RatMatrix> {
    if map.shape() != (cod.ambient_dim, dom.ambient_dim) {
        return Err(Error::dim(
            "induced_map",
            format!(
                "{:?} between Q^{} and Q^{}",
                map.shape(),
                dom.ambient_dim,
                cod.ambient_dim
            ),
        ));
    }
    let pushed = dom.killed.push_forward(map)?;
    if !cod.killed.contains(&pushed)? {
        return Err(Error::Precondition(
            "map does not send the killed subspace into the killed subspace".into(),
        ));
    }
    let induced = &(&cod.projection * map) * &dom.section;
    debug_assert_eq!(&induced * &dom.projection, &cod.projection * map);
    Ok(induced)
}
