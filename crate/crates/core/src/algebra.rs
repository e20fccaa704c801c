//! Finite-dimensional unital algebras given by structure constants.
//!
//! Elements are coordinate vectors in the stored basis. Involutions are
//! conjugate-linear: the `j`-th column of the involution matrix is `b_j*`
//! and `(Σ x_j b_j)* = Σ conj(x_j) b_j*`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::groups::FinAbGroup;
use crate::linalg::{unit_vector, vec_add, vec_is_zero, vec_scale, vec_sub, Matrix};
use crate::scalar::{Field, RootOfUnity};

pub type Element<F> = Vec<F>;

#[derive(Clone, PartialEq)]
pub struct StructureAlgebra<F> {
    dim: usize,
    labels: Vec<String>,
    /// Sparse coordinates of `b_i b_j` at index `i * dim + j`.
    table: Vec<Vec<(usize, F)>>,
    unit: Vec<F>,
    involution: Option<Matrix<F>>,
}

impl<F: Field> fmt::Debug for StructureAlgebra<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StructureAlgebra(dim {}, labels {:?})", self.dim, self.labels)
    }
}

fn sparse<F: Field>(v: &[F]) -> Vec<(usize, F)> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(k, x)| (k, x.clone()))
        .collect()
}

impl<F: Field> StructureAlgebra<F> {
    /// `constants[i][j]` is the coordinate vector of `b_i b_j`.
    pub fn new(
        labels: Vec<String>,
        constants: Vec<Vec<Vec<F>>>,
        unit: Vec<F>,
        involution: Option<Matrix<F>>,
    ) -> Result<Self> {
        let dim = labels.len();
        if dim == 0 {
            return Err(Error::Invalid("algebras of dimension 0 are not unital".into()));
        }
        if constants.len() != dim
            || constants.iter().any(|row| row.len() != dim || row.iter().any(|v| v.len() != dim))
        {
            return Err(Error::Shape(format!("structure constants must be {dim}x{dim}x{dim}")));
        }
        let table = constants.iter().flat_map(|row| row.iter().map(|v| sparse(v))).collect();
        Self::from_sparse(labels, table, unit, involution)
    }

    pub fn from_sparse(
        labels: Vec<String>,
        table: Vec<Vec<(usize, F)>>,
        unit: Vec<F>,
        involution: Option<Matrix<F>>,
    ) -> Result<Self> {
        let dim = labels.len();
        if dim == 0 {
            return Err(Error::Invalid("algebras of dimension 0 are not unital".into()));
        }
        if table.len() != dim * dim || table.iter().flatten().any(|(k, _)| *k >= dim) {
            return Err(Error::Shape("structure table does not match the dimension".into()));
        }
        if unit.len() != dim {
            return Err(Error::Shape(format!("unit has length {}, expected {dim}", unit.len())));
        }
        if let Some(m) = &involution {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::Shape("involution matrix has the wrong size".into()));
            }
        }
        Ok(StructureAlgebra {
            dim,
            labels,
            table,
            unit,
            involution,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn involution(&self) -> Option<&Matrix<F>> {
        self.involution.as_ref()
    }

    pub fn with_involution(mut self, inv: Option<Matrix<F>>) -> Result<Self> {
        if let Some(m) = &inv {
            if m.rows() != self.dim || m.cols() != self.dim {
                return Err(Error::Shape("involution matrix has the wrong size".into()));
            }
        }
        self.involution = inv;
        Ok(self)
    }

    pub fn one(&self) -> Element<F> {
        self.unit.clone()
    }

    pub fn zero(&self) -> Element<F> {
        vec![F::zero(); self.dim]
    }

    pub fn basis(&self, i: usize) -> Element<F> {
        unit_vector(self.dim, i)
    }

    pub fn scalar(&self, c: &F) -> Element<F> {
        vec_scale(&self.unit, c)
    }

    /// Coordinates of `b_i b_j`, dense.
    pub fn basis_product(&self, i: usize, j: usize) -> Element<F> {
        let mut out = self.zero();
        for (k, c) in &self.table[i * self.dim + j] {
            out[*k] = c.clone();
        }
        out
    }

    pub fn structure_constants(&self) -> Vec<Vec<Vec<F>>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.basis_product(i, j)).collect())
            .collect()
    }

    pub fn mul(&self, x: &[F], y: &[F]) -> Element<F> {
        let mut out = self.zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi.clone() * yj;
                for (k, t) in &self.table[i * self.dim + j] {
                    out[*k].mul_acc(&c, t);
                }
            }
        }
        out
    }

    pub fn pow(&self, x: &[F], e: u64) -> Element<F> {
        let mut acc = self.one();
        let mut base = x.to_vec();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Commutator `xy - yx`.
    pub fn commutator(&self, x: &[F], y: &[F]) -> Element<F> {
        vec_sub(&self.mul(x, y), &self.mul(y, x))
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self.table[i * self.dim + j] == self.table[j * self.dim + i]))
    }

    pub fn star(&self, x: &[F]) -> Option<Element<F>> {
        let m = self.involution.as_ref()?;
        let c: Vec<F> = x.iter().map(Field::conj).collect();
        Some(m.mul_vec(&c))
    }

    /// Matrix of `y ↦ x y`.
    pub fn left_mul_matrix(&self, x: &[F]) -> Matrix<F> {
        let cols: Vec<Vec<F>> = (0..self.dim).map(|j| self.mul(x, &self.basis(j))).collect();
        Matrix::from_columns(self.dim, &cols)
    }

    /// Matrix of `y ↦ y x`.
    pub fn right_mul_matrix(&self, x: &[F]) -> Matrix<F> {
        let cols: Vec<Vec<F>> = (0..self.dim).map(|j| self.mul(&self.basis(j), x)).collect();
        Matrix::from_columns(self.dim, &cols)
    }

    /// Two-sided inverse, certified by multiplying on both sides.
    pub fn inverse(&self, x: &[F]) -> Option<Element<F>> {
        let y = self.left_mul_matrix(x).solve(&self.unit)?;
        (self.mul(&y, x) == self.unit && self.mul(x, &y) == self.unit).then_some(y)
    }

    pub fn is_unit_element(&self, x: &[F]) -> bool {
        x == self.unit.as_slice()
    }

    pub fn is_central(&self, x: &[F]) -> bool {
        (0..self.dim).all(|i| vec_is_zero(&self.commutator(x, &self.basis(i))))
    }

    /// Recognizes `c · 1`.
    pub fn as_scalar(&self, x: &[F]) -> Option<F> {
        let k = self.unit.iter().position(|u| !u.is_zero())?;
        let c = x[k].clone() * &self.unit[k].inv()?;
        (vec_scale(&self.unit, &c) == x).then_some(c)
    }

    /// Same algebra in the basis given by the columns of `p` (new basis
    /// vector `j` = `p e_j`).
    pub fn change_basis(&self, p: &Matrix<F>, labels: Vec<String>) -> Result<Self> {
        let pinv = p
            .inverse()?
            .ok_or_else(|| Error::NotInvertible("change-of-basis matrix".into()))?;
        let d = self.dim;
        let cols: Vec<Vec<F>> = (0..d).map(|j| p.column(j)).collect();
        let mut table = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                table.push(sparse(&pinv.mul_vec(&self.mul(&cols[i], &cols[j]))));
            }
        }
        let unit = pinv.mul_vec(&self.unit);
        let involution = match &self.involution {
            // x* in new coordinates: P⁻¹ J conj(P) conj(x)
            Some(j) => Some(pinv.mul(j)?.mul(&p.map(Field::conj))?),
            None => None,
        };
        Self::from_sparse(labels, table, unit, involution)
    }

    // ---------------------------------------------------------------------
    // Builders

    /// `M_m` in the matrix-unit basis `E_ij` (index `i*m + j`) with the
    /// conjugate-transpose involution.
    pub fn matrix_algebra(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("M_0 is not unital".into()));
        }
        let d = m * m;
        let mut labels = Vec::with_capacity(d);
        for i in 0..m {
            for j in 0..m {
                labels.push(format!("E{}{}", i + 1, j + 1));
            }
        }
        let mut table = vec![Vec::new(); d * d];
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    table[(i * m + j) * d + (j * m + l)] = vec![(i * m + l, F::one())];
                }
            }
        }
        let mut unit = vec![F::zero(); d];
        for i in 0..m {
            unit[i * m + i] = F::one();
        }
        let mut inv = Matrix::zeros(d, d);
        for i in 0..m {
            for j in 0..m {
                inv.set(j * m + i, i * m + j, F::one());
            }
        }
        Self::from_sparse(labels, table, unit, Some(inv))
    }

    /// `F[G]` with basis `v_g` in group index order, `v_g* = v_{-g}`.
    pub fn group_algebra(g: &FinAbGroup) -> Self {
        let n = g.order();
        let t = g.table();
        let labels = g.elements().iter().map(|e| format!("v{e}")).collect();
        let mut table = vec![Vec::new(); n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = vec![(t.add(a, b), F::one())];
            }
        }
        let mut inv = Matrix::zeros(n, n);
        for a in 0..n {
            inv.set(t.neg(a), a, F::one());
        }
        Self::from_sparse(labels, table, unit_vector(n, 0), Some(inv)).expect("well-formed")
    }

    /// Functions on an `n`-point set with pointwise product and complex
    /// conjugation.
    pub fn function_algebra(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("functions on the empty set are not unital".into()));
        }
        let labels = (0..n).map(|p| format!("d{p}")).collect();
        let mut table = vec![Vec::new(); n * n];
        for p in 0..n {
            table[p * n + p] = vec![(p, F::one())];
        }
        Self::from_sparse(labels, table, vec![F::one(); n], Some(Matrix::identity(n)))
    }

    pub fn direct_sum(a: &Self, b: &Self) -> Self {
        let (da, db) = (a.dim, b.dim);
        let d = da + db;
        let mut labels: Vec<String> = a.labels.iter().map(|l| format!("{l}⊕0")).collect();
        labels.extend(b.labels.iter().map(|l| format!("0⊕{l}")));
        let mut table = vec![Vec::new(); d * d];
        for i in 0..da {
            for j in 0..da {
                table[i * d + j] = a.table[i * da + j].clone();
            }
        }
        for i in 0..db {
            for j in 0..db {
                table[(da + i) * d + da + j] = b.table[i * db + j].iter().map(|(k, c)| (da + k, c.clone())).collect();
            }
        }
        let mut unit = a.unit.clone();
        unit.extend(b.unit.iter().cloned());
        let involution = match (&a.involution, &b.involution) {
            (Some(ja), Some(jb)) => {
                let mut m = Matrix::zeros(d, d);
                for i in 0..da {
                    for j in 0..da {
                        m.set(i, j, ja.get(i, j).clone());
                    }
                }
                for i in 0..db {
                    for j in 0..db {
                        m.set(da + i, da + j, jb.get(i, j).clone());
                    }
                }
                Some(m)
            }
            _ => None,
        };
        Self::from_sparse(labels, table, unit, involution).expect("well-formed")
    }

    /// `A ⊗ B` with basis `a_i ⊗ b_j` at index `i * dim(B) + j`.
    pub fn tensor(a: &Self, b: &Self) -> Self {
        let (da, db) = (a.dim, b.dim);
        let d = da * db;
        let mut labels = Vec::with_capacity(d);
        for la in &a.labels {
            for lb in &b.labels {
                labels.push(format!("{la}⊗{lb}"));
            }
        }
        let mut table = vec![Vec::new(); d * d];
        for i1 in 0..da {
            for j1 in 0..db {
                for i2 in 0..da {
                    for j2 in 0..db {
                        let mut entry = Vec::new();
                        for (ka, ca) in &a.table[i1 * da + i2] {
                            for (kb, cb) in &b.table[j1 * db + j2] {
                                entry.push((ka * db + kb, ca.clone() * cb));
                            }
                        }
                        entry.sort_by_key(|e| e.0);
                        table[(i1 * db + j1) * d + i2 * db + j2] = entry;
                    }
                }
            }
        }
        let mut unit = vec![F::zero(); d];
        for (i, x) in a.unit.iter().enumerate() {
            for (j, y) in b.unit.iter().enumerate() {
                unit[i * db + j] = x.clone() * y;
            }
        }
        let involution = match (&a.involution, &b.involution) {
            (Some(ja), Some(jb)) => {
                let mut m = Matrix::zeros(d, d);
                for r1 in 0..da {
                    for c1 in 0..da {
                        let x = ja.get(r1, c1);
                        if x.is_zero() {
                            continue;
                        }
                        for r2 in 0..db {
                            for c2 in 0..db {
                                m.set(r1 * db + r2, c1 * db + c2, x.clone() * jb.get(r2, c2));
                            }
                        }
                    }
                }
                Some(m)
            }
            _ => None,
        };
        Self::from_sparse(labels, table, unit, involution).expect("well-formed")
    }

    /// Replaces the structure constant `b_i b_j`; used to build tampered
    /// examples.
    pub fn with_product(mut self, i: usize, j: usize, value: &[F]) -> Self {
        self.table[i * self.dim + j] = sparse(value);
        self
    }
}

/// Coordinates of an `m×m` matrix in the matrix-unit basis.
pub fn matrix_to_element<F: Field>(m: &Matrix<F>) -> Element<F> {
    m.entries().to_vec()
}

pub fn element_to_matrix<F: Field>(x: &[F], m: usize) -> Matrix<F> {
    Matrix::from_rows(x.chunks(m).map(<[F]>::to_vec).collect()).expect("square")
}

// -------------------------------------------------------------------------
// Verification

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    Associativity(usize, usize, usize),
    LeftUnit(usize),
    RightUnit(usize),
    InvolutionSquare(usize),
    InvolutionAntiMultiplicative(usize, usize),
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::Associativity(i, j, k) => write!(f, "associativity fails at basis triple ({i},{j},{k})"),
            AxiomViolation::LeftUnit(i) => write!(f, "1·b_{i} ≠ b_{i}"),
            AxiomViolation::RightUnit(i) => write!(f, "b_{i}·1 ≠ b_{i}"),
            AxiomViolation::InvolutionSquare(i) => write!(f, "(b_{i}*)* ≠ b_{i}"),
            AxiomViolation::InvolutionAntiMultiplicative(i, j) => write!(f, "(b_{i} b_{j})* ≠ b_{j}* b_{i}*"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraReport {
    pub checks: usize,
    pub failure: Option<AxiomViolation>,
}

impl AlgebraReport {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// Exhaustive check of associativity, unitality and, when present, the
/// involution axioms. Stops at the first violation.
pub fn verify_algebra<F: Field>(a: &StructureAlgebra<F>) -> AlgebraReport {
    let d = a.dim;
    let mut checks = 0;
    let basis: Vec<Element<F>> = (0..d).map(|i| a.basis(i)).collect();
    let prods: Vec<Element<F>> = (0..d * d).map(|ij| a.basis_product(ij / d, ij % d)).collect();
    let fail = |v, checks| AlgebraReport {
        checks,
        failure: Some(v),
    };
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                checks += 1;
                let left = a.mul(&prods[i * d + j], &basis[k]);
                let right = a.mul(&basis[i], &prods[j * d + k]);
                if left != right {
                    return fail(AxiomViolation::Associativity(i, j, k), checks);
                }
            }
        }
    }
    for i in 0..d {
        checks += 2;
        if a.mul(&a.unit, &basis[i]) != basis[i] {
            return fail(AxiomViolation::LeftUnit(i), checks);
        }
        if a.mul(&basis[i], &a.unit) != basis[i] {
            return fail(AxiomViolation::RightUnit(i), checks);
        }
    }
    if a.involution.is_some() {
        let stars: Vec<Element<F>> = basis.iter().map(|b| a.star(b).expect("involution")).collect();
        for i in 0..d {
            checks += 1;
            if a.star(&stars[i]).expect("involution") != basis[i] {
                return fail(AxiomViolation::InvolutionSquare(i), checks);
            }
        }
        for i in 0..d {
            for j in 0..d {
                checks += 1;
                let lhs = a.star(&prods[i * d + j]).expect("involution");
                if lhs != a.mul(&stars[j], &stars[i]) {
                    return fail(AxiomViolation::InvolutionAntiMultiplicative(i, j), checks);
                }
            }
        }
    }
    AlgebraReport { checks, failure: None }
}

// -------------------------------------------------------------------------
// Linear maps between algebras

/// A linear map given by its matrix (`dim target × dim source`) and, for
/// automorphisms, a verified inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraMap<F: Field> {
    pub matrix: Matrix<F>,
    pub inverse: Option<Matrix<F>>,
}

impl<F: Field> AlgebraMap<F> {
    pub fn identity(n: usize) -> Self {
        AlgebraMap {
            matrix: Matrix::identity(n),
            inverse: Some(Matrix::identity(n)),
        }
    }

    /// Wraps a matrix, computing and verifying an inverse when square.
    pub fn from_matrix(matrix: Matrix<F>) -> Result<Self> {
        let inverse = if matrix.is_square() { matrix.inverse()? } else { None };
        Ok(AlgebraMap { matrix, inverse })
    }

    /// Linear map sending `b_j` to `images[j]`.
    pub fn from_images(target_dim: usize, images: &[Element<F>]) -> Result<Self> {
        Self::from_matrix(Matrix::from_columns(target_dim, images))
    }

    pub fn apply(&self, x: &[F]) -> Element<F> {
        self.matrix.mul_vec(x)
    }

    pub fn apply_inverse(&self, x: &[F]) -> Option<Element<F>> {
        self.inverse.as_ref().map(|m| m.mul_vec(x))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let matrix = self.matrix.mul(&other.matrix)?;
        let inverse = match (&self.inverse, &other.inverse) {
            (Some(a), Some(b)) => Some(b.mul(a)?),
            _ => None,
        };
        Ok(AlgebraMap { matrix, inverse })
    }

    pub fn inverse_map(&self) -> Option<Self> {
        Some(AlgebraMap {
            matrix: self.inverse.clone()?,
            inverse: Some(self.matrix.clone()),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    /// First basis pair on which products are not preserved, or `None` when
    /// the map is a unital algebra morphism.
    pub fn morphism_failure(&self, src: &StructureAlgebra<F>, tgt: &StructureAlgebra<F>) -> Option<MorphismViolation> {
        if self.matrix.cols() != src.dim() || self.matrix.rows() != tgt.dim() {
            return Some(MorphismViolation::Shape);
        }
        if self.apply(&src.one()) != tgt.one() {
            return Some(MorphismViolation::Unit);
        }
        let images: Vec<Element<F>> = (0..src.dim()).map(|j| self.matrix.column(j)).collect();
        for i in 0..src.dim() {
            for j in 0..src.dim() {
                if self.apply(&src.basis_product(i, j)) != tgt.mul(&images[i], &images[j]) {
                    return Some(MorphismViolation::Product(i, j));
                }
            }
        }
        None
    }

    pub fn is_morphism(&self, src: &StructureAlgebra<F>, tgt: &StructureAlgebra<F>) -> bool {
        self.morphism_failure(src, tgt).is_none()
    }

    /// Morphism with a two-sided inverse.
    pub fn is_automorphism(&self, a: &StructureAlgebra<F>) -> bool {
        self.inverse.is_some() && self.is_morphism(a, a)
    }

    /// Commutes with the involutions (`φ(x*) = φ(x)*` on the basis).
    pub fn preserves_involution(&self, src: &StructureAlgebra<F>, tgt: &StructureAlgebra<F>) -> bool {
        (0..src.dim()).all(|j| {
            let b = src.basis(j);
            match (src.star(&b), tgt.star(&self.apply(&b))) {
                (Some(s), Some(t)) => self.apply(&s) == t,
                _ => false,
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    Shape,
    Unit,
    Product(usize, usize),
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismViolation::Shape => write!(f, "matrix shape does not match the algebras"),
            MorphismViolation::Unit => write!(f, "unit is not preserved"),
            MorphismViolation::Product(i, j) => write!(f, "product of basis pair ({i},{j}) is not preserved"),
        }
    }
}

/// `x ↦ u x u⁻¹`, with inverse `x ↦ u⁻¹ x u`.
pub fn conjugation_by_unit<F: Field>(a: &StructureAlgebra<F>, u: &[F]) -> Result<AlgebraMap<F>> {
    let uinv = a.inverse(u).ok_or_else(|| {
        Error::NotInvertible(format!(
            "u·x = 1 has no solution: left multiplication by u has rank {} < {}",
            a.left_mul_matrix(u).rank(),
            a.dim()
        ))
    })?;
    Ok(conjugation_with_inverse(a, u, &uinv))
}

pub(crate) fn conjugation_with_inverse<F: Field>(a: &StructureAlgebra<F>, u: &[F], uinv: &[F]) -> AlgebraMap<F> {
    let d = a.dim();
    let fwd: Vec<Element<F>> = (0..d).map(|j| a.mul(&a.mul(u, &a.basis(j)), uinv)).collect();
    let bwd: Vec<Element<F>> = (0..d).map(|j| a.mul(&a.mul(uinv, &a.basis(j)), u)).collect();
    AlgebraMap {
        matrix: Matrix::from_columns(d, &fwd),
        inverse: Some(Matrix::from_columns(d, &bwd)),
    }
}

/// Solutions `u` of `φ(b_i) u = u b_i` for every basis element.
pub fn intertwiner_space<F: Field>(a: &StructureAlgebra<F>, phi: &AlgebraMap<F>) -> Vec<Element<F>> {
    let d = a.dim();
    let mut rows: Vec<Vec<F>> = Vec::with_capacity(d * d);
    let images: Vec<Element<F>> = (0..d).map(|i| phi.matrix.column(i)).collect();
    // column k of the block for b_i is φ(b_i) b_k - b_k b_i
    let blocks: Vec<Vec<Element<F>>> = (0..d)
        .map(|i| (0..d).map(|k| vec_sub(&a.mul(&images[i], &a.basis(k)), &a.basis_product(k, i))).collect())
        .collect();
    for block in &blocks {
        for r in 0..d {
            rows.push(block.iter().map(|col| col[r].clone()).collect());
        }
    }
    Matrix::from_rows(rows).expect("rectangular").nullspace()
}

/// Constructive Skolem–Noether: an invertible `u` with `φ = Ad(u)`.
pub fn inner_witness<F: Field>(a: &StructureAlgebra<F>, phi: &AlgebraMap<F>, budget: u128) -> Result<(Element<F>, Element<F>)> {
    if phi.matrix.rows() != a.dim() || phi.matrix.cols() != a.dim() {
        return Err(Error::Shape("map does not act on this algebra".into()));
    }
    let space = intertwiner_space(a, phi);
    if space.is_empty() {
        return Err(Error::NotFound("no nonzero u with φ(x)u = ux; the map is not inner".into()));
    }
    match find_unit_in_subspace(a, &space, &[], budget) {
        UnitSearch::Found { element, inverse } => {
            if conjugation_with_inverse(a, &element, &inverse).matrix != phi.matrix {
                return Err(Error::Verification("recovered unit does not reproduce the map".into()));
            }
            Ok((element, inverse))
        }
        UnitSearch::NoUnit => Err(Error::NotFound(
            "the intertwiner space contains no unit; the map is not an inner automorphism".into(),
        )),
        UnitSearch::Undecided { evaluations } => Err(Error::BudgetExceeded {
            needed: evaluations,
            budget,
        }),
    }
}

/// Basis of the center, starting with the unit.
pub fn center<F: Field>(a: &StructureAlgebra<F>) -> Vec<Element<F>> {
    let d = a.dim();
    let mut rows = Vec::with_capacity(d * d);
    for i in 0..d {
        let cols: Vec<Element<F>> = (0..d).map(|k| a.commutator(&a.basis(k), &a.basis(i))).collect();
        for r in 0..d {
            rows.push(cols.iter().map(|c| c[r].clone()).collect());
        }
    }
    let null = Matrix::from_rows(rows).expect("rectangular").nullspace();
    extend_basis(vec![a.one()], null)
}

/// `start` followed by those vectors of `more` that enlarge the span.
pub(crate) fn extend_basis<F: Field>(start: Vec<Element<F>>, more: Vec<Element<F>>) -> Vec<Element<F>> {
    let mut out = start;
    for v in more {
        let mut trial = out.clone();
        trial.push(v.clone());
        let rows = trial.len();
        if Matrix::from_rows(trial).expect("rectangular").rank() == rows {
            out.push(v);
        }
    }
    out
}

// -------------------------------------------------------------------------
// Unit search

#[derive(Clone, Debug, PartialEq)]
pub enum UnitSearch<F: Field> {
    Found { element: Element<F>, inverse: Element<F> },
    /// The generic determinant vanishes on a full interpolation grid.
    NoUnit,
    /// The interpolation grid exceeds the evaluation budget.
    Undecided { evaluations: u128 },
}

impl<F: Field> UnitSearch<F> {
    pub fn found(self) -> Option<(Element<F>, Element<F>)> {
        match self {
            UnitSearch::Found { element, inverse } => Some((element, inverse)),
            _ => None,
        }
    }
}

fn in_span<F: Field>(space: &[Element<F>], x: &[F]) -> bool {
    if space.is_empty() {
        return vec_is_zero(x);
    }
    let m = Matrix::from_columns(x.len(), space);
    m.solve(x).is_some()
}

/// Looks for an invertible element in `span(space)`.
///
/// Candidates lying in the span are tried first. Then the generic element
/// `Σ t_i v_i` is evaluated: its left-multiplication determinant is a
/// polynomial of degree at most `dim A` in each `t_i`, so it is identically
/// zero iff it vanishes on the grid `{1, …, dim A + 1}^k`.
pub fn find_unit_in_subspace<F: Field>(
    a: &StructureAlgebra<F>,
    space: &[Element<F>],
    candidates: &[Element<F>],
    budget: u128,
) -> UnitSearch<F> {
    let try_unit = |x: &Element<F>| a.inverse(x).map(|inv| (x.clone(), inv));
    for c in candidates {
        if c.len() == a.dim() && in_span(space, c) {
            if let Some((element, inverse)) = try_unit(c) {
                return UnitSearch::Found { element, inverse };
            }
        }
    }
    let k = space.len();
    if k == 0 {
        return UnitSearch::NoUnit;
    }
    for v in space {
        if let Some((element, inverse)) = try_unit(v) {
            return UnitSearch::Found { element, inverse };
        }
    }
    let side = a.dim() as u128 + 1;
    let total = side.checked_pow(k as u32).unwrap_or(u128::MAX);
    let mut t = vec![1u64; k];
    let mut evaluations: u128 = 0;
    loop {
        if evaluations >= budget {
            return UnitSearch::Undecided { evaluations: total };
        }
        evaluations += 1;
        let mut x = a.zero();
        for (ti, v) in t.iter().zip(space) {
            x = vec_add(&x, &vec_scale(v, &F::from_int(*ti as i64)));
        }
        if let Some((element, inverse)) = try_unit(&x) {
            return UnitSearch::Found { element, inverse };
        }
        // odometer over {1..side}^k
        let mut pos = 0;
        loop {
            if pos == k {
                return UnitSearch::NoUnit;
            }
            if (t[pos] as u128) < side {
                t[pos] += 1;
                break;
            }
            t[pos] = 1;
            pos += 1;
        }
    }
}

// -------------------------------------------------------------------------
// Spectrum of a commutative split algebra

/// A character `χ` of a commutative algebra: `values[i] = χ(b_i)`, together
/// with the minimal idempotent `e` satisfying `x e = χ(x) e`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumPoint<F: Field> {
    pub values: Vec<F>,
    pub idempotent: Element<F>,
}

impl<F: Field> SpectrumPoint<F> {
    pub fn eval(&self, x: &[F]) -> F {
        let mut acc = F::zero();
        for (xi, vi) in x.iter().zip(&self.values) {
            acc.mul_acc(xi, vi);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSpectrum<F: Field> {
    pub points: Vec<SpectrumPoint<F>>,
}

impl<F: Field> FiniteSpectrum<F> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the point with the given value vector.
    pub fn position(&self, values: &[F]) -> Option<usize> {
        self.points.iter().position(|p| p.values == values)
    }
}

/// Characteristic polynomial coefficients `c_0, …, c_n` (monic, ascending)
/// by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial<F: Field>(m: &Matrix<F>) -> Vec<F> {
    let n = m.rows();
    let mut coeffs = vec![F::zero(); n + 1];
    coeffs[n] = F::one();
    let mut mk = Matrix::<F>::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = m.mul(&mk).expect("square");
        for i in 0..n {
            let x = next.get(i, i).clone() + &coeffs[n - k + 1];
            next.set(i, i, x);
        }
        let am = m.mul(&next).expect("square");
        let mut tr = F::zero();
        for i in 0..n {
            tr = tr + am.get(i, i);
        }
        let c = -(tr * &F::from_int(k as i64).inv().expect("characteristic zero"));
        coeffs[n - k] = c;
        mk = next;
    }
    coeffs
}

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    if n.is_zero() {
        return Some(vec![]);
    }
    let limit = BigInt::from(1u64 << 40);
    if n > limit {
        return None;
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let q = &n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += 1;
    }
    Some(out)
}

/// Rational roots of a polynomial with rational coefficients.
fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    let mut c: Vec<BigRational> = coeffs.to_vec();
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    let mut roots = Vec::new();
    let shift = c.iter().position(|x| !x.is_zero()).unwrap_or(0);
    if shift > 0 {
        roots.push(BigRational::zero());
    }
    let c = &c[shift..];
    if c.len() <= 1 {
        return roots;
    }
    let lcm = c.iter().fold(BigInt::one(), |acc, q| num_integer::Integer::lcm(&acc, q.denom()));
    let ints: Vec<BigInt> = c.iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let (Some(ps), Some(qs)) = (small_divisors(&ints[0]), small_divisors(ints.last().expect("nonempty"))) else {
        return roots;
    };
    for p in &ps {
        for q in &qs {
            for sign in [1, -1] {
                let r = BigRational::new(p * sign, q.clone());
                let val = ints
                    .iter()
                    .rev()
                    .fold(BigRational::zero(), |acc, a| acc * &r + BigRational::from_integer(a.clone()));
                if val.is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

fn eigen_candidates<F: Field>(m: &Matrix<F>, order: u64) -> Vec<F> {
    let mut out = vec![F::zero()];
    for k in 0..order.max(1) {
        if let Some(z) = F::root_of_unity(&RootOfUnity::new(k as i64, order.max(1))) {
            if !out.contains(&z) {
                out.push(z);
            }
        }
    }
    let cp = characteristic_polynomial(m);
    if let Some(q) = cp.iter().map(Field::as_rational).collect::<Option<Vec<_>>>() {
        for r in rational_roots(&q) {
            let x = F::from_rational(r);
            if !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// Characters of a commutative split semisimple algebra by simultaneous
/// diagonalization of the regular representation. Eigenvalues are searched
/// among `0`, the `order`-th roots of unity and the rational roots of the
/// characteristic polynomials.
pub fn spectrum<F: Field>(a: &StructureAlgebra<F>, order: u64) -> Result<FiniteSpectrum<F>> {
    if !a.is_commutative() {
        return Err(Error::Invalid("spectrum requires a commutative algebra".into()));
    }
    let d = a.dim();
    let mut blocks: Vec<Vec<Element<F>>> = vec![(0..d).map(|i| a.basis(i)).collect()];
    for i in 0..d {
        if blocks.iter().all(|b| b.len() == 1) {
            break;
        }
        let l = a.left_mul_matrix(&a.basis(i));
        let mut next = Vec::new();
        for block in blocks {
            if block.len() == 1 {
                next.push(block);
                continue;
            }
            let w = Matrix::from_columns(d, &block);
            let lw = l.mul(&w)?;
            let mut pieces = Vec::new();
            let mut found = 0;
            // restrict L to the invariant block: L W = W T
            let restricted = Matrix::from_columns(
                block.len(),
                &(0..block.len())
                    .map(|j| w.solve(&lw.column(j)).ok_or_else(|| Error::Invalid("block not invariant".into())))
                    .collect::<Result<Vec<_>>>()?,
            );
            for lambda in eigen_candidates(&restricted, order) {
                let mut shifted = restricted.clone();
                for j in 0..block.len() {
                    let x = shifted.get(j, j).clone() - &lambda;
                    shifted.set(j, j, x);
                }
                let null = shifted.nullspace();
                if null.is_empty() {
                    continue;
                }
                found += null.len();
                pieces.push(null.iter().map(|c| w.mul_vec(c)).collect::<Vec<_>>());
            }
            if found != block.len() {
                return Err(Error::Unsupported(format!(
                    "left multiplication by b_{i} is not diagonalizable over the working field"
                )));
            }
            next.extend(pieces);
        }
        blocks = next;
    }
    if let Some(b) = blocks.iter().find(|b| b.len() != 1) {
        return Err(Error::Unsupported(format!(
            "simultaneous eigenspace of dimension {}; the algebra is not split semisimple",
            b.len()
        )));
    }
    let mut points = Vec::with_capacity(d);
    for block in blocks {
        let e = &block[0];
        let k = e.iter().position(|x| !x.is_zero()).expect("nonzero eigenvector");
        let values: Vec<F> = (0..d)
            .map(|i| a.mul(&a.basis(i), e)[k].clone() * &e[k].inv().expect("nonzero"))
            .collect();
        let p = SpectrumPoint {
            idempotent: Vec::new(),
            values,
        };
        let scale = p.eval(e).inv().ok_or_else(|| Error::Unsupported("nilpotent eigenvector".into()))?;
        let idempotent = vec_scale(e, &scale);
        points.push(SpectrumPoint {
            values: p.values,
            idempotent,
        });
    }
    for p in &points {
        if p.eval(&a.one()) != F::one() {
            return Err(Error::Verification("character does not preserve the unit".into()));
        }
        for i in 0..d {
            for j in 0..d {
                if p.eval(&a.basis_product(i, j)) != p.values[i].clone() * &p.values[j] {
                    return Err(Error::Verification(format!("character not multiplicative at ({i},{j})")));
                }
            }
        }
    }
    points.sort_by_key(|p| p.idempotent.iter().position(|x| !x.is_zero()));
    Ok(FiniteSpectrum { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyclo;

    type A = StructureAlgebra<Cyclo>;

    fn c(k: i64) -> Cyclo {
        Cyclo::from_int(k)
    }

    #[test]
    fn verify_examples() {
        let c2 = A::group_algebra(&FinAbGroup::cyclic(2));
        assert!(verify_algebra(&c2).ok());
        let m2 = A::matrix_algebra(2).unwrap();
        assert!(verify_algebra(&m2).ok());
        let bad = m2.clone().with_product(0, 0, &[c(0), c(1), c(0), c(0)]);
        assert_eq!(verify_algebra(&bad).failure, Some(AxiomViolation::Associativity(0, 0, 0)));
        assert!(A::new(vec![], vec![], vec![], None).is_err());
    }

    #[test]
    fn conjugation_examples() {
        let m2 = A::matrix_algebra(2).unwrap();
        assert!(conjugation_by_unit(&m2, &m2.one()).unwrap().is_identity());
        let u = vec![c(1), c(0), c(0), c(-1)];
        let phi = conjugation_by_unit(&m2, &u).unwrap();
        assert_eq!(phi.apply(&m2.basis(0)), m2.basis(0));
        assert_eq!(phi.apply(&m2.basis(1)), vec_scale(&m2.basis(1), &c(-1)));
        assert_eq!(phi.apply(&m2.basis(2)), vec_scale(&m2.basis(2), &c(-1)));
        assert!(phi.is_automorphism(&m2));
        assert!(conjugation_by_unit(&m2, &m2.basis(1)).is_err());
        let g = A::group_algebra(&FinAbGroup::cyclic(3));
        assert!(conjugation_by_unit(&g, &g.basis(1)).unwrap().is_identity());
    }

    #[test]
    fn inner_witness_examples() {
        let m2 = A::matrix_algebra(2).unwrap();
        let (u, _) = inner_witness(&m2, &AlgebraMap::identity(4), 1 << 20).unwrap();
        assert!(m2.as_scalar(&u).is_some());
        let flip = vec![c(0), c(1), c(1), c(0)];
        let phi = conjugation_by_unit(&m2, &flip).unwrap();
        let (u, _) = inner_witness(&m2, &phi, 1 << 20).unwrap();
        assert!(u[0].is_zero() && u[3].is_zero() && u[1] == u[2]);
        let m3 = A::matrix_algebra(3).unwrap();
        let mut r = m3.zero();
        for i in 0..3 {
            r[i * 3 + i] = Cyclo::zeta_pow(3, i as i64);
        }
        let phi = conjugation_by_unit(&m3, &r).unwrap();
        let (u, _) = inner_witness(&m3, &phi, 1 << 20).unwrap();
        let ratio = u[0].inverse().unwrap();
        assert_eq!(vec_scale(&u, &ratio), r);
    }

    #[test]
    fn center_examples() {
        assert_eq!(center(&A::matrix_algebra(3).unwrap()).len(), 1);
        let k = FinAbGroup::new(vec![2, 2]).unwrap();
        let z = center(&A::group_algebra(&k));
        assert_eq!(z.len(), 4);
        assert_eq!(z[0], A::group_algebra(&k).one());
    }

    #[test]
    fn unit_search_examples() {
        let m2 = A::matrix_algebra(2).unwrap();
        let found = find_unit_in_subspace(&m2, &[m2.one()], &[], 1000).found().unwrap();
        assert_eq!(found.0, m2.one());
        assert_eq!(find_unit_in_subspace(&m2, &[m2.basis(1)], &[], 1000), UnitSearch::NoUnit);
        let (u, inv) = find_unit_in_subspace(&m2, &[m2.basis(1), m2.basis(2)], &[], 1000).found().unwrap();
        assert_eq!(m2.mul(&u, &inv), m2.one());
        assert!(matches!(
            find_unit_in_subspace(&m2, &[m2.basis(1), m2.basis(3)], &[], 3),
            UnitSearch::Undecided { .. }
        ));
    }

    #[test]
    fn spectrum_examples() {
        let f = A::function_algebra(3).unwrap();
        let s = spectrum(&f, 1).unwrap();
        assert_eq!(s.len(), 3);
        for (p, pt) in s.points.iter().enumerate() {
            assert_eq!(pt.values, f.basis(p));
        }
        let g2 = A::group_algebra(&FinAbGroup::cyclic(2));
        let s = spectrum(&g2, 2).unwrap();
        let vals: Vec<Cyclo> = s.points.iter().map(|p| p.values[1].clone()).collect();
        assert!(vals.contains(&c(1)) && vals.contains(&c(-1)));
        let g5 = A::group_algebra(&FinAbGroup::cyclic(5));
        assert_eq!(spectrum(&g5, 5).unwrap().len(), 5);
        assert!(spectrum(&A::group_algebra(&FinAbGroup::cyclic(3)), 1).is_err());
    }

    #[test]
    fn charpoly_of_rotation() {
        let m = Matrix::from_rows(vec![vec![c(0), c(-1)], vec![c(1), c(0)]]).unwrap();
        assert_eq!(characteristic_polynomial(&m), vec![c(1), c(0), c(1)]);
    }
}
