//! Graded algebras, crossed products `B ⋊_{S,ω} G` and the passage between
//! graded sections and factor systems.

use crate::algebra::{find_unit_in_subspace, verify_algebra, AlgebraMap, AxiomViolation, Element, StructureAlgebra};
use crate::cohomology::Cochain;
use crate::error::{Error, Result};
use crate::factor::{
    act_unit_cochain, format_element, structural_units, torsion_scalars, validate_factor_system, FactorSystem,
    OuterAction, Unit, UnitCochain,
};
use crate::groups::{FinAbGroup, GroupElement};
use crate::linalg::{vec_is_zero, Matrix};
use crate::scalar::Field;

/// An algebra whose basis vectors are homogeneous for a grading by `group`.
#[derive(Clone, Debug)]
pub struct GradedAlgebra<F: Field> {
    pub algebra: StructureAlgebra<F>,
    pub group: FinAbGroup,
    /// Degree (group element index) of each basis vector.
    pub grading: Vec<usize>,
    /// The degree-zero subalgebra `A_0` in its own basis.
    pub base: StructureAlgebra<F>,
    /// Basis indices spanning `A_0`, in order.
    pub zero_indices: Vec<usize>,
}

impl<F: Field> GradedAlgebra<F> {
    /// Verifies that products of basis vectors are homogeneous of the
    /// expected degree and that the unit has degree zero.
    pub fn new(algebra: StructureAlgebra<F>, group: FinAbGroup, grading: Vec<usize>) -> Result<Self> {
        let d = algebra.dim();
        let n = group.order();
        if grading.len() != d || grading.iter().any(|&g| g >= n) {
            return Err(Error::Shape("one degree per basis vector expected".into()));
        }
        let t = group.table();
        for i in 0..d {
            for j in 0..d {
                let deg = t.add(grading[i], grading[j]);
                let p = algebra.basis_product(i, j);
                if let Some(k) = (0..d).find(|&k| !p[k].is_zero() && grading[k] != deg) {
                    return Err(Error::Invalid(format!(
                        "{}·{} has a component on {} outside degree {}",
                        algebra.labels()[i],
                        algebra.labels()[j],
                        algebra.labels()[k],
                        group.element_at(deg)
                    )));
                }
            }
        }
        let zero_indices: Vec<usize> = (0..d).filter(|&i| grading[i] == 0).collect();
        let unit = algebra.one();
        if (0..d).any(|k| !unit[k].is_zero() && grading[k] != 0) {
            return Err(Error::Invalid("the unit is not homogeneous of degree zero".into()));
        }
        let restrict = |x: &[F]| -> Vec<F> { zero_indices.iter().map(|&k| x[k].clone()).collect() };
        let constants = zero_indices
            .iter()
            .map(|&i| zero_indices.iter().map(|&j| restrict(&algebra.basis_product(i, j))).collect())
            .collect();
        let labels = zero_indices.iter().map(|&i| algebra.labels()[i].clone()).collect();
        let involution = algebra.involution().and_then(|m| {
            let closed = zero_indices
                .iter()
                .all(|&j| (0..d).all(|k| m.get(k, j).is_zero() || grading[k] == 0));
            closed.then(|| {
                Matrix::from_columns(zero_indices.len(), &zero_indices.iter().map(|&j| restrict(&m.column(j))).collect::<Vec<_>>())
            })
        });
        let base = StructureAlgebra::new(labels, constants, restrict(&unit), involution)?;
        Ok(GradedAlgebra {
            algebra,
            group,
            grading,
            base,
            zero_indices,
        })
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Basis vectors of `A_g`.
    pub fn component(&self, g: usize) -> Vec<Element<F>> {
        (0..self.dim())
            .filter(|&i| self.grading[i] == g)
            .map(|i| self.algebra.basis(i))
            .collect()
    }

    pub fn is_homogeneous(&self, x: &[F], g: usize) -> bool {
        (0..self.dim()).all(|k| x[k].is_zero() || self.grading[k] == g)
    }

    pub fn embed(&self, b: &[F]) -> Element<F> {
        let mut out = self.algebra.zero();
        for (pos, &k) in self.zero_indices.iter().enumerate() {
            out[k] = b[pos].clone();
        }
        out
    }

    /// Coordinates in `A_0` of an element of degree zero.
    pub fn restrict(&self, x: &[F]) -> Option<Element<F>> {
        self.is_homogeneous(x, 0)
            .then(|| self.zero_indices.iter().map(|&k| x[k].clone()).collect())
    }
}

/// A normalized choice of homogeneous units `σ(g) ∈ A_g`.
#[derive(Clone, Debug)]
pub struct GradedSection<F: Field> {
    pub units: Vec<Unit<F>>,
}

impl<F: Field> GradedSection<F> {
    /// `σ(g) = 1·v_g` in a crossed product built by [`build_crossed_product`].
    pub fn standard(a: &GradedAlgebra<F>) -> Result<Self> {
        let d = a.base.dim();
        let one = a.base.one();
        let values = (0..a.group.order())
            .map(|g| {
                let mut x = a.algebra.zero();
                x[g * d..(g + 1) * d].clone_from_slice(&one);
                x
            })
            .collect();
        Self::new(a, values)
    }

    pub fn new(a: &GradedAlgebra<F>, values: Vec<Element<F>>) -> Result<Self> {
        if values.len() != a.group.order() {
            return Err(Error::Shape("one section value per group element expected".into()));
        }
        if values[0] != a.algebra.one() {
            return Err(Error::Invalid("section is not normalized: σ(0) ≠ 1".into()));
        }
        let mut units = Vec::with_capacity(values.len());
        for (g, x) in values.iter().enumerate() {
            if !a.is_homogeneous(x, g) {
                return Err(Error::Invalid(format!("σ({}) is not homogeneous", a.group.element_at(g))));
            }
            units.push(Unit::certify(&a.algebra, x)?);
        }
        Ok(GradedSection { units })
    }

    /// First unit found in each component: basis vectors, then the generic
    /// search.
    pub fn find(a: &GradedAlgebra<F>, budget: u128) -> Result<Self> {
        let mut values = vec![a.algebra.one()];
        for g in 1..a.group.order() {
            let space = a.component(g);
            match find_unit_in_subspace(&a.algebra, &space, &[], budget).found() {
                Some((x, _)) => values.push(x),
                None => {
                    return Err(Error::NotFound(format!(
                        "component {} contains no unit; the algebra is not strongly graded",
                        a.group.element_at(g)
                    )))
                }
            }
        }
        Self::new(a, values)
    }
}

/// `B ⋊_{S,ω} G` with basis `b_i v_g` at index `g·dim B + i` and product
/// `(b v_g)(b' v_g') = b S(g)(b') ω(g,g') v_{gg'}`. When `B` carries an
/// involution, `(b v_g)* = ω(-g,g)⁻¹ S(-g)(b*) v_{-g}` is installed if it
/// satisfies the involution axioms.
pub fn build_crossed_product<F: Field>(fs: &FactorSystem<F>) -> Result<GradedAlgebra<F>> {
    let report = validate_factor_system(fs);
    if let Some(v) = report.failure {
        return Err(Error::Verification(format!("not a factor system: {v}")));
    }
    let mut out = crossed_product_unchecked(fs)?;
    if let Some(star) = landstad_involution(fs) {
        let with = out.algebra.clone().with_involution(Some(star))?;
        match verify_algebra(&with).failure {
            None => {
                out.algebra = with;
                out.base = out.base.with_involution(fs.algebra().involution().cloned())?;
            }
            Some(AxiomViolation::InvolutionSquare(_)) | Some(AxiomViolation::InvolutionAntiMultiplicative(_, _)) => {}
            Some(v) => return Err(Error::Verification(format!("crossed product fails {v}"))),
        }
    }
    Ok(out)
}

/// The same multiplication table for arbitrary `(S, ω)`, without checking
/// the factor-system identities; the result need not be associative.
pub fn crossed_product_unchecked<F: Field>(fs: &FactorSystem<F>) -> Result<GradedAlgebra<F>> {
    let b = fs.algebra();
    let g = fs.group();
    let (d, n) = (b.dim(), g.order());
    let t = g.table();
    let dim = d * n;
    let mut labels = Vec::with_capacity(dim);
    for x in 0..n {
        for i in 0..d {
            labels.push(if x == 0 {
                b.labels()[i].clone()
            } else {
                format!("{}·v{}", b.labels()[i], g.element_at(x))
            });
        }
    }
    let mut table = Vec::with_capacity(dim * dim);
    for x in 0..n {
        for i in 0..d {
            for y in 0..n {
                for j in 0..d {
                    let s = fs.action.apply(x, &b.basis(j));
                    let v = b.mul(&b.mul(&b.basis(i), &s), &fs.omega(x, y).value);
                    let off = t.add(x, y) * d;
                    table.push(
                        v.into_iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(k, c)| (off + k, c))
                            .collect(),
                    );
                }
            }
        }
    }
    let mut unit = vec![F::zero(); dim];
    unit[..d].clone_from_slice(&b.one());
    let plain = StructureAlgebra::from_sparse(labels, table, unit, None)?;
    let grading = (0..dim).map(|k| k / d).collect();
    GradedAlgebra::new(plain, g.clone(), grading)
}

/// Matrix of `(b v_g)* = ω(-g,g)⁻¹ S(-g)(b*) v_{-g}` in the crossed-product
/// basis.
pub fn landstad_involution<F: Field>(fs: &FactorSystem<F>) -> Option<Matrix<F>> {
    let b = fs.algebra();
    b.involution()?;
    let g = fs.group();
    let (d, n) = (b.dim(), g.order());
    let t = g.table();
    let mut cols = Vec::with_capacity(d * n);
    for x in 0..n {
        let nx = t.neg(x);
        for i in 0..d {
            let bs = b.star(&b.basis(i))?;
            let v = b.mul(&fs.omega(nx, x).inverse, &fs.action.apply(nx, &bs));
            let mut col = vec![F::zero(); d * n];
            col[nx * d..(nx + 1) * d].clone_from_slice(&v);
            cols.push(col);
        }
    }
    Some(Matrix::from_columns(d * n, &cols))
}

/// `S(g)(b) = σ(g) b σ(g)⁻¹` and `ω(g,g') = σ(g)σ(g')σ(gg')⁻¹` on `B = A_0`.
pub fn extract_characteristic_class<F: Field>(a: &GradedAlgebra<F>, sigma: &GradedSection<F>) -> Result<FactorSystem<F>> {
    let alg = &a.algebra;
    let n = a.group.order();
    let t = a.group.table();
    let db = a.base.dim();
    let back = |x: &[F], what: &str| {
        a.restrict(x)
            .ok_or_else(|| Error::Verification(format!("{what} left degree zero: {}", format_element(x))))
    };
    let mut maps = Vec::with_capacity(n);
    for g in 0..n {
        let s = &sigma.units[g];
        let images = (0..db)
            .map(|i| {
                let x = alg.mul(&alg.mul(&s.value, &a.embed(&a.base.basis(i))), &s.inverse);
                back(&x, "conjugation")
            })
            .collect::<Result<Vec<_>>>()?;
        maps.push(AlgebraMap::from_images(db, &images)?);
    }
    let action = OuterAction::new(a.group.clone(), a.base.clone(), maps)?;
    let mut omega = Vec::with_capacity(n * n);
    for g in 0..n {
        for h in 0..n {
            let x = alg.mul(
                &alg.mul(&sigma.units[g].value, &sigma.units[h].value),
                &sigma.units[t.add(g, h)].inverse,
            );
            omega.push(back(&x, "ω")?);
        }
    }
    FactorSystem::validated(action, omega)
}

/// Root-of-unity exponents of a factor system whose `ω` takes scalar
/// values in `μ_n`, as a cochain in `μ_n`.
pub fn scalar_class<F: Field>(fs: &FactorSystem<F>, n: u64) -> Result<Cochain> {
    let b = fs.algebra();
    let g = fs.group();
    let m = crate::cohomology::CoeffModule::mu(n)?;
    let order = g.order();
    let mut exps = Vec::with_capacity(order * order);
    for w in &fs.omega {
        let r = b
            .as_scalar(&w.value)
            .and_then(|c| c.as_root_of_unity())
            .and_then(|r| r.exponent_in(n))
            .ok_or_else(|| Error::Invalid(format!("ω value {} is not in μ_{n}", format_element(&w.value))))?;
        exps.push(r as usize);
    }
    Cochain::from_fn(2, g, &m, |a| exps[a[0] * order + a[1]])
}

/// A graded isomorphism together with its source and target.
#[derive(Clone, Debug)]
pub struct GradedEquivalence<F: Field> {
    pub source: GradedAlgebra<F>,
    pub target: GradedAlgebra<F>,
    pub map: AlgebraMap<F>,
}

fn check_graded_iso<F: Field>(src: &GradedAlgebra<F>, tgt: &GradedAlgebra<F>, map: &AlgebraMap<F>) -> Result<()> {
    if let Some(v) = map.morphism_failure(&src.algebra, &tgt.algebra) {
        return Err(Error::Verification(format!("map is not an algebra morphism: {v}")));
    }
    let inv = map
        .inverse
        .as_ref()
        .ok_or_else(|| Error::Verification("map is not bijective".into()))?;
    if !map.matrix.mul(inv)?.is_identity() {
        return Err(Error::Verification("map is not bijective".into()));
    }
    for i in 0..src.dim() {
        if !tgt.is_homogeneous(&map.apply(&src.algebra.basis(i)), src.grading[i]) {
            return Err(Error::Verification(format!("map moves {} out of its degree", src.algebra.labels()[i])));
        }
    }
    Ok(())
}

/// `φ: A_{h.(S,ω)} → A_{(S,ω)}`, `φ(b v_g) = b h(g) v_g`.
pub fn build_equivalence<F: Field>(fs: &FactorSystem<F>, h: &UnitCochain<F>) -> Result<GradedEquivalence<F>> {
    let moved = act_unit_cochain(h, fs)?;
    let source = build_crossed_product(&moved)?;
    let target = build_crossed_product(fs)?;
    let b = fs.algebra();
    let (d, n) = (b.dim(), fs.group().order());
    let mut images = Vec::with_capacity(d * n);
    for g in 0..n {
        for i in 0..d {
            let v = b.mul(&b.basis(i), &h.get(g).value);
            let mut col = vec![F::zero(); d * n];
            col[g * d..(g + 1) * d].clone_from_slice(&v);
            images.push(col);
        }
    }
    let map = AlgebraMap::from_images(d * n, &images)?;
    check_graded_iso(&source, &target, &map)?;
    for i in 0..d {
        if map.apply(&source.algebra.basis(i)) != target.algebra.basis(i) {
            return Err(Error::Verification("equivalence does not fix B".into()));
        }
    }
    Ok(GradedEquivalence { source, target, map })
}

/// Normal form of a strongly graded algebra: the extracted factor system,
/// its crossed product and `ψ: A → B ⋊_{S,ω} G`, `ψ(a_g) = (a_g σ(g)⁻¹) v_g`.
#[derive(Clone, Debug)]
pub struct Normalization<F: Field> {
    pub factor: FactorSystem<F>,
    pub equivalence: GradedEquivalence<F>,
}

pub fn normalize_to_standard<F: Field>(a: &GradedAlgebra<F>, sigma: &GradedSection<F>) -> Result<Normalization<F>> {
    let factor = extract_characteristic_class(a, sigma)?;
    let std = build_crossed_product(&factor)?;
    let alg = &a.algebra;
    let d = a.base.dim();
    let images = (0..a.dim())
        .map(|k| {
            let g = a.grading[k];
            let y = alg.mul(&alg.basis(k), &sigma.units[g].inverse);
            let b = a
                .restrict(&y)
                .ok_or_else(|| Error::Verification("a_g σ(g)⁻¹ is not of degree zero".into()))?;
            let mut col = vec![F::zero(); std.dim()];
            col[g * d..(g + 1) * d].clone_from_slice(&b);
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    let map = AlgebraMap::from_images(std.dim(), &images)?;
    check_graded_iso(a, &std, &map)?;
    Ok(Normalization {
        factor,
        equivalence: GradedEquivalence {
            source: a.clone(),
            target: std,
            map,
        },
    })
}

/// Twist data for `A ⋊ Λ̂`.
#[derive(Clone, Debug)]
pub enum Twist<F: Field> {
    /// A genuine action `α: Λ̂ → Aut(A)`.
    Action(OuterAction<F>),
    /// A scalar 2-cocycle with values in `μ_N`, acting trivially.
    Cocycle(Cochain),
}

/// Twisted convolution algebra on `Λ̂` with values in `A`: the crossed
/// product by `(α, 1)` or `(id, ω)`. The involution is
/// `f*(λ) = α(λ)(f(-λ)*)` resp. `conj ω(λ,-λ) · f(-λ)*`, which agrees with
/// the crossed-product involution for unitary data.
pub fn build_twisted_convolution<F: Field>(a: &StructureAlgebra<F>, group: &FinAbGroup, twist: &Twist<F>) -> Result<GradedAlgebra<F>> {
    let fs = match twist {
        Twist::Action(act) => {
            if act.group != *group || act.algebra != *a {
                return Err(Error::Shape("action does not match the algebra and group".into()));
            }
            if !act.is_homomorphism()? {
                return Err(Error::Invalid("twisting action is not a group homomorphism".into()));
            }
            FactorSystem::new(act.clone(), vec![a.one(); group.order() * group.order()])?
        }
        Twist::Cocycle(c) => {
            let check = crate::cohomology::is_cocycle(c)?;
            if !check.ok {
                return Err(Error::Invalid(format!(
                    "twisting cochain is not a cocycle at {:?}",
                    check.witness.map(|w| w.map(|x| x.to_string()))
                )));
            }
            FactorSystem::scalar(group, a, c)?
        }
    };
    build_crossed_product(&fs)
}

/// Outcome of testing the restriction to one generator for a split unit.
#[derive(Clone, Debug)]
pub struct SplitTest<F: Field> {
    pub generator: GroupElement,
    pub order: usize,
    /// `a = b v_1` in the restricted crossed product with `a^order = 1`.
    pub witness: Option<Element<F>>,
    pub candidates_tried: usize,
}

impl<F: Field> SplitTest<F> {
    pub fn split(&self) -> bool {
        self.witness.is_some()
    }
}

/// Restricts `(S, ω)` to `⟨gen⟩ ≅ C_k` and searches homogeneous units
/// `a = ζ b v_1` (`ζ ∈ μ_torsion`, `b` a structural unit of `B`) with
/// `a^k = 1`.
pub fn restrict_and_test_split<F: Field>(fs: &FactorSystem<F>, gen: &GroupElement, torsion: u64) -> Result<SplitTest<F>> {
    let r = fs.restrict(gen)?;
    let k = r.group().order();
    let a = build_crossed_product(&r)?;
    let b = fs.algebra();
    let d = b.dim();
    let slot = if k > 1 { 1 } else { 0 };
    let mut tried = 0;
    for base in structural_units(b) {
        for z in torsion_scalars(b, torsion)? {
            tried += 1;
            let mut x = vec![F::zero(); a.dim()];
            for (i, c) in base.iter().enumerate() {
                x[slot * d + i] = c.clone() * &z;
            }
            if vec_is_zero(&x) {
                continue;
            }
            if a.algebra.pow(&x, k as u64) == a.algebra.one() {
                return Ok(SplitTest {
                    generator: gen.clone(),
                    order: k,
                    witness: Some(x),
                    candidates_tried: tried,
                });
            }
        }
    }
    Ok(SplitTest {
        generator: gen.clone(),
        order: k,
        witness: None,
        candidates_tried: tried,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::bilinear_cocycle;
    use crate::scalar::Cyclo;

    type A = StructureAlgebra<Cyclo>;

    fn c(k: i64) -> Cyclo {
        Cyclo::from_int(k)
    }

    #[test]
    fn trivial_factor_system_gives_group_algebra() {
        let m2 = A::matrix_algebra(2).unwrap();
        let c2 = FinAbGroup::cyclic(2);
        let fs = FactorSystem::trivial(&c2, &m2);
        let cp = build_crossed_product(&fs).unwrap();
        assert_eq!(cp.dim(), 8);
        assert!(verify_algebra(&cp.algebra).ok());
        assert!(cp.algebra.involution().is_some());
        let tensor = A::tensor(&m2, &A::group_algebra(&c2));
        assert_eq!(cp.algebra.is_commutative(), tensor.is_commutative());
        let found = GradedSection::find(&cp, 1 << 16).unwrap();
        assert!(validate_factor_system(&extract_characteristic_class(&cp, &found).unwrap()).ok());
        let mut v = cp.algebra.zero();
        v[4] = c(1);
        v[7] = c(1);
        let sigma = GradedSection::new(&cp, vec![cp.algebra.one(), v]).unwrap();
        let back = extract_characteristic_class(&cp, &sigma).unwrap();
        assert!(back.same_as(&fs));
    }

    #[test]
    fn scalar_twist_round_trip() {
        for n in 2..=4u64 {
            let g = FinAbGroup::new(vec![n, n]).unwrap();
            let cc = A::matrix_algebra(1).unwrap();
            let w = bilinear_cocycle(n).unwrap();
            let cp = build_twisted_convolution(&cc, &g, &Twist::Cocycle(w.clone())).unwrap();
            assert!(verify_algebra(&cp.algebra).ok());
            assert!(cp.algebra.involution().is_some());
            let sigma = GradedSection::find(&cp, 1 << 16).unwrap();
            let fs = extract_characteristic_class(&cp, &sigma).unwrap();
            assert_eq!(scalar_class(&fs, n).unwrap(), w);
            let norm = normalize_to_standard(&cp, &sigma).unwrap();
            assert_eq!(norm.equivalence.target.dim(), (n * n) as usize);
        }
    }

    #[test]
    fn equivalence_by_inner_twist() {
        let m2 = A::matrix_algebra(2).unwrap();
        let c2 = FinAbGroup::cyclic(2);
        let fs = FactorSystem::trivial(&c2, &m2);
        let h = UnitCochain::new(&c2, &m2, vec![m2.one(), vec![c(1), c(0), c(0), c(-1)]]).unwrap();
        let eq = build_equivalence(&fs, &h).unwrap();
        assert!(eq.map.is_morphism(&eq.source.algebra, &eq.target.algebra));
    }

    #[test]
    fn split_test_depends_on_torsion() {
        let cc = A::matrix_algebra(1).unwrap();
        let c2 = FinAbGroup::cyclic(2);
        let mut fs = FactorSystem::trivial(&c2, &cc);
        fs.omega[3] = Unit::certify(&cc, &[c(-1)]).unwrap();
        let gen = c2.element(&[1]).unwrap();
        assert!(!restrict_and_test_split(&fs, &gen, 2).unwrap().split());
        assert!(restrict_and_test_split(&fs, &gen, 4).unwrap().split());
    }
}
