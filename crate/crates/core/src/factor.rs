//! Outer actions, factor systems `(S, ω)` and the action of unit-valued
//! 1-cochains on them.

use std::fmt;

use num_integer::Integer;

use crate::algebra::{
    center, conjugation_with_inverse, inner_witness, AlgebraMap, Element, StructureAlgebra,
};
use crate::cohomology::{class_is_trivial, CoeffModule, Cochain};
use crate::error::{Error, Result};
use crate::groups::{FinAbGroup, GroupElement};
use crate::linalg::vec_scale;
use crate::scalar::{rational_nth_root, Field, RootOfUnity};

/// An invertible element with its certified two-sided inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Unit<F: Field> {
    pub value: Element<F>,
    pub inverse: Element<F>,
}

impl<F: Field> Unit<F> {
    pub fn certify(a: &StructureAlgebra<F>, x: &[F]) -> Result<Self> {
        let inverse = a
            .inverse(x)
            .ok_or_else(|| Error::NotInvertible(format!("element {}", format_element(x))))?;
        Ok(Unit {
            value: x.to_vec(),
            inverse,
        })
    }

    pub fn one(a: &StructureAlgebra<F>) -> Self {
        Unit {
            value: a.one(),
            inverse: a.one(),
        }
    }

    pub fn mul(&self, a: &StructureAlgebra<F>, other: &Self) -> Self {
        Unit {
            value: a.mul(&self.value, &other.value),
            inverse: a.mul(&other.inverse, &self.inverse),
        }
    }

    pub fn inv(&self) -> Self {
        Unit {
            value: self.inverse.clone(),
            inverse: self.value.clone(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        let ci = c.inv().expect("nonzero scalar");
        Unit {
            value: vec_scale(&self.value, c),
            inverse: vec_scale(&self.inverse, &ci),
        }
    }
}

pub(crate) fn format_element<F: Field>(x: &[F]) -> String {
    let parts: Vec<String> = x.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

/// A normalized map `G → Aut(B)`, stored for every group element in index
/// order.
#[derive(Clone, Debug)]
pub struct OuterAction<F: Field> {
    pub group: FinAbGroup,
    pub algebra: StructureAlgebra<F>,
    pub maps: Vec<AlgebraMap<F>>,
}

impl<F: Field> OuterAction<F> {
    pub fn new(group: FinAbGroup, algebra: StructureAlgebra<F>, maps: Vec<AlgebraMap<F>>) -> Result<Self> {
        if maps.len() != group.order() {
            return Err(Error::Shape(format!(
                "outer action lists {} maps for a group of order {}",
                maps.len(),
                group.order()
            )));
        }
        if !maps[0].is_identity() {
            return Err(Error::Invalid("S(0) is not the identity".into()));
        }
        for (g, m) in maps.iter().enumerate() {
            let Some(inv) = &m.inverse else {
                return Err(Error::NotInvertible(format!("S({}) has no inverse", group.element_at(g))));
            };
            if !m.matrix.mul(inv)?.is_identity() || !inv.mul(&m.matrix)?.is_identity() {
                return Err(Error::Verification(format!("stored inverse of S({}) is wrong", group.element_at(g))));
            }
            if let Some(v) = m.morphism_failure(&algebra, &algebra) {
                return Err(Error::Invalid(format!("S({}) is not an automorphism: {v}", group.element_at(g))));
            }
        }
        Ok(OuterAction { group, algebra, maps })
    }

    pub fn trivial(group: &FinAbGroup, algebra: &StructureAlgebra<F>) -> Self {
        OuterAction {
            group: group.clone(),
            algebra: algebra.clone(),
            maps: vec![AlgebraMap::identity(algebra.dim()); group.order()],
        }
    }

    /// `S(g) = C_B(u(g))` for a normalized table of units.
    pub fn inner(group: &FinAbGroup, algebra: &StructureAlgebra<F>, units: &[Unit<F>]) -> Result<Self> {
        if units.len() != group.order() {
            return Err(Error::Shape("one unit per group element expected".into()));
        }
        let maps = units
            .iter()
            .map(|u| conjugation_with_inverse(algebra, &u.value, &u.inverse))
            .collect();
        Self::new(group.clone(), algebra.clone(), maps)
    }

    /// Extends automorphisms of the canonical generators multiplicatively.
    pub fn from_generators(group: &FinAbGroup, algebra: &StructureAlgebra<F>, gens: &[AlgebraMap<F>]) -> Result<Self> {
        if gens.len() != group.rank() {
            return Err(Error::Shape("one automorphism per generator expected".into()));
        }
        let maps = group
            .elements()
            .iter()
            .map(|e| {
                let mut acc = AlgebraMap::identity(algebra.dim());
                for (i, &k) in e.residues.iter().enumerate() {
                    for _ in 0..k {
                        acc = acc.compose(&gens[i])?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(group.clone(), algebra.clone(), maps)
    }

    pub fn apply(&self, g: usize, x: &[F]) -> Element<F> {
        self.maps[g].apply(x)
    }

    /// `δ_S(g,g') = S(g) S(g') S(gg')⁻¹`.
    pub fn delta(&self, g: usize, g2: usize) -> Result<AlgebraMap<F>> {
        let t = self.group.table();
        let s = self.maps[t.add(g, g2)].inverse_map().expect("verified automorphism");
        self.maps[g].compose(&self.maps[g2])?.compose(&s)
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.group == other.group && self.maps.iter().zip(&other.maps).all(|(a, b)| a.matrix == b.matrix)
    }

    pub fn is_homomorphism(&self) -> Result<bool> {
        let n = self.group.order();
        for g in 0..n {
            for g2 in 0..n {
                if !self.delta(g, g2)?.is_identity() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Restriction to the cyclic subgroup generated by `gen`, indexed by
    /// `k ↦ k·gen`.
    pub fn restrict(&self, gen: &GroupElement) -> Result<Self> {
        self.group.check(gen)?;
        let k = self.group.order_of(gen);
        let sub = FinAbGroup::cyclic(k);
        let maps = (0..k)
            .map(|j| self.maps[self.group.index_of(&self.group.scale(gen, j as i64))].clone())
            .collect();
        Ok(OuterAction {
            group: sub,
            algebra: self.algebra.clone(),
            maps,
        })
    }
}

/// `(S, ω)` with `ω` stored for all pairs in index order.
#[derive(Clone, Debug)]
pub struct FactorSystem<F: Field> {
    pub action: OuterAction<F>,
    pub omega: Vec<Unit<F>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorViolation {
    NotNormalized(GroupElement, GroupElement),
    Delta(GroupElement, GroupElement),
    Cocycle(GroupElement, GroupElement, GroupElement),
    NotUnit(GroupElement, GroupElement),
}

impl fmt::Display for FactorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorViolation::NotNormalized(a, b) => write!(f, "ω{a}{b} ≠ 1 on an identity argument"),
            FactorViolation::Delta(a, b) => write!(f, "δ_S{a}{b} ≠ C_B(ω{a}{b})"),
            FactorViolation::Cocycle(a, b, c) => write!(f, "d_Sω{a}{b}{c} ≠ 1"),
            FactorViolation::NotUnit(a, b) => write!(f, "stored inverse of ω{a}{b} is wrong"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorReport {
    pub checks: usize,
    pub failure: Option<FactorViolation>,
}

impl FactorReport {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

impl<F: Field> FactorSystem<F> {
    /// Certifies every value of `ω` as a unit; no compatibility check.
    pub fn new(action: OuterAction<F>, omega: Vec<Element<F>>) -> Result<Self> {
        let n = action.group.order();
        if omega.len() != n * n {
            return Err(Error::Shape(format!("ω needs {} values, got {}", n * n, omega.len())));
        }
        let omega = omega
            .iter()
            .map(|x| Unit::certify(&action.algebra, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(FactorSystem { action, omega })
    }

    /// Builds and validates.
    pub fn validated(action: OuterAction<F>, omega: Vec<Element<F>>) -> Result<Self> {
        let fs = Self::new(action, omega)?;
        let report = validate_factor_system(&fs);
        match report.failure {
            None => Ok(fs),
            Some(v) => Err(Error::Verification(v.to_string())),
        }
    }

    /// `(S ≡ id, ω ≡ 1)`.
    pub fn trivial(group: &FinAbGroup, algebra: &StructureAlgebra<F>) -> Self {
        let n = group.order();
        FactorSystem {
            action: OuterAction::trivial(group, algebra),
            omega: vec![Unit::one(algebra); n * n],
        }
    }

    /// Scalar cocycle `ω(g,g') = exp(2πi·c(g,g'))·1` with trivial action.
    pub fn scalar(group: &FinAbGroup, algebra: &StructureAlgebra<F>, cocycle: &Cochain) -> Result<Self> {
        let n = group.order();
        if cocycle.degree != 2 || cocycle.group != *group {
            return Err(Error::Shape("scalar factor systems need a 2-cochain on the same group".into()));
        }
        let mut omega = Vec::with_capacity(n * n);
        for idx in 0..n * n {
            let r = cocycle
                .value_rou(&[idx / n, idx % n])
                .ok_or_else(|| Error::Invalid("scalar factor systems need μ_N coefficients".into()))?;
            let z = F::root_of_unity(&r).ok_or_else(|| Error::Unsupported(format!("the field has no root of unity {r}")))?;
            omega.push(algebra.scalar(&z));
        }
        Self::new(OuterAction::trivial(group, algebra), omega)
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.action.group
    }

    pub fn algebra(&self) -> &StructureAlgebra<F> {
        &self.action.algebra
    }

    pub fn omega(&self, g: usize, g2: usize) -> &Unit<F> {
        &self.omega[g * self.group().order() + g2]
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.action.same_as(&other.action) && self.omega.iter().zip(&other.omega).all(|(a, b)| a.value == b.value)
    }

    /// `d_S ω` on all triples, as elements of `B`.
    pub fn d_omega(&self) -> Vec<Element<F>> {
        let b = self.algebra();
        let n = self.group().order();
        let t = self.group().table();
        let mut out = Vec::with_capacity(n * n * n);
        for g in 0..n {
            for g2 in 0..n {
                for g3 in 0..n {
                    let x = self.action.apply(g, &self.omega(g2, g3).value);
                    let x = b.mul(&x, &self.omega(g, t.add(g2, g3)).value);
                    let x = b.mul(&x, &self.omega(t.add(g, g2), g3).inverse);
                    out.push(b.mul(&x, &self.omega(g, g2).inverse));
                }
            }
        }
        out
    }

    /// Restriction to the cyclic subgroup generated by `gen`.
    pub fn restrict(&self, gen: &GroupElement) -> Result<Self> {
        let action = self.action.restrict(gen)?;
        let k = action.group.order();
        let g = self.group();
        let at = |j: usize| g.index_of(&g.scale(gen, j as i64));
        let mut omega = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                omega.push(self.omega(at(a), at(b)).clone());
            }
        }
        Ok(FactorSystem { action, omega })
    }
}

/// Checks normalization, `δ_S = C_B ∘ ω` and `d_S ω = 1` exhaustively.
pub fn validate_factor_system<F: Field>(fs: &FactorSystem<F>) -> FactorReport {
    let g = fs.group();
    let n = g.order();
    let b = fs.algebra();
    let one = b.one();
    let el = |i: usize| g.element_at(i);
    let mut checks = 0;
    let fail = |v, checks| FactorReport {
        checks,
        failure: Some(v),
    };
    for x in 0..n {
        for y in 0..n {
            checks += 1;
            let w = fs.omega(x, y);
            if b.mul(&w.value, &w.inverse) != one || b.mul(&w.inverse, &w.value) != one {
                return fail(FactorViolation::NotUnit(el(x), el(y)), checks);
            }
            if (x == 0 || y == 0) && w.value != one {
                return fail(FactorViolation::NotNormalized(el(x), el(y)), checks);
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            checks += 1;
            let delta = match fs.action.delta(x, y) {
                Ok(d) => d,
                Err(_) => return fail(FactorViolation::Delta(el(x), el(y)), checks),
            };
            let w = fs.omega(x, y);
            if conjugation_with_inverse(b, &w.value, &w.inverse).matrix != delta.matrix {
                return fail(FactorViolation::Delta(el(x), el(y)), checks);
            }
        }
    }
    for (idx, v) in fs.d_omega().iter().enumerate() {
        checks += 1;
        if *v != one {
            return fail(
                FactorViolation::Cocycle(el(idx / (n * n)), el((idx / n) % n), el(idx % n)),
                checks,
            );
        }
    }
    FactorReport { checks, failure: None }
}

/// A normalized map `G → B^×`.
#[derive(Clone, Debug)]
pub struct UnitCochain<F: Field> {
    pub group: FinAbGroup,
    pub units: Vec<Unit<F>>,
}

impl<F: Field> UnitCochain<F> {
    pub fn new(group: &FinAbGroup, algebra: &StructureAlgebra<F>, values: Vec<Element<F>>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::Shape("one value per group element expected".into()));
        }
        if values[0] != algebra.one() {
            return Err(Error::Invalid("unit cochain is not normalized: h(0) ≠ 1".into()));
        }
        let units = values
            .iter()
            .map(|x| Unit::certify(algebra, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(UnitCochain {
            group: group.clone(),
            units,
        })
    }

    pub fn one(group: &FinAbGroup, algebra: &StructureAlgebra<F>) -> Self {
        UnitCochain {
            group: group.clone(),
            units: vec![Unit::one(algebra); group.order()],
        }
    }

    /// Pointwise product `(h·h')(g) = h(g) h'(g)`.
    pub fn mul(&self, algebra: &StructureAlgebra<F>, other: &Self) -> Self {
        UnitCochain {
            group: self.group.clone(),
            units: self.units.iter().zip(&other.units).map(|(a, b)| a.mul(algebra, b)).collect(),
        }
    }

    pub fn inv(&self) -> Self {
        UnitCochain {
            group: self.group.clone(),
            units: self.units.iter().map(Unit::inv).collect(),
        }
    }

    pub fn get(&self, g: usize) -> &Unit<F> {
        &self.units[g]
    }
}

/// `h.(S, ω) = ((C_B ∘ h)·S, h ∗_S ω)` with
/// `(h ∗_S ω)(g,g') = h(g) S(g)(h(g')) ω(g,g') h(gg')⁻¹`.
pub fn act_unit_cochain<F: Field>(h: &UnitCochain<F>, fs: &FactorSystem<F>) -> Result<FactorSystem<F>> {
    let b = fs.algebra();
    let g = fs.group();
    if h.group != *g {
        return Err(Error::Shape("unit cochain lives on a different group".into()));
    }
    let n = g.order();
    let t = g.table();
    let maps = (0..n)
        .map(|x| {
            let c = conjugation_with_inverse(b, &h.get(x).value, &h.get(x).inverse);
            c.compose(&fs.action.maps[x])
        })
        .collect::<Result<Vec<_>>>()?;
    let action = OuterAction {
        group: g.clone(),
        algebra: b.clone(),
        maps,
    };
    let mut omega = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let sh = Unit {
                value: fs.action.apply(x, &h.get(y).value),
                inverse: fs.action.apply(x, &h.get(y).inverse),
            };
            let u = h.get(x).mul(b, &sh).mul(b, fs.omega(x, y)).mul(b, &h.get(t.add(x, y)).inv());
            omega.push(u);
        }
    }
    Ok(FactorSystem { action, omega })
}

/// Whether `h` fixes `(S, ω)`.
pub fn stabilizer_check<F: Field>(h: &UnitCochain<F>, fs: &FactorSystem<F>) -> Result<bool> {
    Ok(act_unit_cochain(h, fs)?.same_as(fs))
}

/// `d_S h(g,g') = h(g) S(g)(h(g')) h(gg')⁻¹`.
pub fn unit_coboundary<F: Field>(h: &UnitCochain<F>, s: &OuterAction<F>) -> Vec<Element<F>> {
    let b = &s.algebra;
    let n = s.group.order();
    let t = s.group.table();
    let mut out = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let v = b.mul(&h.get(x).value, &s.apply(x, &h.get(y).value));
            out.push(b.mul(&v, &h.get(t.add(x, y)).inverse));
        }
    }
    out
}

/// Root-of-unity value of a scalar element `ζ·1`.
fn scalar_root<F: Field>(b: &StructureAlgebra<F>, x: &[F]) -> Option<RootOfUnity> {
    b.as_scalar(x)?.as_root_of_unity()
}

fn scalar_of<F: Field>(b: &StructureAlgebra<F>, x: &[F], what: &str) -> Result<F> {
    b.as_scalar(x).ok_or_else(|| {
        let central = b.is_central(x);
        Error::Unsupported(format!(
            "{what} value {} is {}; only scalar central values are searched",
            format_element(x),
            if central { "central but not scalar" } else { "not central" }
        ))
    })
}

/// Witness for `S ∼ S'`: `S' = (C_B ∘ h)·S` with `[d_S h] = 0`. The
/// returned `h` is already corrected by central torsion scalars so that
/// `d_S h ≡ 1`.
#[derive(Clone, Debug)]
pub struct KernelWitness<F: Field> {
    pub h: UnitCochain<F>,
    /// Class of `d_S h` before correction, as a `μ_N`-valued cocycle, and
    /// the trivializing 1-cochain found for it.
    pub class: Cochain,
    pub trivializer: Cochain,
}

/// G-kernel equivalence for cyclic `G = C_n`. Candidates are inner
/// witnesses of `S'(g) S(g)⁻¹` rescaled by central scalars; scalars are
/// chosen so that `d_S h` becomes a root-of-unity-valued carry cocycle,
/// whose class is then tested by exhaustive search.
pub fn kernel_equivalent<F: Field>(
    s: &OuterAction<F>,
    s2: &OuterAction<F>,
    budget: u128,
) -> Result<Option<KernelWitness<F>>> {
    let g = &s.group;
    if g.rank() > 1 || s2.group != *g {
        return Err(Error::Unsupported(
            "kernel equivalence is defined for cyclic groups; use per-generator restriction".into(),
        ));
    }
    let b = &s.algebra;
    let n = g.order();
    if n == 1 {
        let h = UnitCochain::one(g, b);
        let m = CoeffModule::mu(1)?;
        return Ok(Some(KernelWitness {
            h,
            class: Cochain::trivial(2, g, &m),
            trivializer: Cochain::trivial(1, g, &m),
        }));
    }
    // raw witnesses w_k with S'(k) = C(w_k) S(k)
    let mut raw = vec![Unit::one(b)];
    for k in 1..n {
        let phi = s2.maps[k].compose(&s.maps[k].inverse_map().expect("automorphism"))?;
        match inner_witness(b, &phi, budget) {
            Ok((value, inverse)) => raw.push(Unit { value, inverse }),
            Err(Error::NotFound(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    // scalars λ_k: λ_1 = 1, λ_{k+1} = c(k,1) λ_k, making d(k,1) = 1 for k < n-1
    let c = |h: &[Unit<F>], x: usize, y: usize| -> Result<F> {
        let v = b.mul(&b.mul(&h[x].value, &s.apply(x, &h[y].value)), &h[(x + y) % n].inverse);
        scalar_of(b, &v, "d_S h")
    };
    let mut h = raw.clone();
    for k in 1..n - 1 {
        let ck = c(&h, k, 1)?;
        h[k + 1] = raw[k + 1].scale(&ck);
    }
    // the remaining value γ = c(n-1, 1) is normalized into the torsion part
    let gamma = c(&h, n - 1, 1)?;
    let t = if gamma.as_root_of_unity().is_some() {
        F::one()
    } else {
        let q = gamma
            .as_rational()
            .ok_or_else(|| Error::Unsupported("central values cannot be normalized into roots of unity".into()))?;
        let root = rational_nth_root(&num_traits::Signed::abs(&q), n as u32)
            .ok_or_else(|| Error::Unsupported(format!("{q} has no rational {n}-th root")))?;
        F::from_rational(root).inv().expect("nonzero")
    };
    let mut tk = F::one();
    for k in 1..n {
        tk = tk * &t;
        h[k] = h[k].scale(&tk);
    }
    // the class of d_S h as a μ_N-cocycle
    let mut values = Vec::with_capacity(n * n);
    let mut order = 1u64;
    for x in 0..n {
        for y in 0..n {
            let v = if x == 0 || y == 0 { b.one() } else {
                b.mul(&b.mul(&h[x].value, &s.apply(x, &h[y].value)), &h[(x + y) % n].inverse)
            };
            let r = scalar_root(b, &v).ok_or_else(|| {
                Error::Verification("d_S h is not torsion-valued after normalization".into())
            })?;
            order = order.lcm(&r.den());
            values.push(r);
        }
    }
    let modulus = order * n as u64;
    let module = CoeffModule::mu(modulus)?;
    let class = Cochain::from_fn(2, g, &module, |a| values[a[0] * n + a[1]].exponent_in(modulus).expect("divides") as usize)?;
    let Some(trivializer) = class_is_trivial(&class, budget)? else {
        return Ok(None);
    };
    for k in 1..n {
        let r = RootOfUnity::new(-(trivializer.value(&[k]) as i64), modulus);
        let z = F::root_of_unity(&r).ok_or_else(|| Error::Unsupported(format!("the field has no root of unity {r}")))?;
        h[k] = h[k].scale(&z);
    }
    let h = UnitCochain { group: g.clone(), units: h };
    // re-verify both conditions
    for k in 0..n {
        let c = conjugation_with_inverse(b, &h.get(k).value, &h.get(k).inverse).compose(&s.maps[k])?;
        if c.matrix != s2.maps[k].matrix {
            return Err(Error::Verification("witness does not intertwine the actions".into()));
        }
    }
    if unit_coboundary(&h, s).iter().any(|v| *v != b.one()) {
        return Err(Error::Verification("corrected witness has nontrivial d_S h".into()));
    }
    Ok(Some(KernelWitness { h, class, trivializer }))
}

/// The obstruction class `ν(S) = [d_S ω]` with its verdict.
#[derive(Clone, Debug)]
pub struct Obstruction<F: Field> {
    /// The lift `ω` with `δ_S = C_B ∘ ω` used to compute the class.
    pub lift: FactorSystem<F>,
    /// `d_S ω` as a `μ_N`-valued 3-cochain.
    pub values: Cochain,
    /// Trivializing 2-cochain when the class vanishes.
    pub witness: Option<Cochain>,
    /// `(S, ω')`, validated, when the class vanishes.
    pub corrected: Option<FactorSystem<F>>,
}

impl<F: Field> Obstruction<F> {
    pub fn is_trivial(&self) -> bool {
        self.witness.is_some()
    }
}

/// Lifts `δ_S` through `C_B` (inner witnesses per pair, `1` where `δ_S` is
/// the identity) and tests whether `[d_S ω]` vanishes over central torsion
/// scalars. With `omega` given, that lift is used instead.
pub fn nu_obstruction<F: Field>(
    s: &OuterAction<F>,
    omega: Option<&[Element<F>]>,
    budget: u128,
) -> Result<Obstruction<F>> {
    let g = &s.group;
    let b = &s.algebra;
    let n = g.order();
    let lift_values = match omega {
        Some(w) => w.to_vec(),
        None => {
            let mut w = Vec::with_capacity(n * n);
            for x in 0..n {
                for y in 0..n {
                    let d = s.delta(x, y)?;
                    if x == 0 || y == 0 || d.is_identity() {
                        w.push(b.one());
                        continue;
                    }
                    match inner_witness(b, &d, budget) {
                        Ok((u, _)) => w.push(u),
                        Err(Error::NotFound(msg)) => {
                            return Err(Error::Invalid(format!(
                                "δ_S({},{}) is not inner, so S is not an outer action: {msg}",
                                g.element_at(x),
                                g.element_at(y)
                            )))
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            w
        }
    };
    let lift = FactorSystem::new(s.clone(), lift_values)?;
    // δ_S = C_B ∘ ω must hold for the lift
    for x in 0..n {
        for y in 0..n {
            let w = lift.omega(x, y);
            if conjugation_with_inverse(b, &w.value, &w.inverse).matrix != s.delta(x, y)?.matrix {
                return Err(Error::Invalid("supplied ω does not satisfy δ_S = C_B ∘ ω".into()));
            }
        }
    }
    let d = lift.d_omega();
    let mut roots = Vec::with_capacity(d.len());
    let mut order = 1u64;
    for v in &d {
        let r = scalar_root(b, v).ok_or_else(|| {
            Error::Unsupported(format!(
                "d_S ω takes the value {}, outside the central torsion scalars",
                format_element(v)
            ))
        })?;
        order = order.lcm(&r.den());
        roots.push(r);
    }
    let modulus = order * g.exponent().max(1);
    let module = CoeffModule::mu(modulus)?;
    let values = Cochain::from_fn(3, g, &module, |a| {
        roots[(a[0] * n + a[1]) * n + a[2]].exponent_in(modulus).expect("divides") as usize
    })?;
    let witness = class_is_trivial(&values, budget)?;
    let corrected = match &witness {
        None => None,
        Some(k) => {
            let mut w = Vec::with_capacity(n * n);
            for x in 0..n {
                for y in 0..n {
                    let r = RootOfUnity::new(-(k.value(&[x, y]) as i64), modulus);
                    let z = F::root_of_unity(&r)
                        .ok_or_else(|| Error::Unsupported(format!("the field has no root of unity {r}")))?;
                    w.push(vec_scale(&lift.omega(x, y).value, &z));
                }
            }
            Some(FactorSystem::validated(s.clone(), w)?)
        }
    };
    Ok(Obstruction {
        lift,
        values,
        witness,
        corrected,
    })
}

/// Central torsion scalars `ζ_N^k · 1`, `k = 0, …, N-1`.
pub fn torsion_scalars<F: Field>(b: &StructureAlgebra<F>, n: u64) -> Result<Vec<F>> {
    (0..n.max(1))
        .map(|k| {
            let r = RootOfUnity::new(k as i64, n.max(1));
            F::root_of_unity(&r)
                .map(|z| {
                    let _ = b;
                    z
                })
                .ok_or_else(|| Error::Unsupported(format!("the field has no root of unity {r}")))
        })
        .collect()
}

/// Structural units of `B` used in witness searches: the unit, then the
/// invertible basis elements.
pub fn structural_units<F: Field>(b: &StructureAlgebra<F>) -> Vec<Element<F>> {
    let mut out = vec![b.one()];
    for i in 0..b.dim() {
        let e = b.basis(i);
        if e != b.one() && b.inverse(&e).is_some() {
            out.push(e);
        }
    }
    out
}

/// Whether the centre of `B` consists of the scalars.
pub fn has_scalar_center<F: Field>(b: &StructureAlgebra<F>) -> bool {
    center(b).len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyclo;

    type A = StructureAlgebra<Cyclo>;

    fn c(k: i64) -> Cyclo {
        Cyclo::from_int(k)
    }

    fn diag_pm(m2: &A) -> Unit<Cyclo> {
        Unit::certify(m2, &[c(1), c(0), c(0), c(-1)]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let m2 = A::matrix_algebra(2).unwrap();
        let c2 = FinAbGroup::cyclic(2);
        assert!(validate_factor_system(&FactorSystem::trivial(&c2, &m2)).ok());
        let mut fs = FactorSystem::trivial(&c2, &m2);
        fs.omega[3] = diag_pm(&m2);
        let r = validate_factor_system(&fs);
        assert!(matches!(r.failure, Some(FactorViolation::Delta(_, _))));
    }

    #[test]
    fn action_examples() {
        let cc = A::matrix_algebra(1).unwrap();
        let c2 = FinAbGroup::cyclic(2);
        let fs = FactorSystem::trivial(&c2, &cc);
        let h = UnitCochain::new(&c2, &cc, vec![vec![c(1)], vec![c(-1)]]).unwrap();
        let out = act_unit_cochain(&h, &fs).unwrap();
        assert!(out.same_as(&fs));
        assert!(stabilizer_check(&h, &fs).unwrap());

        let m2 = A::matrix_algebra(2).unwrap();
        let fs = FactorSystem::trivial(&c2, &m2);
        let h = UnitCochain::new(&c2, &m2, vec![m2.one(), diag_pm(&m2).value]).unwrap();
        let out = act_unit_cochain(&h, &fs).unwrap();
        assert!(!out.action.maps[1].is_identity());
        assert_eq!(out.omega(1, 1).value, m2.one());
        assert!(validate_factor_system(&out).ok());
        assert!(!stabilizer_check(&h, &fs).unwrap());
        assert!(stabilizer_check(&UnitCochain::one(&c2, &m2), &fs).unwrap());
    }

    #[test]
    fn kernel_examples() {
        let m2 = A::matrix_algebra(2).unwrap();
        let c2 = FinAbGroup::cyclic(2);
        let id = OuterAction::trivial(&c2, &m2);
        let w = kernel_equivalent(&id, &id, 1 << 20).unwrap().unwrap();
        assert!(w.h.units.iter().all(|u| m2.as_scalar(&u.value).is_some()));
        let s2 = OuterAction::inner(&c2, &m2, &[Unit::one(&m2), diag_pm(&m2)]).unwrap();
        let w = kernel_equivalent(&id, &s2, 1 << 20).unwrap().unwrap();
        let ratio = m2.mul(&w.h.get(1).value, &diag_pm(&m2).inverse);
        assert!(m2.as_scalar(&ratio).is_some());
    }

    #[test]
    fn obstruction_examples() {
        let m2 = A::matrix_algebra(2).unwrap();
        let c2 = FinAbGroup::cyclic(2);
        let j = Unit::certify(&m2, &[c(0), c(1), c(-1), c(0)]).unwrap();
        let s = OuterAction::inner(&c2, &m2, &[Unit::one(&m2), j]).unwrap();
        let nu = nu_obstruction(&s, None, 1 << 20).unwrap();
        assert!(nu.is_trivial());
        assert!(validate_factor_system(nu.corrected.as_ref().unwrap()).ok());
        let cc = A::matrix_algebra(1).unwrap();
        let nu = nu_obstruction(&OuterAction::trivial(&FinAbGroup::new(vec![2, 2]).unwrap(), &cc), None, 1 << 20).unwrap();
        assert!(nu.is_trivial());
    }
}
