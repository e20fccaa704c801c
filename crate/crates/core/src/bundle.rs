//! Dynamical systems `(A, Λ, α)`, isotypic decomposition and certificates
//! for trivial noncommutative principal bundles.

use serde::{Deserialize, Serialize};

use crate::algebra::{
    element_to_matrix, extend_basis, find_unit_in_subspace, matrix_to_element, spectrum, AlgebraMap, Element,
    FiniteSpectrum, StructureAlgebra,
};
use crate::crossed::GradedAlgebra;
use crate::error::{Error, Result};
use crate::factor::{format_element, torsion_scalars, Unit};
use crate::groups::{Character, FinAbGroup, GroupElement};
use crate::linalg::{vec_scale, Matrix};
use crate::scalar::{Field, RootOfUnity};

/// `(A, Λ, α)` with `α(λ)` stored for every `λ` in index order.
#[derive(Clone, Debug)]
pub struct DynamicalSystem<F: Field> {
    pub algebra: StructureAlgebra<F>,
    pub group: FinAbGroup,
    pub action: Vec<AlgebraMap<F>>,
}

impl<F: Field> DynamicalSystem<F> {
    /// Checks each generator image is an automorphism, has order dividing
    /// the generator's order, and that the images commute; then extends
    /// multiplicatively.
    pub fn from_generators(algebra: StructureAlgebra<F>, group: FinAbGroup, gens: Vec<AlgebraMap<F>>) -> Result<Self> {
        if gens.len() != group.rank() {
            return Err(Error::Shape(format!(
                "{} generator automorphisms for a group of rank {}",
                gens.len(),
                group.rank()
            )));
        }
        let d = algebra.dim();
        for (i, m) in gens.iter().enumerate() {
            if m.matrix.rows() != d || m.matrix.cols() != d {
                return Err(Error::Shape(format!("α(e_{}) has the wrong size", i + 1)));
            }
            if !m.is_automorphism(&algebra) {
                return Err(Error::Invalid(format!("α(e_{}) is not an algebra automorphism", i + 1)));
            }
            let mut p = AlgebraMap::identity(d);
            for _ in 0..group.orders()[i] {
                p = p.compose(m)?;
            }
            if !p.is_identity() {
                return Err(Error::Invalid(format!(
                    "α(e_{})^{} is not the identity",
                    i + 1,
                    group.orders()[i]
                )));
            }
            for (j, m2) in gens.iter().enumerate().skip(i + 1) {
                if m.matrix.mul(&m2.matrix)? != m2.matrix.mul(&m.matrix)? {
                    return Err(Error::Invalid(format!("α(e_{}) and α(e_{}) do not commute", i + 1, j + 1)));
                }
            }
        }
        let action = group
            .elements()
            .iter()
            .map(|e| {
                let mut acc = AlgebraMap::identity(d);
                for (i, &k) in e.residues.iter().enumerate() {
                    for _ in 0..k {
                        acc = acc.compose(&gens[i])?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DynamicalSystem { algebra, group, action })
    }

    pub fn trivial(algebra: StructureAlgebra<F>, group: FinAbGroup) -> Result<Self> {
        let gens = vec![AlgebraMap::identity(algebra.dim()); group.rank()];
        Self::from_generators(algebra, group, gens)
    }

    /// Images of the canonical generators.
    pub fn generator_maps(&self) -> Vec<AlgebraMap<F>> {
        let (gens, _) = self.group.canonical_generators();
        gens.iter().map(|g| self.action[self.group.index_of(g)].clone()).collect()
    }

    pub fn apply(&self, lambda: usize, x: &[F]) -> Element<F> {
        self.action[lambda].apply(x)
    }
}

fn field_root<F: Field>(r: &RootOfUnity) -> Result<F> {
    F::root_of_unity(r).ok_or_else(|| Error::Unsupported(format!("the field has no root of unity {r}")))
}

/// Dual action on a graded algebra: `λ` scales the degree-`χ` part by
/// `χ(λ)`, identifying the grading group with the characters of `Λ`.
pub fn dual_system<F: Field>(a: &GradedAlgebra<F>) -> Result<DynamicalSystem<F>> {
    let g = &a.group;
    let (gens, _) = g.canonical_generators();
    let maps = gens
        .iter()
        .map(|lambda| {
            let diag = a
                .grading
                .iter()
                .map(|&deg| field_root(&g.pairing(&g.element_at(deg).as_character(), lambda)?))
                .collect::<Result<Vec<F>>>()?;
            AlgebraMap::from_matrix(Matrix::diagonal(&diag))
        })
        .collect::<Result<Vec<_>>>()?;
    DynamicalSystem::from_generators(a.algebra.clone(), g.clone(), maps)
}

/// `A = ⊕_φ A_φ` with projections `P_φ`, characters in index order.
#[derive(Clone, Debug)]
pub struct IsotypicDecomposition<F: Field> {
    pub characters: Vec<Character>,
    pub bases: Vec<Vec<Element<F>>>,
    pub projections: Vec<Matrix<F>>,
}

impl<F: Field> IsotypicDecomposition<F> {
    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    pub fn component(&self, phi: &Character) -> Option<&[Element<F>]> {
        self.characters.iter().position(|c| c == phi).map(|k| self.bases[k].as_slice())
    }

    pub fn contains(&self, k: usize, x: &[F]) -> bool {
        self.projections[k].mul_vec(x) == x
    }
}

/// `P_φ = |Λ|⁻¹ Σ_λ conj(φ(λ)) α(λ)`. The decomposition is certified by
/// checking that the extracted bases are joint eigenvectors with the right
/// eigenvalues, that their union is a basis of `A` and that `P_φ` acts on
/// them as the coordinate projections; idempotency, orthogonality and
/// `Σ P_φ = 1` follow. Homogeneity of products is checked on all basis
/// pairs.
pub fn fourier_decompose<F: Field>(ds: &DynamicalSystem<F>) -> Result<IsotypicDecomposition<F>> {
    let a = &ds.algebra;
    let g = &ds.group;
    let d = a.dim();
    let order = g.order();
    let inv_order = F::from_int(order as i64).inv().expect("nonzero");
    let chars = g.characters();
    let elems = g.elements();
    let mut projections = Vec::with_capacity(chars.len());
    let mut bases = Vec::with_capacity(chars.len());
    for phi in &chars {
        let mut p = Matrix::zeros(d, d);
        for (l, lambda) in elems.iter().enumerate() {
            let c = field_root::<F>(&g.pairing(phi, lambda)?)?.conj() * &inv_order;
            p = p.add(&ds.action[l].matrix.scale(&c))?;
        }
        let mut basis = p.column_space();
        if phi.residues.iter().all(|&r| r == 0) {
            basis = extend_basis(vec![a.one()], basis);
        }
        projections.push(p);
        bases.push(basis);
    }
    // certification
    let all: Vec<Element<F>> = bases.iter().flatten().cloned().collect();
    if all.len() != d || Matrix::from_rows(all.clone())?.rank() != d {
        return Err(Error::Verification(format!(
            "isotypic components have total dimension {} in an algebra of dimension {d}",
            all.len()
        )));
    }
    let (gens, _) = g.canonical_generators();
    let gen_idx: Vec<usize> = gens.iter().map(|e| g.index_of(e)).collect();
    let eig = |k: usize| -> Result<Vec<F>> {
        gens.iter().map(|e| field_root(&g.pairing(&chars[k], e)?)).collect()
    };
    let eigs = (0..chars.len()).map(eig).collect::<Result<Vec<_>>>()?;
    for (k, basis) in bases.iter().enumerate() {
        for b in basis {
            for (i, &gi) in gen_idx.iter().enumerate() {
                if ds.action[gi].apply(b) != vec_scale(b, &eigs[k][i]) {
                    return Err(Error::Verification(format!("basis vector of A_{} is not an eigenvector", chars[k])));
                }
            }
            for (j, p) in projections.iter().enumerate() {
                let img = p.mul_vec(b);
                let ok = if j == k { img == *b } else { img.iter().all(|x| x.is_zero()) };
                if !ok {
                    return Err(Error::Verification(format!("P_{} is not the projection onto A_{}", chars[j], chars[j])));
                }
            }
        }
    }
    for (k1, b1) in bases.iter().enumerate() {
        for (k2, b2) in bases.iter().enumerate() {
            let target = g.index_of(&g.add(&chars[k1].as_element(), &chars[k2].as_element()));
            for x in b1 {
                for y in b2 {
                    let xy = a.mul(x, y);
                    for (i, &gi) in gen_idx.iter().enumerate() {
                        if ds.action[gi].apply(&xy) != vec_scale(&xy, &eigs[target][i]) {
                            return Err(Error::Verification(format!(
                                "A_{}·A_{} is not contained in A_{}",
                                chars[k1],
                                chars[k2],
                                chars[target]
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(IsotypicDecomposition {
        characters: chars,
        bases,
        projections,
    })
}

/// Why a generator could not be certified.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum WitnessFailure {
    WrongShape,
    NotInComponent,
    NotInvertible,
    PowerNotOne { power: String },
    NoCandidate { tried: usize },
}

impl std::fmt::Display for WitnessFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WitnessFailure::WrongShape => write!(f, "witness has the wrong length"),
            WitnessFailure::NotInComponent => write!(f, "witness is not in the isotypic component"),
            WitnessFailure::NotInvertible => write!(f, "witness is not invertible"),
            WitnessFailure::PowerNotOne { power } => write!(f, "a^n = {power} ≠ 1"),
            WitnessFailure::NoCandidate { tried } => write!(f, "none of {tried} candidates is a unit with a^n = 1"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFailure {
    pub generator: GroupElement,
    pub failure: WitnessFailure,
}

/// Generators `λ_i`, dual characters `λ̂_i`, orders `n_i` and certified
/// witnesses `a_i ∈ A_{λ̂_i}` with `a_i^{n_i} = 1`.
#[derive(Clone, Debug)]
pub struct TrivialityCertificate<F: Field> {
    pub generators: Vec<GroupElement>,
    pub characters: Vec<Character>,
    pub orders: Vec<u64>,
    pub witnesses: Vec<Unit<F>>,
    pub transcript: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum CertifyOutcome<F: Field> {
    Certified(TrivialityCertificate<F>),
    Failed(Vec<GeneratorFailure>),
}

impl<F: Field> CertifyOutcome<F> {
    pub fn certificate(self) -> Option<TrivialityCertificate<F>> {
        match self {
            CertifyOutcome::Certified(c) => Some(c),
            CertifyOutcome::Failed(_) => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, CertifyOutcome::Certified(_))
    }
}

fn in_component<F: Field>(ds: &DynamicalSystem<F>, chi: &Character, x: &[F]) -> Result<bool> {
    let g = &ds.group;
    let (gens, _) = g.canonical_generators();
    for e in &gens {
        let z: F = field_root(&g.pairing(chi, e)?)?;
        if ds.apply(g.index_of(e), x) != vec_scale(x, &z) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_witness<F: Field>(ds: &DynamicalSystem<F>, chi: &Character, n: u64, x: &[F]) -> Result<std::result::Result<Unit<F>, WitnessFailure>> {
    let a = &ds.algebra;
    if x.len() != a.dim() {
        return Ok(Err(WitnessFailure::WrongShape));
    }
    if !in_component(ds, chi, x)? {
        return Ok(Err(WitnessFailure::NotInComponent));
    }
    let Some(inverse) = a.inverse(x) else {
        return Ok(Err(WitnessFailure::NotInvertible));
    };
    let p = a.pow(x, n);
    if p != a.one() {
        return Ok(Err(WitnessFailure::PowerNotOne {
            power: format_element(&p),
        }));
    }
    Ok(Ok(Unit {
        value: x.to_vec(),
        inverse,
    }))
}

/// Search parameters for witness discovery.
#[derive(Clone, Debug)]
pub struct WitnessSearch<F: Field> {
    pub candidates: Vec<Element<F>>,
    /// Candidates are scaled by `μ_torsion`.
    pub torsion: u64,
    pub budget: u128,
}

impl<F: Field> Default for WitnessSearch<F> {
    fn default() -> Self {
        WitnessSearch {
            candidates: Vec::new(),
            torsion: 1,
            budget: crate::cohomology::DEFAULT_BUDGET,
        }
    }
}

/// Certifies triviality relative to the canonical generators. Supplied
/// witnesses are checked as given; otherwise candidates (caller list, then
/// the component basis, then a unit found by the generic search) scaled by
/// `μ_torsion` are tried in order.
pub fn certify_trivial<F: Field>(
    ds: &DynamicalSystem<F>,
    witnesses: Option<&[Element<F>]>,
    search: &WitnessSearch<F>,
) -> Result<CertifyOutcome<F>> {
    let g = &ds.group;
    let a = &ds.algebra;
    let (gens, chars) = g.canonical_generators();
    if let Some(w) = witnesses {
        if w.len() != gens.len() {
            return Err(Error::Shape(format!("{} witnesses for {} generators", w.len(), gens.len())));
        }
    }
    let mut decomposition = None;
    let mut units = Vec::new();
    let mut failures = Vec::new();
    let mut transcript = Vec::new();
    for (i, (e, chi)) in gens.iter().zip(&chars).enumerate() {
        let n = g.orders()[i];
        let verdict = match witnesses {
            Some(w) => check_witness(ds, chi, n, &w[i])?,
            None => {
                if decomposition.is_none() {
                    decomposition = Some(fourier_decompose(ds)?);
                }
                let dec = decomposition.as_ref().expect("computed");
                let comp = dec.component(chi).expect("all characters present").to_vec();
                let mut pool: Vec<Element<F>> = search.candidates.clone();
                pool.extend(comp.iter().cloned());
                if let Some((u, _)) = find_unit_in_subspace(a, &comp, &[], search.budget).found() {
                    pool.push(u);
                }
                let scalars = torsion_scalars(a, search.torsion)?;
                let mut tried = 0;
                let mut found = None;
                'outer: for c in &pool {
                    for z in &scalars {
                        tried += 1;
                        if let Ok(u) = check_witness(ds, chi, n, &vec_scale(c, z))? {
                            found = Some(u);
                            break 'outer;
                        }
                    }
                }
                found.ok_or(WitnessFailure::NoCandidate { tried })
            }
        };
        match verdict {
            Ok(u) => {
                transcript.push(format!("a_{} ∈ A_{chi}", i + 1));
                transcript.push(format!("a_{} invertible", i + 1));
                transcript.push(format!("a_{}^{n} = 1", i + 1));
                units.push(u);
            }
            Err(failure) => failures.push(GeneratorFailure {
                generator: e.clone(),
                failure,
            }),
        }
    }
    if !failures.is_empty() {
        return Ok(CertifyOutcome::Failed(failures));
    }
    Ok(CertifyOutcome::Certified(TrivialityCertificate {
        generators: gens,
        characters: chars,
        orders: g.orders().to_vec(),
        witnesses: units,
        transcript,
    }))
}

/// Re-verifies a certificate against a system.
pub fn verify_certificate<F: Field>(ds: &DynamicalSystem<F>, cert: &TrivialityCertificate<F>) -> Result<()> {
    let values: Vec<Element<F>> = cert.witnesses.iter().map(|u| u.value.clone()).collect();
    match certify_trivial(ds, Some(&values), &WitnessSearch::default())? {
        CertifyOutcome::Certified(_) => Ok(()),
        CertifyOutcome::Failed(f) => Err(Error::Verification(format!(
            "certificate rejected at generator {}: {}",
            f[0].generator, f[0].failure
        ))),
    }
}

/// Per generator, `σ_i(l·λ̂_i) = a_i^l` for `l = 0, …, n_i − 1`.
#[derive(Clone, Debug)]
pub struct SplitWitness<F: Field> {
    pub characters: Vec<Character>,
    pub sections: Vec<Vec<Element<F>>>,
}

impl<F: Field> SplitWitness<F> {
    /// Builds the powers and verifies the homomorphism and section
    /// properties.
    pub fn from_witnesses(ds: &DynamicalSystem<F>, witnesses: &[Element<F>]) -> Result<Self> {
        let g = &ds.group;
        let a = &ds.algebra;
        let (gens, chars) = g.canonical_generators();
        if witnesses.len() != gens.len() {
            return Err(Error::Shape("one witness per generator expected".into()));
        }
        let mut sections = Vec::with_capacity(gens.len());
        for (i, w) in witnesses.iter().enumerate() {
            let n = g.orders()[i];
            let powers: Vec<Element<F>> = (0..n).map(|l| a.pow(w, l)).collect();
            for l in 0..n {
                let chi = g.scale(&chars[i].as_element(), l as i64).as_character();
                if !in_component(ds, &chi, &powers[l as usize])? {
                    return Err(Error::Verification(format!(
                        "σ_{}({l}) is not of degree {chi}",
                        i + 1
                    )));
                }
                if a.inverse(&powers[l as usize]).is_none() {
                    return Err(Error::Verification(format!("σ_{}({l}) is not invertible", i + 1)));
                }
                for m in 0..n {
                    let lhs = a.mul(&powers[l as usize], &powers[m as usize]);
                    let rhs = &powers[((l + m) % n) as usize];
                    if lhs != *rhs {
                        return Err(Error::Verification(format!(
                            "σ_{0}({l})·σ_{0}({m}) = {1} but σ_{0}({2}) = {3}",
                            i + 1,
                            format_element(&lhs),
                            (l + m) % n,
                            format_element(rhs)
                        )));
                    }
                }
            }
            sections.push(powers);
        }
        Ok(SplitWitness {
            characters: chars,
            sections,
        })
    }

    /// `a_i := σ_i(λ̂_i)`.
    pub fn to_certificate(&self, ds: &DynamicalSystem<F>) -> Result<TrivialityCertificate<F>> {
        let w: Vec<Element<F>> = self
            .sections
            .iter()
            .map(|s| s.get(1).cloned().unwrap_or_else(|| ds.algebra.one()))
            .collect();
        certify_trivial(ds, Some(&w), &WitnessSearch::default())?
            .certificate()
            .ok_or_else(|| Error::Verification("split witness does not yield a certificate".into()))
    }
}

pub fn split_witness<F: Field>(ds: &DynamicalSystem<F>, cert: &TrivialityCertificate<F>) -> Result<SplitWitness<F>> {
    verify_certificate(ds, cert)?;
    let w: Vec<Element<F>> = cert.witnesses.iter().map(|u| u.value.clone()).collect();
    SplitWitness::from_witnesses(ds, &w)
}

/// `a b⁻¹` for `a ∈ A_{λ̂_1}`, `b ∈ A_0` with `a^n = b^n`, `A_0` central.
#[derive(Clone, Debug)]
pub struct CentralNormalization<F: Field> {
    pub witness: Element<F>,
    pub a_powers: Vec<Element<F>>,
    pub b_powers: Vec<Element<F>>,
}

pub fn central_normalize<F: Field>(ds: &DynamicalSystem<F>, a_elem: &[F], b_elem: &[F]) -> Result<CentralNormalization<F>> {
    let g = &ds.group;
    let alg = &ds.algebra;
    if g.rank() == 0 {
        return Err(Error::Invalid("the trivial group has no generator to normalize".into()));
    }
    let (_, chars) = g.canonical_generators();
    let n = g.orders()[0];
    let dec = fourier_decompose(ds)?;
    let zero = &dec.bases[0];
    if let Some(x) = zero.iter().find(|x| !alg.is_central(x)) {
        return Err(Error::Invalid(format!(
            "B = A^Λ is not central in A: {} does not commute with A",
            format_element(x)
        )));
    }
    if !in_component(ds, &chars[0], a_elem)? {
        return Err(Error::Invalid("a is not in A_{λ̂_1}".into()));
    }
    if !in_component(ds, &g.identity().as_character(), b_elem)? {
        return Err(Error::Invalid("b is not in B".into()));
    }
    let binv = alg
        .inverse(b_elem)
        .ok_or_else(|| Error::NotInvertible("b".into()))?;
    if alg.inverse(a_elem).is_none() {
        return Err(Error::NotInvertible("a".into()));
    }
    if alg.pow(a_elem, n) != alg.pow(b_elem, n) {
        return Err(Error::Invalid(format!("a^{n} ≠ b^{n}")));
    }
    let witness = alg.mul(a_elem, &binv);
    if alg.pow(&witness, n) != alg.one() {
        return Err(Error::Verification("(a b⁻¹)^n ≠ 1".into()));
    }
    Ok(CentralNormalization {
        witness,
        a_powers: (0..n).map(|k| alg.pow(a_elem, k)).collect(),
        b_powers: (0..n).map(|k| alg.pow(b_elem, k)).collect(),
    })
}

/// Permutation action `χ.λ = χ ∘ α(λ)` on the spectrum of a commutative
/// algebra.
#[derive(Clone, Debug)]
pub struct SpectrumAction<F: Field> {
    pub spectrum: FiniteSpectrum<F>,
    /// `table[λ][x]` is the index of `x.λ`.
    pub table: Vec<Vec<usize>>,
    /// First `(λ, x)` with `λ ≠ 0` and `x.λ = x`.
    pub fixed: Option<(GroupElement, usize)>,
    /// Orbit label of each point, numbered by first occurrence.
    pub orbits: Vec<usize>,
}

impl<F: Field> SpectrumAction<F> {
    pub fn is_free(&self) -> bool {
        self.fixed.is_none()
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.iter().max().map_or(0, |m| m + 1)
    }
}

pub fn spectrum_action<F: Field>(ds: &DynamicalSystem<F>) -> Result<SpectrumAction<F>> {
    let a = &ds.algebra;
    let g = &ds.group;
    let spec = spectrum(a, g.exponent())?;
    let d = a.dim();
    let mut table = Vec::with_capacity(g.order());
    for m in &ds.action {
        let row = spec
            .points
            .iter()
            .map(|p| {
                let values: Vec<F> = (0..d).map(|j| p.eval(&m.matrix.column(j))).collect();
                spec.position(&values)
                    .ok_or_else(|| Error::Verification("χ ∘ α(λ) is not a spectrum point".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }
    let mut fixed = None;
    'outer: for (l, row) in table.iter().enumerate().skip(1) {
        for (x, &y) in row.iter().enumerate() {
            if x == y {
                fixed = Some((g.element_at(l), x));
                break 'outer;
            }
        }
    }
    let mut orbits = vec![usize::MAX; spec.len()];
    let mut next = 0;
    for x in 0..spec.len() {
        if orbits[x] == usize::MAX {
            for row in &table {
                orbits[row[x]] = next;
            }
            next += 1;
        }
    }
    Ok(SpectrumAction {
        spectrum: spec,
        table,
        fixed,
        orbits,
    })
}

/// The equivariant bijection `X → X/Λ × Λ`,
/// `x ↦ (orbit(x), (f_1(x), …, f_k(x)))` with `f_i(x) = χ_x(a_i)`.
#[derive(Clone, Debug)]
pub struct CoveringTrivialization {
    /// `(orbit, λ)` for each spectrum point.
    pub chart: Vec<(usize, GroupElement)>,
    pub orbit_count: usize,
}

pub fn trivialize_covering<F: Field>(ds: &DynamicalSystem<F>, cert: &TrivialityCertificate<F>) -> Result<CoveringTrivialization> {
    verify_certificate(ds, cert)?;
    let g = &ds.group;
    let act = spectrum_action(ds)?;
    if let Some((l, x)) = &act.fixed {
        return Err(Error::Verification(format!("action on the spectrum fixes point {x} under {l}")));
    }
    let mut chart = Vec::with_capacity(act.spectrum.len());
    for (x, p) in act.spectrum.points.iter().enumerate() {
        let mut res = Vec::with_capacity(cert.witnesses.len());
        for (i, w) in cert.witnesses.iter().enumerate() {
            let v = p.eval(&w.value);
            let n = cert.orders[i];
            let k = v
                .as_root_of_unity()
                .and_then(|r| r.exponent_in(n))
                .ok_or_else(|| Error::Verification(format!("f_{}(x_{x}) = {v} is not an {n}-th root of unity", i + 1)))?;
            res.push(k as i64);
        }
        chart.push((act.orbits[x], g.element(&res)?));
    }
    // equivariance f_i(x.λ) = f_i(x) λ̂_i(λ), i.e. chart(x.λ) = chart(x) + λ
    for (l, row) in act.table.iter().enumerate() {
        let lambda = g.element_at(l);
        for (x, &y) in row.iter().enumerate() {
            if chart[y].1 != g.add(&chart[x].1, &lambda) {
                return Err(Error::Verification(format!("equivariance fails at point {x} under {lambda}")));
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for (o, e) in &chart {
        if !seen.insert((*o, g.index_of(e))) {
            return Err(Error::Verification("chart is not injective".into()));
        }
    }
    Ok(CoveringTrivialization {
        chart,
        orbit_count: act.orbit_count(),
    })
}

/// Functions on `copies` disjoint copies of `Λ`, `α(λ)δ_x = δ_{x−λ}`.
/// Basis `δ_x` at index `copy·|Λ| + index(x)`.
pub fn translation_system<F: Field>(group: &FinAbGroup, copies: usize) -> Result<DynamicalSystem<F>> {
    let n = group.order();
    let a = StructureAlgebra::function_algebra(n * copies)?;
    let (gens, _) = group.canonical_generators();
    let maps = gens
        .iter()
        .map(|e| {
            let images: Vec<Element<F>> = (0..n * copies)
                .map(|p| {
                    let (c, x) = (p / n, p % n);
                    let y = group.index_of(&group.add(&group.element_at(x), &group.neg(e)));
                    a.basis(c * n + y)
                })
                .collect();
            AlgebraMap::from_images(n * copies, &images)
        })
        .collect::<Result<Vec<_>>>()?;
    DynamicalSystem::from_generators(a, group.clone(), maps)
}

/// The characters `λ̂_i` on every copy, multiplied on copy `c` by
/// `twists[c][i]` (a root of unity of order dividing `n_i`).
pub fn character_witnesses<F: Field>(group: &FinAbGroup, copies: usize, twists: Option<&[Vec<RootOfUnity>]>) -> Result<Vec<Element<F>>> {
    let n = group.order();
    let (_, chars) = group.canonical_generators();
    chars
        .iter()
        .enumerate()
        .map(|(i, chi)| {
            let mut out = Vec::with_capacity(n * copies);
            for c in 0..copies {
                let t = twists.map(|t| t[c][i]).unwrap_or_default();
                for x in 0..n {
                    let r = group.pairing(chi, &group.element_at(x))?.combine(&t);
                    out.push(field_root::<F>(&r)?);
                }
            }
            Ok(out)
        })
        .collect()
}

/// Clock and shift on `M_n`, the action `(k,l).A = R^l S^k A S^{-k} R^{-l}`
/// of `C_n × C_n` and its certificate with witnesses `R*` and `S`.
#[derive(Clone, Debug)]
pub struct ClockShift<F: Field> {
    pub n: u64,
    pub r: Element<F>,
    pub s: Element<F>,
    pub system: DynamicalSystem<F>,
    pub decomposition: IsotypicDecomposition<F>,
    pub certificate: TrivialityCertificate<F>,
    pub checks: Vec<String>,
}

pub fn clock_shift_system<F: Field>(n: u64) -> Result<ClockShift<F>> {
    if n == 0 {
        return Err(Error::Invalid("clock and shift need n ≥ 1".into()));
    }
    let m = n as usize;
    let a = StructureAlgebra::<F>::matrix_algebra(m)?;
    let zeta: F = field_root(&RootOfUnity::new(1, n))?;
    let mut rm = Matrix::zeros(m, m);
    let mut sm = Matrix::zeros(m, m);
    let mut z = F::one();
    for j in 0..m {
        rm.set(j, j, z.clone());
        z = z * &zeta;
        sm.set((j + 1) % m, j, F::one());
    }
    let r = matrix_to_element(&rm);
    let s = matrix_to_element(&sm);
    let one = a.one();
    let mut checks = Vec::new();
    let mut require = |ok: bool, what: &str| -> Result<()> {
        if ok {
            checks.push(what.to_string());
            Ok(())
        } else {
            Err(Error::Verification(format!("clock-shift relation failed: {what}")))
        }
    };
    let r_star = a.star(&r).expect("matrix involution");
    let s_star = a.star(&s).expect("matrix involution");
    require(a.mul(&r, &r_star) == one && a.mul(&r_star, &r) == one, "R R* = R* R = 1")?;
    require(a.mul(&s, &s_star) == one && a.mul(&s_star, &s) == one, "S S* = S* S = 1")?;
    require(a.pow(&r, n) == one, "R^n = 1")?;
    require(a.pow(&s, n) == one, "S^n = 1")?;
    require(a.mul(&r, &s) == vec_scale(&a.mul(&s, &r), &zeta), "RS = ζ SR")?;
    let group = FinAbGroup::new(vec![n, n])?;
    let conj = |u: &Element<F>, uinv: &Element<F>| {
        let images: Vec<Element<F>> = (0..a.dim()).map(|j| a.mul(&a.mul(u, &a.basis(j)), uinv)).collect();
        AlgebraMap::from_images(a.dim(), &images)
    };
    let s_inv = a.pow(&s, n - 1);
    let r_inv = a.pow(&r, n - 1);
    let gens = vec![conj(&s, &s_inv)?, conj(&r, &r_inv)?];
    let system = DynamicalSystem::from_generators(a.clone(), group, gens)?;
    let decomposition = fourier_decompose(&system)?;
    let dims = decomposition.dims();
    require(dims[0] == 1, "fixed-point algebra is C·1")?;
    require(dims.iter().all(|&d| d == 1), "all isotypic components are one-dimensional")?;
    let certificate = certify_trivial(&system, Some(&[r_star, s]), &WitnessSearch::default())?
        .certificate()
        .ok_or_else(|| Error::Verification("R* and S are not triviality witnesses".into()))?;
    let s_elem = certificate.witnesses[1].value.clone();
    Ok(ClockShift {
        n,
        r,
        s: s_elem,
        system,
        decomposition,
        certificate,
        checks,
    })
}

/// `R*^a S^b` for every `(a,b) ∈ C_n × C_n`, in group index order. It spans
/// the isotypic component of the character `(a,b)`.
pub fn clock_shift_monomials<F: Field>(cs: &ClockShift<F>) -> Vec<Element<F>> {
    let a = &cs.system.algebra;
    let g = &cs.system.group;
    let r_star = a.star(&cs.r).expect("matrix involution");
    g.elements()
        .iter()
        .map(|e| a.mul(&a.pow(&r_star, e.residues[0]), &a.pow(&cs.s, e.residues[1])))
        .collect()
}

/// `M_n` rewritten in the monomial basis and graded by `R*^a S^b ∈ A_(a,b)`.
pub fn clock_shift_graded<F: Field>(cs: &ClockShift<F>) -> Result<GradedAlgebra<F>> {
    let g = &cs.system.group;
    let mono = clock_shift_monomials(cs);
    let p = Matrix::from_columns(mono[0].len(), &mono);
    let labels = g
        .elements()
        .iter()
        .map(|e| format!("R*^{} S^{}", e.residues[0], e.residues[1]))
        .collect();
    let alg = cs.system.algebra.change_basis(&p, labels)?;
    GradedAlgebra::new(alg, g.clone(), (0..g.order()).collect())
}

/// Matrix form of an element of `M_n`.
pub fn as_matrix<F: Field>(x: &[F], n: usize) -> Matrix<F> {
    element_to_matrix(x, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossed::{build_crossed_product, GradedAlgebra};
    use crate::factor::FactorSystem;
    use crate::scalar::Cyclo;

    type A = StructureAlgebra<Cyclo>;

    fn group_algebra_system(n: u64) -> DynamicalSystem<Cyclo> {
        let g = FinAbGroup::cyclic(n);
        let ga = GradedAlgebra::new(A::group_algebra(&g), g.clone(), (0..n as usize).collect()).unwrap();
        dual_system(&ga).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let cc = A::matrix_algebra(2).unwrap();
        let triv = DynamicalSystem::trivial(cc, FinAbGroup::cyclic(3)).unwrap();
        assert_eq!(fourier_decompose(&triv).unwrap().dims(), vec![4, 0, 0]);
        let ds = group_algebra_system(4);
        assert_eq!(fourier_decompose(&ds).unwrap().dims(), vec![1; 4]);
    }

    #[test]
    fn clock_shift_small() {
        for n in 1..=3 {
            let cs = clock_shift_system::<Cyclo>(n).unwrap();
            assert_eq!(cs.decomposition.dims().len(), (n * n) as usize);
            let sw = split_witness(&cs.system, &cs.certificate).unwrap();
            assert!(sw.to_certificate(&cs.system).is_ok());
        }
    }

    #[test]
    fn group_algebra_certificate_and_split() {
        let ds = group_algebra_system(3);
        let cert = certify_trivial(&ds, None, &WitnessSearch::default()).unwrap().certificate().unwrap();
        assert_eq!(cert.witnesses[0].value, ds.algebra.basis(1));
        let sw = split_witness(&ds, &cert).unwrap();
        assert_eq!(sw.sections[0][2], ds.algebra.basis(2));
    }

    #[test]
    fn non_split_c2() {
        let cc = A::matrix_algebra(1).unwrap();
        let c2 = FinAbGroup::cyclic(2);
        let mut fs = FactorSystem::trivial(&c2, &cc);
        fs.omega[3] = Unit::certify(&cc, &[Cyclo::from_int(-1)]).unwrap();
        let cp = build_crossed_product(&fs).unwrap();
        let ds = dual_system(&cp).unwrap();
        let search = WitnessSearch {
            torsion: 2,
            ..Default::default()
        };
        let out = certify_trivial(&ds, None, &search).unwrap();
        assert!(!out.is_certified());
        let v = ds.algebra.basis(1);
        assert!(SplitWitness::from_witnesses(&ds, &[v.clone()]).is_err());
        let i = ds.algebra.scalar(&Cyclo::zeta_pow(4, 1));
        let norm = central_normalize(&ds, &v, &i).unwrap();
        assert!(certify_trivial(&ds, Some(&[norm.witness]), &search).unwrap().is_certified());
    }

    #[test]
    fn noncentral_base_rejected() {
        let m2 = A::matrix_algebra(2).unwrap();
        let a = A::direct_sum(&m2, &m2);
        let images: Vec<Element<Cyclo>> = (0..8).map(|j| a.basis((j + 4) % 8)).collect();
        let swap = AlgebraMap::from_images(8, &images).unwrap();
        let ds = DynamicalSystem::from_generators(a.clone(), FinAbGroup::cyclic(2), vec![swap]).unwrap();
        let mut x = a.one();
        for k in 4..8 {
            x[k] = -x[k].clone();
        }
        assert!(matches!(central_normalize(&ds, &x, &a.one()), Err(Error::Invalid(_))));
    }

    #[test]
    fn coverings() {
        for (orders, copies) in [(vec![2], 1), (vec![2, 2], 2), (vec![4], 2)] {
            let g = FinAbGroup::new(orders).unwrap();
            let ds = translation_system::<Cyclo>(&g, copies).unwrap();
            let w = character_witnesses::<Cyclo>(&g, copies, None).unwrap();
            let cert = certify_trivial(&ds, Some(&w), &WitnessSearch::default()).unwrap().certificate().unwrap();
            let act = spectrum_action(&ds).unwrap();
            assert!(act.is_free());
            assert_eq!(act.orbit_count(), copies);
            let cov = trivialize_covering(&ds, &cert).unwrap();
            assert_eq!(cov.orbit_count, copies);
        }
        let triv = DynamicalSystem::<Cyclo>::trivial(A::function_algebra(2).unwrap(), FinAbGroup::cyclic(2)).unwrap();
        assert!(!spectrum_action(&triv).unwrap().is_free());
    }
}
