//! Normalized cochains of a finite abelian group with values in a finite
//! abelian module, twisted coboundaries and second cohomology.
//!
//! Three independent routes to `H²` are provided: exhaustive enumeration
//! (`h2_bruteforce`), integer Smith normal form (`h2_snf`) and closed
//! formulas (`h2_trivial_structural`, `h2_twisted_structural`).

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{FinAbGroup, GroupElement, GroupTable};
use crate::intlin::{invariant_factors, smith, IntMatrix};
use crate::scalar::RootOfUnity;

pub const DEFAULT_BUDGET: u128 = 1 << 24;

// -------------------------------------------------------------------------
// Modules

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Carrier {
    /// Roots of unity `μ_N`, the value `ζ_N^k` stored as residue `k`.
    Mu { n: u64 },
    /// A finite abelian group written additively.
    Additive { group: FinAbGroup },
}

/// Action of the acting group by the images of its canonical generators:
/// `images[i][j]` is the residue vector of `S(e_i)` applied to the `j`-th
/// carrier generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Trivial,
    Generators { images: Vec<Vec<Vec<i64>>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffModule {
    pub carrier: Carrier,
    pub action: Action,
}

impl CoeffModule {
    pub fn mu(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("μ_0 is not finite".into()));
        }
        Ok(CoeffModule {
            carrier: Carrier::Mu { n },
            action: Action::Trivial,
        })
    }

    pub fn additive(group: FinAbGroup) -> Self {
        CoeffModule {
            carrier: Carrier::Additive { group },
            action: Action::Trivial,
        }
    }

    pub fn with_action(mut self, images: Vec<Vec<Vec<i64>>>) -> Self {
        self.action = Action::Generators { images };
        self
    }

    pub fn is_trivial_action(&self) -> bool {
        matches!(self.action, Action::Trivial)
    }

    pub fn carrier_group(&self) -> FinAbGroup {
        match &self.carrier {
            Carrier::Mu { n } => FinAbGroup::cyclic(*n),
            Carrier::Additive { group } => group.clone(),
        }
    }

    pub fn order(&self) -> usize {
        self.carrier_group().order()
    }

    /// Parses `mu:N` or `add:n1,n2,…`.
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(n) = s.strip_prefix("mu:") {
            let n: u64 = n.trim().parse().map_err(|_| Error::Parse(format!("bad module order in {s:?}")))?;
            return Self::mu(n);
        }
        if let Some(rest) = s.strip_prefix("add:") {
            return Ok(Self::additive(FinAbGroup::new(parse_orders(rest)?)?));
        }
        Err(Error::Parse(format!("module must be mu:N or add:n1,n2,…, got {s:?}")))
    }

    /// Index tables of the module over the acting group `g`, with the action
    /// validated as a homomorphism into the automorphism group.
    pub fn tables(&self, g: &FinAbGroup) -> Result<ModuleTables> {
        let m = self.carrier_group();
        let mt = m.table();
        let size = m.order();
        let act = match &self.action {
            Action::Trivial => vec![(0..size).collect::<Vec<_>>(); g.order()],
            Action::Generators { images } => {
                if images.len() != g.rank() {
                    return Err(Error::Shape(format!(
                        "action lists {} generator images, group has rank {}",
                        images.len(),
                        g.rank()
                    )));
                }
                let mut gens = Vec::new();
                for img in images {
                    gens.push(endomorphism_from_images(&m, img)?);
                }
                for (i, map) in gens.iter().enumerate() {
                    let mut seen = vec![false; size];
                    for &y in map {
                        seen[y] = true;
                    }
                    if seen.contains(&false) {
                        return Err(Error::Invalid(format!("S(e_{i}) is not bijective")));
                    }
                    let mut power: Vec<usize> = (0..size).collect();
                    for _ in 0..g.orders()[i] {
                        power = power.iter().map(|&x| map[x]).collect();
                    }
                    if power.iter().enumerate().any(|(x, &y)| x != y) {
                        return Err(Error::Invalid(format!("S(e_{i}) does not have order dividing {}", g.orders()[i])));
                    }
                }
                for a in 0..gens.len() {
                    for b in 0..a {
                        if (0..size).any(|x| gens[a][gens[b][x]] != gens[b][gens[a][x]]) {
                            return Err(Error::Invalid("generator actions do not commute".into()));
                        }
                    }
                }
                g.elements()
                    .iter()
                    .map(|e| {
                        let mut map: Vec<usize> = (0..size).collect();
                        for (i, &k) in e.residues.iter().enumerate() {
                            for _ in 0..k {
                                map = map.iter().map(|&x| gens[i][x]).collect();
                            }
                        }
                        map
                    })
                    .collect()
            }
        };
        Ok(ModuleTables {
            carrier: m,
            add: mt,
            act,
        })
    }
}

fn parse_orders(s: &str) -> Result<Vec<u64>> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad order {t:?}"))))
        .collect()
}

/// Endomorphism of `m` sending generator `j` to `images[j]`, checked to be
/// well defined.
fn endomorphism_from_images(m: &FinAbGroup, images: &[Vec<i64>]) -> Result<Vec<usize>> {
    if images.len() != m.rank() {
        return Err(Error::Shape("automorphism must give one image per carrier generator".into()));
    }
    let imgs: Vec<GroupElement> = images.iter().map(|r| m.element(r)).collect::<Result<_>>()?;
    for (j, img) in imgs.iter().enumerate() {
        if !m.scale(img, m.orders()[j] as i64).residues.iter().all(|&r| r == 0) {
            return Err(Error::Invalid(format!("image of generator {j} has the wrong order")));
        }
    }
    Ok(m.elements()
        .iter()
        .map(|x| {
            let mut acc = m.identity();
            for (j, &k) in x.residues.iter().enumerate() {
                acc = m.add(&acc, &m.scale(&imgs[j], k as i64));
            }
            m.index_of(&acc)
        })
        .collect())
}

/// Index-level description of a module over a fixed acting group.
#[derive(Clone, Debug)]
pub struct ModuleTables {
    pub carrier: FinAbGroup,
    pub add: GroupTable,
    /// `act[g][x]` is `S(g)(x)`.
    pub act: Vec<Vec<usize>>,
}

impl ModuleTables {
    pub fn size(&self) -> usize {
        self.add.n
    }

    fn sub(&self, a: usize, b: usize) -> usize {
        self.add.add(a, self.add.neg(b))
    }

    fn scale(&self, a: usize, k: u64) -> usize {
        let mut acc = 0;
        for _ in 0..k {
            acc = self.add.add(acc, a);
        }
        acc
    }

    fn order_of(&self, a: usize) -> u64 {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.add.add(x, a);
            k += 1;
        }
        k
    }
}

// -------------------------------------------------------------------------
// Cochains

/// A normalized `p`-cochain, stored as a full table indexed by tuples of
/// group-element indices (first argument most significant).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cochain {
    pub degree: usize,
    pub group: FinAbGroup,
    pub module: CoeffModule,
    /// Carrier element indices.
    pub table: Vec<usize>,
}

fn tuple_of(mut idx: usize, n: usize, p: usize) -> Vec<usize> {
    let mut t = vec![0; p];
    for slot in t.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    t
}

impl Cochain {
    /// Builds a cochain from a function on index tuples; rejects values
    /// that break normalization.
    pub fn from_fn(
        degree: usize,
        group: &FinAbGroup,
        module: &CoeffModule,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<Self> {
        let n = group.order();
        let size = module.order();
        let total = n.pow(degree as u32);
        let mut table = Vec::with_capacity(total);
        for idx in 0..total {
            let args = tuple_of(idx, n, degree);
            let v = f(&args);
            if v >= size {
                return Err(Error::Shape(format!("value index {v} outside the module")));
            }
            if v != 0 && args.contains(&0) {
                return Err(Error::Invalid(format!("cochain is not normalized at arguments {args:?}")));
            }
            table.push(v);
        }
        Ok(Cochain {
            degree,
            group: group.clone(),
            module: module.clone(),
            table,
        })
    }

    /// Opt-in normalization: entries with an identity argument are set to
    /// the module identity.
    pub fn from_fn_normalizing(
        degree: usize,
        group: &FinAbGroup,
        module: &CoeffModule,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<Self> {
        Self::from_fn(degree, group, module, |a| if a.contains(&0) { 0 } else { f(a) })
    }

    pub fn trivial(degree: usize, group: &FinAbGroup, module: &CoeffModule) -> Self {
        Self::from_fn(degree, group, module, |_| 0).expect("zero cochain")
    }

    /// `μ_N`-valued cochain from exponents: value `ζ_N^{f(args)}`.
    pub fn from_exponents(
        degree: usize,
        group: &FinAbGroup,
        n: u64,
        f: impl Fn(&[GroupElement]) -> i64,
    ) -> Result<Self> {
        let elems = group.elements();
        let module = CoeffModule::mu(n)?;
        Self::from_fn(degree, group, &module, |args| {
            let gs: Vec<GroupElement> = args.iter().map(|&i| elems[i].clone()).collect();
            f(&gs).rem_euclid(n as i64) as usize
        })
    }

    pub fn value(&self, args: &[usize]) -> usize {
        let n = self.group.order();
        self.table[args.iter().fold(0, |acc, &a| acc * n + a)]
    }

    pub fn value_at(&self, args: &[GroupElement]) -> usize {
        let idx: Vec<usize> = args.iter().map(|g| self.group.index_of(g)).collect();
        self.value(&idx)
    }

    /// The value as a root of unity, for `μ_N` coefficients.
    pub fn value_rou(&self, args: &[usize]) -> Option<RootOfUnity> {
        match self.module.carrier {
            Carrier::Mu { n } => Some(RootOfUnity::new(self.value(args) as i64, n)),
            Carrier::Additive { .. } => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.table.iter().all(|&v| v == 0)
    }

    fn check_compatible(&self, other: &Cochain) -> Result<()> {
        if self.degree != other.degree || self.group != other.group || self.module.carrier != other.module.carrier {
            return Err(Error::Shape("cochains of different shape".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.check_compatible(other)?;
        let t = self.module.carrier_group().table();
        Ok(Cochain {
            table: self.table.iter().zip(&other.table).map(|(&a, &b)| t.add(a, b)).collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.check_compatible(other)?;
        let t = self.module.carrier_group().table();
        Ok(Cochain {
            table: self.table.iter().zip(&other.table).map(|(&a, &b)| t.add(a, t.neg(b))).collect(),
            ..self.clone()
        })
    }

    /// Nonidentity arguments as group elements, for reporting.
    pub fn args_of(&self, idx: usize) -> Vec<GroupElement> {
        tuple_of(idx, self.group.order(), self.degree)
            .into_iter()
            .map(|i| self.group.element_at(i))
            .collect()
    }
}

impl fmt::Display for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let carrier = self.module.carrier_group();
        let mut first = true;
        write!(f, "{{")?;
        for (idx, &v) in self.table.iter().enumerate() {
            if v == 0 {
                continue;
            }
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            let args: Vec<String> = self.args_of(idx).iter().map(ToString::to_string).collect();
            match self.module.carrier {
                Carrier::Mu { n } => write!(f, "{} ↦ {}", args.join(""), RootOfUnity::new(v as i64, n))?,
                Carrier::Additive { .. } => write!(f, "{} ↦ {}", args.join(""), carrier.element_at(v))?,
            }
        }
        write!(f, "}}")
    }
}

/// `d_S h(g_1,…,g_{p+1}) = g_1·h(g_2,…) + Σ_i (-1)^i h(…,g_i g_{i+1},…) + (-1)^{p+1} h(g_1,…,g_p)`.
pub fn coboundary(h: &Cochain) -> Result<Cochain> {
    let mt = h.module.tables(&h.group)?;
    let gt = h.group.table();
    let n = h.group.order();
    let p = h.degree;
    let at = |args: &[usize]| h.table[args.iter().fold(0, |acc, &x| acc * n + x)];
    Cochain::from_fn(p + 1, &h.group, &h.module, |a| {
        let mut v = mt.act[a[0]][at(&a[1..])];
        let mut merged = Vec::with_capacity(p);
        for i in 0..p {
            merged.clear();
            merged.extend_from_slice(&a[..i]);
            merged.push(gt.add(a[i], a[i + 1]));
            merged.extend_from_slice(&a[i + 2..]);
            let t = at(&merged);
            v = if i % 2 == 0 { mt.sub(v, t) } else { mt.add.add(v, t) };
        }
        let last = at(&a[..p]);
        if p % 2 == 0 {
            mt.sub(v, last)
        } else {
            mt.add.add(v, last)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleCheck {
    pub ok: bool,
    /// First triple where `d_S ω` is nontrivial.
    pub witness: Option<[GroupElement; 3]>,
}

pub fn is_cocycle(omega: &Cochain) -> Result<CocycleCheck> {
    if omega.degree != 2 {
        return Err(Error::Invalid("cocycle test expects a 2-cochain".into()));
    }
    let d = coboundary(omega)?;
    Ok(match d.table.iter().position(|&v| v != 0) {
        None => CocycleCheck { ok: true, witness: None },
        Some(idx) => {
            let a = d.args_of(idx);
            CocycleCheck {
                ok: false,
                witness: Some([a[0].clone(), a[1].clone(), a[2].clone()]),
            }
        }
    })
}

// -------------------------------------------------------------------------
// Exhaustive search over linear systems on a finite module

/// Systems `Σ_k e_k(x_k) = c` over a submodule `dom` of a finite module,
/// solved by depth-first search with forced-value propagation.
struct LinSystem<'a> {
    mt: &'a ModuleTables,
    in_dom: Vec<bool>,
    dom: Vec<usize>,
    nvars: usize,
    endos: Vec<Vec<usize>>,
    endo_inv: Vec<Option<Vec<usize>>>,
    constraints: Vec<(Vec<(usize, usize)>, usize)>,
    watch: Vec<Vec<usize>>,
}

struct SearchStats {
    nodes: u128,
    budget: u128,
}

impl<'a> LinSystem<'a> {
    fn new(mt: &'a ModuleTables, dom: Vec<usize>, nvars: usize) -> Self {
        let mut in_dom = vec![false; mt.size()];
        for &x in &dom {
            in_dom[x] = true;
        }
        LinSystem {
            mt,
            in_dom,
            dom,
            nvars,
            endos: Vec::new(),
            endo_inv: Vec::new(),
            constraints: Vec::new(),
            watch: vec![Vec::new(); nvars],
        }
    }

    fn endo_id(&mut self, map: Vec<usize>) -> usize {
        if let Some(i) = self.endos.iter().position(|e| *e == map) {
            return i;
        }
        let mut inv = vec![usize::MAX; map.len()];
        let mut ok = true;
        for &x in &self.dom {
            let y = map[x];
            if !self.in_dom[y] || inv[y] != usize::MAX {
                ok = false;
                break;
            }
            inv[y] = x;
        }
        self.endos.push(map);
        self.endo_inv.push(ok.then_some(inv));
        self.endos.len() - 1
    }

    /// Adds `Σ maps_k(x_{var_k}) = constant`; repeated variables are merged.
    fn add_constraint(&mut self, terms: Vec<(usize, Vec<usize>)>, constant: usize) -> bool {
        let mut merged: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, map) in terms {
            match merged.get_mut(&v) {
                Some(acc) => {
                    for x in 0..acc.len() {
                        acc[x] = self.mt.add.add(acc[x], map[x]);
                    }
                }
                None => {
                    merged.insert(v, map);
                }
            }
        }
        let mut ts = Vec::new();
        for (v, map) in merged {
            if self.dom.iter().all(|&x| map[x] == 0) {
                continue;
            }
            let e = self.endo_id(map);
            ts.push((v, e));
        }
        if ts.is_empty() {
            return constant == 0;
        }
        let ci = self.constraints.len();
        for &(v, _) in &ts {
            self.watch[v].push(ci);
        }
        self.constraints.push((ts, constant));
        true
    }

    /// Assigns and propagates; returns false on conflict. All assignments
    /// are pushed on `trail`.
    fn assign(&self, var: usize, val: usize, vals: &mut [usize], trail: &mut Vec<usize>) -> bool {
        const UNSET: usize = usize::MAX;
        let mut queue = vec![(var, val)];
        while let Some((v, x)) = queue.pop() {
            if vals[v] != UNSET {
                if vals[v] != x {
                    return false;
                }
                continue;
            }
            vals[v] = x;
            trail.push(v);
            for &ci in &self.watch[v] {
                let (terms, c) = &self.constraints[ci];
                let mut sum = 0;
                let mut unknown = None;
                let mut n_unknown = 0;
                for &(u, e) in terms {
                    if vals[u] == UNSET {
                        n_unknown += 1;
                        unknown = Some((u, e));
                    } else {
                        sum = self.mt.add.add(sum, self.endos[e][vals[u]]);
                    }
                }
                match n_unknown {
                    0 => {
                        if sum != *c {
                            return false;
                        }
                    }
                    1 => {
                        let (u, e) = unknown.expect("one unknown");
                        if let Some(inv) = &self.endo_inv[e] {
                            let rhs = self.mt.sub(*c, sum);
                            if !self.in_dom[rhs] {
                                return false;
                            }
                            queue.push((u, inv[rhs]));
                        }
                    }
                    _ => {}
                }
            }
        }
        true
    }

    /// Visits every solution in lexicographic order of branching choices;
    /// the visitor returns `false` to stop.
    fn solve(&self, stats: &mut SearchStats, visit: &mut dyn FnMut(&[usize]) -> bool) -> Result<()> {
        let mut vals = vec![usize::MAX; self.nvars];
        let mut trail = Vec::new();
        self.dfs(0, &mut vals, &mut trail, stats, visit).map(|_| ())
    }

    fn dfs(
        &self,
        start: usize,
        vals: &mut [usize],
        trail: &mut Vec<usize>,
        stats: &mut SearchStats,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Result<bool> {
        let Some(var) = (start..self.nvars).find(|&v| vals[v] == usize::MAX) else {
            return Ok(visit(vals));
        };
        for &x in &self.dom {
            stats.nodes += 1;
            if stats.nodes > stats.budget {
                return Err(Error::BudgetExceeded {
                    needed: stats.nodes,
                    budget: stats.budget,
                });
            }
            let mark = trail.len();
            let ok = self.assign(var, x, vals, trail);
            let keep_going = if ok { self.dfs(var + 1, vals, trail, stats, visit)? } else { true };
            while trail.len() > mark {
                let v = trail.pop().expect("trail");
                vals[v] = usize::MAX;
            }
            if !keep_going {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Variable numbering for normalized cochains: tuples of nonidentity
/// element indices.
struct VarIndex {
    n: usize,
    p: usize,
}

impl VarIndex {
    fn count(&self) -> usize {
        (self.n - 1).pow(self.p as u32)
    }

    fn var(&self, args: &[usize]) -> Option<usize> {
        if args.contains(&0) {
            return None;
        }
        Some(args.iter().fold(0, |acc, &a| acc * (self.n - 1) + a - 1))
    }

    fn args(&self, mut v: usize) -> Vec<usize> {
        let mut t = vec![0; self.p];
        for slot in t.iter_mut().rev() {
            *slot = v % (self.n - 1) + 1;
            v /= self.n - 1;
        }
        t
    }

    fn to_cochain(&self, vals: &[usize], group: &FinAbGroup, module: &CoeffModule) -> Cochain {
        Cochain::from_fn(self.p, group, module, |a| self.var(a).map_or(0, |v| vals[v])).expect("normalized")
    }

    fn from_cochain(&self, c: &Cochain) -> Vec<usize> {
        (0..self.count()).map(|v| c.value(&self.args(v))).collect()
    }
}

fn identity_map(size: usize) -> Vec<usize> {
    (0..size).collect()
}

fn neg_map(mt: &ModuleTables) -> Vec<usize> {
    (0..mt.size()).map(|x| mt.add.neg(x)).collect()
}

/// Constraints `d h = target` on normalized `(p-1)`-cochains `h`, where
/// `target` is a normalized `p`-cochain table (or zero).
fn coboundary_system<'a>(
    group: &FinAbGroup,
    mt: &'a ModuleTables,
    dom: Vec<usize>,
    p: usize,
    target: Option<&Cochain>,
) -> Option<(LinSystem<'a>, VarIndex)> {
    let n = group.order();
    let gt = group.table();
    let vi = VarIndex { n, p: p - 1 };
    let mut sys = LinSystem::new(mt, dom, vi.count());
    let id = identity_map(mt.size());
    let neg = neg_map(mt);
    let outer = VarIndex { n, p };
    for t in 0..outer.count() {
        let a = outer.args(t);
        let c = target.map_or(0, |w| w.value(&a));
        let mut terms: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut push = |args: Vec<usize>, map: &Vec<usize>| {
            if let Some(v) = vi.var(&args) {
                terms.push((v, map.clone()));
            }
        };
        match p {
            2 => {
                let (g, g2) = (a[0], a[1]);
                push(vec![g], &id);
                push(vec![g2], &mt.act[g]);
                push(vec![gt.add(g, g2)], &neg);
            }
            3 => {
                let (g, g2, g3) = (a[0], a[1], a[2]);
                push(vec![g2, g3], &mt.act[g]);
                push(vec![g, gt.add(g2, g3)], &id);
                push(vec![gt.add(g, g2), g3], &neg);
                push(vec![g, g2], &neg);
            }
            _ => unreachable!("degree checked by callers"),
        }
        if !sys.add_constraint(terms, c) {
            return None;
        }
    }
    Some((sys, vi))
}

/// Searches normalized `h` of degree `p-1` with `d_S h = ω` for a cocycle
/// `ω` of degree `p ∈ {2,3}`. `Ok(None)` certifies that no such `h` exists.
pub fn class_is_trivial(omega: &Cochain, budget: u128) -> Result<Option<Cochain>> {
    if !(2..=3).contains(&omega.degree) {
        return Err(Error::Invalid(format!("triviality test in degree {} is not supported", omega.degree)));
    }
    let mt = omega.module.tables(&omega.group)?;
    let dom: Vec<usize> = (0..mt.size()).collect();
    let Some((sys, vi)) = coboundary_system(&omega.group, &mt, dom, omega.degree, Some(omega)) else {
        return Ok(None);
    };
    let mut stats = SearchStats { nodes: 0, budget };
    let mut found = None;
    sys.solve(&mut stats, &mut |vals| {
        found = Some(vals.to_vec());
        false
    })?;
    let Some(vals) = found else { return Ok(None) };
    let h = vi.to_cochain(&vals, &omega.group, &omega.module);
    if coboundary(&h)? != *omega {
        return Err(Error::Verification("trivializing cochain failed re-verification".into()));
    }
    Ok(Some(h))
}

// -------------------------------------------------------------------------
// H² results

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bruteforce,
    Snf,
    Structural,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Bruteforce => "bruteforce",
            Method::Snf => "snf",
            Method::Structural => "structural",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyResult {
    /// Invariant factors `d_1 | d_2 | …`, all > 1; empty for the trivial group.
    pub factors: Vec<u64>,
    pub method: Method,
    /// One cocycle per invariant factor, generating the matching summand.
    pub representatives: Vec<Cochain>,
    /// Enumeration statistics, for brute force.
    pub cocycles: Option<u128>,
    pub coboundaries: Option<u128>,
}

impl CohomologyResult {
    pub fn order(&self) -> u128 {
        self.factors.iter().map(|&d| d as u128).product()
    }
}

fn primes_of(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

type Table = Vec<usize>;

fn t_add(mt: &ModuleTables, a: &[usize], b: &[usize]) -> Table {
    a.iter().zip(b).map(|(&x, &y)| mt.add.add(x, y)).collect()
}

fn t_scale(mt: &ModuleTables, a: &[usize], k: u64) -> Table {
    a.iter().map(|&x| mt.scale(x, k)).collect()
}

fn t_neg(mt: &ModuleTables, a: &[usize]) -> Table {
    a.iter().map(|&x| mt.add.neg(x)).collect()
}

/// Order of `x` modulo the subgroup `k`.
fn order_mod(mt: &ModuleTables, x: &[usize], k: &HashSet<Table>, bound: u64) -> u64 {
    let mut acc = x.to_vec();
    for e in 1..=bound {
        if k.contains(&acc) {
            return e;
        }
        acc = t_add(mt, &acc, x);
    }
    unreachable!("exponent bound exceeded")
}

/// Exhaustive `H²` with explicit generators. The carrier is split into its
/// primary components, each of which is a submodule; every component is
/// handled by enumerating all cocycles (search with propagation) and all
/// coboundaries.
pub fn h2_bruteforce(group: &FinAbGroup, module: &CoeffModule, budget: u128) -> Result<CohomologyResult> {
    let mt = module.tables(group)?;
    let n = group.order();
    let exp = mt.carrier.exponent();
    let vi2 = VarIndex { n, p: 2 };
    let mut spent: u128 = 0;
    let mut per_prime: Vec<Vec<(u64, Table)>> = Vec::new();
    let mut z_total: u128 = 1;
    let mut b_total: u128 = 1;
    let primes = primes_of(exp);
    if n == 1 || primes.is_empty() {
        if budget == 0 {
            return Err(Error::BudgetExceeded { needed: 1, budget });
        }
        return Ok(CohomologyResult {
            factors: vec![],
            method: Method::Bruteforce,
            representatives: vec![],
            cocycles: Some(1),
            coboundaries: Some(1),
        });
    }
    for p in primes {
        let dom: Vec<usize> = (0..mt.size()).filter(|&x| primes_of(mt.order_of(x)).iter().all(|&q| q == p)).collect();
        let pexp = dom.iter().map(|&x| mt.order_of(x)).max().unwrap_or(1);
        // coboundaries: all normalized 1-cochains on the component
        let c1_size = (dom.len() as u128).checked_pow((n - 1) as u32).unwrap_or(u128::MAX);
        if spent.saturating_add(c1_size) > budget {
            return Err(Error::BudgetExceeded {
                needed: spent.saturating_add(c1_size),
                budget,
            });
        }
        spent += c1_size;
        let mut b2: HashSet<Table> = HashSet::new();
        let mut h = vec![0usize; n - 1];
        let gt = group.table();
        let pairs: Vec<(usize, usize, usize)> = (0..vi2.count())
            .map(|v| {
                let a = vi2.args(v);
                (a[0], a[1], gt.add(a[0], a[1]))
            })
            .collect();
        loop {
            let hv = |g: usize| if g == 0 { 0 } else { dom[h[g - 1]] };
            b2.insert(
                pairs
                    .iter()
                    .map(|&(g, g2, s)| mt.sub(mt.add.add(hv(g), mt.act[g][hv(g2)]), hv(s)))
                    .collect(),
            );
            let mut pos = 0;
            while pos < h.len() && h[pos] + 1 == dom.len() {
                h[pos] = 0;
                pos += 1;
            }
            if pos == h.len() {
                break;
            }
            h[pos] += 1;
        }
        // cocycles: search
        let (sys, _) = coboundary_system(group, &mt, dom.clone(), 3, None).expect("homogeneous system is consistent");
        let mut stats = SearchStats {
            nodes: 0,
            budget: budget - spent,
        };
        let mut z2: Vec<Table> = Vec::new();
        sys.solve(&mut stats, &mut |vals| {
            z2.push(vals.to_vec());
            true
        })
        .map_err(|e| match e {
            Error::BudgetExceeded { needed, .. } => Error::BudgetExceeded {
                needed: needed + spent,
                budget,
            },
            other => other,
        })?;
        spent += stats.nodes;
        z_total *= z2.len() as u128;
        b_total *= b2.len() as u128;
        // greedy basis of the p-group Z²/B²
        let mut k = b2.clone();
        let mut chosen: Vec<(u64, Table)> = Vec::new();
        while k.len() < z2.len() {
            let mut best: Option<(u64, &Table)> = None;
            for z in &z2 {
                let e = order_mod(&mt, z, &k, pexp);
                if best.is_none_or(|(be, _)| e > be) {
                    best = Some((e, z));
                }
            }
            let (e, z) = best.expect("nonempty");
            let adjusted = adjust_into_complement(&mt, z, e, &chosen, &b2)
                .ok_or_else(|| Error::Verification("no complement adjustment found".into()))?;
            let mut next = HashSet::with_capacity(k.len() * e as usize);
            for x in &k {
                let mut y = x.clone();
                for _ in 0..e {
                    next.insert(y.clone());
                    y = t_add(&mt, &y, &adjusted);
                }
            }
            k = next;
            chosen.push((e, adjusted));
        }
        per_prime.push(chosen);
    }
    // combine primary generators into invariant-factor generators
    let len = per_prime.iter().map(Vec::len).max().unwrap_or(0);
    let mut factors = Vec::with_capacity(len);
    let mut reps = Vec::with_capacity(len);
    for i in 0..len {
        let mut d = 1;
        let mut rep = vec![0usize; vi2.count()];
        for chosen in &per_prime {
            if let Some((e, t)) = chosen.get(i) {
                d *= e;
                rep = t_add(&mt, &rep, t);
            }
        }
        factors.push(d);
        reps.push(vi2.to_cochain(&rep, group, module));
    }
    factors.reverse();
    reps.reverse();
    let result = CohomologyResult {
        factors,
        method: Method::Bruteforce,
        representatives: reps,
        cocycles: Some(z_total),
        coboundaries: Some(b_total),
    };
    debug_assert_eq!(result.order(), z_total / b_total);
    Ok(result)
}

/// Finds `z - Σ a_i x_i` whose order modulo `B²` is exactly `e`.
fn adjust_into_complement(
    mt: &ModuleTables,
    z: &[usize],
    e: u64,
    chosen: &[(u64, Table)],
    b2: &HashSet<Table>,
) -> Option<Table> {
    let mut coeffs = vec![0u64; chosen.len()];
    loop {
        let mut cand = z.to_vec();
        for (a, (_, x)) in coeffs.iter().zip(chosen) {
            cand = t_add(mt, &cand, &t_neg(mt, &t_scale(mt, x, *a)));
        }
        if b2.contains(&t_scale(mt, &cand, e)) {
            return Some(cand);
        }
        let mut pos = 0;
        loop {
            if pos == coeffs.len() {
                return None;
            }
            coeffs[pos] += 1;
            if coeffs[pos] < chosen[pos].0 {
                break;
            }
            coeffs[pos] = 0;
            pos += 1;
        }
    }
}

// -------------------------------------------------------------------------
// Smith normal form route (trivial action, cyclic coefficients)

/// Linearized complex `C¹ → C² → C³` with coefficients `Z/m` and trivial
/// action, reduced to a presentation of `H²`.
#[derive(Clone, Debug)]
pub struct H2Snf {
    group: FinAbGroup,
    m: u64,
    v: IntMatrix,
    vinv: IntMatrix,
    /// `L = V · diag(scale) · Z^k` is the preimage of the cocycles.
    scale: Vec<BigInt>,
    /// Relation presentation `Z^k / rows ≅ ⊕ Z/diag_i` via `z ↦ z W`.
    w: IntMatrix,
    winv: IntMatrix,
    diag: Vec<BigInt>,
}

fn d1_matrix(group: &FinAbGroup) -> IntMatrix {
    // rows: pairs (C² coordinates), cols: C¹ coordinates
    let n = group.order();
    let gt = group.table();
    let vi1 = VarIndex { n, p: 1 };
    let vi2 = VarIndex { n, p: 2 };
    let mut rows = vec![vec![BigInt::zero(); vi1.count()]; vi2.count()];
    for (r, row) in rows.iter_mut().enumerate() {
        let a = vi2.args(r);
        for (args, s) in [(vec![a[0]], 1), (vec![a[1]], 1), (vec![gt.add(a[0], a[1])], -1)] {
            if let Some(v) = vi1.var(&args) {
                row[v] += s;
            }
        }
    }
    rows
}

fn d2_matrix(group: &FinAbGroup) -> IntMatrix {
    let n = group.order();
    let gt = group.table();
    let vi2 = VarIndex { n, p: 2 };
    let vi3 = VarIndex { n, p: 3 };
    let mut rows = vec![vec![BigInt::zero(); vi2.count()]; vi3.count()];
    for (r, row) in rows.iter_mut().enumerate() {
        let a = vi3.args(r);
        let (g, g2, g3) = (a[0], a[1], a[2]);
        for (args, s) in [
            (vec![g2, g3], 1),
            (vec![g, gt.add(g2, g3)], 1),
            (vec![gt.add(g, g2), g3], -1),
            (vec![g, g2], -1),
        ] {
            if let Some(v) = vi2.var(&args) {
                row[v] += s;
            }
        }
    }
    rows
}

fn mat_vec(m: &IntMatrix, x: &[BigInt]) -> Vec<BigInt> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn vec_mat(x: &[BigInt], m: &IntMatrix, cols: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); cols];
    for (xi, row) in x.iter().zip(m) {
        if xi.is_zero() {
            continue;
        }
        for (o, a) in out.iter_mut().zip(row) {
            *o += xi * a;
        }
    }
    out
}

impl H2Snf {
    /// `extra` lists additional 2-cocycles (as exponent vectors) to divide
    /// out together with the coboundaries.
    fn build(group: &FinAbGroup, m: u64, extra: &[Vec<i64>]) -> Result<Self> {
        let n = group.order();
        let k = (n - 1) * (n - 1);
        let mb = BigInt::from(m);
        let d2 = d2_matrix(group);
        let s = smith(&d2, k, true);
        let (v, vinv) = s.right.expect("requested");
        let mut scale = vec![BigInt::one(); k];
        for (i, d) in s.diagonal.iter().enumerate() {
            scale[i] = &mb / d.gcd(&mb);
        }
        // relations in L-coordinates: images of d1 columns, extra cocycles, and m Z^k
        let d1 = d1_matrix(group);
        let c1 = n - 1;
        let mut gens: Vec<Vec<BigInt>> = (0..c1).map(|j| d1.iter().map(|row| row[j].clone()).collect()).collect();
        gens.extend(extra.iter().map(|e| e.iter().map(|&x| BigInt::from(x)).collect()));
        let mut rel: IntMatrix = Vec::new();
        for g in &gens {
            let y = mat_vec(&vinv, g);
            let z: Vec<BigInt> = y
                .iter()
                .zip(&scale)
                .map(|(yi, si)| {
                    let (q, r) = yi.div_rem(si);
                    if !r.is_zero() {
                        return Err(Error::Verification("relation is not a cocycle".into()));
                    }
                    Ok(q)
                })
                .collect::<Result<_>>()?;
            rel.push(z);
        }
        for i in 0..k {
            let mut row = vec![BigInt::zero(); k];
            row[i] = &mb / &scale[i];
            rel.push(row);
        }
        let rs = smith(&rel, k, true);
        let (w, winv) = rs.right.expect("requested");
        let mut diag = rs.diagonal.clone();
        diag.resize(k, BigInt::zero());
        if diag.iter().any(Zero::is_zero) {
            return Err(Error::Verification("cohomology presentation is not finite".into()));
        }
        Ok(H2Snf {
            group: group.clone(),
            m,
            v,
            vinv,
            scale,
            w,
            winv,
            diag,
        })
    }

    pub fn factors(&self) -> Vec<u64> {
        self.diag
            .iter()
            .filter(|d| !d.is_one())
            .map(|d| d.to_u64().expect("small factor"))
            .collect()
    }

    fn nontrivial(&self) -> Vec<usize> {
        (0..self.diag.len()).filter(|&i| !self.diag[i].is_one()).collect()
    }

    /// Coordinates of the class of a `μ_m`-valued cocycle in the summands
    /// listed by `factors`.
    pub fn class_coordinates(&self, omega: &Cochain) -> Result<Vec<u64>> {
        if omega.group != self.group || omega.module.carrier != (Carrier::Mu { n: self.m }) || omega.degree != 2 {
            return Err(Error::Shape("cocycle does not match this presentation".into()));
        }
        let n = self.group.order();
        let vi2 = VarIndex { n, p: 2 };
        let x: Vec<BigInt> = vi2.from_cochain(omega).into_iter().map(BigInt::from).collect();
        let y = mat_vec(&self.vinv, &x);
        let mut z = Vec::with_capacity(y.len());
        for (yi, si) in y.iter().zip(&self.scale) {
            let (q, r) = yi.div_rem(si);
            if !r.is_zero() {
                return Err(Error::Invalid("cochain is not a cocycle".into()));
            }
            z.push(q);
        }
        let c = vec_mat(&z, &self.w, z.len());
        Ok(self
            .nontrivial()
            .into_iter()
            .map(|i| c[i].mod_floor(&self.diag[i]).to_u64().expect("small"))
            .collect())
    }

    /// Order of the class of `omega`.
    pub fn class_order(&self, omega: &Cochain) -> Result<u64> {
        let coords = self.class_coordinates(omega)?;
        Ok(coords
            .iter()
            .zip(self.factors())
            .fold(1, |acc, (&c, d)| acc.lcm(&(d / c.gcd(&d)))))
    }

    pub fn representatives(&self) -> Vec<Cochain> {
        let n = self.group.order();
        let vi2 = VarIndex { n, p: 2 };
        let module = CoeffModule::mu(self.m).expect("positive");
        let mb = BigInt::from(self.m);
        self.nontrivial()
            .into_iter()
            .map(|i| {
                let y: Vec<BigInt> = self.winv[i].iter().zip(&self.scale).map(|(z, s)| z * s).collect();
                let x = mat_vec(&self.v, &y);
                let vals: Vec<usize> = x.iter().map(|xi| xi.mod_floor(&mb).to_usize().expect("small")).collect();
                vi2.to_cochain(&vals, &self.group, &module)
            })
            .collect()
    }

    fn result(&self) -> CohomologyResult {
        CohomologyResult {
            factors: self.factors(),
            method: Method::Snf,
            representatives: self.representatives(),
            cocycles: None,
            coboundaries: None,
        }
    }
}

fn trivial_group_result(method: Method) -> CohomologyResult {
    CohomologyResult {
        factors: vec![],
        method,
        representatives: vec![],
        cocycles: None,
        coboundaries: None,
    }
}

fn mu_order(module: &CoeffModule) -> Result<u64> {
    if !module.is_trivial_action() {
        return Err(Error::Unsupported("the Smith normal form route needs a trivial action".into()));
    }
    match module.carrier {
        Carrier::Mu { n } => Ok(n),
        Carrier::Additive { ref group } if group.rank() == 1 => Ok(group.orders()[0]),
        Carrier::Additive { .. } => Err(Error::Unsupported(
            "the Smith normal form route takes cyclic coefficients".into(),
        )),
    }
}

/// `H²(G, μ_m)` with trivial action by Smith normal form.
pub fn h2_snf(group: &FinAbGroup, module: &CoeffModule) -> Result<CohomologyResult> {
    let m = mu_order(module)?;
    if group.order() == 1 {
        return Ok(trivial_group_result(Method::Snf));
    }
    let mut r = H2Snf::build(group, m, &[])?.result();
    if !matches!(module.carrier, Carrier::Mu { .. }) {
        for rep in &mut r.representatives {
            rep.module = module.clone();
        }
    }
    Ok(r)
}

pub fn h2_snf_presentation(group: &FinAbGroup, m: u64) -> Result<H2Snf> {
    if group.order() == 1 {
        return Err(Error::Unsupported("trivial group has no presentation to build".into()));
    }
    H2Snf::build(group, m, &[])
}

/// Exponents of the carry cocycle `(a(g) + a(g') - a(g+g')) / m` of a
/// character `a: G → Z/m`.
fn carry_cocycle(group: &FinAbGroup, m: u64, character: &[u64]) -> Vec<i64> {
    let n = group.order();
    let vi2 = VarIndex { n, p: 2 };
    let gt = group.table();
    let elems = group.elements();
    let a = |i: usize| -> i64 {
        let r = group.pairing_unchecked(character, &elems[i].residues);
        (r.num() * (m / r.den())) as i64
    };
    (0..vi2.count())
        .map(|v| {
            let t = vi2.args(v);
            (a(t[0]) + a(t[1]) - a(gt.add(t[0], t[1]))) / m as i64
        })
        .collect()
}

/// Presentation of `H²(G, C^×)`: the `μ_m` classes (with `exponent(G) | m`)
/// modulo the image of `Hom(G, C^×)` under the connecting map.
pub fn h2_circle_presentation(group: &FinAbGroup, m: u64) -> Result<H2Snf> {
    if m % group.exponent() != 0 {
        return Err(Error::Invalid(format!("μ_{m} does not contain the values of all characters")));
    }
    let (_, chars) = group.canonical_generators();
    let extra: Vec<Vec<i64>> = chars.iter().map(|c| carry_cocycle(group, m, &c.residues)).collect();
    H2Snf::build(group, m, &extra)
}

/// `H²(G, C^×)` (torsion circle coefficients, trivial action), with
/// representatives valued in `μ_{exponent(G)}`.
pub fn h2_circle_snf(group: &FinAbGroup) -> Result<CohomologyResult> {
    if group.order() == 1 {
        return Ok(trivial_group_result(Method::Snf));
    }
    Ok(h2_circle_presentation(group, group.exponent())?.result())
}

/// `H²(G, C^×)` by enumeration: the commutator forms
/// `ω(e_i,e_j) ω(e_j,e_i)⁻¹` of the enumerated `μ_{exp G}` cocycles, which
/// determine the class over `C^×`.
pub fn h2_circle_bruteforce(group: &FinAbGroup, budget: u128) -> Result<CohomologyResult> {
    if group.order() == 1 {
        if budget == 0 {
            return Err(Error::BudgetExceeded { needed: 1, budget });
        }
        return Ok(trivial_group_result(Method::Bruteforce));
    }
    let e = group.exponent();
    let mu = h2_bruteforce(group, &CoeffModule::mu(e)?, budget)?;
    let r = group.rank();
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
    if pairs.is_empty() {
        return Ok(CohomologyResult { factors: vec![], ..mu });
    }
    let (gens, _) = group.canonical_generators();
    let idx: Vec<usize> = gens.iter().map(|g| group.index_of(g)).collect();
    let forms = FinAbGroup::new(vec![e; pairs.len()])?;
    let images = mu
        .representatives
        .iter()
        .map(|w| {
            let v: Vec<i64> = pairs
                .iter()
                .map(|&(i, j)| w.value(&[idx[i], idx[j]]) as i64 - w.value(&[idx[j], idx[i]]) as i64)
                .collect();
            forms.element(&v)
        })
        .collect::<Result<Vec<_>>>()?;
    let factors = forms.subquotient_invariants(&images, &[]).into_iter().filter(|&d| d > 1).collect();
    Ok(CohomologyResult {
        factors,
        method: Method::Bruteforce,
        representatives: mu.representatives,
        cocycles: mu.cocycles,
        coboundaries: mu.coboundaries,
    })
}

/// `⊕_{i<j} Z/gcd(n_i, n_j)`, the Schur multiplier of `G`.
pub fn h2_circle_structural(group: &FinAbGroup) -> CohomologyResult {
    let o = group.orders();
    let parts: Vec<u64> = (0..o.len())
        .flat_map(|i| (i + 1..o.len()).map(move |j| o[i].gcd(&o[j])))
        .collect();
    CohomologyResult {
        factors: invariant_factors(&parts),
        method: Method::Structural,
        representatives: vec![],
        cocycles: None,
        coboundaries: None,
    }
}

/// `⊕_i Z/gcd(n_i, m) ⊕ ⊕_{i<j} Z/gcd(n_i, n_j, m)` for trivial action on
/// a cyclic module of order `m`.
pub fn h2_trivial_structural(group: &FinAbGroup, module: &CoeffModule) -> Result<CohomologyResult> {
    let m = mu_order(module)?;
    let o = group.orders();
    let mut parts = Vec::new();
    for i in 0..o.len() {
        parts.push(o[i].gcd(&m));
        for j in i + 1..o.len() {
            parts.push(o[i].gcd(&o[j]).gcd(&m));
        }
    }
    Ok(CohomologyResult {
        factors: invariant_factors(&parts),
        method: Method::Structural,
        representatives: vec![],
        cocycles: None,
        coboundaries: None,
    })
}

/// `H²(C_n, Λ)_S ≅ Λ^{C_n} / NΛ`.
pub fn h2_twisted_structural(n: u64, module: &CoeffModule) -> Result<CohomologyResult> {
    let cn = FinAbGroup::cyclic(n);
    let mt = module.tables(&cn)?;
    let lambda = &mt.carrier;
    let s = if n > 1 { &mt.act[1] } else { &mt.act[0] };
    let fixed: Vec<GroupElement> = (0..mt.size())
        .filter(|&x| s[x] == x)
        .map(|x| lambda.element_at(x))
        .collect();
    let norms: Vec<GroupElement> = (0..mt.size())
        .map(|x| {
            let mut acc = 0;
            let mut y = x;
            for _ in 0..n {
                acc = mt.add.add(acc, y);
                y = s[y];
            }
            lambda.element_at(acc)
        })
        .collect();
    Ok(CohomologyResult {
        factors: lambda.subquotient_invariants(&fixed, &norms),
        method: Method::Structural,
        representatives: vec![],
        cocycles: None,
        coboundaries: None,
    })
}

/// Standard bilinear cocycle `ω((a,b),(c,d)) = ζ_n^{b·c}` on `C_n × C_n`.
pub fn bilinear_cocycle(n: u64) -> Result<Cochain> {
    let g = FinAbGroup::new(vec![n, n])?;
    Cochain::from_exponents(2, &g, n, |a| (a[0].residues[1] * a[1].residues[0]) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(o: &[u64]) -> FinAbGroup {
        FinAbGroup::new(o.to_vec()).unwrap()
    }

    #[test]
    fn circle_methods_agree() {
        for o in [vec![2u64], vec![2, 2], vec![2, 4], vec![3, 3], vec![2, 2, 2]] {
            let g = grp(&o);
            let b = h2_circle_bruteforce(&g, DEFAULT_BUDGET).unwrap().factors;
            let s = h2_circle_snf(&g).unwrap().factors;
            let t = h2_circle_structural(&g).factors;
            assert_eq!(b, s, "{o:?}");
            assert_eq!(s, t, "{o:?}");
        }
        assert_eq!(h2_circle_snf(&grp(&[2, 2])).unwrap().factors, vec![2]);
    }

    #[test]
    fn coboundary_examples() {
        let c2 = grp(&[2]);
        let mu2 = CoeffModule::mu(2).unwrap();
        assert!(coboundary(&Cochain::trivial(1, &c2, &mu2)).unwrap().is_trivial());
        let h = Cochain::from_fn(1, &c2, &mu2, |a| a[0]).unwrap();
        assert!(coboundary(&h).unwrap().is_trivial());
        let mu4 = CoeffModule::mu(4).unwrap();
        let h = Cochain::from_fn(1, &c2, &mu4, |a| a[0]).unwrap();
        let d = coboundary(&h).unwrap();
        assert_eq!(d.value(&[1, 1]), 2);
        assert!(is_cocycle(&d).unwrap().ok);
        let d3 = coboundary(&Cochain::trivial(3, &c2, &mu2)).unwrap();
        assert_eq!(d3.degree, 4);
        assert!(d3.is_trivial());
    }

    #[test]
    fn cocycle_examples() {
        for n in [2, 3] {
            assert!(is_cocycle(&bilinear_cocycle(n).unwrap()).unwrap().ok);
        }
        let g = grp(&[2, 2]);
        let mu2 = CoeffModule::mu(2).unwrap();
        let bad = Cochain::from_fn(2, &g, &mu2, |a| usize::from(a == [1, 1])).unwrap();
        let check = is_cocycle(&bad).unwrap();
        assert!(!check.ok && check.witness.is_some());
        assert!(is_cocycle(&Cochain::trivial(2, &g, &mu2)).unwrap().ok);
    }

    #[test]
    fn bruteforce_examples() {
        let r = h2_bruteforce(&grp(&[2]), &CoeffModule::mu(2).unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.factors, vec![2]);
        assert_eq!((r.cocycles, r.coboundaries), (Some(2), Some(1)));
        assert_eq!(r.representatives[0].value(&[1, 1]), 1);
        let r = h2_bruteforce(&grp(&[3]), &CoeffModule::mu(3).unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.factors, vec![3]);
        let r = h2_bruteforce(&grp(&[2, 2]), &CoeffModule::mu(2).unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.factors, vec![2, 2, 2]);
        assert_eq!((r.cocycles, r.coboundaries), (Some(16), Some(2)));
        for rep in &r.representatives {
            assert!(is_cocycle(rep).unwrap().ok);
        }
        assert!(h2_bruteforce(&grp(&[2]), &CoeffModule::mu(2).unwrap(), 0).unwrap_err().is_refusal());
    }

    #[test]
    fn snf_examples() {
        for n in 1..7u64 {
            for m in 1..7u64 {
                let r = h2_snf(&grp(&[n]), &CoeffModule::mu(m).unwrap()).unwrap();
                let g = n.gcd(&m);
                assert_eq!(r.factors, if g > 1 { vec![g] } else { vec![] }, "n={n} m={m}");
            }
        }
        assert!(h2_snf(&FinAbGroup::trivial(), &CoeffModule::mu(3).unwrap()).unwrap().factors.is_empty());
        let r = h2_snf(&grp(&[3, 3]), &CoeffModule::mu(3).unwrap()).unwrap();
        assert_eq!(r.factors, vec![3, 3, 3]);
        for rep in &r.representatives {
            assert!(is_cocycle(rep).unwrap().ok);
        }
    }

    #[test]
    fn circle_examples() {
        for n in 2..5 {
            let r = h2_circle_snf(&grp(&[n, n])).unwrap();
            assert_eq!(r.factors, vec![n]);
            let p = h2_circle_presentation(&grp(&[n, n]), n).unwrap();
            assert_eq!(p.class_order(&bilinear_cocycle(n).unwrap()).unwrap(), n);
        }
        assert!(h2_circle_snf(&grp(&[4])).unwrap().factors.is_empty());
        assert_eq!(h2_circle_snf(&grp(&[2, 4])).unwrap().factors, vec![2]);
    }

    #[test]
    fn structural_examples() {
        let triv = h2_twisted_structural(4, &CoeffModule::additive(grp(&[6]))).unwrap();
        assert_eq!(triv.factors, vec![2]);
        let inv = CoeffModule::additive(grp(&[3])).with_action(vec![vec![vec![2]]]);
        assert!(h2_twisted_structural(2, &inv).unwrap().factors.is_empty());
        let swap = CoeffModule::additive(grp(&[2, 2])).with_action(vec![vec![vec![0, 1], vec![1, 0]]]);
        assert!(h2_twisted_structural(2, &swap).unwrap().factors.is_empty());
        let r = h2_trivial_structural(&grp(&[2, 4]), &CoeffModule::mu(4).unwrap()).unwrap();
        assert_eq!(r.factors, vec![2, 2, 4]);
    }

    #[test]
    fn twisted_bruteforce_matches_structural() {
        let inv = CoeffModule::additive(grp(&[3])).with_action(vec![vec![vec![2]]]);
        let r = h2_bruteforce(&grp(&[2]), &inv, DEFAULT_BUDGET).unwrap();
        assert!(r.factors.is_empty());
        let inv4 = CoeffModule::additive(grp(&[4])).with_action(vec![vec![vec![3]]]);
        let b = h2_bruteforce(&grp(&[2]), &inv4, DEFAULT_BUDGET).unwrap();
        let s = h2_twisted_structural(2, &inv4).unwrap();
        assert_eq!(b.factors, s.factors);
        assert_eq!(b.factors, vec![2]);
    }

    #[test]
    fn triviality_examples() {
        let c2 = grp(&[2]);
        let mu4 = CoeffModule::mu(4).unwrap();
        let w = Cochain::from_fn(2, &c2, &mu4, |a| if a == [1, 1] { 2 } else { 0 }).unwrap();
        let h = class_is_trivial(&w, DEFAULT_BUDGET).unwrap().unwrap();
        assert!(h.value(&[1]) == 1 || h.value(&[1]) == 3);
        let mu2 = CoeffModule::mu(2).unwrap();
        let w = Cochain::from_fn(2, &c2, &mu2, |a| usize::from(a == [1, 1])).unwrap();
        assert!(class_is_trivial(&w, DEFAULT_BUDGET).unwrap().is_none());
        let one = Cochain::trivial(2, &c2, &mu2);
        assert!(class_is_trivial(&one, DEFAULT_BUDGET).unwrap().unwrap().is_trivial());
        let three = Cochain::trivial(3, &grp(&[2, 2]), &mu2);
        assert!(class_is_trivial(&three, DEFAULT_BUDGET).unwrap().is_some());
    }
}
