//! Finite abelian groups `C_{n_1} × … × C_{n_k}` in additive residue
//! notation, their characters, subgroups and quotients.
//!
//! The character group is identified with the group itself: the residue
//! vector `c` names the character `g ↦ exp(2πi Σ c_i g_i / n_i)`. The
//! generator orders are kept exactly as given; they need not form a divisor
//! chain.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlin::{lattice_quotient_factors, IntMatrix};
use crate::scalar::RootOfUnity;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAbGroup {
    orders: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub residues: Vec<u64>,
}

/// A character, named by its residue vector under the identification of
/// the dual group with the group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    pub residues: Vec<u64>,
}

impl GroupElement {
    pub fn as_character(&self) -> Character {
        Character {
            residues: self.residues.clone(),
        }
    }
}

impl Character {
    pub fn as_element(&self) -> GroupElement {
        GroupElement {
            residues: self.residues.clone(),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.residues.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.residues.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FinAbGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.contains(&0) {
            return Err(Error::Invalid("cyclic factor of order 0".into()));
        }
        Ok(FinAbGroup { orders })
    }

    pub fn cyclic(n: u64) -> Self {
        FinAbGroup::new(vec![n]).expect("positive order")
    }

    pub fn trivial() -> Self {
        FinAbGroup { orders: vec![] }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |a, &n| a.lcm(&n))
    }

    pub fn is_cyclic_presentation(&self) -> bool {
        self.orders.len() == 1
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.rank()],
        }
    }

    /// Reduces arbitrary integers componentwise.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        if residues.len() != self.rank() {
            return Err(Error::Shape(format!(
                "element of length {} in a group of rank {}",
                residues.len(),
                self.rank()
            )));
        }
        Ok(GroupElement {
            residues: residues
                .iter()
                .zip(&self.orders)
                .map(|(&r, &n)| r.rem_euclid(n as i64) as u64)
                .collect(),
        })
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if g.residues.len() != self.rank()
            || g.residues.iter().zip(&self.orders).any(|(r, n)| r >= n)
        {
            return Err(Error::Shape(format!("{g} is not an element of {self}")));
        }
        Ok(())
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&b.residues)
                .zip(&self.orders)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&self.orders)
                .map(|(x, n)| (n - x) % n)
                .collect(),
        }
    }

    pub fn scale(&self, a: &GroupElement, k: i64) -> GroupElement {
        let r: Vec<i64> = a.residues.iter().map(|&x| x as i64 * k).collect();
        self.element(&r).expect("same rank")
    }

    pub fn order_of(&self, a: &GroupElement) -> u64 {
        a.residues
            .iter()
            .zip(&self.orders)
            .fold(1, |acc, (&x, &n)| acc.lcm(&(n / x.gcd(&n))))
    }

    /// Lexicographic index (first coordinate most significant).
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.residues
            .iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&r, &n)| acc * n as usize + r as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        let mut residues = vec![0; self.rank()];
        for (i, &n) in self.orders.iter().enumerate().rev() {
            residues[i] = (idx % n as usize) as u64;
            idx /= n as usize;
        }
        GroupElement { residues }
    }

    /// All elements in index order.
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order()).map(|i| self.element_at(i)).collect()
    }

    pub fn characters(&self) -> Vec<Character> {
        self.elements().into_iter().map(|g| g.as_character()).collect()
    }

    /// Precomputed index tables for the group law.
    pub fn table(&self) -> GroupTable {
        let n = self.order();
        let elems = self.elements();
        let mut add = vec![0; n * n];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                add[i * n + j] = self.index_of(&self.add(a, b));
            }
        }
        let neg = elems.iter().map(|a| self.index_of(&self.neg(a))).collect();
        GroupTable { n, add, neg }
    }

    /// `χ_c(g) = Σ c_i g_i / n_i` in `Q/Z`.
    pub fn pairing(&self, c: &Character, g: &GroupElement) -> Result<RootOfUnity> {
        self.check(&c.as_element())?;
        self.check(g)?;
        Ok(self.pairing_unchecked(&c.residues, &g.residues))
    }

    pub(crate) fn pairing_unchecked(&self, c: &[u64], g: &[u64]) -> RootOfUnity {
        c.iter()
            .zip(g)
            .zip(&self.orders)
            .fold(RootOfUnity::one(), |acc, ((&ci, &gi), &n)| {
                acc.combine(&RootOfUnity::new(((ci * gi) % n) as i64, n))
            })
    }

    /// Standard basis vectors and the paired dual characters.
    pub fn canonical_generators(&self) -> (Vec<GroupElement>, Vec<Character>) {
        let gens: Vec<GroupElement> = (0..self.rank())
            .map(|i| {
                let mut r = vec![0; self.rank()];
                if self.orders[i] > 1 {
                    r[i] = 1;
                }
                GroupElement { residues: r }
            })
            .collect();
        let chars = gens.iter().map(GroupElement::as_character).collect();
        (gens, chars)
    }

    /// Closure of `gens` under addition.
    pub fn subgroup_closure(&self, gens: &[GroupElement]) -> Result<SubgroupData> {
        for g in gens {
            self.check(g)?;
        }
        let n = self.order();
        let mut seen = vec![false; n];
        let id = self.identity();
        seen[self.index_of(&id)] = true;
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g);
                let k = self.index_of(&y);
                if !seen[k] {
                    seen[k] = true;
                    frontier.push(y);
                }
            }
        }
        let elements = (0..n).filter(|&i| seen[i]).map(|i| self.element_at(i)).collect();
        Ok(SubgroupData {
            ambient: self.clone(),
            generators: gens.to_vec(),
            elements,
        })
    }

    /// Relation rows `n_i e_i` of the presentation.
    fn relation_rows(&self) -> IntMatrix {
        (0..self.rank())
            .map(|i| {
                (0..self.rank())
                    .map(|j| BigInt::from(if i == j { self.orders[i] } else { 0 }))
                    .collect()
            })
            .collect()
    }

    fn lattice_of(&self, gens: &[GroupElement]) -> IntMatrix {
        let mut rows = self.relation_rows();
        rows.extend(
            gens.iter()
                .map(|g| g.residues.iter().map(|&r| BigInt::from(r)).collect()),
        );
        rows
    }

    /// Invariant factors of `G / sub`, via Smith normal form of the
    /// relation matrix.
    pub fn quotient_invariants(&self, sub: &SubgroupData) -> Result<Vec<u64>> {
        if sub.ambient != *self {
            return Err(Error::Shape("subgroup of a different group".into()));
        }
        let whole = self.canonical_generators().0;
        Ok(self.subquotient_invariants(&whole, &sub.generators))
    }

    /// Invariant factors of `⟨h_gens⟩ / ⟨k_gens⟩`; the second subgroup must
    /// lie in the first.
    pub fn subquotient_invariants(&self, h_gens: &[GroupElement], k_gens: &[GroupElement]) -> Vec<u64> {
        if self.rank() == 0 {
            return vec![];
        }
        lattice_quotient_factors(&self.lattice_of(h_gens), &self.lattice_of(k_gens), self.rank())
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "C_1");
        }
        let parts: Vec<String> = self.orders.iter().map(|n| format!("C_{n}")).collect();
        write!(f, "{}", parts.join("×"))
    }
}

/// Index-level group law.
#[derive(Clone, Debug)]
pub struct GroupTable {
    pub n: usize,
    add: Vec<usize>,
    neg: Vec<usize>,
}

impl GroupTable {
    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.n + b]
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupData {
    pub ambient: FinAbGroup,
    pub generators: Vec<GroupElement>,
    /// Enumerated closure in index order.
    pub elements: Vec<GroupElement>,
}

impl SubgroupData {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search_by_key(&self.ambient.index_of(g), |e| self.ambient.index_of(e)).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(orders: &[u64]) -> FinAbGroup {
        FinAbGroup::new(orders.to_vec()).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let k = g(&[2, 2]);
        let c = Character { residues: vec![1, 0] };
        let x = k.element(&[0, 1]).unwrap();
        assert_eq!(k.pairing(&c, &x).unwrap(), RootOfUnity::one());
        for n in 1..8 {
            let cn = g(&[n]);
            let one = cn.element(&[1]).unwrap();
            assert_eq!(
                cn.pairing(&one.as_character(), &one).unwrap(),
                RootOfUnity::new(1, n)
            );
        }
        let id = k.identity().as_character();
        for x in k.elements() {
            assert!(k.pairing(&id, &x).unwrap().is_one());
        }
    }

    #[test]
    fn pairing_rejects_mismatch() {
        let k = g(&[2, 2]);
        let c = Character { residues: vec![1] };
        assert!(k.pairing(&c, &k.identity()).is_err());
        let bad = GroupElement { residues: vec![0, 2] };
        assert!(k.pairing(&Character { residues: vec![0, 0] }, &bad).is_err());
    }

    #[test]
    fn canonical_generators_examples() {
        let (gens, chars) = g(&[6]).canonical_generators();
        assert_eq!(gens, vec![GroupElement { residues: vec![1] }]);
        assert_eq!(chars, vec![Character { residues: vec![1] }]);
        let (gens, _) = g(&[2, 3]).canonical_generators();
        assert_eq!(gens.len(), 2);
        assert_eq!(gens[1].residues, vec![0, 1]);
        let (gens, chars) = FinAbGroup::trivial().canonical_generators();
        assert!(gens.is_empty() && chars.is_empty());
    }

    #[test]
    fn closure_examples() {
        let c6 = g(&[6]);
        let s = c6.subgroup_closure(&[c6.element(&[2]).unwrap()]).unwrap();
        let res: Vec<u64> = s.elements.iter().map(|e| e.residues[0]).collect();
        assert_eq!(res, vec![0, 2, 4]);
        assert_eq!(s.order(), 3);
        assert_eq!(c6.subgroup_closure(&[c6.identity()]).unwrap().order(), 1);
        let k = g(&[2, 2]);
        let (gens, _) = k.canonical_generators();
        assert_eq!(k.subgroup_closure(&gens).unwrap().order(), 4);
    }

    #[test]
    fn quotient_examples() {
        let c4 = g(&[4]);
        let s = c4.subgroup_closure(&[c4.element(&[2]).unwrap()]).unwrap();
        assert_eq!(c4.quotient_invariants(&s).unwrap(), vec![2]);
        let whole = c4.subgroup_closure(&c4.canonical_generators().0).unwrap();
        assert!(c4.quotient_invariants(&whole).unwrap().is_empty());
        let k = g(&[2, 2]);
        let d = k.subgroup_closure(&[k.element(&[1, 1]).unwrap()]).unwrap();
        assert_eq!(k.quotient_invariants(&d).unwrap(), vec![2]);
    }

    #[test]
    fn index_round_trip() {
        let k = g(&[2, 3, 4]);
        for i in 0..k.order() {
            assert_eq!(k.index_of(&k.element_at(i)), i);
        }
    }
}
