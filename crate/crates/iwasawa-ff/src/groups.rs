//! Finite abelian groups in independent-generator form, with exponent-vector
//! elements, mixed-radix indexing, subgroups and quotient presentations.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::numtheory::{gcd, lcm};
use crate::snf::{smith, vec_mat};

/// ⊕ Z/o_i with every o_i ≥ 2 (the trivial group has no factors).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    orders: Vec<u64>,
    #[serde(skip)]
    strides: Vec<u64>,
    #[serde(skip)]
    size: u64,
}

impl AbelianGroup {
    pub fn new(orders: Vec<u64>) -> AbelianGroup {
        let orders: Vec<u64> = orders.into_iter().filter(|&o| o > 1).collect();
        let mut strides = Vec::with_capacity(orders.len());
        let mut s = 1u64;
        for &o in &orders {
            strides.push(s);
            s = s.checked_mul(o).expect("group too large");
        }
        AbelianGroup { orders, strides, size: s }
    }

    pub fn trivial() -> AbelianGroup {
        AbelianGroup::new(vec![])
    }

    pub fn cyclic(n: u64) -> AbelianGroup {
        AbelianGroup::new(vec![n])
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> u64 {
        self.size
    }

    pub fn len(&self) -> usize {
        self.size as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exponent (lcm of the orders).
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |a, &o| lcm(a, o))
    }

    pub fn identity(&self) -> Vec<u64> {
        vec![0; self.rank()]
    }

    /// Reduce an integer exponent vector into canonical form.
    pub fn reduce(&self, x: &[i128]) -> Vec<u64> {
        x.iter().zip(&self.orders).map(|(&a, &o)| a.rem_euclid(o as i128) as u64).collect()
    }

    pub fn index(&self, x: &[u64]) -> usize {
        x.iter().zip(&self.strides).map(|(&a, &s)| a * s).sum::<u64>() as usize
    }

    pub fn elem(&self, idx: usize) -> Vec<u64> {
        let mut x = idx as u64;
        self.orders
            .iter()
            .map(|&o| {
                let a = x % o;
                x /= o;
                a
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.len()).map(|i| self.elem(i))
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).zip(&self.orders).map(|((&x, &y), &o)| (x + y) % o).collect()
    }

    pub fn inv(&self, a: &[u64]) -> Vec<u64> {
        a.iter().zip(&self.orders).map(|(&x, &o)| (o - x) % o).collect()
    }

    pub fn pow(&self, a: &[u64], n: i128) -> Vec<u64> {
        a.iter().zip(&self.orders).map(|(&x, &o)| ((x as i128 * n).rem_euclid(o as i128)) as u64).collect()
    }

    /// Index arithmetic without materializing vectors.
    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        let (mut x, mut y) = (a as u64, b as u64);
        let mut out = 0u64;
        for (&o, &s) in self.orders.iter().zip(&self.strides) {
            out += ((x % o + y % o) % o) * s;
            x /= o;
            y /= o;
        }
        out as usize
    }

    pub fn inv_idx(&self, a: usize) -> usize {
        let mut x = a as u64;
        let mut out = 0u64;
        for (&o, &s) in self.orders.iter().zip(&self.strides) {
            out += ((o - x % o) % o) * s;
            x /= o;
        }
        out as usize
    }

    pub fn element_order(&self, a: &[u64]) -> u64 {
        a.iter().zip(&self.orders).fold(1, |acc, (&x, &o)| lcm(acc, o / gcd(o, x)))
    }

    /// Subgroup generated by `gens`, as a sorted set of element indices.
    pub fn span(&self, gens: &[Vec<u64>]) -> Subgroup {
        let mut members: BTreeSet<usize> = BTreeSet::new();
        members.insert(0);
        let mut frontier = vec![0usize];
        let gen_idx: Vec<usize> = gens.iter().map(|g| self.index(g)).collect();
        while let Some(x) = frontier.pop() {
            for &g in &gen_idx {
                let y = self.mul_idx(x, g);
                if members.insert(y) {
                    frontier.push(y);
                }
            }
        }
        Subgroup { members: members.into_iter().collect() }
    }

    /// Quotient by the subgroup generated by `rels`: the new group and the
    /// integer matrix sending coordinates here to coordinates there.
    pub fn quotient(&self, rels: &[Vec<u64>]) -> (AbelianGroup, Vec<Vec<i128>>) {
        let (g, map, _) = self.quotient_with_sections(rels);
        (g, map)
    }

    /// As [`AbelianGroup::quotient`], also returning for each new generator
    /// a preimage in the old coordinates.
    pub fn quotient_with_sections(&self, rels: &[Vec<u64>]) -> (AbelianGroup, Vec<Vec<i128>>, Vec<Vec<i128>>) {
        let r = self.rank();
        let mut rows: Vec<Vec<i128>> = Vec::new();
        for (i, &o) in self.orders.iter().enumerate() {
            let mut row = vec![0i128; r];
            row[i] = o as i128;
            rows.push(row);
        }
        for rel in rels {
            rows.push(rel.iter().map(|&x| x as i128).collect());
        }
        let s = smith(&rows, r);
        let keep: Vec<usize> = (0..r).filter(|&j| s.diag.get(j).copied().unwrap_or(0) != 1).collect();
        let orders: Vec<u64> = keep.iter().map(|&j| s.diag[j] as u64).collect();
        debug_assert!(orders.iter().all(|&o| o > 1), "finite quotient expected");
        let map: Vec<Vec<i128>> = s.v.iter().map(|row| keep.iter().map(|&j| row[j]).collect()).collect();
        let sections = keep.iter().map(|&j| s.v_inv[j].clone()).collect();
        (AbelianGroup::new(orders), map, sections)
    }
}

/// A subgroup stored as its sorted element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    members: Vec<usize>,
}

impl Subgroup {
    pub fn order(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.members.binary_search(&idx).is_ok()
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        Subgroup { members: self.members.iter().copied().filter(|&x| other.contains(x)).collect() }
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }
}

/// A homomorphism between groups in coordinates: x ↦ reduce(x · M).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupHom {
    pub source: AbelianGroup,
    pub target: AbelianGroup,
    /// One row per source generator: its image.
    pub images: Vec<Vec<u64>>,
}

impl GroupHom {
    pub fn from_matrix(source: &AbelianGroup, target: &AbelianGroup, m: &[Vec<i128>]) -> GroupHom {
        let images = m.iter().map(|row| target.reduce(row)).collect();
        GroupHom { source: source.clone(), target: target.clone(), images }
    }

    pub fn identity(g: &AbelianGroup) -> GroupHom {
        let images = (0..g.rank()).map(|i| (0..g.rank()).map(|j| u64::from(i == j)).collect()).collect();
        GroupHom { source: g.clone(), target: g.clone(), images }
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        let xi: Vec<i128> = x.iter().map(|&a| a as i128).collect();
        let rows: Vec<Vec<i128>> = self.images.iter().map(|r| r.iter().map(|&a| a as i128).collect()).collect();
        if rows.is_empty() {
            return self.target.identity();
        }
        self.target.reduce(&vec_mat(&xi, &rows))
    }

    pub fn apply_idx(&self, idx: usize) -> usize {
        self.target.index(&self.apply(&self.source.elem(idx)))
    }

    /// Well-defined (kills the relations of the source).
    pub fn is_well_defined(&self) -> bool {
        self.images.iter().zip(self.source.orders()).all(|(img, &o)| self.target.pow(img, o as i128) == self.target.identity())
    }

    pub fn is_surjective(&self) -> bool {
        self.target.span(&self.images).order() == self.target.order()
    }

    pub fn kernel(&self) -> Subgroup {
        let members = (0..self.source.len()).filter(|&i| self.apply_idx(i) == 0).collect();
        Subgroup { members }
    }

    pub fn compose(&self, then: &GroupHom) -> GroupHom {
        let images = self.images.iter().map(|x| then.apply(x)).collect();
        GroupHom { source: self.source.clone(), target: then.target.clone(), images }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_roundtrip_and_arithmetic() {
        let g = AbelianGroup::new(vec![4, 3, 3]);
        assert_eq!(g.order(), 36);
        for i in 0..g.len() {
            let x = g.elem(i);
            assert_eq!(g.index(&x), i);
            for j in (0..g.len()).step_by(5) {
                assert_eq!(g.mul_idx(i, j), g.index(&g.mul(&x, &g.elem(j))));
            }
            assert_eq!(g.mul_idx(i, g.inv_idx(i)), 0);
        }
        assert_eq!(g.exponent(), 12);
    }

    #[test]
    fn quotient_structure() {
        // Z/4 × Z/6 modulo <(2, 3)>: order 12.
        let g = AbelianGroup::new(vec![4, 6]);
        let (q, m) = g.quotient(&[vec![2, 3]]);
        assert_eq!(q.order(), 12);
        let hom = GroupHom::from_matrix(&g, &q, &m);
        assert!(hom.is_well_defined());
        assert!(hom.is_surjective());
        assert_eq!(hom.kernel().order(), 2);
        assert!(hom.kernel().contains(g.index(&[2, 3])));
        let (_, _, sections) = g.quotient_with_sections(&[vec![2, 3]]);
        for (j, sec) in sections.iter().enumerate() {
            let img = hom.apply(&g.reduce(sec));
            let unit: Vec<u64> = (0..q.rank()).map(|i| u64::from(i == j)).collect();
            assert_eq!(img, unit);
        }
    }

    #[test]
    fn span_and_intersection() {
        let g = AbelianGroup::new(vec![12]);
        let a = g.span(&[vec![4]]);
        let b = g.span(&[vec![6]]);
        assert_eq!(a.order(), 3);
        assert_eq!(b.order(), 2);
        assert_eq!(a.intersect(&b).order(), 1);
        assert_eq!(g.span(&[vec![4], vec![6]]).order(), 6);
    }
}
