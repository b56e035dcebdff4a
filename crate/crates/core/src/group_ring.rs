//! The group ring `Z[G_A]` of the square class group, the symmetric square
//! `S^2(A^x)`, and finitely presented `Z[G_A]`-modules.

use std::ops::{Add, Neg, Sub};

use serde::Serialize;

use crate::coeff_rings::{Elt, LocalRing};
use crate::error::{Error, Result};
use crate::exact_linalg::{is_zero_in, AbMap, Canonical, FinAbGroup, Int, IntMatrix, Presentation, SparseRow};

/// Multiplication table of `G_A`, classes indexed as in `LocalRing`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGroup {
    table: Vec<usize>,
    n: usize,
    minus_one: usize,
}

impl ClassGroup {
    pub fn of(ring: &LocalRing) -> Self {
        let n = ring.num_classes();
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = ring.class_mul(a, b);
            }
        }
        ClassGroup { table, n, minus_one: ring.class_unchecked(ring.neg(1)) }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    pub fn minus_one(&self) -> usize {
        self.minus_one
    }
}

/// An element of `Z[G_A]`: one coefficient per class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupRingElt(pub Vec<i64>);

impl GroupRingElt {
    pub fn zero(n: usize) -> Self {
        GroupRingElt(vec![0; n])
    }

    pub fn basis(n: usize, g: usize) -> Self {
        let mut v = vec![0; n];
        v[g] = 1;
        GroupRingElt(v)
    }

    pub fn one(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn augmentation(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn scale(&self, k: i64) -> Self {
        GroupRingElt(self.0.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Self, g: &ClassGroup) -> Self {
        let n = g.order();
        let mut out = vec![0; n];
        for (a, &x) in self.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (b, &y) in other.0.iter().enumerate() {
                out[g.mul(a, b)] += x * y;
            }
        }
        GroupRingElt(out)
    }

    /// `<c> * self`.
    pub fn translate(&self, c: usize, g: &ClassGroup) -> Self {
        let mut out = vec![0; g.order()];
        for (a, &x) in self.0.iter().enumerate() {
            out[g.mul(c, a)] += x;
        }
        GroupRingElt(out)
    }

    /// `<g> -> <-g>` on basis elements.
    pub fn twist(&self, g: &ClassGroup) -> Self {
        self.translate(g.minus_one(), g)
    }

    pub fn to_ints(&self) -> Vec<Int> {
        self.0.iter().map(|&c| Int::from(c)).collect()
    }

    pub fn from_ints(v: &[Int]) -> Option<Self> {
        v.iter().map(|c| i64::try_from(c).ok()).collect::<Option<Vec<_>>>().map(GroupRingElt)
    }
}

impl Add for &GroupRingElt {
    type Output = GroupRingElt;
    fn add(self, o: &GroupRingElt) -> GroupRingElt {
        GroupRingElt(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &GroupRingElt {
    type Output = GroupRingElt;
    fn sub(self, o: &GroupRingElt) -> GroupRingElt {
        GroupRingElt(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &GroupRingElt {
    type Output = GroupRingElt;
    fn neg(self) -> GroupRingElt {
        self.scale(-1)
    }
}

/// `<a>` in `Z[G_A]`.
pub fn class_elt(ring: &LocalRing, a: Elt) -> Result<GroupRingElt> {
    Ok(GroupRingElt::basis(ring.num_classes(), ring.square_class(a)?))
}

/// `<<a>> = <a> - 1`.
pub fn dbl(ring: &LocalRing, a: Elt) -> Result<GroupRingElt> {
    let n = ring.num_classes();
    Ok(&class_elt(ring, a)? - &GroupRingElt::one(n))
}

/// `p_{-1}^+ = <-1> + 1`.
pub fn p_minus1_plus(ring: &LocalRing) -> GroupRingElt {
    let n = ring.num_classes();
    &class_elt(ring, ring.neg(1)).unwrap() + &GroupRingElt::one(n)
}

/// `lambda_1([a]) = <<a>> <<1 - a>>`.
pub fn lambda1_value(ring: &LocalRing, a: Elt) -> Result<GroupRingElt> {
    if !ring.in_w(a) {
        return Err(Error::NotInW(ring.show(a)));
    }
    let g = ClassGroup::of(ring);
    Ok(dbl(ring, a)?.mul(&dbl(ring, ring.sub(1, a))?, &g))
}

/// `Z[G_A] / (ideal generated by lambda_1 values)`.
pub fn gw_bar(ring: &LocalRing) -> FinAbGroup {
    let g = ClassGroup::of(ring);
    let n = g.order();
    let mut rels: Vec<SparseRow> = Vec::new();
    for a in ring.w_set() {
        let v = lambda1_value(ring, a).unwrap();
        for c in 0..n {
            let t = v.translate(c, &g);
            rels.push(t.0.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, Int::from(x))).collect());
        }
    }
    Presentation::new(n, rels).canonicalize().group
}

/// `S^2_Z(A^x) = (A^x (x) A^x) / <a(x)b + b(x)a>`, presented on all pairs
/// of units with bilinearity relations.
#[derive(Clone, Debug)]
pub struct SymSquare {
    unit_pos: Vec<usize>,
    nu: usize,
    pub presentation: Presentation,
    pub canon: Canonical,
}

impl SymSquare {
    pub fn new(ring: &LocalRing) -> Self {
        let units = ring.units();
        let nu = units.len();
        let mut unit_pos = vec![usize::MAX; ring.size()];
        for (i, &u) in units.iter().enumerate() {
            unit_pos[u as usize] = i;
        }
        let gen = |a: usize, b: usize| a * nu + b;
        let mut rels: Vec<SparseRow> = Vec::new();
        let one = Int::from(1);
        let m1 = Int::from(-1);
        for (i, &a) in units.iter().enumerate() {
            for (j, &b) in units.iter().enumerate() {
                let ab = unit_pos[ring.mul(a, b) as usize];
                for k in 0..nu {
                    // (ab) (x) c = a (x) c + b (x) c
                    rels.push(vec![(gen(ab, k), one.clone()), (gen(i, k), m1.clone()), (gen(j, k), m1.clone())]);
                    // c (x) (ab) = c (x) a + c (x) b
                    rels.push(vec![(gen(k, ab), one.clone()), (gen(k, i), m1.clone()), (gen(k, j), m1.clone())]);
                }
                rels.push(vec![(gen(i, j), one.clone()), (gen(j, i), one.clone())]);
            }
        }
        let presentation = Presentation::new(nu * nu, rels);
        let canon = presentation.canonicalize();
        SymSquare { unit_pos, nu, presentation, canon }
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.canon.group
    }

    /// Canonical coordinates of `a (x) b`.
    pub fn value(&self, a: Elt, b: Elt) -> Result<Vec<Int>> {
        let (i, j) = (self.unit_pos[a as usize], self.unit_pos[b as usize]);
        if i == usize::MAX {
            return Err(Error::NotAUnit(a.to_string()));
        }
        if j == usize::MAX {
            return Err(Error::NotAUnit(b.to_string()));
        }
        Ok(self.canon.to_canon.row(i * self.nu + j).to_vec())
    }

    pub fn is_zero(&self, x: &[Int]) -> bool {
        is_zero_in(&self.canon.group, x)
    }
}

/// `lambda_2([a]) = a (x) (1 - a)` in canonical coordinates of `S^2`.
pub fn lambda2_value(ring: &LocalRing, s2: &SymSquare, a: Elt) -> Result<Vec<Int>> {
    if !ring.in_w(a) {
        return Err(Error::NotInW(ring.show(a)));
    }
    s2.value(a, ring.sub(1, a))
}

/// A presented abelian group with a list of involutions (row convention:
/// row `i` is the image of generator `i`).
#[derive(Clone, Debug)]
pub struct GModule {
    pub group: Presentation,
    pub involutions: Vec<IntMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ModuleVerdict {
    Pass,
    Fail { involution: usize, reason: String },
}

impl GModule {
    pub fn check(&self) -> ModuleVerdict {
        let n = self.group.gens;
        let canon = self.group.canonicalize();
        let zero_mod = |m: &IntMatrix| (0..n).all(|i| is_zero_in(&canon.group, &canon.coords(m.row(i))));
        for (k, t) in self.involutions.iter().enumerate() {
            if t.rows() != n || t.cols() != n {
                return ModuleVerdict::Fail { involution: k, reason: "wrong shape".into() };
            }
            let as_map = AbMap::new(self.group.clone(), self.group.clone(), t.clone());
            if let Err(e) = as_map.canonical() {
                return ModuleVerdict::Fail { involution: k, reason: format!("does not preserve relations: {e}") };
            }
            let sq = t * t;
            let diff = sub_identity(&sq);
            if !zero_mod(&diff) {
                return ModuleVerdict::Fail { involution: k, reason: "square ≠ identity".into() };
            }
            for (l, u) in self.involutions.iter().enumerate().skip(k + 1) {
                let c = &(t * u) - &(u * t);
                if !zero_mod(&c) {
                    return ModuleVerdict::Fail { involution: k, reason: format!("does not commute with involution {l}") };
                }
            }
        }
        ModuleVerdict::Pass
    }
}

fn sub_identity(m: &IntMatrix) -> IntMatrix {
    let mut out = m.clone();
    for i in 0..m.rows().min(m.cols()) {
        let v = out.get(i, i) - Int::from(1);
        out.set(i, i, v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda1_examples() {
        let f5 = LocalRing::fq(5, 1).unwrap();
        assert!(lambda1_value(&f5, 2).unwrap().is_zero());
        // 3 and -2 = 3 are nonsquares: (s - 1)^2 = 2 - 2s
        assert_eq!(lambda1_value(&f5, 3).unwrap(), GroupRingElt(vec![2, -2]));
        let f7 = LocalRing::fq(7, 1).unwrap();
        assert_eq!(lambda1_value(&f7, 3).unwrap(), GroupRingElt(vec![2, -2]));
        let f8 = LocalRing::fq(2, 3).unwrap();
        assert!(f8.w_set().iter().all(|&a| lambda1_value(&f8, a).unwrap().is_zero()));
        assert!(matches!(lambda1_value(&f5, 1), Err(Error::NotInW(_))));
    }

    #[test]
    fn sym_square_orders() {
        for (p, d, want) in [(5, 1, 2u64), (7, 1, 2), (3, 2, 2), (2, 2, 1), (2, 3, 1)] {
            let ring = LocalRing::fq(p, d).unwrap();
            let s2 = SymSquare::new(&ring);
            assert_eq!(s2.group().order(), Some(Int::from(want)), "F_{}", p.pow(d));
        }
    }

    #[test]
    fn lambda2_f5() {
        let f5 = LocalRing::fq(5, 1).unwrap();
        let s2 = SymSquare::new(&f5);
        assert!(s2.is_zero(&lambda2_value(&f5, &s2, 2).unwrap()));
        let x = s2.value(2, 3).unwrap();
        let y = s2.value(3, 2).unwrap();
        let sum: Vec<Int> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        assert!(s2.is_zero(&sum));
    }

    #[test]
    fn gw_bar_char_two_is_z() {
        assert_eq!(gw_bar(&LocalRing::fq(2, 2).unwrap()), FinAbGroup::free(1));
    }

    #[test]
    fn module_checks() {
        let z2 = Presentation::free(2);
        let swap = IntMatrix::from_i64(2, 2, &[0, 1, 1, 0]);
        assert_eq!(GModule { group: z2.clone(), involutions: vec![swap] }.check(), ModuleVerdict::Pass);
        assert_eq!(GModule { group: z2.clone(), involutions: vec![IntMatrix::identity(2)] }.check(), ModuleVerdict::Pass);
        // order-3 automorphism of Z/7
        let z7 = Presentation::of_group(&FinAbGroup::cyclic(7));
        let bad = GModule { group: z7, involutions: vec![IntMatrix::from_i64(1, 1, &[2])] };
        assert!(matches!(bad.check(), ModuleVerdict::Fail { reason, .. } if reason.contains("square")));
    }
}
