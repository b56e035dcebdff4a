//! Tor of cyclic groups, the swap action on tensor squares, exterior and
//! symmetric powers of finite abelian groups, and the predicted order of
//! `H_3(PSL_2(A), Z)`.

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::coeff_rings::LocalRing;
use crate::error::{Error, Result};
use crate::exact_linalg::{hom_kernel, ser_int, ser_opt_int, AbMap, FinAbGroup, Int, IntMatrix, Presentation, SparseRow};

pub const PREDICTION_MARKER: &str = "prediction, not independently verified";
pub const HYPOTHESES_NOT_MET: &str = "hypotheses not met, exactness not claimed";

/// `Tor_1(Z/m, Z/n) = Z/gcd(m, n)`.
pub fn tor_cyclic(m: u64, n: u64) -> FinAbGroup {
    assert!(m >= 1 && n >= 1, "orders must be positive");
    FinAbGroup::cyclic(m.gcd(&n))
}

/// `Tor_1(G, H)` for finite `G`, `H`: `(+)_{i,j} Z/gcd(d_i, e_j)`.
pub fn tor_groups(g: &FinAbGroup, h: &FinAbGroup) -> FinAbGroup {
    assert!(g.is_finite() && h.is_finite(), "Tor is computed for finite groups only");
    let parts: Vec<Int> = g.torsion.iter().flat_map(|d| h.torsion.iter().map(move |e| d.gcd(e))).collect();
    FinAbGroup::from_diagonal(&parts, parts.len())
}

/// The tensor-square model `C (x) C` of a cyclic group of order `n`,
/// generated by `g (x) g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicModel {
    pub order: u64,
}

impl CyclicModel {
    pub fn group(&self) -> FinAbGroup {
        FinAbGroup::cyclic(self.order)
    }
}

/// Presentation of `G (x) G` on `e_i (x) e_j` (index `i * k + j`) for the
/// canonical generators `e_i` of `G`.
fn tensor_square(g: &FinAbGroup) -> Presentation {
    let m = g.moduli();
    let k = m.len();
    let mut rels = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let d = m[i].gcd(&m[j]);
            if !d.is_zero() {
                rels.push(vec![(i * k + j, d)]);
            }
        }
    }
    Presentation::new(k * k, rels)
}

/// Fixed points of `x (x) y -> y (x) x` on `G (x) G`. This is the composite
/// `-sigma_1` where `sigma_1(a (x) b) = -b (x) a`.
pub fn sigma2_fixed_group(g: &FinAbGroup) -> Result<FinAbGroup> {
    let k = g.num_gens();
    let t = tensor_square(g);
    let mut m = IntMatrix::zeros(k * k, k * k);
    for i in 0..k {
        for j in 0..k {
            let v = m.get(i * k + j, j * k + i) + Int::from(1);
            m.set(i * k + j, j * k + i, v);
            let w = m.get(i * k + j, i * k + j) - Int::from(1);
            m.set(i * k + j, i * k + j, w);
        }
    }
    Ok(hom_kernel(&AbMap::new(t.clone(), t, m))?.group)
}

pub fn sigma2_fixed(c: &CyclicModel) -> Result<FinAbGroup> {
    sigma2_fixed_group(&c.group())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for mut rest in subsets(n, k - 1).into_iter().filter(|r| r.first().is_none_or(|&x| x > first)) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn gcd_of(values: &[Int]) -> Int {
    values.iter().fold(Int::zero(), |acc, v| acc.gcd(v))
}

/// `Lambda^k G = (+)_{i1 < .. < ik} Z/gcd(d_i1, .., d_ik)`, free summands
/// counting as modulus 0.
pub fn wedge_closed(g: &FinAbGroup, k: usize) -> FinAbGroup {
    let m = g.moduli();
    let parts: Vec<Int> = subsets(m.len(), k).iter().map(|s| gcd_of(&s.iter().map(|&i| m[i].clone()).collect::<Vec<_>>())).collect();
    FinAbGroup::from_diagonal(&parts, parts.len())
}

/// `Lambda^k G` as `G^{(x) k}` modulo `x (x) x` in adjacent positions and
/// the antisymmetry relations.
pub fn wedge_brute(g: &FinAbGroup, k: usize) -> FinAbGroup {
    let m = g.moduli();
    let n = m.len();
    let total = n.pow(k as u32);
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut d = vec![0; k];
        for slot in d.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        d
    };
    let index = |d: &[usize]| d.iter().fold(0, |a, &x| a * n + x);
    let mut rels: Vec<SparseRow> = Vec::new();
    for idx in 0..total {
        let d = digits(idx);
        for &i in &d {
            if !m[i].is_zero() {
                rels.push(vec![(idx, m[i].clone())]);
            }
        }
        for p in 0..k.saturating_sub(1) {
            if d[p] == d[p + 1] {
                rels.push(vec![(idx, Int::from(1))]);
            } else {
                let mut s = d.clone();
                s.swap(p, p + 1);
                rels.push(vec![(idx, Int::from(1)), (index(&s), Int::from(1))]);
            }
        }
    }
    Presentation::new(total, rels).canonicalize().group
}

/// `Lambda^k G`, computed both ways; disagreement is an error.
pub fn wedge_power(g: &FinAbGroup, k: usize) -> Result<FinAbGroup> {
    let closed = wedge_closed(g, k);
    let brute = wedge_brute(g, k);
    if closed != brute {
        return Err(Error::IllDefined(format!("Lambda^{k}({g}): closed form {closed}, presentation {brute}")));
    }
    Ok(closed)
}

/// `(Lambda^2 G) / m` and `Lambda^2 (G / m)`.
pub fn wedge_mod_sides(g: &FinAbGroup, m: u64) -> Result<(FinAbGroup, FinAbGroup)> {
    let m = Int::from(m);
    Ok((wedge_power(g, 2)?.mod_m(&m), wedge_power(&g.mod_m(&m), 2)?))
}

/// `S^2 G = G (x) G / <x (x) y + y (x) x>`:
/// `(+)_i Z/gcd(2, d_i) (+) (+)_{i<j} Z/gcd(d_i, d_j)`.
pub fn sym_square_closed(g: &FinAbGroup) -> FinAbGroup {
    let m = g.moduli();
    let two = Int::from(2);
    let mut parts: Vec<Int> = m.iter().map(|d| d.gcd(&two)).collect();
    parts.extend(subsets(m.len(), 2).iter().map(|s| m[s[0]].gcd(&m[s[1]])));
    FinAbGroup::from_diagonal(&parts, parts.len())
}

/// `A^x` as an abstract group, from its multiplication table.
pub fn unit_group(ring: &LocalRing) -> FinAbGroup {
    unit_quotient(ring, &[])
}

/// `mu~(A) = A^x / mu_2(A)`.
pub fn mu_tilde(ring: &LocalRing) -> FinAbGroup {
    let mu2: Vec<_> = ring.units().iter().copied().filter(|&a| ring.mul(a, a) == 1).collect();
    unit_quotient(ring, &mu2)
}

fn unit_quotient(ring: &LocalRing, killed: &[u32]) -> FinAbGroup {
    let units = ring.units();
    let pos = |a: u32| units.binary_search(&a).expect("unit list is sorted");
    let mut rels: Vec<SparseRow> = Vec::new();
    for (i, &a) in units.iter().enumerate() {
        for (j, &b) in units.iter().enumerate().skip(i) {
            rels.push(vec![(i, Int::from(1)), (j, Int::from(1)), (pos(ring.mul(a, b)), Int::from(-1))]);
        }
    }
    for &a in killed {
        rels.push(vec![(pos(a), Int::from(1))]);
    }
    Presentation::new(units.len(), rels).canonicalize().group
}

#[derive(Clone, Debug, Serialize)]
pub struct BlochWignerReport {
    pub mu_tilde: FinAbGroup,
    /// `|Tor_1(mu~, mu~)|`.
    #[serde(serialize_with = "ser_int")]
    pub tor_order: Int,
    #[serde(serialize_with = "ser_opt_int")]
    pub rb_order: Option<Int>,
    #[serde(serialize_with = "ser_opt_int")]
    pub predicted_h3_order: Option<Int>,
    pub prediction_applicable: bool,
    pub marker: String,
}

/// `|H_3(PSL_2(A))| = |Tor_1(mu~, mu~)| * |RB(A)|` when the exact sequence
/// is available. The marker says whether the hypotheses behind the exact
/// sequence hold; the number is never checked against a computed `H_3`.
pub fn bloch_wigner_report(ring: &LocalRing, rb_order: Option<Int>) -> BlochWignerReport {
    let mu = mu_tilde(ring);
    let tor_order = tor_groups(&mu, &mu).order().expect("finite");
    let applicable = ring.hypotheses().prediction_applicable;
    let predicted = rb_order.as_ref().map(|rb| &tor_order * rb);
    BlochWignerReport {
        mu_tilde: mu,
        tor_order,
        rb_order,
        predicted_h3_order: predicted,
        prediction_applicable: applicable,
        marker: if applicable { PREDICTION_MARKER } else { HYPOTHESES_NOT_MET }.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(free: usize, tors: &[u64]) -> FinAbGroup {
        FinAbGroup { free_rank: free, torsion: tors.iter().map(|&x| Int::from(x)).collect() }
    }

    #[test]
    fn tor_examples() {
        assert_eq!(tor_cyclic(6, 4), grp(0, &[2]));
        assert!(tor_cyclic(1, 9).is_trivial());
        assert_eq!(tor_cyclic(12, 12), grp(0, &[12]));
    }

    #[test]
    fn swap_fixed_points() {
        assert_eq!(sigma2_fixed(&CyclicModel { order: 6 }).unwrap(), grp(0, &[6]));
        assert!(sigma2_fixed(&CyclicModel { order: 1 }).unwrap().is_trivial());
        assert_eq!(sigma2_fixed(&CyclicModel { order: 2 }).unwrap(), grp(0, &[2]));
        // e11, e22, e12 + e21
        assert_eq!(sigma2_fixed_group(&grp(0, &[2, 2])).unwrap(), grp(0, &[2, 2, 2]));
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge_power(&grp(0, &[3, 3]), 2).unwrap(), grp(0, &[3]));
        assert!(wedge_power(&grp(0, &[2, 2]), 3).unwrap().is_trivial());
        assert_eq!(wedge_power(&grp(2, &[]), 2).unwrap(), grp(1, &[]));
        assert_eq!(wedge_power(&grp(1, &[4]), 2).unwrap(), grp(0, &[4]));
        assert_eq!(wedge_power(&grp(0, &[2, 4, 8]), 3).unwrap(), grp(0, &[2]));
    }

    #[test]
    fn unit_groups() {
        let f13 = LocalRing::fq(13, 1).unwrap();
        assert_eq!(unit_group(&f13), grp(0, &[12]));
        assert_eq!(mu_tilde(&f13), grp(0, &[6]));
        let z8 = LocalRing::zmod(2, 3).unwrap();
        assert_eq!(unit_group(&z8), grp(0, &[2, 2]));
        assert!(mu_tilde(&z8).is_trivial());
        let f8 = LocalRing::fq(2, 3).unwrap();
        assert_eq!(mu_tilde(&f8), grp(0, &[7]));
    }

    #[test]
    fn sym_square_closed_form() {
        assert_eq!(sym_square_closed(&grp(0, &[12])), grp(0, &[2]));
        assert!(sym_square_closed(&grp(0, &[7])).is_trivial());
        assert_eq!(sym_square_closed(&grp(0, &[2, 2])), grp(0, &[2, 2, 2]));
    }

    #[test]
    fn prediction_f13() {
        let r = bloch_wigner_report(&LocalRing::fq(13, 1).unwrap(), Some(Int::from(7)));
        assert_eq!(r.tor_order, Int::from(6));
        assert_eq!(r.predicted_h3_order, Some(Int::from(42)));
        assert_eq!(r.marker, PREDICTION_MARKER);
        let small = bloch_wigner_report(&LocalRing::fq(5, 1).unwrap(), Some(Int::from(3)));
        assert_eq!(small.predicted_h3_order, Some(Int::from(6)));
        assert_eq!(small.marker, HYPOTHESES_NOT_MET);
    }
}
