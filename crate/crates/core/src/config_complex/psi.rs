//! The `G_A` action on the coinvariant model of `RP(A)`, the classes
//! `psi_1(a)`, and the quotients by `Z[G_A] psi_1(-1)`.

use serde::Serialize;

use super::objects::RpComplex;
use super::ConfigComplex;
use crate::coeff_rings::Elt;
use crate::error::{Error, Result};
use crate::exact_linalg::{
    in_span, module_closure, reduce_mod, subquotient, CanonMap, FinAbGroup, Int, IntMatrix,
};
use crate::group_ring::{class_elt, dbl, p_minus1_plus, ClassGroup, GroupRingElt};

/// Permutation of `X_3` orbits induced by `diag(u, 1)`: row `o` is `e_{u.o}`.
pub fn orbit_action(cx: &ConfigComplex, rp: &RpComplex, u: Elt) -> IntMatrix {
    let perm = cx.levels.point_permutation(&cx.ring, &cx.ring.diag(u, 1));
    let x3 = cx.level(3);
    let no = rp.num_orbits();
    let mut m = IntMatrix::zeros(no, no);
    for (o, &r) in rp.orbit_reps.iter().enumerate() {
        let moved: Vec<u32> = x3.tuple(r).iter().map(|&p| perm[p as usize]).collect();
        m.set(o, rp.orbit_of[x3.index(&moved)] as usize, Int::from(1));
    }
    m
}

/// `diag(u, 1)` on canonical `RP` coordinates.
pub fn class_action(cx: &ConfigComplex, rp: &RpComplex, u: Elt) -> Result<IntMatrix> {
    let m = &(&rp.canon.lift * &orbit_action(cx, rp, u)) * &rp.canon.to_canon;
    let g = rp.canon.group.clone();
    CanonMap { source: g.clone(), target: g, matrix: m.clone() }.check()?;
    Ok(m)
}

/// Canonical action matrices of the class representatives.
pub fn class_actions(cx: &ConfigComplex, rp: &RpComplex) -> Result<Vec<IntMatrix>> {
    cx.ring.class_reps().iter().map(|&u| class_action(cx, rp, u)).collect()
}

/// `(inf,0,a) + (0,inf,a) - (inf,0,1) - (0,inf,1)` as a chain on `X_2`.
pub fn psi1_chain(cx: &ConfigComplex, a: Elt) -> Result<Vec<(usize, i64)>> {
    let ring = &cx.ring;
    if !ring.is_unit(a) {
        return Err(Error::NotAUnit(ring.show(a)));
    }
    let (inf, zero) = (ring.infinity(), ring.origin());
    let mut chain = Vec::with_capacity(4);
    for (x, s) in [(a, 1), (1, -1)] {
        let p = ring.point_of(x);
        chain.push((cx.tuple_index(&[inf, zero, p])?, s));
        chain.push((cx.tuple_index(&[zero, inf, p])?, s));
    }
    Ok(super::combine(chain))
}

/// `psi_1(a)` in orbit coordinates.
pub fn psi1_orbit_coords(cx: &ConfigComplex, rp: &RpComplex, a: Elt) -> Result<Vec<Int>> {
    let chain = psi1_chain(cx, a)?;
    if chain.is_empty() {
        return Ok(vec![Int::from(0); rp.num_orbits()]);
    }
    rp.class_of_cycle(&chain)
}

/// `psi_1(a)` in canonical `RP` coordinates.
pub fn psi1_class(cx: &ConfigComplex, rp: &RpComplex, a: Elt) -> Result<Vec<Int>> {
    Ok(rp.canon.coords(&psi1_orbit_coords(cx, rp, a)?))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Psi1Suite {
    pub units_checked: usize,
    pub not_cycles: Vec<Elt>,
    pub lambda_mismatches: Vec<Elt>,
    pub square_mismatches: Vec<Elt>,
}

impl Psi1Suite {
    pub fn passed(&self) -> bool {
        self.units_checked > 0
            && self.not_cycles.is_empty()
            && self.lambda_mismatches.is_empty()
            && self.square_mismatches.is_empty()
    }

    /// For every unit `a`: `d_2 psi_1(a) = 0`, `lambda(psi_1(a)) =
    /// (<-1> + 1)(<a> - 1)` and `psi_1(a^2) = <<a>> psi_1(-1)`.
    pub fn run(cx: &ConfigComplex, rp: &RpComplex) -> Result<Self> {
        let ring = &cx.ring;
        let classes = ClassGroup::of(ring);
        let moduli = rp.canon.group.moduli();
        let psi_m1 = psi1_class(cx, rp, ring.neg(1))?;
        let p = p_minus1_plus(ring);
        let mut suite = Psi1Suite::default();
        for &a in ring.units() {
            suite.units_checked += 1;
            if !cx.levels.boundary_chain(2, &psi1_chain(cx, a)?).is_empty() {
                suite.not_cycles.push(a);
                continue;
            }
            let coords = psi1_orbit_coords(cx, rp, a)?;
            let expected = p.mul(&dbl(ring, a)?, &classes).to_ints();
            if rp.lambda_of(&coords) != expected {
                suite.lambda_mismatches.push(a);
            }
            let sq = psi1_class(cx, rp, ring.mul(a, a))?;
            let act = class_action(cx, rp, a)?;
            let moved = act.left_apply(&psi_m1);
            let rhs: Vec<Int> = moved.iter().zip(&psi_m1).map(|(x, y)| x - y).collect();
            if reduce_mod(&sq, &moduli) != reduce_mod(&rhs, &moduli) {
                suite.square_mismatches.push(a);
            }
        }
        Ok(suite)
    }
}

/// A quotient `big / Z[G_A] psi_1(-1)` with the submodule itself.
#[derive(Clone, Debug, Serialize)]
pub struct PsiQuotient {
    pub whole: FinAbGroup,
    pub submodule: FinAbGroup,
    pub quotient: FinAbGroup,
    /// `|submodule| * |quotient| = |whole|`, when all are finite.
    pub orders_multiply: Option<bool>,
}

impl PsiQuotient {
    fn new(g: &FinAbGroup, big: &[Vec<Int>], small: &[Vec<Int>]) -> Result<Self> {
        let whole = subquotient(g, big, &[])?.group;
        let submodule = subquotient(g, small, &[])?.group;
        let quotient = subquotient(g, big, small)?.group;
        let orders_multiply = match (whole.order(), submodule.order(), quotient.order()) {
            (Some(w), Some(s), Some(q)) => Some(s * q == w),
            _ => None,
        };
        Ok(PsiQuotient { whole, submodule, quotient, orders_multiply })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Psi1Quotients {
    pub psi_minus1_is_zero: bool,
    /// Every `psi_1(a^2)` lies in `Z[G_A] psi_1(-1)`.
    pub squares_contained: bool,
    pub rp1: PsiQuotient,
    /// `RB / Z[G_A] psi_1(-1)`, present when `RB` was transported and
    /// contains the submodule.
    pub rb: Option<PsiQuotient>,
    #[serde(skip)]
    pub submodule_gens: Vec<Vec<Int>>,
}

impl Psi1Quotients {
    /// `rb_gens` are generators of `RB` in canonical `RP` coordinates.
    pub fn compute(cx: &ConfigComplex, rp: &RpComplex, rb_gens: Option<&[Vec<Int>]>) -> Result<Self> {
        let ring = &cx.ring;
        let g = &rp.canon.group;
        let endos = class_actions(cx, rp)?;
        let psi = psi1_class(cx, rp, ring.neg(1))?;
        let sub = module_closure(g, std::slice::from_ref(&psi), &endos);
        let mut squares_contained = true;
        for &a in ring.units() {
            if !in_span(g, &sub, &psi1_class(cx, rp, ring.mul(a, a))?) {
                squares_contained = false;
            }
        }
        let rp1_gens = rp1_canonical_gens(rp);
        if !sub.iter().all(|s| in_span(g, &rp1_gens, s)) {
            return Err(Error::IllDefined("Z[G] psi_1(-1) is not inside RP_1".into()));
        }
        let rp1 = PsiQuotient::new(g, &rp1_gens, &sub)?;
        let rb = match rb_gens {
            Some(gens) if sub.iter().all(|s| in_span(g, gens, s)) => Some(PsiQuotient::new(g, gens, &sub)?),
            _ => None,
        };
        Ok(Psi1Quotients {
            psi_minus1_is_zero: reduce_mod(&psi, &g.moduli()).iter().all(|x| x == &Int::from(0)),
            squares_contained,
            rp1,
            rb,
            submodule_gens: sub,
        })
    }
}

/// Generators of `RP_1` in canonical `RP` coordinates.
pub fn rp1_canonical_gens(rp: &RpComplex) -> Vec<Vec<Int>> {
    if rp.rp1.lift.rows() == 0 {
        return vec![];
    }
    (&rp.rp1.lift * &rp.canon.to_canon).row_vecs()
}

/// `lambda` intertwines each class action with multiplication by the class.
pub fn lambda_equivariant(cx: &ConfigComplex, rp: &RpComplex) -> bool {
    let ring = &cx.ring;
    let classes = ClassGroup::of(ring);
    ring.class_reps().iter().all(|&u| {
        let cu = class_elt(ring, u).expect("class representatives are units");
        let lhs = &orbit_action(cx, rp, u) * &rp.lambda;
        (0..rp.num_orbits()).all(|o| {
            let row = GroupRingElt::from_ints(rp.lambda.row(o)).expect("lambda rows are small");
            lhs.row(o) == row.mul(&cu, &classes).to_ints().as_slice()
        })
    })
}

/// Every class action squares to the identity on `RP`.
pub fn actions_are_involutions(cx: &ConfigComplex, rp: &RpComplex) -> Result<bool> {
    let moduli = rp.canon.group.moduli();
    let k = moduli.len();
    for a in class_actions(cx, rp)? {
        let sq = &a * &a;
        for r in 0..k {
            let mut e = vec![Int::from(0); k];
            e[r] = Int::from(1);
            if reduce_mod(sq.row(r), &moduli) != reduce_mod(&e, &moduli) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
