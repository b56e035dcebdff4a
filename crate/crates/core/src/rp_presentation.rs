//! `RP(A)` from symbols `[a]`, `a in W_A`, over `Z[G_A]` modulo the
//! five-term relations, with the maps `lambda_1`, `lambda_2` and the
//! kernels `RP_1` and `RB`.

use serde::Serialize;

use crate::cache::{canonicalize, SnfCache};
use crate::coeff_rings::{Elt, LocalRing};
use crate::error::{Error, Result};
use crate::exact_linalg::{
    canon_kernel, hom_kernel_from, is_zero_in, AbMap, CanonMap, Canonical, Int, IntMatrix, Presentation, SparseRow,
    Subgroup,
};
use crate::group_ring::{lambda1_value, lambda2_value, ClassGroup, SymSquare};

/// One signed, class-weighted term `sign * <class> [symbol]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub sign: i64,
    pub class: usize,
    pub symbol: Elt,
}

/// `[a] - [b] + <a>[b/a] - <a^-1 - 1>[(1-a^-1)/(1-b^-1)] + <1-a>[(1-a)/(1-b)]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiveTermRelation {
    pub a: Elt,
    pub b: Elt,
    pub terms: [Term; 5],
}

impl FiveTermRelation {
    pub fn new(ring: &LocalRing, a: Elt, b: Elt) -> Result<Self> {
        for x in [a, b] {
            if !ring.in_w(x) {
                return Err(Error::NotInW(ring.show(x)));
            }
        }
        let b_over_a = ring.div(b, a)?;
        if !ring.in_w(b_over_a) {
            return Err(Error::NotInW(ring.show(b_over_a)));
        }
        let ai = ring.inv_unit(a)?;
        let bi = ring.inv_unit(b)?;
        let one_minus_a = ring.sub(1, a);
        let terms = [
            (1, 1, a),
            (-1, 1, b),
            (1, a, b_over_a),
            (-1, ring.sub(ai, 1), ring.div(ring.sub(1, ai), ring.sub(1, bi))?),
            (1, one_minus_a, ring.div(one_minus_a, ring.sub(1, b))?),
        ];
        let mut out = [Term { sign: 0, class: 0, symbol: 0 }; 5];
        for (slot, (sign, weight, symbol)) in out.iter_mut().zip(terms) {
            // every bracket argument lands in W_A
            assert!(ring.in_w(symbol), "five-term symbol {} left W_A", ring.show(symbol));
            *slot = Term { sign, class: ring.square_class(weight)?, symbol };
        }
        Ok(FiveTermRelation { a, b, terms: out })
    }
}

/// All ordered pairs `a != b` with `a, b, a/b in W_A`.
pub fn enumerate_relations(ring: &LocalRing) -> Vec<FiveTermRelation> {
    let w = ring.w_set();
    let mut out = Vec::new();
    for &a in &w {
        for &b in &w {
            if a != b && ring.in_w(ring.div(a, b).unwrap()) {
                out.push(FiveTermRelation::new(ring, a, b).expect("pair satisfies the membership conditions"));
            }
        }
    }
    out
}

pub struct RpPresentation {
    pub w: Vec<Elt>,
    w_pos: Vec<usize>,
    pub classes: ClassGroup,
    pub relations: Vec<FiveTermRelation>,
    /// Generators `(class, symbol)` at index `class * |W| + position`.
    pub presentation: Presentation,
    pub canon: Canonical,
    /// Row per generator: its `lambda_1` image in `Z[G_A]`.
    pub lambda1: IntMatrix,
    pub rp1: Subgroup,
    pub s2: SymSquare,
    /// Row per generator: its `lambda_2` image in canonical `S^2` coordinates.
    pub lambda2: IntMatrix,
    /// Generators lifted to `RP` generator coordinates.
    pub rb: Subgroup,
    /// `W_A` is empty and the presentation says nothing.
    pub vacuous: bool,
}

impl RpPresentation {
    pub fn build(ring: &LocalRing) -> Result<Self> {
        Self::build_with(ring, None)
    }

    pub fn build_with(ring: &LocalRing, cache: Option<&SnfCache>) -> Result<Self> {
        let w = ring.w_set();
        let mut w_pos = vec![usize::MAX; ring.size()];
        for (i, &a) in w.iter().enumerate() {
            w_pos[a as usize] = i;
        }
        let classes = ClassGroup::of(ring);
        let nc = classes.order();
        let nw = w.len();
        let relations = enumerate_relations(ring);
        let gen = |c: usize, s: Elt| c * nw + w_pos[s as usize];

        let mut rows: Vec<SparseRow> = Vec::with_capacity(nc * relations.len());
        for rel in &relations {
            for c in 0..nc {
                let row = rel.terms.iter().map(|t| (gen(classes.mul(c, t.class), t.symbol), Int::from(t.sign))).collect();
                rows.push(row);
            }
        }
        let presentation = Presentation::new(nc * nw, rows);
        let canon = canonicalize(&presentation, cache)?;

        let mut lambda1 = IntMatrix::zeros(nc * nw, nc);
        for (i, &a) in w.iter().enumerate() {
            let v = lambda1_value(ring, a)?;
            for c in 0..nc {
                for (k, x) in v.translate(c, &classes).to_ints().into_iter().enumerate() {
                    lambda1.set(c * nw + i, k, x);
                }
            }
        }
        let rp1 = hom_kernel_from(&AbMap::new(presentation.clone(), Presentation::free(nc), lambda1.clone()), &canon)?;

        let s2 = SymSquare::new(ring);
        let ks = s2.group().num_gens();
        let mut lambda2 = IntMatrix::zeros(nc * nw, ks);
        for (i, &a) in w.iter().enumerate() {
            let v = lambda2_value(ring, &s2, a)?;
            for c in 0..nc {
                for (k, x) in v.iter().enumerate() {
                    lambda2.set(c * nw + i, k, x.clone());
                }
            }
        }
        let restricted = CanonMap {
            source: rp1.group.clone(),
            target: s2.group().clone(),
            matrix: if rp1.lift.rows() == 0 { IntMatrix::zeros(0, ks) } else { &rp1.lift * &lambda2 },
        };
        let rb_in_rp1 = canon_kernel(&restricted)?;
        let rb_lift =
            if rb_in_rp1.lift.rows() == 0 { IntMatrix::zeros(0, nc * nw) } else { &rb_in_rp1.lift * &rp1.lift };
        let rb = Subgroup { group: rb_in_rp1.group, lift: rb_lift };

        Ok(RpPresentation {
            vacuous: w.is_empty(),
            w,
            w_pos,
            classes,
            relations,
            presentation,
            canon,
            lambda1,
            rp1,
            s2,
            lambda2,
            rb,
        })
    }

    pub fn num_gens(&self) -> usize {
        self.presentation.gens
    }

    pub fn gen_index(&self, class: usize, symbol: Elt) -> Option<usize> {
        let p = *self.w_pos.get(symbol as usize)?;
        (p != usize::MAX).then(|| class * self.w.len() + p)
    }

    /// Permutation matrix of `<c>` acting on generators.
    pub fn class_action(&self, c: usize) -> IntMatrix {
        let (nc, nw) = (self.classes.order(), self.w.len());
        let mut m = IntMatrix::zeros(nc * nw, nc * nw);
        for g in 0..nc {
            for i in 0..nw {
                m.set(g * nw + i, self.classes.mul(c, g) * nw + i, Int::from(1));
            }
        }
        m
    }

    /// First relation row (index) whose `lambda_1` image is nonzero.
    pub fn lambda1_failure(&self) -> Option<usize> {
        self.presentation.relations.iter().position(|r| {
            let img = self.row_image(r, &self.lambda1);
            img.iter().any(|x| x != &Int::from(0))
        })
    }

    /// First relation row whose `lambda_2` image is nonzero in `S^2`.
    pub fn lambda2_failure(&self) -> Option<usize> {
        self.presentation.relations.iter().position(|r| !is_zero_in(self.s2.group(), &self.row_image(r, &self.lambda2)))
    }

    fn row_image(&self, r: &SparseRow, m: &IntMatrix) -> Vec<Int> {
        let mut out = vec![Int::from(0); m.cols()];
        for (g, c) in r {
            for (k, slot) in out.iter_mut().enumerate() {
                *slot += c * m.get(*g, k);
            }
        }
        out
    }

    /// `lambda_1` intertwines the class action on generators with
    /// multiplication by the class on `Z[G_A]`.
    pub fn lambda1_equivariant(&self) -> bool {
        let nc = self.classes.order();
        (0..nc).all(|c| {
            let mut mult = IntMatrix::zeros(nc, nc);
            for g in 0..nc {
                mult.set(g, self.classes.mul(c, g), Int::from(1));
            }
            &self.class_action(c) * &self.lambda1 == &self.lambda1 * &mult
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_counts() {
        let f5 = LocalRing::fq(5, 1).unwrap();
        assert_eq!(enumerate_relations(&f5).len(), 6);
        let f4 = LocalRing::fq(2, 2).unwrap();
        assert_eq!(enumerate_relations(&f4).len(), 2);
    }

    #[test]
    fn presentation_shapes() {
        let f5 = RpPresentation::build(&LocalRing::fq(5, 1).unwrap()).unwrap();
        assert_eq!((f5.num_gens(), f5.presentation.relations.len()), (6, 12));
        let f4 = RpPresentation::build(&LocalRing::fq(2, 2).unwrap()).unwrap();
        assert_eq!((f4.num_gens(), f4.presentation.relations.len()), (2, 2));
    }

    #[test]
    fn empty_w_is_vacuous() {
        let z8 = RpPresentation::build(&LocalRing::zmod(2, 3).unwrap()).unwrap();
        assert!(z8.vacuous);
        assert!(z8.canon.group.is_trivial());
    }

    #[test]
    fn lambdas_are_well_defined() {
        for ring in [LocalRing::fq(7, 1).unwrap(), LocalRing::zmod(3, 2).unwrap()] {
            let rp = RpPresentation::build(&ring).unwrap();
            assert_eq!(rp.lambda1_failure(), None);
            assert_eq!(rp.lambda2_failure(), None);
            assert!(rp.lambda1_equivariant());
        }
    }
}
