//! Matching symbols `[a]` of the five-term presentation with classes of
//! 4-tuples in the coinvariant model.
//!
//! A candidate sends `<g>[a]` to `sign * <g> d_3(sigma(inf, 0, 1, a))`
//! for an ordering `sigma`, optionally comparing `lambda` after the twist
//! `<g> -> <-g>`. Candidates are tried in a fixed order: untwisted before
//! twisted, then orderings in lexicographic order, then sign `+1` before
//! `-1`. The first lambda-compatible isomorphism is kept, falling back to
//! the first lambda-compatible candidate.

use serde::Serialize;

use super::objects::RpComplex;
use super::psi::orbit_action;
use super::ConfigComplex;
use crate::error::Result;
use crate::exact_linalg::{canon_kernel, is_zero_in, CanonMap, Int, IntMatrix, Presentation};
use crate::group_ring::{lambda1_value, ClassGroup};
use crate::rp_presentation::RpPresentation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KappaCandidate {
    /// Positions in `(inf, 0, 1, a)` read in order.
    pub ordering: [usize; 4],
    pub sign: i64,
    pub twisted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaReport {
    pub candidates_tried: usize,
    pub lambda_matches: usize,
    /// Lambda-compatible candidates that are well defined and bijective.
    pub isomorphisms: usize,
    pub chosen: Option<KappaCandidate>,
    pub well_defined: bool,
    pub isomorphism: bool,
    pub note: Option<String>,
    /// Presentation generators to `X_3` orbit coordinates.
    #[serde(skip)]
    pub matrix: Option<IntMatrix>,
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|x| p.contains(&x)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

struct Verdict {
    well_defined: bool,
    isomorphism: bool,
}

/// Well-definedness and bijectivity of the induced map on canonical groups.
fn judge(pres: &RpPresentation, rp: &RpComplex, k: &IntMatrix) -> Result<Verdict> {
    let target = &rp.canon.group;
    for r in &pres.presentation.relations {
        let mut img = vec![Int::from(0); k.cols()];
        for (g, c) in r {
            for (j, slot) in img.iter_mut().enumerate() {
                *slot += c * k.get(*g, j);
            }
        }
        if !is_zero_in(target, &rp.canon.coords(&img)) {
            return Ok(Verdict { well_defined: false, isomorphism: false });
        }
    }
    let m = &(&pres.canon.lift * k) * &rp.canon.to_canon;
    let cm = CanonMap { source: pres.canon.group.clone(), target: target.clone(), matrix: m.clone() };
    if cm.check().is_err() {
        return Ok(Verdict { well_defined: false, isomorphism: false });
    }
    let injective = canon_kernel(&cm)?.group.is_trivial();
    let kt = target.num_gens();
    let mut rels: Vec<Vec<(usize, Int)>> =
        target.torsion.iter().enumerate().map(|(i, d)| vec![(i, d.clone())]).collect();
    for row in m.row_vecs() {
        rels.push(row.into_iter().enumerate().filter(|(_, v)| v != &Int::from(0)).collect());
    }
    let surjective = Presentation::new(kt, rels).canonicalize().group.is_trivial();
    Ok(Verdict { well_defined: true, isomorphism: injective && surjective })
}

pub fn kappa_calibrate(cx: &ConfigComplex, rp: &RpComplex, pres: &RpPresentation) -> Result<KappaReport> {
    let ring = &cx.ring;
    let classes = ClassGroup::of(ring);
    let nc = classes.order();
    let (nw, no) = (pres.w.len(), rp.num_orbits());
    let actions: Vec<Vec<usize>> = ring
        .class_reps()
        .iter()
        .map(|&u| {
            let m = orbit_action(cx, rp, u);
            (0..no).map(|o| (0..no).find(|&j| m.get(o, j) == &Int::from(1)).unwrap()).collect()
        })
        .collect();
    let lambda1: Vec<Vec<Int>> = pres.w.iter().map(|&a| lambda1_value(ring, a).map(|v| v.to_ints())).collect::<Result<_>>()?;
    let twisted1: Vec<Vec<Int>> = pres
        .w
        .iter()
        .map(|&a| lambda1_value(ring, a).map(|v| v.twist(&classes).to_ints()))
        .collect::<Result<_>>()?;

    let orderings = permutations4();
    let mut report = KappaReport {
        candidates_tried: 0,
        lambda_matches: 0,
        isomorphisms: 0,
        chosen: None,
        well_defined: false,
        isomorphism: false,
        note: None,
        matrix: None,
    };
    let mut first_match: Option<(KappaCandidate, IntMatrix, Verdict)> = None;
    // orbit of sigma(inf, 0, 1, a) for each ordering and each a in W
    let base_orbits: Vec<Vec<usize>> = orderings
        .iter()
        .map(|ordering| {
            pres.w
                .iter()
                .map(|&a| {
                    let base = [ring.infinity(), ring.origin(), ring.point_of(1), ring.point_of(a)];
                    let t: Vec<_> = ordering.iter().map(|&i| base[i]).collect();
                    cx.tuple_index(&t).map(|i| rp.orbit_of[i] as usize)
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    for twisted in [false, true] {
        let targets = if twisted { &twisted1 } else { &lambda1 };
        for (ordering, orbits) in orderings.iter().zip(&base_orbits) {
            for sign in [1i64, -1] {
                report.candidates_tried += 1;
                let matches = orbits.iter().zip(targets).all(|(&o, want)| {
                    rp.lambda.row(o).iter().map(|x| x * sign).collect::<Vec<Int>>() == *want
                });
                if !matches {
                    continue;
                }
                report.lambda_matches += 1;
                let mut k = IntMatrix::zeros(nc * nw, no);
                for (c, act) in actions.iter().enumerate() {
                    for (i, &o) in orbits.iter().enumerate() {
                        k.set(c * nw + i, act[o], Int::from(sign));
                    }
                }
                let verdict = judge(pres, rp, &k)?;
                if verdict.isomorphism {
                    report.isomorphisms += 1;
                }
                let better = match &first_match {
                    None => true,
                    Some((_, _, v)) => verdict.isomorphism && !v.isomorphism,
                };
                if better {
                    first_match = Some((KappaCandidate { ordering: *ordering, sign, twisted }, k, verdict));
                }
            }
        }
    }
    match first_match {
        Some((cand, k, v)) => {
            report.chosen = Some(cand);
            report.well_defined = v.well_defined;
            report.isomorphism = v.isomorphism;
            report.matrix = Some(k);
            if report.lambda_matches > 1 {
                report.note = Some(format!("{} candidates matched; first in search order kept", report.lambda_matches));
            }
        }
        None => report.note = Some("no candidate matched".into()),
    }
    Ok(report)
}

impl KappaReport {
    /// Images in canonical complex `RP` coordinates of rows given in
    /// presentation generator coordinates.
    pub fn transport(&self, rp: &RpComplex, rows: &IntMatrix) -> Option<Vec<Vec<Int>>> {
        let k = self.matrix.as_ref()?;
        if rows.rows() == 0 {
            return Some(vec![]);
        }
        Some((&(rows * k) * &rp.canon.to_canon).row_vecs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_four_orderings() {
        let p = permutations4();
        assert_eq!(p.len(), 24);
        assert_eq!(p[0], [0, 1, 2, 3]);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }
}
