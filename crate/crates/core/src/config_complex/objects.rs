//! Homology of `X_*` and the coinvariant groups `GW'`, `RP`, `RP_1`.

use num_traits::Zero;
use serde::Serialize;

use super::ConfigComplex;
use crate::cache::{canonicalize, SnfCache};
use crate::exact_linalg::{
    hom_kernel_from, AbMap, Canonical, ColumnReduction, FinAbGroup, Int, IntMatrix, Presentation, Subgroup,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Homology {
    /// `|X_n|` for the built levels.
    pub sizes: Vec<usize>,
    /// Rank of `d_n` for `n = 1..=max_level`.
    pub boundary_ranks: Vec<usize>,
    /// `H_0 .. H_{max_level - 1}`; the top level only bounds.
    pub groups: Vec<FinAbGroup>,
}

impl Homology {
    pub fn h(&self, n: usize) -> Option<&FinAbGroup> {
        self.groups.get(n)
    }
}

/// The coinvariant model of `RP(A)` on `X_3` orbits.
pub struct RpComplex {
    pub orbit_of: Vec<u32>,
    pub orbit_reps: Vec<usize>,
    pub presentation: Presentation,
    pub canon: Canonical,
    /// Row `o`: `lambda` of orbit `o` in `Z[G_A]`.
    pub lambda: IntMatrix,
    pub rp1: Subgroup,
    reduction: ColumnReduction,
}

pub struct ComplexGroups {
    pub num_classes: usize,
    pub homology: Homology,
    /// `Z[G_A] / pi_2(ker d_2)`, valid as `GW'` when `H_1 = 0`.
    pub gw_presentation: Presentation,
    pub gw_prime: Canonical,
    /// `ker(epsilon : GW' -> Z)`, with `epsilon` the augmentation.
    pub i_prime: Subgroup,
    pub rp: Option<RpComplex>,
    /// The `X_2` orbits match the square classes one to one.
    pub x2_orbits_match_classes: bool,
}

fn homology_from(sizes: &[usize], reductions: &[&ColumnReduction]) -> Homology {
    // reductions[k] reduces d_{k+1}
    let ranks: Vec<usize> = reductions.iter().map(|r| r.rank()).collect();
    let mut groups = Vec::new();
    for n in 0..reductions.len() {
        let rank_in = if n == 0 { 0 } else { ranks[n - 1] };
        let free = sizes[n] - rank_in - ranks[n];
        groups.push(FinAbGroup { free_rank: free, torsion: reductions[n].cokernel_torsion() });
    }
    Homology { sizes: sizes.to_vec(), boundary_ranks: ranks, groups }
}

impl ComplexGroups {
    pub fn compute(cx: &ConfigComplex) -> Result<Self> {
        Self::compute_with(cx, None)
    }

    pub fn compute_with(cx: &ConfigComplex, cache: Option<&SnfCache>) -> Result<Self> {
        let nc = cx.ring.num_classes();
        let sizes = cx.levels.sizes();
        let top = cx.max_level();
        if top < 2 {
            return Err(Error::Degenerate("levels up to X_2 are required".into()));
        }

        let d1 = ColumnReduction::new(sizes[0], 0, &cx.levels.boundary_columns(1, |_| vec![]));
        let x2 = cx.level(2);
        let d2 = ColumnReduction::new(
            sizes[1],
            nc,
            &cx.levels.boundary_columns(2, |i| vec![(cx.class_of_triple(x2.tuple(i)) as u32, 1)]),
        );

        let (orbit_of2, reps2) = cx.level_orbits(2);
        let x2_orbits_match_classes = reps2.len() == nc && {
            let class_of_orbit: Vec<usize> = reps2.iter().map(|&r| cx.class_of_triple(x2.tuple(r))).collect();
            let mut sorted = class_of_orbit.clone();
            sorted.sort_unstable();
            sorted.dedup();
            sorted.len() == nc
                && (0..x2.len()).all(|i| cx.class_of_triple(x2.tuple(i)) == class_of_orbit[orbit_of2[i] as usize])
        };

        let gw_presentation = Presentation::new(nc, tags_to_rows(d2.kernel_tags()));
        let gw_prime = canonicalize(&gw_presentation, cache)?;
        let ones = IntMatrix::from_rows(1, &vec![vec![1i64]; nc]);
        let i_prime = hom_kernel_from(&AbMap::new(gw_presentation.clone(), Presentation::free(1), ones), &gw_prime)?;

        let (homology, rp) = if top >= 3 {
            let (orbit_of, orbit_reps) = cx.level_orbits(3);
            let no = orbit_reps.len();
            let d3 = ColumnReduction::new(
                sizes[2],
                no,
                &cx.levels.boundary_columns(3, |i| vec![(orbit_of[i], 1)]),
            );
            let homology = homology_from(&sizes, &[&d1, &d2, &d3]);
            let presentation = Presentation::new(no, tags_to_rows(d3.kernel_tags()));
            let canon = canonicalize(&presentation, cache)?;
            let x3 = cx.level(3);
            let mut lambda = IntMatrix::zeros(no, nc);
            for (o, &r) in orbit_reps.iter().enumerate() {
                let t = x3.tuple(r);
                for skip in 0..4 {
                    let face: Vec<u32> = (0..4).filter(|&j| j != skip).map(|j| t[j]).collect();
                    let c = cx.class_of_triple(&face);
                    let sign = if skip % 2 == 0 { 1 } else { -1 };
                    let v = lambda.get(o, c) + Int::from(sign);
                    lambda.set(o, c, v);
                }
            }
            let lam_map = AbMap::new(presentation.clone(), Presentation::free(nc), lambda.clone());
            let rp1 = hom_kernel_from(&lam_map, &canon)?;
            (homology, Some(RpComplex { orbit_of, orbit_reps, presentation, canon, lambda, rp1, reduction: d3 }))
        } else {
            (homology_from(&sizes[..2], &[&d1, &d2]), None)
        };

        Ok(ComplexGroups {
            num_classes: nc,
            homology,
            gw_presentation,
            gw_prime,
            i_prime,
            rp,
            x2_orbits_match_classes,
        })
    }

    pub fn h2_vanishes(&self) -> Option<bool> {
        self.homology.h(2).map(FinAbGroup::is_trivial)
    }

    pub fn h1_vanishes(&self) -> Option<bool> {
        self.homology.h(1).map(FinAbGroup::is_trivial)
    }
}

fn tags_to_rows(tags: &[Vec<Int>]) -> Vec<Vec<(usize, Int)>> {
    tags.iter()
        .map(|t| t.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect())
        .collect()
}

impl RpComplex {
    pub fn num_orbits(&self) -> usize {
        self.orbit_reps.len()
    }

    /// Orbit-tag coordinates of a 2-cycle, if it bounds.
    pub fn class_of_cycle(&self, chain: &[(usize, i64)]) -> Result<Vec<Int>> {
        let v: Vec<(usize, Int)> = chain.iter().map(|&(i, c)| (i, Int::from(c))).collect();
        self.reduction.solve_tag(&v)
    }

    /// `lambda` of an element in orbit-tag coordinates.
    pub fn lambda_of(&self, x: &[Int]) -> Vec<Int> {
        self.lambda.left_apply(x)
    }
}

