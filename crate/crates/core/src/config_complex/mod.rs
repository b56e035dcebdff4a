//! The configuration complex `X_*(A^2)` of a finite local ring and the
//! coinvariant groups built from it.
//!
//! `PSL_2(A)` acts freely on `X_2` and `X_3`. Writing `pi_n` for the
//! projection of `X_n` onto its orbit module, right exactness of
//! coinvariants gives, whenever `H_2(X) = 0`,
//!
//! `H_0(PSL_2, Z_2) = Z[X_3 / PSL_2] / pi_3(ker d_3)`
//!
//! and likewise `H_0(PSL_2, Z_1) = Z[X_2 / PSL_2] / pi_2(ker d_2)` when
//! `H_1(X) = 0`. The projected kernels come out of a single sparse column
//! reduction of the boundary matrix with orbit tags attached.

mod kappa;
mod levels;
mod objects;
mod psi;

use rand::{Rng, RngExt};
use rayon::prelude::*;

pub use levels::{combine, orbits, ConfigLevel, Levels};
pub use kappa::{kappa_calibrate, KappaCandidate, KappaReport};
pub use objects::{ComplexGroups, Homology, RpComplex};
pub use psi::{
    actions_are_involutions, class_action, class_actions, lambda_equivariant, orbit_action, psi1_chain, psi1_class,
    psi1_orbit_coords, rp1_canonical_gens, Psi1Suite, PsiQuotient, Psi1Quotients,
};

use crate::coeff_rings::{LocalRing, Mat2, ProjPoint};
use crate::error::{Error, Result};
use crate::exact_linalg::FinAbGroup;

#[derive(Clone, Debug)]
pub struct ComplexOptions {
    pub max_level: usize,
    pub point_cap: usize,
    pub tuple_cap: usize,
}

impl Default for ComplexOptions {
    fn default() -> Self {
        ComplexOptions { max_level: 3, point_cap: 36, tuple_cap: 500_000 }
    }
}

/// Square class of the triple after moving its first two points to
/// `(inf, 0)` by the determinant-one matrix `diag(d, 1) (u|v)^{-1}`.
pub fn orbit_class(ring: &LocalRing, t: [ProjPoint; 3]) -> Result<usize> {
    let [u, v, w] = t;
    let delta = ring.det(u, v);
    let di = ring.inv(delta).ok_or_else(|| Error::Degenerate("first two points are not in general position".into()))?;
    // (u|v)^{-1} = delta^{-1} [[v2, -v1], [-u2, u1]]
    let inv = Mat2([
        ring.mul(di, v.1),
        ring.mul(di, ring.neg(v.0)),
        ring.mul(di, ring.neg(u.1)),
        ring.mul(di, u.0),
    ]);
    let g = ring.mat_mul(&ring.diag(delta, 1), &inv);
    let [a, b, c, d] = g.0;
    let w1 = ring.add(ring.mul(a, w.0), ring.mul(b, w.1));
    let w2 = ring.add(ring.mul(c, w.0), ring.mul(d, w.1));
    let x = match ring.inv(w1) {
        Some(i) if ring.is_unit(w2) => ring.mul(w2, i),
        _ => return Err(Error::Degenerate("third point is not in general position".into())),
    };
    ring.square_class(x)
}

/// `X_0..X_nmax` for one ring with the elementary generator actions.
pub struct ConfigComplex {
    pub ring: LocalRing,
    pub levels: Levels,
    pub generators: Vec<Mat2>,
    point_perms: Vec<Vec<u32>>,
    level_perms: Vec<Vec<Vec<u32>>>,
}

impl ConfigComplex {
    pub fn build(ring: &LocalRing, opts: &ComplexOptions) -> Result<Self> {
        let levels = Levels::build(ring, opts.max_level, opts.point_cap, opts.tuple_cap)?;
        let generators = ring.psl2_data().generators;
        let point_perms: Vec<Vec<u32>> = generators.iter().map(|g| levels.point_permutation(ring, g)).collect();
        let level_perms = (0..=levels.max_level())
            .map(|n| point_perms.iter().map(|p| levels.level_permutation(n, p)).collect())
            .collect();
        Ok(ConfigComplex { ring: ring.clone(), levels, generators, point_perms, level_perms })
    }

    pub fn max_level(&self) -> usize {
        self.levels.max_level()
    }

    pub fn level(&self, n: usize) -> &ConfigLevel {
        &self.levels.levels[n]
    }

    pub fn point(&self, i: u32) -> ProjPoint {
        self.levels.points[i as usize]
    }

    pub fn point_index(&self, p: ProjPoint) -> u32 {
        self.ring.point_index(p) as u32
    }

    /// Index in `X_n` of a tuple of points.
    pub fn tuple_index(&self, pts: &[ProjPoint]) -> Result<usize> {
        let idx: Vec<u32> = pts.iter().map(|&p| self.point_index(p)).collect();
        self.level(pts.len() - 1)
            .lookup(&idx)
            .ok_or_else(|| Error::Degenerate(format!("{pts:?} is not in general position")))
    }

    pub fn class_of_triple(&self, t: &[u32]) -> usize {
        orbit_class(&self.ring, [self.point(t[0]), self.point(t[1]), self.point(t[2])]).expect("basis triples are in general position")
    }

    /// `d_{n-1} d_n = 0` on every basis element of every built level.
    /// Returns the first offending `(n, index)`.
    pub fn check_boundaries(&self) -> std::result::Result<(), (usize, usize)> {
        for n in 2..=self.max_level() {
            let bad = (0..self.level(n).len()).into_par_iter().find_first(|&i| {
                let once = self.levels.boundary_chain(n, &[(i, 1)]);
                !self.levels.boundary_chain(n - 1, &once).is_empty()
            });
            if let Some(i) = bad {
                return Err((n, i));
            }
        }
        Ok(())
    }

    /// Each generator permutes every level and commutes with `d`.
    /// Returns the first offending `(generator, n, index)`.
    pub fn check_equivariance(&self) -> std::result::Result<(), (usize, usize, usize)> {
        for (gi, perms) in (0..self.generators.len()).map(|g| (g, self.level_perms.iter().map(move |l| &l[g]))) {
            let perms: Vec<&Vec<u32>> = perms.collect();
            for n in 0..=self.max_level() {
                let mut seen = vec![false; perms[n].len()];
                for &j in perms[n] {
                    if std::mem::replace(&mut seen[j as usize], true) {
                        return Err((gi, n, j as usize));
                    }
                }
                if n == 0 {
                    continue;
                }
                let bad = (0..self.level(n).len()).into_par_iter().find_first(|&i| {
                    let lhs = self.levels.boundary_chain(n, &[(perms[n][i] as usize, 1)]);
                    let image: Vec<(usize, i64)> = self
                        .levels
                        .boundary_chain(n, &[(i, 1)])
                        .into_iter()
                        .map(|(r, c)| (perms[n - 1][r] as usize, c))
                        .collect();
                    lhs != combine(image)
                });
                if let Some(i) = bad {
                    return Err((gi, n, i));
                }
            }
        }
        Ok(())
    }

    pub fn point_permutations(&self) -> &[Vec<u32>] {
        &self.point_perms
    }

    pub fn level_permutations(&self, n: usize) -> &[Vec<u32>] {
        &self.level_perms[n]
    }

    /// Orbit labels on `X_n` and one representative index per orbit.
    pub fn level_orbits(&self, n: usize) -> (Vec<u32>, Vec<usize>) {
        orbits(self.level(n).len(), &self.level_perms[n])
    }

    /// Coinvariants of the whole permutation module `X_n`: free on orbits.
    pub fn coinvariants_full(&self, n: usize) -> FinAbGroup {
        FinAbGroup::free(self.level_orbits(n).1.len())
    }

    /// Applies a random word in the elementary matrices to a random triple
    /// and compares orbit classes; returns the number of disagreements.
    pub fn orbit_class_trials<R: Rng>(&self, rng: &mut R, trials: usize, max_word: usize) -> usize {
        let ring = &self.ring;
        let x2 = self.level(2);
        let mut failures = 0;
        for _ in 0..trials {
            let t = x2.tuple(rng.random_range(0..x2.len()));
            let mut pts = [self.point(t[0]), self.point(t[1]), self.point(t[2])];
            let before = orbit_class(ring, pts).unwrap();
            let len = rng.random_range(1..=max_word);
            for _ in 0..len {
                let a = ring.random_element(rng);
                let g = if rng.random_bool(0.5) { ring.e12(a) } else { ring.e21(a) };
                pts = pts.map(|p| ring.act(&g, p));
            }
            if orbit_class(ring, pts).ok() != Some(before) {
                failures += 1;
            }
        }
        failures
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_sizes_f5() {
        let ring = LocalRing::fq(5, 1).unwrap();
        let cx = ConfigComplex::build(&ring, &ComplexOptions::default()).unwrap();
        assert_eq!(cx.levels.sizes(), vec![6, 30, 120, 360]);
    }

    #[test]
    fn level_sizes_z9() {
        let ring = LocalRing::zmod(3, 2).unwrap();
        let cx = ConfigComplex::build(&ring, &ComplexOptions { max_level: 1, ..Default::default() }).unwrap();
        assert_eq!(cx.levels.sizes(), vec![12, 108]);
    }

    #[test]
    fn representative_classes() {
        let ring = LocalRing::fq(7, 1).unwrap();
        let (inf, zero) = (ring.infinity(), ring.origin());
        for &a in ring.units() {
            let c = ring.square_class(a).unwrap();
            assert_eq!(orbit_class(&ring, [inf, zero, ring.point_of(a)]).unwrap(), c);
            let minus = ring.square_class(ring.neg(a)).unwrap();
            assert_eq!(orbit_class(&ring, [zero, inf, ring.point_of(a)]).unwrap(), minus);
        }
        assert!(orbit_class(&ring, [inf, inf, zero]).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let ring = LocalRing::fq(13, 1).unwrap();
        let opts = ComplexOptions { tuple_cap: 1000, ..Default::default() };
        assert!(matches!(ConfigComplex::build(&ring, &opts), Err(Error::SizeCap { .. })));
    }
}
