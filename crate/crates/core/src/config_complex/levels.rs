//! Bases of `X_n`: tuples of pairwise general-position points, their
//! boundaries, and the permutation action of matrices.

use rayon::prelude::*;

use crate::coeff_rings::{LocalRing, Mat2, ProjPoint};
use crate::error::{Error, Result};
use crate::exact_linalg::InputColumn;

/// Basis of `X_n`: `(n+1)`-tuples of point indices in lexicographic order.
#[derive(Clone, Debug)]
pub struct ConfigLevel {
    pub n: usize,
    width: usize,
    radix: u64,
    flat: Vec<u32>,
    codes: Vec<u64>,
}

impl ConfigLevel {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn tuple(&self, i: usize) -> &[u32] {
        &self.flat[i * self.width..(i + 1) * self.width]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.flat.chunks(self.width)
    }

    fn code(&self, t: &[u32]) -> u64 {
        t.iter().fold(0, |acc, &x| acc * self.radix + x as u64)
    }

    pub fn lookup(&self, t: &[u32]) -> Option<usize> {
        if t.len() != self.width {
            return None;
        }
        self.codes.binary_search(&self.code(t)).ok()
    }

    pub fn index(&self, t: &[u32]) -> usize {
        self.lookup(t).expect("tuple is in general position")
    }
}

/// Points of `P^1`, pairwise general position, and levels `X_0..X_nmax`.
#[derive(Clone, Debug)]
pub struct Levels {
    pub points: Vec<ProjPoint>,
    gp: Vec<bool>,
    pub levels: Vec<ConfigLevel>,
}

impl Levels {
    pub fn build(ring: &LocalRing, n_max: usize, point_cap: usize, tuple_cap: usize) -> Result<Self> {
        let points = ring.proj_line();
        let np = points.len();
        if np > point_cap {
            return Err(Error::SizeCap { what: "projective line".into(), needed: np, cap: point_cap });
        }
        let mut gp = vec![false; np * np];
        for i in 0..np {
            for j in 0..np {
                gp[i * np + j] = ring.general_position(points[i], points[j]);
            }
        }
        let radix = np as u64;
        let mut levels = vec![ConfigLevel {
            n: 0,
            width: 1,
            radix,
            flat: (0..np as u32).collect(),
            codes: (0..radix).collect(),
        }];
        for n in 1..=n_max {
            let prev = &levels[n - 1];
            // Count first so the cap fires before allocating.
            let count: usize = prev
                .iter()
                .collect::<Vec<_>>()
                .par_iter()
                .map(|t| (0..np).filter(|&q| t.iter().all(|&x| gp[x as usize * np + q])).count())
                .sum();
            if count > tuple_cap {
                return Err(Error::SizeCap { what: format!("X_{n} basis"), needed: count, cap: tuple_cap });
            }
            let chunks: Vec<Vec<u32>> = prev
                .iter()
                .collect::<Vec<_>>()
                .par_iter()
                .map(|t| {
                    let mut out = Vec::new();
                    for q in 0..np as u32 {
                        if t.iter().all(|&x| gp[x as usize * np + q as usize]) {
                            out.extend_from_slice(t);
                            out.push(q);
                        }
                    }
                    out
                })
                .collect();
            let flat: Vec<u32> = chunks.concat();
            let width = n + 1;
            let codes: Vec<u64> = flat.chunks(width).map(|t| t.iter().fold(0, |a, &x| a * radix + x as u64)).collect();
            debug_assert!(codes.windows(2).all(|w| w[0] < w[1]));
            levels.push(ConfigLevel { n, width, radix, flat, codes });
        }
        Ok(Levels { points, gp, levels })
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn general_position(&self, i: u32, j: u32) -> bool {
        self.gp[i as usize * self.points.len() + j as usize]
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }

    /// Columns of `d_n : X_n -> X_{n-1}`, one per tuple, with `tag(i)` as
    /// the tag of column `i`.
    pub fn boundary_columns<F>(&self, n: usize, tag: F) -> Vec<InputColumn>
    where
        F: Fn(usize) -> Vec<(u32, i64)> + Sync,
    {
        let (src, dst) = (&self.levels[n], &self.levels[n - 1]);
        (0..src.len())
            .into_par_iter()
            .map(|i| InputColumn { entries: self.boundary_of(n, src.tuple(i), dst), tag: tag(i) })
            .collect()
    }

    fn boundary_of(&self, n: usize, t: &[u32], dst: &ConfigLevel) -> Vec<(u32, i64)> {
        let mut face = Vec::with_capacity(n);
        (0..=n)
            .map(|i| {
                face.clear();
                face.extend(t.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &x)| x));
                (dst.index(&face) as u32, if i % 2 == 0 { 1 } else { -1 })
            })
            .collect()
    }

    /// `d_n` applied to a chain on `X_n`, as a sparse chain on `X_{n-1}`.
    pub fn boundary_chain(&self, n: usize, chain: &[(usize, i64)]) -> Vec<(usize, i64)> {
        let (src, dst) = (&self.levels[n], &self.levels[n - 1]);
        let mut out: Vec<(usize, i64)> = Vec::new();
        for &(i, c) in chain {
            for (r, s) in self.boundary_of(n, src.tuple(i), dst) {
                out.push((r as usize, s * c));
            }
        }
        combine(out)
    }

    /// Permutation of point indices induced by a matrix.
    pub fn point_permutation(&self, ring: &LocalRing, g: &Mat2) -> Vec<u32> {
        self.points.iter().map(|&p| ring.point_index(ring.act(g, p)) as u32).collect()
    }

    /// Permutation of the basis of `X_n` induced by a point permutation.
    pub fn level_permutation(&self, n: usize, perm: &[u32]) -> Vec<u32> {
        let lvl = &self.levels[n];
        (0..lvl.len())
            .into_par_iter()
            .map_init(Vec::new, |buf, i| {
                buf.clear();
                buf.extend(lvl.tuple(i).iter().map(|&x| perm[x as usize]));
                lvl.index(buf) as u32
            })
            .collect()
    }
}

/// Sums duplicate indices and drops zeros; output sorted by index.
pub fn combine(mut v: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    v.sort_unstable_by_key(|(i, _)| *i);
    let mut out: Vec<(usize, i64)> = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some((j, d)) if *j == i => *d += c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| *c != 0);
    out
}

/// Union-find orbits of a set of permutations of `0..n`. Orbits are
/// numbered by their smallest element, so the labelling is canonical.
pub fn orbits(n: usize, perms: &[Vec<u32>]) -> (Vec<u32>, Vec<usize>) {
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for p in perms {
        for (i, &j) in p.iter().enumerate() {
            let (a, b) = (find(&mut parent, i as u32), find(&mut parent, j));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    let mut label = vec![u32::MAX; n];
    let mut reps = Vec::new();
    let mut orbit_of = vec![0u32; n];
    for (i, slot) in orbit_of.iter_mut().enumerate() {
        let r = find(&mut parent, i as u32) as usize;
        if label[r] == u32::MAX {
            label[r] = reps.len() as u32;
            reps.push(i);
        }
        *slot = label[r];
    }
    (orbit_of, reps)
}
