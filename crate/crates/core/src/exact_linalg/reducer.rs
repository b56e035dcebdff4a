//! Sparse integer column reduction with tracked tags.
//!
//! Columns are reduced left to right against earlier columns by their
//! lowest (largest-index) nonzero row, using only unimodular column
//! operations: an exact quotient when the pivot divides, otherwise a 2x2
//! extended-gcd step. Afterwards the nonzero columns have distinct lows
//! and span the column lattice, and the zero columns form a basis of the
//! integer kernel.
//!
//! Each column carries a tag vector that undergoes the same operations. A
//! tag is the image of the column's basis vector under some fixed linear
//! map (typically an orbit projection), so the tags of the zero columns
//! span that map's image of the kernel.
//!
//! Arithmetic runs in checked `i64` and restarts in `BigInt` on overflow.

use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::group::Presentation;
use super::matrix::Int;
use crate::error::{Error, Result};

pub trait Coef: Clone + Eq + Hash + Debug + Send + Sync {
    fn from_i64(v: i64) -> Self;
    fn to_int(&self) -> Int;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn neg(&self) -> Option<Self>;
    /// `a + k * b`
    fn axpy(a: &Self, k: &Self, b: &Self) -> Option<Self>;
    /// `x * p + y * q`
    fn lin(x: &Self, p: &Self, y: &Self, q: &Self) -> Option<Self>;
    /// `Some(a / b)` when `b` divides `a`.
    fn exact_div(a: &Self, b: &Self) -> Option<Self>;
    /// `(g, x, y)` with `g = gcd(a, b) > 0` and `x a + y b = g`.
    fn ext_gcd(a: &Self, b: &Self) -> Option<(Self, Self, Self)>;
}

impl Coef for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn to_int(&self) -> Int {
        Int::from(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn axpy(a: &Self, k: &Self, b: &Self) -> Option<Self> {
        a.checked_add(k.checked_mul(*b)?)
    }
    fn lin(x: &Self, p: &Self, y: &Self, q: &Self) -> Option<Self> {
        x.checked_mul(*p)?.checked_add(y.checked_mul(*q)?)
    }
    fn exact_div(a: &Self, b: &Self) -> Option<Self> {
        (a.checked_rem(*b)? == 0).then(|| a / b)
    }
    fn ext_gcd(a: &Self, b: &Self) -> Option<(Self, Self, Self)> {
        if *a == i64::MIN || *b == i64::MIN {
            return None;
        }
        let e = a.extended_gcd(b);
        if e.gcd < 0 {
            Some((-e.gcd, -e.x, -e.y))
        } else {
            Some((e.gcd, e.x, e.y))
        }
    }
}

impl Coef for Int {
    fn from_i64(v: i64) -> Self {
        Int::from(v)
    }
    fn to_int(&self) -> Int {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn axpy(a: &Self, k: &Self, b: &Self) -> Option<Self> {
        Some(a + k * b)
    }
    fn lin(x: &Self, p: &Self, y: &Self, q: &Self) -> Option<Self> {
        Some(x * p + y * q)
    }
    fn exact_div(a: &Self, b: &Self) -> Option<Self> {
        a.is_multiple_of(b).then(|| a / b)
    }
    fn ext_gcd(a: &Self, b: &Self) -> Option<(Self, Self, Self)> {
        let e = a.extended_gcd(b);
        if e.gcd.is_negative() {
            Some((-e.gcd, -e.x, -e.y))
        } else {
            Some((e.gcd, e.x, e.y))
        }
    }
}

type Col<C> = Vec<(u32, C)>;

/// One input column: sparse entries (any order) and a sparse tag.
#[derive(Clone, Debug, Default)]
pub struct InputColumn {
    pub entries: Vec<(u32, i64)>,
    pub tag: Vec<(u32, i64)>,
}

// a + k * b on sorted sparse columns
fn col_axpy<C: Coef>(a: &Col<C>, k: &C, b: &Col<C>) -> Option<Col<C>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let zero = C::from_i64(0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, C::axpy(&zero, k, &b[j].1)?));
            j += 1;
        } else {
            let v = C::axpy(&a[i].1, k, &b[j].1)?;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

// x * a + y * b
fn col_lin<C: Coef>(x: &C, a: &Col<C>, y: &C, b: &Col<C>) -> Option<Col<C>> {
    let zero = C::from_i64(0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (row, va, vb) = if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            i += 1;
            (a[i - 1].0, &a[i - 1].1, &zero)
        } else if i == a.len() || b[j].0 < a[i].0 {
            j += 1;
            (b[j - 1].0, &zero, &b[j - 1].1)
        } else {
            i += 1;
            j += 1;
            (a[i - 1].0, &a[i - 1].1, &b[j - 1].1)
        };
        let v = C::lin(x, va, y, vb)?;
        if !v.is_zero() {
            out.push((row, v));
        }
    }
    Some(out)
}

fn tag_axpy<C: Coef>(a: &mut [C], k: &C, b: &[C]) -> Option<()> {
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x = C::axpy(x, k, y)?;
        }
    }
    Some(())
}

fn tag_lin<C: Coef>(x: &C, a: &[C], y: &C, b: &[C]) -> Option<Vec<C>> {
    a.iter().zip(b).map(|(p, q)| C::lin(x, p, y, q)).collect()
}

#[derive(Clone, Debug)]
struct Reduced<C> {
    nrows: usize,
    tag_dim: usize,
    pivot_of_row: Vec<u32>,
    pivots: Vec<(Col<C>, Vec<C>)>,
    kernel_tags: Vec<Vec<C>>,
    kernel_dim: usize,
}

const NONE: u32 = u32::MAX;

fn reduce_generic<C: Coef>(nrows: usize, tag_dim: usize, cols: &[InputColumn]) -> Option<Reduced<C>> {
    let mut pivot_of_row = vec![NONE; nrows];
    let mut pivots: Vec<(Col<C>, Vec<C>)> = Vec::new();
    let mut seen: HashSet<Vec<C>> = HashSet::new();
    let mut kernel_tags = Vec::new();
    let mut kernel_dim = 0;
    for input in cols {
        let mut col: Col<C> = {
            let mut e = input.entries.clone();
            e.sort_unstable_by_key(|(r, _)| *r);
            let mut out: Col<C> = Vec::with_capacity(e.len());
            for (r, v) in e {
                assert!((r as usize) < nrows, "row index out of range");
                match out.last_mut() {
                    Some((lr, lv)) if *lr == r => *lv = C::axpy(lv, &C::from_i64(1), &C::from_i64(v))?,
                    _ => out.push((r, C::from_i64(v))),
                }
            }
            out.retain(|(_, v)| !v.is_zero());
            out
        };
        let mut tag = vec![C::from_i64(0); tag_dim];
        for &(t, v) in &input.tag {
            tag[t as usize] = C::axpy(&tag[t as usize], &C::from_i64(1), &C::from_i64(v))?;
        }
        loop {
            let Some((low, a)) = col.last().cloned() else {
                kernel_dim += 1;
                if tag.iter().any(|x| !x.is_zero()) && seen.insert(tag.clone()) {
                    kernel_tags.push(tag);
                }
                break;
            };
            let k = pivot_of_row[low as usize];
            if k == NONE {
                pivot_of_row[low as usize] = pivots.len() as u32;
                pivots.push((col, tag));
                break;
            }
            let (pc, pt) = &mut pivots[k as usize];
            let b = pc.last().unwrap().1.clone();
            if let Some(q) = C::exact_div(&a, &b) {
                let nq = q.neg()?;
                col = col_axpy(&col, &nq, pc)?;
                tag_axpy(&mut tag, &nq, pt)?;
            } else {
                let (g, x, y) = C::ext_gcd(&b, &a)?;
                let bq = C::exact_div(&b, &g)?;
                let aq = C::exact_div(&a, &g)?;
                let nbq = bq.neg()?;
                let new_pivot = col_lin(&x, pc, &y, &col)?;
                let new_col = col_lin(&aq, pc, &nbq, &col)?;
                let new_ptag = tag_lin(&x, pt, &y, &tag)?;
                let new_tag = tag_lin(&aq, pt, &nbq, &tag)?;
                debug_assert!(new_col.last().is_none_or(|(r, _)| *r < low));
                *pc = new_pivot;
                *pt = new_ptag;
                col = new_col;
                tag = new_tag;
            }
        }
    }
    Some(Reduced { nrows, tag_dim, pivot_of_row, pivots, kernel_tags, kernel_dim })
}

fn to_big(r: Reduced<i64>) -> Reduced<Int> {
    let conv_col = |c: Col<i64>| c.into_iter().map(|(r, v)| (r, Int::from(v))).collect::<Col<Int>>();
    let conv_tag = |t: Vec<i64>| t.into_iter().map(Int::from).collect::<Vec<Int>>();
    Reduced {
        nrows: r.nrows,
        tag_dim: r.tag_dim,
        pivot_of_row: r.pivot_of_row,
        pivots: r.pivots.into_iter().map(|(c, t)| (conv_col(c), conv_tag(t))).collect(),
        kernel_tags: r.kernel_tags.into_iter().map(conv_tag).collect(),
        kernel_dim: r.kernel_dim,
    }
}

/// Result of reducing a sparse integer matrix given by columns.
#[derive(Clone, Debug)]
pub struct ColumnReduction {
    inner: Reduced<Int>,
    used_bigint: bool,
}

impl ColumnReduction {
    pub fn new(nrows: usize, tag_dim: usize, cols: &[InputColumn]) -> Self {
        match reduce_generic::<i64>(nrows, tag_dim, cols) {
            Some(r) => ColumnReduction { inner: to_big(r), used_bigint: false },
            None => ColumnReduction {
                inner: reduce_generic::<Int>(nrows, tag_dim, cols).expect("bigint arithmetic cannot overflow"),
                used_bigint: true,
            },
        }
    }

    /// Forces arbitrary-precision arithmetic from the start.
    pub fn new_bigint(nrows: usize, tag_dim: usize, cols: &[InputColumn]) -> Self {
        ColumnReduction {
            inner: reduce_generic::<Int>(nrows, tag_dim, cols).expect("bigint arithmetic cannot overflow"),
            used_bigint: true,
        }
    }

    pub fn used_bigint(&self) -> bool {
        self.used_bigint
    }

    pub fn nrows(&self) -> usize {
        self.inner.nrows
    }

    pub fn rank(&self) -> usize {
        self.inner.pivots.len()
    }

    pub fn kernel_rank(&self) -> usize {
        self.inner.kernel_dim
    }

    /// Distinct nonzero tags of a kernel basis.
    pub fn kernel_tags(&self) -> &[Vec<Int>] {
        &self.inner.kernel_tags
    }

    pub fn tag_dim(&self) -> usize {
        self.inner.tag_dim
    }

    pub fn all_pivots_unit(&self) -> bool {
        self.inner.pivots.iter().all(|(c, _)| c.last().unwrap().1.abs().is_one())
    }

    /// Torsion of the cokernel `Z^rows / column span`.
    pub fn cokernel_torsion(&self) -> Vec<Int> {
        if self.all_pivots_unit() {
            return vec![];
        }
        let rels = self.inner.pivots.iter().map(|(c, _)| c.iter().map(|(r, v)| (*r as usize, v.clone())).collect());
        Presentation::new(self.inner.nrows, rels.collect()).canonicalize().group.torsion
    }

    /// For `v` in the column span, the tag of some preimage. Since the
    /// reduced columns are independent the preimage is unique modulo the
    /// kernel, so the result is well defined modulo the kernel tags.
    pub fn solve_tag(&self, v: &[(usize, Int)]) -> Result<Vec<Int>> {
        let mut col: Col<Int> = {
            let mut e: Vec<(u32, Int)> = v.iter().map(|(r, x)| (*r as u32, x.clone())).collect();
            e.sort_by_key(|(r, _)| *r);
            let mut out: Col<Int> = Vec::new();
            for (r, x) in e {
                match out.last_mut() {
                    Some((lr, lv)) if *lr == r => *lv += x,
                    _ => out.push((r, x)),
                }
            }
            out.retain(|(_, x)| !Zero::is_zero(x));
            out
        };
        let mut acc = vec![Int::zero(); self.inner.tag_dim];
        while let Some((low, a)) = col.last().cloned() {
            let k = self.inner.pivot_of_row[low as usize];
            if k == NONE {
                return Err(Error::NotInImage);
            }
            let (pc, pt) = &self.inner.pivots[k as usize];
            let q = Int::exact_div(&a, &pc.last().unwrap().1).ok_or(Error::NotInImage)?;
            col = col_axpy(&col, &-&q, pc).unwrap();
            tag_axpy(&mut acc, &q, pt).unwrap();
        }
        Ok(acc)
    }

    pub fn pivot_values(&self) -> Vec<i64> {
        self.inner.pivots.iter().map(|(c, _)| c.last().unwrap().1.to_i64().unwrap_or(0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::{cokernel, kernel_lattice, IntMatrix};

    fn columns_of(m: &IntMatrix) -> Vec<InputColumn> {
        (0..m.cols())
            .map(|c| InputColumn {
                entries: (0..m.rows())
                    .filter(|&r| !Zero::is_zero(m.get(r, c)))
                    .map(|r| (r as u32, m.get(r, c).to_i64().unwrap()))
                    .collect(),
                tag: vec![(c as u32, 1)],
            })
            .collect()
    }

    #[test]
    fn rank_kernel_and_torsion_match_dense() {
        let m = IntMatrix::from_i64(3, 4, &[2, 4, 0, 6, 1, 3, 5, 0, 3, 7, 5, 6]);
        let red = ColumnReduction::new(3, 4, &columns_of(&m));
        let k = kernel_lattice(&m);
        assert_eq!(red.kernel_rank(), k.cols());
        assert_eq!(red.rank() + red.kernel_rank(), 4);
        // identity tags: kernel tags are kernel vectors spanning the kernel
        for t in red.kernel_tags() {
            assert!(m.apply(t).iter().all(Zero::is_zero));
        }
        assert_eq!(red.cokernel_torsion(), cokernel(&m.transpose()).torsion);
    }

    #[test]
    fn solve_tag_recovers_preimage() {
        let m = IntMatrix::from_i64(2, 3, &[1, 1, 0, 0, 2, 2]);
        let red = ColumnReduction::new(2, 3, &columns_of(&m));
        let x = red.solve_tag(&[(0, Int::from(1)), (1, Int::from(4))]).unwrap();
        assert_eq!(m.apply(&x), vec![Int::from(1), Int::from(4)]);
        assert!(red.solve_tag(&[(1, Int::from(1))]).is_err());
    }

    #[test]
    fn bigint_and_i64_paths_agree() {
        let m = IntMatrix::from_i64(3, 3, &[6, 10, 15, 4, 9, 25, 7, 11, 13]);
        let a = ColumnReduction::new(3, 3, &columns_of(&m));
        let b = ColumnReduction::new_bigint(3, 3, &columns_of(&m));
        assert_eq!(a.rank(), b.rank());
        assert_eq!(a.kernel_tags(), b.kernel_tags());
        assert_eq!(a.pivot_values(), b.pivot_values());
    }
}
