//! Integer lattices: Hermite bases of row spans, integer kernels, and
//! coordinates of lattice vectors in an echelon basis.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{Int, IntMatrix};
use crate::error::{Error, Result};

/// Echelon basis of the row lattice spanned by a set of integer vectors.
///
/// Rows are kept sorted by pivot column; pivots are positive and, after
/// `hermite_reduce`, entries above each pivot lie in `[0, pivot)`, which
/// makes the basis canonical (row Hermite normal form).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowLattice {
    dim: usize,
    // indexed by pivot column
    rows: Vec<Option<Vec<Int>>>,
}

fn first_nonzero(v: &[Int]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

impl RowLattice {
    pub fn new(dim: usize) -> Self {
        RowLattice { dim, rows: vec![None; dim] }
    }

    pub fn from_rows<'a, I: IntoIterator<Item = &'a [Int]>>(dim: usize, rows: I) -> Self {
        let mut l = Self::new(dim);
        for r in rows {
            l.insert(r.to_vec());
        }
        l.hermite_reduce();
        l
    }

    pub fn from_matrix(m: &IntMatrix) -> Self {
        Self::from_rows(m.cols(), (0..m.rows()).map(|r| m.row(r)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }

    /// Adds a vector to the spanning set. Returns true if the lattice grew.
    pub fn insert(&mut self, mut v: Vec<Int>) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut grew = false;
        loop {
            let Some(c) = first_nonzero(&v) else { return grew };
            match &mut self.rows[c] {
                None => {
                    if v[c].is_negative() {
                        v.iter_mut().for_each(|x| *x = -std::mem::take(x));
                    }
                    self.rows[c] = Some(v);
                    return true;
                }
                Some(b) => {
                    let (bc, vc) = (b[c].clone(), v[c].clone());
                    if vc.is_multiple_of(&bc) {
                        let q = &vc / &bc;
                        for (x, y) in v.iter_mut().zip(b.iter()) {
                            if !y.is_zero() {
                                *x -= &q * y;
                            }
                        }
                    } else {
                        let eg = bc.extended_gcd(&vc);
                        let (g, x, y) = (eg.gcd, eg.x, eg.y);
                        let (bq, vq) = (&bc / &g, &vc / &g);
                        let nb: Vec<Int> = b.iter().zip(v.iter()).map(|(p, q)| &x * p + &y * q).collect();
                        let nv: Vec<Int> = b.iter().zip(v.iter()).map(|(p, q)| &vq * p - &bq * q).collect();
                        *b = nb;
                        if b[c].is_negative() {
                            b.iter_mut().for_each(|x| *x = -std::mem::take(x));
                        }
                        v = nv;
                        grew = true;
                    }
                }
            }
        }
    }

    /// Reduces entries above pivots into `[0, pivot)`.
    pub fn hermite_reduce(&mut self) {
        let pivots: Vec<usize> = (0..self.dim).filter(|&c| self.rows[c].is_some()).collect();
        for (i, &c) in pivots.iter().enumerate().rev() {
            let pivot_row = self.rows[c].clone().unwrap();
            let p = pivot_row[c].clone();
            for &c2 in &pivots[..i] {
                let r = self.rows[c2].as_mut().unwrap();
                let q = r[c].div_floor(&p);
                if !q.is_zero() {
                    for (x, y) in r.iter_mut().zip(pivot_row.iter()) {
                        if !y.is_zero() {
                            *x -= &q * y;
                        }
                    }
                }
            }
        }
    }

    pub fn basis(&self) -> Vec<Vec<Int>> {
        self.rows.iter().flatten().cloned().collect()
    }

    pub fn basis_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.dim, &self.basis())
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.coordinates(v).is_ok()
    }

    /// Coordinates of `v` with respect to `basis()`.
    pub fn coordinates(&self, v: &[Int]) -> Result<Vec<Int>> {
        assert_eq!(v.len(), self.dim);
        let mut v = v.to_vec();
        let pivots: Vec<usize> = (0..self.dim).filter(|&c| self.rows[c].is_some()).collect();
        let mut coords = vec![Int::zero(); pivots.len()];
        for (i, &c) in pivots.iter().enumerate() {
            if v[c].is_zero() {
                continue;
            }
            let b = self.rows[c].as_ref().unwrap();
            if !v[c].is_multiple_of(&b[c]) {
                return Err(Error::NotInImage);
            }
            let q = &v[c] / &b[c];
            for (x, y) in v.iter_mut().zip(b.iter()) {
                if !y.is_zero() {
                    *x -= &q * y;
                }
            }
            coords[i] = q;
        }
        if v.iter().any(|x| !x.is_zero()) {
            return Err(Error::NotInImage);
        }
        Ok(coords)
    }

    pub fn contains_lattice(&self, other: &RowLattice) -> bool {
        other.basis().iter().all(|b| self.contains(b))
    }
}

/// Column basis of the integer kernel `{x : M x = 0}`.
///
/// Computed by unimodular column reduction of `M`, so the basis is
/// saturated: it extends to a basis of `Z^cols`.
pub fn kernel_lattice(m: &IntMatrix) -> IntMatrix {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut v = IntMatrix::identity(cols);
    let mut t = 0;
    for r in 0..rows {
        if t == cols {
            break;
        }
        loop {
            // smallest nonzero |a[r][c]| among c >= t
            let best = (t..cols)
                .filter(|&c| !a.get(r, c).is_zero())
                .min_by(|&x, &y| a.get(r, x).abs().cmp(&a.get(r, y).abs()).then(x.cmp(&y)));
            let Some(c) = best else { break };
            a.swap_cols(t, c);
            v.swap_cols(t, c);
            let mut done = true;
            for c2 in t + 1..cols {
                if a.get(r, c2).is_zero() {
                    continue;
                }
                let q = a.get(r, c2).div_floor(a.get(r, t));
                a.add_col_multiple(c2, t, &-&q);
                v.add_col_multiple(c2, t, &-&q);
                if !a.get(r, c2).is_zero() {
                    done = false;
                }
            }
            if done {
                t += 1;
                break;
            }
        }
    }
    v.select_cols(&(t..cols).collect::<Vec<_>>())
}

/// Lattice of `x` (length `m.rows()`) with `x * M = 0`, as rows.
pub fn left_kernel_rows(m: &IntMatrix) -> Vec<Vec<Int>> {
    let k = kernel_lattice(&m.transpose());
    (0..k.cols()).map(|c| k.column(c)).collect()
}

pub fn gcd_all(values: &[Int]) -> Int {
    values.iter().fold(Int::zero(), |g, v| g.gcd(v))
}

pub fn is_primitive_basis(basis_cols: &IntMatrix) -> bool {
    if basis_cols.cols() == 0 {
        return true;
    }
    let sf = super::smith::smith_normal_form(basis_cols);
    sf.diagonal().iter().all(One::is_one)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn kernel_of_row_vector() {
        let k = kernel_lattice(&IntMatrix::from_i64(1, 2, &[1, 1]));
        assert_eq!(k.cols(), 1);
        let col = k.column(0);
        assert!(col == ints(&[1, -1]) || col == ints(&[-1, 1]));
    }

    #[test]
    fn kernel_of_unimodular_is_empty() {
        let k = kernel_lattice(&IntMatrix::from_i64(2, 2, &[2, 1, 1, 1]));
        assert_eq!(k.cols(), 0);
    }

    #[test]
    fn kernel_of_zero_is_everything() {
        let k = kernel_lattice(&IntMatrix::zeros(1, 2));
        assert_eq!(k.cols(), 2);
        assert!(is_primitive_basis(&k));
    }

    #[test]
    fn row_lattice_coordinates() {
        let l = RowLattice::from_rows(2, [ints(&[2, 4]).as_slice(), ints(&[6, 8]).as_slice()]);
        assert_eq!(l.rank(), 2);
        assert!(l.contains(&ints(&[2, 0])));
        assert!(!l.contains(&ints(&[1, 0])));
        let b = l.basis();
        let c = l.coordinates(&ints(&[8, 12])).unwrap();
        let recon: Vec<Int> = (0..2).map(|j| b.iter().zip(&c).map(|(r, x)| &r[j] * x).sum()).collect();
        assert_eq!(recon, ints(&[8, 12]));
    }

    #[test]
    fn hermite_form_is_canonical() {
        let a = RowLattice::from_rows(2, [ints(&[1, 3]).as_slice(), ints(&[0, 5]).as_slice()]);
        let b = RowLattice::from_rows(
            2,
            [ints(&[1, 8]).as_slice(), ints(&[0, -5]).as_slice(), ints(&[2, 11]).as_slice()],
        );
        assert_eq!(a, b);
    }
}
