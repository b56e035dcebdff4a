//! Dense Smith normal form with both transforms.
//!
//! `smith_normal_form(M)` returns unimodular `U`, `V` and diagonal `S` with
//! `U * M * V = S` and `d1 | d2 | ... ` on the diagonal, all nonnegative.
//! The inverse of `V` is tracked alongside so that callers can move between
//! the original generators of a presented group and the diagonal basis.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{Int, IntMatrix};

#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    // column op on (a, v): col dst += k col src; the inverse gets
    // row src -= k row dst.
    let col_add = |a: &mut IntMatrix, v: &mut IntMatrix, vi: &mut IntMatrix, dst: usize, src: usize, k: &Int| {
        a.add_col_multiple(dst, src, k);
        v.add_col_multiple(dst, src, k);
        vi.add_row_multiple(src, dst, &-k);
    };
    let col_swap = |a: &mut IntMatrix, v: &mut IntMatrix, vi: &mut IntMatrix, x: usize, y: usize| {
        a.swap_cols(x, y);
        v.swap_cols(x, y);
        vi.swap_rows(x, y);
    };

    for t in 0..rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the trailing block,
        // first in row-major order on ties.
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                let x = a.get(r, c);
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((br, bc)) if a.get(br, bc).abs() <= x.abs() => {}
                    _ => best = Some((r, c)),
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        a.swap_rows(t, pr);
        u.swap_rows(t, pr);
        col_swap(&mut a, &mut v, &mut v_inv, t, pc);

        loop {
            let mut dirty = false;
            // Clear column t below the pivot.
            for r in t + 1..rows {
                if a.get(r, t).is_zero() {
                    continue;
                }
                let q = a.get(r, t).div_floor(a.get(t, t));
                a.add_row_multiple(r, t, &-&q);
                u.add_row_multiple(r, t, &-&q);
                if !a.get(r, t).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let r = (t + 1..rows)
                    .filter(|&r| !a.get(r, t).is_zero())
                    .min_by(|&x, &y| a.get(x, t).abs().cmp(&a.get(y, t).abs()).then(x.cmp(&y)))
                    .unwrap();
                a.swap_rows(t, r);
                u.swap_rows(t, r);
                continue;
            }
            // Clear row t to the right of the pivot.
            for c in t + 1..cols {
                if a.get(t, c).is_zero() {
                    continue;
                }
                let q = a.get(t, c).div_floor(a.get(t, t));
                col_add(&mut a, &mut v, &mut v_inv, c, t, &-&q);
                if !a.get(t, c).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let c = (t + 1..cols)
                    .filter(|&c| !a.get(t, c).is_zero())
                    .min_by(|&x, &y| a.get(t, x).abs().cmp(&a.get(t, y).abs()).then(x.cmp(&y)))
                    .unwrap();
                col_swap(&mut a, &mut v, &mut v_inv, t, c);
                continue;
            }
            // Divisibility: the pivot must divide the whole trailing block.
            let p = a.get(t, t).clone();
            let bad = (t + 1..rows).find(|&r| (t + 1..cols).any(|c| !a.get(r, c).is_multiple_of(&p)));
            match bad {
                Some(r) => {
                    a.add_row_multiple(t, r, &Int::one());
                    u.add_row_multiple(t, r, &Int::one());
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }

    SmithForm { u, s: a, v, v_inv }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> SmithForm {
        let sf = smith_normal_form(m);
        assert_eq!(&(&sf.u * m) * &sf.v, sf.s);
        assert!(sf.u.is_unimodular());
        assert!(sf.v.is_unimodular());
        assert_eq!(&sf.v * &sf.v_inv, IntMatrix::identity(m.cols()));
        let d = sf.diagonal();
        for i in 0..sf.s.rows() {
            for j in 0..sf.s.cols() {
                if i != j {
                    assert!(sf.s.get(i, j).is_zero());
                }
            }
        }
        for w in d.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        sf
    }

    #[test]
    fn identity_is_fixed() {
        let sf = check(&IntMatrix::identity(3));
        assert_eq!(sf.s, IntMatrix::identity(3));
    }

    #[test]
    fn two_by_two_example() {
        let sf = check(&IntMatrix::from_i64(2, 2, &[2, 4, 6, 8]));
        assert_eq!(sf.diagonal(), vec![Int::from(2), Int::from(4)]);
    }

    #[test]
    fn zero_matrix() {
        let sf = check(&IntMatrix::zeros(2, 3));
        assert!(sf.s.is_zero());
    }

    #[test]
    fn divisibility_fixup() {
        // diag(2,3) must become diag(1,6)
        let sf = check(&IntMatrix::from_i64(2, 2, &[2, 0, 0, 3]));
        assert_eq!(sf.diagonal(), vec![Int::from(1), Int::from(6)]);
    }
}
