//! Sparse pre-reduction of abelian group presentations.
//!
//! Relations are rows over generator columns. Any relation with a `±1`
//! coefficient lets us eliminate that generator: substitute it away in the
//! other relations and drop both. What survives is a small residual block
//! handed to the dense Smith form.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Signed, Zero};

use super::matrix::Int;

pub type SparseRow = Vec<(usize, Int)>;

/// Result of eliminating unit pivots from a presentation.
#[derive(Clone, Debug)]
pub struct PreReduced {
    pub gens: usize,
    /// Generators that survive, in increasing order.
    pub kept: Vec<usize>,
    /// Each eliminated generator as a combination of kept generators.
    pub substitutions: BTreeMap<usize, SparseRow>,
    /// Residual relations over `kept` positions (indices into `kept`).
    pub residual: Vec<SparseRow>,
}

fn axpy(dst: &SparseRow, k: &Int, src: &SparseRow) -> SparseRow {
    // dst + k * src, both sorted by column
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        let take_dst = j == src.len() || (i < dst.len() && dst[i].0 < src[j].0);
        let take_src = i == dst.len() || (j < src.len() && src[j].0 < dst[i].0);
        if take_dst {
            out.push(dst[i].clone());
            i += 1;
        } else if take_src {
            out.push((src[j].0, k * &src[j].1));
            j += 1;
        } else {
            let v = &dst[i].1 + k * &src[j].1;
            if !v.is_zero() {
                out.push((dst[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn normalize(mut row: SparseRow) -> SparseRow {
    row.retain(|(_, v)| !v.is_zero());
    row.sort_by_key(|(c, _)| *c);
    // merge duplicates
    let mut out: SparseRow = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

pub fn pre_reduce(gens: usize, relations: &[SparseRow]) -> PreReduced {
    let mut rows: Vec<Option<SparseRow>> = relations.iter().cloned().map(normalize).map(Some).collect();
    let mut col_rows: Vec<HashSet<usize>> = vec![HashSet::new(); gens];
    for (i, r) in rows.iter().enumerate() {
        for (c, _) in r.as_ref().unwrap() {
            col_rows[*c].insert(i);
        }
    }
    let mut eliminated: Vec<(usize, SparseRow)> = Vec::new();
    let mut alive = vec![true; gens];

    loop {
        // Markowitz-style choice among unit entries; ties broken by
        // (row, col) so the result is deterministic.
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            let Some(r) = r else { continue };
            for (c, v) in r {
                if !v.abs().is_one() {
                    continue;
                }
                let cost = (r.len() - 1) * (col_rows[*c].len() - 1);
                if best.is_none_or(|(bc, _, _)| cost < bc) {
                    best = Some((cost, i, *c));
                }
            }
            if matches!(best, Some((0, _, _))) {
                break;
            }
        }
        let Some((_, pr, pc)) = best else { break };
        let prow = rows[pr].take().unwrap();
        for (c, _) in &prow {
            col_rows[*c].remove(&pr);
        }
        let pv = prow.iter().find(|(c, _)| *c == pc).unwrap().1.clone();
        let mut targets: Vec<usize> = col_rows[pc].iter().copied().collect();
        targets.sort_unstable();
        for i in targets {
            let r = rows[i].take().unwrap();
            let a = &r.iter().find(|(c, _)| *c == pc).unwrap().1;
            // r - (a / pv) * prow, pv = ±1
            let k = -(a * &pv);
            let nr = axpy(&r, &k, &prow);
            for (c, _) in &r {
                col_rows[*c].remove(&i);
            }
            if nr.is_empty() {
                continue;
            }
            for (c, _) in &nr {
                col_rows[*c].insert(i);
            }
            rows[i] = Some(nr);
        }
        // e_pc = -pv * sum_{c != pc} prow_c e_c
        let expr: SparseRow = prow.iter().filter(|(c, _)| *c != pc).map(|(c, v)| (*c, -(v * &pv))).collect();
        eliminated.push((pc, expr));
        alive[pc] = false;
    }

    let kept: Vec<usize> = (0..gens).filter(|&c| alive[c]).collect();
    let mut pos = vec![usize::MAX; gens];
    for (i, &c) in kept.iter().enumerate() {
        pos[c] = i;
    }

    // Resolve substitutions back to front so every expression only uses
    // kept generators.
    let mut substitutions: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for (g, expr) in eliminated.into_iter().rev() {
        let mut acc: SparseRow = Vec::new();
        for (c, v) in expr {
            if alive[c] {
                acc = axpy(&acc, &v, &vec![(pos[c], Int::one())]);
            } else {
                acc = axpy(&acc, &v, &substitutions[&c]);
            }
        }
        substitutions.insert(g, acc);
    }

    let mut seen = HashSet::new();
    let mut residual = Vec::new();
    for r in rows.into_iter().flatten() {
        let mut r: SparseRow = r.into_iter().map(|(c, v)| (pos[c], v)).collect();
        if r.is_empty() {
            continue;
        }
        if r[0].1.is_negative() {
            r.iter_mut().for_each(|(_, v)| *v = -std::mem::take(v));
        }
        if seen.insert(r.clone()) {
            residual.push(r);
        }
    }
    residual.sort();
    PreReduced { gens, kept, substitutions, residual }
}
