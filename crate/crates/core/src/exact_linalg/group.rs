//! Finitely presented abelian groups and homomorphisms between them.
//!
//! A `Presentation` is `Z^gens / rowspan(relations)`. Canonicalizing it
//! produces the invariant-factor decomposition together with explicit
//! coordinate maps, so elements and homomorphisms can be moved into the
//! canonical basis and kernels, submodules and quotients computed there.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::lattice::{left_kernel_rows, RowLattice};
use super::matrix::{Int, IntMatrix};
use super::smith::smith_normal_form;
use super::sparse::{pre_reduce, SparseRow};
use crate::error::{Error, Result};

/// Isomorphism type of a finitely generated abelian group:
/// `Z^free_rank ⊕ Z/d1 ⊕ ... ⊕ Z/dk` with `2 <= d1 | d2 | ... | dk`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FinAbGroup {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FinAbGroup { free_rank: rank, torsion: vec![] }
    }

    pub fn cyclic(n: u64) -> Self {
        if n == 0 {
            Self::free(1)
        } else {
            Self::from_diagonal(&[Int::from(n)], 1)
        }
    }

    /// From the diagonal of a Smith form of a relation matrix on `gens`
    /// generators. Missing diagonal entries count as zero.
    pub fn from_diagonal(diag: &[Int], gens: usize) -> Self {
        let nonzero: Vec<Int> = diag.iter().filter(|d| !d.is_zero()).map(|d| d.abs()).collect();
        let mut torsion: Vec<Int> = nonzero.iter().filter(|d| !d.is_one()).cloned().collect();
        torsion.sort();
        // An arbitrary diagonal need not form a divisibility chain.
        let torsion = normalize_invariants(&torsion);
        FinAbGroup { free_rank: gens - nonzero.len(), torsion }
    }

    /// Direct sum.
    pub fn sum(&self, other: &FinAbGroup) -> FinAbGroup {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        FinAbGroup { free_rank: self.free_rank + other.free_rank, torsion: normalize_invariants(&t) }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<Int> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    pub fn torsion_order(&self) -> Int {
        self.torsion.iter().product()
    }

    pub fn exponent(&self) -> Option<Int> {
        self.is_finite().then(|| self.torsion.last().cloned().unwrap_or_else(Int::one))
    }

    /// Number of generators of the canonical presentation.
    pub fn num_gens(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    /// Moduli of the canonical generators: torsion first, then 0 for free.
    pub fn moduli(&self) -> Vec<Int> {
        let mut m = self.torsion.clone();
        m.extend(std::iter::repeat_n(Int::zero(), self.free_rank));
        m
    }

    /// `G / mG` as a group.
    pub fn mod_m(&self, m: &Int) -> FinAbGroup {
        let mut t: Vec<Int> = self.torsion.iter().map(|d| d.gcd(m)).collect();
        t.extend(std::iter::repeat_n(m.clone(), self.free_rank));
        FinAbGroup::from_diagonal(&t, t.len())
    }
}

/// Brings a list of cyclic orders into invariant-factor form.
pub fn normalize_invariants(orders: &[Int]) -> Vec<Int> {
    let n = orders.len();
    if n == 0 {
        return vec![];
    }
    let m = IntMatrix::diagonal(n, n, orders);
    let d = smith_normal_form(&m).diagonal();
    let mut out: Vec<Int> = d.into_iter().filter(|x| !x.is_zero() && !x.is_one()).collect();
    out.sort();
    out
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

pub(crate) fn int_json(v: &Int) -> serde_json::Value {
    match v.to_u64() {
        Some(u) => serde_json::Value::from(u),
        None => serde_json::Value::from(v.to_string()),
    }
}

/// Serializes an integer as a JSON number when it fits, else as a string.
pub fn ser_int<S: Serializer>(v: &Int, s: S) -> std::result::Result<S::Ok, S::Error> {
    int_json(v).serialize(s)
}

pub fn ser_opt_int<S: Serializer>(v: &Option<Int>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(int_json).serialize(s)
}

impl Serialize for FinAbGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FinAbGroup", 3)?;
        st.serialize_field("free_rank", &self.free_rank)?;
        let t: Vec<serde_json::Value> = self.torsion.iter().map(int_json).collect();
        st.serialize_field("divisors", &t)?;
        st.serialize_field("order", &self.order().map(|o| int_json(&o)))?;
        st.end()
    }
}

/// `Z^gens / rowspan(relations)`, relations stored sparsely.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub gens: usize,
    pub relations: Vec<SparseRow>,
}

impl Presentation {
    /// Repeated generators within a relation are summed; zero relations dropped.
    pub fn new(gens: usize, relations: Vec<SparseRow>) -> Self {
        let relations = relations
            .into_iter()
            .map(|mut r| {
                assert!(r.iter().all(|(c, _)| *c < gens), "relation mentions a missing generator");
                r.sort_by_key(|(c, _)| *c);
                let mut out: SparseRow = Vec::with_capacity(r.len());
                for (c, v) in r {
                    match out.last_mut() {
                        Some((d, w)) if *d == c => *w += v,
                        _ => out.push((c, v)),
                    }
                }
                out.retain(|(_, v)| !v.is_zero());
                out
            })
            .filter(|r| !r.is_empty())
            .collect();
        Presentation { gens, relations }
    }

    pub fn free(gens: usize) -> Self {
        Presentation { gens, relations: vec![] }
    }

    pub fn from_matrix(m: &IntMatrix) -> Self {
        let relations = (0..m.rows())
            .map(|r| {
                m.row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone()))
                    .collect()
            })
            .collect();
        Presentation { gens: m.cols(), relations }
    }

    /// Canonical presentation of an already decomposed group.
    pub fn of_group(g: &FinAbGroup) -> Self {
        let relations = g
            .torsion
            .iter()
            .enumerate()
            .map(|(i, d)| vec![(i, d.clone())])
            .collect();
        Presentation { gens: g.num_gens(), relations }
    }

    pub fn canonicalize(&self) -> Canonical {
        canonicalize(self)
    }
}

/// A presented group together with coordinate maps into its canonical
/// basis. `to_canon` is `gens x k` (row vectors map by right
/// multiplication, then reduce by `group.moduli()`); `lift` is `k x gens`
/// and sends canonical generators back to original coordinates.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub group: FinAbGroup,
    pub to_canon: IntMatrix,
    pub lift: IntMatrix,
}

impl Canonical {
    pub fn coords(&self, x: &[Int]) -> Vec<Int> {
        reduce_mod(&self.to_canon.left_apply(x), &self.group.moduli())
    }

    pub fn gens(&self) -> usize {
        self.to_canon.rows()
    }
}

pub fn reduce_mod(x: &[Int], moduli: &[Int]) -> Vec<Int> {
    x.iter()
        .zip(moduli)
        .map(|(v, m)| if m.is_zero() { v.clone() } else { v.mod_floor(m) })
        .collect()
}

fn canonicalize(p: &Presentation) -> Canonical {
    let pr = pre_reduce(p.gens, &p.relations);
    let nk = pr.kept.len();

    // Residual rows shrink to a Hermite basis before the dense Smith form.
    let mut lat = RowLattice::new(nk);
    for r in &pr.residual {
        let mut dense = vec![Int::zero(); nk];
        for (c, v) in r {
            dense[*c] = v.clone();
        }
        lat.insert(dense);
    }
    let rel = lat.basis_matrix();
    let sf = smith_normal_form(&rel);
    let mut diag = sf.diagonal();
    diag.resize(nk, Int::zero());

    // Canonical generators: diagonal positions whose entry is not 1.
    let canon_idx: Vec<usize> = (0..nk).filter(|&i| !diag[i].is_one()).collect();
    let torsion_idx: Vec<usize> = canon_idx.iter().copied().filter(|&i| !diag[i].is_zero()).collect();
    let free_idx: Vec<usize> = canon_idx.iter().copied().filter(|&i| diag[i].is_zero()).collect();
    let order: Vec<usize> = torsion_idx.iter().chain(free_idx.iter()).copied().collect();
    let group = FinAbGroup {
        free_rank: free_idx.len(),
        torsion: torsion_idx.iter().map(|&i| diag[i].clone()).collect(),
    };
    let k = order.len();

    let kept_to_canon = sf.v.select_cols(&order);
    let mut to_canon = IntMatrix::zeros(p.gens, k);
    for (j, &g) in pr.kept.iter().enumerate() {
        for c in 0..k {
            to_canon.set(g, c, kept_to_canon.get(j, c).clone());
        }
    }
    for (&g, expr) in &pr.substitutions {
        let mut row = vec![Int::zero(); k];
        for (j, coef) in expr {
            for (c, slot) in row.iter_mut().enumerate() {
                let v = kept_to_canon.get(*j, c);
                if !v.is_zero() {
                    *slot += coef * v;
                }
            }
        }
        for (c, v) in row.into_iter().enumerate() {
            to_canon.set(g, c, v);
        }
    }
    let mut lift = IntMatrix::zeros(k, p.gens);
    for (c, &i) in order.iter().enumerate() {
        for (j, &g) in pr.kept.iter().enumerate() {
            lift.set(c, g, sf.v_inv.get(i, j).clone());
        }
    }
    Canonical { group, to_canon, lift }
}

/// Cokernel of a relation matrix: rows are relations on `cols` generators.
pub fn cokernel(m: &IntMatrix) -> FinAbGroup {
    Presentation::from_matrix(m).canonicalize().group
}

/// Cokernel computed straight from the Smith diagonal, without the sparse
/// pre-reduction. Kept as an independent path for cross-checks.
pub fn cokernel_dense(m: &IntMatrix) -> FinAbGroup {
    FinAbGroup::from_diagonal(&smith_normal_form(m).diagonal(), m.cols())
}

/// A homomorphism between presented groups, given on generators: row `i`
/// of `matrix` is the image of source generator `i`.
#[derive(Clone, Debug)]
pub struct AbMap {
    pub source: Presentation,
    pub target: Presentation,
    pub matrix: IntMatrix,
}

/// A subgroup presented in its own canonical basis, with `lift` sending
/// those generators into the ambient coordinates it was computed in.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: FinAbGroup,
    pub lift: IntMatrix,
}

/// Homomorphism between canonical groups, in canonical coordinates.
#[derive(Clone, Debug)]
pub struct CanonMap {
    pub source: FinAbGroup,
    pub target: FinAbGroup,
    pub matrix: IntMatrix,
}

impl CanonMap {
    pub fn check(&self) -> Result<()> {
        let tm = self.target.moduli();
        for (i, d) in self.source.moduli().iter().enumerate() {
            for (j, m) in tm.iter().enumerate() {
                let img = d * self.matrix.get(i, j);
                let ok = if m.is_zero() { img.is_zero() } else { img.is_multiple_of(m) };
                if !ok {
                    return Err(Error::IllDefined(format!(
                        "generator {i} of order {d} maps to {} in coordinate {j} of modulus {m}",
                        self.matrix.get(i, j)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: &[Int]) -> Vec<Int> {
        reduce_mod(&self.matrix.left_apply(x), &self.target.moduli())
    }
}

impl AbMap {
    pub fn new(source: Presentation, target: Presentation, matrix: IntMatrix) -> Self {
        assert_eq!(matrix.rows(), source.gens);
        assert_eq!(matrix.cols(), target.gens);
        AbMap { source, target, matrix }
    }

    /// Canonical forms of both ends and the map between them.
    pub fn canonical(&self) -> Result<(Canonical, Canonical, CanonMap)> {
        self.canonical_from(&self.source.canonicalize())
    }

    /// As `canonical`, reusing a canonical form of the source.
    pub fn canonical_from(&self, s: &Canonical) -> Result<(Canonical, Canonical, CanonMap)> {
        let t = self.target.canonicalize();
        let m = &(&s.lift * &self.matrix) * &t.to_canon;
        let cm = CanonMap { source: s.group.clone(), target: t.group.clone(), matrix: m };
        // every source relation must land in the target relation lattice
        let tl = relation_lattice(&self.target);
        for r in &self.source.relations {
            let mut img = vec![Int::zero(); self.target.gens];
            for (c, v) in r {
                for (j, slot) in img.iter_mut().enumerate() {
                    let x = self.matrix.get(*c, j);
                    if !x.is_zero() {
                        *slot += v * x;
                    }
                }
            }
            if !tl.contains(&img) {
                return Err(Error::IllDefined("a source relation does not map into the target relations".into()));
            }
        }
        cm.check()?;
        Ok((s.clone(), t, cm))
    }
}

fn relation_lattice(p: &Presentation) -> RowLattice {
    let mut l = RowLattice::new(p.gens);
    for r in &p.relations {
        let mut dense = vec![Int::zero(); p.gens];
        for (c, v) in r {
            dense[*c] = v.clone();
        }
        l.insert(dense);
    }
    l.hermite_reduce();
    l
}

/// Lattice in `Z^k` generated by `vectors` plus the relations of `g`.
fn span_with_relations(g: &FinAbGroup, vectors: &[Vec<Int>]) -> RowLattice {
    let k = g.num_gens();
    let mut l = RowLattice::new(k);
    for (i, d) in g.torsion.iter().enumerate() {
        let mut v = vec![Int::zero(); k];
        v[i] = d.clone();
        l.insert(v);
    }
    for v in vectors {
        l.insert(v.clone());
    }
    l.hermite_reduce();
    l
}

/// `big / small` for lattices `small ⊆ big` of equal dimension.
fn lattice_quotient(big: &RowLattice, small: &RowLattice) -> Result<Subgroup> {
    let basis = big.basis();
    let p = basis.len();
    let mut rels = Vec::new();
    for s in small.basis() {
        let c = big.coordinates(&s).map_err(|_| Error::IllDefined("sublattice is not contained".into()))?;
        rels.push(c.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect::<SparseRow>());
    }
    let canon = Presentation::new(p, rels).canonicalize();
    let bm = IntMatrix::from_rows(big.dim(), &basis);
    let lift = if p == 0 { IntMatrix::zeros(canon.gens(), big.dim()) } else { &canon.lift * &bm };
    Ok(Subgroup { group: canon.group, lift })
}

/// Kernel of a homomorphism of canonical groups, as the preimage of the
/// target relation lattice modulo the source relation lattice.
pub fn canon_kernel(f: &CanonMap) -> Result<Subgroup> {
    f.check()?;
    let ks = f.source.num_gens();
    let kt = f.target.num_gens();
    // x F ≡ 0 mod target: left kernel of [F ; diag(target torsion)]
    let mut stacked = f.matrix.clone();
    for (j, d) in f.target.torsion.iter().enumerate() {
        let mut r = vec![Int::zero(); kt];
        r[j] = d.clone();
        stacked.push_row(&r);
    }
    let pre: Vec<Vec<Int>> = if ks == 0 {
        vec![]
    } else {
        left_kernel_rows(&stacked).into_iter().map(|v| v[..ks].to_vec()).collect()
    };
    let big = span_with_relations(&f.source, &pre);
    let small = span_with_relations(&f.source, &[]);
    lattice_quotient(&big, &small)
}

/// Kernel of `f`, with generators lifted to source generator coordinates.
pub fn hom_kernel(f: &AbMap) -> Result<Subgroup> {
    hom_kernel_from(f, &f.source.canonicalize())
}

/// As `hom_kernel`, reusing a canonical form of the source.
pub fn hom_kernel_from(f: &AbMap, source: &Canonical) -> Result<Subgroup> {
    let (s, _t, cm) = f.canonical_from(source)?;
    let k = canon_kernel(&cm)?;
    let lift = if k.lift.rows() == 0 { IntMatrix::zeros(0, f.source.gens) } else { &k.lift * &s.lift };
    Ok(Subgroup { group: k.group, lift })
}

/// Image of a canonical homomorphism, as a group.
pub fn canon_image(f: &CanonMap) -> Result<FinAbGroup> {
    f.check()?;
    let rows = f.matrix.row_vecs();
    let big = span_with_relations(&f.target, &rows);
    let small = span_with_relations(&f.target, &[]);
    Ok(lattice_quotient(&big, &small)?.group)
}

/// Smallest subgroup of `g` containing `gens` and stable under every
/// endomorphism in `endos` (row-vector convention), and the quotient.
pub fn submodule_and_quotient(
    g: &FinAbGroup,
    gens: &[Vec<Int>],
    endos: &[IntMatrix],
) -> Result<(Subgroup, FinAbGroup)> {
    for e in endos {
        CanonMap { source: g.clone(), target: g.clone(), matrix: e.clone() }.check()?;
    }
    let closure = closure_lattice(g, gens, endos);
    let rel = span_with_relations(g, &[]);
    let sub = lattice_quotient(&closure, &rel)?;
    let k = g.num_gens();
    let quot = Presentation::new(
        k,
        closure
            .basis()
            .into_iter()
            .map(|v| v.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
            .collect(),
    )
    .canonicalize()
    .group;
    Ok((sub, quot))
}

fn closure_lattice(g: &FinAbGroup, gens: &[Vec<Int>], endos: &[IntMatrix]) -> RowLattice {
    let mut lat = span_with_relations(g, gens);
    loop {
        let mut next = lat.clone();
        for b in lat.basis() {
            for e in endos {
                next.insert(e.left_apply(&b));
            }
        }
        next.hermite_reduce();
        if next == lat {
            return lat;
        }
        lat = next;
    }
}

/// `big / small` where both are given by generators inside `g` (relations
/// of `g` are added to each). Fails if `small ⊄ big`.
pub fn subquotient(g: &FinAbGroup, big: &[Vec<Int>], small: &[Vec<Int>]) -> Result<Subgroup> {
    let b = span_with_relations(g, big);
    let s = span_with_relations(g, small);
    lattice_quotient(&b, &s)
}

/// Smallest endomorphism-stable subgroup generated by `gens`, as generators.
pub fn module_closure(g: &FinAbGroup, gens: &[Vec<Int>], endos: &[IntMatrix]) -> Vec<Vec<Int>> {
    closure_lattice(g, gens, endos).basis()
}

/// True when `x` is zero in `g` (canonical coordinates).
pub fn is_zero_in(g: &FinAbGroup, x: &[Int]) -> bool {
    reduce_mod(x, &g.moduli()).iter().all(Zero::is_zero)
}

/// True when `x` lies in the subgroup generated by `gens` (plus relations).
pub fn in_span(g: &FinAbGroup, gens: &[Vec<Int>], x: &[Int]) -> bool {
    span_with_relations(g, gens).contains(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i(v: i64) -> Int {
        Int::from(v)
    }

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    fn grp(free: usize, tors: &[i64]) -> FinAbGroup {
        FinAbGroup { free_rank: free, torsion: ints(tors) }
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel(&IntMatrix::from_i64(2, 2, &[2, 0, 0, 4])), grp(0, &[2, 4]));
        assert_eq!(cokernel(&IntMatrix::zeros(0, 2)), grp(2, &[]));
        assert_eq!(cokernel(&IntMatrix::from_i64(1, 1, &[3])), grp(0, &[3]));
        assert_eq!(cokernel(&IntMatrix::from_i64(2, 2, &[2, 0, 0, 3])), grp(0, &[6]));
    }

    #[test]
    fn canonical_coordinates_respect_relations() {
        // <a, b | 2a + 4b, 6a + 8b>  ≅ Z/2 ⊕ Z/4
        let p = Presentation::from_matrix(&IntMatrix::from_i64(2, 2, &[2, 4, 6, 8]));
        let c = p.canonicalize();
        assert_eq!(c.group, grp(0, &[2, 4]));
        assert!(c.coords(&ints(&[2, 4])).iter().all(Zero::is_zero));
        // lift then coords is the identity on canonical generators
        for g in 0..c.gens() {
            let mut e = vec![i(0); c.gens()];
            e[g] = i(1);
            let back = c.coords(c.lift.row(g));
            assert_eq!(back, reduce_mod(&e, &c.group.moduli()));
        }
    }

    #[test]
    fn kernel_of_doubling_on_z4() {
        let z4 = Presentation::of_group(&grp(0, &[4]));
        let f = AbMap::new(z4.clone(), z4, IntMatrix::from_i64(1, 1, &[2]));
        let k = hom_kernel(&f).unwrap();
        assert_eq!(k.group, grp(0, &[2]));
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        let g = Presentation::of_group(&grp(1, &[2, 6]));
        let f = AbMap::new(g.clone(), g, IntMatrix::identity(3));
        assert!(hom_kernel(&f).unwrap().group.is_trivial());
    }

    #[test]
    fn kernel_of_projection_z_to_z3() {
        let f = AbMap::new(
            Presentation::free(1),
            Presentation::of_group(&grp(0, &[3])),
            IntMatrix::from_i64(1, 1, &[1]),
        );
        let k = hom_kernel(&f).unwrap();
        assert_eq!(k.group, grp(1, &[]));
        assert_eq!(k.lift, IntMatrix::from_i64(1, 1, &[3]));
    }

    #[test]
    fn ill_defined_map_is_rejected() {
        // Z/2 -> Z, 1 -> 1 is not well defined
        let f = AbMap::new(Presentation::of_group(&grp(0, &[2])), Presentation::free(1), IntMatrix::from_i64(1, 1, &[1]));
        assert!(matches!(hom_kernel(&f), Err(Error::IllDefined(_))));
    }

    #[test]
    fn submodule_examples() {
        let z4 = grp(0, &[4]);
        let (s, q) = submodule_and_quotient(&z4, &[ints(&[2])], &[IntMatrix::identity(1)]).unwrap();
        assert_eq!((s.group, q), (grp(0, &[2]), grp(0, &[2])));

        let (s, q) = submodule_and_quotient(&z4, &[], &[]).unwrap();
        assert_eq!((s.group, q), (grp(0, &[]), z4.clone()));

        let v4 = grp(0, &[2, 2]);
        let swap = IntMatrix::from_i64(2, 2, &[0, 1, 1, 0]);
        let (s, q) = submodule_and_quotient(&v4, &[ints(&[1, 0])], &[swap]).unwrap();
        assert_eq!((s.group, q), (v4, grp(0, &[])));
    }

    #[test]
    fn mod_m_matches_definition() {
        assert_eq!(grp(1, &[4, 12]).mod_m(&i(6)), grp(0, &[2, 6, 6]));
    }
}
