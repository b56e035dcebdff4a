//! Finite local rings `F_{p^d}` and `Z/p^k`: arithmetic, units, square
//! classes, the projective line and the hypotheses used downstream.
//!
//! Elements are encoded as integers `0..size`. For `Z/p^k` the code is the
//! residue itself; for `F_{p^d}` it is `sum c_i p^i` for the coefficient
//! vector of a polynomial of degree `< d` in the generator `x`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngExt};
use serde::Serialize;

use crate::error::{Error, Result};

pub type Elt = u32;

/// Rings up to this size get precomputed addition and multiplication tables.
pub const DEFAULT_TABLE_CUTOFF: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RingSpec {
    Fq { p: u64, d: u32 },
    Zmod { p: u64, k: u32 },
}

impl RingSpec {
    pub fn fq(p: u64, d: u32) -> Self {
        RingSpec::Fq { p, d }
    }

    pub fn zmod(p: u64, k: u32) -> Self {
        RingSpec::Zmod { p, k }
    }

    pub fn build(&self) -> Result<LocalRing> {
        LocalRing::new(self, DEFAULT_TABLE_CUTOFF)
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Fq { p, d } => write!(f, "fq:{p}^{d}"),
            RingSpec::Zmod { p, k } => write!(f, "zmod:{p}^{k}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// Splits `n` as `p^e` with `p` prime, if possible.
fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|q| n.is_multiple_of(*q))?;
    let (mut m, mut e) = (n, 0);
    while m.is_multiple_of(p) {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

impl FromStr for RingSpec {
    type Err = Error;

    /// Accepts `fq:<p>^<d>`, `zmod:<p>^<k>`, and the bare forms `fq:<q>`,
    /// `zmod:<n>` with `q`, `n` prime powers.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidRing(format!("{s:?}: {why}"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(|| bad("expected fq:<p>^<d> or zmod:<p>^<k>"))?;
        let (p, e) = match rest.split_once('^') {
            Some((b, e)) => {
                let p: u64 = b.trim().parse().map_err(|_| bad("base is not an integer"))?;
                let e: i64 = e.trim().parse().map_err(|_| bad("exponent is not an integer"))?;
                if e < 1 {
                    return Err(bad("exponent must be at least 1"));
                }
                if !is_prime(p) {
                    return Err(bad("base is not prime"));
                }
                (p, u32::try_from(e).map_err(|_| bad("exponent too large"))?)
            }
            None => {
                let n: u64 = rest.trim().parse().map_err(|_| bad("size is not an integer"))?;
                prime_power(n).ok_or_else(|| bad("size is not a prime power"))?
            }
        };
        match kind.trim() {
            "fq" => Ok(RingSpec::Fq { p, d: e }),
            "zmod" => Ok(RingSpec::Zmod { p, k: e }),
            _ => Err(bad("unknown ring kind")),
        }
    }
}

#[derive(Clone, Debug)]
enum Arith {
    Zmod { n: u64 },
    // modulus polynomial: monic, coefficients low to high, length d + 1
    Field { poly: Vec<u64> },
}

/// A projective point, stored as its normalized unimodular representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint(pub Elt, pub Elt);

#[derive(Clone, Debug, Serialize)]
pub struct Hypotheses {
    pub residue_large: bool,
    pub minus1_square: bool,
    pub small_sqclass: bool,
    pub prediction_applicable: bool,
}

#[derive(Clone, Debug)]
pub struct Psl2Data {
    pub order: u64,
    /// `(E12(a), E21(a))` are indexed by `a`; only `a` is stored.
    pub elementary: Vec<Mat2>,
    /// A small generating set of elementary matrices.
    pub generators: Vec<Mat2>,
}

/// A 2x2 matrix over the ring, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mat2(pub [Elt; 4]);

#[derive(Clone, Debug)]
pub struct LocalRing {
    spec: RingSpec,
    p: u64,
    d: u32,
    size: usize,
    arith: Arith,
    add_t: Option<Vec<Elt>>,
    mul_t: Option<Vec<Elt>>,
    neg_t: Vec<Elt>,
    inv_t: Vec<Option<Elt>>,
    units: Vec<Elt>,
    nonunits: Vec<Elt>,
    nonunit_rank: Vec<usize>,
    class_of: Vec<Option<u8>>,
    class_reps: Vec<Elt>,
    unit_gen: Option<Elt>,
}

fn poly_is_irreducible(p: u64, poly: &[u64]) -> bool {
    // brute force: no monic factor of degree 1..=deg/2
    let deg = poly.len() - 1;
    for fd in 1..=deg / 2 {
        let count = p.pow(fd as u32);
        for code in 0..count {
            let mut f = digits(code, p, fd);
            f.push(1);
            if poly_rem(p, poly, &f).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn digits(mut code: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(code % p);
        code /= p;
    }
    out
}

fn poly_rem(p: u64, a: &[u64], m: &[u64]) -> Vec<u64> {
    // m monic
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - lead * c % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Least monic irreducible polynomial of degree `d` over `F_p`, ordering
/// candidates by the base-`p` code of their lower coefficients.
pub fn least_irreducible(p: u64, d: u32) -> Vec<u64> {
    if d == 1 {
        return vec![0, 1];
    }
    let count = p.pow(d);
    (0..count)
        .map(|code| {
            let mut f = digits(code, p, d as usize);
            f.push(1);
            f
        })
        .find(|f| poly_is_irreducible(p, f))
        .expect("an irreducible polynomial exists in every degree")
}

impl LocalRing {
    pub fn fq(p: u64, d: u32) -> Result<Self> {
        RingSpec::fq(p, d).build()
    }

    pub fn zmod(p: u64, k: u32) -> Result<Self> {
        RingSpec::zmod(p, k).build()
    }

    /// Field with an explicitly supplied monic modulus (low to high).
    pub fn fq_with_poly(p: u64, poly: &[u64], table_cutoff: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("{p} is not prime")));
        }
        if poly.len() < 2 || *poly.last().unwrap() != 1 || poly.iter().any(|&c| c >= p) {
            return Err(Error::InvalidRing(format!("{poly:?} is not a monic polynomial over F_{p}")));
        }
        if !poly_is_irreducible(p, poly) {
            return Err(Error::InvalidRing(format!("{poly:?} is reducible over F_{p}")));
        }
        let d = (poly.len() - 1) as u32;
        Self::assemble(RingSpec::fq(p, d), p, d, Arith::Field { poly: poly.to_vec() }, table_cutoff)
    }

    pub fn new(spec: &RingSpec, table_cutoff: usize) -> Result<Self> {
        match *spec {
            RingSpec::Fq { p, d } => {
                if !is_prime(p) {
                    return Err(Error::InvalidRing(format!("{p} is not prime")));
                }
                if d < 1 {
                    return Err(Error::InvalidRing("field degree must be at least 1".into()));
                }
                check_size(p, d)?;
                Self::fq_with_poly(p, &least_irreducible(p, d), table_cutoff)
            }
            RingSpec::Zmod { p, k } => {
                if !is_prime(p) {
                    return Err(Error::InvalidRing(format!("{p} is not prime")));
                }
                if k < 1 {
                    return Err(Error::InvalidRing("Z/p^k needs k >= 1".into()));
                }
                check_size(p, k)?;
                Self::assemble(spec.clone(), p, 1, Arith::Zmod { n: p.pow(k) }, table_cutoff)
            }
        }
    }

    fn assemble(spec: RingSpec, p: u64, d: u32, arith: Arith, table_cutoff: usize) -> Result<Self> {
        let size = match &arith {
            Arith::Zmod { n } => *n as usize,
            Arith::Field { poly } => p.pow((poly.len() - 1) as u32) as usize,
        };
        let mut r = LocalRing {
            spec,
            p,
            d,
            size,
            arith,
            add_t: None,
            mul_t: None,
            neg_t: vec![],
            inv_t: vec![],
            units: vec![],
            nonunits: vec![],
            nonunit_rank: vec![],
            class_of: vec![],
            class_reps: vec![],
            unit_gen: None,
        };
        if size <= table_cutoff {
            let n = size as Elt;
            let mut add = Vec::with_capacity(size * size);
            let mut mul = Vec::with_capacity(size * size);
            for a in 0..n {
                for b in 0..n {
                    add.push(r.add_raw(a, b));
                    mul.push(r.mul_raw(a, b));
                }
            }
            r.add_t = Some(add);
            r.mul_t = Some(mul);
        }
        r.neg_t = (0..size as Elt).map(|a| r.neg_raw(a)).collect();
        r.inv_t = vec![None; size];
        for a in 0..size as Elt {
            if r.inv_t[a as usize].is_some() {
                continue;
            }
            if let Some(b) = (1..size as Elt).find(|&b| r.mul(a, b) == 1) {
                r.inv_t[a as usize] = Some(b);
                r.inv_t[b as usize] = Some(a);
            }
        }
        r.units = (0..size as Elt).filter(|&a| r.inv_t[a as usize].is_some()).collect();
        r.nonunits = (0..size as Elt).filter(|&a| r.inv_t[a as usize].is_none()).collect();
        r.nonunit_rank = vec![usize::MAX; size];
        for (i, &s) in r.nonunits.iter().enumerate() {
            r.nonunit_rank[s as usize] = i;
        }
        r.compute_square_classes();
        r.unit_gen = r.units.iter().copied().find(|&g| r.mult_order(g) == r.units.len());
        Ok(r)
    }

    fn compute_square_classes(&mut self) {
        let mut squares = vec![false; self.size];
        for &u in &self.units {
            squares[self.mul(u, u) as usize] = true;
        }
        self.class_of = vec![None; self.size];
        self.class_reps.clear();
        for &u in &self.units {
            if self.class_of[u as usize].is_some() {
                continue;
            }
            let c = self.class_reps.len() as u8;
            self.class_reps.push(u);
            for &s in &self.units {
                if squares[s as usize] {
                    let us = self.mul(u, s) as usize;
                    self.class_of[us] = Some(c);
                }
            }
        }
    }

    fn add_raw(&self, a: Elt, b: Elt) -> Elt {
        match &self.arith {
            Arith::Zmod { n } => ((a as u64 + b as u64) % n) as Elt,
            Arith::Field { poly } => {
                let d = poly.len() - 1;
                let (x, y) = (digits(a as u64, self.p, d), digits(b as u64, self.p, d));
                encode(&x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect::<Vec<_>>(), self.p)
            }
        }
    }

    fn neg_raw(&self, a: Elt) -> Elt {
        match &self.arith {
            Arith::Zmod { n } => ((n - a as u64) % n) as Elt,
            Arith::Field { poly } => {
                let d = poly.len() - 1;
                encode(&digits(a as u64, self.p, d).iter().map(|u| (self.p - u) % self.p).collect::<Vec<_>>(), self.p)
            }
        }
    }

    fn mul_raw(&self, a: Elt, b: Elt) -> Elt {
        match &self.arith {
            Arith::Zmod { n } => ((a as u64 * b as u64) % n) as Elt,
            Arith::Field { poly } => {
                let d = poly.len() - 1;
                let (x, y) = (digits(a as u64, self.p, d), digits(b as u64, self.p, d));
                let mut prod = vec![0u64; 2 * d - 1];
                for (i, u) in x.iter().enumerate() {
                    for (j, v) in y.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + u * v) % self.p;
                    }
                }
                let r = poly_rem(self.p, &prod, poly);
                let mut r = r;
                r.resize(d, 0);
                encode(&r, self.p)
            }
        }
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Residue field is `F_{p^d}`.
    pub fn residue_degree(&self) -> u32 {
        self.d
    }

    pub fn residue_size(&self) -> u64 {
        self.p.pow(self.d)
    }

    pub fn is_field(&self) -> bool {
        matches!(self.spec, RingSpec::Fq { .. }) || matches!(self.spec, RingSpec::Zmod { k: 1, .. })
    }

    pub fn modulus_poly(&self) -> Option<&[u64]> {
        match &self.arith {
            Arith::Field { poly } => Some(poly),
            Arith::Zmod { .. } => None,
        }
    }

    pub fn has_tables(&self) -> bool {
        self.mul_t.is_some()
    }

    pub fn zero(&self) -> Elt {
        0
    }

    pub fn one(&self) -> Elt {
        1
    }

    #[inline]
    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        match &self.add_t {
            Some(t) => t[a as usize * self.size + b as usize],
            None => self.add_raw(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elt) -> Elt {
        self.neg_t[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elt, b: Elt) -> Elt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        match &self.mul_t {
            Some(t) => t[a as usize * self.size + b as usize],
            None => self.mul_raw(a, b),
        }
    }

    #[inline]
    pub fn inv(&self, a: Elt) -> Option<Elt> {
        self.inv_t[a as usize]
    }

    pub fn inv_unit(&self, a: Elt) -> Result<Elt> {
        self.inv(a).ok_or_else(|| Error::NotAUnit(self.show(a)))
    }

    #[inline]
    pub fn is_unit(&self, a: Elt) -> bool {
        self.inv_t[a as usize].is_some()
    }

    pub fn div(&self, a: Elt, b: Elt) -> Result<Elt> {
        Ok(self.mul(a, self.inv_unit(b)?))
    }

    pub fn pow(&self, a: Elt, mut e: u64) -> Elt {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The integer `n` as a ring element.
    pub fn from_int(&self, n: i64) -> Elt {
        let p = self.p as i64;
        match &self.arith {
            Arith::Zmod { n: m } => n.rem_euclid(*m as i64) as Elt,
            Arith::Field { .. } => n.rem_euclid(p) as Elt,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elt> {
        0..self.size as Elt
    }

    pub fn units(&self) -> &[Elt] {
        &self.units
    }

    pub fn nonunits(&self) -> &[Elt] {
        &self.nonunits
    }

    pub fn mult_order(&self, a: Elt) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
            if k > self.size {
                return 0;
            }
        }
        k
    }

    pub fn unit_generator(&self) -> Option<Elt> {
        self.unit_gen
    }

    pub fn unit_cyclic(&self) -> bool {
        self.unit_gen.is_some()
    }

    /// Discrete logarithm with respect to the unit generator.
    pub fn unit_log(&self, a: Elt) -> Option<usize> {
        let g = self.unit_gen?;
        let mut x = 1;
        for k in 0..self.units.len() {
            if x == a {
                return Some(k);
            }
            x = self.mul(x, g);
        }
        None
    }

    /// `{ a in A^x : a - 1 in A^x }`, sorted by encoding.
    pub fn w_set(&self) -> Vec<Elt> {
        self.units.iter().copied().filter(|&a| self.is_unit(self.sub(a, 1))).collect()
    }

    pub fn in_w(&self, a: Elt) -> bool {
        self.is_unit(a) && self.is_unit(self.sub(a, 1))
    }

    pub fn num_classes(&self) -> usize {
        self.class_reps.len()
    }

    /// Representatives of the square classes; class 0 is the squares.
    pub fn class_reps(&self) -> &[Elt] {
        &self.class_reps
    }

    pub fn square_class(&self, a: Elt) -> Result<usize> {
        self.class_of[a as usize].map(|c| c as usize).ok_or_else(|| Error::NotAUnit(self.show(a)))
    }

    #[inline]
    pub fn class_unchecked(&self, a: Elt) -> usize {
        self.class_of[a as usize].expect("unit") as usize
    }

    /// Product in the square class group.
    pub fn class_mul(&self, c1: usize, c2: usize) -> usize {
        self.class_unchecked(self.mul(self.class_reps[c1], self.class_reps[c2]))
    }

    pub fn mu2_order(&self) -> usize {
        self.units.iter().filter(|&&a| self.mul(a, a) == 1).count()
    }

    pub fn minus_one_is_square(&self) -> bool {
        self.class_unchecked(self.neg(1)) == 0
    }

    /// `|P^1(A)|`.
    pub fn num_points(&self) -> usize {
        self.size + self.nonunits.len()
    }

    /// Points in index order: `(1, t)` for every `t`, then `(s, 1)` for
    /// non-units `s`. Index 0 is `inf = (1, 0)`; for a unit `a` the point
    /// `(1, a)` has index `a`; `0 = (0, 1)` has index `size`.
    pub fn proj_line(&self) -> Vec<ProjPoint> {
        let mut pts: Vec<ProjPoint> = (0..self.size as Elt).map(|t| ProjPoint(1, t)).collect();
        pts.extend(self.nonunits.iter().map(|&s| ProjPoint(s, 1)));
        pts
    }

    pub fn infinity(&self) -> ProjPoint {
        ProjPoint(1, 0)
    }

    pub fn origin(&self) -> ProjPoint {
        ProjPoint(0, 1)
    }

    /// `<e1 + a e2>`.
    pub fn point_of(&self, a: Elt) -> ProjPoint {
        ProjPoint(1, a)
    }

    /// Normalizes a unimodular vector: the first unit coordinate becomes 1.
    pub fn normalize(&self, u1: Elt, u2: Elt) -> Result<ProjPoint> {
        if let Some(i) = self.inv(u1) {
            Ok(ProjPoint(1, self.mul(u2, i)))
        } else if let Some(i) = self.inv(u2) {
            Ok(ProjPoint(self.mul(u1, i), 1))
        } else {
            Err(Error::Degenerate(format!("({}, {}) is not unimodular", self.show(u1), self.show(u2))))
        }
    }

    #[inline]
    pub fn point_index(&self, pt: ProjPoint) -> usize {
        if pt.0 == 1 {
            pt.1 as usize
        } else {
            self.size + self.nonunit_rank[pt.0 as usize]
        }
    }

    #[inline]
    pub fn det(&self, a: ProjPoint, b: ProjPoint) -> Elt {
        self.sub(self.mul(a.0, b.1), self.mul(a.1, b.0))
    }

    #[inline]
    pub fn general_position(&self, a: ProjPoint, b: ProjPoint) -> bool {
        self.is_unit(self.det(a, b))
    }

    #[inline]
    pub fn act(&self, g: &Mat2, pt: ProjPoint) -> ProjPoint {
        let [a, b, c, d] = g.0;
        let u1 = self.add(self.mul(a, pt.0), self.mul(b, pt.1));
        let u2 = self.add(self.mul(c, pt.0), self.mul(d, pt.1));
        self.normalize(u1, u2).expect("invertible matrices preserve unimodularity")
    }

    pub fn mat_mul(&self, x: &Mat2, y: &Mat2) -> Mat2 {
        let [a, b, c, d] = x.0;
        let [e, f, g, h] = y.0;
        Mat2([
            self.add(self.mul(a, e), self.mul(b, g)),
            self.add(self.mul(a, f), self.mul(b, h)),
            self.add(self.mul(c, e), self.mul(d, g)),
            self.add(self.mul(c, f), self.mul(d, h)),
        ])
    }

    pub fn mat_det(&self, m: &Mat2) -> Elt {
        let [a, b, c, d] = m.0;
        self.sub(self.mul(a, d), self.mul(b, c))
    }

    pub fn e12(&self, a: Elt) -> Mat2 {
        Mat2([1, a, 0, 1])
    }

    pub fn e21(&self, a: Elt) -> Mat2 {
        Mat2([1, 0, a, 1])
    }

    pub fn diag(&self, a: Elt, b: Elt) -> Mat2 {
        Mat2([a, 0, 0, b])
    }

    /// Additive generators of the ring: `1` for `Z/p^k`, the power basis
    /// `1, x, ..., x^{d-1}` for `F_{p^d}`.
    pub fn additive_basis(&self) -> Vec<Elt> {
        match &self.arith {
            Arith::Zmod { .. } => vec![1],
            Arith::Field { poly } => (0..poly.len() - 1).map(|i| self.p.pow(i as u32) as Elt).collect(),
        }
    }

    pub fn sl2_order(&self) -> u64 {
        match self.spec {
            RingSpec::Fq { .. } => {
                let q = self.size as u64;
                q * (q * q - 1)
            }
            RingSpec::Zmod { p, k } => p.pow(3 * k - 2) * (p * p - 1),
        }
    }

    pub fn psl2_data(&self) -> Psl2Data {
        let mut elementary = Vec::with_capacity(2 * self.size);
        for a in self.elements() {
            elementary.push(self.e12(a));
            elementary.push(self.e21(a));
        }
        let mut generators = Vec::new();
        for b in self.additive_basis() {
            generators.push(self.e12(b));
            generators.push(self.e21(b));
        }
        Psl2Data { order: self.sl2_order() / self.mu2_order() as u64, elementary, generators }
    }

    pub fn hypotheses(&self) -> Hypotheses {
        let residue_large = (self.p - 1) * self.d as u64 > 6;
        let minus1_square = self.minus_one_is_square();
        let small_sqclass = self.num_classes() <= 4;
        Hypotheses {
            residue_large,
            minus1_square,
            small_sqclass,
            prediction_applicable: residue_large && (minus1_square || small_sqclass),
        }
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Elt {
        self.units[rng.random_range(0..self.units.len())]
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Elt {
        rng.random_range(0..self.size as Elt)
    }

    /// Human-readable element: an integer for `Z/p^k` and prime fields,
    /// a polynomial in `x` otherwise.
    pub fn show(&self, a: Elt) -> String {
        match &self.arith {
            Arith::Zmod { .. } => a.to_string(),
            Arith::Field { poly } if poly.len() == 2 => a.to_string(),
            Arith::Field { poly } => {
                let c = digits(a as u64, self.p, poly.len() - 1);
                let terms: Vec<String> = c
                    .iter()
                    .enumerate()
                    .rev()
                    .filter(|(_, &v)| v != 0)
                    .map(|(i, &v)| match (i, v) {
                        (0, v) => v.to_string(),
                        (1, 1) => "x".into(),
                        (1, v) => format!("{v}x"),
                        (i, 1) => format!("x^{i}"),
                        (i, v) => format!("{v}x^{i}"),
                    })
                    .collect();
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join("+")
                }
            }
        }
    }
}

fn check_size(p: u64, e: u32) -> Result<()> {
    match p.checked_pow(e) {
        Some(n) if n <= 1 << 20 => Ok(()),
        _ => Err(Error::SizeCap { what: "ring size".into(), needed: usize::MAX, cap: 1 << 20 }),
    }
}

fn encode(c: &[u64], p: u64) -> Elt {
    c.iter().rev().fold(0u64, |acc, &x| acc * p + x) as Elt
}

impl fmt::Display for LocalRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.spec {
            RingSpec::Fq { p, d: 1 } => write!(f, "F_{p}"),
            RingSpec::Fq { p, d } => write!(f, "F_{}", p.pow(d)),
            RingSpec::Zmod { p, k } => write!(f, "Z/{}", p.pow(k)),
        }
    }
}
