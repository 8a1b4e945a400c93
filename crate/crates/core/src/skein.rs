//! Temperley-Lieb algebra, Jones-Wenzl projectors, Kauffman brackets and the
//! colored Jones polynomial.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::diagram::{build_diagram, parse_graph, Half, KnotDiagram, Smoothing};
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Laurent polynomials

/// Element of `Z[q, q^-1]`; zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c * q^e`.
    pub fn monomial(c: i64, e: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// `q + q^-1`, the value of a circle.
    pub fn circle() -> Self {
        Self::from_terms(&[(1, 1), (-1, 1)])
    }

    /// Build from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms(terms: &[(i64, i64)]) -> Self {
        let mut p = Self::zero();
        for &(e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: i64, c: i64) {
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(e).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: i64) -> i64 {
        self.terms.get(&e).copied().unwrap_or(0)
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Multiply by `q^s`.
    pub fn shift(&self, s: i64) -> Self {
        Self { terms: self.terms.iter().map(|(&e, &c)| (e + s, c)).collect() }
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut p = Self::zero();
        for (e, c) in self.terms() {
            p.add_term(e, c * k);
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Replace `q^e` by `f(e)` (a signed monomial) term by term.
    pub fn map_monomials(&self, f: impl Fn(i64) -> Option<(i64, i64)>) -> Option<Self> {
        let mut p = Self::zero();
        for (e, c) in self.terms() {
            let (sign, e2) = f(e)?;
            p.add_term(e2, sign * c);
        }
        Some(p)
    }

    /// Single term `c q^e`, if the polynomial is a monomial.
    pub fn as_monomial(&self) -> Option<(i64, i64)> {
        if self.terms.len() == 1 {
            self.terms().next().map(|(e, c)| (c, e))
        } else {
            None
        }
    }

    fn dense(&self) -> (i64, Vec<i128>) {
        let lo = self.min_degree().unwrap_or(0);
        let hi = self.max_degree().unwrap_or(0);
        let mut v = vec![0i128; (hi - lo + 1) as usize];
        for (e, c) in self.terms() {
            v[(e - lo) as usize] = c as i128;
        }
        (lo, v)
    }

    fn from_dense(lo: i64, v: &[i128]) -> Self {
        let mut p = Self::zero();
        for (i, &c) in v.iter().enumerate() {
            let c = i64::try_from(c).expect("coefficient overflow");
            p.add_term(lo + i as i64, c);
        }
        p
    }
}

impl fmt::Display for LaurentPoly {
    /// Terms by decreasing exponent, e.g. `q + q^-1` or `-2*q^3 + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms().rev().enumerate() {
            let mag = c.unsigned_abs();
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if c < 0 { " - " } else { " + " })?;
            }
            match (mag, e) {
                (m, 0) => write!(f, "{m}")?,
                (1, 1) => write!(f, "q")?,
                (1, e) => write!(f, "q^{e}")?,
                (m, 1) => write!(f, "{m}*q")?,
                (m, e) => write!(f, "{m}*q^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    /// JSON form: `[[exponent, coefficient], ...]` by increasing exponent.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(i64, i64)> = self.terms().collect();
        v.serialize(s)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (e, c) in o.terms() {
            p.add_term(e, c);
        }
        p
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (e, c) in o.terms() {
            p.add_term(e, -c);
        }
        p
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in o.terms() {
                p.add_term(e1 + e2, c1 * c2);
            }
        }
        p
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-1)
    }
}

// ---------------------------------------------------------------------------
// Dense integer polynomial helpers (ascending coefficients)

fn trim(v: &mut Vec<i128>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn content(v: &[i128]) -> i128 {
    v.iter().fold(0i128, |g, &x| g.gcd(&x))
}

fn primitive(mut v: Vec<i128>) -> Vec<i128> {
    trim(&mut v);
    let g = content(&v);
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
    if v.last().is_some_and(|&x| x < 0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

const GCD_PRIMES: [u64; 5] = [2_305_843_009_213_693_951, 1_000_000_007, 998_244_353, 1_000_000_009, 2_147_483_647];

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn reduce_mod(v: &[i128], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = v.iter().map(|&x| x.rem_euclid(p as i128) as u64).collect();
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Monic gcd over `F_p`.
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    while !b.is_empty() {
        let inv = powmod(b[b.len() - 1], p - 2, p);
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let t = mulmod(a[a.len() - 1], inv, p);
            for (i, &x) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - mulmod(t, x, p)) % p;
            }
            while a.last() == Some(&0) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(&l) = a.last() {
        let inv = powmod(l, p - 2, p);
        a.iter_mut().for_each(|x| *x = mulmod(*x, inv, p));
    }
    a
}

/// Gcd over `Z[x]` with positive leading coefficient, found modulo a prime
/// and confirmed by exact division.
fn poly_gcd(a: &[i128], b: &[i128]) -> Vec<i128> {
    let c = content(a).gcd(&content(b)).max(1);
    let (a, b) = (primitive(a.to_vec()), primitive(b.to_vec()));
    if a.is_empty() || b.is_empty() {
        let nz = if a.is_empty() { b } else { a };
        return nz.iter().map(|x| x * c).collect();
    }
    if a.len() == 1 || b.len() == 1 {
        return vec![c];
    }
    let (la, lb) = (a[a.len() - 1], b[b.len() - 1]);
    let lg = la.gcd(&lb);
    for p in GCD_PRIMES {
        if la % p as i128 == 0 || lb % p as i128 == 0 {
            continue;
        }
        let g = gcd_mod(reduce_mod(&a, p), reduce_mod(&b, p), p);
        if g.len() <= 1 {
            return vec![c];
        }
        let scale = lg.rem_euclid(p as i128) as u64;
        let half = (p / 2) as i128;
        let lifted: Vec<i128> = g
            .iter()
            .map(|&x| {
                let y = mulmod(x, scale, p) as i128;
                if y > half {
                    y - p as i128
                } else {
                    y
                }
            })
            .collect();
        let cand = primitive(lifted);
        if poly_div_exact(&a, &cand).is_some() && poly_div_exact(&b, &cand).is_some() {
            return cand.iter().map(|x| x * c).collect();
        }
    }
    panic!("polynomial gcd failed for every prime");
}

/// Exact quotient `a / b` over `Z[x]`; `None` if `b` does not divide `a`.
fn poly_div_exact(a: &[i128], b: &[i128]) -> Option<Vec<i128>> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = b[db];
    if r.is_empty() {
        return Some(Vec::new());
    }
    if r.len() <= db {
        return None;
    }
    let mut q = vec![0i128; r.len() - db];
    while r.len() > db {
        let dr = r.len() - 1;
        if r[dr] % lb != 0 {
            return None;
        }
        let t = r[dr] / lb;
        q[dr - db] = t;
        for i in 0..=db {
            r[dr - db + i] = t.checked_mul(b[i]).and_then(|x| r[dr - db + i].checked_sub(x))?;
        }
        trim(&mut r);
    }
    r.is_empty().then_some(q)
}

// ---------------------------------------------------------------------------
// Rational functions

/// Quotient of Laurent polynomials in lowest terms.
///
/// Normal form: the denominator has lowest exponent 0, positive leading
/// coefficient, and no common factor with the numerator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunction {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Parameter("zero denominator".into()));
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (ln, n) = num.dense();
        let (ld, d) = den.dense();
        let g = poly_gcd(&n, &d);
        let mut n = poly_div_exact(&n, &g).expect("gcd divides numerator");
        let mut d = poly_div_exact(&d, &g).expect("gcd divides denominator");
        if d.last().is_some_and(|&x| x < 0) {
            n.iter_mut().for_each(|x| *x = -*x);
            d.iter_mut().for_each(|x| *x = -*x);
        }
        let lead = d.iter().position(|&x| x != 0).unwrap_or(0);
        Self { num: LaurentPoly::from_dense(ln - ld - lead as i64, &n), den: LaurentPoly::from_dense(0, &d[lead..]) }
    }

    pub fn zero() -> Self {
        Self { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Self::from(LaurentPoly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    /// The Laurent polynomial equal to `self`, if the denominator is 1.
    pub fn to_laurent(&self) -> Option<LaurentPoly> {
        (self.den == LaurentPoly::one()).then(|| self.num.clone())
    }

    pub fn inverse(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self * &o.inverse()?)
    }
}

impl From<LaurentPoly> for RationalFunction {
    fn from(p: LaurentPoly) -> Self {
        Self::reduce(p, LaurentPoly::one())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == LaurentPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        if self.den == o.den {
            return RationalFunction::reduce(&self.num + &o.num, self.den.clone());
        }
        RationalFunction::reduce(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self + &-o
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() || o.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction::reduce(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

/// Quantum integer `[n] = (q^n - q^-n) / (q - q^-1)`.
pub fn quantum_int(n: u32) -> RationalFunction {
    let n = n as i64;
    let num = LaurentPoly::from_terms(&[(n, 1), (-n, -1)]);
    let den = LaurentPoly::from_terms(&[(1, 1), (-1, -1)]);
    RationalFunction::reduce(num, den)
}

// ---------------------------------------------------------------------------
// Temperley-Lieb algebra

/// Non-crossing perfect matching of the `2n` boundary points of a box.
///
/// Bottom points are `0..n` and top points `n..2n`, both left to right.
/// The canonical code reads the boundary circle bottom left to right, then
/// top right to left, writing `(` for the first end of each arc.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanarMatching {
    code: String,
    partner: Vec<usize>,
}

impl PlanarMatching {
    pub fn new(partner: Vec<usize>) -> Result<Self> {
        let m = partner.len();
        if !m.is_multiple_of(2) {
            return Err(Error::Parameter("odd number of boundary points".into()));
        }
        for (i, &p) in partner.iter().enumerate() {
            if p >= m || p == i || partner[p] != i {
                return Err(Error::Parameter("not a perfect matching".into()));
            }
        }
        let n = m / 2;
        let order = Self::circle_order(n);
        let mut pos = vec![0; m];
        for (k, &x) in order.iter().enumerate() {
            pos[x] = k;
        }
        let mut stack = Vec::new();
        let mut code = String::with_capacity(m);
        for &x in &order {
            if pos[partner[x]] > pos[x] {
                stack.push(x);
                code.push('(');
            } else {
                if stack.pop() != Some(partner[x]) {
                    return Err(Error::Parameter("matching is not planar".into()));
                }
                code.push(')');
            }
        }
        Ok(Self { code, partner })
    }

    fn circle_order(n: usize) -> Vec<usize> {
        (0..n).chain((n..2 * n).rev()).collect()
    }

    /// Number of strands `n`.
    pub fn strands(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn partner(&self, i: usize) -> usize {
        self.partner[i]
    }

    /// Balanced-parenthesis code.
    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..2 * n).map(|i| (i + n) % (2 * n)).collect()).expect("identity is planar")
    }

    /// The turnback `e_i`, `1 <= i < n`: caps joining points `i-1` and `i`.
    pub fn turnback(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::Parameter(format!("e_{i} undefined in TL_{n}")));
        }
        let mut p: Vec<usize> = (0..2 * n).map(|j| (j + n) % (2 * n)).collect();
        p[i - 1] = i;
        p[i] = i - 1;
        p[n + i - 1] = n + i;
        p[n + i] = n + i - 1;
        Self::new(p)
    }

    /// `self` stacked on top of `below`; returns the matching and the closed loop count.
    pub fn compose(&self, below: &Self) -> Result<(Self, usize)> {
        let n = self.strands();
        if below.strands() != n {
            return Err(Error::Parameter("arity mismatch".into()));
        }
        // Result point r: bottom (r < n) lies on `below`, top on `self`.
        let mut out = vec![usize::MAX; 2 * n];
        let mut mid_seen = vec![false; n];
        for start in 0..2 * n {
            if out[start] != usize::MAX {
                continue;
            }
            // (on_top, point index in that box)
            let (mut top, mut x) = if start < n { (false, start) } else { (true, start) };
            let end = loop {
                let y = if top { self.partner[x] } else { below.partner[x] };
                match (top, y < n) {
                    (true, true) => {
                        mid_seen[y] = true;
                        top = false;
                        x = y + n;
                    }
                    (false, false) => {
                        mid_seen[y - n] = true;
                        top = true;
                        x = y - n;
                    }
                    (true, false) => break y,
                    (false, true) => break y,
                }
            };
            out[start] = end;
            out[end] = start;
        }
        let mut loops = 0;
        for s in 0..n {
            if mid_seen[s] {
                continue;
            }
            loops += 1;
            let mut x = s;
            loop {
                mid_seen[x] = true;
                let y = self.partner[x];
                mid_seen[y] = true;
                let z = below.partner[y + n] - n;
                if z == s {
                    break;
                }
                x = z;
            }
        }
        Ok((Self::new(out)?, loops))
    }

    /// Add a through strand on the right: `x ⊔ 1`.
    pub fn extend(&self) -> Self {
        let n = self.strands();
        let map = |i: usize| if i < n { i } else { i + 1 };
        let mut p = vec![0; 2 * n + 2];
        for i in 0..2 * n {
            p[map(i)] = map(self.partner[i]);
        }
        p[n] = 2 * n + 1;
        p[2 * n + 1] = n;
        Self::new(p).expect("extension is planar")
    }
}

/// Finitely supported linear combination of planar matchings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TLElement {
    n: usize,
    terms: BTreeMap<PlanarMatching, RationalFunction>,
}

fn circle_power(k: usize) -> RationalFunction {
    RationalFunction::from(LaurentPoly::circle().pow(k as u32))
}

impl TLElement {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn basis(m: PlanarMatching) -> Self {
        let n = m.strands();
        let mut terms = BTreeMap::new();
        terms.insert(m, RationalFunction::one());
        Self { n, terms }
    }

    pub fn identity(n: usize) -> Self {
        Self::basis(PlanarMatching::identity(n))
    }

    pub fn turnback(n: usize, i: usize) -> Result<Self> {
        Ok(Self::basis(PlanarMatching::turnback(n, i)?))
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PlanarMatching, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &PlanarMatching) -> RationalFunction {
        self.terms.get(m).cloned().unwrap_or_else(RationalFunction::zero)
    }

    fn add_term(&mut self, m: PlanarMatching, c: RationalFunction) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::Parameter("arity mismatch".into()));
        }
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn scale(&self, k: &RationalFunction) -> Self {
        let mut r = Self::zero(self.n);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), c * k);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&RationalFunction::from(LaurentPoly::monomial(-1, 0))))
    }

    /// `self · o` with `self` stacked on top; each closed loop gives `q + q^-1`.
    pub fn multiply(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::Parameter("arity mismatch".into()));
        }
        // Sum numerators over shared unreduced denominators; reduce once per group.
        let mut acc: HashMap<PlanarMatching, HashMap<LaurentPoly, LaurentPoly>> = HashMap::new();
        let mut powers = vec![LaurentPoly::one()];
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let (m, loops) = a.compose(b)?;
                while powers.len() <= loops {
                    let p = &powers[powers.len() - 1] * &LaurentPoly::circle();
                    powers.push(p);
                }
                let num = &(&ca.num * &cb.num) * &powers[loops];
                let den = &ca.den * &cb.den;
                let slot = acc.entry(m).or_default().entry(den).or_default();
                *slot = &*slot + &num;
            }
        }
        let mut r = Self::zero(self.n);
        for (m, groups) in acc {
            let mut groups: Vec<_> = groups.into_iter().collect();
            groups.sort_by_key(|(d, _)| d.terms().collect::<Vec<_>>());
            let s = groups
                .into_iter()
                .filter(|(_, num)| !num.is_zero())
                .fold(RationalFunction::zero(), |s, (den, num)| &s + &RationalFunction::reduce(num, den));
            r.add_term(m, s);
        }
        Ok(r)
    }

    /// `x ⊔ 1`.
    pub fn extend(&self) -> Self {
        let mut r = Self::zero(self.n + 1);
        for (m, c) in &self.terms {
            r.add_term(m.extend(), c.clone());
        }
        r
    }

    /// Closure (trace) in the plane.
    pub fn trace(&self) -> RationalFunction {
        let mut s = RationalFunction::zero();
        for (m, c) in &self.terms {
            s = &s + &(c * &circle_power(closure_loops(m)));
        }
        s
    }
}

/// Loops formed by joining top point `i` to bottom point `i`.
fn closure_loops(m: &PlanarMatching) -> usize {
    let n = m.strands();
    let mut seen = vec![false; 2 * n];
    let mut loops = 0;
    for s in 0..2 * n {
        if seen[s] {
            continue;
        }
        loops += 1;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            let y = m.partner(x);
            seen[y] = true;
            x = (y + n) % (2 * n);
        }
    }
    loops
}

type ProjectorCache = RwLock<HashMap<usize, Arc<TLElement>>>;

fn projector_cache() -> &'static ProjectorCache {
    static CACHE: OnceLock<ProjectorCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Jones-Wenzl projector `p_n` by the Wenzl recurrence, memoized.
pub fn jones_wenzl(n: usize) -> Result<Arc<TLElement>> {
    if n == 0 {
        return Err(Error::Parameter("p_n needs n >= 1".into()));
    }
    if let Some(p) = projector_cache().read().expect("cache lock").get(&n) {
        return Ok(p.clone());
    }
    let p = if n == 1 {
        TLElement::identity(1)
    } else {
        let prev = jones_wenzl(n - 1)?.extend();
        let e = TLElement::turnback(n, n - 1)?;
        let middle = prev.multiply(&e)?.multiply(&prev)?;
        let coeff = quantum_int(n as u32 - 1).div(&quantum_int(n as u32))?;
        prev.sub(&middle.scale(&coeff))?
    };
    let p = Arc::new(p);
    projector_cache().write().expect("cache lock").insert(n, p.clone());
    Ok(p)
}

// ---------------------------------------------------------------------------
// Closed planar networks

/// Crossing relations used by the bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Positive crossing `q<‖> - q^2<⌣⌢>`, negative `q^-2<⌣⌢> - q^-1<‖>`, circle `q + q^-1`.
    Verbatim,
    /// Kauffman's `A<A-split> + A^-1<B-split>`, circle `-A^2 - A^-2`, with
    /// writhe correction and `A^2 = -q^-1`.
    Classical,
}

impl Convention {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "verbatim" => Ok(Convention::Verbatim),
            "classical" => Ok(Convention::Classical),
            _ => Err(Error::Parse(format!("unknown convention {s}"))),
        }
    }

    /// Circle value in the working variable (`q` or `A`).
    fn circle(self) -> LaurentPoly {
        match self {
            Convention::Verbatim => LaurentPoly::circle(),
            Convention::Classical => LaurentPoly::from_terms(&[(2, -1), (-2, -1)]),
        }
    }

    /// Weights of the Continue and Cut smoothings of a crossing.
    fn weights(self, weight: i64, sign: i64, oriented: Smoothing) -> [LaurentPoly; 2] {
        let (w_oriented, w_other) = match self {
            Convention::Verbatim if sign > 0 => (LaurentPoly::monomial(1, 1), LaurentPoly::monomial(-1, 2)),
            Convention::Verbatim => (LaurentPoly::monomial(-1, -1), LaurentPoly::monomial(1, -2)),
            Convention::Classical => {
                // Over strand NW-SE sweeps W and E, so the A-split is Cut.
                let a_split = if weight > 0 { Smoothing::Cut } else { Smoothing::Continue };
                let (a, b) = (LaurentPoly::monomial(1, 1), LaurentPoly::monomial(1, -1));
                let cont = if a_split == Smoothing::Continue { a.clone() } else { b.clone() };
                let cut = if a_split == Smoothing::Cut { a } else { b };
                return [cont, cut];
            }
        };
        match oriented {
            Smoothing::Continue => [w_oriented, w_other],
            Smoothing::Cut => [w_other, w_oriented],
        }
    }
}

/// Rewrite a polynomial in `A` as a polynomial in `q` via `A^2 = -q^-1`.
pub fn a_to_q(p: &LaurentPoly) -> Result<LaurentPoly> {
    p.map_monomials(|e| (e % 2 == 0).then(|| (if (e / 2) % 2 == 0 { 1 } else { -1 }, -e / 2)))
        .ok_or_else(|| Error::Construction("odd power of A cannot be written in q".into()))
}

/// A node with alternative internal pairings of its ports.
#[derive(Debug, Clone)]
struct Node {
    ports: Vec<usize>,
    /// Each option pairs the ports and carries a weight.
    options: Vec<(Vec<(usize, usize)>, LaurentPoly)>,
}

/// Closed diagram made of crossings joined by arcs, plus an optional box
/// whose internal matchings are kept apart by tag.
#[derive(Debug, Clone)]
pub struct Network {
    arc: Vec<usize>,
    nodes: Vec<Node>,
    /// Extra circles disjoint from everything else.
    free_loops: usize,
    circle: LaurentPoly,
    /// Ports of tagged boxes in TL order (bottom then top).
    boxes: Vec<Vec<usize>>,
}

impl Network {
    /// Network with `ports` ports and no arcs yet.
    pub fn new(ports: usize, circle: LaurentPoly) -> Self {
        Self { arc: vec![usize::MAX; ports], nodes: Vec::new(), free_loops: 0, circle, boxes: Vec::new() }
    }

    pub fn add_arc(&mut self, a: usize, b: usize) {
        self.arc[a] = b;
        self.arc[b] = a;
    }

    /// Crossing with ports `[NE, NW, SW, SE]` and weights of Continue and Cut.
    pub fn add_crossing(&mut self, ports: [usize; 4], weights: [LaurentPoly; 2]) {
        let [ne, nw, sw, se] = ports;
        let [wc, wk] = weights;
        self.nodes.push(Node { ports: ports.to_vec(), options: vec![(vec![(sw, nw), (se, ne)], wc), (vec![(sw, se), (nw, ne)], wk)] });
    }

    pub fn add_free_loops(&mut self, k: usize) {
        self.free_loops += k;
    }

    fn check_closed(&self) -> Result<()> {
        if self.arc.contains(&usize::MAX) {
            return Err(Error::Parameter("open tangle: unmatched boundary point".into()));
        }
        Ok(())
    }

    /// Options of every box expanded into one state sum per choice of box matchings.
    fn box_choices(&self, expansions: &[Vec<PlanarMatching>]) -> Vec<Vec<(usize, usize)>> {
        let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for (ports, ms) in self.boxes.iter().zip(expansions) {
            let mut next = Vec::new();
            for prefix in &out {
                for m in ms {
                    let mut v = prefix.clone();
                    for i in 0..ports.len() {
                        let j = m.partner(i);
                        if i < j {
                            v.push((ports[i], ports[j]));
                        }
                    }
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// State sum by sweeping nodes in the given order, keeping only the
    /// connectivity of the open ends.
    fn sweep(&self, fixed: &[(usize, usize)], order: &[usize]) -> LaurentPoly {
        type Key = Vec<(usize, usize)>;
        let ports = self.arc.len();
        let mut processed = vec![false; ports];
        let mut states: HashMap<Key, LaurentPoly> = HashMap::new();
        // The fixed pairs form the first pseudo-node.
        let first = Node { ports: fixed.iter().flat_map(|&(a, b)| [a, b]).collect(), options: vec![(fixed.to_vec(), LaurentPoly::one())] };
        states.insert(Vec::new(), LaurentPoly::monomial(1, 0));
        let mut powers: Vec<LaurentPoly> = vec![LaurentPoly::one()];
        let nodes = std::iter::once(&first).chain(order.iter().map(|&i| &self.nodes[i]));
        for node in nodes {
            for &p in &node.ports {
                processed[p] = true;
            }
            let mut next: HashMap<Key, LaurentPoly> = HashMap::new();
            for (key, coeff) in &states {
                for (pairs, w) in &node.options {
                    let (key2, loops) = merge(key, pairs, &node.ports, &self.arc, &processed);
                    while powers.len() <= loops {
                        let p = &powers[powers.len() - 1] * &self.circle;
                        powers.push(p);
                    }
                    let c = &(coeff * w) * &powers[loops];
                    let slot = next.entry(key2).or_default();
                    *slot = &*slot + &c;
                }
            }
            next.retain(|_, v| !v.is_zero());
            states = next;
        }
        let total = states.remove(&Vec::new()).unwrap_or_default();
        &total * &self.circle.pow(self.free_loops as u32)
    }

    /// Exhaustive sum over every resolution, counting loops with union-find.
    fn exhaustive(&self, fixed: &[(usize, usize)]) -> LaurentPoly {
        let ports = self.arc.len();
        let sizes: Vec<usize> = self.nodes.iter().map(|n| n.options.len()).collect();
        let mut choice = vec![0usize; self.nodes.len()];
        let mut total = LaurentPoly::zero();
        loop {
            let mut uf: Vec<usize> = (0..ports).collect();
            fn find(uf: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while uf[r] != r {
                    r = uf[r];
                }
                let mut y = x;
                while uf[y] != r {
                    let z = uf[y];
                    uf[y] = r;
                    y = z;
                }
                r
            }
            let mut union = |a: usize, b: usize| {
                let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
                if ra != rb {
                    uf[ra] = rb;
                }
            };
            for (a, &b) in self.arc.iter().enumerate() {
                union(a, b);
            }
            for &(a, b) in fixed {
                union(a, b);
            }
            let mut w = LaurentPoly::one();
            for (node, &k) in self.nodes.iter().zip(&choice) {
                let (pairs, wt) = &node.options[k];
                for &(a, b) in pairs {
                    union(a, b);
                }
                w = &w * wt;
            }
            let loops = (0..ports).filter(|&p| find(&mut uf, p) == p).count() + self.free_loops;
            total = &total + &(&w * &self.circle.pow(loops as u32));
            // Next resolution in mixed radix.
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return total;
                }
                choice[i] += 1;
                if choice[i] < sizes[i] {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    /// Untagged state sum (no boxes) processing crossings in `order`.
    pub fn evaluate_in_order(&self, order: &[usize]) -> Result<LaurentPoly> {
        self.check_closed()?;
        if !self.boxes.is_empty() {
            return Err(Error::Parameter("network has projector boxes".into()));
        }
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.nodes.len()).collect::<Vec<_>>() {
            return Err(Error::Parameter("order must list every crossing once".into()));
        }
        Ok(self.sweep(&[], order))
    }

    /// Untagged state sum in the natural order.
    pub fn evaluate(&self) -> Result<LaurentPoly> {
        self.evaluate_in_order(&(0..self.nodes.len()).collect::<Vec<_>>())
    }

    /// Untagged exhaustive state sum.
    pub fn evaluate_exhaustive(&self) -> Result<LaurentPoly> {
        self.check_closed()?;
        if !self.boxes.is_empty() {
            return Err(Error::Parameter("network has projector boxes".into()));
        }
        Ok(self.exhaustive(&[]))
    }

    pub fn crossing_count(&self) -> usize {
        self.nodes.len()
    }

    /// Value with every box replaced by `proj`, summed over its terms.
    fn evaluate_with(&self, proj: &TLElement, exhaustive: bool) -> Result<RationalFunction> {
        self.check_closed()?;
        let ms: Vec<PlanarMatching> = proj.terms().map(|(m, _)| m.clone()).collect();
        let coeffs: Vec<RationalFunction> = proj.terms().map(|(_, c)| c.clone()).collect();
        let per_box = vec![ms; self.boxes.len()];
        let choices = self.box_choices(&per_box);
        let order: Vec<usize> = (0..self.nodes.len()).collect();
        // Index of the chosen term in each box, in mixed radix matching `box_choices`.
        let k = coeffs.len();
        let mut total = RationalFunction::zero();
        for (idx, fixed) in choices.iter().enumerate() {
            let v = if exhaustive { self.exhaustive(fixed) } else { self.sweep(fixed, &order) };
            if v.is_zero() {
                continue;
            }
            let mut c = RationalFunction::from(v);
            let mut rest = idx;
            for _ in 0..self.boxes.len() {
                // The last box varies fastest.
                c = &c * &coeffs[rest % k];
                rest /= k;
            }
            total = &total + &c;
        }
        Ok(total)
    }
}

/// Fold a node's pairs into the open-end matching `key`; returns the new
/// matching and the number of closed loops.
fn merge(
    key: &[(usize, usize)],
    pairs: &[(usize, usize)],
    node_ports: &[usize],
    arc: &[usize],
    processed: &[bool],
) -> (Vec<(usize, usize)>, usize) {
    let mut edges: Vec<(usize, usize)> = key.iter().chain(pairs).copied().collect();
    for &p in node_ports {
        let r = arc[p];
        if processed[r] && (p < r || !node_ports.contains(&r)) {
            edges.push((p, r));
        }
    }
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        adj.entry(a).or_default().push(i);
        adj.entry(b).or_default().push(i);
    }
    let mut used = vec![false; edges.len()];
    // Walk from `x` along unused edges; returns the last vertex reached.
    let walk = |mut x: usize, used: &mut Vec<bool>| loop {
        let Some(&e) = adj[&x].iter().find(|&&e| !used[e]) else { return x };
        used[e] = true;
        let (a, b) = edges[e];
        x = if a == x { b } else { a };
    };
    let mut ends: Vec<usize> = adj.keys().copied().filter(|&p| !processed[arc[p]]).collect();
    ends.sort_unstable();
    let mut out = Vec::new();
    for &s in &ends {
        if adj[&s].iter().all(|&e| used[e]) {
            continue;
        }
        let t = walk(s, &mut used);
        out.push((s.min(t), s.max(t)));
    }
    let mut loops = 0;
    for e in 0..edges.len() {
        if !used[e] {
            loops += 1;
            walk(edges[e].0, &mut used);
        }
    }
    out.sort_unstable();
    (out, loops)
}

// ---------------------------------------------------------------------------
// Cabled diagrams

/// Where projector boxes go in a cable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorSites {
    /// No projector.
    None,
    /// One box on the arc leaving half SW of crossing 0.
    One,
    /// A box on every arc between crossings.
    Every,
}

/// Blackboard `n`-cable of `d` as a network, with boxes at the chosen sites.
///
/// Cable strands at a half are numbered counterclockwise around the crossing.
pub fn cable_network(d: &KnotDiagram, n: usize, conv: Convention, sites: ProjectorSites) -> Result<Network> {
    if n == 0 {
        return Err(Error::Parameter("cable needs n >= 1".into()));
    }
    let c = d.crossing_count();
    let grid = 4 * c * n * n;
    let circle = conv.circle();
    if c == 0 {
        // Parallel circles, closed through a box when asked.
        return Ok(match sites {
            ProjectorSites::None => {
                let mut net = Network::new(0, circle);
                net.add_free_loops(n);
                net
            }
            _ => {
                let mut net = Network::new(2 * n, circle);
                for p in 0..n {
                    net.add_arc(p, n + p);
                }
                net.boxes.push((0..2 * n).collect());
                net
            }
        });
    }
    let small = |x: usize, a: usize, b: usize, h: Half| 4 * ((x * n + a) * n + b) + h as usize;
    let sub = |x: usize, h: Half, i: usize| match h {
        Half::NE => small(x, i, n - 1, Half::NE),
        Half::SW => small(x, n - 1 - i, 0, Half::SW),
        Half::NW => small(x, n - 1, n - 1 - i, Half::NW),
        Half::SE => small(x, 0, i, Half::SE),
    };
    let mut outer: Vec<((usize, Half), (usize, Half))> = Vec::new();
    for x in 0..c {
        for h in Half::ALL {
            let (x2, h2) = d.conn[x][h as usize];
            if (x, h as usize) <= (x2, h2 as usize) {
                outer.push(((x, h), (x2, h2)));
            }
        }
    }
    let boxed: Vec<bool> = outer
        .iter()
        .map(|&(a, b)| match sites {
            ProjectorSites::None => false,
            ProjectorSites::One => a == (0, Half::SW) || b == (0, Half::SW),
            ProjectorSites::Every => true,
        })
        .collect();
    let nboxes = boxed.iter().filter(|&&b| b).count();
    let mut net = Network::new(grid + 2 * n * nboxes, circle);
    let signs = d.crossing_signs();
    let oriented = d.oriented_smoothings();
    for x in 0..c {
        let w = conv.weights(d.crossings[x].weight, signs[x], oriented[x]);
        for a in 0..n {
            for b in 0..n {
                let ports = Half::ALL.map(|h| small(x, a, b, h));
                net.add_crossing(ports, w.clone());
                if b + 1 < n {
                    net.add_arc(small(x, a, b, Half::NE), small(x, a, b + 1, Half::SW));
                }
                if a + 1 < n {
                    net.add_arc(small(x, a, b, Half::NW), small(x, a + 1, b, Half::SE));
                }
            }
        }
    }
    let mut next_box = grid;
    for (&((x, h), (x2, h2)), &has_box) in outer.iter().zip(&boxed) {
        if has_box {
            let ports: Vec<usize> = (next_box..next_box + 2 * n).collect();
            for p in 0..n {
                net.add_arc(sub(x, h, p), ports[p]);
                net.add_arc(sub(x2, h2, n - 1 - p), ports[n + p]);
            }
            net.boxes.push(ports);
            next_box += 2 * n;
        } else {
            for i in 0..n {
                net.add_arc(sub(x, h, i), sub(x2, h2, n - 1 - i));
            }
        }
    }
    Ok(net)
}

/// Full state sum of `D` under the chosen convention.
///
/// `Verbatim` returns the raw sum. `Classical` returns `(-A^3)^-w <D>` in `q`.
pub fn bracket(d: &KnotDiagram, conv: Convention) -> Result<LaurentPoly> {
    let raw = cable_network(d, 1, conv, ProjectorSites::None)?.evaluate()?;
    finish_bracket(d, conv, raw)
}

/// The same value by exhaustive expansion over all `2^c` states.
pub fn bracket_exhaustive(d: &KnotDiagram, conv: Convention) -> Result<LaurentPoly> {
    let raw = cable_network(d, 1, conv, ProjectorSites::None)?.evaluate_exhaustive()?;
    finish_bracket(d, conv, raw)
}

fn finish_bracket(d: &KnotDiagram, conv: Convention, raw: LaurentPoly) -> Result<LaurentPoly> {
    match conv {
        Convention::Verbatim => Ok(raw),
        Convention::Classical => {
            let w = d.writhe();
            let sign = if w % 2 == 0 { 1 } else { -1 };
            a_to_q(&raw.scale(sign).shift(-3 * w))
        }
    }
}

/// Largest color accepted by `colored_jones`.
pub const MAX_COLOR: usize = 8;
/// Largest number of cable crossings accepted by `colored_jones`.
pub const MAX_CABLE_CROSSINGS: usize = 128;

/// One-crossing diagram whose crossing has the given sign.
fn kink(sign: i64) -> Result<KnotDiagram> {
    for w in [1, -1] {
        let text = format!(r#"{{"vertices":["a"],"rotations":{{"a":["e","e"]}},"edges":[{{"id":"e","ends":["a","a"],"weight":{w}}}]}}"#);
        let d = build_diagram(&parse_graph(&text)?)?;
        if d.crossing_signs()[0] == sign {
            return Ok(d);
        }
    }
    Err(Error::Construction(format!("no kink of sign {sign}")))
}

/// `q -> -A^2`, carrying TL coefficients into the classical variable.
fn q_to_a(p: &LaurentPoly) -> LaurentPoly {
    p.map_monomials(|e| Some((if e % 2 == 0 { 1 } else { -1 }, 2 * e))).expect("total map")
}

fn projector_for(n: usize, conv: Convention) -> Result<TLElement> {
    let p = jones_wenzl(n)?;
    Ok(match conv {
        Convention::Verbatim => (*p).clone(),
        Convention::Classical => {
            let mut r = TLElement::zero(n);
            for (m, c) in p.terms() {
                let c = RationalFunction::new(q_to_a(c.numerator()), q_to_a(c.denominator()))?;
                r.add_term(m.clone(), c);
            }
            r
        }
    })
}

/// Closure of `p_n` in the working variable.
fn projector_trace(n: usize, conv: Convention) -> Result<RationalFunction> {
    let t = jones_wenzl(n)?.trace();
    match conv {
        Convention::Verbatim => Ok(t),
        Convention::Classical => RationalFunction::new(q_to_a(t.numerator()), q_to_a(t.denominator())),
    }
}

/// Raw value of the `n`-cable with projectors, in the working variable.
fn cabled_value(d: &KnotDiagram, n: usize, conv: Convention, exhaustive: bool) -> Result<RationalFunction> {
    if d.crossing_count() == 0 {
        return projector_trace(n, conv);
    }
    let p = projector_for(n, conv)?;
    let sites = if exhaustive { ProjectorSites::Every } else { ProjectorSites::One };
    cable_network(d, n, conv, sites)?.evaluate_with(&p, exhaustive)
}

fn colored(d: &KnotDiagram, n: usize, conv: Convention, exhaustive: bool) -> Result<LaurentPoly> {
    if n == 0 {
        return Err(Error::Parameter("color must be at least 1".into()));
    }
    if n > MAX_COLOR || d.crossing_count() * n * n > MAX_CABLE_CROSSINGS {
        return Err(Error::Resource(format!("colored Jones with n={n} on {} crossings exceeds the desk bound", d.crossing_count())));
    }
    let raw = cabled_value(d, n, conv, exhaustive)?;
    let unknot = projector_trace(n, conv)?;
    let circle_n = RationalFunction::from(conv.circle().pow(n as u32));
    let mut j = (&raw * &circle_n).div(&unknot)?;
    if conv == Convention::Classical {
        // Divide out the framing factor of each crossing, read off a kink.
        let signs = d.crossing_signs();
        for s in [1i64, -1] {
            let count = signs.iter().filter(|&&x| x == s).count();
            if count == 0 {
                continue;
            }
            let phi = cabled_value(&kink(s)?, n, conv, exhaustive)?.div(&unknot)?;
            for _ in 0..count {
                j = j.div(&phi)?;
            }
        }
    }
    let j = j.to_laurent().ok_or_else(|| Error::Construction(format!("normalized colored Jones is not a Laurent polynomial: {j}")))?;
    match conv {
        Convention::Verbatim => Ok(j),
        Convention::Classical => a_to_q(&j),
    }
}

/// Colored Jones polynomial `J^n`: the `n`-cable with `p_n` inserted,
/// scaled so that the unknot gives `(q + q^-1)^n`.
///
/// Under `Verbatim` the per-crossing factors of the printed relations are kept
/// as they are, so `n = 1` returns `bracket(D)`. Under `Classical` the
/// framing is removed using a one-crossing kink.
pub fn colored_jones(d: &KnotDiagram, n: usize, conv: Convention) -> Result<LaurentPoly> {
    colored(d, n, conv, false)
}

/// Independent evaluation of `colored_jones`: a projector on every cable arc
/// and exhaustive expansion of all crossings and projector terms.
pub fn colored_jones_exhaustive(d: &KnotDiagram, n: usize, conv: Convention) -> Result<LaurentPoly> {
    colored(d, n, conv, true)
}
