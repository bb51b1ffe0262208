//! Exact coefficient field: fractions of Laurent polynomials in `q`, `t`, `s`
//! with arbitrary-precision rational coefficients.
//!
//! `t` stands for `q^mu` (generic Verma highest weight) and `s` for `q^i`
//! (generic basis index); both are independent formal variables, so every
//! identity proved over this field holds for all integer values of `mu`
//! and `i` at once.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Arbitrary-precision rational, always reduced, denominator positive.
pub type Rational = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by the zero scalar")]
    DivisionByZero,
    #[error("denominator vanishes at the specialization point")]
    ZeroDenominator,
}

/// Exponent vector of a single term `q^q * t^t * s^s`. Exponents may be
/// negative; the ordering (and hence every serialized term order) is
/// lexicographic on `(q, t, s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub q: i64,
    pub t: i64,
    pub s: i64,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { q: 0, t: 0, s: 0 };

    pub fn new(q: i64, t: i64, s: i64) -> Self {
        Monomial { q, t, s }
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            q: self.q + other.q,
            t: self.t + other.t,
            s: self.s + other.s,
        }
    }

    fn inv(&self) -> Monomial {
        Monomial {
            q: -self.q,
            t: -self.t,
            s: -self.s,
        }
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.q <= other.q && self.t <= other.t && self.s <= other.s
    }

    fn min_with(&self, other: &Monomial) -> Monomial {
        Monomial {
            q: self.q.min(other.q),
            t: self.t.min(other.t),
            s: self.s.min(other.s),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("q", self.q), ("t", self.t), ("s", self.s)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Laurent polynomial in `q`, `t`, `s`: a term map with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::term(Monomial::ONE, Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = LaurentPoly::default();
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(iter: I) -> Self {
        let mut p = LaurentPoly::default();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::ONE)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }

    fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    fn mul_monomial(&self, m: &Monomial) -> LaurentPoly {
        if *m == Monomial::ONE {
            return self.clone();
        }
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(m), c.clone()))
                .collect(),
        }
    }

    fn scale(&self, c: &Rational) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(m, k)| (*m, k * c)).collect(),
        }
    }

    /// Componentwise minimum of all exponent vectors. Zero polynomial has none.
    fn min_exponents(&self) -> Option<Monomial> {
        self.terms.keys().copied().reduce(|a, b| a.min_with(&b))
    }

    /// Largest term in the fixed lexicographic order.
    fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients. Zero polynomial yields 1.
    fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            Rational::one()
        } else {
            Rational::new(num, den)
        }
    }

    /// Exact division: `Some(k)` with `self = divisor * k`, or `None` when the
    /// division leaves a remainder.
    fn div_exact(&self, divisor: &LaurentPoly) -> Option<LaurentPoly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentPoly::zero());
        }
        // Shift both factors to honest polynomials so that lex order is a
        // monomial order, then run single-divisor long division.
        let sm = self.min_exponents().unwrap();
        let dm = divisor.min_exponents().unwrap();
        let mut rem = self.mul_monomial(&sm.inv());
        let g = divisor.mul_monomial(&dm.inv());
        let (glead_m, glead_c) = {
            let (m, c) = g.leading().unwrap();
            (*m, c.clone())
        };
        let mut quot = LaurentPoly::default();
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (*m, c.clone())
            };
            if !glead_m.divides(&rm) {
                return None;
            }
            let qm = rm.mul(&glead_m.inv());
            let qc = rc / &glead_c;
            rem = rem.sub(&g.mul_monomial(&qm).scale(&qc));
            quot.add_term(qm, qc);
        }
        Some(quot.mul_monomial(&sm.mul(&dm.inv())))
    }

    /// Evaluate at `q = q0`, `t = q0^mu0`, `s = q0^i0`. Requires `q0 != 0`.
    fn eval(&self, q0: &Rational, mu0: i64, i0: i64) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let e = m.q + mu0 * m.t + i0 * m.s;
            acc += c * rational_pow(q0, e);
        }
        acc
    }
}

fn rational_pow(base: &Rational, e: i64) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    let mut mag = Rational::one();
    for _ in 0..e.unsigned_abs() {
        mag *= base;
    }
    if e > 0 {
        mag
    } else {
        mag.recip()
    }
}

fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    Rational::new(a.numer().gcd(b.numer()), a.denom().lcm(b.denom()))
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // leading term first
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if *m == Monomial::ONE {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Element of the fraction field, kept in a canonical form:
/// both parts are honest polynomials with coprime integer coefficients,
/// no variable divides both, and the leading denominator coefficient is
/// positive. Full multivariate gcd reduction is not attempted; equality is
/// decided by cross-multiplication so unreduced representatives are harmless.
#[derive(Clone, Debug)]
pub struct Scalar {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        Scalar {
            num: LaurentPoly::one(),
            den: LaurentPoly::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::normalized(LaurentPoly::term(Monomial::ONE, r), LaurentPoly::one())
    }

    /// Single term `c * q^a t^b s^c`.
    pub fn monomial(c: Rational, m: Monomial) -> Self {
        Scalar::normalized(LaurentPoly::term(m, c), LaurentPoly::one())
    }

    pub fn q_pow(e: i64) -> Self {
        Scalar::monomial(Rational::one(), Monomial::new(e, 0, 0))
    }

    pub fn t_pow(e: i64) -> Self {
        Scalar::monomial(Rational::one(), Monomial::new(0, e, 0))
    }

    pub fn s_pow(e: i64) -> Self {
        Scalar::monomial(Rational::one(), Monomial::new(0, 0, e))
    }

    pub fn from_poly(num: LaurentPoly) -> Self {
        Scalar::normalized(num, LaurentPoly::one())
    }

    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::normalized(num, den))
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    fn normalized(num: LaurentPoly, den: LaurentPoly) -> Self {
        let (num, den) = normalize_core(num, den);
        if den.is_one() || num.is_zero() {
            return Scalar { num, den };
        }
        if let Some(k) = num.div_exact(&den) {
            let (num, den) = normalize_core(k, LaurentPoly::one());
            return Scalar { num, den };
        }
        if let Some(k) = den.div_exact(&num) {
            let (num, den) = normalize_core(LaurentPoly::one(), k);
            return Scalar { num, den };
        }
        Scalar { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        if self.den == other.den {
            return Scalar::normalized(self.num.add(&other.num), self.den.clone());
        }
        // When one denominator divides the other only the cofactor is needed.
        if let Some(k) = other.den.div_exact(&self.den) {
            return Scalar::normalized(self.num.mul(&k).add(&other.num), other.den.clone());
        }
        if let Some(k) = self.den.div_exact(&other.den) {
            return Scalar::normalized(self.num.add(&other.num.mul(&k)), self.den.clone());
        }
        Scalar::normalized(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        let (an, bd) = cross_cancel(&self.num, &other.den);
        let (bn, ad) = cross_cancel(&other.num, &self.den);
        Scalar::normalized(an.mul(&bn), ad.mul(&bd))
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Evaluate at `q = q0`, `t = q0^mu0`, `s = q0^i0` over exact rationals.
    pub fn specialize(&self, q0: &Rational, mu0: i64, i0: i64) -> Result<Rational, ScalarError> {
        if q0.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        let d = self.den.eval(q0, mu0, i0);
        if d.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(self.num.eval(q0, mu0, i0) / d)
    }

    /// Substitute `s -> q^{i0}`, leaving `q` and `t` formal.
    pub fn subst_s(&self, i0: i64) -> Scalar {
        let fold = |p: &LaurentPoly| {
            LaurentPoly::from_terms(
                p.terms()
                    .map(|(m, c)| (Monomial::new(m.q + i0 * m.s, m.t, 0), c.clone())),
            )
        };
        Scalar::normalized(fold(&self.num), fold(&self.den))
    }
}

fn normalize_core(mut num: LaurentPoly, mut den: LaurentPoly) -> (LaurentPoly, LaurentPoly) {
    assert!(!den.is_zero(), "scalar denominator must be nonzero");
    if num.is_zero() {
        return (LaurentPoly::zero(), LaurentPoly::one());
    }
    let shift = num
        .min_exponents()
        .unwrap()
        .min_with(&den.min_exponents().unwrap())
        .inv();
    if shift != Monomial::ONE {
        num = num.mul_monomial(&shift);
        den = den.mul_monomial(&shift);
    }
    let c = rational_gcd(&num.content(), &den.content());
    if !c.is_one() {
        let inv = c.recip();
        num = num.scale(&inv);
        den = den.scale(&inv);
    }
    if den.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
        num = num.neg();
        den = den.neg();
    }
    (num, den)
}

fn cross_cancel(num: &LaurentPoly, den: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
    if den.is_one() || num.is_zero() {
        return (num.clone(), den.clone());
    }
    if let Some(k) = num.div_exact(den) {
        return (k, LaurentPoly::one());
    }
    if let Some(k) = den.div_exact(num) {
        return (LaurentPoly::one(), k);
    }
    (num.clone(), den.clone())
}

impl PartialEq for Scalar {
    /// Cross-multiplication equality: `a/b = c/d` iff `a*d = c*b`.
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for Scalar {}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl std::ops::$trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar::$imp(self, rhs)
            }
        }
        impl std::ops::$trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar::$imp(&self, &rhs)
            }
        }
        impl std::ops::$trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar::$imp(&self, rhs)
            }
        }
        impl std::ops::$trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar::$imp(self, &rhs)
            }
        }
    };
}

scalar_binop!(Add, add, add);
scalar_binop!(Sub, sub, sub);
scalar_binop!(Mul, mul, mul);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}

/// Generalized quantum integer
/// `[eps_mu*mu + eps_i*i + k] = (q^k t^eps_mu s^eps_i - q^-k t^-eps_mu s^-eps_i) / (q - q^-1)`.
///
/// `quantum_bracket(0, 0, k)` is the classical `[k]`,
/// `quantum_bracket(1, 0, k)` is `[mu + k]`,
/// `quantum_bracket(0, 1, k)` is `[i + k]`,
/// `quantum_bracket(1, -1, k)` is `[mu - i + k]`.
pub fn quantum_bracket(eps_mu: i64, eps_i: i64, k: i64) -> Scalar {
    debug_assert!((0..=1).contains(&eps_mu));
    debug_assert!((-1..=1).contains(&eps_i));
    let num = LaurentPoly::from_terms([
        (Monomial::new(k, eps_mu, eps_i), Rational::one()),
        (Monomial::new(-k, -eps_mu, -eps_i), -Rational::one()),
    ]);
    let den = LaurentPoly::from_terms([
        (Monomial::new(1, 0, 0), Rational::one()),
        (Monomial::new(-1, 0, 0), -Rational::one()),
    ]);
    Scalar::new(num, den).expect("q - q^-1 is nonzero")
}

// serde representation: {"num": [{"c": "p/r", "q": e, "t": e, "s": e}, ...], "den": [...]}
// with terms in the fixed lexicographic order.

#[derive(Serialize, Deserialize)]
struct TermRepr {
    c: String,
    q: i64,
    t: i64,
    s: i64,
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    num: Vec<TermRepr>,
    den: Vec<TermRepr>,
}

fn poly_repr(p: &LaurentPoly) -> Vec<TermRepr> {
    p.terms()
        .map(|(m, c)| TermRepr {
            c: format!("{}/{}", c.numer(), c.denom()),
            q: m.q,
            t: m.t,
            s: m.s,
        })
        .collect()
}

fn poly_from_repr(terms: &[TermRepr]) -> Result<LaurentPoly, String> {
    let mut p = LaurentPoly::default();
    for t in terms {
        let (n, d) = match t.c.split_once('/') {
            Some((n, d)) => (n, d),
            None => (t.c.as_str(), "1"),
        };
        let n: BigInt = n.parse().map_err(|e| format!("bad numerator: {e}"))?;
        let d: BigInt = d.parse().map_err(|e| format!("bad denominator: {e}"))?;
        if d <= BigInt::zero() {
            return Err("term denominator must be positive".into());
        }
        p.add_term(Monomial::new(t.q, t.t, t.s), Rational::new(n, d));
    }
    Ok(p)
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScalarRepr {
            num: poly_repr(&self.num),
            den: poly_repr(&self.den),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(deserializer)?;
        let num = poly_from_repr(&repr.num).map_err(D::Error::custom)?;
        let den = poly_from_repr(&repr.den).map_err(D::Error::custom)?;
        Scalar::new(num, den).map_err(|e| D::Error::custom(e.to_string()))
    }
}
