//! Weight-graded modules over U_q(sl2): an optional Verma head `M(mu + c)`
//! tensored with a chain of finite irreducibles `V_k`, enumerated bases per
//! level, and the generator actions of `K`, `E`, `F`.
//!
//! Conventions (generic highest weight `t = q^mu`):
//! - `V_k`: `K v_b = q^{k-2b} v_b`, `E v_b = [b] v_{b-1}`, `F v_b = [k-b] v_{b+1}`
//!   with `v_{-1} = v_{k+1} = 0`;
//! - `M(mu + c)`: `K v_i = q^{mu+c-2i} v_i`, `E v_i = [i] v_{i-1}`,
//!   `F v_i = [mu+c-i] v_{i+1}`;
//! - tensor factors couple through `Delta(K) = K (x) K`,
//!   `Delta(E) = E (x) K + 1 (x) E`, `Delta(F) = F (x) 1 + K^{-1} (x) F`;
//! - the empty tensor product is the trivial module: `K` acts by 1,
//!   `E` and `F` act by 0.
//!
//! The level of a basis vector is the sum of its indices; every generator
//! action changes the level by a fixed amount (`K`: 0, `E`: -1, `F`: +1).

use crate::scalar::{quantum_bracket, Monomial, Rational, Scalar};
use num::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Tensor product shape: optional Verma head with highest weight `mu + verma_shift`,
/// followed by irreducible factors `V_k` for each `k` in `tail`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleShape {
    pub verma_shift: Option<i64>,
    pub tail: Vec<usize>,
}

impl ModuleShape {
    /// The trivial module (empty tensor product).
    pub fn trivial() -> Self {
        ModuleShape {
            verma_shift: None,
            tail: Vec::new(),
        }
    }

    /// `M(mu + shift)`.
    pub fn verma(shift: i64) -> Self {
        ModuleShape {
            verma_shift: Some(shift),
            tail: Vec::new(),
        }
    }

    /// `V_1^{(x) n}` (no Verma head).
    pub fn strands(n: usize) -> Self {
        ModuleShape {
            verma_shift: None,
            tail: vec![1; n],
        }
    }

    /// `M(mu + shift) (x) V_1^{(x) n}`.
    pub fn verma_chain(shift: i64, n: usize) -> Self {
        ModuleShape {
            verma_shift: Some(shift),
            tail: vec![1; n],
        }
    }

    pub fn with_appended(&self, ks: &[usize]) -> Self {
        let mut tail = self.tail.clone();
        tail.extend_from_slice(ks);
        ModuleShape {
            verma_shift: self.verma_shift,
            tail,
        }
    }

    pub fn has_head(&self) -> bool {
        self.verma_shift.is_some()
    }

    /// Number of index slots in a basis tuple.
    pub fn index_len(&self) -> usize {
        self.tail.len() + usize::from(self.has_head())
    }

    /// Largest nonempty level, `None` for Verma-headed (unbounded) shapes.
    pub fn max_level(&self) -> Option<i64> {
        if self.has_head() {
            None
        } else {
            Some(self.tail.iter().sum::<usize>() as i64)
        }
    }

    fn factors(&self) -> Vec<Factor> {
        let mut fs = Vec::with_capacity(self.index_len());
        if let Some(c) = self.verma_shift {
            fs.push(Factor::Verma(c));
        }
        fs.extend(self.tail.iter().map(|&k| Factor::Irrep(k)));
        fs
    }

    pub fn is_valid_index(&self, v: &BasisIndex) -> bool {
        if v.0.len() != self.index_len() {
            return false;
        }
        let head = usize::from(self.has_head());
        self.tail.iter().zip(&v.0[head..]).all(|(&k, &b)| b <= k)
    }

    /// All basis vectors of the given level in ascending lexicographic order.
    pub fn enumerate_basis(&self, level: i64) -> Vec<BasisIndex> {
        if level < 0 {
            return Vec::new();
        }
        let level = level as usize;
        let mut out = Vec::new();
        if self.has_head() {
            for i in 0..=level {
                for tail in tail_combos(&self.tail, level - i) {
                    let mut idx = Vec::with_capacity(self.index_len());
                    idx.push(i);
                    idx.extend(tail);
                    out.push(BasisIndex(idx));
                }
            }
        } else {
            out.extend(tail_combos(&self.tail, level).into_iter().map(BasisIndex));
        }
        out
    }

    pub fn level_dim(&self, level: i64) -> usize {
        self.enumerate_basis(level).len()
    }
}

impl fmt::Display for ModuleShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(c) = self.verma_shift {
            match c {
                0 => parts.push("M(u)".to_string()),
                c if c > 0 => parts.push(format!("M(u+{c})")),
                c => parts.push(format!("M(u{c})")),
            }
        }
        for k in &self.tail {
            parts.push(format!("V{k}"));
        }
        if parts.is_empty() {
            write!(f, "C(q)")
        } else {
            write!(f, "{}", parts.join("@"))
        }
    }
}

fn tail_combos(ks: &[usize], sum: usize) -> Vec<Vec<usize>> {
    match ks.split_first() {
        None => {
            if sum == 0 {
                vec![Vec::new()]
            } else {
                Vec::new()
            }
        }
        Some((&k, rest)) => {
            let mut out = Vec::new();
            for b in 0..=k.min(sum) {
                for mut tail in tail_combos(rest, sum - b) {
                    tail.insert(0, b);
                    out.push(tail);
                }
            }
            out
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Factor {
    Verma(i64),
    Irrep(usize),
}

/// Index tuple of a basis vector; the Verma index comes first when present.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BasisIndex(pub Vec<usize>);

impl BasisIndex {
    pub fn level(&self) -> i64 {
        self.0.iter().sum::<usize>() as i64
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "v[{}]",
            self.0
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// `K`-eigenvalue exponents: the weight is `q^q_exp * t^t_exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Weight {
    pub q_exp: i64,
    pub t_exp: i64,
}

impl Weight {
    pub fn monomial(&self) -> Monomial {
        Monomial::new(self.q_exp, self.t_exp, 0)
    }

    pub fn scalar(&self) -> Scalar {
        Scalar::monomial(Rational::one(), self.monomial())
    }

    fn inv(&self) -> Weight {
        Weight {
            q_exp: -self.q_exp,
            t_exp: -self.t_exp,
        }
    }
}

/// Generators of U_q(sl2) acting on any shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    K,
    E,
    F,
}

impl Gen {
    /// Change of level caused by the action.
    pub fn level_shift(&self) -> i64 {
        match self {
            Gen::K => 0,
            Gen::E => -1,
            Gen::F => 1,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::K => write!(f, "K"),
            Gen::E => write!(f, "E"),
            Gen::F => write!(f, "F"),
        }
    }
}

/// Finite linear combination of basis vectors of one shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinComb {
    shape: ModuleShape,
    terms: BTreeMap<BasisIndex, Scalar>,
}

impl LinComb {
    pub fn zero(shape: ModuleShape) -> Self {
        LinComb {
            shape,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(shape: ModuleShape, idx: BasisIndex, coeff: Scalar) -> Self {
        debug_assert!(
            shape.is_valid_index(&idx),
            "index {idx} invalid for {shape}"
        );
        let mut lc = LinComb::zero(shape);
        lc.add_term(idx, coeff);
        lc
    }

    pub fn basis_vector(shape: ModuleShape, idx: BasisIndex) -> Self {
        LinComb::single(shape, idx, Scalar::one())
    }

    pub fn shape(&self) -> &ModuleShape {
        &self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &BasisIndex) -> Scalar {
        self.terms.get(idx).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, idx: BasisIndex, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        debug_assert!(self.shape.is_valid_index(&idx));
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &LinComb) -> LinComb {
        assert_eq!(self.shape, other.shape, "shape mismatch in LinComb::add");
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LinComb) -> LinComb {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> LinComb {
        if c.is_zero() {
            return LinComb::zero(self.shape.clone());
        }
        LinComb {
            shape: self.shape.clone(),
            terms: self
                .terms
                .iter()
                .map(|(i, k)| (i.clone(), k.mul(c)))
                .collect(),
        }
    }
}

impl fmt::Display for LinComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(i, c)| format!("({c})*{i}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Weight (K-eigenvalue exponents) of a basis vector.
pub fn weight_of(shape: &ModuleShape, v: &BasisIndex) -> Weight {
    assert!(shape.is_valid_index(v), "index {v} invalid for {shape}");
    let mut w = Weight { q_exp: 0, t_exp: 0 };
    for (f, &i) in shape.factors().iter().zip(&v.0) {
        let fw = factor_weight(f, i);
        w.q_exp += fw.q_exp;
        w.t_exp += fw.t_exp;
    }
    w
}

fn factor_weight(f: &Factor, i: usize) -> Weight {
    match f {
        Factor::Verma(c) => Weight {
            q_exp: c - 2 * i as i64,
            t_exp: 1,
        },
        Factor::Irrep(k) => Weight {
            q_exp: *k as i64 - 2 * i as i64,
            t_exp: 0,
        },
    }
}

/// Action of a generator on a basis vector, expanded through the coproduct.
pub fn act_generator(shape: &ModuleShape, g: Gen, v: &BasisIndex) -> LinComb {
    assert!(shape.is_valid_index(v), "index {v} invalid for {shape}");
    let mut out = LinComb::zero(shape.clone());
    for (idx, coeff) in act_factors(&shape.factors(), g, &v.0) {
        out.add_term(BasisIndex(idx), coeff);
    }
    out
}

fn act_factors(factors: &[Factor], g: Gen, idx: &[usize]) -> Vec<(Vec<usize>, Scalar)> {
    match factors.split_first() {
        // trivial module: counit values K -> 1, E -> 0, F -> 0
        None => match g {
            Gen::K => vec![(Vec::new(), Scalar::one())],
            Gen::E | Gen::F => Vec::new(),
        },
        Some((first, rest)) => {
            let (i, tail_idx) = (idx[0], &idx[1..]);
            match g {
                Gen::K => {
                    let total: Weight = {
                        let mut w = factor_weight(first, i);
                        for (f, &b) in rest.iter().zip(tail_idx) {
                            let fw = factor_weight(f, b);
                            w.q_exp += fw.q_exp;
                            w.t_exp += fw.t_exp;
                        }
                        w
                    };
                    vec![(idx.to_vec(), total.scalar())]
                }
                Gen::E => {
                    // E (x) K + 1 (x) E
                    let mut out = Vec::new();
                    let rest_weight: Weight = {
                        let mut w = Weight { q_exp: 0, t_exp: 0 };
                        for (f, &b) in rest.iter().zip(tail_idx) {
                            let fw = factor_weight(f, b);
                            w.q_exp += fw.q_exp;
                            w.t_exp += fw.t_exp;
                        }
                        w
                    };
                    for (i2, c) in act_single(first, Gen::E, i) {
                        let mut v = vec![i2];
                        v.extend_from_slice(tail_idx);
                        out.push((v, c.mul(&rest_weight.scalar())));
                    }
                    for (tail2, c) in act_factors(rest, Gen::E, tail_idx) {
                        let mut v = vec![i];
                        v.extend(tail2);
                        out.push((v, c));
                    }
                    out
                }
                Gen::F => {
                    // F (x) 1 + K^{-1} (x) F
                    let mut out = Vec::new();
                    for (i2, c) in act_single(first, Gen::F, i) {
                        let mut v = vec![i2];
                        v.extend_from_slice(tail_idx);
                        out.push((v, c));
                    }
                    let kinv = factor_weight(first, i).inv().scalar();
                    for (tail2, c) in act_factors(rest, Gen::F, tail_idx) {
                        let mut v = vec![i];
                        v.extend(tail2);
                        out.push((v, c.mul(&kinv)));
                    }
                    out
                }
            }
        }
    }
}

fn act_single(f: &Factor, g: Gen, i: usize) -> Vec<(usize, Scalar)> {
    match (f, g) {
        (_, Gen::K) => vec![(i, factor_weight(f, i).scalar())],
        (Factor::Verma(_), Gen::E) | (Factor::Irrep(_), Gen::E) => {
            if i == 0 {
                Vec::new()
            } else {
                // E v_i = [i] v_{i-1}
                vec![(i - 1, quantum_bracket(0, 0, i as i64))]
            }
        }
        (Factor::Verma(c), Gen::F) => {
            // F v_i = [mu + c - i] v_{i+1}
            vec![(i + 1, quantum_bracket(1, 0, c - i as i64))]
        }
        (Factor::Irrep(k), Gen::F) => {
            if i >= *k {
                Vec::new()
            } else {
                // F v_i = [k - i] v_{i+1}
                vec![(i + 1, quantum_bracket(0, 0, (*k - i) as i64))]
            }
        }
    }
}
