//! Symbolic verification on a generic Verma basis index.
//!
//! Vectors are `v_{i+d} (x) v_{b_1} (x) ... (x) v_{b_k}` where `i` is a
//! formal index realized as the scalar variable `s = q^i` and `d` is a small
//! integer offset. Generator actions and the structural maps `E_mu`, `F_mu`,
//! `ev`, `coev` all have coefficients in `Q(q, t, s)`, so the identities
//! checked concretely level by level elsewhere become polynomial identities
//! here: one zero residual covers every admissible index at once.
//!
//! Distinct formal vectors are treated as linearly independent, which is
//! valid for large `i`. Small indices are covered separately: substituting
//! `s -> q^{i0}` must reproduce the concrete computation, with terms whose
//! head index leaves the module forced to carry a vanishing coefficient.

use crate::maps::BlockedMap;
use crate::operators::{coev_map, e_mu, ev_map, f_mu, f_mu_perturbed, pad, Mutation};
use crate::repmod::{BasisIndex, Gen, LinComb, ModuleShape};
use crate::report::{lincomb_json, Counterexample, VerificationReport};
use crate::scalar::{quantum_bracket, Scalar};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProverError {
    #[error("term {vector} leaves the module at index {index} with nonzero coefficient {coeff}")]
    BoundaryResidue {
        vector: String,
        index: i64,
        coeff: String,
    },
}

/// `M(mu + shift) (x) V1^{(x) strands}` with a symbolic head index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormalShape {
    pub shift: i64,
    pub strands: usize,
}

impl FormalShape {
    pub fn new(shift: i64, strands: usize) -> Self {
        FormalShape { shift, strands }
    }

    pub fn concrete(&self) -> ModuleShape {
        ModuleShape::verma_chain(self.shift, self.strands)
    }
}

/// `v_{i+offset} (x) v_{b_1} (x) ...` for a generic index `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FormalVector {
    pub offset: i64,
    pub bits: Vec<usize>,
}

impl FormalVector {
    pub fn new(offset: i64, bits: &[usize]) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "tail factors are V1");
        FormalVector {
            offset,
            bits: bits.to_vec(),
        }
    }
}

impl fmt::Display for FormalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v[i")?;
        match self.offset.cmp(&0) {
            std::cmp::Ordering::Greater => write!(f, "+{}", self.offset)?,
            std::cmp::Ordering::Less => write!(f, "{}", self.offset)?,
            std::cmp::Ordering::Equal => {}
        }
        for b in &self.bits {
            write!(f, ", {b}")?;
        }
        write!(f, "]")
    }
}

/// Finite sum of formal vectors with `Scalar` coefficients; zero
/// coefficients are dropped on insertion.
#[derive(Clone, Debug)]
pub struct FormalLinComb {
    shape: FormalShape,
    terms: BTreeMap<FormalVector, Scalar>,
}

impl FormalLinComb {
    pub fn zero(shape: FormalShape) -> Self {
        FormalLinComb {
            shape,
            terms: BTreeMap::new(),
        }
    }

    /// The generic basis vector `v_i (x) v_{b_1} (x) ...` of the shape.
    pub fn generator(shape: FormalShape, bits: &[usize]) -> Self {
        assert_eq!(bits.len(), shape.strands);
        let mut out = FormalLinComb::zero(shape);
        out.add_term(FormalVector::new(0, bits), Scalar::one());
        out
    }

    pub fn shape(&self) -> FormalShape {
        self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormalVector, &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, v: FormalVector, c: Scalar) {
        assert_eq!(v.bits.len(), self.shape.strands, "wrong number of factors");
        let total = match self.terms.get(&v) {
            Some(old) => old + &c,
            None => c,
        };
        if total.is_zero() {
            self.terms.remove(&v);
        } else {
            self.terms.insert(v, total);
        }
    }

    pub fn add(&self, other: &FormalLinComb) -> FormalLinComb {
        assert_eq!(self.shape, other.shape);
        let mut out = self.clone();
        for (v, c) in other.terms() {
            out.add_term(v.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FormalLinComb) -> FormalLinComb {
        assert_eq!(self.shape, other.shape);
        let mut out = self.clone();
        for (v, c) in other.terms() {
            out.add_term(v.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> FormalLinComb {
        let mut out = FormalLinComb::zero(self.shape);
        for (v, a) in self.terms() {
            out.add_term(v.clone(), a.mul(c));
        }
        out
    }
}

impl fmt::Display for FormalLinComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (v, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) {v}")?;
        }
        Ok(())
    }
}

pub fn formal_json(x: &FormalLinComb) -> Value {
    Value::Array(
        x.terms()
            .map(|(v, c)| json!([v.to_string(), c.to_string()]))
            .collect(),
    )
}

fn head_k(shift: i64, offset: i64) -> Scalar {
    // K on v_{i+d} in M(mu+c): q^{mu+c-2(i+d)} = q^{c-2d} t s^{-2}
    Scalar::q_pow(shift - 2 * offset)
        .mul(&Scalar::t_pow(1))
        .mul(&Scalar::s_pow(-2))
}

fn bit_k(b: usize) -> Scalar {
    Scalar::q_pow(1 - 2 * b as i64)
}

/// Generator action on one formal basis vector, with the same right-nested
/// coproduct expansion as the concrete module action.
pub fn formal_act_basis(g: Gen, shape: FormalShape, v: &FormalVector) -> FormalLinComb {
    let d = v.offset;
    let c = shape.shift;
    let mut out = FormalLinComb::zero(shape);
    match g {
        Gen::K => {
            let mut coeff = head_k(c, d);
            for &b in &v.bits {
                coeff = coeff.mul(&bit_k(b));
            }
            out.add_term(v.clone(), coeff);
        }
        Gen::E => {
            // E on factor j, K on everything to its right
            let right_k = |from: usize| {
                v.bits[from..]
                    .iter()
                    .fold(Scalar::one(), |acc, &b| acc.mul(&bit_k(b)))
            };
            // head: E v_{i+d} = [i+d] v_{i+d-1}
            out.add_term(
                FormalVector::new(d - 1, &v.bits),
                quantum_bracket(0, 1, d).mul(&right_k(0)),
            );
            for (p, &b) in v.bits.iter().enumerate() {
                if b == 1 {
                    let mut bits = v.bits.clone();
                    bits[p] = 0;
                    out.add_term(FormalVector::new(d, &bits), right_k(p + 1));
                }
            }
        }
        Gen::F => {
            // F on factor j, K^{-1} on everything to its left
            let head_k_inv = head_k(c, d).inv().expect("monomial");
            let left_k_inv = |upto: usize| {
                v.bits[..upto].iter().fold(head_k_inv.clone(), |acc, &b| {
                    acc.mul(&bit_k(b).inv().expect("monomial"))
                })
            };
            // head: F v_{i+d} = [mu+c-i-d] v_{i+d+1}
            out.add_term(
                FormalVector::new(d + 1, &v.bits),
                quantum_bracket(1, -1, c - d),
            );
            for (p, &b) in v.bits.iter().enumerate() {
                if b == 0 {
                    let mut bits = v.bits.clone();
                    bits[p] = 1;
                    out.add_term(FormalVector::new(d, &bits), left_k_inv(p));
                }
            }
        }
    }
    out
}

/// Linear extension of `formal_act_basis`.
pub fn formal_act(g: Gen, x: &FormalLinComb) -> FormalLinComb {
    let mut out = FormalLinComb::zero(x.shape());
    for (v, c) in x.terms() {
        out = out.add(&formal_act_basis(g, x.shape(), v).scale(c));
    }
    out
}

/// Structural maps with symbolic coefficients. `EMu`/`FMu` act on the head
/// and the first strand and leave remaining strands untouched; `EvTail` and
/// `CoevTail` contract or insert the last two strands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormalOp {
    EMu(i64),
    FMu(i64),
    FMuPerturbed(i64),
    EvTail,
    CoevTail,
}

impl FormalOp {
    pub fn output_shape(&self, input: FormalShape) -> FormalShape {
        match self {
            FormalOp::EMu(c) => {
                assert_eq!(input.shift, *c, "E needs head M(mu+{c})");
                assert!(input.strands >= 1, "E consumes one strand");
                FormalShape::new(c + 1, input.strands - 1)
            }
            FormalOp::FMu(c) | FormalOp::FMuPerturbed(c) => {
                assert_eq!(input.shift, c + 1, "F needs head M(mu+{})", c + 1);
                FormalShape::new(*c, input.strands + 1)
            }
            FormalOp::EvTail => {
                assert!(input.strands >= 2, "ev contracts two strands");
                FormalShape::new(input.shift, input.strands - 2)
            }
            FormalOp::CoevTail => FormalShape::new(input.shift, input.strands + 2),
        }
    }
}

pub fn formal_apply(op: FormalOp, x: &FormalLinComb) -> FormalLinComb {
    let out_shape = op.output_shape(x.shape());
    let mut out = FormalLinComb::zero(out_shape);
    for (v, coeff) in x.terms() {
        let d = v.offset;
        match op {
            FormalOp::EMu(_) => {
                // E_mu(v_{i+d, 0}) = q^{i+d} v_{i+d}, E_mu(v_{i+d, 1}) = v_{i+d+1}
                let rest = &v.bits[1..];
                match v.bits[0] {
                    0 => out.add_term(
                        FormalVector::new(d, rest),
                        coeff.mul(&Scalar::q_pow(d)).mul(&Scalar::s_pow(1)),
                    ),
                    _ => out.add_term(FormalVector::new(d + 1, rest), coeff.clone()),
                }
            }
            FormalOp::FMu(c) | FormalOp::FMuPerturbed(c) => {
                // F_mu(v_{i+d}) = [mu+c+1-i-d] v_{i+d, 0}
                //               + q^{i+d-mu-c-1} [i+d] v_{i+d-1, 1}
                let mut bits0 = vec![0];
                bits0.extend_from_slice(&v.bits);
                out.add_term(
                    FormalVector::new(d, &bits0),
                    coeff.mul(&quantum_bracket(1, -1, c + 1 - d)),
                );
                let mut bits1 = vec![1];
                bits1.extend_from_slice(&v.bits);
                let e = d - c - 1 + i64::from(matches!(op, FormalOp::FMuPerturbed(_)));
                let second = Scalar::q_pow(e)
                    .mul(&Scalar::s_pow(1))
                    .mul(&Scalar::t_pow(-1))
                    .mul(&quantum_bracket(0, 1, d));
                out.add_term(FormalVector::new(d - 1, &bits1), coeff.mul(&second));
            }
            FormalOp::EvTail => {
                let n = v.bits.len();
                let kept = &v.bits[..n - 2];
                match (v.bits[n - 2], v.bits[n - 1]) {
                    (0, 1) => {
                        out.add_term(FormalVector::new(d, kept), coeff.mul(&-Scalar::q_pow(1)))
                    }
                    (1, 0) => out.add_term(FormalVector::new(d, kept), coeff.clone()),
                    _ => {}
                }
            }
            FormalOp::CoevTail => {
                let mut bits01 = v.bits.clone();
                bits01.extend_from_slice(&[0, 1]);
                out.add_term(FormalVector::new(d, &bits01), coeff.clone());
                let mut bits10 = v.bits.clone();
                bits10.extend_from_slice(&[1, 0]);
                out.add_term(
                    FormalVector::new(d, &bits10),
                    coeff.mul(&-Scalar::q_pow(-1)),
                );
            }
        }
    }
    out
}

pub fn apply_pipeline(ops: &[FormalOp], x: &FormalLinComb) -> FormalLinComb {
    ops.iter()
        .fold(x.clone(), |acc, op| formal_apply(*op, &acc))
}

/// Substitute `s -> q^{i0}` and map each formal vector to the concrete basis
/// index with head `i0 + offset`. A term whose head index falls below 0 has
/// no concrete counterpart; it is dropped when its specialized coefficient
/// vanishes and reported as an error otherwise.
pub fn specialize_formal(x: &FormalLinComb, i0: i64) -> Result<LinComb, ProverError> {
    let shape = x.shape().concrete();
    let mut out = LinComb::zero(shape);
    for (v, c) in x.terms() {
        let head = i0 + v.offset;
        let coeff = c.subst_s(i0);
        if head < 0 {
            if coeff.is_zero() {
                continue;
            }
            return Err(ProverError::BoundaryResidue {
                vector: v.to_string(),
                index: head,
                coeff: coeff.to_string(),
            });
        }
        let mut idx = vec![head as usize];
        idx.extend_from_slice(&v.bits);
        out.add_term(BasisIndex(idx), coeff);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProveTarget {
    EMu,
    FMu,
}

impl ProveTarget {
    pub fn parse(name: &str) -> Option<ProveTarget> {
        match name {
            "E_mu" => Some(ProveTarget::EMu),
            "F_mu" => Some(ProveTarget::FMu),
            _ => None,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            ProveTarget::EMu => "E_mu",
            ProveTarget::FMu => "F_mu",
        }
    }

    fn op(&self, mutation: Option<Mutation>) -> FormalOp {
        match self {
            ProveTarget::EMu => FormalOp::EMu(0),
            ProveTarget::FMu => {
                if mutation == Some(Mutation::PerturbFMu) {
                    FormalOp::FMuPerturbed(0)
                } else {
                    FormalOp::FMu(0)
                }
            }
        }
    }

    fn domain(&self) -> FormalShape {
        match self {
            ProveTarget::EMu => FormalShape::new(0, 1),
            ProveTarget::FMu => FormalShape::new(1, 0),
        }
    }
}

fn formal_report(claim: String, inputs: &[(String, FormalLinComb)]) -> VerificationReport {
    let start = Instant::now();
    for (input, residual) in inputs {
        if !residual.is_zero() {
            let ms = start.elapsed().as_millis() as u64;
            return VerificationReport::fail(
                claim,
                0,
                Counterexample {
                    level: None,
                    vector: json!(input),
                    residual: formal_json(residual),
                },
                ms,
            );
        }
    }
    VerificationReport::pass(claim, 0, start.elapsed().as_millis() as u64)
}

/// Check `X . target = target . X` on every generic domain vector, as an
/// identity of formal linear combinations.
pub fn prove_commutation(
    target: ProveTarget,
    g: Gen,
    mutation: Option<Mutation>,
) -> VerificationReport {
    let op = target.op(mutation);
    let shape = target.domain();
    let families: Vec<Vec<usize>> = match shape.strands {
        0 => vec![vec![]],
        _ => vec![vec![0], vec![1]],
    };
    let mut residuals = Vec::new();
    for bits in families {
        let v = FormalLinComb::generator(shape, &bits);
        let lhs = formal_apply(op, &formal_act(g, &v));
        let rhs = formal_act(g, &formal_apply(op, &v));
        residuals.push((FormalVector::new(0, &bits).to_string(), lhs.sub(&rhs)));
    }
    formal_report(format!("prove.{}.{}", target.label(), g), &residuals)
}

/// The three structural identities on the generic `v_i`:
/// `E_mu . F_mu = [mu+1] Id`, `(Id (x) ev) . (F_mu (x) Id) . F_(mu+1) = 0`,
/// `E_(mu+1) . (E_mu (x) Id) . (Id (x) coev) = 0`.
pub fn prove_lemmas(mutation: Option<Mutation>) -> Vec<VerificationReport> {
    let perturbed = mutation == Some(Mutation::PerturbFMu);
    let fmu = |c: i64| {
        if perturbed {
            FormalOp::FMuPerturbed(c)
        } else {
            FormalOp::FMu(c)
        }
    };
    let mut out = Vec::new();

    let v = FormalLinComb::generator(FormalShape::new(1, 0), &[]);
    let image = apply_pipeline(&[fmu(0), FormalOp::EMu(0)], &v);
    let residual = image.sub(&v.scale(&quantum_bracket(1, 0, 1)));
    out.push(formal_report(
        "prove.lemma.ef".into(),
        &[("v[i]".into(), residual)],
    ));

    let v = FormalLinComb::generator(FormalShape::new(2, 0), &[]);
    let image = apply_pipeline(&[fmu(1), fmu(0), FormalOp::EvTail], &v);
    out.push(formal_report(
        "prove.lemma.ev_ff_zero".into(),
        &[("v[i]".into(), image)],
    ));

    let v = FormalLinComb::generator(FormalShape::new(0, 0), &[]);
    let image = apply_pipeline(
        &[FormalOp::CoevTail, FormalOp::EMu(0), FormalOp::EMu(1)],
        &v,
    );
    out.push(formal_report(
        "prove.lemma.ee_coev_zero".into(),
        &[("v[i]".into(), image)],
    ));
    out
}

/// The full symbolic suite: six commutation checks and three structural
/// identities, nine reports in a fixed order.
pub fn prove_all(mutation: Option<Mutation>) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    for target in [ProveTarget::EMu, ProveTarget::FMu] {
        for g in [Gen::K, Gen::E, Gen::F] {
            out.push(prove_commutation(target, g, mutation));
        }
    }
    out.extend(prove_lemmas(mutation));
    out
}

type Pipeline = Box<dyn Fn(&FormalLinComb) -> FormalLinComb + Send + Sync>;

/// A formal computation paired with the concrete map it must agree with
/// after `s -> q^{i0}`.
pub struct AgreementCase {
    pub name: String,
    pub domain: FormalShape,
    formal: Pipeline,
    concrete: BlockedMap,
}

/// The generator actions and every map the symbolic suite exercises.
pub fn agreement_cases() -> Vec<AgreementCase> {
    let mut out = Vec::new();
    let act_shape = FormalShape::new(0, 1);
    for g in [Gen::K, Gen::E, Gen::F] {
        out.push(AgreementCase {
            name: format!("act.{g}"),
            domain: act_shape,
            formal: Box::new(move |x| formal_act(g, x)),
            concrete: BlockedMap::action(&act_shape.concrete(), g),
        });
    }
    let ops: Vec<(&str, FormalShape, Vec<FormalOp>, BlockedMap)> = vec![
        (
            "E_mu",
            FormalShape::new(0, 1),
            vec![FormalOp::EMu(0)],
            e_mu(0),
        ),
        (
            "F_mu",
            FormalShape::new(1, 0),
            vec![FormalOp::FMu(0)],
            f_mu(0),
        ),
        (
            "F_mu_perturbed",
            FormalShape::new(1, 0),
            vec![FormalOp::FMuPerturbed(0)],
            f_mu_perturbed(0),
        ),
        (
            "lemma.ef",
            FormalShape::new(1, 0),
            vec![FormalOp::FMu(0), FormalOp::EMu(0)],
            e_mu(0).compose(&f_mu(0)).expect("shapes agree"),
        ),
        (
            "lemma.ev_ff",
            FormalShape::new(2, 0),
            vec![FormalOp::FMu(1), FormalOp::FMu(0), FormalOp::EvTail],
            pad(&ev_map(), true, 0)
                .expect("pad")
                .compose(
                    &pad(&f_mu(0), false, 1)
                        .expect("pad")
                        .compose(&f_mu(1))
                        .expect("shapes agree"),
                )
                .expect("shapes agree"),
        ),
        (
            "lemma.ee_coev",
            FormalShape::new(0, 0),
            vec![FormalOp::CoevTail, FormalOp::EMu(0), FormalOp::EMu(1)],
            e_mu(1)
                .compose(
                    &pad(&e_mu(0), false, 1)
                        .expect("pad")
                        .compose(&pad(&coev_map(), true, 0).expect("pad"))
                        .expect("shapes agree"),
                )
                .expect("shapes agree"),
        ),
    ];
    for (name, domain, pipeline, concrete) in ops {
        out.push(AgreementCase {
            name: name.to_string(),
            domain,
            formal: Box::new(move |x| apply_pipeline(&pipeline, x)),
            concrete,
        });
    }
    out
}

/// Check one case at one index: specialize the formal image of every generic
/// basis family at `i0` and compare with the concrete map's image.
pub fn check_agreement(case: &AgreementCase, i0: i64) -> Option<Counterexample> {
    assert!(i0 >= 0);
    let families: Vec<Vec<usize>> = match case.domain.strands {
        0 => vec![vec![]],
        1 => vec![vec![0], vec![1]],
        _ => unreachable!("agreement cases use at most one strand"),
    };
    for bits in families {
        let generic = FormalLinComb::generator(case.domain, &bits);
        let image = (case.formal)(&generic);
        let mut idx = vec![i0 as usize];
        idx.extend_from_slice(&bits);
        let concrete = case.concrete.apply_basis(&BasisIndex(idx.clone()));
        match specialize_formal(&image, i0) {
            Ok(specialized) => {
                if specialized != concrete {
                    return Some(Counterexample {
                        level: Some(i0),
                        vector: json!(BasisIndex(idx)),
                        residual: lincomb_json(&specialized.sub(&concrete)),
                    });
                }
            }
            Err(e) => {
                return Some(Counterexample {
                    level: Some(i0),
                    vector: json!(BasisIndex(idx)),
                    residual: json!(e.to_string()),
                });
            }
        }
    }
    None
}

/// One report per agreement case, each checked at every index in `i0s`.
pub fn verify_agreement(i0s: &[i64]) -> Vec<VerificationReport> {
    let depth = i0s.iter().copied().max().unwrap_or(0);
    agreement_cases()
        .into_iter()
        .map(|case| {
            let start = Instant::now();
            let failure = i0s.iter().find_map(|&i0| check_agreement(&case, i0));
            let ms = start.elapsed().as_millis() as u64;
            let claim = format!("prove.agree.{}", case.name);
            match failure {
                None => VerificationReport::pass(claim, depth, ms),
                Some(ce) => VerificationReport::fail(claim, depth, ce, ms),
            }
        })
        .collect()
}
