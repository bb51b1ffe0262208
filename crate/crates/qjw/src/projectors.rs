//! Jones-Wenzl projectors, their extension to a Verma-headed chain, and the
//! verification drivers that turn the defining identities into reports.
//!
//! Classical projector on `V1^{(x) n}` (loop value `-[2]`):
//! `P'_1 = Id`, `P'_n = A + ([n-1]/[n]) A . e_{n-1} . A` with
//! `A = P'_{n-1} (x) Id`.
//!
//! Extended projector on `M(mu) (x) V1^{(x) n}`:
//! `P_n = (f_tower(n) . e_tower(n)) / ([mu+1]...[mu+n])`.
//!
//! Verified identities:
//! - `P'_n` is idempotent and kills every `e_i` on both sides;
//! - `P_n` is idempotent and satisfies `ev_i . P_n = 0`, `P_n . coev_i = 0`
//!   for `i = 1..n-1`;
//! - derived diagnostics: `e_tower(n) . f_tower(n)` is multiplication by
//!   `[mu+1]...[mu+n]`, and each level block of `P_n` has trace 1 and rank 1.

use crate::maps::{BlockedMap, CheckMode};
use crate::operators::{
    coev_i, e_tower, ev_i, f_tower_inner, pad, tl_e, tower_normalizer, Mutation,
};
use crate::repmod::ModuleShape;
use crate::report::{Counterexample, VerificationReport};
use crate::scalar::{quantum_bracket, Scalar, ScalarError};
use rayon::prelude::*;
use serde_json::json;
use std::time::Instant;

/// Classical Jones-Wenzl projector on `V1^{(x) n}`, `n >= 1`.
pub fn jw(n: usize) -> BlockedMap {
    jw_inner(n, false)
}

fn jw_inner(n: usize, sign_flipped: bool) -> BlockedMap {
    assert!(n >= 1, "jw needs at least one strand");
    let mut p = BlockedMap::identity(&ModuleShape::strands(1));
    for m in 2..=n {
        let a = pad(&p, false, 1).expect("jw embeds into one more strand");
        let e = tl_e(m, m - 1).expect("e_{m-1} exists on m strands");
        let coeff = quantum_bracket(0, 0, m as i64 - 1)
            .div(&quantum_bracket(0, 0, m as i64))
            .expect("[m] is invertible");
        let coeff = if sign_flipped { -coeff } else { coeff };
        let aea = a
            .compose(&e.compose(&a).expect("shapes agree"))
            .expect("shapes agree");
        p = a.add(&aea.scale(&coeff)).expect("shapes agree");
    }
    p
}

/// Extended Jones-Wenzl projector on `M(mu) (x) V1^{(x) n}`, `n >= 1`.
pub fn ejw(n: usize) -> BlockedMap {
    ejw_inner(n, None)
}

fn ejw_inner(n: usize, mutation: Option<Mutation>) -> BlockedMap {
    assert!(n >= 1, "ejw needs at least one strand");
    let perturbed = mutation == Some(Mutation::PerturbFMu);
    let composite = f_tower_inner(n, perturbed)
        .compose(&e_tower(n))
        .expect("towers compose");
    if mutation == Some(Mutation::DropEjwNormalizer) {
        return composite;
    }
    let norm = tower_normalizer(n)
        .inv()
        .expect("generic bracket product is invertible");
    composite.scale(&norm)
}

fn timed<F: FnOnce() -> Result<Option<Counterexample>, ScalarError>>(
    claim: &str,
    depth: i64,
    f: F,
) -> VerificationReport {
    let start = Instant::now();
    let outcome = f();
    let ms = start.elapsed().as_millis() as u64;
    match outcome {
        Ok(None) => VerificationReport::pass(claim, depth, ms),
        Ok(Some(ce)) => VerificationReport::fail(claim, depth, ce, ms),
        Err(e) => VerificationReport::fail(
            claim,
            depth,
            Counterexample {
                level: None,
                vector: json!("specialization"),
                residual: json!(e.to_string()),
            },
            ms,
        ),
    }
}

fn compare(
    lhs: &BlockedMap,
    rhs: &BlockedMap,
    depth: i64,
    mode: &CheckMode,
) -> Result<Option<Counterexample>, ScalarError> {
    Ok(lhs
        .first_difference(rhs, depth, mode)?
        .map(|d| Counterexample::from_difference(&d)))
}

fn compare_zero(
    m: &BlockedMap,
    depth: i64,
    mode: &CheckMode,
) -> Result<Option<Counterexample>, ScalarError> {
    let z = BlockedMap::zero(m.domain(), m.codomain(), m.level_shift());
    compare(m, &z, depth, mode)
}

/// Verify the classical projector: idempotency plus `e_i P' = P' e_i = 0`
/// for `i = 1..n-1`, as exact identities on all of `V1^{(x) n}`.
pub fn verify_jw(
    n: usize,
    mode: &CheckMode,
    mutation: Option<Mutation>,
) -> Vec<VerificationReport> {
    assert!(n >= 1);
    let depth = n as i64;
    let p = jw_inner(n, mutation == Some(Mutation::JwSignFlip));
    let mut claims: Vec<Claim> = Vec::new();
    {
        let p2 = p.clone();
        let m = mode.clone();
        claims.push((
            format!("jw[{n}].idempotent"),
            Box::new(move || {
                let sq = p2.compose(&p2).expect("endomorphism composes");
                compare(&sq, &p2, depth, &m)
            }),
        ));
    }
    for i in 1..n {
        let p2 = p.clone();
        let m = mode.clone();
        claims.push((
            format!("jw[{n}].e[{i}]_left"),
            Box::new(move || {
                let e = tl_e(n, i).expect("index in range");
                compare_zero(&e.compose(&p2).expect("shapes agree"), depth, &m)
            }),
        ));
        let p3 = p.clone();
        let m = mode.clone();
        claims.push((
            format!("jw[{n}].e[{i}]_right"),
            Box::new(move || {
                let e = tl_e(n, i).expect("index in range");
                compare_zero(&p3.compose(&e).expect("shapes agree"), depth, &m)
            }),
        ));
    }
    run_claims(claims, depth)
}

/// Verify the extended projector: idempotency, `ev_i . P = 0` and
/// `P . coev_i = 0` for `i = 1..n-1` up to the given level, plus the two
/// derived diagnostics (tower identity; per-level trace 1 and rank 1).
pub fn verify_theorem(
    n: usize,
    depth: i64,
    mode: &CheckMode,
    mutation: Option<Mutation>,
) -> Vec<VerificationReport> {
    assert!(n >= 1);
    assert!(depth >= 0);
    let p = ejw_inner(n, mutation);
    let perturbed = mutation == Some(Mutation::PerturbFMu);
    let mut claims: Vec<Claim> = Vec::new();
    {
        let p2 = p.clone();
        let m = mode.clone();
        claims.push((
            format!("ejw[{n}].idempotent"),
            Box::new(move || {
                let sq = p2.compose(&p2).expect("endomorphism composes");
                compare(&sq, &p2, depth, &m)
            }),
        ));
    }
    for i in 1..n {
        let p2 = p.clone();
        let m = mode.clone();
        claims.push((
            format!("ejw[{n}].ev[{i}]"),
            Box::new(move || {
                let ev = ev_i(n, i).expect("index in range");
                compare_zero(&ev.compose(&p2).expect("shapes agree"), depth, &m)
            }),
        ));
        let p3 = p.clone();
        let m = mode.clone();
        claims.push((
            format!("ejw[{n}].coev[{i}]"),
            Box::new(move || {
                let coev = coev_i(n, i).expect("index in range");
                compare_zero(&p3.compose(&coev).expect("shapes agree"), depth, &m)
            }),
        ));
    }
    {
        let m = mode.clone();
        claims.push((
            format!("ejw[{n}].tower (derived)"),
            Box::new(move || {
                let ef = e_tower(n)
                    .compose(&f_tower_inner(n, perturbed))
                    .expect("towers compose");
                let expected =
                    BlockedMap::identity(&ModuleShape::verma(n as i64)).scale(&tower_normalizer(n));
                compare(&ef, &expected, depth, &m)
            }),
        ));
    }
    {
        let p2 = p.clone();
        let m = mode.clone();
        claims.push((
            format!("ejw[{n}].trace_rank (derived)"),
            Box::new(move || trace_rank_claim(&p2, depth, &m)),
        ));
    }
    run_claims(claims, depth)
}

fn trace_rank_claim(
    p: &BlockedMap,
    depth: i64,
    mode: &CheckMode,
) -> Result<Option<Counterexample>, ScalarError> {
    for level in 0..=depth {
        let trace = p.block_trace(level);
        if !mode.scalar_eq(&trace, &Scalar::one())? {
            return Ok(Some(Counterexample {
                level: Some(level),
                vector: json!("trace"),
                residual: json!(format!("{}", trace)),
            }));
        }
        let rank = match mode {
            CheckMode::Exact => p.block_rank(level),
            CheckMode::Specialized { q0, mu0 } => p.block(level).rank_specialized(q0, *mu0)?,
        };
        if rank != 1 {
            return Ok(Some(Counterexample {
                level: Some(level),
                vector: json!("rank"),
                residual: json!(rank),
            }));
        }
    }
    Ok(None)
}

/// Concrete-matrix forms of the three structural identities, checked on
/// levels `0..=depth`: `E_mu . F_mu = [mu+1] Id`,
/// `(Id (x) ev) . (F_mu (x) Id) . F_(mu+1) = 0` and
/// `E_(mu+1) . (E_mu (x) Id) . (Id (x) coev) = 0`.
pub fn verify_lemmas(
    depth: i64,
    mode: &CheckMode,
    mutation: Option<Mutation>,
) -> Vec<VerificationReport> {
    use crate::operators::{coev_map, e_mu, ev_map, f_mu, f_mu_perturbed};
    assert!(depth >= 0);
    let perturbed = mutation == Some(Mutation::PerturbFMu);
    let fmu = move |c: i64| {
        if perturbed {
            f_mu_perturbed(c)
        } else {
            f_mu(c)
        }
    };
    let m1 = mode.clone();
    let m2 = mode.clone();
    let m3 = mode.clone();
    let claims: Vec<Claim> = vec![
        (
            "lemma.ef_identity".into(),
            Box::new(move || {
                let ef = e_mu(0).compose(&fmu(0)).expect("shapes agree");
                let expected =
                    BlockedMap::identity(&ModuleShape::verma(1)).scale(&quantum_bracket(1, 0, 1));
                compare(&ef, &expected, depth, &m1)
            }),
        ),
        (
            "lemma.ev_ff_zero".into(),
            Box::new(move || {
                let chain = pad(&fmu(0), false, 1)
                    .expect("pad")
                    .compose(&fmu(1))
                    .expect("shapes agree");
                let m = pad(&ev_map(), true, 0)
                    .expect("pad")
                    .compose(&chain)
                    .expect("shapes agree");
                compare_zero(&m, depth, &m2)
            }),
        ),
        (
            "lemma.ee_coev_zero".into(),
            Box::new(move || {
                let chain = pad(&e_mu(0), false, 1)
                    .expect("pad")
                    .compose(&pad(&coev_map(), true, 0).expect("pad"))
                    .expect("shapes agree");
                let m = e_mu(1).compose(&chain).expect("shapes agree");
                compare_zero(&m, depth, &m3)
            }),
        ),
    ];
    run_claims(claims, depth)
}

type Claim = (
    String,
    Box<dyn Fn() -> Result<Option<Counterexample>, ScalarError> + Send + Sync>,
);

fn run_claims(claims: Vec<Claim>, depth: i64) -> Vec<VerificationReport> {
    claims
        .into_par_iter()
        .map(|(name, f)| timed(&name, depth, f))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repmod::BasisIndex;
    use crate::report::all_pass;
    use num::BigInt;

    fn idx(v: &[usize]) -> BasisIndex {
        BasisIndex(v.to_vec())
    }

    fn qint(k: i64) -> Scalar {
        quantum_bracket(0, 0, k)
    }

    #[test]
    fn jw2_values() {
        let p = jw(2);
        // P'_2 = Id + (1/[2]) e_1, so P'_2 v_{0,1} = (q^{-1} v_{0,1} + v_{1,0})/[2]
        let out = p.apply_basis(&idx(&[0, 1]));
        let inv2 = qint(2).inv().unwrap();
        assert_eq!(out.coeff(&idx(&[0, 1])), Scalar::q_pow(-1).mul(&inv2));
        assert_eq!(out.coeff(&idx(&[1, 0])), inv2);
        // explicit recursion: Id + [1]/[2] e_1
        let id = BlockedMap::identity(&ModuleShape::strands(2));
        let e1 = tl_e(2, 1).unwrap();
        let direct = id.add(&e1.scale(&qint(2).inv().unwrap())).unwrap();
        assert!(p.equal_up_to(&direct, 2));
    }

    #[test]
    fn jw_suite_small() {
        for n in 1..=4 {
            let reports = verify_jw(n, &CheckMode::Exact, None);
            assert_eq!(reports.len(), 1 + 2 * (n - 1));
            assert!(all_pass(&reports), "jw({n}) suite failed: {reports:?}");
        }
    }

    #[test]
    fn jw_sign_flip_fails_idempotency() {
        let reports = verify_jw(2, &CheckMode::Exact, Some(Mutation::JwSignFlip));
        let idem = &reports[0];
        assert!(!idem.passed());
        assert!(idem.counterexample.is_some());
    }

    #[test]
    fn ejw1_level_one_block() {
        let p = ejw(1);
        // on [v_{0,1}, v_{1,0}]:
        // [[q^-mu/[mu+1], q^{1-mu}/[mu+1]], [[mu]/[mu+1], q[mu]/[mu+1]]]
        let inv = quantum_bracket(1, 0, 1).inv().unwrap();
        let b = p.block(1);
        assert_eq!(*b.get(0, 0), Scalar::t_pow(-1).mul(&inv));
        assert_eq!(
            *b.get(0, 1),
            Scalar::q_pow(1).mul(&Scalar::t_pow(-1)).mul(&inv)
        );
        assert_eq!(*b.get(1, 0), quantum_bracket(1, 0, 0).mul(&inv));
        assert_eq!(
            *b.get(1, 1),
            Scalar::q_pow(1).mul(&quantum_bracket(1, 0, 0)).mul(&inv)
        );
        // level 0 block is the 1x1 identity
        assert!(p.block(0).get(0, 0).is_one());
    }

    #[test]
    fn theorem_suite_small() {
        let reports = verify_theorem(2, 4, &CheckMode::Exact, None);
        // idempotent + ev[1] + coev[1] + tower + trace_rank
        assert_eq!(reports.len(), 5);
        assert!(all_pass(&reports), "{reports:?}");
        let reports = verify_theorem(1, 6, &CheckMode::Exact, None);
        assert_eq!(reports.len(), 3);
        assert!(all_pass(&reports), "{reports:?}");
    }

    #[test]
    fn theorem_suite_catches_dropped_normalizer() {
        let reports = verify_theorem(2, 3, &CheckMode::Exact, Some(Mutation::DropEjwNormalizer));
        let idem = reports
            .iter()
            .find(|r| r.claim.contains("idempotent"))
            .unwrap();
        assert!(!idem.passed());
        assert!(idem.counterexample.is_some());
    }

    #[test]
    fn theorem_suite_catches_perturbed_f() {
        let reports = verify_theorem(2, 3, &CheckMode::Exact, Some(Mutation::PerturbFMu));
        assert!(!all_pass(&reports));
        let failing = reports.iter().find(|r| !r.passed()).unwrap();
        assert!(failing.counterexample.is_some());
    }

    #[test]
    fn lemma_suite() {
        let reports = verify_lemmas(6, &CheckMode::Exact, None);
        assert_eq!(reports.len(), 3);
        assert!(all_pass(&reports), "{reports:?}");
        let broken = verify_lemmas(6, &CheckMode::Exact, Some(Mutation::PerturbFMu));
        assert!(!all_pass(&broken));
    }

    #[test]
    fn specialized_mode_agrees() {
        let mode = CheckMode::Specialized {
            q0: crate::scalar::Rational::new(BigInt::from(3), BigInt::from(2)),
            mu0: 24,
        };
        assert!(all_pass(&verify_jw(3, &mode, None)));
        assert!(all_pass(&verify_theorem(2, 3, &mode, None)));
        assert!(all_pass(&verify_lemmas(4, &mode, None)));
        // mutations still fail under specialization
        assert!(!all_pass(&verify_jw(2, &mode, Some(Mutation::JwSignFlip))));
    }
}
