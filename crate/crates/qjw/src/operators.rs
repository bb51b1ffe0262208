//! Named intertwiners on tensor chains.
//!
//! Primitives on `V_1 (x) V_1`:
//! - `coev`: `C(q) -> V1 (x) V1`, `1 |-> v_{0,1} - q^{-1} v_{1,0}`;
//! - `ev`: `V1 (x) V1 -> C(q)`, `v_{0,1} |-> -q`, `v_{1,0} |-> 1`,
//!   `v_{0,0}, v_{1,1} |-> 0`.
//!
//! Their composite `coev . ev` generates the Temperley-Lieb relations with
//! loop value `-q - q^{-1} = -[2]`; `e_i` places it on strands `i, i+1`.
//!
//! Verma-chain intertwiners, for each shift `c`:
//! - `E_(mu+c): M(mu+c) (x) V1 -> M(mu+c+1)`,
//!   `v_{i,0} |-> q^i v_i`, `v_{i,1} |-> v_{i+1}`;
//! - `F_(mu+c): M(mu+c+1) -> M(mu+c) (x) V1`,
//!   `v_i |-> [mu+c+1-i] v_{i,0} + q^{i-mu-c-1} [i] v_{i-1,1}`.
//!
//! `e_tower(n)` collapses `M(mu) (x) V1^n` to `M(mu+n)` by applying the
//! `E` maps head-first; `f_tower(n)` expands back with the `F` maps.

use crate::maps::{BlockedMap, MapError};
use crate::repmod::{BasisIndex, LinComb, ModuleShape};
use crate::scalar::{quantum_bracket, Monomial, Rational, Scalar};
use num::One;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("strand index {i} out of range for {what} on {n} strands")]
    IndexOutOfRange { what: String, i: i64, n: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unknown operator name: {0}")]
    UnknownName(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Deliberate defects used by the soundness probes. Each one breaks a
/// verification suite in a way the reports must catch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Flip the sign of the Jones-Wenzl recursion coefficient.
    JwSignFlip,
    /// Skip the `1 / prod [mu+k]` normalizer of the extended projector.
    DropEjwNormalizer,
    /// Perturb the second coefficient of `F_mu` from `q^{i-mu-1}` to `q^{i-mu}`.
    PerturbFMu,
}

impl Mutation {
    pub fn parse(name: &str) -> Option<Mutation> {
        match name {
            "jw-sign-flip" => Some(Mutation::JwSignFlip),
            "drop-ejw-normalizer" => Some(Mutation::DropEjwNormalizer),
            "perturb-f-mu" => Some(Mutation::PerturbFMu),
            _ => None,
        }
    }
}

/// `coev: C(q) -> V1 (x) V1`, the unit of the cap/cup duality.
pub fn coev_map() -> BlockedMap {
    let cod = ModuleShape::strands(2);
    BlockedMap::from_basis_map(ModuleShape::trivial(), cod.clone(), 1, move |_| {
        let mut out = LinComb::zero(cod.clone());
        out.add_term(BasisIndex(vec![0, 1]), Scalar::one());
        out.add_term(BasisIndex(vec![1, 0]), -Scalar::q_pow(-1));
        out
    })
}

/// `ev: V1 (x) V1 -> C(q)`, the counit of the cap/cup duality.
pub fn ev_map() -> BlockedMap {
    let cod = ModuleShape::trivial();
    BlockedMap::from_basis_map(ModuleShape::strands(2), cod.clone(), -1, move |v| {
        let c = match (v.0[0], v.0[1]) {
            (0, 1) => -Scalar::q_pow(1),
            (1, 0) => Scalar::one(),
            _ => Scalar::zero(),
        };
        LinComb::single(cod.clone(), BasisIndex(Vec::new()), c)
    })
}

/// `left (x) f (x) V1^right`: pad a map with identities on both sides.
/// At most one Verma head may occur, and it must stay leftmost.
pub fn sandwich(
    left: &ModuleShape,
    f: &BlockedMap,
    right_ids: usize,
) -> Result<BlockedMap, OperatorError> {
    if f.domain().has_head() && (left.has_head() || !left.tail.is_empty()) {
        return Err(OperatorError::ShapeMismatch(format!(
            "cannot prepend {left} to the head-bearing map {f:?}"
        )));
    }
    if left.has_head() && f.codomain().has_head() {
        return Err(OperatorError::ShapeMismatch(
            "two Verma heads in one chain".into(),
        ));
    }
    let glue = |mid: &ModuleShape| -> ModuleShape {
        let mut shape = ModuleShape {
            verma_shift: left.verma_shift.or(mid.verma_shift),
            tail: left.tail.clone(),
        };
        shape.tail.extend_from_slice(&mid.tail);
        shape.tail.extend(std::iter::repeat_n(1, right_ids));
        shape
    };
    let domain = glue(f.domain());
    let codomain = glue(f.codomain());
    let left_len = left.index_len();
    let mid_len = f.domain().index_len();
    let ff = f.clone();
    let cod = codomain.clone();
    Ok(BlockedMap::from_basis_map(
        domain,
        codomain,
        f.level_shift(),
        move |v| {
            let (lpart, rest) = v.0.split_at(left_len);
            let (mpart, rpart) = rest.split_at(mid_len);
            let image = ff.apply_basis(&BasisIndex(mpart.to_vec()));
            let mut out = LinComb::zero(cod.clone());
            for (midx, c) in image.terms() {
                let mut w = lpart.to_vec();
                w.extend_from_slice(&midx.0);
                w.extend_from_slice(rpart);
                out.add_term(BasisIndex(w), c.clone());
            }
            out
        },
    ))
}

/// `f (x) Id^right`, optionally prefixed by an identity on the `M(mu)` head.
pub fn pad(f: &BlockedMap, left_head: bool, right_ids: usize) -> Result<BlockedMap, OperatorError> {
    let left = if left_head {
        ModuleShape::verma(0)
    } else {
        ModuleShape::trivial()
    };
    sandwich(&left, f, right_ids)
}

/// Temperley-Lieb generator `e_i = Id^{i-1} (x) (coev . ev) (x) Id^{n-i-1}`
/// on `V1^{(x) n}`, `1 <= i <= n-1`.
pub fn tl_e(n: usize, i: usize) -> Result<BlockedMap, OperatorError> {
    if i < 1 || i + 1 > n {
        return Err(OperatorError::IndexOutOfRange {
            what: "e".into(),
            i: i as i64,
            n,
        });
    }
    let cup_cap = coev_map().compose(&ev_map())?;
    sandwich(&ModuleShape::strands(i - 1), &cup_cap, n - i - 1)
}

/// `E_(mu+c): M(mu+c) (x) V1 -> M(mu+c+1)`.
pub fn e_mu(c: i64) -> BlockedMap {
    let dom = ModuleShape::verma_chain(c, 1);
    let cod = ModuleShape::verma(c + 1);
    let cod2 = cod.clone();
    BlockedMap::from_basis_map(dom, cod, 0, move |v| {
        let (i, b) = (v.0[0], v.0[1]);
        match b {
            0 => LinComb::single(cod2.clone(), BasisIndex(vec![i]), Scalar::q_pow(i as i64)),
            _ => LinComb::basis_vector(cod2.clone(), BasisIndex(vec![i + 1])),
        }
    })
}

/// `F_(mu+c): M(mu+c+1) -> M(mu+c) (x) V1`.
pub fn f_mu(c: i64) -> BlockedMap {
    f_mu_inner(c, false)
}

/// Soundness-probe variant of `f_mu` with the second coefficient perturbed
/// from `q^{i-mu-c-1}` to `q^{i-mu-c}`.
pub fn f_mu_perturbed(c: i64) -> BlockedMap {
    f_mu_inner(c, true)
}

fn f_mu_inner(c: i64, perturbed: bool) -> BlockedMap {
    let dom = ModuleShape::verma(c + 1);
    let cod = ModuleShape::verma_chain(c, 1);
    let cod2 = cod.clone();
    BlockedMap::from_basis_map(dom, cod, 0, move |v| {
        let i = v.0[0];
        let mut out = LinComb::zero(cod2.clone());
        // [mu + c + 1 - i] v_{i,0}
        out.add_term(
            BasisIndex(vec![i, 0]),
            quantum_bracket(1, 0, c + 1 - i as i64),
        );
        if i > 0 {
            // q^{i - mu - c - 1} [i] v_{i-1,1}
            let e = i as i64 - c - 1 + i64::from(perturbed);
            let coeff = Scalar::monomial(Rational::one(), Monomial::new(e, -1, 0))
                .mul(&quantum_bracket(0, 0, i as i64));
            out.add_term(BasisIndex(vec![i - 1, 1]), coeff);
        }
        out
    })
}

/// `ev` applied to strands `(i, i+1)` of `M(mu) (x) V1^n`.
pub fn ev_i(n: usize, i: usize) -> Result<BlockedMap, OperatorError> {
    if i < 1 || i + 1 > n {
        return Err(OperatorError::IndexOutOfRange {
            what: "ev".into(),
            i: i as i64,
            n,
        });
    }
    sandwich(&ModuleShape::verma_chain(0, i - 1), &ev_map(), n - i - 1)
}

/// `coev` inserting strands `(i, i+1)` into `M(mu) (x) V1^{n-2}`.
pub fn coev_i(n: usize, i: usize) -> Result<BlockedMap, OperatorError> {
    if i < 1 || i + 1 > n {
        return Err(OperatorError::IndexOutOfRange {
            what: "coev".into(),
            i: i as i64,
            n,
        });
    }
    sandwich(&ModuleShape::verma_chain(0, i - 1), &coev_map(), n - i - 1)
}

/// `E_(mu+n-1) . (E_(mu+n-2) (x) Id) . ... . (E_mu (x) Id^{n-1})`,
/// collapsing `M(mu) (x) V1^n` onto `M(mu+n)`.
pub fn e_tower(n: usize) -> BlockedMap {
    let mut acc = BlockedMap::identity(&ModuleShape::verma_chain(0, n));
    for j in 0..n {
        let step = pad(&e_mu(j as i64), false, n - j - 1).expect("tower step pads");
        acc = step.compose(&acc).expect("tower shapes chain");
    }
    acc
}

/// `(F_mu (x) Id^{n-1}) . ... . (F_(mu+n-2) (x) Id) . F_(mu+n-1)`,
/// expanding `M(mu+n)` into `M(mu) (x) V1^n`.
pub fn f_tower(n: usize) -> BlockedMap {
    f_tower_inner(n, false)
}

pub(crate) fn f_tower_inner(n: usize, perturbed: bool) -> BlockedMap {
    let mut acc = BlockedMap::identity(&ModuleShape::verma(n as i64));
    for j in (0..n).rev() {
        let base = f_mu_inner(j as i64, perturbed);
        let step = pad(&base, false, n - j - 1).expect("tower step pads");
        acc = step.compose(&acc).expect("tower shapes chain");
    }
    acc
}

/// Product `[mu+1][mu+2]...[mu+n]`, the eigenvalue of `e_tower . f_tower`.
pub fn tower_normalizer(n: usize) -> Scalar {
    let mut acc = Scalar::one();
    for k in 1..=n as i64 {
        acc = acc.mul(&quantum_bracket(1, 0, k));
    }
    acc
}

/// Resolve a stable operator identifier. Bracketed forms carry their own
/// parameter (`e[2]`, `E[1]`, `ev[1]`, `E_tower[3]`); bare `e`, `ev`, `coev`
/// take the index from `idx`, bare `E`/`F` read their shift from `idx`,
/// and bare `ev`/`coev` without an index mean the `V1 (x) V1` primitives.
pub fn parse_operator(name: &str, n: usize, idx: Option<i64>) -> Result<BlockedMap, OperatorError> {
    let (base, bracket) = match (name.find('['), name.ends_with(']')) {
        (Some(p), true) => {
            let inner = &name[p + 1..name.len() - 1];
            let v: i64 = inner
                .parse()
                .map_err(|_| OperatorError::UnknownName(name.to_string()))?;
            (&name[..p], Some(v))
        }
        (None, false) => (name, None),
        _ => return Err(OperatorError::UnknownName(name.to_string())),
    };
    let arg = bracket.or(idx);
    let strand = |what: &str| -> Result<usize, OperatorError> {
        let i = arg.unwrap_or(1);
        usize::try_from(i).map_err(|_| OperatorError::IndexOutOfRange {
            what: what.into(),
            i,
            n,
        })
    };
    match base {
        "coev" if arg.is_none() => Ok(coev_map()),
        "ev" if arg.is_none() => Ok(ev_map()),
        "coev" => coev_i(n, strand("coev")?),
        "ev" => ev_i(n, strand("ev")?),
        "e" => tl_e(n, strand("e")?),
        "E" => Ok(e_mu(arg.unwrap_or(0))),
        "F" => Ok(f_mu(arg.unwrap_or(0))),
        "E_tower" => Ok(e_tower(bracket.map(|v| v as usize).unwrap_or(n))),
        "F_tower" => Ok(f_tower(bracket.map(|v| v as usize).unwrap_or(n))),
        _ => Err(OperatorError::UnknownName(name.to_string())),
    }
}

/// Every named operator at chain size `n`, used by the intertwiner audit.
pub fn named_operators(n: usize) -> Vec<(String, BlockedMap)> {
    let mut out = vec![
        ("coev".to_string(), coev_map()),
        ("ev".to_string(), ev_map()),
    ];
    for i in 1..n {
        out.push((format!("e[{i}]"), tl_e(n, i).unwrap()));
        out.push((format!("ev[{i}]"), ev_i(n, i).unwrap()));
        out.push((format!("coev[{i}]"), coev_i(n, i).unwrap()));
    }
    for c in 0..n as i64 {
        out.push((format!("E[{c}]"), e_mu(c)));
        out.push((format!("F[{c}]"), f_mu(c)));
    }
    out.push((format!("E_tower[{n}]"), e_tower(n)));
    out.push((format!("F_tower[{n}]"), f_tower(n)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::CheckMode;
    use crate::repmod::Gen;

    fn idx(v: &[usize]) -> BasisIndex {
        BasisIndex(v.to_vec())
    }

    fn qint(k: i64) -> Scalar {
        quantum_bracket(0, 0, k)
    }

    #[test]
    fn coev_values() {
        let m = coev_map();
        let out = m.apply_basis(&idx(&[]));
        assert_eq!(out.coeff(&idx(&[0, 1])), Scalar::one());
        assert_eq!(out.coeff(&idx(&[1, 0])), -Scalar::q_pow(-1));
        // F annihilates the image: F coev(1) = 0
        let f = BlockedMap::action(&ModuleShape::strands(2), Gen::F);
        assert!(f.apply(&out).is_zero());
        assert!(m.check_intertwiner(2).is_none());
    }

    #[test]
    fn ev_values() {
        let m = ev_map();
        assert_eq!(
            m.apply_basis(&idx(&[0, 1])).coeff(&idx(&[])),
            -Scalar::q_pow(1)
        );
        assert_eq!(m.apply_basis(&idx(&[1, 0])).coeff(&idx(&[])), Scalar::one());
        assert!(m.apply_basis(&idx(&[0, 0])).is_zero());
        assert!(m.apply_basis(&idx(&[1, 1])).is_zero());
        // ev(E v_{1,1}) = 0
        let e = BlockedMap::action(&ModuleShape::strands(2), Gen::E);
        assert!(m.apply(&e.apply_basis(&idx(&[1, 1]))).is_zero());
        assert!(m.check_intertwiner(2).is_none());
    }

    #[test]
    fn loop_value() {
        // ev . coev = (-q - q^-1) id on C(q)
        let m = ev_map().compose(&coev_map()).unwrap();
        let v = m.apply_basis(&idx(&[]));
        assert_eq!(v.coeff(&idx(&[])), -qint(2));
    }

    #[test]
    fn tl_generator_values_and_relations() {
        let e1 = tl_e(2, 1).unwrap();
        // e_1 v_{0,1} = -q v_{0,1} + v_{1,0}
        let out = e1.apply_basis(&idx(&[0, 1]));
        assert_eq!(out.coeff(&idx(&[0, 1])), -Scalar::q_pow(1));
        assert_eq!(out.coeff(&idx(&[1, 0])), Scalar::one());
        assert_eq!(e1.block_trace(1), -qint(2));

        // e_i^2 = -[2] e_i
        for (n, i) in [(2usize, 1usize), (3, 1), (3, 2), (4, 2)] {
            let e = tl_e(n, i).unwrap();
            let sq = e.compose(&e).unwrap();
            assert!(sq.equal_up_to(&e.scale(&-qint(2)), n as i64));
        }
        // e_i e_{i+1} e_i = e_i
        for (n, i) in [(3usize, 1usize), (4, 1), (4, 2)] {
            let a = tl_e(n, i).unwrap();
            let b = tl_e(n, i + 1).unwrap();
            let aba = a.compose(&b).unwrap().compose(&a).unwrap();
            assert!(
                aba.equal_up_to(&a, n as i64),
                "e{i} e{} e{i} = e{i} on {n}",
                i + 1
            );
            let bab = b.compose(&a).unwrap().compose(&b).unwrap();
            assert!(bab.equal_up_to(&b, n as i64));
        }
        // far-apart generators commute
        let a = tl_e(4, 1).unwrap();
        let b = tl_e(4, 3).unwrap();
        assert!(a
            .compose(&b)
            .unwrap()
            .equal_up_to(&b.compose(&a).unwrap(), 4));

        assert!(tl_e(2, 2).is_err());
        assert!(tl_e(3, 0).is_err());
    }

    #[test]
    fn e_mu_values() {
        let m = e_mu(0);
        assert_eq!(
            m.apply_basis(&idx(&[3, 0])).coeff(&idx(&[3])),
            Scalar::q_pow(3)
        );
        assert_eq!(
            m.apply_basis(&idx(&[3, 1])).coeff(&idx(&[4])),
            Scalar::one()
        );
        assert!(m.check_intertwiner(4).is_none());
    }

    #[test]
    fn f_mu_values() {
        let m = f_mu(0);
        let out = m.apply_basis(&idx(&[2]));
        // F_mu v_2 = [mu - 1] v_{2,0} + q^{1-mu} [2] v_{1,1}
        assert_eq!(out.coeff(&idx(&[2, 0])), quantum_bracket(1, 0, -1));
        assert_eq!(
            out.coeff(&idx(&[1, 1])),
            Scalar::monomial(Rational::one(), Monomial::new(1, -1, 0)).mul(&qint(2))
        );
        assert!(m.check_intertwiner(4).is_none());
        // the perturbed variant is *not* an intertwiner
        assert!(f_mu_perturbed(0).check_intertwiner(4).is_some());
    }

    #[test]
    fn e_mu_f_mu_is_bracket_identity() {
        for c in 0..3 {
            let ef = e_mu(c).compose(&f_mu(c)).unwrap();
            let id = BlockedMap::identity(&ModuleShape::verma(c + 1));
            let expected = id.scale(&quantum_bracket(1, 0, c + 1));
            assert!(ef.equal_up_to(&expected, 6));
        }
    }

    #[test]
    fn padded_ev_values() {
        // Id_M (x) ev on M(mu) (x) V1 (x) V1 at level 1
        let m = pad(&ev_map(), true, 0).unwrap();
        assert_eq!(m.domain(), &ModuleShape::verma_chain(0, 2));
        assert_eq!(m.codomain(), &ModuleShape::verma(0));
        assert_eq!(
            m.apply_basis(&idx(&[0, 0, 1])).coeff(&idx(&[0])),
            -Scalar::q_pow(1)
        );
        assert_eq!(
            m.apply_basis(&idx(&[0, 1, 0])).coeff(&idx(&[0])),
            Scalar::one()
        );
        assert!(m.apply_basis(&idx(&[1, 0, 0])).is_zero());
        // same thing through ev_i
        let v = ev_i(2, 1).unwrap();
        assert!(m.equal_up_to(&v, 4));
        assert!(v.check_intertwiner(4).is_none());
        assert!(coev_i(2, 1).unwrap().check_intertwiner(4).is_none());
    }

    #[test]
    fn tower_on_highest_vector() {
        // E_tower sends v_{0,...,0} to v_0
        for n in 1..=3usize {
            let t = e_tower(n);
            let v = t.apply_basis(&idx(&vec![0; n + 1]));
            assert_eq!(v.coeff(&idx(&[0])), Scalar::one());
        }
    }

    #[test]
    fn tower_composite_is_scalar() {
        for n in 1..=3usize {
            let ef = e_tower(n).compose(&f_tower(n)).unwrap();
            let expected =
                BlockedMap::identity(&ModuleShape::verma(n as i64)).scale(&tower_normalizer(n));
            assert!(ef.equal_up_to(&expected, 5), "tower identity at n={n}");
        }
    }

    #[test]
    fn annihilation_composites_vanish() {
        // (Id_M (x) ev) . (F_mu (x) Id) . F_(mu+1) = 0
        let chain = pad(&f_mu(0), false, 1).unwrap().compose(&f_mu(1)).unwrap();
        let m = pad(&ev_map(), true, 0).unwrap().compose(&chain).unwrap();
        let z = BlockedMap::zero(m.domain(), m.codomain(), m.level_shift());
        assert!(m.equal_up_to(&z, 8));

        // E_(mu+1) . (E_mu (x) Id) . (Id_M (x) coev) = 0
        let chain = pad(&e_mu(0), false, 1)
            .unwrap()
            .compose(&pad(&coev_map(), true, 0).unwrap())
            .unwrap();
        let m = e_mu(1).compose(&chain).unwrap();
        let z = BlockedMap::zero(m.domain(), m.codomain(), m.level_shift());
        assert!(m.equal_up_to(&z, 8));
    }

    #[test]
    fn operator_names_resolve() {
        assert!(parse_operator("e[1]", 3, None).is_ok());
        assert!(parse_operator("E[2]", 3, None).is_ok());
        assert!(parse_operator("ev", 2, None).is_ok());
        assert!(parse_operator("ev[1]", 3, None).is_ok());
        assert!(parse_operator("ev", 3, Some(2)).is_ok());
        assert!(parse_operator("E_tower[2]", 2, None).is_ok());
        assert!(parse_operator("nonsense", 3, None).is_err());
        assert!(parse_operator("e[9]", 3, None).is_err());
    }

    #[test]
    fn all_named_operators_are_intertwiners() {
        for (name, op) in named_operators(3) {
            assert!(
                op.check_intertwiner(4).is_none(),
                "{name} failed the intertwiner check"
            );
        }
    }

    #[test]
    fn specialized_comparison_agrees_with_exact_on_towers() {
        use num::BigInt;
        let mode = CheckMode::Specialized {
            q0: Rational::new(BigInt::from(3), BigInt::from(2)),
            mu0: 23,
        };
        let ef = e_tower(2).compose(&f_tower(2)).unwrap();
        let expected = BlockedMap::identity(&ModuleShape::verma(2)).scale(&tower_normalizer(2));
        assert!(ef.first_difference(&expected, 4, &mode).unwrap().is_none());
    }
}
