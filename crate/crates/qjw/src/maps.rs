//! Level-blocked exact linear maps between module shapes.
//!
//! A map is stored as a rule for producing the matrix of its restriction to
//! one level of the domain; blocks are computed on demand and memoized.
//! A map with `level_shift` d sends level `l` of the domain into level
//! `l + d` of the codomain. All maps built here preserve weights, so the
//! shift is pinned down by the shapes (0 for the intertwiners between
//! Verma-headed chains, -1/+1 for evaluation/coevaluation).

use crate::repmod::{act_generator, BasisIndex, Gen, LinComb, ModuleShape};
use crate::scalar::{Rational, Scalar, ScalarError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Dense matrix of scalars for one level: `rows x cols`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    nrows: usize,
    ncols: usize,
    data: Vec<Scalar>,
}

impl Block {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Block {
            nrows,
            ncols,
            data: vec![Scalar::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut b = Block::zeros(n, n);
        for i in 0..n {
            b.set(i, i, Scalar::one());
        }
        b
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.ncols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.ncols + c] = v;
    }

    pub fn mul(&self, rhs: &Block) -> Block {
        assert_eq!(self.ncols, rhs.nrows, "block dimension mismatch");
        let mut out = Block::zeros(self.nrows, rhs.ncols);
        for r in 0..self.nrows {
            for c in 0..rhs.ncols {
                let mut acc = Scalar::zero();
                for k in 0..self.ncols {
                    let a = self.get(r, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = rhs.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    pub fn add(&self, rhs: &Block) -> Block {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a = a.add(b);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Block {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = a.mul(c);
        }
        out
    }

    pub fn trace(&self) -> Scalar {
        assert_eq!(self.nrows, self.ncols, "trace of a non-square block");
        let mut acc = Scalar::zero();
        for i in 0..self.nrows {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    /// Rank by exact Gaussian elimination. The pivot is the first nonzero
    /// entry scanning rows top-down in column order; no pivoting heuristics,
    /// so the elimination path is deterministic.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut row = 0;
        for col in 0..m.ncols {
            if row == m.nrows {
                break;
            }
            let pivot = (row..m.nrows).find(|&r| !m.get(r, col).is_zero());
            let Some(p) = pivot else { continue };
            if p != row {
                for c in 0..m.ncols {
                    let a = m.get(row, c).clone();
                    let b = m.get(p, c).clone();
                    m.set(row, c, b);
                    m.set(p, c, a);
                }
            }
            let inv = m.get(row, col).inv().expect("pivot is nonzero");
            for r in row + 1..m.nrows {
                let factor = m.get(r, col).mul(&inv);
                if factor.is_zero() {
                    continue;
                }
                for c in col..m.ncols {
                    let v = m.get(r, c).sub(&factor.mul(m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            row += 1;
        }
        row
    }

    /// Rank of the block after specializing every entry.
    pub fn rank_specialized(&self, q0: &Rational, mu0: i64) -> Result<usize, ScalarError> {
        use num::Zero;
        let mut m: Vec<Vec<Rational>> = Vec::with_capacity(self.nrows);
        for r in 0..self.nrows {
            let mut row = Vec::with_capacity(self.ncols);
            for c in 0..self.ncols {
                row.push(self.get(r, c).specialize(q0, mu0, 0)?);
            }
            m.push(row);
        }
        let mut rank = 0;
        for col in 0..self.ncols {
            if rank == self.nrows {
                break;
            }
            let Some(p) = (rank..self.nrows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let inv = m[rank][col].recip();
            let (upper, lower) = m.split_at_mut(rank + 1);
            let pivot = &upper[rank];
            for row in lower.iter_mut() {
                if row[col].is_zero() {
                    continue;
                }
                let factor = &row[col] * &inv;
                for (cell, pv) in row[col..].iter_mut().zip(&pivot[col..]) {
                    let delta = &factor * pv;
                    *cell -= delta;
                }
            }
            rank += 1;
        }
        Ok(rank)
    }
}

/// How two scalars are compared by the verification drivers.
#[derive(Clone, Debug)]
pub enum CheckMode {
    /// Cross-multiplication equality over the exact field.
    Exact,
    /// Equality of values at `q = q0`, `t = q0^mu0` over exact rationals.
    Specialized { q0: Rational, mu0: i64 },
}

impl CheckMode {
    pub fn scalar_eq(&self, a: &Scalar, b: &Scalar) -> Result<bool, ScalarError> {
        match self {
            CheckMode::Exact => Ok(a == b),
            CheckMode::Specialized { q0, mu0 } => {
                Ok(a.specialize(q0, *mu0, 0)? == b.specialize(q0, *mu0, 0)?)
            }
        }
    }
}

type Kernel = Box<dyn Fn(i64) -> Block + Send + Sync>;

struct MapInner {
    domain: ModuleShape,
    codomain: ModuleShape,
    level_shift: i64,
    kernel: Kernel,
    cache: Mutex<HashMap<i64, Arc<Block>>>,
}

/// Exact linear map presented by its level blocks.
#[derive(Clone)]
pub struct BlockedMap {
    inner: Arc<MapInner>,
}

impl std::fmt::Debug for BlockedMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "BlockedMap({} -> {}, shift {})",
            self.inner.domain, self.inner.codomain, self.inner.level_shift
        )
    }
}

impl BlockedMap {
    pub fn new(
        domain: ModuleShape,
        codomain: ModuleShape,
        level_shift: i64,
        kernel: Kernel,
    ) -> Self {
        BlockedMap {
            inner: Arc::new(MapInner {
                domain,
                codomain,
                level_shift,
                kernel,
                cache: Mutex::new(HashMap::new()),
            }),
        }
    }

    /// Build a map from its action on basis vectors. Every produced
    /// combination must live at the stated level shift.
    pub fn from_basis_map<F>(
        domain: ModuleShape,
        codomain: ModuleShape,
        level_shift: i64,
        f: F,
    ) -> Self
    where
        F: Fn(&BasisIndex) -> LinComb + Send + Sync + 'static,
    {
        let dom = domain.clone();
        let cod = codomain.clone();
        let kernel = Box::new(move |level: i64| {
            let cols = dom.enumerate_basis(level);
            let rows = cod.enumerate_basis(level + level_shift);
            let row_pos: HashMap<&BasisIndex, usize> =
                rows.iter().enumerate().map(|(i, b)| (b, i)).collect();
            let mut block = Block::zeros(rows.len(), cols.len());
            for (j, v) in cols.iter().enumerate() {
                let image = f(v);
                debug_assert_eq!(image.shape(), &cod);
                for (idx, c) in image.terms() {
                    let r = row_pos
                        .get(idx)
                        .unwrap_or_else(|| panic!("image {idx} is off-level for {cod}"));
                    block.set(*r, j, c.clone());
                }
            }
            block
        });
        BlockedMap::new(domain, codomain, level_shift, kernel)
    }

    pub fn identity(shape: &ModuleShape) -> Self {
        let s = shape.clone();
        BlockedMap::new(
            shape.clone(),
            shape.clone(),
            0,
            Box::new(move |level| Block::identity(s.level_dim(level))),
        )
    }

    pub fn zero(domain: &ModuleShape, codomain: &ModuleShape, level_shift: i64) -> Self {
        let d = domain.clone();
        let c = codomain.clone();
        BlockedMap::new(
            domain.clone(),
            codomain.clone(),
            level_shift,
            Box::new(move |level| {
                Block::zeros(c.level_dim(level + level_shift), d.level_dim(level))
            }),
        )
    }

    /// Generator action as a blocked map on one shape.
    pub fn action(shape: &ModuleShape, g: Gen) -> Self {
        let s = shape.clone();
        BlockedMap::from_basis_map(shape.clone(), shape.clone(), g.level_shift(), move |v| {
            act_generator(&s, g, v)
        })
    }

    pub fn domain(&self) -> &ModuleShape {
        &self.inner.domain
    }

    pub fn codomain(&self) -> &ModuleShape {
        &self.inner.codomain
    }

    pub fn level_shift(&self) -> i64 {
        self.inner.level_shift
    }

    /// The matrix of this map from domain level `level` to codomain level
    /// `level + level_shift`, rows/columns ordered like `enumerate_basis`.
    pub fn block(&self, level: i64) -> Arc<Block> {
        if let Some(b) = self.inner.cache.lock().unwrap().get(&level) {
            return b.clone();
        }
        // compute outside the lock; a racing duplicate computes the same value
        let b = Arc::new((self.inner.kernel)(level));
        let mut cache = self.inner.cache.lock().unwrap();
        cache.entry(level).or_insert(b).clone()
    }

    /// `self . g` (apply `g` first).
    pub fn compose(&self, g: &BlockedMap) -> Result<BlockedMap, MapError> {
        if self.domain() != g.codomain() {
            return Err(MapError::ShapeMismatch(format!(
                "compose: domain {} != codomain {}",
                self.domain(),
                g.codomain()
            )));
        }
        let f = self.clone();
        let gg = g.clone();
        let shift = g.level_shift();
        Ok(BlockedMap::new(
            g.domain().clone(),
            self.codomain().clone(),
            shift + self.level_shift(),
            Box::new(move |level| f.block(level + shift).mul(&gg.block(level))),
        ))
    }

    pub fn add(&self, other: &BlockedMap) -> Result<BlockedMap, MapError> {
        if self.domain() != other.domain()
            || self.codomain() != other.codomain()
            || self.level_shift() != other.level_shift()
        {
            return Err(MapError::ShapeMismatch(
                "add: maps must share domain, codomain and level shift".into(),
            ));
        }
        let f = self.clone();
        let g = other.clone();
        Ok(BlockedMap::new(
            self.domain().clone(),
            self.codomain().clone(),
            self.level_shift(),
            Box::new(move |level| f.block(level).add(&g.block(level))),
        ))
    }

    pub fn sub(&self, other: &BlockedMap) -> Result<BlockedMap, MapError> {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> BlockedMap {
        let f = self.clone();
        let c = c.clone();
        BlockedMap::new(
            self.domain().clone(),
            self.codomain().clone(),
            self.level_shift(),
            Box::new(move |level| f.block(level).scale(&c)),
        )
    }

    pub fn apply(&self, v: &LinComb) -> LinComb {
        assert_eq!(v.shape(), self.domain(), "apply: vector shape mismatch");
        let mut out = LinComb::zero(self.codomain().clone());
        for (idx, c) in v.terms() {
            let level = idx.level();
            let cols = self.domain().enumerate_basis(level);
            let rows = self.codomain().enumerate_basis(level + self.level_shift());
            let j = cols
                .iter()
                .position(|b| b == idx)
                .expect("basis vector not found at its level");
            let block = self.block(level);
            for (r, row_idx) in rows.iter().enumerate() {
                out.add_term(row_idx.clone(), block.get(r, j).mul(c));
            }
        }
        out
    }

    pub fn apply_basis(&self, idx: &BasisIndex) -> LinComb {
        self.apply(&LinComb::basis_vector(self.domain().clone(), idx.clone()))
    }

    /// Entrywise equality of all blocks for levels `0..=depth`.
    /// Both maps must share domain, codomain and level shift.
    pub fn equal_up_to(&self, other: &BlockedMap, depth: i64) -> bool {
        self.first_difference(other, depth, &CheckMode::Exact)
            .expect("exact comparison cannot fail")
            .is_none()
    }

    /// First level/column where the two maps disagree, if any.
    /// Levels are checked in parallel, then reported in ascending order.
    pub fn first_difference(
        &self,
        other: &BlockedMap,
        depth: i64,
        mode: &CheckMode,
    ) -> Result<Option<MapDifference>, ScalarError> {
        assert_eq!(
            self.domain(),
            other.domain(),
            "first_difference: domains differ"
        );
        assert_eq!(
            self.codomain(),
            other.codomain(),
            "first_difference: codomains differ"
        );
        assert_eq!(
            self.level_shift(),
            other.level_shift(),
            "first_difference: level shifts differ"
        );
        let levels: Vec<i64> = (0..=depth).collect();
        let per_level: Vec<Result<Option<MapDifference>, ScalarError>> = levels
            .par_iter()
            .map(|&level| {
                let a = self.block(level);
                let b = other.block(level);
                for c in 0..a.ncols() {
                    for r in 0..a.nrows() {
                        if !mode.scalar_eq(a.get(r, c), b.get(r, c))? {
                            let cols = self.domain().enumerate_basis(level);
                            let rows = self.codomain().enumerate_basis(level + self.level_shift());
                            let mut residual = LinComb::zero(self.codomain().clone());
                            for (rr, row_idx) in rows.iter().enumerate() {
                                residual.add_term(row_idx.clone(), a.get(rr, c).sub(b.get(rr, c)));
                            }
                            return Ok(Some(MapDifference {
                                level,
                                vector: cols[c].clone(),
                                residual,
                            }));
                        }
                    }
                }
                Ok(None)
            })
            .collect();
        for r in per_level {
            if let Some(d) = r? {
                return Ok(Some(d));
            }
        }
        Ok(None)
    }

    pub fn block_trace(&self, level: i64) -> Scalar {
        assert_eq!(
            self.domain(),
            self.codomain(),
            "trace needs an endomorphism"
        );
        assert_eq!(self.level_shift(), 0, "trace needs level shift 0");
        self.block(level).trace()
    }

    pub fn block_rank(&self, level: i64) -> usize {
        self.block(level).rank()
    }

    /// Check `f . X = X . f` for `X` in `{K, E, F}` on all domain levels
    /// `0..=depth`. The `F` comparison at level `depth` draws on blocks at
    /// `depth + 1`, which the composition computes on demand.
    pub fn check_intertwiner(&self, depth: i64) -> Option<IntertwinerFailure> {
        for g in [Gen::K, Gen::E, Gen::F] {
            let xd = BlockedMap::action(self.domain(), g);
            let xc = BlockedMap::action(self.codomain(), g);
            let lhs = xc.compose(self).expect("action composes");
            let rhs = self.compose(&xd).expect("action composes");
            if let Some(diff) = lhs
                .first_difference(&rhs, depth, &CheckMode::Exact)
                .expect("exact comparison cannot fail")
            {
                return Some(IntertwinerFailure {
                    generator: g,
                    level: diff.level,
                    vector: diff.vector,
                    residual: diff.residual,
                });
            }
        }
        None
    }

    /// Serializable form of one block, zero entries omitted, entries sorted
    /// by row then column.
    pub fn export_block(&self, level: i64) -> BlockExport {
        let block = self.block(level);
        let rows = self.codomain().enumerate_basis(level + self.level_shift());
        let cols = self.domain().enumerate_basis(level);
        let mut entries = Vec::new();
        for r in 0..block.nrows() {
            for c in 0..block.ncols() {
                let v = block.get(r, c);
                if !v.is_zero() {
                    entries.push((r, c, v.clone()));
                }
            }
        }
        BlockExport {
            domain: self.domain().clone(),
            codomain: self.codomain().clone(),
            level,
            rows,
            cols,
            entries,
        }
    }
}

/// Witness for a failed map comparison: the first domain basis vector whose
/// images disagree, together with the exact difference of the images.
#[derive(Clone, Debug)]
pub struct MapDifference {
    pub level: i64,
    pub vector: BasisIndex,
    pub residual: LinComb,
}

/// Witness for a failed intertwiner check.
#[derive(Clone, Debug)]
pub struct IntertwinerFailure {
    pub generator: Gen,
    pub level: i64,
    pub vector: BasisIndex,
    pub residual: LinComb,
}

/// JSON-facing form of a single level block.
#[derive(Serialize, Deserialize)]
pub struct BlockExport {
    pub domain: ModuleShape,
    pub codomain: ModuleShape,
    pub level: i64,
    pub rows: Vec<BasisIndex>,
    pub cols: Vec<BasisIndex>,
    pub entries: Vec<(usize, usize, Scalar)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::quantum_bracket;

    fn idx(v: &[usize]) -> BasisIndex {
        BasisIndex(v.to_vec())
    }

    #[test]
    fn identity_and_zero_blocks() {
        let shape = ModuleShape::verma_chain(0, 1);
        let id = BlockedMap::identity(&shape);
        let z = BlockedMap::zero(&shape, &shape, 0);
        assert_eq!(*id.block(1), Block::identity(2));
        assert_eq!(*z.block(1), Block::zeros(2, 2));
        assert!(!id.equal_up_to(&z, 0));
        assert!(id.equal_up_to(&id.compose(&id).unwrap(), 4));
    }

    #[test]
    fn action_blocks_match_enumeration() {
        let shape = ModuleShape::verma_chain(0, 2);
        for g in [Gen::K, Gen::E, Gen::F] {
            let m = BlockedMap::action(&shape, g);
            for level in 0..4 {
                let b = m.block(level);
                assert_eq!(b.ncols(), shape.level_dim(level));
                assert_eq!(b.nrows(), shape.level_dim(level + g.level_shift()));
            }
        }
    }

    #[test]
    fn compose_respects_levels() {
        let shape = ModuleShape::verma(0);
        let e = BlockedMap::action(&shape, Gen::E);
        let f = BlockedMap::action(&shape, Gen::F);
        let ef = e.compose(&f).unwrap();
        assert_eq!(ef.level_shift(), 0);
        // E F v_i = [i+1][mu-i] ... on M(mu): E(F v_i) = [i+1][mu-i] v_i
        let v = ef.apply_basis(&idx(&[2]));
        let expected = quantum_bracket(0, 0, 3).mul(&quantum_bracket(1, 0, -2));
        assert_eq!(v.coeff(&idx(&[2])), expected);
    }

    #[test]
    fn compose_shape_mismatch_is_an_error() {
        let a = BlockedMap::identity(&ModuleShape::verma(0));
        let b = BlockedMap::identity(&ModuleShape::verma(1));
        assert!(matches!(a.compose(&b), Err(MapError::ShapeMismatch(_))));
    }

    #[test]
    fn generator_actions_are_not_intertwiners_but_identity_is() {
        let shape = ModuleShape::verma_chain(0, 1);
        let id = BlockedMap::identity(&shape);
        assert!(id.check_intertwiner(4).is_none());
        // E itself does not commute with F
        let e = BlockedMap::action(&shape, Gen::E);
        let fail = e.check_intertwiner(4).expect("E is not an intertwiner");
        assert!(!fail.residual.is_zero());
    }

    #[test]
    fn trace_and_rank() {
        let shape = ModuleShape::verma_chain(0, 1);
        let id = BlockedMap::identity(&shape);
        assert_eq!(id.block_trace(1), Scalar::from_int(2));
        assert_eq!(id.block_rank(1), 2);
        let z = BlockedMap::zero(&shape, &shape, 0);
        assert_eq!(z.block_rank(3), 0);
    }

    #[test]
    fn rank_of_rank_one_block() {
        // column vector (1, q) times row vector (1, q^-1)
        let mut b = Block::zeros(2, 2);
        b.set(0, 0, Scalar::one());
        b.set(0, 1, Scalar::q_pow(-1));
        b.set(1, 0, Scalar::q_pow(1));
        b.set(1, 1, Scalar::one());
        assert_eq!(b.rank(), 1);
        use num::BigInt;
        let q0 = Rational::new(BigInt::from(3), BigInt::from(2));
        assert_eq!(b.rank_specialized(&q0, 0).unwrap(), 1);
    }

    #[test]
    fn rank_plus_corank_is_dimension() {
        let shape = ModuleShape::strands(3);
        let e = BlockedMap::action(&shape, Gen::E);
        let f = BlockedMap::action(&shape, Gen::F);
        let ef = e.compose(&f).unwrap();
        let id = BlockedMap::identity(&shape);
        for level in 0..=3 {
            let dim = shape.level_dim(level);
            let r = ef.block_rank(level);
            let k = id
                .sub(
                    &ef.scale(
                        &ef.block_trace(level)
                            .inv()
                            .unwrap_or_else(|_| Scalar::one()),
                    ),
                )
                .unwrap();
            // not a projector in general; this only exercises the elimination
            let _ = k.block_rank(level);
            assert!(r <= dim);
        }
    }

    #[test]
    fn export_block_shape() {
        let shape = ModuleShape::verma_chain(0, 1);
        let id = BlockedMap::identity(&shape);
        let ex = id.export_block(1);
        assert_eq!(ex.rows.len(), 2);
        assert_eq!(ex.cols.len(), 2);
        assert_eq!(ex.entries.len(), 2);
        let js = serde_json::to_string(&ex).unwrap();
        let back: BlockExport = serde_json::from_str(&js).unwrap();
        assert_eq!(back.entries.len(), 2);
        assert!(js.contains("\"verma_shift\":0"));
    }

    #[test]
    fn specialized_check_mode() {
        use num::BigInt;
        let mode = CheckMode::Specialized {
            q0: Rational::new(BigInt::from(3), BigInt::from(2)),
            mu0: 25,
        };
        let a = quantum_bracket(1, 0, 1);
        let b = quantum_bracket(1, 0, 1);
        assert!(mode.scalar_eq(&a, &b).unwrap());
        assert!(!mode.scalar_eq(&a, &quantum_bracket(1, 0, 2)).unwrap());
    }
}
