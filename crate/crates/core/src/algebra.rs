//! Finite-dimensional C*-algebras `M_{n_1} ⊕ .. ⊕ M_{n_s}` and unital
//! morphisms between them, encoded by multiplicity matrices.
//!
//! A morphism `[n_1..n_s] → [p_1..p_t]` is a `t×s` matrix `mult` of
//! nonnegative integers: destination block `l` holds `mult[l][k]` copies of
//! source block `k`. Structural checks use the integer data only; concrete
//! complex matrices ([`ConcreteElement`], [`ConcreteHom`]) exist to verify the
//! encoding and to compute norms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::report::CheckReport;

/// Default bound on the total matrix size of a realized destination.
pub const REALIZE_BOUND: usize = 64;
/// Convergence tolerance of the singular value iteration.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Tolerance used when comparing computed norms and products.
pub const ASSERT_TOLERANCE: f64 = 1e-8;

pub type Block = DMatrix<Complex64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("algebra needs at least one block")]
    NoBlocks,
    #[error("block {0} has size zero")]
    ZeroBlock(usize),
    #[error("multiplicity matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("cannot compose: inner algebras {left:?} and {right:?} differ")]
    ComposeMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("destination block {row} receives total size {got}, expected {expected}")]
    UnitalityViolation { row: usize, expected: usize, got: usize },
    #[error("source block {column} is sent to zero")]
    InjectivityViolation { column: usize },
    #[error("destination size {size} exceeds the realization bound {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("element blocks do not match dims {0:?}")]
    BlockShape(Vec<usize>),
    #[error("direct product of an empty list")]
    EmptyList,
}

/// `M_{n_1} ⊕ .. ⊕ M_{n_s}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FdAlgebra {
    dims: Vec<usize>,
}

impl TryFrom<Vec<usize>> for FdAlgebra {
    type Error = AlgebraError;

    fn try_from(dims: Vec<usize>) -> Result<Self, Self::Error> {
        Self::new(dims)
    }
}

impl From<FdAlgebra> for Vec<usize> {
    fn from(a: FdAlgebra) -> Self {
        a.dims
    }
}

impl fmt::Display for FdAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.dims)
    }
}

impl FdAlgebra {
    pub fn new(dims: Vec<usize>) -> Result<Self, AlgebraError> {
        if dims.is_empty() {
            return Err(AlgebraError::NoBlocks);
        }
        if let Some(k) = dims.iter().position(|&n| n == 0) {
            return Err(AlgebraError::ZeroBlock(k));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn block_count(&self) -> usize {
        self.dims.len()
    }

    /// Dimension of the center, one per block.
    pub fn center_dim(&self) -> usize {
        self.dims.len()
    }

    /// Side of the block-diagonal matrix that holds an element.
    pub fn matrix_size(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Linear dimension `Σ n_k²`.
    pub fn linear_dim(&self) -> usize {
        self.dims.iter().map(|n| n * n).sum()
    }
}

/// Concatenation of several algebras, remembering which blocks came from
/// which factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductAlgebra {
    pub algebra: FdAlgebra,
    pub parts: Vec<Range<usize>>,
}

impl ProductAlgebra {
    pub fn factor_count(&self) -> usize {
        self.parts.len()
    }

    /// The blocks of factor `k` as a standalone element.
    pub fn project(&self, x: &ConcreteElement, k: usize) -> ConcreteElement {
        let range = self.parts[k].clone();
        ConcreteElement {
            algebra: FdAlgebra::new(self.algebra.dims[range.clone()].to_vec()).expect("factor of a valid product"),
            blocks: x.blocks[range].to_vec(),
        }
    }
}

pub fn direct_product(algebras: &[FdAlgebra]) -> Result<ProductAlgebra, AlgebraError> {
    if algebras.is_empty() {
        return Err(AlgebraError::EmptyList);
    }
    let mut dims = Vec::new();
    let mut parts = Vec::with_capacity(algebras.len());
    for a in algebras {
        let start = dims.len();
        dims.extend_from_slice(&a.dims);
        parts.push(start..dims.len());
    }
    Ok(ProductAlgebra {
        algebra: FdAlgebra::new(dims)?,
        parts,
    })
}

/// A unital morphism given by its multiplicity matrix (`dst blocks × src blocks`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MultiplicityMorphism {
    src: FdAlgebra,
    dst: FdAlgebra,
    mult: Vec<Vec<usize>>,
}

fn check_shape(src: &FdAlgebra, dst: &FdAlgebra, mult: &[Vec<usize>]) -> Result<(), AlgebraError> {
    let rows = mult.len();
    let cols = mult.first().map_or(0, Vec::len);
    let (expected_rows, expected_cols) = (dst.block_count(), src.block_count());
    if rows != expected_rows || mult.iter().any(|r| r.len() != expected_cols) {
        return Err(AlgebraError::ShapeMismatch {
            rows,
            cols,
            expected_rows,
            expected_cols,
        });
    }
    Ok(())
}

fn check_unital(src: &FdAlgebra, dst: &FdAlgebra, mult: &[Vec<usize>]) -> Result<(), AlgebraError> {
    for (row, (r, &expected)) in mult.iter().zip(&dst.dims).enumerate() {
        let got: usize = r.iter().zip(&src.dims).map(|(m, n)| m * n).sum();
        if got != expected {
            return Err(AlgebraError::UnitalityViolation { row, expected, got });
        }
    }
    Ok(())
}

fn zero_column(mult: &[Vec<usize>], cols: usize) -> Option<usize> {
    (0..cols).find(|&k| mult.iter().all(|r| r[k] == 0))
}

/// A unital injective morphism; both arithmetic conditions are verified.
pub fn make_morphism(
    src: FdAlgebra,
    dst: FdAlgebra,
    mult: Vec<Vec<usize>>,
) -> Result<MultiplicityMorphism, AlgebraError> {
    let m = MultiplicityMorphism::new_unital(src, dst, mult)?;
    if let Some(column) = zero_column(&m.mult, m.src.block_count()) {
        return Err(AlgebraError::InjectivityViolation { column });
    }
    Ok(m)
}

/// `g ∘ f`.
pub fn compose(g: &MultiplicityMorphism, f: &MultiplicityMorphism) -> Result<MultiplicityMorphism, AlgebraError> {
    if f.dst != g.src {
        return Err(AlgebraError::ComposeMismatch {
            left: g.src.dims.clone(),
            right: f.dst.dims.clone(),
        });
    }
    let (t, r, s) = (g.dst.block_count(), g.src.block_count(), f.src.block_count());
    let mult: Vec<Vec<usize>> = (0..t)
        .map(|l| {
            (0..s)
                .map(|k| (0..r).map(|j| g.mult[l][j] * f.mult[j][k]).sum())
                .collect()
        })
        .collect();
    let composite = MultiplicityMorphism {
        src: f.src.clone(),
        dst: g.dst.clone(),
        mult,
    };
    debug_assert!(check_unital(&composite.src, &composite.dst, &composite.mult).is_ok());
    debug_assert!(!(f.is_injective() && g.is_injective()) || composite.is_injective());
    Ok(composite)
}

impl MultiplicityMorphism {
    /// A unital morphism that may kill blocks (coordinate projections).
    pub fn new_unital(src: FdAlgebra, dst: FdAlgebra, mult: Vec<Vec<usize>>) -> Result<Self, AlgebraError> {
        check_shape(&src, &dst, &mult)?;
        check_unital(&src, &dst, &mult)?;
        Ok(Self { src, dst, mult })
    }

    pub fn identity(a: &FdAlgebra) -> Self {
        let s = a.block_count();
        Self {
            src: a.clone(),
            dst: a.clone(),
            mult: (0..s).map(|l| (0..s).map(|k| usize::from(k == l)).collect()).collect(),
        }
    }

    /// Stacks morphisms out of a common source into the product of their targets.
    pub fn pairing(src: &FdAlgebra, maps: &[&MultiplicityMorphism]) -> Result<(Self, ProductAlgebra), AlgebraError> {
        let targets: Vec<FdAlgebra> = maps.iter().map(|m| m.dst.clone()).collect();
        let product = direct_product(&targets)?;
        let mut mult = Vec::new();
        for m in maps {
            if &m.src != src {
                return Err(AlgebraError::ComposeMismatch {
                    left: src.dims.clone(),
                    right: m.src.dims.clone(),
                });
            }
            mult.extend(m.mult.iter().cloned());
        }
        let morphism = Self::new_unital(src.clone(), product.algebra.clone(), mult)?;
        Ok((morphism, product))
    }

    pub fn src(&self) -> &FdAlgebra {
        &self.src
    }

    pub fn dst(&self) -> &FdAlgebra {
        &self.dst
    }

    pub fn mult(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn is_injective(&self) -> bool {
        zero_column(&self.mult, self.src.block_count()).is_none()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.src)
    }

    /// Bijective unital morphisms are exactly the block permutations.
    pub fn is_block_permutation(&self) -> bool {
        self.src.block_count() == self.dst.block_count()
            && self.mult.iter().all(|r| r.iter().sum::<usize>() == 1)
            && (0..self.src.block_count()).all(|k| self.mult.iter().map(|r| r[k]).sum::<usize>() == 1)
    }

    /// Overwrites one multiplicity entry without any check.
    pub fn with_entry_unchecked(mut self, row: usize, col: usize, value: usize) -> Self {
        self.mult[row][col] = value;
        self
    }
}

impl fmt::Display for MultiplicityMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} via {:?}", self.src, self.dst, self.mult)
    }
}

/// An element of an [`FdAlgebra`], one complex matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcreteElement {
    pub algebra: FdAlgebra,
    pub blocks: Vec<Block>,
}

fn block_norm(b: &Block) -> f64 {
    if b.is_empty() {
        return 0.0;
    }
    match b.clone().try_svd(false, false, NORM_TOLERANCE, 0) {
        Some(svd) => svd.singular_values.max(),
        None => b.singular_values().max(),
    }
}

/// Operator norm: the largest singular value over all blocks.
pub fn op_norm(x: &ConcreteElement) -> f64 {
    x.blocks.iter().map(block_norm).fold(0.0, f64::max)
}

impl ConcreteElement {
    pub fn new(algebra: FdAlgebra, blocks: Vec<Block>) -> Result<Self, AlgebraError> {
        if blocks.len() != algebra.block_count()
            || blocks
                .iter()
                .zip(&algebra.dims)
                .any(|(b, &n)| b.nrows() != n || b.ncols() != n)
        {
            return Err(AlgebraError::BlockShape(algebra.dims.clone()));
        }
        Ok(Self { algebra, blocks })
    }

    pub fn scalar_blocks(algebra: &FdAlgebra, scalars: &[Complex64]) -> Self {
        let blocks = algebra
            .dims
            .iter()
            .zip(scalars)
            .map(|(&n, &z)| Block::identity(n, n) * z)
            .collect();
        Self {
            algebra: algebra.clone(),
            blocks,
        }
    }

    pub fn scalar(algebra: &FdAlgebra, z: Complex64) -> Self {
        Self::scalar_blocks(algebra, &vec![z; algebra.block_count()])
    }

    pub fn identity(algebra: &FdAlgebra) -> Self {
        Self::scalar(algebra, Complex64::new(1.0, 0.0))
    }

    pub fn zero(algebra: &FdAlgebra) -> Self {
        Self::scalar(algebra, Complex64::new(0.0, 0.0))
    }

    /// Entries with real and imaginary parts uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(algebra: &FdAlgebra, rng: &mut R) -> Self {
        let blocks = algebra
            .dims
            .iter()
            .map(|&n| {
                Block::from_fn(n, n, |_, _| {
                    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
                })
            })
            .collect();
        Self {
            algebra: algebra.clone(),
            blocks,
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Block, &Block) -> Block) -> Self {
        assert_eq!(self.algebra, other.algebra, "elements of different algebras");
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b * z).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        op_norm(self)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.algebra, other.algebra, "elements of different algebras");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.algebra == other.algebra && self.max_abs_diff(other) <= tol
    }
}

/// A `{0, 1}`-valued function on a finite index set, standing for the element
/// whose coordinate `j` is `value(j)` times the unit of that coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScalarFunctionElement {
    pub values: BTreeMap<usize, bool>,
}

impl ScalarFunctionElement {
    pub fn new(values: BTreeMap<usize, bool>) -> Self {
        Self { values }
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.keys().copied()
    }

    pub fn restrict(&self, keep: &std::collections::BTreeSet<usize>) -> Self {
        Self {
            values: self
                .values
                .iter()
                .filter(|(j, _)| keep.contains(j))
                .map(|(&j, &v)| (j, v))
                .collect(),
        }
    }

    /// `𝕀 - self`.
    pub fn complement(&self) -> Self {
        Self {
            values: self.values.iter().map(|(&j, &v)| (j, !v)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| !v)
    }

    pub fn is_unit(&self) -> bool {
        self.values.values().all(|&v| v)
    }

    /// The element of a product algebra whose factors are indexed by `support`.
    pub fn realize(&self, product: &ProductAlgebra) -> ConcreteElement {
        assert_eq!(product.factor_count(), self.values.len(), "factor count mismatch");
        let mut scalars = vec![Complex64::new(0.0, 0.0); product.algebra.block_count()];
        for (part, &v) in product.parts.iter().zip(self.values.values()) {
            for k in part.clone() {
                scalars[k] = Complex64::new(if v { 1.0 } else { 0.0 }, 0.0);
            }
        }
        ConcreteElement::scalar_blocks(&product.algebra, &scalars)
    }
}

/// The block-diagonal homomorphism encoded by a multiplicity matrix: block `l`
/// of the image is `diag` of `mult[l][k]` consecutive copies of source block
/// `k`, in increasing `k`.
#[derive(Debug, Clone)]
pub struct ConcreteHom {
    pub morphism: MultiplicityMorphism,
}

pub fn realize(m: &MultiplicityMorphism) -> Result<ConcreteHom, AlgebraError> {
    realize_bounded(m, REALIZE_BOUND)
}

pub fn realize_bounded(m: &MultiplicityMorphism, bound: usize) -> Result<ConcreteHom, AlgebraError> {
    let size = m.dst.matrix_size();
    if size > bound {
        return Err(AlgebraError::TooLarge { size, bound });
    }
    Ok(ConcreteHom { morphism: m.clone() })
}

impl ConcreteHom {
    pub fn apply(&self, x: &ConcreteElement) -> ConcreteElement {
        let m = &self.morphism;
        assert_eq!(x.algebra, m.src, "argument outside the source algebra");
        let blocks = m
            .mult
            .iter()
            .zip(&m.dst.dims)
            .map(|(row, &p)| {
                let mut out = Block::zeros(p, p);
                let mut offset = 0;
                for (k, &copies) in row.iter().enumerate() {
                    let n = m.src.dims[k];
                    for _ in 0..copies {
                        out.view_mut((offset, offset), (n, n)).copy_from(&x.blocks[k]);
                        offset += n;
                    }
                }
                out
            })
            .collect();
        ConcreteElement {
            algebra: m.dst.clone(),
            blocks,
        }
    }

    /// Linearity, multiplicativity, adjoints, the unit and (for embeddings)
    /// isometry on `samples` random pairs.
    pub fn verify_laws<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> CheckReport {
        let m = &self.morphism;
        let mut violations = Vec::new();
        let unit = ConcreteElement::identity(&m.src);
        if self.apply(&unit).max_abs_diff(&ConcreteElement::identity(&m.dst)) > ASSERT_TOLERANCE {
            violations.push(json!({ "law": "unit" }));
        }
        let z = Complex64::new(0.3, -1.7);
        for sample in 0..samples {
            let a = ConcreteElement::random(&m.src, rng);
            let b = ConcreteElement::random(&m.src, rng);
            let (fa, fb) = (self.apply(&a), self.apply(&b));
            let mut law = |name: &str, lhs: ConcreteElement, rhs: ConcreteElement| {
                let err = lhs.max_abs_diff(&rhs);
                if err > ASSERT_TOLERANCE {
                    violations.push(json!({ "law": name, "sample": sample, "error": err }));
                }
            };
            law("additive", self.apply(&a.add(&b.scale(z))), fa.add(&fb.scale(z)));
            law("multiplicative", self.apply(&a.mul(&b)), fa.mul(&fb));
            law("adjoint", self.apply(&a.adjoint()), fa.adjoint());
            if m.is_injective() {
                let err = (fa.norm() - a.norm()).abs();
                if err > ASSERT_TOLERANCE {
                    violations.push(json!({ "law": "isometry", "sample": sample, "error": err }));
                }
            }
        }
        CheckReport::from_outcome("homomorphism_laws", violations, Vec::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn alg(d: &[usize]) -> FdAlgebra {
        FdAlgebra::new(d.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn algebra_invariants() {
        assert_eq!(FdAlgebra::new(vec![]), Err(AlgebraError::NoBlocks));
        assert_eq!(FdAlgebra::new(vec![2, 0]), Err(AlgebraError::ZeroBlock(1)));
        let a = alg(&[2, 3]);
        assert_eq!((a.center_dim(), a.matrix_size(), a.linear_dim()), (2, 5, 13));
        let parsed: FdAlgebra = serde_json::from_str("[1,2]").unwrap();
        assert_eq!(parsed, alg(&[1, 2]));
        assert!(serde_json::from_str::<FdAlgebra>("[]").is_err());
    }

    #[test]
    fn make_morphism_examples() {
        assert!(make_morphism(alg(&[1]), alg(&[3]), vec![vec![3]]).is_ok());
        assert!(make_morphism(alg(&[1, 1]), alg(&[2]), vec![vec![1, 1]]).is_ok());
        assert_eq!(
            make_morphism(alg(&[2]), alg(&[3]), vec![vec![1]]),
            Err(AlgebraError::UnitalityViolation {
                row: 0,
                expected: 3,
                got: 2
            })
        );
        assert_eq!(
            make_morphism(alg(&[1, 2]), alg(&[2]), vec![vec![2, 0]]),
            Err(AlgebraError::InjectivityViolation { column: 1 })
        );
        assert!(matches!(
            make_morphism(alg(&[1]), alg(&[2]), vec![vec![2, 0]]),
            Err(AlgebraError::ShapeMismatch { .. })
        ));
        assert!(MultiplicityMorphism::new_unital(alg(&[1, 2]), alg(&[2]), vec![vec![0, 1]]).is_ok());
    }

    #[test]
    fn compose_examples() {
        let f = make_morphism(alg(&[1]), alg(&[2]), vec![vec![2]]).unwrap();
        let g = make_morphism(alg(&[2]), alg(&[4]), vec![vec![2]]).unwrap();
        assert_eq!(compose(&g, &f).unwrap().mult(), &[vec![4]]);
        let id = MultiplicityMorphism::identity(&alg(&[2]));
        assert_eq!(compose(&g, &id).unwrap(), g);
        assert!(matches!(compose(&f, &g), Err(AlgebraError::ComposeMismatch { .. })));
    }

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&ConcreteElement::identity(&alg(&[2, 3]))) - 1.0).abs() < 1e-12);
        let d = Block::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(0.0, -4.0)]));
        let x = ConcreteElement::new(alg(&[2]), vec![d]).unwrap();
        assert!((op_norm(&x) - 4.0).abs() < 1e-12);
        assert_eq!(op_norm(&ConcreteElement::zero(&alg(&[3]))), 0.0);
    }

    #[test]
    fn realize_examples() {
        let m = make_morphism(alg(&[1]), alg(&[2]), vec![vec![2]]).unwrap();
        let h = realize(&m).unwrap();
        let z = c(1.5, -2.0);
        let img = h.apply(&ConcreteElement::scalar(&alg(&[1]), z));
        assert_eq!(img, ConcreteElement::scalar(&alg(&[2]), z));

        let m = make_morphism(alg(&[1, 1]), alg(&[2]), vec![vec![1, 1]]).unwrap();
        let h = realize(&m).unwrap();
        let x = ConcreteElement::scalar_blocks(&alg(&[1, 1]), &[c(2.0, 0.0), c(0.0, 1.0)]);
        let expected = Block::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(0.0, 1.0)]));
        assert_eq!(h.apply(&x).blocks[0], expected);
        let y = ConcreteElement::scalar_blocks(&alg(&[1, 1]), &[c(1.0, 1.0), c(3.0, 0.0)]);
        assert!(h.apply(&x.mul(&y)).approx_eq(&h.apply(&x).mul(&h.apply(&y)), 1e-12));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = ConcreteElement::random(&alg(&[2]), &mut rng);
        let id = realize(&MultiplicityMorphism::identity(&alg(&[2]))).unwrap();
        assert_eq!(id.apply(&a), a);

        let big = make_morphism(alg(&[1]), alg(&[65]), vec![vec![65]]).unwrap();
        assert_eq!(
            realize(&big).unwrap_err(),
            AlgebraError::TooLarge { size: 65, bound: 64 }
        );
    }

    #[test]
    fn realized_laws_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = make_morphism(alg(&[1, 2]), alg(&[3, 5]), vec![vec![1, 1], vec![1, 2]]).unwrap();
        let r = realize(&m).unwrap().verify_laws(&mut rng, 10);
        assert!(r.passed(), "{r:?}");
        let p = MultiplicityMorphism::new_unital(alg(&[1, 2]), alg(&[2]), vec![vec![0, 1]]).unwrap();
        assert!(realize(&p).unwrap().verify_laws(&mut rng, 10).passed());
    }

    #[test]
    fn direct_product_examples() {
        let p = direct_product(&[alg(&[2]), alg(&[3])]).unwrap();
        assert_eq!(p.algebra, alg(&[2, 3]));
        assert_eq!(p.parts, vec![0..1, 1..2]);
        assert_eq!(direct_product(&[alg(&[2, 2])]).unwrap().algebra, alg(&[2, 2]));
        assert_eq!(direct_product(&[]), Err(AlgebraError::EmptyList));
        let q = direct_product(&[alg(&[1, 2]), alg(&[3])]).unwrap();
        assert_eq!(q.algebra.center_dim(), 3);
    }

    #[test]
    fn permutations_and_pairing() {
        let swap = make_morphism(alg(&[1, 2]), alg(&[2, 1]), vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(swap.is_block_permutation() && !swap.is_identity());
        let f = make_morphism(alg(&[1]), alg(&[2]), vec![vec![2]]).unwrap();
        let g = make_morphism(alg(&[1]), alg(&[3]), vec![vec![3]]).unwrap();
        let (pair, product) = MultiplicityMorphism::pairing(&alg(&[1]), &[&f, &g]).unwrap();
        assert_eq!(pair.mult(), &[vec![2], vec![3]]);
        assert_eq!(product.algebra, alg(&[2, 3]));
    }

    #[test]
    fn scalar_functions() {
        let f = ScalarFunctionElement::new([(0, true), (3, false), (5, true)].into());
        let g = f.complement();
        assert!(!f.is_zero() && !f.is_unit());
        assert_eq!(f.restrict(&[3, 5].into()).values.len(), 2);
        let product = direct_product(&[alg(&[2]), alg(&[1, 1]), alg(&[3])]).unwrap();
        let (rf, rg) = (f.realize(&product), g.realize(&product));
        assert_eq!(rf.mul(&rg), ConcreteElement::zero(&product.algebra));
        assert_eq!(rf.add(&rg), ConcreteElement::identity(&product.algebra));
    }
}
