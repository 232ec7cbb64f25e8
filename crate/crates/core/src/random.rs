//! Seeded generators for posets, algebras, morphisms and coherent systems.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{make_morphism, FdAlgebra, MultiplicityMorphism};
use crate::poset::{Element, FinitePoset};
use crate::system::InductiveSystem;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A poset on `n` elements: a random strict order on a shuffled labelling,
/// each forward pair related with probability `density` before closure.
pub fn random_poset<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> FinitePoset {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut rank = vec![0; n];
    for (r, &e) in order.iter().enumerate() {
        rank[e] = r;
    }
    let mut related = vec![false; n * n];
    for a in 0..n {
        for b in 0..n {
            related[a * n + b] = rank[a] < rank[b] && rng.gen_bool(density);
        }
    }
    let names = (0..n).map(|k| format!("e{k}")).collect();
    FinitePoset::from_predicate(names, |a, b| related[a * n + b]).expect("forward relations are acyclic")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemShape {
    pub max_dim: usize,
    pub max_blocks: usize,
}

impl Default for SystemShape {
    fn default() -> Self {
        Self {
            max_dim: 4,
            max_blocks: 3,
        }
    }
}

pub fn random_algebra<R: Rng + ?Sized>(rng: &mut R, shape: SystemShape) -> FdAlgebra {
    let s = rng.gen_range(1..=shape.max_blocks);
    FdAlgebra::new((0..s).map(|_| rng.gen_range(1..=shape.max_dim)).collect()).expect("positive dims")
}

/// A random multiplicity matrix of matching shape, not necessarily valid.
pub fn random_triple<R: Rng + ?Sized>(rng: &mut R, shape: SystemShape) -> (FdAlgebra, FdAlgebra, Vec<Vec<usize>>) {
    let src = random_algebra(rng, shape);
    let dst = random_algebra(rng, shape);
    let mult = (0..dst.block_count())
        .map(|_| (0..src.block_count()).map(|_| rng.gen_range(0..=2)).collect())
        .collect();
    (src, dst, mult)
}

fn try_fill<R: Rng + ?Sized>(rng: &mut R, src: &FdAlgebra, dst: &[usize]) -> Option<Vec<Vec<usize>>> {
    let n = src.dims();
    let mut mult = vec![vec![0; n.len()]; dst.len()];
    let mut room: Vec<usize> = dst.to_vec();
    let mut columns: Vec<usize> = (0..n.len()).collect();
    columns.shuffle(rng);
    for k in columns {
        let fits: Vec<usize> = (0..dst.len()).filter(|&l| room[l] >= n[k]).collect();
        let &l = fits.choose(rng)?;
        mult[l][k] += 1;
        room[l] -= n[k];
    }
    for l in 0..dst.len() {
        while room[l] > 0 {
            let fits: Vec<usize> = (0..n.len()).filter(|&k| n[k] <= room[l]).collect();
            let &k = fits.choose(rng)?;
            mult[l][k] += 1;
            room[l] -= n[k];
        }
    }
    Some(mult)
}

/// A unital embedding out of `src` into a random algebra of the given shape,
/// built by placing every source block once and then filling the remaining
/// room; the identity of `src` when no attempt succeeds.
pub fn random_embedding<R: Rng + ?Sized>(rng: &mut R, src: &FdAlgebra, shape: SystemShape) -> MultiplicityMorphism {
    let max_dim = shape.max_dim.max(*src.dims().iter().max().expect("nonempty"));
    for _ in 0..64 {
        let t = rng.gen_range(1..=shape.max_blocks);
        let dst: Vec<usize> = (0..t).map(|_| rng.gen_range(1..=max_dim)).collect();
        if let Some(mult) = try_fill(rng, src, &dst) {
            let dst = FdAlgebra::new(dst).expect("positive dims");
            if let Ok(m) = make_morphism(src.clone(), dst, mult) {
                return m;
            }
        }
    }
    MultiplicityMorphism::identity(src)
}

/// Strictly monotone maps to levels: heights, or positions in a random
/// linear extension.
fn level_map<R: Rng + ?Sized>(rng: &mut R, poset: &FinitePoset) -> Vec<usize> {
    let n = poset.len();
    let below = |b: usize| (0..n).filter(move |&a| a != b && poset.le(Element(a), Element(b)));
    if rng.gen_bool(0.5) {
        let mut height = vec![0; n];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&b| below(b).count());
        for &b in &order {
            height[b] = below(b).map(|a| height[a] + 1).max().unwrap_or(0);
        }
        height
    } else {
        let mut keys: Vec<(usize, u32, usize)> = (0..n).map(|b| (below(b).count(), rng.gen(), b)).collect();
        keys.sort();
        let mut position = vec![0; n];
        for (r, &(_, _, b)) in keys.iter().enumerate() {
            position[b] = r;
        }
        position
    }
}

fn block_sum(f: &MultiplicityMorphism, g: &MultiplicityMorphism) -> MultiplicityMorphism {
    let src = FdAlgebra::new([f.src().dims(), g.src().dims()].concat()).expect("valid");
    let dst = FdAlgebra::new([f.dst().dims(), g.dst().dims()].concat()).expect("valid");
    let (fs, gs) = (f.src().block_count(), g.src().block_count());
    let mut mult: Vec<Vec<usize>> = f.mult().iter().map(|r| [r.clone(), vec![0; gs]].concat()).collect();
    mult.extend(g.mult().iter().map(|r| [vec![0; fs], r.clone()].concat()));
    make_morphism(src, dst, mult).expect("sum of embeddings")
}

struct Tower {
    levels: Vec<usize>,
    algebras: Vec<FdAlgebra>,
    links: Vec<MultiplicityMorphism>,
}

impl Tower {
    fn new<R: Rng + ?Sized>(rng: &mut R, poset: &FinitePoset, shape: SystemShape) -> Self {
        let levels = level_map(rng, poset);
        let top = levels.iter().copied().max().unwrap_or(0);
        let mut algebras = vec![random_algebra(rng, shape)];
        let mut links = Vec::new();
        for _ in 0..top {
            let link = random_embedding(rng, algebras.last().expect("nonempty"), shape);
            algebras.push(link.dst().clone());
            links.push(link);
        }
        Self {
            levels,
            algebras,
            links,
        }
    }
}

/// A coherent system obtained by pulling a random chain of embeddings back
/// along a monotone level map, optionally summed with a second such system.
pub fn random_coherent_system<R: Rng + ?Sized>(
    rng: &mut R,
    poset: &FinitePoset,
    shape: SystemShape,
) -> InductiveSystem {
    let first = Tower::new(rng, poset, shape);
    let second = rng.gen_bool(0.3).then(|| Tower::new(rng, poset, shape));
    let mut algebras = Vec::with_capacity(poset.len());
    for a in poset.elements() {
        let x = &first.algebras[first.levels[a.0]];
        algebras.push(match &second {
            Some(t) => FdAlgebra::new([x.dims(), t.algebras[t.levels[a.0]].dims()].concat()).expect("valid"),
            None => x.clone(),
        });
    }
    let chain = |t: &Tower, from: usize, to: usize| {
        t.links[from..to]
            .iter()
            .fold(MultiplicityMorphism::identity(&t.algebras[from]), |acc, link| {
                crate::algebra::compose(link, &acc).expect("consecutive links")
            })
    };
    let generators = poset
        .covers()
        .iter()
        .map(|&(a, b)| {
            let f = chain(&first, first.levels[a.0], first.levels[b.0]);
            let m = match &second {
                Some(t) => block_sum(&f, &chain(t, t.levels[a.0], t.levels[b.0])),
                None => f,
            };
            (a, b, m)
        })
        .collect();
    InductiveSystem::new(poset.clone(), algebras, generators).expect("pullback of a chain")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_posets_are_valid_and_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=10 {
            let (p, q) = (random_poset(&mut a, n, 0.3), random_poset(&mut b, n, 0.3));
            assert_eq!(p, q);
            assert_eq!(p.len(), n);
        }
    }

    #[test]
    fn embeddings_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let src = random_algebra(&mut rng, SystemShape::default());
            let m = random_embedding(&mut rng, &src, SystemShape::default());
            assert!(make_morphism(m.src().clone(), m.dst().clone(), m.mult().to_vec()).is_ok());
            assert!(m.dst().dims().iter().all(|&p| p <= 4));
        }
    }

    #[test]
    fn random_systems_are_coherent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let n = rng.gen_range(1..=8);
            let p = random_poset(&mut rng, n, 0.35);
            let s = random_coherent_system(&mut rng, &p, SystemShape::default());
            let r = s.validate_system();
            assert!(r.passed(), "{r:?}");
        }
    }
}
