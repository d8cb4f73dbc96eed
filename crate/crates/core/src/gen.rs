//! Seeded samplers for communities and union graphs.
//!
//! Randomness is organised as counter-addressed ChaCha streams: a
//! [`RngStream`] is a `(master_seed, stream_index)` pair, so the stream used
//! by community `i` of trial `t` never depends on execution order.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    build_union, ensure_valid, CommunityInstance, Edge, GraphTemplate, ModelKind, ModelSpec,
    SizeLaw, UnionGraph, VertexId, YqLaw,
};

/// Addresses one independent random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngStream {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Seed for trial `trial_index` under `master_seed`: the first word of the
/// trial's stream.
pub fn derive_trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    RngStream::new(master_seed, trial_index).rng().next_u64()
}

/// Uniform subset sampling by partial Fisher–Yates over a reusable index
/// array. The array is restored after each draw, so every draw starts from
/// the identity permutation and costs `O(size)`.
pub struct SubsetSampler {
    perm: Vec<u32>,
    swaps: Vec<usize>,
}

impl SubsetSampler {
    pub fn new(n: usize) -> Self {
        SubsetSampler {
            perm: (1..=n as u32).collect(),
            swaps: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// A uniform `size`-subset of `[n]`, sorted ascending.
    pub fn sample<R: Rng + ?Sized>(&mut self, size: usize, rng: &mut R) -> Result<Vec<VertexId>> {
        let n = self.perm.len();
        if size > n {
            return Err(Error::precondition(format!("subset size {size} exceeds n = {n}")));
        }
        self.swaps.clear();
        for i in 0..size {
            let j = rng.random_range(i..n);
            self.perm.swap(i, j);
            self.swaps.push(j);
        }
        let mut out: Vec<VertexId> = self.perm[..size].iter().map(|&v| VertexId::new(v)).collect();
        for i in (0..size).rev() {
            self.perm.swap(i, self.swaps[i]);
        }
        out.sort_unstable();
        Ok(out)
    }
}

pub fn sample_subset<R: Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Result<Vec<VertexId>> {
    SubsetSampler::new(n).sample(size, rng)
}

fn canonical_edges(mut edges: Vec<Edge>) -> Vec<Edge> {
    for e in &mut edges {
        if e.0 > e.1 {
            *e = (e.1, e.0);
        }
    }
    edges.sort_unstable();
    edges
}

/// Uniform random copy of `template` in `K_n`.
pub fn embed_fixed_graph<R: Rng + ?Sized>(
    template: &GraphTemplate,
    sampler: &mut SubsetSampler,
    rng: &mut R,
) -> Result<CommunityInstance> {
    let x = template.vertices;
    if x > sampler.n() {
        return Err(Error::precondition(format!(
            "template has {x} vertices but n = {}",
            sampler.n()
        )));
    }
    let members = sampler.sample(x, rng)?;
    // template vertex t is placed on image[t - 1]
    let mut image = members.clone();
    for i in (1..image.len()).rev() {
        let j = rng.random_range(0..=i);
        image.swap(i, j);
    }
    let edges = template
        .edges
        .iter()
        .map(|&[a, b]| (image[a as usize - 1], image[b as usize - 1]))
        .collect();
    Ok(CommunityInstance::from_canonical(members, canonical_edges(edges)))
}

/// Pairs `{i, j}` (0-based positions into a `size`-set) kept independently
/// with probability `q`.
fn bernoulli_pairs<R: Rng + ?Sized>(size: usize, q: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if size < 2 || q <= 0.0 {
        return out;
    }
    if q >= 1.0 || q > 0.1 {
        let all = q >= 1.0;
        for j in 1..size {
            for i in 0..j {
                if all || rng.random::<f64>() < q {
                    out.push((i, j));
                }
            }
        }
        return out;
    }
    // geometric skipping over the pairs in (j, i<j) order
    let log_q = (1.0 - q).ln();
    let mut j = 1usize;
    let mut i: i64 = -1;
    while j < size {
        let u: f64 = rng.random();
        let skip = ((1.0 - u).ln() / log_q).floor();
        i += 1 + if skip >= i64::MAX as f64 { i64::MAX / 2 } else { skip as i64 };
        while i >= j as i64 && j < size {
            i -= j as i64;
            j += 1;
        }
        if j < size {
            out.push((i as usize, j));
        }
    }
    out
}

fn draw_index<R: Rng + ?Sized>(weights: impl Iterator<Item = f64> + Clone, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last_positive = i;
            acc += w;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

fn bernoulli_on_subset<R: Rng + ?Sized>(
    size: usize,
    q: f64,
    sampler: &mut SubsetSampler,
    rng: &mut R,
) -> Result<CommunityInstance> {
    let members = sampler.sample(size, rng)?;
    // members are a uniform set and edges are exchangeable, so positions
    // within the sorted member list can be used directly
    let edges = bernoulli_pairs(size, q, rng)
        .into_iter()
        .map(|(i, j)| (members[i], members[j]))
        .collect();
    Ok(CommunityInstance::from_canonical(members, canonical_edges(edges)))
}

/// Bernoulli community: draw `(Y, Q)`, place `min(Y, n)` uniform vertices,
/// keep each pair with probability `Q`.
pub fn sample_bernoulli_community<R: Rng + ?Sized>(
    law: &YqLaw,
    sampler: &mut SubsetSampler,
    rng: &mut R,
) -> Result<CommunityInstance> {
    let atom = &law.support[draw_index(law.support.iter().map(|a| a.w), rng)];
    let size = (atom.y as usize).min(sampler.n());
    bernoulli_on_subset(size, atom.q, sampler, rng)
}

/// Clique community: a complete graph on `min(Y, n)` uniform vertices.
pub fn sample_clique_community<R: Rng + ?Sized>(
    law: &SizeLaw,
    sampler: &mut SubsetSampler,
    rng: &mut R,
) -> Result<CommunityInstance> {
    let atom = &law.support[draw_index(law.support.iter().map(|a| a.w), rng)];
    let size = (atom.size as usize).min(sampler.n());
    bernoulli_on_subset(size, 1.0, sampler, rng)
}

/// Community `index` of a model, drawn from `rng`.
pub fn sample_community<R: Rng + ?Sized>(
    kind: &ModelKind,
    index: usize,
    sampler: &mut SubsetSampler,
    rng: &mut R,
) -> Result<CommunityInstance> {
    match kind {
        ModelKind::FixedGraphs(templates) => {
            embed_fixed_graph(&templates[index % templates.len()], sampler, rng)
        }
        ModelKind::BernoulliYq(law) => sample_bernoulli_community(law, sampler, rng),
        ModelKind::CliqueSizes(law) => sample_clique_community(law, sampler, rng),
    }
}

/// Samples the `m` communities of `spec` independently, community `i` from
/// stream `(seed, i)`, and forms their union.
pub fn sample_union(spec: &ModelSpec, seed: u64) -> Result<UnionGraph> {
    ensure_valid(spec)?;
    let mut sampler = SubsetSampler::new(spec.n);
    let communities = (0..spec.m)
        .map(|i| {
            let mut rng = RngStream::new(seed, i as u64).rng();
            sample_community(&spec.kind, i, &mut sampler, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    build_union(spec.n, communities)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SizeAtom, SizeLaw};

    fn ids(v: &[VertexId]) -> Vec<u32> {
        v.iter().map(|v| v.get()).collect()
    }

    /// |observed - expected| within 3 binomial standard deviations.
    fn within_3_sigma(count: usize, trials: usize, p: f64) -> bool {
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        ((count as f64) - trials as f64 * p).abs() <= 3.0 * sigma
    }

    #[test]
    fn forced_subsets() {
        let mut rng = RngStream::new(1, 0).rng();
        assert_eq!(ids(&sample_subset(5, 5, &mut rng).unwrap()), vec![1, 2, 3, 4, 5]);
        assert!(sample_subset(5, 0, &mut rng).unwrap().is_empty());
        assert!(sample_subset(5, 6, &mut rng).is_err());
    }

    #[test]
    fn subset_inclusion_frequencies() {
        let mut rng = RngStream::new(7, 0).rng();
        let mut sampler = SubsetSampler::new(6);
        let trials = 100_000;
        let mut counts = [0usize; 6];
        for _ in 0..trials {
            for v in sampler.sample(2, &mut rng).unwrap() {
                counts[v.idx()] += 1;
            }
        }
        for c in counts {
            assert!(within_3_sigma(c, trials, 1.0 / 3.0), "{counts:?}");
        }
    }

    #[test]
    fn sampler_restores_identity() {
        let mut rng = RngStream::new(3, 0).rng();
        let mut sampler = SubsetSampler::new(10);
        for size in 0..=10 {
            sampler.sample(size, &mut rng).unwrap();
            assert_eq!(sampler.perm, (1..=10).collect::<Vec<_>>());
        }
    }

    #[test]
    fn k2_placements_uniform() {
        let mut rng = RngStream::new(11, 0).rng();
        let mut sampler = SubsetSampler::new(4);
        let trials = 60_000;
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..trials {
            let c = embed_fixed_graph(&GraphTemplate::k2(), &mut sampler, &mut rng).unwrap();
            assert_eq!(c.edges().len(), 1);
            *counts.entry(c.edges()[0]).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        for &c in counts.values() {
            assert!(within_3_sigma(c, trials, 1.0 / 6.0), "{counts:?}");
        }
    }

    #[test]
    fn cherry_on_three_vertices() {
        let mut rng = RngStream::new(5, 0).rng();
        let mut sampler = SubsetSampler::new(3);
        for _ in 0..100 {
            let c = embed_fixed_graph(&GraphTemplate::cherry(), &mut sampler, &mut rng).unwrap();
            assert_eq!(ids(c.members()), vec![1, 2, 3]);
            let mut deg = c.member_degrees();
            deg.sort_unstable();
            assert_eq!(deg, vec![1, 1, 2]);
        }
    }

    #[test]
    fn triangle_degrees() {
        let mut rng = RngStream::new(5, 1).rng();
        let mut sampler = SubsetSampler::new(5);
        let c = embed_fixed_graph(&GraphTemplate::clique(3), &mut sampler, &mut rng).unwrap();
        assert_eq!(c.edges().len(), 3);
        assert!(c.member_degrees().iter().all(|&d| d == 2));
        let mut tiny = SubsetSampler::new(2);
        assert!(embed_fixed_graph(&GraphTemplate::clique(3), &mut tiny, &mut rng).is_err());
    }

    #[test]
    fn bernoulli_q1_is_triangle() {
        let law = YqLaw {
            support: vec![crate::model::YqAtom { y: 3, q: 1.0, w: 1.0 }],
        };
        let mut rng = RngStream::new(9, 0).rng();
        let mut sampler = SubsetSampler::new(10);
        for _ in 0..200 {
            let c = sample_bernoulli_community(&law, &mut sampler, &mut rng).unwrap();
            assert_eq!(c.members().len(), 3);
            assert_eq!(c.edges().len(), 3);
        }
    }

    #[test]
    fn bernoulli_single_pair_half() {
        let law = YqLaw {
            support: vec![crate::model::YqAtom { y: 2, q: 0.5, w: 1.0 }],
        };
        let mut rng = RngStream::new(13, 0).rng();
        let mut sampler = SubsetSampler::new(10);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| {
                sample_bernoulli_community(&law, &mut sampler, &mut rng)
                    .unwrap()
                    .edges()
                    .len()
                    == 1
            })
            .count();
        assert!(within_3_sigma(hits, trials, 0.5), "{hits}");
    }

    #[test]
    fn bernoulli_truncates_to_n() {
        let law = YqLaw {
            support: vec![crate::model::YqAtom { y: 15, q: 1.0, w: 1.0 }],
        };
        let mut rng = RngStream::new(1, 2).rng();
        let mut sampler = SubsetSampler::new(10);
        let c = sample_bernoulli_community(&law, &mut sampler, &mut rng).unwrap();
        assert_eq!(c.members().len(), 10);
        assert_eq!(c.edges().len(), 45);
    }

    #[test]
    fn sparse_bernoulli_edge_count_mean() {
        // geometric-skip branch: E[#edges] = C(40, 2) * 0.05 = 39
        let mut rng = RngStream::new(17, 0).rng();
        let trials = 20_000;
        let total: usize = (0..trials).map(|_| bernoulli_pairs(40, 0.05, &mut rng).len()).sum();
        let mean = total as f64 / trials as f64;
        let sigma = (780.0 * 0.05 * 0.95 / trials as f64).sqrt();
        assert!((mean - 39.0).abs() <= 4.0 * sigma, "{mean}");
        let pairs = bernoulli_pairs(40, 0.05, &mut rng);
        assert!(pairs.iter().all(|&(i, j)| i < j && j < 40));
        assert!(pairs.windows(2).all(|w| (w[0].1, w[0].0) < (w[1].1, w[1].0)));
    }

    #[test]
    fn clique_laws() {
        let mut rng = RngStream::new(21, 0).rng();
        let mut two = SubsetSampler::new(2);
        let c = sample_clique_community(&SizeLaw::single(2), &mut two, &mut rng).unwrap();
        assert_eq!(ids(c.members()), vec![1, 2]);
        assert_eq!(c.edges().len(), 1);

        let law = SizeLaw {
            support: vec![SizeAtom { size: 0, w: 0.5 }, SizeAtom { size: 3, w: 0.5 }],
        };
        let mut six = SubsetSampler::new(6);
        let trials = 10_000;
        let empty = (0..trials)
            .filter(|_| {
                sample_clique_community(&law, &mut six, &mut rng)
                    .unwrap()
                    .members()
                    .is_empty()
            })
            .count();
        assert!(within_3_sigma(empty, trials, 0.5), "{empty}");
    }

    #[test]
    fn union_examples() {
        let g = sample_union(&ModelSpec::fixed(2, 1, vec![GraphTemplate::k2()]), 0).unwrap();
        assert_eq!(g.edge_count(), 1);
        let spec = ModelSpec::fixed(3, 2, vec![GraphTemplate::k2()]);
        assert_eq!(sample_union(&spec, 99).unwrap(), sample_union(&spec, 99).unwrap());
        let bad = ModelSpec::fixed(3, 2, vec![]);
        assert!(matches!(sample_union(&bad, 0), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn streams_differ() {
        let a = RngStream::new(1, 0).rng().next_u64();
        let b = RngStream::new(1, 1).rng().next_u64();
        let c = RngStream::new(2, 0).rng().next_u64();
        assert!(a != b && a != c);
        assert_eq!(derive_trial_seed(5, 3), derive_trial_seed(5, 3));
    }
}
