//! Randomized ε-nets on the unit sphere `S^{n-1}`.
//!
//! A net is built as a maximal ε-separated set: uniform candidates are
//! accepted iff every accepted point is farther than ε away, and construction
//! stops after a run of consecutive rejections. A maximal separated set covers
//! the sphere at radius ε, and disjoint caps of radius ε/2 give the
//! cardinality bound `(1 + 2/ε)^n`.
//!
//! In five or more dimensions uniform candidates leave small uncovered
//! pockets long after the rejection run gets long. Construction therefore
//! ends with a pocket-filling pass: descents on an overlap potential from
//! uniform starts, accepting any point they reach that is farther than ε
//! from the net. Both phases only ever add ε-separated points.
//!
//! Neighbour queries go through a kd-tree that is rebuilt as the net grows.
//! The tree only prunes with exact coordinate gaps, so accept/reject decisions
//! are the same as a linear scan.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::rng;

/// Unit-norm tolerance for stored points.
pub const UNIT_TOL: f64 = 1e-12;
/// Default run of consecutive rejections that ends the random phase.
pub const DEFAULT_SATURATION_RUN: u64 = 1_000;
pub const DEFAULT_POLISH_PATIENCE: u64 = 2_000;
const CANDIDATE_STREAM: u64 = 0;
const PROBE_STREAM: u64 = 1;
const POLISH_STREAM: u64 = 2;
const STALL_SQ: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Saturation {
    /// Stop after `factor * (current cardinality + 1)` consecutive rejections.
    Adaptive { factor: u64 },
    /// Stop after a fixed number of consecutive rejections.
    Fixed(u64),
}

impl Default for Saturation {
    fn default() -> Self {
        Saturation::Fixed(DEFAULT_SATURATION_RUN)
    }
}

impl Saturation {
    fn limit(self, cardinality: usize) -> u64 {
        match self {
            Saturation::Adaptive { factor } => factor.saturating_mul(cardinality as u64 + 1),
            Saturation::Fixed(k) => k,
        }
    }
}

#[inline]
fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone, Copy)]
enum Node {
    Leaf {
        lo: u32,
        hi: u32,
    },
    Split {
        dim: u16,
        value: f64,
        left: u32,
        right: u32,
    },
}

/// kd-tree over the first `built` points plus a linear buffer of points added
/// since the last rebuild.
#[derive(Debug, Clone)]
struct KdIndex {
    dim: usize,
    perm: Vec<u32>,
    nodes: Vec<Node>,
    built: usize,
    total: usize,
}

impl KdIndex {
    fn new(dim: usize) -> Self {
        KdIndex {
            dim,
            perm: Vec::new(),
            nodes: Vec::new(),
            built: 0,
            total: 0,
        }
    }

    #[inline]
    fn point<'a>(&self, points: &'a [f64], id: u32) -> &'a [f64] {
        &points[id as usize * self.dim..(id as usize + 1) * self.dim]
    }

    fn insert(&mut self, points: &[f64]) {
        self.total += 1;
        let pending = self.total - self.built;
        if pending > 32 && pending * 64 > self.built {
            self.rebuild(points);
        }
    }

    fn rebuild(&mut self, points: &[f64]) {
        self.perm = (0..self.total as u32).collect();
        self.nodes.clear();
        let mut perm = core::mem::take(&mut self.perm);
        self.build_node(points, &mut perm, 0);
        self.perm = perm;
        self.built = self.total;
    }

    fn build_node(&mut self, points: &[f64], perm: &mut [u32], offset: usize) -> u32 {
        let id = self.nodes.len() as u32;
        if perm.len() <= LEAF_SIZE {
            self.nodes.push(Node::Leaf {
                lo: offset as u32,
                hi: (offset + perm.len()) as u32,
            });
            return id;
        }
        let mut best = (0usize, -1.0f64);
        for d in 0..self.dim {
            let (lo, hi) = perm.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
                let v = points[p as usize * self.dim + d];
                (lo.min(v), hi.max(v))
            });
            if hi - lo > best.1 {
                best = (d, hi - lo);
            }
        }
        let d = best.0;
        let mid = perm.len() / 2;
        let key = |p: &u32| points[*p as usize * self.dim + d];
        perm.select_nth_unstable_by(mid, |a, b| key(a).total_cmp(&key(b)));
        let value = key(&perm[mid]);
        self.nodes.push(Node::Leaf { lo: 0, hi: 0 });
        let (left_perm, right_perm) = perm.split_at_mut(mid);
        let left = self.build_node(points, left_perm, offset);
        let right = self.build_node(points, right_perm, offset + mid);
        self.nodes[id as usize] = Node::Split {
            dim: d as u16,
            value,
            left,
            right,
        };
        id
    }

    /// Is some stored point within distance `eps` (inclusive) of `x`?
    fn any_within(&self, points: &[f64], x: &[f64], eps: f64) -> bool {
        let eps_sq = eps * eps;
        let pending = (self.built..self.total).any(|i| dist_sq(self.point(points, i as u32), x) <= eps_sq);
        pending || (!self.nodes.is_empty() && self.any_within_node(points, 0, x, eps_sq))
    }

    fn any_within_node(&self, points: &[f64], node: u32, x: &[f64], eps_sq: f64) -> bool {
        match self.nodes[node as usize] {
            Node::Leaf { lo, hi } => self.perm[lo as usize..hi as usize]
                .iter()
                .any(|&p| dist_sq(self.point(points, p), x) <= eps_sq),
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = x[dim as usize] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.any_within_node(points, near, x, eps_sq)
                    || (diff * diff <= eps_sq && self.any_within_node(points, far, x, eps_sq))
            }
        }
    }

    fn within(&self, points: &[f64], x: &[f64], r: f64, out: &mut Vec<u32>) {
        out.clear();
        let r_sq = r * r;
        for i in self.built..self.total {
            if dist_sq(self.point(points, i as u32), x) <= r_sq {
                out.push(i as u32);
            }
        }
        if !self.nodes.is_empty() {
            self.within_node(points, 0, x, r_sq, out);
        }
    }

    fn within_node(&self, points: &[f64], node: u32, x: &[f64], r_sq: f64, out: &mut Vec<u32>) {
        match self.nodes[node as usize] {
            Node::Leaf { lo, hi } => {
                for &p in &self.perm[lo as usize..hi as usize] {
                    if dist_sq(self.point(points, p), x) <= r_sq {
                        out.push(p);
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = x[dim as usize] - value;
                if diff <= 0.0 || diff * diff <= r_sq {
                    self.within_node(points, left, x, r_sq, out);
                }
                if diff > 0.0 || diff * diff <= r_sq {
                    self.within_node(points, right, x, r_sq, out);
                }
            }
        }
    }

    fn nearest_distance(&self, points: &[f64], x: &[f64]) -> f64 {
        let mut best = (self.built..self.total)
            .map(|i| dist_sq(self.point(points, i as u32), x))
            .fold(f64::INFINITY, f64::min);
        if !self.nodes.is_empty() {
            self.nearest_node(points, 0, x, &mut best);
        }
        libm::sqrt(best)
    }

    fn nearest_node(&self, points: &[f64], node: u32, x: &[f64], best: &mut f64) {
        match self.nodes[node as usize] {
            Node::Leaf { lo, hi } => {
                for &p in &self.perm[lo as usize..hi as usize] {
                    *best = best.min(dist_sq(self.point(points, p), x));
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = x[dim as usize] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.nearest_node(points, near, x, best);
                if diff * diff <= *best {
                    self.nearest_node(points, far, x, best);
                }
            }
        }
    }
}

/// A finite ε-separated set of unit vectors.
#[derive(Debug, Clone)]
pub struct EpsilonNet {
    pub eps: f64,
    pub dim: usize,
    points: Vec<f64>,
    pub construction_seed: u64,
    /// Consecutive rejections when construction stopped.
    pub saturation_rejections: u64,
    /// Whether construction stopped on the saturation rule rather than on the
    /// candidate budget.
    pub saturated: bool,
    /// Total candidates drawn.
    pub candidates: u64,
    /// Outcome of the pocket-filling pass, if it ran.
    pub polish: Option<PolishReport>,
    index: KdIndex,
}

/// Settings for the pocket-filling pass.
///
/// Each descent starts from a uniform point and follows the gradient of
/// `sum_q max(0, reach·ε - |x - q|)^2` on the sphere. A point farther than ε
/// from the net is accepted as soon as one is reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polish {
    /// Interaction radius as a multiple of ε.
    pub reach: f64,
    pub step: f64,
    pub max_steps: u32,
    /// Stop after this many consecutive descents that find nothing.
    pub patience: u64,
}

impl Default for Polish {
    fn default() -> Self {
        Polish {
            reach: 1.1,
            step: 0.5,
            max_steps: 60,
            patience: DEFAULT_POLISH_PATIENCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolishReport {
    pub descents: u64,
    pub added: usize,
}

impl PartialEq for EpsilonNet {
    fn eq(&self, other: &Self) -> bool {
        self.eps == other.eps && self.dim == other.dim && self.points == other.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetBuilder {
    pub dim: usize,
    pub eps: f64,
    pub seed: u64,
    pub saturation: Saturation,
    /// Hard cap on the number of candidates drawn.
    pub max_candidates: Option<u64>,
    /// Pocket filling after the random phase; `None` skips it.
    pub polish: Option<Polish>,
}

impl NetBuilder {
    pub fn new(dim: usize, eps: f64, seed: u64) -> Self {
        NetBuilder {
            dim,
            eps,
            seed,
            saturation: Saturation::default(),
            max_candidates: None,
            polish: Some(Polish::default()),
        }
    }

    pub fn polish(mut self, polish: Option<Polish>) -> Self {
        self.polish = polish;
        self
    }

    pub fn saturation(mut self, saturation: Saturation) -> Self {
        self.saturation = saturation;
        self
    }

    pub fn max_candidates(mut self, budget: u64) -> Self {
        self.max_candidates = Some(budget);
        self
    }

    pub fn build(&self) -> Result<EpsilonNet> {
        validate(self.dim, self.eps)?;
        if self.saturation == Saturation::Fixed(0) || self.saturation == (Saturation::Adaptive { factor: 0 }) {
            return Err(Error::invalid("saturation must be at least 1"));
        }
        let dim = self.dim;
        let mut net = EpsilonNet {
            eps: self.eps,
            dim,
            points: Vec::new(),
            construction_seed: self.seed,
            saturation_rejections: 0,
            saturated: false,
            candidates: 0,
            polish: None,
            index: KdIndex::new(dim),
        };
        let mut r = rng::stream(self.seed, CANDIDATE_STREAM);
        let mut x = vec![0.0; dim];
        let mut run = 0u64;
        loop {
            if run >= self.saturation.limit(net.len()) {
                net.saturated = true;
                break;
            }
            if self.max_candidates.is_some_and(|cap| net.candidates >= cap) {
                break;
            }
            rng::unit_vector(&mut r, &mut x);
            net.candidates += 1;
            if net.index.any_within(&net.points, &x, self.eps) {
                run += 1;
            } else {
                net.push(&x);
                run = 0;
            }
        }
        net.saturation_rejections = run;
        if let Some(settings) = self.polish {
            if !(settings.reach > 1.0 && settings.step > 0.0 && settings.patience > 0) {
                return Err(Error::invalid("polish needs reach > 1, step > 0 and patience > 0"));
            }
            net.polish = Some(polish(&mut net, settings, self.seed));
        }
        Ok(net)
    }
}

fn polish(net: &mut EpsilonNet, settings: Polish, seed: u64) -> PolishReport {
    let dim = net.dim;
    let eps_sq = net.eps * net.eps;
    let reach = net.eps * settings.reach;
    let before = net.len();
    let mut r = rng::stream(seed, POLISH_STREAM);
    let mut x = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    let mut near = Vec::new();
    let mut descents = 0u64;
    let mut misses = 0u64;
    while misses < settings.patience {
        descents += 1;
        rng::unit_vector(&mut r, &mut x);
        let mut hit = false;
        for _ in 0..settings.max_steps {
            net.index.within(&net.points, &x, reach, &mut near);
            if near.iter().all(|&q| dist_sq(net.point(q as usize), &x) > eps_sq) {
                hit = true;
                break;
            }
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &q in &near {
                let p = net.point(q as usize);
                let d = libm::sqrt(dist_sq(p, &x));
                if d == 0.0 {
                    continue;
                }
                let w = (reach - d) / d;
                grad.iter_mut()
                    .zip(p)
                    .zip(&x)
                    .for_each(|((g, pk), xk)| *g += w * (xk - pk));
            }
            let radial = dot(&grad, &x);
            let mut moved = 0.0;
            x.iter_mut().zip(&grad).for_each(|(xk, g)| {
                let delta = settings.step * (g - radial * *xk);
                moved += delta * delta;
                *xk += delta;
            });
            if moved < STALL_SQ {
                break;
            }
            let norm = libm::sqrt(dot(&x, &x));
            x.iter_mut().for_each(|v| *v /= norm);
        }
        if hit && net.index.nearest_distance(&net.points, &x) > net.eps {
            net.push(&x);
            misses = 0;
        } else {
            misses += 1;
        }
    }
    PolishReport {
        descents,
        added: net.len() - before,
    }
}

fn validate(dim: usize, eps: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::invalid("eps must lie in (0, 2)"));
    }
    Ok(())
}

/// Builds a net with the default pocket-filling pass.
pub fn build_net(dim: usize, eps: f64, seed: u64, saturation: Saturation) -> Result<EpsilonNet> {
    NetBuilder::new(dim, eps, seed).saturation(saturation).build()
}

impl EpsilonNet {
    /// Wraps an explicit point set after checking unit norms and separation.
    pub fn from_points(dim: usize, eps: f64, points: &[Vec<f64>]) -> Result<Self> {
        validate(dim, eps)?;
        let mut net = EpsilonNet {
            eps,
            dim,
            points: Vec::with_capacity(points.len() * dim),
            construction_seed: 0,
            saturation_rejections: 0,
            saturated: false,
            candidates: 0,
            polish: None,
            index: KdIndex::new(dim),
        };
        for p in points {
            if p.len() != dim {
                return Err(Error::invalid("net point has wrong dimension"));
            }
            if libm::fabs(libm::sqrt(dot(p, p)) - 1.0) > UNIT_TOL {
                return Err(Error::invalid("net point is not a unit vector"));
            }
            if net.index.any_within(&net.points, p, eps) {
                return Err(Error::invalid("net points are not eps-separated"));
            }
            net.push(p);
        }
        Ok(net)
    }

    fn push(&mut self, x: &[f64]) {
        self.points.extend_from_slice(x);
        self.index.insert(&self.points);
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    /// `n · ln(1 + 2/ε)`, the log of the covering-number bound.
    pub fn log_cardinality_bound(&self) -> f64 {
        log_cardinality_bound(self.dim, self.eps)
    }

    pub fn within_cardinality_bound(&self) -> bool {
        libm::log(self.len() as f64) <= self.log_cardinality_bound()
    }

    /// Smallest distance between two distinct points (linear scan over pairs).
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            let p = self.point(i);
            for j in (i + 1)..self.len() {
                best = best.min(dist_sq(p, self.point(j)));
            }
        }
        libm::sqrt(best)
    }

    /// Distance from `x` to the nearest net point.
    pub fn nearest_distance(&self, x: &[f64]) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        self.index.nearest_distance(&self.points, x)
    }
}

/// `n · ln(1 + 2/ε)`.
pub fn log_cardinality_bound(dim: usize, eps: f64) -> f64 {
    dim as f64 * libm::log1p(2.0 / eps)
}

/// Largest distance from `probes` uniform unit vectors to the net.
pub fn verify_covering(net: &EpsilonNet, probes: usize, seed: u64) -> f64 {
    let mut r = rng::stream(seed, PROBE_STREAM);
    let mut x = vec![0.0; net.dim];
    let mut worst = 0.0f64;
    for _ in 0..probes {
        rng::unit_vector(&mut r, &mut x);
        worst = worst.max(net.nearest_distance(&x));
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetSpectralBound {
    /// `max_{x in net} |x'Ax|`.
    pub max_quad: f64,
    /// `max_quad / (1 - 2 eps)`.
    pub bound: f64,
}

/// Net upper bound on the spectral norm of a symmetric matrix.
///
/// For an ε-net with ε < 1/2, `max_net |x'Ax| <= ‖A‖ <= bound`.
pub fn net_spectral_bound(a: &Matrix, net: &EpsilonNet) -> Result<NetSpectralBound> {
    if !a.is_square() || a.rows() != net.dim {
        return Err(Error::invalid("matrix shape does not match the net dimension"));
    }
    if net.eps >= 0.5 {
        return Err(Error::invalid("net spectral bound needs eps < 1/2"));
    }
    if a.asymmetry() > 1e-10 {
        return Err(Error::invalid("matrix is not symmetric"));
    }
    let max_quad = net.iter().map(|x| libm::fabs(dot(x, &a.matvec(x)))).fold(0.0, f64::max);
    Ok(NetSpectralBound {
        max_quad,
        bound: max_quad / (1.0 - 2.0 * net.eps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_spectral_norm;

    #[test]
    fn one_dimensional_net_is_the_two_signs() {
        let net = build_net(1, 0.25, 3, Saturation::default()).unwrap();
        assert_eq!(net.len(), 2);
        assert!(net.iter().all(|p| p[0] == 1.0 || p[0] == -1.0));
        assert!(net.saturated);
    }

    #[test]
    fn circle_net_cardinality_window() {
        // Chord 0.25 <-> angle 2 asin(0.125) ~ 0.2507 rad: a cover needs at
        // least ceil(2 pi / 0.5014) = 13 points, a packing at most 26.
        let angle = 2.0 * libm::asin(0.125);
        let lower = libm::ceil(2.0 * core::f64::consts::PI / (2.0 * angle)) as usize;
        let upper = libm::ceil(2.0 * core::f64::consts::PI / angle) as usize;
        assert_eq!((lower, upper), (13, 26));
        for seed in 0..10 {
            let net = build_net(2, 0.25, seed, Saturation::default()).unwrap();
            assert!((lower..=upper).contains(&net.len()), "seed {seed}: {}", net.len());
            assert!(net.min_pairwise_distance() > 0.25);
        }
    }

    #[test]
    fn circle_covering_by_exhaustive_angles() {
        let net = build_net(2, 0.25, 1, Saturation::Fixed(10_000)).unwrap();
        let steps = 200_000;
        let mut worst = 0.0f64;
        for k in 0..steps {
            let t = 2.0 * core::f64::consts::PI * k as f64 / steps as f64;
            let x = [libm::cos(t), libm::sin(t)];
            let d = net
                .iter()
                .map(|p| libm::sqrt(dist_sq(p, &x)))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
        assert!(worst <= 0.25, "{worst}");
        assert!(verify_covering(&net, 100_000, 9) <= 0.25);
    }

    #[test]
    fn single_point_gap_is_the_antipode() {
        let net = EpsilonNet::from_points(2, 0.25, &[vec![1.0, 0.0]]).unwrap();
        let gap = verify_covering(&net, 100_000, 4);
        assert!(gap > 1.99 && gap <= 2.0, "{gap}");
        assert_eq!(net.nearest_distance(&[1.0, 0.0]), 0.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(build_net(2, 0.0, 0, Saturation::default()).is_err());
        assert!(build_net(2, 2.0, 0, Saturation::default()).is_err());
        assert!(build_net(2, f64::NAN, 0, Saturation::default()).is_err());
        assert!(build_net(0, 0.3, 0, Saturation::default()).is_err());
        assert!(build_net(2, 0.3, 0, Saturation::Fixed(0)).is_err());
        assert!(EpsilonNet::from_points(2, 0.5, &[vec![1.0, 0.0], vec![0.9, 0.1]]).is_err());
        assert!(EpsilonNet::from_points(2, 0.5, &[vec![2.0, 0.0]]).is_err());
    }

    #[test]
    fn indexed_construction_matches_linear_scan() {
        for (dim, eps) in [(3usize, 0.3), (5, 0.5)] {
            let net = NetBuilder::new(dim, eps, 17)
                .max_candidates(3_000)
                .polish(None)
                .build()
                .unwrap();
            let mut r = rng::stream(17, CANDIDATE_STREAM);
            let mut accepted: Vec<Vec<f64>> = Vec::new();
            let mut x = vec![0.0; dim];
            for _ in 0..net.candidates {
                rng::unit_vector(&mut r, &mut x);
                if accepted.iter().all(|p| dist_sq(p, &x) > eps * eps) {
                    accepted.push(x.clone());
                }
            }
            assert_eq!(accepted.len(), net.len());
            for (i, p) in accepted.iter().enumerate() {
                assert_eq!(p.as_slice(), net.point(i));
            }
        }
    }

    #[test]
    fn polish_fills_pockets_and_keeps_separation() {
        let raw = NetBuilder::new(4, 0.3, 8).polish(None).build().unwrap();
        let net = NetBuilder::new(4, 0.3, 8).build().unwrap();
        let report = net.polish.unwrap();
        assert_eq!(net.len(), raw.len() + report.added);
        assert_eq!(net.point(0), raw.point(0));
        assert!(net.min_pairwise_distance() > 0.3);
        assert!(verify_covering(&net, 100_000, 21) <= 0.3);
        assert!(NetBuilder::new(4, 0.3, 8)
            .polish(Some(Polish {
                reach: 1.0,
                ..Polish::default()
            }))
            .build()
            .is_err());
    }

    #[test]
    fn identity_and_zero_bounds() {
        let net = build_net(5, 0.25, 2, Saturation::Fixed(200)).unwrap();
        let b = net_spectral_bound(&Matrix::identity(5), &net).unwrap();
        assert!((b.max_quad - 1.0).abs() < 1e-12);
        assert!((b.bound - 2.0).abs() < 1e-12);
        assert_eq!(net_spectral_bound(&Matrix::zeros(5, 5), &net).unwrap().bound, 0.0);
    }

    #[test]
    fn spectral_bound_preconditions() {
        let coarse = build_net(2, 0.6, 0, Saturation::default()).unwrap();
        assert!(net_spectral_bound(&Matrix::identity(2), &coarse).is_err());
        let net = build_net(2, 0.25, 0, Saturation::default()).unwrap();
        let mut a = Matrix::identity(2);
        a[(0, 1)] = 1e-6;
        assert!(net_spectral_bound(&a, &net).is_err());
        assert!(net_spectral_bound(&Matrix::identity(3), &net).is_err());
    }

    #[test]
    fn sandwich_on_the_circle() {
        let net = build_net(2, 0.25, 5, Saturation::default()).unwrap();
        let mut r = rng::stream(5, 99);
        for _ in 0..200 {
            let (x, y, z) = (rng::gaussian(&mut r), rng::gaussian(&mut r), rng::gaussian(&mut r));
            let a = Matrix::from_rows(&[vec![x, y], vec![y, z]]).unwrap();
            let exact = sym_spectral_norm(&a).unwrap();
            let b = net_spectral_bound(&a, &net).unwrap();
            assert!(b.max_quad <= exact + 1e-12 && exact <= b.bound + 1e-12);
        }
    }
}
