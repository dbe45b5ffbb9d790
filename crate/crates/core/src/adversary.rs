//! Byzantine injection models.
//!
//! Every (target, step) pair draws from its own generator, seeded by mixing
//! the master seed with the target id and the step, so injected values never
//! depend on the order in which agents are processed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{Point, PointSet};
use crate::id::AgentId;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AdversaryError {
    #[error("invalid adversary: {0}")]
    InvalidInput(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AttackModel {
    /// Uniform draw per coordinate from `[lows_c, highs_c]`.
    BoxRandom { lows: Vec<f64>, highs: Vec<f64> },
    /// Always the same point.
    FixedPoint(Point),
    /// The target's own state moved by `gain` times its offset to `lure`.
    Pursuit { gain: f64, lure: Point },
}

impl AttackModel {
    pub fn dim(&self) -> usize {
        match self {
            AttackModel::BoxRandom { lows, .. } => lows.len(),
            AttackModel::FixedPoint(p) => p.dim(),
            AttackModel::Pursuit { lure, .. } => lure.dim(),
        }
    }
}

/// How many vectors the adversary sends each agent.
#[derive(Clone, Debug, PartialEq)]
pub enum KappaSchedule {
    /// Fill every Byzantine in-edge the topology declares.
    FollowTopology,
    Constant(usize),
    /// `counts[k]` for agent `k + 1`.
    PerAgent(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryModel {
    attack: AttackModel,
    seed: u64,
    kappa: KappaSchedule,
}

impl AdversaryModel {
    pub fn new(
        attack: AttackModel,
        seed: u64,
        kappa: KappaSchedule,
    ) -> Result<Self, AdversaryError> {
        let bad = |m: &str| Err(AdversaryError::InvalidInput(m.into()));
        match &attack {
            AttackModel::BoxRandom { lows, highs } => {
                if lows.is_empty() || lows.len() != highs.len() {
                    return bad("box bounds must be non-empty and of equal length");
                }
                if lows.iter().chain(highs).any(|v| !v.is_finite()) {
                    return bad("box bounds must be finite");
                }
                if lows.iter().zip(highs).any(|(l, h)| l > h) {
                    return bad("box lows must not exceed highs");
                }
            }
            AttackModel::FixedPoint(_) => {}
            AttackModel::Pursuit { gain, .. } => {
                if !gain.is_finite() {
                    return bad("pursuit gain must be finite");
                }
            }
        }
        Ok(AdversaryModel { attack, seed, kappa })
    }

    pub fn attack(&self) -> &AttackModel {
        &self.attack
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same attack with a different master seed.
    pub fn reseeded(&self, seed: u64) -> Self {
        AdversaryModel { seed, ..self.clone() }
    }

    /// Vectors sent to `target` when its topology declares `declared`
    /// Byzantine in-edges.
    pub fn kappa_at(&self, target: AgentId, declared: usize) -> usize {
        match &self.kappa {
            KappaSchedule::FollowTopology => declared,
            KappaSchedule::Constant(k) => *k,
            KappaSchedule::PerAgent(v) => v.get(target.index()).copied().unwrap_or(0),
        }
    }

    /// The `kappa` vectors sent to `target` at step `t`. `observed` holds the
    /// normal states the target receives, its own included.
    pub fn inject(
        &self,
        target: AgentId,
        t: usize,
        observed: &PointSet,
        kappa: usize,
    ) -> Vec<Point> {
        match &self.attack {
            AttackModel::BoxRandom { lows, highs } => {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(self.seed, target, t));
                (0..kappa)
                    .map(|_| {
                        let c: Vec<f64> = lows
                            .iter()
                            .zip(highs)
                            .map(|(&l, &h)| rng.random_range(l..=h))
                            .collect();
                        Point::from(c)
                    })
                    .collect()
            }
            AttackModel::FixedPoint(p) => vec![p.clone(); kappa],
            AttackModel::Pursuit { gain, lure } => {
                let own = observed.get(target).cloned().unwrap_or_else(|| centroid(observed));
                let c: Vec<f64> =
                    own.iter().zip(lure.iter()).map(|(x, l)| x + gain * (l - x)).collect();
                vec![Point::from(c); kappa]
            }
        }
    }
}

fn centroid(set: &PointSet) -> Point {
    let mut c = vec![0.0; set.dim()];
    for p in set.points() {
        for (a, v) in c.iter_mut().zip(p.iter()) {
            *a += v;
        }
    }
    let k = set.len() as f64;
    Point::from(c.into_iter().map(|v| v / k).collect::<Vec<_>>())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the `(target, t)` stream.
pub fn stream_seed(master: u64, target: AgentId, t: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ target.0 as u64) ^ t as u64)
}
