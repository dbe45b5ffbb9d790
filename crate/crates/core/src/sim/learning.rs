//! Linear value-function regression `Q_θ(z) = ψ(z)ᵀθ` over `‖θ‖ ≤ ρ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::SimError;
use crate::adversary::stream_seed;
use crate::geometry::{ConstraintSet, Point};
use crate::id::AgentId;

/// Feature maps `ψ`.
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureMap {
    /// `ψ(z) = z`.
    Identity,
    /// `ψ(z) = (z, 1)`.
    Affine,
    /// Scalar input, `ψ(z) = (1, z, …, z^degree)`.
    Polynomial { degree: usize },
}

impl FeatureMap {
    /// Feature dimension for inputs of dimension `input_dim`.
    pub fn dim(&self, input_dim: usize) -> usize {
        match self {
            FeatureMap::Identity => input_dim,
            FeatureMap::Affine => input_dim + 1,
            FeatureMap::Polynomial { degree } => degree + 1,
        }
    }

    pub fn eval(&self, z: &[f64]) -> Vec<f64> {
        match self {
            FeatureMap::Identity => z.to_vec(),
            FeatureMap::Affine => z.iter().copied().chain([1.0]).collect(),
            FeatureMap::Polynomial { degree } => {
                (0..=*degree).map(|p| z[0].powi(p as i32)).collect()
            }
        }
    }
}

/// Which draws a centralized reference step consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceBatch {
    /// The mean gradient over every agent's draw at step `t`.
    AllAgents,
    /// One draw per step, that of agent `((t − 1) mod m) + 1`, so the
    /// reference sees one sample per step like each agent does.
    RoundRobin,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub z: Vec<f64>,
    pub q: f64,
}

/// Data synthesis settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisSpec {
    pub features: FeatureMap,
    pub input_dim: usize,
    pub theta_star: Point,
    pub samples_per_agent: usize,
    pub z_low: f64,
    pub z_high: f64,
    pub noise_std: f64,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearningProblem {
    pub features: FeatureMap,
    /// `samples[k]` belongs to agent `k + 1`.
    pub samples: Vec<Vec<Sample>>,
    pub rho: f64,
    pub theta_star: Point,
}

impl LearningProblem {
    /// Labels are `ψ(z)ᵀθ* + N(0, noise_std²)` with `z` uniform per coordinate.
    pub fn synthesize(spec: &SynthesisSpec, agents: usize, seed: u64) -> Result<Self, SimError> {
        let n = spec.features.dim(spec.input_dim);
        if spec.theta_star.dim() != n {
            return Err(SimError::InvalidInput(format!(
                "θ* has dimension {} but features have {n}",
                spec.theta_star.dim()
            )));
        }
        if spec.theta_star.norm() > spec.rho {
            return Err(SimError::InvalidInput("‖θ*‖ exceeds ρ".into()));
        }
        if spec.samples_per_agent == 0 || spec.z_low > spec.z_high {
            return Err(SimError::InvalidInput("empty sample specification".into()));
        }
        let noise = Normal::new(0.0, spec.noise_std)
            .map_err(|e| SimError::InvalidInput(format!("noise: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..agents)
            .map(|_| {
                (0..spec.samples_per_agent)
                    .map(|_| {
                        let z: Vec<f64> = (0..spec.input_dim)
                            .map(|_| rng.random_range(spec.z_low..=spec.z_high))
                            .collect();
                        let psi = spec.features.eval(&z);
                        let q = dot(&psi, &spec.theta_star) + noise.sample(&mut rng);
                        Sample { z, q }
                    })
                    .collect()
            })
            .collect();
        Ok(LearningProblem {
            features: spec.features.clone(),
            samples,
            rho: spec.rho,
            theta_star: spec.theta_star.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.theta_star.dim()
    }

    pub fn agents(&self) -> usize {
        self.samples.len()
    }

    pub fn constraint(&self) -> ConstraintSet {
        ConstraintSet::Ball { center: Point::zeros(self.dim()), radius: self.rho }
    }

    /// Half squared residual `½(ψ(z)ᵀθ − Q)²`, whose gradient is [`gradient`].
    ///
    /// [`gradient`]: LearningProblem::gradient
    pub fn loss(&self, theta: &[f64], s: &Sample) -> f64 {
        let r = dot(&self.features.eval(&s.z), theta) - s.q;
        0.5 * r * r
    }

    /// `(Q_θ(z) − Q)ψ(z)`.
    pub fn gradient(&self, theta: &[f64], s: &Sample) -> Vec<f64> {
        let psi = self.features.eval(&s.z);
        let r = dot(&psi, theta) - s.q;
        psi.into_iter().map(|p| r * p).collect()
    }

    /// Index of the sample agent `i` uses at step `t`.
    pub fn sample_index(&self, seed: u64, i: AgentId, t: usize) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, i, t));
        rng.random_range(0..self.samples[i.index()].len())
    }

    /// Centralized projected SGD on the same sample draws as the agents.
    pub fn centralized_reference(
        &self,
        init: &Point,
        sample_seed: u64,
        steps: usize,
        batch: ReferenceBatch,
    ) -> Vec<Point> {
        let m = self.agents();
        let mut theta = init.to_vec();
        let mut path = vec![Point::from(theta.clone())];
        for t in 1..=steps {
            let eta = 1.0 / t as f64;
            let used: Vec<usize> = match batch {
                ReferenceBatch::AllAgents => (0..m).collect(),
                ReferenceBatch::RoundRobin => vec![(t - 1) % m],
            };
            let mut g = vec![0.0; theta.len()];
            for &k in &used {
                let i = AgentId::from_index(k);
                let s = &self.samples[k][self.sample_index(sample_seed, i, t)];
                for (a, v) in g.iter_mut().zip(self.gradient(&theta, s)) {
                    *a += v / used.len() as f64;
                }
            }
            for (th, gi) in theta.iter_mut().zip(&g) {
                *th -= eta * gi;
            }
            project_ball(&mut theta, self.rho);
            path.push(Point::from(theta.clone()));
        }
        path
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn project_ball(x: &mut [f64], rho: f64) {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r > rho {
        x.iter_mut().for_each(|v| *v *= rho / r);
    }
}
