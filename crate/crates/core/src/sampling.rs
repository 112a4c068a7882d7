//! Seeded variate generation with reproducible substreams.
//!
//! A stream is a ChaCha8 generator keyed by the master seed and positioned on
//! its own 64-bit stream id, so replication `k` of a study can own stream `k`
//! and produce the same variates no matter which thread runs it.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::distributions::{Distribution, PowerBurr};
use crate::error::{positive, Result};
use crate::family::FamilySpec;
use crate::params::ParamVector;

/// The identity of a stream, enough to recreate it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub master_seed: u64,
    pub stream_id: u64,
}

#[derive(Debug, Clone)]
pub struct RngStream {
    id: StreamId,
    rng: ChaCha8Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            id: StreamId {
                master_seed,
                stream_id,
            },
            rng,
        }
    }

    pub fn id(&self) -> StreamId {
        self.id
    }

    pub fn master_seed(&self) -> u64 {
        self.id.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.id.stream_id
    }

    /// A fresh stream under the same master seed, determined by this stream's
    /// id and `tag` only (not by how much of this stream has been consumed).
    pub fn derive(&self, tag: u64) -> RngStream {
        let id = splitmix64(splitmix64(self.id.stream_id) ^ splitmix64(tag.wrapping_add(0x5851_f42d_4c95_7f2d)));
        RngStream::new(self.id.master_seed, id)
    }

    /// `(0, 1]`, safe to take the logarithm of.
    #[inline]
    pub fn open_unit(&mut self) -> f64 {
        1.0 - self.rng.random::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Unit-mean Gamma, drawn on the log scale.
///
/// Shapes below one use the boost `G_a = G_{a+1} U^{1/a}`, applied in logs so
/// that shapes near `e^-30` do not flush to zero.
#[derive(Debug, Clone, Copy)]
pub struct GammaUnitMean {
    pub shape: f64,
    inner: Gamma<f64>,
    boosted: bool,
    ln_shape: f64,
}

impl GammaUnitMean {
    pub fn new(shape: f64) -> Result<Self> {
        positive("shape", shape)?;
        let boosted = shape < 1.0;
        let inner = Gamma::new(if boosted { shape + 1.0 } else { shape }, 1.0)
            .expect("shape validated above");
        Ok(Self {
            shape,
            inner,
            boosted,
            ln_shape: shape.ln(),
        })
    }

    pub fn sample_ln(&self, rng: &mut RngStream) -> f64 {
        let g = self.inner.sample(rng);
        let mut ln_g = g.ln();
        if self.boosted {
            ln_g += rng.open_unit().ln() / self.shape;
        }
        ln_g - self.ln_shape
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        self.sample_ln(rng).exp()
    }
}

/// A family compiled for repeated sampling.
#[derive(Debug, Clone)]
pub enum Sampler {
    LogNormal { xi: f64, sigma: f64 },
    LogGamma { xi: f64, g: GammaUnitMean },
    Weibull { inv_shape: f64, scale: f64 },
    Pareto { alpha: f64, beta: f64 },
    Gamma { mean: f64, g: GammaUnitMean },
    PowerBurr {
        pb: PowerBurr,
        g_theta: GammaUnitMean,
        g_alpha: GammaUnitMean,
    },
}

impl Sampler {
    pub fn new(dist: &Distribution) -> Result<Self> {
        Ok(match *dist {
            Distribution::LogNormal { xi, sigma } => Sampler::LogNormal { xi, sigma },
            Distribution::LogGamma { xi, theta } => Sampler::LogGamma {
                xi,
                g: GammaUnitMean::new(theta)?,
            },
            Distribution::Weibull { shape, scale } => Sampler::Weibull {
                inv_shape: 1.0 / shape,
                scale,
            },
            Distribution::Pareto { alpha, beta } => Sampler::Pareto { alpha, beta },
            Distribution::Gamma { mean, shape } => Sampler::Gamma {
                mean,
                g: GammaUnitMean::new(shape)?,
            },
            Distribution::PowerBurr(pb) => Sampler::PowerBurr {
                pb,
                g_theta: GammaUnitMean::new(pb.phi.theta.get())?,
                g_alpha: GammaUnitMean::new(pb.phi.alpha.get())?,
            },
        })
    }

    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        Self::new(&Distribution::new(spec)?)
    }

    /// One loss amount. Values that underflow are returned as the smallest
    /// positive normal double so that downstream logarithms stay finite.
    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        let z = match self {
            Sampler::LogNormal { xi, sigma } => {
                let n: f64 = StandardNormal.sample(rng);
                (xi + sigma * n).exp()
            }
            Sampler::LogGamma { xi, g } => (xi * g.sample(rng)).exp_m1(),
            Sampler::Weibull { inv_shape, scale } => {
                let e: f64 = Exp1.sample(rng);
                scale * e.powf(*inv_shape)
            }
            Sampler::Pareto { alpha, beta } => beta * (-rng.open_unit().ln() / alpha).exp_m1(),
            Sampler::Gamma { mean, g } => mean * g.sample(rng),
            Sampler::PowerBurr {
                pb,
                g_theta,
                g_alpha,
            } => {
                let ln_x = g_theta.sample_ln(rng) - g_alpha.sample_ln(rng);
                pb.forward_ln(ln_x).exp()
            }
        };
        z.max(f64::MIN_POSITIVE)
    }

    pub fn draw_n(&self, rng: &mut RngStream, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }
}

pub fn draw_gamma_unit_mean(stream: &mut RngStream, shape: f64) -> Result<f64> {
    Ok(GammaUnitMean::new(shape)?.sample(stream))
}

pub fn draw_powerburr(stream: &mut RngStream, phi: &ParamVector) -> Result<f64> {
    Ok(Sampler::new(&Distribution::PowerBurr(PowerBurr::new(*phi)))?.draw(stream))
}

pub fn draw_family(stream: &mut RngStream, spec: &FamilySpec) -> Result<f64> {
    Ok(Sampler::from_spec(spec)?.draw(stream))
}

pub fn draw_poisson(stream: &mut RngStream, lambda: f64) -> Result<u64> {
    positive("lambda", lambda)?;
    let dist = Poisson::new(lambda).map_err(|_| crate::error::Error::InvalidParameter {
        name: "lambda",
        value: lambda,
        reason: "outside the Poisson sampler's supported range",
    })?;
    Ok(dist.sample(stream) as u64)
}
