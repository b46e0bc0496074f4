use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{advance_free_flight, distance_to_shells, Shell};
use crate::real::Real;

use super::config::{ProblemConfig, Source};
use super::driver::{HistoryTally, Transport, MAX_EVENTS};
use super::sampling::{sample_collision_distance, sample_lambert_incoming, scatter_direction};
use super::tally::tally_track_length;
use super::Status;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle<T> {
    pub r: T,
    pub mu: T,
    pub weight: T,
    pub time: T,
}

/// Analog tracking with implicit capture: the weight decays at
/// `κ_t − κ_s` along flights and collisions only redirect.
#[derive(Debug, Clone)]
pub struct AnalogEngine<T> {
    r0: T,
    r1: T,
    kappa_s: T,
    kappa_t: T,
    cutoff: T,
    source: Source<T>,
    tally_edges: Option<Vec<T>>,
}

impl<T: Real> AnalogEngine<T> {
    pub fn new(cfg: &ProblemConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let tally_edges = (cfg.tally_cells > 0).then(|| {
            let lo = cfg.min_inner_radius();
            let n = cfg.tally_cells;
            let dr = (cfg.r_outer - lo) / T::from_usize_lossy(n);
            let mut e: Vec<T> = (0..=n).map(|k| lo + dr * T::from_usize_lossy(k)).collect();
            e[n] = cfg.r_outer;
            e
        });
        Ok(Self {
            r0: cfg.inner_radius(T::zero()),
            r1: cfg.r_outer,
            kappa_s: cfg.kappa_s,
            kappa_t: cfg.kappa_t,
            cutoff: cfg.weight_cutoff,
            source: cfg.source,
            tally_edges,
        })
    }

    /// Current (frozen for the step) inner radius.
    pub fn inner_radius(&self) -> T {
        self.r0
    }
}

impl<T: Real> Transport<T> for AnalogEngine<T> {
    type Particle = Particle<T>;

    fn begin_step(&mut self, cfg: &ProblemConfig<T>, t0: T) -> Result<()> {
        self.r0 = cfg.inner_radius(t0);
        Ok(())
    }

    fn tally_edges(&self) -> Option<&[T]> {
        self.tally_edges.as_deref()
    }

    fn emit<R: Rng>(&self, rng: &mut R, time_share: T, t0: T) -> Result<Particle<T>> {
        Ok(match self.source {
            Source::OuterBoundary => Particle {
                r: self.r1,
                mu: sample_lambert_incoming(rng),
                weight: time_share * T::lit(0.5),
                time: t0,
            },
            Source::Shell { radius } => Particle {
                r: radius,
                mu: scatter_direction(rng),
                weight: time_share,
                time: t0,
            },
        })
    }

    fn census(&self, p: &mut Particle<T>, tally: &mut HistoryTally<T>) -> Option<Status> {
        if p.r < self.r0 {
            tally.score = tally.score + p.weight;
            return Some(Status::ExitedInner);
        }
        None
    }

    fn transport<R: Rng>(
        &self,
        p: &mut Particle<T>,
        t_end: T,
        rng: &mut R,
        tally: &mut HistoryTally<T>,
        history: u64,
    ) -> Result<Status> {
        let absorption = self.kappa_t - self.kappa_s;
        for _ in 0..MAX_EVENTS {
            if p.weight < self.cutoff {
                return Ok(Status::AbsorbedCutoff);
            }
            let s_coll = sample_collision_distance(rng, self.kappa_s);
            let (s_wall, shell) = distance_to_shells(p.r, p.mu, self.r0, self.r1)?;
            let s_census = t_end - p.time;
            let s = s_coll.min(s_wall).min(s_census).max(T::zero());
            if let Some(edges) = &self.tally_edges {
                tally_track_length(p.r, p.mu, s, p.weight, absorption, edges, |c, v| tally.add_psi(c, v));
            }
            p.weight = super::attenuate_weight(p.weight, absorption, s);
            p.time = p.time + s;
            if s == s_wall && s_wall <= s_coll && s_wall <= s_census {
                match shell {
                    Shell::Inner => {
                        p.r = self.r0;
                        tally.score = tally.score + p.weight;
                        return Ok(Status::ExitedInner);
                    }
                    Shell::Outer => {
                        p.r = self.r1;
                        return Ok(Status::ExitedOuter);
                    }
                }
            }
            let (r, mu) = advance_free_flight(p.r, p.mu, s);
            p.r = r.max(self.r0).min(self.r1);
            p.mu = mu;
            if s == s_census && s_census < s_coll {
                return Ok(Status::Census);
            }
            p.mu = scatter_direction(rng);
        }
        Err(Error::EventLoopStall { history, limit: MAX_EVENTS })
    }
}
