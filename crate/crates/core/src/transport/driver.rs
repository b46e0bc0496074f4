//! Step-by-step history bank shared by the analog and biased engines.
//!
//! Every history owns a ChaCha8 stream selected by its emission index, and
//! finished histories are folded into the statistics in bank order, so the
//! result does not depend on the number of worker threads.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::stats::{figure_of_merit, SampleAccumulator};

use super::config::{Mode, ProblemConfig};
use super::tally::shell_volume;
use super::Status;

/// Guard against histories that never terminate.
pub const MAX_EVENTS: u64 = 1_000_000;

/// Scores accumulated by one history.
#[derive(Debug, Clone, Default)]
pub struct HistoryTally<T> {
    /// Weight delivered to the inner sphere.
    pub score: T,
    psi: Vec<(usize, T)>,
}

impl<T: Real> HistoryTally<T> {
    pub fn new() -> Self {
        Self { score: T::zero(), psi: Vec::new() }
    }

    #[inline]
    pub fn add_psi(&mut self, cell: usize, value: T) {
        self.psi.push((cell, value));
    }
}

/// One engine's tracking rules; the driver owns time stepping and statistics.
pub trait Transport<T: Real>: Sync {
    type Particle: Send;

    /// Called before step `m` with its start time (0 in stationary mode).
    fn begin_step(&mut self, cfg: &ProblemConfig<T>, t0: T) -> Result<()>;

    /// Emits one source particle. `time_share` is the source time carried by
    /// each particle (`Δt / M`, or `t_final / N` in stationary mode).
    fn emit<R: Rng>(&self, rng: &mut R, time_share: T, t0: T) -> Result<Self::Particle>;

    /// Adjusts a surviving particle to the state of a new step. Returns a
    /// terminal status if the particle is consumed by the change.
    fn census(&self, p: &mut Self::Particle, tally: &mut HistoryTally<T>) -> Option<Status>;

    /// Tracks until termination or until time `t_end` ([`Status::Census`]).
    fn transport<R: Rng>(
        &self,
        p: &mut Self::Particle,
        t_end: T,
        rng: &mut R,
        tally: &mut HistoryTally<T>,
        history: u64,
    ) -> Result<Status>;

    /// Radial edges of the scalar-flux tally, if enabled.
    fn tally_edges(&self) -> Option<&[T]> {
        None
    }

    /// Seconds spent building the importance function so far.
    fn setup_seconds(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StatusCounts {
    pub absorbed_cutoff: u64,
    pub exited_inner: u64,
    pub exited_outer: u64,
    pub census: u64,
}

impl StatusCounts {
    fn add(&mut self, s: Status) {
        match s {
            Status::AbsorbedCutoff => self.absorbed_cutoff += 1,
            Status::ExitedInner => self.exited_inner += 1,
            Status::ExitedOuter => self.exited_outer += 1,
            Status::Census | Status::InFlight => self.census += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.absorbed_cutoff + self.exited_inner + self.exited_outer + self.census
    }
}

/// Volume-averaged scalar flux per shell from track lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellProfile<T> {
    pub edges: Vec<T>,
    pub r_center: Vec<T>,
    pub psi: Vec<T>,
    pub psi_std: Vec<T>,
    pub crossings: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TallyResult<T> {
    pub histories: u64,
    /// Estimated flux onto the inner sphere.
    pub flux: T,
    /// Sample variance of the per-history contributions.
    pub sample_variance: T,
    /// Variance of the flux estimate (`sample_variance / histories`).
    pub mean_variance: T,
    /// Fraction of histories that scored.
    pub reach_fraction: T,
    pub status: StatusCounts,
    pub profile: Option<ShellProfile<T>>,
    /// Time spent building importance functions (included in `wall_seconds`).
    pub setup_seconds: f64,
    pub wall_seconds: f64,
}

impl<T: Real> TallyResult<T> {
    pub fn std_dev(&self) -> T {
        self.mean_variance.sqrt()
    }

    /// Figure of merit over the full wall time.
    pub fn fom_total(&self) -> Option<f64> {
        figure_of_merit(self.mean_variance.to_f64_lossy(), self.wall_seconds).ok()
    }

    /// Figure of merit excluding importance-function construction.
    pub fn fom_transport(&self) -> Option<f64> {
        figure_of_merit(self.mean_variance.to_f64_lossy(), self.wall_seconds - self.setup_seconds).ok()
    }
}

struct Live<P, T> {
    index: u64,
    rng: ChaCha8Rng,
    particle: P,
    tally: HistoryTally<T>,
}

/// Random stream of history `index`.
pub fn history_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

struct Finalizer<T> {
    scale: T,
    flux: SampleAccumulator<T>,
    reached: u64,
    counts: StatusCounts,
    cells: Vec<SampleAccumulator<T>>,
    crossings: Vec<u64>,
    scratch: Vec<T>,
}

impl<T: Real> Finalizer<T> {
    fn new(n_total: usize, n_cells: usize) -> Self {
        Self {
            scale: T::from_usize_lossy(n_total),
            flux: SampleAccumulator::new(),
            reached: 0,
            counts: StatusCounts::default(),
            cells: vec![SampleAccumulator::new(); n_cells],
            crossings: vec![0; n_cells],
            scratch: vec![T::zero(); n_cells],
        }
    }

    fn finish(&mut self, tally: HistoryTally<T>, status: Status) {
        self.flux.push(self.scale * tally.score);
        if tally.score > T::zero() {
            self.reached += 1;
        }
        self.counts.add(status);
        if self.cells.is_empty() {
            return;
        }
        for &(c, v) in &tally.psi {
            self.scratch[c] = self.scratch[c] + v;
            self.crossings[c] += 1;
        }
        for &(c, _) in &tally.psi {
            if self.scratch[c] != T::zero() {
                self.cells[c].push(self.scale * self.scratch[c]);
                self.scratch[c] = T::zero();
            }
        }
    }
}

/// Runs every history of `cfg` through `engine`.
pub fn run<T: Real, E: Transport<T>>(cfg: &ProblemConfig<T>, engine: &mut E) -> Result<TallyResult<T>> {
    cfg.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let unsteady = cfg.mode == Mode::Unsteady;
    let n_total = cfg.total_histories();
    let edges = engine.tally_edges().map(<[T]>::to_vec);
    let mut fin = Finalizer::new(n_total, edges.as_ref().map_or(0, |e| e.len() - 1));
    let mut live: Vec<Live<E::Particle, T>> = Vec::new();
    let mut next_index = 0u64;

    for m in 0..cfg.n_steps() {
        let t0 = if unsteady { cfg.dt * T::from_usize_lossy(m) } else { T::zero() };
        let t_end = if unsteady { t0 + cfg.dt } else { T::infinity() };
        engine.begin_step(cfg, t0)?;
        let eng: &E = engine;
        if m > 0 {
            let mut keep = Vec::with_capacity(live.len());
            for mut h in live {
                match eng.census(&mut h.particle, &mut h.tally) {
                    Some(status) => fin.finish(h.tally, status),
                    None => keep.push(h),
                }
            }
            live = keep;
        }
        let k = cfg.emitted_in_step(m);
        if k > 0 {
            let span = if unsteady { cfg.dt * cfg.source_fraction(m) } else { cfg.t_final };
            let time_share = span / T::from_usize_lossy(k);
            for _ in 0..k {
                let mut rng = history_rng(cfg.seed, next_index);
                let particle = eng.emit(&mut rng, time_share, t0)?;
                live.push(Live { index: next_index, rng, particle, tally: HistoryTally::new() });
                next_index += 1;
            }
        }
        let statuses: Vec<Result<Status>> = pool.install(|| {
            live.par_iter_mut()
                .map(|h| eng.transport(&mut h.particle, t_end, &mut h.rng, &mut h.tally, h.index))
                .collect()
        });
        let mut keep = Vec::with_capacity(live.len());
        for (h, status) in live.into_iter().zip(statuses) {
            match status? {
                Status::Census => keep.push(h),
                s => fin.finish(h.tally, s),
            }
        }
        live = keep;
    }
    for h in live {
        fin.finish(h.tally, Status::Census);
    }

    let n = fin.flux.count();
    let moments = fin.flux.finalize()?;
    let profile = edges.map(|edges| {
        let mut psi = Vec::new();
        let mut psi_std = Vec::new();
        for (c, acc) in fin.cells.iter_mut().enumerate() {
            let missing = n - acc.count();
            acc.push_repeated(T::zero(), missing);
            let vol = shell_volume(edges[c], edges[c + 1]) * cfg.t_final;
            match acc.finalize() {
                Ok(mo) => {
                    psi.push(mo.mean / vol);
                    psi_std.push(mo.mean_variance.sqrt() / vol);
                }
                Err(_) => {
                    psi.push(T::zero());
                    psi_std.push(T::zero());
                }
            }
        }
        ShellProfile {
            r_center: edges.windows(2).map(|w| (w[0] + w[1]) * T::lit(0.5)).collect(),
            edges,
            psi,
            psi_std,
            crossings: fin.crossings.clone(),
        }
    });
    Ok(TallyResult {
        histories: n,
        flux: moments.mean,
        sample_variance: moments.sigma2,
        mean_variance: moments.mean_variance,
        reach_fraction: T::lit(fin.reached as f64 / n as f64),
        status: fin.counts,
        profile,
        setup_seconds: engine.setup_seconds(),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
