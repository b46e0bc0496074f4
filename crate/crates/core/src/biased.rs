//! Importance-sampled transport of `ũ = I·u` on a piecewise-constant importance table.
//!
//! Flights are tracked cell by cell in (radial, direction) space. Inside a
//! cell the collision rate is `κ̃_s = κ_s⟨I⟩/I` and the weight decays at
//! `κ_t − κ̃_s`; crossing into a cell with a different importance multiplies
//! the weight by `I_to / I_from`. A score at the inner sphere is divided by
//! the current importance, since the importance equals 1 on the target.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;

use crate::adjoint::{build_importance, DirectionMesh, ImportanceTable, RadialMesh};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::transport::{
    run, sample_collision_distance, uniform, HistoryTally, Mode, ProblemConfig, Source, Status, TallyResult,
    Transport, MAX_EVENTS,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedParticle<T> {
    /// Signed distance along the flight from the point of closest approach (`r·μ`).
    pub x: T,
    /// Impact parameter `r·√(1−μ²)`, fixed during a flight.
    pub y: T,
    pub j: usize,
    pub l: usize,
    pub weight: T,
    /// Importance of the cell the weight currently refers to.
    pub importance: T,
    pub time: T,
}

impl<T: Real> BiasedParticle<T> {
    pub fn r(&self) -> T {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn mu(&self) -> T {
        let r = self.r();
        if r > T::zero() { (self.x / r).max(-T::one()).min(T::one()) } else { T::one() }
    }
}

/// `w · I_to / I_from`.
pub fn cross_cell_weight_update<T: Real>(w: T, i_from: T, i_to: T) -> Result<T> {
    if !(i_from > T::zero()) {
        return Err(Error::DegenerateImportance { cells: Vec::new() });
    }
    Ok(w * i_to / i_from)
}

#[derive(Debug, Clone)]
pub struct BiasedEngine<T> {
    r1: T,
    kappa_t: T,
    mode: Mode,
    fixed: bool,
    table: Option<Arc<ImportanceTable<T>>>,
    setup_seconds: f64,
}

impl<T: Real> BiasedEngine<T> {
    /// Engine that builds its own importance (once in stationary mode, at
    /// every step in unsteady mode).
    pub fn new(cfg: &ProblemConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Self::check_supported(cfg)?;
        Ok(Self {
            r1: cfg.r_outer,
            kappa_t: cfg.kappa_t,
            mode: cfg.mode,
            fixed: false,
            table: None,
            setup_seconds: 0.0,
        })
    }

    /// Engine on a caller-supplied table, used as-is for every step.
    pub fn with_table(cfg: &ProblemConfig<T>, table: ImportanceTable<T>) -> Result<Self> {
        cfg.validate()?;
        Self::check_supported(cfg)?;
        table.check_usable()?;
        Ok(Self {
            r1: cfg.r_outer,
            kappa_t: cfg.kappa_t,
            mode: cfg.mode,
            fixed: true,
            table: Some(Arc::new(table)),
            setup_seconds: 0.0,
        })
    }

    fn check_supported(cfg: &ProblemConfig<T>) -> Result<()> {
        if cfg.source != Source::OuterBoundary {
            return Err(Error::Config("importance sampling needs the outer_boundary source".into()));
        }
        if !(cfg.min_inner_radius() > T::zero()) {
            return Err(Error::Config("importance sampling needs an inner sphere".into()));
        }
        Ok(())
    }

    /// Table in use for the current step.
    pub fn table(&self) -> Option<&ImportanceTable<T>> {
        self.table.as_deref()
    }

    fn table_ref(&self) -> &ImportanceTable<T> {
        self.table.as_deref().expect("begin_step builds the table")
    }

    fn rebuild(&mut self, cfg: &ProblemConfig<T>, t0: T) -> Result<()> {
        let started = Instant::now();
        let table = importance_for(cfg, t0)?;
        if !table.flagged().is_empty() {
            log::warn!("{} importance cells clamped to the floor value", table.flagged().len());
        }
        self.table = Some(Arc::new(table));
        self.setup_seconds += started.elapsed().as_secs_f64();
        Ok(())
    }
}

/// Importance table the engine uses for the step starting at `t0`: uniform
/// radial mesh on `[R0, R1]` when stationary, the fixed-`Δr` mesh truncated at
/// `R0(t0)` when unsteady.
pub fn importance_for<T: Real>(cfg: &ProblemConfig<T>, t0: T) -> Result<ImportanceTable<T>> {
    let r0 = cfg.inner_radius(t0);
    let rmesh = match cfg.mode {
        Mode::Stationary => RadialMesh::uniform(r0, cfg.r_outer, cfg.n_r)?,
        Mode::Unsteady => RadialMesh::truncated(r0, cfg.r_outer, cfg.n_r)?,
    };
    let dmesh = DirectionMesh::new(cfg.n_mu)?;
    let table = build_importance(&rmesh, &dmesh, cfg.kappa_s, cfg.kappa_t)?;
    table.check_usable()?;
    Ok(table)
}

impl<T: Real> Transport<T> for BiasedEngine<T> {
    type Particle = BiasedParticle<T>;

    fn begin_step(&mut self, cfg: &ProblemConfig<T>, t0: T) -> Result<()> {
        if self.fixed {
            return Ok(());
        }
        if self.table.is_none() || self.mode == Mode::Unsteady {
            self.rebuild(cfg, t0)?;
        }
        Ok(())
    }

    fn setup_seconds(&self) -> f64 {
        self.setup_seconds
    }

    fn emit<R: Rng>(&self, rng: &mut R, time_share: T, t0: T) -> Result<BiasedParticle<T>> {
        let table = self.table_ref();
        let (l, mu) = table.sample_boundary(uniform(rng), uniform(rng))?;
        let j = table.rmesh().n_cells() - 1;
        let i_b = table.boundary_importance(l);
        let w0 = time_share * table.boundary_emission_weight();
        let inside = table.importance(j, l);
        Ok(BiasedParticle {
            x: self.r1 * mu,
            y: self.r1 * ((T::one() - mu) * (T::one() + mu)).max(T::zero()).sqrt(),
            j,
            l,
            weight: cross_cell_weight_update(w0, i_b, inside)?,
            importance: inside,
            time: t0,
        })
    }

    fn census(&self, p: &mut BiasedParticle<T>, tally: &mut HistoryTally<T>) -> Option<Status> {
        let table = self.table_ref();
        let r = p.r();
        if r < table.rmesh().r_inner() {
            tally.score = tally.score + p.weight / p.importance;
            return Some(Status::ExitedInner);
        }
        let j = table.rmesh().locate(r);
        let l = table.dmesh().locate(p.mu());
        let i_new = table.importance(j, l);
        p.weight = p.weight * i_new / p.importance;
        p.importance = i_new;
        p.j = j;
        p.l = l;
        None
    }

    fn transport<R: Rng>(
        &self,
        p: &mut BiasedParticle<T>,
        t_end: T,
        rng: &mut R,
        tally: &mut HistoryTally<T>,
        history: u64,
    ) -> Result<Status> {
        let table = self.table_ref();
        let redges = table.rmesh().edges();
        let medges = table.dmesh().edges();
        let n_r = table.rmesh().n_cells();
        let n_mu = table.dmesh().n_cells();
        for _ in 0..MAX_EVENTS {
            let y = p.y;
            let y2 = y * y;
            let (j, l) = (p.j, p.l);
            let lo = redges[j];
            let hi = redges[j + 1];
            let inward = p.x < T::zero() && y < lo;
            let x_radial = if inward {
                -((lo * lo - y2).max(T::zero())).sqrt()
            } else {
                (hi * hi - y2).max(T::zero()).sqrt()
            };
            let s_radial = (x_radial - p.x).max(T::zero());
            let s_dir = if l + 1 < n_mu && y > T::zero() {
                let m = medges[l + 1];
                let x_edge = m * y / ((T::one() - m) * (T::one() + m)).sqrt();
                (x_edge - p.x).max(T::zero())
            } else {
                T::infinity()
            };
            let ks = table.kappa_s_tilde(j, l);
            let s_coll = sample_collision_distance(rng, ks);
            let s_census = (t_end - p.time).max(T::zero());
            let s = s_radial.min(s_dir).min(s_coll).min(s_census);

            p.weight = p.weight * (-(self.kappa_t - ks) * s).exp();
            p.time = p.time + s;

            if s == s_radial {
                p.x = x_radial;
                if inward {
                    if j == 0 {
                        tally.score = tally.score + p.weight / p.importance;
                        return Ok(Status::ExitedInner);
                    }
                    p.j = j - 1;
                } else {
                    if j + 1 == n_r {
                        return Ok(Status::ExitedOuter);
                    }
                    p.j = j + 1;
                }
            } else if s == s_dir {
                p.x = p.x + s;
                p.l = l + 1;
            } else if s == s_coll {
                let r = (p.x + s).hypot(y);
                let (l_new, mu) = table.sample_direction(j, uniform(rng), uniform(rng));
                p.x = r * mu;
                p.y = r * ((T::one() - mu) * (T::one() + mu)).max(T::zero()).sqrt();
                p.l = l_new;
                p.importance = table.importance(j, l_new);
                continue;
            } else {
                p.x = p.x + s;
                return Ok(Status::Census);
            }
            let i_new = table.importance(p.j, p.l);
            p.weight = cross_cell_weight_update(p.weight, p.importance, i_new)?;
            p.importance = i_new;
        }
        Err(Error::EventLoopStall { history, limit: MAX_EVENTS })
    }
}

/// Importance-sampled run of `cfg`.
pub fn run_biased<T: Real>(cfg: &ProblemConfig<T>) -> Result<TallyResult<T>> {
    let mut engine = BiasedEngine::new(cfg)?;
    run(cfg, &mut engine)
}

/// Importance-sampled run of `cfg` on a fixed table.
pub fn run_biased_with_table<T: Real>(cfg: &ProblemConfig<T>, table: ImportanceTable<T>) -> Result<TallyResult<T>> {
    let mut engine = BiasedEngine::with_table(cfg, table)?;
    run(cfg, &mut engine)
}
