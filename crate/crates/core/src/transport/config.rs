use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Fixed geometry, histories followed until they leave or fall below the weight cutoff.
    Stationary,
    /// Time stepping with census at every step and a moving inner sphere.
    Unsteady,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source<T> {
    /// Lambert (cosine-law) inflow through the outer sphere.
    OuterBoundary,
    /// Unit isotropic emission from the sphere `r = radius`.
    Shell { radius: T },
}

/// Everything needed to run one transport problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig<T> {
    pub mode: Mode,
    pub r_outer: T,
    /// Inner radius at t = 0.
    pub alpha: T,
    /// Inner-sphere speed: `R0(t) = alpha + beta·t`. Zero in stationary mode.
    pub beta: T,
    pub kappa_s: T,
    pub kappa_t: T,
    /// End time. A stationary run integrates the steady flux over `[0, t_final]`.
    pub t_final: T,
    pub dt: T,
    /// Histories emitted per step (unsteady mode).
    pub particles_per_step: usize,
    /// Total histories (stationary mode).
    pub histories: usize,
    pub n_r: usize,
    pub n_mu: usize,
    /// Cells of the scalar-flux profile tally; zero disables it.
    pub tally_cells: usize,
    pub seed: u64,
    pub source: Source<T>,
    /// Emission stops at this time (unsteady mode); `None` keeps it on until `t_final`.
    pub source_end: Option<T>,
    pub weight_cutoff: T,
    pub workers: usize,
}

impl<T: Real> ProblemConfig<T> {
    /// Stationary outer-boundary problem with the desk defaults.
    pub fn stationary(r_inner: T, r_outer: T, kappa_s: T, kappa_t: T, histories: usize, seed: u64) -> Self {
        Self {
            mode: Mode::Stationary,
            r_outer,
            alpha: r_inner,
            beta: T::zero(),
            kappa_s,
            kappa_t,
            t_final: T::one(),
            dt: T::one(),
            particles_per_step: histories,
            histories,
            n_r: 90,
            n_mu: 240,
            tally_cells: 0,
            seed,
            source: Source::OuterBoundary,
            source_end: None,
            weight_cutoff: T::lit(1e-12),
            workers: 1,
        }
    }

    /// Unsteady outer-boundary problem with the inner sphere `alpha + beta·t`.
    #[allow(clippy::too_many_arguments)]
    pub fn unsteady(alpha: T, beta: T, r_outer: T, kappa_s: T, kappa_t: T, t_final: T, dt: T, per_step: usize, seed: u64) -> Self {
        Self {
            mode: Mode::Unsteady,
            beta,
            t_final,
            dt,
            particles_per_step: per_step,
            histories: 0,
            n_r: 20,
            n_mu: 60,
            ..Self::stationary(alpha, r_outer, kappa_s, kappa_t, 0, seed)
        }
    }

    pub fn inner_radius(&self, t: T) -> T {
        match self.mode {
            Mode::Stationary => self.alpha,
            Mode::Unsteady => self.alpha + self.beta * t,
        }
    }

    pub fn n_steps(&self) -> usize {
        match self.mode {
            Mode::Stationary => 1,
            Mode::Unsteady => (self.t_final / self.dt).round().to_usize().unwrap_or(0),
        }
    }

    /// Fraction of step `m` during which the source is on (1 for full steps,
    /// partial for the step containing `source_end`, 0 afterwards).
    pub fn source_fraction(&self, m: usize) -> T {
        if self.mode == Mode::Stationary {
            return if m == 0 { T::one() } else { T::zero() };
        }
        let start = self.dt * T::from_usize_lossy(m);
        let end = self.source_end.unwrap_or(self.t_final).min(self.t_final);
        ((end - start) / self.dt).max(T::zero()).min(T::one())
    }

    /// Histories emitted at step `m`.
    pub fn emitted_in_step(&self, m: usize) -> usize {
        match self.mode {
            Mode::Stationary => if m == 0 { self.histories } else { 0 },
            Mode::Unsteady => {
                if self.source_fraction(m) > T::zero() { self.particles_per_step } else { 0 }
            }
        }
    }

    pub fn total_histories(&self) -> usize {
        (0..self.n_steps()).map(|m| self.emitted_in_step(m)).sum()
    }

    /// Smallest inner radius over the run (the profile tally starts there).
    pub fn min_inner_radius(&self) -> T {
        self.inner_radius(T::zero()).min(self.inner_radius(self.t_final))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.r_outer > T::zero()) {
            return bad(format!("r1 must be positive, got {}", self.r_outer));
        }
        if !(self.kappa_t >= T::zero()) || !(self.kappa_s >= T::zero()) {
            return bad("cross sections must be non-negative".into());
        }
        if self.kappa_s > self.kappa_t {
            return bad("kappa_s exceeds kappa_t".into());
        }
        if !(self.alpha >= T::zero()) || !(self.alpha < self.r_outer) {
            return bad(format!("inner radius {} must lie in [0, r1)", self.alpha));
        }
        if self.n_r == 0 || self.n_mu == 0 {
            return bad("n_r and n_mu must be positive".into());
        }
        if !(self.weight_cutoff >= T::zero()) {
            return bad("weight_cutoff must be non-negative".into());
        }
        match self.source {
            Source::Shell { radius } => {
                if radius < self.alpha || radius > self.r_outer {
                    return bad(format!("source radius {radius} outside the domain"));
                }
            }
            Source::OuterBoundary => {}
        }
        match self.mode {
            Mode::Stationary => {
                if self.histories < 2 {
                    return bad("need at least 2 histories".into());
                }
                if !(self.t_final > T::zero()) {
                    return bad("t_final must be positive".into());
                }
                if self.beta != T::zero() {
                    return bad("beta must be 0 in stationary mode".into());
                }
            }
            Mode::Unsteady => {
                if !(self.dt > T::zero()) || !(self.t_final > T::zero()) {
                    return bad("dt and t_final must be positive".into());
                }
                let steps = self.t_final / self.dt;
                if (steps - steps.round()).abs() > T::lit(1e-9) * steps.max(T::one()) {
                    return bad(format!("t_final / dt = {steps} is not an integer"));
                }
                let end = self.inner_radius(self.t_final);
                if !(end > T::zero()) || !(end < self.r_outer) {
                    return bad(format!("inner radius at t_final is {end}, outside (0, r1)"));
                }
                if self.particles_per_step == 0 || self.total_histories() < 2 {
                    return bad("need at least 2 histories".into());
                }
                if let Some(e) = self.source_end {
                    if !(e > T::zero()) {
                        return bad("source_end must be positive".into());
                    }
                }
            }
        }
        Ok(())
    }
}
