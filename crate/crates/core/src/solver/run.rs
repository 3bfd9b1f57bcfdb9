use alloc::boxed::Box;
use alloc::vec::Vec;

use super::picard::{Discretization, PicardOutcome};
use super::{default_epsilon, Algorithm, BoundarySpec, SolverConfig, State};
use crate::diagnostics::{
    dissipation, electrostatic_energy, entropy, evaluate_flags, extrema, mass, smallness_margin, Flags,
    InvariantPolicy, StepReport,
};
use crate::error::{Error, Result};
use crate::fespace::Field;
use crate::mesh::{check_acuteness, Mesh};

/// Number of time steps covering `[0, t_final]`.
pub fn num_steps(t_final: f64, k: f64) -> usize {
    let m = libm::floor(t_final / k + 1e-9);
    if m > 0.0 {
        m as usize
    } else {
        0
    }
}

/// Everything a finished run produced.
#[derive(Clone, Debug)]
pub struct RunSummary {
    /// Initial report followed by one report per step.
    pub reports: Vec<StepReport>,
    pub final_state: State,
    pub policy: InvariantPolicy,
}

impl RunSummary {
    /// Whether every flag of every report holds.
    pub fn invariants_hold(&self) -> bool {
        self.reports.iter().all(|r| r.flags.all())
    }
}

/// A run in progress: discretization, current state and the reports so far.
#[derive(Clone, Debug)]
pub struct Simulation<'m> {
    disc: Discretization<'m>,
    state: State,
    policy: InvariantPolicy,
    reports: Vec<StepReport>,
    steps: usize,
}

impl<'m> Simulation<'m> {
    /// Sets up a run from initial densities. Density Dirichlet values are
    /// imposed on the initial data and the initial potential is solved for.
    pub fn new(mesh: &'m Mesh, bc: &BoundarySpec, config: &SolverConfig, p0: Field, n0: Field) -> Result<Self> {
        config.validate()?;
        let nn = mesh.num_nodes();
        if p0.len() != nn || n0.len() != nn {
            return Err(Error::invalid(alloc::format!(
                "initial data has {} / {} values for {nn} nodes",
                p0.len(),
                n0.len()
            )));
        }
        for f in [&p0, &n0] {
            if let Some(node) = f.first_non_finite() {
                return Err(Error::NonFinite { node, value: f[node] });
            }
        }
        let epsilon = config.epsilon.unwrap_or_else(|| default_epsilon(&p0, &n0, bc));
        let disc = Discretization::new(mesh, bc, config, epsilon)?;
        let (mut p, mut n) = (p0, n0);
        disc.apply_density_bc(&mut p, &mut n);
        let phi = disc.poisson().solve(&p, &n)?;
        let state = State { p, n, phi, t: 0.0 };

        let ep = extrema(&state.p);
        let en = extrema(&state.n);
        let (lo, hi) = (ep.min.min(en.min), ep.max.max(en.max));
        let pure = bc.is_pure_neumann();
        let acute = check_acuteness(mesh, disc.stiffness()).is_acute;
        let mut policy = InvariantPolicy::none();
        policy.dmp_bounds = pure.then_some((lo, hi));
        policy.mass_reference = (!bc.has_density_dirichlet())
            .then(|| (mass(&state.p, disc.lumped_mass()), mass(&state.n, disc.lumped_mass())));
        policy.entropy_monotone = config.algorithm == Algorithm::Alg2 && acute && pure;
        policy.smallness = config.algorithm == Algorithm::Alg1;
        if policy.smallness && smallness_margin(config.k, lo, hi) <= 0.0 {
            log::warn!(
                "time step k = {} violates 1 - k (max0 - min0) > 0; the maximum principle is not guaranteed",
                config.k
            );
        }
        log::debug!("epsilon = {epsilon:e}, acute mesh: {acute}, pure Neumann: {pure}");

        let mut sim =
            Simulation { disc, state, policy, reports: Vec::new(), steps: num_steps(config.t_final, config.k) };
        let initial = sim.report(&sim.state, 0);
        sim.push_report(initial);
        Ok(sim)
    }

    pub fn discretization(&self) -> &Discretization<'m> {
        &self.disc
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn policy(&self) -> &InvariantPolicy {
        &self.policy
    }

    pub fn reports(&self) -> &[StepReport] {
        &self.reports
    }

    /// Total number of steps the configured final time asks for.
    pub fn total_steps(&self) -> usize {
        self.steps
    }

    pub fn steps_taken(&self) -> usize {
        self.reports.len() - 1
    }

    pub fn is_finished(&self) -> bool {
        self.steps_taken() >= self.steps
    }

    fn report(&self, state: &State, picard_iters: usize) -> StepReport {
        let lumped = self.disc.lumped_mass();
        let k = self.disc.stiffness();
        let fns = self.disc.entropy_fns();
        let ep = extrema(&state.p);
        let en = extrema(&state.n);
        let e = entropy(&state.p, &state.n, &state.phi, lumped, k).unwrap_or_else(|err| {
            log::warn!("entropy undefined at t = {}: {err}", state.t);
            f64::NAN
        });
        let minus_phi: Vec<f64> = state.phi.iter().map(|v| -v).collect();
        StepReport {
            t: state.t,
            mass_p: mass(&state.p, lumped),
            mass_n: mass(&state.n, lumped),
            energy_es: electrostatic_energy(&state.phi, k),
            entropy: e,
            dissipation: dissipation(&state.p, &state.phi, fns, k) + dissipation(&state.n, &minus_phi, fns, k),
            max_p: ep.max,
            min_p: ep.min,
            max_n: en.max,
            min_n: en.min,
            picard_iters,
            flags: Flags::default(),
        }
    }

    fn push_report(&mut self, mut report: StepReport) {
        let flags = {
            let initial = self.reports.first().unwrap_or(&report);
            evaluate_flags(&report, self.reports.last(), initial, &self.policy, self.disc.config().k)
        };
        report.flags = flags;
        self.reports.push(report);
    }

    /// Advances one step and returns its report.
    pub fn step(&mut self) -> Result<&StepReport> {
        let m = self.steps_taken() + 1;
        let PicardOutcome { mut state, iterations, .. } = self
            .disc
            .picard_step(&self.state)
            .map_err(|e| Error::Step { step: m, t: self.state.t + self.disc.config().k, source: Box::new(e) })?;
        state.t = m as f64 * self.disc.config().k;
        let report = self.report(&state, iterations);
        self.state = state;
        self.push_report(report);
        Ok(self.reports.last().expect("report just pushed"))
    }

    /// Runs to the final time. `observer` sees the initial state and then
    /// every accepted step, so partial results survive a failing step.
    pub fn run(mut self, mut observer: impl FnMut(&State, &StepReport)) -> Result<RunSummary> {
        observer(&self.state, &self.reports[0]);
        while !self.is_finished() {
            self.step()?;
            observer(&self.state, self.reports.last().expect("at least one report"));
        }
        Ok(RunSummary { reports: self.reports, final_state: self.state, policy: self.policy })
    }
}
