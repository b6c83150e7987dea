//! Turn a resolved experiment into patterns, a report, and samples.

use num_complex::Complex64 as C64;
use serde_json::json;

use crate::config::{MonteCarloSection, Resolved, ResolvedBasis, Source};
use crate::error::Result;
use crate::kicks::{kick_representation, kick_spectrum, representation_fidelity, FidelityRecord};
use crate::montecarlo::{sample, SampleRun};
use crate::patterns::{conditioned_pattern, fringe_report, intensity, FringeReport, Pattern};
use crate::propagate::{entangled_far_field_threshold, evolve_entangled};
use crate::pspace::{make_momentum_state, position_kick_representation, position_kick_value};
use crate::qstate::{entangle, make_slit_states, superpose, EntangledState};
use crate::report::{Report, SCHEMA_VERSION};

pub struct RunOutput {
    pub unconditioned: Pattern,
    pub conditioned: Vec<Pattern>,
    pub report: Report,
    pub samples: Option<SampleRun>,
}

fn apply_basis(state: &EntangledState, basis: &ResolvedBasis) -> Result<EntangledState> {
    match basis {
        ResolvedBasis::WhichWay => Ok(state.clone()),
        ResolvedBasis::Unbiased(b) => state.change_basis(b.unitary()),
        ResolvedBasis::Custom(u) => state.change_basis(u),
    }
}

fn sample_if_requested(
    state: &EntangledState,
    mc: &Option<MonteCarloSection>,
    seed_override: Option<u64>,
) -> Result<Option<SampleRun>> {
    match mc {
        Some(m) => Ok(Some(sample(
            state,
            m.n_samples,
            seed_override.unwrap_or(m.seed),
        )?)),
        None => Ok(None),
    }
}

fn fringe_summaries(
    unconditioned: &Pattern,
    conditioned: &[Pattern],
) -> Result<(FringeReport, Vec<FringeReport>)> {
    let unc = fringe_report(unconditioned, None)?;
    let cond = conditioned
        .iter()
        .map(|p| fringe_report(p, Some(&conditioned[0])))
        .collect::<Result<Vec<_>>>()?;
    Ok((unc, cond))
}

pub fn run_experiment(
    r: &Resolved,
    experiment_name: &str,
    seed_override: Option<u64>,
) -> Result<RunOutput> {
    match &r.source {
        Source::Slits(slits) => {
            let states = make_slit_states(slits, &r.grid)?;
            let which_way = entangle(&states)?;
            let active = apply_basis(&which_way, &r.basis)?;

            // kick equivalence is certified at the source plane
            let fidelity: Option<FidelityRecord> = if active.basis_tag.starts_with("fourier-") {
                let coeffs = vec![C64::new(1.0, 0.0); slits.n];
                let base = superpose(&states, &coeffs)?;
                let spectrum = kick_spectrum(slits.n, slits.d, false)?;
                let c0 = slits.centers()[0];
                let phases: Vec<f64> =
                    spectrum.kicks.iter().map(|k| -k.momentum * c0).collect();
                let kicked = kick_representation(&base, &spectrum, &phases)?;
                Some(representation_fidelity(&active, &kicked)?)
            } else {
                None
            };

            let spec = r.spec(entangled_far_field_threshold(&active));
            let evolved = evolve_entangled(&active, &spec)?;
            let unconditioned = intensity(&evolved)?;
            let conditioned = (0..evolved.n())
                .map(|j| conditioned_pattern(&evolved, j))
                .collect::<Result<Vec<_>>>()?;
            let (unc, cond) = fringe_summaries(&unconditioned, &conditioned)?;
            let probabilities = (0..evolved.n())
                .map(|j| evolved.outcome_probability(j))
                .collect::<Result<Vec<_>>>()?;
            let samples = sample_if_requested(&evolved, &r.montecarlo, seed_override)?;

            let report = Report {
                schema_version: SCHEMA_VERSION,
                experiment: experiment_name.to_string(),
                basis: r.basis.tag().to_string(),
                n: slits.n,
                geometry: json!({
                    "d": slits.d,
                    "sigma": slits.sigma,
                    "profile": slits.profile,
                    "origin": slits.origin,
                    "centers": slits.centers(),
                }),
                flight_time: Some(spec.t),
                probabilities,
                unconditioned: unc,
                conditioned: cond,
                kick_spectrum: Some(kick_spectrum(slits.n, slits.d, true)?),
                fidelity,
                position_kick: None,
            };
            Ok(RunOutput {
                unconditioned,
                conditioned,
                report,
                samples,
            })
        }
        Source::Momentum(peaks) => {
            let which_way = make_momentum_state(peaks, &r.grid)?;
            let active = apply_basis(&which_way, &r.basis)?;

            let fidelity = if active.basis_tag.starts_with("fourier-") {
                let comps = which_way.components.clone();
                let coeffs = vec![C64::new(1.0, 0.0); 2];
                let base = superpose(&comps, &coeffs)?;
                let kicked = position_kick_representation(&base, peaks)?;
                Some(representation_fidelity(&active, &kicked)?)
            } else {
                None
            };

            // the screen pattern lives in the position representation
            let screen = EntangledState {
                components: active
                    .components
                    .iter()
                    .map(crate::propagate::conjugate_transform)
                    .collect(),
                basis_tag: active.basis_tag.clone(),
            };
            let unconditioned = intensity(&screen)?;
            let conditioned = (0..screen.n())
                .map(|j| conditioned_pattern(&screen, j))
                .collect::<Result<Vec<_>>>()?;
            let (unc, cond) = fringe_summaries(&unconditioned, &conditioned)?;
            let probabilities = (0..screen.n())
                .map(|j| screen.outcome_probability(j))
                .collect::<Result<Vec<_>>>()?;
            let samples = sample_if_requested(&screen, &r.montecarlo, seed_override)?;

            let report = Report {
                schema_version: SCHEMA_VERSION,
                experiment: experiment_name.to_string(),
                basis: r.basis.tag().to_string(),
                n: 2,
                geometry: json!({
                    "p1": peaks.p1,
                    "p2": peaks.p2,
                    "width": peaks.width,
                }),
                flight_time: None,
                probabilities,
                unconditioned: unc,
                conditioned: cond,
                kick_spectrum: None,
                fidelity,
                position_kick: Some(position_kick_value(peaks)?),
            };
            Ok(RunOutput {
                unconditioned,
                conditioned,
                report,
                samples,
            })
        }
    }
}
