//! Bundled parameter presets pinning the full configuration of each
//! reproduced scenario (continuation diagrams and the detuning ramp).

use crate::continuation::ContinuationConfig;
use crate::evolve::{EvolveOptions, RampSchedule};
use crate::params::Mode;
use crate::trivial::{self, ConstantState};
use crate::{Error, FieldState, Grid, Result};
use serde::Deserialize;

/// Selector for one branch launch: mode number, sign, and an optional
/// curve-coordinate hint to break ties when both points of a pair share
/// the sign.
#[derive(Debug, Clone, Copy, Deserialize)]
pub struct BranchSelector {
    pub k: u32,
    pub sigma: i32,
    #[serde(default)]
    pub coord: Option<f64>,
}

/// A pinned continuation scenario.
#[derive(Debug, Clone, Deserialize)]
pub struct ContinuationPreset {
    pub description: String,
    pub mode: Mode,
    pub d: f64,
    pub fixed: f64,
    pub n: usize,
    pub max_steps: usize,
    pub eig_modes: usize,
    pub branches: Vec<BranchSelector>,
}

impl ContinuationPreset {
    /// Continuation settings implied by the preset.
    pub fn config(&self) -> ContinuationConfig {
        ContinuationConfig {
            max_steps: self.max_steps,
            eig_modes: self.eig_modes,
            ..ContinuationConfig::default()
        }
    }
}

/// A pinned time-evolution scenario.
#[derive(Debug, Clone, Deserialize)]
pub struct EvolutionPreset {
    pub description: String,
    pub d: f64,
    pub f: f64,
    pub n: usize,
    pub t_final: f64,
    pub dt: f64,
    pub noise_amp: f64,
    pub seed: u64,
    pub sample_every: usize,
    pub keep_snapshots: usize,
    pub ramp: Vec<(f64, f64)>,
}

impl EvolutionPreset {
    pub fn ramp_schedule(&self) -> Result<RampSchedule> {
        RampSchedule::new(self.ramp.clone())
    }

    /// Evolution options implied by the preset; the seed can be
    /// overridden per run.
    pub fn options(&self, seed: Option<u64>) -> EvolveOptions {
        EvolveOptions {
            dt: self.dt,
            sample_every: self.sample_every,
            noise_amp: self.noise_amp,
            seed: seed.unwrap_or(self.seed),
            keep_snapshots: self.keep_snapshots,
            conservative: false,
        }
    }

    /// The constant state the ramp starts from: the unique constant
    /// solution with the preset's forcing at the ramp's initial
    /// detuning.
    pub fn initial_constant(&self) -> Result<ConstantState> {
        let zeta0 = self
            .ramp
            .first()
            .map(|(_, z)| *z)
            .ok_or_else(|| Error::Domain("preset ramp is empty".into()))?;
        let mut coords = trivial::bar_coords_for_forcing(zeta0, self.f);
        coords.sort_by(f64::total_cmp);
        let s = coords.first().copied().ok_or_else(|| {
            Error::Domain(format!(
                "no constant solution with forcing {} at detuning {zeta0}",
                self.f
            ))
        })?;
        trivial::bar_state(s, zeta0)
    }

    /// The initial field on a fresh grid.
    pub fn initial_state(&self) -> Result<FieldState> {
        let grid = Grid::new(self.n)?;
        Ok(FieldState::from_constant_state(
            grid,
            &self.initial_constant()?,
        ))
    }
}

/// A named preset of either kind.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Preset {
    Continuation(ContinuationPreset),
    Evolution(EvolutionPreset),
}

const PRESETS: [(&str, &str); 5] = [
    ("sec5.1", include_str!("../presets/sec5.1.json")),
    ("sec5.2", include_str!("../presets/sec5.2.json")),
    ("sec5.3", include_str!("../presets/sec5.3.json")),
    ("sec5.4", include_str!("../presets/sec5.4.json")),
    ("sec5.5", include_str!("../presets/sec5.5.json")),
];

/// The available preset names.
pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

/// Load a preset by name.
pub fn load(name: &str) -> Result<Preset> {
    let raw = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, raw)| *raw)
        .ok_or_else(|| {
            Error::Domain(format!(
                "unknown preset {name:?}; available: {}",
                names().join(", ")
            ))
        })?;
    Ok(serde_json::from_str(raw)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_parse() {
        for name in names() {
            let preset = load(name).unwrap();
            match preset {
                Preset::Continuation(c) => {
                    assert!(c.d != 0.0);
                    assert!(!c.branches.is_empty());
                    assert!(c.n >= 16);
                }
                Preset::Evolution(e) => {
                    assert!(e.t_final > 0.0);
                    assert!(e.ramp_schedule().is_ok());
                }
            }
        }
        assert!(load("sec9.9").is_err());
    }

    #[test]
    fn continuation_presets_select_real_candidates() {
        for name in ["sec5.1", "sec5.2", "sec5.3", "sec5.4"] {
            let Preset::Continuation(preset) = load(name).unwrap() else {
                panic!("{name} should be a continuation preset");
            };
            let cands =
                crate::bifurcation::enumerate(preset.mode, preset.fixed, preset.d, 16, false)
                    .unwrap();
            for sel in &preset.branches {
                let matches: Vec<_> = cands
                    .iter()
                    .filter(|c| c.k == sel.k && c.sigma == sel.sigma)
                    .filter(|c| match sel.coord {
                        Some(hint) => (c.coord - hint).abs() < 1e-3,
                        None => true,
                    })
                    .collect();
                assert_eq!(
                    matches.len(),
                    1,
                    "{name}: selector {sel:?} matched {} candidates",
                    matches.len()
                );
                assert!(matches[0].s_ok && matches[0].t_ok);
            }
        }
    }

    #[test]
    fn ramp_preset_starts_on_the_constant_curve() {
        let Preset::Evolution(preset) = load("sec5.5").unwrap() else {
            panic!("sec5.5 should be an evolution preset");
        };
        let state = preset.initial_constant().unwrap();
        assert!((state.f - preset.f).abs() < 1e-9);
        assert_eq!(state.zeta, -5.0);
        assert!(state.invariant_defect() < 1e-10);
        let ramp = preset.ramp_schedule().unwrap();
        assert_eq!(ramp.value_at(0.0), -5.0);
        assert_eq!(ramp.value_at(1000.0), 2.67);
        assert!((ramp.value_at(500.0) - 2.67).abs() < 1e-12);
    }
}
