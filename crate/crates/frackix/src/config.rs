//! JSON run configuration: strict parsing (unknown keys rejected), full
//! validation with every violation reported, and construction of the model
//! objects the pipelines need.

use crate::error::{Error, Result};
use crate::kinetic::{ChemicalField, ModelParams, TurnKernel};
use crate::mc::DomainGeometry;
use serde::{Deserialize, Serialize};

pub const SUBCOMMANDS: [&str; 6] = ["spectra", "mc", "macro", "milne", "match", "curved"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            kind: "uniform".into(),
            kappa: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub kind: String,
    pub extent: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoSpec {
    pub preset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

impl Default for RhoSpec {
    fn default() -> Self {
        RhoSpec {
            preset: "constant".into(),
            level: None,
            slope: None,
            amplitude: None,
            center: None,
            width: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MilneSpec {
    #[serde(default = "default_ordinates")]
    pub ordinates: usize,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_first_spacing")]
    pub first_spacing: f64,
    #[serde(default = "default_grading")]
    pub grading: f64,
}

fn default_ordinates() -> usize {
    32
}
fn default_r_max() -> f64 {
    20_000.0
}
fn default_first_spacing() -> f64 {
    0.02
}
fn default_grading() -> f64 {
    1.15
}

impl Default for MilneSpec {
    fn default() -> Self {
        MilneSpec {
            ordinates: default_ordinates(),
            r_max: default_r_max(),
            first_spacing: default_first_spacing(),
            grading: default_grading(),
        }
    }
}

fn default_tau0() -> f64 {
    1.0
}
fn default_c0() -> f64 {
    1.0
}
fn default_epsilon() -> f64 {
    0.1
}
fn default_n_cells() -> usize {
    128
}
fn default_particles() -> usize {
    10_000
}
fn default_horizon() -> f64 {
    1.0
}

/// Full run configuration. Physical quantities are dimensionless.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; must match the CLI subcommand when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    pub alpha: f64,
    #[serde(default = "default_tau0")]
    pub tau0: f64,
    #[serde(default)]
    pub tau1: f64,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Explicit fractional diffusivity; required at alpha = 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_alpha: Option<f64>,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
    #[serde(default)]
    pub rho: RhoSpec,
    #[serde(default = "default_n_cells")]
    pub n_cells: usize,
    #[serde(default = "default_particles")]
    pub particles: usize,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    /// Defaults to a single snapshot at the horizon.
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default)]
    pub milne: MilneSpec,
    /// ε sweep for the match pipeline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    /// "explicit" (default) or "imex" for the macroscopic solver.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    /// Boundary-strip width for the match pipeline, in macro units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strip_width: Option<f64>,
    /// "delta" (default) or "uniform" initial data for the macro solver.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
}

/// Parse a JSON document into a validated configuration; parse errors carry
/// the position, validation reports every violated constraint at once.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config JSON: {e}")))?;
    let violations = cfg.violations();
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Validation(format!(
            "invalid configuration: {}",
            violations.join("; ")
        )))
    }
}

impl RunConfig {
    /// All constraint violations, not just the first.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            v.push(format!("alpha must lie in (1, 2], got {}", self.alpha));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            v.push(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if !(self.tau0 > 0.0) {
            v.push(format!("tau0 must be > 0, got {}", self.tau0));
        }
        if !(self.c0 > 0.0) {
            v.push(format!("c0 must be > 0, got {}", self.c0));
        }
        if let Some(sc) = &self.subcommand {
            if !SUBCOMMANDS.contains(&sc.as_str()) {
                v.push(format!(
                    "subcommand must be one of {SUBCOMMANDS:?}, got {sc:?}"
                ));
            }
        }
        match self.kernel.kind.as_str() {
            "uniform" | "cosine" => {
                if self.kernel.kappa.is_some() {
                    v.push("kernel.kappa only applies to the vonmises kernel".into());
                }
            }
            "vonmises" => match self.kernel.kappa {
                Some(k) if k >= 0.0 && k.is_finite() => {}
                _ => v.push("vonmises kernel needs a finite kappa >= 0".into()),
            },
            other => v.push(format!(
                "kernel.type must be uniform | cosine | vonmises, got {other:?}"
            )),
        }
        if let Some(g) = &self.geometry {
            if !(g.extent > 0.0) {
                v.push(format!("geometry.extent must be > 0, got {}", g.extent));
            }
            if g.kind != "interval" && g.kind != "disc" {
                v.push(format!(
                    "geometry.kind must be interval | disc, got {:?}",
                    g.kind
                ));
            }
        }
        match self.rho.preset.as_str() {
            "constant" | "linear" | "gaussian" => {}
            other => v.push(format!(
                "rho.preset must be constant | linear | gaussian, got {other:?}"
            )),
        }
        if self.n_cells < 4 {
            v.push(format!("n_cells must be >= 4, got {}", self.n_cells));
        }
        if self.particles == 0 {
            v.push("particles must be >= 1".into());
        }
        if !(self.horizon >= 0.0) {
            v.push(format!("horizon must be >= 0, got {}", self.horizon));
        }
        let snaps = self.snapshot_times();
        if snaps.windows(2).any(|w| w[1] < w[0]) {
            v.push("snapshots must be ascending".into());
        }
        if snaps.iter().any(|&t| t < 0.0 || t > self.horizon) {
            v.push("snapshots must lie within [0, horizon]".into());
        }
        if self.milne.ordinates < 8 || self.milne.ordinates % 4 != 0 {
            v.push(format!(
                "milne.ordinates must be a multiple of 4 and >= 8, got {}",
                self.milne.ordinates
            ));
        }
        if !(self.milne.r_max > 0.0) || !(self.milne.first_spacing > 0.0) {
            v.push("milne.r_max and milne.first_spacing must be > 0".into());
        }
        if !(self.milne.grading >= 1.0) {
            v.push(format!(
                "milne.grading must be >= 1, got {}",
                self.milne.grading
            ));
        }
        if let Some(eps) = &self.epsilons {
            if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
                v.push("epsilons must be a nonempty list inside (0, 1)".into());
            }
        }
        if let Some(s) = &self.scheme {
            if s != "explicit" && s != "imex" {
                v.push(format!("scheme must be explicit | imex, got {s:?}"));
            }
        }
        if let Some(i) = &self.initial {
            if i != "delta" && i != "uniform" {
                v.push(format!("initial must be delta | uniform, got {i:?}"));
            }
        }
        if self.alpha == 2.0 && self.c_alpha.is_none() {
            v.push("alpha = 2 requires an explicit c_alpha".into());
        }
        v
    }

    /// Snapshot list with the default single snapshot at the horizon.
    pub fn snapshot_times(&self) -> Vec<f64> {
        if self.snapshots.is_empty() {
            vec![self.horizon]
        } else {
            self.snapshots.clone()
        }
    }

    /// Spatial dimension implied by the geometry (2 when absent: the
    /// spectral and layer pipelines live on the circle).
    pub fn dimension(&self) -> usize {
        match &self.geometry {
            Some(g) if g.kind == "interval" => 1,
            _ => 2,
        }
    }

    pub fn build_kernel(&self) -> Result<TurnKernel> {
        let n = self.dimension();
        match self.kernel.kind.as_str() {
            "uniform" => TurnKernel::uniform(n),
            "cosine" => TurnKernel::cosine(n),
            "vonmises" => TurnKernel::von_mises(n, self.kernel.kappa.unwrap_or(1.0)),
            other => Err(Error::Config(format!("unknown kernel type {other:?}"))),
        }
    }

    pub fn build_field(&self) -> Result<ChemicalField> {
        let extent = self.geometry.as_ref().map(|g| g.extent).unwrap_or(1.0);
        match self.rho.preset.as_str() {
            "constant" => Ok(ChemicalField::constant(self.rho.level.unwrap_or(0.0))),
            "linear" => Ok(ChemicalField::linear([self.rho.slope.unwrap_or(1.0), 0.0])),
            "gaussian" => {
                let center = self.rho.center.unwrap_or(0.5 * extent);
                let centre_point = match &self.geometry {
                    Some(g) if g.kind == "disc" => [0.0, 0.0],
                    _ => [center, 0.0],
                };
                Ok(ChemicalField::gaussian(
                    self.rho.amplitude.unwrap_or(1.0),
                    centre_point,
                    self.rho.width.unwrap_or(0.2 * extent),
                ))
            }
            other => Err(Error::Config(format!("unknown rho preset {other:?}"))),
        }
    }

    pub fn build_geometry(&self) -> Result<DomainGeometry> {
        let g = self
            .geometry
            .as_ref()
            .ok_or_else(|| Error::Config("this pipeline requires a geometry".into()))?;
        let geom = match g.kind.as_str() {
            "interval" => DomainGeometry::Interval { length: g.extent },
            "disc" => DomainGeometry::Disc { radius: g.extent },
            other => return Err(Error::Config(format!("unknown geometry kind {other:?}"))),
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn build_params(&self) -> Result<ModelParams> {
        let kernel = self.build_kernel()?;
        ModelParams::derive_with_override(
            self.alpha,
            self.tau0,
            self.tau1,
            self.c0,
            self.epsilon,
            &kernel,
            self.c_alpha,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config(r#"{"alpha": 1.5}"#).unwrap();
        assert_eq!(cfg.tau0, 1.0);
        assert_eq!(cfg.epsilon, 0.1);
        assert_eq!(cfg.kernel.kind, "uniform");
        assert_eq!(cfg.snapshot_times(), vec![1.0]);
        assert_eq!(cfg.milne.ordinates, 32);
    }

    #[test]
    fn out_of_range_alpha_is_named() {
        let err = parse_config(r#"{"alpha": 2.5}"#).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("alpha"), "{msg}");
    }

    #[test]
    fn unknown_key_suggests_fields() {
        let err = parse_config(r#"{"alpa": 1.5}"#).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("alpa"), "{msg}");
        // serde lists the expected fields, which includes the right spelling.
        assert!(msg.contains("alpha"), "{msg}");
    }

    #[test]
    fn all_violations_reported_at_once() {
        let err =
            parse_config(r#"{"alpha": 0.5, "epsilon": 2.0, "tau0": -1.0, "n_cells": 2}"#)
                .unwrap_err();
        let msg = format!("{err}");
        for needle in ["alpha", "epsilon", "tau0", "n_cells"] {
            assert!(msg.contains(needle), "missing {needle} in {msg}");
        }
    }

    #[test]
    fn parse_error_carries_position() {
        let err = parse_config("{\"alpha\": 1.5,,}").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("column"), "{msg}");
    }

    #[test]
    fn alpha_two_needs_explicit_diffusivity() {
        assert!(parse_config(r#"{"alpha": 2.0}"#).is_err());
        assert!(parse_config(r#"{"alpha": 2.0, "c_alpha": 0.3}"#).is_ok());
    }

    #[test]
    fn config_roundtrips_through_json() {
        let cfg = parse_config(
            r#"{"alpha": 1.5, "kernel": {"type": "vonmises", "kappa": 2.0},
                "geometry": {"kind": "interval", "extent": 1.0},
                "rho": {"preset": "gaussian", "amplitude": 1.0}}"#,
        )
        .unwrap();
        let echoed = serde_json::to_string(&cfg).unwrap();
        let back = parse_config(&echoed).unwrap();
        assert_eq!(back.alpha, cfg.alpha);
        assert_eq!(back.kernel.kind, "vonmises");
    }
}
