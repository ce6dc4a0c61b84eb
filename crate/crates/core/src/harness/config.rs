//! Scenario configuration: a flat TOML table layered over a named preset.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::array::{partition_multiblock, ArrayGeometry, ArrayPartition};
use crate::beam::{BeamConfig, BeamType, DEFAULT_SAMPLE_SPACING};
use crate::error::{Error, Result};
use crate::metrics::{NormalSide, DEFAULT_RESOLUTION};
use crate::rotation::{SphericalDirection, UnitQuaternion};

pub const PRESET_120GHZ: &str = "paper-120ghz";
pub const PRESET_60GHZ: &str = "paper-60ghz";
pub const PRESETS: [&str; 2] = [PRESET_120GHZ, PRESET_60GHZ];

/// Every knob of an experiment. Unknown keys are rejected when loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub preset: String,
    /// Elements per array side.
    pub n_side: usize,
    pub spacing_wavelengths: f64,
    pub frequency_hz: f64,
    /// Blocks per array side.
    pub blocks: usize,
    /// Interleaved sub-arrays per block side.
    pub interleave: usize,
    pub beam_types: Vec<BeamType>,
    /// Target UV spacing between trajectory samples.
    pub sample_spacing: f64,
    pub bin_width: f64,
    /// Phase-shifter bits for gain maps; 0 means continuous.
    pub phase_bits: u32,
    /// Bit depths compared by the quantization study.
    pub quantization_bits: Vec<u32>,
    pub paths: usize,
    pub k_factors_db: Vec<f64>,
    pub channel_draws: usize,
    pub trajectories: usize,
    pub min_angle_deg: f64,
    pub max_angle_deg: f64,
    /// Fixed headset orientations `[w, x, y, z]` for single-trajectory runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_quaternion: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_quaternion: Option<[f64; 4]>,
    /// Access-point direction at the start of a fixed trajectory.
    pub ap_azimuth_deg: f64,
    pub ap_elevation_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<String>,
    pub trace_windows_ms: Vec<f64>,
    /// Off-trajectory shifts in uv; 0 is the on-trajectory case.
    pub shifts: Vec<f64>,
    pub normal_side: NormalSide,
    pub resolution: usize,
    pub seed: u64,
    /// Turn infeasible-coverage warnings into errors.
    pub strict_coverage: bool,
    pub output_dir: String,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig::preset(PRESET_120GHZ).expect("built-in preset")
    }
}

impl ScenarioConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let base = ScenarioConfig {
            preset: PRESET_120GHZ.into(),
            n_side: 64,
            spacing_wavelengths: 0.25,
            frequency_hz: 120e9,
            blocks: 2,
            interleave: 2,
            beam_types: vec![BeamType::Tight, BeamType::Loose],
            sample_spacing: DEFAULT_SAMPLE_SPACING,
            bin_width: 0.004,
            phase_bits: 0,
            quantization_bits: vec![2, 4, 6, 8],
            paths: 3,
            k_factors_db: vec![10.0, 15.0, 25.0],
            channel_draws: 250,
            trajectories: 5000,
            min_angle_deg: 20.0,
            max_angle_deg: 180.0,
            start_quaternion: None,
            end_quaternion: None,
            ap_azimuth_deg: 0.0,
            ap_elevation_deg: 0.0,
            trace_file: None,
            trace_windows_ms: vec![100.0, 200.0, 500.0, 1000.0],
            shifts: vec![0.0, 0.025, 0.05, 0.075],
            normal_side: NormalSide::Left,
            resolution: DEFAULT_RESOLUTION,
            seed: 1,
            strict_coverage: false,
            output_dir: "out".into(),
        };
        match name {
            PRESET_120GHZ => Ok(base),
            // 4 cm array at 60 GHz: 32 elements at a quarter wavelength. Four
            // sub-beams only reach short paths, so rotations stay under 30 deg.
            PRESET_60GHZ => Ok(ScenarioConfig {
                preset: PRESET_60GHZ.into(),
                n_side: 32,
                frequency_hz: 60e9,
                blocks: 1,
                min_angle_deg: 0.0,
                max_angle_deg: 30.0,
                ..base
            }),
            other => Err(Error::Config(format!(
                "unknown preset '{other}' (available: {})",
                PRESETS.join(", ")
            ))),
        }
    }

    /// Parses TOML text. Keys not present fall back to the preset named by
    /// `preset_override`, else the file's `preset` key, else the 120 GHz preset.
    pub fn from_toml_str(text: &str, preset_override: Option<&str>) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        let name = match (preset_override, table.get("preset")) {
            (Some(p), _) => p.to_string(),
            (None, Some(toml::Value::String(p))) => p.clone(),
            (None, Some(_)) => return Err(Error::Config("'preset' must be a string".into())),
            (None, None) => PRESET_120GHZ.to_string(),
        };
        let base = ScenarioConfig::preset(&name)?;
        let mut merged = toml::Table::try_from(&base).map_err(|e| Error::Config(e.to_string()))?;
        for (k, v) in table {
            merged.insert(k, v);
        }
        merged.insert("preset".into(), toml::Value::String(name));
        let cfg: ScenarioConfig = merged.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, preset_override: Option<&str>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text, preset_override)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if self.n_side == 0 {
            return fail("n_side must be positive".into());
        }
        if !positive(self.spacing_wavelengths) || !positive(self.frequency_hz) {
            return fail("spacing_wavelengths and frequency_hz must be positive".into());
        }
        if self.blocks == 0 || self.interleave == 0 || !self.n_side.is_multiple_of(self.blocks * self.interleave) {
            return fail(format!(
                "n_side {} must be divisible by blocks {} × interleave {}",
                self.n_side, self.blocks, self.interleave
            ));
        }
        if self.beam_types.is_empty() {
            return fail("beam_types must list at least one beam type".into());
        }
        if !positive(self.sample_spacing) || !positive(self.bin_width) {
            return fail("sample_spacing and bin_width must be positive".into());
        }
        if self.phase_bits > 48 || self.quantization_bits.iter().any(|&b| b == 0 || b > 48) {
            return fail("phase bits must lie in 1..=48 (0 for continuous gain maps)".into());
        }
        if self.paths == 0 || self.channel_draws == 0 || self.trajectories == 0 {
            return fail("paths, channel_draws and trajectories must be positive".into());
        }
        if self.k_factors_db.iter().any(|k| !k.is_finite()) {
            return fail("k_factors_db must be finite".into());
        }
        if !(0.0 <= self.min_angle_deg && self.min_angle_deg <= self.max_angle_deg && self.max_angle_deg <= 180.0) {
            return fail(format!(
                "angle range [{}, {}] must satisfy 0 ≤ min ≤ max ≤ 180",
                self.min_angle_deg, self.max_angle_deg
            ));
        }
        if self.start_quaternion.is_some() != self.end_quaternion.is_some() {
            return fail("start_quaternion and end_quaternion must be given together".into());
        }
        for q in self.start_quaternion.iter().chain(&self.end_quaternion) {
            UnitQuaternion::new(q[0], q[1], q[2], q[3]).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.trace_windows_ms.iter().any(|w| !positive(*w)) {
            return fail("trace_windows_ms must be positive".into());
        }
        if self.shifts.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return fail("shifts must be non-negative".into());
        }
        if self.resolution < 8 {
            return fail("resolution must be at least 8".into());
        }
        // TOML integers are signed 64-bit.
        if self.seed > i64::MAX as u64 {
            return fail(format!("seed must not exceed {}", i64::MAX));
        }
        if self.output_dir.is_empty() {
            return fail("output_dir must not be empty".into());
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::from_frequency(self.n_side, self.spacing_wavelengths, self.frequency_hz)
    }

    pub fn partition(&self) -> Result<ArrayPartition> {
        partition_multiblock(&self.geometry()?, self.blocks, self.interleave)
    }

    pub fn beam_config(&self, beam_type: BeamType) -> Result<BeamConfig> {
        let mut c = BeamConfig::new(beam_type, self.partition()?);
        c.sample_spacing = self.sample_spacing;
        c.phase_bits = (self.phase_bits > 0).then_some(self.phase_bits);
        Ok(c)
    }

    /// Fixed trajectory endpoints and access-point direction, if configured.
    pub fn fixed_endpoints(&self) -> Result<Option<(UnitQuaternion, UnitQuaternion, SphericalDirection)>> {
        match (self.start_quaternion, self.end_quaternion) {
            (Some(a), Some(b)) => Ok(Some((
                UnitQuaternion::new(a[0], a[1], a[2], a[3])?,
                UnitQuaternion::new(b[0], b[1], b[2], b[3])?,
                SphericalDirection::from_degrees(self.ap_azimuth_deg, self.ap_elevation_deg),
            ))),
            _ => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let a = ScenarioConfig::preset(PRESET_120GHZ).unwrap();
        assert_eq!((a.n_side, a.blocks, a.interleave), (64, 2, 2));
        let g = a.geometry().unwrap();
        assert!((g.spacing() - g.wavelength() / 4.0).abs() < 1e-18);
        let b = ScenarioConfig::preset(PRESET_60GHZ).unwrap();
        assert_eq!((b.n_side, b.blocks), (32, 1));
        assert!(ScenarioConfig::preset("nope").is_err());
    }

    #[test]
    fn round_trip() {
        let mut c = ScenarioConfig::default();
        c.start_quaternion = Some([1.0, 0.0, 0.0, 0.0]);
        c.end_quaternion = Some([0.9, 0.1, 0.0, 0.0]);
        c.trace_file = Some("trace.csv".into());
        let text = c.to_toml_string().unwrap();
        let back = ScenarioConfig::from_toml_str(&text, None).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn overlay_and_validation() {
        let c = ScenarioConfig::from_toml_str("preset = \"paper-60ghz\"\ntrajectories = 10\n", None).unwrap();
        assert_eq!((c.n_side, c.trajectories), (32, 10));
        let c = ScenarioConfig::from_toml_str("trajectories = 10\n", Some(PRESET_60GHZ)).unwrap();
        assert_eq!(c.n_side, 32);
        assert!(ScenarioConfig::from_toml_str("n_side = 62\n", None).is_err());
        let big = ScenarioConfig { seed: u64::MAX, ..ScenarioConfig::default() };
        assert!(matches!(big.validate(), Err(Error::Config(_))));
        assert!(ScenarioConfig::from_toml_str("bogus = 1\n", None).is_err());
        assert!(ScenarioConfig::from_toml_str("min_angle_deg = 90\nmax_angle_deg = 30\n", None).is_err());
        assert!(ScenarioConfig::from_toml_str("beam_types = [\"wide\"]\n", None).is_err());
        assert!(ScenarioConfig::from_toml_str("start_quaternion = [1.0, 0.0, 0.0, 0.0]\n", None).is_err());
    }
}
