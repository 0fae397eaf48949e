use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::tables::read_antenna_cut;
use crate::antenna::{synthetic_pattern, AntennaPattern, AntennaPose};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::tracer::TraceConfig;

pub const DEFAULT_SEED: u64 = 42;

/// Antenna description: a measured cut file, a synthetic main lobe from the HPBW, or
/// isotropic when neither is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaSpec {
    pub gain_dbi: f64,
    #[serde(default)]
    pub hpbw_deg: Option<f64>,
    #[serde(default)]
    pub cut: Option<PathBuf>,
}

impl AntennaSpec {
    pub fn isotropic() -> Self {
        AntennaSpec {
            gain_dbi: 0.0,
            hpbw_deg: None,
            cut: None,
        }
    }

    pub fn load(&self) -> Result<AntennaPattern> {
        match (&self.cut, self.hpbw_deg) {
            (Some(path), hpbw) => {
                AntennaPattern::from_cut(self.gain_dbi, hpbw.unwrap_or(0.0), read_antenna_cut(path)?)
            }
            (None, Some(h)) => synthetic_pattern(h, self.gain_dbi),
            (None, None) => Ok(AntennaPattern::isotropic(self.gain_dbi)),
        }
    }
}

impl Default for AntennaSpec {
    fn default() -> Self {
        AntennaSpec::isotropic()
    }
}

/// One transmitter/receiver placement to trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub id: String,
    pub tx: [f64; 3],
    pub rx: [f64; 3],
    #[serde(default)]
    pub tx_az_deg: f64,
    #[serde(default)]
    pub tx_el_deg: f64,
    #[serde(default)]
    pub rx_az_deg: f64,
    #[serde(default)]
    pub rx_el_deg: f64,
}

impl LinkSpec {
    pub fn poses(&self) -> Result<(AntennaPose, AntennaPose)> {
        let p = |a: [f64; 3]| Vec3::new(a[0], a[1], a[2]);
        Ok((
            AntennaPose::from_az_el(p(self.tx), self.tx_az_deg, self.tx_el_deg)?,
            AntennaPose::from_az_el(p(self.rx), self.rx_az_deg, self.rx_el_deg)?,
        ))
    }
}

/// Everything a command needs. Relative paths are resolved against the directory of
/// the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub environment: Option<PathBuf>,
    pub measurements: Option<PathBuf>,
    pub tx_antenna: AntennaSpec,
    pub rx_antenna: AntennaSpec,
    pub links: Vec<LinkSpec>,
    pub trace: TraceConfig,
    /// Match threshold on summed AoA + AoD deviation; defaults to twice the widest HPBW.
    pub match_threshold_deg: Option<f64>,
    pub pdp_resolution_ns: f64,
    /// Component CSVs, one per location, for `stats`.
    pub components: Vec<PathBuf>,
    /// Stats CSVs for `compare`.
    pub measured_stats: Option<PathBuf>,
    pub predicted_stats: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            environment: None,
            measurements: None,
            tx_antenna: AntennaSpec::default(),
            rx_antenna: AntennaSpec::default(),
            links: Vec::new(),
            trace: TraceConfig::default(),
            match_threshold_deg: None,
            pdp_resolution_ns: 2.5,
            components: Vec::new(),
            measured_stats: None,
            predicted_stats: None,
            output_dir: PathBuf::from("out"),
            seed: DEFAULT_SEED,
        }
    }
}

fn rebase(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::schema("config", e.to_string()))?;
        cfg.trace.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::parse(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        for p in [
            self.environment.as_mut(),
            self.measurements.as_mut(),
            self.tx_antenna.cut.as_mut(),
            self.rx_antenna.cut.as_mut(),
            self.measured_stats.as_mut(),
            self.predicted_stats.as_mut(),
        ]
        .into_iter()
        .flatten()
        {
            rebase(base, p);
        }
        for p in &mut self.components {
            rebase(base, p);
        }
        rebase(base, &mut self.output_dir);
    }

    pub fn match_threshold(&self) -> f64 {
        self.match_threshold_deg.unwrap_or_else(|| {
            let widest = self
                .tx_antenna
                .hpbw_deg
                .unwrap_or(180.0)
                .max(self.rx_antenna.hpbw_deg.unwrap_or(180.0));
            2.0 * widest
        })
    }

    pub(crate) fn require<'a>(&self, p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
        p.as_deref()
            .ok_or_else(|| Error::invalid(format!("no {what} given (config field or command-line flag)")))
    }
}
