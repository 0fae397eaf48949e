use std::path::Path;

use serde::{Deserialize, Serialize};

use super::format::sig9;
use crate::antenna::AntennaPose;
use crate::calibration::MeasurementRecord;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::propagation::SPEED_OF_LIGHT;
use crate::tracer::{MultipathComponent, Signature};

pub const COMPONENTS_HEADER: [&str; 11] = [
    "path_id",
    "power_dbm",
    "tof_ns",
    "aod_az_deg",
    "aod_el_deg",
    "aoa_az_deg",
    "aoa_el_deg",
    "n_refl",
    "n_pen",
    "n_scat",
    "signature",
];

pub const MEASUREMENTS_HEADER: [&str; 14] = [
    "id",
    "tx_x",
    "tx_y",
    "tx_z",
    "rx_x",
    "rx_y",
    "rx_z",
    "tx_az_deg",
    "tx_el_deg",
    "rx_az_deg",
    "rx_el_deg",
    "tx_power_dbm",
    "measured_power_dbm",
    "freq_ghz",
];

/// One line of a components CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRow {
    pub path_id: usize,
    pub power_dbm: f64,
    pub tof_ns: f64,
    pub aod_az_deg: f64,
    pub aod_el_deg: f64,
    pub aoa_az_deg: f64,
    pub aoa_el_deg: f64,
    pub n_refl: usize,
    pub n_pen: usize,
    pub n_scat: usize,
    pub signature: String,
}

impl ComponentRow {
    pub fn from_component(path_id: usize, c: &MultipathComponent) -> Self {
        let (aod_az_deg, aod_el_deg) = c.aod.to_az_el_deg();
        let (aoa_az_deg, aoa_el_deg) = c.aoa.to_az_el_deg();
        ComponentRow {
            path_id,
            power_dbm: c.power_dbm,
            tof_ns: c.tof_ns,
            aod_az_deg,
            aod_el_deg,
            aoa_az_deg,
            aoa_el_deg,
            n_refl: c.n_reflections(),
            n_pen: c.n_penetrations(),
            n_scat: c.n_scatterings(),
            signature: c.surface_signature.to_string(),
        }
    }

    /// Component with the geometry a CSV row carries; interaction points are not stored.
    pub fn to_component(&self) -> Result<MultipathComponent> {
        Ok(MultipathComponent {
            aod: Vec3::from_az_el_deg(self.aod_az_deg, self.aod_el_deg),
            aoa: Vec3::from_az_el_deg(self.aoa_az_deg, self.aoa_el_deg),
            tof_ns: self.tof_ns,
            path_length_m: self.tof_ns * 1e-9 * SPEED_OF_LIGHT,
            power_dbm: self.power_dbm,
            interactions: Vec::new(),
            surface_signature: self.signature.parse::<Signature>()?,
            points: Vec::new(),
            corrected: true,
        })
    }

    fn fields(&self) -> [String; 11] {
        [
            self.path_id.to_string(),
            sig9(self.power_dbm),
            sig9(self.tof_ns),
            sig9(self.aod_az_deg),
            sig9(self.aod_el_deg),
            sig9(self.aoa_az_deg),
            sig9(self.aoa_el_deg),
            self.n_refl.to_string(),
            self.n_pen.to_string(),
            self.n_scat.to_string(),
            self.signature.clone(),
        ]
    }
}

/// Writes rows as CSV text with 9 significant digits.
pub fn write_components_csv(rows: &[ComponentRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COMPONENTS_HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    finish(w)
}

pub fn components_to_rows(components: &[MultipathComponent]) -> Vec<ComponentRow> {
    components
        .iter()
        .enumerate()
        .map(|(i, c)| ComponentRow::from_component(i, c))
        .collect()
}

pub(crate) fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::invalid(format!("csv buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(format!("csv utf-8: {e}")))
}

fn check_header(headers: &csv::StringRecord, expected: &[&str], what: &str) -> Result<()> {
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::schema(
            format!("{what} header"),
            format!("expected `{}`, got `{}`", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn deserialize_all<T: for<'de> Deserialize<'de>>(text: &str, header: &[&str], what: &str) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    check_header(r.headers()?, header, what)?;
    let mut out = Vec::new();
    for (i, rec) in r.deserialize().enumerate() {
        out.push(rec.map_err(|e| Error::schema(format!("{what} row {}", i + 1), e.to_string()))?);
    }
    Ok(out)
}

pub fn parse_components_csv(text: &str) -> Result<Vec<ComponentRow>> {
    deserialize_all(text, &COMPONENTS_HEADER, "components")
}

pub fn read_components(path: &Path) -> Result<Vec<ComponentRow>> {
    parse_components_csv(&read_text(path)?)
}

#[derive(Debug, Deserialize)]
struct MeasurementRow {
    id: String,
    tx_x: f64,
    tx_y: f64,
    tx_z: f64,
    rx_x: f64,
    rx_y: f64,
    rx_z: f64,
    tx_az_deg: f64,
    tx_el_deg: f64,
    rx_az_deg: f64,
    rx_el_deg: f64,
    tx_power_dbm: f64,
    measured_power_dbm: f64,
    freq_ghz: f64,
}

pub fn parse_measurements_csv(text: &str) -> Result<Vec<MeasurementRecord>> {
    let rows: Vec<MeasurementRow> = deserialize_all(text, &MEASUREMENTS_HEADER, "measurements")?;
    rows.into_iter()
        .map(|r| {
            let rec = MeasurementRecord {
                tx: AntennaPose::from_az_el(Vec3::new(r.tx_x, r.tx_y, r.tx_z), r.tx_az_deg, r.tx_el_deg)?,
                rx: AntennaPose::from_az_el(Vec3::new(r.rx_x, r.rx_y, r.rx_z), r.rx_az_deg, r.rx_el_deg)?,
                tx_power_dbm: r.tx_power_dbm,
                measured_power_dbm: r.measured_power_dbm,
                frequency_ghz: r.freq_ghz,
                id: r.id,
            };
            rec.validate()?;
            Ok(rec)
        })
        .collect()
}

pub fn read_measurements(path: &Path) -> Result<Vec<MeasurementRecord>> {
    parse_measurements_csv(&read_text(path)?)
}

pub fn write_measurements_csv(records: &[MeasurementRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(MEASUREMENTS_HEADER)?;
    for r in records {
        let (taz, tel) = r.tx.boresight.to_az_el_deg();
        let (raz, rel) = r.rx.boresight.to_az_el_deg();
        let p = |v: f64| sig9(v);
        w.write_record([
            r.id.clone(),
            p(r.tx.position.x),
            p(r.tx.position.y),
            p(r.tx.position.z),
            p(r.rx.position.x),
            p(r.rx.position.y),
            p(r.rx.position.z),
            p(taz),
            p(tel),
            p(raz),
            p(rel),
            p(r.tx_power_dbm),
            p(r.measured_power_dbm),
            p(r.frequency_ghz),
        ])?;
    }
    finish(w)
}

#[derive(Debug, Deserialize)]
struct CutRow {
    angle_deg: f64,
    relative_gain_db: f64,
}

/// `(angle_deg, relative_gain_db)` samples of an antenna cut.
pub fn parse_antenna_cut_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let rows: Vec<CutRow> = deserialize_all(text, &["angle_deg", "relative_gain_db"], "antenna cut")?;
    Ok(rows.into_iter().map(|r| (r.angle_deg, r.relative_gain_db)).collect())
}

pub fn read_antenna_cut(path: &Path) -> Result<Vec<(f64, f64)>> {
    parse_antenna_cut_csv(&read_text(path)?)
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
