//! Report serialization: output-set bookkeeping, JSON report shapes, CSV
//! builders, and the run manifest.
//!
//! Every file goes through [`OutputSet::write`], which records a content
//! digest, so the manifest written at the end references every output and
//! nothing else.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tsa_core::interaction::{InteractionAnalysis, PmfPooling};
use tsa_core::spectra::IntraReport;
use tsa_core::visibility::{AccessWindow, GlobalWindow, TemporalSpectrum};
use tsa_core::{Error, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// A written file as the manifest references it.
#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Collects every file written during a run under one directory.
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<FileDigest>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Result<OutputSet> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(OutputSet {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.files.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(contents),
        });
        Ok(())
    }

    pub fn file_count(&self) -> usize {
        self.files.len()
    }

    /// Writes the manifest last, referencing every file written so far.
    pub fn write_manifest(self, manifest: &RunManifest) -> Result<()> {
        let mut manifest = manifest.clone();
        manifest.outputs = self.files.clone();
        let path = self.dir.join("manifest.json");
        let body = to_json_bytes(&manifest)?;
        fs::write(&path, body).map_err(|e| Error::io(&path, e))
    }
}

/// Provenance record of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    pub scenario: String,
    pub alpha_s: u64,
    pub min_elevation_deg: f64,
    pub jobs: Option<usize>,
    pub duration_s: f64,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

/// Hashes the scenario's source files for the manifest.
pub fn digest_inputs(paths: &[PathBuf]) -> Result<Vec<FileDigest>> {
    paths
        .iter()
        .map(|path| {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            Ok(FileDigest {
                path: path.display().to_string(),
                sha256: sha256_hex(&bytes),
            })
        })
        .collect()
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut body = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::Format(format!("serializing report: {e}")))?;
    body.push(b'\n');
    Ok(body)
}

fn csv_into_bytes(writer: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    writer
        .into_inner()
        .map_err(|e| Error::Format(format!("assembling CSV: {e}")))
}

/// File-name-safe form of an identifier.
pub fn sanitize_id(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '-' })
        .collect()
}

const WINDOW_HEADER: [&str; 5] = ["station", "satellite", "start", "end", "duration_s"];

fn window_record(spectrum: &TemporalSpectrum, window: &AccessWindow) -> [String; 5] {
    [
        spectrum.station_id.clone(),
        spectrum.satellite_id.clone(),
        window.start.format_iso_seconds(),
        window.end.format_iso_seconds(),
        format!("{:.3}", window.duration_s()),
    ]
}

/// Window list CSV for one or more pairs.
pub fn windows_csv(spectra: &[&TemporalSpectrum]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(WINDOW_HEADER)
        .and_then(|()| {
            spectra.iter().try_for_each(|spectrum| {
                spectrum
                    .windows
                    .iter()
                    .try_for_each(|w| writer.write_record(window_record(spectrum, w)))
            })
        })
        .map_err(|e| Error::Format(format!("writing window CSV: {e}")))?;
    csv_into_bytes(writer)
}

/// Step-function plot data for one pair: the 0/1 staircase over the span.
pub fn steps_csv(
    spectrum: &TemporalSpectrum,
    span_start: tsa_core::time::UtcTime,
    span_end: tsa_core::time::UtcTime,
) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["time", "visible"])
        .map_err(|e| Error::Format(format!("writing step CSV: {e}")))?;
    let mut emit = |t: tsa_core::time::UtcTime, level: u8| {
        writer.write_record([t.format_iso_seconds(), level.to_string()])
    };
    emit(span_start, 0)
        .and_then(|()| {
            spectrum.windows.iter().try_for_each(|w| {
                emit(w.start, 0)
                    .and_then(|()| emit(w.start, 1))
                    .and_then(|()| emit(w.end, 1))
                    .and_then(|()| emit(w.end, 0))
            })
        })
        .and_then(|()| emit(span_end, 0))
        .map_err(|e| Error::Format(format!("writing step CSV: {e}")))?;
    csv_into_bytes(writer)
}

#[derive(Serialize)]
pub struct WindowJson {
    pub start: String,
    pub end: String,
    pub duration_s: f64,
}

impl WindowJson {
    pub fn from_global(gw: &GlobalWindow) -> WindowJson {
        WindowJson {
            start: gw.start.format_iso_seconds(),
            end: gw.end.format_iso_seconds(),
            duration_s: gw.duration_s(),
        }
    }
}

/// The intra-constellation analysis report body.
#[derive(Serialize)]
pub struct IntraJson {
    pub constellation: String,
    pub global_window: WindowJson,
    pub alpha_s: u64,
    pub station_ids: Vec<String>,
    pub satellite_ids: Vec<String>,
    pub station_total_seconds: Vec<u64>,
    pub memory_bits: u64,
    pub gram: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub leading_vector: Vec<f64>,
    pub dominant_station: String,
    pub isolated_station: String,
}

impl IntraJson {
    pub fn from_report(report: &IntraReport) -> IntraJson {
        let stations = report.spectrum.station_ids.len();
        let gram = (0..stations)
            .map(|i| (0..stations).map(|j| report.gram[(i, j)]).collect())
            .collect();
        IntraJson {
            constellation: report.spectrum.constellation_id.clone(),
            global_window: WindowJson::from_global(&report.spectrum.global_window),
            alpha_s: report.spectrum.alpha_s,
            station_ids: report.spectrum.station_ids.clone(),
            satellite_ids: report.spectrum.satellite_ids.clone(),
            station_total_seconds: report.spectrum.station_totals(),
            memory_bits: report.memory_bits,
            gram,
            eigenvalues: report.eigenvalues.clone(),
            leading_vector: report.leading_vector(),
            dominant_station: report.dominant_station().to_string(),
            isolated_station: report.isolated_station().to_string(),
        }
    }
}

/// Spectrum-strength matrix CSV: one row per station, one column per
/// satellite.
pub fn strength_csv(report: &IntraReport) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let spectrum = &report.spectrum;
    let mut header = vec!["station".to_string()];
    header.extend(spectrum.satellite_ids.iter().cloned());
    writer
        .write_record(&header)
        .and_then(|()| {
            spectrum
                .station_ids
                .iter()
                .enumerate()
                .try_for_each(|(g, station)| {
                    let mut row = vec![station.clone()];
                    row.extend(
                        (0..spectrum.satellite_ids.len())
                            .map(|x| spectrum.value(g, x).to_string()),
                    );
                    writer.write_record(&row)
                })
        })
        .map_err(|e| Error::Format(format!("writing strength CSV: {e}")))?;
    csv_into_bytes(writer)
}

#[derive(Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

#[derive(Serialize)]
pub struct InterPairJson {
    pub from: String,
    pub to: String,
    pub global_window: WindowJson,
    pub no_visibility: bool,
    pub strongest_station: Option<String>,
    pub pulse_count: u64,
    pub density_per_s: f64,
    pub station_pulse_totals: Vec<StationPulsesJson>,
    pub pmf: BTreeMap<u64, f64>,
}

#[derive(Serialize)]
pub struct StationPulsesJson {
    pub station: String,
    pub pulses: u64,
}

/// The inter-constellation analysis report body.
#[derive(Serialize)]
pub struct InterJson {
    pub constellations: Vec<String>,
    pub pooling: &'static str,
    pub matrix: Vec<Vec<u64>>,
    pub eigenvalues: Vec<ComplexJson>,
    pub eigenvectors: Vec<Vec<ComplexJson>>,
    pub pairs: Vec<InterPairJson>,
}

impl InterJson {
    pub fn from_analysis(analysis: &InteractionAnalysis) -> InterJson {
        let n = analysis.constellation_ids.len();
        InterJson {
            constellations: analysis.constellation_ids.clone(),
            pooling: match analysis.pooling {
                PmfPooling::AllPairs => "all-pairs",
                PmfPooling::BestStation => "best-station",
            },
            matrix: (0..n)
                .map(|i| analysis.counts[i * n..(i + 1) * n].to_vec())
                .collect(),
            eigenvalues: analysis
                .eigen
                .eigenvalues
                .iter()
                .map(|z| ComplexJson { re: z.re, im: z.im })
                .collect(),
            eigenvectors: analysis
                .eigen
                .vectors
                .iter()
                .map(|v| v.iter().map(|z| ComplexJson { re: z.re, im: z.im }).collect())
                .collect(),
            pairs: analysis
                .pairs
                .iter()
                .map(|pair| InterPairJson {
                    from: pair.from.clone(),
                    to: pair.to.clone(),
                    global_window: WindowJson::from_global(&pair.global_window),
                    no_visibility: pair.no_visibility,
                    strongest_station: pair.strongest_station.clone(),
                    pulse_count: pair.pulse_count,
                    density_per_s: pair.density,
                    station_pulse_totals: pair
                        .station_totals
                        .iter()
                        .map(|(station, pulses)| StationPulsesJson {
                            station: station.clone(),
                            pulses: *pulses,
                        })
                        .collect(),
                    pmf: pair.pmf.clone(),
                })
                .collect(),
        }
    }
}

/// Interaction matrix CSV in heat-map layout: rows = observing
/// constellation.
pub fn matrix_csv(analysis: &InteractionAnalysis) -> Result<Vec<u8>> {
    let n = analysis.constellation_ids.len();
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["from\\to".to_string()];
    header.extend(analysis.constellation_ids.iter().cloned());
    writer
        .write_record(&header)
        .and_then(|()| {
            analysis
                .constellation_ids
                .iter()
                .enumerate()
                .try_for_each(|(i, from)| {
                    let mut row = vec![from.clone()];
                    row.extend(
                        analysis.counts[i * n..(i + 1) * n]
                            .iter()
                            .map(|c| c.to_string()),
                    );
                    writer.write_record(&row)
                })
        })
        .map_err(|e| Error::Format(format!("writing matrix CSV: {e}")))?;
    csv_into_bytes(writer)
}

/// All pulse-count distributions as long-form CSV.
pub fn pmf_csv(analysis: &InteractionAnalysis) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["from", "to", "pulses_per_hour", "probability"])
        .and_then(|()| {
            analysis.pairs.iter().try_for_each(|pair| {
                pair.pmf.iter().try_for_each(|(k, probability)| {
                    writer.write_record([
                        pair.from.clone(),
                        pair.to.clone(),
                        k.to_string(),
                        probability.to_string(),
                    ])
                })
            })
        })
        .map_err(|e| Error::Format(format!("writing PMF CSV: {e}")))?;
    csv_into_bytes(writer)
}
