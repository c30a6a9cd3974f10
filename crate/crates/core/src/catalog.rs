//! Input catalogs: two-line element sets, ground stations, and scenarios.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::time::UtcTime;

/// One parsed two-line element set.
///
/// Fields keep the conventions of the distribution format: angles in
/// degrees, mean motion in revolutions per day (Kozai convention), the
/// first mean motion derivative as the halved value printed in column
/// 34-43, and the drag term in inverse Earth radii.
#[derive(Debug, Clone, PartialEq)]
pub struct TleRecord {
    /// Satellite name from the optional title line preceding the pair.
    pub name: Option<String>,
    /// Catalog number.
    pub catalog_number: u32,
    /// Element set epoch (UTC).
    pub epoch: UtcTime,
    /// Half of the first time derivative of mean motion, rev/day².
    pub mean_motion_dot: f64,
    /// One sixth of the second time derivative of mean motion, rev/day³.
    pub mean_motion_ddot: f64,
    /// Drag term B*, Earth radii⁻¹.
    pub bstar: f64,
    /// Inclination, degrees.
    pub inclination_deg: f64,
    /// Right ascension of the ascending node, degrees.
    pub raan_deg: f64,
    /// Eccentricity.
    pub eccentricity: f64,
    /// Argument of perigee, degrees.
    pub arg_perigee_deg: f64,
    /// Mean anomaly, degrees.
    pub mean_anomaly_deg: f64,
    /// Mean motion, rev/day.
    pub mean_motion_rev_day: f64,
}

impl TleRecord {
    /// Identifier used in outputs and cross-references: the title-line name
    /// when one was present, otherwise the catalog number.
    pub fn id(&self) -> String {
        match &self.name {
            Some(name) => name.clone(),
            None => self.catalog_number.to_string(),
        }
    }

    /// Renders the record back to the fixed 69-column two-line format with
    /// recomputed checksums.
    ///
    /// Fields the record does not keep (international designator, element
    /// set number, revolution count) are written as blanks or fixed values,
    /// so serialization is canonical rather than byte-identical to the
    /// source. Parsing the output yields an equal record (minus the name,
    /// which lives on the title line).
    pub fn to_tle_lines(&self) -> (String, String) {
        let (year, doy) = self.epoch.to_year_day();
        let mut day = doy.floor() as u64;
        let mut frac = ((doy - doy.floor()) * 1e8).round() as u64;
        if frac == 100_000_000 {
            day += 1;
            frac = 0;
        }
        let ndot_sign = if self.mean_motion_dot < 0.0 { '-' } else { ' ' };
        let ndot_body = format!("{:.8}", self.mean_motion_dot.abs());
        let mut line1 = format!(
            "1 {:05}U          {:02}{:03}.{:08} {}{} {} {} 0  999",
            self.catalog_number,
            year.rem_euclid(100),
            day,
            frac,
            ndot_sign,
            ndot_body.trim_start_matches('0'),
            encode_assumed_decimal(self.mean_motion_ddot),
            encode_assumed_decimal(self.bstar),
        );
        let mut line2 = format!(
            "2 {:05} {:8.4} {:8.4} {:07} {:8.4} {:8.4} {:11.8}    0",
            self.catalog_number,
            self.inclination_deg,
            self.raan_deg,
            (self.eccentricity * 1e7).round().min(9_999_999.0) as u64,
            self.arg_perigee_deg,
            self.mean_anomaly_deg,
            self.mean_motion_rev_day,
        );
        debug_assert_eq!(line1.len(), 68);
        debug_assert_eq!(line2.len(), 68);
        for line in [&mut line1, &mut line2] {
            let digit = tle_checksum(line);
            line.push(char::from_digit(digit, 10).expect("single digit"));
        }
        (line1, line2)
    }
}

/// Mod-10 checksum over the first 68 columns: digits count as their value,
/// minus signs count as one, every other character as zero.
pub fn tle_checksum(line: &str) -> u32 {
    line.chars()
        .take(68)
        .map(|c| match c {
            '0'..='9' => c as u32 - '0' as u32,
            '-' => 1,
            _ => 0,
        })
        .sum::<u32>()
        % 10
}

/// Parses a text block of element sets.
///
/// Accepts bare line pairs, pairs preceded by a title line, and the
/// three-line variant whose title lines start with `0 `. Blank lines are
/// ignored. Both lines of every pair are validated for length and checksum
/// before any field is interpreted, and the catalog numbers on the two
/// lines must agree.
pub fn parse_tle(text: &str) -> Result<Vec<TleRecord>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(index, line)| (index + 1, line.trim_end()))
        .filter(|(_, line)| !line.is_empty())
        .collect();
    let mut records = Vec::new();
    let mut pending_name: Option<String> = None;
    let mut i = 0;
    while i < lines.len() {
        let (lineno, line) = lines[i];
        if is_element_line(line, '2') {
            return Err(Error::Format(format!(
                "line {lineno}: element line 2 without a preceding line 1"
            )));
        }
        if is_element_line(line, '1') {
            let (lineno2, line2) = *lines.get(i + 1).ok_or_else(|| {
                Error::Format(format!(
                    "line {lineno}: element line 1 without a matching line 2"
                ))
            })?;
            if !is_element_line(line2, '2') {
                return Err(Error::Format(format!(
                    "line {lineno2}: expected element line 2 after line {lineno}"
                )));
            }
            records.push(parse_pair(
                lineno,
                line,
                lineno2,
                line2,
                pending_name.take(),
            )?);
            i += 2;
        } else {
            let name = line.strip_prefix("0 ").unwrap_or(line).trim();
            pending_name = Some(name.to_string());
            i += 1;
        }
    }
    if records.is_empty() {
        return Err(Error::Format("no element sets found".into()));
    }
    Ok(records)
}

fn is_element_line(line: &str, which: char) -> bool {
    let bytes = line.as_bytes();
    bytes.first() == Some(&(which as u8)) && bytes.get(1) == Some(&b' ') && line.len() > 8
}

fn parse_pair(
    lineno1: usize,
    line1: &str,
    lineno2: usize,
    line2: &str,
    name: Option<String>,
) -> Result<TleRecord> {
    check_line(lineno1, line1)?;
    check_line(lineno2, line2)?;
    let catalog_number = parse_u32(lineno1, line1, 2, 7, "catalog number")?;
    let catalog_number2 = parse_u32(lineno2, line2, 2, 7, "catalog number")?;
    if catalog_number != catalog_number2 {
        return Err(Error::Format(format!(
            "line {lineno2}: catalog number {catalog_number2} does not match line 1 ({catalog_number})"
        )));
    }
    let two_digit_year = parse_u32(lineno1, line1, 18, 20, "epoch year")?;
    let year = if two_digit_year < 57 {
        2000 + two_digit_year as i32
    } else {
        1900 + two_digit_year as i32
    };
    let day_of_year = parse_f64(lineno1, line1, 20, 32, "epoch day")?;
    let epoch = UtcTime::from_year_day(year, day_of_year)
        .map_err(|e| Error::Format(format!("line {lineno1}: {e}")))?;
    let eccentricity = {
        let raw = line2[26..33].trim();
        format!("0.{raw}").parse::<f64>().map_err(|_| {
            Error::Format(format!("line {lineno2}, columns 27..33: bad eccentricity {raw:?}"))
        })?
    };
    let record = TleRecord {
        name,
        catalog_number,
        epoch,
        mean_motion_dot: parse_f64(lineno1, line1, 33, 43, "mean motion derivative")?,
        mean_motion_ddot: parse_assumed_decimal(lineno1, line1, 44, "second derivative")?,
        bstar: parse_assumed_decimal(lineno1, line1, 53, "drag term")?,
        inclination_deg: parse_f64(lineno2, line2, 8, 16, "inclination")?,
        raan_deg: parse_f64(lineno2, line2, 17, 25, "right ascension")?,
        eccentricity,
        arg_perigee_deg: parse_f64(lineno2, line2, 34, 42, "argument of perigee")?,
        mean_anomaly_deg: parse_f64(lineno2, line2, 43, 51, "mean anomaly")?,
        mean_motion_rev_day: parse_f64(lineno2, line2, 52, 63, "mean motion")?,
    };
    if !(0.0..=180.0).contains(&record.inclination_deg) {
        return Err(Error::Format(format!(
            "line {lineno2}: inclination {} outside [0, 180]",
            record.inclination_deg
        )));
    }
    if !(0.0..1.0).contains(&record.eccentricity) {
        return Err(Error::Format(format!(
            "line {lineno2}: eccentricity {} outside [0, 1)",
            record.eccentricity
        )));
    }
    if record.mean_motion_rev_day <= 0.0 {
        return Err(Error::Format(format!(
            "line {lineno2}: mean motion {} must be positive",
            record.mean_motion_rev_day
        )));
    }
    Ok(record)
}

fn check_line(lineno: usize, line: &str) -> Result<()> {
    if !line.is_ascii() || line.len() != 69 {
        return Err(Error::Format(format!(
            "line {lineno}: element lines must be 69 ASCII columns, got {}",
            line.chars().count()
        )));
    }
    let recorded = line.as_bytes()[68];
    if !recorded.is_ascii_digit() {
        return Err(Error::Format(format!(
            "line {lineno}: checksum column is not a digit"
        )));
    }
    let computed = tle_checksum(line);
    let recorded = u32::from(recorded - b'0');
    if computed != recorded {
        return Err(Error::Checksum {
            line: lineno,
            computed,
            recorded,
        });
    }
    Ok(())
}

fn parse_f64(lineno: usize, line: &str, start: usize, end: usize, what: &str) -> Result<f64> {
    let raw = line[start..end].trim();
    raw.parse().map_err(|_| {
        Error::Format(format!(
            "line {lineno}, columns {}..{}: bad {what}: {raw:?}",
            start + 1,
            end
        ))
    })
}

fn parse_u32(lineno: usize, line: &str, start: usize, end: usize, what: &str) -> Result<u32> {
    let raw = line[start..end].trim();
    raw.parse().map_err(|_| {
        Error::Format(format!(
            "line {lineno}, columns {}..{}: bad {what}: {raw:?}",
            start + 1,
            end
        ))
    })
}

/// Decodes the assumed-decimal-point notation used for the second mean
/// motion derivative and the drag term: ` 28098-4` means 0.28098e-4. An
/// all-blank field reads as zero.
fn parse_assumed_decimal(lineno: usize, line: &str, start: usize, what: &str) -> Result<f64> {
    let mantissa = line[start..start + 6].trim();
    let exponent = line[start + 6..start + 8].trim();
    if mantissa.is_empty() && exponent.is_empty() {
        return Ok(0.0);
    }
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let bad = || {
        Error::Format(format!(
            "line {lineno}, columns {}..{}: bad {what}: {:?}",
            start + 1,
            start + 8,
            &line[start..start + 8]
        ))
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let value: f64 = format!("0.{digits}").parse().map_err(|_| bad())?;
    let exp: i32 = if exponent.is_empty() {
        0
    } else {
        exponent.parse().map_err(|_| bad())?
    };
    Ok(sign * value * 10f64.powi(exp))
}

/// Inverse of the assumed-decimal-point decoding, producing the canonical
/// eight-column form. Zero renders as ` 00000-0`.
fn encode_assumed_decimal(value: f64) -> String {
    if value == 0.0 {
        return " 00000-0".into();
    }
    let sign = if value < 0.0 { '-' } else { ' ' };
    let mut exp = value.abs().log10().floor() as i32 + 1;
    let mut mantissa = (value.abs() / 10f64.powi(exp) * 1e5).round() as u64;
    if mantissa == 100_000 {
        mantissa = 10_000;
        exp += 1;
    }
    format!("{sign}{mantissa:05}{exp:+}")
}

/// A ground station with geodetic coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStation {
    pub id: String,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    /// Height above the reference ellipsoid, meters.
    pub altitude_m: f64,
    /// Identifier of the constellation whose network this station serves.
    pub constellation: String,
}

/// Header required on station CSV files.
pub const STATION_CSV_HEADER: [&str; 5] = ["id", "lat_deg", "lon_deg", "alt_m", "constellation"];

/// Parses a station CSV document with the exact header
/// `id,lat_deg,lon_deg,alt_m,constellation`.
pub fn parse_stations(text: &str) -> Result<Vec<GroundStation>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Format(format!("bad station CSV header: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != STATION_CSV_HEADER {
        return Err(Error::Format(format!(
            "station CSV header must be {:?}, got {:?}",
            STATION_CSV_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut stations: Vec<GroundStation> = Vec::new();
    for (index, row) in reader.records().enumerate() {
        let rowno = index + 2;
        let row = row.map_err(|e| Error::Format(format!("station CSV row {rowno}: {e}")))?;
        if row.len() != 5 {
            return Err(Error::Format(format!(
                "station CSV row {rowno}: expected 5 fields, got {}",
                row.len()
            )));
        }
        let id = row[0].to_string();
        if id.is_empty() {
            return Err(Error::Format(format!("station CSV row {rowno}: empty id")));
        }
        let number = |column: usize, what: &str| -> Result<f64> {
            row[column].parse().map_err(|_| {
                Error::Format(format!(
                    "station CSV row {rowno}: bad {what}: {:?}",
                    &row[column]
                ))
            })
        };
        let latitude_deg = number(1, "latitude")?;
        let longitude_deg = number(2, "longitude")?;
        let altitude_m = number(3, "altitude")?;
        if !(-90.0..=90.0).contains(&latitude_deg) {
            return Err(Error::Range(format!(
                "station {id}: latitude {latitude_deg} outside [-90, 90]"
            )));
        }
        if !(-180.0..=180.0).contains(&longitude_deg) {
            return Err(Error::Range(format!(
                "station {id}: longitude {longitude_deg} outside [-180, 180]"
            )));
        }
        if !altitude_m.is_finite() {
            return Err(Error::Range(format!("station {id}: altitude must be finite")));
        }
        let constellation = row[4].to_string();
        if constellation.is_empty() {
            return Err(Error::Format(format!(
                "station CSV row {rowno}: empty constellation"
            )));
        }
        if stations.iter().any(|s| s.id == id) {
            return Err(Error::Format(format!("duplicate station id {id:?}")));
        }
        stations.push(GroundStation {
            id,
            latitude_deg,
            longitude_deg,
            altitude_m,
            constellation,
        });
    }
    Ok(stations)
}

/// Reads and parses a station CSV file.
pub fn load_stations(path: &Path) -> Result<Vec<GroundStation>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_stations(&text)
}

/// One constellation: its ground network and its satellites.
#[derive(Debug, Clone)]
pub struct Constellation {
    pub id: String,
    pub stations: Vec<GroundStation>,
    pub satellites: Vec<TleRecord>,
}

/// A full analysis scenario: the constellations under study, the shared
/// analysis span, and the sampling parameters.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub constellations: Vec<Constellation>,
    /// Start of the analysis span (inclusive).
    pub span_start: UtcTime,
    /// End of the analysis span (exclusive).
    pub span_end: UtcTime,
    /// Sampling interval in whole seconds.
    pub alpha_s: u64,
    /// Elevation mask in degrees, applied at every station.
    pub min_elevation_deg: f64,
    /// Files the scenario was assembled from, for provenance reporting.
    /// Empty for scenarios built in memory.
    pub source_files: Vec<PathBuf>,
}

impl Scenario {
    /// Validates and assembles a scenario.
    ///
    /// Checks that the span is non-empty, the sampling interval is at least
    /// one second, the elevation mask is a legal angle, constellation ids
    /// are unique, station and satellite ids are unique within each
    /// constellation, and every station's `constellation` column matches
    /// the constellation it is listed under.
    pub fn new(
        constellations: Vec<Constellation>,
        span_start: UtcTime,
        span_end: UtcTime,
        alpha_s: u64,
        min_elevation_deg: f64,
    ) -> Result<Scenario> {
        if span_end.seconds_since(span_start) <= 0.0 {
            return Err(Error::Format(format!(
                "span end {span_end} is not after span start {span_start}"
            )));
        }
        if alpha_s == 0 {
            return Err(Error::Format("sampling interval must be at least 1 s".into()));
        }
        if !(-90.0..=90.0).contains(&min_elevation_deg) {
            return Err(Error::Range(format!(
                "elevation mask {min_elevation_deg} outside [-90, 90]"
            )));
        }
        for (index, constellation) in constellations.iter().enumerate() {
            if constellation.id.is_empty() {
                return Err(Error::Format(format!("constellation {index} has an empty id")));
            }
            if constellations[..index].iter().any(|c| c.id == constellation.id) {
                return Err(Error::Format(format!(
                    "duplicate constellation id {:?}",
                    constellation.id
                )));
            }
            for station in &constellation.stations {
                if station.constellation != constellation.id {
                    return Err(Error::CrossReference(format!(
                        "station {:?} declares constellation {:?} but is listed under {:?}",
                        station.id, station.constellation, constellation.id
                    )));
                }
            }
            for (si, station) in constellation.stations.iter().enumerate() {
                if constellation.stations[..si].iter().any(|s| s.id == station.id) {
                    return Err(Error::Format(format!(
                        "duplicate station id {:?} in constellation {:?}",
                        station.id, constellation.id
                    )));
                }
            }
            for (si, sat) in constellation.satellites.iter().enumerate() {
                let id = sat.id();
                if constellation.satellites[..si].iter().any(|s| s.id() == id) {
                    return Err(Error::Format(format!(
                        "duplicate satellite id {id:?} in constellation {:?}",
                        constellation.id
                    )));
                }
            }
        }
        Ok(Scenario {
            constellations,
            span_start,
            span_end,
            alpha_s,
            min_elevation_deg,
            source_files: Vec::new(),
        })
    }

    /// Looks up a constellation by id.
    pub fn constellation(&self, id: &str) -> Result<&Constellation> {
        self.constellations
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::CrossReference(format!("no constellation {id:?}")))
    }

    /// Duration of the analysis span in seconds.
    pub fn span_seconds(&self) -> f64 {
        self.span_end.seconds_since(self.span_start)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    span_start: String,
    span_end: String,
    #[serde(default = "default_alpha")]
    alpha_s: u64,
    #[serde(default)]
    min_elevation_deg: f64,
    constellations: Vec<ConstellationEntry>,
}

fn default_alpha() -> u64 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstellationEntry {
    id: String,
    stations: PathBuf,
    tles: PathBuf,
}

/// Loads a scenario TOML file.
///
/// The file names a shared span, optional `alpha_s` (default 1) and
/// `min_elevation_deg` (default 0), and a `[[constellations]]` entry per
/// constellation pointing at a station CSV and a TLE file. Relative paths
/// resolve against the scenario file's directory.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ScenarioFile = toml::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let base = path.parent().filter(|p| !p.as_os_str().is_empty());
    let resolve = |p: &Path| match base {
        Some(base) if p.is_relative() => base.join(p),
        _ => p.to_path_buf(),
    };
    let mut source_files = vec![path.to_path_buf()];
    let mut constellations = Vec::new();
    for entry in &file.constellations {
        let stations_path = resolve(&entry.stations);
        let stations = load_stations(&stations_path)?;
        let tle_path = resolve(&entry.tles);
        let tle_text = fs::read_to_string(&tle_path).map_err(|e| Error::io(&tle_path, e))?;
        let satellites = parse_tle(&tle_text)?;
        source_files.push(stations_path);
        source_files.push(tle_path);
        constellations.push(Constellation {
            id: entry.id.clone(),
            stations,
            satellites,
        });
    }
    let mut scenario = Scenario::new(
        constellations,
        UtcTime::parse_iso(&file.span_start)?,
        UtcTime::parse_iso(&file.span_end)?,
        file.alpha_s,
        file.min_elevation_deg,
    )?;
    scenario.source_files = source_files;
    Ok(scenario)
}
