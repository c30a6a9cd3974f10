//! SGP4 propagation and the Earth-frame geometry behind elevation angles.
//!
//! The frame chain is deliberately short: SGP4 states are produced in TEME,
//! rotated into an Earth-fixed frame by the IAU 1982 Greenwich mean
//! sidereal angle, and compared against WGS84 station positions. Nutation,
//! polar motion, and leap seconds are neglected; for low-orbit visibility
//! work their effect on window boundaries is far below the one second
//! sampling quantum.

use std::sync::atomic::{AtomicBool, Ordering};

use crate::catalog::{GroundStation, TleRecord};
use crate::error::{Error, Result};
use crate::time::{UtcTime, SECONDS_PER_DAY};

/// WGS84 equatorial radius, km.
pub const EARTH_EQUATORIAL_RADIUS_KM: f64 = 6378.137;

/// WGS84 flattening.
pub const EARTH_FLATTENING: f64 = 1.0 / 298.257_223_563;

/// Age beyond which a one-time staleness warning is logged per satellite.
pub const TLE_AGE_WARNING_DAYS: f64 = 30.0;

/// Inertial state in the TEME frame.
#[derive(Debug, Clone, Copy)]
pub struct TemeState {
    pub t: UtcTime,
    pub position_km: [f64; 3],
    pub velocity_km_s: [f64; 3],
}

/// Position in the rotating Earth-fixed frame.
#[derive(Debug, Clone, Copy)]
pub struct EcefPosition {
    pub t: UtcTime,
    pub position_km: [f64; 3],
}

/// An initialized SGP4 propagator for one element set.
///
/// Initialization happens once in [`Propagator::new`]; propagation is a
/// pure function of the evaluation time afterwards, so one instance can be
/// shared across threads.
pub struct Propagator {
    constants: sgp4::Constants,
    epoch: UtcTime,
    satellite_id: String,
    age_warned: AtomicBool,
}

impl Propagator {
    /// Initializes SGP4 from a parsed element set.
    pub fn new(record: &TleRecord) -> Result<Propagator> {
        let elements = sgp4::Elements {
            object_name: record.name.clone(),
            international_designator: None,
            norad_id: u64::from(record.catalog_number),
            classification: sgp4::Classification::Unclassified,
            datetime: record.epoch.to_datetime().naive_utc(),
            mean_motion_dot: record.mean_motion_dot,
            mean_motion_ddot: record.mean_motion_ddot,
            drag_term: record.bstar,
            element_set_number: 0,
            inclination: record.inclination_deg,
            right_ascension: record.raan_deg,
            eccentricity: record.eccentricity,
            argument_of_perigee: record.arg_perigee_deg,
            mean_anomaly: record.mean_anomaly_deg,
            mean_motion: record.mean_motion_rev_day,
            revolution_number: 0,
            ephemeris_type: 0,
        };
        let constants = sgp4::Constants::from_elements_afspc_compatibility_mode(&elements)
            .map_err(|e| Error::Format(format!("satellite {}: {e}", record.id())))?;
        Ok(Propagator {
            constants,
            epoch: record.epoch,
            satellite_id: record.id(),
            age_warned: AtomicBool::new(false),
        })
    }

    /// Element set epoch.
    pub fn epoch(&self) -> UtcTime {
        self.epoch
    }

    /// Identifier of the underlying element set.
    pub fn satellite_id(&self) -> &str {
        &self.satellite_id
    }

    /// Propagates to `t`, returning the TEME state.
    pub fn propagate_teme(&self, t: UtcTime) -> Result<TemeState> {
        let elapsed_s = t.seconds_since(self.epoch);
        if elapsed_s.abs() > TLE_AGE_WARNING_DAYS * SECONDS_PER_DAY
            && !self.age_warned.swap(true, Ordering::Relaxed)
        {
            log::warn!(
                "satellite {}: evaluation {:.1} days from element epoch, accuracy degrades",
                self.satellite_id,
                elapsed_s / SECONDS_PER_DAY
            );
        }
        let prediction = self
            .constants
            .propagate_afspc_compatibility_mode(sgp4::MinutesSinceEpoch(elapsed_s / 60.0))
            .map_err(|e| Error::Decay {
                satellite: self.satellite_id.clone(),
                detail: e.to_string(),
            })?;
        Ok(TemeState {
            t,
            position_km: prediction.position,
            velocity_km_s: prediction.velocity,
        })
    }

    /// Propagates to `t` and rotates into the Earth-fixed frame.
    pub fn propagate_ecef(&self, t: UtcTime) -> Result<EcefPosition> {
        Ok(teme_to_ecef(&self.propagate_teme(t)?))
    }
}

/// Greenwich mean sidereal time in radians in [0, 2π), IAU 1982 model,
/// with UT1 taken equal to UTC.
pub fn gmst_rad(t: UtcTime) -> f64 {
    let centuries = (t.julian_date() - 2_451_545.0) / 36_525.0;
    let seconds = 67_310.548_41
        + centuries
            * (876_600.0 * 3_600.0
                + 8_640_184.812_866
                + centuries * (0.093_104 - centuries * 6.2e-6));
    seconds.rem_euclid(86_400.0) * (std::f64::consts::TAU / 86_400.0)
}

/// Rotates `v` by `-angle` about the z-axis, i.e. expresses an inertial
/// vector in a frame that has rotated ahead by `angle`.
pub fn rotate_about_z(v: [f64; 3], angle: f64) -> [f64; 3] {
    let (sin, cos) = angle.sin_cos();
    [cos * v[0] + sin * v[1], -sin * v[0] + cos * v[1], v[2]]
}

/// Rotates a TEME state into the Earth-fixed frame at its own instant.
pub fn teme_to_ecef(state: &TemeState) -> EcefPosition {
    EcefPosition {
        t: state.t,
        position_km: rotate_about_z(state.position_km, gmst_rad(state.t)),
    }
}

/// WGS84 geodetic to Earth-fixed conversion.
pub fn station_ecef(station: &GroundStation) -> [f64; 3] {
    let lat = station.latitude_deg.to_radians();
    let lon = station.longitude_deg.to_radians();
    let e2 = EARTH_FLATTENING * (2.0 - EARTH_FLATTENING);
    let prime_vertical = EARTH_EQUATORIAL_RADIUS_KM / (1.0 - e2 * lat.sin().powi(2)).sqrt();
    let alt_km = station.altitude_m / 1_000.0;
    [
        (prime_vertical + alt_km) * lat.cos() * lon.cos(),
        (prime_vertical + alt_km) * lat.cos() * lon.sin(),
        (prime_vertical * (1.0 - e2) + alt_km) * lat.sin(),
    ]
}

/// A ground station with its Earth-fixed position and geodetic zenith
/// direction cached for elevation tests.
#[derive(Debug, Clone)]
pub struct Site {
    pub station_id: String,
    pub position_km: [f64; 3],
    up: [f64; 3],
}

impl Site {
    pub fn new(station: &GroundStation) -> Site {
        let lat = station.latitude_deg.to_radians();
        let lon = station.longitude_deg.to_radians();
        Site {
            station_id: station.id.clone(),
            position_km: station_ecef(station),
            up: [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()],
        }
    }

    /// Elevation of `target` above the local geodetic horizon, degrees in
    /// [-90, 90]. A target coincident with the site reads as zenith.
    pub fn elevation_deg(&self, target: &EcefPosition) -> f64 {
        let range = [
            target.position_km[0] - self.position_km[0],
            target.position_km[1] - self.position_km[1],
            target.position_km[2] - self.position_km[2],
        ];
        let norm = (range[0] * range[0] + range[1] * range[1] + range[2] * range[2]).sqrt();
        if norm == 0.0 {
            return 90.0;
        }
        let sin_elevation =
            (range[0] * self.up[0] + range[1] * self.up[1] + range[2] * self.up[2]) / norm;
        sin_elevation.clamp(-1.0, 1.0).asin().to_degrees()
    }
}
