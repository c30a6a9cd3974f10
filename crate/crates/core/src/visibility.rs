//! Access windows, the global simultaneity window, and binary sampling.
//!
//! The continuous-time visibility of one satellite from one station is a
//! pulse train: maximal intervals where elevation clears the mask. This
//! module extracts those intervals from the propagator by a coarse scan
//! plus bisection, reduces families of pulse trains to their global
//! simultaneity window, and quantizes pulse trains into binary sequences
//! sampled every `alpha` seconds.
//!
//! Conventions used throughout, chosen once so durations, bit counts, and
//! pulse counts reconcile exactly:
//!
//! * windows are half-open `[start, end)`;
//! * sample ticks sit at interval left edges `gw.start + n·alpha` for
//!   `n < floor(T_g / alpha)`, so quantized totals never exceed `T_g`;
//! * windows shorter than `alpha` are below the representable quantum and
//!   are discarded at extraction time.

use crate::error::{Error, Result};
use crate::propagator::{Propagator, Site};
use crate::time::UtcTime;

/// Half-open interval of continuous visibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessWindow {
    pub start: UtcTime,
    pub end: UtcTime,
}

impl AccessWindow {
    pub fn duration_s(&self) -> f64 {
        self.end.seconds_since(self.start)
    }
}

/// The pulse train of one (station, satellite) pair: every access window
/// in the analysis span, time-ordered and disjoint.
#[derive(Debug, Clone)]
pub struct TemporalSpectrum {
    pub station_id: String,
    pub satellite_id: String,
    pub station_constellation: String,
    pub satellite_constellation: String,
    pub windows: Vec<AccessWindow>,
}

/// Earliest window start to latest window end over a set of spectra.
#[derive(Debug, Clone, Copy)]
pub struct GlobalWindow {
    pub start: UtcTime,
    pub end: UtcTime,
}

impl GlobalWindow {
    pub fn duration_s(&self) -> f64 {
        self.end.seconds_since(self.start)
    }
}

/// A pulse train sampled at `alpha`-second ticks from a global window's
/// start. `bits[n]` covers `origin + n·alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySpectrum {
    pub origin: UtcTime,
    pub alpha_s: u64,
    pub bits: Vec<bool>,
}

/// Parameters of window extraction.
#[derive(Debug, Clone)]
pub struct VisibilityConfig {
    /// Elevation mask, degrees.
    pub min_elevation_deg: f64,
    /// Sampling precision, whole seconds, at least 1.
    pub alpha_s: u64,
    /// Coarse scan step, seconds. The default of 30 s cannot skip a
    /// low-orbit pass, whose shortest above-horizon arc exceeds a minute.
    pub coarse_step_s: f64,
}

impl Default for VisibilityConfig {
    fn default() -> Self {
        VisibilityConfig {
            min_elevation_deg: 0.0,
            alpha_s: 1,
            coarse_step_s: 30.0,
        }
    }
}

/// Bracket width, seconds, to which bisection narrows each elevation
/// crossing. Millisecond placement keeps every boundary far inside the
/// `alpha/2` contract for any legal `alpha`.
const REFINE_TOLERANCE_S: f64 = 1e-3;

/// Extracts the maximal intervals within `[span_start, span_end)` where
/// the satellite's elevation at `site` is at or above the mask.
///
/// A coarse scan evaluates the visibility predicate every
/// `coarse_step_s` seconds (plus the exact span end); each sign change is
/// then refined by bisection. Windows shorter than `alpha_s` are dropped.
pub fn access_windows(
    site: &Site,
    propagator: &Propagator,
    span_start: UtcTime,
    span_end: UtcTime,
    config: &VisibilityConfig,
) -> Result<Vec<AccessWindow>> {
    if config.alpha_s == 0 {
        return Err(Error::Format("sampling interval must be at least 1 s".into()));
    }
    if !(config.coarse_step_s > 0.0) {
        return Err(Error::Format(format!(
            "coarse step {} must be positive",
            config.coarse_step_s
        )));
    }
    let span_s = span_end.seconds_since(span_start);
    if span_s <= 0.0 {
        return Err(Error::Format(format!(
            "span end {span_end} is not after span start {span_start}"
        )));
    }

    let visible = |t: UtcTime| -> Result<bool> {
        let position = propagator.propagate_ecef(t)?;
        Ok(site.elevation_deg(&position) >= config.min_elevation_deg)
    };

    let mut windows = Vec::new();
    let mut open: Option<UtcTime> = None;
    let mut previous_t = span_start;
    let mut previous_visible = visible(previous_t)?;
    if previous_visible {
        open = Some(span_start);
    }
    let mut offset = config.coarse_step_s;
    loop {
        let at_end = offset >= span_s;
        let t = if at_end {
            span_end
        } else {
            span_start.plus_seconds(offset)
        };
        let now_visible = visible(t)?;
        if now_visible != previous_visible {
            let boundary = refine_crossing(&visible, previous_t, previous_visible, t)?;
            if now_visible {
                open = Some(boundary);
            } else {
                let start = open.take().expect("a falling edge closes an open window");
                windows.push(AccessWindow {
                    start,
                    end: boundary,
                });
            }
        }
        previous_t = t;
        previous_visible = now_visible;
        if at_end {
            break;
        }
        offset += config.coarse_step_s;
    }
    if let Some(start) = open {
        windows.push(AccessWindow {
            start,
            end: span_end,
        });
    }
    windows.retain(|w| w.duration_s() >= config.alpha_s as f64);
    Ok(windows)
}

/// Bisects the visibility change inside `(lo, hi]` down to
/// [`REFINE_TOLERANCE_S`] and returns the bracket midpoint.
fn refine_crossing(
    visible: &impl Fn(UtcTime) -> Result<bool>,
    mut lo: UtcTime,
    lo_visible: bool,
    mut hi: UtcTime,
) -> Result<UtcTime> {
    while hi.seconds_since(lo) > REFINE_TOLERANCE_S {
        let mid = lo.plus_seconds(0.5 * hi.seconds_since(lo));
        if visible(mid)? == lo_visible {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo.plus_seconds(0.5 * hi.seconds_since(lo)))
}

/// The simultaneity window of a family of spectra: earliest first-window
/// start to latest last-window end.
pub fn global_window(spectra: &[TemporalSpectrum]) -> Result<GlobalWindow> {
    let mut bounds: Option<(UtcTime, UtcTime)> = None;
    for spectrum in spectra {
        let (Some(first), Some(last)) = (spectrum.windows.first(), spectrum.windows.last())
        else {
            continue;
        };
        bounds = Some(match bounds {
            None => (first.start, last.end),
            Some((start, end)) => (
                if first.start.seconds_since(start) < 0.0 { first.start } else { start },
                if last.end.seconds_since(end) > 0.0 { last.end } else { end },
            ),
        });
    }
    let (start, end) =
        bounds.ok_or_else(|| Error::EmptyNetwork("no access windows in any spectrum".into()))?;
    Ok(GlobalWindow { start, end })
}

/// Number of sample ticks a global window holds at precision `alpha_s`:
/// one per whole `alpha`-second interval.
pub fn sample_count(gw: &GlobalWindow, alpha_s: u64) -> usize {
    let ticks = (gw.duration_s() / alpha_s as f64).floor();
    if ticks.is_sign_negative() {
        0
    } else {
        ticks as usize
    }
}

/// Sample-tick index range `[k0, k1)` covered by `window` clipped to the
/// global window.
fn sample_range(window: &AccessWindow, gw: &GlobalWindow, alpha_s: u64) -> (usize, usize) {
    let ticks = sample_count(gw, alpha_s);
    let alpha = alpha_s as f64;
    let lo = window
        .start
        .unix_seconds()
        .max(gw.start.unix_seconds());
    let hi = window.end.unix_seconds().min(gw.end.unix_seconds());
    if hi <= lo {
        return (0, 0);
    }
    let origin = gw.start.unix_seconds();
    let k0 = (((lo - origin) / alpha).ceil() as usize).min(ticks);
    let k1 = (((hi - origin) / alpha).ceil() as usize).min(ticks);
    (k0, k1.max(k0))
}

/// Quantizes a spectrum onto the global window's sample grid.
pub fn sample(spectrum: &TemporalSpectrum, gw: &GlobalWindow, alpha_s: u64) -> BinarySpectrum {
    debug_assert!(alpha_s >= 1);
    let mut bits = vec![false; sample_count(gw, alpha_s)];
    for window in &spectrum.windows {
        let (k0, k1) = sample_range(window, gw, alpha_s);
        for bit in &mut bits[k0..k1] {
            *bit = true;
        }
    }
    BinarySpectrum {
        origin: gw.start,
        alpha_s,
        bits,
    }
}

/// Total visible seconds of `windows` clipped to the global window, on the
/// sample grid: set ticks times `alpha_s`. Exact integer arithmetic.
pub fn quantized_visible_seconds(
    windows: &[AccessWindow],
    gw: &GlobalWindow,
    alpha_s: u64,
) -> u64 {
    windows
        .iter()
        .map(|w| {
            let (k0, k1) = sample_range(w, gw, alpha_s);
            (k1 - k0) as u64 * alpha_s
        })
        .sum()
}

/// The intersection of a window with the global window, if nonempty.
pub fn clip(window: &AccessWindow, gw: &GlobalWindow) -> Option<AccessWindow> {
    let start = if window.start.seconds_since(gw.start) < 0.0 { gw.start } else { window.start };
    let end = if window.end.seconds_since(gw.end) > 0.0 { gw.end } else { window.end };
    (end.seconds_since(start) > 0.0).then_some(AccessWindow { start, end })
}

/// Number of windows that survive clipping to the global window.
pub fn clipped_window_count(windows: &[AccessWindow], gw: &GlobalWindow) -> u64 {
    windows.iter().filter(|w| clip(w, gw).is_some()).count() as u64
}
