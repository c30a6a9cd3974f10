//! Inter-constellation pulse statistics: pulse counts and densities,
//! hourly pulse-count distributions, and the interaction matrix with its
//! complex eigen structure.
//!
//! Every ordered constellation pair (from, to) is scored by how often
//! `from`'s ground network sees `to`'s satellites. The per-pair scope is
//! the pair's own global window; a pair with no visibility at all falls
//! back to the scenario span and scores zero.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{eigen_general, DMat, GeneralEigen};
use crate::pipeline::ScenarioEngine;
use crate::visibility::{clip, clipped_window_count, global_window, GlobalWindow, TemporalSpectrum};

/// Seconds per distribution bin: pulse counts are tallied per whole hour.
const PMF_BIN_S: f64 = 3_600.0;

/// Number of pulses in a sampled pulse train: positive transitions, with
/// the train taken to be idle before its first bit.
pub fn count_pulses(bits: &[bool]) -> u64 {
    let mut count = 0;
    let mut previous = false;
    for &bit in bits {
        if bit && !previous {
            count += 1;
        }
        previous = bit;
    }
    count
}

/// Pulse density: pulses per second over a span.
pub fn pulse_density(count: u64, duration_s: f64) -> Result<f64> {
    if !(duration_s > 0.0) {
        return Err(Error::Division(format!(
            "pulse density over a span of {duration_s} s"
        )));
    }
    Ok(count as f64 / duration_s)
}

/// How per-pair hourly pulse counts are pooled into one distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmfPooling {
    /// Every (station, satellite) pair contributes its own hourly counts.
    AllPairs,
    /// Only the strongest station's hourly totals over all satellites
    /// contribute.
    BestStation,
}

/// Per-pair pulse starts tallied into whole-hour bins from the window
/// start. Starts in the fractional tail beyond the last whole hour are
/// dropped.
fn hourly_starts(spectrum: &TemporalSpectrum, gw: &GlobalWindow, bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for window in &spectrum.windows {
        let Some(clipped) = clip(window, gw) else {
            continue;
        };
        let bin = (clipped.start.seconds_since(gw.start) / PMF_BIN_S).floor() as usize;
        if bin < bins {
            counts[bin] += 1;
        }
    }
    counts
}

/// Total clipped pulse count per station, in order of first appearance.
pub fn station_pulse_totals(
    spectra: &[TemporalSpectrum],
    gw: &GlobalWindow,
) -> Vec<(String, u64)> {
    let mut totals: Vec<(String, u64)> = Vec::new();
    for spectrum in spectra {
        let count = clipped_window_count(&spectrum.windows, gw);
        match totals.iter_mut().find(|(id, _)| *id == spectrum.station_id) {
            Some((_, total)) => *total += count,
            None => totals.push((spectrum.station_id.clone(), count)),
        }
    }
    totals
}

/// Index of the strongest station in `totals`; ties take the earlier
/// station.
fn strongest_index(totals: &[(String, u64)]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, (_, count)) in totals.iter().enumerate() {
        if best.map_or(true, |b| *count > totals[b].1) {
            best = Some(i);
        }
    }
    best
}

/// Hourly pulse-count distribution over whole-hour bins of the global
/// window.
///
/// With all-pairs pooling every (station, satellite) pair contributes one
/// observation per bin; with best-station pooling each bin contributes the
/// strongest station's total over all its satellites. A window shorter
/// than one hour cannot be binned and is an empty-network error; a pool
/// with no pulse trains at all degenerates to all mass at zero.
pub fn pulse_pmf(
    spectra: &[TemporalSpectrum],
    gw: &GlobalWindow,
    pooling: PmfPooling,
) -> Result<BTreeMap<u64, f64>> {
    let bins = (gw.duration_s() / PMF_BIN_S).floor();
    if !(bins >= 1.0) {
        return Err(Error::EmptyNetwork(format!(
            "global window of {:.1} s is shorter than one distribution bin",
            gw.duration_s()
        )));
    }
    let bins = bins as usize;
    if spectra.is_empty() {
        return Ok(BTreeMap::from([(0, 1.0)]));
    }

    let mut tally: BTreeMap<u64, u64> = BTreeMap::new();
    let observations = match pooling {
        PmfPooling::AllPairs => {
            for spectrum in spectra {
                for count in hourly_starts(spectrum, gw, bins) {
                    *tally.entry(count).or_insert(0) += 1;
                }
            }
            spectra.len() * bins
        }
        PmfPooling::BestStation => {
            let totals = station_pulse_totals(spectra, gw);
            let best = &totals[strongest_index(&totals).expect("nonempty spectra")].0;
            let mut per_bin = vec![0u64; bins];
            for spectrum in spectra.iter().filter(|s| s.station_id == *best) {
                for (bin, count) in hourly_starts(spectrum, gw, bins).into_iter().enumerate() {
                    per_bin[bin] += count;
                }
            }
            for count in per_bin {
                *tally.entry(count).or_insert(0) += 1;
            }
            bins
        }
    };
    Ok(tally
        .into_iter()
        .map(|(count, occurrences)| (count, occurrences as f64 / observations as f64))
        .collect())
}

/// Interaction analysis of one ordered constellation pair.
#[derive(Debug, Clone)]
pub struct PairInteraction {
    pub from: String,
    pub to: String,
    /// Pair-scoped global window; the scenario span when the pair has no
    /// visibility.
    pub global_window: GlobalWindow,
    /// True when the fallback span above is in effect.
    pub no_visibility: bool,
    /// Clipped pulse totals per observing station.
    pub station_totals: Vec<(String, u64)>,
    pub strongest_station: Option<String>,
    /// The strongest station's pulse count: the matrix entry.
    pub pulse_count: u64,
    /// Pulses per second at the strongest station.
    pub density: f64,
    pub pmf: BTreeMap<u64, f64>,
}

/// The full inter-constellation analysis product.
#[derive(Debug, Clone)]
pub struct InteractionAnalysis {
    pub constellation_ids: Vec<String>,
    /// Interaction matrix entries, row-major, rows = observing
    /// constellation.
    pub counts: Vec<u64>,
    pub matrix: DMat,
    pub eigen: GeneralEigen,
    pub pairs: Vec<PairInteraction>,
    pub pooling: PmfPooling,
}

impl InteractionAnalysis {
    pub fn pair(&self, from: usize, to: usize) -> &PairInteraction {
        &self.pairs[from * self.constellation_ids.len() + to]
    }
}

/// Runs the inter-constellation analysis over every ordered constellation
/// pair, the diagonal included.
pub fn analyze_interactions(
    engine: &ScenarioEngine,
    pooling: PmfPooling,
) -> Result<InteractionAnalysis> {
    let scenario = engine.scenario();
    let constellation_ids: Vec<String> = scenario
        .constellations
        .iter()
        .map(|c| c.id.clone())
        .collect();
    let n = constellation_ids.len();
    let mut counts = Vec::with_capacity(n * n);
    let mut pairs = Vec::with_capacity(n * n);
    for from in 0..n {
        for to in 0..n {
            let spectra = engine.spectra(from, to)?;
            let (gw, no_visibility) = match global_window(&spectra) {
                Ok(gw) => (gw, false),
                Err(Error::EmptyNetwork(_)) => (
                    GlobalWindow {
                        start: scenario.span_start,
                        end: scenario.span_end,
                    },
                    true,
                ),
                Err(e) => return Err(e),
            };
            let station_totals = station_pulse_totals(&spectra, &gw);
            let strongest = strongest_index(&station_totals);
            let pulse_count = strongest.map_or(0, |i| station_totals[i].1);
            let density = pulse_density(pulse_count, gw.duration_s())?;
            let pmf = pulse_pmf(&spectra, &gw, pooling)?;
            counts.push(pulse_count);
            pairs.push(PairInteraction {
                from: constellation_ids[from].clone(),
                to: constellation_ids[to].clone(),
                global_window: gw,
                no_visibility,
                station_totals: station_totals.clone(),
                strongest_station: strongest.map(|i| station_totals[i].0.clone()),
                pulse_count,
                density,
                pmf,
            });
        }
    }

    let mut matrix = DMat::zeros(n, n);
    for from in 0..n {
        for to in 0..n {
            matrix[(from, to)] = counts[from * n + to] as f64;
        }
    }
    let eigen = eigen_general(&matrix)?;
    Ok(InteractionAnalysis {
        constellation_ids,
        counts,
        matrix,
        eigen,
        pairs,
        pooling,
    })
}
