//! Spectrum-strength matrix, Gram matrix, and station ranking for one
//! constellation.
//!
//! The strength matrix H counts quantized visible seconds per
//! (station, satellite) pair inside the constellation's global window.
//! Its Gram matrix J = HHᵀ measures how much visibility every pair of
//! stations shares; the leading eigenvector of J ranks stations from the
//! best-connected (dominant) to the most isolated.

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen_sym, DMat, SymmetricEigen};
use crate::pipeline::ScenarioEngine;
use crate::visibility::{
    global_window, quantized_visible_seconds, sample_count, GlobalWindow, TemporalSpectrum,
};

/// The spectrum-strength matrix H of one constellation: quantized visible
/// seconds per (station, satellite) pair, row-major by station.
#[derive(Debug, Clone)]
pub struct SpectrumMatrix {
    pub constellation_id: String,
    pub station_ids: Vec<String>,
    pub satellite_ids: Vec<String>,
    pub values: Vec<u64>,
    pub global_window: GlobalWindow,
    pub alpha_s: u64,
}

impl SpectrumMatrix {
    pub fn value(&self, station: usize, satellite: usize) -> u64 {
        self.values[station * self.satellite_ids.len() + satellite]
    }

    /// Total quantized visible seconds per station.
    pub fn station_totals(&self) -> Vec<u64> {
        self.station_ids
            .iter()
            .enumerate()
            .map(|(g, _)| {
                (0..self.satellite_ids.len())
                    .map(|x| self.value(g, x))
                    .sum()
            })
            .collect()
    }
}

/// Builds H from spectra that must cover every (station, satellite) pair
/// exactly once, station-major, in id-list order.
pub fn spectrum_matrix(
    constellation_id: &str,
    station_ids: &[String],
    satellite_ids: &[String],
    spectra: &[TemporalSpectrum],
    gw: &GlobalWindow,
    alpha_s: u64,
) -> Result<SpectrumMatrix> {
    if spectra.len() != station_ids.len() * satellite_ids.len() {
        return Err(Error::Dimension(format!(
            "{} spectra cannot fill a {}x{} strength matrix",
            spectra.len(),
            station_ids.len(),
            satellite_ids.len()
        )));
    }
    for (k, spectrum) in spectra.iter().enumerate() {
        let g = k / satellite_ids.len();
        let x = k % satellite_ids.len();
        if spectrum.station_id != station_ids[g] || spectrum.satellite_id != satellite_ids[x] {
            return Err(Error::Dimension(format!(
                "spectrum {k} is ({}, {}), expected ({}, {})",
                spectrum.station_id, spectrum.satellite_id, station_ids[g], satellite_ids[x]
            )));
        }
    }
    let values = spectra
        .iter()
        .map(|s| quantized_visible_seconds(&s.windows, gw, alpha_s))
        .collect();
    Ok(SpectrumMatrix {
        constellation_id: constellation_id.to_string(),
        station_ids: station_ids.to_vec(),
        satellite_ids: satellite_ids.to_vec(),
        values,
        global_window: *gw,
        alpha_s,
    })
}

/// Gram matrix J = HHᵀ, accumulated in integers and widened to floats.
pub fn gram(h: &SpectrumMatrix) -> DMat {
    let stations = h.station_ids.len();
    let mut j = DMat::zeros(stations, stations);
    for a in 0..stations {
        for b in a..stations {
            let sum: u128 = (0..h.satellite_ids.len())
                .map(|x| u128::from(h.value(a, x)) * u128::from(h.value(b, x)))
                .sum();
            let value = sum as f64;
            j[(a, b)] = value;
            j[(b, a)] = value;
        }
    }
    j
}

/// Relative bound on `‖JQ − QΛ‖_F` accepted from the eigen stage.
const GRAM_EIGEN_RESIDUAL: f64 = 1e-8;

/// Symmetric eigen decomposition of a Gram matrix, with the residual
/// verified against the decomposition it claims to be.
pub fn gram_eigen(j: &DMat) -> Result<SymmetricEigen> {
    let eigen = jacobi_eigen_sym(j)?;
    let n = j.rows();
    let mut residual = 0.0f64;
    for col in 0..n {
        let q = eigen.vectors.column(col);
        let lambda = eigen.eigenvalues[col];
        for i in 0..n {
            let mut jq = 0.0;
            for k in 0..n {
                jq += j[(i, k)] * q[k];
            }
            residual += (jq - lambda * q[i]).powi(2);
        }
    }
    let bound = GRAM_EIGEN_RESIDUAL * j.frobenius_norm().max(f64::MIN_POSITIVE);
    if residual.sqrt() > bound {
        return Err(Error::Convergence(format!(
            "Gram eigen residual {:.3e} exceeds bound {:.3e}",
            residual.sqrt(),
            bound
        )));
    }
    Ok(eigen)
}

/// Station ranking from the leading eigenvector of J.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StationRanking {
    pub dominant: usize,
    pub isolated: usize,
}

/// Ranks stations by leading-eigenvector magnitude.
///
/// Ties fall back to the Gram diagonal (total squared strength), then to
/// position: the dominant slot prefers the earlier station, the isolated
/// slot the later one.
pub fn rank_stations(eigen: &SymmetricEigen, j: &DMat) -> StationRanking {
    let n = j.rows();
    debug_assert!(n > 0);
    let score = |i: usize| eigen.vectors[(i, 0)].abs();
    let mut dominant = 0;
    let mut isolated = 0;
    for i in 1..n {
        if score(i) > score(dominant)
            || (score(i) == score(dominant) && j[(i, i)] > j[(dominant, dominant)])
        {
            dominant = i;
        }
        if score(i) < score(isolated)
            || (score(i) == score(isolated) && j[(i, i)] <= j[(isolated, isolated)])
        {
            isolated = i;
        }
    }
    StationRanking { dominant, isolated }
}

/// The full intra-constellation analysis product.
#[derive(Debug, Clone)]
pub struct IntraReport {
    pub spectrum: SpectrumMatrix,
    pub gram: DMat,
    pub eigenvalues: Vec<f64>,
    pub vectors: DMat,
    pub ranking: StationRanking,
    /// Memory footprint of the binary spectra in bits:
    /// stations x satellites x samples.
    pub memory_bits: u64,
}

impl IntraReport {
    pub fn dominant_station(&self) -> &str {
        &self.spectrum.station_ids[self.ranking.dominant]
    }

    pub fn isolated_station(&self) -> &str {
        &self.spectrum.station_ids[self.ranking.isolated]
    }

    pub fn leading_vector(&self) -> Vec<f64> {
        self.vectors.column(0)
    }
}

/// Runs the intra-constellation analysis: windows, global window, H, J,
/// eigen decomposition, ranking. A constellation with no visibility at
/// all yields an empty-network error.
pub fn run_intra(engine: &ScenarioEngine, constellation_id: &str) -> Result<IntraReport> {
    let index = engine.constellation_index(constellation_id)?;
    let spectra = engine.spectra(index, index)?;
    let gw = global_window(&spectra)?;
    let alpha_s = engine.scenario().alpha_s;
    let station_ids = engine.station_ids(index);
    let satellite_ids = engine.satellite_ids(index);
    let spectrum = spectrum_matrix(
        constellation_id,
        &station_ids,
        &satellite_ids,
        &spectra,
        &gw,
        alpha_s,
    )?;
    let gram_matrix = gram(&spectrum);
    let eigen = gram_eigen(&gram_matrix)?;
    let ranking = rank_stations(&eigen, &gram_matrix);
    let memory_bits =
        (station_ids.len() * satellite_ids.len() * sample_count(&gw, alpha_s)) as u64;
    Ok(IntraReport {
        spectrum,
        gram: gram_matrix,
        eigenvalues: eigen.eigenvalues,
        vectors: eigen.vectors,
        ranking,
        memory_bits,
    })
}
