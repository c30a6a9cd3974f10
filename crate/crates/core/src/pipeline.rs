//! Scenario engine: prebuilt sites and propagators plus parallel
//! computation of temporal spectra for a station/satellite scope.
//!
//! The engine is built once per scenario run. Spectra jobs fan out over
//! rayon but collect in job order, so results are deterministic for any
//! thread count.

use rayon::prelude::*;

use crate::catalog::Scenario;
use crate::error::{Error, Result};
use crate::propagator::{Propagator, Site};
use crate::visibility::{access_windows, TemporalSpectrum, VisibilityConfig};

/// Prebuilt per-constellation sites and propagators, indexed in scenario
/// order.
pub struct ScenarioEngine<'a> {
    scenario: &'a Scenario,
    sites: Vec<Vec<Site>>,
    propagators: Vec<Vec<Propagator>>,
}

impl<'a> ScenarioEngine<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<ScenarioEngine<'a>> {
        let mut sites = Vec::with_capacity(scenario.constellations.len());
        let mut propagators = Vec::with_capacity(scenario.constellations.len());
        for constellation in &scenario.constellations {
            sites.push(constellation.stations.iter().map(Site::new).collect::<Vec<_>>());
            propagators.push(
                constellation
                    .satellites
                    .iter()
                    .map(Propagator::new)
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(ScenarioEngine {
            scenario,
            sites,
            propagators,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        self.scenario
    }

    /// Index of a constellation by id.
    pub fn constellation_index(&self, id: &str) -> Result<usize> {
        self.scenario
            .constellations
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| Error::CrossReference(format!("unknown constellation '{id}'")))
    }

    /// Station ids of a constellation, in scenario order.
    pub fn station_ids(&self, constellation: usize) -> Vec<String> {
        self.scenario.constellations[constellation]
            .stations
            .iter()
            .map(|s| s.id.clone())
            .collect()
    }

    /// Satellite ids of a constellation, in scenario order.
    pub fn satellite_ids(&self, constellation: usize) -> Vec<String> {
        self.scenario.constellations[constellation]
            .satellites
            .iter()
            .map(|s| s.id())
            .collect()
    }

    /// Temporal spectra for every station of `station_scope` against every
    /// satellite of `satellite_scope`, station-major, in scenario order.
    pub fn spectra(
        &self,
        station_scope: usize,
        satellite_scope: usize,
    ) -> Result<Vec<TemporalSpectrum>> {
        let sites = &self.sites[station_scope];
        let propagators = &self.propagators[satellite_scope];
        let station_constellation = &self.scenario.constellations[station_scope].id;
        let satellite_constellation = &self.scenario.constellations[satellite_scope].id;
        let config = VisibilityConfig {
            min_elevation_deg: self.scenario.min_elevation_deg,
            alpha_s: self.scenario.alpha_s,
            ..VisibilityConfig::default()
        };

        let jobs: Vec<(usize, usize)> = (0..sites.len())
            .flat_map(|g| (0..propagators.len()).map(move |x| (g, x)))
            .collect();
        jobs.into_par_iter()
            .map(|(g, x)| {
                let windows = access_windows(
                    &sites[g],
                    &propagators[x],
                    self.scenario.span_start,
                    self.scenario.span_end,
                    &config,
                )?;
                Ok(TemporalSpectrum {
                    station_id: sites[g].station_id.clone(),
                    satellite_id: propagators[x].satellite_id().to_string(),
                    station_constellation: station_constellation.clone(),
                    satellite_constellation: satellite_constellation.clone(),
                    windows,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{parse_tle, Constellation, GroundStation};
    use crate::time::UtcTime;

    const ISS_TLE: &str = "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927\n2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537\n";

    fn station(id: &str, constellation: &str, lat: f64, lon: f64) -> GroundStation {
        GroundStation {
            id: id.to_string(),
            latitude_deg: lat,
            longitude_deg: lon,
            altitude_m: 0.0,
            constellation: constellation.to_string(),
        }
    }

    fn two_constellation_scenario() -> Scenario {
        let satellite = parse_tle(ISS_TLE).unwrap().remove(0);
        let mut other = satellite.clone();
        other.catalog_number = 99999;
        other.name = None;
        let start = UtcTime::parse_iso("2008-09-20T12:25:40Z").unwrap();
        let end = start.plus_seconds(4.0 * 3600.0);
        Scenario::new(
            vec![
                Constellation {
                    id: "alpha".into(),
                    stations: vec![
                        station("a1", "alpha", -23.7, 133.88),
                        station("a2", "alpha", 35.0, -106.5),
                    ],
                    satellites: vec![satellite],
                },
                Constellation {
                    id: "beta".into(),
                    stations: vec![station("b1", "beta", 48.0, 11.0)],
                    satellites: vec![other],
                },
            ],
            start,
            end,
            1,
            5.0,
        )
        .unwrap()
    }

    #[test]
    fn spectra_are_station_major_and_scoped() {
        let scenario = two_constellation_scenario();
        let engine = ScenarioEngine::new(&scenario).unwrap();

        let own = engine.spectra(0, 0).unwrap();
        assert_eq!(own.len(), 2);
        assert_eq!(own[0].station_id, "a1");
        assert_eq!(own[1].station_id, "a2");
        assert!(own.iter().all(|s| s.satellite_id == "ISS (ZARYA)"
            || s.satellite_id == "25544"));
        assert!(own
            .iter()
            .all(|s| s.station_constellation == "alpha" && s.satellite_constellation == "alpha"));

        let cross = engine.spectra(1, 0).unwrap();
        assert_eq!(cross.len(), 1);
        assert_eq!(cross[0].station_id, "b1");
        assert_eq!(cross[0].station_constellation, "beta");
        assert_eq!(cross[0].satellite_constellation, "alpha");
    }

    #[test]
    fn spectra_match_direct_computation() {
        let scenario = two_constellation_scenario();
        let engine = ScenarioEngine::new(&scenario).unwrap();
        let spectra = engine.spectra(0, 0).unwrap();

        let site = Site::new(&scenario.constellations[0].stations[0]);
        let propagator = Propagator::new(&scenario.constellations[0].satellites[0]).unwrap();
        let config = VisibilityConfig {
            min_elevation_deg: scenario.min_elevation_deg,
            alpha_s: scenario.alpha_s,
            ..VisibilityConfig::default()
        };
        let windows = access_windows(
            &site,
            &propagator,
            scenario.span_start,
            scenario.span_end,
            &config,
        )
        .unwrap();
        assert_eq!(spectra[0].windows, windows);
    }

    #[test]
    fn unknown_constellation_is_a_cross_reference_error() {
        let scenario = two_constellation_scenario();
        let engine = ScenarioEngine::new(&scenario).unwrap();
        assert!(engine.constellation_index("alpha").is_ok());
        assert!(matches!(
            engine.constellation_index("gamma"),
            Err(Error::CrossReference(_))
        ));
    }
}
