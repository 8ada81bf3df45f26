//! Finite universes bounding every `Any`- and `Σ`-quantifier.

use std::rc::Rc;

use crate::any::Any;
use crate::res::Ra;

/// A finite universe: the value domain for `Any`-quantifiers, the resource
/// algebra whose carrier bounds `Σ`-quantifiers, and the fuel bounding tree
/// and call depth.
#[derive(Debug, Clone)]
pub struct Universe(Rc<UniverseInner>);

#[derive(Debug)]
struct UniverseInner {
    values: Vec<Any>,
    obs_results: Vec<Any>,
    ra: Ra,
    fuel: u32,
}

impl Universe {
    pub fn new(mut values: Vec<Any>, ra: Ra, fuel: u32) -> Universe {
        assert!(fuel >= 1, "fuel must be at least 1");
        values.sort();
        values.dedup();
        assert!(!values.is_empty(), "universe must be non-empty");
        let obs_results = values.clone();
        Universe(Rc::new(UniverseInner { values, obs_results, ra, fuel }))
    }

    /// Restricts the environment-chosen results of observable events to a
    /// declared subset (print-like events whose results are never read use
    /// a single unit result).
    pub fn with_obs_results(&self, mut obs_results: Vec<Any>) -> Universe {
        obs_results.sort();
        obs_results.dedup();
        assert!(!obs_results.is_empty());
        Universe(Rc::new(UniverseInner {
            values: self.0.values.clone(),
            obs_results,
            ra: self.0.ra.clone(),
            fuel: self.0.fuel,
        }))
    }

    pub fn values(&self) -> &[Any] {
        &self.0.values
    }

    pub fn obs_results(&self) -> &[Any] {
        &self.0.obs_results
    }

    pub fn ra(&self) -> &Ra {
        &self.0.ra
    }

    pub fn fuel(&self) -> u32 {
        self.0.fuel
    }

    pub fn contains(&self, v: &Any) -> bool {
        self.0.values.binary_search(v).is_ok()
    }

    /// Same universe with extra values; used by the universe-growth checks.
    pub fn enlarged(&self, extra: Vec<Any>) -> Universe {
        let mut values = self.0.values.clone();
        values.extend(extra);
        Universe::new(values, self.0.ra.clone(), self.0.fuel)
            .with_obs_results(self.0.obs_results.clone())
    }

    pub fn with_fuel(&self, fuel: u32) -> Universe {
        Universe::new(self.0.values.clone(), self.0.ra.clone(), fuel)
            .with_obs_results(self.0.obs_results.clone())
    }
}
