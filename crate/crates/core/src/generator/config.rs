//! Generator configuration. Files are `key = value` lines (TOML syntax);
//! unspecified keys keep the calibrated defaults of the `ctar-default` preset.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GenError;
use crate::catalog::SynthCatalogConfig;

/// Every knob of the structural equations plus entity counts and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub n_users: usize,
    pub n_movies: usize,
    pub tags_per_movie: usize,
    pub tags_per_user_min: usize,
    pub tags_per_user_max: usize,

    /// Offset subtracted from the liked-tag effect in the rating equation.
    pub mu: f64,
    /// Quality noise standard deviation.
    pub sigma1: f64,
    /// Rating noise standard deviation.
    pub sigma2: f64,
    pub rating_clip: bool,

    /// Mean missing rate of ratings and the sigmoid bias/temperature of the
    /// popularity-driven exposure model.
    pub rating_pm: f64,
    pub rating_b: f64,
    pub rating_temp: f64,

    /// Same for the observational tag pairs, plus the weight of the rating.
    pub obs_pm: f64,
    pub obs_b: f64,
    pub obs_temp: f64,
    pub alpha: f64,
    /// Probability that each liked tag beyond the first is labelled.
    pub obs_keep_prob: f64,

    pub n_rct_pairs: usize,
    /// User-movie pairs, with and without an observed rating, whose tags form
    /// test splits II and III.
    pub n_test_pairs_rated: usize,
    pub n_test_pairs_unrated: usize,

    pub seed: u64,

    /// Seed catalog CSV. When absent a catalog is synthesized from the
    /// `catalog_*` entries below.
    pub catalog_path: Option<String>,
    pub catalog_movies: usize,
    pub catalog_tags: usize,
    pub catalog_seed: u64,
    pub catalog_tag_exponent: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_users: 1000,
            n_movies: 1000,
            tags_per_movie: 8,
            tags_per_user_min: 20,
            tags_per_user_max: 80,
            mu: 1.0,
            sigma1: 0.3,
            sigma2: 0.5,
            rating_clip: true,
            rating_pm: 0.98,
            rating_b: -1.0,
            rating_temp: 250.0,
            obs_pm: 0.9917,
            obs_b: 0.0,
            obs_temp: 250.0,
            alpha: -100.0,
            obs_keep_prob: 0.3,
            n_rct_pairs: 1250,
            n_test_pairs_rated: 600,
            n_test_pairs_unrated: 500,
            seed: 2022,
            catalog_path: None,
            catalog_movies: 9715,
            catalog_tags: 10_273,
            catalog_seed: 2022,
            catalog_tag_exponent: 0.8,
        }
    }
}

pub const PRESETS: &[&str] = &["ctar-default", "tiny"];

impl GenConfig {
    pub fn preset(name: &str) -> Result<GenConfig, GenError> {
        match name {
            "ctar-default" => Ok(GenConfig::default()),
            // Small world for smoke tests and examples.
            "tiny" => Ok(GenConfig {
                n_users: 60,
                n_movies: 50,
                tags_per_user_min: 5,
                tags_per_user_max: 20,
                rating_pm: 0.8,
                obs_pm: 0.85,
                n_rct_pairs: 80,
                n_test_pairs_rated: 40,
                n_test_pairs_unrated: 40,
                catalog_movies: 300,
                catalog_tags: 400,
                ..GenConfig::default()
            }),
            other => Err(GenError::Config(format!(
                "unknown preset `{other}` (known: {})",
                PRESETS.join(", ")
            ))),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<GenConfig, GenError> {
        let cfg: GenConfig = toml::from_str(text).map_err(|e| GenError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<GenConfig, GenError> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Applies `key=value` overrides using the same syntax as the file.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<GenConfig, GenError> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut table: toml::Table = toml::from_str(&self.to_toml_string()).expect("config round-trips through toml");
        for kv in overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| GenError::Config(format!("override `{kv}` is not key=value")))?;
            let parsed: toml::Table = toml::from_str(&format!("{} = {}", k.trim(), v.trim()))
                .or_else(|_| toml::from_str(&format!("{} = \"{}\"", k.trim(), v.trim())))
                .map_err(|e| GenError::Config(format!("override `{kv}`: {e}")))?;
            table.extend(parsed);
        }
        let cfg: GenConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| GenError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::Config(m));
        for (name, p) in [
            ("rating_pm", self.rating_pm),
            ("obs_pm", self.obs_pm),
            ("obs_keep_prob", self.obs_keep_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        for (name, t) in [("rating_temp", self.rating_temp), ("obs_temp", self.obs_temp)] {
            if t.is_nan() || t <= 0.0 {
                return bad(format!("{name} = {t} must be > 0"));
            }
        }
        for (name, s) in [("sigma1", self.sigma1), ("sigma2", self.sigma2)] {
            if !(s.is_finite() && s >= 0.0) {
                return bad(format!("{name} = {s} must be finite and >= 0"));
            }
        }
        if self.tags_per_movie == 0 {
            return bad("tags_per_movie must be >= 1".into());
        }
        if self.tags_per_user_min > self.tags_per_user_max {
            return bad("tags_per_user_min exceeds tags_per_user_max".into());
        }
        let pairs = self.n_users.saturating_mul(self.n_movies);
        if self.n_rct_pairs > pairs {
            return bad(format!(
                "n_rct_pairs = {} exceeds {pairs} user-movie pairs",
                self.n_rct_pairs
            ));
        }
        Ok(())
    }

    pub fn synth_catalog_config(&self) -> SynthCatalogConfig {
        SynthCatalogConfig {
            tag_exponent: self.catalog_tag_exponent,
            ..SynthCatalogConfig::new(self.catalog_movies, self.catalog_tags, self.catalog_seed)
        }
    }

    pub fn n_pairs(&self) -> usize {
        self.n_users * self.n_movies
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = GenConfig::default();
        assert_eq!(GenConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = GenConfig::from_toml_str("# small\nn_users = 5\nseed = 9\n").unwrap();
        assert_eq!(cfg.n_users, 5);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.n_movies, GenConfig::default().n_movies);
    }

    #[test]
    fn rejects_bad_values_and_unknown_keys() {
        assert!(GenConfig::from_toml_str("rating_pm = 1.5").is_err());
        assert!(GenConfig::from_toml_str("obs_temp = 0.0").is_err());
        assert!(GenConfig::from_toml_str("tags_per_movie = 0").is_err());
        assert!(GenConfig::from_toml_str("nonsense = 1").is_err());
    }

    #[test]
    fn overrides_apply() {
        let cfg = GenConfig::default()
            .with_overrides(&["alpha=-3.5".into(), "catalog_path=/tmp/x.csv".into()])
            .unwrap();
        assert_eq!(cfg.alpha, -3.5);
        assert_eq!(cfg.catalog_path.as_deref(), Some("/tmp/x.csv"));
        assert!(GenConfig::default().with_overrides(&["alpha".into()]).is_err());
    }

    #[test]
    fn infinite_temperature_is_allowed() {
        let cfg = GenConfig::from_toml_str("rating_temp = inf").unwrap();
        assert!(cfg.rating_temp.is_infinite());
    }
}
