//! TOML run configuration.
//!
//! ```toml
//! [space]
//! kind = "rtree"              # euclidean | hyperbolic | rtree | l2box
//! vertices = 4
//! edges = [[0, 1, 3.0], [0, 2, 2.0], [0, 3, 4.0]]
//! # ray = 3                   # anchor vertex of an unbounded ray edge
//!
//! [domain]                    # optional, defaults to the whole space
//! kind = "whole"              # whole | ball | box | subtree
//!
//! [game]                      # optional; CLI flags override these
//! D = 1.0
//! N = 200
//! tol = 1e-9
//! seed = 7
//! lion = { tree = { vertex = 1 } }
//! man = { tree = { edge = { edge = 2, offset = 1.5 } } }
//! ```
//!
//! Other spaces: `kind = "euclidean"` with `dim`, `kind = "hyperbolic"`,
//! `kind = "l2box"` with `dim` and `base` (default 10). Points are written
//! `{ euclidean = [x, y] }`, `{ hyperbolic = [x, y] }`, `{ l2box = [...] }`
//! or as tree points above. A ball domain takes `center` and `radius`; a
//! subtree domain takes `edges = [i, j, ...]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameConfig;
use crate::space::{DomainSpec, Point, Space, SpaceSpec};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lion: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub man: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub space: SpaceSpec,
    #[serde(default)]
    pub domain: DomainSpec,
    #[serde(default)]
    pub game: GameSection,
}

/// A parsed and validated configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub file: ConfigFile,
    pub space: Space,
}

fn field_error(field: &str, e: Error) -> Error {
    let msg = match e {
        Error::InvalidInput(m) => m,
        other => other.to_string(),
    };
    Error::Parse(format!("field `{field}`: {msg}"))
}

impl Config {
    /// Parses and validates a configuration. Syntax errors carry the line and
    /// column; semantic errors name the offending field.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(s).map_err(|e| Error::Parse(e.to_string().trim_end().to_owned()))?;
        let space = Space::from_spec(&file.space).map_err(|e| field_error("space", e))?;
        space.validate_domain(&file.domain).map_err(|e| field_error("domain", e))?;
        for (name, p) in [("game.lion", &file.game.lion), ("game.man", &file.game.man)] {
            if let Some(p) = p {
                space.validate(p).map_err(|e| field_error(name, e))?;
                if !space.domain_contains(&file.domain, p)? {
                    return Err(field_error(name, Error::InvalidInput("point lies outside the domain".into())));
                }
            }
        }
        for (name, v) in [("game.D", file.game.d), ("game.tol", file.game.tol)] {
            if v.is_some_and(|v| !(v.is_finite() && v > 0.0)) {
                return Err(field_error(name, Error::InvalidInput("must be a positive number".into())));
            }
        }
        if file.game.max_steps == Some(0) {
            return Err(field_error("game.N", Error::InvalidInput("must be at least 1".into())));
        }
        Ok(Config { file, space })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.file).expect("configs serialize")
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.file.domain
    }

    /// Game configuration from the file, with `overrides` taking precedence
    /// field by field.
    pub fn game_config(&self, overrides: &GameSection) -> Result<GameConfig> {
        let g = &self.file.game;
        let missing = |f: &str| Error::Parse(format!("field `game.{f}` is required"));
        let cfg = GameConfig {
            space: self.file.space.clone(),
            domain: self.file.domain.clone(),
            d: overrides.d.or(g.d).ok_or_else(|| missing("D"))?,
            max_steps: overrides.max_steps.or(g.max_steps).ok_or_else(|| missing("N"))?,
            tol: overrides.tol.or(g.tol).unwrap_or(1e-9),
            lion_start: overrides.lion.clone().or_else(|| g.lion.clone()).ok_or_else(|| missing("lion"))?,
            man_start: overrides.man.clone().or_else(|| g.man.clone()).ok_or_else(|| missing("man"))?,
            seed: overrides.seed.or(g.seed),
        };
        cfg.validate(&self.space)?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIPOD: &str = r#"
[space]
kind = "rtree"
vertices = 4
edges = [[0, 1, 3.0], [0, 2, 2.0], [0, 3, 4.0]]

[game]
D = 1.0
N = 50
lion = { tree = { vertex = 1 } }
man = { tree = { edge = { edge = 2, offset = 1.5 } } }
"#;

    #[test]
    fn parses_tripod() {
        let c = Config::from_toml_str(TRIPOD).unwrap();
        assert_eq!(c.space.kind().name(), "rtree");
        assert_eq!(c.domain(), &DomainSpec::Whole);
        let g = c.game_config(&GameSection { max_steps: Some(7), ..Default::default() }).unwrap();
        assert_eq!(g.max_steps, 7);
        assert_eq!(g.d, 1.0);
        assert_eq!(g.man_start, Point::on_edge(2, 1.5));
        let back = Config::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back.file, c.file);
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let e = Config::from_toml_str("[space]\nkind = \"euclidean\"\ndim = \n").unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let e = Config::from_toml_str("[space]\nkind = \"rtree\"\nvertices = 2\nedges = [[0, 1, -1.0]]\n").unwrap_err();
        assert!(e.to_string().contains("field `space`"), "{e}");
        let e = Config::from_toml_str("[space]\nkind = \"euclidean\"\ndim = 2\n[game]\nlion = { hyperbolic = [0.0, 0.0] }\n")
            .unwrap_err();
        assert!(e.to_string().contains("game.lion"), "{e}");
        let e = Config::from_toml_str("[space]\nkind = \"hyperbolic\"\n[game]\nD = -1.0\n").unwrap_err();
        assert!(e.to_string().contains("game.D"), "{e}");
        let e = Config::from_toml_str("[space]\nkind = \"hyperbolic\"\n[gmae]\n").unwrap_err();
        assert!(e.to_string().contains("gmae"), "{e}");
    }

    #[test]
    fn missing_start_is_reported() {
        let c = Config::from_toml_str("[space]\nkind = \"euclidean\"\ndim = 1\n").unwrap();
        let e = c.game_config(&GameSection::default()).unwrap_err();
        assert!(e.to_string().contains("game.D"), "{e}");
    }
}
