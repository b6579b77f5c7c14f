use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use super::StatsError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub degeneracy: u32,
    #[serde(default)]
    pub name: Option<String>,
}

impl Level {
    pub fn new(energy: f64, degeneracy: u32) -> Self {
        Self {
            energy,
            degeneracy,
            name: None,
        }
    }
}

/// A spectrum of energy levels, each with a number of degenerate states.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSystem {
    levels: Vec<Level>,
}

impl LevelSystem {
    pub fn new(levels: Vec<Level>) -> Result<Self, StatsError> {
        if levels.is_empty() {
            return Err(StatsError::InvalidLevels("at least one level is required".into()));
        }
        for (i, level) in levels.iter().enumerate() {
            if !level.energy.is_finite() {
                return Err(StatsError::InvalidLevels(format!(
                    "level {i}: energy must be finite"
                )));
            }
            if level.degeneracy == 0 {
                return Err(StatsError::InvalidLevels(format!(
                    "level {i}: degeneracy must be at least 1"
                )));
            }
        }
        Ok(Self { levels })
    }

    /// Builds a system from parallel energy and degeneracy slices.
    pub fn from_pairs(energies: &[f64], degeneracies: &[u32]) -> Result<Self, StatsError> {
        if energies.len() != degeneracies.len() {
            return Err(StatsError::InvalidLevels(format!(
                "{} energies but {} degeneracies",
                energies.len(),
                degeneracies.len()
            )));
        }
        Self::new(
            energies
                .iter()
                .zip(degeneracies)
                .map(|(&e, &g)| Level::new(e, g))
                .collect(),
        )
    }

    /// Reads the `energy,degeneracy` table format. An optional `name`
    /// column is accepted.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, StatsError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| StatsError::LevelFile(e.to_string()))?
            .clone();
        for required in ["energy", "degeneracy"] {
            if !headers.iter().any(|h| h == required) {
                return Err(StatsError::LevelFile(format!(
                    "missing `{required}` column in header"
                )));
            }
        }
        let levels = rdr
            .deserialize()
            .collect::<Result<Vec<Level>, _>>()
            .map_err(|e| StatsError::LevelFile(e.to_string()))?;
        Self::new(levels)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, StatsError> {
        let path = path.as_ref();
        let file = File::open(path)
            .map_err(|e| StatsError::LevelFile(format!("{}: {e}", path.display())))?;
        Self::from_reader(file)
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Sum of degeneracies.
    pub fn total_states(&self) -> f64 {
        self.levels.iter().map(|l| l.degeneracy as f64).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_table() {
        let text = "energy,degeneracy\n0,1\n1.5, 2\n-2e-1,3\n";
        let sys = LevelSystem::from_reader(text.as_bytes()).unwrap();
        assert_eq!(sys.len(), 3);
        assert_eq!(sys.levels()[1], Level::new(1.5, 2));
        assert_eq!(sys.levels()[2].energy, -0.2);
        assert_eq!(sys.total_states(), 6.0);
    }

    #[test]
    fn optional_name_column() {
        let text = "energy,degeneracy,name\n0,1,ground\n1,2,excited\n";
        let sys = LevelSystem::from_reader(text.as_bytes()).unwrap();
        assert_eq!(sys.levels()[0].name.as_deref(), Some("ground"));
    }

    #[test]
    fn rejects_bad_tables() {
        let bad = [
            "energy,degeneracy\n",
            "energy,degeneracy\n0,0\n",
            "energy,degeneracy\n0,-1\n",
            "energy,degeneracy\nzero,1\n",
            "energy,degeneracy\n0,1.5\n",
            "energy,degeneracy\ninf,1\n",
            "e,g\n0,1\n",
            "degeneracy\n1\n",
        ];
        for text in bad {
            assert!(LevelSystem::from_reader(text.as_bytes()).is_err(), "{text:?}");
        }
    }

    #[test]
    fn missing_file_is_an_error() {
        let err = LevelSystem::from_path("/nonexistent/levels.csv").unwrap_err();
        assert!(matches!(err, StatsError::LevelFile(_)));
    }
}
