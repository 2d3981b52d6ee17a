//! Configuration files, `--domain` specs and suite files.

use crate::ga::{GaConfig, InputDomain, Interval, TestCase};
use crate::{Error, Result};

/// Reads a [`GaConfig`] from either a JSON object or `key = value` lines.
/// Missing keys take their defaults; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<GaConfig> {
    parse_config_keys(text).map(|(config, _)| config)
}

/// Like [`parse_config`], also returning the keys the file set explicitly.
pub fn parse_config_keys(text: &str) -> Result<(GaConfig, Vec<String>)> {
    let value: serde_json::Value = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
    } else {
        let table: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        serde_json::to_value(table).map_err(|e| Error::Config(e.to_string()))?
    };
    let keys = value.as_object().map(|o| o.keys().cloned().collect()).unwrap_or_default();
    let config: GaConfig = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok((config, keys))
}

/// Parses `lo..hi[,lo..hi...]`. A single interval applies to every parameter.
pub fn parse_domain(spec: &str, arity: usize) -> Result<InputDomain> {
    let intervals = spec
        .split(',')
        .map(|part| {
            let part = part.trim();
            let (lo, hi) = part
                .split_once("..")
                .ok_or_else(|| Error::Config(format!("bad interval `{part}`, expected lo..hi")))?;
            let bound =
                |s: &str| s.trim().parse::<i64>().map_err(|_| Error::Config(format!("bad bound `{s}` in `{part}`")));
            Interval::new(bound(lo)?, bound(hi)?)
        })
        .collect::<Result<Vec<_>>>()?;
    match intervals.len() {
        1 => Ok(InputDomain::new(vec![intervals[0]; arity])),
        n if n == arity => Ok(InputDomain::new(intervals)),
        n => Err(Error::Config(format!("domain has {n} intervals but the program takes {arity} inputs"))),
    }
}

/// Reads a headerless CSV suite, one test per row. Row numbers in errors
/// are 1-based.
pub fn parse_suite(text: &str, arity: usize) -> Result<Vec<TestCase>> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut tests = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::SuiteFormat { row, message: e.to_string() })?;
        let genes = record
            .iter()
            .map(|cell| {
                cell.parse::<i64>()
                    .map_err(|_| Error::SuiteFormat { row, message: format!("`{cell}` is not an integer") })
            })
            .collect::<Result<Vec<i64>>>()?;
        if genes.len() != arity {
            return Err(Error::SuiteFormat { row, message: format!("expected {arity} values, found {}", genes.len()) });
        }
        tests.push(TestCase::new(genes));
    }
    Ok(tests)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_config() {
        let c = parse_config("seed = 9\npopulation_size = 30\n# comment\ndrop_threshold = 0.25\n").unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.population_size, 30);
        assert_eq!(c.drop_threshold, 0.25);
        assert_eq!(c.max_generations, 100);
    }

    #[test]
    fn json_config() {
        let c = parse_config(r#"{"seed": 4, "elitism_count": 2}"#).unwrap();
        assert_eq!((c.seed, c.elitism_count), (4, 2));
    }

    #[test]
    fn config_rejects_unknown_and_invalid() {
        assert!(parse_config("sed = 1").is_err());
        assert!(parse_config(r#"{"crossover_rate": 2.0}"#).is_err());
        assert!(parse_config("elitism_count = 20").is_err());
    }

    #[test]
    fn reports_explicit_keys() {
        let (_, keys) = parse_config_keys("seed = 1\nfuel = 50").unwrap();
        assert_eq!(keys, vec!["fuel", "seed"]);
    }

    #[test]
    fn empty_config_is_default() {
        assert_eq!(parse_config("").unwrap(), GaConfig::default());
    }

    #[test]
    fn domains() {
        let d = parse_domain("1..8", 2).unwrap();
        assert_eq!(d, InputDomain::uniform(2, 1, 8).unwrap());
        let d = parse_domain("-3..3, 0..1", 2).unwrap();
        assert_eq!(d.intervals()[0], Interval { lo: -3, hi: 3 });
        assert!(parse_domain("1..8,1..8,1..8", 2).is_err());
        assert!(parse_domain("8..1", 2).is_err());
        assert!(parse_domain("1-8", 2).is_err());
    }

    #[test]
    fn suites() {
        let s = parse_suite("2,3\n 1 , 5\n", 2).unwrap();
        assert_eq!(s, vec![TestCase::new(vec![2, 3]), TestCase::new(vec![1, 5])]);
        assert!(parse_suite("", 2).unwrap().is_empty());
        match parse_suite("1,2\n3\n", 2) {
            Err(Error::SuiteFormat { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
        match parse_suite("1,2\n4,5\nx,1\n", 2) {
            Err(Error::SuiteFormat { row, .. }) => assert_eq!(row, 3),
            other => panic!("{other:?}"),
        }
    }
}
