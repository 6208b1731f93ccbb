pub mod scaling;
pub mod scan;
pub mod semiclassical;
pub mod spectrum;

use crate::error::{CliError, CliResult};

/// Parses a comma-separated list, naming `flag` in the error.
pub fn parse_list<T: std::str::FromStr>(raw: &str, flag: &str) -> CliResult<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::Usage(format!("{flag}: cannot parse '{s}'")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(
            parse_list::<usize>("800, 1000,1200", "--n-list").unwrap(),
            [800, 1000, 1200]
        );
        assert!(parse_list::<f64>("1.0,x", "--lambdas").is_err());
        assert!(parse_list::<f64>("", "--lambdas").unwrap().is_empty());
    }
}
