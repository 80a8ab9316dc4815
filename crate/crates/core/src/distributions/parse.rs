use std::str::FromStr;

use super::scalar::ScalarDistribution;
use crate::error::{Error, Result};

fn numbers(body: &str, spec: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {s:?} in {spec:?}")))
        })
        .collect()
}

impl FromStr for ScalarDistribution {
    type Err = Error;

    /// Parses `normal:mu,sigma`, `laplace:theta,lambda` or `finite:p1,p2,...`.
    fn from_str(spec: &str) -> Result<Self> {
        let (kind, body) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected kind:params, got {spec:?}")))?;
        let args = numbers(body, spec)?;
        let parsed = match (kind.trim().to_ascii_lowercase().as_str(), args.as_slice()) {
            ("normal" | "gaussian", &[mu, sigma]) => ScalarDistribution::gaussian(mu, sigma),
            ("laplace", &[theta, lambda]) => ScalarDistribution::laplace(theta, lambda),
            ("finite", probs) if !probs.is_empty() => ScalarDistribution::finite(probs.to_vec()),
            _ => return Err(Error::Parse(format!("unrecognized distribution {spec:?}"))),
        };
        parsed.map_err(|e| Error::Parse(format!("{spec:?}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        assert_eq!(
            "normal:0,1".parse::<ScalarDistribution>().unwrap(),
            ScalarDistribution::Gaussian { mu: 0.0, sigma: 1.0 }
        );
        assert_eq!(
            "laplace:5, 2".parse::<ScalarDistribution>().unwrap(),
            ScalarDistribution::Laplace {
                theta: 5.0,
                lambda: 2.0
            }
        );
        assert_eq!(
            "finite:0.25,0.75".parse::<ScalarDistribution>().unwrap(),
            ScalarDistribution::Finite {
                probs: vec![0.25, 0.75]
            }
        );
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "normal:0",
            "normal:0,-1",
            "cauchy:0,1",
            "finite:0.5,0.6",
            "normal",
            "laplace:a,b",
        ] {
            assert!(
                matches!(bad.parse::<ScalarDistribution>(), Err(Error::Parse(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["normal:0.5,2", "laplace:-1,0.25", "finite:0.5,0.5"] {
            let d: ScalarDistribution = s.parse().unwrap();
            assert_eq!(d.to_string().parse::<ScalarDistribution>().unwrap(), d);
        }
    }
}
