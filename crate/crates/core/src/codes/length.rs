use std::f64::consts::LN_2;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An assignment `k -> n_k` of integer codeword lengths to indices `k >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum LengthFunction {
    /// `n_k = ceil((1 + eps) log k + 1 + log(1 + 1/eps))`.
    PowerLaw { epsilon: f64 },
    /// `n_k = ceil(log k + (1 + eps) log log (k + 1) + 1 + log(ln 2 / eps + 3/2))`.
    Universal { epsilon: f64 },
    /// `n_k = floor(log (k + 1))`, the optimal one-to-one (non-prefix) code.
    OneToOne,
    /// Explicit table, `lengths[k - 1] = n_k`.
    Custom { lengths: Vec<u32> },
}

impl LengthFunction {
    pub fn power_law(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(LengthFunction::PowerLaw { epsilon })
    }

    pub fn universal(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(LengthFunction::Universal { epsilon })
    }

    pub fn custom(lengths: Vec<u32>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidParameter("empty length table".into()));
        }
        Ok(LengthFunction::Custom { lengths })
    }

    /// Reads a `k,n_k` table (optional header, rows in order from `k = 1`).
    pub fn custom_from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut lengths = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let Some((k, n)) = line.split_once(',') else {
                return Err(Error::Parse(format!("bad row {line:?}")));
            };
            let (Ok(k), Ok(n)) = (k.trim().parse::<usize>(), n.trim().parse::<u32>()) else {
                if lengths.is_empty() {
                    continue; // header
                }
                return Err(Error::Parse(format!("bad row {line:?}")));
            };
            if k != lengths.len() + 1 {
                return Err(Error::Parse(format!("rows out of order at k = {k}")));
            }
            lengths.push(n);
        }
        Self::custom(lengths)
    }

    /// Codeword length of index `k >= 1`.
    pub fn length(&self, k: u64) -> Result<u32> {
        if k == 0 {
            return Err(Error::Domain("indices start at 1".into()));
        }
        let kf = k as f64;
        let n = match self {
            LengthFunction::PowerLaw { epsilon } => {
                ((1.0 + epsilon) * kf.log2() + 1.0 + (1.0 + 1.0 / epsilon).log2()).ceil()
            }
            LengthFunction::Universal { epsilon } => {
                (kf.log2() + (1.0 + epsilon) * (kf + 1.0).log2().log2() + 1.0 + (LN_2 / epsilon + 1.5).log2()).ceil()
            }
            LengthFunction::OneToOne => return Ok(floor_log2_succ(k)),
            LengthFunction::Custom { lengths } => {
                return usize::try_from(k - 1)
                    .ok()
                    .and_then(|i| lengths.get(i))
                    .copied()
                    .ok_or(Error::OutOfRange {
                        index: k,
                        len: lengths.len(),
                    })
            }
        };
        Ok(n as u32)
    }

    /// `(sum_{k <= n_terms} 2^{-n_k}, bound on sum_{k > n_terms} 2^{-n_k})`.
    ///
    /// The tail bounds compare the sum with an integral: for the power-law code
    /// `2^{-n_k} <= k^{-(1+eps)} / (2 (1 + 1/eps))`, and for the universal code
    /// `2^{-n_k} <= 1 / (2c k (log k)^{1+eps})` with `c = ln 2 / eps + 3/2`.
    /// One-to-one codes have an infinite tail.
    pub fn kraft_sum(&self, n_terms: u64) -> (f64, f64) {
        let n = match self {
            LengthFunction::Custom { lengths } => n_terms.min(lengths.len() as u64),
            _ => n_terms,
        };
        let partial: f64 = (1..=n)
            .map(|k| self.length(k).map_or(0.0, |l| (-(l as f64)).exp2()))
            .sum();
        let nf = n_terms as f64;
        let tail = match self {
            LengthFunction::PowerLaw { epsilon } => nf.powf(-epsilon) / (epsilon * 2.0 * (1.0 + 1.0 / epsilon)),
            LengthFunction::Universal { epsilon } => {
                let c = LN_2 / epsilon + 1.5;
                if n_terms < 2 {
                    f64::INFINITY
                } else {
                    LN_2 / (epsilon * nf.log2().powf(*epsilon)) / (2.0 * c)
                }
            }
            LengthFunction::OneToOne => f64::INFINITY,
            LengthFunction::Custom { lengths } => lengths.iter().skip(n as usize).map(|&l| (-(l as f64)).exp2()).sum(),
        };
        (partial, tail)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::EpsilonOutOfRange {
            epsilon,
            max: f64::INFINITY,
        });
    }
    Ok(())
}

/// `floor(log2(k + 1))` without rounding error.
fn floor_log2_succ(k: u64) -> u32 {
    let m = u128::from(k) + 1;
    127 - m.leading_zeros()
}

impl FromStr for LengthFunction {
    type Err = Error;

    /// Parses `powerlaw:eps`, `universal:eps`, `onetoone` or `custom:@file.csv`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let eps = || {
            arg.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad epsilon in {s:?}")))
        };
        match kind.trim().to_ascii_lowercase().as_str() {
            "powerlaw" => Self::power_law(eps()?),
            "universal" => Self::universal(eps()?),
            "onetoone" if arg.is_empty() => Ok(LengthFunction::OneToOne),
            "custom" => {
                let path = arg
                    .strip_prefix('@')
                    .ok_or_else(|| Error::Parse(format!("expected custom:@file.csv, got {s:?}")))?;
                Self::custom_from_csv(Path::new(path))
            }
            _ => Err(Error::Parse(format!("unknown length function {s:?}"))),
        }
    }
}

impl fmt::Display for LengthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthFunction::PowerLaw { epsilon } => write!(f, "powerlaw:{epsilon}"),
            LengthFunction::Universal { epsilon } => write!(f, "universal:{epsilon}"),
            LengthFunction::OneToOne => write!(f, "onetoone"),
            LengthFunction::Custom { lengths } => write!(f, "custom[{}]", lengths.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        assert_eq!(LengthFunction::OneToOne.length(1).unwrap(), 1);
        assert_eq!(LengthFunction::OneToOne.length(2).unwrap(), 1);
        assert_eq!(LengthFunction::OneToOne.length(3).unwrap(), 2);
        assert_eq!(LengthFunction::OneToOne.length(u64::MAX).unwrap(), 64);
        assert_eq!(LengthFunction::power_law(1.0).unwrap().length(1).unwrap(), 2);
        assert_eq!(LengthFunction::universal(1.0).unwrap().length(1).unwrap(), 3);
    }

    #[test]
    fn custom_table_bounds() {
        let lf = LengthFunction::custom(vec![1, 2, 2]).unwrap();
        assert_eq!(lf.length(3).unwrap(), 2);
        assert!(matches!(lf.length(4), Err(Error::OutOfRange { index: 4, len: 3 })));
        assert!(lf.length(0).is_err());
        assert_eq!(lf.kraft_sum(10), (1.0, 0.0));
    }

    #[test]
    fn kraft_for_prefix_codes() {
        for eps in [0.1, 0.5, 1.0, 2.0] {
            for lf in [
                LengthFunction::power_law(eps).unwrap(),
                LengthFunction::universal(eps).unwrap(),
            ] {
                let (partial, tail) = lf.kraft_sum(100_000);
                assert!(partial + tail <= 1.0, "{lf}: {partial} + {tail}");
            }
        }
        let (partial, tail) = LengthFunction::OneToOne.kraft_sum(100_000);
        assert!(partial > 1.0 && tail.is_infinite());
    }

    #[test]
    fn parsing() {
        assert_eq!(
            "powerlaw:0.5".parse::<LengthFunction>().unwrap(),
            LengthFunction::PowerLaw { epsilon: 0.5 }
        );
        assert_eq!(
            "universal:1".parse::<LengthFunction>().unwrap(),
            LengthFunction::Universal { epsilon: 1.0 }
        );
        assert_eq!("onetoone".parse::<LengthFunction>().unwrap(), LengthFunction::OneToOne);
        assert!("powerlaw:-1".parse::<LengthFunction>().is_err());
        assert!("custom:file.csv".parse::<LengthFunction>().is_err());
        assert!("huffman".parse::<LengthFunction>().is_err());
    }

    #[test]
    fn custom_csv_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lengths.csv");
        std::fs::write(&path, "k,n_k\n1,1\n2,2\n3,3\n").unwrap();
        let lf: LengthFunction = format!("custom:@{}", path.display()).parse().unwrap();
        assert_eq!(lf, LengthFunction::Custom { lengths: vec![1, 2, 3] });
    }
}
