//! `key = value` configuration files.

use std::path::Path;

use mdd_core::codec::FrameMetric;
use mdd_core::metrics::SsimParams;
use mdd_core::rdcore::QpRange;
use mdd_core::{CodecConfig, Error, MddConfig, Result};

/// Everything a run can be configured with, before command-line overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub mdd: MddConfig,
    pub codec: CodecConfig,
    pub metric: FrameMetric,
    pub gop: usize,
    pub qp: u8,
    pub intra_weight: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            mdd: MddConfig::default(),
            codec: CodecConfig::default(),
            metric: FrameMetric::default(),
            gop: 15,
            qp: 30,
            intra_weight: 4,
        }
    }
}

pub fn parse_metric(v: &str) -> Result<FrameMetric> {
    match v {
        "ssim" => Ok(FrameMetric::Ssim(SsimParams::default())),
        "ssim-gaussian" => Ok(FrameMetric::Ssim(SsimParams::gaussian())),
        "mse" => Ok(FrameMetric::Mse),
        _ => Err(Error::InvalidConfig(format!("unknown metric '{v}'"))),
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value '{v}' for {key}")))
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if self.mdd.set(key, value)? {
            return Ok(());
        }
        match key {
            "gop" => self.gop = num(key, value)?,
            "qp" => self.qp = num(key, value)?,
            "intra_weight" => self.intra_weight = num(key, value)?,
            "metric" => self.metric = parse_metric(value)?,
            "deadzone" => self.codec.deadzone = num(key, value)?,
            "search_range" => self.codec.search_range = num(key, value)?,
            "initial_qp" => self.codec.initial_qp = num(key, value)?,
            "qp_min" => {
                self.codec.qp_range = QpRange::new(num(key, value)?, self.codec.qp_range.max)?
            }
            "qp_max" => {
                self.codec.qp_range = QpRange::new(self.codec.qp_range.min, num(key, value)?)?
            }
            _ => return Err(Error::InvalidConfig(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line; blank lines and `#` comments are skipped.
    pub fn apply(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", n + 1))
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut s = Settings::default();
        s.apply(&std::fs::read_to_string(path)?)?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn applies_known_keys() {
        let mut s = Settings::default();
        s.apply("# comment\ntheta = 2\n\ngop=5 # trailing\nmetric = mse\nqp_max = 45\nL = 3\n")
            .unwrap();
        assert_eq!(
            (s.mdd.theta, s.gop, s.metric, s.codec.qp_range.max, s.mdd.l),
            (2, 5, FrameMetric::Mse, 45, Some(3))
        );
    }

    #[test]
    fn rejects_bad_lines() {
        let mut s = Settings::default();
        assert!(s.apply("nonsense").is_err());
        assert!(s.apply("colour = red").is_err());
        assert!(s.apply("qp = lots").is_err());
        assert!(s.apply("qp_min = 60").is_err());
    }
}
