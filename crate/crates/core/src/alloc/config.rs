use crate::error::{Error, Result};

/// Parameters of the simplified and quality-constrained descend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MddConfig {
    /// Initial QP offset above the estimated frame QP.
    pub theta: u8,
    /// Bits held back from the budget when deciding whether to keep iterating.
    pub alpha_bits: u64,
    /// Quality guard band added to the floor.
    pub beta_q: f64,
    /// QP step applied to each adjusted source.
    pub delta: u8,
    /// Sources adjusted per iteration; `None` means `max(1, N / 16)`.
    pub l: Option<usize>,
    pub max_iters: usize,
}

impl Default for MddConfig {
    fn default() -> Self {
        MddConfig {
            theta: 3,
            alpha_bits: 0,
            beta_q: 0.0005,
            delta: 2,
            l: None,
            max_iters: 1000,
        }
    }
}

impl MddConfig {
    /// The configuration under which the simplified descend retraces the exact one.
    pub fn degenerate() -> Self {
        MddConfig {
            theta: 1,
            alpha_bits: 0,
            delta: 1,
            l: Some(1),
            max_iters: usize::MAX,
            ..Self::default()
        }
    }

    pub fn batch_size(&self, n_sources: usize) -> usize {
        self.l.unwrap_or((n_sources / 16).max(1))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.theta < 1 {
            return bad("theta must be at least 1".into());
        }
        if self.delta < 1 {
            return bad("delta must be at least 1".into());
        }
        if self.l == Some(0) {
            return bad("L must be at least 1".into());
        }
        if !(self.beta_q > 0.0 && self.beta_q < 1.0) {
            return bad(format!("beta_q {} not in (0, 1)", self.beta_q));
        }
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1".into());
        }
        Ok(())
    }

    /// Applies one `key = value` setting. Returns `false` for keys this type
    /// does not own so callers can route them elsewhere.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad value '{v}' for {key}")))
        }
        match key {
            "theta" => self.theta = num(key, value)?,
            "alpha_bits" => self.alpha_bits = num(key, value)?,
            "beta_q" => self.beta_q = num(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "l" | "L" => {
                self.l = if value == "auto" {
                    None
                } else {
                    Some(num(key, value)?)
                }
            }
            "max_iters" => self.max_iters = num(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }
}
