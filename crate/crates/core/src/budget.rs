use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u128 = 2_000_000_000;

/// Work counter shared by the exhaustive enumerations.
#[derive(Debug, Clone)]
pub struct Budget {
    cap: u128,
    used: u128,
    what: &'static str,
}

impl Budget {
    pub fn new(cap: u128, what: &'static str) -> Self {
        Budget { cap, used: 0, what }
    }

    pub fn unlimited(what: &'static str) -> Self {
        Budget::new(u128::MAX, what)
    }

    pub fn cap(&self) -> u128 {
        self.cap
    }

    pub fn used(&self) -> u128 {
        self.used
    }

    pub fn spend(&mut self, units: u128) -> Result<()> {
        self.used = self.used.saturating_add(units);
        if self.used > self.cap {
            return Err(Error::BudgetExceeded {
                what: self.what.to_string(),
                needed: self.used,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Fails up front when an estimated amount of work is over the cap.
    pub fn require(&self, estimate: u128) -> Result<()> {
        if estimate > self.cap {
            return Err(Error::BudgetExceeded {
                what: self.what.to_string(),
                needed: estimate,
                cap: self.cap,
            });
        }
        Ok(())
    }
}

/// Reads `FPTMIX_BUDGET`, falling back to [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> u128 {
    std::env::var("FPTMIX_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}
