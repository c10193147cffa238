//! Desk-scale limits shared by every constructor.
//!
//! Each construction estimates the number of cells it is about to create and
//! refuses to start when that exceeds its limit. Setting `DECOMP_LAB_MAX_CELLS`
//! replaces every default limit with the given value.

use thiserror::Error;

/// Environment variable overriding every scale limit.
pub const MAX_CELLS_ENV: &str = "DECOMP_LAB_MAX_CELLS";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("scale guard for {what}: size {size} exceeds limit {limit} (set {env} to override)", env = MAX_CELLS_ENV)]
pub struct GuardError {
    pub what: &'static str,
    pub size: u128,
    pub limit: u128,
}

fn override_limit() -> Option<u128> {
    std::env::var(MAX_CELLS_ENV).ok()?.trim().parse().ok()
}

/// Fails when `size` exceeds `default_limit` (or the environment override).
pub fn check(what: &'static str, size: u128, default_limit: u128) -> Result<(), GuardError> {
    let limit = override_limit().unwrap_or(default_limit);
    if size > limit {
        Err(GuardError { what, size, limit })
    } else {
        Ok(())
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub fn pow(base: u64, exp: u32) -> u128 {
    (base as u128).checked_pow(exp).unwrap_or(u128::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturating_pow() {
        assert_eq!(pow(2, 10), 1024);
        assert_eq!(pow(10, 60), u128::MAX);
    }

    #[test]
    fn within_and_over() {
        if std::env::var(MAX_CELLS_ENV).is_ok() {
            return;
        }
        assert!(check("x", 10, 10).is_ok());
        let err = check("x", 11, 10).unwrap_err();
        assert_eq!(err.limit, 10);
    }
}
