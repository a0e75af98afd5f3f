//! Resource caps and the numeric tolerances used by the verification suite.
//!
//! Everything here bounds exponential searches (subset enumeration, slice
//! recursions, functional-set generation) at desk scale. Caps are plain data:
//! construct [`Caps::default()`] and override fields, or pick up the
//! `TSLAB_MAX_SUPPORT` / `TSLAB_MAX_WINDOW` environment overrides with
//! [`Caps::from_env()`].

/// Numeric tolerances, fixed once for the whole crate.
pub mod tolerances {
    /// Default tolerance attached to any floating-point norm value.
    pub const COMPARISON_TOL: f64 = 1e-9;
    /// Slack for norm-axiom style inequalities on floating-point paths.
    pub const NORM_INEQ_SLACK: f64 = 1e-7;
    /// Additive slack for verification-suite inequalities that mix exact and
    /// floating-point quantities.
    pub const VERIFY_SLACK: f64 = 1e-6;
}

#[derive(Clone, Debug)]
pub struct Caps {
    /// Largest support size accepted by the Tsirelson norm recursions.
    pub max_support: usize,
    /// Largest window accepted by Schreier enumeration and the certifier.
    pub max_window: u32,
    /// Largest set size accepted by the membership routines.
    pub max_member_size: usize,
    /// Largest window accepted by `functional_set`.
    pub functional_window: u32,
    /// Largest support size accepted by the exact dual-norm LP.
    pub lp_support: usize,
    /// Random probe directions used by dual-norm brackets when no explicit
    /// effort is requested (e.g. inside `spaces::norm`).
    pub bracket_probes: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_support: 16,
            max_window: 24,
            max_member_size: 20,
            functional_window: 12,
            lp_support: 12,
            bracket_probes: 4,
        }
    }
}

impl Caps {
    /// Defaults, with `TSLAB_MAX_SUPPORT` and `TSLAB_MAX_WINDOW` applied when
    /// set to valid integers.
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        if let Some(v) = read_env_usize("TSLAB_MAX_SUPPORT") {
            caps.max_support = v;
        }
        if let Some(v) = read_env_usize("TSLAB_MAX_WINDOW") {
            caps.max_window = v as u32;
        }
        caps
    }

    pub fn check_window(&self, requested: u32) -> crate::error::Result<()> {
        if requested > self.max_window {
            return Err(crate::error::Error::WindowCap {
                requested,
                cap: self.max_window,
            });
        }
        Ok(())
    }

    pub fn check_support(&self, size: usize) -> crate::error::Result<()> {
        if size > self.max_support {
            return Err(crate::error::Error::SupportCap {
                size,
                cap: self.max_support,
            });
        }
        Ok(())
    }
}

fn read_env_usize(name: &str) -> Option<usize> {
    std::env::var(name).ok()?.trim().parse().ok()
}
