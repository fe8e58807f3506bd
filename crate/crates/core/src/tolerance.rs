use serde::Serialize;

use crate::domain::{TypeGrid, TypeSpace};
use crate::error::{Error, Result};

/// Numeric tolerances shared by every checker.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Absolute tolerance for comparing utilities and cycle weights.
    pub numeric: f64,
    /// Scores within this distance of the maximum count as tied.
    pub tie: f64,
    /// Largest rung of the choice-set boost ladder.
    pub boost: f64,
    /// Residual allowed in linear-program fits.
    pub fit: f64,
}

pub const DEFAULT_NUMERIC: f64 = 1e-9;
pub const DEFAULT_TIE: f64 = 1e-9;
pub const DEFAULT_FIT: f64 = 1e-6;
/// Boost magnitude relative to the narrowest finite box width.
pub const BOOST_FRACTION: f64 = 1e-4;

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            numeric: DEFAULT_NUMERIC,
            tie: DEFAULT_TIE,
            boost: BOOST_FRACTION,
            fit: DEFAULT_FIT,
        }
    }
}

impl Tolerances {
    /// Defaults with the boost scaled to the narrowest finite interval of `space`.
    pub fn for_space(space: &TypeSpace) -> Self {
        let boost = space
            .min_finite_width()
            .map(|w| BOOST_FRACTION * w)
            .unwrap_or(BOOST_FRACTION);
        Tolerances {
            boost,
            ..Tolerances::default()
        }
    }

    pub fn for_grid(grid: &TypeGrid) -> Self {
        Self::for_space(grid.space())
    }

    /// Boost ladder `{ε, ε/10, ε/100}`; membership requires unanimity.
    pub fn ladder(&self) -> [f64; 3] {
        [self.boost, self.boost / 10.0, self.boost / 100.0]
    }

    pub fn validate(&self, grid: Option<&TypeGrid>) -> Result<()> {
        for (name, v) in [
            ("numeric", self.numeric),
            ("tie", self.tie),
            ("boost", self.boost),
            ("fit", self.fit),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(alloc::format!(
                    "tolerance {name} must be finite and positive, got {v}"
                )));
            }
        }
        if let Some(grid) = grid {
            for i in 0..grid.agents() {
                if self.boost >= grid.step(i) / 2.0 {
                    return Err(Error::invalid(alloc::format!(
                        "boost {} must stay below half the grid step {} of agent {i}",
                        self.boost,
                        grid.step(i)
                    )));
                }
            }
        }
        Ok(())
    }
}
