//! Time grids for Euler integration.
//!
//! Two clock conventions coexist: data-fraction time `t` (0 = pure noise,
//! 1 = clean data) and noise-level time `u = 1 - t`. A grid stores both
//! sequences explicitly and tags one as native, so convention conversion is
//! a tag flip and thus exactly involutive. Velocity fields always receive
//! data-fraction time; integrators and transfer loops read whichever array
//! matches their update rule.

use crate::error::{FlowError, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeConvention {
    DataFraction,
    NoiseLevel,
}

impl TimeConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeConvention::DataFraction => "data_fraction",
            TimeConvention::NoiseLevel => "noise_level",
        }
    }

    pub fn other(self) -> Self {
        match self {
            TimeConvention::DataFraction => TimeConvention::NoiseLevel,
            TimeConvention::NoiseLevel => TimeConvention::DataFraction,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridDirection {
    Ascending,
    Descending,
}

impl GridDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            GridDirection::Ascending => "ascending",
            GridDirection::Descending => "descending",
        }
    }

    pub fn other(self) -> Self {
        match self {
            GridDirection::Ascending => GridDirection::Descending,
            GridDirection::Descending => GridDirection::Ascending,
        }
    }
}

/// A finite strictly monotone time schedule over [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid<T> {
    /// Times in the native convention, in visit order.
    native: Vec<T>,
    /// Elementwise complement `1 - native`, same visit order.
    complement: Vec<T>,
    convention: TimeConvention,
    direction: GridDirection,
}

fn strictly_monotone<T: Scalar>(times: &[T]) -> Option<GridDirection> {
    if times.len() < 2 {
        return Some(GridDirection::Ascending);
    }
    if times.windows(2).all(|w| w[0] < w[1]) {
        Some(GridDirection::Ascending)
    } else if times.windows(2).all(|w| w[0] > w[1]) {
        Some(GridDirection::Descending)
    } else {
        None
    }
}

impl<T: Scalar> TimeGrid<T> {
    /// `n + 1` equally spaced times spanning [0, 1] in the requested
    /// convention and direction.
    pub fn uniform(n: usize, direction: GridDirection, convention: TimeConvention) -> Result<Self> {
        if n == 0 {
            return Err(FlowError::EmptyGrid);
        }
        let denom = T::from_usize(n).expect("grid size");
        let mut native: Vec<T> = (0..=n)
            .map(|i| T::from_usize(i).expect("grid index") / denom)
            .collect();
        if direction == GridDirection::Descending {
            native.reverse();
        }
        Self::from_times(native, convention)
    }

    /// Build a grid from explicit times in the stated convention.
    pub fn from_times(times: Vec<T>, convention: TimeConvention) -> Result<Self> {
        if times.len() < 2 {
            return Err(FlowError::EmptyGrid);
        }
        let zero = T::zero();
        let one = T::one();
        if times.iter().any(|&t| !(zero..=one).contains(&t) || !t.is_finite()) {
            return Err(FlowError::InvalidGrid);
        }
        let direction = strictly_monotone(&times).ok_or(FlowError::InvalidGrid)?;
        let complement: Vec<T> = times.iter().map(|&t| one - t).collect();
        // The complement must also stay strictly monotone, or a schedule
        // would silently collapse two steps after conversion.
        if strictly_monotone(&complement) != Some(direction.other()) {
            return Err(FlowError::InvalidGrid);
        }
        Ok(Self {
            native: times,
            complement,
            convention,
            direction,
        })
    }

    /// Number of integration steps (one less than the number of times).
    pub fn steps(&self) -> usize {
        self.native.len() - 1
    }

    pub fn len(&self) -> usize {
        self.native.len()
    }

    pub fn is_empty(&self) -> bool {
        self.native.is_empty()
    }

    pub fn convention(&self) -> TimeConvention {
        self.convention
    }

    pub fn direction(&self) -> GridDirection {
        self.direction
    }

    /// Times in the grid's native convention.
    pub fn times(&self) -> &[T] {
        &self.native
    }

    /// Times as data fractions (t = 0 pure noise, t = 1 clean data).
    pub fn data_fraction_times(&self) -> &[T] {
        match self.convention {
            TimeConvention::DataFraction => &self.native,
            TimeConvention::NoiseLevel => &self.complement,
        }
    }

    /// Times as noise levels (u = 1 - t).
    pub fn noise_level_times(&self) -> &[T] {
        match self.convention {
            TimeConvention::DataFraction => &self.complement,
            TimeConvention::NoiseLevel => &self.native,
        }
    }

    /// The same schedule expressed in the other convention. Converting twice
    /// returns the original grid bit-for-bit.
    pub fn converted(&self) -> Self {
        Self {
            native: self.complement.clone(),
            complement: self.native.clone(),
            convention: self.convention.other(),
            direction: self.direction.other(),
        }
    }

    /// Direction of the schedule when read in data-fraction time.
    pub fn data_fraction_direction(&self) -> GridDirection {
        match self.convention {
            TimeConvention::DataFraction => self.direction,
            TimeConvention::NoiseLevel => self.direction.other(),
        }
    }

    /// One-line description for trajectory metadata and manifests.
    pub fn describe(&self) -> String {
        format!(
            "{} steps, {} {}",
            self.steps(),
            self.direction.as_str(),
            self.convention.as_str()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_two_steps_ascending_data_fraction() {
        let g = TimeGrid::<f64>::uniform(2, GridDirection::Ascending, TimeConvention::DataFraction)
            .unwrap();
        assert_eq!(g.times(), &[0.0, 0.5, 1.0]);
        assert_eq!(g.steps(), 2);
    }

    #[test]
    fn uniform_fifty_steps_descending_noise_level() {
        let g = TimeGrid::<f64>::uniform(50, GridDirection::Descending, TimeConvention::NoiseLevel)
            .unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g.times()[0], 1.0);
        assert_eq!(g.times()[50], 0.0);
        assert_eq!(g.direction(), GridDirection::Descending);
        // Read as data fraction the same schedule ascends from 0 to 1.
        assert_eq!(g.data_fraction_times()[0], 0.0);
        assert_eq!(g.data_fraction_times()[50], 1.0);
        assert_eq!(g.data_fraction_direction(), GridDirection::Ascending);
    }

    #[test]
    fn zero_steps_rejected() {
        assert!(matches!(
            TimeGrid::<f64>::uniform(0, GridDirection::Ascending, TimeConvention::DataFraction),
            Err(FlowError::EmptyGrid)
        ));
    }

    #[test]
    fn conversion_is_involutive_bit_for_bit() {
        for n in [1usize, 3, 10, 50] {
            let g =
                TimeGrid::<f64>::uniform(n, GridDirection::Ascending, TimeConvention::DataFraction)
                    .unwrap();
            assert_eq!(g.converted().converted(), g);
            let h =
                TimeGrid::<f64>::uniform(n, GridDirection::Descending, TimeConvention::NoiseLevel)
                    .unwrap();
            assert_eq!(h.converted().converted(), h);
        }
    }

    #[test]
    fn non_monotone_times_rejected() {
        assert!(TimeGrid::from_times(vec![0.0, 0.5, 0.25], TimeConvention::DataFraction).is_err());
        assert!(TimeGrid::from_times(vec![0.0, 0.0, 1.0], TimeConvention::DataFraction).is_err());
        assert!(TimeGrid::from_times(vec![-0.1, 0.5], TimeConvention::DataFraction).is_err());
        assert!(TimeGrid::from_times(vec![0.0, 1.5], TimeConvention::DataFraction).is_err());
    }
}
