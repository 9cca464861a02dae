//! Closed-form oracle velocity fields.
//!
//! The perfect-coupling oracle returns `target(psi) - shared_noise` exactly,
//! realizing the well-trained-model assumption under which the transfer
//! identities hold analytically. The delta oracle is the conditional
//! expectation for a one-point data distribution, and the gaussian oracle the
//! one for an isotropic Gaussian target.

use super::{check_eval_inputs, VelocityField};
use crate::error::{FlowError, Result};
use crate::scalar::Scalar;
use crate::state::{Condition, StateVec};
use std::collections::BTreeMap;
use std::sync::Mutex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    PerfectCoupling,
    DeltaTarget,
    GaussianTarget,
}

impl OracleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleKind::PerfectCoupling => "perfect_coupling",
            OracleKind::DeltaTarget => "delta_target",
            OracleKind::GaussianTarget => "gaussian_target",
        }
    }
}

/// Default clamp for the delta oracle's terminal singularity.
pub const DEFAULT_SINGULARITY_CLAMP: f64 = 1e-3;

/// Closed-form oracle field with per-condition target data.
pub struct OracleField<T> {
    kind: OracleKind,
    targets: BTreeMap<u32, StateVec<T>>,
    /// Per-condition standard deviation, gaussian kind only (mean sits in
    /// `targets`).
    sigmas: BTreeMap<u32, T>,
    epsilon: T,
    shared_noise: Mutex<Option<StateVec<T>>>,
    dim: usize,
}

impl<T: Scalar> OracleField<T> {
    fn build(
        kind: OracleKind,
        targets: Vec<(u32, StateVec<T>)>,
        sigmas: BTreeMap<u32, T>,
        epsilon: T,
    ) -> Result<Self> {
        if targets.is_empty() {
            return Err(FlowError::InvalidConfig(
                "oracle needs at least one condition target".into(),
            ));
        }
        let dim = targets[0].1.dim();
        let mut map = BTreeMap::new();
        for (id, target) in targets {
            target.ensure_dim(dim, "oracle target")?;
            target.ensure_finite("oracle target")?;
            map.insert(id, target);
        }
        if epsilon <= T::zero() {
            return Err(FlowError::InvalidConfig(
                "singularity clamp must be positive".into(),
            ));
        }
        Ok(Self {
            kind,
            targets: map,
            sigmas,
            epsilon,
            shared_noise: Mutex::new(None),
            dim,
        })
    }

    /// `v(x, t, psi) = target(psi) - shared_noise`, the exactly rectified
    /// field for the coupled pair (shared_noise, target).
    pub fn perfect_coupling(targets: Vec<(u32, StateVec<T>)>) -> Result<Self> {
        Self::build(
            OracleKind::PerfectCoupling,
            targets,
            BTreeMap::new(),
            T::lit(DEFAULT_SINGULARITY_CLAMP),
        )
    }

    /// `v(x, t, psi) = (target(psi) - x) / max(1 - t, epsilon)`.
    pub fn delta_target(targets: Vec<(u32, StateVec<T>)>, epsilon: T) -> Result<Self> {
        Self::build(OracleKind::DeltaTarget, targets, BTreeMap::new(), epsilon)
    }

    /// Conditional-expectation field for an isotropic Gaussian target
    /// N(mean, sigma^2 I) reached from standard-normal noise under
    /// independent coupling.
    pub fn gaussian_target(targets: Vec<(u32, StateVec<T>, T)>) -> Result<Self> {
        let mut sigmas = BTreeMap::new();
        let means = targets
            .into_iter()
            .map(|(id, mean, sigma)| {
                sigmas.insert(id, sigma);
                (id, mean)
            })
            .collect();
        Self::build(
            OracleKind::GaussianTarget,
            means,
            sigmas,
            T::lit(DEFAULT_SINGULARITY_CLAMP),
        )
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    fn target(&self, cond: &Condition<T>) -> Result<&StateVec<T>> {
        self.targets
            .get(&cond.id())
            .ok_or(FlowError::UnknownCondition(cond.id()))
    }
}

impl<T: Scalar> VelocityField<T> for OracleField<T> {
    fn state_dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &StateVec<T>, t: T, cond: &Condition<T>) -> Result<StateVec<T>> {
        check_eval_inputs(self.dim, x, t)?;
        match self.kind {
            OracleKind::PerfectCoupling => {
                let target = self.target(cond)?;
                let guard = self.shared_noise.lock().expect("oracle noise lock");
                let noise = guard.as_ref().ok_or(FlowError::CouplingNoiseUnset)?;
                Ok(target.minus(noise))
            }
            OracleKind::DeltaTarget => {
                let target = self.target(cond)?;
                let denom = (T::one() - t).max(self.epsilon);
                Ok(target.minus(x).scaled(denom.recip()))
            }
            OracleKind::GaussianTarget => {
                let mean = self.target(cond)?;
                let sigma = *self.sigmas.get(&cond.id()).expect("sigma for target");
                // x_t = t x1 + (1-t) x0 with x1 ~ N(mean, sigma^2 I),
                // x0 ~ N(0, I) independent:
                //   E[x1 - x0 | x_t = x]
                //     = mean + (t sigma^2 - (1-t)) (x - t mean) / (t^2 sigma^2 + (1-t)^2)
                let b = T::one() - t;
                let var = t * t * sigma * sigma + b * b;
                let coeff = (t * sigma * sigma - b) / var;
                let mut out = mean.clone();
                let mut centered = x.clone();
                centered.add_scaled(-t, mean);
                out.add_scaled(coeff, &centered);
                Ok(out)
            }
        }
    }

    fn set_shared_noise(&self, noise: &StateVec<T>) -> Result<()> {
        noise.ensure_dim(self.dim, "oracle shared noise")?;
        noise.ensure_finite("oracle shared noise")?;
        *self.shared_noise.lock().expect("oracle noise lock") = Some(noise.clone());
        Ok(())
    }

    fn describe(&self) -> String {
        format!("oracle:{}", self.kind.as_str())
    }
}
