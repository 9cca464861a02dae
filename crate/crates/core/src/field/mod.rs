//! Velocity fields: anything that maps (state, time, condition) to a velocity.
//!
//! Three families live here: trainable dense networks, trainable
//! attention-token networks, and closed-form oracle fields under which the
//! transfer identities become exact. Fields always receive data-fraction time
//! (t = 0 pure noise, t = 1 clean data); callers working in noise level
//! convert first.

mod attention;
mod dense;
mod oracle;
mod train;

pub use attention::{AttentionArch, AttentionField, TokenMatrix, Tokenizer};
pub use dense::{DenseArch, DenseField};
pub use oracle::{OracleField, OracleKind};
pub use train::{
    grad_check, rf_loss, train, GradCheckConfig, Optimizer, TrainConfig, TrainPair, TrainReport,
    TrainableField,
};

use crate::error::{FlowError, Result};
use crate::scalar::Scalar;
use crate::state::{Condition, StateVec};
use std::sync::atomic::{AtomicU64, Ordering};

pub(crate) fn check_eval_inputs<T: Scalar>(
    dim: usize,
    x: &StateVec<T>,
    t: T,
) -> Result<()> {
    x.ensure_dim(dim, "velocity evaluation")?;
    x.ensure_finite("velocity evaluation")?;
    if !t.is_finite() || t < T::zero() || t > T::one() {
        return Err(FlowError::TimeOutOfRange { time: t.as_f64() });
    }
    Ok(())
}

/// A velocity field v(x, t, psi). Evaluation is pure: two calls with
/// identical arguments return identical results, and no observable state
/// changes.
pub trait VelocityField<T: Scalar>: Send + Sync {
    fn state_dim(&self) -> usize;

    /// Velocity at state `x`, data-fraction time `t`, condition `cond`.
    fn eval(&self, x: &StateVec<T>, t: T, cond: &Condition<T>) -> Result<StateVec<T>>;

    /// Velocity for `x` with attention keys/values taken from `style`.
    /// Only attention fields support this.
    fn eval_injected(
        &self,
        x: &StateVec<T>,
        style: &StateVec<T>,
        t: T,
        cond: &Condition<T>,
    ) -> Result<StateVec<T>> {
        let _ = (x, style, t, cond);
        Err(FlowError::InjectionUnsupported {
            field: self.describe(),
        })
    }

    fn supports_injection(&self) -> bool {
        false
    }

    /// Transfer loops announce each freshly drawn shared noise vector here.
    /// Only the perfect-coupling oracle reacts; everything else ignores it.
    fn set_shared_noise(&self, noise: &StateVec<T>) -> Result<()> {
        let _ = noise;
        Ok(())
    }

    /// Short human-readable identity for metadata.
    fn describe(&self) -> String;
}

impl<T: Scalar, F: VelocityField<T> + ?Sized> VelocityField<T> for &F {
    fn state_dim(&self) -> usize {
        (**self).state_dim()
    }
    fn eval(&self, x: &StateVec<T>, t: T, cond: &Condition<T>) -> Result<StateVec<T>> {
        (**self).eval(x, t, cond)
    }
    fn eval_injected(
        &self,
        x: &StateVec<T>,
        style: &StateVec<T>,
        t: T,
        cond: &Condition<T>,
    ) -> Result<StateVec<T>> {
        (**self).eval_injected(x, style, t, cond)
    }
    fn supports_injection(&self) -> bool {
        (**self).supports_injection()
    }
    fn set_shared_noise(&self, noise: &StateVec<T>) -> Result<()> {
        (**self).set_shared_noise(noise)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// Classifier-free guidance: `v_null + scale * (v_cond - v_null)`.
///
/// `scale = 1` short-circuits to a single conditional evaluation and
/// `scale = 0` to a single unconditional one, so guidance-free runs keep an
/// exact evaluation budget.
pub fn cfg_velocity<T: Scalar, F: VelocityField<T> + ?Sized>(
    field: &F,
    x: &StateVec<T>,
    t: T,
    cond: &Condition<T>,
    scale: T,
) -> Result<StateVec<T>> {
    if scale == T::one() {
        return field.eval(x, t, cond);
    }
    let null = cond.null_like();
    if scale == T::zero() {
        return field.eval(x, t, &null);
    }
    let v_null = field.eval(x, t, &null)?;
    let v_cond = field.eval(x, t, cond)?;
    let mut out = v_null.clone();
    out.add_scaled(scale, &v_cond.minus(&v_null));
    Ok(out)
}

/// Wrapper that counts field evaluations, for budget assertions.
pub struct CountingField<F> {
    inner: F,
    evals: AtomicU64,
}

impl<F> CountingField<F> {
    pub fn new(inner: F) -> Self {
        Self {
            inner,
            evals: AtomicU64::new(0),
        }
    }

    pub fn evals(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.evals.store(0, Ordering::Relaxed);
    }
}

impl<T: Scalar, F: VelocityField<T>> VelocityField<T> for CountingField<F> {
    fn state_dim(&self) -> usize {
        self.inner.state_dim()
    }

    fn eval(&self, x: &StateVec<T>, t: T, cond: &Condition<T>) -> Result<StateVec<T>> {
        self.evals.fetch_add(1, Ordering::Relaxed);
        self.inner.eval(x, t, cond)
    }

    fn eval_injected(
        &self,
        x: &StateVec<T>,
        style: &StateVec<T>,
        t: T,
        cond: &Condition<T>,
    ) -> Result<StateVec<T>> {
        self.evals.fetch_add(1, Ordering::Relaxed);
        self.inner.eval_injected(x, style, t, cond)
    }

    fn supports_injection(&self) -> bool {
        self.inner.supports_injection()
    }

    fn set_shared_noise(&self, noise: &StateVec<T>) -> Result<()> {
        self.inner.set_shared_noise(noise)
    }

    fn describe(&self) -> String {
        self.inner.describe()
    }
}

/// Sinusoidal time features: `freqs` pairs (sin, cos) at geometric
/// frequencies 1, 2, 4, ...
pub(crate) fn time_features<T: Scalar>(t: T, freqs: usize, out: &mut Vec<T>) {
    out.clear();
    let tau = T::TAU();
    let mut f = T::one();
    for _ in 0..freqs {
        let angle = tau * f * t;
        out.push(angle.sin());
        out.push(angle.cos());
        f = f + f;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_target_oracle() -> OracleField<f64> {
        // null -> target m, condition 1 -> target a
        OracleField::perfect_coupling(vec![
            (0, StateVec::new(vec![0.5, -1.0])),
            (1, StateVec::new(vec![2.0, 3.0])),
        ])
        .unwrap()
    }

    #[test]
    fn cfg_scale_one_is_plain_conditional() {
        let field = two_target_oracle();
        field
            .set_shared_noise(&StateVec::new(vec![0.25, 0.5]))
            .unwrap();
        let x = StateVec::new(vec![0.0, 0.0]);
        let cond = Condition::new(1);
        let plain = field.eval(&x, 0.3, &cond).unwrap();
        let guided = cfg_velocity(&field, &x, 0.3, &cond, 1.0).unwrap();
        assert_eq!(plain, guided);
    }

    #[test]
    fn cfg_scale_zero_is_unconditional() {
        let field = two_target_oracle();
        field
            .set_shared_noise(&StateVec::new(vec![0.25, 0.5]))
            .unwrap();
        let x = StateVec::new(vec![0.0, 0.0]);
        let cond = Condition::new(1);
        let null = field.eval(&x, 0.3, &cond.null_like()).unwrap();
        let guided = cfg_velocity(&field, &x, 0.3, &cond, 0.0).unwrap();
        assert_eq!(null, guided);
    }

    #[test]
    fn cfg_scale_two_matches_oracle_algebra() {
        // v = (m - x0) + 2((a - x0) - (m - x0)) = 2a - m - x0
        let field = two_target_oracle();
        let noise = StateVec::new(vec![0.25, 0.5]);
        field.set_shared_noise(&noise).unwrap();
        let x = StateVec::new(vec![0.0, 0.0]);
        let v = cfg_velocity(&field, &x, 0.3, &Condition::new(1), 2.0).unwrap();
        let expected = [
            2.0 * 2.0 - 0.5 - 0.25,
            2.0 * 3.0 - (-1.0) - 0.5,
        ];
        for (got, want) in v.values().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn counting_wrapper_counts() {
        let field = two_target_oracle();
        field
            .set_shared_noise(&StateVec::new(vec![0.0, 0.0]))
            .unwrap();
        let counting = CountingField::new(field);
        let x = StateVec::new(vec![0.0, 0.0]);
        let cond = Condition::new(1);
        counting.eval(&x, 0.5, &cond).unwrap();
        counting.eval(&x, 0.5, &cond).unwrap();
        assert_eq!(counting.evals(), 2);
        // scale != 0, 1 costs two evaluations
        cfg_velocity(&counting, &x, 0.5, &cond, 2.0).unwrap();
        assert_eq!(counting.evals(), 4);
    }

    #[test]
    fn time_feature_layout() {
        let mut buf = Vec::new();
        time_features::<f64>(0.0, 3, &mut buf);
        assert_eq!(buf.len(), 6);
        // sin(0) = 0, cos(0) = 1 at every frequency
        assert_eq!(buf, vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
    }
}
