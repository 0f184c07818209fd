use std::fmt;
use std::sync::Arc;

use crate::error::EvalError;

type Handle = Arc<dyn Fn(f64) -> Result<f64, EvalError> + Send + Sync>;

/// A labelled real function of one real variable.
///
/// Evaluation never yields a non-finite value: NaN or infinity coming out of
/// the underlying closure is turned into an [`EvalError`].
#[derive(Clone)]
pub struct RealFn {
    label: String,
    handle: Handle,
}

impl RealFn {
    /// Wraps an infallible closure.
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::fallible(label, move |x| Ok(f(x)))
    }

    /// Wraps a closure that may reject its argument.
    pub fn fallible<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> Result<f64, EvalError> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            handle: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let y = (self.handle)(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(EvalError::new(x, format!("non-finite value {y}")))
        }
    }
}

impl fmt::Debug for RealFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFn")
            .field("label", &self.label)
            .finish()
    }
}
