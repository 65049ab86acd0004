use crate::error::{Error, Result};
use crate::model::ModelParams;

use super::backward::Gradients;

/// Adaptive-moment optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub m: ModelParams,
    pub v: ModelParams,
    pub step: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl OptimizerState {
    pub fn new(like: &ModelParams, lr: f64) -> Self {
        let mut zero = like.clone();
        for (_, g) in zero.groups_mut() {
            g.fill(0.0);
        }
        Self {
            m: zero.clone(),
            v: zero,
            step: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One bias-corrected Adam update, in place.
pub fn adam_step(
    params: &mut ModelParams,
    grads: &Gradients,
    state: &mut OptimizerState,
) -> Result<()> {
    if !params.same_shape(grads) || !params.same_shape(&state.m) {
        return Err(Error::DimensionMismatch {
            what: "optimizer parameter shapes",
            expected: params.num_params(),
            got: grads.num_params(),
        });
    }
    state.step += 1;
    let t = state.step as i32;
    let (b1, b2) = (state.beta1, state.beta2);
    let correction1 = 1.0 - b1.powi(t);
    let correction2 = 1.0 - b2.powi(t);
    let lr = state.lr;
    let eps = state.eps;

    let groups = params
        .groups_mut()
        .into_iter()
        .zip(grads.groups())
        .zip(state.m.groups_mut().into_iter().zip(state.v.groups_mut()));
    for (((_, p), (_, g)), ((_, m), (_, v))) in groups {
        for i in 0..p.len() {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let m_hat = m[i] / correction1;
            let v_hat = v[i] / correction2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Model, ModelConfig};

    fn setup() -> (Model, Gradients) {
        let m = Model::new(ModelConfig::new(3, 2, 5, 10).unwrap(), 1);
        let g = Gradients::zeros_like(&m);
        (m, g)
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let (mut m, g) = setup();
        let before = m.params.clone();
        let mut st = OptimizerState::new(&m.params, 1e-3);
        for _ in 0..5 {
            adam_step(&mut m.params, &g, &mut st).unwrap();
        }
        assert_eq!(m.params, before);
        assert_eq!(st.step, 5);
    }

    #[test]
    fn first_step_is_sign_of_gradient() {
        let (mut m, mut g) = setup();
        for (_, gr) in g.groups_mut() {
            for (i, v) in gr.iter_mut().enumerate() {
                *v = if i % 2 == 0 { 0.37 } else { -2.5 };
            }
        }
        let before = m.params.clone();
        let lr = 1e-3;
        let mut st = OptimizerState::new(&m.params, lr);
        adam_step(&mut m.params, &g, &mut st).unwrap();
        for ((_, a), ((_, b), (_, gr))) in m
            .params
            .groups()
            .iter()
            .zip(before.groups().iter().zip(g.groups().iter()))
        {
            for i in 0..a.len() {
                let step = a[i] - b[i];
                assert!((step + lr * gr[i].signum()).abs() < 1e-10, "{step}");
            }
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let (mut m, _) = setup();
        let other = Model::zeros(ModelConfig::new(3, 2, 6, 10).unwrap());
        let g = Gradients::zeros_like(&other);
        let mut st = OptimizerState::new(&m.params, 1e-3);
        assert!(adam_step(&mut m.params, &g, &mut st).is_err());
    }
}
