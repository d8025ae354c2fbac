use crate::error::{Error, Result};
use crate::model::{check_dims, ModelVector};

/// FLTrust with the receiver's own pre-aggregation model as the reference.
///
/// `trust(j) = max(0, cos(models[j], reference))`; every model is rescaled to
/// the reference norm and the output is the trust-weighted average. When no
/// model earns positive trust the reference itself is returned.
pub fn agg_fltrust(models: &[ModelVector], reference: &ModelVector) -> Result<ModelVector> {
    let dim = check_dims(models)?;
    if reference.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: reference.dim(),
        });
    }
    let ref_norm = reference.norm();
    if ref_norm == 0.0 {
        return Err(Error::ZeroReference);
    }

    let mut acc = vec![0.0; dim];
    let mut total_trust = 0.0;
    for model in models {
        let trust = model.cosine_similarity(reference).max(0.0);
        if trust == 0.0 {
            continue;
        }
        let scale = trust * ref_norm / model.norm();
        for (a, v) in acc.iter_mut().zip(model.as_slice()) {
            *a += scale * v;
        }
        total_trust += trust;
    }
    if total_trust == 0.0 {
        return Ok(reference.clone());
    }
    ModelVector::new(acc.into_iter().map(|a| a / total_trust).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(v: &[f64]) -> ModelVector {
        ModelVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn reference_alone_is_identity() {
        let r = mv(&[3.0, -4.0]);
        let out = agg_fltrust(std::slice::from_ref(&r), &r).unwrap();
        for k in 0..2 {
            assert!((out[k] - r[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn opposite_direction_falls_back_to_reference() {
        let r = mv(&[1.0, 2.0]);
        assert_eq!(agg_fltrust(&[mv(&[-1.0, -2.0])], &r).unwrap(), r);
    }

    #[test]
    fn orthogonal_model_gets_no_weight() {
        let out = agg_fltrust(&[mv(&[2.0, 0.0]), mv(&[0.0, 3.0])], &mv(&[1.0, 0.0])).unwrap();
        assert_eq!(out.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn zero_reference_rejected() {
        assert_eq!(agg_fltrust(&[mv(&[1.0])], &mv(&[0.0])), Err(Error::ZeroReference));
    }

    #[test]
    fn output_norm_bounded_by_reference_norm() {
        let r = mv(&[1.0, 1.0]);
        let out = agg_fltrust(&[mv(&[10.0, 9.0]), mv(&[0.5, 2.0]), mv(&[100.0, 1.0])], &r).unwrap();
        assert!(out.norm() <= r.norm() + 1e-12);
    }
}
