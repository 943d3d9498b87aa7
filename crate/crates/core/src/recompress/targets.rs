use crate::error::{shape_err, Result};
use crate::tensor::{RankChain, Shape};

/// Clamps a requested target chain to one every algorithm can realise:
/// `ℓ_k ≤ bound_k` (the input TT ranks), `ℓ_k ≤ ℓ_{k−1}·n_k` and
/// `ℓ_k ≤ n_{k+1}·ℓ_{k+1}`. Each reduction is logged.
pub fn feasible_targets(
    shape: &Shape,
    bound: &RankChain,
    requested: &RankChain,
) -> Result<RankChain> {
    let d = shape.order();
    if requested.order() != d || bound.order() != d {
        return shape_err(format!(
            "target chain {requested} and input chain {bound} must both describe {d} cores"
        ));
    }
    let n = shape.dims();
    let mut l: Vec<usize> = requested.as_slice().to_vec();
    for k in 1..d {
        let cap = bound[k].min(l[k - 1].saturating_mul(n[k - 1]));
        if l[k] > cap {
            if l[k] > bound[k] {
                log::info!(
                    "target rank {} at bond {k} exceeds the input rank {}; clamping",
                    l[k],
                    bound[k]
                );
            } else {
                log::info!("target rank {} at bond {k} clamped to {cap}", l[k]);
            }
            l[k] = cap;
        }
    }
    for k in (1..d).rev() {
        let cap = n[k].saturating_mul(l[k + 1]);
        if l[k] > cap {
            log::info!("target rank {} at bond {k} clamped to {cap}", l[k]);
            l[k] = cap;
        }
    }
    RankChain::new(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_to_input_and_mode_products() {
        let shape = Shape::new(vec![2, 5, 5, 3]).unwrap();
        let bound = RankChain::new(vec![1, 9, 9, 9, 1]).unwrap();
        let req = RankChain::new(vec![1, 4, 12, 6, 1]).unwrap();
        let got = feasible_targets(&shape, &bound, &req).unwrap();
        assert_eq!(got.as_slice(), &[1, 2, 9, 3, 1]);
    }

    #[test]
    fn feasible_request_is_unchanged() {
        let shape = Shape::uniform(4, 4).unwrap();
        let bound = RankChain::uniform(4, 9).unwrap();
        let req = RankChain::uniform(4, 3).unwrap();
        assert_eq!(feasible_targets(&shape, &bound, &req).unwrap(), req);
    }

    #[test]
    fn wrong_length_is_shape_error() {
        let shape = Shape::uniform(3, 4).unwrap();
        let bound = RankChain::uniform(3, 4).unwrap();
        let req = RankChain::uniform(4, 2).unwrap();
        assert!(feasible_targets(&shape, &bound, &req).is_err());
    }
}
