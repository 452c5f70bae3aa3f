use crate::error::{NullityError, Result};

/// Radon–Hurwitz number: for `m = 2^(4a+b) · odd` with `b < 4`, `8a + 2^b`.
pub fn radon_hurwitz(m: u64) -> Result<u64> {
    if m == 0 {
        return Err(NullityError::InvalidArgument("Radon–Hurwitz number needs m >= 1".into()));
    }
    let two_adic = u64::from(m.trailing_zeros());
    let (a, b) = (two_adic / 4, two_adic % 4);
    Ok(8 * a + (1 << b))
}

/// Whether a nullity index `nu0` reaches `ρ(q)`; above it a complete spherical
/// submanifold is totally geodesic.
pub fn sphere_rigidity_threshold(nu0: u64, q: u64) -> Result<bool> {
    if q == 0 {
        return Err(NullityError::InvalidArgument("conullity index must be at least 1".into()));
    }
    Ok(nu0 >= radon_hurwitz(q)?)
}

/// `max { k in [0, n-1] : ρ(n - k) >= k + 1 }`.
pub fn nu_n(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(NullityError::InvalidArgument(format!("nu_n needs n >= 2, got {n}")));
    }
    let mut best = 0;
    for k in 0..n {
        if radon_hurwitz(n - k)? > k {
            best = k;
        }
    }
    Ok(best)
}

/// `n - ν_n >= 2p + 1`.
pub fn sphere_totally_geodesic_by_nonpositive_extrinsic(n: u64, p: u64) -> Result<bool> {
    Ok(n - nu_n(n)? > 2 * p)
}

/// `nu0 >= q(q+1)/2`.
pub fn theorem1_applicable(nu0: u64, q: u64) -> bool {
    2 * nu0 >= q * (q + 1)
}

/// Lower bound `n - 2p` on the nullity of a submanifold with nonpositive
/// extrinsic curvature, clamped at zero.
pub fn florit_bound(n: u64, p: u64) -> u64 {
    n.saturating_sub(2 * p)
}

/// `n >= 2p² + 3p`.
pub fn theorem2_applicable(n: u64, p: u64) -> Result<bool> {
    if p == 0 {
        return Err(NullityError::InvalidArgument("codimension must be at least 1".into()));
    }
    Ok(n >= 2 * p * p + 3 * p)
}

/// The reduction to the nullity threshold: with `ν0 >= n - 2p` and
/// `q <= 2p`, the pair `(n - 2p, 2p)` must clear `q(q+1)/2`.
pub fn theorem2_chain_holds(n: u64, p: u64) -> bool {
    theorem1_applicable(florit_bound(n, p), 2 * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radon_hurwitz_small_values() {
        let table: Vec<u64> = (1..=16).map(|m| radon_hurwitz(m).unwrap()).collect();
        assert_eq!(table, vec![1, 2, 1, 4, 1, 2, 1, 8, 1, 2, 1, 4, 1, 2, 1, 9]);
        assert_eq!(radon_hurwitz(32).unwrap(), 10);
        assert!(radon_hurwitz(0).is_err());
    }

    #[test]
    fn rigidity_threshold_examples() {
        assert!(sphere_rigidity_threshold(1, 1).unwrap());
        assert!(sphere_rigidity_threshold(8, 8).unwrap());
        assert!(!sphere_rigidity_threshold(7, 8).unwrap());
        assert!(sphere_rigidity_threshold(9, 16).unwrap());
        assert!(sphere_rigidity_threshold(1, 0).is_err());
    }

    #[test]
    fn nu_n_examples() {
        assert_eq!(nu_n(2).unwrap(), 0);
        assert_eq!(nu_n(9).unwrap(), 1);
        assert_eq!(nu_n(17).unwrap(), 1);
        assert!(nu_n(1).is_err());
    }

    #[test]
    fn theorem_thresholds() {
        assert!(theorem1_applicable(3, 2));
        assert!(!theorem1_applicable(2, 2));
        assert!(theorem1_applicable(6, 3));
        assert!(theorem2_applicable(5, 1).unwrap());
        assert!(!theorem2_applicable(4, 1).unwrap());
        assert!(theorem2_applicable(14, 2).unwrap());
        assert!(theorem1_applicable(10, 4));
        assert!(theorem2_applicable(3, 0).is_err());
        assert_eq!(florit_bound(3, 2), 0);
    }

    #[test]
    fn theorem2_chain_is_tight() {
        for p in 1..=20 {
            let n = 2 * p * p + 3 * p;
            assert!(theorem2_chain_holds(n, p));
            assert!(!theorem2_chain_holds(n - 1, p));
        }
    }
}
