//! Certificates for monotone active-set growth: diagonal dominance of the
//! inverse Gram matrix, the coherence-based step bound, the off-diagonal
//! ratio bound that implies dominance, and the positive cone condition with
//! its equivalence to strict dominance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{
    classify_dominance, classify_dominance_eps, gram, invert_spd, mutual_coherence,
    principal_submatrix, DenseMatrix, DominanceClass, IndexSet,
};

/// Outcome of a certificate check. `mu` carries the measured statistic
/// (coherence or worst off-diagonal ratio) and `k_bound` the bound it was
/// compared against, when the condition has such numbers.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dominance: Option<DominanceClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl ConditionReport {
    /// Flat `key=value` record, one line. Witness text is quoted since it
    /// contains spaces.
    pub fn to_kv(&self) -> String {
        let mut out = format!("condition={} holds={}", self.condition, self.holds);
        if let Some(d) = self.dominance {
            out.push_str(&format!(" dominance={d}"));
        }
        if let Some(m) = self.mu {
            out.push_str(&format!(" mu={m}"));
        }
        if let Some(k) = self.k_bound {
            out.push_str(&format!(" k_bound={k}"));
        }
        if let Some(w) = &self.witness {
            out.push_str(&format!(" witness={w:?}"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn dominance_witness(h: &DenseMatrix, eps: f64) -> String {
    let n = h.rows();
    for i in 0..n {
        let diag = h.get(i, i);
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| h.get(i, j).abs()).sum();
        if diag < 0.0 || !(diag >= off - eps) {
            return format!("row {i}: diagonal {diag} < off-diagonal sum {off}");
        }
    }
    "no violating row found".into()
}

/// Checks whether `(AᵀA)⁻¹` is diagonally dominant, the sufficient
/// condition for the active set to grow monotonically along the whole
/// solution path. Refuses dictionaries with fewer rows than columns, where
/// the guarantee does not apply.
pub fn check_gram_inverse_dominance(a: &DenseMatrix) -> Result<ConditionReport> {
    check_gram_inverse_dominance_eps(a, 0.0, false)
}

/// Same check with classification slack and an override for wide (rows <
/// cols) dictionaries. The override only skips the shape refusal; a wide
/// dictionary still fails at inversion since its Gram matrix is singular.
pub fn check_gram_inverse_dominance_eps(
    a: &DenseMatrix,
    eps: f64,
    allow_wide: bool,
) -> Result<ConditionReport> {
    if a.rows() < a.cols() && !allow_wide {
        return Err(Error::Hypothesis(format!(
            "dictionary is {}x{}: the monotone-growth condition assumes at least as many rows as columns",
            a.rows(),
            a.cols()
        )));
    }
    let h = invert_spd(&gram(a))?;
    let dc = classify_dominance_eps(&h, eps)?;
    let witness = if dc.is_dominant() {
        None
    } else {
        Some(dominance_witness(&h, eps))
    };
    Ok(ConditionReport {
        condition: "gram_inverse_dd".into(),
        holds: dc.is_dominant(),
        dominance: Some(dc),
        mu: None,
        k_bound: None,
        witness,
    })
}

/// Coherence-based step bound: the homotopy method recovers any k-sparse
/// representation in k steps when `k <= (1 + 1/mu) / 2`. The comparison is
/// non-strict; an orthonormal dictionary (mu = 0) yields an infinite bound.
pub fn check_kstep_bound(a: &DenseMatrix, k: usize) -> Result<ConditionReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("sparsity level k must be >= 1".into()));
    }
    let mu = mutual_coherence(a)?;
    let bound = if mu == 0.0 {
        f64::INFINITY
    } else {
        0.5 * (1.0 + 1.0 / mu)
    };
    let holds = (k as f64) <= bound;
    let witness = if holds {
        None
    } else {
        Some(format!("k = {k} exceeds the step bound {bound}"))
    };
    Ok(ConditionReport {
        condition: "kstep_coherence".into(),
        holds,
        dominance: None,
        mu: Some(mu),
        k_bound: Some(bound),
        witness,
    })
}

/// Off-diagonal ratio bound on a Gram matrix: if every row satisfies
/// `|g_ij| / g_ii <= 1/(2n-3)` then `G⁻¹` is diagonally dominant. The ratio
/// uses each row's own diagonal, and the check needs `n > 2` and positive
/// diagonal entries.
pub fn check_coherence_bound(g: &DenseMatrix) -> Result<ConditionReport> {
    if !g.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square Gram matrix, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    let n = g.rows();
    if n <= 2 {
        return Err(Error::Hypothesis(format!(
            "the ratio bound 1/(2n-3) requires n > 2, got n = {n}"
        )));
    }
    if !g.is_symmetric_within(1e-12) {
        return Err(Error::Hypothesis("Gram matrix is not symmetric".into()));
    }
    for i in 0..n {
        if !(g.get(i, i) > 0.0) {
            return Err(Error::Hypothesis(format!(
                "nonpositive diagonal entry g[{i}][{i}] = {}",
                g.get(i, i)
            )));
        }
    }
    let bound = 1.0 / (2 * n - 3) as f64;
    let mut max_ratio = 0.0f64;
    let mut arg = (0usize, 0usize);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let ratio = g.get(i, j).abs() / g.get(i, i);
            if ratio > max_ratio {
                max_ratio = ratio;
                arg = (i, j);
            }
        }
    }
    let holds = max_ratio <= bound;
    let witness = if holds {
        None
    } else {
        Some(format!(
            "|g[{}][{}]| / g[{}][{}] = {max_ratio} exceeds 1/(2n-3) = {bound}",
            arg.0, arg.1, arg.0, arg.0
        ))
    };
    Ok(ConditionReport {
        condition: "coherence_bound".into(),
        holds,
        dominance: None,
        mu: Some(max_ratio),
        k_bound: Some(bound),
        witness,
    })
}

/// Options for the positive cone check.
#[derive(Debug, Clone)]
pub struct PositiveConeOpts {
    /// Refuse dimensions above this (the enumeration is exponential).
    pub max_n: usize,
    /// Enumerate every sign diagonal instead of the row-dominance shortcut.
    /// Both routes decide the same predicate; the enumeration exists for
    /// cross-validation.
    pub exhaustive: bool,
    /// Margins must exceed this value to count as strictly positive.
    /// Default 0 (exact float comparison); callers verifying computed
    /// matrices near the dominance boundary should pass a small positive
    /// tolerance so rounding noise around exact zero is not read as a sign.
    pub strict_tol: f64,
}

impl Default for PositiveConeOpts {
    fn default() -> Self {
        Self {
            max_n: 10,
            exhaustive: false,
            strict_tol: 0.0,
        }
    }
}

/// Positive cone condition on a dictionary: for every nonempty index subset
/// S and every choice of column sign flips, each row sum of the inverse of
/// the signed principal minor of `AᵀA` is strictly positive.
pub fn check_positive_cone(a: &DenseMatrix, opts: &PositiveConeOpts) -> Result<ConditionReport> {
    check_positive_cone_gram(&gram(a), opts)
}

/// Positive cone condition stated directly on a Gram matrix `G`.
///
/// The shortcut route checks, for each subset `S`, strict row dominance of
/// `R = (G_S)⁻¹`: the minimum of a row sum of `BRB` over sign diagonals `B`
/// is exactly `r_ii - sum_j |r_ij|`. The exhaustive route enumerates the
/// sign diagonals, fixing the first sign to `+1` since `B` and `-B`
/// conjugate `G_S` to the same matrix. Subsets are scanned in increasing
/// binary-mask order and the first failure is reported.
pub fn check_positive_cone_gram(
    g: &DenseMatrix,
    opts: &PositiveConeOpts,
) -> Result<ConditionReport> {
    if !g.is_square() {
        return Err(Error::Dimension("expected a square Gram matrix".into()));
    }
    if !g.is_symmetric_within(1e-12) {
        return Err(Error::Hypothesis("Gram matrix is not symmetric".into()));
    }
    let n = g.rows();
    if n > opts.max_n {
        return Err(Error::CostGuard(format!(
            "dimension {n} exceeds the enumeration limit {}; raise the limit to proceed",
            opts.max_n
        )));
    }
    let tol = opts.strict_tol;
    for mask in 1u32..(1u32 << n) {
        let sup: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let set = IndexSet::new(sup.clone())?;
        let r = invert_spd(&principal_submatrix(g, &set)?)
            .map_err(|e| Error::Singular(format!("principal minor {sup:?}: {e}")))?;
        let k = sup.len();
        if opts.exhaustive {
            for bmask in 0u32..(1u32 << (k - 1)) {
                let signs: Vec<f64> = (0..k)
                    .map(|t| {
                        if t == 0 {
                            1.0
                        } else if bmask >> (t - 1) & 1 == 1 {
                            -1.0
                        } else {
                            1.0
                        }
                    })
                    .collect();
                for i in 0..k {
                    let row_sum: f64 =
                        (0..k).map(|j| signs[i] * signs[j] * r.get(i, j)).sum();
                    if !(row_sum > tol) {
                        let pat: String = signs
                            .iter()
                            .map(|s| if *s > 0.0 { '+' } else { '-' })
                            .collect();
                        return Ok(failure_report(format!(
                            "subset {sup:?}, signs {pat}, row {}: inverse row sum {row_sum} is not positive",
                            sup[i]
                        )));
                    }
                }
            }
        } else {
            for i in 0..k {
                let margin: f64 = r.get(i, i)
                    - (0..k)
                        .filter(|&j| j != i)
                        .map(|j| r.get(i, j).abs())
                        .sum::<f64>();
                if !(margin > tol) {
                    return Ok(failure_report(format!(
                        "subset {sup:?}, row {}: dominance margin {margin} of the inverse minor is not positive",
                        sup[i]
                    )));
                }
            }
        }
    }
    Ok(ConditionReport {
        condition: "positive_cone".into(),
        holds: true,
        dominance: None,
        mu: None,
        k_bound: None,
        witness: None,
    })
}

fn failure_report(witness: String) -> ConditionReport {
    ConditionReport {
        condition: "positive_cone".into(),
        holds: false,
        dominance: None,
        mu: None,
        k_bound: None,
        witness: Some(witness),
    }
}

/// Self-test of the equivalence between strict diagonal dominance of a
/// positive-definite `H` and the positive cone condition of a dictionary
/// with `AᵀA = H⁻¹`. Returns true when the two verdicts agree.
///
/// The positive-cone side works on computed inverses, so margins within
/// `1e-9` of zero (scaled by the entries of `H`) are read as failures of
/// strictness; inputs whose dominance margins are genuinely that thin fall
/// outside what this self-test can decide.
pub fn verify_positive_cone_equivalence(h: &DenseMatrix) -> Result<bool> {
    if !h.is_square() {
        return Err(Error::Dimension("expected a square matrix".into()));
    }
    if !h.is_symmetric_within(1e-12) {
        return Err(Error::Hypothesis("matrix is not symmetric".into()));
    }
    let sdd = classify_dominance(h)? == DominanceClass::SDD;
    let g = invert_spd(h)?;
    let opts = PositiveConeOpts {
        max_n: 10,
        exhaustive: true,
        strict_tol: 1e-9 * h.max_abs(),
    };
    let cone = check_positive_cone_gram(&g, &opts)?.holds;
    Ok(sdd == cone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::cholesky;

    fn mat(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Upper-triangular factor of `g`, so the result has `AᵀA = g`.
    fn dictionary_with_gram(g: &DenseMatrix) -> DenseMatrix {
        cholesky(g, 0.0).unwrap().lower().transpose()
    }

    #[test]
    fn orthogonal_dictionary_passes_gram_inverse_check() {
        // Scaled 4x4 Hadamard matrix: orthonormal columns.
        let h = mat(&[
            &[0.5, 0.5, 0.5, 0.5],
            &[0.5, -0.5, 0.5, -0.5],
            &[0.5, 0.5, -0.5, -0.5],
            &[0.5, -0.5, -0.5, 0.5],
        ]);
        let rep = check_gram_inverse_dominance(&h).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.dominance, Some(DominanceClass::SDD));
        assert!(rep.witness.is_none());
    }

    #[test]
    fn coherent_unequal_norm_columns_fail_gram_inverse_check() {
        // Nearly parallel columns with very different norms: the inverse
        // Gram matrix has an off-diagonal entry exceeding the small
        // diagonal, so one row violates dominance.
        let a = mat(&[&[0.5, 0.9], &[0.0, 0.436]]);
        let rep = check_gram_inverse_dominance(&a).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.dominance, Some(DominanceClass::NotDD));
        assert!(rep.witness.as_deref().unwrap().contains("row 1"));
    }

    #[test]
    fn wide_dictionary_is_refused_without_override() {
        let a = mat(&[&[1.0, 0.0, 1.0]]);
        assert!(matches!(
            check_gram_inverse_dominance(&a),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn rank_deficient_dictionary_reports_singularity() {
        let a = mat(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(
            check_gram_inverse_dominance(&a),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn kstep_bound_on_orthonormal_dictionary_holds_for_any_k() {
        let rep = check_kstep_bound(&DenseMatrix::identity(5), 1000).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.mu, Some(0.0));
        assert_eq!(rep.k_bound, Some(f64::INFINITY));
    }

    #[test]
    fn kstep_bound_duplicate_columns() {
        // Two identical unit columns: coherence exactly 1, bound exactly 1.
        let a = mat(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let rep = check_kstep_bound(&a, 1).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.k_bound, Some(1.0));
        let rep2 = check_kstep_bound(&a, 2).unwrap();
        assert!(!rep2.holds);
        assert!(rep2.witness.is_some());
    }

    #[test]
    fn kstep_bound_rejects_k_zero() {
        assert!(check_kstep_bound(&DenseMatrix::identity(2), 0).is_err());
    }

    #[test]
    fn coherence_bound_boundary_case_holds() {
        let third = 1.0 / 3.0;
        let g = mat(&[
            &[1.0, third, third],
            &[third, 1.0, third],
            &[third, third, 1.0],
        ]);
        let rep = check_coherence_bound(&g).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.mu, Some(third));
        assert_eq!(rep.k_bound, Some(third));
    }

    #[test]
    fn coherence_bound_identity_and_violation() {
        assert!(check_coherence_bound(&DenseMatrix::identity(4)).unwrap().holds);
        // n = 4: bound is 1/5 = 0.2; plant a ratio of 0.21.
        let mut rows = vec![vec![0.0; 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        rows[0][1] = 0.21;
        rows[1][0] = 0.21;
        let g = DenseMatrix::from_rows(&rows).unwrap();
        let rep = check_coherence_bound(&g).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.k_bound, Some(0.2));
        assert!(rep.witness.is_some());
    }

    #[test]
    fn coherence_bound_hypothesis_errors() {
        assert!(matches!(
            check_coherence_bound(&DenseMatrix::identity(2)),
            Err(Error::Hypothesis(_))
        ));
        let g = mat(&[
            &[0.0, 0.1, 0.1],
            &[0.1, 1.0, 0.1],
            &[0.1, 0.1, 1.0],
        ]);
        assert!(matches!(check_coherence_bound(&g), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn positive_cone_holds_for_orthonormal_dictionary() {
        let rep = check_positive_cone(&DenseMatrix::identity(4), &PositiveConeOpts::default())
            .unwrap();
        assert!(rep.holds);
        let rep = check_positive_cone(
            &DenseMatrix::identity(4),
            &PositiveConeOpts {
                exhaustive: true,
                ..PositiveConeOpts::default()
            },
        )
        .unwrap();
        assert!(rep.holds);
    }

    #[test]
    fn positive_cone_holds_when_inverse_gram_is_sdd() {
        // H strictly dominant, G = H⁻¹ exact: H = [[2,1],[1,2]]/3 scaled.
        let g = mat(&[&[2.0, -1.0], &[-1.0, 2.0]]);
        // (AᵀA)⁻¹ = [[2/3,1/3],[1/3,2/3]] is SDD.
        let a = dictionary_with_gram(&g);
        for exhaustive in [false, true] {
            let rep = check_positive_cone(
                &a,
                &PositiveConeOpts {
                    exhaustive,
                    strict_tol: 1e-12,
                    ..PositiveConeOpts::default()
                },
            )
            .unwrap();
            assert!(rep.holds);
        }
    }

    #[test]
    fn positive_cone_fails_on_dominance_boundary() {
        // H = [[2,1,1],[1,2,1],[1,1,2]] has every row at equality, so its
        // exact inverse G = (1/4)[[3,-1,-1],[-1,3,-1],[-1,-1,3]] must fail
        // strict positivity for the sign pattern aligned against a row.
        let g = mat(&[
            &[0.75, -0.25, -0.25],
            &[-0.25, 0.75, -0.25],
            &[-0.25, -0.25, 0.75],
        ]);
        for exhaustive in [false, true] {
            let rep = check_positive_cone_gram(
                &g,
                &PositiveConeOpts {
                    exhaustive,
                    strict_tol: 1e-9,
                    ..PositiveConeOpts::default()
                },
            )
            .unwrap();
            assert!(!rep.holds, "exhaustive={exhaustive}");
            assert!(rep.witness.is_some());
        }
    }

    #[test]
    fn positive_cone_shortcut_and_exhaustive_agree() {
        let cases = [
            mat(&[&[1.0, 0.3, 0.0], &[0.3, 1.0, -0.2], &[0.0, -0.2, 1.0]]),
            mat(&[&[2.0, 0.9, 0.8], &[0.9, 2.0, 0.9], &[0.8, 0.9, 2.0]]),
            mat(&[&[1.0, 0.49, 0.49], &[0.49, 1.0, 0.49], &[0.49, 0.49, 1.0]]),
        ];
        for g in &cases {
            let shortcut =
                check_positive_cone_gram(g, &PositiveConeOpts::default()).unwrap();
            let full = check_positive_cone_gram(
                g,
                &PositiveConeOpts {
                    exhaustive: true,
                    ..PositiveConeOpts::default()
                },
            )
            .unwrap();
            assert_eq!(shortcut.holds, full.holds);
        }
    }

    #[test]
    fn positive_cone_cost_guard() {
        let a = DenseMatrix::identity(5);
        let opts = PositiveConeOpts {
            max_n: 4,
            ..PositiveConeOpts::default()
        };
        assert!(matches!(
            check_positive_cone(&a, &opts),
            Err(Error::CostGuard(_))
        ));
    }

    #[test]
    fn equivalence_self_test_on_identity_and_boundary() {
        assert!(verify_positive_cone_equivalence(&DenseMatrix::identity(3)).unwrap());
        // Dominance boundary: SDD false, positive cone false, verdicts agree.
        let h = mat(&[
            &[2.0, 1.0, 1.0],
            &[1.0, 2.0, 1.0],
            &[1.0, 1.0, 2.0],
        ]);
        assert!(verify_positive_cone_equivalence(&h).unwrap());
        // Strictly dominant case.
        let h2 = mat(&[
            &[3.0, 1.0, 0.5],
            &[1.0, 3.0, 1.0],
            &[0.5, 1.0, 3.0],
        ]);
        assert!(verify_positive_cone_equivalence(&h2).unwrap());
    }

    #[test]
    fn report_serialization_round_trip() {
        let rep = check_kstep_bound(&DenseMatrix::identity(3), 2).unwrap();
        let kv = rep.to_kv();
        assert!(kv.starts_with("condition=kstep_coherence holds=true"));
        let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(json["condition"], "kstep_coherence");
        assert_eq!(json["holds"], true);
        assert!(json.get("dominance").is_none());
    }
}
