//! Exact piecewise-linear solution path of
//! `min_u 1/2 ||y - Au||² + lambda ||u||_1` by the homotopy method:
//! start at `lambda_0 = ||Aᵀy||_inf` with `u = 0` and decrease lambda,
//! re-solving the active-set system at every breakpoint. Includes a
//! brute-force sign-pattern oracle, subgradient verification, interpolation
//! between breakpoints, and the monotone-growth audit.

use crate::error::{Error, Result};
use crate::matrix::{
    cholesky, gram, norm1, norm2_sq, norm_inf, principal_submatrix, spd_pivot_floor, DenseMatrix,
    IndexSet,
};

/// An instance: dictionary `A` (m x n) and observation `y` (length m).
#[derive(Debug, Clone)]
pub struct LassoProblem {
    a: DenseMatrix,
    y: Vec<f64>,
}

impl LassoProblem {
    pub fn new(a: DenseMatrix, y: Vec<f64>) -> Result<Self> {
        if y.len() != a.rows() {
            return Err(Error::Dimension(format!(
                "dictionary has {} rows, observation has length {}",
                a.rows(),
                y.len()
            )));
        }
        if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite observation entry {bad}"
            )));
        }
        Ok(Self { a, y })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// `Aᵀy`, the correlation of each column with the observation.
    pub fn correlations(&self) -> Vec<f64> {
        self.a.matvec_t(&self.y).expect("dimensions checked at construction")
    }

    fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        let au = self.a.matvec(u)?;
        Ok(self.y.iter().zip(&au).map(|(yi, vi)| yi - vi).collect())
    }
}

/// What happened at a breakpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    /// Path start at `lambda_0` with `u = 0`.
    Start,
    /// Index entered the active set.
    Add(usize),
    /// Active coefficient crossed zero and left the active set.
    Remove(usize),
    /// Simultaneous events at one lambda; removals listed first.
    Multi(Vec<Event>),
    /// Path end at lambda 0 (or the configured early stop).
    End,
}

impl Event {
    /// Indices removed by this event, including inside `Multi`.
    pub fn removed_indices(&self) -> Vec<usize> {
        match self {
            Event::Remove(i) => vec![*i],
            Event::Multi(evs) => evs.iter().flat_map(|e| e.removed_indices()).collect(),
            _ => vec![],
        }
    }
}

impl std::fmt::Display for Event {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Event::Start => f.write_str("start"),
            Event::Add(i) => write!(f, "add({i})"),
            Event::Remove(i) => write!(f, "remove({i})"),
            Event::Multi(evs) => {
                f.write_str("multi(")?;
                for (k, e) in evs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
            Event::End => f.write_str("end"),
        }
    }
}

impl std::str::FromStr for Event {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "start" => return Ok(Event::Start),
            "end" => return Ok(Event::End),
            _ => {}
        }
        let index_arg = |s: &str, head: &str| -> Result<usize> {
            s.strip_prefix(head)
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|r| r.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad event token {s:?}")))
        };
        if s.starts_with("add(") {
            return Ok(Event::Add(index_arg(s, "add(")?));
        }
        if s.starts_with("remove(") {
            return Ok(Event::Remove(index_arg(s, "remove(")?));
        }
        if let Some(inner) = s.strip_prefix("multi(").and_then(|r| r.strip_suffix(')')) {
            let evs = inner
                .split(';')
                .map(|t| t.parse())
                .collect::<Result<Vec<Event>>>()?;
            if evs.is_empty() {
                return Err(Error::Parse("empty multi event".into()));
            }
            return Ok(Event::Multi(evs));
        }
        Err(Error::Parse(format!("unknown event token {s:?}")))
    }
}

/// One vertex of the piecewise-linear path. `active` and `signs` describe
/// the support of `u` at this exact lambda; a coefficient that enters at
/// this breakpoint still sits at zero and is not yet part of it.
#[derive(Debug, Clone)]
pub struct Breakpoint {
    pub lambda: f64,
    pub u: Vec<f64>,
    pub active: IndexSet,
    pub signs: Vec<f64>,
    pub event: Event,
}

fn support_of(u: &[f64]) -> (IndexSet, Vec<f64>) {
    let mut idx = Vec::new();
    let mut signs = Vec::new();
    for (i, v) in u.iter().enumerate() {
        if *v != 0.0 {
            idx.push(i);
            signs.push(v.signum());
        }
    }
    (IndexSet::new(idx).expect("increasing by construction"), signs)
}

impl Breakpoint {
    /// Builds a breakpoint from a coefficient vector, deriving the support
    /// and signs from the nonzero entries. Used when reassembling a path
    /// from its CSV form.
    pub fn new(lambda: f64, u: Vec<f64>, event: Event) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "breakpoint lambda must be finite and nonnegative, got {lambda}"
            )));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "breakpoint coefficients must be finite".into(),
            ));
        }
        let (active, signs) = support_of(&u);
        Ok(Self {
            lambda,
            u,
            active,
            signs,
            event,
        })
    }
}

/// The whole path: breakpoints in non-increasing lambda order (ties enter
/// through zero-length segments), affine in lambda between consecutive
/// breakpoints.
#[derive(Debug, Clone)]
pub struct SolutionPath {
    problem: LassoProblem,
    breakpoints: Vec<Breakpoint>,
}

/// Solver options.
#[derive(Debug, Clone)]
pub struct PathOpts {
    /// Stop the path at this lambda instead of 0.
    pub lambda_min: f64,
    /// Cycle guard; defaults to `10n + 10`.
    pub max_breakpoints: Option<usize>,
}

impl Default for PathOpts {
    fn default() -> Self {
        Self {
            lambda_min: 0.0,
            max_breakpoints: None,
        }
    }
}

impl SolutionPath {
    pub(crate) fn from_parts(problem: LassoProblem, breakpoints: Vec<Breakpoint>) -> Self {
        Self {
            problem,
            breakpoints,
        }
    }

    pub fn problem(&self) -> &LassoProblem {
        &self.problem
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    /// First breakpoint's lambda, i.e. `||Aᵀy||_inf`.
    pub fn lambda_start(&self) -> f64 {
        self.breakpoints[0].lambda
    }

    /// Last breakpoint's lambda (0 unless the path stopped early).
    pub fn lambda_end(&self) -> f64 {
        self.breakpoints.last().expect("nonempty").lambda
    }

    /// Evaluates the path at any lambda at or above the final breakpoint:
    /// the breakpoint value when lambda hits one exactly, the zero vector
    /// at and above the starting lambda, linear interpolation in between.
    pub fn eval(&self, lambda: f64) -> Result<Vec<f64>> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "lambda must be finite and nonnegative, got {lambda}"
            )));
        }
        let bps = &self.breakpoints;
        if lambda >= bps[0].lambda {
            return Ok(bps[0].u.clone());
        }
        if lambda < self.lambda_end() {
            return Err(Error::OutOfRange(format!(
                "lambda {lambda} is below the final breakpoint {}",
                self.lambda_end()
            )));
        }
        let k = bps
            .iter()
            .position(|bp| bp.lambda <= lambda)
            .expect("final breakpoint covers this lambda");
        let lo = &bps[k];
        if k == 0 || lo.lambda == lambda {
            return Ok(lo.u.clone());
        }
        let hi = &bps[k - 1];
        let t = (lambda - lo.lambda) / (hi.lambda - lo.lambda);
        Ok(lo
            .u
            .iter()
            .zip(&hi.u)
            .map(|(ulo, uhi)| ulo + t * (uhi - ulo))
            .collect())
    }

    /// `(||u||_1, ||y - Au||²)` per breakpoint, the trade-off curve traced
    /// by the path.
    pub fn pareto(&self) -> Vec<(f64, f64)> {
        self.breakpoints
            .iter()
            .map(|bp| {
                let r = self.problem.residual(&bp.u).expect("path dimensions");
                (norm1(&bp.u), norm2_sq(&r))
            })
            .collect()
    }
}

enum Candidate {
    Remove(usize),
    Add(usize, f64),
}

/// Runs the homotopy loop. Per segment the active-set system
/// `Psi u_on = b_on - lambda s_on` (with `Psi` the active block of `AᵀA`
/// and `b = Aᵀy`) gives `u_on(lambda) = w - lambda d`; the next breakpoint
/// is the largest lambda below the current one at which either an inactive
/// correlation hits the boundary (add) or an active coefficient crosses
/// zero (remove). Fresh factorization per segment; no downdating.
pub fn solve_path(p: &LassoProblem, opts: &PathOpts) -> Result<SolutionPath> {
    let a = &p.a;
    let n = a.cols();
    for j in 0..n {
        if (0..a.rows()).all(|i| a.get(i, j) == 0.0) {
            return Err(Error::DegenerateColumn { index: j });
        }
    }
    if !(opts.lambda_min >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda_min must be nonnegative, got {}",
            opts.lambda_min
        )));
    }
    let g = gram(a);
    let b = p.correlations();
    let lambda0 = norm_inf(&b);
    let lower = opts.lambda_min;
    let empty = |lambda: f64, event: Event| Breakpoint {
        lambda,
        u: vec![0.0; n],
        active: IndexSet::new(vec![]).expect("empty"),
        signs: vec![],
        event,
    };

    // Degenerate starts: y orthogonal to every column (lambda_0 = 0), or an
    // early stop at/above lambda_0. Either way the path is a single vertex.
    if lambda0 == 0.0 || lower >= lambda0 {
        let bps = vec![empty(lambda0, Event::Start)];
        return Ok(SolutionPath::from_parts(p.clone(), bps));
    }

    let tie = 1e-12 * lambda0;
    let max_bp = opts.max_breakpoints.unwrap_or(10 * n + 10);
    let mut bps = vec![empty(lambda0, Event::Start)];

    // Active set kept sorted; signs aligned with it. Ties at lambda_0 enter
    // one per (zero-length) segment, smallest index first.
    let first = (0..n)
        .max_by(|&i, &j| {
            b[i].abs()
                .partial_cmp(&b[j].abs())
                .expect("finite")
                .then(j.cmp(&i))
        })
        .expect("n >= 1");
    let mut act: Vec<usize> = vec![first];
    let mut sgn: Vec<f64> = vec![b[first].signum()];
    let mut lambda = lambda0;
    // Indices removed at some lambda may not re-enter at (essentially) the
    // same lambda; without this the remove/add pair would cycle in place.
    let mut banned: Vec<(usize, f64)> = Vec::new();

    loop {
        if bps.len() > max_bp {
            return Err(Error::CycleGuard(format!(
                "exceeded {max_bp} breakpoints at lambda {lambda}; the instance is degenerate"
            )));
        }

        // Segment direction: u_on(lambda) = w - lambda d on the active set.
        let (w, d) = if act.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            let set = IndexSet::new(act.clone()).expect("sorted");
            let psi = principal_submatrix(&g, &set)?;
            let ch = cholesky(&psi, spd_pivot_floor(&psi)).map_err(|e| {
                Error::Singular(format!("active-set system for indices {act:?}: {e}"))
            })?;
            let b_on: Vec<f64> = act.iter().map(|&i| b[i]).collect();
            (ch.solve(&b_on)?, ch.solve(&sgn)?)
        };

        let mut cands: Vec<(f64, Candidate)> = Vec::new();
        for (pos, &i) in act.iter().enumerate() {
            if d[pos] != 0.0 {
                let lr = w[pos] / d[pos];
                if lr > lower + tie && lr < lambda - tie {
                    cands.push((lr, Candidate::Remove(i)));
                }
            }
        }
        for j in 0..n {
            if act.binary_search(&j).is_ok() {
                continue;
            }
            let mut gw = 0.0;
            let mut gd = 0.0;
            for (pos, &i) in act.iter().enumerate() {
                gw += g.get(j, i) * w[pos];
                gd += g.get(j, i) * d[pos];
            }
            // Inactive correlation c_j(lambda) = p_j + lambda q_j must stay
            // inside [-lambda, lambda]; solve for both boundary hits.
            let pj = b[j] - gw;
            let qj = gd;
            for (root, sign) in [(pj / (1.0 - qj), 1.0), (-pj / (1.0 + qj), -1.0)] {
                if !root.is_finite() {
                    continue;
                }
                if root > lower + tie && root <= lambda + tie {
                    let clamped = root.min(lambda);
                    if banned
                        .iter()
                        .any(|&(bi, bl)| bi == j && (clamped - bl).abs() <= tie)
                    {
                        continue;
                    }
                    cands.push((clamped, Candidate::Add(j, sign)));
                }
            }
        }

        let assemble = |at: f64| -> Vec<f64> {
            let mut u = vec![0.0; n];
            for (pos, &i) in act.iter().enumerate() {
                u[i] = w[pos] - at * d[pos];
            }
            u
        };

        let best = cands
            .iter()
            .map(|c| c.0)
            .fold(f64::NEG_INFINITY, f64::max);
        if cands.is_empty() {
            let u = assemble(lower);
            let (active, signs) = support_of(&u);
            bps.push(Breakpoint {
                lambda: lower,
                u,
                active,
                signs,
                event: Event::End,
            });
            break;
        }

        // Everything within the tie window of the best candidate fires now.
        let mut removals: Vec<usize> = Vec::new();
        let mut adds: Vec<(usize, f64)> = Vec::new();
        for (lam, c) in &cands {
            if *lam >= best - tie {
                match c {
                    Candidate::Remove(i) => removals.push(*i),
                    Candidate::Add(j, s) => {
                        if !adds.iter().any(|(jj, _)| jj == j) {
                            adds.push((*j, *s));
                        }
                    }
                }
            }
        }
        removals.sort_unstable();
        removals.dedup();
        adds.sort_unstable_by_key(|(j, _)| *j);

        let mut u = assemble(best);
        let event = if removals.is_empty() {
            // Pure additions enter one at a time; the remaining tied
            // indices fire on the following zero-length segments.
            adds.truncate(1);
            Event::Add(adds[0].0)
        } else {
            for &i in &removals {
                u[i] = 0.0;
            }
            let mut evs: Vec<Event> = removals.iter().map(|&i| Event::Remove(i)).collect();
            evs.extend(adds.iter().map(|&(j, _)| Event::Add(j)));
            if evs.len() == 1 {
                evs.pop().expect("one event")
            } else {
                Event::Multi(evs)
            }
        };

        let (active, signs) = support_of(&u);
        bps.push(Breakpoint {
            lambda: best,
            u,
            active,
            signs,
            event,
        });

        for &i in &removals {
            let pos = act.binary_search(&i).expect("removal is active");
            act.remove(pos);
            sgn.remove(pos);
            banned.push((i, best));
        }
        for &(j, s) in &adds {
            let pos = act.binary_search(&j).expect_err("addition is inactive");
            act.insert(pos, j);
            sgn.insert(pos, s);
        }
        lambda = best;
    }

    Ok(SolutionPath::from_parts(p.clone(), bps))
}

/// Stationarity test for lambda > 0: on the support the correlation must
/// equal `lambda * sign(u_i)`, off it stay within `[-lambda, lambda]`, both
/// up to `tol`. Entries with `|u_i| <= tol` are treated as off-support.
pub fn subgradient_check(p: &LassoProblem, lambda: f64, u: &[f64], tol: f64) -> Result<bool> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(
            "lambda must be positive; use least_squares_check at lambda = 0".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if u.len() != p.a.cols() {
        return Err(Error::Dimension(format!(
            "u has length {}, dictionary has {} columns",
            u.len(),
            p.a.cols()
        )));
    }
    let r = p.residual(u)?;
    let c = p.a.matvec_t(&r)?;
    for (i, ci) in c.iter().enumerate() {
        let ok = if u[i].abs() > tol {
            (ci - lambda * u[i].signum()).abs() <= tol
        } else {
            ci.abs() <= lambda + tol
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// End-of-path test at lambda = 0: the normal-equation residual
/// `||Aᵀ(y - Au)||_inf` must be below `tol`.
pub fn least_squares_check(p: &LassoProblem, u: &[f64], tol: f64) -> Result<bool> {
    if u.len() != p.a.cols() {
        return Err(Error::Dimension(format!(
            "u has length {}, dictionary has {} columns",
            u.len(),
            p.a.cols()
        )));
    }
    let r = p.residual(u)?;
    Ok(norm_inf(&p.a.matvec_t(&r)?) <= tol)
}

/// Brute-force reference solver: enumerates sign patterns over all supports
/// (masks in increasing binary order, sign choices per support), solves the
/// on-support stationarity system, and accepts the first pattern whose
/// solution matches its own signs and keeps every off-support correlation
/// within `lambda` (plus a small numeric slack). Exponential; guarded at
/// n <= 14.
pub fn oracle_solve(p: &LassoProblem, lambda: f64) -> Result<Vec<f64>> {
    let n = p.a.cols();
    if n > 14 {
        return Err(Error::CostGuard(format!(
            "oracle enumeration is exponential; refusing n = {n} > 14"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "oracle needs lambda > 0, got {lambda}"
        )));
    }
    let g = gram(&p.a);
    let b = p.correlations();
    let slack = 1e-9 * 1.0f64.max(lambda).max(norm_inf(&b));
    let mut nearest: Option<(f64, String)> = None;
    let mut note_miss = |viol: f64, what: String| {
        if nearest.as_ref().map_or(true, |(v, _)| viol < *v) {
            nearest = Some((viol, what));
        }
    };

    for mask in 0u32..(1u32 << n) {
        let sup: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if sup.is_empty() {
            let worst = norm_inf(&b);
            if worst <= lambda + slack {
                return Ok(vec![0.0; n]);
            }
            note_miss(worst - lambda, "empty support".into());
            continue;
        }
        let set = IndexSet::new(sup.clone()).expect("increasing");
        let psi = principal_submatrix(&g, &set)?;
        let ch = match cholesky(&psi, spd_pivot_floor(&psi)) {
            Ok(c) => c,
            Err(_) => continue, // rank-deficient support; skip
        };
        let k = sup.len();
        for smask in 0u32..(1u32 << k) {
            let signs: Vec<f64> = (0..k)
                .map(|t| if smask >> t & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            let rhs: Vec<f64> = sup
                .iter()
                .zip(&signs)
                .map(|(&i, s)| b[i] - lambda * s)
                .collect();
            let u_on = ch.solve(&rhs)?;
            let sign_margin = u_on
                .iter()
                .zip(&signs)
                .map(|(ui, si)| ui * si)
                .fold(f64::INFINITY, f64::min);
            if !(sign_margin > 0.0) {
                note_miss(-sign_margin, format!("support {sup:?}: sign mismatch"));
                continue;
            }
            let mut worst_off = 0.0f64;
            for j in 0..n {
                if mask >> j & 1 == 1 {
                    continue;
                }
                let mut cj = b[j];
                for (pos, &i) in sup.iter().enumerate() {
                    cj -= g.get(j, i) * u_on[pos];
                }
                worst_off = worst_off.max(cj.abs());
            }
            if worst_off <= lambda + slack {
                let mut u = vec![0.0; n];
                for (pos, &i) in sup.iter().enumerate() {
                    u[i] = u_on[pos];
                }
                return Ok(u);
            }
            note_miss(
                worst_off - lambda,
                format!("support {sup:?}: off-support correlation {worst_off}"),
            );
        }
    }
    let detail = nearest
        .map(|(v, s)| format!("{s} (violation {v:.3e})"))
        .unwrap_or_else(|| "no candidate came close".into());
    Err(Error::OracleFailure(format!(
        "no sign pattern satisfied stationarity at lambda {lambda}; nearest miss: {detail}"
    )))
}

/// A single monotonicity violation found by the audit.
#[derive(Debug, Clone)]
pub enum AuditIssue {
    RemoveEvent {
        breakpoint: usize,
        lambda: f64,
        index: usize,
    },
    CardinalityDrop {
        breakpoint: usize,
        from: usize,
        to: usize,
    },
    MagnitudeGrowth {
        segment: usize,
        index: usize,
        at_high_lambda: f64,
        at_low_lambda: f64,
    },
}

impl std::fmt::Display for AuditIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AuditIssue::RemoveEvent {
                breakpoint,
                lambda,
                index,
            } => write!(
                f,
                "breakpoint {breakpoint} (lambda {lambda}): coefficient {index} removed"
            ),
            AuditIssue::CardinalityDrop {
                breakpoint,
                from,
                to,
            } => write!(
                f,
                "breakpoint {breakpoint}: support cardinality dropped {from} -> {to}"
            ),
            AuditIssue::MagnitudeGrowth {
                segment,
                index,
                at_high_lambda,
                at_low_lambda,
            } => write!(
                f,
                "segment {segment}, coefficient {index}: |u| grew with lambda ({at_low_lambda} at the low end, {at_high_lambda} at the high end)"
            ),
        }
    }
}

/// Verdicts of [`monotonicity_audit`].
#[derive(Debug, Clone)]
pub struct AuditReport {
    /// No remove events and no support-cardinality drop across breakpoints.
    pub cardinality_monotone: bool,
    /// Per segment and coefficient, `|u_i|` never increases with lambda.
    pub magnitude_monotone: bool,
    pub issues: Vec<AuditIssue>,
}

/// Checks the two monotone-growth statements on a computed path:
/// cardinality (the active set only grows as lambda decreases) and
/// magnitude (each `|u_i|` shrinks as lambda grows, segment by segment).
/// Informational: a path with removals is still a correct solution path.
pub fn monotonicity_audit(path: &SolutionPath) -> AuditReport {
    let bps = path.breakpoints();
    let mut issues = Vec::new();

    for (k, bp) in bps.iter().enumerate() {
        for index in bp.event.removed_indices() {
            issues.push(AuditIssue::RemoveEvent {
                breakpoint: k,
                lambda: bp.lambda,
                index,
            });
        }
    }
    for k in 1..bps.len() {
        let (from, to) = (bps[k - 1].active.len(), bps[k].active.len());
        if to < from {
            issues.push(AuditIssue::CardinalityDrop {
                breakpoint: k,
                from,
                to,
            });
        }
    }
    let cardinality_monotone = issues.is_empty();

    let mut magnitude_monotone = true;
    for k in 1..bps.len() {
        let (hi, lo) = (&bps[k - 1], &bps[k]);
        if !(hi.lambda > lo.lambda) {
            continue; // zero-length segment
        }
        let scale = 1.0 + norm_inf(&hi.u).max(norm_inf(&lo.u));
        let tol = 1e-9 * scale;
        for i in 0..hi.u.len() {
            let (uh, ul) = (hi.u[i], lo.u[i]);
            if uh.abs() <= tol && ul.abs() <= tol {
                continue;
            }
            let grew = if uh * ul < 0.0 && uh.abs() > tol && ul.abs() > tol {
                // Sign change inside a segment: |u_i| passed through zero,
                // so it cannot be monotone there.
                true
            } else {
                let sref = if ul != 0.0 { ul.signum() } else { uh.signum() };
                sref * (uh - ul) > tol
            };
            if grew {
                magnitude_monotone = false;
                issues.push(AuditIssue::MagnitudeGrowth {
                    segment: k,
                    index: i,
                    at_high_lambda: uh,
                    at_low_lambda: ul,
                });
            }
        }
    }

    AuditReport {
        cardinality_monotone,
        magnitude_monotone,
        issues,
    }
}

/// Direct fixed-support solve of the stationarity system at one lambda,
/// given the active set and signs of the surrounding segment. Used to
/// cross-check interpolated path values.
pub fn fixed_support_solve(
    p: &LassoProblem,
    active: &IndexSet,
    signs: &[f64],
    lambda: f64,
) -> Result<Vec<f64>> {
    if active.len() != signs.len() {
        return Err(Error::Dimension("active set and signs differ in length".into()));
    }
    let n = p.a.cols();
    let mut u = vec![0.0; n];
    if active.is_empty() {
        return Ok(u);
    }
    let g = gram(&p.a);
    let b = p.correlations();
    let psi = principal_submatrix(&g, active)?;
    let ch = cholesky(&psi, spd_pivot_floor(&psi))?;
    let rhs: Vec<f64> = active
        .indices()
        .iter()
        .zip(signs)
        .map(|(&i, s)| b[i] - lambda * s)
        .collect();
    let u_on = ch.solve(&rhs)?;
    for (pos, &i) in active.indices().iter().enumerate() {
        u[i] = u_on[pos];
    }
    Ok(u)
}

/// Outcome of [`verify_path`].
#[derive(Debug, Clone)]
pub struct PathVerification {
    pub ok: bool,
    pub failures: Vec<String>,
}

/// Re-verifies a path (typically one parsed back from its CSV form) against
/// the problem data: the starting lambda must equal `||Aᵀy||_inf` with zero
/// coefficients there, lambdas must be non-increasing, and every breakpoint
/// plus three interior points per segment must satisfy the optimality
/// conditions at their lambda. `tol` is relative; it is scaled by
/// `1 + ||Aᵀy||_inf` before use.
pub fn verify_path(path: &SolutionPath, tol: f64) -> Result<PathVerification> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let p = path.problem();
    let bps = path.breakpoints();
    let mut failures = Vec::new();
    if bps.is_empty() {
        return Ok(PathVerification {
            ok: false,
            failures: vec!["path has no breakpoints".into()],
        });
    }

    let lambda0 = norm_inf(&p.correlations());
    let abs_tol = tol * (1.0 + lambda0);
    if (bps[0].lambda - lambda0).abs() > abs_tol {
        failures.push(format!(
            "breakpoint 0: path starts at lambda {} but ||A'y||_inf is {lambda0}",
            bps[0].lambda
        ));
    }
    if norm_inf(&bps[0].u) > abs_tol {
        failures.push("breakpoint 0: coefficients are not zero at the start".into());
    }
    for k in 1..bps.len() {
        if bps[k].lambda > bps[k - 1].lambda {
            failures.push(format!(
                "breakpoint {k}: lambda increased ({} -> {})",
                bps[k - 1].lambda,
                bps[k].lambda
            ));
        }
    }

    for (k, bp) in bps.iter().enumerate() {
        let good = if bp.lambda > 0.0 {
            subgradient_check(p, bp.lambda, &bp.u, abs_tol)?
        } else {
            least_squares_check(p, &bp.u, abs_tol)?
        };
        if !good {
            failures.push(format!(
                "breakpoint {k} (lambda {}): optimality conditions fail",
                bp.lambda
            ));
        }
    }

    // Affinity between breakpoints: spot-check interpolated points.
    for k in 1..bps.len() {
        let (hi, lo) = (bps[k - 1].lambda, bps[k].lambda);
        if !(hi > lo) {
            continue;
        }
        for frac in [0.25, 0.5, 0.75] {
            let lambda = lo + frac * (hi - lo);
            if !(lambda > 0.0) {
                continue;
            }
            let u = path.eval(lambda)?;
            if !subgradient_check(p, lambda, &u, abs_tol)? {
                failures.push(format!(
                    "segment into breakpoint {k}: interpolation at lambda {lambda} fails the optimality conditions"
                ));
            }
        }
    }

    Ok(PathVerification {
        ok: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn scalar_problem() -> LassoProblem {
        LassoProblem::new(mat(&[&[1.0]]), vec![3.0]).unwrap()
    }

    #[test]
    fn scalar_path_is_soft_threshold() {
        // The first entering index is part of the Start vertex, so the
        // whole path is two breakpoints.
        let path = solve_path(&scalar_problem(), &PathOpts::default()).unwrap();
        let bps = path.breakpoints();
        assert_eq!(bps.len(), 2);
        assert_eq!(bps[0].lambda, 3.0);
        assert_eq!(bps[0].u, vec![0.0]);
        assert!(matches!(bps[0].event, Event::Start));
        assert_eq!(bps[1].lambda, 0.0);
        assert!((bps[1].u[0] - 3.0).abs() < 1e-12);
        assert!(matches!(bps[1].event, Event::End));
        // u(lambda) = 3 - lambda on [0, 3].
        let u = path.eval(1.25).unwrap();
        assert!((u[0] - 1.75).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_path_soft_thresholds_each_coefficient() {
        let p = LassoProblem::new(DenseMatrix::identity(3), vec![3.0, -1.0, 2.0]).unwrap();
        let path = solve_path(&p, &PathOpts::default()).unwrap();
        // Start at lambda = 3 (index 0 enters there), adds at 2 and 1, End
        // at 0; no removals.
        assert_eq!(path.lambda_start(), 3.0);
        let add_lambdas: Vec<f64> = path
            .breakpoints()
            .iter()
            .filter(|bp| matches!(bp.event, Event::Add(_)))
            .map(|bp| bp.lambda)
            .collect();
        assert_eq!(add_lambdas, vec![2.0, 1.0]);
        for lam in [0.0, 0.4, 1.1, 2.5, 2.9, 3.5] {
            let u = path.eval(lam).unwrap();
            let expect: Vec<f64> = [3.0f64, -1.0, 2.0]
                .iter()
                .map(|v| v.signum() * (v.abs() - lam).max(0.0))
                .collect();
            for (a, b) in u.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-10, "lambda {lam}: {u:?} vs {expect:?}");
            }
        }
        let audit = monotonicity_audit(&path);
        assert!(audit.cardinality_monotone && audit.magnitude_monotone);
    }

    #[test]
    fn zero_observation_gives_single_vertex() {
        let p = LassoProblem::new(DenseMatrix::identity(2), vec![0.0, 0.0]).unwrap();
        let path = solve_path(&p, &PathOpts::default()).unwrap();
        assert_eq!(path.breakpoints().len(), 1);
        assert_eq!(path.lambda_start(), 0.0);
        assert_eq!(path.eval(0.0).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn tied_maximal_correlations_enter_by_index() {
        // Two orthogonal columns with equal correlation 2: index 0 claims
        // the Start vertex, index 1 follows through a zero-length segment
        // at the same lambda.
        let p = LassoProblem::new(DenseMatrix::identity(2), vec![2.0, 2.0]).unwrap();
        let path = solve_path(&p, &PathOpts::default()).unwrap();
        let bps = path.breakpoints();
        assert_eq!(bps.len(), 3);
        assert!(matches!(bps[0].event, Event::Start));
        assert!(matches!(bps[1].event, Event::Add(1)));
        assert_eq!(bps[0].lambda, bps[1].lambda);
        assert!(matches!(bps[2].event, Event::End));
        let u = path.eval(1.0).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-12 && (u[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_min_truncates_path() {
        let path = solve_path(
            &scalar_problem(),
            &PathOpts {
                lambda_min: 1.0,
                ..PathOpts::default()
            },
        )
        .unwrap();
        assert_eq!(path.lambda_end(), 1.0);
        assert!((path.eval(1.0).unwrap()[0] - 2.0).abs() < 1e-12);
        assert!(matches!(path.eval(0.5), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn zero_column_is_rejected() {
        let p = LassoProblem::new(mat(&[&[1.0, 0.0], &[0.0, 0.0]]), vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            solve_path(&p, &PathOpts::default()),
            Err(Error::DegenerateColumn { index: 1 })
        ));
    }

    #[test]
    fn subgradient_check_examples() {
        let p = LassoProblem::new(mat(&[&[1.0, 0.0], &[0.0, 1.0]]), vec![2.0, 1.0]).unwrap();
        let lam0 = 2.0;
        assert!(subgradient_check(&p, lam0, &[0.0, 0.0], 1e-10).unwrap());
        assert!(subgradient_check(&p, 3.0, &[0.0, 0.0], 1e-10).unwrap());
        assert!(!subgradient_check(&p, 0.5 * lam0, &[0.0, 0.0], 1e-10).unwrap());
        let scalar = scalar_problem();
        assert!(subgradient_check(&scalar, 1.0, &[2.0], 1e-10).unwrap());
        assert!(matches!(
            subgradient_check(&scalar, 0.0, &[3.0], 1e-10),
            Err(Error::InvalidArgument(_))
        ));
        assert!(least_squares_check(&scalar, &[3.0], 1e-10).unwrap());
    }

    #[test]
    fn oracle_matches_soft_threshold() {
        let p = LassoProblem::new(mat(&[&[1.0, 0.0], &[0.0, 1.0]]), vec![2.0, 1.0]).unwrap();
        let u = oracle_solve(&p, 1.5).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-12);
        assert_eq!(u[1], 0.0);
        // Above lambda_0 the zero vector is optimal.
        assert_eq!(oracle_solve(&p, 2.5).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn oracle_approaches_least_squares_as_lambda_vanishes() {
        let a = mat(&[&[2.0, 0.5], &[0.5, 1.5]]);
        let p = LassoProblem::new(a.clone(), vec![1.0, 2.0]).unwrap();
        let u = oracle_solve(&p, 1e-9).unwrap();
        let exact = crate::matrix::invert_spd(&a)
            .unwrap()
            .matvec(&[1.0, 2.0])
            .unwrap();
        for (a, b) in u.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn eval_domain_checks() {
        let path = solve_path(&scalar_problem(), &PathOpts::default()).unwrap();
        assert_eq!(path.eval(6.0).unwrap(), vec![0.0]);
        assert_eq!(path.eval(3.0).unwrap(), vec![0.0]);
        assert!(path.eval(-1.0).is_err());
        // Midpoint of breakpoints (3, u=0) and (0, u=3).
        let u = path.eval(1.5).unwrap();
        assert!((u[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn event_tokens_round_trip() {
        let evs = [
            Event::Start,
            Event::Add(3),
            Event::Remove(12),
            Event::Multi(vec![Event::Remove(1), Event::Add(4)]),
            Event::End,
        ];
        for e in evs {
            let s = e.to_string();
            let back: Event = s.parse().unwrap();
            assert_eq!(back, e);
        }
        assert!("frobnicate".parse::<Event>().is_err());
        assert!("add(x)".parse::<Event>().is_err());
    }

    #[test]
    fn pareto_pairs_trade_off_monotonically() {
        let p = LassoProblem::new(
            mat(&[&[1.0, 0.2], &[0.1, 1.0], &[0.3, -0.4]]),
            vec![1.0, -2.0, 0.5],
        )
        .unwrap();
        let path = solve_path(&p, &PathOpts::default()).unwrap();
        let pairs = path.pareto();
        for w in pairs.windows(2) {
            assert!(w[1].0 >= w[0].0 - 1e-12); // ||u||_1 grows
            assert!(w[1].1 <= w[0].1 + 1e-12); // residual shrinks
        }
    }

    #[test]
    fn fixed_support_solve_matches_breakpoints() {
        let p = LassoProblem::new(
            mat(&[&[1.0, 0.3], &[0.2, 1.0], &[-0.1, 0.5]]),
            vec![1.0, 0.7, 0.2],
        )
        .unwrap();
        let path = solve_path(&p, &PathOpts::default()).unwrap();
        for bp in path.breakpoints() {
            if bp.lambda == 0.0 || bp.active.is_empty() {
                continue;
            }
            let direct = fixed_support_solve(&p, &bp.active, &bp.signs, bp.lambda).unwrap();
            for (a, b) in direct.iter().zip(&bp.u) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
