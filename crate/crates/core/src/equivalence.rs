//! Concrete equations: finite equivalence transformations and orbit tests
//! through the first-order invariant signature.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{ordered_pairs, Invariant};
use crate::symbolic::{diff_x, eval_numeric, is_zero, parse_expr, parse_expr_y, substitute, Expr, Point, Var};

/// Coefficients below this magnitude make a sample point inadmissible.
pub const COEFFICIENT_FLOOR: f64 = 1e-9;

/// Default sampling box `[1, 2]ⁿ`.
pub const DEFAULT_BOX: (f64, f64) = (1.0, 2.0);

const DERIVATIVE_PROBES: usize = 17;

/// The equation `Σ A_i(X) ∂U/∂x^i = 0`, given by its coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    n: usize,
    coeffs: Vec<Expr>,
}

#[derive(Serialize, Deserialize)]
struct EquationFile {
    n: usize,
    coeffs: Vec<String>,
}

impl Equation {
    /// Coefficients must be functions of `x^1..x^n` only and none may vanish
    /// identically.
    pub fn new(coeffs: Vec<Expr>) -> Result<Self> {
        let n = coeffs.len();
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        let mut out = Vec::with_capacity(n);
        for (k, c) in coeffs.into_iter().enumerate() {
            for v in c.tree_vars() {
                match v {
                    Var::X(i) if (i as usize) <= n => {}
                    other => {
                        return Err(Error::Input(format!("coefficient {} mentions `{other}`", k + 1)));
                    }
                }
            }
            let c = c.normalize()?;
            if is_zero(&c).zero {
                return Err(Error::Input(format!("coefficient A{} vanishes identically", k + 1)));
            }
            out.push(c);
        }
        Ok(Equation { n, coeffs: out })
    }

    pub fn parse(n: usize, coeffs: &[&str]) -> Result<Self> {
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch(n, coeffs.len()));
        }
        Equation::new(coeffs.iter().map(|s| parse_expr(s, n)).collect::<Result<_>>()?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: EquationFile = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        let refs: Vec<&str> = f.coeffs.iter().map(String::as_str).collect();
        Equation::parse(f.n, &refs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    /// Value of a jet coordinate on this equation: `A_{i,J} = ∂_J A_i`.
    pub fn jet_value(&self, v: &Var) -> Result<Expr> {
        let j = v.as_jet().ok_or_else(|| Error::InvalidArgument(format!("{v} is not a jet coordinate")))?;
        if j.max_index() > self.n {
            return Err(Error::IndexOutOfRange { index: j.max_index(), n: self.n });
        }
        let mut e = self.coeffs[j.base() - 1].clone();
        for d in j.dirs() {
            e = diff_x(&e, d)?;
        }
        Ok(e)
    }

    /// Substitutes the coefficients and their derivatives into a function of
    /// the jet coordinates.
    pub fn evaluate(&self, f: &Expr) -> Result<Expr> {
        let mut map = BTreeMap::new();
        for v in f.tree_vars() {
            if v.as_jet().is_some() {
                map.insert(v.clone(), self.jet_value(&v)?);
            }
        }
        substitute(f, &map)
    }

    /// Pairs `(i, j)` with `A_ij ≡ 0`.
    pub fn vanishing_pattern(&self) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        for (i, j) in ordered_pairs(self.n) {
            if is_zero(&self.jet_value(&Var::jet(i, &[j]))?).zero {
                out.push((i, j));
            }
        }
        out.sort();
        Ok(out)
    }
}

/// A componentwise change of variables `x^i = ψ^i(y^i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTransformation {
    n: usize,
    /// Components written in the `x` variables (`y^i` renamed to `x^i`).
    psi: Vec<Expr>,
    domains: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct TransformationFile {
    psi: Vec<String>,
    #[serde(default)]
    domains: Option<Vec<[f64; 2]>>,
}

impl PointTransformation {
    /// Component `i` may reference `y^i` only; `ψ^{i′}` must not vanish at
    /// probe points across the declared interval.
    pub fn new(psi: Vec<Expr>, domains: Vec<(f64, f64)>) -> Result<Self> {
        let n = psi.len();
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        if domains.len() != n {
            return Err(Error::DimensionMismatch(n, domains.len()));
        }
        for (k, c) in psi.iter().enumerate() {
            for v in c.tree_vars() {
                if v != Var::x(k + 1) {
                    return Err(Error::Input(format!("psi component {} mentions `{v}`", k + 1)));
                }
            }
        }
        for &(lo, hi) in &domains {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Input(format!("invalid domain [{lo}, {hi}]")));
            }
        }
        let t = PointTransformation { n, psi: psi.iter().map(Expr::normalize).collect::<Result<_>>()?, domains };
        t.check_derivatives()?;
        Ok(t)
    }

    pub fn parse(psi: &[&str], domains: Vec<(f64, f64)>) -> Result<Self> {
        let n = psi.len();
        PointTransformation::new(psi.iter().map(|s| parse_expr_y(s, n)).collect::<Result<_>>()?, domains)
    }

    pub fn identity(n: usize) -> Result<Self> {
        PointTransformation::new((1..=n).map(Expr::x).collect(), vec![DEFAULT_BOX; n])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: TransformationFile = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        let n = f.psi.len();
        let domains = match f.domains {
            Some(d) => d.into_iter().map(|[a, b]| (a, b)).collect(),
            None => vec![DEFAULT_BOX; n],
        };
        let refs: Vec<&str> = f.psi.iter().map(String::as_str).collect();
        PointTransformation::parse(&refs, domains)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let psi: Vec<String> = self
            .psi
            .iter()
            .enumerate()
            .map(|(k, c)| c.to_string().replace(&format!("x{}", k + 1), &format!("y{}", k + 1)))
            .collect();
        serde_json::json!({
            "psi": psi,
            "domains": self.domains.iter().map(|(a, b)| [a, b]).collect::<Vec<_>>(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Expr] {
        &self.psi
    }

    pub fn domains(&self) -> &[(f64, f64)] {
        &self.domains
    }

    /// `ψ^{i′}` as a function of `y^i` (written `x^i`).
    pub fn derivative(&self, i: usize) -> Result<Expr> {
        diff_x(&self.psi[i - 1], i)
    }

    fn check_derivatives(&self) -> Result<()> {
        for i in 1..=self.n {
            let d = self.derivative(i)?;
            let (lo, hi) = self.domains[i - 1];
            for k in 0..DERIVATIVE_PROBES {
                let y = lo + (hi - lo) * k as f64 / (DERIVATIVE_PROBES - 1) as f64;
                let point: Point = [(Var::x(i), y)].into();
                let v = eval_numeric(&d, &point)?;
                if v.is_nan() || v.abs() <= COEFFICIENT_FLOOR {
                    return Err(Error::ZeroDerivative { index: i, at: y });
                }
            }
        }
        Ok(())
    }

    /// `ψ(Y)` at a numeric point.
    pub fn map_point(&self, y: &[f64]) -> Result<Vec<f64>> {
        (0..self.n).map(|k| eval_numeric(&self.psi[k], &[(Var::x(k + 1), y[k])].into())).collect()
    }

    /// `θ∘φ` with components `θ^i(φ^i(y^i))`; applying `θ` then `φ` to an
    /// equation equals applying the composite. Domains are those of `φ`.
    pub fn compose(theta: &PointTransformation, phi: &PointTransformation) -> Result<PointTransformation> {
        if theta.n != phi.n {
            return Err(Error::DimensionMismatch(theta.n, phi.n));
        }
        let psi = (0..theta.n)
            .map(|k| {
                let map: BTreeMap<Var, Expr> = [(Var::x(k + 1), phi.psi[k].clone())].into();
                substitute(&theta.psi[k], &map)
            })
            .collect::<Result<_>>()?;
        PointTransformation::new(psi, phi.domains.clone())
    }
}

/// `B_j(Y) = A_j(ψ(Y)) / ψ^{j′}(y^j)`, returned in the `x` variables.
pub fn apply_transformation(eq: &Equation, psi: &PointTransformation) -> Result<Equation> {
    if eq.n != psi.n {
        return Err(Error::DimensionMismatch(eq.n, psi.n));
    }
    let map: BTreeMap<Var, Expr> = (1..=eq.n).map(|i| (Var::x(i), psi.psi[i - 1].clone())).collect();
    let coeffs = (1..=eq.n)
        .map(|j| Ok(&substitute(&eq.coeffs[j - 1], &map)? / &psi.derivative(j)?))
        .collect::<Result<Vec<_>>>()?;
    Equation::new(coeffs)
}

/// One entry of an invariant signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureEntry {
    pub i: usize,
    pub j: usize,
    /// `T_ij` evaluated on the equation, a function of `X`.
    pub value: Expr,
    pub vanishing: bool,
    /// The vanishing verdict came from the randomized zero test.
    pub probabilistic: bool,
}

/// `T_ij^A = A_ij A_j / A_i` for every ordered pair.
pub fn invariant_signature(eq: &Equation) -> Result<Vec<SignatureEntry>> {
    ordered_pairs(eq.n)
        .into_iter()
        .map(|(i, j)| {
            let value = eq.evaluate(&Invariant::t(i, j)?.expr)?;
            let z = is_zero(&value);
            Ok(SignatureEntry { i, j, value, vanishing: z.zero, probabilistic: z.probabilistic })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symbolic,
    Numeric,
}

/// Settings of the numeric comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampling {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { samples: 64, tol: 1e-9, seed: 0 }
    }
}

/// Per-pair evidence of an orbit comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairEvidence {
    pub i: usize,
    pub j: usize,
    /// Canonical `T^A − T^B` (symbolic mode).
    pub residual: Option<String>,
    /// Largest `|a − b| / (1 + |a|)` over the samples (numeric mode).
    pub max_deviation: Option<f64>,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitVerdict {
    pub equivalent: bool,
    pub mode: Mode,
    pub reason: String,
    pub pattern_a: Vec<(usize, usize)>,
    pub pattern_b: Vec<(usize, usize)>,
    pub pairs: Vec<PairEvidence>,
    /// `K_ij` comparison, reported without affecting the verdict.
    pub supplementary: Vec<PairEvidence>,
    /// Some zero test in the comparison was randomized.
    pub probabilistic: bool,
}

/// Same-chart orbit test: equal vanishing patterns and `T_ij^A(X) =
/// T_ij^B(X)` for every non-vanishing pair.
pub fn orbit_equivalent(a: &Equation, b: &Equation, mode: Mode, sampling: Sampling) -> Result<OrbitVerdict> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(a.n, b.n));
    }
    let sa = invariant_signature(a)?;
    let sb = invariant_signature(b)?;
    let pattern = |s: &[SignatureEntry]| s.iter().filter(|e| e.vanishing).map(|e| (e.i, e.j)).collect::<Vec<_>>();
    let (pattern_a, pattern_b) = (pattern(&sa), pattern(&sb));
    let mut probabilistic = sa.iter().chain(&sb).any(|e| e.probabilistic);
    let mut verdict = OrbitVerdict {
        equivalent: false,
        mode,
        reason: String::new(),
        pattern_a: pattern_a.clone(),
        pattern_b: pattern_b.clone(),
        pairs: Vec::new(),
        supplementary: Vec::new(),
        probabilistic,
    };
    if pattern_a != pattern_b {
        verdict.reason = "vanishing patterns differ".to_string();
        return Ok(verdict);
    }
    let live: Vec<(usize, usize)> = sa.iter().filter(|e| !e.vanishing).map(|e| (e.i, e.j)).collect();
    let t_pairs: Vec<(Expr, Expr)> =
        sa.iter().zip(&sb).filter(|(e, _)| !e.vanishing).map(|(x, y)| (x.value.clone(), y.value.clone())).collect();
    let k_pairs: Vec<(Expr, Expr)> = live
        .iter()
        .map(|&(i, j)| {
            let k = Invariant::k(i, j)?.expr;
            Ok((a.evaluate(&k)?, b.evaluate(&k)?))
        })
        .collect::<Result<_>>()?;

    let compare = |pairs: &[(Expr, Expr)], prob: &mut bool| -> Result<Vec<PairEvidence>> {
        match mode {
            Mode::Symbolic => live
                .iter()
                .zip(pairs)
                .map(|(&(i, j), (x, y))| {
                    let d = (x - y).normalize()?;
                    let z = is_zero(&d);
                    *prob |= z.probabilistic;
                    Ok(PairEvidence { i, j, residual: Some(d.to_string()), max_deviation: None, agree: z.zero })
                })
                .collect(),
            Mode::Numeric => {
                let devs = sample_deviations(a, b, pairs, sampling)?;
                Ok(live
                    .iter()
                    .zip(devs)
                    .map(|(&(i, j), dev)| PairEvidence {
                        i,
                        j,
                        residual: None,
                        max_deviation: Some(dev),
                        agree: dev <= sampling.tol,
                    })
                    .collect())
            }
        }
    };
    verdict.pairs = compare(&t_pairs, &mut probabilistic)?;
    let mut k_prob = false;
    verdict.supplementary = compare(&k_pairs, &mut k_prob)?;
    verdict.probabilistic = probabilistic;
    verdict.equivalent = verdict.pairs.iter().all(|p| p.agree);
    verdict.reason = if verdict.equivalent {
        if live.is_empty() {
            "all T_ij vanish for both equations".to_string()
        } else {
            "T_ij signatures agree".to_string()
        }
    } else {
        let bad: Vec<String> = verdict.pairs.iter().filter(|p| !p.agree).map(|p| format!("T{}{}", p.i, p.j)).collect();
        format!("signatures differ at {}", bad.join(", "))
    };
    Ok(verdict)
}

/// Random point in the box, admissible for both equations.
fn admissible_point(eqs: &[&Equation], boxes: &[(f64, f64)], rng: &mut ChaCha8Rng) -> Result<Point> {
    for _ in 0..1000 {
        let point: Point =
            boxes.iter().enumerate().map(|(k, &(lo, hi))| (Var::x(k + 1), rng.random_range(lo..hi))).collect();
        let ok = eqs
            .iter()
            .all(|eq| eq.coeffs.iter().all(|c| eval_numeric(c, &point).is_ok_and(|v| v.abs() >= COEFFICIENT_FLOOR)));
        if ok {
            return Ok(point);
        }
    }
    Err(Error::Inconsistency("no admissible sample point found".into()))
}

fn sample_deviations(a: &Equation, b: &Equation, pairs: &[(Expr, Expr)], s: Sampling) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let boxes = vec![DEFAULT_BOX; a.n];
    let mut worst = vec![0.0f64; pairs.len()];
    let mut taken = 0;
    let mut attempts = 0;
    while taken < s.samples.max(1) {
        attempts += 1;
        if attempts > 100 * s.samples.max(1) {
            return Err(Error::Inconsistency("too many inadmissible sample points".into()));
        }
        let point = admissible_point(&[a, b], &boxes, &mut rng)?;
        let vals: Result<Vec<(f64, f64)>> =
            pairs.iter().map(|(x, y)| Ok((eval_numeric(x, &point)?, eval_numeric(y, &point)?))).collect();
        let Ok(vals) = vals else { continue };
        for (w, (x, y)) in worst.iter_mut().zip(vals) {
            *w = w.max(relative_deviation(x, y));
        }
        taken += 1;
    }
    Ok(worst)
}

/// `|a − b| / (1 + |a|)`; non-finite values count as infinite deviation.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() / (1.0 + a.abs());
    if d.is_finite() {
        d
    } else {
        f64::INFINITY
    }
}

/// Pointwise comparison of invariants on an equation and its pushforward.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PushforwardReport {
    pub samples: usize,
    pub max_t_deviation: f64,
    pub max_k_deviation: f64,
    pub pattern_preserved: bool,
    pub consistent: bool,
}

/// Checks `F^B(Y) = F^A(ψ(Y))` for `F` among the `T_ij` and `K_ij`, where
/// `B` is the pushforward of `A` by `ψ`, at random `Y` in the domains of
/// `ψ`. Also compares the vanishing patterns of `A` and `B`.
pub fn pushforward_check(eq: &Equation, psi: &PointTransformation, sampling: Sampling) -> Result<PushforwardReport> {
    let b = apply_transformation(eq, psi)?;
    let pattern_preserved = eq.vanishing_pattern()? == b.vanishing_pattern()?;
    let live: Vec<(usize, usize)> = ordered_pairs(eq.n)
        .into_iter()
        .filter(|p| !eq.vanishing_pattern().map(|v| v.contains(p)).unwrap_or(false))
        .collect();
    let mut fs = Vec::new();
    for &(i, j) in &live {
        fs.push((true, Invariant::t(i, j)?.expr));
        fs.push((false, Invariant::k(i, j)?.expr));
    }
    let on_a: Vec<Expr> = fs.iter().map(|(_, f)| eq.evaluate(f)).collect::<Result<_>>()?;
    let on_b: Vec<Expr> = fs.iter().map(|(_, f)| b.evaluate(f)).collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let (mut max_t, mut max_k) = (0.0f64, 0.0f64);
    let mut taken = 0;
    let mut attempts = 0;
    while taken < sampling.samples.max(1) {
        attempts += 1;
        if attempts > 100 * sampling.samples.max(1) {
            return Err(Error::Inconsistency("too many inadmissible sample points".into()));
        }
        let y = admissible_point(&[&b], &psi.domains, &mut rng)?;
        let yv: Vec<f64> = (1..=eq.n).map(|k| y[&Var::x(k)]).collect();
        let xv = psi.map_point(&yv)?;
        let x: Point = xv.iter().enumerate().map(|(k, v)| (Var::x(k + 1), *v)).collect();
        if !eq.coeffs.iter().all(|c| eval_numeric(c, &x).is_ok_and(|v| v.abs() >= COEFFICIENT_FLOOR)) {
            continue;
        }
        let mut vals = Vec::with_capacity(fs.len());
        for (fa, fb) in on_a.iter().zip(&on_b) {
            match (eval_numeric(fa, &x), eval_numeric(fb, &y)) {
                (Ok(u), Ok(v)) => vals.push((u, v)),
                _ => break,
            }
        }
        if vals.len() != fs.len() {
            continue;
        }
        for ((is_t, _), (u, v)) in fs.iter().zip(vals) {
            let d = relative_deviation(u, v);
            if *is_t {
                max_t = max_t.max(d);
            } else {
                max_k = max_k.max(d);
            }
        }
        taken += 1;
    }
    let consistent = pattern_preserved && max_t <= sampling.tol && max_k <= sampling.tol;
    Ok(PushforwardReport {
        samples: taken,
        max_t_deviation: max_t,
        max_k_deviation: max_k,
        pattern_preserved,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(n: usize, c: &[&str]) -> Equation {
        Equation::parse(n, c).unwrap()
    }

    fn e(s: &str) -> Expr {
        parse_expr(s, 2).unwrap().normalize().unwrap()
    }

    #[test]
    fn constant_rescaling() {
        let psi = PointTransformation::parse(&["2*y1", "y2"], vec![DEFAULT_BOX; 2]).unwrap();
        let b = apply_transformation(&eq(2, &["1", "1"]), &psi).unwrap();
        assert_eq!(b.coeffs(), &[e("1/2"), e("1")]);
    }

    #[test]
    fn swap_coefficients() {
        let psi = PointTransformation::parse(&["y1", "2*y2"], vec![DEFAULT_BOX; 2]).unwrap();
        let b = apply_transformation(&eq(2, &["x2", "x1"]), &psi).unwrap();
        assert_eq!(b.coeffs(), &[e("2*x2"), e("x1/2")]);
    }

    #[test]
    fn identity_and_composition() {
        let a = eq(2, &["x1*x2 + 1", "x1^2"]);
        let id = PointTransformation::identity(2).unwrap();
        assert_eq!(apply_transformation(&a, &id).unwrap(), a);
        let theta = PointTransformation::parse(&["y1 + y1^3/3", "3*y2 - 1"], vec![DEFAULT_BOX; 2]).unwrap();
        let phi = PointTransformation::parse(&["2*y1 + 1", "y2^3 + y2"], vec![DEFAULT_BOX; 2]).unwrap();
        let stepwise = apply_transformation(&apply_transformation(&a, &theta).unwrap(), &phi).unwrap();
        let composite = apply_transformation(&a, &PointTransformation::compose(&theta, &phi).unwrap()).unwrap();
        assert_eq!(stepwise, composite);
    }

    #[test]
    fn rejects_bad_transformations() {
        assert!(matches!(
            PointTransformation::parse(&["y1^2", "y2"], vec![(-1.0, 1.0), DEFAULT_BOX]),
            Err(Error::ZeroDerivative { index: 1, .. })
        ));
        assert!(matches!(PointTransformation::parse(&["y2", "y2"], vec![DEFAULT_BOX; 2]), Err(Error::Input(_))));
        assert!(matches!(Equation::parse(2, &["x1 - x1", "1"]), Err(Error::Input(_))));
        assert!(matches!(Equation::parse(2, &["A1", "1"]), Err(Error::Input(_))));
    }

    #[test]
    fn signatures() {
        let s = invariant_signature(&eq(2, &["x2", "x1"])).unwrap();
        assert_eq!((s[0].i, s[0].j), (1, 2));
        assert_eq!(s[0].value, e("x1/x2"));
        assert_eq!(s[1].value, e("x2/x1"));
        let s = invariant_signature(&eq(2, &["exp(x1)", "1 + x2^2"])).unwrap();
        assert!(s.iter().all(|x| x.vanishing));
        let s = invariant_signature(&eq(2, &["1", "1"])).unwrap();
        assert!(s.iter().all(|x| x.vanishing && !x.probabilistic));
    }

    #[test]
    fn orbit_examples() {
        let one = eq(2, &["1", "1"]);
        let sep = eq(2, &["exp(x1)", "1 + x2^2"]);
        let swap = eq(2, &["x2", "x1"]);
        for mode in [Mode::Symbolic, Mode::Numeric] {
            assert!(orbit_equivalent(&sep, &one, mode, Sampling::default()).unwrap().equivalent);
            let v = orbit_equivalent(&swap, &one, mode, Sampling::default()).unwrap();
            assert!(!v.equivalent);
            assert_eq!(v.reason, "vanishing patterns differ");
            assert!(orbit_equivalent(&swap, &swap, mode, Sampling::default()).unwrap().equivalent);
        }
        let other = eq(2, &["x2", "2*x1"]);
        let v = orbit_equivalent(&swap, &other, Mode::Symbolic, Sampling::default()).unwrap();
        assert!(!v.equivalent);
        assert!(!orbit_equivalent(&swap, &other, Mode::Numeric, Sampling::default()).unwrap().equivalent);
    }

    #[test]
    fn pushforward_identity() {
        let a = eq(2, &["x2 + x1^2", "x1 * x2"]);
        let psi = PointTransformation::parse(&["exp(y1)", "y2 + y2^3/3"], vec![(0.2, 1.0), (0.5, 1.5)]).unwrap();
        let r = pushforward_check(&a, &psi, Sampling { samples: 20, tol: 1e-9, seed: 7 }).unwrap();
        assert!(r.consistent, "{r:?}");
        assert_eq!(r.samples, 20);
    }

    #[test]
    fn json_round_trip() {
        let a = Equation::from_json(r#"{"n": 2, "coeffs": ["x2", "exp(x1)"]}"#).unwrap();
        assert_eq!(Equation::from_json(&a.to_json().to_string()).unwrap(), a);
        let t = PointTransformation::from_json(r#"{"psi": ["2*y1", "y2^3 + y2"], "domains": [[1,2],[0,1]]}"#).unwrap();
        assert_eq!(PointTransformation::from_json(&t.to_json().to_string()).unwrap(), t);
        assert!(matches!(Equation::from_json("{"), Err(Error::Input(_))));
    }
}
