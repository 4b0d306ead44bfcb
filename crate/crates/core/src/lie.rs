//! Commutators, coefficient matrices, generic rank and completeness of
//! operator systems.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jet::DiffOperator;
use crate::symbolic::{gcd, Expr, Poly, RatFunc, Var};

/// Seed for the sampled rank confirmation.
pub const RANK_SEED: u64 = 0x00c0_ffee;

/// Number of random points used to confirm a symbolic rank.
pub const RANK_SAMPLES: usize = 3;

const SAMPLE_BOUND: i64 = 1_000_000;

/// `[P, Q] = P∘Q − Q∘P`.
pub fn commutator(p: &DiffOperator, q: &DiffOperator) -> Result<DiffOperator> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch(p.n(), q.n()));
    }
    if p.has_xi() || q.has_xi() {
        return Err(Error::FormalSymbols);
    }
    let targets: BTreeSet<&Var> = p.targets().chain(q.targets()).collect();
    let mut out = DiffOperator::zero(p.n());
    for v in targets {
        let qv = q.coefficient(v).cloned().unwrap_or_else(Expr::zero);
        let pv = p.coefficient(v).cloned().unwrap_or_else(Expr::zero);
        let c = &p.apply(&qv)? - &q.apply(&pv)?;
        out.add_term(v.clone(), &c)?;
    }
    Ok(out)
}

/// Coefficients of a list of operators against a declared column order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicMatrix {
    pub row_labels: Vec<String>,
    pub columns: Vec<Var>,
    pub entries: Vec<Vec<Expr>>,
}

impl SymbolicMatrix {
    pub fn nrows(&self) -> usize {
        self.entries.len()
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, r: usize, c: usize) -> &Expr {
        &self.entries[r][c]
    }

    /// Column subset, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> SymbolicMatrix {
        SymbolicMatrix {
            row_labels: self.row_labels.clone(),
            columns: cols.iter().map(|&c| self.columns[c].clone()).collect(),
            entries: self.entries.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rows": self.row_labels,
            "columns": self.columns.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "entries": self.entries.iter()
                .map(|row| row.iter().map(|e| e.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    /// Plain-text table with aligned columns.
    pub fn to_text(&self) -> String {
        let mut cells: Vec<Vec<String>> = Vec::with_capacity(self.nrows() + 1);
        let mut header = vec![String::new()];
        header.extend(self.columns.iter().map(|v| v.to_string()));
        cells.push(header);
        for (label, row) in self.row_labels.iter().zip(&self.entries) {
            let mut line = vec![label.clone()];
            line.extend(row.iter().map(|e| e.to_string()));
            cells.push(line);
        }
        let ncols = self.ncols() + 1;
        let widths: Vec<usize> =
            (0..ncols).map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}", w = *w)).collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    pub fn latex(&self) -> String {
        let rows: Vec<String> =
            self.entries.iter().map(|row| row.iter().map(Expr::latex).collect::<Vec<_>>().join(" & ")).collect();
        format!("\\begin{{pmatrix}}\n{}\n\\end{{pmatrix}}", rows.join(" \\\\\n"))
    }
}

/// Entry `(k, v)` is the coefficient of `∂/∂v` in operator `k`.
pub fn coefficient_matrix(ops: &[DiffOperator], coord_order: &[Var]) -> Result<SymbolicMatrix> {
    let index: BTreeMap<&Var, usize> = coord_order.iter().enumerate().map(|(k, v)| (v, k)).collect();
    let mut entries = Vec::with_capacity(ops.len());
    for op in ops {
        let mut row = vec![Expr::zero(); coord_order.len()];
        for (v, c) in op.terms() {
            let k = *index.get(v).ok_or_else(|| Error::MissingCoordinate(v.to_string()))?;
            row[k] = c.clone();
        }
        entries.push(row);
    }
    Ok(SymbolicMatrix {
        row_labels: (1..=ops.len()).map(|k| format!("op{k}")).collect(),
        columns: coord_order.to_vec(),
        entries,
    })
}

/// Columns covering every target of `ops`, in global order.
pub fn support(ops: &[DiffOperator]) -> Vec<Var> {
    let set: BTreeSet<Var> = ops.iter().flat_map(|o| o.targets().cloned()).collect();
    set.into_iter().collect()
}

/// Generic rank over the field of rational functions.
///
/// Rows are cleared of denominators and reduced by fraction-free (Bareiss)
/// elimination with sparsity-aware pivoting. The result is confirmed by
/// exact elimination at [`RANK_SAMPLES`] random integer points; any
/// disagreement is reported as [`Error::RankMismatch`].
pub fn symbolic_rank(m: &SymbolicMatrix) -> Result<usize> {
    symbolic_rank_seeded(m, RANK_SEED)
}

pub fn symbolic_rank_seeded(m: &SymbolicMatrix, seed: u64) -> Result<usize> {
    let rats = rat_rows(&m.entries)?;
    let symbolic = bareiss_rank(polynomial_rows(&rats));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANK_SAMPLES {
        let sampled = sampled_rank(&rats, &mut rng)?;
        if sampled != symbolic {
            return Err(Error::RankMismatch { symbolic, sampled });
        }
    }
    Ok(symbolic)
}

fn rat_rows(entries: &[Vec<Expr>]) -> Result<Vec<Vec<RatFunc>>> {
    entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    let r = e.rat()?;
                    if r.has_atoms() {
                        Err(Error::NotRational)
                    } else {
                        Ok(r.clone())
                    }
                })
                .collect()
        })
        .collect()
}

/// Multiplies each row by the lcm of its denominators.
fn polynomial_rows(rows: &[Vec<RatFunc>]) -> Vec<Vec<Poly>> {
    rows.iter()
        .map(|row| {
            let mut l = Poly::one();
            for r in row.iter().filter(|r| !r.is_zero()) {
                let g = gcd(&l, r.den());
                l = &l * &r.den().exact_div(&g).expect("gcd divides");
            }
            row.iter()
                .map(|r| {
                    if r.is_zero() {
                        Poly::zero()
                    } else {
                        r.num() * &l.exact_div(r.den()).expect("lcm is a multiple")
                    }
                })
                .collect()
        })
        .collect()
}

fn bareiss_rank(mut a: Vec<Vec<Poly>>) -> usize {
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let mut cols: Vec<usize> = (0..nc).collect();
    let mut prev = Poly::one();
    let mut rank = 0;
    for k in 0..nr.min(nc) {
        // Pivot: fewest fill-in candidates, then the smallest entry.
        let row_nz: Vec<usize> =
            (0..nr).map(|i| if i < k { 0 } else { (k..nc).filter(|&j| !a[i][cols[j]].is_zero()).count() }).collect();
        let col_nz: Vec<usize> =
            (0..nc).map(|j| if j < k { 0 } else { (k..nr).filter(|&i| !a[i][cols[j]].is_zero()).count() }).collect();
        let mut best: Option<((usize, usize), usize, usize)> = None;
        for i in k..nr {
            for j in k..nc {
                let e = &a[i][cols[j]];
                if e.is_zero() {
                    continue;
                }
                let cost = ((row_nz[i] - 1) * (col_nz[j] - 1), e.len());
                if best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
                    best = Some((cost, i, j));
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        a.swap(k, pi);
        cols.swap(k, pj);
        let piv = a[k][cols[k]].clone();
        for i in k + 1..nr {
            let lead = a[i][cols[k]].clone();
            for j in k + 1..nc {
                let c = cols[j];
                let top = &a[k][c];
                let cur = &a[i][c];
                if cur.is_zero() && (lead.is_zero() || top.is_zero()) {
                    continue;
                }
                let mut v = &piv * cur;
                if !lead.is_zero() && !top.is_zero() {
                    v = &v - &(&lead * top);
                }
                a[i][c] = v.exact_div(&prev).expect("Bareiss division is exact");
            }
            a[i][cols[k]] = Poly::zero();
        }
        prev = piv;
        rank += 1;
    }
    rank
}

fn sampled_rank(rows: &[Vec<RatFunc>], rng: &mut ChaCha8Rng) -> Result<usize> {
    'attempt: for _ in 0..50 {
        let mut point: BTreeMap<Var, BigRational> = BTreeMap::new();
        let mut value = |v: &Var| -> Result<BigRational> {
            Ok(point
                .entry(v.clone())
                .or_insert_with(|| {
                    BigRational::from_integer(BigInt::from(rng.random_range(-SAMPLE_BOUND..=SAMPLE_BOUND)))
                })
                .clone())
        };
        let mut m = Vec::with_capacity(rows.len());
        for row in rows {
            let mut out = Vec::with_capacity(row.len());
            for r in row {
                match r.eval_rational(&mut value) {
                    Ok(x) => out.push(x),
                    Err(Error::DivisionByZero) => continue 'attempt,
                    Err(e) => return Err(e),
                }
            }
            m.push(out);
        }
        return Ok(rational_rank(m));
    }
    Err(Error::Inconsistency("no admissible sample point for rank confirmation".into()))
}

/// Rank of a matrix over ℚ by Gaussian elimination.
pub fn rational_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let nr = m.len();
    let nc = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..nc {
        let Some(p) = (rank..nr).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = BigRational::one() / &m[rank][c];
        for r in rank + 1..nr {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] * &inv;
            for k in c..nc {
                let d = &f * &m[rank][k];
                m[r][k] -= d;
            }
        }
        rank += 1;
        if rank == nr {
            break;
        }
    }
    rank
}

/// A commutator found outside the span of a system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub left: usize,
    pub right: usize,
    pub commutator: DiffOperator,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completeness {
    pub complete: bool,
    pub witness: Option<Witness>,
}

/// Whether every pairwise commutator lies in the span of `ops` over the
/// field of rational functions of the coordinates. Membership is decided by
/// comparing generic ranks with and without the commutator.
pub fn is_complete_system(ops: &[DiffOperator]) -> Result<Completeness> {
    let mut all: Vec<DiffOperator> = ops.to_vec();
    let mut brackets = Vec::new();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let w = commutator(&ops[i], &ops[j])?;
            if !w.is_empty() {
                all.push(w.clone());
                brackets.push((i, j, w));
            }
        }
    }
    if brackets.is_empty() {
        return Ok(Completeness { complete: true, witness: None });
    }
    let cols = support(&all);
    let base = symbolic_rank(&coefficient_matrix(ops, &cols)?)?;
    for (i, j, w) in brackets {
        let mut ext = ops.to_vec();
        ext.push(w.clone());
        if symbolic_rank(&coefficient_matrix(&ext, &cols)?)? > base {
            return Ok(Completeness { complete: false, witness: Some(Witness { left: i, right: j, commutator: w }) });
        }
    }
    Ok(Completeness { complete: true, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{build_generator, determining_system, prolong, xi_decompose, MixedConvention};
    use crate::symbolic::parse_expr;

    fn ops(n: usize, order: usize, conv: MixedConvention) -> Vec<DiffOperator> {
        determining_system(n, order, conv).unwrap().into_iter().map(|s| s.op).collect()
    }

    fn m(rows: &[&[&str]], n: usize) -> SymbolicMatrix {
        let entries: Vec<Vec<Expr>> =
            rows.iter().map(|r| r.iter().map(|s| parse_expr(s, n).unwrap()).collect()).collect();
        let nc = entries.first().map_or(0, Vec::len);
        SymbolicMatrix {
            row_labels: (0..entries.len()).map(|k| k.to_string()).collect(),
            columns: (1..=nc).map(Var::x).collect(),
            entries,
        }
    }

    #[test]
    fn first_order_matrix_n2() {
        let o = ops(2, 1, MixedConvention::Symmetric);
        let cols: Vec<Var> = ["A1", "A2", "A1_2", "A2_1"]
            .iter()
            .map(|s| match parse_expr(s, 2).unwrap().node() {
                crate::symbolic::Node::Var(v) => v.clone(),
                _ => unreachable!(),
            })
            .collect();
        let mat = coefficient_matrix(&o, &cols).unwrap();
        let want = m(&[&["A1", "0", "A1_2", "-A2_1"], &["0", "A2", "-A1_2", "A2_1"]], 2);
        let norm = |s: &SymbolicMatrix| -> Vec<Vec<Expr>> {
            s.entries.iter().map(|r| r.iter().map(|e| e.normalize().unwrap()).collect()).collect()
        };
        assert_eq!(norm(&mat), norm(&want));
        assert_eq!(symbolic_rank(&mat).unwrap(), 2);
        assert_eq!(symbolic_rank(&mat.select_columns(&[0, 1])).unwrap(), 2);
    }

    #[test]
    fn rank_edge_cases() {
        assert_eq!(symbolic_rank(&m(&[], 2)).unwrap(), 0);
        assert_eq!(symbolic_rank(&m(&[&["0", "0"], &["0", "0"]], 2)).unwrap(), 0);
        let dependent = m(&[&["x1", "x2"], &["x1 * x2", "x2^2"], &["1", "x2 / x1"]], 2);
        assert_eq!(symbolic_rank(&dependent).unwrap(), 1);
        let full = m(&[&["x1", "x2", "1"], &["x2", "x1", "1"], &["1", "1", "x1 * x2"]], 2);
        assert_eq!(symbolic_rank(&full).unwrap(), 3);
        assert_eq!(symbolic_rank(&m(&[&["exp(x1)"]], 2)), Err(Error::NotRational));
    }

    #[test]
    fn missing_coordinate() {
        let o = ops(2, 1, MixedConvention::Symmetric);
        let r = coefficient_matrix(&o, &[Var::coeff(1)]);
        assert!(matches!(r, Err(Error::MissingCoordinate(_))));
        assert_eq!(coefficient_matrix(&[], &[Var::coeff(1)]).unwrap().nrows(), 0);
    }

    #[test]
    fn first_order_commutators_vanish() {
        let o = ops(3, 1, MixedConvention::Symmetric);
        for p in &o {
            for q in &o {
                assert!(commutator(p, q).unwrap().is_empty());
            }
        }
        assert!(is_complete_system(&o).unwrap().complete);
        assert!(is_complete_system(&o[..1]).unwrap().complete);
    }

    #[test]
    fn ordered_commutator_identities() {
        let o = ops(2, 2, MixedConvention::OrderedPairs);
        let (v1p, v2p, v1pp) = (&o[0], &o[1], &o[2]);
        assert_eq!(commutator(v1p, v1pp).unwrap(), *v1pp);
        let w = commutator(v1pp, v2p).unwrap();
        let want = DiffOperator::from_terms(2, [(Var::jet(1, &[1, 2]), parse_expr("-2 * A1_2", 2).unwrap())]).unwrap();
        assert_eq!(w, want);
        let c = is_complete_system(&o).unwrap();
        assert!(!c.complete);
        let wit = c.witness.unwrap();
        assert!(!wit.commutator.is_empty());
    }

    #[test]
    fn symmetric_second_order_system_is_complete() {
        let o = ops(2, 2, MixedConvention::Symmetric);
        assert!(commutator(&o[2], &o[1]).unwrap().is_empty());
        assert!(is_complete_system(&o).unwrap().complete);
    }

    #[test]
    fn rejects_formal_symbols_and_mismatch() {
        let g = build_generator(2).unwrap();
        let p = prolong(&g, 1, MixedConvention::Symmetric).unwrap();
        assert_eq!(commutator(&p, &p), Err(Error::FormalSymbols));
        let a = xi_decompose(&p).unwrap().get(1, 1);
        let b = ops(3, 1, MixedConvention::Symmetric).remove(0);
        assert_eq!(commutator(&a, &b), Err(Error::DimensionMismatch(2, 3)));
    }

    #[test]
    fn text_table_aligns() {
        let t = m(&[&["x1", "10"], &["x2^2", "1"]], 2).to_text();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "   x1    x2");
        assert_eq!(lines[2], "1  x2^2  1");
    }
}
