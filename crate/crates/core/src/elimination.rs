//! Exact Gauss–Jordan elimination over the Laurent coefficient ring.
//!
//! Pivots must be units of the ring (a single term whose variables are all
//! nonvanishing). Columns are scanned in index order and constant pivots are
//! preferred, so results are reproducible. When the remaining block has no
//! unit entry the system is reported as generic-rank only and can be
//! examined pointwise at rational sample points.

use std::collections::{BTreeMap, BTreeSet};

use num::Zero;

use crate::coeffring::{Coefficient, Rational};
use crate::exterior::{Blade, Chart, DiffForm, ExteriorError, Graded, Kind};

/// Sparse row `Σ entries[j]·u_j = rhs`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Row {
    pub entries: BTreeMap<usize, Coefficient>,
    pub rhs: Coefficient,
}

impl Row {
    fn is_trivial(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub unknowns: usize,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    /// Every solution is `particular + Σ t_k kernel[k]`.
    Solved { particular: Vec<Coefficient>, kernel: Vec<Vec<Coefficient>>, pivots: Vec<usize> },
    /// Row `row` of the reduced system reads `0 = residual` with `residual ≠ 0`.
    Inconsistent { row: usize, residual: Coefficient },
    /// Elimination stopped at a block without unit entries.
    GenericRankOnly { reduced: LinearSystem, pivots: Vec<usize> },
}

impl LinearSystem {
    pub fn new(unknowns: usize) -> LinearSystem {
        LinearSystem { unknowns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        if !(row.entries.is_empty() && row.rhs.is_zero()) {
            self.rows.push(row);
        }
    }

    /// Rows of `Σ_j u_j·columns[j] = rhs`, one per output blade.
    pub fn from_columns<K: Kind>(columns: &[Graded<K>], rhs: Option<&Graded<K>>) -> LinearSystem {
        let mut by_blade: BTreeMap<Blade, Row> = BTreeMap::new();
        for (j, col) in columns.iter().enumerate() {
            for (b, c) in col.terms() {
                by_blade.entry(*b).or_default().entries.insert(j, c.clone());
            }
        }
        if let Some(r) = rhs {
            for (b, c) in r.terms() {
                by_blade.entry(*b).or_default().rhs = c.clone();
            }
        }
        let mut sys = LinearSystem::new(columns.len());
        for (_, row) in by_blade {
            sys.push(row);
        }
        sys
    }

    pub fn append(&mut self, other: LinearSystem) {
        debug_assert_eq!(self.unknowns, other.unknowns);
        self.rows.extend(other.rows);
    }

    pub fn solve(&self, chart: &Chart) -> Solution {
        let mut rows = self.rows.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut used = vec![false; rows.len()];
        while let Some((r, col)) = find_pivot(&rows, &used, chart) {
            used[r] = true;
            let inv = chart.inverse(&rows[r].entries[&col]).expect("pivot is a unit");
            normalize(&mut rows[r], &inv);
            let pivot_row = rows[r].clone();
            for (k, row) in rows.iter_mut().enumerate() {
                if k == r {
                    continue;
                }
                if let Some(factor) = row.entries.get(&col).cloned() {
                    eliminate(row, &pivot_row, &factor);
                }
            }
            pivots.push((r, col));
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|(_, c)| *c).collect();
        let mut stuck = false;
        for (k, row) in rows.iter().enumerate() {
            if used[k] {
                continue;
            }
            if row.is_trivial() {
                if !row.rhs.is_zero() {
                    return Solution::Inconsistent { row: k, residual: row.rhs.clone() };
                }
            } else {
                stuck = true;
            }
        }
        if stuck {
            let reduced = LinearSystem {
                unknowns: self.unknowns,
                rows: rows
                    .into_iter()
                    .enumerate()
                    .filter(|(k, r)| !used[*k] && !r.is_trivial())
                    .map(|(_, r)| r)
                    .collect(),
            };
            return Solution::GenericRankOnly { reduced, pivots: pivot_cols };
        }
        let pivot_set: BTreeSet<usize> = pivot_cols.iter().copied().collect();
        let free: Vec<usize> = (0..self.unknowns).filter(|c| !pivot_set.contains(c)).collect();
        let mut particular = vec![Coefficient::zero(); self.unknowns];
        for (r, c) in &pivots {
            particular[*c] = rows[*r].rhs.clone();
        }
        let kernel = free
            .iter()
            .map(|f| {
                let mut v = vec![Coefficient::zero(); self.unknowns];
                v[*f] = Coefficient::one();
                for (r, c) in &pivots {
                    if let Some(e) = rows[*r].entries.get(f) {
                        v[*c] = -e;
                    }
                }
                v
            })
            .collect();
        Solution::Solved { particular, kernel, pivots: pivot_cols }
    }

    /// Rank of the coefficient matrix evaluated at a rational point.
    pub fn rank_at(&self, chart: &Chart, point: &BTreeMap<String, Rational>) -> Result<usize, ExteriorError> {
        let mut m: Vec<Vec<Rational>> = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut dense = vec![Rational::zero(); self.unknowns];
            for (j, c) in &row.entries {
                dense[*j] = chart.evaluate(c, point)?;
            }
            m.push(dense);
        }
        Ok(rational_rank(m))
    }
}

fn rational_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, r);
        let inv = m[rank][c].recip();
        for x in m[rank].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                let pivot_row = m[rank].clone();
                for (x, pv) in m[r].iter_mut().zip(&pivot_row).take(cols) {
                    *x -= &f * pv;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn find_pivot(rows: &[Row], used: &[bool], chart: &Chart) -> Option<(usize, usize)> {
    let mut best_unit: Option<(usize, usize)> = None;
    let mut cols: BTreeSet<usize> = BTreeSet::new();
    for (k, row) in rows.iter().enumerate() {
        if !used[k] {
            cols.extend(row.entries.keys().copied());
        }
    }
    for col in cols {
        for (k, row) in rows.iter().enumerate() {
            if used[k] {
                continue;
            }
            let Some(e) = row.entries.get(&col) else { continue };
            if e.as_constant().is_some() {
                return Some((k, col));
            }
            if best_unit.is_none() && chart.is_unit(e) {
                best_unit = Some((k, col));
            }
        }
    }
    best_unit
}

fn normalize(row: &mut Row, inv: &Coefficient) {
    if inv.is_one() {
        return;
    }
    for e in row.entries.values_mut() {
        *e = &*e * inv;
    }
    row.rhs = &row.rhs * inv;
}

/// `row -= factor · pivot_row`.
fn eliminate(row: &mut Row, pivot_row: &Row, factor: &Coefficient) {
    let neg = -factor;
    for (j, e) in &pivot_row.entries {
        let slot = row.entries.entry(*j).or_default();
        slot.add_scaled(e, &neg);
        if slot.is_zero() {
            row.entries.remove(j);
        }
    }
    row.rhs.add_scaled(&pivot_row.rhs, &neg);
}

/// All blades of the given size on a chart, in canonical order.
pub fn blades(dimension: usize, degree: usize) -> Vec<Blade> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..degree).collect();
    if degree > dimension {
        return out;
    }
    loop {
        out.push(Blade::from_indices(idx.iter().copied()).unwrap());
        let mut k = degree;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < dimension - degree + k {
                idx[k] += 1;
                for j in k + 1..degree {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Assembles `Σ_j values[j]·e_{basis[j]}`.
pub fn assemble<K: Kind>(chart: &Chart, degree: usize, basis: &[Blade], values: &[Coefficient]) -> Graded<K> {
    Graded::from_terms(chart, degree, basis.iter().copied().zip(values.iter().cloned()))
}

/// Columns `ι_{e_J} target` for all blades `J` of the given degree.
pub fn contraction_columns(target: &DiffForm, degree: usize) -> (Vec<Blade>, Vec<DiffForm>) {
    let chart = target.chart();
    let basis = blades(chart.dimension(), degree);
    let cols = basis
        .iter()
        .map(|b| {
            target
                .interior(&Graded::basis(chart, *b))
                .expect("degree checked by caller")
        })
        .collect();
    (basis, cols)
}
