//! Grid-cell collections, their axis-line multiplicity, and splitting into
//! parts of multiplicity one. Collections come either from explicit cell
//! lists or from sampling the graph of a polynomial.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rat::{self, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MultiplicityError {
    #[error("cell {cell:?} outside the grid [0, {z})^{d}")]
    OutOfGrid { cell: Vec<u32>, z: u32, d: usize },
    #[error("empty collection")]
    Empty,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubeCollection {
    pub d: usize,
    pub z: u32,
    pub cells: BTreeSet<Vec<u32>>,
}

impl CubeCollection {
    pub fn new(
        d: usize,
        z: u32,
        cells: impl IntoIterator<Item = Vec<u32>>,
    ) -> Result<Self, MultiplicityError> {
        let cells: BTreeSet<Vec<u32>> = cells.into_iter().collect();
        if let Some(bad) = cells
            .iter()
            .find(|c| c.len() != d || c.iter().any(|&x| x >= z))
        {
            return Err(MultiplicityError::OutOfGrid {
                cell: bad.clone(),
                z,
                d,
            });
        }
        Ok(CubeCollection { d, z, cells })
    }

    pub fn full(d: usize, z: u32) -> Self {
        let mut cells = BTreeSet::new();
        let total = (z as usize).pow(d as u32);
        for mut idx in 0..total {
            let mut c = Vec::with_capacity(d);
            for _ in 0..d {
                c.push((idx % z as usize) as u32);
                idx /= z as usize;
            }
            cells.insert(c);
        }
        CubeCollection { d, z, cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells grouped by the line parallel to `axis` they sit on.
    fn lines(&self, axis: usize) -> BTreeMap<Vec<u32>, Vec<&Vec<u32>>> {
        let mut out: BTreeMap<Vec<u32>, Vec<&Vec<u32>>> = BTreeMap::new();
        for c in &self.cells {
            let mut key = c.clone();
            key.remove(axis);
            out.entry(key).or_default().push(c);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Multiplicity {
    /// Largest number of cells met by a line parallel to each axis.
    pub per_axis: Vec<usize>,
    pub overall: usize,
    pub best_axis: usize,
}

pub fn multiplicity(c: &CubeCollection) -> Result<Multiplicity, MultiplicityError> {
    if c.is_empty() {
        return Err(MultiplicityError::Empty);
    }
    let per_axis: Vec<usize> = (0..c.d)
        .map(|axis| c.lines(axis).values().map(Vec::len).max().unwrap_or(0))
        .collect();
    let (best_axis, &overall) = per_axis
        .iter()
        .enumerate()
        .min_by_key(|&(i, m)| (*m, i))
        .expect("d >= 1");
    Ok(Multiplicity {
        per_axis,
        overall,
        best_axis,
    })
}

/// Peels layers along the axis of least multiplicity: the `j`-th cell of each
/// line (in increasing coordinate) goes to part `j`.
pub fn greedy_split(c: &CubeCollection) -> Result<Vec<CubeCollection>, MultiplicityError> {
    let m = multiplicity(c)?;
    let mut parts: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); m.overall];
    for line in c.lines(m.best_axis).values() {
        let mut sorted = line.clone();
        sorted.sort_by_key(|cell| cell[m.best_axis]);
        for (j, cell) in sorted.into_iter().enumerate() {
            parts[j].insert(cell.clone());
        }
    }
    Ok(parts
        .into_iter()
        .map(|cells| CubeCollection {
            d: c.d,
            z: c.z,
            cells,
        })
        .collect())
}

/// True when `parts` partition `c` and each part has multiplicity one.
pub fn verify_split(c: &CubeCollection, parts: &[CubeCollection]) -> bool {
    let mut union = BTreeSet::new();
    for p in parts {
        if p.is_empty() || multiplicity(p).map(|m| m.overall) != Ok(1) {
            return false;
        }
        for cell in &p.cells {
            if !union.insert(cell.clone()) {
                return false;
            }
        }
    }
    union == c.cells
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    #[serde(with = "rat::serde_str")]
    pub coeff: Rat,
    pub exps: Vec<u32>,
}

/// Sparse polynomial with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Polynomial {
    pub nvars: usize,
    pub terms: Vec<Term>,
}

impl Polynomial {
    pub fn new(nvars: usize, terms: Vec<(Rat, Vec<u32>)>) -> Result<Self, MultiplicityError> {
        if terms.iter().any(|(_, e)| e.len() != nvars) {
            return Err(MultiplicityError::InvalidArgument(format!(
                "every exponent vector needs {nvars} entries"
            )));
        }
        let terms = terms
            .into_iter()
            .map(|(coeff, exps)| Term { coeff, exps })
            .collect();
        Ok(Polynomial { nvars, terms })
    }

    pub fn eval(&self, t: &[Rat]) -> Rat {
        self.terms.iter().fold(Rat::zero(), |acc, term| {
            let mono = term
                .exps
                .iter()
                .zip(t)
                .fold(term.coeff.clone(), |m, (&k, x)| m * rat::pow(x, k));
            acc + mono
        })
    }
}

/// How sampled graph points become cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellRule {
    /// Only the cells containing a sample point.
    Samples,
    /// Per column, every cell between the lowest and highest sample, which
    /// captures the full crossing of a continuous graph whose extremes in the
    /// column are attained at samples (e.g. monotone pieces).
    Span,
}

/// `floor(v z)`, clamped to the closed grid so that `v = 1` lands in the top cell.
fn cell_of(v: &Rat, z: u32) -> Option<u32> {
    if v.is_negative() || *v > rat::int(1) {
        return None;
    }
    let scaled = v * rat::int(i64::from(z));
    let f: BigInt = scaled.numer().div_floor(scaled.denom());
    let f: u32 = f.try_into().ok()?;
    Some(f.min(z - 1))
}

/// Cells of the `Z`-grid on `[0,1]^d` met by the graph `t_d = Q(t_1..t_{d-1})`,
/// with `samples` equally spaced sample coordinates per cell edge (endpoints
/// included).
pub fn polynomial_graph(
    q: &Polynomial,
    z: u32,
    samples: u32,
    rule: CellRule,
) -> Result<CubeCollection, MultiplicityError> {
    if z == 0 || samples < 2 {
        return Err(MultiplicityError::InvalidArgument(
            "need z >= 1 and at least 2 samples per cell edge".into(),
        ));
    }
    let base = q.nvars;
    let d = base + 1;
    let columns = CubeCollection::full(base.max(1), z);
    let mut cells = BTreeSet::new();
    for col in &columns.cells {
        let col: Vec<u32> = if base == 0 { Vec::new() } else { col.clone() };
        let mut values = Vec::new();
        let per = samples as usize;
        let count = per.pow(base as u32);
        for mut idx in 0..count.max(1) {
            let mut t = Vec::with_capacity(base);
            for &c in &col {
                let s = (idx % per) as i64;
                idx /= per;
                let num = i64::from(c) * (i64::from(samples) - 1) + s;
                t.push(rat::rat(num, i64::from(z) * (i64::from(samples) - 1)));
            }
            values.push(q.eval(&t));
        }
        let hits: Vec<u32> = match rule {
            CellRule::Samples => values.iter().filter_map(|v| cell_of(v, z)).collect(),
            CellRule::Span => {
                let lo = values
                    .iter()
                    .min()
                    .expect("samples")
                    .clone()
                    .max(rat::int(0));
                let hi = values
                    .iter()
                    .max()
                    .expect("samples")
                    .clone()
                    .min(rat::int(1));
                match (cell_of(&lo, z), cell_of(&hi, z)) {
                    (Some(a), Some(b)) if lo <= hi => (a..=b).collect(),
                    _ => Vec::new(),
                }
            }
        };
        for h in hits {
            let mut cell = col.clone();
            cell.push(h);
            cells.insert(cell);
        }
        if base == 0 {
            break;
        }
    }
    CubeCollection::new(d, z, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;

    #[test]
    fn column_example() {
        let c = CubeCollection::new(2, 4, [vec![0, 0], vec![0, 1], vec![0, 2]]).unwrap();
        let m = multiplicity(&c).unwrap();
        assert_eq!(m.per_axis, vec![1, 3]);
        assert_eq!(m.overall, 1);
        let parts = greedy_split(&c).unwrap();
        assert_eq!(parts.len(), 1);
        assert!(verify_split(&c, &parts));
    }

    #[test]
    fn full_grid() {
        for z in 1..=5 {
            let c = CubeCollection::full(2, z);
            assert_eq!(multiplicity(&c).unwrap().overall, z as usize);
            let parts = greedy_split(&c).unwrap();
            assert_eq!(parts.len(), z as usize);
            assert!(verify_split(&c, &parts));
        }
        let c = CubeCollection::full(3, 3);
        assert!(verify_split(&c, &greedy_split(&c).unwrap()));
    }

    #[test]
    fn parabola_splits_in_three() {
        let q = Polynomial::new(1, vec![(int(1), vec![2])]).unwrap();
        for rule in [CellRule::Samples, CellRule::Span] {
            let c = polynomial_graph(&q, 10, 9, rule).unwrap();
            let parts = greedy_split(&c).unwrap();
            assert!(parts.len() <= 3, "{rule:?}: {} parts", parts.len());
            assert!(verify_split(&c, &parts));
        }
    }

    #[test]
    fn rejects_bad_cells() {
        assert!(CubeCollection::new(2, 3, [vec![3, 0]]).is_err());
        assert!(multiplicity(&CubeCollection::new(2, 3, []).unwrap()).is_err());
    }
}
