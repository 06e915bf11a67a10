//! `T_p^n = Σ_j m_{n,j} · T_{p^j}^prim`: which primitive levels the `n`-th
//! iterate hits, and how often.
//!
//! Two independent routes. [`Method::Exhaustive`] multiplies out every one of
//! the `(p+1)^n` words in the coset representatives, divides each product by
//! its content and reduces it to Hermite normal form. [`Method::Composed`]
//! keeps a running table of `(level, coset) → count` and composes one step
//! at a time. Both verify that every level is hit uniformly across all of its
//! `p^j + p^{j-1}` cosets.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::matrix::{coset_reps, hnf, CosetClass, IntMatrix2};
use crate::error::{Error, Result};
use crate::exec::{try_map_tasks, Execution};

/// Largest `(p+1)^n` the exhaustive route will multiply out.
pub const EXHAUSTIVE_BUDGET: u64 = 100_000_000;
/// Largest top-level coset count `p^n + p^{n-1}` the composed route will tabulate.
pub const COMPOSED_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Method {
    Exhaustive,
    #[default]
    Composed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerDecomposition {
    pub p: u64,
    pub n: u32,
    /// `j ↦ m_{n,j}`; levels with zero multiplicity are absent.
    pub multiplicities: BTreeMap<u32, u64>,
}

impl PowerDecomposition {
    /// `(p+1)^n`.
    pub fn degree(&self) -> u64 {
        (self.p + 1).pow(self.n)
    }

    pub fn multiplicity(&self, j: u32) -> u64 {
        self.multiplicities.get(&j).copied().unwrap_or(0)
    }

    /// `Σ_j m_{n,j} · deg T_{p^j}^prim`, which must equal [`Self::degree`].
    pub fn total_degree(&self) -> u64 {
        self.multiplicities.iter().map(|(&j, &m)| m * primitive_degree(self.p, j)).sum()
    }
}

/// Number of primitive cosets of determinant `p^j`: `p^j + p^{j-1}`, and 1 at `j = 0`.
pub fn primitive_degree(p: u64, j: u32) -> u64 {
    if j == 0 {
        1
    } else {
        p.pow(j) + p.pow(j - 1)
    }
}

pub fn power_decomposition(p: u64, n: u32, method: Method) -> Result<PowerDecomposition> {
    power_decomposition_with(p, n, method, Execution::default())
}

pub fn power_decomposition_with(p: u64, n: u32, method: Method, execution: Execution) -> Result<PowerDecomposition> {
    let reps = coset_reps(p)?;
    let degree = (p + 1).checked_pow(n).ok_or_else(|| Error::Overflow(format!("({p}+1)^{n}")))?;
    // Product entries are bounded by p^n.
    if p.checked_pow(n).is_none_or(|v| v > i64::MAX as u64 / 2) {
        return Err(Error::Overflow(format!("{p}^{n}")));
    }
    let tally = match method {
        Method::Exhaustive => {
            if degree > EXHAUSTIVE_BUDGET {
                return Err(Error::Budget { needed: format!("{degree} words"), limit: EXHAUSTIVE_BUDGET.to_string() });
            }
            exhaustive_tally(p, n, &reps, execution)?
        }
        Method::Composed => {
            let states = primitive_degree(p, n);
            if states > COMPOSED_BUDGET {
                return Err(Error::Budget { needed: format!("{states} cosets"), limit: COMPOSED_BUDGET.to_string() });
            }
            composed_tally(p, n, &reps)?
        }
    };
    let multiplicities = check_regular(p, &tally)?;
    let out = PowerDecomposition { p, n, multiplicities };
    if out.total_degree() != degree {
        return Err(Error::Internal(format!("degree law: Σ m·deg = {} but (p+1)^n = {degree}", out.total_degree())));
    }
    Ok(out)
}

type Tally = BTreeMap<(u32, CosetClass), u64>;

/// Divides out the content (a power of `p`) and returns `(j, HNF)` with
/// `det = p^j` after division.
fn canonical(p: u64, m: &IntMatrix2) -> Result<(u32, CosetClass)> {
    let g = m.content();
    let prim = m.divide_by(g);
    let mut det = prim.det();
    let mut j = 0;
    while det % p as i128 == 0 {
        det /= p as i128;
        j += 1;
    }
    if det != 1 || power_of(p, g as u64).is_none() {
        return Err(Error::Internal(format!("{m} is not in the p-power semigroup")));
    }
    Ok((j, hnf(&prim)))
}

fn power_of(p: u64, mut v: u64) -> Option<u32> {
    let mut k = 0;
    while v > 1 && v.is_multiple_of(p) {
        v /= p;
        k += 1;
    }
    (v == 1).then_some(k)
}

fn exhaustive_tally(p: u64, n: u32, reps: &[IntMatrix2], execution: Execution) -> Result<Tally> {
    let base = (p + 1) as usize;
    let depth = n.min(6) as usize;
    let tasks = base.pow(depth as u32);
    let partial = try_map_tasks(execution, tasks, |task| -> Result<HashMap<(u32, CosetClass), u64>> {
        let mut prefix = IntMatrix2::IDENTITY;
        let mut t = task;
        let mut letters = vec![0usize; depth];
        for slot in letters.iter_mut().rev() {
            *slot = t % base;
            t /= base;
        }
        for &l in &letters {
            prefix = prefix.checked_mul(&reps[l])?;
        }
        let mut local = HashMap::new();
        descend(p, &prefix, n as usize - depth, reps, &mut local)?;
        Ok(local)
    })?;
    let mut tally = Tally::new();
    for local in partial {
        for (k, v) in local {
            *tally.entry(k).or_insert(0) += v;
        }
    }
    Ok(tally)
}

fn descend(
    p: u64,
    m: &IntMatrix2,
    remaining: usize,
    reps: &[IntMatrix2],
    out: &mut HashMap<(u32, CosetClass), u64>,
) -> Result<()> {
    if remaining == 0 {
        *out.entry(canonical(p, m)?).or_insert(0) += 1;
        return Ok(());
    }
    for r in reps {
        descend(p, &m.checked_mul(r)?, remaining - 1, reps, out)?;
    }
    Ok(())
}

fn composed_tally(p: u64, n: u32, reps: &[IntMatrix2]) -> Result<Tally> {
    let mut state = Tally::new();
    state.insert((0, hnf(&IntMatrix2::IDENTITY)), 1);
    for _ in 0..n {
        let mut next = Tally::new();
        for (&(_, class), &count) in &state {
            let m = class.matrix();
            for r in reps {
                *next.entry(canonical(p, &m.checked_mul(r)?)?).or_insert(0) += count;
            }
        }
        state = next;
    }
    Ok(state)
}

/// Each level must be spread evenly over all of its primitive cosets.
fn check_regular(p: u64, tally: &Tally) -> Result<BTreeMap<u32, u64>> {
    let mut levels: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
    for (&(j, class), &count) in tally {
        if class.det() != (p as i128).pow(j) || !class.is_primitive() {
            return Err(Error::Internal(format!("coset {class:?} at level {j}")));
        }
        levels.entry(j).or_default().push(count);
    }
    let mut out = BTreeMap::new();
    for (j, counts) in levels {
        let want = primitive_degree(p, j);
        if counts.len() as u64 != want {
            return Err(Error::Regularity { level: j, detail: format!("{} of {want} cosets hit", counts.len()) });
        }
        let m = counts[0];
        if counts.iter().any(|&c| c != m) {
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            return Err(Error::Regularity { level: j, detail: format!("counts range over {lo}..={hi}") });
        }
        out.insert(j, m);
    }
    Ok(out)
}
