//! Exact simplex for `max c·x` subject to `A x <= b`, `x >= 0`, `b >= 0`.
//!
//! With a nonnegative right-hand side the slack basis is feasible, so a
//! single phase suffices. Bland's rule (lowest entering index, lowest
//! leaving basic index on ratio ties) rules out cycling.
//!
//! Integer programs run first on a fraction-free tableau over machine words, where
//! every entry is a numerator over the current basis determinant; if a
//! product overflows, the same pivots are redone over big rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, PrimInt, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lp {
    pub objective: Vec<Q>,
    pub rows: Vec<Vec<Q>>,
    pub rhs: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Q,
    pub x: Vec<Q>,
    /// Optimal dual: one nonnegative multiplier per row.
    pub dual: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Unbounded,
    /// Some right-hand side is negative; only reported when the row cannot
    /// be satisfied by nonnegative variables, otherwise such programs are
    /// rejected as unsupported.
    Infeasible,
}

impl Lp {
    pub fn new(vars: usize) -> Self {
        Lp {
            objective: vec![Q::zero(); vars],
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds `sum coef_j x_j <= rhs` from sparse `(j, coef)` terms.
    pub fn add_row(&mut self, terms: impl IntoIterator<Item = (usize, Q)>, rhs: Q) {
        let mut row = vec![Q::zero(); self.vars()];
        for (j, c) in terms {
            row[j] += c;
        }
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    /// Whether `x` satisfies every row and sign constraint.
    pub fn is_feasible(&self, x: &[Q]) -> bool {
        x.iter().all(|v| !v.is_negative())
            && self
                .rows
                .iter()
                .zip(&self.rhs)
                .all(|(row, b)| dot(row, x) <= *b)
    }

    pub fn value_at(&self, x: &[Q]) -> Q {
        dot(&self.objective, x)
    }

    pub fn solve(&self) -> LpOutcome {
        if let Some(i) = self.rhs.iter().position(|b| b.is_negative()) {
            // A row with nonnegative coefficients and negative bound is
            // unsatisfiable; anything else needs a first phase.
            assert!(
                self.rows[i].iter().all(|c| !c.is_negative()),
                "negative right-hand side with mixed signs is unsupported"
            );
            return LpOutcome::Infeasible;
        }
        self.solve_integral()
            .unwrap_or_else(|| self.solve_rational())
    }

    /// The big-rational tableau, always available.
    pub fn solve_rational(&self) -> LpOutcome {
        Tableau::new(self).run()
    }

    /// The fraction-free tableau, on `i64` and then `i128`; `None` on
    /// non-integer data or overflow of both.
    pub fn solve_integral(&self) -> Option<LpOutcome> {
        IntTableau::<i64>::new(self)
            .and_then(IntTableau::run)
            .or_else(|| IntTableau::<i128>::new(self)?.run())
    }
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

struct Tableau {
    n: usize,
    /// Rows of `[A | I | b]`.
    t: Vec<Vec<Q>>,
    /// Reduced-cost row: `-c` then zeros for slacks, then the objective value.
    z: Vec<Q>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(lp: &Lp) -> Self {
        let n = lp.vars();
        let m = lp.rows.len();
        let width = n + m + 1;
        let t = lp
            .rows
            .iter()
            .zip(&lp.rhs)
            .enumerate()
            .map(|(i, (row, b))| {
                let mut r = Vec::with_capacity(width);
                r.extend(row.iter().cloned());
                r.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
                r.push(b.clone());
                r
            })
            .collect();
        let mut z: Vec<Q> = lp.objective.iter().map(|c| -c).collect();
        z.resize(width, Q::zero());
        Tableau {
            n,
            t,
            z,
            basis: (n..n + m).collect(),
        }
    }

    fn run(mut self) -> LpOutcome {
        let width = self.z.len();
        loop {
            let Some(col) = (0..width - 1).find(|&j| self.z[j].is_negative()) else {
                return LpOutcome::Optimal(self.solution());
            };
            let mut best: Option<(usize, Q)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[width - 1] / &row[col];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((row, _)) = best else {
                return LpOutcome::Unbounded;
            };
            self.pivot(row, col);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.t[r].clone();
        let support: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        let eliminate = |row: &mut Vec<Q>| {
            let factor = row[c].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &support {
                let d = &factor * &pivot_row[j];
                row[j] -= d;
            }
        };
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.z);
        self.basis[r] = c;
    }

    fn solution(&self) -> LpSolution {
        let width = self.z.len();
        let mut x = vec![Q::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.t[i][width - 1].clone();
            }
        }
        LpSolution {
            value: self.z[width - 1].clone(),
            x,
            dual: self.z[self.n..width - 1].to_vec(),
        }
    }
}

/// Machine integers the fraction-free tableau runs on.
trait Word: PrimInt + Signed + Into<BigInt> {}
impl Word for i64 {}
impl Word for i128 {}

fn to_word<T: Word>(v: &Q) -> Option<T> {
    if v.is_integer() {
        T::from(v.to_integer())
    } else {
        None
    }
}

fn ratio<T: Word>(n: T, d: T) -> Q {
    Q::new(n.into(), d.into())
}

/// Bareiss form of the tableau: true entries are `t[i][j] / det`, and the
/// update `(p * t[i][j] - t[i][c] * t[r][j]) / det` divides exactly.
/// Pivots by largest reduced cost, switching to Bland's rule after more
/// consecutive degenerate pivots than there are rows, until the objective
/// moves again.
struct IntTableau<T> {
    n: usize,
    t: Vec<Vec<T>>,
    z: Vec<T>,
    det: T,
    basis: Vec<usize>,
}

impl<T: Word> IntTableau<T> {
    fn new(lp: &Lp) -> Option<Self> {
        let n = lp.vars();
        let m = lp.rows.len();
        let mut t = Vec::with_capacity(m);
        for (i, (row, b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
            let mut r = Vec::with_capacity(n + m + 1);
            for v in row {
                r.push(to_word(v)?);
            }
            r.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
            r.push(to_word(b)?);
            t.push(r);
        }
        let mut z = Vec::with_capacity(n + m + 1);
        for c in &lp.objective {
            z.push(-to_word::<T>(c)?);
        }
        z.resize(n + m + 1, T::zero());
        Some(IntTableau {
            n,
            t,
            z,
            det: T::one(),
            basis: (n..n + m).collect(),
        })
    }

    fn run(mut self) -> Option<LpOutcome> {
        let width = self.z.len();
        let rhs = width - 1;
        let mut stalled = 0;
        loop {
            let negative = |j: &usize| self.z[*j] < T::zero();
            let col = if stalled > self.t.len() {
                (0..rhs).find(negative)
            } else {
                (0..rhs).filter(negative).min_by_key(|&j| (self.z[j], j))
            };
            let Some(col) = col else {
                return Some(LpOutcome::Optimal(self.solution()));
            };
            let mut best: Option<usize> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][col];
                if a <= T::zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => {
                        // rhs_i / a < rhs_b / a_b, denominators positive.
                        let lhs = self.t[i][rhs].checked_mul(&self.t[b][col])?;
                        let rhs_b = self.t[b][rhs].checked_mul(&a)?;
                        lhs < rhs_b || (lhs == rhs_b && self.basis[i] < self.basis[b])
                    }
                };
                if better {
                    best = Some(i);
                }
            }
            let Some(row) = best else {
                return Some(LpOutcome::Unbounded);
            };
            stalled = if self.t[row][rhs].is_zero() {
                stalled + 1
            } else {
                0
            };
            self.pivot(row, col)?;
        }
    }

    fn pivot(&mut self, r: usize, c: usize) -> Option<()> {
        let p = self.t[r][c];
        let det = self.det;
        let pivot_row = std::mem::take(&mut self.t[r]);
        let update = |row: &mut Vec<T>| -> Option<()> {
            let f = row[c];
            if f.is_zero() && p == det {
                return Some(());
            }
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                let v = p.checked_mul(x)?.checked_sub(&f.checked_mul(&y)?)?;
                *x = if det.is_one() { v } else { v / det };
            }
            Some(())
        };
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                update(row)?;
            }
        }
        update(&mut self.z)?;
        self.t[r] = pivot_row;
        self.det = p;
        self.basis[r] = c;
        Some(())
    }

    fn solution(&self) -> LpSolution {
        let rhs = self.z.len() - 1;
        let mut x = vec![Q::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = ratio(self.t[i][rhs], self.det);
            }
        }
        LpSolution {
            value: ratio(self.z[rhs], self.det),
            x,
            dual: self.z[self.n..rhs]
                .iter()
                .map(|&v| ratio(v, self.det))
                .collect(),
        }
    }
}
