//! Exact linear feasibility for systems of strict and non-strict
//! inequalities, by Fourier–Motzkin elimination with witness extraction.
//!
//! Emptiness, containment and interior questions all reduce to feasibility
//! of mixed systems `⟨a,x⟩ ≥ b` / `⟨a,x⟩ > b`. Dimensions stay small
//! (n ≤ 8), so elimination with dominance pruning is exact and fast enough.

use crate::rat::{dot, primitive, zeros, QVec, Rat};
use num::{BigInt, Signed, Zero};
use std::collections::{BTreeMap, HashMap};

/// One inequality `⟨coeffs, x⟩ ≥ rhs` (or `>` when `strict`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinCon {
    pub coeffs: QVec,
    pub rhs: Rat,
    pub strict: bool,
}

impl LinCon {
    pub fn ge(coeffs: QVec, rhs: Rat) -> Self {
        LinCon { coeffs, rhs, strict: false }
    }

    pub fn gt(coeffs: QVec, rhs: Rat) -> Self {
        LinCon { coeffs, rhs, strict: true }
    }

    /// The negation `⟨a,x⟩ < b` resp. `≤ b`, as a `≥`-form constraint.
    pub fn negation(&self) -> LinCon {
        LinCon {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            rhs: -self.rhs.clone(),
            strict: !self.strict,
        }
    }

    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        let v = dot(&self.coeffs, x);
        if self.strict {
            v > self.rhs
        } else {
            v >= self.rhs
        }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// A constant constraint that can never be violated.
    fn constant_holds(&self) -> bool {
        if self.strict {
            self.rhs.is_negative()
        } else {
            !self.rhs.is_positive()
        }
    }
}

/// Conjunction of inequalities over `dim` variables.
#[derive(Clone, Debug, Default)]
pub struct LinSystem {
    pub dim: usize,
    pub cons: Vec<LinCon>,
}

impl LinSystem {
    pub fn new(dim: usize) -> Self {
        LinSystem { dim, cons: Vec::new() }
    }

    pub fn push(&mut self, c: LinCon) {
        debug_assert_eq!(c.coeffs.len(), self.dim);
        self.cons.push(c);
    }

    pub fn push_eq(&mut self, coeffs: QVec, rhs: Rat) {
        self.push(LinCon::ge(coeffs.iter().map(|c| -c).collect(), -rhs.clone()));
        self.push(LinCon::ge(coeffs, rhs));
    }

    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        self.cons.iter().all(|c| c.satisfied_by(x))
    }

    pub fn is_feasible(&self) -> bool {
        self.witness().is_some()
    }

    /// A point satisfying every constraint, if one exists.
    pub fn witness(&self) -> Option<QVec> {
        // Independent variable blocks can be solved separately; this keeps
        // product systems (base × fiber) from feeding one big elimination.
        let blocks = self.variable_blocks();
        let mut point = zeros(self.dim);
        let mut leftover: Vec<&LinCon> = Vec::new();
        for c in &self.cons {
            if c.is_constant() {
                if !c.constant_holds() {
                    return None;
                }
            } else {
                leftover.push(c);
            }
        }
        for block in blocks {
            let local: Vec<LinCon> = leftover
                .iter()
                .filter(|c| c.coeffs.iter().enumerate().any(|(i, v)| !v.is_zero() && block.contains(&i)))
                .map(|c| LinCon {
                    coeffs: block.iter().map(|&i| c.coeffs[i].clone()).collect(),
                    rhs: c.rhs.clone(),
                    strict: c.strict,
                })
                .collect();
            let w = fm_witness(local, block.len())?;
            for (slot, &var) in block.iter().enumerate() {
                point[var] = w[slot].clone();
            }
        }
        Some(point)
    }

    /// Partition of the variables into connected blocks (variables linked
    /// when they appear in a common constraint). Sorted within blocks.
    fn variable_blocks(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for c in &self.cons {
            let vars: Vec<usize> = c
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, _)| i)
                .collect();
            for w in vars.windows(2) {
                let a = find(&mut parent, w[0]);
                let b = find(&mut parent, w[1]);
                parent[a] = b;
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..self.dim {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        let mut blocks: Vec<Vec<usize>> = groups.into_values().collect();
        blocks.sort();
        blocks
    }
}

/// Project a constraint system onto the complement of `eliminate`:
/// Fourier–Motzkin run over just those variables. Returns `None` when the
/// system is infeasible; otherwise the constraints of the projection
/// (coefficients on eliminated slots are zero).
pub fn fm_project(cons: Vec<LinCon>, eliminate: &[usize]) -> Option<Vec<LinCon>> {
    let mut current = prune(cons)?;
    for &var in eliminate {
        let dim = current.first().map_or(0, |c| c.coeffs.len());
        if dim == 0 {
            break;
        }
        let mut next: Vec<LinCon> = Vec::new();
        let (mut lo, mut hi) = (Vec::new(), Vec::new());
        for c in &current {
            let cv = &c.coeffs[var];
            if cv.is_positive() {
                lo.push(c.clone());
            } else if cv.is_negative() {
                hi.push(c.clone());
            } else {
                next.push(c.clone());
            }
        }
        for l in &lo {
            for h in &hi {
                let wl = -h.coeffs[var].clone();
                let wh = l.coeffs[var].clone();
                let coeffs: QVec = (0..l.coeffs.len())
                    .map(|i| &wl * &l.coeffs[i] + &wh * &h.coeffs[i])
                    .collect();
                let rhs = &wl * &l.rhs + &wh * &h.rhs;
                next.push(LinCon { coeffs, rhs, strict: l.strict || h.strict });
            }
        }
        current = prune(next)?;
    }
    Some(current)
}

/// Dedup constraints with identical (primitive-normalized) coefficient
/// vectors, keeping the tightest right-hand side.
fn prune(cons: Vec<LinCon>) -> Option<Vec<LinCon>> {
    // BTreeMap keeps the constraint order deterministic; witnesses feed
    // reported outputs, so iteration order must not depend on hashing.
    let mut best: BTreeMap<Vec<BigInt>, LinCon> = BTreeMap::new();
    let mut constants_ok = true;
    for c in cons {
        if c.is_constant() {
            constants_ok &= c.constant_holds();
            continue;
        }
        // Positive scaling only: direction of the inequality is preserved.
        let key = primitive(&c.coeffs, false).expect("nonzero");
        let scale = {
            // first nonzero entry ratio coeff/int gives the positive factor
            let idx = c.coeffs.iter().position(|v| !v.is_zero()).unwrap();
            &c.coeffs[idx] / Rat::from_integer(key[idx].clone())
        };
        let rhs = &c.rhs / &scale;
        let cand = LinCon { coeffs: key.iter().map(|i| Rat::from_integer(i.clone())).collect(), rhs, strict: c.strict };
        match best.get_mut(&key) {
            None => {
                best.insert(key, cand);
            }
            Some(prev) => {
                let tighter = cand.rhs > prev.rhs || (cand.rhs == prev.rhs && cand.strict);
                if tighter {
                    *prev = cand;
                }
            }
        }
    }
    if !constants_ok {
        return None;
    }
    Some(best.into_values().collect())
}

/// Fourier–Motzkin elimination with back-substitution.
fn fm_witness(cons: Vec<LinCon>, dim: usize) -> Option<QVec> {
    // stages[i] = (variable eliminated, constraints before elimination)
    let mut stages: Vec<(usize, Vec<LinCon>)> = Vec::new();
    let mut current = prune(cons)?;
    let mut remaining: Vec<usize> = (0..dim).collect();

    while !remaining.is_empty() {
        if remaining.len() == 1 {
            let var = remaining[0];
            if !interval_feasible(&current, var) {
                return None;
            }
            stages.push((var, current));
            remaining.clear();
            break;
        }
        // Pick the variable with the fewest pos×neg products.
        let (pos, var) = remaining
            .iter()
            .map(|&v| {
                let p = current.iter().filter(|c| c.coeffs[v].is_positive()).count();
                let n = current.iter().filter(|c| c.coeffs[v].is_negative()).count();
                (p * n, v)
            })
            .min()
            .unwrap();
        let _ = pos;
        let mut next: Vec<LinCon> = Vec::new();
        let (mut lo, mut hi, mut zero) = (Vec::new(), Vec::new(), Vec::new());
        for c in &current {
            let cv = &c.coeffs[var];
            if cv.is_positive() {
                lo.push(c);
            } else if cv.is_negative() {
                hi.push(c);
            } else {
                zero.push(c.clone());
            }
        }
        for l in &lo {
            for h in &hi {
                // l: a·x ≥ b with a_var > 0, h: a'·x ≥ b' with a'_var < 0.
                // Combine with weights |a'_var| and a_var to cancel var.
                let wl = -h.coeffs[var].clone();
                let wh = l.coeffs[var].clone();
                let coeffs: QVec = (0..dim)
                    .map(|i| &wl * &l.coeffs[i] + &wh * &h.coeffs[i])
                    .collect();
                let rhs = &wl * &l.rhs + &wh * &h.rhs;
                next.push(LinCon { coeffs, rhs, strict: l.strict || h.strict });
            }
        }
        next.extend(zero);
        stages.push((var, current));
        current = prune(next)?;
        remaining.retain(|&v| v != var);
    }

    // Constant constraints are absorbed (and checked) by `prune` at every
    // stage, so nothing is left to verify here.
    let _ = current;

    // Back-substitute in reverse elimination order.
    let mut x = zeros(dim);
    let mut known: Vec<bool> = vec![false; dim];
    for (var, cons) in stages.iter().rev() {
        let val = pick_value(cons, *var, &x, &known)?;
        x[*var] = val;
        known[*var] = true;
    }
    Some(x)
}

/// Feasibility of a one-variable stage without forming products.
fn interval_feasible(cons: &[LinCon], var: usize) -> bool {
    let mut lo: Option<(Rat, bool)> = None;
    let mut hi: Option<(Rat, bool)> = None;
    for c in cons {
        let a = &c.coeffs[var];
        if a.is_zero() {
            if !c.constant_holds() {
                return false;
            }
            continue;
        }
        let bound = &c.rhs / a;
        if a.is_positive() {
            if lo.as_ref().is_none_or(|(b, s)| bound > *b || (bound == *b && c.strict && !s)) {
                lo = Some((bound, c.strict));
            }
        } else if hi.as_ref().is_none_or(|(b, s)| bound < *b || (bound == *b && c.strict && !s)) {
            hi = Some((bound, c.strict));
        }
    }
    match (lo, hi) {
        (Some((l, ls)), Some((h, hs))) => l < h || (l == h && !ls && !hs),
        _ => true,
    }
}

fn pick_value(cons: &[LinCon], var: usize, x: &[Rat], known: &[bool]) -> Option<Rat> {
    let mut lo: Option<(Rat, bool)> = None;
    let mut hi: Option<(Rat, bool)> = None;
    for c in cons {
        let a = &c.coeffs[var];
        if a.is_zero() {
            continue;
        }
        let mut rest = c.rhs.clone();
        for (i, coeff) in c.coeffs.iter().enumerate() {
            if i != var && !coeff.is_zero() {
                debug_assert!(known[i], "back-substitution saw an unknown variable");
                rest -= coeff * &x[i];
            }
        }
        let bound = &rest / a;
        if a.is_positive() {
            if lo.as_ref().is_none_or(|(b, s)| bound > *b || (bound == *b && c.strict && !s)) {
                lo = Some((bound, c.strict));
            }
        } else if hi.as_ref().is_none_or(|(b, s)| bound < *b || (bound == *b && c.strict && !s)) {
            hi = Some((bound, c.strict));
        }
    }
    Some(match (lo, hi) {
        (None, None) => Rat::zero(),
        (Some((l, strict)), None) => {
            if strict {
                l + Rat::from_integer(BigInt::from(1))
            } else {
                l
            }
        }
        (None, Some((h, strict))) => {
            if strict {
                h - Rat::from_integer(BigInt::from(1))
            } else {
                h
            }
        }
        (Some((l, ls)), Some((h, hs))) => {
            if l == h {
                if ls || hs {
                    return None;
                }
                l
            } else if l > h {
                return None;
            } else {
                (l + h) / Rat::from_integer(BigInt::from(2))
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_i};

    fn con(coeffs: &[i64], rhs: i64, strict: bool) -> LinCon {
        LinCon {
            coeffs: coeffs.iter().map(|&c| rat_i(c)).collect(),
            rhs: rat_i(rhs),
            strict,
        }
    }

    #[test]
    fn simplex_is_feasible_with_witness() {
        let mut sys = LinSystem::new(2);
        sys.push(con(&[1, 0], 0, false));
        sys.push(con(&[0, 1], 0, false));
        sys.push(con(&[-1, -1], -1, false));
        let w = sys.witness().unwrap();
        assert!(sys.satisfied_by(&w));
    }

    #[test]
    fn contradictory_strict_pair_is_infeasible() {
        let mut sys = LinSystem::new(1);
        sys.push(con(&[1], 0, true));
        sys.push(con(&[-1], 0, false));
        assert!(!sys.is_feasible());
    }

    #[test]
    fn open_interval_witness_is_interior() {
        let mut sys = LinSystem::new(1);
        sys.push(con(&[1], 0, true));
        sys.push(con(&[-1], -1, true));
        let w = sys.witness().unwrap();
        assert!(w[0] > rat_i(0) && w[0] < rat_i(1));
    }

    #[test]
    fn equality_via_push_eq() {
        let mut sys = LinSystem::new(2);
        sys.push_eq(vec![rat_i(1), rat_i(1)], rat_i(3));
        sys.push(con(&[1, -1], 1, false));
        let w = sys.witness().unwrap();
        assert_eq!(&w[0] + &w[1], rat_i(3));
        assert!(&w[0] - &w[1] >= rat_i(1));
    }

    #[test]
    fn degenerate_point_with_strict_is_infeasible() {
        // x ≥ 1, x ≤ 1, x > 1 − nothing
        let mut sys = LinSystem::new(1);
        sys.push(con(&[1], 1, false));
        sys.push(con(&[-1], -1, false));
        sys.push(con(&[1], 1, true));
        assert!(!sys.is_feasible());
    }

    #[test]
    fn independent_blocks_solve_separately() {
        let mut sys = LinSystem::new(4);
        sys.push(con(&[1, 0, 0, 0], 2, false));
        sys.push(con(&[0, 1, 0, 0], 3, true));
        sys.push(con(&[0, 0, 1, 1], 0, false));
        sys.push(con(&[0, 0, -1, -1], -1, false));
        let w = sys.witness().unwrap();
        assert!(sys.satisfied_by(&w));
    }

    #[test]
    fn higher_dim_empty_box() {
        let mut sys = LinSystem::new(3);
        for i in 0..3 {
            let mut lo = [0i64; 3];
            lo[i] = 1;
            sys.push(con(&lo.map(|v| v), 0, false));
            let hi = lo.map(|v| -v);
            sys.push(con(&hi, -1, false));
        }
        // cut with x+y+z > 3: box [0,1]^3 has max 3, strict fails
        sys.push(LinCon::gt(vec![rat_i(1), rat_i(1), rat_i(1)], rat(3, 1)));
        assert!(!sys.is_feasible());
    }
}
