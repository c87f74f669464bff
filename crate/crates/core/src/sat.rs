//! Propositional grounding layer shared by both bounded model finders.
//!
//! Formulas are built as Tseitin gates over a `varisat` solver. Constants
//! are folded eagerly and structurally equal conjunctions share one gate.

use std::collections::HashMap;

use varisat::{ExtendFormula, Lit, Solver};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bit {
    Const(bool),
    Lit(Lit),
}

impl Bit {
    pub const TRUE: Bit = Bit::Const(true);
    pub const FALSE: Bit = Bit::Const(false);

    pub fn negate(self) -> Bit {
        match self {
            Bit::Const(b) => Bit::Const(!b),
            Bit::Lit(l) => Bit::Lit(!l),
        }
    }
}

/// Grounded instance size exceeded the configured ceiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Overflow {
    pub size: u64,
}

pub struct Encoder {
    solver: Solver<'static>,
    and_cache: HashMap<Vec<Lit>, Lit>,
    at_most_cache: HashMap<(u32, Vec<Lit>), Bit>,
    vars: usize,
    /// Total literal occurrences in emitted clauses.
    size: u64,
    ceiling: u64,
    /// Becomes false after a constant-false assertion.
    consistent: bool,
}

impl Encoder {
    pub fn new(ceiling: u64) -> Self {
        Encoder {
            solver: Solver::new(),
            and_cache: HashMap::new(),
            at_most_cache: HashMap::new(),
            vars: 0,
            size: 0,
            ceiling,
            consistent: true,
        }
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn check_ceiling(&self) -> Result<(), Overflow> {
        if self.size > self.ceiling {
            Err(Overflow { size: self.size })
        } else {
            Ok(())
        }
    }

    pub fn fresh(&mut self) -> Bit {
        self.vars += 1;
        Bit::Lit(self.solver.new_lit())
    }

    fn clause(&mut self, lits: &[Lit]) {
        self.size += lits.len() as u64;
        self.solver.add_clause(lits);
    }

    /// Add the disjunction of `bits` as a hard clause.
    pub fn add_clause(&mut self, bits: &[Bit]) {
        let mut lits = Vec::with_capacity(bits.len());
        for b in bits {
            match b {
                Bit::Const(true) => return,
                Bit::Const(false) => {}
                Bit::Lit(l) => lits.push(*l),
            }
        }
        if lits.is_empty() {
            self.consistent = false;
        }
        self.clause(&lits);
    }

    pub fn assert(&mut self, b: Bit) {
        self.add_clause(&[b]);
    }

    pub fn not(&self, b: Bit) -> Bit {
        b.negate()
    }

    pub fn and(&mut self, bits: impl IntoIterator<Item = Bit>) -> Bit {
        let mut lits = Vec::new();
        for b in bits {
            match b {
                Bit::Const(true) => {}
                Bit::Const(false) => return Bit::FALSE,
                Bit::Lit(l) => lits.push(l),
            }
        }
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return Bit::FALSE;
        }
        match lits.len() {
            0 => return Bit::TRUE,
            1 => return Bit::Lit(lits[0]),
            _ => {}
        }
        if let Some(g) = self.and_cache.get(&lits) {
            return Bit::Lit(*g);
        }
        let Bit::Lit(g) = self.fresh() else { unreachable!() };
        for &l in &lits {
            self.clause(&[!g, l]);
        }
        let mut big: Vec<Lit> = lits.iter().map(|l| !*l).collect();
        big.push(g);
        self.clause(&big);
        self.and_cache.insert(lits, g);
        Bit::Lit(g)
    }

    pub fn or(&mut self, bits: impl IntoIterator<Item = Bit>) -> Bit {
        let neg: Vec<Bit> = bits.into_iter().map(Bit::negate).collect();
        self.and(neg).negate()
    }

    pub fn implies(&mut self, a: Bit, b: Bit) -> Bit {
        self.or([a.negate(), b])
    }

    pub fn iff(&mut self, a: Bit, b: Bit) -> Bit {
        let ab = self.implies(a, b);
        let ba = self.implies(b, a);
        self.and([ab, ba])
    }

    /// True iff at most `k` of `bits` are true. Sequential counter with
    /// both directions of every counter cell, so the result is a full
    /// equivalence and may occur under negation.
    pub fn at_most(&mut self, k: u32, bits: &[Bit]) -> Bit {
        let forced = bits.iter().filter(|b| **b == Bit::TRUE).count() as u64;
        if forced > k as u64 {
            return Bit::FALSE;
        }
        let k = k - forced as u32;
        let mut lits: Vec<Lit> = bits
            .iter()
            .filter_map(|b| match b {
                Bit::Lit(l) => Some(*l),
                Bit::Const(_) => None,
            })
            .collect();
        lits.sort_unstable();
        if lits.len() as u64 <= k as u64 {
            return Bit::TRUE;
        }
        if k == 0 {
            return self.and(lits.iter().map(|l| Bit::Lit(!*l)));
        }
        let key = (k, lits.clone());
        if let Some(b) = self.at_most_cache.get(&key) {
            return *b;
        }
        let k = k as usize;
        // count[j] = "at least j+1 of the literals seen so far are true"
        let mut count = vec![Bit::FALSE; k + 1];
        for &l in &lits {
            let x = Bit::Lit(l);
            let mut next = count.clone();
            for j in 0..=k {
                let carry = if j == 0 { x } else { self.and([x, count[j - 1]]) };
                next[j] = self.or([count[j], carry]);
            }
            count = next;
        }
        let out = count[k].negate();
        self.at_most_cache.insert(key, out);
        out
    }

    pub fn at_least(&mut self, k: u32, bits: &[Bit]) -> Bit {
        if k == 0 {
            return Bit::TRUE;
        }
        self.at_most(k - 1, bits).negate()
    }

    /// At most one of `bits`, asserted with the pairwise encoding.
    pub fn assert_at_most_one(&mut self, bits: &[Bit]) {
        for i in 0..bits.len() {
            for j in i + 1..bits.len() {
                self.add_clause(&[bits[i].negate(), bits[j].negate()]);
            }
        }
    }

    fn run(&mut self, assumptions: &[Lit]) -> Option<Model> {
        if !self.consistent {
            return None;
        }
        self.solver.assume(assumptions);
        match self.solver.solve() {
            Ok(true) => {
                let lits = self.solver.model().unwrap_or_default();
                let mut vals = vec![false; self.vars + 1];
                for l in lits {
                    if l.index() < vals.len() {
                        vals[l.index()] = l.is_positive();
                    }
                }
                Some(Model { vals })
            }
            Ok(false) => None,
            Err(e) => panic!("SAT backend failure: {e}"),
        }
    }

    pub fn solve(&mut self) -> Option<Model> {
        self.run(&[])
    }

    /// The model whose values on `order` are lexicographically least
    /// (false before true), or `None` when unsatisfiable.
    pub fn solve_lexmin(&mut self, order: &[Bit]) -> Option<Model> {
        let mut model = self.run(&[])?;
        let mut fixed: Vec<Lit> = Vec::new();
        for b in order {
            let Bit::Lit(l) = *b else { continue };
            if !model.lit(l) {
                fixed.push(!l);
                continue;
            }
            fixed.push(!l);
            match self.run(&fixed) {
                Some(m) => model = m,
                None => {
                    fixed.pop();
                    fixed.push(l);
                }
            }
        }
        self.solver.assume(&[]);
        Some(model)
    }

    /// Count models distinct on `projection`, up to `limit`. Adds blocking
    /// clauses, so the encoder is spent afterwards.
    pub fn count_models(&mut self, projection: &[Bit], limit: u64) -> (u64, bool) {
        let lits: Vec<Lit> = projection
            .iter()
            .filter_map(|b| match b {
                Bit::Lit(l) => Some(*l),
                Bit::Const(_) => None,
            })
            .collect();
        let mut n = 0;
        while let Some(m) = self.run(&[]) {
            n += 1;
            if n >= limit {
                return (n, true);
            }
            let block: Vec<Lit> = lits.iter().map(|l| if m.lit(*l) { !*l } else { *l }).collect();
            if block.is_empty() {
                break;
            }
            self.clause(&block);
        }
        (n, false)
    }
}

#[derive(Clone, Debug)]
pub struct Model {
    vals: Vec<bool>,
}

impl Model {
    pub fn lit(&self, l: Lit) -> bool {
        let v = self.vals.get(l.index()).copied().unwrap_or(false);
        v == l.is_positive()
    }

    pub fn value(&self, b: Bit) -> bool {
        match b {
            Bit::Const(c) => c,
            Bit::Lit(l) => self.lit(l),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(e: &mut Encoder, n: usize) -> Vec<Bit> {
        (0..n).map(|_| e.fresh()).collect()
    }

    #[test]
    fn at_most_is_an_equivalence() {
        // every assignment of 4 inputs: the gate agrees with a popcount
        for k in 0..5u32 {
            for mask in 0u32..16 {
                let mut e = Encoder::new(u64::MAX);
                let xs = vars(&mut e, 4);
                let g = e.at_most(k, &xs);
                for (i, x) in xs.iter().enumerate() {
                    e.assert(if mask >> i & 1 == 1 { *x } else { x.negate() });
                }
                let m = e.solve().unwrap();
                assert_eq!(m.value(g), mask.count_ones() <= k, "k={k} mask={mask:b}");
            }
        }
    }

    #[test]
    fn lexmin_prefers_false_in_order() {
        let mut e = Encoder::new(u64::MAX);
        let xs = vars(&mut e, 3);
        let at_least_two = e.at_least(2, &xs);
        e.assert(at_least_two);
        let m = e.solve_lexmin(&xs).unwrap();
        let got: Vec<bool> = xs.iter().map(|x| m.value(*x)).collect();
        assert_eq!(got, [false, true, true]);
    }

    #[test]
    fn counting() {
        let mut e = Encoder::new(u64::MAX);
        let xs = vars(&mut e, 3);
        let one = e.at_most(1, &xs);
        e.assert(one);
        assert_eq!(e.count_models(&xs, 100), (4, false));
    }

    #[test]
    fn constant_false_assertion_is_unsat() {
        let mut e = Encoder::new(u64::MAX);
        e.assert(Bit::FALSE);
        assert!(e.solve().is_none());
    }
}
