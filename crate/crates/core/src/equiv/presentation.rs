//! Finite presentations with named generators and a budgeted Tietze simplifier.

use std::fmt;

use crate::equiv::smith::{invariant_factors, AbelianInvariants};
use crate::words::{free_reduce, Invertible};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PLetter {
    pub gen: usize,
    pub inv: bool,
}

impl PLetter {
    pub fn new(gen: usize, inv: bool) -> Self {
        PLetter { gen, inv }
    }

    fn exponent(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }
}

impl Invertible for PLetter {
    fn inverse(self) -> Self {
        PLetter::new(self.gen, !self.inv)
    }
}

pub type Relator = Vec<PLetter>;

fn inverse_of(w: &[PLetter]) -> Relator {
    w.iter().rev().map(|l| l.inverse()).collect()
}

/// Free then cyclic reduction; conjugating a relator leaves the group alone.
fn normalize(w: &[PLetter]) -> Relator {
    let (r, _) = free_reduce(w);
    let (mut i, mut j) = (0, r.len());
    while j >= i + 2 && r[i].inverse() == r[j - 1] {
        i += 1;
        j -= 1;
    }
    r[i..j].to_vec()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    /// Cyclically reduced and nonempty.
    pub relators: Vec<Relator>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Relator>) -> Self {
        let relators = relators
            .iter()
            .map(|r| normalize(r))
            .filter(|r| !r.is_empty())
            .collect();
        Presentation { generators, relators }
    }

    /// Relator-free, hence visibly a free group.
    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Vec::len).sum()
    }

    pub fn exponent_matrix(&self) -> Vec<Vec<i64>> {
        self.relators
            .iter()
            .map(|r| {
                let mut row = vec![0i64; self.generators.len()];
                for l in r {
                    row[l.gen] += l.exponent();
                }
                row
            })
            .collect()
    }

    pub fn abelianization(&self) -> AbelianInvariants {
        AbelianInvariants::from_factors(self.generators.len(), &invariant_factors(&self.exponent_matrix()))
    }

    pub fn relator_string(&self, r: &[PLetter]) -> String {
        let mut parts = Vec::new();
        let mut k = 0;
        while k < r.len() {
            let mut run = 1;
            while k + run < r.len() && r[k + run] == r[k] {
                run += 1;
            }
            let e = run as i64 * r[k].exponent();
            let name = &self.generators[r[k].gen];
            parts.push(if e == 1 { name.clone() } else { format!("{name}^{e}") });
            k += run;
        }
        parts.join(" ")
    }

    /// Removes generator `x` using relator `ri`, in which it occurs exactly once.
    fn eliminate(&mut self, ri: usize, x: usize) {
        let r = self.relators.remove(ri);
        let at = r.iter().position(|l| l.gen == x).expect("generator occurs");
        // rotate to x^e w, so x^e = w⁻¹
        let rest: Relator = r[at + 1..].iter().chain(&r[..at]).copied().collect();
        let value = if r[at].inv { rest } else { inverse_of(&rest) };
        let value_inv = inverse_of(&value);
        for rel in &mut self.relators {
            let mut out = Vec::with_capacity(rel.len());
            for &l in rel.iter() {
                if l.gen == x {
                    out.extend_from_slice(if l.inv { &value_inv } else { &value });
                } else {
                    out.push(l);
                }
            }
            *rel = normalize(&out);
        }
        self.generators.remove(x);
        for rel in &mut self.relators {
            for l in rel.iter_mut() {
                if l.gen > x {
                    l.gen -= 1;
                }
            }
        }
    }

    fn single_occurrence(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for (ri, r) in self.relators.iter().enumerate() {
            if best.is_some_and(|(len, _, _)| len <= r.len()) {
                continue;
            }
            let mut count = vec![0usize; self.generators.len()];
            for l in r {
                count[l.gen] += 1;
            }
            if let Some(x) = (0..count.len()).rev().find(|&x| count[x] == 1) {
                best = Some((r.len(), ri, x));
            }
        }
        best.map(|(_, ri, x)| (ri, x))
    }
}

impl fmt::Display for Presentation {
    /// `<x, y | r1, r2>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.relator_string(r)).collect();
        write!(f, "<{} | {}>", self.generators.join(", "), rels.join(", "))
    }
}

/// Outcome of [`simplify`]: the result and how many steps it took.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplified {
    pub presentation: Presentation,
    pub steps: usize,
    pub exhausted: bool,
}

/// Tietze heuristic. Moves, in priority order: drop a trivial relator; use a
/// relator in which some generator occurs once to eliminate that generator;
/// replace a relator by its product with a conjugate of another relator (or
/// its inverse) when that strictly shortens it. Each move and each product
/// candidate tried costs one step.
pub fn simplify(p: &Presentation, budget: usize) -> Simplified {
    let mut cur = Presentation::new(p.generators.clone(), p.relators.clone());
    let mut steps = 0;
    'outer: while steps < budget {
        if let Some(i) = cur.relators.iter().position(Vec::is_empty) {
            cur.relators.remove(i);
            steps += 1;
            continue;
        }
        if let Some((ri, x)) = cur.single_occurrence() {
            cur.eliminate(ri, x);
            steps += 1;
            continue;
        }
        let n = cur.relators.len();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for other in [cur.relators[j].clone(), inverse_of(&cur.relators[j])] {
                    for rot in 0..other.len() {
                        steps += 1;
                        if steps > budget {
                            break 'outer;
                        }
                        let mut cand = cur.relators[i].clone();
                        cand.extend(other[rot..].iter().chain(&other[..rot]));
                        let cand = normalize(&cand);
                        if cand.len() < cur.relators[i].len() {
                            cur.relators[i] = cand;
                            continue 'outer;
                        }
                    }
                }
            }
        }
        break;
    }
    cur.relators.retain(|r| !r.is_empty());
    Simplified {
        presentation: cur,
        exhausted: steps >= budget,
        steps: steps.min(budget),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(gen: usize, e: i64) -> Vec<PLetter> {
        std::iter::repeat_n(PLetter::new(gen, e < 0), e.unsigned_abs() as usize).collect()
    }

    fn pres(gens: &[&str], rels: Vec<Relator>) -> Presentation {
        Presentation::new(gens.iter().map(|s| s.to_string()).collect(), rels)
    }

    #[test]
    fn substitution_kills_a_generator() {
        let p = pres(&["x", "y"], vec![[l(0, 1), l(1, -1)].concat()]);
        let s = simplify(&p, 100).presentation;
        assert_eq!(s.to_string(), "<x | >");
    }

    #[test]
    fn square_is_stuck() {
        let p = pres(&["x"], vec![l(0, 2)]);
        let s = simplify(&p, 100).presentation;
        assert_eq!(s.to_string(), "<x | x^2>");
        assert_eq!(s.abelianization(), AbelianInvariants { free_rank: 0, torsion: vec![2] });
    }

    #[test]
    fn product_move_shortens() {
        // a repeated relator cancels against the inverse of its twin
        let r1 = vec![
            PLetter::new(0, false),
            PLetter::new(1, false),
            PLetter::new(0, false),
            PLetter::new(1, true),
            PLetter::new(0, true),
            PLetter::new(1, true),
        ];
        let p = pres(&["x", "y"], vec![r1.clone(), r1]);
        let s = simplify(&p, 1000);
        assert_eq!(s.presentation.relators.len(), 1);
    }

    #[test]
    fn normalization_drops_trivial() {
        let p = pres(&["x"], vec![[l(0, 1), l(0, -1)].concat()]);
        assert!(p.is_free());
        let q = pres(&["x", "y"], vec![[l(1, 1), l(0, 2), l(1, -1)].concat()]);
        assert_eq!(q.relators, vec![l(0, 2)]);
    }

    #[test]
    fn budget_zero_returns_input() {
        let p = pres(&["x", "y"], vec![[l(0, 1), l(1, -1)].concat()]);
        let s = simplify(&p, 0);
        assert_eq!(s.presentation, p);
        assert!(s.exhausted);
    }
}
