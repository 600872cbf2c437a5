//! Smith normal form over the integers and abelian group invariants.

/// `free_rank` copies of ℤ plus `ℤ/d` for each torsion coefficient, `d1 | d2 | ...`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl AbelianInvariants {
    pub fn is_free_abelian(&self) -> bool {
        self.torsion.is_empty()
    }

    /// From the nonzero invariant factors of a relation matrix on `generators` columns.
    pub fn from_factors(generators: usize, factors: &[i64]) -> Self {
        AbelianInvariants {
            free_rank: generators - factors.len(),
            torsion: factors.iter().copied().filter(|&d| d > 1).collect(),
        }
    }
}

impl std::fmt::Display for AbelianInvariants {
    /// E.g. `Z^2 + Z/2`, or `0` for the trivial group.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("Z^{n}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, x, y) with a x + b y = g >= 0
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Nonzero invariant factors of an integer matrix, positive and in divisibility order.
pub fn invariant_factors(m: &[Vec<i64>]) -> Vec<i64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .find(|&(i, j)| a[i][j] != 0)
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            // clear column t below the pivot with unimodular row combinations
            for i in t + 1..rows {
                if a[i][t] == 0 {
                    continue;
                }
                let (p, q) = (a[t][t], a[i][t]);
                if q % p == 0 {
                    let k = q / p;
                    for j in t..cols {
                        a[i][j] -= k * a[t][j];
                    }
                    continue;
                }
                let (g, x, y) = ext_gcd(p, q);
                let (u, v) = (p / g, q / g);
                for j in t..cols {
                    let (rt, ri) = (a[t][j], a[i][j]);
                    a[t][j] = x * rt + y * ri;
                    a[i][j] = -v * rt + u * ri;
                }
            }
            // same for row t with column combinations
            let mut dirty = false;
            for j in t + 1..cols {
                if a[t][j] == 0 {
                    continue;
                }
                let (p, q) = (a[t][t], a[t][j]);
                if q % p == 0 {
                    let k = q / p;
                    for row in a.iter_mut().skip(t) {
                        row[j] -= k * row[t];
                    }
                    continue;
                }
                let (g, x, y) = ext_gcd(p, q);
                let (u, v) = (p / g, q / g);
                for row in a.iter_mut().skip(t) {
                    let (ct, cj) = (row[t], row[j]);
                    row[t] = x * ct + y * cj;
                    row[j] = -v * ct + u * cj;
                }
                dirty = true;
            }
            if dirty && (t + 1..rows).any(|i| a[i][t] != 0) {
                continue;
            }
            // pivot must divide the rest; otherwise fold an offending row in
            let p = a[t][t];
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs() as i64);
        t += 1;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(invariant_factors(&[vec![2]]), vec![2]);
        assert_eq!(invariant_factors(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(invariant_factors(&[vec![4, 6]]), vec![2]);
        assert_eq!(invariant_factors(&[vec![0, 0]]), Vec::<i64>::new());
        assert_eq!(invariant_factors(&[]), Vec::<i64>::new());
    }

    #[test]
    fn display() {
        assert_eq!(AbelianInvariants::from_factors(1, &[2]).to_string(), "Z/2");
        assert_eq!(AbelianInvariants::from_factors(2, &[]).to_string(), "Z^2");
        assert_eq!(AbelianInvariants::from_factors(1, &[1]).to_string(), "0");
    }
}
