//! Independent oracles and fixture helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use tangleforge::equiv::SplittingTuple;
use tangleforge::{FreeTargetHom, Letter, Sign};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn hom_fixture(name: &str) -> FreeTargetHom {
    fixture_text(name).parse().unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn tuple_fixture(name: &str) -> SplittingTuple {
    fixture_text(name).parse().unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn all_fixtures() -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

pub fn tuple_fixtures() -> Vec<String> {
    all_fixtures().into_iter().filter(|n| n.ends_with(".tuple")).collect()
}

/// Quadratic rescanning reduction: delete the first adjacent inverse pair until none is left.
pub fn naive_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut w = letters.to_vec();
    'again: loop {
        for i in 0..w.len().saturating_sub(1) {
            if w[i].gen == w[i + 1].gen && w[i].sign != w[i + 1].sign {
                w.drain(i..i + 2);
                continue 'again;
            }
        }
        return w;
    }
}

pub fn letter_inverse(l: Letter) -> Letter {
    Letter::new(l.gen, if l.sign == Sign::Pos { Sign::Neg } else { Sign::Pos })
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Determinant by cofactor-free Gaussian elimination over rationals kept as
/// numerator/denominator pairs. Slow, exact, and unrelated to the library's code.
fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<(i128, i128)>> = m.iter().map(|r| r.iter().map(|&x| (x, 1)).collect()).collect();
    let norm = |(p, q): (i128, i128)| {
        let g = gcd(p, q).max(1);
        let s = if q < 0 { -1 } else { 1 };
        (s * p / g, s * q / g)
    };
    let mut sign = 1;
    let mut out = (1i128, 1i128);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| a[r][c].0 != 0) else {
            return 0;
        };
        if p != c {
            a.swap(p, c);
            sign = -sign;
        }
        let piv = a[c][c];
        out = norm((out.0 * piv.0, out.1 * piv.1));
        for r in c + 1..n {
            let f = norm((a[r][c].0 * piv.1, a[r][c].1 * piv.0));
            for k in c..n {
                let (x, y) = a[c][k];
                let (u, v) = a[r][k];
                let prod = norm((f.0 * x, f.1 * y));
                a[r][k] = norm((u * prod.1 - prod.0 * v, v * prod.1));
            }
        }
    }
    assert_eq!(out.1, 1, "integer matrix has integer determinant");
    sign * out.0
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut with: Vec<Vec<usize>> = subsets(n - 1, k - 1);
    for s in &mut with {
        s.push(n - 1);
    }
    let mut out = subsets(n - 1, k);
    out.extend(with);
    out
}

/// Invariant factors as quotients of successive gcds of k×k minors.
pub fn determinantal_factors(m: &[Vec<i64>]) -> Vec<i64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=rows.min(cols) {
        let mut d = 0i128;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c] as i128).collect()).collect();
                d = gcd(d, det(&minor));
            }
        }
        if d == 0 {
            break;
        }
        out.push((d / prev) as i64);
        prev = d;
    }
    out
}

/// Rank over the rationals, by the same slow elimination.
pub fn rational_rank(m: &[Vec<i64>]) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut best = 0;
    for k in 1..=m.len().min(cols) {
        let found = subsets(m.len(), k).iter().any(|rs| {
            subsets(cols, k).iter().any(|cs| {
                let minor: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c] as i128).collect()).collect();
                det(&minor) != 0
            })
        });
        if !found {
            break;
        }
        best = k;
    }
    best
}

/// Cycles of the union of two perfect matchings, by walking them alternately.
pub fn alternating_cycles(n: usize, m1: &[(u32, u32)], m2: &[(u32, u32)]) -> usize {
    let partner = |m: &[(u32, u32)]| {
        let mut p = vec![usize::MAX; n + 1];
        for &(i, j) in m {
            p[i as usize] = j as usize;
            p[j as usize] = i as usize;
        }
        p
    };
    let (p1, p2) = (partner(m1), partner(m2));
    let mut seen = vec![false; n + 1];
    let mut cycles = 0;
    for start in 1..=n {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut v = start;
        loop {
            seen[v] = true;
            let u = p1[v];
            seen[u] = true;
            v = p2[u];
            if v == start {
                break;
            }
        }
    }
    cycles
}
