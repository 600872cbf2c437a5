//! Realizing a bounding homomorphism as a diagram.
//!
//! Stage one lays out dashes for every image word and connects them through
//! three tracked free reductions: `w1 = φ(p1)⋯φ(p2b)`, the commutator product
//! `w2 = ∏ φ(ai)φ(bi)φ(ai)⁻¹φ(bi)⁻¹` (each a/b dash meets the polygon twice),
//! and finally `(w2')⁻¹w1'`. Puncture loops tie their middle dash to the
//! puncture and pair the rest symmetrically.
//!
//! Stage two folds the wedge of image words, each edge tagged with the
//! stage-one component of its dash. Every fold between different components
//! is a band sum merging them.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diagram::{ArcStructure, BandEvent, Census, Component, ComponentKind, Dash, Diagram, Trace};
use crate::folding::{ComponentTag, FoldGraph, FoldRecord};
use crate::surface::{FreeTargetHom, SurfaceError};
use crate::unionfind::UnionFind;
use crate::words::{free_reduce, Family, Generator, Invertible, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("not a bounding homomorphism: {}", .0.join("; "))]
    NotBounding(Vec<String>),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

#[derive(Clone, Debug)]
pub struct RealizationResult {
    pub diagram: Diagram,
    pub preliminary_census: Census,
    pub fold_trace: Vec<FoldRecord>,
    pub band_count: usize,
}

struct Layout {
    dashes: Vec<Dash>,
    /// First dash id of each owner.
    start: BTreeMap<Generator, usize>,
}

fn lay_out(hom: &FreeTargetHom) -> Layout {
    let mut dashes = Vec::new();
    let mut start = BTreeMap::new();
    for (owner, w) in hom.ordered_images() {
        start.insert(owner, dashes.len());
        for (pos, l) in w.letters().iter().enumerate() {
            dashes.push(Dash {
                owner,
                pos,
                letter: l.gen,
                sign: l.sign,
                component: usize::MAX,
            });
        }
    }
    Layout { dashes, start }
}

fn ids_on(layout: &Layout, hom: &FreeTargetHom, owner: Generator) -> std::ops::Range<usize> {
    let s = layout.start[&owner];
    s..s + hom.image(owner).len()
}

/// Stage one. The returned diagram may hold extra closed curves.
pub fn preliminary_diagram(hom: &FreeTargetHom) -> Result<Diagram, RealizeError> {
    let report = hom.verify_bounding()?;
    if !report.ok {
        return Err(RealizeError::NotBounding(report.failures));
    }
    let sig = hom.sig();
    let mut layout = lay_out(hom);
    let letter = |d: &Dash| Letter::new(d.letter, d.sign);

    let mut w1_dashes = Vec::new();
    for k in 1..=sig.punctures() {
        w1_dashes.extend(ids_on(&layout, hom, Generator::p(k)));
    }
    let w1_letters: Vec<Letter> = w1_dashes.iter().map(|&d| letter(&layout.dashes[d])).collect();

    let mut w2_dashes = Vec::new();
    let mut w2_letters = Vec::new();
    for i in 1..=sig.genus {
        let a = ids_on(&layout, hom, Generator::a(i));
        let b = ids_on(&layout, hom, Generator::b(i));
        for d in a.clone().chain(b.clone()) {
            w2_dashes.push(d);
            w2_letters.push(letter(&layout.dashes[d]));
        }
        for d in a.rev().chain(b.rev()) {
            w2_dashes.push(d);
            w2_letters.push(letter(&layout.dashes[d]).inverse());
        }
    }

    let (w1r, t1) = free_reduce(&w1_letters);
    let (w2r, t2) = free_reduce(&w2_letters);
    if w1r != w2r {
        return Err(RealizeError::Internal("reduced relation sides differ".into()));
    }
    let m = w1r.len();
    let mut residual_dashes = Vec::with_capacity(2 * m);
    let mut residual_letters = Vec::with_capacity(2 * m);
    for r in 0..m {
        let pos = t2.survivors[m - 1 - r];
        residual_dashes.push(w2_dashes[pos]);
        residual_letters.push(w2_letters[pos].inverse());
    }
    for &pos in &t1.survivors {
        residual_dashes.push(w1_dashes[pos]);
        residual_letters.push(w1_letters[pos]);
    }
    let (rest, t3) = free_reduce(&residual_letters);
    if !rest.is_empty() {
        return Err(RealizeError::Internal("residual word does not reduce to the identity".into()));
    }

    let n = layout.dashes.len();
    let mut uf = UnionFind::new(n);
    for (trace, map) in [(&t1, &w1_dashes), (&t2, &w2_dashes), (&t3, &residual_dashes)] {
        for &(i, j) in &trace.matching {
            uf.union(map[i], map[j]);
        }
    }

    let mut puncture_pairs = Vec::new();
    let mut middles = Vec::new();
    for k in 1..=sig.punctures() {
        let ids: Vec<usize> = ids_on(&layout, hom, Generator::p(k)).collect();
        if ids.len() % 2 == 0 {
            return Err(RealizeError::Internal(format!("p{k} loop meets an even number of dashes")));
        }
        let mid = ids.len() / 2;
        middles.push(ids[mid]);
        for j in 0..mid {
            let pair = (ids[j], ids[ids.len() - 1 - j]);
            uf.union(pair.0, pair.1);
            puncture_pairs.push(pair);
        }
    }

    // components numbered by their least dash
    let mut comp_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut preliminary = vec![0; n];
    for (d, slot) in preliminary.iter_mut().enumerate() {
        let root = uf.find(d);
        let next = comp_of_root.len();
        *slot = *comp_of_root.entry(root).or_insert(next);
    }
    let mut components: Vec<Component> = comp_of_root
        .iter()
        .map(|(&root, &id)| Component {
            id,
            kind: ComponentKind::Closed,
            letter: layout.dashes[root].letter,
            endpoints: None,
        })
        .collect();
    components.sort_by_key(|c| c.id);
    let mut ends: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for (k, &d) in middles.iter().enumerate() {
        ends.entry(preliminary[d]).or_default().push(k as u32 + 1);
    }
    for (c, e) in ends {
        if e.len() != 2 {
            return Err(RealizeError::Internal(format!("component {c} touches {} punctures", e.len())));
        }
        components[c].kind = ComponentKind::Arc;
        components[c].endpoints = Some((e[0], e[1]));
    }
    for (d, dash) in layout.dashes.iter_mut().enumerate() {
        dash.component = preliminary[d];
        if components[dash.component].letter != dash.letter {
            return Err(RealizeError::Internal("a component mixes letters".into()));
        }
    }

    Ok(Diagram {
        sig,
        components,
        dashes: layout.dashes,
        bands: Vec::new(),
        trace: Some(Trace {
            folds: Vec::new(),
            arcs: ArcStructure {
                w1: t1,
                w1_dashes,
                w2: t2,
                w2_dashes,
                residual: t3,
                residual_dashes,
                puncture_pairs,
                middles,
                preliminary,
            },
        }),
    })
}

/// Both stages. The result has exactly `g` closed curves and `b` arcs.
pub fn realize(hom: &FreeTargetHom) -> Result<RealizationResult, RealizeError> {
    let pre = preliminary_diagram(hom)?;
    let preliminary_census = pre.component_census();
    let sig = hom.sig();

    let owners: Vec<Generator> = hom
        .ordered_images()
        .into_iter()
        .filter(|(_, w)| !w.is_empty())
        .map(|(g, _)| g)
        .collect();
    let words: Vec<_> = owners.iter().map(|&g| hom.image(g).clone()).collect();
    let mut start = BTreeMap::new();
    let mut offset = 0;
    for (g, w) in hom.ordered_images() {
        start.insert(g, offset);
        offset += w.len();
    }
    let tag_of = |wi: usize, pos: usize| {
        let d = start[&owners[wi]] + pos;
        ComponentTag(pre.dashes[d].component as u32)
    };
    let mut graph = FoldGraph::wedge_tagged(&words, tag_of)
        .map_err(|e| RealizeError::Internal(e.to_string()))?;
    let folds = graph.fold_to_core();
    if !graph.is_rose_on(&sig.target_basis()) {
        return Err(RealizeError::Internal("folding did not end at the rose".into()));
    }

    let bands: Vec<BandEvent> = folds
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_band())
        .map(|(i, f)| BandEvent {
            from: f.tags.0 .0 as usize,
            to: f.tags.1 .0 as usize,
            result: f.tags.0 .0.min(f.tags.1 .0) as usize,
            case: f.case,
            fold: i,
        })
        .collect();

    let mut merged: BTreeMap<usize, Component> = BTreeMap::new();
    for c in &pre.components {
        let rep = graph.tag_representative(ComponentTag(c.id as u32)).0 as usize;
        let entry = merged.entry(rep).or_insert_with(|| Component {
            id: rep,
            kind: ComponentKind::Closed,
            letter: c.letter,
            endpoints: None,
        });
        if c.kind == ComponentKind::Arc {
            if entry.kind == ComponentKind::Arc {
                return Err(RealizeError::Internal("two arcs were banded together".into()));
            }
            entry.kind = ComponentKind::Arc;
            entry.endpoints = c.endpoints;
        }
    }
    let mut dashes = pre.dashes.clone();
    for d in &mut dashes {
        d.component = graph.tag_representative(ComponentTag(d.component as u32)).0 as usize;
    }

    let diagram = Diagram {
        sig,
        components: merged.into_values().collect(),
        dashes,
        bands,
        trace: pre.trace.map(|t| Trace { folds: folds.clone(), arcs: t.arcs }),
    };

    let census = diagram.component_census();
    let closed_ok = census.closed.len() == sig.genus as usize
        && census.closed.iter().all(|(g, &n)| g.family() == Family::H && n == 1);
    let arcs_ok = census.arcs.len() == sig.bridges as usize
        && census.arcs.iter().all(|(g, &n)| g.family() == Family::T && n == 1);
    if !closed_ok || !arcs_ok {
        return Err(RealizeError::Internal(format!(
            "final census has {} closed curves and {} arcs",
            census.closed_total(),
            census.arc_total()
        )));
    }

    let band_count = diagram.bands.len();
    Ok(RealizationResult {
        diagram,
        preliminary_census,
        fold_trace: folds,
        band_count,
    })
}
