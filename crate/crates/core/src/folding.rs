//! Stallings folding on graphs whose edges carry a generator (the color) and a
//! component tag.
//!
//! Vertices are merged through a union-find whose representative is the least
//! id, so the basepoint `0` always survives. Per-vertex adjacency is bucketed by
//! `(color, direction)`; any bucket holding two or more edges is a pending fold
//! and is indexed in a global ordered set, which gives the deterministic fold
//! order directly.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thiserror::Error;

use crate::unionfind::UnionFind;
use crate::words::{Generator, Letter, Sign, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoldError {
    #[error("word {0} is empty; empty words have no circle in the wedge")]
    EmptyWord(usize),
    #[error("edges {0} and {1} are not an eligible fold pair")]
    Ineligible(usize, usize),
}

/// Links an edge to a diagram component. Tags compare numerically and
/// [`ComponentTag::UNTAGGED`] sorts after every real tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentTag(pub u32);

impl ComponentTag {
    pub const UNTAGGED: ComponentTag = ComponentTag(u32::MAX);

    pub fn is_untagged(self) -> bool {
        self == Self::UNTAGGED
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    Out,
    In,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FoldKind {
    TypeI,
    TypeII,
}

/// Case I: both edges point into the shared vertex. Case II: both point out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrientationCase {
    I,
    II,
}

impl OrientationCase {
    pub fn as_str(self) -> &'static str {
        match self {
            OrientationCase::I => "I",
            OrientationCase::II => "II",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FoldRecord {
    pub kind: FoldKind,
    pub edges: (usize, usize),
    pub survivor: usize,
    /// Current representatives of the two edges' tags at fold time.
    pub tags: (ComponentTag, ComponentTag),
    pub case: OrientationCase,
}

impl FoldRecord {
    /// A fold between different components, i.e. a band sum.
    pub fn is_band(&self) -> bool {
        self.tags.0 != self.tags.1
    }
}

/// An edge with endpoints resolved to current vertex ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeView {
    pub id: usize,
    pub src: usize,
    pub dst: usize,
    pub color: Generator,
    pub tag: ComponentTag,
}

#[derive(Clone, Debug)]
struct Edge {
    src: usize,
    dst: usize,
    color: Generator,
    tag: ComponentTag,
    alive: bool,
}

type Buckets = BTreeMap<(Generator, Dir), BTreeSet<usize>>;

#[derive(Clone, Debug)]
pub struct FoldGraph {
    vertices: UnionFind,
    edges: Vec<Edge>,
    adj: Vec<Buckets>,
    conflicts: BTreeSet<(usize, Generator, Dir)>,
    tag_sets: UnionFind,
    edge_count: usize,
    vertex_count: usize,
}

fn key_lo(v: usize) -> (usize, Generator, Dir) {
    (v, Generator::h(1), Dir::Out)
}

impl FoldGraph {
    /// A lone basepoint.
    pub fn point() -> Self {
        FoldGraph {
            vertices: UnionFind::new(1),
            edges: Vec::new(),
            adj: vec![Buckets::new()],
            conflicts: BTreeSet::new(),
            tag_sets: UnionFind::new(0),
            edge_count: 0,
            vertex_count: 1,
        }
    }

    /// Wedge of subdivided circles at the basepoint, one per word, all untagged.
    pub fn wedge_from_words(words: &[Word]) -> Result<Self, FoldError> {
        Self::wedge_tagged(words, |_, _| ComponentTag::UNTAGGED)
    }

    /// As [`FoldGraph::wedge_from_words`], with `tag_of(word, position)` tagging each edge.
    pub fn wedge_tagged(
        words: &[Word],
        mut tag_of: impl FnMut(usize, usize) -> ComponentTag,
    ) -> Result<Self, FoldError> {
        let mut g = Self::point();
        let mut max_tag: Option<u32> = None;
        for (wi, word) in words.iter().enumerate() {
            if word.is_empty() {
                return Err(FoldError::EmptyWord(wi));
            }
            let n = word.len();
            let mut prev = 0;
            for (k, &letter) in word.letters().iter().enumerate() {
                let next = if k + 1 == n { 0 } else { g.add_vertex() };
                let tag = tag_of(wi, k);
                if !tag.is_untagged() {
                    max_tag = Some(max_tag.map_or(tag.0, |m| m.max(tag.0)));
                }
                g.add_letter_edge(prev, next, letter, tag);
                prev = next;
            }
        }
        g.tag_sets = UnionFind::new(max_tag.map_or(0, |m| m as usize + 1));
        Ok(g)
    }

    fn add_vertex(&mut self) -> usize {
        self.adj.push(Buckets::new());
        self.vertex_count += 1;
        self.vertices.push()
    }

    fn add_letter_edge(&mut self, from: usize, to: usize, letter: Letter, tag: ComponentTag) {
        let (src, dst) = match letter.sign {
            Sign::Pos => (from, to),
            Sign::Neg => (to, from),
        };
        let id = self.edges.len();
        self.edges.push(Edge {
            src,
            dst,
            color: letter.gen,
            tag,
            alive: true,
        });
        self.edge_count += 1;
        self.bucket_insert(src, letter.gen, Dir::Out, id);
        self.bucket_insert(dst, letter.gen, Dir::In, id);
    }

    fn bucket_insert(&mut self, v: usize, color: Generator, dir: Dir, id: usize) {
        let set = self.adj[v].entry((color, dir)).or_default();
        set.insert(id);
        if set.len() >= 2 {
            self.conflicts.insert((v, color, dir));
        }
    }

    fn bucket_remove(&mut self, v: usize, color: Generator, dir: Dir, id: usize) {
        if let Some(set) = self.adj[v].get_mut(&(color, dir)) {
            set.remove(&id);
            if set.len() < 2 {
                self.conflicts.remove(&(v, color, dir));
            }
            if set.is_empty() {
                self.adj[v].remove(&(color, dir));
            }
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    fn root(&self, v: usize) -> usize {
        self.vertices.root(v)
    }

    /// Live edges with endpoints resolved to current vertex ids, by edge id.
    pub fn edges(&self) -> Vec<EdgeView> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.alive)
            .map(|(id, e)| EdgeView {
                id,
                src: self.root(e.src),
                dst: self.root(e.dst),
                color: e.color,
                tag: e.tag,
            })
            .collect()
    }

    fn resolve_tag(&mut self, t: ComponentTag) -> ComponentTag {
        if t.is_untagged() {
            t
        } else {
            ComponentTag(self.tag_sets.find(t.0 as usize) as u32)
        }
    }

    /// Current representative of `t` after the band merges performed so far.
    pub fn tag_representative(&mut self, t: ComponentTag) -> ComponentTag {
        self.resolve_tag(t)
    }

    fn best_pair(&self, v: usize, color: Generator) -> Option<(usize, usize)> {
        let two = |dir| {
            let set = self.adj[v].get(&(color, dir))?;
            let mut it = set.iter().copied();
            match (it.next(), it.next()) {
                (Some(a), Some(b)) => Some((a, b)),
                _ => None,
            }
        };
        match (two(Dir::Out), two(Dir::In)) {
            (Some(o), Some(i)) => Some(if i < o { i } else { o }),
            (o, i) => o.or(i),
        }
    }

    /// Least eligible pair: smallest shared vertex, then color, then edge ids.
    /// When the out- and in-buckets tie, the out pair (case II) wins.
    pub fn find_fold(&self) -> Option<(usize, usize)> {
        let &(v, color, _) = self.conflicts.iter().next()?;
        self.best_pair(v, color)
    }

    /// Every currently eligible pair, in the deterministic order of the buckets.
    pub fn eligible_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &(v, color, dir) in &self.conflicts {
            let ids: Vec<usize> = self.adj[v][&(color, dir)].iter().copied().collect();
            for i in 0..ids.len() {
                for j in i + 1..ids.len() {
                    out.push((ids[i], ids[j]));
                }
            }
        }
        out
    }

    fn shared_dir(&mut self, e1: usize, e2: usize) -> Option<Dir> {
        if e1 == e2 || e1 >= self.edges.len() || e2 >= self.edges.len() {
            return None;
        }
        let (a, b) = (self.edges[e1].clone(), self.edges[e2].clone());
        if !a.alive || !b.alive || a.color != b.color {
            return None;
        }
        if self.vertices.find(a.src) == self.vertices.find(b.src) {
            Some(Dir::Out)
        } else if self.vertices.find(a.dst) == self.vertices.find(b.dst) {
            Some(Dir::In)
        } else {
            None
        }
    }

    /// Folds one eligible pair in place. The smaller edge id survives and keeps
    /// the smaller tag; distinct tags are merged.
    pub fn fold_once(&mut self, pair: (usize, usize)) -> Result<FoldRecord, FoldError> {
        let dir = self
            .shared_dir(pair.0, pair.1)
            .ok_or(FoldError::Ineligible(pair.0, pair.1))?;
        let (s, r) = if pair.0 < pair.1 {
            (pair.0, pair.1)
        } else {
            (pair.1, pair.0)
        };
        let color = self.edges[s].color;
        let (rs, rd) = (self.vertices.find(self.edges[r].src), self.vertices.find(self.edges[r].dst));
        self.bucket_remove(rs, color, Dir::Out, r);
        self.bucket_remove(rd, color, Dir::In, r);
        self.edges[r].alive = false;
        self.edge_count -= 1;

        let (u1, u2) = match dir {
            Dir::Out => (self.edges[s].dst, self.edges[r].dst),
            Dir::In => (self.edges[s].src, self.edges[r].src),
        };
        let (u1, u2) = (self.vertices.find(u1), self.vertices.find(u2));
        let kind = if u1 == u2 {
            FoldKind::TypeI
        } else {
            self.merge_vertices(u1, u2);
            FoldKind::TypeII
        };

        let t1 = self.resolve_tag(self.edges[s].tag);
        let t2 = self.resolve_tag(self.edges[r].tag);
        let keep = if !t1.is_untagged() && !t2.is_untagged() && t1 != t2 {
            ComponentTag(self.tag_sets.union(t1.0 as usize, t2.0 as usize) as u32)
        } else {
            t1.min(t2)
        };
        self.edges[s].tag = keep;

        let tags = if pair.0 < pair.1 { (t1, t2) } else { (t2, t1) };
        Ok(FoldRecord {
            kind,
            edges: (s, r),
            survivor: s,
            tags,
            case: match dir {
                Dir::In => OrientationCase::I,
                Dir::Out => OrientationCase::II,
            },
        })
    }

    fn merge_vertices(&mut self, a: usize, b: usize) {
        let keep = self.vertices.union(a, b);
        let dead = if keep == a { b } else { a };
        self.vertex_count -= 1;

        let dead_conflicts: Vec<(Generator, Dir)> = self
            .conflicts
            .range(key_lo(dead)..key_lo(dead + 1))
            .map(|&(_, c, d)| (c, d))
            .collect();
        for &(c, d) in &dead_conflicts {
            self.conflicts.remove(&(dead, c, d));
        }

        // small-to-large: the bigger map ends up stored under `keep`
        let mut small = std::mem::take(&mut self.adj[dead]);
        if small.len() > self.adj[keep].len() {
            std::mem::swap(&mut small, &mut self.adj[keep]);
            let keep_conflicts: Vec<(Generator, Dir)> = self
                .conflicts
                .range(key_lo(keep)..key_lo(keep + 1))
                .map(|&(_, c, d)| (c, d))
                .collect();
            for (c, d) in keep_conflicts {
                self.conflicts.remove(&(keep, c, d));
            }
            for (c, d) in dead_conflicts {
                self.conflicts.insert((keep, c, d));
            }
        }
        for (key, ids) in small {
            let set = self.adj[keep].entry(key).or_default();
            set.extend(ids);
            if set.len() >= 2 {
                self.conflicts.insert((keep, key.0, key.1));
            }
        }
    }

    /// Folds with the deterministic order until no fold applies.
    pub fn fold_to_core(&mut self) -> Vec<FoldRecord> {
        let mut records = Vec::new();
        while let Some(pair) = self.find_fold() {
            records.push(self.fold_once(pair).expect("find_fold yields eligible pairs"));
        }
        records
    }

    /// Folds choosing a uniformly random pending bucket and pair each step.
    pub fn fold_to_core_random<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<FoldRecord> {
        let mut records = Vec::new();
        while !self.conflicts.is_empty() {
            let k = rng.gen_range(0..self.conflicts.len());
            let &(v, color, dir) = self.conflicts.iter().nth(k).expect("index in range");
            let ids: Vec<usize> = self.adj[v][&(color, dir)].iter().copied().collect();
            let i = rng.gen_range(0..ids.len());
            let mut j = rng.gen_range(0..ids.len() - 1);
            if j >= i {
                j += 1;
            }
            records.push(self.fold_once((ids[i], ids[j])).expect("bucket pairs are eligible"));
        }
        records
    }

    pub fn is_folded(&self) -> bool {
        self.conflicts.is_empty()
    }

    /// One vertex carrying one loop per generator in `basis` and nothing else.
    pub fn is_rose_on(&self, basis: &BTreeSet<Generator>) -> bool {
        if self.vertex_count != 1 || self.edge_count != basis.len() {
            return false;
        }
        let colors: BTreeSet<Generator> = self
            .edges
            .iter()
            .filter(|e| e.alive)
            .map(|e| e.color)
            .collect();
        colors == *basis
    }

    /// Edge list `(src, color, dst)` with vertices renamed in breadth-first
    /// order from the basepoint. For folded graphs two rooted colored graphs are
    /// isomorphic exactly when these lists agree.
    pub fn canonical_form(&self) -> Vec<(usize, Generator, usize)> {
        let mut label: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = std::collections::VecDeque::new();
        let start = self.root(0);
        label.insert(start, 0);
        queue.push_back(start);
        let mut out = Vec::new();
        while let Some(v) = queue.pop_front() {
            for (&(color, dir), ids) in &self.adj[v] {
                for &id in ids {
                    let e = &self.edges[id];
                    let other = match dir {
                        Dir::Out => self.root(e.dst),
                        Dir::In => self.root(e.src),
                    };
                    if !label.contains_key(&other) {
                        label.insert(other, label.len());
                        queue.push_back(other);
                    }
                    if dir == Dir::Out {
                        out.push((id, color));
                    }
                }
            }
        }
        let mut edges: Vec<(usize, Generator, usize)> = out
            .into_iter()
            .map(|(id, color)| {
                let e = &self.edges[id];
                (label[&self.root(e.src)], color, label[&self.root(e.dst)])
            })
            .collect();
        edges.sort();
        edges
    }
}

/// Whether the nonempty words generate the free group on exactly `basis`.
pub fn generates(words: &[Word], basis: &BTreeSet<Generator>) -> bool {
    let nonempty: Vec<Word> = words.iter().filter(|w| !w.is_empty()).cloned().collect();
    let mut g = FoldGraph::wedge_from_words(&nonempty).expect("empty words filtered");
    g.fold_to_core();
    g.is_rose_on(basis)
}

/// Whether the nonempty words fold to a rose with `rank` distinct loops, i.e.
/// generate the free group on the generators they mention, which number `rank`.
pub fn generates_full(words: &[Word], rank: usize) -> bool {
    let nonempty: Vec<Word> = words.iter().filter(|w| !w.is_empty()).cloned().collect();
    let mut g = FoldGraph::wedge_from_words(&nonempty).expect("empty words filtered");
    g.fold_to_core();
    let colors: BTreeSet<Generator> = g.edges().iter().map(|e| e.color).collect();
    colors.len() == rank && g.is_rose_on(&colors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(ws: &[&str]) -> Vec<Word> {
        ws.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn poincare() -> Vec<Word> {
        let x = "h1 h2 h1 h2 h1 h2 h1 h2 h1 h2";
        words(&["h1^-1", &format!("{x} h1^-2"), &format!("{x} h2^3"), "h2"])
    }

    #[test]
    fn wedge_sizes() {
        let g = FoldGraph::wedge_from_words(&words(&["h1"])).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 1));
        let e = g.edges()[0];
        assert_eq!((e.src, e.dst, e.color), (0, 0, Generator::h(1)));
        let g = FoldGraph::wedge_from_words(&poincare()).unwrap();
        assert_eq!(g.edge_count(), 27);
        let g = FoldGraph::wedge_from_words(&words(&["h1 h2"])).unwrap();
        let colors: Vec<_> = g.edges().iter().map(|e| e.color.to_string()).collect();
        assert_eq!(colors, ["h1", "h2"]);
    }

    #[test]
    fn empty_word_rejected() {
        let err = FoldGraph::wedge_from_words(&[Word::empty()]).unwrap_err();
        assert_eq!(err, FoldError::EmptyWord(0));
    }

    #[test]
    fn find_fold_examples() {
        let g = FoldGraph::wedge_from_words(&words(&["h1", "h2"])).unwrap();
        assert_eq!(g.find_fold(), None);
        let g = FoldGraph::wedge_from_words(&words(&["h1", "h1"])).unwrap();
        assert_eq!(g.find_fold(), Some((0, 1)));
        let g = FoldGraph::wedge_from_words(&words(&["h1 h2"])).unwrap();
        assert_eq!(g.find_fold(), None);
    }

    #[test]
    fn type_one_fold_of_loops() {
        let mut g = FoldGraph::wedge_from_words(&words(&["h1", "h1"])).unwrap();
        let rec = g.fold_once((0, 1)).unwrap();
        assert_eq!(rec.kind, FoldKind::TypeI);
        assert_eq!(rec.case, OrientationCase::II);
        assert_eq!(g.edge_count(), 1);
        assert!(g.is_rose_on(&[Generator::h(1)].into()));
    }

    #[test]
    fn type_two_fold_merges_vertices() {
        let mut g = FoldGraph::wedge_from_words(&words(&["h1 h2", "h1 h3"])).unwrap();
        let before = g.vertex_count();
        let rec = g.fold_once(g.find_fold().unwrap()).unwrap();
        assert_eq!(rec.kind, FoldKind::TypeII);
        assert_eq!(rec.case, OrientationCase::II);
        assert_eq!(g.vertex_count(), before - 1);
    }

    #[test]
    fn tags_are_reported_and_merged() {
        let ws = words(&["h1", "h1"]);
        let mut g = FoldGraph::wedge_tagged(&ws, |w, _| ComponentTag(2 + w as u32)).unwrap();
        let rec = g.fold_once((0, 1)).unwrap();
        assert_eq!(rec.tags, (ComponentTag(2), ComponentTag(3)));
        assert!(rec.is_band());
        assert_eq!(g.edges()[0].tag, ComponentTag(2));
        assert_eq!(g.tag_representative(ComponentTag(3)), ComponentTag(2));
    }

    #[test]
    fn ineligible_pair_rejected() {
        let mut g = FoldGraph::wedge_from_words(&words(&["h1 h2"])).unwrap();
        assert_eq!(g.fold_once((0, 1)), Err(FoldError::Ineligible(0, 1)));
    }

    #[test]
    fn fold_to_core_examples() {
        let mut g = FoldGraph::wedge_from_words(&words(&["h1", "h1"])).unwrap();
        assert_eq!(g.fold_to_core().len(), 1);
        assert!(g.is_rose_on(&[Generator::h(1)].into()));

        let mut g = FoldGraph::wedge_from_words(&poincare()).unwrap();
        let recs = g.fold_to_core();
        assert_eq!(recs.len(), 27 - 2);
        assert!(g.is_rose_on(&[Generator::h(1), Generator::h(2)].into()));

        // the two h1 edges both leave the basepoint, so one fold leaves a
        // lollipop: an h1 stem carrying an h2 loop
        let mut g = FoldGraph::wedge_from_words(&words(&["h1 h2 h1^-1"])).unwrap();
        assert_eq!(g.fold_to_core().len(), 1);
        assert_eq!((g.edge_count(), g.vertex_count()), (2, 2));
        assert!(!g.is_rose_on(&[Generator::h(1), Generator::h(2)].into()));
    }

    #[test]
    fn generates_full_examples() {
        assert!(generates_full(&words(&["h1", "h2"]), 2));
        assert!(!generates_full(&words(&["h1 h2 h1^-1"]), 2));
        assert!(generates_full(&poincare(), 2));
        assert!(generates_full(&[], 0));
        assert!(!generates_full(&words(&["h1", "h2"]), 3));
    }
}
