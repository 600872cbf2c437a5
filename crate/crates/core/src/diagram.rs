//! Curve-and-arc systems on the standard surface, stored combinatorially.
//!
//! Each generator curve (`a_i`, `b_i`, or the loop around `p_k`) carries an
//! ordered run of signed dashes; each dash belongs to one component, a closed
//! curve or an arc between two punctures. Reading the dashes of a curve in order
//! spells the image of that generator.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::folding::{ComponentTag, FoldKind, FoldRecord, OrientationCase};
use crate::surface::{FreeTargetHom, SurfaceError, SurfaceSignature};
use crate::words::{CancellationTrace, Family, Generator, Letter, Sign, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("malformed diagram JSON: {0}")]
    Json(String),
    #[error("{0} is not a curve of the surface")]
    BadOwner(String),
    #[error("dashes on {owner} are not numbered 0..{len}")]
    Positions { owner: Generator, len: usize },
    #[error("dash refers to unknown component {0}")]
    UnknownComponent(usize),
    #[error("component id {0} used twice")]
    DuplicateComponent(usize),
    #[error("dash {owner}[{pos}] has letter {letter} but its component has letter {component}")]
    LetterMismatch { owner: Generator, pos: usize, letter: Generator, component: Generator },
    #[error("component {0} has bad endpoints")]
    Endpoints(usize),
    #[error("expected closed curves labeled h1..h{genus}, found {found}")]
    ClosedCensus { genus: u32, found: String },
    #[error("read-off is not a homomorphism to the target: {0}")]
    Hom(SurfaceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentKind {
    Closed,
    Arc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub id: usize,
    pub kind: ComponentKind,
    pub letter: Generator,
    /// 1-based puncture indices, arcs only.
    pub endpoints: Option<(u32, u32)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dash {
    pub owner: Generator,
    pub pos: usize,
    pub letter: Generator,
    pub sign: Sign,
    pub component: usize,
}

impl Dash {
    pub fn as_letter(&self) -> Letter {
        Letter::new(self.letter, self.sign)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BandEvent {
    pub from: usize,
    pub to: usize,
    pub result: usize,
    pub case: OrientationCase,
    /// Index of the fold that asked for this band.
    pub fold: usize,
}

/// The stage-one matchings. Positions index into the concatenated words;
/// the `*_dashes` vectors map a position back to its dash.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArcStructure {
    pub w1: CancellationTrace,
    pub w1_dashes: Vec<usize>,
    pub w2: CancellationTrace,
    pub w2_dashes: Vec<usize>,
    pub residual: CancellationTrace,
    pub residual_dashes: Vec<usize>,
    /// Dash pairs joined around a puncture.
    pub puncture_pairs: Vec<(usize, usize)>,
    /// The dash tied to each puncture, in puncture order.
    pub middles: Vec<usize>,
    /// Component of each dash before any band.
    pub preliminary: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub folds: Vec<FoldRecord>,
    pub arcs: ArcStructure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub sig: SurfaceSignature,
    pub components: Vec<Component>,
    /// Sorted by owner (domain order) then position.
    pub dashes: Vec<Dash>,
    pub bands: Vec<BandEvent>,
    pub trace: Option<Trace>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Census {
    pub closed: BTreeMap<Generator, usize>,
    pub arcs: BTreeMap<Generator, usize>,
    pub endpoints: BTreeMap<Generator, Vec<(u32, u32)>>,
}

impl Census {
    pub fn closed_total(&self) -> usize {
        self.closed.values().sum()
    }

    pub fn arc_total(&self) -> usize {
        self.arcs.values().sum()
    }
}

fn owner_rank(sig: SurfaceSignature, g: Generator) -> usize {
    match g.family() {
        Family::P => g.index() as usize - 1,
        Family::A => sig.punctures() as usize + 2 * (g.index() as usize - 1),
        Family::B => sig.punctures() as usize + 2 * (g.index() as usize - 1) + 1,
        _ => usize::MAX,
    }
}

impl Diagram {
    pub fn empty(sig: SurfaceSignature) -> Self {
        Diagram {
            sig,
            components: Vec::new(),
            dashes: Vec::new(),
            bands: Vec::new(),
            trace: None,
        }
    }

    /// Checks the structural invariants shared by realized and hand-written diagrams.
    pub fn validate(&self) -> Result<(), DiagramError> {
        let mut comps: BTreeMap<usize, &Component> = BTreeMap::new();
        for c in &self.components {
            if comps.insert(c.id, c).is_some() {
                return Err(DiagramError::DuplicateComponent(c.id));
            }
            let ok = match (c.kind, c.endpoints) {
                (ComponentKind::Closed, None) => true,
                (ComponentKind::Arc, Some((i, j))) => {
                    i != j && (1..=self.sig.punctures()).contains(&i) && (1..=self.sig.punctures()).contains(&j)
                }
                _ => false,
            };
            if !ok {
                return Err(DiagramError::Endpoints(c.id));
            }
        }
        let mut per_owner: BTreeMap<Generator, Vec<usize>> = BTreeMap::new();
        for d in &self.dashes {
            if !self.sig.is_domain_generator(d.owner) {
                return Err(DiagramError::BadOwner(d.owner.to_string()));
            }
            let c = comps
                .get(&d.component)
                .ok_or(DiagramError::UnknownComponent(d.component))?;
            if c.letter != d.letter {
                return Err(DiagramError::LetterMismatch {
                    owner: d.owner,
                    pos: d.pos,
                    letter: d.letter,
                    component: c.letter,
                });
            }
            per_owner.entry(d.owner).or_default().push(d.pos);
        }
        for (owner, mut ps) in per_owner {
            ps.sort_unstable();
            if ps.iter().enumerate().any(|(i, &p)| i != p) {
                return Err(DiagramError::Positions { owner, len: ps.len() });
            }
        }
        Ok(())
    }

    /// Dashes on `owner`, in position order.
    pub fn dashes_on(&self, owner: Generator) -> Vec<&Dash> {
        let mut v: Vec<&Dash> = self.dashes.iter().filter(|d| d.owner == owner).collect();
        v.sort_by_key(|d| d.pos);
        v
    }

    /// Restores the canonical dash order (owner in domain order, then position).
    pub fn sort_dashes(&mut self) {
        let sig = self.sig;
        self.dashes.sort_by_key(|d| (owner_rank(sig, d.owner), d.pos));
    }

    /// Reads each generator's image off its dash sequence. Band crossings come
    /// in cancelling pairs, so reading only the stored dashes and reducing
    /// gives the same words.
    pub fn read_off(&self) -> Result<FreeTargetHom, DiagramError> {
        self.validate()?;
        let images = self
            .sig
            .domain_generators()
            .into_iter()
            .map(|g| {
                let w = Word::from_letters(self.dashes_on(g).iter().map(|d| d.as_letter()));
                (g, w)
            })
            .collect();
        FreeTargetHom::new(self.sig, images).map_err(DiagramError::Hom)
    }

    pub fn component_census(&self) -> Census {
        let mut census = Census::default();
        for c in &self.components {
            match c.kind {
                ComponentKind::Closed => *census.closed.entry(c.letter).or_default() += 1,
                ComponentKind::Arc => {
                    *census.arcs.entry(c.letter).or_default() += 1;
                    if let Some(e) = c.endpoints {
                        census.endpoints.entry(c.letter).or_default().push(e);
                    }
                }
            }
        }
        for v in census.endpoints.values_mut() {
            v.sort_unstable();
        }
        census
    }

    /// Row `i` holds the `h_i` exponent sums of `b1, a1, ..., bg, ag`.
    pub fn homology_matrix(&self) -> Result<Vec<Vec<i64>>, DiagramError> {
        let census = self.component_census();
        let want: BTreeMap<Generator, usize> = self.sig.h_generators().into_iter().map(|h| (h, 1)).collect();
        if census.closed != want {
            let found: Vec<String> = census
                .closed
                .iter()
                .map(|(g, n)| format!("{n}x{g}"))
                .collect();
            return Err(DiagramError::ClosedCensus {
                genus: self.sig.genus,
                found: if found.is_empty() { "none".into() } else { found.join(", ") },
            });
        }
        let phi = self.read_off()?;
        Ok(homology_rows(&phi))
    }

    /// Whether the closed curves are homologically independent.
    pub fn is_cut_system(&self) -> Result<bool, DiagramError> {
        let m = self.homology_matrix()?;
        Ok(rank(&m) == self.sig.genus as usize)
    }
}

/// The exponent-sum rows for a homomorphism, in the `b1, a1, ...` column order.
pub fn homology_rows(phi: &FreeTargetHom) -> Vec<Vec<i64>> {
    let g = phi.sig().genus;
    (1..=g)
        .map(|i| {
            let h = Generator::h(i);
            (1..=g)
                .flat_map(|j| [Generator::b(j), Generator::a(j)])
                .map(|x| phi.image(x).exponent_sum(h))
                .collect()
        })
        .collect()
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    let mut prev: i128 = 1;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

// JSON shapes. Field order here is the emitted key order.

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    id: usize,
    kind: String,
    letter: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    endpoints: Option<[u32; 2]>,
}

#[derive(Serialize, Deserialize)]
struct DashJson {
    owner: String,
    pos: usize,
    letter: String,
    sign: i64,
    component: usize,
}

#[derive(Serialize, Deserialize)]
struct BandJson {
    from: usize,
    to: usize,
    result: usize,
    case: String,
}

#[derive(Serialize, Deserialize)]
struct FoldJson {
    kind: String,
    edges: [usize; 2],
    survivor: usize,
    tags: [Option<u32>; 2],
    case: String,
}

#[derive(Serialize, Deserialize)]
struct MatchingJson {
    dashes: Vec<usize>,
    matching: Vec<[usize; 2]>,
    survivors: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct TraceJson {
    folds: Vec<FoldJson>,
    w1: MatchingJson,
    w2: MatchingJson,
    residual: MatchingJson,
    puncture_pairs: Vec<[usize; 2]>,
    middles: Vec<usize>,
    preliminary: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    genus: u32,
    bridges: u32,
    components: Vec<ComponentJson>,
    dashes: Vec<DashJson>,
    bands: Vec<BandJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    trace: Option<TraceJson>,
}

fn case_str(c: OrientationCase) -> String {
    c.as_str().to_string()
}

fn parse_case(s: &str) -> Result<OrientationCase, DiagramError> {
    match s {
        "I" => Ok(OrientationCase::I),
        "II" => Ok(OrientationCase::II),
        other => Err(DiagramError::Json(format!("unknown band case `{other}`"))),
    }
}

fn matching_json(t: &CancellationTrace, dashes: &[usize]) -> MatchingJson {
    MatchingJson {
        dashes: dashes.to_vec(),
        matching: t.matching.iter().map(|&(i, j)| [i, j]).collect(),
        survivors: t.survivors.clone(),
    }
}

fn matching_from(m: MatchingJson) -> (CancellationTrace, Vec<usize>) {
    (
        CancellationTrace {
            matching: m.matching.into_iter().map(|[i, j]| (i, j)).collect(),
            survivors: m.survivors,
        },
        m.dashes,
    )
}

fn tag_json(t: ComponentTag) -> Option<u32> {
    (!t.is_untagged()).then_some(t.0)
}

impl Diagram {
    /// Pretty JSON with a stable key order; includes `"trace"` when present.
    pub fn to_json(&self) -> String {
        let dto = DiagramJson {
            genus: self.sig.genus,
            bridges: self.sig.bridges,
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    id: c.id,
                    kind: match c.kind {
                        ComponentKind::Closed => "closed".into(),
                        ComponentKind::Arc => "arc".into(),
                    },
                    letter: c.letter.to_string(),
                    endpoints: c.endpoints.map(|(i, j)| [i, j]),
                })
                .collect(),
            dashes: self
                .dashes
                .iter()
                .map(|d| DashJson {
                    owner: d.owner.to_string(),
                    pos: d.pos,
                    letter: d.letter.to_string(),
                    sign: d.sign.value(),
                    component: d.component,
                })
                .collect(),
            bands: self
                .bands
                .iter()
                .map(|b| BandJson {
                    from: b.from,
                    to: b.to,
                    result: b.result,
                    case: case_str(b.case),
                })
                .collect(),
            trace: self.trace.as_ref().map(|t| TraceJson {
                folds: t
                    .folds
                    .iter()
                    .map(|f| FoldJson {
                        kind: match f.kind {
                            FoldKind::TypeI => "I".into(),
                            FoldKind::TypeII => "II".into(),
                        },
                        edges: [f.edges.0, f.edges.1],
                        survivor: f.survivor,
                        tags: [tag_json(f.tags.0), tag_json(f.tags.1)],
                        case: case_str(f.case),
                    })
                    .collect(),
                w1: matching_json(&t.arcs.w1, &t.arcs.w1_dashes),
                w2: matching_json(&t.arcs.w2, &t.arcs.w2_dashes),
                residual: matching_json(&t.arcs.residual, &t.arcs.residual_dashes),
                puncture_pairs: t.arcs.puncture_pairs.iter().map(|&(a, b)| [a, b]).collect(),
                middles: t.arcs.middles.clone(),
                preliminary: t.arcs.preliminary.clone(),
            }),
        };
        let mut s = serde_json::to_string_pretty(&dto).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, DiagramError> {
        let dto: DiagramJson = serde_json::from_str(text).map_err(|e| DiagramError::Json(e.to_string()))?;
        let gen = |s: &str| -> Result<Generator, DiagramError> {
            s.parse().map_err(|_| DiagramError::BadOwner(s.to_string()))
        };
        let sig = SurfaceSignature::new(dto.genus, dto.bridges);
        let mut components = Vec::new();
        for c in dto.components {
            let kind = match c.kind.as_str() {
                "closed" => ComponentKind::Closed,
                "arc" => ComponentKind::Arc,
                other => return Err(DiagramError::Json(format!("unknown component kind `{other}`"))),
            };
            components.push(Component {
                id: c.id,
                kind,
                letter: gen(&c.letter)?,
                endpoints: c.endpoints.map(|[i, j]| (i, j)),
            });
        }
        let mut dashes = Vec::new();
        for d in dto.dashes {
            dashes.push(Dash {
                owner: gen(&d.owner)?,
                pos: d.pos,
                letter: gen(&d.letter)?,
                sign: Sign::from_value(d.sign)
                    .ok_or_else(|| DiagramError::Json(format!("sign must be 1 or -1, got {}", d.sign)))?,
                component: d.component,
            });
        }
        let mut bands = Vec::new();
        for b in dto.bands {
            bands.push(BandEvent {
                from: b.from,
                to: b.to,
                result: b.result,
                case: parse_case(&b.case)?,
                fold: 0,
            });
        }
        let trace = match dto.trace {
            None => None,
            Some(t) => {
                let mut folds = Vec::new();
                for f in t.folds {
                    let tag = |x: Option<u32>| x.map_or(ComponentTag::UNTAGGED, ComponentTag);
                    folds.push(FoldRecord {
                        kind: if f.kind == "I" { FoldKind::TypeI } else { FoldKind::TypeII },
                        edges: (f.edges[0], f.edges[1]),
                        survivor: f.survivor,
                        tags: (tag(f.tags[0]), tag(f.tags[1])),
                        case: parse_case(&f.case)?,
                    });
                }
                let (w1, w1_dashes) = matching_from(t.w1);
                let (w2, w2_dashes) = matching_from(t.w2);
                let (residual, residual_dashes) = matching_from(t.residual);
                Some(Trace {
                    folds,
                    arcs: ArcStructure {
                        w1,
                        w1_dashes,
                        w2,
                        w2_dashes,
                        residual,
                        residual_dashes,
                        puncture_pairs: t.puncture_pairs.into_iter().map(|[a, b]| (a, b)).collect(),
                        middles: t.middles,
                        preliminary: t.preliminary,
                    },
                })
            }
        };
        if let Some(t) = &trace {
            // band i was requested by the i-th fold between distinct tags
            let band_folds: Vec<usize> = t.folds.iter().enumerate().filter(|(_, f)| f.is_band()).map(|(i, _)| i).collect();
            for (b, &fi) in bands.iter_mut().zip(&band_folds) {
                b.fold = fi;
            }
        }
        let d = Diagram {
            sig,
            components,
            dashes,
            bands,
            trace,
        };
        d.validate()?;
        Ok(d)
    }

    /// Letters used by components, for legends.
    pub fn letters(&self) -> BTreeSet<Generator> {
        self.components.iter().map(|c| c.letter).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus_h1() -> Diagram {
        Diagram {
            sig: SurfaceSignature::new(1, 0),
            components: vec![Component {
                id: 0,
                kind: ComponentKind::Closed,
                letter: Generator::h(1),
                endpoints: None,
            }],
            dashes: vec![Dash {
                owner: Generator::a(1),
                pos: 0,
                letter: Generator::h(1),
                sign: Sign::Pos,
                component: 0,
            }],
            bands: vec![],
            trace: None,
        }
    }

    #[test]
    fn read_off_single_dash() {
        let phi = torus_h1().read_off().unwrap();
        assert_eq!(phi.image(Generator::a(1)).to_string(), "h1");
        assert!(phi.image(Generator::b(1)).is_empty());
        assert_eq!(homology_rows(&phi), vec![vec![0, 1]]);
        assert!(torus_h1().is_cut_system().unwrap());
    }

    #[test]
    fn empty_diagram() {
        let d = Diagram::empty(SurfaceSignature::new(0, 0));
        let phi = d.read_off().unwrap();
        assert!(phi.images().is_empty());
        assert_eq!(d.component_census(), Census::default());
        assert_eq!(d.homology_matrix().unwrap(), Vec::<Vec<i64>>::new());
    }

    #[test]
    fn rank_deficient_rows() {
        assert_eq!(rank(&[vec![0, 0]]), 0);
        assert_eq!(rank(&[vec![3, -1, 0, 5], vec![5, 0, 1, 8]]), 2);
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![0, 1], vec![1, 0], vec![1, 1]]), 2);
    }

    #[test]
    fn letter_mismatch_rejected() {
        let mut d = torus_h1();
        d.dashes[0].letter = Generator::h(2);
        assert!(matches!(d.read_off(), Err(DiagramError::LetterMismatch { .. })));
    }

    #[test]
    fn gaps_rejected() {
        let mut d = torus_h1();
        d.dashes[0].pos = 1;
        assert!(matches!(d.validate(), Err(DiagramError::Positions { .. })));
    }

    #[test]
    fn census_must_match_genus() {
        let mut d = torus_h1();
        d.components[0].letter = Generator::t(1);
        d.dashes[0].letter = Generator::t(1);
        assert!(matches!(d.homology_matrix(), Err(DiagramError::ClosedCensus { .. })));
    }

    #[test]
    fn json_round_trip() {
        let d = torus_h1();
        let text = d.to_json();
        assert!(text.contains("\"owner\": \"a1\""));
        assert_eq!(Diagram::from_json(&text).unwrap(), d);
        assert!(matches!(Diagram::from_json("{"), Err(DiagramError::Json(_))));
    }
}
