//! Schematic SVG of a diagram. Positions are combinatorial, not an isotopy picture.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write;

use tangleforge::{ComponentKind, Diagram, Family, Generator};

const WIDTH: f64 = 640.0;
const CX: f64 = 320.0;
const CY: f64 = 300.0;
const R: f64 = 220.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];

type Pt = (f64, f64);

fn lerp(a: Pt, b: Pt, s: f64) -> Pt {
    (a.0 + (b.0 - a.0) * s, a.1 + (b.1 - a.1) * s)
}

struct Layout<'a> {
    d: &'a Diagram,
    vertices: Vec<Pt>,
    punctures: Vec<Pt>,
    /// Dash count per owner.
    counts: BTreeMap<Generator, usize>,
}

impl<'a> Layout<'a> {
    fn new(d: &'a Diagram) -> Self {
        let n = 4 * d.sig.genus as usize;
        let vertices = (0..n)
            .map(|k| {
                let th = -PI / 2.0 + 2.0 * PI * k as f64 / n as f64;
                (CX + R * th.cos(), CY + R * th.sin())
            })
            .collect();
        let m = d.sig.punctures() as usize;
        let punctures = (0..m)
            .map(|k| {
                let s = if m == 1 { 0.5 } else { k as f64 / (m - 1) as f64 };
                (CX - 0.6 * R + 1.2 * R * s, CY + 0.15 * R)
            })
            .collect();
        let mut counts = BTreeMap::new();
        for dash in &d.dashes {
            *counts.entry(dash.owner).or_insert(0) += 1;
        }
        Layout { d, vertices, punctures, counts }
    }

    /// Position of dash `i`. Handle letters sit on one of their two polygon
    /// edges (`copy` 0 or 1); puncture dashes stack above their puncture.
    fn dash(&self, i: usize, copy: usize) -> Pt {
        let dash = &self.d.dashes[i];
        let n = self.counts[&dash.owner] as f64;
        let s = (dash.pos as f64 + 1.0) / (n + 1.0);
        let k = dash.owner.index() as usize - 1;
        match dash.owner.family() {
            Family::P => {
                let (x, y) = self.punctures[k];
                (x, y - 14.0 - 10.0 * dash.pos as f64)
            }
            fam => {
                let role = if fam == Family::A { 0 } else { 1 };
                let e = 4 * k + role + 2 * copy;
                let (u, v) = (self.vertices[e], self.vertices[(e + 1) % self.vertices.len()]);
                if copy == 0 {
                    lerp(u, v, s)
                } else {
                    lerp(v, u, s)
                }
            }
        }
    }

    fn color(&self, g: Generator) -> &'static str {
        let pos = self.d.sig.target_basis().iter().position(|&x| x == g).unwrap_or(0);
        PALETTE[pos % PALETTE.len()]
    }
}

fn chord(out: &mut String, a: Pt, b: Pt) {
    // Bend toward the center in proportion to the span so nested pairs nest.
    let mid = lerp(a, b, 0.5);
    let span = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    let c = lerp(mid, (CX, CY), (span / (2.0 * R)).min(0.9));
    let _ = writeln!(
        out,
        "    <path d=\"M {:.2} {:.2} Q {:.2} {:.2} {:.2} {:.2}\" fill=\"none\"/>",
        a.0, a.1, c.0, c.1, b.0, b.1
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render(d: &Diagram) -> String {
    let l = Layout::new(d);
    let letters: Vec<Generator> = d.sig.target_basis().into_iter().collect();
    let height = CY + R + 60.0 + 20.0 * letters.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {WIDTH:.0} {height:.0}\">"
    );
    let _ = writeln!(out, "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>");

    // Surface outline.
    let _ = writeln!(out, "  <g class=\"surface\" stroke=\"black\" fill=\"none\">");
    if d.sig.genus == 0 {
        let _ = writeln!(out, "    <circle cx=\"{CX:.2}\" cy=\"{CY:.2}\" r=\"{R:.2}\"/>");
    } else {
        let pts: Vec<String> = l.vertices.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(out, "    <polygon points=\"{}\"/>", pts.join(" "));
        let n = l.vertices.len();
        for e in 0..n {
            let i = e / 4 + 1;
            let name = if e % 2 == 0 { format!("a{i}") } else { format!("b{i}") };
            let name = if e % 4 >= 2 { format!("{name}\u{207b}") } else { name };
            let m = lerp(l.vertices[e], l.vertices[(e + 1) % n], 0.5);
            let p = lerp((CX, CY), m, 1.08);
            let _ = writeln!(
                out,
                "    <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" stroke=\"none\" fill=\"black\">{name}</text>",
                p.0, p.1
            );
        }
    }
    let _ = writeln!(out, "  </g>");

    let _ = writeln!(out, "  <g class=\"punctures\">");
    for (k, (x, y)) in l.punctures.iter().enumerate() {
        let _ = writeln!(out, "    <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"black\"/>");
        let _ = writeln!(
            out,
            "    <text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">p{}</text>",
            y + 16.0,
            k + 1
        );
    }
    let _ = writeln!(out, "  </g>");

    // Chords grouped by the final component of their first dash.
    let mut chords: BTreeMap<usize, Vec<(Pt, Pt)>> = BTreeMap::new();
    let mut tails: BTreeMap<usize, Vec<(Pt, Pt)>> = BTreeMap::new();
    if let Some(t) = &d.trace {
        let a = &t.arcs;
        for (trace, map, copy) in [(&a.w1, &a.w1_dashes, 0), (&a.w2, &a.w2_dashes, 1), (&a.residual, &a.residual_dashes, 0)] {
            for &(i, j) in &trace.matching {
                let (x, y) = (map[i], map[j]);
                chords.entry(d.dashes[x].component).or_default().push((l.dash(x, copy), l.dash(y, copy)));
            }
        }
        for &(x, y) in &a.puncture_pairs {
            chords.entry(d.dashes[x].component).or_default().push((l.dash(x, 0), l.dash(y, 0)));
        }
        for (k, &x) in a.middles.iter().enumerate() {
            if let Some(&p) = l.punctures.get(k) {
                tails.entry(d.dashes[x].component).or_default().push((l.dash(x, 0), p));
            }
        }
    }

    let mut comps: Vec<_> = d.components.iter().collect();
    comps.sort_by_key(|c| c.id);
    for c in comps {
        let class = match c.kind {
            ComponentKind::Closed => "closed",
            ComponentKind::Arc => "arc",
        };
        let color = l.color(c.letter);
        let _ = writeln!(
            out,
            "  <g class=\"{class}\" data-component=\"{}\" data-letter=\"{}\" stroke=\"{color}\" stroke-width=\"1.5\">",
            c.id, c.letter
        );
        let mine: Vec<usize> = (0..d.dashes.len()).filter(|&i| d.dashes[i].component == c.id).collect();
        for &i in &mine {
            let copies = if d.dashes[i].owner.family() == Family::P { 1 } else { 2 };
            for copy in 0..copies {
                let (x, y) = l.dash(i, copy);
                let _ = writeln!(out, "    <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.5\" fill=\"{color}\"/>");
            }
        }
        if d.trace.is_some() {
            for &(a, b) in chords.get(&c.id).into_iter().flatten() {
                chord(&mut out, a, b);
            }
            for &(a, b) in tails.get(&c.id).into_iter().flatten() {
                let _ = writeln!(out, "    <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>", a.0, a.1, b.0, b.1);
            }
        } else if !mine.is_empty() {
            let pts: Vec<String> = mine
                .iter()
                .map(|&i| {
                    let (x, y) = l.dash(i, 0);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(out, "    <polyline points=\"{}\" fill=\"none\"/>", pts.join(" "));
        }
        let _ = writeln!(out, "  </g>");
    }

    // Bands join component centroids, using the pre-band assignment when known.
    let centroid = |id: usize| -> Pt {
        let pre = d.trace.as_ref().map(|t| &t.arcs.preliminary).filter(|p| p.len() == d.dashes.len());
        let pts: Vec<Pt> = (0..d.dashes.len())
            .filter(|&i| pre.map_or(d.dashes[i].component, |p| p[i]) == id)
            .map(|i| l.dash(i, 0))
            .collect();
        if pts.is_empty() {
            return (CX, CY);
        }
        let n = pts.len() as f64;
        (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n)
    };
    let mut centers: BTreeMap<usize, Pt> = BTreeMap::new();
    for (k, b) in d.bands.iter().enumerate() {
        let a = *centers.entry(b.from).or_insert_with(|| centroid(b.from));
        let z = *centers.entry(b.to).or_insert_with(|| centroid(b.to));
        centers.insert(b.result, lerp(a, z, 0.5));
        let m = lerp(a, z, 0.5);
        let _ = writeln!(out, "  <g class=\"band\" data-from=\"{}\" data-to=\"{}\" stroke=\"gray\">", b.from, b.to);
        let _ = writeln!(
            out,
            "    <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke-dasharray=\"4 3\"/>",
            a.0, a.1, z.0, z.1
        );
        let _ = writeln!(
            out,
            "    <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" stroke=\"none\" fill=\"gray\">band {} ({})</text>",
            m.0,
            m.1 - 4.0,
            k + 1,
            b.case.as_str()
        );
        let _ = writeln!(out, "  </g>");
    }

    let _ = writeln!(out, "  <g class=\"legend\" font-size=\"12\">");
    for (k, g) in letters.iter().enumerate() {
        let y = CY + R + 40.0 + 20.0 * k as f64;
        let _ = writeln!(out, "    <rect x=\"20\" y=\"{:.2}\" width=\"14\" height=\"10\" fill=\"{}\"/>", y - 9.0, l.color(*g));
        let _ = writeln!(out, "    <text x=\"40\" y=\"{y:.2}\">{}</text>", escape(&g.to_string()));
    }
    let _ = writeln!(out, "  </g>");
    out.push_str("</svg>\n");
    out
}
