//! SVG rendering of dissections, trees and paths.

use std::fmt::Write;

use cdt_core::geometry::Point2;
use cdt_core::map::CdtMap;
use cdt_core::planner::PlanResult;

const PALETTE: [&str; 6] = ["#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"];

pub struct Svg<'a> {
    map: &'a CdtMap,
    body: String,
    scale: f64,
}

impl<'a> Svg<'a> {
    pub fn new(map: &'a CdtMap) -> Self {
        let ext = map.extent().max;
        let scale = (800.0 / ext.x.max(ext.y)).clamp(0.5, 8.0);
        Svg {
            map,
            body: String::new(),
            scale,
        }
    }

    fn xy(&self, p: Point2) -> (f64, f64) {
        let h = self.map.extent().max.y;
        (p.x * self.scale, (h - p.y) * self.scale)
    }

    fn points(&self, pts: &[Point2]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.xy(p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Free cells and cutlines.
    pub fn dissection(mut self) -> Self {
        let mut s = String::from("<g id=\"cells\" fill=\"#f4f4f4\" stroke=\"#555\" stroke-width=\"0.6\">\n");
        for c in &self.map.dissection.cells {
            let _ = writeln!(s, "<polygon points=\"{}\"/>", self.points(&c.vertices));
        }
        s.push_str("</g>\n<g id=\"cutlines\" stroke=\"#d62728\" stroke-width=\"0.6\" stroke-dasharray=\"3 2\">\n");
        for c in &self.map.dissection.cutlines {
            let (a, b) = (self.xy(c.a), self.xy(c.b));
            let _ = writeln!(s, "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>", a.0, a.1, b.0, b.1);
        }
        s.push_str("</g>\n");
        self.body.push_str(&s);
        self
    }

    pub fn tree(mut self, edges: &[[Point2; 2]]) -> Self {
        let mut s = String::from("<g id=\"tree\" stroke=\"#999\" stroke-width=\"0.4\">\n");
        for e in edges {
            let (a, b) = (self.xy(e[0]), self.xy(e[1]));
            let _ = writeln!(s, "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>", a.0, a.1, b.0, b.1);
        }
        s.push_str("</g>\n");
        self.body.push_str(&s);
        self
    }

    pub fn path(mut self, pts: &[Point2], colour: &str, width: f64, label: &str) -> Self {
        let _ = writeln!(
            self.body,
            "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"{width}\" points=\"{}\"><title>{label}</title></polyline>",
            self.points(pts)
        );
        self
    }

    pub fn marker(mut self, p: Point2, colour: &str) -> Self {
        let (x, y) = self.xy(p);
        let _ = writeln!(self.body, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{colour}\"/>");
        self
    }

    /// Tree, every class path and the best path on top.
    pub fn plan(mut self, r: &PlanResult, start: Point2, goal: Point2) -> Self {
        if let Some(t) = &r.tree {
            self = self.tree(t);
        }
        for (i, c) in r.classes.iter().enumerate() {
            let label = format!("class {} length {:.3}", c.code, c.length);
            self = self.path(c.path.points(), PALETTE[i % PALETTE.len()], 1.5, &label);
        }
        if let Some(b) = &r.best {
            let label = format!("best {} length {:.3}", b.code, b.length);
            self = self.path(b.path.points(), "#e31a1c", 3.0, &label);
        }
        self.marker(start, "#2ca02c").marker(goal, "#d62728")
    }

    pub fn finish(self) -> String {
        let ext = self.map.extent().max;
        let (w, h) = (ext.x * self.scale, ext.y * self.scale);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n<rect width=\"100%\" height=\"100%\" fill=\"#333\"/>\n{}</svg>\n",
            self.body
        )
    }
}
