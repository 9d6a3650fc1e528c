use std::fmt::Write as _;

use num_traits::{Signed, ToPrimitive, Zero};

use super::{to_vec, Diagram, Point, ScatterError, Window};
use crate::scalars::{JsonScalar, Rational};

/// Serializes a diagram as `"json"` or `"svg"`.
pub fn export<C: JsonScalar>(d: &Diagram<C>, format: &str) -> Result<String, ScatterError> {
    match format {
        "json" => Ok(serde_json::to_string_pretty(d).expect("diagrams serialize")),
        "svg" => Ok(to_svg(d)),
        other => Err(ScatterError::UnsupportedFormat(other.to_string())),
    }
}

pub fn import<C: JsonScalar>(json: &str) -> Result<Diagram<C>, ScatterError> {
    serde_json::from_str(json).map_err(|e| ScatterError::Import(e.to_string()))
}

/// Visible box: the window, or the singular points and events padded.
fn view<C: JsonScalar>(d: &Diagram<C>) -> Window {
    if let Some(w) = &d.window {
        return w.clone();
    }
    let pts: Vec<&Point> = d.singular_points.iter().map(|s| &s.point).chain(d.events.iter().map(|e| &e.point)).collect();
    let pad = Rational::from_integer(2.into());
    let mut lo = [-pad.clone(), -pad.clone()];
    let mut hi = [pad.clone(), pad.clone()];
    if let Some(first) = pts.first() {
        lo = [&first[0] - &pad, &first[1] - &pad];
        hi = [&first[0] + &pad, &first[1] + &pad];
    }
    for p in pts {
        for k in 0..2 {
            if p[k].clone() - &pad < lo[k] {
                lo[k] = &p[k] - &pad;
            }
            if p[k].clone() + &pad > hi[k] {
                hi[k] = &p[k] + &pad;
            }
        }
    }
    Window { lo, hi }
}

/// Ray parameters `[s₀, s₁]` inside the box (Liang-Barsky).
fn clip(base: &Point, dir: &Point, w: &Window) -> Option<(Rational, Rational)> {
    let mut s0 = Rational::zero();
    let mut s1: Option<Rational> = None;
    for k in 0..2 {
        if dir[k].is_zero() {
            if base[k] < w.lo[k] || base[k] > w.hi[k] {
                return None;
            }
            continue;
        }
        let a = (&w.lo[k] - &base[k]) / &dir[k];
        let b = (&w.hi[k] - &base[k]) / &dir[k];
        let (enter, exit) = if dir[k].is_positive() { (a, b) } else { (b, a) };
        if enter > s0 {
            s0 = enter;
        }
        s1 = Some(match s1 {
            Some(x) if x < exit => x,
            _ => exit,
        });
    }
    let s1 = s1?;
    (s0 < s1).then_some((s0, s1))
}

const PALETTE: [&str; 6] = ["#1f4e79", "#c0392b", "#27ae60", "#8e44ad", "#d68910", "#5d6d7e"];

/// Lines clipped to the view, coloured by generation; walls that are
/// trivial are drawn dashed.
pub fn to_svg<C: JsonScalar>(d: &Diagram<C>) -> String {
    let w = view(d);
    let f = |q: &Rational| q.to_f64().unwrap_or(0.0);
    let (x0, y0, x1, y1) = (f(&w.lo[0]), f(&w.lo[1]), f(&w.hi[0]), f(&w.hi[1]));
    let scale = 400.0 / (x1 - x0).max(y1 - y0).max(1e-9);
    let sx = |x: f64| (x - x0) * scale;
    let sy = |y: f64| (y1 - y) * scale;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}">"#,
        (x1 - x0) * scale,
        (y1 - y0) * scale
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for l in &d.lines {
        let dir = to_vec(l.alpha);
        let Some((s0, s1)) = clip(&l.base, &dir, &w) else { continue };
        let p = |s: &Rational| (f(&(&l.base[0] + s * &dir[0])), f(&(&l.base[1] + s * &dir[1])));
        let (a, b) = (p(&s0), p(&s1));
        let colour = PALETTE[l.generation % PALETTE.len()];
        let dash = match &l.wall {
            Some(wall) if wall.is_trivial() => r#" stroke-dasharray="4 3""#,
            _ => "",
        };
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="1.5"{dash}><title>line {} alpha {}</title></line>"#,
            sx(a.0),
            sy(a.1),
            sx(b.0),
            sy(b.1),
            l.id,
            l.alpha
        );
    }
    for e in &d.events {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#, sx(f(&e.point[0])), sy(f(&e.point[1])));
    }
    for s in &d.singular_points {
        let (x, y) = (sx(f(&s.point[0])), sy(f(&s.point[1])));
        let _ = writeln!(
            out,
            r#"<path d="M{:.2} {:.2} L{:.2} {:.2} M{:.2} {:.2} L{:.2} {:.2}" stroke="black" stroke-width="2"/>"#,
            x - 5.0,
            y - 5.0,
            x + 5.0,
            y + 5.0,
            x - 5.0,
            y + 5.0,
            x + 5.0,
            y - 5.0
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::{build, SingularPoint};
    use super::*;
    use crate::lattice::Covector;
    use crate::scalars::rational::int;

    #[test]
    fn json_round_trip() {
        let empty = Diagram::<Rational>::new(vec![], int(3), 6, None).unwrap();
        let j = export(&empty, "json").unwrap();
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["lines"].as_array().unwrap().len(), 0);
        assert_eq!(import::<Rational>(&j).unwrap(), empty);

        let d = Diagram::<Rational>::new(
            vec![SingularPoint::new([int(0), int(0)]), SingularPoint::with_alpha([int(-1), int(1)], Covector::DX)],
            int(2),
            6,
            None,
        )
        .unwrap();
        let d = build(&d).unwrap();
        // C = 2 admits only the (1, 1) newborn
        assert_eq!(d.events.len(), 1);
        assert_eq!(d.lines.len(), 5);
        let j = export(&d, "json").unwrap();
        assert_eq!(import::<Rational>(&j).unwrap(), d);
        assert!(export(&d, "svg").unwrap().starts_with("<svg"));
        assert!(matches!(export(&d, "png"), Err(ScatterError::UnsupportedFormat(_))));
    }
}
