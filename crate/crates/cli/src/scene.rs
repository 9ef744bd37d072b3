//! Layered SVG scenes with the fixed view box `[−R, R]²`.

use std::fmt::Write as _;

use schottky_lab::Complex;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Circle { center: Complex, radius: f64 },
    Square { lo: Complex, side: f64 },
    Polyline(Vec<Complex>),
    Points(Vec<Complex>),
    Label { at: Complex, text: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub name: String,
    pub stroke: String,
    pub fill: String,
    pub items: Vec<Primitive>,
}

/// Layers are drawn in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub outer_radius: f64,
    pub layers: Vec<Layer>,
}

impl Scene {
    pub fn new(outer_radius: f64) -> Self {
        Self { outer_radius, layers: Vec::new() }
    }

    pub fn layer(&mut self, name: &str, stroke: &str, fill: &str) -> &mut Layer {
        self.layers.push(Layer { name: name.into(), stroke: stroke.into(), fill: fill.into(), items: Vec::new() });
        self.layers.last_mut().expect("just pushed")
    }

    fn check_finite(&self) -> Result<(), CliError> {
        let bad = |z: &Complex| !(z.re.is_finite() && z.im.is_finite());
        for layer in &self.layers {
            for item in &layer.items {
                let finite = match item {
                    Primitive::Circle { center, radius } => !bad(center) && radius.is_finite(),
                    Primitive::Square { lo, side } => !bad(lo) && side.is_finite(),
                    Primitive::Polyline(ps) | Primitive::Points(ps) => !ps.iter().any(bad),
                    Primitive::Label { at, .. } => !bad(at),
                };
                if !finite {
                    return Err(CliError::Failure(format!("non-finite coordinate in layer {}", layer.name)));
                }
            }
        }
        Ok(())
    }

    /// SVG text; the `y` axis points up.
    pub fn to_svg(&self) -> Result<String, CliError> {
        self.check_finite()?;
        let r = self.outer_radius;
        let stroke_width = r / 400.0;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="800">"#,
            f(-r),
            f(-r),
            f(2.0 * r),
            f(2.0 * r)
        );
        for layer in &self.layers {
            let _ = writeln!(
                s,
                r#"  <g id="{}" stroke="{}" fill="{}" stroke-width="{}">"#,
                layer.name,
                layer.stroke,
                layer.fill,
                f(stroke_width)
            );
            for item in &layer.items {
                match item {
                    Primitive::Circle { center, radius } => {
                        let _ = writeln!(s, r#"    <circle cx="{}" cy="{}" r="{}"/>"#, f(center.re), f(-center.im), f(*radius));
                    }
                    Primitive::Square { lo, side } => {
                        let _ = writeln!(
                            s,
                            r#"    <rect x="{}" y="{}" width="{}" height="{}"/>"#,
                            f(lo.re),
                            f(-(lo.im + side)),
                            f(*side),
                            f(*side)
                        );
                    }
                    Primitive::Polyline(ps) => {
                        let pts: Vec<String> = ps.iter().map(|p| format!("{},{}", f(p.re), f(-p.im))).collect();
                        let _ = writeln!(s, r#"    <polyline fill="none" points="{}"/>"#, pts.join(" "));
                    }
                    Primitive::Points(ps) => {
                        for p in ps {
                            let _ = writeln!(
                                s,
                                r#"    <circle cx="{}" cy="{}" r="{}"/>"#,
                                f(p.re),
                                f(-p.im),
                                f(2.0 * stroke_width)
                            );
                        }
                    }
                    Primitive::Label { at, text } => {
                        let _ = writeln!(
                            s,
                            r#"    <text x="{}" y="{}" font-size="{}">{}</text>"#,
                            f(at.re),
                            f(-at.im),
                            f(r / 30.0),
                            escape(text)
                        );
                    }
                }
            }
            s.push_str("  </g>\n");
        }
        s.push_str("</svg>\n");
        Ok(s)
    }
}

fn f(x: f64) -> String {
    let v = format!("{x:.6}");
    if v == "-0.000000" {
        "0.000000".into()
    } else {
        v
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn view_box_and_layer_order() {
        let mut scene = Scene::new(2.0);
        scene.layer("domain", "black", "none").items.push(Primitive::Circle { center: Complex::new(0.0, 0.0), radius: 2.0 });
        scene.layer("labels", "none", "black").items.push(Primitive::Label { at: Complex::new(0.5, 0.5), text: "x0 <".into() });
        let svg = scene.to_svg().unwrap();
        assert!(svg.contains(r#"viewBox="-2.000000 -2.000000 4.000000 4.000000""#));
        assert!(svg.find("domain").unwrap() < svg.find("labels").unwrap());
        assert!(svg.contains("x0 &lt;"));
    }

    #[test]
    fn non_finite_rejected() {
        let mut scene = Scene::new(1.0);
        scene.layer("bad", "black", "none").items.push(Primitive::Points(vec![Complex::new(f64::NAN, 0.0)]));
        assert!(scene.to_svg().is_err());
    }
}
