use std::fmt::Write;

use nalgebra::Vector3;

use crate::element::{element_dimension, VectorElement};
use crate::error::Result;
use crate::reference::{PolytopeId, PolytopeKind, ReferenceSimplex};
use crate::scalar_basis::ScalarFamily;
use crate::templates::{lowest_order_fields, template_set, Space, VectorFamily};

fn label(p: &PolytopeId) -> String {
    let v: String = p.vertices().iter().map(|v| (v + 1).to_string()).collect();
    format!("T_{v}")
}

/// Trace of a reference field on a facet or edge, as a vector.
fn reference_trace(s: ReferenceSimplex, space: Space, q: &PolytopeId, v: &Vector3<f64>) -> Result<Vector3<f64>> {
    Ok(match (space, q.kind()) {
        (Space::HCurl, PolytopeKind::Edge) => Vector3::new(s.edge_tangent(q)?.dot(v), 0.0, 0.0),
        (Space::HCurl, _) => s.oriented_normal(q)?.cross(v),
        (Space::HDiv, _) => Vector3::new(s.oriented_normal(q)?.dot(v), 0.0, 0.0),
    })
}

/// Text report of an element: template sets, function counts per polytope,
/// the function list and the largest trace of each function on every edge
/// (H(curl)) or facet (H(div)), sampled at 7 points.
pub fn tabulate_report(family: VectorFamily, p: usize, dim: usize, scalar: ScalarFamily) -> Result<String> {
    let s = ReferenceSimplex::from_dim(dim)?;
    let el = VectorElement::new(family, p, s, scalar)?;
    let mut out = String::new();
    let name = family.name().to_uppercase();
    writeln!(out, "element {name} order {p} on the reference {}", s.name()).unwrap();
    writeln!(out, "scalar basis {scalar} order {p}").unwrap();
    writeln!(out, "functions {} (expected {})", el.len(), element_dimension(family, p, s).unwrap_or(0)).unwrap();

    if matches!(family, VectorFamily::N1 | VectorFamily::Rt) {
        writeln!(out, "\nlowest-order fields").unwrap();
        let rule_name = if family.space() == Space::HCurl { "rot" } else { "div" };
        for (k, f) in lowest_order_fields(family, s)?.iter().enumerate() {
            let d = if family.space() == Space::HCurl {
                if dim == 2 {
                    format!("{rule_name} = {}", f.curl().z)
                } else {
                    let c = f.curl();
                    format!("curl = ({}, {}, {})", c.x, c.y, c.z)
                }
            } else {
                format!("{rule_name} = {}", f.div())
            };
            writeln!(out, "  phi_{} = {f}  {d}", k + 1).unwrap();
        }
    }
    let needs_set = matches!(family, VectorFamily::N2 | VectorFamily::Bdm) || p >= 1;
    if needs_set {
        writeln!(out, "\ntemplate sets").unwrap();
        for (poly, fields) in template_set(family, s)?.entries() {
            let list: Vec<String> = fields.iter().map(|f| f.to_string()).collect();
            writeln!(out, "  {} = {{{}}}", label(poly), list.join(", ")).unwrap();
        }
    }

    writeln!(out, "\nfunctions per polytope").unwrap();
    for (poly, n) in el.counts_by_polytope() {
        writeln!(out, "  {poly}: {n}").unwrap();
    }

    writeln!(out, "\nfunctions").unwrap();
    for (i, f) in el.functions().iter().enumerate() {
        writeln!(out, "  {i:>3}  {:<15} on {:<5} from {}", f.kind.to_string(), f.association.to_string(), f.source)
            .unwrap();
    }

    let targets: Vec<PolytopeId> = match family.space() {
        Space::HCurl => s.edges(),
        Space::HDiv => s.facets(),
    };
    let header: Vec<String> = targets.iter().map(|t| format!("{:>8}", t.to_string())).collect();
    writeln!(
        out,
        "\nmax |{} trace|\n  idx {}",
        if family.space() == Space::HCurl { "tangential" } else { "normal" },
        header.join("")
    )
    .unwrap();
    let samples: Vec<Vec<_>> = targets
        .iter()
        .map(|t| {
            let v: Vec<_> = t.vertices().iter().map(|&k| s.vertex(k)).collect();
            (1..=7)
                .map(|j| {
                    let a = j as f64 / 8.0;
                    let b = if v.len() == 3 { (1.0 - a) / 3.0 } else { 0.0 };
                    let w0 = 1.0 - a - b;
                    v[0] * w0 + v[1] * a + v.get(2).map(|x| x * b).unwrap_or_default()
                })
                .collect()
        })
        .collect();
    for i in 0..el.len() {
        let mut row = format!("  {i:>3} ");
        for (t, pts) in targets.iter().zip(&samples) {
            let mut m = 0.0f64;
            for x in pts {
                let v = el.tabulate(x).values[i];
                m = m.max(reference_trace(s, family.space(), t, &v)?.norm());
            }
            let m = if m < 1e-13 { 0.0 } else { m };
            row.push_str(&format!("{m:>8.4}"));
        }
        writeln!(out, "{}", row.trim_end()).unwrap();
    }
    Ok(out)
}
