//! CSV and JSON encodings of traces, reports and predictions.

use std::fmt::Write as _;

use nrange_core::structure::{K2Data, Witnesses};
use nrange_core::{
    active_partition, BlockMatrix, BoundaryTrace, Cplx, DenseMatrix, Ellipse, EllipseHull, StructureReport,
    VerificationReport,
};
use serde_json::{json, Value};

pub fn complex(z: Cplx) -> Value {
    json!([z.re, z.im])
}

pub fn matrix(m: &DenseMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| complex(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn ellipse(e: &Ellipse) -> Value {
    let foci = e.foci();
    json!({
        "center": complex(e.center),
        "semi_major": e.semi_major,
        "semi_minor": e.semi_minor,
        "axis_angle": e.axis_angle,
        "foci": [complex(foci[0]), complex(foci[1])],
    })
}

/// Number of distinct ellipses shaping the boundary, when the hull allows
/// an arc partition.
pub fn m_of(hull: &EllipseHull, samples: usize) -> Option<usize> {
    active_partition(hull, samples).ok().map(|p| p.active_count())
}

fn k2_data(k: &K2Data) -> Value {
    json!({
        "h1": k.h1,
        "h2": k.h2,
        "z1": complex(k.z1),
        "z2": complex(k.z2),
        "coincident": k.coincident,
        "z_in_basis": matrix(&k.z_entries),
        "abc": k.abc.as_ref().map(|t| json!({"a": t.a, "b": t.b, "c": t.c})),
    })
}

fn witnesses(w: &Witnesses) -> Value {
    json!({
        "eigenbasis": w.eigenbasis.as_ref().map(matrix),
        "pairs": w.pairs.iter().map(|(h, z)| json!({"h": h, "z": complex(*z)})).collect::<Vec<_>>(),
        "scalar": w.scalar.map(complex),
        "subspace": w.subspace.as_ref().map(matrix),
        "common_eigenvector": w.common_eigenvector.as_ref().map(|v| v.iter().copied().map(complex).collect::<Vec<_>>()),
        "k2": w.k2.as_ref().map(k2_data),
    })
}

fn header(a: &BlockMatrix, label: Option<&str>) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("label".into(), json!(label));
    m.insert("n".into(), json!(a.n()));
    m.insert("k".into(), json!(a.k()));
    m.insert("alpha".into(), complex(a.alpha()));
    m.insert("beta".into(), complex(a.beta()));
    m
}

pub fn analysis(a: &BlockMatrix, label: Option<&str>, report: &StructureReport, samples: usize) -> Value {
    let mut out = header(a, label);
    out.insert("classification".into(), json!(report.classification.name()));
    out.insert("nestedness".into(), json!(report.nested.map(|n| n.name())));
    let hull = report.predicted.as_ref();
    out.insert("m".into(), json!(hull.and_then(|h| m_of(h, samples))));
    out.insert("ellipses".into(), json!(hull.map_or(Vec::new(), |h| h.ellipses.iter().map(ellipse).collect())));
    out.insert(
        "isolated_points".into(),
        json!(hull.map_or(Vec::new(), |h| h.isolated_points.iter().copied().map(complex).collect())),
    );
    out.insert("witnesses".into(), witnesses(&report.witnesses));
    out.insert("notes".into(), json!(report.notes));
    Value::Object(out)
}

pub fn prediction(a: &BlockMatrix, label: Option<&str>, report: &StructureReport, samples: usize) -> Value {
    let hull = report.predicted.as_ref();
    json!({
        "label": label,
        "classification": report.classification.name(),
        "nestedness": report.nested.map(|n| n.name()),
        "m": hull.and_then(|h| m_of(h, samples)),
        "center": complex(hull.and_then(EllipseHull::common_center).unwrap_or_else(|| a.center())),
        "ellipses": hull.map_or(Vec::new(), |h| h.ellipses.iter().map(ellipse).collect()),
        "isolated_points": hull.map_or(Vec::new(), |h| h.isolated_points.iter().copied().map(complex).collect()),
    })
}

/// Outcome of the `verify` command.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub report: Option<VerificationReport>,
    pub symmetry_deviation: f64,
    pub formula_deviation: f64,
    pub k2_closed_form_deviation: Option<f64>,
    pub passed: bool,
    pub notes: Vec<String>,
}

pub fn verification(
    a: &BlockMatrix,
    label: Option<&str>,
    structure: &StructureReport,
    outcome: &VerifyOutcome,
    samples: usize,
    tol: f64,
) -> Value {
    let mut out = header(a, label);
    out.insert("classification".into(), json!(structure.classification.name()));
    out.insert("nestedness".into(), json!(structure.nested.map(|n| n.name())));
    out.insert("samples".into(), json!(samples));
    out.insert("tol".into(), json!(tol));
    out.insert("passed".into(), json!(outcome.passed));
    let r = outcome.report.as_ref();
    out.insert("max_support_deviation".into(), json!(r.map(|r| r.max_support_deviation)));
    out.insert("symmetry_deviation".into(), json!(outcome.symmetry_deviation));
    out.insert("formula_vs_direct_deviation".into(), json!(outcome.formula_deviation));
    out.insert("trig_fit_residual".into(), json!(r.and_then(|r| r.trig_fit_residual)));
    out.insert("flat_portion_count".into(), json!(r.and_then(|r| r.flat_portion_count)));
    out.insert("k2_closed_form_deviation".into(), json!(outcome.k2_closed_form_deviation));
    out.insert("notes".into(), json!(outcome.notes));
    Value::Object(out)
}

pub fn trace_json(trace: &BoundaryTrace) -> Value {
    json!({
        "samples": trace.samples.iter().map(|s| json!({
            "theta": s.theta,
            "support": s.support,
            "point": complex(s.point),
        })).collect::<Vec<_>>(),
        "anchors": [complex(trace.anchors[0]), complex(trace.anchors[1])],
    })
}

/// `theta,support,re,im` rows, then one row per anchor with the first two
/// columns empty.
pub fn trace_csv(trace: &BoundaryTrace) -> String {
    let mut out = String::from("theta,support,re,im\n");
    for s in &trace.samples {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", s.theta, s.support, s.point.re, s.point.im);
    }
    for z in trace.anchors {
        let _ = writeln!(out, ",,{:.16e},{:.16e}", z.re, z.im);
    }
    out
}

/// One row per predicted ellipse.
pub fn prediction_csv(report: &StructureReport) -> String {
    let mut out = String::from("center_re,center_im,semi_major,semi_minor,axis_angle\n");
    for e in report.predicted.iter().flat_map(|h| &h.ellipses) {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            e.center.re, e.center.im, e.semi_major, e.semi_minor, e.axis_angle
        );
    }
    out
}
