//! Plain-text helpers. Floats print with three decimals.

use std::fmt::Write;

use semchan::kb::GroundAtom;
use semchan::multiagent::Estimate;

pub fn f3(v: f64) -> String {
    format!("{v:.3}")
}

pub fn estimate(e: &Estimate) -> String {
    match e {
        Estimate::Value(v) => f3(*v),
        Estimate::Absent(a) => a.code().to_owned(),
    }
}

pub fn atoms<'a>(it: impl IntoIterator<Item = &'a GroundAtom>) -> String {
    let v: Vec<String> = it.into_iter().map(ToString::to_string).collect();
    if v.is_empty() {
        "-".to_owned()
    } else {
        v.join(" ")
    }
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}
