//! ASCII rendering of the delta sequence of a window, grouped into APAP
//! periods: `[Δ(j) | block | Δ(j+p-1)]` for each multiple `j` of `p`.

use std::fmt::Write as _;

use crate::apap::is_apap;
use crate::approximator::{
    detect_structure, ApproxError, FindingKind, StructureFinding, Verification,
};
use crate::linalg::SymMat;
use crate::quasihom::{delta, normalize, QuasiHomWindow};
use crate::seq::DeltaSeq;

/// Assigns short names to matrices up to sign, in order of first use.
#[derive(Default)]
struct Legend {
    names: Vec<(String, SymMat)>,
}

impl Legend {
    fn label(&mut self, m: &SymMat) -> String {
        if m.is_zero() {
            return "0".into();
        }
        let neg = -m;
        for (name, v) in &self.names {
            if v == m {
                return name.clone();
            }
            if *v == neg {
                return format!("-{name}");
            }
        }
        let k = self.names.len();
        let name = if k < 26 {
            ((b'a' + k as u8) as char).to_string()
        } else {
            format!("v{k}")
        };
        self.names.push((name.clone(), m.clone()));
        name
    }

    fn write_to(&self, out: &mut String) {
        for (name, m) in &self.names {
            let _ = writeln!(out, "  {name} = {m}");
        }
    }
}

/// One row per period: `[Δ(j) | Δ(j+1) … Δ(j+p-2) | Δ(j+p-1)]`, with partial
/// periods at the window edges shown as `…`.
pub fn period_rows(d: &DeltaSeq, p: i64) -> String {
    let mut legend = Legend::default();
    // block values first, so the palindrome reads a b … b a
    for i in 1..=p - 2 {
        if let Some(m) = d.try_get(i) {
            legend.label(m);
        }
    }
    let mut out = String::new();
    let first = d.lo().div_euclid(p) * p;
    let mut j = first;
    while j <= d.hi() {
        let cell = |i: i64, legend: &mut Legend| match d.try_get(i) {
            Some(m) => legend.label(m),
            None => "…".into(),
        };
        let head = cell(j, &mut legend);
        let block: Vec<String> = (j + 1..j + p - 1).map(|i| cell(i, &mut legend)).collect();
        let tail = cell(j + p - 1, &mut legend);
        let body = if p > 2 {
            format!("[{head} | {} | {tail}]", block.join(" "))
        } else {
            format!("[{head} | {tail}]")
        };
        let _ = writeln!(out, "  {:>5}..{:<5} {body}", j, j + p - 1);
        j += p;
    }
    out.push_str("legend:\n");
    legend.write_to(&mut out);
    out
}

fn dims_table(finding: &StructureFinding) -> String {
    let mut out = String::from("  m  dim V_m\n");
    for (m, dim) in finding.line_dims.iter().enumerate() {
        let _ = writeln!(out, "  {m:>2}  {dim}");
    }
    out
}

/// Smallest `p` at which the sequence has APAP shape, if any.
fn apap_shape(d: &DeltaSeq) -> Option<i64> {
    (2..=d.radius()).find(|&p| is_apap(d, p).unwrap_or(false))
}

/// Diagram text together with the kind of finding it depicts.
pub fn render_show(
    f: &QuasiHomWindow,
    verification: Verification,
) -> Result<(FindingKind, String), ApproxError> {
    let (g, _) = normalize(f);
    let d = delta(&g);
    if d.iter().all(|(_, m)| m.is_zero()) {
        let text = format!(
            "degenerate: every delta vanishes (f is the homomorphism x ↦ x·f(1)) on N = {}\n",
            f.radius()
        );
        return Ok((FindingKind::Degenerate, text));
    }
    let finding = detect_structure(&d, verification)?;
    let mut out = String::new();
    if finding.unverified {
        out.push_str("unverified: quasihomomorphism check skipped\n");
    }
    match finding.kind {
        FindingKind::Structured => {
            let p = finding.p.expect("structured finding carries p");
            let m = finding.m.expect("structured finding carries m");
            let _ = writeln!(out, "structured: period {p}, m = {m}, N = {}", f.radius());
            out.push_str(&period_rows(&d, p));
        }
        FindingKind::Degenerate => {
            let _ = writeln!(
                out,
                "degenerate: lines L_i (i ≠ 0, -1) span dimension ≤ 2 on N = {}; A = f(1)",
                f.radius()
            );
            out.push_str(&dims_table(&finding));
            if let Some(p) = apap_shape(&d) {
                let _ = writeln!(out, "APAP shape with period {p}:");
                out.push_str(&period_rows(&d, p));
            }
        }
        FindingKind::Inconclusive => {
            let _ = writeln!(
                out,
                "inconclusive: dim V_m reaches 3 at m = {}, needs N >= {} (have {})",
                finding.m.expect("set"),
                finding.required_n.expect("set"),
                f.radius()
            );
            out.push_str(&dims_table(&finding));
        }
        FindingKind::NotQuasihom => {
            out.push_str("not a 1-quasihomomorphism: no APAP structure to render\n");
        }
    }
    Ok((finding.kind, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, period_three_spec};

    #[test]
    fn zero_window_is_one_line() {
        let f = QuasiHomWindow::from_fn(2, 4, |_| SymMat::zero(2)).unwrap();
        let (_, s) = render_show(&f, Verification::Check).unwrap();
        assert_eq!(s.lines().count(), 1);
        assert!(s.starts_with("degenerate"));
    }

    #[test]
    fn period_three_rows() {
        let f = generate(&period_three_spec()).unwrap();
        let (_, s) = render_show(&f, Verification::Check).unwrap();
        assert!(s.contains("APAP shape with period 3"), "{s}");
        assert!(s.contains("[-b | a | b]"), "{s}");
        assert!(s.contains("m  dim V_m"));
    }
}
