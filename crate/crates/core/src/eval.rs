//! Ground-truth scoring of reconstructed graphs: confusion counts over all
//! unordered pairs, ROC curves over a threshold family, AUC and distance to
//! the ideal corner. CSV and SVG renderings are produced as strings.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::graph::AdjacencyMatrix;
use crate::math;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("dimension mismatch: estimate is {estimate}, truth is {truth}")]
    Dimension { estimate: usize, truth: usize },
    #[error("no points")]
    NoPoints,
}

/// How TPR and FPR are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    /// `TP/(TP+FN)` and `FP/(FP+TN)`.
    #[default]
    Standard,
    /// Both counts divided by the number of pairs `C(n, 2)`.
    PaperLiteral,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Standard => "standard",
            Convention::PaperLiteral => "paper-literal",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "standard" => Some(Convention::Standard),
            "paper-literal" => Some(Convention::PaperLiteral),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn pairs(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

pub fn confusion(estimate: &AdjacencyMatrix, truth: &AdjacencyMatrix) -> Result<Confusion, EvalError> {
    if estimate.dim() != truth.dim() {
        return Err(EvalError::Dimension { estimate: estimate.dim(), truth: truth.dim() });
    }
    let n = truth.dim();
    let mut c = Confusion::default();
    for i in 0..n {
        for j in (i + 1)..n {
            match (estimate.get(i, j), truth.get(i, j)) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub tpr: f64,
    pub fpr: f64,
    /// A standard-convention denominator was zero; that rate is reported 0.
    pub degenerate: bool,
}

pub fn rates(c: &Confusion, convention: Convention) -> Rates {
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    match convention {
        Convention::Standard => Rates {
            tpr: ratio(c.tp, c.tp + c.fn_),
            fpr: ratio(c.fp, c.fp + c.tn),
            degenerate: c.tp + c.fn_ == 0 || c.fp + c.tn == 0,
        },
        Convention::PaperLiteral => {
            Rates { tpr: ratio(c.tp, c.pairs()), fpr: ratio(c.fp, c.pairs()), degenerate: c.pairs() == 0 }
        }
    }
}

/// `√((1 − TPR)² + FPR²)`.
pub fn corner_distance(tpr: f64, fpr: f64) -> f64 {
    math::sqrt((1.0 - tpr) * (1.0 - tpr) + fpr * fpr)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub zeta: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocResult {
    /// From `ζ = +∞` to `ζ = −∞`, preceded by the origin.
    pub points: Vec<RocPoint>,
    pub auc: f64,
    pub convention: Convention,
    pub degenerate: bool,
}

impl RocResult {
    fn from_points(points: Vec<RocPoint>, convention: Convention, degenerate: bool) -> Self {
        let auc = auc(&points);
        RocResult { points, auc, convention, degenerate }
    }

    /// Smallest corner distance over the curve and the `ζ` attaining it
    /// (first in curve order on ties).
    pub fn min_corner_distance(&self) -> (f64, f64) {
        self.points
            .iter()
            .map(|p| (corner_distance(p.tpr, p.fpr), p.zeta))
            .fold((f64::INFINITY, f64::NAN), |b, x| if x.0 < b.0 { x } else { b })
    }
}

/// Trapezoidal area under the polyline.
pub fn auc(points: &[RocPoint]) -> f64 {
    points.windows(2).map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0).sum()
}

/// ROC curve of the family `Â(ζ) = A_R ∪ {candidate pairs with score ≥ ζ}`.
/// Tied scores enter together. The curve starts at the origin, continues
/// with `Â(+∞) = A_R` and ends at `Â(−∞)`.
pub fn roc_from_scores(
    revealed: &AdjacencyMatrix,
    candidates: &[(usize, usize)],
    scores: &[f64],
    truth: &AdjacencyMatrix,
    convention: Convention,
) -> Result<RocResult, EvalError> {
    assert_eq!(candidates.len(), scores.len(), "one score per candidate pair");
    let mut c = confusion(revealed, truth)?;
    let mut degenerate = false;
    let mut push = |points: &mut Vec<RocPoint>, c: &Confusion, zeta: f64| {
        let r = rates(c, convention);
        degenerate |= r.degenerate;
        points.push(RocPoint { zeta, fpr: r.fpr, tpr: r.tpr });
    };
    let mut points = Vec::with_capacity(candidates.len() + 3);
    points.push(RocPoint { zeta: f64::INFINITY, fpr: 0.0, tpr: 0.0 });
    push(&mut points, &c, f64::INFINITY);
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut k = 0;
    while k < order.len() {
        let zeta = scores[order[k]];
        while k < order.len() && scores[order[k]] == zeta {
            let (i, j) = candidates[order[k]];
            if !revealed.get(i, j) {
                if truth.get(i, j) {
                    c.tp += 1;
                    c.fn_ -= 1;
                } else {
                    c.fp += 1;
                    c.tn -= 1;
                }
            }
            k += 1;
        }
        push(&mut points, &c, zeta);
    }
    if points.last().is_some_and(|p| p.zeta != f64::NEG_INFINITY) {
        push(&mut points, &c, f64::NEG_INFINITY);
    }
    Ok(RocResult::from_points(points, convention, degenerate))
}

/// Two-segment curve `(0,0) → (0, TPR(A_R)) → (1,1)` of the estimate that
/// keeps only the revealed recruitment edges.
pub fn revealed_baseline(revealed: &AdjacencyMatrix, truth: &AdjacencyMatrix) -> Result<RocResult, EvalError> {
    let c = confusion(revealed, truth)?;
    let r = rates(&c, Convention::Standard);
    let points = alloc::vec![
        RocPoint { zeta: f64::INFINITY, fpr: 0.0, tpr: 0.0 },
        RocPoint { zeta: f64::INFINITY, fpr: 0.0, tpr: r.tpr },
        RocPoint { zeta: f64::NEG_INFINITY, fpr: 1.0, tpr: 1.0 },
    ];
    Ok(RocResult::from_points(points, Convention::Standard, r.degenerate))
}

fn fmt_real(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

/// `zeta,fpr,tpr` rows with 17 significant digits.
pub fn to_csv(roc: &RocResult) -> Result<String, EvalError> {
    if roc.points.is_empty() {
        return Err(EvalError::NoPoints);
    }
    let mut s = String::from("zeta,fpr,tpr\n");
    for p in &roc.points {
        let _ = writeln!(s, "{},{},{}", fmt_real(p.zeta), fmt_real(p.fpr), fmt_real(p.tpr));
    }
    Ok(s)
}

/// A curve to draw: label, stroke colour, points.
pub struct Curve<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub roc: &'a RocResult,
}

/// Static 640×480 SVG with axes, a chance diagonal and one polyline per
/// curve.
pub fn to_svg(curves: &[Curve<'_>]) -> Result<String, EvalError> {
    if curves.is_empty() || curves.iter().any(|c| c.roc.points.is_empty()) {
        return Err(EvalError::NoPoints);
    }
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const M: f64 = 60.0;
    let px = |x: f64| M + x * (W - 2.0 * M);
    let py = |y: f64| H - M - y * (H - 2.0 * M);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="640" height="480" viewBox="0 0 640 480">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="640" height="480" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        M,
        M,
        W - 2.0 * M,
        H - 2.0 * M
    );
    for k in 0..=5 {
        let v = k as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{v:.1}</text>"#,
            px(v),
            H - M + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{v:.1}</text>"#,
            M - 6.0,
            py(v) + 4.0
        );
    }
    let _ = writeln!(s, r#"<text x="320" y="{}" font-size="14" text-anchor="middle">FPR</text>"#, H - 20.0);
    let _ = writeln!(s, r#"<text x="18" y="240" font-size="14" text-anchor="middle" transform="rotate(-90 18 240)">TPR</text>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 4"/>"#,
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    for (k, c) in curves.iter().enumerate() {
        let pts: Vec<String> = c.roc.points.iter().map(|p| format!("{:.2},{:.2}", px(p.fpr), py(p.tpr))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            c.color,
            pts.join(" ")
        );
        let y = M + 20.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{y:.2}" font-size="12" fill="{}">{} (AUC {:.3})</text>"#,
            W - M - 150.0,
            c.color,
            c.label,
            c.roc.auc
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn adj(n: usize, edges: &[(usize, usize)]) -> AdjacencyMatrix {
        let mut a = AdjacencyMatrix::new(n);
        for &(i, j) in edges {
            a.set(i, j, true);
        }
        a
    }

    #[test]
    fn confusion_examples() {
        let truth = adj(4, &[(0, 1), (1, 2), (0, 2)]);
        let c = confusion(&truth, &truth).unwrap();
        assert_eq!((c.fp, c.fn_), (0, 0));
        let full = AdjacencyMatrix::complete(4);
        assert_eq!(confusion(&full, &truth).unwrap(), Confusion { tp: 3, fp: 3, fn_: 0, tn: 0 });
        let comp = adj(4, &[(0, 3), (1, 3), (2, 3)]);
        let c = confusion(&comp, &truth).unwrap();
        assert_eq!((c.tp, c.tn), (0, 0));
        assert!(confusion(&AdjacencyMatrix::new(3), &truth).is_err());
    }

    #[test]
    fn rate_conventions() {
        let truth = adj(5, &[(0, 1), (1, 2)]);
        let r = rates(&confusion(&truth, &truth).unwrap(), Convention::Standard);
        assert_eq!((r.tpr, r.fpr), (1.0, 0.0));
        let full = AdjacencyMatrix::complete(5);
        let c = confusion(&full, &truth).unwrap();
        let r = rates(&c, Convention::Standard);
        assert_eq!((r.tpr, r.fpr), (1.0, 1.0));
        let r = rates(&c, Convention::PaperLiteral);
        assert_eq!((r.tpr, r.fpr), (2.0 / 10.0, 1.0 - 2.0 / 10.0));
        let empty = AdjacencyMatrix::new(5);
        assert!(rates(&confusion(&empty, &empty).unwrap(), Convention::Standard).degenerate);
    }

    #[test]
    fn corner_distance_example() {
        assert!((corner_distance(0.9, 0.1) - 0.02f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn perfect_ranking_has_unit_auc() {
        let truth = adj(4, &[(0, 1), (0, 2), (2, 3)]);
        let revealed = adj(4, &[(0, 1)]);
        let cands = vec![(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let scores = vec![5.0, -1.0, -2.0, -3.0, 4.0];
        let roc = roc_from_scores(&revealed, &cands, &scores, &truth, Convention::Standard).unwrap();
        assert_eq!(roc.auc, 1.0);
        assert_eq!((roc.points[0].fpr, roc.points[0].tpr), (0.0, 0.0));
        let last = roc.points.last().unwrap();
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        assert_eq!(roc.min_corner_distance().0, 0.0);
        // strictly monotone transform keeps the curve
        let warped: Vec<f64> = scores.iter().map(|s| libm::exp(*s) * 3.0).collect();
        let roc2 = roc_from_scores(&revealed, &cands, &warped, &truth, Convention::Standard).unwrap();
        assert_eq!(roc2.auc, roc.auc);
    }

    #[test]
    fn ties_collapse_to_one_point() {
        let truth = adj(3, &[(0, 1)]);
        let cands = vec![(0, 1), (0, 2), (1, 2)];
        let roc = roc_from_scores(&AdjacencyMatrix::new(3), &cands, &[1.0, 1.0, 1.0], &truth, Convention::Standard)
            .unwrap();
        assert_eq!(roc.points.len(), 4);
        assert_eq!(roc.auc, 0.5);
    }

    fn first_pairs(n: usize, count: usize) -> Vec<(usize, usize)> {
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).take(count).collect()
    }

    #[test]
    fn baseline_auc_formula() {
        let pairs = first_pairs(11, 25);
        let truth = adj(11, &pairs);
        let revealed = adj(11, &pairs[..7]);
        let b = revealed_baseline(&revealed, &truth).unwrap();
        let t = 7.0 / 25.0;
        assert!((b.auc - (t + (1.0 - t) / 2.0)).abs() < 1e-15);
        assert!((b.auc - 0.64).abs() < 1e-12);
        assert_eq!(revealed_baseline(&truth, &truth).unwrap().auc, 1.0);
        assert_eq!(revealed_baseline(&AdjacencyMatrix::new(11), &truth).unwrap().auc, 0.5);
    }

    #[test]
    fn csv_and_svg() {
        let pairs = first_pairs(11, 25);
        let b = revealed_baseline(&adj(11, &pairs[..7]), &adj(11, &pairs)).unwrap();
        let csv = to_csv(&b).unwrap();
        assert!(csv.starts_with("zeta,fpr,tpr\ninf,0.0000000000000000e0,0.0000000000000000e0\n"));
        assert!(csv.ends_with("-inf,1.0000000000000000e0,1.0000000000000000e0\n"));
        let svg = to_svg(&[Curve { label: "baseline", color: "red", roc: &b }]).unwrap();
        assert!(svg.contains(r#"width="640" height="480""#));
        // TPR 0.28 at FPR 0 maps to pixel (60, 480 − 60 − 0.28·360)
        assert!(svg.contains("60.00,420.00 60.00,319.20 580.00,60.00"));
        let empty = RocResult { points: vec![], auc: 0.0, convention: Convention::Standard, degenerate: false };
        assert_eq!(to_svg(&[Curve { label: "x", color: "blue", roc: &empty }]), Err(EvalError::NoPoints));
        assert_eq!(to_csv(&empty), Err(EvalError::NoPoints));
    }
}
