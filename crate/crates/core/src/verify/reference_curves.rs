use super::convergence::{ConvergenceReport, Problem};
use crate::rmm::Pairing;

/// Published antiplane errors as (unknowns, error) for u and for p, by pairing.
const ANTIPLANE: [(Pairing, &[(f64, f64)], &[(f64, f64)]); 4] = [
    (
        Pairing::L1_N1_0,
        &[(26.0, 0.78416), (82.0, 0.24408), (290.0, 0.064997), (1090.0, 0.016523), (4226.0, 0.0041485), (16642.0, 0.0010382)],
        &[(26.0, 3.1148), (82.0, 1.7885), (290.0, 0.93625), (1090.0, 0.47414), (4226.0, 0.23785), (16642.0, 0.11903)],
    ),
    (
        Pairing::L2_N2_1,
        &[(58.0, 0.10483), (194.0, 0.013446), (706.0, 0.0017116), (2690.0, 2.1683e-4), (10498.0, 2.7348e-5), (41474.0, 3.4371e-6)],
        &[(58.0, 0.82233), (194.0, 0.22135), (706.0, 0.05751), (2690.0, 0.014667), (10498.0, 0.0037042), (41474.0, 9.3086e-4)],
    ),
    (
        Pairing::B3_N1_2,
        &[(146.0, 0.0096615), (530.0, 5.9115e-4), (2018.0, 3.5802e-5), (7874.0, 2.1904e-6), (31106.0, 1.3527e-7)],
        &[(146.0, 0.099857), (530.0, 0.012787), (2018.0, 0.0015956), (7874.0, 1.9851e-4), (31106.0, 2.4732e-5)],
    ),
    (
        Pairing::B3_N2_2,
        &[(122.0, 0.0096615), (434.0, 5.9115e-4), (1634.0, 3.5802e-5), (6338.0, 2.1904e-6), (24962.0, 1.3527e-7)],
        &[(122.0, 0.099899), (434.0, 0.012789), (1634.0, 0.0015956), (6338.0, 1.9852e-4), (24962.0, 2.4732e-5)],
    ),
];

/// Published antiplane error curves `(u, p)` for a pairing.
pub fn reference_curve(problem: Problem, pairing: Pairing) -> Option<(&'static [(f64, f64)], &'static [(f64, f64)])> {
    if problem != Problem::Antiplane {
        return None;
    }
    ANTIPLANE.iter().find(|(p, _, _)| *p == pairing).map(|(_, u, p)| (*u, *p))
}

/// Piecewise linear interpolation in log-log coordinates, extended linearly
/// past both ends.
pub fn loglog_interpolate(curve: &[(f64, f64)], x: f64) -> f64 {
    let lx = x.ln();
    let k = curve.windows(2).position(|w| lx <= w[1].0.ln()).unwrap_or(curve.len() - 2);
    let (a, b) = (curve[k], curve[k + 1]);
    let t = (lx - a.0.ln()) / (b.0.ln() - a.0.ln());
    (a.1.ln() + t * (b.1.ln() - a.1.ln())).exp()
}

/// Largest factor between measured and published errors at the measured
/// unknown counts, over both fields and every level.
pub fn envelope_factor(report: &ConvergenceReport) -> Option<f64> {
    let (cu, cp) = reference_curve(report.problem, report.pairing)?;
    let mut worst = 1.0f64;
    for l in &report.levels {
        for (e, c) in [(l.err_u, cu), (l.err_p, cp)] {
            let r = loglog_interpolate(c, l.dofs as f64);
            worst = worst.max(e / r).max(r / e);
        }
    }
    Some(worst)
}
