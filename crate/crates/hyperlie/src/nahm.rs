//! Trajectories of Nahm's equations dB_i/dt = -[B_j, B_k] (cyclic) on a
//! truncated half-line [-T, 0], closed-form symmetric solutions used as
//! oracles, the moduli tangent frame with its L^2 metric, the evaluation map
//! onto leaf closures, and the dichotomy of the V_0 flow.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{HyperLieError, Result};
use crate::poisson::casimirs;
use crate::su2::{bracket, inner, phi, Triple, Vec3};

/// A point of the Nahm phase space.
pub type NahmState = Triple;

/// Right-hand side (-[B2,B3], -[B3,B1], -[B1,B2]); equal to minus the first
/// frame field of the cyclically permuted triple (B2, B3, B1).
pub fn nahm_rhs(s: &NahmState) -> NahmState {
    Triple::new(
        -bracket(&s.a2, &s.a3),
        -bracket(&s.a3, &s.a1),
        -bracket(&s.a1, &s.a2),
    )
}

/// How the trajectory approaches its limit at t -> -infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DecayKind {
    /// ||state - limit|| ~ C exp(rate * t), rate > 0.
    Exponential { rate: f64 },
    /// ||state - limit|| ~ C (|t| + shift)^(-power).
    Polynomial { power: f64, shift: f64 },
    /// Already at the limit to rounding (fixed point).
    Settled,
}

/// A discretized solution on [-T, 0]; times stored descending from 0.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub states: Vec<NahmState>,
    pub step: f64,
    pub limit: NahmState,
    pub decay: DecayKind,
    /// RMS residual of the decay fit in log space.
    pub decay_residual: f64,
}

pub(crate) fn rk4_step(s: &Triple, dt: f64, rhs: impl Fn(&Triple) -> Triple) -> Triple {
    let k1 = rhs(s);
    let k2 = rhs(&(*s + k1 * (dt / 2.0)));
    let k3 = rhs(&(*s + k2 * (dt / 2.0)));
    let k4 = rhs(&(*s + k3 * dt));
    *s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// Ordinary least squares for y = a + m x; returns (a, m, rms residual).
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    let m = (n * sxy - sx * sy) / det;
    let a = (sy - m * sx) / n;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - a - m * xi).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (a, m, rms)
}

/// Fit of a positive decaying sequence against the exponential and shifted
/// power-law models; returns the better model and its log-space residual.
fn fit_decay(ts: &[f64], vals: &[f64]) -> (DecayKind, f64) {
    let logs: Vec<f64> = vals.iter().map(|v| v.max(1e-300).ln()).collect();
    let (_, rate, res_exp) = line_fit(ts, &logs);
    let mut best_poly: Option<(f64, f64, f64)> = None; // (power, shift, res)
    for shift in [-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0] {
        if ts.iter().any(|&t| t.abs() + shift < 1.0) {
            continue;
        }
        let lx: Vec<f64> = ts.iter().map(|&t| (t.abs() + shift).ln()).collect();
        let (_, slope, res) = line_fit(&lx, &logs);
        if best_poly.map_or(true, |(_, _, r)| res < r) {
            best_poly = Some((-slope, shift, res));
        }
    }
    match best_poly {
        Some((power, shift, res_poly)) if res_poly < res_exp => {
            (DecayKind::Polynomial { power, shift }, res_poly)
        }
        _ => (DecayKind::Exponential { rate }, res_exp),
    }
}

/// Fixed-step fourth-order integration backward from t = 0 to t = -T with
/// B(0) = s0, plus a limit estimate and a decay fit on the final third of
/// the grid.
pub fn integrate(s0: &NahmState, t_total: f64, step: f64) -> Result<Trajectory> {
    if step <= 0.0 || t_total < 10.0 * step {
        return Err(HyperLieError::InvalidArgument(format!(
            "need step > 0 and T >= 10*step, got T = {t_total}, step = {step}"
        )));
    }
    let mut n = (t_total / step).round() as usize;
    if n % 2 == 1 {
        n += 1;
    }
    let limit_norm = 1e6 * s0.norm().max(1.0);
    let mut t = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut s = *s0;
    t.push(0.0);
    states.push(s);
    for k in 1..=n {
        s = rk4_step(&s, -step, nahm_rhs);
        if !s.norm().is_finite() || s.norm() > limit_norm {
            return Err(HyperLieError::BlowUp {
                norm: s.norm(),
                limit: limit_norm,
            });
        }
        t.push(-(k as f64) * step);
        states.push(s);
    }
    // limit and decay from the final third, measured against the endpoint
    let tail_end = *states.last().unwrap();
    let lo = 2 * n / 3;
    let hi = (9 * n / 10).max(lo + 2); // keep clear of the endpoint itself
    let devs: Vec<f64> = (lo..hi).map(|k| (states[k] - tail_end).norm()).collect();
    let ts: Vec<f64> = (lo..hi).map(|k| t[k]).collect();
    let scale = s0.norm().max(1.0);
    let (decay, decay_residual) = if devs.iter().all(|&d| d < 1e-12 * scale) {
        (DecayKind::Settled, 0.0)
    } else {
        let (kind, res) = fit_decay(&ts, &devs);
        if res > 1.0 {
            return Err(HyperLieError::NoDecayFit(res));
        }
        (kind, res)
    };
    Ok(Trajectory {
        t,
        states,
        step,
        limit: tail_end,
        decay,
        decay_residual,
    })
}

/// Symmetric closed-form solutions B_i(t) = f_i(t) * O e_i.
#[derive(Debug, Clone, Copy)]
pub enum ExactKind {
    /// f1 = f3 = c csch(c(t - t0)), f2 = c coth(c(t - t0)); conserved
    /// f2^2 - f1^2 = c^2; limit (0, -c e2, 0).
    Regular { c: f64, t0: f64 },
    /// f_i = 1/(t - t0); limit 0.
    Nilpotent { t0: f64 },
}

#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub kind: ExactKind,
    pub frame: Matrix3<f64>,
}

pub fn exact_solution(kind: ExactKind, frame: Matrix3<f64>) -> Result<ExactSolution> {
    let t0 = match kind {
        ExactKind::Regular { c, t0 } => {
            if c <= 0.0 {
                return Err(HyperLieError::InvalidArgument(
                    "regular solution needs c > 0".into(),
                ));
            }
            t0
        }
        ExactKind::Nilpotent { t0 } => t0,
    };
    if t0 <= 0.0 {
        return Err(HyperLieError::PoleInDomain(t0));
    }
    let dev = (frame.transpose() * frame - Matrix3::identity()).norm();
    if dev > 1e-10 {
        return Err(HyperLieError::NotOrthogonal(dev));
    }
    Ok(ExactSolution { kind, frame })
}

impl ExactSolution {
    fn factors(&self, t: f64) -> [f64; 3] {
        match self.kind {
            ExactKind::Regular { c, t0 } => {
                let u = c * (t - t0);
                let csch = 1.0 / u.sinh();
                [c * csch, c * u.cosh() * csch, c * csch]
            }
            ExactKind::Nilpotent { t0 } => {
                let f = 1.0 / (t - t0);
                [f, f, f]
            }
        }
    }

    fn factor_derivs(&self, t: f64) -> [f64; 3] {
        match self.kind {
            ExactKind::Regular { c, t0 } => {
                let u = c * (t - t0);
                let csch = 1.0 / u.sinh();
                let coth = u.cosh() * csch;
                [
                    -c * c * csch * coth,
                    -c * c * csch * csch,
                    -c * c * csch * coth,
                ]
            }
            ExactKind::Nilpotent { t0 } => {
                let f = 1.0 / (t - t0);
                [-f * f, -f * f, -f * f]
            }
        }
    }

    pub fn at(&self, t: f64) -> NahmState {
        let f = self.factors(t);
        Triple::new(
            self.frame.column(0).into_owned() * f[0],
            self.frame.column(1).into_owned() * f[1],
            self.frame.column(2).into_owned() * f[2],
        )
    }

    /// Max norm of dB/dt - rhs(B) at `t`, with the derivative taken
    /// analytically; certifies the closed form as an oracle.
    pub fn ode_residual(&self, t: f64) -> f64 {
        let df = self.factor_derivs(t);
        let deriv = Triple::new(
            self.frame.column(0).into_owned() * df[0],
            self.frame.column(1).into_owned() * df[1],
            self.frame.column(2).into_owned() * df[2],
        );
        (deriv - nahm_rhs(&self.at(t))).norm()
    }
}

/// A tangent path (b0, b1, b2, b3) along a trajectory grid.
#[derive(Debug, Clone)]
pub struct ModuliTangent {
    pub b: Vec<[Vec3; 4]>,
}

/// The four moduli frame fields evaluated along the trajectory.
pub fn tangent_frame_nahm(tr: &Trajectory) -> [ModuliTangent; 4] {
    let n = tr.states.len();
    let mut out = [(); 4].map(|_| ModuliTangent {
        b: Vec::with_capacity(n),
    });
    for s in &tr.states {
        let c12 = bracket(&s.a1, &s.a2);
        let c23 = bracket(&s.a2, &s.a3);
        let c31 = bracket(&s.a3, &s.a1);
        out[0].b.push([Vec3::zeros(), c23, c31, c12]);
        out[1].b.push([-c23, Vec3::zeros(), -c12, c31]);
        out[2].b.push([-c31, c12, Vec3::zeros(), -c23]);
        out[3].b.push([-c12, -c31, c23, Vec3::zeros()]);
    }
    out
}

/// Max residual over interior grid nodes of the linearized system
///   db0/dt + [B1,b1] + [B2,b2] + [B3,b3] = 0
///   dbi/dt + [b0,Bi] + [Bj,bk] + [bj,Bk] = 0   (i,j,k cyclic)
/// with centered differences in time.
pub fn linearized_residual(tr: &Trajectory, mt: &ModuliTangent) -> f64 {
    let n = tr.states.len();
    let mut worst: f64 = 0.0;
    for k in 2..n - 2 {
        // five-point stencil on the descending grid (t[k-1] - t[k+1] = 2h)
        let db: Vec<Vec3> = (0..4)
            .map(|c| {
                (-mt.b[k - 2][c] + mt.b[k - 1][c] * 8.0 - mt.b[k + 1][c] * 8.0 + mt.b[k + 2][c])
                    / (12.0 * tr.step)
            })
            .collect();
        let s = &tr.states[k];
        let bb = [s.a1, s.a2, s.a3];
        let b = &mt.b[k];
        let r0 = db[0] + bracket(&bb[0], &b[1]) + bracket(&bb[1], &b[2]) + bracket(&bb[2], &b[3]);
        worst = worst.max(r0.norm());
        for i in 0..3 {
            let j = (i + 1) % 3;
            let l = (i + 2) % 3;
            let ri = db[i + 1]
                + bracket(&b[0], &bb[i])
                + bracket(&bb[j], &b[l + 1])
                + bracket(&b[j + 1], &bb[l]);
            worst = worst.max(ri.norm());
        }
    }
    worst
}

/// Value of the L^2 moduli pairing with its certified tail estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricValue {
    pub value: f64,
    pub tail: f64,
    pub fit_residual: f64,
}

/// Composite-Simpson quadrature of sum_j <b_j, c_j> over the grid, plus an
/// analytic tail from a decay fit of the integrand on the far third.
pub fn moduli_metric(tr: &Trajectory, b: &ModuliTangent, c: &ModuliTangent) -> Result<MetricValue> {
    let n = tr.states.len() - 1; // number of intervals, even by construction
    let h: Vec<f64> = (0..=n)
        .map(|k| {
            (0..4)
                .map(|j| inner(&b.b[k][j], &c.b[k][j]))
                .sum::<f64>()
        })
        .collect();
    // Simpson weights are symmetric, so summing in descending time order
    // still gives the integral over [-T, 0]
    let mut simpson = h[0] + h[n];
    for (k, hv) in h.iter().enumerate().take(n).skip(1) {
        simpson += if k % 2 == 1 { 4.0 * hv } else { 2.0 * hv };
    }
    simpson *= tr.step / 3.0;
    let t_end = tr.t[n].abs();
    let scale: f64 = h.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    // far-third window, away from the endpoint
    let lo = 2 * n / 3;
    let hi = (9 * n / 10).max(lo + 2);
    let tail_vals: Vec<f64> = h[lo..hi].iter().map(|v| v.abs()).collect();
    if scale <= f64::MIN_POSITIVE || tail_vals.iter().all(|&v| v < 1e-13 * scale.max(1.0)) {
        return Ok(MetricValue {
            value: simpson,
            tail: 0.0,
            fit_residual: 0.0,
        });
    }
    let ts: Vec<f64> = tr.t[lo..hi].to_vec();
    let (kind, fit_residual) = fit_decay(&ts, &tail_vals);
    let sign = h[n].signum();
    let h_end = h[n].abs();
    let tail = match kind {
        DecayKind::Exponential { rate } => {
            if rate <= 1e-6 {
                return Err(HyperLieError::TailUnbounded(format!(
                    "fitted exponential rate {rate:.3e} is not positive"
                )));
            }
            sign * h_end / rate
        }
        DecayKind::Polynomial { power, shift } => {
            if power <= 1.0 + 1e-6 {
                return Err(HyperLieError::TailUnbounded(format!(
                    "fitted power {power:.3} decays too slowly to integrate"
                )));
            }
            sign * h_end * (t_end + shift) / (power - 1.0)
        }
        DecayKind::Settled => 0.0,
    };
    Ok(MetricValue {
        value: simpson + tail,
        tail,
        fit_residual,
    })
}

/// The evaluation map onto leaf closures: (B1,B2,B3) -> (B2(0), B3(0), B1(0)).
pub fn h_map(tr: &Trajectory) -> Triple {
    let s = tr.states[0];
    Triple::new(s.a2, s.a3, s.a1)
}

/// Pushforward of a moduli tangent under the evaluation map: the cyclic
/// permutation (b2(0), b3(0), b1(0)) of the spatial components.
pub fn h_pushforward(mt: &ModuliTangent) -> Triple {
    let b = &mt.b[0];
    Triple::new(b[2], b[3], b[1])
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometryReport {
    /// g~(V~_i, V~_i) from the quadrature.
    pub diag: [f64; 4],
    /// Relative deviation of each diagonal value from -phi at the image.
    pub diag_errors: [f64; 4],
    /// Largest |g~(V~_i, V~_j)| / (-phi) over i != j.
    pub offdiag_max: f64,
    /// -phi at the image point.
    pub target: f64,
    /// Max relative mismatch between the pushed-forward moduli frame and the
    /// leaf frame at the image under the index map (0,1,2,3) -> (0,3,1,2).
    pub frame_table_error: f64,
    /// Whether the integer frame correspondence conjugates (I~, J~, K~) into
    /// (K, I, J) exactly.
    pub intertwine_ok: bool,
}

/// Index map of the frame correspondence: the pushforward sends moduli frame
/// vector i to leaf frame vector FRAME_TABLE[i].
pub const FRAME_TABLE: [usize; 4] = [0, 3, 1, 2];

/// Verify that the evaluation map is an isometry matching frames and complex
/// structures: compares the moduli Gram matrix with -phi * Id, the pushed
/// frame with the leaf frame, and checks the intertwining relations on the
/// integer matrices.
pub fn isometry_check(tr: &Trajectory) -> Result<IsometryReport> {
    let image = h_map(tr);
    let p = phi(&image);
    if p >= 0.0 {
        return Err(HyperLieError::WrongRegion { phi: p });
    }
    let target = -p;
    let frames = tangent_frame_nahm(tr);
    let mut diag = [0.0; 4];
    let mut diag_errors = [0.0; 4];
    let mut offdiag_max: f64 = 0.0;
    for i in 0..4 {
        for j in i..4 {
            let v = moduli_metric(tr, &frames[i], &frames[j])?.value;
            if i == j {
                diag[i] = v;
                diag_errors[i] = (v - target).abs() / target;
            } else {
                offdiag_max = offdiag_max.max(v.abs() / target);
            }
        }
    }
    // measured frame correspondence
    let leaf_frame = crate::leaf::frame(&image)?;
    let mut frame_table_error: f64 = 0.0;
    let mut measured = [[0.0f64; 4]; 4]; // measured[j][i]: V_j coefficient of image of V~_i
    for i in 0..4 {
        let pushed = h_pushforward(&frames[i]);
        let coeffs = leaf_frame.project(&pushed);
        for (j, c) in coeffs.iter().enumerate() {
            measured[j][i] = *c;
            let expect = if j == FRAME_TABLE[i] { 1.0 } else { 0.0 };
            frame_table_error = frame_table_error.max((c - expect).abs());
        }
    }
    if frame_table_error > 1e-6 {
        return Err(HyperLieError::FrameMismatch(frame_table_error));
    }
    // integer-level intertwining with the rounded correspondence matrix
    let mut tmat = crate::leaf::Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            tmat[(j, i)] = measured[j][i].round();
        }
    }
    let (mi, mj, mk) = crate::leaf::complex_structures();
    // the moduli complex structures act on the moduli frame by the same
    // integer matrices, so the intertwining reads T M = M' T with labels
    // rotated (I,J,K) -> (K,I,J)
    let intertwine_ok =
        tmat * mi == mk * tmat && tmat * mj == mi * tmat && tmat * mk == mj * tmat;
    Ok(IsometryReport {
        diag,
        diag_errors,
        offdiag_max,
        target,
        frame_table_error,
        intertwine_ok,
    })
}

/// Outcome of the dichotomy of the V_0 flow.
#[derive(Debug, Clone, Serialize)]
pub enum FlowBranch {
    /// phi reached zero at elapsed time d (located by bisection).
    HitZero { d: f64 },
    /// The flow converged to a critical configuration; how the speed decayed.
    Converged { decay: DecayKind },
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowReport {
    pub branch: FlowBranch,
    /// Largest drift of any Casimir along the flow.
    pub casimir_drift: f64,
}

/// Integrate the flow of direction * V_0 with a phi-zero event detector
/// (bisection on the crossing step) and a convergence detector (flow speed
/// below threshold).
pub fn v0_flow(t0: &Triple, direction: f64, max_time: f64, step: f64) -> Result<FlowReport> {
    if phi(t0).abs() < crate::su2::eps_phi(t0.scale()) {
        return Err(HyperLieError::DegenerateConfiguration {
            phi_abs: phi(t0).abs(),
            eps: crate::su2::eps_phi(t0.scale()),
        });
    }
    let dir = direction.signum();
    // the polynomial formula for V_0 extends across the boundary, so the
    // integrator never needs the frame's nondegeneracy guard
    let rhs = |x: &Triple| {
        Triple::new(
            bracket(&x.a2, &x.a3),
            bracket(&x.a3, &x.a1),
            bracket(&x.a1, &x.a2),
        ) * dir
    };
    let c0 = casimirs(t0).to_array();
    let mut drift: f64 = 0.0;
    let mut x = *t0;
    let mut time = 0.0;
    let mut speeds: Vec<f64> = Vec::new();
    let mut times: Vec<f64> = Vec::new();
    let speed0 = rhs(&x).norm();
    let n = (max_time / step).ceil() as usize;
    for _ in 0..n {
        let next = rk4_step(&x, step, rhs);
        let c = casimirs(&next).to_array();
        for (a, b) in c.iter().zip(&c0) {
            drift = drift.max((a - b).abs());
        }
        if phi(&next).signum() != phi(&x).signum() || phi(&next) == 0.0 {
            // bisect the crossing inside this step
            let mut lo = 0.0;
            let mut hi = step;
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let xm = rk4_step(&x, mid, rhs);
                if phi(&xm).signum() == phi(&x).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(FlowReport {
                branch: FlowBranch::HitZero {
                    d: time + 0.5 * (lo + hi),
                },
                casimir_drift: drift,
            });
        }
        x = next;
        time += step;
        let sp = rhs(&x).norm();
        times.push(time);
        speeds.push(sp);
        if sp < 1e-6 * speed0.max(1.0) {
            // converged; classify the decay of the speed on the second half
            // (negate the clock so the fit sees decay toward -infinity, the
            // convention shared with trajectory tails)
            let half = speeds.len() / 2;
            let neg: Vec<f64> = times[half..].iter().map(|t| -t).collect();
            let (decay, _) = fit_decay(&neg, &speeds[half..]);
            return Ok(FlowReport {
                branch: FlowBranch::Converged { decay },
                casimir_drift: drift,
            });
        }
    }
    Err(HyperLieError::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leaf::{leaf_point, LeafChart, LeafParams};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize) -> Vec3 {
        let mut v = Vec3::zeros();
        v[i] = 1.0;
        v
    }

    fn id3() -> Matrix3<f64> {
        Matrix3::identity()
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(
            nahm_rhs(&Triple::new(Vec3::zeros(), e(0), Vec3::zeros())),
            Triple::new(Vec3::zeros(), Vec3::zeros(), Vec3::zeros())
        );
        assert_eq!(
            nahm_rhs(&Triple::new(e(0), e(1), e(2))),
            Triple::new(-e(0), -e(1), -e(2))
        );
    }

    #[test]
    fn rhs_is_minus_v0_of_permuted_triple() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let s = crate::verify::random_triple(&mut rng, 0.05);
            let perm = Triple::new(s.a2, s.a3, s.a1);
            let v0 = crate::poisson::distribution_frame(&perm).unwrap()[0];
            // components of V0 at (B2,B3,B1): ([B3,B1],[B1,B2],[B2,B3]);
            // un-permute to compare with the rhs at (B1,B2,B3)
            let unperm = Triple::new(v0.a3, v0.a1, v0.a2);
            assert!((nahm_rhs(&s) + unperm).norm() < 1e-13);
        }
    }

    #[test]
    fn exact_solutions_pass_residual_substitution() {
        let reg = exact_solution(ExactKind::Regular { c: 1.0, t0: 1.0 }, id3()).unwrap();
        let nil = exact_solution(ExactKind::Nilpotent { t0 : 1.0 }, id3()).unwrap();
        for k in 0..200 {
            let t = -20.0 * (k as f64) / 199.0;
            assert!(reg.ode_residual(t) < 1e-12, "regular residual at {t}");
            assert!(nil.ode_residual(t) < 1e-12, "nilpotent residual at {t}");
        }
        // rotated frame still solves the system
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let o = crate::verify::random_so3(&mut rng);
        let rot = exact_solution(ExactKind::Regular { c: 0.7, t0: 2.0 }, o).unwrap();
        for k in 0..50 {
            let t = -10.0 * (k as f64) / 49.0;
            assert!(rot.ode_residual(t) < 1e-12);
        }
    }

    #[test]
    fn exact_solution_values() {
        let nil = exact_solution(ExactKind::Nilpotent { t0: 1.0 }, id3()).unwrap();
        assert_abs_diff_eq!(nil.at(0.0).a1, -e(0), epsilon = 1e-15);
        assert_abs_diff_eq!(nil.at(-9.0).a1, -0.1 * e(0), epsilon = 1e-15);
        let reg = exact_solution(ExactKind::Regular { c: 1.0, t0: 1.0 }, id3()).unwrap();
        assert_abs_diff_eq!(reg.at(0.0).a2[1], (-1f64).tanh().recip(), epsilon = 1e-12);
        // conserved relation f2^2 - f1^2 = c^2
        for t in [-0.3, -2.0, -7.5] {
            let s = reg.at(t);
            assert_abs_diff_eq!(
                s.a2.norm_squared() - s.a1.norm_squared(),
                1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn exact_solution_rejects_bad_input() {
        assert!(matches!(
            exact_solution(ExactKind::Nilpotent { t0: 0.0 }, id3()),
            Err(HyperLieError::PoleInDomain(_))
        ));
        assert!(matches!(
            exact_solution(ExactKind::Regular { c: 1.0, t0: -2.0 }, id3()),
            Err(HyperLieError::PoleInDomain(_))
        ));
    }

    #[test]
    fn integrate_matches_oracle() {
        let reg = exact_solution(ExactKind::Regular { c: 1.0, t0: 1.0 }, id3()).unwrap();
        let tr = integrate(&reg.at(0.0), 20.0, 1e-3).unwrap();
        let mut sup: f64 = 0.0;
        for (t, s) in tr.t.iter().zip(&tr.states) {
            sup = sup.max((*s - reg.at(*t)).norm());
        }
        assert!(sup <= 1e-8, "sup error {sup}");
        // the boundary limit is the abelian pair (0, -c e2, 0)
        assert!((tr.limit - Triple::new(Vec3::zeros(), -e(1), Vec3::zeros())).norm() < 1e-6);
        match tr.decay {
            DecayKind::Exponential { rate } => {
                // the slow components approach the limit like exp(c t)
                assert!((rate - 1.0).abs() < 0.1, "rate {rate}");
            }
            other => panic!("expected exponential decay, got {other:?}"),
        }
    }

    #[test]
    fn integrate_fourth_order() {
        let reg = exact_solution(ExactKind::Regular { c: 1.0, t0: 1.0 }, id3()).unwrap();
        let mut errs = Vec::new();
        for step in [0.02, 0.01, 0.005] {
            let tr = integrate(&reg.at(0.0), 5.0, step).unwrap();
            let mut sup: f64 = 0.0;
            for (t, s) in tr.t.iter().zip(&tr.states) {
                sup = sup.max((*s - reg.at(*t)).norm());
            }
            errs.push(sup);
        }
        let r1 = errs[0] / errs[1];
        let r2 = errs[1] / errs[2];
        assert!((10.0..24.0).contains(&r1), "halving ratio {r1}");
        assert!((10.0..24.0).contains(&r2), "halving ratio {r2}");
    }

    #[test]
    fn casimir_conservation_of_permuted_triple() {
        let reg = exact_solution(ExactKind::Regular { c: 1.0, t0: 1.0 }, id3()).unwrap();
        let tr = integrate(&reg.at(0.0), 20.0, 1e-3).unwrap();
        let c0 = casimirs(&Triple::new(
            tr.states[0].a2,
            tr.states[0].a3,
            tr.states[0].a1,
        ))
        .to_array();
        let mut drift: f64 = 0.0;
        for s in &tr.states {
            let c = casimirs(&Triple::new(s.a2, s.a3, s.a1)).to_array();
            for (a, b) in c.iter().zip(&c0) {
                drift = drift.max((a - b).abs());
            }
        }
        assert!(drift <= 1e-10, "drift {drift}");
    }

    #[test]
    fn fixed_point_stays_fixed() {
        let s0 = Triple::new(Vec3::zeros(), e(0), Vec3::zeros());
        let tr = integrate(&s0, 5.0, 0.01).unwrap();
        for s in &tr.states {
            assert!((*s - s0).norm() < 1e-14);
        }
        assert_eq!(tr.decay, DecayKind::Settled);
    }

    #[test]
    fn sigma_equivariance_of_flow() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let o = crate::verify::random_so3(&mut rng);
        let reg = exact_solution(ExactKind::Regular { c: 0.8, t0: 1.5 }, id3()).unwrap();
        let s0 = reg.at(0.0);
        let tr = integrate(&s0, 8.0, 1e-3).unwrap();
        let rs0 = crate::leaf::sigma_map(&o, &s0).unwrap();
        let rtr = integrate(&rs0, 8.0, 1e-3).unwrap();
        for (a, b) in tr.states.iter().zip(&rtr.states).step_by(500) {
            let ra = crate::leaf::sigma_map(&o, a).unwrap();
            assert!((ra - *b).norm() < 1e-9);
        }
    }

    #[test]
    fn moduli_frame_satisfies_linearized_system() {
        for sol in [
            exact_solution(ExactKind::Nilpotent { t0: 1.0 }, id3()).unwrap(),
            exact_solution(ExactKind::Regular { c: 1.0, t0: 1.0 }, id3()).unwrap(),
        ] {
            let tr = integrate(&sol.at(0.0), 10.0, 1e-3).unwrap();
            let frames = tangent_frame_nahm(&tr);
            for f in &frames {
                let r = linearized_residual(&tr, f);
                assert!(r < 1e-6, "linearized residual {r}");
            }
        }
    }

    #[test]
    fn nilpotent_moduli_metric_analytic_value() {
        let nil = exact_solution(ExactKind::Nilpotent { t0: 1.0 }, id3()).unwrap();
        let tr = integrate(&nil.at(0.0), 40.0, 0.005).unwrap();
        let frames = tangent_frame_nahm(&tr);
        let g00 = moduli_metric(&tr, &frames[0], &frames[0]).unwrap();
        assert_abs_diff_eq!(g00.value, 1.0, epsilon = 1e-6);
        let g01 = moduli_metric(&tr, &frames[0], &frames[1]).unwrap();
        assert!(g01.value.abs() <= 1e-6);
        // bilinearity and symmetry
        let g10 = moduli_metric(&tr, &frames[1], &frames[0]).unwrap();
        assert_abs_diff_eq!(g01.value, g10.value, epsilon = 1e-12);
    }

    #[test]
    fn h_map_images() {
        let nil = exact_solution(ExactKind::Nilpotent { t0: 1.0 }, id3()).unwrap();
        let tr = integrate(&nil.at(0.0), 10.0, 1e-3).unwrap();
        let img = h_map(&tr);
        assert!((img - Triple::new(-e(1), -e(2), -e(0))).norm() < 1e-12);
        assert_abs_diff_eq!(phi(&img), -1.0, epsilon = 1e-12);

        let reg = exact_solution(ExactKind::Regular { c: 1.0, t0: 1.0 }, id3()).unwrap();
        let tr2 = integrate(&reg.at(0.0), 10.0, 1e-3).unwrap();
        let img2 = h_map(&tr2);
        let c = casimirs(&img2);
        assert_abs_diff_eq!(c.f4, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(c.f5, 0.0, epsilon = 1e-10);
        // orbit quadric value f4 + 2i f1 through the complex projection
        let z2_re: f64 = (0..3)
            .map(|k| img2.a1[k] * img2.a1[k] - img2.a2[k] * img2.a2[k])
            .sum();
        let z2_im: f64 = (0..3).map(|k| 2.0 * img2.a1[k] * img2.a2[k]).sum();
        assert_abs_diff_eq!(z2_re, c.f4, epsilon = 1e-12);
        assert_abs_diff_eq!(z2_im, 2.0 * c.f1, epsilon = 1e-12);
    }

    #[test]
    fn isometry_nilpotent() {
        let nil = exact_solution(ExactKind::Nilpotent { t0: 1.0 }, id3()).unwrap();
        let tr = integrate(&nil.at(0.0), 40.0, 0.005).unwrap();
        let rep = isometry_check(&tr).unwrap();
        assert_abs_diff_eq!(rep.target, 1.0, epsilon = 1e-12);
        for d in rep.diag_errors {
            assert!(d <= 1e-6, "diag error {d}");
        }
        assert!(rep.offdiag_max <= 1e-6);
        assert!(rep.frame_table_error <= 1e-8, "table {}", rep.frame_table_error);
        assert!(rep.intertwine_ok);
    }

    #[test]
    fn isometry_regular() {
        for t0 in [1.0, 2.0] {
            let reg = exact_solution(ExactKind::Regular { c: 1.0, t0 }, id3()).unwrap();
            let tr = integrate(&reg.at(0.0), 40.0, 0.005).unwrap();
            let rep = isometry_check(&tr).unwrap();
            for d in rep.diag_errors {
                assert!(d <= 1e-4, "diag error {d} at t0 {t0}");
            }
            assert!(rep.offdiag_max <= 1e-6, "offdiag {}", rep.offdiag_max);
            assert!(rep.frame_table_error <= 1e-6);
            assert!(rep.intertwine_ok);
        }
    }

    #[test]
    fn flow_dichotomy() {
        // type 2: finite-time boundary hit
        let t2 = leaf_point(
            &LeafParams { q: 0.0, r: 1.0 },
            &LeafChart { s: 1.0, o: id3() },
        )
        .unwrap();
        let rep = v0_flow(&t2, 1.0, 10.0, 1e-3).unwrap();
        match rep.branch {
            FlowBranch::HitZero { d } => assert!(d > 0.0 && d < 10.0),
            other => panic!("expected boundary hit, got {other:?}"),
        }
        assert!(rep.casimir_drift <= 1e-10, "drift {}", rep.casimir_drift);

        // type 1: exponential convergence
        let t1 = leaf_point(
            &LeafParams { q: 1.0, r: 0.0 },
            &LeafChart { s: 1.0, o: id3() },
        )
        .unwrap();
        let rep1 = v0_flow(&t1, 1.0, 100.0, 1e-3).unwrap();
        match rep1.branch {
            FlowBranch::Converged {
                decay: DecayKind::Exponential { rate },
            } => assert!(rate > 0.1, "rate {rate}"),
            other => panic!("expected exponential convergence, got {other:?}"),
        }
        assert!(rep1.casimir_drift <= 1e-10);

        // type 0: polynomial convergence
        let t0 = leaf_point(
            &LeafParams { q: 0.0, r: 0.0 },
            &LeafChart { s: 1.0, o: id3() },
        )
        .unwrap();
        let rep0 = v0_flow(&t0, 1.0, 2000.0, 1e-2).unwrap();
        match rep0.branch {
            FlowBranch::Converged {
                decay: DecayKind::Polynomial { power, .. },
            } => assert!(power > 0.5, "power {power}"),
            other => panic!("expected polynomial convergence, got {other:?}"),
        }
        assert!(rep0.casimir_drift <= 1e-10);
    }
}
