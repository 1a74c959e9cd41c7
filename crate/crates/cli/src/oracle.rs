//! Brute-force check of the best unitary spin flip.
//!
//! Every single-qubit unitary is, up to phase, a rotation `exp(-i t n.sigma/2)`.
//! The grid walks axis polar angle, axis azimuth and rotation angle in equal
//! degree steps and scores each rotation by a six-point sphere rule (the
//! octahedron), which is exact for the quadratic integrand.

use dirq_core::flip::unitary_flip_fidelity;
use dirq_core::hilbert::{bloch_to_spinor, pauli_dot, Mat2};
use dirq_core::{Direction, C64};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridResult {
    pub best: f64,
    pub points: u64,
    /// Largest gap between the quadrature and the closed form.
    pub max_closed_form_gap: f64,
}

fn octahedron() -> Vec<([C64; 2], [C64; 2])> {
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    axes.iter()
        .flat_map(|a| [*a, a.map(|x| -x)])
        .map(|p| {
            let n = Direction::from_vector(p).expect("unit axis");
            let (s, t) = (bloch_to_spinor(&n, 0.0), bloch_to_spinor(&-n, 0.0));
            ([s.a0(), s.a1()], [t.a0(), t.a1()])
        })
        .collect()
}

fn quadrature(u: &Mat2, rule: &[([C64; 2], [C64; 2])]) -> f64 {
    let total: f64 = rule
        .iter()
        .map(|(s, t)| {
            let out = u.mul_vec(s);
            (t[0].conj() * out[0] + t[1].conj() * out[1]).norm_sqr()
        })
        .sum();
    total / rule.len() as f64
}

fn rotation(n: [f64; 3], angle: f64) -> Mat2 {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    Mat2::identity().scale(C64::new(c, 0.0)) + pauli_dot(&n).scale(C64::new(0.0, -s))
}

/// Grid maximum at `step_deg` resolution.
pub fn unitary_flip_grid(step_deg: u32) -> GridResult {
    assert!(step_deg > 0 && 180 % step_deg == 0, "step must divide 180");
    let step = (step_deg as f64).to_radians();
    let polar_steps = 180 / step_deg;
    let rule = octahedron();
    let rows: Vec<GridResult> = (0..=polar_steps)
        .into_par_iter()
        .map(|ip| {
            let theta = ip as f64 * step;
            let azimuths = if ip == 0 || ip == polar_steps {
                1
            } else {
                2 * polar_steps
            };
            let mut row = GridResult {
                best: f64::NEG_INFINITY,
                points: 0,
                max_closed_form_gap: 0.0,
            };
            for ia in 0..azimuths {
                let phi = ia as f64 * step;
                let n = [
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                ];
                for it in 0..=2 * polar_steps {
                    let u = rotation(n, it as f64 * step);
                    let f = quadrature(&u, &rule);
                    row.best = row.best.max(f);
                    row.points += 1;
                    row.max_closed_form_gap = row
                        .max_closed_form_gap
                        .max((f - unitary_flip_fidelity(&u)).abs());
                }
            }
            row
        })
        .collect();
    rows.into_iter().fold(
        GridResult {
            best: f64::NEG_INFINITY,
            points: 0,
            max_closed_form_gap: 0.0,
        },
        |a, b| GridResult {
            best: a.best.max(b.best),
            points: a.points + b.points,
            max_closed_form_gap: a.max_closed_form_gap.max(b.max_closed_form_gap),
        },
    )
}
