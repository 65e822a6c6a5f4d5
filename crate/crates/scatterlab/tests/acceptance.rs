//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the lines always print; exits nonzero if any check fails.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scatterlab::emit::{emit_curves, CurveKind};
use scatterlab_core::channel::{channel_from_mueller, scatter_singlet, Arm, Scenario};
use scatterlab_core::mueller::{
    cloude_decompose, compose, depolarizer, diattenuator, retarder, MuellerMatrix,
};
use scatterlab_core::numerics::{CMatrix, CMatrix2, CMatrix4, C64};
use scatterlab_core::qstate::{
    fidelity, gw_fit, linear_entropy, mems, singlet, tangle, werner, DensityMatrix4, PlanePoint,
};
use scatterlab_core::tomography::{
    clip_to_physical, mle_reconstruct, monte_carlo_errors, simulate_counts, standard_projectors,
    Noise,
};

struct Outcome {
    pass: bool,
    detail: String,
}

/// Name, runtime limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ---- independent oracles ----

/// Werner frontier `T(S_L)` from `p = √(1 − S_L)`.
fn werner_frontier(s: f64) -> f64 {
    let p = (1.0 - s).max(0.0).sqrt();
    let c = ((3.0 * p - 1.0) / 2.0).max(0.0);
    c * c
}

/// MEMS frontier in closed form: `S_L = 8C(1−C)/3` for C ≥ 2/3 and
/// `S_L = 8/9 − 2C²/3` below, with `T = C²`.
fn mems_frontier(s: f64) -> f64 {
    if s <= 16.0 / 27.0 {
        let c = (1.0 + (1.0 - 1.5 * s).max(0.0).sqrt()) / 2.0;
        c * c
    } else if s <= 8.0 / 9.0 {
        4.0 / 3.0 - 1.5 * s
    } else {
        0.0
    }
}

type M2 = [[C64; 2]; 2];

fn paulis() -> [M2; 4] {
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    [
        [[l, o], [o, l]],
        [[l, o], [o, -l]],
        [[o, l], [l, o]],
        [[o, i], [-i, o]],
    ]
}

/// The polarization map a Mueller matrix defines: expand `X` in Stokes
/// components, multiply by `M`, reassemble. Valid for non-Hermitian `X` by linearity.
fn stokes_map(m: &MuellerMatrix, x: &M2) -> M2 {
    let sig = paulis();
    let s: Vec<C64> = sig
        .iter()
        .map(|p| {
            (0..2)
                .flat_map(|a| (0..2).map(move |b| (a, b)))
                .map(|(a, b)| p[a][b] * x[b][a])
                .sum()
        })
        .collect();
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for (row, p) in m.0.iter().zip(&sig) {
        let t: C64 = s.iter().zip(row).map(|(sj, mij)| sj * mij).sum();
        for a in 0..2 {
            for b in 0..2 {
                out[a][b] += p[a][b] * t * 0.5;
            }
        }
    }
    out
}

/// Local map on one photon of a two-photon operator; index `2a + b` with
/// `a` the first photon.
fn local_map(m: &MuellerMatrix, arm: Arm, rho: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for u in 0..2 {
        for v in 0..2 {
            let idx = |k: usize, fixed: usize| match arm {
                Arm::A => 2 * k + fixed,
                Arm::B => 2 * fixed + k,
            };
            let block: M2 =
                std::array::from_fn(|k| std::array::from_fn(|l| rho[idx(k, u)][idx(l, v)]));
            let y = stokes_map(m, &block);
            for k in 0..2 {
                for l in 0..2 {
                    out[idx(k, u)][idx(l, v)] = y[k][l];
                }
            }
        }
    }
    out
}

/// 16×16 matrix of the local map on row-major vectorized operators.
fn superoperator(m: &MuellerMatrix, arm: Arm) -> Vec<Vec<C64>> {
    let mut s = vec![vec![C64::new(0.0, 0.0); 16]; 16];
    for col in 0..16 {
        let mut e = [[C64::new(0.0, 0.0); 4]; 4];
        e[col / 4][col % 4] = C64::new(1.0, 0.0);
        let img = local_map(m, arm, &e);
        for row in 0..16 {
            s[row][col] = img[row / 4][row % 4];
        }
    }
    s
}

fn superoperator_apply(m: &MuellerMatrix, arm: Arm, rho: &DensityMatrix4) -> CMatrix4 {
    let s = superoperator(m, arm);
    let v: Vec<C64> = rho.matrix().0.iter().flatten().copied().collect();
    let w: Vec<C64> = s
        .iter()
        .map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum())
        .collect();
    let tr: f64 = (0..4).map(|k| w[5 * k].re).sum();
    CMatrix::from_fn(|i, j| w[4 * i + j] / tr)
}

// ---- random inputs ----

fn unit_vector(rng: &mut impl Rng) -> [f64; 3] {
    let phi = TAU * rng.random::<f64>();
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let r = (1.0 - z * z).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

fn random_element(rng: &mut impl Rng) -> MuellerMatrix {
    match rng.random_range(0..3) {
        0 => depolarizer(rng.random()).unwrap(),
        1 => retarder(TAU * rng.random::<f64>(), unit_vector(rng)).unwrap(),
        _ => {
            let d: f64 = rng.random();
            diattenuator(
                unit_vector(rng).map(|x| x * d),
                rng.random_range(0.05..=1.0),
            )
            .unwrap()
        }
    }
}

fn random_mueller(rng: &mut impl Rng) -> MuellerMatrix {
    let n = rng.random_range(1..=4);
    let ms: Vec<MuellerMatrix> = (0..n).map(|_| random_element(rng)).collect();
    compose(&ms).unwrap()
}

/// `A A† / Tr` for `A` with uniform entries and random rank 1 to 4.
fn random_state(rng: &mut impl Rng) -> DensityMatrix4 {
    let rank = rng.random_range(1..=4);
    let a: CMatrix4 = CMatrix::from_fn(|_, j| {
        if j < rank {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    DensityMatrix4::from_unnormalized(a * a.adjoint()).unwrap()
}

fn birefringent(rng: &mut impl Rng) -> Scenario {
    Scenario::Birefringent {
        depolarization: rng.random(),
        retardance: TAU * rng.random::<f64>(),
        axis: unit_vector(rng),
    }
}

fn dichroic(rng: &mut impl Rng) -> (Scenario, f64) {
    let d: f64 = rng.random();
    let s = Scenario::Dichroic {
        depolarization: rng.random(),
        diattenuation: unit_vector(rng).map(|x| x * d),
        transmittance: 1.0 - rng.random::<f64>(),
    };
    (s, d)
}

// ---- criteria ----

fn werner_curve_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..=100 {
        let p = k as f64 / 100.0;
        let w = werner(p).unwrap();
        let c = ((3.0 * p - 1.0) / 2.0).max(0.0);
        worst = worst.max((linear_entropy(&w) - (1.0 - p * p)).abs());
        worst = worst.max((tangle(&w) - c * c).abs());
    }
    outcome(worst <= 1e-9, format!("101 values, max error {worst:.1e}"))
}

fn isotropic_gives_werner() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let d: f64 = rng.random();
        let out = scatter_singlet(&Scenario::Isotropic { depolarization: d }).unwrap();
        worst = worst.max(out.matrix().max_diff(werner(1.0 - d).unwrap().matrix()));
    }
    outcome(
        worst <= 1e-9,
        format!("1000 draws, max entry error {worst:.1e}"),
    )
}

fn birefringent_gives_generalized_werner() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut dist, mut min_f): (f64, f64) = (0.0, 1.0);
    for _ in 0..200 {
        let out = scatter_singlet(&birefringent(&mut rng)).unwrap();
        dist = dist.max((tangle(&out) - werner_frontier(linear_entropy(&out))).abs());
        min_f = min_f.min(gw_fit(&out).fidelity);
    }
    outcome(
        dist < 1e-9 && min_f >= 1.0 - 1e-6,
        format!(
            "200 draws, max distance to Werner curve {dist:.1e}, min fit fidelity 1 - {:.1e}",
            1.0 - min_f
        ),
    )
}

fn dichroic_is_sub_werner() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut excess, mut below) = (f64::NEG_INFINITY, 0usize);
    for _ in 0..1000 {
        let out = scatter_singlet(&dichroic(&mut rng).0).unwrap();
        let gap = tangle(&out) - werner_frontier(linear_entropy(&out));
        excess = excess.max(gap);
        if gap < -1e-3 {
            below += 1;
        }
    }
    outcome(
        excess <= 1e-9 && below >= 100,
        format!(
            "1000 draws, max T above Werner curve {excess:.1e}, {below} strictly below by > 1e-3"
        ),
    )
}

fn kraus_and_superoperator_agree() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut kraus_err, mut apply_err): (f64, f64) = (0.0, 0.0);
    for k in 0..200 {
        let m = random_mueller(&mut rng);
        kraus_err = kraus_err.max(
            cloude_decompose(&m, 1e-10)
                .unwrap()
                .to_mueller()
                .max_diff(&m),
        );
        let arm = if k % 2 == 0 { Arm::A } else { Arm::B };
        let rho = random_state(&mut rng);
        let fast = channel_from_mueller(&m, arm).unwrap().apply(&rho).unwrap();
        apply_err = apply_err.max(fast.matrix().max_diff(&superoperator_apply(&m, arm, &rho)));
    }
    outcome(
        kraus_err <= 1e-9 && apply_err <= 1e-9,
        format!("200 matrices, Kraus reconstruction {kraus_err:.1e}, apply vs superoperator {apply_err:.1e}"),
    )
}

fn trace_preservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for k in 0..1000 {
        let s = if k % 2 == 0 {
            Scenario::Isotropic {
                depolarization: rng.random(),
            }
        } else {
            birefringent(&mut rng)
        };
        let ch = s.channel().unwrap();
        worst = worst.max(ch.kraus().completeness().max_diff(&CMatrix2::identity()));
        // trace preserving iff the first Mueller row is (1, 0, 0, 0)
        let row = s.mueller().unwrap().0[0];
        ok &= ch.is_trace_preserving()
            && (row[0] - 1.0).abs() < 1e-12
            && row[1..].iter().all(|x| x.abs() < 1e-12);
    }
    let (mut flagged, mut checked, mut min_dev) = (0usize, 0usize, f64::INFINITY);
    for _ in 0..1000 {
        let (s, d) = dichroic(&mut rng);
        if d <= 1e-3 {
            continue;
        }
        checked += 1;
        let ch = s.channel().unwrap();
        min_dev = min_dev.min(ch.kraus().completeness().max_diff(&CMatrix2::identity()));
        if !ch.is_trace_preserving() {
            flagged += 1;
        }
    }
    outcome(
        ok && worst <= 1e-9 && flagged == checked && min_dev > 1e-9,
        format!(
            "types I/II: 1000 channels, completeness error {worst:.1e}; type III: {flagged}/{checked} flagged, smallest violation {min_dev:.1e}"
        ),
    )
}

fn tomography_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = standard_projectors();
    let mut min_f: f64 = 1.0;
    for k in 0..50 {
        let rho = random_state(&mut rng);
        let counts = simulate_counts(&rho, 1e4, Noise::None, k, &p).unwrap();
        let r = mle_reconstruct(&counts, &p).unwrap();
        min_f = min_f.min(fidelity(&r.rho, &rho));
    }
    outcome(
        min_f >= 0.9999,
        format!("50 states, min fidelity {min_f:.10}"),
    )
}

fn monte_carlo_protocol() -> Outcome {
    let p = standard_projectors();
    let counts = simulate_counts(&singlet(), 1e4, Noise::Poisson, 8, &p).unwrap();
    let a = monte_carlo_errors(&counts, &p, 1000, 88).unwrap();
    let b = monte_carlo_errors(&counts, &p, 1000, 88).unwrap();
    let same = a == b
        && scatterlab::formats::error_report_to_string(&a)
            == scatterlab::formats::error_report_to_string(&b);
    let sigmas = [a.sigma_tangle, a.sigma_linear_entropy];
    let positive = sigmas.iter().all(|s| s.is_finite() && *s > 0.0);

    // clipped endpoints of this report and of random points in the region
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pts = vec![a.point()];
    for _ in 0..2000 {
        let s: f64 = rng.random::<f64>() * 8.0 / 9.0;
        let t = rng.random::<f64>() * mems_frontier(s);
        pts.push(
            PlanePoint::new(s, t).with_errors(rng.random::<f64>() * 0.3, rng.random::<f64>() * 0.3),
        );
    }
    let mut excess = f64::NEG_INFINITY;
    for pt in &pts {
        let c = clip_to_physical(pt);
        let (t_bar, s_bar) = (c.tangle_err.unwrap(), c.linear_entropy_err.unwrap());
        excess = excess.max(c.tangle + t_bar.plus - mems_frontier(c.linear_entropy));
        excess = excess.max(c.tangle - mems_frontier(c.linear_entropy + s_bar.plus));
        excess = excess.max(c.tangle - t_bar.minus - mems_frontier(c.linear_entropy - s_bar.minus));
    }
    outcome(
        same && positive && excess <= 1e-9,
        format!(
            "sigma_T {:.3e}, sigma_SL {:.3e}, {} dropped, reproducible {same}, max endpoint above MEMS {excess:.1e}",
            a.sigma_tangle, a.sigma_linear_entropy, a.dropped
        ),
    )
}

fn mems_boundary() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..=100 {
        let c = k as f64 / 100.0;
        worst = worst.max((tangle(&mems(c).unwrap()) - c * c).abs());
    }
    let dir = std::env::temp_dir().join(format!("scatterlab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("mems.csv");
    emit_curves(CurveKind::Mems, 101, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_dir_all(&dir).ok();
    let pts: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[1], f[2])
        })
        .collect();
    let near = |s: f64, t: f64| {
        pts.iter()
            .map(|&(a, b)| (a - s).abs().max((b - t).abs()))
            .fold(f64::INFINITY, f64::min)
    };
    let corner_sep = near(8.0 / 9.0, 0.0);
    let corner_pure = near(0.0, 1.0);
    let off_curve = pts
        .iter()
        .map(|&(s, t)| (t - mems_frontier(s)).abs())
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-9 && corner_sep <= 1e-9 && corner_pure <= 1e-9 && off_curve <= 1e-9,
        format!(
            "tangle error {worst:.1e}; emitted curve misses (8/9, 0) by {corner_sep:.1e}, (0, 1) by {corner_pure:.1e}, closed form by {off_curve:.1e}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("Werner-curve identity", 1, werner_curve_identity),
        (
            "type I scattering gives Werner states",
            5,
            isotropic_gives_werner,
        ),
        (
            "type II scattering gives generalized Werner states",
            120,
            birefringent_gives_generalized_werner,
        ),
        (
            "type III scattering gives sub-Werner states",
            10,
            dichroic_is_sub_werner,
        ),
        (
            "Kraus expansion and superoperator agree",
            10,
            kraus_and_superoperator_agree,
        ),
        ("trace preservation", 10, trace_preservation),
        ("tomography round trip", 60, tomography_round_trip),
        ("Monte Carlo error bars", 300, monte_carlo_protocol),
        ("MEMS boundary", 1, mems_boundary),
    ];
    let mut failed = 0;
    for (k, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(*limit);
        let pass = o.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "criterion {}: {} {name}: {} [{:.2} s, limit {limit} s]",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
