//! Cross-checks the three independent evaluations of the dynamics state —
//! the iterative loop, the closed form, and the binomial convolution — on a
//! batch of random games, and prints the worst pairwise disagreement.
//!
//! ```text
//! cargo run --example cross_check
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use saddlekit::games;
use saddlekit::ogda::{closed_form_state, qt_convolution_series, simulate, JointState};
use saddlekit::system::{build_system, stability_bound};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let mut worst: (f64, String) = (0.0, String::new());
    let t_max = 50usize;
    for g in 0..50 {
        let n = 1 + rand::Rng::random_range(&mut rng, 0..6usize);
        let m = 1 + rand::Rng::random_range(&mut rng, 0..6usize);
        let a = games::random_game(&mut rng, n, m);
        let bound = stability_bound(&a).unwrap();
        let mut z0 = JointState::new(
            games::random_vector(&mut rng, n),
            games::random_vector(&mut rng, m),
            0,
        );
        let scale = z0.stacked().norm();
        z0.x /= scale;
        z0.y /= scale;
        let zm1 = JointState::new(
            games::random_vector(&mut rng, n),
            games::random_vector(&mut rng, m),
            -1,
        );
        for frac in [0.1, 0.5, 0.9, -0.1, -0.5, -0.9] {
            let eta = frac * bound;
            let sys = build_system(&a, eta).unwrap();
            let traj = simulate(&a, eta, &z0, &zm1, t_max).unwrap();
            let qs = qt_convolution_series(&sys, t_max).unwrap();
            let memory_term = &sys.c_block * zm1.stacked();
            for t in 0..=t_max {
                let iterative = traj.state_at(t as i64).unwrap().stacked();
                let closed = closed_form_state(&sys, &z0, &zm1, t).unwrap().stacked();
                let convolution = if t == 0 {
                    &qs[0] * z0.stacked()
                } else {
                    &qs[t] * z0.stacked() + &qs[t - 1] * &memory_term
                };
                for (name, x, y) in [
                    ("iterative-closed", &iterative, &closed),
                    ("iterative-convolution", &iterative, &convolution),
                    ("closed-convolution", &closed, &convolution),
                ] {
                    let denom = x.norm().max(y.norm()).max(1.0);
                    let err = (x - y).norm() / denom;
                    if err > worst.0 {
                        worst = (err, format!("game {g} ({n}x{m}) eta-frac {frac} t {t} {name}"));
                    }
                }
            }
        }
    }
    println!("worst relative disagreement: {:.3e} at {}", worst.0, worst.1);
}
