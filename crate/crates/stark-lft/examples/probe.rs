use rand::Rng;
use rand::SeedableRng;
use stark_lft::constants::{energy_cm_to_au, field_vcm_to_au};
use stark_lft::eta_channels::{
    build_workspace, solve_eta_channel, solve_surface_eigenproblem, EtaChannelParams,
};
use stark_lft::oracles::{numerov_integrate, OdeProblem};

fn main() {
    let cm = energy_cm_to_au;
    let vcm = field_vcm_to_au;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..10 {
        let positive = rng.gen_bool(0.5);
        let energy = if positive { cm(135.8231) } else { cm(-135.8231) };
        let beta = if positive {
            rng.gen_range(-0.1..1.1)
        } else {
            rng.gen_range(0.05..0.95)
        };
        let ch = EtaChannelParams {
            beta,
            m: rng.gen_range(0..3),
            energy,
            field: vcm(rng.gen_range(300.0..3600.0)),
        };
        let pair = solve_eta_channel(&ch, None, None).unwrap();
        let ws = build_workspace(&ch, pair.eta1, pair.eta2, None).unwrap();
        let modes = solve_surface_eigenproblem(&ws).unwrap();
        let (y1, y2) = (pair.eta1.sqrt(), pair.eta2.sqrt());
        let m2 = (ch.m * ch.m) as f64;
        let q = |y: f64| {
            2.0 * ch.energy * y * y + 4.0 * (1.0 - ch.beta) + ch.field * y.powi(4)
                - ((m2 - 1.0) + 0.75) / (y * y)
        };
        let h = 1e-3;
        let n = ((y2 - y1) / h) as usize + 1;
        let y_end = y1 + h * (n - 1) as f64;
        for mode in 0..2 {
            let coef = &modes.coef[mode];
            let ev = |y: f64| ws.basis.eval_expansion(coef, y).0;
            let (va, vb) = (ev(y1), ev(y_end));
            let forward = va.abs() <= vb.abs();
            let prob = if forward {
                OdeProblem::from_potential(y1, h, n, q, [ev(y1), ev(y1 + h)], true)
            } else {
                OdeProblem::from_potential(y1, h, n, q, [ev(y_end), ev(y_end - h)], false)
            };
            let v = numerov_integrate(&prob).unwrap();
            let amax = v.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
            let mut dev = 0.0f64;
            for frac in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
                let i = ((n - 1) as f64 * frac) as usize;
                dev = dev.max((ev(y1 + h * i as f64) - v[i]).abs() / amax);
            }
            println!(
                "trial {trial} pos={positive} beta={beta:.3} m={} mode {mode} fwd={forward} b={:+.3e}: dev {dev:.2e}",
                ch.m, modes.b[mode]
            );
        }
    }
}
