use stark_lft::frame_transform::*;
use stark_lft::xi_channels::*;
use stark_lft::ProblemSpec;

fn main() {
    let spec = ProblemSpec { energy: 135.8231/219474.6313632, field: 640.0/5.14220675e9, m: 1 };
    let chans = solve_xi_channels(&spec, 99, default_xi_max(&spec, 99).unwrap()).unwrap();
    let r0 = 20.0f64;
    let ct = (5.0*std::f64::consts::PI/6.0).cos();
    let xi0 = r0*(1.0+ct);
    let eta0 = r0*(1.0-ct);
    let ell = 1;
    let ff = ProblemSpec { field: 0.0, ..spec };
    let nl = ln_n_eps_ell(&spec, ell).unwrap().exp();
    println!("N_eps_ell(1) = {nl}");
    for &j in &[40usize,45,50,55,60,65,70,75] {
        let ch = &chans[j];
        let t = t_comb(&spec, ch.beta, ell).unwrap().re;
        let xh = xihat_on(&ff, ch.beta, &[xi0, xi0*1.5])[0];
        let gh = ghat_on(&spec, ch.beta, &[eta0, eta0*1.5]).unwrap()[0];
        let term = ch.n_xi*ch.n_xi*xh*gh*t/(nl*(xi0*eta0).sqrt());
        println!("n1={} beta={:.8} Nxi2={:.6e} T={:.6e} lnNeta={:.6} Xh={:.6e} Gh={:.6e} term={:.6e}",
            j, ch.beta, ch.n_xi*ch.n_xi, t, ln_n_eta_ff(&spec, ch.beta).unwrap(), xh, gh, term);
    }
    let lhs = reference_irregular_spherical(&spec, ell, &[r0], 5.0*std::f64::consts::PI/6.0).unwrap();
    let th = theta_lm(ell, 1, ct);
    println!("lhs(no Theta) = {}", lhs[0]/th);
}
