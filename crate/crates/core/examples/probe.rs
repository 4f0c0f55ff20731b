use staggered_euler::config::RunConfig;
use staggered_euler::driver::run_case;
use staggered_euler::diagnostics::sample_profile;
use staggered_euler::stepper::TimeScheme;

fn main() {
    for n in [100usize, 400] {
        let config = RunConfig {
            case: "smooth".into(),
            n_cells: n,
            thermo_degree: 1,
            time_scheme: TimeScheme::Dec2,
            cfl: Some(0.3),
            ..RunConfig::default()
        };
        let out = run_case(&config).unwrap();
        let case = config.resolve_case().unwrap();
        let gas = case.gas();
        let sampler = case.reference_sampler().unwrap().unwrap();
        let prof = sample_profile(&out.state, &gas, 1000).unwrap();
        let mut worst = vec![];
        for (x, rho, _u, _p, _e) in &prof {
            let ex = sampler.state(*x, out.summary.t_final).unwrap();
            worst.push((*x, (rho - ex.rho).abs(), ex.rho));
        }
        worst.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        println!("n={n}: top errors (x, |drho|, rho_exact):");
        for w in &worst[..8] {
            println!("  x={:+.4} err={:.5} rho={:.4}", w.0, w.1, w.2);
        }
        let linf = worst[0].1;
        println!("  Linf(rho)={linf:.5}");
    }
}
