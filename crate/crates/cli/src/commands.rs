use std::fmt::Write as _;

use num_complex::Complex64 as C;
use tricoul::kinematics::partition_weights;
use tricoul::residual::{
    analytic_q_bbk, fit_samples, numeric_residual_eval, potential, ray_residuals, BbkField, FitOptions, PsiAsField,
    ResidualOptions, Stencil,
};
use tricoul::selftest::{run_all, SelftestOptions};
use tricoul::wavefn::{bbk, chi, psi_as};
use tricoul::{DecayFit, Error, Pair};

use crate::config::RunConfig;
use crate::CliError;

fn e(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_output(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|err| CliError::Io(format!("{}: {err}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub const EVAL_HEADER: &str = "re_bbk,im_bbk,re_chi1,im_chi1,re_chi2,im_chi2,re_chi3,im_chi3,re_psi_as,im_psi_as,\
abs_bbk,abs_psi_as,zeta0,zeta01,zeta02,zeta03,potential,singular_pair,h,abs_q_bbk,abs_q_as";

pub fn cmd_eval(cfg: &RunConfig) -> Result<(), CliError> {
    let z = cfg.z.ok_or_else(|| CliError::Input("eval needs --z x1,x2,x3,y1,y2,y3".into()))?;
    let (q, alpha) = (cfg.q, cfg.alpha);
    let mut notes = Vec::new();

    let b = bbk(&z, &q, alpha)?;
    let mut chis = [C::new(f64::NAN, f64::NAN); 3];
    for j in Pair::ALL {
        match chi(&z, &q, j, alpha) {
            Ok(v) => chis[j.index()] = v,
            Err(err) => notes.push(format!("chi{j}: {err}")),
        }
    }
    let a = psi_as(&z, &q, alpha, cfg.mu, cfg.nu)?;
    let w = partition_weights(&z, cfg.mu, cfg.nu)?;
    let (v, singular) = match potential(&z, alpha) {
        Ok(v) => (v, 0),
        Err(Error::OnScreen(j)) => (f64::INFINITY, j.index() + 1),
        Err(err) => return Err(err.into()),
    };

    let h = cfg.step.step(&z, &q);
    if singular != 0 {
        notes.push(format!("z lies on screen {singular}; residuals are undefined there"));
    }
    let ro = ResidualOptions::new(h).stencil(Stencil::Central8);
    let mut resid = |name: &str, r: tricoul::Result<tricoul::residual::ResidualEval>| match r {
        Ok(r) => r.q.norm(),
        Err(_) if singular != 0 => f64::NAN,
        Err(err) => {
            notes.push(format!("q_{name}: {err}"));
            f64::NAN
        }
    };
    let qb = resid("bbk", numeric_residual_eval(&BbkField { q, alpha }, &z, &q, alpha, &ro));
    let field = PsiAsField { q, alpha, mu: cfg.mu, nu: cfg.nu };
    let qa = resid("psi_as", numeric_residual_eval(&field, &z, &q, alpha, &ro));

    let mut row: Vec<String> = Vec::new();
    for c in [b, chis[0], chis[1], chis[2], a] {
        row.push(e(c.re));
        row.push(e(c.im));
    }
    row.extend([e(b.norm()), e(a.norm()), e(w.zeta0)]);
    row.extend(w.zeta0j.iter().map(|&x| e(x)));
    row.extend([e(v), singular.to_string(), e(h), e(qb), e(qa)]);

    let mut out = String::new();
    writeln!(out, "{EVAL_HEADER}").unwrap();
    writeln!(out, "{}", row.join(",")).unwrap();
    writeln!(out, "# step: {}; stencil: central8", cfg.step_description()).unwrap();
    for n in notes {
        writeln!(out, "# {n}").unwrap();
    }
    write_output(cfg, &out)
}

pub const RAYSCAN_HEADER: &str = "t,h,abs_bbk,abs_psi_as,abs_q_bbk_num,abs_q_as_num,abs_q_bbk_analytic";

fn fit_line(name: &str, r: &tricoul::Result<DecayFit>) -> String {
    match r {
        Ok(f) => format!(
            "# fit {name}: slope={} intercept={} r2={} floor_limited={} status=ok",
            e(f.slope),
            e(f.intercept),
            e(f.r_squared),
            f.floor_limited
        ),
        Err(Error::PoorFit(f)) => format!(
            "# fit {name}: slope={} intercept={} r2={} floor_limited={} status=poor_fit",
            e(f.slope),
            e(f.intercept),
            e(f.r_squared),
            f.floor_limited
        ),
        Err(err) => format!("# fit {name}: status=error ({err})"),
    }
}

pub fn cmd_rayscan(cfg: &RunConfig) -> Result<(), CliError> {
    let ray = cfg.ray_spec()?;
    let (q, alpha) = (cfg.q, cfg.alpha);
    let opts = FitOptions { policy: cfg.step, ..FitOptions::default() };
    let bf = BbkField { q, alpha };
    let af = PsiAsField { q, alpha, mu: cfg.mu, nu: cfg.nu };
    let sb = ray_residuals(&bf, &ray, &q, alpha, &opts)?;
    let sa = ray_residuals(&af, &ray, &q, alpha, &opts)?;

    let mut out = String::new();
    writeln!(out, "{RAYSCAN_HEADER}").unwrap();
    for (b, a) in sb.iter().zip(&sa) {
        let z = ray.path.point(b.t);
        let qan = analytic_q_bbk(&z, &q, alpha)?;
        let cols = [
            b.t,
            b.h,
            b.residual.value.norm(),
            a.residual.value.norm(),
            b.residual.q.norm(),
            a.residual.q.norm(),
            qan.norm(),
        ];
        writeln!(out, "{}", cols.map(e).join(",")).unwrap();
    }
    let fb = fit_samples(&sb);
    let fa = fit_samples(&sa);
    writeln!(out, "# step: {}; stencil: central8", cfg.step_description()).unwrap();
    writeln!(out, "{}", fit_line("bbk", &fb)).unwrap();
    writeln!(out, "{}", fit_line("psi_as", &fa)).unwrap();
    write_output(cfg, &out)?;

    for (name, f) in [("bbk", fb), ("psi_as", fa)] {
        match f {
            Ok(_) => {}
            Err(err @ Error::PoorFit(_)) => return Err(CliError::Invariant(format!("{name} decay fit: {err}"))),
            Err(err) => return Err(err.into()),
        }
    }
    Ok(())
}

pub fn cmd_selftest(norm_fault: f64) -> Result<(), CliError> {
    let reports = run_all(&SelftestOptions { norm_perturbation: norm_fault, seed: 0 })?;
    for r in &reports {
        println!("{r}");
    }
    match reports.iter().find(|r| !r.passed()) {
        Some(r) => Err(CliError::Invariant(format!("selftest: {} failed", r.name))),
        None => Ok(()),
    }
}
