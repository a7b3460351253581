use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use fracrbf::closedform::kernel_operator_eval;
use fracrbf::fracops::oracle_apply;
use fracrbf::solvers::{
    build_collocation_system, mol_solve, ode_solution_eval, solve_dense, EntrySource, InitialProfile,
};

use crate::config::{read_json, series_control, EvalFile, EvalSetup, OdeFile, PdeFile};
use crate::{Failure, Flags};

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn eval_setup(f: Flags, need_grid: bool) -> Result<(EvalSetup, Option<std::path::PathBuf>), Failure> {
    let base: EvalFile = match &f.config {
        Some(p) => read_json(p)?,
        None => EvalFile::default(),
    };
    let over = EvalFile {
        op: f.op,
        alpha: f.alpha,
        a: f.a,
        b: f.b,
        family: f.family,
        param: f.param,
        scale: f.scale,
        center: f.center,
        x: f.x,
        grid: f.grid,
        rel_tol: f.rel_tol,
        max_terms: f.max_terms,
        quad_tol: f.quad_tol,
        bound: None,
    };
    Ok((base.merge(over).validate(need_grid)?, f.out))
}

fn problem_path(f: &Flags) -> Result<&Path, Failure> {
    f.config.as_deref().ok_or_else(|| Failure::config("--config PROBLEM.json is required"))
}

pub fn eval(f: Flags) -> Result<u8, Failure> {
    let (s, out) = eval_setup(f, false)?;
    if s.grid_mode {
        let mut w = output(out.as_deref())?;
        writeln!(w, "x,value")?;
        for &x in &s.points {
            let r = kernel_operator_eval(&s.spec, &s.kernel, x, &s.series)?;
            writeln!(w, "{x},{}", r.value)?;
        }
        w.flush()?;
    } else {
        let r = kernel_operator_eval(&s.spec, &s.kernel, s.points[0], &s.series)?;
        println!("value {}", r.value);
        println!("terms_used {}", r.terms_used);
        println!("imag_residual {}", r.imag_residual);
    }
    Ok(0)
}

pub fn oracle_check(f: Flags) -> Result<u8, Failure> {
    let (s, _) = eval_setup(f, false)?;
    let mut ok = true;
    for &x in &s.points {
        let cf = kernel_operator_eval(&s.spec, &s.kernel, x, &s.series)?.value;
        let or = oracle_apply(&s.spec, &s.kernel, x, &s.quad)?;
        let abs = (cf - or).abs();
        let rel = if or == 0.0 { abs } else { abs / or.abs() };
        ok &= rel <= s.bound;
        println!("x {x} closed_form {cf} oracle {or} abs_err {abs:e} rel_err {rel:e}");
    }
    Ok(if ok { 0 } else { 1 })
}

pub fn sweep(f: Flags) -> Result<u8, Failure> {
    let (s, out) = eval_setup(f, true)?;
    let mut w = output(out.as_deref())?;
    writeln!(w, "x,value,oracle,abs_err,rel_err")?;
    let mut ok = true;
    for &x in &s.points {
        let cf = kernel_operator_eval(&s.spec, &s.kernel, x, &s.series)?.value;
        let or = oracle_apply(&s.spec, &s.kernel, x, &s.quad)?;
        let abs = (cf - or).abs();
        let rel = if or == 0.0 { abs } else { abs / or.abs() };
        ok &= rel <= s.bound;
        writeln!(w, "{x},{cf},{or},{abs},{rel}")?;
    }
    w.flush()?;
    Ok(if ok { 0 } else { 1 })
}

pub fn solve_ode(f: Flags) -> Result<u8, Failure> {
    let file: OdeFile = read_json(problem_path(&f)?)?;
    let p = file.problem()?;
    let ctrl = series_control(f.rel_tol, f.max_terms)?;
    let mut sys = build_collocation_system(&p, &ctrl)?;
    let lambda = solve_dense(&mut sys)?;
    for w in &sys.warnings {
        eprintln!("warning: {w}");
    }
    let mut w = output(f.out.as_deref())?;
    writeln!(w, "t,u")?;
    for t in p.nodes() {
        writeln!(w, "{t},{}", ode_solution_eval(&p, &lambda, t))?;
    }
    w.flush()?;
    Ok(0)
}

pub fn solve_pde(f: Flags) -> Result<u8, Failure> {
    let file: PdeFile = read_json(problem_path(&f)?)?;
    let mut p = file.problem()?;
    let ctrl = series_control(f.rel_tol, f.max_terms)?;
    let mut times = vec![0.0];
    times.extend(p.times().into_iter().filter(|t| *t > 0.0));
    p.out_times = times;
    let (sys, tr) = mol_solve(&p, &EntrySource::ClosedForm(ctrl))?;
    for w in &sys.warnings {
        eprintln!("warning: {w}");
    }
    let mut w = output(f.out.as_deref())?;
    writeln!(w, "x,t,u")?;
    for (k, t) in tr.times.iter().enumerate() {
        for (x, u) in tr.nodes.iter().zip(tr.full_profile(k)) {
            writeln!(w, "{x},{t},{u}")?;
        }
    }
    w.flush()?;
    if p.u0 == InitialProfile::Sin4x {
        // projection on sin(4x), trapezoid rule over the nodes
        let proj = |v: &[f64]| -> f64 {
            let h = tr.nodes[1] - tr.nodes[0];
            tr.nodes.iter().zip(v).map(|(x, u)| u * (4.0 * x).sin()).sum::<f64>() * h
        };
        let last = tr.times.len() - 1;
        let g = proj(&tr.full_profile(last)) / proj(&tr.full_profile(0));
        eprintln!("growth factor of the sin(4x) mode at t = {}: {g}", tr.times[last]);
    }
    Ok(0)
}
