use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use gfwigner::field::catalog_bases;
use gfwigner::pauli::{ordering_json, TOL};
use gfwigner::phase_space::{build_kernel, build_mubs, count_distinct_wigner, sw_report, wigner_map, CovarianceMode, Line};
use gfwigner::tomography::{fidelity, project_psd, reconstruct, shot_study, tomogram_of, Tomogram};

use crate::config::{load_state, Setup, StateInput};
use crate::Failure;

pub struct Outputs {
    dir: Option<PathBuf>,
}

impl Outputs {
    pub fn new(dir: Option<&Path>) -> Result<Self, Failure> {
        if let Some(d) = dir {
            fs::create_dir_all(d).map_err(|e| Failure::Input(format!("{}: {e}", d.display())))?;
        }
        Ok(Self { dir: dir.map(Path::to_path_buf) })
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), Failure> {
        if let Some(d) = &self.dir {
            let p = d.join(name);
            fs::write(&p, contents).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
        }
        Ok(())
    }

    pub fn write_json(&self, name: &str, v: &Value) -> Result<(), Failure> {
        self.write(name, &(serde_json::to_string_pretty(v).expect("json values serialize") + "\n"))
    }

    pub fn enabled(&self) -> bool {
        self.dir.is_some()
    }
}

/// A finished report plus whether every verification in it passed.
pub struct Report {
    pub body: Value,
    pub passed: bool,
}

impl Report {
    fn ok(body: Value) -> Self {
        Self { body, passed: true }
    }
}

fn require_state(state: Option<&str>) -> Result<&str, Failure> {
    state.ok_or_else(|| Failure::Input("this command needs --state".into()))
}

pub fn field_info(s: &Setup, out: &Outputs) -> Result<Report, Failure> {
    let f = &s.field;
    let traces: Vec<Value> = s.ord.elems().iter().map(|&e| json!({ "elem": f.format(e), "trace": f.trace(e) })).collect();
    let table: Vec<Value> = s.ord.elems().iter().enumerate().map(|(i, &e)| json!({ "index": i, "elem": f.format(e) })).collect();
    let bases: Vec<Value> = catalog_bases(f)
        .iter()
        .map(|b| {
            json!({
                "kind": format!("{:?}", b.kind()),
                "elems": b.elems().iter().map(|&e| f.format(e)).collect::<Vec<_>>(),
                "dual": b.dual_elems().iter().map(|&e| f.format(e)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let body = json!({
        "p": f.p(),
        "n": f.n(),
        "d": f.d(),
        "poly": f.poly(),
        "primitive": f.format(f.primitive_element()),
        "traces": traces,
        "ordering": ordering_json(&s.ord),
        "ordering_table": table,
        "bases": bases,
    });
    out.write_json("field_info.json", &body)?;
    Ok(Report::ok(body))
}

pub fn kernel_check(s: &Setup, samples: Option<usize>, seed: u64, out: &Outputs) -> Result<Report, Failure> {
    let k = build_kernel(&s.ord, &s.rot)?;
    let mode = match samples {
        Some(count) => CovarianceMode::Sampled { count, seed },
        None => CovarianceMode::default_for(s.field.d()),
    };
    let rep = sw_report(&k, mode)?;
    let passed = rep.passes(TOL);
    let body = json!({ "tolerance": TOL, "passed": passed, "report": rep, "rotations": s.rot.to_json() });
    out.write_json("kernel_check.json", &body)?;
    Ok(Report { body, passed })
}

fn line_sums_csv(s: &Setup, grid: &gfwigner::phase_space::WignerGrid) -> String {
    let f = &s.field;
    let mut csv = String::from("slope,intercept,probability\n");
    for (line, p) in grid.line_sum_table() {
        let (slope, icpt) = match line {
            Line::Sloped { mu, nu } => (f.format(mu), f.format(nu)),
            Line::Vertical { nu } => ("inf".to_string(), f.format(nu)),
        };
        csv.push_str(&format!("{slope},{icpt},{}\n", clean(p)));
    }
    csv
}

fn clean(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn wigner(s: &Setup, state: Option<&str>, out: &Outputs) -> Result<Report, Failure> {
    let rho = load_state(s, require_state(state)?)?.density();
    let k = build_kernel(&s.ord, &s.rot)?;
    let grid = wigner_map(rho.op(), &k)?;
    let f = &s.field;
    let marg_a: Vec<Value> = s.ord.elems().iter().map(|&a| json!({ "alpha": f.format(a), "p": clean(grid.marginal_alpha(a)) })).collect();
    let marg_b: Vec<Value> = s.ord.elems().iter().map(|&b| json!({ "beta": f.format(b), "p": clean(grid.marginal_beta(b)) })).collect();
    let marginals = json!({ "alpha": marg_a, "beta": marg_b });
    out.write("wigner.csv", &grid.to_csv())?;
    out.write_json("wigner.json", &grid.to_json(Some(&s.rot)))?;
    out.write_json("marginals.json", &marginals)?;
    out.write("line_sums.csv", &line_sums_csv(s, &grid))?;
    let body = if out.enabled() {
        json!({ "total": clean(grid.total().re), "max_imag": grid.max_imag(), "marginals": marginals })
    } else {
        json!({ "grid": grid.to_json(Some(&s.rot)), "marginals": marginals })
    };
    Ok(Report::ok(body))
}

pub fn enumerate(s: &Setup, state: Option<&str>, out: &Outputs) -> Result<Report, Failure> {
    let psi = match load_state(s, require_state(state)?)? {
        StateInput::Pure(p) => p,
        StateInput::Mixed(_) => return Err(gfwigner::Error::MixedStateUnsupported.into()),
    };
    let rep = count_distinct_wigner(&psi, &s.rot)?;
    let d = s.field.d() as u64;
    let sums_ok = rep.classes.iter().map(|c| c.size).sum::<u64>() == d.pow(d as u32 - 1);
    let passed = sums_ok && rep.certificate_matches() != Some(false);
    let mut body = rep.to_json();
    body["certificate_matches"] = json!(rep.certificate_matches());
    out.write_json("enumerate.json", &body)?;
    for (i, c) in rep.classes.iter().enumerate() {
        out.write(&format!("class_{i}.csv"), &c.grid.to_csv())?;
    }
    Ok(Report { body, passed })
}

pub fn tomography(
    s: &Setup,
    state: Option<&str>,
    tomogram: Option<&str>,
    shots: &[u64],
    seed: u64,
    out: &Outputs,
) -> Result<Report, Failure> {
    let mubs = build_mubs(&s.ord, &s.rot)?;
    if let Some(path) = tomogram {
        let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
        let t = Tomogram::from_json(&s.field, &v)?;
        let rec = reconstruct(&t, &s.ord, &s.rot)?;
        let proj = project_psd(&rec.rho)?;
        let mut body = json!({
            "asymmetry": rec.asymmetry,
            "f00_discrepancy": rec.f00_discrepancy,
            "reconstruction": rec.rho.to_json(),
            "projected": proj.op().to_json(),
        });
        if let Some(st) = state {
            let rho = load_state(s, st)?.density();
            body["fidelity"] = json!(fidelity(&rho, &proj)?);
            body["max_entry_error"] = json!(rec.rho.max_diff(rho.op())?);
        }
        out.write_json("reconstruction.json", &body)?;
        return Ok(Report::ok(body));
    }
    let rho = load_state(s, require_state(state)?)?.density();
    let t = tomogram_of(&rho, &mubs)?;
    out.write_json("tomogram.json", &t.to_json())?;
    if shots.is_empty() {
        let rec = reconstruct(&t, &s.ord, &s.rot)?;
        let err = rec.rho.max_diff(rho.op())?;
        let passed = err < TOL;
        let body = json!({
            "mode": "exact",
            "round_trip_error": err,
            "tolerance": TOL,
            "passed": passed,
            "asymmetry": rec.asymmetry,
            "f00_discrepancy": rec.f00_discrepancy,
        });
        out.write_json("tomography.json", &body)?;
        return Ok(Report { body, passed });
    }
    let rows = shot_study(&rho, &mubs, shots, seed)?;
    let mut csv = String::from("shots,fidelity,raw_min_eigenvalue,max_entry_error\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{}\n", r.shots, r.fidelity, r.raw_min_eigenvalue, r.max_entry_error));
    }
    out.write("fidelity.csv", &csv)?;
    let body = json!({ "mode": "shots", "seed": seed, "rows": rows });
    out.write_json("tomography.json", &body)?;
    Ok(Report::ok(body))
}

pub fn mub(s: &Setup, out: &Outputs) -> Result<Report, Failure> {
    let m = build_mubs(&s.ord, &s.rot)?;
    let rep = m.report()?;
    let passed = rep.cross < TOL && rep.orthonormal < TOL;
    let f = &s.field;
    if out.enabled() {
        let mut states = Vec::new();
        for mu in f.elements() {
            for nu in f.elements() {
                let l = Line::Sloped { mu, nu };
                states.push(json!({ "line": l.label(f), "state": m.state(&l).to_json() }));
            }
        }
        for nu in f.elements() {
            let l = Line::Vertical { nu };
            states.push(json!({ "line": l.label(f), "state": m.state(&l).to_json() }));
        }
        out.write_json("mub_states.json", &json!(states))?;
    }
    let body = json!({ "d": f.d(), "bases": f.d() + 1, "tolerance": TOL, "passed": passed, "report": rep });
    out.write_json("mub.json", &body)?;
    Ok(Report { body, passed })
}
