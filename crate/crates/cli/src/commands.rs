use std::fmt::Write as _;

use serde_json::Value;
use skylink::antenna::{array_gain, UlaConfig};
use skylink::cellsim::{
    association_csv, association_histogram, cdf_csv, deciles, nearest_sites_fraction, sum_rate_samples, Scenario,
};
use skylink::channel::{expected_path_loss_db, ProbLosParams};
use skylink::energy::{me_speed, mr_speed, DEFAULT_VCAP};
use skylink::kv::KvFile;
use skylink::metrics::{circular_ee, ee_sweep_csv, flyby_csv, flyby_improvement, flyby_trace, optimize_radius, EeCircleParams};
use skylink::planner::{
    coverage_altitude, parse_instance_csv, solve_pdp, solve_tsp, solve_tspn, spiral_placement, strip_placement,
    tour_csv, InstanceRow, Neighborhood, PrecedencePair, TspMode, WaypointSet, EXACT_TSP_LIMIT,
};
use skylink::scalar::from_db;
use skylink::trajopt::{
    bcd_codesign, initial_paths, rate_at_distance, rate_surrogate, shares_csv, trajectory_csv, CodesignInstance,
    SurrogateMode,
};
use skylink::{AirframePowerModel, Vec3};

use crate::error::{CliError, CliResult};
use crate::manifest::Artifacts;
use crate::preset::{load, load_kv, Loaded};
use crate::ScenarioSpec;

/// Registered commands with their default preset.
pub const COMMANDS: &[(&str, &str)] = &[
    ("fig3", "fig3.preset"),
    ("fig5", "ula8.preset"),
    ("fig7", "fixedwing.params"),
    ("fig12", "fig12.preset"),
    ("fig14", "fig14.preset"),
    ("fig16", "fig16.preset"),
    ("fig18", "cellsim.scenario"),
    ("fig19", "cellsim.scenario"),
    ("codesign", "canonical.inst"),
    ("placement", "placement.preset"),
    ("plan", "plan.preset"),
];

pub fn run(spec: &ScenarioSpec) -> CliResult<Artifacts> {
    let default = COMMANDS
        .iter()
        .find(|(c, _)| *c == spec.command)
        .map(|(_, p)| *p)
        .ok_or_else(|| CliError::Usage(format!("unknown command `{}`", spec.command)))?;
    let loaded = load(spec.preset.as_deref().unwrap_or(default), None)?;
    let mut kv = load_kv(&loaded, &spec.overrides)?;
    let mut art = Artifacts::default();
    art.input("preset", &loaded.origin, &loaded.text);
    if matches!(spec.command.as_str(), "fig18" | "fig19") {
        let seed = match spec.seed {
            Some(s) => s,
            None if kv.contains("seed") => kv.get("seed")?,
            None => return Err(CliError::Usage(format!("`{}` needs --seed", spec.command))),
        };
        kv.set("seed", &seed.to_string());
        art.result("seed_used", seed);
    }
    match spec.command.as_str() {
        "fig3" => fig3(&kv, &mut art)?,
        "fig5" => fig5(&kv, &mut art)?,
        "fig7" => fig7(&kv, &mut art)?,
        "fig12" => fig12(&kv, &mut art)?,
        "fig14" => fig14(&kv, &mut art)?,
        "fig16" => fig16(&kv, &mut art)?,
        "fig18" => fig18(&kv, &mut art)?,
        "fig19" => fig19(&kv, &mut art)?,
        "codesign" => codesign(&kv, &mut art)?,
        "placement" => placement(&kv, &loaded, &mut art)?,
        "plan" => plan(&kv, &loaded, &mut art)?,
        _ => unreachable!("command table and dispatch agree"),
    }
    Ok(art)
}

fn range(kv: &KvFile, lo: (&str, f64), hi: (&str, f64), step: (&str, f64)) -> CliResult<Vec<f64>> {
    let a = kv.get_f64_or(lo.0, lo.1)?;
    let b = kv.get_f64_or(hi.0, hi.1)?;
    let s = kv.get_f64_or(step.0, step.1)?;
    if !(s > 0.0) {
        return Err(CliError::validation(step.0, "must be positive"));
    }
    if !(b >= a) {
        return Err(CliError::validation(hi.0, format!("must be at least {}", lo.0)));
    }
    let n = ((b - a) / s + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a + i as f64 * s).collect())
}

fn fig3(kv: &KvFile, art: &mut Artifacts) -> CliResult<()> {
    let p = ProbLosParams::from_kv(kv)?;
    let d2d = kv.get_list_f64("d2D")?;
    if d2d.iter().any(|d| !(*d >= 0.0)) {
        return Err(CliError::validation("d2D", "distances must be non-negative"));
    }
    let hs = range(kv, ("H_min", 10.0), ("H_max", 3000.0), ("H_step", 10.0))?;
    if hs[0] <= 0.0 {
        return Err(CliError::validation("H_min", "must be positive"));
    }
    let mut csv = String::from("H_m,d2D_m,avg_PL_dB\n");
    for &d in &d2d {
        let mut best = (f64::NAN, f64::INFINITY);
        for &h in &hs {
            let pl = expected_path_loss_db(d, h, &p)?;
            let _ = writeln!(csv, "{h},{d},{pl}");
            if pl < best.1 {
                best = (h, pl);
            }
        }
        art.result(&format!("best_H_m_at_{d}"), best.0);
    }
    art.file("fig3.csv", csv);
    Ok(())
}

fn fig5(kv: &KvFile, art: &mut Artifacts) -> CliResult<()> {
    let cfg = UlaConfig::from_kv(kv)?;
    let step = kv.get_f64_or("step_deg", 0.5)?;
    if !(step > 0.0) {
        return Err(CliError::validation("step_deg", "must be positive"));
    }
    let mut vertical = String::from("angle_deg,gain_dB\n");
    let mut peak = (f64::NAN, f64::NEG_INFINITY);
    let nv = (180.0 / step).round() as usize;
    for i in 0..=nv {
        let deg = -90.0 + i as f64 * step;
        let g = array_gain(deg.to_radians(), 0.0, &cfg);
        let _ = writeln!(vertical, "{deg},{g}");
        if g > peak.1 {
            peak = (deg, g);
        }
    }
    let mut horizontal = String::from("angle_deg,gain_dB\n");
    let nh = (360.0 / step).round() as usize;
    for i in 0..=nh {
        let deg = -180.0 + i as f64 * step;
        let _ = writeln!(horizontal, "{deg},{}", array_gain(cfg.tilt, deg.to_radians(), &cfg));
    }
    art.result("peak_elevation_deg", peak.0);
    art.result("peak_gain_dBi", peak.1);
    art.file("fig5_vertical.csv", vertical);
    art.file("fig5_horizontal.csv", horizontal);
    Ok(())
}

fn fig7(kv: &KvFile, art: &mut Artifacts) -> CliResult<()> {
    let model = AirframePowerModel::from_kv(kv)?;
    let lo = if model.is_fixed_wing() { 1.0 } else { 0.0 };
    let vs = range(kv, ("V_min", lo), ("V_max", 100.0), ("V_step", 0.5))?;
    let mut csv = String::from("V_mps,P_W\n");
    for &v in &vs {
        let _ = writeln!(csv, "{v},{}", model.power(v)?);
    }
    let (vme, vmr) = (me_speed(&model, DEFAULT_VCAP), mr_speed(&model, DEFAULT_VCAP));
    art.result("V_me", vme);
    art.result("V_mr", vmr);
    art.result("P_at_V_me", model.power(vme)?);
    art.result("P_at_V_mr", model.power(vmr)?);
    art.file("fig7.csv", csv);
    Ok(())
}

fn fig12(kv: &KvFile, art: &mut Artifacts) -> CliResult<()> {
    let p = ProbLosParams::from_kv(kv)?;
    let trace = flyby_trace(&p, kv.get_f64("D")?, kv.get_f64("H_U")?, kv.get_f64("V")?, kv.get_f64_or("dt", 0.5)?)?;
    let (los, nlos, avg) = flyby_improvement(&trace);
    art.result("pl_improvement_los_dB", los);
    art.result("pl_improvement_nlos_dB", nlos);
    art.result("avg_gain_improvement_dB", avg);
    art.file("fig12.csv", flyby_csv(&trace));
    Ok(())
}

fn fig14(kv: &KvFile, art: &mut Artifacts) -> CliResult<()> {
    let h = kv.get_f64("H")?;
    let gamma = from_db(kv.get_f64("gamma_dB")?);
    let alpha = kv.get_f64("alpha")?;
    let y_local = kv.get_f64("y_local")?;
    if !(h > 0.0) {
        return Err(CliError::validation("H", "must be positive"));
    }
    if !(alpha > 0.0) {
        return Err(CliError::validation("alpha", "must be positive"));
    }
    let w = Vec3::new(0.0, 0.0, 0.0);
    let local = Vec3::new(0.0, y_local, h);
    let mut csv = String::from("y_m,rate,distance_surrogate,distance_sq_surrogate\n");
    for y in range(kv, ("y_min", 0.0), ("y_max", 800.0), ("y_step", 5.0))? {
        let q = Vec3::new(0.0, y, h);
        let exact = rate_at_distance(q.distance(&w), gamma, alpha);
        let d1 = rate_surrogate(&q, &w, gamma, alpha, &local, SurrogateMode::Distance);
        let d2 = rate_surrogate(&q, &w, gamma, alpha, &local, SurrogateMode::DistanceSq);
        let _ = writeln!(csv, "{y},{exact},{d1},{d2}");
    }
    art.result("rate_at_local", rate_at_distance(local.distance(&w), gamma, alpha));
    art.file("fig14.csv", csv);
    Ok(())
}

fn fig16(kv: &KvFile, art: &mut Artifacts) -> CliResult<()> {
    let p = EeCircleParams::from_kv(kv)?;
    let lo = kv.get_f64_or("r_min", 10.0)?;
    let hi = kv.get_f64_or("r_max", 3000.0)?;
    let step = kv.get_f64_or("r_step", 1.0)?;
    let csv = ee_sweep_csv(&p, lo, hi, step).map_err(|_| CliError::validation("r_min", "need 0 < r_min < r_max and r_step > 0"))?;
    let r = optimize_radius(&p, lo, hi)?;
    art.result("r_star_m", r);
    art.result("EE_star", circular_ee(r, &p)?);
    art.file("fig16.csv", csv);
    Ok(())
}

fn fig18(kv: &KvFile, art: &mut Artifacts) -> CliResult<()> {
    let s = Scenario::from_kv(kv)?;
    let mut rows = Vec::new();
    for &h in &s.probe_heights {
        let hist = association_histogram(&s, h)?;
        art.result(&format!("nearest3_fraction_at_{h}"), nearest_sites_fraction(&s, &hist));
        rows.push((h, hist));
    }
    art.file("fig18.csv", association_csv(&rows));
    Ok(())
}

fn fig19(kv: &KvFile, art: &mut Artifacts) -> CliResult<()> {
    let s = Scenario::from_kv(kv)?;
    let mut rows = Vec::new();
    for &n in &s.n_uavs {
        let v = sum_rate_samples(&s, n)?;
        art.result(&format!("deciles_{n}_uavs"), Value::from(deciles(&v)));
        rows.push((n, v));
    }
    art.file("fig19.csv", cdf_csv(&rows));
    Ok(())
}

fn codesign(kv: &KvFile, art: &mut Artifacts) -> CliResult<()> {
    let inst = CodesignInstance::from_kv(kv)?;
    let init = initial_paths(&inst)?;
    let baseline = inst.utility_value(&init, &inst.shares);
    let out = bcd_codesign(&inst, &init)?;
    art.result("baseline", baseline);
    art.result("objective", out.objective());
    art.result("sca_iterations", out.sca_iterations);
    art.result("slots", inst.slots());
    art.file("trajectory.csv", trajectory_csv(&out.paths, inst.grid.delta_t));
    art.file("shares.csv", shares_csv(&out.shares));
    art.file("trace.csv", out.trace_csv());
    Ok(())
}

fn read_rows(kv: &KvFile, key: &str, preset: &Loaded, art: &mut Artifacts) -> CliResult<Vec<InstanceRow>> {
    let name: String = kv.get(key)?;
    let file = load(&name, preset.dir.as_deref()).map_err(|_| CliError::validation(key, format!("`{name}` not found")))?;
    art.input(key, &file.origin, &file.text);
    parse_instance_csv(&file.text).map_err(|e| CliError::validation(key, e.to_string()))
}

fn placement(kv: &KvFile, preset: &Loaded, art: &mut Artifacts) -> CliResult<()> {
    let p = ProbLosParams::from_kv(kv)?;
    let threshold = kv.get_f64("threshold_dB")?;
    let hs = range(kv, ("H_min", 10.0), ("H_max", 1000.0), ("H_step", 5.0))?;
    let prof = coverage_altitude(&p, threshold, &hs, kv.get_f64_or("r_max", 1e4)?)?;
    let gts: Vec<Vec3<f64>> = read_rows(kv, "ground_terminals", preset, art)?.into_iter().map(|r| r.pos).collect();
    let spiral = spiral_placement(&gts, prof.r_star)?;
    let strip = strip_placement(&gts, prof.r_star)?;
    let mut cov = String::from("H_m,R_cov_m\n");
    for (h, r) in &prof.table {
        let _ = writeln!(cov, "{h},{r}");
    }
    let mut pl = String::from("uav,x,y,z\n");
    for (i, u) in spiral.iter().enumerate() {
        let _ = writeln!(pl, "{i},{},{},{}", u.x, u.y, prof.h_star);
    }
    art.result("H_star_m", prof.h_star);
    art.result("R_cov_m", prof.r_star);
    art.result("uavs_spiral", spiral.len());
    art.result("uavs_strip", strip.len());
    art.file("coverage.csv", cov);
    art.file("placement.csv", pl);
    Ok(())
}

fn plan(kv: &KvFile, preset: &Loaded, art: &mut Artifacts) -> CliResult<()> {
    let rows = read_rows(kv, "waypoints", preset, art)?;
    let start = if kv.contains("start") { Some(kv.get_point("start")?) } else { None };
    let end = if kv.contains("end") { Some(kv.get_point("end")?) } else { None };
    let mode = match kv.raw("solver").unwrap_or("auto") {
        "exact" => TspMode::Exact,
        "heuristic" => TspMode::Heuristic,
        "auto" if rows.len() <= EXACT_TSP_LIMIT => TspMode::Exact,
        "auto" => TspMode::Heuristic,
        other => return Err(CliError::validation("solver", format!("expected auto, exact or heuristic, got `{other}`"))),
    };
    let index = |id: &str| {
        rows.iter().position(|r| r.id == id).ok_or_else(|| CliError::validation("precedence", format!("unknown id `{id}`")))
    };
    let mut pairs = Vec::new();
    if let Some(text) = kv.raw("precedence") {
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (a, b) = item
                .split_once('>')
                .ok_or_else(|| CliError::validation("precedence", format!("expected `a>b`, got `{item}`")))?;
            pairs.push(PrecedencePair { source: index(a.trim())?, destination: index(b.trim())? });
        }
    }
    let points: Vec<Vec3<f64>> = rows.iter().map(|r| r.pos).collect();
    let (order, visits, length, kind) = if rows.iter().any(|r| r.radius.is_some_and(|x| x > 0.0)) {
        if !pairs.is_empty() {
            return Err(CliError::validation("precedence", "not supported together with neighbourhood radii"));
        }
        let nb: Vec<Neighborhood> =
            rows.iter().map(|r| Neighborhood { center: r.pos, radius: r.radius.unwrap_or(0.0) }).collect();
        let res = solve_tspn(&nb, start, end, mode)?;
        (res.order, res.visit_points, res.length, "tspn")
    } else if !pairs.is_empty() {
        let t = solve_pdp(&pairs, &WaypointSet { points: points.clone(), start, end })?;
        (t.order, points, t.length, "pdp")
    } else {
        let t = solve_tsp(&WaypointSet { points: points.clone(), start, end }, mode)?;
        (t.order, points, t.length, "tsp")
    };
    let mut path = String::from("position,id,x,y,z\n");
    for (k, &i) in order.iter().enumerate() {
        let v = visits[i];
        let _ = writeln!(path, "{k},{},{},{},{}", rows[i].id, v.x, v.y, v.z);
    }
    art.result("problem", kind);
    art.result("length_m", length);
    art.file("tour.csv", tour_csv(&rows, &order, length));
    art.file("path.csv", path);
    Ok(())
}
