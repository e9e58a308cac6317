use std::fmt;

use serde_json::{json, Map, Value};
use subplanck::fock::MeanPhoton;
use subplanck::metrics::{
    central_tile_extent_with, extent_sweep, first_zero_radius, mean_photon, photon_stats_sweep_with, SweepVariable,
};
use subplanck::phasespace::{
    evaluate_model, residual_stats, Backend, Direction, GridSpec, Model, Normalization, Quantity, StateSpec,
    DEGENERATE_ORIGIN,
};
use subplanck::{Error, Result};

use crate::output::{self, column_residuals, Cell, Table};
use crate::settings::{parse_counts, parse_points, parse_values, Settings, DEFAULT_R, GRID_KEYS, STATE_KEYS};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    State,
    Wigner,
    Overlap,
    TileExtent,
    Sweep,
    PhotonStats,
    Compare,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::State => "state",
            CommandKind::Wigner => "wigner",
            CommandKind::Overlap => "overlap",
            CommandKind::TileExtent => "tile-extent",
            CommandKind::Sweep => "sweep",
            CommandKind::PhotonStats => "photon-stats",
            CommandKind::Compare => "compare",
        }
    }

    fn allowed_keys(self) -> Vec<&'static str> {
        let mut keys = vec!["threads"];
        match self {
            CommandKind::PhotonStats => keys.extend(["n", "r", "backend"]),
            CommandKind::Compare => keys.extend(STATE_KEYS),
            _ => keys.extend(STATE_KEYS.iter().copied().chain(["backend"])),
        }
        match self {
            CommandKind::Wigner | CommandKind::Overlap => keys.extend(GRID_KEYS.iter().copied().chain(["at"])),
            CommandKind::TileExtent => keys.push("axis"),
            _ => {}
        }
        keys
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One backend or both, for cross-checking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    One(Backend),
    Both,
}

impl BackendChoice {
    pub fn backends(self) -> Vec<Backend> {
        match self {
            BackendChoice::One(b) => vec![b],
            BackendChoice::Both => vec![Backend::ClosedForm, Backend::Oracle],
        }
    }

    fn parse(settings: &Settings) -> std::result::Result<Self, CliError> {
        match settings.get("backend").unwrap_or("closed_form") {
            "both" => Ok(BackendChoice::Both),
            v => v.parse().map(BackendChoice::One).map_err(|e: Error| CliError::usage("--backend", e.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    Grid(GridSpec),
    Points(Vec<(f64, f64)>),
}

/// A fully resolved command.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    State { spec: StateSpec, backends: BackendChoice },
    Field { quantity: Quantity, spec: StateSpec, sampling: Sampling, backends: BackendChoice },
    TileExtent { spec: StateSpec, axes: Vec<Direction>, backends: BackendChoice },
    Sweep { spec: StateSpec, values: Vec<f64>, backends: BackendChoice },
    PhotonStats { n: Vec<usize>, r: f64, backends: BackendChoice },
    Compare { spec: StateSpec },
}

impl Job {
    pub fn spec(&self) -> Option<&StateSpec> {
        match self {
            Job::State { spec, .. }
            | Job::Field { spec, .. }
            | Job::TileExtent { spec, .. }
            | Job::Sweep { spec, .. }
            | Job::Compare { spec } => Some(spec),
            Job::PhotonStats { .. } => None,
        }
    }

    pub fn grid(&self) -> Option<GridSpec> {
        match self {
            Job::Field { sampling: Sampling::Grid(g), .. } => Some(*g),
            _ => None,
        }
    }

    pub fn backends(&self) -> Vec<Backend> {
        match self {
            Job::State { backends, .. }
            | Job::Field { backends, .. }
            | Job::TileExtent { backends, .. }
            | Job::Sweep { backends, .. }
            | Job::PhotonStats { backends, .. } => backends.backends(),
            Job::Compare { .. } => BackendChoice::Both.backends(),
        }
    }
}

fn grid_from(settings: &mut Settings, default: GridSpec) -> std::result::Result<GridSpec, CliError> {
    for (key, v) in GRID_KEYS.iter().zip([default.x_min, default.x_max, default.nx as f64, default.p_min, default.p_max, default.np as f64]) {
        settings.set_default(key, &v.to_string());
    }
    let g = GridSpec {
        x_min: settings.require("x-min")?,
        x_max: settings.require("x-max")?,
        nx: settings.require("nx")?,
        p_min: settings.require("p-min")?,
        p_max: settings.require("p-max")?,
        np: settings.require("np")?,
    };
    g.validate().map_err(|e| CliError::usage("--x-min/--p-min", e.to_string()))?;
    if !g.contains_origin() {
        return Err(CliError::usage("--x-min/--p-min", "the grid must contain the origin".into()));
    }
    Ok(g)
}

/// Checks keys, fills defaults into `settings` and builds the job.
///
/// After this `settings` holds every value the job depends on, so it can be
/// replayed from the sidecar.
pub fn resolve(kind: CommandKind, settings: &mut Settings) -> std::result::Result<Job, CliError> {
    settings.only(&kind.allowed_keys())?;
    if kind == CommandKind::PhotonStats {
        settings.set_default("n", "0:20");
        settings.set_default("r", DEFAULT_R);
        settings.set_default("backend", "oracle");
        let n = parse_counts("n", settings.get("n").unwrap_or_default())?;
        let r: f64 = settings.require("r")?;
        if !(r > 0.0 && r <= 3.0) {
            return Err(CliError::usage("--r", format!("{r} outside (0, 3]")));
        }
        return Ok(Job::PhotonStats { n, r, backends: BackendChoice::parse(settings)? });
    }

    let family = settings.family()?;
    if kind == CommandKind::Sweep {
        let key = if family.uses_x0() {
            "x0"
        } else if family.uses_photons() {
            "n"
        } else {
            return Err(CliError::usage("--family", format!("{family} has neither n nor x0 to sweep")));
        };
        settings.set_default(key, if key == "x0" { "4:16" } else { "1:20" });
    }
    settings.state_defaults(family);
    settings.set_default("backend", "closed_form");

    match kind {
        CommandKind::State => Ok(Job::State { spec: settings.state()?, backends: BackendChoice::parse(settings)? }),
        CommandKind::Wigner | CommandKind::Overlap => {
            let (quantity, default) = match kind {
                CommandKind::Wigner => (Quantity::Wigner, GridSpec::wigner_default()),
                _ => (Quantity::Overlap, GridSpec::overlap_default()),
            };
            let sampling = match settings.get("at") {
                Some(at) => {
                    if let Some(k) = GRID_KEYS.iter().copied().find(|k| settings.contains(k)) {
                        return Err(CliError::usage(&format!("--{k}"), "cannot be combined with --at".into()));
                    }
                    Sampling::Points(parse_points(at)?)
                }
                None => Sampling::Grid(grid_from(settings, default)?),
            };
            Ok(Job::Field { quantity, spec: settings.state()?, sampling, backends: BackendChoice::parse(settings)? })
        }
        CommandKind::TileExtent => {
            settings.set_default("axis", "x,p");
            let axes = settings
                .get("axis")
                .unwrap_or_default()
                .split(',')
                .map(|a| a.parse::<Direction>().map_err(|e| CliError::usage("--axis", e.to_string())))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(Job::TileExtent { spec: settings.state()?, axes, backends: BackendChoice::parse(settings)? })
        }
        CommandKind::Sweep => {
            let key = if family.uses_x0() { "x0" } else { "n" };
            let raw = settings.get(key).unwrap_or_default().to_string();
            let values = if key == "n" {
                parse_counts(key, &raw)?.into_iter().map(|v| v as f64).collect()
            } else {
                parse_values(key, &raw)?
            };
            // the base spec carries the first value so validation sees a complete state
            let mut probe = settings.clone();
            probe.set(key, values[0].to_string());
            Ok(Job::Sweep { spec: probe.state()?, values, backends: BackendChoice::parse(settings)? })
        }
        CommandKind::Compare => {
            settings.remove("backend");
            Ok(Job::Compare { spec: settings.state()? })
        }
        CommandKind::PhotonStats => unreachable!("handled above"),
    }
}

/// Tables and metadata produced by a job.
#[derive(Debug, Default)]
pub struct Outcome {
    /// One table per backend, or a single table for [`Job::Compare`].
    pub tables: Vec<(Option<Backend>, Table)>,
    pub cutoffs: Map<String, Value>,
    pub details: Map<String, Value>,
}

impl Outcome {
    fn add(&mut self, backend: Backend, table: Table, cutoff: Option<usize>) {
        self.cutoffs.insert(backend.to_string(), json!(cutoff));
        self.tables.push((Some(backend), table));
    }

    /// Residuals between the two backend tables, when there are two.
    pub fn comparison(&self) -> Option<Value> {
        match self.tables.as_slice() {
            [(Some(_), a), (Some(_), b)] => column_residuals(a, b),
            _ => None,
        }
    }
}

fn model_mean_photon(model: &Model, spec: &StateSpec) -> Result<f64> {
    match model {
        Model::ClosedForm(_) => mean_photon(spec),
        Model::Oracle(o) => Ok(o.density().mean_photon()),
    }
}

fn field_table(model: &Model, quantity: Quantity, spec: &StateSpec, sampling: &Sampling) -> Result<Table> {
    let mut table = Table::new(output::FIELD);
    match sampling {
        Sampling::Grid(grid) => {
            let field = evaluate_model(model, spec, grid, quantity)?;
            table.rows = field.points().map(|(x, p, v)| vec![x.into(), p.into(), v.into()]).collect();
        }
        Sampling::Points(points) => {
            let scale = if quantity == Quantity::Wigner && spec.normalization == Normalization::Origin {
                let origin = model.evaluate(quantity, 0.0, 0.0)?.abs();
                if !(origin >= DEGENERATE_ORIGIN) {
                    return Err(Error::DegenerateNormalization(origin));
                }
                origin
            } else {
                1.0
            };
            for &(x, p) in points {
                table.push(vec![x.into(), p.into(), (model.evaluate(quantity, x, p)? / scale).into()]);
            }
        }
    }
    Ok(table)
}

fn zero_radii(model: &Model) -> Result<Value> {
    let mut out = Map::new();
    for d in Direction::ALL {
        out.insert(d.to_string(), json!(first_zero_radius(model, d)?));
    }
    Ok(Value::Object(out))
}

/// Runs the job; every numeric failure is returned unchanged.
pub fn run(job: &Job) -> Result<Outcome> {
    let mut out = Outcome::default();
    match job {
        Job::State { spec, backends } => {
            for backend in backends.backends() {
                let model = Model::new(spec, backend)?;
                let mut t = Table::new(output::STATE);
                t.push(vec!["mean_photon".into(), model_mean_photon(&model, spec)?.into()]);
                t.push(vec!["wigner_origin".into(), model.evaluate(Quantity::Wigner, 0.0, 0.0)?.into()]);
                out.add(backend, t, model.cutoff());
            }
        }
        Job::Field { quantity, spec, sampling, backends } => {
            let mut radii = Map::new();
            for backend in backends.backends() {
                let model = Model::new(spec, backend)?;
                out.add(backend, field_table(&model, *quantity, spec, sampling)?, model.cutoff());
                if *quantity == Quantity::Overlap {
                    radii.insert(backend.to_string(), zero_radii(&model)?);
                }
            }
            if !radii.is_empty() {
                out.details.insert("zero_radius".into(), Value::Object(radii));
            }
        }
        Job::TileExtent { spec, axes, backends } => {
            for backend in backends.backends() {
                let model = Model::new(spec, backend)?;
                let mut t = Table::new(output::EXTENT);
                for &axis in axes {
                    let rec = central_tile_extent_with(&model, spec, axis)?;
                    t.push(vec![
                        axis.name().into(),
                        rec.hwhm.into(),
                        rec.bracket.0.into(),
                        rec.bracket.1.into(),
                        rec.iterations.into(),
                        rec.residual.into(),
                    ]);
                }
                out.add(backend, t, model.cutoff());
            }
        }
        Job::Sweep { spec, values, backends } => {
            let mut fits = Map::new();
            for backend in backends.backends() {
                let sweep = extent_sweep(spec, values, backend)?;
                let schema = match sweep.variable {
                    SweepVariable::Photons => output::SWEEP_N,
                    SweepVariable::Separation => output::SWEEP_X0,
                };
                let mut t = Table::new(schema);
                for row in &sweep.rows {
                    let first = match sweep.variable {
                        SweepVariable::Photons => Cell::from(row.value as usize),
                        SweepVariable::Separation => Cell::from(row.value),
                    };
                    t.push(vec![first, row.hwhm_x.into(), row.hwhm_p.into(), row.mean_photon.into()]);
                }
                fits.insert(
                    backend.to_string(),
                    json!({
                        "variable": sweep.variable,
                        "fit_x": sweep.fit_x,
                        "fit_p": sweep.fit_p,
                        "skipped": sweep.skipped,
                        "strictly_decreasing": sweep.strictly_decreasing(),
                    }),
                );
                out.add(backend, t, None);
            }
            out.details.insert("sweep".into(), Value::Object(fits));
        }
        Job::PhotonStats { n, r, backends } => {
            for backend in backends.backends() {
                let mut t = Table::new(output::PHOTON_STATS);
                for row in photon_stats_sweep_with(n, *r, backend)? {
                    t.push(vec![row.n.into(), row.pasvs.into(), row.pssvs.into(), row.spasvs.into(), row.spssvs.into()]);
                }
                out.add(backend, t, None);
            }
        }
        Job::Compare { spec } => {
            let closed = Model::new(spec, Backend::ClosedForm)?;
            let oracle = Model::new(spec, Backend::Oracle)?;
            let mut t = Table::new(output::COMPARE);
            for (quantity, grid) in
                [(Quantity::Wigner, GridSpec::wigner_default()), (Quantity::Overlap, GridSpec::overlap_default())]
            {
                let s = residual_stats(
                    &evaluate_model(&closed, spec, &grid, quantity)?,
                    &evaluate_model(&oracle, spec, &grid, quantity)?,
                )?;
                t.push(vec![quantity.to_string().as_str().into(), s.max_abs.into(), s.max_rel_to_peak.into(), s.rms.into()]);
            }
            let scalar = |t: &mut Table, name: &str, a: f64, b: f64| {
                let d = (a - b).abs();
                let peak = a.abs().max(b.abs());
                t.push(vec![name.into(), d.into(), (if peak > 0.0 { d / peak } else { d }).into(), d.into()]);
            };
            for axis in [Direction::X, Direction::P] {
                let a = central_tile_extent_with(&closed, spec, axis);
                let b = central_tile_extent_with(&oracle, spec, axis);
                match (a, b) {
                    (Ok(a), Ok(b)) => scalar(&mut t, &format!("hwhm_{axis}"), a.hwhm, b.hwhm),
                    // neither backend sees a crossing: nothing to compare
                    (Err(Error::NoCrossing { .. }), Err(Error::NoCrossing { .. })) => {}
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                }
            }
            scalar(&mut t, "mean_photon", model_mean_photon(&closed, spec)?, model_mean_photon(&oracle, spec)?);
            out.cutoffs.insert(Backend::Oracle.to_string(), json!(oracle.cutoff()));
            out.tables.push((None, t));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &[(&str, &str)]) -> Settings {
        let mut s = Settings::default();
        for (k, v) in pairs {
            s.set(k, *v);
        }
        s
    }

    #[test]
    fn defaults_are_written_back() {
        let mut s = settings(&[("family", "spasvs")]);
        let job = resolve(CommandKind::Overlap, &mut s).unwrap();
        assert_eq!(job.grid(), Some(GridSpec::overlap_default()));
        for key in ["n", "r", "c1", "x-min", "np", "backend", "normalization"] {
            assert!(s.contains(key), "{key}");
        }
        // replaying the resolved settings gives the same job
        let mut again = s.clone();
        assert_eq!(resolve(CommandKind::Overlap, &mut again).unwrap(), job);
        assert_eq!(again, s);
    }

    #[test]
    fn foreign_keys_rejected() {
        let mut s = settings(&[("family", "spasvs"), ("axis", "x")]);
        assert!(resolve(CommandKind::Wigner, &mut s).unwrap_err().to_string().starts_with("--axis"));
        let mut s = settings(&[("family", "spasvs"), ("at", "0,0"), ("nx", "5")]);
        assert!(resolve(CommandKind::Wigner, &mut s).unwrap_err().to_string().starts_with("--nx"));
    }

    #[test]
    fn sweep_variable_from_family() {
        let mut s = settings(&[("family", "compass")]);
        match resolve(CommandKind::Sweep, &mut s).unwrap() {
            Job::Sweep { values, spec, .. } => {
                assert_eq!(values.len(), 13);
                assert_eq!(spec.x0, Some(4.0));
            }
            other => panic!("{other:?}"),
        }
        let mut s = settings(&[("family", "svs")]);
        assert!(resolve(CommandKind::Sweep, &mut s).is_err());
        let mut s = settings(&[("family", "pasvs"), ("n", "2.5")]);
        assert!(resolve(CommandKind::Sweep, &mut s).unwrap_err().to_string().starts_with("--n"));
    }

    #[test]
    fn points_follow_origin_normalisation() {
        let spec = StateSpec::coherent(0.0);
        let model = Model::new(&spec, Backend::ClosedForm).unwrap();
        let t = field_table(&model, Quantity::Wigner, &spec, &Sampling::Points(vec![(0.0, 0.0), (1.0, 0.0)])).unwrap();
        assert_eq!(t.rows[0][2], Cell::Num(1.0));
        assert!(matches!(t.rows[1][2], Cell::Num(v) if (v - (-1.0f64).exp()).abs() < 1e-15));
    }

    #[test]
    fn state_job_on_both_backends() {
        let mut s = settings(&[("family", "pssvs"), ("n", "3"), ("backend", "both")]);
        let out = run(&resolve(CommandKind::State, &mut s).unwrap()).unwrap();
        assert_eq!(out.tables.len(), 2);
        let cmp = out.comparison().unwrap();
        assert!(cmp["value"]["max_abs"].as_f64().unwrap() < 1e-9);
        assert!(out.cutoffs["oracle"].as_u64().is_some());
    }
}
