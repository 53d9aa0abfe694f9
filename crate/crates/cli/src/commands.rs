//! The five subcommands. Each returns a table plus the warnings collected
//! while building it.

use sabr_smile::mc::implied_vol_from_sample;
use sabr_smile::table1::table1_sweep;
use sabr_smile::{
    density_scan, i0, i1_hagan, implied_vol, log_moneyness, mc_triangle_price, simulate_terminal,
    smile, triangle_curve, FormulaKind, SabrError, TriangleSpec,
};

use crate::config::{FormulaChoice, RunConfig};
use crate::error::Result;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub table: Table,
    pub warnings: Vec<String>,
    /// Monte Carlo points whose price left the no-arbitrage band.
    pub out_of_band: usize,
}

impl Report {
    fn new(table: Table) -> Self {
        Self {
            table,
            ..Self::default()
        }
    }

    fn warn(&mut self, what: impl std::fmt::Display, err: &SabrError) {
        self.warnings.push(format!("{what}: {err}"));
    }
}

pub fn cmd_smile(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.params()?;
    let tau = cfg.tau()?;
    let strikes = cfg.strikes(p.forward());
    let kinds = cfg.formula.kinds();
    let vols: Vec<_> = kinds.iter().map(|&k| smile(k, &p, tau, &strikes)).collect();

    let columns: Vec<&str> = match cfg.formula {
        FormulaChoice::One(_) => vec!["strike", "x", "i0", "i1", "vol"],
        FormulaChoice::Both => vec![
            "strike",
            "x",
            "i1",
            "i0_hagan",
            "i0_berestycki",
            "vol_hagan",
            "vol_berestycki",
            "abs_diff",
        ],
    };
    let mut report = Report::new(Table::new(columns));
    for (j, &k) in strikes.iter().enumerate() {
        let x = log_moneyness(p.forward(), k)?;
        let i1 = i1_hagan(&p, k)?;
        let mut i0s = Vec::new();
        let mut vs = Vec::new();
        for (kind, col) in kinds.iter().zip(&vols) {
            i0s.push(Cell::from(i0(*kind, &p, k)));
            match &col[j] {
                Ok(pt) => vs.push(Some(pt.vol)),
                Err(e) => {
                    report.warn(format_args!("{kind} strike {k}"), e);
                    vs.push(None);
                }
            }
        }
        let row = match cfg.formula {
            FormulaChoice::One(_) => {
                vec![k.into(), x.into(), i0s.remove(0), i1.into(), vs[0].into()]
            }
            FormulaChoice::Both => {
                let diff = match (vs[0], vs[1]) {
                    (Some(a), Some(b)) => Some((a - b).abs()),
                    _ => None,
                };
                let mut row: Vec<Cell> = vec![k.into(), x.into(), i1.into()];
                row.append(&mut i0s);
                row.extend([vs[0].into(), vs[1].into(), diff.into()]);
                row
            }
        };
        report.table.push(row);
    }
    Ok(report)
}

pub fn cmd_triangle(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.params()?;
    let tau = cfg.tau()?;
    let peaks = cfg.peak_points();
    let width = cfg.units.triangle_width();
    let hagan = triangle_curve(FormulaKind::HaganA65, &p, tau, &peaks, width);
    let bbf = triangle_curve(FormulaKind::Berestycki, &p, tau, &peaks, width);

    let mut columns = vec!["peak", "price_hagan", "price_berestycki"];
    let sample = if cfg.mc_enabled {
        columns.extend(["mc_price", "mc_se"]);
        Some(simulate_terminal(&p, tau, &cfg.mc)?)
    } else {
        None
    };

    let mut report = Report::new(Table::new(columns));
    for ((peak, h), (_, b)) in hagan.iter().zip(&bbf) {
        for (kind, v) in [(FormulaKind::HaganA65, h), (FormulaKind::Berestycki, b)] {
            if let Err(e) = v {
                report.warn(format_args!("{kind} peak {peak}"), e);
            }
        }
        let mut row: Vec<Cell> = vec![(*peak).into(), h.clone().into(), b.clone().into()];
        if let Some(sample) = &sample {
            let spec = TriangleSpec::new(*peak, width)?;
            let est = mc_triangle_price(sample, &spec);
            row.extend([est.value.into(), est.std_error.into()]);
        }
        report.table.push(row);
    }
    Ok(report)
}

pub fn cmd_density(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.params()?;
    let tau = cfg.tau()?;
    let strikes = cfg.strikes(p.forward());
    let h = cfg.density_step(p.forward());
    let kinds = cfg.formula.kinds();
    let reports = kinds
        .iter()
        .map(|&k| density_scan(k, &p, tau, &strikes, h))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut columns = vec!["strike".to_string()];
    match cfg.formula {
        FormulaChoice::One(_) => columns.extend(["density".into(), "negative".into()]),
        FormulaChoice::Both => {
            for prefix in ["density", "negative"] {
                columns.extend(kinds.iter().map(|k| format!("{prefix}_{}", k.label())));
            }
        }
    }
    let mut report = Report::new(Table::new(columns));
    for (j, &k) in strikes.iter().enumerate() {
        let mut row: Vec<Cell> = vec![k.into()];
        row.extend(reports.iter().map(|r| Cell::from(r.density[j])));
        row.extend(reports.iter().map(|r| match r.density[j] {
            Some(d) => Cell::text(if d < -r.tol { "1" } else { "0" }),
            None => Cell::Empty,
        }));
        report.table.push(row);
    }
    for (kind, r) in kinds.iter().zip(&reports) {
        let failed = r.density.iter().filter(|d| d.is_none()).count();
        if failed > 0 {
            report
                .warnings
                .push(format!("{kind}: density undefined at {failed} strike(s)"));
        }
        for v in &r.violations {
            report.warnings.push(format!(
                "{kind}: negative density on [{}, {}], minimum {:e}",
                v.lo, v.hi, v.min_density
            ));
        }
    }
    Ok(report)
}

/// Compares formula vols with implied vols of one simulated sample.
pub fn cmd_mc_check(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.params()?;
    let tau = cfg.tau()?;
    let s = p.forward();
    let strikes = match cfg.grid {
        Some(g) => g.points(),
        None => vec![0.5 * s, s, 1.5 * s],
    };
    let kinds = cfg.formula.kinds();
    let sample = simulate_terminal(&p, tau, &cfg.mc)?;

    let columns: Vec<String> = match cfg.formula {
        FormulaChoice::One(_) => ["strike", "formula_vol", "mc_vol", "mc_se", "z_score"]
            .map(String::from)
            .to_vec(),
        FormulaChoice::Both => {
            let mut c = vec!["strike".to_string()];
            c.extend(kinds.iter().map(|k| format!("vol_{}", k.label())));
            c.extend(["mc_vol".to_string(), "mc_se".to_string()]);
            c.extend(kinds.iter().map(|k| format!("z_{}", k.label())));
            c
        }
    };
    let mut report = Report::new(Table::new(columns));
    if sample.absorbed > 0 {
        report.warnings.push(format!(
            "{} of {} paths absorbed at zero",
            sample.absorbed,
            sample.len()
        ));
    }
    for &k in &strikes {
        let formula: Vec<Option<f64>> = kinds
            .iter()
            .map(|&kind| match implied_vol(kind, &p, k, tau) {
                Ok(pt) => Some(pt.vol),
                Err(e) => {
                    report.warn(format_args!("{kind} strike {k}"), &e);
                    None
                }
            })
            .collect();
        let mc = match implied_vol_from_sample(&sample, s, k, tau) {
            Ok(est) => Some(est),
            Err(e) => {
                if matches!(e, SabrError::OutOfBand { .. }) {
                    report.out_of_band += 1;
                }
                report.warn(format_args!("mc strike {k}"), &e);
                None
            }
        };
        let mut row: Vec<Cell> = vec![k.into()];
        row.extend(formula.iter().map(|&v| Cell::from(v)));
        row.push(mc.map(|e| e.value).into());
        row.push(mc.map(|e| e.std_error).into());
        row.extend(formula.iter().map(|&v| match (v, mc) {
            (Some(v), Some(est)) => Cell::from(est.z_score(v)),
            _ => Cell::Empty,
        }));
        report.table.push(row);
    }
    Ok(report)
}

pub fn cmd_table1(cfg: &RunConfig) -> Result<Report> {
    let rows = table1_sweep(cfg.mc.seed, cfg.draws)?;
    let mut report = Report::new(Table::new([
        "row",
        "regime",
        "relation",
        "draws",
        "max_rel_diff",
        "frac_different",
    ]));
    for (i, r) in rows.iter().enumerate() {
        report.table.push(vec![
            Cell::text((i + 1).to_string()),
            Cell::text(r.regime.label()),
            Cell::text(if r.regime.expects_equality() {
                "="
            } else {
                "!="
            }),
            Cell::text(r.draws.to_string()),
            r.max_rel_diff.into(),
            r.frac_different.into(),
        ]);
    }
    Ok(report)
}
