use std::collections::BTreeMap;

use clap::Args;
use gbc_tin::{
    alpha_star, c1, c2, capacity_boundary, certify_scan, constant_gap_against, gap_constants, mi_exact_tin,
    mi_lb_user1, mi_lb_user2, pareto_frontier, snr_grid_db, uniform_alpha_grid, AchievableRegion, ChannelParams,
    GapBounds, GapReport, RatePoint, User,
};

use crate::config::{CommonArgs, Defaults, MethodArg, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

const CAPACITY_GRID: usize = 257;

pub const RATE_HEADERS: &[&str] = &[
    "scheme",
    "m1",
    "m2",
    "alpha",
    "ts_lambda",
    "r1",
    "r2",
    "method",
    "err_est",
];
pub const GAP_HEADERS: &[&str] = &[
    "snr1_db", "snr2_db", "case_tag", "m1", "m2", "alpha", "delta1", "delta2", "bound1", "bound2", "pass",
];
pub const FIG5_HEADERS: &[&str] = &["alpha", "c2", "mi_52", "mi_42", "mi_33"];
pub const FIG5_ORDERS: [(u32, u32); 3] = [(5, 2), (4, 2), (3, 3)];

fn rate_row(p: &RatePoint<f64>) -> Vec<Cell> {
    vec![
        Cell::text(p.scheme.label()),
        Cell::Int(p.m1.into()),
        Cell::Int(p.m2.into()),
        Cell::Num(p.alpha),
        Cell::opt(p.ts_lambda),
        Cell::Num(p.r1),
        Cell::Num(p.r2),
        Cell::text(p.method.label()),
        Cell::Num(p.err_est),
    ]
}

fn gap_row(r: &GapReport<f64>) -> Vec<Cell> {
    vec![
        Cell::Num(r.snr1_db),
        Cell::Num(r.snr2_db),
        Cell::text(r.case_tag.label()),
        Cell::Int(r.m1.into()),
        Cell::Int(r.m2.into()),
        Cell::Num(r.alpha),
        Cell::Num(r.delta1),
        Cell::Num(r.delta2),
        Cell::Num(r.bound1),
        Cell::Num(r.bound2),
        Cell::Bool(r.pass),
    ]
}

/// Rate points, Pareto frontier and capacity boundary at one SNR pair.
pub fn region(args: &CommonArgs) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(
        args,
        Defaults {
            snr1_db: 22.0,
            snr2_db: 12.0,
            alpha_grid_size: 64,
        },
    )?;
    let ch = ChannelParams::new(cfg.snr1, cfg.snr2)?;
    let mode = cfg.rate_mode();
    let region = AchievableRegion::build(&ch, cfg.alpha_grid_size, &mode)?;

    let mut points: Vec<RatePoint<f64>> = region.sweep.generators().to_vec();
    for g in region.ts.generators() {
        if !points.iter().any(|p| (p.m1, p.m2, p.alpha) == (g.m1, g.m2, g.alpha)) {
            points.push(g.clone());
        }
    }
    points.extend(region.ts.ts_combinations(cfg.lambda_grid_size));
    let frontier = pareto_frontier(&points);

    let mut rates = Table::new("rate_points", RATE_HEADERS);
    points.iter().for_each(|p| rates.push(rate_row(p)));
    let mut front = Table::new("frontier", RATE_HEADERS);
    frontier.iter().for_each(|p| front.push(rate_row(p)));
    let mut cap = Table::new("capacity", &["alpha", "c1", "c2"]);
    for c in capacity_boundary(ch.snr1(), ch.snr2(), &uniform_alpha_grid(CAPACITY_GRID))? {
        cap.push(vec![Cell::Num(c.alpha), Cell::Num(c.c1), Cell::Num(c.c2)]);
    }
    for t in [&rates, &front, &cap] {
        let path = t.write(&cfg.out_dir, cfg.format)?;
        println!("wrote {} ({} rows)", path.display(), t.rows.len());
    }

    let bounds = GapBounds::default();
    let s = constant_gap_against(&region, &ch, CAPACITY_GRID, &bounds)?;
    println!(
        "constant gap (N1={}, N2={}): worst boundary shift ({:.4}, {:.4}) bits at alpha={:.4}; allowed ({:.3}, {:.3}); {}",
        ch.n1(),
        ch.n2(),
        s.worst_gap1,
        s.worst_gap2,
        s.worst_alpha,
        bounds.total1,
        bounds.total2,
        if s.pass { "PASS" } else { "FAIL" }
    );
    Ok(s.pass)
}

#[derive(Debug, Clone, Args)]
pub struct GapScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    pub snr1_min_db: f64,
    #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
    pub snr1_max_db: f64,
    #[arg(long, default_value_t = 1.0)]
    pub step_db: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub snr2_min_db: f64,
    /// Multiplies every threshold; exercises the failure path.
    #[arg(long, hide = true)]
    pub bound_scale: Option<f64>,
}

/// Closed-form certification over an SNR grid. Returns whether every row passes.
pub fn gap_scan(args: &GapScanArgs) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(
        &args.common,
        Defaults {
            snr1_db: 22.0,
            snr2_db: 12.0,
            alpha_grid_size: 64,
        },
    )?;
    let mut bounds = GapBounds::default();
    if let Some(f) = args.bound_scale {
        bounds = bounds.scaled(f);
    }
    let pairs = snr_grid_db(args.snr1_min_db, args.snr1_max_db, args.step_db, args.snr2_min_db)?;
    if pairs.is_empty() {
        eprintln!("warning: SNR ranges do not intersect; writing an empty report");
    }
    let rows = certify_scan(&pairs, cfg.alpha_grid_size, cfg.lambda_grid_size, &bounds)?;

    let mut table = Table::new("gap_report", GAP_HEADERS);
    rows.iter().for_each(|r| table.push(gap_row(r)));
    let path = table.write(&cfg.out_dir, cfg.format)?;

    let mut by_tag: BTreeMap<&str, (usize, usize, f64)> = BTreeMap::new();
    for r in &rows {
        let e = by_tag.entry(r.case_tag.label()).or_insert((0, 0, f64::INFINITY));
        e.0 += 1;
        e.1 += usize::from(!r.pass);
        e.2 = e.2.min((r.bound1 - r.delta1).min(r.bound2 - r.delta2));
    }
    println!(
        "wrote {} ({} rows, {} channels)",
        path.display(),
        rows.len(),
        pairs.len()
    );
    for (tag, (n, fail, margin)) in &by_tag {
        println!("{tag:<18} rows={n:<6} violations={fail:<4} min margin={margin:.4}");
    }
    let failures = rows.iter().filter(|r| !r.pass).count();
    if failures > 0 {
        eprintln!("{failures} violation(s)");
    }
    Ok(failures == 0)
}

/// User 2's rate against `C₂(α)` over `α ∈ [0, 1]` for three order pairs.
pub fn fig5(args: &CommonArgs) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(
        args,
        Defaults {
            snr1_db: 20.0,
            snr2_db: 10.0,
            alpha_grid_size: 101,
        },
    )?;
    let ch = ChannelParams::new(cfg.snr1, cfg.snr2)?;
    let method = cfg.method();
    let mut table = Table::new("fig5", FIG5_HEADERS);
    for alpha in uniform_alpha_grid::<f64>(cfg.alpha_grid_size) {
        let mut row = vec![Cell::Num(alpha), Cell::Num(c2(alpha, ch.snr2())?)];
        for (m1, m2) in FIG5_ORDERS {
            let r = match cfg.mi_method {
                MethodArg::Lb if alpha < 1.0 => mi_lb_user2(alpha, ch.snr2(), m2)?,
                MethodArg::Lb => 0.0,
                _ => mi_exact_tin(User::Weak, &ch, alpha, m1, m2, &method)?.value,
            };
            row.push(Cell::Num(r));
        }
        table.push(row);
    }
    let path = table.write(&cfg.out_dir, cfg.format)?;
    println!("wrote {} ({} rows)", path.display(), table.rows.len());
    Ok(true)
}

pub fn constants() -> Result<bool, CliError> {
    println!("{:<20} {:>20} {:>8} {:>10}", "name", "recomputed", "quoted", "|diff|");
    let mut ok = true;
    for c in gap_constants() {
        println!(
            "{:<20} {:>20.16} {:>8.3} {:>10.2e}",
            c.name,
            c.value,
            c.quoted,
            c.abs_diff()
        );
        ok &= c.abs_diff() <= 1e-3;
    }
    Ok(ok)
}

#[derive(Debug, Clone, Args)]
pub struct MiArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub m1: u32,
    #[arg(long)]
    pub m2: u32,
    #[arg(long)]
    pub alpha: f64,
}

/// Both users' rates, lower bounds and Gaussian rates at a single operating point.
pub fn mi(args: &MiArgs) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(
        &args.common,
        Defaults {
            snr1_db: 22.0,
            snr2_db: 12.0,
            alpha_grid_size: 64,
        },
    )?;
    let ch = ChannelParams::new(cfg.snr1, cfg.snr2)?;
    let (m1, m2, alpha) = (args.m1, args.m2, args.alpha);
    let method = cfg.method();
    let below_star = m1 >= 2 && alpha > 0.0 && alpha <= alpha_star::<f64>(m1, m2).unwrap_or(1.0);
    let lb1 = below_star.then(|| mi_lb_user1(alpha, ch.snr1(), m1, m2)).transpose()?;
    let lb2 = (m2 >= 2 && alpha < 1.0)
        .then(|| mi_lb_user2(alpha, ch.snr2(), m2))
        .transpose()?;
    println!("user,m1,m2,alpha,mi,err_est,method,lower_bound,gaussian_rate");
    for (user, lb, cap) in [
        (User::Strong, lb1, c1(alpha, ch.snr1())?),
        (User::Weak, lb2, c2(alpha, ch.snr2())?),
    ] {
        let e = mi_exact_tin(user, &ch, alpha, m1, m2, &method)?;
        println!(
            "{},{m1},{m2},{},{},{},{},{},{}",
            user.index(),
            crate::output::format_num(alpha),
            crate::output::format_num(e.value),
            crate::output::format_num(e.err_est),
            e.method.label(),
            lb.map(crate::output::format_num).unwrap_or_default(),
            crate::output::format_num(cap),
        );
    }
    Ok(true)
}
