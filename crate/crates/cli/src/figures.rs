//! Datasets behind the eight published plots, with pinned defaults.

use ggm_core::roof::families::{
    qudit_sectors, rank2_parity, rank3_gghz, rank3_gghz_slice, rank3_ghz_d1_dn1, rank3_ghz_w,
    rank5_five_qubit, zeta_slice,
};
use ggm_core::roof::{ggm_mixed, simplex_grid, MixedOptions, TwirledFamily};
use ggm_core::Result;

pub struct FigureDefaults {
    pub figure: u8,
    pub family: &'static str,
    pub grid: usize,
    pub alpha: Option<f64>,
    pub r: &'static [f64],
}

/// Default parameters per figure. N = 3 for figure 1 is an arbitrary pick since
/// the curve does not depend on N; grids are 201 points in 1D and 101 per axis in 2D.
pub const DEFAULTS: [FigureDefaults; 8] = [
    FigureDefaults { figure: 1, family: "rank2_parity(n=3)", grid: 201, alpha: None, r: &[] },
    FigureDefaults { figure: 2, family: "rank3_ghz_w", grid: 101, alpha: None, r: &[] },
    FigureDefaults { figure: 3, family: "rank3_gghz", grid: 101, alpha: Some(0.55), r: &[] },
    FigureDefaults { figure: 4, family: "rank3_gghz_slice", grid: 201, alpha: Some(0.55), r: &[0.96, 0.98] },
    FigureDefaults { figure: 5, family: "rank3_ghz_d1_dn1(n=5)", grid: 101, alpha: None, r: &[] },
    FigureDefaults { figure: 6, family: "rank5_five_qubit", grid: 101, alpha: None, r: &[] },
    FigureDefaults { figure: 7, family: "zeta_slice", grid: 101, alpha: None, r: &[] },
    FigureDefaults { figure: 8, family: "qudit_sectors(dims=[3,3,3])", grid: 101, alpha: None, r: &[] },
];

pub struct FigureArgs {
    pub grid: Option<usize>,
    pub alpha: Option<f64>,
    pub r: Vec<f64>,
    pub seed: u64,
}

fn surface_csv(family: &TwirledFamily, grid: &[Vec<f64>], seed: u64) -> Result<String> {
    let opts = MixedOptions { seed, ..Default::default() };
    Ok(ggm_mixed(family, grid, opts)?.to_csv())
}

/// CSV for figure `k`.
pub fn figure_csv(k: u8, args: &FigureArgs) -> Result<String> {
    let d = &DEFAULTS[usize::from(k) - 1];
    let n = args.grid.unwrap_or(d.grid);
    let alpha = args.alpha.or(d.alpha).unwrap_or(0.55);
    match k {
        1 => surface_csv(&rank2_parity(3)?, &simplex_grid(1, n)?, args.seed),
        4 => {
            let rs = if args.r.is_empty() { d.r.to_vec() } else { args.r.clone() };
            let grid = simplex_grid(1, n)?;
            let mut out = String::new();
            for (i, r) in rs.iter().enumerate() {
                let csv = surface_csv(&rank3_gghz_slice(alpha, *r)?, &grid, args.seed)?;
                let mut lines = csv.lines();
                let header = lines.next().unwrap_or_default();
                if i == 0 {
                    out.push_str("r,");
                    out.push_str(header);
                    out.push('\n');
                }
                for line in lines {
                    out.push_str(&format!("{r},{line}\n"));
                }
            }
            Ok(out)
        }
        _ => {
            let family = match k {
                2 => rank3_ghz_w()?,
                3 => rank3_gghz(alpha)?,
                5 => rank3_ghz_d1_dn1(5)?,
                6 => rank5_five_qubit()?,
                7 => zeta_slice()?,
                _ => qudit_sectors(&[3, 3, 3])?,
            };
            surface_csv(&family, &simplex_grid(2, n)?, args.seed)
        }
    }
}
