use std::fmt::Write as _;
use std::path::Path;

use super::records::{summarize, SweepRecord};
use crate::error::{Error, Result};

/// A matplotlib script with the geometric means embedded. Convergence
/// sweeps plot error against N with one panel per function; tolerance
/// sweeps (a single N) plot error against the tolerance, one line per
/// solver.
pub fn plot_script(records: &[SweepRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::invalid("no records to plot"));
    }
    let cells = summarize(records);
    let tolerance_study = cells.iter().all(|c| c.n == cells[0].n) && tolerance_of(&cells[0].solver).is_some();

    let mut panels: Vec<(String, Vec<(String, Vec<(f64, f64)>)>)> = Vec::new();
    for c in &cells {
        let Some(gm) = c.geometric_mean else { continue };
        let (series, x) = if tolerance_study {
            let name = c.solver.split(':').next().unwrap_or(&c.solver);
            (format!("{} {}", c.strategy, name), tolerance_of(&c.solver).unwrap_or(f64::NAN))
        } else if c.solver == "none" {
            (c.strategy.clone(), c.n as f64)
        } else {
            (format!("{} ({})", c.strategy, c.solver), c.n as f64)
        };
        let panel = match panels.iter().position(|(f, _)| *f == c.function) {
            Some(i) => i,
            None => {
                panels.push((c.function.clone(), Vec::new()));
                panels.len() - 1
            }
        };
        let lines = &mut panels[panel].1;
        match lines.iter_mut().find(|(s, _)| *s == series) {
            Some((_, pts)) => pts.push((x, gm)),
            None => lines.push((series, vec![(x, gm)])),
        }
    }

    let mut s = String::new();
    s.push_str("import matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\n");
    s.push_str("# geometric-mean L2 error per series\nPANELS = [\n");
    for (function, lines) in &panels {
        writeln!(s, "    ({function:?}, [").unwrap();
        for (series, pts) in lines {
            let xs: Vec<String> = pts.iter().map(|p| format!("{:e}", p.0)).collect();
            let ys: Vec<String> = pts.iter().map(|p| format!("{:.6e}", p.1)).collect();
            writeln!(s, "        ({series:?}, [{}], [{}]),", xs.join(", "), ys.join(", ")).unwrap();
        }
        s.push_str("    ]),\n");
    }
    s.push_str("]\n\n");
    writeln!(s, "TOLERANCE_STUDY = {}\n", if tolerance_study { "True" } else { "False" }).unwrap();
    s.push_str(
        r#"fig, axes = plt.subplots(1, len(PANELS), figsize=(5 * len(PANELS), 4), squeeze=False)
for ax, (function, lines) in zip(axes[0], PANELS):
    for label, xs, ys in lines:
        ax.plot(xs, ys, marker="o", label=label)
    ax.set_yscale("log")
    if TOLERANCE_STUDY:
        ax.set_xscale("log")
        ax.set_xlabel("tolerance")
    else:
        ax.set_xlabel("N")
    ax.set_ylabel("L2 error")
    ax.set_title(function)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
fig.tight_layout()
fig.savefig(__file__.rsplit(".", 1)[0] + ".png", dpi=150)
"#,
    );
    Ok(s)
}

fn tolerance_of(solver: &str) -> Option<f64> {
    solver.split_once(':')?.1.parse().ok()
}

pub fn emit_plot_script(records: &[SweepRecord], path: &Path) -> Result<()> {
    std::fs::write(path, plot_script(records)?)?;
    Ok(())
}
