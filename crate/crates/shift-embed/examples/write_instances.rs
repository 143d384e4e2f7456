//! Writes the bundled instances as documents into the directory given as the argument.

use std::{env, fs, path::PathBuf};

use shift_embed::instances::{even_labeling, even_shift, golden_mean, no_descent, odd_shift, ti_channel, two_fixed_points};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(env::args().nth(1).unwrap_or_else(|| "instances".into()));
    fs::create_dir_all(&dir)?;
    let (ti_x, ti_pi) = ti_channel();
    let (even_x, even_pi) = even_labeling();
    let shifts = [
        ("golden_mean", golden_mean()),
        ("even", even_shift()),
        ("odd", odd_shift()),
        ("no_descent", no_descent()),
        ("two_fixed_points", two_fixed_points()),
        ("ti_x", ti_x),
        ("even_labeling_x", even_x),
    ];
    for (name, p) in shifts {
        fs::write(dir.join(format!("{name}.shift")), p.to_json(true) + "\n")?;
    }
    for (name, c) in [("ti_pi", ti_pi), ("even_labeling_pi", even_pi)] {
        fs::write(dir.join(format!("{name}.code")), c.to_json() + "\n")?;
    }
    Ok(())
}
