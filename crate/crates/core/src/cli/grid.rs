//! `name=min:max:count` grids and `name=min:max` sampling boxes.

use super::CliError;
use crate::verifier::SampleBox;

pub const DEFAULT_MAX_POINTS: usize = 10_000_000;

const COORDS: [&str; 4] = ["t", "x", "y", "z"];

/// Inclusive, evenly spaced values per coordinate in `t, x, y, z` order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Vec<f64>>,
}

fn err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn num(s: &str, what: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| err(format!("{what}: `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(err(format!("{what}: `{s}` is not finite")));
    }
    Ok(v)
}

/// Splits `a=..,b=..` into one entry per coordinate of the equation.
fn split_spec<'a>(spec: &'a str, has_z: bool, kind: &str) -> Result<[Option<&'a str>; 4], CliError> {
    let mut out = [None; 4];
    for part in spec.split(',') {
        let (name, range) = part
            .split_once('=')
            .ok_or_else(|| err(format!("{kind} entry `{part}` must look like name=range")))?;
        let name = name.trim();
        let i = COORDS
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| err(format!("{kind}: unknown coordinate `{name}`")))?;
        if i == 3 && !has_z {
            return Err(err(format!("{kind}: this equation has no z coordinate")));
        }
        if out[i].replace(range).is_some() {
            return Err(err(format!("{kind}: coordinate `{name}` given twice")));
        }
    }
    Ok(out)
}

impl GridSpec {
    pub fn parse(spec: &str, has_z: bool, max_points: usize) -> Result<GridSpec, CliError> {
        let parts = split_spec(spec, has_z, "grid")?;
        let mut axes = Vec::new();
        let mut total: usize = 1;
        for (i, name) in COORDS.iter().enumerate().take(if has_z { 4 } else { 3 }) {
            let range = parts[i].ok_or_else(|| err(format!("grid: missing coordinate `{name}`")))?;
            let f: Vec<&str> = range.split(':').collect();
            if f.len() != 3 {
                return Err(err(format!("grid: `{name}={range}` must be min:max:count")));
            }
            let what = format!("grid {name}");
            let (lo, hi) = (num(f[0], &what)?, num(f[1], &what)?);
            let n: usize = f[2]
                .trim()
                .parse()
                .map_err(|_| err(format!("{what}: count `{}` is not a positive integer", f[2])))?;
            if n == 0 {
                return Err(err(format!("{what}: count must be at least 1")));
            }
            if lo > hi {
                return Err(err(format!("{what}: min {lo} exceeds max {hi}")));
            }
            total = total
                .checked_mul(n)
                .filter(|&t| t <= max_points)
                .ok_or_else(|| err(format!("grid has more than {max_points} points")))?;
            axes.push(
                (0..n)
                    .map(|j| {
                        if n == 1 {
                            lo
                        } else if j == n - 1 {
                            hi
                        } else {
                            lo + (hi - lo) * j as f64 / (n - 1) as f64
                        }
                    })
                    .collect(),
            );
        }
        Ok(GridSpec { axes })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in row-major order, the last coordinate varying fastest.
    pub fn points(&self) -> Vec<[f64; 4]> {
        let mut out = Vec::with_capacity(self.len());
        let mut idx = vec![0usize; self.axes.len()];
        if self.is_empty() {
            return out;
        }
        loop {
            let mut p = [0.0; 4];
            for (d, &i) in idx.iter().enumerate() {
                p[d] = self.axes[d][i];
            }
            out.push(p);
            let mut d = self.axes.len();
            loop {
                if d == 0 {
                    return out;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < self.axes[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }
}

/// `t=0:1,x=-1:1,y=0.2:2[,z=-1:1]`; missing coordinates keep the defaults.
pub fn parse_box(spec: &str, has_z: bool) -> Result<SampleBox, CliError> {
    let parts = split_spec(spec, has_z, "box")?;
    let mut r = default_ranges();
    for (i, name) in COORDS.iter().enumerate() {
        if let Some(range) = parts[i] {
            let f: Vec<&str> = range.split(':').collect();
            if f.len() != 2 {
                return Err(err(format!("box: `{name}={range}` must be min:max")));
            }
            let what = format!("box {name}");
            r[i] = (num(f[0], &what)?, num(f[1], &what)?);
        }
    }
    SampleBox::new(r[0], r[1], r[2], r[3]).map_err(|e| err(e.to_string()))
}

fn default_ranges() -> [(f64, f64); 4] {
    [(0.0, 1.0), (-1.0, 1.0), (-2.0, 2.0), (-2.0, 2.0)]
}

pub fn default_box() -> SampleBox {
    let r = default_ranges();
    SampleBox::new(r[0], r[1], r[2], r[3]).expect("default box is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let g = GridSpec::parse("t=0:0:1,x=0:2:3,y=0:2:3", false, DEFAULT_MAX_POINTS).unwrap();
        let p = g.points();
        assert_eq!(p.len(), 9);
        assert_eq!(p[0], [0.0, 0.0, 0.0, 0.0]);
        assert_eq!(p[1], [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(p[5], [0.0, 1.0, 2.0, 0.0]);
        assert_eq!(p[8], [0.0, 2.0, 2.0, 0.0]);
    }

    #[test]
    fn grid_rejections() {
        for bad in [
            "t=0:1:2,x=0:1:2",
            "t=0:1:2,x=0:1:2,y=0:1:0",
            "t=0:1:2,x=0:1:2,y=1:0:3",
            "t=0:1:2,x=0:1:2,y=0:1:2,z=0:1:2",
            "t=0:1:2,x=0:1:2,y=0:1",
            "t=0:1:2,x=0:1:2,y=0:a:2",
            "t=0:1:2,x=0:1:2,w=0:1:2",
            "t=0:1:2,t=0:1:2,y=0:1:2",
        ] {
            assert!(GridSpec::parse(bad, false, DEFAULT_MAX_POINTS).is_err(), "{bad}");
        }
        assert!(GridSpec::parse("t=0:1:100,x=0:1:100,y=0:1:100", false, 999_999).is_err());
        assert!(GridSpec::parse("t=0:1:100,x=0:1:100,y=0:1:100", false, 1_000_000).is_ok());
    }

    #[test]
    fn boxes() {
        let b = parse_box("t=0:2, y=0.5:1", false).unwrap();
        assert_eq!(b.t, (0.0, 2.0));
        assert_eq!(b.x, (-1.0, 1.0));
        assert_eq!(b.y, (0.5, 1.0));
        assert!(parse_box("z=0:1", false).is_err());
        assert!(parse_box("y=1:0", false).is_err());
    }
}
