//! Textual specs for domains and boundary data, e.g. `star(1, 0.3, 5)`.

use cmc_core::{Domain, Vec2};

use crate::error::CliError;

fn split_call(spec: &str) -> Result<(String, Vec<f64>), CliError> {
    let spec = spec.trim();
    let bad = |m: &str| CliError::Config(format!("bad spec `{spec}`: {m}"));
    let (name, args) = match spec.find('(') {
        None => (spec, ""),
        Some(open) => {
            let inner = spec[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| bad("missing `)`"))?;
            (&spec[..open], inner)
        }
    };
    let args = args
        .split(',')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(|a| a.parse::<f64>().map_err(|_| bad(&format!("`{a}` is not a number"))))
        .collect::<Result<Vec<_>, _>>()?;
    if args.iter().any(|a| !a.is_finite()) {
        return Err(bad("arguments must be finite"));
    }
    Ok((name.trim().to_ascii_lowercase(), args))
}

/// Parses a domain spec:
///
/// * `unit_disk`, `disk(r)`, `disk(cx, cy, r)`
/// * `rectangle(w, h)` centered at the origin, `rectangle(x0, y0, w, h)`
/// * `ellipse(a, b)`, `rounded_rectangle(w, h, r)`
/// * `star` (= `star(1, 0.3, 5)`), `star(base, amplitude, lobes)`
/// * `polygon(x1, y1, x2, y2, ...)`, counterclockwise
pub fn parse_domain(spec: &str) -> Result<Domain, CliError> {
    let (name, a) = split_call(spec)?;
    let arity = |n: &[usize]| {
        if n.contains(&a.len()) {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "`{name}` takes {n:?} arguments, got {}",
                a.len()
            )))
        }
    };
    let domain = match name.as_str() {
        "unit_disk" => {
            arity(&[0])?;
            Ok(Domain::unit_disk())
        }
        "disk" => {
            arity(&[1, 3])?;
            match a[..] {
                [r] => Domain::disk(Vec2::ZERO, r),
                [cx, cy, r] => Domain::disk(Vec2::new(cx, cy), r),
                _ => unreachable!(),
            }
        }
        "rectangle" => {
            arity(&[2, 4])?;
            match a[..] {
                [w, h] => Domain::rectangle(Vec2::new(-0.5 * w, -0.5 * h), w, h),
                [x, y, w, h] => Domain::rectangle(Vec2::new(x, y), w, h),
                _ => unreachable!(),
            }
        }
        "ellipse" => {
            arity(&[2])?;
            Domain::ellipse(a[0], a[1])
        }
        "rounded_rectangle" => {
            arity(&[3])?;
            Domain::rounded_rectangle(a[0], a[1], a[2])
        }
        "star" => {
            arity(&[0, 3])?;
            if a.is_empty() {
                Domain::polar_star(1.0, 0.3, 5)
            } else {
                if a[2].fract() != 0.0 || a[2] < 1.0 {
                    return Err(CliError::Config(format!("star lobes must be a positive integer, got {}", a[2])));
                }
                Domain::polar_star(a[0], a[1], a[2] as u32)
            }
        }
        "polygon" => {
            if a.len() < 6 || a.len() % 2 != 0 {
                return Err(CliError::Config("polygon needs at least three (x, y) pairs".into()));
            }
            Domain::polygon(a.chunks(2).map(|c| Vec2::new(c[0], c[1])).collect())
        }
        other => return Err(CliError::Config(format!("unknown domain `{other}`"))),
    };
    domain.map_err(|e| CliError::Config(format!("invalid domain `{spec}`: {e}")))
}

/// Boundary data: `zero`, `constant(c)` or `affine(a, b, c)` for `a·x + b·y + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryData {
    Affine { a: f64, b: f64, c: f64 },
}

impl BoundaryData {
    pub fn eval(&self, p: Vec2) -> f64 {
        let BoundaryData::Affine { a, b, c } = *self;
        a * p.x + b * p.y + c
    }
}

pub fn parse_boundary_data(spec: &str) -> Result<BoundaryData, CliError> {
    let (name, a) = split_call(spec)?;
    let (a, b, c) = match (name.as_str(), &a[..]) {
        ("zero", []) => (0.0, 0.0, 0.0),
        ("constant", [c]) => (0.0, 0.0, *c),
        ("affine", [a, b, c]) => (*a, *b, *c),
        _ => return Err(CliError::Config(format!("bad boundary data `{spec}`"))),
    };
    Ok(BoundaryData::Affine { a, b, c })
}
