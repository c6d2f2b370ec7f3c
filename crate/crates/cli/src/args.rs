//! Parsing of command-line domain specifications.

use lame_spectrum::{Domain, Domain2D, Error, Result};

fn numbers(s: &str, sep: char) -> Result<Vec<f64>> {
    s.split(sep)
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("'{v}' is not a number")))
        })
        .collect()
}

/// `disk:R`, `rect:LX,LY`, `square:L`, `ellipse:A,B`, `polygon:x,y;x,y;...`
/// or `interval:L`.
pub fn parse_domain(spec: &str) -> Result<Domain> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidInput(format!("domain '{spec}' must look like kind:values")))?;
    let d = match kind.trim().to_ascii_lowercase().as_str() {
        "interval" => {
            let v = numbers(rest, ',')?;
            return match v[..] {
                [length] if length > 0.0 => Ok(Domain::Interval { length }),
                _ => Err(Error::InvalidInput(format!("interval needs one positive length, got '{rest}'"))),
            };
        }
        "disk" => match numbers(rest, ',')?[..] {
            [radius] => Domain2D::Disk { radius },
            _ => return Err(Error::InvalidInput("disk needs a radius".into())),
        },
        "square" => match numbers(rest, ',')?[..] {
            [l] => Domain2D::Rectangle { lx: l, ly: l },
            _ => return Err(Error::InvalidInput("square needs a side length".into())),
        },
        "rect" | "rectangle" => match numbers(rest, ',')?[..] {
            [lx, ly] => Domain2D::Rectangle { lx, ly },
            _ => return Err(Error::InvalidInput("rect needs LX,LY".into())),
        },
        "ellipse" => match numbers(rest, ',')?[..] {
            [a, b] => Domain2D::Ellipse { a, b },
            _ => return Err(Error::InvalidInput("ellipse needs A,B".into())),
        },
        "polygon" => {
            let vertices = rest
                .split(';')
                .map(|pair| match numbers(pair, ',')?[..] {
                    [x, y] => Ok([x, y]),
                    _ => Err(Error::InvalidInput(format!("bad polygon vertex '{pair}'"))),
                })
                .collect::<Result<Vec<_>>>()?;
            Domain2D::Polygon { vertices }
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown domain kind '{other}' (use disk, square, rect, ellipse, polygon or interval)"
            )))
        }
    };
    d.validate()?;
    Ok(Domain::Planar(d))
}
