use crate::error::{Error, Result};

/// `printf("%.12g")`.
pub fn g12(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mant), exp.abs())
    } else {
        trim(&format!("{:.*}", (11 - exp) as usize, v)).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header plus rows of numbers, `%.12g` formatted.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|v| g12(*v))).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Comma-separated values or `start:stop:count`; `max` stands for `top`.
pub fn parse_grid(spec: &str, top: f64) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        let t = t.trim();
        if t == "max" {
            return Ok(top);
        }
        t.parse::<f64>().map_err(|_| Error::Parse(format!("bad grid value '{t}'")))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (num(start)?, num(stop)?);
            let n: usize = count.trim().parse().map_err(|_| Error::Parse(format!("bad grid count '{count}'")))?;
            if n == 0 {
                return Err(Error::Parse("grid count must be positive".into()));
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(Error::Parse(format!("bad grid '{spec}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(g12(0.0), "0");
        assert_eq!(g12(1.0), "1");
        assert_eq!(g12(3.82842712474619), "3.82842712475");
        assert_eq!(g12(-0.125), "-0.125");
        assert_eq!(g12(1.5e-5), "1.5e-05");
        assert_eq!(g12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(g12(1e-4), "0.0001");
        assert_eq!(g12(1.0 / 3.0), "0.333333333333");
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0,0.5,1", 2.0).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0:max:3", 2.0).unwrap(), vec![0.0, 1.0, 2.0]);
        assert!(parse_grid("a,b", 1.0).is_err());
        assert!(parse_grid("0:1:0", 1.0).is_err());
    }

    #[test]
    fn table_layout() {
        let t = csv_table(&["alpha", "value"], &[vec![0.0, 1.0], vec![0.5, 2.25]]).unwrap();
        assert_eq!(t, "alpha,value\n0,1\n0.5,2.25\n");
    }
}
