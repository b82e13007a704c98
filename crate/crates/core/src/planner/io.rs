use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// One row of a waypoint or neighbourhood instance (`id,x,y,z[,radius]`).
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRow {
    pub id: String,
    pub pos: Vec3<f64>,
    pub radius: Option<f64>,
}

/// Parses an instance CSV. A header row starting with `id` is skipped, as are
/// blank lines and `#` comments.
pub fn parse_instance_csv(text: &str) -> Result<Vec<InstanceRow>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if lineno == 0 && cols[0].eq_ignore_ascii_case("id") {
            continue;
        }
        let key = format!("line {}", lineno + 1);
        if cols.len() != 4 && cols.len() != 5 {
            return Err(Error::parse(key, "expected id,x,y,z[,radius]"));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(key.clone(), format!("bad number `{s}`")))
        };
        let pos = Vec3::new(num(cols[1])?, num(cols[2])?, num(cols[3])?);
        let radius = if cols.len() == 5 {
            let r = num(cols[4])?;
            if r < 0.0 {
                return Err(Error::parse(key, "radius must be non-negative"));
            }
            Some(r)
        } else {
            None
        };
        out.push(InstanceRow { id: cols[0].to_string(), pos, radius });
    }
    if out.is_empty() {
        return Err(Error::parse("instance", "no rows"));
    }
    Ok(out)
}

/// `position,id` rows of a visiting order followed by a `length` row.
pub fn tour_csv(rows: &[InstanceRow], order: &[usize], length: f64) -> String {
    let mut s = String::from("position,id\n");
    for (k, &i) in order.iter().enumerate() {
        s.push_str(&format!("{k},{}\n", rows[i].id));
    }
    s.push_str(&format!("length,{length}\n"));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rows() {
        let rows = parse_instance_csv("id,x,y,z,radius\na,0,0,100,5\nb,1,2,3,0\n").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].radius, Some(5.0));
        let rows = parse_instance_csv("p,1,2,3\n").unwrap();
        assert_eq!(rows[0].radius, None);
        assert!(parse_instance_csv("a,1,2\n").is_err());
        assert!(parse_instance_csv("a,1,x,3\n").is_err());
        assert!(parse_instance_csv("").is_err());
    }

    #[test]
    fn tour_output() {
        let rows = parse_instance_csv("a,0,0,0\nb,1,0,0\n").unwrap();
        assert_eq!(tour_csv(&rows, &[1, 0], 2.0), "position,id\n0,b\n1,a\nlength,2\n");
    }
}
