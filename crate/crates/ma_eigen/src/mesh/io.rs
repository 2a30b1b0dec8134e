//! Plain-text mesh format:
//!
//! ```text
//! nv nt
//! x y flag          (nv lines; flag 1 = boundary, 0 = interior)
//! i j k             (nt lines; 0-based vertex indices, counterclockwise)
//! ```

use std::fs;
use std::path::Path;

use super::{Point2, TriMesh};
use crate::error::{Error, Result};
use crate::io::fmt_f64;

pub fn save_mesh(mesh: &TriMesh, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", mesh.n_vertices(), mesh.triangles.len()));
    for (p, &b) in mesh.vertices.iter().zip(&mesh.boundary) {
        out.push_str(&format!("{} {} {}\n", fmt_f64(p.x), fmt_f64(p.y), u8::from(b)));
    }
    for tri in &mesh.triangles {
        out.push_str(&format!("{} {} {}\n", tri[0], tri[1], tri[2]));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn load_mesh(path: &Path) -> Result<TriMesh> {
    let text = fs::read_to_string(path)?;
    let mesh = parse_mesh(&text)?;
    mesh.validate()?;
    Ok(mesh)
}

fn parse_mesh(text: &str) -> Result<TriMesh> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::MeshFormat { line: 1, msg: "empty file".into() })?;
    let mut it = header.split_whitespace();
    let nv: usize = parse_token(it.next(), line_no, "vertex count")?;
    let nt: usize = parse_token(it.next(), line_no, "triangle count")?;
    if it.next().is_some() {
        return Err(Error::MeshFormat {
            line: line_no + 1,
            msg: "expected exactly two counts `nv nt`".into(),
        });
    }

    let mut vertices = Vec::with_capacity(nv);
    let mut boundary = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line_no, line) = lines.next().ok_or(Error::MeshFormat {
            line: 0,
            msg: format!("file ends before all {nv} vertices are read"),
        })?;
        let mut it = line.split_whitespace();
        let x: f64 = parse_token(it.next(), line_no, "x coordinate")?;
        let y: f64 = parse_token(it.next(), line_no, "y coordinate")?;
        let flag: u8 = parse_token(it.next(), line_no, "boundary flag")?;
        if flag > 1 {
            return Err(Error::MeshFormat {
                line: line_no + 1,
                msg: format!("boundary flag must be 0 or 1, got {flag}"),
            });
        }
        if it.next().is_some() {
            return Err(Error::MeshFormat {
                line: line_no + 1,
                msg: "expected `x y flag`".into(),
            });
        }
        vertices.push(Point2::new(x, y));
        boundary.push(flag == 1);
    }

    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (line_no, line) = lines.next().ok_or(Error::MeshFormat {
            line: 0,
            msg: format!("file ends before all {nt} triangles are read"),
        })?;
        let mut it = line.split_whitespace();
        let tri: [usize; 3] = [
            parse_token(it.next(), line_no, "vertex index")?,
            parse_token(it.next(), line_no, "vertex index")?,
            parse_token(it.next(), line_no, "vertex index")?,
        ];
        if it.next().is_some() {
            return Err(Error::MeshFormat { line: line_no + 1, msg: "expected `i j k`".into() });
        }
        for &v in &tri {
            if v >= nv {
                return Err(Error::MeshFormat {
                    line: line_no + 1,
                    msg: format!("vertex index {v} out of range (nv = {nv})"),
                });
            }
        }
        let [a, b, c] = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
        let twice = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if twice <= 0.0 {
            return Err(Error::MeshFormat {
                line: line_no + 1,
                msg: format!(
                    "triangle has non-positive area {:e}; vertices must be counterclockwise",
                    0.5 * twice
                ),
            });
        }
        triangles.push(tri);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::MeshFormat {
            line: line_no + 1,
            msg: "trailing content after the declared triangles".into(),
        });
    }
    TriMesh::new(vertices, triangles, boundary)
}

fn parse_token<T: std::str::FromStr>(
    token: Option<&str>,
    line_idx: usize,
    what: &str,
) -> Result<T> {
    let token = token.ok_or(Error::MeshFormat {
        line: line_idx + 1,
        msg: format!("missing {what}"),
    })?;
    token.parse().map_err(|_| Error::MeshFormat {
        line: line_idx + 1,
        msg: format!("cannot parse {what} from `{token}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_mesh, DomainSpec};

    #[test]
    fn parse_single_right_triangle() {
        let m = parse_mesh("3 1\n0 0 1\n1 0 1\n0 1 1\n0 1 2\n").unwrap();
        assert_eq!(m.triangle_area[0], 0.5);
        assert_eq!(m.h, f64::sqrt(2.0));
        assert!(m.boundary.iter().all(|&b| b));
    }

    #[test]
    fn out_of_range_index_names_line() {
        let err = parse_mesh("3 1\n0 0 1\n1 0 1\n0 1 1\n0 1 3\n").unwrap_err();
        match err {
            Error::MeshFormat { line, msg } => {
                assert_eq!(line, 5);
                assert!(msg.contains("out of range"), "{msg}");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn inverted_triangle_names_line() {
        let err = parse_mesh("3 1\n0 0 1\n1 0 1\n0 1 1\n0 2 1\n").unwrap_err();
        match err {
            Error::MeshFormat { line, .. } => assert_eq!(line, 5),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn malformed_counts() {
        assert!(parse_mesh("3\n").is_err());
        assert!(parse_mesh("x 1\n").is_err());
    }

    #[test]
    fn save_load_round_trip_is_bit_exact() {
        let mesh = generate_mesh(&DomainSpec::unit_disk(), 0.2).unwrap();
        let dir = std::env::temp_dir().join("ma_eigen_mesh_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("disk.msh");
        save_mesh(&mesh, &path).unwrap();
        let again = load_mesh(&path).unwrap();
        assert_eq!(mesh.triangles, again.triangles);
        assert_eq!(mesh.boundary, again.boundary);
        for (p, q) in mesh.vertices.iter().zip(&again.vertices) {
            assert!(p.x == q.x && p.y == q.y, "coordinates changed in round trip");
        }
        assert_eq!(mesh.h, again.h);
    }
}
