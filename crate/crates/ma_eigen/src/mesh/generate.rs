//! Quasi-uniform isotropic triangulation of disks and superellipses: a polar ring
//! template mapped onto the domain, Delaunay triangulation, one Lloyd smoothing
//! pass of the interior vertices, and a final Delaunay rebuild.

use std::f64::consts::TAU;

use super::{DomainSpec, Point2, TriMesh};
use crate::error::{Error, Result};

/// Generates a conforming triangulation whose longest edge is close to `target_h`.
/// Boundary vertices lie on the exact domain curve; the computational domain is
/// the inscribed polygon.
pub fn generate_mesh(domain: &DomainSpec, target_h: f64) -> Result<TriMesh> {
    domain.validate()?;
    if !(target_h > 0.0) {
        return Err(Error::Invalid(format!("target h must be positive, got {target_h}")));
    }
    // Ring spacing matches the target along the most bulged direction of the
    // domain; the longest edges of the template are the fan diagonals where the
    // per-ring point count jumps, up to ~1.4x the spacing.
    let p = domain.exponent;
    let bulge = domain.radius_param * f64::powf(2.0, ((p - 2.0) / (2.0 * p)).max(0.0));
    let rings = (bulge / target_h).round() as usize;
    if rings < 2 {
        return Err(Error::InfeasibleResolution(format!(
            "target h = {target_h} gives a boundary polygon with {} segments (need >= 8); \
             use h <= {}",
            6 * rings.max(1),
            domain.radius_param / 1.5
        )));
    }

    let (points, n_boundary) = ring_template(domain, rings);
    let triangles = delaunay(&points);
    let points = lloyd_pass(&points, &triangles, points.len() - n_boundary);
    let triangles = delaunay(&points);

    let nv = points.len();
    let mut boundary = vec![false; nv];
    for flag in boundary.iter_mut().skip(nv - n_boundary) {
        *flag = true;
    }
    let mesh = TriMesh::new(points, canonical_order(triangles), boundary)?;
    mesh.validate()?;
    Ok(mesh)
}

/// Center point plus `rings` concentric rings with 6i points each, mapped along
/// rays onto the domain; the outermost ring is the boundary polygon. Keeping all
/// rings in phase aligns one spoke per sextant, which is what bounds the
/// ring-to-ring diagonals.
fn ring_template(domain: &DomainSpec, rings: usize) -> (Vec<Point2>, usize) {
    let mut points = vec![domain.center];
    for i in 1..=rings {
        let m = 6 * i;
        let t = i as f64 / rings as f64;
        for j in 0..m {
            let theta = TAU * j as f64 / m as f64;
            let rho = t * domain.boundary_radius(theta);
            points.push(Point2::new(
                domain.center.x + rho * theta.cos(),
                domain.center.y + rho * theta.sin(),
            ));
        }
    }
    (points, 6 * rings)
}

/// One Jacobi-style Lloyd step: every interior vertex (index < `n_interior`) moves
/// to the area-weighted centroid of its triangle patch.
fn lloyd_pass(points: &[Point2], triangles: &[[usize; 3]], n_interior: usize) -> Vec<Point2> {
    let mut weight = vec![0.0; points.len()];
    let mut cx = vec![0.0; points.len()];
    let mut cy = vec![0.0; points.len()];
    for tri in triangles {
        let [a, b, c] = [points[tri[0]], points[tri[1]], points[tri[2]]];
        let area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).abs();
        let gx = (a.x + b.x + c.x) / 3.0;
        let gy = (a.y + b.y + c.y) / 3.0;
        for &v in tri {
            weight[v] += area;
            cx[v] += area * gx;
            cy[v] += area * gy;
        }
    }
    let mut out = points.to_vec();
    for v in 0..n_interior {
        if weight[v] > 0.0 {
            out[v] = Point2::new(cx[v] / weight[v], cy[v] / weight[v]);
        }
    }
    out
}

struct DelaunayTri {
    v: [usize; 3],
    cc: Point2,
    r_sq: f64,
}

impl DelaunayTri {
    fn new(v: [usize; 3], pts: &[Point2]) -> Self {
        let (cc, r_sq) = circumcircle(pts[v[0]], pts[v[1]], pts[v[2]]);
        DelaunayTri { v, cc, r_sq }
    }

    fn contains_in_circumcircle(&self, p: Point2) -> bool {
        let dx = p.x - self.cc.x;
        let dy = p.y - self.cc.y;
        // strict containment; cocircular ties count as outside so the cavity
        // stays well defined
        dx * dx + dy * dy < self.r_sq * (1.0 - 1e-12)
    }
}

fn circumcircle(a: Point2, b: Point2, c: Point2) -> (Point2, f64) {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d.abs() < 1e-300 {
        return (Point2::new(0.0, 0.0), f64::MAX);
    }
    let aa = a.x * a.x + a.y * a.y;
    let bb = b.x * b.x + b.y * b.y;
    let cc = c.x * c.x + c.y * c.y;
    let ux = (aa * (b.y - c.y) + bb * (c.y - a.y) + cc * (a.y - b.y)) / d;
    let uy = (aa * (c.x - b.x) + bb * (a.x - c.x) + cc * (b.x - a.x)) / d;
    let center = Point2::new(ux, uy);
    (center, (center.x - a.x).powi(2) + (center.y - a.y).powi(2))
}

/// Bowyer-Watson with a super-triangle; deterministic for a fixed point order.
/// The input point set is in convex position plus interior points, so the result
/// triangulates the convex hull (the inscribed boundary polygon).
fn delaunay(points: &[Point2]) -> Vec<[usize; 3]> {
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in points {
        lo_x = lo_x.min(p.x);
        lo_y = lo_y.min(p.y);
        hi_x = hi_x.max(p.x);
        hi_y = hi_y.max(p.y);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1.0);
    let mid = Point2::new(0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y));
    let n = points.len();
    let mut pts = points.to_vec();
    pts.push(Point2::new(mid.x - 30.0 * span, mid.y - 20.0 * span));
    pts.push(Point2::new(mid.x + 30.0 * span, mid.y - 20.0 * span));
    pts.push(Point2::new(mid.x, mid.y + 40.0 * span));

    let mut tris = vec![DelaunayTri::new([n, n + 1, n + 2], &pts)];
    for p in 0..n {
        let point = pts[p];
        let mut bad = Vec::new();
        for (t, tri) in tris.iter().enumerate() {
            if tri.contains_in_circumcircle(point) {
                bad.push(t);
            }
        }
        // cavity boundary: edges used by exactly one removed triangle
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(3 * bad.len());
        for &t in &bad {
            let v = tris[t].v;
            for k in 0..3 {
                edges.push((v[k], v[(k + 1) % 3]));
            }
        }
        let mut cavity = Vec::new();
        'outer: for (i, &(a, b)) in edges.iter().enumerate() {
            for (j, &(c, d)) in edges.iter().enumerate() {
                if i != j && ((a, b) == (c, d) || (a, b) == (d, c)) {
                    continue 'outer;
                }
            }
            cavity.push((a, b));
        }
        for &t in bad.iter().rev() {
            tris.swap_remove(t);
        }
        for (a, b) in cavity {
            tris.push(DelaunayTri::new(orient_ccw([a, b, p], &pts), &pts));
        }
    }

    tris.iter()
        .map(|t| t.v)
        .filter(|v| v.iter().all(|&i| i < n))
        .collect()
}

fn orient_ccw(v: [usize; 3], pts: &[Point2]) -> [usize; 3] {
    let [a, b, c] = [pts[v[0]], pts[v[1]], pts[v[2]]];
    let twice = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if twice < 0.0 {
        [v[0], v[2], v[1]]
    } else {
        v
    }
}

/// Rotates each triple so the smallest vertex leads (cyclic, orientation kept)
/// and sorts the list, so the generated connectivity is canonical.
fn canonical_order(mut triangles: Vec<[usize; 3]>) -> Vec<[usize; 3]> {
    for tri in triangles.iter_mut() {
        let k = (0..3).min_by_key(|&k| tri[k]).unwrap();
        *tri = [tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]];
    }
    triangles.sort_unstable();
    triangles
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn disk_mesh_geometry() {
        let domain = DomainSpec::unit_disk();
        let mesh = generate_mesh(&domain, 0.1).unwrap();
        assert!(mesh.h >= 0.05 && mesh.h <= 0.15, "h = {}", mesh.h);
        for (v, p) in mesh.vertices.iter().enumerate() {
            if mesh.boundary[v] {
                assert!((p.dist(domain.center) - 1.0).abs() <= 1e-12);
            } else {
                assert!(p.dist(domain.center) < 1.0);
            }
        }
        // triangulated area equals the inscribed polygon area, which is within
        // O(h^2) of pi
        let polygon = boundary_polygon_area(&mesh, domain.center);
        assert!((mesh.area - polygon).abs() <= 1e-12 * polygon);
        assert!((mesh.area - PI).abs() < 0.02 * PI);
        assert!(mesh.min_angle_deg() >= 20.0, "min angle {}", mesh.min_angle_deg());
    }

    fn boundary_polygon_area(mesh: &TriMesh, center: Point2) -> f64 {
        let mut ring: Vec<Point2> = mesh
            .vertices
            .iter()
            .zip(&mesh.boundary)
            .filter(|(_, &b)| b)
            .map(|(&p, _)| p)
            .collect();
        ring.sort_by(|a, b| {
            let ta = (a.y - center.y).atan2(a.x - center.x);
            let tb = (b.y - center.y).atan2(b.x - center.x);
            ta.partial_cmp(&tb).unwrap()
        });
        let mut twice = 0.0;
        for i in 0..ring.len() {
            let p = ring[i];
            let q = ring[(i + 1) % ring.len()];
            twice += p.x * q.y - q.x * p.y;
        }
        0.5 * twice.abs()
    }

    #[test]
    fn superellipse_boundary_exact() {
        let domain = DomainSpec::superellipse(2.5, 1.0, Point2::new(0.0, 0.0));
        let mesh = generate_mesh(&domain, 0.05).unwrap();
        for (v, p) in mesh.vertices.iter().enumerate() {
            if mesh.boundary[v] {
                let r = p.x.abs().powf(2.5) + p.y.abs().powf(2.5);
                assert!((r - 1.0).abs() <= 1e-12, "residual {:e}", r - 1.0);
            }
        }
        assert!(mesh.min_angle_deg() >= 20.0, "min angle {}", mesh.min_angle_deg());
    }

    #[test]
    fn patch_identity_and_determinism() {
        let domain = DomainSpec::unit_disk();
        let a = generate_mesh(&domain, 0.125).unwrap();
        // patch_area(k) equals the recomputed sum over incident triangles
        let mut recomputed = vec![0.0; a.n_vertices()];
        for (t, tri) in a.triangles.iter().enumerate() {
            for &v in tri {
                recomputed[v] += a.triangle_area[t];
            }
        }
        for v in 0..a.n_vertices() {
            assert!((recomputed[v] - a.patch_area[v]).abs() <= 1e-12 * a.patch_area[v]);
        }
        let total: f64 = a.patch_area.iter().sum();
        assert!((total - 3.0 * a.area).abs() <= 1e-12 * 3.0 * a.area);

        let b = generate_mesh(&domain, 0.125).unwrap();
        assert_eq!(a.triangles, b.triangles);
        assert!(a
            .vertices
            .iter()
            .zip(&b.vertices)
            .all(|(p, q)| p.x == q.x && p.y == q.y));
    }

    #[test]
    fn too_coarse_is_rejected() {
        let r = generate_mesh(&DomainSpec::unit_disk(), 0.9);
        assert!(matches!(r, Err(Error::InfeasibleResolution(_))));
    }
}
