//! Wavefront OBJ and JSON serialization.

use std::fmt::Write as _;

use serde::Serialize;

use crate::surface::SurfaceMesh;

/// OBJ text of a mesh: one `v x y z` line per lattice point (17 significant
/// digits), then one `f` line per quad with 1-based indices.
pub fn obj_string(mesh: &SurfaceMesh) -> String {
    let mut out = String::with_capacity(64 * mesh.vertices().len());
    for v in mesh.vertices() {
        writeln!(out, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z).unwrap();
    }
    for [a, b, c, d] in mesh.quads() {
        writeln!(out, "f {} {} {} {}", a + 1, b + 1, c + 1, d + 1).unwrap();
    }
    out
}

/// Pretty-printed JSON with a trailing newline.
pub fn json_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
