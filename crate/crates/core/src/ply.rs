//! ASCII PLY export of front meshes with per-vertex scalars.

use std::io::{self, Write};

use crate::front::FrontMesh;

/// Write `mesh` as ASCII PLY 1.0. Vertex properties are `x y z sing
/// dsigma2`; faces are triangles. Output depends only on the mesh.
pub fn write_ply<W: Write>(mesh: &FrontMesh, out: &mut W) -> io::Result<()> {
    writeln!(out, "ply")?;
    writeln!(out, "format ascii 1.0")?;
    writeln!(out, "comment flat front in the Poincare ball")?;
    writeln!(out, "element vertex {}", mesh.vertices.len())?;
    for p in ["x", "y", "z", "sing", "dsigma2"] {
        writeln!(out, "property float {}", p)?;
    }
    writeln!(out, "element face {}", mesh.faces.len())?;
    writeln!(out, "property list uchar int vertex_indices")?;
    writeln!(out, "end_header")?;
    for (i, v) in mesh.vertices.iter().enumerate() {
        writeln!(
            out,
            "{} {} {} {} {}",
            v[0] as f32, v[1] as f32, v[2] as f32, mesh.sing[i] as f32, mesh.dsigma2[i] as f32
        )?;
    }
    for f in &mesh.faces {
        writeln!(out, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    Ok(())
}

pub fn to_ply_string(mesh: &FrontMesh) -> String {
    let mut buf = Vec::new();
    write_ply(mesh, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("PLY output is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn header_and_body() {
        let mesh = FrontMesh {
            vertices: vec![[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.0, 0.25, -0.125]],
            faces: vec![[0, 1, 2]],
            sing: vec![0.0, 1.5, -2.0],
            dsigma2: vec![1.0, 0.0, -0.5],
            params: vec![C64::new(0.0, 0.0); 3],
            truncated: 0,
            branch_points: 0,
        };
        let s = to_ply_string(&mesh);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "ply");
        assert_eq!(lines[3], "element vertex 3");
        assert_eq!(lines[9], "element face 1");
        assert_eq!(lines[11], "end_header");
        assert_eq!(lines[13], "0.5 0 0 1.5 0");
        assert_eq!(lines[15], "3 0 1 2");
        assert_eq!(lines.len(), 16);
    }
}
