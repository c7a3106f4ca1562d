use crate::numerics::RandomStream;
use crate::scalar::dot;
use crate::spectral::TeacherSpec;

/// `n` points uniform on the sphere of radius `sqrt d`, row-major `n x d`.
pub fn sample_sphere(stream: &mut RandomStream, n: usize, d: usize) -> Vec<f64> {
    let mut x = stream.draw_standard_normal(n * d);
    let radius = (d as f64).sqrt();
    for row in x.chunks_exact_mut(d) {
        let norm = dot(row, row).sqrt();
        let scale = radius / norm;
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    x
}

/// Teacher data `y_i = g(<x_i, xi>/sqrt d) + sigma z_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n: usize,
    pub d: usize,
    /// Row-major `n x d` inputs.
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    /// `<x_i, xi> / sqrt d`.
    pub eta: Vec<f64>,
    /// Standard-normal noise draws `z_i` (before scaling by sigma).
    pub noise: Vec<f64>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }
}

/// Draw `xi`, then the inputs, then the noise from `stream`.
pub fn make_dataset(teacher: &TeacherSpec, stream: &mut RandomStream, n: usize, d: usize) -> Dataset {
    let xi = sample_sphere(stream, 1, d);
    let x = sample_sphere(stream, n, d);
    let noise = stream.draw_standard_normal(n);
    let sd = (d as f64).sqrt();
    let eta: Vec<f64> = x.chunks_exact(d).map(|row| dot(row, &xi) / sd).collect();
    let sigma = teacher.noise_sigma;
    let y = eta
        .iter()
        .zip(&noise)
        .map(|(&e, &z)| teacher.eval(e) + sigma * z)
        .collect();
    Dataset {
        n,
        d,
        x,
        xi,
        eta,
        noise,
        y,
    }
}
