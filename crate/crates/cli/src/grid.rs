use std::str::FromStr;

use num_complex::Complex64;
use toeplitz_core::scalarpoly::GaussRat;

/// Grid points are rounded to Gaussian rationals with denominators up to this
/// bound, so points meant to lie on a curve stay within about 1e-12 of it.
const MAX_DEN: i64 = 1_000_000;

/// `cx,cy,r,nr,ntheta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub center: Complex64,
    pub radius: f64,
    pub radial: usize,
    pub angular: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(format!("expected cx,cy,r,nr,ntheta, got {s:?}"));
        }
        let float = |i: usize| {
            parts[i]
                .parse::<f64>()
                .map_err(|e| format!("grid field {}: {e}", i + 1))
        };
        let count = |i: usize| {
            parts[i]
                .parse::<usize>()
                .map_err(|e| format!("grid field {}: {e}", i + 1))
        };
        let spec = GridSpec {
            center: Complex64::new(float(0)?, float(1)?),
            radius: float(2)?,
            radial: count(3)?,
            angular: count(4)?,
        };
        if !(spec.radius.is_finite() && spec.radius > 0.0)
            || !spec.center.re.is_finite()
            || !spec.center.im.is_finite()
        {
            return Err(format!(
                "grid center and radius must be finite with r > 0: {s:?}"
            ));
        }
        Ok(spec)
    }
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<GaussRat>, String> {
        if self.radial == 0 || self.angular == 0 {
            return Err("grid counts nr and ntheta must be at least 1".into());
        }
        let mut out = Vec::with_capacity(self.radial * self.angular);
        for j in 1..=self.radial {
            let rho = self.radius * j as f64 / self.radial as f64;
            for k in 0..self.angular {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / self.angular as f64;
                let z = self.center + Complex64::from_polar(rho, theta);
                out.push(
                    GaussRat::approximate(z, MAX_DEN)
                        .ok_or_else(|| format!("grid point {z} out of range"))?,
                );
            }
        }
        Ok(out)
    }
}
