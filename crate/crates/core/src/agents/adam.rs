use crate::error::{Error, Result};

/// Adaptive-moment optimizer with the usual β₁ = 0.9, β₂ = 0.999, ε = 1e-8.
#[derive(Clone, Debug, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub(crate) m: Vec<f64>,
    pub(crate) v: Vec<f64>,
    pub(crate) t: u64,
}

impl Adam {
    pub fn new(len: usize, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// One descent step along `grad`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grad.len() != self.m.len() {
            return Err(Error::Shape {
                expected: self.m.len(),
                actual: if params.len() != self.m.len() { params.len() } else { grad.len() },
            });
        }
        self.t += 1;
        let t = self.t as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }

    /// Serializes step count and both moment vectors, one per line.
    pub(crate) fn to_lines(&self) -> Vec<String> {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        vec![
            format!("adam {:?} {}", self.lr, self.t),
            format!("m {}", join(&self.m)),
            format!("v {}", join(&self.v)),
        ]
    }

    pub(crate) fn from_lines(lines: &[&str]) -> Result<Self> {
        let bad = |reason: &str| Error::Format { what: "optimizer state", reason: reason.into() };
        let [head, m, v] = lines else {
            return Err(bad("expected adam, m and v lines"));
        };
        let head: Vec<&str> = head.split_whitespace().collect();
        let ["adam", lr, t] = head.as_slice() else {
            return Err(bad("missing adam header"));
        };
        let nums = |line: &str, key: &str| -> Result<Vec<f64>> {
            let rest = line.strip_prefix(key).ok_or_else(|| bad("missing moment line"))?;
            rest.split_whitespace()
                .map(|x| x.parse().map_err(|_| bad("bad number")))
                .collect()
        };
        let m = nums(m, "m")?;
        let v = nums(v, "v")?;
        if m.len() != v.len() {
            return Err(bad("moment lengths differ"));
        }
        let mut adam = Adam::new(m.len(), lr.parse().map_err(|_| bad("bad rate"))?);
        adam.t = t.parse().map_err(|_| bad("bad step count"))?;
        adam.m = m;
        adam.v = v;
        Ok(adam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_lr() {
        let mut a = Adam::new(2, 0.1);
        let mut p = vec![1.0, -1.0];
        a.step(&mut p, &[3.0, -0.5]).unwrap();
        assert!((p[0] - 0.9).abs() < 1e-7);
        assert!((p[1] + 0.9).abs() < 1e-7);
    }

    #[test]
    fn minimizes_quadratic() {
        let mut a = Adam::new(1, 0.05);
        let mut p = vec![3.0];
        for _ in 0..2000 {
            let g = [2.0 * (p[0] - 1.5)];
            a.step(&mut p, &g).unwrap();
        }
        assert!((p[0] - 1.5).abs() < 1e-3);
    }

    #[test]
    fn zero_rate_and_zero_gradient_leave_params() {
        let mut a = Adam::new(2, 0.0);
        let mut p = vec![0.3, 0.4];
        a.step(&mut p, &[1.0, 2.0]).unwrap();
        assert_eq!(p, vec![0.3, 0.4]);
        let mut a = Adam::new(2, 0.1);
        a.step(&mut p, &[0.0, 0.0]).unwrap();
        assert_eq!(p, vec![0.3, 0.4]);
    }

    #[test]
    fn text_round_trip() {
        let mut a = Adam::new(3, 1e-3);
        let mut p = vec![0.1, 0.2, 0.3];
        a.step(&mut p, &[0.1, -0.7, 1e-9]).unwrap();
        let lines = a.to_lines();
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        assert_eq!(Adam::from_lines(&refs).unwrap(), a);
        assert!(a.step(&mut p, &[1.0]).is_err());
    }
}
