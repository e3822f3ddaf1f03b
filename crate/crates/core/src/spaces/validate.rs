use serde::{Deserialize, Serialize};

use super::NormSpace;
use crate::polytope::sign_vectors;
use crate::search;

const TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    /// `'a'` sign-flip invariance, `'b'` unit vectors have norm one,
    /// `'c'` monotonicity under coordinatewise domination.
    pub property: char,
    pub passed: bool,
    pub worst_violation: f64,
    /// For (a) and (c): the pair of vectors that violates the property.
    pub counterexample: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub label: String,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<PropertyCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

struct Tracker {
    property: char,
    worst: f64,
    example: Option<(Vec<f64>, Vec<f64>)>,
}

impl Tracker {
    fn new(property: char) -> Self {
        Self {
            property,
            worst: 0.0,
            example: None,
        }
    }

    fn record(&mut self, violation: f64, x: &[f64], y: &[f64]) {
        if violation > self.worst {
            self.worst = violation;
            self.example = Some((x.to_vec(), y.to_vec()));
        }
    }

    fn finish(self) -> PropertyCheck {
        let passed = self.worst <= TOL;
        PropertyCheck {
            property: self.property,
            passed,
            worst_violation: self.worst,
            counterexample: if passed { None } else { self.example },
        }
    }
}

pub(super) fn validate_absolute(space: &NormSpace, trials: usize, seed: u64) -> ValidationReport {
    let n = space.dim();
    let mut rng = search::rng_for(seed, 0);

    // probes: the all-ones vector and its sign patterns first, then samples
    let mut probes: Vec<Vec<f64>> = vec![vec![1.0; n]];
    for _ in 0..trials.max(1) {
        probes.push(search::gaussian_vec(&mut rng, n));
    }
    let flips: Vec<Vec<f64>> = if n <= 6 {
        sign_vectors(n)
    } else {
        (0..64)
            .map(|_| {
                search::gaussian_vec(&mut rng, n)
                    .into_iter()
                    .map(|v| if v < 0.0 { -1.0 } else { 1.0 })
                    .collect()
            })
            .collect()
    };

    let mut a = Tracker::new('a');
    let mut c = Tracker::new('c');
    for x in &probes {
        let nx = space.eval(x);
        let scale = nx.max(1.0);
        for s in &flips {
            let y: Vec<f64> = x.iter().zip(s).map(|(v, s)| v * s).collect();
            a.record((space.eval(&y) - nx).abs() / scale, x, &y);
        }
        let shrink = search::gaussian_vec(&mut rng, n);
        let y: Vec<f64> = x
            .iter()
            .zip(&shrink)
            .map(|(v, t)| v * (t.abs() / (1.0 + t.abs())))
            .collect();
        c.record((space.eval(&y) - nx) / scale, x, &y);
        for i in 0..n {
            let mut z = x.clone();
            z[i] = 0.0;
            c.record((space.eval(&z) - nx) / scale, x, &z);
        }
    }

    let mut b = Tracker::new('b');
    for i in 0..n {
        let e = super::unit(n, i);
        let ne = space.eval(&e);
        b.record((ne - 1.0).abs(), &e, &[ne]);
    }
    // (b) is an exact property for the closed-form kinds; allow round-off only
    let mut b = b.finish();
    b.passed = b.worst_violation <= 1e-12;
    if b.passed {
        b.counterexample = None;
    }

    ValidationReport {
        label: space.label().to_string(),
        trials,
        seed,
        checks: vec![a.finish(), b, c.finish()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::PolytopeBall;

    #[test]
    fn built_in_kinds_are_absolute() {
        for s in [
            NormSpace::example_3_2(),
            NormSpace::example_3_3(),
            NormSpace::example_3_3_p4(),
            NormSpace::euclidean(2),
            NormSpace::lorentz(1.0).unwrap(),
            NormSpace::lorentz(6.0).unwrap(),
            NormSpace::lp(4, 1.0).unwrap(),
            NormSpace::lp(3, 3.5).unwrap(),
            NormSpace::lp(3, f64::INFINITY).unwrap(),
        ] {
            let r = s.validate_absolute(200, 3);
            assert!(r.passed(), "{}: {:?}", s.label(), r.first_failure());
        }
    }

    #[test]
    fn non_absolute_norm_fails_sign_flip() {
        // ‖(x, y)‖ = max(|x|, |x + y|): ‖(1,-1)‖ = 1 but ‖(1,1)‖ = 2
        let ball =
            PolytopeBall::from_dual_generators(2, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let s = NormSpace::polytope(ball, "skewed");
        let r = s.validate_absolute(50, 0);
        assert!(!r.passed());
        let a = &r.checks[0];
        assert_eq!(a.property, 'a');
        assert!(!a.passed);
        let (x, y) = a.counterexample.clone().unwrap();
        assert!((s.eval(&x) - s.eval(&y)).abs() > 0.5);
        assert!(r.checks[1].passed);
    }

    #[test]
    fn scaled_norm_fails_unit_property() {
        let s = NormSpace::lp(2, 2.0).unwrap();
        let ball = PolytopeBall::new(
            2,
            vec![
                vec![0.5, 0.0],
                vec![-0.5, 0.0],
                vec![0.0, 0.5],
                vec![0.0, -0.5],
            ],
            vec![
                vec![2.0, 2.0],
                vec![2.0, -2.0],
                vec![-2.0, 2.0],
                vec![-2.0, -2.0],
            ],
        )
        .unwrap();
        let twice_l1 = NormSpace::polytope(ball, "2l1");
        assert!(s.validate_absolute(10, 0).passed());
        let r = twice_l1.validate_absolute(10, 0);
        assert!(r.checks[0].passed && !r.checks[1].passed && r.checks[2].passed);
    }
}
