//! Problem files shipped with the tool, runnable with `example run NAME`.

use crate::problem::{parse_problem, ProblemSpec};

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
}

impl Fixture {
    pub fn problem(&self) -> ProblemSpec {
        parse_problem(self.source).expect("shipped fixtures parse")
    }
}

pub const FIXTURES: [Fixture; 6] = [
    Fixture {
        name: "exp-realization",
        summary: "X1 = exp(z) dx + dy, X2 = dy, X3 = dz with H = y and F = y + z^2",
        source: include_str!("../fixtures/exp-realization.prob"),
    },
    Fixture {
        name: "rotation",
        summary: "rotation and axial translation, X3 = atan2(x2,x1)(x2 dx1 - x1 dx2 + dx3), H = x3",
        source: include_str!("../fixtures/rotation.prob"),
    },
    Fixture {
        name: "so3-jacobi",
        summary: "so(3) generators as a Jacobi pair (X1^X2, XH)",
        source: include_str!("../fixtures/so3-jacobi.prob"),
    },
    Fixture {
        name: "heisenberg-jacobi",
        summary: "Heisenberg generators as a Jacobi pair with central XH = -dz",
        source: include_str!("../fixtures/heisenberg-jacobi.prob"),
    },
    Fixture {
        name: "linear-abelian",
        summary: "linear realization for A = [[1]] with a logarithmic third field",
        source: include_str!("../fixtures/linear-abelian.prob"),
    },
    Fixture {
        name: "hojman-2d",
        summary: "X1 = dx, X3 = -x dx + dy with H = y and H2 = y^2",
        source: include_str!("../fixtures/hojman-2d.prob"),
    },
];

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}
