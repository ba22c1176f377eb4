#![no_std]
extern crate alloc;

pub mod chart;
pub mod criteria;
pub mod error;
pub mod expr;
pub mod multivector;
pub mod numeric;
pub mod qbh;

pub use chart::{CoordinateChart, Point};
pub use criteria::{CriterionReport, VerifyConfig};
pub use error::{CriteriaError, QbhError};
pub use expr::{parse_expression, Func, Node, ScalarExpr};
pub use multivector::{
    schouten_bracket, BivectorSum, DecomposableBivector, TrivectorComponents, TrivectorSum,
    VectorField,
};
pub use numeric::{sample_points, SampleDomain, ToleranceConfig};
pub use qbh::{build_qbh, QbhOptions, QuasiBiHamiltonianSystem};
