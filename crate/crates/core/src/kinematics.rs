//! Denavit-Hartenberg forward kinematics for the 9-DOF arm and the
//! positional-error objective minimized by every optimizer.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::IkError;

/// Number of revolute joints in the arm.
pub const DOF: usize = 9;

/// One row of a DH table. Lengths are in cm, angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhRow {
    pub a: f64,
    pub alpha: f64,
    pub d: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl DhRow {
    pub fn new(a: f64, alpha: f64, d: f64, theta_min: f64, theta_max: f64) -> Result<Self, IkError> {
        let row = Self { a, alpha, d, theta_min, theta_max };
        row.validate()?;
        Ok(row)
    }

    pub fn validate(&self) -> Result<(), IkError> {
        if !(self.a.is_finite() && self.alpha.is_finite() && self.d.is_finite()) {
            return Err(IkError::InvalidModel("DH row has non-finite a, alpha or d".into()));
        }
        if self.a < 0.0 {
            return Err(IkError::InvalidModel(format!("link length a = {} is negative", self.a)));
        }
        if !(self.theta_min < self.theta_max) {
            return Err(IkError::InvalidModel(format!(
                "joint bounds [{}, {}] are empty",
                self.theta_min, self.theta_max
            )));
        }
        Ok(())
    }
}

/// Geometric description of the arm: exactly nine DH rows, base first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    rows: [DhRow; DOF],
}

impl RobotModel {
    pub fn new(rows: Vec<DhRow>) -> Result<Self, IkError> {
        let rows: [DhRow; DOF] = rows
            .try_into()
            .map_err(|v: Vec<DhRow>| IkError::InvalidModel(format!("expected {DOF} DH rows, got {}", v.len())))?;
        for row in &rows {
            row.validate()?;
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[DhRow; DOF] {
        &self.rows
    }

    pub fn lower_bounds(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.theta_min).collect()
    }

    pub fn upper_bounds(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.theta_max).collect()
    }

    /// Shoulder point: the frame origin after the first row's base offset.
    pub fn shoulder(&self) -> Position {
        Position::new(0.0, 0.0, self.rows[0].d)
    }

    /// Sum of link lengths past the shoulder; bounds the distance from
    /// [`RobotModel::shoulder`] to any reachable point.
    pub fn reach(&self) -> f64 {
        self.rows[1..].iter().map(|r| r.a + r.d.abs()).sum::<f64>() + self.rows[0].a
    }
}

impl Default for RobotModel {
    /// The 9-DOF arm: a base joint with a 3 cm lift and 90° twist, followed
    /// by eight planar unit links limited to ±90°.
    fn default() -> Self {
        let base = DhRow { a: 0.0, alpha: FRAC_PI_2, d: 3.0, theta_min: 0.0, theta_max: 2.0 * PI };
        let link = DhRow { a: 1.0, alpha: 0.0, d: 0.0, theta_min: -FRAC_PI_2, theta_max: FRAC_PI_2 };
        Self { rows: [base, link, link, link, link, link, link, link, link] }
    }
}

/// Joint angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointConfig {
    pub theta: [f64; DOF],
}

impl JointConfig {
    pub fn new(theta: [f64; DOF]) -> Self {
        Self { theta }
    }

    pub fn zeros() -> Self {
        Self { theta: [0.0; DOF] }
    }

    pub fn from_slice(values: &[f64]) -> Result<Self, IkError> {
        let theta: [f64; DOF] = values
            .try_into()
            .map_err(|_| IkError::InvalidInput(format!("expected {DOF} joint angles, got {}", values.len())))?;
        Ok(Self { theta })
    }

    pub fn from_degrees(degrees: &[f64]) -> Result<Self, IkError> {
        let radians: Vec<f64> = degrees.iter().map(|d| d.to_radians()).collect();
        Self::from_slice(&radians)
    }

    pub fn to_degrees(&self) -> [f64; DOF] {
        self.theta.map(f64::to_degrees)
    }

    pub fn is_feasible(&self, model: &RobotModel) -> bool {
        self.theta.iter().zip(model.rows()).all(|(t, r)| (r.theta_min..=r.theta_max).contains(t))
    }
}

/// A 4×4 homogeneous transform, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousTransform {
    pub m: [[f64; 4]; 4],
}

impl HomogeneousTransform {
    pub const IDENTITY: Self =
        Self { m: [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]] };

    pub fn translation(&self) -> Position {
        Position::new(self.m[0][3], self.m[1][3], self.m[2][3])
    }

    pub fn rotation(&self) -> [[f64; 3]; 3] {
        let m = &self.m;
        [[m[0][0], m[0][1], m[0][2]], [m[1][0], m[1][1], m[1][2]], [m[2][0], m[2][1], m[2][2]]]
    }
}

impl Mul for HomogeneousTransform {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..4).map(|k| self.m[i][k] * rhs.m[k][j]).sum();
            }
        }
        Self { m: out }
    }
}

/// Cartesian point in cm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Link transform from frame n-1 to frame n for the given joint angle.
/// Joint bounds are not enforced.
pub fn dh_transform(row: &DhRow, theta: f64) -> HomogeneousTransform {
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = row.alpha.sin_cos();
    HomogeneousTransform {
        m: [
            [ct, -st * ca, st * sa, row.a * ct],
            [st, ct * ca, -ct * sa, row.a * st],
            [0.0, sa, ca, row.d],
            [0.0, 0.0, 0.0, 1.0],
        ],
    }
}

/// Full base-to-tool transform, chained left to right.
pub fn chain_transform(model: &RobotModel, q: &JointConfig) -> HomogeneousTransform {
    model
        .rows()
        .iter()
        .zip(q.theta.iter())
        .fold(HomogeneousTransform::IDENTITY, |acc, (row, &theta)| acc * dh_transform(row, theta))
}

pub fn forward_kinematics(model: &RobotModel, q: &JointConfig) -> Position {
    chain_transform(model, q).translation()
}

/// Euclidean distance between the desired and reached points.
pub fn fitness(desired: &Position, reached: &Position) -> f64 {
    let dx = desired.x - reached.x;
    let dy = desired.y - reached.y;
    let dz = desired.z - reached.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

pub fn objective(model: &RobotModel, target: &Position, q: &JointConfig) -> f64 {
    fitness(target, &forward_kinematics(model, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS: f64 = 1e-12;

    #[allow(clippy::needless_range_loop)]
    fn assert_matrix_eq(got: &HomogeneousTransform, want: [[f64; 4]; 4]) {
        for i in 0..4 {
            for j in 0..4 {
                assert!((got.m[i][j] - want[i][j]).abs() < EPS, "m[{i}][{j}] = {} != {}", got.m[i][j], want[i][j]);
            }
        }
    }

    fn assert_pos(got: Position, want: (f64, f64, f64), tol: f64) {
        assert!(
            (got.x - want.0).abs() <= tol && (got.y - want.1).abs() <= tol && (got.z - want.2).abs() <= tol,
            "{got:?} != {want:?}"
        );
    }

    #[test]
    fn base_row_at_zero() {
        let model = RobotModel::default();
        let t = dh_transform(&model.rows()[0], 0.0);
        assert_matrix_eq(&t, [[1., 0., 0., 0.], [0., 0., -1., 0.], [0., 1., 0., 3.], [0., 0., 0., 1.]]);
    }

    #[test]
    fn link_row_at_zero_is_pure_x_translation() {
        let model = RobotModel::default();
        let t = dh_transform(&model.rows()[1], 0.0);
        assert_matrix_eq(&t, [[1., 0., 0., 1.], [0., 1., 0., 0.], [0., 0., 1., 0.], [0., 0., 0., 1.]]);
    }

    #[test]
    fn link_row_at_quarter_turn() {
        let model = RobotModel::default();
        let t = dh_transform(&model.rows()[1], FRAC_PI_2);
        assert_matrix_eq(&t, [[0., -1., 0., 0.], [1., 0., 0., 1.], [0., 0., 1., 0.], [0., 0., 0., 1.]]);
    }

    #[test]
    fn landmark_poses() {
        let model = RobotModel::default();
        assert_pos(forward_kinematics(&model, &JointConfig::zeros()), (8.0, 0.0, 3.0), EPS);
        let mut q = JointConfig::zeros();
        q.theta[0] = FRAC_PI_2;
        assert_pos(forward_kinematics(&model, &q), (0.0, 8.0, 3.0), EPS);
        let mut q = JointConfig::zeros();
        q.theta[1] = FRAC_PI_2;
        assert_pos(forward_kinematics(&model, &q), (0.0, 0.0, 11.0), EPS);
    }

    #[test]
    fn fitness_examples() {
        let p = Position::new(1.0, 1.0, 7.0);
        assert_eq!(fitness(&p, &p), 0.0);
        assert_eq!(fitness(&Position::new(0.0, 0.0, 0.0), &Position::new(3.0, 4.0, 0.0)), 5.0);
        assert!((fitness(&p, &Position::new(8.0, 0.0, 3.0)) - 66f64.sqrt()).abs() < EPS);
    }

    #[test]
    fn objective_examples() {
        let model = RobotModel::default();
        let zero = JointConfig::zeros();
        assert!(objective(&model, &Position::new(8.0, 0.0, 3.0), &zero) < EPS);
        assert!((objective(&model, &Position::new(1.0, 1.0, 7.0), &zero) - 66f64.sqrt()).abs() < EPS);
    }

    #[test]
    fn default_model_bounds() {
        let model = RobotModel::default();
        assert_eq!(model.lower_bounds()[0], 0.0);
        assert_eq!(model.upper_bounds()[0], 2.0 * PI);
        assert!(model.lower_bounds()[1..].iter().all(|&l| l == -FRAC_PI_2));
        assert!(model.upper_bounds()[1..].iter().all(|&u| u == FRAC_PI_2));
        assert_eq!(model.reach(), 8.0);
        assert_eq!(model.shoulder(), Position::new(0.0, 0.0, 3.0));
    }

    #[test]
    fn model_rejects_wrong_row_count_and_bad_rows() {
        let rows = RobotModel::default().rows().to_vec();
        assert!(RobotModel::new(rows[..8].to_vec()).is_err());
        assert!(DhRow::new(1.0, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(DhRow::new(-1.0, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(DhRow::new(1.0, f64::NAN, 0.0, 0.0, 1.0).is_err());
        assert!(RobotModel::new(rows).is_ok());
    }

    #[test]
    fn joint_config_length_is_checked() {
        assert!(JointConfig::from_slice(&[0.0; 8]).is_err());
        assert!(JointConfig::from_degrees(&[0.0; 10]).is_err());
        let q = JointConfig::from_degrees(&[90.0; 9]).unwrap();
        assert!((q.theta[3] - FRAC_PI_2).abs() < EPS);
    }

    fn feasible_config() -> impl Strategy<Value = JointConfig> {
        (0.0..=2.0 * PI, proptest::array::uniform8(-FRAC_PI_2..=FRAC_PI_2)).prop_map(|(base, rest)| {
            let mut theta = [0.0; DOF];
            theta[0] = base;
            theta[1..].copy_from_slice(&rest);
            JointConfig::new(theta)
        })
    }

    fn position() -> impl Strategy<Value = Position> {
        (-20.0..20.0f64, -20.0..20.0f64, -20.0..20.0f64).prop_map(|(x, y, z)| Position::new(x, y, z))
    }

    proptest! {
        #[test]
        fn rotation_block_is_proper_orthonormal(row in 0usize..DOF, theta in -10.0..10.0f64) {
            let model = RobotModel::default();
            let r = dh_transform(&model.rows()[row], theta).rotation();
            for i in 0..3 {
                for j in 0..3 {
                    let dot: f64 = (0..3).map(|k| r[i][k] * r[j][k]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((dot - want).abs() < 1e-9);
                }
            }
            let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
            prop_assert!((det - 1.0).abs() < 1e-9);
        }

        #[test]
        fn chained_transform_keeps_homogeneous_bottom_row(q in feasible_config()) {
            let t = chain_transform(&RobotModel::default(), &q);
            prop_assert_eq!(t.m[3], [0.0, 0.0, 0.0, 1.0]);
        }

        #[test]
        fn reach_bound(q in feasible_config()) {
            let model = RobotModel::default();
            let p = forward_kinematics(&model, &q);
            prop_assert!(fitness(&p, &model.shoulder()) <= 8.0 + 1e-9);
        }

        #[test]
        fn base_rotation_equivariance(q in feasible_config(), delta in -3.0..3.0f64) {
            let model = RobotModel::default();
            let p = forward_kinematics(&model, &q);
            let mut rotated = q;
            rotated.theta[0] += delta;
            let got = forward_kinematics(&model, &rotated);
            let (s, c) = delta.sin_cos();
            let want = Position::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z);
            prop_assert!(fitness(&got, &want) < 1e-9);
        }

        #[test]
        fn fitness_is_a_metric(p in position(), q in position(), r in position()) {
            prop_assert_eq!(fitness(&p, &q), fitness(&q, &p));
            prop_assert_eq!(fitness(&p, &p), 0.0);
            prop_assert!(fitness(&p, &r) <= fitness(&p, &q) + fitness(&q, &r) + 1e-12);
        }
    }
}
