#include <gtest/gtest.h>

#include <numbers>

#include "thermal_cbf/error.hpp"
#include "thermal_cbf/random.hpp"
#include "thermal_cbf/robot_models.hpp"

using namespace thermal_cbf;
using std::numbers::pi;

TEST(NominalControl, ArrivalAndDirection) {
  EXPECT_EQ(nominal_control({1, 2}, {1, 2}, {}), (Vec2{0, 0}));
  EXPECT_EQ(nominal_control({1, 2}, {1.004, 2}, {}), (Vec2{0, 0}));
  const Vec2 u = nominal_control({0, 0}, {3, 4}, {.k = 0.15});
  EXPECT_NEAR(u.x, 0.09, 1e-15);
  EXPECT_NEAR(u.y, 0.12, 1e-15);
}

TEST(NominalControl, MagnitudeIsAlwaysK) {
  Rng rng(12);
  int checked = 0;
  while (checked < 1000) {
    const Vec2 p{rng.uniform(-5, 5), rng.uniform(-5, 5)}, g{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    if (norm(g - p) < 0.005) continue;
    ++checked;
    ASSERT_NEAR(norm(nominal_control(p, g, {.k = 0.15})), 0.15, 1e-14);
  }
  EXPECT_THROW(NominalParams{.k = 0.0}.validate(), ContractViolation);
}

TEST(IntegrateSingle, EulerStep) {
  EXPECT_EQ(integrate_single({1, 1}, {0, 0}, 0.5), (Vec2{1, 1}));
  const Vec2 p = integrate_single({1, 1}, {0.1, -0.2}, 0.5);
  EXPECT_DOUBLE_EQ(p.x, 1.05);
  EXPECT_DOUBLE_EQ(p.y, 0.9);
  const Vec2 half = integrate_single(integrate_single({0.25, 0.5}, {0.5, -0.25}, 0.25), {0.5, -0.25}, 0.25);
  EXPECT_EQ(half, integrate_single({0.25, 0.5}, {0.5, -0.25}, 0.5));
  EXPECT_THROW(integrate_single({0, 0}, {0, 0}, 0.0), ContractViolation);
}

TEST(Diffeomorphism, PublishedSubstitutions) {
  const DiffeoParams d{.r = 0.05};
  auto c = unicycle_from_velocity(0.0, {0.1, 0.0}, d);
  EXPECT_DOUBLE_EQ(c.v, 0.1);
  EXPECT_DOUBLE_EQ(c.omega, 0.0);
  c = unicycle_from_velocity(0.0, {0.0, 0.1}, d);
  EXPECT_DOUBLE_EQ(c.v, 0.0);
  EXPECT_DOUBLE_EQ(c.omega, 2.0);
  c = unicycle_from_velocity(pi / 2, {0.0, 0.1}, d);
  EXPECT_NEAR(c.v, 0.1, 1e-16);
  EXPECT_NEAR(c.omega, 0.0, 1e-15);
}

TEST(Diffeomorphism, RecoversLookaheadVelocityAndIsEquivariant) {
  Rng rng(9);
  const DiffeoParams d{.r = 0.07};
  for (int k = 0; k < 1000; ++k) {
    const double th = rng.uniform(-pi, pi), phi = rng.uniform(-pi, pi);
    const Vec2 u{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto c = unicycle_from_velocity(th, u, d);
    // d/dt (x + r cos th, y + r sin th) under the unicycle kinematics.
    const Vec2 back{c.v * std::cos(th) - d.r * std::sin(th) * c.omega,
                    c.v * std::sin(th) + d.r * std::cos(th) * c.omega};
    ASSERT_NEAR(back.x, u.x, 1e-12);
    ASSERT_NEAR(back.y, u.y, 1e-12);
    const Vec2 ru{std::cos(phi) * u.x - std::sin(phi) * u.y, std::sin(phi) * u.x + std::cos(phi) * u.y};
    const auto r = unicycle_from_velocity(th + phi, ru, d);
    ASSERT_NEAR(r.v, c.v, 1e-12);
    ASSERT_NEAR(r.omega, c.omega, 1e-10);
  }
  EXPECT_THROW(DiffeoParams{.r = 0.0}.validate(), ContractViolation);
}

TEST(IntegrateUnicycle, StepsAndNormalization) {
  const RobotState s{1.0, 2.0, 0.3};
  const RobotState same = integrate_unicycle(s, {0, 0}, 0.1);
  EXPECT_EQ(same.x, s.x);
  EXPECT_EQ(same.y, s.y);
  EXPECT_EQ(same.theta, s.theta);

  const RobotState fwd = integrate_unicycle({0, 0, 0}, {1.0, 0.0}, 0.1);
  EXPECT_DOUBLE_EQ(fwd.x, 0.1);
  EXPECT_EQ(fwd.y, 0.0);
  EXPECT_EQ(fwd.theta, 0.0);

  const RobotState turned = integrate_unicycle({0, 0, pi / 2}, {0.0, pi}, 1.0);
  EXPECT_GT(turned.theta, -pi);
  EXPECT_LE(turned.theta, pi);
  EXPECT_NEAR(turned.theta, -pi / 2, 1e-12);
  EXPECT_EQ(normalize_angle(-pi), pi);
  EXPECT_NEAR(normalize_angle(5 * pi), pi, 1e-12);

  const Vec2 la = lookahead_point({1, 1, pi / 2}, {.r = 0.05});
  EXPECT_NEAR(la.x, 1.0, 1e-15);
  EXPECT_NEAR(la.y, 1.05, 1e-15);
}
