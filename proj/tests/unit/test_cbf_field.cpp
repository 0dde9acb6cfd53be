#include <gtest/gtest.h>

#include <sstream>

#include "support/oracles.hpp"
#include "thermal_cbf/error.hpp"
#include "thermal_cbf/map_generators.hpp"

using namespace thermal_cbf;

namespace {

SafetyField raster_field(Raster<double> h, double cs = 0.1, Vec2 origin = {}) {
  RegionLabels labels{Raster<Region>(h.height(), h.width(), Region::Transition)};
  return SafetyField(std::move(h), std::move(labels), cs, origin, {}, 0.15);
}

SafetyField random_raster_field(Rng& rng, std::size_t h, std::size_t w, double cs, Vec2 origin) {
  Raster<double> r(h, w);
  for (auto& v : r.data()) v = rng.uniform(-1, 1);
  return raster_field(std::move(r), cs, origin);
}

}  // namespace

TEST(SynthesisParams, Validation) {
  SynthesisParams p;
  EXPECT_NO_THROW(p.validate());
  p.delta_m = 0.0;
  EXPECT_THROW(p.validate(), ContractViolation);
  p = {};
  p.robot_radius_m = -1.0;
  EXPECT_THROW(p.validate(), ContractViolation);
  p = {};
  p.boundary.a = 0.0;
  EXPECT_THROW(p.validate(), ContractViolation);
}

TEST(Synthesize, EmptyMapShortCircuits) {
  SynthesisParams p;
  p.boundary.b_val = 2.0;
  const SafetyField f = synthesize(GridMap(200, 200, 0.01), p);
  for (double v : f.values().data()) ASSERT_EQ(v, 2.0);
  EXPECT_EQ(f.stats().solve.iterations, 0u);
  EXPECT_EQ(f.stats().transition_cells, 0u);
  EXPECT_EQ(harmonic_residual(f), 0.0);
}

TEST(Synthesize, PublishedExampleField) {
  SynthesisParams p;
  p.delta_m = kFourBlockDelta;
  p.solver_cfg.tol = 1e-12;
  for (SolverKind kind : {SolverKind::Gmres, SolverKind::Bicgstab}) {
    p.solver = kind;
    const SafetyField f = synthesize(four_block_map(), p);
    EXPECT_EQ(f.stats().transition_cells, 8u);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        switch (f.labels().label(i, j)) {
          case Region::Obstacle: EXPECT_EQ(f.values()(i, j), -1.0); break;
          case Region::Safe: EXPECT_EQ(f.values()(i, j), 1.0); break;
          case Region::Transition: EXPECT_NEAR(f.values()(i, j), 1.0 / 3.0, 1e-10); break;
        }
      }
    EXPECT_LE(harmonic_residual(f), 1e-10);
  }
}

TEST(Synthesize, ExactThirdHasZeroResidual) {
  const GridMap m = four_block_map();
  RegionLabels l = classify_regions(m, distance_transform(m), kFourBlockDelta);
  Raster<double> h(6, 6, 1.0);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      if (l.label(i, j) == Region::Obstacle) h(i, j) = -1.0;
      if (l.label(i, j) == Region::Transition) h(i, j) = 1.0 / 3.0;
    }
  EXPECT_LE(harmonic_residual(SafetyField(h, l, 1.0, {}, {}, kFourBlockDelta)), 1e-12);
}

TEST(Synthesize, BenchLikeMapHasTableSizedBand) {
  Rng rng(derive_seed(1, 0));
  const GridMap m = random_bench_map({}, rng);
  SynthesisParams p;
  p.solver = SolverKind::Bicgstab;
  const SafetyField f = synthesize(m, p);
  EXPECT_GE(m.occupied_count(), 1400u);
  EXPECT_LE(m.occupied_count(), 2200u);
  EXPECT_NEAR(double(f.stats().transition_cells), 6962.60, 0.2 * 6962.60);
  EXPECT_LE(harmonic_residual(f), 1e-6 * 2.0);
}

TEST(Synthesize, InflationIsApplied) {
  GridMap m(30, 30, 0.01);
  m.set_occupied(15, 15);
  SynthesisParams p;
  p.delta_m = 0.05;
  p.robot_radius_m = 0.02;
  const SafetyField f = synthesize(m, p);
  EXPECT_EQ(f.stats().occupied_cells, 13u);
  EXPECT_EQ(f.values()(13, 15), -1.0);
}

TEST(Synthesize, RangeSymmetryAndComparison) {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    // Mirror-symmetric map: generate the left half and reflect.
    const std::size_t h = 16, w = 20;
    GridMap m(h, w, 0.1);
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w / 2; ++j)
        if (rng.bernoulli(0.05)) {
          m.set_occupied(i, j);
          m.set_occupied(i, w - 1 - j);
        }
    SynthesisParams p;
    p.delta_m = 0.35;
    p.solver_cfg.tol = 1e-12;
    const SafetyField f = synthesize(m, p);
    const auto comps = transition_components(f.labels());
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j) {
        const double v = f.values()(i, j);
        EXPECT_NEAR(v, f.values()(i, w - 1 - j), 2e-12 * 2);
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
        if (f.labels().label(i, j) == Region::Transition && comps.borders_both(comps.component(i, j))) {
          EXPECT_GT(v, -1.0);
          EXPECT_LT(v, 1.0);
        }
      }

    SynthesisParams hotter = p;
    hotter.boundary.a = 1.7;
    const SafetyField g = synthesize(m, hotter);
    for (std::size_t k = 0; k < f.values().size(); ++k)
      if (f.labels().label.data()[k] == Region::Transition)
        EXPECT_LE(g.values().data()[k], f.values().data()[k] + 1e-9);
  }
}

TEST(Synthesize, NonConvergenceCarriesStats) {
  SynthesisParams p;
  p.delta_m = 0.3;
  p.solver_cfg.tol = 1e-30;
  p.solver_cfg.max_iters = 1;
  GridMap m(20, 20, 0.05);
  m.set_occupied(10, 10);
  try {
    synthesize(m, p);
    FAIL();
  } catch (const SynthesisError& e) {
    EXPECT_FALSE(e.stats().solve.converged);
    // Lattice points strictly inside a 6-cell disk, minus the center.
    std::size_t expected = 0;
    for (int di = -6; di <= 6; ++di)
      for (int dj = -6; dj <= 6; ++dj) expected += di * di + dj * dj > 0 && di * di + dj * dj < 36;
    EXPECT_EQ(e.stats().transition_cells, expected);
  }
}

TEST(ValueAt, NodesMidpointsAndBounds) {
  Raster<double> r(3, 4, 1.0);
  r(1, 1) = 0.0;
  const SafetyField f = raster_field(r, 0.5, {1.0, 2.0});
  EXPECT_EQ(value_at(f, {1.0 + 0.5 * 3, 2.0 + 0.5 * 2}), 1.0);
  EXPECT_EQ(value_at(f, {1.5, 2.5}), 0.0);
  EXPECT_DOUBLE_EQ(value_at(f, {1.75, 2.5}), 0.5);
  EXPECT_TRUE(f.in_extent({1.0, 2.0}));
  EXPECT_THROW(value_at(f, {0.9, 2.5}), OutOfBounds);
  EXPECT_THROW(value_at(f, {1.5, 3.1}), OutOfBounds);
  EXPECT_THROW(gradient_at(f, {2.6, 2.5}), OutOfBounds);
}

TEST(ValueAt, MatchesIndependentBilinearFormula) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = std::size_t(rng.uniform_int(2, 12)), w = std::size_t(rng.uniform_int(2, 12));
    const double cs = rng.uniform(0.01, 0.5);
    const Vec2 origin{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const SafetyField f = random_raster_field(rng, h, w, cs, origin);
    for (int k = 0; k < 100; ++k) {
      const Vec2 p{origin.x + rng.uniform(0, cs * double(w - 1)), origin.y + rng.uniform(0, cs * double(h - 1))};
      ASSERT_NEAR(value_at(f, p), oracle::bilinear_reference(f, p), 1e-12);
    }
  }
}

TEST(GradientAt, LinearRampAndConstant) {
  Raster<double> ramp(6, 7);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 7; ++j) ramp(i, j) = double(j) * 0.2;
  const SafetyField f = raster_field(ramp, 0.2);
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    const Vec2 g = gradient_at(f, {rng.uniform(0, 1.2), rng.uniform(0, 1.0)});
    EXPECT_NEAR(g.x, 1.0, 1e-12);
    EXPECT_NEAR(g.y, 0.0, 1e-12);
  }
  const Vec2 z = gradient_at(raster_field(Raster<double>(4, 4, 0.3)), {0.13, 0.21});
  EXPECT_EQ(z.x, 0.0);
  EXPECT_EQ(z.y, 0.0);
}

TEST(GradientAt, MatchesFiniteDifferencesOfValue) {
  Rng rng(17);
  const double step = 1e-4;
  for (int trial = 0; trial < 40; ++trial) {
    const double cs = rng.uniform(0.01, 0.2);
    const SafetyField f = random_raster_field(rng, 10, 10, cs, {});
    for (int k = 0; k < 50; ++k) {
      // Keep the stencil within one cell so it does not straddle a kink.
      const double cx = double(rng.uniform_int(0, 8)), cy = double(rng.uniform_int(0, 8));
      const double fx = rng.uniform(0.0, 1.0), fy = rng.uniform(0.0, 1.0);
      const double margin = step / cs;
      if (fx < margin || fx > 1 - margin || fy < margin || fy > 1 - margin) continue;
      const Vec2 p{(cx + fx) * cs, (cy + fy) * cs};
      const Vec2 g = gradient_at(f, p);
      const double dx = (value_at(f, {p.x + step, p.y}) - value_at(f, {p.x - step, p.y})) / (2 * step);
      const double dy = (value_at(f, {p.x, p.y + step}) - value_at(f, {p.x, p.y - step})) / (2 * step);
      ASSERT_NEAR(g.x, dx, 1e-3);
      ASSERT_NEAR(g.y, dy, 1e-3);
    }
  }
}

TEST(GradientAt, SingleRowFieldHasNoVerticalSlope) {
  Raster<double> r(1, 3);
  r(0, 0) = 0.0;
  r(0, 1) = 1.0;
  r(0, 2) = 4.0;
  const SafetyField f = raster_field(r, 1.0);
  const Vec2 g = gradient_at(f, {1.5, 0.0});
  EXPECT_DOUBLE_EQ(g.x, 3.0);
  EXPECT_EQ(g.y, 0.0);
  EXPECT_DOUBLE_EQ(value_at(f, {0.5, 0.0}), 0.5);
}

TEST(FieldExport, CsvAndSidecar) {
  Raster<double> r(2, 3, 0.5);
  r(1, 2) = 1.0 / 3.0;
  const SafetyField f = raster_field(r, 0.25, {0.5, -0.5});
  std::ostringstream csv;
  write_field_csv(csv, f);
  EXPECT_EQ(csv.str(), "0.5,0.5,0.5\n0.5,0.5,0.333333333\n");
  const auto j = field_sidecar(f);
  EXPECT_EQ(j.at("height"), 2);
  EXPECT_EQ(j.at("width"), 3);
  EXPECT_EQ(j.at("cell_size"), 0.25);
  EXPECT_EQ(j.at("a"), 1.0);
  EXPECT_EQ(j.at("b"), 1.0);
  EXPECT_EQ(j.at("delta_m"), 0.15);
  EXPECT_TRUE(j.at("origin").is_array() || j.at("origin").is_object());
  EXPECT_TRUE(j.contains("stats"));
}
