#include <gtest/gtest.h>

#include "generators.hpp"
#include "qmt/error.hpp"
#include "qmt/oracle.hpp"

namespace qmt {
namespace {

using namespace qmt::testing;

TEST(GlobalCombineTest, SingleNodeReturnsEvidence) {
  const Frame f = letters_frame(3);
  const auto p = Partition::singletons(f);
  const auto net = Network::build(f, {{"x", p}}, {});
  const MassFunction m(p.coarse_frame(), {{0b011, 0.25}, {0b111, 0.75}});
  const auto r = oracle::global_combine(net, {{"x", {m}}});
  ASSERT_EQ(r.coarsenings.size(), 1U);
  EXPECT_LE(max_deviation(r.coarsenings[0].second, m), 1e-15);
  EXPECT_EQ(r.conflict_mass, 0.0);
}

TEST(GlobalCombineTest, NoEvidenceIsVacuous) {
  const Frame cube = cube_frame();
  const auto net = Network::build(cube, {{"x", cube_axis(cube, 0)}, {"y", cube_axis(cube, 1)}}, {{"x", "y"}});
  const auto r = oracle::global_combine(net, {});
  EXPECT_TRUE(r.global.is_vacuous());
  for (const auto& [id, m] : r.coarsenings) EXPECT_TRUE(m.is_vacuous()) << id;
}

TEST(GlobalCombineTest, IndependentCoordinatesDoNotInteract) {
  // Evidence on x and y of the cube touches independent coordinates, so each
  // node's marginal is its own evidence.
  const Frame cube = cube_frame();
  const auto px = cube_axis(cube, 0);
  const auto py = cube_axis(cube, 1);
  const auto net = Network::build(cube, {{"x", px}, {"y", py}}, {{"x", "y"}});
  const MassFunction mx(px.coarse_frame(), {{0b01, 0.6}, {0b11, 0.4}});
  const MassFunction my(py.coarse_frame(), {{0b10, 0.3}, {0b11, 0.7}});
  const auto r = oracle::global_combine(net, {{"x", {mx}}, {"y", {my}}});
  EXPECT_LE(max_deviation(r.coarsenings[0].second, mx), 1e-15);
  EXPECT_LE(max_deviation(r.coarsenings[1].second, my), 1e-15);
}

TEST(GlobalCombineTest, FrameCap) {
  const Frame f = letters_frame(5);
  const auto net = Network::build(f, {{"x", Partition::singletons(f)}}, {});
  EXPECT_THROW(oracle::global_combine(net, {}, 4), Error);
  try {
    oracle::global_combine(net, {}, 4);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FrameTooLarge);
  }
}

TEST(GlobalCombineTest, MeetRouteAgreesWithFullFrame) {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const auto net = random_tree(rng, letters_frame(uniform(rng, 3, 7)), uniform(rng, 1, 4));
    const auto ev = random_evidence(rng, net, 3, 2);
    try {
      const auto a = oracle::global_combine(net, ev);
      const auto b = oracle::global_combine_on_meet(net, ev);
      for (std::size_t i = 0; i < a.coarsenings.size(); ++i) {
        EXPECT_LE(max_deviation(a.coarsenings[i].second, b.coarsenings[i].second), 1e-12);
      }
      EXPECT_NEAR(a.conflict_mass, b.conflict_mass, 1e-12);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::TotalConflict);
      EXPECT_THROW(oracle::global_combine_on_meet(net, ev), Error);
    }
  }
}

TEST(CheckPropagationTest, PassesOnRandomMarkovTrees) {
  Rng rng(5);
  int checked = 0;
  while (checked < 40) {
    const auto net = random_markov_tree(rng, 3, 6, 2, 5);
    Engine engine{MarkovTree::build(net)};
    for (const auto& [id, list] : random_evidence(rng, net, 3)) {
      for (const auto& m : list) engine.enter_evidence(id, m);
    }
    try {
      const auto report = oracle::check_propagation(engine, 1e-9);
      EXPECT_TRUE(report.pass) << report.max_deviation;
      EXPECT_EQ(report.deviations.size(), net.node_count());
      ++checked;
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::TotalConflict);
    }
  }
}

TEST(CheckPropagationTest, VacuousEvidenceGivesZeroDeviation) {
  Rng rng(8);
  const auto net = random_markov_tree(rng, 4, 6, 3, 5);
  Engine engine{MarkovTree::build(net)};
  const auto report = oracle::check_propagation(engine, 0.0);
  EXPECT_TRUE(report.pass);
  EXPECT_EQ(report.max_deviation, 0.0);
}

TEST(CheckPropagationTest, RejectsNonMarkovTree) {
  const Frame f = letters_frame(2);
  const auto fine = Partition::singletons(f);
  const auto net = Network::build(f, {{"l", fine}, {"m", Partition::trivial(f)}, {"r", fine}}, {{"l", "m"}, {"m", "r"}});
  Engine engine = Engine::create(net, MarkovCheck::Skip);
  try {
    oracle::check_propagation(engine, 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MarkovViolation);
    EXPECT_EQ(e.location(), "m");
  }
}

class IdentityTest : public ::testing::Test {
protected:
  Frame cube = cube_frame();
  Partition px = cube_axis(cube, 0);
  Partition py = cube_axis(cube, 1);
  Partition pz = cube_axis(cube, 2);
  Partition pxy = meet(px, py);
  Partition pyz = meet(py, pz);
};

TEST_F(IdentityTest, CoarseningOfCombinationOnCube) {
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    const auto b1 = random_carried_mass(rng, pxy, 4);
    const auto b2 = random_carried_mass(rng, pyz, 4);
    const auto r = oracle::check_coarsening_of_combination(pxy, pyz, py, b1, b2, 1e-9);
    EXPECT_TRUE(r.pass) << r.deviation;
  }
}

TEST_F(IdentityTest, ProjectionThroughOnCube) {
  Rng rng(22);
  for (int i = 0; i < 50; ++i) {
    const auto b2 = random_carried_mass(rng, pyz, 4);
    const auto r = oracle::check_projection_through(pxy, pyz, py, b2, 1e-12);
    EXPECT_TRUE(r.pass) << r.deviation;
  }
}

TEST_F(IdentityTest, VacuousCases) {
  const auto v = MassFunction::vacuous(cube);
  EXPECT_EQ(oracle::check_coarsening_of_combination(pxy, pyz, py, v, v, 0.0).deviation, 0.0);
  EXPECT_EQ(oracle::check_projection_through(pxy, pyz, py, v, 0.0).deviation, 0.0);
}

TEST_F(IdentityTest, HypothesisNotSatisfied) {
  const auto v = MassFunction::vacuous(cube);
  const auto trivial = Partition::trivial(cube);
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;
  };
  EXPECT_EQ(code([&] { oracle::check_coarsening_of_combination(pxy, pyz, trivial, v, v, 1e-9); }),
            ErrorCode::HypothesisNotSatisfied);
  EXPECT_EQ(code([&] { oracle::check_projection_through(pxy, pyz, trivial, v, 1e-9); }),
            ErrorCode::HypothesisNotSatisfied);
  const MassFunction fine(cube, {{0b00000001, 1.0}});
  EXPECT_EQ(code([&] { oracle::check_coarsening_of_combination(pxy, pyz, py, fine, v, 1e-9); }),
            ErrorCode::HypothesisNotSatisfied);
  EXPECT_EQ(code([&] { oracle::check_projection_through(pxy, pyz, py, fine, 1e-9); }),
            ErrorCode::HypothesisNotSatisfied);
}

TEST(MarkovDefinitionTest, SmallCases) {
  const Frame cube = cube_frame();
  const auto chain = Network::build(
      cube, {{"x", cube_axis(cube, 0)}, {"y", cube_axis(cube, 1)}, {"z", cube_axis(cube, 2)}}, {{"x", "y"}, {"y", "z"}});
  // x and z are independent coordinates, so even a trivial separator works.
  EXPECT_TRUE(oracle::is_qualitative_markov_network(chain));
  const Frame f = letters_frame(2);
  const auto fine = Partition::singletons(f);
  const auto bad = Network::build(f, {{"l", fine}, {"m", Partition::trivial(f)}, {"r", fine}}, {{"l", "m"}, {"m", "r"}});
  EXPECT_FALSE(oracle::is_qualitative_markov_network(bad));
  const auto single = Network::build(f, {{"only", fine}}, {});
  EXPECT_TRUE(oracle::is_qualitative_markov_network(single));
}

}  // namespace
}  // namespace qmt
