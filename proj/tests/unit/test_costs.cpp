#include "helpers.hpp"

#include "wsaa/costs.hpp"
#include "wsaa/error.hpp"

#include <cmath>
#include <doctest.h>

using namespace wsaa;
using testutil::vec;

namespace {

Eigen::MatrixXd
column(std::initializer_list<double> v)
{
  return vec(v);
}

WsaaProblem
random_problem(RngStream& rng, int kind, Eigen::Index n)
{
  if (kind == 0)
    return WsaaProblem(testutil::random_matrix(rng, n, 1, 0.0, 10.0), testutil::random_weights(rng, n),
                       CostModel::newsvendor(testutil::uniform(rng, 0.5, 5), testutil::uniform(rng, 0.5, 5)),
                       testutil::box1(-2.0, 12.0));
  if (kind == 1)
    return WsaaProblem(testutil::random_matrix(rng, n, 1, 0.0, 10.0), testutil::random_weights(rng, n),
                       CostModel::expectile(testutil::uniform(rng, 0.5, 5), testutil::uniform(rng, 0.5, 5)),
                       testutil::box1(-2.0, 12.0));
  const Eigen::VectorXd a = testutil::random_matrix(rng, 2, 1, 0.5, 3.0);
  const Eigen::VectorXd b = testutil::random_matrix(rng, 2, 1, -2.0, 2.0);
  return WsaaProblem(testutil::random_matrix(rng, n, 2, 0.0, 3.0), testutil::random_weights(rng, n),
                     CostModel::quartic(a, b), testutil::box2(-8.0, 8.0));
}

Eigen::VectorXd
random_point(RngStream& rng, const FeasibleBox& box)
{
  Eigen::VectorXd z(box.dim());
  for (int j = 0; j < box.dim(); ++j)
    z[j] = testutil::uniform(rng, box.lower()[j], box.upper()[j]);
  return z;
}

} // namespace

TEST_SUITE("costs")
{
  TEST_CASE("cost values")
  {
    const auto nv = CostModel::newsvendor(10, 2);
    CHECK(cost_value(nv, vec({ 5 }), vec({ 7 })) == 20.0);
    CHECK(cost_value(nv, vec({ 9 }), vec({ 7 })) == 4.0);
    const auto ex = CostModel::expectile(1, 0.5);
    CHECK(cost_value(ex, vec({ 3 }), vec({ 3 })) == 0.0);
    CHECK(cost_value(ex, vec({ 1 }), vec({ 3 })) == 4.0);
    CHECK(cost_value(ex, vec({ 3 }), vec({ 1 })) == 2.0);
    const auto q = CostModel::quartic(vec({ 2 }), vec({ -1 }));
    CHECK(cost_value(q, vec({ 1 }), vec({ 1 })) == 32.0);
    CHECK_THROWS_AS(cost_value(nv, vec({ 1, 2 }), vec({ 1 })), InvalidArgument);
    CHECK_THROWS_AS(cost_value(q, vec({ 1 }), vec({ 1, 2 })), InvalidArgument);
  }

  TEST_CASE("model validation")
  {
    CHECK_THROWS_AS(CostModel::newsvendor(0, 1), InvalidArgument);
    CHECK_THROWS_AS(CostModel::expectile(1, -1), InvalidArgument);
    CHECK_THROWS_AS(CostModel::quartic(vec({ 1, -1 }), vec({ 1, 1 })), InvalidArgument);
    CHECK_THROWS_AS(CostModel::quartic(vec({ 1 }), vec({ 1, 1 })), InvalidArgument);
    CHECK(CostModel::quartic(vec({ 1, 2 }), vec({ 1, 1 })).d_z() == 2);
    CHECK(CostModel::newsvendor(10, 2).critical_level() == doctest::Approx(10.0 / 12.0));
    CHECK_THROWS_AS(CostModel::quartic(vec({ 1 }), vec({ 1 })).critical_level(), WrongModel);
    CHECK_THROWS_AS(FeasibleBox(vec({ 1 }), vec({ 0 })), InvalidArgument);
    CHECK_THROWS_AS(FeasibleBox(vec({ 1 }), vec({ 1 })), InvalidArgument);
    CHECK(FeasibleBox(vec({ 0, 0 }), vec({ 3, 4 })).diameter() == 5.0);
  }

  TEST_CASE("subgradients")
  {
    const auto nv = CostModel::newsvendor(10, 2);
    CHECK(cost_subgradient(nv, vec({ 0 }), vec({ 1 }))[0] == -10.0);
    CHECK(cost_subgradient(nv, vec({ 2 }), vec({ 1 }))[0] == 2.0);
    CHECK(cost_subgradient(nv, vec({ 1 }), vec({ 1 }))[0] == 0.0);
    CHECK_THROWS_AS(cost_subgradient(CostModel::expectile(1, 1), vec({ 0 }), vec({ 1 })), WrongModel);
    CHECK_THROWS_AS(cost_gradient(nv, vec({ 0 }), vec({ 1 })), WrongModel);
    CHECK_THROWS_AS(cost_hessian(nv, vec({ 0 }), vec({ 1 })), WrongModel);
  }

  TEST_CASE("gradients and hessians")
  {
    const auto ex = CostModel::expectile(1, 0.5);
    CHECK(cost_gradient(ex, vec({ 3 }), vec({ 1 }))[0] == 2.0);
    CHECK(cost_gradient(ex, vec({ 1 }), vec({ 3 }))[0] == -4.0);
    CHECK(cost_gradient(ex, vec({ 2 }), vec({ 2 }))[0] == 0.0);
    CHECK(cost_hessian(ex, vec({ 0 }), vec({ 1 }))(0, 0) == 2.0);
    CHECK(cost_hessian(ex, vec({ 2 }), vec({ 1 }))(0, 0) == 1.0);
    const auto q = CostModel::quartic(vec({ 1 }), vec({ 1 }));
    CHECK(cost_gradient(q, vec({ 2 }), vec({ 1 }))[0] == 4.0);
    CHECK(cost_hessian(q, vec({ 2 }), vec({ 1 }))(0, 0) == 12.0);
    const auto q2 = CostModel::quartic(vec({ 1, 3 }), vec({ 2, -1 }));
    const Eigen::MatrixXd H = cost_hessian(q2, vec({ 2, -1 }), vec({ 1, 1 }));
    CHECK(H.isZero(0.0));
  }

  TEST_CASE("weighted objective")
  {
    const WsaaProblem p(column({ 0, 2 }), WeightVector::uniform(2), CostModel::newsvendor(1, 1),
                        testutil::box1(0, 2));
    CHECK(wsaa_objective(p, vec({ 1 })) == 1.0);

    const WsaaProblem same(column({ 4, 4, 4 }), WeightVector::uniform(3), CostModel::expectile(1, 0.5),
                           testutil::box1(0, 10));
    CHECK(wsaa_objective(same, vec({ 1 })) == doctest::Approx(cost_value(same.model(), vec({ 1 }), vec({ 4 }))));

    const WsaaProblem pm(column({ 1, 5, 9 }), WeightVector::point_mass(3, 1), CostModel::expectile(2, 0.5),
                         testutil::box1(0, 10));
    CHECK(wsaa_grad(pm, vec({ 3 }))[0] == cost_gradient(pm.model(), vec({ 3 }), vec({ 5 }))[0]);
    CHECK(wsaa_hessian(pm, vec({ 3 }))(0, 0) == 4.0);
    CHECK_THROWS_AS(wsaa_grad(p, vec({ 1 })), WrongModel);
    CHECK_THROWS_AS(wsaa_subgrad(pm, vec({ 1 })), WrongModel);
    CHECK_THROWS_AS(WsaaProblem(column({ 1, 2 }), WeightVector::uniform(3), CostModel::newsvendor(1, 1),
                                testutil::box1(0, 1)),
                    InvalidArgument);
  }

  TEST_CASE("finite-difference gradient check")
  {
    RngStream rng(21, 1);
    for (int kind = 1; kind <= 2; ++kind)
      for (int t = 0; t < 100; ++t) {
        const WsaaProblem p = random_problem(rng, kind, 25);
        const Eigen::VectorXd z = random_point(rng, p.box());
        const Eigen::VectorXd g = wsaa_grad(p, z);
        Eigen::VectorXd fd(z.size());
        for (Eigen::Index j = 0; j < z.size(); ++j) {
          const double s = 1e-5 * std::max(1.0, std::abs(z[j]));
          Eigen::VectorXd zp = z, zm = z;
          zp[j] += s;
          zm[j] -= s;
          fd[j] = (wsaa_objective(p, zp) - wsaa_objective(p, zm)) / (2 * s);
        }
        CHECK((fd - g).norm() <= 1e-5 * std::max(1.0, g.norm()));
      }
  }

  TEST_CASE("finite-difference hessian check away from kinks")
  {
    RngStream rng(22, 1);
    int checked = 0;
    for (int kind = 1; kind <= 2; ++kind)
      for (int t = 0; t < 100; ++t) {
        const WsaaProblem p = random_problem(rng, kind, 25);
        const Eigen::VectorXd z = random_point(rng, p.box());
        const double s = 1e-6 * std::max(1.0, z.cwiseAbs().maxCoeff());
        if (kind == 1 && ((p.outcomes().col(0).array() - z[0]).abs() < 100 * s).any())
          continue;
        const Eigen::MatrixXd H = wsaa_hessian(p, z);
        Eigen::MatrixXd fd(z.size(), z.size());
        for (Eigen::Index j = 0; j < z.size(); ++j) {
          Eigen::VectorXd zp = z, zm = z;
          zp[j] += s;
          zm[j] -= s;
          fd.col(j) = (wsaa_grad(p, zp) - wsaa_grad(p, zm)) / (2 * s);
        }
        CHECK((fd - H).norm() <= 1e-4 * std::max(1.0, H.norm()));
        ++checked;
      }
    CHECK(checked > 150);
  }

  TEST_CASE("convexity witness")
  {
    RngStream rng(23, 1);
    for (int kind = 0; kind <= 2; ++kind)
      for (int t = 0; t < 200; ++t) {
        const WsaaProblem p = random_problem(rng, kind, 15);
        const Eigen::VectorXd z1 = random_point(rng, p.box());
        const Eigen::VectorXd z2 = random_point(rng, p.box());
        const double l = rng.uniform_open();
        const double lhs = wsaa_objective(p, l * z1 + (1 - l) * z2);
        const double rhs = l * wsaa_objective(p, z1) + (1 - l) * wsaa_objective(p, z2);
        CHECK(lhs <= rhs + 1e-10 * std::max(1.0, std::abs(rhs)));
      }
  }

  TEST_CASE("subgradient inequality")
  {
    RngStream rng(24, 1);
    for (int t = 0; t < 500; ++t) {
      const WsaaProblem p = random_problem(rng, 0, 15);
      const Eigen::VectorXd z1 = random_point(rng, p.box());
      const Eigen::VectorXd z2 = random_point(rng, p.box());
      const double lin = wsaa_objective(p, z1) + wsaa_subgrad(p, z1).dot(z2 - z1);
      CHECK(wsaa_objective(p, z2) >= lin - 1e-10);
    }
  }

  TEST_CASE("objective gap matches the plain difference")
  {
    RngStream rng(25, 1);
    for (int kind = 0; kind <= 2; ++kind)
      for (int t = 0; t < 100; ++t) {
        const WsaaProblem p = random_problem(rng, kind, 20);
        const Eigen::VectorXd z = random_point(rng, p.box());
        const Eigen::VectorXd r = random_point(rng, p.box());
        const double plain = wsaa_objective(p, z) - wsaa_objective(p, r);
        const double scale = std::max(1.0, std::abs(wsaa_objective(p, z)));
        CHECK(std::abs(wsaa_objective_gap(p, z, r) - plain) <= 1e-12 * scale);
        CHECK(wsaa_objective_gap(p, z, z) == 0.0);
      }
  }

  TEST_CASE("objective gap is accurate for nearby points")
  {
    // f(z) - f(z*) = (z - z*)^2 for an equal-weight expectile problem with c_u = c_o = 1
    // when every outcome lies on one side of both points
    const WsaaProblem p(column({ 1000.0, 1000.0 }), WeightVector::uniform(2), CostModel::expectile(1, 1),
                        testutil::box1(0, 2000));
    const double e = 1e-9;
    const double gap = wsaa_objective_gap(p, vec({ 1000.0 + e }), vec({ 1000.0 }));
    CHECK(gap == doctest::Approx(e * e).epsilon(1e-6));
  }

  TEST_CASE("box projection")
  {
    const FeasibleBox b(vec({ 0, -1 }), vec({ 1, 1 }));
    const Eigen::VectorXd p = b.project(vec({ 2, -3 }));
    CHECK(p[0] == 1.0);
    CHECK(p[1] == -1.0);
    CHECK(b.contains(vec({ 1 + 1e-11, 0 })));
    CHECK_FALSE(b.contains(vec({ 1 + 1e-9, 0 })));
    CHECK(b.midpoint()[0] == 0.5);
  }
}
