#include "wsaa/costs.hpp"

#include "wsaa/error.hpp"

#include <cassert>
#include <cmath>

namespace wsaa {

CostModel
CostModel::newsvendor(double cu, double co)
{
  if (!(cu > 0.0) || !(co > 0.0))
    throw InvalidArgument("newsvendor costs need c_u > 0 and c_o > 0");
  return CostModel(NewsvendorCost{ cu, co }, 1);
}

CostModel
CostModel::expectile(double cu, double co)
{
  if (!(cu > 0.0) || !(co > 0.0))
    throw InvalidArgument("expectile costs need c_u > 0 and c_o > 0");
  return CostModel(ExpectileCost{ cu, co }, 1);
}

CostModel
CostModel::quartic(Eigen::VectorXd a, Eigen::VectorXd b)
{
  if (a.size() == 0 || a.size() != b.size())
    throw InvalidArgument("quartic cost needs coefficient vectors of equal, positive length");
  if (!a.allFinite() || !b.allFinite())
    throw InvalidArgument("quartic coefficients must be finite");
  if ((a.array() <= 0.0).any())
    throw InvalidArgument("quartic cost needs every a_j > 0");
  const int d = static_cast<int>(a.size());
  return CostModel(QuarticCost{ std::move(a), std::move(b) }, d);
}

std::string_view
CostModel::name() const
{
  if (as<NewsvendorCost>())
    return "newsvendor";
  if (as<ExpectileCost>())
    return "expectile";
  return "quartic";
}

bool
CostModel::differentiable() const noexcept
{
  return as<NewsvendorCost>() == nullptr;
}

double
CostModel::critical_level() const
{
  if (const auto* nv = as<NewsvendorCost>())
    return nv->cu / (nv->cu + nv->co);
  if (const auto* ex = as<ExpectileCost>())
    return ex->cu / (ex->cu + ex->co);
  throw WrongModel("critical level is defined for newsvendor and expectile costs only");
}

FeasibleBox::FeasibleBox(Eigen::VectorXd lower, Eigen::VectorXd upper)
  : lower_(std::move(lower))
  , upper_(std::move(upper))
{
  if (lower_.size() == 0 || lower_.size() != upper_.size())
    throw InvalidArgument("box bounds must be nonempty and of equal length");
  if (!lower_.allFinite() || !upper_.allFinite())
    throw InvalidArgument("box bounds must be finite");
  if ((lower_.array() > upper_.array()).any())
    throw InvalidArgument("box needs lower <= upper componentwise");
  if (!(diameter() > 0.0))
    throw InvalidArgument("box must have positive diameter");
}

Eigen::VectorXd
FeasibleBox::project(const Eigen::VectorXd& z) const
{
  return z.cwiseMax(lower_).cwiseMin(upper_);
}

bool
FeasibleBox::contains(const Eigen::VectorXd& z, double tol) const
{
  if (z.size() != lower_.size())
    return false;
  return ((z.array() >= lower_.array() - tol) && (z.array() <= upper_.array() + tol)).all();
}

WsaaProblem::WsaaProblem(Eigen::MatrixXd outcomes, WeightVector weights, CostModel model, FeasibleBox box)
  : y_(std::move(outcomes))
  , w_(std::move(weights))
  , model_(std::move(model))
  , box_(std::move(box))
{
  if (static_cast<std::size_t>(y_.rows()) != w_.size())
    throw InvalidArgument("weight count must equal outcome count");
  if (y_.cols() != model_.d_y())
    throw InvalidArgument("outcome dimension does not match the cost model");
  if (box_.dim() != model_.d_z())
    throw InvalidArgument("box dimension does not match the cost model");
  if (!y_.allFinite())
    throw InvalidArgument("outcomes must be finite");
}

namespace {

void
check_dims(const CostModel& model, const Eigen::VectorXd& z, const Eigen::VectorXd& y)
{
  if (z.size() != model.d_z() || y.size() != model.d_y())
    throw InvalidArgument("decision or outcome dimension does not match the cost model");
  if (!z.allFinite() || !y.allFinite())
    throw InvalidArgument("decision and outcome must be finite");
}

void
check_decision(const WsaaProblem& p, const Eigen::VectorXd& z)
{
  if (z.size() != p.model().d_z())
    throw InvalidArgument("decision dimension does not match the cost model");
  assert(p.box().contains(z, 1e-8));
}

inline double
newsvendor_value(const NewsvendorCost& c, double z, double y)
{
  return y > z ? c.cu * (y - z) : c.co * (z - y);
}

inline double
newsvendor_slope(const NewsvendorCost& c, double z, double y)
{
  if (z < y)
    return -c.cu;
  if (z > y)
    return c.co;
  return 0.0;
}

inline double
expectile_value(const ExpectileCost& c, double z, double y)
{
  const double g = y - z;
  return y >= z ? c.cu * g * g : c.co * g * g;
}

inline double
expectile_slope(const ExpectileCost& c, double z, double y)
{
  return y >= z ? -2.0 * c.cu * (y - z) : 2.0 * c.co * (z - y);
}

inline double
expectile_curvature(const ExpectileCost& c, double z, double y)
{
  return y > z ? 2.0 * c.cu : 2.0 * c.co;
}

} // namespace

double
cost_value(const CostModel& model, const Eigen::VectorXd& z, const Eigen::VectorXd& y)
{
  check_dims(model, z, y);
  if (const auto* nv = model.as<NewsvendorCost>())
    return newsvendor_value(*nv, z[0], y[0]);
  if (const auto* ex = model.as<ExpectileCost>())
    return expectile_value(*ex, z[0], y[0]);
  const auto& q = *model.as<QuarticCost>();
  double total = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double r = z[j] - q.b[j] * y[j];
    total += q.a[j] * (r * r) * (r * r);
  }
  return total;
}

Eigen::VectorXd
cost_subgradient(const CostModel& model, const Eigen::VectorXd& z, const Eigen::VectorXd& y)
{
  check_dims(model, z, y);
  const auto* nv = model.as<NewsvendorCost>();
  if (!nv)
    throw WrongModel("subgradient requested for a differentiable cost; use the gradient");
  return Eigen::VectorXd::Constant(1, newsvendor_slope(*nv, z[0], y[0]));
}

Eigen::VectorXd
cost_gradient(const CostModel& model, const Eigen::VectorXd& z, const Eigen::VectorXd& y)
{
  check_dims(model, z, y);
  if (model.as<NewsvendorCost>())
    throw WrongModel("newsvendor cost is not differentiable");
  if (const auto* ex = model.as<ExpectileCost>())
    return Eigen::VectorXd::Constant(1, expectile_slope(*ex, z[0], y[0]));
  const auto& q = *model.as<QuarticCost>();
  Eigen::VectorXd g(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double r = z[j] - q.b[j] * y[j];
    g[j] = 4.0 * q.a[j] * r * r * r;
  }
  return g;
}

Eigen::MatrixXd
cost_hessian(const CostModel& model, const Eigen::VectorXd& z, const Eigen::VectorXd& y)
{
  check_dims(model, z, y);
  if (model.as<NewsvendorCost>())
    throw WrongModel("newsvendor cost is not differentiable");
  if (const auto* ex = model.as<ExpectileCost>())
    return Eigen::MatrixXd::Constant(1, 1, expectile_curvature(*ex, z[0], y[0]));
  const auto& q = *model.as<QuarticCost>();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(z.size(), z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double r = z[j] - q.b[j] * y[j];
    H(j, j) = 12.0 * q.a[j] * r * r;
  }
  return H;
}

Eigen::VectorXd
sample_costs(const CostModel& model, const Eigen::Ref<const Eigen::MatrixXd>& Y, const Eigen::VectorXd& z)
{
  if (z.size() != model.d_z() || Y.cols() != model.d_y())
    throw InvalidArgument("decision or outcome dimension does not match the cost model");
  const Eigen::Index n = Y.rows();
  Eigen::VectorXd out(n);
  if (const auto* nv = model.as<NewsvendorCost>()) {
    for (Eigen::Index i = 0; i < n; ++i)
      out[i] = newsvendor_value(*nv, z[0], Y(i, 0));
  } else if (const auto* ex = model.as<ExpectileCost>()) {
    for (Eigen::Index i = 0; i < n; ++i)
      out[i] = expectile_value(*ex, z[0], Y(i, 0));
  } else {
    const auto& q = *model.as<QuarticCost>();
    out.setZero();
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double r = z[j] - q.b[j] * Y(i, j);
        out[i] += q.a[j] * (r * r) * (r * r);
      }
    }
  }
  return out;
}

double
wsaa_objective(const WsaaProblem& p, const Eigen::VectorXd& z)
{
  check_decision(p, z);
  return p.weights().values().dot(sample_costs(p.model(), p.outcomes(), z));
}

Eigen::VectorXd
wsaa_grad(const WsaaProblem& p, const Eigen::VectorXd& z)
{
  check_decision(p, z);
  const auto& model = p.model();
  const auto& Y = p.outcomes();
  const auto& w = p.weights().values();
  const Eigen::Index n = Y.rows();
  if (model.as<NewsvendorCost>())
    throw WrongModel("newsvendor cost is not differentiable");
  if (const auto* ex = model.as<ExpectileCost>()) {
    double g = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      g += w[i] * expectile_slope(*ex, z[0], Y(i, 0));
    return Eigen::VectorXd::Constant(1, g);
  }
  const auto& q = *model.as<QuarticCost>();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = z[j] - q.b[j] * Y(i, j);
      acc += w[i] * r * r * r;
    }
    g[j] = 4.0 * q.a[j] * acc;
  }
  return g;
}

Eigen::VectorXd
wsaa_subgrad(const WsaaProblem& p, const Eigen::VectorXd& z)
{
  check_decision(p, z);
  const auto* nv = p.model().as<NewsvendorCost>();
  if (!nv)
    throw WrongModel("subgradient requested for a differentiable cost; use the gradient");
  const auto& Y = p.outcomes();
  const auto& w = p.weights().values();
  double g = 0.0;
  for (Eigen::Index i = 0; i < Y.rows(); ++i)
    g += w[i] * newsvendor_slope(*nv, z[0], Y(i, 0));
  return Eigen::VectorXd::Constant(1, g);
}

Eigen::MatrixXd
wsaa_hessian(const WsaaProblem& p, const Eigen::VectorXd& z)
{
  check_decision(p, z);
  const auto& model = p.model();
  const auto& Y = p.outcomes();
  const auto& w = p.weights().values();
  const Eigen::Index n = Y.rows();
  if (model.as<NewsvendorCost>())
    throw WrongModel("newsvendor cost is not differentiable");
  if (const auto* ex = model.as<ExpectileCost>()) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      h += w[i] * expectile_curvature(*ex, z[0], Y(i, 0));
    return Eigen::MatrixXd::Constant(1, 1, h);
  }
  const auto& q = *model.as<QuarticCost>();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(z.size(), z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = z[j] - q.b[j] * Y(i, j);
      acc += w[i] * r * r;
    }
    H(j, j) = 12.0 * q.a[j] * acc;
  }
  return H;
}

double
wsaa_objective_gap(const WsaaProblem& p, const Eigen::VectorXd& z, const Eigen::VectorXd& ref)
{
  check_decision(p, z);
  check_decision(p, ref);
  const auto& model = p.model();
  const auto& Y = p.outcomes();
  const auto& w = p.weights().values();
  const Eigen::Index n = Y.rows();
  double total = 0.0;

  if (const auto* nv = model.as<NewsvendorCost>()) {
    const double a = z[0], b = ref[0];
    for (Eigen::Index i = 0; i < n; ++i) {
      const double y = Y(i, 0);
      double d;
      if (y >= a && y >= b)
        d = nv->cu * (b - a);
      else if (y <= a && y <= b)
        d = nv->co * (a - b);
      else
        d = newsvendor_value(*nv, a, y) - newsvendor_value(*nv, b, y);
      total += w[i] * d;
    }
    return total;
  }

  if (const auto* ex = model.as<ExpectileCost>()) {
    const double a = z[0], b = ref[0];
    for (Eigen::Index i = 0; i < n; ++i) {
      const double y = Y(i, 0);
      double d;
      if (y >= a && y >= b)
        d = ex->cu * (b - a) * ((y - a) + (y - b));
      else if (y < a && y < b)
        d = ex->co * (a - b) * ((a - y) + (b - y));
      else
        d = expectile_value(*ex, a, y) - expectile_value(*ex, b, y);
      total += w[i] * d;
    }
    return total;
  }

  // u^4 - v^4 = (u - v)(u + v)(u^2 + v^2) with u - v = z_j - ref_j exactly
  const auto& q = *model.as<QuarticCost>();
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double diff = z[j] - ref[j];
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double by = q.b[j] * Y(i, j);
      const double u = z[j] - by;
      const double v = ref[j] - by;
      acc += w[i] * (u + v) * (u * u + v * v);
    }
    total += q.a[j] * diff * acc;
  }
  return total;
}

} // namespace wsaa
