#include "wsaa/tune.hpp"

#include "wsaa/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wsaa {

void
CvGrid::validate() const
{
  if (h0_candidates.empty())
    throw InvalidArgument("CV grid needs at least one h0 candidate");
  for (double h : h0_candidates)
    if (!(h > 0.0) || !std::isfinite(h))
      throw InvalidArgument("h0 candidates must be positive");
  for (double mu : mu0_candidates)
    if (!(mu > 0.0) || !std::isfinite(mu))
      throw InvalidArgument("mu0 candidates must be positive");
  if (k < 2)
    throw InvalidArgument("CV needs k >= 2 folds");
}

std::vector<std::vector<std::size_t>>
make_folds(std::size_t n, int k, RngStream& rng)
{
  if (k < 2 || n < static_cast<std::size_t>(k))
    throw InvalidArgument("folds need k >= 2 and n >= k");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{ 0 });
  for (std::size_t i = n; i > 1; --i)
    std::swap(perm[i - 1], perm[rng.below(i)]);

  const auto kk = static_cast<std::size_t>(k);
  const std::size_t base = n / kk;
  const std::size_t extra = n % kk;
  std::vector<std::vector<std::size_t>> folds(kk);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < kk; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                    perm.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return folds;
}

namespace {

bool
lex_less(const std::optional<Eigen::VectorXd>& a, const std::optional<Eigen::VectorXd>& b)
{
  if (!a || !b)
    return false;
  return std::lexicographical_compare(a->data(), a->data() + a->size(), b->data(), b->data() + b->size());
}

bool
better(const CvCandidate& a, const CvCandidate& b)
{
  if (a.score != b.score)
    return a.score < b.score;
  if (a.h0 != b.h0)
    return a.h0 < b.h0;
  if (a.mu0 && b.mu0 && *a.mu0 != *b.mu0)
    return *a.mu0 < *b.mu0;
  return lex_less(a.z0, b.z0);
}

} // namespace

CvResult
kfold_cv(const Dataset& data, const Eigen::VectorXd& x0, const CvGrid& grid, const CvSetup& setup, RngStream& rng)
{
  grid.validate();
  const auto n = static_cast<std::size_t>(data.size());
  if (n < 2 * static_cast<std::size_t>(grid.k))
    throw InvalidArgument("CV needs n >= 2k");
  if (data.Y.cols() != setup.model.d_y())
    throw InvalidArgument("dataset outcome dimension does not match the cost model");
  const bool budgeted = setup.solver.has_value();
  if (!budgeted && (!grid.mu0_candidates.empty() || !grid.z0_candidates.empty()))
    throw InvalidArgument("mu0 and z0 can only be tuned for budgeted solves");
  if (!grid.mu0_candidates.empty() && !std::holds_alternative<SubgradientMethod>(setup.solver->algorithm))
    throw InvalidArgument("mu0 is only tuned for the subgradient method");

  const auto folds = make_folds(n, grid.k, rng);

  // Retained-data views are shared by every candidate.
  struct FoldData
  {
    Eigen::MatrixXd X, Y, Yout;
  };
  std::vector<FoldData> fd(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<char> held(n, 0);
    for (std::size_t i : folds[f])
      held[i] = 1;
    const auto keep = static_cast<Eigen::Index>(n - folds[f].size());
    fd[f].X.resize(keep, data.X.cols());
    fd[f].Y.resize(keep, data.Y.cols());
    fd[f].Yout.resize(static_cast<Eigen::Index>(folds[f].size()), data.Y.cols());
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (held[i])
        continue;
      fd[f].X.row(r) = data.X.row(static_cast<Eigen::Index>(i));
      fd[f].Y.row(r) = data.Y.row(static_cast<Eigen::Index>(i));
      ++r;
    }
    for (std::size_t j = 0; j < folds[f].size(); ++j)
      fd[f].Yout.row(static_cast<Eigen::Index>(j)) = data.Y.row(static_cast<Eigen::Index>(folds[f][j]));
  }

  std::vector<std::optional<double>> mus;
  for (double mu : grid.mu0_candidates)
    mus.emplace_back(mu);
  if (mus.empty())
    mus.emplace_back();
  std::vector<std::optional<Eigen::VectorXd>> z0s;
  for (const auto& z : grid.z0_candidates)
    z0s.emplace_back(z);
  if (z0s.empty())
    z0s.emplace_back();

  CvResult result;
  for (double h0 : grid.h0_candidates) {
    const double h = h0 * std::pow(static_cast<double>(n), -setup.delta);
    for (const auto& mu : mus) {
      for (const auto& z0 : z0s) {
        CvCandidate c;
        c.h0 = h0;
        c.mu0 = mu;
        c.z0 = z0;
        double total = 0.0;
        for (std::size_t f = 0; f < folds.size() && !c.disqualified; ++f) {
          try {
            WsaaProblem prob(fd[f].Y, nw_weights(fd[f].X, x0, setup.kernel, h), setup.model, setup.box);
            Eigen::VectorXd z;
            if (budgeted) {
              SolverConfig cfg = *setup.solver;
              if (mu)
                std::get<SubgradientMethod>(cfg.algorithm).mu0 = *mu;
              if (z0)
                cfg.z0 = *z0;
              z = run_solver(prob, cfg).delivered();
            } else {
              z = solve_exact(prob).z;
            }
            const double s = sample_costs(setup.model, fd[f].Yout, z).sum();
            c.fold_scores.push_back(s);
            total += s;
          } catch (const Error& e) {
            c.disqualified = true;
            c.reason = e.what();
          }
        }
        c.score = c.disqualified ? std::numeric_limits<double>::infinity() : total / static_cast<double>(folds.size());
        result.candidates.push_back(std::move(c));
      }
    }
  }

  const auto it = std::min_element(result.candidates.begin(), result.candidates.end(), better);
  if (it->disqualified)
    throw Error("every CV candidate was disqualified; last reason: " + it->reason);
  result.best = *it;
  return result;
}

std::vector<double>
default_h0_grid(const Dataset& data)
{
  if (data.size() < 2)
    throw InvalidArgument("default h0 grid needs at least two samples");
  double sd = 0.0;
  for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
    const auto col = data.X.col(j).array();
    const double mean = col.mean();
    sd += std::sqrt((col - mean).square().sum() / static_cast<double>(data.size() - 1));
  }
  sd /= static_cast<double>(data.X.cols());
  return { 0.25 * sd, 0.5 * sd, sd, 2.0 * sd, 4.0 * sd };
}

} // namespace wsaa
