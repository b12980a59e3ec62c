#include "mpsc/classify.hpp"

#include <algorithm>
#include <cmath>

namespace mpsc {

std::string to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None:
      return "NONE";
    case FailureReason::Nd3Fails:
      return "ND3_FAILS";
    case FailureReason::SingularSubset:
      return "SINGULAR_SUBSET";
    case FailureReason::SignMismatch:
      return "SIGN_MISMATCH";
  }
  return "NONE";
}

std::string to_string(PointKind k) {
  switch (k) {
    case PointKind::Minimizer:
      return "minimizer";
    case PointKind::Saddle:
      return "saddle";
    case PointKind::HigherIndex:
      return "higher-index";
    case PointKind::Degenerate:
      return "degenerate: minimizer test inconclusive";
  }
  return "";
}

namespace {

bool licq_holds(const Problem& p, const Vector& x, const IndexSets& idx, const ToleranceConfig& tol) {
  const Matrix g = licq_matrix(p, x, idx);
  return rank(g, tol) == g.rows();
}

Inertia restricted_inertia(const Matrix& hess, const Matrix& basis, const ToleranceConfig& tol) {
  return inertia(basis.transpose() * hess * basis, tol);
}

}  // namespace

Matrix tangent_constraints(const Problem& p, const Vector& x, const IndexSets& idx,
                           const std::vector<int>& jstar) {
  std::vector<Vector> rows;
  for (const auto& h : p.equalities()) rows.push_back(eval_gradient(h, x));
  for (int j : jstar) rows.push_back(eval_gradient(p.inequalities()[j], x));
  for (int m : idx.alpha) rows.push_back(eval_gradient(p.switches()[m].first, x));
  for (int m : idx.gamma) rows.push_back(eval_gradient(p.switches()[m].second, x));
  for (int m : idx.beta) {
    rows.push_back(eval_gradient(p.switches()[m].first, x));
    rows.push_back(eval_gradient(p.switches()[m].second, x));
  }
  Matrix a(static_cast<Eigen::Index>(rows.size()), p.dimension());
  for (std::size_t r = 0; r < rows.size(); ++r) a.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return a;
}

Matrix tangent_basis(const Problem& p, const Vector& x, const IndexSets& idx, const std::vector<int>& jstar,
                     const ToleranceConfig& tol) {
  if (!licq_holds(p, x, idx, tol)) throw LicqViolationError("tangent_basis: LICQ fails at the point");
  return nullspace_basis(tangent_constraints(p, x, idx, jstar), tol);
}

Matrix lagrangian_hessian(const Problem& p, const Vector& x, const Multipliers& mult) {
  Matrix h = eval_hessian(p.objective(), x);
  for (int i = 0; i < p.num_equalities(); ++i) {
    if (mult.lambda[i] != 0.0) h -= mult.lambda[i] * eval_hessian(p.equalities()[i], x);
  }
  for (int j = 0; j < p.num_inequalities(); ++j) {
    if (mult.mu[j] != 0.0) h -= mult.mu[j] * eval_hessian(p.inequalities()[j], x);
  }
  for (int m = 0; m < p.num_switches(); ++m) {
    if (mult.sigma1[m] != 0.0) h -= mult.sigma1[m] * eval_hessian(p.switches()[m].first, x);
    if (mult.sigma2[m] != 0.0) h -= mult.sigma2[m] * eval_hessian(p.switches()[m].second, x);
  }
  return h;
}

WIndex quadratic_index(const Problem& p, const Vector& x, const Multipliers& mult, const IndexSets& idx,
                       const ToleranceConfig& tol) {
  const Matrix basis = tangent_basis(p, x, idx, idx.J0, tol);
  const Inertia in = restricted_inertia(lagrangian_hessian(p, x, mult), basis, tol);
  WIndex w;
  w.qi = in.n_neg;
  w.bi = static_cast<int>(idx.beta.size());
  w.w = w.qi + w.bi;
  w.tangent_dim = static_cast<int>(basis.cols());
  w.degenerate = in.n_zero > 0;
  return w;
}

NDReport check_nondegeneracy(const Problem& p, const Vector& x, const Multipliers& mult, const IndexSets& idx,
                             const ToleranceConfig& tol) {
  NDReport r;
  const Matrix g = licq_matrix(p, x, idx);
  r.licq_rows = static_cast<int>(g.rows());
  r.licq_rank = rank(g, tol);
  r.nd1 = r.licq_rank == r.licq_rows;

  for (int j : idx.J0) {
    if (!(mult.mu[j] > tol.sign)) r.nd2_failures.push_back(j);
  }
  r.nd2 = r.nd2_failures.empty();

  for (int m : idx.beta) {
    if (!(std::abs(mult.sigma1[m]) > tol.sign && std::abs(mult.sigma2[m]) > tol.sign)) r.nd3_failures.push_back(m);
  }
  r.nd3 = r.nd3_failures.empty();

  // Without LICQ the stack is rank deficient; the nullspace is still well defined.
  const Matrix basis = nullspace_basis(tangent_constraints(p, x, idx, idx.J0), tol);
  r.restricted_inertia = restricted_inertia(lagrangian_hessian(p, x, mult), basis, tol);
  r.nd4 = r.restricted_inertia.n_zero == 0;
  return r;
}

StabilityVerdict check_strong_stability(const Problem& p, const Vector& x, const Multipliers& mult,
                                        const IndexSets& idx, const ToleranceConfig& tol, std::size_t subset_cap) {
  if (!licq_holds(p, x, idx, tol)) {
    throw LicqViolationError("check_strong_stability: LICQ fails, point is outside the characterization");
  }
  StabilityVerdict v;
  std::vector<int> free;
  for (int j : idx.J0) {
    if (mult.mu[j] > tol.sign)
      v.j_plus.push_back(j);
    else
      free.push_back(j);
  }
  if (free.size() >= 63 || (std::size_t{1} << free.size()) > subset_cap) {
    throw SubsetCapError("check_strong_stability: 2^" + std::to_string(free.size()) +
                         " inequality subsets exceed the subset cap of " + std::to_string(subset_cap));
  }

  v.nd3_holds = true;
  for (int m : idx.beta) {
    if (!(std::abs(mult.sigma1[m]) > tol.sign && std::abs(mult.sigma2[m]) > tol.sign)) v.nd3_holds = false;
  }

  const Matrix hess = lagrangian_hessian(p, x, mult);
  const std::size_t count = std::size_t{1} << free.size();
  for (std::size_t mask = 0; mask < count; ++mask) {
    SubsetResult s;
    s.jstar = v.j_plus;
    for (std::size_t b = 0; b < free.size(); ++b) {
      if (mask & (std::size_t{1} << b)) s.jstar.push_back(free[b]);
    }
    std::sort(s.jstar.begin(), s.jstar.end());
    const Matrix basis = nullspace_basis(tangent_constraints(p, x, idx, s.jstar), tol);
    s.dimension = static_cast<int>(basis.cols());
    s.det_sign = det_sign(restricted_inertia(hess, basis, tol));
    v.subset_results.push_back(std::move(s));
  }

  bool singular = false;
  bool mismatch = false;
  const int first = v.subset_results.front().det_sign;
  for (const auto& s : v.subset_results) {
    if (s.det_sign == 0) singular = true;
    if (s.det_sign != first) mismatch = true;
  }
  if (!v.nd3_holds)
    v.failure_reason = FailureReason::Nd3Fails;
  else if (singular)
    v.failure_reason = FailureReason::SingularSubset;
  else if (mismatch)
    v.failure_reason = FailureReason::SignMismatch;
  v.strongly_stable = v.failure_reason == FailureReason::None;
  return v;
}

Classification classify_point(const Problem& p, const Vector& x, const Multipliers& mult, const IndexSets& idx,
                              const ToleranceConfig& tol) {
  Classification c;
  c.objective = eval_value(p.objective(), x);
  c.nd = check_nondegeneracy(p, x, mult, idx, tol);
  c.index.qi = c.nd.restricted_inertia.n_neg;
  c.index.bi = static_cast<int>(idx.beta.size());
  c.index.w = c.index.qi + c.index.bi;
  c.index.tangent_dim = c.nd.restricted_inertia.dimension();
  c.index.degenerate = !c.nd.nd4;

  if (!c.nd.nondegenerate()) {
    c.kind = PointKind::Degenerate;
  } else if (c.index.w == 0) {
    c.kind = PointKind::Minimizer;
  } else if (c.index.w == 1) {
    c.kind = PointKind::Saddle;
  } else {
    c.kind = PointKind::HigherIndex;
  }
  c.is_local_minimizer = c.kind == PointKind::Minimizer;
  if (c.nd.nd1) c.stability = check_strong_stability(p, x, mult, idx, tol);
  return c;
}

}  // namespace mpsc
