#include "sheafkit/intertwine.hpp"

#include <algorithm>
#include <stdexcept>

#include "engine_common.hpp"

namespace sheafkit {

const char* to_string(ZigzagStep::Kind kind) { return kind == ZigzagStep::Kind::Mu ? "mu" : "eta"; }

namespace {

// Componentwise t o s, no membership checks.
HomTuple product(const HomTuple& t, const HomTuple& s) {
  HomTuple out;
  for (std::size_t k = 0; k < s.betas.size(); ++k) out.betas.push_back(t.betas[k] * s.betas[k]);
  return out;
}

void check_system(const InductiveSystem& sys, const std::string& label, std::size_t n) {
  if (sys.stages.empty()) throw ShapeError(label + ": at least one stage is required");
  if (sys.maps.size() + 1 != sys.stages.size())
    throw ShapeError(label + ": expected " + std::to_string(sys.stages.size() - 1) + " connecting maps");
  for (std::size_t k = 0; k < sys.stages.size(); ++k) {
    require_valid(sys.stages[k]);
    if (sys.stages[k].n() != n)
      throw ShapeError(label + ": stage " + std::to_string(k + 1) +
                       " has a different partition; refine the stages to a common one first");
  }
  for (std::size_t k = 0; k < sys.maps.size(); ++k)
    require_member(sys.stages[k], sys.stages[k + 1], sys.maps[k],
                   label + " connecting map " + std::to_string(k + 1));
}

// Connecting map from stage `from` to stage `to` (1-based, from <= to).
HomTuple connecting(const InductiveSystem& sys, std::size_t from, std::size_t to) {
  HomTuple t = identity(sys.stages[from - 1]);
  for (std::size_t k = from; k < to; ++k) t = product(sys.maps[k - 1], t);
  return t;
}

detail::BlockEquation left_equation(const HomTuple& left, const ElementaryAlgebra& source, HomTuple rhs) {
  detail::BlockEquation eq;
  eq.left = left.betas;
  for (std::size_t k = 1; k <= source.n() + 1; ++k) eq.right.push_back(IntMatrix::identity(source.h(k)));
  eq.rhs = std::move(rhs);
  return eq;
}

detail::BlockEquation right_equation(const HomTuple& right, const ElementaryAlgebra& target, HomTuple rhs) {
  detail::BlockEquation eq;
  for (std::size_t k = 1; k <= target.n() + 1; ++k) eq.left.push_back(IntMatrix::identity(target.h(k)));
  eq.right = right.betas;
  eq.rhs = std::move(rhs);
  return eq;
}

std::string stage_range(char sys, std::size_t lo, std::size_t hi) {
  std::string s(1, sys);
  s += "_" + std::to_string(lo);
  if (hi != lo) s += "..";
  if (hi != lo) s += std::string(1, sys) + "_" + std::to_string(hi);
  return s;
}

}  // namespace

IntertwineReport intertwine(const InductiveSystem& a, const InductiveSystem& b, const HomTuple& alpha) {
  if (a.stages.empty() || b.stages.empty()) throw ShapeError("intertwine: empty system");
  const std::size_t n_part = a.stages.front().n();
  check_system(a, "system A", n_part);
  check_system(b, "system B", n_part);
  const std::size_t big_n = a.stages.size();
  const std::size_t big_m = b.stages.size();
  const ElementaryAlgebra& a_last = a.stages.back();
  const ElementaryAlgebra& b_last = b.stages.back();
  require_member(a_last, b_last, alpha, "alpha");
  const std::optional<HomTuple> alpha_inv = is_isomorphism(a_last, b_last, alpha);

  IntertwineReport report;
  std::size_t n = 1;
  std::size_t m_prev = 0;
  std::optional<HomTuple> eta_prev;

  for (std::size_t round = 1; round <= big_n + big_m + 1; ++round) {
    // mu : A_n -> B_m, psi_{m,inf} mu = alpha phi_{n,inf}, mu eta_prev = psi_{m_prev,m}
    const std::size_t m_lo = eta_prev ? std::min(m_prev + 1, big_m) : 1;
    const HomTuple target_mu = product(alpha, connecting(a, n, big_n));
    std::optional<HomTuple> mu;
    std::size_t m = m_lo;
    for (; m <= big_m && !mu; ++m) {
      std::vector<detail::BlockEquation> eqs{
          left_equation(connecting(b, m, big_m), a.stages[n - 1], target_mu)};
      if (eta_prev) eqs.push_back(right_equation(*eta_prev, b.stages[m - 1], connecting(b, m_prev, m)));
      if (auto sol = detail::solve_hom(a.stages[n - 1], b.stages[m - 1], eqs)) mu = std::move(sol->mu);
    }
    if (!mu) {
      report.failure = IntertwineFailure{round, ZigzagStep::Kind::Mu,
                                         "no morphism A_" + std::to_string(n) + " -> " +
                                             stage_range('B', m_lo, big_m) + " factors alpha"};
      return report;
    }
    --m;
    if (product(connecting(b, m, big_m), *mu) != target_mu ||
        (eta_prev && product(*mu, *eta_prev) != connecting(b, m_prev, m)))
      throw std::logic_error("intertwine: mu triangle does not commute");
    report.steps.push_back({ZigzagStep::Kind::Mu, round, n, m, *mu});

    // eta : B_m -> A_n', phi_{n',inf} eta = alpha^{-1} psi_{m,inf}, eta mu = phi_{n,n'}
    if (!alpha_inv) {
      report.failure = IntertwineFailure{round, ZigzagStep::Kind::Eta,
                                         "alpha is not an isomorphism (a component is not unimodular "
                                         "or its inverse is not a morphism)"};
      return report;
    }
    const std::size_t n_lo = std::min(n + 1, big_n);
    const HomTuple target_eta = product(*alpha_inv, connecting(b, m, big_m));
    std::optional<HomTuple> eta;
    std::size_t n2 = n_lo;
    for (; n2 <= big_n && !eta; ++n2) {
      std::vector<detail::BlockEquation> eqs{
          left_equation(connecting(a, n2, big_n), b.stages[m - 1], target_eta),
          right_equation(*mu, a.stages[n2 - 1], connecting(a, n, n2))};
      if (auto sol = detail::solve_hom(b.stages[m - 1], a.stages[n2 - 1], eqs)) eta = std::move(sol->mu);
    }
    if (!eta) {
      report.failure = IntertwineFailure{round, ZigzagStep::Kind::Eta,
                                         "no morphism B_" + std::to_string(m) + " -> " +
                                             stage_range('A', n_lo, big_n) + " inverts mu"};
      return report;
    }
    --n2;
    if (product(connecting(a, n2, big_n), *eta) != target_eta || product(*eta, *mu) != connecting(a, n, n2))
      throw std::logic_error("intertwine: eta triangle does not commute");
    report.steps.push_back({ZigzagStep::Kind::Eta, round, m, n2, *eta});

    if (n2 == big_n && m == big_m) {
      report.complete = true;
      return report;
    }
    n = n2;
    m_prev = m;
    eta_prev = std::move(eta);
  }
  throw std::logic_error("intertwine: zigzag did not terminate");
}

}  // namespace sheafkit
