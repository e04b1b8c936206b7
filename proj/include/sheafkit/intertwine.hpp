#pragma once

// Finite-depth intertwining of two inductive systems of elementary algebras,
// given an isomorphism between their final stages.

#include <optional>
#include <string>
#include <vector>

#include "sheafkit/etheory.hpp"

namespace sheafkit {

/// A_1 -> A_2 -> ... -> A_N; maps[k-1] is the connecting map A_k -> A_{k+1}.
/// The final stage stands in for the limit.
struct InductiveSystem {
  std::vector<ElementaryAlgebra> stages;
  std::vector<HomTuple> maps;
};

struct ZigzagStep {
  enum class Kind { Mu, Eta };
  Kind kind = Kind::Mu;
  std::size_t round = 0;
  std::size_t from = 0;  // stage index (1-based) in the source system
  std::size_t to = 0;    // stage index in the target system
  HomTuple map;
};

struct IntertwineFailure {
  std::size_t round = 0;
  ZigzagStep::Kind kind = ZigzagStep::Kind::Mu;
  std::string reason;
};

struct IntertwineReport {
  bool complete = false;
  std::vector<ZigzagStep> steps;
  std::optional<IntertwineFailure> failure;
};

/// Throws ShapeError when the stages do not share one partition and
/// MembershipError when a connecting map or alpha is not a morphism.
IntertwineReport intertwine(const InductiveSystem& a, const InductiveSystem& b, const HomTuple& alpha);

const char* to_string(ZigzagStep::Kind kind);

}  // namespace sheafkit
