#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "budget.hpp"
#include "sleec/checker.hpp"

namespace sleec::detail {

/// Identity of a finding: its kind and the rules involved (model indices, sorted).
struct Signature {
    VerdictKind kind = VerdictKind::Deadlock;
    std::vector<std::size_t> rules;

    friend bool operator==(const Signature&, const Signature&) = default;
    friend auto operator<=>(const Signature&, const Signature&) = default;
};

struct Finding {
    Trace trace;
    /// Blocked event for deadlocks; unused for divergences.
    std::size_t event = 0;
};

struct ExplorationResult {
    std::map<Signature, Finding> findings;
    bool partial = false;
};

/// Solves the bounded compliance game: the environment fires trigger events and
/// samples measures, the agent answers with obligated events, time advances by
/// tocks. A finding is a signature the environment can force.
ExplorationResult explore(const Model& model, const CheckConfig& cfg, Budget& budget);

class BudgetExceeded {};

/// One valuation of the referenced measures per class that the conditions of
/// `rules` cannot tell apart; the first of each class in lexicographic order.
std::vector<Valuation> distinct_scenarios(const Model& model, const std::vector<bool>& rules);

/// True when some bounded behaviour that every rule in `others` complies with
/// breaks an obligation of `target`.
bool violation_reachable(const Model& model, const std::vector<bool>& others, std::size_t target,
                         const CheckConfig& cfg, Budget& budget);

}  // namespace sleec::detail
