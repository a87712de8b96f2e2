#pragma once

// Executable specification of occurrences: lift the array into a list and
// count. Used as the oracle for the translated program.

#include "llfun/evaluator.hpp"
#include "llfun/machine_state.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace llfun::oracle {

using NatList = std::vector<Nat>;

inline constexpr std::uint64_t default_lift_budget = 1u << 26;

/// Words at array + 8j for successive j until the 32-bit view of j equals n.
/// j steps at 64 bits, as in the loop. Throws Error(Budget) after `budget`
/// elements.
NatList liftlist(Nat done, Nat j, Nat array, Nat n, const MachineState &st,
                 std::uint64_t budget = default_lift_budget);

Nat occurlist(Nat val, const NatList &xs);

/// 0 when n = 0, else bits(occurlist(val, liftlist(0, 0, array, n, st)), 63, 0).
Nat occurrences_spec(Nat val, Nat n, Nat array, const MachineState &st,
                     std::uint64_t budget = default_lift_budget);

struct EquivReport {
  bool pass = false;
  Nat impl = 0;
  Nat spec = 0;
  std::string error; // set when either side faulted
};

/// retval of the translated driver against occurrences_spec.
EquivReport check_occurrences_equiv(const eval::Evaluator &program, Nat val, Nat n, Nat array,
                                    const MachineState &st,
                                    const std::string &entry = "occurrences");

struct TrialSummary {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::uint64_t seed = 0;
};

/// Random states, val and array placement with n in 0..max_n. Prints one line
/// per failing trial and a closing summary line to `out` when given.
TrialSummary run_equiv_trials(const eval::Evaluator &program, std::uint64_t trials,
                              std::uint64_t seed, unsigned max_n = 64,
                              std::ostream *out = nullptr,
                              const std::string &entry = "occurrences");

/// A random state holding n words at array; roughly a third of them equal val.
MachineState random_occurrences_state(std::uint64_t seed, Nat val, Nat n, Nat array);

/// The while result at `index` (the loop's running count sits at the
/// num_occur position of the frame).
Nat loop_result(const eval::EvalResult &while_result, std::size_t index);

} // namespace llfun::oracle
