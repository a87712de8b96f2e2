#include "llfun/spec_oracle.hpp"

#include "llfun/error.hpp"

#include <ostream>
#include <random>

namespace llfun::oracle {

NatList liftlist(Nat done, Nat j, Nat array, Nat n, const MachineState &st,
                 std::uint64_t budget) {
  NatList out;
  while (done != 1) {
    if (out.size() >= budget)
      throw Error(ErrorKind::Budget, "liftlist: budget of " + std::to_string(budget) +
                                         " elements exhausted at j = " + to_string(j));
    Nat addr = eval::bits(array + 8 * j, 31, 0);
    out.push_back(loadbytes(8, addr, st));
    j = eval::bits(j + 1, 63, 0);
    done = eval::bits(j, 31, 0) == n ? 1 : 0;
  }
  return out;
}

Nat occurlist(Nat val, const NatList &xs) {
  Nat count = 0;
  for (Nat x : xs)
    count += x == val ? 1 : 0;
  return count;
}

Nat occurrences_spec(Nat val, Nat n, Nat array, const MachineState &st, std::uint64_t budget) {
  if (n == 0)
    return 0;
  return eval::bits(occurlist(val, liftlist(0, 0, array, n, st, budget)), 63, 0);
}

EquivReport check_occurrences_equiv(const eval::Evaluator &program, Nat val, Nat n, Nat array,
                                    const MachineState &st, const std::string &entry) {
  EquivReport report;
  try {
    report.spec = occurrences_spec(val, n, array, st);
    report.impl = retval(program.run(entry, {val, n, array}, st).state);
    report.pass = report.impl == report.spec;
  } catch (const Error &e) {
    report.error = e.what();
  }
  return report;
}

MachineState random_occurrences_state(std::uint64_t seed, Nat val, Nat n, Nat array) {
  std::mt19937_64 rng(seed);
  MachineState st = MachineState::make(default_stack, default_stack);
  for (int k = 0; k < 4; ++k) // noise around the array
    st = storebytes(8, eval::bits(array + 8 * (n + k), 31, 0), rng(), std::move(st));
  for (Nat j = 0; j < n; ++j) {
    Nat word = rng() % 3 == 0 ? val : Nat{rng()};
    st = storebytes(8, eval::bits(array + 8 * j, 31, 0), word, std::move(st));
  }
  return st;
}

TrialSummary run_equiv_trials(const eval::Evaluator &program, std::uint64_t trials,
                              std::uint64_t seed, unsigned max_n, std::ostream *out,
                              const std::string &entry) {
  TrialSummary summary;
  summary.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::uint64_t trial_seed = rng();
    Nat val = rng() % 4 == 0 ? Nat{rng() % 4} : Nat{rng()};
    Nat n = rng() % (max_n + 1);
    Nat align = rng() % 2 ? 7 : 0;
    Nat array = Nat{rng() % 0x7fff0000u} & ~align;
    MachineState st = random_occurrences_state(trial_seed, val, n, array);
    EquivReport r = check_occurrences_equiv(program, val, n, array, st, entry);
    ++summary.trials;
    if (!r.pass) {
      ++summary.failures;
      if (out)
        *out << "FAIL trial " << t << " seed " << trial_seed << " val=" << to_string(val)
             << " n=" << to_string(n) << " array=" << to_hex(array)
             << " impl=" << to_string(r.impl) << " spec=" << to_string(r.spec)
             << (r.error.empty() ? "" : " error: " + r.error) << '\n';
    }
  }
  if (out)
    *out << "occurrences equivalence: " << summary.trials << " trials, " << summary.failures
         << " failures, seed " << seed << '\n';
  return summary;
}

Nat loop_result(const eval::EvalResult &while_result, std::size_t index) {
  if (index >= while_result.values.size())
    throw Error(ErrorKind::Runtime, "while result index " + std::to_string(index) +
                                        " out of range");
  return while_result.values[index];
}

} // namespace llfun::oracle
