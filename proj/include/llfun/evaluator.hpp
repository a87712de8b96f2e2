#pragma once

// Concrete execution of functional programs. Tail calls, including the
// self-call of each while definition, run in a loop, so host stack depth is
// bounded by the static nesting of non-tail calls.

#include "llfun/fun_ir.hpp"
#include "llfun/machine_state.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace llfun::eval {

/// floor(x / 2^l) mod 2^(h-l+1).
Nat bits(Nat x, unsigned h, unsigned l);

/// Pure primitives (everything except the state operations). Immediate
/// operands come first, as in the program text. Faults on out-of-range inputs.
Nat apply_prim(std::string_view op, std::span<const Nat> args);

/// True when v satisfies the predicate of kind (states always do).
bool satisfies(fun::Kind kind, Nat v);

struct EvalOptions {
  bool check = true;                    // dynamic signature checks
  std::optional<std::uint64_t> budget;  // max while iterations, all loops together
  std::ostream *trace = nullptr;
};

struct EvalStats {
  std::map<std::string, std::uint64_t> iterations; // per while def
  std::uint64_t calls = 0;
  std::size_t max_depth = 0; // host-level nesting of definition calls

  std::uint64_t total_iterations() const;
};

struct EvalResult {
  std::vector<Nat> values; // non-state results in order
  MachineState state;
  EvalStats stats;
};

class Evaluator {
public:
  /// Compiles every definition. Throws Error(Analysis) on programs that are
  /// not well formed or not closed.
  explicit Evaluator(const fun::FunProgram &program);
  ~Evaluator();
  Evaluator(Evaluator &&) noexcept;
  Evaluator &operator=(Evaluator &&) noexcept;

  /// `args` are the non-state parameters; the state parameter gets `st`.
  EvalResult run(const std::string &name, const std::vector<Nat> &args, MachineState st,
                 const EvalOptions &options = {}) const;

  const fun::FunProgram &program() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

EvalResult eval_def(const fun::FunProgram &program, const std::string &name,
                    const std::vector<Nat> &args, MachineState st, const EvalOptions &options = {});

/// eval_def with a budget on while iterations; exhaustion throws
/// Error(ErrorKind::Budget) naming the iteration count of each while def.
EvalResult run_with_budget(const fun::FunProgram &program, const std::string &name,
                           const std::vector<Nat> &args, MachineState st,
                           std::optional<std::uint64_t> budget);

} // namespace llfun::eval
