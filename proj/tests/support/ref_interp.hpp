#pragma once

// Direct interpreter over the LLVM AST, used as the oracle for translated
// programs. Arithmetic is done here on 64-bit words; memory and frames use
// the shared MachineState.

#include "llfun/ll_ast.hpp"
#include "llfun/machine_state.hpp"

#include <cstdint>
#include <vector>

namespace llfun::testing {

struct RefResult {
  MachineState state;
  std::uint64_t steps = 0; // instructions executed, phis and terminators included
};

/// Calls `fn` the way a translated driver does: init, begin, body, end.
/// Throws Error(Runtime) on faults and Error(Budget) after max_steps.
RefResult interpret(const ll::Module &module, const std::string &fn,
                    const std::vector<std::uint64_t> &args, MachineState st,
                    std::uint64_t max_steps = 50'000'000);

} // namespace llfun::testing
