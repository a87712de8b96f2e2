#include "differential.hpp"

#include "progen.hpp"
#include "ref_interp.hpp"

#include "llfun/evaluator.hpp"
#include "llfun/ll_parser.hpp"
#include "llfun/pipeline.hpp"

#include <ostream>
#include <random>
#include <string>

namespace llfun::testing {

namespace {

std::string compare(const MachineState &got, const MachineState &want) {
  if (got.retval != want.retval)
    return "retval " + to_string(got.retval) + ", reference " + to_string(want.retval);
  if (got.stack != want.stack)
    return "stack " + to_hex(got.stack) + ", reference " + to_hex(want.stack);
  if (got.frame != want.frame)
    return "frame " + to_hex(got.frame) + ", reference " + to_hex(want.frame);
  if (!(got.mem == want.mem))
    return "memory differs";
  return {};
}

} // namespace

std::string differential_case(std::uint64_t program_seed, bool with_loop) {
  GeneratedProgram prog = generate_program(program_seed, with_loop);
  GeneratedInput in = generate_input(prog, program_seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<Nat> args(in.args.begin(), in.args.end());

  std::string got_err, want_err;
  MachineState got, want;
  try {
    fun::FunProgram fp = translate_source(prog.source);
    eval::EvalOptions o;
    o.budget = 1'000'000;
    got = eval::eval_def(fp, prog.function, args, in.state, o).state;
  } catch (const Error &e) {
    got_err = e.what();
  }
  try {
    want = interpret(ll::load_module(prog.source), prog.function, in.args, in.state).state;
  } catch (const Error &e) {
    want_err = e.what();
  }
  if (!got_err.empty() || !want_err.empty()) {
    if (!got_err.empty() && !want_err.empty())
      return {}; // both fault
    return got_err.empty() ? "reference faulted: " + want_err : "translation faulted: " + got_err;
  }
  return compare(got, want);
}

DifferentialSummary run_differential(std::uint64_t programs, std::uint64_t seed,
                                     std::ostream *out) {
  DifferentialSummary s;
  s.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::uint64_t k = 0; k < programs; ++k) {
    std::uint64_t ps = rng();
    bool loop = k % 2 == 1;
    std::string diff = differential_case(ps, loop);
    ++s.programs;
    if (!diff.empty()) {
      ++s.failures;
      if (out)
        *out << "FAIL program seed " << ps << (loop ? " (loop)" : " (straight)") << ": " << diff
             << '\n';
    }
  }
  if (out)
    *out << "differential: " << s.programs << " programs, " << s.failures << " failures, seed "
         << s.seed << '\n';
  return s;
}

} // namespace llfun::testing
