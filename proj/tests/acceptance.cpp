// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "differential.hpp"
#include "memprops.hpp"

#include "llfun/evaluator.hpp"
#include "llfun/ll_parser.hpp"
#include "llfun/pipeline.hpp"
#include "llfun/spec_oracle.hpp"
#include "llfun/ssa_analysis.hpp"

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

using namespace llfun;

namespace {

using Clock = std::chrono::steady_clock;

std::string fixture(const std::string &name) { return std::string(LLFUN_FIXTURES) + "/" + name; }

MachineState words() {
  return load_memory_image(fixture("words.mem"), MachineState::make(default_stack, default_stack));
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int n, const char *title, const std::function<Outcome()> &check) {
  Outcome o;
  try {
    o = check();
  } catch (const Error &e) {
    o = {false, e.what()};
  }
  if (!o.pass)
    ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << n << ' ' << title << ": " << o.detail
            << std::endl;
}

} // namespace

int main() {
  const bool ci = [] {
    const char *v = std::getenv("LLFUN_CI");
    return v && std::string(v) == "1";
  }();
  fun::FunProgram program = load_program_file(fixture("occurrences.ll"));
  eval::Evaluator ev(program);
  eval::EvalOptions unchecked;
  unchecked.check = false;

  criterion(1, "small run", [&] {
    auto t0 = Clock::now();
    auto r = ev.run("occurrences", {399, 8, 0x8000}, words());
    double s = seconds_since(t0);
    std::ostringstream d;
    d << "retval " << to_string(retval(r.state)) << " in " << s << " s";
    return Outcome{retval(r.state) == 3 && s < 1.0, d.str()};
  });

  criterion(2, "large run", [&] {
    auto t0 = Clock::now();
    auto r = ev.run("occurrences", {0, 1000000, 0x8000}, words(), unchecked);
    double s = seconds_since(t0);
    std::ostringstream d;
    d << "retval " << to_string(retval(r.state)) << " in " << s << " s";
    return Outcome{retval(r.state) == 999993 && s < 10.0, d.str()};
  });

  criterion(3, "throughput", [&] {
    const double floor = 2.37e6;
    double best = 0;
    for (int k = 0; k < 3; ++k) {
      auto t0 = Clock::now();
      auto r = ev.run("occurrences", {0, 1000000, 0x8000}, words(), unchecked);
      double s = std::max(seconds_since(t0), 1e-9);
      best = std::max(best, static_cast<double>(r.stats.total_iterations()) * 9 / s);
    }
    std::ostringstream d;
    d << best << " instr/s, floor " << floor;
    if (ci && best < floor) {
      d << " (reported only, LLFUN_CI=1)";
      return Outcome{true, d.str()};
    }
    return Outcome{best >= floor, d.str()};
  });

  criterion(4, "oracle and differential", [&] {
    auto eq = oracle::run_equiv_trials(ev, 10000, 20261019, 64, &std::cerr);
    auto df = testing::run_differential(1000, 20261019, &std::cerr);
    std::ostringstream d;
    d << eq.trials << " oracle trials with " << eq.failures << " failures, " << df.programs
      << " programs with " << df.failures << " failures";
    return Outcome{eq.failures == 0 && df.failures == 0, d.str()};
  });

  criterion(5, "memory properties", [&] {
    auto t0 = Clock::now();
    auto results = testing::run_memory_properties(10000, 20261019);
    double s = seconds_since(t0);
    bool ok = s < 30.0;
    std::ostringstream d;
    for (const auto &r : results) {
      ok = ok && r.failures == 0 && r.cases == 10000;
      d << r.name << ' ' << r.failures << '/' << r.cases << ", ";
      if (r.failures)
        std::cerr << r.name << ": " << r.first_failure << '\n';
    }
    d << s << " s";
    return Outcome{ok, d.str()};
  });

  criterion(6, "structural checks", [&] {
    bool ok = true;
    std::ostringstream d;
    for (const char *name : {"occurrences.ll", "sum2d.ll", "divergent.ll"}) {
      fun::FunProgram p = translate_source(read_text_file(fixture(name)));
      std::size_t loops = 0;
      for (const auto &f : ll::load_module(read_text_file(fixture(name))).functions)
        loops += analysis::analyze_function(f).loops.size();
      std::size_t problems = fun::check_well_formed(p).size() + fun::check_closed_terms(p).size() +
                             fun::check_state_threading(p).size() +
                             fun::check_clique_shape(p).size() +
                             fun::check_definition_order(p).size();
      ok = ok && problems == 0 && p.cliques.size() == loops;
      d << (d.tellp() > 0 ? "; " : "") << name << ' ' << p.cliques.size() << '/' << loops
        << " cliques, " << problems << " problems";
    }
    return Outcome{ok, d.str()};
  });

  criterion(7, "bounded depth", [&] {
    auto small = ev.run("occurrences", {0, 8, 0x8000}, words(), unchecked);
    auto large = ev.run("occurrences", {0, 1000000, 0x8000}, words(), unchecked);
    std::ostringstream d;
    d << "max depth " << large.stats.max_depth << " at " << large.stats.total_iterations()
      << " iterations, " << small.stats.max_depth << " at " << small.stats.total_iterations();
    return Outcome{large.stats.max_depth == small.stats.max_depth &&
                       large.stats.total_iterations() == 1000000,
                   d.str()};
  });

  return failures ? 1 : 0;
}
