// llfun: translate LLVM IR into functional form and run it.

#include "llfun/error.hpp"
#include "llfun/evaluator.hpp"
#include "llfun/fun_ir.hpp"
#include "llfun/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace llfun;

namespace {

struct RunConfig {
  std::string input;
  std::string entry;
  std::string args;
  std::string mem_image;
  std::string stack = "0xffff0000";
  std::string frame = "0xffff0000";
  bool no_check = false;
  std::uint64_t budget = 0;
  bool trace = false;
  std::string out;
};

[[noreturn]] void usage(const std::string &msg) { throw Error(ErrorKind::Io, msg); }

Nat nat_arg(const std::string &text, const char *what) {
  auto v = parse_nat(text);
  if (!v)
    usage(std::string("bad ") + what + " '" + text + "'");
  return *v;
}

Addr addr_arg(const std::string &text, const char *what) {
  Nat v = nat_arg(text, what);
  if (v >> 32)
    usage(std::string(what) + " " + text + " does not fit in 32 bits");
  return static_cast<Addr>(v);
}

std::vector<Nat> parse_args(const std::string &text) {
  std::vector<Nat> out;
  if (text.empty())
    return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(nat_arg(item, "argument"));
  return out;
}

void write_output(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
    throw Error(ErrorKind::Io, "cannot write '" + path + "'");
}

struct Prepared {
  eval::Evaluator evaluator;
  std::string entry;
  std::vector<Nat> args;
  MachineState state;
};

Prepared prepare(const RunConfig &cfg) {
  fun::FunProgram program = load_program_file(cfg.input);
  if (program.defs.empty())
    usage("'" + cfg.input + "' defines nothing");
  std::string entry = cfg.entry.empty() ? program.defs.back().name : cfg.entry;
  if (!program.find(entry))
    usage("no definition named '" + entry + "'");
  MachineState st =
      MachineState::make(addr_arg(cfg.stack, "--stack"), addr_arg(cfg.frame, "--frame"));
  if (!cfg.mem_image.empty())
    st = load_memory_image(cfg.mem_image, std::move(st));
  return {eval::Evaluator(program), entry, parse_args(cfg.args), std::move(st)};
}

eval::EvalOptions options(const RunConfig &cfg) {
  eval::EvalOptions o;
  o.check = !cfg.no_check;
  if (cfg.budget)
    o.budget = cfg.budget;
  if (cfg.trace)
    o.trace = &std::cerr;
  return o;
}

int cmd_translate(const std::string &input, const std::string &out) {
  fun::FunProgram program = translate_source(read_text_file(input));
  write_output(out, fun::emit_sexpr(program));
  return 0;
}

int cmd_run(const RunConfig &cfg) {
  Prepared p = prepare(cfg);
  eval::EvalResult r = p.evaluator.run(p.entry, p.args, p.state, options(cfg));
  std::cout << to_string(retval(r.state)) << '\n';
  if (!cfg.out.empty()) {
    std::ostringstream report;
    report << describe(r.state) << '\n';
    for (Nat v : r.values)
      report << "value " << to_string(v) << '\n';
    for (const auto &[name, n] : r.stats.iterations)
      report << "iterations " << name << ' ' << n << '\n';
    for (const auto &[addr, byte] : r.state.mem.bytes())
      if (p.state.mem.byte(addr) != byte)
        report << "written " << to_hex(addr) << ' ' << unsigned(byte) << '\n';
    write_output(cfg.out, report.str());
  }
  return 0;
}

int cmd_bench(RunConfig cfg, unsigned ipi, unsigned repeat) {
  cfg.no_check = true;
  cfg.trace = false;
  Prepared p = prepare(cfg);
  eval::EvalOptions o = options(cfg);
  std::vector<double> rates;
  Nat result = 0;
  for (unsigned k = 0; k < std::max(repeat, 1u); ++k) {
    auto t0 = std::chrono::steady_clock::now();
    eval::EvalResult r = p.evaluator.run(p.entry, p.args, p.state, o);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    secs = std::max(secs, 1e-9);
    std::uint64_t iters = r.stats.total_iterations();
    double rate = static_cast<double>(iters) * ipi / secs;
    rates.push_back(rate);
    result = retval(r.state);
    std::cout << "run " << k + 1 << ": " << secs << " s, " << iters << " iterations, " << rate
              << " instr/s\n";
  }
  std::sort(rates.begin(), rates.end());
  double median = rates[rates.size() / 2];
  std::cout << "retval " << to_string(result) << '\n';
  std::cout << "median " << median << " instr/s (" << ipi << " instructions/iteration), spread "
            << (rates.front() > 0 ? rates.back() / rates.front() : 0.0) << "x\n";
  return 0;
}

void add_run_flags(CLI::App *cmd, RunConfig &cfg) {
  cmd->add_option("input", cfg.input, ".ll or .fun program")->required();
  cmd->add_option("--entry", cfg.entry, "definition to call (default: the last one)");
  cmd->add_option("--args", cfg.args, "comma-separated naturals");
  cmd->add_option("--mem-image", cfg.mem_image, "memory image file");
  cmd->add_option("--stack", cfg.stack, "initial stack pointer");
  cmd->add_option("--frame", cfg.frame, "initial frame pointer");
  cmd->add_option("--budget", cfg.budget, "maximum while iterations");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Translate LLVM IR into functional definitions and execute them"};
  app.require_subcommand(1);

  std::string tr_input, tr_out;
  auto *translate = app.add_subcommand("translate", "emit the functional program");
  translate->add_option("input", tr_input, ".ll file")->required();
  translate->add_option("--out", tr_out, "output file (default: stdout)");

  RunConfig run_cfg;
  auto *run = app.add_subcommand("run", "evaluate a definition and print retval");
  add_run_flags(run, run_cfg);
  run->add_flag("--no-check", run_cfg.no_check, "skip dynamic signature checks");
  run->add_flag("--trace", run_cfg.trace, "trace definition entry/exit on stderr");
  run->add_option("--out", run_cfg.out, "write a final-state report");

  RunConfig bench_cfg;
  unsigned ipi = 9, repeat = 5;
  auto *bench = app.add_subcommand("bench", "time a run and report instructions per second");
  add_run_flags(bench, bench_cfg);
  bench->add_option("--ipi", ipi, "LLVM instructions per loop iteration");
  bench->add_option("--repeat", repeat, "number of timed runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*translate)
      return cmd_translate(tr_input, tr_out);
    if (*run)
      return cmd_run(run_cfg);
    return cmd_bench(bench_cfg, ipi, repeat);
  } catch (const Error &e) {
    std::cerr << "llfun: " << e.what() << '\n';
    return exit_code(e.kind());
  }
}
