#include "test_util.hpp"

#include "llfun/evaluator.hpp"
#include "llfun/fun_ir.hpp"

#include <doctest.h>

#include <sstream>

using namespace llfun;
using namespace llfun::eval;
using llfun::testing::error_kind;
using llfun::testing::words_state;
using llfun::testing::fixture;

namespace {

Nat prim(std::string_view op, std::initializer_list<Nat> args) {
  std::vector<Nat> v(args);
  return apply_prim(op, v);
}

const fun::FunProgram &occurrences() {
  static fun::FunProgram p = load_program_file(fixture("occurrences.ll"));
  return p;
}

} // namespace

TEST_SUITE("evaluator") {

TEST_CASE("bits") {
  CHECK(bits(pow2(64) + 5, 63, 0) == 5);
  CHECK(bits(0xABCD, 15, 8) == 0xAB);
  CHECK(bits(12345, 63, 0) == 12345);
  CHECK(bits(0xff, 3, 3) == 1);
}

TEST_CASE("modular arithmetic") {
  CHECK(prim("add", {64, low_mask(64), 1}) == 0);
  CHECK(prim("sub", {8, 0, 1}) == 255);
  CHECK(prim("sub", {32, 5, 7}) == 0xfffffffe);
  CHECK(prim("mul", {64, low_mask(64), low_mask(64)}) == 1);
  CHECK(prim("and", {8, 0xf0, 0x3c}) == 0x30);
  CHECK(prim("or", {8, 0xf0, 0x0c}) == 0xfc);
  CHECK(prim("xor", {8, 0xff, 0x0f}) == 0xf0);
  CHECK(prim("+", {low_mask(64), 1}) == pow2(64));
  CHECK(prim("*", {pow2(40), pow2(40)}) == pow2(80));
  CHECK(prim("=", {4, 4}) == 1);
  CHECK(prim("=", {4, 5}) == 0);
}

TEST_CASE("shifts") {
  CHECK(prim("shl", {8, 0x81, 1}) == 0x02);
  CHECK(prim("lshr", {8, 0x80, 7}) == 1);
  CHECK(prim("ashr", {8, 0x80, 7}) == 0xff);
  CHECK(prim("ashr", {8, 0x40, 2}) == 0x10);
  // amounts at or past the width give 0
  CHECK(prim("shl", {32, 1, 32}) == 0);
  CHECK(prim("lshr", {32, 0xffffffff, 40}) == 0);
  CHECK(prim("ashr", {32, 0xffffffff, 32}) == 0);
}

TEST_CASE("icmp") {
  CHECK(prim("icmp-eq", {64, 399, 399}) == 1);
  CHECK(prim("icmp-eq", {64, 399, 234}) == 0);
  CHECK(prim("icmp-slt", {32, 0xffffffff, 0}) == 1);
  CHECK(prim("icmp-ult", {32, 0xffffffff, 0}) == 0);
  CHECK(prim("icmp-sge", {64, 0, low_mask(64)}) == 1);
}

TEST_CASE("signed comparisons agree with int8_t exhaustively") {
  for (int a = 0; a < 256; ++a)
    for (int b = 0; b < 256; ++b) {
      auto sa = static_cast<std::int8_t>(a), sb = static_cast<std::int8_t>(b);
      Nat x = static_cast<Nat>(a), y = static_cast<Nat>(b);
      REQUIRE(prim("icmp-slt", {8, x, y}) == (sa < sb));
      REQUIRE(prim("icmp-sle", {8, x, y}) == (sa <= sb));
      REQUIRE(prim("icmp-sgt", {8, x, y}) == (sa > sb));
      REQUIRE(prim("icmp-sge", {8, x, y}) == (sa >= sb));
      REQUIRE(prim("ashr", {8, x, static_cast<Nat>(b % 8)}) ==
              static_cast<std::uint8_t>(sa >> (b % 8)));
      REQUIRE(prim("sub", {8, x, y}) == static_cast<std::uint8_t>(a - b));
    }
}

TEST_CASE("casts and select") {
  CHECK(prim("zext", {1, 64, 1}) == 1);
  CHECK(prim("sext", {1, 64, 1}) == low_mask(64));
  CHECK(prim("sext", {8, 32, 0x80}) == 0xffffff80);
  CHECK(prim("trunc", {64, 32, 0x1234567890ull}) == 0x34567890);
  CHECK(prim("select", {1, 7, 9}) == 7);
  CHECK(prim("select", {0, 7, 9}) == 9);
}

TEST_CASE("out-of-range operands fault") {
  CHECK(error_kind([] { prim("add", {8, 256, 1}); }) == ErrorKind::Runtime);
  CHECK(error_kind([] { prim("add", {65, 1, 1}); }) == ErrorKind::Runtime);
  CHECK(error_kind([] { prim("trunc", {8, 16, 1}); }) == ErrorKind::Runtime);
  CHECK(error_kind([] { prim("+", {nat_max, 1}); }) == ErrorKind::Runtime);
  CHECK(error_kind([] { prim("select", {2, 1, 1}); }) == ErrorKind::Runtime);
  CHECK(error_kind([] { prim("loadbytes", {8, 0, 0}); }) == ErrorKind::Runtime);
}

TEST_CASE("occurrences small") {
  EvalResult r = eval_def(occurrences(), "occurrences", {399, 8, 0x8000}, words_state());
  CHECK(retval(r.state) == 3);
  CHECK(r.stats.iterations.at("occurrences_step_0_while") == 8);
  CHECK(r.state.stack == default_stack);
  CHECK(r.state.frame == default_stack);
  CHECK(r.state.mem == words_state().mem);
}

TEST_CASE("occurrences with n = 0 never enters the loop") {
  EvalResult r = eval_def(occurrences(), "occurrences", {5, 0, 0x8000}, words_state());
  CHECK(retval(r.state) == 0);
  CHECK(r.stats.total_iterations() == 0);
}

TEST_CASE("other values on the sample words") {
  Evaluator ev(occurrences());
  CHECK(retval(ev.run("occurrences", {0, 8, 0x8000}, words_state()).state) == 1);
  CHECK(retval(ev.run("occurrences", {20, 8, 0x8000}, words_state()).state) == 1);
  CHECK(retval(ev.run("occurrences", {static_cast<Nat>(low_mask(64)), 8, 0x8000}, words_state())
                   .state) == 1);
  CHECK(retval(ev.run("occurrences", {399, 3, 0x8000}, words_state()).state) == 1);
}

TEST_CASE("budget") {
  CHECK(retval(run_with_budget(occurrences(), "occurrences", {399, 8, 0x8000}, words_state(),
                               1000000)
                   .state) == 3);
  CHECK(retval(run_with_budget(occurrences(), "occurrences", {399, 8, 0x8000}, words_state(), 8)
                   .state) == 3);
  CHECK(error_kind([] {
          run_with_budget(occurrences(), "occurrences", {399, 8, 0x8000}, words_state(), 7);
        }) == ErrorKind::Budget);

  fun::FunProgram spin = load_program_file(fixture("divergent.ll"));
  try {
    run_with_budget(spin, "spin", {0}, MachineState{}, 1000);
    FAIL("no budget error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Budget);
    CHECK(e.message().find("spin_step_0_while=1000") != std::string::npos);
  }
}

TEST_CASE("dynamic signature checks") {
  Evaluator ev(occurrences());
  // n is an i32
  CHECK(error_kind([&] { ev.run("occurrences", {1, pow2(32), 0x8000}, words_state()); }) ==
        ErrorKind::Runtime);
  EvalOptions off;
  off.check = false;
  // the same call with checks off gets as far as the first prim, which still faults
  CHECK(error_kind([&] { ev.run("occurrences", {1, pow2(32), 0x8000}, words_state(), off); }) ==
        ErrorKind::Runtime);

  fun::FunProgram bad = fun::load_program(
      "(defun f (x st)\n  (declare (xargs :signature ((i8_p stp) i8_p stp)))\n"
      "  (mvlist (+ x 300) st))\n");
  CHECK(error_kind([&] { eval_def(bad, "f", {1}, MachineState{}); }) == ErrorKind::Runtime);
  EvalResult r = eval_def(bad, "f", {1}, MachineState{}, off);
  CHECK(r.values == std::vector<Nat>{301});
}

TEST_CASE("runtime faults name the definition") {
  fun::FunProgram p = fun::load_program(
      "(defun g (a st)\n  (declare (xargs :signature ((addr_p stp) i64_p)))\n"
      "  (loadbytes 8 a st))\n"
      "(defun f (st)\n  (declare (xargs :signature ((stp) stp)))\n"
      "  (let ((st (update-retval (g 4294967295 st) st))) st))\n");
  try {
    eval_def(p, "f", {}, MachineState{});
    FAIL("no fault");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Runtime);
    CHECK(e.message().rfind("in g:", 0) == 0);
  }
}

TEST_CASE("trace") {
  std::ostringstream out;
  EvalOptions o;
  o.trace = &out;
  eval_def(occurrences(), "occurrences", {399, 2, 0x8000}, words_state(), o);
  std::string t = out.str();
  CHECK(t.rfind("enter occurrences (399 2 32768 <st>)", 0) == 0);
  CHECK(t.find("enter occurrences_step_0 ") != std::string::npos);
  CHECK(t.find("exit occurrences (<st>)") != std::string::npos);
}

TEST_CASE("stack safety") {
  // host nesting stays the same whatever the trip count
  Evaluator ev(occurrences());
  EvalOptions off;
  off.check = false;
  auto small = ev.run("occurrences", {0, 4, 0x8000}, words_state(), off);
  auto large = ev.run("occurrences", {0, 200000, 0x8000}, words_state(), off);
  CHECK(large.stats.max_depth == small.stats.max_depth);
  CHECK(large.stats.max_depth <= 8);
  CHECK(large.stats.total_iterations() == 200000);
}

TEST_CASE("input states are not modified") {
  fun::FunProgram p = load_program_file(fixture("straight.ll"));
  MachineState st = MachineState::make(default_stack, default_stack);
  EvalResult r = eval_def(p, "mix", {7, 3, 9}, st);
  CHECK(st.mem.empty());
  CHECK(!r.state.mem.empty()); // the alloca slot was written
  CHECK(r.state.stack == default_stack);
}

TEST_CASE("determinism") {
  Evaluator ev(occurrences());
  auto a = ev.run("occurrences", {399, 8, 0x8000}, words_state());
  auto b = ev.run("occurrences", {399, 8, 0x8000}, words_state());
  CHECK(a.state == b.state);
  CHECK(a.values == b.values);
}

TEST_CASE("while definitions can be run directly") {
  Evaluator ev(occurrences());
  // frame (done num_occur j array n val st) -> (num_occur j array n val st)
  auto r = ev.run("occurrences_step_0_while", {0, 10, 0, 0x8000, 8, 399}, words_state());
  REQUIRE(r.values.size() == 5);
  CHECK(r.values[0] == 13);
  CHECK(r.values[1] == 8);
}

TEST_CASE("unknown entry and wrong arity") {
  Evaluator ev(occurrences());
  CHECK(error_kind([&] { ev.run("nope", {}, MachineState{}); }) == ErrorKind::Runtime);
  CHECK(error_kind([&] { ev.run("occurrences", {1}, MachineState{}); }) == ErrorKind::Runtime);
}

TEST_CASE("programs that are not closed are rejected up front") {
  fun::FunProgram p = fun::load_program(
      "(defun f (st)\n  (declare (xargs :signature ((stp) stp)))\n  (update-retval y st))\n");
  CHECK(error_kind([&] { Evaluator{p}; }) == ErrorKind::Analysis);
}

}
