#include "test_util.hpp"

#include "llfun/ll_parser.hpp"
#include "llfun/naming.hpp"
#include "llfun/ssa_analysis.hpp"

#include <doctest.h>

using namespace llfun;
using namespace llfun::analysis;
using llfun::testing::error_kind;
using llfun::testing::fixture_text;

namespace {

ll::Function parse_fn(const std::string &src) { return ll::load_module(src).functions.at(0); }

std::vector<std::string> names(const std::vector<EmissionUnit> &units) {
  std::vector<std::string> out;
  for (const auto &u : units)
    out.push_back(u.name);
  return out;
}

} // namespace

TEST_SUITE("ssa_analysis") {

TEST_CASE("naming") {
  CHECK(mangle_register("num_occur.0.lcssa") == "num_occur_dot_0_dot_lcssa");
  CHECK(mangle_register("1") == "_1");
  CHECK(mangle_register("a-b") == "a_b");
  CHECK(mangle_register("st") == "r_st");
  CHECK(mangle_register("done") == "r_done");
  CHECK(block_def_name("occurrences", "._crit_edge") == "occurrences__crit_edge");
  CHECK(block_def_name("f", "3") == "f_bb3");
  CHECK(block_def_name("f", "loop") == "f_loop");
}

TEST_CASE("occurrences cfg and dominators") {
  ll::Function fn = ll::load_module(fixture_text("occurrences.ll")).functions[0];
  ControlFlowGraph cfg = build_cfg(fn);
  REQUIRE(cfg.size() == 3);
  CHECK(cfg.succs[0] == std::vector<std::size_t>{2, 1});
  CHECK(cfg.preds[1] == std::vector<std::size_t>{0, 1});
  auto idom = immediate_dominators(cfg);
  CHECK(idom[0] == 0);
  CHECK(idom[1] == 0);
  CHECK(idom[2] == 0);
  CHECK(dominates(idom, 0, 2));
  CHECK_FALSE(dominates(idom, 1, 2));
}

TEST_CASE("occurrences loop and signatures") {
  ll::Function fn = ll::load_module(fixture_text("occurrences.ll")).functions[0];
  FunctionAnalysis fa = analyze_function(fn);
  REQUIRE(fa.loops.size() == 1);
  const LoopInfo &loop = fa.loops[0];
  CHECK(loop.header == 1);
  CHECK(loop.latch == 1);
  CHECK(loop.exit == 2);
  CHECK(loop.preheader == 0);
  CHECK(loop.exit_on_true);
  CHECK(loop.carried == std::vector<std::string>{"num_occur", "j"});
  CHECK(fa.guard_of[0] == 0);

  CHECK(fa.signatures[1].phi_params == std::vector<std::string>{"num_occur", "j"});
  CHECK(fa.signatures[1].flow_params == std::vector<std::string>{"array", "n", "val"});
  CHECK(fa.signatures[2].phi_params == std::vector<std::string>{"num_occur.0.lcssa"});
  CHECK(fa.signatures[2].flow_params.empty());
  CHECK(fa.signatures[0].flow_params == std::vector<std::string>{"n", "array", "val"});

  CHECK(names(fa.order) == std::vector<std::string>{
                               "occurrences__crit_edge", "occurrences_continue",
                               "occurrences_step_0", "occurrences_step_0_while",
                               "occurrences_step_0_while_wrap", "occurrences_0", "occurrences"});
}

TEST_CASE("nested loops are innermost first") {
  ll::Function fn = ll::load_module(fixture_text("sum2d.ll")).functions[0];
  FunctionAnalysis fa = analyze_function(fn);
  REQUIRE(fa.loops.size() == 2);
  CHECK(fn.blocks[fa.loops[0].header].label == "inner");
  CHECK(fn.blocks[fa.loops[1].header].label == "outer");
  CHECK(fa.loops[0].parent == 1u);
  CHECK_FALSE(fa.loops[1].parent.has_value());
  CHECK(fa.continue_name(0) == "sum2d_continue_0");
  CHECK(fa.continue_name(1) == "sum2d_continue_1");
  // each clique contiguous in the emission order
  auto order = names(fa.order);
  for (int l = 0; l < 2; ++l) {
    auto at = std::find(order.begin(), order.end(), fa.continue_name(l));
    REQUIRE(at != order.end());
    CHECK(*(at + 1) == fa.step_name(l));
    CHECK(*(at + 2) == fa.while_name(l));
    CHECK(*(at + 3) == fa.wrap_name(l));
    CHECK(*(at + 4) == fa.entry_name(l));
  }
  CHECK(order.back() == "sum2d");
}

TEST_CASE("liveness") {
  ll::Function fn = ll::load_module(fixture_text("occurrences.ll")).functions[0];
  ControlFlowGraph cfg = build_cfg(fn);
  Liveness lv = compute_liveness(cfg, fn);
  CHECK(lv.live_in[1].count("val"));
  CHECK(lv.live_in[1].count("array"));
  CHECK_FALSE(lv.live_in[1].count("j")); // phi-defined
  CHECK(lv.live_out[1].count("num_occur.next"));
  CHECK_FALSE(lv.live_in[2].count("num_occur.next"));
}

TEST_CASE("loop shapes outside the subset are rejected") {
  CHECK(error_kind([] { analyze_function(ll::load_module(fixture_text("multi_exit.ll")).functions[0]); }) ==
        ErrorKind::Analysis);
  CHECK(error_kind([] { analyze_function(ll::load_module(fixture_text("irreducible.ll")).functions[0]); }) ==
        ErrorKind::Analysis);
  // two back edges into one header
  const char *two_latches = "define void @f(i1 %c) {\n"
                            "entry:\n  br label %h\n"
                            "h:\n  br i1 %c, label %a, label %b\n"
                            "a:\n  br i1 %c, label %h, label %out\n"
                            "b:\n  br label %h\n"
                            "out:\n  ret void\n}\n";
  CHECK(error_kind([&] { analyze_function(parse_fn(two_latches)); }) == ErrorKind::Analysis);
  // loop without exit
  const char *forever = "define void @f() {\nentry:\n  br label %h\nh:\n  br label %h\n}\n";
  CHECK(error_kind([&] { analyze_function(parse_fn(forever)); }) == ErrorKind::Analysis);
}

TEST_CASE("cfg rejections") {
  const char *unreachable = "define i32 @f() {\nentry:\n  ret i32 0\ndead:\n  ret i32 1\n}\n";
  CHECK(error_kind([&] { build_cfg(parse_fn(unreachable)); }) == ErrorKind::Analysis);
  const char *missing = "define i32 @f() {\nentry:\n  br label %nowhere\n}\n";
  CHECK(error_kind([&] { analyze_function(parse_fn(missing)); }).has_value());
}

TEST_CASE("dominance violations") {
  const char *src = "define i32 @f(i1 %c) {\n"
                    "entry:\n  br i1 %c, label %a, label %b\n"
                    "a:\n  %x = add i32 1, 2\n  br label %b\n"
                    "b:\n  ret i32 %x\n}\n";
  try {
    analyze_function(parse_fn(src));
    FAIL("accepted");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Analysis);
    CHECK(e.message().find("dominance") != std::string::npos);
  }
}

TEST_CASE("phi incoming blocks must match predecessors") {
  const char *src = "define i32 @f(i1 %c) {\n"
                    "entry:\n  br i1 %c, label %a, label %b\n"
                    "a:\n  br label %b\n"
                    "b:\n  %p = phi i32 [ 1, %a ]\n  ret i32 %p\n}\n";
  CHECK(error_kind([&] { analyze_function(parse_fn(src)); }) == ErrorKind::Analysis);
}

TEST_CASE("forward phi references are accepted") {
  const char *src = "define i32 @f(i32 %n) {\n"
                    "entry:\n  br label %h\n"
                    "h:\n  %i = phi i32 [ 0, %entry ], [ %i.next, %h ]\n"
                    "  %i.next = add i32 %i, 1\n  %d = icmp eq i32 %i.next, %n\n"
                    "  br i1 %d, label %out, label %h\n"
                    "out:\n  ret i32 %i.next\n}\n";
  FunctionAnalysis fa = analyze_function(parse_fn(src));
  CHECK(fa.loops.size() == 1);
  CHECK(fa.guard_of[0] == -1); // unconditional preheader
}

TEST_CASE("dump mentions every unit") {
  ll::Module m = ll::load_module(fixture_text("sum2d.ll"));
  FunctionAnalysis fa = analyze_function(m.functions[0]);
  std::string text = dump(fa);
  for (const auto &u : fa.order)
    CHECK(text.find(u.name) != std::string::npos);
}

}
