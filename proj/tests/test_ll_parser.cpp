#include "test_util.hpp"

#include "llfun/ll_lexer.hpp"
#include "llfun/ll_parser.hpp"
#include "llfun/ll_printer.hpp"
#include "progen.hpp"

#include <doctest.h>

using namespace llfun;
using namespace llfun::ll;
using llfun::testing::error_kind;
using llfun::testing::fixture_text;

TEST_SUITE("ll_parser") {

TEST_CASE("tokenize classifies lexemes") {
  auto toks = tokenize("ret i64 %x");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].is_keyword("ret"));
  CHECK(toks[1].kind == TokenKind::TypeToken);
  CHECK(toks[1].text == "i64");
  CHECK(toks[2].kind == TokenKind::LocalIdent);
  CHECK(toks[2].text == "x");

  CHECK(tokenize("").empty());
  CHECK(tokenize("%a = add i64 %b, 1 ; note").size() == 7);
}

TEST_CASE("token positions increase") {
  auto toks = tokenize(fixture_text("occurrences.ll"));
  for (std::size_t k = 1; k < toks.size(); ++k) {
    auto a = toks[k - 1].pos, b = toks[k].pos;
    CHECK((a.line < b.line || (a.line == b.line && a.column < b.column)));
  }
}

TEST_CASE("illegal character is a lex error") {
  CHECK(error_kind([] { tokenize("ret i32 `"); }) == ErrorKind::Lex);
}

TEST_CASE("occurrences fixture") {
  Module m = load_module(fixture_text("occurrences.ll"));
  REQUIRE(m.functions.size() == 1);
  const Function &fn = m.functions[0];
  CHECK(fn.name == "occurrences");
  REQUIRE(fn.blocks.size() == 3);
  CHECK(fn.blocks[1].label == ".lr.ph");
  CHECK(fn.blocks[2].label == "._crit_edge");
  CHECK(fn.blocks[1].phis.size() == 2);
  CHECK(fn.blocks[1].body.size() == 8);
  CHECK(fn.params[2].type.is_ptr());
}

TEST_CASE("empty module") {
  CHECK(load_module("").functions.empty());
  CHECK(load_module("; nothing here\n").functions.empty());
}

TEST_CASE("br arity") {
  const char *src = "define void @f(i1 %c) {\n"
                    "a:\n  br i1 %c, label %a, label %b, label %b\n"
                    "b:\n  ret void\n}\n";
  try {
    load_module(src);
    FAIL("accepted");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(e.pos().line == 3);
  }
}

TEST_CASE("negative literals are normalized") {
  Module m = load_module("define i8 @f() {\n  %r = add i8 -1, 0\n  ret i8 %r\n}\n");
  CHECK(m.functions[0].blocks[0].body[0].operands[0].value == 255);
  Module w = load_module("define i64 @f() {\n  %r = add i64 -2, 0\n  ret i64 %r\n}\n");
  CHECK(w.functions[0].blocks[0].body[0].operands[0].value == 0xfffffffffffffffeull);
}

TEST_CASE("attributes and metadata are dropped") {
  const char *src = "define i32 @f(i32 noundef %x) #0 !dbg !4 {\n"
                    "  %y = add nsw i32 %x, 1, !dbg !7\n"
                    "  ret i32 %y\n}\n"
                    "attributes #0 = { nounwind }\n"
                    "!4 = !{}\n!7 = !{}\n";
  Module m = load_module(src);
  CHECK(m.functions[0].blocks[0].body.size() == 1);
}

TEST_CASE("aliases resolve") {
  Module m = load_module(fixture_text("alias.ll"));
  CHECK(m.aliases.empty());
  const Function *quad = m.find_function("quad");
  REQUIRE(quad);
  CHECK(quad->blocks[0].body[0].callee == "twice");

  const char *cycle = "@a = alias i32 (i32)* @b\n@b = alias i32 (i32)* @a\n";
  CHECK(error_kind([&] { load_module(cycle); }) == ErrorKind::Parse);
  CHECK(error_kind([] { load_module("@a = alias i32 (i32)* @nowhere\n"); }) == ErrorKind::Parse);
}

TEST_CASE("no aliases leaves the module unchanged") {
  Module m = parse_module(tokenize(fixture_text("sum2d.ll")));
  CHECK(resolve_aliases(m) == m);
}

TEST_CASE("unsupported constructs") {
  CHECK(error_kind([] { load_module(fixture_text("unsupported.ll")); }) ==
        ErrorKind::Unsupported);
  CHECK(error_kind([] { load_module("@g = global i32 0\n"); }) == ErrorKind::Unsupported);
  CHECK(error_kind([] {
          load_module("define double @f(double %x) {\n  %y = fadd double %x, %x\n  ret double %y\n}\n");
        }) == ErrorKind::Unsupported);
  CHECK(error_kind([] { load_module("define i24 @f(i24 %x) {\n  ret i24 %x\n}\n"); }) ==
        ErrorKind::Unsupported);
}

TEST_CASE("malformed input") {
  CHECK(error_kind([] { load_module("define i32 @f(i32 %x {\n"); }) == ErrorKind::Parse);
  // use before definition in the same block
  CHECK(error_kind([] {
          load_module("define i32 @f() {\n  %a = add i32 %b, 1\n  ret i32 %a\n}\n");
        }).has_value());
  // double assignment
  CHECK(error_kind([] {
          load_module("define i32 @f(i32 %x) {\n  %a = add i32 %x, 1\n  %a = add i32 %x, 2\n"
                      "  ret i32 %a\n}\n");
        }) == ErrorKind::Parse);
  // phi after a non-phi
  CHECK(error_kind([] {
          load_module("define i32 @f(i32 %x) {\nentry:\n  br label %b\nb:\n  %a = add i32 %x, 1\n"
                      "  %p = phi i32 [ 0, %entry ]\n  ret i32 %a\n}\n");
        }).has_value());
}

TEST_CASE("both pointer syntaxes") {
  Module typed = load_module("define i64 @f(i64* %p) {\n  %v = load i64* %p, align 8\n"
                             "  ret i64 %v\n}\n");
  Module opaque = load_module("define i64 @f(ptr %p) {\n  %v = load i64, ptr %p, align 8\n"
                              "  ret i64 %v\n}\n");
  CHECK(typed.functions[0].blocks[0].body[0].type == opaque.functions[0].blocks[0].body[0].type);
}

TEST_CASE("print then parse is the identity on fixtures") {
  for (const char *name : {"occurrences.ll", "sum2d.ll", "straight.ll", "call.ll", "alias.ll",
                           "divergent.ll", "multi_exit.ll", "irreducible.ll"}) {
    CAPTURE(name);
    Module m = load_module(fixture_text(name));
    std::string printed = print_module(m);
    Module again = load_module(printed);
    CHECK(again == m);
    CHECK(print_module(again) == printed);
  }
}

TEST_CASE("print then parse is the identity on generated programs") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto prog = llfun::testing::generate_program(seed, seed % 2 == 0);
    CAPTURE(prog.source);
    Module m = load_module(prog.source);
    CHECK(load_module(print_module(m)) == m);
  }
}

TEST_CASE("single assignment holds on accepted functions") {
  for (const char *name : {"occurrences.ll", "sum2d.ll", "straight.ll"}) {
    Module m = load_module(fixture_text(name));
    for (const auto &fn : m.functions) {
      std::map<std::string, int> defs;
      for (const auto &p : fn.params)
        ++defs[p.name];
      for (const auto &b : fn.blocks)
        for_each_instruction(b, [&](const Instruction &i) {
          if (i.result)
            ++defs[*i.result];
        });
      for (const auto &[r, n] : defs)
        CHECK(n == 1);
    }
  }
}

}
