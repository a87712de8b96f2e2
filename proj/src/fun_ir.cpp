#include "llfun/fun_ir.hpp"

#include <algorithm>
#include <array>

namespace llfun::fun {

const char *predicate_name(Kind kind) {
  switch (kind) {
  case Kind::I1: return "i1_p";
  case Kind::I8: return "i8_p";
  case Kind::I16: return "i16_p";
  case Kind::I32: return "i32_p";
  case Kind::I64: return "i64_p";
  case Kind::Addr: return "addr_p";
  case Kind::Nat: return "natp";
  case Kind::State: return "stp";
  }
  return "?";
}

std::optional<Kind> kind_from_predicate(std::string_view name) {
  for (Kind k : {Kind::I1, Kind::I8, Kind::I16, Kind::I32, Kind::I64, Kind::Addr, Kind::Nat,
                 Kind::State})
    if (name == predicate_name(k))
      return k;
  return std::nullopt;
}

Kind kind_for_type(const ll::Type &type) {
  if (type.is_ptr())
    return Kind::Addr;
  switch (type.width) {
  case 1: return Kind::I1;
  case 8: return Kind::I8;
  case 16: return Kind::I16;
  case 32: return Kind::I32;
  default: return Kind::I64;
  }
}

unsigned kind_width(Kind kind) {
  switch (kind) {
  case Kind::I1: return 1;
  case Kind::I8: return 8;
  case Kind::I16: return 16;
  case Kind::I32: return 32;
  case Kind::I64: return 64;
  case Kind::Addr: return 32;
  default: return 0;
  }
}

namespace {

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

} // namespace

ExprPtr cst(Nat value) {
  Expr e;
  e.tag = Expr::Tag::Const;
  e.value = value;
  return make(std::move(e));
}

ExprPtr var(std::string name) {
  Expr e;
  e.tag = Expr::Tag::Var;
  e.name = std::move(name);
  return make(std::move(e));
}

ExprPtr prim(std::string op, std::vector<ExprPtr> args) {
  Expr e;
  e.tag = Expr::Tag::Prim;
  e.name = std::move(op);
  e.args = std::move(args);
  return make(std::move(e));
}

ExprPtr call(std::string callee, std::vector<ExprPtr> args) {
  Expr e;
  e.tag = Expr::Tag::Call;
  e.name = std::move(callee);
  e.args = std::move(args);
  return make(std::move(e));
}

ExprPtr let(std::vector<std::pair<std::string, ExprPtr>> bindings, ExprPtr body) {
  if (bindings.empty())
    return body;
  Expr e;
  e.tag = Expr::Tag::Let;
  e.bindings = std::move(bindings);
  e.body = std::move(body);
  return make(std::move(e));
}

ExprPtr ite(ExprPtr cond, ExprPtr then_branch, ExprPtr else_branch) {
  Expr e;
  e.tag = Expr::Tag::If;
  e.args = {std::move(cond), std::move(then_branch), std::move(else_branch)};
  return make(std::move(e));
}

ExprPtr mvlist(std::vector<ExprPtr> items) {
  Expr e;
  e.tag = Expr::Tag::MvList;
  e.args = std::move(items);
  return make(std::move(e));
}

ExprPtr metlist(std::vector<std::string> names, ExprPtr call_expr, ExprPtr body) {
  Expr e;
  e.tag = Expr::Tag::MetList;
  e.names = std::move(names);
  e.args = {std::move(call_expr)};
  e.body = std::move(body);
  return make(std::move(e));
}

bool equal(const Expr &a, const Expr &b) {
  if (a.tag != b.tag || a.value != b.value || a.name != b.name || a.names != b.names ||
      a.args.size() != b.args.size() || a.bindings.size() != b.bindings.size() ||
      static_cast<bool>(a.body) != static_cast<bool>(b.body))
    return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal(*a.args[i], *b.args[i]))
      return false;
  for (std::size_t i = 0; i < a.bindings.size(); ++i)
    if (a.bindings[i].first != b.bindings[i].first ||
        !equal(*a.bindings[i].second, *b.bindings[i].second))
      return false;
  return !a.body || equal(*a.body, *b.body);
}

bool equal(const FunDef &a, const FunDef &b) {
  return a.name == b.name && a.params == b.params && a.results == b.results &&
         a.general == b.general && equal(*a.body, *b.body);
}

const FunDef *FunProgram::find(std::string_view name) const {
  for (const auto &def : defs)
    if (def.name == name)
      return &def;
  return nullptr;
}

bool equal(const FunProgram &a, const FunProgram &b) {
  if (a.defs.size() != b.defs.size() || a.cliques != b.cliques)
    return false;
  for (std::size_t i = 0; i < a.defs.size(); ++i)
    if (!equal(a.defs[i], b.defs[i]))
      return false;
  return true;
}

const PrimInfo *find_prim(std::string_view name) {
  static constexpr std::array<PrimInfo, 34> table = {{
      {"add", 3, 1, false, false},
      {"sub", 3, 1, false, false},
      {"mul", 3, 1, false, false},
      {"and", 3, 1, false, false},
      {"or", 3, 1, false, false},
      {"xor", 3, 1, false, false},
      {"shl", 3, 1, false, false},
      {"lshr", 3, 1, false, false},
      {"ashr", 3, 1, false, false},
      {"icmp-eq", 3, 1, false, false},
      {"icmp-ne", 3, 1, false, false},
      {"icmp-ugt", 3, 1, false, false},
      {"icmp-uge", 3, 1, false, false},
      {"icmp-ult", 3, 1, false, false},
      {"icmp-ule", 3, 1, false, false},
      {"icmp-sgt", 3, 1, false, false},
      {"icmp-sge", 3, 1, false, false},
      {"icmp-slt", 3, 1, false, false},
      {"icmp-sle", 3, 1, false, false},
      {"zext", 3, 2, false, false},
      {"sext", 3, 2, false, false},
      {"trunc", 3, 2, false, false},
      {"select", 3, 0, false, false},
      {"bits", 3, 0, false, false},
      {"+", 2, 0, false, false},
      {"*", 2, 0, false, false},
      {"=", 2, 0, false, false},
      {"loadbytes", 3, 1, false, true},
      {"storebytes", 4, 1, true, true},
      {"stack", 1, 0, false, true},
      {"alloca", 2, 0, true, true},
      {"update-retval", 2, 0, true, true},
      {"retval", 1, 0, false, true},
      {"init-stack-frame", 1, 0, true, true},
  }};
  static constexpr std::array<PrimInfo, 2> frames = {{
      {"begin-stack-frame", 1, 0, true, true},
      {"end-stack-frame", 1, 0, true, true},
  }};
  for (const auto &p : table)
    if (p.name == name)
      return &p;
  for (const auto &p : frames)
    if (p.name == name)
      return &p;
  return nullptr;
}

bool is_special_form(std::string_view name) {
  for (std::string_view f : {"let", "let*", "if", "mvlist", "metlist", "defun", "defun-general",
                             "declare"})
    if (name == f)
      return true;
  return false;
}

} // namespace llfun::fun
