#pragma once

// Functional target form: definitions over naturals and a threaded machine
// state, built from nested lets, conditionals, calls and multi-value lists.

#include "llfun/ll_ast.hpp"
#include "llfun/nat.hpp"
#include "llfun/ssa_analysis.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace llfun::fun {

/// Semantic kind of a parameter or result.
enum class Kind : std::uint8_t { I1, I8, I16, I32, I64, Addr, Nat, State };

const char *predicate_name(Kind kind); // i64_p, addr_p, natp, stp, ...
std::optional<Kind> kind_from_predicate(std::string_view name);
Kind kind_for_type(const ll::Type &type);
/// Bit width bound of a value kind; 0 for Nat and State.
unsigned kind_width(Kind kind);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Tag : std::uint8_t { Const, Var, Prim, Call, Let, If, MvList, MetList };

  Tag tag = Tag::Const;
  Nat value = 0;                 // Const
  std::string name;              // Var, Prim operator, Call callee
  std::vector<ExprPtr> args;     // Prim/Call arguments, MvList items, If {c, t, e}, MetList {call}
  std::vector<std::pair<std::string, ExprPtr>> bindings; // Let, sequential
  std::vector<std::string> names; // MetList targets
  ExprPtr body;                  // Let, MetList
};

ExprPtr cst(Nat value);
ExprPtr var(std::string name);
ExprPtr prim(std::string op, std::vector<ExprPtr> args);
ExprPtr call(std::string callee, std::vector<ExprPtr> args);
ExprPtr let(std::vector<std::pair<std::string, ExprPtr>> bindings, ExprPtr body);
ExprPtr ite(ExprPtr cond, ExprPtr then_branch, ExprPtr else_branch);
ExprPtr mvlist(std::vector<ExprPtr> items);
ExprPtr metlist(std::vector<std::string> names, ExprPtr call_expr, ExprPtr body);

bool equal(const Expr &a, const Expr &b);

struct Param {
  std::string name;
  Kind kind;

  friend bool operator==(const Param &, const Param &) = default;
};

struct FunDef {
  std::string name;
  std::vector<Param> params;
  std::vector<Kind> results;
  ExprPtr body;
  bool general = false; // general recursion (the while def of a clique)
};

bool equal(const FunDef &a, const FunDef &b);

struct Clique {
  std::string continue_def;
  std::string step;
  std::string while_def;
  std::string wrap;
  std::string entry;

  friend bool operator==(const Clique &, const Clique &) = default;
};

struct FunProgram {
  std::vector<FunDef> defs;
  std::vector<Clique> cliques;

  const FunDef *find(std::string_view name) const;
};

bool equal(const FunProgram &a, const FunProgram &b);

/// Primitive operators. Width-like operands (the first `immediates`
/// arguments) must be literal constants.
struct PrimInfo {
  std::string_view name;
  unsigned arity;
  unsigned immediates;
  bool returns_state;
  bool last_is_state; // takes the state as its last argument
};

const PrimInfo *find_prim(std::string_view name);
/// let, let*, if, mvlist, metlist, defun, defun-general, declare.
bool is_special_form(std::string_view name);

// ----- translation ---------------------------------------------------------

/// Definition for a non-header block that is not folded into a loop entry.
FunDef translate_block(const analysis::FunctionAnalysis &fa, std::size_t block);

/// The five definitions of one loop: continue, step, while, while_wrap, entry.
std::vector<FunDef> translate_loop(const analysis::FunctionAnalysis &fa, int loop);

/// All definitions of one function in emission order, driver last.
std::vector<FunDef> translate_function(const analysis::FunctionAnalysis &fa);

/// Whole module, callees before callers. Rejects recursion between
/// functions, calls to undefined functions and definition-name clashes.
FunProgram translate_module(const ll::Module &module);

// ----- text form -------------------------------------------------------------

std::string emit_sexpr(const FunProgram &program);
std::string emit_def(const FunDef &def);
std::string emit_expr(const Expr &expr);

/// Reads emit_sexpr output (and hand-written programs in the same form).
/// Cliques are recovered from the names of general-recursive definitions.
FunProgram load_program(std::string_view text);

// ----- validators --------------------------------------------------------------

/// Each returns a list of violations; empty means the property holds.
std::vector<std::string> check_well_formed(const FunProgram &program);  // calls, prims, arities
std::vector<std::string> check_closed_terms(const FunProgram &program);
std::vector<std::string> check_state_threading(const FunProgram &program);
std::vector<std::string> check_clique_shape(const FunProgram &program);
std::vector<std::string> check_definition_order(const FunProgram &program);

/// All of the above; throws Error(ErrorKind::Analysis) on the first failure.
void validate(const FunProgram &program);

std::vector<std::string> free_variables(const FunDef &def);

} // namespace llfun::fun
