#pragma once

// AST for the accepted subset of textual LLVM IR. Registers and labels are
// stored without their '%' sigil; globals without '@'.

#include "llfun/error.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace llfun::ll {

/// First-class types of the subset: iN for N in {1,8,16,32,64}, pointers
/// (typed `iN*`, `iN**`, ... or opaque `ptr`) and void for function results.
struct Type {
  enum class Kind : std::uint8_t { Void, Int, Ptr };

  Kind kind = Kind::Void;
  unsigned width = 0; // Int: bit width. Ptr: width of the innermost pointee (0 = opaque).
  unsigned depth = 0; // Ptr: levels of indirection (0 = opaque).

  static Type void_type() { return {}; }
  static Type int_type(unsigned w) { return {Kind::Int, w, 0}; }
  static Type opaque_ptr() { return {Kind::Ptr, 0, 0}; }
  static Type ptr_to(const Type &pointee);

  bool is_void() const { return kind == Kind::Void; }
  bool is_int() const { return kind == Kind::Int; }
  bool is_ptr() const { return kind == Kind::Ptr; }
  bool is_opaque_ptr() const { return is_ptr() && depth == 0; }

  /// Pointee of a typed pointer; nullopt for opaque pointers and non-pointers.
  std::optional<Type> pointee() const;

  /// Width of a value of this type in a register: iN -> N, pointers -> 32.
  unsigned value_width() const;

  /// Bytes occupied in memory: ceil(N/8) for iN, 4 for pointers.
  unsigned store_size() const;

  friend bool operator==(const Type &, const Type &) = default;
};

std::string to_string(const Type &type);

/// Both pointer types are interchangeable for value purposes.
bool value_compatible(const Type &a, const Type &b);

struct Operand {
  enum class Kind : std::uint8_t { Reg, Const };

  Kind kind = Kind::Const;
  std::string reg;     // Reg
  std::uint64_t value = 0; // Const, already reduced modulo 2^width

  static Operand make_reg(std::string name) { return {Kind::Reg, std::move(name), 0}; }
  static Operand make_const(std::uint64_t v) { return {Kind::Const, {}, v}; }
  bool is_reg() const { return kind == Kind::Reg; }

  friend bool operator==(const Operand &, const Operand &) = default;
};

enum class Opcode : std::uint8_t {
  Add, Sub, Mul, And, Or, Xor, Shl, LShr, AShr,
  ICmp, ZExt, SExt, Trunc, Select,
  Gep, Load, Store, Alloca,
  Phi, Call,
  Br, CondBr, Ret,
};

const char *mnemonic(Opcode op);
bool is_binary(Opcode op);
bool is_cast(Opcode op);
bool is_terminator(Opcode op);

enum class ICmpPred : std::uint8_t { Eq, Ne, Ugt, Uge, Ult, Ule, Sgt, Sge, Slt, Sle };

const char *mnemonic(ICmpPred pred);

struct PhiIncoming {
  Operand value;
  std::string block;

  friend bool operator==(const PhiIncoming &, const PhiIncoming &) = default;
};

/// One instruction. Field use depends on the opcode:
///   binary      type = operand/result type, operands = {lhs, rhs}
///   icmp        type = operand type, pred, operands = {lhs, rhs}; result is i1
///   casts       source_type -> type, operands = {value}
///   select      type = arm type, operands = {cond, then, else}
///   gep         element_type, type = pointer type, operands = {base, index}, index_type
///   load        type = loaded type, operands = {address}
///   store       type = stored type, operands = {value, address}
///   alloca      element_type; type = pointer type
///   phi         type, incoming
///   call        type = return type, callee, operands/arg_types
///   br          targets = {dest}
///   condbr      operands = {cond}, targets = {if_true, if_false}
///   ret         type (void or value type), operands = {} or {value}
struct Instruction {
  Opcode op = Opcode::Ret;
  std::optional<std::string> result;
  Type type;
  Type source_type;
  Type element_type;
  Type index_type;
  ICmpPred pred = ICmpPred::Eq;
  std::vector<Operand> operands;
  std::vector<Type> arg_types;
  std::vector<PhiIncoming> incoming;
  std::vector<std::string> targets;
  std::string callee;
  SourcePos pos;

  /// Type of the register this instruction defines (i1 for icmp).
  Type result_type() const;

  friend bool operator==(const Instruction &, const Instruction &) = default;
};

struct BasicBlock {
  std::string label;
  std::vector<Instruction> phis;
  std::vector<Instruction> body;
  Instruction terminator;

  friend bool operator==(const BasicBlock &, const BasicBlock &) = default;
};

struct Param {
  std::string name;
  Type type;

  friend bool operator==(const Param &, const Param &) = default;
};

struct Function {
  std::string name;
  Type return_type;
  std::vector<Param> params;
  std::vector<BasicBlock> blocks;
  SourcePos pos;

  const BasicBlock *find_block(const std::string &label) const;
  std::optional<std::size_t> block_index(const std::string &label) const;

  /// Every register with its type: formals first, then definitions in order.
  std::map<std::string, Type> register_types() const;

  friend bool operator==(const Function &, const Function &) = default;
};

struct Alias {
  std::string name;
  std::string target;
  SourcePos pos;

  friend bool operator==(const Alias &, const Alias &) = default;
};

/// External declaration (`declare ...`). Kept so that aliases to it resolve;
/// calling one is rejected at translation time.
struct Declaration {
  std::string name;
  Type return_type;
  std::vector<Type> param_types;

  friend bool operator==(const Declaration &, const Declaration &) = default;
};

struct Module {
  std::vector<Function> functions;
  std::vector<Declaration> declarations;
  std::vector<Alias> aliases;
  std::vector<std::string> target_notes;

  const Function *find_function(const std::string &name) const;

  friend bool operator==(const Module &, const Module &) = default;
};

/// Calls `fn` on every instruction of the block in textual order.
template <typename Fn> void for_each_instruction(const BasicBlock &block, Fn &&fn) {
  for (const auto &inst : block.phis)
    fn(inst);
  for (const auto &inst : block.body)
    fn(inst);
  fn(block.terminator);
}

} // namespace llfun::ll
