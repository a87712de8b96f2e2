#include "llfun/ll_ast.hpp"

namespace llfun::ll {

Type Type::ptr_to(const Type &pointee) {
  if (pointee.is_ptr()) {
    if (pointee.is_opaque_ptr())
      return opaque_ptr();
    return {Kind::Ptr, pointee.width, pointee.depth + 1};
  }
  return {Kind::Ptr, pointee.width, 1};
}

std::optional<Type> Type::pointee() const {
  if (!is_ptr() || depth == 0)
    return std::nullopt;
  if (depth == 1)
    return int_type(width);
  return Type{Kind::Ptr, width, depth - 1};
}

unsigned Type::value_width() const {
  switch (kind) {
  case Kind::Int: return width;
  case Kind::Ptr: return 32;
  case Kind::Void: return 0;
  }
  return 0;
}

unsigned Type::store_size() const {
  switch (kind) {
  case Kind::Int: return (width + 7) / 8;
  case Kind::Ptr: return 4;
  case Kind::Void: return 0;
  }
  return 0;
}

std::string to_string(const Type &type) {
  switch (type.kind) {
  case Type::Kind::Void: return "void";
  case Type::Kind::Int: return "i" + std::to_string(type.width);
  case Type::Kind::Ptr:
    if (type.depth == 0)
      return "ptr";
    return "i" + std::to_string(type.width) + std::string(type.depth, '*');
  }
  return "?";
}

bool value_compatible(const Type &a, const Type &b) {
  if (a.is_ptr() && b.is_ptr())
    return true;
  return a == b;
}

const char *mnemonic(Opcode op) {
  switch (op) {
  case Opcode::Add: return "add";
  case Opcode::Sub: return "sub";
  case Opcode::Mul: return "mul";
  case Opcode::And: return "and";
  case Opcode::Or: return "or";
  case Opcode::Xor: return "xor";
  case Opcode::Shl: return "shl";
  case Opcode::LShr: return "lshr";
  case Opcode::AShr: return "ashr";
  case Opcode::ICmp: return "icmp";
  case Opcode::ZExt: return "zext";
  case Opcode::SExt: return "sext";
  case Opcode::Trunc: return "trunc";
  case Opcode::Select: return "select";
  case Opcode::Gep: return "getelementptr";
  case Opcode::Load: return "load";
  case Opcode::Store: return "store";
  case Opcode::Alloca: return "alloca";
  case Opcode::Phi: return "phi";
  case Opcode::Call: return "call";
  case Opcode::Br: return "br";
  case Opcode::CondBr: return "br";
  case Opcode::Ret: return "ret";
  }
  return "?";
}

bool is_binary(Opcode op) {
  switch (op) {
  case Opcode::Add: case Opcode::Sub: case Opcode::Mul: case Opcode::And:
  case Opcode::Or: case Opcode::Xor: case Opcode::Shl: case Opcode::LShr:
  case Opcode::AShr:
    return true;
  default:
    return false;
  }
}

bool is_cast(Opcode op) {
  return op == Opcode::ZExt || op == Opcode::SExt || op == Opcode::Trunc;
}

bool is_terminator(Opcode op) {
  return op == Opcode::Br || op == Opcode::CondBr || op == Opcode::Ret;
}

const char *mnemonic(ICmpPred pred) {
  switch (pred) {
  case ICmpPred::Eq: return "eq";
  case ICmpPred::Ne: return "ne";
  case ICmpPred::Ugt: return "ugt";
  case ICmpPred::Uge: return "uge";
  case ICmpPred::Ult: return "ult";
  case ICmpPred::Ule: return "ule";
  case ICmpPred::Sgt: return "sgt";
  case ICmpPred::Sge: return "sge";
  case ICmpPred::Slt: return "slt";
  case ICmpPred::Sle: return "sle";
  }
  return "?";
}

Type Instruction::result_type() const {
  switch (op) {
  case Opcode::ICmp: return Type::int_type(1);
  default: return type;
  }
}

const BasicBlock *Function::find_block(const std::string &label) const {
  for (const auto &block : blocks)
    if (block.label == label)
      return &block;
  return nullptr;
}

std::optional<std::size_t> Function::block_index(const std::string &label) const {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].label == label)
      return i;
  return std::nullopt;
}

std::map<std::string, Type> Function::register_types() const {
  std::map<std::string, Type> types;
  for (const auto &param : params)
    types.emplace(param.name, param.type);
  for (const auto &block : blocks)
    for_each_instruction(block, [&](const Instruction &inst) {
      if (inst.result)
        types.emplace(*inst.result, inst.result_type());
    });
  return types;
}

const Function *Module::find_function(const std::string &name) const {
  for (const auto &fn : functions)
    if (fn.name == name)
      return &fn;
  return nullptr;
}

} // namespace llfun::ll
