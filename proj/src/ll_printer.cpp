#include "llfun/ll_printer.hpp"

#include <cctype>
#include <sstream>

namespace llfun::ll {

namespace {

bool plain_name(const std::string &name) {
  if (name.empty())
    return false;
  for (char c : name) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
              c == '$' || c == '-';
    if (!ok)
      return false;
  }
  return true;
}

std::string ident(char sigil, const std::string &name) {
  if (plain_name(name))
    return sigil + name;
  return std::string(1, sigil) + '"' + name + '"';
}

std::string local(const std::string &name) { return ident('%', name); }

std::string value(const Operand &op, const Type &type) {
  if (op.is_reg())
    return local(op.reg);
  if (type.is_ptr())
    return "null"; // the only pointer constant the parser produces
  return std::to_string(op.value);
}

std::string typed(const Type &type, const Operand &op) {
  return to_string(type) + " " + value(op, type);
}

std::string label_ref(const std::string &label) { return "label " + local(label); }

std::string label_def(const std::string &label) {
  bool bare = !label.empty() && label.find('-') == std::string::npos && plain_name(label);
  if (bare)
    return label + ":";
  return '"' + label + "\":";
}

void print_instruction(std::ostream &out, const Instruction &inst) {
  out << "  ";
  if (inst.result)
    out << local(*inst.result) << " = ";
  const auto &ops = inst.operands;
  switch (inst.op) {
  case Opcode::ICmp:
    out << "icmp " << mnemonic(inst.pred) << ' ' << typed(inst.type, ops[0]) << ", "
        << value(ops[1], inst.type);
    break;
  case Opcode::ZExt:
  case Opcode::SExt:
  case Opcode::Trunc:
    out << mnemonic(inst.op) << ' ' << typed(inst.source_type, ops[0]) << " to "
        << to_string(inst.type);
    break;
  case Opcode::Select:
    out << "select " << typed(Type::int_type(1), ops[0]) << ", " << typed(inst.type, ops[1])
        << ", " << typed(inst.type, ops[2]);
    break;
  case Opcode::Gep:
    out << "getelementptr " << to_string(inst.element_type) << ", "
        << typed(inst.type, ops[0]) << ", " << typed(inst.index_type, ops[1]);
    break;
  case Opcode::Load:
    out << "load " << to_string(inst.type) << ", " << typed(Type::opaque_ptr(), ops[0]);
    break;
  case Opcode::Store:
    out << "store " << typed(inst.type, ops[0]) << ", " << typed(Type::opaque_ptr(), ops[1]);
    break;
  case Opcode::Alloca:
    out << "alloca " << to_string(inst.element_type);
    break;
  case Opcode::Phi:
    out << "phi " << to_string(inst.type) << ' ';
    for (std::size_t k = 0; k < inst.incoming.size(); ++k) {
      if (k)
        out << ", ";
      out << "[ " << value(inst.incoming[k].value, inst.type) << ", "
          << local(inst.incoming[k].block) << " ]";
    }
    break;
  case Opcode::Call:
    out << "call " << to_string(inst.type) << ' ' << ident('@', inst.callee) << '(';
    for (std::size_t k = 0; k < ops.size(); ++k) {
      if (k)
        out << ", ";
      out << typed(inst.arg_types[k], ops[k]);
    }
    out << ')';
    break;
  case Opcode::Br:
    out << "br " << label_ref(inst.targets[0]);
    break;
  case Opcode::CondBr:
    out << "br " << typed(Type::int_type(1), ops[0]) << ", " << label_ref(inst.targets[0])
        << ", " << label_ref(inst.targets[1]);
    break;
  case Opcode::Ret:
    if (inst.type.is_void())
      out << "ret void";
    else
      out << "ret " << typed(inst.type, ops[0]);
    break;
  default:
    out << mnemonic(inst.op) << ' ' << typed(inst.type, ops[0]) << ", "
        << value(ops[1], inst.type);
    break;
  }
  out << '\n';
}

} // namespace

std::string print_function(const Function &fn) {
  std::ostringstream out;
  out << "define " << to_string(fn.return_type) << ' ' << ident('@', fn.name) << '(';
  for (std::size_t k = 0; k < fn.params.size(); ++k) {
    if (k)
      out << ", ";
    out << to_string(fn.params[k].type) << ' ' << local(fn.params[k].name);
  }
  out << ") {\n";
  for (std::size_t b = 0; b < fn.blocks.size(); ++b) {
    const auto &block = fn.blocks[b];
    if (b)
      out << '\n';
    out << label_def(block.label) << '\n';
    for_each_instruction(block, [&](const Instruction &inst) { print_instruction(out, inst); });
  }
  out << "}\n";
  return out.str();
}

std::string print_module(const Module &module) {
  std::ostringstream out;
  for (const auto &note : module.target_notes)
    out << note << '\n';
  for (const auto &decl : module.declarations) {
    out << "declare " << to_string(decl.return_type) << ' ' << ident('@', decl.name) << '(';
    for (std::size_t k = 0; k < decl.param_types.size(); ++k)
      out << (k ? ", " : "") << to_string(decl.param_types[k]);
    out << ")\n";
  }
  for (const auto &alias : module.aliases)
    out << ident('@', alias.name) << " = alias ptr " << ident('@', alias.target) << '\n';
  for (const auto &fn : module.functions)
    out << '\n' << print_function(fn);
  return out.str();
}

} // namespace llfun::ll
