#include "ref_interp.hpp"

#include "llfun/error.hpp"

#include <map>

namespace llfun::testing {

namespace {

using ll::Opcode;
using u64 = std::uint64_t;
using i64 = std::int64_t;

u64 mask(unsigned w) { return w >= 64 ? ~u64{0} : (u64{1} << w) - 1; }

i64 sign(u64 v, unsigned w) {
  if (w < 64 && (v >> (w - 1)) & 1)
    return static_cast<i64>(v | ~mask(w));
  return static_cast<i64>(v);
}

class Interp {
public:
  Interp(const ll::Module &m, u64 max_steps) : module_(m), max_steps_(max_steps) {}

  std::uint64_t steps = 0;

  MachineState call(const ll::Function &fn, const std::vector<u64> &args, MachineState st) {
    std::map<std::string, u64> regs;
    for (std::size_t k = 0; k < fn.params.size(); ++k)
      regs[fn.params[k].name] = args[k];
    st = init_stack_frame(std::move(st));
    st = begin_stack_frame(std::move(st));
    const ll::BasicBlock *block = &fn.blocks[0];
    const ll::BasicBlock *prev = nullptr;
    for (;;) {
      if (prev) {
        std::vector<std::pair<std::string, u64>> incoming;
        for (const auto &phi : block->phis) {
          tick();
          for (const auto &in : phi.incoming)
            if (in.block == prev->label)
              incoming.push_back({*phi.result, value(in.value, regs)});
        }
        for (auto &[r, v] : incoming)
          regs[r] = v;
      }
      for (const auto &inst : block->body) {
        tick();
        exec(inst, regs, st);
      }
      tick();
      const auto &t = block->terminator;
      if (t.op == Opcode::Ret) {
        if (!t.operands.empty())
          st = update_retval(value(t.operands[0], regs), std::move(st));
        return end_stack_frame(std::move(st));
      }
      std::string next = t.targets[0];
      if (t.op == Opcode::CondBr && value(t.operands[0], regs) == 0)
        next = t.targets[1];
      prev = block;
      block = fn.find_block(next);
    }
  }

private:
  const ll::Module &module_;
  u64 max_steps_;

  void tick() {
    if (++steps > max_steps_)
      throw Error(ErrorKind::Budget, "reference interpreter step limit");
  }

  static u64 value(const ll::Operand &op, const std::map<std::string, u64> &regs) {
    if (!op.is_reg())
      return op.value;
    return regs.at(op.reg);
  }

  void exec(const ll::Instruction &inst, std::map<std::string, u64> &regs, MachineState &st) {
    auto v = [&](std::size_t k) { return value(inst.operands[k], regs); };
    u64 out = 0;
    switch (inst.op) {
    case Opcode::Add: case Opcode::Sub: case Opcode::Mul: case Opcode::And: case Opcode::Or:
    case Opcode::Xor: case Opcode::Shl: case Opcode::LShr: case Opcode::AShr: {
      unsigned w = inst.type.value_width();
      u64 a = v(0), b = v(1);
      switch (inst.op) {
      case Opcode::Add: out = a + b; break;
      case Opcode::Sub: out = a - b; break;
      case Opcode::Mul: out = a * b; break;
      case Opcode::And: out = a & b; break;
      case Opcode::Or: out = a | b; break;
      case Opcode::Xor: out = a ^ b; break;
      case Opcode::Shl: out = b >= w ? 0 : a << b; break;
      case Opcode::LShr: out = b >= w ? 0 : a >> b; break;
      default: out = b >= w ? 0 : static_cast<u64>(sign(a, w) >> b); break;
      }
      out &= mask(w);
      break;
    }
    case Opcode::ICmp: {
      unsigned w = inst.type.value_width();
      u64 a = v(0), b = v(1);
      i64 sa = sign(a, w), sb = sign(b, w);
      bool r = false;
      switch (inst.pred) {
      case ll::ICmpPred::Eq: r = a == b; break;
      case ll::ICmpPred::Ne: r = a != b; break;
      case ll::ICmpPred::Ugt: r = a > b; break;
      case ll::ICmpPred::Uge: r = a >= b; break;
      case ll::ICmpPred::Ult: r = a < b; break;
      case ll::ICmpPred::Ule: r = a <= b; break;
      case ll::ICmpPred::Sgt: r = sa > sb; break;
      case ll::ICmpPred::Sge: r = sa >= sb; break;
      case ll::ICmpPred::Slt: r = sa < sb; break;
      case ll::ICmpPred::Sle: r = sa <= sb; break;
      }
      out = r;
      break;
    }
    case Opcode::ZExt:
      out = v(0);
      break;
    case Opcode::SExt:
      out = static_cast<u64>(sign(v(0), inst.source_type.value_width())) &
            mask(inst.type.value_width());
      break;
    case Opcode::Trunc:
      out = v(0) & mask(inst.type.value_width());
      break;
    case Opcode::Select:
      out = v(0) ? v(1) : v(2);
      break;
    case Opcode::Gep: {
      unsigned iw = inst.index_type.value_width();
      i64 idx = sign(v(1), iw);
      u64 size = inst.element_type.store_size();
      out = (v(0) + static_cast<u64>(idx) * size) & 0xffffffffu;
      break;
    }
    case Opcode::Load: {
      Nat raw = loadbytes(inst.type.store_size(), v(0), st);
      out = static_cast<u64>(raw) & mask(inst.type.value_width());
      break;
    }
    case Opcode::Store:
      st = storebytes(inst.type.store_size(), v(1), v(0), std::move(st));
      return;
    case Opcode::Alloca:
      out = alloca_bytes(inst.element_type.store_size(), st);
      break;
    case Opcode::Call: {
      const ll::Function *callee = module_.find_function(inst.callee);
      if (!callee)
        throw Error(ErrorKind::Runtime, "call to unknown @" + inst.callee);
      std::vector<u64> args;
      for (std::size_t k = 0; k < inst.operands.size(); ++k)
        args.push_back(v(k));
      st = call(*callee, args, std::move(st));
      if (!inst.result)
        return;
      out = static_cast<u64>(retval(st)) & mask(inst.type.value_width());
      break;
    }
    default:
      throw Error(ErrorKind::Runtime, std::string("unexpected ") + ll::mnemonic(inst.op));
    }
    if (inst.result)
      regs[*inst.result] = out;
  }
};

} // namespace

RefResult interpret(const ll::Module &module, const std::string &fn,
                    const std::vector<std::uint64_t> &args, MachineState st,
                    std::uint64_t max_steps) {
  const ll::Function *f = module.find_function(fn);
  if (!f)
    throw Error(ErrorKind::Runtime, "no function @" + fn);
  Interp interp(module, max_steps);
  RefResult r;
  r.state = interp.call(*f, args, std::move(st));
  r.steps = interp.steps;
  return r;
}

} // namespace llfun::testing
