#include "llfun/fun_ir.hpp"

#include "llfun/naming.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace llfun::fun {

using analysis::FunctionAnalysis;
using analysis::LoopInfo;
using analysis::npos;

namespace {

using Bindings = std::vector<std::pair<std::string, ExprPtr>>;

/// Per-loop register frame threaded through step and while:
/// done, header phis, invariants, extra live-out slots, st.
struct LoopFrame {
  std::vector<std::string> phis;
  std::vector<std::string> invariants;
  std::vector<std::string> extra;              // live-outs without a phi slot
  std::map<std::string, std::string> slot_of;  // loop-defined live-out -> frame register
};

class Translator {
public:
  explicit Translator(const FunctionAnalysis &fa)
      : fa_(fa), fn_(*fa.function), types_(fn_.register_types()) {
    std::map<std::string, std::string> seen;
    for (const auto &[reg, type] : types_) {
      std::string m = mangle_register(reg);
      auto [it, fresh] = seen.emplace(m, reg);
      if (!fresh)
        throw Error(ErrorKind::Unsupported,
                    "registers '%" + it->second + "' and '%" + reg + "' both map to '" + m +
                        "' in @" + fn_.name,
                    fn_.pos);
    }
    for (std::size_t l = 0; l < fa_.loops.size(); ++l)
      frames_.push_back(build_frame(fa_.loops[l]));
  }

  FunDef block_def(std::size_t b) const {
    FunDef def;
    def.name = fa_.block_unit(b);
    def.params = sig_params(b);
    def.results = region_kinds(fa_.innermost_loop[b]);
    Bindings lets = instruction_lets(fn_.blocks[b]);
    def.body = let(std::move(lets), terminator(b));
    return def;
  }

  std::vector<FunDef> loop_defs(int l) const {
    const LoopInfo &loop = fa_.loops[static_cast<std::size_t>(l)];
    int parent = loop.parent ? static_cast<int>(*loop.parent) : -1;
    auto parent_kinds = region_kinds(parent);
    bool single_state = parent < 0;
    std::vector<FunDef> defs;

    // continue: the exit block's signature, handed to the exit's unit.
    {
      FunDef def;
      def.name = fa_.continue_name(l);
      def.params = sig_params(loop.exit);
      def.results = parent_kinds;
      ExprPtr target = call(fa_.block_unit(loop.exit), param_vars(def.params));
      def.body = single_state ? let({{"st", target}}, var("st")) : target;
      defs.push_back(std::move(def));
    }

    auto frame_params = frame_param_list(l);
    auto frame_names = names_of(frame_params);
    auto frame_kinds = kinds_of(frame_params);

    // step: the header's code, ending in the loop-body units or the frame.
    {
      FunDef def;
      def.name = fa_.step_name(l);
      def.params = frame_params;
      def.results = frame_kinds;
      def.body = let(instruction_lets(fn_.blocks[loop.header]), terminator(loop.header));
      defs.push_back(std::move(def));
    }

    // while: iterate step until done.
    {
      FunDef def;
      def.name = fa_.while_name(l);
      def.params = frame_params;
      def.results.assign(frame_kinds.begin() + 1, frame_kinds.end());
      def.general = true;
      std::vector<ExprPtr> rest;
      for (std::size_t k = 1; k < frame_names.size(); ++k)
        rest.push_back(var(frame_names[k]));
      std::vector<ExprPtr> all;
      for (const auto &name : frame_names)
        all.push_back(var(name));
      def.body = ite(prim("=", {var("done"), cst(1)}), mvlist(rest),
                     metlist(frame_names, call(fa_.step_name(l), all),
                             call(fa_.while_name(l), all)));
      defs.push_back(std::move(def));
    }

    // while_wrap: run the loop from the header's inputs, then continue.
    {
      const LoopFrame &frame = frames_[static_cast<std::size_t>(l)];
      FunDef def;
      def.name = fa_.wrap_name(l);
      def.params = sig_params(loop.header);
      def.results = parent_kinds;
      std::vector<ExprPtr> init{cst(0)};
      for (const auto &p : frame.phis)
        init.push_back(var(mangle_register(p)));
      for (const auto &r : frame.invariants)
        init.push_back(var(mangle_register(r)));
      for (std::size_t k = 0; k < frame.extra.size(); ++k)
        init.push_back(cst(0));
      init.push_back(var("st"));
      std::vector<std::string> bound(frame_names.begin() + 1, frame_names.end());
      ExprPtr cont = call(fa_.continue_name(l), exit_args(l));
      if (single_state)
        cont = let({{"st", cont}}, var("st"));
      def.body = metlist(bound, call(fa_.while_name(l), init), cont);
      defs.push_back(std::move(def));
    }

    // entry: either the guard block that tests the loop's first iteration,
    // or a plain forward to while_wrap.
    {
      FunDef def;
      def.name = fa_.entry_name(l);
      def.results = parent_kinds;
      if (fa_.guard_of[loop.preheader] == l) {
        std::size_t p = loop.preheader;
        const auto &block = fn_.blocks[p];
        const auto &term = block.terminator;
        def.params = sig_params(p);
        Bindings lets = instruction_lets(block);
        lets.push_back({"done", done_bit(term.operands[0],
                                         term.targets[0] == fa_.cfg.nodes[loop.exit])});
        def.body = let(std::move(lets),
                       ite(prim("=", {var("done"), cst(1)}),
                           call(fa_.continue_name(l), edge_args(p, loop.exit)),
                           call(fa_.wrap_name(l), edge_args(p, loop.header))));
      } else {
        def.params = sig_params(loop.header);
        def.body = call(fa_.wrap_name(l), param_vars(def.params));
      }
      defs.push_back(std::move(def));
    }
    return defs;
  }

  FunDef driver() const {
    FunDef def;
    def.name = fa_.driver_name();
    for (const auto &param : fn_.params)
      def.params.push_back({mangle_register(param.name), kind_for_type(param.type)});
    def.params.push_back({"st", Kind::State});
    def.results = {Kind::State};
    std::vector<ExprPtr> args;
    for (const auto &r : fa_.signatures[fa_.cfg.entry].flow_params)
      args.push_back(var(mangle_register(r)));
    args.push_back(var("st"));
    def.body = let({{"st", prim("init-stack-frame", {var("st")})},
                    {"st", prim("begin-stack-frame", {var("st")})},
                    {"st", call(fa_.block_unit(fa_.cfg.entry), std::move(args))}},
                   prim("end-stack-frame", {var("st")}));
    return def;
  }

private:
  const FunctionAnalysis &fa_;
  const ll::Function &fn_;
  std::map<std::string, ll::Type> types_;
  std::vector<LoopFrame> frames_;

  Kind reg_kind(const std::string &reg) const { return kind_for_type(types_.at(reg)); }

  bool defined_in(const LoopInfo &loop, const std::string &reg) const {
    for (std::size_t b : loop.body) {
      bool found = false;
      ll::for_each_instruction(fn_.blocks[b], [&](const ll::Instruction &inst) {
        if (inst.result && *inst.result == reg)
          found = true;
      });
      if (found)
        return true;
    }
    return false;
  }

  LoopFrame build_frame(const LoopInfo &loop) const {
    LoopFrame frame;
    frame.phis = loop.carried;
    frame.invariants = fa_.signatures[loop.header].flow_params;

    const auto &latch_label = fa_.cfg.nodes[loop.latch];
    std::vector<std::string> needed;
    auto need = [&](const std::string &r) {
      if (defined_in(loop, r) && std::find(needed.begin(), needed.end(), r) == needed.end())
        needed.push_back(r);
    };
    for (const auto &phi : fn_.blocks[loop.exit].phis)
      for (const auto &in : phi.incoming)
        if (in.block == latch_label && in.value.is_reg())
          need(in.value.reg);
    for (const auto &r : fa_.signatures[loop.exit].flow_params)
      need(r);

    for (const auto &r : needed) {
      std::string slot;
      for (const auto &phi : fn_.blocks[loop.header].phis)
        for (const auto &in : phi.incoming)
          if (in.block == latch_label && in.value.is_reg() && in.value.reg == r)
            slot = *phi.result;
      if (slot.empty()) {
        frame.extra.push_back(r);
        slot = r;
      }
      frame.slot_of[r] = slot;
    }
    return frame;
  }

  std::vector<Param> frame_param_list(int l) const {
    const LoopFrame &frame = frames_[static_cast<std::size_t>(l)];
    std::vector<Param> params{{"done", Kind::Nat}};
    for (const auto &group : {&frame.phis, &frame.invariants, &frame.extra})
      for (const auto &r : *group)
        params.push_back({mangle_register(r), reg_kind(r)});
    params.push_back({"st", Kind::State});
    return params;
  }

  std::vector<Kind> region_kinds(int loop) const {
    if (loop < 0)
      return {Kind::State};
    return kinds_of(frame_param_list(loop));
  }

  static std::vector<std::string> names_of(const std::vector<Param> &params) {
    std::vector<std::string> out;
    for (const auto &p : params)
      out.push_back(p.name);
    return out;
  }

  static std::vector<Kind> kinds_of(const std::vector<Param> &params) {
    std::vector<Kind> out;
    for (const auto &p : params)
      out.push_back(p.kind);
    return out;
  }

  static std::vector<ExprPtr> param_vars(const std::vector<Param> &params) {
    std::vector<ExprPtr> out;
    for (const auto &p : params)
      out.push_back(var(p.name));
    return out;
  }

  std::vector<Param> sig_params(std::size_t b) const {
    std::vector<Param> params;
    for (const auto &r : fa_.signatures[b].params())
      params.push_back({mangle_register(r), reg_kind(r)});
    params.push_back({"st", Kind::State});
    return params;
  }

  static ExprPtr operand(const ll::Operand &op) {
    return op.is_reg() ? var(mangle_register(op.reg)) : cst(op.value);
  }

  /// done = 1 exactly when the branch takes its exit side.
  static ExprPtr done_bit(const ll::Operand &cond, bool exit_on_true) {
    if (exit_on_true)
      return operand(cond);
    return ite(prim("=", {operand(cond), cst(1)}), cst(0), cst(1));
  }

  const ll::Operand &incoming(const ll::Instruction &phi, const std::string &from) const {
    for (const auto &in : phi.incoming)
      if (in.block == from)
        return in.value;
    throw Error(ErrorKind::Analysis, "phi without an incoming value for '%" + from + "'",
                phi.pos);
  }

  /// Actuals for the signature of `to` along from -> to.
  std::vector<ExprPtr> edge_args(std::size_t from, std::size_t to) const {
    std::vector<ExprPtr> args;
    for (const auto &phi : fn_.blocks[to].phis)
      args.push_back(operand(incoming(phi, fa_.cfg.nodes[from])));
    for (const auto &r : fa_.signatures[to].flow_params)
      args.push_back(var(mangle_register(r)));
    args.push_back(var("st"));
    return args;
  }

  /// Actuals for the exit block after the loop, in terms of the final frame.
  std::vector<ExprPtr> exit_args(int l) const {
    const LoopInfo &loop = fa_.loops[static_cast<std::size_t>(l)];
    const LoopFrame &frame = frames_[static_cast<std::size_t>(l)];
    auto slot = [&](const std::string &r) {
      auto it = frame.slot_of.find(r);
      return var(mangle_register(it == frame.slot_of.end() ? r : it->second));
    };
    std::vector<ExprPtr> args;
    for (const auto &phi : fn_.blocks[loop.exit].phis) {
      const auto &v = incoming(phi, fa_.cfg.nodes[loop.latch]);
      args.push_back(v.is_reg() ? slot(v.reg) : cst(v.value));
    }
    for (const auto &r : fa_.signatures[loop.exit].flow_params)
      args.push_back(slot(r));
    args.push_back(var("st"));
    return args;
  }

  ExprPtr edge(std::size_t from, std::size_t to) const {
    auto callee = fa_.edge_callee(from, to);
    return call(*callee, edge_args(from, to));
  }

  ExprPtr frame_result(int l, const ll::Operand &cond, bool exit_on_true) const {
    const LoopInfo &loop = fa_.loops[static_cast<std::size_t>(l)];
    const LoopFrame &frame = frames_[static_cast<std::size_t>(l)];
    const auto &latch_label = fa_.cfg.nodes[loop.latch];
    std::vector<ExprPtr> items{var("done")};
    for (const auto &phi : fn_.blocks[loop.header].phis)
      items.push_back(operand(incoming(phi, latch_label)));
    for (const auto &r : frame.invariants)
      items.push_back(var(mangle_register(r)));
    for (const auto &r : frame.extra)
      items.push_back(var(mangle_register(r)));
    items.push_back(var("st"));
    return let({{"done", done_bit(cond, exit_on_true)}}, mvlist(std::move(items)));
  }

  ExprPtr terminator(std::size_t b) const {
    const auto &term = fn_.blocks[b].terminator;
    switch (term.op) {
    case ll::Opcode::Ret:
      if (term.operands.empty())
        return var("st");
      return let({{"st", prim("update-retval", {operand(term.operands[0]), var("st")})}},
                 var("st"));
    case ll::Opcode::Br:
      return edge(b, fa_.cfg.index_of(term.targets[0]));
    case ll::Opcode::CondBr: {
      int closes = fa_.latch_of[b];
      if (closes >= 0) {
        const LoopInfo &loop = fa_.loops[static_cast<std::size_t>(closes)];
        return frame_result(closes, term.operands[0], loop.exit_on_true);
      }
      return ite(prim("=", {operand(term.operands[0]), cst(1)}),
                 edge(b, fa_.cfg.index_of(term.targets[0])),
                 edge(b, fa_.cfg.index_of(term.targets[1])));
    }
    default:
      throw Error(ErrorKind::Analysis, "malformed terminator", term.pos);
    }
  }

  Bindings instruction_lets(const ll::BasicBlock &block) const {
    Bindings lets;
    for (const auto &inst : block.body)
      instruction(inst, lets);
    return lets;
  }

  static std::string width(unsigned w) { return std::to_string(w); }

  void instruction(const ll::Instruction &inst, Bindings &lets) const {
    const auto &ops = inst.operands;
    auto result = [&] { return mangle_register(*inst.result); };
    auto w = [](const ll::Type &t) { return cst(t.value_width()); };
    switch (inst.op) {
    case ll::Opcode::ICmp:
      lets.push_back({result(), prim(std::string("icmp-") + ll::mnemonic(inst.pred),
                                     {w(inst.type), operand(ops[0]), operand(ops[1])})});
      break;
    case ll::Opcode::ZExt:
    case ll::Opcode::SExt:
    case ll::Opcode::Trunc:
      lets.push_back({result(), prim(ll::mnemonic(inst.op),
                                     {w(inst.source_type), w(inst.type), operand(ops[0])})});
      break;
    case ll::Opcode::Select:
      lets.push_back(
          {result(), prim("select", {operand(ops[0]), operand(ops[1]), operand(ops[2])})});
      break;
    case ll::Opcode::Gep: {
      ExprPtr index = operand(ops[1]);
      unsigned iw = inst.index_type.value_width();
      if (iw < 32)
        index = prim("sext", {cst(iw), cst(32), index});
      Nat size = inst.element_type.store_size();
      lets.push_back(
          {result(), prim("bits", {prim("+", {operand(ops[0]), prim("*", {index, cst(size)})}),
                                   cst(31), cst(0)})});
      break;
    }
    case ll::Opcode::Load: {
      ExprPtr load = prim("loadbytes", {cst(inst.type.store_size()), operand(ops[0]), var("st")});
      if (inst.type.is_int() && inst.type.width % 8 != 0)
        load = prim("bits", {load, cst(inst.type.width - 1), cst(0)});
      lets.push_back({result(), load});
      break;
    }
    case ll::Opcode::Store:
      lets.push_back({"st", prim("storebytes", {cst(inst.type.store_size()), operand(ops[1]),
                                                operand(ops[0]), var("st")})});
      break;
    case ll::Opcode::Alloca:
      lets.push_back({result(), prim("stack", {var("st")})});
      lets.push_back({"st", prim("alloca", {cst(inst.element_type.store_size()), var("st")})});
      break;
    case ll::Opcode::Call: {
      std::vector<ExprPtr> args;
      for (const auto &op : ops)
        args.push_back(operand(op));
      args.push_back(var("st"));
      lets.push_back({"st", call(mangle_global(inst.callee), std::move(args))});
      if (inst.result)
        lets.push_back({result(), prim("bits", {prim("retval", {var("st")}),
                                                cst(inst.type.value_width() - 1), cst(0)})});
      break;
    }
    default:
      if (!ll::is_binary(inst.op))
        throw Error(ErrorKind::Analysis,
                    std::string("unexpected '") + ll::mnemonic(inst.op) + "' in a block body",
                    inst.pos);
      lets.push_back({result(), prim(ll::mnemonic(inst.op),
                                     {w(inst.type), operand(ops[0]), operand(ops[1])})});
      break;
    }
  }
};

} // namespace

FunDef translate_block(const FunctionAnalysis &fa, std::size_t block) {
  return Translator(fa).block_def(block);
}

std::vector<FunDef> translate_loop(const FunctionAnalysis &fa, int loop) {
  return Translator(fa).loop_defs(loop);
}

std::vector<FunDef> translate_function(const FunctionAnalysis &fa) {
  Translator tr(fa);
  std::map<int, std::vector<FunDef>> cliques;
  std::vector<FunDef> out;
  for (const auto &unit : fa.order) {
    switch (unit.kind) {
    case analysis::UnitKind::Driver:
      out.push_back(tr.driver());
      break;
    case analysis::UnitKind::Block:
      out.push_back(tr.block_def(unit.block));
      break;
    default: {
      auto it = cliques.find(unit.loop);
      if (it == cliques.end())
        it = cliques.emplace(unit.loop, tr.loop_defs(unit.loop)).first;
      for (auto &def : it->second)
        if (def.name == unit.name)
          out.push_back(def);
      break;
    }
    }
  }
  return out;
}

FunProgram translate_module(const ll::Module &module) {
  // Callee-first order over the module call graph.
  std::map<std::string, const ll::Function *> by_name;
  for (const auto &fn : module.functions)
    by_name[fn.name] = &fn;

  for (const auto &fn : module.functions)
    for (const auto &block : fn.blocks)
      for (const auto &inst : block.body) {
        if (inst.op != ll::Opcode::Call)
          continue;
        auto it = by_name.find(inst.callee);
        if (it == by_name.end())
          throw Error(ErrorKind::Unsupported,
                      "call to '@" + inst.callee + "', which has no definition", inst.pos);
        const ll::Function &callee = *it->second;
        bool ok = callee.params.size() == inst.arg_types.size();
        for (std::size_t k = 0; ok && k < callee.params.size(); ++k)
          ok = ll::value_compatible(callee.params[k].type, inst.arg_types[k]);
        ok = ok && ll::value_compatible(callee.return_type, inst.type);
        if (!ok)
          throw Error(ErrorKind::Analysis,
                      "call to '@" + inst.callee + "' does not match its definition", inst.pos);
      }

  std::vector<const ll::Function *> order;
  std::map<std::string, int> state; // 1 = in progress, 2 = done
  std::function<void(const ll::Function &)> visit = [&](const ll::Function &fn) {
    int &s = state[fn.name];
    if (s == 2)
      return;
    if (s == 1)
      throw Error(ErrorKind::Unsupported, "recursive call cycle through '@" + fn.name + "'",
                  fn.pos);
    s = 1;
    for (const auto &block : fn.blocks)
      for (const auto &inst : block.body)
        if (inst.op == ll::Opcode::Call)
          visit(*by_name.at(inst.callee));
    state[fn.name] = 2;
    order.push_back(&fn);
  };
  for (const auto &fn : module.functions)
    visit(fn);

  FunProgram program;
  std::map<std::string, std::string> owner;
  std::map<std::string, Clique> cliques; // by while def
  for (const ll::Function *fn : order) {
    auto fa = analysis::analyze_function(*fn);
    for (auto &def : translate_function(fa)) {
      if (find_prim(def.name) || is_special_form(def.name))
        throw Error(ErrorKind::Unsupported,
                    "definition name '" + def.name + "' collides with a built-in operator",
                    fn->pos);
      auto [it, fresh] = owner.emplace(def.name, fn->name);
      if (!fresh)
        throw Error(ErrorKind::Unsupported,
                    "definition name '" + def.name + "' produced by both @" + it->second +
                        " and @" + fn->name,
                    fn->pos);
      program.defs.push_back(std::move(def));
    }
    for (std::size_t l = 0; l < fa.loops.size(); ++l) {
      int i = static_cast<int>(l);
      cliques[fa.while_name(i)] = {fa.continue_name(i), fa.step_name(i), fa.while_name(i),
                                   fa.wrap_name(i), fa.entry_name(i)};
    }
  }
  for (const auto &def : program.defs)
    if (def.general)
      program.cliques.push_back(cliques.at(def.name));
  return program;
}

} // namespace llfun::fun
