#include "llfun/ssa_analysis.hpp"

#include "llfun/naming.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace llfun::analysis {

namespace {

[[noreturn]] void reject(const std::string &msg, SourcePos pos = {}) {
  throw Error(ErrorKind::Analysis, msg, pos);
}

std::string where(const ll::Function &fn) { return " in @" + fn.name; }

void collect_uses(const ll::Instruction &inst, std::vector<std::string> &out) {
  if (inst.op == ll::Opcode::Phi) {
    for (const auto &in : inst.incoming)
      if (in.value.is_reg())
        out.push_back(in.value.reg);
    return;
  }
  for (const auto &op : inst.operands)
    if (op.is_reg())
      out.push_back(op.reg);
}

} // namespace

// ---------------------------------------------------------------------------
// CFG

std::size_t ControlFlowGraph::index_of(const std::string &label) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == label)
      return i;
  return npos;
}

ControlFlowGraph build_cfg(const ll::Function &fn) {
  ControlFlowGraph cfg;
  for (const auto &block : fn.blocks)
    cfg.nodes.push_back(block.label);
  std::size_t n = cfg.size();
  cfg.succs.resize(n);
  cfg.preds.resize(n);
  for (std::size_t b = 0; b < n; ++b) {
    const auto &term = fn.blocks[b].terminator;
    for (const auto &target : term.targets) {
      std::size_t t = cfg.index_of(target);
      if (t == npos)
        reject("branch to undefined label '%" + target + "'" + where(fn), term.pos);
      if (std::find(cfg.succs[b].begin(), cfg.succs[b].end(), t) == cfg.succs[b].end())
        cfg.succs[b].push_back(t);
      cfg.preds[t].push_back(b);
    }
  }
  for (auto &p : cfg.preds) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  if (n == 0)
    return cfg;
  if (!cfg.preds[cfg.entry].empty())
    reject("entry block '%" + cfg.nodes[cfg.entry] + "' has predecessors" + where(fn),
           fn.blocks[cfg.preds[cfg.entry][0]].terminator.pos);

  std::vector<bool> seen(n, false);
  std::vector<std::size_t> work{cfg.entry};
  seen[cfg.entry] = true;
  while (!work.empty()) {
    std::size_t b = work.back();
    work.pop_back();
    for (std::size_t s : cfg.succs[b])
      if (!seen[s]) {
        seen[s] = true;
        work.push_back(s);
      }
  }
  for (std::size_t b = 0; b < n; ++b)
    if (!seen[b])
      reject("block '%" + cfg.nodes[b] + "' is unreachable" + where(fn),
             fn.blocks[b].terminator.pos);
  return cfg;
}

// ---------------------------------------------------------------------------
// Dominators

namespace {

std::vector<std::size_t> reverse_postorder(const ControlFlowGraph &cfg) {
  std::vector<std::size_t> post;
  std::vector<bool> seen(cfg.size(), false);
  // iterative DFS keeping successor cursors
  std::vector<std::pair<std::size_t, std::size_t>> stack{{cfg.entry, 0}};
  seen[cfg.entry] = true;
  while (!stack.empty()) {
    auto &[b, k] = stack.back();
    if (k < cfg.succs[b].size()) {
      std::size_t s = cfg.succs[b][k++];
      if (!seen[s]) {
        seen[s] = true;
        stack.push_back({s, 0});
      }
    } else {
      post.push_back(b);
      stack.pop_back();
    }
  }
  std::reverse(post.begin(), post.end());
  return post;
}

} // namespace

std::vector<std::size_t> immediate_dominators(const ControlFlowGraph &cfg) {
  std::size_t n = cfg.size();
  std::vector<std::size_t> idom(n, npos);
  if (n == 0)
    return idom;
  auto rpo = reverse_postorder(cfg);
  std::vector<std::size_t> order(n, npos);
  for (std::size_t i = 0; i < rpo.size(); ++i)
    order[rpo[i]] = i;

  auto intersect = [&](std::size_t a, std::size_t b) {
    while (a != b) {
      while (order[a] > order[b])
        a = idom[a];
      while (order[b] > order[a])
        b = idom[b];
    }
    return a;
  };

  idom[cfg.entry] = cfg.entry;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t b : rpo) {
      if (b == cfg.entry)
        continue;
      std::size_t next = npos;
      for (std::size_t p : cfg.preds[b]) {
        if (idom[p] == npos)
          continue;
        next = next == npos ? p : intersect(p, next);
      }
      if (next != idom[b]) {
        idom[b] = next;
        changed = true;
      }
    }
  }
  return idom;
}

bool dominates(const std::vector<std::size_t> &idom, std::size_t a, std::size_t b) {
  while (true) {
    if (a == b)
      return true;
    std::size_t up = idom[b];
    if (up == b || up == npos)
      return false;
    b = up;
  }
}

// ---------------------------------------------------------------------------
// Loops

bool LoopInfo::contains(std::size_t block) const {
  return std::binary_search(body.begin(), body.end(), block);
}

std::vector<LoopInfo> detect_loops(const ControlFlowGraph &cfg, const ll::Function &fn) {
  auto idom = immediate_dominators(cfg);
  std::size_t n = cfg.size();

  std::map<std::size_t, std::size_t> back_edges; // header -> latch
  std::vector<std::pair<std::size_t, std::size_t>> forward;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t s : cfg.succs[b]) {
      if (dominates(idom, s, b)) {
        if (back_edges.count(s))
          reject("loop header '%" + cfg.nodes[s] + "' has more than one back edge" +
                     where(fn),
                 fn.blocks[b].terminator.pos);
        back_edges[s] = b;
      } else {
        forward.push_back({b, s});
      }
    }

  // Without back edges the graph must be acyclic.
  {
    std::vector<std::size_t> indeg(n, 0);
    std::vector<std::vector<std::size_t>> out(n);
    for (auto [a, b] : forward) {
      out[a].push_back(b);
      ++indeg[b];
    }
    std::vector<std::size_t> ready;
    for (std::size_t b = 0; b < n; ++b)
      if (indeg[b] == 0)
        ready.push_back(b);
    std::size_t visited = 0;
    while (!ready.empty()) {
      std::size_t b = ready.back();
      ready.pop_back();
      ++visited;
      for (std::size_t s : out[b])
        if (--indeg[s] == 0)
          ready.push_back(s);
    }
    if (visited != n) {
      std::size_t culprit = 0;
      while (culprit < n && indeg[culprit] == 0)
        ++culprit;
      reject("irreducible control flow at block '%" + cfg.nodes[culprit] + "'" + where(fn),
             fn.blocks[culprit].terminator.pos);
    }
  }

  std::vector<LoopInfo> loops;
  for (auto [header, latch] : back_edges) {
    LoopInfo loop;
    loop.header = header;
    loop.latch = latch;
    std::vector<bool> in(n, false);
    in[header] = true;
    std::vector<std::size_t> work;
    if (!in[latch]) {
      in[latch] = true;
      work.push_back(latch);
    }
    while (!work.empty()) {
      std::size_t b = work.back();
      work.pop_back();
      for (std::size_t p : cfg.preds[b])
        if (!in[p]) {
          in[p] = true;
          work.push_back(p);
        }
    }
    for (std::size_t b = 0; b < n; ++b)
      if (in[b])
        loop.body.push_back(b);
    loops.push_back(std::move(loop));
  }

  std::sort(loops.begin(), loops.end(), [](const LoopInfo &a, const LoopInfo &b) {
    if (a.body.size() != b.body.size())
      return a.body.size() < b.body.size();
    return a.header < b.header;
  });

  std::vector<int> latch_owner(n, -1);
  for (std::size_t i = 0; i < loops.size(); ++i) {
    LoopInfo &loop = loops[i];
    loop.id = static_cast<unsigned>(i);
    const auto &hdr = fn.blocks[loop.header];
    const std::string where_loop =
        "loop at '%" + cfg.nodes[loop.header] + "'" + where(fn);

    if (latch_owner[loop.latch] >= 0)
      reject("block '%" + cfg.nodes[loop.latch] + "' closes two loops" + where(fn),
             fn.blocks[loop.latch].terminator.pos);
    latch_owner[loop.latch] = static_cast<int>(i);

    for (std::size_t j = i + 1; j < loops.size(); ++j)
      if (loops[j].contains(loop.header)) {
        loop.parent = static_cast<unsigned>(j);
        break;
      }

    std::vector<std::size_t> outside;
    for (std::size_t p : cfg.preds[loop.header])
      if (!loop.contains(p))
        outside.push_back(p);
    if (outside.size() != 1)
      reject(where_loop + " is entered from " + std::to_string(outside.size()) +
                 " blocks; a single preheader is required",
             hdr.terminator.pos);
    loop.preheader = outside[0];

    std::vector<std::pair<std::size_t, std::size_t>> exits;
    for (std::size_t b : loop.body)
      for (std::size_t s : cfg.succs[b])
        if (!loop.contains(s))
          exits.push_back({b, s});
    if (exits.empty())
      reject(where_loop + " has no exit", hdr.terminator.pos);
    if (exits.size() > 1)
      reject(where_loop + " has " + std::to_string(exits.size()) +
                 " exit edges; only single-exit loops are supported",
             fn.blocks[exits[1].first].terminator.pos);
    if (exits[0].first != loop.latch)
      reject(where_loop + " exits from '%" + cfg.nodes[exits[0].first] +
                 "' rather than from its latch",
             fn.blocks[exits[0].first].terminator.pos);
    loop.exit = exits[0].second;

    const auto &term = fn.blocks[loop.latch].terminator;
    if (term.op != ll::Opcode::CondBr)
      reject(where_loop + ": latch does not end in a conditional branch", term.pos);
    loop.exit_cond = term.operands[0];
    loop.exit_on_true = term.targets[0] == cfg.nodes[loop.exit];

    for (const auto &phi : hdr.phis)
      loop.carried.push_back(*phi.result);
  }
  return loops;
}

// ---------------------------------------------------------------------------
// Liveness and signatures

Liveness compute_liveness(const ControlFlowGraph &cfg, const ll::Function &fn) {
  std::size_t n = cfg.size();
  std::vector<std::set<std::string>> upward(n), defs(n), phi_defs(n);
  // phi_uses[b][s]: registers flowing from b into the phis of s
  std::vector<std::map<std::size_t, std::set<std::string>>> phi_uses(n);

  for (std::size_t b = 0; b < n; ++b) {
    const auto &block = fn.blocks[b];
    for (const auto &phi : block.phis) {
      phi_defs[b].insert(*phi.result);
      defs[b].insert(*phi.result);
      for (const auto &in : phi.incoming) {
        std::size_t p = cfg.index_of(in.block);
        if (p != npos && in.value.is_reg())
          phi_uses[p][b].insert(in.value.reg);
      }
    }
    auto scan = [&](const ll::Instruction &inst) {
      std::vector<std::string> uses;
      collect_uses(inst, uses);
      for (auto &u : uses)
        if (!defs[b].count(u))
          upward[b].insert(u);
      if (inst.result)
        defs[b].insert(*inst.result);
    };
    for (const auto &inst : block.body)
      scan(inst);
    scan(block.terminator);
  }

  Liveness live;
  live.live_in.assign(n, {});
  live.live_out.assign(n, {});
  auto post = reverse_postorder(cfg);
  std::reverse(post.begin(), post.end());
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t b : post) {
      std::set<std::string> out;
      for (std::size_t s : cfg.succs[b]) {
        for (const auto &r : live.live_in[s])
          if (!phi_defs[s].count(r))
            out.insert(r);
        if (auto it = phi_uses[b].find(s); it != phi_uses[b].end())
          out.insert(it->second.begin(), it->second.end());
      }
      std::set<std::string> in = upward[b];
      for (const auto &r : out)
        if (!defs[b].count(r))
          in.insert(r);
      if (out != live.live_out[b] || in != live.live_in[b]) {
        live.live_out[b] = std::move(out);
        live.live_in[b] = std::move(in);
        changed = true;
      }
    }
  }
  return live;
}

std::vector<std::string> BlockSignature::params() const {
  std::vector<std::string> all = phi_params;
  all.insert(all.end(), flow_params.begin(), flow_params.end());
  return all;
}

namespace {

void check_phis(const ControlFlowGraph &cfg, const ll::Function &fn) {
  for (std::size_t b = 0; b < cfg.size(); ++b) {
    const auto &preds = cfg.preds[b];
    for (const auto &phi : fn.blocks[b].phis) {
      std::map<std::size_t, ll::Operand> seen;
      for (const auto &in : phi.incoming) {
        std::size_t p = cfg.index_of(in.block);
        if (p == npos || !std::binary_search(preds.begin(), preds.end(), p))
          reject("phi '%" + *phi.result + "' names '%" + in.block +
                     "', which is not a predecessor of '%" + cfg.nodes[b] + "'" + where(fn),
                 phi.pos);
        auto [it, fresh] = seen.emplace(p, in.value);
        if (!fresh && !(it->second == in.value))
          reject("phi '%" + *phi.result + "' has conflicting values for '%" + in.block + "'",
                 phi.pos);
      }
      if (seen.size() != preds.size())
        reject("phi '%" + *phi.result + "' does not cover every predecessor of '%" +
                   cfg.nodes[b] + "'" + where(fn),
               phi.pos);
    }
  }
}

struct DefSite {
  std::size_t block;
  long position; // -1 for formals, 0 for phis, k+1 for body[k]
};

void check_dominance(const ControlFlowGraph &cfg, const std::vector<std::size_t> &idom,
                     const ll::Function &fn) {
  std::map<std::string, DefSite> sites;
  for (const auto &param : fn.params)
    sites[param.name] = {cfg.entry, -1};
  for (std::size_t b = 0; b < cfg.size(); ++b) {
    const auto &block = fn.blocks[b];
    for (const auto &phi : block.phis)
      sites[*phi.result] = {b, 0};
    for (std::size_t k = 0; k < block.body.size(); ++k)
      if (block.body[k].result)
        sites[*block.body[k].result] = {b, static_cast<long>(k) + 1};
  }
  auto broken = [&](const std::string &reg, const ll::Instruction &inst) {
    reject("broken SSA dominance: '%" + reg + "' does not dominate its use" + where(fn),
           inst.pos);
  };
  for (std::size_t b = 0; b < cfg.size(); ++b) {
    const auto &block = fn.blocks[b];
    for (const auto &phi : block.phis)
      for (const auto &in : phi.incoming) {
        if (!in.value.is_reg())
          continue;
        const DefSite &d = sites.at(in.value.reg);
        if (!dominates(idom, d.block, cfg.index_of(in.block)))
          broken(in.value.reg, phi);
      }
    auto check = [&](const ll::Instruction &inst, long pos) {
      for (const auto &op : inst.operands) {
        if (!op.is_reg())
          continue;
        const DefSite &d = sites.at(op.reg);
        if (d.block == b ? d.position >= pos : !dominates(idom, d.block, b))
          broken(op.reg, inst);
      }
    };
    for (std::size_t k = 0; k < block.body.size(); ++k)
      check(block.body[k], static_cast<long>(k) + 1);
    check(block.terminator, static_cast<long>(block.body.size()) + 1);
  }
}

} // namespace

std::vector<BlockSignature> compute_block_params(const ControlFlowGraph &cfg,
                                                 const ll::Function &fn) {
  check_phis(cfg, fn);
  check_dominance(cfg, immediate_dominators(cfg), fn);
  Liveness live = compute_liveness(cfg, fn);

  if (cfg.size() > 0) {
    std::set<std::string> formals;
    for (const auto &param : fn.params)
      formals.insert(param.name);
    for (const auto &r : live.live_in[cfg.entry])
      if (!formals.count(r))
        reject("register '%" + r + "' is used before any definition" + where(fn), fn.pos);
  }

  // Textual use order of every block, for deterministic flow-param order.
  std::vector<std::vector<std::string>> uses(cfg.size());
  for (std::size_t b = 0; b < cfg.size(); ++b)
    ll::for_each_instruction(fn.blocks[b],
                             [&](const ll::Instruction &inst) { collect_uses(inst, uses[b]); });

  std::vector<BlockSignature> sigs;
  for (std::size_t b = 0; b < cfg.size(); ++b) {
    BlockSignature sig;
    sig.label = cfg.nodes[b];
    for (const auto &phi : fn.blocks[b].phis)
      sig.phi_params.push_back(*phi.result);
    std::set<std::string> pending = live.live_in[b];
    for (std::size_t k = 0; k < cfg.size() && !pending.empty(); ++k)
      for (const auto &u : uses[(b + k) % cfg.size()])
        if (pending.erase(u))
          sig.flow_params.push_back(u);
    sig.flow_params.insert(sig.flow_params.end(), pending.begin(), pending.end());
    sigs.push_back(std::move(sig));
  }
  return sigs;
}

// ---------------------------------------------------------------------------
// Emission units

const char *to_string(UnitKind kind) {
  switch (kind) {
  case UnitKind::Block: return "block";
  case UnitKind::LoopEntry: return "entry";
  case UnitKind::Continue: return "continue";
  case UnitKind::Step: return "step";
  case UnitKind::While: return "while";
  case UnitKind::WhileWrap: return "while_wrap";
  case UnitKind::Driver: return "driver";
  }
  return "?";
}

std::string FunctionAnalysis::driver_name() const { return mangle_global(function->name); }

std::string FunctionAnalysis::continue_name(int loop) const {
  if (loops.size() == 1)
    return driver_name() + "_continue";
  return driver_name() + "_continue_" + std::to_string(loop);
}

std::string FunctionAnalysis::step_name(int loop) const {
  return driver_name() + "_step_" + std::to_string(loop);
}

std::string FunctionAnalysis::while_name(int loop) const { return step_name(loop) + "_while"; }

std::string FunctionAnalysis::wrap_name(int loop) const { return while_name(loop) + "_wrap"; }

std::string FunctionAnalysis::entry_name(int loop) const {
  return driver_name() + "_" + std::to_string(loop);
}

std::string FunctionAnalysis::block_unit(std::size_t block) const {
  if (guard_of[block] >= 0)
    return entry_name(guard_of[block]);
  if (header_of[block] >= 0)
    return entry_name(header_of[block]);
  return block_def_name(function->name, cfg.nodes[block]);
}

std::optional<std::string> FunctionAnalysis::edge_callee(std::size_t from,
                                                         std::size_t to) const {
  int closes = latch_of[from];
  if (closes >= 0) {
    const LoopInfo &loop = loops[static_cast<std::size_t>(closes)];
    if (to == loop.header || to == loop.exit)
      return std::nullopt;
  }
  return block_unit(to);
}

std::vector<std::string> FunctionAnalysis::callees(const EmissionUnit &unit) const {
  std::vector<std::string> out;
  auto add = [&](const std::string &name) {
    if (std::find(out.begin(), out.end(), name) == out.end())
      out.push_back(name);
  };
  auto add_edges = [&](std::size_t b) {
    for (std::size_t s : cfg.succs[b])
      if (auto callee = edge_callee(b, s))
        add(*callee);
  };
  switch (unit.kind) {
  case UnitKind::Driver:
    add(block_unit(cfg.entry));
    break;
  case UnitKind::Block:
    add_edges(unit.block);
    break;
  case UnitKind::LoopEntry:
    if (unit.block != npos)
      add(continue_name(unit.loop));
    add(wrap_name(unit.loop));
    break;
  case UnitKind::Continue:
    add(block_unit(loops[static_cast<std::size_t>(unit.loop)].exit));
    break;
  case UnitKind::Step:
    add_edges(loops[static_cast<std::size_t>(unit.loop)].header);
    break;
  case UnitKind::While:
    add(step_name(unit.loop));
    add(while_name(unit.loop));
    break;
  case UnitKind::WhileWrap:
    add(while_name(unit.loop));
    add(continue_name(unit.loop));
    break;
  }
  return out;
}

std::vector<std::string> FunctionAnalysis::def_names() const {
  std::vector<std::string> names;
  for (const auto &unit : order)
    names.push_back(unit.name);
  return names;
}

std::vector<EmissionUnit> order_definitions(const FunctionAnalysis &fa) {
  // Every unit, by name.
  std::map<std::string, EmissionUnit> units;
  auto add = [&](EmissionUnit u) {
    std::string name = u.name;
    if (!units.emplace(name, std::move(u)).second)
      throw Error(ErrorKind::Unsupported,
                  "generated definition name '" + name + "' is not unique in @" +
                      fa.function->name,
                  fa.function->pos);
  };
  add({UnitKind::Driver, fa.driver_name(), npos, -1});
  for (std::size_t i = 0; i < fa.loops.size(); ++i) {
    int l = static_cast<int>(i);
    std::size_t guard = fa.loops[i].preheader;
    bool absorbed = fa.guard_of[guard] == l;
    add({UnitKind::Continue, fa.continue_name(l), npos, l});
    add({UnitKind::Step, fa.step_name(l), npos, l});
    add({UnitKind::While, fa.while_name(l), npos, l});
    add({UnitKind::WhileWrap, fa.wrap_name(l), npos, l});
    add({UnitKind::LoopEntry, fa.entry_name(l), absorbed ? guard : npos, l});
  }
  for (std::size_t b = 0; b < fa.cfg.size(); ++b)
    if (fa.guard_of[b] < 0 && fa.header_of[b] < 0)
      add({UnitKind::Block, block_def_name(fa.function->name, fa.cfg.nodes[b]), b, -1});

  std::vector<EmissionUnit> order;
  std::set<std::string> done;
  std::set<int> cliques_done;
  std::function<void(const std::string &)> visit = [&](const std::string &name) {
    const EmissionUnit &unit = units.at(name);
    if (unit.loop >= 0) {
      int l = unit.loop;
      if (!cliques_done.insert(l).second)
        return;
      std::vector<std::string> members = {fa.continue_name(l), fa.step_name(l),
                                          fa.while_name(l), fa.wrap_name(l), fa.entry_name(l)};
      for (const auto &member : members)
        done.insert(member);
      for (std::size_t m : {0, 1, 4})
        for (const auto &callee : fa.callees(units.at(members[m])))
          if (std::find(members.begin(), members.end(), callee) == members.end())
            visit(callee);
      for (const auto &member : members)
        order.push_back(units.at(member));
      return;
    }
    if (!done.insert(name).second)
      return;
    for (const auto &callee : fa.callees(unit))
      visit(callee);
    order.push_back(unit);
  };
  visit(fa.driver_name());
  return order;
}

FunctionAnalysis analyze_function(const ll::Function &fn) {
  FunctionAnalysis fa;
  fa.function = &fn;
  fa.cfg = build_cfg(fn);
  fa.idom = immediate_dominators(fa.cfg);
  fa.signatures = compute_block_params(fa.cfg, fn);
  fa.liveness = compute_liveness(fa.cfg, fn);
  fa.loops = detect_loops(fa.cfg, fn);

  std::size_t n = fa.cfg.size();
  fa.innermost_loop.assign(n, -1);
  fa.latch_of.assign(n, -1);
  fa.header_of.assign(n, -1);
  fa.guard_of.assign(n, -1);
  for (std::size_t i = fa.loops.size(); i-- > 0;) {
    const LoopInfo &loop = fa.loops[i];
    for (std::size_t b : loop.body)
      if (fa.innermost_loop[b] < 0 ||
          fa.loops[static_cast<std::size_t>(fa.innermost_loop[b])].body.size() >
              loop.body.size())
        fa.innermost_loop[b] = static_cast<int>(i);
  }
  for (std::size_t i = 0; i < fa.loops.size(); ++i) {
    const LoopInfo &loop = fa.loops[i];
    fa.latch_of[loop.latch] = static_cast<int>(i);
    fa.header_of[loop.header] = static_cast<int>(i);
  }
  // A preheader that only chooses between entering the loop and skipping to
  // its exit is folded into the loop's entry def.
  for (std::size_t i = 0; i < fa.loops.size(); ++i) {
    const LoopInfo &loop = fa.loops[i];
    std::size_t p = loop.preheader;
    const auto &term = fn.blocks[p].terminator;
    int parent = loop.parent ? static_cast<int>(*loop.parent) : -1;
    bool guard = term.op == ll::Opcode::CondBr && fa.cfg.succs[p].size() == 2 &&
                 std::count(fa.cfg.succs[p].begin(), fa.cfg.succs[p].end(), loop.header) == 1 &&
                 std::count(fa.cfg.succs[p].begin(), fa.cfg.succs[p].end(), loop.exit) == 1;
    if (guard && fa.innermost_loop[p] == parent && fa.header_of[p] < 0 &&
        fa.latch_of[p] < 0 && fa.guard_of[p] < 0)
      fa.guard_of[p] = static_cast<int>(i);
  }
  fa.order = order_definitions(fa);
  return fa;
}

std::string dump(const FunctionAnalysis &fa) {
  std::ostringstream out;
  const auto &cfg = fa.cfg;
  auto list = [&](const std::vector<std::string> &xs) {
    std::string s;
    for (const auto &x : xs)
      s += " " + x;
    return s;
  };
  out << "function @" << fa.function->name << '\n';
  for (std::size_t b = 0; b < cfg.size(); ++b) {
    out << "block %" << cfg.nodes[b] << " succs";
    for (std::size_t s : cfg.succs[b])
      out << " %" << cfg.nodes[s];
    out << '\n';
    out << "  phi-params:" << list(fa.signatures[b].phi_params) << '\n';
    out << "  flow-params:" << list(fa.signatures[b].flow_params) << '\n';
  }
  for (const auto &loop : fa.loops) {
    out << "loop " << loop.id << " header %" << cfg.nodes[loop.header] << " latch %"
        << cfg.nodes[loop.latch] << " exit %" << cfg.nodes[loop.exit] << " preheader %"
        << cfg.nodes[loop.preheader] << '\n';
    out << "  body:";
    for (std::size_t b : loop.body)
      out << " %" << cfg.nodes[b];
    out << '\n';
    out << "  carried:" << list(loop.carried) << '\n';
    out << "  exit-when: " << (loop.exit_cond.is_reg() ? "%" + loop.exit_cond.reg
                                                       : std::to_string(loop.exit_cond.value))
        << " = " << (loop.exit_on_true ? 1 : 0) << '\n';
    if (loop.parent)
      out << "  parent: " << *loop.parent << '\n';
  }
  out << "order:" << list(fa.def_names()) << '\n';
  return out.str();
}

} // namespace llfun::analysis
