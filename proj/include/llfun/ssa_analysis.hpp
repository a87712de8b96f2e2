#pragma once

// Control flow, liveness, block signatures and loop structure of one
// function, plus the order in which its definitions are emitted.

#include "llfun/ll_ast.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace llfun::analysis {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

/// Nodes are block indices in layout order; node 0 is the entry.
struct ControlFlowGraph {
  std::vector<std::string> nodes;
  std::vector<std::vector<std::size_t>> succs; // distinct, in terminator order
  std::vector<std::vector<std::size_t>> preds; // distinct, ascending
  std::size_t entry = 0;

  std::size_t size() const { return nodes.size(); }
  std::size_t index_of(const std::string &label) const; // npos when absent
};

/// Rejects branches to undefined labels, unreachable blocks and edges into
/// the entry block.
ControlFlowGraph build_cfg(const ll::Function &fn);

/// idom[entry] == entry.
std::vector<std::size_t> immediate_dominators(const ControlFlowGraph &cfg);
bool dominates(const std::vector<std::size_t> &idom, std::size_t a, std::size_t b);

struct LoopInfo {
  unsigned id = 0; // innermost-first position; N in the clique names
  std::size_t header = npos;
  std::size_t latch = npos;
  std::size_t exit = npos;
  std::size_t preheader = npos; // the single predecessor of header outside the loop
  std::vector<std::size_t> body; // ascending, header included
  std::vector<std::string> carried; // header phi registers in phi order
  ll::Operand exit_cond;
  bool exit_on_true = true; // the latch leaves the loop when exit_cond is 1
  std::optional<unsigned> parent;

  bool contains(std::size_t block) const;
};

/// Natural loops, innermost first. Rejects irreducible flow, headers with
/// several back edges or entering edges, loops without exactly one exit edge
/// and exits that do not leave from the latch's conditional branch.
std::vector<LoopInfo> detect_loops(const ControlFlowGraph &cfg, const ll::Function &fn);

struct Liveness {
  std::vector<std::set<std::string>> live_in;
  std::vector<std::set<std::string>> live_out;
};

/// Backward fixpoint over registers. Phi operands are live out of the
/// corresponding predecessor only.
Liveness compute_liveness(const ControlFlowGraph &cfg, const ll::Function &fn);

struct BlockSignature {
  std::string label;
  std::vector<std::string> phi_params;
  std::vector<std::string> flow_params;

  /// phi_params ++ flow_params; the state parameter is implicit.
  std::vector<std::string> params() const;
};

/// One signature per block, in layout order. Also checks that every use is
/// dominated by its definition and that phis list exactly the predecessors.
std::vector<BlockSignature> compute_block_params(const ControlFlowGraph &cfg,
                                                 const ll::Function &fn);

enum class UnitKind { Block, LoopEntry, Continue, Step, While, WhileWrap, Driver };

const char *to_string(UnitKind kind);

struct EmissionUnit {
  UnitKind kind = UnitKind::Block;
  std::string name;
  std::size_t block = npos; // Block, and LoopEntry when a guard block is absorbed
  int loop = -1;            // clique units

  friend bool operator==(const EmissionUnit &, const EmissionUnit &) = default;
};

struct FunctionAnalysis {
  const ll::Function *function = nullptr;
  ControlFlowGraph cfg;
  std::vector<std::size_t> idom;
  Liveness liveness;
  std::vector<BlockSignature> signatures;
  std::vector<LoopInfo> loops;
  std::vector<int> innermost_loop; // block -> loop index, -1 at top level
  std::vector<int> latch_of;       // block -> loop it closes, -1 otherwise
  std::vector<int> header_of;      // block -> loop it heads, -1 otherwise
  std::vector<int> guard_of;       // block -> loop whose entry def absorbs it, -1 otherwise
  std::vector<EmissionUnit> order; // callees first, driver last

  std::string driver_name() const;
  std::string continue_name(int loop) const;
  std::string step_name(int loop) const;
  std::string while_name(int loop) const;
  std::string wrap_name(int loop) const;
  std::string entry_name(int loop) const;

  /// Definition that takes the signature of `block`: its block def, the
  /// entry def of the loop it heads, or the entry def absorbing it.
  std::string block_unit(std::size_t block) const;

  /// Units called along the edge from -> to; none for back and exit edges.
  std::optional<std::string> edge_callee(std::size_t from, std::size_t to) const;

  /// Names of the definitions the unit's body calls, in first-call order.
  std::vector<std::string> callees(const EmissionUnit &unit) const;

  std::vector<std::string> def_names() const;
};

/// Emission order: every unit after the units it calls, each loop clique
/// contiguous as continue, step, while, while_wrap, entry.
std::vector<EmissionUnit> order_definitions(const FunctionAnalysis &fa);

/// Everything above for one function.
FunctionAnalysis analyze_function(const ll::Function &fn);

/// Line-oriented report of the CFG, signatures, loops and emission order.
std::string dump(const FunctionAnalysis &fa);

} // namespace llfun::analysis
