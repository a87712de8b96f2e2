#include "llfun/evaluator.hpp"

#include "llfun/error.hpp"

#include <deque>
#include <ostream>

namespace llfun::eval {

using fun::Expr;
using fun::FunDef;
using fun::FunProgram;
using fun::Kind;

namespace {

enum class P : std::uint8_t {
  Add, Sub, Mul, And, Or, Xor, Shl, Lshr, Ashr,
  Eq, Ne, Ugt, Uge, Ult, Ule, Sgt, Sge, Slt, Sle,
  Zext, Sext, Trunc, Select, Bits, Plus, Times, Equal,
  Load, Store, Stack, Alloca, UpdateRetval, Retval, Init, Begin, End,
};

struct PrimCode {
  std::string_view name;
  P code;
};

constexpr PrimCode prim_codes[] = {
    {"add", P::Add}, {"sub", P::Sub}, {"mul", P::Mul}, {"and", P::And}, {"or", P::Or},
    {"xor", P::Xor}, {"shl", P::Shl}, {"lshr", P::Lshr}, {"ashr", P::Ashr},
    {"icmp-eq", P::Eq}, {"icmp-ne", P::Ne}, {"icmp-ugt", P::Ugt}, {"icmp-uge", P::Uge},
    {"icmp-ult", P::Ult}, {"icmp-ule", P::Ule}, {"icmp-sgt", P::Sgt}, {"icmp-sge", P::Sge},
    {"icmp-slt", P::Slt}, {"icmp-sle", P::Sle}, {"zext", P::Zext}, {"sext", P::Sext},
    {"trunc", P::Trunc}, {"select", P::Select}, {"bits", P::Bits}, {"+", P::Plus},
    {"*", P::Times}, {"=", P::Equal}, {"loadbytes", P::Load}, {"storebytes", P::Store},
    {"stack", P::Stack}, {"alloca", P::Alloca}, {"update-retval", P::UpdateRetval},
    {"retval", P::Retval}, {"init-stack-frame", P::Init}, {"begin-stack-frame", P::Begin},
    {"end-stack-frame", P::End},
};

std::optional<P> prim_code(std::string_view name) {
  for (const auto &p : prim_codes)
    if (p.name == name)
      return p.code;
  return std::nullopt;
}

std::string_view prim_name(P code) {
  for (const auto &p : prim_codes)
    if (p.code == code)
      return p.name;
  return "?";
}

[[noreturn]] void fault(const std::string &msg) { throw Error(ErrorKind::Runtime, msg); }

unsigned width(Nat w, P op) {
  if (w < 1 || w > 64)
    fault(std::string(prim_name(op)) + ": width " + to_string(w) + " is outside 1..64");
  return static_cast<unsigned>(w);
}

Nat fits(Nat v, unsigned w, P op) {
  if (v >> w)
    fault(std::string(prim_name(op)) + ": operand " + to_string(v) + " does not fit in " +
          std::to_string(w) + " bits");
  return v;
}

__int128 as_signed(Nat v, unsigned w) {
  if ((v >> (w - 1)) & 1)
    return static_cast<__int128>(v) - static_cast<__int128>(pow2(w));
  return static_cast<__int128>(v);
}

Nat pure(P op, const Nat *a) {
  switch (op) {
  case P::Add: case P::Sub: case P::Mul: case P::And: case P::Or: case P::Xor:
  case P::Shl: case P::Lshr: case P::Ashr: {
    unsigned w = width(a[0], op);
    Nat x = fits(a[1], w, op), y = fits(a[2], w, op), m = low_mask(w);
    switch (op) {
    case P::Add: return (x + y) & m;
    case P::Sub: return (x + pow2(w) - y) & m;
    case P::Mul: return (x * y) & m;
    case P::And: return x & y;
    case P::Or: return x | y;
    case P::Xor: return x ^ y;
    case P::Shl: return y >= w ? 0 : (x << static_cast<unsigned>(y)) & m;
    case P::Lshr: return y >= w ? 0 : x >> static_cast<unsigned>(y);
    default: return y >= w ? 0 : static_cast<Nat>(as_signed(x, w) >> static_cast<unsigned>(y)) & m;
    }
  }
  case P::Eq: case P::Ne: case P::Ugt: case P::Uge: case P::Ult: case P::Ule:
  case P::Sgt: case P::Sge: case P::Slt: case P::Sle: {
    unsigned w = width(a[0], op);
    Nat x = fits(a[1], w, op), y = fits(a[2], w, op);
    __int128 sx = as_signed(x, w), sy = as_signed(y, w);
    bool r = false;
    switch (op) {
    case P::Eq: r = x == y; break;
    case P::Ne: r = x != y; break;
    case P::Ugt: r = x > y; break;
    case P::Uge: r = x >= y; break;
    case P::Ult: r = x < y; break;
    case P::Ule: r = x <= y; break;
    case P::Sgt: r = sx > sy; break;
    case P::Sge: r = sx >= sy; break;
    case P::Slt: r = sx < sy; break;
    default: r = sx <= sy; break;
    }
    return r ? 1 : 0;
  }
  case P::Zext: case P::Sext: case P::Trunc: {
    unsigned from = width(a[0], op), to = width(a[1], op);
    Nat x = fits(a[2], from, op);
    if (op == P::Trunc) {
      if (to > from)
        fault("trunc: target width " + std::to_string(to) + " exceeds source width");
      return x & low_mask(to);
    }
    if (to < from)
      fault(std::string(prim_name(op)) + ": target width " + std::to_string(to) +
            " is below source width");
    if (op == P::Zext)
      return x;
    return static_cast<Nat>(as_signed(x, from)) & low_mask(to);
  }
  case P::Select:
    if (a[0] > 1)
      fault("select: condition " + to_string(a[0]) + " is not 0 or 1");
    return a[0] ? a[1] : a[2];
  case P::Bits:
    if (a[1] < a[2] || a[1] > 127)
      fault("bits: bad bit range " + to_string(a[1]) + ".." + to_string(a[2]));
    return bits(a[0], static_cast<unsigned>(a[1]), static_cast<unsigned>(a[2]));
  case P::Plus:
    if (a[0] > nat_max - a[1])
      fault("+: result exceeds 128 bits");
    return a[0] + a[1];
  case P::Times:
    if (a[0] != 0 && a[1] > nat_max / a[0])
      fault("*: result exceeds 128 bits");
    return a[0] * a[1];
  case P::Equal:
    return a[0] == a[1] ? 1 : 0;
  default:
    fault(std::string(prim_name(op)) + " needs a machine state");
  }
}

unsigned byte_count(Nat n, P op) {
  if (n < 1 || n > max_access_bytes)
    fault(std::string(prim_name(op)) + ": byte count " + to_string(n) + " is outside 1..16");
  return static_cast<unsigned>(n);
}

// ----- compiled form ---------------------------------------------------------

struct Slot {
  std::uint32_t index = 0;
  bool state = false;
};

struct Node {
  Expr::Tag op = Expr::Tag::Const;
  P prim{};
  bool state = false; // single value that is a machine state
  bool move = false;  // state variable read for the last time
  Slot slot;
  Nat value = 0;
  std::uint32_t callee = 0;
  std::vector<Node *> kids;
  std::vector<Slot> binds;
  Node *body = nullptr;
};

struct CDef {
  const FunDef *def = nullptr;
  std::vector<Slot> params;
  std::uint32_t nat_slots = 0;
  std::uint32_t state_slots = 0;
  Node *body = nullptr;
  std::deque<Node> pool;
};

struct Frame {
  std::vector<Nat> n;
  std::vector<MachineState> s;
};

struct Results {
  std::vector<Nat> n;
  std::vector<MachineState> s;
};

class Compiler {
public:
  Compiler(const FunProgram &program, const std::map<std::string, std::uint32_t> &index)
      : program_(program), index_(index) {}

  void compile(const FunDef &def, CDef &out) {
    out_ = &out;
    def_ = &def;
    out.def = &def;
    scope_.clear();
    for (const auto &p : def.params) {
      Slot s = fresh(p.kind == Kind::State);
      out.params.push_back(s);
      scope_.push_back({p.name, s});
    }
    out.body = expr(*def.body);
    std::vector<bool> live(out.state_slots, false);
    mark(out.body, live);
  }

private:
  const FunProgram &program_;
  const std::map<std::string, std::uint32_t> &index_;
  CDef *out_ = nullptr;
  const FunDef *def_ = nullptr;
  std::vector<std::pair<std::string, Slot>> scope_;

  [[noreturn]] void reject(const std::string &msg) const {
    throw Error(ErrorKind::Analysis, def_->name + ": " + msg);
  }

  Slot fresh(bool state) {
    return state ? Slot{out_->state_slots++, true} : Slot{out_->nat_slots++, false};
  }

  Node *node(Expr::Tag op) {
    Node &n = out_->pool.emplace_back();
    n.op = op;
    return &n;
  }

  Slot lookup(const std::string &name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == name)
        return it->second;
    reject("unbound variable '" + name + "'");
  }

  void want(const Node *n, bool state, const std::string &where) const {
    if (n->state != state)
      reject(where + (state ? " needs a machine state" : " needs a natural"));
  }

  Node *expr(const Expr &e) {
    switch (e.tag) {
    case Expr::Tag::Const: {
      Node *n = node(e.tag);
      n->value = e.value;
      return n;
    }
    case Expr::Tag::Var: {
      Node *n = node(e.tag);
      n->slot = lookup(e.name);
      n->state = n->slot.state;
      return n;
    }
    case Expr::Tag::Prim: {
      Node *n = node(e.tag);
      auto code = prim_code(e.name);
      const fun::PrimInfo *info = fun::find_prim(e.name);
      if (!code || !info)
        reject("unknown primitive '" + e.name + "'");
      n->prim = *code;
      n->state = info->returns_state;
      for (std::size_t k = 0; k < e.args.size(); ++k) {
        n->kids.push_back(expr(*e.args[k]));
        bool st = info->last_is_state && k + 1 == e.args.size();
        want(n->kids.back(), st, "operand " + std::to_string(k + 1) + " of " + e.name);
      }
      return n;
    }
    case Expr::Tag::Call: {
      Node *n = node(e.tag);
      n->callee = index_.at(e.name);
      const FunDef &callee = program_.defs[n->callee];
      n->state = callee.results.size() == 1 && callee.results[0] == Kind::State;
      for (std::size_t k = 0; k < e.args.size(); ++k) {
        n->kids.push_back(expr(*e.args[k]));
        want(n->kids.back(), callee.params[k].kind == Kind::State,
             "argument " + std::to_string(k + 1) + " of " + e.name);
      }
      return n;
    }
    case Expr::Tag::Let: {
      Node *n = node(e.tag);
      std::size_t mark = scope_.size();
      for (const auto &[name, value] : e.bindings) {
        Node *v = expr(*value);
        Slot s = fresh(v->state);
        n->kids.push_back(v);
        n->binds.push_back(s);
        scope_.push_back({name, s});
      }
      n->body = expr(*e.body);
      n->state = n->body->state;
      scope_.resize(mark);
      return n;
    }
    case Expr::Tag::If: {
      Node *n = node(e.tag);
      for (const auto &a : e.args)
        n->kids.push_back(expr(*a));
      want(n->kids[0], false, "if condition");
      n->state = n->kids[1]->state;
      return n;
    }
    case Expr::Tag::MvList: {
      Node *n = node(e.tag);
      for (const auto &a : e.args)
        n->kids.push_back(expr(*a));
      return n;
    }
    case Expr::Tag::MetList: {
      Node *n = node(e.tag);
      Node *c = expr(*e.args[0]);
      n->kids.push_back(c);
      const FunDef &callee = program_.defs[c->callee];
      std::size_t mark = scope_.size();
      for (std::size_t k = 0; k < e.names.size(); ++k) {
        Slot s = fresh(callee.results[k] == Kind::State);
        n->binds.push_back(s);
        scope_.push_back({e.names[k], s});
      }
      n->body = expr(*e.body);
      n->state = n->body->state;
      scope_.resize(mark);
      return n;
    }
    }
    reject("bad expression");
  }

  // Backward pass in evaluation order: a state variable is moved out of its
  // slot when no later read of that slot can happen.
  void mark(Node *n, std::vector<bool> &live) {
    switch (n->op) {
    case Expr::Tag::Const:
      return;
    case Expr::Tag::Var:
      if (n->slot.state) {
        n->move = !live[n->slot.index];
        live[n->slot.index] = true;
      }
      return;
    case Expr::Tag::Let:
      mark(n->body, live);
      for (std::size_t k = n->kids.size(); k-- > 0;) {
        if (n->binds[k].state)
          live[n->binds[k].index] = false;
        mark(n->kids[k], live);
      }
      return;
    case Expr::Tag::MetList:
      mark(n->body, live);
      for (const Slot &s : n->binds)
        if (s.state)
          live[s.index] = false;
      mark(n->kids[0], live);
      return;
    case Expr::Tag::If: {
      std::vector<bool> other = live;
      mark(n->kids[1], live);
      mark(n->kids[2], other);
      for (std::size_t k = 0; k < live.size(); ++k)
        live[k] = live[k] || other[k];
      mark(n->kids[0], live);
      return;
    }
    default:
      for (std::size_t k = n->kids.size(); k-- > 0;)
        mark(n->kids[k], live);
    }
  }
};

std::string show(const Results &r, const FunDef &def) {
  std::string out = "(";
  std::size_t ni = 0;
  for (std::size_t k = 0; k < def.results.size(); ++k) {
    if (k)
      out += ' ';
    if (def.results[k] == Kind::State)
      out += "<st>";
    else
      out += ni < r.n.size() ? to_string(r.n[ni++]) : "?";
  }
  return out + ")";
}

std::string show(const Frame &f, const CDef &d) {
  std::string out = "(";
  for (std::size_t k = 0; k < d.params.size(); ++k) {
    if (k)
      out += ' ';
    const Slot &s = d.params[k];
    out += s.state ? "<st>" : to_string(f.n[s.index]);
  }
  return out + ")";
}

} // namespace

// ----- public helpers ----------------------------------------------------------

Nat bits(Nat x, unsigned h, unsigned l) {
  if (h < l || l >= 128)
    return 0;
  return (x >> l) & low_mask(h - l + 1);
}

Nat apply_prim(std::string_view op, std::span<const Nat> args) {
  auto code = prim_code(op);
  const fun::PrimInfo *info = fun::find_prim(op);
  if (!code || !info)
    fault("unknown primitive '" + std::string(op) + "'");
  if (info->last_is_state || info->returns_state)
    fault(std::string(op) + " needs a machine state");
  if (args.size() != info->arity)
    fault(std::string(op) + " takes " + std::to_string(info->arity) + " operands");
  return pure(*code, args.data());
}

bool satisfies(Kind kind, Nat v) {
  switch (kind) {
  case Kind::Nat:
  case Kind::State:
    return true;
  default:
    return (v >> fun::kind_width(kind)) == 0;
  }
}

std::uint64_t EvalStats::total_iterations() const {
  std::uint64_t total = 0;
  for (const auto &[name, n] : iterations)
    total += n;
  return total;
}

// ----- evaluator -------------------------------------------------------------

struct Evaluator::Impl {
  FunProgram program;
  std::map<std::string, std::uint32_t> index;
  std::vector<CDef> defs;
};

namespace {

class Machine {
public:
  Machine(const std::vector<CDef> &defs, const EvalOptions &options, EvalStats &stats)
      : defs_(defs), opt_(options), stats_(stats), iterations_(defs.size(), 0) {}

  void invoke(std::uint32_t index, Frame f, Results &out) {
    const CDef *d = &defs_[index];
    ++depth_;
    if (depth_ > stats_.max_depth)
      stats_.max_depth = depth_;
    ++stats_.calls;
    enter(*d, f);
    const Node *n = d->body;
    try {
      for (;;) {
        switch (n->op) {
        case Expr::Tag::Let:
          for (std::size_t k = 0; k < n->kids.size(); ++k)
            bind(n->binds[k], n->kids[k], f);
          n = n->body;
          continue;
        case Expr::Tag::If:
          n = nat(n->kids[0], f) != 0 ? n->kids[1] : n->kids[2];
          continue;
        case Expr::Tag::MetList: {
          Results r;
          call(n->kids[0], f, r);
          std::size_t ni = 0, si = 0;
          for (const Slot &s : n->binds) {
            if (s.state)
              f.s[s.index] = std::move(r.s[si++]);
            else
              f.n[s.index] = r.n[ni++];
          }
          n = n->body;
          continue;
        }
        case Expr::Tag::MvList:
          for (const Node *k : n->kids) {
            if (k->state)
              out.s.push_back(state(k, f));
            else
              out.n.push_back(nat(k, f));
          }
          break;
        case Expr::Tag::Call: {
          const CDef *c = &defs_[n->callee];
          Frame g = arguments(*c, n, f);
          if (c == d && d->def->general)
            iterate(n->callee);
          ++stats_.calls;
          if (opt_.trace)
            line("tail " + d->def->name + " -> " + c->def->name);
          d = c;
          f = std::move(g);
          enter(*d, f);
          n = d->body;
          continue;
        }
        default:
          if (n->state)
            out.s.push_back(state(n, f));
          else
            out.n.push_back(nat(n, f));
          break;
        }
        break;
      }
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::Runtime || annotated_)
        throw;
      annotated_ = true;
      throw Error(ErrorKind::Runtime, "in " + d->def->name + ": " + e.message());
    }
    if (opt_.check)
      check_results(*d, out);
    if (opt_.trace)
      line("exit " + d->def->name + " " + show(out, *d->def));
    --depth_;
  }

  Frame initial(const CDef &d, const std::vector<Nat> &args, const MachineState &st) const {
    Frame f;
    f.n.resize(d.nat_slots);
    f.s.resize(d.state_slots);
    std::size_t ai = 0;
    for (const Slot &s : d.params) {
      if (s.state)
        f.s[s.index] = st;
      else
        f.n[s.index] = args[ai++];
    }
    return f;
  }

private:
  const std::vector<CDef> &defs_;
  const EvalOptions &opt_;
  EvalStats &stats_;
  std::vector<std::uint64_t> iterations_;
  std::uint64_t total_ = 0;
  std::size_t depth_ = 0;
  bool annotated_ = false;

  void line(const std::string &text) {
    *opt_.trace << std::string(2 * (depth_ ? depth_ - 1 : 0), ' ') << text << '\n';
  }

  void enter(const CDef &d, const Frame &f) {
    if (opt_.trace)
      line("enter " + d.def->name + " " + show(f, d));
    if (!opt_.check)
      return;
    for (std::size_t k = 0; k < d.params.size(); ++k) {
      const Slot &s = d.params[k];
      if (!s.state && !satisfies(d.def->params[k].kind, f.n[s.index]))
        fault(d.def->name + ": argument " + d.def->params[k].name + " = " +
              to_string(f.n[s.index]) + " does not satisfy " +
              fun::predicate_name(d.def->params[k].kind));
    }
  }

  void check_results(const CDef &d, const Results &out) const {
    std::size_t ni = 0, si = 0;
    for (std::size_t k = 0; k < d.def->results.size(); ++k) {
      Kind kind = d.def->results[k];
      if (kind == Kind::State) {
        if (si++ >= out.s.size())
          fault(d.def->name + ": missing state result");
        continue;
      }
      if (ni >= out.n.size())
        fault(d.def->name + ": missing result " + std::to_string(k + 1));
      Nat v = out.n[ni++];
      if (!satisfies(kind, v))
        fault(d.def->name + ": result " + std::to_string(k + 1) + " = " + to_string(v) +
              " does not satisfy " + fun::predicate_name(kind));
    }
  }

  void iterate(std::uint32_t index) {
    if (opt_.budget && total_ >= *opt_.budget) {
      std::string msg = "budget of " + std::to_string(*opt_.budget) +
                        " while iterations exhausted in " + defs_[index].def->name +
                        "; possible non-termination. iterations:";
      for (std::size_t k = 0; k < defs_.size(); ++k)
        if (iterations_[k])
          msg += " " + defs_[k].def->name + "=" + std::to_string(iterations_[k]);
      publish();
      throw Error(ErrorKind::Budget, msg);
    }
    ++iterations_[index];
    ++total_;
  }

public:
  void publish() {
    for (std::size_t k = 0; k < defs_.size(); ++k)
      if (iterations_[k])
        stats_.iterations[defs_[k].def->name] = iterations_[k];
  }

private:
  Frame arguments(const CDef &c, const Node *call, Frame &f) {
    Frame g;
    g.n.resize(c.nat_slots);
    g.s.resize(c.state_slots);
    for (std::size_t k = 0; k < call->kids.size(); ++k) {
      const Slot &s = c.params[k];
      if (s.state)
        g.s[s.index] = state(call->kids[k], f);
      else
        g.n[s.index] = nat(call->kids[k], f);
    }
    return g;
  }

  void call(const Node *n, Frame &f, Results &out) {
    const CDef &c = defs_[n->callee];
    invoke(n->callee, arguments(c, n, f), out);
  }

  void bind(const Slot &s, const Node *v, Frame &f) {
    if (s.state)
      f.s[s.index] = state(v, f);
    else
      f.n[s.index] = nat(v, f);
  }

  // state operand that is only read
  const MachineState &peek(const Node *n, Frame &f, MachineState &tmp) {
    if (n->op == Expr::Tag::Var)
      return f.s[n->slot.index];
    tmp = state(n, f);
    return tmp;
  }

  Nat nat(const Node *n, Frame &f) {
    switch (n->op) {
    case Expr::Tag::Const:
      return n->value;
    case Expr::Tag::Var:
      return f.n[n->slot.index];
    case Expr::Tag::Prim: {
      MachineState tmp;
      switch (n->prim) {
      case P::Load: {
        unsigned bytes = byte_count(nat(n->kids[0], f), P::Load);
        Nat addr = nat(n->kids[1], f);
        return loadbytes(bytes, addr, peek(n->kids[2], f, tmp));
      }
      case P::Stack:
        return peek(n->kids[0], f, tmp).stack;
      case P::Retval:
        return retval(peek(n->kids[0], f, tmp));
      default: {
        Nat a[4];
        for (std::size_t k = 0; k < n->kids.size(); ++k)
          a[k] = nat(n->kids[k], f);
        return pure(n->prim, a);
      }
      }
    }
    default: {
      Results r;
      value(n, f, r);
      return r.n.at(0);
    }
    }
  }

  MachineState state(const Node *n, Frame &f) {
    switch (n->op) {
    case Expr::Tag::Var:
      if (n->move)
        return std::move(f.s[n->slot.index]);
      return f.s[n->slot.index];
    case Expr::Tag::Prim:
      switch (n->prim) {
      case P::Store: {
        unsigned bytes = byte_count(nat(n->kids[0], f), P::Store);
        Nat addr = nat(n->kids[1], f);
        Nat v = nat(n->kids[2], f);
        if (bytes < 16 && (v >> (8 * bytes)))
          fault("storebytes: value " + to_string(v) + " does not fit in " +
                std::to_string(bytes) + " bytes");
        return storebytes(bytes, addr, v, state(n->kids[3], f));
      }
      case P::Alloca: {
        Nat k = nat(n->kids[0], f);
        MachineState st = state(n->kids[1], f);
        alloca_bytes(k, st);
        return st;
      }
      case P::UpdateRetval: {
        Nat v = nat(n->kids[0], f);
        return update_retval(v, state(n->kids[1], f));
      }
      case P::Init:
        return init_stack_frame(state(n->kids[0], f));
      case P::Begin:
        return begin_stack_frame(state(n->kids[0], f));
      case P::End:
        return end_stack_frame(state(n->kids[0], f));
      default:
        fault(std::string(prim_name(n->prim)) + " does not produce a state");
      }
    default: {
      Results r;
      value(n, f, r);
      return std::move(r.s.at(0));
    }
    }
  }

  // compound expression in value position
  void value(const Node *n, Frame &f, Results &out) {
    switch (n->op) {
    case Expr::Tag::Call:
      call(n, f, out);
      return;
    case Expr::Tag::Let:
      for (std::size_t k = 0; k < n->kids.size(); ++k)
        bind(n->binds[k], n->kids[k], f);
      value(n->body, f, out);
      return;
    case Expr::Tag::If:
      value(nat(n->kids[0], f) != 0 ? n->kids[1] : n->kids[2], f, out);
      return;
    case Expr::Tag::MetList: {
      Results r;
      call(n->kids[0], f, r);
      std::size_t ni = 0, si = 0;
      for (const Slot &s : n->binds) {
        if (s.state)
          f.s[s.index] = std::move(r.s[si++]);
        else
          f.n[s.index] = r.n[ni++];
      }
      value(n->body, f, out);
      return;
    }
    case Expr::Tag::MvList:
      for (const Node *k : n->kids) {
        if (k->state)
          out.s.push_back(state(k, f));
        else
          out.n.push_back(nat(k, f));
      }
      return;
    default:
      if (n->state)
        out.s.push_back(state(n, f));
      else
        out.n.push_back(nat(n, f));
    }
  }
};

} // namespace

Evaluator::Evaluator(const FunProgram &program) : impl_(std::make_unique<Impl>()) {
  for (auto check : {fun::check_well_formed, fun::check_closed_terms}) {
    auto problems = check(program);
    if (!problems.empty())
      throw Error(ErrorKind::Analysis, problems.front());
  }
  impl_->program = program;
  const FunProgram &p = impl_->program;
  for (std::size_t k = 0; k < p.defs.size(); ++k)
    impl_->index[p.defs[k].name] = static_cast<std::uint32_t>(k);
  impl_->defs.resize(p.defs.size());
  Compiler compiler(p, impl_->index);
  for (std::size_t k = 0; k < p.defs.size(); ++k)
    compiler.compile(p.defs[k], impl_->defs[k]);
}

Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator &&) noexcept = default;
Evaluator &Evaluator::operator=(Evaluator &&) noexcept = default;

const FunProgram &Evaluator::program() const { return impl_->program; }

EvalResult Evaluator::run(const std::string &name, const std::vector<Nat> &args, MachineState st,
                          const EvalOptions &options) const {
  auto it = impl_->index.find(name);
  if (it == impl_->index.end())
    throw Error(ErrorKind::Runtime, "no definition named '" + name + "'");
  const CDef &d = impl_->defs[it->second];
  std::size_t want = 0;
  for (const Slot &s : d.params)
    want += s.state ? 0 : 1;
  if (args.size() != want)
    throw Error(ErrorKind::Runtime, name + " takes " + std::to_string(want) + " arguments, given " +
                                        std::to_string(args.size()));
  EvalResult result;
  Machine machine(impl_->defs, options, result.stats);
  Results out;
  machine.invoke(it->second, machine.initial(d, args, st), out);
  machine.publish();
  result.values = std::move(out.n);
  result.state = out.s.empty() ? std::move(st) : std::move(out.s.back());
  return result;
}

EvalResult eval_def(const FunProgram &program, const std::string &name,
                    const std::vector<Nat> &args, MachineState st, const EvalOptions &options) {
  return Evaluator(program).run(name, args, std::move(st), options);
}

EvalResult run_with_budget(const FunProgram &program, const std::string &name,
                           const std::vector<Nat> &args, MachineState st,
                           std::optional<std::uint64_t> budget) {
  EvalOptions options;
  options.budget = budget;
  return eval_def(program, name, args, std::move(st), options);
}

} // namespace llfun::eval
