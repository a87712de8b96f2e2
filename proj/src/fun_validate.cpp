#include "llfun/fun_ir.hpp"

#include <map>
#include <set>

namespace llfun::fun {

namespace {

using Problems = std::vector<std::string>;

class ArityChecker {
public:
  ArityChecker(const FunProgram &program, const FunDef &def, Problems &out)
      : program_(program), def_(def), out_(out) {}

  void run() {
    std::size_t n = count(*def_.body, true);
    if (n != 0 && n != def_.results.size())
      report("body yields " + std::to_string(n) + " values, signature declares " +
             std::to_string(def_.results.size()));
  }

private:
  const FunProgram &program_;
  const FunDef &def_;
  Problems &out_;

  void report(const std::string &msg) { out_.push_back(def_.name + ": " + msg); }

  void single(const Expr &e) {
    std::size_t n = count(e, false);
    if (n != 0 && n != 1)
      report("multi-valued expression used as a single value");
  }

  // number of values produced; 0 when unknown (error already reported)
  std::size_t count(const Expr &e, bool tail) {
    switch (e.tag) {
    case Expr::Tag::Const:
    case Expr::Tag::Var:
      return 1;
    case Expr::Tag::Prim: {
      const PrimInfo *info = find_prim(e.name);
      if (!info) {
        report("unknown primitive '" + e.name + "'");
        return 0;
      }
      if (e.args.size() != info->arity) {
        report("'" + e.name + "' takes " + std::to_string(info->arity) + " operands");
        return 1;
      }
      for (unsigned k = 0; k < info->immediates; ++k)
        if (e.args[k]->tag != Expr::Tag::Const)
          report("operand " + std::to_string(k + 1) + " of '" + e.name + "' must be a literal");
      for (const auto &a : e.args)
        single(*a);
      return 1;
    }
    case Expr::Tag::Call: {
      const FunDef *callee = program_.find(e.name);
      for (const auto &a : e.args)
        single(*a);
      if (!callee) {
        report("call to undefined '" + e.name + "'");
        return 0;
      }
      if (callee->params.size() != e.args.size())
        report("'" + e.name + "' takes " + std::to_string(callee->params.size()) +
               " arguments, given " + std::to_string(e.args.size()));
      return callee->results.size();
    }
    case Expr::Tag::Let:
      for (const auto &b : e.bindings)
        single(*b.second);
      return count(*e.body, tail);
    case Expr::Tag::If: {
      single(*e.args[0]);
      std::size_t a = count(*e.args[1], tail);
      std::size_t b = count(*e.args[2], tail);
      if (a && b && a != b)
        report("branches of an if yield different numbers of values");
      return a ? a : b;
    }
    case Expr::Tag::MvList:
      if (!tail)
        report("mvlist outside result position");
      for (const auto &a : e.args)
        single(*a);
      return e.args.size();
    case Expr::Tag::MetList: {
      const Expr &c = *e.args[0];
      if (c.tag != Expr::Tag::Call) {
        report("metlist binds something other than a call");
      } else {
        std::size_t n = count(c, false);
        if (n && n != e.names.size())
          report("metlist binds " + std::to_string(e.names.size()) + " names to '" + c.name +
                 "' which yields " + std::to_string(n));
      }
      return count(*e.body, tail);
    }
    }
    return 0;
  }
};

void free_vars(const Expr &e, std::vector<std::string> &scope, std::set<std::string> &out) {
  auto bound = [&](const std::string &n) {
    for (const auto &s : scope)
      if (s == n)
        return true;
    return false;
  };
  switch (e.tag) {
  case Expr::Tag::Const:
    return;
  case Expr::Tag::Var:
    if (!bound(e.name))
      out.insert(e.name);
    return;
  case Expr::Tag::Let: {
    std::size_t mark = scope.size();
    for (const auto &[name, value] : e.bindings) {
      free_vars(*value, scope, out);
      scope.push_back(name);
    }
    free_vars(*e.body, scope, out);
    scope.resize(mark);
    return;
  }
  case Expr::Tag::MetList: {
    free_vars(*e.args[0], scope, out);
    std::size_t mark = scope.size();
    scope.insert(scope.end(), e.names.begin(), e.names.end());
    free_vars(*e.body, scope, out);
    scope.resize(mark);
    return;
  }
  default:
    for (const auto &a : e.args)
      free_vars(*a, scope, out);
  }
}

void collect_calls(const Expr &e, std::vector<std::string> &out) {
  if (e.tag == Expr::Tag::Call)
    out.push_back(e.name);
  for (const auto &a : e.args)
    collect_calls(*a, out);
  for (const auto &b : e.bindings)
    collect_calls(*b.second, out);
  if (e.body)
    collect_calls(*e.body, out);
}

bool is_var(const Expr &e, const std::string &name) {
  return e.tag == Expr::Tag::Var && e.name == name;
}

bool args_are(const Expr &e, const std::vector<std::string> &names, std::size_t from = 0) {
  if (e.args.size() != names.size() - from)
    return false;
  for (std::size_t k = from; k < names.size(); ++k)
    if (!is_var(*e.args[k - from], names[k]))
      return false;
  return true;
}

// (if (= done 1) (mvlist rest...) (metlist (frame) (step frame) (while frame)))
bool while_shape(const FunDef &w, const Clique &c) {
  std::vector<std::string> names;
  for (const auto &p : w.params)
    names.push_back(p.name);
  const Expr &b = *w.body;
  if (b.tag != Expr::Tag::If)
    return false;
  const Expr &test = *b.args[0];
  if (test.tag != Expr::Tag::Prim || test.name != "=" || test.args.size() != 2 ||
      !is_var(*test.args[0], "done") || test.args[1]->tag != Expr::Tag::Const ||
      test.args[1]->value != 1)
    return false;
  const Expr &done = *b.args[1];
  if (done.tag != Expr::Tag::MvList || !args_are(done, names, 1))
    return false;
  const Expr &more = *b.args[2];
  if (more.tag != Expr::Tag::MetList || more.names != names)
    return false;
  const Expr &step = *more.args[0];
  const Expr &again = *more.body;
  return step.tag == Expr::Tag::Call && step.name == c.step && args_are(step, names) &&
         again.tag == Expr::Tag::Call && again.name == c.while_def && args_are(again, names);
}

bool calls(const Expr &e, const std::string &callee) {
  std::vector<std::string> cs;
  collect_calls(e, cs);
  for (const auto &c : cs)
    if (c == callee)
      return true;
  return false;
}

} // namespace

std::vector<std::string> free_variables(const FunDef &def) {
  std::vector<std::string> scope;
  for (const auto &p : def.params)
    scope.push_back(p.name);
  std::set<std::string> out;
  free_vars(*def.body, scope, out);
  return {out.begin(), out.end()};
}

std::vector<std::string> check_well_formed(const FunProgram &program) {
  Problems out;
  std::set<std::string> seen;
  for (const auto &def : program.defs) {
    if (!seen.insert(def.name).second)
      out.push_back(def.name + ": defined more than once");
    if (find_prim(def.name) || is_special_form(def.name))
      out.push_back(def.name + ": name collides with a built-in operator");
    std::set<std::string> params;
    for (const auto &p : def.params)
      if (!params.insert(p.name).second)
        out.push_back(def.name + ": duplicate parameter '" + p.name + "'");
    if (def.results.empty())
      out.push_back(def.name + ": no results");
    ArityChecker(program, def, out).run();
  }
  return out;
}

std::vector<std::string> check_closed_terms(const FunProgram &program) {
  Problems out;
  for (const auto &def : program.defs)
    for (const auto &v : free_variables(def))
      out.push_back(def.name + ": free variable '" + v + "'");
  return out;
}

std::vector<std::string> check_state_threading(const FunProgram &program) {
  Problems out;
  for (const auto &def : program.defs) {
    if (def.params.empty() || def.params.back().kind != Kind::State)
      out.push_back(def.name + ": last parameter is not the state");
    if (def.results.empty() || def.results.back() != Kind::State)
      out.push_back(def.name + ": last result is not the state");
    for (std::size_t k = 0; k + 1 < def.params.size(); ++k)
      if (def.params[k].kind == Kind::State)
        out.push_back(def.name + ": more than one state parameter");
  }
  return out;
}

std::vector<std::string> check_clique_shape(const FunProgram &program) {
  Problems out;
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < program.defs.size(); ++i)
    pos[program.defs[i].name] = i;
  std::set<std::string> whiles;
  for (const auto &c : program.cliques) {
    whiles.insert(c.while_def);
    const std::string tag = "clique " + c.while_def + ": ";
    const std::string *members[] = {&c.continue_def, &c.step, &c.while_def, &c.wrap, &c.entry};
    bool present = true;
    for (const auto *m : members)
      if (!pos.count(*m)) {
        out.push_back(tag + "missing definition '" + *m + "'");
        present = false;
      }
    if (!present)
      continue;
    for (std::size_t k = 1; k < 5; ++k)
      if (pos[*members[k]] != pos[*members[k - 1]] + 1)
        out.push_back(tag + "definitions are not contiguous in continue/step/while/wrap/entry order");
    const FunDef &step = *program.find(c.step);
    const FunDef &w = *program.find(c.while_def);
    const FunDef &wrap = *program.find(c.wrap);
    const FunDef &entry = *program.find(c.entry);
    for (const auto *m : members)
      if (program.find(*m)->general != (m == &c.while_def))
        out.push_back(tag + "'" + *m + "' has the wrong recursion mode");
    if (w.params.empty() || w.params[0].name != "done" || w.params[0].kind != Kind::Nat)
      out.push_back(tag + "first while parameter must be done:natp");
    if (step.params != w.params)
      out.push_back(tag + "step and while frames differ");
    std::vector<Kind> frame;
    for (const auto &p : w.params)
      frame.push_back(p.kind);
    if (step.results != frame)
      out.push_back(tag + "step must return the whole frame");
    if (frame.size() < 1 || w.results != std::vector<Kind>(frame.begin() + 1, frame.end()))
      out.push_back(tag + "while must return the frame without done");
    if (!while_shape(w, c))
      out.push_back(tag + "while body is not (if (= done 1) (mvlist ...) (metlist (...) (step ...) (while ...)))");
    if (calls(*step.body, c.while_def))
      out.push_back(tag + "step calls while");
    const Expr &wb = *wrap.body;
    if (wb.tag != Expr::Tag::MetList || wb.args[0]->tag != Expr::Tag::Call ||
        wb.args[0]->name != c.while_def || wb.args[0]->args.empty() ||
        wb.args[0]->args[0]->tag != Expr::Tag::Const || wb.args[0]->args[0]->value != 0)
      out.push_back(tag + "wrap must start the loop with done = 0");
    else if (!calls(*wb.body, c.continue_def))
      out.push_back(tag + "wrap does not continue after the loop");
    if (!calls(*entry.body, c.wrap))
      out.push_back(tag + "entry does not call wrap");
  }
  for (const auto &def : program.defs)
    if (def.general && !whiles.count(def.name))
      out.push_back(def.name + ": general recursion outside a loop clique");
  return out;
}

std::vector<std::string> check_definition_order(const FunProgram &program) {
  Problems out;
  std::set<std::string> earlier;
  for (const auto &def : program.defs) {
    std::vector<std::string> cs;
    collect_calls(*def.body, cs);
    for (const auto &c : cs) {
      if (c == def.name) {
        if (!def.general)
          out.push_back(def.name + ": recursive but not declared general");
        continue;
      }
      if (!earlier.count(c))
        out.push_back(def.name + ": calls '" + c + "' before its definition");
    }
    earlier.insert(def.name);
  }
  return out;
}

void validate(const FunProgram &program) {
  using Check = std::vector<std::string> (*)(const FunProgram &);
  for (Check check : {check_well_formed, check_closed_terms, check_state_threading,
                      check_clique_shape, check_definition_order}) {
    auto problems = check(program);
    if (!problems.empty())
      throw Error(ErrorKind::Analysis, problems.front());
  }
}

} // namespace llfun::fun
