#include "llfun/fun_ir.hpp"

#include <cctype>
#include <map>

namespace llfun::fun {

namespace {

constexpr std::size_t line_width = 92;

struct Sexp {
  bool atom = true;
  std::string text;
  std::vector<Sexp> items;
  SourcePos pos;

  static Sexp a(std::string t) { return {true, std::move(t), {}, {}}; }
  static Sexp l(std::vector<Sexp> xs) { return {false, {}, std::move(xs), {}}; }

  bool head_is(std::string_view h) const {
    return !atom && !items.empty() && items[0].atom && items[0].text == h;
  }
};

// ----- Expr -> Sexp ----------------------------------------------------------

Sexp to_sexp(const Expr &e) {
  switch (e.tag) {
  case Expr::Tag::Const:
    return Sexp::a(to_string(e.value));
  case Expr::Tag::Var:
    return Sexp::a(e.name);
  case Expr::Tag::Prim:
  case Expr::Tag::Call: {
    std::vector<Sexp> xs{Sexp::a(e.name)};
    for (const auto &arg : e.args)
      xs.push_back(to_sexp(*arg));
    return Sexp::l(std::move(xs));
  }
  case Expr::Tag::Let: {
    std::vector<Sexp> binds;
    for (const auto &[name, value] : e.bindings)
      binds.push_back(Sexp::l({Sexp::a(name), to_sexp(*value)}));
    return Sexp::l({Sexp::a(e.bindings.size() == 1 ? "let" : "let*"), Sexp::l(std::move(binds)),
                    to_sexp(*e.body)});
  }
  case Expr::Tag::If:
    return Sexp::l(
        {Sexp::a("if"), to_sexp(*e.args[0]), to_sexp(*e.args[1]), to_sexp(*e.args[2])});
  case Expr::Tag::MvList: {
    std::vector<Sexp> xs{Sexp::a("mvlist")};
    for (const auto &arg : e.args)
      xs.push_back(to_sexp(*arg));
    return Sexp::l(std::move(xs));
  }
  case Expr::Tag::MetList: {
    std::vector<Sexp> names;
    for (const auto &n : e.names)
      names.push_back(Sexp::a(n));
    return Sexp::l({Sexp::a("metlist"), Sexp::l({Sexp::l(std::move(names)), to_sexp(*e.args[0])}),
                    to_sexp(*e.body)});
  }
  }
  return Sexp::a("?");
}

Sexp to_sexp(const FunDef &def) {
  std::vector<Sexp> params, kinds, sig;
  for (const auto &p : def.params) {
    params.push_back(Sexp::a(p.name));
    kinds.push_back(Sexp::a(predicate_name(p.kind)));
  }
  sig.push_back(Sexp::l(std::move(kinds)));
  for (Kind k : def.results)
    sig.push_back(Sexp::a(predicate_name(k)));
  Sexp declare = Sexp::l(
      {Sexp::a("declare"), Sexp::l({Sexp::a("xargs"), Sexp::a(":signature"), Sexp::l(std::move(sig))})});
  return Sexp::l({Sexp::a(def.general ? "defun-general" : "defun"), Sexp::a(def.name),
                  Sexp::l(std::move(params)), std::move(declare), to_sexp(*def.body)});
}

// ----- layout ----------------------------------------------------------------

void flat(const Sexp &s, std::string &out) {
  if (s.atom) {
    out += s.text;
    return;
  }
  out += '(';
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    if (i)
      out += ' ';
    flat(s.items[i], out);
  }
  out += ')';
}

std::string flat(const Sexp &s) {
  std::string out;
  flat(s, out);
  return out;
}

class Printer {
public:
  std::string out;

  void print(const Sexp &s, std::size_t col) {
    std::string f = flat(s);
    bool is_def = s.head_is("defun") || s.head_is("defun-general");
    if (!is_def && (s.atom || col + f.size() <= line_width)) {
      out += f;
      return;
    }
    if (is_def && s.items.size() == 5) {
      std::string head = "(" + s.items[0].text + " " + s.items[1].text + " ";
      out += head;
      print(s.items[2], col + head.size());
      newline(col + 2);
      print(s.items[3], col + 2);
      newline(col + 2);
      print(s.items[4], col + 2);
      out += ')';
      return;
    }
    if ((s.head_is("let") || s.head_is("let*")) && s.items.size() == 3 && !s.items[1].atom) {
      std::string head = "(" + s.items[0].text + " (";
      out += head;
      std::size_t inner = col + head.size();
      const auto &binds = s.items[1].items;
      for (std::size_t i = 0; i < binds.size(); ++i) {
        if (i)
          newline(inner);
        binding(binds[i], inner);
      }
      out += ')';
      newline(col + 2);
      print(s.items[2], col + 2);
      out += ')';
      return;
    }
    if (s.head_is("if") && s.items.size() == 4) {
      out += "(if ";
      print(s.items[1], col + 4);
      newline(col + 4);
      print(s.items[2], col + 4);
      newline(col + 4);
      print(s.items[3], col + 4);
      out += ')';
      return;
    }
    if (s.head_is("metlist") && s.items.size() == 3 && !s.items[1].atom &&
        s.items[1].items.size() == 2) {
      out += "(metlist (";
      std::size_t inner = col + 10;
      print(s.items[1].items[0], inner);
      newline(inner);
      print(s.items[1].items[1], inner);
      out += ')';
      newline(col + 2);
      print(s.items[2], col + 2);
      out += ')';
      return;
    }
    generic(s, col);
  }

private:
  void newline(std::size_t col) {
    out += '\n';
    out.append(col, ' ');
  }

  void binding(const Sexp &b, std::size_t col) {
    if (!b.atom && b.items.size() == 2 && b.items[0].atom) {
      std::string f = flat(b);
      if (col + f.size() <= line_width) {
        out += f;
        return;
      }
      std::string head = "(" + b.items[0].text;
      out += head;
      newline(col + 1);
      print(b.items[1], col + 1);
      out += ')';
      return;
    }
    print(b, col);
  }

  void generic(const Sexp &s, std::size_t col) {
    out += '(';
    if (s.items.empty()) {
      out += ')';
      return;
    }
    std::size_t start = 0;
    std::size_t arg_col = col + 1;
    if (s.items[0].atom && s.items.size() > 1) {
      out += s.items[0].text + " ";
      arg_col = col + s.items[0].text.size() + 2;
      start = 1;
    }
    // pack atoms onto lines, break before lists that do not fit
    std::size_t cur = arg_col;
    for (std::size_t i = start; i < s.items.size(); ++i) {
      std::string f = flat(s.items[i]);
      if (i > start) {
        if (cur + 1 + f.size() + 1 <= line_width && s.items[i].atom && s.items[i - 1].atom) {
          out += ' ';
          ++cur;
        } else {
          newline(arg_col);
          cur = arg_col;
        }
      }
      std::size_t before = out.size();
      print(s.items[i], cur);
      std::size_t nl = out.rfind('\n');
      cur = (nl != std::string::npos && nl >= before) ? out.size() - nl - 1 : cur + (out.size() - before);
    }
    out += ')';
  }
};

// ----- reader ----------------------------------------------------------------

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<Sexp> read_all() {
    std::vector<Sexp> out;
    while (true) {
      skip();
      if (i_ >= text_.size())
        break;
      out.push_back(read());
    }
    return out;
  }

private:
  std::string_view text_;
  std::size_t i_ = 0;
  unsigned line_ = 1, col_ = 1;

  [[noreturn]] void fail(const std::string &msg, SourcePos pos) const {
    throw Error(ErrorKind::Parse, msg, pos);
  }

  void bump() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (c == ';') {
        while (i_ < text_.size() && text_[i_] != '\n')
          bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  Sexp read() {
    skip();
    SourcePos pos{line_, col_};
    if (i_ >= text_.size())
      fail("unexpected end of input", pos);
    char c = text_[i_];
    if (c == ')')
      fail("unexpected ')'", pos);
    if (c == '(') {
      bump();
      Sexp s = Sexp::l({});
      s.pos = pos;
      while (true) {
        skip();
        if (i_ >= text_.size())
          fail("unterminated list", pos);
        if (text_[i_] == ')') {
          bump();
          return s;
        }
        s.items.push_back(read());
      }
    }
    std::string atom;
    while (i_ < text_.size()) {
      char d = text_[i_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d)))
        break;
      atom.push_back(d);
      bump();
    }
    Sexp s = Sexp::a(std::move(atom));
    s.pos = pos;
    return s;
  }
};

[[noreturn]] void bad(const std::string &msg, const Sexp &at) {
  throw Error(ErrorKind::Parse, msg, at.pos);
}

bool is_number(const std::string &t) {
  return !t.empty() && std::isdigit(static_cast<unsigned char>(t[0]));
}

const std::string &atom_of(const Sexp &s, const char *what) {
  if (!s.atom || is_number(s.text))
    bad(std::string("expected ") + what, s);
  return s.text;
}

ExprPtr to_expr(const Sexp &s) {
  if (s.atom) {
    if (is_number(s.text)) {
      auto v = parse_nat(s.text);
      if (!v)
        bad("bad numeral '" + s.text + "'", s);
      return cst(*v);
    }
    return var(s.text);
  }
  if (s.items.empty() || !s.items[0].atom || is_number(s.items[0].text))
    bad("expected an operator", s);
  const std::string &head = s.items[0].text;
  const auto &xs = s.items;
  if (head == "let" || head == "let*") {
    if (xs.size() != 3 || xs[1].atom)
      bad("malformed " + head, s);
    if (head == "let" && xs[1].items.size() != 1)
      bad("`let` takes exactly one binding; use `let*`", s);
    std::vector<std::pair<std::string, ExprPtr>> binds;
    for (const auto &b : xs[1].items) {
      if (b.atom || b.items.size() != 2)
        bad("malformed binding", b);
      binds.push_back({atom_of(b.items[0], "a variable"), to_expr(b.items[1])});
    }
    if (binds.empty())
      bad("empty binding list", s);
    return let(std::move(binds), to_expr(xs[2]));
  }
  if (head == "if") {
    if (xs.size() != 4)
      bad("`if` takes three operands", s);
    return ite(to_expr(xs[1]), to_expr(xs[2]), to_expr(xs[3]));
  }
  if (head == "mvlist") {
    std::vector<ExprPtr> items;
    for (std::size_t i = 1; i < xs.size(); ++i)
      items.push_back(to_expr(xs[i]));
    return mvlist(std::move(items));
  }
  if (head == "metlist") {
    if (xs.size() != 3 || xs[1].atom || xs[1].items.size() != 2 || xs[1].items[0].atom)
      bad("malformed metlist", s);
    std::vector<std::string> names;
    for (const auto &n : xs[1].items[0].items)
      names.push_back(atom_of(n, "a variable"));
    return metlist(std::move(names), to_expr(xs[1].items[1]), to_expr(xs[2]));
  }
  std::vector<ExprPtr> args;
  for (std::size_t i = 1; i < xs.size(); ++i)
    args.push_back(to_expr(xs[i]));
  if (find_prim(head))
    return prim(head, std::move(args));
  return call(head, std::move(args));
}

FunDef to_def(const Sexp &s) {
  bool general = s.head_is("defun-general");
  if (!(general || s.head_is("defun")) || s.items.size() != 5)
    bad("expected (defun name (params) (declare ...) body)", s);
  FunDef def;
  def.general = general;
  def.name = atom_of(s.items[1], "a definition name");
  const Sexp &params = s.items[2];
  if (params.atom)
    bad("expected a parameter list", params);
  const Sexp &decl = s.items[3];
  bool ok = decl.head_is("declare") && decl.items.size() == 2 && decl.items[1].head_is("xargs") &&
            decl.items[1].items.size() == 3 && decl.items[1].items[1].atom &&
            decl.items[1].items[1].text == ":signature" && !decl.items[1].items[2].atom;
  if (!ok)
    bad("expected (declare (xargs :signature ((kinds) results)))", decl);
  const Sexp &sig = decl.items[1].items[2];
  if (sig.items.empty() || sig.items[0].atom)
    bad("malformed signature", sig);
  const auto &kinds = sig.items[0].items;
  if (kinds.size() != params.items.size())
    bad("signature does not cover every parameter", sig);
  auto kind = [](const Sexp &k) {
    auto parsed = k.atom ? kind_from_predicate(k.text) : std::nullopt;
    if (!parsed)
      bad("unknown kind predicate '" + flat(k) + "'", k);
    return *parsed;
  };
  for (std::size_t i = 0; i < kinds.size(); ++i)
    def.params.push_back({atom_of(params.items[i], "a parameter"), kind(kinds[i])});
  for (std::size_t i = 1; i < sig.items.size(); ++i)
    def.results.push_back(kind(sig.items[i]));
  if (def.results.empty())
    bad("signature without results", sig);
  def.body = to_expr(s.items[4]);
  return def;
}

} // namespace

std::string emit_expr(const Expr &expr) {
  Printer p;
  p.print(to_sexp(expr), 0);
  return p.out;
}

std::string emit_def(const FunDef &def) {
  Printer p;
  p.print(to_sexp(def), 0);
  return p.out + "\n";
}

std::string emit_sexpr(const FunProgram &program) {
  std::string out;
  for (std::size_t i = 0; i < program.defs.size(); ++i) {
    if (i)
      out += '\n';
    out += emit_def(program.defs[i]);
  }
  return out;
}

FunProgram load_program(std::string_view text) {
  FunProgram program;
  std::map<std::string, std::size_t> index;
  for (const auto &s : Reader(text).read_all()) {
    FunDef def = to_def(s);
    if (!index.emplace(def.name, program.defs.size()).second)
      bad("duplicate definition '" + def.name + "'", s);
    program.defs.push_back(std::move(def));
  }
  // <p>_step_<N>_while -> clique members by name
  for (const auto &def : program.defs) {
    if (!def.general)
      continue;
    const std::string &w = def.name;
    const std::string suffix = "_while";
    Clique c;
    c.while_def = w;
    if (w.size() > suffix.size() && w.ends_with(suffix)) {
      c.step = w.substr(0, w.size() - suffix.size());
      c.wrap = w + "_wrap";
      auto at = c.step.rfind("_step_");
      if (at != std::string::npos) {
        std::string stem = c.step.substr(0, at);
        std::string n = c.step.substr(at + 6);
        c.entry = stem + "_" + n;
        c.continue_def = index.count(stem + "_continue_" + n) ? stem + "_continue_" + n
                                                               : stem + "_continue";
      }
    }
    program.cliques.push_back(std::move(c));
  }
  return program;
}

} // namespace llfun::fun
