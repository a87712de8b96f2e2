#include "llfun/ll_parser.hpp"

#include "llfun/nat.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace llfun::ll {

namespace {

// Real LLVM opcodes outside the accepted subset. Anything else in opcode
// position is malformed input rather than an unsupported construct.
constexpr std::array unsupported_opcodes = {
    "udiv",        "sdiv",          "urem",           "srem",         "fadd",
    "fsub",        "fmul",          "fdiv",           "frem",         "fneg",
    "fcmp",        "switch",        "indirectbr",     "invoke",       "resume",
    "unreachable", "callbr",        "catchswitch",    "catchret",     "cleanupret",
    "extractelement", "insertelement", "shufflevector", "extractvalue", "insertvalue",
    "fence",       "cmpxchg",       "atomicrmw",      "ptrtoint",     "inttoptr",
    "bitcast",     "addrspacecast", "fptrunc",        "fpext",        "fptoui",
    "fptosi",      "uitofp",        "sitofp",         "va_arg",       "landingpad",
    "catchpad",    "cleanuppad",    "freeze",
};

bool is_unsupported_opcode(const std::string &word) {
  return std::find(unsupported_opcodes.begin(), unsupported_opcodes.end(), word) !=
         unsupported_opcodes.end();
}

std::optional<ICmpPred> parse_pred(const std::string &word) {
  static const std::pair<const char *, ICmpPred> table[] = {
      {"eq", ICmpPred::Eq},   {"ne", ICmpPred::Ne},   {"ugt", ICmpPred::Ugt},
      {"uge", ICmpPred::Uge}, {"ult", ICmpPred::Ult}, {"ule", ICmpPred::Ule},
      {"sgt", ICmpPred::Sgt}, {"sge", ICmpPred::Sge}, {"slt", ICmpPred::Slt},
      {"sle", ICmpPred::Sle},
  };
  for (const auto &[name, pred] : table)
    if (word == name)
      return pred;
  return std::nullopt;
}

std::optional<Opcode> parse_binary(const std::string &word) {
  static const std::pair<const char *, Opcode> table[] = {
      {"add", Opcode::Add}, {"sub", Opcode::Sub},   {"mul", Opcode::Mul},
      {"and", Opcode::And}, {"or", Opcode::Or},     {"xor", Opcode::Xor},
      {"shl", Opcode::Shl}, {"lshr", Opcode::LShr}, {"ashr", Opcode::AShr},
  };
  for (const auto &[name, op] : table)
    if (word == name)
      return op;
  return std::nullopt;
}

bool is_top_level_keyword(const Token &tok) {
  return tok.kind == TokenKind::Keyword &&
         (tok.text == "define" || tok.text == "declare" || tok.text == "attributes" ||
          tok.text == "target" || tok.text == "source_filename");
}

class Parser {
public:
  explicit Parser(std::span<const Token> toks) : toks_(toks) {}

  Module run() {
    Module module;
    std::set<std::string> globals;
    auto claim = [&](const std::string &name, SourcePos pos) {
      if (!globals.insert(name).second)
        fail("redefinition of global '@" + name + "'", pos);
    };
    while (!at_end()) {
      const Token &tok = peek();
      if (tok.is_keyword("define")) {
        Function fn = parse_function();
        claim(fn.name, fn.pos);
        module.functions.push_back(std::move(fn));
      } else if (tok.is_keyword("declare")) {
        SourcePos pos = tok.pos;
        Declaration decl = parse_declaration();
        claim(decl.name, pos);
        module.declarations.push_back(std::move(decl));
      } else if (tok.is_keyword("target") || tok.is_keyword("source_filename")) {
        module.target_notes.push_back(parse_note());
      } else if (tok.is_keyword("attributes")) {
        advance();
        expect(TokenKind::AttrGroup, "attribute group");
        expect_punct("=");
        skip_group();
      } else if (tok.kind == TokenKind::Metadata) {
        skip_metadata_definition();
      } else if (tok.kind == TokenKind::GlobalIdent) {
        Alias alias = parse_global_definition();
        claim(alias.name, alias.pos);
        module.aliases.push_back(std::move(alias));
      } else if (tok.kind == TokenKind::LocalIdent && peek(1).is_punct("=") &&
                 peek(2).is_keyword("type")) {
        unsupported("named struct types", tok);
      } else if (tok.is_keyword("module") || tok.is_keyword("comdat") ||
                 (tok.kind == TokenKind::Keyword && tok.text.starts_with("$"))) {
        unsupported("module-level '" + tok.text + "'", tok);
      } else {
        fail("expected a top-level entity, found " + describe(tok), tok.pos);
      }
    }
    return module;
  }

private:
  std::span<const Token> toks_;
  std::size_t i_ = 0;
  unsigned implicit_counter_ = 0;

  bool at_end() const { return i_ >= toks_.size(); }

  const Token &peek(std::size_t ahead = 0) const {
    static const Token eof{TokenKind::Punct, "<eof>", {}};
    if (i_ + ahead < toks_.size())
      return toks_[i_ + ahead];
    return eof;
  }

  SourcePos here() const {
    if (!at_end())
      return peek().pos;
    return toks_.empty() ? SourcePos{} : toks_.back().pos;
  }

  const Token &advance() {
    if (at_end())
      fail("unexpected end of input", here());
    return toks_[i_++];
  }

  static std::string describe(const Token &tok) {
    if (tok.text == "<eof>" && tok.pos.line == 0)
      return "end of input";
    return std::string(to_string(tok.kind)) + " '" + tok.text + "'";
  }

  [[noreturn]] static void fail(const std::string &msg, SourcePos pos) {
    throw Error(ErrorKind::Parse, msg, pos);
  }

  [[noreturn]] static void unsupported(const std::string &what, const Token &tok) {
    throw Error(ErrorKind::Unsupported, what, tok.pos);
  }

  const Token &expect(TokenKind kind, const char *what) {
    if (peek().kind != kind)
      fail(std::string("expected ") + what + ", found " + describe(peek()), here());
    return advance();
  }

  void expect_punct(const char *p) {
    if (!peek().is_punct(p))
      fail(std::string("expected '") + p + "', found " + describe(peek()), here());
    advance();
  }

  void expect_keyword(const char *k) {
    if (!peek().is_keyword(k))
      fail(std::string("expected '") + k + "', found " + describe(peek()), here());
    advance();
  }

  bool accept_punct(const char *p) {
    if (peek().is_punct(p)) {
      advance();
      return true;
    }
    return false;
  }

  bool accept_keyword(const char *k) {
    if (peek().is_keyword(k)) {
      advance();
      return true;
    }
    return false;
  }

  /// Skips one balanced (...), [...], {...} or <...> group starting at the
  /// current token.
  void skip_group() {
    const Token &open = advance();
    std::string close;
    if (open.is_punct("("))
      close = ")";
    else if (open.is_punct("{"))
      close = "}";
    else if (open.is_punct("["))
      close = "]";
    else if (open.is_punct("<"))
      close = ">";
    else
      fail("expected a bracketed group, found " + describe(open), open.pos);
    while (!peek().is_punct(close)) {
      if (at_end())
        fail("unbalanced '" + open.text + "'", open.pos);
      if (peek().is_punct("(") || peek().is_punct("{") || peek().is_punct("[") ||
          peek().is_punct("<"))
        skip_group();
      else
        advance();
    }
    advance();
  }

  bool at_group_open() const {
    return peek().is_punct("(") || peek().is_punct("{") || peek().is_punct("[");
  }

  std::string parse_note() {
    std::string note = advance().text;
    while (!at_end() && !is_top_level_keyword(peek()) &&
           peek().kind != TokenKind::Metadata && peek().kind != TokenKind::GlobalIdent) {
      const Token &tok = advance();
      note += ' ';
      if (tok.kind == TokenKind::String)
        note += '"' + tok.text + '"';
      else
        note += tok.text;
    }
    return note;
  }

  void skip_metadata_definition() {
    advance();
    expect_punct("=");
    // `!0 = metadata !{...}`, `!0 = distinct !DIFile(...)`, `!x = !{!0}`
    while (!at_end()) {
      if (at_group_open()) {
        skip_group();
        return;
      }
      const Token &tok = peek();
      if (tok.kind == TokenKind::Keyword || tok.kind == TokenKind::Metadata ||
          tok.kind == TokenKind::TypeToken) {
        advance();
        continue;
      }
      fail("malformed metadata definition", tok.pos);
    }
  }

  // ----- types and values -------------------------------------------------

  Type parse_type() {
    const Token &tok = peek();
    Type type;
    if (tok.kind == TokenKind::TypeToken) {
      const std::string &word = tok.text;
      if (word == "void") {
        type = Type::void_type();
      } else if (word == "ptr") {
        type = Type::opaque_ptr();
      } else if (word[0] == 'i' && word.size() > 1 &&
                 std::all_of(word.begin() + 1, word.end(), ::isdigit)) {
        unsigned width = static_cast<unsigned>(std::stoul(word.substr(1)));
        if (width != 1 && width != 8 && width != 16 && width != 32 && width != 64)
          unsupported("integer width " + word, tok);
        type = Type::int_type(width);
      } else if (word == "label") {
        fail("'label' is not a value type", tok.pos);
      } else {
        unsupported("type '" + word + "'", tok);
      }
      advance();
      if (type.is_ptr() && peek().is_keyword("addrspace"))
        unsupported("address spaces", peek());
    } else if (tok.is_punct("[")) {
      unsupported("array types", tok);
    } else if (tok.is_punct("{") || (tok.is_punct("<") && peek(1).is_punct("{"))) {
      unsupported("struct types", tok);
    } else if (tok.is_punct("<")) {
      unsupported("vector types", tok);
    } else if (tok.kind == TokenKind::LocalIdent) {
      unsupported("named types", tok);
    } else {
      fail("expected a type, found " + describe(tok), tok.pos);
    }
    while (peek().is_punct("*")) {
      if (type.is_void())
        fail("pointer to void is not a valid type", peek().pos);
      if (type.is_opaque_ptr())
        fail("'ptr' cannot be further indirected", peek().pos);
      advance();
      type = Type::ptr_to(type);
    }
    if (peek().is_punct("(") && !type.is_void())
      unsupported("function types", peek());
    return type;
  }

  Type parse_first_class_type() {
    SourcePos pos = here();
    Type type = parse_type();
    if (type.is_void())
      fail("'void' is not a value type here", pos);
    return type;
  }

  /// Integer literal reduced modulo 2^width.
  std::uint64_t literal_value(const Token &tok, const Type &type) {
    if (!type.is_int())
      fail("integer literal for non-integer type " + to_string(type), tok.pos);
    bool negative = tok.text[0] == '-';
    auto magnitude = parse_nat(negative ? std::string_view(tok.text).substr(1)
                                        : std::string_view(tok.text));
    unsigned width = type.width;
    if (!magnitude)
      fail("integer literal out of range", tok.pos);
    Nat limit = pow2(width);
    if (!negative) {
      if (*magnitude >= limit)
        fail("integer literal does not fit in " + to_string(type), tok.pos);
      return static_cast<std::uint64_t>(*magnitude);
    }
    // Accept the signed range down to -2^(w-1); i1 also accepts -1.
    Nat min_magnitude = width == 1 ? 1 : pow2(width - 1);
    if (*magnitude > min_magnitude)
      fail("integer literal does not fit in " + to_string(type), tok.pos);
    return static_cast<std::uint64_t>((limit - *magnitude) % limit);
  }

  Operand parse_value(const Type &type) {
    const Token &tok = peek();
    switch (tok.kind) {
    case TokenKind::LocalIdent:
      advance();
      return Operand::make_reg(tok.text);
    case TokenKind::Integer:
      advance();
      return Operand::make_const(literal_value(tok, type));
    case TokenKind::GlobalIdent:
      unsupported("global value operands", tok);
    case TokenKind::Keyword:
      if (tok.text == "true" || tok.text == "false") {
        if (!(type.is_int() && type.width == 1))
          fail("boolean literal for type " + to_string(type), tok.pos);
        advance();
        return Operand::make_const(tok.text == "true" ? 1 : 0);
      }
      if (tok.text == "null") {
        if (!type.is_ptr())
          fail("'null' for non-pointer type " + to_string(type), tok.pos);
        advance();
        return Operand::make_const(0);
      }
      if (tok.text == "undef" || tok.text == "poison" || tok.text == "zeroinitializer")
        unsupported("'" + tok.text + "' values", tok);
      if (is_unsupported_opcode(tok.text) || tok.text == "getelementptr")
        unsupported("constant expressions", tok);
      break;
    default:
      break;
    }
    fail("expected a value, found " + describe(tok), tok.pos);
  }

  std::string parse_label_ref() {
    if (!(peek().kind == TokenKind::TypeToken && peek().text == "label"))
      fail("expected 'label', found " + describe(peek()), here());
    advance();
    return expect(TokenKind::LocalIdent, "block label").text;
  }

  /// Skips parameter/return attributes such as `nocapture`, `align 8`,
  /// `dereferenceable(8)`, `noundef`.
  void skip_attributes() {
    while (peek().kind == TokenKind::Keyword) {
      if (is_value_keyword(peek().text))
        return;
      advance();
      if (peek().is_punct("("))
        skip_group();
      else if (peek().kind == TokenKind::Integer)
        advance();
    }
  }

  static bool is_value_keyword(const std::string &word) {
    return word == "true" || word == "false" || word == "null" || word == "undef" ||
           word == "poison" || word == "zeroinitializer";
  }

  /// `, !tbaa !0`, `, !dbg !12`, ...
  void skip_metadata_attachments() {
    while (peek().is_punct(",") && peek(1).kind == TokenKind::Metadata) {
      advance();
      advance();
      if (peek().kind == TokenKind::Metadata) {
        advance();
        if (peek().is_punct("{") || peek().is_punct("("))
          skip_group();
      } else if (peek().is_punct("{") || peek().is_punct("(")) {
        skip_group();
      } else {
        fail("malformed metadata attachment", here());
      }
    }
  }

  void skip_align() {
    if (peek().is_punct(",") && peek(1).is_keyword("align")) {
      advance();
      advance();
      expect(TokenKind::Integer, "alignment");
    }
  }

  // ----- top-level entities ------------------------------------------------

  Declaration parse_declaration() {
    advance(); // declare
    skip_attributes();
    Declaration decl;
    decl.return_type = parse_type();
    decl.name = expect(TokenKind::GlobalIdent, "function name").text;
    expect_punct("(");
    if (!peek().is_punct(")")) {
      do {
        if (peek().is_punct("..."))
          unsupported("variadic functions", peek());
        decl.param_types.push_back(parse_first_class_type());
        skip_attributes();
        if (peek().kind == TokenKind::LocalIdent)
          advance();
      } while (accept_punct(","));
    }
    expect_punct(")");
    skip_function_attributes(false);
    return decl;
  }

  Alias parse_global_definition() {
    const Token &name = advance();
    expect_punct("=");
    while (peek().kind == TokenKind::Keyword) {
      const std::string &word = peek().text;
      if (word == "alias") {
        advance();
        // `alias i64 (i64)* @f`, `alias ptr @f`, `alias i64 (i64), ptr @f`
        while (peek().kind != TokenKind::GlobalIdent) {
          if (at_end() || is_top_level_keyword(peek()))
            fail("alias without a target", name.pos);
          advance();
        }
        std::string target = advance().text;
        skip_metadata_attachments();
        return Alias{name.text, target, name.pos};
      }
      if (word == "global" || word == "constant")
        unsupported("global variables", peek());
      if (word == "ifunc")
        unsupported("ifuncs", peek());
      advance();
    }
    fail("expected 'alias', 'global' or 'constant' after '@" + name.text + " ='",
         here());
  }

  void skip_function_attributes(bool until_body) {
    while (!at_end()) {
      const Token &tok = peek();
      if (until_body && tok.is_punct("{"))
        return;
      if (!until_body && (is_top_level_keyword(tok) || tok.kind == TokenKind::GlobalIdent ||
                          (tok.kind == TokenKind::Metadata && peek(1).is_punct("="))))
        return;
      if (is_top_level_keyword(tok))
        fail("expected '{' to open the function body", tok.pos);
      if (tok.is_punct("(") || tok.is_punct("{"))
        skip_group();
      else
        advance();
    }
    if (until_body)
      fail("expected '{' to open the function body", here());
  }

  Function parse_function() {
    Function fn;
    fn.pos = advance().pos; // define
    implicit_counter_ = 0;
    skip_attributes();
    fn.return_type = parse_type();
    const Token &name = expect(TokenKind::GlobalIdent, "function name");
    fn.name = name.text;
    expect_punct("(");
    if (!peek().is_punct(")")) {
      do {
        if (peek().is_punct("..."))
          unsupported("variadic functions", peek());
        Param param;
        param.type = parse_first_class_type();
        skip_attributes();
        if (peek().kind == TokenKind::LocalIdent)
          param.name = advance().text;
        else
          param.name = std::to_string(implicit_counter_++);
        fn.params.push_back(std::move(param));
      } while (accept_punct(","));
    }
    expect_punct(")");
    skip_function_attributes(true);
    expect_punct("{");

    while (!peek().is_punct("}")) {
      if (at_end())
        fail("unterminated function body for '@" + fn.name + "'", fn.pos);
      BasicBlock block;
      if (peek().kind == TokenKind::Label) {
        block.label = advance().text;
      } else if (fn.blocks.empty()) {
        block.label = std::to_string(implicit_counter_++);
      } else {
        fail("expected a block label, found " + describe(peek()), here());
      }
      parse_block_body(block);
      fn.blocks.push_back(std::move(block));
    }
    advance(); // }
    if (fn.blocks.empty())
      fail("function '@" + fn.name + "' has no body", fn.pos);
    check_function(fn);
    return fn;
  }

  void parse_block_body(BasicBlock &block) {
    bool terminated = false;
    while (!(peek().is_punct("}") || peek().kind == TokenKind::Label)) {
      if (at_end())
        fail("unexpected end of input inside block '" + block.label + "'", here());
      SourcePos pos = here();
      Instruction inst = parse_instruction();
      if (terminated)
        fail("instruction after the terminator of block '" + block.label + "'", pos);
      if (inst.op == Opcode::Phi) {
        if (!block.body.empty())
          fail("phi after a non-phi instruction in block '" + block.label + "'", pos);
        block.phis.push_back(std::move(inst));
      } else if (is_terminator(inst.op)) {
        block.terminator = std::move(inst);
        terminated = true;
      } else {
        block.body.push_back(std::move(inst));
      }
    }
    if (!terminated)
      fail("block '" + block.label + "' lacks a terminator", here());
  }

  // ----- instructions -------------------------------------------------------

  Instruction parse_instruction() {
    Instruction inst;
    inst.pos = here();
    if (peek().kind == TokenKind::LocalIdent && peek(1).is_punct("=")) {
      inst.result = advance().text;
      advance();
    }
    const Token &op_tok = peek();
    if (op_tok.kind != TokenKind::Keyword)
      fail("expected an instruction, found " + describe(op_tok), op_tok.pos);
    const std::string word = op_tok.text;

    if (auto bin = parse_binary(word)) {
      advance();
      inst.op = *bin;
      parse_binary_operands(inst);
    } else if (word == "icmp") {
      advance();
      inst.op = Opcode::ICmp;
      auto pred = parse_pred(peek().text);
      if (peek().kind != TokenKind::Keyword || !pred)
        fail("expected an icmp predicate, found " + describe(peek()), here());
      advance();
      inst.pred = *pred;
      inst.type = parse_first_class_type();
      inst.operands.push_back(parse_value(inst.type));
      expect_punct(",");
      inst.operands.push_back(parse_value(inst.type));
    } else if (word == "zext" || word == "sext" || word == "trunc") {
      advance();
      inst.op = word == "zext" ? Opcode::ZExt : word == "sext" ? Opcode::SExt : Opcode::Trunc;
      parse_cast(inst);
    } else if (word == "select") {
      advance();
      parse_select(inst);
    } else if (word == "getelementptr") {
      advance();
      parse_gep(inst);
    } else if (word == "load") {
      advance();
      parse_load(inst);
    } else if (word == "store") {
      advance();
      parse_store(inst);
    } else if (word == "alloca") {
      advance();
      parse_alloca(inst);
    } else if (word == "phi") {
      advance();
      parse_phi(inst);
    } else if (word == "call" || word == "tail" || word == "musttail" || word == "notail") {
      parse_call(inst);
    } else if (word == "br") {
      advance();
      parse_br(inst);
    } else if (word == "ret") {
      advance();
      inst.op = Opcode::Ret;
      inst.type = parse_type();
      if (!inst.type.is_void())
        inst.operands.push_back(parse_value(inst.type));
    } else if (is_unsupported_opcode(word)) {
      unsupported("instruction '" + word + "'", op_tok);
    } else {
      fail("unknown instruction '" + word + "'", op_tok.pos);
    }
    skip_metadata_attachments();

    bool needs_result = !(inst.op == Opcode::Store || is_terminator(inst.op) ||
                          inst.op == Opcode::Call);
    if (needs_result && !inst.result)
      fail(std::string("'") + mnemonic(inst.op) + "' must define a register", inst.pos);
    if (!needs_result && inst.result && inst.op != Opcode::Call)
      fail(std::string("'") + mnemonic(inst.op) + "' does not produce a value", inst.pos);
    if (inst.op == Opcode::Call && inst.result && inst.type.is_void())
      fail("void call cannot define a register", inst.pos);
    return inst;
  }

  void skip_flags(std::initializer_list<const char *> flags) {
    for (bool again = true; again;) {
      again = false;
      for (const char *flag : flags)
        if (accept_keyword(flag))
          again = true;
    }
  }

  void parse_binary_operands(Instruction &inst) {
    skip_flags({"nuw", "nsw", "exact", "disjoint"});
    SourcePos pos = here();
    inst.type = parse_first_class_type();
    if (!inst.type.is_int())
      fail(std::string("'") + mnemonic(inst.op) + "' requires an integer type", pos);
    inst.operands.push_back(parse_value(inst.type));
    expect_punct(",");
    inst.operands.push_back(parse_value(inst.type));
  }

  void parse_cast(Instruction &inst) {
    skip_flags({"nneg", "nuw", "nsw"});
    SourcePos pos = here();
    inst.source_type = parse_first_class_type();
    inst.operands.push_back(parse_value(inst.source_type));
    expect_keyword("to");
    inst.type = parse_first_class_type();
    if (!inst.source_type.is_int() || !inst.type.is_int())
      fail(std::string("'") + mnemonic(inst.op) + "' requires integer types", pos);
    bool widening = inst.type.width > inst.source_type.width;
    bool narrowing = inst.type.width < inst.source_type.width;
    if ((inst.op == Opcode::Trunc && !narrowing) || (inst.op != Opcode::Trunc && !widening))
      fail(std::string("invalid widths for '") + mnemonic(inst.op) + "'", pos);
  }

  void parse_select(Instruction &inst) {
    inst.op = Opcode::Select;
    SourcePos pos = here();
    Type cond_type = parse_first_class_type();
    if (!(cond_type.is_int() && cond_type.width == 1))
      fail("select condition must be i1", pos);
    inst.operands.push_back(parse_value(cond_type));
    expect_punct(",");
    inst.type = parse_first_class_type();
    inst.operands.push_back(parse_value(inst.type));
    expect_punct(",");
    pos = here();
    Type else_type = parse_first_class_type();
    if (!value_compatible(else_type, inst.type))
      fail("select arms have different types", pos);
    inst.operands.push_back(parse_value(else_type));
  }

  void check_element(const Type &element, SourcePos pos) {
    if (element.is_void())
      fail("void element type", pos);
  }

  void parse_gep(Instruction &inst) {
    inst.op = Opcode::Gep;
    skip_flags({"inbounds", "nuw", "nusw"});
    SourcePos pos = here();
    Type first = parse_first_class_type();
    Type ptr_type;
    if (accept_punct(",")) {
      inst.element_type = first;
      pos = here();
      ptr_type = parse_first_class_type();
      if (!ptr_type.is_ptr())
        fail("getelementptr base must be a pointer", pos);
    } else {
      if (!first.is_ptr() || first.is_opaque_ptr())
        fail("getelementptr base must be a typed pointer in this form", pos);
      ptr_type = first;
      inst.element_type = *first.pointee();
    }
    check_element(inst.element_type, pos);
    inst.type = ptr_type;
    inst.operands.push_back(parse_value(ptr_type));
    expect_punct(",");
    pos = here();
    inst.index_type = parse_first_class_type();
    if (!inst.index_type.is_int())
      fail("getelementptr index must be an integer", pos);
    inst.operands.push_back(parse_value(inst.index_type));
    if (peek().is_punct(",") && peek(1).kind != TokenKind::Metadata)
      unsupported("multi-index getelementptr", peek(1));
  }

  void parse_load(Instruction &inst) {
    inst.op = Opcode::Load;
    if (peek().is_keyword("atomic"))
      unsupported("atomic loads", peek());
    accept_keyword("volatile");
    SourcePos pos = here();
    Type first = parse_first_class_type();
    Type ptr_type;
    if (accept_punct(",")) {
      inst.type = first;
      pos = here();
      ptr_type = parse_first_class_type();
      if (!ptr_type.is_ptr())
        fail("load address must be a pointer", pos);
    } else {
      if (!first.is_ptr() || first.is_opaque_ptr())
        fail("load address must be a typed pointer in this form", pos);
      ptr_type = first;
      inst.type = *first.pointee();
    }
    inst.operands.push_back(parse_value(ptr_type));
    skip_align();
  }

  void parse_store(Instruction &inst) {
    inst.op = Opcode::Store;
    if (peek().is_keyword("atomic"))
      unsupported("atomic stores", peek());
    accept_keyword("volatile");
    inst.type = parse_first_class_type();
    inst.operands.push_back(parse_value(inst.type));
    expect_punct(",");
    SourcePos pos = here();
    Type ptr_type = parse_first_class_type();
    if (!ptr_type.is_ptr())
      fail("store address must be a pointer", pos);
    inst.operands.push_back(parse_value(ptr_type));
    skip_align();
  }

  void parse_alloca(Instruction &inst) {
    inst.op = Opcode::Alloca;
    accept_keyword("inalloca");
    SourcePos pos = here();
    inst.element_type = parse_first_class_type();
    check_element(inst.element_type, pos);
    inst.type = Type::ptr_to(inst.element_type);
    if (peek().is_punct(",") && peek(1).kind == TokenKind::TypeToken)
      unsupported("array allocation", peek(1));
    skip_align();
  }

  void parse_phi(Instruction &inst) {
    inst.op = Opcode::Phi;
    inst.type = parse_first_class_type();
    do {
      expect_punct("[");
      PhiIncoming in;
      in.value = parse_value(inst.type);
      expect_punct(",");
      in.block = expect(TokenKind::LocalIdent, "incoming block").text;
      expect_punct("]");
      inst.incoming.push_back(std::move(in));
    } while (peek().is_punct(",") && peek(1).is_punct("[") && (advance(), true));
  }

  void parse_call(Instruction &inst) {
    inst.op = Opcode::Call;
    skip_flags({"tail", "musttail", "notail"});
    expect_keyword("call");
    skip_attributes(); // fast-math flags, calling convention, return attributes
    inst.type = parse_type();
    const Token &callee = peek();
    if (callee.kind == TokenKind::LocalIdent)
      unsupported("indirect calls", callee);
    if (callee.kind != TokenKind::GlobalIdent)
      fail("expected a callee, found " + describe(callee), callee.pos);
    inst.callee = advance().text;
    expect_punct("(");
    if (!peek().is_punct(")")) {
      do {
        Type arg_type = parse_first_class_type();
        skip_attributes();
        inst.arg_types.push_back(arg_type);
        inst.operands.push_back(parse_value(arg_type));
      } while (accept_punct(","));
    }
    unsigned line = here().line;
    expect_punct(")");
    // function attributes stay on the call's line
    while ((peek().kind == TokenKind::Keyword || peek().kind == TokenKind::AttrGroup) &&
           here().line == line)
      advance();
  }

  void parse_br(Instruction &inst) {
    if (peek().kind == TokenKind::TypeToken && peek().text == "label") {
      inst.op = Opcode::Br;
      inst.targets.push_back(parse_label_ref());
    } else {
      inst.op = Opcode::CondBr;
      SourcePos pos = here();
      Type cond_type = parse_first_class_type();
      if (!(cond_type.is_int() && cond_type.width == 1))
        fail("branch condition must be i1", pos);
      inst.operands.push_back(parse_value(cond_type));
      expect_punct(",");
      inst.targets.push_back(parse_label_ref());
      expect_punct(",");
      inst.targets.push_back(parse_label_ref());
    }
    if (peek().is_punct(",") && peek(1).kind != TokenKind::Metadata)
      fail("too many operands for 'br'", peek(1).pos);
  }

  // ----- per-function well-formedness ---------------------------------------

  void check_function(const Function &fn) {
    std::map<std::string, Type> types;
    for (const auto &param : fn.params)
      if (!types.emplace(param.name, param.type).second)
        fail("duplicate parameter '%" + param.name + "'", fn.pos);
    std::set<std::string> labels;
    for (const auto &block : fn.blocks) {
      if (!labels.insert(block.label).second)
        fail("duplicate block label '" + block.label + "'", block.terminator.pos);
      for_each_instruction(block, [&](const Instruction &inst) {
        if (inst.result && !types.emplace(*inst.result, inst.result_type()).second)
          fail("register '%" + *inst.result + "' is assigned more than once", inst.pos);
      });
    }
    auto check_use = [&](const Operand &operand, const Type &expected, SourcePos pos) {
      if (!operand.is_reg())
        return;
      auto it = types.find(operand.reg);
      if (it == types.end())
        fail("use of undefined register '%" + operand.reg + "'", pos);
      if (!value_compatible(it->second, expected))
        fail("register '%" + operand.reg + "' has type " + to_string(it->second) +
                 ", used as " + to_string(expected),
             pos);
    };
    const Type i1 = Type::int_type(1);
    for (const auto &block : fn.blocks) {
      for_each_instruction(block, [&](const Instruction &inst) {
        const auto &ops = inst.operands;
        switch (inst.op) {
        case Opcode::ICmp:
          check_use(ops[0], inst.type, inst.pos);
          check_use(ops[1], inst.type, inst.pos);
          break;
        case Opcode::ZExt:
        case Opcode::SExt:
        case Opcode::Trunc:
          check_use(ops[0], inst.source_type, inst.pos);
          break;
        case Opcode::Select:
          check_use(ops[0], i1, inst.pos);
          check_use(ops[1], inst.type, inst.pos);
          check_use(ops[2], inst.type, inst.pos);
          break;
        case Opcode::Gep:
          check_use(ops[0], inst.type, inst.pos);
          check_use(ops[1], inst.index_type, inst.pos);
          break;
        case Opcode::Load:
          check_use(ops[0], Type::opaque_ptr(), inst.pos);
          break;
        case Opcode::Store:
          check_use(ops[0], inst.type, inst.pos);
          check_use(ops[1], Type::opaque_ptr(), inst.pos);
          break;
        case Opcode::Phi:
          for (const auto &in : inst.incoming)
            check_use(in.value, inst.type, inst.pos);
          break;
        case Opcode::Call:
          for (std::size_t k = 0; k < ops.size(); ++k)
            check_use(ops[k], inst.arg_types[k], inst.pos);
          break;
        case Opcode::CondBr:
          check_use(ops[0], i1, inst.pos);
          break;
        case Opcode::Ret:
          if (!value_compatible(inst.type, fn.return_type))
            fail("return type " + to_string(inst.type) + " does not match function type " +
                     to_string(fn.return_type),
                 inst.pos);
          if (!ops.empty())
            check_use(ops[0], inst.type, inst.pos);
          break;
        case Opcode::Alloca:
        case Opcode::Br:
          break;
        default: // binary
          check_use(ops[0], inst.type, inst.pos);
          check_use(ops[1], inst.type, inst.pos);
          break;
        }
      });
    }
  }
};

} // namespace

Module parse_module(std::span<const Token> tokens) { return Parser(tokens).run(); }

Module resolve_aliases(Module module) {
  std::map<std::string, const Alias *> aliases;
  for (const auto &alias : module.aliases)
    aliases.emplace(alias.name, &alias);
  auto is_defined = [&](const std::string &name) {
    if (module.find_function(name))
      return true;
    return std::any_of(module.declarations.begin(), module.declarations.end(),
                       [&](const Declaration &d) { return d.name == name; });
  };

  std::map<std::string, std::string> resolved;
  for (const auto &alias : module.aliases) {
    std::vector<std::string> chain{alias.name};
    std::string current = alias.target;
    while (true) {
      if (std::find(chain.begin(), chain.end(), current) != chain.end()) {
        std::string cycle;
        for (const auto &name : chain)
          cycle += "@" + name + " -> ";
        throw Error(ErrorKind::Parse, "cyclic alias chain " + cycle + "@" + current,
                    alias.pos);
      }
      auto it = aliases.find(current);
      if (it == aliases.end())
        break;
      chain.push_back(current);
      current = it->second->target;
    }
    if (!is_defined(current))
      throw Error(ErrorKind::Parse,
                  "alias '@" + alias.name + "' refers to undefined global '@" + current + "'",
                  alias.pos);
    resolved.emplace(alias.name, current);
  }

  for (auto &fn : module.functions)
    for (auto &block : fn.blocks)
      for (auto &inst : block.body)
        if (inst.op == Opcode::Call)
          if (auto it = resolved.find(inst.callee); it != resolved.end())
            inst.callee = it->second;
  module.aliases.clear();
  return module;
}

Module load_module(std::string_view source) {
  auto tokens = tokenize(source);
  return resolve_aliases(parse_module(tokens));
}

} // namespace llfun::ll
