#pragma once

#include "llfun/ll_ast.hpp"
#include "llfun/ll_lexer.hpp"

#include <span>
#include <string_view>

namespace llfun::ll {

/// Builds a module from a token stream. Every construct is either accepted in
/// full or rejected with a positioned error: ErrorKind::Parse for malformed
/// text, ErrorKind::Unsupported for valid LLVM outside the subset. Attributes,
/// metadata, alignment and calling conventions are read and dropped.
Module parse_module(std::span<const Token> tokens);

/// Replaces every use of an alias by its (transitively resolved) target and
/// empties the alias list. Rejects cycles and aliases to unknown globals.
Module resolve_aliases(Module module);

/// tokenize + parse_module + resolve_aliases.
Module load_module(std::string_view source);

} // namespace llfun::ll
