#pragma once

#include "llfun/ll_ast.hpp"

#include <string>

namespace llfun::ll {

/// Renders a module as .ll text that load_module accepts and maps back to an
/// equal AST. Uses the explicit-type forms of getelementptr and load.
std::string print_module(const Module &module);
std::string print_function(const Function &function);

} // namespace llfun::ll
