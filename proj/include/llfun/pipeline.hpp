#pragma once

#include "llfun/fun_ir.hpp"

#include <string>
#include <string_view>

namespace llfun {

/// Whole file contents; Error(Io) when it cannot be read.
std::string read_text_file(const std::string &path);

/// Parse, translate and validate LLVM text.
fun::FunProgram translate_source(std::string_view ll_text);

/// .ll files are translated, anything else is read as a functional program.
/// The result is validated either way.
fun::FunProgram load_program_file(const std::string &path);

} // namespace llfun
