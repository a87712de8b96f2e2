#pragma once

#include <string>
#include <string_view>

namespace llfun {

/// Register name as a functional-IR variable: '.' becomes "_dot_", any other
/// character outside [A-Za-z0-9_] becomes '_', a leading digit gets a '_'
/// prefix, and the reserved names `st` and `done` get an "r_" prefix.
std::string mangle_register(std::string_view name);

/// Global name (function) as a definition-name stem.
std::string mangle_global(std::string_view name);

/// `<fn>_<label>`; a leading '.' of the label is dropped, numeric labels
/// become `bb<N>`.
std::string block_def_name(std::string_view fn, std::string_view label);

} // namespace llfun
