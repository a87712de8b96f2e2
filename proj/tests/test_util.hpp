#pragma once

#include "llfun/error.hpp"
#include "llfun/machine_state.hpp"
#include "llfun/pipeline.hpp"

#include <optional>

#include <string>

namespace llfun::testing {

inline std::string fixture(const std::string &name) {
  return std::string(LLFUN_FIXTURES) + "/" + name;
}

inline std::string fixture_text(const std::string &name) { return read_text_file(fixture(name)); }

// Kind of the error `fn` throws; nullopt when it returns normally.
template <typename Fn> std::optional<ErrorKind> error_kind(Fn &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  return std::nullopt;
}

inline MachineState words_state() {
  return load_memory_image(fixture("words.mem"), MachineState::make(default_stack, default_stack));
}

} // namespace llfun::testing
