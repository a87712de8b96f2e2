#include "llfun/naming.hpp"

#include <algorithm>
#include <cctype>

namespace llfun {

namespace {

std::string mangle_chars(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == '.')
      out += "_dot_";
    else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
      out.push_back(c);
    else
      out.push_back('_');
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])))
    out.insert(out.begin(), '_');
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

} // namespace

std::string mangle_register(std::string_view name) {
  std::string out = mangle_chars(name);
  if (out == "st" || out == "done")
    out = "r_" + out;
  return out;
}

std::string mangle_global(std::string_view name) { return mangle_chars(name); }

std::string block_def_name(std::string_view fn, std::string_view label) {
  std::string stem = mangle_global(fn);
  if (all_digits(label))
    return stem + "_bb" + std::string(label);
  if (label.starts_with("."))
    label.remove_prefix(1);
  std::string part;
  for (char c : label) {
    if (c == '.')
      part += "_dot_";
    else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
      part.push_back(c);
    else
      part.push_back('_');
  }
  return stem + "_" + part;
}

} // namespace llfun
