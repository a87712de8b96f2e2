#include "llfun/pipeline.hpp"

#include "llfun/error.hpp"
#include "llfun/ll_parser.hpp"

#include <fstream>
#include <sstream>

namespace llfun {

std::string read_text_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fun::FunProgram translate_source(std::string_view ll_text) {
  fun::FunProgram program = fun::translate_module(ll::load_module(ll_text));
  fun::validate(program);
  return program;
}

fun::FunProgram load_program_file(const std::string &path) {
  std::string text = read_text_file(path);
  if (path.size() >= 3 && path.ends_with(".ll"))
    return translate_source(text);
  fun::FunProgram program = fun::load_program(text);
  fun::validate(program);
  return program;
}

} // namespace llfun
