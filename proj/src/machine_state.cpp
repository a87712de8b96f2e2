#include "llfun/machine_state.hpp"

#include "llfun/error.hpp"

#include <fstream>
#include <sstream>

namespace llfun {

namespace {

const std::map<Addr, std::uint8_t> empty_bytes;

void check_range(unsigned n, Nat addr, const char *what) {
  if (n < 1 || n > max_access_bytes)
    throw Error(ErrorKind::Runtime,
                std::string(what) + " of " + std::to_string(n) + " bytes is not supported");
  if (addr + n - 1 >= pow2(32))
    throw Error(ErrorKind::Runtime, std::string(what) + " of " + std::to_string(n) +
                                        " bytes at " + to_hex(addr) +
                                        " runs past the 32-bit address space");
}

} // namespace

std::uint8_t ByteMemory::byte(Addr addr) const {
  if (!bytes_)
    return 0;
  auto it = bytes_->find(addr);
  return it == bytes_->end() ? 0 : it->second;
}

Nat ByteMemory::read(unsigned n, Nat addr) const {
  check_range(n, addr, "read");
  if (!bytes_ || bytes_->empty())
    return 0;
  Addr base = static_cast<Addr>(addr);
  Nat value = 0;
  auto it = bytes_->lower_bound(base);
  Addr last = base + (n - 1);
  for (; it != bytes_->end() && it->first <= last; ++it)
    value |= Nat{it->second} << (8 * (it->first - base));
  return value;
}

std::map<Addr, std::uint8_t> &ByteMemory::mutable_bytes() {
  if (!bytes_)
    bytes_ = std::make_shared<std::map<Addr, std::uint8_t>>();
  else if (bytes_.use_count() > 1)
    bytes_ = std::make_shared<std::map<Addr, std::uint8_t>>(*bytes_);
  return *bytes_;
}

void ByteMemory::write(unsigned n, Nat addr, Nat value) {
  check_range(n, addr, "write");
  Addr base = static_cast<Addr>(addr);
  auto &map = mutable_bytes();
  for (unsigned k = 0; k < n; ++k) {
    auto b = static_cast<std::uint8_t>(value >> (8 * k));
    Addr a = base + k;
    if (b == 0)
      map.erase(a);
    else
      map[a] = b;
  }
}

const std::map<Addr, std::uint8_t> &ByteMemory::bytes() const {
  return bytes_ ? *bytes_ : empty_bytes;
}

bool operator==(const ByteMemory &a, const ByteMemory &b) {
  if (a.bytes_ == b.bytes_)
    return true;
  return a.bytes() == b.bytes();
}

Nat rd_n(unsigned n, Nat addr, const ByteMemory &mem) { return mem.read(n, addr); }

ByteMemory wr_n(unsigned n, Nat addr, Nat value, ByteMemory mem) {
  mem.write(n, addr, value);
  return mem;
}

std::size_t MachineState::frame_depth() const {
  std::size_t depth = 0;
  for (const FrameLink *l = links.get(); l; l = l->next.get())
    ++depth;
  return depth;
}

bool operator==(const MachineState &a, const MachineState &b) {
  if (a.retval != b.retval || a.stack != b.stack || a.frame != b.frame || !(a.mem == b.mem))
    return false;
  const FrameLink *x = a.links.get();
  const FrameLink *y = b.links.get();
  while (x && y && x != y) {
    if (x->frame != y->frame)
      return false;
    x = x->next.get();
    y = y->next.get();
  }
  return x == y;
}

MachineState init_stack_frame(MachineState st) { return st; }

MachineState begin_stack_frame(MachineState st) {
  st.links = std::make_shared<const FrameLink>(FrameLink{st.frame, std::move(st.links)});
  st.frame = st.stack;
  return st;
}

MachineState end_stack_frame(MachineState st) {
  if (!st.links)
    throw Error(ErrorKind::Runtime, "end-stack-frame without a matching begin-stack-frame");
  st.stack = st.frame;
  st.frame = st.links->frame;
  st.links = st.links->next;
  return st;
}

Addr alloca_bytes(Nat k, MachineState &st) {
  Nat size = (k + 7) / 8 * 8;
  Addr at = st.stack;
  if (Nat{at} + size >= pow2(32))
    throw Error(ErrorKind::Runtime, "alloca of " + to_string(k) + " bytes at " + to_hex(at) +
                                        " exhausts the 32-bit address space");
  st.stack = static_cast<Addr>(at + size);
  return at;
}

MachineState update_retval(Nat v, MachineState st) {
  st.retval = v;
  return st;
}

Nat loadbytes(unsigned n, Nat addr, const MachineState &st) { return st.mem.read(n, addr); }

MachineState storebytes(unsigned n, Nat addr, Nat value, MachineState st) {
  st.mem.write(n, addr, value);
  return st;
}

MachineState apply_memory_image(std::string_view text, MachineState st) {
  std::istringstream in{std::string(text)};
  std::string line;
  unsigned lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // '#' starts a comment unless it is a `#x` hex prefix
    for (std::size_t k = line.find('#'); k != std::string::npos; k = line.find('#', k + 1))
      if (k + 1 >= line.size() || line[k + 1] != 'x') {
        line.erase(k);
        break;
      }
    std::istringstream words(line);
    std::string op, n_text, addr_text, value_text, extra;
    if (!(words >> op))
      continue;
    SourcePos pos{lineno, 1};
    if (op != "w" || !(words >> n_text >> addr_text >> value_text) || (words >> extra))
      throw Error(ErrorKind::Parse, "memory image: expected `w <n> <addr> <value>`", pos);
    auto n = parse_nat(n_text);
    std::string hex = addr_text;
    if (!(hex.starts_with("0x") || hex.starts_with("0X") || hex.starts_with("#x")))
      hex = "0x" + hex;
    auto addr = parse_nat(hex);
    auto value = parse_nat(value_text);
    if (!n || *n < 1 || *n > max_access_bytes)
      throw Error(ErrorKind::Parse, "memory image: byte count must be 1..16", pos);
    if (!addr || *addr >= pow2(32))
      throw Error(ErrorKind::Parse, "memory image: bad address '" + addr_text + "'", pos);
    if (!value)
      throw Error(ErrorKind::Parse, "memory image: bad value '" + value_text + "'", pos);
    unsigned bytes = static_cast<unsigned>(*n);
    Nat reduced = bytes >= 16 ? *value : *value & low_mask(8 * bytes);
    st.mem.write(bytes, *addr, reduced);
  }
  return st;
}

MachineState load_memory_image(const std::string &path, MachineState st) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::Io, "cannot read memory image '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return apply_memory_image(buf.str(), std::move(st));
}

std::string describe(const MachineState &st) {
  std::ostringstream out;
  out << "retval " << to_string(st.retval) << " stack " << to_hex(st.stack) << " frame "
      << to_hex(st.frame) << " bytes " << st.mem.stored_bytes();
  return out.str();
}

} // namespace llfun
