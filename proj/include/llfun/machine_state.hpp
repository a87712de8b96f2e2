#pragma once

// Machine state of translated programs: return value, stack and frame
// pointers, and a sparse little-endian byte memory where absent bytes read 0.

#include "llfun/nat.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace llfun {

using Addr = std::uint32_t;

inline constexpr unsigned max_access_bytes = 16;

/// Value-semantics byte map. Copies share storage until one of them writes.
/// Zero bytes are never stored, so equal read behaviour implies equality.
class ByteMemory {
public:
  std::uint8_t byte(Addr addr) const;

  /// Little-endian read of n bytes (1..16) at addr; faults past 2^32.
  Nat read(unsigned n, Nat addr) const;

  /// Stores value mod 2^(8n) at addr.
  void write(unsigned n, Nat addr, Nat value);

  std::size_t stored_bytes() const { return bytes_ ? bytes_->size() : 0; }
  bool empty() const { return stored_bytes() == 0; }

  /// Stored (nonzero) bytes in address order.
  const std::map<Addr, std::uint8_t> &bytes() const;

  friend bool operator==(const ByteMemory &a, const ByteMemory &b);

private:
  std::map<Addr, std::uint8_t> &mutable_bytes();

  std::shared_ptr<std::map<Addr, std::uint8_t>> bytes_;
};

Nat rd_n(unsigned n, Nat addr, const ByteMemory &mem);
ByteMemory wr_n(unsigned n, Nat addr, Nat value, ByteMemory mem);

/// Frames saved by begin_stack_frame, newest first. Immutable and shared.
struct FrameLink {
  Addr frame;
  std::shared_ptr<const FrameLink> next;
};

struct MachineState {
  Nat retval = 0;
  Addr stack = 0;
  Addr frame = 0;
  ByteMemory mem;
  std::shared_ptr<const FrameLink> links;

  static MachineState make(Addr stack, Addr frame) {
    MachineState st;
    st.stack = stack;
    st.frame = frame;
    return st;
  }

  std::size_t frame_depth() const;

  friend bool operator==(const MachineState &a, const MachineState &b);
};

inline constexpr Addr default_stack = 0xffff0000u;

MachineState init_stack_frame(MachineState st);
/// Saves frame and sets frame := stack.
MachineState begin_stack_frame(MachineState st);
/// stack := frame and restores the saved frame; faults without a matching begin.
MachineState end_stack_frame(MachineState st);
/// Returns the current stack value and advances stack by k rounded up to 8.
Addr alloca_bytes(Nat k, MachineState &st);

MachineState update_retval(Nat v, MachineState st);
inline Nat retval(const MachineState &st) { return st.retval; }

Nat loadbytes(unsigned n, Nat addr, const MachineState &st);
MachineState storebytes(unsigned n, Nat addr, Nat value, MachineState st);

/// Applies a memory image (`w <n> <addr-hex> <value>` lines, `#` comments)
/// to st, top to bottom.
MachineState apply_memory_image(std::string_view text, MachineState st);
MachineState load_memory_image(const std::string &path, MachineState st);

std::string describe(const MachineState &st);

} // namespace llfun
