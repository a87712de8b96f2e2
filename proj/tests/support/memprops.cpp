#include "memprops.hpp"

#include "llfun/machine_state.hpp"

#include <array>
#include <random>

namespace llfun::testing {

namespace {

constexpr unsigned window = 48;

struct Model {
  Addr base = 0;
  std::array<std::uint8_t, window + 16> bytes{};

  Nat read(unsigned n, Addr a) const {
    Nat v = 0;
    for (unsigned k = 0; k < n; ++k)
      v |= Nat{bytes[a - base + k]} << (8 * k);
    return v;
  }
  void write(unsigned n, Addr a, Nat v) {
    for (unsigned k = 0; k < n; ++k)
      bytes[a - base + k] = static_cast<std::uint8_t>(v >> (8 * k));
  }
};

class Cases {
public:
  explicit Cases(std::uint64_t seed) : rng_(seed) {}

  unsigned n() { return 1 + static_cast<unsigned>(rng_() % 8); }
  Nat value() {
    switch (rng_() % 4) {
    case 0: return 0;
    case 1: return rng_() % 256;
    default: return (Nat{rng_()} << 64) | rng_();
    }
  }
  Addr base() {
    // mostly ordinary addresses, sometimes flush against the top of memory
    if (rng_() % 8 == 0)
      return static_cast<Addr>(0xffffffffu - window - 15);
    return static_cast<Addr>(rng_() % (0xffffffffu - 2 * window));
  }
  Addr in(Addr base, unsigned n) { return base + static_cast<Addr>(rng_() % (window - n + 1)); }

  // memory with some random content in the window, plus its model
  std::pair<ByteMemory, Model> filled(Addr base) {
    ByteMemory m;
    Model model;
    model.base = base;
    unsigned writes = static_cast<unsigned>(rng_() % 12);
    for (unsigned k = 0; k < writes; ++k) {
      unsigned len = n();
      Addr a = in(base, len);
      Nat v = value();
      m.write(len, a, v);
      model.write(len, a, v);
    }
    return {m, model};
  }

  std::uint64_t raw() { return rng_(); }

private:
  std::mt19937_64 rng_;
};

Nat reduce(Nat v, unsigned n) { return v & low_mask(8 * n); }

std::string hex(Nat v) { return to_hex(v); }

void note(PropertyResult &r, const std::string &what) {
  if (r.failures++ == 0)
    r.first_failure = what;
}

bool canonical(const ByteMemory &m) {
  for (const auto &[addr, byte] : m.bytes())
    if (byte == 0)
      return false;
  return true;
}

} // namespace

std::vector<PropertyResult> run_memory_properties(std::uint64_t cases, std::uint64_t seed) {
  Cases gen(seed);
  PropertyResult row{"read-over-write"}, frame{"disjoint-frame"}, le{"little-endian"},
      sparse{"canonical-sparseness"}, oracle{"byte-array-oracle"};

  for (std::uint64_t c = 0; c < cases; ++c) {
    Addr base = gen.base();

    { // rd(n, a, wr(n, a, v, m)) = v mod 2^(8n)
      auto [m, model] = gen.filled(base);
      unsigned n = gen.n();
      Addr a = gen.in(base, n);
      Nat v = gen.value();
      ByteMemory m2 = wr_n(n, a, v, m);
      ++row.cases;
      if (rd_n(n, a, m2) != reduce(v, n))
        note(row, "n=" + std::to_string(n) + " a=" + hex(a) + " v=" + hex(v));
    }

    { // writes leave disjoint ranges alone
      auto [m, model] = gen.filled(base);
      unsigned n = gen.n(), k = gen.n();
      Addr a = gen.in(base, n), b = gen.in(base, k);
      ++frame.cases;
      if (b + k <= a || a + n <= b) {
        Nat before = rd_n(k, b, m);
        if (rd_n(k, b, wr_n(n, a, gen.value(), m)) != before)
          note(frame, "write " + hex(a) + "/" + std::to_string(n) + " read " + hex(b) + "/" +
                          std::to_string(k));
      } else {
        // overlapping pair: bytes outside [a, a+n) must keep their value
        ByteMemory m2 = wr_n(n, a, gen.value(), m);
        for (Addr x = b; x < b + k; ++x)
          if ((x < a || x >= a + n) && m2.byte(x) != m.byte(x))
            note(frame, "byte " + hex(x) + " changed by write at " + hex(a));
      }
    }

    { // rd(n, a) = rd(1, a) + 256 rd(n-1, a+1)
      auto [m, model] = gen.filled(base);
      unsigned n = 2 + static_cast<unsigned>(gen.raw() % 7);
      Addr a = gen.in(base, n);
      ++le.cases;
      if (rd_n(n, a, m) != rd_n(1, a, m) + 256 * rd_n(n - 1, a + 1, m))
        note(le, "n=" + std::to_string(n) + " a=" + hex(a));
    }

    { // no stored zeros after any sequence; zero writes on fresh memory store nothing
      auto [m, model] = gen.filled(base);
      unsigned steps = 1 + static_cast<unsigned>(gen.raw() % 10);
      for (unsigned s = 0; s < steps; ++s) {
        unsigned n = gen.n();
        Nat v = gen.raw() % 3 == 0 ? 0 : gen.value();
        m = wr_n(n, gen.in(base, n), v, m);
      }
      ++sparse.cases;
      ByteMemory fresh = wr_n(gen.n(), gen.in(base, 8), 0, ByteMemory{});
      if (!canonical(m) || !fresh.empty())
        note(sparse, "zero byte stored near " + hex(base));
    }

    { // random trace against the flat model
      auto [m, model] = gen.filled(base);
      unsigned steps = 1 + static_cast<unsigned>(gen.raw() % 16);
      bool ok = true;
      for (unsigned s = 0; s < steps && ok; ++s) {
        unsigned n = gen.n();
        Addr a = gen.in(base, n);
        if (gen.raw() % 2) {
          Nat v = gen.value();
          m.write(n, a, v);
          model.write(n, a, v);
        } else {
          ok = m.read(n, a) == model.read(n, a);
        }
      }
      for (Addr x = base; x < base + window && ok; ++x)
        ok = m.byte(x) == model.bytes[x - base];
      ++oracle.cases;
      if (!ok)
        note(oracle, "trace diverged near " + hex(base));
    }
  }
  return {row, frame, le, sparse, oracle};
}

} // namespace llfun::testing
