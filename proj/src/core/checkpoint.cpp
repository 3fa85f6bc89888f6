//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace ipbind {
namespace {
static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = { 'I', 'P', 'B', 'C', 'K', 'P', 'T', '\0' };

class Writer {
public:
  explicit Writer(std::ostream &os) : os_(os) { }

  template <class T>
  void pod(const T &v) {
    os_.write(reinterpret_cast<const char *>(&v), sizeof v);
  }

  void str(const std::string &s) {
    pod<std::uint64_t>(s.size());
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  void doubles(std::span<const double> v) {
    os_.write(reinterpret_cast<const char *>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }

private:
  std::ostream &os_;
};

class Reader {
public:
  Reader(std::istream &is, std::string path)
      : is_(is), path_(std::move(path)) { }

  template <class T>
  T pod() {
    T v {};
    is_.read(reinterpret_cast<char *>(&v), sizeof v);
    check();
    return v;
  }

  std::string str() {
    const auto n = pod<std::uint64_t>();
    if (n > (1u << 26))
      fail("implausible string length");
    std::string s(n, '\0');
    is_.read(s.data(), static_cast<std::streamsize>(n));
    check();
    return s;
  }

  void doubles(std::span<double> v) {
    is_.read(reinterpret_cast<char *>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
    check();
  }

  [[noreturn]] void fail(const std::string &what) const {
    throw DataError("checkpoint '" + path_ + "': " + what);
  }

private:
  void check() const {
    if (!is_)
      fail("truncated file");
  }

  std::istream &is_;
  std::string path_;
};
} // namespace

void save_checkpoint(const TrainState &state,
                     const std::filesystem::path &path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw DataError("cannot write checkpoint '" + path.string() + "'");
  Writer w(os);
  os.write(kMagic, sizeof kMagic);
  w.pod(kCheckpointVersion);
  w.str(serialize_config(state.config));
  std::ostringstream rng;
  rng << state.rng.engine();
  w.str(rng.str());
  w.pod<std::int64_t>(state.global_step);
  w.pod<std::int32_t>(state.epoch);
  w.pod<std::uint8_t>(state.has_best ? 1 : 0);
  w.pod<double>(state.best_val_pearson);

  auto &s = const_cast<TrainState &>(state);
  const auto params = tensors_of(s.params);
  const auto m = tensors_of(s.adam_m);
  const auto v = tensors_of(s.adam_v);
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(params.size()));
  for (std::size_t k = 0; k < params.size(); ++k) {
    w.str(params[k].name);
    w.pod<std::uint64_t>(static_cast<std::uint64_t>(params[k].rows));
    w.pod<std::uint64_t>(static_cast<std::uint64_t>(params[k].cols));
    w.doubles(params[k].data);
    w.doubles(m[k].data);
    w.doubles(v[k].data);
  }
  os.flush();
  if (!os)
    throw DataError("failed writing checkpoint '" + path.string() + "'");
}

TrainState load_checkpoint(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw DataError("cannot read checkpoint '" + path.string() + "'");
  Reader r(is, path.string());

  char magic[sizeof kMagic];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    r.fail("not an ipbind checkpoint");
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion)
    r.fail("unsupported version " + std::to_string(version));

  TrainState state;
  try {
    state.config = parse_config(r.str());
  } catch (const UsageError &e) {
    r.fail(std::string("embedded config: ") + e.what());
  }
  std::istringstream rng(r.str());
  rng >> state.rng.engine();
  if (!rng)
    r.fail("corrupt rng state");
  state.global_step = r.pod<std::int64_t>();
  state.epoch = r.pod<std::int32_t>();
  state.has_best = r.pod<std::uint8_t>() != 0;
  state.best_val_pearson = r.pod<double>();

  state.params = zero_params(state.config.model);
  state.adam_m = zero_params(state.config.model);
  state.adam_v = zero_params(state.config.model);
  const auto params = tensors_of(state.params);
  const auto m = tensors_of(state.adam_m);
  const auto v = tensors_of(state.adam_v);
  const auto count = r.pod<std::uint32_t>();
  if (count != params.size())
    r.fail("tensor count does not match the embedded config");
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto name = r.str();
    const auto rows = r.pod<std::uint64_t>();
    const auto cols = r.pod<std::uint64_t>();
    if (name != params[k].name ||
        rows != static_cast<std::uint64_t>(params[k].rows) ||
        cols != static_cast<std::uint64_t>(params[k].cols))
      r.fail("tensor '" + name + "' does not match the embedded config");
    r.doubles(params[k].data);
    r.doubles(m[k].data);
    r.doubles(v[k].data);
  }
  return state;
}

} // namespace ipbind
