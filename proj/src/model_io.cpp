#include "mlgb/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "mlgb/error.hpp"

namespace mlgb {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "tensor files assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'M', 'L', 'G', 'B', 'P', 'A', 'R', '1'};

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in, const fs::path& file) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError(file.string() + ": truncated tensor file");
  return v;
}

}  // namespace

void write_tensors(const fs::path& file, const std::vector<NamedMatrix>& tensors) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, m] : tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  out.flush();
  if (!out) throw DataError("failed writing " + file.string());
}

std::vector<NamedMatrix> read_tensors(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read " + file.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw FormatError(file.string() + ": not a tensor file (bad magic)");
  const auto count = get<std::uint32_t>(in, file);
  const auto file_size = fs::file_size(file);
  std::vector<NamedMatrix> tensors;
  for (std::uint32_t t = 0; t < count; ++t) {
    const auto len = get<std::uint32_t>(in, file);
    if (len > file_size) throw FormatError(file.string() + ": corrupt tensor name length");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw FormatError(file.string() + ": truncated tensor file");
    const auto rows = get<std::uint64_t>(in, file);
    const auto cols = get<std::uint64_t>(in, file);
    if (rows != 0 && cols > file_size / sizeof(double) / rows)
      throw FormatError(file.string() + ": tensor '" + name + "' larger than the file");
    DenseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (!in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double))))
      throw FormatError(file.string() + ": truncated tensor file");
    tensors.emplace_back(std::move(name), std::move(m));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError(file.string() + ": trailing bytes");
  return tensors;
}

void save_params(const ParamSet& params, const fs::path& file) {
  std::vector<NamedMatrix> tensors;
  for (const auto& t : params) tensors.emplace_back(t.name, t.value);
  write_tensors(file, tensors);
}

void load_params(ParamSet& params, const fs::path& file) {
  const auto tensors = read_tensors(file);
  if (tensors.size() != params.size())
    throw FormatError(file.string() + ": expected " + std::to_string(params.size()) + " tensors, found " +
                      std::to_string(tensors.size()));
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    auto& p = params[i];
    const auto& [name, m] = tensors[i];
    if (name != p.name || m.rows() != p.value.rows() || m.cols() != p.value.cols())
      throw FormatError(file.string() + ": tensor " + std::to_string(i) + " ('" + name +
                        "') does not match parameter '" + p.name + "'");
    p.value = m;
  }
}

}  // namespace mlgb
