#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mlgb/numerics.hpp"

namespace mlgb {

using NamedMatrix = std::pair<std::string, DenseMatrix>;

/// Binary tensor file, little-endian:
///
///   8 bytes   magic "MLGBPAR1"
///   u32       tensor count
///   per tensor:
///     u32     name length, then the name bytes (no terminator)
///     u64     rows
///     u64     cols
///     f64     rows * cols values, row-major
///
/// Throws DataError on I/O failure, FormatError on a malformed file.
void write_tensors(const std::filesystem::path& file, const std::vector<NamedMatrix>& tensors);
std::vector<NamedMatrix> read_tensors(const std::filesystem::path& file);

void save_params(const ParamSet& params, const std::filesystem::path& file);

/// Overwrites values in `params` from a file written by save_params; names and
/// shapes must match exactly.
void load_params(ParamSet& params, const std::filesystem::path& file);

}  // namespace mlgb
