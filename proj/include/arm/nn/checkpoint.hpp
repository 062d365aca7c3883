#pragma once

// Binary parameter files: magic, byte-order mark, version, then named arrays
// with dtype and shape, then an FNV-1a checksum over everything before it.
// Writes go to a temporary sibling and are renamed into place.

#include <filesystem>

#include "arm/nn/params.hpp"

namespace arm::nn {

void save_checkpoint(const std::filesystem::path& path, const ParamSet& params);
ParamSet load_checkpoint(const std::filesystem::path& path);

std::string encode_params(const ParamSet& params);
ParamSet decode_params(const std::string& bytes);

}  // namespace arm::nn
