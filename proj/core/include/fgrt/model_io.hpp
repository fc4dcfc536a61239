// Human-readable, versioned model persistence. The on-disk form is JSON
// with a fixed key order, so identical models serialize byte-for-byte.
#pragma once

#include <filesystem>
#include <string>

#include "fgrt/tree.hpp"

namespace fgrt {

inline constexpr int kModelFormatVersion = 1;

std::string model_to_string(const FgrtModel& model);
FgrtModel model_from_string(const std::string& text);

void save_model(const FgrtModel& model, const std::filesystem::path& path);
FgrtModel load_model(const std::filesystem::path& path);

}  // namespace fgrt
