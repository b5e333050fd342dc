#pragma once

#include <filesystem>
#include <iosfwd>

#include "ares/data/episode.hpp"

namespace ares::data {

inline constexpr int kDatasetVersion = 1;

// Line-delimited JSON: one header object, then one object per episode.
// Layout is documented in docs/formats.md.
void write_dataset(const Dataset& dataset, std::ostream& out);
void serialize(const Dataset& dataset, const std::filesystem::path& path);

// Throws ParseError with the offending line number, or naming the last good
// line when the file ends early.
Dataset read_dataset(std::istream& in);
Dataset deserialize(const std::filesystem::path& path);

}  // namespace ares::data
