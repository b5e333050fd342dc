#pragma once

#include <filesystem>
#include <iosfwd>

#include "ares/model/ares_model.hpp"

namespace ares::model {

// Text checkpoint: config, named parameter arrays and optimizer moments.
// Values use shortest round-trip decimal, so save -> load is bit-exact.
// Layout is documented in docs/formats.md.
void save_checkpoint(const AresModel& model, std::ostream& out);
void save_checkpoint(const AresModel& model, const std::filesystem::path& path);
AresModel load_checkpoint(std::istream& in);
AresModel load_checkpoint(const std::filesystem::path& path);

}  // namespace ares::model
