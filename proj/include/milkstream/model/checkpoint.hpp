#ifndef MILKSTREAM_MODEL_CHECKPOINT_HPP
#define MILKSTREAM_MODEL_CHECKPOINT_HPP

#include <string>

#include "milkstream/model/model.hpp"

namespace milkstream::model {

// Flat binary key -> array map with shape headers behind the magic line
// "MILKSTREAM-CKPT-1". Model configuration rides along as reserved
// "__meta/..." scalar entries. Doubles are stored raw, so save/load
// round-trips bit-exactly.
void save_checkpoint(const Model& model, const std::string& path);

// Throws VersionError on a magic mismatch, FormatError on structural
// damage, IoError if the file cannot be read.
Model load_checkpoint(const std::string& path);

}  // namespace milkstream::model

#endif
