#pragma once

#include <string>

#include "specmatch/spectrum.hpp"

namespace specmatch {

// "SPCD" dataset cache: header (magic, version, grid start/end/step as f64,
// L as u32), then one record per spectrum: class_id (i32 LE), sample_id
// (length-prefixed UTF-8), L f32 LE intensities.
void write_dataset_cache(const Dataset& ds, const std::string& path);
Dataset read_dataset_cache(const std::string& path);

}  // namespace specmatch
