#pragma once

#include <string>

#include "specmatch/serialize.hpp"
#include "specmatch/siamese.hpp"

namespace specmatch {

// "SSNM" model container: layer spec list as tagged records, parameter blobs
// as f32 LE in declaration order (batch-norm running stats included), metric
// weights and bias, CRC-32 trailer over the payload.
BinWriter serialize_siamese(const SiameseModel<float>& model);
void save_siamese(const SiameseModel<float>& model, const std::string& path);
SiameseModel<float> load_siamese(const std::string& path);

void save_classifier(const ClassifierModel<float>& model, const std::string& path);
ClassifierModel<float> load_classifier(const std::string& path);

}  // namespace specmatch
