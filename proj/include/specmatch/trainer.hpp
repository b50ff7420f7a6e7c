#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "specmatch/sampler.hpp"
#include "specmatch/siamese.hpp"
#include "specmatch/spectrum.hpp"

namespace specmatch {

struct TrainConfig {
    int epochs = 30;
    double base_lr = 1e-3;
    int lr_halving_period = 10;  // <= 0 disables the schedule
    int batch_size = 64;         // pairs (siamese) or samples (classifier)
    int patience = 5;
    std::uint64_t seed = 0;
    bool augment = false;
    AugmentPolicy aug_policy;
    bool bias_enabled = true;
    int val_pairs = 2000;  // fixed seeded balanced validation pair set

    void validate() const;
};

struct TrainReport {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::vector<double> lr;
    int best_epoch = -1;
    int epochs_run = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> trained_sample_ids;  // unique ids seen in gradient steps
};

double lr_at(int epoch, const TrainConfig& cfg);

// CSV: epoch, train_loss, val_loss, lr. No timing columns, so reports are
// reproducible byte for byte.
void write_report_csv(const TrainReport& report, std::ostream& out);

// Trains on bootstrap pair epochs from train_ds, early-stops on a fixed
// seeded pair set from val_ds, returns the best-validation snapshot.
std::pair<SiameseModel<float>, TrainReport> train_siamese(
    const Dataset& train_ds, const Dataset& val_ds,
    const std::vector<LayerSpec>& twin_specs, const TrainConfig& cfg);

struct TrainedClassifier {
    ClassifierModel<float> model;
    std::vector<int> head_classes;  // dense head index -> class_id

    int predict_class(const Spectrum& s) const {
        return head_classes[model.predict(s.intensities)];
    }
};

std::pair<TrainedClassifier, TrainReport> train_classifier(
    const Dataset& train_ds, const Dataset& val_ds,
    const std::vector<LayerSpec>& twin_specs, const TrainConfig& cfg);

}  // namespace specmatch
