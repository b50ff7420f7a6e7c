#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "specmatch/spectrum.hpp"
#include "specmatch/trainer.hpp"

namespace specmatch {

struct ClassStats {
    std::uint64_t tp = 0, fp = 0, fn = 0;
    double precision() const { return tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0; }
    double recall() const { return tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0; }
    double f1() const {
        double p = precision(), r = recall();
        return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    }
};

// Unweighted mean over classes of per-class F1; classes absent from both
// predictions and truths contribute nothing.
double macro_f1(const std::vector<int>& predictions, const std::vector<int>& truths);

std::map<int, ClassStats> per_class_stats(const std::vector<int>& predictions,
                                          const std::vector<int>& truths);

double accuracy(const std::vector<int>& predictions, const std::vector<int>& truths);

struct EvalReport {
    std::string protocol;
    std::string method;
    std::vector<double> run_f1;
    std::vector<double> run_accuracy;
    std::vector<std::uint64_t> run_seeds;
    std::map<int, ClassStats> last_run_stats;

    double mean_f1() const;
    double std_f1() const;
    double mean_accuracy() const;
    double std_accuracy() const;
};

void write_eval_csv(const std::vector<EvalReport>& reports, std::ostream& out);
void print_eval_summary(const std::vector<EvalReport>& reports, std::ostream& out);

struct OneShotResult {
    EvalReport siamese;
    EvalReport nn_l2;
    EvalReport nn_cosine;
};

// Per repeat: class-disjoint split, siamese training with early stopping on
// validation classes, one random reference per test class, classify the
// remaining test samples. The NN baselines run on the identical
// reference/test assignment.
OneShotResult run_one_shot(const Dataset& ds, const std::vector<LayerSpec>& twin_specs,
                           const TrainConfig& cfg, int n_repeats, const SplitSpec& split);

enum class MulticlassMode { Siamese, Classifier };

// Per repeat: hold out one sample per class, train on the rest, classify the
// held-out samples (siamese: against a db of the training samples;
// classifier: softmax argmax). Reports plain accuracy plus macro-F1.
EvalReport run_multiclass(const Dataset& ds, const std::vector<LayerSpec>& twin_specs,
                          const TrainConfig& cfg, int n_repeats, MulticlassMode mode);

}  // namespace specmatch
