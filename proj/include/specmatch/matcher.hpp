#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "specmatch/siamese.hpp"
#include "specmatch/spectrum.hpp"

namespace specmatch {

struct RefEntry {
    std::string sample_id;
    std::vector<float> features;  // embedded with the db's model snapshot
    Spectrum raw;
};

// Dynamic reference database: class_id -> embedded exemplars. Entries are
// embedded once at insert time; matching is then feature-space arithmetic
// plus one twin forward per query.
struct ReferenceDB {
    std::uint32_t snapshot_id = 0;
    std::map<int, std::vector<RefEntry>> entries;

    bool empty() const { return entries.empty(); }
    std::size_t n_classes() const { return entries.size(); }
};

struct MatchResult {
    // (class_id, score), scores non-increasing, ties broken by ascending id
    std::vector<std::pair<int, double>> ranking;
    int predicted = -1;
};

enum class BaselineMetric { L2, Cosine };

std::uint32_t model_snapshot_id(const SiameseModel<float>& model);

void db_add(ReferenceDB& db, int class_id, const Spectrum& s,
            const SiameseModel<float>& model);
void db_remove(ReferenceDB& db, int class_id);

// Nearest reference under the learned similarity; per-class score is the max
// over that class's references. k > 1 predicts by majority vote among the
// top-k references, ties broken by best score.
MatchResult match_one_shot(const ReferenceDB& db, const Spectrum& query,
                           const SiameseModel<float>& model, int k = 1);

// NN baselines on raw intensity vectors. L2 scores are negated distances so
// the ranking contract (non-increasing scores) holds for both metrics.
MatchResult match_baseline(const std::vector<const Spectrum*>& references,
                           const Spectrum& query, BaselineMetric metric);

double cosine_similarity(const std::vector<float>& a, const std::vector<float>& b);
double l2_distance(const std::vector<float>& a, const std::vector<float>& b);

// One CSV row per sample: sample_id, class_id, D feature values.
void export_features(const Dataset& ds, const SiameseModel<float>& model,
                     std::ostream& out);

void write_db(const ReferenceDB& db, const std::string& path);
ReferenceDB read_db(const std::string& path);

}  // namespace specmatch
