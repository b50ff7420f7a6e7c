#include "specmatch/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "specmatch/errors.hpp"
#include "specmatch/model_io.hpp"

namespace specmatch {

namespace {

constexpr std::uint32_t kModelVersion = 1;
constexpr std::uint32_t kDbVersion = 1;

void write_specs(BinWriter& w, const std::vector<LayerSpec>& specs) {
    w.u32(static_cast<std::uint32_t>(specs.size()));
    for (const auto& s : specs) {
        w.u32(static_cast<std::uint32_t>(s.kind));
        w.i32(s.filters);
        w.i32(s.kernel);
        w.i32(s.stride);
        w.i32(s.units);
        w.f64(s.slope);
    }
}

std::vector<LayerSpec> read_specs(BinReader& r) {
    std::uint32_t n = r.u32();
    std::vector<LayerSpec> specs(n);
    for (auto& s : specs) {
        s.kind = static_cast<LayerKind>(r.u32());
        s.filters = r.i32();
        s.kernel = r.i32();
        s.stride = r.i32();
        s.units = r.i32();
        s.slope = r.f64();
    }
    return specs;
}

enum : std::uint8_t { kTypeSiamese = 0, kTypeClassifier = 1 };

}  // namespace

BinWriter serialize_siamese(const SiameseModel<float>& model) {
    BinWriter w;
    w.u8('S'); w.u8('S'); w.u8('N'); w.u8('M');
    w.u32(kModelVersion);
    w.u8(kTypeSiamese);
    w.u8(model.bias_enabled() ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(model.in_length()));
    w.u32(0);  // head width, unused for siamese
    write_specs(w, model.twin().specs());
    for (const auto* blob : model.state_blobs()) w.f32_array(*blob);
    return w;
}

std::uint32_t model_snapshot_id(const SiameseModel<float>& model) {
    return crc32(serialize_siamese(model).buffer());
}

void save_siamese(const SiameseModel<float>& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open " + path + " for writing");
    serialize_siamese(model).write_to(out, /*with_crc_trailer=*/true);
}

SiameseModel<float> load_siamese(const std::string& path) {
    BinReader r = BinReader::from_file(path);
    r.check_crc_trailer();
    if (r.u8() != 'S' || r.u8() != 'S' || r.u8() != 'N' || r.u8() != 'M')
        throw IOError(path + ": not an SSNM model");
    if (r.u32() != kModelVersion) throw IOError(path + ": unsupported model version");
    if (r.u8() != kTypeSiamese) throw IOError(path + ": not a siamese model");
    bool bias = r.u8() != 0;
    int in_length = static_cast<int>(r.u32());
    r.u32();  // head width
    auto specs = read_specs(r);
    SiameseModel<float> model(specs, in_length, bias);
    for (auto* blob : model.state_blobs()) {
        auto loaded = r.f32_array();
        if (loaded.size() != blob->size()) throw IOError(path + ": parameter blob size");
        *blob = std::move(loaded);
    }
    return model;
}

void save_classifier(const ClassifierModel<float>& model, const std::string& path) {
    BinWriter w;
    w.u8('S'); w.u8('S'); w.u8('N'); w.u8('M');
    w.u32(kModelVersion);
    w.u8(kTypeClassifier);
    w.u8(0);
    w.u32(static_cast<std::uint32_t>(model.net().in_length()));
    w.u32(static_cast<std::uint32_t>(model.n_classes()));
    auto specs = model.net().specs();
    specs.pop_back();  // dense head re-added at load from the stored width
    write_specs(w, specs);
    for (const auto* blob : model.state_blobs()) w.f32_array(*blob);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open " + path + " for writing");
    w.write_to(out, /*with_crc_trailer=*/true);
}

ClassifierModel<float> load_classifier(const std::string& path) {
    BinReader r = BinReader::from_file(path);
    r.check_crc_trailer();
    if (r.u8() != 'S' || r.u8() != 'S' || r.u8() != 'N' || r.u8() != 'M')
        throw IOError(path + ": not an SSNM model");
    if (r.u32() != kModelVersion) throw IOError(path + ": unsupported model version");
    if (r.u8() != kTypeClassifier) throw IOError(path + ": not a classifier model");
    r.u8();
    int in_length = static_cast<int>(r.u32());
    int n_classes = static_cast<int>(r.u32());
    auto specs = read_specs(r);
    ClassifierModel<float> model(specs, in_length, n_classes);
    for (auto* blob : model.state_blobs()) {
        auto loaded = r.f32_array();
        if (loaded.size() != blob->size()) throw IOError(path + ": parameter blob size");
        *blob = std::move(loaded);
    }
    return model;
}

void db_add(ReferenceDB& db, int class_id, const Spectrum& s,
            const SiameseModel<float>& model) {
    std::uint32_t snap = model_snapshot_id(model);
    if (db.empty() && db.snapshot_id == 0) db.snapshot_id = snap;
    if (db.snapshot_id != snap) throw ModelMismatch();
    RefEntry entry;
    entry.sample_id = s.sample_id;
    entry.features = model.embed(s);
    entry.raw = s;
    db.entries[class_id].push_back(std::move(entry));
}

void db_remove(ReferenceDB& db, int class_id) {
    auto it = db.entries.find(class_id);
    if (it == db.entries.end()) throw UnknownClass(class_id);
    db.entries.erase(it);
}

MatchResult match_one_shot(const ReferenceDB& db, const Spectrum& query,
                           const SiameseModel<float>& model, int k) {
    if (db.empty()) throw EmptyDB();
    auto fq = model.embed(query);

    std::vector<std::pair<int, double>> ranking;  // per-class max score
    std::vector<std::pair<double, int>> ref_scores;  // per-reference, for k-NN vote
    for (const auto& [cid, refs] : db.entries) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& ref : refs) {
            double s = model.similarity_from_features(fq, ref.features);
            best = std::max(best, s);
            ref_scores.emplace_back(s, cid);
        }
        ranking.emplace_back(cid, best);
    }
    std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    MatchResult out;
    out.ranking = std::move(ranking);
    if (k <= 1) {
        out.predicted = out.ranking.front().first;
        return out;
    }
    std::sort(ref_scores.begin(), ref_scores.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    const int top = std::min<int>(k, static_cast<int>(ref_scores.size()));
    std::map<int, std::pair<int, double>> votes;  // class -> (count, best score)
    for (int i = 0; i < top; ++i) {
        auto& v = votes[ref_scores[i].second];
        v.first += 1;
        v.second = std::max(v.second, ref_scores[i].first);
    }
    int best_class = -1;
    int best_count = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const auto& [cid, v] : votes) {
        if (v.first > best_count ||
            (v.first == best_count && v.second > best_score)) {
            best_class = cid;
            best_count = v.first;
            best_score = v.second;
        }
    }
    out.predicted = best_class;
    return out;
}

double cosine_similarity(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size()) throw ShapeMismatch("cosine vector lengths");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw ZeroVector();
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double l2_distance(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size()) throw ShapeMismatch("l2 vector lengths");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = static_cast<double>(a[i]) - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

MatchResult match_baseline(const std::vector<const Spectrum*>& references,
                           const Spectrum& query, BaselineMetric metric) {
    if (references.empty()) throw EmptyDB();
    std::map<int, double> per_class;
    for (const auto* ref : references) {
        double score = metric == BaselineMetric::L2
                           ? -l2_distance(query.intensities, ref->intensities)
                           : cosine_similarity(query.intensities, ref->intensities);
        auto [it, inserted] = per_class.try_emplace(ref->class_id, score);
        if (!inserted) it->second = std::max(it->second, score);
    }
    MatchResult out;
    out.ranking.assign(per_class.begin(), per_class.end());
    std::sort(out.ranking.begin(), out.ranking.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    out.predicted = out.ranking.front().first;
    return out;
}

void export_features(const Dataset& ds, const SiameseModel<float>& model,
                     std::ostream& out) {
    out << std::setprecision(std::numeric_limits<float>::max_digits10);
    for (const auto& s : ds.spectra) {
        auto f = model.embed(s);
        out << s.sample_id << "," << s.class_id;
        for (float v : f) out << "," << v;
        out << "\n";
    }
}

void write_db(const ReferenceDB& db, const std::string& path) {
    BinWriter w;
    w.u8('S'); w.u8('P'); w.u8('D'); w.u8('B');
    w.u32(kDbVersion);
    w.u32(db.snapshot_id);
    std::size_t count = 0;
    GridSpec grid;
    int feature_dim = 0;
    for (const auto& [cid, refs] : db.entries)
        for (const auto& ref : refs) {
            if (count == 0) {
                grid = ref.raw.grid;
                feature_dim = static_cast<int>(ref.features.size());
            }
            ++count;
        }
    w.u32(static_cast<std::uint32_t>(feature_dim));
    w.f64(grid.start);
    w.f64(grid.end);
    w.f64(grid.step());
    w.u32(static_cast<std::uint32_t>(grid.length));
    w.u32(static_cast<std::uint32_t>(count));
    for (const auto& [cid, refs] : db.entries)
        for (const auto& ref : refs) {
            w.i32(cid);
            w.str(ref.sample_id);
            for (float v : ref.features) w.f32(v);
            for (float v : ref.raw.intensities) w.f32(v);
        }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open " + path + " for writing");
    w.write_to(out, /*with_crc_trailer=*/false);
}

ReferenceDB read_db(const std::string& path) {
    BinReader r = BinReader::from_file(path);
    if (r.u8() != 'S' || r.u8() != 'P' || r.u8() != 'D' || r.u8() != 'B')
        throw IOError(path + ": not an SPDB database");
    if (r.u32() != kDbVersion) throw IOError(path + ": unsupported db version");
    ReferenceDB db;
    db.snapshot_id = r.u32();
    int feature_dim = static_cast<int>(r.u32());
    GridSpec grid;
    grid.start = r.f64();
    grid.end = r.f64();
    r.f64();  // step
    grid.length = static_cast<int>(r.u32());
    std::uint32_t count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
        int cid = r.i32();
        RefEntry entry;
        entry.sample_id = r.str();
        entry.features.resize(feature_dim);
        for (auto& v : entry.features) v = r.f32();
        entry.raw.intensities.resize(grid.length);
        for (auto& v : entry.raw.intensities) v = r.f32();
        entry.raw.class_id = cid;
        entry.raw.sample_id = entry.sample_id;
        entry.raw.grid = grid;
        db.entries[cid].push_back(std::move(entry));
    }
    return db;
}

}  // namespace specmatch
