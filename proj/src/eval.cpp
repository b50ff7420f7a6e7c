#include "specmatch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "specmatch/errors.hpp"
#include "specmatch/matcher.hpp"
#include "specmatch/rng.hpp"

namespace specmatch {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

Dataset subset_by_classes(const Dataset& ds, const std::vector<int>& classes) {
    std::set<int> keep(classes.begin(), classes.end());
    Dataset out;
    for (const auto& s : ds.spectra)
        if (keep.count(s.class_id)) out.spectra.push_back(s);
    for (int c : classes) {
        auto it = ds.class_names.find(c);
        if (it != ds.class_names.end()) out.class_names[c] = it->second;
    }
    out.rebuild_index();
    return out;
}

Dataset subset_by_indices(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    for (std::size_t i : indices) out.spectra.push_back(ds.spectra[i]);
    out.class_names = ds.class_names;
    out.rebuild_index();
    return out;
}

}  // namespace

std::map<int, ClassStats> per_class_stats(const std::vector<int>& predictions,
                                          const std::vector<int>& truths) {
    if (predictions.size() != truths.size()) throw LengthMismatch();
    std::map<int, ClassStats> stats;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (predictions[i] == truths[i]) {
            ++stats[truths[i]].tp;
        } else {
            ++stats[truths[i]].fn;
            ++stats[predictions[i]].fp;
        }
    }
    return stats;
}

double macro_f1(const std::vector<int>& predictions, const std::vector<int>& truths) {
    auto stats = per_class_stats(predictions, truths);
    if (stats.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [cid, st] : stats) sum += st.f1();
    return sum / static_cast<double>(stats.size());
}

double accuracy(const std::vector<int>& predictions, const std::vector<int>& truths) {
    if (predictions.size() != truths.size()) throw LengthMismatch();
    if (truths.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truths.size(); ++i)
        if (predictions[i] == truths[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(truths.size());
}

double EvalReport::mean_f1() const { return mean_of(run_f1); }
double EvalReport::std_f1() const { return std_of(run_f1); }
double EvalReport::mean_accuracy() const { return mean_of(run_accuracy); }
double EvalReport::std_accuracy() const { return std_of(run_accuracy); }

void write_eval_csv(const std::vector<EvalReport>& reports, std::ostream& out) {
    out << "protocol,method,run,seed,macro_f1,accuracy\n";
    out.precision(10);
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.run_f1.size(); ++i)
            out << r.protocol << "," << r.method << "," << i << "," << r.run_seeds[i]
                << "," << r.run_f1[i] << "," << r.run_accuracy[i] << "\n";
        out << r.protocol << "," << r.method << ",mean,," << r.mean_f1() << ","
            << r.mean_accuracy() << "\n";
        out << r.protocol << "," << r.method << ",std,," << r.std_f1() << ","
            << r.std_accuracy() << "\n";
    }
}

void print_eval_summary(const std::vector<EvalReport>& reports, std::ostream& out) {
    out << std::left << std::setw(12) << "protocol" << std::setw(16) << "method"
        << std::setw(22) << "macro-F1 (mean+-std)" << "accuracy (mean+-std)\n";
    for (const auto& r : reports) {
        std::ostringstream f1s, accs;
        f1s << std::fixed << std::setprecision(3) << r.mean_f1() << " +- " << r.std_f1();
        accs << std::fixed << std::setprecision(3) << r.mean_accuracy() << " +- "
             << r.std_accuracy();
        out << std::left << std::setw(12) << r.protocol << std::setw(16) << r.method
            << std::setw(22) << f1s.str() << accs.str() << "\n";
    }
}

OneShotResult run_one_shot(const Dataset& ds, const std::vector<LayerSpec>& twin_specs,
                           const TrainConfig& cfg, int n_repeats, const SplitSpec& split) {
    OneShotResult result;
    result.siamese.protocol = result.nn_l2.protocol = result.nn_cosine.protocol =
        "one-shot";
    result.siamese.method = "siamese";
    result.nn_l2.method = "nn-l2";
    result.nn_cosine.method = "nn-cosine";

    std::vector<int> all_classes;
    for (const auto& [cid, idx] : ds.class_index) all_classes.push_back(cid);

    for (int rep = 0; rep < n_repeats; ++rep) {
        std::uint64_t seed = mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(rep));
        SplitSpec sp = split;
        sp.rng_seed = seed;
        ClassSplit cs = split_classes(all_classes, sp);

        Dataset train_ds = subset_by_classes(ds, cs.train);
        Dataset val_ds = subset_by_classes(ds, cs.val);
        Dataset test_ds = subset_by_classes(ds, cs.test);

        TrainConfig run_cfg = cfg;
        run_cfg.seed = seed;
        auto [model, report] = train_siamese(train_ds, val_ds, twin_specs, run_cfg);

        // one random reference per test class; everything else is a query
        Rng ref_rng(mix_seed(seed, 7));
        ReferenceDB db;
        std::set<std::size_t> ref_indices;
        std::vector<const Spectrum*> raw_refs;
        for (const auto& [cid, idx] : test_ds.class_index) {
            std::size_t pick = idx[ref_rng.uniform_int(idx.size())];
            db_add(db, cid, test_ds.spectra[pick], model);
            raw_refs.push_back(&test_ds.spectra[pick]);
            ref_indices.insert(pick);
        }

        std::vector<int> truths, pred_siamese, pred_l2, pred_cos;
        for (std::size_t i = 0; i < test_ds.spectra.size(); ++i) {
            if (ref_indices.count(i)) continue;
            const Spectrum& q = test_ds.spectra[i];
            truths.push_back(q.class_id);
            pred_siamese.push_back(match_one_shot(db, q, model).predicted);
            pred_l2.push_back(match_baseline(raw_refs, q, BaselineMetric::L2).predicted);
            pred_cos.push_back(
                match_baseline(raw_refs, q, BaselineMetric::Cosine).predicted);
        }

        auto record = [&](EvalReport& r, const std::vector<int>& preds) {
            r.run_f1.push_back(macro_f1(preds, truths));
            r.run_accuracy.push_back(accuracy(preds, truths));
            r.run_seeds.push_back(seed);
            r.last_run_stats = per_class_stats(preds, truths);
        };
        record(result.siamese, pred_siamese);
        record(result.nn_l2, pred_l2);
        record(result.nn_cosine, pred_cos);
    }
    return result;
}

EvalReport run_multiclass(const Dataset& ds, const std::vector<LayerSpec>& twin_specs,
                          const TrainConfig& cfg, int n_repeats, MulticlassMode mode) {
    EvalReport report;
    report.protocol = "multiclass";
    report.method = mode == MulticlassMode::Siamese ? "siamese" : "classifier";

    for (int rep = 0; rep < n_repeats; ++rep) {
        std::uint64_t seed = mix_seed(cfg.seed, 2000 + static_cast<std::uint64_t>(rep));
        Holdout holdout = holdout_one_per_class(ds, mix_seed(seed, 11));
        Dataset rest_ds = subset_by_indices(ds, holdout.rest);

        // Validation split from the rest: siamese early stopping scores pair
        // losses, so it needs two validation samples per class to form
        // positives (only classes with >= 4 contribute, keeping >= 2 for
        // training). The classifier scores single samples, so one suffices.
        Rng val_rng(mix_seed(seed, 13));
        std::set<std::size_t> val_pick;
        for (const auto& [cid, idx] : rest_ds.class_index) {
            if (mode == MulticlassMode::Siamese) {
                if (idx.size() < 4) continue;
                std::size_t i1 = val_rng.uniform_int(idx.size());
                std::size_t i2 = val_rng.uniform_int(idx.size() - 1);
                if (i2 >= i1) ++i2;
                val_pick.insert(idx[i1]);
                val_pick.insert(idx[i2]);
            } else if (idx.size() >= 2) {
                val_pick.insert(idx[val_rng.uniform_int(idx.size())]);
            }
        }
        if (mode == MulticlassMode::Siamese && val_pick.empty())
            throw ConfigError(
                "multiclass siamese validation needs a class with >= 5 samples");
        std::vector<std::size_t> train_idx, val_idx;
        for (std::size_t i = 0; i < rest_ds.spectra.size(); ++i)
            (val_pick.count(i) ? val_idx : train_idx).push_back(i);
        Dataset train_ds = subset_by_indices(rest_ds, train_idx);
        Dataset val_ds = subset_by_indices(rest_ds, val_idx);

        TrainConfig run_cfg = cfg;
        run_cfg.seed = seed;

        std::vector<int> truths, preds;
        if (mode == MulticlassMode::Siamese) {
            auto [model, train_report] =
                train_siamese(train_ds, val_ds, twin_specs, run_cfg);
            ReferenceDB db;
            for (const auto& s : rest_ds.spectra) db_add(db, s.class_id, s, model);
            for (std::size_t i : holdout.test) {
                truths.push_back(ds.spectra[i].class_id);
                preds.push_back(match_one_shot(db, ds.spectra[i], model).predicted);
            }
        } else {
            auto [trained, train_report] =
                train_classifier(train_ds, val_ds, twin_specs, run_cfg);
            for (std::size_t i : holdout.test) {
                truths.push_back(ds.spectra[i].class_id);
                preds.push_back(trained.predict_class(ds.spectra[i]));
            }
        }
        report.run_f1.push_back(macro_f1(preds, truths));
        report.run_accuracy.push_back(accuracy(preds, truths));
        report.run_seeds.push_back(seed);
        report.last_run_stats = per_class_stats(preds, truths);
    }
    return report;
}

}  // namespace specmatch
