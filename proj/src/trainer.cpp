#include "specmatch/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "specmatch/adam.hpp"
#include "specmatch/errors.hpp"
#include "specmatch/rng.hpp"

namespace specmatch {

namespace {

// seed streams within a training run
enum : std::uint64_t {
    kStreamInit = 1,
    kStreamEpochs = 2,
    kStreamValPairs = 3,
    kStreamAugment = 4,
    kStreamShuffle = 5,
};

template <typename Model>
std::vector<std::vector<float>> snapshot_state(const Model& model) {
    std::vector<std::vector<float>> snap;
    for (const auto* blob : model.state_blobs()) snap.push_back(*blob);
    return snap;
}

template <typename Model>
void restore_state(Model& model, const std::vector<std::vector<float>>& snap) {
    auto blobs = model.state_blobs();
    for (std::size_t i = 0; i < blobs.size(); ++i) *blobs[i] = snap[i];
}

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(base_lr > 0.0)) throw ConfigError("base_lr must be > 0");
    if (patience < 1) throw ConfigError("patience must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (val_pairs < 2) throw ConfigError("val_pairs must be >= 2");
}

double lr_at(int epoch, const TrainConfig& cfg) {
    if (cfg.lr_halving_period <= 0) return cfg.base_lr;
    return cfg.base_lr * std::pow(0.5, epoch / cfg.lr_halving_period);
}

void write_report_csv(const TrainReport& report, std::ostream& out) {
    out << "epoch,train_loss,val_loss,lr\n";
    out.precision(10);
    for (std::size_t e = 0; e < report.train_loss.size(); ++e)
        out << e << "," << report.train_loss[e] << "," << report.val_loss[e] << ","
            << report.lr[e] << "\n";
}

std::pair<SiameseModel<float>, TrainReport> train_siamese(
    const Dataset& train_ds, const Dataset& val_ds,
    const std::vector<LayerSpec>& twin_specs, const TrainConfig& cfg) {
    cfg.validate();
    if (train_ds.spectra.empty() || val_ds.spectra.empty())
        throw ConfigError("train and validation splits must be nonempty");
    const auto t0 = std::chrono::steady_clock::now();
    const int L = train_ds.spectra.front().grid.length;

    SiameseModel<float> model(twin_specs, L, cfg.bias_enabled);
    model.init_xavier(mix_seed(cfg.seed, kStreamInit));
    auto params = model.params();
    AdamState<float> adam;
    adam.init(params);

    BootstrapPlan plan = make_plan(train_ds, mix_seed(cfg.seed, kStreamEpochs));

    // fixed validation pair set, balanced, drawn once
    BootstrapPlan val_plan = make_plan(val_ds, mix_seed(cfg.seed, kStreamValPairs));
    val_plan.s_m = static_cast<std::uint64_t>(cfg.val_pairs) / 2;
    auto val_pairs = sample_epoch(val_ds, val_plan, 0);
    std::vector<const std::vector<float>*> va, vb;
    std::vector<float> vy;
    for (const auto& p : val_pairs) {
        va.push_back(&val_ds.spectra[p.a].intensities);
        vb.push_back(&val_ds.spectra[p.b].intensities);
        vy.push_back(static_cast<float>(p.label));
    }

    TrainReport report;
    std::set<std::string> trained_ids;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<std::vector<float>> best_snap;
    int since_best = 0;
    Rng aug_rng(mix_seed(cfg.seed, kStreamAugment));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = lr_at(epoch, cfg);
        auto pairs = sample_epoch(train_ds, plan, static_cast<std::uint64_t>(epoch));
        double epoch_loss = 0.0;
        std::size_t done = 0;
        while (done < pairs.size()) {
            std::size_t bs = std::min<std::size_t>(cfg.batch_size, pairs.size() - done);
            std::vector<std::vector<float>> aug_store;
            std::vector<const std::vector<float>*> sa, sb;
            std::vector<float> labels;
            aug_store.reserve(2 * bs);
            for (std::size_t i = 0; i < bs; ++i) {
                const auto& p = pairs[done + i];
                const Spectrum& a = train_ds.spectra[p.a];
                const Spectrum& b = train_ds.spectra[p.b];
                trained_ids.insert(a.sample_id);
                trained_ids.insert(b.sample_id);
                if (cfg.augment) {
                    aug_store.push_back(
                        augment(a, cfg.aug_policy, aug_rng.next_u64()).intensities);
                    sa.push_back(&aug_store.back());
                    aug_store.push_back(
                        augment(b, cfg.aug_policy, aug_rng.next_u64()).intensities);
                    sb.push_back(&aug_store.back());
                } else {
                    sa.push_back(&a.intensities);
                    sb.push_back(&b.intensities);
                }
                labels.push_back(static_cast<float>(p.label));
            }
            float loss = model.train_step(sa, sb, labels);
            adam_step(params, adam, lr);
            epoch_loss += static_cast<double>(loss) * bs;
            done += bs;
        }
        epoch_loss /= static_cast<double>(pairs.size());
        double val_loss = model.eval_loss(va, vb, vy);

        report.train_loss.push_back(epoch_loss);
        report.val_loss.push_back(val_loss);
        report.lr.push_back(lr);
        report.epochs_run = epoch + 1;

        if (val_loss < best_val) {
            best_val = val_loss;
            best_snap = snapshot_state(model);
            report.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    if (!best_snap.empty()) restore_state(model, best_snap);
    report.trained_sample_ids.assign(trained_ids.begin(), trained_ids.end());
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(model), std::move(report)};
}

std::pair<TrainedClassifier, TrainReport> train_classifier(
    const Dataset& train_ds, const Dataset& val_ds,
    const std::vector<LayerSpec>& twin_specs, const TrainConfig& cfg) {
    cfg.validate();
    if (train_ds.spectra.empty() || val_ds.spectra.empty())
        throw ConfigError("train and validation splits must be nonempty");
    const auto t0 = std::chrono::steady_clock::now();
    const int L = train_ds.spectra.front().grid.length;

    std::vector<int> head_classes;
    for (const auto& [cid, idx] : train_ds.class_index) head_classes.push_back(cid);
    std::map<int, int> head_index;
    for (std::size_t i = 0; i < head_classes.size(); ++i)
        head_index[head_classes[i]] = static_cast<int>(i);

    ClassifierModel<float> model(twin_specs, L, static_cast<int>(head_classes.size()));
    model.init_xavier(mix_seed(cfg.seed, kStreamInit));
    auto params = model.params();
    AdamState<float> adam;
    adam.init(params);

    std::vector<std::size_t> order(train_ds.spectra.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainReport report;
    std::set<std::string> trained_ids;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<std::vector<float>> best_snap;
    int since_best = 0;
    Rng aug_rng(mix_seed(cfg.seed, kStreamAugment));
    Rng shuffle_rng(mix_seed(cfg.seed, kStreamShuffle));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = lr_at(epoch, cfg);
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t done = 0;
        while (done < order.size()) {
            std::size_t bs = std::min<std::size_t>(cfg.batch_size, order.size() - done);
            std::vector<std::vector<float>> aug_store;
            std::vector<const std::vector<float>*> batch;
            std::vector<int> labels;
            aug_store.reserve(bs);
            for (std::size_t i = 0; i < bs; ++i) {
                const Spectrum& s = train_ds.spectra[order[done + i]];
                trained_ids.insert(s.sample_id);
                if (cfg.augment) {
                    aug_store.push_back(
                        augment(s, cfg.aug_policy, aug_rng.next_u64()).intensities);
                    batch.push_back(&aug_store.back());
                } else {
                    batch.push_back(&s.intensities);
                }
                labels.push_back(head_index.at(s.class_id));
            }
            float loss = model.train_step(batch, labels);
            adam_step(params, adam, lr);
            epoch_loss += static_cast<double>(loss) * bs;
            done += bs;
        }
        epoch_loss /= static_cast<double>(order.size());

        double val_loss = 0.0;
        for (const auto& s : val_ds.spectra) {
            auto p = model.forward_probs(s.intensities);
            auto it = head_index.find(s.class_id);
            // validation classes outside the head contribute maximal loss
            double prob = it == head_index.end()
                              ? 1e-30
                              : std::max(static_cast<double>(p[it->second]), 1e-30);
            val_loss -= std::log(prob);
        }
        val_loss /= static_cast<double>(val_ds.spectra.size());

        report.train_loss.push_back(epoch_loss);
        report.val_loss.push_back(val_loss);
        report.lr.push_back(lr);
        report.epochs_run = epoch + 1;

        if (val_loss < best_val) {
            best_val = val_loss;
            best_snap = snapshot_state(model);
            report.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    if (!best_snap.empty()) restore_state(model, best_snap);
    report.trained_sample_ids.assign(trained_ids.begin(), trained_ids.end());
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {TrainedClassifier{std::move(model), std::move(head_classes)},
            std::move(report)};
}

}  // namespace specmatch
