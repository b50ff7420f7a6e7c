// specmatch: one-shot spectrum matching toolchain. Subcommands cover the
// whole flow: synth/ingest -> preprocess -> train -> eval / db / match.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "specmatch/asls.hpp"
#include "specmatch/dataset_cache.hpp"
#include "specmatch/errors.hpp"
#include "specmatch/eval.hpp"
#include "specmatch/matcher.hpp"
#include "specmatch/model_io.hpp"
#include "specmatch/rng.hpp"
#include "specmatch/rruff.hpp"
#include "specmatch/serialize.hpp"
#include "specmatch/synth.hpp"
#include "specmatch/trainer.hpp"

namespace fs = std::filesystem;
using namespace specmatch;

namespace {

constexpr const char* kToolVersion = "0.1.0";

// seed streams for the pipeline's root-seed expansion
enum : std::uint64_t { kSeedData = 101, kSeedTrain = 102, kSeedEval = 103 };

// ---------------------------------------------------------------- config ---

// Flat "key = value" text; '#' starts a comment.
std::map<std::string, std::string> parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open config file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int line_no = 0;
    auto trim = [](std::string s) {
        auto issp = [](unsigned char c) { return std::isspace(c); };
        while (!s.empty() && issp(s.front())) s.erase(s.begin());
        while (!s.empty() && issp(s.back())) s.pop_back();
        return s;
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        out[key] = value;
    }
    return out;
}

std::uint32_t config_hash(const std::map<std::string, std::string>& cfg) {
    std::string canon;
    for (const auto& [k, v] : cfg) canon += k + "=" + v + "\n";
    return crc32(canon.data(), canon.size());
}

// Typed reads that consume keys; whatever is left at the end is unknown.
struct ConfigReader {
    std::map<std::string, std::string> kv;
    std::uint32_t hash;

    explicit ConfigReader(const std::string& path)
        : kv(parse_config(path)), hash(config_hash(kv)) {}

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    std::string str(const std::string& key, const std::string& dflt) {
        auto it = kv.find(key);
        if (it == kv.end()) return dflt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    }
    std::string require(const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError("missing required config key: " + key);
        std::string v = it->second;
        kv.erase(it);
        return v;
    }
    long integer(const std::string& key, long dflt) {
        auto it = kv.find(key);
        if (it == kv.end()) return dflt;
        try {
            long v = std::stol(it->second);
            kv.erase(it);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": not an integer: " + it->second);
        }
    }
    double real(const std::string& key, double dflt) {
        auto it = kv.find(key);
        if (it == kv.end()) return dflt;
        try {
            double v = std::stod(it->second);
            kv.erase(it);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": not a number: " + it->second);
        }
    }
    void reject_unknown() const {
        if (!kv.empty())
            throw ConfigError("unknown config key: " + kv.begin()->first);
    }
};

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ConfigError(what + ": bad integer '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

std::vector<LayerSpec> arch_specs(const std::string& filters_csv,
                                  const std::string& kernels_csv) {
    auto filters = parse_int_list(filters_csv, "filters");
    auto kernels = parse_int_list(kernels_csv, "kernels");
    if (filters.size() != kernels.size())
        throw ConfigError("filters and kernels lists must have equal length");
    std::vector<LayerSpec> specs;
    for (std::size_t i = 0; i < filters.size(); ++i)
        append_block(specs, filters[i], kernels[i]);
    specs.push_back(LayerSpec::flatten());
    return specs;
}

std::string stamp_line(std::uint32_t cfg_hash, std::uint64_t seed) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "# specmatch %s config=%08x seed=%llu\n",
                  kToolVersion, cfg_hash,
                  static_cast<unsigned long long>(seed));
    return buf;
}

TrainConfig train_config_from(ConfigReader& cfg) {
    TrainConfig tc;
    tc.epochs = static_cast<int>(cfg.integer("epochs", tc.epochs));
    tc.base_lr = cfg.real("base_lr", tc.base_lr);
    tc.lr_halving_period =
        static_cast<int>(cfg.integer("lr_halving_period", tc.lr_halving_period));
    tc.batch_size = static_cast<int>(cfg.integer("batch_size", tc.batch_size));
    tc.patience = static_cast<int>(cfg.integer("patience", tc.patience));
    tc.seed = static_cast<std::uint64_t>(cfg.integer("seed", 0));
    tc.augment = cfg.integer("augment", 0) != 0;
    tc.bias_enabled = cfg.integer("bias", 1) != 0;
    tc.val_pairs = static_cast<int>(cfg.integer("val_pairs", tc.val_pairs));
    tc.aug_policy.max_shift =
        static_cast<int>(cfg.integer("aug_max_shift", tc.aug_policy.max_shift));
    tc.aug_policy.noise_sigma = cfg.real("aug_noise_sigma", tc.aug_policy.noise_sigma);
    tc.aug_policy.scale_lo = cfg.real("aug_scale_lo", tc.aug_policy.scale_lo);
    tc.aug_policy.scale_hi = cfg.real("aug_scale_hi", tc.aug_policy.scale_hi);
    return tc;
}

Dataset subset_classes(const Dataset& ds, const std::vector<int>& classes) {
    std::set<int> keep(classes.begin(), classes.end());
    Dataset out;
    out.class_names = ds.class_names;
    for (const auto& s : ds.spectra)
        if (keep.count(s.class_id)) out.spectra.push_back(s);
    out.rebuild_index();
    return out;
}

// ---------------------------------------------------------------- stages ---

struct TrainOutcome {
    SiameseModel<float> model;
    TrainReport report;
};

TrainOutcome run_train_stage(const Dataset& ds, const std::vector<LayerSpec>& specs,
                             const TrainConfig& tc, double train_frac, double val_frac) {
    std::vector<int> class_ids;
    for (const auto& [cid, idx] : ds.class_index) class_ids.push_back(cid);
    SplitSpec split{train_frac, val_frac, 1.0 - train_frac - val_frac, mix_seed(tc.seed, 9)};
    ClassSplit cs = split_classes(class_ids, split);
    Dataset train_ds = subset_classes(ds, cs.train);
    Dataset val_ds = subset_classes(ds, cs.val);
    auto [model, report] = train_siamese(train_ds, val_ds, specs, tc);
    return {std::move(model), std::move(report)};
}

void write_stamped(const std::string& path, const std::string& stamp,
                   const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open " + path + " for writing");
    out << stamp << body;
}

// ---------------------------------------------------------- subcommands ----

int cmd_synth(const SynthConfig& scfg, std::uint64_t seed, const std::string& out_path) {
    Dataset ds = synth_dataset(scfg, seed);
    write_dataset_cache(ds, out_path);
    std::cout << "wrote " << out_path << ": " << ds.n_classes() << " classes, "
              << ds.spectra.size() << " samples, L=" << scfg.grid.length << "\n";
    return 0;
}

int cmd_ingest(const std::string& dir, const GridSpec& grid, const std::string& out_path) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());  // deterministic cache content

    struct Parsed {
        std::string name, sample_id;
        std::vector<float> intensities;
    };
    std::vector<Parsed> parsed;
    int warnings = 0;
    for (const auto& file : files) {
        try {
            std::ifstream in(file);
            if (!in) throw IOError("cannot open " + file.string());
            RawSpectrum raw = parse_rruff(in);
            auto it = raw.metadata.find("NAMES");
            if (it == raw.metadata.end() || it->second.empty())
                throw Error("missing NAMES header (class label)");
            Parsed p;
            p.name = it->second;
            p.sample_id = file.stem().string();
            p.intensities = normalize_minmax(resample(raw, grid));
            parsed.push_back(std::move(p));
        } catch (const Error& e) {
            std::cout << "warning: skipping " << file.string() << ": " << e.what()
                      << "\n";
            ++warnings;
        }
    }
    if (parsed.empty()) throw NoValidFiles();

    std::map<std::string, int> name_to_id;
    for (const auto& p : parsed) name_to_id.emplace(p.name, 0);
    int next_id = 0;
    for (auto& [name, id] : name_to_id) id = next_id++;

    Dataset ds;
    for (const auto& p : parsed) {
        Spectrum s;
        s.class_id = name_to_id.at(p.name);
        s.sample_id = p.sample_id;
        s.intensities = p.intensities;
        s.grid = grid;
        ds.spectra.push_back(std::move(s));
    }
    for (const auto& [name, id] : name_to_id) ds.class_names[id] = name;
    ds.rebuild_index();
    write_dataset_cache(ds, out_path);
    std::cout << "wrote " << out_path << ": " << ds.n_classes() << " classes, "
              << ds.spectra.size() << " samples";
    if (warnings) std::cout << ", " << warnings << " file(s) skipped";
    std::cout << "\n";
    return 0;
}

int cmd_preprocess(const std::string& in_path, const std::string& out_path,
                   const AslsConfig& acfg) {
    Dataset ds = read_dataset_cache(in_path);
    Dataset corrected = asls_correct_dataset(ds, acfg);
    write_dataset_cache(corrected, out_path);
    std::cout << "wrote " << out_path << ": " << corrected.spectra.size()
              << " corrected spectra\n";
    return 0;
}

int cmd_train(const std::string& config_path) {
    ConfigReader cfg(config_path);
    std::string data = cfg.require("data");
    std::string model_out = cfg.str("model_out", "model.ssnm");
    std::string report_out = cfg.str("report_out", "train_report.csv");
    double train_frac = cfg.real("train_frac", 0.5);
    double val_frac = cfg.real("val_frac", 0.1);
    std::string filters = cfg.str("filters", "32,32,16,16,8,8");
    std::string kernels = cfg.str("kernels", "9,9,7,7,5,5");
    TrainConfig tc = train_config_from(cfg);
    cfg.reject_unknown();

    Dataset ds = read_dataset_cache(data);
    auto specs = arch_specs(filters, kernels);
    auto outcome = run_train_stage(ds, specs, tc, train_frac, val_frac);

    save_siamese(outcome.model, model_out);
    std::ostringstream csv;
    write_report_csv(outcome.report, csv);
    write_stamped(report_out, stamp_line(cfg.hash, tc.seed), csv.str());
    std::cout << "trained " << outcome.report.epochs_run << " epochs, best epoch "
              << outcome.report.best_epoch << ", val loss "
              << outcome.report.val_loss[outcome.report.best_epoch] << "\n"
              << "wrote " << model_out << " and " << report_out << "\n";
    return 0;
}

int cmd_eval(const std::string& protocol, const std::string& data, int repeats,
             std::uint64_t seed, const std::string& out_path, int epochs,
             int batch_size, int patience, int val_pairs, bool augment,
             const std::string& filters, const std::string& kernels,
             double train_frac, double val_frac) {
    Dataset ds = read_dataset_cache(data);
    auto specs = arch_specs(filters, kernels);
    TrainConfig tc;
    tc.epochs = epochs;
    tc.batch_size = batch_size;
    tc.patience = patience;
    tc.val_pairs = val_pairs;
    tc.augment = augment;
    tc.seed = seed;

    std::vector<EvalReport> reports;
    if (protocol == "one-shot") {
        SplitSpec split{train_frac, val_frac, 1.0 - train_frac - val_frac, 0};
        auto result = run_one_shot(ds, specs, tc, repeats, split);
        reports = {result.siamese, result.nn_l2, result.nn_cosine};
    } else if (protocol == "multiclass") {
        reports.push_back(run_multiclass(ds, specs, tc, repeats, MulticlassMode::Siamese));
        reports.push_back(
            run_multiclass(ds, specs, tc, repeats, MulticlassMode::Classifier));
    } else {
        throw ConfigError("eval protocol must be one-shot or multiclass");
    }

    std::ostringstream csv;
    csv << "# columns: protocol,method,run,seed,macro_f1,accuracy; run is an index,"
           " 'mean'/'std' rows aggregate; macro_f1 is the unweighted per-class mean\n";
    write_eval_csv(reports, csv);
    if (!out_path.empty())
        write_stamped(out_path, stamp_line(0, seed), csv.str());
    print_eval_summary(reports, std::cout);
    if (!out_path.empty()) std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_db_add(const std::string& db_path, const std::string& model_path,
               const std::string& data_path) {
    auto model = load_siamese(model_path);
    ReferenceDB db;
    if (fs::exists(db_path)) db = read_db(db_path);
    Dataset ds = read_dataset_cache(data_path);
    for (const auto& s : ds.spectra) db_add(db, s.class_id, s, model);
    write_db(db, db_path);
    std::cout << "db now holds " << db.n_classes() << " classes\n";
    return 0;
}

int cmd_db_remove(const std::string& db_path, int class_id) {
    ReferenceDB db = read_db(db_path);
    db_remove(db, class_id);
    write_db(db, db_path);
    std::cout << "removed class " << class_id << "; db now holds " << db.n_classes()
              << " classes\n";
    return 0;
}

int cmd_db_list(const std::string& db_path) {
    ReferenceDB db = read_db(db_path);
    std::cout << "snapshot " << db.snapshot_id << "\n";
    for (const auto& [cid, refs] : db.entries)
        std::cout << cid << "\t" << refs.size() << " reference(s)\n";
    return 0;
}

int cmd_match(const std::string& db_path, const std::string& model_path,
              const std::string& query_path, int top) {
    ReferenceDB db = read_db(db_path);
    if (db.empty()) throw EmptyDB();
    auto model = load_siamese(model_path);
    if (db.snapshot_id != model_snapshot_id(model)) throw ModelMismatch();

    std::ifstream in(query_path);
    if (!in) throw IOError("cannot open query " + query_path);
    RawSpectrum raw = parse_rruff(in);
    const GridSpec grid = db.entries.begin()->second.front().raw.grid;
    Spectrum query;
    query.sample_id = fs::path(query_path).stem().string();
    query.grid = grid;
    query.intensities = normalize_minmax(resample(raw, grid));

    auto result = match_one_shot(db, query, model);
    const int n = std::min<int>(top, static_cast<int>(result.ranking.size()));
    std::cout << "rank\tclass_id\tscore\n";
    std::cout.precision(6);
    for (int i = 0; i < n; ++i)
        std::cout << i + 1 << "\t" << result.ranking[i].first << "\t" << std::fixed
                  << result.ranking[i].second << "\n";
    return 0;
}

int cmd_export_features(const std::string& model_path, const std::string& data_path,
                        const std::string& out_path) {
    auto model = load_siamese(model_path);
    Dataset ds = read_dataset_cache(data_path);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IOError("cannot open " + out_path + " for writing");
    export_features(ds, model, out);
    std::cout << "wrote " << out_path << ": " << ds.spectra.size() << " rows x "
              << (2 + model.feature_dim()) << " columns\n";
    return 0;
}

int cmd_pipeline(const std::string& config_path, bool dry_run) {
    ConfigReader cfg(config_path);
    std::string out_dir = cfg.str("out_dir", "run");
    std::string source = cfg.str("source", "synth");
    std::uint64_t root_seed = static_cast<std::uint64_t>(cfg.integer("seed", 0));

    SynthConfig scfg;
    std::string ingest_dir;
    if (source == "synth") {
        scfg.n_classes = static_cast<int>(cfg.integer("synth_classes", 10));
        scfg.samples_per_class = static_cast<int>(cfg.integer("synth_samples", 6));
        scfg.grid.length = static_cast<int>(cfg.integer("length", 1024));
        scfg.baseline_degree = static_cast<int>(cfg.integer("baseline_degree", 3));
        scfg.noise_sigma = cfg.real("noise_sigma", 0.01);
    } else if (source == "ingest") {
        ingest_dir = cfg.require("ingest_dir");
    } else {
        throw ConfigError("source must be synth or ingest");
    }

    bool preprocess = cfg.integer("preprocess", 0) != 0;
    AslsConfig acfg;
    acfg.lambda = cfg.real("lambda", acfg.lambda);
    acfg.p = cfg.real("p", acfg.p);
    acfg.max_iter = static_cast<int>(cfg.integer("max_iter", acfg.max_iter));

    double train_frac = cfg.real("train_frac", 0.5);
    double val_frac = cfg.real("val_frac", 0.1);
    std::string filters = cfg.str("filters", "32,32,16,16,8,8");
    std::string kernels = cfg.str("kernels", "9,9,7,7,5,5");
    int eval_repeats = static_cast<int>(cfg.integer("eval_repeats", 5));
    bool eval_multiclass = cfg.integer("eval_multiclass", 0) != 0;
    TrainConfig tc = train_config_from(cfg);
    cfg.reject_unknown();

    const std::string data_path = out_dir + "/data.spcd";
    const std::string corrected_path = out_dir + "/data_corrected.spcd";
    const std::string model_path = out_dir + "/model.ssnm";
    const std::string train_report_path = out_dir + "/train_report.csv";
    const std::string db_path = out_dir + "/refs.spdb";
    const std::string eval_report_path = out_dir + "/eval_report.csv";
    const std::string manifest_path = out_dir + "/manifest.json";

    std::vector<std::string> plan;
    plan.push_back(source == "synth" ? "synth -> " + data_path
                                     : "ingest " + ingest_dir + " -> " + data_path);
    if (preprocess) plan.push_back("preprocess -> " + corrected_path);
    plan.push_back("train -> " + model_path + ", " + train_report_path);
    plan.push_back("db build -> " + db_path);
    plan.push_back(std::string("eval one-shot") +
                   (eval_multiclass ? " + multiclass" : "") + " -> " + eval_report_path);
    plan.push_back("manifest -> " + manifest_path);

    std::cout << "pipeline plan (seed " << root_seed << ", config " << std::hex
              << cfg.hash << std::dec << "):\n";
    for (const auto& step : plan) std::cout << "  " << step << "\n";
    if (dry_run) {
        std::cout << "dry run: nothing written\n";
        return 0;
    }

    fs::create_directories(out_dir);

    Dataset ds;
    if (source == "synth") {
        ds = synth_dataset(scfg, mix_seed(root_seed, kSeedData));
        write_dataset_cache(ds, data_path);
    } else {
        int rc = cmd_ingest(ingest_dir, GridSpec{}, data_path);
        if (rc != 0) return rc;
        ds = read_dataset_cache(data_path);
    }

    if (preprocess) {
        ds = asls_correct_dataset(ds, acfg);
        write_dataset_cache(ds, corrected_path);
    }

    auto specs = arch_specs(filters, kernels);
    TrainConfig train_tc = tc;
    train_tc.seed = mix_seed(root_seed, kSeedTrain);
    auto outcome = run_train_stage(ds, specs, train_tc, train_frac, val_frac);
    save_siamese(outcome.model, model_path);
    std::ostringstream train_csv;
    write_report_csv(outcome.report, train_csv);
    write_stamped(train_report_path, stamp_line(cfg.hash, root_seed), train_csv.str());

    ReferenceDB db;
    for (const auto& s : ds.spectra) db_add(db, s.class_id, s, outcome.model);
    write_db(db, db_path);

    TrainConfig eval_tc = tc;
    eval_tc.seed = mix_seed(root_seed, kSeedEval);
    std::vector<EvalReport> reports;
    {
        SplitSpec split{train_frac, val_frac, 1.0 - train_frac - val_frac, 0};
        auto result = run_one_shot(ds, specs, eval_tc, eval_repeats, split);
        reports = {result.siamese, result.nn_l2, result.nn_cosine};
    }
    if (eval_multiclass) {
        reports.push_back(
            run_multiclass(ds, specs, eval_tc, eval_repeats, MulticlassMode::Siamese));
        reports.push_back(
            run_multiclass(ds, specs, eval_tc, eval_repeats, MulticlassMode::Classifier));
    }
    std::ostringstream eval_csv;
    write_eval_csv(reports, eval_csv);
    write_stamped(eval_report_path, stamp_line(cfg.hash, root_seed), eval_csv.str());
    print_eval_summary(reports, std::cout);

    nlohmann::json manifest;
    manifest["tool_version"] = kToolVersion;
    char hash_hex[16];
    std::snprintf(hash_hex, sizeof hash_hex, "%08x", cfg.hash);
    manifest["config_hash"] = hash_hex;
    manifest["seed"] = root_seed;
    manifest["artifacts"] = {data_path, model_path, train_report_path, db_path,
                             eval_report_path};
    if (preprocess) manifest["artifacts"].push_back(corrected_path);
    std::ofstream mf(manifest_path, std::ios::binary);
    if (!mf) throw IOError("cannot open " + manifest_path + " for writing");
    mf << manifest.dump(2) << "\n";
    std::cout << "wrote " << manifest_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-shot spectrum matching toolchain"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset cache");
    SynthConfig scfg;
    std::uint64_t synth_seed = 0;
    std::string synth_out = "data.spcd";
    synth->add_option("--classes", scfg.n_classes, "number of classes");
    synth->add_option("--samples", scfg.samples_per_class, "samples per class");
    synth->add_option("--length", scfg.grid.length, "grid length");
    synth->add_option("--baseline-degree", scfg.baseline_degree,
                      "polynomial baseline degree (0 disables)");
    synth->add_option("--baseline-amplitude", scfg.baseline_amplitude,
                      "baseline amplitude relative to peaks");
    synth->add_option("--noise", scfg.noise_sigma, "noise sigma relative to peaks");
    synth->add_option("--seed", synth_seed, "rng seed");
    synth->add_option("--out", synth_out, "output cache path");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "build a dataset cache from a directory"
                                                " of spectra text files");
    std::string ingest_dir, ingest_out = "data.spcd";
    GridSpec ingest_grid;
    ingest->add_option("--dir", ingest_dir, "input directory")->required();
    ingest->add_option("--out", ingest_out, "output cache path");
    ingest->add_option("--grid-start", ingest_grid.start, "grid start wavenumber");
    ingest->add_option("--grid-end", ingest_grid.end, "grid end wavenumber");
    ingest->add_option("--length", ingest_grid.length, "grid length");

    // preprocess
    auto* pre = app.add_subcommand("preprocess", "baseline-correct a dataset cache");
    std::string pre_in, pre_out = "data_corrected.spcd";
    AslsConfig acfg;
    pre->add_option("--in", pre_in, "input cache")->required();
    pre->add_option("--out", pre_out, "output cache path");
    pre->add_option("--lambda", acfg.lambda, "smoothness weight");
    pre->add_option("--p", acfg.p, "asymmetry parameter");
    pre->add_option("--max-iter", acfg.max_iter, "weight iterations");

    // train
    auto* train = app.add_subcommand("train", "train a matching model from a config");
    std::string train_config;
    train->add_option("--config", train_config, "flat key = value config file")
        ->required();

    // eval
    auto* eval = app.add_subcommand("eval", "run an evaluation protocol");
    std::string eval_protocol, eval_data, eval_out;
    int eval_repeats = 5, eval_epochs = 30, eval_batch = 64, eval_patience = 5,
        eval_val_pairs = 2000;
    bool eval_augment = false;
    std::uint64_t eval_seed = 0;
    std::string eval_filters = "32,32,16,16,8,8", eval_kernels = "9,9,7,7,5,5";
    double eval_train_frac = 0.5, eval_val_frac = 0.1;
    eval->add_option("protocol", eval_protocol, "one-shot or multiclass")->required();
    eval->add_option("--data", eval_data, "dataset cache")->required();
    eval->add_option("--repeats", eval_repeats, "independent repeats");
    eval->add_option("--seed", eval_seed, "root seed");
    eval->add_option("--out", eval_out, "report CSV path");
    eval->add_option("--epochs", eval_epochs, "training epochs per repeat");
    eval->add_option("--batch-size", eval_batch, "pairs per batch");
    eval->add_option("--patience", eval_patience, "early-stop patience");
    eval->add_option("--val-pairs", eval_val_pairs, "validation pair count");
    eval->add_flag("--augment", eval_augment, "train with augmentation");
    eval->add_option("--filters", eval_filters, "conv filters per block");
    eval->add_option("--kernels", eval_kernels, "conv kernel sizes per block");
    eval->add_option("--train-frac", eval_train_frac, "one-shot train class fraction");
    eval->add_option("--val-frac", eval_val_frac, "one-shot val class fraction");

    // db
    auto* db = app.add_subcommand("db", "manage a reference database");
    db->require_subcommand(1);
    std::string db_path, db_model, db_data;
    int db_class = 0;
    auto* db_add_cmd = db->add_subcommand("add", "embed and add a cache's spectra");
    db_add_cmd->add_option("--db", db_path, "database path")->required();
    db_add_cmd->add_option("--model", db_model, "model file")->required();
    db_add_cmd->add_option("--data", db_data, "dataset cache to add")->required();
    auto* db_remove_cmd = db->add_subcommand("remove", "remove a class");
    db_remove_cmd->add_option("--db", db_path, "database path")->required();
    db_remove_cmd->add_option("--class-id", db_class, "class to remove")->required();
    auto* db_list_cmd = db->add_subcommand("list", "list classes");
    db_list_cmd->add_option("--db", db_path, "database path")->required();

    // match
    auto* match = app.add_subcommand("match", "rank db classes for a query spectrum");
    std::string match_db, match_model, match_query;
    int match_top = 5;
    match->add_option("--db", match_db, "database path")->required();
    match->add_option("--model", match_model, "model file")->required();
    match->add_option("--query", match_query, "query spectrum text file")->required();
    match->add_option("--top", match_top, "ranks to print");

    // export-features
    auto* exf = app.add_subcommand("export-features",
                                   "embed a cache and write features as CSV");
    std::string exf_model, exf_data, exf_out = "features.csv";
    exf->add_option("--model", exf_model, "model file")->required();
    exf->add_option("--data", exf_data, "dataset cache")->required();
    exf->add_option("--out", exf_out, "output CSV path");

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "run the full flow from one config");
    std::string pipe_config;
    bool pipe_dry = false;
    pipe->add_option("--config", pipe_config, "flat key = value config file")
        ->required();
    pipe->add_flag("--dry-run", pipe_dry, "print the stage plan and write nothing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // usage errors are exit code 2, --help is 0
    }

    try {
        if (*synth) return cmd_synth(scfg, synth_seed, synth_out);
        if (*ingest) return cmd_ingest(ingest_dir, ingest_grid, ingest_out);
        if (*pre) return cmd_preprocess(pre_in, pre_out, acfg);
        if (*train) return cmd_train(train_config);
        if (*eval)
            return cmd_eval(eval_protocol, eval_data, eval_repeats, eval_seed, eval_out,
                            eval_epochs, eval_batch, eval_patience, eval_val_pairs,
                            eval_augment, eval_filters, eval_kernels, eval_train_frac,
                            eval_val_frac);
        if (*db_add_cmd) return cmd_db_add(db_path, db_model, db_data);
        if (*db_remove_cmd) return cmd_db_remove(db_path, db_class);
        if (*db_list_cmd) return cmd_db_list(db_path);
        if (*match) return cmd_match(match_db, match_model, match_query, match_top);
        if (*exf) return cmd_export_features(exf_model, exf_data, exf_out);
        if (*pipe) return cmd_pipeline(pipe_config, pipe_dry);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";  // message already carries its prefix
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
