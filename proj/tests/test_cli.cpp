// End-to-end checks of the command-line tool: each case shells out to the
// built binary in a scratch directory and inspects exit codes and artifacts.

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "specmatch/dataset_cache.hpp"
#include "specmatch/rruff.hpp"

namespace fs = std::filesystem;
using namespace specmatch;

namespace {

struct RunResult {
    int exit_code;
    std::string output;  // stdout + stderr interleaved
};

RunResult run_cli(const std::string& args, const fs::path& cwd) {
    const std::string cmd = "cd '" + cwd.string() + "' && '" + SPECMATCH_CLI_PATH +
                            "' " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        output.append(buf.data(), n);
    int status = pclose(pipe);
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, output};
}

fs::path scratch_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("specmatch_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

// A clean two-peak spectrum in the text interchange format.
std::string spectrum_text(const std::string& name, double peak1, double peak2) {
    RawSpectrum raw;
    raw.metadata["NAMES"] = name;
    raw.metadata["LOCALITY"] = "synthetic bench";
    for (int i = 0; i < 200; ++i) {
        double x = 200.0 + 6.0 * i;
        double y = std::exp(-0.002 * (x - peak1) * (x - peak1)) +
                   0.7 * std::exp(-0.002 * (x - peak2) * (x - peak2));
        raw.points.emplace_back(x, 1000.0 * y);
    }
    return serialize_rruff(raw);
}

void write_corpus(const fs::path& dir) {
    write_file(dir / "a1.txt", spectrum_text("Albite", 500.0, 900.0));
    write_file(dir / "a2.txt", spectrum_text("Albite", 505.0, 895.0));
    write_file(dir / "q1.txt", spectrum_text("Quartz", 700.0, 1200.0));
    write_file(dir / "broken.txt", "this is not a spectrum\n");
}

const std::string kPipelineConfig =
    "out_dir = run\n"
    "source = synth\n"
    "synth_classes = 8\n"
    "synth_samples = 5\n"
    "length = 64\n"
    "baseline_degree = 0\n"
    "noise_sigma = 0.02\n"
    "epochs = 3\n"
    "batch_size = 16\n"
    "val_pairs = 40\n"
    "patience = 3\n"
    "filters = 2\n"
    "kernels = 5\n"
    "train_frac = 0.5\n"
    "val_frac = 0.25\n"
    "eval_repeats = 1\n"
    "seed = 11\n";

}  // namespace

TEST_CASE("help exits 0, usage errors exit 2") {
    auto dir = scratch_dir("usage");
    CHECK(run_cli("--help", dir).exit_code == 0);
    CHECK(run_cli("train --help", dir).exit_code == 0);
    CHECK(run_cli("no-such-command", dir).exit_code == 2);
    CHECK(run_cli("", dir).exit_code == 2);           // subcommand required
    CHECK(run_cli("match --db x", dir).exit_code == 2);  // missing required options
}

TEST_CASE("missing files are runtime errors, exit 1") {
    auto dir = scratch_dir("missing");
    auto r = run_cli("preprocess --in nope.spcd --out x.spcd", dir);
    CHECK(r.exit_code == 1);
    auto r2 = run_cli("db list --db nope.spdb", dir);
    CHECK(r2.exit_code == 1);
}

TEST_CASE("ingest groups by name header, skips malformed files, and is stable") {
    auto dir = scratch_dir("ingest");
    write_corpus(dir);
    auto r = run_cli("ingest --dir . --out cache.spcd --length 256", dir);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("2 classes") != std::string::npos);
    CHECK(r.output.find("3 samples") != std::string::npos);
    CHECK(r.output.find("broken.txt") != std::string::npos);  // warned, not fatal

    Dataset ds = read_dataset_cache((dir / "cache.spcd").string());
    CHECK(ds.n_classes() == 2);
    CHECK(ds.spectra.size() == 3);
    CHECK(ds.class_names.at(0) == "Albite");
    CHECK(ds.class_names.at(1) == "Quartz");
    CHECK(ds.class_index.at(0).size() == 2);
    for (const auto& s : ds.spectra)
        CHECK(s.intensities.size() == 256);

    // a second run over the same directory reproduces the cache byte for byte
    const std::string first = slurp(dir / "cache.spcd");
    CHECK(run_cli("ingest --dir . --out cache2.spcd --length 256", dir).exit_code == 0);
    CHECK(slurp(dir / "cache2.spcd") == first);
}

TEST_CASE("ingest with no parseable file is a runtime error") {
    auto dir = scratch_dir("ingest_empty");
    write_file(dir / "junk.txt", "garbage\n");
    auto r = run_cli("ingest --dir . --out cache.spcd", dir);
    CHECK(r.exit_code == 1);
}

TEST_CASE("synth + preprocess round trip through caches") {
    auto dir = scratch_dir("pre");
    auto r = run_cli(
        "synth --classes 4 --samples 3 --length 64 --baseline-degree 3 --seed 2"
        " --out raw.spcd",
        dir);
    CHECK(r.exit_code == 0);
    auto r2 = run_cli("preprocess --in raw.spcd --out flat.spcd", dir);
    CHECK(r2.exit_code == 0);
    Dataset raw = read_dataset_cache((dir / "raw.spcd").string());
    Dataset flat = read_dataset_cache((dir / "flat.spcd").string());
    CHECK(flat.spectra.size() == raw.spectra.size());
    CHECK(flat.spectra[0].intensities != raw.spectra[0].intensities);
}

TEST_CASE("train rejects an unknown config key with exit 2, naming the key") {
    auto dir = scratch_dir("badkey");
    write_file(dir / "cfg.txt", "data = x.spcd\nbogus_knob = 3\n");
    auto r = run_cli("train --config cfg.txt", dir);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("bogus_knob") != std::string::npos);
}

TEST_CASE("pipeline dry run prints the plan and writes nothing") {
    auto dir = scratch_dir("dryrun");
    write_file(dir / "cfg.txt", kPipelineConfig);
    auto r = run_cli("pipeline --config cfg.txt --dry-run", dir);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("run/model.ssnm") != std::string::npos);
    CHECK(!fs::exists(dir / "run"));
}

TEST_CASE("pipeline produces model, db, reports, and manifest; match ranks a query") {
    auto dir = scratch_dir("pipeline");
    write_file(dir / "cfg.txt", kPipelineConfig);
    auto r = run_cli("pipeline --config cfg.txt", dir);
    CHECK(r.exit_code == 0);
    for (const char* artifact :
         {"run/data.spcd", "run/model.ssnm", "run/train_report.csv", "run/refs.spdb",
          "run/eval_report.csv", "run/manifest.json"})
        CHECK(fs::exists(dir / artifact));

    // every report is stamped with version, config hash, and seed
    const std::string train_csv = slurp(dir / "run/train_report.csv");
    CHECK(train_csv.rfind("# specmatch 0.1.0 config=", 0) == 0);
    CHECK(train_csv.find("seed=11") != std::string::npos);
    CHECK(train_csv.find("epoch,train_loss,val_loss,lr") != std::string::npos);
    const std::string manifest = slurp(dir / "run/manifest.json");
    CHECK(manifest.find("\"seed\": 11") != std::string::npos);
    CHECK(manifest.find("\"tool_version\"") != std::string::npos);

    // same config, fresh directory: byte-identical artifacts (single thread)
    auto dir2 = scratch_dir("pipeline_repeat");
    write_file(dir2 / "cfg.txt", kPipelineConfig);
    CHECK(run_cli("pipeline --config cfg.txt", dir2).exit_code == 0);
    for (const char* artifact : {"run/model.ssnm", "run/refs.spdb",
                                 "run/train_report.csv", "run/eval_report.csv"})
        CHECK(slurp(dir / artifact) == slurp(dir2 / artifact));

    // feed one cached spectrum back through match against the pipeline's db
    Dataset ds = read_dataset_cache((dir / "run/data.spcd").string());
    RawSpectrum raw;
    for (int i = 0; i < ds.spectra[0].grid.length; ++i)
        raw.points.emplace_back(ds.spectra[0].grid.point(i),
                                ds.spectra[0].intensities[i]);
    write_file(dir / "query.txt", serialize_rruff(raw));
    auto m = run_cli(
        "match --db run/refs.spdb --model run/model.ssnm --query query.txt --top 3",
        dir);
    CHECK(m.exit_code == 0);
    CHECK(m.output.find("rank\tclass_id\tscore") != std::string::npos);
    // 3 ranked rows follow the header
    CHECK(m.output.find("\n1\t") != std::string::npos);
    CHECK(m.output.find("\n3\t") != std::string::npos);

    auto ex = run_cli(
        "export-features --model run/model.ssnm --data run/data.spcd --out f.csv", dir);
    CHECK(ex.exit_code == 0);
    CHECK(fs::exists(dir / "f.csv"));
}

TEST_CASE("db add/remove/list manage classes through files") {
    auto dir = scratch_dir("db");
    write_file(dir / "cfg.txt", kPipelineConfig);
    REQUIRE(run_cli("pipeline --config cfg.txt", dir).exit_code == 0);

    auto lst = run_cli("db list --db run/refs.spdb", dir);
    CHECK(lst.exit_code == 0);
    CHECK(lst.output.find("snapshot ") != std::string::npos);
    CHECK(lst.output.find("5 reference(s)") != std::string::npos);

    auto rm = run_cli("db remove --db run/refs.spdb --class-id 0", dir);
    CHECK(rm.exit_code == 0);
    CHECK(rm.output.find("7 classes") != std::string::npos);
    CHECK(run_cli("db remove --db run/refs.spdb --class-id 0", dir).exit_code == 1);

    auto add = run_cli(
        "db add --db run/refs.spdb --model run/model.ssnm --data run/data.spcd", dir);
    CHECK(add.exit_code == 0);
    CHECK(add.output.find("8 classes") != std::string::npos);
}
