#include "specmatch/dataset_cache.hpp"

#include <fstream>

#include "specmatch/errors.hpp"
#include "specmatch/serialize.hpp"

namespace specmatch {

namespace {
// v2 appends a class-name table after the spectra; v1 files are still read.
constexpr std::uint32_t kCacheVersion = 2;
}

void write_dataset_cache(const Dataset& ds, const std::string& path) {
    BinWriter w;
    w.u8('S'); w.u8('P'); w.u8('C'); w.u8('D');
    w.u32(kCacheVersion);
    GridSpec grid = ds.spectra.empty() ? GridSpec{} : ds.spectra.front().grid;
    w.f64(grid.start);
    w.f64(grid.end);
    w.f64(grid.step());
    w.u32(static_cast<std::uint32_t>(grid.length));
    w.u32(static_cast<std::uint32_t>(ds.spectra.size()));
    for (const auto& s : ds.spectra) {
        w.i32(s.class_id);
        w.str(s.sample_id);
        for (float v : s.intensities) w.f32(v);
    }
    w.u32(static_cast<std::uint32_t>(ds.class_names.size()));
    for (const auto& [cid, name] : ds.class_names) {
        w.i32(cid);
        w.str(name);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open " + path + " for writing");
    w.write_to(out, /*with_crc_trailer=*/false);
}

Dataset read_dataset_cache(const std::string& path) {
    BinReader r = BinReader::from_file(path);
    if (r.u8() != 'S' || r.u8() != 'P' || r.u8() != 'C' || r.u8() != 'D')
        throw IOError(path + ": not an SPCD cache");
    std::uint32_t version = r.u32();
    if (version != 1 && version != kCacheVersion)
        throw IOError(path + ": unsupported cache version " + std::to_string(version));
    GridSpec grid;
    grid.start = r.f64();
    grid.end = r.f64();
    r.f64();  // step, redundant with start/end/L
    grid.length = static_cast<int>(r.u32());
    std::uint32_t count = r.u32();
    Dataset ds;
    ds.spectra.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Spectrum s;
        s.class_id = r.i32();
        s.sample_id = r.str();
        s.grid = grid;
        s.intensities.resize(grid.length);
        for (auto& v : s.intensities) v = r.f32();
        ds.spectra.push_back(std::move(s));
    }
    if (version >= 2) {
        std::uint32_t names = r.u32();
        for (std::uint32_t i = 0; i < names; ++i) {
            int cid = r.i32();
            ds.class_names[cid] = r.str();
        }
    }
    ds.rebuild_index();
    return ds;
}

}  // namespace specmatch
