#include "uwaeq/harness.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace uwaeq {
namespace {

constexpr std::uint64_t kPoolStream = 1;
constexpr std::uint64_t kSplitStream = 2;

std::string cir_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "cir_%05zu", i);
    return buf;
}

// Indices of the training CIRs after a seeded shuffle; the rest are test CIRs.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t count, double fraction,
                                                                            std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ParameterError("split fraction must lie strictly in (0, 1)");
    const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(count)));
    if (n_train == 0 || n_train >= count)
        throw ParameterError("split " + std::to_string(fraction) + " of " + std::to_string(count) +
                             " CIRs leaves an empty train or test set");
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng = derive_rng(seed, {kSplitStream});
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

}  // namespace

CirPool build_cir_pool(const ExperimentConfig& cfg) {
    std::vector<Cir> all;
    std::vector<std::string> ids;
    if (!cfg.channel.files.empty()) {
        for (const auto& f : cfg.channel.files) {
            all.push_back(load_cir(f));
            ids.push_back(f.stem().string());
        }
    } else {
        for (std::size_t i = 0; i < cfg.channel.cir_count; ++i) {
            Rng rng = derive_rng(cfg.seed, {kPoolStream, i});
            all.push_back(synth_cir(cfg.channel.synth, cfg.channel.cir_length, rng));
            ids.push_back(cir_name(i));
        }
    }
    if (cfg.channel.quasi_static)
        for (auto& c : all) c = quasi_static_collapse(c);
    const auto [train, test] = split_indices(all.size(), cfg.split_fraction, cfg.seed);
    CirPool pool;
    for (auto i : train) {
        pool.train.push_back(all[i]);
        pool.train_ids.push_back(ids[i]);
    }
    for (auto i : test) {
        pool.test.push_back(all[i]);
        pool.test_ids.push_back(ids[i]);
    }
    return pool;
}

nlohmann::json gen_dataset(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());
    const CirPool pool = build_cir_pool(cfg);

    nlohmann::json manifest;
    manifest["format"] = "UCIR1";
    manifest["seed"] = cfg.seed;
    manifest["split_fraction"] = cfg.split_fraction;
    manifest["config"] = to_json(cfg);
    auto write_set = [&](const std::vector<Cir>& cirs, const std::vector<std::string>& ids) {
        nlohmann::json list = nlohmann::json::array();
        for (std::size_t i = 0; i < cirs.size(); ++i) {
            const std::string file = ids[i] + ".ucir";
            save_cir(cirs[i], out_dir / file);
            list.push_back({{"id", ids[i]},
                            {"file", file},
                            {"samples", cirs[i].sample_count()},
                            {"taps", cirs[i].tap_count()}});
        }
        return list;
    };
    manifest["train"] = write_set(pool.train, pool.train_ids);
    manifest["test"] = write_set(pool.test, pool.test_ids);

    const auto manifest_path = out_dir / "manifest.json";
    std::ofstream out(manifest_path);
    if (!out) throw Error("cannot write " + manifest_path.string());
    out << manifest.dump(2) << '\n';
    if (!out) throw Error("failed writing " + manifest_path.string());
    spdlog::info("wrote {} train / {} test CIRs to {}", pool.train.size(), pool.test.size(), out_dir.string());
    return manifest;
}

CirPool load_dataset(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw Error("cannot open " + manifest_path.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(manifest_path.string() + ": " + e.what());
    }
    const auto dir = manifest_path.parent_path();
    CirPool pool;
    auto read_set = [&](const char* key, std::vector<Cir>& cirs, std::vector<std::string>& ids) {
        if (!manifest.contains(key) || !manifest[key].is_array())
            throw FormatError(manifest_path.string() + ": missing '" + key + "' list");
        for (const auto& entry : manifest[key]) {
            cirs.push_back(load_cir(dir / entry.at("file").get<std::string>()));
            ids.push_back(entry.at("id").get<std::string>());
        }
    };
    read_set("train", pool.train, pool.train_ids);
    read_set("test", pool.test, pool.test_ids);
    return pool;
}

}  // namespace uwaeq
