#include "uwaeq/harness.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace uwaeq {
namespace {

const std::vector<std::string> kMethods{"zf", "mmse", "dfe", "ml", "zf-full", "mmse-full", "udnet"};

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
        throw ParameterError(key + ": expected a number, got '" + value + "'");
    return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
        throw ParameterError(key + ": expected a non-negative integer, got '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ParameterError(key + ": expected true/false, got '" + value + "'");
}

}  // namespace

bool is_known_method(const std::string& name) {
    return std::find(kMethods.begin(), kMethods.end(), name) != kMethods.end();
}

void ExperimentConfig::validate() const {
    ofdm.validate();
    channel.synth.validate();
    if (channel.files.empty() && channel.cir_count < 2)
        throw ParameterError("channel.cir_count must be >= 2 so both splits are nonempty");
    if (channel.files.empty() && channel.cir_length < ofdm.n_subcarriers + ofdm.cp_len)
        throw ParameterError("channel.cir_length must cover one CP-extended symbol (" +
                             std::to_string(ofdm.n_subcarriers + ofdm.cp_len) + " samples)");
    if (channel.synth.tap_count > ofdm.cp_len + 1)
        throw ParameterError("channel.taps = " + std::to_string(channel.synth.tap_count) +
                             " needs ofdm.cp >= " + std::to_string(channel.synth.tap_count - 1));
    if (!(split_fraction > 0.0 && split_fraction < 1.0))
        throw ParameterError("dataset.split must lie strictly between 0 and 1");
    if (snr_list_db.empty()) throw ParameterError("sweep.snr list is empty");
    if (equalizers.empty()) throw ParameterError("sweep.methods list is empty");
    for (const auto& m : equalizers)
        if (!is_known_method(m)) throw ParameterError("unknown equalizer '" + m + "'");
    if (block_size == 0 || ofdm.n_subcarriers % block_size != 0)
        throw ParameterError("sweep.block_size must divide ofdm.subcarriers");
    if (!(csi_sigma >= 0.0)) throw ParameterError("sweep.csi_sigma must be >= 0");
    if (clipping && !(*clipping > 0.0)) throw ParameterError("sweep.clipping must be > 0");
    if (trials_per_point == 0) throw ParameterError("sweep.trials must be >= 1");
    if (max_trials < trials_per_point) throw ParameterError("sweep.max_trials must be >= sweep.trials");
    if (layers == 0) throw ParameterError("udnet.layers must be >= 1");
    noise.validate();
    train.validate();
}

void set_option(ExperimentConfig& cfg, const std::string& raw_key, const std::string& value) {
    const std::string key = trim(raw_key);
    auto num = [&] { return parse_double(key, value); };
    auto uint = [&] { return static_cast<std::size_t>(parse_uint(key, value)); };

    if (key == "ofdm.subcarriers") cfg.ofdm.n_subcarriers = uint();
    else if (key == "ofdm.cp") cfg.ofdm.cp_len = uint();
    else if (key == "channel.id") cfg.channel.id = trim(value);
    else if (key == "channel.taps") cfg.channel.synth.tap_count = uint();
    else if (key == "channel.decay_db") cfg.channel.synth.delay_power_decay_db = num();
    else if (key == "channel.doppler") cfg.channel.synth.doppler_spread = num();
    else if (key == "channel.doppler_norm") {
        // Doppler spread as a fraction of the subcarrier spacing.
        cfg.channel.synth.doppler_spread = num() / static_cast<double>(cfg.ofdm.n_subcarriers);
    } else if (key == "channel.count") cfg.channel.cir_count = uint();
    else if (key == "channel.length") cfg.channel.cir_length = uint();
    else if (key == "channel.files") {
        cfg.channel.files.clear();
        for (const auto& f : split_list(value)) cfg.channel.files.emplace_back(f);
    } else if (key == "channel.quasi_static") cfg.channel.quasi_static = parse_bool(key, value);
    else if (key == "dataset.split") cfg.split_fraction = num();
    else if (key == "sweep.snr") {
        cfg.snr_list_db.clear();
        for (const auto& s : split_list(value)) cfg.snr_list_db.push_back(parse_double(key, s));
    } else if (key == "sweep.methods") cfg.equalizers = split_list(value);
    else if (key == "sweep.block_size") cfg.block_size = uint();
    else if (key == "sweep.csi_sigma") cfg.csi_sigma = num();
    else if (key == "sweep.clipping") {
        const std::string v = trim(value);
        if (v.empty() || v == "none" || v == "off") cfg.clipping.reset();
        else cfg.clipping = num();
    } else if (key == "sweep.trials") cfg.trials_per_point = uint();
    else if (key == "sweep.min_errors") cfg.min_errors = uint();
    else if (key == "sweep.max_trials") cfg.max_trials = uint();
    else if (key == "sweep.seed" || key == "seed") cfg.seed = parse_uint(key, value);
    else if (key == "noise.kind") cfg.noise.kind = noise_kind_from_string(trim(value));
    else if (key == "noise.alpha") cfg.noise.alpha = num();
    else if (key == "noise.beta") cfg.noise.beta = num();
    else if (key == "noise.scale") cfg.noise.scale = num();
    else if (key == "noise.path") cfg.noise.path = trim(value);
    else if (key == "udnet.layers") cfg.layers = uint();
    else if (key == "udnet.hidden") cfg.hidden_dim = uint();
    else if (key == "udnet.model") cfg.model_path = trim(value);
    else if (key == "train.lr") cfg.train.learning_rate = num();
    else if (key == "train.lr_decay") cfg.train.lr_decay = num();
    else if (key == "train.batch") cfg.train.batch_size = uint();
    else if (key == "train.epochs") cfg.train.epochs = uint();
    else if (key == "train.steps_per_epoch") cfg.train.steps_per_epoch = uint();
    else if (key == "train.snr") cfg.train.train_snr_db = num();
    else if (key == "train.beta1") cfg.train.adam_beta1 = num();
    else if (key == "train.beta2") cfg.train.adam_beta2 = num();
    else if (key == "train.epsilon") cfg.train.adam_epsilon = num();
    else if (key == "train.seed") cfg.train.seed = parse_uint(key, value);
    else throw ParameterError("unknown configuration key '" + key + "'");
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
    ExperimentConfig cfg;
    // ofdm first so channel.doppler_norm sees the final N regardless of file order
    if (auto ofdm = tree.get_child_optional("ofdm"))
        for (const auto& [key, node] : *ofdm) set_option(cfg, "ofdm." + key, node.data());
    for (const auto& [section, children] : tree) {
        if (section == "ofdm") continue;
        if (children.empty()) {
            set_option(cfg, section, children.data());
            continue;
        }
        for (const auto& [key, node] : children) set_option(cfg, section + "." + key, node.data());
    }
    return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["ofdm"] = {{"subcarriers", cfg.ofdm.n_subcarriers}, {"cp", cfg.ofdm.cp_len}};
    std::vector<std::string> files;
    for (const auto& f : cfg.channel.files) files.push_back(f.string());
    j["channel"] = {{"id", cfg.channel.id},
                    {"taps", cfg.channel.synth.tap_count},
                    {"decay_db", cfg.channel.synth.delay_power_decay_db},
                    {"doppler", cfg.channel.synth.doppler_spread},
                    {"count", cfg.channel.cir_count},
                    {"length", cfg.channel.cir_length},
                    {"files", files},
                    {"quasi_static", cfg.channel.quasi_static}};
    j["dataset"] = {{"split", cfg.split_fraction}};
    j["sweep"] = {{"snr", cfg.snr_list_db},
                  {"methods", cfg.equalizers},
                  {"block_size", cfg.block_size},
                  {"csi_sigma", cfg.csi_sigma},
                  {"clipping", cfg.clipping ? nlohmann::json(*cfg.clipping) : nlohmann::json(nullptr)},
                  {"trials", cfg.trials_per_point},
                  {"min_errors", cfg.min_errors},
                  {"max_trials", cfg.max_trials},
                  {"seed", cfg.seed}};
    j["noise"] = {{"kind", to_string(cfg.noise.kind)},
                  {"alpha", cfg.noise.alpha},
                  {"beta", cfg.noise.beta},
                  {"scale", cfg.noise.scale},
                  {"path", cfg.noise.path.string()}};
    j["udnet"] = {{"layers", cfg.layers}, {"hidden", cfg.resolved_hidden_dim()}, {"model", cfg.model_path.string()}};
    j["train"] = {{"lr", cfg.train.learning_rate},
                  {"lr_decay", cfg.train.lr_decay},
                  {"batch", cfg.train.batch_size},
                  {"epochs", cfg.train.epochs},
                  {"steps_per_epoch", cfg.train.steps_per_epoch},
                  {"snr", cfg.train.train_snr_db},
                  {"beta1", cfg.train.adam_beta1},
                  {"beta2", cfg.train.adam_beta2},
                  {"epsilon", cfg.train.adam_epsilon},
                  {"seed", cfg.train.seed}};
    return j;
}

}  // namespace uwaeq
