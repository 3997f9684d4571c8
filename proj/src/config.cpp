#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sdce/experiment.hpp"

namespace sdce {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value)
{
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

double to_double(const std::string& key, const std::string& value)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw InvalidArgument("config: " + key + " expects a number, got '" + value + "'");
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& value)
{
    Int v{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw InvalidArgument("config: " + key + " expects an integer, got '" + value + "'");
    }
    return v;
}

bool to_bool(const std::string& key, std::string value)
{
    std::transform(value.begin(), value.end(), value.begin(), [](unsigned char c) { return std::tolower(c); });
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw InvalidArgument("config: " + key + " expects a boolean, got '" + value + "'");
}

}  // namespace

void apply_config_entry(ExperimentConfig& config, const std::string& raw_key, const std::string& raw_value)
{
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    if (key == "n_tx") config.n_tx = to_integer<int>(key, value);
    else if (key == "n_rx") config.n_rx = to_integer<int>(key, value);
    else if (key == "t_p") config.t_p = to_integer<int>(key, value);
    else if (key == "t_u") config.t_u = to_integer<int>(key, value);
    else if (key == "t_d") config.t_d = to_integer<int>(key, value);
    else if (key == "constellation") config.constellation = parse_constellation(value);
    else if (key == "ebn0_db") {
        config.ebn0_db_list.clear();
        for (const auto& item : split_list(value)) {
            config.ebn0_db_list.push_back(to_double(key, item));
        }
    } else if (key == "estimators") {
        config.estimators.clear();
        for (const auto& item : split_list(value)) {
            config.estimators.push_back(parse_estimator(item));
        }
    } else if (key == "tree_depth") config.policy.tree_depth = to_integer<int>(key, value);
    else if (key == "n_sample") config.policy.n_sample = to_integer<int>(key, value);
    else if (key == "eta_roll") config.policy.eta_roll = to_double(key, value);
    else if (key == "gamma") config.policy.gamma = to_double(key, value);
    else if (key == "trials") config.trials = to_integer<int>(key, value);
    else if (key == "channel_mode") {
        if (value == "block") config.channel_mode = ChannelMode::block;
        else if (value == "gauss_markov") config.channel_mode = ChannelMode::gauss_markov;
        else throw InvalidArgument("config: unknown channel_mode '" + value + "'");
    } else if (key == "epsilon") config.epsilon = to_double(key, value);
    else if (key == "evolve_during_pilots") config.evolve_during_pilots = to_bool(key, value);
    else if (key == "seed") config.master_seed = to_integer<std::uint64_t>(key, value);
    else if (key == "threads") config.threads = to_integer<int>(key, value);
    else throw InvalidArgument("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text)
{
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        apply_config_entry(config, line.substr(0, eq), line.substr(eq + 1));
    }
    return config;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream file(path);
    if (!file) {
        throw InvalidArgument("cannot open config file " + path);
    }
    std::stringstream buffer;
    buffer << file.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace sdce
