#include "driftcast/error.hpp"
#include "driftcast/protocol.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

namespace driftcast {

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
    case Strategy::Pseudo: return "pseudo";
    case Strategy::PseudoGamma: return "pseudo-gamma";
    case Strategy::Delayed: return "delayed";
    case Strategy::Frozen: return "frozen";
    }
    return "pseudo";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "pseudo") return Strategy::Pseudo;
    if (name == "pseudo-gamma") return Strategy::PseudoGamma;
    if (name == "delayed") return Strategy::Delayed;
    if (name == "frozen") return Strategy::Frozen;
    throw ConfigError("unknown strategy '" + std::string(name) + "' (expected pseudo|pseudo-gamma|delayed|frozen)");
}

double RunConfig::resolved_warmup_lr() const {
    if (warmup_lr) return *warmup_lr;
    return model.kind == "rnn" ? model.sgd.lr0 : 1e-3;
}

double RunConfig::resolved_eta0() const {
    if (eta0) return *eta0;
    return model.kind == "rnn" ? model.sgd.lr0 : 1e-5;
}

ModelConfig RunConfig::resolved_model() const {
    ModelConfig m = model;
    m.n = n;
    m.h = h;
    m.seed = seed;
    m.linear_mode = pseudo_mode;
    return m;
}

void RunConfig::validate() const {
    if (n < 2) throw ConfigError("n must be >= 2");
    if (h < 1) throw ConfigError("h must be >= 1");
    if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0)) {
        throw ConfigError("warmup_fraction must lie in (0, 1)");
    }
    if (!(resolved_warmup_lr() > 0.0)) throw ConfigError("warmup_lr must be > 0");
    if (!(resolved_eta0() > 0.0)) throw ConfigError("eta0 must be > 0");
    if (inner_update_epochs < 1) throw ConfigError("inner_update_epochs must be >= 1");
    if (model.mlp_hidden < 1 || model.rnn_hidden < 1) throw ConfigError("hidden sizes must be >= 1");
    if (!(model.rnn_dropout >= 0.0 && model.rnn_dropout < 1.0)) throw ConfigError("rnn_dropout must lie in [0, 1)");
    if (!(model.sgd.decay > 0.0 && model.sgd.decay <= 1.0)) throw ConfigError("sgd_decay must lie in (0, 1]");
    if (!(model.sgd.lr0 > 0.0)) throw ConfigError("sgd_lr0 must be > 0");
    if (!(model.adam.epsilon > 0.0)) throw ConfigError("adam_epsilon must be > 0");
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto* begin = value.data();
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

std::string num(double v) { return fmt::format("{}", v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

} // namespace

void RunConfig::set(std::string_view key, std::string_view raw) {
    const std::string_view value = trim(raw);
    using std::size_t;
    if (key == "n") n = parse_number<size_t>(key, value);
    else if (key == "h") h = parse_number<size_t>(key, value);
    else if (key == "warmup_fraction") warmup_fraction = parse_number<double>(key, value);
    else if (key == "warmup_epochs") warmup_epochs = parse_number<size_t>(key, value);
    else if (key == "warmup_lr") warmup_lr = value == "auto" ? std::nullopt : std::optional(parse_number<double>(key, value));
    else if (key == "eta0") eta0 = value == "auto" ? std::nullopt : std::optional(parse_number<double>(key, value));
    else if (key == "strategy") strategy = parse_strategy(value);
    else if (key == "pseudo_mode") pseudo_mode = parse_pseudo_mode(value);
    else if (key == "model") {
        const auto kinds = model_kinds();
        if (std::find(kinds.begin(), kinds.end(), value) == kinds.end()) {
            throw ConfigError("unknown model '" + std::string(value) + "' (expected mlp|rnn|persistence|linear)");
        }
        model.kind = std::string(value);
    }
    else if (key == "mlp_hidden") model.mlp_hidden = parse_number<size_t>(key, value);
    else if (key == "rnn_hidden") model.rnn_hidden = parse_number<size_t>(key, value);
    else if (key == "rnn_dropout") model.rnn_dropout = parse_number<double>(key, value);
    else if (key == "adam_beta1") model.adam.beta1 = parse_number<double>(key, value);
    else if (key == "adam_beta2") model.adam.beta2 = parse_number<double>(key, value);
    else if (key == "adam_epsilon") model.adam.epsilon = parse_number<double>(key, value);
    else if (key == "sgd_lr0") model.sgd.lr0 = parse_number<double>(key, value);
    else if (key == "sgd_momentum") model.sgd.momentum = parse_number<double>(key, value);
    else if (key == "sgd_decay") model.sgd.decay = parse_number<double>(key, value);
    else if (key == "sgd_decay_steps") model.sgd.decay_steps = parse_number<std::uint64_t>(key, value);
    else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
    else if (key == "inner_update_epochs") inner_update_epochs = parse_number<size_t>(key, value);
    else if (key == "pretrain_series") pretrain_series = std::string(value);
    else if (key == "record_timing") record_timing = parse_bool(key, value);
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::to_key_values() const {
    return {
        {"n", num(std::uint64_t{n})},
        {"h", num(std::uint64_t{h})},
        {"warmup_fraction", num(warmup_fraction)},
        {"warmup_epochs", num(std::uint64_t{warmup_epochs})},
        {"warmup_lr", num(resolved_warmup_lr())},
        {"eta0", num(resolved_eta0())},
        {"strategy", std::string(to_string(strategy))},
        {"pseudo_mode", std::string(to_string(pseudo_mode))},
        {"model", model.kind},
        {"mlp_hidden", num(std::uint64_t{model.mlp_hidden})},
        {"rnn_hidden", num(std::uint64_t{model.rnn_hidden})},
        {"rnn_dropout", num(model.rnn_dropout)},
        {"adam_beta1", num(model.adam.beta1)},
        {"adam_beta2", num(model.adam.beta2)},
        {"adam_epsilon", num(model.adam.epsilon)},
        {"sgd_lr0", num(model.sgd.lr0)},
        {"sgd_momentum", num(model.sgd.momentum)},
        {"sgd_decay", num(model.sgd.decay)},
        {"sgd_decay_steps", num(model.sgd.decay_steps)},
        {"seed", num(seed)},
        {"inner_update_epochs", num(std::uint64_t{inner_update_epochs})},
        {"pretrain_series", pretrain_series},
        {"record_timing", record_timing ? "true" : "false"},
    };
}

std::string RunConfig::get(std::string_view key) const {
    for (auto& [k, v] : to_key_values()) {
        if (k == key) return v;
    }
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

RunConfig RunConfig::parse(std::string_view text) {
    RunConfig config;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        try {
            config.set(trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string RunConfig::format() const {
    std::string out;
    for (const auto& [k, v] : to_key_values()) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

} // namespace driftcast
