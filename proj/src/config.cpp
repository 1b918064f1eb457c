#include "stpinn/config.hpp"

#include "stpinn/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace stpinn {

RunConfig RunConfig::defaults_for(std::string_view problem) {
    const ProblemDefaults d = problem_defaults(problem);
    RunConfig c;
    c.problem = std::string(problem);
    c.length = d.length;
    c.total_time = d.total_time;
    c.n_points = d.n_points;
    c.n_points_plot = d.n_points_plot;
    c.weights = d.weights;
    c.layers = d.layers;
    c.neurons = d.neurons;
    c.epochs = d.epochs;
    c.learning_rate = d.learning_rate;
    return c;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig t;
    t.box = box();
    t.n_points = n_points;
    t.sampling = sampling;
    t.seed = seed;
    t.weights = weights;
    t.epochs = epochs;
    t.learning_rate = learning_rate;
    t.mode = mode;
    t.stop_loss = stop_loss;
    t.report_every = report_every;
    return t;
}

ProblemSpec RunConfig::problem_spec() const { return make_problem(problem, coefficients, length); }

void RunConfig::validate() const {
    auto fail = [](std::string_view field, std::string_view why) {
        throw ConfigError(fmt::format("invalid {}: {}", field, why));
    };
    const auto& names = problem_names();
    if (std::find(names.begin(), names.end(), problem) == names.end())
        fail("PROBLEM", fmt::format("unknown problem '{}'", problem));
    if (!(length > 0.0) || !std::isfinite(length)) fail("LENGTH", "must be > 0");
    if (!(total_time > 0.0) || !std::isfinite(total_time)) fail("TOTAL_TIME", "must be > 0");
    if (n_points < (sampling == SamplingMode::grid ? 2 : 1))
        fail("N_POINTS", "must be >= 2 for grid sampling and >= 1 otherwise");
    if (n_points_plot < 2) fail("N_POINTS_PLOT", "must be >= 2");
    if (layers < 1) fail("LAYERS", "must be >= 1");
    if (neurons < 1) fail("NEURONS_PER_LAYER", "must be >= 1");
    if (epochs < 0) fail("EPOCHS", "must be >= 0");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("LEARNING_RATE", "must be > 0");
    if (report_every < 1) fail("REPORT_EVERY", "must be >= 1");
    if (stop_loss && !(*stop_loss >= 0.0)) fail("STOP_LOSS", "must be >= 0");
    for (auto [w, key] : {std::pair{weights.residual, "WEIGHT_RESIDUAL"},
                          std::pair{weights.initial, "WEIGHT_INITIAL"},
                          std::pair{weights.boundary, "WEIGHT_BOUNDARY"}})
        if (!(w >= 0.0) || !std::isfinite(w)) fail(key, "must be finite and >= 0");
    if (weights.residual == 0.0 && weights.initial == 0.0 && weights.boundary == 0.0)
        fail("WEIGHT_*", "weights must not all be zero");
    const auto& k = coefficients;
    if (!(k.epsilon > 0.0)) fail("EPSILON", "must be > 0");
    if (!(k.gravity > 0.0)) fail("GRAVITY", "must be > 0");
    if (!(k.kx > 0.0)) fail("KX", "must be > 0");
    if (!(k.ky > 0.0)) fail("KY", "must be > 0");
    if (!(k.rho > 0.0)) fail("RHO", "must be > 0");
}

namespace {

struct Entry {
    std::string value;
    bool quoted = false;
    int line = 0;
};

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void syntax(int line, std::string_view what) {
    throw ConfigError(fmt::format("config line {}: {}", line, what));
}

// Strips `_` digit separators ("150_000").
std::string digits(std::string_view key, const Entry& e) {
    std::string out;
    for (std::size_t i = 0; i < e.value.size(); ++i) {
        const char c = e.value[i];
        if (c == '_') {
            const bool between = i > 0 && i + 1 < e.value.size() &&
                                 std::isdigit(static_cast<unsigned char>(e.value[i - 1])) &&
                                 std::isdigit(static_cast<unsigned char>(e.value[i + 1]));
            if (!between)
                throw ConfigError(fmt::format("invalid {} (line {}): misplaced '_' in '{}'", key,
                                              e.line, e.value));
            continue;
        }
        out.push_back(c);
    }
    return out;
}

// from_chars takes no leading '+'; "+-1" stays invalid.
const char* skip_plus(const std::string& s) {
    return s.size() > 1 && s[0] == '+' && s[1] != '-' ? s.data() + 1 : s.data();
}

double as_double(std::string_view key, const Entry& e) {
    if (e.quoted) throw ConfigError(fmt::format("invalid {} (line {}): expected a number", key, e.line));
    const std::string s = digits(key, e);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(skip_plus(s), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(fmt::format("invalid {} (line {}): '{}' is not a number", key, e.line, e.value));
    return v;
}

template <class Int>
Int as_int(std::string_view key, const Entry& e) {
    if (e.quoted) throw ConfigError(fmt::format("invalid {} (line {}): expected an integer", key, e.line));
    const std::string s = digits(key, e);
    Int v{};
    const auto [ptr, ec] = std::from_chars(skip_plus(s), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(
            fmt::format("invalid {} (line {}): '{}' is not an integer", key, e.line, e.value));
    return v;
}

template <class F>
auto as_enum(std::string_view key, const Entry& e, F&& parse) {
    try {
        return parse(e.value);
    } catch (const UsageError& err) {
        throw ConfigError(fmt::format("invalid {} (line {}): {}", key, e.line, err.what()));
    }
}

// Coefficient keys and the problem each belongs to.
const std::map<std::string, std::string>& coefficient_owner() {
    static const std::map<std::string, std::string> owner{{"EPSILON", "heat"},
                                                          {"GRAVITY", "wave"},
                                                          {"KX", "thermal_inversion"},
                                                          {"KY", "thermal_inversion"},
                                                          {"RHO", "tumor"}};
    return owner;
}

void apply_coefficient(ProblemCoefficients& k, const std::string& key, const Entry& e) {
    const double v = as_double(key, e);
    if (key == "EPSILON") k.epsilon = v;
    else if (key == "GRAVITY") k.gravity = v;
    else if (key == "KX") k.kx = v;
    else if (key == "KY") k.ky = v;
    else if (key == "RHO") k.rho = v;
}

} // namespace

RunConfig parse_config(std::string_view text) {
    // section name ("" for top level) -> key -> entry
    std::map<std::string, std::map<std::string, Entry>> tables;
    tables[""];
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        // Drop comments outside quotes.
        bool in_quote = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quote = !in_quote;
            if (line[i] == '#' && !in_quote) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') syntax(line_no, "unterminated table header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            const auto& names = problem_names();
            if (std::find(names.begin(), names.end(), section) == names.end())
                syntax(line_no, fmt::format("unknown table [{}]", section));
            if (tables.contains(section)) syntax(line_no, fmt::format("duplicate table [{}]", section));
            tables[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) syntax(line_no, "expected KEY = VALUE");
        const std::string key = upper(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) syntax(line_no, "missing key");
        Entry e{std::string(value), false, line_no};
        if (!value.empty() && value.front() == '"') {
            if (value.size() < 2 || value.back() != '"') syntax(line_no, "unterminated string");
            e.value = std::string(value.substr(1, value.size() - 2));
            e.quoted = true;
        }
        if (e.value.empty() && !e.quoted) syntax(line_no, fmt::format("missing value for {}", key));
        auto& table = tables[section];
        if (table.contains(key)) syntax(line_no, fmt::format("duplicate key {}", key));
        table.emplace(key, std::move(e));
    }

    auto& top = tables[""];
    const auto problem_it = top.find("PROBLEM");
    if (problem_it == top.end()) throw ConfigError("missing required key PROBLEM");
    const std::string problem = problem_it->second.value;
    const auto& names = problem_names();
    if (std::find(names.begin(), names.end(), problem) == names.end())
        throw ConfigError(fmt::format("invalid PROBLEM (line {}): unknown problem '{}'",
                                      problem_it->second.line, problem));
    RunConfig c = RunConfig::defaults_for(problem);

    const auto& owner = coefficient_owner();
    for (const auto& [key, e] : top) {
        if (key == "PROBLEM") continue;
        if (key == "LENGTH") c.length = as_double(key, e);
        else if (key == "TOTAL_TIME") c.total_time = as_double(key, e);
        else if (key == "N_POINTS") c.n_points = as_int<int>(key, e);
        else if (key == "N_POINTS_PLOT") c.n_points_plot = as_int<int>(key, e);
        else if (key == "WEIGHT_RESIDUAL") c.weights.residual = as_double(key, e);
        else if (key == "WEIGHT_INITIAL") c.weights.initial = as_double(key, e);
        else if (key == "WEIGHT_BOUNDARY") c.weights.boundary = as_double(key, e);
        else if (key == "LAYERS") c.layers = as_int<int>(key, e);
        else if (key == "NEURONS_PER_LAYER") c.neurons = as_int<int>(key, e);
        else if (key == "EPOCHS") c.epochs = as_int<int>(key, e);
        else if (key == "LEARNING_RATE") c.learning_rate = as_double(key, e);
        else if (key == "ACTIVATION") c.activation = as_enum(key, e, parse_activation);
        else if (key == "SAMPLING") c.sampling = as_enum(key, e, parse_sampling_mode);
        else if (key == "SEED") c.seed = as_int<std::uint64_t>(key, e);
        else if (key == "OUTPUT_DIR") c.output_dir = e.value;
        else if (key == "TRAINING_MODE") c.mode = as_enum(key, e, parse_train_mode);
        else if (key == "STOP_LOSS") c.stop_loss = as_double(key, e);
        else if (key == "REPORT_EVERY") c.report_every = as_int<int>(key, e);
        else if (owner.contains(key)) {
            if (owner.at(key) != problem)
                throw ConfigError(fmt::format("invalid {} (line {}): applies to {}, not {}", key,
                                              e.line, owner.at(key), problem));
            apply_coefficient(c.coefficients, key, e);
        } else {
            throw ConfigError(fmt::format("unknown key {} (line {})", key, e.line));
        }
    }
    for (const auto& [name, table] : tables) {
        if (name.empty()) continue;
        for (const auto& [key, e] : table) {
            const auto it = owner.find(key);
            if (it == owner.end() || it->second != name)
                throw ConfigError(fmt::format("unknown key {} in [{}] (line {})", key, name, e.line));
            if (name != problem) continue;
            if (top.contains(key))
                throw ConfigError(fmt::format("{} given both at top level and in [{}]", key, name));
            apply_coefficient(c.coefficients, key, e);
        }
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string serialize_config(const RunConfig& c) {
    std::string out;
    auto line = [&out](std::string_view key, const auto& value) {
        out += fmt::format("{} = {}\n", key, value);
    };
    line("PROBLEM", fmt::format("\"{}\"", c.problem));
    line("LENGTH", c.length);
    line("TOTAL_TIME", c.total_time);
    line("N_POINTS", c.n_points);
    line("N_POINTS_PLOT", c.n_points_plot);
    line("WEIGHT_RESIDUAL", c.weights.residual);
    line("WEIGHT_INITIAL", c.weights.initial);
    line("WEIGHT_BOUNDARY", c.weights.boundary);
    line("LAYERS", c.layers);
    line("NEURONS_PER_LAYER", c.neurons);
    line("EPOCHS", c.epochs);
    line("LEARNING_RATE", c.learning_rate);
    line("ACTIVATION", fmt::format("\"{}\"", to_string(c.activation)));
    line("SAMPLING", fmt::format("\"{}\"", to_string(c.sampling)));
    line("SEED", c.seed);
    line("OUTPUT_DIR", fmt::format("\"{}\"", c.output_dir));
    line("TRAINING_MODE", fmt::format("\"{}\"", to_string(c.mode)));
    if (c.stop_loss) line("STOP_LOSS", *c.stop_loss);
    line("REPORT_EVERY", c.report_every);

    out += fmt::format("\n[{}]\n", c.problem);
    const auto& k = c.coefficients;
    if (c.problem == "heat") line("EPSILON", k.epsilon);
    if (c.problem == "wave") line("GRAVITY", k.gravity);
    if (c.problem == "thermal_inversion") {
        line("KX", k.kx);
        line("KY", k.ky);
    }
    if (c.problem == "tumor") line("RHO", k.rho);
    return out;
}

void apply_env_overrides(RunConfig& c) {
    const char* env = std::getenv("PINN_SEED");
    if (!env) return;
    const std::string_view s(env);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(fmt::format("invalid PINN_SEED '{}': expected an unsigned integer", s));
    c.seed = v;
}

} // namespace stpinn
