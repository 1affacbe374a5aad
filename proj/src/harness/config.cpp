#include "smm/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace smm::harness {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
    return out;
}

double parse_real(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    bad_value(key, value);
}

}  // namespace

std::string_view experiment_name(ExperimentKind e) {
    switch (e) {
        case ExperimentKind::Deconv2d: return "deconv2d";
        case ExperimentKind::Adaptive: return "adaptive";
        case ExperimentKind::Synthetic: return "synthetic";
    }
    return "unknown";
}

ExperimentKind parse_experiment(std::string_view name) {
    for (ExperimentKind e : {ExperimentKind::Deconv2d, ExperimentKind::Adaptive, ExperimentKind::Synthetic}) {
        if (experiment_name(e) == name) return e;
    }
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

std::string_view method_name(Method m) { return m == Method::S3mg ? "s3mg" : "sgd"; }

Method parse_method(std::string_view name) {
    if (name == "s3mg") return Method::S3mg;
    if (name == "sgd") return Method::Sgd;
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string_view operator_name(RegOperator op) {
    switch (op) {
        case RegOperator::Tv2d: return "tv2d";
        case RegOperator::Coordinate: return "coordinate";
        case RegOperator::None: return "none";
    }
    return "unknown";
}

RegOperator parse_operator(std::string_view name) {
    for (RegOperator op : {RegOperator::Tv2d, RegOperator::Coordinate, RegOperator::None}) {
        if (operator_name(op) == name) return op;
    }
    throw ConfigError("unknown regularizer operator '" + std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
    ExperimentConfig c;
    c.experiment = kind;
    switch (kind) {
        case ExperimentKind::Deconv2d:
            c.image_size = 256;
            c.kernel_size = 7;
            c.N = 49;
            c.Q = 64;
            c.L = 0;
            c.noise_sigma = 0.03;
            c.op = RegOperator::Tv2d;
            c.penalty = make_penalty(PenaltyKind::L2LkappaPower, 1e-4, 3e-2, 1.0);
            c.tau = 1e-10;
            c.vartheta = 1.0;
            c.sgd_step = 1e-3;
            break;
        case ExperimentKind::Adaptive:
            c.N = 200;
            c.Q = 1;
            c.L = 5000;
            c.noise_sigma = std::sqrt(0.05);
            c.op = RegOperator::Coordinate;
            c.penalty = make_penalty(PenaltyKind::Welsch, 2e-3, 0.05);
            c.tau = 0.0;
            c.vartheta = 0.995;
            c.sgd_step = 0.01;
            break;
        case ExperimentKind::Synthetic:
            break;
    }
    return c;
}

void ExperimentConfig::set(std::string_view key, std::string_view raw) {
    const std::string_view value = trim(raw);
    if (key == "experiment") {
        if (parse_experiment(value) != experiment) {
            throw ConfigError("config is for experiment '" + std::string(value) + "', not '" +
                              std::string(experiment_name(experiment)) + "'");
        }
    } else if (key == "method") {
        method = parse_method(value);
    } else if (key == "seed") {
        seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "N") {
        N = parse_int<Index>(key, value);
    } else if (key == "Q" || key == "blocksize") {
        Q = parse_int<Index>(key, value);
    } else if (key == "L") {
        L = parse_int<Index>(key, value);
    } else if (key == "epochs") {
        epochs = parse_int<Index>(key, value);
    } else if (key == "image_size") {
        image_size = parse_int<Index>(key, value);
    } else if (key == "kernel_size") {
        kernel_size = parse_int<Index>(key, value);
    } else if (key == "change_point") {
        change_point = parse_int<Index>(key, value);
    } else if (key == "nonzero_taps") {
        nonzero_taps = parse_int<Index>(key, value);
    } else if (key == "noise_sigma") {
        noise_sigma = parse_real(key, value);
    } else if (key == "noise_var") {
        const double var = parse_real(key, value);
        if (!(var >= 0.0)) bad_value(key, value);
        noise_sigma = std::sqrt(var);
    } else if (key == "vartheta") {
        vartheta = parse_real(key, value);
    } else if (key == "strategy") {
        try {
            strategy = parse_strategy(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "operator") {
        op = parse_operator(value);
    } else if (key == "penalty") {
        try {
            penalty.kind = parse_penalty_kind(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "lambda") {
        penalty.lambda = parse_real(key, value);
    } else if (key == "delta") {
        penalty.delta = parse_real(key, value);
    } else if (key == "kappa") {
        penalty.kappa = parse_real(key, value);
    } else if (key == "tau") {
        tau = parse_real(key, value);
    } else if (key == "sgd_step") {
        sgd_step = parse_real(key, value);
    } else if (key == "trace_objective") {
        trace_objective = parse_bool(key, value);
    } else if (key == "record_timing") {
        record_timing = parse_bool(key, value);
    } else if (key == "input") {
        input = std::string(value);
    } else if (key == "input_format") {
        if (value != "binary" && value != "csv") bad_value(key, value);
        input_format = std::string(value);
    } else if (key == "output_path" || key == "out") {
        output_path = std::string(value);
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
    if (experiment == ExperimentKind::Deconv2d) N = kernel_size * kernel_size;
}

void ExperimentConfig::validate() const {
    auto need = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(what);
    };
    need(N > 0, "N must be positive");
    need(Q > 0, "Q must be positive");
    need(L >= 0 && (L > 0 || experiment == ExperimentKind::Deconv2d), "L must be positive");
    need(epochs > 0, "epochs must be positive");
    need(vartheta > 0.0 && vartheta <= 1.0, "vartheta must lie in (0, 1]");
    need(noise_sigma >= 0.0, "noise_sigma must be nonnegative");
    need(tau >= 0.0, "tau must be nonnegative");
    need(sgd_step > 0.0, "sgd_step must be positive");
    need(change_point >= 0, "change_point must be nonnegative");
    if (experiment == ExperimentKind::Deconv2d && input.empty()) {
        need(kernel_size > 0 && kernel_size % 2 == 1, "kernel_size must be odd and positive");
        need(image_size >= kernel_size, "image_size must be at least kernel_size");
        need(Q <= image_size * image_size, "Q exceeds the number of pixels");
    }
    if (experiment == ExperimentKind::Adaptive && input.empty()) {
        need(Q == 1, "the adaptive experiment has Q = 1");
        need(N <= L, "the adaptive experiment needs N <= L");
        need(nonzero_taps > 0 && nonzero_taps <= N, "nonzero_taps must lie in [1, N]");
    }
    if (op == RegOperator::Tv2d) {
        need(experiment == ExperimentKind::Deconv2d, "operator tv2d needs the deconv2d experiment");
    }
    if (!input.empty()) need(!input_format.empty(), "input needs input_format (binary or csv)");
    if (op != RegOperator::None) {
        try {
            penalty.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
}

ExperimentConfig parse_config(std::istream& in, ExperimentKind kind) {
    ExperimentConfig c = ExperimentConfig::defaults(kind);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        c.set(trim(view.substr(0, eq)), view.substr(eq + 1));
    }
    return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentKind kind) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, kind);
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["experiment"] = experiment_name(c.experiment);
    j["method"] = method_name(c.method);
    j["seed"] = c.seed;
    j["N"] = c.N;
    j["Q"] = c.Q;
    j["L"] = c.L;
    j["epochs"] = c.epochs;
    if (c.experiment == ExperimentKind::Deconv2d) {
        j["image_size"] = c.image_size;
        j["kernel_size"] = c.kernel_size;
    }
    if (c.experiment == ExperimentKind::Adaptive) {
        j["change_point"] = c.resolved_change_point();
        j["nonzero_taps"] = c.nonzero_taps;
    }
    j["noise_sigma"] = c.noise_sigma;
    j["vartheta"] = c.vartheta;
    j["strategy"] = strategy_name(c.strategy);
    j["operator"] = operator_name(c.op);
    j["penalty"] = penalty_name(c.penalty.kind);
    j["lambda"] = c.penalty.lambda;
    j["delta"] = c.penalty.delta;
    j["kappa"] = c.penalty.kappa;
    j["tau"] = c.tau;
    if (c.method == Method::Sgd) j["sgd_step"] = c.sgd_step;
    j["trace_objective"] = c.trace_objective;
    j["record_timing"] = c.record_timing;
    if (!c.input.empty()) {
        j["input"] = c.input;
        j["input_format"] = c.input_format;
    }
    j["output_path"] = c.output_path;
    return j;
}

}  // namespace smm::harness
