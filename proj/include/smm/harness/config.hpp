#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "smm/engine.hpp"
#include "smm/penalties.hpp"

namespace smm::harness {

enum class ExperimentKind { Deconv2d, Adaptive, Synthetic };
enum class Method { S3mg, Sgd };
/// Linear operator inside the penalty blocks.
enum class RegOperator { Tv2d, Coordinate, None };

std::string_view experiment_name(ExperimentKind e);
ExperimentKind parse_experiment(std::string_view name);
std::string_view method_name(Method m);
Method parse_method(std::string_view name);
std::string_view operator_name(RegOperator op);
RegOperator parse_operator(std::string_view name);

/// Thrown for malformed or out-of-range configuration.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Synthetic;
    Method method = Method::S3mg;
    std::uint64_t seed = 1;

    Index N = 32;  // deconv2d: derived as kernel_size^2
    Index Q = 4;
    Index L = 2000;  // samples per pass; deconv2d: 0 means every full block of the image
    Index epochs = 1;

    Index image_size = 256;
    Index kernel_size = 7;
    Index change_point = 0;  // 0 means L / 2
    Index nonzero_taps = 16;
    double noise_sigma = 0.1;  // adaptive: standard deviation, noise_var = sigma^2

    double vartheta = 1.0;
    SubspaceStrategy strategy = SubspaceStrategy::MemoryGradient;

    RegOperator op = RegOperator::Coordinate;
    PenaltySpec penalty = make_penalty(PenaltyKind::Huber, 0.01, 0.1);
    double tau = 1e-3;

    double sgd_step = 0.1;
    bool trace_objective = true;
    bool record_timing = true;

    std::string input;         // optional recorded samples
    std::string input_format;  // "binary" or "csv"
    std::string output_path;   // CSV path; sidecar gets a .json extension

    /// Defaults of each experiment before any key is applied.
    static ExperimentConfig defaults(ExperimentKind kind);

    /// Applies one `key = value` assignment. Throws ConfigError.
    void set(std::string_view key, std::string_view value);

    /// Throws ConfigError unless all dimensions are positive, vartheta in (0, 1]
    /// and the penalty parameters are valid.
    void validate() const;

    Index resolved_change_point() const { return change_point > 0 ? change_point : L / 2; }
};

/// Parses `key = value` lines ('#' starts a comment) on top of the
/// experiment's defaults. The `experiment` key, if present, must agree with `kind`.
ExperimentConfig parse_config(std::istream& in, ExperimentKind kind);
ExperimentConfig load_config(const std::string& path, ExperimentKind kind);

nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace smm::harness
