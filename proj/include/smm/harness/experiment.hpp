#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "smm/harness/config.hpp"
#include "smm/harness/generators.hpp"
#include "smm/regularizer.hpp"

namespace smm::harness {

struct TraceRow {
    Index n = 0;
    double objective = 0.0;       // F_n(h_n)
    double grad_norm = 0.0;       // ||grad F_n(h_n)||
    double nrmse = 0.0;           // of h_{n+1} against the truth in force at n
    double wall_time_s = 0.0;     // cumulative, 0 when timing is off
    double objective_next = 0.0;  // F_n(h_{n+1})
    double step_quadratic = 0.0;  // (h_{n+1}-h_n)' A_n(h_n) (h_{n+1}-h_n); NaN for SGD
};

struct RunTrace {
    std::vector<TraceRow> rows;
    VectorXd estimate;  // last iterate
    VectorXd truth;     // truth in force at the last step (empty if unknown)
    double wall_time_s = 0.0;
};

/// Stream named by the config: generated, or read from `input`.
std::unique_ptr<SampleStream> make_stream(const ExperimentConfig& config);

/// Regularizer named by the config for an N-dimensional unknown.
Regularizer make_regularizer(const ExperimentConfig& config, Index n);

/// Runs config.L * config.epochs steps over `stream` (samples replayed cyclically
/// over the first L), through the S3MG engine or the SGD baseline. Throws
/// std::out_of_range when the stream holds fewer than L samples and
/// DivergenceError when the iterate blows up.
RunTrace run_stream(const ExperimentConfig& config, const SampleStream& stream,
                    const Regularizer& reg);

RunTrace run_experiment(const ExperimentConfig& config);

/// Header: n,objective,grad_norm,nrmse,nrmse_sq,wall_time_s,objective_next,step_quadratic.
/// Values use the shortest round-trip decimal form.
void write_trace_csv(std::ostream& out, const RunTrace& trace);
std::vector<TraceRow> read_trace_csv(std::istream& in);

nlohmann::json summary_json(const ExperimentConfig& config, const RunTrace& trace);

/// Path of the JSON sidecar belonging to a CSV path.
std::string sidecar_path(const std::string& csv_path);

/// Writes the CSV to config.output_path and the sidecar next to it.
void write_outputs(const ExperimentConfig& config, const RunTrace& trace);

}  // namespace smm::harness
