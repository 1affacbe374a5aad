#include "smm/harness/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "smm/engine.hpp"
#include "smm/errors.hpp"
#include "smm/harness/regularizers.hpp"
#include "smm/harness/sample_io.hpp"
#include "smm/harness/sgd.hpp"

namespace smm::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void write_number(std::ostream& out, double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    out.write(buf, res.ptr - buf);
}

double nrmse_or_nan(const VectorXd& est, const VectorXd& truth) {
    if (truth.size() == 0 || truth.norm() == 0.0) return kNaN;
    return metric_nrmse(est, truth);
}

class Clock {
  public:
    explicit Clock(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
    double elapsed() const {
        if (!enabled_) return 0.0;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::unique_ptr<SampleStream> make_stream(const ExperimentConfig& c) {
    c.validate();
    if (!c.input.empty()) {
        return std::make_unique<RecordedStream>(load_samples(c.input, c.input_format, c.N, c.Q));
    }
    switch (c.experiment) {
        case ExperimentKind::Deconv2d:
            return std::make_unique<Deconv2dProblem>(
                Deconv2dProblem::generate(c.seed, c.image_size, c.kernel_size, c.noise_sigma, c.Q));
        case ExperimentKind::Adaptive:
            return std::make_unique<AdaptiveFilterProblem>(AdaptiveFilterProblem::generate(
                c.seed, c.N, c.L, c.noise_sigma * c.noise_sigma, c.resolved_change_point(),
                c.nonzero_taps));
        case ExperimentKind::Synthetic:
            return std::make_unique<SyntheticProblem>(
                SyntheticProblem::generate(c.seed, c.N, c.Q, c.L, c.noise_sigma));
    }
    throw std::logic_error("make_stream: unknown experiment");
}

Regularizer make_regularizer(const ExperimentConfig& c, Index n) {
    switch (c.op) {
        case RegOperator::Tv2d: {
            if (c.kernel_size * c.kernel_size != n) {
                throw ConfigError("tv2d operator needs N = kernel_size^2");
            }
            return build_isotropic_tv_regularizer(c.kernel_size, c.kernel_size, c.penalty.lambda,
                                                  c.penalty.delta, c.tau, c.penalty.kappa);
        }
        case RegOperator::Coordinate:
            return build_coordinate_regularizer(n, c.penalty, c.tau);
        case RegOperator::None:
            return Regularizer(ElasticNet::scaled_identity(n, c.tau), {});
    }
    throw std::logic_error("make_regularizer: unknown operator");
}

RunTrace run_stream(const ExperimentConfig& c, const SampleStream& stream, const Regularizer& reg) {
    c.validate();
    require_dim(stream.dim() == reg.dim(), "run: stream and regularizer dimensions differ");
    const Index pass = c.L > 0 ? c.L : stream.size();
    if (pass > stream.size()) {
        throw std::out_of_range("run: stream holds " + std::to_string(stream.size()) +
                                " samples, " + std::to_string(pass) + " requested");
    }
    const Index total = pass * c.epochs;
    const Index N = reg.dim();

    RunTrace trace;
    trace.rows.reserve(total);
    Clock clock(c.record_timing);

    if (c.method == Method::S3mg) {
        OnlineEstimator est(reg, stream.block_size(), c.vartheta, c.strategy);
        StepOptions opts;
        opts.compute_objective = c.trace_objective;
        for (Index t = 0; t < total; ++t) {
            const Index k = t % pass;
            const IterationReport rep = est.step(stream.sample(k), opts);
            trace.truth = stream.truth(k);
            trace.rows.push_back(TraceRow{rep.n, rep.objective, rep.grad_norm,
                                          nrmse_or_nan(est.estimate(), trace.truth), clock.elapsed(),
                                          rep.objective_next, rep.step_quadratic});
        }
        trace.estimate = est.estimate();
    } else {
        MomentState m(N, stream.block_size(), c.vartheta);
        VectorXd h = VectorXd::Zero(N);
        for (Index t = 0; t < total; ++t) {
            const Index k = t % pass;
            const Sample s = stream.sample(k);
            m.update(s);
            TraceRow row;
            row.n = t + 1;
            row.objective = c.trace_objective ? objective_eval(m, reg, h) : kNaN;
            row.grad_norm = gradient_direct(m, reg, h).norm();
            VectorXd next = sgd_step(h, instantaneous_gradient(reg, s, h), c.sgd_step, t + 1);
            if (!next.allFinite() || next.norm() > StepOptions{}.divergence_bound) {
                throw DivergenceError(t + 1, "sgd iterate diverged at step " + std::to_string(t + 1));
            }
            row.objective_next = c.trace_objective ? objective_eval(m, reg, next) : kNaN;
            row.step_quadratic = kNaN;
            h = std::move(next);
            trace.truth = stream.truth(k);
            row.nrmse = nrmse_or_nan(h, trace.truth);
            row.wall_time_s = clock.elapsed();
            trace.rows.push_back(row);
        }
        trace.estimate = std::move(h);
    }
    trace.wall_time_s = clock.elapsed();
    return trace;
}

RunTrace run_experiment(const ExperimentConfig& c) {
    const std::unique_ptr<SampleStream> stream = make_stream(c);
    return run_stream(c, *stream, make_regularizer(c, stream->dim()));
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    out << "n,objective,grad_norm,nrmse,nrmse_sq,wall_time_s,objective_next,step_quadratic\n";
    for (const TraceRow& r : trace.rows) {
        out << r.n << ',';
        write_number(out, r.objective);
        out << ',';
        write_number(out, r.grad_norm);
        out << ',';
        write_number(out, r.nrmse);
        out << ',';
        write_number(out, r.nrmse * r.nrmse);
        out << ',';
        write_number(out, r.wall_time_s);
        out << ',';
        write_number(out, r.objective_next);
        out << ',';
        write_number(out, r.step_quadratic);
        out << '\n';
    }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trace csv: missing header");
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double f[8];
        const char* p = line.data();
        const char* end = p + line.size();
        for (int i = 0; i < 8; ++i) {
            const auto res = std::from_chars(p, end, f[i]);
            if (res.ec != std::errc()) throw std::runtime_error("trace csv: bad field in '" + line + "'");
            p = res.ptr;
            if (i < 7) {
                if (p == end || *p != ',') throw std::runtime_error("trace csv: short row '" + line + "'");
                ++p;
            }
        }
        if (p != end) throw std::runtime_error("trace csv: long row '" + line + "'");
        rows.push_back(TraceRow{static_cast<Index>(f[0]), f[1], f[2], f[3], f[5], f[6], f[7]});
    }
    return rows;
}

nlohmann::json summary_json(const ExperimentConfig& config, const RunTrace& trace) {
    nlohmann::json j;
    j["config"] = to_json(config);
    nlohmann::json s;
    s["iterations"] = trace.rows.size();
    auto finite_or_null = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); };
    if (!trace.rows.empty()) {
        const TraceRow& last = trace.rows.back();
        s["final_nrmse"] = finite_or_null(last.nrmse);
        s["final_objective"] = finite_or_null(last.objective_next);
        s["final_grad_norm"] = finite_or_null(last.grad_norm);
    }
    s["wall_time_s"] = trace.wall_time_s;
    j["summary"] = s;
    return j;
}

std::string sidecar_path(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    p.replace_extension(".json");
    return p.string();
}

void write_outputs(const ExperimentConfig& config, const RunTrace& trace) {
    if (config.output_path.empty()) throw ConfigError("output_path is empty");
    {
        std::ofstream out(config.output_path);
        if (!out) throw std::runtime_error("cannot write '" + config.output_path + "'");
        write_trace_csv(out, trace);
    }
    std::ofstream side(sidecar_path(config.output_path));
    if (!side) throw std::runtime_error("cannot write '" + sidecar_path(config.output_path) + "'");
    side << summary_json(config, trace).dump(2) << '\n';
}

}  // namespace smm::harness
