// Command-line front end: runs one experiment and writes its trace.
//
//   smm deconv2d --config run.cfg --seed 7 --blocksize 128 --out trace.csv
//
// Without --out the CSV goes to stdout. Failures print one JSON line on stderr.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "smm/errors.hpp"
#include "smm/harness/config.hpp"
#include "smm/harness/experiment.hpp"

namespace {

using smm::harness::ExperimentConfig;
using smm::harness::ExperimentKind;

struct Overrides {
    std::string config;
    std::optional<std::string> seed, vartheta, strategy, blocksize, penalty, lambda, delta, kappa,
        method, tau, out;
    bool no_timing = false;
};

int fail(const char* kind, const std::string& message, int code,
         std::optional<std::int64_t> iteration = std::nullopt) {
    nlohmann::json j;
    j["error"] = kind;
    j["message"] = message;
    if (iteration) j["iteration"] = *iteration;
    std::cerr << j.dump() << '\n';
    return code;
}

void add_options(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "key = value config file");
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--vartheta", o.vartheta, "forgetting factor in (0, 1]");
    sub->add_option("--strategy", o.strategy, "gradient | memory-gradient | full");
    sub->add_option("--blocksize", o.blocksize, "block size Q");
    sub->add_option("--penalty", o.penalty, "penalty kind");
    sub->add_option("--lambda", o.lambda, "penalty weight");
    sub->add_option("--delta", o.delta, "penalty scale");
    sub->add_option("--kappa", o.kappa, "penalty exponent");
    sub->add_option("--method", o.method, "s3mg | sgd");
    sub->add_option("--tau", o.tau, "V0 = tau I");
    sub->add_option("--out", o.out, "CSV output path (sidecar gets .json)");
    sub->add_flag("--no-timing", o.no_timing, "write zero wall times");
}

ExperimentConfig resolve(ExperimentKind kind, const Overrides& o) {
    ExperimentConfig c = o.config.empty() ? ExperimentConfig::defaults(kind)
                                          : smm::harness::load_config(o.config, kind);
    const std::pair<const char*, const std::optional<std::string>*> keys[] = {
        {"seed", &o.seed},       {"vartheta", &o.vartheta}, {"strategy", &o.strategy},
        {"Q", &o.blocksize},     {"penalty", &o.penalty},   {"lambda", &o.lambda},
        {"delta", &o.delta},     {"kappa", &o.kappa},       {"method", &o.method},
        {"tau", &o.tau},         {"output_path", &o.out},
    };
    for (const auto& [key, value] : keys) {
        if (*value) c.set(key, **value);
    }
    if (o.no_timing) c.record_timing = false;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic majorize-minimize subspace experiments"};
    app.require_subcommand(1);
    Overrides o;
    std::optional<ExperimentKind> chosen;
    for (ExperimentKind kind : {ExperimentKind::Deconv2d, ExperimentKind::Adaptive, ExperimentKind::Synthetic}) {
        CLI::App* sub = app.add_subcommand(std::string(smm::harness::experiment_name(kind)));
        add_options(sub, o);
        sub->callback([&chosen, kind] { chosen = kind; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        const ExperimentConfig config = resolve(*chosen, o);
        const smm::harness::RunTrace trace = smm::harness::run_experiment(config);
        if (config.output_path.empty()) {
            smm::harness::write_trace_csv(std::cout, trace);
        } else {
            smm::harness::write_outputs(config, trace);
        }
    } catch (const smm::harness::ConfigError& e) {
        return fail("config", e.what(), 2);
    } catch (const smm::DivergenceError& e) {
        return fail("divergence", e.what(), 3, e.iteration());
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), 1);
    }
    return 0;
}
