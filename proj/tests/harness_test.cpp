#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "smm/errors.hpp"
#include "smm/harness/config.hpp"
#include "smm/harness/experiment.hpp"
#include "smm/harness/generators.hpp"
#include "smm/harness/regularizers.hpp"
#include "smm/harness/sample_io.hpp"
#include "smm/harness/sgd.hpp"
#include "test_support.hpp"

namespace smm::harness {
namespace {

// Zero-padded "same" convolution written directly from its definition.
MatrixXd convolve(const MatrixXd& x, const MatrixXd& k) {
    const Index K = k.rows();
    const Index c = K / 2;
    MatrixXd y = MatrixXd::Zero(x.rows(), x.cols());
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index j = 0; j < x.cols(); ++j) {
            for (Index a = 0; a < K; ++a) {
                for (Index b = 0; b < K; ++b) {
                    const Index ii = i + c - a;
                    const Index jj = j + c - b;
                    if (ii >= 0 && jj >= 0 && ii < x.rows() && jj < x.cols()) y(i, j) += k(a, b) * x(ii, jj);
                }
            }
        }
    }
    return y;
}

TEST(Deconv2d, GeneratedKernelAndImage) {
    const Deconv2dProblem p = Deconv2dProblem::generate(3, 40, 7, 0.03, 16);
    EXPECT_EQ(p.dim(), 49);
    EXPECT_EQ(p.size(), 100);
    EXPECT_NEAR(p.kernel().sum(), 1.0, 1e-14);
    EXPECT_GE(p.kernel().minCoeff(), 0.0);
    EXPECT_GE(p.image().minCoeff(), 0.0);
    EXPECT_LE(p.image().maxCoeff(), 1.0);
    // Noise level matches sigma.
    const MatrixXd noise = p.observed() - convolve(p.image(), p.kernel());
    const double sd = std::sqrt(noise.squaredNorm() / noise.size());
    EXPECT_NEAR(sd, 0.03, 0.003);
}

TEST(Deconv2d, BlocksReproduceObservations) {
    const Deconv2dProblem p = Deconv2dProblem::generate(4, 24, 5, 0.0, 7);
    const MatrixXd clean = convolve(p.image(), p.kernel());
    const VectorXd h = p.kernel_vector();
    for (Index k = 0; k < p.size(); ++k) {
        const Sample s = p.sample(k);
        for (Index q = 0; q < 7; ++q) {
            const Index pixel = k * 7 + q;
            const double want = clean(pixel / 24, pixel % 24);
            EXPECT_NEAR(s.X.col(q).dot(h), want, 1e-14);
            EXPECT_NEAR(s.y(q), want, 1e-14);
        }
    }
    EXPECT_EQ(p.size(), 24 * 24 / 7);
    EXPECT_THROW(p.sample(p.size()), std::out_of_range);
}

TEST(Deconv2d, DeltaKernelIsIdentity) {
    std::mt19937_64 rng(5);
    const MatrixXd image = testing::random_matrix(rng, 12, 12);
    MatrixXd kernel = MatrixXd::Zero(5, 5);
    kernel(2, 2) = 1.0;
    const Deconv2dProblem p(image, kernel, 0.0, 12, 1);
    EXPECT_EQ(p.observed(), image);
}

TEST(Deconv2d, InvalidSizes) {
    EXPECT_THROW(Deconv2dProblem::generate(1, 10, 4, 0.1, 4), std::invalid_argument);
    EXPECT_THROW(Deconv2dProblem::generate(1, 5, 7, 0.1, 4), std::invalid_argument);
    EXPECT_THROW(Deconv2dProblem::generate(1, 10, 3, 0.1, 0), std::invalid_argument);
    EXPECT_THROW(Deconv2dProblem::generate(1, 10, 3, -0.1, 4), std::invalid_argument);
}

TEST(Adaptive, TapDelayLineAndSwitch) {
    const AdaptiveFilterProblem p = AdaptiveFilterProblem::generate(8, 20, 300, 0.0, 150, 5);
    EXPECT_EQ(p.dim(), 20);
    EXPECT_EQ(p.size(), 300);
    EXPECT_EQ((p.first_filter().array() != 0.0).count(), 5);
    EXPECT_EQ((p.second_filter().array() != 0.0).count(), 5);
    EXPECT_GE(p.first_filter().cwiseAbs().maxCoeff(), 0.1);
    EXPECT_NE(p.first_filter(), p.second_filter());
    for (Index k = 0; k < p.size(); ++k) {
        const Sample s = p.sample(k);
        EXPECT_EQ(s.X.cwiseAbs(), MatrixXd::Ones(20, 1));
        const VectorXd& truth = k + 1 <= 150 ? p.first_filter() : p.second_filter();
        EXPECT_EQ(p.truth(k), truth);
        EXPECT_NEAR(s.X.col(0).dot(truth), s.y(0), 1e-14);
        if (k > 0) {
            EXPECT_EQ(s.X.col(0).head(19), p.sample(k - 1).X.col(0).tail(19));
        }
    }
    EXPECT_THROW(AdaptiveFilterProblem::generate(1, 30, 20, 0.1, 10), std::invalid_argument);
    EXPECT_THROW(AdaptiveFilterProblem::generate(1, 10, 20, 0.1, 10, 11), std::invalid_argument);
}

TEST(Synthetic, SeededAndShaped) {
    const SyntheticProblem a = SyntheticProblem::generate(9, 6, 3, 10, 0.0);
    const SyntheticProblem b = SyntheticProblem::generate(9, 6, 3, 10, 0.0);
    EXPECT_EQ(a.sample(4).X, b.sample(4).X);
    EXPECT_EQ(a.block_size(), 3);
    EXPECT_LT((a.sample(2).X.transpose() * a.truth(0) - a.sample(2).y).norm(), 1e-14);
}

TEST(TvRegularizer, Structure) {
    const Regularizer reg = build_isotropic_tv_regularizer(2, 2, 0.5, 0.2);
    EXPECT_EQ(reg.num_blocks(), 4);
    EXPECT_EQ(reg.penalty_rows(), 8);
    MatrixXd expected = MatrixXd::Zero(8, 4);
    expected(0, 0) = -1;  // pixel (0,0): right and down
    expected(0, 1) = 1;
    expected(1, 0) = -1;
    expected(1, 2) = 1;
    expected(3, 1) = -1;  // pixel (0,1): down only
    expected(3, 3) = 1;
    expected(4, 2) = -1;  // pixel (1,0): right only
    expected(4, 3) = 1;
    EXPECT_EQ(MatrixXd(reg.V()), expected);
}

TEST(TvRegularizer, ConstantKernel) {
    const double tau = 1e-10;
    const Regularizer reg = build_isotropic_tv_regularizer(5, 5, 0.3, 0.02, tau);
    const VectorXd h = VectorXd::Constant(25, 0.7);
    EXPECT_NEAR(regularizer_value(reg, h), 0.5 * tau * h.squaredNorm(), 1e-20);
    const VectorXd b = weight_vector(reg, h);
    for (Index i = 0; i < b.size(); ++i) EXPECT_DOUBLE_EQ(b(i), 0.3 / (0.02 * 0.02));
}

TEST(TvRegularizer, MatchesSquareRootForm) {
    std::mt19937_64 rng(10);
    const double lambda = 0.4;
    const double delta = 0.3;
    const Regularizer reg = build_isotropic_tv_regularizer(3, 4, lambda, delta, 0.0);
    const VectorXd h = testing::random_vector(rng, 12);
    double expected = 0.0;
    for (Index i = 0; i < 3; ++i) {
        for (Index j = 0; j < 4; ++j) {
            const double dx = j + 1 < 4 ? h(i * 4 + j + 1) - h(i * 4 + j) : 0.0;
            const double dy = i + 1 < 3 ? h((i + 1) * 4 + j) - h(i * 4 + j) : 0.0;
            expected += lambda * (std::sqrt(1.0 + (dx * dx + dy * dy) / (delta * delta)) - 1.0);
        }
    }
    EXPECT_NEAR(regularizer_value(reg, h), expected, 1e-13);
}

TEST(SparsityRegularizer, WelschCoordinatewise) {
    std::mt19937_64 rng(11);
    const Regularizer reg = build_sparsity_regularizer(9, 0.7, 0.4);
    EXPECT_EQ(regularizer_value(reg, VectorXd::Zero(9)), 0.0);
    EXPECT_TRUE(weight_vector(reg, VectorXd::Zero(9)).isApprox(VectorXd::Constant(9, 0.7 / 0.16), 1e-15));
    for (int t = 0; t < 20; ++t) {
        const VectorXd h = testing::random_vector(rng, 9, 3.0);
        double expected = 0.0;
        for (Index s = 0; s < 9; ++s) expected += 0.7 * (1.0 - std::exp(-h(s) * h(s) / (2 * 0.16)));
        EXPECT_NEAR(regularizer_value(reg, h), expected, 1e-13);
        EXPECT_LE(regularizer_value(reg, h), 0.7 * 9);
    }
    EXPECT_TRUE(reg.quadratic().is_scaled_identity());
    EXPECT_EQ(reg.quadratic().tau(), 0.0);
}

TEST(Sgd, Steps) {
    const VectorXd h = VectorXd::LinSpaced(3, 1, 3);
    EXPECT_EQ(sgd_step(h, VectorXd::Zero(3), 0.5, 4), h);
    EXPECT_THROW(sgd_step(h, h, 0.0, 1), std::invalid_argument);

    // N = 1, Psi = 0, data x = 2, y = 3: g = -x (y - x h) = 4h - 6.
    const Regularizer reg = Regularizer::zero(1);
    const Sample s{MatrixXd::Constant(1, 1, 2.0), VectorXd::Constant(1, 3.0)};
    VectorXd x = VectorXd::Zero(1);
    x = sgd_step(x, instantaneous_gradient(reg, s, x), 0.1, 1);  // 0 - 0.1 * (-6) = 0.6
    EXPECT_NEAR(x(0), 0.6, 1e-15);
    x = sgd_step(x, instantaneous_gradient(reg, s, x), 0.1, 2);  // 0.6 - 0.1/sqrt2 * (-3.6)
    EXPECT_NEAR(x(0), 0.6 + 0.36 / std::sqrt(2.0), 1e-15);
}

TEST(Sgd, GradientIncludesPenalty) {
    std::mt19937_64 rng(12);
    const Regularizer reg = testing::random_regularizer(rng, 5, PenaltyKind::Cauchy);
    const Sample s = testing::random_sample(rng, 5, 2);
    const VectorXd h = testing::random_vector(rng, 5);
    const VectorXd fd = testing::finite_difference_gradient(
        [&](const VectorXd& x) {
            return 0.5 * (s.y - s.X.transpose() * x).squaredNorm() + regularizer_value(reg, x);
        },
        h);
    EXPECT_LT((instantaneous_gradient(reg, s, h) - fd).norm(), 1e-6);
}

TEST(Metric, Nrmse) {
    const VectorXd t = VectorXd::LinSpaced(4, 1, 4);
    EXPECT_EQ(metric_nrmse(t, t), 0.0);
    EXPECT_DOUBLE_EQ(metric_nrmse(VectorXd::Zero(4), t), 1.0);
    EXPECT_DOUBLE_EQ(metric_nrmse(2 * t, t), 1.0);
    EXPECT_THROW(metric_nrmse(t, VectorXd::Zero(4)), std::invalid_argument);
    EXPECT_THROW(metric_nrmse(t, VectorXd::Zero(3)), DimensionError);
}

TEST(Config, ParsesAndOverrides) {
    std::istringstream in(
        "# comment\n"
        "experiment = adaptive\n"
        "seed = 42   # trailing\n"
        "noise_var = 0.04\n"
        "penalty = cauchy\n"
        "kappa = 1.5\n"
        "strategy = gradient\n"
        "record_timing = false\n");
    ExperimentConfig c = parse_config(in, ExperimentKind::Adaptive);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_DOUBLE_EQ(c.noise_sigma, 0.2);
    EXPECT_EQ(c.penalty.kind, PenaltyKind::Cauchy);
    EXPECT_EQ(c.strategy, SubspaceStrategy::GradientOnly);
    EXPECT_FALSE(c.record_timing);
    EXPECT_EQ(c.N, 200);
    EXPECT_EQ(c.resolved_change_point(), 2500);
    EXPECT_NO_THROW(c.validate());
    c.set("vartheta", "0.9");
    EXPECT_DOUBLE_EQ(c.vartheta, 0.9);
    const nlohmann::json j = to_json(c);
    EXPECT_EQ(j["penalty"], "cauchy");
    EXPECT_EQ(j["seed"], 42);
}

TEST(Config, Errors) {
    ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::Synthetic);
    EXPECT_THROW(c.set("colour", "blue"), ConfigError);
    EXPECT_THROW(c.set("N", "12x"), ConfigError);
    EXPECT_THROW(c.set("strategy", "newton"), ConfigError);
    EXPECT_THROW(c.set("experiment", "deconv2d"), ConfigError);
    c.set("vartheta", "1.2");
    EXPECT_THROW(c.validate(), ConfigError);
    c.set("vartheta", "1");
    c.set("N", "0");
    EXPECT_THROW(c.validate(), ConfigError);
    std::istringstream bad("seed 3\n");
    EXPECT_THROW(parse_config(bad, ExperimentKind::Synthetic), ConfigError);
    ExperimentConfig d = ExperimentConfig::defaults(ExperimentKind::Deconv2d);
    d.set("kernel_size", "5");
    EXPECT_EQ(d.N, 25);
    d.set("kernel_size", "4");
    EXPECT_THROW(d.validate(), ConfigError);
}

TEST(SampleIo, RoundTrip) {
    std::mt19937_64 rng(13);
    std::vector<Sample> samples;
    for (int k = 0; k < 5; ++k) samples.push_back(testing::random_sample(rng, 4, 3));
    samples[2].y(1) = 1e-300;
    samples[3].X(0, 0) = -0.1;
    {
        std::stringstream buf;
        write_samples_binary(buf, samples);
        EXPECT_EQ(buf.str().size(), 5u * 3 * 5 * 8);
        const auto back = read_samples_binary(buf, 4, 3);
        ASSERT_EQ(back.size(), 5u);
        for (int k = 0; k < 5; ++k) {
            EXPECT_EQ(back[k].X, samples[k].X);
            EXPECT_EQ(back[k].y, samples[k].y);
        }
    }
    {
        std::stringstream buf;
        buf << "# header\n";
        write_samples_csv(buf, samples);
        const auto back = read_samples_csv(buf, 4, 3);
        ASSERT_EQ(back.size(), 5u);
        for (int k = 0; k < 5; ++k) {
            EXPECT_EQ(back[k].X, samples[k].X);
            EXPECT_EQ(back[k].y, samples[k].y);
        }
    }
    std::stringstream truncated(std::string(8 * 7, '\0'));
    EXPECT_THROW(read_samples_binary(truncated, 4, 3), std::runtime_error);
    std::stringstream short_row("1,2,3\n");
    EXPECT_THROW(read_samples_csv(short_row, 4, 1), std::runtime_error);
}

ExperimentConfig small_config() {
    ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::Synthetic);
    c.N = 8;
    c.Q = 2;
    c.L = 120;
    c.record_timing = false;
    return c;
}

TEST(Experiment, TraceInvariantsAndDescent) {
    for (Method method : {Method::S3mg, Method::Sgd}) {
        ExperimentConfig c = small_config();
        c.method = method;
        c.sgd_step = 0.05;
        const RunTrace t = run_experiment(c);
        ASSERT_EQ(t.rows.size(), 120u);
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            EXPECT_EQ(t.rows[i].n, static_cast<Index>(i + 1));
            EXPECT_TRUE(std::isfinite(t.rows[i].objective));
            if (method == Method::S3mg) {
                const double slack = 1e-9 * (1 + std::abs(t.rows[i].objective));
                EXPECT_LE(t.rows[i].objective_next + 0.5 * t.rows[i].step_quadratic, t.rows[i].objective + slack);
            }
        }
        EXPECT_LT(t.rows.back().nrmse, method == Method::S3mg ? 0.05 : 0.3);
    }
}

TEST(Experiment, ZeroNoiseFullSpaceIdentifiesExactly) {
    ExperimentConfig c = small_config();
    c.noise_sigma = 0.0;
    c.strategy = SubspaceStrategy::FullSpace;
    c.op = RegOperator::None;
    c.tau = 0.0;
    c.Q = 1;
    c.L = 20;
    const RunTrace t = run_experiment(c);
    for (Index n = 8; n < 20; ++n) EXPECT_LT(t.rows[n].nrmse, 1e-10) << n;
}

TEST(Experiment, ReproducibleAndCsvRoundTrip) {
    ExperimentConfig c = small_config();
    c.epochs = 2;
    std::ostringstream a;
    std::ostringstream b;
    write_trace_csv(a, run_experiment(c));
    write_trace_csv(b, run_experiment(c));
    EXPECT_EQ(a.str(), b.str());

    const RunTrace t = run_experiment(c);
    ASSERT_EQ(t.rows.size(), 240u);
    std::istringstream in(a.str());
    const auto rows = read_trace_csv(in);
    ASSERT_EQ(rows.size(), t.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].n, t.rows[i].n);
        EXPECT_EQ(rows[i].objective, t.rows[i].objective);
        EXPECT_EQ(rows[i].grad_norm, t.rows[i].grad_norm);
        EXPECT_EQ(rows[i].nrmse, t.rows[i].nrmse);
        EXPECT_EQ(rows[i].objective_next, t.rows[i].objective_next);
        EXPECT_EQ(rows[i].step_quadratic, t.rows[i].step_quadratic);
    }
}

TEST(Experiment, RecordedInputAndOutputs) {
    const auto dir = std::filesystem::temp_directory_path() / "smm_harness_test";
    std::filesystem::create_directories(dir);
    const SyntheticProblem p = SyntheticProblem::generate(3, 5, 2, 30, 0.05);
    std::vector<Sample> samples;
    for (Index k = 0; k < p.size(); ++k) samples.push_back(p.sample(k));
    {
        std::ofstream out(dir / "samples.bin", std::ios::binary);
        write_samples_binary(out, samples);
    }
    ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::Synthetic);
    c.N = 5;
    c.Q = 2;
    c.L = 30;
    c.input = (dir / "samples.bin").string();
    c.input_format = "binary";
    c.output_path = (dir / "trace.csv").string();
    const RunTrace t = run_experiment(c);
    EXPECT_EQ(t.rows.size(), 30u);
    EXPECT_TRUE(std::isnan(t.rows.back().nrmse));
    write_outputs(c, t);
    std::ifstream side(dir / "trace.json");
    const nlohmann::json j = nlohmann::json::parse(side);
    EXPECT_EQ(j["summary"]["iterations"], 30);
    EXPECT_TRUE(j["summary"]["final_nrmse"].is_null());
    EXPECT_EQ(sidecar_path("/a/b/run.csv"), "/a/b/run.json");

    c.L = 31;
    EXPECT_THROW(run_experiment(c), std::out_of_range);
    std::filesystem::remove_all(dir);
}

TEST(Experiment, DivergingSgdReportsStep) {
    ExperimentConfig c = small_config();
    c.method = Method::Sgd;
    c.sgd_step = 50.0;
    try {
        run_experiment(c);
        FAIL() << "expected DivergenceError";
    } catch (const DivergenceError& e) {
        EXPECT_GE(e.iteration(), 1);
    }
}

}  // namespace
}  // namespace smm::harness
