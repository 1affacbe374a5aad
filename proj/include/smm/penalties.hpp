#pragma once

#include <array>
#include <string>
#include <string_view>

namespace smm {

/// Smooth even potentials usable as half-quadratic penalty blocks.
enum class PenaltyKind {
    L2L1Log,        // |t| - d log(|t|/d + 1)
    Huber,
    Green,          // log cosh t
    L2LkappaPower,  // (1 + t^2/d^2)^(k/2) - 1
    Welsch,
    GemanMcClure,   // cubic-capped form, flat beyond sqrt(6) d
    TukeyBiweight,  // tanh(t^2 / (2 d^2))
    HyperbolicLog,  // log(1 + t^2/d^2)
    Cauchy,
};

inline constexpr std::array<PenaltyKind, 9> kAllPenaltyKinds = {
    PenaltyKind::L2L1Log,       PenaltyKind::Huber,        PenaltyKind::Green,
    PenaltyKind::L2LkappaPower, PenaltyKind::Welsch,       PenaltyKind::GemanMcClure,
    PenaltyKind::TukeyBiweight, PenaltyKind::HyperbolicLog, PenaltyKind::Cauchy,
};

/// Lowercase tag used in config files ("huber", "l2lkappa-power", ...).
std::string_view penalty_name(PenaltyKind kind);
PenaltyKind parse_penalty_kind(std::string_view name);

bool is_convex(PenaltyKind kind);
bool uses_kappa(PenaltyKind kind);

struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::Huber;
    double lambda = 1.0;
    double delta = 1.0;
    double kappa = 1.0;

    /// Throws std::invalid_argument unless lambda > 0, delta > 0 and, for the
    /// kappa families, kappa in [1, 2].
    void validate() const;
};

PenaltySpec make_penalty(PenaltyKind kind, double lambda, double delta, double kappa = 1.0);

/// psi(t). Throws std::domain_error on non-finite t.
double psi_eval(const PenaltySpec& spec, double t);

/// Half-quadratic weight nu(|t|) = psi'(t)/t, continuously extended at 0.
double nu_eval(const PenaltySpec& spec, double t);

/// psi'(t) = nu(|t|) t.
double psi_deriv(const PenaltySpec& spec, double t);

std::string describe(const PenaltySpec& spec);

}  // namespace smm
