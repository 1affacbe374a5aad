#include "smm/penalties.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace smm {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

void require_finite(double t, const char* where) {
    if (!std::isfinite(t)) {
        throw std::domain_error(std::string(where) + ": non-finite argument");
    }
}

// log(1 + x^2) without overflowing x^2.
double log1p_square(double x) {
    x = std::abs(x);
    if (x > 1e150) return 2.0 * std::log(x) + std::log1p(1.0 / (x * x));
    return std::log1p(x * x);
}

// x - log(1 + x) for x >= 0, accurate near zero.
double x_minus_log1p(double x) {
    if (x >= 0.5) return x - std::log1p(x);
    double term = x * x;
    double sum = 0.0;
    for (int k = 2; k < 200; ++k) {
        const double contrib = (k % 2 == 0 ? term : -term) / k;
        sum += contrib;
        if (std::abs(contrib) <= 1e-18 * sum) break;
        term *= x;
    }
    return sum;
}

// log cosh t guarded against cosh overflow.
double log_cosh(double t) {
    const double a = std::abs(t);
    if (a <= 1.0) {
        const double s = std::sinh(0.5 * a);
        return std::log1p(2.0 * s * s);
    }
    return a + std::log1p(std::exp(-2.0 * a)) - kLn2;
}

double sech_squared(double x) {
    const double e = std::exp(x);
    const double s = 2.0 / (e + 1.0 / e);
    return s * s;
}

// psi / lambda
double unit_psi(const PenaltySpec& p, double t) {
    const double a = std::abs(t);
    const double d = p.delta;
    switch (p.kind) {
        case PenaltyKind::L2L1Log:
            return d * x_minus_log1p(a / d);
        case PenaltyKind::Huber:
            return a <= d ? a * a : 2.0 * d * a - d * d;
        case PenaltyKind::Green:
            return log_cosh(a);
        case PenaltyKind::L2LkappaPower:
            return std::expm1(0.5 * p.kappa * log1p_square(a / d));
        case PenaltyKind::Welsch: {
            const double z = a / d;
            return -std::expm1(-0.5 * z * z);
        }
        case PenaltyKind::GemanMcClure: {
            if (a > std::sqrt(6.0) * d) return 1.0;
            const double x = a * a / (6.0 * d * d);
            return x * (3.0 - 3.0 * x + x * x);
        }
        case PenaltyKind::TukeyBiweight: {
            const double z = a / d;
            return std::tanh(0.5 * z * z);
        }
        case PenaltyKind::HyperbolicLog:
            return log1p_square(a / d);
        case PenaltyKind::Cauchy: {
            const double g = std::expm1(0.5 * p.kappa * log1p_square(a / (std::sqrt(2.0) * d)));
            return -std::expm1(-g);
        }
    }
    throw std::logic_error("unit_psi: unknown penalty kind");
}

// nu / lambda, a >= 0
double unit_nu(const PenaltySpec& p, double a) {
    const double d = p.delta;
    switch (p.kind) {
        case PenaltyKind::L2L1Log:
            return 1.0 / (a + d);
        case PenaltyKind::Huber:
            return a <= d ? 2.0 : 2.0 * d / a;
        case PenaltyKind::Green:
            return a == 0.0 ? 1.0 : std::tanh(a) / a;
        case PenaltyKind::L2LkappaPower:
            return p.kappa / (d * d) * std::exp((0.5 * p.kappa - 1.0) * log1p_square(a / d));
        case PenaltyKind::Welsch: {
            const double z = a / d;
            return std::exp(-0.5 * z * z) / (d * d);
        }
        case PenaltyKind::GemanMcClure: {
            if (a > std::sqrt(6.0) * d) return 0.0;
            const double w = 1.0 - a * a / (6.0 * d * d);
            return w * w / (d * d);
        }
        case PenaltyKind::TukeyBiweight: {
            const double z = a / d;
            return sech_squared(0.5 * z * z) / (d * d);
        }
        case PenaltyKind::HyperbolicLog: {
            const double z = a / d;
            if (z > 1e150) return 0.0;
            return 2.0 / (d * d * (1.0 + z * z));
        }
        case PenaltyKind::Cauchy: {
            const double lq = log1p_square(a / (std::sqrt(2.0) * d));
            const double g = std::expm1(0.5 * p.kappa * lq);
            return p.kappa / (2.0 * d * d) * std::exp((0.5 * p.kappa - 1.0) * lq - g);
        }
    }
    throw std::logic_error("unit_nu: unknown penalty kind");
}

}  // namespace

std::string_view penalty_name(PenaltyKind kind) {
    switch (kind) {
        case PenaltyKind::L2L1Log: return "l2l1-log";
        case PenaltyKind::Huber: return "huber";
        case PenaltyKind::Green: return "green";
        case PenaltyKind::L2LkappaPower: return "l2lkappa-power";
        case PenaltyKind::Welsch: return "welsch";
        case PenaltyKind::GemanMcClure: return "gemanmcclure";
        case PenaltyKind::TukeyBiweight: return "tukeybiweight";
        case PenaltyKind::HyperbolicLog: return "hyperboliclog";
        case PenaltyKind::Cauchy: return "cauchy";
    }
    return "unknown";
}

PenaltyKind parse_penalty_kind(std::string_view name) {
    for (PenaltyKind kind : kAllPenaltyKinds) {
        if (penalty_name(kind) == name) return kind;
    }
    throw std::invalid_argument("unknown penalty kind '" + std::string(name) + "'");
}

bool is_convex(PenaltyKind kind) {
    switch (kind) {
        case PenaltyKind::L2L1Log:
        case PenaltyKind::Huber:
        case PenaltyKind::Green:
        case PenaltyKind::L2LkappaPower:
            return true;
        default:
            return false;
    }
}

bool uses_kappa(PenaltyKind kind) {
    return kind == PenaltyKind::L2LkappaPower || kind == PenaltyKind::Cauchy;
}

void PenaltySpec::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("penalty lambda must be positive and finite");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("penalty delta must be positive and finite");
    }
    if (uses_kappa(kind) && !(kappa >= 1.0 && kappa <= 2.0)) {
        throw std::invalid_argument("penalty kappa must lie in [1, 2]");
    }
}

PenaltySpec make_penalty(PenaltyKind kind, double lambda, double delta, double kappa) {
    PenaltySpec spec{kind, lambda, delta, kappa};
    spec.validate();
    return spec;
}

double psi_eval(const PenaltySpec& spec, double t) {
    require_finite(t, "psi_eval");
    return spec.lambda * unit_psi(spec, t);
}

double nu_eval(const PenaltySpec& spec, double t) {
    require_finite(t, "nu_eval");
    return spec.lambda * unit_nu(spec, std::abs(t));
}

double psi_deriv(const PenaltySpec& spec, double t) {
    return nu_eval(spec, t) * t;
}

std::string describe(const PenaltySpec& spec) {
    std::ostringstream os;
    os << penalty_name(spec.kind) << "(lambda=" << spec.lambda << ", delta=" << spec.delta;
    if (uses_kappa(spec.kind)) os << ", kappa=" << spec.kappa;
    os << ")";
    return os.str();
}

}  // namespace smm
