#include "episim/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace episim {

namespace {
constexpr double kPi = std::numbers::pi;

// Contact-rate prefactor of the baseline/anti-virus variant:
// dI/dt = cubic_rate * sqrt(I) * (N - I) / N.
double cubic_rate(const SiParams& p) {
    const double s = std::sqrt(p.sigma * kPi) * p.r_t;
    return 2.0 * p.beta * s * s * s;
}

// Correlated variant: dI/dt = linear_rate * sqrt(I/N) * (N - I).
double linear_rate(const SiParams& p) {
    return 2.0 * p.beta * p.r_t * std::sqrt(p.sigma * kPi) * p.w_theta;
}
}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::BaselineSi: return "baseline";
        case ModelKind::AntivirusSi: return "antivirus";
        case ModelKind::CorrelatedSi: return "correlated";
    }
    throw std::logic_error("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "baseline") return ModelKind::BaselineSi;
    if (name == "antivirus") return ModelKind::AntivirusSi;
    if (name == "correlated") return ModelKind::CorrelatedSi;
    throw std::invalid_argument("unknown model kind: " + name);
}

void SiParams::validate() const {
    if (!(beta > 0.0) || beta > 1.0) throw std::invalid_argument("beta must be in (0, 1]");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (!(r_t > 0.0)) throw std::invalid_argument("r_t must be positive");
    if (n_total < 2.0) throw std::invalid_argument("n_total must be >= 2");
    if (w_theta < 0.0) throw std::invalid_argument("w_theta must be >= 0");
    if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0, 1]");
    if (i0 < 1.0 || i0 >= n_total) throw std::invalid_argument("i0 must be in [1, N)");
}

Derivative rhs(ModelKind kind, const EpidemicState& state, const SiParams& params) {
    const double n = params.n_total;
    const double i = state.i;
    if (i < 0.0 || i > n) throw std::domain_error("rhs: I outside [0, N]");
    double di = 0.0;
    switch (kind) {
        case ModelKind::BaselineSi:
            di = cubic_rate(params) * std::sqrt(i) * (n - i) / n;
            break;
        case ModelKind::AntivirusSi:
            di = cubic_rate(params) * std::sqrt(i) * (n - i) / n -
                 params.lambda * params.p * i;
            break;
        case ModelKind::CorrelatedSi:
            di = linear_rate(params) * std::sqrt(i / n) * (n - i);
            break;
    }
    return {-di, di};
}

double frontier_fraction(double i, const SiParams& params) {
    return 2.0 / params.r_t * std::sqrt(i / (params.n_total * params.sigma * kPi));
}

double infection_radius(double i, double sigma) {
    if (i < 0.0) throw std::domain_error("infection_radius: negative I");
    if (sigma <= 0.0) throw std::domain_error("infection_radius: sigma must be positive");
    return std::sqrt(i / (sigma * kPi));
}

namespace {

// Both growth-only variants reduce, via I = N u^2, to du/dt = (c/2)(1 - u^2),
// so I(t) = N tanh^2(c t / 2 + artanh(sqrt(I0/N))).
double tanh_square_solution(double t, double c, const SiParams& p) {
    const double u0 = std::sqrt(p.i0 / p.n_total);
    const double u = std::tanh(0.5 * c * t + std::atanh(u0));
    return p.n_total * u * u;
}

// Anti-virus variant via J = sqrt(I): dJ/dt = -(A/2)(J - C)(J + B) with the
// constants A, B, C of the two-branch printed solution. The single ratio form
// q = (J - C)/(J + B) = q0 exp(-(A/2)(B+C) t) covers both branches.
double antivirus_solution(double t, const SiParams& p) {
    const double a = cubic_rate(p) / p.n_total;
    const double lp = p.lambda * p.p;
    const double disc = std::sqrt(lp / (2.0 * a) * (lp / (2.0 * a)) + p.n_total);
    const double b = disc + lp / (2.0 * a);
    const double c = disc - lp / (2.0 * a);
    const double j0 = std::sqrt(p.i0);
    const double q = (j0 - c) / (j0 + b) * std::exp(-0.5 * a * (b + c) * t);
    const double j = (c + b * q) / (1.0 - q);
    return j * j;
}

}  // namespace

double closed_form(ModelKind kind, double t, const SiParams& params) {
    if (t < 0.0) throw std::domain_error("closed_form: negative time");
    params.validate();
    switch (kind) {
        case ModelKind::BaselineSi:
            return tanh_square_solution(t, cubic_rate(params) / std::sqrt(params.n_total),
                                        params);
        case ModelKind::CorrelatedSi:
            // Substituting I = N u^2 here leaves no 1/sqrt(N): the sqrt(I/N)
            // factor already carries it.
            return tanh_square_solution(t, linear_rate(params), params);
        case ModelKind::AntivirusSi:
            if (params.lambda * params.p == 0.0)
                return tanh_square_solution(
                    t, cubic_rate(params) / std::sqrt(params.n_total), params);
            return antivirus_solution(t, params);
    }
    throw std::logic_error("unknown model kind");
}

double closed_form_baseline_normalized(double t, const SiParams& params) {
    return closed_form(ModelKind::BaselineSi, t, params) / params.n_total;
}

Trajectory integrate(ModelKind kind, const SiParams& params, double t_end, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
    if (t_end < dt) throw std::invalid_argument("integrate: t_end must be >= dt");
    params.validate();

    Trajectory traj;
    traj.kind = kind;
    traj.params = params;
    traj.dt = dt;

    const double n = params.n_total;
    double i = params.i0;
    double t = 0.0;
    traj.samples.push_back({n - i, i, t});

    const auto f = [&](double iv) {
        // RK4 stages may probe slightly past the bounds; evaluate on the
        // clamped value so sqrt stays defined.
        EpidemicState s{n - iv, std::clamp(iv, 0.0, n), 0.0};
        return rhs(kind, s, params).di;
    };

    const auto steps = static_cast<std::uint64_t>(std::llround(t_end / dt));
    for (std::uint64_t k = 1; k <= steps; ++k) {
        const double k1 = f(i);
        const double k2 = f(i + 0.5 * dt * k1);
        const double k3 = f(i + 0.5 * dt * k2);
        const double k4 = f(i + dt * k3);
        i += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(i))
            throw std::runtime_error("integrate: diverged at step " + std::to_string(k));
        const double clamped = std::clamp(i, 0.0, n);
        traj.clamp_drift += std::abs(i - clamped);
        i = clamped;
        if (traj.clamp_drift > 1e-3 * n)
            throw std::runtime_error("integrate: clamp drift exceeded 1e-3*N at step " +
                                     std::to_string(k));
        t = static_cast<double>(k) * dt;
        traj.samples.push_back({n - i, i, t});
    }
    return traj;
}

double equilibrium_antivirus(const SiParams& params) {
    params.validate();
    const double lp = params.lambda * params.p;
    if (lp == 0.0)
        throw std::domain_error("equilibrium_antivirus: lambda*p = 0 degenerates to I* = N");
    const double a = cubic_rate(params) / params.n_total;
    const double half = lp / (2.0 * a);
    const double c = std::sqrt(half * half + params.n_total) - half;
    return c * c;
}

}  // namespace episim
