#pragma once

#include <string>
#include <vector>

namespace episim {

enum class ModelKind { BaselineSi, AntivirusSi, CorrelatedSi };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct SiParams {
    double beta = 0.3;      // infection rate per contact, 1/time
    double sigma = 0.5;     // node density, nodes/m^2
    double r_t = 4.0;       // transmission radius, meters
    double n_total = 200.0; // N
    double w_theta = 1.0;   // network correlation weight
    double lambda = 0.0;    // maintenance (duty-cycle) rate, 1/time
    double p = 0.0;         // cured fraction per maintenance
    double i0 = 1.0;        // initial infected count

    void validate() const;  // throws std::invalid_argument
};

struct EpidemicState {
    double s = 0.0;
    double i = 0.0;
    double t = 0.0;
};

struct Trajectory {
    std::vector<EpidemicState> samples;
    ModelKind kind = ModelKind::BaselineSi;
    SiParams params;
    double dt = 0.0;
    double clamp_drift = 0.0;  // cumulative clamp magnitude from integration
};

/// Right-hand side (ds/dt, di/dt) of the chosen variant.
/// Throws std::domain_error when i is outside [0, N].
struct Derivative {
    double ds = 0.0;
    double di = 0.0;
};
Derivative rhs(ModelKind kind, const EpidemicState& state, const SiParams& params);

/// Normalized count of effective infectious nodes in the frontier strip:
/// (2/r_t) sqrt(I / (N sigma pi)).
double frontier_fraction(double i, const SiParams& params);

/// Radius of the infected disk: r_e = sqrt(I / (sigma pi)).
double infection_radius(double i, double sigma);

/// Closed-form I(t). Baseline and correlated variants are tanh^2 logistics
/// in sqrt(I); the anti-virus variant relaxes toward C^2. Arbitrary i0.
/// Throws std::domain_error for t < 0.
double closed_form(ModelKind kind, double t, const SiParams& params);

/// Baseline solution without the N prefactor (saturates at 1), kept for
/// comparison with the original fraction-form presentation.
double closed_form_baseline_normalized(double t, const SiParams& params);

/// Classic fixed-step RK4 on I alone; S = N - I by construction. I is
/// clamped to [0, N] after each step and the clamp magnitude accumulated;
/// drift beyond 1e-3 * N or a non-finite state aborts with std::runtime_error.
Trajectory integrate(ModelKind kind, const SiParams& params, double t_end, double dt);

/// Anti-virus fixed point I* = C^2. Throws std::domain_error when
/// lambda * p == 0 (the model degenerates and I* -> N).
double equilibrium_antivirus(const SiParams& params);

}  // namespace episim
