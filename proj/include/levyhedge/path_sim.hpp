#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "levyhedge/levy_model.hpp"
#include "levyhedge/rng.hpp"

namespace levyhedge {

/// Exact event-driven trajectory on [0, horizon]. Between jumps the path is
/// affine with slope mu > 0, so the only places X can go below zero are jump
/// times.
struct SamplePath {
    double u = 0.0;
    double mu = 0.0;
    double horizon = 0.0;
    std::vector<double> jump_times;   // strictly increasing, in (0, horizon]
    std::vector<double> jump_sizes;
    std::vector<double> levels;       // X(t_j) right after jump j
    RngStream stream{};
    std::optional<double> tau;
    std::optional<std::size_t> tau_index;

    std::size_t jump_count() const noexcept { return jump_times.size(); }

    /// X(t), right-continuous.
    double at(double t) const;
    /// X(t-), the left limit.
    double left_limit(double t) const;
    /// X(t_j-) for the j-th jump.
    double level_before(std::size_t j) const {
        return levels[j] - jump_sizes[j];
    }
    bool defaulted_by(double t) const noexcept { return tau && *tau <= t; }
};

/// Index of the first jump whose post-jump level is strictly negative.
std::optional<std::size_t> default_index(std::span<const double> levels);

/// Builds a path from explicit events; used for forced scenarios and replay.
SamplePath make_path(double u, double mu, double horizon, std::vector<double> jump_times,
                     std::vector<double> jump_sizes);

SamplePath simulate_path(const LevyModel& model, double horizon, RngStream stream);

double sample_at(const SamplePath& path, double t);
double left_limit_at(const SamplePath& path, double t);

/// int_0^{t ^ tau} nu((-inf, -X_s]) ds along the path. Closed form per affine
/// segment for exponential jumps, composite Simpson (64 panels) otherwise.
double compensator_integral(const LevyModel& model, const SamplePath& path, double t);

struct BatchResult {
    std::size_t n_paths = 0;
    std::size_t n_defaults = 0;
    double default_rate = 0.0;
    double std_err = 0.0;
    std::size_t creep_violations = 0;  ///< defaults with X(tau) >= 0 or X(tau-) <= 0
    std::vector<SamplePath> retained;
};

/// Simulates n_paths paths on streams (base_seed, 0..n_paths-1). The result is
/// bit-identical for any thread count.
BatchResult batch_simulate(const LevyModel& model, double horizon, std::size_t n_paths,
                           std::uint64_t base_seed, unsigned threads = 1,
                           std::size_t retain = 0);

}  // namespace levyhedge
