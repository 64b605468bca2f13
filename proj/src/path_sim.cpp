#include "levyhedge/path_sim.hpp"

#include <algorithm>
#include <cmath>

#include "levyhedge/errors.hpp"
#include "levyhedge/parallel.hpp"
#include "levyhedge/quadrature.hpp"

namespace levyhedge {

namespace {

constexpr int simpson_panels_per_segment = 64;

std::size_t jumps_up_to(const SamplePath& path, double t) {
    return static_cast<std::size_t>(
        std::upper_bound(path.jump_times.begin(), path.jump_times.end(), t) - path.jump_times.begin());
}

void check_time(const SamplePath& path, double t) {
    if (!(t >= 0.0) || t > path.horizon) throw ModelError("time outside [0, horizon]");
}

void finalize(SamplePath& path) {
    path.levels.resize(path.jump_times.size());
    double cumulative = 0.0;
    for (std::size_t j = 0; j < path.jump_times.size(); ++j) {
        cumulative += path.jump_sizes[j];
        path.levels[j] = path.u + path.mu * path.jump_times[j] + cumulative;
    }
    path.tau_index = default_index(path.levels);
    path.tau = path.tau_index ? std::optional<double>(path.jump_times[*path.tau_index]) : std::nullopt;
}

}  // namespace

std::optional<std::size_t> default_index(std::span<const double> levels) {
    for (std::size_t j = 0; j < levels.size(); ++j)
        if (levels[j] < 0.0) return j;
    return std::nullopt;
}

double SamplePath::at(double t) const {
    const std::size_t n = jumps_up_to(*this, t);
    return n == 0 ? u + mu * t : levels[n - 1] + mu * (t - jump_times[n - 1]);
}

double SamplePath::left_limit(double t) const {
    const auto n = static_cast<std::size_t>(
        std::lower_bound(jump_times.begin(), jump_times.end(), t) - jump_times.begin());
    return n == 0 ? u + mu * t : levels[n - 1] + mu * (t - jump_times[n - 1]);
}

SamplePath make_path(double u, double mu, double horizon, std::vector<double> jump_times,
                     std::vector<double> jump_sizes) {
    if (jump_times.size() != jump_sizes.size()) throw ModelError("jump times and sizes differ in length");
    for (std::size_t j = 0; j < jump_times.size(); ++j) {
        if (!(jump_times[j] > 0.0) || jump_times[j] > horizon)
            throw ModelError("jump times must lie in (0, horizon]");
        if (j > 0 && !(jump_times[j] > jump_times[j - 1]))
            throw ModelError("jump times must be strictly increasing");
    }
    SamplePath path;
    path.u = u;
    path.mu = mu;
    path.horizon = horizon;
    path.jump_times = std::move(jump_times);
    path.jump_sizes = std::move(jump_sizes);
    finalize(path);
    return path;
}

SamplePath simulate_path(const LevyModel& model, double horizon, RngStream stream) {
    if (!(horizon > 0.0)) throw ModelError("horizon must be > 0");
    SamplePath path;
    path.u = model.u();
    path.mu = model.mu();
    path.horizon = horizon;
    path.stream = stream;
    if (model.lambda() > 0.0) {
        Xoshiro256 rng(stream);
        double t = rng.exponential(model.lambda());
        while (t <= horizon) {
            path.jump_times.push_back(t);
            path.jump_sizes.push_back(model.sample_jump(rng));
            t += rng.exponential(model.lambda());
        }
    }
    finalize(path);
    return path;
}

double sample_at(const SamplePath& path, double t) {
    check_time(path, t);
    return path.at(t);
}

double left_limit_at(const SamplePath& path, double t) {
    check_time(path, t);
    return path.left_limit(t);
}

double compensator_integral(const LevyModel& model, const SamplePath& path, double t) {
    const double stop = path.tau ? std::min(t, *path.tau) : t;
    const auto* expo = model.exponential();
    const double mu = path.mu;

    auto segment = [&](double start, double end, double level) {
        if (!(end > start)) return 0.0;
        if (expo) {
            // int_0^h lambda exp(-delta (level + mu s)) ds
            const double k = expo->rate * mu;
            return model.lambda() * std::exp(-expo->rate * level) * (-std::expm1(-k * (end - start))) / k;
        }
        return simpson([&](double s) { return model.tail_mass(std::max(0.0, level + mu * (s - start))); },
                       start, end, simpson_panels_per_segment);
    };

    double total = 0.0;
    double seg_start = 0.0;
    double seg_level = path.u;
    for (std::size_t j = 0; j < path.jump_count() && path.jump_times[j] < stop; ++j) {
        total += segment(seg_start, path.jump_times[j], seg_level);
        seg_start = path.jump_times[j];
        seg_level = path.levels[j];
    }
    total += segment(seg_start, stop, seg_level);
    return total;
}

BatchResult batch_simulate(const LevyModel& model, double horizon, std::size_t n_paths,
                           std::uint64_t base_seed, unsigned threads, std::size_t retain) {
    if (n_paths < 1) throw ModelError("n_paths must be >= 1");
    std::vector<unsigned char> defaulted(n_paths, 0);
    std::vector<unsigned char> creep(n_paths, 0);
    retain = std::min(retain, n_paths);
    std::vector<SamplePath> kept(retain);

    parallel_for(n_paths, threads, [&](std::size_t i) {
        auto path = simulate_path(model, horizon, {base_seed, i});
        if (path.tau_index) {
            defaulted[i] = 1;
            const auto j = *path.tau_index;
            if (!(path.levels[j] < 0.0) || !(path.level_before(j) > 0.0)) creep[i] = 1;
        }
        if (i < retain) kept[i] = std::move(path);
    });

    BatchResult result;
    result.n_paths = n_paths;
    for (std::size_t i = 0; i < n_paths; ++i) {
        result.n_defaults += defaulted[i];
        result.creep_violations += creep[i];
    }
    const double n = static_cast<double>(n_paths);
    result.default_rate = static_cast<double>(result.n_defaults) / n;
    result.std_err = n > 1 ? std::sqrt(result.default_rate * (1.0 - result.default_rate) / (n - 1.0)) : 0.0;
    result.retained = std::move(kept);
    return result;
}

}  // namespace levyhedge
