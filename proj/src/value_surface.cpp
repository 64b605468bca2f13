#include "levyhedge/value_surface.hpp"

#include <cmath>
#include <vector>

#include "levyhedge/operators.hpp"
#include "levyhedge/parallel.hpp"
#include "levyhedge/rng.hpp"

namespace levyhedge {

namespace {

constexpr std::size_t chunk_paths = 1024;

// Running mean and sum of squared deviations, merged in a fixed order.
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        n += 1.0;
        const double d = v - mean;
        mean += d / n;
        m2 += d * (v - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        const double total = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / total;
        m2 += o.m2 + d * d * n * o.n / total;
        n = total;
    }
};

void check_grid(const Eigen::VectorXd& grid, const char* name) {
    if (grid.size() < 2) throw ModelError(std::string(name) + " needs at least two nodes");
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid(i))) throw ModelError(std::string(name) + " must be finite");
        if (i > 0 && !(grid(i) > grid(i - 1))) throw ModelError(std::string(name) + " must be strictly increasing");
    }
}

std::uint64_t row_seed(std::uint64_t seed, Eigen::Index row) {
    return splitmix64_mix(domain_seed(seed, StreamDomain::surface) + static_cast<std::uint64_t>(row));
}

}  // namespace

double default_x_max(const LevyModel& model, double horizon) {
    return model.u() + model.mu() * horizon + 5.0 * std::sqrt(model.second_moment() * horizon);
}

ValueSurface estimate_surface(const LevyModel& model, const Payoff& payoff, double horizon,
                              const Eigen::VectorXd& t_grid, const Eigen::VectorXd& x_grid,
                              const SurfaceOptions& options) {
    if (!(horizon > 0.0)) throw ModelError("horizon must be > 0");
    if (!model.is_martingale() && !options.nonmartingale_ack)
        throw ModelError("surface estimation needs beta = 0; pass nonmartingale_ack to estimate the killed "
                         "expectation anyway");
    if (options.n_paths < 2) throw ModelError("n_paths must be >= 2");
    check_grid(t_grid, "t_grid");
    check_grid(x_grid, "x_grid");
    if (t_grid(0) < 0.0 || t_grid(t_grid.size() - 1) != horizon)
        throw ModelError("t_grid must lie in [0, T] and end at T");
    if (x_grid(0) < 0.0) throw ModelError("x_grid must be >= 0");

    const Eigen::Index nt = t_grid.size();
    const Eigen::Index nx = x_grid.size();
    const std::size_t chunks = (options.n_paths + chunk_paths - 1) / chunk_paths;
    const std::size_t rows = static_cast<std::size_t>(nt - 1);
    std::vector<Moments> partial(rows * chunks * static_cast<std::size_t>(nx));

    const double mu = model.mu();
    parallel_for(rows * chunks, options.threads, [&](std::size_t task) {
        const auto row = static_cast<Eigen::Index>(task / chunks);
        const std::size_t chunk = task % chunks;
        const double h = horizon - t_grid(row);
        const std::uint64_t seed = row_seed(options.seed, row);
        Moments* out = &partial[task * static_cast<std::size_t>(nx)];
        const std::size_t first = chunk * chunk_paths;
        const std::size_t last = std::min(options.n_paths, first + chunk_paths);
        for (std::size_t p = first; p < last; ++p) {
            // Offsets relative to the start level: lowest post-jump level and
            // terminal level.
            Xoshiro256 rng(RngStream{seed, p});
            double lowest = std::numeric_limits<double>::infinity();
            double jumps = 0.0;
            if (model.lambda() > 0.0) {
                double s = rng.exponential(model.lambda());
                while (s <= h) {
                    jumps += model.sample_jump(rng);
                    lowest = std::min(lowest, mu * s + jumps);
                    s += rng.exponential(model.lambda());
                }
            }
            const double terminal = mu * h + jumps;
            for (Eigen::Index j = 0; j < nx; ++j) {
                const double x = x_grid(j);
                const bool alive = !(x + lowest < 0.0);
                out[j].add(alive ? payoff(x + terminal) : 0.0);
            }
        }
    });

    ValueSurface surface;
    surface.t_grid = t_grid;
    surface.x_grid = x_grid;
    surface.values.resize(nt, nx);
    surface.std_err.resize(nt, nx);
    surface.payoff = payoff;
    surface.horizon = horizon;
    surface.n_paths_per_node = options.n_paths;
    surface.seed = options.seed;

    for (std::size_t row = 0; row < rows; ++row) {
        for (Eigen::Index j = 0; j < nx; ++j) {
            Moments total;
            for (std::size_t c = 0; c < chunks; ++c)
                total.merge(partial[(row * chunks + c) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(j)]);
            const auto r = static_cast<Eigen::Index>(row);
            surface.values(r, j) = total.mean;
            surface.std_err(r, j) = std::sqrt(total.m2 / (total.n - 1.0) / total.n);
        }
    }
    for (Eigen::Index j = 0; j < nx; ++j) {
        surface.values(nt - 1, j) = payoff(x_grid(j));
        surface.std_err(nt - 1, j) = 0.0;
    }
    return surface;
}

ValueSurface estimate_surface(const LevyModel& model, const Payoff& payoff, double horizon,
                              const SurfaceOptions& options) {
    return estimate_surface(model, payoff, horizon, uniform_grid(0.0, horizon, default_grid_nodes),
                            uniform_grid(0.0, default_x_max(model, horizon), default_grid_nodes), options);
}

PideResidual pide_residual(const ValueSurface& surface, const LevyModel& model, const QuadSpec& quad) {
    if (!model.is_martingale()) throw ModelError("PIDE residual needs the martingale case beta = 0");
    const auto f = as_surface_fn(surface);
    const Eigen::Index nt = surface.t_grid.size();
    const Eigen::Index nx = surface.x_grid.size();
    PideResidual out;
    out.residual.setConstant(nt, nx, std::numeric_limits<double>::quiet_NaN());
    out.noise_bound.setZero(nt, nx);
    out.quad_error.setZero(nt, nx);
    const auto& se = surface.std_err;
    const double lambda = model.lambda();
    const double mu = model.mu();

    for (Eigen::Index i = 0; i < nt; ++i) {
        double running_max = 0.0;
        for (Eigen::Index j = 0; j < nx; ++j) {
            running_max = std::max(running_max, se(i, j));
            const double x = surface.x_grid(j);
            if (!(x > 0.0)) continue;
            const auto a = apply_A_detailed(f, surface.t_grid(i), x, model, quad);
            out.residual(i, j) = a.value;
            out.quad_error(i, j) = a.error;

            double var = 0.0;
            if (nt > 2) {
                const auto st = detail::stencil_weights(surface.t_grid, i);
                var += std::pow(st.wl * se(st.center - 1, j), 2) + std::pow(st.wc * se(st.center, j), 2) +
                       std::pow(st.wr * se(st.center + 1, j), 2);
            }
            if (nx > 2) {
                const auto sx = detail::stencil_weights(surface.x_grid, j);
                var += mu * mu *
                       (std::pow(sx.wl * se(i, sx.center - 1), 2) + std::pow(sx.wc * se(i, sx.center), 2) +
                        std::pow(sx.wr * se(i, sx.center + 1), 2));
            }
            out.noise_bound(i, j) = std::sqrt(var) + lambda * se(i, j) + lambda * running_max;
        }
    }
    return out;
}

double PideResidual::interior_fraction_within(double factor) const {
    std::size_t inside = 0;
    std::size_t total = 0;
    for (Eigen::Index i = 1; i + 1 < residual.rows(); ++i) {
        for (Eigen::Index j = 1; j + 1 < residual.cols(); ++j) {
            if (std::isnan(residual(i, j))) continue;
            ++total;
            if (std::abs(residual(i, j)) <= factor * noise_bound(i, j)) ++inside;
        }
    }
    return total == 0 ? 1.0 : static_cast<double>(inside) / static_cast<double>(total);
}

double boundary_error(const ValueSurface& surface) {
    const Eigen::Index last = surface.t_grid.size() - 1;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < surface.x_grid.size(); ++j)
        worst = std::max(worst, std::abs(surface.values(last, j) - surface.payoff(surface.x_grid(j))));
    return worst;
}

}  // namespace levyhedge
