#include "levyhedge/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "levyhedge/errors.hpp"
#include "levyhedge/quadrature.hpp"

namespace levyhedge {

namespace {

constexpr int table_cells = 2048;

QuadSpec moment_quad() {
    QuadSpec q;
    q.abs_tol = 1e-14;
    q.rel_tol = 1e-12;
    q.panels = 16;
    return q;
}

}  // namespace

// Cumulative distribution of a user density, tabulated at cell edges and
// refined inside a cell with a single 15-point Kronrod panel.
struct LevyModel::DensityTable {
    std::function<double(double)> density;
    double lower = 0.0;
    double upper = 0.0;
    double width = 0.0;
    double norm = 1.0;
    std::vector<double> cdf;  // cdf[i] = P(Y <= lower + i * width)

    double partial(double a, double b) const {
        auto f = density;
        return detail::gauss_kronrod15(f, a, b).value / norm;
    }

    double operator()(double y) const {
        if (y <= lower) return 0.0;
        if (y >= upper) return 1.0;
        const auto cell = std::min(static_cast<std::size_t>((y - lower) / width), cdf.size() - 2);
        const double a = lower + static_cast<double>(cell) * width;
        return std::clamp(cdf[cell] + partial(a, y), 0.0, 1.0);
    }

    double quantile(double p) const {
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), p);
        const auto cell = static_cast<std::size_t>(
            std::clamp<std::ptrdiff_t>(it - cdf.begin() - 1, 0, static_cast<std::ptrdiff_t>(cdf.size()) - 2));
        const double start = lower + static_cast<double>(cell) * width;
        double lo = start;
        double hi = start + width;
        const double mass = cdf[cell + 1] - cdf[cell];
        double y = mass > 0.0 ? lo + width * (p - cdf[cell]) / mass : 0.5 * (lo + hi);
        // Safeguarded Newton on the in-cell CDF.
        for (int iter = 0; iter < 50; ++iter) {
            const double g = cdf[cell] + partial(start, y) - p;
            if (std::abs(g) < 1e-15) break;
            if (g > 0.0) hi = y; else lo = y;
            const double d = density(y) / norm;
            double next = d > 0.0 ? y - g / d : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - y) < 1e-15 * std::max(1.0, std::abs(y))) { y = next; break; }
            y = next;
        }
        return y;
    }
};

LevyModel::LevyModel(double u, double mu, double lambda, JumpLaw jump_law)
    : u_(u), mu_(mu), lambda_(lambda), law_(std::move(jump_law)) {
    if (!(u > 0.0) || !std::isfinite(u)) throw ModelError("initial value u must be > 0");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ModelError("drift mu must be > 0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ModelError("jump intensity lambda must be >= 0");

    std::visit(
        [this](auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, ExponentialNegative>) {
                if (!(law.rate > 0.0) || !std::isfinite(law.rate))
                    throw ModelError("exponential jump rate delta must be > 0");
                mean_jump_ = -1.0 / law.rate;
                jump_m2_ = 2.0 / (law.rate * law.rate);
            } else if constexpr (std::is_same_v<T, EmpiricalJumps>) {
                if (law.samples.empty()) throw ModelError("empirical jump law needs samples");
                for (double s : law.samples)
                    if (!std::isfinite(s)) throw ModelError("empirical jump samples must be finite");
                std::sort(law.samples.begin(), law.samples.end());
                const double n = static_cast<double>(law.samples.size());
                mean_jump_ = std::accumulate(law.samples.begin(), law.samples.end(), 0.0) / n;
                jump_m2_ = std::transform_reduce(law.samples.begin(), law.samples.end(), 0.0,
                                                 std::plus<>{}, [](double s) { return s * s; }) / n;
                non_conforming_ = true;
            } else {
                if (!law.density) throw ModelError("user density callback is empty");
                if (!std::isfinite(law.lower) || !std::isfinite(law.upper) || !(law.upper > law.lower))
                    throw ModelError("user density needs finite support bounds lower < upper");
                const auto q = moment_quad();
                const double mass = integrate(law.density, law.lower, law.upper, q).value;
                if (std::abs(mass - 1.0) > 1e-6)
                    throw ModelError("user density must integrate to one (got " + std::to_string(mass) + ")");
                mean_jump_ = integrate([&](double y) { return y * law.density(y); }, law.lower, law.upper, q).value;
                jump_m2_ = integrate([&](double y) { return y * y * law.density(y); }, law.lower, law.upper, q).value;

                auto table = std::make_shared<DensityTable>();
                table->density = law.density;
                table->lower = law.lower;
                table->upper = law.upper;
                table->width = (law.upper - law.lower) / table_cells;
                table->cdf.resize(table_cells + 1, 0.0);
                for (int i = 0; i < table_cells; ++i) {
                    const double a = law.lower + i * table->width;
                    table->cdf[i + 1] = table->cdf[i] + table->partial(a, a + table->width);
                }
                table->norm = table->cdf.back();
                for (double& c : table->cdf) c /= table->norm;
                table_ = std::move(table);
            }
        },
        law_);

    const double m2 = lambda_ * jump_m2_;
    if (!(m2 > 0.0) || !std::isfinite(m2))
        throw ModelError("second moment of the Lévy measure must satisfy 0 < m2 < inf");

    beta_ = mu_ + lambda_ * mean_jump_;
    const double scale = std::max(mu_, std::abs(lambda_ * mean_jump_));
    is_martingale_ = std::abs(beta_) <= martingale_tolerance * scale;
}

double LevyModel::levy_cdf(double y) const {
    return std::visit(
        [&](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, ExponentialNegative>) {
                return y >= 0.0 ? lambda_ : lambda_ * std::exp(law.rate * y);
            } else if constexpr (std::is_same_v<T, EmpiricalJumps>) {
                const auto count = std::upper_bound(law.samples.begin(), law.samples.end(), y) - law.samples.begin();
                return lambda_ * static_cast<double>(count) / static_cast<double>(law.samples.size());
            } else {
                return lambda_ * (*table_)(y);
            }
        },
        law_);
}

double LevyModel::tail_mass(double x) const {
    if (!(x >= 0.0)) throw ModelError("tail_mass needs x >= 0");
    return levy_cdf(-x);
}

double LevyModel::levy_density(double y) const {
    return std::visit(
        [&](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, ExponentialNegative>) {
                return y < 0.0 ? lambda_ * law.rate * std::exp(law.rate * y) : 0.0;
            } else if constexpr (std::is_same_v<T, EmpiricalJumps>) {
                throw ModelError("empirical jump law has no density");
            } else {
                return (y < law.lower || y > law.upper) ? 0.0 : lambda_ * law.density(y);
            }
        },
        law_);
}

double LevyModel::sample_jump(Xoshiro256& rng) const {
    return std::visit(
        [&](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, ExponentialNegative>) {
                return -rng.exponential(law.rate);
            } else if constexpr (std::is_same_v<T, EmpiricalJumps>) {
                const auto n = law.samples.size();
                const auto idx = std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)), n - 1);
                return law.samples[idx];
            } else {
                return table_->quantile(rng.uniform());
            }
        },
        law_);
}

LevyModel LevyModel::with_initial(double u) const {
    LevyModel copy = *this;
    if (!(u > 0.0) || !std::isfinite(u)) throw ModelError("initial value u must be > 0");
    copy.u_ = u;
    return copy;
}

LevyModel build_model(double u, double mu, double lambda, JumpLaw jump_law) {
    return LevyModel(u, mu, lambda, std::move(jump_law));
}

double tail_mass(const LevyModel& model, double x) { return model.tail_mass(x); }

}  // namespace levyhedge
