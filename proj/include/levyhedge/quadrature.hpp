#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "levyhedge/errors.hpp"

namespace levyhedge {

enum class QuadMethod {
    automatic,  ///< closed form where the integrand allows it, adaptive otherwise
    adaptive,   ///< always adaptive Gauss-Kronrod
};

struct QuadSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    double tail_cut = 1e-10;  ///< jump-law mass below which the far tail is dropped
    int panels = 1;           ///< initial panels per smooth piece
    int max_subdivisions = 4000;
    QuadMethod method = QuadMethod::automatic;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw ModelError("quadrature tolerances must be positive");
        if (!(tail_cut > 0.0) || tail_cut > 1e-6)
            throw ModelError("tail_cut must lie in (0, 1e-6]");
        if (panels < 1) throw ModelError("panels must be >= 1");
    }
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

// QUADPACK qk15 abscissae and weights.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double fsum = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[j] * fsum;
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * fsum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive 7/15 Gauss-Kronrod on [a, b]. `breaks` are points where
/// the integrand may lose smoothness; the initial partition starts at them.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadSpec& spec,
                     std::span<const double> breaks = {}) {
    if (!(b > a)) return {};
    std::vector<double> cuts{a};
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    std::priority_queue<detail::Panel> heap;
    double total = 0.0;
    double total_error = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k];
        const double width = (cuts[k + 1] - lo) / spec.panels;
        if (!(width > 0.0)) continue;
        for (int p = 0; p < spec.panels; ++p) {
            const double pa = lo + p * width;
            const double pb = p + 1 == spec.panels ? cuts[k + 1] : lo + (p + 1) * width;
            auto panel = detail::gauss_kronrod15(f, pa, pb);
            total += panel.value;
            total_error += panel.error;
            heap.push(panel);
        }
    }

    int subdivisions = 0;
    while (total_error > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (subdivisions >= spec.max_subdivisions || heap.empty())
            throw ConvergenceError("adaptive quadrature did not converge", total, total_error);
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            throw ConvergenceError("adaptive quadrature hit round-off limit", total, total_error);
        heap.pop();
        auto left = detail::gauss_kronrod15(f, worst.a, mid);
        auto right = detail::gauss_kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }

    // Re-sum from the panels so the result does not carry update drift.
    double value = 0.0;
    double error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error};
}

/// Composite Simpson rule with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
    if (!(b > a)) return 0.0;
    if (panels % 2 != 0) ++panels;
    const double h = (b - a) / panels;
    double sum = f(a) + f(b);
    for (int i = 1; i < panels; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
    return sum * h / 3.0;
}

}  // namespace levyhedge
