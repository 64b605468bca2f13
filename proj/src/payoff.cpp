#include "levyhedge/payoff.hpp"

#include "levyhedge/errors.hpp"
#include "levyhedge/levy_model.hpp"

namespace levyhedge {

Payoff Payoff::ruin_identity(const LevyModel& model) {
    const auto* expo = model.exponential();
    if (!expo) throw ModelError("ruin identity payoff needs exponential-negative jumps");
    const double delta = expo->rate;
    const double ratio = model.lambda() / (model.mu() * delta);
    return exp_shift(1.0, ratio, model.lambda() / model.mu() - delta);
}

std::string Payoff::kind_name() const {
    switch (kind_) {
        case Kind::constant: return "constant";
        case Kind::linear: return "linear";
        case Kind::exp_shift: return "exp_shift";
    }
    return "unknown";
}

}  // namespace levyhedge
