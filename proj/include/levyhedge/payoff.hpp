#pragma once

#include <cmath>
#include <string>

namespace levyhedge {

class LevyModel;

/// Terminal payoff F of the defaultable claim F(X_T) 1{tau > T}.
/// Kinds: constant c; linear a + b x; exp_shift c - a exp(b x).
class Payoff {
public:
    enum class Kind { constant, linear, exp_shift };

    static Payoff constant(double c) { return Payoff(Kind::constant, c, 0.0, 0.0); }
    static Payoff linear(double intercept, double slope) { return Payoff(Kind::linear, intercept, slope, 0.0); }
    static Payoff exp_shift(double c, double a, double b) { return Payoff(Kind::exp_shift, c, a, b); }

    /// F(x) = 1 - lambda/(mu delta) exp((lambda/mu - delta) x), the payoff that
    /// makes F(X_t) 1{tau > t} a martingale for exponential jumps.
    static Payoff ruin_identity(const LevyModel& model);

    double operator()(double x) const {
        switch (kind_) {
            case Kind::constant: return p0_;
            case Kind::linear: return p0_ + p1_ * x;
            case Kind::exp_shift: return p0_ - p1_ * std::exp(p2_ * x);
        }
        return 0.0;
    }

    Kind kind() const noexcept { return kind_; }
    double p0() const noexcept { return p0_; }
    double p1() const noexcept { return p1_; }
    double p2() const noexcept { return p2_; }
    bool is_constant() const noexcept { return kind_ == Kind::constant; }
    bool is_zero() const noexcept { return kind_ == Kind::constant && p0_ == 0.0; }

    std::string kind_name() const;

    friend bool operator==(const Payoff&, const Payoff&) = default;

private:
    Payoff(Kind kind, double p0, double p1, double p2) : kind_(kind), p0_(p0), p1_(p1), p2_(p2) {}

    Kind kind_;
    double p0_;
    double p1_;
    double p2_;
};

}  // namespace levyhedge
