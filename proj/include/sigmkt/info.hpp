#pragma once

#include <cmath>
#include <optional>

namespace sigmkt {

/// A signal value observed at a given time through a channel of given sigma.
struct SignalObservation {
    double t = 0.0;
    double xi = 0.0;
    double sigma = 1.0;

    bool operator==(const SignalObservation&) const = default;
};

/**
 * Effective information of one agent: the own signal at the current time,
 * plus (after at least one trade) the counterpart's signal value recovered at
 * the last trade time. rho is the noise correlation between the two channels;
 * the correlation between own(t) and counterpart(s) conditional on the payoff
 * is rho * sqrt((s/t) (kappa_s/kappa_t)).
 */
struct EffectiveInfo {
    double horizon = 1.0;
    SignalObservation own;
    std::optional<SignalObservation> counterpart;  // counterpart->t < own.t
    double rho = 0.0;

    bool operator==(const EffectiveInfo&) const = default;
};

struct Numeraire {
    double rate = 0.0;
    double horizon = 1.0;

    /// delta_t^{-1} = e^{-r (T - t)}, in (0, 1] for t <= T.
    double discount(double t) const { return std::exp(-rate * (horizon - t)); }
};

}  // namespace sigmkt
