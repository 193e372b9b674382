#pragma once

#include <string>
#include <utility>
#include <variant>

#include "delaywarp/abel.hpp"
#include "delaywarp/perturbation.hpp"

namespace delaywarp {

/// Type-erased time-transformation: perturbative series, hard-coded sinusoid
/// closed form, or seed-propagated table.
class TimeTransform {
public:
    using Variant = std::variant<SeriesTransform, SinusoidTransform, PropagatedTransform>;

    TimeTransform(SeriesTransform t) : v_(std::move(t)) {}
    TimeTransform(SinusoidTransform t) : v_(std::move(t)) {}
    TimeTransform(PropagatedTransform t) : v_(std::move(t)) {}

    [[nodiscard]] double h(double lambda) const {
        return std::visit([&](const auto& t) { return t.h(lambda); }, v_);
    }
    [[nodiscard]] double h_dot(double lambda) const {
        return std::visit([&](const auto& t) { return t.h_dot(lambda); }, v_);
    }
    [[nodiscard]] double tau_star() const {
        return std::visit([](const auto& t) { return t.tau_star(); }, v_);
    }
    [[nodiscard]] double domain_start() const {
        return std::visit([](const auto& t) { return t.domain_start(); }, v_);
    }

    [[nodiscard]] std::string kind() const {
        if (std::holds_alternative<SeriesTransform>(v_)) return "perturbative";
        if (std::holds_alternative<SinusoidTransform>(v_)) return "closed-form-sinusoid";
        return "exact";
    }

    [[nodiscard]] const Variant& variant() const noexcept { return v_; }

private:
    Variant v_;
};

static_assert(TimeTransformLike<TimeTransform>);
static_assert(TimeTransformLike<SeriesTransform>);
static_assert(TimeTransformLike<SinusoidTransform>);
static_assert(TimeTransformLike<PropagatedTransform>);

} // namespace delaywarp
