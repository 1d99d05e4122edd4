#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace morphic {

struct Interval {
    double lo = -1.0;
    double hi = 1.0;

    double width() const { return hi - lo; }
    double center() const { return 0.5 * (lo + hi); }
    bool contains(double v) const { return v >= lo && v <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// A coordinate chart: ordered coordinate names and a closed sampling box.
///
/// The box is where randomized checks draw their points and where flows and
/// transports must stay. A zero-dimensional chart models a point and only
/// arises as the base of a quotient.
class Chart {
public:
    Chart(std::vector<std::string> names, std::vector<Interval> box);

    static Chart point() { return Chart(); }

    std::size_t dimension() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<Interval>& box() const { return box_; }
    const Interval& interval(std::size_t i) const { return box_.at(i); }

    std::optional<std::size_t> index_of(std::string_view name) const;
    bool contains(const std::vector<double>& point) const;

    /// Same names in the same order; boxes may differ.
    bool compatible(const Chart& other) const { return names_ == other.names_; }

    friend bool operator==(const Chart&, const Chart&) = default;

private:
    Chart() = default;

    std::vector<std::string> names_;
    std::vector<Interval> box_;
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(std::vector<std::string> names, std::vector<Interval> box) {
    return std::make_shared<const Chart>(std::move(names), std::move(box));
}

/// Chart of the total space of a trivial rank-k bundle: base coordinates first,
/// then fiber coordinates. Fiber names default to a1..ak, with underscores
/// appended while they collide with base names.
Chart total_space_chart(const Chart& base, std::size_t rank, Interval fiber_box = {-1.0, 1.0},
                        std::vector<std::string> fiber_names = {});

/// Chart (x, xdot) of the tangent bundle TM; velocity names are `d<name>`.
Chart tangent_chart(const Chart& base, Interval velocity_box = {-1.0, 1.0});

/// Sampling policy for randomized checks.
struct SampleSpec {
    std::size_t samples = 100;
    std::uint64_t seed = 0;
    double tol = 1e-8;
    double h = 1e-5;

    void validate() const;
};

}  // namespace morphic
