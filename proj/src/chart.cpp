#include "morphic/chart.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace morphic {

Chart::Chart(std::vector<std::string> names, std::vector<Interval> box)
    : names_(std::move(names)), box_(std::move(box)) {
    if (names_.size() != box_.size())
        throw std::invalid_argument("chart: box has " + std::to_string(box_.size()) +
                                    " intervals for " + std::to_string(names_.size()) +
                                    " coordinates");
    std::set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty()) throw std::invalid_argument("chart: empty coordinate name");
        if (!seen.insert(n).second)
            throw std::invalid_argument("chart: duplicate coordinate name '" + n + "'");
    }
    for (std::size_t i = 0; i < box_.size(); ++i) {
        if (!(box_[i].lo < box_[i].hi))
            throw std::invalid_argument("chart: degenerate interval for '" + names_[i] + "'");
    }
}

std::optional<std::size_t> Chart::index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

bool Chart::contains(const std::vector<double>& point) const {
    if (point.size() != box_.size()) return false;
    for (std::size_t i = 0; i < point.size(); ++i)
        if (!box_[i].contains(point[i])) return false;
    return true;
}

Chart total_space_chart(const Chart& base, std::size_t rank, Interval fiber_box,
                        std::vector<std::string> fiber_names) {
    std::vector<std::string> names = base.names();
    std::vector<Interval> box = base.box();
    if (fiber_names.empty()) {
        for (std::size_t a = 0; a < rank; ++a) {
            std::string n = "a" + std::to_string(a + 1);
            while (base.index_of(n)) n += "_";
            fiber_names.push_back(n);
        }
    }
    if (fiber_names.size() != rank)
        throw std::invalid_argument("total space chart: expected " + std::to_string(rank) +
                                    " fiber names");
    for (auto& n : fiber_names) {
        names.push_back(n);
        box.push_back(fiber_box);
    }
    return Chart(std::move(names), std::move(box));
}

Chart tangent_chart(const Chart& base, Interval velocity_box) {
    std::vector<std::string> names = base.names();
    std::vector<Interval> box = base.box();
    for (const auto& n : base.names()) {
        std::string v = "d" + n;
        while (base.index_of(v)) v += "_";
        names.push_back(v);
        box.push_back(velocity_box);
    }
    return Chart(std::move(names), std::move(box));
}

void SampleSpec::validate() const {
    if (samples < 1) throw std::invalid_argument("sampling: samples must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("sampling: tol must be > 0");
    if (!(h > 0.0)) throw std::invalid_argument("sampling: h must be > 0");
}

}  // namespace morphic
