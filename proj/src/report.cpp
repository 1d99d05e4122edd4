#include "morphic/report.hpp"

#include <algorithm>

namespace morphic {

const char* to_string(Tier tier) {
    switch (tier) {
        case Tier::SymbolicZero: return "SymbolicZero";
        case Tier::NumericZero: return "NumericZero";
        case Tier::NonZero: return "NonZero";
    }
    return "?";
}

const char* to_string(Certificate cert) {
    switch (cert) {
        case Certificate::None: return "none";
        case Certificate::Symbolic: return "Symbolic";
        case Certificate::Numeric: return "Numeric(grid)";
    }
    return "?";
}

ZeroVerdict& ZeroVerdict::merge(const ZeroVerdict& other) {
    bool take_witness = other.tier == Tier::NonZero &&
                        (tier != Tier::NonZero || other.max_residual > max_residual);
    if (take_witness) witness = other.witness;
    tier = std::max(tier, other.tier);
    max_residual = std::max(max_residual, other.max_residual);
    return *this;
}

CheckEntry& Report::add(CheckEntry entry) {
    entries_.push_back(std::move(entry));
    return entries_.back();
}

CheckEntry& Report::add(std::string name, const ZeroVerdict& verdict, std::string label) {
    CheckEntry e;
    e.name = std::move(name);
    e.tier = verdict.tier;
    e.max_residual = verdict.max_residual;
    e.witness = verdict.witness;
    if (verdict.tier == Tier::NonZero) e.label = std::move(label);
    e.certificate = certificate_;
    return add(std::move(e));
}

CheckEntry& Report::fail(std::string name, std::string note) {
    CheckEntry e;
    e.name = std::move(name);
    e.tier = Tier::NonZero;
    e.note = std::move(note);
    e.certificate = certificate_;
    return add(std::move(e));
}

CheckEntry& Report::pass(std::string name, std::string note) {
    CheckEntry e;
    e.name = std::move(name);
    e.tier = Tier::SymbolicZero;
    e.note = std::move(note);
    e.certificate = certificate_;
    return add(std::move(e));
}

void Report::append(const Report& other, const std::string& prefix) {
    for (auto e : other.entries_) {
        e.name = prefix + e.name;
        entries_.push_back(std::move(e));
    }
    certificate_ = std::max(certificate_, other.certificate_);
}

const CheckEntry* Report::find(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return &e;
    return nullptr;
}

bool Report::passed() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const CheckEntry& e) { return e.passed(); });
}

}  // namespace morphic
