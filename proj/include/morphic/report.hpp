#pragma once

#include <optional>
#include <string>
#include <vector>

namespace morphic {

/// Three-valued outcome of a zero test. Order matters: later is worse.
enum class Tier { SymbolicZero, NumericZero, NonZero };

/// How the parallel frame behind a check was obtained.
enum class Certificate { None, Symbolic, Numeric };

const char* to_string(Tier tier);
const char* to_string(Certificate cert);

struct ZeroVerdict {
    Tier tier = Tier::SymbolicZero;
    double max_residual = 0.0;
    std::vector<double> witness;  // worst point when tier == NonZero

    bool holds() const { return tier != Tier::NonZero; }

    /// Worst-of combination; keeps the witness of the failing side.
    ZeroVerdict& merge(const ZeroVerdict& other);
};

struct CheckEntry {
    std::string name;
    Tier tier = Tier::SymbolicZero;
    double max_residual = 0.0;
    std::vector<double> witness;
    std::string label;  // e.g. which frame members produced the witness
    Certificate certificate = Certificate::None;
    std::string note;

    bool passed() const { return tier != Tier::NonZero; }
};

class Report {
public:
    explicit Report(std::string command = {}) : command_(std::move(command)) {}

    const std::string& command() const { return command_; }
    const std::vector<CheckEntry>& entries() const { return entries_; }
    Certificate certificate() const { return certificate_; }
    void set_certificate(Certificate c) { certificate_ = c; }

    CheckEntry& add(CheckEntry entry);
    CheckEntry& add(std::string name, const ZeroVerdict& verdict, std::string label = {});
    CheckEntry& fail(std::string name, std::string note);
    CheckEntry& pass(std::string name, std::string note = {});

    /// Appends entries of `other`, prefixing their names.
    void append(const Report& other, const std::string& prefix = {});

    const CheckEntry* find(const std::string& name) const;
    bool passed() const;

private:
    std::string command_;
    std::vector<CheckEntry> entries_;
    Certificate certificate_ = Certificate::None;
};

}  // namespace morphic
