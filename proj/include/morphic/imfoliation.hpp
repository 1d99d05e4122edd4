#pragma once

// IM-foliations (A, F_M, F_core, nabla) in an adapted chart, the morphic
// foliation F_A they generate on the total space of A, the connection read
// back from a morphic foliation, and the quotient algebroid over the leaf
// space (modelled by the transversal slice through the center of the box).
//
// Conditions quantified over all parallel sections are checked on a single
// parallel frame P. This suffices: every parallel section is a combination
// of P with coefficients constant along F_M, and rho(F_core) lies in F_M,
// so the correction terms produced by such coefficients vanish.

#include <optional>
#include <string>
#include <vector>

#include "morphic/algebroid.hpp"
#include "morphic/connection.hpp"
#include "morphic/report.hpp"

namespace morphic {

struct IMFoliation {
    PartialConnection connection;
    /// Optional closed-form parallel frame to verify instead of computing one.
    std::optional<std::vector<Section>> candidate;
    FrameMethod frame_method = FrameMethod::Auto;

    const LieAlgebroid& algebroid() const { return connection.algebroid(); }
    std::size_t leaves() const { return connection.leaves(); }
};

/// Tolerance applied when the parallel frame is tabulated.
constexpr double kNumericTierTol = 1e-4;

enum class Provenance { Constructed, User };

/// Spanning frame of l linear fields followed by r core fields on the total
/// space chart (base coordinates, then fiber coordinates).
struct MorphicFoliation {
    ChartPtr total;
    std::size_t base_dim = 0;
    std::size_t rank = 0;
    std::size_t l = 0;
    std::vector<VectorField> fields;
    Provenance provenance = Provenance::User;
    Certificate certificate = Certificate::Symbolic;
    /// Parallel frame followed by the core frame, when constructed.
    std::vector<Section> fiber_frame;
};

/// Condition entries are named "(0) ..." through "(4) ...".
Report check_im(const IMFoliation& im, const SampleSpec& spec);

/// The parallel frame check_im and construct_fa use. Throws NotFlat or NotParallel.
ParallelFrame im_parallel_frame(const IMFoliation& im, const SampleSpec& spec);

/// Linear fields X_i = d_i + ((d_i P) P^{-1} a) . d_a for the full frame
/// P = [parallel | core], i < l, then the core fields. Throws
/// std::runtime_error when check_im fails.
MorphicFoliation construct_fa(const IMFoliation& im, const SampleSpec& spec);

/// (i) involutivity on the total space, (ii) closure of the induced
/// generators of F_A -> F_M inside TA -> TM, (iii) the anchor of TA maps the
/// generators tangent to F_M inside TM.
Report check_morphic(const MorphicFoliation& fa, const LieAlgebroid& a, const SampleSpec& spec);

struct Extraction {
    PartialConnection connection;
    Report report;
};

/// Gamma from D_X of the complement frame along linear generators combined
/// to lie over d_1..d_l, reduced modulo the core. `complement` defaults to a
/// completion of the core by unit sections. The report holds the
/// independence-of-lift spot check.
Extraction extract_nabla(const MorphicFoliation& fa, const LieAlgebroid& a, const SampleSpec& spec,
                         const std::optional<std::vector<Section>>& complement = std::nullopt);

struct Quotient {
    std::optional<LieAlgebroid> algebroid;
    Report report;
};

/// Requires check_im and holonomy_trivial to pass.
Quotient quotient(const IMFoliation& im, const SampleSpec& spec);

/// check_im, construct_fa, check_morphic, extract_nabla, coefficient comparison.
Report roundtrip(const IMFoliation& im, const SampleSpec& spec);

/// Name used in witness labels: "e<i>" for unit sections, otherwise fallback.
std::string section_name(const Section& s, const std::string& fallback);

}  // namespace morphic
