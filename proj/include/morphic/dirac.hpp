#pragma once

// Regular Dirac structures D in TM + T*M given by a frame of n pairs (X, xi),
// viewed as Lie algebroids with anchor pr_TM and the Dorfman bracket
//   [(X, xi), (Y, eta)] = ([X, Y], L_X eta - i_Y d xi),
// and the IM-foliation induced by a designated characteristic subframe.

#include <stdexcept>
#include <vector>

#include "morphic/algebroid.hpp"
#include "morphic/geometry.hpp"
#include "morphic/imfoliation.hpp"
#include "morphic/report.hpp"

namespace morphic {

struct DiracPair {
    VectorField x;
    OneForm xi;
};

class DiracError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DiracFrame {
public:
    /// Throws ChartMismatch when a pair lives on another chart and
    /// std::invalid_argument unless there are exactly n pairs.
    DiracFrame(ChartPtr chart, std::vector<DiracPair> members);

    const ChartPtr& chart() const { return chart_; }
    std::size_t size() const { return members_.size(); }
    const std::vector<DiracPair>& members() const { return members_; }
    const DiracPair& member(std::size_t i) const { return members_.at(i); }

    /// Members as 2n-component vectors (X components, then xi components).
    Frame as_frame() const;

private:
    ChartPtr chart_;
    std::vector<DiracPair> members_;
};

DiracPair dorfman(const DiracPair& u, const DiracPair& v);

/// Entries "rank", "isotropy" and "closure".
Report check_dirac(const DiracFrame& d, const SampleSpec& spec);

/// Anchor columns X_alpha; C^g_ab from expanding dorfman(d_a, d_b) over the
/// frame. Throws DiracError when check_dirac fails or an expansion does not
/// reproduce the bracket.
LieAlgebroid dirac_to_algebroid(const DiracFrame& d, const SampleSpec& spec);

/// F_core = the members listed in `characteristic` (0-based; their forms
/// must vanish and their vector parts must span d_1..d_l), Q = the others,
/// Gamma from dorfman((d_i, 0), Q_alpha) modulo F_core. Throws DiracError.
IMFoliation dirac_im(const DiracFrame& d, const std::vector<std::size_t>& characteristic, const SampleSpec& spec);

}  // namespace morphic
