#pragma once

// Partial F_M-connections on A/F_core in an adapted chart where
// F_M = span{d_1, ..., d_l}.
//
// Coefficients: gamma(i, alpha, beta) = Gamma^beta_{i alpha}, the Q̄_beta
// coefficient of nabla_{d_i} Q̄_alpha. All indices are 0-based in the API.

#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "morphic/algebroid.hpp"
#include "morphic/foliation.hpp"
#include "morphic/report.hpp"

namespace morphic {

/// [i][alpha][beta] = Gamma^beta_{i alpha}.
using GammaTensor = std::vector<linalg::ExprMatrix>;

class PartialConnection {
public:
    /// Throws std::invalid_argument on shape errors and FrameRankError when
    /// core and complement together do not frame A.
    PartialConnection(LieAlgebroid algebroid, std::size_t l, std::vector<Section> core,
                      std::vector<Section> complement, GammaTensor gamma);

    const LieAlgebroid& algebroid() const { return algebroid_; }
    const ChartPtr& chart() const { return algebroid_.chart(); }
    std::size_t leaves() const { return l_; }
    std::size_t quotient_rank() const { return complement_.size(); }
    const std::vector<Section>& core() const { return core_; }
    const std::vector<Section>& complement() const { return complement_; }
    Frame core_frame() const;
    Frame complement_frame() const;
    const GammaTensor& gamma() const { return gamma_; }
    const Expr& gamma(std::size_t i, std::size_t alpha, std::size_t beta) const {
        return gamma_.at(i).at(alpha).at(beta);
    }

    /// Q̄-coefficients of the class of `a` modulo F_core.
    std::vector<Expr> reduce(const Section& a) const;

private:
    LieAlgebroid algebroid_;
    std::size_t l_;
    std::vector<Section> core_;
    std::vector<Section> complement_;
    GammaTensor gamma_;
    std::shared_ptr<const Expansion> expansion_;  // over core followed by complement
};

/// nabla_X ā in Q̄-coefficients. X must have no components beyond d_l.
std::vector<Expr> nabla(const PartialConnection& c, const VectorField& x, const Section& a);

/// Same, for a class given by its Q̄-coefficients.
std::vector<Expr> nabla_coefficients(const PartialConnection& c, const VectorField& x, const std::vector<Expr>& f);

/// R[i][j][alpha][beta] = R^beta_{ij alpha}.
std::vector<std::vector<linalg::ExprMatrix>> curvature(const PartialConnection& c);
/// One entry "curvature", labelled with the worst (i, j) pair.
Report is_flat(const PartialConnection& c, const SampleSpec& spec);

/// Integrates df^alpha/dx_i = -Gamma^alpha_{i beta} f^beta along successive
/// coordinate segments (index < l, signed length). Throws FlowError when a
/// segment leaves the box.
std::vector<double> parallel_transport(const PartialConnection& c, std::span<const double> start,
                                       const std::vector<std::pair<std::size_t, double>>& path,
                                       std::vector<double> f0);

class NotFlat : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotParallel : public std::runtime_error {
public:
    NotParallel(const std::string& message, double residual) : std::runtime_error(message), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

enum class FrameMethod { Auto, Grid };

struct ParallelFrame {
    /// Sections P_alpha = sum_beta Phi_{beta alpha} Q_beta with parallel classes.
    std::vector<Section> sections;
    Certificate certificate = Certificate::Symbolic;
    /// "complement", "candidate", "constant-exponential" or "grid".
    std::string method;
};

/// Number of grid points per coordinate for numeric parallel frames.
constexpr std::size_t kGridPoints = 17;

/// Symbolic tiers first: Gamma == 0 returns Q; a user candidate is verified;
/// constant commuting nilpotent or diagonal Gamma gives the closed-form
/// exponential. Otherwise the frame is tabulated: transports from the
/// leaf-center slice over a kGridPoints^n grid covering the box, multilinear
/// interpolation. Leaf derivatives come from the transport equation,
/// transversal ones from central differences with step equal to the grid
/// spacing. FrameMethod::Grid skips the closed forms.
/// Throws NotFlat or NotParallel.
ParallelFrame parallel_frame(const PartialConnection& c, const SampleSpec& spec,
                             const std::optional<std::vector<Section>>& candidate = std::nullopt,
                             FrameMethod method = FrameMethod::Auto);

/// Number of random loops used by holonomy_trivial.
constexpr std::size_t kHolonomyLoops = 50;

/// Transport around random coordinate rectangles in leaf directions (an
/// out-and-back segment when l = 1). The entry residual is the worst loop
/// defect, compared with spec.tol.
Report holonomy_trivial(const PartialConnection& c, const SampleSpec& spec);

}  // namespace morphic
