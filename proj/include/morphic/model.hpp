#pragma once

// JSON model files. Indices in entry keys and index lists are 1-based;
// expressions are strings in the coordinate grammar, sparse tensors omit
// zero entries.
//
//   {
//     "schema": "morphic-model/1",
//     "chart": {"coordinates": ["x1", "x2"], "box": [[-1, 1], [-1, 1]]},
//     "algebroid": {"rank": 2, "anchor": {"rho[1][1]": "1"},
//                   "structure": {"C[2][1][2]": "x1", "C[2][2][1]": "-x1"}},
//     "im": {"l": 1, "core": [], "complement": [["1", "0"], ["0", "1"]],
//            "gamma": {"gamma[1][1][2]": "1"},
//            "parallel_frame": [...], "parallel_frame_method": "auto"},
//     "dirac": {"frame": [{"X": ["1", "0"], "xi": ["0", "1"]}, ...],
//               "characteristic": [2]},
//     "fa": {"l": 1, "fiber_coordinates": ["a1", "a2"],
//            "fiber_box": [[-1, 1], [-1, 1]], "fields": [["1", "0", "0", "a1"]],
//            "provenance": "constructed"},
//     "sampling": {"samples": 100, "seed": 0, "tol": 1e-8, "h": 1e-5}
//   }

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "morphic/algebroid.hpp"
#include "morphic/connection.hpp"
#include "morphic/dirac.hpp"
#include "morphic/imfoliation.hpp"

namespace morphic {

constexpr const char* kModelSchema = "morphic-model/1";

/// Input error; the message names the source, block and entry.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ImBlock {
    std::size_t l = 0;
    std::vector<Section> core;
    std::vector<Section> complement;
    GammaTensor gamma;
    std::optional<std::vector<Section>> candidate;
    FrameMethod method = FrameMethod::Auto;
};

struct DiracBlock {
    std::vector<DiracPair> frame;
    std::vector<std::size_t> characteristic;  // 0-based
};

struct FaBlock {
    std::size_t l = 0;
    ChartPtr total;
    std::vector<VectorField> fields;
    Provenance provenance = Provenance::User;
};

struct Model {
    std::string source;
    ChartPtr chart;
    std::optional<LieAlgebroid> algebroid;
    std::optional<ImBlock> im;
    std::optional<DiracBlock> dirac;
    std::optional<FaBlock> fa;
    SampleSpec sampling;

    /// Each throws ModelError when a required block is missing or inconsistent.
    const LieAlgebroid& require_algebroid() const;
    IMFoliation im_foliation() const;
    MorphicFoliation morphic() const;
    DiracFrame dirac_frame() const;
};

Model parse_model(std::string_view text, const std::string& source);
Model load_model(const std::string& path);

/// Pretty-printed JSON with a trailing newline. Throws ModelError when an
/// expression is only known numerically.
std::string dump_model(const Model& m);

/// Replaces the im block with the data of `c`.
void set_im(Model& m, const PartialConnection& c, FrameMethod method = FrameMethod::Auto);
/// Replaces the fa block.
void set_fa(Model& m, const MorphicFoliation& fa);

/// Expression holds a tabulated (numeric) node.
bool is_numeric(const Expr& e);

}  // namespace morphic
