#include "morphic/gallery.hpp"

namespace morphic {

namespace {

const char* kHeisenbergIdeal = R"({
  "schema": "morphic-model/1",
  "chart": {"coordinates": ["x1"], "box": [[-1, 1]]},
  "algebroid": {"rank": 3, "structure": {"C[3][1][2]": "1", "C[3][2][1]": "-1"}},
  "im": {"l": 0, "core": [["0", "0", "1"]], "complement": [["1", "0", "0"], ["0", "1", "0"]]}
})";

const char* kNonideal = R"({
  "schema": "morphic-model/1",
  "chart": {"coordinates": ["x1"], "box": [[-1, 1]]},
  "algebroid": {"rank": 3, "structure": {"C[3][1][2]": "1", "C[3][2][1]": "-1"}},
  "im": {"l": 0, "core": [["1", "0", "0"]], "complement": [["0", "1", "0"], ["0", "0", "1"]]}
})";

const char* kTranslation = R"({
  "schema": "morphic-model/1",
  "chart": {"coordinates": ["x1", "x2"], "box": [[-1, 1], [-1, 1]]},
  "algebroid": {"rank": 2, "anchor": {"rho[1][1]": "1", "rho[2][2]": "1"}},
  "im": {"l": 1, "core": [["1", "0"]], "complement": [["0", "1"]]}
})";

const char* kTranslationNoCore = R"({
  "schema": "morphic-model/1",
  "chart": {"coordinates": ["x1", "x2"], "box": [[-1, 1], [-1, 1]]},
  "algebroid": {"rank": 2, "anchor": {"rho[1][1]": "1", "rho[2][2]": "1"}},
  "im": {"l": 1, "core": [], "complement": [["1", "0"], ["0", "1"]]}
})";

const char* kPresymplecticKernel = R"({
  "schema": "morphic-model/1",
  "chart": {"coordinates": ["x3", "x4", "x1", "x2"], "box": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]]},
  "dirac": {
    "frame": [
      {"X": ["0", "0", "1", "0"], "xi": ["0", "0", "0", "1"]},
      {"X": ["0", "0", "0", "1"], "xi": ["0", "0", "-1", "0"]},
      {"X": ["1", "0", "0", "0"], "xi": ["0", "0", "0", "0"]},
      {"X": ["0", "1", "0", "0"], "xi": ["0", "0", "0", "0"]}
    ],
    "characteristic": [3, 4]
  }
})";

const char* kNonflat = R"({
  "schema": "morphic-model/1",
  "chart": {"coordinates": ["x1", "x2"], "box": [[-1, 1], [-1, 1]]},
  "algebroid": {"rank": 1},
  "im": {"l": 2, "core": [], "complement": [["1"]], "gamma": {"gamma[1][1][1]": "x2"}}
})";

const char* kPresymplecticTwisted = R"({
  "schema": "morphic-model/1",
  "chart": {"coordinates": ["x1", "x2", "x3", "x4"], "box": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]]},
  "dirac": {
    "frame": [
      {"X": ["1", "0", "0", "0"], "xi": ["0", "0", "0", "0"]},
      {"X": ["0", "1", "0", "0"], "xi": ["0", "0", "0", "0"]},
      {"X": ["0", "0", "1", "x2"], "xi": ["0", "0", "-x2", "1"]},
      {"X": ["0", "0", "0", "1"], "xi": ["0", "0", "-1", "0"]}
    ],
    "characteristic": [1, 2]
  }
})";

const char* kTwistedConnection = R"({
  "schema": "morphic-model/1",
  "chart": {"coordinates": ["x1", "x2", "x3", "x4"], "box": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]]},
  "algebroid": {
    "rank": 4,
    "anchor": {"rho[1][1]": "1", "rho[2][2]": "1", "rho[3][3]": "1", "rho[4][3]": "x2", "rho[4][4]": "1"},
    "structure": {"C[4][2][3]": "1", "C[4][3][2]": "-1"}
  },
  "im": {
    "l": 2,
    "core": [["1", "0", "0", "0"], ["0", "1", "0", "0"]],
    "complement": [["0", "0", "1", "0"], ["0", "0", "0", "1"]],
    "gamma": {"gamma[2][1][2]": "1"},
    "parallel_frame_method": "%METHOD%"
  }
})";

const char* kVarying = R"({
  "schema": "morphic-model/1",
  "chart": {"coordinates": ["x1", "x2"], "box": [[-1, 1], [-1, 1]]},
  "algebroid": {"rank": 2},
  "im": {
    "l": 1,
    "core": [],
    "complement": [["1", "0"], ["0", "1"]],
    "gamma": {"gamma[1][1][2]": "x2", "gamma[1][2][2]": "1/2"}
  }
})";

const char* kCorruptedJacobi = R"({
  "schema": "morphic-model/1",
  "chart": {"coordinates": ["x1"], "box": [[-1, 1]]},
  "algebroid": {
    "rank": 3,
    "structure": {
      "C[3][1][2]": "x1", "C[3][2][1]": "-x1",
      "C[1][2][3]": "1", "C[1][3][2]": "-1",
      "C[1][1][3]": "1", "C[1][3][1]": "-1"
    }
  }
})";

const char* kAffineAlgebra = R"({
  "schema": "morphic-model/1",
  "chart": {"coordinates": ["x1", "x2"], "box": [[-1, 1], [-1, 1]]},
  "algebroid": {"rank": 2, "structure": {"C[2][1][2]": "1", "C[2][2][1]": "-1"}},
  "im": {"l": 1, "core": [], "complement": [["1", "0"], ["0", "1"]]}
})";

const char* kNotInvolutive = R"({
  "schema": "morphic-model/1",
  "chart": {"coordinates": ["x1"], "box": [[-1, 1]]},
  "algebroid": {"rank": 2},
  "fa": {"l": 1, "fiber_coordinates": ["a1", "a2"], "fields": [["1", "0", "0"], ["0", "1", "x1"]]}
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    s.replace(s.find(from), from.size(), to);
    return s;
}

}  // namespace

const std::vector<GalleryEntry>& gallery() {
    static const std::vector<GalleryEntry> entries{
        {"heisenberg-ideal", "roundtrip", "Heisenberg algebra over a line, core = center span{e3}, l = 0",
         kHeisenbergIdeal},
        {"translation-action", "roundtrip", "A = TM over the plane, F_M = span{d1}, F_core = span{e1}",
         kTranslation},
        {"translation-no-core", "roundtrip", "A = TM over the plane, F_M = span{d1}, F_core = 0", kTranslationNoCore},
        {"presymplectic-kernel", "dirac", "graph of dx1^dx2 on R^4, characteristic span{d3, d4}",
         kPresymplecticKernel},
        {"nonflat-counterexample", "check-im", "rank 1, l = 2, Gamma^1_11 = x2: curved", kNonflat},
        {"nonideal-counterexample", "check-im", "Heisenberg with core span{e1}: not an ideal", kNonideal},
        {"presymplectic-twisted", "dirac", "graph of dx3^dx4 in a frame twisted along x2", kPresymplecticTwisted},
        {"twisted-connection", "roundtrip", "constant nilpotent connection, closed-form parallel frame",
         replace(kTwistedConnection, "%METHOD%", "auto")},
        {"twisted-grid", "roundtrip", "twisted-connection with a tabulated parallel frame",
         replace(kTwistedConnection, "%METHOD%", "grid")},
        {"varying-connection", "roundtrip", "x-dependent connection, tabulated parallel frame", kVarying},
        {"affine-algebra", "quotient", "bundle of affine Lie algebras, one leaf per x2", kAffineAlgebra},
        {"corrupted-jacobi", "validate", "structure functions violating Jacobi by -x1 e3", kCorruptedJacobi},
        {"not-involutive", "extract", "frame {d1, d_a1 + x1 d_a2} on the total space", kNotInvolutive},
    };
    return entries;
}

const GalleryEntry* find_gallery(std::string_view name) {
    for (const auto& e : gallery())
        if (e.name == name) return &e;
    return nullptr;
}

}  // namespace morphic
