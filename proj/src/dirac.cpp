#include "morphic/dirac.hpp"

#include <algorithm>

#include "morphic/foliation.hpp"
#include "morphic/sampling.hpp"

namespace morphic {

namespace {

std::vector<Expr> stacked(const DiracPair& p) {
    std::vector<Expr> out = p.x.components();
    out.insert(out.end(), p.xi.components().begin(), p.xi.components().end());
    return out;
}

std::string pair_label(std::size_t i, std::size_t j) {
    return "(d" + std::to_string(i + 1) + ", d" + std::to_string(j + 1) + ")";
}

// Solves for frame coefficients through an n x n minor that is invertible at
// a sample point; callers verify the remaining rows.
class FrameSolver {
public:
    FrameSolver(const DiracFrame& d, const SampleSpec& spec) {
        const auto n = d.size();
        Frame f = d.as_frame();
        Sampler sampler(*d.chart(), spec.seed);
        std::vector<std::vector<double>> columns;
        for (int attempt = 0;; ++attempt) {
            try {
                columns = f.evaluate(sampler.next());
                break;
            } catch (const EvalError&) {
                if (attempt == 20) throw DiracError("frame cannot be evaluated");
            }
        }
        std::vector<std::vector<double>> chosen(n);
        for (std::size_t r = 0; r < 2 * n && rows_.size() < n; ++r) {
            auto trial = chosen;
            for (std::size_t c = 0; c < n; ++c) trial[c].push_back(columns[c][r]);
            if (linalg::numeric_rank(trial) > rows_.size()) {
                chosen = std::move(trial);
                rows_.push_back(r);
            }
        }
        if (rows_.size() < n) throw FrameRankError("Dirac frame is rank deficient");
        linalg::ExprMatrix minor(n, std::vector<Expr>(n));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) minor[r][c] = f.member(c)[rows_[r]];
        auto inv = linalg::inverse(minor);
        if (!inv) throw FrameRankError("Dirac frame is rank deficient");
        inverse_ = std::move(*inv);
    }

    std::vector<Expr> coefficients(const std::vector<Expr>& w) const {
        std::vector<Expr> rhs;
        for (auto r : rows_) rhs.push_back(w[r]);
        auto c = linalg::multiply(inverse_, rhs);
        for (auto& e : c) e = simplify(e);
        return c;
    }

private:
    std::vector<std::size_t> rows_;
    linalg::ExprMatrix inverse_;
};

ZeroVerdict reproduces(const DiracFrame& d, const std::vector<Expr>& coeffs, const std::vector<Expr>& w,
                       const SampleSpec& spec) {
    std::vector<Expr> diff = w;
    for (std::size_t c = 0; c < d.size(); ++c) {
        auto m = stacked(d.member(c));
        for (std::size_t r = 0; r < diff.size(); ++r) diff[r] -= coeffs[c] * m[r];
    }
    for (auto& e : diff) e = simplify(e);
    return is_zero(diff, *d.chart(), spec);
}

std::string first_failure(const Report& r) {
    for (const auto& e : r.entries())
        if (!e.passed()) return e.name + (e.label.empty() ? "" : " " + e.label);
    return {};
}

}  // namespace

DiracFrame::DiracFrame(ChartPtr chart, std::vector<DiracPair> members)
    : chart_(std::move(chart)), members_(std::move(members)) {
    if (members_.size() != chart_->dimension())
        throw std::invalid_argument("a Dirac frame over a " + std::to_string(chart_->dimension()) +
                                    "-dimensional chart needs that many members");
    for (const auto& m : members_)
        if (!m.x.chart()->compatible(*chart_) || !m.xi.chart()->compatible(*chart_))
            throw ChartMismatch("Dirac frame member on a different chart");
}

Frame DiracFrame::as_frame() const {
    std::vector<std::vector<Expr>> out;
    for (const auto& m : members_) out.push_back(stacked(m));
    return Frame(chart_, 2 * chart_->dimension(), std::move(out));
}

DiracPair dorfman(const DiracPair& u, const DiracPair& v) {
    if (!u.x.chart()->compatible(*v.x.chart())) throw ChartMismatch("Dorfman bracket across charts");
    OneForm xi = lie_derivative_oneform(u.x, v.xi) - interior(v.x, d1(u.xi));
    std::vector<Expr> comps;
    for (const auto& e : xi.components()) comps.push_back(simplify(e));
    return DiracPair{lie_bracket(u.x, v.x), OneForm(u.x.chart(), std::move(comps))};
}

Report check_dirac(const DiracFrame& d, const SampleSpec& spec) {
    Report report("dirac");
    Frame f = d.as_frame();
    auto rank = independence(f, spec);
    report.add("rank", rank);
    if (!rank.holds()) return report;

    ZeroVerdict iso;
    std::string iso_label;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i; j < d.size(); ++j) {
            Expr p = pairing(d.member(i).xi, d.member(j).x) + pairing(d.member(j).xi, d.member(i).x);
            auto v = is_zero(p, *d.chart(), spec);
            if (!v.holds() && (iso.holds() || v.max_residual > iso.max_residual)) iso_label = pair_label(i, j);
            iso.merge(v);
        }
    report.add("isotropy", iso, iso_label);

    ZeroVerdict closed;
    std::string closed_label;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            auto v = membership(stacked(dorfman(d.member(i), d.member(j))), f, spec);
            if (!v.holds() && (closed.holds() || v.max_residual > closed.max_residual)) closed_label = pair_label(i, j);
            closed.merge(v);
        }
    report.add("closure", closed, closed_label);
    return report;
}

LieAlgebroid dirac_to_algebroid(const DiracFrame& d, const SampleSpec& spec) {
    Report r = check_dirac(d, spec);
    if (!r.passed()) throw DiracError("not a Dirac structure: " + first_failure(r));
    const auto n = d.size();
    FrameSolver solver(d, spec);
    StructureTensor c(n, linalg::ExprMatrix(n, std::vector<Expr>(n)));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            auto w = stacked(dorfman(d.member(a), d.member(b)));
            auto coeffs = solver.coefficients(w);
            if (!reproduces(d, coeffs, w, spec).holds())
                throw DiracError("bracket " + pair_label(a, b) + " does not expand over the frame");
            for (std::size_t g = 0; g < n; ++g) {
                c[g][a][b] = coeffs[g];
                c[g][b][a] = simplify(-coeffs[g]);
            }
        }
    linalg::ExprMatrix anchor(n, std::vector<Expr>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < n; ++a) anchor[i][a] = simplify(d.member(a).x[i]);
    return LieAlgebroid(d.chart(), n, std::move(anchor), std::move(c));
}

IMFoliation dirac_im(const DiracFrame& d, const std::vector<std::size_t>& characteristic, const SampleSpec& spec) {
    const auto n = d.size();
    const auto l = characteristic.size();
    std::vector<bool> is_char(n, false);
    for (auto c : characteristic) {
        if (c >= n) throw DiracError("characteristic index " + std::to_string(c + 1) + " out of range");
        if (is_char[c]) throw DiracError("characteristic index " + std::to_string(c + 1) + " repeated");
        is_char[c] = true;
        for (const auto& e : d.member(c).xi.components())
            if (!simplify(e).is_zero_literal())
                throw DiracError("characteristic member d" + std::to_string(c + 1) + " has a nonzero form part");
    }
    std::vector<VectorField> xs;
    for (auto c : characteristic) xs.push_back(d.member(c).x);
    Frame fm = Frame::coordinate(d.chart(), l);
    if (l > 0) {
        if (!independence(Frame::of_fields(d.chart(), xs), spec).holds())
            throw DiracError("characteristic vector fields are not independent");
        for (std::size_t j = 0; j < l; ++j)
            if (!membership(xs[j].components(), fm, spec).holds())
                throw DiracError("characteristic member d" + std::to_string(characteristic[j] + 1) +
                                 " is not tangent to the first " + std::to_string(l) + " coordinates");
    }

    LieAlgebroid a = dirac_to_algebroid(d, spec);
    FrameSolver solver(d, spec);
    std::vector<Section> core;
    std::vector<std::size_t> q_index;
    for (auto c : characteristic) core.push_back(a.unit(c));
    std::vector<Section> q;
    for (std::size_t m = 0; m < n; ++m)
        if (!is_char[m]) {
            q.push_back(a.unit(m));
            q_index.push_back(m);
        }

    GammaTensor gamma(l, linalg::ExprMatrix(q.size(), std::vector<Expr>(q.size())));
    for (std::size_t i = 0; i < l; ++i) {
        DiracPair di{VectorField::coordinate(d.chart(), i), OneForm::zero(d.chart())};
        for (std::size_t al = 0; al < q.size(); ++al) {
            auto w = stacked(dorfman(di, d.member(q_index[al])));
            auto coeffs = solver.coefficients(w);
            if (!reproduces(d, coeffs, w, spec).holds())
                throw DiracError("[(d" + std::to_string(i + 1) + ", 0), d" + std::to_string(q_index[al] + 1) +
                                 "] does not expand over the frame");
            for (std::size_t be = 0; be < q.size(); ++be) gamma[i][al][be] = coeffs[q_index[be]];
        }
    }
    return IMFoliation{PartialConnection(std::move(a), l, std::move(core), std::move(q), std::move(gamma)), std::nullopt,
                       FrameMethod::Auto};
}

}  // namespace morphic
