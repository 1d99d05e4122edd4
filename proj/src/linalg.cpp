#include "morphic/linalg.hpp"

#include <Eigen/Dense>
#include <bit>
#include <cmath>

namespace morphic::linalg {

namespace {

Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& columns, std::size_t rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j)
        for (std::size_t i = 0; i < rows; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = columns[j][i];
    return m;
}

constexpr double kRankCutoff = 1e-10;

}  // namespace

LeastSquares least_squares(const std::vector<std::vector<double>>& columns, std::span<const double> rhs) {
    LeastSquares out;
    const auto rows = rhs.size();
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i) b(static_cast<Eigen::Index>(i)) = rhs[i];
    if (columns.empty()) {
        out.residual = b.norm();
        return out;
    }
    Eigen::MatrixXd a = to_eigen(columns, rows);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double cutoff = kRankCutoff * std::max(1.0, sv.size() ? sv(0) : 0.0);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    out.rank = rank;
    out.full_rank = rank == columns.size();
    svd.setThreshold(kRankCutoff);
    Eigen::VectorXd x = svd.solve(b);
    out.coeffs.assign(x.data(), x.data() + x.size());
    out.residual = (a * x - b).norm();
    return out;
}

std::size_t numeric_rank(const std::vector<std::vector<double>>& columns) {
    if (columns.empty()) return 0;
    Eigen::MatrixXd a = to_eigen(columns, columns.front().size());
    if (a.rows() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    double cutoff = kRankCutoff * std::max(1.0, sv(0));
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return rank;
}

std::optional<RationalMatrix> as_rational(const ExprMatrix& m) {
    RationalMatrix out;
    for (const auto& row : m) {
        std::vector<Rational> r;
        for (const auto& e : row) {
            auto v = constant_value(e);
            if (!v || !v->is_exact()) return std::nullopt;
            r.push_back(*v->exact());
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::optional<RationalMatrix> inverse(const RationalMatrix& m) {
    const std::size_t n = m.size();
    RationalMatrix a = m;
    RationalMatrix inv(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) return std::nullopt;
        inv[i][i] = Rational(1);
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col].is_zero()) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);
        Rational p = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            auto x = Rational::try_div(a[col][j], p);
            auto y = Rational::try_div(inv[col][j], p);
            if (!x || !y) return std::nullopt;
            a[col][j] = *x;
            inv[col][j] = *y;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col].is_zero()) continue;
            Rational f = a[r][col];
            for (std::size_t j = 0; j < n; ++j) {
                auto t1 = Rational::try_mul(f, a[col][j]);
                auto t2 = Rational::try_mul(f, inv[col][j]);
                if (!t1 || !t2) return std::nullopt;
                auto n1 = Rational::try_neg(*t1);
                auto n2 = Rational::try_neg(*t2);
                auto s1 = Rational::try_add(a[r][j], *n1);
                auto s2 = Rational::try_add(inv[r][j], *n2);
                if (!s1 || !s2) return std::nullopt;
                a[r][j] = *s1;
                inv[r][j] = *s2;
            }
        }
    }
    return inv;
}

Expr determinant(const ExprMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return Expr(1);
    if (n > 16) throw std::invalid_argument("determinant: matrix too large for symbolic expansion");
    for (const auto& row : m)
        if (row.size() != n) throw std::invalid_argument("determinant: matrix not square");
    // minors[S] = det(rows 0..|S|-1, columns S), expanded along the last row.
    std::vector<Expr> minors(std::size_t{1} << n);
    std::vector<bool> present(minors.size(), false);
    minors[0] = Expr(1);
    present[0] = true;
    for (std::uint32_t s = 0; s < minors.size(); ++s) {
        if (!present[s]) continue;
        const auto row = static_cast<std::size_t>(std::popcount(s));
        if (row == n) continue;
        if (minors[s].is_zero_literal()) continue;
        for (std::size_t c = 0; c < n; ++c) {
            if (s & (1u << c)) continue;
            if (m[row][c].is_zero_literal()) continue;
            std::uint32_t above = s >> (c + 1);
            Expr term = m[row][c] * minors[s];
            if (std::popcount(above) % 2) term = -term;
            std::uint32_t t = s | (1u << c);
            minors[t] = present[t] ? minors[t] + term : term;
            present[t] = true;
        }
    }
    for (std::uint32_t s = 0; s < minors.size(); ++s)
        if (present[s] && std::popcount(s) >= 2 && std::popcount(s) < static_cast<int>(n)) minors[s] = simplify(minors[s]);
    return simplify(minors.back());
}

std::optional<ExprMatrix> inverse(const ExprMatrix& m) {
    const std::size_t n = m.size();
    if (auto q = as_rational(m)) {
        auto inv = inverse(*q);
        if (!inv) {
            // Overflow or singular; decide via the symbolic determinant below.
        } else {
            ExprMatrix out(n, std::vector<Expr>(n));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) out[i][j] = Expr((*inv)[i][j]);
            return out;
        }
    }
    Expr det = determinant(m);
    if (det.is_zero_literal()) return std::nullopt;
    Expr inv_det = simplify(Expr(1) / det);
    ExprMatrix out(n, std::vector<Expr>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // Cofactor of entry (j, i).
            ExprMatrix minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<Expr> row;
                for (std::size_t c = 0; c < n; ++c)
                    if (c != i) row.push_back(m[r][c]);
                minor.push_back(std::move(row));
            }
            Expr cof = determinant(minor);
            if ((i + j) % 2) cof = -cof;
            out[i][j] = simplify(cof * inv_det);
        }
    }
    return out;
}

std::vector<Expr> multiply(const ExprMatrix& m, std::span<const Expr> v) {
    std::vector<Expr> out;
    for (const auto& row : m) {
        if (row.size() != v.size()) throw std::invalid_argument("multiply: dimension mismatch");
        Expr s;
        for (std::size_t j = 0; j < v.size(); ++j) s += row[j] * v[j];
        out.push_back(s);
    }
    return out;
}

ExprMatrix multiply(const ExprMatrix& a, const ExprMatrix& b) {
    ExprMatrix bt = transpose(b);
    ExprMatrix out;
    for (const auto& row : a) {
        std::vector<Expr> r;
        for (const auto& col : bt) {
            Expr s;
            for (std::size_t k = 0; k < row.size(); ++k) s += row[k] * col[k];
            r.push_back(s);
        }
        out.push_back(std::move(r));
    }
    return out;
}

ExprMatrix transpose(const ExprMatrix& m) {
    if (m.empty()) return {};
    ExprMatrix out(m.front().size(), std::vector<Expr>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) out[j][i] = m[i][j];
    return out;
}

ExprMatrix from_columns(const std::vector<std::vector<Expr>>& columns) { return transpose(columns); }

ExprMatrix identity(std::size_t n) {
    ExprMatrix out(n, std::vector<Expr>(n));
    for (std::size_t i = 0; i < n; ++i) out[i][i] = Expr(1);
    return out;
}

}  // namespace morphic::linalg
