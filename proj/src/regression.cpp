#include "mfsmp/regression.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mfsmp/errors.hpp"

namespace mfsmp {

namespace {

// Exponent tuples of total degree <= d over `vars` variables, by degree.
std::vector<std::vector<int>> monomials(int vars, int degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(static_cast<std::size_t>(vars), 0);
    for (int total = 0; total <= degree; ++total) {
        // Enumerate compositions of `total` into `vars` parts, lexicographically descending.
        std::vector<int> cur(static_cast<std::size_t>(vars), 0);
        auto rec = [&](auto&& self, int var, int left) -> void {
            if (var == vars - 1) {
                cur[static_cast<std::size_t>(var)] = left;
                out.push_back(cur);
                return;
            }
            for (int a = left; a >= 0; --a) {
                cur[static_cast<std::size_t>(var)] = a;
                self(self, var + 1, left - a);
            }
        };
        if (vars == 0) {
            if (total == 0) out.push_back({});
        } else {
            rec(rec, 0, total);
        }
    }
    return out;
}

double basis_value(const std::vector<int>& exps, const double* z) {
    double v = 1.0;
    for (std::size_t a = 0; a < exps.size(); ++a)
        for (int p = 0; p < exps[a]; ++p) v *= z[a];
    return v;
}

}  // namespace

double FittedRegression::operator()(std::span<const double> row) const {
    std::vector<double> z(active_.size());
    for (std::size_t a = 0; a < active_.size(); ++a)
        z[a] = (row[static_cast<std::size_t>(active_[a])] - mean_[a]) / scale_[a];
    double s = 0.0;
    for (std::size_t c = 0; c < exponents_.size(); ++c) s += beta_[static_cast<Eigen::Index>(c)] * basis_value(exponents_[c], z.data());
    return s;
}

LeastSquaresProjector::LeastSquaresProjector(const Eigen::MatrixXd& features, const RegressionBasis& basis) {
    if (basis.degree < 0 || basis.ridge < 0) throw std::invalid_argument("RegressionBasis: negative degree or ridge");
    const Eigen::Index n = features.rows();
    if (n < 1) throw std::invalid_argument("regression needs at least one row");
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
        const double m = features.col(c).mean();
        const double sd = std::sqrt((features.col(c).array() - m).square().mean());
        if (sd > 1e-10 * (1.0 + std::abs(m))) {
            shape_.active_.push_back(static_cast<int>(c));
            shape_.mean_.push_back(m);
            shape_.scale_.push_back(sd);
        }
    }
    shape_.exponents_ = monomials(static_cast<int>(shape_.active_.size()), basis.degree);
    const auto p = static_cast<Eigen::Index>(shape_.exponents_.size());
    if (n < p) {
        std::ostringstream os;
        os << n << " rows for " << p << " basis functions";
        throw RankDeficient(os.str());
    }
    design_.resize(n, p);
    std::vector<double> z(shape_.active_.size());
    for (Eigen::Index r = 0; r < n; ++r) {
        for (std::size_t a = 0; a < z.size(); ++a)
            z[a] = (features(r, shape_.active_[a]) - shape_.mean_[a]) / shape_.scale_[a];
        for (Eigen::Index c = 0; c < p; ++c) design_(r, c) = basis_value(shape_.exponents_[static_cast<std::size_t>(c)], z.data());
    }
    ridge_rows_ = std::sqrt(basis.ridge * static_cast<double>(n));
    Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(n + p - 1, p);
    augmented.topRows(n) = design_;
    for (Eigen::Index c = 1; c < p; ++c) augmented(n + c - 1, c) = ridge_rows_;
    qr_.compute(augmented);
    if (qr_.rank() < p) {
        std::ostringstream os;
        os << "rank " << qr_.rank() << " < " << p << " after ridge augmentation";
        throw RankDeficient(os.str());
    }
}

Eigen::VectorXd LeastSquaresProjector::solve(std::span<const double> targets) const {
    const Eigen::Index n = design_.rows(), p = design_.cols();
    if (static_cast<Eigen::Index>(targets.size()) != n) throw std::invalid_argument("regression: target length");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + p - 1);
    for (Eigen::Index r = 0; r < n; ++r) rhs[r] = targets[static_cast<std::size_t>(r)];
    return qr_.solve(rhs);
}

FittedRegression LeastSquaresProjector::fit(std::span<const double> targets) const {
    FittedRegression f = shape_;
    f.beta_ = solve(targets);
    return f;
}

void LeastSquaresProjector::project(std::span<const double> targets, std::span<double> fitted) const {
    const Eigen::VectorXd beta = solve(targets);
    const Eigen::VectorXd v = design_ * beta;
    for (Eigen::Index r = 0; r < v.size(); ++r) fitted[static_cast<std::size_t>(r)] = v[r];
}

std::vector<double> LeastSquaresProjector::project(std::span<const double> targets) const {
    std::vector<double> out(targets.size());
    project(targets, out);
    return out;
}

FittedRegression regress_conditional(const Eigen::MatrixXd& features, std::span<const double> targets,
                                     const RegressionBasis& basis) {
    return LeastSquaresProjector(features, basis).fit(targets);
}

}  // namespace mfsmp
