#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mfsmp {

/// Monomials up to total degree `degree` in the standardised features, with
/// a ridge penalty `ridge * N * |beta|^2` on every non-intercept coefficient.
struct RegressionBasis {
    int degree = 2;
    double ridge = 1e-8;
    /// Adds Y(t) as a third feature where a solver has it available.
    bool use_y = false;
};

/// Fitted conditional-expectation evaluator.
class FittedRegression {
public:
    /// Value at one raw feature row.
    double operator()(std::span<const double> row) const;
    const Eigen::VectorXd& coefficients() const { return beta_; }

private:
    friend class LeastSquaresProjector;
    std::vector<int> active_;
    std::vector<double> mean_, scale_;
    std::vector<std::vector<int>> exponents_;
    Eigen::VectorXd beta_;
};

/// Factorises the design matrix of one feature set once and projects any
/// number of targets onto it.
class LeastSquaresProjector {
public:
    /// `features` is N x d (rows are particles). Throws RankDeficient.
    LeastSquaresProjector(const Eigen::MatrixXd& features, const RegressionBasis& basis);

    std::size_t rows() const { return static_cast<std::size_t>(design_.rows()); }
    std::size_t basis_size() const { return static_cast<std::size_t>(design_.cols()); }

    FittedRegression fit(std::span<const double> targets) const;
    /// Fitted values at the training rows.
    void project(std::span<const double> targets, std::span<double> fitted) const;
    std::vector<double> project(std::span<const double> targets) const;

private:
    Eigen::VectorXd solve(std::span<const double> targets) const;

    FittedRegression shape_;
    Eigen::MatrixXd design_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
    double ridge_rows_ = 0;
};

FittedRegression regress_conditional(const Eigen::MatrixXd& features, std::span<const double> targets,
                                     const RegressionBasis& basis);

}  // namespace mfsmp
