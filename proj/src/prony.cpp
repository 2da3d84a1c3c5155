#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "usfd/chanest.hpp"

namespace usfd {

namespace {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

CMat hankel(std::span<const Complex> z, std::size_t rows, std::size_t cols)
{
    CMat H(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t l = 0; l < cols; ++l) {
            H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = z[i + l];
        }
    }
    return H;
}

struct Annihilator {
    CVec filter;          // h_0 .. h_M
    Eigen::VectorXd sv;   // singular values of the Hankel system
};

Annihilator annihilating_filter(std::span<const Complex> z, int order)
{
    const auto n = z.size();
    const auto M = static_cast<std::size_t>(order);
    const CMat H = hankel(z, n - M, M + 1);
    Eigen::JacobiSVD<CMat> svd(H, Eigen::ComputeFullV);
    return {svd.matrixV().col(order), svd.singularValues()};
}

bool rank_deficient(const Eigen::VectorXd& sv, int order, double floor)
{
    // sv has order + 1 entries; a proper model leaves exactly one near zero
    const double tol = std::max(1e-10 * sv(0), floor);
    return order >= 1 && sv(order - 1) <= tol;
}

}  // namespace

ExponentialFit prony_fit(std::span<const Complex> z, int order)
{
    if (order < 0) {
        throw std::invalid_argument("prony_fit: negative order");
    }
    if (order == 0) {
        return {};
    }
    if (z.size() < static_cast<std::size_t>(2 * order)) {
        throw std::invalid_argument("prony_fit: need at least 2M samples");
    }
    const Annihilator ann = annihilating_filter(z, order);
    const CVec& h = ann.filter;
    if (std::abs(h(order)) < 1e-14 * h.norm()) {
        throw EstimationError("prony_fit: degenerate annihilating filter");
    }
    // companion matrix of h_0 + h_1 x + ... + h_M x^M
    CMat C = CMat::Zero(order, order);
    for (int i = 1; i < order; ++i) {
        C(i, i - 1) = 1.0;
    }
    for (int i = 0; i < order; ++i) {
        C(i, order - 1) = -h(i) / h(order);
    }
    Eigen::ComplexEigenSolver<CMat> eig(C);
    const CVec roots = eig.eigenvalues();

    const auto n = static_cast<Eigen::Index>(z.size());
    CMat V(n, order);
    for (Eigen::Index m = 0; m < order; ++m) {
        Complex p = 1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            V(i, m) = p;
            p *= roots(m);
        }
    }
    CVec rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        rhs(i) = z[static_cast<std::size_t>(i)];
    }
    const CVec a = V.colPivHouseholderQr().solve(rhs);

    ExponentialFit fit;
    fit.roots.assign(roots.data(), roots.data() + order);
    fit.amplitudes.assign(a.data(), a.data() + order);
    return fit;
}

FoldModel prony(std::span<const Complex> z, int order, const BinLayout& layout, double lambda,
                double noise_floor)
{
    if (order < 0) {
        throw std::invalid_argument("prony: negative order");
    }
    if (layout.frame_size < 1) {
        throw std::invalid_argument("prony: frame size must be positive");
    }
    if (order == 0) {
        return {};
    }
    if (z.size() < static_cast<std::size_t>(2 * order)) {
        throw std::invalid_argument("prony: need at least 2M samples");
    }
    const int N = layout.frame_size;

    int M = order;
    Annihilator ann = annihilating_filter(z, M);
    if (rank_deficient(ann.sv, M, noise_floor)) {
        --M;
        if (M == 0) {
            return {};
        }
        ann = annihilating_filter(z, M);
        if (rank_deficient(ann.sv, M, noise_floor)) {
            throw EstimationError("prony: Hankel system rank deficient after reducing the order");
        }
    }

    // |h(e^{-j 2 pi k / N})| over the sample grid; the M smallest are the fold locations
    std::vector<double> response(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        const Complex x = std::polar(1.0, -2.0 * std::numbers::pi * k / N);
        Complex acc = 0.0;
        for (Eigen::Index l = ann.filter.size() - 1; l >= 0; --l) {
            acc = acc * x + ann.filter(l);
        }
        response[static_cast<std::size_t>(k)] = std::abs(acc);
    }
    std::vector<int> idx(static_cast<std::size_t>(N));
    std::iota(idx.begin(), idx.end(), 0);
    const int take = std::min(M, N);
    std::partial_sort(idx.begin(), idx.begin() + take, idx.end(),
                      [&](int a, int b) { return response[a] < response[b]; });
    std::vector<int> loc(idx.begin(), idx.begin() + take);
    std::sort(loc.begin(), loc.end());

    const auto n = static_cast<Eigen::Index>(z.size());
    CMat V(n, take);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int m = 0; m < take; ++m) {
            const auto bin = static_cast<long long>(layout.first_bin) + i;
            const long long phase = (bin * loc[m]) % N;
            V(i, m) = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(phase) / N);
        }
    }
    CVec rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        rhs(i) = z[static_cast<std::size_t>(i)];
    }
    const CVec mu = V.colPivHouseholderQr().solve(rhs);

    FoldModel model;
    const double step = 2.0 * lambda;
    for (int m = 0; m < take; ++m) {
        const double snapped = step * std::round(mu(m).real() / step);
        if (snapped != 0.0) {
            model.amplitudes.push_back(snapped);
            model.locations.push_back(static_cast<double>(loc[m]));
        }
    }
    return model;
}

}  // namespace usfd
