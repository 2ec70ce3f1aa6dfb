#include "optim/cma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace bedsim {

namespace {

// Jacobi eigendecomposition of a symmetric matrix; A is destroyed, V receives
// eigenvector columns (row-major), eig the eigenvalues. Fine for tiny n.
void jacobiEigen(std::vector<double>& A, std::vector<double>& V, std::vector<double>& eig,
                 int n) {
    V.assign(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) V[std::size_t(i) * n + i] = 1.0;
    auto a = [&](int i, int j) -> double& { return A[std::size_t(i) * n + j]; };
    auto v = [&](int i, int j) -> double& { return V[std::size_t(i) * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-24) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    eig.resize(n);
    for (int i = 0; i < n; ++i) eig[i] = A[std::size_t(i) * n + i];
}

}  // namespace

Cma::Cma(std::vector<double> mean, double sigma0, int lambda)
    : n_(int(mean.size())), mean_(std::move(mean)), sigma_(sigma0) {
    requireArg(n_ >= 1, "cma mean must be non-empty");
    requireArg(sigma0 > 0.0, "cma sigma0 must be > 0");
    lambda_ = lambda > 0 ? lambda : 4 + int(std::floor(3.0 * std::log(double(n_))));
    requireArg(lambda_ >= 2, "cma population size must be >= 2");
    mu_ = lambda_ / 2;

    weights_.resize(mu_);
    double wsum = 0.0;
    for (int i = 0; i < mu_; ++i) {
        weights_[i] = std::log(lambda_ / 2.0 + 0.5) - std::log(double(i + 1));
        wsum += weights_[i];
    }
    for (double& w : weights_) w /= wsum;
    double w2 = 0.0;
    for (double w : weights_) w2 += w * w;
    mu_eff_ = 1.0 / w2;

    const double n = double(n_);
    c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
    d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) +
               c_sigma_;
    c_c_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
    c_1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
    c_mu_ = std::min(1.0 - c_1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) /
                                     ((n + 2.0) * (n + 2.0) + mu_eff_));
    chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    C_.assign(std::size_t(n_) * n_, 0.0);
    for (int i = 0; i < n_; ++i) C_[std::size_t(i) * n_ + i] = 1.0;
    p_sigma_.assign(n_, 0.0);
    p_c_.assign(n_, 0.0);
    decompose();
}

void Cma::decompose() {
    std::vector<double> A = C_;
    std::vector<double> eig;
    jacobiEigen(A, B_, eig, n_);
    min_eig_ = *std::min_element(eig.begin(), eig.end());
    bool repaired = false;
    for (double& e : eig) {
        if (e < 1e-12) {
            e = 1e-12;
            repaired = true;
        }
    }
    if (repaired) {
        ++repair_count_;
        // rebuild C from the floored spectrum so it stays SPD
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                double v = 0.0;
                for (int k = 0; k < n_; ++k)
                    v += B_[std::size_t(i) * n_ + k] * eig[k] * B_[std::size_t(j) * n_ + k];
                C_[std::size_t(i) * n_ + j] = v;
            }
    }
    D_.resize(n_);
    for (int i = 0; i < n_; ++i) D_[i] = std::sqrt(eig[i]);
}

std::vector<std::vector<double>> Cma::ask(Rng& rng) {
    requireState(!ask_pending_, "cma ask called twice without tell");
    pending_y_.assign(lambda_, std::vector<double>(n_, 0.0));
    std::vector<std::vector<double>> out(lambda_, std::vector<double>(n_, 0.0));
    std::vector<double> z(n_);
    for (int k = 0; k < lambda_; ++k) {
        for (int i = 0; i < n_; ++i) z[i] = rng.normal();
        for (int i = 0; i < n_; ++i) {
            double y = 0.0;
            for (int j = 0; j < n_; ++j) y += B_[std::size_t(i) * n_ + j] * D_[j] * z[j];
            pending_y_[k][i] = y;
            out[k][i] = mean_[i] + sigma_ * y;
        }
    }
    ask_pending_ = true;
    return out;
}

void Cma::tell(const std::vector<std::vector<double>>& candidates,
               const std::vector<double>& fitnesses) {
    requireState(ask_pending_, "cma tell without a matching ask");
    requireArg(int(candidates.size()) == lambda_ && int(fitnesses.size()) == lambda_,
               "cma tell arity mismatch");
    for (const auto& c : candidates)
        requireArg(int(c.size()) == n_, "cma candidate dimension mismatch");

    std::vector<int> order(lambda_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fitnesses[a] < fitnesses[b]; });

    // recover y = (x - m) / sigma from the told candidates so that tell only
    // depends on its arguments (candidates may be a reordering of ask output)
    std::vector<std::vector<double>> y(lambda_, std::vector<double>(n_));
    for (int k = 0; k < lambda_; ++k)
        for (int i = 0; i < n_; ++i) y[k][i] = (candidates[k][i] - mean_[i]) / sigma_;

    std::vector<double> y_w(n_, 0.0);
    for (int r = 0; r < mu_; ++r)
        for (int i = 0; i < n_; ++i) y_w[i] += weights_[r] * y[order[r]][i];

    for (int i = 0; i < n_; ++i) mean_[i] += sigma_ * y_w[i];

    // C^{-1/2} y_w via the eigendecomposition
    std::vector<double> c_inv_half_yw(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double proj = 0.0;
        for (int j = 0; j < n_; ++j) proj += B_[std::size_t(j) * n_ + i] * y_w[j];
        c_inv_half_yw[i] = proj / D_[i];
    }
    std::vector<double> tmp(n_, 0.0);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) tmp[i] += B_[std::size_t(i) * n_ + j] * c_inv_half_yw[j];

    double ps_norm2 = 0.0;
    for (int i = 0; i < n_; ++i) {
        p_sigma_[i] = (1.0 - c_sigma_) * p_sigma_[i] +
                      std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_) * tmp[i];
        ps_norm2 += p_sigma_[i] * p_sigma_[i];
    }
    double ps_norm = std::sqrt(ps_norm2);

    ++generation_;
    double h_sig_test = ps_norm / std::sqrt(1.0 - std::pow(1.0 - c_sigma_,
                                                           2.0 * generation_)) /
                        chi_n_;
    double h_sig = h_sig_test < 1.4 + 2.0 / (n_ + 1.0) ? 1.0 : 0.0;

    for (int i = 0; i < n_; ++i)
        p_c_[i] = (1.0 - c_c_) * p_c_[i] +
                  h_sig * std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_) * y_w[i];

    double delta_h = (1.0 - h_sig) * c_c_ * (2.0 - c_c_);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            double rank_mu = 0.0;
            for (int r = 0; r < mu_; ++r)
                rank_mu += weights_[r] * y[order[r]][i] * y[order[r]][j];
            double& cij = C_[std::size_t(i) * n_ + j];
            cij = (1.0 - c_1_ - c_mu_) * cij +
                  c_1_ * (p_c_[i] * p_c_[j] + delta_h * cij) + c_mu_ * rank_mu;
        }
    }
    // enforce exact symmetry against accumulation drift
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) {
            double v = 0.5 * (C_[std::size_t(i) * n_ + j] + C_[std::size_t(j) * n_ + i]);
            C_[std::size_t(i) * n_ + j] = v;
            C_[std::size_t(j) * n_ + i] = v;
        }

    sigma_ *= std::exp((c_sigma_ / d_sigma_) * (ps_norm / chi_n_ - 1.0));

    decompose();
    ask_pending_ = false;
    pending_y_.clear();
}

}  // namespace bedsim
