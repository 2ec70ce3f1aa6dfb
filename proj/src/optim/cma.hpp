#pragma once

#include <vector>

#include "core/rng.hpp"

namespace bedsim {

// Covariance matrix adaptation evolution strategy (rank-mu update with both
// evolution paths), minimizing a fitness. ask() draws one population from the
// current search distribution; tell() consumes it together with the fitness
// values. Asking twice without an intervening tell is an error.
class Cma {
public:
    // lambda = 0 picks the standard default 4 + floor(3 ln n)
    Cma(std::vector<double> mean, double sigma0, int lambda = 0);

    std::vector<std::vector<double>> ask(Rng& rng);
    void tell(const std::vector<std::vector<double>>& candidates,
              const std::vector<double>& fitnesses);

    int dimension() const { return n_; }
    int lambda() const { return lambda_; }
    int generation() const { return generation_; }
    double sigma() const { return sigma_; }
    const std::vector<double>& mean() const { return mean_; }
    // row-major n x n
    const std::vector<double>& covariance() const { return C_; }
    const std::vector<double>& weights() const { return weights_; }
    // times an eigenvalue had to be floored to keep the covariance SPD
    int repairCount() const { return repair_count_; }
    // smallest covariance eigenvalue seen at the latest decomposition
    double minEigenvalue() const { return min_eig_; }

private:
    void decompose();

    int n_;
    int lambda_;
    int mu_;
    std::vector<double> mean_;
    double sigma_;
    std::vector<double> C_;       // covariance, row-major
    std::vector<double> B_;       // eigenvector columns, row-major
    std::vector<double> D_;       // sqrt eigenvalues
    std::vector<double> p_sigma_;
    std::vector<double> p_c_;
    std::vector<double> weights_;
    double mu_eff_;
    double c_sigma_, d_sigma_, c_c_, c_1_, c_mu_, chi_n_;
    int generation_ = 0;
    int repair_count_ = 0;
    double min_eig_ = 1.0;

    bool ask_pending_ = false;
    std::vector<std::vector<double>> pending_y_;  // N(0, C) draws of the ask
};

}  // namespace bedsim
