#include "nomabeam/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace nomabeam {

Eigen::VectorXd SystemParams::sinr_thresholds() const {
    return (rate_thresholds.array() * std::log(2.0)).exp() - 1.0;
}

SystemParams SystemParams::from_sinr_thresholds(int num_antennas, int num_users,
                                                double p_ava,
                                                const Eigen::VectorXd& noise_vars,
                                                double eps0, double p_loss,
                                                double bandwidth,
                                                const Eigen::VectorXd& sinr_thresholds) {
    SystemParams p;
    p.num_antennas = num_antennas;
    p.num_users = num_users;
    p.p_ava = p_ava;
    p.noise_vars = noise_vars;
    p.eps0 = eps0;
    p.p_loss = p_loss;
    p.bandwidth = bandwidth;
    p.rate_thresholds = (1.0 + sinr_thresholds.array()).log() / std::log(2.0);
    p.validate();
    return p;
}

void SystemParams::validate() const {
    if (num_antennas < 1 || num_users < 1)
        throw std::invalid_argument("SystemParams: need at least one antenna and one user");
    if (!(p_ava > 0.0))
        throw std::invalid_argument("SystemParams: p_ava must be positive");
    if (p_loss < 0.0)
        throw std::invalid_argument("SystemParams: p_loss must be nonnegative");
    if (!(eps0 > 0.0) || eps0 > 1.0)
        throw std::invalid_argument("SystemParams: eps0 must lie in (0, 1]");
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("SystemParams: bandwidth must be positive");
    if (noise_vars.size() != num_users || (noise_vars.array() <= 0.0).any())
        throw std::invalid_argument("SystemParams: need a positive noise variance per user");
    if (rate_thresholds.size() != num_users || (rate_thresholds.array() < 0.0).any())
        throw std::invalid_argument("SystemParams: need a nonnegative rate threshold per user");
}

ChannelSet generate_channels(std::uint64_t seed, const Eigen::VectorXd& distances,
                             double path_loss_exp, int num_antennas) {
    const int num_users = static_cast<int>(distances.size());
    if (num_users < 1 || num_antennas < 1)
        throw std::invalid_argument("generate_channels: need K >= 1 and N >= 1");
    if ((distances.array() <= 0.0).any())
        throw std::invalid_argument("generate_channels: distances must be positive");
    if (path_loss_exp < 0.0)
        throw std::invalid_argument("generate_channels: path loss exponent must be nonnegative");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ChannelSet cs;
    cs.channels.resize(num_antennas, num_users);
    cs.distances = distances;
    cs.path_loss_exp = path_loss_exp;

    // CN(0,1) entries: unit variance per complex coefficient.
    for (int i = 0; i < num_users; ++i) {
        const double gain = std::pow(distances(i), -path_loss_exp / 2.0);
        for (int n = 0; n < num_antennas; ++n) {
            const double re = gauss(rng) * M_SQRT1_2;
            const double im = gauss(rng) * M_SQRT1_2;
            cs.channels(n, i) = gain * std::complex<double>(re, im);
        }
    }
    return order_users(cs);
}

ChannelSet order_users(const ChannelSet& cs) {
    const int num_users = cs.num_users();
    std::vector<int> base(num_users);
    if (cs.original_index.size() == static_cast<size_t>(num_users))
        base = cs.original_index;
    else
        std::iota(base.begin(), base.end(), 0);

    Eigen::VectorXd norms(num_users);
    for (int i = 0; i < num_users; ++i) norms(i) = cs.channels.col(i).squaredNorm();

    std::vector<int> perm(num_users);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](int a, int b) { return norms(a) > norms(b); });

    ChannelSet out;
    out.channels.resize(cs.num_antennas(), num_users);
    out.distances.resize(num_users);
    out.path_loss_exp = cs.path_loss_exp;
    out.ordered = true;
    out.original_index.resize(num_users);
    for (int pos = 0; pos < num_users; ++pos) {
        out.channels.col(pos) = cs.channels.col(perm[pos]);
        out.distances(pos) = cs.distances(perm[pos]);
        out.original_index[pos] = base[perm[pos]];
    }
    return out;
}

double sinr_decode(int k, int i, const Eigen::MatrixXcd& beamformers,
                   const ChannelSet& cs, const SystemParams& params) {
    if (k > i)
        throw std::invalid_argument("sinr_decode: receiver k must satisfy k <= i");
    if (k < 0 || i >= cs.num_users())
        throw std::invalid_argument("sinr_decode: user index out of range");

    const Eigen::VectorXcd& h_k = cs.channels.col(k);
    double interference = params.noise_vars(k);
    for (int j = 0; j < i; ++j)
        interference += std::norm(h_k.dot(beamformers.col(j)));
    return std::norm(h_k.dot(beamformers.col(i))) / interference;
}

double achievable_rate(int i, const Eigen::MatrixXcd& beamformers,
                       const ChannelSet& cs, const SystemParams& params) {
    double min_sinr = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= i; ++k)
        min_sinr = std::min(min_sinr, sinr_decode(k, i, beamformers, cs, params));
    return std::log2(1.0 + min_sinr);
}

double tx_power_of(const Eigen::MatrixXcd& beamformers) {
    return beamformers.squaredNorm();
}

double se_of(const Eigen::MatrixXcd& beamformers, const ChannelSet& cs,
             const SystemParams& params) {
    double se = 0.0;
    for (int i = 0; i < cs.num_users(); ++i)
        se += achievable_rate(i, beamformers, cs, params);
    return se;
}

double gee_of(const Eigen::MatrixXcd& beamformers, const ChannelSet& cs,
              const SystemParams& params) {
    const double consumed = tx_power_of(beamformers) / params.eps0 + params.p_loss;
    return params.bandwidth * se_of(beamformers, cs, params) / consumed;
}

BeamformerSolution evaluate_solution(const Eigen::MatrixXcd& beamformers,
                                     const ChannelSet& cs,
                                     const SystemParams& params) {
    BeamformerSolution sol;
    sol.beamformers = beamformers;
    sol.per_user_rates.resize(cs.num_users());
    for (int i = 0; i < cs.num_users(); ++i)
        sol.per_user_rates(i) = achievable_rate(i, beamformers, cs, params);
    sol.se = sol.per_user_rates.sum();
    sol.sum_rate = params.bandwidth * sol.se;
    sol.tx_power = tx_power_of(beamformers);
    sol.gee = sol.sum_rate / (sol.tx_power / params.eps0 + params.p_loss);
    return sol;
}

SicReport check_sic_ordering(const Eigen::MatrixXcd& beamformers,
                             const ChannelSet& cs, double tol) {
    SicReport report;
    const int num_users = cs.num_users();
    for (int rx = 0; rx < num_users; ++rx) {
        const Eigen::VectorXcd& h = cs.channels.col(rx);
        for (int j = 0; j + 1 < num_users; ++j) {
            const double weaker = std::norm(h.dot(beamformers.col(j + 1)));
            const double stronger = std::norm(h.dot(beamformers.col(j)));
            if (weaker < stronger - tol) {
                report.ok = false;
                report.violations.push_back({rx, j, stronger - weaker});
            }
        }
    }
    return report;
}

double tx_snr_to_power(double tx_snr_db, double noise_var) {
    return noise_var * std::pow(10.0, tx_snr_db / 10.0);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace nomabeam
