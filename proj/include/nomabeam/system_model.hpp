#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace nomabeam {

/// Static cell parameters. Rates are kept bandwidth-free (B_w = 1) inside the
/// optimization layer; `bandwidth` only enters reported sum rates and GEE.
struct SystemParams {
    int num_antennas = 0;             // N
    int num_users = 0;                // K
    double p_ava = 0.0;               // available transmit power [W]
    Eigen::VectorXd noise_vars;       // sigma_i^2 per user [W]
    double eps0 = 1.0;                // amplifier efficiency, in (0, 1]
    double p_loss = 0.0;              // circuit losses P_l [W]
    double bandwidth = 1.0;           // B_w [Hz]
    Eigen::VectorXd rate_thresholds;  // R_i^th [bits/s/Hz]

    // eta_i^th = 2^{R_i^th} - 1
    Eigen::VectorXd sinr_thresholds() const;

    static SystemParams from_sinr_thresholds(int num_antennas, int num_users,
                                             double p_ava,
                                             const Eigen::VectorXd& noise_vars,
                                             double eps0, double p_loss,
                                             double bandwidth,
                                             const Eigen::VectorXd& sinr_thresholds);

    // Throws std::invalid_argument if any invariant is broken.
    void validate() const;
};

/// Channel vectors of one cell realization. Column i of `channels` is h_i.
/// When `ordered`, users are sorted strongest first:
/// ||h_0||^2 >= ||h_1||^2 >= ... >= ||h_{K-1}||^2.
struct ChannelSet {
    Eigen::MatrixXcd channels;        // N x K
    Eigen::VectorXd distances;        // meters, aligned with columns
    double path_loss_exp = 0.0;
    bool ordered = false;
    std::vector<int> original_index;  // sorted position -> index before ordering

    int num_users() const { return static_cast<int>(channels.cols()); }
    int num_antennas() const { return static_cast<int>(channels.rows()); }
};

/// Beamformers plus the metrics achieved with them. Column i of `beamformers`
/// is w_i (same ordering as the ChannelSet used to evaluate it).
struct BeamformerSolution {
    Eigen::MatrixXcd beamformers;     // N x K
    Eigen::VectorXd per_user_rates;   // bits/s/Hz, bandwidth-free
    double se = 0.0;                  // sum of per-user rates [bits/s/Hz]
    double sum_rate = 0.0;            // B_w * se [bits/s]
    double gee = 0.0;                 // sum_rate / (P_t/eps0 + P_l) [bits/J]
    double tx_power = 0.0;            // sum ||w_i||^2 [W]
};

/// h_i = d_i^{-kappa/2} g_i with g_i i.i.d. CN(0, 1) entries, then ordered by
/// descending channel norm. Deterministic for a fixed seed.
ChannelSet generate_channels(std::uint64_t seed, const Eigen::VectorXd& distances,
                             double path_loss_exp, int num_antennas);

/// Sorts users by descending ||h_i||^2 (ties keep the lower original index
/// first) and records the permutation. Idempotent.
ChannelSet order_users(const ChannelSet& cs);

/// SINR of decoding user i's stream at receiver k (0-based, k <= i). Residual
/// interference runs over streams j < i only; streams of weaker users are
/// assumed removed by SIC.
double sinr_decode(int k, int i, const Eigen::MatrixXcd& beamformers,
                   const ChannelSet& cs, const SystemParams& params);

/// R_i = min_{k <= i} log2(1 + SINR_k^{(i)}), bandwidth-free.
double achievable_rate(int i, const Eigen::MatrixXcd& beamformers,
                       const ChannelSet& cs, const SystemParams& params);

double tx_power_of(const Eigen::MatrixXcd& beamformers);
double se_of(const Eigen::MatrixXcd& beamformers, const ChannelSet& cs,
             const SystemParams& params);
double gee_of(const Eigen::MatrixXcd& beamformers, const ChannelSet& cs,
              const SystemParams& params);

/// Fills a BeamformerSolution with all metrics for the given beamformers.
BeamformerSolution evaluate_solution(const Eigen::MatrixXcd& beamformers,
                                     const ChannelSet& cs,
                                     const SystemParams& params);

struct SicViolation {
    int receiver = 0;
    int stream = 0;     // |h_rx^H w_{stream+1}|^2 < |h_rx^H w_stream|^2
    double margin = 0;  // amount by which the pair is out of order
};

struct SicReport {
    bool ok = true;
    std::vector<SicViolation> violations;
};

/// Received-power ordering (weaker users' streams arrive stronger at every
/// receiver): |h_i^H w_j|^2 non-decreasing in j, within `tol` absolute.
SicReport check_sic_ordering(const Eigen::MatrixXcd& beamformers,
                             const ChannelSet& cs, double tol = 1e-8);

/// P_ava = sigma^2 * 10^(tx_snr_db / 10)
double tx_snr_to_power(double tx_snr_db, double noise_var);

/// dBm -> watts, 10^((dbm - 30)/10)
double dbm_to_watts(double dbm);

}  // namespace nomabeam
