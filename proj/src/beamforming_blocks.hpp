#pragma once

// Internal assembly helpers shared by the SCA engine and the baseline solvers.
// Beamformer coordinates live in the optimization vector as interleaved
// (real, imaginary) pairs, antenna-major within each user.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "nomabeam/cone_program.hpp"
#include "nomabeam/system_model.hpp"

namespace nomabeam::detail {

struct BeamVars {
    int first = 0;
    int num_antennas = 0;
    int num_users = 0;

    int re(int user, int ant) const { return first + 2 * (num_antennas * user + ant); }
    int im(int user, int ant) const { return re(user, ant) + 1; }
    int count() const { return 2 * num_antennas * num_users; }
};

// h^H w = (a'u + b'v) + j(a'v - b'u) for h = a + jb, w = u + jv.
inline LinExpr re_of_hw(const BeamVars& w, const Eigen::VectorXcd& h, int user) {
    LinExpr e;
    for (int n = 0; n < w.num_antennas; ++n) {
        e.add(w.re(user, n), h(n).real());
        e.add(w.im(user, n), h(n).imag());
    }
    return e;
}

inline LinExpr im_of_hw(const BeamVars& w, const Eigen::VectorXcd& h, int user) {
    LinExpr e;
    for (int n = 0; n < w.num_antennas; ++n) {
        e.add(w.re(user, n), -h(n).imag());
        e.add(w.im(user, n), h(n).real());
    }
    return e;
}

// First-order lower bound of |h^H w_user|^2 around the base beamformer:
// 2 Re(h^H w^n) Re(h^H w) + 2 Im(h^H w^n) Im(h^H w) - |h^H w^n|^2.
inline LinExpr hw_sq_lower_bound(const BeamVars& w, const Eigen::VectorXcd& h,
                                 int user, std::complex<double> hw_base) {
    LinExpr e = re_of_hw(w, h, user);
    for (LinTerm& t : e.terms) t.coeff *= 2.0 * hw_base.real();
    LinExpr ei = im_of_hw(w, h, user);
    for (const LinTerm& t : ei.terms) e.add(t.var, 2.0 * hw_base.imag() * t.coeff);
    e.constant = -std::norm(hw_base);
    return e;
}

// slack >= || [h_k^H w_{i-1}, ..., h_k^H w_0, sigma_k] ||  (interference cone)
inline void add_interference_soc(ConeProgram& p, const BeamVars& w,
                                 const Eigen::VectorXcd& h_k, int i, double sigma_k,
                                 int slack_var) {
    std::vector<LinExpr> entries;
    entries.reserve(2 * i + 2);
    entries.push_back(var_expr(slack_var));
    for (int j = 0; j < i; ++j) {
        entries.push_back(re_of_hw(w, h_k, j));
        entries.push_back(im_of_hw(w, h_k, j));
    }
    entries.push_back(LinExpr(sigma_k));
    p.add_soc(entries);
}

// (1/sqrt(eta)) Re(h_k^H w_i) >= || [h_k^H w_0 ... h_k^H w_{i-1}, sigma_k] ||
inline void add_min_rate_soc(ConeProgram& p, const BeamVars& w,
                             const Eigen::VectorXcd& h_k, int i, double sigma_k,
                             double eta) {
    LinExpr head = re_of_hw(w, h_k, i);
    for (LinTerm& t : head.terms) t.coeff /= std::sqrt(eta);
    std::vector<LinExpr> entries;
    entries.reserve(2 * i + 2);
    entries.push_back(head);
    for (int j = 0; j < i; ++j) {
        entries.push_back(re_of_hw(w, h_k, j));
        entries.push_back(im_of_hw(w, h_k, j));
    }
    entries.push_back(LinExpr(sigma_k));
    p.add_soc(entries);
}

// Received-power ordering chain |h_rx^H w_{j+1}|^2 >= |h_rx^H w_j|^2 with the
// left side linearized at the base beamformers and the right side kept as an
// exact epigraph t >= |h_rx^H w_j|^2. t variables must be preallocated as a
// contiguous block of K(K-1) slots (receiver-major).
inline void add_sic_chain(ConeProgram& p, const BeamVars& w, const ChannelSet& cs,
                          const Eigen::MatrixXcd& w_base, int t_first) {
    const int num_users = cs.num_users();
    for (int rx = 0; rx < num_users; ++rx) {
        const Eigen::VectorXcd h = cs.channels.col(rx);
        for (int j = 0; j + 1 < num_users; ++j) {
            const int t_var = t_first + rx * (num_users - 1) + j;
            const std::complex<double> base = h.dot(w_base.col(j + 1));
            LinExpr lin = hw_sq_lower_bound(w, h, j + 1, base);
            lin.add(t_var, -1.0);
            p.add_ge(lin, 0.0);
            // (t+1)/2 >= || [Re(h^H w_j), Im(h^H w_j), (t-1)/2] ||
            LinExpr head(0.5);
            head.add(t_var, 0.5);
            LinExpr tail(-0.5);
            tail.add(t_var, 0.5);
            p.add_soc({head, re_of_hw(w, h, j), im_of_hw(w, h, j), tail});
        }
    }
}

// sqrt(budget) >= || w ||  over all interleaved coordinates
inline void add_power_budget_soc(ConeProgram& p, const BeamVars& w, double budget) {
    std::vector<LinExpr> entries;
    entries.reserve(w.count() + 1);
    entries.push_back(LinExpr(std::sqrt(budget)));
    for (int v = w.first; v < w.first + w.count(); ++v)
        entries.push_back(var_expr(v));
    p.add_soc(entries);
}

// b >= || [w / sqrt(eps0), sqrt(P_l)] ||, i.e. b^2 >= P_t/eps0 + P_l
inline void add_consumed_power_soc(ConeProgram& p, const BeamVars& w, double eps0,
                                   double p_loss, int b_var) {
    std::vector<LinExpr> entries;
    entries.reserve(w.count() + 2);
    entries.push_back(var_expr(b_var));
    const double scale = 1.0 / std::sqrt(eps0);
    for (int v = w.first; v < w.first + w.count(); ++v)
        entries.push_back(var_expr(v, scale));
    entries.push_back(LinExpr(std::sqrt(p_loss)));
    p.add_soc(entries);
}

// Taylor row of Re(h_k^H w_i) >= sqrt(z-1) * a around (z_n, a_n):
// Re(h_k^H w_i) >= s*a_n + (a_n/(2s))(z - z_n) + s(a - a_n), s = sqrt(z_n - 1).
inline void add_rate_taylor_row(ConeProgram& p, const BeamVars& w,
                                const Eigen::VectorXcd& h_k, int i, int z_var,
                                int a_var, double z_n, double a_n) {
    const double s = std::sqrt(z_n - 1.0);
    LinExpr e = re_of_hw(w, h_k, i);
    e.add(z_var, -a_n / (2.0 * s));
    e.add(a_var, -s);
    p.add_ge(e, -a_n * z_n / (2.0 * s));
}

// Upper bound on any achievable per-user rate, used as the envelope range.
inline double rho_upper_bound(const ChannelSet& cs, const SystemParams& params) {
    double max_h2 = 0.0;
    for (int i = 0; i < cs.num_users(); ++i)
        max_h2 = std::max(max_h2, cs.channels.col(i).squaredNorm());
    const double min_noise = params.noise_vars.minCoeff();
    return std::log2(1.0 + params.p_ava * max_h2 / min_noise) + 1.0;
}

// Largest rho the secant envelope admits for a given z (inverse of the
// envelope requirement; needed to seed feasible iterates).
inline double envelope_max_rho(double z, double rho_lo, double rho_hi, int pieces) {
    const double width = (rho_hi - rho_lo) / pieces;
    double rho = rho_hi;
    for (int m = 0; m < pieces; ++m) {
        const double a = rho_lo + m * width;
        const double fa = std::exp2(a);
        const double slope = (std::exp2(a + width) - fa) / width;
        rho = std::min(rho, a + (z - fa) / slope);
    }
    return std::max(rho, rho_lo);
}

// Triangular index for (i, k) pairs with k <= i.
inline int tri_index(int i, int k) { return i * (i + 1) / 2 + k; }

}  // namespace nomabeam::detail
